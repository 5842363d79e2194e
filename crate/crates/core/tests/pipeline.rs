use std::f64::consts::PI;
use std::time::Instant;

use helmsweep::cli::cmd_solve;
use helmsweep::config::{MediumKind, Mode, RunConfig};
use helmsweep::medium::dirichlet_profile;
use helmsweep::render::{render, RenderMode};
use helmsweep::residual::{centered_mode, fft2};
use helmsweep::{Exec, Field2D, Sweeper};

#[test]
fn one_way_homogeneous_smoke_run_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::with_omega(20.0 * PI);
    cfg.mode = Mode::OneWay;
    cfg.medium = MediumKind::Homogeneous;
    cfg.output_dir = dir.path().to_path_buf();
    let start = Instant::now();
    let out = cmd_solve(&cfg, Exec::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert!(out.two_way.is_none());
    assert!(out.one_way.relative_residual.is_finite());
}

#[test]
fn default_run_reproduces_bytes() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::with_omega(20.0 * PI);
        cfg.output_dir = dir.path().to_path_buf();
        cmd_solve(&cfg, Exec::default()).unwrap();
        let bytes = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        (bytes("u_two.cfld"), bytes("residual.csv"))
    };
    let (a, b) = (run(), run());
    assert!(a.0 == b.0, "u_two.cfld differs between reruns");
    assert_eq!(String::from_utf8(a.1).unwrap(), String::from_utf8(b.1).unwrap());
}

#[test]
fn one_way_spectrum_sits_at_positive_sigma_x() {
    let omega = 20.0 * PI;
    let cfg = RunConfig::with_omega(omega);
    let medium = cfg.build_medium().unwrap();
    let sweeper = Sweeper::new(&medium, omega, cfg.build_pade().unwrap());
    let u: Field2D = sweeper.one_way(&dirichlet_profile(&medium.domain.ys(), omega)).unwrap().field;
    let img = render(&u, RenderMode::Fft, Exec::default()).unwrap();
    let peak = (0..img.width * img.height).max_by_key(|&k| img.pixels[k]).unwrap();
    assert!(peak % img.width > img.width / 2, "peak column {} of {}", peak % img.width, img.width);

    let spectrum = fft2(&u, Exec::default());
    let (mut right, mut total) = (0.0, 0.0);
    for mx in 0..u.domain.nx {
        let e: f64 = spectrum[mx * u.domain.ny..(mx + 1) * u.domain.ny].iter().map(|v| v.norm_sqr()).sum();
        total += e;
        if centered_mode(mx, u.domain.nx) > 0 {
            right += e;
        }
    }
    assert!(right > 0.9 * total, "positive sigma_x share {}", right / total);
}
