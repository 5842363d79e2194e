//! Run configuration and its INI-style file format.
//!
//! ```ini
//! [run]
//! omega = 120pi        # "pi" suffix multiplies by π
//! mode = two-way       # one-way | two-way
//!
//! [medium]
//! medium = paper-inclusion   # paper-inclusion | homogeneous
//! ppw_x = 36
//! ppw_y = 12
//! alpha = 0.5
//! a_damp = 0.01
//! a_frac = 10
//!
//! [pade]
//! pade_terms = 4
//! theta_deg = 45
//! pade_provider = classical  # classical | table
//!
//! [output]
//! dir = out
//! csv = false
//! ```
//!
//! Comments start with `#` or `;`. Unknown sections and keys are errors.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::medium::{Attenuation, Medium};
use crate::pade::{PadeProvider, PadeSet, MAX_CLASSICAL_ORDER, MAX_TABLE_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    OneWay,
    #[default]
    TwoWay,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::OneWay => "one-way",
            Mode::TwoWay => "two-way",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one-way" => Some(Mode::OneWay),
            "two-way" => Some(Mode::TwoWay),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MediumKind {
    #[default]
    Inclusion,
    Homogeneous,
}

impl MediumKind {
    pub fn name(self) -> &'static str {
        match self {
            MediumKind::Inclusion => "paper-inclusion",
            MediumKind::Homogeneous => "homogeneous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper-inclusion" => Some(MediumKind::Inclusion),
            "homogeneous" => Some(MediumKind::Homogeneous),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega: f64,
    pub pade_terms: usize,
    pub theta_deg: f64,
    pub pade_provider: PadeProvider,
    pub ppw_x: usize,
    pub ppw_y: usize,
    pub alpha: f64,
    pub a_damp: f64,
    pub a_frac: f64,
    pub mode: Mode,
    pub medium: MediumKind,
    pub output_dir: PathBuf,
    pub write_csv: bool,
}

impl RunConfig {
    /// Defaults of the inclusion experiment at frequency `omega`.
    pub fn with_omega(omega: f64) -> Self {
        Self {
            omega,
            pade_terms: 4,
            theta_deg: 45.0,
            pade_provider: PadeProvider::Classical,
            ppw_x: 36,
            ppw_y: 12,
            alpha: 0.5,
            a_damp: 0.01,
            a_frac: 10.0,
            mode: Mode::TwoWay,
            medium: MediumKind::Inclusion,
            output_dir: PathBuf::from("out"),
            write_csv: false,
        }
    }

    pub fn attenuation(&self) -> Attenuation {
        Attenuation {
            a_damp: self.a_damp,
            a_frac: self.a_frac,
            alpha: self.alpha,
        }
    }

    pub fn build_medium(&self) -> Result<Medium> {
        match self.medium {
            MediumKind::Inclusion => Medium::inclusion(self.omega, self.ppw_x, self.ppw_y, self.attenuation()),
            MediumKind::Homogeneous => {
                Medium::homogeneous(self.omega, self.ppw_x, self.ppw_y, self.attenuation())
            }
        }
    }

    pub fn build_pade(&self) -> Result<PadeSet> {
        PadeSet::build(self.pade_provider, self.pade_terms, self.theta_deg.to_radians())
    }

    /// Every range violation, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.omega.is_finite() && self.omega > 0.0) {
            v.push(format!("omega must be positive, got {}", self.omega));
        }
        let max_m = match self.pade_provider {
            PadeProvider::Classical => MAX_CLASSICAL_ORDER,
            PadeProvider::Table => MAX_TABLE_ORDER,
        };
        if !(1..=max_m).contains(&self.pade_terms) {
            v.push(format!(
                "pade_terms must be in 1..={max_m} for the {} provider, got {}",
                self.pade_provider.name(),
                self.pade_terms
            ));
        }
        if !(0.0..=90.0).contains(&self.theta_deg) {
            v.push(format!("theta_deg must lie in [0, 90], got {}", self.theta_deg));
        }
        for (name, ppw) in [("ppw_x", self.ppw_x), ("ppw_y", self.ppw_y)] {
            if ppw < 4 {
                v.push(format!("{name} must be at least 4, got {ppw}"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            v.push(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        for (name, a) in [("a_damp", self.a_damp), ("a_frac", self.a_frac)] {
            if !(a.is_finite() && a >= 0.0) {
                v.push(format!("{name} must be non-negative, got {a}"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(v))
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::with_omega(f64::NAN);
        let mut omega_set = false;
        let mut section: Option<Section> = None;
        let mut seen: Vec<(Section, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::ConfigSyntax { line, message };
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{content}`")))?
                    .trim();
                section = Some(Section::parse(name).ok_or_else(|| err(format!("unknown section [{name}]")))?);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.ok_or_else(|| err(format!("key `{key}` appears before any section")))?;
            if seen.iter().any(|(s, k)| *s == sec && k == key) {
                return Err(err(format!("duplicate key `{key}` in [{sec}]")));
            }
            seen.push((sec, key.to_string()));

            let bad = |what: &str| err(format!("invalid value `{value}` for `{key}`: expected {what}"));
            match (sec, key) {
                (Section::Run, "omega") => {
                    cfg.omega = parse_real(value).ok_or_else(|| bad("a number, optionally with a `pi` suffix"))?;
                    omega_set = true;
                }
                (Section::Run, "mode") => {
                    cfg.mode = Mode::parse(value).ok_or_else(|| bad("one-way or two-way"))?;
                }
                (Section::Medium, "medium") => {
                    cfg.medium = MediumKind::parse(value).ok_or_else(|| bad("paper-inclusion or homogeneous"))?;
                }
                (Section::Medium, "ppw_x") => cfg.ppw_x = value.parse().map_err(|_| bad("an integer"))?,
                (Section::Medium, "ppw_y") => cfg.ppw_y = value.parse().map_err(|_| bad("an integer"))?,
                (Section::Medium, "alpha") => cfg.alpha = parse_real(value).ok_or_else(|| bad("a number"))?,
                (Section::Medium, "a_damp") => cfg.a_damp = parse_real(value).ok_or_else(|| bad("a number"))?,
                (Section::Medium, "a_frac") => cfg.a_frac = parse_real(value).ok_or_else(|| bad("a number"))?,
                (Section::Pade, "pade_terms") => cfg.pade_terms = value.parse().map_err(|_| bad("an integer"))?,
                (Section::Pade, "theta_deg") => cfg.theta_deg = parse_real(value).ok_or_else(|| bad("a number"))?,
                (Section::Pade, "pade_provider") => {
                    cfg.pade_provider = PadeProvider::parse(value).ok_or_else(|| bad("classical or table"))?;
                }
                (Section::Output, "dir") => cfg.output_dir = PathBuf::from(value),
                (Section::Output, "csv") => {
                    cfg.write_csv = value.parse().map_err(|_| bad("true or false"))?;
                }
                _ => return Err(err(format!("unknown key `{key}` in [{sec}]"))),
            }
        }

        let mut violations = Vec::new();
        if !omega_set {
            violations.push("omega missing".to_string());
        }
        violations.extend(cfg.violations().into_iter().filter(|m| omega_set || !m.starts_with("omega")));
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::ConfigInvalid(violations))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Serializes to the same format `parse` reads; `omega` is written exactly.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[run]")?;
        writeln!(f, "omega = {:?}", self.omega)?;
        writeln!(f, "mode = {}", self.mode.name())?;
        writeln!(f)?;
        writeln!(f, "[medium]")?;
        writeln!(f, "medium = {}", self.medium.name())?;
        writeln!(f, "ppw_x = {}", self.ppw_x)?;
        writeln!(f, "ppw_y = {}", self.ppw_y)?;
        writeln!(f, "alpha = {:?}", self.alpha)?;
        writeln!(f, "a_damp = {:?}", self.a_damp)?;
        writeln!(f, "a_frac = {:?}", self.a_frac)?;
        writeln!(f)?;
        writeln!(f, "[pade]")?;
        writeln!(f, "pade_terms = {}", self.pade_terms)?;
        writeln!(f, "theta_deg = {:?}", self.theta_deg)?;
        writeln!(f, "pade_provider = {}", self.pade_provider.name())?;
        writeln!(f)?;
        writeln!(f, "[output]")?;
        writeln!(f, "dir = {}", self.output_dir.display())?;
        writeln!(f, "csv = {}", self.write_csv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Run,
    Medium,
    Pade,
    Output,
}

impl Section {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "run" => Some(Section::Run),
            "medium" => Some(Section::Medium),
            "pade" => Some(Section::Pade),
            "output" => Some(Section::Output),
            _ => None,
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Run => "run",
            Section::Medium => "medium",
            Section::Pade => "pade",
            Section::Output => "output",
        })
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// A real number with an optional `pi` suffix: `120pi`, `0.5 pi`, `2*pi`, `pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim_end();
            let head = head.strip_suffix('*').unwrap_or(head).trim_end();
            let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().ok()? };
            factor * PI
        }
        None => s.parse::<f64>().ok()?,
    };
    value.is_finite().then_some(value)
}
