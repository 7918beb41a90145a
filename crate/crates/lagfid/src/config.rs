//! Experiment configuration: commands, grids and their validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use lagfid_core::toeplitz::MIN_ALPHA;

use crate::error::{Error, Result};

/// Largest admissible `k`; dense eigendecompositions beyond this are impractical.
pub const MAX_K: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Command {
    TraceOrtho,
    SubfidOrtho,
    TraceAngle,
    SubfidAngle,
    SubfidAlphaSweep,
    FidBtoCompare,
    FidAlphaSweep,
    FidVsSubfid,
    PurityCheck,
    EgorovCheck,
    BoundChain,
    TraceNormCheck,
    /// Runs every acceptance criterion and tabulates the outcome.
    Acceptance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TraceOrtho => "trace-ortho",
            Command::SubfidOrtho => "subfid-ortho",
            Command::TraceAngle => "trace-angle",
            Command::SubfidAngle => "subfid-angle",
            Command::SubfidAlphaSweep => "subfid-alpha-sweep",
            Command::FidBtoCompare => "fid-bto-compare",
            Command::FidAlphaSweep => "fid-alpha-sweep",
            Command::FidVsSubfid => "fid-vs-subfid",
            Command::PurityCheck => "purity-check",
            Command::EgorovCheck => "egorov-check",
            Command::BoundChain => "bound-chain",
            Command::TraceNormCheck => "trace-norm-check",
            Command::Acceptance => "acceptance",
        }
    }

    /// Grid used when the corresponding flags are absent.
    pub fn defaults(self, profile: Profile) -> Defaults {
        let full = profile == Profile::Full;
        let sweep = |n_full, n_fast| AlphaSpec::Grid {
            start: 0.2,
            end: PI / 2.0,
            count: if full { n_full } else { n_fast },
        };
        let (k, alpha, c, delta) = match self {
            Command::TraceOrtho => ((1, 50, 1), AlphaSpec::Single(PI / 2.0), vec![], 0.0),
            Command::SubfidOrtho => ((1, 50, 1), AlphaSpec::Single(PI / 2.0), vec![], 0.0),
            Command::TraceAngle => ((1, 100, 1), AlphaSpec::Single(PI / 4.0), vec![], 0.0),
            Command::SubfidAngle => ((1, 50, 1), AlphaSpec::Single(PI / 4.0), vec![], 0.0),
            Command::SubfidAlphaSweep => {
                let k = if full { 500 } else { 200 };
                ((k, k, 1), sweep(40, 20), vec![], 0.0)
            }
            Command::FidBtoCompare => {
                let k_max = if full { 200 } else { 60 };
                (
                    (1, k_max, 1),
                    AlphaSpec::Single(PI / 2.0),
                    vec![2.0, 10.0, 50.0],
                    0.0,
                )
            }
            Command::FidAlphaSweep => {
                let k = if full { 200 } else { 100 };
                ((k, k, 1), sweep(40, 20), vec![], 0.0)
            }
            Command::FidVsSubfid => {
                let k_max = if full { 200 } else { 100 };
                ((1, k_max, 1), AlphaSpec::Single(PI / 2.0), vec![], 0.0)
            }
            Command::PurityCheck => ((1, 100, 1), AlphaSpec::Single(PI / 2.0), vec![], 0.0),
            Command::EgorovCheck => (
                (1, 40, if full { 1 } else { 3 }),
                AlphaSpec::List(vec![PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0]),
                vec![2.0, 10.0],
                0.0,
            ),
            Command::BoundChain => (
                (1, if full { 200 } else { 60 }, 1),
                AlphaSpec::List(vec![PI / 2.0, PI / 4.0]),
                vec![2.0, 10.0, 50.0],
                0.15,
            ),
            Command::TraceNormCheck => (
                (50, 400, 50),
                AlphaSpec::List(vec![PI / 2.0, PI / 4.0]),
                vec![4.0],
                0.25,
            ),
            Command::Acceptance => ((1, 1, 1), AlphaSpec::Single(PI / 2.0), vec![], 0.0),
        };
        Defaults { k, alpha, c, delta }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Profile {
    /// Reduced grids that finish in seconds.
    #[default]
    Fast,
    /// Full-size grids, including k = 500 for the angle sweep.
    Full,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Fast => "fast",
            Profile::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Defaults {
    pub k: (usize, usize, usize),
    pub alpha: AlphaSpec,
    pub c: Vec<f64>,
    pub delta: f64,
}

/// Rotation angles of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    Single(f64),
    List(Vec<f64>),
    /// `count` equally spaced values from `start` to `end`, both included.
    Grid {
        start: f64,
        end: f64,
        count: usize,
    },
}

impl AlphaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AlphaSpec::Single(a) => vec![*a],
            AlphaSpec::List(v) => v.clone(),
            AlphaSpec::Grid { start, end, count } => match count {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| {
                        if i + 1 == *n {
                            *end
                        } else {
                            start + (end - start) * i as f64 / (*n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }

    /// Parses `a:b:n`, where `a` and `b` are angle expressions.
    pub fn parse_grid(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "alpha grid `{text}` is not of the form a:b:n"
            )));
        }
        let start = parse_angle(parts[0])?;
        let end = parse_angle(parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|_| {
            Error::Config(format!("alpha grid count `{}` is not an integer", parts[2]))
        })?;
        if count == 0 {
            return Err(Error::Config("alpha grid needs at least one point".into()));
        }
        if count > 1 && end < start {
            return Err(Error::Config(format!("alpha grid `{text}` is decreasing")));
        }
        Ok(AlphaSpec::Grid { start, end, count })
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Single(a) => write!(f, "{a:.16e}"),
            AlphaSpec::List(v) => {
                let items: Vec<String> = v.iter().map(|a| format!("{a:.16e}")).collect();
                write!(f, "[{}]", items.join(","))
            }
            AlphaSpec::Grid { start, end, count } => write!(f, "{start:.16e}:{end:.16e}:{count}"),
        }
    }
}

/// Parses an angle such as `0.3`, `pi`, `pi/4`, `3pi/8`, `3*pi/8` or `0.25*pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse angle `{text}`"));
    let s: String = text
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if s.is_empty() {
        return Err(bad());
    }
    let (numerator, denominator) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let numerator = match numerator.find("pi") {
        Some(pos) => {
            let (coef, rest) = (&numerator[..pos], &numerator[pos + 2..]);
            if !rest.is_empty() {
                return Err(bad());
            }
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let factor = match coef {
                "" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            factor * PI
        }
        None => numerator.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match denominator {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            numerator / d
        }
        None => numerator,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub k_min: usize,
    pub k_max: usize,
    pub k_step: usize,
    pub alpha: AlphaSpec,
    pub c: Vec<f64>,
    pub delta: f64,
    pub output_path: Option<PathBuf>,
    pub quad_radial: Option<usize>,
    pub quad_azimuth: Option<usize>,
    pub profile: Profile,
}

impl ExperimentConfig {
    /// Configuration with every parameter at the command's default.
    pub fn with_defaults(command: Command, profile: Profile) -> Self {
        let d = command.defaults(profile);
        ExperimentConfig {
            command,
            k_min: d.k.0,
            k_max: d.k.1,
            k_step: d.k.2,
            alpha: d.alpha,
            c: d.c,
            delta: d.delta,
            output_path: None,
            quad_radial: None,
            quad_azimuth: None,
            profile,
        }
    }

    pub fn k_values(&self) -> Vec<usize> {
        (self.k_min..=self.k_max)
            .step_by(self.k_step.max(1))
            .collect()
    }

    pub fn alpha_values(&self) -> Vec<f64> {
        self.alpha.values()
    }

    pub fn validate(&self) -> Result<()> {
        if self.command == Command::Acceptance {
            return Ok(());
        }
        if self.k_step == 0 {
            return Err(Error::Config("k step must be positive".into()));
        }
        if self.k_min == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.k_min > self.k_max {
            return Err(Error::Config(format!(
                "empty k range {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.k_max > MAX_K {
            return Err(Error::Config(format!(
                "k_max = {} exceeds {MAX_K}",
                self.k_max
            )));
        }
        let alphas = self.alpha_values();
        if alphas.is_empty() {
            return Err(Error::Config("no rotation angle given".into()));
        }
        let tol = 1e-12;
        if let Some(a) = alphas
            .iter()
            .find(|&&a| !(a >= MIN_ALPHA - tol && a <= PI / 2.0 + tol))
        {
            return Err(Error::Config(format!(
                "alpha = {a} outside [{MIN_ALPHA}, pi/2]"
            )));
        }
        if let Some(c) = self.c.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Config(format!("c = {c} must be positive")));
        }
        if !(0.0..=0.5).contains(&self.delta) {
            return Err(Error::Config(format!(
                "delta = {} outside [0, 1/2]",
                self.delta
            )));
        }
        let needs_c = matches!(
            self.command,
            Command::FidBtoCompare
                | Command::EgorovCheck
                | Command::BoundChain
                | Command::TraceNormCheck
        );
        if needs_c && self.c.is_empty() {
            return Err(Error::Config(format!(
                "{} needs at least one --c value",
                self.command
            )));
        }
        if self.command == Command::TraceNormCheck && !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Config(
                "trace-norm-check needs delta strictly inside (0, 1/2)".into(),
            ));
        }
        if self.command == Command::BoundChain && self.delta == 0.0 {
            return Err(Error::Config("bound-chain needs delta in (0, 1/2]".into()));
        }
        for nodes in [self.quad_radial, self.quad_azimuth].into_iter().flatten() {
            if nodes == 0 {
                return Err(Error::Config(
                    "quadrature node counts must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// `key=value` lines echoed into output headers.
    pub fn echo(&self) -> Vec<String> {
        let opt = |v: Option<usize>| v.map_or_else(|| "default".to_string(), |n| n.to_string());
        let cs: Vec<String> = self.c.iter().map(|c| format!("{c:.16e}")).collect();
        vec![
            format!("command={}", self.command),
            format!("profile={}", self.profile),
            format!("k_min={}", self.k_min),
            format!("k_max={}", self.k_max),
            format!("k_step={}", self.k_step),
            format!("alpha={}", self.alpha),
            format!("c=[{}]", cs.join(",")),
            format!("delta={:.16e}", self.delta),
            format!("quad_radial={}", opt(self.quad_radial)),
            format!("quad_azimuth={}", opt(self.quad_azimuth)),
        ]
    }
}
