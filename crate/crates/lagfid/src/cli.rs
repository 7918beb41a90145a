//! Command-line parsing and the top-level driver.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;

use crate::config::{parse_angle, AlphaSpec, Command, ExperimentConfig, Profile};
use crate::error::{Error, Result};
use crate::experiments::{run, Outcome};

/// Reproduce figure data for mixed states of curves on the quantized sphere.
#[derive(Debug, Parser)]
#[command(name = "lagfid", version)]
pub struct Args {
    /// Experiment to run.
    #[arg(long, value_enum)]
    pub command: Command,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub k_step: Option<usize>,
    /// Single rotation angle, e.g. `0.7` or `pi/3`.
    #[arg(long, conflicts_with = "alpha_grid", value_parser = parse_angle_arg)]
    pub alpha: Option<f64>,
    /// Angle grid `a:b:n`, n points from a to b inclusive, e.g. `0.2:pi/2:40`.
    #[arg(long)]
    pub alpha_grid: Option<String>,
    /// Gaussian width parameter; repeat for several values.
    #[arg(long = "c")]
    pub c: Vec<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Output CSV path; defaults to `<command>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Radial quadrature nodes for Toeplitz operators.
    #[arg(long)]
    pub quad_radial: Option<usize>,
    /// Azimuthal quadrature nodes for Toeplitz operators.
    #[arg(long)]
    pub quad_azimuth: Option<usize>,
    #[arg(long, value_enum, default_value_t = Profile::Fast)]
    pub profile: Profile,
}

fn parse_angle_arg(text: &str) -> std::result::Result<f64, String> {
    parse_angle(text).map_err(|e| e.to_string())
}

impl Args {
    /// Fills unset parameters from the command defaults of the chosen profile.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::with_defaults(self.command, self.profile);
        if let Some(k) = self.k_min {
            cfg.k_min = k;
        }
        if let Some(k) = self.k_max {
            cfg.k_max = k;
        }
        if self.k_min.is_some() && self.k_max.is_none() && cfg.k_max < cfg.k_min {
            cfg.k_max = cfg.k_min;
        }
        if self.k_max.is_some() && self.k_min.is_none() && cfg.k_min > cfg.k_max {
            cfg.k_min = cfg.k_max;
        }
        if let Some(s) = self.k_step {
            cfg.k_step = s;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = AlphaSpec::Single(a);
        }
        if let Some(g) = &self.alpha_grid {
            cfg.alpha = AlphaSpec::parse_grid(g)?;
        }
        if !self.c.is_empty() {
            cfg.c = self.c;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        cfg.output_path = self.out;
        cfg.quad_radial = self.quad_radial;
        cfg.quad_azimuth = self.quad_azimuth;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit status of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    AcceptanceFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::AcceptanceFailed => 2,
        }
    }
}

pub fn output_path(config: &ExperimentConfig) -> PathBuf {
    config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.command)))
}

/// Header comments: tool version, then the configuration echo.
pub fn header_comments(config: &ExperimentConfig) -> Vec<String> {
    let mut lines = vec![format!("lagfid {}", crate::VERSION)];
    lines.extend(config.echo());
    lines
}

pub fn write_outcome(config: &ExperimentConfig, outcome: &Outcome) -> Result<PathBuf> {
    let path = output_path(config);
    let wrap = |source| Error::Output {
        path: path.clone(),
        source,
    };
    let file = File::create(&path).map_err(wrap)?;
    let mut writer = BufWriter::new(file);
    outcome
        .table
        .write_csv(&mut writer, &header_comments(config))?;
    writer.flush().map_err(wrap)?;
    Ok(path)
}

/// Plain-text report of one run.
pub fn summary(config: &ExperimentConfig, outcome: &Outcome, path: &std::path::Path) -> String {
    let mut s = format!(
        "lagfid {} {}: {} rows written to {}\n",
        crate::VERSION,
        config.command,
        outcome.table.rows.len(),
        path.display()
    );
    for note in &outcome.notes {
        s.push_str(&format!("note: {note}\n"));
    }
    for check in &outcome.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{verdict} {}: {}\n", check.name, check.detail));
        if let (false, Some(why)) = (check.passed, &check.known_deviation) {
            s.push_str(&format!("     known deviation: {why}\n"));
        }
    }
    if outcome.checks.is_empty() {
        s.push_str("no acceptance-tagged checks apply to this grid\n");
    }
    s
}

/// Runs a parsed configuration, writes the CSV and prints the summary.
pub fn execute(config: &ExperimentConfig, out: &mut impl Write) -> Result<Status> {
    let outcome = run(config)?;
    let path = write_outcome(config, &outcome)?;
    out.write_all(summary(config, &outcome, &path).as_bytes())?;
    Ok(if outcome.all_passed() {
        Status::Ok
    } else {
        Status::AcceptanceFailed
    })
}
