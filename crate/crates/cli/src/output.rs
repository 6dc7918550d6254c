//! Result emission. CSV tables are figure-ready; metrics.json carries the
//! headline numbers and a config echo sufficient to re-run the experiment
//! exactly. All files are deterministic functions of the configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use boxwalk_core::analysis::Distribution;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub engine: &'static str,
    pub seed: u64,
    /// TV distance of the emitted profile to the exact walk.
    pub tv_to_oracle: Option<f64>,
    /// TV distance of the endpoint histogram to the exact walk.
    pub endpoint_tv_to_oracle: Option<f64>,
    /// First and second central moments of the emitted profile.
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub tv: f64,
}

/// Effective configuration after defaults; engine-specific fields are null
/// for engines that do not use them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub engine: &'static str,
    pub xi: f64,
    pub theta: f64,
    pub zeta: f64,
    pub r0: f64,
    pub phi0: f64,
    pub r1: f64,
    pub phi1: f64,
    pub n: u64,
    pub steps: u32,
    pub trials: u64,
    pub seed: u64,
    pub n_sweep: Option<Vec<u64>>,
    pub hop_rate: Option<f64>,
    pub bias: Option<f64>,
    pub out_dir: String,
}

pub fn write_metrics(path: &Path, metrics: &Metrics) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(metrics).expect("metrics serialize");
    text.push('\n');
    std::fs::write(path, text)
}

pub fn write_oracle_distribution(path: &Path, dist: &Distribution) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,probability")?;
    for (x, p) in dist.iter() {
        writeln!(w, "{x},{p:?}")?;
    }
    w.flush()
}

/// Site profile of a classical engine next to its endpoint histogram. The
/// profile's support covers every endpoint (the marked walker always sits
/// in an occupied site), so one pass over the profile is exhaustive.
pub fn write_classical_distribution(
    path: &Path,
    mean_occupation: &Distribution,
    endpoint: &Distribution,
) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,fraction,endpoint_frequency")?;
    for (x, fraction) in mean_occupation.iter() {
        writeln!(w, "{x},{fraction:?},{:?}", endpoint.mass_at(x))?;
    }
    w.flush()
}

pub fn write_trajectory(path: &Path, trajectory: &[i64]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,x")?;
    for (t, x) in trajectory.iter().enumerate() {
        writeln!(w, "{t},{x}")?;
    }
    w.flush()
}
