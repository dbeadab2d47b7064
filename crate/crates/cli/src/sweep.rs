use std::fmt;
use std::io::Write;
use std::str::FromStr;

use anyhow::{bail, Result};
use netentropy::{slow_fading_report, ChannelParams, Domain, EdgeModel, EntropyRateBounds};
use rayon::prelude::*;

use crate::format::sig12;

pub const HEADER: &str =
    "domain,eta,r0,nu,B,n,per_edge_lower,per_edge_upper,network_lower,network_upper,admissible,status";

pub const DEFAULT_POINTS: usize = 40;
pub const NU_RANGE: (f64, f64) = (1.0, 1000.0);
pub const R0_MIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    R0,
    Nu,
}

impl FromStr for SweepVariable {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r0" => Ok(Self::R0),
            "nu" => Ok(Self::Nu),
            other => bail!("unknown sweep variable {other:?} (expected r0 or nu)"),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::R0 => "r0",
            Self::Nu => "nu",
        })
    }
}

/// Where the grid comes from; resolved per domain because the default r0
/// range ends at the domain diameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Explicit(Vec<f64>),
    LogSpaced {
        points: usize,
        min: Option<f64>,
        max: Option<f64>,
    },
}

impl Grid {
    pub fn values(&self, variable: SweepVariable, domain: Domain) -> Result<Vec<f64>> {
        let values = match self {
            Grid::Explicit(v) => v.clone(),
            Grid::LogSpaced { points, min, max } => {
                let (lo, hi) = match variable {
                    SweepVariable::R0 => (min.unwrap_or(R0_MIN), max.unwrap_or(domain.diameter())),
                    SweepVariable::Nu => (min.unwrap_or(NU_RANGE.0), max.unwrap_or(NU_RANGE.1)),
                };
                log_space(lo, hi, *points)?
            }
        };
        if values.is_empty() {
            bail!("empty grid");
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            bail!("grid values must be positive and finite");
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            bail!("grid must be strictly increasing");
        }
        Ok(values)
    }
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
        bail!("bad grid range [{lo}, {hi}]");
    }
    match points {
        0 => bail!("need at least one grid point"),
        1 => Ok(vec![lo]),
        _ if lo == hi => bail!("degenerate grid range with {points} points"),
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut v: Vec<f64> = (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect();
            v[0] = lo;
            v[points - 1] = hi;
            Ok(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Grid,
    /// Values of the parameters that are not swept.
    pub base: ChannelParams,
    pub domains: Vec<Domain>,
    pub etas: Vec<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub domain: Domain,
    pub params: ChannelParams,
    pub n: usize,
    pub outcome: std::result::Result<(EntropyRateBounds, bool), String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn fields(&self) -> Vec<String> {
        let p = &self.params;
        let mut f = vec![
            self.domain.to_string(),
            sig12(p.eta),
            sig12(p.r0),
            sig12(p.nu),
            sig12(p.symbol_rate),
            self.n.to_string(),
        ];
        match &self.outcome {
            Ok((b, admissible)) => {
                f.extend(
                    [
                        b.per_edge_lower,
                        b.per_edge_upper,
                        b.network_lower,
                        b.network_upper,
                    ]
                    .map(sig12),
                );
                f.extend([admissible.to_string(), "ok".into()]);
            }
            Err(msg) => {
                f.extend(std::iter::repeat_n(String::new(), 5));
                f.push(format!("error: {msg}"));
            }
        }
        f
    }
}

pub fn evaluate(domain: Domain, params: ChannelParams, n: usize) -> SweepRow {
    let outcome = (|| {
        let bounds = EdgeModel::with_defaults(domain, params)?.bounds(n)?;
        let report = slow_fading_report(&params, &domain)?;
        Ok::<_, netentropy::Error>((bounds, report.admissible))
    })()
    .map_err(|e| e.to_string());
    SweepRow {
        domain,
        params,
        n,
        outcome,
    }
}

/// All rows in (domain, eta, grid value) order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.n < 2 {
        bail!("need at least 2 nodes, got {}", spec.n);
    }
    let mut points = Vec::new();
    for &domain in &spec.domains {
        let grid = spec.grid.values(spec.variable, domain)?;
        for &eta in &spec.etas {
            for &v in &grid {
                let params = match spec.variable {
                    SweepVariable::R0 => spec.base.with_eta(eta).with_r0(v),
                    SweepVariable::Nu => spec.base.with_eta(eta).with_nu(v),
                };
                points.push((domain, params));
            }
        }
    }
    Ok(points
        .into_par_iter()
        .map(|(d, p)| evaluate(d, p, spec.n))
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER.split(','))?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()
}
