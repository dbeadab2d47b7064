use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use netentropy::simulator::{export_snapshots, mean_edge_count, Initialization};
use netentropy::{
    empirical_block_entropy, empirical_transition_frequencies, simulate, EdgeModel, LinkState,
    SimConfig,
};

use crate::format::sig12;

pub const SUMMARY_HEADER: &str = "quantity,t,value,reference,delta,std_err,note";
pub const SNAPSHOT_FILE: &str = "snapshots.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitArg(pub Initialization);

impl FromStr for InitArg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stationary" => Ok(Self(Initialization::Stationary)),
            "all-off" | "alloff" | "off" => Ok(Self(Initialization::AllOff)),
            other => bail!("unknown initialization {other:?} (expected stationary or all-off)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub quantity: String,
    pub t: Option<usize>,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub std_err: Option<f64>,
    pub note: String,
}

impl SummaryRow {
    fn new(
        quantity: &str,
        t: Option<usize>,
        value: Option<f64>,
        reference: Option<f64>,
        std_err: Option<f64>,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            t,
            value,
            reference,
            std_err,
            note: String::new(),
        }
    }

    pub fn delta(&self) -> Option<f64> {
        Some(self.value? - self.reference?)
    }

    pub fn fields(&self) -> [String; 7] {
        let num = |x: Option<f64>| x.map(sig12).unwrap_or_default();
        [
            self.quantity.clone(),
            self.t.map(|t| t.to_string()).unwrap_or_default(),
            num(self.value),
            num(self.reference),
            num(self.delta()),
            num(self.std_err),
            self.note.clone(),
        ]
    }
}

/// Edge density, transition frequencies and block entropies against the
/// distance-averaged oracle.
pub fn summarize(
    config: &SimConfig,
    ensemble: &netentropy::TrajectoryEnsemble,
    block_steps: usize,
) -> Result<Vec<SummaryRow>> {
    let model = EdgeModel::with_defaults(config.domain, config.params)?;
    let edges = config.edge_count() as f64;
    let mut rows = Vec::new();

    let (count, count_se) = mean_edge_count(ensemble);
    let se = (config.trials > 1).then_some(count_se / edges);
    rows.push(SummaryRow::new(
        "edge_density",
        None,
        Some(count / edges),
        Some(model.averaged_edge_probability()),
        se,
    ));

    let weighted = model.state_weighted_transition_matrix();
    let freq = if config.t_steps >= 2 {
        Some(empirical_transition_frequencies(ensemble)?)
    } else {
        None
    };
    for a in LinkState::BOTH {
        for b in LinkState::BOTH {
            let name = format!("p_{}{}", a.index(), b.index());
            let value = freq
                .as_ref()
                .and_then(|f| f.row(a))
                .map(|row| row[b.index()]);
            let se = freq.as_ref().and_then(|f| f.flip_std_err[a.index()]);
            let mut row =
                SummaryRow::new(&name, None, value, Some(weighted[a.index()][b.index()]), se);
            if freq.is_none() {
                row.note = "needs at least 2 steps".into();
            } else if value.is_none() {
                row.note = "state never visited".into();
            }
            rows.push(row);
        }
    }

    let steps = block_steps.min(config.t_steps);
    if steps > 0 {
        let oracle = model.block_entropy_oracle(steps)?;
        for t in 1..=steps {
            let est = empirical_block_entropy(ensemble, t)?;
            let mut row = SummaryRow::new(
                "block_entropy",
                Some(t),
                Some(est.miller_madow),
                Some(oracle.block_at(t)),
                Some(est.std_err),
            );
            row.note = est.warning.unwrap_or_default();
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER.split(','))?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()
}

/// Paths of the two files written by [`run_simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOutput {
    pub snapshots: PathBuf,
    pub summary: PathBuf,
}

pub fn run_simulate(config: &SimConfig, block_steps: usize, dir: &Path) -> Result<SimulateOutput> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let ensemble = simulate(config)?;
    let snapshots = dir.join(SNAPSHOT_FILE);
    let summary = dir.join(SUMMARY_FILE);

    let file =
        File::create(&snapshots).with_context(|| format!("creating {}", snapshots.display()))?;
    export_snapshots(&ensemble, file)
        .with_context(|| format!("writing {}", snapshots.display()))?;

    let rows = summarize(config, &ensemble, block_steps)?;
    let file = File::create(&summary).with_context(|| format!("creating {}", summary.display()))?;
    write_summary(&rows, file)
        .with_context(|| format!("writing {}", summary.display()))?;
    Ok(SimulateOutput { snapshots, summary })
}
