use std::io::Write;

use anyhow::Result;
use netentropy::{ChannelParams, Domain, EdgeModel};

use crate::format::sig12;

pub const HEADER: &str = "quantity,t,value";

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub rows: Vec<(String, Option<usize>, f64)>,
}

pub fn run_oracle(
    domain: Domain,
    params: ChannelParams,
    n: usize,
    steps: usize,
) -> Result<OracleReport> {
    let model = EdgeModel::with_defaults(domain, params)?;
    let blocks = model.block_entropy_oracle(steps)?;
    let bounds = model.bounds(n)?;
    let mut rows = Vec::new();
    for t in 1..=steps {
        rows.push(("block_entropy".to_string(), Some(t), blocks.block_at(t)));
    }
    for t in 1..=steps {
        rows.push((
            "conditional_entropy".to_string(),
            Some(t),
            blocks.conditional_at(t),
        ));
    }
    for (name, v) in [
        ("edge_probability", model.averaged_edge_probability()),
        (
            "joint_conditional_entropy",
            model.conditional_entropy_joint(),
        ),
        ("per_edge_lower", bounds.per_edge_lower),
        ("per_edge_upper", bounds.per_edge_upper),
        ("network_lower", bounds.network_lower),
        ("network_upper", bounds.network_upper),
    ] {
        rows.push((name.to_string(), None, v));
    }
    Ok(OracleReport { rows })
}

impl OracleReport {
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER.split(','))?;
        for (name, t, v) in &self.rows {
            let t = t.map(|t| t.to_string()).unwrap_or_default();
            w.write_record([name.as_str(), &t, &sig12(*v)])?;
        }
        w.flush()
    }
}
