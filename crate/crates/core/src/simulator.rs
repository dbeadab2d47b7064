//! Monte Carlo generation of temporal network snapshots and the empirical
//! estimators that are checked against the quadrature results.
//!
//! Each trial places `n` stationary nodes, then evolves every edge as an
//! independent two-state chain at its pair distance. A trajectory is stored
//! as its initial state plus the steps at which it flips; holding times are
//! drawn from the exact geometric law, so slow chains cost almost nothing.

use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{self, ChannelParams, LinkState};
use crate::entropy::{pair_count, MAX_BLOCK_LENGTH};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::rng::{substream, TAG_EDGE, TAG_POSITIONS};

/// How edge states are drawn at step 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// On with probability `p(r)`, the stationary law of the chain.
    #[default]
    Stationary,
    /// Every edge off; used to exercise the stationarity check.
    AllOff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub t_steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub domain: Domain,
    pub params: ChannelParams,
    pub init: Initialization,
}

impl SimConfig {
    pub fn new(
        n: usize,
        t_steps: usize,
        trials: usize,
        seed: u64,
        domain: Domain,
        params: ChannelParams,
    ) -> Result<Self> {
        let c = Self {
            n,
            t_steps,
            trials,
            seed,
            domain,
            params,
            init: Initialization::Stationary,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_init(self, init: Initialization) -> Self {
        Self { init, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 nodes, got {}",
                self.n
            )));
        }
        if self.t_steps == 0 || self.t_steps > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "t_steps = {} out of range",
                self.t_steps
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        self.params.validate()
    }

    pub fn edge_count(&self) -> usize {
        pair_count(self.n) as usize
    }
}

/// Node pair of an edge index, in `(0,1), (0,2), .., (1,2), ..` order.
pub fn edge_pair(n: usize, edge: usize) -> (usize, usize) {
    let mut i = 0;
    let mut rem = edge;
    while rem >= n - 1 - i {
        rem -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + rem)
}

/// One realization: fixed node positions and every edge's trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub positions: Vec<Point>,
    pub distances: Vec<f64>,
    t_steps: usize,
    initial: Vec<bool>,
    flip_offsets: Vec<usize>,
    flips: Vec<u32>,
}

impl Trial {
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn t_steps(&self) -> usize {
        self.t_steps
    }

    pub fn edge_count(&self) -> usize {
        self.distances.len()
    }

    pub fn initial_state(&self, edge: usize) -> bool {
        self.initial[edge]
    }

    /// Steps `s ≥ 1` at which the edge differs from step `s - 1`.
    pub fn flips(&self, edge: usize) -> &[u32] {
        &self.flips[self.flip_offsets[edge]..self.flip_offsets[edge + 1]]
    }

    pub fn state(&self, edge: usize, step: usize) -> bool {
        let before = self.flips(edge).partition_point(|&f| f as usize <= step);
        self.initial[edge] ^ (before % 2 == 1)
    }

    pub fn trajectory(&self, edge: usize) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.t_steps);
        let mut state = self.initial[edge];
        let mut next = self.flips(edge).iter().peekable();
        for s in 0..self.t_steps {
            if next.peek().is_some_and(|&&f| f as usize == s) {
                state = !state;
                next.next();
            }
            out.push(state);
        }
        out
    }

    /// Runs of constant state as `(state, start, end)` with `end` exclusive.
    fn runs(&self, edge: usize) -> impl Iterator<Item = (bool, usize, usize)> + '_ {
        let flips = self.flips(edge);
        let t = self.t_steps;
        let s0 = self.initial[edge];
        (0..=flips.len()).map(move |j| {
            let start = if j == 0 { 0 } else { flips[j - 1] as usize };
            let end = if j == flips.len() {
                t
            } else {
                flips[j] as usize
            };
            (s0 ^ (j % 2 == 1), start, end)
        })
    }

    /// Number of edges on at each step.
    pub fn on_counts(&self) -> Vec<u64> {
        let mut diff = vec![0i64; self.t_steps + 1];
        for e in 0..self.edge_count() {
            for (on, start, end) in self.runs(e) {
                if on {
                    diff[start] += 1;
                    diff[end] -= 1;
                }
            }
        }
        let mut acc = 0i64;
        diff[..self.t_steps]
            .iter()
            .map(|d| {
                acc += d;
                acc as u64
            })
            .collect()
    }

    /// Fraction of steps the edge spends on.
    pub fn on_fraction(&self, edge: usize) -> f64 {
        let on: usize = self.runs(edge).filter(|r| r.0).map(|(_, a, b)| b - a).sum();
        on as f64 / self.t_steps as f64
    }

    pub fn snapshot(&self, step: usize) -> NetworkSnapshot {
        let n = self.n();
        let mut adjacency = vec![false; n * n];
        for e in 0..self.edge_count() {
            if self.state(e, step) {
                let (i, j) = edge_pair(n, e);
                adjacency[i * n + j] = true;
                adjacency[j * n + i] = true;
            }
        }
        NetworkSnapshot { step, n, adjacency }
    }
}

/// Network state at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSnapshot {
    pub step: usize,
    pub n: usize,
    pub adjacency: Vec<bool>,
}

impl NetworkSnapshot {
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&a| a).count() / 2
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.edge(i, j) == self.edge(j, i)))
    }

    pub fn has_empty_diagonal(&self) -> bool {
        (0..self.n).all(|i| !self.edge(i, i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub config: SimConfig,
    pub trials: Vec<Trial>,
}

// Evolves one edge: initial state plus flip steps in 1..t.
fn evolve_edge<R: Rng>(
    r: f64,
    params: &ChannelParams,
    t: usize,
    init: Initialization,
    rng: &mut R,
    flips: &mut Vec<u32>,
) -> Result<bool> {
    let p = channel::connection_probability(r, params)?;
    let m = channel::transition_matrix(r, params)?;
    let initial = match init {
        Initialization::Stationary => rng.random::<f64>() < p,
        Initialization::AllOff => false,
    };
    let mut state = LinkState::from_bool(initial);
    let mut step = 0usize;
    loop {
        let q = m.flip(state);
        if q <= 0.0 {
            break;
        }
        // steps spent in `state` before the next flip ~ Geometric(q) on {0, 1, ..}
        let u = 1.0 - rng.random::<f64>();
        let hold = (u.ln() / (-q).ln_1p()).floor();
        let next = step as f64 + hold + 1.0;
        if next >= t as f64 {
            break;
        }
        step = next as usize;
        flips.push(step as u32);
        state = LinkState::from_bool(!state.is_on());
    }
    Ok(initial)
}

fn simulate_trial(config: &SimConfig, trial: usize, pinned: Option<f64>) -> Result<Trial> {
    let n = config.n;
    let positions: Vec<Point> = match pinned {
        Some(r) => vec![Point::new(0.0, 0.0), Point::new(r, 0.0)],
        None => {
            let mut rng = substream(config.seed, TAG_POSITIONS, trial as u64, 0);
            (0..n)
                .map(|_| config.domain.sample_point(&mut rng))
                .collect()
        }
    };
    let edges = config.edge_count();
    let mut distances = Vec::with_capacity(edges);
    for i in 0..n {
        for j in i + 1..n {
            distances.push(positions[i].distance(&positions[j]));
        }
    }
    let mut initial = Vec::with_capacity(edges);
    let mut flip_offsets = Vec::with_capacity(edges + 1);
    let mut flips = Vec::new();
    flip_offsets.push(0);
    for (e, &r) in distances.iter().enumerate() {
        let mut rng = substream(config.seed, TAG_EDGE, trial as u64, e as u64);
        initial.push(evolve_edge(
            r,
            &config.params,
            config.t_steps,
            config.init,
            &mut rng,
            &mut flips,
        )?);
        flip_offsets.push(flips.len());
    }
    Ok(Trial {
        positions,
        distances,
        t_steps: config.t_steps,
        initial,
        flip_offsets,
        flips,
    })
}

/// Runs every trial of `config`; output depends only on the config.
pub fn simulate(config: &SimConfig) -> Result<TrajectoryEnsemble> {
    config.validate()?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|k| simulate_trial(config, k, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble {
        config: *config,
        trials,
    })
}

/// Two-node trials with the pair distance fixed at `distance`.
pub fn simulate_pinned(config: &SimConfig, distance: f64) -> Result<TrajectoryEnsemble> {
    config.validate()?;
    if config.n != 2 {
        return Err(Error::InvalidParameter(
            "pinned simulation needs n = 2".into(),
        ));
    }
    if distance.is_nan() || distance < 0.0 {
        return Err(Error::NegativeDistance(distance));
    }
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|k| simulate_trial(config, k, Some(distance)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble {
        config: *config,
        trials,
    })
}

/// Pooled `a → b` counts and frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionFrequencies {
    /// `counts[a][b]` over consecutive step pairs.
    pub counts: [[u64; 2]; 2],
    /// Row `a` is `None` when state `a` was never visited.
    pub rows: [Option<[f64; 2]>; 2],
    /// Standard error of the flip frequency out of each state, clustered by trial.
    pub flip_std_err: [Option<f64>; 2],
}

impl TransitionFrequencies {
    pub fn row(&self, a: LinkState) -> Option<[f64; 2]> {
        self.rows[a.index()]
    }
}

// ratio estimator sum(num)/sum(den) with trial-clustered standard error
fn clustered_ratio(parts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let num: f64 = parts.iter().map(|p| p.0).sum();
    let den: f64 = parts.iter().map(|p| p.1).sum();
    if den == 0.0 {
        return None;
    }
    let q = num / den;
    let k = parts.len() as f64;
    let se = if parts.len() > 1 {
        let ss: f64 = parts.iter().map(|(n, d)| (n - q * d).powi(2)).sum();
        (k / (k - 1.0) * ss).sqrt() / den
    } else {
        (q * (1.0 - q) / den).sqrt()
    };
    Some((q, se))
}

pub fn empirical_transition_frequencies(
    ensemble: &TrajectoryEnsemble,
) -> Result<TransitionFrequencies> {
    let t = ensemble.config.t_steps;
    if t < 2 {
        return Err(Error::TooFewSteps {
            required: 2,
            actual: t,
        });
    }
    // per trial: [visits_off, flips_off, visits_on, flips_on] over pairs (s, s+1)
    let per_trial: Vec<[u64; 4]> = ensemble
        .trials
        .par_iter()
        .map(|trial| {
            let mut acc = [0u64; 4];
            for e in 0..trial.edge_count() {
                for (on, start, end) in trial.runs(e) {
                    let base = if on { 2 } else { 0 };
                    acc[base] += (end.min(t - 1)).saturating_sub(start) as u64;
                    if end < t {
                        acc[base + 1] += 1;
                    }
                }
            }
            acc
        })
        .collect();

    let mut counts = [[0u64; 2]; 2];
    let mut rows = [None; 2];
    let mut flip_std_err = [None; 2];
    for a in 0..2 {
        let visits: u64 = per_trial.iter().map(|v| v[2 * a]).sum();
        let flips: u64 = per_trial.iter().map(|v| v[2 * a + 1]).sum();
        counts[a][1 - a] = flips;
        counts[a][a] = visits - flips;
        let parts: Vec<(f64, f64)> = per_trial
            .iter()
            .map(|v| (v[2 * a + 1] as f64, v[2 * a] as f64))
            .collect();
        if let Some((q, se)) = clustered_ratio(&parts) {
            let mut row = [0.0; 2];
            row[1 - a] = q;
            row[a] = 1.0 - q;
            rows[a] = Some(row);
            flip_std_err[a] = Some(se);
        }
    }
    Ok(TransitionFrequencies {
        counts,
        rows,
        flip_std_err,
    })
}

/// Flip frequencies computed per edge and then averaged with equal weight,
/// so each pair distance counts once regardless of how long it sat in a state.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAveragedFrequencies {
    pub rows: [Option<[f64; 2]>; 2],
    /// Trial-clustered standard error of each averaged flip frequency.
    pub flip_std_err: [Option<f64>; 2],
    /// Edges that visited state `a` at least once before the last step.
    pub used: [usize; 2],
    /// Edges that never did, and so carry no estimate for that row.
    pub skipped: [usize; 2],
}

impl EdgeAveragedFrequencies {
    pub fn row(&self, a: LinkState) -> Option<[f64; 2]> {
        self.rows[a.index()]
    }
}

pub fn edge_averaged_transition_frequencies(
    ensemble: &TrajectoryEnsemble,
) -> Result<EdgeAveragedFrequencies> {
    let t = ensemble.config.t_steps;
    if t < 2 {
        return Err(Error::TooFewSteps {
            required: 2,
            actual: t,
        });
    }
    // per trial and state: (sum of per-edge frequencies, edges used, edges skipped)
    let per_trial: Vec<[(f64, u64, u64); 2]> = ensemble
        .trials
        .par_iter()
        .map(|trial| {
            let mut acc = [(0.0, 0, 0); 2];
            for e in 0..trial.edge_count() {
                let mut visits = [0u64; 2];
                let mut flips = [0u64; 2];
                for (on, start, end) in trial.runs(e) {
                    let a = on as usize;
                    visits[a] += (end.min(t - 1)).saturating_sub(start) as u64;
                    if end < t {
                        flips[a] += 1;
                    }
                }
                for a in 0..2 {
                    if visits[a] > 0 {
                        acc[a].0 += flips[a] as f64 / visits[a] as f64;
                        acc[a].1 += 1;
                    } else {
                        acc[a].2 += 1;
                    }
                }
            }
            acc
        })
        .collect();

    let mut rows = [None; 2];
    let mut flip_std_err = [None; 2];
    let mut used = [0; 2];
    let mut skipped = [0; 2];
    for a in 0..2 {
        used[a] = per_trial.iter().map(|v| v[a].1 as usize).sum();
        skipped[a] = per_trial.iter().map(|v| v[a].2 as usize).sum();
        let parts: Vec<(f64, f64)> = per_trial.iter().map(|v| (v[a].0, v[a].1 as f64)).collect();
        if let Some((q, se)) = clustered_ratio(&parts) {
            let mut row = [0.0; 2];
            row[1 - a] = q;
            row[a] = 1.0 - q;
            rows[a] = Some(row);
            flip_std_err[a] = Some(se);
        }
    }
    Ok(EdgeAveragedFrequencies {
        rows,
        flip_std_err,
        used,
        skipped,
    })
}

/// Plug-in estimate of `H(X¹..Xᵗ)` for one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntropyEstimate {
    pub t: usize,
    pub samples: usize,
    /// Patterns observed at least once.
    pub occupied: usize,
    pub plug_in: f64,
    /// Plug-in plus the Miller–Madow term.
    pub miller_madow: f64,
    /// `(occupied - 1) / (2 N ln 2)`, the leading downward bias of the plug-in.
    pub bias: f64,
    /// Delta-method standard error of the plug-in.
    pub std_err: f64,
    pub warning: Option<String>,
}

/// Plug-in block entropy over the first `t` steps of edge `(0, 1)` in every
/// trial, so the blocks are i.i.d. draws from the distance mixture.
pub fn empirical_block_entropy(
    ensemble: &TrajectoryEnsemble,
    t: usize,
) -> Result<BlockEntropyEstimate> {
    if !(1..=MAX_BLOCK_LENGTH).contains(&t) {
        return Err(Error::BlockLength(t));
    }
    if ensemble.config.t_steps < t {
        return Err(Error::TooFewSteps {
            required: t,
            actual: ensemble.config.t_steps,
        });
    }
    let mut counts = vec![0u64; 1 << t];
    for trial in &ensemble.trials {
        let mut pattern = trial.initial_state(0) as usize;
        let mut state = trial.initial_state(0);
        let mut flips = trial.flips(0).iter().peekable();
        for s in 1..t {
            if flips.peek().is_some_and(|&&f| f as usize == s) {
                state = !state;
                flips.next();
            }
            pattern = (pattern << 1) | state as usize;
        }
        counts[pattern] += 1;
    }
    Ok(plug_in_entropy(t, &counts))
}

fn plug_in_entropy(t: usize, counts: &[u64]) -> BlockEntropyEstimate {
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let mut h = 0.0;
    let mut h2 = 0.0;
    let mut occupied = 0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        occupied += 1;
        let p = c as f64 / nf;
        let l = p.log2();
        h -= p * l;
        h2 += p * l * l;
    }
    let bias = (occupied as f64 - 1.0) / (2.0 * nf * std::f64::consts::LN_2);
    let std_err = ((h2 - h * h).max(0.0) / nf).sqrt();
    let warning = if n < 10 * counts.len() as u64 {
        Some(format!(
            "{n} blocks for {} patterns; estimate is biased by about {bias:.3e} bits",
            counts.len()
        ))
    } else {
        None
    };
    BlockEntropyEstimate {
        t,
        samples: n as usize,
        occupied,
        plug_in: h,
        miller_madow: h + bias,
        bias,
        std_err,
        warning,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// Pooled edge density at each step.
    pub densities: Vec<f64>,
    /// `(density[s] - density[0]) / σ`, paired by trial.
    pub z_scores: Vec<f64>,
    pub max_abs_z: f64,
    pub threshold: f64,
    pub stationary: bool,
}

/// Flags drift when any step's pooled density departs from step 0's by more
/// than 4σ.
pub fn stationarity_check(ensemble: &TrajectoryEnsemble) -> Result<StationarityReport> {
    let t = ensemble.config.t_steps;
    if t < 2 {
        return Err(Error::TooFewSteps {
            required: 2,
            actual: t,
        });
    }
    let edges = ensemble.config.edge_count() as f64;
    let series: Vec<Vec<f64>> = ensemble
        .trials
        .par_iter()
        .map(|tr| {
            tr.on_counts()
                .into_iter()
                .map(|c| c as f64 / edges)
                .collect()
        })
        .collect();
    let k = series.len() as f64;
    let densities: Vec<f64> = (0..t)
        .map(|s| series.iter().map(|v| v[s]).sum::<f64>() / k)
        .collect();
    let threshold = 4.0;
    let mut z_scores = Vec::with_capacity(t);
    for s in 0..t {
        let mean = densities[s] - densities[0];
        let sigma = if series.len() > 1 {
            let var = series
                .iter()
                .map(|v| (v[s] - v[0] - mean).powi(2))
                .sum::<f64>()
                / (k - 1.0);
            (var / k).sqrt()
        } else {
            let d = densities[0];
            (2.0 * d * (1.0 - d) / edges).sqrt()
        };
        let z = if mean == 0.0 {
            0.0
        } else if sigma > 0.0 {
            mean / sigma
        } else {
            f64::INFINITY.copysign(mean)
        };
        z_scores.push(z);
    }
    let max_abs_z = z_scores.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    Ok(StationarityReport {
        densities,
        z_scores,
        max_abs_z,
        threshold,
        stationary: max_abs_z <= threshold,
    })
}

/// Mean number of on edges per snapshot and its trial-clustered standard error.
pub fn mean_edge_count(ensemble: &TrajectoryEnsemble) -> (f64, f64) {
    let per_trial: Vec<f64> = ensemble
        .trials
        .par_iter()
        .map(|tr| {
            let c = tr.on_counts();
            c.iter().sum::<u64>() as f64 / c.len() as f64
        })
        .collect();
    let k = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / k;
    let se = if per_trial.len() > 1 {
        (per_trial.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        0.0
    };
    (mean, se)
}

/// Writes `trial,step,edge_i,edge_j,state` rows for every edge of every snapshot.
pub fn export_snapshots<W: Write>(ensemble: &TrajectoryEnsemble, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "trial,step,edge_i,edge_j,state")?;
    let n = ensemble.config.n;
    for (k, trial) in ensemble.trials.iter().enumerate() {
        let trajectories: Vec<Vec<bool>> = (0..trial.edge_count())
            .map(|e| trial.trajectory(e))
            .collect();
        for step in 0..trial.t_steps() {
            for (e, traj) in trajectories.iter().enumerate() {
                let (i, j) = edge_pair(n, e);
                writeln!(out, "{k},{step},{i},{j},{}", traj[step] as u8)?;
            }
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DEFAULT_SYMBOL_RATE;

    fn params() -> ChannelParams {
        ChannelParams::new(0.7, 2.0, 500.0, DEFAULT_SYMBOL_RATE).unwrap()
    }

    #[test]
    fn edge_pairs_enumerate_in_order() {
        let n = 5;
        let mut expected = vec![];
        for i in 0..n {
            for j in i + 1..n {
                expected.push((i, j));
            }
        }
        let got: Vec<_> = (0..10).map(|e| edge_pair(n, e)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(1, 10, 1, 0, Domain::square(), params()).is_err());
        assert!(SimConfig::new(2, 0, 1, 0, Domain::square(), params()).is_err());
        assert!(SimConfig::new(2, 10, 0, 0, Domain::square(), params()).is_err());
    }

    #[test]
    fn frozen_edges_never_flip() {
        let c = SimConfig::new(10, 50, 3, 1, Domain::disk(), params().with_nu(0.0)).unwrap();
        let ens = simulate(&c).unwrap();
        for tr in &ens.trials {
            for e in 0..tr.edge_count() {
                assert!(tr.flips(e).is_empty());
            }
        }
        let freq = empirical_transition_frequencies(&ens).unwrap();
        for a in LinkState::BOTH {
            if let Some(row) = freq.row(a) {
                assert_eq!(row[a.index()], 1.0);
            }
        }
        assert!(stationarity_check(&ens).unwrap().stationary);
        let h1 = empirical_block_entropy(&ens, 1).unwrap().plug_in;
        for t in 2..=5 {
            assert_eq!(empirical_block_entropy(&ens, t).unwrap().plug_in, h1);
        }
    }

    #[test]
    fn trajectory_views_agree() {
        let p = ChannelParams::new(0.7, 2.0, 500.0, 2e4).unwrap();
        let c = SimConfig::new(6, 200, 2, 9, Domain::triangle(), p).unwrap();
        let ens = simulate(&c).unwrap();
        let tr = &ens.trials[1];
        for e in 0..tr.edge_count() {
            let traj = tr.trajectory(e);
            for (s, &v) in traj.iter().enumerate() {
                assert_eq!(tr.state(e, s), v);
            }
        }
        let counts = tr.on_counts();
        for s in [0, 17, 199] {
            let snap = tr.snapshot(s);
            assert!(snap.is_symmetric() && snap.has_empty_diagonal());
            assert_eq!(snap.edge_count() as u64, counts[s]);
        }
    }

    #[test]
    fn positions_are_constant_and_inside() {
        let c = SimConfig::new(20, 5, 4, 3, Domain::triangle(), params()).unwrap();
        let ens = simulate(&c).unwrap();
        for tr in &ens.trials {
            assert!(tr.positions.iter().all(|p| Domain::triangle().contains(p)));
            assert_eq!(tr.distances.len(), 190);
        }
    }

    #[test]
    fn transition_counts_need_two_steps() {
        let c = SimConfig::new(3, 1, 2, 0, Domain::square(), params()).unwrap();
        let ens = simulate(&c).unwrap();
        assert!(matches!(
            empirical_transition_frequencies(&ens),
            Err(Error::TooFewSteps { .. })
        ));
        assert!(stationarity_check(&ens).is_err());
        assert!(empirical_block_entropy(&ens, 2).is_err());
    }

    #[test]
    fn unvisited_state_gives_undefined_row() {
        // r0 huge: every edge is on at step 0 and p10 is tiny
        let p = ChannelParams::new(1e6, 2.0, 0.0, DEFAULT_SYMBOL_RATE).unwrap();
        let c = SimConfig::new(4, 10, 2, 0, Domain::square(), p).unwrap();
        let ens = simulate(&c).unwrap();
        let f = empirical_transition_frequencies(&ens).unwrap();
        assert!(f.row(LinkState::Off).is_none());
        assert_eq!(f.row(LinkState::On), Some([0.0, 1.0]));
    }

    #[test]
    fn small_sample_warning() {
        let c = SimConfig::new(2, 8, 20, 0, Domain::square(), params()).unwrap();
        let ens = simulate(&c).unwrap();
        let est = empirical_block_entropy(&ens, 8).unwrap();
        assert!(est.warning.is_some());
        assert_eq!(est.samples, 20);
    }

    #[test]
    fn export_format() {
        let c = SimConfig::new(3, 2, 1, 4, Domain::square(), params()).unwrap();
        let ens = simulate(&c).unwrap();
        let mut buf = Vec::new();
        export_snapshots(&ens, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,step,edge_i,edge_j,state");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,0,0,1,"));
        assert!(lines[6].starts_with("0,1,1,2,"));
    }
}
