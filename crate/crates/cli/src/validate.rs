//! Built-in invariant checks behind `netentropy validate`.

use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Result};
use netentropy::channel::{transition_matrix, DEFAULT_SYMBOL_RATE};
use netentropy::entropy::pair_count;
use netentropy::quadrature::{integrate, QuadratureSpec};
use netentropy::rng::{substream, TAG_GENERIC};
use netentropy::simulator::{export_snapshots, Initialization};
use netentropy::{
    connection_probability, empirical_block_entropy, empirical_transition_frequencies, simulate,
    snr_connection_indicator, stationarity_check, ChannelParams, Domain, EdgeModel, LinkState,
    SimConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Self::Fast),
            "full" => Ok(Self::Full),
            other => bail!("unknown validation level {other:?} (expected fast or full)"),
        }
    }
}

/// Deliberate breakage, to show that a check can actually fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    DetailedBalance,
}

impl FromStr for Fault {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "detailed-balance" => Ok(Self::DetailedBalance),
            other => bail!("unknown fault {other:?} (expected detailed-balance)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{status} {:<28} {:>7.2}s  {}",
            self.name, self.seconds, self.detail
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub level: Level,
    pub fault: Option<Fault>,
    pub seed: u64,
}

type Check = fn(&Options) -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("detailed_balance", detailed_balance),
    ("density_normalization", density_normalization),
    ("pair_count_scaling", pair_count_scaling),
    ("block_entropy_monotone", block_entropy_monotone),
    ("sandwich", sandwich),
    ("quadrature_stability", quadrature_stability),
    ("distance_sampling_ks", distance_sampling_ks),
    ("snr_indicator", snr_indicator),
    ("simulated_block_entropy", simulated_block_entropy),
    ("simulated_transitions", simulated_transitions),
    ("stationarity", stationarity),
    ("determinism", determinism),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check in order; `on_done` sees each outcome as it finishes.
pub fn run_checks(opts: &Options, mut on_done: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(opts) {
                Ok(v) => v,
                Err(e) => (false, format!("error: {e:#}")),
            };
            let outcome = CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            };
            on_done(&outcome);
            outcome
        })
        .collect()
}

fn paper(eta: f64) -> ChannelParams {
    ChannelParams::new(0.7, eta, 500.0, DEFAULT_SYMBOL_RATE).expect("valid paper parameters")
}

fn full(opts: &Options) -> bool {
    opts.level == Level::Full
}

fn detailed_balance(opts: &Options) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for domain in Domain::all() {
        let d = domain.diameter();
        for eta in [2.0, 3.0, 4.0] {
            for nu in [1.0, 500.0, 1000.0] {
                let params = paper(eta).with_nu(nu);
                for i in 0..=200 {
                    let r = d * 1e-3f64.powf(1.0 - i as f64 / 200.0);
                    let m = transition_matrix(r, &params)?;
                    if m.clamped {
                        continue;
                    }
                    let x = (r / params.r0).powf(params.eta);
                    let on = (-x).exp();
                    let off = -(-x).exp_m1();
                    let p01 = if opts.fault == Some(Fault::DetailedBalance) {
                        m.p01 * (1.0 + 1e-3)
                    } else {
                        m.p01
                    };
                    worst = worst.max((off * p01 - on * m.p10).abs());
                    checked += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("max |pi0 p01 - pi1 p10| = {worst:.2e} over {checked} points"),
    ))
}

fn density_normalization(_: &Options) -> Result<(bool, String)> {
    let spec = QuadratureSpec {
        rel_tol: 1e-12,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for domain in Domain::all() {
        worst = worst.max((domain.density().total_mass(&spec)? - 1.0).abs());
    }
    Ok((worst <= 1e-9, format!("max |mass - 1| = {worst:.2e}")))
}

fn pair_count_scaling(_: &Options) -> Result<(bool, String)> {
    let model = EdgeModel::with_defaults(Domain::square(), paper(2.0))?;
    let base = model.bounds(2)?;
    let mut ok =
        base.network_lower == base.per_edge_lower && base.network_upper == base.per_edge_upper;
    for n in [3, 10, 50, 500] {
        let b = model.bounds(n)?;
        let c = pair_count(n) as f64;
        ok &= b.network_lower == c * b.per_edge_lower && b.network_upper == c * b.per_edge_upper;
    }
    Ok((ok, "network = C(n,2) x per-edge, bitwise".into()))
}

fn block_entropy_monotone(opts: &Options) -> Result<(bool, String)> {
    let steps = if full(opts) { 12 } else { 8 };
    let mut worst = f64::NEG_INFINITY;
    for domain in Domain::all() {
        for eta in [2.0, 3.0, 4.0] {
            let b = EdgeModel::with_defaults(domain, paper(eta))?.block_entropy_oracle(steps)?;
            for t in 2..=steps {
                worst = worst.max(b.conditional_at(t) - b.conditional_at(t - 1));
            }
        }
    }
    Ok((
        worst <= 1e-14,
        format!("t = 1..{steps}, max increase {worst:.2e}"),
    ))
}

fn sandwich(opts: &Options) -> Result<(bool, String)> {
    let (r0s, nus, etas): (&[f64], &[f64], &[f64]) = if full(opts) {
        (
            &[0.3, 0.7, 1.1],
            &[10.0, 100.0, 500.0, 1000.0],
            &[2.0, 3.0, 4.0],
        )
    } else {
        (&[0.7], &[100.0, 1000.0], &[2.0, 4.0])
    };
    let mut worst = f64::NEG_INFINITY;
    let mut points = 0;
    for domain in Domain::all() {
        for &r0 in r0s {
            for &nu in nus {
                for &eta in etas {
                    let m = EdgeModel::with_defaults(domain, paper(eta).with_r0(r0).with_nu(nu))?;
                    let h8 = m.block_entropy_oracle(8)?.conditional_at(8);
                    let lo = m.conditional_entropy_given_distance();
                    let hi = m.conditional_entropy_unconditioned();
                    worst = worst.max(lo - h8).max(h8 - hi);
                    points += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-6,
        format!("{points} points, worst violation {worst:.2e} bits"),
    ))
}

fn quadrature_stability(opts: &Options) -> Result<(bool, String)> {
    let cases: Vec<(Domain, f64)> = if full(opts) {
        Domain::all()
            .into_iter()
            .flat_map(|d| [2.0, 3.0, 4.0].map(|e| (d, e)))
            .collect()
    } else {
        vec![(Domain::square(), 2.0), (Domain::triangle(), 4.0)]
    };
    let mut worst = 0.0f64;
    for (domain, eta) in cases {
        let spec = QuadratureSpec::default();
        let a = EdgeModel::new(domain, paper(eta), spec)?;
        let b = EdgeModel::new(domain, paper(eta), spec.doubled())?;
        worst = worst
            .max(
                (a.conditional_entropy_given_distance() - b.conditional_entropy_given_distance())
                    .abs(),
            )
            .max(
                (a.conditional_entropy_unconditioned() - b.conditional_entropy_unconditioned())
                    .abs(),
            );
    }
    Ok((
        worst < 1e-6,
        format!("max change on doubling nodes {worst:.2e} bits"),
    ))
}

fn tabulated_cdf(domain: Domain, cells: usize) -> Result<Vec<f64>> {
    let spec = QuadratureSpec {
        rel_tol: 1e-10,
        ..Default::default()
    };
    let step = domain.diameter() / cells as f64;
    let breaks = domain.breakpoints();
    let mut values = vec![0.0];
    let mut acc = 0.0;
    for i in 0..cells {
        acc += integrate(
            |r| domain.pdf_unchecked(r),
            i as f64 * step,
            (i + 1) as f64 * step,
            &breaks,
            &spec,
        )?;
        values.push(acc);
    }
    Ok(values)
}

fn distance_sampling_ks(opts: &Options) -> Result<(bool, String)> {
    let samples = if full(opts) { 1_000_000 } else { 100_000 };
    let cells = 10_000;
    let mut worst_ratio = 0.0f64;
    for (k, domain) in Domain::all().into_iter().enumerate() {
        let table = tabulated_cdf(domain, cells)?;
        let step = domain.diameter() / cells as f64;
        let cdf = |r: f64| {
            let x = (r / step).max(0.0);
            let i = (x.floor() as usize).min(cells - 1);
            let frac = (x - i as f64).min(1.0);
            table[i] + frac * (table[i + 1] - table[i])
        };
        let mut rng = substream(opts.seed, TAG_GENERIC, 1, k as u64);
        let mut xs: Vec<f64> = (0..samples)
            .map(|_| domain.sample_distance(&mut rng))
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = samples as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        worst_ratio = worst_ratio.max(ks / (1.628 / n.sqrt()));
    }
    Ok((
        worst_ratio < 1.0,
        format!("{samples} samples per domain, max KS / 1% critical = {worst_ratio:.3}"),
    ))
}

fn snr_indicator(opts: &Options) -> Result<(bool, String)> {
    let samples = if full(opts) { 1_000_000 } else { 100_000 };
    let params = paper(3.0);
    let mut worst = 0.0f64;
    for i in 1..=10 {
        let r = 0.14 * i as f64;
        let p = connection_probability(r, &params)?;
        let mut rng = substream(opts.seed, TAG_GENERIC, 2, i);
        let mut on = 0usize;
        for _ in 0..samples {
            on += snr_connection_indicator(r, &params, &mut rng)?.is_on() as usize;
        }
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        worst = worst.max((on as f64 / samples as f64 - p).abs() / sigma);
    }
    Ok((
        worst < 4.0,
        format!("{samples} draws per distance, max |z| = {worst:.2}"),
    ))
}

fn simulated_block_entropy(opts: &Options) -> Result<(bool, String)> {
    let (trials, max_t) = if full(opts) {
        (1_000_000, 4)
    } else {
        (200_000, 3)
    };
    let domain = Domain::square();
    let params = paper(2.0).with_nu(50_000.0);
    let ens = simulate(&SimConfig::new(
        2, max_t, trials, opts.seed, domain, params,
    )?)?;
    let oracle = EdgeModel::with_defaults(domain, params)?.block_entropy_oracle(max_t)?;
    let mut worst = 0.0f64;
    for t in 1..=max_t {
        let est = empirical_block_entropy(&ens, t)?;
        let excess = ((est.miller_madow - oracle.block_at(t)).abs() - est.bias).max(0.0);
        worst = worst.max(excess / est.std_err);
    }
    Ok((
        worst < 4.0,
        format!("{trials} trials, t = 1..{max_t}, max |delta| / se = {worst:.2}"),
    ))
}

fn simulated_transitions(opts: &Options) -> Result<(bool, String)> {
    let trials = if full(opts) { 200_000 } else { 20_000 };
    let domain = Domain::disk();
    let params = paper(2.0).with_nu(20_000.0);
    let ens = simulate(&SimConfig::new(2, 200, trials, opts.seed, domain, params)?)?;
    let freq = empirical_transition_frequencies(&ens)?;
    let expected = EdgeModel::with_defaults(domain, params)?.state_weighted_transition_matrix();
    let mut worst = 0.0f64;
    for a in LinkState::BOTH {
        let (Some(row), Some(se)) = (freq.row(a), freq.flip_std_err[a.index()]) else {
            return Ok((false, format!("state {a:?} never visited")));
        };
        let k = 1 - a.index();
        worst = worst.max((row[k] - expected[a.index()][k]).abs() / se);
    }
    Ok((
        worst < 4.0,
        format!("{trials} trials, max |z| = {worst:.2}"),
    ))
}

fn stationarity(opts: &Options) -> Result<(bool, String)> {
    let cfg = SimConfig::new(
        20,
        200,
        200,
        opts.seed,
        Domain::square(),
        paper(2.0).with_nu(5_000.0),
    )?;
    let warm = stationarity_check(&simulate(&cfg)?)?;
    let cold = stationarity_check(&simulate(&cfg.with_init(Initialization::AllOff))?)?;
    Ok((
        warm.stationary && !cold.stationary,
        format!(
            "stationary start max |z| = {:.2}, all-off start max |z| = {:.1}",
            warm.max_abs_z, cold.max_abs_z
        ),
    ))
}

fn determinism(opts: &Options) -> Result<(bool, String)> {
    let cfg = SimConfig::new(
        10,
        50,
        4,
        opts.seed,
        Domain::triangle(),
        paper(4.0).with_nu(2_000.0),
    )?;
    let export = || -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        export_snapshots(&simulate(&cfg)?, &mut buf)?;
        Ok(buf)
    };
    let (a, b) = (export()?, export()?);
    Ok((a == b, format!("{} bytes exported twice", a.len())))
}
