//! Entropy-rate bounds for a single edge and for the whole network.
//!
//! All distance averages go through one [`CompositeRule`] per
//! `(domain, params, spec)`, refined until every averaged quantity below is
//! resolved to the requested tolerance. The frozen rule turns the distance
//! mixture into a finite mixture of Markov chains, which is what the exact
//! block-entropy oracle enumerates.

use crate::channel::{self, ChannelParams, LinkState, TransitionMatrix};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quadrature::{CompositeRule, QuadratureSpec};

/// Largest block length accepted by the oracle.
pub const MAX_BLOCK_LENGTH: usize = 12;

fn neg_xlog2x(q: f64) -> f64 {
    if q <= 0.0 {
        0.0
    } else {
        -q * q.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

/// `-Σ q log₂ q` with `0·log 0 = 0`.
pub fn binary_entropy_terms(probabilities: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &q in probabilities {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
        h += neg_xlog2x(q);
    }
    Ok(h)
}

/// Number of node pairs, `n choose 2`.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// `-Σ_a P(a) Σ_b P(b|a) log₂ P(b|a)` for a marginal on-probability and
/// transition rows indexed `[a][b]`.
pub fn composed_conditional_entropy(marginal_on: f64, rows: &[[f64; 2]; 2]) -> f64 {
    let row_entropy = |row: &[f64; 2]| neg_xlog2x(row[0]) + neg_xlog2x(row[1]);
    (1.0 - marginal_on) * row_entropy(&rows[0]) + marginal_on * row_entropy(&rows[1])
}

/// Lower and upper entropy-rate bounds in bits per time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRateBounds {
    pub n: usize,
    pub per_edge_lower: f64,
    pub per_edge_upper: f64,
    pub network_lower: f64,
    pub network_upper: f64,
}

impl EntropyRateBounds {
    pub fn from_per_edge(n: usize, per_edge_lower: f64, per_edge_upper: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        let pairs = pair_count(n) as f64;
        Ok(Self {
            n,
            per_edge_lower,
            per_edge_upper,
            network_lower: pairs * per_edge_lower,
            network_upper: pairs * per_edge_upper,
        })
    }

    pub fn per_edge_gap(&self) -> f64 {
        self.per_edge_upper - self.per_edge_lower
    }
}

/// Block entropies `H(X¹..Xᵗ)` and conditional block entropies
/// `h_t = H(Xᵗ | X¹..Xᵗ⁻¹)` for `t = 1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntropies {
    pub block: Vec<f64>,
    pub conditional: Vec<f64>,
}

impl BlockEntropies {
    /// `H(X¹..Xᵗ)`, 1-based.
    pub fn block_at(&self, t: usize) -> f64 {
        self.block[t - 1]
    }

    /// `h_t`, 1-based.
    pub fn conditional_at(&self, t: usize) -> f64 {
        self.conditional[t - 1]
    }
}

/// Clamping and rule statistics for one [`EdgeModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeDiagnostics {
    pub nodes: usize,
    pub clamped_nodes: usize,
}

/// Single-edge statistics over the pair-distance distribution of a domain.
#[derive(Debug, Clone)]
pub struct EdgeModel {
    pub domain: Domain,
    pub params: ChannelParams,
    pub spec: QuadratureSpec,
    distances: Vec<f64>,
    /// quadrature weight times `f_R`, normalized to sum to one
    weights: Vec<f64>,
    on_prob: Vec<f64>,
    matrices: Vec<TransitionMatrix>,
}

impl EdgeModel {
    pub fn new(domain: Domain, params: ChannelParams, spec: QuadratureSpec) -> Result<Self> {
        params.validate()?;
        let d = domain.diameter();
        let mut breaks = domain.breakpoints();
        breaks.extend(channel::clamp_radii(&params, d));

        // Every distance average reported by the model is a component here.
        let driver = |r: f64| -> [f64; 7] {
            let f = domain.pdf_unchecked(r);
            let p = channel::connection_probability(r, &params).unwrap_or(0.0);
            let m = channel::transition_matrix(r, &params).unwrap_or(TransitionMatrix::identity());
            let h = (1.0 - p) * binary_entropy(m.p01) + p * binary_entropy(m.p10);
            [
                f,
                f * p,
                f * m.p01,
                f * m.p10,
                f * h,
                f * (1.0 - p) * m.p01,
                f * p * m.p10,
            ]
        };
        let rule = CompositeRule::adaptive(driver, 0.0, d, &breaks, &spec)?;

        let mut weights: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(r, w)| w * domain.pdf_unchecked(*r))
            .collect();
        let mass: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= mass;
        }
        let on_prob = rule
            .nodes
            .iter()
            .map(|&r| channel::connection_probability(r, &params))
            .collect::<Result<_>>()?;
        let matrices = rule
            .nodes
            .iter()
            .map(|&r| channel::transition_matrix(r, &params))
            .collect::<Result<_>>()?;
        Ok(Self {
            domain,
            params,
            spec,
            distances: rule.nodes,
            weights,
            on_prob,
            matrices,
        })
    }

    pub fn with_defaults(domain: Domain, params: ChannelParams) -> Result<Self> {
        Self::new(domain, params, QuadratureSpec::default())
    }

    pub fn diagnostics(&self) -> EdgeDiagnostics {
        EdgeDiagnostics {
            nodes: self.distances.len(),
            clamped_nodes: self.matrices.iter().filter(|m| m.clamped).count(),
        }
    }

    /// `E_R[g(R)]` under the model's frozen rule.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.distances
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * g(*r))
            .sum()
    }

    fn sum_nodes(&self, g: impl Fn(f64, &TransitionMatrix) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.on_prob)
            .zip(&self.matrices)
            .map(|((w, p), m)| w * g(*p, m))
            .sum()
    }

    /// `P(X = on)` averaged over the pair distance.
    pub fn averaged_edge_probability(&self) -> f64 {
        self.sum_nodes(|p, _| p)
    }

    /// `∫ P(X² = b | X¹ = a, r) f_R(r) dr`, the plain distance average of
    /// the conditional transition probability.
    pub fn averaged_transition_probability(&self, a: LinkState, b: LinkState) -> f64 {
        let flip = self.sum_nodes(|_, m| m.flip(a));
        if a == b {
            1.0 - flip
        } else {
            flip
        }
    }

    /// Rows `a = off, on` of the plain distance-averaged transition matrix.
    pub fn averaged_transition_matrix(&self) -> [[f64; 2]; 2] {
        LinkState::BOTH.map(|a| LinkState::BOTH.map(|b| self.averaged_transition_probability(a, b)))
    }

    /// `P(X² = b | X¹ = a)` of the distance-averaged process itself: the
    /// distance average weighted by the occupancy of state `a`. This is the
    /// quantity that pooled empirical transition frequencies estimate.
    pub fn state_weighted_transition_matrix(&self) -> [[f64; 2]; 2] {
        let on = self.averaged_edge_probability();
        let off = 1.0 - on;
        let off_flip = self.sum_nodes(|p, m| (1.0 - p) * m.p01);
        let on_flip = self.sum_nodes(|p, m| p * m.p10);
        let q01 = if off > 0.0 { off_flip / off } else { 0.0 };
        let q10 = if on > 0.0 { on_flip / on } else { 0.0 };
        [[1.0 - q01, q01], [q10, 1.0 - q10]]
    }

    /// Upper bound per edge: averaged marginal combined with the plainly
    /// averaged conditionals, `-Σ_a P̄(a) Σ_b P̄(b|a) log₂ P̄(b|a)`.
    pub fn conditional_entropy_unconditioned(&self) -> f64 {
        composed_conditional_entropy(
            self.averaged_edge_probability(),
            &self.averaged_transition_matrix(),
        )
    }

    /// `H(X² | X¹)` of the averaged joint law; reported next to the upper
    /// bound as a diagnostic.
    pub fn conditional_entropy_joint(&self) -> f64 {
        composed_conditional_entropy(
            self.averaged_edge_probability(),
            &self.state_weighted_transition_matrix(),
        )
    }

    /// Lower bound per edge: `H(X² | X¹, R)`.
    pub fn conditional_entropy_given_distance(&self) -> f64 {
        self.sum_nodes(|p, m| (1.0 - p) * binary_entropy(m.p01) + p * binary_entropy(m.p10))
    }

    pub fn bounds(&self, n: usize) -> Result<EntropyRateBounds> {
        EntropyRateBounds::from_per_edge(
            n,
            self.conditional_entropy_given_distance(),
            self.conditional_entropy_unconditioned(),
        )
    }

    /// Exact block entropies of one edge's trajectory for `t = 1..=steps`,
    /// enumerating all `2^steps` on/off sequences.
    pub fn block_entropy_oracle(&self, steps: usize) -> Result<BlockEntropies> {
        if !(1..=MAX_BLOCK_LENGTH).contains(&steps) {
            return Err(Error::BlockLength(steps));
        }
        let k = self.weights.len();
        let mut block = vec![0.0; steps];
        let mut conditional = vec![0.0; steps];
        let mut buffers = vec![vec![0.0; k]; steps];

        for first in LinkState::BOTH {
            for ((b, w), p) in buffers[0].iter_mut().zip(&self.weights).zip(&self.on_prob) {
                *b = w * if first.is_on() { *p } else { 1.0 - p };
            }
            let prob: f64 = buffers[0].iter().sum();
            if prob <= 0.0 {
                continue;
            }
            block[0] += neg_xlog2x(prob);
            conditional[0] += neg_xlog2x(prob);
            self.extend_sequences(1, first, prob, &mut buffers, &mut block, &mut conditional);
        }
        Ok(BlockEntropies { block, conditional })
    }

    fn extend_sequences(
        &self,
        depth: usize,
        last: LinkState,
        prefix_prob: f64,
        buffers: &mut [Vec<f64>],
        block: &mut [f64],
        conditional: &mut [f64],
    ) {
        if depth == buffers.len() {
            return;
        }
        for next in LinkState::BOTH {
            let (head, tail) = buffers.split_at_mut(depth);
            let prev = &head[depth - 1];
            let cur = &mut tail[0];
            let mut prob = 0.0;
            for i in 0..prev.len() {
                let v = prev[i] * self.matrices[i].prob(last, next);
                cur[i] = v;
                prob += v;
            }
            if prob <= 0.0 {
                continue;
            }
            block[depth] += neg_xlog2x(prob);
            conditional[depth] -= prob * (prob / prefix_prob).log2();
            self.extend_sequences(depth + 1, next, prob, buffers, block, conditional);
        }
    }
}

/// Averaged on-probability with the default quadrature.
pub fn averaged_edge_probability(domain: Domain, params: ChannelParams) -> Result<f64> {
    Ok(EdgeModel::with_defaults(domain, params)?.averaged_edge_probability())
}

pub fn averaged_transition_probability(
    domain: Domain,
    params: ChannelParams,
    a: LinkState,
    b: LinkState,
) -> Result<f64> {
    Ok(EdgeModel::with_defaults(domain, params)?.averaged_transition_probability(a, b))
}

pub fn conditional_entropy_unconditioned(domain: Domain, params: ChannelParams) -> Result<f64> {
    Ok(EdgeModel::with_defaults(domain, params)?.conditional_entropy_unconditioned())
}

pub fn conditional_entropy_given_distance(domain: Domain, params: ChannelParams) -> Result<f64> {
    Ok(EdgeModel::with_defaults(domain, params)?.conditional_entropy_given_distance())
}

pub fn entropy_rate_bounds(
    n: usize,
    domain: Domain,
    params: ChannelParams,
) -> Result<EntropyRateBounds> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 nodes, got {n}"
        )));
    }
    EdgeModel::with_defaults(domain, params)?.bounds(n)
}

pub fn block_entropy_oracle(
    domain: Domain,
    params: ChannelParams,
    steps: usize,
) -> Result<BlockEntropies> {
    if !(1..=MAX_BLOCK_LENGTH).contains(&steps) {
        return Err(Error::BlockLength(steps));
    }
    EdgeModel::with_defaults(domain, params)?.block_entropy_oracle(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DEFAULT_SYMBOL_RATE;

    fn paper(eta: f64) -> ChannelParams {
        ChannelParams::new(0.7, eta, 500.0, DEFAULT_SYMBOL_RATE).unwrap()
    }

    #[test]
    fn entropy_terms() {
        assert!((binary_entropy_terms(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy_terms(&[1.0]).unwrap(), 0.0);
        assert_eq!(binary_entropy_terms(&[0.0, 1.0]).unwrap(), 0.0);
        assert!((binary_entropy_terms(&[0.25, 0.75]).unwrap() - 0.811_278).abs() < 1e-6);
        assert!(binary_entropy_terms(&[1.2]).is_err());
        assert!(binary_entropy_terms(&[-0.1]).is_err());
    }

    #[test]
    fn pair_counts() {
        assert_eq!(pair_count(2), 1);
        assert_eq!(pair_count(50), 1225);
        assert_eq!(pair_count(100), 4950);
        assert_eq!(pair_count(1), 0);
    }

    #[test]
    fn frozen_chain_has_zero_entropy() {
        let m = EdgeModel::with_defaults(Domain::square(), paper(2.0).with_nu(0.0)).unwrap();
        assert_eq!(m.conditional_entropy_given_distance(), 0.0);
        assert_eq!(m.conditional_entropy_unconditioned(), 0.0);
        for a in LinkState::BOTH {
            for b in LinkState::BOTH {
                let v = m.averaged_transition_probability(a, b);
                assert_eq!(v, if a == b { 1.0 } else { 0.0 });
            }
        }
        let oracle = m.block_entropy_oracle(6).unwrap();
        let h1 = binary_entropy(m.averaged_edge_probability());
        for t in 1..=6 {
            assert!((oracle.block_at(t) - h1).abs() < 1e-12);
        }
    }

    #[test]
    fn range_limits_of_edge_probability() {
        let d = Domain::square().diameter();
        let far = averaged_edge_probability(Domain::square(), paper(2.0).with_r0(1e3 * d)).unwrap();
        assert!((far - 1.0).abs() < 1e-5, "{far}");
        let near =
            averaged_edge_probability(Domain::square(), paper(2.0).with_r0(1e-3 * d)).unwrap();
        assert!(near < 1e-5, "{near}");
    }

    #[test]
    fn oracle_first_block_is_marginal_entropy() {
        let m = EdgeModel::with_defaults(Domain::disk(), paper(3.0)).unwrap();
        let o = m.block_entropy_oracle(1).unwrap();
        assert!((o.block[0] - binary_entropy(m.averaged_edge_probability())).abs() < 1e-14);
        assert!(m.block_entropy_oracle(0).is_err());
        assert!(m.block_entropy_oracle(13).is_err());
    }

    #[test]
    fn oracle_conditional_matches_block_differences() {
        let m = EdgeModel::with_defaults(Domain::square(), paper(2.0)).unwrap();
        let o = m.block_entropy_oracle(6).unwrap();
        for t in 2..=6 {
            let diff = o.block_at(t) - o.block_at(t - 1);
            assert!((diff - o.conditional_at(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn bounds_need_two_nodes() {
        assert!(entropy_rate_bounds(1, Domain::square(), paper(2.0)).is_err());
        let b = entropy_rate_bounds(2, Domain::square(), paper(2.0)).unwrap();
        assert_eq!(b.network_lower, b.per_edge_lower);
        assert_eq!(b.network_upper, b.per_edge_upper);
    }

    #[test]
    fn averaged_rows_sum_to_one() {
        let m = EdgeModel::with_defaults(Domain::triangle(), paper(4.0)).unwrap();
        for row in m
            .averaged_transition_matrix()
            .iter()
            .chain(m.state_weighted_transition_matrix().iter())
        {
            assert!((row[0] + row[1] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn uniform_rows_give_one_bit() {
        let rows = [[0.5, 0.5], [0.5, 0.5]];
        for on in [0.0, 0.3, 1.0] {
            assert!((composed_conditional_entropy(on, &rows) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn clamped_nodes_are_counted() {
        let m = EdgeModel::with_defaults(Domain::square(), paper(4.0)).unwrap();
        let diag = m.diagnostics();
        assert!(diag.clamped_nodes > 0 && diag.clamped_nodes < diag.nodes);
    }
}
