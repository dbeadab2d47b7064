//! Piecewise Gauss–Legendre quadrature with dyadic panel refinement.
//!
//! Every integral in the crate is over a pair-distance support `[0, D]` with
//! a handful of known kinks (density breakpoints, clamp radii). Panels never
//! straddle a breakpoint; inside a panel the integrand is smooth, so a fixed
//! Gauss rule compared against the same rule on both halves gives a reliable
//! error estimate. Vector-valued integrands share one panel set, which lets
//! the entropy module reuse a single [`CompositeRule`] for many quantities.

use crate::error::{Error, Result};

/// Controls for the adaptive refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes on each panel (at least 8).
    pub nodes_per_panel: usize,
    /// Target relative accuracy of every integrand component.
    pub rel_tol: f64,
    /// Absolute error floor, for components whose integral is near zero.
    pub abs_tol: f64,
    /// Maximum number of bisections of an initial panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_panel: 20,
            rel_tol: 1e-8,
            abs_tol: 1e-15,
            max_depth: 48,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel < 8 {
            return Err(Error::InvalidParameter(format!(
                "nodes_per_panel must be at least 8, got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol {} not in (0, 1)",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol {} must be finite and non-negative",
                self.abs_tol
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidParameter("max_depth must be positive".into()));
        }
        Ok(())
    }

    /// Same spec with twice as many nodes per panel.
    pub fn doubled(&self) -> Self {
        Self {
            nodes_per_panel: 2 * self.nodes_per_panel,
            ..*self
        }
    }
}

/// Gauss–Legendre abscissae and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    fn apply<const N: usize>(&self, f: &impl Fn(f64) -> [f64; N], a: f64, b: f64) -> [f64; N] {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; N];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            for k in 0..N {
                acc[k] += w * v[k];
            }
        }
        for v in &mut acc {
            *v *= half;
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    depth: u32,
    coarse: [f64; N],
    left: [f64; N],
    right: [f64; N],
}

impl<const N: usize> Panel<N> {
    fn new(
        gl: &GaussLegendre,
        f: &impl Fn(f64) -> [f64; N],
        a: f64,
        b: f64,
        depth: u32,
        coarse: Option<[f64; N]>,
    ) -> Self {
        let m = 0.5 * (a + b);
        let coarse = coarse.unwrap_or_else(|| gl.apply(f, a, b));
        Self {
            a,
            b,
            depth,
            coarse,
            left: gl.apply(f, a, m),
            right: gl.apply(f, m, b),
        }
    }

    fn fine(&self, k: usize) -> f64 {
        self.left[k] + self.right[k]
    }

    fn err(&self, k: usize) -> f64 {
        (self.coarse[k] - self.fine(k)).abs()
    }
}

/// Sorted, deduplicated panel boundaries from an interval plus interior breakpoints.
pub fn panel_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    for x in inner {
        if x > *edges.last().unwrap() {
            edges.push(x);
        }
    }
    edges.push(b);
    edges
}

const MAX_PANELS: usize = 1 << 16;

fn refine<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<(GaussLegendre, Vec<Panel<N>>)> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidParameter(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    let gl = GaussLegendre::new(spec.nodes_per_panel);
    let edges = panel_edges(a, b, breakpoints);
    let mut panels: Vec<Panel<N>> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Panel::new(&gl, f, w[0], w[1], 0, None))
        .collect();

    loop {
        let mut total = [0.0; N];
        let mut abs_mass = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for k in 0..N {
                total[k] += p.fine(k);
                abs_mass[k] += p.left[k].abs() + p.right[k].abs();
                err[k] += p.err(k);
            }
        }
        let allowed: [f64; N] = std::array::from_fn(|k| {
            (spec.rel_tol * total[k].abs()).max(spec.abs_tol) + 1e-15 * abs_mass[k]
        });
        if (0..N).all(|k| err[k] <= allowed[k]) {
            return Ok((gl, panels));
        }

        // split the panel with the largest error relative to the budget
        let scale: [f64; N] = std::array::from_fn(|k| allowed[k].max(f64::MIN_POSITIVE));
        let (worst, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = (0..N)
                    .filter(|&k| err[k] > allowed[k])
                    .map(|k| p.err(k) / scale[k])
                    .fold(0.0, f64::max);
                (i, score)
            })
            .fold(
                (0, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        let p = panels.swap_remove(worst);
        if p.depth >= spec.max_depth || panels.len() + 2 > MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                a: p.a,
                b: p.b,
                max_depth: spec.max_depth,
            });
        }
        let m = 0.5 * (p.a + p.b);
        panels.push(Panel::new(&gl, f, p.a, m, p.depth + 1, Some(p.left)));
        panels.push(Panel::new(&gl, f, m, p.b, p.depth + 1, Some(p.right)));
    }
}

/// Integrates a vector-valued function; all components share the panel set.
pub fn integrate_vec<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<[f64; N]> {
    let (_, panels) = refine(&f, a, b, breakpoints, spec)?;
    Ok(std::array::from_fn(|k| {
        panels.iter().map(|p| p.fine(k)).sum()
    }))
}

/// Adaptive integral of a scalar function over `[a, b]`, split at `breakpoints`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_vec(|x| [f(x)], a, b, breakpoints, spec).map(|v| v[0])
}

/// A frozen composite rule: nodes and weights that can be reused for any
/// integrand resolved by the panels that produced it.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Builds panels adaptively for the driver integrand `f`, then freezes
    /// the refined (half-panel) rule.
    pub fn adaptive<const N: usize>(
        f: impl Fn(f64) -> [f64; N],
        a: f64,
        b: f64,
        breakpoints: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let (gl, mut panels) = refine(&f, a, b, breakpoints, spec)?;
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let mut nodes = Vec::with_capacity(panels.len() * 2 * gl.nodes.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in &panels {
            let m = 0.5 * (p.a + p.b);
            for (lo, hi) in [(p.a, m), (m, p.b)] {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                    nodes.push(mid + half * x);
                    weights.push(half * w);
                }
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(10);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 19 is the highest exactly integrated power
        let i: f64 = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| w * x.powi(18))
            .sum();
        assert!((i - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let gl = GaussLegendre::new(9);
        assert_eq!(gl.nodes[4], 0.0);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kink_at_breakpoint_is_exact() {
        let f = |x: f64| (x - 0.3).abs();
        let spec = QuadratureSpec::default();
        let v = integrate(f, 0.0, 1.0, &[0.3], &spec).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn kink_without_breakpoint_still_converges() {
        let f = |x: f64| (x - 0.3).abs();
        let v = integrate(f, 0.0, 1.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((v - 0.29).abs() < 1e-8);
    }

    #[test]
    fn steep_integrand() {
        // ∫_1e-6^1 x^-1.5 dx = 2 (1e3 - 1)
        let v = integrate(|x| x.powf(-1.5), 1e-6, 1.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((v / 1998.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn depth_limit_reports_failure() {
        let spec = QuadratureSpec {
            max_depth: 2,
            ..Default::default()
        };
        let err = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &[], &spec).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn rejects_tiny_rules() {
        let spec = QuadratureSpec {
            nodes_per_panel: 4,
            ..Default::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &[], &spec).is_err());
    }

    #[test]
    fn frozen_rule_reproduces_driver_integral() {
        let f = |x: f64| [x.exp(), (3.0 * x).sin()];
        let spec = QuadratureSpec::default();
        let rule = CompositeRule::adaptive(f, 0.0, 2.0, &[], &spec).unwrap();
        let v = rule.integrate(|x| x.exp());
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-12);
    }
}
