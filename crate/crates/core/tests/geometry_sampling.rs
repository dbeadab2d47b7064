use netentropy::geometry::{Domain, Point};
use netentropy::quadrature::{integrate, QuadratureSpec};
use netentropy::rng::seeded;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SAMPLES: usize = 1_000_000;

fn tight() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-12,
        ..Default::default()
    }
}

/// CDF tabulated by integrating the density cell by cell.
struct TabulatedCdf {
    step: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    fn new(domain: Domain, cells: usize) -> Self {
        let d = domain.diameter();
        let step = d / cells as f64;
        let breaks = domain.breakpoints();
        let mut values = vec![0.0];
        let mut acc = 0.0;
        for i in 0..cells {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            acc += integrate(|r| domain.pdf_unchecked(r), a, b, &breaks, &tight()).unwrap();
            values.push(acc);
        }
        Self { step, values }
    }

    fn eval(&self, r: f64) -> f64 {
        let x = (r / self.step).max(0.0);
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let frac = (x - i as f64).min(1.0);
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

fn distances(domain: Domain, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..n).map(|_| domain.sample_distance(&mut rng)).collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn triangle_centroid_matches_sample_mean() {
    let d = Domain::triangle();
    let mut rng = seeded(21);
    let pts: Vec<Point> = (0..SAMPLES).map(|_| d.sample_point(&mut rng)).collect();
    let c = d.centroid();
    let (mx, sx) = mean_and_se(&pts.iter().map(|p| p.x).collect::<Vec<_>>());
    let (my, sy) = mean_and_se(&pts.iter().map(|p| p.y).collect::<Vec<_>>());
    assert!((mx - c.x).abs() < 3.0 * sx, "x: {mx} vs {}", c.x);
    assert!((my - c.y).abs() < 3.0 * sy, "y: {my} vs {}", c.y);
}

#[test]
fn disk_points_within_radius() {
    let d = Domain::disk();
    let mut rng = seeded(4);
    for _ in 0..100_000 {
        let p = d.sample_point(&mut rng);
        assert!(p.x.hypot(p.y) <= Domain::disk_radius());
    }
}

#[test]
fn mean_distances_match_density() {
    // square and triangle means, and the density-based means, agree with sampling
    for (domain, seed, expected) in [
        (Domain::square(), 1, 0.52141),
        (Domain::triangle(), 2, 0.5544),
        (Domain::disk(), 3, 0.5108),
    ] {
        let (mean, se) = mean_and_se(&distances(domain, seed, SAMPLES));
        let analytic = domain.density().mean(&tight()).unwrap();
        assert!((analytic - expected).abs() < 5e-5, "{domain}: {analytic}");
        assert!(
            (mean - analytic).abs() < 3.0 * se,
            "{domain}: {mean} vs {analytic} (se {se})"
        );
    }
}

#[test]
fn square_distances_pass_kolmogorov_smirnov() {
    let domain = Domain::square();
    let cdf = TabulatedCdf::new(domain, 20_000);
    let mut xs = distances(domain, 8, SAMPLES);
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf.eval(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    let critical = 1.628 / n.sqrt();
    assert!(ks < critical, "KS {ks} >= {critical}");
}

#[test]
fn histograms_match_density_chi_squared() {
    const BINS: usize = 200;
    for (k, domain) in Domain::all().into_iter().enumerate() {
        let cdf = TabulatedCdf::new(domain, 20_000);
        let width = domain.diameter() / BINS as f64;
        let mut counts = [0u64; BINS];
        for r in distances(domain, 100 + k as u64, SAMPLES) {
            counts[((r / width) as usize).min(BINS - 1)] += 1;
        }
        let mut stat = 0.0;
        let mut dof = 0;
        for (i, &c) in counts.iter().enumerate() {
            let p = cdf.eval((i + 1) as f64 * width) - cdf.eval(i as f64 * width);
            let expected = p * SAMPLES as f64;
            // pool nothing; only skip empty-tail bins
            if expected > 5.0 {
                stat += (c as f64 - expected).powi(2) / expected;
                dof += 1;
            }
        }
        let p_value = 1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat);
        assert!(
            p_value > 0.01,
            "{domain}: chi2 {stat} with {dof} bins, p = {p_value}"
        );
    }
}

#[test]
fn normalization_and_endpoints() {
    for domain in Domain::all() {
        let mass = domain.density().total_mass(&tight()).unwrap();
        assert!((mass - 1.0).abs() < 1e-9, "{domain}: {mass}");
        assert_eq!(domain.distance_pdf(0.0).unwrap(), 0.0);
        assert!(domain.distance_pdf(domain.diameter()).unwrap().abs() < 1e-12);
        for i in 0..=1000 {
            let r = domain.diameter() * i as f64 / 1000.0;
            assert!(domain.distance_pdf(r).unwrap() >= 0.0);
        }
    }
}

#[test]
fn sampling_is_bit_reproducible() {
    for domain in Domain::all() {
        let a = distances(domain, 77, 1000);
        let b = distances(domain, 77, 1000);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
