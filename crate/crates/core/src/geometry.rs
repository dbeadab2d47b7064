//! Unit-area bounding domains, uniform node placement and the pair-distance
//! (line picking) density of each shape.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSpec};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Shape of the bounding region. Every shape is scaled to unit area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Square,
    Disk,
    Triangle,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Square, Shape::Disk, Shape::Triangle];

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::Disk => "disk",
            Shape::Triangle => "triangle",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "square" => Ok(Shape::Square),
            "disk" | "circle" => Ok(Shape::Disk),
            "triangle" => Ok(Shape::Triangle),
            other => Err(Error::UnknownShape(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A unit-area convex region.
///
/// * square: side 1, corner at the origin;
/// * disk: radius 1/√π, centred at the origin;
/// * triangle: equilateral, side 2/3^(1/4), base on the x axis from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain {
    pub shape: Shape,
}

impl Domain {
    pub const fn new(shape: Shape) -> Self {
        Self { shape }
    }

    pub fn square() -> Self {
        Self::new(Shape::Square)
    }

    pub fn disk() -> Self {
        Self::new(Shape::Disk)
    }

    pub fn triangle() -> Self {
        Self::new(Shape::Triangle)
    }

    pub fn all() -> [Domain; 3] {
        Shape::ALL.map(Domain::new)
    }

    pub fn name(&self) -> &'static str {
        self.shape.name()
    }

    pub fn disk_radius() -> f64 {
        1.0 / PI.sqrt()
    }

    pub fn triangle_side() -> f64 {
        2.0 / 3f64.powf(0.25)
    }

    pub fn triangle_height() -> f64 {
        0.5 * SQRT_3 * Self::triangle_side()
    }

    /// Area from the shape's own dimensions.
    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Square => 1.0,
            Shape::Disk => PI * Self::disk_radius().powi(2),
            Shape::Triangle => 0.5 * Self::triangle_side() * Self::triangle_height(),
        }
    }

    /// Largest distance between two points of the domain.
    pub fn diameter(&self) -> f64 {
        match self.shape {
            Shape::Square => std::f64::consts::SQRT_2,
            Shape::Disk => 2.0 * Self::disk_radius(),
            Shape::Triangle => Self::triangle_side(),
        }
    }

    pub fn centroid(&self) -> Point {
        match self.shape {
            Shape::Square => Point::new(0.5, 0.5),
            Shape::Disk => Point::new(0.0, 0.0),
            Shape::Triangle => {
                Point::new(0.5 * Self::triangle_side(), Self::triangle_height() / 3.0)
            }
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        const TOL: f64 = 1e-12;
        match self.shape {
            Shape::Square => (-TOL..=1.0 + TOL).contains(&p.x) && (-TOL..=1.0 + TOL).contains(&p.y),
            Shape::Disk => p.x.hypot(p.y) <= Self::disk_radius() + TOL,
            Shape::Triangle => {
                let s = Self::triangle_side();
                p.y >= -TOL && SQRT_3 * p.x - p.y >= -TOL && SQRT_3 * (s - p.x) - p.y >= -TOL
            }
        }
    }

    /// Uniform point in the domain.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.shape {
            Shape::Square => Point::new(rng.random(), rng.random()),
            Shape::Disk => {
                let rho = Self::disk_radius() * rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                Point::new(rho * theta.cos(), rho * theta.sin())
            }
            Shape::Triangle => {
                // parallelogram sample folded back into the triangle
                let mut u: f64 = rng.random();
                let mut v: f64 = rng.random();
                if u + v > 1.0 {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                let s = Self::triangle_side();
                Point::new(s * (u + 0.5 * v), Self::triangle_height() * v)
            }
        }
    }

    /// Distance between two independent uniform points.
    pub fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.sample_point(rng);
        let b = self.sample_point(rng);
        a.distance(&b)
    }

    /// Pair-distance density `f_R(r)` on `[0, D]`.
    pub fn distance_pdf(&self, r: f64) -> Result<f64> {
        let d = self.diameter();
        if !(0.0..=d).contains(&r) {
            return Err(Error::OutOfSupport { r, diameter: d });
        }
        Ok(self.pdf_unchecked(r))
    }

    /// Density evaluated without the support check; zero outside `[0, D]`.
    pub fn pdf_unchecked(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.diameter() {
            return 0.0;
        }
        let v = match self.shape {
            Shape::Square => square_pdf(r),
            Shape::Disk => disk_pdf(r),
            Shape::Triangle => triangle_pdf(r),
        };
        v.max(0.0)
    }

    /// Interior points where `f_R` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            Shape::Square => vec![1.0],
            Shape::Disk => vec![],
            Shape::Triangle => vec![Self::triangle_height()],
        }
    }

    pub fn density(&self) -> DistanceDensity {
        DistanceDensity { domain: *self }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.shape.fmt(f)
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(Domain::new)
    }
}

fn square_pdf(r: f64) -> f64 {
    if r <= 1.0 {
        2.0 * r * (r * r - 4.0 * r + PI)
    } else {
        let q = (r * r - 1.0).sqrt();
        2.0 * r * (4.0 * q - (r * r + 2.0 - PI) - 4.0 * q.atan())
    }
}

fn disk_pdf(r: f64) -> f64 {
    let radius = Domain::disk_radius();
    let u = r / (2.0 * radius);
    4.0 * r / (PI * radius * radius) * (u.acos() - u * (1.0 - u * u).sqrt())
}

// For a triangle the overlap of the body with its translate by r·(cos θ, sin θ)
// is a homothetic triangle, so the set covariance is A·(1 − r·m(θ)/h)²₊ with
// m(θ) = Σ max(0, ⟨u_θ, n_i⟩) over the inward normals. By symmetry
//   f(r) = 12 r ∫₀^{π/6} (1 − (r/h) cos ψ)²₊ dψ   (unit area).
fn triangle_pdf(r: f64) -> f64 {
    let h = Domain::triangle_height();
    let k = r / h;
    let integral = if r <= h {
        FRAC_PI_6 - k + k * k * (PI / 12.0 + SQRT_3 / 8.0)
    } else {
        let psi0 = (h / r).acos();
        let span = FRAC_PI_6 - psi0;
        span - 2.0 * k * (0.5 - psi0.sin())
            + k * k * (0.5 * span + 0.25 * (FRAC_PI_3.sin() - (2.0 * psi0).sin()))
    };
    12.0 * r * integral
}

/// The pair-distance density of a domain, with its support and kinks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceDensity {
    pub domain: Domain,
}

impl DistanceDensity {
    pub fn support(&self) -> (f64, f64) {
        (0.0, self.domain.diameter())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.domain.breakpoints()
    }

    pub fn pdf(&self, r: f64) -> Result<f64> {
        self.domain.distance_pdf(r)
    }

    /// `∫₀^r f_R`; clamps `r` into the support.
    pub fn cdf(&self, r: f64, spec: &QuadratureSpec) -> Result<f64> {
        let d = self.domain.diameter();
        if r <= 0.0 {
            return Ok(0.0);
        }
        if r >= d {
            return Ok(1.0);
        }
        quadrature::integrate(
            |x| self.domain.pdf_unchecked(x),
            0.0,
            r,
            &self.breakpoints(),
            spec,
        )
    }

    /// `∫₀^D g(r) f_R(r) dr`.
    pub fn expectation(
        &self,
        g: impl Fn(f64) -> f64,
        extra_breaks: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let (a, b) = self.support();
        let mut breaks = self.breakpoints();
        breaks.extend_from_slice(extra_breaks);
        quadrature::integrate(|x| g(x) * self.domain.pdf_unchecked(x), a, b, &breaks, spec)
    }

    pub fn total_mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.expectation(|_| 1.0, &[], spec)
    }

    pub fn mean(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.expectation(|r| r, &[], spec)
    }
}
