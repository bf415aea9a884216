//! Planar domains containing the origin, boundary collocation nodes and
//! interior Monte Carlo samples.

use std::f64::consts::{PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// `ρ(θ) = mean + Σ_k cos[k-1]·cos(kθ) + sin[k-1]·sin(kθ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl FourierProfile {
    pub fn eval(&self, theta: f64) -> f64 {
        let mut value = self.mean;
        for (k, c) in self.cos.iter().enumerate() {
            value += c * ((k + 1) as f64 * theta).cos();
        }
        for (k, s) in self.sin.iter().enumerate() {
            value += s * ((k + 1) as f64 * theta).sin();
        }
        value
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let mut value = 0.0;
        for (k, c) in self.cos.iter().enumerate() {
            let m = (k + 1) as f64;
            value -= m * c * (m * theta).sin();
        }
        for (k, s) in self.sin.iter().enumerate() {
            let m = (k + 1) as f64;
            value += m * s * (m * theta).cos();
        }
        value
    }

    fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// `{ r < ρ(θ) }`, parametrised by `γ(θ) = ρ(θ)(cos θ, sin θ)`.
    RadialGraph(FourierProfile),
    /// `{ (x/a)² + (y/b)² < 1 }`, parametrised by `γ(t) = (a cos t, b sin t)`.
    Ellipse { a: f64, b: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domain {
    shape: Shape,
    r_out: f64,
    r_in: f64,
    r_max: f64,
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        let (r_min, r_max) = match &shape {
            Shape::RadialGraph(p) => {
                if !p.mean.is_finite() || p.cos.iter().chain(&p.sin).any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite Fourier coefficient".into()));
                }
                radius_extrema(p)
            }
            Shape::Ellipse { a, b } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidParameter(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
                }
                (a.min(*b), a.max(*b))
            }
        };
        if !(r_min > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "boundary radius must stay positive (minimum {r_min})"
            )));
        }
        let r_in = match &shape {
            Shape::Ellipse { .. } => r_min,
            Shape::RadialGraph(p) if p.degree() == 0 => r_min,
            Shape::RadialGraph(_) => 0.99 * r_min,
        };
        Ok(Self {
            shape,
            r_out: r_max,
            r_in,
            r_max,
        })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(Shape::RadialGraph(FourierProfile {
            mean: radius,
            cos: vec![],
            sin: vec![],
        }))
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(Shape::Ellipse { a, b })
    }

    /// `ρ(θ) = 3 + cos(4θ)/2`.
    pub fn star() -> Self {
        Self::new(Shape::RadialGraph(FourierProfile {
            mean: 3.0,
            cos: vec![0.0, 0.0, 0.0, 0.5],
            sin: vec![],
        }))
        .expect("star profile is positive")
    }

    /// Enlarge the enclosing ball; errors if `radius` does not contain `Ω`.
    pub fn with_enclosing_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= self.r_max) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "enclosing radius {radius} is smaller than the boundary maximum {}",
                self.r_max
            )));
        }
        self.r_out = radius;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn max_boundary_radius(&self) -> f64 {
        self.r_max
    }

    pub fn period(&self) -> f64 {
        TAU
    }

    pub fn gamma(&self, t: f64) -> Point {
        match &self.shape {
            Shape::RadialGraph(p) => {
                let rho = p.eval(t);
                [rho * t.cos(), rho * t.sin()]
            }
            Shape::Ellipse { a, b } => [a * t.cos(), b * t.sin()],
        }
    }

    pub fn gamma_prime(&self, t: f64) -> Point {
        match &self.shape {
            Shape::RadialGraph(p) => {
                let (rho, d) = (p.eval(t), p.derivative(t));
                let (s, c) = t.sin_cos();
                [d * c - rho * s, d * s + rho * c]
            }
            Shape::Ellipse { a, b } => [-a * t.sin(), b * t.cos()],
        }
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point) -> bool {
        match &self.shape {
            Shape::RadialGraph(profile) => {
                let r = p[0].hypot(p[1]);
                r == 0.0 || r < profile.eval(p[1].atan2(p[0]))
            }
            Shape::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        match &self.shape {
            // ρ² is a trigonometric polynomial of degree 2K; the trapezoid
            // rule with more than 2K points integrates it exactly.
            Shape::RadialGraph(p) => {
                let m = 4 * p.degree() + 64;
                let sum: f64 = (0..m).map(|i| p.eval(TAU * i as f64 / m as f64).powi(2)).sum();
                0.5 * TAU * sum / m as f64
            }
            Shape::Ellipse { a, b } => PI * a * b,
        }
    }

    /// Trapezoid rule on the periodic arc-length density.
    pub fn perimeter(&self) -> f64 {
        let m = 4096;
        let sum: f64 = (0..m)
            .map(|i| {
                let d = self.gamma_prime(TAU * i as f64 / m as f64);
                d[0].hypot(d[1])
            })
            .sum();
        TAU * sum / m as f64
    }

    /// Parameter values `t_i = (i + δ_i) L / N` with `δ_i ~ U(-1/4, 1/4)`.
    pub fn boundary_nodes(&self, count: usize, seed: u64) -> Result<BoundaryNodeSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.nodes_from_offsets(count, Some(seed), |_| rng.random_range(-0.25..0.25))
    }

    /// Unjittered grid `t_i = i L / N`.
    pub fn boundary_nodes_uniform(&self, count: usize) -> Result<BoundaryNodeSet> {
        self.nodes_from_offsets(count, None, |_| 0.0)
    }

    fn nodes_from_offsets(
        &self,
        count: usize,
        seed: Option<u64>,
        mut offset: impl FnMut(usize) -> f64,
    ) -> Result<BoundaryNodeSet> {
        if count < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 boundary nodes, got {count}")));
        }
        let period = self.period();
        let step = period / count as f64;
        let params: Vec<f64> = (0..count).map(|i| (i as f64 + offset(i)) * step).collect();
        let nodes = params
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let prev = if i == 0 { params[count - 1] - period } else { params[i - 1] };
                let d = self.gamma_prime(t);
                BoundaryNode {
                    t,
                    point: self.gamma(t),
                    weight: d[0].hypot(d[1]) * (t - prev),
                }
            })
            .collect();
        Ok(BoundaryNodeSet { nodes, period, seed })
    }

    /// Rejection sampling on `[-R_out, R_out]²`.
    pub fn sample_interior(&self, count: usize, seed: u64) -> Result<InteriorSampleSet> {
        if count == 0 {
            return Err(Error::InvalidParameter("need at least one interior sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.r_out;
        let mut points = Vec::with_capacity(count);
        let mut trials: u64 = 0;
        while points.len() < count {
            trials += 1;
            let p = [rng.random_range(-r..r), rng.random_range(-r..r)];
            if self.contains(p) {
                points.push(p);
            }
            if trials >= 100_000 {
                let rate = points.len() as f64 / trials as f64;
                if rate < 1e-3 {
                    return Err(Error::DegenerateDomain { rate, trials });
                }
            }
        }
        Ok(InteriorSampleSet {
            points,
            area: self.area(),
            seed,
            trials,
        })
    }
}

/// Extrema of `ρ` by dense sampling followed by golden-section polishing.
fn radius_extrema(p: &FourierProfile) -> (f64, f64) {
    if p.degree() == 0 {
        return (p.mean, p.mean);
    }
    let m = 8192;
    let dt = TAU / m as f64;
    let samples: Vec<f64> = (0..m).map(|i| p.eval(i as f64 * dt)).collect();
    let argmin = (0..m).min_by(|&i, &j| samples[i].total_cmp(&samples[j])).unwrap();
    let argmax = (0..m).max_by(|&i, &j| samples[i].total_cmp(&samples[j])).unwrap();
    let lo = golden(|t| p.eval(t), argmin as f64 * dt, dt);
    let hi = -golden(|t| -p.eval(t), argmax as f64 * dt, dt);
    (lo.min(samples[argmin]), hi.max(samples[argmax]))
}

fn golden(f: impl Fn(f64) -> f64, centre: f64, half_width: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (centre - half_width, centre + half_width);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryNode {
    pub t: f64,
    pub point: Point,
    /// `‖γ'(t_i)‖ (t_i - t_{i-1})`.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryNodeSet {
    pub nodes: Vec<BoundaryNode>,
    pub period: f64,
    /// `None` for the unjittered grid.
    pub seed: Option<u64>,
}

impl BoundaryNodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// `t_i - t_{i-1}` with `t_{-1} = t_{N-1} - L`.
    pub fn spacings(&self) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                let prev = if i == 0 { self.nodes[n - 1].t - self.period } else { self.nodes[i - 1].t };
                self.nodes[i].t - prev
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteriorSampleSet {
    pub points: Vec<Point>,
    pub area: f64,
    pub seed: u64,
    /// Rejection trials spent, accepted or not.
    pub trials: u64,
}

impl InteriorSampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
