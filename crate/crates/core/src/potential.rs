//! Radial potentials and the three-point Gauss rule used for every integral
//! that involves the potential.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial_fem::LocalHat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    C1,
    C2,
}

/// Three-point Gauss–Legendre rule mapped to an element `[a, b]`.
pub struct GaussRule3;

impl GaussRule3 {
    /// Nodes as fractions of the element, `1/2 ∓ √(3/5)/2` and `1/2`.
    pub const NODES: [f64; 3] = [
        0.5 - 0.387_298_334_620_741_7,
        0.5,
        0.5 + 0.387_298_334_620_741_7,
    ];
    /// Weights for an element of unit length (`5/18, 4/9, 5/18`).
    pub const WEIGHTS: [f64; 3] = [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0];

    pub fn nodes(a: f64, b: f64) -> [f64; 3] {
        let h = b - a;
        Self::NODES.map(|w| a + w * h)
    }
}

/// Three-point Gauss quadrature of `f` on `[a, b]`; exact up to degree five.
pub fn quad_element(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = b - a;
    let nodes = GaussRule3::nodes(a, b);
    h * (GaussRule3::WEIGHTS[0] * f(nodes[0])
        + GaussRule3::WEIGHTS[1] * f(nodes[1])
        + GaussRule3::WEIGHTS[2] * f(nodes[2]))
}

#[derive(Clone, Debug)]
enum Profile {
    Constant(f64),
    /// `2 / (r² + 1) + 1`
    Lorentzian,
    /// `1 + r` on `[0, 1]`, `1 + r + (r - 1)²` beyond.
    Kinked,
    Tabulated(MonotoneCubic),
}

/// A radial potential `V(r)`, optionally translated by a constant shift.
#[derive(Clone, Debug)]
pub struct RadialPotential {
    profile: Profile,
    shift: f64,
}

impl RadialPotential {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("constant potential must be finite, got {value}")));
        }
        Ok(Self {
            profile: Profile::Constant(value),
            shift: 0.0,
        })
    }

    /// The analytic potential `2/(r²+1) + 1` used with the elliptic domain.
    pub fn lorentzian() -> Self {
        Self {
            profile: Profile::Lorentzian,
            shift: 0.0,
        }
    }

    /// The C¹ potential `1 + r` (r ≤ 1), `1 + r + (r-1)²` (r > 1) used with the
    /// star-shaped domain.
    pub fn star() -> Self {
        Self {
            profile: Profile::Kinked,
            shift: 0.0,
        }
    }

    /// Potential interpolated from a table with a monotone cubic.
    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            profile: Profile::Tabulated(MonotoneCubic::new(radii, values)?),
            shift: 0.0,
        })
    }

    /// Reads a two-column `r,V` CSV. A header row is allowed.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let (mut radii, mut values) = (Vec::new(), Vec::new());
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Table(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::Table(format!("line {}: expected 2 columns, got {}", line + 1, record.len())));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(r), Ok(v)) => {
                    radii.push(r);
                    values.push(v);
                }
                _ if line == 0 => continue,
                _ => return Err(Error::Table(format!("line {}: not a number pair", line + 1))),
            }
        }
        Self::tabulated(radii, values)
    }

    pub fn shifted(mut self, shift: f64) -> Self {
        self.shift += shift;
        self
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn eval(&self, r: f64) -> f64 {
        let base = match &self.profile {
            Profile::Constant(c) => *c,
            Profile::Lorentzian => 2.0 / (r * r + 1.0) + 1.0,
            Profile::Kinked => {
                if r <= 1.0 {
                    1.0 + r
                } else {
                    1.0 + r + (r - 1.0) * (r - 1.0)
                }
            }
            Profile::Tabulated(table) => table.eval(r),
        };
        base + self.shift
    }

    pub fn smoothness(&self) -> Smoothness {
        match self.profile {
            Profile::Constant(_) | Profile::Lorentzian => Smoothness::C2,
            Profile::Kinked | Profile::Tabulated(_) => Smoothness::C1,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.profile, Profile::Constant(_))
    }

    /// Dense-sampling estimate of `inf V` on `[0, radius]`.
    pub fn infimum(&self, radius: f64) -> f64 {
        sample_points(radius)
            .map(|r| self.eval(r))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shift that lifts the potential to `V >= 1` on `[0, radius]`.
    pub fn required_shift(&self, radius: f64) -> f64 {
        (1.0 - self.infimum(radius)).max(0.0)
    }

    /// Errors if `V < 1` anywhere on a dense sample of `[0, radius]`, or if a
    /// table does not cover the interval.
    pub fn check_lower_bound(&self, radius: f64) -> Result<()> {
        if let Profile::Tabulated(table) = &self.profile {
            table.check_covers(radius)?;
        }
        for r in sample_points(radius) {
            let value = self.eval(r);
            if !(value >= 1.0) {
                return Err(Error::PotentialBelowOne { r, value });
            }
        }
        Ok(())
    }

    /// Finite-difference estimate of the Lipschitz constant on `[0, radius]`.
    pub fn lipschitz(&self, radius: f64) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let points: Vec<f64> = sample_points(radius).collect();
        points
            .windows(2)
            .map(|w| ((self.eval(w[1]) - self.eval(w[0])) / (w[1] - w[0])).abs())
            .fold(0.0, f64::max)
    }
}

fn sample_points(radius: f64) -> impl Iterator<Item = f64> {
    const SAMPLES: usize = 8192;
    (0..=SAMPLES).map(move |i| radius * i as f64 / SAMPLES as f64)
}

/// Element contribution `∫ V φ_m φ_n r dr` over `[a, b]` by the three-point
/// rule, i.e. the exact integral against the quadratic interpolant of `V`
/// through the Gauss nodes.
pub fn potential_element_term(
    potential: &RadialPotential,
    a: f64,
    b: f64,
    m: LocalHat,
    n: LocalHat,
) -> f64 {
    let h = b - a;
    quad_element(
        |r| potential.eval(r) * m.value(a, h, r) * n.value(a, h, r) * r,
        a,
        b,
    )
}

/// Quadratic through the three Gauss nodes of `[a, b]`, i.e. the
/// interpolant `V_h` on that element.
pub fn gauss_interpolant(potential: &RadialPotential, a: f64, b: f64, r: f64) -> f64 {
    let x = GaussRule3::nodes(a, b);
    let y = x.map(|t| potential.eval(t));
    let mut acc = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for k in 0..3 {
            if k != i {
                basis *= (r - x[k]) / (x[i] - x[k]);
            }
        }
        acc += y[i] * basis;
    }
    acc
}

/// Monotonicity-preserving cubic Hermite interpolation (Fritsch–Carlson).
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Table("need at least two (r, V) rows".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite entry".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("radii must be strictly increasing".into()));
        }
        let n = x.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secants[i];
            let beta = slopes[i + 1] / secants[i];
            let norm = alpha * alpha + beta * beta;
            if norm > 9.0 {
                let tau = 3.0 / norm.sqrt();
                slopes[i] = tau * alpha * secants[i];
                slopes[i + 1] = tau * beta * secants[i];
            }
        }
        Ok(Self { x, y, slopes })
    }

    fn check_covers(&self, radius: f64) -> Result<()> {
        let (lo, hi) = (self.x[0], self.x[self.x.len() - 1]);
        if lo > 0.0 || hi < radius {
            return Err(Error::Table(format!(
                "table covers [{lo}, {hi}] but [0, {radius}] is required"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= r) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (r - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}
