//! Synthesis of the trial field
//! `u(x) = α₀ᶜ u₀(r) + Σ_j u_j(r) (αⱼᶜ cos jθ + αⱼˢ sin jθ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::radial_fem::{RadialAssembler, RadialBasis};

/// Piecewise-linear interpolation of the nodal values.
pub fn eval_radial(basis: &RadialBasis, r: f64) -> Result<f64> {
    let radius = basis.grid.radius();
    if !(0.0..=radius).contains(&r) {
        return Err(Error::OutOfRange { r, radius });
    }
    let (e, t) = locate(basis.grid.h(), basis.grid.elements(), r);
    Ok((1.0 - t) * basis.values[e] + t * basis.values[e + 1])
}

fn locate(h: f64, elements: usize, r: f64) -> (usize, f64) {
    let e = ((r / h) as usize).min(elements - 1);
    (e, (r - e as f64 * h) / h)
}

/// Coefficients ordered `(α₀ᶜ, α₁ᶜ, α₁ˢ, …, α_Jᶜ, α_Jˢ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector(pub Vec<f64>);

impl CoefficientVector {
    pub fn zeros(j_max: usize) -> Self {
        Self(vec![0.0; 2 * j_max + 1])
    }

    /// Unit vector for mode `(j, cos)` or `(j, sin)`; `j = 0` has no sine.
    pub fn mode(j_max: usize, j: usize, sine: bool) -> Self {
        let mut v = Self::zeros(j_max);
        v.0[column(j, sine)] = 1.0;
        v
    }

    pub fn j_max(&self) -> usize {
        (self.0.len() - 1) / 2
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Cosine block then sine block, as `(α₀ᶜ, …, α_Jᶜ, α₁ˢ, …, α_Jˢ)`.
    pub fn split_ordering(&self) -> Vec<f64> {
        let j_max = self.j_max();
        let mut out = Vec::with_capacity(self.0.len());
        out.extend((0..=j_max).map(|j| self.0[column(j, false)]));
        out.extend((1..=j_max).map(|j| self.0[column(j, true)]));
        out
    }
}

/// Column index of mode `(j, cos)` / `(j, sin)`.
pub fn column(j: usize, sine: bool) -> usize {
    match (j, sine) {
        (0, false) => 0,
        (0, true) => panic!("j = 0 has no sine mode"),
        (j, false) => 2 * j - 1,
        (j, true) => 2 * j,
    }
}

/// Radial basis functions `u_0..u_J` for one `λ` on a shared grid.
#[derive(Clone, Debug)]
pub struct BasisBundle {
    pub lambda: f64,
    pub bases: Vec<RadialBasis>,
}

impl BasisBundle {
    pub fn new(assembler: &RadialAssembler, j_max: usize, lambda: f64) -> Result<Self> {
        let bases = (0..=j_max)
            .into_par_iter()
            .map(|j| assembler.basis(j, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambda, bases })
    }

    pub fn j_max(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn columns(&self) -> usize {
        2 * self.j_max() + 1
    }

    pub fn radius(&self) -> f64 {
        self.bases[0].grid.radius()
    }

    /// `u_j(r)` for every `j`, sharing one element lookup.
    pub fn radial_values(&self, r: f64, out: &mut [f64]) -> Result<()> {
        let grid = &self.bases[0].grid;
        let radius = grid.radius();
        if !(0.0..=radius).contains(&r) {
            return Err(Error::OutOfRange { r, radius });
        }
        let (e, t) = locate(grid.h(), grid.elements(), r);
        for (o, b) in out.iter_mut().zip(&self.bases) {
            *o = (1.0 - t) * b.values[e] + t * b.values[e + 1];
        }
        Ok(())
    }

    /// Mode values `u_j(r) cos jθ`, `u_j(r) sin jθ` in coefficient order.
    pub fn mode_values(&self, p: Point, out: &mut [f64]) -> Result<()> {
        let r = p[0].hypot(p[1]);
        let theta = if r == 0.0 { 0.0 } else { p[1].atan2(p[0]) };
        self.mode_values_polar(r, theta, out)
    }

    pub fn mode_values_polar(&self, r: f64, theta: f64, out: &mut [f64]) -> Result<()> {
        let j_max = self.j_max();
        let mut radial = vec![0.0; j_max + 1];
        self.radial_values(r, &mut radial)?;
        out[0] = radial[0];
        for j in 1..=j_max {
            let (s, c) = (j as f64 * theta).sin_cos();
            out[2 * j - 1] = radial[j] * c;
            out[2 * j] = radial[j] * s;
        }
        Ok(())
    }
}

pub fn eval_field(bundle: &BasisBundle, alpha: &CoefficientVector, p: Point) -> Result<f64> {
    let r = p[0].hypot(p[1]);
    let theta = if r == 0.0 { 0.0 } else { p[1].atan2(p[0]) };
    eval_field_polar(bundle, alpha, r, theta)
}

pub fn eval_field_polar(bundle: &BasisBundle, alpha: &CoefficientVector, r: f64, theta: f64) -> Result<f64> {
    if alpha.0.len() != bundle.columns() {
        return Err(Error::InvalidParameter(format!(
            "coefficient vector has length {}, bundle needs {}",
            alpha.0.len(),
            bundle.columns()
        )));
    }
    let mut modes = vec![0.0; bundle.columns()];
    bundle.mode_values_polar(r, theta, &mut modes)?;
    Ok(modes.iter().zip(&alpha.0).map(|(m, a)| m * a).sum())
}

/// Field on the polar grid `r_k = k R / n_r` (`k = 0..=n_r`),
/// `θ_m = 2π m / n_θ` (`m = 0..n_θ`), row-major with `θ` fastest.
#[derive(Clone, Debug)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
}

impl PolarGrid {
    pub fn value(&self, k: usize, m: usize) -> f64 {
        self.values[k * self.angles.len() + m]
    }

    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "r,theta,value")?;
        for (k, r) in self.radii.iter().enumerate() {
            for (m, t) in self.angles.iter().enumerate() {
                writeln!(out, "{r:.16e},{t:.16e},{:.16e}", self.value(k, m))?;
            }
        }
        Ok(())
    }
}

pub fn sample_grid(bundle: &BasisBundle, alpha: &CoefficientVector, n_r: usize, n_theta: usize) -> Result<PolarGrid> {
    if n_r < 2 || n_theta < 2 {
        return Err(Error::InvalidParameter("polar grid needs at least 2 points per direction".into()));
    }
    let radius = bundle.radius();
    let radii: Vec<f64> = (0..=n_r)
        .map(|k| if k == n_r { radius } else { k as f64 * radius / n_r as f64 })
        .collect();
    let angles: Vec<f64> = (0..n_theta)
        .map(|m| std::f64::consts::TAU * m as f64 / n_theta as f64)
        .collect();
    let mut values = Vec::with_capacity(radii.len() * angles.len());
    for &r in &radii {
        for &t in &angles {
            values.push(eval_field_polar(bundle, alpha, r, t)?);
        }
    }
    Ok(PolarGrid { radii, angles, values })
}
