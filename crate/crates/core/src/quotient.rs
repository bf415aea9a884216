//! Collocation matrices and minimisation of the boundary-to-interior quotient
//! `F(α) = ‖M_∂ α‖ / ‖M_Ω α‖`.
//!
//! With the thin QR factorisation `[M_∂; M_Ω] = [Q_∂; Q_Ω] R`, substituting
//! `β = R α` turns the quotient into `‖Q_∂ β‖ / ‖Q_Ω β‖` with
//! `‖Q_∂ β‖² + ‖Q_Ω β‖² = ‖β‖²`, so its minimum is `σ₁ / √(1 - σ₁²)` where
//! `σ₁` is the smallest singular value of `Q_∂`.

use faer::linalg::triangular_solve::solve_upper_triangular_in_place;
use faer::{Mat, MatRef, Par};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BasisBundle, CoefficientVector};
use crate::geometry::{BoundaryNodeSet, InteriorSampleSet, Point};

#[derive(Clone, Debug)]
pub struct CollocationMatrices {
    /// `N_∂ × (2J+1)`, rows scaled by `√weight_i`.
    pub boundary: Mat<f64>,
    /// `N_Ω × (2J+1)`, rows scaled by `√(|Ω| / N_Ω)`.
    pub interior: Mat<f64>,
}

impl CollocationMatrices {
    pub fn columns(&self) -> usize {
        self.boundary.ncols()
    }

    pub fn boundary_norm(&self, alpha: &CoefficientVector) -> f64 {
        apply_norm(self.boundary.as_ref(), &alpha.0)
    }

    pub fn interior_norm(&self, alpha: &CoefficientVector) -> f64 {
        apply_norm(self.interior.as_ref(), &alpha.0)
    }

    pub fn quotient(&self, alpha: &CoefficientVector) -> Result<f64> {
        if alpha.0.iter().all(|&a| a == 0.0) {
            return Err(Error::ZeroCoefficients);
        }
        Ok(self.boundary_norm(alpha) / self.interior_norm(alpha))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            boundary: Mat::from_fn(self.boundary.nrows(), self.boundary.ncols(), |i, j| c * self.boundary[(i, j)]),
            interior: Mat::from_fn(self.interior.nrows(), self.interior.ncols(), |i, j| c * self.interior[(i, j)]),
        }
    }

    pub fn bytes(&self) -> usize {
        8 * (self.boundary.nrows() + self.interior.nrows()) * self.columns()
    }
}

fn apply_norm(m: MatRef<'_, f64>, alpha: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        let row: f64 = (0..m.ncols()).map(|j| m[(i, j)] * alpha[j]).sum();
        acc += row * row;
    }
    acc.sqrt()
}

/// Radius of `p`, snapped onto the enclosing circle when rounding pushes a
/// boundary point a few ulps outside it.
fn polar(p: Point, radius: f64) -> (f64, f64) {
    let mut r = p[0].hypot(p[1]);
    if r > radius && r <= radius * (1.0 + 1e-12) {
        r = radius;
    }
    let theta = if r == 0.0 { 0.0 } else { p[1].atan2(p[0]) };
    (r, theta)
}

fn fill_rows(bundle: &BasisBundle, points: impl Iterator<Item = (Point, f64)>, rows: usize) -> Result<Mat<f64>> {
    let cols = bundle.columns();
    let mut m = Mat::<f64>::zeros(rows, cols);
    let mut modes = vec![0.0; cols];
    for (i, (p, scale)) in points.enumerate() {
        let (r, theta) = polar(p, bundle.radius());
        bundle.mode_values_polar(r, theta, &mut modes)?;
        for (j, v) in modes.iter().enumerate() {
            m[(i, j)] = scale * v;
        }
    }
    Ok(m)
}

pub fn build_matrices(
    bundle: &BasisBundle,
    bnodes: &BoundaryNodeSet,
    ipoints: &InteriorSampleSet,
) -> Result<CollocationMatrices> {
    let cols = bundle.columns();
    for rows in [bnodes.len(), ipoints.len()] {
        if rows <= cols {
            return Err(Error::InsufficientPoints { rows, columns: cols });
        }
    }
    let boundary = fill_rows(
        bundle,
        bnodes.nodes.iter().map(|n| (n.point, n.weight.sqrt())),
        bnodes.len(),
    )?;
    let scale = (ipoints.area / ipoints.len() as f64).sqrt();
    let interior = fill_rows(bundle, ipoints.points.iter().map(|&p| (p, scale)), ipoints.len())?;
    Ok(CollocationMatrices { boundary, interior })
}

/// Treatment of ill-conditioned directions of the triangular factor `R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "threshold", rename_all = "kebab-case")]
pub enum Regularization {
    /// Use `R` as is; rank deficiency is an error.
    #[default]
    None,
    /// Drop directions with singular value below the threshold.
    Absolute(f64),
    /// Drop directions with singular value below `threshold · σ_max(R)`.
    Relative(f64),
}

impl From<Option<f64>> for Regularization {
    fn from(value: Option<f64>) -> Self {
        value.map_or(Regularization::None, Regularization::Absolute)
    }
}

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    pub regularization: Regularization,
    /// Number of minimisers to return, smallest `σ` first.
    pub vectors: usize,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self {
            regularization: Regularization::None,
            vectors: usize::MAX,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientSolution {
    /// Singular values of the (restricted) `Q_∂`, ascending, clamped to `[0, 1]`.
    pub sigmas: Vec<f64>,
    /// `alphas[k]` attains `sigmas[k]`; `‖R α_k‖ = 1`.
    pub alphas: Vec<CoefficientVector>,
    pub f_min: f64,
    pub regularized_rank: usize,
    /// `σ_max(R) / σ_min(R)` over the retained directions, or an estimate of
    /// the condition number of `R` when no regularisation is applied.
    pub condition: f64,
}

pub fn quotient_from_sigma(sigma: f64) -> f64 {
    let s = sigma.clamp(0.0, 1.0);
    s / (1.0 - s * s).sqrt()
}

/// Thin QR factors `(Q, R)` of the stacked matrix `[M_∂; M_Ω]`; the first
/// `N_∂` rows of `Q` form `Q_∂`.
pub fn orthonormal_factor(mats: &CollocationMatrices) -> (Mat<f64>, Mat<f64>) {
    sequential_factorizations();
    let (mb, mi, n) = (mats.boundary.nrows(), mats.interior.nrows(), mats.columns());
    let stacked = Mat::<f64>::from_fn(mb + mi, n, |i, j| {
        if i < mb {
            mats.boundary[(i, j)]
        } else {
            mats.interior[(i - mb, j)]
        }
    });
    let qr = stacked.qr();
    (qr.compute_thin_Q(), qr.thin_R().to_owned())
}

/// Pins faer to sequential kernels; threads are spent on the `λ` grid.
fn sequential_factorizations() {
    faer::set_global_parallelism(Par::Seq);
}

pub fn minimize_quotient(mats: &CollocationMatrices, reg_threshold: Option<f64>) -> Result<QuotientSolution> {
    minimize_quotient_with(
        mats,
        &QuotientOptions {
            regularization: reg_threshold.into(),
            ..Default::default()
        },
    )
}

pub fn minimize_quotient_with(mats: &CollocationMatrices, options: &QuotientOptions) -> Result<QuotientSolution> {
    let (mb, mi, n) = (mats.boundary.nrows(), mats.interior.nrows(), mats.columns());
    for rows in [mb, mi] {
        if rows <= n {
            return Err(Error::InsufficientPoints { rows, columns: n });
        }
    }
    let (q, r) = orthonormal_factor(mats);
    let q_b = q.get(0..mb, ..);

    // Coordinates `β` for the boundary block, and the map back to `α`.
    enum Back {
        Triangular(Mat<f64>),
        Compressed { v: Mat<f64>, inv_sigma: Vec<f64> },
    }

    let (q_boundary, back, condition) = match options.regularization {
        Regularization::None => {
            let condition = condition_estimate(r.as_ref());
            if !(condition <= 1e14) {
                return Err(Error::RankDeficient { condition });
            }
            (q_b.to_owned(), Back::Triangular(r), condition)
        }
        reg @ (Regularization::Absolute(_) | Regularization::Relative(_)) => {
            let svd = r.svd().map_err(|_| Error::Decomposition)?;
            let s = svd.S().column_vector();
            let threshold = match reg {
                Regularization::Relative(t) => t * s[0],
                Regularization::Absolute(t) => t,
                Regularization::None => unreachable!(),
            };
            let keep = (0..n).take_while(|&k| s[k] >= threshold).count();
            if keep == 0 {
                return Err(Error::RankDeficient { condition: f64::INFINITY });
            }
            let condition = s[0] / s[keep - 1];
            let u_keep = svd.U().get(.., 0..keep);
            let q_boundary = q_b * u_keep;
            let v = svd.V().get(.., 0..keep).to_owned();
            let inv_sigma = (0..keep).map(|k| 1.0 / s[k]).collect();
            (q_boundary, Back::Compressed { v, inv_sigma }, condition)
        }
    };
    let rank = q_boundary.ncols();

    let vectors = options.vectors.min(rank);
    let (sigmas, betas) = if vectors == 0 {
        let mut s = q_boundary.singular_values().map_err(|_| Error::Decomposition)?;
        s.reverse();
        (s, Vec::new())
    } else {
        let svd = q_boundary.thin_svd().map_err(|_| Error::Decomposition)?;
        let s = svd.S().column_vector();
        let sigmas: Vec<f64> = (0..rank).rev().map(|k| s[k]).collect();
        let v = svd.V();
        let betas: Vec<Vec<f64>> = (0..vectors)
            .map(|k| {
                let col = rank - 1 - k;
                (0..rank).map(|i| v[(i, col)]).collect()
            })
            .collect();
        (sigmas, betas)
    };
    let sigmas: Vec<f64> = sigmas.into_iter().map(|s| s.clamp(0.0, 1.0)).collect();

    let alphas = match back {
        Back::Triangular(r) => {
            if betas.is_empty() {
                Vec::new()
            } else {
                let mut rhs = Mat::<f64>::from_fn(n, betas.len(), |i, k| betas[k][i]);
                solve_upper_triangular_in_place(r.as_ref(), rhs.as_mut(), Par::Seq);
                (0..betas.len())
                    .map(|k| CoefficientVector((0..n).map(|i| rhs[(i, k)]).collect()))
                    .collect()
            }
        }
        Back::Compressed { v, inv_sigma } => betas
            .iter()
            .map(|beta| {
                let scaled: Vec<f64> = beta.iter().zip(&inv_sigma).map(|(b, s)| b * s).collect();
                CoefficientVector(
                    (0..n)
                        .map(|i| (0..rank).map(|k| v[(i, k)] * scaled[k]).sum())
                        .collect(),
                )
            })
            .collect(),
    };

    Ok(QuotientSolution {
        f_min: quotient_from_sigma(sigmas[0]),
        sigmas,
        alphas,
        regularized_rank: rank,
        condition,
    })
}

/// Lower bound on the 2-norm condition number of an upper triangular matrix:
/// `‖R‖_F / √n` against `‖R⁻¹ x‖ / ‖x‖` for a few fixed pseudo-random `x`.
fn condition_estimate(r: MatRef<'_, f64>) -> f64 {
    let n = r.ncols();
    let mut frob = 0.0;
    for j in 0..n {
        for i in 0..=j {
            frob += r[(i, j)] * r[(i, j)];
        }
    }
    let probes = 3;
    let mut x = Mat::<f64>::from_fn(n, probes, |i, k| (((i * 7919 + k * 104_729) % 1013) as f64 / 1013.0) - 0.5);
    let norms: Vec<f64> = (0..probes)
        .map(|k| (0..n).map(|i| x[(i, k)] * x[(i, k)]).sum::<f64>().sqrt())
        .collect();
    solve_upper_triangular_in_place(r, x.as_mut(), Par::Seq);
    let inv = (0..probes)
        .map(|k| (0..n).map(|i| x[(i, k)] * x[(i, k)]).sum::<f64>().sqrt() / norms[k])
        .fold(0.0, f64::max);
    let diag_ratio = {
        let d: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
        d.iter().cloned().fold(0.0, f64::max) / d.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let estimate = (frob / (n as f64).sqrt()) * inv;
    if estimate.is_finite() { estimate.max(diag_ratio) } else { f64::INFINITY }
}

/// `‖M_∂ α‖ / ‖M_Ω α‖` evaluated point by point, without a factorisation.
pub fn quotient_at(
    bundle: &BasisBundle,
    alpha: &CoefficientVector,
    bnodes: &BoundaryNodeSet,
    ipoints: &InteriorSampleSet,
) -> Result<f64> {
    if alpha.0.iter().all(|&a| a == 0.0) {
        return Err(Error::ZeroCoefficients);
    }
    if alpha.0.len() != bundle.columns() {
        return Err(Error::InvalidParameter(format!(
            "coefficient vector has length {}, bundle needs {}",
            alpha.0.len(),
            bundle.columns()
        )));
    }
    let mut modes = vec![0.0; bundle.columns()];
    let mut value = |p: Point| -> Result<f64> {
        let (r, theta) = polar(p, bundle.radius());
        bundle.mode_values_polar(r, theta, &mut modes)?;
        Ok(modes.iter().zip(&alpha.0).map(|(m, a)| m * a).sum())
    };
    let mut boundary = 0.0;
    for n in &bnodes.nodes {
        boundary += n.weight * value(n.point)?.powi(2);
    }
    let mut interior = 0.0;
    for &p in &ipoints.points {
        interior += value(p)?.powi(2);
    }
    interior *= ipoints.area / ipoints.len() as f64;
    Ok((boundary / interior).sqrt())
}
