//! Weighted 1D finite elements for the radial Bessel-type equation
//!
//! `-u'' - u'/r + (j²/r² + V) u = λ u` on `(0, R]`, in the weak form
//! `a_j(u, w) + (V_h u, w)_r = λ (u, w)_r` for all interior test hats `w`.
//!
//! Trial hats are `φ_1..φ_N` for `j >= 1` (functions vanish at the origin)
//! and `φ_0..φ_N` for `j = 0`; test hats drop `φ_N`. The resulting
//! rectangular tridiagonal system has a one-dimensional null space whose
//! `L_r`-normalised generator is the radial basis function.

use crate::error::{Error, Result};
use crate::potential::{RadialPotential, potential_element_term};

/// Restriction of a hat function to one element `[a, a + h]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalHat {
    /// Equals 1 at the left node.
    Left,
    /// Equals 1 at the right node.
    Right,
}

impl LocalHat {
    pub fn value(self, a: f64, h: f64, r: f64) -> f64 {
        match self {
            LocalHat::Left => (a + h - r) / h,
            LocalHat::Right => (r - a) / h,
        }
    }

    pub fn slope(self, h: f64) -> f64 {
        match self {
            LocalHat::Left => -1.0 / h,
            LocalHat::Right => 1.0 / h,
        }
    }
}

/// Equidistant grid `r_i = i h` on `[0, R]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    radius: f64,
    elements: usize,
}

impl Grid1D {
    pub fn new(radius: f64, elements: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid radius must be positive, got {radius}")));
        }
        if elements < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 elements, got {elements}")));
        }
        Ok(Self { radius, elements })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn h(&self) -> f64 {
        self.radius / self.elements as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.elements {
            self.radius
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.elements).map(|i| self.node(i))
    }
}

/// `∫ φ_m φ_n r dr` over `[a, b]`.
pub fn mass_element(a: f64, b: f64, m: LocalHat, n: LocalHat) -> f64 {
    let h = b - a;
    match (m, n) {
        (LocalHat::Left, LocalHat::Left) => h * (a / 3.0 + h / 12.0),
        (LocalHat::Right, LocalHat::Right) => h * (a / 3.0 + h / 4.0),
        _ => h * (a / 6.0 + h / 12.0),
    }
}

/// `∫ φ_m φ_n / r dr` over `[a, b]` with `a > 0`, written as `t · I(t)` with
/// `t = h / a` so that thin elements far from the origin do not cancel.
fn inverse_r_element(a: f64, b: f64) -> [f64; 3] {
    let h = b - a;
    let t = h / a;
    let (ll, lr, rr) = if t <= 0.25 {
        let (mut ll, mut lr, mut rr) = (0.0, 0.0, 0.0);
        let mut power = 1.0;
        for k in 0..48 {
            let n = k as f64;
            ll += power * 2.0 / ((n + 1.0) * (n + 2.0) * (n + 3.0));
            lr += power / ((n + 2.0) * (n + 3.0));
            rr += power / (n + 3.0);
            power *= -t;
            if power.abs() < 1e-18 {
                break;
            }
        }
        (ll, lr, rr)
    } else {
        let i0 = t.ln_1p() / t;
        let i1 = (1.0 - i0) / t;
        let i2 = (0.5 - i1) / t;
        (i0 - 2.0 * i1 + i2, i1 - i2, i2)
    };
    [t * ll, t * lr, t * rr]
}

/// `∫ φ_m' φ_n' r dr + j² ∫ φ_m φ_n / r dr` over `[a, b]`, in closed form.
///
/// On the first element (`a = 0`) only the right hat is admissible when
/// `j >= 1`; its `1/r` integral is `∫_0^h r/h² dr = 1/2`.
pub fn stiffness_element(j: usize, a: f64, b: f64, m: LocalHat, n: LocalHat) -> Result<f64> {
    let h = b - a;
    if !(h > 0.0) || a < 0.0 {
        return Err(Error::InvalidParameter(format!("bad element [{a}, {b}]")));
    }
    let grad = m.slope(h) * n.slope(h) * 0.5 * (a + b) * h;
    if j == 0 {
        return Ok(grad);
    }
    let j2 = (j * j) as f64;
    if a == 0.0 {
        return match (m, n) {
            (LocalHat::Right, LocalHat::Right) => Ok(grad + 0.5 * j2),
            _ => Err(Error::SingularElement { a, b, j }),
        };
    }
    let [ll, lr, rr] = inverse_r_element(a, b);
    let inv = match (m, n) {
        (LocalHat::Left, LocalHat::Left) => ll,
        (LocalHat::Right, LocalHat::Right) => rr,
        _ => lr,
    };
    Ok(grad + j2 * inv)
}

/// Per-element integrals that do not depend on `j` or `λ`, stored as
/// `[left-left, left-right, right-right]`.
#[derive(Clone, Debug)]
struct ElementTable {
    grad: Vec<[f64; 3]>,
    inv_r: Vec<[f64; 3]>,
    mass: Vec<[f64; 3]>,
    potential: Vec<[f64; 3]>,
}

/// Assembles radial systems for one potential on one grid, for any `(j, λ)`.
#[derive(Clone, Debug)]
pub struct RadialAssembler {
    grid: Grid1D,
    table: ElementTable,
}

impl RadialAssembler {
    /// Errors if `h` is not below the coercivity threshold `1 / (2 L_V)`.
    pub fn new(potential: &RadialPotential, grid: Grid1D) -> Result<Self> {
        let lipschitz = potential.lipschitz(grid.radius());
        Self::with_lipschitz(potential, grid, lipschitz)
    }

    pub fn with_lipschitz(potential: &RadialPotential, grid: Grid1D, lipschitz: f64) -> Result<Self> {
        let h = grid.h();
        if lipschitz > 0.0 {
            let threshold = 1.0 / (2.0 * lipschitz);
            if h >= threshold {
                return Err(Error::CoercivityViolated { h, threshold, lipschitz });
            }
        }
        use LocalHat::{Left, Right};
        let n = grid.elements();
        let mut table = ElementTable {
            grad: Vec::with_capacity(n),
            inv_r: Vec::with_capacity(n),
            mass: Vec::with_capacity(n),
            potential: Vec::with_capacity(n),
        };
        for e in 0..n {
            let (a, b) = (grid.node(e), grid.node(e + 1));
            let g = 0.5 * (a + b) / (b - a);
            table.grad.push([g, -g, g]);
            table.inv_r.push(if e == 0 {
                [f64::NAN, f64::NAN, 0.5]
            } else {
                inverse_r_element(a, b)
            });
            table.mass.push([
                mass_element(a, b, Left, Left),
                mass_element(a, b, Left, Right),
                mass_element(a, b, Right, Right),
            ]);
            table.potential.push([
                potential_element_term(potential, a, b, Left, Left),
                potential_element_term(potential, a, b, Left, Right),
                potential_element_term(potential, a, b, Right, Right),
            ]);
        }
        Ok(Self { grid, table })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Element matrix of `a_j + (V_h ·,·)_r - λ (·,·)_r`.
    fn element(&self, e: usize, j2: f64, lambda: f64, part: usize) -> f64 {
        let inv = if j2 == 0.0 { 0.0 } else { j2 * self.table.inv_r[e][part] };
        self.table.grad[e][part] + inv + self.table.potential[e][part] - lambda * self.table.mass[e][part]
    }

    /// Same as [`assemble`].
    pub fn system(&self, j: usize, lambda: f64) -> Result<BandedSystem> {
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be >= 1, got {lambda}")));
        }
        let n = self.grid.elements();
        let j2 = (j * j) as f64;
        let first = if j == 0 { 0 } else { 1 };
        let count = n + 1 - first;
        let mut diag = vec![0.0; count];
        let mut off = vec![0.0; count - 1];
        for e in 0..n {
            // element e joins global nodes e and e + 1
            let right = e + 1 - first;
            diag[right] += self.element(e, j2, lambda, 2);
            if e >= first {
                let left = e - first;
                diag[left] += self.element(e, j2, lambda, 0);
                off[left] = self.element(e, j2, lambda, 1);
            }
        }
        Ok(BandedSystem {
            j,
            lambda,
            first_node: first,
            diag,
            off,
        })
    }

    /// Same as [`basis_function`].
    pub fn basis(&self, j: usize, lambda: f64) -> Result<RadialBasis> {
        let system = self.system(j, lambda)?;
        let null = null_vector(&system)?;
        let mut values = vec![0.0; self.grid.elements() + 1];
        values[system.first_node..].copy_from_slice(&null.coeffs);
        let norm = weighted_norm(&self.grid, &values);
        let last = values[values.len() - 1];
        let peak = values.iter().fold(0.0_f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        let sign = if last.abs() >= 1e-12 * peak.abs() {
            last.signum()
        } else {
            peak.signum()
        };
        let scale = sign / norm;
        values.iter_mut().for_each(|v| *v *= scale);
        Ok(RadialBasis {
            j,
            lambda,
            grid: self.grid.clone(),
            values,
            residual: null.residual,
        })
    }
}

/// Rectangular tridiagonal matrix `S` with `S[m, n] = a_j(φ_n, φ_m) +
/// (V_h φ_n, φ_m)_r - λ (φ_n, φ_m)_r`.
///
/// Columns are the trial hats `φ_first..φ_N`, rows the test hats
/// `φ_first..φ_{N-1}`. The band is stored as the symmetric square matrix on
/// the trial hats; the last row of that square matrix is not part of `S`.
#[derive(Clone, Debug)]
pub struct BandedSystem {
    pub j: usize,
    pub lambda: f64,
    /// Global index of the first trial hat: 0 for `j = 0`, 1 otherwise.
    pub first_node: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl BandedSystem {
    pub fn cols(&self) -> usize {
        self.diag.len()
    }

    pub fn rows(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn entry(&self, m: usize, n: usize) -> f64 {
        assert!(m < self.rows() && n < self.cols());
        match m.abs_diff(n) {
            0 => self.diag[m],
            1 => self.off[m.min(n)],
            _ => 0.0,
        }
    }

    /// `S c` for a coefficient vector over the trial hats.
    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.cols());
        (0..self.rows())
            .map(|m| {
                let mut acc = self.diag[m] * c[m] + self.off[m] * c[m + 1];
                if m > 0 {
                    acc += self.off[m - 1] * c[m - 1];
                }
                acc
            })
            .collect()
    }
}

/// Build the radial system for one `(j, λ)`.
pub fn assemble(j: usize, lambda: f64, potential: &RadialPotential, grid: &Grid1D) -> Result<BandedSystem> {
    RadialAssembler::new(potential, grid.clone())?.system(j, lambda)
}

#[derive(Clone, Debug)]
pub struct NullVector {
    /// Unit Euclidean norm.
    pub coeffs: Vec<f64>,
    /// `‖S c‖`.
    pub residual: f64,
}

/// Null vector of the rectangular tridiagonal system.
///
/// Plane rotations applied from the right annihilate the superdiagonal one
/// row at a time (an LQ sweep), leaving `S G = [L | 0]`; the null vector is
/// `G e_last`. Each rotation only mixes two columns, so every row keeps a
/// backward error proportional to its own norm, which matters here because
/// the `j²/r` term makes rows near the origin orders of magnitude larger
/// than rows near `R`. Cost is O(N).
pub fn null_vector(system: &BandedSystem) -> Result<NullVector> {
    let rows = system.rows();
    let (diag, off) = (&system.diag, &system.off);
    let mut cosines = Vec::with_capacity(rows);
    let mut sines = Vec::with_capacity(rows);
    let mut worst_ratio = f64::INFINITY;
    let mut w = diag[0];
    let mut prev_cos = 1.0;
    for k in 0..rows {
        let sup = off[k];
        let r = w.hypot(sup);
        let row_norm = {
            let mut s = diag[k] * diag[k] + sup * sup;
            if k > 0 {
                s += off[k - 1] * off[k - 1];
            }
            s.sqrt()
        };
        worst_ratio = worst_ratio.min(r / row_norm);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (w / r, sup / r) };
        cosines.push(c);
        sines.push(s);
        if k + 1 < rows {
            w = -s * prev_cos * off[k] + c * diag[k + 1];
        }
        prev_cos = c;
    }
    if !(worst_ratio > 1e-10) {
        return Err(Error::DegenerateNullSpace {
            j: system.j,
            lambda: system.lambda,
            ratio: worst_ratio,
        });
    }

    let cols = system.cols();
    let mut coeffs = vec![0.0; cols];
    coeffs[cols - 1] = cosines[rows - 1];
    let mut product = 1.0;
    for k in (0..rows).rev() {
        product *= -sines[k];
        let c_prev = if k == 0 { 1.0 } else { cosines[k - 1] };
        coeffs[k] = c_prev * product;
    }
    let residual = system.apply(&coeffs).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(NullVector { coeffs, residual })
}

/// `‖v‖_r` of the piecewise-linear function with nodal values `values`.
pub fn weighted_norm(grid: &Grid1D, values: &[f64]) -> f64 {
    use LocalHat::{Left, Right};
    let mut acc = 0.0;
    for e in 0..grid.elements() {
        let (a, b) = (grid.node(e), grid.node(e + 1));
        let (l, r) = (values[e], values[e + 1]);
        acc += l * l * mass_element(a, b, Left, Left)
            + 2.0 * l * r * mass_element(a, b, Left, Right)
            + r * r * mass_element(a, b, Right, Right);
    }
    acc.sqrt()
}

/// The finite element approximation of the radial basis function
/// `u_j^λ`, normalised to `‖u‖_r = 1`.
#[derive(Clone, Debug)]
pub struct RadialBasis {
    pub j: usize,
    pub lambda: f64,
    pub grid: Grid1D,
    /// Nodal values at `r_0..r_N`; `values[0] = 0` when `j >= 1`.
    pub values: Vec<f64>,
    /// `‖S c‖` of the unit-norm null vector before rescaling.
    pub residual: f64,
}

impl RadialBasis {
    pub fn norm_r(&self) -> f64 {
        weighted_norm(&self.grid, &self.values)
    }

    /// Writes `r,value` rows for inspection.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "r,value")?;
        for (r, v) in self.grid.nodes().zip(&self.values) {
            writeln!(out, "{r:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// Unit-norm basis function for `(j, λ)` with the sign fixed by
/// `u(R) >= 0` (or by the largest nodal value when `u(R)` vanishes).
pub fn basis_function(
    j: usize,
    lambda: f64,
    potential: &RadialPotential,
    grid: &Grid1D,
) -> Result<RadialBasis> {
    RadialAssembler::new(potential, grid.clone())?.basis(j, lambda)
}
