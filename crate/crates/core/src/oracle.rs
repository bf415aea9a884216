//! Independent reference computations.
//!
//! Nothing in here touches the finite element or collocation code paths:
//! the disk spectrum comes from Bessel zeros, the general radial spectrum
//! from a second-order finite-difference discretisation of the radial ODE,
//! and [`integrate`] is a plain adaptive Gauss–Kronrod rule used by tests
//! to check closed-form element integrals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::RadialPotential;

/// Bessel function of the first kind `J_n(x)` for `x >= 0`.
///
/// Ascending series where it does not cancel, Miller's backward recurrence
/// normalised by `J_0 + 2 Σ J_2k = 1` elsewhere. Absolute accuracy is
/// around 1e-14 for `x <= 50`; it degrades slowly beyond that.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j needs a finite x >= 0, got {x}");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if 0.25 * x * x < (n as f64) + 1.0 {
        return bessel_series(n, x);
    }
    bessel_miller(n, x)
}

fn bessel_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn bessel_miller(n: usize, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;

    let mut next = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut wanted = 0.0_f64;
    // `current` holds J_k (unnormalised) at the top of each iteration.
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / x) * current - next;
        next = current;
        current = prev;
        // current is now J_{k-1}
        if k - 1 == n {
            wanted = current;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += current;
    wanted / norm
}

/// `J_n'(x)` from the recurrence `2 J_n' = J_{n-1} - J_{n+1}`.
pub fn bessel_j_prime(n: usize, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

/// k-th positive zero (k >= 1) of `J_n`, bracketed by a coarse sign scan
/// and polished by bisection.
pub fn bessel_zero(n: usize, k: usize) -> f64 {
    assert!(k >= 1, "zero index starts at 1");
    // j_{n,1} > n for every order, and consecutive zeros are more than 2 apart.
    let step = 0.2;
    let mut a = if n == 0 { 0.5 } else { n as f64 };
    let mut fa = bessel_j(n, a);
    let mut found = 0;
    loop {
        let b = a + step;
        let fb = bessel_j(n, b);
        if fb == 0.0 {
            found += 1;
            if found == k {
                return b;
            }
        } else if fa.signum() != fb.signum() && fa != 0.0 {
            found += 1;
            if found == k {
                return bisect(|t| bessel_j(n, t), a, b);
            }
        }
        a = b;
        fa = fb;
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskEigenvalue {
    pub lambda: f64,
    /// Angular order `n` of the Bessel function.
    pub order: usize,
    /// Zero index `k >= 1`.
    pub index: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskSpectrum {
    pub radius: f64,
    pub potential: f64,
    pub entries: Vec<DiskEigenvalue>,
}

impl DiskSpectrum {
    /// Number of eigenvalues counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Closest entry to `lambda`.
    pub fn nearest(&self, lambda: f64) -> Option<&DiskEigenvalue> {
        self.entries.iter().min_by(|a, b| {
            (a.lambda - lambda)
                .abs()
                .total_cmp(&(b.lambda - lambda).abs())
        })
    }
}

/// Dirichlet spectrum of `-Δ + c` on the disk of radius `radius`, all
/// eigenvalues `c + (j_{n,k}/radius)^2 <= upper`.
pub fn disk_spectrum(radius: f64, potential: f64, upper: f64) -> Result<DiskSpectrum> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
    }
    if !(potential >= 1.0) || !(upper > potential) {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= c < K, got c = {potential}, K = {upper}"
        )));
    }
    let limit = radius * (upper - potential).sqrt();
    let mut entries = Vec::new();
    let mut order = 0;
    // j_{n,1} > n, so no order beyond `limit` contributes.
    while (order as f64) <= limit {
        let mut index = 1;
        loop {
            let zero = bessel_zero(order, index);
            if zero > limit {
                break;
            }
            entries.push(DiskEigenvalue {
                lambda: potential + (zero / radius).powi(2),
                order,
                index,
                multiplicity: if order == 0 { 1 } else { 2 },
            });
            index += 1;
        }
        order += 1;
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(DiskSpectrum {
        radius,
        potential,
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FdSpectrum {
    pub j: usize,
    pub n_fd: usize,
    pub eigenvalues: Vec<f64>,
}

/// Symmetric tridiagonal matrix stored by diagonal and first off-diagonal.
#[derive(Clone, Debug)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            pivot = self.diag[i] - x - if i == 0 { 0.0 } else { coupling / pivot };
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lowest `count` eigenvalues by bisection on the Sturm count.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let n = self.diag.len();
        let count = count.min(n);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        let mut out = Vec::with_capacity(count);
        let mut floor = lo;
        for k in 0..count {
            let (mut a, mut b) = (floor, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            out.push(value);
            floor = a;
        }
        out
    }
}

/// Lowest `count` Dirichlet eigenvalues of
/// `-u'' - u'/r + (j²/r² + V) u = λ u` on `(0, radius]`, `u(radius) = 0`.
///
/// `j >= 1` uses the vertex grid `r_i = i h` with `u(0) = 0`. `j = 0` uses the
/// staggered grid `r_i = (i - 1/2) h`, whose zero flux at `r = 0` encodes
/// `u'(0) = 0`, with a mirrored ghost value for the outer Dirichlet condition.
pub fn fd_radial_spectrum(
    j: usize,
    potential: &RadialPotential,
    radius: f64,
    n_fd: usize,
    count: usize,
) -> Result<FdSpectrum> {
    if n_fd < 100 {
        return Err(Error::InvalidParameter(format!("n_fd must be at least 100, got {n_fd}")));
    }
    let matrix = fd_radial_matrix(j, potential, radius, n_fd);
    Ok(FdSpectrum {
        j,
        n_fd,
        eigenvalues: matrix.lowest_eigenvalues(count),
    })
}

/// The symmetrised finite-difference matrix behind [`fd_radial_spectrum`].
pub fn fd_radial_matrix(
    j: usize,
    potential: &RadialPotential,
    radius: f64,
    n_fd: usize,
) -> SymTridiagonal {
    let h = radius / n_fd as f64;
    let h2 = h * h;
    let j2 = (j * j) as f64;
    // Weighted form: B u = λ diag(r) u, B symmetric. Return diag(r)^{-1/2} B diag(r)^{-1/2}.
    let (nodes, faces_left, faces_right): (Vec<f64>, Vec<f64>, Vec<f64>) = if j == 0 {
        let nodes: Vec<f64> = (1..=n_fd).map(|i| (i as f64 - 0.5) * h).collect();
        let left = (1..=n_fd).map(|i| (i - 1) as f64 * h).collect();
        let right = (1..=n_fd).map(|i| i as f64 * h).collect();
        (nodes, left, right)
    } else {
        let nodes: Vec<f64> = (1..n_fd).map(|i| i as f64 * h).collect();
        let left = (1..n_fd).map(|i| (i as f64 - 0.5) * h).collect();
        let right = (1..n_fd).map(|i| (i as f64 + 0.5) * h).collect();
        (nodes, left, right)
    };
    let n = nodes.len();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let r = nodes[i];
        let mut right_flux = faces_right[i];
        if j == 0 && i + 1 == n {
            // ghost u_{N+1} = -u_N doubles the outer face contribution
            right_flux *= 2.0;
        }
        let stiff = (faces_left[i] + right_flux) / h2;
        let reaction = r * (j2 / (r * r) + potential.eval(r));
        diag.push((stiff + reaction) / r);
        if i + 1 < n {
            off.push(-faces_right[i] / h2 / (r * nodes[i + 1]).sqrt());
        }
    }
    SymTridiagonal { diag, off }
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]` to an
/// absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = kronrod(f, a, b);
        if err <= tol || depth >= 40 || (b - a).abs() < 1e-14 * (a.abs() + b.abs()) {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1) + recurse(f, mid, b, 0.5 * tol, depth + 1)
    }
    recurse(&f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(7, 0.0), 0.0);
    }

    #[test]
    fn bessel_matches_reference_table() {
        // Reference values from an independent double-precision library.
        let table = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_55),
            (0, 10.0, -0.245_935_764_451_348_32),
            (5, 10.0, -0.234_061_528_186_793_6),
            (0, 50.0, 0.055_812_327_669_251_8),
            (3, 0.5, 0.002_563_729_994_587_244),
            (20, 7.0, 1.731_490_333_030_694e-8),
            (2, 30.0, 0.078_451_246_073_265_38),
            (40, 45.0, 0.126_600_621_268_202_04),
            (7, 49.5, 0.099_302_362_912_634_18),
        ];
        for (n, x, expected) in table {
            let got = bessel_j(n, x);
            assert!((got - expected).abs() < 1e-12, "J_{n}({x}) = {got}, expected {expected}");
        }
    }

    #[test]
    fn series_and_recurrence_agree_on_overlap() {
        for n in [0, 1, 3, 8] {
            for &x in &[0.3, 1.1, 2.0, 3.5] {
                let a = bessel_series(n, x);
                let b = bessel_miller(n, x);
                assert!((a - b).abs() < 1e-13, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn first_zero_of_j0_brackets_sign_change() {
        let z = 2.404_825_557_695_773;
        assert!(bessel_j(0, z).abs() < 1e-10);
        assert!(bessel_j(0, z - 1e-6) > 0.0 && bessel_j(0, z + 1e-6) < 0.0);
    }

    #[test]
    fn zeros_match_reference() {
        assert!((bessel_zero(0, 1) - 2.404_825_557_695_773).abs() < 1e-10);
        assert!((bessel_zero(1, 1) - 3.831_705_970_207_512).abs() < 1e-10);
        assert!((bessel_zero(0, 2) - 5.520_078_110_286_311).abs() < 1e-10);
        assert!((bessel_zero(2, 1) - 5.135_622_301_840_683).abs() < 1e-10);
        assert!((bessel_zero(5, 3) - 15.700_174_079_711_67).abs() < 1e-10);
    }

    #[test]
    fn zeros_increase_and_interlace() {
        for n in 0..6 {
            let zn: Vec<f64> = (1..=5).map(|k| bessel_zero(n, k)).collect();
            let zn1: Vec<f64> = (1..=5).map(|k| bessel_zero(n + 1, k)).collect();
            for k in 0..5 {
                if k + 1 < 5 {
                    assert!(zn[k] < zn[k + 1]);
                }
                // j_{n,k} < j_{n+1,k} < j_{n,k+1}
                assert!(zn[k] < zn1[k]);
                if k + 1 < 5 {
                    assert!(zn1[k] < zn[k + 1]);
                }
            }
        }
    }

    #[test]
    fn disk_spectrum_small_windows() {
        let s = disk_spectrum(1.0, 1.0, 7.0).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert!((s.entries[0].lambda - (1.0 + 2.404_825_557_695_773_f64.powi(2))).abs() < 1e-9);
        assert_eq!(s.entries[0].multiplicity, 1);

        let s = disk_spectrum(1.0, 1.0, 16.0).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert!((s.entries[1].lambda - (1.0 + 3.831_705_970_207_512_5_f64.powi(2))).abs() < 1e-9);
        assert_eq!(s.entries[1].multiplicity, 2);

        let s = disk_spectrum(1.0, 1.0, 30.0).unwrap();
        assert_eq!(s.entries.len(), 3);
        assert_eq!(s.total_multiplicity(), 5);
    }

    #[test]
    fn disk_spectrum_scales_with_radius() {
        let j01 = bessel_zero(0, 1);
        let s = disk_spectrum(2.0, 1.0, 1.0 + j01 * j01 / 4.0 + 1e-3).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert!((s.entries[0].lambda - (1.0 + j01 * j01 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn disk_spectrum_rejects_bad_window() {
        assert!(disk_spectrum(1.0, 1.0, 0.5).is_err());
        assert!(disk_spectrum(-1.0, 1.0, 5.0).is_err());
    }

    #[test]
    fn fd_spectrum_converges_to_bessel() {
        let v = RadialPotential::constant(1.0).unwrap();
        let s0 = fd_radial_spectrum(0, &v, 1.0, 4000, 2).unwrap();
        let exact0 = 1.0 + bessel_zero(0, 1).powi(2);
        assert!((s0.eigenvalues[0] - exact0).abs() < 1e-4, "{} vs {exact0}", s0.eigenvalues[0]);
        let s1 = fd_radial_spectrum(1, &v, 1.0, 4000, 2).unwrap();
        let exact1 = 1.0 + bessel_zero(1, 1).powi(2);
        assert!((s1.eigenvalues[0] - exact1).abs() < 1e-4, "{} vs {exact1}", s1.eigenvalues[0]);
    }

    #[test]
    fn fd_error_is_second_order() {
        let v = RadialPotential::constant(1.0).unwrap();
        for j in [0usize, 2] {
            let exact = 1.0 + bessel_zero(j, 1).powi(2);
            let e1 = (fd_radial_spectrum(j, &v, 1.0, 200, 1).unwrap().eigenvalues[0] - exact).abs();
            let e2 = (fd_radial_spectrum(j, &v, 1.0, 400, 1).unwrap().eigenvalues[0] - exact).abs();
            let order = (e1 / e2).log2();
            assert!(order > 1.8 && order < 2.2, "j={j}: order {order}");
        }
    }

    #[test]
    fn fd_eigenvalues_increase_with_j() {
        let v = RadialPotential::star();
        let per_j: Vec<Vec<f64>> = (0..5)
            .map(|j| fd_radial_spectrum(j, &v, 1.0, 500, 3).unwrap().eigenvalues)
            .collect();
        for j in 0..4 {
            for k in 0..3 {
                assert!(per_j[j][k] < per_j[j + 1][k]);
            }
        }
        assert!(per_j.iter().flatten().all(|&l| l >= 1.0));
    }

    #[test]
    fn sturm_bisection_matches_dense_solver() {
        use faer::{Mat, Side};
        let v = RadialPotential::star();
        for j in [0usize, 3] {
            let t = fd_radial_matrix(j, &v, 1.3, 120);
            let n = t.diag.len();
            let dense = Mat::<f64>::from_fn(n, n, |a, b| {
                if a == b {
                    t.diag[a]
                } else if a + 1 == b {
                    t.off[a]
                } else if b + 1 == a {
                    t.off[b]
                } else {
                    0.0
                }
            });
            let reference = dense.self_adjoint_eigenvalues(Side::Lower).unwrap();
            let ours = t.lowest_eigenvalues(6);
            for k in 0..6 {
                assert!(
                    (ours[k] - reference[k]).abs() < 1e-9 * reference[k].abs(),
                    "j={j} k={k}: {} vs {}",
                    ours[k],
                    reference[k]
                );
            }
        }
    }

    #[test]
    fn kronrod_integrates_known_functions() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(f64::exp, -1.0, 2.0, 1e-14);
        assert!((v - (2f64.exp() - (-1f64).exp())).abs() < 1e-12);
        let v = integrate(|r| r.powi(6), 0.0, 1.0, 1e-15);
        assert!((v - 1.0 / 7.0).abs() < 1e-15);
        let v = integrate(|r: f64| r.sqrt(), 0.0, 1.0, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
