//! Spectral scan over `[1, K]`, local minimum detection, staged refinement
//! and multiplicity analysis.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BasisBundle, CoefficientVector};
use crate::geometry::{BoundaryNodeSet, Domain, InteriorSampleSet};
use crate::potential::RadialPotential;
use crate::quotient::{
    CollocationMatrices, QuotientOptions, QuotientSolution, Regularization, build_matrices, minimize_quotient_with,
};
use crate::radial_fem::{Grid1D, RadialAssembler};

/// Discretisation parameters of one scan or refinement stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub j_max: usize,
    pub n_h: usize,
    pub n_boundary: usize,
    pub n_interior: usize,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Right end `K` of the scanned interval `[lower, K]`.
    pub upper: f64,
    pub lower: f64,
    pub coarse: Stage,
    /// Regularisation threshold during the coarse scan.
    pub reg_threshold: Option<f64>,
    /// Relative rank cutoff on `R` during refinement; `None` disables it.
    pub refine_rank_tolerance: Option<f64>,
    pub epsilon_scan: f64,
    pub epsilon: f64,
    pub sigma_gap: f64,
    pub seed: u64,
    pub refine_schedule: Vec<Stage>,
    /// Step reduction between successive zoom levels inside a stage.
    pub zoom: f64,
    /// A stage may raise `F_min` by at most this factor before the minimum is
    /// declared spurious.
    pub f_increase_slack: f64,
    /// Overrides the finite-difference Lipschitz estimate of `V`.
    pub lipschitz: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            upper: 10.0,
            lower: 1.0,
            coarse: Stage {
                j_max: 100,
                n_h: 400,
                n_boundary: 600,
                n_interior: 600,
                mu: 0.02,
            },
            reg_threshold: Some(1e-8),
            refine_rank_tolerance: Some(1e-14),
            epsilon_scan: 0.1,
            epsilon: 1e-6,
            sigma_gap: 100.0,
            seed: 0,
            refine_schedule: Vec::new(),
            zoom: 5.0,
            f_increase_slack: 2.0,
            lipschitz: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.upper > 1.0) || !(self.lower >= 1.0) || !(self.upper > self.lower) {
            return bad(format!("need 1 <= lower < upper, got [{}, {}]", self.lower, self.upper));
        }
        for (i, s) in std::iter::once(&self.coarse).chain(&self.refine_schedule).enumerate() {
            if !(s.mu > 0.0) || s.n_h < 2 || s.n_boundary == 0 || s.n_interior == 0 {
                return bad(format!("stage {i}: counts must be positive and mu > 0"));
            }
            let cols = 2 * s.j_max + 1;
            if s.n_boundary <= cols || s.n_interior <= cols {
                return bad(format!("stage {i}: need more than 2J+1 = {cols} boundary and interior points"));
            }
        }
        for (i, w) in self.refine_schedule.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if b.j_max < a.j_max || b.n_h < a.n_h || b.n_boundary < a.n_boundary || b.n_interior < a.n_interior {
                return bad(format!("refinement stage {} lowers a discretisation count", i + 1));
            }
            if !(b.mu < a.mu) {
                return bad(format!("refinement stage {} does not decrease mu", i + 1));
            }
        }
        if !(self.zoom > 1.0) || !(self.f_increase_slack >= 1.0) || !(self.sigma_gap > 1.0) {
            return bad("zoom and sigma_gap must exceed 1, f_increase_slack must be at least 1".into());
        }
        if !(self.epsilon > 0.0) || !(self.epsilon_scan > 0.0) {
            return bad("thresholds must be positive".into());
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let mu = self.coarse.mu;
        let count = ((self.upper - self.lower) / mu * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count).map(|i| self.lower + i as f64 * mu).collect()
    }
}

/// Seed for the samples of stage `index` (0 is the coarse scan).
pub fn stage_seed(base: u64, index: usize) -> u64 {
    // SplitMix64 finaliser
    let mut z = base.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything that stays fixed while `λ` varies within one stage.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub stage: Stage,
    pub assembler: RadialAssembler,
    pub boundary: BoundaryNodeSet,
    pub interior: InteriorSampleSet,
    pub seed: u64,
}

impl Discretization {
    pub fn new(domain: &Domain, potential: &RadialPotential, stage: Stage, seed: u64, lipschitz: Option<f64>) -> Result<Self> {
        potential.check_lower_bound(domain.r_out())?;
        let grid = Grid1D::new(domain.r_out(), stage.n_h)?;
        let assembler = match lipschitz {
            Some(l) => RadialAssembler::with_lipschitz(potential, grid, l)?,
            None => RadialAssembler::new(potential, grid)?,
        };
        Ok(Self {
            stage,
            assembler,
            boundary: domain.boundary_nodes(stage.n_boundary, seed)?,
            interior: domain.sample_interior(stage.n_interior, seed ^ 0x5DEE_CE66_D1CE_5EED)?,
            seed,
        })
    }

    pub fn bundle(&self, lambda: f64) -> Result<BasisBundle> {
        BasisBundle::new(&self.assembler, self.stage.j_max, lambda).map_err(|e| e.at_lambda(lambda))
    }

    pub fn matrices(&self, lambda: f64) -> Result<(BasisBundle, CollocationMatrices)> {
        let bundle = self.bundle(lambda)?;
        let mats = build_matrices(&bundle, &self.boundary, &self.interior).map_err(|e| e.at_lambda(lambda))?;
        Ok((bundle, mats))
    }

    pub fn solve(&self, lambda: f64, options: &QuotientOptions) -> Result<QuotientSolution> {
        let (_, mats) = self.matrices(lambda)?;
        minimize_quotient_with(&mats, options).map_err(|e| e.at_lambda(lambda))
    }

    /// Rough peak working set of one `λ` evaluation, in bytes.
    pub fn memory_estimate(&self) -> usize {
        let s = &self.stage;
        let n = 2 * s.j_max + 1;
        let m = s.n_boundary + s.n_interior;
        // basis values, collocation blocks, stacked copy, thin Q, Q_∂ and
        // the triangular factor with its SVD
        8 * ((s.j_max + 1) * (s.n_h + 1) + 3 * m * n + s.n_boundary * n + 4 * n * n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub lambdas: Vec<f64>,
    pub f_values: Vec<f64>,
    /// Indices of local minima with `F < epsilon_scan`.
    pub minima: Vec<usize>,
}

impl ScanResult {
    pub fn candidates(&self) -> Vec<f64> {
        self.minima.iter().map(|&i| self.lambdas[i]).collect()
    }

    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "lambda,F")?;
        for (l, f) in self.lambdas.iter().zip(&self.f_values) {
            writeln!(out, "{l:.16e},{f:.16e}")?;
        }
        Ok(())
    }
}

pub fn scan(domain: &Domain, potential: &RadialPotential, config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let disc = Discretization::new(domain, potential, config.coarse, stage_seed(config.seed, 0), config.lipschitz)?;
    let options = QuotientOptions {
        regularization: config.reg_threshold.into(),
        vectors: 0,
    };
    let lambdas = config.lambdas();
    let f_values = lambdas
        .par_iter()
        .map(|&l| disc.solve(l, &options).map(|s| s.f_min))
        .collect::<Result<Vec<_>>>()?;
    let mut result = ScanResult {
        lambdas,
        f_values,
        minima: Vec::new(),
    };
    result.minima = find_minima(&result, config.epsilon_scan);
    Ok(result)
}

/// Strict interior local minima below `epsilon_scan`.
pub fn find_minima(result: &ScanResult, epsilon_scan: f64) -> Vec<usize> {
    let f = &result.f_values;
    (1..f.len().saturating_sub(1))
        .filter(|&i| f[i] < f[i - 1] && f[i] < f[i + 1] && f[i] < epsilon_scan)
        .collect()
}

/// Largest `m` with `σ_m < ε` and `σ_{m+1} >= gap · σ_m` (1-based).
pub fn detect_multiplicity(sigmas: &[f64], epsilon: f64, sigma_gap: f64) -> usize {
    (1..sigmas.len())
        .rev()
        .find(|&m| sigmas[m - 1] < epsilon && sigmas[m] >= sigma_gap * sigmas[m - 1])
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub lambda: f64,
    pub f_min: f64,
    pub evaluations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenpairApprox {
    pub lambda_star: f64,
    /// Step of the last stage that ran.
    pub tolerance: f64,
    pub multiplicity: usize,
    /// One minimiser per detected eigenfunction, `‖R α‖ = 1`.
    pub alphas: Vec<CoefficientVector>,
    /// Smallest singular values at `λ*`, ascending; the first
    /// `multiplicity` belong to the eigenspace.
    pub sigma_values: Vec<f64>,
    pub f_bound: f64,
    pub stages: Vec<StageReport>,
    pub memory_estimate_mb: f64,
}

impl EigenpairApprox {
    pub fn accepted(&self) -> bool {
        self.multiplicity >= 1
    }

    pub fn final_stage(&self) -> Stage {
        self.stages.last().expect("refinement ran at least one stage").stage
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key(i64);

fn key(lambda: f64, unit: f64) -> Key {
    Key((lambda / unit).round() as i64)
}

/// Refine a scan candidate through the configured stages.
///
/// Within a stage the samples are fixed and `λ` is located by repeatedly
/// evaluating 11 points across a bracket of width `10 · step` around the
/// current best value, shrinking `step` by `zoom` down to the stage `mu`.
pub fn refine(domain: &Domain, potential: &RadialPotential, candidate: f64, config: &ScanConfig) -> Result<EigenpairApprox> {
    refine_with(domain, potential, candidate, config, |_| {})
}

/// [`refine`] with a callback after each completed stage.
pub fn refine_with(
    domain: &Domain,
    potential: &RadialPotential,
    candidate: f64,
    config: &ScanConfig,
    mut progress: impl FnMut(&StageReport),
) -> Result<EigenpairApprox> {
    config.validate()?;
    if config.refine_schedule.is_empty() {
        return Err(Error::InvalidParameter("refinement schedule is empty".into()));
    }
    let options = QuotientOptions {
        regularization: config
            .refine_rank_tolerance
            .map_or(Regularization::None, Regularization::Relative),
        vectors: 0,
    };
    let mu_final = config.refine_schedule.last().unwrap().mu;
    let mut best = candidate;
    let mut prev_mu = config.coarse.mu;
    let mut reports: Vec<StageReport> = Vec::new();
    let mut last_disc = None;

    for (index, &stage) in config.refine_schedule.iter().enumerate() {
        let seed = stage_seed(config.seed, index + 1);
        let disc = Discretization::new(domain, potential, stage, seed, config.lipschitz)?;
        let unit = stage.mu * 1e-3;
        let mut cache: BTreeMap<Key, (f64, f64)> = BTreeMap::new();
        let mut step = (prev_mu / config.zoom).max(stage.mu);
        let mut shifts = 0;
        loop {
            let points: Vec<f64> = (-5..=5)
                .map(|k| best + k as f64 * step)
                .filter(|&l| l >= 1.0)
                .filter(|&l| !cache.contains_key(&key(l, unit)))
                .collect();
            let values = points
                .par_iter()
                .map(|&l| disc.solve(l, &options).map(|s| (l, s.f_min)))
                .collect::<Result<Vec<_>>>()?;
            for (l, f) in values {
                cache.insert(key(l, unit), (l, f));
            }
            let in_bracket = |l: f64| (l - best).abs() <= 5.0 * step * (1.0 + 1e-9);
            let (new_best, _) = cache
                .values()
                .filter(|(l, _)| in_bracket(*l))
                .fold((best, f64::INFINITY), |acc, &(l, f)| if f < acc.1 { (l, f) } else { acc });
            let at_edge = (new_best - best).abs() >= 5.0 * step * (1.0 - 1e-9);
            best = new_best;
            if at_edge && shifts < 20 {
                shifts += 1;
                continue;
            }
            if step <= stage.mu {
                break;
            }
            step = (step / config.zoom).max(stage.mu);
        }
        let f_min = cache[&key(best, unit)].1;
        if let Some(prev) = reports.last()
            && f_min > config.f_increase_slack * prev.f_min
        {
            return Err(Error::SpuriousMinimum {
                lambda: best,
                previous: prev.f_min,
                current: f_min,
            });
        }
        let report = StageReport {
            stage,
            lambda: best,
            f_min,
            evaluations: cache.len(),
            seed,
        };
        progress(&report);
        let converged = reports
            .last()
            .is_some_and(|prev| (prev.lambda - best).abs() < 2.0 * mu_final);
        reports.push(report);
        prev_mu = stage.mu;
        last_disc = Some(disc);
        if converged {
            break;
        }
    }

    let disc = last_disc.expect("at least one stage");
    let solution = disc.solve(
        best,
        &QuotientOptions {
            regularization: options.regularization,
            vectors: 8,
        },
    )?;
    let multiplicity = detect_multiplicity(&solution.sigmas, config.epsilon, config.sigma_gap);
    let kept = multiplicity.max(1);
    Ok(EigenpairApprox {
        lambda_star: best,
        tolerance: disc.stage.mu,
        multiplicity,
        alphas: solution.alphas[..kept].to_vec(),
        sigma_values: solution.sigmas.iter().take(kept + 2).cloned().collect(),
        f_bound: solution.f_min,
        stages: reports,
        memory_estimate_mb: disc.memory_estimate() as f64 / (1024.0 * 1024.0),
    })
}
