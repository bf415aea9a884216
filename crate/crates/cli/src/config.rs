use std::fs::File;
use std::path::{Path, PathBuf};

use radmps_core::{Domain, FourierProfile, RadialPotential, ScanConfig, Shape};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Contents of the TOML run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub scan: ScanConfig,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub refine: RefineOptions,
    #[serde(default)]
    pub eigenfunction: EigenfunctionOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainConfig {
    #[serde(flatten)]
    pub shape: DomainSpec,
    /// Radius `R_out` of the enclosing ball; defaults to the boundary maximum.
    pub enclosing_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    Disk {
        #[serde(default = "one")]
        radius: f64,
    },
    /// `ρ(θ) = 3 + cos(4θ)/2`.
    Star,
    Ellipse { a: f64, b: f64 },
    RadialGraph {
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `2/(r²+1) + 1`.
    Lorentzian,
    /// `1 + r` inside the unit disk, `1 + r + (r-1)²` outside.
    #[default]
    Star,
    /// Two-column CSV `r,V`; relative paths are resolved against the config file.
    Tabulated { path: PathBuf },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineOptions {
    /// Candidates to refine; when empty the scan is run first.
    pub candidates: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenfunctionOptions {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for EigenfunctionOptions {
    fn default() -> Self {
        Self { n_r: 100, n_theta: 256 }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    /// Bessel zeros for constant potentials, finite differences otherwise.
    #[default]
    Auto,
    Bessel,
    FiniteDifference,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    pub method: OracleMethod,
    /// Largest eigenvalue reported; defaults to `scan.upper`.
    pub upper: Option<f64>,
    /// Angular orders `0..=j_max` for the finite-difference oracle.
    pub j_max: usize,
    /// Eigenvalues per angular order for the finite-difference oracle.
    pub count: usize,
    pub n_fd: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            method: OracleMethod::Auto,
            upper: None,
            j_max: 10,
            count: 6,
            n_fd: 4000,
        }
    }
}

/// A parsed configuration together with the objects built from it.
pub struct Run {
    pub config: RunConfig,
    pub text: String,
    pub domain: Domain,
    /// Potential after the automatic lift to `V >= 1`.
    pub potential: RadialPotential,
    pub shift: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Run {
    pub fn load(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        let seed = seed.or(config.seed).unwrap_or(config.scan.seed);
        config.scan.seed = seed;
        config.scan.validate()?;
        if config.eigenfunction.n_r < 2 || config.eigenfunction.n_theta < 2 {
            return Err(CliError::Config("eigenfunction grid needs n_r, n_theta >= 2".into()));
        }
        let domain = config.domain.build()?;
        let base = path.parent().unwrap_or(Path::new("."));
        let raw = config.potential.build(base)?;
        let shift = raw.required_shift(domain.r_out());
        let potential = raw.shifted(shift);
        let out = out.or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("radmps-out"));
        Ok(Self {
            config,
            text,
            domain,
            potential,
            shift,
            seed,
            out,
        })
    }
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain, CliError> {
        let domain = match &self.shape {
            DomainSpec::Disk { radius } => Domain::disk(*radius)?,
            DomainSpec::Star => Domain::star(),
            DomainSpec::Ellipse { a, b } => Domain::ellipse(*a, *b)?,
            DomainSpec::RadialGraph { mean, cos, sin } => Domain::new(Shape::RadialGraph(FourierProfile {
                mean: *mean,
                cos: cos.clone(),
                sin: sin.clone(),
            }))?,
        };
        Ok(match self.enclosing_radius {
            Some(r) => domain.with_enclosing_radius(r)?,
            None => domain,
        })
    }

    /// Radius of the domain when it is a disk centred at the origin.
    pub fn disk_radius(&self) -> Option<f64> {
        match &self.shape {
            DomainSpec::Disk { radius } => Some(*radius),
            DomainSpec::RadialGraph { mean, cos, sin } if cos.iter().chain(sin).all(|c| *c == 0.0) => Some(*mean),
            _ => None,
        }
    }
}

impl PotentialSpec {
    pub fn build(&self, base: &Path) -> Result<RadialPotential, CliError> {
        Ok(match self {
            PotentialSpec::Constant { value } => RadialPotential::constant(*value)?,
            PotentialSpec::Lorentzian => RadialPotential::lorentzian(),
            PotentialSpec::Star => RadialPotential::star(),
            PotentialSpec::Tabulated { path } => {
                let path = base.join(path);
                let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
                RadialPotential::from_csv(file)?
            }
        })
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            PotentialSpec::Constant { value } => Some(*value),
            _ => None,
        }
    }
}
