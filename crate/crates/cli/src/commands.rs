use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use radmps_core::oracle::{disk_spectrum, fd_radial_spectrum};
use radmps_core::{
    BasisBundle, Error, EigenpairApprox, Grid1D, RadialAssembler, Stage, refine, sample_grid, scan,
};
use serde::{Deserialize, Serialize};

use crate::config::{OracleMethod, Run};
use crate::error::CliError;

pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut out = BufWriter::new(file);
        body(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.write(name, |out| {
            serde_json::to_writer_pretty(&mut *out, value)?;
            writeln!(out)
        })
    }
}

#[derive(Serialize)]
struct Candidate {
    lambda: f64,
    lambda_unshifted: f64,
    f: f64,
}

#[derive(Serialize)]
struct CandidateList {
    potential_shift: f64,
    epsilon_scan: f64,
    candidates: Vec<Candidate>,
}

pub fn cmd_scan(run: &Run, out: &mut Outputs) -> Result<Vec<f64>, CliError> {
    let result = scan(&run.domain, &run.potential, &run.config.scan)?;
    out.write("scan.csv", |w| result.write_csv(w))?;
    let candidates: Vec<Candidate> = result
        .minima
        .iter()
        .map(|&i| Candidate {
            lambda: result.lambdas[i],
            lambda_unshifted: result.lambdas[i] - run.shift,
            f: result.f_values[i],
        })
        .collect();
    out.write_json(
        "candidates.json",
        &CandidateList {
            potential_shift: run.shift,
            epsilon_scan: run.config.scan.epsilon_scan,
            candidates,
        },
    )?;
    Ok(result.candidates())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eigenpair {
    pub candidate: f64,
    pub lambda_unshifted: f64,
    #[serde(flatten)]
    pub approx: EigenpairApprox,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rejection {
    pub candidate: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenpairFile {
    pub potential_shift: f64,
    pub eigenpairs: Vec<Eigenpair>,
    pub rejected: Vec<Rejection>,
}

pub fn cmd_refine(run: &Run, lambdas: &[f64], out: &mut Outputs) -> Result<(), CliError> {
    if run.config.scan.refine_schedule.is_empty() {
        return Err(CliError::Config("refine needs a non-empty scan.refine_schedule".into()));
    }
    let candidates = if !lambdas.is_empty() {
        lambdas.to_vec()
    } else if !run.config.refine.candidates.is_empty() {
        run.config.refine.candidates.clone()
    } else {
        cmd_scan(run, out)?
    };
    let mut file = EigenpairFile {
        potential_shift: run.shift,
        eigenpairs: Vec::new(),
        rejected: Vec::new(),
    };
    for &candidate in &candidates {
        match refine(&run.domain, &run.potential, candidate, &run.config.scan) {
            Ok(approx) if approx.accepted() => file.eigenpairs.push(Eigenpair {
                candidate,
                lambda_unshifted: approx.lambda_star - run.shift,
                approx,
            }),
            Ok(approx) => file.rejected.push(Rejection {
                candidate,
                reason: format!("no multiplicity gap in singular values {:?}", approx.sigma_values),
            }),
            Err(e @ Error::SpuriousMinimum { .. }) => file.rejected.push(Rejection {
                candidate,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    out.write_json("eigenpairs.json", &file)?;
    write_eigenfunctions(run, &file, out)
}

pub fn cmd_eigenfunction(run: &Run, input: &Path, out: &mut Outputs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let file: EigenpairFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    if (file.potential_shift - run.shift).abs() > 1e-12 {
        return Err(CliError::Config(format!(
            "{} was computed with potential shift {}, this configuration gives {}",
            input.display(),
            file.potential_shift,
            run.shift
        )));
    }
    write_eigenfunctions(run, &file, out)
}

fn write_eigenfunctions(run: &Run, file: &EigenpairFile, out: &mut Outputs) -> Result<(), CliError> {
    let grid = &run.config.eigenfunction;
    for (i, pair) in file.eigenpairs.iter().enumerate() {
        let stage = pair.approx.final_stage();
        let bundle = bundle_at(run, stage, pair.approx.lambda_star)?;
        for (m, alpha) in pair.approx.alphas.iter().enumerate() {
            let samples = sample_grid(&bundle, alpha, grid.n_r, grid.n_theta)?;
            out.write(&format!("eigenfunction_{i}_{m}.csv"), |w| samples.write_csv(w))?;
        }
    }
    Ok(())
}

fn bundle_at(run: &Run, stage: Stage, lambda: f64) -> Result<BasisBundle, CliError> {
    let grid = Grid1D::new(run.domain.r_out(), stage.n_h)?;
    let assembler = match run.config.scan.lipschitz {
        Some(l) => RadialAssembler::with_lipschitz(&run.potential, grid, l)?,
        None => RadialAssembler::new(&run.potential, grid)?,
    };
    Ok(BasisBundle::new(&assembler, stage.j_max, lambda)?)
}

pub fn cmd_oracle(run: &Run, out: &mut Outputs) -> Result<(), CliError> {
    let radius = run.config.domain.disk_radius().ok_or_else(|| {
        CliError::Usage("oracles exist only for disks centred at the origin".into())
    })?;
    let options = &run.config.oracle;
    let upper = options.upper.unwrap_or(run.config.scan.upper);
    let constant = run.config.potential.constant_value();
    let use_bessel = match options.method {
        OracleMethod::Auto => constant.is_some(),
        OracleMethod::Bessel => {
            if constant.is_none() {
                return Err(CliError::Usage("the Bessel oracle needs a constant potential".into()));
            }
            true
        }
        OracleMethod::FiniteDifference => false,
    };
    let shift = run.shift;
    if use_bessel {
        let c = constant.expect("checked above") + shift;
        let spectrum = disk_spectrum(radius, c, upper)?;
        out.write("oracle.csv", |w| {
            writeln!(w, "lambda,lambda_unshifted,order,index,multiplicity")?;
            for e in &spectrum.entries {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{},{},{}",
                    e.lambda,
                    e.lambda - shift,
                    e.order,
                    e.index,
                    e.multiplicity
                )?;
            }
            Ok(())
        })
    } else {
        if options.count == 0 {
            return Err(CliError::Config("oracle.count must be positive".into()));
        }
        let mut rows = Vec::new();
        for j in 0..=options.j_max {
            let spectrum = fd_radial_spectrum(j, &run.potential, radius, options.n_fd, options.count)?;
            for (k, &l) in spectrum.eigenvalues.iter().enumerate() {
                if options.upper.is_none() || l <= upper {
                    rows.push((j, k + 1, l));
                }
            }
        }
        out.write("oracle.csv", |w| {
            writeln!(w, "lambda,lambda_unshifted,order,index,multiplicity")?;
            for (j, k, l) in &rows {
                writeln!(w, "{l:.16e},{:.16e},{j},{k},{}", l - shift, if *j == 0 { 1 } else { 2 })?;
            }
            Ok(())
        })
    }
}
