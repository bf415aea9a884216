//! Fixtures shared by the benchmarks.

use radmps_core::{Domain, RadialPotential, Result};
use radmps_core::scanner::{Discretization, Stage};

/// The star domain with its potential at a given discretisation.
pub fn star_discretization(j_max: usize, n_h: usize, n_boundary: usize, n_interior: usize) -> Result<Discretization> {
    let domain = Domain::star().with_enclosing_radius(3.6)?;
    let stage = Stage {
        j_max,
        n_h,
        n_boundary,
        n_interior,
        mu: 1e-3,
    };
    Discretization::new(&domain, &RadialPotential::star(), stage, 7, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_builds() {
        let disc = star_discretization(10, 100, 60, 60).unwrap();
        assert_eq!(disc.boundary.len(), 60);
        assert_eq!(disc.interior.len(), 60);
    }
}
