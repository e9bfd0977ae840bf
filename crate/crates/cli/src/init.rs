//! Initial immersions named in a run configuration.

use pwf_core::flow::FlowState;
use pwf_core::surfaces;

use crate::config::InitialSpec;
use crate::{snapshot, CliError, Result};

/// Largest conformality defect accepted from a file.
pub const MAX_INPUT_DEFECT: f64 = 1e-3;

pub fn init_immersion(spec: &InitialSpec, n: usize) -> Result<FlowState> {
    let state = match spec {
        InitialSpec::Clifford => surfaces::clifford(n)?,
        InitialSpec::CliffordPerturbed { seed, amplitude } => {
            surfaces::clifford_perturbed(n, *seed, *amplitude)?
        }
        InitialSpec::Revolution { c_over_r } => surfaces::revolution(n, *c_over_r)?,
        InitialSpec::ProductTorus { r1, r2 } => surfaces::product_torus(n, *r1, *r2)?,
        InitialSpec::FromFile { path } => {
            let state = snapshot::read(path)?;
            if state.n() != n {
                return Err(CliError::BadParameters(format!(
                    "{} holds an N = {} state, config asks for N = {n}",
                    path.display(),
                    state.n()
                )));
            }
            let defect = state.geometry()?.defect_sup();
            if !(defect <= MAX_INPUT_DEFECT) {
                return Err(CliError::NonConformalInput { defect });
            }
            state
        }
    };
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwf_core::geometry::willmore_energy;
    use pwf_core::surfaces::Perturbation;
    use std::f64::consts::PI;

    #[test]
    fn analytic_kinds() {
        let s = init_immersion(&InitialSpec::Clifford, 32).unwrap();
        let b = s.geometry().unwrap();
        assert!(b.defect_sup() <= 1e-12);
        assert!((willmore_energy(&b) - 2.0 * PI * PI).abs() < 1e-8);
        let r = init_immersion(&InitialSpec::Revolution { c_over_r: 2f64.sqrt() }, 64).unwrap();
        assert!(r.geometry().unwrap().defect_sup() <= 1e-6);
        assert!(init_immersion(&InitialSpec::Revolution { c_over_r: 0.5 }, 32).is_err());
    }

    #[test]
    fn files_must_be_conformal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.pwfl");
        let raw = surfaces::clifford_perturbed_raw(16, &Perturbation::smooth(1, 0.1)).unwrap();
        snapshot::write(&raw, &path).unwrap();
        let spec = InitialSpec::FromFile { path: path.clone() };
        assert!(matches!(
            init_immersion(&spec, 16),
            Err(CliError::NonConformalInput { .. })
        ));
        snapshot::write(&surfaces::clifford(16).unwrap(), &path).unwrap();
        assert!(init_immersion(&spec, 16).is_ok());
        assert!(matches!(init_immersion(&spec, 32), Err(CliError::BadParameters(_))));
    }
}
