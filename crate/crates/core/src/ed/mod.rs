//! Exact diagonalization of small spin chains: the Heisenberg chain, its
//! dimerized version and the spin-1 chain with single-ion anisotropy.

mod basis;
mod hamiltonian;
mod lanczos;

pub use basis::SectorBasis;
pub use hamiltonian::{build_hamiltonian, Layout, LinearOperator, SpinHamiltonian};
pub use lanczos::{lowest_eigenpair, GroundState, LanczosConfig, DEGENERACY_TOL, RESIDUAL_TOL};

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::number::Twist;
use crate::series::{EnergySeries, SeriesMetadata, Source};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `J Σ S_i·S_{i+1}`, spin-1/2.
    Heisenberg { j: f64 },
    /// `J Σ [1 + δ(−1)^i] S_i·S_{i+1}`, spin-1/2.
    Dimerized { j: f64, delta: f64 },
    /// `J Σ [S_i·S_{i+1} + D (S^z_i)²]`, spin-1.
    SingleIon { j: f64, d: f64 },
}

/// A chain model together with its boundary condition. For `Abc` the
/// transverse part of the closing bond changes sign; its `S^z S^z` part is
/// untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinModelSpec {
    pub kind: ModelKind,
    pub boundary_twist: Twist,
}

impl SpinModelSpec {
    pub fn heisenberg(j: f64) -> Self {
        SpinModelSpec {
            kind: ModelKind::Heisenberg { j },
            boundary_twist: Twist::Pbc,
        }
    }

    pub fn dimerized(j: f64, delta: f64) -> Self {
        SpinModelSpec {
            kind: ModelKind::Dimerized { j, delta },
            boundary_twist: Twist::Pbc,
        }
    }

    pub fn single_ion(j: f64, d: f64) -> Self {
        SpinModelSpec {
            kind: ModelKind::SingleIon { j, d },
            boundary_twist: Twist::Pbc,
        }
    }

    pub fn with_twist(mut self, twist: Twist) -> Self {
        self.boundary_twist = twist;
        self
    }

    pub fn local_dim(&self) -> u8 {
        match self.kind {
            ModelKind::Heisenberg { .. } | ModelKind::Dimerized { .. } => 2,
            ModelKind::SingleIon { .. } => 3,
        }
    }

    pub fn is_spin_half(&self) -> bool {
        self.local_dim() == 2
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self.kind {
            ModelKind::Heisenberg { j } => j.is_finite(),
            ModelKind::Dimerized { j, delta } => {
                if delta.abs() >= 1.0 {
                    return Err(Error::InvalidInput(format!(
                        "|delta| must be < 1, got {delta}"
                    )));
                }
                j.is_finite() && delta.is_finite()
            }
            ModelKind::SingleIon { j, d } => j.is_finite() && d.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidInput("model couplings must be finite".into()))
        }
    }
}

impl fmt::Display for SpinModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Heisenberg { j } => write!(f, "heisenberg J={j}"),
            ModelKind::Dimerized { j, delta } => write!(f, "dimerized J={j} delta={delta}"),
            ModelKind::SingleIon { j, d } => write!(f, "single-ion J={j} D={d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundEnergy {
    pub e0: f64,
    pub residual_norm: f64,
    pub degeneracy_warning: bool,
}

fn check_size(model: &SpinModelSpec, l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::Unsupported(format!(
            "L={l}: single-site ground-state energy is not defined"
        )));
    }
    if model.is_spin_half() && l % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "L={l}: odd spin-1/2 chains have a degenerate doublet ground state"
        )));
    }
    Ok(())
}

/// Lowest energy in the `S^z = 0` sector.
pub fn ground_energy(
    model: &SpinModelSpec,
    l: usize,
    config: &LanczosConfig,
) -> Result<GroundEnergy> {
    check_size(model, l)?;
    let sector = SectorBasis::new(l, model.local_dim(), 0)?;
    let h = build_hamiltonian(model, sector)?;
    let gs = lowest_eigenpair(&h, config)?;
    Ok(GroundEnergy {
        e0: gs.energy,
        residual_norm: gs.residual_norm,
        degeneracy_warning: gs.degeneracy_warning,
    })
}

/// Lowest energy in the `S^z = 0` sector by dense diagonalization.
pub fn dense_ground_energy(model: &SpinModelSpec, l: usize) -> Result<f64> {
    check_size(model, l)?;
    let sector = SectorBasis::new(l, model.local_dim(), 0)?;
    let h = build_hamiltonian(model, sector)?;
    Ok(h.to_dense().symmetric_eigenvalues().min())
}

/// Ground-state energies over sizes and boundary twists. Jobs run
/// concurrently; the result is keyed and ordered.
pub fn energy_series(
    model: &SpinModelSpec,
    sizes: &[usize],
    twists: &[Twist],
    config: &LanczosConfig,
) -> Result<EnergySeries> {
    for &l in sizes {
        check_size(model, l)?;
    }
    let jobs: Vec<(usize, Twist)> = twists
        .iter()
        .flat_map(|&t| sizes.iter().map(move |&l| (l, t)))
        .collect();
    let results: Vec<Result<(usize, Twist, f64)>> = jobs
        .par_iter()
        .map(|&(l, t)| {
            let m = model.with_twist(t);
            ground_energy(&m, l, config).map(|g| (l, t, g.e0))
        })
        .collect();

    let mut meta = SeriesMetadata::new(Source::ExactDiag);
    meta.model = Some(model.to_string());
    let mut series = EnergySeries::new(meta);
    for r in results {
        let (l, t, e) = r?;
        series.insert(l, t, e)?;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn heisenberg_anchors() {
        let cfg = LanczosConfig::default();
        let m = SpinModelSpec::heisenberg(1.0);
        assert_relative_eq!(
            ground_energy(&m, 2, &cfg).unwrap().e0,
            -1.5,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            ground_energy(&m, 4, &cfg).unwrap().e0,
            -2.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn heisenberg_twelve_sites_near_bulk() {
        let cfg = LanczosConfig::default();
        let m = SpinModelSpec::heisenberg(1.0);
        let e = ground_energy(&m, 12, &cfg).unwrap().e0 / 12.0;
        let bulk = 0.25 - std::f64::consts::LN_2;
        assert!((e / bulk - 1.0).abs() < 0.03, "e/L = {e}");
        assert_relative_eq!(
            e * 12.0,
            dense_ground_energy(&m, 12).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn undimerized_equals_heisenberg() {
        let cfg = LanczosConfig::default();
        for l in [4usize, 6, 8, 10] {
            let a = ground_energy(&SpinModelSpec::dimerized(1.0, 0.0), l, &cfg)
                .unwrap()
                .e0;
            let b = ground_energy(&SpinModelSpec::heisenberg(1.0), l, &cfg)
                .unwrap()
                .e0;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn size_validation() {
        let cfg = LanczosConfig::default();
        let h = SpinModelSpec::heisenberg(1.0);
        assert!(matches!(
            ground_energy(&h, 3, &cfg),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            ground_energy(&h, 1, &cfg),
            Err(Error::Unsupported(_))
        ));
        let s1 = SpinModelSpec::single_ion(1.0, 2.0);
        assert!(ground_energy(&s1, 3, &cfg).is_ok());
        assert!(ground_energy(&s1, 1, &cfg).is_err());
        assert!(SpinModelSpec::dimerized(1.0, 1.0).validate().is_err());
    }

    #[test]
    fn small_series() {
        let s = energy_series(
            &SpinModelSpec::heisenberg(1.0),
            &[2, 4],
            &[Twist::Pbc],
            &LanczosConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(s.get(2, Twist::Pbc).unwrap().e_total, -1.5, epsilon = 1e-10);
        assert_relative_eq!(s.get(4, Twist::Pbc).unwrap().e_total, -2.0, epsilon = 1e-10);
        assert_eq!(s.metadata.source, Source::ExactDiag);
    }
}
