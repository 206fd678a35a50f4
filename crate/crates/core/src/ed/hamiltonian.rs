use nalgebra::DMatrix;
use rayon::prelude::*;

use super::basis::{level, with_level, SectorBasis};
use super::{ModelKind, SpinModelSpec};
use crate::error::{Error, Result};
use crate::number::Twist;

/// A real symmetric operator known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bond {
    i: usize,
    j: usize,
    /// Coupling of `S^z_i S^z_j`.
    jz: f64,
    /// Coupling of `(S⁺_i S⁻_j + h.c.)/2`; carries the boundary sign.
    jxy: f64,
}

/// Placement of the boundary twist and of the dimerization pattern.
/// Only used to check gauge and translation invariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Layout {
    /// Bond `(b, b+1 mod L)` that carries the twist; `None` means the
    /// closing bond `(L−1, 0)`.
    pub twist_bond: Option<usize>,
    /// Shift of the dimerization pattern by whole sites.
    pub site_shift: usize,
}

/// Matrix-free Hamiltonian restricted to one `S^z` sector.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    basis: SectorBasis,
    bonds: Vec<Bond>,
    diag: Vec<f64>,
}

/// Build `H` for one of the chain models on a sector.
pub fn build_hamiltonian(model: &SpinModelSpec, sector: SectorBasis) -> Result<SpinHamiltonian> {
    SpinHamiltonian::with_layout(model, sector, Layout::default())
}

impl SpinHamiltonian {
    pub fn with_layout(model: &SpinModelSpec, sector: SectorBasis, layout: Layout) -> Result<Self> {
        model.validate()?;
        let l = sector.sites();
        if l < 2 {
            return Err(Error::Unsupported(
                "chains of a single site have no well-defined ground-state energy".into(),
            ));
        }
        if sector.local_dim() != model.local_dim() {
            return Err(Error::InvalidInput(format!(
                "sector has local dimension {} but the model needs {}",
                sector.local_dim(),
                model.local_dim()
            )));
        }
        let twist_bond = layout.twist_bond.unwrap_or(l - 1) % l;
        let sign = match model.boundary_twist {
            Twist::Pbc => 1.0,
            Twist::Abc => -1.0,
        };
        let bonds: Vec<Bond> = (0..l)
            .map(|s| {
                let coupling = match model.kind {
                    ModelKind::Heisenberg { j } | ModelKind::SingleIon { j, .. } => j,
                    // J [1 + δ(−1)^i] with 1-based i = s + 1
                    ModelKind::Dimerized { j, delta } => {
                        let parity = if (s + 1 + layout.site_shift) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        j * (1.0 + delta * parity)
                    }
                };
                let jxy = if s == twist_bond {
                    sign * coupling
                } else {
                    coupling
                };
                Bond {
                    i: s,
                    j: (s + 1) % l,
                    jz: coupling,
                    jxy,
                }
            })
            .collect();

        let anisotropy = match model.kind {
            ModelKind::SingleIon { j, d } => j * d,
            _ => 0.0,
        };
        let diag = sector
            .states()
            .par_iter()
            .map(|&st| {
                let mut e = 0.0;
                for b in &bonds {
                    let mi = sector.twice_m(st, b.i) as f64 * 0.5;
                    let mj = sector.twice_m(st, b.j) as f64 * 0.5;
                    e += b.jz * mi * mj;
                }
                if anisotropy != 0.0 {
                    for site in 0..l {
                        let m = sector.twice_m(st, site) as f64 * 0.5;
                        e += anisotropy * m * m;
                    }
                }
                e
            })
            .collect();

        Ok(SpinHamiltonian {
            basis: sector,
            bonds,
            diag,
        })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    /// `√(s(s+1) − m(m+1))` for the raising operator on level `v`.
    #[inline]
    fn raise(&self, v: u64) -> f64 {
        match (self.basis.local_dim(), v) {
            (2, 0) => 1.0,
            (3, 0) | (3, 1) => std::f64::consts::SQRT_2,
            _ => 0.0,
        }
    }

    /// Visit the nonzero entries `(column, value)` of one row.
    #[inline]
    fn for_each_in_row(&self, row: usize, mut visit: impl FnMut(usize, f64)) {
        let st = self.basis.unrank(row);
        let top = self.basis.local_dim() as u64 - 1;
        visit(row, self.diag[row]);
        for b in &self.bonds {
            if b.jxy == 0.0 {
                continue;
            }
            let vi = level(st, b.i);
            let vj = level(st, b.j);
            // S⁺_i S⁻_j
            if vi < top && vj > 0 {
                let amp = 0.5 * b.jxy * self.raise(vi) * self.raise(vj - 1);
                let target = with_level(with_level(st, b.i, vi + 1), b.j, vj - 1);
                if let Some(col) = self.basis.rank(target) {
                    visit(col, amp);
                }
            }
            // S⁻_i S⁺_j
            if vi > 0 && vj < top {
                let amp = 0.5 * b.jxy * self.raise(vi - 1) * self.raise(vj);
                let target = with_level(with_level(st, b.i, vi - 1), b.j, vj + 1);
                if let Some(col) = self.basis.rank(target) {
                    visit(col, amp);
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            self.for_each_in_row(r, |c, v| m[(r, c)] += v);
        }
        m
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .into_par_iter()
            .map(|r| {
                let mut s = 0.0;
                self.for_each_in_row(r, |_, v| s += v.abs());
                s
            })
            .reduce(|| 0.0, f64::max)
    }
}

impl LinearOperator for SpinHamiltonian {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = 0.0;
            self.for_each_in_row(r, |c, v| acc += v * x[c]);
            *out = acc;
        });
    }
}
