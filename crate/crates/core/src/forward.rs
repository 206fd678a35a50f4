//! Forward model: residuals of partial Riemann sums and synthetic
//! quasi-free energy series.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::band::{grid, Band, GRID_POINTS};
use crate::error::{Error, Result};
use crate::number::Twist;
use crate::series::{EnergySeries, SeriesMetadata, Source, Statistics};

/// `S_L(band)` for one size and twist.
pub fn riemann_sum(band: &(dyn Band + Sync), l: usize, twist: Twist) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("Riemann sum needs L >= 1".into()));
    }
    Ok(band.riemann_sum(l, twist))
}

/// `R_L = S_L − c0` over a set of sizes.
pub fn residual_series(
    band: &(dyn Band + Sync),
    sizes: &[usize],
    twist: Twist,
) -> Result<BTreeMap<usize, f64>> {
    let c0 = band
        .mean()
        .ok_or_else(|| Error::InvalidInput("band has no known mean value".into()))?;
    if sizes.contains(&0) {
        return Err(Error::Domain("Riemann sum needs L >= 1".into()));
    }
    Ok(sizes
        .par_iter()
        .map(|&l| (l, band.riemann_sum(l, twist) - c0))
        .collect())
}

/// Ground-state energies of a quasi-free model with dispersion `ω`:
/// `e_L = ε (ν/2) S_L(ω)` and `E_L = L e_L`.
pub fn synth_energy_series(
    dispersion: &(dyn Band + Sync),
    statistics: Statistics,
    nu: f64,
    twist: Twist,
    sizes: &[usize],
) -> Result<EnergySeries> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "filling fraction must be positive, got {nu}"
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::Domain("lattice sizes must be positive".into()));
    }
    check_non_negative(dispersion)?;

    let eps = statistics.sign();
    let energies: Vec<(usize, f64)> = sizes
        .par_iter()
        .map(|&l| {
            let e = eps * 0.5 * nu * dispersion.riemann_sum(l, twist);
            (l, e * l as f64)
        })
        .collect();

    let mut meta = SeriesMetadata::new(Source::Synthetic);
    meta.nu = Some(nu);
    meta.e_inf = dispersion.mean().map(|c0| eps * 0.5 * nu * c0);
    let mut series = EnergySeries::new(meta);
    for (l, e_total) in energies {
        series.insert(l, twist, e_total)?;
    }
    Ok(series)
}

/// Both twists in one series; the input to the quasi-free criterion.
pub fn synth_energy_series_both(
    dispersion: &(dyn Band + Sync),
    statistics: Statistics,
    nu: f64,
    sizes_pbc: &[usize],
    sizes_abc: &[usize],
) -> Result<EnergySeries> {
    let mut series = synth_energy_series(dispersion, statistics, nu, Twist::Pbc, sizes_pbc)?;
    let abc = synth_energy_series(dispersion, statistics, nu, Twist::Abc, sizes_abc)?;
    for (l, t, e) in abc.iter() {
        series.insert(l, t, e.e_total)?;
    }
    Ok(series)
}

fn check_non_negative(band: &dyn Band) -> Result<()> {
    let (lo, amax) = grid(GRID_POINTS).fold((None::<(f64, f64)>, 0.0f64), |(lo, amax), k| {
        let v = band.value(k);
        let lo = match lo {
            Some((_, lv)) if lv <= v => lo,
            _ => Some((k, v)),
        };
        (lo, amax.max(v.abs()))
    });
    if let Some((k, v)) = lo {
        if v < -1e-12 * amax.max(f64::MIN_POSITIVE) {
            return Err(Error::NegativeDispersion { k, value: v });
        }
    }
    Ok(())
}
