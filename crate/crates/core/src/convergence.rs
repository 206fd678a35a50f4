//! Convergence of the reconstruction with the number of available sizes.

use rayon::prelude::*;

use crate::band::{l2_sq_distance, Band, GRID_POINTS};
use crate::error::{Error, Result};
use crate::forward::residual_series;
use crate::number::Twist;
use crate::reconstruct::{invert_coefficients, SizeSet};

/// `‖f_L − f‖²₂` on `[0, 2π]` for each cutoff `L`, where `f_L` is rebuilt
/// from the exact residuals `R_1..R_L` of `band`.
pub fn l2_sq_error_curve(
    band: &(dyn Band + Sync),
    twist: Twist,
    cutoffs: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let c0 = band
        .mean()
        .ok_or_else(|| Error::InvalidInput("band has no known mean value".into()))?;
    let max = *cutoffs
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("no cutoffs".into()))?;
    if cutoffs.contains(&0) {
        return Err(Error::Domain("cutoff must be >= 1".into()));
    }
    let all: Vec<usize> = (1..=max).collect();
    let residuals = residual_series(band, &all, twist)?;
    cutoffs
        .par_iter()
        .map(|&l| {
            let subset = residuals.range(1..=l).map(|(&k, &v)| (k, v)).collect();
            let mut approx = invert_coefficients(&subset, twist, SizeSet::AllFrom1(l))?;
            approx.c0 = c0;
            Ok((l, l2_sq_distance(&approx, band, GRID_POINTS)))
        })
        .collect()
}

/// Ordinary least squares `y = intercept + slope·x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
