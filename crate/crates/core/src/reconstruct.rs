//! Inverse problem: recover the cosine coefficients of a band from its
//! finite-size residuals, and read an energy series under the four
//! quasi-free hypotheses.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band::{grid_extrema, FourierBand, GRID_POINTS};
use crate::error::{Error, Result};
use crate::number::{b_coefficients, Twist};
use crate::series::{EnergySeries, Statistics};

/// Relative tolerance of the positivity test on the grid.
pub const TOL_POS: f64 = 1e-9;

/// A quasi-free reading of the data: statistics and effective twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    pub statistics: Statistics,
    pub twist: Twist,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 4] = [
        Hypothesis::new(Statistics::Boson, Twist::Pbc),
        Hypothesis::new(Statistics::Boson, Twist::Abc),
        Hypothesis::new(Statistics::Fermion, Twist::Pbc),
        Hypothesis::new(Statistics::Fermion, Twist::Abc),
    ];

    pub const fn new(statistics: Statistics, twist: Twist) -> Self {
        Hypothesis { statistics, twist }
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.statistics, self.twist)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.statistics, self.twist)
    }
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (stat, twist) = s
            .split_once(['-', ',', '/'])
            .ok_or_else(|| Error::Parse(format!("hypothesis '{s}' should look like boson-pbc")))?;
        Ok(Hypothesis::new(stat.parse()?, twist.parse()?))
    }
}

/// Which sizes are available to the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SizeSet {
    /// `{1, ..., M}`.
    AllFrom1(usize),
    /// `{2, 4, ..., 2K}`; recovers the even coefficients only.
    EvenOnly(usize),
    /// `{2, ..., M}`; `a_1` is left undetermined.
    From2(usize),
}

impl SizeSet {
    pub fn sizes(&self) -> Vec<usize> {
        match *self {
            SizeSet::AllFrom1(m) => (1..=m).collect(),
            SizeSet::EvenOnly(k) => (1..=k).map(|i| 2 * i).collect(),
            SizeSet::From2(m) => (2..=m).collect(),
        }
    }

    pub fn max_size(&self) -> usize {
        match *self {
            SizeSet::AllFrom1(m) | SizeSet::From2(m) => m,
            SizeSet::EvenOnly(k) => 2 * k,
        }
    }

    /// Classify an arbitrary set of sizes. `{1..M}`, `{2,4,..,2K}` and
    /// `{2..M}` are the only supported shapes; `{2}` is read as even-only.
    pub fn infer(sizes: &[usize]) -> Result<SizeSet> {
        let mut s: Vec<usize> = sizes.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::UnsupportedSizeSet("no sizes".into()));
        }
        if s[0] == 0 {
            return Err(Error::UnsupportedSizeSet("size 0".into()));
        }
        let max = *s.last().unwrap();
        if s.iter().copied().eq(1..=max) {
            return Ok(SizeSet::AllFrom1(max));
        }
        if s.iter().all(|l| l % 2 == 0) && s.iter().copied().eq((1..=max / 2).map(|i| 2 * i)) {
            return Ok(SizeSet::EvenOnly(max / 2));
        }
        if s.iter().copied().eq(2..=max) {
            return Ok(SizeSet::From2(max));
        }
        Err(Error::UnsupportedSizeSet(format!(
            "sizes {s:?} are neither 1..M, 2..M nor 2,4,..,2K"
        )))
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SizeSet::AllFrom1(m) => m >= 1,
            SizeSet::EvenOnly(k) => k >= 1,
            SizeSet::From2(m) => m >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedSizeSet(format!("{self:?} is empty")))
        }
    }
}

/// `a_k = Σ_{n=1}^{⌊M/k⌋} b(n) R_{nk}` for `k = 1..=M`, with `R` indexed
/// from 1.
fn moebius_invert(residuals: &[f64], twist: Twist) -> Result<Vec<f64>> {
    let m = residuals.len();
    let b = b_coefficients(twist, m)?;
    Ok((1..=m)
        .map(|k| {
            (1..=m / k)
                .map(|n| b.get(n) as f64 * residuals[n * k - 1])
                .sum()
        })
        .collect())
}

/// Cosine coefficients from residuals `L → R_L` (the returned band has
/// `c0 = 0`).
pub fn invert_coefficients(
    residuals: &BTreeMap<usize, f64>,
    twist: Twist,
    size_set: SizeSet,
) -> Result<FourierBand> {
    size_set.validate()?;
    let expected = size_set.sizes();
    for &l in &expected {
        match residuals.get(&l) {
            None => return Err(Error::MissingSize { size: l, twist }),
            Some(r) if !r.is_finite() => {
                return Err(Error::InvalidInput(format!("non-finite residual at L={l}")))
            }
            _ => {}
        }
    }
    if let Some(&extra) = residuals.keys().find(|l| !expected.contains(l)) {
        return Err(Error::UnsupportedSizeSet(format!(
            "size L={extra} is outside the declared set {size_set:?}"
        )));
    }

    let band = match size_set {
        SizeSet::AllFrom1(m) => {
            let r: Vec<f64> = (1..=m).map(|l| residuals[&l]).collect();
            FourierBand::new(0.0, moebius_invert(&r, twist)?)
        }
        SizeSet::EvenOnly(k) => {
            // f(k) restricted to even harmonics is g(2k); R_{2m}(f) = R_m(g)
            let r: Vec<f64> = (1..=k).map(|m| residuals[&(2 * m)]).collect();
            let half = moebius_invert(&r, twist)?;
            let mut coeffs = vec![0.0; 2 * k];
            for (m, a) in half.into_iter().enumerate() {
                coeffs[2 * m + 1] = a;
            }
            FourierBand::new(0.0, coeffs)
        }
        SizeSet::From2(m) => {
            // a_1 is the only coefficient that needs R_1
            let mut r: Vec<f64> = vec![0.0; m];
            for l in 2..=m {
                r[l - 1] = residuals[&l];
            }
            let mut coeffs = moebius_invert(&r, twist)?;
            coeffs[0] = 0.0;
            FourierBand {
                c0: 0.0,
                coeffs,
                undetermined_a1: true,
            }
        }
    };
    Ok(band)
}

/// Inputs shared by every hypothesis when reading one energy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionParams {
    /// Thermodynamic-limit energy density; subtracted from every `e_L`.
    pub e_inf: f64,
    /// Filling fraction ν.
    pub nu: f64,
    pub size_set: SizeSet,
    /// Boundary condition of the input data (the physical one).
    pub data_twist: Twist,
}

impl ReconstructionParams {
    pub fn new(e_inf: f64, nu: f64, size_set: SizeSet) -> Self {
        ReconstructionParams {
            e_inf,
            nu,
            size_set,
            data_twist: Twist::Pbc,
        }
    }

    pub fn with_data_twist(mut self, twist: Twist) -> Self {
        self.data_twist = twist;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.e_inf.is_finite() {
            return Err(Error::InvalidInput(format!(
                "e_inf must be finite, got {}",
                self.e_inf
            )));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "nu must be positive, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    /// Reconstructed dispersion ω.
    pub band: FourierBand,
    pub hypothesis: Hypothesis,
    pub admissible: bool,
    pub min_band_value: f64,
    /// `‖e_resynth − e_obs‖₂` over the sizes used.
    pub l2_residual_forward: f64,
}

/// Reconstruct ω under one hypothesis. With `f = ε (ν/2) ω`,
/// `R_L = e_L − e_inf` are the residuals of `f` and `ω = ε (2/ν) f`.
pub fn reconstruct_band(
    series: &EnergySeries,
    params: &ReconstructionParams,
    hypothesis: Hypothesis,
) -> Result<ReconstructionResult> {
    params.validate()?;
    let densities = series.densities(params.data_twist);
    let sizes = params.size_set.sizes();
    let mut residuals = BTreeMap::new();
    for &l in &sizes {
        let e = densities.get(&l).ok_or(Error::MissingSize {
            size: l,
            twist: params.data_twist,
        })?;
        residuals.insert(l, e - params.e_inf);
    }

    let mut f = invert_coefficients(&residuals, hypothesis.twist, params.size_set)?;
    f.c0 = params.e_inf;
    let scale = hypothesis.statistics.sign() * 2.0 / params.nu;
    let omega = f.scaled(scale);

    let (min_band_value, max_abs) = grid_extrema(&omega, GRID_POINTS);
    let admissible = min_band_value >= -TOL_POS * max_abs;

    let l2_residual_forward = sizes
        .iter()
        .map(|&l| {
            let e_syn = f.c0 + f.residual(l, hypothesis.twist);
            (e_syn - densities[&l]).powi(2)
        })
        .sum::<f64>()
        .sqrt();

    Ok(ReconstructionResult {
        band: omega,
        hypothesis,
        admissible,
        min_band_value,
        l2_residual_forward,
    })
}

/// All four hypotheses on the same data, in [`Hypothesis::ALL`] order.
pub fn classify(
    series: &EnergySeries,
    params: &ReconstructionParams,
) -> Result<Vec<ReconstructionResult>> {
    Hypothesis::ALL
        .par_iter()
        .map(|&h| reconstruct_band(series, params, h))
        .collect()
}

/// Hypotheses whose reconstructed band is non-negative.
pub fn admissible_set(results: &[ReconstructionResult]) -> Vec<Hypothesis> {
    results
        .iter()
        .filter(|r| r.admissible)
        .map(|r| r.hypothesis)
        .collect()
}

/// Sensitivity to the thermodynamic-limit estimate: the band reconstructed
/// with `e_inf ± delta`.
pub fn e_inf_perturbation(
    series: &EnergySeries,
    params: &ReconstructionParams,
    hypothesis: Hypothesis,
    delta: f64,
) -> Result<(ReconstructionResult, ReconstructionResult)> {
    let lo = ReconstructionParams {
        e_inf: params.e_inf - delta,
        ..*params
    };
    let hi = ReconstructionParams {
        e_inf: params.e_inf + delta,
        ..*params
    };
    Ok((
        reconstruct_band(series, &lo, hypothesis)?,
        reconstruct_band(series, &hi, hypothesis)?,
    ))
}

/// Defects of `E_{2L}^{(0)} = E_L^{(0)} + E_L^{(π)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub per_l_defect: BTreeMap<usize, f64>,
    pub max_relative_defect: f64,
}

/// Check the quasi-free identity for every `L` that has an antiperiodic
/// entry.
pub fn criterion_check(series: &EnergySeries) -> Result<CriterionReport> {
    let abc = series.sizes(Twist::Abc);
    if abc.is_empty() {
        return Err(Error::InvalidInput(
            "criterion needs antiperiodic energies".into(),
        ));
    }
    let mut per_l_defect = BTreeMap::new();
    let mut max_rel = 0.0f64;
    for l in abc {
        let e_l_abc = series.get(l, Twist::Abc).unwrap().e_total;
        let e_l_pbc = series
            .get(l, Twist::Pbc)
            .ok_or_else(|| Error::MissingCriterionEntry {
                l,
                missing: format!("(L={l}, pbc)"),
            })?;
        let e_2l = series
            .get(2 * l, Twist::Pbc)
            .ok_or_else(|| Error::MissingCriterionEntry {
                l,
                missing: format!("(L={}, pbc)", 2 * l),
            })?;
        let defect = e_2l.e_total - e_l_pbc.e_total - e_l_abc;
        max_rel = max_rel.max(defect.abs() / e_2l.e_total.abs().max(1e-30));
        per_l_defect.insert(l, defect);
    }
    Ok(CriterionReport {
        per_l_defect,
        max_relative_defect: max_rel,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtrapolationModel {
    /// `e_L = e_∞ + A e^{−L/ξ}`.
    Exponential,
    /// `e_L = e_∞ + B / L²`.
    PowerLaw2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub e_inf: f64,
    /// Root-mean-square fit residual.
    pub fit_residual: f64,
}

/// Experimental: estimate `e_∞` from the four largest sizes of one twist.
pub fn extrapolate_e_inf(
    series: &EnergySeries,
    twist: Twist,
    model: ExtrapolationModel,
) -> Result<Extrapolation> {
    let dens = series.densities(twist);
    if dens.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 sizes for extrapolation, got {}",
            dens.len()
        )));
    }
    let pts: Vec<(f64, f64)> = dens
        .iter()
        .rev()
        .take(4)
        .rev()
        .map(|(&l, &e)| (l as f64, e))
        .collect();

    match model {
        ExtrapolationModel::PowerLaw2 => {
            let (e_inf, _, ssr) = fit_constant_plus(&pts, |l| 1.0 / (l * l))?;
            Ok(Extrapolation {
                e_inf,
                fit_residual: (ssr / pts.len() as f64).sqrt(),
            })
        }
        ExtrapolationModel::Exponential => {
            let l0 = pts[0].0;
            let ssr_at = |kappa: f64| -> Result<(f64, f64)> {
                let (c, _, ssr) = fit_constant_plus(&pts, |l| (-kappa * (l - l0)).exp())?;
                Ok((c, ssr))
            };
            // coarse scan in log κ, then golden-section refinement
            let kappas: Vec<f64> = (0..=120)
                .map(|i| 10f64.powf(-3.0 + 0.05 * i as f64))
                .collect();
            let mut best = (f64::INFINITY, 0usize);
            for (i, &kappa) in kappas.iter().enumerate() {
                let (_, ssr) = ssr_at(kappa)?;
                if ssr < best.0 {
                    best = (ssr, i);
                }
            }
            let lo = kappas[best.1.saturating_sub(1)].ln();
            let hi = kappas[(best.1 + 1).min(kappas.len() - 1)].ln();
            let kappa = golden_min(
                |x| ssr_at(x.exp()).map(|r| r.1).unwrap_or(f64::INFINITY),
                lo,
                hi,
            )
            .exp();
            let (e_inf, ssr) = ssr_at(kappa)?;
            if !e_inf.is_finite() {
                return Err(Error::Fit("exponential fit diverged".into()));
            }
            Ok(Extrapolation {
                e_inf,
                fit_residual: (ssr / pts.len() as f64).sqrt(),
            })
        }
    }
}

/// Least squares for `y = c + a·g(x)`; returns `(c, a, ssr)`.
fn fit_constant_plus(pts: &[(f64, f64)], g: impl Fn(f64) -> f64) -> Result<(f64, f64, f64)> {
    let n = pts.len() as f64;
    let gs: Vec<f64> = pts.iter().map(|&(x, _)| g(x)).collect();
    let mg = gs.iter().sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sgg: f64 = gs.iter().map(|v| (v - mg).powi(2)).sum();
    let sgy: f64 = gs.iter().zip(pts).map(|(v, p)| (v - mg) * (p.1 - my)).sum();
    let a = if sgg > 1e-300 { sgy / sgg } else { 0.0 };
    let c = my - a * mg;
    if !c.is_finite() || !a.is_finite() {
        return Err(Error::Fit("degenerate least-squares system".into()));
    }
    let ssr = gs
        .iter()
        .zip(pts)
        .map(|(v, p)| (p.1 - c - a * v).powi(2))
        .sum();
    Ok((c, a, ssr))
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
