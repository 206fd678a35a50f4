//! Even, 2π-periodic one-particle bands and their partial Riemann sums.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::Twist;

/// Number of uniform grid points used for positivity checks, projections
/// and L² norms.
pub const GRID_POINTS: usize = 4096;

/// An even 2π-periodic function evaluated on the Brillouin zone `[0, 2π)`.
pub trait Band {
    fn value(&self, k: f64) -> f64;

    /// The mean value over the Brillouin zone, when known in closed form.
    fn mean(&self) -> Option<f64>;

    /// `S_L = (1/L) Σ_{n<L} f((2πn + θ)/L)`.
    fn riemann_sum(&self, l: usize, twist: Twist) -> f64 {
        direct_riemann_sum(|k| self.value(k), l, twist)
    }
}

/// Riemann sum by explicit summation over the `L` quasi-momenta.
pub fn direct_riemann_sum(f: impl Fn(f64) -> f64, l: usize, twist: Twist) -> f64 {
    assert!(l >= 1, "Riemann sum needs L >= 1");
    let theta = twist.angle();
    let lf = l as f64;
    let s: f64 = (0..l).map(|n| f((2.0 * PI * n as f64 + theta) / lf)).sum();
    s / lf
}

/// Uniform grid `k_j = 2πj/N`, `j < N`.
pub fn grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
}

/// `f(k) = c0 + Σ_{n=1}^{N} a_n cos(nk)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierBand {
    pub c0: f64,
    pub coeffs: Vec<f64>,
    /// When set, `a_1` is stored as zero and the band is only known modulo
    /// an additive `cos k` term.
    #[serde(default)]
    pub undetermined_a1: bool,
}

impl FourierBand {
    pub fn new(c0: f64, coeffs: Vec<f64>) -> Self {
        FourierBand {
            c0,
            coeffs,
            undetermined_a1: false,
        }
    }

    pub fn constant(c0: f64) -> Self {
        FourierBand::new(c0, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_n`, 1-based; zero beyond the stored degree.
    pub fn coeff(&self, n: usize) -> f64 {
        if n == 0 {
            self.c0
        } else {
            self.coeffs.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    /// Exact residual `R_L = S_L − c0 = Σ_{l≥1} q^l a_{lL}`.
    pub fn residual(&self, l: usize, twist: Twist) -> f64 {
        assert!(l >= 1, "residual needs L >= 1");
        let n = self.coeffs.len();
        let mut s = 0.0;
        let mut idx = l;
        let mut power = 1;
        while idx <= n {
            s += twist.phase_pow(power) as f64 * self.coeffs[idx - 1];
            idx += l;
            power += 1;
        }
        s
    }

    pub fn scaled(&self, factor: f64) -> FourierBand {
        FourierBand {
            c0: self.c0 * factor + 0.0,
            coeffs: self.coeffs.iter().map(|a| a * factor + 0.0).collect(),
            undetermined_a1: self.undetermined_a1,
        }
    }

    /// The band with `a_1` removed.
    pub fn without_cos_k(&self) -> FourierBand {
        let mut out = self.clone();
        if let Some(a1) = out.coeffs.first_mut() {
            *a1 = 0.0;
        }
        out
    }

    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        grid(n).map(|k| (k, self.value(k))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c0.is_finite() || self.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput(
                "band coefficients must be finite".into(),
            ));
        }
        Ok(())
    }
}

impl Band for FourierBand {
    fn value(&self, k: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(self.c0, |acc, (i, a)| acc + a * ((i + 1) as f64 * k).cos())
    }

    fn mean(&self) -> Option<f64> {
        Some(self.c0)
    }

    fn riemann_sum(&self, l: usize, twist: Twist) -> f64 {
        self.c0 + self.residual(l, twist)
    }
}

/// Uniformly sampled band on `[0, 2π)` with periodic linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    values: Vec<f64>,
}

impl SampleTable {
    pub const MIN_POINTS: usize = GRID_POINTS;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "sample table needs at least {} points, got {}",
                Self::MIN_POINTS,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "sample table has non-finite values".into(),
            ));
        }
        let n = values.len();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for j in 1..n {
            if (values[j] - values[n - j]).abs() > 1e-9 * scale {
                return Err(Error::InvalidInput(format!(
                    "sample table is not even about k=0 (index {j})"
                )));
            }
        }
        Ok(SampleTable { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: f64) -> f64 {
        let n = self.values.len();
        let x = k.rem_euclid(2.0 * PI) / (2.0 * PI) * n as f64;
        let i = (x.floor() as usize) % n;
        let t = x - x.floor();
        let a = self.values[i];
        let b = self.values[(i + 1) % n];
        a + t * (b - a)
    }
}

/// Dispersions given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedFormBand {
    /// `J √(sin²(k/2) + m²)`.
    MassiveSine {
        j: f64,
        m: f64,
    },
    /// `amplitude · |sin k|`.
    AbsSine {
        amplitude: f64,
    },
    Custom(SampleTable),
}

impl Band for ClosedFormBand {
    fn value(&self, k: f64) -> f64 {
        match self {
            ClosedFormBand::MassiveSine { j, m } => {
                let s = (0.5 * k).sin();
                j * (s * s + m * m).sqrt()
            }
            ClosedFormBand::AbsSine { amplitude } => amplitude * k.sin().abs(),
            ClosedFormBand::Custom(table) => table.value(k),
        }
    }

    fn mean(&self) -> Option<f64> {
        Some(match self {
            // (2/π) √(1+m²) E(1/(1+m²))
            ClosedFormBand::MassiveSine { j, m } => {
                let a2 = 1.0 + m * m;
                j * 2.0 / PI * a2.sqrt() * elliptic_e(1.0 / a2)
            }
            ClosedFormBand::AbsSine { amplitude } => 2.0 * amplitude / PI,
            ClosedFormBand::Custom(table) => {
                table.values.iter().sum::<f64>() / table.values.len() as f64
            }
        })
    }
}

/// Complete elliptic integral of the second kind, `E(m) = ∫₀^{π/2} √(1 − m sin²t) dt`,
/// via the arithmetic-geometric mean.
pub fn elliptic_e(m: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&m),
        "elliptic_e parameter out of range"
    );
    if m == 1.0 {
        return 1.0;
    }
    let mut a = 1.0;
    let mut g = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow2 = 0.5;
    for _ in 0..64 {
        if c.abs() < 1e-17 {
            break;
        }
        let an = 0.5 * (a + g);
        let gn = (a * g).sqrt();
        c = c * c / (4.0 * an);
        pow2 *= 2.0;
        sum += pow2 * c * c;
        a = an;
        g = gn;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// Cosine coefficients `a_0..a_N` (with `a_0` the mean) by trapezoidal
/// projection on an `n_grid` uniform grid.
pub fn project(band: &dyn Band, degree: usize, n_grid: usize) -> FourierBand {
    let values: Vec<f64> = grid(n_grid).map(|k| band.value(k)).collect();
    let nf = n_grid as f64;
    let c0 = values.iter().sum::<f64>() / nf;
    let coeffs = (1..=degree)
        .map(|n| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * (2.0 * PI * ((n * j) % n_grid) as f64 / nf).cos())
                .sum();
            2.0 * s / nf
        })
        .collect();
    FourierBand::new(c0, coeffs)
}

/// `∫₀^{2π} (f − g)² dk` on a uniform grid.
pub fn l2_sq_distance(f: &dyn Band, g: &dyn Band, n_grid: usize) -> f64 {
    let h = 2.0 * PI / n_grid as f64;
    grid(n_grid)
        .map(|k| {
            let d = f.value(k) - g.value(k);
            d * d
        })
        .sum::<f64>()
        * h
}

/// `∫₀^{2π} f² dk` on a uniform grid.
pub fn l2_sq_norm(f: &dyn Band, n_grid: usize) -> f64 {
    let h = 2.0 * PI / n_grid as f64;
    grid(n_grid).map(|k| f.value(k).powi(2)).sum::<f64>() * h
}

/// Minimum and maximum absolute value on the grid.
pub fn grid_extrema(f: &dyn Band, n_grid: usize) -> (f64, f64) {
    grid(n_grid).fold((f64::INFINITY, 0.0f64), |(lo, amax), k| {
        let v = f.value(k);
        (lo.min(v), amax.max(v.abs()))
    })
}
