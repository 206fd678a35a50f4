//! Exact integer number theory behind the coefficient inversion.
//!
//! The partial Riemann sums of an even band satisfy `R = G a`, where
//! `G[M][m] = q^l` when `m = l·M` and zero otherwise (`q = +1` for periodic,
//! `q = -1` for antiperiodic momenta). The inverse has the same divisor
//! structure, `G⁻¹[i][j] = b(j/i)`, with `b` defined by the Dirichlet
//! convolution identity `Σ_{m|j} q^{j/m} b(m) = δ_{1,j}`. For `q = +1`
//! this is the Möbius function.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary twist of the momentum grid, restricted to `θ ∈ {0, π}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Pbc,
    Abc,
}

impl Twist {
    pub const BOTH: [Twist; 2] = [Twist::Pbc, Twist::Abc];

    /// `q = e^{iθ}`.
    pub fn phase(self) -> i64 {
        match self {
            Twist::Pbc => 1,
            Twist::Abc => -1,
        }
    }

    pub fn angle(self) -> f64 {
        match self {
            Twist::Pbc => 0.0,
            Twist::Abc => std::f64::consts::PI,
        }
    }

    /// `q^l` for `l ≥ 0`.
    pub fn phase_pow(self, l: usize) -> i64 {
        match self {
            Twist::Pbc => 1,
            Twist::Abc => {
                if l % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Twist::Pbc => "pbc",
            Twist::Abc => "abc",
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Twist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pbc" | "0" => Ok(Twist::Pbc),
            "abc" | "pi" => Ok(Twist::Abc),
            other => Err(Error::Parse(format!(
                "unknown twist '{other}' (expected pbc or abc)"
            ))),
        }
    }
}

pub const DEFAULT_SIEVE_BOUND: usize = 1_000_000;

/// Smallest-prime-factor sieve. Above the bound, lookups fall back to trial
/// division.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(bound: usize) -> Self {
        let bound = bound.max(1);
        let mut spf = vec![0u32; bound + 1];
        for i in 2..=bound {
            if spf[i] == 0 {
                let p = i as u32;
                let mut j = i;
                while j <= bound {
                    if spf[j] == 0 {
                        spf[j] = p;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    /// The shared default-bound sieve.
    pub fn global() -> &'static Sieve {
        static SIEVE: OnceLock<Sieve> = OnceLock::new();
        SIEVE.get_or_init(|| Sieve::new(DEFAULT_SIEVE_BOUND))
    }

    pub fn bound(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn moebius(&self, n: u64) -> Result<i8> {
        if n == 0 {
            return Err(Error::Domain("moebius(0) is undefined".into()));
        }
        if (n as u128) > self.bound() as u128 {
            return Ok(moebius_trial(n));
        }
        let mut n = n as usize;
        let mut sign = 1i8;
        while n > 1 {
            let p = self.spf[n] as usize;
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        Ok(sign)
    }
}

fn moebius_trial(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Möbius function μ(n).
pub fn moebius(n: u64) -> Result<i8> {
    Sieve::global().moebius(n)
}

/// Mertens function M(x) = Σ_{n≤x} μ(n).
pub fn mertens(x: u64) -> Result<i64> {
    if x == 0 {
        return Err(Error::Domain("mertens(0) is undefined".into()));
    }
    let sieve = Sieve::global();
    (1..=x).try_fold(0i64, |acc, n| Ok(acc + sieve.moebius(n)? as i64))
}

/// Positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("divisors(0) is undefined".into()));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Inverse coefficients `b(1..=M)` for one twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BCoefficients {
    twist: Twist,
    values: Vec<i64>,
}

impl BCoefficients {
    pub fn twist(&self) -> Twist {
        self.twist
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `b(n)`, 1-based.
    pub fn get(&self, n: usize) -> i64 {
        self.values[n - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.values
    }
}

/// Solve `Σ_{m|j} q^{j/m} b(m) = δ_{1,j}` for `j = 1..=M` by recursion.
///
/// `b(1) = q⁻¹` and `b(j) = -q⁻¹ Σ_{m|j, m<j} q^{j/m} b(m)`. Since
/// `q = ±1`, `q⁻¹ = q` and everything stays in integers.
pub fn b_coefficients(twist: Twist, m: usize) -> Result<BCoefficients> {
    if m == 0 {
        return Err(Error::Domain("b_coefficients needs M >= 1".into()));
    }
    let q = twist.phase();

    // proper divisors via a sieve over multiples: O(M log M)
    let mut proper: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
    for d in 1..=m / 2 {
        let mut j = 2 * d;
        while j <= m {
            proper[j].push(d as u32);
            j += d;
        }
    }

    let mut values = vec![0i64; m];
    values[0] = q;
    for j in 2..=m {
        let s: i64 = proper[j]
            .iter()
            .map(|&d| {
                let d = d as usize;
                twist.phase_pow(j / d) * values[d - 1]
            })
            .sum();
        values[j - 1] = -q * s;
    }
    Ok(BCoefficients { twist, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(4).unwrap(), 0);
        assert_eq!(moebius(6).unwrap(), 1);
        assert_eq!(moebius(30).unwrap(), -1);
        assert!(matches!(moebius(0), Err(Error::Domain(_))));
    }

    #[test]
    fn moebius_above_sieve_bound() {
        let small = Sieve::new(100);
        for n in 1..=2000u64 {
            assert_eq!(small.moebius(n).unwrap(), moebius(n).unwrap(), "n={n}");
        }
        // 1_000_003 is prime, 1_000_006 = 2 * 7 * 71_429
        assert_eq!(moebius(1_000_003).unwrap(), -1);
        assert_eq!(moebius(1_000_006).unwrap(), -1);
        assert_eq!(moebius(4_000_000).unwrap(), 0);
    }

    #[test]
    fn mertens_examples() {
        assert_eq!(mertens(1).unwrap(), 1);
        assert_eq!(mertens(2).unwrap(), 0);
        // oracle: direct sum of μ(1..5) = 1 - 1 - 1 + 0 - 1
        assert_eq!(mertens(5).unwrap(), -2);
        assert!(mertens(0).is_err());
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(7).unwrap(), vec![1, 7]);
        assert_eq!(divisors(36).unwrap(), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert!(divisors(0).is_err());
    }

    #[test]
    fn b_examples() {
        assert_eq!(
            b_coefficients(Twist::Pbc, 4).unwrap().as_slice(),
            &[1, -1, -1, 0]
        );
        assert_eq!(
            b_coefficients(Twist::Abc, 3).unwrap().as_slice(),
            &[-1, -1, 1]
        );
        assert_eq!(b_coefficients(Twist::Abc, 1).unwrap().as_slice(), &[-1]);
        assert!(b_coefficients(Twist::Pbc, 0).is_err());
    }

    #[test]
    fn abc_inverse_of_three_by_three() {
        // G with q = -1, rows M = 1..3: [q q² q³; 0 q 0; 0 0 q]
        let g = [[-1i64, 1, -1], [0, -1, 0], [0, 0, -1]];
        let b = b_coefficients(Twist::Abc, 3).unwrap();
        let mut inv = [[0i64; 3]; 3];
        for i in 1..=3 {
            for j in 1..=3 {
                if j % i == 0 {
                    inv[i - 1][j - 1] = b.get(j / i);
                }
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                let v: i64 = (0..3).map(|k| inv[r][k] * g[k][c]).sum();
                assert_eq!(v, (r == c) as i64);
            }
        }
    }

    #[test]
    fn divisor_identity_and_mertens_increments() {
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n)
                .unwrap()
                .iter()
                .map(|&d| moebius(d).unwrap() as i64)
                .sum();
            assert_eq!(s, (n == 1) as i64, "n={n}");
        }
        let mut m = 1i64;
        for x in 2..=10_000u64 {
            let next = m + moebius(x).unwrap() as i64;
            assert_eq!(next - m, moebius(x).unwrap() as i64);
            m = next;
        }
        assert_eq!(m, mertens(10_000).unwrap());
        // tabulated: M(10^4) = -23
        assert_eq!(m, -23);
    }

    #[test]
    fn b_sanity_bound() {
        for twist in Twist::BOTH {
            let b = b_coefficients(twist, 4096).unwrap();
            for n in 1..=4096 {
                assert!(b.get(n).unsigned_abs() as usize <= n, "{twist} n={n}");
            }
        }
    }

    #[test]
    fn pbc_is_moebius() {
        let b = b_coefficients(Twist::Pbc, 10_000).unwrap();
        for n in 1..=10_000 {
            assert_eq!(b.get(n), moebius(n as u64).unwrap() as i64);
        }
    }
}
