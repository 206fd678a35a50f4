use std::collections::BTreeMap;

use proptest::prelude::*;

use qfree::band::{direct_riemann_sum, Band, ClosedFormBand, FourierBand};
use qfree::forward::{residual_series, synth_energy_series};
use qfree::{
    b_coefficients, invert_coefficients, moebius, reconstruct_band, Hypothesis,
    ReconstructionParams, SizeSet, Statistics, Twist,
};

fn twist() -> impl Strategy<Value = Twist> {
    prop_oneof![Just(Twist::Pbc), Just(Twist::Abc)]
}

fn statistics() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn fourier_band(max_degree: usize) -> impl Strategy<Value = FourierBand> {
    (
        -2.0..2.0f64,
        prop::collection::vec(-1.0..1.0f64, 1..=max_degree),
    )
        .prop_map(|(c0, coeffs)| FourierBand::new(c0, coeffs))
}

fn max_abs_diff(a: &FourierBand, b: &FourierBand) -> f64 {
    let n = a.degree().max(b.degree());
    (1..=n)
        .map(|i| (a.coeff(i) - b.coeff(i)).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invert_recovers_finite_series(band in fourier_band(24), tw in twist(), extra in 0usize..6) {
        let m = band.degree() + extra;
        let sizes: Vec<usize> = (1..=m).collect();
        let r = residual_series(&band, &sizes, tw).unwrap();
        let got = invert_coefficients(&r, tw, SizeSet::AllFrom1(m)).unwrap();
        prop_assert!(max_abs_diff(&got, &band) <= 1e-12);
    }

    #[test]
    fn inversion_is_linear(
        r1 in prop::collection::vec(-1.0..1.0f64, 12),
        r2 in prop::collection::vec(-1.0..1.0f64, 12),
        alpha in -3.0..3.0f64,
        tw in twist(),
    ) {
        let as_map = |v: &[f64]| -> BTreeMap<usize, f64> {
            v.iter().enumerate().map(|(i, &x)| (i + 1, x)).collect()
        };
        let comb: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a + alpha * b).collect();
        let set = SizeSet::AllFrom1(12);
        let a = invert_coefficients(&as_map(&r1), tw, set).unwrap();
        let b = invert_coefficients(&as_map(&r2), tw, set).unwrap();
        let c = invert_coefficients(&as_map(&comb), tw, set).unwrap();
        for n in 1..=12 {
            prop_assert!((c.coeff(n) - a.coeff(n) - alpha * b.coeff(n)).abs() <= 1e-12);
        }
    }

    #[test]
    fn even_sizes_recover_even_harmonics(band in fourier_band(20), tw in twist()) {
        let k = band.degree().div_ceil(2) + 1;
        let sizes: Vec<usize> = (1..=k).map(|i| 2 * i).collect();
        let r = residual_series(&band, &sizes, tw).unwrap();
        let got = invert_coefficients(&r, tw, SizeSet::EvenOnly(k)).unwrap();
        for n in 1..=2 * k {
            let want = if n % 2 == 0 { band.coeff(n) } else { 0.0 };
            prop_assert!((got.coeff(n) - want).abs() <= 1e-12, "n={} got {} want {}", n, got.coeff(n), want);
        }
    }

    #[test]
    fn extra_sizes_do_not_change_low_coefficients(band in fourier_band(10), tw in twist()) {
        let m = band.degree();
        let all: Vec<usize> = (1..=m + 5).collect();
        let r = residual_series(&band, &all, tw).unwrap();
        let short: BTreeMap<usize, f64> = r.range(1..=m).map(|(&k, &v)| (k, v)).collect();
        let a = invert_coefficients(&short, tw, SizeSet::AllFrom1(m)).unwrap();
        let b = invert_coefficients(&r, tw, SizeSet::AllFrom1(m + 5)).unwrap();
        for n in 1..=m {
            prop_assert!((a.coeff(n) - b.coeff(n)).abs() <= 1e-12);
        }
        for n in m + 1..=m + 5 {
            prop_assert!(b.coeff(n).abs() <= 1e-12);
        }
    }

    #[test]
    fn flipping_statistics_negates_band(band in fourier_band(8), stat in statistics(), tw in twist()) {
        let shifted = FourierBand::new(band.c0.abs() + 10.0, band.coeffs.clone());
        let m = shifted.degree();
        let sizes: Vec<usize> = (1..=m).collect();
        let series = synth_energy_series(&shifted, stat, 1.5, tw, &sizes).unwrap();
        let e_inf = series.metadata.e_inf.unwrap();
        let params = ReconstructionParams::new(e_inf, 1.5, SizeSet::AllFrom1(m)).with_data_twist(tw);
        let a = reconstruct_band(&series, &params, Hypothesis::new(stat, tw)).unwrap();
        let b = reconstruct_band(&series, &params, Hypothesis::new(stat.flipped(), tw)).unwrap();
        prop_assert!(a.admissible && !b.admissible);
        prop_assert!((a.band.c0 + b.band.c0).abs() <= 1e-12);
        for n in 1..=m {
            prop_assert!((a.band.coeff(n) + b.band.coeff(n)).abs() <= 1e-12);
            prop_assert!((a.band.coeff(n) - shifted.coeff(n)).abs() <= 1e-10);
        }
        prop_assert!(a.l2_residual_forward <= 1e-10);
    }

    #[test]
    fn exact_and_direct_sums_agree(band in fourier_band(16), tw in twist(), l in 1usize..80) {
        let exact = band.riemann_sum(l, tw);
        let direct = direct_riemann_sum(|k| band.value(k), l, tw);
        prop_assert!((exact - direct).abs() <= 1e-12 * (1.0 + band.coeffs.len() as f64));
    }

    #[test]
    fn doubled_zone_is_union_of_twists(j in 0.1..3.0f64, m in 0.0..1.0f64, l in 1usize..60) {
        let band = ClosedFormBand::MassiveSine { j, m };
        let lhs = 2.0 * band.riemann_sum(2 * l, Twist::Pbc);
        let rhs = band.riemann_sum(l, Twist::Pbc) + band.riemann_sum(l, Twist::Abc);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn moebius_is_multiplicative(a in 1u64..5000, b in 1u64..5000) {
        let g = num_gcd(a, b);
        if g == 1 {
            prop_assert_eq!(moebius(a * b).unwrap(), moebius(a).unwrap() * moebius(b).unwrap());
        }
    }
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[test]
fn inverse_coefficients_bounded() {
    for tw in Twist::BOTH {
        let b = b_coefficients(tw, 2048).unwrap();
        for (i, &v) in b.as_slice().iter().enumerate() {
            assert!(v.unsigned_abs() <= (i + 1) as u64);
        }
    }
}
