mod common;

use common::*;
use num_complex::Complex64;
use otfs_core::channel::{apply_channel_circular, Scatterer};
use otfs_core::modem::{dd_response, doppler_kernel, doppler_spread_dzt, receive};
use otfs_core::overlay::{isfft, sfft};
use otfs_core::zak::{
    dft, dft_from_dzt, dzt, dzt_from_dft, expansion_coefficients, idzt, shift_in_zak, zak_convolve,
    zak_modulate, zak_product_from_coefficients,
};
use otfs_core::{ChannelSpec, FrameConfig, GridShape, PeriodicSequence, PulseSpec};
use proptest::prelude::*;

fn shapes() -> impl Strategy<Value = GridShape> {
    (1usize..=8, 1usize..=8).prop_map(|(k, l)| GridShape::new(k, l).unwrap())
}

fn seq(seed: u64, shape: GridShape) -> PeriodicSequence {
    random_sequence(&mut rng(seed), shape.period())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_recovers_sequence(shape in shapes(), seed in any::<u64>()) {
        let x = seq(seed, shape);
        let back = idzt(&dzt(&x, shape).unwrap());
        prop_assert!(back.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn transform_matches_direct_sum(shape in shapes(), seed in any::<u64>()) {
        let x = seq(seed, shape);
        let z = dzt(&x, shape).unwrap();
        prop_assert!(max_diff2(z.values(), &direct_dzt(x.samples(), shape)) < 1e-12);
        prop_assert!(max_diff(&direct_idzt(z.values()), x.samples()) < 1e-12);
    }

    #[test]
    fn energy_is_preserved(shape in shapes(), seed in any::<u64>()) {
        let x = seq(seed, shape);
        let z = dzt(&x, shape).unwrap();
        prop_assert!((z.energy() - x.energy()).abs() < 1e-10 * x.energy().max(1.0));
    }

    #[test]
    fn spectrum_routes_agree(shape in shapes(), seed in any::<u64>()) {
        let x = seq(seed, shape);
        let z = dzt(&x, shape).unwrap();
        let spectrum = dft(&x);
        prop_assert!(max_diff(spectrum.coefficients(), &direct_dft(x.samples())) < 1e-12);
        prop_assert!(dzt_from_dft(&spectrum, shape).unwrap().max_abs_diff(&z) < 1e-10);
        prop_assert!(dft_from_dzt(&z).max_abs_diff(&spectrum) < 1e-10);
    }

    #[test]
    fn extension_is_quasi_periodic(shape in shapes(), seed in any::<u64>(), n in -40i64..40, k in -40i64..40) {
        let x = seq(seed, shape);
        let z = dzt(&x, shape).unwrap();
        let expected = zak_at(x.samples(), shape.k(), shape.l(), n, k);
        prop_assert!((z.eval_extended(n, k) - expected).norm() < 1e-12);
    }

    #[test]
    fn delay_is_a_zak_shift(shape in shapes(), seed in any::<u64>(), m in -20i64..20) {
        let x = seq(seed, shape);
        let shifted = shift_in_zak(&dzt(&x, shape).unwrap(), m);
        prop_assert!(max_diff2(shifted.values(), &direct_dzt(&delayed(x.samples(), m), shape)) < 1e-12);
    }

    #[test]
    fn product_and_convolution(shape in shapes(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_sequence(&mut r, shape.period());
        let y = random_sequence(&mut r, shape.period());
        let (zx, zy) = (dzt(&x, shape).unwrap(), dzt(&y, shape).unwrap());
        let modulated = zak_modulate(&zx, &zy).unwrap();
        prop_assert!(max_diff2(modulated.values(), &direct_dzt(&product(x.samples(), y.samples()), shape)) < 1e-10);
        let convolved = zak_convolve(&zx, &zy).unwrap();
        let oracle = direct_dzt(&circular_convolution(x.samples(), y.samples()), shape);
        prop_assert!(max_diff2(convolved.values(), &oracle) < 1e-10);
    }

    #[test]
    fn expansion_round_trip(shape in shapes(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_sequence(&mut r, shape.period());
        let y = random_sequence(&mut r, shape.period());
        let c = expansion_coefficients(&x, &y, shape).unwrap();
        prop_assert!(max_diff2(&c, &direct_expansion(x.samples(), y.samples(), shape)) < 1e-10);
        let product = zak_product_from_coefficients(&c, shape).unwrap();
        let expected = direct_dzt(x.samples(), shape) * direct_dzt(y.samples(), shape).mapv(|v| v.conj());
        prop_assert!(max_diff2(product.values(), &expected) < 1e-10);
    }

    #[test]
    fn symplectic_pair(shape in shapes(), seed in any::<u64>()) {
        let z = random_zak(&mut rng(seed), shape);
        let frame = isfft(&z);
        prop_assert!(max_diff2(frame.symbols(), &direct_isfft(z.values())) < 1e-12);
        prop_assert!(sfft(&frame).max_abs_diff(&z) < 1e-12);
        prop_assert!((frame.energy() - z.energy()).abs() < 1e-10);
    }

    #[test]
    fn doppler_kernel_parseval(k in 1usize..40, k_p in -50.0f64..50.0) {
        let e: f64 = doppler_kernel(k_p, k).iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((e - k as f64).abs() < 1e-9 * k as f64);
    }

    #[test]
    fn doppler_spread_matches_tone_transform(shape in shapes(), k_p in -10.0f64..10.0) {
        let tone = doppler_tone(k_p, shape.period());
        prop_assert!(max_diff2(doppler_spread_dzt(k_p, shape).values(), &direct_dzt(&tone, shape)) < 1e-10);
    }

    #[test]
    fn dd_relation_matches_sampled_channel(
        shape in shapes(),
        seed in any::<u64>(),
        beta in 0.0f64..=1.0,
        paths in prop::collection::vec((0.0f64..1.0, -4.0f64..4.0), 1..4),
    ) {
        let cfg = FrameConfig::new(shape, 1e-6, 0).unwrap();
        let pulse = PulseSpec::raised_cosine(beta, 1e-6).unwrap();
        let mut r = rng(seed);
        let scatterers = paths
            .iter()
            .map(|&(d, k_p)| {
                let delay = d * shape.l() as f64;
                Scatterer::on_grid(random_complex(&mut r), delay, k_p, &cfg).unwrap()
            })
            .collect();
        let spec = ChannelSpec::new(scatterers, 0.0).unwrap();
        let z = random_zak(&mut r, shape);
        let y = apply_channel_circular(&idzt(&z), &spec, &pulse, &cfg, None).unwrap();
        let oracle = receive(&y, &cfg).unwrap();
        prop_assert!(dd_response(&z, &spec, &pulse, &cfg).unwrap().max_abs_diff(&oracle) < 1e-10);
    }
}

#[test]
fn basis_sequences_are_orthonormal() {
    let shape = GridShape::new(3, 4).unwrap();
    let basis: Vec<_> = (0..4)
        .flat_map(|n| (0..3).map(move |k| (n, k)))
        .map(|(n, k)| otfs_core::zak::basis_sequence(n, k, shape).unwrap())
        .collect();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b).unwrap() - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn shift_by_ten_on_thirty_grid() {
    // A 30 x 30 grid shifted by ten samples wraps a third of the rows with a
    // quasi-periodic phase.
    let shape = GridShape::new(30, 30).unwrap();
    let x = random_sequence(&mut rng(4), 900);
    let z = dzt(&x, shape).unwrap();
    let shifted = shift_in_zak(&z, 10);
    for n in 0..30usize {
        for k in 0..30usize {
            let expected = if n >= 10 {
                z.get(n - 10, k)
            } else {
                z.get(n + 20, k) * root(-(k as i64), 30)
            };
            assert!((shifted.get(n, k) - expected).norm() < 1e-13);
        }
    }
}
