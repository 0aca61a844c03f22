mod common;

use common::*;
use graph_outlier::spectrum::LaplacianSpectrum;
use graph_outlier::synth::{smooth_from_white, smooth_signal, synthesize, SynthConfig};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn observation_is_assembled_in_order(n in 3usize..20, seed: u64, m in 0usize..3) {
        let g = random_graph(n, 0.6, seed);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let cfg = SynthConfig { n_outliers: m, ..SynthConfig::default() };
        let truth = synthesize(&sp, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(truth.n_outliers(), m);
        for i in 0..n {
            let expected = (truth.f[i] + truth.noise[i]) + truth.outlier_values[i];
            prop_assert_eq!(truth.y[i].to_bits(), expected.to_bits());
            prop_assert_eq!(truth.outlier_mask[i], truth.outlier_values[i] != 0.0);
            prop_assert!((truth.y[i] - truth.f[i] - truth.outlier_values[i] - truth.noise[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_truth(n in 3usize..20, seed: u64) {
        let g = random_graph(n, 0.6, seed);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let cfg = SynthConfig { n_outliers: 2, ..SynthConfig::default() };
        let a = synthesize(&sp, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = synthesize(&sp, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn whitening_inverts_the_precision(n in 2usize..14, seed: u64) {
        // f = (L + rI)^{-1/2} z, so fᵀ(L + rI)f = zᵀz per draw
        let g = random_graph(n, 0.7, seed);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let z = random_signal(n, seed ^ 7);
        let f = smooth_from_white(&sp, 0.1, &z);
        let energy = g.quadratic_form(&f).unwrap() + 0.1 * f.iter().map(|x| x * x).sum::<f64>();
        let zz: f64 = z.iter().map(|x| x * x).sum();
        prop_assert!((energy - zz).abs() < 1e-8 * zz.max(1.0), "{energy} vs {zz}");
    }
}

#[test]
fn mean_precision_energy_equals_node_count() {
    let g = random_graph(12, 0.5, 5);
    let sp = LaplacianSpectrum::of(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 10_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let f = smooth_signal(&sp, 0.1, &mut rng);
        acc += g.quadratic_form(&f).unwrap() + 0.1 * f.iter().map(|x| x * x).sum::<f64>();
    }
    let mean = acc / draws as f64;
    assert!((mean - 12.0).abs() < 0.05 * 12.0, "{mean}");
}

#[test]
fn path_covariance_matches_inverse_precision() {
    let g = path(3);
    let sp = LaplacianSpectrum::of(&g).unwrap();
    let target = (g.laplacian() + DMatrix::identity(3, 3) * 0.1).try_inverse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 100_000;
    let mut cov = DMatrix::<f64>::zeros(3, 3);
    for _ in 0..draws {
        let f = DVector::from_vec(smooth_signal(&sp, 0.1, &mut rng));
        cov += &f * f.transpose();
    }
    cov /= draws as f64;
    // entries are near 3.3, so compare relative to the largest
    let scale = target.abs().max();
    let gap = (&cov - &target).abs().max() / scale;
    assert!(gap < 0.05, "covariance gap {gap}\n{cov}\n{target}");
}
