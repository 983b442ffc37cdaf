mod common;

use plumepipe_core::geometry::{back_sample, nn_fill, orthorectify, unorthorectify, CombineRule, SparseRaster};
use plumepipe_core::synth::{gen_bijective_glt, gen_glt, Distortion};
use plumepipe_core::{Glt, HyperCube, SeededRng};
use proptest::prelude::*;

fn sparse(seed: u64, rows: usize, cols: usize, density: f64) -> SparseRaster<f64> {
    let mut rng = SeededRng::new(seed);
    let set_mask: Vec<bool> = (0..rows * cols).map(|_| rng.next_f64() < density).collect();
    let values = (0..rows * cols).map(|_| rng.below(50) as f64).collect();
    SparseRaster { rows, cols, bands: 1, wavelengths_nm: vec![0.0], values, set_mask }
}

fn oracle(s: &SparseRaster<f64>, i: usize) -> f64 {
    let (r, c) = ((i / s.cols) as i64, (i % s.cols) as i64);
    let j = (0..s.rows * s.cols)
        .filter(|&j| s.set_mask[j])
        .min_by_key(|&j| {
            let (sr, sc) = ((j / s.cols) as i64, (j % s.cols) as i64);
            ((sr - r).pow(2) + (sc - c).pow(2), sr, sc)
        })
        .unwrap();
    s.values[j]
}

fn skewed(seed: u64, rows: usize, cols: usize) -> Glt {
    let mut rng = SeededRng::new(seed);
    let d = Distortion {
        skew_cols_per_line: rng.uniform(-0.5, 0.5),
        cross_track_scale: rng.uniform(0.6, 1.5),
        along_track_scale: rng.uniform(0.6, 1.5),
        wobble_amplitude_cols: rng.uniform(0.0, 2.0),
        ..Default::default()
    };
    gen_glt(rows, cols, &d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bijective_round_trip(seed in any::<u64>(), rows in 1usize..40, cols in 1usize..40) {
        let glt = gen_bijective_glt(rows, cols, &mut SeededRng::new(seed));
        let ortho = common::cube(seed ^ 1, rows, cols, vec![1.0, 2.0], 0.0);
        let src = unorthorectify(&ortho, &glt, CombineRule::First, 0).unwrap();
        prop_assert!(common::same_bits(&orthorectify(&src, &glt).unwrap(), &ortho));
    }

    #[test]
    fn fill_is_idempotent(seed in any::<u64>(), rows in 1usize..30, cols in 1usize..30, density in 0.01f64..0.6) {
        let s = sparse(seed, rows, cols, density);
        let region = vec![true; rows * cols];
        prop_assume!(s.set_count() > 0);
        let once = nn_fill(&s, &region).unwrap();
        let twice = nn_fill(&SparseRaster::from(&once), &region).unwrap();
        prop_assert!(common::same_bits(&once, &twice));
    }

    #[test]
    fn fill_matches_exhaustive_oracle(seed in any::<u64>(), rows in 1usize..64, cols in 1usize..64, density in 0.001f64..0.3) {
        let s = sparse(seed, rows, cols, density);
        prop_assume!(s.set_count() > 0);
        let out = nn_fill(&s, &vec![true; rows * cols]).unwrap();
        for i in 0..rows * cols {
            prop_assert_eq!(out.data()[i], oracle(&s, i));
        }
    }

    #[test]
    fn union_never_adds_positives(seed in any::<u64>(), rows in 4usize..40, cols in 4usize..40, p in 0.0f64..0.5) {
        let glt = skewed(seed, rows, cols);
        let (orows, ocols) = glt.ortho_shape();
        let mut rng = SeededRng::new(seed ^ 7);
        let mask = common::mask(&mut rng, orows, ocols, p);
        let back = back_sample(&mask.to_cube::<f64>(None), &glt, CombineRule::Union).unwrap();
        let positives = (0..rows * cols).filter(|&i| back.set_mask[i] && back.values[i] > 0.5).count();
        prop_assert!(positives <= mask.count());
    }

    #[test]
    fn warps_are_deterministic_across_pools(seed in any::<u64>(), rows in 4usize..32, cols in 4usize..32) {
        let glt = skewed(seed, rows, cols);
        let src = common::cube(seed, rows, cols, vec![1.0, 2.0, 3.0], 0.1);
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let ortho = orthorectify(&src, &glt).unwrap();
                let back = unorthorectify(&ortho, &glt, CombineRule::Max, 1);
                (ortho, back.ok())
            })
        };
        let (a, b) = (run(1), run(4));
        prop_assert!(common::same_bits(&a.0, &b.0));
        match (a.1, b.1) {
            (Some(x), Some(y)) => prop_assert!(common::same_bits(&x, &y)),
            (None, None) => {}
            _ => prop_assert!(false, "fill succeeded on one pool only"),
        }
    }

    #[test]
    fn zero_distortion_is_identity(seed in any::<u64>(), rows in 1usize..40, cols in 1usize..40) {
        let glt = gen_glt(rows, cols, &Distortion::default()).unwrap();
        prop_assert_eq!(&glt, &Glt::identity(rows, cols));
        let src: HyperCube<f64> = common::cube(seed, rows, cols, vec![5.0], 0.0);
        let ortho = orthorectify(&src, &glt).unwrap();
        prop_assert!(common::same_bits(&ortho, &src));
        prop_assert!(common::same_bits(&unorthorectify(&ortho, &glt, CombineRule::First, 0).unwrap(), &src));
    }
}
