#![allow(dead_code)]

use plumepipe_core::{HyperCube, Mask, SeededRng};

pub fn cube(seed: u64, rows: usize, cols: usize, wavelengths: Vec<f64>, invalid_frac: f64) -> HyperCube<f64> {
    let mut rng = SeededRng::new(seed);
    let bands = wavelengths.len();
    let data = (0..rows * cols * bands).map(|_| rng.uniform(10.0, 20.0)).collect();
    let valid = (0..rows * cols).map(|_| rng.next_f64() >= invalid_frac).collect();
    HyperCube::new(rows, cols, wavelengths, data, valid).unwrap()
}

pub fn mask(rng: &mut SeededRng, rows: usize, cols: usize, p: f64) -> Mask {
    Mask::new(rows, cols, (0..rows * cols).map(|_| rng.next_f64() < p).collect()).unwrap()
}

pub fn same_bits(a: &HyperCube<f64>, b: &HyperCube<f64>) -> bool {
    a.shape() == b.shape()
        && a.wavelengths_nm() == b.wavelengths_nm()
        && a.valid_mask() == b.valid_mask()
        && a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits())
}
