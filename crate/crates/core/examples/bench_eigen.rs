use cmv_core::spectral::truncation_spectrum;
use cmv_core::verblunsky::{assemble_extended, Boundary, VerblunskySequence};
use cmv_core::C64;
use std::time::Instant;

fn main() {
    for n in [500usize, 2000, 4000] {
        let vals: Vec<C64> = (0..n)
            .map(|i| {
                let s = ((i as u64).wrapping_mul(0x9e3779b97f4a7c15) >> 11) as f64
                    / (1u64 << 53) as f64;
                C64::new(0.6 * (s - 0.5), 0.3 * ((s * 7.0).fract() - 0.5))
            })
            .collect();
        let seq = VerblunskySequence::from_values(0, &vals).unwrap();
        let w = assemble_extended(&seq, (0, n as i64 - 1), Boundary::both(C64::new(1.0, 0.0))).unwrap();
        let t0 = Instant::now();
        let spec = truncation_spectrum(&w).unwrap();
        println!("n = {n}: {} phases in {:?}", spec.len(), t0.elapsed());
    }
}
