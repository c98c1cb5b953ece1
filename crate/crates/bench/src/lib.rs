//! Deterministic input generators shared by the benchmark targets.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vocheck_core::{AdmissibleGroup, C64, FockVector, LhatElement, Space, State};

/// Cyclotomic coefficient group with one free generator off the unit circle.
pub fn standard_group(torsion_order: usize) -> AdmissibleGroup {
    AdmissibleGroup::cyclotomic(torsion_order, vec![C64::new(1.3, 0.45)])
        .expect("generator parameters are admissible")
}

/// Small superposition of oscillator states at mixed charges, seeded so
/// repeated runs measure the same workload.
pub fn mixed_vector(space: &Space, seed: u64) -> FockVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let rank = space.rank();
    let mut v = FockVector::zero();
    for _ in 0..6 {
        let n_osc = rng.gen_range(0..3);
        let osc = (0..n_osc)
            .map(|_| {
                (
                    rng.gen_range(0..rank) as u16,
                    rng.gen_range(1..=3u16),
                    1u16,
                )
            })
            .collect();
        let charge = (0..rank).map(|_| rng.gen_range(-1..=1)).collect();
        let coeff = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        v = v.add(&FockVector::unit(State::new(osc, charge)).scale(coeff));
    }
    v
}

/// Loop-algebra element touching every matrix unit and phase power once,
/// with seeded coefficients and shift labels.
pub fn dense_lhat(m: usize, n: usize, seed: u64) -> LhatElement {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut e = LhatElement::zero(m, n, 2);
    for i in 0..m {
        for j in 0..m {
            for f in 0..n {
                let l0 = rng.gen_range(-2..=2);
                let l1 = rng.gen_range(-2..=2);
                let coeff = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                e = e.add(&LhatElement::basis(m, n, i, j, f, l0, vec![l1]).scale(coeff));
            }
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_vector_is_reproducible() {
        let space = Space::plain(2, 6, 4);
        let a = mixed_vector(&space, 11);
        let b = mixed_vector(&space, 11);
        assert!(!a.is_empty());
        assert!(a.is_exact());
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn dense_lhat_covers_all_units() {
        let e = dense_lhat(3, 2, 5);
        assert_eq!(e.terms().count(), 3 * 3 * 2);
    }
}
