//! Integer lattice with orthonormal basis, its sign two-cocycle, and the
//! complex extension of both used for shifted (non-integral) charge sectors.

use crate::scalars::{pi_phase, C64, Half};
use std::f64::consts::PI;

/// Absolute tolerance for "is this float an integer" checks on sector data.
pub const INT_TOL: f64 = 1e-9;
/// Tighter snap tolerance: exponents this close to a half-integer are treated
/// as exact and produce an exact fourth-root-of-unity phase.
pub const SNAP_TOL: f64 = 1e-12;

/// Rank-`rank` free abelian group Z^rank with the standard pairing
/// (e_i, e_j) = delta_ij, plus the bimultiplicative sign cocycle fixed by
/// eps(e_i, e_j) = -1 exactly when i > j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    rank: usize,
}

impl Lattice {
    /// New lattice of the given rank (number of orthonormal basis vectors).
    pub fn new(rank: usize) -> Self {
        Lattice { rank }
    }

    /// Rank of the lattice.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// i-th basis vector (0-based) as a coordinate vector.
    pub fn eps(&self, i: usize) -> Vec<i64> {
        assert!(i < self.rank, "basis index {} out of range {}", i, self.rank);
        let mut v = vec![0i64; self.rank];
        v[i] = 1;
        v
    }

    /// e_i - e_j, the root attached to an off-diagonal matrix slot.
    pub fn root(&self, i: usize, j: usize) -> Vec<i64> {
        let mut v = self.eps(i);
        v[j] -= 1;
        v
    }

    /// Integer inner product (a, b) in the orthonormal basis.
    pub fn ip(&self, a: &[i64], b: &[i64]) -> i64 {
        assert_eq!(a.len(), self.rank);
        assert_eq!(b.len(), self.rank);
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Bilinear (not hermitian) inner product of complex coordinate vectors.
    pub fn ip_c(&self, a: &[C64], b: &[C64]) -> C64 {
        assert_eq!(a.len(), self.rank);
        assert_eq!(b.len(), self.rank);
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Mixed pairing of an integer vector with a complex vector.
    pub fn ip_ic(&self, a: &[i64], b: &[C64]) -> C64 {
        assert_eq!(a.len(), self.rank);
        assert_eq!(b.len(), self.rank);
        a.iter().zip(b).map(|(&x, y)| y * x as f64).sum()
    }

    /// Sign cocycle eps(a, b) = (-1)^(sum_{i>j} a_i b_j), valued in {1, -1}.
    ///
    /// Bimultiplicative in both slots; on basis vectors eps(e_i, e_j) = 1 for
    /// i <= j and -1 for i > j.
    pub fn cocycle(&self, a: &[i64], b: &[i64]) -> i64 {
        assert_eq!(a.len(), self.rank);
        assert_eq!(b.len(), self.rank);
        let mut exponent = 0i64;
        for i in 1..self.rank {
            for j in 0..i {
                exponent += a[i] * b[j];
            }
        }
        if exponent.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Cocycle eps(a, x) with a complex second slot, defined through
    /// exp(i*pi * sum_{i>j} a_i x_j) so that integer x recovers [`cocycle`].
    ///
    /// Exponents within [`SNAP_TOL`] of a half-integer are snapped and produce
    /// an exact fourth root of unity.
    pub fn cocycle_c(&self, a: &[i64], x: &[C64]) -> C64 {
        assert_eq!(a.len(), self.rank);
        assert_eq!(x.len(), self.rank);
        let mut s = C64::new(0.0, 0.0);
        for i in 1..self.rank {
            for j in 0..i {
                s += x[j] * a[i] as f64;
            }
        }
        phase_pi(s)
    }

    /// Squared length (a, a) of an integer vector.
    pub fn norm2(&self, a: &[i64]) -> i64 {
        self.ip(a, a)
    }

    /// Whether every consecutive coordinate difference of `lam` is an integer,
    /// i.e. `lam` pairs integrally with the sublattice of zero-sum vectors.
    pub fn in_sector_lattice(&self, lam: &[C64]) -> bool {
        assert_eq!(lam.len(), self.rank);
        for i in 0..self.rank.saturating_sub(1) {
            let d = lam[i] - lam[i + 1];
            if d.im.abs() > INT_TOL || (d.re - d.re.round()).abs() > INT_TOL {
                return false;
            }
        }
        true
    }

    /// Whether an integer vector has zero coordinate sum (lies in the root
    /// sublattice spanned by the e_i - e_j).
    pub fn is_zero_sum(&self, a: &[i64]) -> bool {
        a.iter().sum::<i64>() == 0
    }
}

/// exp(i*pi*s), snapped to an exact fourth root of unity when s is within
/// [`SNAP_TOL`] of a half-integer real number.
pub fn phase_pi(s: C64) -> C64 {
    let doubled = 2.0 * s.re;
    if s.im.abs() <= SNAP_TOL && (doubled - doubled.round()).abs() <= SNAP_TOL {
        pi_phase(Half(doubled.round() as i64))
    } else {
        (C64::new(0.0, 1.0) * PI * s).exp()
    }
}

/// Convert an integer vector to complex coordinates.
pub fn to_c(a: &[i64]) -> Vec<C64> {
    a.iter().map(|&x| C64::new(x as f64, 0.0)).collect()
}

/// Pointwise sum of a complex vector and an integer vector.
pub fn add_ic(lam: &[C64], b: &[i64]) -> Vec<C64> {
    assert_eq!(lam.len(), b.len());
    lam.iter()
        .zip(b)
        .map(|(l, &x)| l + C64::new(x as f64, 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() <= TOL
    }

    #[test]
    fn inner_product_examples() {
        let l = Lattice::new(3);
        // (e0 + e1, e1 - e2) = 1
        assert_eq!(l.ip(&[1, 1, 0], &[0, 1, -1]), 1);
        assert_eq!(l.norm2(&l.root(0, 1)), 2);
        assert_eq!(l.ip(&l.eps(0), &l.eps(2)), 0);
    }

    #[test]
    fn cocycle_on_basis_vectors() {
        let l = Lattice::new(3);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i <= j { 1 } else { -1 };
                assert_eq!(l.cocycle(&l.eps(i), &l.eps(j)), want, "i={} j={}", i, j);
            }
        }
    }

    #[test]
    fn cocycle_is_plus_minus_one() {
        let l = Lattice::new(2);
        for a0 in -2..=2i64 {
            for a1 in -2..=2i64 {
                for b0 in -2..=2i64 {
                    for b1 in -2..=2i64 {
                        let s = l.cocycle(&[a0, a1], &[b0, b1]);
                        assert!(s == 1 || s == -1);
                    }
                }
            }
        }
    }

    /// Exhaustive check on small ranks: both multiplicativity laws.
    #[test]
    fn cocycle_bimultiplicative_exhaustive_rank2() {
        let l = Lattice::new(2);
        let range = -2..=2i64;
        let vecs: Vec<[i64; 2]> = range
            .clone()
            .flat_map(|a| range.clone().map(move |b| [a, b]))
            .collect();
        for a in &vecs {
            for ap in &vecs {
                for b in &vecs {
                    let sum = [a[0] + ap[0], a[1] + ap[1]];
                    assert_eq!(l.cocycle(&sum, b), l.cocycle(a, b) * l.cocycle(ap, b));
                    assert_eq!(l.cocycle(b, &sum), l.cocycle(b, a) * l.cocycle(b, ap));
                }
            }
        }
    }

    /// On zero-sum vectors the symmetrized cocycle sees only the pairing.
    #[test]
    fn cocycle_symmetry_on_zero_sum_vectors() {
        let l = Lattice::new(3);
        let mut vecs = Vec::new();
        for a0 in -2..=2i64 {
            for a1 in -2..=2i64 {
                let a2 = -a0 - a1;
                if a2.abs() <= 4 {
                    vecs.push([a0, a1, a2]);
                }
            }
        }
        for a in &vecs {
            for b in &vecs {
                let lhs = l.cocycle(a, b) * l.cocycle(b, a);
                let rhs = if l.ip(a, b).rem_euclid(2) == 0 { 1 } else { -1 };
                assert_eq!(lhs, rhs, "a={:?} b={:?}", a, b);
            }
            let diag = l.cocycle(a, a);
            let n2 = l.norm2(a);
            assert_eq!(n2 % 2, 0, "zero-sum vectors have even square length");
            let want = if (n2 / 2).rem_euclid(2) == 0 { 1 } else { -1 };
            assert_eq!(diag, want, "a={:?}", a);
        }
    }

    /// Off the zero-sum sublattice the correct exponent carries the
    /// coordinate sums.
    #[test]
    fn cocycle_symmetry_general_vectors() {
        let l = Lattice::new(2);
        for a0 in -2..=2i64 {
            for a1 in -2..=2i64 {
                for b0 in -2..=2i64 {
                    for b1 in -2..=2i64 {
                        let a = [a0, a1];
                        let b = [b0, b1];
                        let lhs = l.cocycle(&a, &b) * l.cocycle(&b, &a);
                        let e = (a0 + a1) * (b0 + b1) - l.ip(&a, &b);
                        let rhs = if e.rem_euclid(2) == 0 { 1 } else { -1 };
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn complex_cocycle_restricts_to_integer_cocycle() {
        let l = Lattice::new(3);
        for a0 in -2..=2i64 {
            for b1 in -2..=2i64 {
                let a = [a0, 1, -1];
                let b = [0, b1, 2];
                let got = l.cocycle_c(&a, &to_c(&b));
                let want = C64::new(l.cocycle(&a, &b) as f64, 0.0);
                assert_eq!(got, want, "snapped phases must be exact");
            }
        }
    }

    #[test]
    fn complex_cocycle_factors_over_shift() {
        let l = Lattice::new(2);
        let lam = [C64::new(0.5, 0.0), C64::new(0.5, 0.0)];
        let a = [2i64, -1];
        let b = [1i64, 1];
        let shifted = add_ic(&lam, &b);
        let got = l.cocycle_c(&a, &shifted);
        // split off the integer part: eps(a, b) * exp(i*pi*sum_{i>j} a_i lam_j)
        let extra = phase_pi(lam[0] * a[1] as f64);
        let want = C64::new(l.cocycle(&a, &b) as f64, 0.0) * extra;
        assert!(close(got, want), "got {} want {}", got, want);
    }

    #[test]
    fn half_integer_exponents_snap_to_exact_quarter_turns() {
        // exponent 1/2 -> i exactly, exponent -1/2 -> -i exactly
        assert_eq!(phase_pi(C64::new(0.5, 0.0)), C64::new(0.0, 1.0));
        assert_eq!(phase_pi(C64::new(-0.5, 0.0)), C64::new(0.0, -1.0));
        assert_eq!(phase_pi(C64::new(1.0, 0.0)), C64::new(-1.0, 0.0));
        // a genuinely complex exponent falls back to the exponential
        let s = C64::new(0.25, 0.3);
        let want = (C64::new(0.0, 1.0) * PI * s).exp();
        assert!(close(phase_pi(s), want));
    }

    #[test]
    fn sector_membership_examples() {
        let l = Lattice::new(2);
        let half = C64::new(0.5, 0.0);
        assert!(l.in_sector_lattice(&[half, half]));
        assert!(!l.in_sector_lattice(&[C64::new(1.0 / 3.0, 0.0), C64::new(0.0, 0.0)]));
        assert!(l.in_sector_lattice(&to_c(&[3, -1])));
        // complex shifts are fine as long as consecutive differences are integral
        assert!(l.in_sector_lattice(&[C64::new(0.5, 1.0), C64::new(-0.5, 1.0)]));
        assert!(!l.in_sector_lattice(&[C64::new(0.5, 1.0), C64::new(0.5, 0.5)]));
    }

    proptest! {
        #[test]
        fn prop_cocycle_bimultiplicative(
            a in proptest::collection::vec(-3i64..=3, 3),
            ap in proptest::collection::vec(-3i64..=3, 3),
            b in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let l = Lattice::new(3);
            let sum: Vec<i64> = a.iter().zip(&ap).map(|(x, y)| x + y).collect();
            prop_assert_eq!(l.cocycle(&sum, &b), l.cocycle(&a, &b) * l.cocycle(&ap, &b));
            prop_assert_eq!(l.cocycle(&b, &sum), l.cocycle(&b, &a) * l.cocycle(&b, &ap));
        }

        #[test]
        fn prop_complex_cocycle_multiplicative_in_first_slot(
            a in proptest::collection::vec(-3i64..=3, 3),
            ap in proptest::collection::vec(-3i64..=3, 3),
            lam_re in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            let l = Lattice::new(3);
            let lam: Vec<C64> = lam_re.iter().map(|&x| C64::new(x, 0.0)).collect();
            let sum: Vec<i64> = a.iter().zip(&ap).map(|(x, y)| x + y).collect();
            let lhs = l.cocycle_c(&sum, &lam);
            let rhs = l.cocycle_c(&a, &lam) * l.cocycle_c(&ap, &lam);
            prop_assert!((lhs - rhs).norm() < 1e-10, "lhs {} rhs {}", lhs, rhs);
        }

        #[test]
        fn prop_sector_lattice_closed_under_integer_shift(
            lam_re in proptest::collection::vec(-2.0f64..2.0, 3),
            shift in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let l = Lattice::new(3);
            let lam: Vec<C64> = lam_re.iter().map(|&x| C64::new(x, 0.0)).collect();
            let shifted = add_ic(&lam, &shift);
            prop_assert_eq!(l.in_sector_lattice(&lam), l.in_sector_lattice(&shifted));
        }
    }
}
