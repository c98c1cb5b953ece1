//! Bosonic Fock space tensored with a lattice group algebra: sparse states,
//! oscillator operators, charge shifts, and truncated exponential series.

use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::lattice::{add_ic, to_c, Lattice};
use crate::scalars::{C64, PRUNE_TOL};

/// Basis state: a multiset of creation oscillators (direction slot, mode,
/// multiplicity) sorted by (slot, mode), tensored with a lattice charge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    oscillators: Vec<(u16, u16, u16)>,
    charge: Vec<i64>,
}

impl State {
    /// Normalized state: oscillators sorted, duplicates merged, zero
    /// multiplicities dropped.
    pub fn new(mut oscillators: Vec<(u16, u16, u16)>, charge: Vec<i64>) -> Self {
        oscillators.retain(|&(_, _, m)| m > 0);
        oscillators.sort_by_key(|&(s, p, _)| (s, p));
        let mut merged: Vec<(u16, u16, u16)> = Vec::with_capacity(oscillators.len());
        for (s, p, m) in oscillators {
            if let Some(last) = merged.last_mut() {
                if last.0 == s && last.1 == p {
                    last.2 += m;
                    continue;
                }
            }
            merged.push((s, p, m));
        }
        State {
            oscillators: merged,
            charge,
        }
    }

    /// Pure charge vector with no oscillators.
    pub fn charged(charge: Vec<i64>) -> Self {
        State {
            oscillators: Vec::new(),
            charge,
        }
    }

    /// Vacuum at charge zero.
    pub fn vacuum(rank: usize) -> Self {
        Self::charged(vec![0; rank])
    }

    /// Oscillator content.
    pub fn oscillators(&self) -> &[(u16, u16, u16)] {
        &self.oscillators
    }

    /// Lattice charge.
    pub fn charge(&self) -> &[i64] {
        &self.charge
    }

    /// Total oscillator weight: sum of mode times multiplicity.
    pub fn osc_degree(&self) -> u32 {
        self.oscillators
            .iter()
            .map(|&(_, p, m)| p as u32 * m as u32)
            .sum()
    }

    /// Add one oscillator of the given slot and mode.
    fn with_added(&self, slot: u16, mode: u16) -> State {
        let mut osc = self.oscillators.clone();
        osc.push((slot, mode, 1));
        State::new(osc, self.charge.clone())
    }

    /// Remove one oscillator at the given position in the sorted list.
    fn with_removed(&self, idx: usize) -> State {
        let mut osc = self.oscillators.clone();
        if osc[idx].2 > 1 {
            osc[idx].2 -= 1;
        } else {
            osc.remove(idx);
        }
        State {
            oscillators: osc,
            charge: self.charge.clone(),
        }
    }
}

/// Sparse vector over basis states. The `exact` flag records whether any
/// truncation clipped a term on the way to this vector.
#[derive(Clone, Debug)]
pub struct FockVector {
    terms: BTreeMap<State, C64>,
    exact: bool,
}

impl FockVector {
    /// Zero vector.
    pub fn zero() -> Self {
        FockVector {
            terms: BTreeMap::new(),
            exact: true,
        }
    }

    /// Single basis state with coefficient 1.
    pub fn unit(state: State) -> Self {
        let mut v = Self::zero();
        v.add_term(state, C64::new(1.0, 0.0));
        v
    }

    /// Accumulate a coefficient, pruning negligible slots.
    pub fn add_term(&mut self, state: State, coeff: C64) {
        let e = self.terms.entry(state.clone()).or_insert(C64::new(0.0, 0.0));
        *e += coeff;
        if e.norm() <= PRUNE_TOL {
            self.terms.remove(&state);
        }
    }

    /// Whether no truncation has touched this vector.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Clear the exactness flag (a clip happened upstream).
    pub fn mark_inexact(&mut self) {
        self.exact = false;
    }

    /// Stored (state, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&State, &C64)> {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a basis state, zero when absent.
    pub fn coeff(&self, state: &State) -> C64 {
        self.terms
            .get(state)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Sum of vectors; exact only when both inputs are.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, &c) in &other.terms {
            out.add_term(s.clone(), c);
        }
        out.exact = self.exact && other.exact;
        out
    }

    /// Difference of vectors.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero();
        if s.norm() > PRUNE_TOL {
            for (st, &c) in &self.terms {
                out.add_term(st.clone(), c * s);
            }
        }
        out.exact = self.exact;
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient deviation from another vector.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&State> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.iter()
            .map(|s| (self.coeff(s) - other.coeff(s)).norm())
            .fold(0.0, f64::max)
    }

    /// True when all coefficients are at most tol in modulus.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// Ambient space: lattice rank, optional charge-sector shift, working
/// oscillator cutoff, and charge window half-width.
#[derive(Clone, Debug)]
pub struct Space {
    lattice: Lattice,
    sector: Option<Vec<C64>>,
    cutoff: u32,
    window: i64,
}

impl Space {
    /// New space. A sector shift must pair integrally with all coordinate
    /// differences, otherwise charge shifts would leave the sector.
    pub fn new(
        rank: usize,
        sector: Option<Vec<C64>>,
        cutoff: u32,
        window: i64,
    ) -> Result<Self, CoreError> {
        let lattice = Lattice::new(rank);
        if let Some(lam) = &sector {
            if lam.len() != rank {
                return Err(CoreError::LengthMismatch(lam.len(), rank));
            }
            if !lattice.in_sector_lattice(lam) {
                return Err(CoreError::InvalidParameter(
                    "sector shift has non-integral consecutive coordinate differences".into(),
                ));
            }
        }
        Ok(Space {
            lattice,
            sector,
            cutoff,
            window,
        })
    }

    /// Plain integer-charge space.
    pub fn plain(rank: usize, cutoff: u32, window: i64) -> Self {
        Self::new(rank, None, cutoff, window).expect("no sector to validate")
    }

    /// Lattice of charges.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Lattice rank.
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Sector shift, if any.
    pub fn sector(&self) -> Option<&[C64]> {
        self.sector.as_deref()
    }

    /// Working oscillator cutoff.
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Same space with a different working cutoff.
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        let mut s = self.clone();
        s.cutoff = cutoff;
        s
    }

    /// Charge window half-width.
    pub fn window(&self) -> i64 {
        self.window
    }

    /// Effective charge: sector shift plus the integer charge.
    pub fn effective_charge(&self, charge: &[i64]) -> Vec<C64> {
        match &self.sector {
            Some(lam) => add_ic(lam, charge),
            None => to_c(charge),
        }
    }

    /// Pairing of a coefficient vector with the effective charge.
    pub fn pair_charge(&self, coeffs: &[C64], charge: &[i64]) -> C64 {
        self.lattice.ip_c(coeffs, &self.effective_charge(charge))
    }

    /// Sign/phase of the cocycle at the effective charge; exact integer
    /// cocycle when no sector shift is present.
    pub fn cocycle_at(&self, gamma: &[i64], charge: &[i64]) -> C64 {
        match &self.sector {
            Some(lam) => self.lattice.cocycle_c(gamma, &add_ic(lam, charge)),
            None => C64::new(self.lattice.cocycle(gamma, charge) as f64, 0.0),
        }
    }

    /// True when a charge lies inside the window.
    pub fn in_window(&self, charge: &[i64]) -> bool {
        charge.iter().all(|&b| b.abs() <= self.window)
    }

    /// Full grading of a state: minus the oscillator weight minus half the
    /// squared effective charge.
    pub fn degree(&self, state: &State) -> C64 {
        let eff = self.effective_charge(state.charge());
        let q = self.lattice.ip_c(&eff, &eff);
        C64::new(-(state.osc_degree() as f64), 0.0) - q * 0.5
    }
}

// ---------------------------------------------------------------------------
// oscillator operators
// ---------------------------------------------------------------------------

/// Multiply by the creation combination sum_j coeffs[j] a_j(-mode). Terms
/// pushed past the working cutoff are clipped and the result marked inexact.
pub fn osc_create(space: &Space, coeffs: &[C64], mode: u16, v: &FockVector) -> FockVector {
    assert!(mode >= 1);
    assert_eq!(coeffs.len(), space.rank());
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (state, &c) in v.terms() {
        for (j, &a) in coeffs.iter().enumerate() {
            if a.norm() <= PRUNE_TOL {
                continue;
            }
            let new = state.with_added(j as u16, mode);
            if new.osc_degree() > space.cutoff() {
                out.mark_inexact();
                continue;
            }
            out.add_term(new, c * a);
        }
    }
    out
}

/// Apply the annihilation combination sum_j coeffs[j] a_j(mode): each
/// matching oscillator contributes multiplicity * mode times its coefficient.
pub fn osc_annihilate(space: &Space, coeffs: &[C64], mode: u16, v: &FockVector) -> FockVector {
    assert!(mode >= 1);
    assert_eq!(coeffs.len(), space.rank());
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (state, &c) in v.terms() {
        for (idx, &(slot, p, mult)) in state.oscillators().iter().enumerate() {
            if p != mode {
                continue;
            }
            let a = coeffs[slot as usize];
            if a.norm() <= PRUNE_TOL {
                continue;
            }
            let factor = a * (mult as f64) * (mode as f64);
            out.add_term(state.with_removed(idx), c * factor);
        }
    }
    out
}

/// Apply the zero mode: each state is scaled by the pairing of the
/// coefficient vector with its effective charge.
pub fn osc_zero(space: &Space, coeffs: &[C64], v: &FockVector) -> FockVector {
    assert_eq!(coeffs.len(), space.rank());
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (state, &c) in v.terms() {
        let s = space.pair_charge(coeffs, state.charge());
        out.add_term(state.clone(), c * s);
    }
    out
}

/// Heisenberg mode with integer label: negative labels create, positive
/// labels annihilate, zero pairs with the charge.
pub fn heisenberg_apply(space: &Space, coeffs: &[C64], k: i64, v: &FockVector) -> FockVector {
    if k < 0 {
        osc_create(space, coeffs, (-k) as u16, v)
    } else if k > 0 {
        osc_annihilate(space, coeffs, k as u16, v)
    } else {
        osc_zero(space, coeffs, v)
    }
}

/// Group-algebra shift by a lattice vector: picks up the cocycle at the
/// effective charge and moves the charge. Charges leaving the window are
/// clipped and the result marked inexact.
pub fn charge_shift(space: &Space, gamma: &[i64], v: &FockVector) -> FockVector {
    assert_eq!(gamma.len(), space.rank());
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (state, &c) in v.terms() {
        let sign = space.cocycle_at(gamma, state.charge());
        let new_charge: Vec<i64> = state.charge().iter().zip(gamma).map(|(b, g)| b + g).collect();
        if !space.in_window(&new_charge) {
            out.mark_inexact();
            continue;
        }
        out.add_term(
            State::new(state.oscillators().to_vec(), new_charge),
            c * sign,
        );
    }
    out
}

// ---------------------------------------------------------------------------
// exponential series
// ---------------------------------------------------------------------------

/// Coefficients R_0..R_max of exp(sum_p h_p x^p / p) applied to v, where h_p
/// is the creation combination coeff(p). Computed through the recurrence
/// m R_m = sum_{p=1}^m h_p R_{m-p}, which only needs that the h_p commute.
pub fn creation_series(
    space: &Space,
    v: &FockVector,
    coeff: impl Fn(u32) -> Vec<C64>,
    max_m: u32,
) -> Vec<FockVector> {
    let mut out: Vec<FockVector> = Vec::with_capacity(max_m as usize + 1);
    out.push(v.clone());
    for m in 1..=max_m {
        let mut r = FockVector::zero();
        for p in 1..=m {
            let h = coeff(p);
            let term = osc_create(space, &h, p as u16, &out[(m - p) as usize]);
            r = r.add(&term);
        }
        out.push(r.scale(C64::new(1.0 / m as f64, 0.0)));
    }
    out
}

/// Coefficients R_0..R_max of exp(sum_p h_p x^p / p) applied to v for an
/// annihilation family; the series terminates once the oscillator weight of
/// v is exhausted, so max_m is capped by that weight.
pub fn annihilation_series(
    space: &Space,
    v: &FockVector,
    coeff: impl Fn(u32) -> Vec<C64>,
) -> Vec<FockVector> {
    let max_m = v
        .terms()
        .map(|(s, _)| s.osc_degree())
        .max()
        .unwrap_or(0);
    let mut out: Vec<FockVector> = Vec::with_capacity(max_m as usize + 1);
    out.push(v.clone());
    for m in 1..=max_m {
        let mut r = FockVector::zero();
        for p in 1..=m {
            let h = coeff(p);
            let term = osc_annihilate(space, &h, p as u16, &out[(m - p) as usize]);
            r = r.add(&term);
        }
        out.push(r.scale(C64::new(1.0 / m as f64, 0.0)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::cpow;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e0() -> Vec<C64> {
        vec![c(1.0, 0.0), c(0.0, 0.0)]
    }

    fn e1() -> Vec<C64> {
        vec![c(0.0, 0.0), c(1.0, 0.0)]
    }

    fn space2() -> Space {
        Space::plain(2, 10, 4)
    }

    #[test]
    fn states_normalize() {
        let a = State::new(vec![(1, 2, 1), (0, 1, 2), (1, 2, 3), (0, 3, 0)], vec![1, 0]);
        assert_eq!(a.oscillators(), &[(0, 1, 2), (1, 2, 4)]);
        assert_eq!(a.osc_degree(), 2 + 8);
    }

    #[test]
    fn creation_then_annihilation_counts_multiplicity() {
        let sp = space2();
        let v = FockVector::unit(State::vacuum(2));
        // a_0(-2)^3 applied three times, then a_0(2) once
        let mut w = v.clone();
        for _ in 0..3 {
            w = osc_create(&sp, &e0(), 2, &w);
        }
        let u = osc_annihilate(&sp, &e0(), 2, &w);
        // a_0(2) a_0(-2)^3 vac = 3 * 2 * a_0(-2)^2 vac
        let want = State::new(vec![(0, 2, 2)], vec![0, 0]);
        assert!((u.coeff(&want) - c(6.0, 0.0)).norm() < TOL);
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn heisenberg_commutator_frozen() {
        let sp = space2();
        let v = FockVector::unit(State::vacuum(2));
        // [a(2), a(-2)] = 2 on the vacuum for matching directions
        let lhs = heisenberg_apply(&sp, &e0(), 2, &heisenberg_apply(&sp, &e0(), -2, &v));
        let rhs = heisenberg_apply(&sp, &e0(), -2, &heisenberg_apply(&sp, &e0(), 2, &v));
        let comm = lhs.sub(&rhs);
        assert!((comm.coeff(&State::vacuum(2)) - c(2.0, 0.0)).norm() < TOL);
        // orthogonal directions commute
        let lhs = heisenberg_apply(&sp, &e0(), 2, &heisenberg_apply(&sp, &e1(), -2, &v));
        let rhs = heisenberg_apply(&sp, &e1(), -2, &heisenberg_apply(&sp, &e0(), 2, &v));
        assert!(lhs.sub(&rhs).is_zero(TOL));
    }

    #[test]
    fn zero_mode_pairs_with_charge() {
        let sp = space2();
        let v = FockVector::unit(State::charged(vec![2, -1]));
        let w = osc_zero(&sp, &vec![c(1.0, 0.0), c(3.0, 0.0)], &v);
        assert!((w.coeff(&State::charged(vec![2, -1])) - c(-1.0, 0.0)).norm() < TOL);
        // with a half-integral sector shift the pairing moves accordingly
        let half = c(0.5, 0.0);
        let sps = Space::new(2, Some(vec![half, half]), 10, 4).unwrap();
        let w = osc_zero(&sps, &vec![c(1.0, 0.0), c(0.0, 0.0)], &v);
        assert!((w.coeff(&State::charged(vec![2, -1])) - c(2.5, 0.0)).norm() < TOL);
    }

    #[test]
    fn charge_shift_frozen_sign() {
        let sp = space2();
        // shifting e^(e_1) onto charge e_0 picks up the sign eps(e_1, e_0) = -1
        let v = FockVector::unit(State::charged(vec![1, 0]));
        let w = charge_shift(&sp, &[0, 1], &v);
        assert!((w.coeff(&State::charged(vec![1, 1])) + c(1.0, 0.0)).norm() < TOL);
        // and the opposite order is unsigned
        let v = FockVector::unit(State::charged(vec![0, 1]));
        let w = charge_shift(&sp, &[1, 0], &v);
        assert!((w.coeff(&State::charged(vec![1, 1])) - c(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn shift_composition_matches_cocycle() {
        let sp = space2();
        let l = Lattice::new(2);
        for a0 in -1..=1i64 {
            for a1 in -1..=1i64 {
                for b0 in -1..=1i64 {
                    for b1 in -1..=1i64 {
                        let a = [a0, a1];
                        let b = [b0, b1];
                        let v = FockVector::unit(State::charged(vec![0, 0]));
                        let lhs = charge_shift(&sp, &a, &charge_shift(&sp, &b, &v));
                        let sum = [a0 + b0, a1 + b1];
                        let rhs = charge_shift(&sp, &sum, &v)
                            .scale(c(l.cocycle(&a, &b) as f64, 0.0));
                        assert!(lhs.max_abs_diff(&rhs) < TOL, "a={a:?} b={b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn sector_shift_uses_extended_cocycle() {
        let half = c(0.5, 0.0);
        let sp = Space::new(2, Some(vec![half, half]), 10, 4).unwrap();
        // eps(e_1, lam + 0) = exp(i pi lam_0) = i at lam_0 = 1/2
        let v = FockVector::unit(State::charged(vec![0, 0]));
        let w = charge_shift(&sp, &[0, 1], &v);
        assert!((w.coeff(&State::charged(vec![0, 1])) - c(0.0, 1.0)).norm() < TOL);
    }

    #[test]
    fn sector_validation_rejects_bad_shifts() {
        assert!(Space::new(2, Some(vec![c(1.0 / 3.0, 0.0), c(0.0, 0.0)]), 10, 4).is_err());
        assert!(Space::new(2, Some(vec![c(0.5, 1.0), c(-0.5, 1.0)]), 10, 4).is_ok());
    }

    #[test]
    fn cutoff_clipping_marks_inexact() {
        let sp = Space::plain(2, 3, 4);
        let v = FockVector::unit(State::vacuum(2));
        let w = osc_create(&sp, &e0(), 2, &v);
        assert!(w.is_exact());
        let u = osc_create(&sp, &e0(), 2, &w);
        assert!(!u.is_exact());
        assert!(u.is_empty());
    }

    #[test]
    fn window_clipping_marks_inexact() {
        let sp = Space::plain(2, 10, 1);
        let v = FockVector::unit(State::charged(vec![1, 0]));
        let w = charge_shift(&sp, &[1, 0], &v);
        assert!(!w.is_exact());
        assert!(w.is_empty());
    }

    #[test]
    fn degree_combines_weight_and_charge() {
        let sp = space2();
        let s = State::new(vec![(0, 1, 1), (1, 3, 1)], vec![1, -1]);
        // degree = -(1 + 3) - (1 + 1)/2 = -5
        assert!((sp.degree(&s) - c(-5.0, 0.0)).norm() < TOL);
        let half = c(0.5, 0.0);
        let sps = Space::new(2, Some(vec![half, half]), 10, 4).unwrap();
        // effective charge (3/2, -1/2): -(4) - (9/4 + 1/4)/2 = -4 - 5/4
        assert!((sps.degree(&s) - c(-5.25, 0.0)).norm() < TOL);
    }

    #[test]
    fn exponential_series_single_mode_is_factorial() {
        let sp = Space::plain(1, 12, 4);
        let v = FockVector::unit(State::vacuum(1));
        let r = creation_series(
            &sp,
            &v,
            |p| {
                if p == 1 {
                    vec![c(1.0, 0.0)]
                } else {
                    vec![c(0.0, 0.0)]
                }
            },
            5,
        );
        // exp(h_1 x) vac: coefficient of x^m is a(-1)^m / m!
        let mut fact = 1.0;
        for m in 0..=5usize {
            if m > 0 {
                fact *= m as f64;
            }
            let want = State::new(vec![(0, 1, m as u16)], vec![0]);
            assert!(
                (r[m].coeff(&want) - c(1.0 / fact, 0.0)).norm() < TOL,
                "m={m}"
            );
        }
    }

    #[test]
    fn series_terms_are_homogeneous() {
        let sp = Space::plain(2, 14, 4);
        let v = FockVector::unit(State::new(vec![(1, 2, 1)], vec![0, 0]));
        let r = creation_series(&sp, &v, |p| vec![c(0.3, 0.1), cpow(c(1.1, 0.2), p as i64)], 6);
        for (m, rm) in r.iter().enumerate() {
            for (s, _) in rm.terms() {
                assert_eq!(s.osc_degree() as usize, 2 + m, "weight raised by m");
            }
            assert!(rm.is_exact());
        }
    }

    #[test]
    fn annihilation_series_terminates() {
        let sp = space2();
        let v = FockVector::unit(State::new(vec![(0, 1, 2), (1, 2, 1)], vec![0, 0]));
        let r = annihilation_series(&sp, &v, |_| vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(r.len() as u32, v.terms().next().unwrap().0.osc_degree() + 1);
        // the last entry annihilates everything down to the bare charge
        for (s, _) in r.last().unwrap().terms() {
            assert_eq!(s.osc_degree(), 0);
        }
    }

    /// Generalized binomial coefficient for an integer exponent.
    fn binom(n: i64, t: u32) -> f64 {
        let mut out = 1.0;
        for s in 0..t {
            out *= (n - s as i64) as f64 / (s as f64 + 1.0);
        }
        out
    }

    /// Reordering an annihilation exponential past a creation exponential
    /// costs the binomial expansion of (1 - b z_2 / (a z_1))^(alpha, beta).
    #[test]
    fn exponential_swap_identity() {
        let sp = Space::plain(2, 16, 4);
        let a = c(1.1, 0.3);
        let b = c(0.8, -0.2);
        // alpha = e_0 + 2 e_1, beta = e_0 - e_1, so (alpha, beta) = -1
        let alpha = vec![c(1.0, 0.0), c(2.0, 0.0)];
        let beta = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        let ip: i64 = -1;
        let v = FockVector::unit(State::new(vec![(0, 1, 1), (1, 1, 1)], vec![0, 0]));
        let ann = |p: u32| -> Vec<C64> {
            let s = cpow(a, -(p as i64));
            alpha.iter().map(|&x| x * s).collect()
        };
        let cre = |p: u32| -> Vec<C64> {
            let s = -cpow(b, p as i64);
            beta.iter().map(|&x| x * s).collect()
        };
        let max_m = 5u32;
        for m1 in 0..=3u32 {
            for m2 in 0..=3u32 {
                // left order: create in z_2, then annihilate in z_1
                let created = creation_series(&sp, &v, cre, max_m);
                let lhs_series = annihilation_series(&sp, &created[m2 as usize], ann);
                let lhs = lhs_series
                    .get(m1 as usize)
                    .cloned()
                    .unwrap_or(FockVector::zero());
                // right order with the scalar expansion
                let mut rhs = FockVector::zero();
                for t in 0..=m1.min(m2) {
                    let ann_first = annihilation_series(&sp, &v, ann);
                    let base = ann_first
                        .get((m1 - t) as usize)
                        .cloned()
                        .unwrap_or(FockVector::zero());
                    let cre_after = creation_series(&sp, &base, cre, max_m);
                    let coeff = binom(ip, t) * 1.0;
                    let w = cpow(-b / a, t as i64) * coeff;
                    rhs = rhs.add(&cre_after[(m2 - t) as usize].scale(w));
                }
                assert!(
                    lhs.max_abs_diff(&rhs) < 1e-10,
                    "m1={m1} m2={m2} dev={}",
                    lhs.max_abs_diff(&rhs)
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// [a(k), b(l)] = k (a, b) delta_{k+l,0} on a window of states.
        #[test]
        fn prop_heisenberg_commutator(
            k in -3i64..=3,
            l in -3i64..=3,
            s0 in 0u16..2,
            p0 in 1u16..3,
        ) {
            let sp = space2();
            let v = FockVector::unit(State::new(vec![(s0, p0, 2)], vec![1, -1]));
            let alpha = vec![c(1.0, 0.0), c(-2.0, 0.0)];
            let beta = vec![c(0.5, 0.5), c(1.0, 0.0)];
            let ab = alpha[0] * beta[0] + alpha[1] * beta[1];
            let lhs = heisenberg_apply(&sp, &alpha, k, &heisenberg_apply(&sp, &beta, l, &v));
            let rhs = heisenberg_apply(&sp, &beta, l, &heisenberg_apply(&sp, &alpha, k, &v));
            let comm = lhs.sub(&rhs);
            let want = if k + l == 0 {
                v.scale(ab * k as f64)
            } else {
                FockVector::zero()
            };
            prop_assert!(comm.max_abs_diff(&want) < 1e-10);
        }

        /// Creation series slices are reproduced at a higher cutoff.
        #[test]
        fn prop_series_stable_under_cutoff_increase(m in 1u32..5) {
            let sp = Space::plain(2, 8, 4);
            let sp_hi = sp.with_cutoff(10);
            let v = FockVector::unit(State::vacuum(2));
            let fam = |p: u32| vec![cpow(c(0.9, 0.1), p as i64), c(-0.4, 0.0)];
            let lo = creation_series(&sp, &v, fam, 8);
            let hi = creation_series(&sp_hi, &v, fam, 8);
            if lo[m as usize].is_exact() {
                prop_assert!(lo[m as usize].max_abs_diff(&hi[m as usize]) < 1e-12);
            }
        }
    }
}
