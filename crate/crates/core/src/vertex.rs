//! Vertex operator modes on the charged Fock space: single-vector operators,
//! their parametrized two-index relatives, and independent cross-check
//! expansions built from normal-ordered pairs.

use crate::fock::{
    annihilation_series, charge_shift, creation_series, heisenberg_apply, FockVector, Space,
};
use crate::lattice::{to_c, INT_TOL};
use crate::scalars::{cpow, AdmissibleGroup, C64, GroupElement, Half};

/// Mode of the vertex operator attached to a lattice vector: annihilation
/// half exp(-sum alpha(p) z^-p / p), charge shift with its cocycle, creation
/// half exp(sum alpha(-p) z^p / p), and the charge-dependent z power.
///
/// The mode label picks the coefficient of z^(-k); labels whose parity does
/// not match a state's charge pairing contribute nothing there.
pub fn x_alpha_apply(space: &Space, alpha: &[i64], k: Half, v: &FockVector) -> FockVector {
    assert_eq!(alpha.len(), space.rank());
    let alpha_c = to_c(alpha);
    let neg_alpha_c: Vec<C64> = alpha_c.iter().map(|x| -x).collect();
    let norm2 = space.lattice().norm2(alpha);
    // the sector pairing must be half-integral, otherwise no half-integer
    // mode grid fits this operator on this space
    let lam_doubled = match space.sector() {
        Some(lam) => {
            let p = space.lattice().ip_ic(alpha, lam);
            let doubled = 2.0 * p.re;
            if p.im.abs() > INT_TOL || (doubled - doubled.round()).abs() > INT_TOL {
                let mut out = FockVector::zero();
                out.mark_inexact();
                return out;
            }
            doubled.round() as i64
        }
        None => 0,
    };
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (state, &coeff) in v.terms() {
        // z exponent offset: (alpha, effective charge) + (alpha, alpha)/2
        let s0 = Half(2 * space.lattice().ip(alpha, state.charge()) + lam_doubled + norm2);
        let d = match Half(-k.0 - s0.0).as_int() {
            Some(d) => d,
            None => continue,
        };
        let shifted = charge_shift(space, alpha, &FockVector::unit(state.clone()));
        if !shifted.is_exact() {
            out.mark_inexact();
        }
        let ann = annihilation_series(space, &shifted, |_| neg_alpha_c.clone());
        for (m2, am) in ann.iter().enumerate() {
            let m1 = m2 as i64 + d;
            if m1 < 0 {
                continue;
            }
            if am.is_empty() {
                continue;
            }
            if m1 > space.cutoff() as i64 {
                out.mark_inexact();
                continue;
            }
            let cre = creation_series(space, am, |_| alpha_c.clone(), m1 as u32);
            out = out.add(&cre[m1 as usize].scale(coeff));
        }
    }
    out
}

/// Anticommutator of two single-vector modes.
pub fn x_anticommutator(
    space: &Space,
    alpha: &[i64],
    k: Half,
    beta: &[i64],
    l: Half,
    v: &FockVector,
) -> FockVector {
    let ab = x_alpha_apply(space, alpha, k, &x_alpha_apply(space, beta, l, v));
    let ba = x_alpha_apply(space, beta, l, &x_alpha_apply(space, alpha, k, v));
    ab.add(&ba)
}

/// The scalar c^(1/2) / (1 - c) with the branch-fixed square root; the
/// central correction constant attached to a non-identity parameter.
pub fn correction_scalar(group: &AdmissibleGroup, c: &GroupElement) -> C64 {
    assert!(
        !group.is_identity(c),
        "correction scalar is undefined at the identity parameter"
    );
    group.power_half(c, Half(1)) / (C64::new(1.0, 0.0) - group.value(c))
}

/// Mode k of the one-parameter two-index operator. Three branches: a plain
/// Heisenberg mode on the diagonal at the identity parameter, a normalized
/// difference of exponentials on the diagonal otherwise, and the full
/// charge-shifting operator off the diagonal.
pub fn xij_mode_one_param(
    space: &Space,
    group: &AdmissibleGroup,
    i: usize,
    j: usize,
    c: &GroupElement,
    k: i64,
    v: &FockVector,
) -> FockVector {
    let rank = space.rank();
    assert!(i < rank && j < rank);
    if i == j && group.is_identity(c) {
        let mut coeffs = vec![C64::new(0.0, 0.0); rank];
        coeffs[i] = C64::new(1.0, 0.0);
        return heisenberg_apply(space, &coeffs, k, v);
    }
    let cval = group.value(c);
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    if i != j {
        let gamma = space.lattice().root(i, j);
        let sign = if i < j { 1.0 } else { -1.0 };
        let chalf = group.power_half(c, Half(1));
        for (state, &coeff) in v.terms() {
            let eff = space.effective_charge(state.charge());
            let zbase = 1 + (eff[i] - eff[j]).re.round() as i64;
            let d = -k - zbase;
            let scalar = chalf * group.power_value_c(c, -eff[j]) * sign * coeff;
            let shifted = charge_shift(space, &gamma, &FockVector::unit(state.clone()));
            if !shifted.is_exact() {
                out.mark_inexact();
            }
            let ann = annihilation_series(space, &shifted, |p| {
                let mut h = vec![C64::new(0.0, 0.0); rank];
                h[i] = C64::new(-1.0, 0.0);
                h[j] = cpow(cval, -(p as i64));
                h
            });
            for (m2, am) in ann.iter().enumerate() {
                let m1 = m2 as i64 + d;
                if m1 < 0 || am.is_empty() {
                    continue;
                }
                if m1 > space.cutoff() as i64 {
                    out.mark_inexact();
                    continue;
                }
                let cre = creation_series(
                    space,
                    am,
                    |p| {
                        let mut h = vec![C64::new(0.0, 0.0); rank];
                        h[i] = C64::new(1.0, 0.0);
                        h[j] = -cpow(cval, p as i64);
                        h
                    },
                    m1 as u32,
                );
                out = out.add(&cre[m1 as usize].scale(scalar));
            }
        }
    } else {
        let mu = correction_scalar(group, c);
        for (state, &coeff) in v.terms() {
            let eff_i = space.effective_charge(state.charge())[i];
            let aeps = group.power_value_c(c, -eff_i);
            let d = -k;
            let scalar = mu * aeps * coeff;
            let ann = annihilation_series(space, &FockVector::unit(state.clone()), |p| {
                let mut h = vec![C64::new(0.0, 0.0); rank];
                h[i] = cpow(cval, -(p as i64)) - C64::new(1.0, 0.0);
                h
            });
            for (m2, am) in ann.iter().enumerate() {
                let m1 = m2 as i64 + d;
                if m1 < 0 || am.is_empty() {
                    continue;
                }
                if m1 > space.cutoff() as i64 {
                    out.mark_inexact();
                    continue;
                }
                let cre = creation_series(
                    space,
                    am,
                    |p| {
                        let mut h = vec![C64::new(0.0, 0.0); rank];
                        h[i] = C64::new(1.0, 0.0) - cpow(cval, p as i64);
                        h
                    },
                    m1 as u32,
                );
                out = out.add(&cre[m1 as usize].scale(scalar));
            }
            if k == 0 {
                out = out.add(&FockVector::unit(state.clone()).scale(-mu * coeff));
            }
        }
    }
    out
}

/// Mode k of the two-parameter two-index operator: the one-parameter mode at
/// c = a^-1 b, rescaled by value(a)^-k from the substituted argument.
pub fn xij_mode_apply(
    space: &Space,
    group: &AdmissibleGroup,
    i: usize,
    j: usize,
    a: &GroupElement,
    b: &GroupElement,
    k: i64,
    v: &FockVector,
) -> FockVector {
    let c = group.div(b, a);
    let pref = cpow(group.value(a), -k);
    xij_mode_one_param(space, group, i, j, &c, k, v).scale(pref)
}

/// Trace-sum mode: the sum of all diagonal two-index modes.
pub fn y_mode_apply(
    space: &Space,
    group: &AdmissibleGroup,
    a: &GroupElement,
    b: &GroupElement,
    k: i64,
    v: &FockVector,
) -> FockVector {
    let mut out = FockVector::zero();
    for i in 0..space.rank() {
        out = out.add(&xij_mode_apply(space, group, i, i, a, b, k, v));
    }
    out
}

/// Independent expansion of the two-index mode as a normal-ordered sum of
/// single-vector mode pairs: sum over half-integer l of c^-l times the
/// normal-ordered product of the (m - l)-mode for e_i and the l-mode for
/// -e_j, all rescaled by value(a)^-m. Normal order keeps positive labels
/// acting first and swaps with a minus sign otherwise; both tails vanish on
/// any fixed vector, so the sum is finite.
pub fn xij_mode_pair_expansion(
    space: &Space,
    group: &AdmissibleGroup,
    i: usize,
    j: usize,
    a: &GroupElement,
    b: &GroupElement,
    m: i64,
    v: &FockVector,
) -> FockVector {
    let rank = space.rank();
    assert!(i < rank && j < rank);
    let c = group.div(b, a);
    let pref = cpow(group.value(a), -m);
    let ei = space.lattice().eps(i);
    let mej: Vec<i64> = space.lattice().eps(j).iter().map(|x| -x).collect();
    let deg = v.terms().map(|(s, _)| s.osc_degree()).max().unwrap_or(0) as i64;
    let bound = deg + space.window() + m.abs() + 8;
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    let mut t = -2 * bound - 1;
    while t <= 2 * bound + 1 {
        let l = Half(t);
        let r = Half(2 * m - t);
        let weight = group.power_half(&c, Half(-t));
        let term = if t > 0 {
            x_alpha_apply(space, &ei, r, &x_alpha_apply(space, &mej, l, v))
        } else {
            x_alpha_apply(space, &mej, l, &x_alpha_apply(space, &ei, r, v))
                .scale(C64::new(-1.0, 0.0))
        };
        out = out.add(&term.scale(weight));
        t += 2;
    }
    out.scale(pref)
}

/// Label for a concrete operator mode, used to state expected commutators.
#[derive(Clone, Debug, PartialEq)]
pub enum ModeOp {
    /// Single-vector vertex mode with a half-integer label.
    XAlpha { alpha: Vec<i64>, k: Half },
    /// Two-index parametrized mode with an integer label.
    Xij {
        i: usize,
        j: usize,
        a: GroupElement,
        b: GroupElement,
        k: i64,
    },
    /// Trace-sum of diagonal two-index modes.
    Y {
        a: GroupElement,
        b: GroupElement,
        k: i64,
    },
}

impl ModeOp {
    /// Apply this mode to a vector.
    pub fn apply(&self, space: &Space, group: &AdmissibleGroup, v: &FockVector) -> FockVector {
        match self {
            ModeOp::XAlpha { alpha, k } => x_alpha_apply(space, alpha, *k, v),
            ModeOp::Xij { i, j, a, b, k } => xij_mode_apply(space, group, *i, *j, a, b, *k, v),
            ModeOp::Y { a, b, k } => y_mode_apply(space, group, a, b, *k, v),
        }
    }

    /// Short human-readable form for diagnostics.
    pub fn describe(&self, group: &AdmissibleGroup) -> String {
        match self {
            ModeOp::XAlpha { alpha, k } => format!("x[{alpha:?}]({k})"),
            ModeOp::Xij { i, j, a, b, k } => format!(
                "x{}{}({k}; {}, {})",
                i,
                j,
                group.format_element(a),
                group.format_element(b)
            ),
            ModeOp::Y { a, b, k } => format!(
                "y({k}; {}, {})",
                group.format_element(a),
                group.format_element(b)
            ),
        }
    }
}

/// Commutator of two mode operators applied to a vector.
pub fn commutator_apply(
    space: &Space,
    group: &AdmissibleGroup,
    x: &ModeOp,
    y: &ModeOp,
    v: &FockVector,
) -> FockVector {
    let xy = x.apply(space, group, &y.apply(space, group, v));
    let yx = y.apply(space, group, &x.apply(space, group, v));
    xy.sub(&yx)
}
