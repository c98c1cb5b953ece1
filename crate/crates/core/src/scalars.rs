//! Complex scalars, half-integers, and branch-fixed powers inside a finitely
//! generated multiplicative group.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex64;

/// Tolerance used when validating roots of unity at group construction.
const ROOT_TOL: f64 = 1e-9;

/// Coefficients with modulus at or below this are dropped by sparse containers.
pub const PRUNE_TOL: f64 = 1e-14;

/// Integer power of a complex scalar, handling negative exponents.
pub fn cpow(z: C64, e: i64) -> C64 {
    z.powi(e as i32)
}

/// A half-integer n/2, stored exactly as the doubled value n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half(pub i64);

impl Half {
    /// The integer k as a half-integer.
    pub fn int(k: i64) -> Self {
        Half(2 * k)
    }

    /// The half-integer n/2.
    pub fn half(n: i64) -> Self {
        Half(n)
    }

    /// Numeric value as a float.
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// True when the value is a whole integer.
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The value as an integer, when it is one.
    pub fn as_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    /// Scale by an integer.
    pub fn times(self, k: i64) -> Self {
        Half(self.0 * k)
    }

    /// Zero.
    pub fn zero() -> Self {
        Half(0)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl AddAssign for Half {
    fn add_assign(&mut self, rhs: Half) {
        self.0 += rhs.0;
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Logarithm with imaginary part in [0, 2*pi).
///
/// This branch, rather than the usual (-pi, pi] one, is what makes the
/// fractional powers below consistent with each other.
pub fn principal_log(z: C64) -> Result<C64, CoreError> {
    if z.norm() == 0.0 {
        return Err(CoreError::LogOfZero);
    }
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += std::f64::consts::TAU;
    }
    Ok(C64::new(z.norm().ln(), theta))
}

/// e^{i*pi*h} computed exactly for a half-integer h (a fourth root of unity).
pub fn pi_phase(h: Half) -> C64 {
    match h.0.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Parse a complex number written like "2", "-1.5i", "1.3+0.45i", "1-0.45i", or "i".
pub fn parse_complex(s: &str) -> Result<C64, CoreError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(CoreError::Parse("empty complex literal".into()));
    }
    // Split at the last '+'/'-' that is neither a leading sign nor an
    // exponent sign, if any; the right part must then be the imaginary term.
    let bytes = t.as_bytes();
    let mut split = None;
    for i in 1..bytes.len() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
        }
    }
    match split {
        Some(i) => {
            let (re, im) = (&t[..i], &t[i..]);
            if !im.ends_with('i') {
                return Err(CoreError::Parse(format!("expected imaginary part in {s:?}")));
            }
            Ok(C64::new(parse_real(re, s)?, parse_imag(im, s)?))
        }
        None => {
            if t.ends_with('i') {
                Ok(C64::new(0.0, parse_imag(&t, s)?))
            } else {
                Ok(C64::new(parse_real(&t, s)?, 0.0))
            }
        }
    }
}

fn parse_real(part: &str, whole: &str) -> Result<f64, CoreError> {
    part.parse::<f64>()
        .map_err(|_| CoreError::Parse(format!("bad real part {part:?} in {whole:?}")))
}

fn parse_imag(part: &str, whole: &str) -> Result<f64, CoreError> {
    let body = &part[..part.len() - 1];
    match body {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => body
            .parse::<f64>()
            .map_err(|_| CoreError::Parse(format!("bad imaginary part {part:?} in {whole:?}"))),
    }
}

/// A finitely generated subgroup of C*: a cyclic torsion part generated by a
/// primitive root of unity `xi`, times free generators assumed to be
/// multiplicatively independent (this is not checked).
///
/// Every element has the normal form xi^{-n0} * prod_j q_j^{n_j} with
/// 0 <= n0 < torsion order, and fractional powers are defined through that
/// normal form: a^r = exp(r * (-n0 * Ln xi + sum_j n_j * Ln q_j)) with `Ln`
/// the [0, 2*pi) logarithm.  Which presentation is used matters, so all
/// element arithmetic goes through the owning group.
#[derive(Clone, Debug)]
pub struct AdmissibleGroup {
    torsion_order: usize,
    xi: C64,
    free_gens: Vec<C64>,
    log_xi: C64,
    log_free: Vec<C64>,
}

/// An element of an [`AdmissibleGroup`] in normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub(crate) n0: i64,
    pub(crate) free: Vec<i64>,
}

impl GroupElement {
    /// Torsion exponent of the normal form (the `n0` in xi^{-n0}).
    pub fn torsion_exponent(&self) -> i64 {
        self.n0
    }

    /// Exponents of the free generators.
    pub fn free_exponents(&self) -> &[i64] {
        &self.free
    }
}

impl AdmissibleGroup {
    /// Group with torsion generated by e^{2*pi*i/n} and the given free generators.
    pub fn cyclotomic(torsion_order: usize, free_gens: Vec<C64>) -> Result<Self, CoreError> {
        if torsion_order == 0 {
            return Err(CoreError::InvalidParameter("torsion order must be >= 1".into()));
        }
        let xi = C64::from_polar(1.0, std::f64::consts::TAU / torsion_order as f64);
        Self::build(torsion_order, xi, free_gens)
    }

    /// Group with an explicitly given primitive `torsion_order`-th root of unity.
    pub fn with_xi(torsion_order: usize, xi: C64, free_gens: Vec<C64>) -> Result<Self, CoreError> {
        if torsion_order == 0 {
            return Err(CoreError::InvalidParameter("torsion order must be >= 1".into()));
        }
        let mut p = C64::new(1.0, 0.0);
        for k in 1..=torsion_order {
            p *= xi;
            let is_one = (p - C64::new(1.0, 0.0)).norm() < ROOT_TOL;
            if (k < torsion_order && is_one) || (k == torsion_order && !is_one) {
                return Err(CoreError::NotPrimitiveRoot(format!("{xi}"), torsion_order));
            }
        }
        Self::build(torsion_order, xi, free_gens)
    }

    fn build(torsion_order: usize, xi: C64, free_gens: Vec<C64>) -> Result<Self, CoreError> {
        let log_xi = principal_log(xi)?;
        let log_free = free_gens
            .iter()
            .map(|&q| principal_log(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AdmissibleGroup { torsion_order, xi, free_gens, log_xi, log_free })
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> usize {
        self.torsion_order
    }

    /// The distinguished primitive root of unity.
    pub fn xi(&self) -> C64 {
        self.xi
    }

    /// Values of the free generators.
    pub fn free_gens(&self) -> &[C64] {
        &self.free_gens
    }

    /// Number of free generators.
    pub fn rank(&self) -> usize {
        self.free_gens.len()
    }

    /// The identity element.
    pub fn identity(&self) -> GroupElement {
        GroupElement { n0: 0, free: vec![0; self.rank()] }
    }

    /// Element with the given raw exponents; `n0` is reduced into range.
    pub fn element(&self, n0: i64, free: Vec<i64>) -> GroupElement {
        assert_eq!(free.len(), self.rank(), "free exponent vector has wrong rank");
        GroupElement { n0: n0.rem_euclid(self.torsion_order as i64), free }
    }

    /// The element xi^j in normal form (note the sign flip: xi^j = xi^{-n0}).
    pub fn xi_pow(&self, j: i64) -> GroupElement {
        self.element(-j, vec![0; self.rank()])
    }

    /// The element q_idx^e.
    pub fn free_pow(&self, idx: usize, e: i64) -> GroupElement {
        let mut free = vec![0; self.rank()];
        free[idx] = e;
        self.element(0, free)
    }

    /// Product of two elements.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let free = a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect();
        self.element(a.n0 + b.n0, free)
    }

    /// Inverse element.
    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        self.element(-a.n0, a.free.iter().map(|x| -x).collect())
    }

    /// Quotient a / b.
    pub fn div(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.mul(a, &self.inv(b))
    }

    /// Integer power a^k.
    pub fn pow(&self, a: &GroupElement, k: i64) -> GroupElement {
        self.element(a.n0 * k, a.free.iter().map(|x| x * k).collect())
    }

    /// True for the identity element.
    pub fn is_identity(&self, a: &GroupElement) -> bool {
        a.n0 == 0 && a.free.iter().all(|&x| x == 0)
    }

    /// The branch-fixing logarithm -n0 * Ln xi + sum_j n_j * Ln q_j.
    pub fn presentation_log(&self, a: &GroupElement) -> C64 {
        let mut l = -self.log_xi * a.n0 as f64;
        for (e, lq) in a.free.iter().zip(&self.log_free) {
            l += lq * *e as f64;
        }
        l
    }

    /// Numeric value of an element.
    pub fn value(&self, a: &GroupElement) -> C64 {
        self.presentation_log(a).exp()
    }

    /// Branch-fixed power a^r.
    pub fn power_value(&self, a: &GroupElement, r: f64) -> C64 {
        (self.presentation_log(a) * r).exp()
    }

    /// Branch-fixed power with half-integer exponent.
    pub fn power_half(&self, a: &GroupElement, h: Half) -> C64 {
        self.power_value(a, h.as_f64())
    }

    /// Branch-fixed power with a complex exponent.
    pub fn power_value_c(&self, a: &GroupElement, r: C64) -> C64 {
        (self.presentation_log(a) * r).exp()
    }

    /// Human-readable normal form, for diagnostics.
    pub fn format_element(&self, a: &GroupElement) -> String {
        let mut parts = Vec::new();
        if a.n0 != 0 {
            parts.push(format!("xi^-{}", a.n0));
        }
        for (j, e) in a.free.iter().enumerate() {
            if *e != 0 {
                parts.push(format!("q{j}^{e}"));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}
