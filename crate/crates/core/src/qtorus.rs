//! Quantum torus pairing, clock/shift matrix pairs, and the twisted loop
//! algebras built on them, together with the basis-form isomorphisms
//! connecting the factored and fused matrix pictures.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;

use crate::error::CoreError;
use crate::scalars::{cpow, C64, PRUNE_TOL};

/// Tolerance used when validating pairing matrices and basis form.
pub const BASIS_TOL: f64 = 1e-9;

/// Canonical primitive n-th root of unity exp(2*pi*i/n).
pub fn xi_root(n: usize) -> C64 {
    C64::from_polar(1.0, TAU / n as f64)
}

// ---------------------------------------------------------------------------
// pairing matrix
// ---------------------------------------------------------------------------

/// Multiplicative commutation matrix for Laurent variables t_0..t_{v-1}:
/// entries satisfy q_ii = 1 and q_ij * q_ji = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    entries: Vec<Vec<C64>>,
}

impl QMatrix {
    /// Validate and wrap a square matrix of commutation scalars.
    pub fn new(entries: Vec<Vec<C64>>) -> Result<Self, CoreError> {
        let size = entries.len();
        for row in &entries {
            if row.len() != size {
                return Err(CoreError::SizeMismatch(format!(
                    "pairing matrix row length {} vs size {}",
                    row.len(),
                    size
                )));
            }
        }
        for i in 0..size {
            if (entries[i][i] - C64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(CoreError::InvalidParameter(format!(
                    "diagonal pairing entry ({i},{i}) must be 1"
                )));
            }
            for j in 0..size {
                if (entries[i][j] * entries[j][i] - C64::new(1.0, 0.0)).norm() > 1e-12 {
                    return Err(CoreError::InvalidParameter(format!(
                        "pairing entries ({i},{j}) and ({j},{i}) must be mutually inverse"
                    )));
                }
            }
        }
        Ok(QMatrix { entries })
    }

    /// All-ones pairing (fully commuting variables).
    pub fn trivial(size: usize) -> Self {
        QMatrix {
            entries: vec![vec![C64::new(1.0, 0.0); size]; size],
        }
    }

    /// Two variables with q_10 = q (so t_1 t_0 = q t_0 t_1).
    pub fn two_vars(q: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        QMatrix {
            entries: vec![vec![one, one / q], vec![q, one]],
        }
    }

    /// Random admissible pairing: unit diagonal, lower entries with modulus in
    /// [0.6, 1.6] and uniform argument, upper entries their inverses.
    pub fn random<R: Rng>(size: usize, rng: &mut R) -> Self {
        let one = C64::new(1.0, 0.0);
        let mut entries = vec![vec![one; size]; size];
        for i in 0..size {
            for j in 0..i {
                let r = rng.gen_range(0.6..1.6);
                let th = rng.gen_range(0.0..TAU);
                let q = C64::from_polar(r, th);
                entries[i][j] = q;
                entries[j][i] = one / q;
            }
        }
        QMatrix { entries }
    }

    /// Number of Laurent variables.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Commutation scalar q_ij.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    /// Reordering scalar picked up when t^a is moved past t^b into normal
    /// order: product over i < j of q_ji^(a_j * b_i).
    pub fn sigma(&self, a: &[i64], b: &[i64]) -> C64 {
        assert_eq!(a.len(), self.size());
        assert_eq!(b.len(), self.size());
        let mut out = C64::new(1.0, 0.0);
        for j in 1..self.size() {
            for i in 0..j {
                let e = a[j] * b[i];
                if e != 0 {
                    out *= cpow(self.entries[j][i], e);
                }
            }
        }
        out
    }

    /// Pairing for the factored picture: the 0-th variable commutation
    /// scalars are raised to the n-th power, the rest are unchanged.
    pub fn star(&self, n: usize) -> Self {
        let mut entries = self.entries.clone();
        let size = self.size();
        for i in 1..size {
            entries[i][0] = cpow(self.entries[i][0], n as i64);
            entries[0][i] = cpow(self.entries[0][i], n as i64);
        }
        QMatrix { entries }
    }
}

// ---------------------------------------------------------------------------
// sparse matrices
// ---------------------------------------------------------------------------

/// Square sparse complex matrix over a coordinate map.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    entries: BTreeMap<(usize, usize), C64>,
}

impl SparseMatrix {
    /// Zero matrix of size n.
    pub fn zero(n: usize) -> Self {
        SparseMatrix {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// Identity matrix of size n.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries.insert((i, i), C64::new(1.0, 0.0));
        }
        m
    }

    /// Matrix unit with a single 1 in row i, column j.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n);
        let mut m = Self::zero(n);
        m.entries.insert((i, j), C64::new(1.0, 0.0));
        m
    }

    /// Matrix size.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry at (i, j), zero when absent.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries
            .get(&(i, j))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Add v to entry (i, j), pruning the slot if it becomes negligible.
    pub fn add_entry(&mut self, i: usize, j: usize, v: C64) {
        assert!(i < self.n && j < self.n);
        let e = self.entries.entry((i, j)).or_insert(C64::new(0.0, 0.0));
        *e += v;
        if e.norm() <= PRUNE_TOL {
            self.entries.remove(&(i, j));
        }
    }

    /// Stored nonzero entries.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &C64)> {
        self.entries.iter()
    }

    /// Matrix sum.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&(i, j), &v) in &other.entries {
            out.add_entry(i, j, v);
        }
        out
    }

    /// Matrix difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        if s.norm() <= PRUNE_TOL {
            return out;
        }
        for (&(i, j), &v) in &self.entries {
            out.add_entry(i, j, v * s);
        }
        out
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (&(i, k), &a) in &self.entries {
            for jj in 0..other.n {
                let b = other.get(k, jj);
                if b.norm() > 0.0 {
                    out.add_entry(i, jj, a * b);
                }
            }
        }
        out
    }

    /// Non-negative matrix power by repeated multiplication.
    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::identity(self.n);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; row/column index of the result is i * other.n + k.
    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut out = Self::zero(n);
        for (&(i, j), &a) in &self.entries {
            for (&(k, l), &b) in &other.entries {
                out.add_entry(i * other.n + k, j * other.n + l, a * b);
            }
        }
        out
    }

    /// Largest entry modulus of the difference with another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        let mut keys: Vec<(usize, usize)> = self.entries.keys().copied().collect();
        keys.extend(other.entries.keys().copied());
        keys.iter()
            .map(|&(i, j)| (self.get(i, j) - other.get(i, j)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when all entries are at most tol in modulus.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// Cyclic shift matrix: ones on the superdiagonal and in the lower-left
/// corner, so it permutes basis vectors cyclically.
pub fn matrix_e(n: usize) -> SparseMatrix {
    let mut m = SparseMatrix::zero(n);
    for i in 0..n {
        m.add_entry(i, (i + 1) % n, C64::new(1.0, 0.0));
    }
    m
}

/// Diagonal phase matrix with entries xi^0, xi^1, ..., xi^(n-1).
pub fn matrix_f(n: usize, xi: C64) -> SparseMatrix {
    let mut m = SparseMatrix::zero(n);
    for i in 0..n {
        m.add_entry(i, i, cpow(xi, i as i64));
    }
    m
}

/// Expand an n x n matrix over the phase/shift pair: returns coefficients
/// keyed by (phase power s, shift power b) so that the matrix equals
/// sum c_{s,b} F^s E^b. Inverse discrete Fourier transform along each
/// shifted diagonal.
pub fn fe_coefficients(a: &SparseMatrix, xi: C64) -> BTreeMap<(usize, usize), C64> {
    let n = a.size();
    let mut out = BTreeMap::new();
    for b in 0..n {
        for s in 0..n {
            let mut c = C64::new(0.0, 0.0);
            for l in 0..n {
                c += cpow(xi, -((s * l) as i64)) * a.get(l, (l + b) % n);
            }
            c /= n as f64;
            if c.norm() > PRUNE_TOL {
                out.insert((s, b), c);
            }
        }
    }
    out
}

/// Rebuild a matrix from phase/shift coefficients.
pub fn fe_build(n: usize, xi: C64, coeffs: &BTreeMap<(usize, usize), C64>) -> SparseMatrix {
    let mut out = SparseMatrix::zero(n);
    for (&(s, b), &c) in coeffs {
        for l in 0..n {
            out.add_entry(l, (l + b) % n, c * cpow(xi, (s * l) as i64));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// loop algebra in fused matrix form
// ---------------------------------------------------------------------------

/// Element of the matrix loop algebra: a sum of (Laurent monomial, matrix)
/// terms plus a central vector, one slot per Laurent variable.
#[derive(Clone, Debug)]
pub struct LoopElement {
    dim: usize,
    vars: usize,
    terms: BTreeMap<Vec<i64>, SparseMatrix>,
    central: Vec<C64>,
}

impl LoopElement {
    /// Zero element for matrices of size dim over vars Laurent variables.
    pub fn zero(dim: usize, vars: usize) -> Self {
        LoopElement {
            dim,
            vars,
            terms: BTreeMap::new(),
            central: vec![C64::new(0.0, 0.0); vars],
        }
    }

    /// Single term: matrix tensor the monomial with the given exponents.
    pub fn term(dim: usize, mono: Vec<i64>, mat: SparseMatrix) -> Self {
        assert_eq!(mat.size(), dim);
        let vars = mono.len();
        let mut e = Self::zero(dim, vars);
        e.add_term(&mono, &mat);
        e
    }

    /// Matrix size.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Laurent variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Stored (monomial, matrix) terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &SparseMatrix)> {
        self.terms.iter()
    }

    /// Central vector (coefficient of each central generator).
    pub fn central(&self) -> &[C64] {
        &self.central
    }

    /// Mutable central vector.
    pub fn central_mut(&mut self) -> &mut [C64] {
        &mut self.central
    }

    /// Accumulate a (monomial, matrix) term, pruning empty slots.
    pub fn add_term(&mut self, mono: &[i64], mat: &SparseMatrix) {
        assert_eq!(mono.len(), self.vars);
        assert_eq!(mat.size(), self.dim);
        let slot = self
            .terms
            .entry(mono.to_vec())
            .or_insert_with(|| SparseMatrix::zero(self.dim));
        *slot = slot.add(mat);
        if slot.is_zero(PRUNE_TOL) {
            self.terms.remove(mono);
        }
    }

    /// Sum of elements.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (mono, mat) in &other.terms {
            out.add_term(mono, mat);
        }
        for s in 0..self.vars {
            out.central[s] += other.central[s];
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.dim, self.vars);
        for (mono, mat) in &self.terms {
            out.add_term(mono, &mat.scale(s));
        }
        for k in 0..self.vars {
            out.central[k] = self.central[k] * s;
        }
        out
    }

    /// Difference of elements.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Commutator with the quantum-torus reordering scalars: matrix parts
    /// multiply against sigma factors, and a trace term feeds the centrals
    /// when the monomials cancel.
    pub fn bracket(&self, other: &Self, q: &QMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.vars, other.vars);
        assert_eq!(q.size(), self.vars);
        let mut out = Self::zero(self.dim, self.vars);
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let s_ab = q.sigma(a, b);
                let s_ba = q.sigma(b, a);
                let ab = ma.mul(mb);
                out.add_term(&sum, &ab.scale(s_ab));
                out.add_term(&sum, &mb.mul(ma).scale(-s_ba));
                if sum.iter().all(|&x| x == 0) {
                    let t = ab.trace() * s_ab;
                    for s in 0..self.vars {
                        out.central[s] += t * a[s] as f64;
                    }
                }
            }
        }
        out
    }

    /// Largest deviation from another element across matrix entries and
    /// central slots.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.vars, other.vars);
        let mut monos: Vec<Vec<i64>> = self.terms.keys().cloned().collect();
        monos.extend(other.terms.keys().cloned());
        let zero = SparseMatrix::zero(self.dim);
        let mut d = 0.0f64;
        for m in monos {
            let x = self.terms.get(&m).unwrap_or(&zero);
            let y = other.terms.get(&m).unwrap_or(&zero);
            d = d.max(x.max_abs_diff(y));
        }
        for s in 0..self.vars {
            d = d.max((self.central[s] - other.central[s]).norm());
        }
        d
    }

    /// True when every matrix entry and central slot is at most tol.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|m| m.is_zero(tol))
            && self.central.iter().all(|c| c.norm() <= tol)
    }
}

// ---------------------------------------------------------------------------
// factored tensor picture
// ---------------------------------------------------------------------------

/// Element of the factored algebra: sums of (monomial, left matrix, right
/// matrix) triples plus centrals. The bracket never needs to expand the
/// Kronecker product, which makes it an independent cross-check for the
/// fused picture.
#[derive(Clone, Debug)]
pub struct TensorElement {
    m: usize,
    n: usize,
    vars: usize,
    terms: Vec<(Vec<i64>, SparseMatrix, SparseMatrix)>,
    central: Vec<C64>,
}

impl TensorElement {
    /// Zero element with left size m, right size n, vars Laurent variables.
    pub fn zero(m: usize, n: usize, vars: usize) -> Self {
        TensorElement {
            m,
            n,
            vars,
            terms: Vec::new(),
            central: vec![C64::new(0.0, 0.0); vars],
        }
    }

    /// Single factored term.
    pub fn term(mono: Vec<i64>, left: SparseMatrix, right: SparseMatrix) -> Self {
        let mut e = Self::zero(left.size(), right.size(), mono.len());
        e.push(mono, left, right);
        e
    }

    /// Append a factored term (no combining; the list stays factored).
    pub fn push(&mut self, mono: Vec<i64>, left: SparseMatrix, right: SparseMatrix) {
        assert_eq!(mono.len(), self.vars);
        assert_eq!(left.size(), self.m);
        assert_eq!(right.size(), self.n);
        self.terms.push((mono, left, right));
    }

    /// Central vector.
    pub fn central(&self) -> &[C64] {
        &self.central
    }

    /// Mutable central vector.
    pub fn central_mut(&mut self) -> &mut [C64] {
        &mut self.central
    }

    /// Stored factored terms.
    pub fn terms(&self) -> &[(Vec<i64>, SparseMatrix, SparseMatrix)] {
        &self.terms
    }

    /// Commutator computed slotwise: products stay factored and the trace of
    /// a product of Kronecker factors is the product of traces.
    pub fn bracket(&self, other: &Self, q: &QMatrix) -> Self {
        assert_eq!(self.m, other.m);
        assert_eq!(self.n, other.n);
        assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.m, self.n, self.vars);
        for (a, la, ra) in &self.terms {
            for (b, lb, rb) in &other.terms {
                let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let s_ab = q.sigma(a, b);
                let s_ba = q.sigma(b, a);
                let ll = la.mul(lb);
                let rr = ra.mul(rb);
                out.push(sum.clone(), ll.scale(s_ab), rr.clone());
                out.push(sum.clone(), lb.mul(la).scale(-s_ba), rb.mul(ra));
                if sum.iter().all(|&x| x == 0) {
                    let t = ll.trace() * rr.trace() * s_ab;
                    for s in 0..self.vars {
                        out.central[s] += t * a[s] as f64;
                    }
                }
            }
        }
        out
    }

    /// Fuse every factored term with the Kronecker product; the row/column
    /// index of the fused matrix is i * n + k.
    pub fn to_kron(&self) -> LoopElement {
        let mut out = LoopElement::zero(self.m * self.n, self.vars);
        for (mono, l, r) in &self.terms {
            out.add_term(mono, &l.kron(r));
        }
        for s in 0..self.vars {
            out.central_mut()[s] = self.central[s];
        }
        out
    }
}

// ---------------------------------------------------------------------------
// graded basis form
// ---------------------------------------------------------------------------

/// Basis key (i, j, phase power, shift label, remaining exponents): the
/// matrix unit slot in the outer factor, the F power in [0, n), the shift
/// label which doubles as the t_0 exponent, and the exponents of the
/// remaining Laurent variables.
pub type LhatKey = (usize, usize, usize, i64, Vec<i64>);

/// Element of the twisted algebra in graded basis form: coefficients on basis
/// keys plus a central vector.
#[derive(Clone, Debug)]
pub struct LhatElement {
    m: usize,
    n: usize,
    vars: usize,
    terms: BTreeMap<LhatKey, C64>,
    central: Vec<C64>,
}

impl LhatElement {
    /// Zero element; vars counts all Laurent variables including t_0.
    pub fn zero(m: usize, n: usize, vars: usize) -> Self {
        assert!(vars >= 1, "the t_0 variable is always present");
        LhatElement {
            m,
            n,
            vars,
            terms: BTreeMap::new(),
            central: vec![C64::new(0.0, 0.0); vars],
        }
    }

    /// Single basis element with coefficient 1: outer matrix unit (i, j),
    /// phase power fpow, shift label l0, remaining exponents rest.
    pub fn basis(
        m: usize,
        n: usize,
        i: usize,
        j: usize,
        fpow: usize,
        l0: i64,
        rest: Vec<i64>,
    ) -> Self {
        assert!(i < m && j < m);
        assert!(fpow < n);
        let vars = 1 + rest.len();
        let mut e = Self::zero(m, n, vars);
        e.add_coeff((i, j, fpow, l0, rest), C64::new(1.0, 0.0));
        e
    }

    /// Outer matrix size.
    pub fn outer_size(&self) -> usize {
        self.m
    }

    /// Clock/shift matrix size.
    pub fn inner_size(&self) -> usize {
        self.n
    }

    /// Number of Laurent variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Stored coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&LhatKey, &C64)> {
        self.terms.iter()
    }

    /// Central vector.
    pub fn central(&self) -> &[C64] {
        &self.central
    }

    /// Mutable central vector.
    pub fn central_mut(&mut self) -> &mut [C64] {
        &mut self.central
    }

    /// Accumulate a coefficient on a basis key, pruning negligible slots.
    pub fn add_coeff(&mut self, key: LhatKey, v: C64) {
        assert!(key.0 < self.m && key.1 < self.m);
        assert!(key.2 < self.n);
        assert_eq!(key.4.len(), self.vars - 1);
        let e = self.terms.entry(key.clone()).or_insert(C64::new(0.0, 0.0));
        *e += v;
        if e.norm() <= PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    /// Sum of elements.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.m, self.n, self.vars), (other.m, other.n, other.vars));
        let mut out = self.clone();
        for (k, &v) in &other.terms {
            out.add_coeff(k.clone(), v);
        }
        for s in 0..self.vars {
            out.central[s] += other.central[s];
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.m, self.n, self.vars);
        for (k, &v) in &self.terms {
            out.add_coeff(k.clone(), v * s);
        }
        for k in 0..self.vars {
            out.central[k] = self.central[k] * s;
        }
        out
    }

    /// Difference of elements.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Structure constants in the graded basis: contraction of outer matrix
    /// units, a phase from moving the shift label past the F power, the
    /// reordering scalar of the full monomials, and a trace term into the
    /// centrals when everything cancels.
    pub fn bracket(&self, other: &Self, q: &QMatrix) -> Self {
        assert_eq!((self.m, self.n, self.vars), (other.m, other.n, other.vars));
        assert_eq!(q.size(), self.vars);
        let xi = xi_root(self.n);
        let nn = self.n;
        let mut out = Self::zero(self.m, self.n, self.vars);
        for ((ix, jx, fx, lx, rx), &cx) in &self.terms {
            let alpha: Vec<i64> = std::iter::once(*lx).chain(rx.iter().copied()).collect();
            for ((iy, jy, fy, ly, ry), &cy) in &other.terms {
                let beta: Vec<i64> = std::iter::once(*ly).chain(ry.iter().copied()).collect();
                let scale = cx * cy;
                let fsum = (fx + fy) % nn;
                let lsum = lx + ly;
                let rsum: Vec<i64> = rx.iter().zip(ry).map(|(x, y)| x + y).collect();
                let s_ab = q.sigma(&alpha, &beta);
                let s_ba = q.sigma(&beta, &alpha);
                if jx == iy {
                    let ph = cpow(xi, lx * *fy as i64);
                    out.add_coeff(
                        (*ix, *jy, fsum, lsum, rsum.clone()),
                        scale * ph * s_ab,
                    );
                    if ix == jy && fsum == 0 && lsum == 0 && rsum.iter().all(|&x| x == 0) {
                        let t = scale * ph * s_ab * nn as f64;
                        for s in 0..self.vars {
                            out.central[s] += t * alpha[s] as f64;
                        }
                    }
                }
                if jy == ix {
                    let ph = cpow(xi, ly * *fx as i64);
                    out.add_coeff((*iy, *jx, fsum, lsum, rsum), -scale * ph * s_ba);
                }
            }
        }
        out
    }

    /// Expand into fused matrix form: each basis key becomes the Kronecker
    /// product of its outer matrix unit with F^fpow E^(l0 mod n), tensored
    /// with the monomial t_0^l0 t^rest.
    pub fn to_loop(&self) -> LoopElement {
        let xi = xi_root(self.n);
        let f = matrix_f(self.n, xi);
        let e = matrix_e(self.n);
        let mut out = LoopElement::zero(self.m * self.n, self.vars);
        for ((i, j, fpow, l0, rest), &c) in &self.terms {
            let inner = f.pow(*fpow).mul(&e.pow(l0.rem_euclid(self.n as i64) as usize));
            let mat = SparseMatrix::unit(self.m, *i, *j).kron(&inner).scale(c);
            let mono: Vec<i64> = std::iter::once(*l0).chain(rest.iter().copied()).collect();
            out.add_term(&mono, &mat);
        }
        for s in 0..self.vars {
            out.central_mut()[s] = self.central[s];
        }
        out
    }

    /// Read a fused element back into graded basis form. Fails when some
    /// block carries a shift power incompatible with its t_0 exponent.
    pub fn from_loop(le: &LoopElement, m: usize, n: usize) -> Result<Self, CoreError> {
        if le.dim() != m * n {
            return Err(CoreError::SizeMismatch(format!(
                "fused size {} vs {} x {}",
                le.dim(),
                m,
                n
            )));
        }
        let xi = xi_root(n);
        let mut out = Self::zero(m, n, le.vars());
        for (mono, mat) in le.terms() {
            let l0 = mono[0];
            let b_target = l0.rem_euclid(n as i64) as usize;
            let rest: Vec<i64> = mono[1..].to_vec();
            for bi in 0..m {
                for bj in 0..m {
                    let mut block = SparseMatrix::zero(n);
                    for r in 0..n {
                        for c in 0..n {
                            let v = mat.get(bi * n + r, bj * n + c);
                            if v.norm() > 0.0 {
                                block.add_entry(r, c, v);
                            }
                        }
                    }
                    if block.is_zero(PRUNE_TOL) {
                        continue;
                    }
                    for (&(s, b), &coeff) in fe_coefficients(&block, xi).iter() {
                        if b != b_target {
                            if coeff.norm() > BASIS_TOL {
                                return Err(CoreError::NotBasisForm(format!(
                                    "block ({bi},{bj}) monomial {:?} carries shift power {b} \
                                     incompatible with t_0 exponent {l0}",
                                    mono
                                )));
                            }
                            continue;
                        }
                        out.add_coeff((bi, bj, s, l0, rest.clone()), coeff);
                    }
                }
            }
        }
        for s in 0..le.vars() {
            out.central[s] = le.central()[s];
        }
        Ok(out)
    }

    /// Largest coefficient/central deviation from another element.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.m, self.n, self.vars), (other.m, other.n, other.vars));
        let zero = C64::new(0.0, 0.0);
        let mut keys: Vec<LhatKey> = self.terms.keys().cloned().collect();
        keys.extend(other.terms.keys().cloned());
        let mut d = 0.0f64;
        for k in keys {
            let x = self.terms.get(&k).copied().unwrap_or(zero);
            let y = other.terms.get(&k).copied().unwrap_or(zero);
            d = d.max((x - y).norm());
        }
        for s in 0..self.vars {
            d = d.max((self.central[s] - other.central[s]).norm());
        }
        d
    }

    /// True when all coefficients and centrals are at most tol.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.norm() <= tol)
            && self.central.iter().all(|c| c.norm() <= tol)
    }
}

/// The fusing isomorphism from the factored picture (over the starred
/// pairing) to graded basis form (over the plain pairing): matrix units in
/// the right factor expand over the phase/shift pair, the t_0 exponent is
/// fused to n * a_0 + column - row, a column-dependent power of q_s0 scales
/// each term, a diagonal correction feeds c_0, and the domain central c_0
/// maps to n c_0.
pub fn iso_f(x: &TensorElement, q: &QMatrix) -> LhatElement {
    let m = x.outer_size();
    let n = x.inner_size();
    let vars = q.size();
    let xi = xi_root(n);
    let mut out = LhatElement::zero(m, n, vars);
    for (mono, left, right) in x.terms() {
        assert_eq!(mono.len(), vars);
        let a0 = mono[0];
        let rest: Vec<i64> = mono[1..].to_vec();
        for (&(i, j), &lv) in left.iter() {
            for (&(k, l), &rv) in right.iter() {
                // prefactor: product over s >= 1 of q_s0^((l + 1) * a_s)
                let mut pref = lv * rv;
                for s in 1..vars {
                    let e = (l as i64 + 1) * mono[s];
                    if e != 0 {
                        pref *= cpow(q.entry(s, 0), e);
                    }
                }
                let l0 = a0 * n as i64 + l as i64 - k as i64;
                // expand the right matrix unit over the phase/shift pair
                for s in 0..n {
                    let c = cpow(xi, -((s * k) as i64)) / n as f64;
                    out.add_coeff((i, j, s, l0, rest.clone()), pref * c);
                }
                // diagonal correction into c_0 (1-based row index)
                if i == j && k == l && mono.iter().all(|&e| e == 0) {
                    out.central_mut()[0] -= lv * rv * (k as f64 + 1.0);
                }
            }
        }
    }
    // central map: c_0 goes to n c_0, the others pass through
    out.central_mut()[0] += x.central()[0] * n as f64;
    for s in 1..vars {
        out.central_mut()[s] += x.central()[s];
    }
    out
}

impl TensorElement {
    /// Left matrix size.
    pub fn outer_size(&self) -> usize {
        self.m
    }

    /// Right matrix size.
    pub fn inner_size(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn default_q() -> C64 {
        c(1.3, 0.45)
    }

    fn rand_c<R: Rng>(rng: &mut R) -> C64 {
        let choices = [
            c(1.0, 0.0),
            c(-1.0, 0.0),
            c(0.0, 1.0),
            c(0.0, -1.0),
            c(1.0, 1.0),
            c(1.0, -1.0),
        ];
        choices[rng.gen_range(0..choices.len())]
    }

    #[test]
    fn sigma_frozen_values() {
        let q = default_q();
        let qm = QMatrix::two_vars(q);
        // exponent a_1 * b_0 = 2 * 3
        let got = qm.sigma(&[1, 2], &[3, 4]);
        assert!((got - cpow(q, 6)).norm() < TOL);
        assert!((qm.sigma(&[0, 1], &[1, 0]) - q).norm() < TOL);
        assert!((qm.sigma(&[1, 0], &[0, 1]) - c(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn sigma_of_inverse_order_pairs() {
        let qm = QMatrix::two_vars(default_q());
        // swapping arguments inverts the commutation scalar picked up
        let a = [2i64, -1];
        let b = [1i64, 3];
        let fwd = qm.sigma(&a, &b);
        let bwd = qm.sigma(&b, &a);
        // t^a t^b = (sigma(a,b)/sigma(b,a)) t^b t^a, and the ratio only
        // depends on the antisymmetrized exponents
        let q = default_q();
        let want = cpow(q, a[1] * b[0] - b[1] * a[0]);
        assert!((fwd / bwd - want).norm() < TOL);
    }

    #[test]
    fn pairing_matrix_validation() {
        let one = c(1.0, 0.0);
        let q = default_q();
        assert!(QMatrix::new(vec![vec![one, one / q], vec![q, one]]).is_ok());
        // broken diagonal
        assert!(QMatrix::new(vec![vec![c(2.0, 0.0), one], vec![one, one]]).is_err());
        // not mutually inverse
        assert!(QMatrix::new(vec![vec![one, q], vec![q, one]]).is_err());
    }

    #[test]
    fn clock_shift_small_cases() {
        // n = 1: both matrices are the 1 x 1 identity
        let e1 = matrix_e(1);
        let f1 = matrix_f(1, xi_root(1));
        assert!(e1.max_abs_diff(&SparseMatrix::identity(1)) < TOL);
        assert!(f1.max_abs_diff(&SparseMatrix::identity(1)) < TOL);
        // n = 2: shift is the swap, phases are +1, -1
        let e2 = matrix_e(2);
        assert!((e2.get(0, 1) - c(1.0, 0.0)).norm() < TOL);
        assert!((e2.get(1, 0) - c(1.0, 0.0)).norm() < TOL);
        let f2 = matrix_f(2, xi_root(2));
        assert!((f2.get(0, 0) - c(1.0, 0.0)).norm() < TOL);
        assert!((f2.get(1, 1) + c(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn clock_shift_relations() {
        for n in [1usize, 2, 3, 4, 6] {
            let xi = xi_root(n);
            let e = matrix_e(n);
            let f = matrix_f(n, xi);
            let id = SparseMatrix::identity(n);
            assert!(e.pow(n).max_abs_diff(&id) < 1e-12, "E^n at n={n}");
            assert!(f.pow(n).max_abs_diff(&id) < 1e-12, "F^n at n={n}");
            // E F = xi F E
            let lhs = e.mul(&f);
            let rhs = f.mul(&e).scale(xi);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "EF = xi FE at n={n}");
            // E^a F^b = xi^(a b) F^b E^a
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let lhs = e.pow(a).mul(&f.pow(b));
                    let rhs = f.pow(b).mul(&e.pow(a)).scale(cpow(xi, (a * b) as i64));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12, "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn trace_of_phase_shift_words() {
        for n in [2usize, 3, 4] {
            let xi = xi_root(n);
            let e = matrix_e(n);
            let f = matrix_f(n, xi);
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let t = f.pow(a).mul(&e.pow(b)).trace();
                    let want = if a % n == 0 && b % n == 0 {
                        c(n as f64, 0.0)
                    } else {
                        c(0.0, 0.0)
                    };
                    assert!((t - want).norm() < 1e-10, "n={n} a={a} b={b} t={t}");
                }
            }
        }
    }

    #[test]
    fn fe_expansion_of_matrix_units() {
        // at n = 2 the unit in slot (0, 1) is (F^0 E^1 + F^1 E^1) / 2
        let xi = xi_root(2);
        let u = SparseMatrix::unit(2, 0, 1);
        let coeffs = fe_coefficients(&u, xi);
        assert_eq!(coeffs.len(), 2);
        assert!((coeffs[&(0, 1)] - c(0.5, 0.0)).norm() < TOL);
        assert!((coeffs[&(1, 1)] - c(0.5, 0.0)).norm() < TOL);
    }

    #[test]
    fn fe_expansion_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 4] {
            let xi = xi_root(n);
            for _ in 0..10 {
                let mut a = SparseMatrix::zero(n);
                for i in 0..n {
                    for j in 0..n {
                        if rng.gen_bool(0.7) {
                            a.add_entry(i, j, rand_c(&mut rng));
                        }
                    }
                }
                let back = fe_build(n, xi, &fe_coefficients(&a, xi));
                assert!(a.max_abs_diff(&back) < 1e-12, "roundtrip at n={n}");
            }
        }
    }

    fn rand_loop<R: Rng>(dim: usize, vars: usize, rng: &mut R) -> LoopElement {
        let mut e = LoopElement::zero(dim, vars);
        for _ in 0..3 {
            let mono: Vec<i64> = (0..vars).map(|_| rng.gen_range(-2i64..=2)).collect();
            let mut m = SparseMatrix::zero(dim);
            m.add_entry(
                rng.gen_range(0..dim),
                rng.gen_range(0..dim),
                rand_c(rng),
            );
            e.add_term(&mono, &m);
        }
        e
    }

    #[test]
    fn loop_bracket_frozen_example() {
        // [E_01 t_0, E_10 t_0^-1] = E_00 - E_11 + c_0 with trivial pairing
        let q = QMatrix::trivial(1);
        let x = LoopElement::term(2, vec![1], SparseMatrix::unit(2, 0, 1));
        let y = LoopElement::term(2, vec![-1], SparseMatrix::unit(2, 1, 0));
        let b = x.bracket(&y, &q);
        let mut want = LoopElement::zero(2, 1);
        want.add_term(
            &[0],
            &SparseMatrix::unit(2, 0, 0).sub(&SparseMatrix::unit(2, 1, 1)),
        );
        want.central_mut()[0] = c(1.0, 0.0);
        assert!(b.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn loop_bracket_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = QMatrix::random(2, &mut rng);
        for _ in 0..20 {
            let x = rand_loop(3, 2, &mut rng);
            let y = rand_loop(3, 2, &mut rng);
            let s = x.bracket(&y, &q).add(&y.bracket(&x, &q));
            assert!(s.is_zero(1e-10));
        }
    }

    #[test]
    fn loop_bracket_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let q = QMatrix::random(2, &mut rng);
        for _ in 0..10 {
            let x = rand_loop(2, 2, &mut rng);
            let y = rand_loop(2, 2, &mut rng);
            let z = rand_loop(2, 2, &mut rng);
            let j = x
                .bracket(&y.bracket(&z, &q), &q)
                .add(&y.bracket(&z.bracket(&x, &q), &q))
                .add(&z.bracket(&x.bracket(&y, &q), &q));
            assert!(j.is_zero(1e-9), "jacobi deviation {}", j.max_abs_diff(&LoopElement::zero(2, 2)));
        }
    }

    fn rand_tensor<R: Rng>(m: usize, n: usize, vars: usize, rng: &mut R) -> TensorElement {
        let mut e = TensorElement::zero(m, n, vars);
        for _ in 0..2 {
            let mono: Vec<i64> = (0..vars).map(|_| rng.gen_range(-2i64..=2)).collect();
            let l = SparseMatrix::unit(m, rng.gen_range(0..m), rng.gen_range(0..m))
                .scale(rand_c(rng));
            let r = SparseMatrix::unit(n, rng.gen_range(0..n), rng.gen_range(0..n));
            e.push(mono, l, r);
        }
        e
    }

    #[test]
    fn kron_slot_identification() {
        // left unit (0,1) with right unit (1,0) fuses into slot (1, 2) when n = 2
        let t = TensorElement::term(
            vec![0, 0],
            SparseMatrix::unit(2, 0, 1),
            SparseMatrix::unit(2, 1, 0),
        );
        let fused = t.to_kron();
        let (mono, mat) = fused.terms().next().unwrap();
        assert_eq!(mono, &vec![0, 0]);
        assert!((mat.get(1, 2) - c(1.0, 0.0)).norm() < TOL);
        assert_eq!(mat.iter().count(), 1);
    }

    #[test]
    fn factored_bracket_matches_fused_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let q = QMatrix::random(2, &mut rng);
        for _ in 0..15 {
            let x = rand_tensor(2, 2, 2, &mut rng);
            let y = rand_tensor(2, 2, 2, &mut rng);
            let factored = x.bracket(&y, &q).to_kron();
            let fused = x.to_kron().bracket(&y.to_kron(), &q);
            assert!(
                factored.max_abs_diff(&fused) < 1e-10,
                "deviation {}",
                factored.max_abs_diff(&fused)
            );
        }
    }

    fn rand_lhat<R: Rng>(m: usize, n: usize, vars: usize, rng: &mut R) -> LhatElement {
        let mut e = LhatElement::zero(m, n, vars);
        for _ in 0..2 {
            let key = (
                rng.gen_range(0..m),
                rng.gen_range(0..m),
                rng.gen_range(0..n),
                rng.gen_range(-2i64..=2),
                (0..vars - 1).map(|_| rng.gen_range(-2i64..=2)).collect(),
            );
            e.add_coeff(key, rand_c(rng));
        }
        e
    }

    #[test]
    fn graded_basis_roundtrips_through_fused_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..15 {
            let x = rand_lhat(2, 2, 2, &mut rng);
            let back = LhatElement::from_loop(&x.to_loop(), 2, 2).unwrap();
            assert!(x.max_abs_diff(&back) < 1e-12);
        }
    }

    #[test]
    fn non_basis_elements_are_rejected() {
        // a bare shift matrix with t_0 exponent 0 is not in basis form
        let le = LoopElement::term(2, vec![0], matrix_e(2));
        assert!(matches!(
            LhatElement::from_loop(&le, 1, 2),
            Err(CoreError::NotBasisForm(_))
        ));
    }

    #[test]
    fn graded_bracket_frozen_central_example() {
        // [E^1 t_0 t_1, E^-1 t_0^-1 t_1^-1] = 2 q^-1 (c_0 + c_1) at n = 2
        let q = default_q();
        let qm = QMatrix::two_vars(q);
        let x = LhatElement::basis(1, 2, 0, 0, 0, 1, vec![1]);
        let y = LhatElement::basis(1, 2, 0, 0, 0, -1, vec![-1]);
        let b = x.bracket(&y, &qm);
        assert!(b.terms().next().is_none(), "matrix parts cancel");
        let want = c(2.0, 0.0) / q;
        assert!((b.central()[0] - want).norm() < TOL);
        assert!((b.central()[1] - want).norm() < TOL);
    }

    #[test]
    fn graded_bracket_matches_fused_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let qm = QMatrix::two_vars(default_q());
        for trial in 0..20 {
            let x = rand_lhat(2, 2, 2, &mut rng);
            let y = rand_lhat(2, 2, 2, &mut rng);
            let direct = x.bracket(&y, &qm);
            let bridged =
                LhatElement::from_loop(&x.to_loop().bracket(&y.to_loop(), &qm), 2, 2).unwrap();
            assert!(
                direct.max_abs_diff(&bridged) < 1e-9,
                "trial {trial}: deviation {}",
                direct.max_abs_diff(&bridged)
            );
        }
    }

    #[test]
    fn fusing_iso_frozen_image() {
        // E_00 (x) E_00 (x) 1 maps to E_00 (x) (F^0 + F^1)/2 with t_0^0, minus c_0
        let qm = QMatrix::two_vars(default_q());
        let t = TensorElement::term(
            vec![0, 0],
            SparseMatrix::unit(1, 0, 0),
            SparseMatrix::unit(2, 0, 0),
        );
        let img = iso_f(&t, &qm);
        let mut want = LhatElement::zero(1, 2, 2);
        want.add_coeff((0, 0, 0, 0, vec![0]), c(0.5, 0.0));
        want.add_coeff((0, 0, 1, 0, vec![0]), c(0.5, 0.0));
        want.central_mut()[0] = c(-1.0, 0.0);
        assert!(img.max_abs_diff(&want) < 1e-12);
        // and the fused image is the plain matrix unit minus the central
        let fused = img.to_loop();
        let (mono, mat) = fused.terms().next().unwrap();
        assert_eq!(mono, &vec![0, 0]);
        let unit = SparseMatrix::unit(1, 0, 0).kron(&SparseMatrix::unit(2, 0, 0));
        assert!(mat.max_abs_diff(&unit) < 1e-12);
    }

    #[test]
    fn fusing_iso_is_a_bracket_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let qm = QMatrix::two_vars(default_q());
        let starred = qm.star(2);
        for trial in 0..20 {
            let x = rand_tensor(2, 2, 2, &mut rng);
            let y = rand_tensor(2, 2, 2, &mut rng);
            let lhs = iso_f(&x.bracket(&y, &starred), &qm);
            let rhs = iso_f(&x, &qm).bracket(&iso_f(&y, &qm), &qm);
            assert!(
                lhs.max_abs_diff(&rhs) < 1e-9,
                "trial {trial}: deviation {}",
                lhs.max_abs_diff(&rhs)
            );
        }
    }

    #[test]
    fn central_map_scales_first_slot() {
        let qm = QMatrix::two_vars(default_q());
        let mut t = TensorElement::zero(2, 3, 2);
        t.central_mut()[0] = c(1.0, 0.0);
        t.central_mut()[1] = c(2.0, 0.0);
        let img = iso_f(&t, &qm);
        assert!((img.central()[0] - c(3.0, 0.0)).norm() < TOL);
        assert!((img.central()[1] - c(2.0, 0.0)).norm() < TOL);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_sigma_biadditive(
            a in proptest::collection::vec(-3i64..=3, 2),
            ap in proptest::collection::vec(-3i64..=3, 2),
            b in proptest::collection::vec(-3i64..=3, 2),
        ) {
            let qm = QMatrix::two_vars(default_q());
            let sum: Vec<i64> = a.iter().zip(&ap).map(|(x, y)| x + y).collect();
            let lhs = qm.sigma(&sum, &b);
            let rhs = qm.sigma(&a, &b) * qm.sigma(&ap, &b);
            prop_assert!((lhs - rhs).norm() < 1e-9);
            let lhs2 = qm.sigma(&b, &sum);
            let rhs2 = qm.sigma(&b, &a) * qm.sigma(&b, &ap);
            prop_assert!((lhs2 - rhs2).norm() < 1e-9);
        }

        #[test]
        fn prop_lhat_bracket_antisymmetric(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let qm = QMatrix::two_vars(default_q());
            let x = rand_lhat(2, 2, 2, &mut rng);
            let y = rand_lhat(2, 2, 2, &mut rng);
            let s = x.bracket(&y, &qm).add(&y.bracket(&x, &qm));
            prop_assert!(s.is_zero(1e-9));
        }
    }
}
