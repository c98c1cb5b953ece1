//! Numeric verification suites over the whole library, with a JSON report.
//!
//! Each suite checks one family of identities: matrix relations, bicharacter
//! laws, bracket transport along the structure maps, closed-form commutators
//! of operator modes, formal series windows, and representation maps. Suites
//! are deterministic for a fixed seed and run independently in parallel.

use std::collections::BTreeSet;
use std::rc::Rc;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fock::{heisenberg_apply, FockVector, Space, State};
use crate::lattice::{to_c, Lattice};
use crate::qtorus::{
    iso_f, matrix_e, matrix_f, xi_root, LhatElement, LhatKey, QMatrix, SparseMatrix, TensorElement,
};
use crate::scalars::{cpow, AdmissibleGroup, C64, GroupElement, Half};
use crate::vertex::{
    commutator_apply, correction_scalar, x_alpha_apply, x_anticommutator, xij_mode_apply,
    xij_mode_pair_expansion, ModeOp,
};

// ---------------------------------------------------------------------------
// Parameters, results, report
// ---------------------------------------------------------------------------

/// Shared knobs for all suites.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    /// Outer matrix size and lattice rank.
    pub m: usize,
    /// Clock/shift size and torsion order.
    pub n: usize,
    /// Override for the torsion order used by operator suites (defaults to n).
    pub xi_order: Option<usize>,
    /// Free deformation parameter.
    pub q: C64,
    /// Degree budget for sampled inputs.
    pub cutoff: u32,
    /// Working oscillator cutoff for intermediate vectors.
    pub intermediate_cutoff: u32,
    /// Charge coordinate window.
    pub charge_window: i64,
    /// Base tolerance; per-suite tolerances scale with it.
    pub tol: f64,
    /// Global random seed; each suite derives its own stream.
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            m: 2,
            n: 2,
            xi_order: None,
            q: C64::new(1.3, 0.45),
            cutoff: 6,
            intermediate_cutoff: 10,
            charge_window: 4,
            tol: 1e-9,
            seed: 42,
        }
    }
}

impl SuiteParams {
    /// Torsion order in effect for operator suites.
    pub fn order(&self) -> usize {
        self.xi_order.unwrap_or(self.n)
    }

    /// Suite tolerance: the intrinsic value scaled by the base tolerance.
    pub fn stol(&self, intrinsic: f64) -> f64 {
        intrinsic * (self.tol / 1e-9)
    }

    fn space(&self, rank: usize) -> Space {
        Space::plain(rank, self.intermediate_cutoff, self.charge_window)
    }
}

/// One verified comparison (possibly aggregating many samples).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    #[serde(rename = "maxAbsError")]
    pub max_abs_error: f64,
    pub exact: bool,
    pub pass: bool,
    #[serde(rename = "ref")]
    pub reference: String,
}

/// Per-suite rollup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub cases: usize,
    pub failed: usize,
    pub pass: bool,
}

/// Echo of the configuration a report was produced with.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportConfig {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "xiOrder")]
    pub xi_order: usize,
    pub q: String,
    pub cutoff: u32,
    #[serde(rename = "intermediateCutoff")]
    pub intermediate_cutoff: u32,
    #[serde(rename = "chargeWindow")]
    pub charge_window: i64,
    pub tol: f64,
    pub seed: u64,
    pub suites: Vec<String>,
}

/// Full run report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub timestamp_s: u64,
    pub config: ReportConfig,
    pub cases: Vec<CaseResult>,
    pub suites: Vec<SuiteOutcome>,
    pub pass: bool,
}

impl Report {
    /// Pretty JSON encoding.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Collects case results for one suite; an empty suite fails loudly.
struct Sink {
    suite: &'static str,
    cases: Vec<CaseResult>,
}

impl Sink {
    fn new(suite: &'static str) -> Self {
        Sink {
            suite,
            cases: Vec::new(),
        }
    }

    fn check(&mut self, case: &str, dev: f64, tol: f64, exact: bool, reference: &str) {
        self.cases.push(CaseResult {
            suite: self.suite.to_string(),
            case: case.to_string(),
            max_abs_error: dev,
            exact,
            pass: dev.is_finite() && dev <= tol,
            reference: reference.to_string(),
        });
    }

    /// Witness-style case: the recorded value must reach a threshold.
    fn check_at_least(&mut self, case: &str, value: f64, threshold: f64, reference: &str) {
        self.cases.push(CaseResult {
            suite: self.suite.to_string(),
            case: case.to_string(),
            max_abs_error: value,
            exact: false,
            pass: value.is_finite() && value >= threshold,
            reference: reference.to_string(),
        });
    }

    fn finish(mut self) -> Vec<CaseResult> {
        if self.cases.is_empty() {
            self.check(
                "no-checks-executed",
                f64::INFINITY,
                0.0,
                false,
                "a suite that compares nothing must not pass",
            );
        }
        self.cases
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn suite_rng(name: &str, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(fnv1a(name) ^ seed)
}

const PALETTE: [C64; 6] = [
    C64::new(1.0, 0.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, -1.0),
    C64::new(1.0, 1.0),
    C64::new(1.0, -1.0),
];

fn pick_coeff<R: Rng>(rng: &mut R) -> C64 {
    PALETTE[rng.gen_range(0..PALETTE.len())]
}

fn format_c(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

/// Smallest order up to the probe bound at which z is numerically a root of
/// unity, if any.
pub fn root_of_unity_order(z: C64, max_order: usize) -> Option<usize> {
    for k in 1..=max_order {
        if (cpow(z, k as i64) - C64::new(1.0, 0.0)).norm() < 1e-9 {
            return Some(k);
        }
    }
    None
}

fn sample_states(rank: usize) -> Vec<FockVector> {
    let mut out = vec![
        FockVector::unit(State::vacuum(rank)),
        FockVector::unit(State::new(vec![(0, 1, 1)], vec![0; rank])),
    ];
    if rank >= 2 {
        let mut charge = vec![0i64; rank];
        charge[0] = 1;
        charge[1] = -1;
        out.push(FockVector::unit(State::new(
            vec![((rank - 1) as u16, 2, 1)],
            charge,
        )));
    } else {
        out.push(FockVector::unit(State::new(vec![(0, 2, 1)], vec![1])));
    }
    out
}

fn scaled_dev(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / 1.0_f64.max(rhs.norm())
}

// ---------------------------------------------------------------------------
// Closed-form bracket expectation for two-index modes
// ---------------------------------------------------------------------------

/// Predicted commutator of two parametrized two-index modes: a sum of modes
/// with scalar weights plus a central scalar (the central element acts as the
/// identity here).
#[derive(Clone, Debug)]
pub struct BracketExpectation {
    pub terms: Vec<(ModeOp, C64)>,
    pub central: C64,
}

impl BracketExpectation {
    /// Apply the expectation to a vector.
    pub fn apply(&self, space: &Space, group: &AdmissibleGroup, v: &FockVector) -> FockVector {
        let mut out = v.scale(self.central);
        for (op, w) in &self.terms {
            out = out.add(&op.apply(space, group, v).scale(*w));
        }
        out
    }
}

/// Sign picked up when the normal forms of two scale factors multiply: each
/// unit of torsion reduction in the product costs a factor of -1, because the
/// half-integer powers inside a composite mode are taken at the reduced normal
/// form while the factors contribute their own branches.
pub fn reduction_sign(group: &AdmissibleGroup, c1: &GroupElement, c2: &GroupElement) -> f64 {
    let red = group.mul(c1, c2);
    let wrap = (c1.torsion_exponent() + c2.torsion_exponent() - red.torsion_exponent())
        / group.torsion_order() as i64;
    if wrap % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form commutator of two two-index modes: contraction terms on the
/// matching indices, and a central scalar when both match with opposite mode
/// labels. Contraction terms carry the normal-form reduction sign of the
/// product scale; the central constant switches branch when the product scale
/// is trivial, and there equals the product of the factors' half powers times
/// the mode label.
pub fn expected_mode_bracket(
    group: &AdmissibleGroup,
    x: &ModeOp,
    y: &ModeOp,
) -> Option<BracketExpectation> {
    let (ModeOp::Xij {
        i: i1,
        j: j1,
        a: a1,
        b: b1,
        k: m,
    }, ModeOp::Xij {
        i: i2,
        j: j2,
        a: a2,
        b: b2,
        k: n,
    }) = (x, y)
    else {
        return None;
    };
    let c1 = group.div(b1, a1);
    let c2 = group.div(b2, a2);
    let rsign = reduction_sign(group, &c1, &c2);
    let mut terms = Vec::new();
    let mut central = C64::new(0.0, 0.0);
    if j1 == i2 {
        let w = cpow(group.value(&group.div(a2, b1)), -n) * rsign;
        terms.push((
            ModeOp::Xij {
                i: *i1,
                j: *j2,
                a: a1.clone(),
                b: group.div(&group.mul(b1, b2), a2),
                k: m + n,
            },
            w,
        ));
    }
    if i1 == j2 {
        let w = -cpow(group.value(&group.div(b2, a1)), *m) * rsign;
        terms.push((
            ModeOp::Xij {
                i: *i2,
                j: *j1,
                a: a2.clone(),
                b: group.div(&group.mul(b1, b2), a1),
                k: m + n,
            },
            w,
        ));
    }
    if i1 == j2 && j1 == i2 && m + n == 0 {
        let cc = group.mul(&c1, &c2);
        let halves = group.power_half(&c1, Half(1)) * group.power_half(&c2, Half(1));
        let fwd = cpow(group.value(&group.div(a2, b1)), *m);
        central = if group.is_identity(&cc) {
            halves * C64::new(*m as f64, 0.0) * fwd
        } else {
            let k = halves / (C64::new(1.0, 0.0) - group.value(&cc));
            let bwd = cpow(group.value(&group.div(b2, a1)), *m);
            k * (fwd - bwd)
        };
    }
    Some(BracketExpectation { terms, central })
}

// ---------------------------------------------------------------------------
// Representation-map machinery
// ---------------------------------------------------------------------------

/// Image of one graded basis element under a representation map: a weighted
/// sum of operator modes plus a multiple of the identity.
struct RepImage {
    ops: Vec<(ModeOp, C64)>,
    scalar: C64,
}

/// Phase carried by a mode whose scale parameter sits in the torsion part:
/// half a torsion step per unit of the normal-form exponent. Transported
/// brackets then compensate the normal-form reduction sign, because the phases
/// of two factors compose to the phase of the reduced product times that sign.
fn presentation_phase(group: &AdmissibleGroup, op: &ModeOp) -> C64 {
    let (a, b) = match op {
        ModeOp::Xij { a, b, .. } => (a, b),
        ModeOp::Y { a, b, .. } => (a, b),
        _ => return C64::new(1.0, 0.0),
    };
    let n0 = group.div(b, a).torsion_exponent();
    C64::from_polar(
        1.0,
        std::f64::consts::PI * n0 as f64 / group.torsion_order() as f64,
    )
}

impl RepImage {
    /// Single-mode image; the mode and its identity part both carry the
    /// presentation phase of the mode's scale parameter.
    fn line(group: &AdmissibleGroup, op: ModeOp, scalar: C64) -> RepImage {
        let phase = presentation_phase(group, &op);
        RepImage {
            ops: vec![(op, phase)],
            scalar: scalar * phase,
        }
    }
}

fn rep_apply(
    e: &LhatElement,
    map: &dyn Fn(&LhatKey) -> RepImage,
    kappa: &[C64],
    space: &Space,
    group: &AdmissibleGroup,
    v: &FockVector,
) -> FockVector {
    let mut out = FockVector::zero();
    if !v.is_exact() {
        out.mark_inexact();
    }
    for (key, &cx) in e.terms() {
        let img = map(key);
        for (op, w) in &img.ops {
            out = out.add(&op.apply(space, group, v).scale(cx * *w));
        }
        if img.scalar.norm() > 0.0 {
            out = out.add(&v.scale(cx * img.scalar));
        }
    }
    for (s, &g) in e.central().iter().enumerate() {
        if g.norm() > 0.0 {
            out = out.add(&v.scale(g * kappa[s]));
        }
    }
    out
}

struct RepSuite<'a> {
    domain_m: usize,
    domain_n: usize,
    vars: usize,
    qm: QMatrix,
    space: Space,
    group: AdmissibleGroup,
    map: Box<dyn Fn(&LhatKey) -> RepImage + 'a>,
    kappa: Vec<C64>,
}

fn random_domain_element<R: Rng>(rng: &mut R, m: usize, n: usize, vars: usize) -> LhatElement {
    let mut e = LhatElement::zero(m, n, vars);
    for _ in 0..(1 + rng.gen_range(0..2)) {
        let key: LhatKey = (
            rng.gen_range(0..m),
            rng.gen_range(0..m),
            rng.gen_range(0..n),
            rng.gen_range(-2..=2),
            (1..vars).map(|_| rng.gen_range(-2..=2)).collect(),
        );
        e.add_coeff(key, pick_coeff(rng));
    }
    e
}

fn run_rep_suite(name: &'static str, p: &SuiteParams, spec: &RepSuite, reference: &str) -> Vec<CaseResult> {
    let mut sink = Sink::new(name);
    let mut rng = suite_rng(name, p.seed);
    let states = sample_states(spec.space.rank());
    let mut worst = 0.0_f64;
    let mut exact = true;
    for _ in 0..30 {
        let x = random_domain_element(&mut rng, spec.domain_m, spec.domain_n, spec.vars);
        let y = random_domain_element(&mut rng, spec.domain_m, spec.domain_n, spec.vars);
        let z = x.bracket(&y, &spec.qm);
        for v in &states {
            let yw = rep_apply(&y, &spec.map, &spec.kappa, &spec.space, &spec.group, v);
            let xw = rep_apply(&x, &spec.map, &spec.kappa, &spec.space, &spec.group, v);
            let lhs = rep_apply(&x, &spec.map, &spec.kappa, &spec.space, &spec.group, &yw).sub(
                &rep_apply(&y, &spec.map, &spec.kappa, &spec.space, &spec.group, &xw),
            );
            let rhs = rep_apply(&z, &spec.map, &spec.kappa, &spec.space, &spec.group, v);
            worst = worst.max(lhs.max_abs_diff(&rhs));
            exact = exact && lhs.is_exact() && rhs.is_exact();
        }
    }
    sink.check(
        "bracket-transport 30 random pairs",
        worst,
        p.stol(1e-8),
        exact,
        reference,
    );
    sink.finish()
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn suite_clock_shift(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("clock-shift");
    let tol = p.stol(1e-12);
    let mut orders: BTreeSet<usize> = [1, 2, 3, 4, 6].into_iter().collect();
    orders.insert(p.n);
    for n in orders {
        let xi = xi_root(n);
        let e = matrix_e(n);
        let f = matrix_f(n, xi);
        let id = SparseMatrix::identity(n);
        sink.check(
            &format!("shift-order n={n}"),
            e.pow(n).max_abs_diff(&id),
            tol,
            true,
            "n-th power of the cyclic shift is the identity",
        );
        sink.check(
            &format!("clock-order n={n}"),
            f.pow(n).max_abs_diff(&id),
            tol,
            true,
            "n-th power of the diagonal clock is the identity",
        );
        sink.check(
            &format!("exchange n={n}"),
            e.mul(&f).max_abs_diff(&f.mul(&e).scale(xi)),
            tol,
            true,
            "shift past clock picks up the primitive phase",
        );
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let lhs = e.pow(a).mul(&f.pow(b));
                let rhs = f.pow(b).mul(&e.pow(a)).scale(cpow(xi, (a * b) as i64));
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
        sink.check(
            &format!("power-exchange n={n}"),
            worst,
            tol,
            true,
            "powers exchange with the phase raised to the product of exponents",
        );
        let mut worst = 0.0_f64;
        for a in 0..2 * n {
            for b in 0..2 * n {
                let tr = f.pow(a).mul(&e.pow(b)).trace();
                let want = if a % n == 0 && b % n == 0 {
                    C64::new(n as f64, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((tr - want).norm());
            }
        }
        sink.check(
            &format!("trace-projection n={n}"),
            worst,
            tol,
            true,
            "the trace of a clock/shift word sees only the identity component",
        );
    }
    sink.finish()
}

fn suite_sigma_q(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("sigma-q");
    let mut rng = suite_rng("sigma-q", p.seed);
    let tol = p.stol(1e-10);
    for nu in [1usize, 2] {
        let size = nu + 1;
        let mut d_left = 0.0_f64;
        let mut d_right = 0.0_f64;
        let mut d_cocycle = 0.0_f64;
        for _ in 0..100 {
            let qm = QMatrix::random(size, &mut rng);
            let rv = |rng: &mut ChaCha8Rng| -> Vec<i64> {
                (0..size).map(|_| rng.gen_range(-2..=2)).collect()
            };
            let a = rv(&mut rng);
            let b = rv(&mut rng);
            let g = rv(&mut rng);
            let add = |x: &[i64], y: &[i64]| -> Vec<i64> {
                x.iter().zip(y).map(|(u, v)| u + v).collect()
            };
            d_left = d_left.max(scaled_dev(
                qm.sigma(&add(&a, &b), &g),
                qm.sigma(&a, &g) * qm.sigma(&b, &g),
            ));
            d_right = d_right.max(scaled_dev(
                qm.sigma(&a, &add(&b, &g)),
                qm.sigma(&a, &b) * qm.sigma(&a, &g),
            ));
            d_cocycle = d_cocycle.max(scaled_dev(
                qm.sigma(&a, &b) * qm.sigma(&add(&a, &b), &g),
                qm.sigma(&a, &add(&b, &g)) * qm.sigma(&b, &g),
            ));
        }
        sink.check(
            &format!("first-slot-additive vars={size}"),
            d_left,
            tol,
            false,
            "the reordering scalar is multiplicative in its first exponent slot",
        );
        sink.check(
            &format!("second-slot-additive vars={size}"),
            d_right,
            tol,
            false,
            "the reordering scalar is multiplicative in its second exponent slot",
        );
        sink.check(
            &format!("cocycle-compatibility vars={size}"),
            d_cocycle,
            tol,
            false,
            "two-step reordering is independent of the bracketing order",
        );
    }
    sink.finish()
}

fn suite_iso_lemma14(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("iso-lemma14");
    let mut rng = suite_rng("iso-lemma14", p.seed);
    let tol = p.stol(1e-9);
    let mut worst = 0.0_f64;
    let mut central_worst = 0.0_f64;
    for trial in 0..50 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let qm = if trial % 2 == 0 {
            QMatrix::two_vars(p.q)
        } else {
            QMatrix::random(2, &mut rng)
        };
        let x = random_domain_element(&mut rng, m, n, 2);
        let y = random_domain_element(&mut rng, m, n, 2);
        let direct = x.bracket(&y, &qm);
        let fused = x.to_loop().bracket(&y.to_loop(), &qm);
        match LhatElement::from_loop(&fused, m, n) {
            Ok(bridged) => {
                worst = worst.max(direct.max_abs_diff(&bridged));
                for s in 0..2 {
                    central_worst =
                        central_worst.max((direct.central()[s] - bridged.central()[s]).norm());
                }
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    sink.check(
        "bracket-bridge 50 random pairs",
        worst,
        tol,
        false,
        "the graded-basis bracket agrees with the fused matrix bracket",
    );
    sink.check(
        "central-bridge",
        central_worst,
        tol,
        false,
        "trace terms land on the same central vector in both pictures",
    );
    sink.finish()
}

fn suite_iso_prop15(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("iso-prop15");
    let mut rng = suite_rng("iso-prop15", p.seed);
    let tol = p.stol(1e-9);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let qm = QMatrix::two_vars(p.q);
        let starred = qm.star(n);
        let rand_tensor = |rng: &mut ChaCha8Rng| -> TensorElement {
            let mut t = TensorElement::zero(m, n, 2);
            for _ in 0..(1 + rng.gen_range(0..2)) {
                let mono: Vec<i64> = (0..2).map(|_| rng.gen_range(-2..=2)).collect();
                let left =
                    SparseMatrix::unit(m, rng.gen_range(0..m), rng.gen_range(0..m)).scale(pick_coeff(rng));
                let right = SparseMatrix::unit(n, rng.gen_range(0..n), rng.gen_range(0..n));
                t.push(mono, left, right);
            }
            t
        };
        let x = rand_tensor(&mut rng);
        let y = rand_tensor(&mut rng);
        let lhs = iso_f(&x.bracket(&y, &starred), &qm);
        let rhs = iso_f(&x, &qm).bracket(&iso_f(&y, &qm), &qm);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    sink.check(
        "fusing-map-homomorphism 50 random pairs",
        worst,
        tol,
        false,
        "fusing the factored picture into the graded algebra preserves brackets",
    );
    // central normalization: the first slot is scaled by the inner size
    let qm = QMatrix::two_vars(p.q);
    let mut t = TensorElement::zero(2, 3, 2);
    t.central_mut()[0] = C64::new(1.0, 0.0);
    t.central_mut()[1] = C64::new(2.0, 0.0);
    let img = iso_f(&t, &qm);
    let dev = (img.central()[0] - C64::new(3.0, 0.0)).norm()
        + (img.central()[1] - C64::new(2.0, 0.0)).norm();
    sink.check(
        "central-normalization",
        dev,
        p.stol(1e-12),
        true,
        "the first central generator is rescaled by the inner size, the rest are fixed",
    );
    sink.finish()
}

fn suite_heisenberg(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("heisenberg");
    let mut rng = suite_rng("heisenberg", p.seed);
    let tol = p.stol(1e-10);
    for rank in [2usize, 3] {
        let sp = p.space(rank);
        let state = FockVector::unit(State::new(vec![(0, 1, 1)], vec![0; rank]));
        let mut worst = 0.0_f64;
        let mut count = 0usize;
        let coords: Vec<i64> = (-2..=2).collect();
        let label_pairs: [(i64, i64); 4] = [(1, -1), (2, -2), (3, -3), (1, 2)];
        let run_pair = |alpha: &[i64], beta: &[i64], worst: &mut f64, count: &mut usize| {
            let ac = to_c(alpha);
            let bc = to_c(beta);
            let ip = Lattice::new(rank).ip(alpha, beta);
            for (k, l) in label_pairs {
                let lhs = heisenberg_apply(&sp, &ac, k, &heisenberg_apply(&sp, &bc, l, &state))
                    .sub(&heisenberg_apply(&sp, &bc, l, &heisenberg_apply(&sp, &ac, k, &state)));
                let want = if k + l == 0 {
                    state.scale(C64::new((k * ip) as f64, 0.0))
                } else {
                    FockVector::zero()
                };
                *worst = (*worst).max(lhs.max_abs_diff(&want));
                *count += 1;
            }
        };
        if rank == 2 {
            for a0 in &coords {
                for a1 in &coords {
                    for b0 in &coords {
                        for b1 in &coords {
                            run_pair(&[*a0, *a1], &[*b0, *b1], &mut worst, &mut count);
                        }
                    }
                }
            }
        } else {
            for _ in 0..400 {
                let alpha: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
                let beta: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
                run_pair(&alpha, &beta, &mut worst, &mut count);
            }
        }
        sink.check(
            &format!("commutator rank={rank} ({count} samples)"),
            worst,
            tol,
            true,
            "oscillator modes commute to the label times the pairing on opposite labels",
        );
    }
    sink.finish()
}

fn suite_cocycle(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("cocycle");
    let mut rng = suite_rng("cocycle", p.seed);
    let tol = p.stol(1e-12);
    for rank in [2usize, 3] {
        let lat = Lattice::new(rank);
        let mut vectors: Vec<Vec<i64>> = Vec::new();
        let mut stack = vec![Vec::new()];
        while let Some(v) = stack.pop() {
            if v.len() == rank {
                vectors.push(v);
                continue;
            }
            for c in -2..=2 {
                let mut w = v.clone();
                w.push(c);
                stack.push(w);
            }
        }
        let parity = |e: i64| -> f64 {
            if e.rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut d_sym = 0.0_f64;
        let mut d_zero = 0.0_f64;
        for a in &vectors {
            for b in &vectors {
                let sa: i64 = a.iter().sum();
                let sb: i64 = b.iter().sum();
                let lhs = (lat.cocycle(a, b) * lat.cocycle(b, a)) as f64;
                let rhs = parity(sa * sb - lat.ip(a, b));
                d_sym = d_sym.max((lhs - rhs).abs());
                if sa == 0 && sb == 0 {
                    d_zero = d_zero.max((lhs - parity(lat.ip(a, b))).abs());
                }
            }
        }
        sink.check(
            &format!("opposite-order-product rank={rank}"),
            d_sym,
            tol,
            true,
            "swapping the arguments multiplies the sign by the coordinate-sum parity",
        );
        sink.check(
            &format!("zero-sum-reduction rank={rank}"),
            d_zero,
            tol,
            true,
            "on zero-sum vectors the swap parity is the bilinear pairing alone",
        );
        let mut d_diag = 0.0_f64;
        for a in &vectors {
            let sa: i64 = a.iter().sum();
            let lhs = lat.cocycle(a, a) as f64;
            let rhs = parity((sa * sa - lat.norm2(a)) / 2);
            d_diag = d_diag.max((lhs - rhs).abs());
        }
        sink.check(
            &format!("diagonal-value rank={rank}"),
            d_diag,
            tol,
            true,
            "the diagonal sign is the half-difference parity of sum-square and norm",
        );
        let mut d_bi = 0.0_f64;
        let mut d_cplx = 0.0_f64;
        for _ in 0..400 {
            let rv = |rng: &mut ChaCha8Rng| -> Vec<i64> {
                (0..rank).map(|_| rng.gen_range(-2..=2)).collect()
            };
            let a = rv(&mut rng);
            let b = rv(&mut rng);
            let g = rv(&mut rng);
            let add = |x: &[i64], y: &[i64]| -> Vec<i64> {
                x.iter().zip(y).map(|(u, v)| u + v).collect()
            };
            let lhs = lat.cocycle(&add(&a, &b), &g);
            let rhs = lat.cocycle(&a, &g) * lat.cocycle(&b, &g);
            d_bi = d_bi.max((lhs - rhs).abs() as f64);
            let lhs2 = lat.cocycle(&a, &add(&b, &g));
            let rhs2 = lat.cocycle(&a, &b) * lat.cocycle(&a, &g);
            d_bi = d_bi.max((lhs2 - rhs2).abs() as f64);
            let cc = lat.cocycle_c(&a, &to_c(&b));
            d_cplx = d_cplx.max((cc - C64::new(lat.cocycle(&a, &b) as f64, 0.0)).norm());
        }
        sink.check(
            &format!("bimultiplicative rank={rank}"),
            d_bi,
            tol,
            true,
            "the sign is multiplicative in each slot separately",
        );
        sink.check(
            &format!("complex-extension rank={rank}"),
            d_cplx,
            tol,
            true,
            "the phase extension restricts to the integer sign on lattice vectors",
        );
    }
    sink.finish()
}

fn suite_clifford(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("clifford");
    let tol = p.stol(1e-9);
    let sp = p.space(2);
    let states = [
        State::vacuum(2),
        State::new(vec![(0, 1, 1)], vec![0, 0]),
        State::charged(vec![1, -1]),
        State::new(vec![(1, 2, 1)], vec![0, 1]),
    ];
    let labels: [i64; 6] = [-5, -3, -1, 1, 3, 5];
    for i in 0..2usize {
        for j in 0..2usize {
            let ei: Vec<i64> = (0..2).map(|t| i64::from(t == i)).collect();
            let mej: Vec<i64> = (0..2).map(|t| -i64::from(t == j)).collect();
            let mut worst = 0.0_f64;
            let mut exact = true;
            for st in &states {
                let v = FockVector::unit(st.clone());
                for tk in labels {
                    for tl in labels {
                        let got = x_anticommutator(&sp, &ei, Half(tk), &mej, Half(tl), &v);
                        let want = if i == j && tk + tl == 0 {
                            v.clone()
                        } else {
                            FockVector::zero()
                        };
                        worst = worst.max(got.max_abs_diff(&want));
                        exact = exact && got.is_exact();
                    }
                }
            }
            sink.check(
                &format!("pair ({i},{j}) half-labels up to 5/2"),
                worst,
                tol,
                exact,
                "mode pairs of opposite vectors contract to a Clifford-type identity",
            );
        }
    }
    let mut rng = suite_rng("clifford", p.seed);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let i = rng.gen_range(0..2usize);
        let j = rng.gen_range(0..2usize);
        let sgn: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let ar: Vec<i64> = (0..2).map(|t| sgn * i64::from(t == i)).collect();
        let br: Vec<i64> = (0..2).map(|t| sgn * i64::from(t == j)).collect();
        let tk = *labels.get(rng.gen_range(0..6)).unwrap();
        let tl = *labels.get(rng.gen_range(0..6)).unwrap();
        let v = FockVector::unit(states[rng.gen_range(0..states.len())].clone());
        let got = x_anticommutator(&sp, &ar, Half(tk), &br, Half(tl), &v);
        worst = worst.max(got.max_abs());
    }
    sink.check(
        "same-sign pairs anticommute to zero",
        worst,
        tol,
        false,
        "modes of two basis vectors (or two negatives) have vanishing anticommutators",
    );
    sink.finish()
}

fn thm237_param_set(group: &AdmissibleGroup) -> Vec<GroupElement> {
    vec![
        group.identity(),
        group.xi_pow(1),
        group.free_pow(0, 1),
        group.mul(&group.xi_pow(1), &group.free_pow(0, 1)),
        group.free_pow(0, -1),
    ]
}

fn suite_thm237(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("thm237");
    let mut rng = suite_rng("thm237", p.seed);
    let tol = p.stol(1e-9);
    let sp = p.space(2);
    let states = [
        State::vacuum(2),
        State::new(vec![(0, 1, 1)], vec![0, 0]),
        State::charged(vec![1, -1]),
    ];
    let patterns: [(usize, usize, usize, usize, &str); 6] = [
        (0, 1, 1, 1, "first-index-contraction"),
        (0, 1, 0, 0, "second-index-contraction"),
        (0, 1, 1, 0, "double-contraction"),
        (0, 0, 1, 1, "disjoint-indices"),
        (0, 0, 0, 0, "diagonal-diagonal"),
        (1, 1, 1, 1, "diagonal-diagonal-second-slot"),
    ];
    for order in [2usize, 3] {
        let group = AdmissibleGroup::cyclotomic(order, vec![p.q]).expect("order is valid");
        let params = thm237_param_set(&group);
        for (i1, j1, i2, j2, label) in patterns {
            let mut worst = 0.0_f64;
            let mut exact = true;
            for _ in 0..6 {
                let a1 = params[rng.gen_range(0..params.len())].clone();
                let b1 = params[rng.gen_range(0..params.len())].clone();
                let a2 = params[rng.gen_range(0..params.len())].clone();
                let b2 = params[rng.gen_range(0..params.len())].clone();
                let m = rng.gen_range(-2..=2);
                let n = rng.gen_range(-2..=2);
                let x = ModeOp::Xij {
                    i: i1,
                    j: j1,
                    a: a1,
                    b: b1,
                    k: m,
                };
                let y = ModeOp::Xij {
                    i: i2,
                    j: j2,
                    a: a2,
                    b: b2,
                    k: n,
                };
                let exp = expected_mode_bracket(&group, &x, &y).expect("both are two-index modes");
                for st in &states {
                    let v = FockVector::unit(st.clone());
                    let direct = commutator_apply(&sp, &group, &x, &y, &v);
                    let want = exp.apply(&sp, &group, &v);
                    worst = worst.max(direct.max_abs_diff(&want));
                    exact = exact && direct.is_exact() && want.is_exact();
                }
            }
            sink.check(
                &format!("{label} order={order}"),
                worst,
                tol,
                exact,
                "commutators of two-index modes match their closed contraction form",
            );
        }
        // forced central branches: product of parameters degenerate or not
        let id = group.identity();
        let qe = group.free_pow(0, 1);
        let qinv = group.free_pow(0, -1);
        for (m, b1, b2, label) in [
            (2i64, qe.clone(), qinv.clone(), "central-degenerate-product"),
            (1i64, qe.clone(), qe.clone(), "central-generic-product"),
        ] {
            let x = ModeOp::Xij {
                i: 0,
                j: 1,
                a: id.clone(),
                b: b1,
                k: m,
            };
            let y = ModeOp::Xij {
                i: 1,
                j: 0,
                a: id.clone(),
                b: b2,
                k: -m,
            };
            let exp = expected_mode_bracket(&group, &x, &y).expect("two-index modes");
            let mut worst = 0.0_f64;
            for st in &states {
                let v = FockVector::unit(st.clone());
                let direct = commutator_apply(&sp, &group, &x, &y, &v);
                worst = worst.max(direct.max_abs_diff(&exp.apply(&sp, &group, &v)));
            }
            sink.check(
                &format!("{label} order={order}"),
                worst,
                tol,
                false,
                "the central scalar switches between the degenerate and generic constants",
            );
        }
        // independent oracle: the same commutator through pair expansions
        let mut worst = 0.0_f64;
        for _ in 0..2 {
            let a1 = params[rng.gen_range(0..params.len())].clone();
            let b1 = params[rng.gen_range(0..params.len())].clone();
            let b2 = params[rng.gen_range(0..params.len())].clone();
            let m = rng.gen_range(-1..=1);
            let n = rng.gen_range(-1..=1);
            let x = ModeOp::Xij {
                i: 0,
                j: 1,
                a: a1.clone(),
                b: b1.clone(),
                k: m,
            };
            let y = ModeOp::Xij {
                i: 1,
                j: 0,
                a: group.identity(),
                b: b2.clone(),
                k: n,
            };
            let exp = expected_mode_bracket(&group, &x, &y).expect("two-index modes");
            for st in &states[..2] {
                let v = FockVector::unit(st.clone());
                let xy = xij_mode_pair_expansion(
                    &sp,
                    &group,
                    0,
                    1,
                    &a1,
                    &b1,
                    m,
                    &xij_mode_pair_expansion(&sp, &group, 1, 0, &group.identity(), &b2, n, &v),
                );
                let yx = xij_mode_pair_expansion(
                    &sp,
                    &group,
                    1,
                    0,
                    &group.identity(),
                    &b2,
                    n,
                    &xij_mode_pair_expansion(&sp, &group, 0, 1, &a1, &b1, m, &v),
                );
                let direct = xy.sub(&yx);
                worst = worst.max(direct.max_abs_diff(&exp.apply(&sp, &group, &v)));
            }
        }
        sink.check(
            &format!("pair-expansion-oracle order={order}"),
            worst,
            tol,
            false,
            "an independent normal-ordered pair expansion reproduces the same commutators",
        );
    }
    sink.finish()
}

fn delta_window_sides(a: C64, b: C64, s: i64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    let lhs = if s <= 0 {
        let u = -s;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..=u {
            acc += cpow(a, -k) * cpow(b, u - k);
        }
        acc
    } else if s == 1 {
        C64::new(0.0, 0.0)
    } else {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..=(s - 2) {
            acc += cpow(b, -k) * cpow(a, s - 2 - k);
        }
        -a * cpow(b, -1) * acc
    };
    let ab = a * b;
    let rhs = if (ab - one).norm() > 1e-9 {
        (cpow(a, s) - a * cpow(b, 1 - s)) / (one - ab)
    } else {
        C64::new(1.0 - s as f64, 0.0) * cpow(a, s)
    };
    (lhs, rhs)
}

fn suite_delta(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("delta");
    let mut rng = suite_rng("delta", p.seed);
    let tol = p.stol(1e-12);
    let one = C64::new(1.0, 0.0);
    let pairs = [
        (C64::new(2.0, 0.0), C64::new(3.0, 0.0)),
        (C64::new(2.0, 0.0), C64::new(0.5, 0.0)),
        (p.q, one / p.q),
    ];
    for (a, b) in pairs {
        let mut worst = 0.0_f64;
        for s in -8..=8 {
            let (lhs, rhs) = delta_window_sides(a, b, s);
            worst = worst.max(scaled_dev(lhs, rhs));
        }
        sink.check(
            &format!("antidiagonal-window a={} b={}", format_c(a), format_c(b)),
            worst,
            tol,
            false,
            "both half-series sum to the closed rational form on every antidiagonal",
        );
    }
    for a in [C64::new(2.0, 0.0), p.q] {
        let coeffs: Vec<(i64, C64)> = (-3..=3).map(|d| (d, pick_coeff(&mut rng))).collect();
        let mut worst = 0.0_f64;
        for t in -8..=8 {
            let lhs: C64 = coeffs.iter().map(|(d, c)| *c * cpow(a, t - d)).sum();
            let pat: C64 = coeffs.iter().map(|(d, c)| *c * cpow(a, -d)).sum();
            let rhs = pat * cpow(a, t);
            worst = worst.max(scaled_dev(lhs, rhs));
        }
        sink.check(
            &format!("substitution-window a={}", format_c(a)),
            worst,
            tol,
            false,
            "multiplying the delta series evaluates the factor at the substituted point",
        );
    }
    sink.finish()
}

fn suite_limit248(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("limit248");
    let one = C64::new(1.0, 0.0);
    for a in [C64::new(2.0, 0.0), p.q] {
        for s in [-3i64, 2, 4] {
            let mut errs = Vec::new();
            for t in 3..=6 {
                let delta = 10f64.powi(-t);
                let b = (one / a) * C64::new(1.0 + delta, 0.0);
                let general = (cpow(a, s) - a * cpow(b, 1 - s)) / (one - a * b);
                let degenerate = C64::new(1.0 - s as f64, 0.0) * cpow(a, s);
                errs.push((general - degenerate).norm());
            }
            let mut worst = 0.0_f64;
            for w in errs.windows(2) {
                let ratio = w[0] / w[1].max(f64::MIN_POSITIVE);
                worst = worst.max((ratio - 10.0).abs());
            }
            sink.check(
                &format!("rational-form a={} s={s}", format_c(a), s = s),
                worst,
                1.0,
                false,
                "the defect against the degenerate form shrinks linearly in the offset",
            );
            let mut errs = Vec::new();
            for t in 3..=6 {
                let at = C64::new(1.0 + 10f64.powi(-t), 0.0);
                let fd = (cpow(at, s) - one) / (at - one);
                errs.push((fd - C64::new(s as f64, 0.0)).norm());
            }
            let mut worst = 0.0_f64;
            for w in errs.windows(2) {
                let ratio = w[0] / w[1].max(f64::MIN_POSITIVE);
                worst = worst.max((ratio - 10.0).abs());
            }
            sink.check(
                &format!("difference-quotient s={s}", s = s),
                worst,
                1.0,
                false,
                "the difference quotient approaches the exponent at linear rate",
            );
        }
    }
    sink.finish()
}

fn suite_cor42(p: &SuiteParams) -> Vec<CaseResult> {
    let group = AdmissibleGroup::cyclotomic(1, vec![]).expect("trivial torsion");
    let id = group.identity();
    let gid = group.clone();
    let spec = RepSuite {
        domain_m: p.m,
        domain_n: 1,
        vars: 1,
        qm: QMatrix::trivial(1),
        space: p.space(p.m),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (i, j, _, l0, _) = key;
            RepImage::line(
                &gid,
                ModeOp::Xij {
                    i: *i,
                    j: *j,
                    a: id.clone(),
                    b: id.clone(),
                    k: *l0,
                },
                C64::new(0.0, 0.0),
            )
        }),
        kappa: vec![C64::new(1.0, 0.0)],
    };
    run_rep_suite(
        "cor42",
        p,
        &spec,
        "matrix units over Laurent polynomials act through plain two-index modes",
    )
}

fn suite_cor44(p: &SuiteParams) -> Vec<CaseResult> {
    let n = p.order();
    let group = AdmissibleGroup::cyclotomic(n, vec![]).expect("valid torsion order");
    let gmap = group.clone();
    let spec = RepSuite {
        domain_m: 1,
        domain_n: n,
        vars: 1,
        qm: QMatrix::trivial(1),
        space: p.space(1),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (_, _, fpow, l0, _) = key;
            let f = *fpow as i64;
            if *fpow != 0 {
                let scalar = if *l0 == 0 {
                    correction_scalar(&gmap, &gmap.xi_pow(-f))
                } else {
                    C64::new(0.0, 0.0)
                };
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: 0,
                        j: 0,
                        a: gmap.xi_pow(f - 1),
                        b: gmap.xi_pow(-1),
                        k: *l0,
                    },
                    scalar,
                )
            } else {
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: 0,
                        j: 0,
                        a: gmap.xi_pow(-1),
                        b: gmap.xi_pow(-1),
                        k: *l0,
                    },
                    C64::new(0.0, 0.0),
                )
            }
        }),
        kappa: vec![C64::new(1.0 / n as f64, 0.0)],
    };
    run_rep_suite(
        "cor44",
        p,
        &spec,
        "clock/shift words act through diagonal modes with torsion parameters",
    )
}

fn suite_cor47(p: &SuiteParams) -> Vec<CaseResult> {
    let group = AdmissibleGroup::cyclotomic(1, vec![p.q]).expect("trivial torsion");
    let gmap = group.clone();
    let spec = RepSuite {
        domain_m: p.m,
        domain_n: 1,
        vars: 2,
        qm: QMatrix::two_vars(p.q),
        space: p.space(p.m),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (i, j, _, l0, rest) = key;
            let r = rest[0];
            let b = gmap.free_pow(0, r);
            let scalar = if r != 0 && i == j && *l0 == 0 {
                correction_scalar(&gmap, &b)
            } else {
                C64::new(0.0, 0.0)
            };
            RepImage::line(
                &gmap,
                ModeOp::Xij {
                    i: *i,
                    j: *j,
                    a: gmap.identity(),
                    b,
                    k: *l0,
                },
                scalar,
            )
        }),
        kappa: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    };
    run_rep_suite(
        "cor47",
        p,
        &spec,
        "matrix units over the two-variable torus act with one free parameter",
    )
}

fn suite_cor410(p: &SuiteParams) -> Vec<CaseResult> {
    let n = p.order();
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let gmap = group.clone();
    let spec = RepSuite {
        domain_m: 1,
        domain_n: n,
        vars: 2,
        qm: QMatrix::two_vars(p.q),
        space: p.space(1),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (_, _, fpow, l0, rest) = key;
            let f = *fpow as i64;
            let r = rest[0];
            if *fpow != 0 || r != 0 {
                let b = gmap.mul(&gmap.xi_pow(-1), &gmap.free_pow(0, r));
                let scalar = if *l0 == 0 {
                    let c = gmap.mul(&gmap.xi_pow(-f), &gmap.free_pow(0, r));
                    correction_scalar(&gmap, &c)
                } else {
                    C64::new(0.0, 0.0)
                };
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: 0,
                        j: 0,
                        a: gmap.xi_pow(f - 1),
                        b,
                        k: *l0,
                    },
                    scalar,
                )
            } else {
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: 0,
                        j: 0,
                        a: gmap.xi_pow(-1),
                        b: gmap.xi_pow(-1),
                        k: *l0,
                    },
                    C64::new(0.0, 0.0),
                )
            }
        }),
        kappa: vec![C64::new(1.0 / n as f64, 0.0), C64::new(0.0, 0.0)],
    };
    run_rep_suite(
        "cor410",
        p,
        &spec,
        "the mixed clock/shift torus acts on a rank-one space with both parameters",
    )
}

fn suite_cor412(p: &SuiteParams) -> Vec<CaseResult> {
    let n = p.order();
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let gmap = group.clone();
    let spec = RepSuite {
        domain_m: p.m,
        domain_n: n,
        vars: 2,
        qm: QMatrix::two_vars(p.q),
        space: p.space(p.m),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (i, j, fpow, l0, rest) = key;
            let f = *fpow as i64;
            let r = rest[0];
            if *fpow != 0 || r != 0 {
                let b = gmap.mul(&gmap.xi_pow(-1), &gmap.free_pow(0, r));
                let scalar = if *l0 == 0 && i == j {
                    let c = gmap.mul(&gmap.xi_pow(-f), &gmap.free_pow(0, r));
                    correction_scalar(&gmap, &c)
                } else {
                    C64::new(0.0, 0.0)
                };
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: *i,
                        j: *j,
                        a: gmap.xi_pow(f - 1),
                        b,
                        k: *l0,
                    },
                    scalar,
                )
            } else {
                RepImage::line(
                    &gmap,
                    ModeOp::Xij {
                        i: *i,
                        j: *j,
                        a: gmap.xi_pow(-1),
                        b: gmap.xi_pow(-1),
                        k: *l0,
                    },
                    C64::new(0.0, 0.0),
                )
            }
        }),
        kappa: vec![C64::new(1.0 / n as f64, 0.0), C64::new(0.0, 0.0)],
    };
    run_rep_suite(
        "cor412",
        p,
        &spec,
        "the full mixed algebra acts through two-index modes with both parameters",
    )
}

fn suite_prop419(p: &SuiteParams) -> Vec<CaseResult> {
    let n = p.order();
    let rank = p.m;
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let gmap = group.clone();
    let spec = RepSuite {
        domain_m: 1,
        domain_n: n,
        vars: 2,
        qm: QMatrix::two_vars(p.q),
        space: p.space(rank),
        group: group.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (_, _, fpow, l0, rest) = key;
            let f = *fpow as i64;
            let r = rest[0];
            if *fpow != 0 || r != 0 {
                let b = gmap.mul(&gmap.xi_pow(-1), &gmap.free_pow(0, r));
                let scalar = if *l0 == 0 {
                    let c = gmap.mul(&gmap.xi_pow(-f), &gmap.free_pow(0, r));
                    correction_scalar(&gmap, &c) * C64::new(rank as f64, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                RepImage::line(
                    &gmap,
                    ModeOp::Y {
                        a: gmap.xi_pow(f - 1),
                        b,
                        k: *l0,
                    },
                    scalar,
                )
            } else {
                RepImage::line(
                    &gmap,
                    ModeOp::Y {
                        a: gmap.xi_pow(-1),
                        b: gmap.xi_pow(-1),
                        k: *l0,
                    },
                    C64::new(0.0, 0.0),
                )
            }
        }),
        kappa: vec![
            C64::new(rank as f64 / n as f64, 0.0),
            C64::new(0.0, 0.0),
        ],
    };
    run_rep_suite(
        "prop419",
        p,
        &spec,
        "clock/shift words act through trace-sum modes on a higher-rank space",
    )
}

fn suite_prop420(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("prop420");
    let n = p.order();
    let group1 = AdmissibleGroup::cyclotomic(1, vec![p.q]).expect("trivial torsion");
    let gmap = group1.clone();
    let nn = n as i64;
    let spec = RepSuite {
        domain_m: p.m,
        domain_n: 1,
        vars: 2,
        qm: QMatrix::two_vars(cpow(p.q, nn)),
        space: p.space(p.m),
        group: group1.clone(),
        map: Box::new(move |key: &LhatKey| {
            let (i, j, _, l0, rest) = key;
            let r = rest[0];
            let b = if r != 0 {
                gmap.free_pow(0, r)
            } else {
                gmap.identity()
            };
            let scalar = if r != 0 && i == j && *l0 == 0 {
                correction_scalar(&gmap, &b)
            } else {
                C64::new(0.0, 0.0)
            };
            RepImage::line(
                &gmap,
                ModeOp::Xij {
                    i: *i,
                    j: *j,
                    a: gmap.identity(),
                    b,
                    k: nn * *l0,
                },
                scalar,
            )
        }),
        kappa: vec![C64::new(n as f64, 0.0), C64::new(0.0, 0.0)],
    };
    let mut cases = run_rep_suite(
        "prop420",
        p,
        &spec,
        "the index-rescaled action uses the free parameter raised to the torsion order",
    );
    sink.cases.append(&mut cases);
    // paired-scale brackets: trace-sum against two-index modes at rescaled labels
    let rank = p.m.max(2);
    let sp = p.space(rank);
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let mut rng = suite_rng("prop420-scaled", p.seed);
    let mut worst = 0.0_f64;
    for _ in 0..12 {
        let i = rng.gen_range(0..n as i64);
        let r = rng.gen_range(-1..=1);
        let s = rng.gen_range(-1..=1);
        let m = rng.gen_range(-2..=2);
        let nn2 = rng.gen_range(-1..=1);
        let (k, l) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
        let y = ModeOp::Y {
            a: group.xi_pow(i - 1),
            b: group.mul(&group.xi_pow(-1), &group.free_pow(0, r)),
            k: m,
        };
        let x = ModeOp::Xij {
            i: k,
            j: l,
            a: group.identity(),
            b: group.free_pow(0, s),
            k: n as i64 * nn2,
        };
        let coeff = cpow(p.q, r * nn * nn2) - cpow(p.q, s * m);
        let want_op = ModeOp::Xij {
            i: k,
            j: l,
            a: group.xi_pow(i - 1),
            b: group.mul(&group.xi_pow(-1), &group.free_pow(0, r + s)),
            k: m + n as i64 * nn2,
        };
        for st in sample_states(rank) {
            let got = commutator_apply(&sp, &group, &y, &x, &st);
            let want = want_op.apply(&sp, &group, &st).scale(coeff);
            worst = worst.max(got.max_abs_diff(&want));
        }
    }
    sink.check(
        "rescaled-label mixed brackets",
        worst,
        p.stol(1e-8),
        false,
        "trace-sum modes pair with rescaled two-index modes through a two-term scalar",
    );
    sink.finish()
}

fn suite_prop421(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("prop421");
    let mut rng = suite_rng("prop421", p.seed);
    let n = p.order();
    let rank = p.m.max(2);
    let sp = p.space(rank);
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let xi = group.xi();
    let mut worst = 0.0_f64;
    let mut exact = true;
    for _ in 0..24 {
        let i = rng.gen_range(0..n as i64);
        let r = rng.gen_range(-1..=1);
        let s = rng.gen_range(-1..=1);
        let m = rng.gen_range(-2..=2);
        let nmode = rng.gen_range(-2..=2);
        let (k, l) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
        let y = ModeOp::Y {
            a: group.xi_pow(i - 1),
            b: group.mul(&group.xi_pow(-1), &group.free_pow(0, r)),
            k: m,
        };
        let x = ModeOp::Xij {
            i: k,
            j: l,
            a: group.identity(),
            b: group.free_pow(0, s),
            k: nmode,
        };
        let coeff = cpow(xi, -nmode)
            * (cpow(p.q, r * nmode) - cpow(p.q, s * m) * cpow(xi, i * nmode));
        let want_op = ModeOp::Xij {
            i: k,
            j: l,
            a: group.xi_pow(i - 1),
            b: group.mul(&group.xi_pow(-1), &group.free_pow(0, r + s)),
            k: m + nmode,
        };
        for st in sample_states(rank) {
            let got = commutator_apply(&sp, &group, &y, &x, &st);
            let want = want_op.apply(&sp, &group, &st).scale(coeff);
            worst = worst.max(got.max_abs_diff(&want));
            exact = exact && got.is_exact();
        }
    }
    sink.check(
        "mixed brackets 24 random samples",
        worst,
        p.stol(1e-8),
        exact,
        "trace-sum modes bracket with off-diagonal modes into a single rescaled mode",
    );
    sink.finish()
}

type DynOp<'a> = Rc<dyn Fn(&FockVector) -> FockVector + 'a>;

fn lift_op<'a>(space: &'a Space, group: &'a AdmissibleGroup, op: ModeOp) -> DynOp<'a> {
    Rc::new(move |v| op.apply(space, group, v))
}

fn combo_op<'a>(parts: Vec<(DynOp<'a>, C64)>) -> DynOp<'a> {
    Rc::new(move |v| {
        let mut out = FockVector::zero();
        for (f, w) in &parts {
            out = out.add(&f(v).scale(*w));
        }
        out
    })
}

fn bracket_op<'a>(f: DynOp<'a>, g: DynOp<'a>) -> DynOp<'a> {
    Rc::new(move |v| f(&g(v)).sub(&g(&f(v))))
}

fn suite_dualpair(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("dualpair");
    let n = p.order();
    let rank = p.m.max(2);
    let sp = p.space(rank);
    let group = AdmissibleGroup::cyclotomic(n, vec![p.q]).expect("valid torsion order");
    let id = group.identity();
    let states = sample_states(rank);

    let mut first: Vec<DynOp> = Vec::new();
    for i in 0..n as i64 {
        for m in -2..=2 {
            first.push(lift_op(
                &sp,
                &group,
                ModeOp::Y {
                    a: group.xi_pow(i - 1),
                    b: group.xi_pow(-1),
                    k: m,
                },
            ));
        }
    }
    let nested1 = bracket_op(first[1].clone(), first[first.len() - 2].clone());
    let nested2 = bracket_op(first[3].clone(), first[0].clone());

    let mut offdiag: Vec<DynOp> = Vec::new();
    let mut diagdiff: Vec<DynOp> = Vec::new();
    for nn in -1..=1i64 {
        for (k, l) in [(0usize, 1usize), (1, 0)] {
            offdiag.push(lift_op(
                &sp,
                &group,
                ModeOp::Xij {
                    i: k,
                    j: l,
                    a: id.clone(),
                    b: id.clone(),
                    k: n as i64 * nn,
                },
            ));
        }
        diagdiff.push(combo_op(vec![
            (
                lift_op(
                    &sp,
                    &group,
                    ModeOp::Xij {
                        i: 0,
                        j: 0,
                        a: id.clone(),
                        b: id.clone(),
                        k: n as i64 * nn,
                    },
                ),
                C64::new(1.0, 0.0),
            ),
            (
                lift_op(
                    &sp,
                    &group,
                    ModeOp::Xij {
                        i: 1,
                        j: 1,
                        a: id.clone(),
                        b: id.clone(),
                        k: n as i64 * nn,
                    },
                ),
                C64::new(-1.0, 0.0),
            ),
        ]));
    }

    let mut d_off = 0.0_f64;
    for g1 in &first {
        for g2 in &offdiag {
            let br = bracket_op(g1.clone(), g2.clone());
            for v in &states {
                d_off = d_off.max(br(v).max_abs());
            }
        }
    }
    sink.check(
        "off-diagonal-commutant",
        d_off,
        p.stol(1e-9),
        false,
        "trace-sum modes commute with off-diagonal modes at rescaled labels",
    );

    let mut d_diag = 0.0_f64;
    for g1 in &first {
        for g2 in &diagdiff {
            let br = bracket_op(g1.clone(), g2.clone());
            for v in &states {
                d_diag = d_diag.max(br(v).max_abs());
            }
        }
    }
    sink.check(
        "diagonal-difference-commutant",
        d_diag,
        p.stol(1e-9),
        false,
        "diagonal-mode differences cancel their central defects and commute too",
    );

    let mut d_nested = 0.0_f64;
    for g1 in [&nested1, &nested2] {
        for g2 in offdiag.iter().chain(diagdiff.iter()) {
            let br = bracket_op(g1.clone(), g2.clone());
            d_nested = d_nested.max(br(&states[0]).max_abs());
        }
    }
    sink.check(
        "nested-commutant",
        d_nested,
        p.stol(1e-9),
        false,
        "brackets formed inside the first family still commute with the second",
    );

    // nondegeneracy witness on a fixed configuration
    let wgroup = AdmissibleGroup::cyclotomic(2, vec![p.q]).expect("order two");
    let wsp = Space::plain(2, p.intermediate_cutoff.max(12), p.charge_window);
    let wid = wgroup.identity();
    let qe = wgroup.free_pow(0, 1);
    let a1 = lift_op(
        &wsp,
        &wgroup,
        ModeOp::Y {
            a: wid.clone(),
            b: wgroup.mul(&wgroup.xi_pow(-1), &qe),
            k: -2,
        },
    );
    let a2 = lift_op(
        &wsp,
        &wgroup,
        ModeOp::Y {
            a: wid.clone(),
            b: wgroup.xi_pow(-1),
            k: 1,
        },
    );
    let b1 = lift_op(
        &wsp,
        &wgroup,
        ModeOp::Xij {
            i: 0,
            j: 1,
            a: wid.clone(),
            b: wid.clone(),
            k: 2,
        },
    );
    let b2 = lift_op(
        &wsp,
        &wgroup,
        ModeOp::Xij {
            i: 1,
            j: 1,
            a: wid.clone(),
            b: wid.clone(),
            k: 0,
        },
    );
    let w = bracket_op(bracket_op(a1, a2), bracket_op(b1, b2));
    let v = FockVector::unit(State::new(vec![(1, 2, 1)], vec![0, 0]));
    let got = w(&v);
    sink.check_at_least(
        "witness-nondegeneracy",
        got.max_abs(),
        0.1,
        "a nested cross-family bracket acts with clearly nonzero magnitude",
    );
    let q = p.q;
    let scale = (q + C64::new(1.0, 0.0)) * (q * q - C64::new(1.0, 0.0));
    let want = ModeOp::Xij {
        i: 0,
        j: 1,
        a: wid.clone(),
        b: qe.clone(),
        k: 1,
    }
    .apply(&wsp, &wgroup, &v)
    .scale(scale);
    sink.check(
        "witness-closed-form",
        got.max_abs_diff(&want),
        p.stol(1e-8),
        false,
        "the witness bracket equals a single rescaled off-diagonal mode",
    );
    sink.finish()
}

fn suite_sectors(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("sectors");
    let mut rng = suite_rng("sectors", p.seed);
    let rank = p.m.max(2);
    let lat = Lattice::new(rank);
    let w = p.charge_window;

    // validity of sector shifts
    let half: Vec<C64> = vec![C64::new(0.5, 0.0); rank];
    let mut bad = vec![C64::new(0.0, 0.0); rank];
    bad[0] = C64::new(1.0 / 3.0, 0.0);
    let mut dev = 0.0_f64;
    if !lat.in_sector_lattice(&half) {
        dev += 1.0;
    }
    if lat.in_sector_lattice(&bad) {
        dev += 1.0;
    }
    for _ in 0..20 {
        let v: Vec<C64> = (0..rank)
            .map(|_| C64::new(rng.gen_range(-3..=3) as f64, 0.0))
            .collect();
        if !lat.in_sector_lattice(&v) {
            dev += 1.0;
        }
    }
    sink.check(
        "sector-shift-validity",
        dev,
        0.0,
        true,
        "a shift is admissible exactly when consecutive coordinate differences are integral",
    );

    // coset preservation under two-index modes, total-charge step under single modes
    let group = AdmissibleGroup::cyclotomic(p.order(), vec![p.q]).expect("valid torsion order");
    for sector in [None, Some(half.clone())] {
        let sp = Space::new(rank, sector.clone(), p.intermediate_cutoff, w).expect("valid sector");
        let mut violations = 0.0_f64;
        for _ in 0..40 {
            let i = rng.gen_range(0..rank);
            let mut j = rng.gen_range(0..rank);
            while j == i {
                j = rng.gen_range(0..rank);
            }
            let k = rng.gen_range(-2..=2);
            let mut charge = vec![0i64; rank];
            charge[rng.gen_range(0..rank)] = rng.gen_range(-1..=1);
            let v = FockVector::unit(State::charged(charge.clone()));
            let total: i64 = charge.iter().sum();
            let op = ModeOp::Xij {
                i,
                j,
                a: group.identity(),
                b: group.free_pow(0, rng.gen_range(-1..=1)),
                k,
            };
            let out = op.apply(&sp, &group, &v);
            for (st, _) in out.terms() {
                if st.charge().iter().sum::<i64>() != total {
                    violations += 1.0;
                }
            }
            let alpha: Vec<i64> = (0..rank).map(|t| i64::from(t == i)).collect();
            let shifted = x_alpha_apply(&sp, &alpha, Half(2 * k + 1), &v);
            for (st, _) in shifted.terms() {
                if st.charge().iter().sum::<i64>() != total + 1 {
                    violations += 1.0;
                }
            }
        }
        let tag = if sector.is_some() { "shifted" } else { "plain" };
        sink.check(
            &format!("coset-preservation {tag}"),
            violations,
            0.0,
            true,
            "two-index modes fix the total charge; a single mode steps it by one",
        );
    }

    // reachability of the whole windowed coset by root steps
    for k in [0i64, 1] {
        let mut targets: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut stack: Vec<Vec<i64>> = vec![Vec::new()];
        while let Some(v) = stack.pop() {
            if v.len() == rank {
                if v.iter().sum::<i64>() == k {
                    targets.insert(v);
                }
                continue;
            }
            for c in -w..=w {
                let mut x = v.clone();
                x.push(c);
                stack.push(x);
            }
        }
        let mut start = vec![0i64; rank];
        start[rank - 1] = k;
        let mut reached: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            if !reached.insert(v.clone()) {
                continue;
            }
            for i in 0..rank {
                for j in 0..rank {
                    if i == j {
                        continue;
                    }
                    let mut x = v.clone();
                    x[i] += 1;
                    x[j] -= 1;
                    if x.iter().all(|c| c.abs() <= w) {
                        queue.push(x);
                    }
                }
            }
        }
        let missing = targets.difference(&reached).count() as f64;
        let extra = reached.difference(&targets).count() as f64;
        sink.check(
            &format!("window-reachability total-charge={k}"),
            missing + extra,
            0.0,
            true,
            "root steps reach every charge vector of the coset inside the window",
        );
    }

    // cyclic action with its exact sign
    let sp = p.space(rank);
    let group1 = AdmissibleGroup::cyclotomic(1, vec![]).expect("trivial torsion");
    let mut worst = 0.0_f64;
    for _ in 0..12 {
        let gamma: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank);
        while j == i {
            j = rng.gen_range(0..rank);
        }
        let nij = gamma[j] - gamma[i];
        let op = ModeOp::Xij {
            i,
            j,
            a: group1.identity(),
            b: group1.identity(),
            k: nij - 1,
        };
        let got = op.apply(&sp, &group1, &FockVector::unit(State::charged(gamma.clone())));
        let root = lat.root(i, j);
        let sign = if i < j { 1.0 } else { -1.0 };
        let coeff = sign * lat.cocycle(&root, &gamma) as f64;
        let mut target = gamma.clone();
        target[i] += 1;
        target[j] -= 1;
        let want = FockVector::unit(State::charged(target)).scale(C64::new(coeff, 0.0));
        worst = worst.max(got.max_abs_diff(&want));
    }
    sink.check(
        "cyclic-step-with-sign",
        worst,
        p.stol(1e-9),
        true,
        "the distinguished mode moves a pure charge one root step with the lattice sign",
    );
    sink.finish()
}

fn suite_truncation(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("truncation");
    let lo = p.clone();
    let mut hi = p.clone();
    hi.cutoff = p.cutoff + 2;
    hi.intermediate_cutoff = p.intermediate_cutoff + 2;

    let run_clifford = |pp: &SuiteParams| -> Vec<f64> {
        let sp = pp.space(2);
        let states = [
            State::vacuum(2),
            State::new(vec![(0, 1, 1)], vec![0, 0]),
            State::charged(vec![1, -1]),
        ];
        let mut devs = Vec::new();
        for i in 0..2usize {
            for j in 0..2usize {
                let ei: Vec<i64> = (0..2).map(|t| i64::from(t == i)).collect();
                let mej: Vec<i64> = (0..2).map(|t| -i64::from(t == j)).collect();
                for st in &states {
                    let v = FockVector::unit(st.clone());
                    let mut worst = 0.0_f64;
                    for tk in [-3i64, -1, 1, 3] {
                        for tl in [-3i64, -1, 1, 3] {
                            let got = x_anticommutator(&sp, &ei, Half(tk), &mej, Half(tl), &v);
                            let want = if i == j && tk + tl == 0 {
                                v.clone()
                            } else {
                                FockVector::zero()
                            };
                            worst = worst.max(got.max_abs_diff(&want));
                        }
                    }
                    devs.push(worst);
                }
            }
        }
        devs
    };
    let run_brackets = |pp: &SuiteParams| -> Vec<f64> {
        let sp = pp.space(2);
        let group = AdmissibleGroup::cyclotomic(2, vec![pp.q]).expect("order two");
        let id = group.identity();
        let qe = group.free_pow(0, 1);
        let xie = group.xi_pow(1);
        let configs: [(usize, usize, usize, usize, i64, i64); 4] = [
            (0, 1, 1, 0, 1, -1),
            (0, 1, 1, 1, 2, -1),
            (0, 0, 0, 0, 1, -1),
            (0, 1, 1, 0, 2, -2),
        ];
        let states = [State::vacuum(2), State::new(vec![(0, 1, 1)], vec![0, 0])];
        let mut devs = Vec::new();
        for (i1, j1, i2, j2, m, n) in configs {
            let x = ModeOp::Xij {
                i: i1,
                j: j1,
                a: id.clone(),
                b: qe.clone(),
                k: m,
            };
            let y = ModeOp::Xij {
                i: i2,
                j: j2,
                a: xie.clone(),
                b: qe.clone(),
                k: n,
            };
            let exp = expected_mode_bracket(&group, &x, &y).expect("two-index modes");
            for st in &states {
                let v = FockVector::unit(st.clone());
                let direct = commutator_apply(&sp, &group, &x, &y, &v);
                devs.push(direct.max_abs_diff(&exp.apply(&sp, &group, &v)));
            }
        }
        devs
    };

    let tol = p.stol(1e-9);
    for (label, lo_devs, hi_devs) in [
        ("clifford", run_clifford(&lo), run_clifford(&hi)),
        ("mode-brackets", run_brackets(&lo), run_brackets(&hi)),
    ] {
        let mut flips = 0.0_f64;
        let mut ratio = 0.0_f64;
        for (dl, dh) in lo_devs.iter().zip(&hi_devs) {
            if (dl <= &tol) != (dh <= &tol) {
                flips += 1.0;
            }
            ratio = ratio.max(dh / dl.max(1e-13));
        }
        sink.check(
            &format!("{label} pass-stability"),
            flips,
            0.0,
            true,
            "raising both cutoffs flips no individual verdicts",
        );
        sink.check(
            &format!("{label} deviation-growth"),
            ratio,
            10.0,
            false,
            "deviations grow at most tenfold when cutoffs rise (floor at 1e-13)",
        );
    }
    sink.finish()
}

// ---------------------------------------------------------------------------
// Registry and the report runner
// ---------------------------------------------------------------------------

/// All suite identifiers, in canonical order.
pub const SUITE_NAMES: [&str; 21] = [
    "clock-shift",
    "sigma-q",
    "iso-lemma14",
    "iso-prop15",
    "heisenberg",
    "cocycle",
    "clifford",
    "thm237",
    "delta",
    "limit248",
    "cor42",
    "cor44",
    "cor47",
    "cor410",
    "cor412",
    "prop419",
    "prop420",
    "prop421",
    "dualpair",
    "sectors",
    "truncation",
];

/// One-line description of a suite, for listings.
pub fn suite_brief(name: &str) -> &'static str {
    match name {
        "clock-shift" => "finite clock and shift matrix identities",
        "sigma-q" => "reordering bicharacter from an admissible coefficient matrix",
        "iso-lemma14" => "graded-basis bracket against the fused matrix bracket",
        "iso-prop15" => "fusing map from the factored picture preserves brackets",
        "heisenberg" => "oscillator commutation relations on the charged space",
        "cocycle" => "sign cocycle identities on the integer lattice",
        "clifford" => "single-vector modes pair into a Clifford-type algebra",
        "thm237" => "closed-form commutators of parametrized two-index modes",
        "delta" => "windowed formal series identities with closed rational forms",
        "limit248" => "degenerate-parameter limits approached along small offsets",
        "cor42" => "matrix algebra represented through plain two-index modes",
        "cor44" => "clock/shift algebra represented through diagonal modes",
        "cor47" => "two-variable matrix algebra represented with one free parameter",
        "cor410" => "mixed clock/shift torus represented on a rank-one space",
        "cor412" => "full mixed algebra represented through two-index modes",
        "prop419" => "trace-sum representation of clock/shift words",
        "prop420" => "index-rescaled representation and its mixed brackets",
        "prop421" => "mixed commutators between trace-sum and two-index modes",
        "dualpair" => "two commuting families and a nondegeneracy witness",
        "sectors" => "charge sectors: validity, preservation, reachability",
        "truncation" => "verdicts stable under raising both working cutoffs",
        _ => "unknown suite",
    }
}

fn dispatch(name: &str, p: &SuiteParams) -> Option<Vec<CaseResult>> {
    Some(match name {
        "clock-shift" => suite_clock_shift(p),
        "sigma-q" => suite_sigma_q(p),
        "iso-lemma14" => suite_iso_lemma14(p),
        "iso-prop15" => suite_iso_prop15(p),
        "heisenberg" => suite_heisenberg(p),
        "cocycle" => suite_cocycle(p),
        "clifford" => suite_clifford(p),
        "thm237" => suite_thm237(p),
        "delta" => suite_delta(p),
        "limit248" => suite_limit248(p),
        "cor42" => suite_cor42(p),
        "cor44" => suite_cor44(p),
        "cor47" => suite_cor47(p),
        "cor410" => suite_cor410(p),
        "cor412" => suite_cor412(p),
        "prop419" => suite_prop419(p),
        "prop420" => suite_prop420(p),
        "prop421" => suite_prop421(p),
        "dualpair" => suite_dualpair(p),
        "sectors" => suite_sectors(p),
        "truncation" => suite_truncation(p),
        _ => return None,
    })
}

/// Quick self-check of the closed-form bracket expectation against direct
/// computation and the pair-expansion route; runs before every report.
fn oracle_preflight(p: &SuiteParams) -> Vec<CaseResult> {
    let mut sink = Sink::new("oracle-preflight");
    let group = AdmissibleGroup::cyclotomic(2, vec![p.q]).expect("order two");
    let sp = p.space(2);
    let id = group.identity();
    let qe = group.free_pow(0, 1);
    let v = FockVector::unit(State::new(vec![(0, 1, 1)], vec![0, 0]));
    let x = ModeOp::Xij {
        i: 0,
        j: 1,
        a: id.clone(),
        b: qe.clone(),
        k: 1,
    };
    let y = ModeOp::Xij {
        i: 1,
        j: 0,
        a: id.clone(),
        b: id.clone(),
        k: -1,
    };
    let exp = expected_mode_bracket(&group, &x, &y).expect("two-index modes");
    let direct = commutator_apply(&sp, &group, &x, &y, &v);
    sink.check(
        "closed-form-vs-direct",
        direct.max_abs_diff(&exp.apply(&sp, &group, &v)),
        p.stol(1e-9),
        false,
        "the bracket expectation matches a directly computed commutator",
    );
    let expanded = xij_mode_pair_expansion(&sp, &group, 0, 1, &id, &qe, 1, &v);
    let closed = xij_mode_apply(&sp, &group, 0, 1, &id, &qe, 1, &v);
    sink.check(
        "pair-expansion-vs-closed",
        expanded.max_abs_diff(&closed),
        p.stol(1e-9),
        false,
        "the pair-expansion oracle matches the closed-form mode",
    );
    sink.finish()
}

/// Resolve the requested suite names ("all" or empty means every suite).
pub fn resolve_suites(selected: &[String]) -> Result<Vec<&'static str>, CoreError> {
    if selected.is_empty() || selected.iter().any(|s| s == "all") {
        return Ok(SUITE_NAMES.to_vec());
    }
    let mut out = Vec::new();
    for want in selected {
        match SUITE_NAMES.iter().find(|n| *n == want) {
            Some(n) => {
                if !out.contains(n) {
                    out.push(*n);
                }
            }
            None => {
                return Err(CoreError::InvalidParameter(format!(
                    "unknown suite '{want}'"
                )))
            }
        }
    }
    Ok(out)
}

/// Run the selected suites in parallel and assemble the report.
pub fn run_report(selected: &[String], p: &SuiteParams) -> Result<Report, CoreError> {
    let names = resolve_suites(selected)?;
    let mut cases = oracle_preflight(p);
    let results: Vec<Vec<CaseResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| scope.spawn(move || dispatch(name, p).expect("registered suite")))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread completes"))
            .collect()
    });
    for r in results {
        cases.extend(r);
    }
    let mut suites = Vec::new();
    let mut grouped: Vec<&str> = vec!["oracle-preflight"];
    grouped.extend(names.iter().copied());
    for name in grouped {
        let in_suite: Vec<&CaseResult> = cases.iter().filter(|c| c.suite == name).collect();
        let failed = in_suite.iter().filter(|c| !c.pass).count();
        suites.push(SuiteOutcome {
            suite: name.to_string(),
            cases: in_suite.len(),
            failed,
            pass: failed == 0,
        });
    }
    let pass = suites.iter().all(|s| s.pass);
    let timestamp_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(Report {
        timestamp_s,
        config: ReportConfig {
            m: p.m,
            n: p.n,
            xi_order: p.order(),
            q: format_c(p.q),
            cutoff: p.cutoff,
            intermediate_cutoff: p.intermediate_cutoff,
            charge_window: p.charge_window,
            tol: p.tol,
            seed: p.seed,
            suites: names.iter().map(|s| s.to_string()).collect(),
        },
        cases,
        suites,
        pass,
    })
}
