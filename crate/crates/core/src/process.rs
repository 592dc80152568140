//! Process matrices on `A_I ⊗ A_O ⊗ B_I ⊗ B_O`: validity, ordered and
//! separable constructions, the α-family and the two boundary families.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{qubit, Matrix, Operator};
use crate::pauli::operator_from_terms;
use crate::random;
use crate::TOL;

pub const A_IN: usize = 0;
pub const A_OUT: usize = 1;
pub const B_IN: usize = 2;
pub const B_OUT: usize = 3;

pub const PROCESS_DIMS: [usize; 4] = [2, 2, 2, 2];

/// Largest α for which the α-family is positive.
pub const ALPHA_MAX: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug)]
pub struct ProcessMatrix(Operator);

impl ProcessMatrix {
    /// Wrap an operator after checking every validity condition.
    pub fn new(op: Operator) -> Result<Self> {
        let report = validate(&op)?;
        if !report.passed() {
            return Err(Error::InvalidProcess(report.failure_summary()));
        }
        Ok(Self(op))
    }

    pub fn maximally_mixed() -> Self {
        Self(Operator::identity(&PROCESS_DIMS).scale(0.25))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }
}

impl AsRef<Operator> for ProcessMatrix {
    fn as_ref(&self) -> &Operator {
        &self.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub deviation: f64,
    pub passed: bool,
}

/// Outcome of every validity condition; nothing short-circuits.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// positivity, trace, A-marginal, B-marginal, no-loop decomposition
    pub conditions: [ConditionCheck; 5],
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failure_summary(&self) -> String {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (deviation {:.3e})", c.name, c.deviation))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hermiticity deviation  {:.3e}", self.hermiticity_deviation)?;
        writeln!(f, "min eigenvalue         {:.9}", self.min_eigenvalue)?;
        writeln!(f, "trace                  {:.9}", self.trace)?;
        for c in &self.conditions {
            writeln!(
                f,
                "{:<22} {:>5}  deviation {:.3e}",
                c.name,
                if c.passed { "ok" } else { "FAIL" },
                c.deviation
            )?;
        }
        write!(
            f,
            "overall                {}",
            if self.passed() { "valid" } else { "INVALID" }
        )
    }
}

fn check(name: &'static str, deviation: f64) -> ConditionCheck {
    ConditionCheck {
        name,
        deviation,
        passed: deviation <= TOL,
    }
}

fn expect_dims(op: &Operator, dims: &[usize]) -> Result<()> {
    if op.dims() != dims {
        return Err(Error::WrongDims {
            expected: dims.to_vec(),
            got: op.dims().to_vec(),
        });
    }
    Ok(())
}

fn replace(op: &Operator, idx: &[usize]) -> Operator {
    op.identity_replace(idx).expect("indices checked by dims")
}

/// Smallest eigenvalue of the Hermitian part; a non-Hermitian input fails
/// positivity through its deviation instead.
fn min_eig_of_hermitian_part(op: &Operator) -> f64 {
    let herm = (op + &op.dagger()).scale(0.5);
    herm.min_eigenvalue().expect("Hermitian by construction")
}

/// Evaluate all five process-matrix conditions.
pub fn validate(w: &Operator) -> Result<ValidationReport> {
    expect_dims(w, &PROCESS_DIMS)?;
    let herm_dev = w.hermiticity_deviation();
    let min_eig = min_eig_of_hermitian_part(w);
    let trace = w.trace().re;

    let positivity_dev = herm_dev.max((-min_eig).max(0.0));
    let trace_dev = (w.trace() - num_complex::Complex64::new(4.0, 0.0)).norm();
    let a_marginal = replace(w, &[B_IN, B_OUT]).max_abs_diff(&replace(w, &[A_OUT, B_IN, B_OUT]));
    let b_marginal = replace(w, &[A_IN, A_OUT]).max_abs_diff(&replace(w, &[A_IN, A_OUT, B_OUT]));
    let recombined = &(&replace(w, &[B_OUT]) + &replace(w, &[A_OUT])) - &replace(w, &[A_OUT, B_OUT]);
    let no_loop = w.max_abs_diff(&recombined);

    Ok(ValidationReport {
        hermiticity_deviation: herm_dev,
        min_eigenvalue: min_eig,
        trace,
        conditions: [
            check("positivity", positivity_dev),
            check("trace", trace_dev),
            check("alice-marginal", a_marginal),
            check("bob-marginal", b_marginal),
            check("no-causal-loop", no_loop),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Order {
    /// Alice before Bob: reduced matrix on (A_I, A_O, B_I).
    AliceFirst,
    /// Bob before Alice: reduced matrix on (A_I, B_I, B_O).
    BobFirst,
}

/// Check the reduced-matrix conditions and pad with the identity on the
/// last party's output wire.
pub fn ordered_from_reduced(w_red: &Operator, order: Order) -> Result<ProcessMatrix> {
    expect_dims(w_red, &[2, 2, 2])?;
    // index of the later party's input inside the reduced matrix, and of
    // the earlier party's output
    let (later_in, earlier_out) = match order {
        Order::AliceFirst => (2, 1),
        Order::BobFirst => (0, 2),
    };
    let mut violations = Vec::new();
    let herm = w_red.hermiticity_deviation();
    if herm > TOL {
        violations.push(format!("not Hermitian (deviation {herm:.3e})"));
    }
    let min_eig = min_eig_of_hermitian_part(w_red);
    if min_eig < -TOL {
        violations.push(format!("not positive (min eigenvalue {min_eig:.3e})"));
    }
    let tr = w_red.trace().re;
    if (tr - 2.0).abs() > TOL {
        violations.push(format!("trace {tr:.9} != 2"));
    }
    let dev = replace(w_red, &[later_in]).max_abs_diff(&replace(w_red, &[earlier_out, later_in]));
    if dev > TOL {
        violations.push(format!("signals backwards (deviation {dev:.3e})"));
    }
    if !violations.is_empty() {
        return Err(Error::InvalidReduced(violations));
    }
    let full = match order {
        Order::AliceFirst => w_red.insert_identity(B_OUT, 2)?,
        Order::BobFirst => w_red.insert_identity(A_OUT, 2)?,
    };
    ProcessMatrix::new(full)
}

/// Whether `w` has the padded form of the given order.
pub fn is_ordered(w: &Operator, order: Order) -> bool {
    let wire = match order {
        Order::AliceFirst => B_OUT,
        Order::BobFirst => A_OUT,
    };
    w.identity_replace(&[wire])
        .map(|r| r.max_abs_diff(w) <= TOL)
        .unwrap_or(false)
}

/// `q·W^{A≺B} + (1−q)·W^{B≺A}`
pub fn mix_separable(q: f64, w_ab: &ProcessMatrix, w_ba: &ProcessMatrix) -> Result<ProcessMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            min: 0.0,
            max: 1.0,
        });
    }
    if !is_ordered(w_ab.operator(), Order::AliceFirst) {
        return Err(Error::NotOrdered("A before B"));
    }
    if !is_ordered(w_ba.operator(), Order::BobFirst) {
        return Err(Error::NotOrdered("B before A"));
    }
    ProcessMatrix::new(&w_ab.operator().scale(q) + &w_ba.operator().scale(1.0 - q))
}

/// The earlier party's output wired to the later party's input by an
/// identity channel; the earlier party's input is maximally mixed.
pub fn identity_wire(order: Order) -> ProcessMatrix {
    let half_id = qubit::id().scale(0.5);
    let red = match order {
        // (A_I, A_O, B_I)
        Order::AliceFirst => half_id.kron(&qubit::phi_plus()),
        // (A_I, B_O, B_I) reordered to (A_I, B_I, B_O)
        Order::BobFirst => qubit::phi_plus()
            .kron(&half_id)
            .permute(&[0, 2, 1])
            .expect("three factors"),
    };
    ordered_from_reduced(&red, order).expect("identity wiring is a valid ordered process")
}

/// `(1/4)(I + α(σ_z σ_z σ_z I + σ_z I σ_x σ_x))` for `0 ≤ α ≤ 1/√2`.
pub fn alpha_family(alpha: f64) -> Result<ProcessMatrix> {
    if !(0.0..=ALPHA_MAX + 1e-12).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            min: 0.0,
            max: ALPHA_MAX,
        });
    }
    ProcessMatrix::new(alpha_family_operator(alpha))
}

/// The α-family expression for any α, valid or not.
pub fn alpha_family_operator(alpha: f64) -> Operator {
    operator_from_terms(&[("IIII", 0.25), ("ZZZI", alpha / 4.0), ("ZIXX", alpha / 4.0)]).expect("static Pauli strings")
}

/// `(1/4)(I + c·ZZZI + c′·ZIXX)`: positive iff c² + c′² ≤ 1.
pub fn boundary_family_1(c: f64, c_prime: f64) -> Operator {
    operator_from_terms(&[("IIII", 0.25), ("ZZZI", c / 4.0), ("ZIXX", c_prime / 4.0)]).expect("static Pauli strings")
}

/// `(1/4)(I + c·ZZZI + c′·ZIZZ)`: positive iff |c| + |c′| ≤ 1.
pub fn boundary_family_2(c: f64, c_prime: f64) -> Operator {
    operator_from_terms(&[("IIII", 0.25), ("ZZZI", c / 4.0), ("ZIZZ", c_prime / 4.0)]).expect("static Pauli strings")
}

/// Δ(W): the part of W untouched by either output wire.
pub fn nonsignalling_part(w: &ProcessMatrix) -> Operator {
    replace(w.operator(), &[A_OUT, B_OUT])
}

/// Random reduced matrix for `order`, built as the link of a random state
/// on (first input ⊗ memory) with a random channel (first output ⊗ memory
/// → second input). Always satisfies the reduced conditions.
pub fn random_reduced<R: Rng + ?Sized>(rng: &mut R, order: Order) -> Operator {
    let rank = 1 + rng.random_range(0..4);
    let state = random::density_matrix(rng, &[2, 2], rank);
    let n_kraus = 1 + rng.random_range(1..4);
    let kraus = random::random_kraus(rng, 4, 2, n_kraus);
    // channel Choi with factors (out1, mem, in2)
    let choi = random::choi_matrix(&kraus);
    let st = state.matrix();
    // reduced[(i1, o1, i2), (i1', o1', i2')] = Σ_{e,e'} ρ[(i1,e),(i1',e')] C[(o1,e,i2),(o1',e',i2')]
    let mut red = Matrix::zeros(8, 8);
    for r in 0..8 {
        let (i1, o1, i2) = (r >> 2, (r >> 1) & 1, r & 1);
        for c in 0..8 {
            let (j1, p1, j2) = (c >> 2, (c >> 1) & 1, c & 1);
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for e in 0..2 {
                for f in 0..2 {
                    acc += st[(i1 * 2 + e, j1 * 2 + f)] * choi[((o1 * 2 + e) * 2 + i2, (p1 * 2 + f) * 2 + j2)];
                }
            }
            red[(r, c)] = acc;
        }
    }
    let red = Operator::new(red, vec![2, 2, 2]).expect("8x8");
    match order {
        // (A_I, A_O, B_I) as built
        Order::AliceFirst => red,
        // built as (B_I, B_O, A_I); reorder to (A_I, B_I, B_O)
        Order::BobFirst => red.permute(&[2, 0, 1]).expect("valid permutation"),
    }
}

pub fn random_ordered<R: Rng + ?Sized>(rng: &mut R, order: Order) -> ProcessMatrix {
    ordered_from_reduced(&random_reduced(rng, order), order).expect("random reduced matrices are valid")
}

/// Random causally separable process with a uniformly drawn mixing weight.
pub fn random_separable<R: Rng + ?Sized>(rng: &mut R) -> ProcessMatrix {
    let q = rng.random_range(0.0..=1.0);
    let ab = random_ordered(rng, Order::AliceFirst);
    let ba = random_ordered(rng, Order::BobFirst);
    mix_separable(q, &ab, &ba).expect("convex mixture of valid ordered processes")
}

/// Random valid process: a separable mixture blended with an α-family
/// member, so non-separable processes are reachable too.
pub fn random_valid<R: Rng + ?Sized>(rng: &mut R) -> ProcessMatrix {
    let sep = random_separable(rng);
    let lambda: f64 = rng.random_range(0.0..=1.0);
    let alpha = rng.random_range(0.0..=ALPHA_MAX);
    let w = &alpha_family_operator(alpha).scale(lambda) + &sep.operator().scale(1.0 - lambda);
    ProcessMatrix::new(w).expect("convex mixture of valid processes")
}
