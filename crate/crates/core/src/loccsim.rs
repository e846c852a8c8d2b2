//! Pure-state circuit harness: random circuits with a fixed number of
//! two-qubit gates applied to product inputs, and the largest degree of
//! genuine multipartite entanglement they reach.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bipartite::EntanglementOfFormation;
use crate::error::{argument, contract, Result};
use crate::multipartite::{entanglement_vector_with, factorize_pure, EntanglementVector, TermCache};
use crate::qcore::{apply_gate, ComplexMatrix, StateObject, ONE, ZERO};
use crate::random::{haar_unitary, random_product};

/// Largest register accepted by [`verify_result2`].
pub const MAX_CIRCUIT_QUBITS: usize = 5;

/// Default tolerance when every consumed term is exact.
pub const EXACT_TOL: f64 = 1e-6;

/// Default tolerance when a convex-roof bound takes part.
pub const BOUND_TOL: f64 = 1e-3;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GateKind {
    Single { target: usize },
    /// `first` is the more significant factor of the 4x4 matrix.
    Two { first: usize, second: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    matrix: ComplexMatrix,
}

impl GateOp {
    pub fn single(target: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::checked(GateKind::Single { target }, matrix, 2)
    }

    pub fn two(first: usize, second: usize, matrix: ComplexMatrix) -> Result<Self> {
        if first == second {
            return argument("two-qubit gate needs distinct targets");
        }
        Self::checked(GateKind::Two { first, second }, matrix, 4)
    }

    fn checked(kind: GateKind, matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        if matrix.rows() != dim || matrix.cols() != dim {
            return argument(format!("gate matrix must be {dim}x{dim}"));
        }
        if !matrix.is_unitary(UNITARY_TOL) {
            return contract("gate matrix is not unitary");
        }
        Ok(Self { kind, matrix })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> Vec<usize> {
        match self.kind {
            GateKind::Single { target } => vec![target],
            GateKind::Two { first, second } => vec![first, second],
        }
    }

    pub fn is_entangling(&self) -> bool {
        matches!(self.kind, GateKind::Two { .. })
    }
}

impl Serialize for GateOp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record<'a> {
            #[serde(flatten)]
            kind: &'a GateKind,
            /// Row-major `[re, im]` pairs.
            matrix: Vec<[f64; 2]>,
        }
        let matrix = self.matrix.as_slice().iter().map(|z| [z.re, z.im]).collect();
        Record { kind: &self.kind, matrix }.serialize(serializer)
    }
}

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).expect("constant matrix")
}

/// Controlled NOT with the control as the first target.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
    )
    .expect("constant matrix")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<GateOp>,
    entangling_count: usize,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<GateOp>) -> Result<Self> {
        let mut c = Self { n, gates: Vec::new(), entangling_count: 0 };
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        if let Some(q) = gate.targets().into_iter().find(|&q| q >= self.n) {
            return argument(format!("gate target {q} outside a {}-qubit register", self.n));
        }
        self.entangling_count += usize::from(gate.is_entangling());
        self.gates.push(gate);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn entangling_count(&self) -> usize {
        self.entangling_count
    }
}

fn run_gates(psi: &StateObject, gates: &[GateOp]) -> Result<StateObject> {
    let mut state = psi.clone();
    for g in gates {
        state = apply_gate(&state, g.matrix(), &g.targets())?;
    }
    let amps = state.amplitudes().expect("gates keep pure states pure");
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(StateObject::from_pure_unchecked(amps.iter().map(|z| z / norm).collect()))
}

fn check_product_input(psi: &StateObject, c: &Circuit) -> Result<()> {
    if !psi.is_pure_vector() {
        return argument("circuit input must be a pure state");
    }
    if psi.n_qubits() != c.n() {
        return argument(format!("circuit acts on {} qubits, state has {}", c.n(), psi.n_qubits()));
    }
    if factorize_pure(psi)?.producibility > 1 {
        return argument("circuit input must be a product of single-qubit states");
    }
    Ok(())
}

/// Runs a circuit on a product state.
pub fn apply_circuit(psi: &StateObject, c: &Circuit) -> Result<StateObject> {
    check_product_input(psi, c)?;
    run_gates(psi, c.gates())
}

fn degree_of(vector: &EntanglementVector, tol: f64, certified: bool) -> usize {
    vector
        .per_degree
        .iter()
        .filter(|(k, &v)| {
            let v = if certified { vector.per_degree_bounds[k].0 } else { v };
            v > tol
        })
        .map(|(&k, _)| k)
        .max()
        .unwrap_or(1)
}

fn pure_vector(psi: &StateObject) -> Result<EntanglementVector> {
    if !psi.is_pure_vector() {
        return contract("degree analysis needs a pure state");
    }
    entanglement_vector_with(psi, &EntanglementOfFormation::default(), &TermCache::new(), None)
}

/// Largest `k` with `E^k > tol`, or 1 when there is none.
pub fn max_degree(psi: &StateObject, tol: f64) -> Result<usize> {
    Ok(degree_of(&pure_vector(psi)?, tol, false))
}

/// One measured circuit prefix that exceeded its permitted degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    /// Number of gates of the trial circuit applied so far.
    pub gates_applied: usize,
    pub entangling_count: usize,
    pub degree: usize,
    /// `E^degree` as a certified interval.
    pub interval: (f64, f64),
    pub methods: BTreeMap<String, usize>,
    pub tol: f64,
    pub circuit: Circuit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub degree: usize,
    pub certified_degree: usize,
    pub exact: bool,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Result2Report {
    pub n: usize,
    pub gates: usize,
    pub trials: usize,
    pub seed: u64,
    /// `None` selects the per-trial default.
    pub tol: Option<f64>,
    pub passed: bool,
    pub max_degree_observed: usize,
    /// Number of trials per final degree.
    pub degree_histogram: BTreeMap<usize, usize>,
    pub exact_trials: usize,
    pub bound_trials: usize,
    pub prefixes_checked: usize,
    pub violations: Vec<Violation>,
}

fn random_circuit(n: usize, g: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit { n, gates: Vec::with_capacity(g), entangling_count: 0 };
    for _ in 0..g {
        let first = rng.random_range(0..n);
        let mut second = rng.random_range(0..n - 1);
        if second >= first {
            second += 1;
        }
        let gate = GateOp { kind: GateKind::Two { first, second }, matrix: haar_unitary(4, rng) };
        c.push(gate).expect("targets drawn inside the register");
    }
    c
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct TrialRun {
    outcome: TrialOutcome,
    prefixes: usize,
    violations: Vec<Violation>,
}

fn run_trial(n: usize, g: usize, seed: u64, trial: usize, tol: Option<f64>) -> Result<TrialRun> {
    let mut rng = trial_rng(seed, trial);
    let input = random_product(n, &mut rng);
    let circuit = random_circuit(n, g, &mut rng);
    let mut violations = Vec::new();
    let mut state = input.clone();
    let mut last = None;
    // prefix 0 is the bare input; each later prefix adds one gate
    for applied in 0..=circuit.gates().len() {
        if applied > 0 {
            state = run_gates(&state, &circuit.gates()[applied - 1..applied])?;
        }
        let vector = pure_vector(&state)?;
        let exact = vector.method_summary.all_exact;
        let t = tol.unwrap_or(if exact { EXACT_TOL } else { BOUND_TOL });
        let allowed = applied + 1;
        let certified = degree_of(&vector, t, true);
        if certified > allowed {
            violations.push(Violation {
                trial,
                gates_applied: applied,
                entangling_count: applied,
                degree: certified,
                interval: vector.per_degree_bounds[&certified],
                methods: vector.method_summary.methods.clone(),
                tol: t,
                circuit: Circuit::new(n, circuit.gates()[..applied].to_vec())?,
            });
        }
        last = Some((vector, t, exact));
    }
    let (vector, t, exact) = last.expect("at least the input prefix");
    let outcome = TrialOutcome {
        trial,
        degree: degree_of(&vector, t, false),
        certified_degree: degree_of(&vector, t, true),
        exact,
        tol: t,
    };
    Ok(TrialRun { outcome, prefixes: circuit.gates().len() + 1, violations })
}

/// Checks that `g` Haar-random two-qubit gates on a random product input
/// never create more than `(g + 1)`-partite entanglement, over `trials`
/// seeded circuits. Every prefix of each circuit is checked against its own
/// gate count. A violation needs the certified lower bound of `E^k` to exceed
/// the tolerance, so bound-based terms can only make the check weaker.
pub fn verify_result2(n: usize, g: usize, trials: usize, seed: u64, tol: Option<f64>) -> Result<Result2Report> {
    if !(2..=MAX_CIRCUIT_QUBITS).contains(&n) {
        return argument(format!("circuit checks need 2 <= n <= {MAX_CIRCUIT_QUBITS}, got {n}"));
    }
    if g > n - 1 {
        return argument(format!("at most n - 1 = {} entangling gates, got {g}", n - 1));
    }
    if tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return argument("tolerance must be finite and nonnegative");
    }
    let runs: Vec<TrialRun> =
        (0..trials).into_par_iter().map(|trial| run_trial(n, g, seed, trial, tol)).collect::<Result<_>>()?;
    let mut report = Result2Report {
        n,
        gates: g,
        trials,
        seed,
        tol,
        passed: true,
        max_degree_observed: 1,
        degree_histogram: BTreeMap::new(),
        exact_trials: 0,
        bound_trials: 0,
        prefixes_checked: 0,
        violations: Vec::new(),
    };
    for run in runs {
        let o = &run.outcome;
        report.max_degree_observed = report.max_degree_observed.max(o.degree);
        *report.degree_histogram.entry(o.degree).or_default() += 1;
        if o.exact {
            report.exact_trials += 1;
        } else {
            report.bound_trials += 1;
        }
        report.prefixes_checked += run.prefixes;
        report.violations.extend(run.violations);
    }
    report.passed = report.violations.is_empty();
    Ok(report)
}

/// `|+>|0>...|0>` followed by a CNOT chain `0 -> 1 -> ... -> n-1`.
pub fn ghz_witness(n: usize) -> Result<(StateObject, Circuit)> {
    if n < 2 {
        return argument("the witness circuit needs at least two qubits");
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE * s;
    amps[1 << (n - 1)] = ONE * s;
    let input = StateObject::pure(amps)?;
    let gates = (0..n - 1).map(|q| GateOp::two(q, q + 1, cnot())).collect::<Result<Vec<_>>>()?;
    Ok((input, Circuit::new(n, gates)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    pub entangling_count: usize,
    pub degree: usize,
    pub per_degree: BTreeMap<usize, f64>,
    pub circuit: Circuit,
}

/// Degree reached by [`ghz_witness`].
pub fn run_witness(n: usize, tol: f64) -> Result<WitnessReport> {
    let (input, circuit) = ghz_witness(n)?;
    let out = apply_circuit(&input, &circuit)?;
    let vector = pure_vector(&out)?;
    Ok(WitnessReport {
        n,
        entangling_count: circuit.entangling_count(),
        degree: degree_of(&vector, tol, false),
        per_degree: vector.per_degree,
        circuit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, zero};
    use approx::assert_abs_diff_eq;

    fn plus_zero(n: usize) -> StateObject {
        ghz_witness(n).unwrap().0
    }

    #[test]
    fn empty_circuit_is_identity() {
        let psi = plus_zero(3);
        let out = apply_circuit(&psi, &Circuit::new(3, vec![]).unwrap()).unwrap();
        assert_eq!(out.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn one_cnot_makes_a_bell_pair() {
        let c = Circuit::new(2, vec![GateOp::two(0, 1, cnot()).unwrap()]).unwrap();
        let out = apply_circuit(&plus_zero(2), &c).unwrap();
        let expected = ghz(2).unwrap();
        for (a, b) in out.amplitudes().unwrap().iter().zip(expected.amplitudes().unwrap()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_cnots_make_ghz3() {
        let (input, c) = ghz_witness(3).unwrap();
        assert_eq!(c.entangling_count(), 2);
        let out = apply_circuit(&input, &c).unwrap();
        let expected = ghz(3).unwrap();
        for (a, b) in out.amplitudes().unwrap().iter().zip(expected.amplitudes().unwrap()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn entangled_input_is_rejected() {
        let c = Circuit::new(3, vec![]).unwrap();
        assert!(apply_circuit(&ghz(3).unwrap(), &c).is_err());
        assert!(apply_circuit(&zero(2).unwrap(), &c).is_err());
    }

    #[test]
    fn gate_validation() {
        assert!(GateOp::two(1, 1, cnot()).is_err());
        assert!(GateOp::single(0, cnot()).is_err());
        assert!(GateOp::single(0, ComplexMatrix::diagonal(&[1.0, 2.0])).is_err());
        assert!(Circuit::new(2, vec![GateOp::two(0, 2, cnot()).unwrap()]).is_err());
        let c = Circuit::new(3, vec![GateOp::single(0, hadamard()).unwrap(), GateOp::two(0, 2, cnot()).unwrap()]);
        assert_eq!(c.unwrap().entangling_count(), 1);
    }

    #[test]
    fn max_degree_examples() {
        assert_eq!(max_degree(&zero(3).unwrap(), EXACT_TOL).unwrap(), 1);
        assert_eq!(max_degree(&ghz(3).unwrap(), EXACT_TOL).unwrap(), 3);
        let padded = crate::states::build(&crate::StateSpec::parse("ghz(2)*zero(2)").unwrap()).unwrap();
        assert_eq!(max_degree(&padded, EXACT_TOL).unwrap(), 2);
    }

    #[test]
    fn witness_reaches_degree_three_with_two_gates() {
        let w = run_witness(3, EXACT_TOL).unwrap();
        assert_eq!((w.degree, w.entangling_count), (3, 2));
    }

    #[test]
    fn local_circuits_stay_separable() {
        let r = verify_result2(3, 0, 10, 7, None).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_degree_observed, 1);
        assert_eq!(r.degree_histogram, BTreeMap::from([(1, 10)]));
    }

    #[test]
    fn report_is_seed_deterministic() {
        let a = verify_result2(3, 2, 8, 11, None).unwrap();
        let b = verify_result2(3, 2, 8, 11, None).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
    }

    #[test]
    fn preconditions() {
        assert!(verify_result2(6, 1, 1, 0, None).is_err());
        assert!(verify_result2(3, 3, 1, 0, None).is_err());
        assert!(verify_result2(3, 1, 1, 0, Some(f64::NAN)).is_err());
    }

    // one gate on a mixture of product inputs: the output mixes entangled
    // pairs on (0, 1) with a product third qubit, so no degree-3 part may
    // appear and the mixture cannot exceed the average of its branches
    #[test]
    fn one_gate_mixtures_stay_bipartite() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..4 {
            let weights = [0.5, 0.3, 0.2];
            let mut rho = ComplexMatrix::zeros(8, 8);
            let mut averaged = 0.0;
            for p in weights {
                let gate = GateOp::two(0, 1, haar_unitary(4, &mut rng)).unwrap();
                let branch = run_gates(&random_product(3, &mut rng), &[gate]).unwrap();
                averaged += p * pure_vector(&branch).unwrap().cumulative[&3];
                rho = rho.add(&branch.density_matrix().scale_real(p));
            }
            let mixed = StateObject::mixed(rho).unwrap();
            let v = entanglement_vector_with(&mixed, &EntanglementOfFormation::default(), &TermCache::new(), None).unwrap();
            assert!(v.per_degree_bounds[&3].0 <= BOUND_TOL);
            assert!(v.cumulative_bounds[&3].0 <= averaged + BOUND_TOL);
        }
    }
}
