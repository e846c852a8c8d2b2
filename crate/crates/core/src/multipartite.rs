//! Cluster sequences, total entanglement up to degree `k`, genuine
//! `k`-partite entanglement and the W-state closed forms.
//!
//! A sequence for `n` particles at degree `k` has `n - 1` steps. Step `j`
//! (0-based) picks a cluster of `min(k, n - j)` particles that contains none
//! of the earlier heads, and a head inside it; its term is the bipartite
//! entanglement `head : rest of cluster` of the cluster's reduced state. The
//! total up to degree `k` is the best sequence sum, and the genuine `k`-partite
//! part is the increase from degree `k - 1` to `k`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::bipartite::{combinations, g_unchecked, BipartiteMeasure, Bipartition, EofResult, Method};
use crate::error::{argument, contract, Result};
use crate::qcore::{eig_hermitian, reduce_ordered, StateObject};

/// Sequence sums closer than this are treated as tied; ties go to the
/// lexicographically smallest sequence.
pub const TIE_EPS: f64 = 1e-12;

/// One `(head : cluster \ head)` term of a sequence. `cluster` is sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SequenceStep {
    pub head: usize,
    pub cluster: Vec<usize>,
}

impl SequenceStep {
    pub fn new(head: usize, mut cluster: Vec<usize>) -> Result<Self> {
        cluster.sort_unstable();
        cluster.dedup();
        if cluster.len() < 2 {
            return argument("a sequence step needs a cluster of at least two particles");
        }
        if !cluster.contains(&head) {
            return argument(format!("head {head} is not in its cluster"));
        }
        Ok(Self { head, cluster })
    }

    pub fn cut(&self) -> Bipartition {
        Bipartition::head_vs_rest(self.head, &self.cluster).expect("validated step")
    }

    fn mask(&self) -> u64 {
        self.cluster.iter().fold(0u64, |m, &q| m | (1 << q))
    }
}

impl Ord for SequenceStep {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.head, &self.cluster).cmp(&(other.head, &other.cluster))
    }
}

impl PartialOrd for SequenceStep {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SequenceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:", self.head)?;
        let rest: Vec<String> =
            self.cluster.iter().filter(|&&q| q != self.head).map(|q| q.to_string()).collect();
        write!(f, "{})", rest.join(","))
    }
}

/// An ordered list of `n - 1` steps at degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sequence {
    pub steps: Vec<SequenceStep>,
    pub degree: usize,
}

impl Sequence {
    /// Checks the step-size, distinct-head and exclusion rules for `n` particles.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.steps.len() + 1 != n {
            return argument(format!("a sequence on {n} particles has {} steps", n - 1));
        }
        let mut heads = Vec::with_capacity(self.steps.len());
        for (j, step) in self.steps.iter().enumerate() {
            if step.cluster.len() != self.degree.min(n - j) {
                return argument(format!("step {j} has cluster size {}", step.cluster.len()));
            }
            if step.cluster.iter().any(|q| *q >= n || heads.contains(q)) {
                return argument(format!("step {j} reuses an earlier head or leaves the register"));
            }
            heads.push(step.head);
        }
        Ok(())
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

fn check_degree(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 2 || k > n {
        return argument(format!("degree k={k} needs 2 <= k <= n={n}"));
    }
    if n > 63 {
        return argument("at most 63 particles are supported by the sequence enumerator");
    }
    Ok(())
}

/// Admissible steps given the particles still available, in lexicographic
/// order. The final pair is collapsed to a single canonical head since the
/// choice cannot affect any later step.
fn step_choices(n: usize, k: usize, available: &[usize]) -> Vec<SequenceStep> {
    let size = k.min(available.len());
    if available.len() == 2 {
        return vec![SequenceStep { head: available[0], cluster: available.to_vec() }];
    }
    debug_assert!(size <= n);
    let mut out = Vec::new();
    for &head in available {
        let others: Vec<usize> = available.iter().copied().filter(|&q| q != head).collect();
        for combo in combinations(&others, size - 1) {
            let mut cluster = combo;
            cluster.push(head);
            cluster.sort_unstable();
            out.push(SequenceStep { head, cluster });
        }
    }
    out.sort();
    out
}

/// Lazy lexicographic enumeration of every admissible sequence.
pub struct SequenceIter {
    n: usize,
    k: usize,
    frames: Vec<(Vec<SequenceStep>, usize)>,
    started: bool,
}

impl SequenceIter {
    fn available(&self, depth: usize) -> Vec<usize> {
        let heads: Vec<usize> = self.frames[..depth].iter().map(|(c, i)| c[*i].head).collect();
        (0..self.n).filter(|q| !heads.contains(q)).collect()
    }

    fn descend(&mut self) {
        while self.frames.len() < self.n - 1 {
            let avail = self.available(self.frames.len());
            self.frames.push((step_choices(self.n, self.k, &avail), 0));
        }
    }

    fn current(&self) -> Sequence {
        Sequence { steps: self.frames.iter().map(|(c, i)| c[*i].clone()).collect(), degree: self.k }
    }
}

impl Iterator for SequenceIter {
    type Item = Sequence;

    fn next(&mut self) -> Option<Sequence> {
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.current());
        }
        while let Some((choices, idx)) = self.frames.last_mut() {
            *idx += 1;
            if *idx < choices.len() {
                self.descend();
                return Some(self.current());
            }
            self.frames.pop();
        }
        None
    }
}

/// Every admissible sequence for `n` particles at degree `k`, each exactly
/// once, in lexicographic order of `(head, sorted cluster)` steps.
pub fn enumerate_sequences(n: usize, k: usize) -> Result<SequenceIter> {
    check_degree(n, k)?;
    Ok(SequenceIter { n, k, frames: Vec::new(), started: false })
}

/// Number of admissible sequences, by the product of per-step choice counts.
pub fn count_sequences(n: usize, k: usize) -> Result<u128> {
    check_degree(n, k)?;
    let mut total: u128 = 1;
    for avail in (2..=n).rev() {
        let size = k.min(avail) as u128;
        let choices = if avail == 2 { 1 } else { binomial(avail as u128 - 1, size - 1) * avail as u128 };
        total *= choices;
    }
    Ok(total)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Shared memo of bipartite terms keyed by state fingerprint, head and cluster.
/// Concurrent inserts of the same key carry identical values.
#[derive(Default)]
pub struct TermCache {
    map: DashMap<(u64, usize, u64), EofResult>,
}

impl TermCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Evaluates sequence terms of one state through a [`TermCache`].
pub struct Evaluator<'a> {
    state: &'a StateObject,
    measure: &'a dyn BipartiteMeasure,
    cache: &'a TermCache,
    fingerprint: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(state: &'a StateObject, measure: &'a dyn BipartiteMeasure, cache: &'a TermCache) -> Result<Self> {
        if state.n_qubits() < 2 {
            return argument("multipartite measures need at least two particles");
        }
        Ok(Self { state, measure, cache, fingerprint: state.fingerprint() })
    }

    pub fn n(&self) -> usize {
        self.state.n_qubits()
    }

    pub fn term(&self, step: &SequenceStep) -> Result<EofResult> {
        // E(i:j) = E(j:i) for a pair
        let head = if step.cluster.len() == 2 { step.cluster[0] } else { step.head };
        let key = (self.fingerprint, head, step.mask());
        if let Some(hit) = self.cache.map.get(&key) {
            return Ok(*hit);
        }
        let cut = Bipartition::head_vs_rest(head, &step.cluster)?;
        let value = self.measure.evaluate(self.state, &cut)?;
        self.cache.map.insert(key, value);
        Ok(value)
    }

    /// Evaluates, in parallel, every term with cluster size in `2..=k_max`.
    pub fn prefetch(&self, k_max: usize) -> Result<()> {
        let n = self.n();
        let all: Vec<usize> = (0..n).collect();
        let mut steps = Vec::new();
        for size in 2..=k_max.min(n) {
            for cluster in combinations(&all, size) {
                let heads = if size == 2 { vec![cluster[0]] } else { cluster.clone() };
                for head in heads {
                    steps.push(SequenceStep { head, cluster: cluster.clone() });
                }
            }
        }
        steps.par_iter().try_for_each(|s| self.term(s).map(|_| ()))
    }
}

/// Sum of the step terms of `seq`, left to right.
pub fn sequence_value(evaluator: &Evaluator<'_>, seq: &Sequence) -> Result<f64> {
    Ok(sequence_terms(evaluator, seq)?.iter().map(|t| t.value).sum())
}

fn sequence_terms(evaluator: &Evaluator<'_>, seq: &Sequence) -> Result<Vec<EofResult>> {
    seq.validate(evaluator.n())?;
    seq.steps.iter().map(|s| evaluator.term(s)).collect()
}

/// Total entanglement up to a degree, with its certified interval and the
/// maximizing sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cumulative {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub sequence: Sequence,
    pub terms: Vec<EofResult>,
}

impl Cumulative {
    fn from_terms(sequence: Sequence, terms: Vec<EofResult>) -> Self {
        let value = terms.iter().map(|t| t.value).sum();
        let lower_bound = terms.iter().map(|t| t.lower_bound).sum();
        Self { value, lower_bound, upper_bound: value, sequence, terms }
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.method.is_exact())
    }
}

/// Best sequence by exhaustive enumeration.
pub fn maximize_exhaustive(evaluator: &Evaluator<'_>, k: usize) -> Result<Cumulative> {
    let mut best: Option<(f64, Sequence)> = None;
    for seq in enumerate_sequences(evaluator.n(), k)? {
        let v = sequence_value(evaluator, &seq)?;
        if best.as_ref().is_none_or(|(b, _)| v > b + TIE_EPS) {
            best = Some((v, seq));
        }
    }
    let (_, seq) = best.expect("at least one sequence");
    let terms = sequence_terms(evaluator, &seq)?;
    Ok(Cumulative::from_terms(seq, terms))
}

/// Best sequence by memoized search over the set of particles still
/// available. The best completion depends only on that set, so each set is
/// solved once; the result equals exhaustive enumeration, tie-break included.
pub fn maximize(evaluator: &Evaluator<'_>, k: usize) -> Result<Cumulative> {
    let n = evaluator.n();
    check_degree(n, k)?;
    let mut memo: HashMap<u64, (f64, Vec<SequenceStep>)> = HashMap::new();
    let full = (1u64 << n) - 1;
    let (_, steps) = best_completion(evaluator, k, full, &mut memo)?;
    let seq = Sequence { steps, degree: k };
    let terms = sequence_terms(evaluator, &seq)?;
    Ok(Cumulative::from_terms(seq, terms))
}

fn best_completion(
    evaluator: &Evaluator<'_>,
    k: usize,
    available: u64,
    memo: &mut HashMap<u64, (f64, Vec<SequenceStep>)>,
) -> Result<(f64, Vec<SequenceStep>)> {
    if available.count_ones() <= 1 {
        return Ok((0.0, Vec::new()));
    }
    if let Some(hit) = memo.get(&available) {
        return Ok(hit.clone());
    }
    let avail: Vec<usize> = (0..64).filter(|q| available >> q & 1 == 1).collect();
    let mut best: Option<(f64, Vec<SequenceStep>)> = None;
    for step in step_choices(evaluator.n(), k, &avail) {
        let term = evaluator.term(&step)?.value;
        let (rest, suffix) = best_completion(evaluator, k, available & !(1u64 << step.head), memo)?;
        let v = term + rest;
        if best.as_ref().is_none_or(|(b, _)| v > b + TIE_EPS) {
            let mut steps = Vec::with_capacity(suffix.len() + 1);
            steps.push(step);
            steps.extend(suffix);
            best = Some((v, steps));
        }
    }
    let best = best.expect("at least one admissible step");
    memo.insert(available, best.clone());
    Ok(best)
}

/// Total entanglement up to degree `k` with the default EoF measure.
pub fn e_up_to(state: &StateObject, k: usize) -> Result<Cumulative> {
    let measure = crate::bipartite::EntanglementOfFormation::default();
    let cache = TermCache::new();
    let ev = Evaluator::new(state, &measure, &cache)?;
    check_degree(ev.n(), k)?;
    ev.prefetch(k)?;
    maximize(&ev, k)
}

/// Genuine `k`-partite entanglement with its certified interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeValue {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Set when a bound-based difference fell outside its certified interval
    /// and was clamped.
    pub clamped: bool,
}

fn degree_value(current: &Cumulative, previous: Option<&Cumulative>) -> DegreeValue {
    let (pv, plo, pup, pexact) = previous.map_or((0.0, 0.0, 0.0, true), |p| (p.value, p.lower_bound, p.upper_bound, p.is_exact()));
    let raw = current.value - pv;
    if current.is_exact() && pexact {
        return DegreeValue { value: raw, lower_bound: raw, upper_bound: raw, clamped: false };
    }
    let lower = (current.lower_bound - pup).max(0.0);
    let upper = (current.upper_bound - plo).max(lower);
    let value = raw.clamp(lower, upper);
    DegreeValue { value, lower_bound: lower, upper_bound: upper, clamped: value != raw }
}

/// `E^{2<->k} - E^{2<->k-1}` with `E^{2<->1} = 0`.
pub fn e_k(state: &StateObject, k: usize) -> Result<DegreeValue> {
    let measure = crate::bipartite::EntanglementOfFormation::default();
    let cache = TermCache::new();
    let ev = Evaluator::new(state, &measure, &cache)?;
    check_degree(ev.n(), k)?;
    ev.prefetch(k)?;
    let current = maximize(&ev, k)?;
    let previous = if k > 2 { Some(maximize(&ev, k - 1)?) } else { None };
    Ok(degree_value(&current, previous.as_ref()))
}

/// Aggregate provenance of the bipartite terms behind a vector.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MethodSummary {
    /// Largest `upper - lower` over consumed terms.
    pub max_gap: f64,
    pub all_exact: bool,
    pub unconverged_terms: usize,
    /// Number of maximizing-sequence terms per method tag.
    pub methods: BTreeMap<String, usize>,
}

/// `k -> E^k` and `k -> E^{2<->k}` for `k = 2..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementVector {
    pub n: usize,
    pub measure: String,
    pub per_degree: BTreeMap<usize, f64>,
    pub cumulative: BTreeMap<usize, f64>,
    pub per_degree_bounds: BTreeMap<usize, (f64, f64)>,
    pub cumulative_bounds: BTreeMap<usize, (f64, f64)>,
    pub argmax_sequences: BTreeMap<usize, Sequence>,
    pub clamped_degrees: Vec<usize>,
    pub method_summary: MethodSummary,
}

impl EntanglementVector {
    pub fn total(&self) -> f64 {
        self.cumulative.values().next_back().copied().unwrap_or(0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let diff = |a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>| {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            a.iter().map(|(k, v)| b.get(k).map_or(f64::INFINITY, |w| (v - w).abs())).fold(0.0, f64::max)
        };
        diff(&self.per_degree, &other.per_degree).max(diff(&self.cumulative, &other.cumulative))
    }
}

/// Full vector with the default EoF measure.
pub fn entanglement_vector(state: &StateObject) -> Result<EntanglementVector> {
    let measure = crate::bipartite::EntanglementOfFormation::default();
    entanglement_vector_with(state, &measure, &TermCache::new(), None)
}

/// Vector up to an optional degree cap, with an explicit measure and cache.
pub fn entanglement_vector_with(
    state: &StateObject,
    measure: &dyn BipartiteMeasure,
    cache: &TermCache,
    k_max: Option<usize>,
) -> Result<EntanglementVector> {
    let n = state.n_qubits();
    let ev = Evaluator::new(state, measure, cache)?;
    let k_max = k_max.unwrap_or(n);
    check_degree(n, k_max)?;
    ev.prefetch(k_max)?;
    let mut vector = EntanglementVector {
        n,
        measure: measure.name().to_string(),
        per_degree: BTreeMap::new(),
        cumulative: BTreeMap::new(),
        per_degree_bounds: BTreeMap::new(),
        cumulative_bounds: BTreeMap::new(),
        argmax_sequences: BTreeMap::new(),
        clamped_degrees: Vec::new(),
        method_summary: MethodSummary { all_exact: true, ..Default::default() },
    };
    let mut previous: Option<Cumulative> = None;
    for k in 2..=k_max {
        let current = maximize(&ev, k)?;
        let degree = degree_value(&current, previous.as_ref());
        let raw = current.value - previous.as_ref().map_or(0.0, |p| p.value);
        vector.per_degree.insert(k, raw);
        vector.per_degree_bounds.insert(k, (degree.lower_bound, degree.upper_bound));
        if degree.clamped {
            vector.clamped_degrees.push(k);
        }
        vector.cumulative.insert(k, current.value);
        vector.cumulative_bounds.insert(k, (current.lower_bound, current.upper_bound));
        let summary = &mut vector.method_summary;
        for t in &current.terms {
            summary.max_gap = summary.max_gap.max(t.gap());
            summary.all_exact &= t.method.is_exact();
            summary.unconverged_terms += usize::from(!t.converged);
            *summary.methods.entry(t.method.as_str().to_string()).or_default() += 1;
        }
        vector.argmax_sequences.insert(k, current.sequence.clone());
        previous = Some(current);
    }
    Ok(vector)
}

/// `(n - k + 1) (term(k) - term(k - 1))` for exchange-symmetric states, where
/// `term(j)` is the entanglement of one particle with `j - 1` others and the
/// one-particle term is zero.
pub fn symmetric_e_k(term: impl Fn(usize) -> f64, n: usize, k: usize) -> Result<f64> {
    check_degree(n, k)?;
    let previous = if k > 2 { term(k - 1) } else { 0.0 };
    Ok((n - k + 1) as f64 * (term(k) - previous))
}

/// Closed-form vector of `|W_n>` from `g(k, n)`; needs no matrix work.
pub fn w_closed_form_vector(n: usize) -> Result<EntanglementVector> {
    if n < 2 {
        return argument("the W closed form needs n >= 2");
    }
    let mut per_degree = BTreeMap::new();
    let mut cumulative = BTreeMap::new();
    let mut running = 0.0;
    let mut g_prev = 0.0;
    for k in 2..=n {
        let g_k = g_unchecked(k, n);
        let e = (n - k + 1) as f64 * (g_k - g_prev);
        running += e;
        per_degree.insert(k, e);
        cumulative.insert(k, running);
        g_prev = g_k;
    }
    let per_degree_bounds = per_degree.iter().map(|(&k, &v)| (k, (v, v))).collect();
    let cumulative_bounds = cumulative.iter().map(|(&k, &v)| (k, (v, v))).collect();
    Ok(EntanglementVector {
        n,
        measure: "EoF".to_string(),
        per_degree,
        cumulative,
        per_degree_bounds,
        cumulative_bounds,
        // every sequence attains the maximum for W_n
        argmax_sequences: BTreeMap::new(),
        clamped_degrees: Vec::new(),
        method_summary: MethodSummary {
            max_gap: 0.0,
            all_exact: true,
            unconverged_terms: 0,
            methods: BTreeMap::from([("closed-form".to_string(), 0)]),
        },
    })
}

/// Tensor-factor structure of a pure state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    /// Finest product partition, each factor sorted, factors ordered by
    /// smallest member.
    pub factors: Vec<Vec<usize>>,
    /// Number of factors (the state is this-many-separable).
    pub separability: usize,
    /// Size of the largest factor (the state is this-many-producible).
    pub producibility: usize,
}

/// Finest partition of a pure state's register into tensor factors, found by
/// testing Schmidt rank one (second eigenvalue of the marginal at most
/// `1e-10`) across candidate cuts.
pub fn factorize_pure(psi: &StateObject) -> Result<Factorization> {
    if !psi.is_pure_vector() {
        return contract("factorization needs a pure state");
    }
    let n = psi.n_qubits();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut factors = Vec::new();
    while !remaining.is_empty() {
        let anchor = remaining[0];
        let others = remaining[1..].to_vec();
        let mut found = None;
        'sizes: for extra in 0..others.len() {
            for combo in combinations(&others, extra) {
                let mut block = vec![anchor];
                block.extend(combo);
                let complement: Vec<usize> = remaining.iter().copied().filter(|q| !block.contains(q)).collect();
                let probe = if block.len() <= complement.len() { &block } else { &complement };
                let (values, _) = eig_hermitian(&reduce_ordered(psi, probe)?)?;
                if values.get(1).is_none_or(|&v| v <= 1e-10) {
                    found = Some(block);
                    break 'sizes;
                }
            }
        }
        let block = found.unwrap_or_else(|| remaining.clone());
        remaining.retain(|q| !block.contains(q));
        factors.push(block);
    }
    let producibility = factors.iter().map(Vec::len).max().unwrap_or(0);
    Ok(Factorization { separability: factors.len(), producibility, factors })
}

/// True when every term behind the cumulative value is exact.
pub fn all_exact(terms: &[EofResult]) -> bool {
    terms.iter().all(|t| t.method != Method::ConvexRoofUpper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{g, EntanglementOfFormation};
    use crate::states::{bell, build, ghz, w, zero, StateSpec};
    use approx::assert_abs_diff_eq;

    fn spec(text: &str) -> StateObject {
        build(&StateSpec::parse(text).unwrap()).unwrap()
    }

    fn step(head: usize, cluster: &[usize]) -> SequenceStep {
        SequenceStep::new(head, cluster.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_three_particles_full_degree() {
        let seqs: Vec<Sequence> = enumerate_sequences(3, 3).unwrap().collect();
        assert_eq!(seqs.len(), 3);
        for (i, s) in seqs.iter().enumerate() {
            assert_eq!(s.steps[0].head, i);
            assert_eq!(s.steps[0].cluster, vec![0, 1, 2]);
            assert_eq!(s.steps[1].cluster.len(), 2);
        }
    }

    #[test]
    fn enumerate_three_particles_pairs() {
        let seqs: Vec<Sequence> = enumerate_sequences(3, 2).unwrap().collect();
        // head i with partner j, then the forced pair {j, k}
        assert_eq!(seqs.len(), 6);
        for s in &seqs {
            s.validate(3).unwrap();
            let first = &s.steps[0];
            let partner = first.cluster.iter().copied().find(|&q| q != first.head).unwrap();
            assert!(s.steps[1].cluster.contains(&partner));
            assert!(!s.steps[1].cluster.contains(&first.head));
        }
    }

    #[test]
    fn enumerate_counts_match_direct_count() {
        assert_eq!(enumerate_sequences(4, 4).unwrap().count(), 12);
        for n in 2..=6 {
            for k in 2..=n {
                let listed: Vec<Sequence> = enumerate_sequences(n, k).unwrap().collect();
                assert_eq!(listed.len() as u128, count_sequences(n, k).unwrap(), "n={n} k={k}");
                assert!(listed.windows(2).all(|w| w[0] < w[1]), "not strictly increasing at n={n} k={k}");
                listed.iter().for_each(|s| s.validate(n).unwrap());
            }
        }
        assert!(enumerate_sequences(3, 4).is_err());
        assert!(enumerate_sequences(3, 1).is_err());
    }

    #[test]
    fn sequence_validation_rejects_reused_heads() {
        let bad = Sequence { steps: vec![step(0, &[0, 1, 2]), step(1, &[0, 1])], degree: 3 };
        assert!(bad.validate(3).is_err());
        let wrong_size = Sequence { steps: vec![step(0, &[0, 1]), step(1, &[1, 2])], degree: 3 };
        assert!(wrong_size.validate(3).is_err());
    }

    #[test]
    fn sequence_value_examples() {
        let measure = EntanglementOfFormation::default();
        let cache = TermCache::new();
        let seq = Sequence { steps: vec![step(0, &[0, 1, 2]), step(1, &[1, 2])], degree: 3 };

        let g3 = ghz(3).unwrap();
        let ev = Evaluator::new(&g3, &measure, &cache).unwrap();
        assert_abs_diff_eq!(sequence_value(&ev, &seq).unwrap(), 1.0, epsilon = 1e-12);

        let z = zero(3).unwrap();
        let ev = Evaluator::new(&z, &measure, &cache).unwrap();
        assert_abs_diff_eq!(sequence_value(&ev, &seq).unwrap(), 0.0, epsilon = 1e-12);

        let w3 = w(3).unwrap();
        let ev = Evaluator::new(&w3, &measure, &cache).unwrap();
        let expected = g(3, 3).unwrap() + g(2, 3).unwrap();
        assert_abs_diff_eq!(sequence_value(&ev, &seq).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 1.468_3, epsilon = 1e-4);
    }

    #[test]
    fn e_up_to_examples() {
        for n in 3..=5 {
            for k in 2..n {
                assert_abs_diff_eq!(e_up_to(&ghz(n).unwrap(), k).unwrap().value, 0.0, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(e_up_to(&spec("bell*bell"), 2).unwrap().value, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e_up_to(&spec("bell*bell*bell"), 2).unwrap().value, 3.0, epsilon = 1e-12);
        let w3 = e_up_to(&w(3).unwrap(), 3).unwrap();
        assert_abs_diff_eq!(w3.value, g(2, 3).unwrap() + g(3, 3).unwrap(), epsilon = 1e-12);
        assert!(w3.is_exact());
    }

    #[test]
    fn e_k_examples() {
        for n in 3..=5 {
            assert_abs_diff_eq!(e_k(&ghz(n).unwrap(), n).unwrap().value, 1.0, epsilon = 1e-12);
        }
        for k in 2..=3 {
            assert_abs_diff_eq!(e_k(&zero(3).unwrap(), k).unwrap().value, 0.0, epsilon = 1e-12);
        }
        let n = 5;
        for k in 2..=n {
            let expected = (n - k + 1) as f64 * (g_unchecked(k, n) - g_unchecked(k - 1, n));
            assert_abs_diff_eq!(e_k(&w(n).unwrap(), k).unwrap().value, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn vector_examples() {
        let v = entanglement_vector(&ghz(4).unwrap()).unwrap();
        assert_eq!(v.per_degree.keys().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
        for (k, expected) in [(2, 0.0), (3, 0.0), (4, 1.0)] {
            assert_abs_diff_eq!(v.per_degree[&k], expected, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(v.total(), 1.0, epsilon = 1e-12);

        let v = entanglement_vector(&spec("bell*bell")).unwrap();
        for (k, expected) in [(2, 2.0), (3, 0.0), (4, 0.0)] {
            assert_abs_diff_eq!(v.per_degree[&k], expected, epsilon = 1e-12);
        }

        let v = entanglement_vector(&w(4).unwrap()).unwrap();
        let closed = w_closed_form_vector(4).unwrap();
        assert!(v.max_abs_diff(&closed) < 1e-9);
        assert!(v.method_summary.all_exact);
    }

    #[test]
    fn vector_telescopes() {
        let v = entanglement_vector(&spec("w(3)*bell")).unwrap();
        let mut prev = 0.0;
        for (k, c) in &v.cumulative {
            assert_eq!(v.per_degree[k], c - prev);
            assert!(*c >= prev - 1e-12);
            prev = *c;
        }
        let sum: f64 = v.per_degree.values().sum();
        assert_abs_diff_eq!(sum, v.total(), epsilon = 1e-12);
    }

    #[test]
    fn memoized_matches_exhaustive() {
        let measure = EntanglementOfFormation::default();
        let cache = TermCache::new();
        let mut states = vec![spec("w(3)*bell"), spec("ghz(3)*zero(2)"), w(5).unwrap(), spec("bell*w(3)"), spec("w(4)*zero(1)")];
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for n in 3..=4 {
            states.push(crate::random::random_pure(n, &mut rng));
            states.push(crate::random::random_pure(n, &mut rng));
        }
        for s in &states {
            let ev = Evaluator::new(s, &measure, &cache).unwrap();
            ev.prefetch(s.n_qubits()).unwrap();
            for k in 2..=s.n_qubits() {
                let a = maximize(&ev, k).unwrap();
                let b = maximize_exhaustive(&ev, k).unwrap();
                assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-12);
                assert_eq!(a.sequence, b.sequence);
            }
        }
    }

    #[test]
    fn symmetric_form_examples() {
        let n = 6;
        for k in 2..=n {
            let v = symmetric_e_k(|j| g_unchecked(j, n), n, k).unwrap();
            let expected = (n - k + 1) as f64 * (g_unchecked(k, n) - g_unchecked(k - 1, n));
            assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        }
        assert_eq!(symmetric_e_k(|_| 0.7, 5, 3).unwrap(), 0.0);
        let ghz_term = |j: usize| if j < 5 { 0.0 } else { 1.0 };
        assert_eq!(symmetric_e_k(ghz_term, 5, 5).unwrap(), 1.0);
        assert!(symmetric_e_k(|_| 0.0, 3, 4).is_err());
    }

    #[test]
    fn w_closed_form_examples() {
        let v = w_closed_form_vector(3).unwrap();
        assert_abs_diff_eq!(v.per_degree[&2], 2.0 * g(2, 3).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.per_degree[&2], 1.1001, epsilon = 1e-4);
        assert_abs_diff_eq!(v.per_degree[&3], 0.3683, epsilon = 1e-4);
        assert_abs_diff_eq!(v.total(), 1.4683, epsilon = 1e-4);
        let v = w_closed_form_vector(2).unwrap();
        assert_abs_diff_eq!(v.per_degree[&2], 1.0, epsilon = 1e-15);
        for n in 4..=1024 {
            let v = w_closed_form_vector(n).unwrap();
            assert!(v.total() <= (n as f64).log2(), "n={n}");
        }
        assert!(w_closed_form_vector(1).is_err());
    }

    #[test]
    fn factorize_examples() {
        let f = factorize_pure(&spec("ghz(3)*zero(1)")).unwrap();
        assert_eq!(f.factors, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!((f.separability, f.producibility), (2, 3));

        let f = factorize_pure(&zero(4).unwrap()).unwrap();
        assert_eq!(f.factors.len(), 4);
        assert_eq!(f.producibility, 1);

        let f = factorize_pure(&spec("bell*bell")).unwrap();
        assert_eq!(f.factors, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(f.producibility, 2);

        let shuffled = spec("bell*zero(1)*bell").permute_qubits(&[0, 2, 1, 3, 4]).unwrap();
        assert_eq!(factorize_pure(&shuffled).unwrap().factors, vec![vec![0, 2], vec![1], vec![3, 4]]);
        assert!(factorize_pure(&crate::qcore::partial_trace(&bell(), &[0]).unwrap()).is_err());
    }
}
