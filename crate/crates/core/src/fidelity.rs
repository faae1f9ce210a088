//! Jamiolkowski-fidelity computation and the ε-equivalence decision.
//!
//! Two routes are provided. The per-term algorithm enumerates Kraus
//! choices in descending probability-weight order, contracts one trace
//! miter per term inside a shared session, and can stop early once the
//! partial sum already certifies equivalence. The collective algorithm
//! contracts a single doubled network whose scalar is Σᵢ|tr(U†Eᵢ)|².

use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::mpsc;
use std::time::Instant;

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::network::{
    build_doubled_miter, build_trace_miter, circuit_to_network, contract_to_tdd,
    contraction_order, optimize, OptimizeOptions, TensorKind, TensorNetwork,
};
use crate::tdd::{Tdd, TddSession};

const MAX_INDIVIDUAL_TERMS: u128 = 1 << 31;
const RESIDUAL_IMAG_TOL: f64 = 1e-9;
const CLAMP_WARN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Individual,
    Collective,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Individual => "individual",
            Algorithm::Collective => "collective",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Auto,
    Individual,
    Collective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    YesByBound,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::YesByBound => "yes-by-bound",
        }
    }

    pub fn is_equivalent(&self) -> bool {
        !matches!(self, Verdict::No)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// One computed table across the whole trace-term loop.
    Shared,
    /// Computed table cleared before every term.
    Cold,
}

/// Order in which the per-term algorithm walks the Kraus choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationOrder {
    /// Descending product probability weight, so early exit meets the
    /// dominant terms first.
    SortedByWeight,
    /// Plain mixed-radix order; the full sum is the same.
    Natural,
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityOptions {
    /// Apply inverse-pair cancellation and SWAP elimination to the miter
    /// before contraction.
    pub optimize: bool,
    pub table_mode: TableMode,
    pub enumeration: EnumerationOrder,
    /// Worker threads for the per-term algorithm; each owns a private
    /// session, so cross-term table reuse is per worker.
    pub workers: usize,
    /// `Auto` picks the per-term algorithm when the total Kraus term count
    /// is at most this.
    pub auto_threshold: u128,
    /// Live-node threshold above which a session sweeps dead nodes.
    pub gc_threshold: usize,
}

impl Default for FidelityOptions {
    fn default() -> Self {
        FidelityOptions {
            optimize: true,
            table_mode: TableMode::Shared,
            enumeration: EnumerationOrder::SortedByWeight,
            workers: 1,
            auto_threshold: 16,
            gc_threshold: crate::tdd::DEFAULT_GC_THRESHOLD,
        }
    }
}

fn new_session(opts: &FidelityOptions, label_names: &[String]) -> TddSession {
    let session = TddSession::new();
    session.set_gc_threshold(opts.gc_threshold);
    session.set_order(label_names);
    session
}

/// Result of a fidelity computation or equivalence check.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    /// Fidelity (or lower bound) clamped to the unit interval.
    pub fj: f64,
    /// Unclamped value, for diagnostics.
    pub raw_fj: f64,
    pub is_lower_bound: bool,
    pub equivalent: Option<Verdict>,
    pub epsilon: Option<f64>,
    pub algorithm: Algorithm,
    pub terms_evaluated: u64,
    pub total_terms: u128,
    pub per_term_traces: Option<Vec<Complex64>>,
    pub peak_nodes: usize,
    pub wall_time: f64,
}

impl FidelityReport {
    /// True when the raw value left the unit interval by more than the
    /// clamp tolerance, which merits a warning.
    pub fn clamp_warning(&self) -> bool {
        self.raw_fj < -CLAMP_WARN_TOL || self.raw_fj > 1.0 + CLAMP_WARN_TOL
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Total number of Kraus terms Πₖ nₖ of a noisy circuit (saturating).
pub fn total_terms(noisy: &Circuit) -> u128 {
    noisy
        .noise_channels()
        .iter()
        .fold(1u128, |acc, ch| acc.saturating_mul(ch.num_kraus() as u128))
}

/// Average output fidelity over Haar-random inputs implied by the
/// Jamiolkowski fidelity: (d·fj + 1) / (d + 1).
pub fn average_fidelity(fj: f64, d: usize) -> f64 {
    assert!(d >= 2, "dimension must be at least 2");
    (d as f64 * fj + 1.0) / (d as f64 + 1.0)
}

/// The metric C_J = √(1 − fj) induced by the Jamiolkowski fidelity.
pub fn cj_metric(fj: f64) -> f64 {
    (1.0 - fj).max(0.0).sqrt()
}

#[derive(Debug)]
struct HeapEntry {
    weight: f64,
    pos: Vec<u32>,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.pos == other.pos
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on weight; ties pop the lexicographically smallest
        // position vector first
        self.weight
            .partial_cmp(&other.weight)
            .expect("weights are finite")
            .then_with(|| other.pos.cmp(&self.pos))
    }
}

/// Streams Kraus-choice vectors. In sorted mode the choices come out in
/// descending product weight (each term's weight is the product over
/// channels of ‖N‖²_F / 2^arity).
struct TermIter {
    // per channel: (weight, original kraus index), sorted descending
    sorted: Vec<Vec<(f64, usize)>>,
    heap: BinaryHeap<HeapEntry>,
    seen: HashSet<Vec<u32>>,
    natural_next: u128,
    natural_total: u128,
    mode: EnumerationOrder,
}

impl TermIter {
    fn new(channels: &[&crate::noise::NoiseChannel], mode: EnumerationOrder) -> TermIter {
        let mut sorted = Vec::with_capacity(channels.len());
        for ch in channels {
            let d = (1usize << ch.arity()) as f64;
            let mut ws: Vec<(f64, usize)> = ch
                .kraus()
                .iter()
                .enumerate()
                .map(|(i, k)| (k.frobenius_norm_sq() / d, i))
                .collect();
            ws.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            sorted.push(ws);
        }
        let natural_total = sorted.iter().fold(1u128, |acc, ws| acc * ws.len() as u128);
        let mut heap = BinaryHeap::new();
        let mut seen = HashSet::new();
        let first = vec![0u32; sorted.len()];
        let weight = sorted.iter().map(|ws| ws[0].0).product();
        seen.insert(first.clone());
        heap.push(HeapEntry { weight, pos: first });
        TermIter {
            sorted,
            heap,
            seen,
            natural_next: 0,
            natural_total,
            mode,
        }
    }

    fn pos_weight(&self, pos: &[u32]) -> f64 {
        pos.iter()
            .zip(&self.sorted)
            .map(|(&p, ws)| ws[p as usize].0)
            .product()
    }
}

impl Iterator for TermIter {
    /// The Kraus indices to select, one per noise placeholder.
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self.mode {
            EnumerationOrder::Natural => {
                if self.natural_next >= self.natural_total {
                    return None;
                }
                let mut rem = self.natural_next;
                self.natural_next += 1;
                let mut choice = vec![0usize; self.sorted.len()];
                for i in (0..self.sorted.len()).rev() {
                    let radix = self.sorted[i].len() as u128;
                    choice[i] = (rem % radix) as usize;
                    rem /= radix;
                }
                Some(choice)
            }
            EnumerationOrder::SortedByWeight => {
                let entry = self.heap.pop()?;
                for k in 0..entry.pos.len() {
                    if (entry.pos[k] as usize) + 1 < self.sorted[k].len() {
                        let mut succ = entry.pos.clone();
                        succ[k] += 1;
                        if self.seen.insert(succ.clone()) {
                            let weight = self.pos_weight(&succ);
                            self.heap.push(HeapEntry { weight, pos: succ });
                        }
                    }
                }
                Some(
                    entry
                        .pos
                        .iter()
                        .zip(&self.sorted)
                        .map(|(&p, ws)| ws[p as usize].1)
                        .collect(),
                )
            }
        }
    }
}

/// One pairwise merge of the per-term contraction plan: contract work
/// slots `left` and `right` over `shared` index positions, appending the
/// result as a new slot.
#[derive(Debug, Clone)]
struct PlanStep {
    left: usize,
    right: usize,
    shared: Vec<u32>,
}

/// The miter shared by all trace terms. Structure, labels and contraction
/// schedule are term-independent; only the noise tensors' data changes, so
/// everything else is computed once.
struct MiterTemplate {
    net: TensorNetwork,
    // noise placeholder index -> tensor slot
    noise_slots: HashMap<usize, usize>,
    label_names: Vec<String>,
    tensor_labels: Vec<Vec<String>>,
    steps: Vec<PlanStep>,
}

fn build_template(ideal: &Circuit, noisy: &Circuit, opts: &FidelityOptions) -> Result<MiterTemplate> {
    let m = noisy.num_noise();
    let instance = circuit_to_network(noisy, Some(&vec![0; m]))?;
    let mut net = build_trace_miter(ideal, instance)?;
    if opts.optimize {
        net = optimize(net, OptimizeOptions::default());
    }
    let mut noise_slots = HashMap::new();
    for (slot, t) in net.tensors.iter().enumerate() {
        if let TensorKind::Channel { noise_idx, .. } = t.kind {
            noise_slots.insert(noise_idx, slot);
        }
    }
    debug_assert_eq!(noise_slots.len(), m);
    let order = contraction_order(&net);
    let label_names = net.present_label_names();
    let pos: HashMap<&str, u32> = label_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();
    let tensor_labels: Vec<Vec<String>> = net
        .tensors
        .iter()
        .map(|t| t.labels.iter().map(|&l| net.label_name(l).to_string()).collect())
        .collect();
    let sets: Vec<Vec<u32>> = tensor_labels
        .iter()
        .map(|labels| {
            let mut v: Vec<u32> = labels.iter().map(|l| pos[l.as_str()]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let steps = build_plan(&order, &pos, sets);
    Ok(MiterTemplate {
        net,
        noise_slots,
        label_names,
        tensor_labels,
        steps,
    })
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter()
        .copied()
        .filter(|p| b.binary_search(p).is_ok())
        .collect()
}

fn symdiff_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a
        .iter()
        .chain(b.iter())
        .copied()
        .filter(|p| a.binary_search(p).is_err() || b.binary_search(p).is_err())
        .collect();
    out.sort_unstable();
    out
}

/// Symbolic dry run of the elimination schedule over index sets, recording
/// which pairs merge and over which positions.
fn build_plan(
    order: &[String],
    pos: &HashMap<&str, u32>,
    mut sets: Vec<Vec<u32>>,
) -> Vec<PlanStep> {
    let mut alive: Vec<bool> = vec![true; sets.len()];
    let mut holders: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        for &p in s {
            holders.entry(p).or_default().push(i);
        }
    }
    let mut steps = Vec::new();
    let merge = |sets: &mut Vec<Vec<u32>>,
                     alive: &mut Vec<bool>,
                     holders: &mut HashMap<u32, Vec<usize>>,
                     steps: &mut Vec<PlanStep>,
                     ia: usize,
                     ib: usize| {
        let shared = intersect_sorted(&sets[ia], &sets[ib]);
        let result = symdiff_sorted(&sets[ia], &sets[ib]);
        alive[ia] = false;
        alive[ib] = false;
        let slot = sets.len();
        for &q in &result {
            holders.entry(q).or_default().push(slot);
        }
        steps.push(PlanStep {
            left: ia,
            right: ib,
            shared,
        });
        sets.push(result);
        alive.push(true);
    };
    for label in order {
        let p = pos[label.as_str()];
        let Some(hs) = holders.get(&p) else { continue };
        let mut h: Vec<usize> = hs.iter().copied().filter(|&i| alive[i]).collect();
        h.sort_unstable();
        h.dedup();
        if h.len() < 2 {
            continue;
        }
        debug_assert_eq!(h.len(), 2);
        merge(&mut sets, &mut alive, &mut holders, &mut steps, h[0], h[1]);
    }
    let rest: Vec<usize> = (0..sets.len()).filter(|&i| alive[i]).collect();
    if rest.len() >= 2 {
        let mut acc = *rest.last().unwrap();
        for &t in &rest[..rest.len() - 1] {
            merge(&mut sets, &mut alive, &mut holders, &mut steps, acc, t);
            acc = sets.len() - 1;
        }
    }
    steps
}

/// Build the leaf TDDs of the template. Leaves for unchanged tensors stay
/// alive across the whole term loop; only noise slots are rebuilt.
fn build_leaves(template: &MiterTemplate, session: &TddSession) -> Result<Vec<Tdd>> {
    let mut leaves = Vec::with_capacity(template.net.tensors.len());
    for (slot, t) in template.net.tensors.iter().enumerate() {
        let labels: Vec<&str> = template.tensor_labels[slot].iter().map(|s| s.as_str()).collect();
        leaves.push(session.from_tensor(&t.data, &labels)?);
    }
    Ok(leaves)
}

fn contract_term(
    template: &MiterTemplate,
    leaves: &mut [Tdd],
    channels: &[&crate::noise::NoiseChannel],
    choice: &[usize],
    session: &TddSession,
) -> Result<Complex64> {
    for (&noise_idx, &slot) in &template.noise_slots {
        let kraus = &channels[noise_idx].kraus()[choice[noise_idx]];
        let labels: Vec<&str> = template.tensor_labels[slot].iter().map(|s| s.as_str()).collect();
        leaves[slot] = session.from_tensor(&kraus.data, &labels)?;
    }
    if leaves.is_empty() {
        return Ok(template.net.scalar);
    }
    let mut work: Vec<Option<Tdd>> = leaves.iter().map(|t| Some(t.clone())).collect();
    for step in &template.steps {
        let r = {
            let a = work[step.left].as_ref().expect("plan slot alive");
            let b = work[step.right].as_ref().expect("plan slot alive");
            session.contract_pos(a, b, &step.shared)
        };
        work[step.left] = None;
        work[step.right] = None;
        work.push(Some(r));
    }
    let result = work
        .iter()
        .rev()
        .find_map(|t| t.as_ref())
        .expect("plan leaves a result");
    Ok(result.scalar()? * template.net.scalar)
}

/// Per-term algorithm: enumerate Kraus choices, contract one miter per
/// term, and sum |trace|²/d². With `early_exit = Some(ε)` the loop stops
/// as soon as the partial sum exceeds 1−ε, returning a lower bound with a
/// yes-by-bound verdict.
pub fn fidelity_individual(
    ideal: &Circuit,
    noisy: &Circuit,
    early_exit: Option<f64>,
    opts: &FidelityOptions,
) -> Result<FidelityReport> {
    let start = Instant::now();
    if ideal.num_qubits() != noisy.num_qubits() {
        return Err(Error::QubitCountMismatch(
            ideal.num_qubits(),
            noisy.num_qubits(),
        ));
    }
    let total = total_terms(noisy);
    if total > MAX_INDIVIDUAL_TERMS {
        return Err(Error::TooManyTerms { total });
    }
    let d = ideal.dim() as f64;
    let d2 = d * d;
    let channels = noisy.noise_channels();
    let template = build_template(ideal, noisy, opts)?;

    let threshold = early_exit.map(|eps| 1.0 - eps);
    let mut sum = 0.0;
    let mut traces: Vec<Complex64> = Vec::new();
    let mut stopped_early = false;
    let peak_nodes;

    if opts.workers <= 1 {
        let session = new_session(opts, &template.label_names);
        let mut leaves = build_leaves(&template, &session)?;
        let terms = TermIter::new(&channels, opts.enumeration);
        for choice in terms {
            if opts.table_mode == TableMode::Cold {
                session.reset_computed_table();
            }
            let tr = contract_term(&template, &mut leaves, &channels, &choice, &session)?;
            traces.push(tr);
            sum += tr.norm_sqr();
            if let Some(th) = threshold {
                if sum / d2 > th && (traces.len() as u128) < total {
                    stopped_early = true;
                    break;
                }
            }
        }
        peak_nodes = session.peak_node_count();
    } else {
        (sum, traces, stopped_early, peak_nodes) =
            run_parallel(&template, &channels, total, d2, threshold, opts)?;
    }

    let raw = sum / d2;
    let verdict = early_exit.map(|eps| {
        if stopped_early {
            Verdict::YesByBound
        } else if raw > 1.0 - eps {
            Verdict::Yes
        } else {
            Verdict::No
        }
    });
    Ok(FidelityReport {
        fj: clamp01(raw),
        raw_fj: raw,
        is_lower_bound: stopped_early,
        equivalent: verdict,
        epsilon: early_exit,
        algorithm: Algorithm::Individual,
        terms_evaluated: traces.len() as u64,
        total_terms: total,
        per_term_traces: Some(traces),
        peak_nodes,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Workers take terms round-robin by enumeration index, each in a private
/// session. Results merge in enumeration order, so the early-exit decision
/// (and therefore the reported bound) is identical to a serial run.
fn run_parallel(
    template: &MiterTemplate,
    channels: &[&crate::noise::NoiseChannel],
    total: u128,
    d2: f64,
    threshold: Option<f64>,
    opts: &FidelityOptions,
) -> Result<(f64, Vec<Complex64>, bool, usize)> {
    let workers = opts.workers;
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(u64, Complex64)>();

    let mut sum = 0.0;
    let mut traces = Vec::new();
    let mut stopped_early = false;
    let mut peak = 0usize;

    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for w in 0..workers {
            let tx = tx.clone();
            let stop = &stop;
            let channels_owned: Vec<crate::noise::NoiseChannel> =
                channels.iter().map(|&c| c.clone()).collect();
            let enumeration = opts.enumeration;
            let table_mode = opts.table_mode;
            let worker_opts = *opts;
            handles.push(scope.spawn(move || -> Result<usize> {
                let session = new_session(&worker_opts, &template.label_names);
                let mut leaves = build_leaves(template, &session)?;
                let chans: Vec<&crate::noise::NoiseChannel> = channels_owned.iter().collect();
                for (idx, choice) in TermIter::new(&chans, enumeration).enumerate() {
                    if idx % workers != w {
                        continue;
                    }
                    if stop.load(AtomicOrdering::Relaxed) {
                        break;
                    }
                    if table_mode == TableMode::Cold {
                        session.reset_computed_table();
                    }
                    let tr = contract_term(template, &mut leaves, &chans, &choice, &session)?;
                    if tx.send((idx as u64, tr)).is_err() {
                        break;
                    }
                }
                Ok(session.peak_node_count())
            }));
        }
        drop(tx);

        let mut buffer: BTreeMap<u64, Complex64> = BTreeMap::new();
        let mut next: u64 = 0;
        'consume: while (next as u128) < total {
            let (idx, tr) = match rx.recv() {
                Ok(v) => v,
                Err(_) => break,
            };
            buffer.insert(idx, tr);
            while let Some(tr) = buffer.remove(&next) {
                traces.push(tr);
                sum += tr.norm_sqr();
                next += 1;
                if let Some(th) = threshold {
                    if sum / d2 > th && (next as u128) < total {
                        stopped_early = true;
                        stop.store(true, AtomicOrdering::Relaxed);
                        break 'consume;
                    }
                }
            }
        }
        stop.store(true, AtomicOrdering::Relaxed);
        drop(rx);
        for h in handles {
            match h.join() {
                Ok(Ok(p)) => peak = peak.max(p),
                Ok(Err(e)) => return Err(e),
                Err(_) => return Err(Error::Internal("worker panicked".into())),
            }
        }
        Ok(())
    })?;

    Ok((sum, traces, stopped_early, peak))
}

/// Collective algorithm: contract the doubled miter once; the scalar is
/// Σᵢ|tr(U†Eᵢ)|², mathematically real, and fj = scalar/d².
pub fn fidelity_collective(
    ideal: &Circuit,
    noisy: &Circuit,
    opts: &FidelityOptions,
) -> Result<FidelityReport> {
    let start = Instant::now();
    let mut net = build_doubled_miter(ideal, noisy)?;
    if opts.optimize {
        net = optimize(net, OptimizeOptions::default());
    }
    let order = contraction_order(&net);
    let session = new_session(opts, &net.present_label_names());
    let scalar = contract_to_tdd(&net, &order, &session)?.scalar()?;
    if scalar.im.abs() > RESIDUAL_IMAG_TOL * scalar.norm().max(1.0) {
        return Err(Error::ResidualImaginary {
            imag: scalar.im,
            magnitude: scalar.norm(),
        });
    }
    let d = ideal.dim() as f64;
    let raw = scalar.re / (d * d);
    let total = total_terms(noisy);
    Ok(FidelityReport {
        fj: clamp01(raw),
        raw_fj: raw,
        is_lower_bound: false,
        equivalent: None,
        epsilon: None,
        algorithm: Algorithm::Collective,
        terms_evaluated: total.min(u64::MAX as u128) as u64,
        total_terms: total,
        per_term_traces: None,
        peak_nodes: session.peak_node_count(),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Decide ε-equivalence: equivalent iff fj > 1−ε (strict). `Auto` picks
/// the per-term algorithm when the total Kraus term count is at most the
/// configured threshold, the collective one otherwise. The per-term route
/// receives ε for early exit unless `early_exit` is disabled.
pub fn check_equivalence(
    ideal: &Circuit,
    noisy: &Circuit,
    epsilon: f64,
    choice: AlgorithmChoice,
    early_exit: bool,
    opts: &FidelityOptions,
) -> Result<FidelityReport> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::InvalidProbability(epsilon));
    }
    let algo = match choice {
        AlgorithmChoice::Individual => Algorithm::Individual,
        AlgorithmChoice::Collective => Algorithm::Collective,
        AlgorithmChoice::Auto => {
            if total_terms(noisy) <= opts.auto_threshold {
                Algorithm::Individual
            } else {
                Algorithm::Collective
            }
        }
    };
    let mut report = match algo {
        Algorithm::Individual => {
            let exit = if early_exit { Some(epsilon) } else { None };
            let mut r = fidelity_individual(ideal, noisy, exit, opts)?;
            if r.equivalent.is_none() {
                r.equivalent = Some(if r.raw_fj > 1.0 - epsilon {
                    Verdict::Yes
                } else {
                    Verdict::No
                });
            }
            r
        }
        Algorithm::Collective => {
            let mut r = fidelity_collective(ideal, noisy, opts)?;
            r.equivalent = Some(if r.raw_fj > 1.0 - epsilon {
                Verdict::Yes
            } else {
                Verdict::No
            });
            r
        }
    };
    report.epsilon = Some(epsilon);
    Ok(report)
}
