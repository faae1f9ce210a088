//! Tensor-network construction for the trace miters, local optimisations
//! (inverse-pair cancellation, SWAP elimination) and contraction ordering.
//!
//! A closed network carries each index label on exactly two tensor slots;
//! contracting everything yields the trace of the composed functionality
//! matrix. Trace closure is realised by 2-index identity "cup" tensors so
//! that self-loops never appear on a single tensor.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::circuit::{Circuit, Instruction};
use crate::dense::{CMat, ONE, ZERO};
use crate::error::{Error, Result};
use crate::gates::GateName;
use crate::tdd::{Tdd, TddSession};

pub type LabelId = u32;

const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum TensorKind {
    /// A unitary gate; `is_swap` marks tensors eligible for SWAP
    /// elimination.
    Gate { label: String, is_swap: bool },
    /// A non-unitary noise tensor: a chosen Kraus operator (per-term
    /// algorithm) or a channel matrix representation (doubled algorithm).
    /// `noise_idx` is the index of the noise placeholder it came from.
    Channel { label: String, noise_idx: usize },
    /// Trace-closure identity wire.
    Cup,
}

/// One tensor of the network. `labels` name the axes in entry order; the
/// first label owns the most-significant bit of the entry index. For gate
/// tensors the axis order is `[outs..., ins...]` over the instruction's
/// qubit tuple, and `data` is the row-major gate matrix.
#[derive(Debug, Clone)]
pub struct NetTensor {
    pub kind: TensorKind,
    pub labels: Vec<LabelId>,
    pub data: Vec<Complex64>,
}

impl NetTensor {
    fn arity(&self) -> usize {
        self.labels.len() / 2
    }

    fn outs(&self) -> &[LabelId] {
        &self.labels[..self.arity()]
    }

    fn ins(&self) -> &[LabelId] {
        &self.labels[self.arity()..]
    }

    fn matrix(&self) -> CMat {
        let dim = 1 << self.arity();
        CMat {
            dim,
            data: self.data.clone(),
        }
    }
}

/// Tensor network over labelled binary indices, with per-qubit wire
/// tracking so circuits can be appended and the trace closed.
#[derive(Debug, Clone)]
pub struct TensorNetwork {
    label_names: Vec<String>,
    pub tensors: Vec<NetTensor>,
    /// Scalar factor picked up by closing untouched wires and collapsing
    /// closed loops.
    pub scalar: Complex64,
    num_wires: usize,
    wire_in: Vec<LabelId>,
    wire_out: Vec<LabelId>,
    wire_seg: Vec<u32>,
    closed: bool,
}

impl TensorNetwork {
    fn new(num_wires: usize, wire_name: impl Fn(usize) -> String) -> TensorNetwork {
        let mut net = TensorNetwork {
            label_names: Vec::new(),
            tensors: Vec::new(),
            scalar: ONE,
            num_wires,
            wire_in: Vec::new(),
            wire_out: Vec::new(),
            wire_seg: vec![0; num_wires],
            closed: false,
        };
        for w in 0..num_wires {
            let id = net.fresh_label(format!("{}.0", wire_name(w)));
            net.wire_in.push(id);
            net.wire_out.push(id);
        }
        net
    }

    fn fresh_label(&mut self, name: String) -> LabelId {
        self.label_names.push(name);
        (self.label_names.len() - 1) as LabelId
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        &self.label_names[id as usize]
    }

    pub fn num_tensors(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Labels currently appearing on fewer than two tensor slots.
    pub fn open_labels(&self) -> Vec<LabelId> {
        let mut count = vec![0usize; self.label_names.len()];
        for t in &self.tensors {
            for &l in &t.labels {
                count[l as usize] += 1;
            }
        }
        (0..self.label_names.len() as LabelId)
            .filter(|&l| count[l as usize] == 1)
            .collect()
    }

    fn wire_basename(&self, w: usize) -> String {
        let first = &self.label_names[self.wire_in[w] as usize];
        first[..first.rfind('.').unwrap()].to_string()
    }

    /// Append a matrix acting on the given wires (first wire owns the
    /// most-significant bit).
    fn append(&mut self, kind: TensorKind, mat: &CMat, wires: &[usize]) {
        assert!(!self.closed, "cannot append to a closed network");
        let k = wires.len();
        assert_eq!(mat.dim, 1 << k);
        let ins: Vec<LabelId> = wires.iter().map(|&w| self.wire_out[w]).collect();
        let mut outs = Vec::with_capacity(k);
        for &w in wires {
            self.wire_seg[w] += 1;
            let name = format!("{}.{}", self.wire_basename(w), self.wire_seg[w]);
            let id = self.fresh_label(name);
            self.wire_out[w] = id;
            outs.push(id);
        }
        let mut labels = outs;
        labels.extend(ins);
        self.tensors.push(NetTensor {
            kind,
            labels,
            data: mat.data.clone(),
        });
    }

    /// Connect each wire's output back to its input. Untouched wires
    /// contribute a scalar factor of 2 (the trace of their implicit
    /// identity).
    pub fn close_trace(&mut self) {
        assert!(!self.closed);
        for w in 0..self.num_wires {
            if self.wire_out[w] == self.wire_in[w] {
                self.scalar *= 2.0;
            } else {
                let (a, b) = (self.wire_out[w], self.wire_in[w]);
                self.tensors.push(NetTensor {
                    kind: TensorKind::Cup,
                    labels: vec![a, b],
                    data: vec![ONE, ZERO, ZERO, ONE],
                });
            }
        }
        self.closed = true;
    }

    /// Names of all labels present on at least one tensor, in creation
    /// order (the session's global index order).
    pub fn present_label_names(&self) -> Vec<String> {
        let mut present = vec![false; self.label_names.len()];
        for t in &self.tensors {
            for &l in &t.labels {
                present[l as usize] = true;
            }
        }
        (0..self.label_names.len())
            .filter(|&i| present[i])
            .map(|i| self.label_names[i].clone())
            .collect()
    }
}

/// Build the open tensor network of a circuit. Noise placeholders require
/// a Kraus choice (one operator index per placeholder, in instruction
/// order); pass `None` for ideal circuits.
pub fn circuit_to_network(c: &Circuit, kraus_choice: Option<&[usize]>) -> Result<TensorNetwork> {
    let mut net = TensorNetwork::new(c.num_qubits(), |w| format!("q{}", w));
    append_instance(&mut net, c, kraus_choice, &(0..c.num_qubits()).collect::<Vec<_>>())?;
    Ok(net)
}

fn append_instance(
    net: &mut TensorNetwork,
    c: &Circuit,
    kraus_choice: Option<&[usize]>,
    wire_map: &[usize],
) -> Result<()> {
    let noise_total = c.num_noise();
    let choices = match kraus_choice {
        Some(ch) => {
            if ch.len() != noise_total {
                return Err(Error::KrausChoiceCount {
                    expected: noise_total,
                    got: ch.len(),
                });
            }
            ch
        }
        None => {
            if noise_total > 0 {
                return Err(Error::KrausChoiceCount {
                    expected: noise_total,
                    got: 0,
                });
            }
            &[]
        }
    };
    let mut noise_idx = 0;
    for instr in c.instructions() {
        match instr {
            Instruction::Unitary { gate, qubits } => {
                let wires: Vec<usize> = qubits.iter().map(|&q| wire_map[q]).collect();
                net.append(
                    TensorKind::Gate {
                        label: gate.label(),
                        is_swap: gate.name == GateName::Swap,
                    },
                    gate.matrix().matrix(),
                    &wires,
                );
            }
            Instruction::Noise { channel_id, qubit } => {
                let ch = c.channel(channel_id);
                let j = choices[noise_idx];
                if j >= ch.num_kraus() {
                    return Err(Error::KrausChoiceRange {
                        choice: j,
                        len: ch.num_kraus(),
                    });
                }
                net.append(
                    TensorKind::Channel {
                        label: ch.label().to_string(),
                        noise_idx,
                    },
                    &ch.kraus()[j],
                    &[wire_map[*qubit]],
                );
                noise_idx += 1;
            }
        }
    }
    Ok(())
}

/// Append U† to a noisy-instance network and close the trace; contracting
/// the result yields tr(U†·E).
pub fn build_trace_miter(ideal: &Circuit, mut instance: TensorNetwork) -> Result<TensorNetwork> {
    if ideal.num_qubits() != instance.num_wires {
        return Err(Error::QubitCountMismatch(
            ideal.num_qubits(),
            instance.num_wires,
        ));
    }
    let adj = ideal.adjoint()?;
    append_instance(&mut instance, &adj, None, &(0..adj.num_qubits()).collect::<Vec<_>>())?;
    instance.close_trace();
    Ok(instance)
}

/// Build the doubled-circuit network whose full contraction yields
/// tr((U† ⊗ Uᵀ)·M_𝓔) = Σᵢ |tr(U†Eᵢ)|². Each qubit q gets an auxiliary
/// primed copy; unitaries appear as V on q-wires and V* on primed wires,
/// noise placeholders as the 2k-qubit tensor Σ N⊗N* across (q, q').
pub fn build_doubled_miter(ideal: &Circuit, noisy: &Circuit) -> Result<TensorNetwork> {
    let n = ideal.num_qubits();
    if n != noisy.num_qubits() {
        return Err(Error::QubitCountMismatch(n, noisy.num_qubits()));
    }
    let mut net = TensorNetwork::new(
        2 * n,
        |w| {
            if w % 2 == 0 {
                format!("q{}", w / 2)
            } else {
                format!("p{}", w / 2)
            }
        },
    );
    let plain: Vec<usize> = (0..n).map(|q| 2 * q).collect();
    let primed: Vec<usize> = (0..n).map(|q| 2 * q + 1).collect();

    // ideal side: U† on the plain wires, (U*)† = Uᵀ on the primed wires
    append_instance(&mut net, &ideal.adjoint()?, None, &plain)?;
    append_instance(&mut net, &ideal.conjugate()?.adjoint()?, None, &primed)?;

    // noisy side: V and V* in lockstep; noise becomes its matrix
    // representation across (q, q')
    let mut noise_idx = 0;
    for instr in noisy.instructions() {
        match instr {
            Instruction::Unitary { gate, qubits } => {
                let wires: Vec<usize> = qubits.iter().map(|&q| plain[q]).collect();
                net.append(
                    TensorKind::Gate {
                        label: gate.label(),
                        is_swap: gate.name == GateName::Swap,
                    },
                    gate.matrix().matrix(),
                    &wires,
                );
                let conj = gate.to_conjugate();
                let wires: Vec<usize> = qubits.iter().map(|&q| primed[q]).collect();
                net.append(
                    TensorKind::Gate {
                        label: conj.label(),
                        is_swap: conj.name == GateName::Swap,
                    },
                    conj.matrix().matrix(),
                    &wires,
                );
            }
            Instruction::Noise { channel_id, qubit } => {
                let ch = noisy.channel(channel_id);
                net.append(
                    TensorKind::Channel {
                        label: format!("M[{}]", ch.label()),
                        noise_idx,
                    },
                    &ch.matrix_rep(),
                    &[plain[*qubit], primed[*qubit]],
                );
                noise_idx += 1;
            }
        }
    }
    let _ = noise_idx;
    net.close_trace();
    Ok(net)
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub eliminate_swaps: bool,
    pub cancel_inverse_pairs: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            eliminate_swaps: true,
            cancel_inverse_pairs: true,
        }
    }
}

/// Local optimisations on a closed miter network: SWAP tensors are removed
/// with their wires rerouted, and adjacent mutually-inverse unitary pairs
/// on identical wire tuples are cancelled. The contracted value is
/// unchanged.
pub fn optimize(mut net: TensorNetwork, options: OptimizeOptions) -> TensorNetwork {
    assert!(net.closed, "optimize expects a closed network");
    loop {
        let mut changed = false;
        if options.eliminate_swaps {
            changed |= eliminate_one_swap(&mut net);
        }
        smooth_cups(&mut net);
        if options.cancel_inverse_pairs {
            changed |= cancel_one_pair(&mut net);
        }
        smooth_cups(&mut net);
        if !changed {
            break;
        }
    }
    net
}

/// label -> the (tensor, slot) occurrences. Closed networks have exactly
/// two per label.
fn occurrences(net: &TensorNetwork) -> HashMap<LabelId, Vec<(usize, usize)>> {
    let mut occ: HashMap<LabelId, Vec<(usize, usize)>> = HashMap::new();
    for (ti, t) in net.tensors.iter().enumerate() {
        for (si, &l) in t.labels.iter().enumerate() {
            occ.entry(l).or_default().push((ti, si));
        }
    }
    occ
}

fn eliminate_one_swap(net: &mut TensorNetwork) -> bool {
    let Some(idx) = net
        .tensors
        .iter()
        .position(|t| matches!(&t.kind, TensorKind::Gate { is_swap: true, .. }))
    else {
        return false;
    };
    let t = net.tensors[idx].clone();
    let (o1, o2, i1, i2) = (t.labels[0], t.labels[1], t.labels[2], t.labels[3]);
    net.tensors.remove(idx);
    // SWAP wires cross: out1 continues in2's wire, out2 continues in1's
    for (a, b) in [(o1, i2), (o2, i1)] {
        net.tensors.push(NetTensor {
            kind: TensorKind::Cup,
            labels: vec![a, b],
            data: vec![ONE, ZERO, ZERO, ONE],
        });
    }
    true
}

/// Remove pass-through cup tensors by renaming one endpoint label to the
/// other. Cups that would create a self-loop on a single tensor are kept;
/// degenerate cups (both slots equal, or two cups joining the same pair of
/// labels) collapse into a scalar factor of 2.
fn smooth_cups(net: &mut TensorNetwork) {
    loop {
        let mut acted = false;
        let occ = occurrences(net);
        'outer: for (ci, cup) in net.tensors.iter().enumerate() {
            if cup.kind != TensorKind::Cup {
                continue;
            }
            let (a, b) = (cup.labels[0], cup.labels[1]);
            if a == b {
                // closed loop: Σ_a δ_aa = 2
                net.scalar *= 2.0;
                net.tensors.remove(ci);
                acted = true;
                break 'outer;
            }
            let other_a = occ[&a].iter().find(|(ti, _)| *ti != ci).copied();
            let other_b = occ[&b].iter().find(|(ti, _)| *ti != ci).copied();
            let (Some((ta, sa)), Some((tb, sb))) = (other_a, other_b) else {
                continue; // open end; leave the cup alone
            };
            if ta == ci || tb == ci {
                // the cup carries a repeated label handled above
                continue;
            }
            if ta == tb && net.tensors[ta].kind == TensorKind::Cup {
                // cup paired with another cup on both labels: trace loop
                net.scalar *= 2.0;
                let mut dead = [ci, ta];
                dead.sort_unstable();
                net.tensors.remove(dead[1]);
                net.tensors.remove(dead[0]);
                acted = true;
                break 'outer;
            }
            if ta == tb {
                // would create a self-loop on a non-cup tensor; keep the cup
                continue;
            }
            // splice the wire: rename b's occurrence to a
            net.tensors[tb].labels[sb] = a;
            let _ = sa;
            net.tensors.remove(ci);
            acted = true;
            break 'outer;
        }
        if !acted {
            return;
        }
    }
}

/// Follow a wire from a tensor slot to the non-cup tensor slot on the
/// other side, passing through any chain of cups.
fn trace_wire(
    net: &TensorNetwork,
    occ: &HashMap<LabelId, Vec<(usize, usize)>>,
    from: (usize, usize),
) -> Option<(usize, usize)> {
    let mut cur = from;
    let mut hops = 0;
    loop {
        let label = net.tensors[cur.0].labels[cur.1];
        let other = occ
            .get(&label)?
            .iter()
            .find(|&&(ti, si)| (ti, si) != cur)
            .copied()?;
        if net.tensors[other.0].kind != TensorKind::Cup {
            return Some(other);
        }
        // continue through the cup's other slot
        cur = (other.0, 1 - other.1);
        hops += 1;
        if hops > net.tensors.len() + 1 {
            return None; // pure cup loop; collapsed elsewhere
        }
    }
}

fn cancel_one_pair(net: &mut TensorNetwork) -> bool {
    let occ = occurrences(net);
    for (ai, a) in net.tensors.iter().enumerate() {
        let TensorKind::Gate { .. } = a.kind else {
            continue;
        };
        let k = a.arity();
        // candidate successor through output wire 0
        let Some((bi, bslot)) = trace_wire(net, &occ, (ai, 0)) else {
            continue;
        };
        if bi == ai {
            continue;
        }
        let b = &net.tensors[bi];
        let TensorKind::Gate { .. } = b.kind else {
            continue;
        };
        if b.arity() != k || bslot != k {
            continue;
        }
        // every output j of a must feed input j of b
        let aligned = (0..k).all(|j| {
            trace_wire(net, &occ, (ai, j)).is_some_and(|(ti, si)| ti == bi && si == k + j)
        });
        if !aligned {
            continue;
        }
        let prod = net.tensors[bi].matrix().mul(&net.tensors[ai].matrix());
        if !prod.is_identity(IDENTITY_TOL) {
            continue;
        }
        // remove both, reconnecting a's inputs to b's outputs
        let a_ins: Vec<LabelId> = net.tensors[ai].ins().to_vec();
        let b_outs: Vec<LabelId> = net.tensors[bi].outs().to_vec();
        let mut dead = [ai, bi];
        dead.sort_unstable();
        net.tensors.remove(dead[1]);
        net.tensors.remove(dead[0]);
        for j in 0..k {
            net.tensors.push(NetTensor {
                kind: TensorKind::Cup,
                labels: vec![a_ins[j], b_outs[j]],
                data: vec![ONE, ZERO, ZERO, ONE],
            });
        }
        return true;
    }
    false
}

/// Greedy min-fill elimination order over the network's line graph
/// (vertices are index labels, edges join labels sharing a tensor). Only
/// contractible labels — those appearing on two tensors — are ranked; open
/// boundary labels are never eliminated. Ties break on lexicographic label
/// name. Deterministic for a given network.
pub fn contraction_order(net: &TensorNetwork) -> Vec<String> {
    let mut count: HashMap<LabelId, usize> = HashMap::new();
    let mut adj: HashMap<LabelId, Vec<LabelId>> = HashMap::new();
    for t in &net.tensors {
        for &l in &t.labels {
            *count.entry(l).or_insert(0) += 1;
            adj.entry(l).or_default();
        }
        for (i, &a) in t.labels.iter().enumerate() {
            for &b in &t.labels[i + 1..] {
                if a != b {
                    add_edge(&mut adj, a, b);
                }
            }
        }
    }
    let mut remaining: Vec<LabelId> = Vec::new();
    for t in &net.tensors {
        for &l in &t.labels {
            if count[&l] >= 2 && !remaining.contains(&l) {
                remaining.push(l);
            }
        }
    }
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut best: Option<(usize, &str, LabelId)> = None;
        for &v in &remaining {
            let neigh = &adj[&v];
            let mut fill = 0;
            for (i, &x) in neigh.iter().enumerate() {
                for &y in &neigh[i + 1..] {
                    if !adj[&x].contains(&y) {
                        fill += 1;
                    }
                }
            }
            let name = net.label_name(v);
            let better = match &best {
                None => true,
                Some((bf, bn, _)) => fill < *bf || (fill == *bf && name < *bn),
            };
            if better {
                best = Some((fill, name, v));
            }
        }
        let (_, _, v) = best.unwrap();
        // eliminate: clique the neighbourhood
        let neigh = adj[&v].clone();
        for (i, &x) in neigh.iter().enumerate() {
            for &y in &neigh[i + 1..] {
                if !adj[&x].contains(&y) {
                    add_edge(&mut adj, x, y);
                }
            }
        }
        for &x in &neigh {
            adj.get_mut(&x).unwrap().retain(|&y| y != v);
        }
        adj.remove(&v);
        remaining.retain(|&x| x != v);
        order.push(net.label_name(v).to_string());
    }
    order
}

fn add_edge(adj: &mut HashMap<LabelId, Vec<LabelId>>, a: LabelId, b: LabelId) {
    let ea = adj.get_mut(&a).unwrap();
    if !ea.contains(&b) {
        ea.push(b);
    }
    let eb = adj.get_mut(&b).unwrap();
    if !eb.contains(&a) {
        eb.push(a);
    }
}

/// Contract the whole network in the given label elimination order,
/// returning the resulting tensor (over the network's open labels, if
/// any). The session's global index order must already cover the
/// network's labels.
pub fn contract_to_tdd(
    net: &TensorNetwork,
    order: &[String],
    session: &TddSession,
) -> Result<Tdd> {
    struct Live {
        tdd: Tdd,
    }
    let mut live: Vec<Option<Live>> = Vec::with_capacity(net.tensors.len());
    for t in &net.tensors {
        let labels: Vec<&str> = t.labels.iter().map(|&l| net.label_name(l)).collect();
        let tdd = session.from_tensor(&t.data, &labels)?;
        live.push(Some(Live { tdd }));
    }
    // label name -> live tensor indices
    let mut holders: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, t) in net.tensors.iter().enumerate() {
        for &l in &t.labels {
            holders
                .entry(net.label_name(l).to_string())
                .or_default()
                .push(i);
        }
    }
    let mut next_slot = live.len();
    for label in order {
        let hs = match holders.get(label) {
            Some(h) => h.clone(),
            None => continue,
        };
        let alive: Vec<usize> = {
            let mut v: Vec<usize> = hs.iter().copied().filter(|&i| live[i].is_some()).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        if alive.len() < 2 {
            continue; // consumed earlier, or an open index
        }
        debug_assert_eq!(alive.len(), 2, "wire label on more than two tensors");
        let (ia, ib) = (alive[0], alive[1]);
        let a = live[ia].take().unwrap();
        let b = live[ib].take().unwrap();
        let shared: Vec<u32> = a
            .tdd
            .index_positions()
            .iter()
            .copied()
            .filter(|p| b.tdd.index_positions().binary_search(p).is_ok())
            .collect();
        let result = session.contract_pos(&a.tdd, &b.tdd, &shared);
        // register the merged tensor as the holder of its labels
        for l in result.index_labels() {
            holders.entry(l).or_default().push(next_slot);
        }
        live.push(Some(Live { tdd: result }));
        next_slot += 1;
    }
    // fold any remaining pieces (disconnected components, scalars)
    let mut rest: Vec<Tdd> = live.into_iter().flatten().map(|l| l.tdd).collect();
    let mut acc = match rest.pop() {
        Some(t) => t,
        None => session.from_tensor(&[ONE], &[])?,
    };
    for t in rest {
        let shared: Vec<u32> = acc
            .index_positions()
            .iter()
            .copied()
            .filter(|p| t.index_positions().binary_search(p).is_ok())
            .collect();
        acc = session.contract_pos(&acc, &t, &shared);
    }
    if net.scalar != ONE {
        let s = session.from_tensor(&[net.scalar], &[])?;
        acc = session.contract_pos(&acc, &s, &[]);
    }
    Ok(acc)
}

/// Contract a closed network to its scalar value with the default
/// (min-fill) order.
pub fn contract_value(net: &TensorNetwork, session: &TddSession) -> Result<Complex64> {
    let order = contraction_order(net);
    let t = contract_to_tdd(net, &order, session)?;
    t.scalar()
}

/// Convenience: fresh session with the order taken from the network.
pub fn session_for(net: &TensorNetwork) -> TddSession {
    let session = TddSession::new();
    session.set_order(&net.present_label_names());
    session
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_qft, noisy_qft2, random_circuit};
    use crate::dense::cr;
    use crate::oracle;
    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn trace_of_single_gate(name: &str) -> Complex64 {
        let mut c = Circuit::new(1).unwrap();
        c.push_named(name, vec![0], vec![]).unwrap();
        let mut net = circuit_to_network(&c, None).unwrap();
        net.close_trace();
        let session = session_for(&net);
        contract_value(&net, &session).unwrap()
    }

    #[test]
    fn trace_of_identity_circuit_is_dimension() {
        let c = Circuit::new(1).unwrap();
        let mut net = circuit_to_network(&c, None).unwrap();
        net.close_trace();
        let session = session_for(&net);
        assert_eq!(contract_value(&net, &session).unwrap(), cr(2.0));
    }

    #[test]
    fn traces_of_single_gates() {
        assert!((trace_of_single_gate("s") - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert!(trace_of_single_gate("h").norm() < 1e-12);
        assert!((trace_of_single_gate("x")).norm() < 1e-12);
    }

    #[test]
    fn open_network_matches_oracle_unitary() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..10 {
            let c = random_circuit(&mut rng, 3, 8);
            let net = circuit_to_network(&c, None).unwrap();
            let session = session_for(&net);
            let order = contraction_order(&net);
            let t = contract_to_tdd(&net, &order, &session).unwrap();
            let u = oracle::circuit_unitary(&c).unwrap();
            // boundary labels: wire outs (rows) and wire ins (columns)
            for row in 0..8usize {
                for col in 0..8usize {
                    let mut asg: Vec<(String, bool)> = Vec::new();
                    for q in 0..3 {
                        asg.push((
                            net.label_name(net.wire_out[q]).to_string(),
                            row >> (2 - q) & 1 == 1,
                        ));
                        asg.push((
                            net.label_name(net.wire_in[q]).to_string(),
                            col >> (2 - q) & 1 == 1,
                        ));
                    }
                    let asg_ref: Vec<(&str, bool)> =
                        asg.iter().map(|(s, b)| (s.as_str(), *b)).collect();
                    let got = t.eval(&asg_ref);
                    assert!(
                        (got - u.get(row, col)).norm() < 1e-10,
                        "entry ({row},{col})"
                    );
                }
            }
        }
    }

    #[test]
    fn missing_kraus_choice_is_rejected() {
        let (_, noisy) = noisy_qft2(0.9).unwrap();
        assert!(circuit_to_network(&noisy, None).is_err());
        assert!(circuit_to_network(&noisy, Some(&[0])).is_err());
        assert!(circuit_to_network(&noisy, Some(&[0, 5])).is_err());
        assert!(circuit_to_network(&noisy, Some(&[0, 0])).is_ok());
    }

    #[test]
    fn trace_miter_reproduces_the_4p_anchor() {
        let p: f64 = 0.95;
        let (ideal, noisy) = noisy_qft2(p).unwrap();
        // choice (0,0) selects √p·I for both channels
        let inst = circuit_to_network(&noisy, Some(&[0, 0])).unwrap();
        let miter = build_trace_miter(&ideal, inst).unwrap();
        let session = session_for(&miter);
        let v = contract_value(&miter, &session).unwrap();
        assert!((v - cr(4.0 * p)).norm() < 1e-12, "got {v}");
        // the other three choices contract to zero
        for choice in [[0, 1], [1, 0], [1, 1]] {
            let inst = circuit_to_network(&noisy, Some(&choice)).unwrap();
            let miter = build_trace_miter(&ideal, inst).unwrap();
            let session = session_for(&miter);
            let v = contract_value(&miter, &session).unwrap();
            assert!(v.norm() < 1e-12, "choice {choice:?} gave {v}");
        }
    }

    #[test]
    fn self_miter_contracts_to_dimension() {
        for n in [1, 2, 3] {
            let c = gen_qft(n).unwrap();
            let inst = circuit_to_network(&c, None).unwrap();
            let miter = build_trace_miter(&c, inst).unwrap();
            let session = session_for(&miter);
            let v = contract_value(&miter, &session).unwrap();
            assert!((v - cr(f64::powi(2.0, n as i32))).norm() < 1e-10);
        }
    }

    #[test]
    fn qubit_count_mismatch_rejected() {
        let a = gen_qft(2).unwrap();
        let b = gen_qft(3).unwrap();
        let inst = circuit_to_network(&b, None).unwrap();
        assert!(build_trace_miter(&a, inst).is_err());
        assert!(build_doubled_miter(&a, &b).is_err());
    }

    #[test]
    fn doubled_miter_reproduces_16p2() {
        for p in [0.5, 0.95, 0.999] {
            let (ideal, noisy) = noisy_qft2(p).unwrap();
            let net = build_doubled_miter(&ideal, &noisy).unwrap();
            let session = session_for(&net);
            let v = contract_value(&net, &session).unwrap();
            assert!(
                (v - cr(16.0 * p * p)).norm() < 1e-9,
                "p={p}: got {v}, want {}",
                16.0 * p * p
            );
        }
    }

    #[test]
    fn doubled_miter_of_identical_circuits_is_d_squared() {
        for n in [1, 2, 3] {
            let c = gen_qft(n).unwrap();
            let net = build_doubled_miter(&c, &c).unwrap();
            let session = session_for(&net);
            let v = contract_value(&net, &session).unwrap();
            let d = f64::powi(2.0, n as i32);
            assert!((v - cr(d * d)).norm() < 1e-9);
        }
    }

    #[test]
    fn doubled_miter_matches_kraus_enumeration_oracle() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..5 {
            let c = random_circuit(&mut rng, 3, 10);
            let spec = crate::circuit::random_noise_spec(&mut rng, &c, 2, "depolarizing", 0.9);
            let noisy = crate::circuit::insert_noise(&c, &spec).unwrap();
            let net = build_doubled_miter(&c, &noisy).unwrap();
            let session = session_for(&net);
            let v = contract_value(&net, &session).unwrap();
            let want: f64 = oracle::enumerate_kraus(&noisy)
                .unwrap()
                .iter()
                .map(|e| {
                    let u = oracle::circuit_unitary(&c).unwrap();
                    u.overlap_trace(e).norm_sqr()
                })
                .sum();
            assert!((v - cr(want)).norm() < 1e-9, "got {v}, want {want}");
        }
    }

    #[test]
    fn optimize_fig7_removes_swaps_and_hadamards() {
        let p = 0.9;
        let (ideal, noisy) = noisy_qft2(p).unwrap();
        for choice in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let inst = circuit_to_network(&noisy, Some(&choice)).unwrap();
            let miter = build_trace_miter(&ideal, inst).unwrap();
            let session = session_for(&miter);
            let plain = contract_value(&miter, &session).unwrap();

            let before = miter.num_tensors();
            let opt = optimize(miter.clone(), OptimizeOptions::default());
            assert!(opt.num_tensors() < before);
            // both SWAPs eliminated, all four H gates cancelled
            let gates: Vec<&str> = opt
                .tensors
                .iter()
                .filter_map(|t| match &t.kind {
                    TensorKind::Gate { label, .. } => Some(label.as_str()),
                    _ => None,
                })
                .collect();
            assert!(!gates.iter().any(|g| g.starts_with("swap")));
            assert!(!gates.iter().any(|g| g.starts_with('h')));
            assert_eq!(gates.len(), 2, "S and S† blocks remain: {gates:?}");

            let session = session_for(&opt);
            let v = contract_value(&opt, &session).unwrap();
            assert!((v - plain).norm() < 1e-12);
        }
    }

    #[test]
    fn optimize_leaves_irreducible_networks_alone() {
        let mut c = Circuit::new(2).unwrap();
        c.push_named("cx", vec![0, 1], vec![]).unwrap();
        c.push_named("t", vec![0], vec![]).unwrap();
        let mut net = circuit_to_network(&c, None).unwrap();
        net.close_trace();
        let n_before = net.num_tensors();
        let opt = optimize(net, OptimizeOptions::default());
        // cups may be smoothed away, but no gate disappears
        let gates = |n: &TensorNetwork| {
            n.tensors
                .iter()
                .filter(|t| matches!(t.kind, TensorKind::Gate { .. }))
                .count()
        };
        assert_eq!(gates(&opt), 2);
        assert!(opt.num_tensors() <= n_before);
    }

    #[test]
    fn optimized_random_miters_agree_with_plain_contraction() {
        let mut rng = StdRng::seed_from_u64(77);
        for trial in 0..20 {
            let c = random_circuit(&mut rng, 3, 12);
            let spec = crate::circuit::random_noise_spec(&mut rng, &c, 1, "bit_flip", 0.8);
            let noisy = crate::circuit::insert_noise(&c, &spec).unwrap();
            let inst = circuit_to_network(&noisy, Some(&[0])).unwrap();
            let miter = build_trace_miter(&c, inst).unwrap();

            let session = session_for(&miter);
            let plain = contract_value(&miter, &session).unwrap();

            let opt = optimize(miter, OptimizeOptions::default());
            let session = session_for(&opt);
            let v = contract_value(&opt, &session).unwrap();
            assert!((v - plain).norm() < 1e-10, "trial {trial}: {v} vs {plain}");
        }
    }

    #[test]
    fn contraction_order_of_two_tensor_network_starts_with_shared_label() {
        let mut c = Circuit::new(1).unwrap();
        c.push_named("h", vec![0], vec![]).unwrap();
        c.push_named("h", vec![0], vec![]).unwrap();
        let net = circuit_to_network(&c, None).unwrap();
        let order = contraction_order(&net);
        assert_eq!(order, ["q0.1"]);
    }

    #[test]
    fn contraction_value_is_order_independent() {
        let mut rng = StdRng::seed_from_u64(123);
        for _ in 0..10 {
            let c = random_circuit(&mut rng, 2, 6);
            let inst = circuit_to_network(&c, None).unwrap();
            let miter = build_trace_miter(&c, inst).unwrap();
            let session = session_for(&miter);
            let reference = contract_value(&miter, &session).unwrap();
            for _ in 0..3 {
                let mut order = contraction_order(&miter);
                order.shuffle(&mut rng);
                let session = session_for(&miter);
                let t = contract_to_tdd(&miter, &order, &session).unwrap();
                let v = t.scalar().unwrap();
                assert!((v - reference).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn ideal_trace_bounded_by_dimension() {
        let mut rng = StdRng::seed_from_u64(55);
        for _ in 0..10 {
            let c = random_circuit(&mut rng, 3, 10);
            let inst = circuit_to_network(&c, None).unwrap();
            let miter = build_trace_miter(&c, inst).unwrap();
            let session = session_for(&miter);
            let v = contract_value(&miter, &session).unwrap();
            assert!(v.norm() <= 8.0 + 1e-9);
        }
    }
}
