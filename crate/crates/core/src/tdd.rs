//! Tensor decision diagrams: reduced, normalized, edge-weighted DAGs over
//! binary indices, with hash-consed nodes, a shared computed table and
//! sum/contraction operations.
//!
//! A session owns the node arena, the unique table and the computed table.
//! Sessions are single-threaded; parallel callers use separate sessions.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::rc::Rc;

use num_complex::Complex64;

use crate::dense::{ONE, ZERO};
use crate::error::{Error, Result};

type NodeId = u32;
type VarPos = u32;

const TERMINAL: NodeId = 0;
const NO_VAR: VarPos = u32::MAX;

/// Default live-node threshold that triggers a mark-and-sweep.
pub const DEFAULT_GC_THRESHOLD: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    w: Complex64,
    node: NodeId,
}

impl Edge {
    const ZERO: Edge = Edge {
        w: ZERO,
        node: TERMINAL,
    };

    fn terminal(w: Complex64) -> Edge {
        Edge { w, node: TERMINAL }
    }

    fn is_zero(&self) -> bool {
        self.w == ZERO
    }
}

#[derive(Debug, Clone)]
struct Node {
    var: VarPos,
    low: Edge,
    high: Edge,
}

/// Weights are rounded to 12 decimal digits when used as hash keys; stored
/// weights stay unrounded.
fn round12(x: f64) -> f64 {
    let y = (x * 1e12).round() / 1e12;
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn wkey(w: Complex64) -> (u64, u64) {
    (round12(w.re).to_bits(), round12(w.im).to_bits())
}

type NodeKey = (VarPos, NodeId, (u64, u64), NodeId, (u64, u64));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum OpKey {
    Add(NodeId, NodeId, (u64, u64)),
    Contract(NodeId, NodeId, u32, u32),
}

#[derive(Debug)]
struct RootEntry {
    edge: Edge,
}

struct SessionInner {
    nodes: Vec<Node>,
    free: Vec<NodeId>,
    unique: HashMap<NodeKey, NodeId>,
    computed: HashMap<OpKey, Edge>,
    order: Vec<String>,
    pos_of: HashMap<String, VarPos>,
    sum_sets: Vec<Vec<VarPos>>,
    sum_set_ids: HashMap<Vec<VarPos>, u32>,
    roots: Vec<Option<RootEntry>>,
    free_roots: Vec<usize>,
    peak_nodes: usize,
    gc_threshold: usize,
    gc_runs: usize,
    visit_mark: Vec<u32>,
    visit_epoch: u32,
    visit_stack: Vec<NodeId>,
}

impl SessionInner {
    fn live_nodes(&self) -> usize {
        self.nodes.len() - 1 - self.free.len()
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    fn var_of(&self, id: NodeId) -> VarPos {
        if id == TERMINAL {
            NO_VAR
        } else {
            self.node(id).var
        }
    }

    fn alloc(&mut self, node: Node) -> NodeId {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as NodeId
        }
    }

    /// Get-or-create a canonical node. Applies the reduction rule (equal
    /// children collapse into the shared edge) and the normalization rule
    /// (the larger-magnitude outgoing weight becomes exactly 1, ties
    /// normalizing the low edge).
    fn mknode(&mut self, var: VarPos, low: Edge, high: Edge) -> Edge {
        let low = if low.is_zero() { Edge::ZERO } else { low };
        let high = if high.is_zero() { Edge::ZERO } else { high };
        if low == high {
            return low;
        }
        let (norm, nlow, nhigh) = if low.w.norm_sqr() >= high.w.norm_sqr() {
            (low.w, ONE, high.w / low.w)
        } else {
            (high.w, low.w / high.w, ONE)
        };
        let nlow = Edge {
            w: nlow,
            node: low.node,
        };
        let nhigh = Edge {
            w: nhigh,
            node: high.node,
        };
        let key: NodeKey = (var, nlow.node, wkey(nlow.w), nhigh.node, wkey(nhigh.w));
        let id = match self.unique.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.alloc(Node {
                    var,
                    low: nlow,
                    high: nhigh,
                });
                self.unique.insert(key, id);
                id
            }
        };
        Edge { w: norm, node: id }
    }

    /// Cofactor of an edge at variable `v`: the pair of sub-edges obtained
    /// by fixing `v` to 0 and 1. Edges independent of `v` are their own
    /// cofactors.
    fn cofactor(&self, e: Edge, v: VarPos) -> (Edge, Edge) {
        if e.node == TERMINAL || self.node(e.node).var != v {
            (e, e)
        } else {
            let n = self.node(e.node);
            let lo = Edge {
                w: e.w * n.low.w,
                node: n.low.node,
            };
            let hi = Edge {
                w: e.w * n.high.w,
                node: n.high.node,
            };
            (
                if lo.is_zero() { Edge::ZERO } else { lo },
                if hi.is_zero() { Edge::ZERO } else { hi },
            )
        }
    }

    fn add(&mut self, a: Edge, b: Edge) -> Edge {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.node == TERMINAL && b.node == TERMINAL {
            return Edge::terminal(a.w + b.w);
        }
        // cache on weight-normalized operands: add(a,b) = a.w * add'(a/|, b/|)
        let (x, y) = if a.node <= b.node { (a, b) } else { (b, a) };
        let ratio = y.w / x.w;
        let key = OpKey::Add(x.node, y.node, wkey(ratio));
        if let Some(&hit) = self.computed.get(&key) {
            return Edge {
                w: hit.w * x.w,
                node: hit.node,
            };
        }
        let xe = Edge { w: ONE, node: x.node };
        let ye = Edge {
            w: ratio,
            node: y.node,
        };
        let v = self.var_of(x.node).min(self.var_of(y.node));
        let (x0, x1) = self.cofactor(xe, v);
        let (y0, y1) = self.cofactor(ye, v);
        let lo = self.add(x0, y0);
        let hi = self.add(x1, y1);
        let res = self.mknode(v, lo, hi);
        self.computed.insert(key, res);
        Edge {
            w: res.w * x.w,
            node: res.node,
        }
    }

    fn sum_set_id(&mut self, set: Vec<VarPos>) -> u32 {
        if let Some(&id) = self.sum_set_ids.get(&set) {
            return id;
        }
        let id = self.sum_sets.len() as u32;
        self.sum_sets.push(set.clone());
        self.sum_set_ids.insert(set, id);
        id
    }

    /// Contraction of two edges, summing over the variables of the interned
    /// set `set_id` starting at `offset`. Variables shared by both operands
    /// but absent from the set are combined pointwise.
    fn contract(&mut self, a: Edge, b: Edge, set_id: u32, offset: u32) -> Edge {
        if a.is_zero() || b.is_zero() {
            return Edge::ZERO;
        }
        let scale = a.w * b.w;
        let res = self.contract_nodes(a.node, b.node, set_id, offset);
        Edge {
            w: res.w * scale,
            node: res.node,
        }
    }

    fn contract_nodes(&mut self, an: NodeId, bn: NodeId, set_id: u32, offset: u32) -> Edge {
        let remaining = self.sum_sets[set_id as usize].len() as u32 - offset;
        if an == TERMINAL && bn == TERMINAL {
            // every remaining summed variable appears in neither operand
            return Edge::terminal(Complex64::new(f64::powi(2.0, remaining as i32), 0.0));
        }
        let key = OpKey::Contract(an.min(bn), an.max(bn), set_id, offset);
        if let Some(&hit) = self.computed.get(&key) {
            return hit;
        }
        let va = self.var_of(an);
        let vb = self.var_of(bn);
        let vs = if remaining > 0 {
            self.sum_sets[set_id as usize][offset as usize]
        } else {
            NO_VAR
        };
        let v = va.min(vb).min(vs);
        debug_assert!(v != NO_VAR);

        let ae = Edge { w: ONE, node: an };
        let be = Edge { w: ONE, node: bn };
        let res = if v == vs {
            if va != v && vb != v {
                let inner = self.contract_nodes(an, bn, set_id, offset + 1);
                Edge {
                    w: inner.w * 2.0,
                    node: inner.node,
                }
            } else {
                let (a0, a1) = self.cofactor(ae, v);
                let (b0, b1) = self.cofactor(be, v);
                let lo = self.contract(a0, b0, set_id, offset + 1);
                let hi = self.contract(a1, b1, set_id, offset + 1);
                self.add(lo, hi)
            }
        } else {
            let (a0, a1) = self.cofactor(ae, v);
            let (b0, b1) = self.cofactor(be, v);
            let lo = self.contract(a0, b0, set_id, offset);
            let hi = self.contract(a1, b1, set_id, offset);
            self.mknode(v, lo, hi)
        };
        self.computed.insert(key, res);
        res
    }

    fn count_reachable(&mut self, edge: Edge) -> usize {
        if edge.node == TERMINAL {
            return 0;
        }
        self.visit_mark.resize(self.nodes.len(), 0);
        self.visit_epoch += 1;
        let epoch = self.visit_epoch;
        let mut count = 0;
        let mut stack = std::mem::take(&mut self.visit_stack);
        stack.clear();
        stack.push(edge.node);
        while let Some(id) = stack.pop() {
            if id == TERMINAL || self.visit_mark[id as usize] == epoch {
                continue;
            }
            self.visit_mark[id as usize] = epoch;
            count += 1;
            let n = &self.nodes[id as usize];
            stack.push(n.low.node);
            stack.push(n.high.node);
        }
        self.visit_stack = stack;
        count
    }

    fn note_result(&mut self, edge: Edge) {
        let count = self.count_reachable(edge);
        if count > self.peak_nodes {
            self.peak_nodes = count;
        }
    }

    fn register_root(&mut self, edge: Edge) -> usize {
        let entry = RootEntry { edge };
        if let Some(slot) = self.free_roots.pop() {
            self.roots[slot] = Some(entry);
            slot
        } else {
            self.roots.push(Some(entry));
            self.roots.len() - 1
        }
    }

    fn release_root(&mut self, slot: usize) {
        self.roots[slot] = None;
        self.free_roots.push(slot);
    }

    /// Mark-and-sweep over registered roots. The computed table is dropped
    /// wholesale; entries may reference dead nodes.
    fn collect_garbage(&mut self) {
        let mut alive = vec![false; self.nodes.len()];
        alive[TERMINAL as usize] = true;
        let mut stack: Vec<NodeId> = self
            .roots
            .iter()
            .flatten()
            .map(|r| r.edge.node)
            .collect();
        while let Some(id) = stack.pop() {
            if alive[id as usize] {
                continue;
            }
            alive[id as usize] = true;
            let n = self.node(id);
            stack.push(n.low.node);
            stack.push(n.high.node);
        }
        self.unique.retain(|_, &mut id| alive[id as usize]);
        self.computed.clear();
        let already_free: HashSet<NodeId> = self.free.iter().copied().collect();
        for id in 1..self.nodes.len() as NodeId {
            if !alive[id as usize] && !already_free.contains(&id) {
                self.free.push(id);
            }
        }
        self.gc_runs += 1;
    }

    fn maybe_gc(&mut self) {
        if self.live_nodes() > self.gc_threshold {
            self.collect_garbage();
        }
    }

    fn eval(&self, edge: Edge, assignment: &dyn Fn(VarPos) -> bool) -> Complex64 {
        let mut w = edge.w;
        let mut id = edge.node;
        while id != TERMINAL {
            let n = self.node(id);
            let e = if assignment(n.var) { n.high } else { n.low };
            w *= e.w;
            id = e.node;
        }
        w
    }
}

/// A TDD engine session: node store, unique table and computed table.
pub struct TddSession {
    inner: Rc<RefCell<SessionInner>>,
}

impl Default for TddSession {
    fn default() -> Self {
        Self::new()
    }
}

impl TddSession {
    pub fn new() -> TddSession {
        TddSession {
            inner: Rc::new(RefCell::new(SessionInner {
                nodes: vec![Node {
                    var: NO_VAR,
                    low: Edge::ZERO,
                    high: Edge::ZERO,
                }],
                free: Vec::new(),
                unique: HashMap::new(),
                computed: HashMap::new(),
                order: Vec::new(),
                pos_of: HashMap::new(),
                sum_sets: Vec::new(),
                sum_set_ids: HashMap::new(),
                roots: Vec::new(),
                free_roots: Vec::new(),
                peak_nodes: 0,
                gc_threshold: DEFAULT_GC_THRESHOLD,
                gc_runs: 0,
                visit_mark: Vec::new(),
                visit_epoch: 0,
                visit_stack: Vec::new(),
            })),
        }
    }

    /// Fix the global index order. Must be called before any TDD is built.
    pub fn set_order<S: AsRef<str>>(&self, labels: &[S]) {
        let mut inner = self.inner.borrow_mut();
        assert!(
            inner.nodes.len() == 1,
            "index order must be fixed before TDDs are built"
        );
        inner.order = labels.iter().map(|s| s.as_ref().to_string()).collect();
        inner.pos_of = inner
            .order
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as VarPos))
            .collect();
    }

    pub fn position(&self, label: &str) -> Result<u32> {
        self.inner
            .borrow()
            .pos_of
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn wrap(&self, edge: Edge, index_set: Vec<VarPos>) -> Tdd {
        let mut inner = self.inner.borrow_mut();
        inner.note_result(edge);
        let slot = inner.register_root(edge);
        drop(inner);
        Tdd {
            sess: Rc::clone(&self.inner),
            slot,
            index_set,
        }
    }

    /// Build a TDD from a dense tensor. `labels` name the tensor's axes in
    /// entry order (first label owns the most-significant bit of the entry
    /// index); entries must have length 2^labels.len().
    pub fn from_tensor(&self, entries: &[Complex64], labels: &[&str]) -> Result<Tdd> {
        let k = labels.len();
        assert_eq!(entries.len(), 1 << k, "entry count must be 2^k");
        let mut positions = Vec::with_capacity(k);
        for l in labels {
            positions.push(self.position(l)?);
        }
        {
            let mut sorted = positions.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), k, "labels must be distinct");
        }
        // permute entries into global-order axes
        let mut axis_order: Vec<usize> = (0..k).collect();
        axis_order.sort_by_key(|&i| positions[i]);
        let sorted_positions: Vec<VarPos> = axis_order.iter().map(|&i| positions[i]).collect();
        let mut permuted = vec![ZERO; entries.len()];
        for (dst, slot) in permuted.iter_mut().enumerate() {
            let mut src = 0usize;
            for (bit, &axis) in axis_order.iter().enumerate() {
                if dst >> (k - 1 - bit) & 1 == 1 {
                    src |= 1 << (k - 1 - axis);
                }
            }
            *slot = entries[src];
        }
        self.inner.borrow_mut().maybe_gc();
        let edge = {
            let mut inner = self.inner.borrow_mut();
            build_rec(&mut inner, &sorted_positions, &permuted)
        };
        Ok(self.wrap(edge, sorted_positions))
    }

    /// Element-wise sum; index sets may differ (missing indices broadcast).
    pub fn add(&self, a: &Tdd, b: &Tdd) -> Tdd {
        self.check_session(a);
        self.check_session(b);
        self.inner.borrow_mut().maybe_gc();
        let edge = {
            let mut inner = self.inner.borrow_mut();
            let (ea, eb) = (inner.roots[a.slot].as_ref().unwrap().edge, {
                inner.roots[b.slot].as_ref().unwrap().edge
            });
            inner.add(ea, eb)
        };
        let set = union_sorted(&a.index_set, &b.index_set);
        self.wrap(edge, set)
    }

    /// Contract over `shared` (summed) indices. `shared` must be contained
    /// in both operands' index sets; all other common indices are combined
    /// pointwise.
    pub fn contract(&self, a: &Tdd, b: &Tdd, shared: &[&str]) -> Tdd {
        let positions: Vec<VarPos> = shared
            .iter()
            .map(|l| self.position(l).expect("shared label in order"))
            .collect();
        self.contract_pos(a, b, &positions)
    }

    pub(crate) fn contract_pos(&self, a: &Tdd, b: &Tdd, shared: &[VarPos]) -> Tdd {
        self.check_session(a);
        self.check_session(b);
        let mut sum: Vec<VarPos> = shared.to_vec();
        sum.sort_unstable();
        sum.dedup();
        for v in &sum {
            assert!(
                a.index_set.binary_search(v).is_ok() && b.index_set.binary_search(v).is_ok(),
                "summed index must appear in both operands"
            );
        }
        self.inner.borrow_mut().maybe_gc();
        let edge = {
            let mut inner = self.inner.borrow_mut();
            let ea = inner.roots[a.slot].as_ref().unwrap().edge;
            let eb = inner.roots[b.slot].as_ref().unwrap().edge;
            let set_id = inner.sum_set_id(sum.clone());
            inner.contract(ea, eb, set_id, 0)
        };
        let mut set = union_sorted(&a.index_set, &b.index_set);
        set.retain(|v| sum.binary_search(v).is_err());
        self.wrap(edge, set)
    }

    fn check_session(&self, t: &Tdd) {
        assert!(
            Rc::ptr_eq(&self.inner, &t.sess),
            "TDD used with a foreign session"
        );
    }

    /// Clear the computed table (cold-table mode does this between trace
    /// terms). Unique table and nodes are untouched; results are identical
    /// either way.
    pub fn reset_computed_table(&self) {
        self.inner.borrow_mut().computed.clear();
    }

    pub fn computed_table_len(&self) -> usize {
        self.inner.borrow().computed.len()
    }

    /// Maximum node count over all TDDs produced in this session.
    pub fn peak_node_count(&self) -> usize {
        self.inner.borrow().peak_nodes
    }

    pub fn live_node_count(&self) -> usize {
        self.inner.borrow().live_nodes()
    }

    pub fn set_gc_threshold(&self, threshold: usize) {
        self.inner.borrow_mut().gc_threshold = threshold;
    }

    pub fn gc_runs(&self) -> usize {
        self.inner.borrow().gc_runs
    }

    /// Walk the DAG checking the ordered/reduced/normalized/unique
    /// invariants.
    pub fn validate(&self, t: &Tdd) -> Result<()> {
        let inner = self.inner.borrow();
        let root = inner.roots[t.slot].as_ref().unwrap().edge;
        let mut seen = HashSet::new();
        let mut keys = HashSet::new();
        let mut stack = vec![root.node];
        if root.w == ZERO && root.node != TERMINAL {
            return Err(Error::Internal("zero edge targets a non-terminal".into()));
        }
        while let Some(id) = stack.pop() {
            if id == TERMINAL || !seen.insert(id) {
                continue;
            }
            let n = inner.node(id);
            for child in [n.low, n.high] {
                if child.node != TERMINAL {
                    let cv = inner.node(child.node).var;
                    if cv <= n.var {
                        return Err(Error::Internal("child variable not below parent".into()));
                    }
                }
                if child.w == ZERO && child.node != TERMINAL {
                    return Err(Error::Internal("zero-weight edge to non-terminal".into()));
                }
            }
            if n.low == n.high {
                return Err(Error::Internal("redundant node (low == high)".into()));
            }
            if n.low.w != ONE && n.high.w != ONE {
                return Err(Error::Internal("no outgoing weight normalized to 1".into()));
            }
            if n.low.w.norm_sqr() > 1.0 + 1e-9 || n.high.w.norm_sqr() > 1.0 + 1e-9 {
                return Err(Error::Internal("outgoing weight above unit magnitude".into()));
            }
            let key: NodeKey = (n.var, n.low.node, wkey(n.low.w), n.high.node, wkey(n.high.w));
            if !keys.insert(key) {
                return Err(Error::Internal("duplicate node key (uniqueness)".into()));
            }
            stack.push(n.low.node);
            stack.push(n.high.node);
        }
        Ok(())
    }

    /// DOT-format dump for inspection.
    pub fn to_dot(&self, t: &Tdd) -> String {
        let inner = self.inner.borrow();
        let root = inner.roots[t.slot].as_ref().unwrap().edge;
        let mut s = String::from("digraph tdd {\n");
        writeln!(s, "  root [shape=point];").unwrap();
        writeln!(
            s,
            "  root -> n{} [label=\"{:.6}{:+.6}i\"];",
            root.node, root.w.re, root.w.im
        )
        .unwrap();
        writeln!(s, "  n0 [label=\"1\", shape=box];").unwrap();
        let mut seen = HashSet::new();
        let mut stack = vec![root.node];
        while let Some(id) = stack.pop() {
            if id == TERMINAL || !seen.insert(id) {
                continue;
            }
            let n = inner.node(id);
            let name = inner
                .order
                .get(n.var as usize)
                .cloned()
                .unwrap_or_else(|| format!("v{}", n.var));
            writeln!(s, "  n{} [label=\"{}\"];", id, name).unwrap();
            for (e, style) in [(n.low, "dashed"), (n.high, "solid")] {
                writeln!(
                    s,
                    "  n{} -> n{} [style={}, label=\"{:.6}{:+.6}i\"];",
                    id, e.node, style, e.w.re, e.w.im
                )
                .unwrap();
                stack.push(e.node);
            }
        }
        s.push_str("}\n");
        s
    }
}

fn build_rec(inner: &mut SessionInner, vars: &[VarPos], entries: &[Complex64]) -> Edge {
    if entries.len() == 1 {
        return if entries[0] == ZERO {
            Edge::ZERO
        } else {
            Edge::terminal(entries[0])
        };
    }
    let half = entries.len() / 2;
    let lo = build_rec(inner, &vars[1..], &entries[..half]);
    let hi = build_rec(inner, &vars[1..], &entries[half..]);
    inner.mknode(vars[0], lo, hi)
}

fn union_sorted(a: &[VarPos], b: &[VarPos]) -> Vec<VarPos> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A tensor held as an edge into a session's node store.
pub struct Tdd {
    sess: Rc<RefCell<SessionInner>>,
    slot: usize,
    index_set: Vec<VarPos>,
}

impl Clone for Tdd {
    fn clone(&self) -> Self {
        let mut inner = self.sess.borrow_mut();
        let edge = inner.roots[self.slot].as_ref().unwrap().edge;
        let slot = inner.register_root(edge);
        drop(inner);
        Tdd {
            sess: Rc::clone(&self.sess),
            slot,
            index_set: self.index_set.clone(),
        }
    }
}

impl Drop for Tdd {
    fn drop(&mut self) {
        self.sess.borrow_mut().release_root(self.slot);
    }
}

impl Tdd {
    /// Scalar value of a fully contracted tensor.
    pub fn scalar(&self) -> Result<Complex64> {
        if !self.index_set.is_empty() {
            return Err(Error::NotScalar);
        }
        let inner = self.sess.borrow();
        let edge = inner.roots[self.slot].as_ref().unwrap().edge;
        debug_assert_eq!(edge.node, TERMINAL);
        Ok(edge.w)
    }

    /// Number of distinct non-terminal nodes reachable from the root.
    pub fn node_count(&self) -> usize {
        let mut inner = self.sess.borrow_mut();
        let edge = inner.roots[self.slot].as_ref().unwrap().edge;
        inner.count_reachable(edge)
    }

    /// Index labels this tensor is defined over, in global order.
    pub fn index_labels(&self) -> Vec<String> {
        let inner = self.sess.borrow();
        self.index_set
            .iter()
            .map(|&v| inner.order[v as usize].clone())
            .collect()
    }

    pub(crate) fn index_positions(&self) -> &[VarPos] {
        &self.index_set
    }

    /// Entry of the tensor at the given index assignment. All labels in the
    /// index set must be assigned.
    pub fn eval(&self, assignment: &[(&str, bool)]) -> Complex64 {
        let inner = self.sess.borrow();
        let map: HashMap<VarPos, bool> = assignment
            .iter()
            .map(|(l, b)| (*inner.pos_of.get(*l).expect("label in order"), *b))
            .collect();
        let edge = inner.roots[self.slot].as_ref().unwrap().edge;
        inner.eval(edge, &|v| *map.get(&v).expect("assignment covers index set"))
    }
}
