//! Enumeration of execution traces.
//!
//! A trace resolves every exclusive choice, unrolls each cycle a bounded
//! number of times and expands every parallel block into all
//! order-preserving interleavings of its branches. Parallel blocks must be
//! structured: each parallel split has a parallel join that is its
//! immediate post-dominator, with as many incoming flows as the split has
//! outgoing ones, and no branch may leave the block.

use std::cell::Cell;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Limit, TraceError};
use crate::process::{NodeKind, ProcessGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationConfig {
    /// Maximum number of times the body of a cycle runs in one trace.
    pub max_loop: usize,
    /// Maximum interleavings of a single parallel block.
    pub max_interleavings: usize,
    pub max_traces: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            max_loop: 2,
            max_interleavings: 1000,
            max_traces: 10_000,
        }
    }
}

impl EnumerationConfig {
    pub fn validate(&self) -> Result<(), TraceError> {
        for (name, v) in [
            ("max_loop", self.max_loop),
            ("max_interleavings", self.max_interleavings),
            ("max_traces", self.max_traces),
        ] {
            if v == 0 {
                return Err(TraceError::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// One decision taken while walking the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Choice {
    /// Exclusive gateway `gateway` continued to node `target`.
    Xor { gateway: String, target: String },
    /// Parallel block opened by `gateway` ran its branches in this order;
    /// each entry is a branch index (document order of outgoing flows).
    Interleave { gateway: String, order: Vec<usize> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OriginPath {
    pub choices: Vec<Choice>,
    /// Back-edge flow id to the number of times it was taken.
    pub loops: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TaskRef {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Trace {
    pub steps: Vec<TaskRef>,
    pub origin: OriginPath,
}

impl Trace {
    pub fn task_ids(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Every trace of `graph`, ordered by origin path.
pub fn enumerate_traces(
    graph: &ProcessGraph,
    cfg: &EnumerationConfig,
) -> Result<Vec<Trace>, TraceError> {
    let walker = Walker::new(graph, cfg)?;
    let mut out = Vec::new();
    let start = Partial {
        steps: Vec::new(),
        choices: Vec::new(),
        loops: vec![0; walker.back_edges.len()],
    };
    walker.walk(graph.start(), None, start, &mut out)?;
    let mut traces: Vec<Trace> = out.into_iter().map(|p| walker.finish(p)).collect();
    traces.sort_by(|a, b| a.origin.cmp(&b.origin));
    Ok(traces)
}

/// Number of traces `enumerate_traces` would return, computed without
/// building them.
pub fn count_traces(graph: &ProcessGraph, cfg: &EnumerationConfig) -> Result<u128, TraceError> {
    let walker = Walker::new(graph, cfg)?;
    let dist = walker.count(graph.start(), None, 0, vec![0; walker.back_edges.len()])?;
    let total = dist.values().fold(0u128, |a, &c| a.saturating_add(c));
    if total > cfg.max_traces as u128 {
        return Err(TraceError::ExplosionLimit {
            limit_kind: Limit::Traces,
            reached: total,
            limit: cfg.max_traces,
        });
    }
    Ok(total)
}

#[derive(Debug, Clone)]
struct Partial {
    steps: Vec<usize>,
    choices: Vec<Choice>,
    loops: Vec<u32>,
}

/// Completion count keyed by (steps so far, back-edge counters).
type Dist = BTreeMap<(usize, Vec<u32>), u128>;
type DistEntry = ((usize, Vec<u32>), u128);

struct Walker<'g> {
    g: &'g ProcessGraph,
    cfg: EnumerationConfig,
    /// Edge index to back-edge slot.
    back_of_edge: Vec<Option<usize>>,
    back_edges: Vec<usize>,
    join_of: HashMap<usize, usize>,
    completed: Cell<u128>,
}

impl<'g> Walker<'g> {
    fn new(g: &'g ProcessGraph, cfg: &EnumerationConfig) -> Result<Self, TraceError> {
        cfg.validate()?;
        let back_edges = find_back_edges(g);
        let mut back_of_edge = vec![None; g.edges().len()];
        for (slot, &e) in back_edges.iter().enumerate() {
            back_of_edge[e] = Some(slot);
        }
        let join_of = match_parallel_blocks(g)?;
        Ok(Self {
            g,
            cfg: *cfg,
            back_of_edge,
            back_edges,
            join_of,
            completed: Cell::new(0),
        })
    }

    fn id(&self, node: usize) -> &str {
        &self.g.node(node).id
    }

    /// Follows `edge`, bumping its loop counter if it is a back edge.
    /// Returns `None` once the loop bound is used up.
    fn take(&self, edge: usize, loops: &mut [u32]) -> Option<usize> {
        if let Some(slot) = self.back_of_edge[edge] {
            if loops[slot] as usize + 1 >= self.cfg.max_loop {
                return None;
            }
            loops[slot] += 1;
        }
        Some(self.g.edges()[edge].to)
    }

    fn single_out(&self, node: usize) -> usize {
        self.g.outgoing(node)[0]
    }

    fn unstructured_join(&self, node: usize) -> TraceError {
        TraceError::UnstructuredParallelism(format!(
            "parallel join {} reached outside its block",
            self.id(node)
        ))
    }

    fn walk(
        &self,
        mut node: usize,
        stop: Option<usize>,
        mut p: Partial,
        out: &mut Vec<Partial>,
    ) -> Result<(), TraceError> {
        loop {
            if Some(node) == stop {
                out.push(p);
                return Ok(());
            }
            match &self.g.node(node).kind {
                NodeKind::End => {
                    if stop.is_some() {
                        return Err(TraceError::UnstructuredParallelism(format!(
                            "end event {} reached inside a parallel block",
                            self.id(node)
                        )));
                    }
                    let done = self.completed.get() + 1;
                    self.completed.set(done);
                    if done > self.cfg.max_traces as u128 {
                        return Err(TraceError::ExplosionLimit {
                            limit_kind: Limit::Traces,
                            reached: done,
                            limit: self.cfg.max_traces,
                        });
                    }
                    out.push(p);
                    return Ok(());
                }
                NodeKind::Task { .. } | NodeKind::Start | NodeKind::XorJoin => {
                    if matches!(self.g.node(node).kind, NodeKind::Task { .. }) {
                        p.steps.push(node);
                    }
                    match self.take(self.single_out(node), &mut p.loops) {
                        Some(next) => node = next,
                        None => return Ok(()),
                    }
                }
                NodeKind::AndJoin => return Err(self.unstructured_join(node)),
                NodeKind::XorSplit => {
                    for &e in self.g.outgoing(node) {
                        let mut q = p.clone();
                        if let Some(next) = self.take(e, &mut q.loops) {
                            q.choices.push(Choice::Xor {
                                gateway: self.id(node).to_string(),
                                target: self.id(next).to_string(),
                            });
                            self.walk(next, stop, q, out)?;
                        }
                    }
                    return Ok(());
                }
                NodeKind::AndSplit => {
                    let join = self.join_of[&node];
                    let mut branches = Vec::new();
                    for &e in self.g.outgoing(node) {
                        let mut results = Vec::new();
                        let inner = Partial {
                            steps: Vec::new(),
                            choices: Vec::new(),
                            loops: p.loops.clone(),
                        };
                        self.walk(self.g.edges()[e].to, Some(join), inner, &mut results)?;
                        branches.push(results);
                    }
                    let after = self.single_out(join);
                    for combo in cartesian(&branches) {
                        let lens: Vec<usize> = combo.iter().map(|b| b.steps.len()).collect();
                        let n = multinomial(&lens);
                        if n > self.cfg.max_interleavings as u128 {
                            return Err(TraceError::ExplosionLimit {
                                limit_kind: Limit::Interleavings,
                                reached: n,
                                limit: self.cfg.max_interleavings,
                            });
                        }
                        let merged = merge_loops(&p.loops, combo.iter().map(|b| &b.loops));
                        let branch_choices: Vec<Choice> =
                            combo.iter().flat_map(|b| b.choices.iter().cloned()).collect();
                        for order in interleavings(&lens) {
                            let mut q = Partial {
                                steps: p.steps.clone(),
                                choices: p.choices.clone(),
                                loops: merged.clone(),
                            };
                            let mut cursor = vec![0; combo.len()];
                            for &b in &order {
                                q.steps.push(combo[b].steps[cursor[b]]);
                                cursor[b] += 1;
                            }
                            q.choices.extend(branch_choices.iter().cloned());
                            q.choices.push(Choice::Interleave {
                                gateway: self.id(node).to_string(),
                                order,
                            });
                            if let Some(next) = self.take(after, &mut q.loops) {
                                self.walk(next, stop, q, out)?;
                            }
                        }
                    }
                    return Ok(());
                }
            }
        }
    }

    fn count(
        &self,
        mut node: usize,
        stop: Option<usize>,
        mut len: usize,
        mut loops: Vec<u32>,
    ) -> Result<Dist, TraceError> {
        loop {
            if Some(node) == stop {
                return Ok(Dist::from([((len, loops), 1)]));
            }
            match &self.g.node(node).kind {
                NodeKind::End => {
                    if stop.is_some() {
                        return Err(TraceError::UnstructuredParallelism(format!(
                            "end event {} reached inside a parallel block",
                            self.id(node)
                        )));
                    }
                    return Ok(Dist::from([((len, loops), 1)]));
                }
                NodeKind::Task { .. } | NodeKind::Start | NodeKind::XorJoin => {
                    if matches!(self.g.node(node).kind, NodeKind::Task { .. }) {
                        len += 1;
                    }
                    match self.take(self.single_out(node), &mut loops) {
                        Some(next) => node = next,
                        None => return Ok(Dist::new()),
                    }
                }
                NodeKind::AndJoin => return Err(self.unstructured_join(node)),
                NodeKind::XorSplit => {
                    let mut acc = Dist::new();
                    for &e in self.g.outgoing(node) {
                        let mut l = loops.clone();
                        if let Some(next) = self.take(e, &mut l) {
                            add_into(&mut acc, self.count(next, stop, len, l)?, 1);
                        }
                    }
                    return Ok(acc);
                }
                NodeKind::AndSplit => {
                    let join = self.join_of[&node];
                    let mut branches: Vec<Vec<DistEntry>> = Vec::new();
                    for &e in self.g.outgoing(node) {
                        let d = self.count(self.g.edges()[e].to, Some(join), 0, loops.clone())?;
                        branches.push(d.into_iter().collect());
                    }
                    // Collapse branch combinations by (steps added, counters).
                    let mut joined = Dist::new();
                    for combo in cartesian(&branches) {
                        let lens: Vec<usize> = combo.iter().map(|((l, _), _)| *l).collect();
                        let n = multinomial(&lens);
                        if n > self.cfg.max_interleavings as u128 {
                            return Err(TraceError::ExplosionLimit {
                                limit_kind: Limit::Interleavings,
                                reached: n,
                                limit: self.cfg.max_interleavings,
                            });
                        }
                        let merged = merge_loops(&loops, combo.iter().map(|((_, l), _)| l));
                        let ways = combo
                            .iter()
                            .fold(n, |acc, (_, c)| acc.saturating_mul(*c));
                        let slot = joined.entry((lens.iter().sum(), merged)).or_insert(0);
                        *slot = slot.saturating_add(ways);
                    }
                    let after = self.single_out(join);
                    let mut acc = Dist::new();
                    for ((added, mut l), ways) in joined {
                        if let Some(next) = self.take(after, &mut l) {
                            add_into(&mut acc, self.count(next, stop, len + added, l)?, ways);
                        }
                    }
                    return Ok(acc);
                }
            }
        }
    }

    fn finish(&self, p: Partial) -> Trace {
        let steps = p
            .steps
            .iter()
            .map(|&n| {
                let node = self.g.node(n);
                let name = match &node.kind {
                    NodeKind::Task { name } => name.clone(),
                    _ => unreachable!("only tasks are recorded as steps"),
                };
                TaskRef {
                    id: node.id.clone(),
                    name,
                }
            })
            .collect();
        let loops = self
            .back_edges
            .iter()
            .zip(&p.loops)
            .filter(|(_, &c)| c > 0)
            .map(|(&e, &c)| (self.g.edges()[e].id.clone(), c))
            .collect();
        Trace {
            steps,
            origin: OriginPath {
                choices: p.choices,
                loops,
            },
        }
    }
}

fn add_into(acc: &mut Dist, other: Dist, factor: u128) {
    for (k, v) in other {
        let slot = acc.entry(k).or_insert(0);
        *slot = slot.saturating_add(v.saturating_mul(factor));
    }
}

/// Branch counters started from `base`; each branch only moves its own
/// back edges, so the increments add up.
fn merge_loops<'a>(base: &[u32], branches: impl Iterator<Item = &'a Vec<u32>>) -> Vec<u32> {
    let mut merged = base.to_vec();
    for b in branches {
        for (m, (x, b0)) in merged.iter_mut().zip(b.iter().zip(base)) {
            *m += x - b0;
        }
    }
    merged
}

fn cartesian<T>(lists: &[Vec<T>]) -> Vec<Vec<&T>> {
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for list in lists {
        out = out
            .iter()
            .flat_map(|prefix| {
                list.iter().map(move |item| {
                    let mut v = prefix.clone();
                    v.push(item);
                    v
                })
            })
            .collect();
    }
    out
}

/// (sum lens)! / prod(len!), saturating.
pub fn multinomial(lens: &[usize]) -> u128 {
    let mut total: u128 = 1;
    let mut n: u128 = 0;
    for &k in lens {
        for i in 1..=k as u128 {
            n += 1;
            // C(n, i) built incrementally keeps the product exact.
            total = match total.checked_mul(n) {
                Some(t) => t / i,
                None => return u128::MAX,
            };
        }
    }
    total
}

/// All order-preserving shuffles of sequences with the given lengths, as
/// sequences of branch indices, in lexicographic order.
pub fn interleavings(lens: &[usize]) -> Vec<Vec<usize>> {
    fn go(remaining: &mut [usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(prefix.clone());
            return;
        }
        for b in 0..remaining.len() {
            if remaining[b] > 0 {
                remaining[b] -= 1;
                prefix.push(b);
                go(remaining, prefix, out);
                prefix.pop();
                remaining[b] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut lens.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Edges closing a cycle in a depth-first search from the start node,
/// following outgoing flows in document order.
fn find_back_edges(g: &ProcessGraph) -> Vec<usize> {
    let n = g.nodes().len();
    let mut state = vec![0u8; n];
    let mut back = Vec::new();
    // Iterative DFS: (node, next outgoing position).
    let mut stack = vec![(g.start(), 0usize)];
    state[g.start()] = 1;
    while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
        if let Some(&e) = g.outgoing(v).get(*pos) {
            *pos += 1;
            let w = g.edges()[e].to;
            match state[w] {
                0 => {
                    state[w] = 1;
                    stack.push((w, 0));
                }
                1 => back.push(e),
                _ => {}
            }
        } else {
            state[v] = 2;
            stack.pop();
        }
    }
    back.sort_unstable();
    back
}

/// Post-dominator sets over the graph with all end events feeding one
/// virtual exit.
fn post_dominators(g: &ProcessGraph) -> Vec<Vec<bool>> {
    let n = g.nodes().len();
    let is_end = |v: usize| g.node(v).kind == NodeKind::End;
    let mut pdom: Vec<Vec<bool>> = (0..n)
        .map(|v| {
            if is_end(v) {
                (0..n).map(|w| w == v).collect()
            } else {
                vec![true; n]
            }
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for v in (0..n).filter(|&v| !is_end(v)) {
            let mut next = vec![true; n];
            for w in g.successors(v) {
                next.iter_mut().zip(&pdom[w]).for_each(|(a, b)| *a &= b);
            }
            next[v] = true;
            if next != pdom[v] {
                pdom[v] = next;
                changed = true;
            }
        }
    }
    pdom
}

fn match_parallel_blocks(g: &ProcessGraph) -> Result<HashMap<usize, usize>, TraceError> {
    let splits: Vec<usize> = (0..g.nodes().len())
        .filter(|&v| g.node(v).kind == NodeKind::AndSplit)
        .collect();
    if splits.is_empty() {
        return Ok(HashMap::new());
    }
    let pdom = post_dominators(g);
    let mut join_of = HashMap::new();
    for s in splits {
        let strict: Vec<bool> = pdom[s].iter().enumerate().map(|(w, &b)| b && w != s).collect();
        let ipdom = (0..g.nodes().len()).find(|&d| strict[d] && pdom[d] == strict);
        let sid = &g.node(s).id;
        let join = match ipdom {
            Some(j) if g.node(j).kind == NodeKind::AndJoin => j,
            _ => {
                return Err(TraceError::UnstructuredParallelism(format!(
                    "parallel split {sid} has no matching parallel join"
                )))
            }
        };
        if g.incoming(join).len() != g.outgoing(s).len() {
            return Err(TraceError::UnstructuredParallelism(format!(
                "parallel split {sid} has {} branches but join {} has {} incoming flows",
                g.outgoing(s).len(),
                g.node(join).id,
                g.incoming(join).len()
            )));
        }
        // No branch may escape the block or loop back to its split.
        let mut seen = vec![false; g.nodes().len()];
        let mut stack: Vec<usize> = g.successors(s).collect();
        while let Some(v) = stack.pop() {
            if v == join || seen[v] {
                continue;
            }
            seen[v] = true;
            if v == s || g.node(v).kind == NodeKind::End {
                return Err(TraceError::UnstructuredParallelism(format!(
                    "a branch of parallel split {sid} leaves the block at {}",
                    g.node(v).id
                )));
            }
            stack.extend(g.successors(v));
        }
        join_of.insert(s, join);
    }
    Ok(join_of)
}
