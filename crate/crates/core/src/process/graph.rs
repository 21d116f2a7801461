use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::ProcessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum NodeKind {
    Start,
    End,
    Task { name: String },
    XorSplit,
    XorJoin,
    AndSplit,
    AndJoin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

/// A validated process graph.
///
/// Nodes and edges keep document order. There is exactly one start event,
/// every node lies on some path from the start to an end event, tasks have
/// one incoming and one outgoing flow, and every gateway is either a split
/// (one in, several out) or a join (several in, one out).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessGraph {
    process_id: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    start: usize,
}

impl ProcessGraph {
    pub fn process_id(&self) -> &str {
        &self.process_id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Outgoing edge indices of node `i`, in document order.
    pub fn outgoing(&self, i: usize) -> &[usize] {
        &self.outgoing[i]
    }

    pub fn incoming(&self, i: usize) -> &[usize] {
        &self.incoming[i]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.outgoing[i].iter().map(|&e| self.edges[e].to)
    }

    pub fn task_name(&self, id: &str) -> Option<&str> {
        match &self.nodes[self.index_of(id)?].kind {
            NodeKind::Task { name } => Some(name),
            _ => None,
        }
    }

    pub fn is_task(&self, id: &str) -> bool {
        self.task_name(id).is_some()
    }

    pub fn task_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Task { .. }))
            .count()
    }
}

/// Element kinds before gateway roles are known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawKind {
    Start,
    End,
    Task(String),
    Exclusive,
    Parallel,
}

/// Collects nodes and flows, then checks the structural invariants.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    process_id: String,
    nodes: Vec<(String, RawKind)>,
    flows: Vec<(String, String, String)>,
}

impl GraphBuilder {
    pub fn new(process_id: impl Into<String>) -> Self {
        Self {
            process_id: process_id.into(),
            ..Self::default()
        }
    }

    pub fn node(&mut self, id: impl Into<String>, kind: RawKind) -> &mut Self {
        self.nodes.push((id.into(), kind));
        self
    }

    pub fn start(&mut self, id: &str) -> &mut Self {
        self.node(id, RawKind::Start)
    }

    pub fn end(&mut self, id: &str) -> &mut Self {
        self.node(id, RawKind::End)
    }

    pub fn task(&mut self, id: &str, name: &str) -> &mut Self {
        self.node(id, RawKind::Task(name.to_string()))
    }

    pub fn xor(&mut self, id: &str) -> &mut Self {
        self.node(id, RawKind::Exclusive)
    }

    pub fn and(&mut self, id: &str) -> &mut Self {
        self.node(id, RawKind::Parallel)
    }

    pub fn flow(&mut self, from: &str, to: &str) -> &mut Self {
        let id = format!("f{}", self.flows.len());
        self.flow_with_id(id, from, to)
    }

    pub fn flow_with_id(&mut self, id: impl Into<String>, from: &str, to: &str) -> &mut Self {
        self.flows.push((id.into(), from.to_string(), to.to_string()));
        self
    }

    pub fn build(&self) -> Result<ProcessGraph, ProcessError> {
        let structure = |msg: String| ProcessError::Structure(msg);

        let mut index = HashMap::new();
        for (i, (id, _)) in self.nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(structure(format!("duplicate node id {id}")));
            }
        }
        let n = self.nodes.len();
        let mut edges = Vec::new();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (id, from, to) in &self.flows {
            let lookup = |r: &str| {
                index
                    .get(r)
                    .copied()
                    .ok_or_else(|| structure(format!("sequence flow {id} references unknown node {r}")))
            };
            let (f, t) = (lookup(from)?, lookup(to)?);
            outgoing[f].push(edges.len());
            incoming[t].push(edges.len());
            edges.push(Edge {
                id: id.clone(),
                from: f,
                to: t,
            });
        }

        let mut starts = Vec::new();
        let mut ends = 0;
        let mut nodes = Vec::with_capacity(n);
        for (i, (id, raw)) in self.nodes.iter().enumerate() {
            let (ins, outs) = (incoming[i].len(), outgoing[i].len());
            let degree_error = |what: &str| {
                structure(format!("{what} {id} has {ins} incoming and {outs} outgoing flows"))
            };
            let kind = match raw {
                RawKind::Start => {
                    if ins != 0 || outs != 1 {
                        return Err(degree_error("start event"));
                    }
                    starts.push(i);
                    NodeKind::Start
                }
                RawKind::End => {
                    if ins == 0 || outs != 0 {
                        return Err(degree_error("end event"));
                    }
                    ends += 1;
                    NodeKind::End
                }
                RawKind::Task(name) => {
                    if ins != 1 || outs != 1 {
                        return Err(degree_error("task"));
                    }
                    NodeKind::Task { name: name.clone() }
                }
                RawKind::Exclusive | RawKind::Parallel => {
                    let split = ins == 1 && outs >= 2;
                    let join = ins >= 2 && outs == 1;
                    let xor = *raw == RawKind::Exclusive;
                    match (split, join, xor) {
                        (true, _, true) => NodeKind::XorSplit,
                        (true, _, false) => NodeKind::AndSplit,
                        (_, true, true) => NodeKind::XorJoin,
                        (_, true, false) => NodeKind::AndJoin,
                        _ => return Err(degree_error("gateway")),
                    }
                }
            };
            nodes.push(Node {
                id: id.clone(),
                kind,
            });
        }
        let start = match starts.as_slice() {
            [s] => *s,
            [] => return Err(structure("no start event".into())),
            _ => return Err(structure(format!("{} start events", starts.len()))),
        };
        if ends == 0 {
            return Err(structure("no end event".into()));
        }

        let forward = reach(n, start, |v| outgoing[v].iter().map(|&e| edges[e].to).collect());
        if let Some(v) = (0..n).find(|&v| !forward[v]) {
            return Err(structure(format!("node {} is unreachable from the start", nodes[v].id)));
        }
        let end_nodes: Vec<usize> = (0..n).filter(|&v| nodes[v].kind == NodeKind::End).collect();
        let mut backward = vec![false; n];
        for &e in &end_nodes {
            let r = reach(n, e, |v| incoming[v].iter().map(|&x| edges[x].from).collect());
            backward.iter_mut().zip(r).for_each(|(b, r)| *b |= r);
        }
        if let Some(v) = (0..n).find(|&v| !backward[v]) {
            return Err(structure(format!("node {} cannot reach an end event", nodes[v].id)));
        }

        Ok(ProcessGraph {
            process_id: self.process_id.clone(),
            nodes,
            edges,
            index,
            outgoing,
            incoming,
            start,
        })
    }
}

fn reach(n: usize, from: usize, next: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        for w in next(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}
