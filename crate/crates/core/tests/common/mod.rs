//! Structured process trees, their graphs, and reference semantics used
//! as test oracles.

#![allow(dead_code)]

pub mod oracle;

use normcheck::process::{GraphBuilder, ProcessGraph};

#[derive(Debug, Clone)]
pub enum Block {
    Task,
    Seq(Vec<Block>),
    Xor(Vec<Block>),
    And(Vec<Block>),
    /// Do-while: body, then an exclusive split back to the loop head.
    Loop(Box<Block>),
}

impl Block {
    pub fn tasks(&self) -> usize {
        match self {
            Block::Task => 1,
            Block::Seq(items) | Block::Xor(items) | Block::And(items) => items.iter().map(Block::tasks).sum(),
            Block::Loop(body) => body.tasks(),
        }
    }

    /// Graph nodes used by the block.
    pub fn size(&self) -> usize {
        match self {
            Block::Task => 1,
            Block::Seq(items) => items.iter().map(Block::size).sum(),
            Block::Xor(items) | Block::And(items) => 2 + items.iter().map(Block::size).sum::<usize>(),
            Block::Loop(body) => 2 + body.size(),
        }
    }
}

/// Every structured graph with at most 10 nodes (start and end included).
pub fn corpus() -> Vec<Block> {
    (1..=8).flat_map(|n| [blocks(n, 0), blocks(n, 1)]).flatten().collect()
}

/// Every block of exactly `size` nodes containing exactly `loops` (0 or 1)
/// loops. Sequences are flattened; gateways have 2 or 3 branches.
pub fn blocks(size: usize, loops: usize) -> Vec<Block> {
    let mut out = Vec::new();
    if size == 1 && loops == 0 {
        out.push(Block::Task);
    }
    if size >= 3 && loops == 1 {
        for body in blocks(size - 2, 0) {
            out.push(Block::Loop(Box::new(body)));
        }
    }
    if size >= 4 {
        for parts in compositions(size - 2, 2, 3) {
            for items in distribute(&parts, loops, false) {
                out.push(Block::Xor(items.clone()));
                out.push(Block::And(items));
            }
        }
    }
    if size >= 2 {
        for parts in compositions(size, 2, size) {
            out.extend(distribute(&parts, loops, true).into_iter().map(Block::Seq));
        }
    }
    out
}

/// Ordered ways to write `n` as a sum of between `min` and `max` positive parts.
fn compositions(n: usize, min: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for first in 1..=n {
            prefix.push(first);
            go(n - first, left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for k in min..=max.min(n) {
        go(n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Children with the given sizes, placing the loop (if any) in one child.
fn distribute(sizes: &[usize], loops: usize, in_seq: bool) -> Vec<Vec<Block>> {
    let mut out = Vec::new();
    let placements: Vec<Option<usize>> = if loops == 0 {
        vec![None]
    } else {
        (0..sizes.len()).map(Some).collect()
    };
    for place in placements {
        let mut acc: Vec<Vec<Block>> = vec![Vec::new()];
        for (i, &s) in sizes.iter().enumerate() {
            let l = usize::from(place == Some(i));
            let options: Vec<Block> = blocks(s, l)
                .into_iter()
                .filter(|b| !(in_seq && matches!(b, Block::Seq(_))))
                .collect();
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |b| {
                        let mut v = prefix.clone();
                        v.push(b.clone());
                        v
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
    out
}

pub struct Built {
    pub graph: ProcessGraph,
    pub back_edge: Option<String>,
}

/// Lays the block out between a start and an end event. Tasks are named
/// t0, t1, ... in depth-first order.
pub fn build(block: &Block) -> Built {
    struct Ctx {
        b: GraphBuilder,
        next: usize,
        back: Option<String>,
    }
    fn fresh(ctx: &mut Ctx, prefix: &str) -> String {
        ctx.next += 1;
        format!("{prefix}{}", ctx.next)
    }
    // Returns (entry, exit) node ids.
    fn emit(ctx: &mut Ctx, block: &Block, tasks: &mut usize) -> (String, String) {
        match block {
            Block::Task => {
                let id = format!("t{tasks}");
                *tasks += 1;
                ctx.b.task(&id, &id);
                (id.clone(), id)
            }
            Block::Seq(items) => {
                let mut entry = None;
                let mut prev: Option<String> = None;
                for item in items {
                    let (i, o) = emit(ctx, item, tasks);
                    if let Some(p) = prev {
                        ctx.b.flow(&p, &i);
                    }
                    entry.get_or_insert(i);
                    prev = Some(o);
                }
                (entry.unwrap(), prev.unwrap())
            }
            Block::Xor(items) | Block::And(items) => {
                let (split, join) = (fresh(ctx, "split"), fresh(ctx, "join"));
                if matches!(block, Block::Xor(_)) {
                    ctx.b.xor(&split).xor(&join);
                } else {
                    ctx.b.and(&split).and(&join);
                }
                for item in items {
                    let (i, o) = emit(ctx, item, tasks);
                    ctx.b.flow(&split, &i).flow(&o, &join);
                }
                (split, join)
            }
            Block::Loop(body) => {
                let (head, test) = (fresh(ctx, "head"), fresh(ctx, "test"));
                ctx.b.xor(&head).xor(&test);
                let (i, o) = emit(ctx, body, tasks);
                ctx.b.flow(&head, &i).flow(&o, &test);
                ctx.b.flow_with_id("back", &test, &head);
                ctx.back = Some("back".into());
                (head, test)
            }
        }
    }
    let mut ctx = Ctx { b: GraphBuilder::new("gen"), next: 0, back: None };
    ctx.b.start("s").end("e");
    let mut tasks = 0;
    let (i, o) = emit(&mut ctx, block, &mut tasks);
    ctx.b.flow("s", &i).flow(&o, "e");
    let graph = ctx.b.build().expect("generated graph is well formed");
    Built { graph, back_edge: ctx.back }
}

/// Reference semantics: the multiset of task-id sequences of `block`,
/// with a loop body running between 1 and `max_loop` times.
pub fn denote(block: &Block, max_loop: usize) -> Vec<Vec<String>> {
    fn go(block: &Block, max_loop: usize, tasks: &mut usize) -> Vec<Vec<String>> {
        match block {
            Block::Task => {
                let id = format!("t{tasks}");
                *tasks += 1;
                vec![vec![id]]
            }
            Block::Seq(items) => {
                let mut acc = vec![Vec::new()];
                for item in items {
                    let parts = go(item, max_loop, tasks);
                    acc = concat_all(&acc, &parts);
                }
                acc
            }
            Block::Xor(items) => items.iter().flat_map(|i| go(i, max_loop, tasks)).collect(),
            Block::And(items) => {
                let alts: Vec<_> = items.iter().map(|i| go(i, max_loop, tasks)).collect();
                let mut combos: Vec<Vec<Vec<String>>> = vec![Vec::new()];
                for alt in &alts {
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            alt.iter().map(move |a| {
                                let mut c = c.clone();
                                c.push(a.clone());
                                c
                            })
                        })
                        .collect();
                }
                combos.iter().flat_map(|c| shuffles(c)).collect()
            }
            Block::Loop(body) => {
                let once = go(body, max_loop, tasks);
                let mut out = Vec::new();
                let mut level = once.clone();
                for _ in 0..max_loop {
                    out.extend(level.iter().cloned());
                    level = concat_all(&level, &once);
                }
                out
            }
        }
    }
    go(block, max_loop, &mut 0)
}

fn concat_all(a: &[Vec<String>], b: &[Vec<String>]) -> Vec<Vec<String>> {
    a.iter()
        .flat_map(|x| {
            b.iter().map(move |y| {
                let mut v = x.clone();
                v.extend(y.iter().cloned());
                v
            })
        })
        .collect()
}

/// All order-preserving merges of the sequences.
pub fn shuffles(seqs: &[Vec<String>]) -> Vec<Vec<String>> {
    if seqs.iter().all(Vec::is_empty) {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, s) in seqs.iter().enumerate() {
        if let Some((head, _)) = s.split_first() {
            let mut rest = seqs.to_vec();
            rest[i] = s[1..].to_vec();
            for mut tail in shuffles(&rest) {
                tail.insert(0, head.clone());
                out.push(tail);
            }
        }
    }
    out
}

/// Token-game replay: can the graph fire exactly `target` as its task
/// sequence, taking `back_edge` fewer than `max_loop` times?
pub fn replays(g: &ProcessGraph, back_edge: Option<&str>, max_loop: usize, target: &[String]) -> bool {
    use normcheck::process::NodeKind;
    use std::collections::HashSet;

    let back = back_edge.and_then(|id| g.edges().iter().position(|e| e.id == id));
    let mut tokens = vec![0u32; g.edges().len()];
    tokens[g.outgoing(g.start())[0]] = 1;
    let mut seen = HashSet::new();
    let mut stack = vec![(tokens, 0usize, 0u32)];
    while let Some((marking, pos, loops)) = stack.pop() {
        if !seen.insert((marking.clone(), pos, loops)) {
            continue;
        }
        if marking.iter().all(|&t| t == 0) {
            if pos == target.len() {
                return true;
            }
            continue;
        }
        for v in 0..g.nodes().len() {
            let ins = g.incoming(v);
            let outs = g.outgoing(v);
            // (consumed edges, produced edge sets)
            let mut firings: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
            match &g.node(v).kind {
                NodeKind::AndJoin => {
                    if ins.iter().all(|&e| marking[e] > 0) {
                        firings.push((ins.to_vec(), outs.to_vec()));
                    }
                }
                NodeKind::XorSplit => {
                    for &i in ins.iter().filter(|&&e| marking[e] > 0) {
                        for &o in outs {
                            firings.push((vec![i], vec![o]));
                        }
                    }
                }
                _ => {
                    for &i in ins.iter().filter(|&&e| marking[e] > 0) {
                        firings.push((vec![i], outs.to_vec()));
                    }
                }
            }
            for (consume, produce) in firings {
                let mut pos2 = pos;
                if let NodeKind::Task { .. } = g.node(v).kind {
                    if target.get(pos).map(String::as_str) != Some(g.node(v).id.as_str()) {
                        continue;
                    }
                    pos2 += 1;
                }
                let mut loops2 = loops;
                if back.is_some_and(|b| produce.contains(&b)) {
                    loops2 += 1;
                    if loops2 as usize >= max_loop {
                        continue;
                    }
                }
                let mut m = marking.clone();
                consume.iter().for_each(|&e| m[e] -= 1);
                produce.iter().for_each(|&e| m[e] += 1);
                stack.push((m, pos2, loops2));
            }
        }
    }
    false
}
