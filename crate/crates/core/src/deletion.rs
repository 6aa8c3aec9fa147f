//! Distance changes under single-vertex deletion, without re-running BFS
//! for every (deleted vertex, source) pair.
//!
//! From a source `s`, deleting `v` lengthens `d(s, u)` exactly when every
//! shortest `s -> u` path passes through `v`, i.e. when `v` dominates `u` in
//! the shortest-path DAG of `s`. Per source we build that dominator tree and
//! repair only the subtree below each `v`, seeded from arcs that enter the
//! subtree from outside.
//!
//! Summing over sources gives, for every `v`,
//! `W(D - v) = W(D) - sigma_out(v) - sigma_in(v) + detour(v)`.

use rayon::prelude::*;

use crate::digraph::{build_circulant, CirculantSpec, Digraph};
use crate::distance::{BfsScratch, Direction, UNREACHABLE};
use crate::error::{Result, SoltesError};
use crate::progress::{ProgressFn, Ticker};

const NONE: u32 = u32::MAX;

/// Extra distance accumulated by surviving pairs once a vertex is deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detour {
    Finite(u64),
    Disconnected,
}

impl Detour {
    fn add(self, other: Detour) -> Detour {
        match (self, other) {
            (Detour::Finite(a), Detour::Finite(b)) => Detour::Finite(a + b),
            _ => Detour::Disconnected,
        }
    }
}

/// Per-source dominator tree over the shortest-path DAG plus repair buffers.
pub(crate) struct DominatorScratch {
    bfs: BfsScratch,
    idom: Vec<u32>,
    depth: Vec<u32>,
    pos: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    pre: Vec<u32>,
    by_pre: Vec<u32>,
    size: Vec<u32>,
    stack: Vec<u32>,
    repaired: Vec<u32>,
    seeds: Vec<(u32, u32)>,
    queue: Vec<u32>,
}

impl DominatorScratch {
    pub(crate) fn new(n: usize) -> Self {
        DominatorScratch {
            bfs: BfsScratch::new(n),
            idom: vec![NONE; n],
            depth: vec![0; n],
            pos: vec![0; n],
            child_start: Vec::with_capacity(n + 1),
            children: Vec::with_capacity(n),
            pre: vec![NONE; n],
            by_pre: Vec::with_capacity(n),
            size: vec![0; n],
            stack: Vec::with_capacity(n),
            repaired: vec![UNREACHABLE; n],
            seeds: Vec::new(),
            queue: Vec::with_capacity(n),
        }
    }

    pub(crate) fn dist(&self) -> &[u32] {
        self.bfs.dist()
    }

    /// BFS from `s` plus dominator tree. Returns `sigma_out(s)`, or `None` if
    /// some present vertex is unreachable from `s`.
    fn build(&mut self, d: &Digraph, s: usize) -> Option<u64> {
        let sweep = self.bfs.run(d, s, None, Direction::Forward);
        if sweep.reached != d.order() {
            return None;
        }
        let dist = self.bfs.dist();
        let order = self.bfs.order();
        self.idom[s] = s as u32;
        self.depth[s] = 0;
        for &u in &order[1..] {
            let u = u as usize;
            let target = dist[u] - 1;
            let mut dom = NONE;
            for w in d.in_iter(u) {
                if dist[w] != target {
                    continue;
                }
                dom = if dom == NONE {
                    w as u32
                } else {
                    lca(&self.idom, &self.depth, dom, w as u32)
                };
            }
            self.idom[u] = dom;
            self.depth[u] = self.depth[dom as usize] + 1;
        }

        // children in CSR form, blocks indexed by BFS position
        let m = order.len();
        for (k, &u) in order.iter().enumerate() {
            self.pos[u as usize] = k as u32;
        }
        self.child_start.clear();
        self.child_start.resize(m + 1, 0);
        for &u in &order[1..] {
            let k = self.pos[self.idom[u as usize] as usize] as usize;
            self.child_start[k + 1] += 1;
        }
        for k in 0..m {
            self.child_start[k + 1] += self.child_start[k];
        }
        self.children.clear();
        self.children.resize(m.saturating_sub(1), NONE);
        self.stack.clear();
        self.stack.extend_from_slice(&self.child_start[..m]);
        for &u in &order[1..] {
            let k = self.pos[self.idom[u as usize] as usize] as usize;
            self.children[self.stack[k] as usize] = u;
            self.stack[k] += 1;
        }

        // iterative preorder; subtree of v = by_pre[pre[v] .. pre[v] + size[v]]
        self.by_pre.clear();
        self.stack.clear();
        self.stack.push(s as u32);
        while let Some(u) = self.stack.pop() {
            let u = u as usize;
            self.pre[u] = self.by_pre.len() as u32;
            self.by_pre.push(u as u32);
            let k = self.pos[u] as usize;
            let block =
                &self.children[self.child_start[k] as usize..self.child_start[k + 1] as usize];
            self.stack.extend(block.iter().rev());
        }
        for &u in order {
            self.size[u as usize] = 1;
        }
        for &u in self.by_pre[1..].iter().rev() {
            let p = self.idom[u as usize] as usize;
            self.size[p] += self.size[u as usize];
        }
        Some(sweep.sum)
    }

    /// Extra distance from `s` to the vertices dominated by `v` once `v` is gone.
    fn repair(&mut self, d: &Digraph, v: usize) -> Detour {
        let lo = self.pre[v];
        let hi = lo + self.size[v];
        if hi - lo == 1 {
            return Detour::Finite(0);
        }
        let pre = &self.pre;
        let inside = |w: usize| {
            let p = pre[w];
            p >= lo && p < hi
        };
        let dist = self.bfs.dist();
        self.seeds.clear();
        for &u in &self.by_pre[(lo + 1) as usize..hi as usize] {
            let u = u as usize;
            self.repaired[u] = UNREACHABLE;
            let best = d
                .in_iter(u)
                .filter(|&w| !inside(w))
                .map(|w| dist[w] + 1)
                .min();
            if let Some(c) = best {
                self.seeds.push((c, u as u32));
            }
        }
        self.seeds.sort_unstable();

        // Two-queue BFS: seeds enter in distance order, merged with the FIFO.
        self.queue.clear();
        let mut head = 0;
        let mut next_seed = 0;
        loop {
            let take_seed = next_seed < self.seeds.len()
                && (head == self.queue.len()
                    || self.seeds[next_seed].0 <= self.repaired[self.queue[head] as usize]);
            let u = if take_seed {
                let (c, u) = self.seeds[next_seed];
                next_seed += 1;
                if self.repaired[u as usize] <= c {
                    continue;
                }
                self.repaired[u as usize] = c;
                u as usize
            } else if head < self.queue.len() {
                head += 1;
                self.queue[head - 1] as usize
            } else {
                break;
            };
            let next = self.repaired[u] + 1;
            for x in d.out_iter(u) {
                let p = pre[x];
                if p > lo && p < hi && self.repaired[x] > next {
                    self.repaired[x] = next;
                    self.queue.push(x as u32);
                }
            }
        }

        let mut extra = 0u64;
        for &u in &self.by_pre[(lo + 1) as usize..hi as usize] {
            let r = self.repaired[u as usize];
            if r == UNREACHABLE {
                return Detour::Disconnected;
            }
            extra += (r - dist[u as usize]) as u64;
        }
        Detour::Finite(extra)
    }
}

fn lca(idom: &[u32], depth: &[u32], mut a: u32, mut b: u32) -> u32 {
    while a != b {
        let (da, db) = (depth[a as usize], depth[b as usize]);
        if da >= db {
            a = idom[a as usize];
        }
        if db >= da {
            b = idom[b as usize];
        }
    }
    a
}

/// Exact per-vertex deletion data for a strongly connected digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionTotals {
    pub wiener: u64,
    pub sigma_out: Vec<u64>,
    pub sigma_in: Vec<u64>,
    /// Summed extra distance among surviving pairs; `None` marks `D - v` not strongly connected.
    pub detour: Vec<Option<u64>>,
}

impl DeletionTotals {
    /// `W(D) - W(D - v)`, or `None` when `D - v` is disconnected.
    pub fn delta(&self, v: usize) -> Option<i64> {
        let det = self.detour[v]?;
        Some(self.sigma_out[v] as i64 + self.sigma_in[v] as i64 - det as i64)
    }

    pub fn wiener_deleted(&self, v: usize) -> Option<u64> {
        let det = self.detour[v]?;
        Some(self.wiener - self.sigma_out[v] - self.sigma_in[v] + det)
    }
}

struct Acc {
    scratch: DominatorScratch,
    wiener: u64,
    sigma_out: Vec<u64>,
    sigma_in: Vec<u64>,
    detour: Vec<Detour>,
    ok: bool,
}

impl Acc {
    fn new(n: usize) -> Self {
        Acc {
            scratch: DominatorScratch::new(n),
            wiener: 0,
            sigma_out: vec![0; n],
            sigma_in: vec![0; n],
            detour: vec![Detour::Finite(0); n],
            ok: true,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.ok &= other.ok;
        self.wiener += other.wiener;
        for (a, b) in self.sigma_out.iter_mut().zip(&other.sigma_out) {
            *a += b;
        }
        for (a, b) in self.sigma_in.iter_mut().zip(&other.sigma_in) {
            *a += b;
        }
        for (a, b) in self.detour.iter_mut().zip(&other.detour) {
            *a = a.add(*b);
        }
        self
    }
}

/// Every vertex's deletion data in one parallel pass over sources.
pub fn deletion_totals(d: &Digraph, progress: Option<ProgressFn<'_>>) -> Result<DeletionTotals> {
    let n = d.n();
    let sources: Vec<usize> = d.vertices().collect();
    let ticker = Ticker::new(sources.len(), progress);
    let acc = sources
        .par_iter()
        .fold(
            || Acc::new(n),
            |mut acc, &s| {
                if !acc.ok {
                    return acc;
                }
                let Some(sigma) = acc.scratch.build(d, s) else {
                    acc.ok = false;
                    return acc;
                };
                acc.wiener += sigma;
                acc.sigma_out[s] += sigma;
                for v in d.vertices() {
                    acc.sigma_in[v] += acc.scratch.dist()[v] as u64;
                    if v != s {
                        let det = acc.scratch.repair(d, v);
                        acc.detour[v] = acc.detour[v].add(det);
                    }
                }
                ticker.tick();
                acc
            },
        )
        .reduce_with(Acc::merge)
        .unwrap_or_else(|| Acc::new(n));
    if !acc.ok {
        return Err(SoltesError::NotStronglyConnected);
    }
    Ok(DeletionTotals {
        wiener: acc.wiener,
        sigma_out: acc.sigma_out,
        sigma_in: acc.sigma_in,
        detour: acc
            .detour
            .into_iter()
            .map(|x| match x {
                Detour::Finite(v) => Some(v),
                Detour::Disconnected => None,
            })
            .collect(),
    })
}

/// Deletion data for vertex 0 of `D(n, S)` from a single source.
///
/// Rotation by `-s` maps the pair (source `s`, deleted `0`) onto (source `0`,
/// deleted `-s`), so the total detour at vertex 0 equals the sum over deleted
/// vertices of the detours seen from source 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricDeletion {
    pub n: usize,
    pub sigma: u64,
    pub detour: Option<u64>,
}

impl SymmetricDeletion {
    pub fn wiener(&self) -> u64 {
        self.n as u64 * self.sigma
    }

    pub fn delta(&self) -> Option<i64> {
        Some(2 * self.sigma as i64 - self.detour? as i64)
    }

    pub fn wiener_deleted(&self) -> Option<u64> {
        Some(self.wiener() - 2 * self.sigma + self.detour?)
    }
}

pub fn circulant_deletion(spec: &CirculantSpec) -> Result<SymmetricDeletion> {
    let d = build_circulant(spec);
    let mut scratch = DominatorScratch::new(spec.n());
    let sigma = scratch
        .build(&d, 0)
        .ok_or(SoltesError::NotStronglyConnected)?;
    let mut total = Detour::Finite(0);
    for v in 1..spec.n() {
        total = total.add(scratch.repair(&d, v));
    }
    Ok(SymmetricDeletion {
        n: spec.n(),
        sigma,
        detour: match total {
            Detour::Finite(x) => Some(x),
            Detour::Disconnected => None,
        },
    })
}
