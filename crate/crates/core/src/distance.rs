//! Exact unweighted shortest paths: BFS, transmissions, total distance,
//! diameter and strong connectivity.

use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{build_circulant, delete_vertex, CirculantSpec, Digraph};
use crate::error::{Result, SoltesError};
use crate::progress::{ProgressFn, Ticker};

/// Distance of a vertex that cannot be reached.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    pub source: usize,
    /// Indexed by label; deleted labels hold `UNREACHABLE`.
    pub dist: Vec<u32>,
}

impl DistanceVector {
    pub fn get(&self, v: usize) -> Option<u32> {
        match self.dist.get(v) {
            Some(&d) if d != UNREACHABLE => Some(d),
            _ => None,
        }
    }
}

/// Out- and in-transmission of one vertex; `None` when some distance is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransmissionPair {
    pub sigma_out: Option<u64>,
    pub sigma_in: Option<u64>,
}

/// Reusable BFS buffers. Only entries reached by the previous run are reset.
pub struct BfsScratch {
    pub(crate) dist: Vec<u32>,
    pub(crate) queue: Vec<u32>,
}

/// Summary of one BFS sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub reached: usize,
    pub sum: u64,
    pub eccentricity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch {
            dist: vec![UNREACHABLE; n],
            queue: Vec::with_capacity(n),
        }
    }

    pub fn dist(&self) -> &[u32] {
        &self.dist
    }

    /// Visit order of the last run; also the list of reached vertices.
    pub fn order(&self) -> &[u32] {
        &self.queue
    }

    /// BFS from `s`, skipping `avoid` in addition to the digraph's own deletions.
    pub fn run(&mut self, d: &Digraph, s: usize, avoid: Option<usize>, dir: Direction) -> Sweep {
        for &u in &self.queue {
            self.dist[u as usize] = UNREACHABLE;
        }
        self.queue.clear();
        if self.dist.len() < d.n() {
            self.dist.resize(d.n(), UNREACHABLE);
        }
        self.dist[s] = 0;
        self.queue.push(s as u32);
        let mut head = 0;
        let mut sum = 0u64;
        let mut ecc = 0u32;
        while head < self.queue.len() {
            let u = self.queue[head] as usize;
            head += 1;
            let du = self.dist[u];
            sum += du as u64;
            ecc = du;
            let next = du + 1;
            let mut visit = |w: usize| {
                if self.dist[w] == UNREACHABLE && Some(w) != avoid {
                    self.dist[w] = next;
                    self.queue.push(w as u32);
                }
            };
            match dir {
                Direction::Forward => d.out_iter(u).for_each(&mut visit),
                Direction::Backward => d.in_iter(u).for_each(&mut visit),
            }
        }
        Sweep {
            reached: self.queue.len(),
            sum,
            eccentricity: ecc,
        }
    }
}

fn check_source(d: &Digraph, s: usize, deleted: Option<usize>) -> Result<()> {
    d.check_vertex(s)?;
    if let Some(v) = deleted {
        d.check_vertex(v)?;
        if v == s {
            return Err(SoltesError::DeletedVertex(s));
        }
    }
    Ok(())
}

pub fn bfs_from(d: &Digraph, s: usize, deleted: Option<usize>) -> Result<DistanceVector> {
    check_source(d, s, deleted)?;
    let mut scratch = BfsScratch::new(d.n());
    scratch.run(d, s, deleted, Direction::Forward);
    Ok(DistanceVector {
        source: s,
        dist: scratch.dist,
    })
}

pub fn transmissions(d: &Digraph, v: usize, deleted: Option<usize>) -> Result<TransmissionPair> {
    check_source(d, v, deleted)?;
    let order = d.order() - usize::from(deleted.is_some());
    let mut scratch = BfsScratch::new(d.n());
    let finite = |sw: Sweep| (sw.reached == order).then_some(sw.sum);
    let sigma_out = finite(scratch.run(d, v, deleted, Direction::Forward));
    let sigma_in = finite(scratch.run(d, v, deleted, Direction::Backward));
    Ok(TransmissionPair {
        sigma_out,
        sigma_in,
    })
}

/// All-sources sweep statistics over the present vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllPairs {
    pub wiener: u64,
    pub diameter: u32,
}

/// Runs one forward BFS per present vertex in parallel.
pub fn all_pairs(d: &Digraph, progress: Option<ProgressFn<'_>>) -> Result<AllPairs> {
    let order = d.order();
    let sources: Vec<usize> = d.vertices().collect();
    let ticker = Ticker::new(sources.len(), progress);
    let res = sources
        .par_iter()
        .map_init(
            || BfsScratch::new(d.n()),
            |scratch, &s| {
                let sw = scratch.run(d, s, None, Direction::Forward);
                ticker.tick();
                (sw.reached == order).then_some((sw.sum, sw.eccentricity))
            },
        )
        .try_fold(
            || (0u64, 0u32),
            |(w, diam), item| item.map(|(sum, ecc)| (w + sum, diam.max(ecc))),
        )
        .try_reduce(|| (0, 0), |a, b| Some((a.0 + b.0, a.1.max(b.1))));
    match res {
        Some((wiener, diameter)) => Ok(AllPairs { wiener, diameter }),
        None => Err(SoltesError::NotStronglyConnected),
    }
}

/// Total distance over all ordered pairs of present vertices.
pub fn wiener(d: &Digraph) -> Result<u64> {
    all_pairs(d, None).map(|ap| ap.wiener)
}

/// `n * sigma_out(0)`; valid because rotation is an automorphism of `D(n, S)`.
pub fn wiener_vertex_transitive(spec: &CirculantSpec) -> Result<u64> {
    let d = build_circulant(spec);
    let sigma = transmissions(&d, 0, None)?
        .sigma_out
        .ok_or(SoltesError::NotStronglyConnected)?;
    Ok(spec.n() as u64 * sigma)
}

/// Total distance of `D - v` by brute force: one BFS per surviving source.
pub fn wiener_deleted(d: &Digraph, v: usize) -> Result<u64> {
    wiener(&delete_vertex(d, v)?)
}

pub fn diameter(d: &Digraph) -> Result<u32> {
    all_pairs(d, None).map(|ap| ap.diameter)
}

pub fn is_strongly_connected(d: &Digraph) -> bool {
    let Some(root) = d.vertices().next() else {
        return true;
    };
    let order = d.order();
    let mut scratch = BfsScratch::new(d.n());
    scratch.run(d, root, None, Direction::Forward).reached == order
        && scratch.run(d, root, None, Direction::Backward).reached == order
}
