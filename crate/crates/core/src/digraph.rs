//! Digraph representations: arithmetic circulants, rule-based mixtures of
//! difference sets, and plain arc lists.
//!
//! Vertex labels are 0-based. A 1-based label `i` maps to internal `i - 1`,
//! except that label `n` maps to internal `0`; both are the same residue
//! modulo `n`, so arithmetic on labels never needs a branch.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SoltesError};

/// The pair `(n, S)` defining a circulant digraph with arcs `i -> i-1` and
/// `i -> i+k` for `k` in `S`, all modulo `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCirculant", into = "RawCirculant")]
pub struct CirculantSpec {
    n: usize,
    differences: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawCirculant {
    n: usize,
    s: Vec<usize>,
}

impl TryFrom<RawCirculant> for CirculantSpec {
    type Error = SoltesError;
    fn try_from(raw: RawCirculant) -> Result<Self> {
        CirculantSpec::new(raw.n, raw.s)
    }
}

impl From<CirculantSpec> for RawCirculant {
    fn from(spec: CirculantSpec) -> Self {
        RawCirculant {
            n: spec.n,
            s: spec.differences,
        }
    }
}

fn validate_differences(n: usize, set: impl IntoIterator<Item = usize>) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = set.into_iter().collect();
    out.sort_unstable();
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(SoltesError::DuplicateDifference(w[0]));
        }
    }
    let max = n.saturating_sub(2);
    if let Some(&bad) = out.iter().find(|&&k| k == 0 || k > max) {
        return Err(SoltesError::DifferenceOutOfRange { value: bad, max });
    }
    Ok(out)
}

impl CirculantSpec {
    pub fn new(n: usize, differences: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n < 3 {
            return Err(SoltesError::TooFewVertices(n));
        }
        let differences = validate_differences(n, differences)?;
        Ok(CirculantSpec { n, differences })
    }

    /// `D(n, {1, ..., m})`.
    pub fn interval(n: usize, m: usize) -> Result<Self> {
        Self::new(n, 1..=m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Forward differences, sorted ascending. The backward step is implicit.
    pub fn differences(&self) -> &[usize] {
        &self.differences
    }

    pub fn max_difference(&self) -> Option<usize> {
        self.differences.last().copied()
    }
}

/// Residue condition on 1-based labels with explicit exceptions:
/// `label` matches when `(label % modulus == residue && label ∉ exclude) || label ∈ include`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selector {
    pub modulus: usize,
    pub residue: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub include: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<usize>,
}

impl Selector {
    pub fn residue(modulus: usize, residue: usize) -> Self {
        Selector {
            modulus,
            residue,
            include: Vec::new(),
            exclude: Vec::new(),
        }
    }

    /// Matches every label.
    pub fn all() -> Self {
        Self::residue(1, 0)
    }

    pub fn with_include(mut self, labels: impl IntoIterator<Item = usize>) -> Self {
        self.include.extend(labels);
        self
    }

    pub fn with_exclude(mut self, labels: impl IntoIterator<Item = usize>) -> Self {
        self.exclude.extend(labels);
        self
    }

    pub fn matches(&self, label: usize) -> bool {
        if self.include.contains(&label) {
            return true;
        }
        label % self.modulus == self.residue && !self.exclude.contains(&label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub selector: Selector,
    pub s: Vec<usize>,
}

/// Per-vertex assignment of difference sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRuleSpec", into = "RawRuleSpec")]
pub struct RuleSpec {
    n: usize,
    rules: Vec<Rule>,
    include_backward: bool,
}

#[derive(Serialize, Deserialize)]
struct RawRuleSpec {
    n: usize,
    #[serde(default = "default_true")]
    include_backward: bool,
    rules: Vec<Rule>,
}

fn default_true() -> bool {
    true
}

impl TryFrom<RawRuleSpec> for RuleSpec {
    type Error = SoltesError;
    fn try_from(raw: RawRuleSpec) -> Result<Self> {
        RuleSpec::new(raw.n, raw.rules, raw.include_backward)
    }
}

impl From<RuleSpec> for RawRuleSpec {
    fn from(spec: RuleSpec) -> Self {
        RawRuleSpec {
            n: spec.n,
            include_backward: spec.include_backward,
            rules: spec.rules,
        }
    }
}

impl RuleSpec {
    pub fn new(n: usize, rules: Vec<Rule>, include_backward: bool) -> Result<Self> {
        if n < 3 {
            return Err(SoltesError::TooFewVertices(n));
        }
        let mut rules = rules;
        for rule in &mut rules {
            let sel = &rule.selector;
            if sel.modulus == 0 || sel.residue >= sel.modulus {
                return Err(SoltesError::InvalidSelector(format!(
                    "residue {} modulo {}",
                    sel.residue, sel.modulus
                )));
            }
            rule.s = validate_differences(n, rule.s.iter().copied())?;
        }
        let spec = RuleSpec {
            n,
            rules,
            include_backward,
        };
        for label in 1..=n {
            let matches = spec
                .rules
                .iter()
                .filter(|r| r.selector.matches(label))
                .count();
            if matches != 1 {
                return Err(SoltesError::SelectorOverlap {
                    vertex: label,
                    matches,
                });
            }
        }
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn include_backward(&self) -> bool {
        self.include_backward
    }

    /// Index of the rule governing internal vertex `v`.
    pub fn rule_index(&self, v: usize) -> usize {
        let label = internal_to_label(v, self.n);
        self.rules
            .iter()
            .position(|r| r.selector.matches(label))
            .expect("selectors partition the vertex set")
    }

    pub fn with_backward(&self, include_backward: bool) -> Self {
        RuleSpec {
            include_backward,
            ..self.clone()
        }
    }
}

/// 1-based display label of internal vertex `v`: `v` itself, except `0 -> n`.
pub fn internal_to_label(v: usize, n: usize) -> usize {
    if v == 0 {
        n
    } else {
        v
    }
}

pub fn label_to_internal(label: usize, n: usize) -> usize {
    label % n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min_out: usize,
    pub max_out: usize,
    pub min_in: usize,
    pub max_in: usize,
}

#[derive(Debug)]
enum Adjacency {
    Circulant {
        out_offsets: Vec<usize>,
        in_offsets: Vec<usize>,
    },
    Csr {
        out_start: Vec<usize>,
        out: Vec<u32>,
        in_start: Vec<usize>,
        inn: Vec<u32>,
    },
}

/// Where a digraph came from; drives JSON export and the circulant shortcuts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Circulant(CirculantSpec),
    Rule(RuleSpec),
    Arcs,
}

/// Immutable digraph on labels `0..n`, with an optional mask of deleted
/// vertices. Cloning is cheap; adjacency is shared.
#[derive(Debug, Clone)]
pub struct Digraph {
    n: usize,
    adj: Arc<Adjacency>,
    origin: Arc<Origin>,
    removed: Option<Arc<Vec<bool>>>,
    removed_count: usize,
}

pub fn build_circulant(spec: &CirculantSpec) -> Digraph {
    let n = spec.n;
    let mut out_offsets = Vec::with_capacity(spec.differences.len() + 1);
    out_offsets.push(n - 1);
    out_offsets.extend_from_slice(&spec.differences);
    let mut in_offsets = Vec::with_capacity(spec.differences.len() + 1);
    in_offsets.push(1);
    in_offsets.extend(spec.differences.iter().map(|&k| n - k));
    Digraph {
        n,
        adj: Arc::new(Adjacency::Circulant {
            out_offsets,
            in_offsets,
        }),
        origin: Arc::new(Origin::Circulant(spec.clone())),
        removed: None,
        removed_count: 0,
    }
}

pub fn build_rule_digraph(spec: &RuleSpec) -> Digraph {
    let n = spec.n;
    let mut out_lists: Vec<Vec<u32>> = Vec::with_capacity(n);
    for v in 0..n {
        let rule = &spec.rules[spec.rule_index(v)];
        let mut list: Vec<u32> = rule.s.iter().map(|&k| ((v + k) % n) as u32).collect();
        if spec.include_backward {
            list.push(((v + n - 1) % n) as u32);
        }
        list.sort_unstable();
        out_lists.push(list);
    }
    let mut g = Digraph::from_out_lists(n, out_lists);
    g.origin = Arc::new(Origin::Rule(spec.clone()));
    g
}

fn csr_from_lists(n: usize, lists: &[Vec<u32>]) -> (Vec<usize>, Vec<u32>) {
    let mut start = Vec::with_capacity(n + 1);
    let mut flat = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    start.push(0);
    for list in lists {
        flat.extend_from_slice(list);
        start.push(flat.len());
    }
    (start, flat)
}

impl Digraph {
    /// Builds a digraph from arbitrary arcs. Rejects self-loops, parallel
    /// arcs and labels outside `0..n`.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out_lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(SoltesError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(SoltesError::InvalidArc(u, v));
            }
            out_lists[u].push(v as u32);
        }
        for (u, list) in out_lists.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(SoltesError::InvalidArc(u, w[0] as usize));
            }
        }
        Ok(Self::from_out_lists(n, out_lists))
    }

    fn from_out_lists(n: usize, out_lists: Vec<Vec<u32>>) -> Self {
        let mut in_lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, list) in out_lists.iter().enumerate() {
            for &v in list {
                in_lists[v as usize].push(u as u32);
            }
        }
        let (out_start, out) = csr_from_lists(n, &out_lists);
        let (in_start, inn) = csr_from_lists(n, &in_lists);
        Digraph {
            n,
            adj: Arc::new(Adjacency::Csr {
                out_start,
                out,
                in_start,
                inn,
            }),
            origin: Arc::new(Origin::Arcs),
            removed: None,
            removed_count: 0,
        }
    }

    /// Size of the label space, including deleted labels.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices that are present.
    pub fn order(&self) -> usize {
        self.n - self.removed_count
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// The defining circulant spec, if this is an undeleted circulant.
    pub fn as_circulant(&self) -> Option<&CirculantSpec> {
        match (&*self.origin, self.removed_count) {
            (Origin::Circulant(spec), 0) => Some(spec),
            _ => None,
        }
    }

    pub fn has_deletions(&self) -> bool {
        self.removed_count > 0
    }

    #[inline]
    pub fn is_present(&self, v: usize) -> bool {
        v < self.n && self.removed.as_ref().map_or(true, |m| !m[v])
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.is_present(v))
    }

    pub(crate) fn removed_mask(&self) -> Option<&[bool]> {
        self.removed.as_deref().map(Vec::as_slice)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(SoltesError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else if !self.is_present(v) {
            Err(SoltesError::DeletedVertex(v))
        } else {
            Ok(())
        }
    }

    /// Out-neighbors of `v` in adjacency order. Callers must pass a present vertex.
    #[inline]
    pub fn out_iter(&self, v: usize) -> Neighbors<'_> {
        let kind = match &*self.adj {
            Adjacency::Circulant { out_offsets, .. } => NeighborKind::Offsets {
                it: out_offsets.iter(),
                base: v,
                n: self.n,
            },
            Adjacency::Csr { out_start, out, .. } => {
                NeighborKind::List(out[out_start[v]..out_start[v + 1]].iter())
            }
        };
        Neighbors {
            kind,
            removed: self.removed_mask(),
        }
    }

    /// In-neighbors of `v` in adjacency order. Callers must pass a present vertex.
    #[inline]
    pub fn in_iter(&self, v: usize) -> Neighbors<'_> {
        let kind = match &*self.adj {
            Adjacency::Circulant { in_offsets, .. } => NeighborKind::Offsets {
                it: in_offsets.iter(),
                base: v,
                n: self.n,
            },
            Adjacency::Csr { in_start, inn, .. } => {
                NeighborKind::List(inn[in_start[v]..in_start[v + 1]].iter())
            }
        };
        Neighbors {
            kind,
            removed: self.removed_mask(),
        }
    }

    pub fn out_neighbors(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut list: Vec<usize> = self.out_iter(v).collect();
        list.sort_unstable();
        Ok(list)
    }

    pub fn in_neighbors(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        let mut list: Vec<usize> = self.in_iter(v).collect();
        list.sort_unstable();
        Ok(list)
    }

    pub fn out_degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.out_iter(v).count())
    }

    pub fn in_degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.in_iter(v).count())
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.is_present(u) && self.is_present(v) && self.out_iter(u).any(|w| w == v)
    }

    pub fn arc_count(&self) -> usize {
        if !self.has_deletions() {
            return match &*self.adj {
                Adjacency::Circulant { out_offsets, .. } => self.n * out_offsets.len(),
                Adjacency::Csr { out, .. } => out.len(),
            };
        }
        self.vertices().map(|v| self.out_iter(v).count()).sum()
    }

    /// All arcs, sorted by source then target.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(self.arc_count());
        for u in self.vertices() {
            let mut targets: Vec<usize> = self.out_iter(u).collect();
            targets.sort_unstable();
            arcs.extend(targets.into_iter().map(|v| (u, v)));
        }
        arcs
    }

    /// Same vertex set with every arc reversed. Always materialized.
    pub fn transpose(&self) -> Digraph {
        let arcs = self.arcs().into_iter().map(|(u, v)| (v, u));
        let mut t = Digraph::from_arcs(self.n, arcs).expect("reversed arcs stay valid");
        if let Some(mask) = &self.removed {
            t.removed = Some(mask.clone());
            t.removed_count = self.removed_count;
        }
        t
    }

    /// Copies the present vertices into a fresh digraph on `0..order()`,
    /// preserving label order. Returns the digraph and the old label of each new one.
    pub fn compact(&self) -> (Digraph, Vec<usize>) {
        let old: Vec<usize> = self.vertices().collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let arcs = self.arcs().into_iter().map(|(u, v)| (new_of[u], new_of[v]));
        let g = Digraph::from_arcs(old.len(), arcs).expect("subgraph arcs stay valid");
        (g, old)
    }
}

pub fn delete_vertex(d: &Digraph, v: usize) -> Result<Digraph> {
    d.check_vertex(v)?;
    let mut mask = d
        .removed
        .as_deref()
        .cloned()
        .unwrap_or_else(|| vec![false; d.n]);
    mask[v] = true;
    Ok(Digraph {
        n: d.n,
        adj: d.adj.clone(),
        origin: d.origin.clone(),
        removed: Some(Arc::new(mask)),
        removed_count: d.removed_count + 1,
    })
}

pub fn degree_stats(d: &Digraph) -> DegreeStats {
    let mut stats: Option<DegreeStats> = None;
    for v in d.vertices() {
        let out = d.out_iter(v).count();
        let inn = d.in_iter(v).count();
        stats = Some(match stats {
            None => DegreeStats {
                min_out: out,
                max_out: out,
                min_in: inn,
                max_in: inn,
            },
            Some(s) => DegreeStats {
                min_out: s.min_out.min(out),
                max_out: s.max_out.max(out),
                min_in: s.min_in.min(inn),
                max_in: s.max_in.max(inn),
            },
        });
    }
    stats.unwrap_or(DegreeStats {
        min_out: 0,
        max_out: 0,
        min_in: 0,
        max_in: 0,
    })
}

enum NeighborKind<'a> {
    Offsets {
        it: std::slice::Iter<'a, usize>,
        base: usize,
        n: usize,
    },
    List(std::slice::Iter<'a, u32>),
}

pub struct Neighbors<'a> {
    kind: NeighborKind<'a>,
    removed: Option<&'a [bool]>,
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            let w = match &mut self.kind {
                NeighborKind::Offsets { it, base, n } => {
                    let off = *it.next()?;
                    let w = *base + off;
                    if w >= *n {
                        w - *n
                    } else {
                        w
                    }
                }
                NeighborKind::List(it) => *it.next()? as usize,
            };
            match self.removed {
                Some(mask) if mask[w] => continue,
                _ => return Some(w),
            }
        }
    }
}
