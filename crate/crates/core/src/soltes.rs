//! Deletion deltas `W(D) - W(D - v)`, the z-Šoltés decision, and
//! executable checks of the structural statements about when the delta is
//! positive or negative.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::deletion::{circulant_deletion, deletion_totals, DeletionTotals};
use crate::digraph::{build_circulant, degree_stats, delete_vertex, CirculantSpec, Digraph};
use crate::distance::{all_pairs, wiener, wiener_deleted};
use crate::error::{Result, SoltesError};
use crate::progress::ProgressFn;

/// `W(D) - W(D - v)`, or the marker for `D - v` not being strongly connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaValue {
    Finite(i64),
    Disconnected,
}

impl DeltaValue {
    pub fn finite(self) -> Option<i64> {
        match self {
            DeltaValue::Finite(x) => Some(x),
            DeltaValue::Disconnected => None,
        }
    }
}

impl From<Option<i64>> for DeltaValue {
    fn from(x: Option<i64>) -> Self {
        x.map_or(DeltaValue::Disconnected, DeltaValue::Finite)
    }
}

impl fmt::Display for DeltaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaValue::Finite(x) => write!(f, "{x}"),
            DeltaValue::Disconnected => f.write_str("disconnected"),
        }
    }
}

impl Serialize for DeltaValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaValue::Finite(x) => s.serialize_i64(*x),
            DeltaValue::Disconnected => s.serialize_str("disconnected"),
        }
    }
}

/// Delta of a single vertex by brute force: `W(D)` and `W(D - v)` from scratch.
pub fn delta(d: &Digraph, v: usize) -> Result<DeltaValue> {
    d.check_vertex(v)?;
    let total = wiener(d)?;
    match wiener_deleted(d, v) {
        Ok(w) => Ok(DeltaValue::Finite(total as i64 - w as i64)),
        Err(SoltesError::NotStronglyConnected) => Ok(DeltaValue::Disconnected),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaEntry {
    pub v: usize,
    pub wiener_deleted: Option<u64>,
    pub delta: DeltaValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaProfile {
    pub wiener_total: u64,
    pub per_vertex: Vec<DeltaEntry>,
}

impl DeltaProfile {
    fn from_totals(d: &Digraph, totals: &DeletionTotals) -> Self {
        let per_vertex = d
            .vertices()
            .map(|v| DeltaEntry {
                v,
                wiener_deleted: totals.wiener_deleted(v),
                delta: totals.delta(v).into(),
            })
            .collect();
        DeltaProfile {
            wiener_total: totals.wiener,
            per_vertex,
        }
    }

    pub fn min_finite(&self) -> Option<i64> {
        self.per_vertex
            .iter()
            .filter_map(|e| e.delta.finite())
            .min()
    }

    pub fn max_finite(&self) -> Option<i64> {
        self.per_vertex
            .iter()
            .filter_map(|e| e.delta.finite())
            .max()
    }

    pub fn disconnected_count(&self) -> usize {
        self.per_vertex
            .iter()
            .filter(|e| e.delta == DeltaValue::Disconnected)
            .count()
    }

    /// The common delta when every entry is finite and equal.
    pub fn constant(&self) -> Option<i64> {
        let first = self.per_vertex.first()?.delta.finite()?;
        self.per_vertex
            .iter()
            .all(|e| e.delta == DeltaValue::Finite(first))
            .then_some(first)
    }

    pub fn histogram(&self) -> BTreeMap<DeltaValue, usize> {
        let mut h = BTreeMap::new();
        for e in &self.per_vertex {
            *h.entry(e.delta).or_insert(0) += 1;
        }
        h
    }

    /// Histogram with string keys, for JSON output.
    pub fn histogram_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .histogram()
            .into_iter()
            .map(|(k, c)| (k.to_string(), json!(c)))
            .collect();
        Value::Object(map)
    }
}

pub fn delta_profile(d: &Digraph) -> Result<DeltaProfile> {
    delta_profile_with_progress(d, None)
}

pub fn delta_profile_with_progress(
    d: &Digraph,
    progress: Option<ProgressFn<'_>>,
) -> Result<DeltaProfile> {
    let totals = deletion_totals(d, progress)?;
    Ok(DeltaProfile::from_totals(d, &totals))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    /// One vertex of a circulant; every vertex is equivalent under rotation.
    Symmetric,
    /// Every vertex.
    Exhaustive,
    /// `k` evenly spaced vertices, each checked by brute force.
    Sample(usize),
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Symmetric => f.write_str("symmetric"),
            Verification::Exhaustive => f.write_str("exhaustive"),
            Verification::Sample(k) => write!(f, "sample({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZSoltesVerdict {
    pub z: i64,
    pub holds: bool,
    pub witness: Option<usize>,
    pub witness_delta: Option<DeltaValue>,
    pub wiener: u64,
    pub mode: Verification,
    pub vertices_checked: usize,
    /// Delta range over the checked vertices.
    pub min_delta: Option<i64>,
    pub max_delta: Option<i64>,
    pub disconnected: usize,
    /// Delta value -> vertex count; exhaustive mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Value>,
}

/// Symmetric for circulants, exhaustive otherwise.
pub fn is_z_soltes(d: &Digraph, z: i64) -> Result<ZSoltesVerdict> {
    let mode = if d.as_circulant().is_some() {
        Verification::Symmetric
    } else {
        Verification::Exhaustive
    };
    is_z_soltes_with(d, z, mode, None)
}

pub fn is_z_soltes_with(
    d: &Digraph,
    z: i64,
    mode: Verification,
    progress: Option<ProgressFn<'_>>,
) -> Result<ZSoltesVerdict> {
    let checked: Vec<(usize, DeltaValue)>;
    let total;
    let mut histogram = None;
    match mode {
        Verification::Symmetric => {
            let spec = d.as_circulant().ok_or_else(|| {
                SoltesError::InvalidParameters(
                    "symmetric verification needs an undeleted circulant".into(),
                )
            })?;
            let sym = circulant_deletion(spec)?;
            total = sym.wiener();
            checked = vec![(0, sym.delta().into())];
        }
        Verification::Exhaustive => {
            let profile = delta_profile_with_progress(d, progress)?;
            total = profile.wiener_total;
            histogram = Some(profile.histogram_json());
            checked = profile.per_vertex.iter().map(|e| (e.v, e.delta)).collect();
        }
        Verification::Sample(k) => {
            let verts: Vec<usize> = d.vertices().collect();
            let k = k.clamp(1, verts.len());
            total = wiener(d)?;
            let mut out = Vec::with_capacity(k);
            for i in 0..k {
                let v = verts[i * verts.len() / k];
                out.push((v, delta(d, v)?));
            }
            checked = out;
        }
    }
    let witness = checked
        .iter()
        .find(|(_, dv)| *dv != DeltaValue::Finite(z))
        .copied();
    let finite = checked.iter().filter_map(|(_, dv)| dv.finite());
    Ok(ZSoltesVerdict {
        z,
        holds: witness.is_none(),
        witness: witness.map(|w| w.0),
        witness_delta: witness.map(|w| w.1),
        wiener: total,
        mode,
        vertices_checked: checked.len(),
        min_delta: finite.clone().min(),
        max_delta: finite.max(),
        disconnected: checked
            .iter()
            .filter(|(_, dv)| *dv == DeltaValue::Disconnected)
            .count(),
        histogram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

/// Machine-readable outcome of a property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Value,
    pub values: Value,
    pub summary: String,
}

impl Report {
    fn new(check: &str, verdict: Verdict, witness: Value, values: Value, summary: String) -> Self {
        Report {
            check: check.to_string(),
            verdict,
            witness,
            values,
            summary,
        }
    }
}

/// If `min indeg + min outdeg >= n >= 4`, then `D` and every `D - v` have
/// diameter 2 and every delta is positive. Any violation is a counterexample.
pub fn check_dense_positive(d: &Digraph) -> Result<Report> {
    const NAME: &str = "dense_positive";
    let n = d.order();
    let deg = degree_stats(d);
    let values = json!({"n": n, "min_in": deg.min_in, "min_out": deg.min_out});
    if n < 4 || deg.min_in + deg.min_out < n {
        return Ok(Report::new(
            NAME,
            Verdict::NotApplicable,
            Value::Null,
            values,
            format!(
                "degree hypothesis fails: {} + {} < {} or n < 4",
                deg.min_in, deg.min_out, n
            ),
        ));
    }
    let diam = all_pairs(d, None)?.diameter;
    if diam > 2 {
        return Ok(Report::new(
            NAME,
            Verdict::Fails,
            json!({"vertex": null, "diameter": diam}),
            values,
            format!("diameter {diam} > 2"),
        ));
    }
    let totals = deletion_totals(d, None)?;
    let mut deltas = Vec::with_capacity(n);
    for v in d.vertices() {
        let sub = delete_vertex(d, v)?;
        let sub_diam = all_pairs(&sub, None).ok().map(|ap| ap.diameter);
        let dv = DeltaValue::from(totals.delta(v));
        let ok =
            matches!(sub_diam, Some(x) if x <= 2) && matches!(dv, DeltaValue::Finite(x) if x > 0);
        if !ok {
            return Ok(Report::new(
                NAME,
                Verdict::Fails,
                json!({"vertex": v, "diameter_deleted": sub_diam, "delta": dv}),
                values,
                format!("vertex {v} violates: diameter(D - v) = {sub_diam:?}, delta = {dv}"),
            ));
        }
        deltas.push(dv);
    }
    Ok(Report::new(
        NAME,
        Verdict::Holds,
        Value::Null,
        json!({"n": n, "min_in": deg.min_in, "min_out": deg.min_out, "diameter": diam, "deltas": deltas}),
        format!("all {n} deltas positive, all diameters 2"),
    ))
}

/// A digraph of diameter at most 2 on more than one vertex has a vertex whose
/// deletion either disconnects it or shrinks the total distance.
pub fn check_diam2_existence(d: &Digraph) -> Result<Report> {
    const NAME: &str = "diam2_existence";
    let n = d.order();
    let diam = match all_pairs(d, None) {
        Ok(ap) => Some(ap.diameter),
        Err(SoltesError::NotStronglyConnected) => None,
        Err(e) => return Err(e),
    };
    if n <= 1 || !matches!(diam, Some(x) if x <= 2) {
        return Ok(Report::new(
            NAME,
            Verdict::NotApplicable,
            Value::Null,
            json!({"n": n, "diameter": diam}),
            format!("needs n > 1 and diameter <= 2, got n = {n}, diameter = {diam:?}"),
        ));
    }
    let totals = deletion_totals(d, None)?;
    let qualifying: Vec<(usize, DeltaValue)> = d
        .vertices()
        .map(|v| (v, DeltaValue::from(totals.delta(v))))
        .filter(|(_, dv)| match dv {
            DeltaValue::Disconnected => true,
            DeltaValue::Finite(x) => *x > 0,
        })
        .collect();
    let values = json!({
        "n": n,
        "diameter": diam,
        "qualifying": qualifying.iter().map(|(v, dv)| json!({"v": v, "delta": dv})).collect::<Vec<_>>(),
    });
    match qualifying.first() {
        Some(&(v, dv)) => Ok(Report::new(
            NAME,
            Verdict::Holds,
            json!({"vertex": v, "delta": dv}),
            values,
            format!(
                "vertex {v} qualifies (delta {dv}); {} qualifying in total",
                qualifying.len()
            ),
        )),
        None => Ok(Report::new(
            NAME,
            Verdict::Fails,
            Value::Null,
            values,
            "SHOULD_NOT_HAPPEN: no vertex disconnects or shrinks the total distance".into(),
        )),
    }
}

/// `max S <= sqrt(n) / 9`, decided in integers.
pub fn small_s_hypothesis(n: usize, max_s: usize) -> bool {
    81 * (max_s as u128) * (max_s as u128) <= n as u128
}

/// Exact delta of vertex 0 (hence every vertex) of `D(n, S)`.
pub fn circulant_delta(spec: &CirculantSpec) -> Result<DeltaValue> {
    Ok(circulant_deletion(spec)?.delta().into())
}

/// Sign of the delta of `D(n, S)` when `max S <= sqrt(n) / 9`.
pub fn check_small_s_negative(n: usize, s: &[usize]) -> Result<Report> {
    const NAME: &str = "small_s_negative";
    let spec = CirculantSpec::new(n, s.iter().copied())?;
    let max_s = spec.max_difference().unwrap_or(0);
    if !small_s_hypothesis(n, max_s) {
        return Ok(Report::new(
            NAME,
            Verdict::NotApplicable,
            Value::Null,
            json!({"n": n, "s": spec.differences(), "max_s": max_s}),
            format!("hypothesis fails: 81 * {max_s}^2 > {n}"),
        ));
    }
    let dv = circulant_delta(&spec)?;
    let negative = matches!(dv, DeltaValue::Finite(x) if x < 0);
    Ok(Report::new(
        NAME,
        if negative {
            Verdict::Holds
        } else {
            Verdict::Fails
        },
        Value::Null,
        json!({"n": n, "s": spec.differences(), "delta": dv}),
        format!("delta of D({n}, S) is {dv}"),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignRow {
    pub n: usize,
    pub hypothesis: bool,
    pub delta: DeltaValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignSweep {
    pub s: Vec<usize>,
    pub rows: Vec<SignRow>,
    /// First `n` from which every later delta is negative.
    pub negative_from: Option<usize>,
    /// Deltas strictly decrease from `negative_from` onwards.
    pub decreasing_after: bool,
}

/// Batch form of [`check_small_s_negative`]: deltas for increasing `n` and fixed `S`.
/// Rows are computed regardless of the hypothesis, which is recorded per row.
pub fn small_s_sign_sweep(s: &[usize], ns: &[usize]) -> Result<SignSweep> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let spec = CirculantSpec::new(n, s.iter().copied())?;
        let max_s = spec.max_difference().unwrap_or(0);
        rows.push(SignRow {
            n,
            hypothesis: small_s_hypothesis(n, max_s),
            delta: circulant_delta(&spec)?,
        });
    }
    let tail_start = rows
        .iter()
        .rposition(|r| !matches!(r.delta, DeltaValue::Finite(x) if x < 0))
        .map_or(0, |i| i + 1);
    let negative_from = rows.get(tail_start).map(|r| r.n);
    let decreasing_after = negative_from.is_some()
        && rows[tail_start..]
            .windows(2)
            .all(|w| w[1].delta.finite() < w[0].delta.finite());
    Ok(SignSweep {
        s: s.to_vec(),
        rows,
        negative_from,
        decreasing_after,
    })
}

/// Convenience for `D(n, S)` verification from raw parts.
pub fn circulant_is_z_soltes(
    n: usize,
    s: &[usize],
    z: i64,
    mode: Verification,
) -> Result<ZSoltesVerdict> {
    let d = build_circulant(&CirculantSpec::new(n, s.iter().copied())?);
    is_z_soltes_with(&d, z, mode, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(n: usize, s: &[usize]) -> Digraph {
        build_circulant(&CirculantSpec::new(n, s.iter().copied()).unwrap())
    }

    fn complete(n: usize) -> Digraph {
        Digraph::from_arcs(
            n,
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))),
        )
        .unwrap()
    }

    #[test]
    fn known_examples_have_zero_delta() {
        for (n, s) in [(11, vec![1]), (85, vec![4])] {
            let g = circ(n, &s);
            assert_eq!(delta(&g, 3).unwrap(), DeltaValue::Finite(0));
            let p = delta_profile(&g).unwrap();
            assert_eq!(p.per_vertex.len(), n);
            assert_eq!(p.constant(), Some(0));
            assert!(
                is_z_soltes_with(&g, 0, Verification::Exhaustive, None)
                    .unwrap()
                    .holds
            );
            assert!(is_z_soltes(&g, 0).unwrap().holds);
        }
    }

    #[test]
    fn five_cycle_fails_with_delta_ten() {
        let g = circ(5, &[1]);
        assert_eq!(delta(&g, 0).unwrap(), DeltaValue::Finite(10));
        let v = is_z_soltes(&g, 0).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness_delta, Some(DeltaValue::Finite(10)));
        assert!(is_z_soltes(&g, 10).unwrap().holds);
        let v = is_z_soltes_with(&g, 10, Verification::Sample(3), None).unwrap();
        assert!(v.holds);
        assert_eq!(v.vertices_checked, 3);
    }

    #[test]
    fn symmetric_mode_rejects_non_circulants() {
        let g = complete(4);
        assert!(is_z_soltes_with(&g, 0, Verification::Symmetric, None).is_err());
    }

    #[test]
    fn profile_marks_disconnections() {
        // directed 4-cycle 0->1->2->3->0 with chord 0->2: deleting 1 keeps it
        // strongly connected, deleting 2 or 3 does not.
        let g = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let p = delta_profile(&g).unwrap();
        assert!(p.disconnected_count() >= 2);
        assert_eq!(p.per_vertex[2].delta, DeltaValue::Disconnected);
        assert_eq!(delta(&g, 2).unwrap(), DeltaValue::Disconnected);
        assert_eq!(p.per_vertex[1].delta, delta(&g, 1).unwrap());
        assert!(
            !is_z_soltes(&g, p.per_vertex[1].delta.finite().unwrap())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn not_strongly_connected_is_an_error() {
        let path = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(delta(&path, 0), Err(SoltesError::NotStronglyConnected));
        assert_eq!(delta_profile(&path), Err(SoltesError::NotStronglyConnected));
    }

    #[test]
    fn dense_check_on_complete_digraph() {
        let r = check_dense_positive(&complete(5)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.values["deltas"], json!([8, 8, 8, 8, 8]));
        let r = check_dense_positive(&circ(85, &[4])).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn diam2_check() {
        let r = check_diam2_existence(&complete(4)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.values["qualifying"].as_array().unwrap().len(), 4);
        let r = check_diam2_existence(&circ(85, &[4])).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert_eq!(r.values["diameter"], json!(20));
    }

    #[test]
    fn small_s_hypothesis_arithmetic() {
        assert!(!small_s_hypothesis(11, 1));
        // sqrt(400) / 9 = 2.22 >= 2
        assert!(small_s_hypothesis(400, 2));
        assert!(small_s_hypothesis(1296, 2)); // sqrt(1296) / 9 = 4
        assert!(small_s_hypothesis(729, 3));
        assert!(!small_s_hypothesis(728, 3));
        assert_eq!(
            check_small_s_negative(11, &[1]).unwrap().verdict,
            Verdict::NotApplicable
        );
        assert_eq!(
            check_small_s_negative(399, &[3]).unwrap().verdict,
            Verdict::NotApplicable
        );
        let r = check_small_s_negative(1296, &[2]).unwrap();
        assert_ne!(r.verdict, Verdict::NotApplicable);
        assert!(r.values["delta"].is_i64());
    }

    #[test]
    fn sign_sweep_summary() {
        let sw = small_s_sign_sweep(&[1, 2, 3], &[100, 50, 200]).unwrap();
        assert_eq!(
            sw.rows.iter().map(|r| r.n).collect::<Vec<_>>(),
            vec![50, 100, 200]
        );
        assert_eq!(sw.rows[0].delta, DeltaValue::Finite(226));
        assert_eq!(sw.negative_from, Some(100));
        assert!(sw.decreasing_after);
    }
}
