//! Edge-list, JSON-spec and DOT formats.
//!
//! Edge lists hold one `u v` pair per line, 0-based, sorted by source then
//! target. An optional `# n=<order>` comment line fixes the order so that
//! isolated vertices survive a round trip; other `#` lines are ignored.
//!
//! JSON specs are tagged by `kind`: `circulant` (`n`, `s`), `rule` (`n`,
//! `include_backward`, `rules`) or `arcs` (`n`, `arcs`).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digraph::{
    build_circulant, build_rule_digraph, internal_to_label, CirculantSpec, Digraph, Origin,
    RuleSpec,
};
use crate::error::{Result, SoltesError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DigraphSpec {
    Circulant(CirculantSpec),
    Rule(RuleSpec),
    Arcs { n: usize, arcs: Vec<(usize, usize)> },
}

impl DigraphSpec {
    pub fn build(&self) -> Result<Digraph> {
        match self {
            DigraphSpec::Circulant(spec) => Ok(build_circulant(spec)),
            DigraphSpec::Rule(spec) => Ok(build_rule_digraph(spec)),
            DigraphSpec::Arcs { n, arcs } => Digraph::from_arcs(*n, arcs.iter().copied()),
        }
    }

    /// Spec reproducing `d`. Digraphs with deleted vertices are relabelled compactly.
    pub fn of(d: &Digraph) -> Self {
        if d.has_deletions() {
            let (c, _) = d.compact();
            return DigraphSpec::Arcs {
                n: c.n(),
                arcs: c.arcs(),
            };
        }
        match d.origin() {
            Origin::Circulant(spec) => DigraphSpec::Circulant(spec.clone()),
            Origin::Rule(spec) => DigraphSpec::Rule(spec.clone()),
            Origin::Arcs => DigraphSpec::Arcs {
                n: d.n(),
                arcs: d.arcs(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    EdgeList,
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = SoltesError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edges" => Ok(Format::EdgeList),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(SoltesError::Parse(format!("unknown format {other:?}"))),
        }
    }
}

fn compacted(d: &Digraph) -> Digraph {
    if d.has_deletions() {
        d.compact().0
    } else {
        d.clone()
    }
}

pub fn write_edge_list(d: &Digraph) -> String {
    let d = compacted(d);
    let mut out = format!("# n={}\n", d.n());
    for (u, v) in d.arcs() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Digraph> {
    let mut declared = None;
    let mut arcs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("n=") {
                declared = Some(n.trim().parse::<usize>().map_err(|e| {
                    SoltesError::Parse(format!("line {}: bad order: {e}", lineno + 1))
                })?);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = || -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| SoltesError::Parse(format!("line {}: expected `u v`", lineno + 1)))?
                .parse::<usize>()
                .map_err(|e| SoltesError::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let (u, v) = (next()?, next()?);
        if fields.next().is_some() {
            return Err(SoltesError::Parse(format!(
                "line {}: trailing fields",
                lineno + 1
            )));
        }
        arcs.push((u, v));
    }
    let inferred = arcs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(inferred);
    Digraph::from_arcs(n, arcs)
}

pub fn write_json(d: &Digraph) -> String {
    let mut s = serde_json::to_string(&DigraphSpec::of(d)).expect("spec serializes");
    s.push('\n');
    s
}

pub fn parse_json_spec(text: &str) -> Result<Digraph> {
    let spec: DigraphSpec =
        serde_json::from_str(text).map_err(|e| SoltesError::Parse(e.to_string()))?;
    spec.build()
}

/// Graphviz output; `one_based` prints the 1-based labels (0 shown as `n`).
pub fn write_dot(d: &Digraph, one_based: bool) -> String {
    let d = compacted(d);
    let n = d.n();
    let label = |v: usize| {
        if one_based {
            internal_to_label(v, n)
        } else {
            v
        }
    };
    let mut out = String::from("digraph D {\n");
    for v in d.vertices() {
        let _ = writeln!(out, "  {};", label(v));
    }
    for (u, v) in d.arcs() {
        let _ = writeln!(out, "  {} -> {};", label(u), label(v));
    }
    out.push_str("}\n");
    out
}

pub fn write(d: &Digraph, format: Format, one_based: bool) -> String {
    match format {
        Format::EdgeList => write_edge_list(d),
        Format::Json => write_json(d),
        Format::Dot => write_dot(d, one_based),
    }
}

/// Reads an edge list or JSON spec, deciding by content.
pub fn parse_any(text: &str) -> Result<Digraph> {
    if text.trim_start().starts_with('{') {
        parse_json_spec(text)
    } else {
        parse_edge_list(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::appendix_c_spec;
    use crate::digraph::delete_vertex;

    fn circ(n: usize, s: &[usize]) -> Digraph {
        build_circulant(&CirculantSpec::new(n, s.iter().copied()).unwrap())
    }

    #[test]
    fn edge_list_round_trip() {
        let g = circ(85, &[4]);
        let text = write_edge_list(&g);
        assert!(text.starts_with("# n=85\n0 4\n0 84\n1 0\n"));
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(back.arcs(), g.arcs());
        assert_eq!(write_edge_list(&back), text);
    }

    #[test]
    fn json_round_trip() {
        let g = circ(85, &[4]);
        let text = write_json(&g);
        assert_eq!(text, "{\"kind\":\"circulant\",\"n\":85,\"s\":[4]}\n");
        assert_eq!(parse_json_spec(&text).unwrap().arcs(), g.arcs());

        let spec = appendix_c_spec(true);
        let g = build_rule_digraph(&spec);
        let text = write_json(&g);
        let back = parse_json_spec(&text).unwrap();
        for v in 0..3306 {
            assert_eq!(back.out_neighbors(v).unwrap(), g.out_neighbors(v).unwrap());
        }
        assert_eq!(write_json(&back), text);
    }

    #[test]
    fn json_rejects_invalid_specs() {
        assert!(parse_json_spec("{\"kind\":\"circulant\",\"n\":5,\"s\":[4]}").is_err());
        assert!(parse_json_spec("{\"kind\":\"blob\"}").is_err());
        let overlap = r#"{"kind":"rule","n":4,"rules":[
            {"selector":{"modulus":1,"residue":0},"s":[1]},
            {"selector":{"modulus":2,"residue":0},"s":[2]}]}"#;
        assert!(parse_json_spec(overlap).is_err());
    }

    #[test]
    fn dot_arc_lines() {
        let dot = write_dot(&circ(11, &[1]), false);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 22);
        let dot = write_dot(&circ(5, &[1]), true);
        assert!(dot.contains("  5 -> 1;"));
    }

    #[test]
    fn edge_list_errors() {
        assert!(parse_edge_list("0 1\n1 x\n").is_err());
        assert!(parse_edge_list("0 1 2\n").is_err());
        assert!(parse_edge_list("0 0\n").is_err());
        assert_eq!(parse_edge_list("# n=5\n0 1\n").unwrap().n(), 5);
        assert!("png".parse::<Format>().is_err());
    }

    #[test]
    fn deleted_views_export_compactly() {
        let g = delete_vertex(&circ(5, &[1]), 0).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(text, "# n=4\n0 1\n1 0\n1 2\n2 1\n2 3\n3 2\n");
    }
}
