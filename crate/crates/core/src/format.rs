//! Text formats. All ids in files are 1-based.
//!
//! `.dsai`:
//!
//! ```text
//! # comment
//! p dsai <n> <m> [<r> <p>]
//! e <u> <v>        one line per edge, exactly m of them
//! x <v>            member of X
//! col <i> <v>      v belongs to colour class i (0 is the set to dominate)
//! y <v>            exempt vertex of an annotated instance
//! grp <i> <v>      v belongs to required group i
//! ```
//!
//! DIMACS CNF: `p cnf <vars> <clauses>` followed by zero-terminated clauses.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, Vertex, VertexSet};
use crate::instance::Instance;
use crate::oracle::{AnnotatedInstance, CnfFormula, ColourfulInstance};

/// Everything a `.dsai` file can carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub graph: Graph,
    pub radius: Option<usize>,
    pub budget: Option<i64>,
    pub x_set: VertexSet,
    pub colours: BTreeMap<Vertex, usize>,
    pub exempt: VertexSet,
    pub groups: BTreeMap<usize, VertexSet>,
}

impl Document {
    pub fn from_graph(graph: Graph) -> Self {
        Document {
            graph,
            radius: None,
            budget: None,
            x_set: VertexSet::new(),
            colours: BTreeMap::new(),
            exempt: VertexSet::new(),
            groups: BTreeMap::new(),
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Document {
            radius: Some(inst.radius),
            budget: Some(inst.budget),
            x_set: inst.x_set.clone(),
            ..Document::from_graph(inst.graph.clone())
        }
    }

    pub fn from_colourful(c: &ColourfulInstance) -> Self {
        let mut doc = Document::from_graph(c.graph.clone());
        for (i, b) in c.blocks.iter().enumerate() {
            doc.colours.extend(b.iter().map(|&v| (v, i)));
        }
        doc
    }

    pub fn into_instance(self) -> Result<Instance> {
        let (Some(r), Some(p)) = (self.radius, self.budget) else {
            return Err(Error::Input("the header carries no radius and budget".into()));
        };
        Ok(Instance::new(self.graph, self.x_set, r, p))
    }

    /// Colour classes `0..=k`, `k` being the largest colour used. Vertices
    /// without a `col` line belong to class 0.
    pub fn into_colourful(self) -> Result<ColourfulInstance> {
        let k = self.colours.values().copied().max().unwrap_or(0);
        let colours: Vec<usize> = self
            .graph
            .vertices()
            .map(|v| self.colours.get(&v).copied().unwrap_or(0))
            .collect();
        ColourfulInstance::from_colours(self.graph, &colours, k)
    }

    pub fn into_annotated(self, size_cap: Option<usize>) -> AnnotatedInstance {
        AnnotatedInstance {
            graph: self.graph,
            exempt: self.exempt,
            required_groups: self.groups.into_values().collect(),
            size_cap,
        }
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} `{tok}`"),
    })
}

fn vertex(tok: Option<&str>, line: usize, n: usize) -> Result<Vertex> {
    let v: usize = field(tok, line, "vertex id")?;
    if v == 0 || v > n {
        return Err(Error::Parse {
            line,
            msg: format!("vertex {v} outside 1..={n}"),
        });
    }
    Ok(v - 1)
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder = GraphBuilder::new(0);
    let mut doc = Document::from_graph(Graph::empty(0));
    let mut edges = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tok = content.split_whitespace();
        let kind = tok.next().unwrap();
        if kind == "p" {
            if header.is_some() {
                return Err(Error::Parse { line, msg: "second header".into() });
            }
            if tok.next() != Some("dsai") {
                return Err(Error::Parse { line, msg: "expected `p dsai`".into() });
            }
            let n = field(tok.next(), line, "vertex count")?;
            let m = field(tok.next(), line, "edge count")?;
            if let Some(r) = tok.next() {
                doc.radius = Some(field(Some(r), line, "radius")?);
                doc.budget = Some(field(tok.next(), line, "budget")?);
            }
            header = Some((n, m));
            builder = GraphBuilder::new(n);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::Parse { line, msg: "data before the header".into() });
        };
        match kind {
            "e" => {
                let u = vertex(tok.next(), line, n)?;
                let v = vertex(tok.next(), line, n)?;
                if u == v {
                    return Err(Error::Parse { line, msg: format!("self-loop at {}", u + 1) });
                }
                if !builder.add_edge(u, v)? {
                    return Err(Error::Parse {
                        line,
                        msg: format!("duplicate edge {} {}", u + 1, v + 1),
                    });
                }
                edges += 1;
            }
            "x" => {
                doc.x_set.insert(vertex(tok.next(), line, n)?);
            }
            "y" => {
                doc.exempt.insert(vertex(tok.next(), line, n)?);
            }
            "col" => {
                let c = field(tok.next(), line, "colour")?;
                let v = vertex(tok.next(), line, n)?;
                if doc.colours.insert(v, c).is_some_and(|old| old != c) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("vertex {} has two colours", v + 1),
                    });
                }
            }
            "grp" => {
                let g = field(tok.next(), line, "group index")?;
                let v = vertex(tok.next(), line, n)?;
                doc.groups.entry(g).or_default().insert(v);
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown line type `{other}`"),
                })
            }
        }
        if tok.next().is_some() {
            return Err(Error::Parse { line, msg: "trailing tokens".into() });
        }
    }
    let Some((_, m)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing `p dsai` header".into() });
    };
    if edges != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header announces {m} edges, found {edges}"),
        });
    }
    doc.graph = builder.build();
    Ok(doc)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_document(text)?.into_instance()
}

pub fn write_document(doc: &Document) -> String {
    let g = &doc.graph;
    let mut out = String::new();
    write!(out, "p dsai {} {}", g.vertex_count(), g.edge_count()).unwrap();
    if let (Some(r), Some(p)) = (doc.radius, doc.budget) {
        write!(out, " {r} {p}").unwrap();
    }
    out.push('\n');
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    for &x in &doc.x_set {
        writeln!(out, "x {}", x + 1).unwrap();
    }
    for (&v, &c) in &doc.colours {
        writeln!(out, "col {c} {}", v + 1).unwrap();
    }
    for &v in &doc.exempt {
        writeln!(out, "y {}", v + 1).unwrap();
    }
    for (&i, grp) in &doc.groups {
        for &v in grp {
            writeln!(out, "grp {i} {}", v + 1).unwrap();
        }
    }
    out
}

pub fn write_instance(inst: &Instance) -> String {
    write_document(&Document::from_instance(inst))
}

/// Whitespace or comma separated 1-based ids; `#` starts a comment.
pub fn parse_vertex_list(text: &str, n: usize) -> Result<VertexSet> {
    let mut out = VertexSet::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for tok in content.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            out.insert(vertex(Some(tok), i + 1, n)?);
        }
    }
    Ok(out)
}

pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        if content.starts_with('%') {
            break;
        }
        if content.starts_with('p') {
            let mut tok = content.split_whitespace().skip(1);
            if tok.next() != Some("cnf") {
                return Err(Error::Parse { line, msg: "expected `p cnf`".into() });
            }
            header = Some((field(tok.next(), line, "variable count")?, field(tok.next(), line, "clause count")?));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::Parse { line, msg: "clause before the header".into() });
        };
        for tok in content.split_whitespace() {
            let lit: i32 = field(Some(tok), line, "literal")?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n {
                return Err(Error::Parse {
                    line,
                    msg: format!("literal {lit} outside 1..={n}"),
                });
            } else {
                current.push(lit);
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing `p cnf` header".into() });
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::new(n, clauses)
}

pub fn write_dimacs_cnf(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.variable_count, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{planted_instance, random_instance, BudgetPolicy, PlantedConfig, RandomModel};
    use proptest::prelude::*;

    #[test]
    fn parses_small_instance() {
        let text = "# path\np dsai 3 2 3 1\ne 1 2\ne 2 3\nx 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.graph.edge_count(), 2);
        assert_eq!(inst.x_set, VertexSet::from([0]));
        assert_eq!((inst.radius, inst.budget), (3, 1));
        assert_eq!(write_instance(&inst), text.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "e 1 2\n",
            "p dsai 2 1 2 1\ne 1 3\n",
            "p dsai 2 2 2 1\ne 1 2\ne 2 1\n",
            "p dsai 2 2 2 1\ne 1 2\n",
            "p dsai 2 0 2 1\nz 1\n",
            "p dsai 2 1 2 1\ne 1 1\n",
            "p dsai 2 0 2 1\nx 1 2\n",
        ] {
            assert!(matches!(parse_instance(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
        assert!(matches!(parse_instance("p dsai 1 0\n"), Err(Error::Input(_))));
    }

    #[test]
    fn colourful_and_annotated_documents() {
        let doc = parse_document("p dsai 3 2\ne 1 2\ne 1 3\ncol 1 2\ncol 2 3\ny 3\ngrp 0 2\n").unwrap();
        let c = doc.clone().into_colourful().unwrap();
        assert_eq!(c.colour_count(), 2);
        assert_eq!(c.blocks[0], VertexSet::from([0]));
        assert_eq!(Document::from_colourful(&c).colours.len(), 3);
        let a = doc.into_annotated(None);
        assert_eq!(a.exempt, VertexSet::from([2]));
        assert_eq!(a.required_groups, vec![VertexSet::from([1])]);
    }

    #[test]
    fn vertex_lists() {
        assert_eq!(parse_vertex_list("1, 3\n# x\n2", 3).unwrap(), VertexSet::from([0, 1, 2]));
        assert!(parse_vertex_list("4", 3).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c demo\np cnf 3 2\n1 -2\n 3 0 -1\n0\n";
        let f = parse_dimacs_cnf(text).unwrap();
        assert_eq!(f.clauses, vec![vec![1, -2, 3], vec![-1]]);
        assert_eq!(parse_dimacs_cnf(&write_dimacs_cnf(&f)).unwrap(), f);
        assert!(parse_dimacs_cnf("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs_cnf("p cnf 1 1\n2 0\n").is_err());
    }

    proptest! {
        #[test]
        fn instance_round_trip(seed in any::<u64>(), n in 1usize..30, planted in any::<bool>()) {
            let inst = if planted {
                planted_instance(&PlantedConfig::default(), seed, BudgetPolicy::AboveX(1))
            } else {
                random_instance(n, RandomModel::ErdosRenyi { p: 0.2 }, 2, seed, BudgetPolicy::AboveX(0))
            };
            prop_assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
        }
    }
}
