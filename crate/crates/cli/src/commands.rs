use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dsai::dp::{solve_with, Algorithm, DpConfig, ExhaustiveSolver};
use dsai::format::{parse_document, parse_dimacs_cnf, parse_instance, parse_vertex_list, write_instance};
use dsai::kernel::{kernelize as kernelize_instance, reduce_r4, KeepRule, KernelConfig};
use dsai::oracle::{annotated_ds_exact, colourful_ds_exact, sat_brute};
use dsai::{ds_exact, is_dominating, Instance, Vertex, VertexSet};
use serde_json::{json, Value};

use crate::{Algo, KernelizeArgs, OracleKind, SolveArgs, VerifyArgs};

pub const SCHEMA: u32 = 1;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn one_based<'a>(vs: impl IntoIterator<Item = &'a Vertex>) -> Vec<usize> {
    vs.into_iter().map(|v| v + 1).collect()
}

fn verdict(yes: bool) -> &'static str {
    if yes {
        "YES"
    } else {
        "NO"
    }
}

pub fn solve(a: &SolveArgs) -> Result<u8> {
    let inst = load_instance(&a.input)?;
    let (yes, mut out, witness) = match a.algo {
        Algo::Oracle => {
            inst.validate()?;
            let sol = ds_exact(&inst.graph);
            let yes = sol.size as i64 <= inst.budget;
            (yes, json!({ "ds_size": sol.size }), sol.witness)
        }
        Algo::Dp | Algo::Xp => {
            let algo = if a.algo == Algo::Dp {
                Algorithm::Above3
            } else {
                Algorithm::Xp
            };
            let cfg = DpConfig {
                mask_width_guard: a.mask_width_guard,
                residual_guard: a.residual_guard,
                ..DpConfig::default()
            };
            let sol = solve_with(&inst, algo, &cfg, &ExhaustiveSolver)
                .with_context(|| "the dynamic program needs r >= 3; use --algo oracle otherwise")?;
            let out = json!({
                "ds_size": sol.ds_size,
                "branch": {
                    "D_R": one_based(&sol.branch.residual_choice),
                    "covered": sol.branch.covered.iter().map(|t| one_based(t)).collect::<Vec<_>>(),
                },
                "stats": sol.stats,
            });
            (sol.verdict, out, sol.witness)
        }
    };
    out["schema"] = json!(SCHEMA);
    out["verdict"] = json!(verdict(yes));
    out["witness"] = json!(one_based(&witness));
    println!("{}", serde_json::to_string_pretty(&out)?);
    if let Some(p) = &a.witness {
        let ids: Vec<String> = one_based(&witness).iter().map(usize::to_string).collect();
        write(Some(p), &format!("{}\n", ids.join(" ")))?;
    }
    Ok(if yes { 0 } else { 1 })
}

pub fn kernelize(a: &KernelizeArgs) -> Result<u8> {
    let mut inst = load_instance(&a.input)?;
    let mut r4_removed = Vec::new();
    let mut r4_map: Option<Vec<Vertex>> = None;
    if a.r4 {
        let red = reduce_r4(&inst)?;
        r4_removed = one_based(&red.removed_centers);
        r4_map = Some(red.vertex_map);
        inst = red.instance;
    }
    let tau = a.tau.unwrap_or_else(|| inst.graph.degeneracy());
    let cfg = KernelConfig {
        boundary_cap: a.rprime_cap,
        keep: if a.strict_paper {
            KeepRule::Residual
        } else {
            KeepRule::Boundary
        },
    };
    let rep = kernelize_instance(&inst, tau, &cfg)?;
    let to_original = |v: Vertex| r4_map.as_ref().map_or(v, |m| m[v]);
    let mut report = serde_json::to_value(&rep)?;
    report["schema"] = json!(SCHEMA);
    report["vertex_map"] = json!(rep.vertex_map.iter().map(|&v| to_original(v) + 1).collect::<Vec<_>>());
    report["large_balls"] = json!(rep.large_balls.iter().map(|&v| to_original(v) + 1).collect::<Vec<_>>());
    report["reduced_budget"] = json!(rep.reduced.budget);
    report["reduced_vertices"] = json!(rep.reduced.graph.vertex_count());
    report["reduced_edges"] = json!(rep.reduced.graph.edge_count());
    report["verdict"] = rep.verdict.map_or(Value::Null, |v| json!(verdict(v)));
    if a.r4 {
        report["r4_removed_centers"] = json!(r4_removed);
    }
    for g in report["small_ball_groups"].as_array_mut().into_iter().flatten() {
        let trace: Vec<usize> = serde_json::from_value(g["trace"].clone())?;
        g["trace"] = json!(trace.iter().map(|&v| to_original(v) + 1).collect::<Vec<_>>());
    }
    for b in report["ball_stats"].as_array_mut().into_iter().flatten() {
        let c: usize = serde_json::from_value(b["center"].clone())?;
        b["center"] = json!(to_original(c) + 1);
    }
    write(a.output.as_deref(), &write_instance(&rep.reduced))?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &a.report {
        Some(p) => write(Some(p), &text)?,
        None => eprint!("{text}"),
    }
    Ok(0)
}

fn read_witness(path: &Path, n: usize) -> Result<VertexSet> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)?;
        let ids: Vec<usize> = serde_json::from_value(v["witness"].clone()).context("no `witness` array")?;
        let mut out = VertexSet::new();
        for id in ids {
            if id == 0 || id > n {
                bail!("witness vertex {id} outside 1..={n}");
            }
            out.insert(id - 1);
        }
        Ok(out)
    } else {
        Ok(parse_vertex_list(&text, n)?)
    }
}

pub fn verify(a: &VerifyArgs) -> Result<u8> {
    let inst = load_instance(&a.input)?;
    let violations: Vec<String> = inst.violations().iter().map(ToString::to_string).collect();
    let mut out = json!({
        "schema": SCHEMA,
        "n": inst.graph.vertex_count(),
        "m": inst.graph.edge_count(),
        "x": inst.x_set.len(),
        "residual": inst.residual().len(),
        "valid": violations.is_empty(),
        "violations": violations,
    });
    let mut ok = violations.is_empty();
    if ok && inst.radius >= 2 {
        out["trivial_verdict"] = inst.trivial_verdict()?.map_or(Value::Null, |v| json!(verdict(v)));
    }
    if let Some(p) = &a.witness {
        let w = read_witness(p, inst.graph.vertex_count())?;
        let dominating = is_dominating(&inst.graph, &w)?;
        let within = w.len() as i64 <= inst.budget;
        out["witness_size"] = json!(w.len());
        out["witness_dominating"] = json!(dominating);
        out["witness_within_budget"] = json!(within);
        ok &= dominating && within;
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if ok { 0 } else { 1 })
}

pub fn oracle(kind: &OracleKind) -> Result<u8> {
    let out = match kind {
        OracleKind::Ds { input } => {
            let doc = parse_document(&read(input)?)?;
            let sol = ds_exact(&doc.graph);
            json!({ "ds_size": sol.size, "witness": one_based(&sol.witness) })
        }
        OracleKind::Annotated { input, cap } => {
            let doc = parse_document(&read(input)?)?;
            match annotated_ds_exact(&doc.into_annotated(*cap)) {
                Some(sol) => json!({ "feasible": true, "size": sol.size, "witness": one_based(&sol.witness) }),
                None => json!({ "feasible": false }),
            }
        }
        OracleKind::Colourful { input } => {
            let c = parse_document(&read(input)?)?.into_colourful()?;
            match colourful_ds_exact(&c) {
                Some(pick) => json!({ "feasible": true, "pick": one_based(&pick) }),
                None => json!({ "feasible": false }),
            }
        }
        OracleKind::Sat { cnf } => {
            let f = parse_dimacs_cnf(&read(cnf)?)?;
            match sat_brute(&f)? {
                Some(a) => json!({ "satisfiable": true, "assignment": a }),
                None => json!({ "satisfiable": false }),
            }
        }
    };
    let mut out = out;
    out["schema"] = json!(SCHEMA);
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(0)
}
