use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use dsai::dp::solve_above3;
use dsai::kernel::{kernelize, KernelConfig};
use dsai::{ds_exact, Instance};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::load_instance;
use crate::BenchArgs;

#[derive(Debug, Default, Serialize)]
pub struct Row {
    pub file: String,
    pub n: usize,
    pub m: usize,
    pub x: usize,
    pub residual: usize,
    pub branches: Option<usize>,
    pub dp_ms: Option<f64>,
    pub dp_ds: Option<usize>,
    pub shrink_ratio: Option<f64>,
    pub oracle_ms: Option<f64>,
    pub oracle_ds: Option<usize>,
    pub agree: Option<bool>,
    pub error: String,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn measure(file: String, inst: &Instance, args: &BenchArgs) -> Row {
    let mut row = Row {
        file,
        n: inst.graph.vertex_count(),
        m: inst.graph.edge_count(),
        x: inst.x_set.len(),
        residual: inst.residual().len(),
        ..Row::default()
    };
    let mut errors = Vec::new();
    let start = Instant::now();
    match solve_above3(inst) {
        Ok(s) => {
            row.dp_ms = Some(ms(start));
            row.dp_ds = Some(s.ds_size);
            row.branches = Some(s.stats.residual_branches);
        }
        Err(e) => errors.push(format!("dp: {e}")),
    }
    if inst.radius >= 3 {
        match kernelize(inst, args.tau, &KernelConfig::default()) {
            Ok(k) if row.n > 0 => row.shrink_ratio = Some(k.reduced.graph.vertex_count() as f64 / row.n as f64),
            Ok(_) => {}
            Err(e) => errors.push(format!("kernel: {e}")),
        }
    }
    if row.n <= args.oracle_guard {
        let start = Instant::now();
        let ds = ds_exact(&inst.graph).size;
        row.oracle_ms = Some(ms(start));
        row.oracle_ds = Some(ds);
        row.agree = row.dp_ds.map(|d| d == ds);
    }
    row.error = errors.join("; ");
    row
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.corpus)
        .with_context(|| format!("reading {}", args.corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "dsai"))
        .collect();
    files.sort();
    let rows: Vec<Row> = files
        .par_iter()
        .map(|p| {
            let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match load_instance(p) {
                Ok(inst) => measure(name, &inst, args),
                Err(e) => Row {
                    file: name,
                    error: format!("{e:#}"),
                    ..Row::default()
                },
            }
        })
        .collect();
    let mut w = csv::Writer::from_path(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    if rows.is_empty() {
        w.write_record([
            "file", "n", "m", "x", "residual", "branches", "dp_ms", "dp_ds", "shrink_ratio", "oracle_ms", "oracle_ds",
            "agree", "error",
        ])?;
    }
    for r in &rows {
        if !r.error.is_empty() {
            eprintln!("{}: {}", r.file, r.error);
        }
        w.serialize(r)?;
    }
    w.flush()?;
    let disagreements = rows.iter().filter(|r| r.agree == Some(false)).count();
    eprintln!(
        "{} instances, {} compared with the oracle, {disagreements} disagreements",
        rows.len(),
        rows.iter().filter(|r| r.agree.is_some()).count()
    );
    Ok(if disagreements == 0 { 0 } else { 1 })
}
