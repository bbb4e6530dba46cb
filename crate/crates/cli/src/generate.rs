use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Subcommand, ValueEnum};
use dsai::format::{parse_dimacs_cnf, parse_document, write_dimacs_cnf, write_instance};
use dsai::generators::{
    apex_from_planar_3sat, from_34sat, from_3sat, from_colourful, planted_instance, random_34cnf, random_cnf,
    random_instance, BudgetPolicy, GadgetMap, PlantedConfig, RandomModel,
};
use dsai::Instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::commands::{read, write};
use crate::GenerateArgs;

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Model {
    /// Each pair is an edge with probability `param`.
    Er,
    /// Random edges with maximum degree `param`.
    Bounded,
    /// Stacked triangulation, each edge kept with probability `param`.
    Planar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CorpusKind {
    /// Random graphs with r = 3, small enough for the exact oracle.
    Random,
    /// Planted balls with replicated shapes, r = 3.
    Planted,
}

#[derive(Subcommand, Debug)]
pub enum Kind {
    /// Variable triangles and clause vertices, r = 2 and R = {y3}.
    #[command(name = "3sat")]
    ThreeSat {
        #[arg(long)]
        cnf: PathBuf,
        /// Mark the output as built from a planar formula.
        #[arg(long)]
        apex: bool,
    },
    /// Bounded-degree variant for (3,4)-SAT formulas.
    #[command(name = "34sat")]
    ThreeFourSat {
        #[arg(long)]
        cnf: PathBuf,
    },
    /// From a `.dsai` file whose `col` lines give the colour classes.
    Colourful {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Random graph with a greedy maximal r-independent set.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "er")]
        model: Model,
        #[arg(long, default_value_t = 0.2)]
        param: f64,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Fixed budget; by default the exact optimum for n <= 20, else
        /// |X| + |R|/2.
        #[arg(long)]
        budget: Option<i64>,
    },
    /// Balls around planted centres sharing a residual pool (r = 3).
    Planted {
        #[arg(long, default_value_t = 3)]
        templates: usize,
        #[arg(long, default_value_t = 1)]
        copies_min: usize,
        #[arg(long, default_value_t = 3)]
        copies_max: usize,
        #[arg(long, default_value_t = 3)]
        leaves_max: usize,
        #[arg(long, default_value_t = 4)]
        pool: usize,
        #[arg(long, default_value_t = 2)]
        max_trace: usize,
        #[arg(long)]
        budget: Option<i64>,
    },
    /// Random DIMACS formula.
    Cnf {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Three distinct variables per clause, each in at most four clauses.
        #[arg(long)]
        bounded: bool,
    },
    /// A directory of seeded instances for `bench`.
    Corpus {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value = "random")]
        kind: CorpusKind,
    },
}

fn policy(budget: Option<i64>) -> BudgetPolicy {
    budget.map_or(BudgetPolicy::Auto, BudgetPolicy::Fixed)
}

fn emit(a: &GenerateArgs, inst: &Instance, map: Option<&GadgetMap>) -> Result<()> {
    write(a.output.as_deref(), &write_instance(inst))?;
    if let (Some(path), Some(map)) = (&a.map, map) {
        let shifted = serde_json::json!({
            "schema": crate::commands::SCHEMA,
            "one_based": true,
            "map": shift_ids(serde_json::to_value(map)?),
        });
        write(Some(path), &(serde_json::to_string_pretty(&shifted)? + "\n"))?;
    }
    Ok(())
}

/// Adds one to every integer in a role map, leaving the flag alone.
fn shift_ids(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) => Value::from(n.as_u64().map_or(0, |x| x + 1)),
        Value::Array(a) => Value::Array(a.into_iter().map(shift_ids).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, shift_ids(v))).collect()),
        other => other,
    }
}

fn write_corpus(dir: &Path, count: usize, kind: CorpusKind, seed: u64) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for i in 0..count {
        let s = seed.wrapping_add(i as u64);
        let inst = match kind {
            CorpusKind::Random => {
                let model = match i % 3 {
                    0 => RandomModel::ErdosRenyi { p: 0.15 },
                    1 => RandomModel::BoundedDegree { d: 3 },
                    _ => RandomModel::PlanarIsh { keep: 0.5 },
                };
                random_instance(8 + i % 11, model, 3, s, BudgetPolicy::Auto)
            }
            CorpusKind::Planted => {
                let cfg = PlantedConfig {
                    templates: 1 + i % 3,
                    copies: (2, 6),
                    leaves: (1, 4),
                    pool: 1 + i % 4,
                    ..PlantedConfig::default()
                };
                planted_instance(&cfg, s, BudgetPolicy::AboveX(1))
            }
        };
        let path = dir.join(format!("inst_{i:04}.dsai"));
        fs::write(&path, write_instance(&inst)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run(a: &GenerateArgs) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    match &a.kind {
        Kind::ThreeSat { cnf, apex } => {
            let f = parse_dimacs_cnf(&read(cnf)?)?;
            let (inst, map) = if *apex { apex_from_planar_3sat(&f)? } else { from_3sat(&f)? };
            emit(a, &inst, Some(&map))?;
        }
        Kind::ThreeFourSat { cnf } => {
            let f = parse_dimacs_cnf(&read(cnf)?)?;
            let (inst, map) = from_34sat(&f)?;
            emit(a, &inst, Some(&map))?;
        }
        Kind::Colourful { input, radius } => {
            let c = parse_document(&read(input)?)?.into_colourful()?;
            let (inst, map) = from_colourful(&c, *radius)?;
            emit(a, &inst, Some(&map))?;
        }
        Kind::Random {
            n,
            model,
            param,
            radius,
            budget,
        } => {
            if *n == 0 {
                bail!("--n must be at least 1");
            }
            let model = match model {
                Model::Er => RandomModel::ErdosRenyi { p: *param },
                Model::Bounded => RandomModel::BoundedDegree { d: *param as usize },
                Model::Planar => RandomModel::PlanarIsh { keep: *param },
            };
            emit(a, &random_instance(*n, model, *radius, a.seed, policy(*budget)), None)?;
        }
        Kind::Planted {
            templates,
            copies_min,
            copies_max,
            leaves_max,
            pool,
            max_trace,
            budget,
        } => {
            let cfg = PlantedConfig {
                templates: *templates,
                copies: (*copies_min, *copies_max),
                leaves: (1, *leaves_max),
                pool: *pool,
                max_trace: *max_trace,
                ..PlantedConfig::default()
            };
            emit(a, &planted_instance(&cfg, a.seed, policy(*budget)), None)?;
        }
        Kind::Cnf {
            vars,
            clauses,
            width,
            bounded,
        } => {
            if *vars == 0 {
                bail!("--vars must be at least 1");
            }
            let f = if *bounded {
                random_34cnf(*vars, *clauses, &mut rng)
                    .context("no (3,4) formula with these sizes; need vars >= 3 and 3·clauses <= 4·vars")?
            } else {
                random_cnf(*vars, *clauses, *width, &mut rng)
            };
            write(a.output.as_deref(), &write_dimacs_cnf(&f))?;
        }
        Kind::Corpus { dir, count, kind } => write_corpus(dir, *count, *kind, a.seed)?,
    }
    Ok(0)
}
