//! `ipctp`: generate, solve, check and benchmark crane scheduling instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ipctp_core::bench::{self, BenchInstance, Budgets};
use ipctp_core::generator::{
    self, GenConfig, GRID_BAYS, GRID_INBOUND_RATIOS, GRID_SHIPMENTS, GRID_UL_RATIOS,
};
use ipctp_core::mip::{self, ExportOptions};
use ipctp_core::oracle::{brute_force, DEFAULT_LIMIT};
use ipctp_core::solver::{solve, SolveParams};
use ipctp_core::{gantt, validate, DerivedTables, Instance, Solution};

#[derive(Parser)]
#[command(
    name = "ipctp",
    version,
    about = "Quay and yard crane scheduling toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a corpus of random instances and its manifest.
    Generate {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "instances")]
        out_dir: PathBuf,
    },
    /// Solve one instance; writes the solution and a report.
    Solve {
        instance: PathBuf,
        /// Seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, env = "IPCTP_THREADS", default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        gantt: Option<GanttFormat>,
    },
    /// Check a solution file, or the values of an external MILP run.
    Validate {
        instance: PathBuf,
        /// Solution JSON. Omit when `--mip-values` is given.
        solution: Option<PathBuf>,
        /// `name value` lines for the model written by `export-mip`.
        #[arg(long, conflicts_with = "solution")]
        mip_values: Option<PathBuf>,
        /// Must match the value used at export.
        #[arg(long)]
        big_m: Option<i64>,
        /// Where to write the solution rebuilt from `--mip-values`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Exhaustive optimum of a small instance.
    Oracle {
        instance: PathBuf,
        /// Maximum number of decision combinations.
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: u128,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write the MILP in LP format plus a variable mapping file.
    ExportMip {
        instance: PathBuf,
        #[arg(long)]
        big_m: Option<i64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Solve a corpus under two budgets and tabulate the results.
    Bench {
        /// Directory holding a manifest; generated from the grid flags otherwise.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        /// Short and long budget in seconds.
        #[arg(long, value_delimiter = ',', default_values_t = [600.0, 3600.0])]
        budgets: Vec<f64>,
        #[arg(long, env = "IPCTP_THREADS", default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Render per-crane timelines of a solution.
    Gantt {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value = "text")]
        format: GanttFormat,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GanttFormat {
    Text,
    Svg,
}

/// Configuration grid. Every list defaults to the full experimental grid.
#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    ul_ratio: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    bays: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    shipments: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    inbound_ratio: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    vessels: usize,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GridArgs {
    fn configs(&self) -> Vec<GenConfig> {
        fn or<T: Clone>(given: &[T], grid: &[T]) -> Vec<T> {
            if given.is_empty() {
                grid.to_vec()
            } else {
                given.to_vec()
            }
        }
        let mut out = Vec::new();
        for ul in or(&self.ul_ratio, &GRID_UL_RATIOS) {
            for bays in or(&self.bays, &GRID_BAYS) {
                for shp in or(&self.shipments, &GRID_SHIPMENTS) {
                    for ratio in or(&self.inbound_ratio, &GRID_INBOUND_RATIOS) {
                        out.push(GenConfig {
                            vessels: self.vessels,
                            instances_per_config: self.replicates,
                            ..GenConfig::new(ul, bays, shp, ratio, self.seed)
                        });
                    }
                }
            }
        }
        out
    }
}

fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.strip_suffix(".json").unwrap_or(&name).to_string()
}

fn load(path: &Path) -> Result<(Instance, DerivedTables)> {
    let inst =
        Instance::load(path).with_context(|| format!("reading instance {}", path.display()))?;
    let der = DerivedTables::build(&inst)?;
    Ok((inst, der))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Fails with the violation list unless the solution is feasible.
fn require_feasible(inst: &Instance, der: &DerivedTables, sol: &Solution) -> Result<()> {
    let violations = validate(inst, der, sol);
    if violations.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    bail!(
        "solution violates {} constraint(s): {}",
        violations.len(),
        lines.join("; ")
    )
}

fn seconds(v: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(v).map_err(|_| anyhow!("invalid duration: {v}"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { grid, out_dir } => {
            let entries = generator::generate_corpus(&grid.configs())?;
            generator::write_corpus(&entries, &out_dir)?;
            println!("wrote {} instances to {}", entries.len(), out_dir.display());
        }
        Command::Solve {
            instance,
            time_limit,
            workers,
            seed,
            out_dir,
            gantt: chart,
        } => {
            let (inst, der) = load(&instance)?;
            let params = SolveParams {
                time_limit: seconds(time_limit)?,
                workers,
                seed,
            };
            let (report, sol) = solve(&inst, &der, &params)?;
            let name = stem(&instance);
            write(
                out_dir.join(format!("{name}.report.txt")),
                &format!("{report}\n"),
            )?;
            println!("{report}");
            let Some(sol) = sol else {
                bail!("no solution found (status {})", report.status);
            };
            require_feasible(&inst, &der, &sol)?;
            write(
                out_dir.join(format!("{name}.solution.json")),
                &sol.to_json(),
            )?;
            match chart {
                Some(GanttFormat::Text) => {
                    write(
                        out_dir.join(format!("{name}.gantt.txt")),
                        &gantt::render_text(&inst, &sol, 80),
                    )?;
                }
                Some(GanttFormat::Svg) => {
                    write(
                        out_dir.join(format!("{name}.gantt.svg")),
                        &gantt::render_svg(&inst, &sol),
                    )?;
                }
                None => {}
            }
        }
        Command::Validate {
            instance,
            solution,
            mip_values,
            big_m,
            out_dir,
        } => {
            let (inst, der) = load(&instance)?;
            let sol = match (solution, mip_values) {
                (Some(path), None) => Solution::load(&path)
                    .with_context(|| format!("reading solution {}", path.display()))?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading values {}", path.display()))?;
                    let values = mip::parse_values(&text)
                        .with_context(|| format!("in {}", path.display()))?;
                    let opts = ExportOptions {
                        big_m,
                        ..ExportOptions::default()
                    };
                    let (model, _) = mip::build_model(&inst, &der, &opts);
                    let sol = mip::solution_from_values(&inst, &der, &model, &values)?;
                    if let Some(dir) = out_dir {
                        write(
                            dir.join(format!("{}.solution.json", stem(&instance))),
                            &sol.to_json(),
                        )?;
                    }
                    sol
                }
                _ => bail!("give either a solution file or --mip-values"),
            };
            let violations = validate(&inst, &der, &sol);
            for v in &violations {
                println!(
                    "{}",
                    json!({"constraint": v.constraint.code(), "shipments": v.shipments, "message": v.message})
                );
            }
            if !violations.is_empty() {
                bail!("{} violation(s)", violations.len());
            }
            println!("{}", json!({"valid": true, "objective": sol.objective}));
        }
        Command::Oracle {
            instance,
            limit,
            out_dir,
        } => {
            let (inst, der) = load(&instance)?;
            let res = brute_force(&inst, &der, limit)?;
            require_feasible(&inst, &der, &res.best_solution)?;
            let mut doc = serde_json::to_value(&res.best_solution)?;
            doc["enumerated"] = json!(res.enumerated.to_string());
            let path = write(
                out_dir.join(format!("{}.oracle.json", stem(&instance))),
                &(serde_json::to_string_pretty(&doc)? + "\n"),
            )?;
            println!("objective: {}", res.best_objective);
            println!("enumerated: {}", res.enumerated);
            println!("written: {}", path.display());
        }
        Command::ExportMip {
            instance,
            big_m,
            out_dir,
        } => {
            let (inst, der) = load(&instance)?;
            let opts = ExportOptions {
                big_m,
                ..ExportOptions::default()
            };
            let (lp, artifacts) = mip::export_lp(&inst, &der, &opts);
            let name = stem(&instance);
            write(out_dir.join(format!("{name}.lp")), &lp)?;
            write(
                out_dir.join(format!("{name}.map.json")),
                &(artifacts.to_json() + "\n"),
            )?;
            println!("variables: {}", artifacts.variables.len());
            println!(
                "rows: {}",
                artifacts.rows_per_family.values().sum::<usize>()
            );
            println!("big_m: {}", artifacts.big_m);
        }
        Command::Bench {
            corpus,
            grid,
            budgets,
            workers,
            out_dir,
        } => {
            let instances: Vec<BenchInstance> = match corpus {
                Some(dir) => generator::read_manifest(&dir)?
                    .into_iter()
                    .map(|m| {
                        Ok(BenchInstance {
                            instance: Instance::load(dir.join(&m.file))
                                .with_context(|| format!("reading {}", m.file))?,
                            config: m.config,
                            replicate: m.replicate,
                        })
                    })
                    .collect::<Result<_>>()?,
                None => generator::generate_corpus(&grid.configs())?
                    .into_iter()
                    .map(|e| BenchInstance {
                        config: e.manifest.config,
                        replicate: e.manifest.replicate,
                        instance: e.instance,
                    })
                    .collect(),
            };
            let [short, long] = budgets[..] else {
                bail!("--budgets takes two values: short,long");
            };
            let budgets = Budgets {
                short: seconds(short)?,
                long: seconds(long)?,
            };
            if budgets.short.is_zero() || budgets.long.is_zero() {
                bail!("budgets must be positive");
            }
            let runs = bench::run_bench(&instances, budgets, workers, grid.seed);
            let rows = bench::aggregate(&runs);
            let text = bench::to_text(&rows);
            write(out_dir.join("bench.txt"), &text)?;
            write(out_dir.join("bench.csv"), &bench::to_csv(&rows))?;
            write(
                out_dir.join("bench_runs.json"),
                &(serde_json::to_string_pretty(&runs)? + "\n"),
            )?;
            print!("{text}");
        }
        Command::Gantt {
            instance,
            solution,
            format,
            out,
        } => {
            let inst = Instance::load(&instance)
                .with_context(|| format!("reading instance {}", instance.display()))?;
            let sol = Solution::load(&solution)
                .with_context(|| format!("reading solution {}", solution.display()))?;
            let text = match format {
                GanttFormat::Text => gantt::render_text(&inst, &sol, 80),
                GanttFormat::Svg => gantt::render_svg(&inst, &sol),
            };
            match out {
                Some(path) => {
                    write(path, &text)?;
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    use ipctp_core::Error as E;
    match err.chain().find_map(|e| e.downcast_ref::<E>()) {
        Some(E::InvalidInstance(_)) => "invalid_instance",
        Some(E::NoEligibleCrane { .. }) => "no_eligible_crane",
        Some(E::InvalidDecisions(_)) => "invalid_decisions",
        Some(E::CyclicOrdering) => "cyclic_ordering",
        Some(E::BudgetExceeded { .. }) => "budget_exceeded",
        Some(E::NoFeasibleSolution) => "no_feasible_solution",
        Some(E::ConfigInvalid(_)) => "config_invalid",
        Some(E::InvalidParams(_)) => "invalid_params",
        Some(E::Parse { .. }) | Some(E::Json(_)) => "parse",
        Some(E::Io(_)) => "io",
        None if err.chain().any(|e| e.is::<std::io::Error>()) => "io",
        None => "failed",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let message = e.render().to_string();
            eprintln!(
                "{}",
                json!({"error": {"kind": "usage", "message": message.trim()}})
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": error_kind(&e), "message": format!("{e:#}")}})
            );
            ExitCode::FAILURE
        }
    }
}
