use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pivot_csp::compare::run_compare;
use pivot_csp::error::Error;
use pivot_csp::filtering::{
    arc_consistency, directional_path_consistency, path_consistency, pivot_filter,
};
use pivot_csp::generate::{generate_instance, GeneratorParams};
use pivot_csp::instance::{
    doc_from_plan, load_instance, load_plan, render_instance, save_instance,
};
use pivot_csp::network::Network;
use pivot_csp::solver::{brute_force_solve, solve_decomposed, SolveMode};
use pivot_csp::structure::{
    compute_pivot_plan, functional_subgraph, minimum_root_set, reduce, tarjan_scc, PivotPlan,
    TieBreak,
};
use pivot_csp::verify::{run_verify, run_verify_parts};

#[derive(Parser)]
#[command(
    name = "pivot-csp",
    version,
    about = "Solve binary CSPs with functional constraints by root-set decomposition"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Policy for structural tie breaks (source representatives, candidate
    /// origins).
    #[arg(long, global = true, value_enum, default_value_t = TieBreakArg::Lex)]
    tie_break: TieBreakArg,

    /// Seed for `--tie-break seeded` and for `generate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Lex,
    Seeded,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pivot,
    Ac,
    Pc,
    Dpc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    All,
    Count,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance with a functional skeleton.
    Generate {
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        domain: usize,
        #[arg(long, default_value_t = 5)]
        functional: usize,
        /// Fraction of functional arcs sampled bijective (closing cycles).
        #[arg(long, default_value_t = 0.0)]
        cycles: f64,
        #[arg(long, default_value_t = 2)]
        other: usize,
        #[arg(long, default_value_t = 0.3)]
        tightness: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the structural decomposition: components, roots, candidates,
    /// ordering.
    Analyze { input: PathBuf },
    /// Filter an instance and emit the result plus a report.
    Filter {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Pivot)]
        method: MethodArg,
        /// Plan file (roots, ordering, candidates); computed when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Where to write the filtered instance; printed to stdout after
        /// the report when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve by decomposition: analyze, filter, instantiate the roots,
    /// extend.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// Cross-check the solution set against brute-force enumeration
        /// (skipped when the instance exceeds the enumeration budget).
        #[arg(long)]
        oracle: bool,
        /// Write the machine-readable report here as well.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check root-set, ordering and pivot-consistency properties.
    Verify {
        input: PathBuf,
        /// Plan file to check; the computed plan when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Run all four filtering methods and tabulate their work.
    Compare { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn tie_break(cli: &Cli) -> TieBreak {
    match cli.tie_break {
        TieBreakArg::Lex => TieBreak::Lex,
        TieBreakArg::Seeded => TieBreak::Seeded(cli.seed),
    }
}

fn plan_for(net: &Network, path: &Option<PathBuf>, tb: TieBreak) -> Result<PivotPlan, Error> {
    match path {
        Some(p) => load_plan(net, p),
        None => {
            let roots = minimum_root_set(net, tb);
            compute_pivot_plan(net, &roots, tb)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let tb = tie_break(cli);
    match &cli.command {
        Command::Generate {
            vars,
            domain,
            functional,
            cycles,
            other,
            tightness,
            out,
        } => {
            let params = GeneratorParams {
                variables: *vars,
                domain_size: *domain,
                functional_arcs: *functional,
                cycle_fraction: *cycles,
                other_constraints: *other,
                tightness: *tightness,
                seed: cli.seed,
            };
            let net = generate_instance(&params)?;
            match out {
                Some(path) => save_instance(&net, path)?,
                None => println!("{}", render_instance(&net)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input } => {
            let net = load_instance(input)?;
            let g = functional_subgraph(&net);
            let scc = tarjan_scc(&g);
            let red = reduce(&g, &scc);
            let roots = minimum_root_set(&net, tb);
            let plan = compute_pivot_plan(&net, &roots, tb)?;
            let stats = net.stats(Some(roots.members()));
            match cli.output {
                Output::Machine => {
                    let value = json!({
                        "stats": {
                            "n": stats.n, "d": stats.d, "e": stats.e,
                            "e_f": stats.e_f, "e_r": stats.e_r,
                        },
                        "scc_sizes": scc.components().iter().map(|c| c.len()).collect::<Vec<_>>(),
                        "source_components": red.sources().len(),
                        "roots": roots.members().iter().map(|v| net.name(*v)).collect::<Vec<_>>(),
                        "r": roots.size(),
                        "plan": doc_from_plan(&net, &plan),
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                Output::Text => {
                    println!(
                        "variables: {}  constraints: {} ({} functional, {} inside roots)",
                        stats.n, stats.e, stats.e_f, stats.e_r
                    );
                    println!(
                        "scc sizes: {:?}",
                        scc.components().iter().map(|c| c.len()).collect::<Vec<_>>()
                    );
                    println!(
                        "roots (r = {}): {}",
                        roots.size(),
                        roots
                            .members()
                            .iter()
                            .map(|v| net.name(*v))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    println!(
                        "ordering: {}",
                        plan.ordering()
                            .iter()
                            .map(|v| net.name(*v))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    for (origin, target) in plan.candidates() {
                        println!("candidate: {} -> {}", net.name(origin), net.name(target));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Filter {
            input,
            method,
            plan,
            out,
        } => {
            let net = load_instance(input)?;
            let (filtered, report) = match method {
                MethodArg::Pivot => {
                    let plan = plan_for(&net, plan, tb)?;
                    pivot_filter(&net, &plan)?
                }
                MethodArg::Ac => arc_consistency(&net),
                MethodArg::Pc => path_consistency(&net),
                MethodArg::Dpc => {
                    let plan = plan_for(&net, plan, tb)?;
                    directional_path_consistency(&net, plan.ordering())?
                }
            };
            if let Some(path) = out {
                save_instance(&filtered, path)?;
            }
            match cli.output {
                Output::Machine => {
                    let mut value = json!({ "report": report.to_json(&net) });
                    if out.is_none() {
                        value["instance"] =
                            serde_json::to_value(pivot_csp::instance::doc_from_network(&filtered))
                                .unwrap();
                    }
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                Output::Text => {
                    print!("{}", report.render_text(&net));
                    if out.is_none() {
                        println!("{}", render_instance(&filtered));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            input,
            mode,
            oracle,
            report,
        } => {
            let net = load_instance(input)?;
            let mode = match mode {
                ModeArg::First => SolveMode::First,
                ModeArg::All => SolveMode::All,
                ModeArg::Count => SolveMode::Count,
            };
            let solve_report = solve_decomposed(&net, mode, tb)?;
            let mut value = solve_report.to_json(&net);
            if *oracle {
                value["oracle"] = match brute_force_solve(&net) {
                    Ok(solutions) => {
                        let mut oracle_set: Vec<_> =
                            solutions.iter().map(|s| s.tokens(&net)).collect();
                        oracle_set.sort();
                        let matches = match mode {
                            SolveMode::Count => solutions.len() == solve_report.solution_count,
                            SolveMode::First => {
                                solutions.is_empty() == (solve_report.solution_count == 0)
                                    && solve_report
                                        .solutions
                                        .iter()
                                        .all(|s| oracle_set.binary_search(&s.tokens(&net)).is_ok())
                            }
                            SolveMode::All => {
                                let mut found: Vec<_> = solve_report
                                    .solutions
                                    .iter()
                                    .map(|s| s.tokens(&net))
                                    .collect();
                                found.sort();
                                found == oracle_set
                            }
                        };
                        json!({ "checked": true, "solutions": solutions.len(), "matches": matches })
                    }
                    Err(Error::EnumerationBudget { estimate, budget }) => {
                        json!({ "checked": false, "reason":
                            format!("search space ~{estimate:.2e} exceeds budget {budget:.2e}") })
                    }
                    Err(e) => return Err(e),
                };
                if value["oracle"]["checked"] == json!(true)
                    && value["oracle"]["matches"] != json!(true)
                {
                    eprintln!("error: oracle disagreement");
                    return Ok(ExitCode::from(2));
                }
            }
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&value).unwrap()).map_err(
                    |source| Error::Io {
                        path: path.display().to_string(),
                        source,
                    },
                )?;
            }
            match cli.output {
                Output::Machine => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
                Output::Text => print!("{}", solve_report.render_text(&net)),
            }
            Ok(if solve_report.insoluble {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Verify { input, plan } => {
            let net = load_instance(input)?;
            let report = match plan {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    let doc = serde_json::from_str(&text).map_err(|e| Error::Parse {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    let (roots, ordering, candidates) =
                        pivot_csp::instance::plan_parts_from_doc(&net, &doc)?;
                    run_verify_parts(&net, roots, ordering, candidates)
                }
                None => {
                    let plan = plan_for(&net, &None, tb)?;
                    run_verify(&net, &plan)
                }
            };
            match cli.output {
                Output::Machine => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report.to_json()).unwrap()
                    )
                }
                Output::Text => print!("{}", report.render_text()),
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Compare { input } => {
            let net = load_instance(input)?;
            let report = run_compare(&net, tb)?;
            match cli.output {
                Output::Machine => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json(&net)).unwrap()
                ),
                Output::Text => print!("{}", report.render_text(&net)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
