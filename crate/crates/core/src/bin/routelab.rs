use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use routelab::envs::{grid44_env, six_node_env, RoutingEnv, WeightedGraph};
use routelab::harness::{compare_reports, emit_report, fmt_sig, run_experiment, ExperimentConfig};
use routelab::mdp::{greedy_policy, value_iteration};
use routelab::{Error, Result};

#[derive(Parser)]
#[command(name = "routelab", version, about = "Actor-critic and Q-learning routing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a preset name or a config file.
    Run {
        config: String,
        /// First seed; runs use consecutive seeds from here.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Report directory; falls back to the config, then ROUTELAB_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print v*, Q* and the greedy policy of `six-node`, `grid44` or an edge-list file.
    Oracle {
        env: String,
        #[arg(long)]
        discount: Option<f64>,
    },
    /// Compare the policy and value tables of two report directories.
    Compare { report_a: PathBuf, report_b: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("routelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, runs, out } => {
            let mut config = ExperimentConfig::resolve(&config)?;
            if let Some(seed) = seed {
                config.base_seed = seed;
            }
            if let Some(runs) = runs {
                config.num_runs = runs;
            }
            config.validate()?;
            let dir = out
                .or_else(|| config.output_dir.clone())
                .or_else(|| std::env::var_os("ROUTELAB_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("routelab-out"));
            let report = run_experiment(&config)?;
            emit_report(&report, &dir)?;
            print!("{}", std::fs::read_to_string(dir.join("summary.txt")).map_err(|e| Error::Io {
                path: dir.join("summary.txt"),
                source: e,
            })?);
            println!("report: {}", dir.display());
            Ok(())
        }
        Command::Oracle { env, discount } => {
            let env = oracle_env(&env, discount)?;
            print_oracle(&env)
        }
        Command::Compare { report_a, report_b } => {
            print!("{}", compare_reports(&report_a, &report_b)?.to_text());
            Ok(())
        }
    }
}

fn oracle_env(name: &str, discount: Option<f64>) -> Result<RoutingEnv> {
    if let Some(beta) = discount {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config {
                field: "--discount".into(),
                message: "must lie in (0, 1)".into(),
            });
        }
    }
    match name {
        "six-node" | "six_node" => {
            let env = six_node_env();
            match discount {
                Some(beta) => env.with_discount(beta),
                None => Ok(env),
            }
        }
        "grid44" => grid44_env(discount.unwrap_or(0.9)),
        path => WeightedGraph::load(path.as_ref())?.to_env(discount.unwrap_or(0.8)),
    }
}

fn print_oracle(env: &RoutingEnv) -> Result<()> {
    let mdp = env.mdp();
    let (v, q) = value_iteration(mdp, 1e-10)?;
    let greedy = greedy_policy(&q);
    println!("discount: {}", mdp.discount());
    println!("state,v_star,greedy_action,q_star");
    for s in 0..mdp.num_states() {
        let a = greedy.most_probable_action(s);
        let label = if mdp.is_terminal(s) { "-" } else { env.action_label(s, a) };
        let qs: Vec<String> = (0..mdp.num_actions(s))
            .map(|a| format!("{}={}", env.action_label(s, a), fmt_sig(q.get(s, a))))
            .collect();
        println!("{},{},{},{}", env.node_id(s), fmt_sig(v[s]), label, qs.join(" "));
    }
    Ok(())
}
