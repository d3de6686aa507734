//! Runs a bundled preset with a reduced number of seeds and writes the CSV
//! report.
//!
//! Run with `cargo run --release --example experiment_report [preset] [runs] [dir]`.

use std::path::PathBuf;

use routelab::harness::{emit_report, preset, preset_names, run_experiment};

fn main() -> routelab::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "six-node-acopt".to_string());
    let runs = args.next().and_then(|r| r.parse().ok()).unwrap_or(5);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("routelab-{name}")));

    println!("presets: {}", preset_names().collect::<Vec<_>>().join(", "));
    let mut config = preset(&name)?;
    config.num_runs = runs;
    let report = run_experiment(&config)?;
    for path in emit_report(&report, &dir)? {
        println!("wrote {}", path.display());
    }
    println!(
        "agreement {:.1}%, optimal-action rate {:.1}%, {:.2}s",
        100.0 * report.agreement,
        100.0 * report.optimal_rate,
        report.runtime.as_secs_f64()
    );
    Ok(())
}
