use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::fmt_sig;
use super::run::ExperimentReport;
use crate::error::{Error, Result};
use crate::trace::csv_err;

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w, path)
}

/// Writes `values.csv`, `policy.csv`, `qtable.csv` (Q-learning),
/// `params.csv` (function approximation), one `trace_<seed>.csv` per run and
/// `summary.txt` into `dir`. Returns the paths written.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let env = &report.env;
    let mdp = env.mdp();
    let mut written = Vec::new();

    let path = dir.join("values.csv");
    write_rows(
        &path,
        &["state", "v_avg", "v_oracle"],
        (0..mdp.num_states()).map(|s| {
            vec![
                env.node_id(s).to_string(),
                fmt_sig(report.values_avg[s]),
                fmt_sig(report.v_oracle[s]),
            ]
        }),
    )?;
    written.push(path);

    let path = dir.join("policy.csv");
    write_rows(
        &path,
        &["state", "mpa", "probability", "oracle_action", "agrees"],
        mdp.non_terminal_states().map(|s| {
            let (a, p) = report.mpa(s);
            let oracle = report.oracle_policy.most_probable_action(s);
            vec![
                env.node_id(s).to_string(),
                env.action_label(s, a).to_string(),
                fmt_sig(p),
                env.action_label(s, oracle).to_string(),
                (a == oracle).to_string(),
            ]
        }),
    )?;
    written.push(path);

    if let Some(q) = &report.q_avg {
        let path = dir.join("qtable.csv");
        let rows = mdp.non_terminal_states().flat_map(|s| {
            (0..mdp.num_actions(s)).map(move |a| {
                vec![
                    env.node_id(s).to_string(),
                    a.to_string(),
                    env.action_label(s, a).to_string(),
                    fmt_sig(q.get(s, a)),
                    fmt_sig(report.q_oracle.get(s, a)),
                ]
            })
        });
        write_rows(&path, &["state", "action", "label", "q_avg", "q_oracle"], rows)?;
        written.push(path);
    }

    if let Some((w, theta)) = &report.params_avg {
        let path = dir.join("params.csv");
        let rows = w
            .iter()
            .enumerate()
            .map(|(i, x)| vec!["w".to_string(), i.to_string(), fmt_sig(*x)])
            .chain(
                theta
                    .iter()
                    .enumerate()
                    .map(|(i, x)| vec!["theta".to_string(), i.to_string(), fmt_sig(*x)]),
            );
        write_rows(&path, &["param", "index", "value"], rows)?;
        written.push(path);
    }

    for run in &report.runs {
        let path = dir.join(format!("trace_{}.csv", run.seed));
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        run.trace.write_csv(file)?;
        written.push(path);
    }

    let path = dir.join("summary.txt");
    fs::write(&path, summary_text(report)).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

fn summary_text(report: &ExperimentReport) -> String {
    let mdp = report.env.mdp();
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(out, "env: {}", c.env_name());
    let _ = writeln!(out, "algorithm: {:?}", c.algorithm);
    let _ = writeln!(out, "discount: {}", mdp.discount());
    let _ = writeln!(out, "runs: {} (seeds {}..{})", report.num_runs(), c.base_seed, c.base_seed + report.num_runs() as u64 - 1);
    let _ = writeln!(out, "agreement: {:.2}%", 100.0 * report.agreement);
    let _ = writeln!(out, "optimal_action_rate: {:.2}%", 100.0 * report.optimal_rate);
    let _ = writeln!(out, "mean_mpa_probability: {}", fmt_sig(mean_mpa_probability(report)));
    let _ = writeln!(out, "max_value_error: {}", fmt_sig(report.values_avg.sup_distance(&report.v_oracle)));
    let _ = writeln!(out, "J_end: {}", fmt_sig(report.final_j));
    let _ = writeln!(out, "runtime_s: {:.3}", report.runtime.as_secs_f64());
    out
}

/// Mean over non-terminal states of the averaged policy's top probability.
pub(crate) fn mean_mpa_probability(report: &ExperimentReport) -> f64 {
    let states: Vec<_> = report.env.mdp().non_terminal_states().collect();
    states.iter().map(|&s| report.mpa(s).1).sum::<f64>() / states.len().max(1) as f64
}

/// Side-by-side view of two report directories.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportComparison {
    /// `(state, mpa_a, mpa_b, v_a, v_b)` for states present in both.
    pub rows: Vec<(String, String, String, f64, f64)>,
    pub mpa_agreement: f64,
    pub max_value_diff: f64,
}

impl ReportComparison {
    pub fn to_text(&self) -> String {
        let mut out = String::from("state,mpa_a,mpa_b,v_a,v_b\n");
        for (s, a, b, va, vb) in &self.rows {
            let _ = writeln!(out, "{s},{a},{b},{},{}", fmt_sig(*va), fmt_sig(*vb));
        }
        let _ = writeln!(out, "mpa_agreement: {:.2}%", 100.0 * self.mpa_agreement);
        let _ = writeln!(out, "max_value_diff: {}", fmt_sig(self.max_value_diff));
        out
    }
}

fn read_table(path: &Path, columns: &[&str]) -> Result<Vec<Vec<String>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let parse_err = |message: String| Error::Parse {
        source_name: path.display().to_string(),
        message,
    };
    let header = r.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let idx = columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| parse_err(format!("missing column `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| parse_err(e.to_string()))?;
            Ok(idx.iter().map(|&i| rec.get(i).unwrap_or("").to_string()).collect())
        })
        .collect()
}

fn parse_f64(path: &Path, x: &str) -> Result<f64> {
    x.parse().map_err(|_| Error::Parse {
        source_name: path.display().to_string(),
        message: format!("`{x}` is not a number"),
    })
}

/// Compares the `policy.csv` and `values.csv` files of two report directories.
pub fn compare_reports(a: &Path, b: &Path) -> Result<ReportComparison> {
    let load = |dir: &Path| -> Result<Vec<(String, String, f64)>> {
        let policy_path = dir.join("policy.csv");
        let values_path = dir.join("values.csv");
        let policy = read_table(&policy_path, &["state", "mpa"])?;
        let values = read_table(&values_path, &["state", "v_avg"])?;
        policy
            .into_iter()
            .map(|row| {
                let v = values
                    .iter()
                    .find(|v| v[0] == row[0])
                    .ok_or_else(|| Error::Parse {
                        source_name: values_path.display().to_string(),
                        message: format!("no value for state {}", row[0]),
                    })?;
                Ok((row[0].clone(), row[1].clone(), parse_f64(&values_path, &v[1])?))
            })
            .collect()
    };
    let left = load(a)?;
    let right = load(b)?;
    let rows: Vec<_> = left
        .iter()
        .filter_map(|(s, mpa_a, va)| {
            right
                .iter()
                .find(|r| &r.0 == s)
                .map(|(_, mpa_b, vb)| (s.clone(), mpa_a.clone(), mpa_b.clone(), *va, *vb))
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::domain("the two reports share no states"));
    }
    let same = rows.iter().filter(|r| r.1 == r.2).count();
    let max_value_diff = rows.iter().map(|r| (r.3 - r.4).abs()).fold(0.0, f64::max);
    Ok(ReportComparison {
        mpa_agreement: same as f64 / rows.len() as f64,
        max_value_diff,
        rows,
    })
}
