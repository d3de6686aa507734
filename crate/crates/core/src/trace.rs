use std::io::Write;

use crate::error::Result;
use crate::harness::fmt_sig;

/// Checkpoints of a learning run: a step counter plus a fixed set of named
/// diagnostic columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    columns: Vec<&'static str>,
    rows: Vec<(u64, Vec<f64>)>,
}

/// Columns recorded by the tabular actor-critic.
pub const ACOPT_COLUMNS: [&str; 3] = ["J", "max_sqrtpi_g", "policy_agreement_with_oracle"];
/// Columns recorded by Q-learning.
pub const QLEARN_COLUMNS: [&str; 2] = ["q_sup_distance", "policy_agreement_with_oracle"];
/// Columns recorded by the function-approximation actor-critic.
pub const FA_COLUMNS: [&str; 3] = ["critic_distance", "optimal_action_rate", "policy_agreement_with_oracle"];

impl ConvergenceTrace {
    pub fn new(columns: &[&'static str]) -> Self {
        ConvergenceTrace {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, step: u64, values: Vec<f64>) {
        assert_eq!(values.len(), self.columns.len(), "trace row width");
        self.rows.push((step, values));
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = u64> + '_ {
        self.rows.iter().map(|r| r.0)
    }

    /// Values of one column, in checkpoint order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.1[i]).collect())
    }

    pub fn last_value(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.last().copied())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step"];
        header.extend(&self.columns);
        w.write_record(&header).map_err(csv_err)?;
        for (step, values) in &self.rows {
            let mut record = vec![step.to_string()];
            record.extend(values.iter().map(|&v| fmt_sig(v)));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| crate::Error::io("<trace>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

pub(crate) fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::io("<csv>", std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ConvergenceTrace::new(&ACOPT_COLUMNS);
        t.push(10, vec![-1.23456789, 0.5, 1.0]);
        assert_eq!(
            t.to_csv_string(),
            "step,J,max_sqrtpi_g,policy_agreement_with_oracle\n10,-1.23457,0.5,1\n"
        );
        assert_eq!(t.last_value("max_sqrtpi_g"), Some(0.5));
        assert_eq!(t.column("nope"), None);
    }
}
