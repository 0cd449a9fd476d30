//! Newline-delimited trajectory records for replay-based invariant checks.
//! One line per primitive tick:
//!
//!   `<tick>\t<a0,a1,..>\t<reward>\t<t0,t1,..>`
//!
//! where the last field holds the per-agent termination flags as 0/1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub tick: u64,
    pub actions: Vec<usize>,
    pub reward: f64,
    pub term_flags: Vec<bool>,
}

impl TickRecord {
    pub fn to_line(&self) -> String {
        let actions: Vec<String> = self.actions.iter().map(|a| a.to_string()).collect();
        let terms: Vec<String> = self
            .term_flags
            .iter()
            .map(|&t| if t { "1" } else { "0" }.to_string())
            .collect();
        format!(
            "{}\t{}\t{}\t{}",
            self.tick,
            actions.join(","),
            self.reward,
            terms.join(",")
        )
    }
}

pub fn write_log(records: &[TickRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_log(text: &str) -> Result<Vec<TickRecord>, LogError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(LogError::Parse {
                line,
                reason: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let bad = |reason: &str| LogError::Parse {
            line,
            reason: reason.to_string(),
        };
        let tick = fields[0].parse().map_err(|_| bad("bad tick"))?;
        let actions = fields[1]
            .split(',')
            .map(|s| s.parse().map_err(|_| bad("bad action")))
            .collect::<Result<Vec<usize>, _>>()?;
        let reward = fields[2].parse().map_err(|_| bad("bad reward"))?;
        let term_flags = fields[3]
            .split(',')
            .map(|s| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad("bad term flag")),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        out.push(TickRecord {
            tick,
            actions,
            reward,
            term_flags,
        });
    }
    Ok(out)
}
