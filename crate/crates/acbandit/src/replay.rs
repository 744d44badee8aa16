//! Offline policy evaluation on logged decision data.
//!
//! Replay walks the log in order and lets the candidate policy make its own
//! randomized decision at every point. When the policy's realized action
//! matches the logged one the event is accepted: the policy trains on the
//! logged reward and the value estimate accumulates the reward with inverse
//! propensity weight `1 / logging_prob`. Mismatched events are skipped
//! without touching the policy, so the estimate stays near-unbiased under
//! non-uniform logging.

use crate::policy::{BanditPolicy, PolicyError};
use crate::sim::{EnvironmentModel, SimError};
use rand::{Rng, RngCore};
use serde::Serialize;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },

    #[error("log is empty")]
    EmptyLog,

    #[error("log context has {len} components, policy needs at least {needed}")]
    ContextTooNarrow { len: usize, needed: usize },

    #[error("logged action {action} exceeds the policy's {n_actions} actions")]
    UnknownAction { action: usize, n_actions: usize },

    #[error("logging probability must lie strictly inside (0, 1)")]
    InvalidLoggingProbability,

    #[error("horizon of zero produces no records")]
    EmptyHorizon,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Policy(#[from] PolicyError),

    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One logged decision point.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub index: u64,
    pub context: Vec<f64>,
    pub action: usize,
    /// Probability the logging policy assigned to the action it took.
    pub logging_prob: f64,
    pub reward: f64,
}

/// Outcome of replaying one log.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayResult {
    /// Importance-weighted mean reward; `None` when no event was accepted.
    pub value_estimate: Option<f64>,
    pub accepted_count: usize,
    pub total_count: usize,
    pub weight_sum: f64,
}

impl ReplayResult {
    pub fn is_degenerate(&self) -> bool {
        self.weight_sum == 0.0
    }
}

fn malformed(row: usize, message: impl Into<String>) -> ReplayError {
    ReplayError::Malformed {
        row,
        message: message.into(),
    }
}

/// Parse a CSV log with header `index,ctx_0,...,ctx_{L-1},action,logging_prob,reward`.
///
/// Indices must be strictly increasing; a log filtered for availability may
/// skip indices but never reorder them. Rows are reported 1-based, counting
/// the header as row 1.
pub fn parse_log<R: Read>(reader: R) -> Result<Vec<LogRecord>, ReplayError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let cols = headers.len();
    if cols < 4 {
        return Err(malformed(1, "expected at least 4 columns"));
    }
    let context_dim = cols - 4;
    if headers.get(0) != Some("index")
        || headers.get(cols - 3) != Some("action")
        || headers.get(cols - 2) != Some("logging_prob")
        || headers.get(cols - 1) != Some("reward")
    {
        return Err(malformed(1, format!("unexpected header {headers:?}")));
    }
    for (i, name) in headers.iter().take(cols - 3).skip(1).enumerate() {
        if name != format!("ctx_{i}") {
            return Err(malformed(1, format!("expected column ctx_{i}, got {name:?}")));
        }
    }

    let mut records = Vec::new();
    let mut last_index: Option<u64> = None;
    for (row_offset, row) in csv_reader.records().enumerate() {
        let row_number = row_offset + 2;
        let row = row?;
        if row.len() != cols {
            return Err(malformed(
                row_number,
                format!("expected {cols} fields, got {}", row.len()),
            ));
        }
        let field = |i: usize| row.get(i).unwrap_or("");
        let index: u64 = field(0)
            .parse()
            .map_err(|_| malformed(row_number, format!("bad index {:?}", field(0))))?;
        if let Some(prev) = last_index {
            if index <= prev {
                return Err(malformed(
                    row_number,
                    format!("index {index} not above previous {prev}"),
                ));
            }
        }
        last_index = Some(index);

        let mut context = Vec::with_capacity(context_dim);
        for i in 0..context_dim {
            let raw = field(1 + i);
            let value: f64 = raw
                .parse()
                .map_err(|_| malformed(row_number, format!("bad ctx_{i} {raw:?}")))?;
            if !value.is_finite() {
                return Err(malformed(row_number, format!("non-finite ctx_{i}")));
            }
            context.push(value);
        }
        let action: usize = field(cols - 3)
            .parse()
            .map_err(|_| malformed(row_number, format!("bad action {:?}", field(cols - 3))))?;
        let logging_prob: f64 = field(cols - 2).parse().map_err(|_| {
            malformed(row_number, format!("bad logging_prob {:?}", field(cols - 2)))
        })?;
        if !(logging_prob > 0.0 && logging_prob < 1.0) {
            return Err(malformed(
                row_number,
                format!("logging_prob {logging_prob} outside (0, 1)"),
            ));
        }
        let reward: f64 = field(cols - 1)
            .parse()
            .map_err(|_| malformed(row_number, format!("bad reward {:?}", field(cols - 1))))?;
        if !reward.is_finite() {
            return Err(malformed(row_number, "non-finite reward"));
        }
        records.push(LogRecord {
            index,
            context,
            action,
            logging_prob,
            reward,
        });
    }
    Ok(records)
}

/// Write records in the same CSV format [`parse_log`] reads. Floats use
/// shortest round-trip notation, so write-then-parse is exact.
pub fn write_log<W: Write>(writer: W, records: &[LogRecord]) -> Result<(), ReplayError> {
    let context_dim = records.first().map_or(0, |r| r.context.len());
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["index".to_owned()];
    header.extend((0..context_dim).map(|i| format!("ctx_{i}")));
    header.extend(["action", "logging_prob", "reward"].map(str::to_owned));
    out.write_record(&header)?;
    for record in records {
        let mut fields = vec![record.index.to_string()];
        fields.extend(record.context.iter().map(|c| c.to_string()));
        fields.push(record.action.to_string());
        fields.push(record.logging_prob.to_string());
        fields.push(record.reward.to_string());
        out.write_record(&fields)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_log_file(path: &Path) -> Result<Vec<LogRecord>, ReplayError> {
    parse_log(BufReader::new(File::open(path)?))
}

pub fn write_log_file(path: &Path, records: &[LogRecord]) -> Result<(), ReplayError> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_log(&mut writer, records)?;
    writer.flush()?;
    Ok(())
}

/// Replay a log against a policy.
///
/// Every record costs the policy exactly one decision (and its RNG draws);
/// only accepted records update it. The estimate is the ratio of the
/// weighted reward sum to the weight sum.
pub fn replay<P: BanditPolicy + ?Sized>(
    log: &[LogRecord],
    policy: &mut P,
    rng: &mut dyn RngCore,
) -> Result<ReplayResult, ReplayError> {
    if log.is_empty() {
        return Err(ReplayError::EmptyLog);
    }
    let needed = policy.min_context_dim();
    let n_actions = policy.n_actions();
    for record in log {
        if record.context.len() < needed {
            return Err(ReplayError::ContextTooNarrow {
                len: record.context.len(),
                needed,
            });
        }
        if record.action > n_actions {
            return Err(ReplayError::UnknownAction {
                action: record.action,
                n_actions,
            });
        }
    }

    let mut accepted = 0usize;
    let mut weight_sum = 0.0;
    let mut weighted_reward = 0.0;
    for record in log {
        let decision = policy.decide(&record.context, rng)?;
        if decision.realized_action == record.action {
            let weight = 1.0 / record.logging_prob;
            accepted += 1;
            weight_sum += weight;
            weighted_reward += weight * record.reward;
            policy.observe(&record.context, &decision, record.reward)?;
        }
    }
    Ok(ReplayResult {
        value_estimate: (weight_sum > 0.0).then(|| weighted_reward / weight_sum),
        accepted_count: accepted,
        total_count: log.len(),
        weight_sum,
    })
}

/// Simulate a micro-randomized logging policy: act with constant probability
/// `logging_pi`, choosing uniformly among the nonzero arms when acting.
///
/// The recorded propensity is `logging_pi / N` for each nonzero action and
/// `1 - logging_pi` for the zero action.
pub fn generate_log<R: Rng + ?Sized>(
    env: &mut EnvironmentModel,
    logging_pi: f64,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<LogRecord>, ReplayError> {
    if !(logging_pi > 0.0 && logging_pi < 1.0) {
        return Err(ReplayError::InvalidLoggingProbability);
    }
    let n = env.feature_map().n_actions();
    let mut records = Vec::with_capacity(horizon);
    for t in 0..horizon {
        if env.is_nonstationary() {
            env.gp_step(rng)?;
        }
        let context = env.gen_context(rng);
        let (action, logging_prob) = if rng.random::<f64>() < logging_pi {
            (rng.random_range(1..=n), logging_pi / n as f64)
        } else {
            (0, 1.0 - logging_pi)
        };
        let reward = env.realize_reward(&context, action, rng)?;
        records.push(LogRecord {
            index: t as u64,
            context,
            action,
            logging_prob,
            reward,
        });
    }
    Ok(records)
}
