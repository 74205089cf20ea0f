//! Instances, schedules, per-server cost ledgers and run traces.
//!
//! A `Schedule` is the full movement history of k servers: an initial
//! configuration plus one configuration per step. Steps that serve a request
//! carry its index; extra steps injected by fairness wrappers are tagged so
//! audits can separate base cost from correction cost. Out-and-back
//! corrections are recorded as two steps (out, back) so that per-step cost
//! is always the plain distance between consecutive configurations.

use crate::metric::{MetricSpace, Point};
use crate::rational::{rat_sum, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Configuration = Vec<Point>;

/// A k-server instance: where the servers start and what they must serve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub space: MetricSpace,
    pub start: Configuration,
    pub requests: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl Instance {
    pub fn k(&self) -> usize {
        self.start.len()
    }

    pub fn validate(&self) -> Result<(), String> {
        self.space.validate().map_err(|e| e.to_string())?;
        if self.start.is_empty() {
            return Err("instance with no servers".into());
        }
        for p in self.start.iter().chain(self.requests.iter()) {
            self.space.distance(p, p).map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepTag {
    Request,
    PhaseSwap,
    Correction,
    TailCorrection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub config: Configuration,
    /// Index into the request sequence when this step serves a request.
    pub serves: Option<usize>,
    pub tag: StepTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub initial: Configuration,
    pub steps: Vec<ScheduleStep>,
}

impl Schedule {
    pub fn k(&self) -> usize {
        self.initial.len()
    }

    pub fn final_config(&self) -> &Configuration {
        self.steps.last().map(|s| &s.config).unwrap_or(&self.initial)
    }

    /// Configuration after `i` steps (0 = initial).
    pub fn config_at(&self, i: usize) -> &Configuration {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].config
        }
    }
}

/// Feasibility: every request is served exactly once, in order, by a server
/// that is actually at the request point, and the server count never changes.
pub fn verify_schedule(
    space: &MetricSpace,
    schedule: &Schedule,
    requests: &[Point],
) -> Result<(), String> {
    let k = schedule.k();
    if k == 0 {
        return Err("schedule with no servers".into());
    }
    let mut next_request = 0usize;
    for (i, step) in schedule.steps.iter().enumerate() {
        if step.config.len() != k {
            return Err(format!("step {i} changes the number of servers"));
        }
        if let Some(t) = step.serves {
            if t != next_request {
                return Err(format!(
                    "step {i} serves request {t}, expected request {next_request}"
                ));
            }
            let q = requests
                .get(t)
                .ok_or_else(|| format!("step {i} serves nonexistent request {t}"))?;
            let covered = step
                .config
                .iter()
                .any(|p| matches!(space.distance(p, q), Ok(d) if d.is_zero()));
            if !covered {
                return Err(format!("request {t} is not covered at step {i}"));
            }
            next_request += 1;
        }
    }
    if next_request != requests.len() {
        return Err(format!(
            "schedule serves {next_request} of {} requests",
            requests.len()
        ));
    }
    Ok(())
}

/// Per-step, per-server movement costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub k: usize,
    /// costs[step][server]
    pub costs: Vec<Vec<Rat>>,
    pub tags: Vec<StepTag>,
}

impl CostLedger {
    pub fn steps(&self) -> usize {
        self.costs.len()
    }

    /// Total cost of each server over the whole run.
    pub fn totals(&self) -> Vec<Rat> {
        let mut out = vec![Rat::ZERO; self.k];
        for step in &self.costs {
            for (i, c) in step.iter().enumerate() {
                out[i] += *c;
            }
        }
        out
    }

    pub fn total(&self) -> Rat {
        rat_sum(&self.totals())
    }

    pub fn max_server(&self) -> Rat {
        self.totals().into_iter().max().unwrap_or(Rat::ZERO)
    }

    pub fn min_server(&self) -> Rat {
        self.totals().into_iter().min().unwrap_or(Rat::ZERO)
    }

    /// Cumulative per-server cost after each step; row 0 is all zeros.
    pub fn cumulative(&self) -> Vec<Vec<Rat>> {
        let mut out = Vec::with_capacity(self.steps() + 1);
        let mut cur = vec![Rat::ZERO; self.k];
        out.push(cur.clone());
        for step in &self.costs {
            for (i, c) in step.iter().enumerate() {
                cur[i] += *c;
            }
            out.push(cur.clone());
        }
        out
    }

    /// Totals restricted to steps with the given tag.
    pub fn totals_tagged(&self, tag: StepTag) -> Vec<Rat> {
        let mut out = vec![Rat::ZERO; self.k];
        for (step, t) in self.costs.iter().zip(&self.tags) {
            if *t == tag {
                for (i, c) in step.iter().enumerate() {
                    out[i] += *c;
                }
            }
        }
        out
    }
}

/// Ledger implied by a schedule: each server is charged the distance between
/// its consecutive positions. Exact whenever each step's movement is a
/// one-way geodesic, which holds for every schedule this crate produces.
pub fn ledger_from_schedule(
    space: &MetricSpace,
    schedule: &Schedule,
) -> Result<CostLedger, String> {
    let k = schedule.k();
    let mut costs = Vec::with_capacity(schedule.steps.len());
    let mut tags = Vec::with_capacity(schedule.steps.len());
    let mut prev = &schedule.initial;
    for step in &schedule.steps {
        let mut row = Vec::with_capacity(k);
        for i in 0..k {
            row.push(
                space
                    .distance(&prev[i], &step.config[i])
                    .map_err(|e| e.to_string())?,
            );
        }
        costs.push(row);
        tags.push(step.tag);
        prev = &step.config;
    }
    Ok(CostLedger { k, costs, tags })
}

/// One recorded movement segment inside a step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovementRecord {
    pub server: usize,
    pub from: Point,
    pub to: Point,
    pub cost: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub tag: StepTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request: Option<Point>,
    pub movements: Vec<MovementRecord>,
    pub costs: Vec<Rat>,
    pub config: Configuration,
}

/// Full movement trace of a run plus algorithm-reported exact metrics
/// (e.g. double coverage's converging/diverging accumulators).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub metrics: BTreeMap<String, Rat>,
}

impl Trace {
    /// One JSON object per line: each step record, then a metrics line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace record serializes"));
            out.push('\n');
        }
        out.push_str(
            &serde_json::to_string(&serde_json::json!({ "metrics": self.metrics }))
                .expect("metrics serialize"),
        );
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(len: i64) -> MetricSpace {
        MetricSpace::Line { length: Rat::int(len) }
    }

    fn c(xs: &[i64]) -> Configuration {
        xs.iter().map(|&x| Point::coord(Rat::int(x))).collect()
    }

    #[test]
    fn ledger_from_schedule_charges_distances() {
        let space = line(10);
        let schedule = Schedule {
            initial: c(&[0, 10]),
            steps: vec![
                ScheduleStep { config: c(&[3, 10]), serves: Some(0), tag: StepTag::Request },
                ScheduleStep { config: c(&[3, 7]), serves: Some(1), tag: StepTag::Request },
            ],
        };
        let requests = vec![Point::coord(Rat::int(3)), Point::coord(Rat::int(7))];
        verify_schedule(&space, &schedule, &requests).unwrap();
        let ledger = ledger_from_schedule(&space, &schedule).unwrap();
        assert_eq!(ledger.totals(), vec![Rat::int(3), Rat::int(3)]);
        assert_eq!(ledger.total(), Rat::int(6));
        assert_eq!(ledger.cumulative()[1], vec![Rat::int(3), Rat::ZERO]);
    }

    #[test]
    fn verify_rejects_uncovered_request() {
        let space = line(10);
        let schedule = Schedule {
            initial: c(&[0]),
            steps: vec![ScheduleStep { config: c(&[2]), serves: Some(0), tag: StepTag::Request }],
        };
        let requests = vec![Point::coord(Rat::int(3))];
        assert!(verify_schedule(&space, &schedule, &requests)
            .unwrap_err()
            .contains("not covered"));
    }

    #[test]
    fn verify_rejects_missing_requests() {
        let space = line(10);
        let schedule = Schedule { initial: c(&[0]), steps: vec![] };
        let requests = vec![Point::coord(Rat::int(3))];
        assert!(verify_schedule(&space, &schedule, &requests).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let inst = Instance {
            space: line(4),
            start: c(&[0, 4]),
            requests: vec![Point::coord(Rat::new(1, 2))],
            provenance: Some("test".into()),
        };
        let s = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inst);
    }
}
