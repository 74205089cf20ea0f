//! Online k-server algorithms and the runner that turns a request-by-request
//! simulation into a schedule, cost ledger and trace.
//!
//! Algorithms return a list of `Step`s per request. Exactly one step is
//! tagged `Request` and must end with a server on the request point; any
//! other steps (phase swaps, corrections) come from fairness wrappers.
//! Within a step a server may move through several recorded segments (the
//! double-coverage event loop does); its step cost is the summed segment
//! lengths, which for one-way geodesic movement equals the endpoint
//! distance.

pub mod balance;
pub mod dca;
pub mod paging;

use crate::metric::{MetricSpace, Point};
use crate::rational::Rat;
use crate::schedule::{
    Configuration, CostLedger, MovementRecord, Schedule, ScheduleStep, StepTag, Trace, TraceRecord,
};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct Movement {
    pub server: usize,
    pub to: Point,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub tag: StepTag,
    pub movements: Vec<Movement>,
}

impl Step {
    pub fn request(movements: Vec<Movement>) -> Step {
        Step { tag: StepTag::Request, movements }
    }
}

pub trait OnlineAlgorithm {
    /// Called once with the initial configuration; may emit setup steps
    /// (the phased-swap wrapper permutes servers here).
    fn start(
        &mut self,
        _space: &MetricSpace,
        _config: &Configuration,
    ) -> Result<Vec<Step>, String> {
        Ok(vec![])
    }

    /// Steps taken to serve one request; exactly one must be tagged
    /// `Request`.
    fn serve(&mut self, space: &MetricSpace, t: usize, request: &Point)
        -> Result<Vec<Step>, String>;

    /// Steps appended after the final request (end-of-sequence corrections).
    fn finish(&mut self, _space: &MetricSpace) -> Result<Vec<Step>, String> {
        Ok(vec![])
    }

    /// Exact per-run accumulators the algorithm chooses to expose.
    fn metrics(&self) -> BTreeMap<String, Rat> {
        BTreeMap::new()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub schedule: Schedule,
    pub ledger: CostLedger,
    pub trace: Trace,
}

pub fn run(
    alg: &mut dyn OnlineAlgorithm,
    space: &MetricSpace,
    start: &Configuration,
    requests: &[Point],
) -> Result<RunOutput, String> {
    let k = start.len();
    if k == 0 {
        return Err("no servers".into());
    }
    let mut positions = start.clone();
    let mut steps: Vec<ScheduleStep> = Vec::new();
    let mut costs: Vec<Vec<Rat>> = Vec::new();
    let mut tags: Vec<StepTag> = Vec::new();
    let mut records: Vec<TraceRecord> = Vec::new();

    let apply = |step: Step,
                     serves: Option<usize>,
                     request: Option<&Point>,
                     positions: &mut Configuration,
                     steps: &mut Vec<ScheduleStep>,
                     costs: &mut Vec<Vec<Rat>>,
                     tags: &mut Vec<StepTag>,
                     records: &mut Vec<TraceRecord>|
     -> Result<(), String> {
        let mut row = vec![Rat::ZERO; k];
        let mut recs = Vec::with_capacity(step.movements.len());
        for m in step.movements {
            if m.server >= k {
                return Err(format!("movement for nonexistent server {}", m.server));
            }
            let from = positions[m.server].clone();
            let cost = space.distance(&from, &m.to).map_err(|e| e.to_string())?;
            row[m.server] += cost;
            positions[m.server] = m.to.clone();
            recs.push(MovementRecord { server: m.server, from, to: m.to, cost });
        }
        if let (Some(t), Some(q)) = (serves, request) {
            let covered = positions
                .iter()
                .any(|p| matches!(space.distance(p, q), Ok(d) if d.is_zero()));
            if !covered {
                return Err(format!("request {t} left uncovered"));
            }
        }
        records.push(TraceRecord {
            step: steps.len(),
            tag: step.tag,
            request: request.cloned(),
            movements: recs,
            costs: row.clone(),
            config: positions.clone(),
        });
        steps.push(ScheduleStep { config: positions.clone(), serves, tag: step.tag });
        costs.push(row);
        tags.push(step.tag);
        Ok(())
    };

    for step in alg.start(space, start)? {
        if step.tag == StepTag::Request {
            return Err("setup step tagged as a request".into());
        }
        apply(step, None, None, &mut positions, &mut steps, &mut costs, &mut tags, &mut records)?;
    }
    for (t, q) in requests.iter().enumerate() {
        let mut served = false;
        for step in alg.serve(space, t, q)? {
            let is_req = step.tag == StepTag::Request;
            if is_req && served {
                return Err(format!("request {t} served twice"));
            }
            apply(
                step,
                if is_req { Some(t) } else { None },
                if is_req { Some(q) } else { None },
                &mut positions,
                &mut steps,
                &mut costs,
                &mut tags,
                &mut records,
            )?;
            served |= is_req;
        }
        if !served {
            return Err(format!("no serving step for request {t}"));
        }
    }
    for step in alg.finish(space)? {
        if step.tag == StepTag::Request {
            return Err("finish step tagged as a request".into());
        }
        apply(step, None, None, &mut positions, &mut steps, &mut costs, &mut tags, &mut records)?;
    }

    Ok(RunOutput {
        schedule: Schedule { initial: start.clone(), steps },
        ledger: CostLedger { k, costs, tags },
        trace: Trace { records, metrics: alg.metrics() },
    })
}
