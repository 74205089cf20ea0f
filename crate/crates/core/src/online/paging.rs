//! Paging policies on uniform metrics: FIFO, LRU and marking.
//!
//! Slots are server indices; a fault moves the victim slot's server to the
//! requested site. `phase_partition` splits a request sequence into maximal
//! segments with at most k distinct pages — the standard lower-bound device
//! for paging optima.

use super::{Movement, OnlineAlgorithm, Step};
use crate::metric::{MetricSpace, Point};
use crate::schedule::Configuration;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

fn pages_of(config: &Configuration) -> Result<Vec<usize>, String> {
    let pages: Vec<usize> = config
        .iter()
        .map(|p| p.site_index().ok_or_else(|| "paging wants site positions".to_string()))
        .collect::<Result<_, _>>()?;
    let mut seen = pages.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != pages.len() {
        return Err("paging start configuration has duplicate pages".into());
    }
    Ok(pages)
}

fn want_uniform(space: &MetricSpace) -> Result<(), String> {
    match space {
        MetricSpace::Uniform { .. } => Ok(()),
        _ => Err("paging policies run on uniform spaces only".into()),
    }
}

fn page_of(request: &Point) -> Result<usize, String> {
    request.site_index().ok_or_else(|| "paging request must be a site".to_string())
}

/// First-in first-out: evict the page resident longest.
#[derive(Default)]
pub struct Fifo {
    slots: Vec<usize>,
    order: VecDeque<usize>, // slot indices, oldest load first
}

impl Fifo {
    pub fn new() -> Fifo {
        Fifo::default()
    }
}

impl OnlineAlgorithm for Fifo {
    fn start(&mut self, space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        want_uniform(space)?;
        self.slots = pages_of(config)?;
        self.order = (0..self.slots.len()).collect();
        Ok(vec![])
    }

    fn serve(&mut self, _space: &MetricSpace, _t: usize, request: &Point) -> Result<Vec<Step>, String> {
        let page = page_of(request)?;
        if self.slots.contains(&page) {
            return Ok(vec![Step::request(vec![])]);
        }
        let victim = self.order.pop_front().expect("fifo queue covers all slots");
        self.slots[victim] = page;
        self.order.push_back(victim);
        Ok(vec![Step::request(vec![Movement { server: victim, to: Point::site(page) }])])
    }
}

/// Least recently used: evict the page whose last request is oldest
/// (initial pages count as never requested; ties go to the lowest slot).
#[derive(Default)]
pub struct Lru {
    slots: Vec<usize>,
    last_used: Vec<u64>,
    clock: u64,
}

impl Lru {
    pub fn new() -> Lru {
        Lru::default()
    }
}

impl OnlineAlgorithm for Lru {
    fn start(&mut self, space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        want_uniform(space)?;
        self.slots = pages_of(config)?;
        self.last_used = vec![0; self.slots.len()];
        self.clock = 0;
        Ok(vec![])
    }

    fn serve(&mut self, _space: &MetricSpace, _t: usize, request: &Point) -> Result<Vec<Step>, String> {
        let page = page_of(request)?;
        self.clock += 1;
        if let Some(slot) = self.slots.iter().position(|&p| p == page) {
            self.last_used[slot] = self.clock;
            return Ok(vec![Step::request(vec![])]);
        }
        let victim = (0..self.slots.len())
            .min_by_key(|&s| (self.last_used[s], s))
            .expect("nonempty cache");
        self.slots[victim] = page;
        self.last_used[victim] = self.clock;
        Ok(vec![Step::request(vec![Movement { server: victim, to: Point::site(page) }])])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvictionRule {
    LowestIndex,
    SeededRandom(u64),
}

/// Marking: mark on every hit and load; on a fault with every slot marked,
/// clear all marks first, then evict an unmarked slot per the rule.
pub struct Marking {
    rule: EvictionRule,
    rng: Option<ChaCha8Rng>,
    slots: Vec<usize>,
    marked: Vec<bool>,
}

impl Marking {
    pub fn new(rule: EvictionRule) -> Marking {
        let rng = match rule {
            EvictionRule::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            EvictionRule::LowestIndex => None,
        };
        Marking { rule, rng, slots: vec![], marked: vec![] }
    }
}

impl OnlineAlgorithm for Marking {
    fn start(&mut self, space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        want_uniform(space)?;
        self.slots = pages_of(config)?;
        self.marked = vec![false; self.slots.len()];
        Ok(vec![])
    }

    fn serve(&mut self, _space: &MetricSpace, _t: usize, request: &Point) -> Result<Vec<Step>, String> {
        let page = page_of(request)?;
        if let Some(slot) = self.slots.iter().position(|&p| p == page) {
            self.marked[slot] = true;
            return Ok(vec![Step::request(vec![])]);
        }
        if self.marked.iter().all(|&m| m) {
            self.marked.fill(false);
        }
        let unmarked: Vec<usize> =
            (0..self.slots.len()).filter(|&s| !self.marked[s]).collect();
        let victim = match (self.rule, self.rng.as_mut()) {
            (EvictionRule::LowestIndex, _) => unmarked[0],
            (EvictionRule::SeededRandom(_), Some(rng)) => *unmarked.choose(rng).unwrap(),
            _ => unreachable!(),
        };
        self.slots[victim] = page;
        self.marked[victim] = true;
        Ok(vec![Step::request(vec![Movement { server: victim, to: Point::site(page) }])])
    }
}

/// Maximal segments of the request sequence containing at most k distinct
/// pages; returns the half-open index ranges. The segment count lower-bounds
/// the optimal fault count for cold starts.
pub fn phase_partition(k: usize, requests: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut distinct: Vec<usize> = Vec::new();
    for (i, &p) in requests.iter().enumerate() {
        if !distinct.contains(&p) {
            if distinct.len() == k {
                out.push(start..i);
                start = i;
                distinct.clear();
            }
            distinct.push(p);
        }
    }
    if start < requests.len() {
        out.push(start..requests.len());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::run;
    use crate::rational::Rat;

    fn uniform(n: usize) -> MetricSpace {
        MetricSpace::Uniform { n, scale: Rat::int(1) }
    }

    fn sites(pages: &[usize]) -> Vec<Point> {
        pages.iter().map(|&p| Point::site(p)).collect()
    }

    fn faults_per_slot(out: &crate::online::RunOutput) -> Vec<usize> {
        let k = out.ledger.k;
        let mut f = vec![0usize; k];
        for row in &out.ledger.costs {
            for (i, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    f[i] += 1;
                }
            }
        }
        f
    }

    #[test]
    fn fifo_cycles_slots() {
        let space = uniform(6);
        let mut alg = Fifo::new();
        let out = run(&mut alg, &space, &sites(&[0, 1]), &sites(&[2, 3, 4])).unwrap();
        // victims cycle 0, 1, 0
        assert_eq!(faults_per_slot(&out), vec![2, 1]);
    }

    #[test]
    fn lru_evicts_least_recent() {
        let space = uniform(6);
        let mut alg = Lru::new();
        // hit on 1 refreshes slot 1, so 2 evicts slot 0; the old page 0
        // faults back in over slot 1 (now the least recent)
        let out = run(&mut alg, &space, &sites(&[0, 1]), &sites(&[1, 2, 0])).unwrap();
        assert_eq!(faults_per_slot(&out), vec![1, 1]);
        assert_eq!(out.schedule.final_config(), &sites(&[2, 0]));
    }

    #[test]
    fn marking_resets_when_full() {
        let space = uniform(6);
        let mut alg = Marking::new(EvictionRule::LowestIndex);
        // k=2: 2,3 mark both slots; 4 resets marks and evicts slot 0
        let out = run(&mut alg, &space, &sites(&[0, 1]), &sites(&[2, 3, 4])).unwrap();
        assert_eq!(faults_per_slot(&out), vec![2, 1]);
    }

    #[test]
    fn marking_seeded_random_is_reproducible() {
        let space = uniform(8);
        let reqs = sites(&[2, 3, 4, 5, 2, 6, 7, 3]);
        let a = {
            let mut alg = Marking::new(EvictionRule::SeededRandom(7));
            run(&mut alg, &space, &sites(&[0, 1]), &reqs).unwrap()
        };
        let b = {
            let mut alg = Marking::new(EvictionRule::SeededRandom(7));
            run(&mut alg, &space, &sites(&[0, 1]), &reqs).unwrap()
        };
        assert_eq!(a.ledger, b.ledger);
    }

    #[test]
    fn phase_partition_counts() {
        // k=2: [1 2 2] [3 1] [4]
        let phases = phase_partition(2, &[1, 2, 2, 3, 1, 4]);
        assert_eq!(phases, vec![0..3, 3..5, 5..6]);
        assert_eq!(phase_partition(3, &[]), Vec::<std::ops::Range<usize>>::new());
    }
}
