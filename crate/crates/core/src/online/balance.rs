//! Balance and greedy: the two single-mover baselines.
//!
//! Balance sends the server minimizing accumulated cost plus distance, which
//! keeps per-server totals within one diameter of each other. Greedy sends
//! the nearest server — maximally unfair on purpose, it is the stress-test
//! base for the fairness wrappers.

use super::{Movement, OnlineAlgorithm, Step};
use crate::metric::{MetricSpace, Point};
use crate::rational::Rat;
use crate::schedule::Configuration;

#[derive(Default)]
pub struct BalanceAlg {
    positions: Configuration,
    spent: Vec<Rat>,
}

impl BalanceAlg {
    pub fn new() -> BalanceAlg {
        BalanceAlg::default()
    }
}

impl OnlineAlgorithm for BalanceAlg {
    fn start(&mut self, _space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        self.positions = config.clone();
        self.spent = vec![Rat::ZERO; config.len()];
        Ok(vec![])
    }

    fn serve(&mut self, space: &MetricSpace, _t: usize, request: &Point) -> Result<Vec<Step>, String> {
        let dists: Vec<Rat> = self
            .positions
            .iter()
            .map(|p| space.distance(p, request))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if dists.iter().any(|d| d.is_zero()) {
            return Ok(vec![Step::request(vec![])]);
        }
        let mover = (0..dists.len())
            .min_by(|&a, &b| (self.spent[a] + dists[a]).cmp(&(self.spent[b] + dists[b])).then(a.cmp(&b)))
            .expect("at least one server");
        self.spent[mover] += dists[mover];
        self.positions[mover] = request.clone();
        Ok(vec![Step::request(vec![Movement { server: mover, to: request.clone() }])])
    }
}

#[derive(Default)]
pub struct Greedy {
    positions: Configuration,
}

impl Greedy {
    pub fn new() -> Greedy {
        Greedy::default()
    }
}

impl OnlineAlgorithm for Greedy {
    fn start(&mut self, _space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        self.positions = config.clone();
        Ok(vec![])
    }

    fn serve(&mut self, space: &MetricSpace, _t: usize, request: &Point) -> Result<Vec<Step>, String> {
        let dists: Vec<Rat> = self
            .positions
            .iter()
            .map(|p| space.distance(p, request))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if dists.iter().any(|d| d.is_zero()) {
            return Ok(vec![Step::request(vec![])]);
        }
        let mover = (0..dists.len())
            .min_by(|&a, &b| dists[a].cmp(&dists[b]).then(a.cmp(&b)))
            .expect("at least one server");
        self.positions[mover] = request.clone();
        Ok(vec![Step::request(vec![Movement { server: mover, to: request.clone() }])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::run;

    #[test]
    fn balance_spreads_cost() {
        // uniform space: greedy would let server 0 absorb everything,
        // balance alternates because accumulated cost breaks the ties
        let space = MetricSpace::Uniform { n: 8, scale: Rat::int(1) };
        let start = vec![Point::site(0), Point::site(1)];
        let reqs: Vec<Point> = [2usize, 3, 4, 5].iter().map(|&p| Point::site(p)).collect();
        let out = {
            let mut alg = BalanceAlg::new();
            run(&mut alg, &space, &start, &reqs).unwrap()
        };
        assert_eq!(out.ledger.totals(), vec![Rat::int(2), Rat::int(2)]);
        let out = {
            let mut alg = Greedy::new();
            run(&mut alg, &space, &start, &reqs).unwrap()
        };
        assert_eq!(out.ledger.totals(), vec![Rat::int(4), Rat::ZERO]);
    }

    #[test]
    fn balance_gap_bounded_by_diameter() {
        let space = MetricSpace::Line { length: Rat::int(9) };
        let start: Vec<Point> = [0i64, 5, 9].iter().map(|&x| Point::coord(Rat::int(x))).collect();
        let reqs: Vec<Point> = [7i64, 1, 8, 3, 2, 9, 4, 6, 0]
            .iter()
            .map(|&x| Point::coord(Rat::int(x)))
            .collect();
        let mut alg = BalanceAlg::new();
        let out = run(&mut alg, &space, &start, &reqs).unwrap();
        let gap = out.ledger.max_server() - out.ledger.min_server();
        assert!(gap <= space.diameter());
    }
}
