//! Double coverage on lines and trees, simulated exactly.
//!
//! Tree version: all unblocked servers advance toward the request at equal
//! speed. The continuous motion is discretized into events — a server
//! reaching the request, a path vertex, or a stationary server — and between
//! events every unblocked server advances by the same exact rational delta.
//! A server is blocked when another server sits strictly inside its path to
//! the request; among co-located servers the lowest index is in front.
//!
//! Line version: only the nearest server on each side moves, in closed form.
//! Rightward/leftward movement totals are accumulated per position rank —
//! servers never cross on a line, so ranks are fixed at start
//! (`line-right-i` / `line-left-i`). For k = 2 on trees the converging/
//! diverging split (`con-i` / `div-i`) of every segment is tracked.

use super::{Movement, OnlineAlgorithm, Step};
use crate::metric::{MetricSpace, Point, TreeMetric};
use crate::rational::Rat;
use crate::schedule::Configuration;
use std::collections::BTreeMap;

#[derive(Default)]
pub struct Dca {
    positions: Configuration,
    /// position rank -> server; servers never cross on a line, so this is
    /// fixed at start (ties broken by index) and the flow accumulators are
    /// keyed by rank
    rank: Vec<usize>,
    right: Vec<Rat>,
    left: Vec<Rat>,
    con: Vec<Rat>,
    div: Vec<Rat>,
}

impl Dca {
    pub fn new() -> Dca {
        Dca::default()
    }

    pub fn con(&self) -> &[Rat] {
        &self.con
    }

    pub fn div(&self) -> &[Rat] {
        &self.div
    }

    fn serve_line(&mut self, request: &Point) -> Result<Vec<Step>, String> {
        let x = request.coord_value().ok_or("line request must be a coordinate")?;
        let pos: Vec<Rat> = self
            .positions
            .iter()
            .map(|p| p.coord_value().ok_or("line server position must be a coordinate"))
            .collect::<Result<_, _>>()?;
        if pos.iter().any(|&p| p == x) {
            return Ok(vec![Step::request(vec![])]);
        }
        // highest rank strictly left, lowest rank strictly right; with the
        // request uncovered these are adjacent ranks
        let mut a: Option<usize> = None;
        let mut b: Option<usize> = None;
        for (r, &srv) in self.rank.iter().enumerate() {
            if pos[srv] < x {
                a = Some(r);
            }
            if pos[srv] > x && b.is_none() {
                b = Some(r);
            }
        }
        let mut movements = Vec::new();
        match (a, b) {
            (Some(a), Some(b)) => {
                debug_assert_eq!(b, a + 1);
                let (i, j) = (self.rank[a], self.rank[b]);
                let delta = (x - pos[i]).min(pos[j] - x);
                self.right[a] += delta;
                self.left[b] += delta;
                movements.push(Movement { server: i, to: Point::coord(pos[i] + delta) });
                movements.push(Movement { server: j, to: Point::coord(pos[j] - delta) });
            }
            (Some(a), None) => {
                let i = self.rank[a];
                self.right[a] += x - pos[i];
                movements.push(Movement { server: i, to: Point::coord(x) });
            }
            (None, Some(b)) => {
                let j = self.rank[b];
                self.left[b] += pos[j] - x;
                movements.push(Movement { server: j, to: Point::coord(x) });
            }
            (None, None) => return Err("no server can move".into()),
        }
        for m in &movements {
            self.positions[m.server] = m.to.clone();
        }
        Ok(vec![Step::request(movements)])
    }

    fn serve_tree(&mut self, tree: &TreeMetric, request: &Point) -> Result<Vec<Step>, String> {
        let k = self.positions.len();
        let q = tree.canon(request.clone());
        let mut movements = Vec::new();
        loop {
            let dist_q: Vec<Rat> = self
                .positions
                .iter()
                .map(|p| tree.distance(p, &q))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            if dist_q.iter().any(|d| d.is_zero()) {
                break;
            }
            // unblocked set
            let mut unblocked = Vec::new();
            'servers: for i in 0..k {
                for j in 0..k {
                    if j == i {
                        continue;
                    }
                    let d_ij = tree.distance(&self.positions[i], &self.positions[j])
                        .map_err(|e| e.to_string())?;
                    if d_ij.is_zero() {
                        if j < i {
                            continue 'servers; // a co-located lower index is in front
                        }
                        continue;
                    }
                    let on = d_ij + tree.distance(&self.positions[j], &q).map_err(|e| e.to_string())?
                        == dist_q[i];
                    if on {
                        continue 'servers;
                    }
                }
                unblocked.push(i);
            }
            if unblocked.is_empty() {
                return Err("double coverage stalled: all servers blocked".into());
            }
            // next event distance
            let mut delta: Option<Rat> = None;
            let mut shrink = |d: Rat| {
                if d > Rat::ZERO {
                    delta = Some(match delta {
                        None => d,
                        Some(x) => x.min(d),
                    });
                }
            };
            for &i in &unblocked {
                shrink(dist_q[i]);
                let path = tree
                    .tree_path(&self.positions[i], &q)
                    .map_err(|e| e.to_string())?;
                if path.len() > 1 {
                    shrink(path[1].1);
                }
                for j in 0..k {
                    if j == i {
                        continue;
                    }
                    let d_ij = tree.distance(&self.positions[i], &self.positions[j])
                        .map_err(|e| e.to_string())?;
                    if !d_ij.is_zero() {
                        let on = d_ij
                            + tree.distance(&self.positions[j], &q).map_err(|e| e.to_string())?
                            == dist_q[i];
                        if on {
                            shrink(d_ij);
                        }
                    }
                }
            }
            let delta = delta.expect("positive event distance");
            // advance all unblocked servers simultaneously
            let before = self.positions.clone();
            for &i in &unblocked {
                let to = tree
                    .advance_along(&self.positions[i], &q, delta)
                    .map_err(|e| e.to_string())?;
                self.positions[i] = to.clone();
                movements.push(Movement { server: i, to });
            }
            if k == 2 {
                // attribute the pair-distance change per mover: server 0's
                // segment against server 1's old position, then server 1's
                // against server 0's new one. Within an event no segment
                // crosses a vertex, so each slope is exactly +-1.
                for i in 0..2 {
                    if !unblocked.contains(&i) {
                        continue;
                    }
                    let other = if i == 0 { before[1].clone() } else { self.positions[0].clone() };
                    let d_old = tree.distance(&before[i], &other).map_err(|e| e.to_string())?;
                    let d_new = tree
                        .distance(&self.positions[i], &other)
                        .map_err(|e| e.to_string())?;
                    if d_new < d_old {
                        debug_assert!(d_old - d_new == delta);
                        self.con[i] += delta;
                    } else {
                        debug_assert!(d_new - d_old == delta);
                        self.div[i] += delta;
                    }
                }
            }
        }
        Ok(vec![Step::request(movements)])
    }
}

impl OnlineAlgorithm for Dca {
    fn start(&mut self, space: &MetricSpace, config: &Configuration) -> Result<Vec<Step>, String> {
        match space {
            MetricSpace::Line { .. } | MetricSpace::Tree(_) => {}
            _ => return Err("double coverage runs on lines and trees only".into()),
        }
        self.positions = config.clone();
        if let MetricSpace::Tree(t) = space {
            self.positions = self.positions.iter().map(|p| t.canon(p.clone())).collect();
        }
        let k = config.len();
        self.rank = (0..k).collect();
        if matches!(space, MetricSpace::Line { .. }) {
            let coords: Vec<Rat> = config
                .iter()
                .map(|p| p.coord_value().ok_or("line server position must be a coordinate".to_string()))
                .collect::<Result<_, _>>()?;
            self.rank.sort_by(|&a, &b| coords[a].cmp(&coords[b]).then(a.cmp(&b)));
        }
        self.right = vec![Rat::ZERO; k];
        self.left = vec![Rat::ZERO; k];
        self.con = vec![Rat::ZERO; k];
        self.div = vec![Rat::ZERO; k];
        Ok(vec![])
    }

    fn serve(
        &mut self,
        space: &MetricSpace,
        _t: usize,
        request: &Point,
    ) -> Result<Vec<Step>, String> {
        match space {
            MetricSpace::Line { .. } => self.serve_line(request),
            MetricSpace::Tree(t) => self.serve_tree(t, request),
            _ => Err("double coverage runs on lines and trees only".into()),
        }
    }

    fn metrics(&self) -> BTreeMap<String, Rat> {
        let mut m = BTreeMap::new();
        for (i, r) in self.right.iter().enumerate() {
            if !r.is_zero() {
                m.insert(format!("line-right-{i}"), *r);
            }
        }
        for (i, l) in self.left.iter().enumerate() {
            if !l.is_zero() {
                m.insert(format!("line-left-{i}"), *l);
            }
        }
        if self.con.len() == 2 {
            for i in 0..2 {
                m.insert(format!("con-{i}"), self.con[i]);
                m.insert(format!("div-{i}"), self.div[i]);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::TreeEdge;
    use crate::online::run;

    fn coords(xs: &[i64]) -> Configuration {
        xs.iter().map(|&x| Point::coord(Rat::int(x))).collect()
    }

    #[test]
    fn line_two_servers_share_movement() {
        let space = MetricSpace::Line { length: Rat::int(10) };
        let mut alg = Dca::new();
        let out = run(&mut alg, &space, &coords(&[0, 10]), &[Point::coord(Rat::int(4))]).unwrap();
        // both move 4; left server reaches the request
        assert_eq!(out.ledger.totals(), vec![Rat::int(4), Rat::int(4)]);
        assert_eq!(
            out.schedule.final_config(),
            &coords(&[4, 6])
        );
    }

    #[test]
    fn line_outside_hull_single_mover() {
        let space = MetricSpace::Line { length: Rat::int(10) };
        let mut alg = Dca::new();
        let out = run(&mut alg, &space, &coords(&[3, 5]), &[Point::coord(Rat::int(9))]).unwrap();
        assert_eq!(out.ledger.totals(), vec![Rat::ZERO, Rat::int(4)]);
    }

    #[test]
    fn line_right_equals_next_left() {
        let space = MetricSpace::Line { length: Rat::int(100) };
        let mut alg = Dca::new();
        let reqs: Vec<Point> = [30i64, 70, 10, 55, 90, 2]
            .iter()
            .map(|&x| Point::coord(Rat::int(x)))
            .collect();
        let out = run(&mut alg, &space, &coords(&[20, 50, 80]), &reqs).unwrap();
        let m = out.trace.metrics;
        let get = |k: &str| m.get(k).copied().unwrap_or(Rat::ZERO);
        // servers keep their order on the line; right flow of i = left flow of i+1
        assert_eq!(get("line-right-0"), get("line-left-1"));
        assert_eq!(get("line-right-1"), get("line-left-2"));
    }

    #[test]
    fn tree_blocking_matches_hand_simulation() {
        // star with center 0 and three unit legs to 1, 2, 3
        let tree = TreeMetric::new(
            4,
            (1..4)
                .map(|v| TreeEdge { u: 0, v, len: Rat::int(1) })
                .collect(),
        )
        .unwrap();
        let space = MetricSpace::Tree(tree);
        let start = vec![Point::site(1), Point::site(2)];
        // request leaf 3: both servers converge on the center, then the
        // first one entering the request leg blocks the other at the center
        let mut alg = Dca::new();
        let out = run(&mut alg, &space, &start, &[Point::site(3)]).unwrap();
        assert_eq!(out.ledger.totals(), vec![Rat::int(2), Rat::int(1)]);
        assert_eq!(out.schedule.final_config(), &vec![Point::site(3), Point::site(0)]);
        // both converged while walking to the center, then server 0 diverged
        // into the request leg
        assert_eq!(alg.con(), &[Rat::int(1), Rat::int(1)]);
        assert_eq!(alg.div(), &[Rat::int(1), Rat::ZERO]);
    }

    #[test]
    fn tree_request_behind_server() {
        // path 0 -1- 1 -1- 2; servers at 1 and 2; request at 0:
        // server at 1 moves alone, server at 2 is blocked
        let tree = TreeMetric::new(
            3,
            vec![
                TreeEdge { u: 0, v: 1, len: Rat::int(1) },
                TreeEdge { u: 1, v: 2, len: Rat::int(1) },
            ],
        )
        .unwrap();
        let space = MetricSpace::Tree(tree);
        let mut alg = Dca::new();
        let out = run(
            &mut alg,
            &space,
            &vec![Point::site(1), Point::site(2)],
            &[Point::site(0)],
        )
        .unwrap();
        assert_eq!(out.ledger.totals(), vec![Rat::int(1), Rat::ZERO]);
        assert_eq!(alg.div(), &[Rat::int(1), Rat::ZERO]);
    }

    #[test]
    fn zero_distance_request_costs_nothing() {
        let space = MetricSpace::Line { length: Rat::int(10) };
        let mut alg = Dca::new();
        let out = run(&mut alg, &space, &coords(&[2, 8]), &[Point::coord(Rat::int(8))]).unwrap();
        assert_eq!(out.ledger.total(), Rat::ZERO);
    }
}
