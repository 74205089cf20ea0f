//! Exact offline optimum for k-server.
//!
//! `opt_solve` reduces the instance to a unit-capacity min-cost flow
//! (source -> server -> request chain -> sink) and runs successive shortest
//! paths with potentials on integer costs obtained by clearing the rational
//! distances to a common denominator, so the optimum is exact. A large
//! negative reward on each request's through-arc forces every request to be
//! served. `opt_bruteforce` is the independent oracle: dynamic programming
//! over configurations restricted to start/request sites. `belady_faults`
//! is a second independent oracle for paging.

use crate::metric::Point;
use crate::rational::Rat;
use crate::schedule::{ledger_from_schedule, Instance, Schedule, ScheduleStep, StepTag};
use std::collections::{HashMap, VecDeque};

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct OptSolution {
    pub cost: Rat,
    /// Which server serves each request.
    pub assignment: Vec<usize>,
    /// Lazy schedule: exactly the serving server relocates at each step.
    pub schedule: Schedule,
}

struct Mcf {
    n: usize,
    // edge arrays, twin edge is e ^ 1
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i128>,
    head: Vec<Vec<usize>>, // node -> edge ids
}

impl Mcf {
    fn new(n: usize) -> Mcf {
        Mcf { n, to: vec![], cap: vec![], cost: vec![], head: vec![Vec::new(); n] }
    }

    fn link(&mut self, u: usize, v: usize, cap: i64, cost: i128) -> usize {
        let e = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost);
        self.head[u].push(e);
        self.to.push(u);
        self.cap.push(0);
        self.cost.push(-cost);
        self.head[v].push(e + 1);
        e
    }

    /// Min-cost flow of exactly `units` from `src` to `sink` by successive
    /// shortest augmenting paths. Residual costs can be negative (and the
    /// serving reward is), so each round uses a Bellman-Ford queue; the SSP
    /// invariant rules out negative cycles.
    fn run(&mut self, src: usize, sink: usize, units: i64) -> i128 {
        const INF: i128 = i128::MAX / 4;
        let mut total = 0i128;
        let mut sent = 0i64;
        while sent < units {
            let mut dist = vec![INF; self.n];
            let mut pedge = vec![usize::MAX; self.n];
            let mut in_queue = vec![false; self.n];
            dist[src] = 0;
            let mut queue = VecDeque::new();
            queue.push_back(src);
            in_queue[src] = true;
            while let Some(u) = queue.pop_front() {
                in_queue[u] = false;
                for &e in &self.head[u] {
                    if self.cap[e] > 0 {
                        let v = self.to[e];
                        let nd = dist[u] + self.cost[e];
                        if nd < dist[v] {
                            dist[v] = nd;
                            pedge[v] = e;
                            if !in_queue[v] {
                                queue.push_back(v);
                                in_queue[v] = true;
                            }
                        }
                    }
                }
            }
            assert!(pedge[sink] != usize::MAX, "flow network infeasible");
            let mut aug = i64::MAX;
            let mut u = sink;
            while u != src {
                let e = pedge[u];
                aug = aug.min(self.cap[e]);
                u = self.to[e ^ 1];
            }
            let mut u = sink;
            while u != src {
                let e = pedge[u];
                self.cap[e] -= aug;
                self.cap[e ^ 1] += aug;
                total += aug as i128 * self.cost[e];
                u = self.to[e ^ 1];
            }
            sent += aug;
        }
        total
    }

    fn flow_on(&self, e: usize) -> i64 {
        self.cap[e ^ 1]
    }
}

fn lcm(a: i128, b: i128) -> i128 {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

pub fn opt_solve(instance: &Instance) -> Result<OptSolution, String> {
    instance.validate()?;
    let k = instance.k();
    let tt = instance.requests.len();
    let space = &instance.space;

    // exact distances we will need, plus the common denominator
    let mut start_to_req = vec![vec![Rat::ZERO; tt]; k];
    let mut req_to_req = vec![vec![Rat::ZERO; tt]; tt];
    let mut denom: i128 = 1;
    let mut magnitude: i128 = 0;
    {
        let mut note = |r: Rat| {
            denom = lcm(denom, r.den());
            magnitude += r.num().abs() / r.den() + 1;
        };
        for i in 0..k {
            for t in 0..tt {
                let d = space
                    .distance(&instance.start[i], &instance.requests[t])
                    .map_err(|e| e.to_string())?;
                start_to_req[i][t] = d;
                note(d);
            }
        }
        for t in 0..tt {
            for u in (t + 1)..tt {
                let d = space
                    .distance(&instance.requests[t], &instance.requests[u])
                    .map_err(|e| e.to_string())?;
                req_to_req[t][u] = d;
                note(d);
            }
        }
    }
    let scale = |r: Rat| -> i128 {
        let v = r * Rat::new(denom, 1);
        debug_assert!(v.is_integer());
        v.num()
    };
    let reward: i128 = denom
        .checked_mul(magnitude + 1)
        .expect("flow reward overflow");

    // nodes: source, k servers, (in, out) per request, sink
    let src = 0usize;
    let server = |i: usize| 1 + i;
    let rin = |t: usize| 1 + k + 2 * t;
    let rout = |t: usize| 2 + k + 2 * t;
    let sink = 1 + k + 2 * tt;
    let mut net = Mcf::new(sink + 1);

    let mut serve_arcs = vec![vec![usize::MAX; tt]; k]; // server -> first request
    let mut chain_arcs = vec![vec![usize::MAX; tt]; tt]; // request -> next request
    for i in 0..k {
        net.link(src, server(i), 1, 0);
        net.link(server(i), sink, 1, 0);
        for t in 0..tt {
            serve_arcs[i][t] = net.link(server(i), rin(t), 1, scale(start_to_req[i][t]));
        }
    }
    for t in 0..tt {
        net.link(rin(t), rout(t), 1, -reward);
        net.link(rout(t), sink, 1, 0);
        for u in (t + 1)..tt {
            chain_arcs[t][u] = net.link(rout(t), rin(u), 1, scale(req_to_req[t][u]));
        }
    }

    let raw = net.run(src, sink, k as i64);
    let cost = Rat::new(raw + reward * tt as i128, denom);

    // decompose unit flows into per-server served chains
    let mut assignment = vec![usize::MAX; tt];
    for i in 0..k {
        let mut cur: Option<usize> = None;
        for t in 0..tt {
            if net.flow_on(serve_arcs[i][t]) > 0 {
                cur = Some(t);
                break;
            }
        }
        while let Some(t) = cur {
            assignment[t] = i;
            cur = None;
            for u in (t + 1)..tt {
                if net.flow_on(chain_arcs[t][u]) > 0 {
                    cur = Some(u);
                    break;
                }
            }
        }
    }
    if assignment.iter().any(|&a| a == usize::MAX) {
        return Err("flow decomposition left a request unserved".into());
    }

    // lazy schedule
    let mut config = instance.start.clone();
    let mut steps = Vec::with_capacity(tt);
    for t in 0..tt {
        config[assignment[t]] = instance.requests[t].clone();
        steps.push(ScheduleStep { config: config.clone(), serves: Some(t), tag: StepTag::Request });
    }
    let schedule = Schedule { initial: instance.start.clone(), steps };
    let check = ledger_from_schedule(space, &schedule)?.total();
    if check != cost {
        return Err(format!("flow cost {cost} disagrees with schedule cost {check}"));
    }
    Ok(OptSolution { cost, assignment, schedule })
}

/// Exhaustive optimum by dynamic programming over server configurations
/// restricted to start and request sites. Refuses instances whose state
/// space exceeds `budget` (default 2^20) expanded states.
pub fn opt_bruteforce(instance: &Instance, budget: Option<usize>) -> Result<Rat, String> {
    instance.validate()?;
    let budget = budget.unwrap_or(1 << 20);
    let space = &instance.space;
    let k = instance.k();

    let mut sites: Vec<Point> = Vec::new();
    for p in instance.start.iter().chain(instance.requests.iter()) {
        if !sites.contains(p) {
            sites.push(p.clone());
        }
    }
    let s = sites.len();
    let mut dmat = vec![vec![Rat::ZERO; s]; s];
    for a in 0..s {
        for b in 0..s {
            dmat[a][b] = space.distance(&sites[a], &sites[b]).map_err(|e| e.to_string())?;
        }
    }
    let site_of = |p: &Point| sites.iter().position(|q| q == p).unwrap();

    // multiset-of-sites state count times steps must fit the budget
    let mut states: usize = 1;
    for i in 0..k {
        states = states
            .saturating_mul(s + i)
            .checked_div(i + 1)
            .unwrap_or(usize::MAX);
    }
    let work = states.saturating_mul(instance.requests.len().max(1)) * k;
    if work > budget {
        return Err(format!(
            "brute-force state space too large: {work} > budget {budget}"
        ));
    }

    let mut start: Vec<usize> = instance.start.iter().map(|p| site_of(p)).collect();
    start.sort_unstable();
    let mut layer: HashMap<Vec<usize>, Rat> = HashMap::new();
    layer.insert(start, Rat::ZERO);
    for req in &instance.requests {
        let q = site_of(req);
        let mut next: HashMap<Vec<usize>, Rat> = HashMap::new();
        for (config, cost) in &layer {
            for slot in 0..k {
                let p = config[slot];
                let mut nc = config.clone();
                nc[slot] = q;
                nc.sort_unstable();
                let ncost = *cost + dmat[p][q];
                match next.get(&nc) {
                    Some(best) if *best <= ncost => {}
                    _ => {
                        next.insert(nc, ncost);
                    }
                }
            }
        }
        layer = next;
    }
    layer
        .values()
        .min()
        .copied()
        .ok_or_else(|| "no feasible configuration".into())
}

/// Optimal paging fault count: evict the page whose next use is farthest in
/// the future (never-used pages first, lowest slot on ties).
pub fn belady_faults(start_pages: &[usize], requests: &[usize]) -> usize {
    let k = start_pages.len();
    let mut cache: Vec<usize> = start_pages.to_vec();
    let mut faults = 0;
    for t in 0..requests.len() {
        let page = requests[t];
        if cache.contains(&page) {
            continue;
        }
        faults += 1;
        let mut victim = 0usize;
        let mut victim_next = 0usize; // next-use index; len+1 means never
        for slot in 0..k {
            let next = requests[t + 1..]
                .iter()
                .position(|&p| p == cache[slot])
                .map(|d| t + 1 + d)
                .unwrap_or(usize::MAX);
            if slot == 0 || next > victim_next {
                victim = slot;
                victim_next = next;
            }
        }
        cache[victim] = page;
    }
    faults
}
