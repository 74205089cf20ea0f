//! Instance generators: seeded random instances over every space family,
//! plus the two adversarial constructions — the subdivided-spine tree on
//! which double coverage concentrates Omega(k) of its cost on one server,
//! and the page cycle on which LRU concentrates all non-cold faults on one
//! slot.

use crate::metric::{FiniteMetric, MetricSpace, Point, TreeEdge, TreeMetric};
use crate::rational::Rat;
use crate::schedule::Instance;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rat(rng: &mut ChaCha8Rng, max: i64) -> Rat {
    let den = *[1i64, 2, 4, 5, 10].choose(rng).unwrap();
    Rat::new(rng.gen_range(0..=max * den) as i128, den as i128)
}

/// Random instance on a line segment of length `len`.
pub fn gen_line(seed: u64, k: usize, t: usize, len: i64) -> Instance {
    let mut rng = rng(seed);
    let start = (0..k).map(|_| Point::coord(small_rat(&mut rng, len))).collect();
    let requests = (0..t).map(|_| Point::coord(small_rat(&mut rng, len))).collect();
    Instance {
        space: MetricSpace::Line { length: Rat::int(len) },
        start,
        requests,
        provenance: Some(format!("line(seed={seed},k={k},t={t},len={len})")),
    }
}

/// Random paging instance: requests are uniform over `n` pages; the servers
/// start on `k` extra sentinel pages (sites n..n+k) that are never
/// requested, so every first touch of a real page is an observable fault.
pub fn gen_uniform(seed: u64, k: usize, t: usize, n: usize) -> Instance {
    let mut rng = rng(seed);
    let start = (n..n + k).map(Point::site).collect();
    let requests = (0..t).map(|_| Point::site(rng.gen_range(0..n))).collect();
    Instance {
        space: MetricSpace::Uniform { n: n + k, scale: Rat::int(1) },
        start,
        requests,
        provenance: Some(format!("uniform(seed={seed},k={k},t={t},n={n})")),
    }
}

/// Uniform random tree on `n` vertices (decoded Pruefer sequence) with
/// small rational edge lengths; start and requests on random vertices.
pub fn gen_tree(seed: u64, k: usize, t: usize, n: usize) -> Instance {
    assert!(n >= 2);
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(n - 1);
    let len = |rng: &mut ChaCha8Rng| {
        let den = *[1i64, 2, 4].choose(rng).unwrap();
        Rat::new(rng.gen_range(1..=3 * den) as i128, den as i128)
    };
    if n == 2 {
        edges.push(TreeEdge { u: 0, v: 1, len: len(&mut rng) });
    } else {
        let pruefer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &v in &pruefer {
            degree[v] += 1;
        }
        let mut leaves: std::collections::BTreeSet<usize> =
            (0..n).filter(|&v| degree[v] == 1).collect();
        for &v in &pruefer {
            let leaf = *leaves.iter().next().unwrap();
            leaves.remove(&leaf);
            edges.push(TreeEdge { u: leaf, v, len: len(&mut rng) });
            degree[v] -= 1;
            if degree[v] == 1 {
                leaves.insert(v);
            }
        }
        let mut rest = leaves.into_iter();
        let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
        edges.push(TreeEdge { u, v, len: len(&mut rng) });
    }
    let tree = TreeMetric::new(n, edges).expect("decoded tree is valid");
    let start = (0..k).map(|_| Point::site(rng.gen_range(0..n))).collect();
    let requests = (0..t).map(|_| Point::site(rng.gen_range(0..n))).collect();
    Instance {
        space: MetricSpace::Tree(tree),
        start,
        requests,
        provenance: Some(format!("tree(seed={seed},k={k},t={t},n={n})")),
    }
}

/// Random finite metric: shortest-path closure of a complete graph with
/// random small rational weights, so the triangle inequality always holds.
pub fn gen_finite(seed: u64, k: usize, t: usize, n: usize) -> Instance {
    let mut rng = rng(seed);
    let mut d = vec![vec![Rat::ZERO; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let den = *[1i64, 2, 4].choose(&mut rng).unwrap();
            let w = Rat::new(rng.gen_range(1..=4 * den) as i128, den as i128);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                let alt = d[i][via] + d[via][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    let metric = FiniteMetric { dist: d };
    debug_assert!(metric.validate().is_empty());
    let start = (0..k).map(|_| Point::site(rng.gen_range(0..n))).collect();
    let requests = (0..t).map(|_| Point::site(rng.gen_range(0..n))).collect();
    Instance {
        space: MetricSpace::Finite(metric),
        start,
        requests,
        provenance: Some(format!("finite(seed={seed},k={k},t={t},n={n})")),
    }
}

/// Vertex ids of the subdivided-spine tree used by `gen_dca_hard`.
pub struct DcaHardIds {
    pub k: usize,
    pub spine: Vec<usize>,     // spine[i] = vertex for spine position i+1
    pub leaf_mid: Vec<usize>,  // i''
    pub leaf_tip: Vec<usize>,  // i'
    pub left_mid: usize,       // 1 - eps
    pub left_tip: usize,       // 1 - 2 eps
    pub right_mid: usize,      // k + 2 + eps
    pub right_tip: usize,      // k + 2 + 2 eps
}

impl DcaHardIds {
    pub fn spine_at(&self, pos: usize) -> usize {
        self.spine[pos - 1]
    }

    pub fn tip_at(&self, pos: usize) -> usize {
        self.leaf_tip[pos - 1]
    }
}

pub fn dca_hard_ids(k: usize) -> DcaHardIds {
    let m = k + 2; // spine positions 1..=m
    let mut next = 0usize;
    let mut take = |n: usize| {
        let ids: Vec<usize> = (next..next + n).collect();
        next += n;
        ids
    };
    let spine = take(m);
    let leaf_mid = take(m);
    let leaf_tip = take(m);
    let ext = take(4);
    // spine edges are subdivided at i + eps and (i+1) - eps
    let _sub = take(2 * (m - 1));
    DcaHardIds {
        k,
        spine,
        leaf_mid,
        leaf_tip,
        left_mid: ext[0],
        left_tip: ext[1],
        right_mid: ext[2],
        right_tip: ext[3],
    }
}

/// Adversarial tree for double coverage: a unit spine 1..k+2 with
/// subdivision vertices at i +- eps, a two-edge leaf i -- i'' -- i' of
/// length eps each at every spine vertex, and 2 eps extensions past both
/// ends. Server 1 starts at 1 - eps on the left extension, the others on
/// spine vertices 3..k+1. The sequence is `r` sweeps — leaf tips
/// 2'..k', then the right extension tip and its midpoint — with every
/// even sweep mirrored end for end. Each sweep drags server 1 across the
/// whole spine (cost k+1+4 eps) while every other server pays only
/// 1 + 4 eps.
pub fn gen_dca_hard(k: usize, eps: Rat, r: usize) -> Instance {
    assert!(k >= 2, "need at least two servers");
    assert!(eps > Rat::ZERO && eps < Rat::new(1, 8), "eps must lie in (0, 1/8)");
    assert!(r >= 1);
    let ids = dca_hard_ids(k);
    let m = k + 2;
    let one = Rat::ONE;
    let mut edges = Vec::new();
    // subdivided spine: i --eps-- (i+eps) --(1-2eps)-- (i+1-eps) --eps-- i+1
    let sub_base = ids.right_tip + 1;
    for i in 0..m - 1 {
        let a = sub_base + 2 * i;
        let b = a + 1;
        edges.push(TreeEdge { u: ids.spine[i], v: a, len: eps });
        edges.push(TreeEdge { u: a, v: b, len: one - eps - eps });
        edges.push(TreeEdge { u: b, v: ids.spine[i + 1], len: eps });
    }
    for i in 0..m {
        edges.push(TreeEdge { u: ids.spine[i], v: ids.leaf_mid[i], len: eps });
        edges.push(TreeEdge { u: ids.leaf_mid[i], v: ids.leaf_tip[i], len: eps });
    }
    edges.push(TreeEdge { u: ids.spine[0], v: ids.left_mid, len: eps });
    edges.push(TreeEdge { u: ids.left_mid, v: ids.left_tip, len: eps });
    edges.push(TreeEdge { u: ids.spine[m - 1], v: ids.right_mid, len: eps });
    edges.push(TreeEdge { u: ids.right_mid, v: ids.right_tip, len: eps });
    let n = sub_base + 2 * (m - 1);
    let tree = TreeMetric::new(n, edges).expect("spine tree is valid");

    let mut start = vec![Point::site(ids.left_mid)];
    for i in 1..k {
        start.push(Point::site(ids.spine_at(i + 2)));
    }
    let mut requests = Vec::new();
    for sweep in 1..=r {
        if sweep % 2 == 1 {
            for pos in 2..=k {
                requests.push(Point::site(ids.tip_at(pos)));
            }
            requests.push(Point::site(ids.right_tip));
            requests.push(Point::site(ids.right_mid));
        } else {
            for pos in (3..=k + 1).rev() {
                requests.push(Point::site(ids.tip_at(pos)));
            }
            requests.push(Point::site(ids.left_tip));
            requests.push(Point::site(ids.left_mid));
        }
    }
    Instance {
        space: MetricSpace::Tree(tree),
        start,
        requests,
        provenance: Some(format!("dca-hard(k={k},eps={eps},r={r})")),
    }
}

/// Adversarial paging instance for LRU: k+1 real pages over k slots,
/// requested as (a, 1..k-1, b, 1..k-1) repeated `m` times. The middle
/// pages stay resident after their cold miss while a and b keep evicting
/// each other out of a single slot. Start is on k sentinel pages so cold
/// misses are observable faults.
pub fn gen_lru_hard(k: usize, m: usize) -> Instance {
    assert!(k >= 2 && m >= 1);
    // sites: sentinels 0..k, a = k, b = k+1, middles k+2..2k+1
    let a = k;
    let b = k + 1;
    let middles: Vec<usize> = (k + 2..2 * k + 1).collect();
    let start = (0..k).map(Point::site).collect();
    let mut requests = Vec::new();
    for _ in 0..m {
        requests.push(Point::site(a));
        requests.extend(middles.iter().map(|&p| Point::site(p)));
        requests.push(Point::site(b));
        requests.extend(middles.iter().map(|&p| Point::site(p)));
    }
    Instance {
        space: MetricSpace::Uniform { n: 2 * k + 1, scale: Rat::int(1) },
        start,
        requests,
        provenance: Some(format!("lru-hard(k={k},m={m})")),
    }
}
