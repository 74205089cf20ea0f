//! Metric spaces: line segments, uniform spaces, weighted trees and explicit
//! finite metrics, all with exact rational distances.
//!
//! Trees support points in the interior of edges (`Point::Edge`), which the
//! double-coverage simulator needs: servers stop at arbitrary rational
//! offsets. `tree_path` / `advance_along` give the exact geometry for
//! event-driven movement.

use crate::rational::Rat;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("point {0} is not valid for this space: {1}")]
    BadPoint(String, String),
    #[error("invalid space: {0}")]
    BadSpace(String),
}

/// A location in some metric space. `Site` indexes vertices / pages,
/// `Coord` is a line coordinate, `Edge` is an interior point of tree edge
/// `edge` at `offset` from that edge's first endpoint.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Site { site: usize },
    Coord { coord: Rat },
    Edge { edge: usize, offset: Rat },
}

impl Point {
    pub fn site(i: usize) -> Point {
        Point::Site { site: i }
    }

    pub fn coord(r: Rat) -> Point {
        Point::Coord { coord: r }
    }

    pub fn site_index(&self) -> Option<usize> {
        match self {
            Point::Site { site } => Some(*site),
            _ => None,
        }
    }

    pub fn coord_value(&self) -> Option<Rat> {
        match self {
            Point::Coord { coord } => Some(*coord),
            _ => None,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Site { site } => write!(f, "v{site}"),
            Point::Coord { coord } => write!(f, "x={coord}"),
            Point::Edge { edge, offset } => write!(f, "e{edge}+{offset}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub len: Rat,
}

#[derive(Debug)]
struct TreeIndex {
    adj: Vec<Vec<(usize, usize)>>, // vertex -> (neighbor, edge id)
    parent: Vec<usize>,
    depth: Vec<usize>,
    dist_root: Vec<Rat>,
    diam: Rat,
    diam_pair: (usize, usize),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TreeMetric {
    pub n: usize,
    pub edges: Vec<TreeEdge>,
    #[serde(skip)]
    index: OnceLock<TreeIndex>,
}

impl Clone for TreeMetric {
    fn clone(&self) -> Self {
        TreeMetric { n: self.n, edges: self.edges.clone(), index: OnceLock::new() }
    }
}

impl PartialEq for TreeMetric {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl TreeMetric {
    pub fn new(n: usize, edges: Vec<TreeEdge>) -> Result<TreeMetric, MetricError> {
        let t = TreeMetric { n, edges, index: OnceLock::new() };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<(), MetricError> {
        if self.n == 0 {
            return Err(MetricError::BadSpace("tree with no vertices".into()));
        }
        if self.edges.len() != self.n - 1 {
            return Err(MetricError::BadSpace(format!(
                "tree on {} vertices needs {} edges, got {}",
                self.n,
                self.n - 1,
                self.edges.len()
            )));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.n || e.v >= self.n || e.u == e.v {
                return Err(MetricError::BadSpace(format!("edge {i} endpoints out of range")));
            }
            if e.len <= Rat::ZERO {
                return Err(MetricError::BadSpace(format!("edge {i} has non-positive length")));
            }
        }
        // connectivity (with n-1 edges this also rules out cycles)
        let idx = self.index();
        if idx.depth.iter().skip(1).any(|&d| d == usize::MAX) {
            return Err(MetricError::BadSpace("tree is not connected".into()));
        }
        Ok(())
    }

    fn index(&self) -> &TreeIndex {
        self.index.get_or_init(|| {
            let n = self.n;
            let mut adj = vec![Vec::new(); n];
            for (i, e) in self.edges.iter().enumerate() {
                adj[e.u].push((e.v, i));
                adj[e.v].push((e.u, i));
            }
            let mut parent = vec![0usize; n];
            let mut depth = vec![usize::MAX; n];
            let mut dist_root = vec![Rat::ZERO; n];
            depth[0] = 0;
            let mut stack = vec![0usize];
            while let Some(u) = stack.pop() {
                for &(v, e) in &adj[u] {
                    if depth[v] == usize::MAX {
                        depth[v] = depth[u] + 1;
                        parent[v] = u;
                        dist_root[v] = dist_root[u] + self.edges[e].len;
                        stack.push(v);
                    }
                }
            }
            let mut idx = TreeIndex {
                adj,
                parent,
                depth,
                dist_root,
                diam: Rat::ZERO,
                diam_pair: (0, 0),
            };
            for a in 0..n {
                for b in (a + 1)..n {
                    let d = vertex_dist(&idx, a, b);
                    if d > idx.diam {
                        idx.diam = d;
                        idx.diam_pair = (a, b);
                    }
                }
            }
            idx
        })
    }

    /// Collapse zero/full offsets to vertices.
    pub fn canon(&self, p: Point) -> Point {
        if let Point::Edge { edge, offset } = &p {
            let e = &self.edges[*edge];
            if offset.is_zero() {
                return Point::site(e.u);
            }
            if *offset == e.len {
                return Point::site(e.v);
            }
        }
        p
    }

    fn check_point(&self, p: &Point) -> Result<(), MetricError> {
        match p {
            Point::Site { site } if *site < self.n => Ok(()),
            Point::Edge { edge, offset } if *edge < self.edges.len() => {
                let len = self.edges[*edge].len;
                if *offset > Rat::ZERO && *offset < len {
                    Ok(())
                } else {
                    Err(MetricError::BadPoint(
                        format!("{p:?}"),
                        format!("offset outside (0, {len})"),
                    ))
                }
            }
            _ => Err(MetricError::BadPoint(format!("{p:?}"), "not a tree point".into())),
        }
    }

    /// Offset of `p` from vertex `edges[e].u`, when `p` lies on edge `e`.
    fn offset_on(&self, e: usize, p: &Point) -> Option<Rat> {
        let ed = &self.edges[e];
        match p {
            Point::Site { site } if *site == ed.u => Some(Rat::ZERO),
            Point::Site { site } if *site == ed.v => Some(ed.len),
            Point::Edge { edge, offset } if *edge == e => Some(*offset),
            _ => None,
        }
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> Rat {
        vertex_dist(self.index(), a, b)
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rat, MetricError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(match (p, q) {
            (Point::Site { site: a }, Point::Site { site: b }) => self.vertex_distance(*a, *b),
            (Point::Site { .. }, Point::Edge { .. }) => self.distance(q, p)?,
            (Point::Edge { edge, offset }, Point::Site { site }) => {
                let e = &self.edges[*edge];
                let via_u = *offset + self.vertex_distance(e.u, *site);
                let via_v = (e.len - *offset) + self.vertex_distance(e.v, *site);
                via_u.min(via_v)
            }
            (Point::Edge { edge: e1, offset: o1 }, Point::Edge { edge: e2, offset: o2 }) => {
                if e1 == e2 {
                    (*o1 - *o2).abs()
                } else {
                    let a = &self.edges[*e1];
                    let b = &self.edges[*e2];
                    let mut best: Option<Rat> = None;
                    for (oa, va) in [(*o1, a.u), (a.len - *o1, a.v)] {
                        for (ob, vb) in [(*o2, b.u), (b.len - *o2, b.v)] {
                            let d = oa + self.vertex_distance(va, vb) + ob;
                            best = Some(match best {
                                None => d,
                                Some(x) => x.min(d),
                            });
                        }
                    }
                    best.unwrap()
                }
            }
            _ => unreachable!(),
        })
    }

    /// Vertex sequence of the path between vertices `a` and `b`, inclusive.
    fn vertex_path(&self, a: usize, b: usize) -> Vec<usize> {
        let idx = self.index();
        let (mut x, mut y) = (a, b);
        let mut left = vec![x];
        let mut right = vec![y];
        while idx.depth[x] > idx.depth[y] {
            x = idx.parent[x];
            left.push(x);
        }
        while idx.depth[y] > idx.depth[x] {
            y = idx.parent[y];
            right.push(y);
        }
        while x != y {
            x = idx.parent[x];
            y = idx.parent[y];
            left.push(x);
            right.push(y);
        }
        right.pop(); // shared LCA already in `left`
        left.extend(right.into_iter().rev());
        left
    }

    /// The unique path from `p` to `q` as (point, cumulative distance from p)
    /// pairs. Consecutive entries always lie on a common edge.
    pub fn tree_path(&self, p: &Point, q: &Point) -> Result<Vec<(Point, Rat)>, MetricError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let p = self.canon(p.clone());
        let q = self.canon(q.clone());
        if p == q {
            return Ok(vec![(p, Rat::ZERO)]);
        }
        // same-edge interior shortcut
        if let (Point::Edge { edge: e1, offset: o1 }, Point::Edge { edge: e2, offset: o2 }) =
            (&p, &q)
        {
            if e1 == e2 {
                return Ok(vec![(p.clone(), Rat::ZERO), (q.clone(), (*o1 - *o2).abs())]);
            }
        }
        // anchor = vertex through which the path leaves p's edge (or p itself)
        let (p_anchor, p_lead) = match &p {
            Point::Site { site } => (*site, Rat::ZERO),
            Point::Edge { edge, offset } => {
                let e = &self.edges[*edge];
                let via_u = *offset + self.distance(&Point::site(e.u), &q)?;
                let via_v = (e.len - *offset) + self.distance(&Point::site(e.v), &q)?;
                if via_u <= via_v {
                    (e.u, *offset)
                } else {
                    (e.v, e.len - *offset)
                }
            }
            Point::Coord { .. } => unreachable!("rejected by check_point"),
        };
        let (q_anchor, q_tail) = match &q {
            Point::Site { site } => (*site, Rat::ZERO),
            Point::Edge { edge, offset } => {
                let e = &self.edges[*edge];
                let via_u = *offset + self.distance(&Point::site(e.u), &p)?;
                let via_v = (e.len - *offset) + self.distance(&Point::site(e.v), &p)?;
                if via_u <= via_v {
                    (e.u, *offset)
                } else {
                    (e.v, e.len - *offset)
                }
            }
            Point::Coord { .. } => unreachable!("rejected by check_point"),
        };
        let mut out: Vec<(Point, Rat)> = Vec::new();
        let mut cum = Rat::ZERO;
        if matches!(p, Point::Edge { .. }) {
            out.push((p.clone(), Rat::ZERO));
            cum = p_lead;
        }
        let verts = self.vertex_path(p_anchor, q_anchor);
        for (i, &v) in verts.iter().enumerate() {
            if i > 0 {
                cum += self.vertex_distance(verts[i - 1], v);
            }
            out.push((Point::site(v), cum));
        }
        if matches!(q, Point::Edge { .. }) {
            cum += q_tail;
            out.push((q.clone(), cum));
        }
        Ok(out)
    }

    /// Edge shared by two path-adjacent points.
    fn common_edge(&self, a: &Point, b: &Point) -> usize {
        match (a, b) {
            (Point::Edge { edge, .. }, _) | (_, Point::Edge { edge, .. }) => *edge,
            (Point::Site { site: u }, Point::Site { site: v }) => {
                let idx = self.index();
                idx.adj[*u]
                    .iter()
                    .find(|(nbr, _)| nbr == v)
                    .map(|&(_, e)| e)
                    .expect("path-adjacent vertices share an edge")
            }
            _ => unreachable!(),
        }
    }

    /// Point at distance `delta` from `p` along the path toward `q`.
    /// Requires `delta <= d(p, q)`.
    pub fn advance_along(&self, p: &Point, q: &Point, delta: Rat) -> Result<Point, MetricError> {
        if delta.is_zero() {
            return Ok(self.canon(p.clone()));
        }
        let path = self.tree_path(p, q)?;
        let total = path.last().unwrap().1;
        assert!(delta <= total, "advance past target: {delta} > {total}");
        for w in path.windows(2) {
            let (ref a, ca) = w[0];
            let (ref b, cb) = w[1];
            if delta == cb {
                return Ok(b.clone());
            }
            if delta > ca && delta < cb {
                let e = self.common_edge(a, b);
                let oa = self.offset_on(e, a).expect("segment start on edge");
                let ob = self.offset_on(e, b).expect("segment end on edge");
                let t = delta - ca;
                let off = if ob >= oa { oa + t } else { oa - t };
                return Ok(self.canon(Point::Edge { edge: e, offset: off }));
            }
        }
        Ok(self.canon(p.clone()))
    }

    pub fn diameter(&self) -> Rat {
        self.index().diam
    }

    pub fn diametral_pair(&self) -> (usize, usize) {
        self.index().diam_pair
    }
}

fn vertex_dist(idx: &TreeIndex, a: usize, b: usize) -> Rat {
    let (mut x, mut y) = (a, b);
    while idx.depth[x] > idx.depth[y] {
        x = idx.parent[x];
    }
    while idx.depth[y] > idx.depth[x] {
        y = idx.parent[y];
    }
    while x != y {
        x = idx.parent[x];
        y = idx.parent[y];
    }
    idx.dist_root[a] + idx.dist_root[b] - idx.dist_root[x] - idx.dist_root[x]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetric {
    pub dist: Vec<Vec<Rat>>,
}

impl FiniteMetric {
    pub fn n(&self) -> usize {
        self.dist.len()
    }

    /// Metric axioms; returns all violations (empty = valid).
    pub fn validate(&self) -> Vec<String> {
        let n = self.n();
        let mut out = Vec::new();
        for row in &self.dist {
            if row.len() != n {
                out.push(format!("matrix is not {n}x{n}"));
                return out;
            }
        }
        for i in 0..n {
            if !self.dist[i][i].is_zero() {
                out.push(format!("d({i},{i}) != 0"));
            }
            for j in 0..n {
                if self.dist[i][j].is_negative() {
                    out.push(format!("d({i},{j}) < 0"));
                }
                if self.dist[i][j] != self.dist[j][i] {
                    out.push(format!("d({i},{j}) != d({j},{i})"));
                }
                if i != j && self.dist[i][j].is_zero() {
                    out.push(format!("d({i},{j}) = 0 for distinct points"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if self.dist[i][j] > self.dist[i][l] + self.dist[l][j] {
                        out.push(format!("triangle inequality fails: d({i},{j}) > d({i},{l}) + d({l},{j})"));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpace {
    Line { length: Rat },
    Uniform { n: usize, scale: Rat },
    Tree(TreeMetric),
    Finite(FiniteMetric),
}

impl MetricSpace {
    pub fn validate(&self) -> Result<(), MetricError> {
        match self {
            MetricSpace::Line { length } => {
                if *length <= Rat::ZERO {
                    return Err(MetricError::BadSpace("line with non-positive length".into()));
                }
            }
            MetricSpace::Uniform { n, scale } => {
                if *n == 0 {
                    return Err(MetricError::BadSpace("uniform space with no sites".into()));
                }
                if *scale <= Rat::ZERO {
                    return Err(MetricError::BadSpace("uniform space with non-positive scale".into()));
                }
            }
            MetricSpace::Tree(t) => t.check()?,
            MetricSpace::Finite(f) => {
                let v = f.validate();
                if !v.is_empty() {
                    return Err(MetricError::BadSpace(v.join("; ")));
                }
            }
        }
        Ok(())
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rat, MetricError> {
        match self {
            MetricSpace::Line { length } => {
                let a = line_coord(p, *length)?;
                let b = line_coord(q, *length)?;
                Ok((a - b).abs())
            }
            MetricSpace::Uniform { n, scale } => {
                let a = site_in(p, *n)?;
                let b = site_in(q, *n)?;
                Ok(if a == b { Rat::ZERO } else { *scale })
            }
            MetricSpace::Tree(t) => t.distance(p, q),
            MetricSpace::Finite(f) => {
                let a = site_in(p, f.n())?;
                let b = site_in(q, f.n())?;
                Ok(f.dist[a][b])
            }
        }
    }

    pub fn diameter(&self) -> Rat {
        match self {
            MetricSpace::Line { length } => *length,
            MetricSpace::Uniform { n, scale } => {
                if *n >= 2 {
                    *scale
                } else {
                    Rat::ZERO
                }
            }
            MetricSpace::Tree(t) => t.diameter(),
            MetricSpace::Finite(f) => {
                let mut m = Rat::ZERO;
                for row in &f.dist {
                    for d in row {
                        m = m.max(*d);
                    }
                }
                m
            }
        }
    }

    /// Whether `x` lies on the unique/shortest path from `p` to `q`.
    /// Exact: d(p,x) + d(x,q) == d(p,q).
    pub fn on_path(&self, p: &Point, q: &Point, x: &Point) -> Result<bool, MetricError> {
        Ok(self.distance(p, x)? + self.distance(x, q)? == self.distance(p, q)?)
    }

    /// Some point at distance >= diameter/2 from `p`.
    pub fn far_point(&self, p: &Point) -> Result<Point, MetricError> {
        match self {
            MetricSpace::Line { length } => {
                let c = line_coord(p, *length)?;
                Ok(if c + c <= *length {
                    Point::coord(*length)
                } else {
                    Point::coord(Rat::ZERO)
                })
            }
            MetricSpace::Uniform { n, .. } => {
                let s = site_in(p, *n)?;
                if *n < 2 {
                    return Err(MetricError::BadSpace("uniform space too small for a far point".into()));
                }
                Ok(Point::site((s + 1) % n))
            }
            MetricSpace::Tree(t) => {
                let (a, b) = t.diametral_pair();
                let da = t.distance(p, &Point::site(a))?;
                let db = t.distance(p, &Point::site(b))?;
                Ok(Point::site(if da >= db { a } else { b }))
            }
            MetricSpace::Finite(f) => {
                let s = site_in(p, f.n())?;
                let mut best = s;
                for j in 0..f.n() {
                    if f.dist[s][j] > f.dist[s][best] {
                        best = j;
                    }
                }
                Ok(Point::site(best))
            }
        }
    }
}

fn line_coord(p: &Point, length: Rat) -> Result<Rat, MetricError> {
    match p {
        Point::Coord { coord } if *coord >= Rat::ZERO && *coord <= length => Ok(*coord),
        Point::Coord { coord } => Err(MetricError::BadPoint(
            format!("x={coord}"),
            format!("outside [0, {length}]"),
        )),
        other => Err(MetricError::BadPoint(format!("{other:?}"), "line wants a coordinate".into())),
    }
}

fn site_in(p: &Point, n: usize) -> Result<usize, MetricError> {
    match p {
        Point::Site { site } if *site < n => Ok(*site),
        other => Err(MetricError::BadPoint(format!("{other:?}"), format!("not a site < {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n as i128, d as i128)
    }

    fn path_tree() -> TreeMetric {
        // 0 -1- 1 -2- 2 -1/2- 3, plus leaf 4 off vertex 1 at 3
        TreeMetric::new(
            5,
            vec![
                TreeEdge { u: 0, v: 1, len: Rat::int(1) },
                TreeEdge { u: 1, v: 2, len: Rat::int(2) },
                TreeEdge { u: 2, v: 3, len: r(1, 2) },
                TreeEdge { u: 1, v: 4, len: Rat::int(3) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn tree_vertex_distances() {
        let t = path_tree();
        assert_eq!(t.vertex_distance(0, 3), r(7, 2));
        assert_eq!(t.vertex_distance(4, 3), r(11, 2));
        assert_eq!(t.vertex_distance(2, 2), Rat::ZERO);
        assert_eq!(t.diameter(), r(11, 2)); // vertex 4 to vertex 3
    }

    #[test]
    fn tree_edge_point_distances() {
        let t = path_tree();
        let p = Point::Edge { edge: 1, offset: r(1, 2) }; // between 1 and 2
        assert_eq!(t.distance(&p, &Point::site(0)).unwrap(), r(3, 2));
        assert_eq!(t.distance(&p, &Point::site(3)).unwrap(), Rat::int(2));
        assert_eq!(t.distance(&p, &Point::site(4)).unwrap(), r(7, 2));
        let q = Point::Edge { edge: 1, offset: r(3, 2) };
        assert_eq!(t.distance(&p, &q).unwrap(), Rat::int(1));
        let l = Point::Edge { edge: 3, offset: Rat::int(1) };
        assert_eq!(t.distance(&p, &l).unwrap(), r(3, 2));
    }

    #[test]
    fn tree_path_and_advance() {
        let t = path_tree();
        let p = Point::Edge { edge: 3, offset: Rat::int(2) }; // on leaf edge, 2 from vertex 1
        let q = Point::site(3);
        let path = t.tree_path(&p, &q).unwrap();
        let pts: Vec<Point> = path.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(
            pts,
            vec![p.clone(), Point::site(1), Point::site(2), Point::site(3)]
        );
        assert_eq!(path.last().unwrap().1, r(9, 2));
        // advance into the middle of edge (1,2)
        let m = t.advance_along(&p, &q, Rat::int(3)).unwrap();
        assert_eq!(m, Point::Edge { edge: 1, offset: Rat::int(1) });
        // advance exactly onto a vertex
        let m = t.advance_along(&p, &q, Rat::int(4)).unwrap();
        assert_eq!(m, Point::site(2));
        // full distance
        let m = t.advance_along(&p, &q, r(9, 2)).unwrap();
        assert_eq!(m, Point::site(3));
    }

    #[test]
    fn on_path_is_exact() {
        let t = path_tree();
        let space = MetricSpace::Tree(t);
        let p = Point::site(0);
        let q = Point::site(3);
        assert!(space.on_path(&p, &q, &Point::site(1)).unwrap());
        assert!(space
            .on_path(&p, &q, &Point::Edge { edge: 1, offset: r(1, 3) })
            .unwrap());
        assert!(!space.on_path(&p, &q, &Point::site(4)).unwrap());
    }

    #[test]
    fn line_and_uniform() {
        let line = MetricSpace::Line { length: Rat::int(10) };
        assert_eq!(
            line.distance(&Point::coord(r(1, 2)), &Point::coord(Rat::int(4))).unwrap(),
            r(7, 2)
        );
        assert!(line.distance(&Point::coord(Rat::int(11)), &Point::coord(Rat::ZERO)).is_err());
        assert_eq!(line.far_point(&Point::coord(Rat::int(2))).unwrap(), Point::coord(Rat::int(10)));

        let uni = MetricSpace::Uniform { n: 5, scale: r(3, 2) };
        assert_eq!(uni.distance(&Point::site(1), &Point::site(1)).unwrap(), Rat::ZERO);
        assert_eq!(uni.distance(&Point::site(1), &Point::site(4)).unwrap(), r(3, 2));
        assert_eq!(uni.diameter(), r(3, 2));
    }

    #[test]
    fn finite_validation() {
        let good = FiniteMetric {
            dist: vec![
                vec![Rat::ZERO, Rat::int(1), Rat::int(2)],
                vec![Rat::int(1), Rat::ZERO, Rat::int(2)],
                vec![Rat::int(2), Rat::int(2), Rat::ZERO],
            ],
        };
        assert!(good.validate().is_empty());
        let bad = FiniteMetric {
            dist: vec![
                vec![Rat::ZERO, Rat::int(5), Rat::int(1)],
                vec![Rat::int(5), Rat::ZERO, Rat::int(1)],
                vec![Rat::int(1), Rat::int(1), Rat::ZERO],
            ],
        };
        assert!(bad.validate().iter().any(|v| v.contains("triangle")));
    }

    #[test]
    fn far_point_is_at_least_half_diameter() {
        let t = path_tree();
        let space = MetricSpace::Tree(t);
        let diam = space.diameter();
        for p in [
            Point::site(0),
            Point::site(2),
            Point::site(4),
            Point::Edge { edge: 1, offset: Rat::int(1) },
        ] {
            let f = space.far_point(&p).unwrap();
            let two_d = space.distance(&p, &f).unwrap() + space.distance(&p, &f).unwrap();
            assert!(two_d >= diam, "far point too close for {p:?}");
        }
    }

    #[test]
    fn space_round_trip() {
        let t = path_tree();
        for space in [
            MetricSpace::Line { length: r(5, 2) },
            MetricSpace::Uniform { n: 4, scale: Rat::int(1) },
            MetricSpace::Tree(t),
            MetricSpace::Finite(FiniteMetric {
                dist: vec![vec![Rat::ZERO, Rat::int(1)], vec![Rat::int(1), Rat::ZERO]],
            }),
        ] {
            let s = serde_json::to_string(&space).unwrap();
            let back: MetricSpace = serde_json::from_str(&s).unwrap();
            assert_eq!(back, space);
            back.validate().unwrap();
        }
    }
}
