//! Offline fairness transform: repeatedly swap the cost-heaviest and
//! cost-lightest server trajectories from a split index onward until every
//! server's cost is within (1 + eps)/k of the reference cost plus an
//! additive term `beta` that depends only on eps, the diameter and k.
//!
//! The split index z is chosen so that the two servers' pre-z/post-z cost
//! shares balance to within one diameter (`find_split`); the swap itself
//! costs at most two diameters (the two step-(z+1) legs are recomputed from
//! the crossed-over positions). The maximum per-server cost never increases,
//! and drops by a constant factor at least every k swaps, so at most
//! k * ceil(log k) swaps happen in total.

use crate::metric::MetricSpace;
use crate::rational::Rat;
use crate::schedule::{ledger_from_schedule, CostLedger, Schedule};
use serde::{Deserialize, Serialize};

/// Smallest integer q >= 0 with ((2+2eps)/(2+eps))^q >= k.
pub fn swap_rounds_exponent(eps: Rat, k: usize) -> u32 {
    assert!(eps > Rat::ZERO, "eps must be positive");
    let ratio = (Rat::int(2) + Rat::int(2) * eps) / (Rat::int(2) + eps);
    let target = Rat::int(k as i64);
    let mut q = 0u32;
    let mut pow = Rat::ONE;
    while pow < target {
        pow = pow * ratio;
        q += 1;
    }
    q
}

/// beta(eps, diam, k) = 2 (1+eps) diam (3/2 + q) with q from
/// `swap_rounds_exponent`.
pub fn fairness_beta(eps: Rat, diam: Rat, k: usize) -> Rat {
    let q = swap_rounds_exponent(eps, k);
    Rat::int(2) * (Rat::ONE + eps) * diam * (Rat::new(3, 2) + Rat::int(q as i64))
}

/// Smallest z in [1, n] such that the balance
/// D_z = sum_{i<=z}(a_i - b_i) - sum_{i>z}(a_i - b_i)
/// satisfies |D_z| <= c. Guaranteed to exist when all entries lie in
/// [0, c]: consecutive D values differ by 2(a_z - b_z) and D_n = -D_0.
pub fn find_split(a: &[Rat], b: &[Rat], c: Rat) -> Option<usize> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let total: Rat = (0..n).fold(Rat::ZERO, |s, i| s + a[i] - b[i]);
    let mut prefix = Rat::ZERO;
    for z in 1..=n {
        prefix += a[z - 1] - b[z - 1];
        let d = prefix + prefix - total;
        if d.abs() <= c {
            return Some(z);
        }
    }
    None
}

/// Exchange the trajectories of servers `i` and `j` for all steps after `z`
/// (1-based step index; z = 0 would swap everything). Cost changes are
/// implied: only the two step-(z+1) legs can change, by at most one
/// diameter each.
pub fn swap_suffix(schedule: &mut Schedule, i: usize, j: usize, z: usize) {
    for step in schedule.steps.iter_mut().skip(z) {
        step.config.swap(i, j);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SwapRecord {
    pub round: usize,
    pub heavy: usize,
    pub light: usize,
    pub z: usize,
    /// max per-server cost before this swap
    pub max_before: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FairTransform {
    pub schedule: Schedule,
    pub ledger: CostLedger,
    pub swaps: Vec<SwapRecord>,
    pub eps: Rat,
    pub beta: Rat,
    /// reference cost w the bound is taken against (normally OPT)
    pub reference: Rat,
    /// max per-server cost after each round (index 0 = input)
    pub max_history: Vec<Rat>,
}

impl FairTransform {
    pub fn bound(&self) -> Rat {
        let k = self.ledger.k;
        (Rat::ONE + self.eps) * self.reference / Rat::int(k as i64) + self.beta
    }
}

/// Run the swap loop until max_i c_i <= (1+eps) w / k + beta.
pub fn fair_transform(
    space: &MetricSpace,
    schedule: &Schedule,
    reference: Rat,
    eps: Rat,
) -> Result<FairTransform, String> {
    if eps <= Rat::ZERO {
        return Err("eps must be positive".into());
    }
    let k = schedule.k();
    let diam = space.diameter();
    let beta = fairness_beta(eps, diam, k);
    let bound = (Rat::ONE + eps) * reference / Rat::int(k as i64) + beta;
    let q = swap_rounds_exponent(eps, k);
    let max_swaps = k * q as usize;

    let mut schedule = schedule.clone();
    let mut ledger = ledger_from_schedule(space, &schedule)?;
    let mut swaps = Vec::new();
    let mut max_history = vec![ledger.max_server()];

    while ledger.max_server() > bound {
        if swaps.len() > max_swaps {
            return Err(format!(
                "swap loop exceeded the k*q = {max_swaps} bound; this is a bug"
            ));
        }
        let totals = ledger.totals();
        let heavy = (0..k).max_by(|&a, &b| totals[a].cmp(&totals[b]).then(b.cmp(&a))).unwrap();
        let light = (0..k).min_by(|&a, &b| totals[a].cmp(&totals[b]).then(a.cmp(&b))).unwrap();
        if heavy == light {
            return Err("all servers tie above the bound; reference cost too small".into());
        }
        let a: Vec<Rat> = ledger.costs.iter().map(|row| row[heavy]).collect();
        let b: Vec<Rat> = ledger.costs.iter().map(|row| row[light]).collect();
        let z = find_split(&a, &b, diam)
            .ok_or("no split index balances the pair; per-step costs exceed the diameter?")?;
        if z >= schedule.steps.len() {
            return Err("split index swaps nothing; the pair is already balanced".into());
        }
        swaps.push(SwapRecord { round: swaps.len() + 1, heavy, light, z, max_before: totals[heavy] });
        swap_suffix(&mut schedule, heavy, light, z);
        ledger = ledger_from_schedule(space, &schedule)?;
        let new_max = ledger.max_server();
        if new_max > *max_history.last().unwrap() {
            return Err("max per-server cost increased across a swap; this is a bug".into());
        }
        max_history.push(new_max);
    }

    // contraction: after any k further rounds inside the loop the max has
    // shrunk by at least (2+eps)/(2+2eps)
    let factor = (Rat::int(2) + eps) / (Rat::int(2) + Rat::int(2) * eps);
    for r in 0..max_history.len().saturating_sub(k) {
        if max_history[r + k] > factor * max_history[r] {
            return Err(format!(
                "contraction failed between rounds {r} and {}; this is a bug",
                r + k
            ));
        }
    }

    Ok(FairTransform { schedule, ledger, swaps, eps, beta, reference, max_history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;
    use crate::opt::opt_solve;
    use crate::schedule::{verify_schedule, Instance};

    #[test]
    fn exponent_examples() {
        // ratio 4/3 for eps = 1: (4/3)^3 = 64/27 >= 2, (4/3)^2 < 2
        assert_eq!(swap_rounds_exponent(Rat::int(1), 2), 3);
        assert_eq!(swap_rounds_exponent(Rat::int(1), 4), 5);
        assert_eq!(swap_rounds_exponent(Rat::int(1), 1), 0);
    }

    #[test]
    fn beta_examples() {
        // k = 1: q = 0, beta = 3 (1+eps) diam
        assert_eq!(fairness_beta(Rat::new(1, 2), Rat::int(1), 1), Rat::new(9, 2));
        assert_eq!(fairness_beta(Rat::int(1), Rat::int(1), 2), Rat::int(18));
        assert_eq!(fairness_beta(Rat::int(1), Rat::int(1), 4), Rat::int(26));
    }

    #[test]
    fn find_split_scan() {
        let a = vec![Rat::int(1), Rat::ZERO];
        let b = vec![Rat::ZERO, Rat::int(1)];
        // D_1 = 2 > 1, D_2 = 0
        assert_eq!(find_split(&a, &b, Rat::int(1)), Some(2));
        let a = vec![Rat::int(1), Rat::int(1), Rat::ZERO];
        let b = vec![Rat::ZERO, Rat::ZERO, Rat::ZERO];
        // D_1 = 1 - 1 = 0 <= 1
        assert_eq!(find_split(&a, &b, Rat::int(1)), Some(1));
    }

    #[test]
    fn transform_balances_a_lopsided_schedule() {
        // line: one server does all the work under OPT; the transform must
        // spread it within the additive bound
        let inst = Instance {
            space: MetricSpace::Line { length: Rat::int(10) },
            start: vec![Point::coord(Rat::ZERO), Point::coord(Rat::int(10))],
            requests: [2i64, 7, 3, 6, 1, 8, 4, 5]
                .iter()
                .map(|&x| Point::coord(Rat::int(x)))
                .collect(),
            provenance: None,
        };
        let opt = opt_solve(&inst).unwrap();
        let out = fair_transform(&inst.space, &opt.schedule, opt.cost, Rat::int(1)).unwrap();
        verify_schedule(&inst.space, &out.schedule, &inst.requests).unwrap();
        assert!(out.ledger.max_server() <= out.bound());
        // each swap adds at most two diameters
        let added = out.ledger.total() - opt.cost;
        let limit = Rat::int(2) * inst.space.diameter() * Rat::int(out.swaps.len() as i64);
        assert!(added <= limit);
    }

    #[test]
    fn transform_is_identity_when_already_fair() {
        let inst = Instance {
            space: MetricSpace::Line { length: Rat::int(10) },
            start: vec![Point::coord(Rat::int(2)), Point::coord(Rat::int(8))],
            requests: vec![Point::coord(Rat::int(3)), Point::coord(Rat::int(7))],
            provenance: None,
        };
        let opt = opt_solve(&inst).unwrap();
        let out = fair_transform(&inst.space, &opt.schedule, opt.cost, Rat::int(1)).unwrap();
        assert!(out.swaps.is_empty());
        assert_eq!(out.schedule, opt.schedule);
    }
}
