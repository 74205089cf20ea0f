//! Fairness audit: exact per-ledger metrics describing how evenly the cost
//! is spread across servers, and how far a run is from an
//! (alpha, beta)-bound of the form c_i <= alpha * w / k + beta.

use crate::rational::Rat;
use crate::schedule::CostLedger;
use serde::{Deserialize, Serialize};

/// max / min ratios can be infinite when some server never moved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ratio {
    Finite(Rat),
    Infinite(String),
}

impl Ratio {
    pub fn infinite() -> Ratio {
        Ratio::Infinite("inf".into())
    }

    pub fn finite(&self) -> Option<Rat> {
        match self {
            Ratio::Finite(r) => Some(*r),
            Ratio::Infinite(_) => None,
        }
    }
}

/// Smallest beta making the ledger (alpha, beta)-fair against reference
/// cost `w`: max(0, max_i c_i - alpha * w / k). `alpha` must be >= 1.
pub fn alpha_beta_residual(ledger: &CostLedger, w: Rat, alpha: Rat) -> Result<Rat, String> {
    if alpha < Rat::ONE {
        return Err(format!("alpha must be at least 1, got {alpha}"));
    }
    let allowance = alpha * w / Rat::int(ledger.k as i64);
    Ok((ledger.max_server() - allowance).max(Rat::ZERO))
}

/// max_i c_i - min_i c_i.
pub fn additive_gap(ledger: &CostLedger) -> Rat {
    ledger.max_server() - ledger.min_server()
}

/// max_i c_i / min_i c_i; 1 when nobody moved, infinite when only some did.
pub fn multiplicative_ratio(ledger: &CostLedger) -> Ratio {
    let max = ledger.max_server();
    let min = ledger.min_server();
    if max.is_zero() {
        Ratio::Finite(Rat::ONE)
    } else if min.is_zero() {
        Ratio::infinite()
    } else {
        Ratio::Finite(max / min)
    }
}

/// max_i c_i / w (how acceptable the run is against reference cost w).
pub fn acceptable_ratio(ledger: &CostLedger, w: Rat) -> Ratio {
    let max = ledger.max_server();
    if w.is_zero() {
        if max.is_zero() {
            Ratio::Finite(Rat::ONE)
        } else {
            Ratio::infinite()
        }
    } else {
        Ratio::Finite(max / w)
    }
}

/// The egalitarian objective: the worst single server's cost.
pub fn egalitarian(ledger: &CostLedger) -> Rat {
    ledger.max_server()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FairnessReport {
    pub k: usize,
    pub totals: Vec<Rat>,
    pub total: Rat,
    pub egalitarian: Rat,
    pub min_server: Rat,
    pub additive_gap: Rat,
    pub multiplicative_ratio: Ratio,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptable_ratio: Option<Ratio>,
    /// decimal rendering of the headline numbers, for reports only
    pub decimals: Vec<(String, String)>,
}

pub fn audit(
    ledger: &CostLedger,
    baseline: Option<Rat>,
    alpha: Option<Rat>,
) -> Result<FairnessReport, String> {
    let totals = ledger.totals();
    let total = ledger.total();
    let max = ledger.max_server();
    let min = ledger.min_server();
    let residual = match (baseline, alpha) {
        (Some(w), Some(a)) => Some(alpha_beta_residual(ledger, w, a)?),
        _ => None,
    };
    let acc = baseline.map(|w| acceptable_ratio(ledger, w));
    let mut decimals = vec![
        ("total".to_string(), total.decimal(6)),
        ("egalitarian".to_string(), max.decimal(6)),
        ("additive_gap".to_string(), (max - min).decimal(6)),
    ];
    if let Some(r) = residual {
        decimals.push(("residual".to_string(), r.decimal(6)));
    }
    Ok(FairnessReport {
        k: ledger.k,
        totals,
        total,
        egalitarian: max,
        min_server: min,
        additive_gap: max - min,
        multiplicative_ratio: multiplicative_ratio(ledger),
        baseline,
        alpha,
        residual,
        acceptable_ratio: acc,
        decimals,
    })
}
