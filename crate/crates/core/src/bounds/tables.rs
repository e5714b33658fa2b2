//! Order tables: the tail-sum expressions entering the bounds against the
//! closed asymptotic forms of the corollaries.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use super::report::Verdict;
use crate::approx::cos_beta;
use crate::error::{Error, Result};
use crate::psi::{
    classify, conjugate_exponent, tail_sum, Decay, Membership, PsiFamily, PsiFunction, SearchGrid,
    WeightedPsi,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corollary {
    /// `g_p ∈ 𝔐_C`: `T_n^{1/p'} ≍ ψ(n) n^{1/p}`.
    C1a,
    /// `g_p ∈ 𝔐₀` with `α → ∞`: `ψ(n) n^{1/p} = o(T_n^{1/p'})`.
    C1b,
    /// Log-power family: `T_n^{1/p'} ≍ ψ(n) n^{1/p} ln^{1/p'} n`.
    C2,
    /// Log-log family: `T_n^{1/p'} ≍ ψ(n) n^{1/p} (ln n · ln ln n)^{1/p'}`.
    C3,
    /// Power family in `L^ψ_{β,1}`, uniform metric: `≍ n^{1-r}`.
    C4,
    /// `t^{-1} ln^{-γ}(t+K)`: `Σ_{k>=n} ψ(k) ≍ ψ(n) n ln n`.
    C5,
    /// `t^{-1} ln^{-1}(t+K₁)(ln ln(t+K₂))^{-δ}`: `≍ ψ(n) n ln n ln ln n`.
    C6,
    /// Dichotomy between `Σ_{k>=n} ψ(k)` and `ψ(n) n`.
    T5,
}

impl fmt::Display for Corollary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Corollary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C1A" | "C1" => Ok(Corollary::C1a),
            "C1B" => Ok(Corollary::C1b),
            "C2" => Ok(Corollary::C2),
            "C3" => Ok(Corollary::C3),
            "C4" => Ok(Corollary::C4),
            "C5" => Ok(Corollary::C5),
            "C6" => Ok(Corollary::C6),
            "T5" => Ok(Corollary::T5),
            _ => Err(Error::Parse(format!("unknown corollary '{s}'"))),
        }
    }
}

/// Whether the two sides are expected to stay within a band or to separate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderMode {
    Bounded,
    /// `lhs/rhs` increases without bound.
    Separating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub corollary: Corollary,
    pub psi: PsiFunction,
    pub p: Option<f64>,
    pub beta: f64,
    pub mode: OrderMode,
    pub rows: Vec<OrderRow>,
    /// `max ratio / min ratio`.
    pub band: f64,
    pub ratio_band: f64,
    /// Last ratio over first ratio.
    pub growth: f64,
    /// `rhs/lhs` strictly decreasing along the table.
    pub small_o_decreasing: bool,
    pub verdict: Verdict,
}

impl OrderTable {
    /// `n,lhs,rhs,ratio` with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lhs,rhs,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.11e},{:.11e},{:.11e}",
                r.n, r.lhs, r.rhs, r.ratio
            );
        }
        out
    }
}

/// Options of [`order_table`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    /// Class exponent for C1a/C1b with a power family; otherwise taken from ψ.
    pub p: Option<f64>,
    pub beta: f64,
    pub ratio_band: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            p: None,
            beta: 0.0,
            ratio_band: 4.0,
        }
    }
}

fn constraint(msg: String) -> Error {
    Error::Hypothesis(msg)
}

/// Class exponent `p` of a corollary in the `L^ψ_{β,p}`, `1 < p < ∞` setting.
fn class_exponent(psi: &PsiFunction, cfg: &TableConfig) -> Result<f64> {
    let from_family = match psi.family() {
        PsiFamily::LogPower { p, .. } | PsiFamily::LogLogPower { p, .. } => Some(p),
        PsiFamily::Power { .. } => None,
    };
    let p = cfg
        .p
        .or(from_family)
        .ok_or_else(|| constraint("a class exponent p is required for a power family".into()))?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(constraint(format!(
            "class exponent p = {p} must lie in (1, ∞)"
        )));
    }
    Ok(p)
}

fn membership_of(g: &WeightedPsi) -> Membership {
    classify(g, &SearchGrid::default()).verdict
}

fn check_family(corollary: Corollary, psi: &PsiFunction, p: Option<f64>) -> Result<()> {
    let fam = psi.family();
    let ok = match (corollary, fam) {
        (Corollary::C2, PsiFamily::LogPower { p: q, .. }) => Some(q) == p && q > 1.0,
        (Corollary::C3, PsiFamily::LogLogPower { p: q, gamma, .. }) => {
            q > 1.0 && Some(q) == p && (gamma - 1.0 / conjugate_exponent(q)).abs() < 1e-12
        }
        (Corollary::C4, PsiFamily::Power { r }) => r > 1.0,
        (Corollary::C5, PsiFamily::LogPower { p, .. }) => p == 1.0,
        (Corollary::C6, PsiFamily::LogLogPower { p, gamma, .. }) => p == 1.0 && gamma == 1.0,
        (Corollary::C2 | Corollary::C3 | Corollary::C4 | Corollary::C5 | Corollary::C6, _) => false,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(constraint(format!(
            "{corollary} does not apply to ψ = {psi}"
        )))
    }
}

/// Tabulates both sides of the order relation over `n_list`.
pub fn order_table(
    corollary: Corollary,
    psi: &PsiFunction,
    n_list: &[u64],
    cfg: &TableConfig,
) -> Result<OrderTable> {
    if n_list.is_empty() {
        return Err(Error::Domain("order table needs at least one n".into()));
    }
    let uses_p = matches!(
        corollary,
        Corollary::C1a | Corollary::C1b | Corollary::C2 | Corollary::C3
    );
    let p = if uses_p {
        Some(class_exponent(psi, cfg)?)
    } else {
        None
    };
    check_family(corollary, psi, p)?;
    let min_n = match corollary {
        Corollary::C2 | Corollary::C5 => 2,
        Corollary::C3 | Corollary::C6 => 3,
        _ => 1,
    };
    if let Some(&bad) = n_list.iter().find(|&&n| n < min_n) {
        return Err(Error::Domain(format!(
            "{corollary} needs n >= {min_n}, got {bad}"
        )));
    }
    let cos_zero = cos_beta(cfg.beta) == 0.0;

    let mode = match corollary {
        Corollary::C1a | Corollary::C1b => {
            let p = p.expect("set above");
            let g = WeightedPsi::new(*psi, p)?;
            match membership_of(&g) {
                Membership::MC if corollary == Corollary::C1a => OrderMode::Bounded,
                Membership::M0 if corollary == Corollary::C1b => OrderMode::Separating,
                m => {
                    return Err(constraint(format!(
                        "{corollary} needs g_p in {} but it is {m:?}",
                        if corollary == Corollary::C1a {
                            "𝔐_C"
                        } else {
                            "𝔐₀ \\ 𝔐_C"
                        }
                    )))
                }
            }
        }
        Corollary::T5 => match membership_of(&WeightedPsi::new(*psi, 1.0)?) {
            Membership::MC => OrderMode::Bounded,
            Membership::M0 => OrderMode::Separating,
            Membership::Neither => return Err(constraint("T5 needs ψ(t)t ∈ 𝔐₀".into())),
        },
        _ => OrderMode::Bounded,
    };

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let ln = nf.ln();
        let psi_n = psi.value(nf);
        let (lhs, rhs) = match corollary {
            Corollary::C1a | Corollary::C1b | Corollary::C2 | Corollary::C3 => {
                let p = p.expect("set above");
                let pc = conjugate_exponent(p);
                let lhs = tail_sum(psi, pc, n)?.value.powf(1.0 / pc);
                let base = psi_n * nf.powf(1.0 / p);
                let rhs = match corollary {
                    Corollary::C2 => base * ln.powf(1.0 / pc),
                    Corollary::C3 => base * (ln * ln.ln()).powf(1.0 / pc),
                    _ => base,
                };
                (lhs, rhs)
            }
            Corollary::C4 => {
                let r = match psi.family() {
                    PsiFamily::Power { r } => r,
                    _ => unreachable!("checked"),
                };
                let lhs = if cos_zero {
                    psi_n * nf
                } else {
                    tail_sum(psi, 1.0, n)?.value
                };
                (lhs, psi.scale() * nf.powf(1.0 - r))
            }
            Corollary::C5 | Corollary::C6 => {
                let core = psi_n * nf;
                if cos_zero {
                    (core, core)
                } else {
                    let extra = if corollary == Corollary::C6 {
                        ln.ln()
                    } else {
                        1.0
                    };
                    (tail_sum(psi, 1.0, n)?.value, core * ln * extra)
                }
            }
            Corollary::T5 => (tail_sum(psi, 1.0, n)?.value, psi_n * nf),
        };
        rows.push(OrderRow {
            n,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
    }

    let max = rows
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let band = max / min;
    let growth = rows.last().map(|r| r.ratio).unwrap_or(1.0) / rows[0].ratio;
    let small_o_decreasing = rows
        .windows(2)
        .all(|w| w[1].rhs / w[1].lhs < w[0].rhs / w[0].lhs);
    let verdict = if rows.len() < 2 {
        Verdict::Inconclusive
    } else {
        let ok = match mode {
            OrderMode::Bounded => band <= cfg.ratio_band,
            OrderMode::Separating => small_o_decreasing,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    };
    Ok(OrderTable {
        corollary,
        psi: *psi,
        p,
        beta: cfg.beta,
        mode,
        rows,
        band,
        ratio_band: cfg.ratio_band,
        growth,
        small_o_decreasing,
        verdict,
    })
}

/// `lo..hi` as powers of two, or a comma-separated list.
pub fn parse_n_list(spec: &str) -> Result<Vec<u64>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("'{s}' is not a positive integer: {e}")))
    };
    if let Some((a, b)) = spec.split_once("..") {
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo == 0 || lo > hi {
            return Err(Error::Parse(format!("empty range '{spec}'")));
        }
        let mut v = Vec::new();
        let mut n = lo;
        while n <= hi {
            v.push(n);
            n = n
                .checked_mul(2)
                .ok_or_else(|| Error::Parse("range overflow".into()))?;
        }
        Ok(v)
    } else {
        spec.split(',').map(parse).collect()
    }
}
