//! Closed forms for `D(n, [m])` with `n = a(m+1) + 1 + r`, and the exact
//! summation chains for `a = 6m - 1`.
//!
//! Every value here is an exact integer. The oracle comparisons run real BFS.

use serde::Serialize;

use crate::digraph::{build_circulant, CirculantSpec};
use crate::distance::{transmissions, wiener_deleted};
use crate::error::{Result, SoltesError};
use crate::soltes::{delta, DeltaValue};

/// `(m, a, r)` with `0 <= r <= m`; the order is `n = a(m+1) + 1 + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ParamTriple {
    pub m: u64,
    pub a: u64,
    pub r: u64,
}

impl ParamTriple {
    pub fn new(m: u64, a: u64, r: u64) -> Result<Self> {
        if m < 1 || a < 1 || r > m {
            return Err(SoltesError::InvalidParameters(format!(
                "need m >= 1, a >= 1, 0 <= r <= m; got m={m}, a={a}, r={r}"
            )));
        }
        Ok(ParamTriple { m, a, r })
    }

    pub fn n(&self) -> u64 {
        self.a * (self.m + 1) + 1 + self.r
    }

    /// `D(n, {1, ..., m})`.
    pub fn spec(&self) -> Result<CirculantSpec> {
        CirculantSpec::interval(self.n() as usize, self.m as usize)
    }
}

pub fn binom2(x: u64) -> u64 {
    if x < 2 {
        0
    } else {
        x * (x - 1) / 2
    }
}

pub fn binom3(x: u64) -> u64 {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

/// `ceil(x / m)` for `x >= 0`, `m >= 1`.
pub fn ceil_div(x: i64, m: i64) -> Result<i64> {
    if x < 0 || m < 1 {
        return Err(SoltesError::InvalidParameters(format!(
            "ceil_div needs x >= 0 and m >= 1, got {x} / {m}"
        )));
    }
    Ok((x + m - 1) / m)
}

/// `sigma(v) = (m+1) * C(a+1, 2) + r(a+1)`.
pub fn transmission_formula(p: ParamTriple) -> u64 {
    (p.m + 1) * binom2(p.a + 1) + p.r * (p.a + 1)
}

/// `sum_{i=1}^{a} sum_{j=1}^{a-i} (ceil((n-j-i)/m) - (j+i))`.
pub fn detour_double_sum(p: ParamTriple) -> i64 {
    let (m, a, n) = (p.m as i64, p.a as i64, p.n() as i64);
    let mut total = 0i64;
    for i in 1..=a {
        for j in 1..=(a - i) {
            // i + j <= a < n keeps the numerator positive
            total += ceil_div(n - j - i, m).expect("positive numerator") - (j + i);
        }
    }
    total
}

/// The double sum plus `C(a, 2)`: the closed form for the summed detours.
pub fn detour_sum_direct(p: ParamTriple) -> i64 {
    detour_double_sum(p) + binom2(p.a) as i64
}

/// `2 sigma - detours`: the deletion delta implied by the closed forms.
pub fn delta_from_decomposition(p: ParamTriple) -> i64 {
    2 * transmission_formula(p) as i64 - detour_sum_direct(p)
}

/// Both sides of the detour identity for `D(n, [m])` with vertex 0 deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub params: ParamTriple,
    pub n: u64,
    /// `W(D - v) - (n - 2) sigma` from BFS.
    pub oracle: i64,
    /// Double sum plus `C(a, 2)`.
    pub formula: i64,
}

impl IdentityCheck {
    pub fn difference(&self) -> i64 {
        self.oracle - self.formula
    }

    pub fn holds(&self) -> bool {
        self.oracle == self.formula
    }
}

/// `W(D - v) - (n-2) sigma(0)` against [`detour_sum_direct`]. For a
/// vertex-transitive digraph `(n-2)/n * W(D) = (n-2) sigma(0)`.
pub fn detour_identity_check(p: ParamTriple) -> Result<IdentityCheck> {
    let d = build_circulant(&p.spec()?);
    let sigma = transmissions(&d, 0, None)?
        .sigma_out
        .ok_or(SoltesError::NotStronglyConnected)?;
    let wdel = wiener_deleted(&d, 0)?;
    Ok(IdentityCheck {
        params: p,
        n: p.n(),
        oracle: wdel as i64 - (p.n() as i64 - 2) * sigma as i64,
        formula: detour_sum_direct(p),
    })
}

/// One row of the formula-versus-BFS grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridRow {
    pub m: u64,
    pub a: u64,
    pub r: u64,
    pub n: u64,
    pub formula_sigma: u64,
    pub oracle_sigma: u64,
    pub detour_direct: i64,
    pub detour_oracle: i64,
    pub delta_formula: i64,
    pub delta_oracle: i64,
}

impl GridRow {
    pub const HEADER: &'static str =
        "m,a,r,n,formula_sigma,oracle_sigma,detour_direct,detour_oracle,delta_formula,delta_oracle";

    pub fn sigma_ok(&self) -> bool {
        self.formula_sigma == self.oracle_sigma
    }

    pub fn detour_ok(&self) -> bool {
        self.detour_direct == self.detour_oracle
    }

    pub fn delta_ok(&self) -> bool {
        self.delta_formula == self.delta_oracle
    }

    pub fn all_ok(&self) -> bool {
        self.sigma_ok() && self.detour_ok() && self.delta_ok()
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.a,
            self.r,
            self.n,
            self.formula_sigma,
            self.oracle_sigma,
            self.detour_direct,
            self.detour_oracle,
            self.delta_formula,
            self.delta_oracle
        )
    }
}

/// Evaluates every closed form at `p` and the matching BFS quantities.
pub fn grid_row(p: ParamTriple) -> Result<GridRow> {
    let check = detour_identity_check(p)?;
    let d = build_circulant(&p.spec()?);
    let oracle_sigma = transmissions(&d, 0, None)?
        .sigma_out
        .ok_or(SoltesError::NotStronglyConnected)?;
    let delta_oracle = match delta(&d, 0)? {
        DeltaValue::Finite(x) => x,
        DeltaValue::Disconnected => return Err(SoltesError::NotStronglyConnected),
    };
    Ok(GridRow {
        m: p.m,
        a: p.a,
        r: p.r,
        n: p.n(),
        formula_sigma: transmission_formula(p),
        oracle_sigma,
        detour_direct: check.formula,
        detour_oracle: check.oracle,
        delta_formula: delta_from_decomposition(p),
        delta_oracle,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AppendixVariant {
    /// `a = 6m - 1`, `r = m`, so `n = (a+1)(m+1)`.
    REqM,
    /// `a = 6m - 1`, `r = 0`, so `n = a(m+1) + 1`.
    REq0,
}

impl AppendixVariant {
    pub fn params(self, m: u64) -> Result<ParamTriple> {
        let r = match self {
            AppendixVariant::REqM => m,
            AppendixVariant::REq0 => 0,
        };
        ParamTriple::new(m, 6 * m - 1, r)
    }

    /// Limit of `(sum - 36 m^3) / m^2`.
    pub fn limit_ratio(self) -> f64 {
        match self {
            AppendixVariant::REqM => 27.5,
            AppendixVariant::REq0 => 9.5,
        }
    }
}

/// The double sum at `a = 6m - 1` by every available route.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppendixSum {
    pub m: u64,
    pub variant: AppendixVariant,
    pub direct: i64,
    /// `(name, value)` for each rewritten single-index form.
    pub chains: Vec<(&'static str, i64)>,
}

impl AppendixSum {
    pub fn consistent(&self) -> bool {
        self.chains.iter().all(|&(_, v)| v == self.direct)
    }

    pub fn leading_ratio(&self) -> f64 {
        let m = self.m as f64;
        (self.direct as f64 - 36.0 * m * m * m) / (m * m)
    }
}

/// Evaluates the double sum directly and through the rewritten chains.
/// Fails if any chain disagrees with the direct sum.
pub fn appendix_b_sum(m: u64, variant: AppendixVariant) -> Result<AppendixSum> {
    if m < 2 {
        return Err(SoltesError::InvalidParameters(format!(
            "need m >= 2, got {m}"
        )));
    }
    let p = variant.params(m)?;
    let direct = detour_double_sum(p);
    let (mi, a) = (m as i64, p.a as i64);
    let cd = |x: i64| ceil_div(x, mi).expect("nonnegative numerator");
    let chains = match variant {
        AppendixVariant::REqM => {
            // s = i + j - 1 gathers the s pairs on each anti-diagonal
            let substituted: i64 = (1..a).map(|s| s * cd((mi + 1) * (a - s))).sum();
            let split: i64 = (1..a).map(|s| s * (a - s) + s * cd(a - s)).sum();
            let closed =
                binom3(6 * m) as i64 + (1..=6).map(|k| binom2(k * m - 1) as i64).sum::<i64>();
            vec![
                ("substituted", substituted),
                ("split", split),
                ("closed", closed),
            ]
        }
        AppendixVariant::REq0 => {
            // s = i + j; s - 1 pairs per anti-diagonal
            let substituted: i64 = (2..=a).map(|s| (s - 1) * cd((mi + 1) * (a - s) + 1)).sum();
            let split: i64 = (2..=a)
                .map(|s| (s - 1) * (a - s) + (s - 1) * cd(a - s + 1))
                .sum();
            let reduced = binom3(p.a) as i64 + (1..a).map(|s| s * cd(a - s)).sum::<i64>();
            vec![
                ("substituted", substituted),
                ("split", split),
                ("reduced", reduced),
            ]
        }
    };
    let sum = AppendixSum {
        m,
        variant,
        direct,
        chains,
    };
    if !sum.consistent() {
        return Err(SoltesError::InvalidParameters(format!(
            "summation chains disagree with the direct sum: {sum:?}"
        )));
    }
    Ok(sum)
}
