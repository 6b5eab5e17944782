//! Self-verification suites wired to the `verify` CLI subcommand. Each suite
//! re-runs a family of invariants at fixed, documented parameters and
//! reports named pass/fail results; the test suite covers the same ground
//! (and more) at build time, this is the runtime entry point.

use num::bigint::BigInt;
use num::traits::{One, Zero};

use crate::compensation::{
    check_boundary_identities, ladder_depth_for, special_values, AlphaBetaLadder, XSolution,
};
use crate::numeric::{
    alpha0_prime, c00_from, certified_sign, df_dt, eval_ladder, find_rho, h_eval, h_prime,
    xhat00_num, z_limit, AsymptoticReport,
};
use crate::series::{ratio, TruncSeries};
use crate::variants::{build_bigstep, check_recursions, cubic_residual, solve_rational};
use crate::walk::{check_functional_equation, dp_counts, StepRule, WalkKind};

/// Outcome of one named invariant.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Series,
    Ladder,
    Oracle,
    Identities,
    Variants,
    Numeric,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "series" => Self::Series,
            "ladder" => Self::Ladder,
            "oracle" => Self::Oracle,
            "identities" => Self::Identities,
            "variants" => Self::Variants,
            "numeric" => Self::Numeric,
            "all" => Self::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Series => "series",
            Self::Ladder => "ladder",
            Self::Oracle => "oracle",
            Self::Identities => "identities",
            Self::Variants => "variants",
            Self::Numeric => "numeric",
            Self::All => "all",
        }
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Series => series_checks(),
        Suite::Ladder => ladder_checks(),
        Suite::Oracle => oracle_checks(),
        Suite::Identities => identities_checks(),
        Suite::Variants => variant_checks(),
        Suite::Numeric => numeric_checks(),
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Series, Suite::Ladder, Suite::Oracle, Suite::Identities, Suite::Variants, Suite::Numeric] {
                all.extend(run_suite(s));
            }
            all
        }
    }
}

/// Deterministic sample series for the ring checks: coefficients from a
/// small linear congruential stream.
fn sample_series(seed: u64, order: usize) -> TruncSeries {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 41) as i64 - 20
    };
    TruncSeries::from_coeffs((0..=order).map(|_| ratio(next(), 1 + (next().unsigned_abs() % 9) as i64)).collect())
}

fn series_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut ring_ok = true;
    let mut div_ok = true;
    let mut sqrt_ok = true;
    let mut compose_ok = true;
    let mut canon_ok = true;
    for seed in 0..32u64 {
        let a = sample_series(seed, 8);
        let b = sample_series(seed + 1000, 8);
        let c = sample_series(seed + 2000, 8);
        ring_ok &= a.add(&b) == b.add(&a)
            && a.mul(&b) == b.mul(&a)
            && a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c));
        if !b.coeff(0).is_zero() {
            div_ok &= a.mul(&b).div(&b).map(|q| q == a).unwrap_or(false);
        }
        let s = TruncSeries::one(9).add(&a.mul_z_pow(1));
        sqrt_ok &= s.sqrt().map(|r| r.mul(&r) == s).unwrap_or(false);
        compose_ok &= a.compose(&TruncSeries::z(8)).map(|r| r == a).unwrap_or(false);
        for x in a.mul(&b).add(&c).coeffs() {
            canon_ok &= x.denom() > &BigInt::zero()
                && num::integer::gcd(x.numer().clone(), x.denom().clone()) <= BigInt::one();
        }
    }
    out.push(Check::from("series.ring_laws", ring_ok, "commutativity and distributivity"));
    out.push(Check::from("series.div_inverts_mul", div_ok, ""));
    out.push(Check::from("series.sqrt_squares_back", sqrt_ok, ""));
    out.push(Check::from("series.compose_identity", compose_ok, ""));
    out.push(Check::from("series.canonical_coefficients", canon_ok, ""));
    out
}

fn ladder_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let order = 30;
    let ladder = AlphaBetaLadder::build(12, order);

    let mut val_ok = true;
    for k in 0..=12usize {
        val_ok &= ladder.alpha(k).valuation() == Some(2 * k + 1)
            && ladder.beta(k).valuation() == Some(2 * k + 2);
        if 2 * k + 1 <= order {
            val_ok &= ladder.alpha(k).coeff(2 * k + 1).is_one();
        }
        if 2 * k + 2 <= order {
            val_ok &= ladder.beta(k).coeff(2 * k + 2).is_one();
        }
    }
    out.push(Check::from("ladder.valuation_law", val_ok, "valuations 2k+1 / 2k+2, unit leads, k <= 12"));

    let resid = |a: &TruncSeries, b: &TruncSeries| {
        let a2 = a.mul(a);
        let b2 = b.mul(b);
        a2.add(&b2).add(&a2.mul(&b2)).mul_z_pow(1).sub(&a.mul(b))
    };
    let mut kernel_ok = true;
    for k in 0..12 {
        kernel_ok &= resid(ladder.alpha(k), ladder.beta(k)).is_zero()
            && resid(ladder.alpha(k + 1), ladder.beta(k)).is_zero();
    }
    out.push(Check::from("ladder.kernel_identity", kernel_ok, "both pairings, all consecutive rungs"));

    let one = TruncSeries::one(order);
    let am = |k: usize| one.sub(ladder.alpha(k));
    let bm = |k: usize| one.sub(ladder.beta(k));
    let mut rec_ok = true;
    let mut c = am(0).mul(&bm(0));
    for k in 0..8 {
        let d_next = am(k + 1).div(&am(k)).unwrap().mul(&c).neg();
        let c_next = bm(k + 1).div(&bm(k)).unwrap().mul(&d_next).neg();
        rec_ok &= d_next == am(k + 1).mul(&bm(k)).neg() && c_next == am(k + 1).mul(&bm(k + 1));
        c = c_next;
    }
    out.push(Check::from("ladder.coefficient_recurrence", rec_ok, "matches closed forms"));

    let mut pole_ok = true;
    for k in 0..=4usize {
        let ak = ladder.alpha(k);
        let numer = one.sub(ak);
        let mut cterm = numer.clone();
        for n in 0..6usize {
            pole_ok &= cterm == numer.mul(&ak.pow(n));
            cterm = ak.mul(&cterm);
        }
    }
    out.push(Check::from("ladder.pole_witness", pole_ok, "geometric x-expansion at 1/alpha_k"));
    out
}

fn oracle_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let p = 30;
    let table = dp_counts(&StepRule::builtin(WalkKind::Main), p);
    let pairs: Vec<(usize, usize)> = (0..=6).flat_map(|i| (0..=6).map(move |j| (i, j))).collect();
    let sol = XSolution::compute(p, &pairs);
    let mut cross_ok = true;
    for &(i, j) in &pairs {
        let q = sol.q(i, j).expect("requested");
        for k in 0..=p {
            cross_ok &= q.coeff(k).denom().is_one()
                && q.coeff(k).numer() == &BigInt::from(table.count(i, j, k).clone());
        }
    }
    out.push(Check::from("oracle.cross_equality", cross_ok, "series = DP for i,j <= 6, k <= 30"));

    out.push(Check::from(
        "oracle.functional_equation",
        check_functional_equation(&table, 10, 10, 10) == Ok(true),
        "kernel equation coefficients, i,j,k <= 10",
    ));

    let (q00, q10, q11) = special_values(25);
    let t25 = dp_counts(&StepRule::builtin(WalkKind::Main), 25);
    let mut sv_ok = true;
    for k in 0..=25 {
        let (total, axis) = t25.marginals(k).unwrap();
        sv_ok &= q11.coeff(k).numer() == &BigInt::from(total)
            && q10.coeff(k).numer() == &BigInt::from(axis)
            && q00.coeff(k).numer() == &BigInt::from(t25.count(0, 0, k).clone());
    }
    out.push(Check::from("oracle.special_values", sv_ok, "totals and axis sums via c and c(1-alpha_0)"));
    out
}

fn identities_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for p in [30usize, 60] {
        let ok = check_boundary_identities(p) == Ok(true);
        let name = if p == 30 { "identities.boundary_order_30" } else { "identities.boundary_order_60" };
        out.push(Check::from(name, ok, "both z-cleared boundary identities"));
    }

    let mut stable = true;
    for p in [10usize, 20] {
        for i in 0..3 {
            for j in 0..3 {
                let n = crate::compensation::truncation_bound(i, j, p).max(1);
                let ladder = AlphaBetaLadder::build_for_order(n + 4, p);
                stable &= ladder.xhat_with_terms(i, j, p, n).unwrap()
                    == ladder.xhat_with_terms(i, j, p, n + 3).unwrap();
            }
        }
    }
    out.push(Check::from("identities.depth_stability", stable, "N vs N+3 rungs agree to order p"));
    out
}

fn variant_checks() -> Vec<Check> {
    let mut out = Vec::new();

    let table = dp_counts(&StepRule::builtin(WalkKind::RationalGf), 25);
    let sol = solve_rational(25);
    let mut ok = true;
    for i in 0..=5usize {
        for j in 0..=5usize {
            let q = sol.q(i, j);
            for k in 0..=25 {
                ok &= q.coeff(k).denom().is_one()
                    && q.coeff(k).numer() == &BigInt::from(table.count(i, j, k).clone());
            }
        }
    }
    out.push(Check::from("variants.rational_vs_dp", ok, "i,j <= 5, k <= 25"));

    let q00 = sol.q(0, 0);
    let mut rank1 = true;
    for i in 0..=5usize {
        for j in 0..=5usize {
            rank1 &= sol.q(i, j).mul(&q00) == sol.q(i, 0).mul(&sol.q(0, j));
        }
    }
    out.push(Check::from("variants.rational_rank_one", rank1, "q_{i,j} q_{0,0} = q_{i,0} q_{0,j}"));

    let table = dp_counts(&StepRule::builtin(WalkKind::BigStep), 20);
    let ladder = build_bigstep(20, 21);
    let mut ok = true;
    for i in 0..=5usize {
        for j in 0..=5usize {
            let q = ladder.q(i, j, 20).unwrap();
            for k in 0..=20 {
                ok &= q.coeff(k).denom().is_one()
                    && q.coeff(k).numer() == &BigInt::from(table.count(i, j, k).clone());
            }
        }
    }
    out.push(Check::from("variants.bigstep_vs_dp", ok, "i,j <= 5, k <= 20"));

    let mut val_ok = true;
    for k in 0..=7usize {
        val_ok &= ladder.c(k).valuation() == Some(k);
    }
    out.push(Check::from("variants.bigstep_c_valuations", val_ok, "valuation(c_k) = k"));

    let deep = build_bigstep(9, 19);
    let mut grow_ok = true;
    let mut last = 0usize;
    for k in [2usize, 4, 6, 8] {
        match cubic_residual(&deep.alpha(k).truncate(19)).valuation() {
            Some(v) if v > last => last = v,
            _ => grow_ok = false,
        }
    }
    out.push(Check::from("variants.bigstep_cubic_residual", grow_ok, "residual valuation grows with k"));

    out.push(Check::from(
        "variants.recursions",
        check_recursions(WalkKind::RationalGf, 4, 20) && check_recursions(WalkKind::BigStep, 4, 20),
        "region recursions as exact series identities, i,j <= 4, order 20",
    ));
    out
}

fn numeric_checks() -> Vec<Check> {
    let mut out = Vec::new();

    let mut mono_ok = true;
    let mut bound_ok = true;
    for s in 1..=50 {
        let z = s as f64 * z_limit() / 51.0;
        let ladder = eval_ladder(z, 26, false).unwrap();
        for k in 0..25 {
            mono_ok &= ladder.gamma(k) > ladder.gamma(k + 1) && ladder.gamma(k + 1) > 0.0;
        }
        for k in 0..=12i32 {
            bound_ok &= ladder.gamma(2 * k as usize) <= 2f64.powf(-0.5 * (2 * k + 1) as f64) + 1e-12;
        }
        bound_ok &= ladder.gamma(0) <= 0.5f64.sqrt() + 1e-12;
    }
    out.push(Check::from("numeric.interlacing", mono_ok, "strict decrease through depth 25, 50 samples"));
    out.push(Check::from("numeric.ladder_bounds", bound_ok, "alpha_k <= 2^-(2k+1)/2"));

    let mut sign_ok = true;
    for s in 0..20 {
        let z = 1.0 / 3.0 + (z_limit() - 1.0 / 3.0 - 2e-6) * s as f64 / 19.0 + 1e-6;
        if (z - 0.3449997573).abs() < 1e-4 {
            continue;
        }
        if let Ok(sign) = certified_sign(z, 60) {
            let mut p = 8;
            while h_eval(z, p).map(|(v, e)| v.abs() <= e).unwrap() {
                p += 4;
            }
            let (v, e) = h_eval(z, p + 10).unwrap();
            sign_ok &= v.abs() > e && sign == if v > 0.0 { 1 } else { -1 };
        } else {
            sign_ok = false;
        }
    }
    out.push(Check::from("numeric.certified_sign_soundness", sign_ok, "same sign at tail depth p and p+10"));

    let mut fd_ok = true;
    for z in [0.26, 0.30, 0.34] {
        let (hp, _) = h_prime(z, 60).unwrap();
        let step = 1e-6;
        let fd = (h_eval(z + step, 60).unwrap().0 - h_eval(z - step, 60).unwrap().0) / (2.0 * step);
        fd_ok &= (hp - fd).abs() / fd.abs() <= 1e-6;
    }
    out.push(Check::from("numeric.h_prime_finite_difference", fd_ok, "relative error <= 1e-6 at z = 0.26, 0.30, 0.34"));

    let z = 0.3;
    let ladder = eval_ladder(z, 22, true).unwrap();
    let mut tails = true;
    for k in 0..=20usize {
        tails &= ladder.gamma_prime(k + 1).abs() <= 100.0 * 2f64.powf(-0.5 * (k + 1) as f64);
        tails &= df_dt(ladder.gamma(k), z).abs() <= 4.0 * 2f64.sqrt() / 9.0 + 1e-15;
    }
    for s in 0..=100 {
        let z = 0.25 + 0.1 * s as f64 / 100.0;
        tails &= alpha0_prime(z).abs() <= 13.0;
    }
    out.push(Check::from("numeric.derivative_tail_bounds", tails, "gamma' and df_dt caps, k <= 20"));

    // exact series at order 40, Horner at z = 0.3, against the alternating
    // sum; the allowance is the numeric tail plus the series truncation
    // bound M (z sqrt8)^41 / (1 - z sqrt8) with M = 6 from the ladder bounds
    let p = 40;
    let depth = ladder_depth_for(&[(0, 0)], p);
    let exact = AlphaBetaLadder::build_for_order(depth, p).xhat(0, 0, p).unwrap();
    let horner = exact.eval_f64(0.3);
    let (numeric_value, numeric_err) = xhat00_num(0.3, p).unwrap();
    let q = 0.3 * 8f64.sqrt();
    let series_tail = 6.0 * q.powi(41) / (1.0 - q);
    let consistent = (horner - numeric_value).abs() <= 1e-10 + numeric_err + series_tail;
    out.push(Check::from(
        "numeric.exact_vs_numeric_xhat00",
        consistent,
        format!("|{horner} - {numeric_value}| within bounds"),
    ));

    match find_rho(1e-10) {
        Ok(b) => {
            out.push(Check::from(
                "numeric.rho_bracket",
                b.width() <= 1e-10 && b.hi >= 0.34499975 && b.lo <= 0.34499976,
                format!("[{}, {}]", b.lo, b.hi),
            ));
            match c00_from(&b, 60) {
                Ok((c00, _)) => out.push(Check::from(
                    "numeric.growth_constant",
                    (c00 - 0.0531).abs() <= 5e-4,
                    format!("C00 = {c00}"),
                )),
                Err(e) => out.push(Check::from("numeric.growth_constant", false, e.to_string())),
            }
        }
        Err(e) => out.push(Check::from("numeric.rho_bracket", false, e.to_string())),
    }

    // ratio column rises monotonically toward 1
    let report = match AsymptoticReport::compute(1e-10, 10, 100, 10) {
        Ok(r) => r,
        Err(e) => {
            out.push(Check::from("numeric.ratio_monotone", false, e.to_string()));
            return out;
        }
    };
    let mut mono = true;
    for w in report.table.windows(2) {
        mono &= w[0].ratio <= w[1].ratio;
    }
    let last = report.table.last().map(|r| r.ratio < 1.0).unwrap_or(false);
    out.push(Check::from("numeric.ratio_monotone", mono && last, "ratios increase toward 1"));
    out
}

/// Machine-readable summary for stdout.
pub fn summary_json(suite: Suite, checks: &[Check]) -> serde_json::Value {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    serde_json::json!({
        "suite": suite.name(),
        "passed": checks.len() - failed.len(),
        "failed": failed.len(),
        "checks": checks.iter().map(|c| {
            serde_json::json!({"name": c.name, "ok": c.passed})
        }).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_suite_passes() {
        assert!(run_suite(Suite::Series).iter().all(|c| c.passed));
    }

    #[test]
    fn ladder_suite_passes() {
        assert!(run_suite(Suite::Ladder).iter().all(|c| c.passed));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Series, Suite::Ladder, Suite::Oracle, Suite::Identities, Suite::Variants, Suite::Numeric, Suite::All] {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("bogus"), None);
    }

    #[test]
    fn summary_counts_failures() {
        let checks = vec![
            Check::from("a", true, ""),
            Check::from("b", false, "broken"),
        ];
        let json = summary_json(Suite::Series, &checks);
        assert_eq!(json["passed"], 1);
        assert_eq!(json["failed"], 1);
    }
}
