//! Exact generating functions for the main walk, built by compensation: an
//! alternating sum of product terms `alpha^i beta^j` taken on the kernel
//! curve `z (a^2 + b^2 + a^2 b^2) = a b`, each new term cancelling the
//! boundary error left by the previous one.
//!
//! The ladder starts from the unique power-series pair
//! `alpha_0 = (1 - sqrt(1 - 8 z^2)) / (4z)`, `beta_0 = alpha_0^2 / (1 + alpha_0^2)`
//! and continues with the branch map `f`: `beta_k = f(alpha_k)`,
//! `alpha_{k+1} = f(beta_k)`. Valuations grow two per rung, so only a short
//! ladder is needed for any fixed coefficient order ([`truncation_bound`]).
//!
//! Everything here is exact rational arithmetic; the resulting Taylor
//! coefficients must equal the walk counts from [`crate::walk`] bit for bit.

use std::collections::BTreeMap;

use num::traits::Zero;
use thiserror::Error;

use crate::series::{ratio, SeriesError, TruncSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    /// The branch map needs an argument with positive valuation.
    #[error("branch map argument must vanish at z = 0")]
    NonPositiveValuation,
    /// A ladder was asked for coefficients it cannot support.
    #[error("ladder depth {depth} is too shallow for ({i},{j}) at order {order}; need {need}")]
    InsufficientDepth { depth: usize, i: usize, j: usize, order: usize, need: usize },
    /// An exact division by `z` hit a nonzero low coefficient. This would
    /// falsify the ladder valuation laws, so it is surfaced loudly.
    #[error("valuation violation: {0}")]
    ValuationViolation(SeriesError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The unique starting pair on the kernel curve that also satisfies the
/// horizontal boundary condition: `alpha_0 = z (1 + 2 alpha_0^2)` with the
/// power-series branch, and `beta_0 (1 + alpha_0^2) = alpha_0^2`.
pub fn initial_pair(order: usize) -> (TruncSeries, TruncSeries) {
    assert!(order >= 1);
    // 1 - sqrt(1 - 8 z^2) has valuation 2; dividing by 4z is exact.
    let inside = TruncSeries::one(order + 1)
        .sub(&TruncSeries::monomial(ratio(8, 1), 2, order + 1));
    let num = TruncSeries::one(order + 1).sub(&inside.sqrt().expect("constant term 1"));
    let alpha0 = num
        .shift_div_z(1)
        .expect("cancellation at z^0, z^1 is exact")
        .scalar_mul(&ratio(1, 4));
    let a2 = alpha0.mul(&alpha0);
    let beta0 = a2.div(&TruncSeries::one(order).add(&a2)).expect("unit constant term");
    (alpha0, beta0)
}

/// The kernel branch map
/// `f(t) = t (1 - sqrt(1 - 4 z^2 (1 + t^2))) / (2 z (1 + t^2))`.
///
/// Maps valuation `p` to valuation `p + 1` with unit leading coefficient;
/// `f(0) = 0` (the zero truncation has valuation +infinity and is fine).
pub fn f_apply(t: &TruncSeries, order: usize) -> Result<TruncSeries, SolverError> {
    if !t.coeff(0).is_zero() {
        return Err(SolverError::NonPositiveValuation);
    }
    if t.is_zero() {
        return Ok(TruncSeries::zero(order));
    }
    let work = order + 1;
    let t_ext = {
        let mut coeffs = t.coeffs().to_vec();
        coeffs.resize(work + 1, num::traits::Zero::zero());
        TruncSeries::from_coeffs(coeffs)
    };
    let one_plus_t2 = TruncSeries::one(work).add(&t_ext.mul(&t_ext));
    let inside = TruncSeries::one(work)
        .sub(&one_plus_t2.mul_z_pow(2).scalar_mul(&ratio(4, 1)));
    // 1 - sqrt(...) has valuation 2, so the division by 2z is exact
    let num = TruncSeries::one(work).sub(&inside.sqrt()?);
    let shifted = num.shift_div_z(1).map_err(SolverError::ValuationViolation)?;
    let g = shifted
        .div(&one_plus_t2.truncate(order))?
        .scalar_mul(&ratio(1, 2));
    Ok(g.mul(&t.truncate(order)))
}

/// The alternating-product ladder `alpha_0, beta_0, alpha_1, beta_1, ...`
/// with `valuation(alpha_k) = 2k + 1` and `valuation(beta_k) = 2k + 2`.
#[derive(Debug, Clone)]
pub struct AlphaBetaLadder {
    alphas: Vec<TruncSeries>,
    betas: Vec<TruncSeries>,
    order: usize,
}

impl AlphaBetaLadder {
    /// Builds rungs `0..=depth` at the given order. Requires
    /// `order >= 2 * depth + 2` so every rung is visible above the
    /// truncation; use [`AlphaBetaLadder::build_for_order`] when only a
    /// target coefficient order matters.
    pub fn build(depth: usize, order: usize) -> Self {
        assert!(order >= 2 * depth + 2, "order {order} hides rungs beyond {}", depth);
        let (alpha0, beta0) = initial_pair(order);
        let mut alphas = vec![alpha0];
        let mut betas = vec![beta0];
        for k in 0..depth {
            alphas.push(f_apply(&betas[k], order).expect("beta_k vanishes at 0"));
            betas.push(f_apply(&alphas[k + 1], order).expect("alpha_k vanishes at 0"));
        }
        Self { alphas, betas, order }
    }

    /// Builds at whatever internal order keeps all rungs visible, then
    /// truncates to `order`. Deep rungs may become zero truncations; they
    /// contribute nothing below the truncation, which is exactly right.
    pub fn build_for_order(depth: usize, order: usize) -> Self {
        let full = Self::build(depth, order.max(2 * depth + 2));
        if full.order == order {
            return full;
        }
        Self {
            alphas: full.alphas.iter().map(|s| s.truncate(order)).collect(),
            betas: full.betas.iter().map(|s| s.truncate(order)).collect(),
            order,
        }
    }

    pub fn depth(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self, k: usize) -> &TruncSeries {
        &self.alphas[k]
    }

    pub fn beta(&self, k: usize) -> &TruncSeries {
        &self.betas[k]
    }

    /// Boundary-symmetrized solution `xhat_{i,j} = x_{i,j} + x_{j,i}` to
    /// coefficient order `p`, using all available rungs.
    pub fn xhat(&self, i: usize, j: usize, p: usize) -> Result<TruncSeries, SolverError> {
        let need = truncation_bound(i, j, p) + 1;
        if self.depth() < need {
            return Err(SolverError::InsufficientDepth {
                depth: self.depth(),
                i,
                j,
                order: p,
                need,
            });
        }
        self.xhat_with_terms(i, j, p, self.depth())
    }

    /// Same as [`AlphaBetaLadder::xhat`] with an explicit term count
    /// (`terms` products per orientation, touching rungs `0..=terms`).
    /// Stability under increasing `terms` past the truncation bound is a
    /// tested property.
    pub fn xhat_with_terms(
        &self,
        i: usize,
        j: usize,
        p: usize,
        terms: usize,
    ) -> Result<TruncSeries, SolverError> {
        assert!(p <= self.order, "order {p} exceeds ladder order {}", self.order);
        assert!(terms <= self.depth());
        Ok(self.x_part(i, j, p, terms).add(&self.x_part(j, i, p, terms)))
    }

    /// One orientation `x_{i,j} = sum_k (1 - beta_k) beta_k^j [A_k - A_{k+1}]`
    /// with `A_k = (1 - alpha_k) alpha_k^i`, evaluated in telescoped form.
    ///
    /// The literal partial sums lose accuracy two orders per missing term
    /// when `j = 0` (the `A_k` parts telescope only across the full sum), so
    /// for `j = 0` the telescoped limit `A_0 - [i = 0] - sum beta_k (A_k -
    /// A_{k+1})` is used instead; its terms decay four orders per rung, which
    /// is what makes the truncation bound sufficient.
    fn x_part(&self, i: usize, j: usize, p: usize, terms: usize) -> TruncSeries {
        let one = TruncSeries::one(p);
        let a_big = |k: usize| -> TruncSeries {
            let ak = self.alphas[k].truncate(p);
            one.sub(&ak).mul(&ak.pow(i))
        };
        if j == 0 {
            let mut out = a_big(0);
            if i == 0 {
                // A_k -> 1 instead of 0 when i = 0; the telescoped limit
                // picks up the -1
                out = out.sub(&one);
            }
            let mut prev = a_big(0);
            for k in 0..terms {
                let next = a_big(k + 1);
                let bk = self.betas[k].truncate(p);
                out = out.sub(&bk.mul(&prev.sub(&next)));
                prev = next;
            }
            out
        } else {
            let mut out = TruncSeries::zero(p);
            let mut prev = a_big(0);
            for k in 0..terms {
                let next = a_big(k + 1);
                let bk = self.betas[k].truncate(p);
                let lead = one.sub(&bk).mul(&bk.pow(j));
                out = out.add(&lead.mul(&prev.sub(&next)));
                prev = next;
            }
            out
        }
    }
}

/// Number of ladder rungs whose order-`p` expansions determine the first
/// coefficients of `xhat_{i,j}`:
/// `N = 1 + floor(max{p - (i?1 + 2 j?1), p - (2 i?1 + j?1)} / 4)`, clamped
/// to zero when the max is negative (`?1` is max with 1).
pub fn truncation_bound(i: usize, j: usize, p: usize) -> usize {
    let iv = i.max(1) as i64;
    let jv = j.max(1) as i64;
    let m = (p as i64 - (iv + 2 * jv)).max(p as i64 - (2 * iv + jv));
    if m < 0 {
        0
    } else {
        (1 + m / 4) as usize
    }
}

/// Ladder depth used for a batch of `(i, j)` requests at order `p`: the
/// largest truncation bound, at least 1, plus a safety margin of one rung.
pub fn ladder_depth_for(pairs: &[(usize, usize)], p: usize) -> usize {
    pairs
        .iter()
        .map(|&(i, j)| truncation_bound(i, j, p))
        .max()
        .unwrap_or(0)
        .max(1)
        + 1
}

/// The assembled solution: boundary-symmetrized products, the normalizing
/// series `c = 1 / (1 - 2z + z xhat_{0,0})`, and the origin series
/// `q_{0,0} = (1 + xhat_{0,0}) / (1 - 2z + z xhat_{0,0})`.
#[derive(Debug, Clone)]
pub struct XSolution {
    order: usize,
    xhat: BTreeMap<(usize, usize), TruncSeries>,
    c: TruncSeries,
    q00: TruncSeries,
}

impl XSolution {
    /// Computes `xhat_{i,j}` for every requested pair (plus `(0,0)`, which
    /// the normalization always needs) at coefficient order `p`.
    pub fn compute(p: usize, pairs: &[(usize, usize)]) -> Self {
        let depth = ladder_depth_for(pairs, p).max(ladder_depth_for(&[(0, 0)], p));
        let ladder = AlphaBetaLadder::build_for_order(depth, p.max(1));
        let x00 = ladder.xhat(0, 0, p).expect("depth chosen for (0,0)");
        let denom = denominator(&x00, p);
        let c = TruncSeries::one(p).div(&denom).expect("denominator has constant term 1");
        let q00 = TruncSeries::one(p).add(&x00).div(&denom).expect("same denominator");
        let mut xhat = BTreeMap::new();
        for &(i, j) in pairs {
            let x = ladder.xhat(i, j, p).expect("depth chosen for all pairs");
            xhat.insert((i, j), x);
        }
        xhat.entry((0, 0)).or_insert(x00);
        Self { order: p, xhat, c, q00 }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn c(&self) -> &TruncSeries {
        &self.c
    }

    pub fn q00(&self) -> &TruncSeries {
        &self.q00
    }

    pub fn xhat(&self, i: usize, j: usize) -> Option<&TruncSeries> {
        self.xhat.get(&(i, j))
    }

    /// Generating function of walks ending at `(i, j)`: `q_{0,0}` at the
    /// origin, `c * xhat_{i,j}` elsewhere.
    pub fn q(&self, i: usize, j: usize) -> Option<TruncSeries> {
        if (i, j) == (0, 0) {
            return Some(self.q00.clone());
        }
        self.xhat.get(&(i, j)).map(|x| self.c.mul(x))
    }

    /// `{"order": p, "q": {"i,j": [coeffs]}, "c": [coeffs], "identities_ok": b}`
    /// with coefficients as `"p/q"` strings.
    pub fn to_json(&self, identities_ok: bool) -> serde_json::Value {
        let mut q = serde_json::Map::new();
        for &(i, j) in self.xhat.keys() {
            let series = self.q(i, j).expect("key comes from the map");
            q.insert(
                format!("{i},{j}"),
                serde_json::Value::Array(
                    series
                        .coeffs()
                        .iter()
                        .map(|c| serde_json::Value::String(crate::series::rat_string(c)))
                        .collect(),
                ),
            );
        }
        serde_json::json!({
            "order": self.order,
            "q": q,
            "c": self.c.coeffs().iter().map(crate::series::rat_string).collect::<Vec<_>>(),
            "identities_ok": identities_ok,
        })
    }
}

fn denominator(x00: &TruncSeries, p: usize) -> TruncSeries {
    TruncSeries::one(p)
        .sub(&TruncSeries::monomial(ratio(2, 1), 1, p))
        .add(&x00.mul_z_pow(1))
}

/// Taylor coefficients `0..=p` of the generating function of walks ending at
/// `(i, j)`. The `p = 0` case is immediate (the empty walk) and skips the
/// ladder.
pub fn q_series(i: usize, j: usize, p: usize) -> TruncSeries {
    if p == 0 {
        return if (i, j) == (0, 0) { TruncSeries::one(0) } else { TruncSeries::zero(0) };
    }
    XSolution::compute(p, &[(i, j)]).q(i, j).expect("pair was requested")
}

/// Totals and axis sums without summing the table: `q11 = c` generates the
/// total number of walks per length, `q10 = c (1 - alpha_0)` the walks
/// ending on the horizontal axis, alongside `q00`.
pub fn special_values(p: usize) -> (TruncSeries, TruncSeries, TruncSeries) {
    let sol = XSolution::compute(p.max(1), &[(0, 0)]);
    let (alpha0, _) = initial_pair(p.max(1));
    let q10 = sol.c().mul(&TruncSeries::one(sol.order()).sub(&alpha0));
    let (q00, c) = (sol.q00().truncate(p), sol.c().truncate(p));
    (q00, q10.truncate(p), c)
}

/// The two boundary identities that collapse the normalizing constant to
/// `1 / (1 - 2z + z xhat_{0,0})`:
///
/// ```text
/// xhat_{1,0}/z - [xhat_{0,1} + xhat_{2,1} + xhat_{2,0} + xhat_{0,0}] = 1
/// (1/z - 1) xhat_{0,0} + 2 - [xhat_{1,0} + xhat_{0,1} + xhat_{1,1}] = 0
/// ```
///
/// checked as exact series identities modulo `z^(p+1)`. The divisions by `z`
/// are exact shifts; a nonzero low coefficient would falsify the ladder
/// valuation law and is reported as [`SolverError::ValuationViolation`].
pub fn check_boundary_identities(p: usize) -> Result<bool, SolverError> {
    assert!(p >= 1);
    let pairs = [(1, 0), (0, 1), (2, 1), (2, 0), (0, 0), (1, 1)];
    let depth = ladder_depth_for(&pairs, p + 1);
    let ladder = AlphaBetaLadder::build_for_order(depth, p + 1);
    let x = |i: usize, j: usize| ladder.xhat(i, j, p + 1);
    boundary_identities_hold(&x(1, 0)?, &x(0, 1)?, &x(2, 1)?, &x(2, 0)?, &x(0, 0)?, &x(1, 1)?, p)
}

/// Identity check on externally supplied `xhat` series (each at order
/// `p + 1`); split out so tests can feed perturbed inputs.
pub fn boundary_identities_hold(
    x10: &TruncSeries,
    x01: &TruncSeries,
    x21: &TruncSeries,
    x20: &TruncSeries,
    x00: &TruncSeries,
    x11: &TruncSeries,
    p: usize,
) -> Result<bool, SolverError> {
    let one = TruncSeries::one(p);
    let x10_over_z = x10.shift_div_z(1).map_err(SolverError::ValuationViolation)?;
    let sum1 = x01.add(x21).add(x20).add(x00).truncate(p);
    let first = x10_over_z.truncate(p).sub(&sum1) == one;

    let x00_over_z = x00.shift_div_z(1).map_err(SolverError::ValuationViolation)?;
    let sum2 = x10.add(x01).add(x11).truncate(p);
    let second = x00_over_z
        .truncate(p)
        .sub(&x00.truncate(p))
        .add(&one.scalar_mul(&ratio(2, 1)))
        .sub(&sum2)
        .is_zero();

    Ok(first && second)
}
