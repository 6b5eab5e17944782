//! Two walks with the five-step interior set and modified boundary behavior.
//!
//! The first can only move upward on the vertical boundary; a single product
//! `c_0 alpha_0^i beta_0^j` solves all of its recursions, so the generating
//! function is rational in `x` and `y`. The second replaces the upward moves
//! by the non-local jump `(i,0) -> (0,i)`; compensation then runs on one
//! boundary only, producing a one-sided ladder whose `k`-th term carries a
//! factor of valuation `k` — the sum truncates exactly.

use num::traits::Zero;
use thiserror::Error;

use crate::series::{ratio, SeriesError, TruncSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VariantError {
    /// The branch map `g` wants an argument vanishing at `z = 0`.
    #[error("branch map argument must vanish at z = 0")]
    BadValuation,
    /// A big-step ladder was asked for more coefficients than its depth
    /// supports.
    #[error("ladder depth {depth} supports orders up to {depth}, not {order}")]
    InsufficientDepth { depth: usize, order: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The single-product solution of the upward-boundary walk:
/// `beta_0` is the unique power-series root of
/// `beta = z (1 + beta^2 + beta^2 (1 + beta)^2)`, `alpha_0 = beta_0 (1 + beta_0)`,
/// and `c_0 = beta_0 / z`.
#[derive(Debug, Clone)]
pub struct RationalSolution {
    pub beta0: TruncSeries,
    pub alpha0: TruncSeries,
    pub c0: TruncSeries,
    order: usize,
}

impl RationalSolution {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `q_{i,j} = c_0 alpha_0^i beta_0^j`.
    pub fn q(&self, i: usize, j: usize) -> TruncSeries {
        self.c0.mul(&self.alpha0.pow(i)).mul(&self.beta0.pow(j))
    }
}

/// Fixed-point iteration for the quartic root: each pass through
/// `beta <- z (1 + beta^2 + beta^2 (1 + beta)^2)` gains one order because of
/// the leading `z`.
pub fn solve_rational(order: usize) -> RationalSolution {
    assert!(order >= 1);
    let work = order + 1; // c_0 = beta_0 / z costs one order
    let one = TruncSeries::one(work);
    let mut beta = TruncSeries::zero(work);
    for _ in 0..=work {
        let b2 = beta.mul(&beta);
        let opb = one.add(&beta);
        beta = one.add(&b2).add(&b2.mul(&opb).mul(&opb)).mul_z_pow(1);
    }
    let c0 = beta.shift_div_z(1).expect("beta_0 has valuation 1");
    let beta0 = beta.truncate(order);
    let alpha0 = beta0.mul(&TruncSeries::one(order).add(&beta0));
    RationalSolution { beta0, alpha0, c0, order }
}

/// Taylor coefficients `0..=order` of the upward-boundary walk's generating
/// function at endpoint `(i, j)`.
pub fn q_rational(i: usize, j: usize, order: usize) -> TruncSeries {
    solve_rational(order.max(1)).q(i, j).truncate(order)
}

/// The branch map of the five-step kernel,
/// `g(t) = [1 - tz - sqrt((1 - tz)^2 - 4 z^2 (1 + t)^2)] / (2 z (1 + t))`;
/// the other sign choice is not a power series and is rejected by
/// construction here. `g` maps valuation >= 1 (or zero) to valuation 1.
pub fn g_apply(t: &TruncSeries, order: usize) -> Result<TruncSeries, VariantError> {
    if !t.coeff(0).is_zero() {
        return Err(VariantError::BadValuation);
    }
    let work = order + 1;
    let t_ext = {
        let mut coeffs = t.coeffs().to_vec();
        coeffs.resize(work + 1, num::traits::Zero::zero());
        TruncSeries::from_coeffs(coeffs)
    };
    let one = TruncSeries::one(work);
    let one_minus_tz = one.sub(&t_ext.mul_z_pow(1));
    let one_plus_t = one.add(&t_ext);
    let inside = one_minus_tz
        .mul(&one_minus_tz)
        .sub(&one_plus_t.mul(&one_plus_t).mul_z_pow(2).scalar_mul(&ratio(4, 1)));
    let num = one_minus_tz.sub(&inside.sqrt()?);
    // 1 - tz - sqrt(...) has valuation 2
    let shifted = num.shift_div_z(1)?;
    Ok(shifted
        .div(&TruncSeries::one(order).add(&t.truncate(order)))?
        .scalar_mul(&ratio(1, 2)))
}

/// One-sided compensation ladder for the big-step walk: `beta_0 = 0`,
/// `beta_{k+1} = alpha_k`, `alpha_{k+1} = g(beta_{k+1})`, and coefficients
/// `c_{k+1} = c_k alpha_{k+1} / (1 + beta_{k+1})` with `1/c_0` given by an
/// explicit series whose `k`-th summand has valuation `k`.
#[derive(Debug, Clone)]
pub struct BigStepLadder {
    alphas: Vec<TruncSeries>,
    betas: Vec<TruncSeries>,
    cs: Vec<TruncSeries>,
    order: usize,
}

impl BigStepLadder {
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

    pub fn c(&self, k: usize) -> &TruncSeries {
        &self.cs[k]
    }

    /// `q_{i,j} = sum_k c_k alpha_k^i beta_k^j` at the ladder's order. Term
    /// `k` has valuation at least `k` (through `c_k`), so depth `order`
    /// makes the truncated sum exact; shallower ladders are refused.
    pub fn q(&self, i: usize, j: usize, order: usize) -> Result<TruncSeries, VariantError> {
        if self.depth() < order {
            return Err(VariantError::InsufficientDepth { depth: self.depth(), order });
        }
        assert!(order <= self.order);
        let mut out = TruncSeries::zero(order);
        for k in 0..=order {
            if j >= 1 && k == 0 {
                continue; // beta_0 = 0 kills the first term
            }
            let term = self.cs[k]
                .truncate(order)
                .mul(&self.alphas[k].truncate(order).pow(i))
                .mul(&self.betas[k].truncate(order).pow(j));
            out = out.add(&term);
        }
        Ok(out)
    }
}

/// Builds the big-step ladder to the given depth and truncation order.
pub fn build_bigstep(depth: usize, order: usize) -> BigStepLadder {
    assert!(depth >= 1 && order >= 1);
    let g0 = g_apply(&TruncSeries::zero(order), order).expect("zero argument");
    let mut alphas = vec![g0];
    let mut betas = vec![TruncSeries::zero(order)];
    for k in 0..depth {
        betas.push(alphas[k].clone());
        alphas.push(g_apply(&betas[k + 1], order).expect("valuation 1 argument"));
    }
    // the 1/c_0 summand k reaches beta_{k+1}; beta_{depth+1} = alpha_depth
    betas.push(alphas[depth].clone());

    // 1/c_0 = sum_k [beta_2 ... beta_{k+1} / ((1+beta_1) ... (1+beta_k))]
    //               * [1 - z (beta_k + beta_{k+1} + beta_k beta_{k+1})]
    // summand k has valuation k, so `order` terms pin the truncation
    let one = TruncSeries::one(order);
    let mut inv_c0 = TruncSeries::zero(order);
    let mut prefactor = one.clone();
    for k in 0..=order.min(depth) {
        if k > 0 {
            prefactor = prefactor
                .mul(&betas[k + 1])
                .div(&one.add(&betas[k]))
                .expect("1 + beta_k has constant term 1");
        }
        let tail = one.sub(
            &betas[k]
                .add(&betas[k + 1])
                .add(&betas[k].mul(&betas[k + 1]))
                .mul_z_pow(1),
        );
        inv_c0 = inv_c0.add(&prefactor.mul(&tail));
    }
    let c0 = one.div(&inv_c0).expect("k = 0 summand gives constant term 1");

    let mut cs = vec![c0];
    for k in 0..depth {
        let next = cs[k]
            .mul(&alphas[k + 1])
            .div(&one.add(&betas[k + 1]))
            .expect("constant term 1");
        cs.push(next);
    }
    BigStepLadder { alphas, betas, cs, order }
}

/// Taylor coefficients `0..=order` of the big-step walk's generating
/// function at endpoint `(i, j)`.
pub fn q_bigstep(i: usize, j: usize, order: usize) -> Result<TruncSeries, VariantError> {
    if order == 0 {
        return Ok(if (i, j) == (0, 0) { TruncSeries::one(0) } else { TruncSeries::zero(0) });
    }
    build_bigstep(order, order + 1).q(i, j, order)
}

/// Residual of the `z`-cleared fixed-point cubic
/// `z t^3 + 2 z t^2 + (z - 1) t + z` at `t`; the ladder's `alpha_k` sink
/// into its power-series root, so the residual's valuation grows with `k`.
pub fn cubic_residual(t: &TruncSeries) -> TruncSeries {
    let order = t.order();
    let t2 = t.mul(t);
    let t3 = t2.mul(t);
    t3.mul_z_pow(1)
        .add(&t2.mul_z_pow(1).scalar_mul(&ratio(2, 1)))
        .add(&t.mul_z_pow(1))
        .sub(t)
        .add(&TruncSeries::z(order))
}

/// Checks the region recursions of a variant walk as exact series
/// identities, `z`-cleared: `q_{i,j} = z * (sum of neighbor series)` for all
/// `i, j <= span` at the given order. Both variants share the interior and
/// horizontal equations; they differ on the vertical boundary and at the
/// origin.
pub fn check_recursions(kind: crate::walk::WalkKind, span: usize, order: usize) -> bool {
    use crate::walk::WalkKind;
    let dim = span + 2; // recursions reference (span+1)-indexed neighbors
    let q: Vec<Vec<TruncSeries>> = match kind {
        WalkKind::RationalGf => {
            let sol = solve_rational(order);
            (0..=dim).map(|i| (0..=dim).map(|j| sol.q(i, j)).collect()).collect()
        }
        WalkKind::BigStep => {
            let ladder = build_bigstep(order, order + 1);
            (0..=dim)
                .map(|i| {
                    (0..=dim)
                        .map(|j| ladder.q(i, j, order).expect("depth = order"))
                        .collect()
                })
                .collect()
        }
        WalkKind::Main => panic!("main walk recursions are checked through its own solver"),
    };

    let zero = TruncSeries::zero(order);
    let at = |i: i64, j: i64| -> &TruncSeries {
        if i < 0 || j < 0 {
            &zero
        } else {
            &q[i as usize][j as usize]
        }
    };

    for i in 0..=span as i64 {
        for j in 0..=span as i64 {
            let neighbors = if i > 0 && j > 0 {
                // interior: five incoming directions
                at(i - 1, j)
                    .add(at(i - 1, j + 1))
                    .add(at(i, j + 1))
                    .add(at(i + 1, j))
                    .add(at(i + 1, j + 1))
            } else if i > 0 {
                at(i - 1, 0)
                    .add(at(i - 1, 1))
                    .add(at(i, 1))
                    .add(at(i + 1, 0))
                    .add(at(i + 1, 1))
            } else if j > 0 {
                match kind {
                    WalkKind::RationalGf => at(0, j - 1)
                        .add(at(0, j + 1))
                        .add(at(1, j))
                        .add(at(1, j + 1)),
                    WalkKind::BigStep => at(j, 0)
                        .add(at(0, j + 1))
                        .add(at(1, j))
                        .add(at(1, j + 1)),
                    WalkKind::Main => unreachable!(),
                }
            } else {
                at(0, 1).add(at(1, 1)).add(at(1, 0))
            };
            let mut rhs = neighbors.mul_z_pow(1);
            if i == 0 && j == 0 {
                rhs = rhs.add(&TruncSeries::one(order)); // the empty walk
            }
            if at(i, j).truncate(order) != rhs {
                return false;
            }
        }
    }
    true
}
