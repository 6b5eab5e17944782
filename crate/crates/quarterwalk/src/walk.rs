//! Brute-force exact counting of quarter-plane walks: evolve the length-`k`
//! layer forward into layer `k+1` with arbitrary-precision integer counts.
//!
//! The step set is region-dependent: a walk standing in the interior, on the
//! horizontal boundary, on the vertical boundary, or at the origin uses four
//! different step lists. One walk variant additionally has a non-local jump
//! `(i,0) -> (0,i)` from the horizontal boundary. The forward evolution here
//! is the oracle for the generating-function construction in
//! [`crate::compensation`]; the backward recursions become a consistency
//! check ([`check_functional_equation`] and the layer recursion tests).

use std::fmt::Write as _;
use std::sync::LazyLock;

use num::bigint::{BigInt, BigUint};
use num::traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("unknown walk rule `{0}` (expected main, rational_gf or big_step)")]
    UnknownRule(String),
    #[error("step ({dx},{dy}) leaves the quarter plane when taken from the {region} region")]
    StepLeavesQuadrant { dx: i8, dy: i8, region: &'static str },
    #[error("step ({dx},{dy}) is not a small step")]
    StepTooLarge { dx: i8, dy: i8 },
    #[error("length {k} exceeds the table maximum {kmax}")]
    OutOfRange { k: usize, kmax: usize },
    #[error("count table was not built with the main walk rule")]
    WrongRule,
}

/// The three built-in walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    /// Interior steps NW/SW/SE, distinct boundary step sets.
    Main,
    /// Five interior steps, upward-only vertical boundary; the generating
    /// function of this walk is rational in `x`, `y`.
    RationalGf,
    /// Same interior as [`WalkKind::RationalGf`] plus the jump
    /// `(i,0) -> (0,i)` on the horizontal boundary.
    BigStep,
}

impl WalkKind {
    pub fn parse(name: &str) -> Result<Self, WalkError> {
        match name {
            "main" => Ok(Self::Main),
            "rational_gf" => Ok(Self::RationalGf),
            "big_step" => Ok(Self::BigStep),
            other => Err(WalkError::UnknownRule(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Main => "main",
            Self::RationalGf => "rational_gf",
            Self::BigStep => "big_step",
        }
    }
}

/// Region-dependent step sets. All steps are small (`|dx|, |dy| <= 1`); the
/// optional axis jump `(i,0) -> (0,i)` rides along with the horizontal list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRule {
    interior: Vec<(i8, i8)>,
    horizontal: Vec<(i8, i8)>,
    vertical: Vec<(i8, i8)>,
    origin: Vec<(i8, i8)>,
    axis_jump: bool,
}

impl StepRule {
    /// Validates that every step keeps the walk in the quarter plane when
    /// applied from its region.
    pub fn new(
        interior: Vec<(i8, i8)>,
        horizontal: Vec<(i8, i8)>,
        vertical: Vec<(i8, i8)>,
        origin: Vec<(i8, i8)>,
        axis_jump: bool,
    ) -> Result<Self, WalkError> {
        let check = |steps: &[(i8, i8)], region: &'static str, min_dx: i8, min_dy: i8| {
            for &(dx, dy) in steps {
                if dx.abs() > 1 || dy.abs() > 1 {
                    return Err(WalkError::StepTooLarge { dx, dy });
                }
                if dx < min_dx || dy < min_dy {
                    return Err(WalkError::StepLeavesQuadrant { dx, dy, region });
                }
            }
            Ok(())
        };
        check(&interior, "interior", -1, -1)?;
        check(&horizontal, "horizontal", -1, 0)?;
        check(&vertical, "vertical", 0, -1)?;
        check(&origin, "origin", 0, 0)?;
        Ok(Self { interior, horizontal, vertical, origin, axis_jump })
    }

    pub fn builtin(kind: WalkKind) -> Self {
        let rule = match kind {
            WalkKind::Main => Self::new(
                vec![(-1, 1), (-1, -1), (1, -1)],
                vec![(-1, 1), (-1, 0), (1, 0)],
                vec![(0, 1), (0, -1), (1, -1)],
                vec![(0, 1), (1, 0)],
                false,
            ),
            WalkKind::RationalGf => Self::new(
                vec![(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0)],
                vec![(-1, 0), (1, 0)],
                vec![(0, 1), (0, -1), (1, -1), (1, 0)],
                vec![(0, 1), (1, 0)],
                false,
            ),
            WalkKind::BigStep => Self::new(
                vec![(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0)],
                vec![(-1, 0), (1, 0)],
                vec![(0, -1), (1, -1), (1, 0)],
                vec![(1, 0)],
                true,
            ),
        };
        rule.expect("built-in rules are region-valid")
    }

    /// Steps available from state `(i, j)`, excluding the axis jump.
    pub fn steps_from(&self, i: usize, j: usize) -> &[(i8, i8)] {
        match (i, j) {
            (0, 0) => &self.origin,
            (_, 0) => &self.horizontal,
            (0, _) => &self.vertical,
            _ => &self.interior,
        }
    }

    pub fn has_axis_jump(&self) -> bool {
        self.axis_jump
    }

    pub fn interior(&self) -> &[(i8, i8)] {
        &self.interior
    }

    pub fn origin(&self) -> &[(i8, i8)] {
        &self.origin
    }
}

static ZERO_COUNT: LazyLock<BigUint> = LazyLock::new(BigUint::zero);

/// Exact counts `q_{i,j,k}` of walks of length `k` from the origin to
/// `(i, j)`, for all `k <= kmax`. Layer `k` is stored as a dense square of
/// side `k + 2`: a walk of length `k` cannot leave `0..=k` in either
/// coordinate, so nothing is lost to the grid cap.
#[derive(Debug, Clone)]
pub struct CountTable {
    rule: StepRule,
    kmax: usize,
    bound: usize,
    layers: Vec<Vec<BigUint>>,
}

fn side(k: usize) -> usize {
    k + 2
}

impl CountTable {
    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Grid cap: coordinates above this are structurally unreachable.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn rule(&self) -> &StepRule {
        &self.rule
    }

    /// `q_{i,j,k}`. Panics for `k > kmax`; out-of-grid states are zero.
    pub fn count(&self, i: usize, j: usize, k: usize) -> &BigUint {
        assert!(k <= self.kmax, "layer {k} not computed (kmax = {})", self.kmax);
        if i + j > k {
            return &ZERO_COUNT;
        }
        &self.layers[k][i * side(k) + j]
    }

    /// Total walks of length `k`, and walks of length `k` ending on the
    /// horizontal axis.
    pub fn marginals(&self, k: usize) -> Result<(BigUint, BigUint), WalkError> {
        if k > self.kmax {
            return Err(WalkError::OutOfRange { k, kmax: self.kmax });
        }
        let mut total = BigUint::zero();
        let mut axis = BigUint::zero();
        for i in 0..=k {
            for j in 0..=(k - i) {
                let c = self.count(i, j, k);
                if !c.is_zero() {
                    total += c;
                    if j == 0 {
                        axis += c;
                    }
                }
            }
        }
        Ok((total, axis))
    }

    /// Nonzero entries in `(k, i, j)` order; the iteration order fixes the
    /// export layouts.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, usize, &BigUint)> {
        (0..=self.kmax).flat_map(move |k| {
            (0..=k).flat_map(move |i| {
                (0..=(k - i)).filter_map(move |j| {
                    let c = self.count(i, j, k);
                    (!c.is_zero()).then_some((k, i, j, c))
                })
            })
        })
    }

    /// CSV with header `i,j,k,count`; one row per nonzero count, sorted by
    /// `(k, i, j)`. Counts are decimal strings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,k,count\n");
        for (k, i, j, c) in self.nonzero_entries() {
            let _ = writeln!(out, "{i},{j},{k},{c}");
        }
        out
    }

    /// JSON mirror of the table: kmax, grid cap, and the nonzero counts.
    pub fn to_json(&self) -> serde_json::Value {
        let counts: Vec<serde_json::Value> = self
            .nonzero_entries()
            .map(|(k, i, j, c)| {
                serde_json::json!({"i": i, "j": j, "k": k, "count": c.to_string()})
            })
            .collect();
        serde_json::json!({"kmax": self.kmax, "bound": self.bound, "counts": counts})
    }

    #[cfg(test)]
    pub(crate) fn perturb(&mut self, i: usize, j: usize, k: usize) {
        let s = side(k);
        self.layers[k][i * s + j] += 1u32;
    }
}

/// Forward dynamic program: push every populated state's count along each
/// step allowed from its region.
pub fn dp_counts(rule: &StepRule, kmax: usize) -> CountTable {
    let mut layers: Vec<Vec<BigUint>> = Vec::with_capacity(kmax + 1);
    let mut first = vec![BigUint::zero(); side(0) * side(0)];
    first[0] = BigUint::from(1u32);
    layers.push(first);

    for k in 0..kmax {
        let (s_cur, s_next) = (side(k), side(k + 1));
        let mut next = vec![BigUint::zero(); s_next * s_next];
        for i in 0..=k {
            for j in 0..=(k - i) {
                let c = layers[k][i * s_cur + j].clone();
                if c.is_zero() {
                    continue;
                }
                for &(dx, dy) in rule.steps_from(i, j) {
                    let ni = (i as i64 + dx as i64) as usize;
                    let nj = (j as i64 + dy as i64) as usize;
                    next[ni * s_next + nj] += &c;
                }
                if rule.axis_jump && j == 0 && i > 0 {
                    next[i] += &c; // (i,0) -> (0,i)
                }
            }
        }
        layers.push(next);
    }

    CountTable { rule: rule.clone(), kmax, bound: kmax + 1, layers }
}

/// Coefficient check of the kernel functional equation for the main walk,
/// cleared of its `1/z` term: for every monomial `x^i y^j z^k` with
/// `i <= imax`, `j <= jmax`, `k <= kmax`, the two sides of
///
/// ```text
/// z(1 + x^2 + y^2) Q - xy Q =
///     z [1 + x^2 - x^2 y - y] Q(x,0) + z [1 + y^2 - x y^2 - x] Q(0,y)
///   + z [x + y - 1] Q(0,0) - xy
/// ```
///
/// must agree exactly. Equivalent to the layer recursions, but derived from
/// the bivariate generating function instead, so it cross-checks the DP from
/// a second formulation.
pub fn check_functional_equation(
    table: &CountTable,
    imax: usize,
    jmax: usize,
    kmax: usize,
) -> Result<bool, WalkError> {
    if table.rule != StepRule::builtin(WalkKind::Main) {
        return Err(WalkError::WrongRule);
    }
    if table.kmax < kmax + 1 {
        return Err(WalkError::OutOfRange { k: kmax + 1, kmax: table.kmax });
    }

    let q = |i: i64, j: i64, k: i64| -> BigInt {
        if i < 0 || j < 0 || k < 0 {
            return BigInt::zero();
        }
        BigInt::from(table.count(i as usize, j as usize, k as usize).clone())
    };

    for i in 0..=imax as i64 {
        for j in 0..=jmax as i64 {
            for k in 0..=kmax as i64 {
                let lhs = q(i, j, k - 1) + q(i - 2, j, k - 1) + q(i, j - 2, k - 1)
                    - q(i - 1, j - 1, k);
                let mut rhs = BigInt::zero();
                if j == 0 {
                    rhs += q(i, 0, k - 1) + q(i - 2, 0, k - 1);
                }
                if j == 1 {
                    rhs -= q(i, 0, k - 1) + q(i - 2, 0, k - 1);
                }
                if i == 0 {
                    rhs += q(0, j, k - 1) + q(0, j - 2, k - 1);
                }
                if i == 1 {
                    rhs -= q(0, j, k - 1) + q(0, j - 2, k - 1);
                }
                if i == 1 && j == 0 {
                    rhs += q(0, 0, k - 1);
                }
                if i == 0 && j == 1 {
                    rhs += q(0, 0, k - 1);
                }
                if i == 0 && j == 0 {
                    rhs -= q(0, 0, k - 1);
                }
                if i == 1 && j == 1 && k == 0 {
                    rhs -= BigInt::from(1);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
