//! Digit expansions of a point in base β.
//!
//! All routines work on binary digits (ε_1, ε_2, …) with value
//! Σ ε_i β^{-i} and admissible interval [0, 1/(β-1)]. A length-n prefix can
//! be extended to a full expansion of x exactly when the remainder
//! x - value(prefix) lies in [0, β^{-n}/(β-1)]; that window is the single
//! source of truth for extendability, branching, and the search routines.

use serde::Serialize;

use crate::base::BaseValue;
use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// Hard cap for the optimal-chain search; the frontier can hold every
/// value-tied prefix per depth.
pub const OPTIMAL_CHAIN_MAX_HORIZON: u32 = 20;

/// Default horizon for uniqueness probing. Uniqueness to any finite depth
/// is a semi-decision: branching may always appear later.
pub const DEFAULT_UNIQUENESS_HORIZON: u32 = 60;

/// A finite digit word in a fixed base.
#[derive(Clone, Debug, Serialize)]
pub struct DigitSequence {
    beta: f64,
    digits: Vec<u8>,
}

impl DigitSequence {
    pub fn new(beta: &BaseValue, digits: Vec<u8>) -> Result<Self> {
        if digits.iter().any(|&d| d > 1) {
            return Err(Error::domain("digits must be 0 or 1"));
        }
        Ok(DigitSequence {
            beta: beta.value(),
            digits,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Σ ε_i β^{-i} over the whole word.
    pub fn value(&self) -> f64 {
        self.prefix_value(self.digits.len())
    }

    /// Value of the first k digits; nondecreasing in k.
    pub fn prefix_value(&self, k: usize) -> f64 {
        digit_value(&self.digits[..k.min(self.digits.len())], self.beta)
    }
}

fn digit_value(digits: &[u8], beta: f64) -> f64 {
    let mut v = 0.0;
    let mut power = 1.0;
    for &d in digits {
        power /= beta;
        if d == 1 {
            v += power;
        }
    }
    v
}

fn check_admissible(x: f64, beta: f64, tol: &ToleranceConfig) -> Result<()> {
    let hi = 1.0 / (beta - 1.0);
    if !x.is_finite() || x < -tol.measure_tol || x > hi + tol.measure_tol {
        return Err(Error::domain(format!(
            "x = {x} lies outside the admissible interval [0, {hi}]"
        )));
    }
    Ok(())
}

/// Greedy expansion: take ε_i = 1 whenever the remainder stays
/// >= -measure_tol, so boundary ties resolve to 1.
pub fn greedy_expand(
    x: f64,
    beta: &BaseValue,
    depth: u32,
    tol: &ToleranceConfig,
) -> Result<DigitSequence> {
    let b = beta.value();
    check_admissible(x, b, tol)?;
    let mut digits = Vec::with_capacity(depth as usize);
    let mut r = x;
    let mut power = 1.0;
    for _ in 0..depth {
        power /= b;
        if r - power >= -tol.measure_tol {
            digits.push(1);
            r -= power;
        } else {
            digits.push(0);
        }
    }
    Ok(DigitSequence { beta: b, digits })
}

/// Lazy expansion: take ε_i = 0 whenever the full remaining tail
/// β^{-i}/(β-1) still covers the remainder (with measure_tol slack), so
/// boundary ties resolve to 0.
pub fn lazy_expand(
    x: f64,
    beta: &BaseValue,
    depth: u32,
    tol: &ToleranceConfig,
) -> Result<DigitSequence> {
    let b = beta.value();
    check_admissible(x, b, tol)?;
    let mut digits = Vec::with_capacity(depth as usize);
    let mut r = x;
    let mut power = 1.0;
    for _ in 0..depth {
        power /= b;
        let tail = power / (b - 1.0);
        if r <= tail + tol.measure_tol {
            digits.push(0);
        } else {
            digits.push(1);
            r -= power;
        }
    }
    Ok(DigitSequence { beta: b, digits })
}

/// Whether some expansion of x starts with `prefix`: the remainder
/// x - value(prefix) must lie in [0, β^{-n}/(β-1)], tolerance-widened.
pub fn is_extendable_prefix(
    x: f64,
    prefix: &[u8],
    beta: &BaseValue,
    tol: &ToleranceConfig,
) -> Result<bool> {
    if prefix.iter().any(|&d| d > 1) {
        return Err(Error::domain("digits must be 0 or 1"));
    }
    let b = beta.value();
    check_admissible(x, b, tol)?;
    let d = x - digit_value(prefix, b);
    let tail = b.powi(-(prefix.len() as i32)) / (b - 1.0);
    Ok(d >= -tol.measure_tol && d <= tail + tol.measure_tol)
}

/// Which digits admit an extendable continuation, depth by depth.
#[derive(Clone, Debug, Serialize)]
pub struct BranchReport {
    pub x: f64,
    pub beta: f64,
    pub horizon: u32,
    /// (digit 0 allowed, digit 1 allowed) at each depth along the followed
    /// path. Both entries can hold at a branch; neither never holds for
    /// interior x.
    pub allowed: Vec<(bool, bool)>,
    /// The path the profile descended: the unique digit where forced, 1 at
    /// branches (the greedy choice).
    pub followed: Vec<u8>,
    /// First depth where both digits were allowed, if any.
    pub first_branch: Option<u32>,
    /// First branching depth, or the horizon when no branching was seen.
    pub unique_up_to: u32,
}

impl BranchReport {
    /// True when no branching appeared anywhere up to the horizon. Only a
    /// semi-decision for uniqueness of the full expansion.
    pub fn is_unique_to_horizon(&self) -> bool {
        self.first_branch.is_none()
    }
}

/// Walks x's expansion tree to `horizon`, recording the allowed digit set
/// at each depth. Requires x strictly inside (0, 1/(β-1)): both endpoints
/// have trivial forced tails.
pub fn branching_profile(
    x: f64,
    beta: &BaseValue,
    horizon: u32,
    tol: &ToleranceConfig,
) -> Result<BranchReport> {
    if horizon == 0 {
        return Err(Error::domain("branching profile requires horizon >= 1"));
    }
    let b = beta.value();
    let hi = 1.0 / (b - 1.0);
    if !x.is_finite() || x <= 0.0 || x >= hi {
        return Err(Error::domain(format!(
            "branching profile requires x strictly inside (0, {hi}), got {x}"
        )));
    }

    let mut allowed = Vec::with_capacity(horizon as usize);
    let mut followed = Vec::with_capacity(horizon as usize);
    let mut first_branch = None;
    let mut r = x;
    let mut power = 1.0;
    for depth in 1..=horizon {
        power /= b;
        let tail = power / (b - 1.0);
        let allow0 = r >= -tol.measure_tol && r <= tail + tol.measure_tol;
        let r1 = r - power;
        let allow1 = r1 >= -tol.measure_tol && r1 <= tail + tol.measure_tol;
        allowed.push((allow0, allow1));
        debug_assert!(allow0 || allow1, "no extendable digit at depth {depth}");
        if allow0 && allow1 && first_branch.is_none() {
            first_branch = Some(depth);
        }
        if allow1 {
            followed.push(1);
            r = r1;
        } else {
            followed.push(0);
        }
    }

    Ok(BranchReport {
        x,
        beta: b,
        horizon,
        allowed,
        followed,
        first_branch,
        unique_up_to: first_branch.unwrap_or(horizon),
    })
}

/// min over 1 <= k <= len of β^k (β-1) (x - value(prefix_k)) for an
/// explicit digit word, without any uniqueness check. The remainder is
/// tracked in the scaled form R_k = β R_{k-1} - ε_k, which keeps the
/// computation exact for dyadic-friendly bases. For a genuine expansion
/// prefix chain of x the result lies in [0, 1].
pub fn kappa_from_digits(x: f64, beta: &BaseValue, digits: &[u8]) -> Result<f64> {
    if digits.is_empty() {
        return Err(Error::domain("kappa needs at least one digit"));
    }
    if digits.iter().any(|&d| d > 1) {
        return Err(Error::domain("digits must be 0 or 1"));
    }
    let b = beta.value();
    let mut scaled_remainder = x;
    let mut min_kappa = f64::INFINITY;
    for &d in digits {
        scaled_remainder = b * scaled_remainder - d as f64;
        let kappa = (b - 1.0) * scaled_remainder;
        if kappa < min_kappa {
            min_kappa = kappa;
        }
    }
    Ok(min_kappa)
}

/// Finite-stage lower-bound diagnostic for the approximation constant of a
/// point whose expansion is unique to the horizon. Errors with a state
/// error when branching appears first. Scaled remainders amplify roundoff
/// by β per step, so very large horizons dilute the digits' meaning.
pub fn kappa_lower_bound(
    x: f64,
    beta: &BaseValue,
    horizon: u32,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let profile = branching_profile(x, beta, horizon, tol)?;
    if let Some(depth) = profile.first_branch {
        return Err(Error::state(format!(
            "expansion of x = {x} branches at depth {depth}; kappa needs uniqueness to the horizon"
        )));
    }
    let raw = kappa_from_digits(x, beta, &profile.followed)?;
    Ok(raw.clamp(0.0, 1.0))
}

struct PrefixTree {
    x: f64,
    powers: Vec<f64>,
    tails: Vec<f64>,
    slack: f64,
}

impl PrefixTree {
    fn new(x: f64, b: f64, depth: u32, slack: f64) -> Self {
        let mut powers = Vec::with_capacity(depth as usize);
        let mut power = 1.0;
        for _ in 0..depth {
            power /= b;
            powers.push(power);
        }
        let tails = powers.iter().map(|p| p / (b - 1.0)).collect();
        PrefixTree {
            x,
            powers,
            tails,
            slack,
        }
    }

    fn extendable(&self, depth: usize, value: f64) -> bool {
        let d = self.x - value;
        d >= -self.slack && d <= self.tails[depth - 1] + self.slack
    }

    /// Fills best[d] with the maximum value over extendable depth-d
    /// prefixes. Extendability is inherited upward (a prefix's window is
    /// contained in every ancestor's window), so pruning loses nothing.
    fn best_per_depth(&self, max_depth: usize) -> Vec<f64> {
        let mut best = vec![f64::NEG_INFINITY; max_depth + 1];
        best[0] = 0.0;
        let mut stack: Vec<(usize, f64)> = vec![(0, 0.0)];
        while let Some((depth, value)) = stack.pop() {
            if depth == max_depth {
                continue;
            }
            let next = depth + 1;
            for digit in [0.0, 1.0] {
                let v = value + digit * self.powers[depth];
                if self.extendable(next, v) {
                    if v > best[next] {
                        best[next] = v;
                    }
                    stack.push((next, v));
                }
            }
        }
        best
    }
}

/// Maximum of value(p) over all extendable n-prefixes p of x, i.e. x minus
/// the smallest achievable n-th remainder.
pub fn best_prefix_value(
    x: f64,
    beta: &BaseValue,
    n: u32,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let b = beta.value();
    check_admissible(x, b, tol)?;
    if n == 0 {
        return Ok(0.0);
    }
    let tree = PrefixTree::new(x, b, n, tol.measure_tol);
    let best = tree.best_per_depth(n as usize);
    let v = best[n as usize];
    if v == f64::NEG_INFINITY {
        return Err(Error::state(format!(
            "no extendable prefix of depth {n} for x = {x}"
        )));
    }
    Ok(v)
}

/// Outcome of the optimal-chain search.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalityReport {
    pub x: f64,
    pub beta: f64,
    pub horizon: u32,
    /// A digit word whose every prefix attains the per-depth best value,
    /// when one exists to the horizon.
    pub chain: Option<Vec<u8>>,
    /// First depth where no prefix can stay best, when the chain breaks.
    pub failure_depth: Option<u32>,
    /// best_values[d-1] is the best extendable prefix value at depth d.
    pub best_values: Vec<f64>,
}

/// Searches for a single digit word whose every depth-d prefix attains the
/// best extendable prefix value at depth d.
///
/// The frontier holds all value-tied optimal prefixes per depth (ties
/// within measure_tol); the chain exists iff the frontier survives to the
/// horizon. A depth-d best prefix need not extend a depth-(d-1) best
/// prefix, which is exactly how the search fails at bases without the
/// multinacci collision identities.
pub fn optimal_chain_search(
    x: f64,
    beta: &BaseValue,
    horizon: u32,
    tol: &ToleranceConfig,
) -> Result<OptimalityReport> {
    if horizon == 0 {
        return Err(Error::domain("chain search requires horizon >= 1"));
    }
    if horizon > OPTIMAL_CHAIN_MAX_HORIZON {
        return Err(Error::resource(format!(
            "chain search horizon {horizon} exceeds the cap {OPTIMAL_CHAIN_MAX_HORIZON}"
        )));
    }
    let b = beta.value();
    check_admissible(x, b, tol)?;

    let tree = PrefixTree::new(x, b, horizon, tol.measure_tol);
    let best = tree.best_per_depth(horizon as usize);
    let best_values: Vec<f64> = best[1..].to_vec();

    let mut frontier: Vec<(f64, Vec<u8>)> = vec![(0.0, Vec::new())];
    let mut failure_depth = None;
    for depth in 1..=horizon as usize {
        if best[depth] == f64::NEG_INFINITY {
            failure_depth = Some(depth as u32);
            break;
        }
        let mut next: Vec<(f64, Vec<u8>)> = Vec::new();
        for (value, word) in &frontier {
            for digit in [1u8, 0u8] {
                let v = value + digit as f64 * tree.powers[depth - 1];
                if tree.extendable(depth, v) && v >= best[depth] - tol.measure_tol {
                    let mut w = word.clone();
                    w.push(digit);
                    next.push((v, w));
                }
            }
        }
        if next.is_empty() {
            failure_depth = Some(depth as u32);
            break;
        }
        frontier = next;
    }

    let chain = if failure_depth.is_none() {
        Some(frontier.swap_remove(0).1)
    } else {
        None
    };

    Ok(OptimalityReport {
        x,
        beta: b,
        horizon,
        chain,
        failure_depth,
        best_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> BaseValue {
        BaseValue::new((1.0 + 5.0_f64.sqrt()) / 2.0).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn greedy_of_one_at_golden() {
        let d = greedy_expand(1.0, &golden(), 4, &tol()).unwrap();
        assert_eq!(d.digits(), &[1, 1, 0, 0]);
        assert!((d.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lazy_of_one_at_golden() {
        let d = lazy_expand(1.0, &golden(), 4, &tol()).unwrap();
        assert_eq!(d.digits(), &[0, 1, 1, 1]);
    }

    #[test]
    fn zero_expands_to_zeros_endpoint_to_ones() {
        let b = BaseValue::new(1.7).unwrap();
        let zeros = greedy_expand(0.0, &b, 6, &tol()).unwrap();
        assert_eq!(zeros.digits(), &[0; 6]);
        let ones = greedy_expand(b.domain_max(), &b, 6, &tol()).unwrap();
        assert_eq!(ones.digits(), &[1; 6]);
    }

    #[test]
    fn remainders_stay_in_window() {
        let b = BaseValue::new(1.83).unwrap();
        let x = 0.91;
        for d in [greedy_expand(x, &b, 25, &tol()).unwrap(), lazy_expand(x, &b, 25, &tol()).unwrap()] {
            for k in 1..=25usize {
                let r = x - d.prefix_value(k);
                let tail = 1.83_f64.powi(-(k as i32)) / 0.83;
                assert!(r >= -1e-9 && r <= tail + 1e-9, "k = {k}, r = {r}");
            }
        }
    }

    #[test]
    fn inadmissible_points_rejected() {
        let b = BaseValue::new(1.5).unwrap();
        assert!(greedy_expand(-0.1, &b, 4, &tol()).is_err());
        assert!(greedy_expand(2.1, &b, 4, &tol()).is_err());
        assert!(lazy_expand(2.0000001, &b, 4, &tol()).is_err());
    }

    #[test]
    fn extendability_examples() {
        assert!(is_extendable_prefix(1.0, &[1, 0], &golden(), &tol()).unwrap());
        let b = BaseValue::new(1.9).unwrap();
        assert!(!is_extendable_prefix(1.0, &[0, 0], &b, &tol()).unwrap());
    }

    #[test]
    fn extendability_matches_direct_window() {
        let b = BaseValue::new(1.62).unwrap();
        let x = 0.83;
        for word in 0u32..32 {
            let prefix: Vec<u8> = (0..5).map(|i| ((word >> i) & 1) as u8).collect();
            let mut v = 0.0;
            for (i, &d) in prefix.iter().enumerate() {
                v += d as f64 * 1.62_f64.powi(-(i as i32 + 1));
            }
            let r = x - v;
            let direct = r >= -1e-9 && r <= 1.62_f64.powi(-5) / 0.62 + 1e-9;
            assert_eq!(
                is_extendable_prefix(x, &prefix, &b, &tol()).unwrap(),
                direct,
                "word {word:05b}"
            );
        }
    }

    #[test]
    fn branching_at_half_under_golden_threshold() {
        // At β = 1.5 digit 1 first becomes feasible for x = 0.5 at depth 2,
        // where digit 0 also stays extendable.
        let b = BaseValue::new(1.5).unwrap();
        let report = branching_profile(0.5, &b, 40, &tol()).unwrap();
        assert_eq!(report.first_branch, Some(2));
        assert_eq!(report.unique_up_to, 2);
        assert!(!report.is_unique_to_horizon());
        for (a0, a1) in &report.allowed {
            assert!(*a0 || *a1);
        }
    }

    #[test]
    fn profile_rejects_endpoints() {
        let b = BaseValue::new(1.5).unwrap();
        assert!(branching_profile(0.0, &b, 10, &tol()).is_err());
        assert!(branching_profile(2.0, &b, 10, &tol()).is_err());
        assert!(branching_profile(1.0, &b, 10, &tol()).is_ok());
    }

    #[test]
    fn kappa_exact_one_for_endpoint_tail() {
        // 1/(β-1) is exactly representable for these bases, and the scaled
        // recursion stays on integers, so the geometric tail identity is
        // exact in floating point.
        for beta in [1.5, 1.25, 1.0625] {
            let b = BaseValue::new(beta).unwrap();
            let x = b.domain_max();
            let digits = vec![1u8; 60];
            let kappa = kappa_from_digits(x, &b, &digits).unwrap();
            assert_eq!(kappa, 1.0, "beta = {beta}");
        }
    }

    #[test]
    fn kappa_requires_uniqueness() {
        let b = BaseValue::new(1.5).unwrap();
        match kappa_lower_bound(0.5, &b, 40, &tol()) {
            Err(Error::State(_)) => {}
            other => panic!("expected state error, got {other:?}"),
        }
    }

    #[test]
    fn kappa_rejects_empty_or_bad_digits() {
        let b = BaseValue::new(1.5).unwrap();
        assert!(kappa_from_digits(1.0, &b, &[]).is_err());
        assert!(kappa_from_digits(1.0, &b, &[2]).is_err());
    }

    #[test]
    fn best_prefix_of_one_at_golden() {
        let v = best_prefix_value(1.0, &golden(), 2, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_is_not_always_best() {
        // At β = 1.8, x = 0.6 the greedy depth-4 prefix (1,0,0,0) is beaten
        // by (0,1,1,1): the catch-up sum β^{-2}+β^{-3}+β^{-4} exceeds
        // β^{-1} and both prefixes are extendable. This is the mechanism
        // that starves the optimal-chain frontier away from multinacci
        // bases.
        let b = BaseValue::new(1.8).unwrap();
        let greedy = greedy_expand(0.6, &b, 4, &tol()).unwrap();
        assert_eq!(greedy.digits(), &[1, 0, 0, 0]);
        let best = best_prefix_value(0.6, &b, 4, &tol()).unwrap();
        let alt: f64 = (2..=4).map(|i| 1.8_f64.powi(-i)).sum();
        assert!((best - alt).abs() < 1e-12);
        assert!(best > greedy.value() + 0.01);
    }

    #[test]
    fn best_dominates_greedy() {
        let b = BaseValue::new(1.71).unwrap();
        for x in [0.2, 0.7, 1.1, 1.4] {
            let greedy = greedy_expand(x, &b, 8, &tol()).unwrap();
            for n in 1..=8usize {
                let best = best_prefix_value(x, &b, n as u32, &tol()).unwrap();
                assert!(best >= greedy.prefix_value(n) - 1e-12);
            }
        }
    }

    #[test]
    fn chain_exists_at_golden() {
        let report = optimal_chain_search(0.37, &golden(), 12, &tol()).unwrap();
        assert!(report.failure_depth.is_none());
        let chain = DigitSequence::new(&golden(), report.chain.unwrap()).unwrap();
        for d in 1..=12usize {
            assert!(
                (chain.prefix_value(d) - report.best_values[d - 1]).abs() <= 1e-9,
                "depth {d}"
            );
        }
    }

    #[test]
    fn chain_fails_at_non_multinacci_base() {
        // Continues the greedy_is_not_always_best example: the depth-4 best
        // prefix (0,1,1,1) does not extend the unique depth-3 best (1,0,0).
        let b = BaseValue::new(1.8).unwrap();
        let report = optimal_chain_search(0.6, &b, 6, &tol()).unwrap();
        assert_eq!(report.failure_depth, Some(4));
        assert!(report.chain.is_none());
    }

    #[test]
    fn chain_horizon_cap() {
        assert!(matches!(
            optimal_chain_search(0.37, &golden(), 21, &tol()),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn digit_sequence_validation() {
        let b = BaseValue::new(1.5).unwrap();
        assert!(DigitSequence::new(&b, vec![0, 1, 2]).is_err());
        let d = DigitSequence::new(&b, vec![1, 0, 1]).unwrap();
        let expected = 1.0 / 1.5 + 1.5_f64.powi(-3);
        assert!((d.value() - expected).abs() < 1e-15);
    }
}
