//! Closed-form oracles for the incentive and accuracy analysis.
//!
//! Everything here is pure mathematics with no simulation state:
//!
//! * verifier utilities and the `2·p_T > c` honest-equilibrium condition,
//! * the binomial probability that a true proposition is decided True,
//! * the hypergeometric probability that a Sybil coalition captures a
//!   verifier-committee majority,
//! * expected True-decision curves under a coalition of a given size,
//!   composing the two distributions above.
//!
//! Binomial coefficients are computed in exact big-integer arithmetic and
//! probabilities in exact rational arithmetic (every finite `f64` input is a
//! dyadic rational), converting to `f64` only at the end. This keeps the
//! oracles bit-stable across platforms and trustworthy as test references.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Analysis input outside its mathematical domain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("search cost must be positive, got {0}")]
    NonPositiveCost(f64),
    #[error("need at least one verifier")]
    NoVerifiers,
    #[error("cannot draw {draws} verifiers from {population} nodes")]
    DrawsExceedPopulation { draws: u32, population: u32 },
    #[error("{dishonest} dishonest nodes exceed the population {population}")]
    DishonestExceedPopulation { dishonest: u32, population: u32 },
}

fn check_probability(name: &'static str, value: f64) -> Result<f64, AnalysisError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(AnalysisError::ProbabilityOutOfRange { name, value })
    }
}

/// A single verifier's expected utilities when a fraction `p_t` of
/// propositions is True and one proof search costs `c` points.
///
/// The three pure strategies: skip the search and vote False
/// (`u_no_search`), search but vote False anyway (`u_search_false`), and
/// search then vote what the search found (`u_search_true`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityProfile {
    pub p_t: f64,
    pub c: f64,
    pub u_no_search: f64,
    pub u_search_false: f64,
    pub u_search_true: f64,
}

impl UtilityProfile {
    /// Expected utility of searching with probability `x` (and otherwise
    /// voting False without searching): `x·(2·p_t − c) − p_t`.
    pub fn mixed(&self, x: f64) -> Result<f64, AnalysisError> {
        mixed_strategy_utility(x, self.p_t, self.c)
    }
}

/// Computes the three pure-strategy utilities `(−p_t, −p_t − c, p_t − c)`.
///
/// Voting False after paying for the search is always dominated by not
/// searching, by exactly the search cost.
pub fn expected_utilities(p_t: f64, c: f64) -> Result<UtilityProfile, AnalysisError> {
    check_probability("p_T", p_t)?;
    if c <= 0.0 || c.is_nan() {
        return Err(AnalysisError::NonPositiveCost(c));
    }
    Ok(UtilityProfile {
        p_t,
        c,
        u_no_search: -p_t,
        u_search_false: -p_t - c,
        u_search_true: p_t - c,
    })
}

/// Expected utility `x·(2·p_t − c) − p_t` of the mixed strategy that
/// searches with probability `x`. Linear in `x`, so the optimum is at `x = 1`
/// exactly when `2·p_t > c`.
pub fn mixed_strategy_utility(x: f64, p_t: f64, c: f64) -> Result<f64, AnalysisError> {
    check_probability("x", x)?;
    check_probability("p_T", p_t)?;
    if c <= 0.0 || c.is_nan() {
        return Err(AnalysisError::NonPositiveCost(c));
    }
    Ok(x * (2.0 * p_t - c) - p_t)
}

/// Whether honest verification is the best response to everyone else being
/// honest: `2·p_T > c`.
pub fn honest_equilibrium_holds(p_t: f64, c: f64) -> bool {
    2.0 * p_t > c
}

/// Exact binomial coefficient C(n, k); zero when `k > n`.
pub fn binomial_coefficient(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // Multiply before dividing: each prefix product is divisible by i!.
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// P(X ≥ k) for X ~ Binomial(n, h), by exact rational tail summation.
/// Returns 1 for `k = 0` and 0 for `k > n`.
pub fn binomial_tail(n: u32, h: f64, k: u32) -> f64 {
    assert!((0.0..=1.0).contains(&h), "h must lie in [0, 1]");
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let hr = BigRational::from_float(h).expect("h is finite");
    let om = BigRational::one() - &hr;
    // h^j and (1−h)^j for j = 0..=n, built incrementally.
    let mut hp = Vec::with_capacity(n as usize + 1);
    let mut op = Vec::with_capacity(n as usize + 1);
    hp.push(BigRational::one());
    op.push(BigRational::one());
    for j in 1..=n as usize {
        hp.push(&hp[j - 1] * &hr);
        op.push(&op[j - 1] * &om);
    }
    let mut tail = BigRational::zero();
    for j in k..=n {
        let coeff = BigInt::from(binomial_coefficient(n as u64, j as u64));
        tail += BigRational::from_integer(coeff) * &hp[j as usize] * &op[(n - j) as usize];
    }
    tail.to_f64().expect("probability fits in f64")
}

/// Votes required for a True decision on a committee of `n`: a strict
/// majority for odd `n`, and exactly half for even `n` (the submitter's
/// implicit True vote breaks ties).
pub fn true_decision_threshold(n: u32) -> u32 {
    n.div_ceil(2)
}

/// Probability that a committee of `n` independent Bernoulli(`h`) honest
/// voters decides a true proposition True (tie goes to True).
pub fn decision_probability(n: u32, h: f64) -> f64 {
    assert!(n >= 1, "need at least one verifier");
    binomial_tail(n, h, true_decision_threshold(n))
}

/// Parameters of a Sybil-capture question: `dishonest_nodes` corrupted nodes
/// hidden in a population of `total_nodes`, committees of `num_verifiers`,
/// captured when at least `majority_threshold` corrupted members are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SybilSetting {
    pub total_nodes: u32,
    pub dishonest_nodes: u32,
    pub num_verifiers: u32,
    pub majority_threshold: u32,
}

impl SybilSetting {
    /// Builds a setting with the natural capture threshold: enough False
    /// votes to outnumber the rest past the tie-break, `n/2 + 1` seats for
    /// even `n` and `(n+1)/2` for odd `n`.
    pub fn new(
        total_nodes: u32,
        dishonest_nodes: u32,
        num_verifiers: u32,
    ) -> Result<Self, AnalysisError> {
        if num_verifiers == 0 {
            return Err(AnalysisError::NoVerifiers);
        }
        if num_verifiers > total_nodes {
            return Err(AnalysisError::DrawsExceedPopulation {
                draws: num_verifiers,
                population: total_nodes,
            });
        }
        if dishonest_nodes > total_nodes {
            return Err(AnalysisError::DishonestExceedPopulation {
                dishonest: dishonest_nodes,
                population: total_nodes,
            });
        }
        Ok(SybilSetting {
            total_nodes,
            dishonest_nodes,
            num_verifiers,
            majority_threshold: num_verifiers / 2 + 1,
        })
    }

    pub fn with_majority_threshold(mut self, k: u32) -> Self {
        self.majority_threshold = k;
        self
    }
}

/// Exact hypergeometric PMF: probability of observing `observed` successes
/// when drawing `draws` without replacement from a population of
/// `population` containing `successes` successes. Zero outside the support.
pub fn hypergeometric_pmf(population: u32, successes: u32, draws: u32, observed: u32) -> f64 {
    assert!(successes <= population && draws <= population);
    if observed > draws
        || observed > successes
        || draws - observed > population - successes
    {
        return 0.0;
    }
    let num = binomial_coefficient(successes as u64, observed as u64)
        * binomial_coefficient((population - successes) as u64, (draws - observed) as u64);
    let den = binomial_coefficient(population as u64, draws as u64);
    BigRational::new(num.into(), den.into())
        .to_f64()
        .expect("probability fits in f64")
}

/// Probability that a uniformly drawn committee contains at least
/// `majority_threshold` coalition members: the exact hypergeometric tail
/// Σ_{j=k} C(D,j)·C(N−D,n−j) / C(N,n).
pub fn sybil_majority_probability(setting: &SybilSetting) -> f64 {
    let (pop, d, n, k) = (
        setting.total_nodes,
        setting.dishonest_nodes,
        setting.num_verifiers,
        setting.majority_threshold,
    );
    if k > n.min(d) {
        return 0.0;
    }
    let mut num = BigUint::zero();
    for j in k..=n.min(d) {
        if n - j > pop - d {
            continue;
        }
        num += binomial_coefficient(d as u64, j as u64)
            * binomial_coefficient((pop - d) as u64, (n - j) as u64);
    }
    let den = binomial_coefficient(pop as u64, n as u64);
    BigRational::new(num.into(), den.into())
        .to_f64()
        .expect("probability fits in f64")
}

/// Expected True-decision rate for true propositions, as a function of the
/// corrupted-population fraction.
///
/// For each fraction `f`, a coalition of `round(f·total_nodes)` nodes always
/// votes False while uncorrupted verifiers vote True independently with
/// probability `unhr` (the uncorrupted-node honesty rate). The committee's
/// coalition count is hypergeometric; conditioned on `j` coalition seats,
/// the proposition is decided True when the Binomial(n−j, unhr) honest True
/// votes still reach the tie-break threshold. Returns `(fraction, rate)`
/// pairs in input order.
pub fn expected_attack_curve(
    total_nodes: u32,
    num_verifiers: u32,
    unhr: f64,
    fractions: &[f64],
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if num_verifiers == 0 {
        return Err(AnalysisError::NoVerifiers);
    }
    if num_verifiers > total_nodes {
        return Err(AnalysisError::DrawsExceedPopulation {
            draws: num_verifiers,
            population: total_nodes,
        });
    }
    check_probability("unhr", unhr)?;
    for &f in fractions {
        check_probability("corrupted fraction", f)?;
    }
    let n = num_verifiers;
    let t = true_decision_threshold(n);
    let curve = fractions
        .iter()
        .map(|&f| {
            let d = ((f * total_nodes as f64).round() as u32).min(total_nodes);
            let mut rate = 0.0;
            for j in 0..=n.min(d) {
                let seats = hypergeometric_pmf(total_nodes, d, n, j);
                if seats > 0.0 {
                    rate += seats * binomial_tail(n - j, unhr, t);
                }
            }
            (f, rate)
        })
        .collect();
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Binomial, DiscreteCDF};

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} (±{tol})"
        );
    }

    #[test]
    fn pure_strategy_utilities_match_direct_substitution() {
        let u = expected_utilities(1.0, 0.5).unwrap();
        assert_eq!(
            (u.u_no_search, u.u_search_false, u.u_search_true),
            (-1.0, -1.5, 0.5)
        );
        let u = expected_utilities(0.0, 0.3).unwrap();
        assert_eq!(
            (u.u_no_search, u.u_search_false, u.u_search_true),
            (0.0, -0.3, -0.3)
        );
    }

    #[test]
    fn searching_without_using_the_result_is_dominated_by_exactly_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p_t = rng.gen::<f64>();
            let c = rng.gen::<f64>() * 2.0 + 1e-9;
            let u = expected_utilities(p_t, c).unwrap();
            assert!(u.u_search_false < u.u_no_search);
            assert_close(
                u.u_no_search - u.u_search_false,
                c,
                1e-12,
                "dominance gap",
            );
        }
    }

    #[test]
    fn utility_domain_is_enforced() {
        assert!(matches!(
            expected_utilities(1.5, 0.1),
            Err(AnalysisError::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            expected_utilities(0.5, 0.0),
            Err(AnalysisError::NonPositiveCost(_))
        ));
        assert!(matches!(
            mixed_strategy_utility(-0.1, 0.5, 0.1),
            Err(AnalysisError::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn mixed_strategy_utility_matches_hand_computed_points() {
        assert_eq!(mixed_strategy_utility(0.0, 0.7, 0.2).unwrap(), -0.7);
        assert_close(
            mixed_strategy_utility(1.0, 0.6, 0.1).unwrap(),
            0.5,
            1e-12,
            "x=1, p_T=0.6, c=0.1",
        );
    }

    #[test]
    fn mixed_strategy_slope_is_two_p_t_minus_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let p_t = rng.gen::<f64>();
            let c = rng.gen::<f64>() * 2.0 + 1e-9;
            let gap = mixed_strategy_utility(1.0, p_t, c).unwrap()
                - mixed_strategy_utility(0.0, p_t, c).unwrap();
            assert_close(gap, 2.0 * p_t - c, 1e-12, "u(1) − u(0)");
        }
    }

    #[test]
    fn equilibrium_condition_is_a_strict_inequality() {
        assert!(honest_equilibrium_holds(0.5, 0.9));
        assert!(!honest_equilibrium_holds(0.05, 0.2));
        assert!(honest_equilibrium_holds(0.01, 1e-9), "vanishing cost");
        assert!(!honest_equilibrium_holds(0.5, 1.0), "2p_T = c is not enough");
    }

    #[test]
    fn binomial_coefficients_are_exact() {
        assert_eq!(binomial_coefficient(0, 0), BigUint::one());
        assert_eq!(binomial_coefficient(5, 2), BigUint::from(10u32));
        assert_eq!(binomial_coefficient(14, 7), BigUint::from(3432u32));
        assert_eq!(binomial_coefficient(3, 5), BigUint::zero());
        assert_eq!(
            binomial_coefficient(200, 14),
            "1179791641436990551200".parse().unwrap()
        );
        // Pascal's rule across a band of the triangle.
        for n in 1..=60u64 {
            for k in 1..=n {
                assert_eq!(
                    binomial_coefficient(n, k),
                    binomial_coefficient(n - 1, k - 1) + binomial_coefficient(n - 1, k)
                );
            }
        }
    }

    #[test]
    fn hypergeometric_pmf_sums_to_one() {
        // Vandermonde: Σ_j C(D,j)·C(N−D,n−j) = C(N,n), checked in exact
        // integer arithmetic across the population sizes the tests sweep.
        let check = |n_pop: u64, d: u64, draws: u64| {
            let mut sum = BigUint::zero();
            for j in 0..=draws.min(d) {
                if draws - j > n_pop - d {
                    continue;
                }
                sum += binomial_coefficient(d, j)
                    * binomial_coefficient(n_pop - d, draws - j);
            }
            assert_eq!(sum, binomial_coefficient(n_pop, draws), "N={n_pop} D={d} n={draws}");
        };
        for n_pop in 1..=100u64 {
            for d in 0..=n_pop {
                for draws in 1..=20.min(n_pop) {
                    check(n_pop, d, draws);
                }
            }
        }
        for &n_pop in &[200u64, 300] {
            for d in (0..=n_pop).step_by(7) {
                for draws in 1..=20 {
                    check(n_pop, d, draws);
                }
            }
        }
    }

    #[test]
    fn single_verifier_decision_probability_is_the_honesty_rate() {
        assert_eq!(decision_probability(1, 0.85), 0.85);
        assert_eq!(decision_probability(1, 0.0), 0.0);
        assert_eq!(decision_probability(1, 1.0), 1.0);
    }

    #[test]
    fn two_verifier_decision_needs_only_one_true_vote() {
        // Tie at 1–1 goes True, so failure needs both wrong: 1 − 0.15².
        assert_close(decision_probability(2, 0.85), 0.9775, 1e-12, "n=2");
    }

    #[test]
    fn decision_probability_matches_frozen_reference_values() {
        for (n, h, expected) in [
            (13, 0.85, 0.998732452698),
            (14, 0.85, 0.999672367690),
            (20, 0.85, 0.999961367252),
            (13, 0.80, 0.992996438835),
            (14, 0.80, 0.997602791260),
            (20, 0.80, 0.999436586302),
            (5, 0.80, 0.942080000000),
            (6, 0.80, 0.983040000000),
            (14, 0.50, 0.604736328125),
        ] {
            assert_close(
                decision_probability(n, h),
                expected,
                1e-9,
                &format!("n={n}, h={h}"),
            );
        }
    }

    #[test]
    fn decision_probability_agrees_with_a_library_binomial() {
        for n in 1..=20u32 {
            for &h in &[0.3, 0.5, 0.8, 0.85, 0.99] {
                let t = true_decision_threshold(n);
                let reference = Binomial::new(h, n as u64).unwrap().sf(t as u64 - 1);
                assert_close(
                    decision_probability(n, h),
                    reference,
                    1e-10,
                    &format!("n={n}, h={h}"),
                );
            }
        }
    }

    #[test]
    fn adding_the_tie_breaking_seat_raises_accuracy() {
        for &h in &[0.6, 0.8, 0.85, 0.95] {
            for odd in [3u32, 5, 7, 9, 13, 19] {
                assert!(
                    decision_probability(odd + 1, h) > decision_probability(odd, h),
                    "even n = {} should beat odd n = {odd} at h = {h}",
                    odd + 1
                );
            }
        }
    }

    #[test]
    fn decision_probability_is_monotone_in_honesty() {
        for n in [1u32, 2, 13, 14, 20] {
            let mut prev = 0.0;
            for i in 0..=100 {
                let p = decision_probability(n, i as f64 / 100.0);
                assert!(p >= prev, "n={n}: dipped at h={}", i as f64 / 100.0);
                prev = p;
            }
            assert_eq!(prev, 1.0);
        }
    }

    #[test]
    fn committee_capture_probability_matches_frozen_reference() {
        // 66 coalition nodes in 200; 8 of 14 seats force a False majority.
        let setting = SybilSetting::new(200, 66, 14).unwrap();
        assert_eq!(setting.majority_threshold, 8);
        let p = sybil_majority_probability(&setting);
        assert_close(p, 0.04811165617173305, 1e-12, "capture probability");
        assert!((0.045..=0.055).contains(&p));
    }

    #[test]
    fn capture_is_impossible_without_coalition_and_certain_with_everyone() {
        let none = SybilSetting::new(200, 0, 14).unwrap();
        assert_eq!(sybil_majority_probability(&none), 0.0);
        let all = SybilSetting::new(200, 200, 14).unwrap();
        assert_eq!(sybil_majority_probability(&all), 1.0);
    }

    #[test]
    fn capture_probability_is_monotone_in_coalition_size() {
        let mut prev = 0.0;
        for d in 0..=200 {
            let p = sybil_majority_probability(&SybilSetting::new(200, d, 14).unwrap());
            assert!(p >= prev, "dipped at D={d}");
            prev = p;
        }
    }

    #[test]
    fn default_capture_threshold_handles_even_and_odd_committees() {
        assert_eq!(SybilSetting::new(200, 50, 14).unwrap().majority_threshold, 8);
        assert_eq!(SybilSetting::new(200, 50, 13).unwrap().majority_threshold, 7);
        let custom = SybilSetting::new(200, 50, 14).unwrap().with_majority_threshold(10);
        assert!(
            sybil_majority_probability(&custom)
                < sybil_majority_probability(&SybilSetting::new(200, 50, 14).unwrap())
        );
    }

    #[test]
    fn sybil_setting_rejects_impossible_populations() {
        assert!(SybilSetting::new(10, 11, 3).is_err());
        assert!(SybilSetting::new(10, 5, 11).is_err());
        assert!(SybilSetting::new(10, 5, 0).is_err());
    }

    #[test]
    fn attack_curve_reduces_to_the_binomial_case_without_corruption() {
        let curve = expected_attack_curve(200, 14, 0.85, &[0.0]).unwrap();
        assert_eq!(curve[0].1, decision_probability(14, 0.85));
    }

    #[test]
    fn attack_curve_reaches_zero_under_full_corruption() {
        let curve = expected_attack_curve(200, 14, 1.0, &[1.0]).unwrap();
        assert_eq!(curve[0].1, 0.0);
    }

    #[test]
    fn attack_curve_matches_frozen_reference_values() {
        let curve =
            expected_attack_curve(200, 14, 1.0, &[0.5, 0.8]).unwrap();
        assert_close(curve[0].1, 0.608596295, 1e-9, "unhr=1.0, f=0.5");
        assert!(curve[0].1 > 0.5, "half-corrupted still decides over half");
        assert_close(curve[1].1, 0.008959790, 1e-9, "unhr=1.0, f=0.8");
        let lossy = expected_attack_curve(200, 14, 0.85, &[0.75]).unwrap();
        assert_close(lossy[0].1, 0.013523396, 1e-9, "unhr=0.85, f=0.75");
    }

    #[test]
    fn attack_curve_is_monotone_decreasing_in_corruption() {
        let fractions: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let curve = expected_attack_curve(200, 14, 0.85, &fractions).unwrap();
        for pair in curve.windows(2) {
            assert!(
                pair[1].1 <= pair[0].1 + 1e-12,
                "rate rose from f={} to f={}",
                pair[0].0,
                pair[1].0
            );
        }
    }

    #[test]
    fn attack_curve_validates_its_domain() {
        assert!(expected_attack_curve(10, 11, 0.85, &[0.0]).is_err());
        assert!(expected_attack_curve(200, 14, 1.5, &[0.0]).is_err());
        assert!(expected_attack_curve(200, 14, 0.85, &[-0.1]).is_err());
    }

    #[test]
    fn binomial_tail_edges() {
        assert_eq!(binomial_tail(14, 0.85, 0), 1.0);
        assert_eq!(binomial_tail(14, 0.85, 15), 0.0);
        assert_eq!(binomial_tail(14, 0.0, 1), 0.0);
        assert_eq!(binomial_tail(14, 1.0, 14), 1.0);
    }
}
