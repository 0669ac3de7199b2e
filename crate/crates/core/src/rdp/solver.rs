use super::{RdpError, RdpPoint, RdpProblem, RdpState, SolverConfig, MARGINAL_FLOOR, MAX_EXPONENT};
use crate::info::{
    mutual_information, ConditionalDistribution, DiscreteDistribution, JointDistribution,
};

/// Optimal conditional for a fixed output marginal:
///
/// `q(x̂|x) = r(x̂) exp(mu p(x) / r(x̂) - alpha (x - x̂)^2) / gamma(x)`
///
/// with `gamma(x)` the row normaliser. Exponents are shifted by the row max
/// before exponentiation.
pub fn update_conditional(
    problem: &RdpProblem,
    marginal: &DiscreteDistribution,
) -> Result<ConditionalDistribution, RdpError> {
    let recon = problem.reconstruction();
    let r = marginal.probs();
    if r.len() != recon.len() {
        return Err(RdpError::ShapeMismatch {
            expected: recon.len(),
            got: r.len(),
        });
    }
    if let Some((index, &value)) = r.iter().enumerate().find(|(_, &v)| !(v > MARGINAL_FLOOR)) {
        return Err(RdpError::ZeroMarginal { index, value });
    }

    let source = problem.source();
    let (alpha, mu) = (problem.alpha(), problem.mu());
    let m = recon.len();
    let mut data = Vec::with_capacity(source.len() * m);
    let mut exponents = vec![0.0; m];

    for (index, (&x, &px)) in source.alphabet().iter().zip(source.probs()).enumerate() {
        for ((e, &xh), &rv) in exponents.iter_mut().zip(recon).zip(r) {
            let d = x - xh;
            *e = mu * px / rv - alpha * d * d;
        }
        let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(RdpError::NumericOverflow { index });
        }
        let row_start = data.len();
        let mut norm = 0.0;
        for (&e, &rv) in exponents.iter().zip(r) {
            let shifted = e - shift;
            if shifted > MAX_EXPONENT {
                return Err(RdpError::NumericOverflow { index });
            }
            let w = rv * shifted.exp();
            norm += w;
            data.push(w);
        }
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(RdpError::NumericOverflow { index });
        }
        data[row_start..].iter_mut().for_each(|w| *w /= norm);
    }

    Ok(ConditionalDistribution::from_normalized(
        source.alphabet().to_vec(),
        recon.to_vec(),
        data,
    ))
}

/// Optimal output marginal for a fixed conditional, `r(x̂) = sum_x p(x) q(x̂|x)`.
pub fn update_marginal(
    source: &DiscreteDistribution,
    conditional: &ConditionalDistribution,
) -> Result<DiscreteDistribution, RdpError> {
    if conditional.n_inputs() != source.len() {
        return Err(RdpError::ShapeMismatch {
            expected: source.len(),
            got: conditional.n_inputs(),
        });
    }
    let mut r = vec![0.0; conditional.n_outputs()];
    for (&p, row) in source.probs().iter().zip(conditional.rows()) {
        r.iter_mut().zip(row).for_each(|(acc, &q)| *acc += p * q);
    }
    Ok(DiscreteDistribution::from_normalized(
        conditional.outputs().to_vec(),
        r,
    ))
}

fn sup_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn step(
    problem: &RdpProblem,
    marginal: &DiscreteDistribution,
) -> Result<(ConditionalDistribution, DiscreteDistribution), RdpError> {
    let q = update_conditional(problem, marginal)?;
    let r = update_marginal(problem.source(), &q)?;
    Ok((q, r))
}

/// Runs the alternating minimisation from a uniform output marginal and
/// returns the final iterate together with its operating point.
pub fn solve_with_state(
    problem: &RdpProblem,
    config: &SolverConfig,
) -> Result<(RdpState, RdpPoint), RdpError> {
    config.validate()?;
    let mut marginal = DiscreteDistribution::uniform(problem.reconstruction().to_vec())?;
    let mut conditional;
    let mut iteration = 0;
    let mut converged = false;
    loop {
        let (q, r) = step(problem, &marginal)?;
        iteration += 1;
        let delta = sup_norm(r.probs(), marginal.probs());
        conditional = q;
        marginal = r;
        if delta < config.tolerance {
            converged = true;
            break;
        }
        if iteration >= config.max_iterations {
            break;
        }
    }
    if !converged {
        log::debug!(
            "rdp solve stopped after {iteration} iterations without converging (alpha={}, mu={})",
            problem.alpha(),
            problem.mu()
        );
    }
    let state = RdpState {
        conditional,
        marginal,
        iteration,
    };
    let point = evaluate(problem, &state, converged)?;
    Ok((state, point))
}

pub fn solve(problem: &RdpProblem, config: &SolverConfig) -> Result<RdpPoint, RdpError> {
    solve_with_state(problem, config).map(|(_, point)| point)
}

/// Sup-norm change of the marginal after one more conditional + marginal
/// update from `state`. Near zero at a fixed point.
pub fn fixed_point_residual(problem: &RdpProblem, state: &RdpState) -> Result<f64, RdpError> {
    let (_, r) = step(problem, &state.marginal)?;
    Ok(sup_norm(r.probs(), state.marginal.probs()))
}

fn evaluate(problem: &RdpProblem, state: &RdpState, converged: bool) -> Result<RdpPoint, RdpError> {
    let source = problem.source();
    let joint = JointDistribution::from_source_and_channel(source, &state.conditional)?;
    let rate = mutual_information(&joint);

    let mut distortion = 0.0;
    for ((&x, &p), row) in source
        .alphabet()
        .iter()
        .zip(source.probs())
        .zip(state.conditional.rows())
    {
        for (&xh, &q) in problem.reconstruction().iter().zip(row) {
            distortion += p * q * (x - xh) * (x - xh);
        }
    }

    let mut perception = 0.0;
    for (&x, &p) in source.alphabet().iter().zip(source.probs()) {
        let r = state.marginal.prob_of(x);
        if r <= 0.0 {
            perception = f64::INFINITY;
            break;
        }
        perception += p * (p / r).log2();
    }

    Ok(RdpPoint {
        rate,
        distortion: distortion.max(0.0),
        perception: perception.max(0.0),
        alpha: problem.alpha(),
        mu: problem.mu(),
        iterations: state.iteration,
        converged,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn binary(p0: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(vec![0.0, 1.0], vec![p0, 1.0 - p0]).unwrap()
    }

    fn hb(d: f64) -> f64 {
        -d * d.log2() - (1.0 - d) * (1.0 - d).log2()
    }

    /// `sum p q log2(q / r)` for an arbitrary output distribution `r`.
    fn rate_against(source: &DiscreteDistribution, q: &ConditionalDistribution, r: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (&p, row) in source.probs().iter().zip(q.rows()) {
            for (&qv, &rv) in row.iter().zip(r) {
                if qv > 0.0 {
                    acc += p * qv * (qv / rv).log2();
                }
            }
        }
        acc
    }

    #[test]
    fn zero_multipliers_reproduce_the_marginal() {
        let src = DiscreteDistribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        let problem = RdpProblem::with_source_alphabet(src, 0.0, 0.0).unwrap();
        let r = DiscreteDistribution::from_probs(vec![0.1, 0.6, 0.3]).unwrap();
        let q = update_conditional(&problem, &r).unwrap();
        for row in q.rows() {
            for (a, b) in row.iter().zip(r.probs()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn large_alpha_concentrates_on_diagonal() {
        let src = DiscreteDistribution::new(vec![-1.0, 0.0, 2.0], vec![0.3, 0.3, 0.4]).unwrap();
        let problem = RdpProblem::with_source_alphabet(src, 1e4, 0.0).unwrap();
        let r = DiscreteDistribution::uniform(vec![-1.0, 0.0, 2.0]).unwrap();
        let q = update_conditional(&problem, &r).unwrap();
        for (i, row) in q.rows().enumerate() {
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j)
                .unwrap();
            assert_eq!(argmax, i);
            assert!(row[i] > 1.0 - 1e-12);
        }
    }

    #[test]
    fn two_by_two_conditional_matches_hand_evaluation() {
        let problem = RdpProblem::with_source_alphabet(binary(0.5), 1.0, 0.5).unwrap();
        let r = binary(0.5);
        let q = update_conditional(&problem, &r).unwrap();
        // e^{0.5} / (e^{0.5} + e^{-0.5}) = e / (e + 1)
        assert_abs_diff_eq!(q.get(0, 0), 0.731_058_578_630_004_9, epsilon = 1e-12);
        assert_abs_diff_eq!(q.get(1, 1), 0.731_058_578_630_004_9, epsilon = 1e-12);
        assert!(q.max_row_defect() <= 1e-12);
    }

    #[test]
    fn conditional_update_rejects_zero_marginal() {
        let problem = RdpProblem::with_source_alphabet(binary(0.5), 1.0, 0.5).unwrap();
        let r = DiscreteDistribution::from_probs(vec![1.0, 0.0]).unwrap();
        let r = DiscreteDistribution::new(vec![0.0, 1.0], r.probs().to_vec()).unwrap();
        assert!(matches!(
            update_conditional(&problem, &r),
            Err(RdpError::ZeroMarginal { index: 1, .. })
        ));
    }

    #[test]
    fn conditional_update_overflow_is_reported() {
        let problem = RdpProblem::with_source_alphabet(binary(0.5), 0.0, 1e300).unwrap();
        let r = DiscreteDistribution::new(vec![0.0, 1.0], vec![1.0 - 1e-290, 1e-290]).unwrap();
        assert!(matches!(
            update_conditional(&problem, &r),
            Err(RdpError::NumericOverflow { index: 0 })
        ));
    }

    #[test]
    fn marginal_update_examples() {
        let src = binary(0.3);
        let id = ConditionalDistribution::identity(vec![0.0, 1.0]).unwrap();
        let r = update_marginal(&src, &id).unwrap();
        assert_abs_diff_eq!(r.prob(0), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(r.prob(1), 0.7, epsilon = 1e-15);

        let half = binary(0.5);
        let constant = ConditionalDistribution::constant(vec![0.0, 1.0], &half).unwrap();
        assert_eq!(
            update_marginal(&src, &constant).unwrap().probs(),
            &[0.5, 0.5]
        );

        let rows = vec![vec![0.7311, 0.2689], vec![0.2689, 0.7311]];
        let sym = ConditionalDistribution::new(vec![0.0, 1.0], vec![0.0, 1.0], rows).unwrap();
        let r = update_marginal(&binary(0.5), &sym).unwrap();
        assert_abs_diff_eq!(r.prob(0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_multipliers_give_zero_rate() {
        let src = DiscreteDistribution::from_probs(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let problem = RdpProblem::with_source_alphabet(src, 0.0, 0.0).unwrap();
        let point = solve(&problem, &SolverConfig::default()).unwrap();
        assert!(point.rate < 1e-9);
        assert!(point.converged);
    }

    #[test]
    fn binary_rate_distortion_closed_form() {
        // For the symmetric binary source q(1|0) = e^{-alpha} / (1 + e^{-alpha}).
        // Pick alpha so that D = 0.1 exactly.
        let alpha = (9.0f64).ln();
        let problem = RdpProblem::with_source_alphabet(binary(0.5), alpha, 0.0).unwrap();
        let point = solve(&problem, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(point.distortion, 0.1, epsilon = 1e-9);
        assert_abs_diff_eq!(point.rate, 0.531_004_406_410_718_8, epsilon = 1e-3);
        assert_abs_diff_eq!(point.rate, 1.0 - hb(point.distortion), epsilon = 1e-9);

        let strong_mu = problem.with_multipliers(alpha, 10.0).unwrap();
        let with_mu = solve(&strong_mu, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(with_mu.rate, point.rate, epsilon = 1e-3);
        assert!(with_mu.perception < 1e-6);
    }

    #[test]
    fn nonconvergence_is_flagged_not_an_error() {
        let src = DiscreteDistribution::from_probs(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let problem = RdpProblem::with_source_alphabet(src, 0.05, 0.0).unwrap();
        let config = SolverConfig {
            tolerance: 1e-15,
            max_iterations: 2,
        };
        let point = solve(&problem, &config).unwrap();
        assert!(!point.converged);
        assert_eq!(point.iterations, 2);
    }

    #[test]
    fn invalid_problems_are_rejected() {
        let src = binary(0.5);
        assert!(matches!(
            RdpProblem::with_source_alphabet(src.clone(), -1.0, 0.0),
            Err(RdpError::InvalidMultiplier { name: "alpha", .. })
        ));
        assert!(matches!(
            RdpProblem::with_source_alphabet(binary(1.0), 1.0, 0.0),
            Err(RdpError::SourceNotFullSupport { index: 1 })
        ));
        assert!(RdpProblem::new(src.clone(), vec![1.0, 0.0], 1.0, 0.0).is_err());
        let problem = RdpProblem::with_source_alphabet(src, 1.0, 0.0).unwrap();
        let bad = SolverConfig {
            tolerance: 0.0,
            max_iterations: 10,
        };
        assert!(matches!(
            solve(&problem, &bad),
            Err(RdpError::InvalidConfig(_))
        ));
    }

    #[test]
    fn distinct_reconstruction_grid() {
        let src = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let problem = RdpProblem::new(src, vec![0.0, 0.5, 1.0], 4.0, 0.0).unwrap();
        let point = solve(&problem, &SolverConfig::default()).unwrap();
        assert!(point.rate >= 0.0 && point.rate <= 1.0 + 1e-12);
        assert!(point.perception.is_finite());
        let off_grid = RdpProblem::new(binary(0.5), vec![0.25, 0.75], 2.0, 0.0).unwrap();
        let point = solve(&off_grid, &SolverConfig::default()).unwrap();
        assert!(point.perception.is_infinite());
    }

    fn random_problem() -> impl Strategy<Value = RdpProblem> {
        (
            prop::collection::vec(0.2f64..1.0, 4),
            2.0f64..5.0,
            0.0f64..0.1,
        )
            .prop_map(|(w, alpha, mu)| {
                let total: f64 = w.iter().sum();
                let src = DiscreteDistribution::new(
                    vec![0.0, 1.0, 2.0, 3.0],
                    w.iter().map(|v| v / total).collect(),
                )
                .unwrap();
                RdpProblem::with_source_alphabet(src, alpha, mu).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn converged_marginal_is_optimal_among_alternatives(problem in random_problem(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let (state, point) = solve_with_state(&problem, &SolverConfig::default()).unwrap();
            prop_assume!(point.converged);
            let r_star = update_marginal(problem.source(), &state.conditional).unwrap();
            let base = rate_against(problem.source(), &state.conditional, r_star.probs());
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100 {
                let w: Vec<f64> = (0..4).map(|_| rng.random_range(1e-3..1.0)).collect();
                let s: f64 = w.iter().sum();
                let alt: Vec<f64> = w.iter().map(|v| v / s).collect();
                prop_assert!(base <= rate_against(problem.source(), &state.conditional, &alt) + 1e-12);
            }
            prop_assert!(fixed_point_residual(&problem, &state).unwrap() < 10.0 * SolverConfig::default().tolerance);
            prop_assert!(state.conditional.max_row_defect() <= 1e-12);
        }
    }
}
