//! Minimum-error and minimum-cost comparison.
//!
//! With prior knowledge of which states may occur, comparison becomes a
//! two-hypothesis discrimination problem between `rho_same` ("all systems are
//! in the same state") and `rho_diff`. The optimal measurement is read off the
//! spectrum of `p_S rho_S - p_D rho_D` (or its cost-weighted version): positive
//! eigenvectors vote "same", negative ones "different", and null directions are
//! split evenly between the two.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::comparison::{
    apply_strategy, universal_strategy, ComparisonStrategy, OutcomeLabel, StrategyElement,
};
use crate::error::{domain, Error, Result};
use crate::hilbert::{
    capped_pow, expectation_unchecked, hermitian_eig, hermitian_eigenvalues, tensor_product,
    Operator, Prepared, PureState, C64,
};
use crate::rng::{McEstimate, RngStreams};

/// Eigenvalues with `|lambda|` at most this are treated as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;
pub const PRIOR_SUM_TOL: f64 = 1e-12;
pub const DENSITY_TOL: f64 = 1e-10;
/// Largest number of draw sequences enumerated by [`threshold_hypotheses`].
pub const MAX_DRAW_SEQUENCES: usize = 1 << 20;

/// `n_systems` systems, each independently prepared in one of `states` with
/// probabilities `priors`.
#[derive(Clone, Debug)]
pub struct ComparisonScenario {
    states: Vec<PureState>,
    priors: Vec<f64>,
    n_systems: usize,
}

impl ComparisonScenario {
    pub fn new(states: Vec<PureState>, priors: Vec<f64>, n_systems: usize) -> Result<Self> {
        if states.is_empty() {
            return domain("scenario needs at least one state");
        }
        if states.len() != priors.len() {
            return domain(format!(
                "{} states but {} priors",
                states.len(),
                priors.len()
            ));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return domain("scenario states have different dimensions");
        }
        if priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return domain("priors must lie in [0, 1]");
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return domain(format!("priors sum to {total}, not 1"));
        }
        if n_systems < 2 {
            return domain("comparison needs at least two systems");
        }
        capped_pow("scenario joint space", dim, n_systems)?;
        Ok(Self {
            states,
            priors,
            n_systems,
        })
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    /// Single-system dimension.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Dimension of the joint space of all systems.
    pub fn joint_dim(&self) -> usize {
        self.dim().pow(self.n_systems as u32)
    }

    fn sample_indices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        (0..self.n_systems)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (i, p) in self.priors.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return i;
                    }
                }
                self.priors.iter().rposition(|&p| p > 0.0).unwrap_or(0)
            })
            .collect()
    }
}

/// The three trine qubit states over the basis `{|+>, |->}`, each with prior
/// 1/3, for two systems.
pub fn trine_scenario() -> ComparisonScenario {
    let r3 = 3f64.sqrt();
    let states = vec![
        PureState::from_real(&[1.0, 0.0]),
        PureState::from_real(&[-0.5, -r3 / 2.0]),
        PureState::from_real(&[-0.5, r3 / 2.0]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("trine states are normalized");
    ComparisonScenario::new(states, vec![1.0 / 3.0; 3], 2).expect("trine scenario is valid")
}

fn check_density(name: &str, rho: &Operator) -> Result<()> {
    let defect = rho.hermitian_defect();
    if defect > DENSITY_TOL {
        return domain(format!("{name} is not Hermitian (defect {defect:e})"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return domain(format!("{name} has trace {tr}, not 1"));
    }
    let min = hermitian_eigenvalues(rho)?.last().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return domain(format!("{name} is not positive (eigenvalue {min:e})"));
    }
    Ok(())
}

/// The two hypotheses "all the same" and "not all the same" with their priors.
#[derive(Clone, Debug)]
pub struct HypothesisPair {
    pub rho_same: Operator,
    pub p_same: f64,
    pub rho_diff: Operator,
    pub p_diff: f64,
}

impl HypothesisPair {
    pub fn new(rho_same: Operator, p_same: f64, rho_diff: Operator, p_diff: f64) -> Result<Self> {
        if rho_same.dim() != rho_diff.dim() {
            return domain("hypothesis densities have different dimensions");
        }
        if !(0.0..=1.0).contains(&p_same) || !(0.0..=1.0).contains(&p_diff) {
            return domain("hypothesis priors must lie in [0, 1]");
        }
        if (p_same + p_diff - 1.0).abs() > PRIOR_SUM_TOL {
            return domain(format!("hypothesis priors sum to {}", p_same + p_diff));
        }
        check_density("rho_same", &rho_same)?;
        check_density("rho_diff", &rho_diff)?;
        Ok(Self {
            rho_same,
            p_same,
            rho_diff,
            p_diff,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho_same.dim()
    }

    /// `p_S rho_S - p_D rho_D`
    pub fn helstrom_operator(&self) -> Operator {
        &self.rho_same.scale(self.p_same) - &self.rho_diff.scale(self.p_diff)
    }
}

/// Costs `c_xy` of answering `x` when the truth is `y` (`s` = same, `d` = different).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostMatrix {
    pub c_ss: f64,
    pub c_dd: f64,
    pub c_sd: f64,
    pub c_ds: f64,
}

impl CostMatrix {
    /// Rejects cost matrices where a wrong answer is cheaper than the right one.
    pub fn new(c_ss: f64, c_dd: f64, c_sd: f64, c_ds: f64) -> Result<Self> {
        if [c_ss, c_dd, c_sd, c_ds].iter().any(|c| !c.is_finite()) {
            return domain("costs must be finite");
        }
        if c_ds < c_ss || c_sd < c_dd {
            return domain(format!(
                "irrational costs: need c_ds >= c_ss and c_sd >= c_dd, got ({c_ss}, {c_dd}, {c_sd}, {c_ds})"
            ));
        }
        Ok(Self {
            c_ss,
            c_dd,
            c_sd,
            c_ds,
        })
    }

    /// Every error costs 1, every correct answer 0.
    pub fn error_counting() -> Self {
        Self {
            c_ss: 0.0,
            c_dd: 0.0,
            c_sd: 1.0,
            c_ds: 1.0,
        }
    }

    fn cost(&self, verdict: Verdict, truth: Verdict) -> f64 {
        match (verdict, truth) {
            (Verdict::Same, Verdict::Same) => self.c_ss,
            (Verdict::Different, Verdict::Different) => self.c_dd,
            (Verdict::Same, Verdict::Different) => self.c_sd,
            (Verdict::Different, Verdict::Same) => self.c_ds,
        }
    }
}

/// A binary answer to "were the states all identical?".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Same,
    Different,
}

/// The verdict an outcome stands for, with inconclusive outcomes replaced by `guess`.
pub fn verdict_for(label: OutcomeLabel, guess: Verdict) -> Verdict {
    match label {
        OutcomeLabel::Same => Verdict::Same,
        OutcomeLabel::Inconclusive => guess,
        l if l.asserts_difference() => Verdict::Different,
        _ => guess,
    }
}

/// `sum_i q_i (|psi_i><psi_i|)^{(x)N}` and the full product mixture, both unnormalized.
struct WeightedHypotheses {
    same: Operator,
    diff: Operator,
    p_same: f64,
}

fn weighted_hypotheses(scenario: &ComparisonScenario) -> Result<WeightedHypotheses> {
    let n = scenario.n_systems;
    let dim = scenario.joint_dim();
    let mut same = DMatrix::<C64>::zeros(dim, dim);
    let mut p_same = 0.0;
    let mut single = Operator::zeros(scenario.dim());
    for (state, &prior) in scenario.states.iter().zip(&scenario.priors) {
        let weight = prior.powi(n as i32);
        p_same += weight;
        let copies = tensor_product(&vec![state.clone(); n])?;
        let a = copies.amplitudes();
        same.ger(C64::new(weight, 0.0), a, &a.conjugate(), C64::new(1.0, 0.0));
        single = &single + &state.projector().scale(prior);
    }
    let same = Operator::from_matrix_unchecked(same);
    let full = single.kron_power(n)?;
    let diff = &full - &same;
    Ok(WeightedHypotheses { same, diff, p_same })
}

/// `rho_S`, `rho_D` and their priors for i.i.d. draws from the scenario's state set.
pub fn build_hypotheses(scenario: &ComparisonScenario) -> Result<HypothesisPair> {
    let w = weighted_hypotheses(scenario)?;
    let p_diff = 1.0 - w.p_same;
    if p_diff <= PRIOR_SUM_TOL {
        return Err(Error::DegenerateScenario(
            "the states are identical with certainty".into(),
        ));
    }
    if w.p_same <= PRIOR_SUM_TOL {
        return Err(Error::DegenerateScenario(
            "the states are never identical".into(),
        ));
    }
    HypothesisPair::new(
        w.same.scale(1.0 / w.p_same),
        w.p_same,
        w.diff.scale(1.0 / p_diff),
        p_diff,
    )
}

/// Hypotheses "at least `m` of the `N` states are identical" (stored as
/// `rho_same`) versus "at most `m - 1` are identical" (`rho_diff`).
pub fn threshold_hypotheses(scenario: &ComparisonScenario, m: usize) -> Result<HypothesisPair> {
    let n = scenario.n_systems;
    if m < 2 || m > n {
        return domain(format!("threshold {m} outside 2..={n}"));
    }
    let k = scenario.states.len();
    let sequences = k
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_DRAW_SEQUENCES)
        .ok_or(Error::Capacity {
            what: "draw sequences",
            requested: usize::MAX,
            cap: MAX_DRAW_SEQUENCES,
        })?;
    let dim = scenario.joint_dim();
    let mut at_least = DMatrix::<C64>::zeros(dim, dim);
    let mut at_most = DMatrix::<C64>::zeros(dim, dim);
    let (mut p_at_least, mut p_at_most) = (0.0, 0.0);
    let mut draw = vec![0usize; n];
    for code in 0..sequences {
        let mut rest = code;
        for slot in (0..n).rev() {
            draw[slot] = rest % k;
            rest /= k;
        }
        let weight: f64 = draw.iter().map(|&i| scenario.priors[i]).product();
        if weight == 0.0 {
            continue;
        }
        let mut counts = vec![0usize; k];
        for &i in &draw {
            counts[i] += 1;
        }
        let multiplicity = counts.into_iter().max().unwrap_or(0);
        let factors: Vec<PureState> = draw.iter().map(|&i| scenario.states[i].clone()).collect();
        let psi = tensor_product(&factors)?;
        let a = psi.amplitudes();
        let (target, p) = if multiplicity >= m {
            (&mut at_least, &mut p_at_least)
        } else {
            (&mut at_most, &mut p_at_most)
        };
        target.ger(C64::new(weight, 0.0), a, &a.conjugate(), C64::new(1.0, 0.0));
        *p += weight;
    }
    if p_at_least <= PRIOR_SUM_TOL || p_at_most <= PRIOR_SUM_TOL {
        return Err(Error::DegenerateScenario(format!(
            "threshold {m} splits the draws into probabilities {p_at_least} and {p_at_most}"
        )));
    }
    HypothesisPair::new(
        Operator::from_matrix_unchecked(at_least.unscale(p_at_least)),
        p_at_least,
        Operator::from_matrix_unchecked(at_most.unscale(p_at_most)),
        p_at_most,
    )
}

/// A two-outcome (Same / Different) strategy together with its optimal figure
/// of merit and the spectrum it was built from.
#[derive(Clone, Debug)]
pub struct BinaryDecision {
    pub strategy: ComparisonStrategy,
    /// Eigenvalues of the decision operator, descending.
    pub eigenvalues: Vec<f64>,
    /// Minimum error probability (Helstrom) or minimum Bayes cost.
    pub value: f64,
}

impl BinaryDecision {
    pub fn sum_abs_eigenvalues(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }
}

/// Splits the spectrum of `op` into a Same element (positive part plus half
/// the null space) and a Different element (negative part plus half the null
/// space).
fn sign_decomposition(op: &Operator) -> Result<(ComparisonStrategy, Vec<f64>)> {
    let eig = hermitian_eig(op)?;
    let dim = op.dim();
    let mut same = DMatrix::<C64>::zeros(dim, dim);
    let mut diff = DMatrix::<C64>::zeros(dim, dim);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let (w_same, w_diff) = if lambda > ZERO_EIGENVALUE_TOL {
            (1.0, 0.0)
        } else if lambda < -ZERO_EIGENVALUE_TOL {
            (0.0, 1.0)
        } else {
            (0.5, 0.5)
        };
        if w_same > 0.0 {
            same.ger(
                C64::new(w_same, 0.0),
                &v,
                &v.conjugate(),
                C64::new(1.0, 0.0),
            );
        }
        if w_diff > 0.0 {
            diff.ger(
                C64::new(w_diff, 0.0),
                &v,
                &v.conjugate(),
                C64::new(1.0, 0.0),
            );
        }
    }
    let strategy = ComparisonStrategy::new(vec![
        StrategyElement {
            label: OutcomeLabel::Same,
            partition: None,
            operator: Operator::from_matrix_unchecked(same),
        },
        StrategyElement {
            label: OutcomeLabel::Different,
            partition: None,
            operator: Operator::from_matrix_unchecked(diff),
        },
    ])?;
    Ok((strategy, eig.values))
}

/// Minimum-error comparison: `p_e = (1 - sum |lambda_i|) / 2` over the
/// spectrum of `p_S rho_S - p_D rho_D`.
pub fn helstrom(h: &HypothesisPair) -> Result<BinaryDecision> {
    let (strategy, eigenvalues) = sign_decomposition(&h.helstrom_operator())?;
    let sum_abs: f64 = eigenvalues.iter().map(|l| l.abs()).sum();
    Ok(BinaryDecision {
        strategy,
        eigenvalues,
        value: 0.5 * (1.0 - sum_abs),
    })
}

/// `p_S (C_DS - C_SS) rho_S - p_D (C_SD - C_DD) rho_D`
pub fn bayes_operator(h: &HypothesisPair, costs: &CostMatrix) -> Operator {
    &h.rho_same.scale(h.p_same * (costs.c_ds - costs.c_ss))
        - &h.rho_diff.scale(h.p_diff * (costs.c_sd - costs.c_dd))
}

/// Minimum-cost comparison:
/// `C_B = [(C_SS + C_DS) p_S + (C_DD + C_SD) p_D - sum |lambda_i|] / 2`.
pub fn bayes(h: &HypothesisPair, costs: &CostMatrix) -> Result<BinaryDecision> {
    let (strategy, eigenvalues) = sign_decomposition(&bayes_operator(h, costs))?;
    let sum_abs: f64 = eigenvalues.iter().map(|l| l.abs()).sum();
    let value = 0.5
        * ((costs.c_ss + costs.c_ds) * h.p_same + (costs.c_dd + costs.c_sd) * h.p_diff - sum_abs);
    Ok(BinaryDecision {
        strategy,
        eigenvalues,
        value,
    })
}

/// Joint probabilities `p(verdict, truth) = p_truth Tr(rho_truth Pi_verdict)`,
/// as `[[p(S,S), p(S,D)], [p(D,S), p(D,D)]]`.
pub fn joint_probabilities(
    strategy: &ComparisonStrategy,
    h: &HypothesisPair,
    guess: Verdict,
) -> Result<[[f64; 2]; 2]> {
    if strategy.dim() != h.dim() {
        return domain("strategy and hypotheses act on different spaces");
    }
    let mut joint = [[0.0; 2]; 2];
    for e in strategy.elements() {
        let row = match verdict_for(e.label, guess) {
            Verdict::Same => 0,
            Verdict::Different => 1,
        };
        joint[row][0] +=
            h.p_same * expectation_unchecked(&e.operator, Prepared::Mixed(&h.rho_same))?;
        joint[row][1] +=
            h.p_diff * expectation_unchecked(&e.operator, Prepared::Mixed(&h.rho_diff))?;
    }
    Ok(joint)
}

/// Expected cost of `strategy`, evaluated directly as `sum p(i, j) C_ij`.
pub fn strategy_cost(
    strategy: &ComparisonStrategy,
    h: &HypothesisPair,
    costs: &CostMatrix,
    guess: Verdict,
) -> Result<f64> {
    let j = joint_probabilities(strategy, h, guess)?;
    Ok(j[0][0] * costs.cost(Verdict::Same, Verdict::Same)
        + j[0][1] * costs.cost(Verdict::Same, Verdict::Different)
        + j[1][0] * costs.cost(Verdict::Different, Verdict::Same)
        + j[1][1] * costs.cost(Verdict::Different, Verdict::Different))
}

/// Error probability of `strategy`, evaluated directly.
pub fn strategy_error(
    strategy: &ComparisonStrategy,
    h: &HypothesisPair,
    guess: Verdict,
) -> Result<f64> {
    strategy_cost(strategy, h, &CostMatrix::error_counting(), guess)
}

/// Best error probability of the universal error-free strategy when the
/// inconclusive outcome is replaced by a fixed guess.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuessedErrorFree {
    pub p_error: f64,
    pub guess: Verdict,
}

/// Minimizes the error of "universal error-free comparison, then guess on
/// inconclusive" over both guesses. Works for any number of systems and
/// accepts scenarios where one hypothesis is empty.
pub fn errorfree_plus_guess(scenario: &ComparisonScenario) -> Result<GuessedErrorFree> {
    let w = weighted_hypotheses(scenario)?;
    let strategy = universal_strategy(scenario.n_systems, scenario.dim())?;
    let mut best: Option<GuessedErrorFree> = None;
    for guess in [Verdict::Different, Verdict::Same] {
        let mut p_error = 0.0;
        for e in strategy.elements() {
            let verdict = verdict_for(e.label, guess);
            // mass of the hypothesis this verdict gets wrong
            let wrong = match verdict {
                Verdict::Same => &w.diff,
                Verdict::Different => &w.same,
            };
            p_error += expectation_unchecked(&e.operator, Prepared::Mixed(wrong))?;
        }
        if best.is_none_or(|b| p_error < b.p_error) {
            best = Some(GuessedErrorFree { p_error, guess });
        }
    }
    Ok(best.expect("two guesses evaluated"))
}

/// Monte Carlo error rate of `strategy` on the scenario: per trial, draw the
/// systems from the state set, measure, and compare the verdict with the truth.
pub fn simulate_strategy(
    strategy: &ComparisonStrategy,
    scenario: &ComparisonScenario,
    trials: usize,
    streams: &RngStreams,
    guess: Verdict,
) -> Result<McEstimate> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    if strategy.dim() != scenario.joint_dim() {
        return domain(format!(
            "strategy of dimension {} applied to a scenario of dimension {}",
            strategy.dim(),
            scenario.joint_dim()
        ));
    }
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.stream(t);
            let draw = scenario.sample_indices(&mut rng);
            let truth = if draw.iter().all(|&i| i == draw[0]) {
                Verdict::Same
            } else {
                Verdict::Different
            };
            let factors: Vec<PureState> =
                draw.iter().map(|&i| scenario.states[i].clone()).collect();
            let psi = tensor_product(&factors)?;
            let label = apply_strategy(strategy, &psi, &mut rng)?;
            Ok(if verdict_for(label, guess) == truth {
                0.0
            } else {
                1.0
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&samples))
}
