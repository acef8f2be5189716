//! Error-free comparison of `N` pure states.
//!
//! Identical pure states always lie in the symmetric subspace, so finding the
//! systems outside it proves they were not all the same. The detailed
//! strategy refines this by projecting onto every isotypic block: a block with
//! first row `m` certifies that no `m + 1` of the systems were identical.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::hilbert::{
    capped_pow, expectation_unchecked, haar_random_state, hermitian_eigenvalues, tensor_product,
    Operator, Prepared,
};
use crate::rng::{McEstimate, RngStreams};
use crate::symmetry::{
    isotypic_projector, max_identical, partitions_of, symmetric_projector, Partition,
};

/// Tolerance for POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-9;
/// Outcome probabilities must sum to one within this.
pub const PROBABILITY_SUM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeLabel {
    /// The states were certainly not all identical.
    NotAllSame,
    /// No information.
    Inconclusive,
    /// No more than `m` of the states were identical.
    AtMostMIdentical(usize),
    /// No two states were identical.
    AllDifferent,
    /// Verdict "identical" (may be wrong).
    Same,
    /// Verdict "not identical" (may be wrong).
    Different,
}

impl OutcomeLabel {
    /// Whether the outcome asserts that not all states were identical.
    pub fn asserts_difference(&self) -> bool {
        matches!(
            self,
            OutcomeLabel::NotAllSame
                | OutcomeLabel::AtMostMIdentical(_)
                | OutcomeLabel::AllDifferent
                | OutcomeLabel::Different
        )
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabel::NotAllSame => write!(f, "not-all-same"),
            OutcomeLabel::Inconclusive => write!(f, "inconclusive"),
            OutcomeLabel::AtMostMIdentical(m) => write!(f, "at-most-{m}-identical"),
            OutcomeLabel::AllDifferent => write!(f, "all-different"),
            OutcomeLabel::Same => write!(f, "same"),
            OutcomeLabel::Different => write!(f, "different"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrategyElement {
    pub label: OutcomeLabel,
    /// The Young diagram of the subspace, for symmetry-based elements.
    pub partition: Option<Partition>,
    pub operator: Operator,
}

/// A labelled POVM: positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct ComparisonStrategy {
    elements: Vec<StrategyElement>,
    dim: usize,
}

impl ComparisonStrategy {
    /// Validates Hermiticity, positivity (eigenvalues >= -1e-9) and
    /// completeness (sum within 1e-9 of the identity).
    pub fn new(elements: Vec<StrategyElement>) -> Result<Self> {
        let Some(dim) = elements.first().map(|e| e.operator.dim()) else {
            return domain("strategy needs at least one element");
        };
        let mut total = Operator::zeros(dim);
        for e in &elements {
            if e.operator.dim() != dim {
                return domain("strategy elements have different dimensions");
            }
            let min_eig = hermitian_eigenvalues(&e.operator)?
                .last()
                .copied()
                .unwrap_or(0.0);
            if min_eig < -POVM_TOL {
                return Err(Error::Numerical(format!(
                    "element {} is not positive (eigenvalue {min_eig:e})",
                    e.label
                )));
            }
            total = &total + &e.operator;
        }
        let defect = total.max_abs_diff(&Operator::identity(dim));
        if defect > POVM_TOL {
            return Err(Error::Numerical(format!(
                "strategy elements do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(Self { elements, dim })
    }

    pub fn elements(&self) -> &[StrategyElement] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element(&self, label: OutcomeLabel) -> Option<&StrategyElement> {
        self.elements.iter().find(|e| e.label == label)
    }

    /// Born-rule probability of each element. Probabilities below `-1e-9`
    /// are an error; smaller negative dust is clamped to zero.
    pub fn probabilities<'a>(&self, system: impl Into<Prepared<'a>>) -> Result<Vec<f64>> {
        let system = system.into();
        let mut probs = Vec::with_capacity(self.elements.len());
        for e in &self.elements {
            let p = expectation_unchecked(&e.operator, system)?;
            if p < -POVM_TOL {
                return Err(Error::Numerical(format!(
                    "negative probability {p:e} for outcome {}",
                    e.label
                )));
            }
            probs.push(p.max(0.0));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::Numerical(format!(
                "outcome probabilities sum to {sum}, system is not normalized"
            )));
        }
        Ok(probs)
    }

    /// Samples the index of one element by inverting the cumulative distribution.
    pub fn sample_index<'a, R: Rng + ?Sized>(
        &self,
        system: impl Into<Prepared<'a>>,
        rng: &mut R,
    ) -> Result<usize> {
        let probs = self.probabilities(system)?;
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
        // u landed on the upper edge through rounding: take the last element with mass
        Ok(probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(probs.len() - 1))
    }
}

/// `{(NotAllSame, 1 - P_sym), (Inconclusive, P_sym)}`. The "all same" element
/// is zero and omitted.
pub fn universal_strategy(n: usize, d: usize) -> Result<ComparisonStrategy> {
    let sym = symmetric_projector(n, d)?;
    let nonsym = &Operator::identity(sym.dim()) - &sym;
    ComparisonStrategy::new(vec![
        StrategyElement {
            label: OutcomeLabel::NotAllSame,
            partition: None,
            operator: nonsym,
        },
        StrategyElement {
            label: OutcomeLabel::Inconclusive,
            partition: Some(Partition::single_row(n)?),
            operator: sym,
        },
    ])
}

/// Label for the outcome of the `lambda` block.
pub fn label_for(lambda: &Partition) -> OutcomeLabel {
    if lambda.num_rows() == 1 {
        OutcomeLabel::Inconclusive
    } else if lambda.first_row() == 1 {
        OutcomeLabel::AllDifferent
    } else {
        OutcomeLabel::AtMostMIdentical(max_identical(lambda))
    }
}

/// One element per non-empty isotypic block, in the order of [`partitions_of`].
pub fn detailed_strategy(n: usize, d: usize) -> Result<ComparisonStrategy> {
    if n == 0 || d == 0 {
        return domain("need n >= 1 systems of dimension d >= 1");
    }
    capped_pow("detailed strategy", d, n)?;
    let mut elements = Vec::new();
    for lambda in partitions_of(n, d) {
        elements.push(StrategyElement {
            label: label_for(&lambda),
            operator: isotypic_projector(&lambda, d)?,
            partition: Some(lambda),
        });
    }
    ComparisonStrategy::new(elements)
}

/// Average probability that the universal strategy detects a difference for
/// uniformly distributed inputs: `1 - C(D+N-1, N) / D^N`.
pub fn success_probability_analytic(n: usize, d: usize) -> f64 {
    // C(D+N-1, N) / D^N = prod_{k=1..N} (D+k-1) / (k D)
    let ratio: f64 = (1..=n)
        .map(|k| (d + k - 1) as f64 / (k as f64 * d as f64))
        .product();
    1.0 - ratio
}

/// How Monte Carlo inputs are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputEnsemble {
    /// Haar-random on the full `D^N`-dimensional space.
    Entangled,
    /// Product of `N` independent Haar-random single-system states.
    Product,
}

/// Monte Carlo estimate of the average of `<Psi|1 - P_sym|Psi>`.
pub fn success_probability_mc(
    n: usize,
    d: usize,
    trials: usize,
    streams: &RngStreams,
    ensemble: InputEnsemble,
) -> Result<McEstimate> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    let sym = symmetric_projector(n, d)?;
    let dim = sym.dim();
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.stream(t);
            let psi = match ensemble {
                InputEnsemble::Entangled => haar_random_state(dim, &mut rng)?,
                InputEnsemble::Product => {
                    let factors = (0..n)
                        .map(|_| haar_random_state(d, &mut rng))
                        .collect::<Result<Vec<_>>>()?;
                    tensor_product(&factors)?
                }
            };
            let p_sym = expectation_unchecked(&sym, Prepared::Pure(&psi))?;
            Ok((1.0 - p_sym).clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&samples))
}

/// Measures `system` with `strategy` and returns the sampled outcome label.
pub fn apply_strategy<'a, R: Rng + ?Sized>(
    strategy: &ComparisonStrategy,
    system: impl Into<Prepared<'a>>,
    rng: &mut R,
) -> Result<OutcomeLabel> {
    let i = strategy.sample_index(system, rng)?;
    Ok(strategy.elements[i].label)
}
