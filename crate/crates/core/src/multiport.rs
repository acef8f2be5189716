//! Linear-optics comparison with a balanced multiport.
//!
//! `N` particles enter the `N` input ports of a discrete-Fourier interferometer,
//! one per port, each carrying its own internal state. The interferometer acts
//! on the spatial modes only. Output port counts that are impossible when all
//! internal states coincide certify a difference.
//!
//! Modes are resolved into (port `j`, internal level `d`) pairs, flattened as
//! `j * D + d`. The amplitude of a fine-grained output occupation is the
//! permanent (bosons) or determinant (fermions) of the transfer submatrix,
//! divided by `sqrt(prod n!)`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::hilbert::{haar_random_state, PureState, C64};
use crate::rng::{McEstimate, RngStreams};

pub const MAX_PARTICLES: usize = 6;
pub const MAX_INTERNAL_DIM: usize = 4;
pub const UNITARY_TOL: f64 = 1e-12;
/// Patterns below this probability are treated as impossible.
pub const ZERO_PROBABILITY_TOL: f64 = 1e-10;
pub const DISTRIBUTION_SUM_TOL: f64 = 1e-9;

/// Spatial transfer matrix: `entries[(j, k)]` maps input port `k` to output port `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiportUnitary {
    entries: DMatrix<C64>,
}

impl MultiportUnitary {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return domain("multiport matrix must be square and non-empty");
        }
        let defect = unitarity_defect(&entries);
        if defect > UNITARY_TOL {
            return domain(format!(
                "multiport matrix is not unitary (defect {defect:e})"
            ));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn n_ports(&self) -> usize {
        self.entries.nrows()
    }
}

/// Largest entry of `U^dagger U - 1`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u - DMatrix::<C64>::identity(n, n);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `entries[(j, k)] = exp(2 pi i j k / N) / sqrt(N)`
pub fn dft_multiport(n: usize) -> Result<MultiportUnitary> {
    if n == 0 {
        return domain("a multiport needs at least one port");
    }
    let norm = 1.0 / (n as f64).sqrt();
    let entries = DMatrix::from_fn(n, n, |j, k| {
        // reduce first so large products keep their phase accuracy
        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        C64::from_polar(norm, phase)
    });
    MultiportUnitary::new(entries)
}

/// Occupation numbers of the output ports.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockPattern(Vec<usize>);

impl FockPattern {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn particles(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn ports(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for FockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.0.iter())
    }
}

/// Which detectors clicked, without counts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringPattern(Vec<bool>);

impl FiringPattern {
    pub fn new(fired: Vec<bool>) -> Self {
        Self(fired)
    }

    pub fn fired(&self) -> &[bool] {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&f| f).count()
    }
}

impl fmt::Display for FiringPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, self.0.iter().map(|&b| b as u8))
    }
}

fn write_tuple<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in items.enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

/// One particle per input port, particle `k` in internal state `internal_states[k]`.
#[derive(Clone, Debug)]
pub struct MultiportInput {
    internal_states: Vec<PureState>,
    statistics: Statistics,
}

impl MultiportInput {
    pub fn new(internal_states: Vec<PureState>, statistics: Statistics) -> Result<Self> {
        let n = internal_states.len();
        if n == 0 {
            return domain("multiport input needs at least one particle");
        }
        if n > MAX_PARTICLES {
            return Err(Error::Capacity {
                what: "multiport particles",
                requested: n,
                cap: MAX_PARTICLES,
            });
        }
        let d = internal_states[0].dim();
        if internal_states.iter().any(|s| s.dim() != d) {
            return domain("internal states have different dimensions");
        }
        if d > MAX_INTERNAL_DIM {
            return Err(Error::Capacity {
                what: "multiport internal dimension",
                requested: d,
                cap: MAX_INTERNAL_DIM,
            });
        }
        Ok(Self {
            internal_states,
            statistics,
        })
    }

    /// `n` particles all in the same internal state.
    pub fn identical(n: usize, state: PureState, statistics: Statistics) -> Result<Self> {
        Self::new(vec![state; n], statistics)
    }

    pub fn n_particles(&self) -> usize {
        self.internal_states.len()
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_states[0].dim()
    }

    pub fn internal_states(&self) -> &[PureState] {
        &self.internal_states
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }
}

/// Ryser's formula, visiting column subsets in Gray-code order.
pub fn permanent(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "permanent of a non-square matrix");
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray = 0usize;
    for g in 1..(1usize << n) {
        let col = g.trailing_zeros() as usize;
        gray ^= 1 << col;
        if gray & (1 << col) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, col)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, col)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// All ways of placing `total` indistinguishable items into `slots` slots, in
/// lexicographic order.
pub fn compositions(total: usize, slots: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[slot] = x;
            rec(left - x, slot + 1, cur, out);
        }
    }
    if slots == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(total, 0, &mut vec![0; slots], &mut out);
    out
}

/// Non-decreasing (bosons) or strictly increasing (fermions) sequences of
/// `len` mode indices below `modes`.
fn mode_sequences(modes: usize, len: usize, strict: bool) -> Vec<Vec<usize>> {
    fn rec(
        start: usize,
        modes: usize,
        strict: bool,
        cur: &mut Vec<usize>,
        len: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for m in start..modes {
            cur.push(m);
            rec(if strict { m + 1 } else { m }, modes, strict, cur, len, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        0,
        modes,
        strict,
        &mut Vec::with_capacity(len),
        len,
        &mut out,
    );
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Probabilities of every spatial output pattern, including impossible ones.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputDistribution {
    probabilities: BTreeMap<FockPattern, f64>,
}

impl OutputDistribution {
    pub fn get(&self, pattern: &FockPattern) -> f64 {
        self.probabilities.get(pattern).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockPattern, f64)> {
        self.probabilities.iter().map(|(p, &q)| (p, q))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Patterns with probability at least [`ZERO_PROBABILITY_TOL`].
    pub fn support(&self) -> BTreeSet<FockPattern> {
        self.iter()
            .filter(|&(_, q)| q >= ZERO_PROBABILITY_TOL)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Total probability of the given patterns.
    pub fn mass<'a>(&self, patterns: impl IntoIterator<Item = &'a FockPattern>) -> f64 {
        patterns.into_iter().map(|p| self.get(p)).sum()
    }
}

/// Exact spatial output statistics of `input` sent through `unitary`.
pub fn output_distribution(
    input: &MultiportInput,
    unitary: &MultiportUnitary,
) -> Result<OutputDistribution> {
    let n = input.n_particles();
    if unitary.n_ports() != n {
        return domain(format!(
            "{n} particles need a {n}-port multiport, got {} ports",
            unitary.n_ports()
        ));
    }
    let d = input.internal_dim();
    let modes = n * d;
    let u = unitary.entries();
    let transfer = DMatrix::from_fn(modes, n, |fine, k| {
        u[(fine / d, k)] * input.internal_states[k].amplitudes()[fine % d]
    });

    let mut probabilities: BTreeMap<FockPattern, f64> = compositions(n, n)
        .into_iter()
        .map(|c| (FockPattern(c), 0.0))
        .collect();
    let strict = input.statistics == Statistics::Fermion;
    let mut sub = DMatrix::<C64>::zeros(n, n);
    for seq in mode_sequences(modes, n, strict) {
        for (r, &m) in seq.iter().enumerate() {
            sub.set_row(r, &transfer.row(m));
        }
        let amplitude = match input.statistics {
            Statistics::Boson => permanent(&sub),
            Statistics::Fermion => sub.clone().determinant(),
        };
        let mut norm = 1.0;
        let mut run = 1;
        for w in seq.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                norm *= factorial(run);
                run = 1;
            }
        }
        norm *= factorial(run);
        let p = amplitude.norm_sqr() / norm;
        let mut spatial = vec![0usize; n];
        for &m in &seq {
            spatial[m / d] += 1;
        }
        *probabilities
            .get_mut(&FockPattern(spatial))
            .expect("all patterns listed") += p;
    }
    let dist = OutputDistribution { probabilities };
    let total = dist.total();
    if (total - 1.0).abs() > DISTRIBUTION_SUM_TOL {
        return Err(Error::Numerical(format!(
            "output distribution sums to {total}"
        )));
    }
    Ok(dist)
}

/// Output patterns that never occur when all internal states coincide.
pub fn unambiguous_patterns(n: usize, statistics: Statistics) -> Result<BTreeSet<FockPattern>> {
    // with identical inputs the spatial statistics do not depend on the
    // internal state, so a one-level internal space suffices
    let input = MultiportInput::identical(n, PureState::basis(1, 0)?, statistics)?;
    let dist = output_distribution(&input, &dft_multiport(n)?)?;
    Ok(dist
        .iter()
        .filter(|&(_, q)| q < ZERO_PROBABILITY_TOL)
        .map(|(p, _)| p.clone())
        .collect())
}

/// Number of firing detectors: at most this many fermions can have been in
/// the same internal state.
pub fn fermion_identical_bound(pattern: &FockPattern) -> usize {
    pattern.0.iter().filter(|&&k| k > 0).count()
}

/// What a threshold detector array reports for `pattern`.
pub fn coarsen_threshold(pattern: &FockPattern) -> FiringPattern {
    FiringPattern(pattern.0.iter().map(|&k| k > 0).collect())
}

/// Firing patterns all of whose preimages are unambiguous.
pub fn unambiguous_firing_patterns(
    n: usize,
    statistics: Statistics,
) -> Result<BTreeSet<FiringPattern>> {
    let unambiguous = unambiguous_patterns(n, statistics)?;
    let mut ambiguous = BTreeSet::new();
    let mut all = BTreeSet::new();
    for c in compositions(n, n) {
        let pattern = FockPattern(c);
        let firing = coarsen_threshold(&pattern);
        if !unambiguous.contains(&pattern) {
            ambiguous.insert(firing.clone());
        }
        all.insert(firing);
    }
    Ok(all.difference(&ambiguous).cloned().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    NumberResolving,
    Threshold,
}

/// Per-sample difference-detection probabilities with number-resolving and
/// threshold detectors, for `n` independent Haar-random internal states.
pub fn efficiency_samples(
    n: usize,
    d: usize,
    statistics: Statistics,
    trials: usize,
    streams: &RngStreams,
) -> Result<Vec<(f64, f64)>> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    if d == 0 {
        return domain("internal dimension must be positive");
    }
    let unitary = dft_multiport(n)?;
    let resolved = unambiguous_patterns(n, statistics)?;
    let firing = unambiguous_firing_patterns(n, statistics)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.stream(t);
            let states = (0..n)
                .map(|_| haar_random_state(d, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let dist = output_distribution(&MultiportInput::new(states, statistics)?, &unitary)?;
            let mut by_count = 0.0;
            let mut by_click = 0.0;
            for (pattern, q) in dist.iter() {
                if resolved.contains(pattern) {
                    by_count += q;
                }
                if firing.contains(&coarsen_threshold(pattern)) {
                    by_click += q;
                }
            }
            Ok((by_count, by_click))
        })
        .collect()
}

/// Average probability that the multiport certifies a difference among `n`
/// Haar-random internal states.
pub fn realization_efficiency_mc(
    n: usize,
    d: usize,
    statistics: Statistics,
    trials: usize,
    streams: &RngStreams,
    detection: Detection,
) -> Result<McEstimate> {
    let samples: Vec<f64> = efficiency_samples(n, d, statistics, trials, streams)?
        .into_iter()
        .map(|(resolved, threshold)| match detection {
            Detection::NumberResolving => resolved,
            Detection::Threshold => threshold,
        })
        .collect();
    Ok(McEstimate::from_samples(&samples))
}

/// Efficiency of comparing disjoint pairs `(0,1), (2,3), ...` with two-port
/// beam splitters: the probability that at least one pair certifies a
/// difference.
pub fn pairwise_efficiency_mc(
    n: usize,
    d: usize,
    statistics: Statistics,
    trials: usize,
    streams: &RngStreams,
) -> Result<McEstimate> {
    if n < 2 {
        return domain("pairwise comparison needs at least two systems");
    }
    if trials == 0 {
        return domain("need at least one trial");
    }
    let unitary = dft_multiport(2)?;
    let resolved = unambiguous_patterns(2, statistics)?;
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.stream(t);
            let states = (0..n)
                .map(|_| haar_random_state(d, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let mut all_silent = 1.0;
            for pair in states.chunks_exact(2) {
                let dist = output_distribution(
                    &MultiportInput::new(pair.to_vec(), statistics)?,
                    &unitary,
                )?;
                all_silent *= 1.0 - dist.mass(&resolved);
            }
            Ok(1.0 - all_silent)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(occ: &[usize]) -> FockPattern {
        FockPattern::new(occ.to_vec())
    }

    fn identical(n: usize, stats: Statistics) -> OutputDistribution {
        let input = MultiportInput::identical(n, PureState::basis(2, 0).unwrap(), stats).unwrap();
        output_distribution(&input, &dft_multiport(n).unwrap()).unwrap()
    }

    #[test]
    fn small_multiports() {
        let u1 = dft_multiport(1).unwrap();
        assert!((u1.entries()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let u2 = dft_multiport(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for (j, row) in want.iter().enumerate() {
            for (k, &w) in row.iter().enumerate() {
                assert!((u2.entries()[(j, k)] - C64::new(w, 0.0)).norm() < 1e-15);
            }
        }
        for n in 1..=8 {
            assert!(unitarity_defect(dft_multiport(n).unwrap().entries()) < 1e-12);
        }
        assert!(dft_multiport(0).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let m = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(MultiportUnitary::new(m).is_err());
    }

    #[test]
    fn permanent_small_cases() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0].map(|x| C64::new(x, 0.0)));
        assert!((permanent(&a) - C64::new(10.0, 0.0)).norm() < 1e-12);
        // all-ones n x n matrix has permanent n!
        let ones = DMatrix::from_element(5, 5, C64::new(1.0, 0.0));
        assert!((permanent(&ones) - C64::new(120.0, 0.0)).norm() < 1e-9);
        assert_eq!(permanent(&DMatrix::<C64>::zeros(0, 0)), C64::new(1.0, 0.0));
    }

    #[test]
    fn compositions_are_complete() {
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(4, 4).len(), 35);
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn two_bosons_bunch() {
        let dist = identical(2, Statistics::Boson);
        assert!((dist.get(&pattern(&[2, 0])) - 0.5).abs() < 1e-12);
        assert!((dist.get(&pattern(&[0, 2])) - 0.5).abs() < 1e-12);
        assert!(dist.get(&pattern(&[1, 1])) < 1e-15);
    }

    #[test]
    fn three_identical_bosons() {
        let dist = identical(3, Statistics::Boson);
        assert!((dist.get(&pattern(&[1, 1, 1])) - 1.0 / 3.0).abs() < 1e-10);
        for p in [[3, 0, 0], [0, 3, 0], [0, 0, 3]] {
            assert!((dist.get(&pattern(&p)) - 2.0 / 9.0).abs() < 1e-10);
        }
        assert_eq!(dist.support().len(), 4);
    }

    #[test]
    fn orthogonal_bosons_do_not_interfere() {
        // Oracle: with orthogonal internal states the two particles are
        // distinguishable, so each leaves either port with probability 1/2.
        let input = MultiportInput::new(
            vec![
                PureState::basis(2, 0).unwrap(),
                PureState::basis(2, 1).unwrap(),
            ],
            Statistics::Boson,
        )
        .unwrap();
        let dist = output_distribution(&input, &dft_multiport(2).unwrap()).unwrap();
        assert!((dist.get(&pattern(&[1, 1])) - 0.5).abs() < 1e-12);
        assert!((dist.get(&pattern(&[2, 0])) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn identical_fermions_antibunch() {
        for n in 1..=5 {
            let dist = identical(n, Statistics::Fermion);
            assert!((dist.get(&pattern(&vec![1; n])) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn unambiguous_sets() {
        let two = unambiguous_patterns(2, Statistics::Boson).unwrap();
        assert_eq!(two, BTreeSet::from([pattern(&[1, 1])]));
        let three = unambiguous_patterns(3, Statistics::Boson).unwrap();
        let want: BTreeSet<_> = compositions(3, 3)
            .into_iter()
            .filter(|c| c.iter().filter(|&&k| k > 0).count() == 2)
            .map(FockPattern::new)
            .collect();
        assert_eq!(three, want);
        let four = unambiguous_patterns(4, Statistics::Boson).unwrap();
        assert!(four.contains(&pattern(&[1, 1, 1, 1])));
        for c in compositions(4, 4) {
            let mut sorted = c.clone();
            sorted.sort_unstable();
            if sorted == [0, 0, 1, 3] {
                assert!(four.contains(&FockPattern::new(c)));
            }
        }
    }

    #[test]
    fn pattern_helpers() {
        assert_eq!(fermion_identical_bound(&pattern(&[1, 1, 1, 1])), 4);
        assert_eq!(fermion_identical_bound(&pattern(&[2, 2, 0, 0])), 2);
        assert_eq!(fermion_identical_bound(&pattern(&[4, 0, 0, 0])), 1);
        let f = coarsen_threshold(&pattern(&[3, 1, 0, 0]));
        assert_eq!(f.fired(), &[true, true, false, false]);
        assert_eq!(f.to_string(), "(1,1,0,0)");
        assert_eq!(pattern(&[2, 1, 0]).to_string(), "(2,1,0)");
    }

    #[test]
    fn threshold_classification() {
        let three = unambiguous_firing_patterns(3, Statistics::Boson).unwrap();
        assert_eq!(three.len(), 3);
        assert!(three.iter().all(|f| f.count() == 2));
        // Adjacent pairs of ports: every preimage ((3,1,..), (1,3,..),
        // (2,2,..)) is impossible for identical bosons. Opposite pairs are
        // not, because (2,0,2,0) occurs.
        let four = unambiguous_firing_patterns(4, Statistics::Boson).unwrap();
        assert!(four.contains(&FiringPattern::new(vec![true, true, false, false])));
        assert!(!four.contains(&FiringPattern::new(vec![true, false, true, false])));
        assert!(four.contains(&FiringPattern::new(vec![true; 4])));
    }

    #[test]
    fn caps_enforced() {
        let s = PureState::basis(2, 0).unwrap();
        assert!(matches!(
            MultiportInput::identical(7, s, Statistics::Boson),
            Err(Error::Capacity { .. })
        ));
        let big = PureState::basis(5, 0).unwrap();
        assert!(matches!(
            MultiportInput::identical(2, big, Statistics::Boson),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn efficiency_is_deterministic() {
        let s = RngStreams::new(4);
        let a =
            realization_efficiency_mc(3, 2, Statistics::Boson, 50, &s, Detection::NumberResolving)
                .unwrap();
        let b =
            realization_efficiency_mc(3, 2, Statistics::Boson, 50, &s, Detection::NumberResolving)
                .unwrap();
        assert_eq!(a, b);
        let p = pairwise_efficiency_mc(4, 2, Statistics::Boson, 50, &s).unwrap();
        assert!((0.0..=1.0).contains(&p.estimate));
    }
}
