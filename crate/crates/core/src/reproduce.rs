//! The acceptance checks, as data.
//!
//! Each criterion returns a list of [`Check`]s; a criterion passes when all of
//! its checks do. The same functions back the `acceptance` test target and the
//! `qcompare reproduce` command.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::comparison::{
    detailed_strategy, success_probability_analytic, success_probability_mc, universal_strategy,
    InputEnsemble, OutcomeLabel,
};
use crate::discrimination::{
    bayes, build_hypotheses, errorfree_plus_guess, helstrom, joint_probabilities,
    simulate_strategy, trine_scenario, CostMatrix, HypothesisPair, Verdict,
};
use crate::error::Result;
use crate::hilbert::{
    density_of, expectation, haar_random_state, haar_random_unitary, tensor_product, Operator,
    PureState, WeightedEnsemble, C64,
};
use crate::multiport::{
    compositions, dft_multiport, efficiency_samples, fermion_identical_bound, output_distribution,
    unambiguous_patterns, FockPattern, MultiportInput, Statistics,
};
use crate::rng::{McEstimate, RngStreams};
use crate::symmetry::{
    isotypic_projector, pairwise_antisym_projector, partitions_of, permutation_operator,
    subspace_dimension, symmetric_projector, Partition, Permutation,
};

/// Number of standard errors allowed in statistical checks.
pub const SIGMA: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: expected {}, got {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.expected,
            self.got
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// Perturb the symmetric projector used by criteria 1 to 4. Every run with
    /// this set must fail.
    pub corrupt_symmetric_projector: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            corrupt_symmetric_projector: false,
        }
    }
}

impl ReproduceOptions {
    fn symmetric_projector(&self, n: usize, d: usize) -> Result<Operator> {
        let p = symmetric_projector(n, d)?;
        if !self.corrupt_symmetric_projector {
            return Ok(p);
        }
        let mut m = p.into_matrix();
        m[(0, 0)] += C64::new(0.01, 0.0);
        Operator::new(m)
    }

    fn isotypic_projector(&self, lambda: &Partition, d: usize) -> Result<Operator> {
        if lambda.num_rows() == 1 {
            self.symmetric_projector(lambda.n(), d)
        } else {
            isotypic_projector(lambda, d)
        }
    }
}

fn exact(criterion: u8, name: impl Into<String>, expected: u128, got: u128) -> Check {
    Check {
        criterion,
        name: name.into(),
        expected: expected.to_string(),
        got: got.to_string(),
        passed: expected == got,
    }
}

fn close(criterion: u8, name: impl Into<String>, expected: f64, got: f64, tol: f64) -> Check {
    Check {
        criterion,
        name: name.into(),
        expected: format!("{expected:.12} (tol {tol:e})"),
        got: format!("{got:.12}"),
        passed: (expected - got).abs() <= tol,
    }
}

fn at_most(criterion: u8, name: impl Into<String>, bound: f64, got: f64) -> Check {
    Check {
        criterion,
        name: name.into(),
        expected: format!("<= {bound:e}"),
        got: format!("{got:e}"),
        passed: got <= bound,
    }
}

fn statistical(criterion: u8, name: impl Into<String>, target: f64, est: McEstimate) -> Check {
    let z = est.z_score(target);
    Check {
        criterion,
        name: name.into(),
        expected: format!("{target:.6} within {SIGMA} std errors"),
        got: format!("{:.6} +- {:.6} (z = {z:.2})", est.estimate, est.std_error),
        passed: z <= SIGMA,
    }
}

fn flag(
    criterion: u8,
    name: impl Into<String>,
    expected: &str,
    got: String,
    passed: bool,
) -> Check {
    Check {
        criterion,
        name: name.into(),
        expected: expected.into(),
        got,
        passed,
    }
}

/// Rank of a projector, read off its trace. Returns `None` when the trace is
/// not an integer within `1e-9`.
fn projector_rank(p: &Operator) -> Option<u128> {
    let t = p.trace().re;
    let r = t.round();
    ((t - r).abs() <= 1e-9 && r >= 0.0).then_some(r as u128)
}

fn rank_check(criterion: u8, name: String, expected: u128, p: &Operator) -> Check {
    let t = p.trace().re;
    Check {
        criterion,
        name,
        expected: expected.to_string(),
        got: match projector_rank(p) {
            Some(r) => r.to_string(),
            None => format!("non-integer trace {t}"),
        },
        passed: projector_rank(p) == Some(expected),
    }
}

type DimCase = (usize, usize, &'static [(&'static [usize], u128)]);

/// Subspace dimensions, from the hook formulas and from projector traces.
pub fn criterion_1(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    // (N, D, [(diagram, dimension)])
    let cases: [DimCase; 2] = [
        (3, 2, &[(&[3], 4), (&[2, 1], 4)]),
        (4, 2, &[(&[4], 5), (&[3, 1], 9), (&[2, 2], 2)]),
    ];
    for (n, d, rows) in cases {
        for &(shape, want) in rows {
            let lambda = Partition::new(shape.to_vec())?;
            out.push(exact(
                1,
                format!("dim {lambda} at N={n}, D={d}"),
                want,
                subspace_dimension(&lambda, d),
            ));
            let p = opts.isotypic_projector(&lambda, d)?;
            out.push(rank_check(
                1,
                format!("rank of projector {lambda} at N={n}, D={d}"),
                want,
                &p,
            ));
        }
    }
    let parts = partitions_of(5, 5);
    out.push(exact(
        1,
        "number of subspaces at N=5, D=5",
        7,
        parts.len() as u128,
    ));
    let total: u128 = parts.iter().map(|l| subspace_dimension(l, 5)).sum();
    out.push(exact(1, "sum of dims at N=5, D=5", 3125, total));
    let mut rank_total = 0u128;
    let mut ranks_ok = true;
    for lambda in &parts {
        let p = opts.isotypic_projector(lambda, 5)?;
        match projector_rank(&p) {
            Some(r) if r == subspace_dimension(lambda, 5) => rank_total += r,
            _ => ranks_ok = false,
        }
    }
    out.push(flag(
        1,
        "projector ranks at N=5, D=5 match dims",
        "7 integer ranks summing to 3125",
        format!("sum {rank_total}, all match: {ranks_ok}"),
        ranks_ok && rank_total == 3125,
    ));
    Ok(out)
}

/// Average universal success probability, analytic and sampled.
pub fn criterion_2(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let streams = RngStreams::new(opts.seed).fork(2);
    for (n, d, want) in [(2usize, 2usize, 0.25), (3, 2, 0.5)] {
        let analytic = success_probability_analytic(n, d);
        out.push(close(
            2,
            format!("analytic success N={n}, D={d}"),
            want,
            analytic,
            1e-12,
        ));
        // Tr P_sym / D^N is the average probability of the inconclusive outcome
        let p_sym = opts.symmetric_projector(n, d)?;
        let p_from_trace = 1.0 - p_sym.trace().re / (d as f64).powi(n as i32);
        out.push(close(
            2,
            format!("1 - Tr P_sym / D^N at N={n}, D={d}"),
            want,
            p_from_trace,
            1e-12,
        ));
        for (salt, ensemble) in [(0, InputEnsemble::Entangled), (1, InputEnsemble::Product)] {
            let est = success_probability_mc(
                n,
                d,
                100_000,
                &streams.fork(salt + 10 * n as u64),
                ensemble,
            )?;
            out.push(statistical(
                2,
                format!("sampled success N={n}, D={d}, {ensemble:?}"),
                want,
                est,
            ));
        }
    }
    Ok(out)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Completeness, orthogonality, idempotence and invariance of the projectors.
pub fn criterion_3(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let streams = RngStreams::new(opts.seed).fork(3);
    for n in 2..=4usize {
        for d in 1..=3usize {
            let tag = format!("N={n}, D={d}");
            let dim = d.pow(n as u32);
            let projectors: Vec<Operator> = partitions_of(n, d)
                .iter()
                .map(|l| opts.isotypic_projector(l, d))
                .collect::<Result<_>>()?;
            let sum = projectors
                .iter()
                .fold(Operator::zeros(dim), |acc, p| &acc + p);
            out.push(at_most(
                3,
                format!("completeness {tag}"),
                1e-9,
                sum.max_abs_diff(&Operator::identity(dim)),
            ));
            let mut ortho = 0.0f64;
            let mut idem = 0.0f64;
            for (i, p) in projectors.iter().enumerate() {
                idem = idem.max((p * p).max_abs_diff(p));
                for q in &projectors[i + 1..] {
                    ortho = ortho.max(max_abs((p * q).matrix()));
                }
            }
            out.push(at_most(3, format!("orthogonality {tag}"), 1e-9, ortho));
            out.push(at_most(3, format!("idempotence {tag}"), 1e-9, idem));

            let mut perm_comm = 0.0f64;
            let mut brute = Operator::zeros(dim);
            let perms = Permutation::all(n);
            for perm in &perms {
                let u = permutation_operator(perm, n, d)?;
                for p in &projectors {
                    perm_comm = perm_comm.max(max_abs(p.commutator(&u).matrix()));
                }
                brute = &brute + &u;
            }
            out.push(at_most(
                3,
                format!("commutes with permutations {tag}"),
                1e-8,
                perm_comm,
            ));
            let mut haar_comm = 0.0f64;
            for t in 0..10u64 {
                let mut rng = streams.stream(t + 100 * (n * 10 + d) as u64);
                let v = haar_random_unitary(d, &mut rng)?.kron_power(n)?;
                for p in &projectors {
                    haar_comm = haar_comm.max(max_abs(p.commutator(&v).matrix()));
                }
            }
            out.push(at_most(
                3,
                format!("commutes with V^(x)N {tag}"),
                1e-8,
                haar_comm,
            ));
            let brute = brute.scale(1.0 / perms.len() as f64);
            let sym = opts.symmetric_projector(n, d)?;
            out.push(at_most(
                3,
                format!("symmetrizer average equals P_sym {tag}"),
                1e-10,
                brute.max_abs_diff(&sym),
            ));
        }
    }
    Ok(out)
}

/// The non-symmetric projector written through pairwise antisymmetric projectors.
pub fn criterion_4(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let three = {
        let (n, d) = (3, 2);
        let nonsym = &Operator::identity(8) - &opts.symmetric_projector(n, d)?;
        let mut rhs = Operator::zeros(8);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            rhs = &rhs + &pairwise_antisym_projector(i, j, n, d)?;
        }
        nonsym.max_abs_diff(&rhs.scale(2.0 / 3.0))
    };
    out.push(at_most(
        4,
        "three qubits: 1 - P_sym = (2/3) sum of pair projectors",
        1e-10,
        three,
    ));

    let (n, d) = (4, 2);
    let id = Operator::identity(16);
    let nonsym = &id - &opts.symmetric_projector(n, d)?;
    let mut once = Operator::zeros(16);
    let mut twice = Operator::zeros(16);
    for perm in Permutation::all(4) {
        let [i, j, k, l] = [0, 1, 2, 3].map(|s| perm.apply(s));
        if i > j && k > l {
            let pij = pairwise_antisym_projector(i, j, n, d)?;
            let pkl = pairwise_antisym_projector(k, l, n, d)?;
            once = &once + &(&pij * &(&id - &pkl));
            twice = &twice + &(&pij * &pkl);
        }
    }
    let rhs = &once.scale(0.5) + &twice.scale(1.0 / 3.0);
    out.push(at_most(
        4,
        "four qubits: 1 - P_sym from products of pair projectors",
        1e-10,
        nonsym.max_abs_diff(&rhs),
    ));
    Ok(out)
}

/// Minimum-error comparison of two systems drawn from the trine states.
pub fn criterion_5(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let scenario = trine_scenario();
    let h = build_hypotheses(&scenario)?;
    let dec = helstrom(&h)?;
    let want = [1.0 / 12.0, -1.0 / 12.0, -1.0 / 12.0, -0.25];
    let dev = dec
        .eigenvalues
        .iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    out.push(flag(
        5,
        "eigenvalues of p_S rho_S - p_D rho_D",
        "{1/12, -1/12, -1/12, -1/4} within 1e-10",
        format!("{:?}", dec.eigenvalues),
        dec.eigenvalues.len() == 4 && dev <= 1e-10,
    ));
    out.push(close(
        5,
        "minimum error probability",
        0.25,
        dec.value,
        1e-10,
    ));
    // (|++> + |-->)/sqrt 2 in the basis the trine states are written in
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let target = PureState::from_real(&[h2, 0.0, 0.0, h2])?;
    let eig = crate::hilbert::hermitian_eig(&h.helstrom_operator())?;
    let fidelity = eig.vector(0).overlap_sq(&target);
    out.push(Check {
        criterion: 5,
        name: "positive eigenvector".into(),
        expected: "fidelity > 1 - 1e-9".into(),
        got: format!("{fidelity:.15}"),
        passed: fidelity > 1.0 - 1e-9,
    });
    let guessed = errorfree_plus_guess(&scenario)?;
    out.push(close(
        5,
        "error-free comparison plus best guess",
        1.0 / 3.0,
        guessed.p_error,
        1e-10,
    ));
    let sim = simulate_strategy(
        &dec.strategy,
        &scenario,
        100_000,
        &RngStreams::new(opts.seed).fork(5),
        Verdict::Different,
    )?;
    out.push(statistical(5, "simulated error rate", 0.25, sim));
    Ok(out)
}

fn random_hypotheses<R: Rng + ?Sized>(rng: &mut R) -> Result<HypothesisPair> {
    let dim = rng.random_range(2..=5);
    let mixture = |rng: &mut R| -> Result<Operator> {
        let k = rng.random_range(1..=3);
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let members = weights
            .iter()
            .map(|w| Ok((w / total, haar_random_state(dim, rng)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(density_of(&WeightedEnsemble::new(members)?))
    };
    let rho_same = mixture(rng)?;
    let rho_diff = mixture(rng)?;
    let p = rng.random_range(0.05..0.95);
    HypothesisPair::new(rho_same, p, rho_diff, 1.0 - p)
}

/// Equal-cost Bayes equals Helstrom, and the trace-norm identity.
pub fn criterion_6(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let streams = RngStreams::new(opts.seed).fork(6);
    let costs = CostMatrix::error_counting();
    let (mut op_dev, mut cost_dev, mut identity_dev) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..20u64 {
        let mut rng = streams.stream(t);
        let h = random_hypotheses(&mut rng)?;
        let hel = helstrom(&h)?;
        let bay = bayes(&h, &costs)?;
        for label in [OutcomeLabel::Same, OutcomeLabel::Different] {
            let a = &hel
                .strategy
                .element(label)
                .expect("binary strategy")
                .operator;
            let b = &bay
                .strategy
                .element(label)
                .expect("binary strategy")
                .operator;
            op_dev = op_dev.max(a.max_abs_diff(b));
        }
        cost_dev = cost_dev.max((hel.value - bay.value).abs());
        let joint = joint_probabilities(&hel.strategy, &h, Verdict::Different)?;
        let p_correct = joint[0][0] + joint[1][1];
        let p_error = joint[0][1] + joint[1][0];
        // Tr sqrt(O^2) as the sum of singular values, independent of the
        // eigendecomposition the strategy was built from
        let trace_norm: f64 = h.helstrom_operator().into_matrix().singular_values().sum();
        identity_dev = identity_dev.max((p_correct - p_error - trace_norm).abs());
    }
    Ok(vec![
        at_most(
            6,
            "Bayes vs Helstrom strategy operators, 20 random pairs",
            1e-9,
            op_dev,
        ),
        at_most(
            6,
            "Bayes cost vs Helstrom error, 20 random pairs",
            1e-10,
            cost_dev,
        ),
        at_most(
            6,
            "p_c - p_e = Tr sqrt(O^2), 20 random pairs",
            1e-9,
            identity_dev,
        ),
    ])
}

fn identical_distribution(
    n: usize,
    state: PureState,
) -> Result<crate::multiport::OutputDistribution> {
    output_distribution(
        &MultiportInput::identical(n, state, Statistics::Boson)?,
        &dft_multiport(n)?,
    )
}

fn is_type_of(c: &[usize], sorted: &[usize]) -> bool {
    let mut s = c.to_vec();
    s.sort_unstable();
    s == sorted
}

/// Multiport output statistics and click-pattern classification.
pub fn criterion_7(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let streams = RngStreams::new(opts.seed).fork(7);
    let mut rng = streams.stream(0);
    let generic = haar_random_state(2, &mut rng)?;

    let three = identical_distribution(3, generic.clone())?;
    let mut dev = 0.0f64;
    for c in compositions(3, 3) {
        let want = if c == [1, 1, 1] {
            1.0 / 3.0
        } else if c.contains(&3) {
            2.0 / 9.0
        } else {
            0.0
        };
        dev = dev.max((three.get(&FockPattern::new(c)) - want).abs());
    }
    out.push(at_most(
        7,
        "three identical bosons: {1/3, 2/9, 2/9, 2/9}",
        1e-10,
        dev,
    ));

    // ten monomials: four (4,0,0,0), two (2,0,2,0), four cyclic (2,1,0,1)
    let mut expected: BTreeMap<FockPattern, f64> = BTreeMap::new();
    for k in 0..4 {
        let rot =
            |base: [usize; 4]| FockPattern::new((0..4).map(|j| base[(j + 4 - k) % 4]).collect());
        expected.insert(rot([4, 0, 0, 0]), 24.0 / 256.0);
        expected.insert(rot([2, 0, 2, 0]), 16.0 / 256.0);
        expected.insert(rot([2, 1, 0, 1]), 32.0 / 256.0);
    }
    let four = identical_distribution(4, generic.clone())?;
    let support = four.support();
    let want_support: BTreeSet<FockPattern> = expected.keys().cloned().collect();
    out.push(flag(
        7,
        "four identical bosons: support is the ten expected patterns",
        "10 patterns",
        format!(
            "{} patterns, match: {}",
            support.len(),
            support == want_support
        ),
        support == want_support && expected.len() == 10,
    ));
    let dev = expected
        .iter()
        .map(|(p, w)| (four.get(p) - w).abs())
        .fold(0.0, f64::max);
    out.push(at_most(
        7,
        "four identical bosons: probabilities",
        1e-10,
        dev,
    ));
    out.push(close(
        7,
        "four identical bosons: total over support",
        1.0,
        four.mass(&support),
        1e-10,
    ));

    let named: [(usize, Vec<FockPattern>); 3] = [
        (2, vec![FockPattern::new(vec![1, 1])]),
        (
            3,
            compositions(3, 3)
                .into_iter()
                .filter(|c| is_type_of(c, &[0, 1, 2]))
                .map(FockPattern::new)
                .collect(),
        ),
        (
            4,
            compositions(4, 4)
                .into_iter()
                .filter(|c| c == &[1, 1, 1, 1] || is_type_of(c, &[0, 0, 1, 3]))
                .map(FockPattern::new)
                .collect(),
        ),
    ];
    for (n, patterns) in named {
        let set = unambiguous_patterns(n, Statistics::Boson)?;
        let missing = patterns.iter().filter(|p| !set.contains(p)).count();
        out.push(flag(
            7,
            format!("N={n}: unambiguous set contains the named patterns"),
            "0 missing",
            format!("{missing} missing of {}", patterns.len()),
            missing == 0,
        ));
        let state = haar_random_state(3, &mut rng)?;
        let dist = identical_distribution(n, state)?;
        let leaked = dist.mass(&set);
        out.push(at_most(
            7,
            format!("N={n}: unambiguous set has no identical-input mass"),
            1e-10,
            leaked,
        ));
    }

    let mut worst = 0.0f64;
    for n in 2..=5 {
        let state = haar_random_state(2, &mut rng)?;
        let input = MultiportInput::identical(n, state, Statistics::Fermion)?;
        let dist = output_distribution(&input, &dft_multiport(n)?)?;
        worst = worst.max((dist.get(&FockPattern::new(vec![1; n])) - 1.0).abs());
    }
    out.push(at_most(
        7,
        "identical fermions always spread out, N=2..5",
        1e-10,
        worst,
    ));

    let mut violation = 0.0f64;
    for t in 0..20u64 {
        let mut rng = streams.stream(1000 + t);
        let n = 2 + (t as usize % 3);
        let m = rng.random_range(2..=n);
        let d = 2 + (t as usize % 2);
        let shared = haar_random_state(d, &mut rng)?;
        let mut states = vec![shared; m];
        for _ in m..n {
            states.push(haar_random_state(d, &mut rng)?);
        }
        states.shuffle(&mut rng);
        let dist = output_distribution(
            &MultiportInput::new(states, Statistics::Fermion)?,
            &dft_multiport(n)?,
        )?;
        for (p, q) in dist.iter() {
            if fermion_identical_bound(p) < m {
                violation = violation.max(q);
            }
        }
    }
    out.push(at_most(
        7,
        "fermions: fewer than m firing ports never seen with m identical, 20 inputs",
        1e-9,
        violation,
    ));
    Ok(out)
}

/// Efficiency of the multiport realization.
pub fn criterion_8(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let streams = RngStreams::new(opts.seed).fork(8);
    let resolved = |n, d, trials, salt| -> Result<(McEstimate, McEstimate)> {
        let samples = efficiency_samples(n, d, Statistics::Boson, trials, &streams.fork(salt))?;
        let r: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let gap: Vec<f64> = samples.iter().map(|s| s.0 - s.1).collect();
        Ok((McEstimate::from_samples(&r), McEstimate::from_samples(&gap)))
    };

    let (two, _) = resolved(2, 2, 100_000, 1)?;
    out.push(statistical(
        8,
        "N=2, D=2 multiport efficiency",
        success_probability_analytic(2, 2),
        two,
    ));

    for (n, d, trials, salt) in [
        (3usize, 2usize, 100_000usize, 2u64),
        (3, 3, 20_000, 3),
        (4, 2, 20_000, 4),
    ] {
        let (est, gap) = resolved(n, d, trials, salt)?;
        let bound = success_probability_analytic(n, d);
        let upper = est.estimate + SIGMA * est.std_error;
        out.push(Check {
            criterion: 8,
            name: format!("N={n}, D={d} multiport efficiency strictly below the projective value"),
            expected: format!("estimate + {SIGMA} std errors < {bound:.6}"),
            got: format!("{:.6} +- {:.6}", est.estimate, est.std_error),
            passed: upper < bound,
        });
        let lower = gap.estimate + SIGMA * gap.std_error;
        out.push(Check {
            criterion: 8,
            name: format!("N={n}, D={d} threshold detection no better than number resolving"),
            expected: format!("mean (resolved - threshold) >= -{SIGMA} std errors"),
            got: format!("{:.6} +- {:.6}", gap.estimate, gap.std_error),
            passed: lower >= 0.0,
        });
    }
    Ok(out)
}

/// Error-free guarantee on identical inputs, and the Haar second moment.
pub fn criterion_9(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let streams = RngStreams::new(opts.seed).fork(9);
    let mut strategies = BTreeMap::new();
    let mut worst = 0.0f64;
    for t in 0..100u64 {
        let mut rng = streams.stream(t);
        let n = rng.random_range(2..=5usize);
        let d = rng.random_range(1..=3usize);
        if let std::collections::btree_map::Entry::Vacant(slot) = strategies.entry((n, d)) {
            slot.insert((universal_strategy(n, d)?, detailed_strategy(n, d)?));
        }
        let (universal, detailed) = &strategies[&(n, d)];
        let psi = haar_random_state(d, &mut rng)?;
        let copies = tensor_product(&vec![psi; n])?;
        for strategy in [universal, detailed] {
            for e in strategy.elements() {
                if e.label.asserts_difference() {
                    worst = worst.max(expectation(&e.operator, &copies)?);
                }
            }
        }
    }
    let mut out = vec![at_most(
        9,
        "identical copies never produce a difference verdict, 100 instances with N<=5, D<=3",
        1e-9,
        worst,
    )];

    // E|psi><psi| = 1/dim; check every real and imaginary entry
    let dim = 4;
    let samples = 100_000u64;
    let haar = streams.fork(1);
    let draws: Vec<PureState> = (0..samples)
        .map(|t| haar_random_state(dim, &mut haar.stream(t)))
        .collect::<Result<_>>()?;
    let mut worst_z = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let entries: Vec<C64> = draws
                .iter()
                .map(|s| s.amplitudes()[r] * s.amplitudes()[c].conj())
                .collect();
            let target = if r == c { 1.0 / dim as f64 } else { 0.0 };
            let re = McEstimate::from_samples(&entries.iter().map(|z| z.re).collect::<Vec<_>>());
            worst_z = worst_z.max(re.z_score(target));
            if r != c {
                let im =
                    McEstimate::from_samples(&entries.iter().map(|z| z.im).collect::<Vec<_>>());
                worst_z = worst_z.max(im.z_score(0.0));
            }
        }
    }
    out.push(Check {
        criterion: 9,
        name: "Haar second moment at dim 4, 1e5 samples".into(),
        expected: format!(
            "every entry of the mean projector within {SIGMA} std errors of 1/4 * identity"
        ),
        got: format!("largest z = {worst_z:.2}"),
        passed: worst_z <= SIGMA,
    });
    Ok(out)
}

pub type CriterionFn = fn(&ReproduceOptions) -> Result<Vec<Check>>;

/// All criteria in order.
pub const CRITERIA: [(u8, &str, CriterionFn); 9] = [
    (1, "subspace dimensions", criterion_1),
    (2, "average universal success probability", criterion_2),
    (3, "projector algebra", criterion_3),
    (4, "pairwise decompositions", criterion_4),
    (5, "trine minimum-error comparison", criterion_5),
    (6, "Bayes and Helstrom consistency", criterion_6),
    (7, "multiport statistics", criterion_7),
    (8, "multiport efficiency", criterion_8),
    (9, "error-free guarantee and Haar moments", criterion_9),
];

pub fn run_all(opts: &ReproduceOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (_, _, f) in CRITERIA {
        out.extend(f(opts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lines() {
        let c = close(5, "x", 0.25, 0.25, 1e-10);
        assert!(c.passed);
        assert!(c.to_string().starts_with("PASS [5] x: expected 0.25"));
        assert!(!close(5, "x", 0.25, 0.3, 1e-10).passed);
    }

    #[test]
    fn corruption_breaks_the_cheap_criteria() {
        let bad = ReproduceOptions {
            corrupt_symmetric_projector: true,
            ..Default::default()
        };
        assert!(criterion_4(&bad).unwrap().iter().any(|c| !c.passed));
        assert!(criterion_4(&ReproduceOptions::default())
            .unwrap()
            .iter()
            .all(|c| c.passed));
    }
}
