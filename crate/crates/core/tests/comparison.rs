use qcompare::comparison::{
    detailed_strategy, success_probability_analytic, success_probability_mc, universal_strategy,
    InputEnsemble, OutcomeLabel,
};
use qcompare::hilbert::{expectation, haar_random_state, hermitian_eigenvalues, tensor_product};
use qcompare::rng::RngStreams;
use qcompare::symmetry::symmetric_projector;
use qcompare::{Operator, PureState};

#[test]
fn identical_copies_never_certify_a_difference() {
    let streams = RngStreams::new(11);
    for t in 0..100u64 {
        let n = 2 + (t as usize % 4);
        let d = 1 + (t as usize / 4 % 3);
        let mut rng = streams.stream(t);
        let psi = haar_random_state(d, &mut rng).unwrap();
        let copies = tensor_product(&vec![psi; n]).unwrap();
        for strategy in [
            universal_strategy(n, d).unwrap(),
            detailed_strategy(n, d).unwrap(),
        ] {
            for e in strategy.elements() {
                if e.label.asserts_difference() {
                    assert!(
                        expectation(&e.operator, &copies).unwrap() < 1e-9,
                        "n={n} d={d} {}",
                        e.label
                    );
                }
            }
        }
    }
}

#[test]
fn sampled_success_matches_closed_form() {
    for (i, (n, d)) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)]
        .into_iter()
        .enumerate()
    {
        let est = success_probability_mc(
            n,
            d,
            100_000,
            &RngStreams::new(i as u64),
            InputEnsemble::Product,
        )
        .unwrap();
        let want = success_probability_analytic(n, d);
        assert!(est.z_score(want) < 5.0, "n={n} d={d}: {est:?} vs {want}");
    }
}

#[test]
fn symmetric_entangled_states_pass() {
    let (n, d) = (3, 2);
    let sym = symmetric_projector(n, d).unwrap();
    let strategy = universal_strategy(n, d).unwrap();
    let not_all_same = &strategy.element(OutcomeLabel::NotAllSame).unwrap().operator;
    let streams = RngStreams::new(12);
    for t in 0..100 {
        let raw = haar_random_state(8, &mut streams.stream(t)).unwrap();
        let projected = sym.apply(&raw).unwrap();
        let psi = PureState::normalized(projected.iter().copied().collect()).unwrap();
        assert!(expectation(not_all_same, &psi).unwrap() < 1e-9);
    }
}

#[test]
fn strategies_are_povms() {
    for n in 1..=4 {
        for d in 1..=3 {
            for s in [
                universal_strategy(n, d).unwrap(),
                detailed_strategy(n, d).unwrap(),
            ] {
                let dim = s.dim();
                let sum = s
                    .elements()
                    .iter()
                    .fold(Operator::zeros(dim), |acc, e| &acc + &e.operator);
                assert!(sum.max_abs_diff(&Operator::identity(dim)) < 1e-9);
                for e in s.elements() {
                    let min = hermitian_eigenvalues(&e.operator)
                        .unwrap()
                        .last()
                        .copied()
                        .unwrap();
                    assert!(min > -1e-9);
                }
            }
        }
    }
}
