use qcompare::hilbert::{expectation, haar_random_state, tensor_product};
use qcompare::rng::RngStreams;
use qcompare::symmetry::{
    irrep_character, irrep_dimension, isotypic_projector, max_identical, partitions_of,
    subspace_dimension, Permutation,
};
use rand::seq::SliceRandom;

/// Row orthogonality of the character table:
/// `sum_sigma chi_l(sigma) chi_m(sigma) = n! delta_lm`.
#[test]
fn characters_are_orthonormal() {
    for n in 1..=6 {
        let perms = Permutation::all(n);
        let parts = partitions_of(n, n);
        for a in &parts {
            for b in &parts {
                let s: i64 = perms
                    .iter()
                    .map(|p| {
                        let ct = p.cycle_type();
                        irrep_character(a, &ct).unwrap() * irrep_character(b, &ct).unwrap()
                    })
                    .sum();
                let want = if a == b { perms.len() as i64 } else { 0 };
                assert_eq!(s, want, "{a} {b}");
            }
        }
        let squares: u128 = parts.iter().map(|l| irrep_dimension(l).pow(2)).sum();
        assert_eq!(squares, perms.len() as u128);
    }
}

#[test]
fn traces_match_dimensions() {
    for n in 1..=5usize {
        for d in 1..=3usize {
            let mut total = 0;
            for lambda in partitions_of(n, d) {
                let p = isotypic_projector(&lambda, d).unwrap();
                let dim = subspace_dimension(&lambda, d);
                assert!((p.trace().re - dim as f64).abs() < 1e-6, "{lambda} d={d}");
                total += dim;
            }
            assert_eq!(total, (d as u128).pow(n as u32));
        }
    }
}

/// A product with `m` copies of one state has no weight on blocks whose
/// first row is shorter than `m`.
#[test]
fn repeated_states_avoid_short_diagrams() {
    let streams = RngStreams::new(5);
    let mut sample = 0u64;
    for n in 2..=5usize {
        for d in 1..=3usize {
            let projectors: Vec<_> = partitions_of(n, d)
                .into_iter()
                .map(|l| {
                    let p = isotypic_projector(&l, d).unwrap();
                    (l, p)
                })
                .collect();
            for m in 1..=n {
                for _ in 0..3 {
                    let mut rng = streams.stream(sample);
                    sample += 1;
                    let psi = haar_random_state(d, &mut rng).unwrap();
                    let mut factors = vec![psi; m];
                    for _ in m..n {
                        factors.push(haar_random_state(d, &mut rng).unwrap());
                    }
                    factors.shuffle(&mut rng);
                    let product = tensor_product(&factors).unwrap();
                    for (lambda, p) in &projectors {
                        if m > max_identical(lambda) {
                            let e = expectation(p, &product).unwrap();
                            assert!(e < 1e-9, "n={n} d={d} m={m} {lambda}: {e}");
                        }
                    }
                }
            }
        }
    }
}
