//! Symmetric-group machinery on `N` qudits of dimension `D`.
//!
//! The space `(C^D)^{(x)N}` splits into blocks labelled by Young diagrams
//! `lambda` (partitions of `N` with at most `D` rows). Each block is invariant
//! under permuting the tensor factors and under `V^{(x)N}` for any unitary `V`.
//! Its projector is the central idempotent
//!
//! ```text
//! P_lambda = (d_lambda / N!) * sum_sigma chi_lambda(sigma) U(sigma)
//! ```
//!
//! with characters from the Murnaghan-Nakayama rule and `U(sigma)` the operator
//! that permutes tensor factors.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::hilbert::{capped_pow, Operator, C64};

/// A Young diagram: weakly decreasing positive row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return domain("partition must have at least one row");
        }
        if rows.contains(&0) {
            return domain("partition rows must be positive");
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("partition rows {rows:?} are not weakly decreasing"));
        }
        Ok(Self { rows })
    }

    /// The one-row diagram `(n)`.
    pub fn single_row(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// The one-column diagram `(1, ..., 1)`.
    pub fn single_column(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn first_row(&self) -> usize {
        self.rows[0]
    }

    /// Hook length of cell `(i, j)`.
    fn hook(&self, i: usize, j: usize) -> usize {
        let arm = self.rows[i] - j - 1;
        let leg = self.rows[i + 1..].iter().take_while(|&&r| r > j).count();
        arm + leg + 1
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, r) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// A bijection on `{0, ..., n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return domain(format!("{images:?} is not a permutation"));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Swap of slots `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return domain(format!(
                "transposition ({i} {j}) out of range for {n} slots"
            ));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Ok(Self { images })
    }

    /// The cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cyclic_shift(n: usize) -> Self {
        Self {
            images: (0..n).map(|i| (i + 1) % n.max(1)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self after other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    /// Cycle lengths, sorted descending.
    pub fn cycle_type(&self) -> Partition {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Partition { rows: lengths }
    }

    pub fn sign(&self) -> i64 {
        let ct = self.cycle_type();
        let transpositions: usize = ct.rows.iter().map(|l| l - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All `n!` permutations of `n` slots in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

/// Basis index `|d_0 ... d_{n-1}>` for each `x`, as digits, leftmost slowest.
fn digits_of(x: usize, n: usize, d: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    let mut rest = x;
    for k in (0..n).rev() {
        digits[k] = rest % d;
        rest /= d;
    }
    digits
}

/// For each basis index `x`, the index of `U(perm)|x>`. Slot `k`'s content
/// moves to slot `perm(k)`.
fn permutation_action(perm: &Permutation, n: usize, d: usize, dim: usize) -> Vec<usize> {
    let mut weights = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        weights[k] = weights[k + 1] * d;
    }
    (0..dim)
        .map(|x| {
            digits_of(x, n, d)
                .iter()
                .enumerate()
                .map(|(k, &digit)| digit * weights[perm.apply(k)])
                .sum()
        })
        .collect()
}

/// The unitary on `(C^d)^{(x)n}` mapping `|d_0 ... d_{n-1}>` to
/// `|d_{perm^-1(0)} ... d_{perm^-1(n-1)}>`.
pub fn permutation_operator(perm: &Permutation, n: usize, d: usize) -> Result<Operator> {
    if perm.len() != n {
        return domain(format!(
            "permutation on {} slots used for {n} systems",
            perm.len()
        ));
    }
    if d == 0 {
        return domain("local dimension must be >= 1");
    }
    let dim = capped_pow("permutation operator", d, n)?;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for (x, y) in permutation_action(perm, n, d, dim).into_iter().enumerate() {
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    Ok(Operator::from_matrix_unchecked(m))
}

/// Irreducible character `chi_lambda` at any permutation of the given cycle type.
pub fn irrep_character(lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
    if lambda.n() != cycle_type.n() {
        return domain(format!(
            "character of a partition of {} at a cycle type of {}",
            lambda.n(),
            cycle_type.n()
        ));
    }
    let mut memo = HashMap::new();
    Ok(murnaghan_nakayama(
        lambda.rows.clone(),
        &cycle_type.rows,
        &mut memo,
    ))
}

/// Strip rim hooks of length `cycles[0]` from `shape` and recurse. Shapes are
/// handled as beta-sets (first-column hook lengths): removing a rim hook of
/// length `r` moves one bead from `b` to `b - r`, with sign `(-1)^(beads
/// strictly between)`.
fn murnaghan_nakayama(
    shape: Vec<usize>,
    cycles: &[usize],
    memo: &mut HashMap<(Vec<usize>, Vec<usize>), i64>,
) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return if shape.is_empty() { 1 } else { 0 };
    };
    let key = (shape, cycles.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let shape = &key.0;
    let k = shape.len();
    let beta: Vec<usize> = shape
        .iter()
        .enumerate()
        .map(|(i, &l)| l + (k - 1 - i))
        .collect();
    let mut total = 0i64;
    for i in 0..k {
        let b = beta[i];
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[i] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let next: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(j, &x)| x - (k - 1 - j))
            .filter(|&row| row > 0)
            .collect();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * murnaghan_nakayama(next, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Dimension of the irreducible representation of `S_n`, by the hook-length formula.
pub fn irrep_dimension(lambda: &Partition) -> u128 {
    let n = lambda.n() as u128;
    let factorial: u128 = (1..=n).product();
    let hooks: u128 = lambda
        .cells()
        .map(|(i, j)| lambda.hook(i, j) as u128)
        .product();
    factorial / hooks
}

/// Dimension of the `GL(d)` irrep labelled by `lambda` (number of semistandard
/// tableaux with entries `< d`), by the hook-content formula. Zero when `lambda`
/// has more than `d` rows.
pub fn unitary_irrep_dimension(lambda: &Partition, d: usize) -> u128 {
    if lambda.num_rows() > d {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for (i, j) in lambda.cells() {
        // content j - i, and d + j - i > 0 since i < d
        num *= (d + j - i) as u128;
        den *= lambda.hook(i, j) as u128;
    }
    num / den
}

/// Dimension of the isotypic subspace of `lambda` in `(C^d)^{(x)n}`.
pub fn subspace_dimension(lambda: &Partition, d: usize) -> u128 {
    irrep_dimension(lambda) * unitary_irrep_dimension(lambda, d)
}

/// All partitions of `n` with at most `max_rows` rows, lexicographically decreasing.
pub fn partitions_of(n: usize, max_rows: usize) -> Vec<Partition> {
    fn extend(
        remaining: usize,
        cap: usize,
        rows_left: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition {
                rows: prefix.clone(),
            });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for part in (1..=cap.min(remaining)).rev() {
            prefix.push(part);
            extend(remaining - part, part, rows_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || max_rows == 0 {
        return out;
    }
    extend(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

/// The largest number of subsystems that can share one pure state inside the
/// `lambda` block: the first row length.
pub fn max_identical(lambda: &Partition) -> usize {
    lambda.first_row()
}

/// Smallest `m` such that some outcome certifies "no `m` states are
/// identical": the minimum over admissible diagrams of `first_row + 1`.
pub fn smallest_excluded_multiplicity(n: usize, d: usize) -> Option<usize> {
    partitions_of(n, d)
        .iter()
        .map(|p| max_identical(p) + 1)
        .min()
}

/// Projector onto the isotypic subspace of `lambda` in `(C^d)^{(x)n}`, where
/// `n = lambda.n()`. Diagrams with more than `d` rows give the zero operator.
pub fn isotypic_projector(lambda: &Partition, d: usize) -> Result<Operator> {
    if d == 0 {
        return domain("local dimension must be >= 1");
    }
    let n = lambda.n();
    let dim = capped_pow("isotypic projector", d, n)?;
    if lambda.num_rows() > d {
        return Ok(Operator::zeros(dim));
    }
    let irrep_dim = irrep_dimension(lambda) as f64;
    let group_order: f64 = (1..=n).map(|k| k as f64).product();
    let mut char_cache: HashMap<Partition, i64> = HashMap::new();
    let mut memo = HashMap::new();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for perm in Permutation::all(n) {
        let ct = perm.cycle_type();
        let chi = *char_cache
            .entry(ct.clone())
            .or_insert_with(|| murnaghan_nakayama(lambda.rows.clone(), &ct.rows, &mut memo));
        if chi == 0 {
            continue;
        }
        let coeff = C64::new(irrep_dim * chi as f64 / group_order, 0.0);
        for (x, y) in permutation_action(&perm, n, d, dim).into_iter().enumerate() {
            m[(y, x)] += coeff;
        }
    }
    Ok(Operator::from_matrix_unchecked(m))
}

/// Projector onto the totally symmetric subspace of `n` qudits.
pub fn symmetric_projector(n: usize, d: usize) -> Result<Operator> {
    if n == 0 {
        return domain("need at least one system");
    }
    isotypic_projector(&Partition::single_row(n)?, d)
}

/// `(1 - SWAP_ij) / 2`: the antisymmetric projector on slots `i`, `j`
/// tensored with the identity on the other slots.
pub fn pairwise_antisym_projector(i: usize, j: usize, n: usize, d: usize) -> Result<Operator> {
    if i == j {
        return domain(format!(
            "pairwise projector needs two distinct slots, got {i} twice"
        ));
    }
    let swap = Permutation::transposition(n, i, j)?;
    let u = permutation_operator(&swap, n, d)?;
    Ok((&Operator::identity(u.dim()) - &u).scale(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(p(&[3, 1]).to_string(), "(3,1)");
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(s.cycle_type(), p(&[3]));
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(3));
        assert_eq!(s.sign(), 1);
        assert_eq!(Permutation::transposition(3, 0, 2).unwrap().sign(), -1);
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn identity_permutation_is_identity_operator() {
        for (n, d) in [(1, 3), (2, 2), (3, 2)] {
            let u = permutation_operator(&Permutation::identity(n), n, d).unwrap();
            assert_eq!(u, Operator::identity(d.pow(n as u32)));
        }
    }

    #[test]
    fn swap_maps_01_to_10() {
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        let u = permutation_operator(&swap, 2, 2).unwrap();
        // |01> is index 1, |10> is index 2
        assert_eq!(u.matrix()[(2, 1)], C64::new(1.0, 0.0));
        assert_eq!(u.matrix()[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn permutation_operator_moves_slot_content() {
        // sigma = 0->1, 1->2, 2->0 on |0 1 2> gives |2 0 1>
        let s = Permutation::cyclic_shift(3);
        let u = permutation_operator(&s, 3, 3).unwrap();
        let x = 5; // 0*9 + 1*3 + 2
        let y = 2 * 9 + 1; // |2 0 1>
        assert_eq!(u.matrix()[(y, x)], C64::new(1.0, 0.0));
    }

    #[test]
    fn three_cycle_cubed_is_identity() {
        let s = Permutation::cyclic_shift(3);
        let u = permutation_operator(&s, 3, 2).unwrap();
        let cube = &(&u * &u) * &u;
        assert_eq!(cube, Operator::identity(8));
    }

    #[test]
    fn permutation_operator_size_mismatch() {
        assert!(permutation_operator(&Permutation::identity(3), 2, 2).is_err());
    }

    #[test]
    fn trivial_and_sign_characters() {
        for n in 1..=6 {
            for ct in partitions_of(n, n) {
                assert_eq!(irrep_character(&p(&[n]), &ct).unwrap(), 1);
                let sign = if (n - ct.num_rows()) % 2 == 0 { 1 } else { -1 };
                assert_eq!(
                    irrep_character(&Partition::single_column(n).unwrap(), &ct).unwrap(),
                    sign
                );
            }
        }
    }

    #[test]
    fn standard_rep_of_s3_has_dimension_two() {
        assert_eq!(irrep_character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(irrep_character(&p(&[2, 1]), &p(&[2, 1])).unwrap(), 0);
        assert_eq!(irrep_character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
    }

    #[test]
    fn s4_character_table() {
        // rows (4),(3,1),(2,2),(2,1,1),(1,1,1,1); columns 1^4, 2 1^2, 2^2, 3 1, 4
        let classes = [
            p(&[1, 1, 1, 1]),
            p(&[2, 1, 1]),
            p(&[2, 2]),
            p(&[3, 1]),
            p(&[4]),
        ];
        let table: [[i64; 5]; 5] = [
            [1, 1, 1, 1, 1],
            [3, 1, -1, 0, -1],
            [2, 0, 2, -1, 0],
            [3, -1, -1, 0, 1],
            [1, -1, 1, 1, -1],
        ];
        for (lambda, row) in partitions_of(4, 4).iter().zip(table) {
            for (ct, want) in classes.iter().zip(row) {
                assert_eq!(
                    irrep_character(lambda, ct).unwrap(),
                    want,
                    "{lambda} at {ct}"
                );
            }
        }
    }

    #[test]
    fn character_rejects_mismatched_sizes() {
        assert!(irrep_character(&p(&[2]), &p(&[1, 1, 1])).is_err());
    }

    #[test]
    fn partition_enumeration() {
        assert_eq!(partitions_of(3, 2), vec![p(&[3]), p(&[2, 1])]);
        assert_eq!(partitions_of(4, 2), vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        assert_eq!(partitions_of(5, 5).len(), 7);
        assert_eq!(partitions_of(6, 6).len(), 11);
        assert_eq!(
            partitions_of(4, 4),
            vec![
                p(&[4]),
                p(&[3, 1]),
                p(&[2, 2]),
                p(&[2, 1, 1]),
                p(&[1, 1, 1, 1])
            ]
        );
    }

    #[test]
    fn dimension_formulas() {
        assert_eq!(irrep_dimension(&p(&[2, 1])), 2);
        assert_eq!(irrep_dimension(&p(&[3, 2])), 5);
        assert_eq!(subspace_dimension(&p(&[2, 2]), 2), 2);
        assert_eq!(subspace_dimension(&p(&[1, 1, 1]), 3), 1);
        assert_eq!(subspace_dimension(&p(&[3]), 2), 4);
        assert_eq!(subspace_dimension(&p(&[3, 1]), 2), 9);
        assert_eq!(subspace_dimension(&p(&[1, 1, 1]), 2), 0);
        for n in 1..=7 {
            for d in 1..=5 {
                let total: u128 = partitions_of(n, d)
                    .iter()
                    .map(|l| subspace_dimension(l, d))
                    .sum();
                assert_eq!(total, (d as u128).pow(n as u32), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn max_identical_is_first_row() {
        assert_eq!(max_identical(&p(&[3, 1])), 3);
        assert_eq!(max_identical(&p(&[2, 2])), 2);
        assert_eq!(max_identical(&p(&[1, 1, 1, 1, 1])), 1);
    }

    #[test]
    fn excluded_multiplicity_matches_ceiling_rule() {
        for n in 1..=8usize {
            for d in 1..=6 {
                let want = n.div_ceil(d) + 1;
                assert_eq!(
                    smallest_excluded_multiplicity(n, d),
                    Some(want),
                    "n={n} d={d}"
                );
            }
        }
    }

    #[test]
    fn small_projectors() {
        let sym = isotypic_projector(&p(&[2]), 2).unwrap();
        let swap =
            permutation_operator(&Permutation::transposition(2, 0, 1).unwrap(), 2, 2).unwrap();
        let brute = (&Operator::identity(4) + &swap).scale(0.5);
        assert!(sym.max_abs_diff(&brute) < 1e-15);
        assert!((sym.trace().re - 3.0).abs() < 1e-12);

        let anti = isotypic_projector(&p(&[1, 1]), 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = crate::hilbert::PureState::from_real(&[0.0, h, -h, 0.0]).unwrap();
        assert!(anti.max_abs_diff(&singlet.projector()) < 1e-15);

        assert!((isotypic_projector(&p(&[3, 1]), 2).unwrap().trace().re - 9.0).abs() < 1e-9);
        assert_eq!(
            isotypic_projector(&p(&[1, 1, 1]), 2).unwrap(),
            Operator::zeros(8)
        );
    }

    #[test]
    fn symmetric_projector_traces() {
        for (n, want) in [(2, 3.0), (3, 4.0), (4, 5.0)] {
            let t = symmetric_projector(n, 2).unwrap().trace().re;
            assert!((t - want).abs() < 1e-10);
        }
    }

    #[test]
    fn projector_cap() {
        assert!(matches!(
            symmetric_projector(14, 2),
            Err(crate::Error::Capacity { .. })
        ));
    }

    #[test]
    fn pairwise_projector() {
        assert!(pairwise_antisym_projector(1, 1, 3, 2).is_err());
        assert!(pairwise_antisym_projector(0, 3, 3, 2).is_err());
        let p01 = pairwise_antisym_projector(0, 1, 2, 2).unwrap();
        let sym = symmetric_projector(2, 2).unwrap();
        assert!(p01.max_abs_diff(&(&Operator::identity(4) - &sym)) < 1e-15);
        let p02 = pairwise_antisym_projector(0, 2, 3, 3).unwrap();
        assert!((&p02 * &p02).max_abs_diff(&p02) < 1e-15);
        assert!(p02.is_hermitian(0.0));
    }
}
