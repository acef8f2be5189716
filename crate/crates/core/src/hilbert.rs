//! Dense complex linear algebra: pure states, operators, tensor products,
//! Hermitian eigendecomposition and Haar-random sampling.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Largest Hilbert-space dimension for which dense operators are built.
/// `D^N <= 8192` corresponds to `N log2 D <= 13`.
pub const MAX_DIM: usize = 8192;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Imaginary parts of expectation values above this are an error.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

pub(crate) fn check_dim(what: &'static str, dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::Capacity {
            what,
            requested: dim,
            cap: MAX_DIM,
        });
    }
    Ok(())
}

/// `base^exp`, or a capacity error if it does not fit under [`MAX_DIM`].
pub(crate) fn capped_pow(what: &'static str, base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc > MAX_DIM {
            return Err(Error::Capacity {
                what,
                requested: acc,
                cap: MAX_DIM,
            });
        }
    }
    Ok(acc)
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already unit-norm (within `1e-12`).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return domain("state must have at least one amplitude");
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return domain(format!("state is not normalized (norm {norm})"));
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return domain("state must have at least one amplitude");
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return domain(format!("cannot normalize vector of norm {norm}"));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return domain(format!(
                "basis index {index} out of range for dimension {dim}"
            ));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<self|other>|^2`
    pub fn overlap_sq(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|self><self|`
    pub fn projector(&self) -> Operator {
        Operator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return domain(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if matrix.nrows() == 0 {
            return domain("operator must have positive dimension");
        }
        check_dim("operator", matrix.nrows())?;
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator {
            matrix: self.matrix.scale(factor),
        }
    }

    /// Largest entrywise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest entrywise `|A - A^dagger|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in j..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `[self, other] = self other - other self`
    pub fn commutator(&self, other: &Operator) -> Operator {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        Operator { matrix: ab - ba }
    }

    /// Kronecker product, `self` as the slower (left) factor.
    pub fn kron(&self, other: &Operator) -> Result<Operator> {
        check_dim("kronecker product", self.dim().saturating_mul(other.dim()))?;
        Ok(Operator {
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// `self^{(x) copies}`
    pub fn kron_power(&self, copies: usize) -> Result<Operator> {
        if copies == 0 {
            return domain("tensor power needs at least one factor");
        }
        capped_pow("tensor power", self.dim(), copies)?;
        let mut acc = self.clone();
        for _ in 1..copies {
            acc = acc.kron(self)?;
        }
        Ok(acc)
    }

    /// `self |psi>`
    pub fn apply(&self, state: &PureState) -> Result<DVector<C64>> {
        if state.dim() != self.dim() {
            return domain(format!(
                "operator of dimension {} applied to state of dimension {}",
                self.dim(),
                state.dim()
            ));
        }
        Ok(&self.matrix * state.amplitudes())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// A finite mixture of pure states.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    members: Vec<(f64, PureState)>,
}

impl WeightedEnsemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some(dim) = members.first().map(|(_, s)| s.dim()) else {
            return domain("ensemble must have at least one member");
        };
        let mut total = 0.0;
        for (p, s) in &members {
            if !(0.0..=1.0).contains(p) {
                return domain(format!("ensemble weight {p} outside [0, 1]"));
            }
            if s.dim() != dim {
                return domain("ensemble members have different dimensions");
            }
            total += p;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return domain(format!("ensemble weights sum to {total}, not 1"));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }
}

/// Kronecker product of the states, first factor slowest.
pub fn tensor_product(states: &[PureState]) -> Result<PureState> {
    let Some((first, rest)) = states.split_first() else {
        return domain("tensor product of an empty list");
    };
    let dim = states
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.dim()))
        .unwrap_or(usize::MAX);
    // States are vectors, so allow more room than for matrices.
    if dim > MAX_DIM * MAX_DIM {
        return Err(Error::Capacity {
            what: "tensor product state",
            requested: dim,
            cap: MAX_DIM * MAX_DIM,
        });
    }
    let mut acc = first.amplitudes.clone();
    for s in rest {
        acc = acc.kronecker(&s.amplitudes);
    }
    Ok(PureState { amplitudes: acc })
}

/// A Haar-random pure state: i.i.d. standard complex Gaussian amplitudes, normalized.
pub fn haar_random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return domain("Haar state needs dimension >= 1");
    }
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
            .collect();
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq > 1e-300 {
            return PureState::normalized(v);
        }
    }
}

/// A Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Operator> {
    if dim == 0 {
        return domain("Haar unitary needs dimension >= 1");
    }
    check_dim("Haar unitary", dim)?;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(Operator { matrix: q })
}

/// `sum_i p_i |psi_i><psi_i|`
pub fn density_of(ensemble: &WeightedEnsemble) -> Operator {
    let dim = ensemble.dim();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (p, s) in &ensemble.members {
        let a = s.amplitudes();
        rho.ger(C64::new(*p, 0.0), a, &a.conjugate(), C64::new(1.0, 0.0));
    }
    Operator { matrix: rho }
}

/// Spectral decomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> PureState {
        PureState {
            amplitudes: self.vectors.column(k).into_owned(),
        }
    }

    /// `V diag(values) V^dagger`
    pub fn reconstruct(&self) -> Operator {
        let n = self.vectors.nrows();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            m.ger(
                C64::new(lambda, 0.0),
                &v,
                &v.conjugate(),
                C64::new(1.0, 0.0),
            );
        }
        Operator { matrix: m }
    }
}

/// Connected components of the sparsity graph of `m` (entries that are
/// exactly zero are absent edges). A Hermitian matrix is block diagonal over
/// these components, so it can be diagonalized one block at a time; the
/// symmetric-group projectors split into one block per occupation type.
fn blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn require_hermitian(op: &Operator) -> Result<()> {
    let defect = op.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return domain(format!("operator is not Hermitian (defect {defect:e})"));
    }
    Ok(())
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian operator.
pub fn hermitian_eig(op: &Operator) -> Result<HermitianEigen> {
    require_hermitian(op)?;
    let n = op.dim();
    let mut pairs: Vec<(f64, DVector<C64>)> = Vec::with_capacity(n);
    for idx in blocks(&op.matrix) {
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| op.matrix[(idx[i], idx[j])]);
        let eig = sub.symmetric_eigen();
        for c in 0..k {
            let mut v = DVector::<C64>::zeros(n);
            for (r, &row) in idx.iter().enumerate() {
                v[row] = eig.eigenvectors[(r, c)];
            }
            pairs.push((eig.eigenvalues[c], v));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (c, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(c, v);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(op: &Operator) -> Result<Vec<f64>> {
    require_hermitian(op)?;
    let mut values = Vec::with_capacity(op.dim());
    for idx in blocks(&op.matrix) {
        let k = idx.len();
        if k == 1 {
            values.push(op.matrix[(idx[0], idx[0])].re);
            continue;
        }
        let sub = DMatrix::from_fn(k, k, |i, j| op.matrix[(idx[i], idx[j])]);
        values.extend(sub.symmetric_eigenvalues().iter().copied());
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// A system handed to a measurement: a pure state or a density operator.
#[derive(Clone, Copy, Debug)]
pub enum Prepared<'a> {
    Pure(&'a PureState),
    Mixed(&'a Operator),
}

impl Prepared<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Prepared::Pure(s) => s.dim(),
            Prepared::Mixed(rho) => rho.dim(),
        }
    }
}

impl<'a> From<&'a PureState> for Prepared<'a> {
    fn from(s: &'a PureState) -> Self {
        Prepared::Pure(s)
    }
}

impl<'a> From<&'a Operator> for Prepared<'a> {
    fn from(rho: &'a Operator) -> Self {
        Prepared::Mixed(rho)
    }
}

/// `<psi|op|psi>` or `Tr(rho op)` without the Hermiticity check on `op`.
pub(crate) fn expectation_unchecked(op: &Operator, system: Prepared<'_>) -> Result<f64> {
    if system.dim() != op.dim() {
        return domain(format!(
            "operator of dimension {} measured on system of dimension {}",
            op.dim(),
            system.dim()
        ));
    }
    let value = match system {
        Prepared::Pure(s) => {
            let a = s.amplitudes();
            a.dotc(&(&op.matrix * a))
        }
        Prepared::Mixed(rho) => {
            // Tr(rho op) = sum_ij rho_ij op_ji
            let n = op.dim();
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                for i in 0..n {
                    acc += rho.matrix[(i, j)] * op.matrix[(j, i)];
                }
            }
            acc
        }
    };
    if value.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Expectation value of a Hermitian operator on a pure or mixed state.
pub fn expectation<'a>(op: &Operator, system: impl Into<Prepared<'a>>) -> Result<f64> {
    require_hermitian(op)?;
    expectation_unchecked(op, system.into())
}
