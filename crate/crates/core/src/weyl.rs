//! Dense complex realization of the Weyl operators and the Hilbert-Schmidt
//! geometry of `M_p (x) M_p`.
//!
//! Conventions: storage index `k = 0..p-1` stands for basis vector
//! `e_{k+1}`, so `Z = diag(ω, ω^2, ..., ω^p)` with `ω = exp(2πi/p)` and
//! `X e_i = e_{i+1}`. Tensor products are row-major Kronecker products with
//! the first system outermost; a label `(u1,u2,u3,u4)` stands for
//! `X^{u1} Z^{u2} (x) X^{u3} Z^{u4}`. Phases are never normalized away.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::residue::{Prime, Vec4};
use crate::subalgebra::SubalgebraDesc;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn omega(p: Prime) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / p.get() as f64)
}

fn omega_pow(p: Prime, k: u64) -> Complex64 {
    let n = p.get() as u64;
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// `X^a Z^b` on `C^p`: entry `(k + a, k)` equals `ω^{b(k+1)}`.
pub fn weyl_single(p: Prime, a: u32, b: u32) -> ComplexMatrix {
    let n = p.get() as usize;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m[((k + a as usize) % n, k)] = omega_pow(p, b as u64 * (k as u64 + 1));
    }
    m
}

/// The clock and shift matrices `(Z, X)`.
pub fn clock_shift(p: Prime) -> (ComplexMatrix, ComplexMatrix) {
    (weyl_single(p, 0, 1), weyl_single(p, 1, 0))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn weyl_tensor(v: &Vec4) -> ComplexMatrix {
    let p = v.modulus();
    let [u1, u2, u3, u4] = v.coords();
    kron(&weyl_single(p, u1, u2), &weyl_single(p, u3, u4))
}

/// `W_u v` without forming the matrix: `X^a Z^b e_k = ω^{b(k+1)} e_{k+a}`
/// on each factor.
pub fn weyl_apply(u: &Vec4, v: &ComplexVector) -> ComplexVector {
    let p = u.modulus();
    let n = p.get() as usize;
    assert_eq!(v.len(), n * n, "vector must live in C^(p^2)");
    let [a1, b1, a2, b2] = u.coords().map(|x| x as usize);
    let mut out = ComplexVector::zeros(n * n);
    for k1 in 0..n {
        for k2 in 0..n {
            let phase = omega_pow(p, (b1 * (k1 + 1) + b2 * (k2 + 1)) as u64);
            out[((k1 + a1) % n) * n + (k2 + a2) % n] = phase * v[k1 * n + k2];
        }
    }
    out
}

/// Raw Hilbert-Schmidt product `Tr(A* B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Normalized product `τ(A* B) = Tr(A* B) / dim`.
pub fn hs_inner_normalized(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    Ok(hs_inner(a, b)? / a.nrows() as f64)
}

/// Normalized trace `τ(A)`.
pub fn tau(a: &ComplexMatrix) -> Complex64 {
    a.trace() / a.nrows() as f64
}

/// The `p^2` tensor Weyl operators labelled by the points of the plane,
/// identity first. They are orthogonal with `Tr(W* W) = p^2`.
pub fn materialize(s: &SubalgebraDesc) -> Vec<ComplexMatrix> {
    s.subspace.points().iter().map(weyl_tensor).collect()
}

/// Checks `τ(A* B) = τ(A*) τ(B)` over all pairs of basis operators and
/// returns the verdict together with the worst residual.
pub fn numeric_complementary(s: &SubalgebraDesc, t: &SubalgebraDesc, tol: f64) -> (bool, f64) {
    complementary_bases(&materialize(s), &materialize(t), tol)
}

/// Complementarity test on arbitrary spanning sets of two subalgebras.
pub fn complementary_bases(a: &[ComplexMatrix], b: &[ComplexMatrix], tol: f64) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    for x in a {
        let tx = tau(x).conj();
        for y in b {
            let lhs = hs_inner_normalized(x, y).expect("equal dimensions");
            worst = worst.max((lhs - tx * tau(y)).norm());
        }
    }
    (worst <= tol, worst)
}

fn check_split(m: &ComplexMatrix, d: usize, n: usize) -> Result<()> {
    if m.nrows() != d * n || m.ncols() != d * n {
        return Err(Error::DimensionMismatch(m.nrows(), d * n));
    }
    Ok(())
}

/// `Tr_1` on `M_d (x) M_n`, defined by `Tr_1(A (x) B) = Tr(A) B`.
pub fn partial_trace_1(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    check_split(m, d, n)?;
    Ok(ComplexMatrix::from_fn(n, n, |j, l| (0..d).map(|i| m[(i * n + j, i * n + l)]).sum()))
}

/// `Tr_2` on `M_d (x) M_n`, defined by `Tr_2(A (x) B) = Tr(B) A`.
pub fn partial_trace_2(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    check_split(m, d, n)?;
    Ok(ComplexMatrix::from_fn(d, d, |i, k| (0..n).map(|j| m[(i * n + j, k * n + j)]).sum()))
}

/// `E_{I (x) M_n}(M) = (1/d) I (x) Tr_1(M)`.
pub fn conditional_expectation_second_factor(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    let reduced = partial_trace_1(m, d, n)?;
    Ok(kron(&ComplexMatrix::identity(d, d), &reduced) / Complex64::from(d as f64))
}

/// `E_{M_d (x) I}(M) = (1/n) Tr_2(M) (x) I`.
pub fn conditional_expectation_first_factor(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    let reduced = partial_trace_2(m, d, n)?;
    Ok(kron(&reduced, &ComplexMatrix::identity(n, n)) / Complex64::from(n as f64))
}

/// Orthogonal projection onto the span of an HS-orthogonal family whose
/// members all have `Tr(B* B) = norm_sq`.
pub fn project_onto(m: &ComplexMatrix, basis: &[ComplexMatrix], norm_sq: f64) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
    for b in basis {
        let c = hs_inner(b, m)? / norm_sq;
        out += b * c;
    }
    Ok(out)
}

/// Trace-preserving conditional expectation onto `π(S)`.
pub fn conditional_expectation_subalgebra(m: &ComplexMatrix, s: &SubalgebraDesc) -> Result<ComplexMatrix> {
    let n = s.subspace.modulus().get() as usize;
    if m.nrows() != n * n {
        return Err(Error::DimensionMismatch(m.nrows(), n * n));
    }
    project_onto(m, &materialize(s), (n * n) as f64)
}

/// A unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Accepts only vectors of norm 1 within `1e-12`.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("state norm {norm} is not 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(amplitudes: ComplexVector) -> Self {
        let norm = amplitudes.norm();
        PureState { amplitudes: amplitudes / Complex64::from(norm) }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self::normalized(random_vector(dim, rng))
    }

    /// `e_i (x) f_j` with 0-based storage indices.
    pub fn product_basis(d: usize, n: usize, i: usize, j: usize) -> Self {
        let mut v = ComplexVector::zeros(d * n);
        v[i * n + j] = ONE;
        PureState { amplitudes: v }
    }

    /// `|v_A> = Σ A_ij e_i (x) f_j`, normalized.
    pub fn from_coefficients(a: &ComplexMatrix) -> Self {
        let (d, n) = a.shape();
        Self::normalized(ComplexVector::from_fn(d * n, |k, _| a[(k / n, k % n)]))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(dim, dim, rng).qr().q()
}

/// Deviation of a state from complementarity to `M_d (x) I`:
/// `max |E(P) - τ(P) I|` for `P = |v><v|`.
pub fn state_residual_first_factor(state: &PureState, d: usize, n: usize) -> Result<f64> {
    let proj = state.projector();
    let e = conditional_expectation_first_factor(&proj, d, n)?;
    Ok(max_abs_diff(&e, &ComplexMatrix::identity(d * n, d * n).scale(1.0 / (d * n) as f64)))
}

/// Same as [`state_residual_first_factor`] for `I (x) M_n`.
pub fn state_residual_second_factor(state: &PureState, d: usize, n: usize) -> Result<f64> {
    let proj = state.projector();
    let e = conditional_expectation_second_factor(&proj, d, n)?;
    Ok(max_abs_diff(&e, &ComplexMatrix::identity(d * n, d * n).scale(1.0 / (d * n) as f64)))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |U* U - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &ComplexMatrix::identity(n, n))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_diagonal_element(n, n, ONE)
}
