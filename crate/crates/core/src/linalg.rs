//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `exp(-i h t)` for Hermitian `h`, via eigendecomposition. Exactly unitary up to round-off.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = h.nrows();
    let mut scaled = v.clone();
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        let ph = C64::from_polar(1.0, -e * t);
        for r in 0..d {
            scaled[(r, k)] *= ph;
        }
    }
    scaled * v.adjoint()
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Max-abs deviation of `m` from Hermiticity.
pub fn hermiticity_error(m: &CMat) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance between two unitaries modulo global phase: `sqrt(1 - |tr(a†b)|/d)`.
pub fn phase_insensitive_distance(a: &CMat, b: &CMat) -> f64 {
    let d = a.nrows() as f64;
    let overlap = trace(&(a.adjoint() * b)).norm() / d;
    (1.0 - overlap).max(0.0).sqrt()
}

/// Single-qubit Pauli matrices in the order I, X, Y, Z.
pub fn pauli(k: usize) -> CMat {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    match k {
        0 => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        3 => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// Two-qubit Pauli `P_{k/4} ⊗ P_{k%4}` (control first), `k` in `0..16`.
pub fn pauli2(k: usize) -> CMat {
    kron(&pauli(k / 4), &pauli(k % 4))
}

pub const PAULI2_LABELS: [&str; 16] = [
    "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

/// Row-major vectorisation `vec(ρ)[i*d + j] = ρ[i, j]`.
pub fn vec_rows(m: &CMat) -> Vec<C64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

pub fn unvec_rows(v: &[C64], d: usize) -> CMat {
    CMat::from_row_slice(d, d, v)
}

/// Liouville representation of `ρ ↦ A ρ B` under row-major vectorisation.
pub fn sandwich_superop(a: &CMat, b: &CMat) -> CMat {
    kron(a, &b.transpose())
}

/// `U ρ U†` as a Liouville matrix.
pub fn unitary_superop(u: &CMat) -> CMat {
    sandwich_superop(u, &u.adjoint())
}

pub fn apply_superop(s: &CMat, rho: &CMat) -> CMat {
    let d = rho.nrows();
    let v = nalgebra::DVector::from_vec(vec_rows(rho));
    let out = s * v;
    unvec_rows(out.as_slice(), d)
}
