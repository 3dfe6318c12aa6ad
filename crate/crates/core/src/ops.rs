//! Standard operators: Pauli matrices, bosonic ladders, collective spins and
//! site embeddings.
//!
//! Qubit basis: index 0 is the excited (spin-up) state, so `σ_z = diag(1, −1)`
//! and `σ⁻ = |1⟩⟨0|` lowers the energy of `(ω₀/2)σ_z`.

use crate::qcore::{c, identity, kron, CMat, I, ONE, ZERO};

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn sigma_minus() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

pub fn sigma_plus() -> CMat {
    sigma_minus().transpose()
}

/// Truncated annihilation operator on `dim` Fock levels.
pub fn destroy(dim: usize) -> CMat {
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number(dim: usize) -> CMat {
    CMat::from_fn(
        dim,
        dim,
        |i, j| if i == j { c(i as f64, 0.0) } else { ZERO },
    )
}

/// `op` acting on `site` of `n` factors of dimension `d`.
pub fn site_op(op: &CMat, site: usize, n: usize, d: usize) -> CMat {
    assert!(site < n, "site {site} out of range for {n} factors");
    let left = identity(d.pow(site as u32));
    let right = identity(d.pow((n - site - 1) as u32));
    kron(&kron(&left, op), &right)
}

/// Collective spin operators for spin `j = n/2` in the `|j, m⟩` basis with
/// `m` descending from `j` to `−j`.
#[derive(Clone, Debug)]
pub struct CollectiveSpin {
    pub jx: CMat,
    pub jy: CMat,
    pub jz: CMat,
    pub jp: CMat,
    pub jm: CMat,
}

impl CollectiveSpin {
    pub fn new(n_spins: usize) -> Self {
        let d = n_spins + 1;
        let j = n_spins as f64 / 2.0;
        let mut jz = CMat::zeros(d, d);
        let mut jp = CMat::zeros(d, d);
        for k in 0..d {
            let m = j - k as f64;
            jz[(k, k)] = c(m, 0.0);
            if k > 0 {
                // J+ |j, m⟩ = √(j(j+1) − m(m+1)) |j, m+1⟩
                jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * c(0.5, 0.0);
        let jy = (&jp - &jm) * c(0.0, -0.5);
        Self { jx, jy, jz, jp, jm }
    }

    pub fn dim(&self) -> usize {
        self.jz.nrows()
    }
}
