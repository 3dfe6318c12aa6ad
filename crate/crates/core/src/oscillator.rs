//! Truncated harmonic oscillator with a time-dependent frequency.
//!
//! Works in the Fock basis of a fixed reference frequency. `x²`, `p²` and
//! `xp + px` are filled in exactly on the truncated space rather than formed
//! as products of truncated `x` and `p`, so low levels carry no truncation
//! error.

use nalgebra::DMatrix;

use crate::qcore::{c, CMat, I};

#[derive(Clone, Debug)]
pub struct TruncatedOscillator {
    reference: f64,
    x2: CMat,
    p2: CMat,
    xp: CMat,
}

impl TruncatedOscillator {
    /// Fock levels `0..=n_max` of frequency `reference` (unit mass).
    pub fn new(n_max: usize, reference: f64) -> Self {
        let dim = n_max + 1;
        let w = reference;
        let mut x2 = CMat::zeros(dim, dim);
        let mut p2 = CMat::zeros(dim, dim);
        let mut xp = CMat::zeros(dim, dim);
        for n in 0..dim {
            let d = (2 * n + 1) as f64;
            x2[(n, n)] = c(d / (2.0 * w), 0.0);
            p2[(n, n)] = c(d * w / 2.0, 0.0);
            if n + 2 < dim {
                let off = (((n + 1) * (n + 2)) as f64).sqrt();
                x2[(n, n + 2)] = c(off / (2.0 * w), 0.0);
                x2[(n + 2, n)] = x2[(n, n + 2)];
                p2[(n, n + 2)] = c(-off * w / 2.0, 0.0);
                p2[(n + 2, n)] = p2[(n, n + 2)];
                // xp + px = i(a†² − a²)
                xp[(n + 2, n)] = I * off;
                xp[(n, n + 2)] = -I * off;
            }
        }
        Self {
            reference,
            x2,
            p2,
            xp,
        }
    }

    pub fn dim(&self) -> usize {
        self.x2.nrows()
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn x2(&self) -> &CMat {
        &self.x2
    }

    pub fn p2(&self) -> &CMat {
        &self.p2
    }

    /// Symmetrized product `xp + px`.
    pub fn xp_sym(&self) -> &CMat {
        &self.xp
    }

    /// `p²/2 + ω² x²/2`; `omega_sq` may be negative (inverted trap).
    pub fn hamiltonian(&self, omega_sq: f64) -> CMat {
        &self.p2 * c(0.5, 0.0) + &self.x2 * c(0.5 * omega_sq, 0.0)
    }

    /// Real symmetric `(a p² + b x²)/2` on Fock levels of one parity.
    fn parity_block(&self, parity: usize, a: f64, b: f64) -> DMatrix<f64> {
        let idx: Vec<usize> = (parity..self.dim()).step_by(2).collect();
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            0.5 * (a * self.p2[(idx[i], idx[j])].re + b * self.x2[(idx[i], idx[j])].re)
        })
    }

    /// Propagator from `t0` to `t1` under `ω(t)² = omega_sq(t)`.
    ///
    /// The Hamiltonian is real and conserves Fock parity, so each parity
    /// block is stepped with the fourth-order commutator-free Magnus scheme,
    /// whose two exponents are real symmetric.
    pub fn propagator(
        &self,
        omega_sq: impl Fn(f64) -> f64,
        t0: f64,
        t1: f64,
        max_step: f64,
    ) -> CMat {
        let dim = self.dim();
        let steps = (((t1 - t0).abs() / max_step).ceil() as usize).max(16);
        let dt = (t1 - t0) / steps as f64;
        let s3 = 3f64.sqrt();
        let (c1, c2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
        let (a1, a2) = (0.25 - s3 / 6.0, 0.25 + s3 / 6.0);
        let samples: Vec<(f64, f64)> = (0..steps)
            .map(|k| {
                let t = t0 + k as f64 * dt;
                (omega_sq(t + c1 * dt), omega_sq(t + c2 * dt))
            })
            .collect();
        let mut u = CMat::zeros(dim, dim);
        for parity in 0..2 {
            let idx: Vec<usize> = (parity..dim).step_by(2).collect();
            let n = idx.len();
            let mut block = CMat::identity(n, n);
            for &(f1, f2) in &samples {
                // the right factor acts first
                let right = self.parity_block(parity, 0.5, a2 * f1 + a1 * f2);
                let left = self.parity_block(parity, 0.5, a1 * f1 + a2 * f2);
                block = real_symmetric_propagator(right, dt) * block;
                block = real_symmetric_propagator(left, dt) * block;
            }
            for (i, &gi) in idx.iter().enumerate() {
                for (j, &gj) in idx.iter().enumerate() {
                    u[(gi, gj)] = block[(i, j)];
                }
            }
        }
        u
    }
}

/// `exp(−i K dt)` for real symmetric `K`.
fn real_symmetric_propagator(k: DMatrix<f64>, dt: f64) -> CMat {
    let eig = k.symmetric_eigen();
    let v = eig.eigenvectors.map(|x| c(x, 0.0));
    let mut vd = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let ph = c(0.0, -lam * dt).exp();
        for i in 0..vd.nrows() {
            vd[(i, j)] *= ph;
        }
    }
    vd * v.transpose()
}
