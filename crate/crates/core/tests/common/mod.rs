//! Random operators and states shared by the property suites.
#![allow(dead_code)]

use qtherm::qcore::{c, unitary_propagator, CMat, CVec, DensityMatrix, Hermitian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; the tests only need a rotation-invariant spread
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| c(gauss(rng), gauss(rng)))
}

/// GUE-like Hermitian matrix scaled to operator norm about `scale`.
pub fn hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Hermitian {
    let g = ginibre(rng, d);
    let h = (&g + g.adjoint()) * c(0.5, 0.0);
    let norm = qtherm::qcore::op_norm(&h).max(1e-12);
    Hermitian::symmetrized(h * c(scale / norm, 0.0))
}

pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    unitary_propagator(&hermitian(rng, d, 3.0), 1.0)
}

/// Full-rank state from a Ginibre matrix.
pub fn state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let g = ginibre(rng, d);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

pub fn pure(rng: &mut ChaCha8Rng, d: usize) -> CVec {
    let v = CVec::from_fn(d, |_, _| c(gauss(rng), gauss(rng)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Random `k`-outcome POVM: `E_j = S^{-1/2} A_j S^{-1/2}` with `S = Σ A_j`.
pub fn povm(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<CMat> {
    let parts: Vec<CMat> = (0..k)
        .map(|_| {
            let g = ginibre(rng, d);
            &g * g.adjoint()
        })
        .collect();
    let s = parts.iter().fold(CMat::zeros(d, d), |acc, a| acc + a);
    let eig = qtherm::qcore::hermitian_eig(&Hermitian::symmetrized(s));
    let inv_sqrt = eig.map(|x| 1.0 / x.sqrt());
    parts.iter().map(|a| &inv_sqrt * a * &inv_sqrt).collect()
}

pub fn populations(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// `V(θ) diag(softmax(a + bθ)) V(θ)†` with `V(θ) = e^{−iGθ} W`: smooth and
/// full rank.
pub fn random_family(seed: u64, d: usize) -> qtherm::metrology::ParamFamily {
    let mut r = rng(seed);
    let g = hermitian(&mut r, d, 1.0);
    let w = unitary(&mut r, d);
    let a: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
    qtherm::metrology::ParamFamily::new(move |theta| {
        let logits: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y * theta).collect();
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        let p: Vec<f64> = logits.iter().map(|l| l.exp() / z).collect();
        let v = unitary_propagator(&g, theta) * &w;
        DensityMatrix::new(&v * qtherm::qcore::from_real_diag(&p) * v.adjoint())
    })
}
