//! Engines that deliver work to an external oscillator through impulse kicks.

use std::f64::consts::PI;

use super::{finite, require};
use crate::error::{Error, Result};
use crate::numeric::propagate;
use crate::ops::{destroy, pauli_x, pauli_z, CollectiveSpin};
use crate::qcore::{c, hermitian_eig, kron, matrix_exp, CMat, DensityMatrix, Hermitian};

/// Largest population allowed on the oscillator's top Fock level.
pub const OSCILLATOR_TAIL_TOL: f64 = 1e-10;

/// Qubit engine `H_E = Δσ_x + Ω(t)σ_z` kicking an oscillator `H_S = ω a†a`
/// once per period through `g σ_x (a + a†)`.
///
/// `Ω(t) = −v t` on the first half period, which widens the gap
/// (compression), and `Ω(t) = −v(T − t)` on the second (expansion). The
/// engine is reset to the cold Gibbs state of `H_E(0)` at the start of each
/// period and to the hot Gibbs state of `H_E(T/2)` at mid-period.
#[derive(Clone, Debug)]
pub struct OutcoupledParams {
    pub delta: f64,
    pub coupling: f64,
    /// Kick time as a fraction of the period, in `(0, 1/2)`.
    pub kick_fraction: f64,
    pub sweep_rate: f64,
    pub period: f64,
    pub oscillator_frequency: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub cutoff: usize,
}

impl OutcoupledParams {
    /// The reference parameter set in units of `Δ`.
    pub fn reference(delta: f64) -> Self {
        let v = 0.5 * delta * delta;
        let period = 20.0 / delta;
        let e_max = 2.0 * (delta * delta + (v * period).powi(2) / 4.0).sqrt();
        Self {
            delta,
            coupling: 0.02,
            kick_fraction: 0.1 / delta,
            sweep_rate: v,
            period,
            oscillator_frequency: 2.0 * PI * 0.05 / period,
            beta_c: 1.0 / delta,
            beta_h: 1.0 / (4.0 * e_max),
            cutoff: 24,
        }
    }

    fn validate(&self) -> Result<()> {
        finite(&[
            self.delta,
            self.coupling,
            self.kick_fraction,
            self.sweep_rate,
            self.period,
            self.oscillator_frequency,
            self.beta_c,
            self.beta_h,
        ])?;
        require(
            self.period > 0.0 && self.oscillator_frequency > 0.0,
            "period and ω must be positive",
        )?;
        require(
            self.kick_fraction > 0.0 && self.kick_fraction < 0.5,
            "kick must fall in the first half period",
        )?;
        require(
            self.beta_c > 0.0 && self.beta_h > 0.0,
            "inverse temperatures must be positive",
        )?;
        require(self.cutoff >= 2, "oscillator needs at least three levels")
    }

    fn gap_drive(&self, t: f64) -> f64 {
        if t <= 0.5 * self.period {
            -self.sweep_rate * t
        } else {
            -self.sweep_rate * (self.period - t)
        }
    }

    fn engine_hamiltonian(&self, t: f64) -> CMat {
        pauli_x() * c(self.delta, 0.0) + pauli_z() * c(self.gap_drive(t), 0.0)
    }
}

/// One period of the composite dynamics, precomputed.
struct CycleMap {
    dim: usize,
    cold: CMat,
    hot: CMat,
    before_kick: CMat,
    kick: CMat,
    after_kick: CMat,
    second_half: CMat,
    energies: Vec<f64>,
}

impl CycleMap {
    fn new(p: &OutcoupledParams) -> Result<Self> {
        p.validate()?;
        let dim = p.cutoff + 1;
        let period = p.period;
        let t_kick = p.kick_fraction * period;
        let half = 0.5 * period;
        let steps = |dt: f64| ((dt / 1e-2).ceil() as usize).max(8);
        let h = |t: f64| p.engine_hamiltonian(t);
        let u1 = propagate(h, 0.0, t_kick, steps(t_kick));
        let u2 = propagate(h, t_kick, half, steps(half - t_kick));
        let u3 = propagate(h, half, period, steps(half));
        let free = |t: f64| {
            CMat::from_fn(dim, dim, |i, j| {
                if i == j {
                    c(0.0, -p.oscillator_frequency * i as f64 * t).exp()
                } else {
                    c(0.0, 0.0)
                }
            })
        };
        let a = destroy(dim);
        let x = &a + a.adjoint();
        let kick = matrix_exp(&kron(&pauli_x(), &x), c(0.0, -p.coupling));
        let cold = DensityMatrix::gibbs(&Hermitian::new(h(0.0))?, 1.0 / p.beta_c)?
            .matrix()
            .clone();
        let hot = DensityMatrix::gibbs(&Hermitian::new(h(half))?, 1.0 / p.beta_h)?
            .matrix()
            .clone();
        Ok(Self {
            dim,
            cold,
            hot,
            before_kick: kron(&u1, &free(t_kick)),
            kick,
            after_kick: kron(&u2, &free(half - t_kick)),
            second_half: kron(&u3, &free(half)),
            energies: (0..dim)
                .map(|n| p.oscillator_frequency * n as f64)
                .collect(),
        })
    }

    fn oscillator(&self, composite: &CMat) -> CMat {
        // engine is the leading qubit factor
        let d = self.dim;
        CMat::from_fn(d, d, |i, j| composite[(i, j)] + composite[(d + i, d + j)])
    }

    /// Composite evolution over one period; returns the oscillator state.
    fn apply(&self, osc: &CMat) -> CMat {
        let sandwich = |u: &CMat, r: &CMat| u * r * u.adjoint();
        let mut r = kron(&self.cold, osc);
        r = sandwich(&self.before_kick, &r);
        r = sandwich(&self.kick, &r);
        r = sandwich(&self.after_kick, &r);
        r = kron(&self.hot, &self.oscillator(&r));
        r = sandwich(&self.second_half, &r);
        self.oscillator(&r)
    }

    fn energy(&self, osc: &CMat) -> f64 {
        (0..self.dim)
            .map(|n| self.energies[n] * osc[(n, n)].re)
            .sum()
    }

    fn tail(&self, osc: &CMat) -> f64 {
        osc[(self.dim - 1, self.dim - 1)].re
    }
}

fn dephase(m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j {
            m[(i, j)]
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Mean oscillator energy gain after each of `n_cycles` periods, starting
/// from the oscillator ground state. With `per_cycle_measurement` the
/// oscillator is dephased in its energy basis at every period boundary.
pub fn outcoupled_work_series(
    p: &OutcoupledParams,
    n_cycles: usize,
    per_cycle_measurement: bool,
) -> Result<Vec<f64>> {
    let map = CycleMap::new(p)?;
    let mut osc = CMat::zeros(map.dim, map.dim);
    osc[(0, 0)] = c(1.0, 0.0);
    let mut out = Vec::with_capacity(n_cycles);
    for _ in 0..n_cycles {
        osc = map.apply(&osc);
        if per_cycle_measurement {
            osc = dephase(&osc);
        }
        let tail = map.tail(&osc);
        if tail > OSCILLATOR_TAIL_TOL {
            return Err(Error::CutoffTooSmall {
                cutoff: p.cutoff,
                tail,
            });
        }
        out.push(map.energy(&osc));
    }
    Ok(out)
}

/// Mean work delivered over `n_cycles` periods.
pub fn outcoupled_multicycle(
    p: &OutcoupledParams,
    n_cycles: usize,
    per_cycle_measurement: bool,
) -> Result<f64> {
    require(n_cycles >= 1, "need at least one cycle")?;
    Ok(*outcoupled_work_series(p, n_cycles, per_cycle_measurement)?
        .last()
        .unwrap())
}

/// Work with a projective energy measurement after every period, summed
/// over measurement records: a Markov chain on Fock levels whose one-period
/// transition probabilities come from the cycle map.
pub fn outcoupled_projective_work(p: &OutcoupledParams, n_cycles: usize) -> Result<Vec<f64>> {
    let map = CycleMap::new(p)?;
    let d = map.dim;
    // trans[(i, k)] = P(k → i)
    let mut trans = nalgebra::DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let mut start = CMat::zeros(d, d);
        start[(k, k)] = c(1.0, 0.0);
        let out = map.apply(&start);
        for i in 0..d {
            trans[(i, k)] = out[(i, i)].re;
        }
    }
    let mut pops = nalgebra::DVector::<f64>::zeros(d);
    pops[0] = 1.0;
    let mut out = Vec::with_capacity(n_cycles);
    for _ in 0..n_cycles {
        pops = &trans * pops;
        if pops[d - 1] > OSCILLATOR_TAIL_TOL {
            return Err(Error::CutoffTooSmall {
                cutoff: p.cutoff,
                tail: pops[d - 1],
            });
        }
        out.push((0..d).map(|n| map.energies[n] * pops[n]).sum());
    }
    Ok(out)
}

/// `N` atoms with `H_E = Δ Σσ_x + Ω(t) Σσ_z`, `Ω(t) = Ω(0) + v t` on the first
/// half period and `Ω(0) + v(T − t)` on the second, kicked once at `t₁`.
#[derive(Clone, Debug)]
pub struct IndistinctParams {
    pub n_atoms: usize,
    pub delta: f64,
    pub omega0: f64,
    pub sweep_rate: f64,
    pub period: f64,
    pub kick_time: f64,
    pub beta_h: f64,
    pub beta_c: f64,
}

impl IndistinctParams {
    /// The reference family in units of `Ω(0)`, with gap parameter `delta`.
    pub fn reference(n_atoms: usize, delta: f64) -> Self {
        let omega0 = 1.0;
        let v = 0.1 * omega0 * omega0;
        let period = 20.0 / omega0;
        let eps = |om: f64| (om * om + delta * delta).sqrt();
        Self {
            n_atoms,
            delta,
            omega0,
            sweep_rate: v,
            period,
            kick_time: 0.35 * period / 2.0,
            beta_c: 2.0 / eps(omega0),
            beta_h: 1.0 / (4.0 * eps(omega0 + v * period / 2.0)),
        }
    }

    fn drive(&self, t: f64) -> f64 {
        if t <= 0.5 * self.period {
            self.omega0 + self.sweep_rate * t
        } else {
            self.omega0 + self.sweep_rate * (self.period - t)
        }
    }

    /// Start time and inverse temperature of the stroke containing the kick.
    fn stroke_start(&self) -> (f64, f64) {
        if self.kick_time <= 0.5 * self.period {
            (0.0, self.beta_c)
        } else {
            (0.5 * self.period, self.beta_h)
        }
    }
}

/// `⟨V(t₁)²⟩` for a Heisenberg-evolved `V` under `H(t)`, from the Gibbs state of
/// `H(t₀)` at inverse temperature `beta`.
fn kicked_second_moment(
    h: impl Fn(f64) -> CMat,
    v: &CMat,
    t0: f64,
    t1: f64,
    beta: f64,
) -> Result<f64> {
    let rho = DensityMatrix::gibbs(&Hermitian::new(h(t0))?, 1.0 / beta)?;
    let steps = (((t1 - t0) / 1e-2).ceil() as usize).max(8);
    let u = propagate(h, t0, t1, steps);
    let vt = u.adjoint() * v * &u;
    Ok(rho.expect(&(&vt * &vt)))
}

/// Ratio of the first-order kick work for indistinguishable (bosonic,
/// symmetric-subspace) atoms to that for distinguishable ones.
///
/// The oscillator factor is common to both and cancels, leaving the ratio of
/// `⟨V_E(t₁)²⟩` with `V_E = S_x` against `V_E = Σσ_x`.
pub fn outcoupled_indistinct_ratio(p: &IndistinctParams) -> Result<f64> {
    finite(&[
        p.delta,
        p.omega0,
        p.sweep_rate,
        p.period,
        p.kick_time,
        p.beta_h,
        p.beta_c,
    ])?;
    require((1..=12).contains(&p.n_atoms), "need 1 ≤ N ≤ 12")?;
    require(
        p.period > 0.0 && p.kick_time > 0.0 && p.kick_time < p.period,
        "kick must fall inside the period",
    )?;
    require(
        p.beta_c > 0.0 && p.beta_h > 0.0,
        "inverse temperatures must be positive",
    )?;
    let (t0, beta) = p.stroke_start();
    let n = p.n_atoms;

    // symmetric subspace: S_x = 2J_x, S_z = 2J_z
    let spin = CollectiveSpin::new(n);
    let sx = &spin.jx * c(2.0, 0.0);
    let sz = &spin.jz * c(2.0, 0.0);
    let indist = kicked_second_moment(
        |t| &sx * c(p.delta, 0.0) + &sz * c(p.drive(t), 0.0),
        &sx,
        t0,
        p.kick_time,
        beta,
    )?;

    // distinguishable: exact trace over all 2^N product configurations in the
    // single-atom energy basis; V² = N + Σ_{i≠j} A_i A_j with A = σ_x(t₁)
    let h1 = |t: f64| pauli_x() * c(p.delta, 0.0) + pauli_z() * c(p.drive(t), 0.0);
    let rho1 = DensityMatrix::gibbs(&Hermitian::new(h1(t0))?, 1.0 / beta)?;
    let eig = hermitian_eig(&Hermitian::new(rho1.matrix().clone())?);
    let steps = (((p.kick_time - t0) / 1e-2).ceil() as usize).max(8);
    let u = propagate(h1, t0, p.kick_time, steps);
    let a_t = u.adjoint() * pauli_x() * &u;
    let a_eig = eig.vectors.adjoint() * a_t * &eig.vectors;
    let probs = [eig.values[0].max(0.0), eig.values[1].max(0.0)];
    let diag = [a_eig[(0, 0)].re, a_eig[(1, 1)].re];
    let mut dist = 0.0;
    for config in 0u32..(1 << n) {
        let mut weight = 1.0;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for j in 0..n {
            let s = ((config >> j) & 1) as usize;
            weight *= probs[s];
            sum += diag[s];
            sum_sq += diag[s] * diag[s];
        }
        dist += weight * (n as f64 + sum * sum - sum_sq);
    }
    if dist <= 0.0 {
        return Err(Error::NumericalInstability(
            "distinguishable kick moment vanished".into(),
        ));
    }
    Ok(indist / dist)
}
