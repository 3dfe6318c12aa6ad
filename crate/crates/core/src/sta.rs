//! Shortcuts to adiabaticity: Ermakov frequency schedules for the harmonic
//! oscillator and counterdiabatic terms for finite systems.

use crate::error::{Error, Result};
use crate::numeric::magnus4_from_samples;
use crate::oscillator::TruncatedOscillator;
use crate::qcore::{c, expect, hermitian_eig, op_norm, CMat, CVec, DensityMatrix, Hermitian, I};

/// Grid used for the trap-inversion and residual scans.
pub const SCHEDULE_GRID: usize = 1000;

/// Quintic scale factor `b(t)` obeying `b(0) = 1`, `b(τ) = √(ω_i/ω_f)` with
/// vanishing first and second derivatives at both ends, and the frequency
/// drive it implies through the Ermakov equation.
#[derive(Clone, Debug, PartialEq)]
pub struct ErmakovSchedule {
    pub omega_i: f64,
    pub omega_f: f64,
    pub tau: f64,
    /// Coefficients of `b(t) = Σ c_k t^k`, lowest order first.
    pub coeffs: [f64; 6],
    /// Set when `ω(t)² < 0` somewhere on the grid: the trap is inverted.
    pub trap_inverted: bool,
    pub min_omega_sq: f64,
}

impl ErmakovSchedule {
    pub fn omega0(&self) -> f64 {
        self.omega_i
    }

    pub fn b(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &k| acc * t + k)
    }

    pub fn b_dot(&self, t: f64) -> f64 {
        (1..6)
            .rev()
            .fold(0.0, |acc, k| acc * t + k as f64 * self.coeffs[k])
    }

    pub fn b_ddot(&self, t: f64) -> f64 {
        (2..6).rev().fold(0.0, |acc, k| {
            acc * t + (k * (k - 1)) as f64 * self.coeffs[k]
        })
    }

    /// Implied `ω(t)² = ω₀²/b⁴ − b̈/b`.
    pub fn omega_sq(&self, t: f64) -> f64 {
        let b = self.b(t);
        self.omega_i.powi(2) / b.powi(4) - self.b_ddot(t) / b
    }

    /// `b̈ + ω²b − ω₀²/b³`, zero by construction.
    pub fn ermakov_residual(&self, t: f64) -> f64 {
        let b = self.b(t);
        self.b_ddot(t) + self.omega_sq(t) * b - self.omega_i.powi(2) / b.powi(3)
    }

    pub fn max_ermakov_residual(&self) -> f64 {
        grid(self.tau)
            .map(|t| self.ermakov_residual(t).abs())
            .fold(0.0, f64::max)
    }

    /// Residuals of the six boundary conditions, in the order
    /// `b(0) − 1, ḃ(0), b̈(0), b(τ) − √(ω₀/ω_f), ḃ(τ), b̈(τ)`.
    pub fn boundary_residuals(&self) -> [f64; 6] {
        let t = self.tau;
        [
            self.b(0.0) - 1.0,
            self.b_dot(0.0),
            self.b_ddot(0.0),
            self.b(t) - (self.omega_i / self.omega_f).sqrt(),
            self.b_dot(t),
            self.b_ddot(t),
        ]
    }

    /// Lewis–Riesenfeld invariant `½[ω₀² x²/b² + (b p − ḃ x)²]` at time `t`.
    pub fn invariant(&self, osc: &TruncatedOscillator, t: f64) -> CMat {
        let (b, bd) = (self.b(t), self.b_dot(t));
        let w0 = self.omega_i;
        (osc.x2() * c(w0 * w0 / (b * b) + bd * bd, 0.0) + osc.p2() * c(b * b, 0.0)
            - osc.xp_sym() * c(b * bd, 0.0))
            * c(0.5, 0.0)
    }
}

fn grid(tau: f64) -> impl Iterator<Item = f64> {
    (0..=SCHEDULE_GRID).map(move |k| tau * k as f64 / SCHEDULE_GRID as f64)
}

/// Builds the quintic schedule taking the trap from `ω_i` to `ω_f` in time
/// `τ`. A schedule that inverts the trap is returned with `trap_inverted` set.
pub fn ermakov_schedule(omega_i: f64, omega_f: f64, tau: f64) -> Result<ErmakovSchedule> {
    if !(omega_i > 0.0 && omega_f > 0.0 && tau > 0.0)
        || ![omega_i, omega_f, tau].iter().all(|v| v.is_finite())
    {
        return Err(Error::InvalidParams(
            "ω_i, ω_f and τ must be positive and finite".into(),
        ));
    }
    // b = 1 + δ(10s³ − 15s⁴ + 6s⁵) with s = t/τ
    let delta = (omega_i / omega_f).sqrt() - 1.0;
    let coeffs = [
        1.0,
        0.0,
        0.0,
        10.0 * delta / tau.powi(3),
        -15.0 * delta / tau.powi(4),
        6.0 * delta / tau.powi(5),
    ];
    let mut s = ErmakovSchedule {
        omega_i,
        omega_f,
        tau,
        coeffs,
        trap_inverted: false,
        min_omega_sq: f64::INFINITY,
    };
    s.min_omega_sq = grid(tau)
        .map(|t| s.omega_sq(t))
        .fold(f64::INFINITY, f64::min);
    s.trap_inverted = s.min_omega_sq < 0.0;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCheck {
    /// `max_t |⟨I(t)⟩ − ⟨I(0)⟩| / ⟨I(0)⟩` over the sampled times.
    pub max_drift: f64,
    /// Largest change of an energy-level population between `t = 0` and `τ`.
    pub max_population_change: f64,
    pub fock_tail: f64,
}

/// Largest top-level population tolerated in the invariant check.
pub const INVARIANT_TAIL_TOL: f64 = 1e-10;

/// Evolves a thermal state of the truncated oscillator through the schedule
/// and tracks the invariant's expectation at `samples` evenly spaced times.
pub fn verify_ermakov_invariant(
    schedule: &ErmakovSchedule,
    n_max: usize,
    temperature: f64,
    samples: usize,
) -> Result<InvariantCheck> {
    if !(temperature > 0.0) || samples == 0 {
        return Err(Error::InvalidParams(
            "need a positive temperature and at least one sample".into(),
        ));
    }
    let osc = TruncatedOscillator::new(n_max, schedule.omega_i);
    let h0 = Hermitian::new(osc.hamiltonian(schedule.omega_i.powi(2)))?;
    let rho0 = DensityMatrix::gibbs(&h0, temperature)?;
    let tail_of = |m: &CMat| m[(n_max, n_max)].re;
    let mut tail = tail_of(rho0.matrix());
    if tail > INVARIANT_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: n_max,
            tail,
        });
    }

    // resolve the fastest local frequency, trap inversion included
    let w_peak = grid(schedule.tau)
        .map(|t| schedule.omega_sq(t).abs().sqrt())
        .fold(schedule.omega_i, f64::max);
    let max_step = (0.02 / w_peak).min(schedule.tau / 400.0);

    let i0 = expect(rho0.matrix(), &schedule.invariant(&osc, 0.0));
    let mut rho = rho0.matrix().clone();
    let mut drift: f64 = 0.0;
    let mut t_prev = 0.0;
    for k in 1..=samples {
        let t = schedule.tau * k as f64 / samples as f64;
        let u = osc.propagator(|s| schedule.omega_sq(s), t_prev, t, max_step);
        rho = &u * rho * u.adjoint();
        t_prev = t;
        tail = tail.max(tail_of(&rho));
        let it = expect(&rho, &schedule.invariant(&osc, t));
        drift = drift.max((it - i0).abs() / i0.abs());
    }
    if tail > INVARIANT_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: n_max,
            tail,
        });
    }

    let pops = |h: &Hermitian, r: &CMat| {
        let v = hermitian_eig(h).vectors;
        let d = v.adjoint() * r * &v;
        (0..d.nrows()).map(|i| d[(i, i)].re).collect::<Vec<_>>()
    };
    let before = pops(&h0, rho0.matrix());
    let after = pops(
        &Hermitian::new(osc.hamiltonian(schedule.omega_f.powi(2)))?,
        &rho,
    );
    let max_population_change = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(InvariantCheck {
        max_drift: drift,
        max_population_change,
        fock_tail: tail,
    })
}

/// Minimum level spacing accepted by [`counterdiabatic`].
pub const CD_GAP_TOL: f64 = 1e-8;

fn min_gap(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Rotates each eigenvector column of `v` so its overlap with the matching
/// column of `reference` is real and positive.
fn align_phases(v: &mut CMat, reference: &CMat) {
    for j in 0..v.ncols() {
        let ov = reference.column(j).dotc(&v.column(j));
        if ov.norm() > 0.0 {
            let ph = ov.conj() / ov.norm();
            for i in 0..v.nrows() {
                v[(i, j)] *= ph;
            }
        }
    }
}

/// Counterdiabatic term `i Σ_n (|∂_t n⟩⟨n| − ⟨n|∂_t n⟩|n⟩⟨n|)` of `h0` at `t`.
///
/// Eigenvector derivatives are centered differences over `t ± dt` after
/// phase alignment. The result is made exactly Hermitian and its diagonal in
/// the instantaneous eigenbasis is removed.
pub fn counterdiabatic(h0: impl Fn(f64) -> CMat, t: f64, dt: f64) -> Result<Hermitian> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(
            "finite-difference step must be positive".into(),
        ));
    }
    let eig = |s: f64| -> Result<_> { Ok(hermitian_eig(&Hermitian::new(h0(s))?)) };
    let e0 = eig(t)?;
    let scale = e0.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let gap = min_gap(&e0.values);
    if gap < CD_GAP_TOL * scale {
        return Err(Error::DegenerateSpectrum(gap));
    }
    let mut vp = eig(t + dt)?.vectors;
    let mut vm = eig(t - dt)?.vectors;
    align_phases(&mut vp, &e0.vectors);
    align_phases(&mut vm, &e0.vectors);
    let dv = (vp - vm) * c(0.5 / dt, 0.0);
    // ⟨m|∂n⟩ in the instantaneous eigenbasis, diagonal dropped
    let mut m = e0.vectors.adjoint() * dv * I;
    for k in 0..m.nrows() {
        m[(k, k)] = c(0.0, 0.0);
    }
    let herm = (&m + m.adjoint()) * c(0.5, 0.0);
    Ok(Hermitian::symmetrized(
        &e0.vectors * herm * e0.vectors.adjoint(),
    ))
}

/// A bare Hamiltonian path together with its counterdiabatic correction.
pub struct CdProtocol<F> {
    bare: F,
    dt: f64,
}

impl<F: Fn(f64) -> CMat> CdProtocol<F> {
    /// `dt` is the finite-difference step for eigenvector derivatives.
    pub fn new(bare: F, dt: f64) -> Self {
        Self { bare, dt }
    }

    pub fn bare(&self, t: f64) -> CMat {
        (self.bare)(t)
    }

    pub fn cd_term(&self, t: f64) -> Result<Hermitian> {
        counterdiabatic(&self.bare, t, self.dt)
    }

    pub fn total(&self, t: f64) -> Result<CMat> {
        Ok(self.bare(t) + self.cd_term(t)?.into_matrix())
    }

    /// Evolves `psi0` under `h₀ + H_CD` with fourth-order Magnus steps.
    pub fn evolve(&self, psi0: &CVec, t0: f64, t1: f64, steps: usize) -> Result<CVec> {
        let h = (t1 - t0) / steps as f64;
        let s = 3f64.sqrt() / 6.0;
        let mut psi = psi0.clone();
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            let u = magnus4_from_samples(
                &self.total(t + (0.5 - s) * h)?,
                &self.total(t + (0.5 + s) * h)?,
                h,
            );
            psi = u * psi;
        }
        Ok(psi)
    }

    /// `∫‖H_CD‖ dt` (operator norm, Simpson rule), a diagnostic of the
    /// driving cost the correction adds.
    pub fn cd_cost(&self, t0: f64, t1: f64, intervals: usize) -> Result<f64> {
        let n = intervals.max(2) + intervals % 2;
        let h = (t1 - t0) / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * op_norm(self.cd_term(t0 + k as f64 * h)?.matrix());
        }
        Ok(acc * h / 3.0)
    }
}
