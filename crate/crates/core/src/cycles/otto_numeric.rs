//! Finite-time Otto cycle of a truncated harmonic oscillator.

use super::{
    check_otto, finite, otto_qho, require, CycleReport, Duration, StrokeKind, StrokeRecord,
};
use crate::error::{Error, Result};
use crate::floquet::Mode;
use crate::lindblad::{evolve_secular, BathSpec, SpectralFunction};
use crate::oscillator::TruncatedOscillator;
use crate::qcore::{trace_distance, CMat, DensityMatrix, Hermitian};

/// Largest population allowed on the top Fock level.
pub const FOCK_TAIL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct OttoNumericParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub t_h: f64,
    pub t_c: f64,
    /// Duration of each linear frequency ramp.
    pub ramp_time: f64,
    /// Duration of each bath contact.
    pub thermalization_time: f64,
    pub n_max: usize,
    /// Flat bath rate for the position coupling.
    pub bath_rate: f64,
    /// Largest Magnus step on the ramps.
    pub max_step: f64,
    /// Cap on cycles run while looking for the limit cycle.
    pub max_cycles: usize,
}

impl OttoNumericParams {
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        t_h: f64,
        t_c: f64,
        ramp_time: f64,
        thermalization_time: f64,
        n_max: usize,
    ) -> Self {
        Self {
            omega_a,
            omega_b,
            t_h,
            t_c,
            ramp_time,
            thermalization_time,
            n_max,
            bath_rate: 1.0,
            max_step: 0.05,
            max_cycles: 60,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NumericOttoReport {
    pub cycle: CycleReport,
    pub ideal: CycleReport,
    /// Ideal minus simulated net work output; non-negative up to truncation.
    pub friction: f64,
    /// Trace distance of the post-isochore states from the bath Gibbs states.
    pub hot_gibbs_distance: f64,
    pub cold_gibbs_distance: f64,
    pub cycles_run: usize,
    /// Largest top-level population seen at any stroke boundary.
    pub fock_tail: f64,
}

fn tail(rho: &DensityMatrix) -> f64 {
    let n = rho.dim() - 1;
    rho.matrix()[(n, n)].re
}

/// Otto cycle with linear frequency ramps simulated unitarily and finite
/// bath contacts, run until the cycle closes.
///
/// The working fluid lives in the Fock basis of `√(ω_A ω_B)`. The baths couple
/// through `a + a†` of that basis with a flat spectrum.
pub fn otto_numeric(p: &OttoNumericParams) -> Result<NumericOttoReport> {
    check_otto(p.omega_a, p.omega_b, p.t_h, p.t_c)?;
    finite(&[p.ramp_time, p.thermalization_time, p.bath_rate, p.max_step])?;
    require(
        p.ramp_time > 0.0 && p.thermalization_time > 0.0,
        "stroke durations must be positive",
    )?;
    require(
        p.bath_rate > 0.0 && p.max_step > 0.0,
        "bath rate and step must be positive",
    )?;
    require(p.n_max >= 2, "need at least three Fock levels")?;
    let dim = p.n_max + 1;
    let w_ref = (p.omega_a * p.omega_b).sqrt();
    let osc = TruncatedOscillator::new(p.n_max, w_ref);
    let h_a = Hermitian::new(osc.hamiltonian(p.omega_a * p.omega_a))?;
    let h_b = Hermitian::new(osc.hamiltonian(p.omega_b * p.omega_b))?;

    let a = crate::ops::destroy(dim);
    let s = Hermitian::new(&a + a.adjoint())?;
    let hot = [BathSpec::new(
        "hot",
        p.t_h,
        SpectralFunction::flat(p.bath_rate),
        s.clone(),
    )?];
    let cold = [BathSpec::new(
        "cold",
        p.t_c,
        SpectralFunction::flat(p.bath_rate),
        s,
    )?];

    let gibbs_a = DensityMatrix::gibbs(&h_a, p.t_h)?;
    let gibbs_b = DensityMatrix::gibbs(&h_b, p.t_c)?;
    let mut worst_tail = tail(&gibbs_a).max(tail(&gibbs_b));
    if worst_tail > FOCK_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: p.n_max,
            tail: worst_tail,
        });
    }

    let ramp = |w0: f64, w1: f64| {
        let tau = p.ramp_time;
        osc.propagator(|t| (w0 + (w1 - w0) * t / tau).powi(2), 0.0, tau, p.max_step)
    };
    let u_ab = ramp(p.omega_a, p.omega_b);
    let u_ba = ramp(p.omega_b, p.omega_a);
    let energy = |rho: &DensityMatrix, h: &Hermitian| rho.expect(h.matrix());
    let unitary = |u: &CMat, rho: &DensityMatrix| {
        DensityMatrix::new_unchecked(u * rho.matrix() * u.adjoint())
    };

    let mut rho = gibbs_a.clone();
    let mut record = None;
    let mut cycles_run = 0;
    for _ in 0..p.max_cycles {
        cycles_run += 1;
        let r1 = unitary(&u_ab, &rho);
        let r2 = evolve_secular(&h_b, &cold, &r1, p.thermalization_time)?;
        let r3 = unitary(&u_ba, &r2);
        let r4 = evolve_secular(&h_a, &hot, &r3, p.thermalization_time)?;
        for r in [&r1, &r2, &r3, &r4] {
            worst_tail = worst_tail.max(tail(r));
        }
        let flows = [
            energy(&r1, &h_b) - energy(&rho, &h_a),
            energy(&r2, &h_b) - energy(&r1, &h_b),
            energy(&r3, &h_a) - energy(&r2, &h_b),
            energy(&r4, &h_a) - energy(&r3, &h_a),
        ];
        let closed = trace_distance(r4.matrix(), rho.matrix()) < 1e-11;
        record = Some((flows, r2.clone(), r4.clone()));
        rho = r4;
        if closed {
            break;
        }
    }
    if worst_tail > FOCK_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: p.n_max,
            tail: worst_tail,
        });
    }
    let ([w_ab, q_c, w_ba, q_h], post_cold, post_hot) = record.expect("at least one cycle runs");

    let ramp = Duration::Finite(p.ramp_time);
    let contact = Duration::Finite(p.thermalization_time);
    let strokes = vec![
        StrokeRecord {
            kind: StrokeKind::IsentropicExpansion,
            work: w_ab,
            heat: 0.0,
            duration: ramp,
        },
        StrokeRecord {
            kind: StrokeKind::ColdIsochore,
            work: 0.0,
            heat: q_c,
            duration: contact,
        },
        StrokeRecord {
            kind: StrokeKind::IsentropicCompression,
            work: w_ba,
            heat: 0.0,
            duration: ramp,
        },
        StrokeRecord {
            kind: StrokeKind::HotIsochore,
            work: 0.0,
            heat: q_h,
            duration: contact,
        },
    ];
    let net = -(w_ab + w_ba);
    let (mode, efficiency, cop, margin) = if net > 0.0 && q_h > 0.0 {
        let eta = net / q_h;
        (Mode::Engine, Some(eta), None, (1.0 - p.t_c / p.t_h) - eta)
    } else if net < 0.0 && q_c > 0.0 {
        let cop = q_c / -net;
        (
            Mode::Refrigerator,
            None,
            Some(cop),
            p.t_c / (p.t_h - p.t_c) - cop,
        )
    } else if net < 0.0 && q_h > 0.0 {
        (Mode::Accelerator, None, None, 0.0)
    } else if net < 0.0 {
        (Mode::Heater, None, None, 0.0)
    } else {
        (Mode::Off, None, None, 0.0)
    };
    let cycle = CycleReport {
        strokes,
        net_work_output: net,
        q_hot: q_h,
        q_cold: q_c,
        efficiency,
        cop,
        mode,
        carnot_margin: margin,
    };
    let ideal = otto_qho(p.omega_a, p.omega_b, p.t_h, p.t_c)?;
    Ok(NumericOttoReport {
        friction: ideal.net_work_output - net,
        hot_gibbs_distance: trace_distance(post_hot.matrix(), gibbs_a.matrix()),
        cold_gibbs_distance: trace_distance(post_cold.matrix(), gibbs_b.matrix()),
        cycle,
        ideal,
        cycles_run,
        fock_tail: worst_tail,
    })
}
