//! Periodically modulated two-level working fluid: Floquet Hamiltonian,
//! sideband weights and the continuous thermal machine.
//!
//! The gap `ω_s(t)` of `H(t) = ω_s(t) σ_z / 2` averages to `ω₀` over a period.
//! Each bath sees the transition through sidebands at `ω₀ + mΩ` with weight
//! `P_m = |(1/T) ∫₀ᵀ e^{−iφ(t)} e^{−imΩt} dt|²`, `φ(t) = ∫₀ᵗ (ω_s − ω₀)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lindblad::{dissipate, dissipator_super, hamiltonian_super, BathSpec, SpectralFunction};
use crate::numeric;
use crate::ops::{pauli_x, pauli_z, sigma_minus, sigma_plus};
use crate::qcore::{c, expect, CMat, DensityMatrix, Hermitian, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Waveform {
    Constant,
    /// `ω_s(t) = ω₀ + λ sin(Ωt)`.
    Sinusoidal {
        amplitude: f64,
    },
    /// Square pulse: `ω₀ + A(1−d)` for the first fraction `d` of the period,
    /// `ω₀ − A d` for the rest. `A` is the peak-to-peak swing.
    PiecewiseAsymmetric {
        up_fraction: f64,
        amplitude: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicModulation {
    pub mean_gap: f64,
    pub waveform: Waveform,
    pub drive_frequency: f64,
}

impl PeriodicModulation {
    pub fn new(mean_gap: f64, waveform: Waveform, drive_frequency: f64) -> Result<Self> {
        if !(mean_gap > 0.0) || !(drive_frequency > 0.0) {
            return Err(Error::InvalidParams(
                "mean gap and drive frequency must be > 0".into(),
            ));
        }
        if let Waveform::PiecewiseAsymmetric { up_fraction, .. } = waveform {
            if !(up_fraction > 0.0 && up_fraction < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "up_fraction {up_fraction} outside (0, 1)"
                )));
            }
        }
        Ok(Self {
            mean_gap,
            waveform,
            drive_frequency,
        })
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.drive_frequency
    }

    /// `ω_s(t)`.
    pub fn gap(&self, t: f64) -> f64 {
        let w = self.drive_frequency;
        match self.waveform {
            Waveform::Constant => self.mean_gap,
            Waveform::Sinusoidal { amplitude } => self.mean_gap + amplitude * (w * t).sin(),
            Waveform::PiecewiseAsymmetric {
                up_fraction,
                amplitude,
            } => {
                let tau = (t / self.period()).rem_euclid(1.0);
                if tau < up_fraction {
                    self.mean_gap + amplitude * (1.0 - up_fraction)
                } else {
                    self.mean_gap - amplitude * up_fraction
                }
            }
        }
    }

    /// `H(t) = ω_s(t) σ_z / 2`.
    pub fn hamiltonian(&self, t: f64) -> CMat {
        pauli_z() * c(0.5 * self.gap(t), 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidebandWeights {
    pub m_max: usize,
    /// `P_m` for `m = −m_max ..= m_max`.
    pub weights: Vec<f64>,
}

impl SidebandWeights {
    pub fn get(&self, m: i64) -> f64 {
        if m.unsigned_abs() as usize > self.m_max {
            return 0.0;
        }
        self.weights[(m + self.m_max as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let mm = self.m_max as i64;
        self.weights
            .iter()
            .enumerate()
            .map(move |(k, &p)| (k as i64 - mm, p))
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Hard floor below which a truncation is rejected outright.
pub const MIN_WEIGHT_SUM: f64 = 0.999;

/// Fourier coefficients `c_m` of `e^{−iφ(t)}`.
fn phase_coefficients(modu: &PeriodicModulation, m_max: usize) -> Vec<C64> {
    let mm = m_max as i64;
    let big_t = modu.period();
    let w = modu.drive_frequency;
    match modu.waveform {
        Waveform::Constant => (-mm..=mm)
            .map(|m| if m == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .collect(),
        Waveform::Sinusoidal { amplitude } => {
            // smooth periodic integrand: the trapezoid rule converges
            // geometrically; refine until the coefficients stop moving
            let x = amplitude / w;
            let phase = |t: f64| x * (1.0 - (w * t).cos());
            let mut n = 64usize.max(4 * (m_max + 1));
            let mut prev: Option<Vec<C64>> = None;
            loop {
                let dt = big_t / n as f64;
                let samples: Vec<C64> = (0..n)
                    .map(|k| C64::from_polar(1.0, -phase(k as f64 * dt)))
                    .collect();
                let roots: Vec<C64> = (0..n)
                    .map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
                    .collect();
                let cur: Vec<C64> = (-mm..=mm)
                    .map(|m| {
                        let step = m.rem_euclid(n as i64) as usize;
                        let mut acc = c(0.0, 0.0);
                        let mut idx = 0usize;
                        for s in &samples {
                            acc += s * roots[idx];
                            idx = (idx + step) % n;
                        }
                        acc / n as f64
                    })
                    .collect();
                if let Some(p) = &prev {
                    let diff = p
                        .iter()
                        .zip(&cur)
                        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
                    if diff < 1e-14 || n > (1 << 20) {
                        return cur;
                    }
                }
                prev = Some(cur);
                n *= 2;
            }
        }
        Waveform::PiecewiseAsymmetric {
            up_fraction,
            amplitude,
        } => {
            // φ is piecewise linear: integrate each piece in closed form
            let d = up_fraction;
            let s_up = amplitude * (1.0 - d);
            let s_dn = -amplitude * d;
            let t_mid = d * big_t;
            let pieces = [(0.0, t_mid, 0.0, s_up), (t_mid, big_t, s_up * t_mid, s_dn)];
            (-mm..=mm)
                .map(|m| {
                    let mut acc = c(0.0, 0.0);
                    for &(a, b, phi_a, slope) in &pieces {
                        // ∫_a^b e^{−i(φ_a + slope (t−a))} e^{−imΩt} dt
                        let k = slope + m as f64 * w;
                        let pre = C64::from_polar(1.0, -phi_a + slope * a);
                        let integral = if (k * (b - a)).abs() < 1e-12 {
                            c(b - a, 0.0) * C64::from_polar(1.0, -k * a)
                        } else {
                            (C64::from_polar(1.0, -k * a) - C64::from_polar(1.0, -k * b))
                                / c(0.0, k)
                        };
                        acc += pre * integral;
                    }
                    acc / big_t
                })
                .collect()
        }
    }
}

pub fn sideband_weights(modu: &PeriodicModulation, m_max: usize) -> Result<SidebandWeights> {
    let weights: Vec<f64> = phase_coefficients(modu, m_max)
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    let out = SidebandWeights { m_max, weights };
    let total = out.total();
    if total < MIN_WEIGHT_SUM {
        return Err(Error::TruncationTooSmall(total));
    }
    Ok(out)
}

/// Doubles `m_max` until `Σ P_m ≥ 1 − budget` (capped at 4096).
pub fn sideband_weights_auto(
    modu: &PeriodicModulation,
    m_max: usize,
    budget: f64,
) -> Result<SidebandWeights> {
    let mut m = m_max.max(1);
    loop {
        match sideband_weights(modu, m) {
            Ok(w) if w.total() >= 1.0 - budget || m >= 4096 => return Ok(w),
            Err(e) if m >= 4096 => return Err(e),
            _ => m *= 2,
        }
    }
}

/// Floquet Hamiltonian `(i/T) ln U(T)` with quasi-energies in `(−Ω/2, Ω/2]`.
pub fn floquet_hamiltonian(h_of_t: impl Fn(f64) -> CMat, period: f64, steps: usize) -> Hermitian {
    let u = numeric::propagate(h_of_t, 0.0, period, steps);
    floquet_from_unitary(&u, period)
}

pub fn floquet_from_unitary(u: &CMat, period: f64) -> Hermitian {
    let (q, t) = u.clone().schur().unpack();
    let half_zone = PI / period;
    let eps: Vec<C64> = (0..t.nrows())
        .map(|k| {
            let mut e = -t[(k, k)].arg() / period;
            if e <= -half_zone * (1.0 - 1e-14) {
                e += 2.0 * half_zone;
            }
            c(e, 0.0)
        })
        .collect();
    let mut scaled = q.clone();
    for (j, &e) in eps.iter().enumerate() {
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= e;
        }
    }
    Hermitian::symmetrized(&scaled * q.adjoint())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Engine,
    Refrigerator,
    Heater,
    /// Work input that speeds the hot-to-cold heat flow.
    Accelerator,
    Off,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Engine => "Engine",
            Mode::Refrigerator => "Refrigerator",
            Mode::Heater => "Heater",
            Mode::Accelerator => "Accelerator",
            Mode::Off => "Off",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sign-table classification of `(J_h, J_c, P)` with `P` the power delivered
/// to the working fluid. Values within `tol` of zero count as zero.
pub fn classify_mode(j_h: f64, j_c: f64, p: f64, tol: f64) -> Result<Mode> {
    let sign = |x: f64| {
        if x > tol {
            1
        } else if x < -tol {
            -1
        } else {
            0
        }
    };
    let scale = j_h.abs() + j_c.abs() + p.abs();
    if (j_h + j_c + p).abs() > tol.max(1e-9 * scale) {
        return Err(Error::UnclassifiableState { j_h, j_c, p });
    }
    match (sign(j_h), sign(j_c), sign(p)) {
        (0, 0, 0) => Ok(Mode::Off),
        (1, -1, -1) => Ok(Mode::Engine),
        (-1, 1, 1) => Ok(Mode::Refrigerator),
        (-1, -1, 1) | (-1, 0, 1) | (0, -1, 1) => Ok(Mode::Heater),
        (1, -1, 1) | (1, -1, 0) => Ok(Mode::Accelerator),
        _ => Err(Error::UnclassifiableState { j_h, j_c, p }),
    }
}

#[derive(Clone, Debug)]
pub struct CtmConfig {
    pub modulation: PeriodicModulation,
    pub hot: BathSpec,
    pub cold: BathSpec,
}

impl CtmConfig {
    pub fn new(modulation: PeriodicModulation, hot: BathSpec, cold: BathSpec) -> Result<Self> {
        if !(hot.temperature > cold.temperature) {
            return Err(Error::InvalidParams("need T_h > T_c".into()));
        }
        Ok(Self {
            modulation,
            hot,
            cold,
        })
    }

    /// Spectrally separated flat baths: hot on `(ω₀, ω₀ + (m_max+½)Ω)`, cold on
    /// `(ω₀ − (m_max+½)Ω, ω₀)`, both coupled through `σ_x`.
    pub fn separated(
        modulation: PeriodicModulation,
        t_h: f64,
        t_c: f64,
        rate: f64,
        m_max: usize,
    ) -> Result<Self> {
        let w0 = modulation.mean_gap;
        let reach = (m_max as f64 + 0.5) * modulation.drive_frequency;
        let sx = Hermitian::new(pauli_x())?;
        let hot = BathSpec::new(
            "hot",
            t_h,
            SpectralFunction::windowed(rate, w0, w0 + reach),
            sx.clone(),
        )?;
        let cold = BathSpec::new(
            "cold",
            t_c,
            SpectralFunction::windowed(rate, w0 - reach, w0),
            sx,
        )?;
        Self::new(modulation, hot, cold)
    }

    pub fn omega_cr(&self) -> f64 {
        let (th, tc) = (self.hot.temperature, self.cold.temperature);
        self.modulation.mean_gap * (th - tc) / (th + tc)
    }

    fn baths(&self) -> [&BathSpec; 2] {
        [&self.hot, &self.cold]
    }
}

fn sideband_freq(cfg: &CtmConfig, m: i64) -> f64 {
    cfg.modulation.mean_gap + m as f64 * cfg.modulation.drive_frequency
}

/// Excited/ground steady-state ratio `r`.
pub fn ctm_ratio(cfg: &CtmConfig, weights: &SidebandWeights) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for bath in cfg.baths() {
        for (m, p) in weights.iter() {
            let w = sideband_freq(cfg, m);
            num += p * bath.rate(-w);
            den += p * bath.rate(w);
        }
    }
    if den <= 0.0 {
        return Err(Error::NoCoupling);
    }
    Ok(num / den)
}

pub fn ctm_steady_state(cfg: &CtmConfig, m_max: usize) -> Result<f64> {
    let weights = sideband_weights(&cfg.modulation, m_max)?;
    ctm_ratio(cfg, &weights)
}

pub fn ctm_state(r: f64) -> DensityMatrix {
    DensityMatrix::new_unchecked(crate::qcore::from_real_diag(&[
        r / (1.0 + r),
        1.0 / (1.0 + r),
    ]))
}

/// Static Floquet Hamiltonian of the modulated qubit, `ω₀ σ_z / 2`.
pub fn ctm_floquet_hamiltonian(cfg: &CtmConfig) -> Hermitian {
    Hermitian::symmetrized(pauli_z() * c(0.5 * cfg.modulation.mean_gap, 0.0))
}

/// Dense sideband generator `−i[H_F, ·] + Σ_{j,m} ℒ_m^j`.
pub fn ctm_sideband_generator(cfg: &CtmConfig, weights: &SidebandWeights) -> CMat {
    let mut total = hamiltonian_super(ctm_floquet_hamiltonian(cfg).matrix());
    for bath in cfg.baths() {
        for (m, p) in weights.iter() {
            let w = sideband_freq(cfg, m);
            total += dissipator_super(&sigma_minus(), p * bath.rate(w));
            total += dissipator_super(&sigma_plus(), p * bath.rate(-w));
        }
    }
    total
}

#[derive(Clone, Debug)]
pub struct CtmReport {
    pub r: f64,
    pub j_h: f64,
    pub j_c: f64,
    pub power: f64,
    pub mode: Mode,
    pub efficiency_or_cop: Option<f64>,
    pub omega_cr: f64,
    pub m_max: usize,
}

impl CtmReport {
    /// `J_h/T_h + J_c/T_c`; non-positive by the second law.
    pub fn second_law(&self, t_h: f64, t_c: f64) -> f64 {
        self.j_h / t_h + self.j_c / t_c
    }
}

/// Absolute zero-tolerance used when classifying CTM operating points.
pub const CTM_MODE_TOL: f64 = 1e-15;

pub fn ctm_currents(cfg: &CtmConfig, m_max: usize) -> Result<CtmReport> {
    let weights = sideband_weights_auto(&cfg.modulation, m_max, 1e-8)?;
    let r = ctm_ratio(cfg, &weights)?;
    let rho = ctm_state(r);
    let hf = ctm_floquet_hamiltonian(cfg);
    let w0 = cfg.modulation.mean_gap;
    let mut currents = [0.0; 2];
    for (j, bath) in cfg.baths().iter().enumerate() {
        for (m, p) in weights.iter() {
            let w = sideband_freq(cfg, m);
            let (down, up) = (p * bath.rate(w), p * bath.rate(-w));
            if down == 0.0 && up == 0.0 {
                continue;
            }
            let flow = dissipate(&sigma_minus(), down, rho.matrix())
                + dissipate(&sigma_plus(), up, rho.matrix());
            currents[j] += (w / w0) * expect(&flow, hf.matrix());
        }
    }
    let (j_h, j_c) = (currents[0], currents[1]);
    let power = -(j_h + j_c);
    let scale = j_h.abs() + j_c.abs();
    let mode = classify_mode(j_h, j_c, power, CTM_MODE_TOL.max(1e-12 * scale))?;
    let efficiency_or_cop = match mode {
        Mode::Engine => Some(-power / j_h),
        Mode::Refrigerator => Some(j_c / power),
        _ => None,
    };
    Ok(CtmReport {
        r,
        j_h,
        j_c,
        power,
        mode,
        efficiency_or_cop,
        omega_cr: cfg.omega_cr(),
        m_max: weights.m_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::steady_state_of;
    use crate::qcore::max_abs;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_waveform_has_single_sideband() {
        let m = PeriodicModulation::new(2.0, Waveform::Constant, 1.0).unwrap();
        let w = sideband_weights(&m, 5).unwrap();
        assert_eq!(w.get(0), 1.0);
        assert!(w.iter().filter(|(m, _)| *m != 0).all(|(_, p)| p == 0.0));
    }

    #[test]
    fn modulation_mean_is_the_gap() {
        for wf in [
            Waveform::Sinusoidal { amplitude: 3.0 },
            Waveform::PiecewiseAsymmetric {
                up_fraction: 0.3,
                amplitude: 2.0,
            },
        ] {
            let m = PeriodicModulation::new(5.0, wf, 1.7).unwrap();
            let mean = numeric::integrate(|t| m.gap(t), 0.0, m.period(), 1e-12) / m.period();
            assert_abs_diff_eq!(mean, 5.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn asymmetric_weights_match_direct_quadrature() {
        let m = PeriodicModulation::new(
            5.0,
            Waveform::PiecewiseAsymmetric {
                up_fraction: 0.3,
                amplitude: 2.0,
            },
            1.7,
        )
        .unwrap();
        let w = sideband_weights(&m, 6).unwrap();
        let big_t = m.period();
        // φ(t) from the slopes of the square pulse
        let t_mid = 0.3 * big_t;
        let phi = |t: f64| {
            if t < t_mid {
                1.4 * t
            } else {
                1.4 * t_mid - 0.6 * (t - t_mid)
            }
        };
        for mm in -3i64..=3 {
            let re =
                numeric::integrate(|t| (-phi(t) - mm as f64 * 1.7 * t).cos(), 0.0, big_t, 1e-11)
                    / big_t;
            let im =
                numeric::integrate(|t| (-phi(t) - mm as f64 * 1.7 * t).sin(), 0.0, big_t, 1e-11)
                    / big_t;
            assert_abs_diff_eq!(w.get(mm), re * re + im * im, epsilon = 1e-9);
        }
    }

    #[test]
    fn truncation_floor_enforced() {
        let m =
            PeriodicModulation::new(5.0, Waveform::Sinusoidal { amplitude: 20.0 }, 1.0).unwrap();
        assert!(matches!(
            sideband_weights(&m, 2),
            Err(Error::TruncationTooSmall(_))
        ));
        assert!(sideband_weights_auto(&m, 2, 1e-8).unwrap().total() >= 1.0 - 1e-8);
    }

    #[test]
    fn floquet_of_static_and_commuting_drives() {
        let h = pauli_z() * c(0.4, 0.0) + pauli_x() * c(0.3, 0.0);
        let hf = floquet_hamiltonian(|_| h.clone(), 2.0, 8);
        assert!(max_abs(&(hf.matrix() - &h)) < 1e-10);
        let m = PeriodicModulation::new(1.0, Waveform::Sinusoidal { amplitude: 0.5 }, 3.0).unwrap();
        let hf = floquet_hamiltonian(|t| m.hamiltonian(t), m.period(), 400);
        assert!(max_abs(&(hf.matrix() - pauli_z() * c(0.5, 0.0))) < 1e-10);
    }

    #[test]
    fn quasi_energies_fold_into_first_zone() {
        // gap 5 with period 2π/3: ±2.5 fold to ∓0.5
        let h = pauli_z() * c(2.5, 0.0);
        let hf = floquet_hamiltonian(|_| h.clone(), 2.0 * PI / 3.0, 4);
        assert!(max_abs(&(hf.matrix() - pauli_z() * c(-0.5, 0.0))) < 1e-10);
    }

    #[test]
    fn two_step_drive_matches_bch() {
        let h1 = pauli_z() * c(0.7, 0.0);
        let h2 = pauli_x() * c(0.4, 0.0);
        for &t in &[0.02, 0.04] {
            let hf =
                floquet_hamiltonian(|s| if s < t / 2.0 { h1.clone() } else { h2.clone() }, t, 2);
            let bch = (&h1 + &h2) * c(0.5, 0.0) + (&h2 * &h1 - &h1 * &h2) * c(0.0, -t / 8.0);
            assert!(max_abs(&(hf.matrix() - bch)) < 0.1 * t * t);
        }
    }

    #[test]
    fn mode_sign_table() {
        assert_eq!(classify_mode(1.0, -0.6, -0.4, 1e-12).unwrap(), Mode::Engine);
        assert_eq!(
            classify_mode(-1.0, 0.6, 0.4, 1e-12).unwrap(),
            Mode::Refrigerator
        );
        assert_eq!(classify_mode(-0.5, -0.5, 1.0, 1e-12).unwrap(), Mode::Heater);
        assert_eq!(classify_mode(0.0, 0.0, 0.0, 1e-12).unwrap(), Mode::Off);
        assert!(matches!(
            classify_mode(1.0, 0.5, -1.5, 1e-12),
            Err(Error::UnclassifiableState { .. })
        ));
    }

    fn config(omega: f64, lambda: f64, t_h: f64, t_c: f64) -> CtmConfig {
        let m = PeriodicModulation::new(10.0, Waveform::Sinusoidal { amplitude: lambda }, omega)
            .unwrap();
        CtmConfig::separated(m, t_h, t_c, 1.0, 40).unwrap()
    }

    #[test]
    fn single_bath_constant_drive_is_gibbs() {
        let m = PeriodicModulation::new(2.0, Waveform::Constant, 1.0).unwrap();
        let sx = Hermitian::new(pauli_x()).unwrap();
        let hot = BathSpec::new("hot", 1.5, SpectralFunction::flat(1.0), sx.clone()).unwrap();
        let cold = BathSpec::new("cold", 0.5, SpectralFunction::flat(0.0), sx).unwrap();
        let cfg = CtmConfig::new(m, hot, cold).unwrap();
        assert_abs_diff_eq!(
            ctm_steady_state(&cfg, 4).unwrap(),
            (-2.0f64 / 1.5).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ratio_matches_generator_kernel() {
        let cfg = config(3.0, 4.0, 4.0, 1.0);
        let w = sideband_weights(&cfg.modulation, 40).unwrap();
        let r = ctm_ratio(&cfg, &w).unwrap();
        let ss = steady_state_of(&ctm_sideband_generator(&cfg, &w), 2).unwrap();
        assert!(max_abs(&(ss.matrix() - ctm_state(r).matrix())) < 1e-10);
    }

    #[test]
    fn engine_efficiency_under_weak_modulation() {
        let cfg = config(4.0, 1e-4, 4.0, 1.0);
        let rep = ctm_currents(&cfg, 40).unwrap();
        assert_eq!(rep.mode, Mode::Engine);
        let eta = rep.efficiency_or_cop.unwrap();
        assert_abs_diff_eq!(eta, 8.0 / 14.0, epsilon = 1e-9);
        assert!(eta <= 0.75);
        let rep = ctm_currents(&config(7.0, 1e-4, 4.0, 1.0), 40).unwrap();
        assert_eq!(rep.mode, Mode::Refrigerator);
        assert!(rep.second_law(4.0, 1.0) <= 1e-12);
    }

    #[test]
    fn no_coupling_reported() {
        let m = PeriodicModulation::new(2.0, Waveform::Constant, 1.0).unwrap();
        let sx = Hermitian::new(pauli_x()).unwrap();
        let hot = BathSpec::new("hot", 1.5, SpectralFunction::flat(0.0), sx.clone()).unwrap();
        let cold = BathSpec::new("cold", 0.5, SpectralFunction::flat(0.0), sx).unwrap();
        let cfg = CtmConfig::new(m, hot, cold).unwrap();
        assert!(matches!(ctm_steady_state(&cfg, 4), Err(Error::NoCoupling)));
    }
}
