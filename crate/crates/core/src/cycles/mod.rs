//! Reciprocating machines: closed-form cycles and simulated ones.
//!
//! Sign convention: stroke work `W > 0` is done on the working fluid, heat
//! `Q > 0` flows into it, and `net_work_output = −ΣW`.

mod otto_numeric;
mod outcoupled;

pub use otto_numeric::{otto_numeric, NumericOttoReport, OttoNumericParams};
pub use outcoupled::{
    outcoupled_indistinct_ratio, outcoupled_multicycle, outcoupled_projective_work,
    outcoupled_work_series, IndistinctParams, OutcoupledParams,
};

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::floquet::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrokeKind {
    IsentropicCompression,
    IsentropicExpansion,
    HotIsochore,
    ColdIsochore,
    IsothermalExpansion,
    IsothermalCompression,
    UnitaryStroke,
    ThermalizationStroke,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Duration {
    QuasiStatic,
    Finite(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrokeRecord {
    pub kind: StrokeKind,
    /// Work done on the working fluid.
    pub work: f64,
    /// Heat into the working fluid.
    pub heat: f64,
    pub duration: Duration,
}

impl StrokeRecord {
    fn quasi_static(kind: StrokeKind, work: f64, heat: f64) -> Self {
        Self {
            kind,
            work,
            heat,
            duration: Duration::QuasiStatic,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub strokes: Vec<StrokeRecord>,
    pub net_work_output: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    pub efficiency: Option<f64>,
    pub cop: Option<f64>,
    pub mode: Mode,
    /// `η_C − η` for engines, `COP_C − COP` for refrigerators, 0 otherwise.
    pub carnot_margin: f64,
}

impl CycleReport {
    /// `Σ(W + Q)` over the strokes; zero for a closed cycle.
    pub fn first_law_residual(&self) -> f64 {
        self.strokes.iter().map(|s| s.work + s.heat).sum()
    }

    /// Largest stroke exchange, the natural scale for relative checks.
    pub fn energy_scale(&self) -> f64 {
        self.strokes
            .iter()
            .fold(0.0f64, |m, s| m.max(s.work.abs()).max(s.heat.abs()))
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

fn finite(vals: &[f64]) -> Result<()> {
    require(
        vals.iter().all(|v| v.is_finite()),
        "parameters must be finite",
    )
}

fn check_temperatures(t_h: f64, t_c: f64) -> Result<()> {
    finite(&[t_h, t_c])?;
    require(t_c > 0.0 && t_h > t_c, "need T_h > T_c > 0")
}

/// Mean occupation `1/(e^{ω/T} − 1)`.
pub(crate) fn bose(omega: f64, t: f64) -> f64 {
    1.0 / (omega / t).exp_m1()
}

// ---------------------------------------------------------------- maser

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaserReport {
    pub efficiency: f64,
    pub cop: f64,
    pub inversion: bool,
    pub mode: Mode,
}

/// Quasi-static three-level maser between a hot transition `ω_h` and a cold
/// transition `ω_c`; the output photon carries `ω_h − ω_c`.
pub fn maser_analyze(omega_h: f64, omega_c: f64, t_h: f64, t_c: f64) -> Result<MaserReport> {
    finite(&[omega_h, omega_c, t_h, t_c])?;
    require(omega_c > 0.0 && omega_h > omega_c, "need ω_h > ω_c > 0")?;
    require(t_c > 0.0 && t_h >= t_c, "need T_h ≥ T_c > 0")?;
    let inversion = omega_c / omega_h >= t_c / t_h;
    Ok(MaserReport {
        efficiency: 1.0 - omega_c / omega_h,
        cop: omega_c / (omega_h - omega_c),
        inversion,
        mode: if inversion {
            Mode::Engine
        } else {
            Mode::Refrigerator
        },
    })
}

// ---------------------------------------------------------------- box Carnot

/// Force on the wall of a box of length `l` holding a two-level
/// superposition with ground weight `p1`.
fn box_force(p1: f64, l: f64, m: f64) -> f64 {
    (PI * PI / (m * l.powi(3))) * (p1 + 4.0 * (1.0 - p1))
}

/// Ground weight that keeps the mean energy at `e` for box length `l`.
fn isoenergetic_weight(e: f64, l: f64, m: f64) -> f64 {
    let e1 = PI * PI / (2.0 * m * l * l);
    (4.0 * e1 - e) / (3.0 * e1)
}

/// Work done by the wall force as the box goes from `l0` to `l1`.
fn force_work(f: impl Fn(f64) -> f64, l0: f64, l1: f64) -> f64 {
    crate::numeric::integrate(f, l0, l1, 1e-14)
}

/// Carnot cycle of one particle in a box restricted to its two lowest levels.
///
/// The stroke works are quadratures of the wall force; the adiabats keep a
/// single level occupied and the isotherms keep the mean energy fixed.
pub fn box_carnot(l_a: f64, l_b: f64, m: f64) -> Result<CycleReport> {
    finite(&[l_a, l_b, m])?;
    require(l_b > 0.0 && l_a > l_b, "need L_A > L_B > 0")?;
    require(m > 0.0, "mass must be positive")?;
    let e_a = PI * PI / (2.0 * m * l_a * l_a);
    let e_b = PI * PI / (2.0 * m * l_b * l_b);

    // work done by the system along each leg
    let by_ab = force_work(|l| box_force(1.0, l, m), l_a, l_b);
    let by_bc = force_work(
        |l| box_force(isoenergetic_weight(e_b, l, m), l, m),
        l_b,
        2.0 * l_b,
    );
    let by_cd = force_work(|l| box_force(0.0, l, m), 2.0 * l_b, 2.0 * l_a);
    let by_da = force_work(
        |l| box_force(isoenergetic_weight(e_a, l, m), l, m),
        2.0 * l_a,
        l_a,
    );

    let strokes = vec![
        StrokeRecord::quasi_static(StrokeKind::IsentropicCompression, -by_ab, 0.0),
        StrokeRecord::quasi_static(StrokeKind::IsothermalExpansion, -by_bc, by_bc),
        StrokeRecord::quasi_static(StrokeKind::IsentropicExpansion, -by_cd, 0.0),
        StrokeRecord::quasi_static(StrokeKind::IsothermalCompression, -by_da, by_da),
    ];
    let net = by_ab + by_bc + by_cd + by_da;
    let efficiency = net / by_bc;
    Ok(CycleReport {
        strokes,
        net_work_output: net,
        q_hot: by_bc,
        q_cold: by_da,
        efficiency: Some(efficiency),
        cop: None,
        mode: Mode::Engine,
        carnot_margin: (1.0 - e_a / e_b) - efficiency,
    })
}

/// Closed-form net work `(π²/m)(1/L_B² − 1/L_A²) ln 2`.
pub fn box_carnot_work(l_a: f64, l_b: f64, m: f64) -> f64 {
    (PI * PI / m) * (1.0 / (l_b * l_b) - 1.0 / (l_a * l_a)) * LN_2
}

// ---------------------------------------------------------------- Otto

fn check_otto(omega_a: f64, omega_b: f64, t_h: f64, t_c: f64) -> Result<()> {
    finite(&[omega_a, omega_b])?;
    require(omega_b > 0.0 && omega_a >= omega_b, "need ω_A ≥ ω_B > 0")?;
    check_temperatures(t_h, t_c)
}

/// Otto cycle of a harmonic oscillator from the occupations reached on the
/// hot (`n_h`, at `ω_A`) and cold (`n_c`, at `ω_B`) isochores.
///
/// `t_h_eff` is the hot temperature entering the Carnot margin.
fn otto_from_occupations(
    omega_a: f64,
    omega_b: f64,
    n_h: f64,
    n_c: f64,
    t_h_eff: f64,
    t_c: f64,
) -> CycleReport {
    let w_ab = (omega_b - omega_a) * (n_h + 0.5);
    let q_c = omega_b * (n_c - n_h);
    let w_ba = (omega_a - omega_b) * (n_c + 0.5);
    let q_h = -(w_ab + q_c + w_ba);
    let strokes = vec![
        StrokeRecord::quasi_static(StrokeKind::IsentropicExpansion, w_ab, 0.0),
        StrokeRecord::quasi_static(StrokeKind::ColdIsochore, 0.0, q_c),
        StrokeRecord::quasi_static(StrokeKind::IsentropicCompression, w_ba, 0.0),
        StrokeRecord::quasi_static(StrokeKind::HotIsochore, 0.0, q_h),
    ];
    let ratio = omega_b / omega_a;
    let carnot = 1.0 - t_c / t_h_eff;
    let (mode, efficiency, cop, margin) = if omega_a == omega_b {
        // no work; any heat simply leaks from hot to cold
        let mode = if n_h == n_c {
            Mode::Off
        } else {
            Mode::Accelerator
        };
        (mode, None, None, 0.0)
    } else if n_h >= n_c {
        let eta = 1.0 - ratio;
        (Mode::Engine, Some(eta), None, carnot - eta)
    } else {
        let cop = omega_b / (omega_a - omega_b);
        let cop_c = t_c / (t_h_eff - t_c);
        (Mode::Refrigerator, None, Some(cop), cop_c - cop)
    };
    CycleReport {
        strokes,
        net_work_output: -(w_ab + w_ba),
        q_hot: q_h,
        q_cold: q_c,
        efficiency,
        cop,
        mode,
        carnot_margin: margin,
    }
}

/// Ideal quasi-static Otto cycle of a harmonic oscillator with frequency
/// `ω_A` on the hot isochore and `ω_B` on the cold one.
pub fn otto_qho(omega_a: f64, omega_b: f64, t_h: f64, t_c: f64) -> Result<CycleReport> {
    check_otto(omega_a, omega_b, t_h, t_c)?;
    let mut rep = otto_from_occupations(
        omega_a,
        omega_b,
        bose(omega_a, t_h),
        bose(omega_b, t_c),
        t_h,
        t_c,
    );
    // at the Carnot point the occupations tie only up to rounding
    if omega_a != omega_b && omega_b / omega_a >= t_c / t_h && rep.mode != Mode::Engine {
        rep.mode = Mode::Engine;
        rep.efficiency = Some(1.0 - omega_b / omega_a);
        rep.cop = None;
        rep.carnot_margin = (1.0 - t_c / t_h) - (1.0 - omega_b / omega_a);
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxPower {
    /// Optimal frequency ratio `ω_B/ω_A`.
    pub ratio: f64,
    pub efficiency: f64,
}

/// Maximizes the high-temperature Otto work `(x − 1)(T_c/x − T_h)` over the
/// compression ratio `x = ω_B/ω_A ∈ (T_c/T_h, 1)`.
pub fn otto_max_power(t_h: f64, t_c: f64) -> Result<MaxPower> {
    check_temperatures(t_h, t_c)?;
    // W'(x) = T_c/x² − T_h changes sign once on the interval; bisecting it
    // avoids the √ε floor of comparing values on the flat top
    let slope = |x: f64| t_c / (x * x) - t_h;
    let x = crate::numeric::bisect(slope, t_c / t_h, 1.0, 1e-15)
        .ok_or_else(|| Error::NumericalInstability("work maximum not bracketed".into()))?;
    Ok(MaxPower {
        ratio: x,
        efficiency: 1.0 - x,
    })
}

#[derive(Clone, Debug)]
pub struct SqueezedOttoReport {
    pub cycle: CycleReport,
    /// Efficiency at maximum power in the high-temperature limit.
    pub efficiency_max_power: f64,
    /// Carnot bound with the squeezing-enhanced hot temperature.
    pub generalized_carnot: f64,
}

/// Otto cycle whose hot bath is a squeezed thermal state with parameter `r`.
///
/// Squeezing scales the energy reached on the hot isochore by
/// `ΔH_r = 1 + (2 + 1/n₀)sinh²r`, zero-point part included. The cycle's
/// Carnot margin is taken against the temperature that would give that
/// energy at `ω_A`.
pub fn otto_squeezed(
    omega_a: f64,
    omega_b: f64,
    t_h: f64,
    t_c: f64,
    r: f64,
) -> Result<SqueezedOttoReport> {
    check_otto(omega_a, omega_b, t_h, t_c)?;
    finite(&[r])?;
    require(r >= 0.0, "squeezing must be non-negative")?;
    let s2 = r.sinh().powi(2);
    let n0 = bose(omega_a, t_h);
    let scale = 1.0 + (2.0 + 1.0 / n0) * s2;
    let n_h = (n0 + 0.5) * scale - 0.5;
    let t_eff = omega_a / (1.0 / n_h).ln_1p();
    let cycle = if r == 0.0 {
        otto_qho(omega_a, omega_b, t_h, t_c)?
    } else {
        otto_from_occupations(omega_a, omega_b, n_h, bose(omega_b, t_c), t_eff, t_c)
    };
    let t_high = t_h * (1.0 + 2.0 * s2);
    let mp = otto_max_power(t_high, t_c)?;
    Ok(SqueezedOttoReport {
        cycle,
        efficiency_max_power: mp.efficiency,
        generalized_carnot: 1.0 - t_c / t_high,
    })
}

// ---------------------------------------------------------------- two-stroke

/// Excited population of a qubit with levels `±ω` at temperature `t`.
pub fn qubit_excited_population(omega: f64, t: f64) -> f64 {
    // e^{−ω/T}/(e^{−ω/T} + e^{ω/T})
    1.0 / (1.0 + (2.0 * omega / t).exp())
}

/// Two-stroke machine: a qubit with levels `±ω_k` at the hot bath and one with
/// levels `±ω_un` at the cold bath are partially swapped by angle `θ`, then
/// rethermalized.
pub fn two_stroke(
    omega_k: f64,
    omega_un: f64,
    t_h: f64,
    t_c: f64,
    theta: f64,
) -> Result<CycleReport> {
    finite(&[omega_k, omega_un, theta])?;
    require(omega_un > 0.0 && omega_k > omega_un, "need ω_k > ω_un > 0")?;
    check_temperatures(t_h, t_c)?;
    require((0.0..=PI).contains(&theta), "θ must lie in [0, π]")?;
    let n_k = qubit_excited_population(omega_k, t_h);
    let n_un = qubit_excited_population(omega_un, t_c);
    let s2 = theta.sin().powi(2);
    let q_h = 2.0 * omega_k * (n_k - n_un) * s2;
    let q_c = 2.0 * omega_un * (n_un - n_k) * s2;
    let w = -2.0 * (omega_k - omega_un) * (n_k - n_un) * s2;
    let strokes = vec![
        StrokeRecord {
            kind: StrokeKind::UnitaryStroke,
            work: w,
            heat: 0.0,
            duration: Duration::QuasiStatic,
        },
        StrokeRecord::quasi_static(StrokeKind::ThermalizationStroke, 0.0, q_h),
        StrokeRecord::quasi_static(StrokeKind::ThermalizationStroke, 0.0, q_c),
    ];
    let x = omega_un / omega_k;
    let (mode, efficiency, cop, margin) = if s2 == 0.0 || n_k == n_un {
        (Mode::Off, None, None, 0.0)
    } else if n_k > n_un {
        let eta = 1.0 - x;
        (Mode::Engine, Some(eta), None, (1.0 - t_c / t_h) - eta)
    } else {
        let cop = x / (1.0 - x);
        (Mode::Refrigerator, None, Some(cop), t_c / (t_h - t_c) - cop)
    };
    Ok(CycleReport {
        strokes,
        net_work_output: -w,
        q_hot: q_h,
        q_cold: q_c,
        efficiency,
        cop,
        mode,
        carnot_margin: margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn maser_example() {
        let r = maser_analyze(3.0, 2.0, 2.0, 1.0).unwrap();
        assert!(r.inversion);
        assert_eq!(r.mode, Mode::Engine);
        assert_relative_eq!(r.efficiency, 1.0 / 3.0, epsilon = 1e-15);
        let eq = maser_analyze(3.0, 2.0, 1.5, 1.5).unwrap();
        assert_eq!(eq.mode, Mode::Refrigerator);
        assert!(maser_analyze(2.0, 3.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn box_work_matches_closed_form() {
        let r = box_carnot(2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            r.net_work_output,
            PI * PI * 0.75 * LN_2,
            max_relative = 1e-10
        );
        assert_relative_eq!(r.efficiency.unwrap(), 0.75, epsilon = 1e-10);
        assert_relative_eq!(r.q_hot, PI * PI * LN_2, max_relative = 1e-10);
        assert!(r.first_law_residual().abs() < 1e-12);
    }

    #[test]
    fn box_legs_match_antiderivatives() {
        let (la, lb, m) = (3.0, 1.3, 0.7);
        let r = box_carnot(la, lb, m).unwrap();
        let k = PI * PI / m;
        // F_AB = k/L³, F_BC = k/(L L_B²), F_CD = 4k/L³, F_DA = k/(L L_A²)
        let want = [
            0.5 * k * (1.0 / (lb * lb) - 1.0 / (la * la)),
            -k / (lb * lb) * LN_2,
            -0.5 * k * (1.0 / (lb * lb) - 1.0 / (la * la)),
            k / (la * la) * LN_2,
        ];
        for (s, w) in r.strokes.iter().zip(want) {
            assert!(
                (s.work - w).abs() < 1e-9,
                "{:?}: {} vs {}",
                s.kind,
                s.work,
                w
            );
        }
    }

    #[test]
    fn otto_example_and_carnot_point() {
        let r = otto_qho(2.0, 1.0, 4.0, 1.0).unwrap();
        assert_eq!(r.mode, Mode::Engine);
        assert_relative_eq!(r.efficiency.unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.carnot_margin, 0.25, epsilon = 1e-15);
        let c2 = |x: f64| 1.0 / (x / 2.0).tanh();
        assert_relative_eq!(r.strokes[0].work, -0.5 * c2(0.5), epsilon = 1e-14);
        assert_relative_eq!(
            r.strokes[1].heat,
            0.5 * (c2(1.0) - c2(0.5)),
            epsilon = 1e-14
        );
        assert_relative_eq!(r.strokes[2].work, 0.5 * c2(1.0), epsilon = 1e-14);
        assert!(r.first_law_residual().abs() < 1e-14);

        let cp = otto_qho(2.0, 0.5, 4.0, 1.0).unwrap();
        assert!(cp.net_work_output.abs() < 1e-14);
        assert!(cp.q_hot.abs() < 1e-14);
        assert_eq!(cp.mode, Mode::Engine);
        assert_relative_eq!(cp.efficiency.unwrap(), 0.75, epsilon = 1e-15);

        // equal frequencies: no work, but heat still conducts hot → cold
        let null = otto_qho(1.5, 1.5, 4.0, 1.0).unwrap();
        assert_eq!(null.net_work_output, 0.0);
        assert!(null.strokes.iter().all(|s| s.work == 0.0));
        assert!(null.q_hot > 0.0 && null.q_cold < 0.0);
        assert_eq!(null.mode, Mode::Accelerator);
    }

    #[test]
    fn otto_refrigerator_cop() {
        let r = otto_qho(2.0, 0.4, 4.0, 1.0).unwrap();
        assert_eq!(r.mode, Mode::Refrigerator);
        assert!(r.q_cold > 0.0 && r.net_work_output < 0.0);
        assert_relative_eq!(
            r.cop.unwrap(),
            r.q_cold / -r.net_work_output,
            max_relative = 1e-12
        );
        assert!(r.carnot_margin > 0.0);
    }

    #[test]
    fn max_power_is_curzon_ahlborn() {
        let r = otto_max_power(4.0, 1.0).unwrap();
        assert!((r.ratio - 0.5).abs() < 1e-9);
        assert!((r.efficiency - 0.5).abs() < 1e-9);
        let near = otto_max_power(1.0 + 1e-6, 1.0).unwrap();
        assert!(near.efficiency < 1e-6);
    }

    #[test]
    fn squeezing_reduces_to_plain_otto() {
        let s = otto_squeezed(2.0, 1.0, 4.0, 1.0, 0.0).unwrap();
        let p = otto_qho(2.0, 1.0, 4.0, 1.0).unwrap();
        assert_eq!(s.cycle.net_work_output, p.net_work_output);
        assert_relative_eq!(s.efficiency_max_power, 0.5, epsilon = 1e-9);
        let s = otto_squeezed(2.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let sh = 1f64.sinh().powi(2);
        assert_relative_eq!(
            s.efficiency_max_power,
            1.0 - (1.0 / (2.0 * (1.0 + 2.0 * sh))).sqrt(),
            epsilon = 1e-9
        );
        assert!(s.efficiency_max_power <= s.generalized_carnot);
        assert_relative_eq!(s.cycle.efficiency.unwrap(), 0.5, epsilon = 1e-15);
        assert!(s.cycle.net_work_output > p.net_work_output);
        // W = ((ω_B − ω_A)/2)[coth(ω_B/2T_c) − coth(ω_A/2T_h) ΔH_r]
        let n0 = 1.0 / (1f64).exp_m1();
        let dh = 1.0 + (2.0 + 1.0 / n0) * sh;
        let coth = |x: f64| 1.0 / x.tanh();
        let w = -0.5 * (coth(0.5) - coth(0.5) * dh);
        assert_relative_eq!(s.cycle.net_work_output, w, max_relative = 1e-12);
    }

    #[test]
    fn two_stroke_sign_reversal() {
        let f = |w_un: f64| two_stroke(5.0, w_un, 2.0, 1.0, PI / 2.0).unwrap();
        let below = f(2.5 - 1e-6);
        let above = f(2.5 + 1e-6);
        // ω_un/ω_k below T_c/T_h refrigerates, above it runs an engine
        assert!(below.net_work_output < 0.0 && above.net_work_output > 0.0);
        assert!(below.q_hot < 0.0 && above.q_hot > 0.0);
        assert!(below.q_cold > 0.0 && above.q_cold < 0.0);
        assert_eq!(below.mode, Mode::Refrigerator);
        assert_eq!(above.mode, Mode::Engine);
        assert_eq!(f(2.5).mode, Mode::Off);
        let zero = two_stroke(5.0, 2.0, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(zero.energy_scale(), 0.0);
    }
}
