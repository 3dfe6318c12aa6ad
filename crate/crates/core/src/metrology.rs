//! Parameter estimation: symmetric logarithmic derivative, quantum and
//! classical Fisher information, and the two null-point protocols that use a
//! thermal machine as a probe.

use crate::cycles::two_stroke;
use crate::error::{Error, Result};
use crate::qcore::{c, expect, fidelity, hermitian_eig, CMat, DensityMatrix, Hermitian, I};

/// Eigenvalues below this are treated as the kernel of `ρ`.
pub const SLD_FLOOR: f64 = 1e-12;
/// Outcomes rarer than this are left out of the classical Fisher sum.
pub const CFI_FLOOR: f64 = 1e-12;
/// Largest thermal population allowed on the top Fock level of either mode.
pub const THERMOMETRY_TAIL_TOL: f64 = 1e-8;

type Generator = dyn Fn(f64) -> Result<DensityMatrix> + Send + Sync;

/// One-parameter family of states `θ ↦ ρ_θ`.
pub struct ParamFamily {
    generator: Box<Generator>,
    step: Option<f64>,
}

impl ParamFamily {
    /// Uses the default step `1e-5 · max(|θ|, 1)`.
    pub fn new(generator: impl Fn(f64) -> Result<DensityMatrix> + Send + Sync + 'static) -> Self {
        Self {
            generator: Box::new(generator),
            step: None,
        }
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "finite-difference step {step} must be positive"
            )));
        }
        self.step = Some(step);
        Ok(self)
    }

    pub fn state(&self, theta: f64) -> Result<DensityMatrix> {
        (self.generator)(theta)
    }

    pub fn step_at(&self, theta: f64) -> f64 {
        self.step.unwrap_or(1e-5 * theta.abs().max(1.0))
    }

    /// `ρ_θ` and its centered-difference derivative.
    pub fn state_and_derivative(&self, theta: f64) -> Result<(DensityMatrix, CMat)> {
        let h = self.step_at(theta);
        let rho = self.state(theta)?;
        let plus = self.state(theta + h)?;
        let minus = self.state(theta - h)?;
        if plus.dim() != rho.dim() || minus.dim() != rho.dim() {
            return Err(Error::DimMismatch {
                expected: rho.dim(),
                got: plus.dim(),
            });
        }
        let d = (plus.matrix() - minus.matrix()) * c(0.5 / h, 0.0);
        Ok((rho, d))
    }
}

#[derive(Clone, Debug)]
pub struct FisherReport {
    pub qfi: f64,
    pub cfi: Option<f64>,
    pub sld: Hermitian,
    /// `1/qfi`; infinite when the family carries no information.
    pub cramer_rao_floor: f64,
}

/// Eigenbasis of `ρ` and the derivative expressed in it.
struct SpectralData {
    p: Vec<f64>,
    v: CMat,
    d: CMat,
}

fn spectral(family: &ParamFamily, theta: f64) -> Result<SpectralData> {
    let (rho, deriv) = family.state_and_derivative(theta)?;
    let eig = hermitian_eig(&rho.hermitian());
    let d = eig.vectors.adjoint() * deriv * &eig.vectors;
    let scale = d.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            let kernel = eig.values[i] + eig.values[j] <= SLD_FLOOR;
            // sqrt of the floor: the difference of two kernel states is
            // second order in the step
            if kernel && d[(i, j)].norm() > SLD_FLOOR.sqrt() * scale {
                return Err(Error::SingularState);
            }
        }
    }
    Ok(SpectralData {
        p: eig.values,
        v: eig.vectors,
        d,
    })
}

/// Support-projected solution of `∂ρ = ½(Lρ + ρL)`.
pub fn sld(family: &ParamFamily, theta: f64) -> Result<Hermitian> {
    let s = spectral(family, theta)?;
    let n = s.p.len();
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let denom = s.p[i] + s.p[j];
            if denom > SLD_FLOOR {
                l[(i, j)] = s.d[(i, j)] * c(2.0 / denom, 0.0);
            }
        }
    }
    Ok(Hermitian::symmetrized(&s.v * l * s.v.adjoint()))
}

/// Quantum Fisher information from the spectral formula, with the SLD.
///
/// The population and coherence sums combine into `Σ 2|D_ij|²/(p_i + p_j)`
/// with `D` the derivative in the eigenbasis of `ρ`. The result is checked
/// against `Tr(ρL²)`.
pub fn qfi(family: &ParamFamily, theta: f64) -> Result<FisherReport> {
    let s = spectral(family, theta)?;
    let n = s.p.len();
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..n {
            let denom = s.p[i] + s.p[j];
            if denom > SLD_FLOOR {
                h += 2.0 * s.d[(i, j)].norm_sqr() / denom;
            }
        }
    }
    let l = sld(family, theta)?;
    let rho = family.state(theta)?;
    let check = expect(rho.matrix(), &(l.matrix() * l.matrix()));
    if (check - h).abs() > 1e-7 * h.max(1.0) {
        return Err(Error::NumericalInstability(format!(
            "QFI {h} disagrees with Tr(ρL²) = {check}"
        )));
    }
    Ok(FisherReport {
        qfi: h,
        cfi: None,
        sld: l,
        cramer_rao_floor: 1.0 / h,
    })
}

fn check_povm(povm: &[CMat], d: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::InvalidPovm("no outcomes".into()));
    }
    let mut total = CMat::zeros(d, d);
    for e in povm {
        if e.nrows() != d || e.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: e.nrows(),
            });
        }
        let herm = Hermitian::new(e.clone())
            .map_err(|_| Error::InvalidPovm("element is not Hermitian".into()))?;
        let min = hermitian_eig(&herm).values.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::InvalidPovm(format!(
                "element has eigenvalue {min:e}"
            )));
        }
        total += e;
    }
    let dev = crate::qcore::max_abs(&(total - CMat::identity(d, d)));
    if dev > 1e-10 {
        return Err(Error::InvalidPovm(format!(
            "elements sum to identity only within {dev:e}"
        )));
    }
    Ok(())
}

/// Classical Fisher information of the outcome distribution of `povm`.
pub fn cfi(family: &ParamFamily, theta: f64, povm: &[CMat]) -> Result<f64> {
    let (rho, deriv) = family.state_and_derivative(theta)?;
    check_povm(povm, rho.dim())?;
    Ok(povm
        .iter()
        .map(|e| (rho.expect(e), expect(&deriv, e)))
        .filter(|&(p, _)| p > CFI_FLOOR)
        .map(|(p, dp)| dp * dp / p)
        .sum())
}

/// QFI together with the CFI of a supplied measurement.
pub fn fisher_report(family: &ParamFamily, theta: f64, povm: &[CMat]) -> Result<FisherReport> {
    let mut r = qfi(family, theta)?;
    r.cfi = Some(cfi(family, theta, povm)?);
    Ok(r)
}

/// Projectors onto the eigenspaces of a Hermitian operator.
pub fn eigenprojectors(op: &Hermitian) -> Vec<CMat> {
    let eig = hermitian_eig(op);
    let scale = eig
        .values
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let mut out: Vec<CMat> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (j, &val) in eig.values.iter().enumerate() {
        let col = eig.vectors.column(j);
        let proj = &col * col.adjoint();
        if val - last > 1e-9 * scale || out.is_empty() {
            out.push(proj);
        } else {
            *out.last_mut().expect("nonempty") += proj;
        }
        last = val;
    }
    out
}

/// `8(1 − F(ρ_θ, ρ_{θ+ε}))/ε²`, averaged over `±ε` to drop the odd orders
/// and Richardson-extrapolated over `ε` and `2ε`.
///
/// Converges to the QFI with root fidelity. Needs a full-rank family: on a
/// rank-deficient state the fidelity loses half its digits.
pub fn fidelity_susceptibility(family: &ParamFamily, theta: f64, eps: f64) -> Result<f64> {
    let rho = family.state(theta)?;
    let at = |e: f64| -> Result<f64> {
        let up = fidelity(&rho, &family.state(theta + e)?)?;
        let down = fidelity(&rho, &family.state(theta - e)?)?;
        Ok(4.0 * (2.0 - up - down) / (e * e))
    };
    let (a, b) = (at(eps)?, at(2.0 * eps)?);
    Ok((4.0 * a - b) / 3.0)
}

// ------------------------------------------------------------- null protocols

#[derive(Clone, Debug, PartialEq)]
pub struct NullProtocolResult {
    /// Control value at which the observable vanishes.
    pub null_location: f64,
    pub estimated_parameter: f64,
    pub error_estimate: f64,
    /// Half width of the bracketing grid interval.
    pub bracket_half_width: f64,
    /// `(control, observable)` samples in grid order.
    pub sweep_trace: Vec<(f64, f64)>,
}

/// Midpoint of the first grid interval over which the observable changes
/// sign, with its half width. An exact zero on the grid is its own bracket.
pub fn locate_null(trace: &[(f64, f64)]) -> Result<(f64, f64)> {
    if let Some(&(x, _)) = trace.iter().find(|(_, y)| *y == 0.0) {
        return Ok((x, 0.0));
    }
    trace
        .windows(2)
        .find(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| (0.5 * (w[0].0 + w[1].0), 0.5 * (w[1].0 - w[0].0).abs()))
        .ok_or(Error::NullNotBracketed)
}

/// Bose occupation of a mode of frequency `omega` at temperature `t`.
fn bose(omega: f64, t: f64) -> f64 {
    1.0 / (omega / t).exp_m1()
}

/// Parameters of the two-cavity thermometer with the Josephson dressing
/// folded into a single exchange coupling `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermometerModel {
    pub omega_h: f64,
    pub omega_c: f64,
    pub kappa_h: f64,
    pub kappa_c: f64,
    pub g: f64,
}

impl ThermometerModel {
    fn check(&self) -> Result<()> {
        let all = [
            self.omega_h,
            self.omega_c,
            self.kappa_h,
            self.kappa_c,
            self.g,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidParams(
                "thermometer frequencies, rates and coupling must be positive".into(),
            ));
        }
        if self.omega_h <= self.omega_c {
            return Err(Error::InvalidParams("need Ω_h > Ω_c".into()));
        }
        Ok(())
    }

    /// Transfer coefficient `4g²κ_hκ_c / ((κ_h + κ_c)(κ_hκ_c + 4g²))`.
    fn transfer(&self) -> f64 {
        let (kh, kc, g2) = (self.kappa_h, self.kappa_c, self.g * self.g);
        4.0 * g2 * kh * kc / ((kh + kc) * (kh * kc + 4.0 * g2))
    }

    /// Steady-state charge current in units of `e`: two charges per quantum
    /// moved from the hot cavity to the cold one.
    pub fn current(&self, t_h: f64, t_c: f64) -> f64 {
        2.0 * self.transfer() * (bose(self.omega_h, t_h) - bose(self.omega_c, t_c))
    }

    /// `∂⟨I⟩/∂T_c`.
    pub fn current_slope(&self, t_c: f64) -> f64 {
        let x = self.omega_c / (2.0 * t_c);
        let dn = self.omega_c / (4.0 * t_c * t_c * x.sinh().powi(2));
        -2.0 * self.transfer() * dn
    }
}

/// Smallest per-mode cutoff keeping the thermal top-level population of
/// both modes below [`THERMOMETRY_TAIL_TOL`] for `T_h ≤ t_h_max`.
pub fn thermometry_cutoff(m: &ThermometerModel, t_c: f64, t_h_max: f64) -> usize {
    let worst = (m.omega_h / t_h_max).min(m.omega_c / t_c);
    // top population of a geometric distribution is (1 − q) q^n
    let q = (-worst).exp();
    let n = ((THERMOMETRY_TAIL_TOL / (1.0 - q)).ln() / q.ln()).ceil();
    (n as usize).max(2)
}

/// Sparse truncated operator, column-wise: `op |col⟩ = Σ val |row⟩`.
type Sparse = Vec<(usize, usize, f64)>;

/// Steady state of the two exchange-coupled cavities under local thermal
/// damping, in the frame rotating at the bare frequencies.
///
/// The generator commutes with the total excitation number, so the steady
/// state is block diagonal in it and only those entries are solved for.
/// Returns the current `2g·i⟨a_h†a_c − a_c†a_h⟩` and the largest top-level
/// population.
fn two_cavity_current(
    m: &ThermometerModel,
    t_h: f64,
    t_c: f64,
    n_max: usize,
) -> Result<(f64, f64)> {
    let d = n_max + 1;
    let dim = d * d;
    let idx = |nh: usize, nc: usize| nh * d + nc;
    let total = |s: usize| s / d + s % d;

    let (n_h, n_c) = (bose(m.omega_h, t_h), bose(m.omega_c, t_c));
    let mut lower_h: Sparse = Vec::new();
    let mut lower_c: Sparse = Vec::new();
    let mut hop: Sparse = Vec::new(); // a_h† a_c
    for nh in 0..d {
        for nc in 0..d {
            let s = idx(nh, nc);
            if nh > 0 {
                lower_h.push((idx(nh - 1, nc), s, (nh as f64).sqrt()));
            }
            if nc > 0 {
                lower_c.push((idx(nh, nc - 1), s, (nc as f64).sqrt()));
                if nh + 1 < d {
                    hop.push((idx(nh + 1, nc - 1), s, ((nh + 1) as f64 * nc as f64).sqrt()));
                }
            }
        }
    }
    let adjoint = |a: &Sparse| -> Sparse { a.iter().map(|&(r, col, v)| (col, r, v)).collect() };
    let jumps: Vec<(Sparse, f64)> = vec![
        (lower_h.clone(), m.kappa_h * (n_h + 1.0)),
        (adjoint(&lower_h), m.kappa_h * n_h),
        (lower_c.clone(), m.kappa_c * (n_c + 1.0)),
        (adjoint(&lower_c), m.kappa_c * n_c),
    ];
    let mut ham: Sparse = hop.iter().map(|&(r, col, v)| (r, col, m.g * v)).collect();
    ham.extend(adjoint(&hop).iter().map(|&(r, col, v)| (r, col, m.g * v)));

    // column lookup for the sparse operators
    let by_col = |a: &Sparse| -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); dim];
        for &(r, col, v) in a {
            cols[col].push((r, v));
        }
        cols
    };
    let by_row = |a: &Sparse| -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); dim];
        for &(r, col, v) in a {
            rows[r].push((col, v));
        }
        rows
    };
    let h_cols = by_col(&ham);
    let h_rows = by_row(&ham);
    let jump_data: Vec<(Vec<Vec<(usize, f64)>>, Vec<f64>, f64)> = jumps
        .iter()
        .map(|(a, rate)| {
            let mut ada = vec![0.0; dim];
            for &(_, col, v) in a {
                ada[col] += v * v;
            }
            (by_col(a), ada, *rate)
        })
        .collect();

    // unknowns: ρ[s, t] with equal excitation number
    let mut var = vec![usize::MAX; dim * dim];
    let mut pairs = Vec::new();
    for s in 0..dim {
        for t in 0..dim {
            if total(s) == total(t) {
                var[s * dim + t] = pairs.len();
                pairs.push((s, t));
            }
        }
    }
    let nv = pairs.len();
    let mut l = CMat::zeros(nv, nv);
    for (k, &(s, t)) in pairs.iter().enumerate() {
        // image of |s⟩⟨t| under the generator, scattered into column k
        let mut add = |r: usize, q: usize, z: num_complex::Complex64| {
            let v = var[r * dim + q];
            debug_assert!(v != usize::MAX, "generator left the excitation blocks");
            l[(v, k)] += z;
        };
        for &(r, h) in &h_cols[s] {
            add(r, t, -I * h);
        }
        for &(q, h) in &h_rows[t] {
            // ρH: |s⟩⟨t|H = Σ_q H_tq |s⟩⟨q|
            add(s, q, I * h);
        }
        for (cols, ada, rate) in &jump_data {
            for &(r, a1) in &cols[s] {
                for &(q, a2) in &cols[t] {
                    add(r, q, c(rate * a1 * a2, 0.0));
                }
            }
            add(s, t, c(-0.5 * rate * (ada[s] + ada[t]), 0.0));
        }
    }
    // replace the first equation by the trace condition
    let mut rhs = nalgebra::DVector::<num_complex::Complex64>::zeros(nv);
    for col in 0..nv {
        l[(0, col)] = if pairs[col].0 == pairs[col].1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        };
    }
    rhs[0] = c(1.0, 0.0);
    let x = l
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalInstability("two-cavity steady state is singular".into()))?;

    let rho_at = |s: usize, t: usize| {
        let v = var[s * dim + t];
        if v == usize::MAX {
            c(0.0, 0.0)
        } else {
            x[v]
        }
    };
    // ⟨a_h† a_c⟩ = Σ ⟨t|a_h†a_c|s⟩ ρ_st
    let mut hop_expect = c(0.0, 0.0);
    for &(r, col, v) in &hop {
        hop_expect += rho_at(col, r) * v;
    }
    let current = 2.0 * m.g * (I * (hop_expect - hop_expect.conj())).re;
    let mut tail = 0.0f64;
    for other in 0..d {
        tail = tail.max(rho_at(idx(n_max, other), idx(n_max, other)).re);
        tail = tail.max(rho_at(idx(other, n_max), idx(other, n_max)).re);
    }
    Ok((current, tail))
}

/// Sweeps `T_h`, simulates the steady-state current and locates where it
/// vanishes. The unknown is recovered as `T_c = T_h* Ω_c/Ω_h`; the error
/// estimate is the bracket half width mapped the same way.
pub fn thermometry_simulate(
    m: &ThermometerModel,
    t_c_true: f64,
    t_h_grid: &[f64],
    n_max: usize,
) -> Result<NullProtocolResult> {
    m.check()?;
    if !(t_c_true > 0.0 && t_c_true.is_finite())
        || t_h_grid.iter().any(|t| !(*t > 0.0 && t.is_finite()))
    {
        return Err(Error::InvalidParams("temperatures must be positive".into()));
    }
    let t_max = t_h_grid.iter().copied().fold(0.0, f64::max);
    let top = |omega: f64, t: f64| {
        let q = (-omega / t).exp();
        (1.0 - q) * q.powi(n_max as i32)
    };
    let tail = top(m.omega_h, t_max).max(top(m.omega_c, t_c_true));
    if tail > THERMOMETRY_TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            cutoff: n_max,
            tail,
        });
    }
    let mut trace = Vec::with_capacity(t_h_grid.len());
    for &t_h in t_h_grid {
        let (current, _) = two_cavity_current(m, t_h, t_c_true, n_max)?;
        trace.push((t_h, current));
    }
    let (t_star, half) = locate_null(&trace)?;
    let ratio = m.omega_c / m.omega_h;
    Ok(NullProtocolResult {
        null_location: t_star,
        estimated_parameter: t_star * ratio,
        error_estimate: half * ratio,
        bracket_half_width: half,
        sweep_trace: trace,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermometryError {
    pub delta_t_c: f64,
    /// Prefactor of the Cramér-Rao bound.
    pub c1: f64,
    /// Prefactor of the protocol error.
    pub c2: f64,
    /// `ΔT_c Ω_c / (T_c² sinh(Ω_c/2T_c))`: the constant of the
    /// low-temperature error law, as fitted from this evaluation.
    pub alpha: f64,
}

impl ThermometryError {
    pub fn c1_over_c2(&self) -> f64 {
        self.c1 / self.c2
    }
}

/// Coupling prefactors of the Cramér-Rao bound (`C₁`) and of the protocol
/// error (`C₂`); both are scale free in `(κ_h, κ_c, g)`.
pub fn thermometry_prefactors(kappa_h: f64, kappa_c: f64, g: f64) -> (f64, f64) {
    let (kh, kc, g2) = (kappa_h, kappa_c, g * g);
    let common = (kh + kc) * (kh * kc + 4.0 * g2);
    let root = (8.0 * g2 * kc * kh
        + kh * kh * (kc * kc + 16.0 * g2)
        + 2.0 * kc * kh.powi(3)
        + 32.0 * g2 * g2
        + kh.powi(4))
    .sqrt();
    let c1 = 2.0 * common / (kc * root);
    let c2 = common / (std::f64::consts::SQRT_2 * kh * kc * g);
    (c1, c2)
}

/// Error propagation for the thermometer: current noise `delta_i` through
/// `∂⟨I⟩/∂T_c` plus the `T_h` uncertainty scaled by `Ω_c/Ω_h`.
pub fn thermometry_error(
    m: &ThermometerModel,
    t_c: f64,
    delta_i: f64,
    delta_t_h: f64,
) -> Result<ThermometryError> {
    m.check()?;
    if !(t_c > 0.0) || !(delta_i >= 0.0) || !(delta_t_h >= 0.0) {
        return Err(Error::InvalidParams(
            "need T_c > 0 and non-negative uncertainties".into(),
        ));
    }
    let slope = m.current_slope(t_c);
    let ratio = m.omega_c / m.omega_h;
    let delta_t_c = ((delta_i / slope).powi(2) + (ratio * delta_t_h).powi(2)).sqrt();
    let (c1, c2) = thermometry_prefactors(m.kappa_h, m.kappa_c, m.g);
    let alpha = delta_t_c * m.omega_c / (t_c * t_c * (m.omega_c / (2.0 * t_c)).sinh());
    Ok(ThermometryError {
        delta_t_c,
        c1,
        c2,
        alpha,
    })
}

/// Smallest `C₂/C₁` over `κ_c/κ_h` and `g/κ_h` in `[1/span, span]`, with
/// the minimizing ratios.
pub fn thermometry_optimal_ratio(span: f64) -> (f64, f64, f64) {
    let lo = -span.ln();
    let hi = span.ln();
    let ratio = |a: f64, b: f64| {
        let (c1, c2) = thermometry_prefactors(1.0, a.exp(), b.exp());
        c2 / c1
    };
    // coarse scan, then shrink a box around the best point
    let n = 80;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let a = lo + (hi - lo) * i as f64 / n as f64;
            let b = lo + (hi - lo) * j as f64 / n as f64;
            let r = ratio(a, b);
            if r < best.0 {
                best = (r, a, b);
            }
        }
    }
    let mut width = (hi - lo) / n as f64;
    while width > 1e-10 {
        let (_, a0, b0) = best;
        for i in -4..=4 {
            for j in -4..=4 {
                let a = (a0 + width * i as f64 / 4.0).clamp(lo, hi);
                let b = (b0 + width * j as f64 / 4.0).clamp(lo, hi);
                let r = ratio(a, b);
                if r < best.0 {
                    best = (r, a, b);
                }
            }
        }
        width *= 0.5;
    }
    (best.0, best.1.exp(), best.2.exp())
}

/// Phase-slip dressing `2λe^{−2λ²} L⁽¹⁾_n(4λ²)/(n + 1)` of a Josephson
/// junction on Fock levels `0..=n_max`, as a diagonal operator.
pub fn josephson_dressing(lambda: f64, n_max: usize) -> CMat {
    let x = 4.0 * lambda * lambda;
    let pre = 2.0 * lambda * (-2.0 * lambda * lambda).exp();
    let mut out = CMat::zeros(n_max + 1, n_max + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..=n_max {
        out[(n, n)] = c(pre * cur / (n + 1) as f64, 0.0);
        // L⁽¹⁾_{n+1} = ((2n + 2 − x) L⁽¹⁾_n − (n + 1) L⁽¹⁾_{n−1}) / (n + 1)
        let next = ((2.0 * n as f64 + 2.0 - x) * cur - (n as f64 + 1.0) * prev) / (n as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    out
}

/// Sweeps the known field `ω_k` of a two-stroke machine whose second qubit
/// sits in the unknown field, and reads `ω_un = ω_k* T_c/T_h` off the work
/// null. The error is the direct `ω_k` error scaled by `T_c/T_h`.
pub fn magnetometry_null(
    omega_un_true: f64,
    t_h: f64,
    t_c: f64,
    theta: f64,
    omega_k_grid: &[f64],
    omega_k_error: f64,
) -> Result<NullProtocolResult> {
    if !(omega_k_error >= 0.0) {
        return Err(Error::InvalidParams(
            "direct measurement error must be non-negative".into(),
        ));
    }
    let mut trace = Vec::with_capacity(omega_k_grid.len());
    for &w_k in omega_k_grid {
        let cycle = two_stroke(w_k, omega_un_true, t_h, t_c, theta)?;
        trace.push((w_k, cycle.net_work_output));
    }
    if trace.iter().all(|&(_, w)| w == 0.0) {
        return Err(Error::NullNotBracketed);
    }
    let (w_star, half) = locate_null(&trace)?;
    let ratio = t_c / t_h;
    Ok(NullProtocolResult {
        null_location: w_star,
        estimated_parameter: w_star * ratio,
        error_estimate: omega_k_error * ratio,
        bracket_half_width: half,
        sweep_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{pauli_x, pauli_y, pauli_z};
    use crate::qcore::{matrix_exp, max_abs};

    fn qubit_thermal(omega: f64) -> ParamFamily {
        ParamFamily::new(move |t| {
            let p = 1.0 / (1.0 + (omega / t).exp());
            DensityMatrix::from_populations(&[p, 1.0 - p])
        })
    }

    #[test]
    fn constant_family_has_zero_sld() {
        let rho = DensityMatrix::from_populations(&[0.3, 0.7]).unwrap();
        let fam = ParamFamily::new(move |_| Ok(rho.clone()));
        assert!(max_abs(sld(&fam, 0.4).unwrap().matrix()) < 1e-12);
        assert_eq!(qfi(&fam, 0.4).unwrap().qfi, 0.0);
    }

    #[test]
    fn thermal_qubit_matches_diagonal_closed_form() {
        let fam = qubit_thermal(1.0);
        let t = 1.0;
        let p = 1.0 / (1.0 + 1f64.exp());
        let dp = (1f64).exp() / (t * t * (1.0 + 1f64.exp()).powi(2));
        let want = dp * dp * (1.0 / p + 1.0 / (1.0 - p));
        let r = qfi(&fam, t).unwrap();
        assert!((r.qfi - want).abs() < 1e-8 * want, "{} vs {want}", r.qfi);
        let l = r.sld.matrix();
        assert!((l[(0, 0)].re - dp / p).abs() < 1e-8);
        assert!((l[(1, 1)].re + dp / (1.0 - p)).abs() < 1e-8);
    }

    #[test]
    fn pure_state_family_matches_overlap_formula() {
        // |ψ_θ⟩ = exp(−iθG)|ψ₀⟩ has QFI 4 Var(G)
        let g = pauli_x() * c(0.7, 0.0) + pauli_z() * c(0.2, 0.0);
        let psi0 = nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let gen = g.clone();
        let fam = ParamFamily::new(move |th| {
            DensityMatrix::pure(&(matrix_exp(&gen, c(0.0, -th)) * &psi0))
        });
        let rho = fam.state(0.3).unwrap();
        let var = expect(rho.matrix(), &(&g * &g)) - expect(rho.matrix(), &g).powi(2);
        let h = qfi(&fam, 0.3).unwrap().qfi;
        assert!((h - 4.0 * var).abs() < 1e-8, "{h} vs {}", 4.0 * var);
    }

    #[test]
    fn sld_optimal_measurement_and_trivial_povm() {
        let fam = ParamFamily::new(|th: f64| {
            let u = matrix_exp(&pauli_y(), c(0.0, -th));
            let rho = DensityMatrix::from_populations(&[0.8, 0.2])?;
            Ok(rho.conjugate(&u))
        });
        let r = qfi(&fam, 0.5).unwrap();
        let povm = eigenprojectors(&r.sld);
        let f = cfi(&fam, 0.5, &povm).unwrap();
        assert!((f - r.qfi).abs() < 1e-7, "{f} vs {}", r.qfi);
        assert!(cfi(&fam, 0.5, &[CMat::identity(2, 2)]).unwrap() < 1e-15);
        let bad = [CMat::identity(2, 2) * c(0.5, 0.0)];
        assert!(matches!(cfi(&fam, 0.5, &bad), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn rotated_thermal_family_matches_fidelity_susceptibility() {
        let fam = ParamFamily::new(|th: f64| {
            let u = matrix_exp(&(pauli_x() + pauli_z() * c(0.3, 0.0)), c(0.0, -th));
            let p = 0.6 + 0.1 * th.sin();
            Ok(DensityMatrix::from_populations(&[p, 1.0 - p])?.conjugate(&u))
        });
        let h = qfi(&fam, 0.4).unwrap().qfi;
        let chi = fidelity_susceptibility(&fam, 0.4, 1e-3).unwrap();
        assert!((h - chi).abs() < 1e-6 * h, "{h} vs {chi}");
    }

    #[test]
    fn kernel_population_is_singular() {
        // the population leaks into the kernel only on one side, so the
        // centered difference sees a first-order kernel derivative
        let fam = ParamFamily::new(|th: f64| {
            DensityMatrix::from_populations(&[1.0 - th.max(0.0), th.max(0.0)])
        });
        assert!(matches!(qfi(&fam, 0.0), Err(Error::SingularState)));
    }

    #[test]
    fn null_locator_brackets() {
        let trace = [(0.0, -1.0), (1.0, -0.5), (2.0, 0.5)];
        assert_eq!(locate_null(&trace).unwrap(), (1.5, 0.5));
        assert!(matches!(
            locate_null(&[(0.0, 1.0), (1.0, 2.0)]),
            Err(Error::NullNotBracketed)
        ));
        assert_eq!(locate_null(&[(0.0, 1.0), (1.0, 0.0)]).unwrap(), (1.0, 0.0));
    }

    fn reference_thermometer() -> ThermometerModel {
        // 2π × 1 GHz in mK
        let unit = 47.992_430_7;
        ThermometerModel {
            omega_h: 8.5 * unit,
            omega_c: unit,
            kappa_h: 0.06 * unit,
            kappa_c: 0.06 * unit,
            g: 0.02 * unit,
        }
    }

    #[test]
    fn simulated_current_matches_closed_form() {
        let m = reference_thermometer();
        for t_h in [90.0, 127.5, 150.0] {
            let (num, tail) = two_cavity_current(&m, t_h, 15.0, 9).unwrap();
            let want = m.current(t_h, 15.0);
            assert!(
                (num - want).abs() < 1e-9 * want.abs().max(1e-6),
                "{num} vs {want}"
            );
            assert!(tail < 1e-6);
        }
    }

    #[test]
    fn thermometer_null_recovers_cold_temperature() {
        let m = reference_thermometer();
        let grid: Vec<f64> = (0..=16).map(|k| 110.0 + 2.5 * k as f64).collect();
        let n = thermometry_cutoff(&m, 15.0, 150.0);
        let r = thermometry_simulate(&m, 15.0, &grid, n).unwrap();
        assert!((r.null_location - 127.5).abs() <= r.bracket_half_width + 1e-9);
        assert!((r.estimated_parameter - 15.0).abs() <= r.error_estimate + 1e-9);
        let cold: Vec<f64> = (0..5).map(|k| 100.0 + k as f64).collect();
        assert!(matches!(
            thermometry_simulate(&m, 15.0, &cold, n),
            Err(Error::NullNotBracketed)
        ));
        assert!(matches!(
            thermometry_simulate(&m, 15.0, &grid, 2),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn thermometer_bracket_halves_under_refinement() {
        let m = reference_thermometer();
        let n = thermometry_cutoff(&m, 15.0, 140.0);
        let mut widths = Vec::new();
        for level in 0..3 {
            let k = 4 << level;
            let grid: Vec<f64> = (0..=k)
                .map(|i| 120.0 + 20.0 * i as f64 / k as f64)
                .collect();
            let r = thermometry_simulate(&m, 15.0, &grid, n).unwrap();
            assert!((r.estimated_parameter - 15.0).abs() <= r.error_estimate + 1e-12);
            widths.push(r.error_estimate);
        }
        assert!(
            (widths[0] / widths[1] - 2.0).abs() < 1e-12
                && (widths[1] / widths[2] - 2.0).abs() < 1e-12
        );
    }

    #[test]
    fn thermometry_error_properties() {
        let mut m = reference_thermometer();
        let base = thermometry_error(&m, 15.0, 0.0, 10.0).unwrap();
        assert!((base.delta_t_c - 10.0 * m.omega_c / m.omega_h).abs() < 1e-12);
        m.omega_h *= 10.0;
        let far = thermometry_error(&m, 15.0, 0.0, 10.0).unwrap();
        assert!((far.delta_t_c * 10.0 - base.delta_t_c).abs() < 1e-12);
        assert!(base.c2 >= base.c1);
        // current noise alone follows ΔI/|∂⟨I⟩/∂T_c|
        let noise = thermometry_error(&m, 15.0, 1e-3, 0.0).unwrap();
        let h = 1e-4;
        let slope = (m.current(127.5, 15.0 + h) - m.current(127.5, 15.0 - h)) / (2.0 * h);
        assert!((noise.delta_t_c - 1e-3 / slope.abs()).abs() < 1e-6 * noise.delta_t_c);
        let (c1, c2) = thermometry_prefactors(1.0, 1.0, 1e-4);
        assert!(c2 / c1 > 1e3);
    }

    #[test]
    fn optimal_prefactor_ratio_approaches_its_infimum() {
        // the infimum sits at κ_c/κ_h → 0 and 4g⁴ = κ_h⁴/8 with value √(2 + √2)
        let (r, kc, _) = thermometry_optimal_ratio(1e4);
        assert!(r >= (2.0 + 2f64.sqrt()).sqrt() - 1e-9);
        assert!((r - (2.0 + 2f64.sqrt()).sqrt()).abs() < 1e-3);
        assert!(kc < 1e-3);
    }

    #[test]
    fn laguerre_dressing_matches_explicit_sum() {
        let lam: f64 = 0.3;
        let a = josephson_dressing(lam, 6);
        let x = 4.0 * lam * lam;
        let binom =
            |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        for n in 0..=6 {
            let mut l = 0.0;
            let mut fact = 1.0;
            for i in 0..=n {
                if i > 0 {
                    fact *= i as f64;
                }
                l += (-1f64).powi(i as i32) * binom(n + 1, n - i) * x.powi(i as i32) / fact;
            }
            let want = 2.0 * lam * (-2.0 * lam * lam).exp() * l / (n + 1) as f64;
            assert!((a[(n, n)].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn magnetometer_null() {
        let grid: Vec<f64> = (0..=20).map(|k| 4.0 + 0.1 * k as f64).collect();
        let r = magnetometry_null(2.5, 2.0, 1.0, std::f64::consts::FRAC_PI_2, &grid, 0.01).unwrap();
        assert!((r.null_location - 5.0).abs() < 1e-12);
        assert!((r.estimated_parameter - 2.5).abs() < 1e-12);
        let r = magnetometry_null(
            0.5,
            10.0,
            1.0,
            1.0,
            &(45..=55)
                .map(|k| k as f64 / 10.0 + 0.001)
                .collect::<Vec<_>>(),
            0.01,
        )
        .unwrap();
        assert!((r.error_estimate - 0.001).abs() < 1e-15);
        assert!(matches!(
            magnetometry_null(2.5, 2.0, 1.0, 0.0, &grid, 0.01),
            Err(Error::NullNotBracketed)
        ));
    }
}
