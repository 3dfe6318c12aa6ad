//! Static-Hamiltonian GKSL generators with KMS baths.
//!
//! Couplings are split into Bohr-frequency components `S(ω)` with
//! `[H, S(ω)] = −ω S(ω)`, so `ω > 0` hands energy to the bath. Each bath
//! contributes `γ(ω) (S ρ S† − ½{S†S, ρ})` per component, with
//! `γ(−ω) = e^{−ω/T} γ(ω)`. The Lamb shift is not included.

use crate::error::{Error, Result};
use crate::numeric;
use crate::qcore::{
    c, devectorize, expect, hermitian_eig, identity, kron, matrix_exp, op_norm, sandwich_super,
    vectorize, CMat, DensityMatrix, Hermitian, I,
};

/// Positive-frequency spectral family. The negative branch is always the KMS
/// completion applied by [`BathSpec::rate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralFamily {
    /// `γ(ω) = γ₀`.
    Flat,
    /// `γ(ω) = γ₀ (ω/ω_c) e^{−ω/ω_c}`.
    OhmicExpCutoff,
    /// `γ(ω) = γ₀` inside the open window, zero outside.
    WindowedFlat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    pub family: SpectralFamily,
    pub base_rate: f64,
    pub cutoff: f64,
    pub window: Option<(f64, f64)>,
}

impl SpectralFunction {
    pub fn flat(rate: f64) -> Self {
        Self {
            family: SpectralFamily::Flat,
            base_rate: rate,
            cutoff: 1.0,
            window: None,
        }
    }

    pub fn ohmic(rate: f64, cutoff: f64) -> Self {
        Self {
            family: SpectralFamily::OhmicExpCutoff,
            base_rate: rate,
            cutoff,
            window: None,
        }
    }

    /// Flat inside the open interval `(lo, hi)`.
    pub fn windowed(rate: f64, lo: f64, hi: f64) -> Self {
        Self {
            family: SpectralFamily::WindowedFlat,
            base_rate: rate,
            cutoff: 1.0,
            window: Some((lo, hi)),
        }
    }

    /// Rate at `ω ≥ 0`.
    pub fn positive(&self, w: f64) -> f64 {
        debug_assert!(w >= 0.0);
        match self.family {
            SpectralFamily::Flat => self.base_rate,
            SpectralFamily::OhmicExpCutoff => {
                self.base_rate * (w / self.cutoff) * (-w / self.cutoff).exp()
            }
            SpectralFamily::WindowedFlat => match self.window {
                Some((lo, hi)) if w > lo && w < hi => self.base_rate,
                _ => 0.0,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.base_rate >= 0.0) || !(self.cutoff > 0.0) {
            return Err(Error::InvalidParams(
                "spectral rate must be ≥ 0 and cutoff > 0".into(),
            ));
        }
        if let Some((lo, hi)) = self.window {
            if !(lo < hi) {
                return Err(Error::InvalidParams(format!(
                    "empty spectral window ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct BathSpec {
    pub label: String,
    pub temperature: f64,
    pub spectral: SpectralFunction,
    pub coupling: Hermitian,
}

impl BathSpec {
    pub fn new(
        label: impl Into<String>,
        temperature: f64,
        spectral: SpectralFunction,
        coupling: Hermitian,
    ) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "bath temperature {temperature} must be > 0"
            )));
        }
        spectral.validate()?;
        Ok(Self {
            label: label.into(),
            temperature,
            spectral,
            coupling,
        })
    }

    /// KMS-completed rate `γ(ω)`.
    pub fn rate(&self, w: f64) -> f64 {
        if w >= 0.0 {
            self.spectral.positive(w)
        } else {
            (w / self.temperature).exp() * self.spectral.positive(-w)
        }
    }
}

/// One Bohr-frequency component of a coupling operator.
#[derive(Clone, Debug)]
pub struct BohrComponent {
    pub omega: f64,
    pub op: CMat,
}

#[derive(Clone, Debug)]
pub struct JumpTerm {
    pub omega: f64,
    pub op: CMat,
    pub rate: f64,
}

/// Default gap-merging tolerance: `1e-9 ×` spectral radius.
pub fn default_degeneracy_tol(h: &Hermitian) -> f64 {
    let e = hermitian_eig(h).values;
    let r = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-9 * r
}

/// `S = Σ_ω S(ω)` with `S(ω) = Σ_{ε'−ε=ω} P_ε S P_ε'`.
pub fn decompose_coupling(
    s: &Hermitian,
    h: &Hermitian,
    degeneracy_tol: f64,
) -> Result<Vec<BohrComponent>> {
    if s.dim() != h.dim() {
        return Err(Error::DimMismatch {
            expected: h.dim(),
            got: s.dim(),
        });
    }
    let eig = hermitian_eig(h);
    let d = h.dim();
    // cluster degenerate levels
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for k in 0..d {
        match clusters.last_mut() {
            Some((e, idx)) if (eig.values[k] - *e).abs() <= degeneracy_tol => idx.push(k),
            _ => clusters.push((eig.values[k], vec![k])),
        }
    }
    for cl in clusters.iter_mut() {
        cl.0 = cl.1.iter().map(|&k| eig.values[k]).sum::<f64>() / cl.1.len() as f64;
    }
    let proj: Vec<CMat> = clusters
        .iter()
        .map(|(_, idx)| {
            let mut p = CMat::zeros(d, d);
            for &k in idx {
                let v = eig.vectors.column(k);
                p += &v * v.adjoint();
            }
            p
        })
        .collect();

    let scale = s.matrix().iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut pieces: Vec<(f64, CMat)> = Vec::new();
    for (a, pa) in proj.iter().enumerate() {
        for (b, pb) in proj.iter().enumerate() {
            let part = pa * s.matrix() * pb;
            if part.iter().all(|z| z.norm() <= 1e-14 * scale) {
                continue;
            }
            pieces.push((clusters[b].0 - clusters[a].0, part));
        }
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(Vec<f64>, CMat)> = Vec::new();
    for (w, op) in pieces {
        match out.last_mut() {
            Some((ws, acc)) if (w - ws[ws.len() - 1]).abs() <= degeneracy_tol => {
                ws.push(w);
                *acc += op;
            }
            _ => out.push((vec![w], op)),
        }
    }
    Ok(out
        .into_iter()
        .map(|(ws, op)| {
            let w = ws.iter().sum::<f64>() / ws.len() as f64;
            BohrComponent {
                omega: if w.abs() <= degeneracy_tol { 0.0 } else { w },
                op,
            }
        })
        .collect())
}

/// Jump terms of one bath, at operator level.
#[derive(Clone, Debug)]
pub struct BathTerms {
    pub label: String,
    pub temperature: f64,
    pub jumps: Vec<JumpTerm>,
}

/// Operator-level description of `ℒ`; cheap to build for any dimension.
#[derive(Clone, Debug)]
pub struct GeneratorTerms {
    pub hamiltonian: Hermitian,
    pub baths: Vec<BathTerms>,
}

impl GeneratorTerms {
    pub fn new(h: &Hermitian, baths: &[BathSpec]) -> Result<Self> {
        let tol = default_degeneracy_tol(h);
        let mut out = Vec::with_capacity(baths.len());
        for b in baths {
            if b.coupling.dim() != h.dim() {
                return Err(Error::DimMismatch {
                    expected: h.dim(),
                    got: b.coupling.dim(),
                });
            }
            let jumps = decompose_coupling(&b.coupling, h, tol)?
                .into_iter()
                .map(|bc| JumpTerm {
                    rate: b.rate(bc.omega),
                    omega: bc.omega,
                    op: bc.op,
                })
                .filter(|j| j.rate > 0.0)
                .collect();
            out.push(BathTerms {
                label: b.label.clone(),
                temperature: b.temperature,
                jumps,
            });
        }
        Ok(Self {
            hamiltonian: h.clone(),
            baths: out,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `Σ γ (S ρ S† − ½{S†S, ρ})` for one bath.
    pub fn apply_bath(&self, bath: usize, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(rho.nrows(), rho.ncols());
        for j in &self.baths[bath].jumps {
            out += dissipate(&j.op, j.rate, rho);
        }
        out
    }

    /// `ℒρ`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let h = self.hamiltonian.matrix();
        let mut out = (h * rho - rho * h) * (-I);
        for b in 0..self.baths.len() {
            out += self.apply_bath(b, rho);
        }
        out
    }
}

pub(crate) fn dissipate(s: &CMat, rate: f64, rho: &CMat) -> CMat {
    let sd = s.adjoint();
    let sds = &sd * s;
    (s * rho * &sd - (&sds * rho + rho * &sds) * c(0.5, 0.0)) * c(rate, 0.0)
}

/// Superoperator of `ρ ↦ γ D[S]ρ`.
pub fn dissipator_super(s: &CMat, rate: f64) -> CMat {
    let d = s.nrows();
    let id = identity(d);
    let sds = s.adjoint() * s;
    let sup = sandwich_super(s, &s.adjoint())
        - (kron(&id, &sds) + kron(&sds.transpose(), &id)) * c(0.5, 0.0);
    sup * c(rate, 0.0)
}

/// Superoperator of `ρ ↦ −i[H, ρ]`.
pub fn hamiltonian_super(h: &CMat) -> CMat {
    let id = identity(h.nrows());
    (kron(&id, h) - kron(&h.transpose(), &id)) * (-I)
}

/// Dense `d² × d²` generator.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    pub terms: GeneratorTerms,
    pub hamiltonian_part: CMat,
    pub dissipator_parts: Vec<(String, CMat)>,
    pub total: CMat,
}

/// Largest working dimension for dense superoperators (`d² ≤ 4096`).
pub const DENSE_DIM_LIMIT: usize = 64;

pub fn build_generator(h: &Hermitian, baths: &[BathSpec]) -> Result<LindbladGenerator> {
    let terms = GeneratorTerms::new(h, baths)?;
    LindbladGenerator::from_terms(terms)
}

impl LindbladGenerator {
    pub fn from_terms(terms: GeneratorTerms) -> Result<Self> {
        let d = terms.dim();
        if d > DENSE_DIM_LIMIT {
            return Err(Error::TooLarge {
                dim: d,
                limit: DENSE_DIM_LIMIT,
            });
        }
        let hamiltonian_part = hamiltonian_super(terms.hamiltonian.matrix());
        let mut total = hamiltonian_part.clone();
        let mut dissipator_parts = Vec::with_capacity(terms.baths.len());
        for b in &terms.baths {
            let mut sup = CMat::zeros(d * d, d * d);
            for j in &b.jumps {
                sup += dissipator_super(&j.op, j.rate);
            }
            total += &sup;
            dissipator_parts.push((b.label.clone(), sup));
        }
        Ok(Self {
            terms,
            hamiltonian_part,
            dissipator_parts,
            total,
        })
    }

    pub fn dim(&self) -> usize {
        self.terms.dim()
    }

    pub fn dissipator(&self, label: &str) -> Option<&CMat> {
        self.dissipator_parts
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| m)
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        devectorize(&(&self.total * vectorize(rho)), self.dim())
    }
}

/// Tolerance on the smallest eigenvalue of evolved states.
pub const POSITIVITY_TOL: f64 = 1e-9;

fn checked_state(m: CMat) -> Result<DensityMatrix> {
    let rho = DensityMatrix::new_unchecked(m);
    let min = rho.min_eigenvalue();
    if min < -POSITIVITY_TOL {
        return Err(Error::NumericalInstability(format!(
            "evolved state has eigenvalue {min:e}"
        )));
    }
    Ok(rho)
}

/// `ρ(t) = e^{ℒt} ρ₀` through the superoperator exponential.
pub fn evolve(gen: &LindbladGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimMismatch {
            expected: gen.dim(),
            got: rho0.dim(),
        });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let prop = matrix_exp(&gen.total, c(t, 0.0));
    checked_state(devectorize(&(prop * vectorize(rho0.matrix())), gen.dim()))
}

/// Adaptive Runge–Kutta evolution at operator level, for dimensions where the
/// dense superoperator is too large.
pub fn evolve_rk(
    terms: &GeneratorTerms,
    rho0: &DensityMatrix,
    t: f64,
    tol: f64,
) -> Result<DensityMatrix> {
    if rho0.dim() != terms.dim() {
        return Err(Error::DimMismatch {
            expected: terms.dim(),
            got: rho0.dim(),
        });
    }
    let out = numeric::rk45(|_, r| terms.apply(r), rho0.matrix(), 0.0, t, tol);
    checked_state(out)
}

/// Quasi-static evolution under a slowly varying Hamiltonian: the generator is
/// rebuilt at the midpoint of each slice. Adiabaticity is the caller's call.
pub fn evolve_quasistatic(
    h_of_t: impl Fn(f64) -> Hermitian,
    baths: impl Fn(f64) -> Vec<BathSpec>,
    rho0: &DensityMatrix,
    t0: f64,
    t1: f64,
    slices: usize,
) -> Result<DensityMatrix> {
    let dt = (t1 - t0) / slices as f64;
    let mut rho = rho0.clone();
    for k in 0..slices {
        let tm = t0 + (k as f64 + 0.5) * dt;
        let gen = build_generator(&h_of_t(tm), &baths(tm))?;
        rho = evolve(&gen, &rho, dt)?;
    }
    Ok(rho)
}

/// Exact evolution of a secular generator, block by block.
///
/// A secular generator conserves the Bohr frequency `ε_a − ε_b` of each
/// energy-basis element `ρ_ab`, so `ℒ` splits into one block per Bohr
/// frequency. Blocks are exponentiated separately, which keeps the cost far
/// below the dense `d² × d²` route for large `d`.
pub fn evolve_secular(
    h: &Hermitian,
    baths: &[BathSpec],
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let d = h.dim();
    if rho0.dim() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: rho0.dim(),
        });
    }
    let eig = hermitian_eig(h);
    let e = &eig.values;
    let v = &eig.vectors;
    let tol = default_degeneracy_tol(h);

    // jump components in the energy basis, keyed by ω = ε_col − ε_row
    struct Component {
        rate: f64,
        by_col: Vec<Vec<(usize, crate::qcore::C64)>>,
    }
    let mut comps: Vec<Component> = Vec::new();
    for b in baths {
        if b.coupling.dim() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: b.coupling.dim(),
            });
        }
        let s = v.adjoint() * b.coupling.matrix() * v;
        let scale = s.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let mut entries: Vec<(f64, usize, usize, crate::qcore::C64)> = Vec::new();
        for col in 0..d {
            for row in 0..d {
                if s[(row, col)].norm() > 1e-14 * scale {
                    entries.push((e[col] - e[row], row, col, s[(row, col)]));
                }
            }
        }
        entries.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut start = 0;
        while start < entries.len() {
            let mut end = start + 1;
            while end < entries.len() && entries[end].0 - entries[end - 1].0 <= tol {
                end += 1;
            }
            let w = entries[start..end].iter().map(|x| x.0).sum::<f64>() / (end - start) as f64;
            let w = if w.abs() <= tol { 0.0 } else { w };
            let rate = b.rate(w);
            if rate > 0.0 {
                let mut by_col = vec![Vec::new(); d];
                for &(_, row, col, val) in &entries[start..end] {
                    by_col[col].push((row, val));
                }
                comps.push(Component { rate, by_col });
            }
            start = end;
        }
    }

    // K = Σ γ S†S, nonzero only inside degenerate levels
    let mut k = CMat::zeros(d, d);
    for cp in &comps {
        let mut rows: Vec<Vec<(usize, crate::qcore::C64)>> = vec![Vec::new(); d];
        for (col, list) in cp.by_col.iter().enumerate() {
            for &(row, val) in list {
                rows[row].push((col, val));
            }
        }
        for list in &rows {
            for &(x, sx) in list {
                for &(y, sy) in list {
                    k[(x, y)] += sx.conj() * sy * cp.rate;
                }
            }
        }
    }

    // group index pairs by Bohr frequency
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            pairs.push((e[a] - e[b], a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut group_of = vec![(0usize, 0usize); d * d];
    let mut groups: Vec<Vec<(usize, usize)>> = Vec::new();
    for (i, &(nu, a, b)) in pairs.iter().enumerate() {
        if i == 0 || nu - pairs[i - 1].0 > tol {
            groups.push(Vec::new());
        }
        let g = groups.len() - 1;
        group_of[a * d + b] = (g, groups[g].len());
        groups[g].push((a, b));
    }

    let rho_e = v.adjoint() * rho0.matrix() * v;
    let mut out_e = CMat::zeros(d, d);
    for (g, members) in groups.iter().enumerate() {
        let m = members.len();
        let mut block = CMat::zeros(m, m);
        let mut place = |a2: usize, b2: usize, src: usize, val: crate::qcore::C64| -> Result<()> {
            let (g2, idx) = group_of[a2 * d + b2];
            if g2 != g {
                return Err(Error::NumericalInstability(
                    "Bohr-frequency blocks are not closed".into(),
                ));
            }
            block[(idx, src)] += val;
            Ok(())
        };
        for (src, &(a, b)) in members.iter().enumerate() {
            place(a, b, src, c(0.0, -(e[a] - e[b])))?;
            for cp in &comps {
                for &(a2, sa) in &cp.by_col[a] {
                    for &(b2, sb) in &cp.by_col[b] {
                        place(a2, b2, src, sa * sb.conj() * cp.rate)?;
                    }
                }
            }
            for a2 in 0..d {
                if k[(a2, a)].norm() > 0.0 {
                    place(a2, b, src, k[(a2, a)] * -0.5)?;
                }
            }
            for b2 in 0..d {
                if k[(b, b2)].norm() > 0.0 {
                    place(a, b2, src, k[(b, b2)] * -0.5)?;
                }
            }
        }
        let prop = matrix_exp(&block, c(t, 0.0));
        let x = crate::qcore::CVec::from_iterator(m, members.iter().map(|&(a, b)| rho_e[(a, b)]));
        let y = prop * x;
        for (i, &(a, b)) in members.iter().enumerate() {
            out_e[(a, b)] = y[i];
        }
    }
    checked_state(v * out_e * v.adjoint())
}

/// Null space of `ℒ`; errors unless it is one-dimensional.
pub fn steady_state(gen: &LindbladGenerator) -> Result<DensityMatrix> {
    steady_state_of(&gen.total, gen.dim())
}

pub fn steady_state_of(total: &CMat, d: usize) -> Result<DensityMatrix> {
    let svd = total.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let thresh = 1e-9 * smax.max(1e-300);
    let kernel: Vec<CMat> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= thresh)
        .map(|(k, _)| {
            let row = v_t.row(k).adjoint();
            devectorize(&row, d)
        })
        .collect();
    if kernel.len() != 1 {
        return Err(Error::DegenerateSteadyState { kernel });
    }
    let k = &kernel[0];
    let tr = k.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::NumericalInstability(
            "traceless kernel vector".into(),
        ));
    }
    let rho = DensityMatrix::new_unchecked(k / tr);
    let residual = crate::qcore::frob_norm(&devectorize(&(total * vectorize(rho.matrix())), d));
    if residual > 1e-10 * smax.max(1.0) {
        return Err(Error::NumericalInstability(format!(
            "steady-state residual {residual:e}"
        )));
    }
    if rho.min_eigenvalue() < -POSITIVITY_TOL {
        return Err(Error::NumericalInstability(
            "steady state is not positive".into(),
        ));
    }
    Ok(rho)
}

/// `J = Tr((ℒ_j ρ) H)`, positive when energy flows into the system.
pub fn heat_current(gen_part: &CMat, rho: &DensityMatrix, h: &Hermitian) -> f64 {
    let flow = devectorize(&(gen_part * vectorize(rho.matrix())), rho.dim());
    expect(&flow, h.matrix())
}

/// `ln ρ` with eigenvalues floored away from zero.
fn log_psd(m: &CMat) -> CMat {
    hermitian_eig(&Hermitian::symmetrized(m.clone())).map(|x| x.max(1e-300).ln())
}

/// `dS/dt − Σ_j J_j/T_j` with `dS/dt = −Tr((ℒρ) ln ρ)`.
pub fn entropy_production(
    gen: &LindbladGenerator,
    rho: &DensityMatrix,
    baths: &[BathSpec],
) -> Result<f64> {
    let flow = gen.apply(rho.matrix());
    let ds = -expect(&flow, &log_psd(rho.matrix()));
    let mut sum = 0.0;
    for b in baths {
        let part = gen
            .dissipator(&b.label)
            .ok_or_else(|| Error::InvalidParams(format!("bath '{}' not in generator", b.label)))?;
        sum += heat_current(part, rho, &gen.terms.hamiltonian) / b.temperature;
    }
    Ok(ds - sum)
}

/// `s = ∫₀^τ ‖ℋ̃(t)‖ dt` with the operator norm of the dissipative
/// superoperator at each time.
pub fn bath_action(dissipator_of_t: impl Fn(f64) -> CMat, tau_cyc: f64, tol: f64) -> f64 {
    numeric::integrate(|t| op_norm(&dissipator_of_t(t)), 0.0, tau_cyc, tol)
}

/// Interaction-picture form of a dissipator under `H`: `U†(t) ∘ D ∘ U(t)`.
pub fn interaction_picture(d: &CMat, h: &Hermitian, t: f64) -> CMat {
    let u = hermitian_eig(h).propagator(t);
    let u_sup = sandwich_super(&u, &u.adjoint());
    let ud_sup = sandwich_super(&u.adjoint(), &u);
    ud_sup * d * u_sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{pauli_x, pauli_z, sigma_minus, sigma_plus};
    use crate::qcore::{max_abs, trace_distance};
    use approx::assert_abs_diff_eq;

    fn qubit_h(w0: f64) -> Hermitian {
        Hermitian::new(pauli_z() * c(w0 / 2.0, 0.0)).unwrap()
    }

    fn flat_bath(label: &str, t: f64, rate: f64, s: CMat) -> BathSpec {
        BathSpec::new(
            label,
            t,
            SpectralFunction::flat(rate),
            Hermitian::new(s).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sigma_x_splits_into_ladders() {
        let h = qubit_h(1.3);
        let parts = decompose_coupling(&Hermitian::new(pauli_x()).unwrap(), &h, 1e-9).unwrap();
        assert_eq!(parts.len(), 2);
        assert_abs_diff_eq!(parts[0].omega, -1.3, epsilon = 1e-12);
        assert!(max_abs(&(&parts[0].op - sigma_plus())) < 1e-12);
        assert_abs_diff_eq!(parts[1].omega, 1.3, epsilon = 1e-12);
        assert!(max_abs(&(&parts[1].op - sigma_minus())) < 1e-12);
    }

    #[test]
    fn commuting_coupling_is_dephasing() {
        let parts =
            decompose_coupling(&Hermitian::new(pauli_z()).unwrap(), &qubit_h(1.0), 1e-9).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].omega, 0.0);
        assert!(max_abs(&(&parts[0].op - pauli_z())) < 1e-12);
    }

    #[test]
    fn qubit_generator_matches_hand_built() {
        let g0 = 0.7;
        let gen = build_generator(&qubit_h(1.0), &[flat_bath("b", 1.0, g0, pauli_x())]).unwrap();
        // hand-built: σ⁻ at γ₀, σ⁺ at γ₀ e^{−1}
        let want = dissipator_super(&sigma_minus(), g0)
            + dissipator_super(&sigma_plus(), g0 * (-1f64).exp());
        assert!(max_abs(&(gen.dissipator("b").unwrap() - &want)) < 1e-14);
        let nonzero = gen.terms.baths[0].jumps.len();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn zero_rate_leaves_commutator() {
        let h = qubit_h(1.0);
        let gen = build_generator(&h, &[flat_bath("b", 1.0, 0.0, pauli_x())]).unwrap();
        assert!(max_abs(&(&gen.total - hamiltonian_super(h.matrix()))) < 1e-15);
    }

    #[test]
    fn evolve_at_zero_time_is_identity_and_long_time_is_gibbs() {
        let h = qubit_h(1.0);
        let gen = build_generator(&h, &[flat_bath("b", 0.8, 1.0, pauli_x())]).unwrap();
        let rho0 = DensityMatrix::from_populations(&[0.9, 0.1]).unwrap();
        let same = evolve(&gen, &rho0, 0.0).unwrap();
        assert_eq!(same.matrix(), rho0.matrix());
        let late = evolve(&gen, &rho0, 60.0).unwrap();
        let gibbs = DensityMatrix::gibbs(&h, 0.8).unwrap();
        assert!(trace_distance(late.matrix(), gibbs.matrix()) < 1e-8);
    }

    #[test]
    fn steady_state_detailed_balance() {
        let (w0, t) = (1.0, 0.6);
        let gen = build_generator(&qubit_h(w0), &[flat_bath("b", t, 1.0, pauli_x())]).unwrap();
        let ss = steady_state(&gen).unwrap();
        let p = ss.populations();
        assert_abs_diff_eq!(p[0] / p[1], (-w0 / t).exp(), epsilon = 1e-10);
    }

    #[test]
    fn hot_limit_is_maximally_mixed() {
        let gen = build_generator(&qubit_h(1.0), &[flat_bath("b", 1e6, 1.0, pauli_x())]).unwrap();
        let ss = steady_state(&gen).unwrap();
        assert!(max_abs(&(ss.matrix() - identity(2) * c(0.5, 0.0))) < 1e-5);
    }

    #[test]
    fn dephasing_has_degenerate_kernel() {
        let gen = build_generator(&qubit_h(1.0), &[flat_bath("b", 1.0, 1.0, pauli_z())]).unwrap();
        match steady_state(&gen) {
            Err(Error::DegenerateSteadyState { kernel }) => assert_eq!(kernel.len(), 2),
            other => panic!("expected degenerate kernel, got {other:?}"),
        }
    }

    #[test]
    fn heat_flows_out_of_a_hot_qubit() {
        let h = qubit_h(1.0);
        let gen = build_generator(&h, &[flat_bath("b", 0.5, 1.0, pauli_x())]).unwrap();
        let hot = DensityMatrix::gibbs(&h, 3.0).unwrap();
        let j = heat_current(gen.dissipator("b").unwrap(), &hot, &h);
        // population-rate oracle: J = ω₀ (γ↑ p_g − γ↓ p_e)
        let p = hot.populations();
        let oracle = 1.0 * ((-2.0f64).exp() * p[1] - p[0]);
        assert_abs_diff_eq!(j, oracle, epsilon = 1e-12);
        assert!(j < 0.0);
        let ss = steady_state(&gen).unwrap();
        assert_abs_diff_eq!(
            heat_current(gen.dissipator("b").unwrap(), &ss, &h),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn entropy_production_vanishes_at_equilibrium() {
        let h = qubit_h(1.0);
        let baths = [flat_bath("b", 0.7, 1.0, pauli_x())];
        let gen = build_generator(&h, &baths).unwrap();
        let g = DensityMatrix::gibbs(&h, 0.7).unwrap();
        assert_abs_diff_eq!(
            entropy_production(&gen, &g, &baths).unwrap(),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn two_bath_steady_state_produces_entropy() {
        let h = qubit_h(1.0);
        let baths = [
            flat_bath("h", 2.0, 1.0, pauli_x()),
            flat_bath("c", 0.5, 0.5, pauli_x()),
        ];
        let gen = build_generator(&h, &baths).unwrap();
        let ss = steady_state(&gen).unwrap();
        let sigma = entropy_production(&gen, &ss, &baths).unwrap();
        let jh = heat_current(gen.dissipator("h").unwrap(), &ss, &h);
        let jc = heat_current(gen.dissipator("c").unwrap(), &ss, &h);
        assert_abs_diff_eq!(jh + jc, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma, -(jh / 2.0 + jc / 0.5), epsilon = 1e-10);
        assert!(sigma >= 0.0);
    }

    #[test]
    fn bath_action_cases() {
        let d = dissipator_super(&sigma_minus(), 0.4);
        let norm = op_norm(&d);
        assert_eq!(bath_action(|_| CMat::zeros(4, 4), 3.0, 1e-12), 0.0);
        assert_abs_diff_eq!(
            bath_action(|_| d.clone(), 3.0, 1e-12),
            3.0 * norm,
            epsilon = 1e-10
        );
        let half = bath_action(
            |t| {
                if t < 1.5 {
                    d.clone()
                } else {
                    CMat::zeros(4, 4)
                }
            },
            3.0,
            1e-12,
        );
        assert_abs_diff_eq!(half, 1.5 * norm, epsilon = 1e-9);
    }

    #[test]
    fn secular_blocks_match_dense_evolution() {
        // 3-level ladder with equal gaps: coherences of equal Bohr frequency couple
        let h = Hermitian::from_real_diag(&[0.0, 1.0, 2.0]);
        let x = crate::ops::destroy(3);
        let s = Hermitian::new(&x + x.adjoint()).unwrap();
        let baths = [
            BathSpec::new("a", 0.7, SpectralFunction::flat(0.4), s.clone()).unwrap(),
            BathSpec::new("b", 2.0, SpectralFunction::ohmic(0.3, 1.5), s).unwrap(),
        ];
        let gen = build_generator(&h, &baths).unwrap();
        let psi = crate::qcore::CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.64), c(0.48, 0.0)]);
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let dense = evolve(&gen, &rho0, 1.7).unwrap();
        let blocks = evolve_secular(&h, &baths, &rho0, 1.7).unwrap();
        assert!(max_abs(&(dense.matrix() - blocks.matrix())) < 1e-12);
    }

    #[test]
    fn rk_matches_exponential() {
        let h = qubit_h(1.0);
        let baths = [flat_bath("b", 0.9, 0.3, pauli_x())];
        let gen = build_generator(&h, &baths).unwrap();
        let rho0 = DensityMatrix::from_populations(&[0.2, 0.8]).unwrap();
        let a = evolve(&gen, &rho0, 2.5).unwrap();
        let b = evolve_rk(&gen.terms, &rho0, 2.5, 1e-12).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-10);
    }
}
