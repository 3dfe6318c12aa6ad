//! One run of each experiment: parameters in, scalar results and an optional
//! trace out.

use qtherm::battery::{
    charge_dicke, charge_lmg, charge_spins_xxz, entropy_matched_energy, ergotropy,
    extractable_fraction, n_copy_passive_energy, power_bound_check, qsl_report, quantum_advantage,
    ChargeTrace, CouplingRange, DickeParams, LmgParams, XxzParams,
};
use qtherm::cycles::{
    box_carnot, maser_analyze, otto_numeric, otto_qho, otto_squeezed, outcoupled_projective_work,
    outcoupled_work_series, two_stroke, CycleReport, OttoNumericParams, OutcoupledParams,
};
use qtherm::floquet::{ctm_currents, CtmConfig, PeriodicModulation, Waveform};
use qtherm::metrology::{
    cfi, eigenprojectors, fidelity_susceptibility, magnetometry_null, qfi, sld, thermometry_cutoff,
    thermometry_error, thermometry_simulate, ParamFamily, ThermometerModel,
};
use qtherm::numeric::{magnus4_step, propagate};
use qtherm::ops::{pauli_x, pauli_y, pauli_z};
use qtherm::qcore::{c, hermitian_eig, identity};
use qtherm::sta::{ermakov_schedule, verify_ermakov_invariant, CdProtocol};
use qtherm::{CMat, CVec, DensityMatrix, Hermitian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::Experiment;
use crate::config::Params;
use crate::error::CliError;
use crate::table::{Cell, Column};

/// Tolerance for the speed-limit verdicts.
const QSL_TOL: f64 = 1e-9;

/// Result of a single parameter point.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub summary: Vec<(&'static str, Cell)>,
    /// Time or grid resolved data, reported when the run is not a sweep.
    pub trace: Option<Vec<Column>>,
}

impl Outcome {
    fn scalars(summary: Vec<(&'static str, Cell)>) -> Self {
        Self {
            summary,
            trace: None,
        }
    }
}

/// Dispatches one point to the module operation behind `exp`.
pub fn run_point(exp: Experiment, p: &Params, seed: u64) -> Result<Outcome, CliError> {
    match exp {
        Experiment::Maser => maser(p),
        Experiment::BoxCarnot => Ok(Outcome::scalars(cycle_row(&box_carnot(
            p.real("l_a")?,
            p.real("l_b")?,
            p.real("mass")?,
        )?))),
        Experiment::Otto => Ok(Outcome::scalars(cycle_row(&otto_qho(
            p.real("omega_a")?,
            p.real("omega_b")?,
            p.real("t_h")?,
            p.real("t_c")?,
        )?))),
        Experiment::OttoSqueezed => squeezed(p),
        Experiment::OttoNumeric => numeric_otto(p),
        Experiment::TwoStroke => Ok(Outcome::scalars(cycle_row(&two_stroke(
            p.real("omega_k")?,
            p.real("omega_un")?,
            p.real("t_h")?,
            p.real("t_c")?,
            p.real("theta")?,
        )?))),
        Experiment::Ctm => ctm(p),
        Experiment::StaErmakov => sta_ermakov(p),
        Experiment::StaCd => sta_cd(p),
        Experiment::Outcoupled => outcoupled(p),
        Experiment::Qfi => fisher(p),
        Experiment::Thermometry => thermometry(p),
        Experiment::Magnetometry => magnetometry(p),
        Experiment::Ergotropy => ergotropy_run(p, seed),
        Experiment::NCopy => n_copy(p, seed),
        Experiment::Qsl => speed_limit(p),
        Experiment::ChargeXxz => charge_xxz(p),
        Experiment::ChargeLmg => {
            let lp = LmgParams {
                n: p.count("n")?,
                lambda: p.real("lambda")?,
                gamma: p.real("gamma")?,
                b: p.real("b")?,
                tau: p.real("tau")?,
                dt: p.real("dt")?,
            };
            Ok(charge_outcome(&charge_lmg(&lp)?))
        }
        Experiment::ChargeDicke => charge_dicke_run(p),
        Experiment::Advantage => advantage(p),
    }
}

// ------------------------------------------------------------ cycles

fn cycle_row(r: &CycleReport) -> Vec<(&'static str, Cell)> {
    vec![
        ("net_work_output", r.net_work_output.into()),
        ("q_hot", r.q_hot.into()),
        ("q_cold", r.q_cold.into()),
        ("efficiency", r.efficiency.into()),
        ("cop", r.cop.into()),
        ("mode", r.mode.as_str().into()),
        ("carnot_margin", r.carnot_margin.into()),
        ("first_law_residual", r.first_law_residual().into()),
    ]
}

fn maser(p: &Params) -> Result<Outcome, CliError> {
    let r = maser_analyze(
        p.real("omega_h")?,
        p.real("omega_c")?,
        p.real("t_h")?,
        p.real("t_c")?,
    )?;
    Ok(Outcome::scalars(vec![
        ("efficiency", r.efficiency.into()),
        ("cop", r.cop.into()),
        ("inversion", r.inversion.into()),
        ("mode", r.mode.as_str().into()),
    ]))
}

fn squeezed(p: &Params) -> Result<Outcome, CliError> {
    let r = otto_squeezed(
        p.real("omega_a")?,
        p.real("omega_b")?,
        p.real("t_h")?,
        p.real("t_c")?,
        p.real("squeezing")?,
    )?;
    let mut row = cycle_row(&r.cycle);
    row.push(("efficiency_max_power", r.efficiency_max_power.into()));
    row.push(("generalized_carnot", r.generalized_carnot.into()));
    Ok(Outcome::scalars(row))
}

fn numeric_otto(p: &Params) -> Result<Outcome, CliError> {
    let mut op = OttoNumericParams::new(
        p.real("omega_a")?,
        p.real("omega_b")?,
        p.real("t_h")?,
        p.real("t_c")?,
        p.real("ramp_time")?,
        p.real("thermalization_time")?,
        p.count("n_max")?,
    );
    op.bath_rate = p.real("bath_rate")?;
    op.max_step = p.real("max_step")?;
    op.max_cycles = p.count("max_cycles")?;
    let r = otto_numeric(&op)?;
    let mut row = cycle_row(&r.cycle);
    row.push(("ideal_net_work_output", r.ideal.net_work_output.into()));
    row.push(("friction", r.friction.into()));
    row.push(("hot_gibbs_distance", r.hot_gibbs_distance.into()));
    row.push(("cold_gibbs_distance", r.cold_gibbs_distance.into()));
    row.push(("cycles_run", r.cycles_run.into()));
    row.push(("fock_tail", r.fock_tail.into()));
    Ok(Outcome::scalars(row))
}

fn outcoupled(p: &Params) -> Result<Outcome, CliError> {
    let mut op = OutcoupledParams::reference(p.real("delta")?);
    op.coupling = p.real("coupling")?;
    op.cutoff = p.count("cutoff")?;
    let n = p.count("n_cycles")?;
    let coherent = outcoupled_work_series(&op, n, false)?;
    let dephased = outcoupled_work_series(&op, n, true)?;
    let projective = outcoupled_projective_work(&op, n)?;
    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    let ratio = last(&coherent) / last(&projective);
    Ok(Outcome {
        summary: vec![
            ("work_coherent", last(&coherent).into()),
            ("work_dephased", last(&dephased).into()),
            ("work_projective", last(&projective).into()),
            ("coherent_over_projective", ratio.into()),
        ],
        trace: Some(vec![
            Column::new("cycle", (1..=n).map(Cell::from).collect()),
            Column::reals("work_coherent", &coherent),
            Column::reals("work_dephased", &dephased),
            Column::reals("work_projective", &projective),
        ]),
    })
}

// ------------------------------------------------------------ floquet

fn ctm(p: &Params) -> Result<Outcome, CliError> {
    let amp = p.real("lambda_m")?;
    let waveform = match p.choice("waveform")? {
        "constant" => Waveform::Constant,
        "sinusoidal" => Waveform::Sinusoidal { amplitude: amp },
        "asymmetric" => Waveform::PiecewiseAsymmetric {
            up_fraction: p.real("up_fraction")?,
            amplitude: amp,
        },
        other => return Err(CliError::Internal(format!("unhandled waveform {other}"))),
    };
    let (t_h, t_c) = (p.real("t_h")?, p.real("t_c")?);
    let m_max = p.count("m_max")?;
    let modulation = PeriodicModulation::new(p.real("omega0")?, waveform, p.real("omega")?)?;
    let cfg = CtmConfig::separated(modulation, t_h, t_c, p.real("rate")?, m_max)?;
    let r = ctm_currents(&cfg, m_max)?;
    Ok(Outcome::scalars(vec![
        ("ratio", r.r.into()),
        ("j_hot", r.j_h.into()),
        ("j_cold", r.j_c.into()),
        ("power", r.power.into()),
        ("mode", r.mode.as_str().into()),
        ("efficiency_or_cop", r.efficiency_or_cop.into()),
        ("omega_critical", r.omega_cr.into()),
        ("entropy_production", (-r.second_law(t_h, t_c)).into()),
        ("sidebands", r.m_max.into()),
    ]))
}

// ------------------------------------------------------------ sta

fn sta_ermakov(p: &Params) -> Result<Outcome, CliError> {
    let s = ermakov_schedule(p.real("omega_i")?, p.real("omega_f")?, p.real("tau")?)?;
    let inv = verify_ermakov_invariant(
        &s,
        p.count("n_max")?,
        p.real("temperature")?,
        p.count("samples")?,
    )?;
    let boundary = s
        .boundary_residuals()
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let n = p.count("trace_points")?;
    let times: Vec<f64> = (0..n).map(|k| s.tau * k as f64 / (n - 1) as f64).collect();
    let b: Vec<f64> = times.iter().map(|&t| s.b(t)).collect();
    let w2: Vec<f64> = times.iter().map(|&t| s.omega_sq(t)).collect();
    Ok(Outcome {
        summary: vec![
            ("boundary_residual", boundary.into()),
            ("ermakov_residual", s.max_ermakov_residual().into()),
            ("trap_inverted", s.trap_inverted.into()),
            ("min_omega_sq", s.min_omega_sq.into()),
            ("invariant_drift", inv.max_drift.into()),
            ("population_change", inv.max_population_change.into()),
            ("fock_tail", inv.fock_tail.into()),
        ],
        trace: Some(vec![
            Column::reals("t", &times),
            Column::reals("scaling", &b),
            Column::reals("omega_sq", &w2),
        ]),
    })
}

fn sta_cd(p: &Params) -> Result<Outcome, CliError> {
    let (delta, w0, w1, tau) = (
        p.real("delta")?,
        p.real("w_start")?,
        p.real("w_end")?,
        p.real("tau")?,
    );
    let steps = p.count("steps")?;
    let h = move |t: f64| pauli_x() * c(delta, 0.0) + pauli_z() * c(w0 + (w1 - w0) * t / tau, 0.0);
    let ground = |t: f64| -> Result<CVec, CliError> {
        Ok(hermitian_eig(&Hermitian::new(h(t))?)
            .vectors
            .column(0)
            .into_owned())
    };
    let psi0 = ground(0.0)?;
    let target = ground(tau)?;
    let cd = CdProtocol::new(h, p.real("fd_step")?);
    let psi_cd = cd.evolve(&psi0, 0.0, tau, steps)?;
    let psi_bare = propagate(h, 0.0, tau, steps) * &psi0;
    let cost = cd.cd_cost(0.0, tau, steps.max(2))?;
    Ok(Outcome::scalars(vec![
        (
            "infidelity_cd",
            (1.0 - target.dotc(&psi_cd).norm_sqr()).into(),
        ),
        (
            "infidelity_bare",
            (1.0 - target.dotc(&psi_bare).norm_sqr()).into(),
        ),
        ("cd_cost", cost.into()),
    ]))
}

// ------------------------------------------------------------ metrology

fn fisher(p: &Params) -> Result<Outcome, CliError> {
    let theta = p.real("theta")?;
    let omega = p.real("omega")?;
    let family = match p.choice("family")? {
        "thermal" => {
            let h = Hermitian::from_real_diag(&[omega, 0.0]);
            ParamFamily::new(move |t| DensityMatrix::gibbs(&h, t))
        }
        "phase" => {
            let r = p.real("purity")?;
            ParamFamily::new(move |phi: f64| {
                let m = (identity(2)
                    + (pauli_x() * c(phi.cos(), 0.0) + pauli_y() * c(phi.sin(), 0.0)) * c(r, 0.0))
                    * c(0.5, 0.0);
                DensityMatrix::new(m)
            })
        }
        other => return Err(CliError::Internal(format!("unhandled family {other}"))),
    };
    let report = qfi(&family, theta)?;
    let best = eigenprojectors(&sld(&family, theta)?);
    let energy_basis = eigenprojectors(&Hermitian::from_real_diag(&[1.0, 0.0]));
    Ok(Outcome::scalars(vec![
        ("qfi", report.qfi.into()),
        ("cramer_rao_floor", report.cramer_rao_floor.into()),
        ("cfi_sld_basis", cfi(&family, theta, &best)?.into()),
        (
            "cfi_energy_basis",
            cfi(&family, theta, &energy_basis)?.into(),
        ),
        (
            "fidelity_susceptibility",
            fidelity_susceptibility(&family, theta, p.real("eps")?)?.into(),
        ),
    ]))
}

fn grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                to
            } else {
                from + (to - from) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn thermometry(p: &Params) -> Result<Outcome, CliError> {
    let m = ThermometerModel {
        omega_h: p.real("omega_h")?,
        omega_c: p.real("omega_c")?,
        kappa_h: p.real("kappa_h")?,
        kappa_c: p.real("kappa_c")?,
        g: p.real("g")?,
    };
    let t_c = p.real("t_c")?;
    let (from, to) = (p.real("t_h_from")?, p.real("t_h_to")?);
    let sweep = grid(from, to, p.count("t_h_steps")?);
    let n_max = match p.opt_count("n_max")? {
        Some(n) => n,
        None => thermometry_cutoff(&m, t_c, to),
    };
    let r = thermometry_simulate(&m, t_c, &sweep, n_max)?;
    let e = thermometry_error(&m, t_c, p.real("delta_i")?, p.real("delta_t_h")?)?;
    let (th, current): (Vec<f64>, Vec<f64>) = r.sweep_trace.iter().copied().unzip();
    Ok(Outcome {
        summary: vec![
            ("null_t_h", r.null_location.into()),
            ("estimated_t_c", r.estimated_parameter.into()),
            ("grid_error", r.error_estimate.into()),
            ("bracket_half_width", r.bracket_half_width.into()),
            ("delta_t_c", e.delta_t_c.into()),
            ("c1", e.c1.into()),
            ("c2", e.c2.into()),
            ("alpha", e.alpha.into()),
            ("n_max", n_max.into()),
        ],
        trace: Some(vec![
            Column::reals("t_h", &th),
            Column::reals("current", &current),
        ]),
    })
}

fn magnetometry(p: &Params) -> Result<Outcome, CliError> {
    let sweep = grid(
        p.real("omega_k_from")?,
        p.real("omega_k_to")?,
        p.count("omega_k_steps")?,
    );
    let r = magnetometry_null(
        p.real("omega_un")?,
        p.real("t_h")?,
        p.real("t_c")?,
        p.real("theta")?,
        &sweep,
        p.real("omega_k_error")?,
    )?;
    let (wk, work): (Vec<f64>, Vec<f64>) = r.sweep_trace.iter().copied().unzip();
    Ok(Outcome {
        summary: vec![
            ("null_omega_k", r.null_location.into()),
            ("estimated_omega_un", r.estimated_parameter.into()),
            ("error_estimate", r.error_estimate.into()),
            ("bracket_half_width", r.bracket_half_width.into()),
        ],
        trace: Some(vec![
            Column::reals("omega_k", &wk),
            Column::reals("net_work_output", &work),
        ]),
    })
}

// ------------------------------------------------------------ battery

/// Diagonal state from the given populations, or a seeded random one.
fn populations(p: &Params, d: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    let raw: Vec<f64> = match p.opt_list("populations")? {
        Some(v) => v.to_vec(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = v.iter().sum();
            return Ok(v.iter().map(|x| x / s).collect());
        }
    };
    if p.flag("normalize")? {
        let s: f64 = raw.iter().sum();
        if !(s > 0.0) {
            return Err(CliError::config(
                "parameters.populations: cannot normalize a zero vector",
            ));
        }
        return Ok(raw.iter().map(|x| x / s).collect());
    }
    Ok(raw)
}

/// Full-rank random state `GG†/tr(GG†)` with a seeded complex matrix `G`.
fn random_state(d: usize, seed: u64) -> Result<DensityMatrix, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMat::from_fn(d, d, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::new(m * c(1.0 / tr, 0.0))?)
}

fn ergotropy_run(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let energies = p.list("energies")?;
    let h = Hermitian::from_real_diag(energies);
    let rho = match p.opt_list("populations")? {
        Some(_) => DensityMatrix::from_populations(&populations(p, energies.len(), seed)?)?,
        None => random_state(energies.len(), seed)?,
    };
    let r = ergotropy(&rho, &h)?;
    let state_pop = rho.populations();
    let passive_pop = r.passive_state.populations();
    Ok(Outcome {
        summary: vec![
            ("energy", rho.expect(h.matrix()).into()),
            ("ergotropy", r.ergotropy.into()),
            ("passive_energy", r.passive_energy.into()),
            ("thermal_bound", r.thermal_bound.into()),
            ("bound_gap", r.bound_gap.into()),
            ("effective_beta", r.effective_beta.into()),
            (
                "extractable_fraction",
                extractable_fraction(&rho, &h)?.into(),
            ),
        ],
        trace: Some(vec![
            Column::new("level", (0..energies.len()).map(Cell::from).collect()),
            Column::reals("energy", energies),
            Column::reals("population", &state_pop),
            Column::reals("passive_population", &passive_pop),
        ]),
    })
}

fn n_copy(p: &Params, seed: u64) -> Result<Outcome, CliError> {
    let energies = p.list("energies")?;
    let h = Hermitian::from_real_diag(energies);
    let sigma = DensityMatrix::from_populations(&populations(p, energies.len(), seed)?)?;
    let n_max = p.count("n_max")?;
    let per_copy = (1..=n_max)
        .map(|n| n_copy_passive_energy(&sigma, &h, n))
        .collect::<Result<Vec<f64>, _>>()?;
    let floor = entropy_matched_energy(&sigma, &h)?;
    let last = per_copy.last().copied().unwrap_or(f64::NAN);
    Ok(Outcome {
        summary: vec![
            ("passive_energy_single", per_copy[0].into()),
            ("passive_energy_n_max", last.into()),
            ("entropy_matched_floor", floor.into()),
            ("gap_to_floor", (last - floor).into()),
        ],
        trace: Some(vec![
            Column::new("copies", (1..=n_max).map(Cell::from).collect()),
            Column::reals("passive_energy_per_copy", &per_copy),
            Column::reals("entropy_matched_floor", &vec![floor; n_max]),
        ]),
    })
}

fn speed_limit(p: &Params) -> Result<Outcome, CliError> {
    let (w, a, nu) = (
        p.real("omega")?,
        p.real("drive_amplitude")?,
        p.real("drive_frequency")?,
    );
    let (theta, tau) = (p.real("polar_angle")?, p.real("tau")?);
    let steps = p.count("steps")?;
    let h = move |t: f64| pauli_z() * c(0.5 * w, 0.0) + pauli_x() * c(a * (nu * t).cos(), 0.0);
    let psi = CVec::from_vec(vec![
        c((0.5 * theta).cos(), 0.0),
        c((0.5 * theta).sin(), 0.0),
    ]);
    let rho0 = DensityMatrix::pure(&psi)?;
    let dt = tau / steps as f64;
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut u = identity(2);
    for k in 0..steps {
        u = magnus4_step(&h, k as f64 * dt, dt) * u;
        times.push((k + 1) as f64 * dt);
        states.push(rho0.conjugate(&u));
    }
    let energy: Vec<f64> = times
        .iter()
        .zip(&states)
        .map(|(&t, s)| s.expect(&h(t)))
        .collect();
    let q = qsl_report(&times, &states, h)?;
    Ok(Outcome {
        summary: vec![
            ("bures_distance", q.bures_distance.into()),
            ("mean_spread", q.time_averaged_variance.into()),
            ("mean_energy", q.time_averaged_energy.into()),
            ("tau_mt", q.tau_mt.into()),
            ("tau_unified", q.tau_unified.into()),
            ("tau", q.actual_tau.into()),
            ("mt_holds", q.mt_holds(QSL_TOL).into()),
            ("unified_holds", q.unified_holds(QSL_TOL).into()),
        ],
        trace: Some(vec![
            Column::reals("t", &times),
            Column::reals("energy", &energy),
        ]),
    })
}

fn charge_outcome(trace: &ChargeTrace) -> Outcome {
    let s = trace.summary();
    Outcome {
        summary: vec![
            ("optimal_time", s.optimal_time.into()),
            ("max_energy", s.max_energy.into()),
            ("mean_power", s.mean_power.into()),
            ("mean_variance", s.mean_variance.into()),
            ("mean_fisher", s.mean_fisher.into()),
            ("mean_tightness", s.mean_tightness.into()),
            ("final_fraction", trace.final_fraction.into()),
            ("power_bound_excess", power_bound_check(trace).into()),
            ("tau_mt", trace.qsl.tau_mt.into()),
            ("tau_unified", trace.qsl.tau_unified.into()),
        ],
        trace: Some(vec![
            Column::reals("t", &trace.times),
            Column::reals("energy", &trace.energies),
            Column::reals("power", &trace.powers),
            Column::reals("variance", &trace.variances),
            Column::reals("energy_fisher", &trace.energy_fisher),
            Column::reals("bound_tightness", &trace.bound_tightness),
            Column::reals("local_variance", &trace.local_variance),
            Column::reals("entanglement_variance", &trace.entanglement_variance),
        ]),
    }
}

fn charge_xxz(p: &Params) -> Result<Outcome, CliError> {
    let range = match p.choice("range")? {
        "nearest" => CouplingRange::NearestNeighbor,
        "power-law" => CouplingRange::PowerLaw,
        other => return Err(CliError::Internal(format!("unhandled range {other}"))),
    };
    let xp = XxzParams {
        n: p.count("n")?,
        b: p.real("b")?,
        g: p.real("g")?,
        alpha: p.real("alpha")?,
        nu: p.real("nu")?,
        range,
        omega: p.real("omega")?,
        tau: p.real("tau")?,
        dt: p.real("dt")?,
    };
    Ok(charge_outcome(&charge_spins_xxz(&xp)?))
}

fn default_cutoff(n: usize) -> usize {
    3 * n + 20
}

fn charge_dicke_run(p: &Params) -> Result<Outcome, CliError> {
    let n = p.count("n")?;
    let cutoff = p
        .opt_count("photon_cutoff")?
        .unwrap_or_else(|| default_cutoff(n));
    let mut dp = DickeParams::resonant(
        n,
        p.real("lambda")?,
        p.flag("rescale")?,
        cutoff,
        p.real("tau")?,
        p.real("dt")?,
    );
    dp.omega = p.real("omega")?;
    dp.omega_c = p.real("omega_c")?;
    dp.n_photons = p.opt_count("n_photons")?.unwrap_or(n);
    Ok(charge_outcome(&charge_dicke(&dp)?))
}

fn advantage(p: &Params) -> Result<Outcome, CliError> {
    let n = p.count("n")?;
    let (lambda, tau, dt) = (p.real("lambda")?, p.real("tau")?, p.real("dt")?);
    let cutoff = p
        .opt_count("photon_cutoff")?
        .unwrap_or_else(|| default_cutoff(n));
    let single = charge_dicke(&DickeParams::resonant(
        1,
        lambda,
        false,
        p.count("single_cutoff")?,
        tau,
        dt,
    ))?;
    let parallel = ChargeTrace::parallel(&single, n);
    let collective = charge_dicke(&DickeParams::resonant(
        n,
        lambda,
        p.flag("rescale")?,
        cutoff,
        tau,
        dt,
    ))?;
    let gamma = quantum_advantage(&parallel, &collective)?;
    let (sp, sc) = (parallel.summary(), collective.summary());
    Ok(Outcome::scalars(vec![
        ("speedup", gamma.into()),
        ("parallel_mean_power", sp.mean_power.into()),
        ("collective_mean_power", sc.mean_power.into()),
        ("power_ratio", (sc.mean_power / sp.mean_power).into()),
        ("parallel_max_energy", sp.max_energy.into()),
        ("collective_max_energy", sc.max_energy.into()),
    ]))
}
