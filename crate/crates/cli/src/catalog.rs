//! Experiment names and the parameters each one accepts.

use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    Maser,
    BoxCarnot,
    Otto,
    OttoSqueezed,
    OttoNumeric,
    TwoStroke,
    Ctm,
    StaErmakov,
    StaCd,
    Outcoupled,
    Qfi,
    Thermometry,
    Magnetometry,
    Ergotropy,
    NCopy,
    Qsl,
    ChargeXxz,
    ChargeLmg,
    ChargeDicke,
    Advantage,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Real,
    Int,
    Bool,
    Choice(&'static [&'static str]),
    RealList,
}

impl Kind {
    pub fn is_numeric(self) -> bool {
        matches!(self, Kind::Real | Kind::Int)
    }

    pub fn describe(self) -> String {
        match self {
            Kind::Real => "real".into(),
            Kind::Int => "integer".into(),
            Kind::Bool => "boolean".into(),
            Kind::Choice(opts) => format!("one of {}", opts.join("|")),
            Kind::RealList => "list of reals".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Default {
    Required,
    /// May be left out; the experiment then derives a value itself.
    Optional,
    Real(f64),
    Int(i64),
    Bool(bool),
    Choice(&'static str),
}

/// Admissible interval for numeric values (elementwise for lists).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Bounds {
    pub const ANY: Bounds = Bounds {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_open: true,
        hi_open: true,
    };
    pub const POSITIVE: Bounds = Bounds {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_open: true,
        hi_open: true,
    };
    pub const NON_NEGATIVE: Bounds = Bounds {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_open: false,
        hi_open: true,
    };

    pub const fn closed(lo: f64, hi: f64) -> Bounds {
        Bounds {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub const fn open(lo: f64, hi: f64) -> Bounds {
        Bounds {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub const fn at_least(lo: f64) -> Bounds {
        Bounds {
            lo,
            hi: f64::INFINITY,
            lo_open: false,
            hi_open: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        x.is_finite() && above && below
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        let num = |x: f64| {
            if x == f64::INFINITY {
                "inf".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(f, "{l}{}, {}{r}", num(self.lo), num(self.hi))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Default,
    pub bounds: Bounds,
    pub doc: &'static str,
}

const fn p(
    key: &'static str,
    kind: Kind,
    default: Default,
    bounds: Bounds,
    doc: &'static str,
) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default,
        bounds,
        doc,
    }
}

const fn req(key: &'static str, bounds: Bounds, doc: &'static str) -> ParamSpec {
    p(key, Kind::Real, Default::Required, bounds, doc)
}

const fn real(key: &'static str, v: f64, bounds: Bounds, doc: &'static str) -> ParamSpec {
    p(key, Kind::Real, Default::Real(v), bounds, doc)
}

const fn int(key: &'static str, v: i64, bounds: Bounds, doc: &'static str) -> ParamSpec {
    p(key, Kind::Int, Default::Int(v), bounds, doc)
}

/// `greater` must exceed `lesser` (or equal it when not strict).
#[derive(Clone, Copy, Debug)]
pub struct Relation {
    pub greater: &'static str,
    pub lesser: &'static str,
    pub strict: bool,
}

const fn gt(greater: &'static str, lesser: &'static str) -> Relation {
    Relation {
        greater,
        lesser,
        strict: true,
    }
}

const POS: Bounds = Bounds::POSITIVE;
const NONNEG: Bounds = Bounds::NON_NEGATIVE;

const T_H: ParamSpec = req("t_h", POS, "hot bath temperature");
const T_C: ParamSpec = req("t_c", POS, "cold bath temperature");

const MASER: &[ParamSpec] = &[
    req("omega_h", POS, "hot transition frequency"),
    req("omega_c", POS, "cold transition frequency"),
    T_H,
    T_C,
];

const BOX_CARNOT: &[ParamSpec] = &[
    req("l_a", POS, "box length at the start of the hot isotherm"),
    req(
        "l_b",
        POS,
        "box length at the start of the compression, smaller than l_a",
    ),
    real("mass", 1.0, POS, "particle mass"),
];

const OTTO: &[ParamSpec] = &[
    req("omega_a", POS, "oscillator frequency on the hot isochore"),
    req("omega_b", POS, "oscillator frequency on the cold isochore"),
    T_H,
    T_C,
];

const OTTO_SQUEEZED: &[ParamSpec] = &[
    req("omega_a", POS, "oscillator frequency on the hot isochore"),
    req("omega_b", POS, "oscillator frequency on the cold isochore"),
    T_H,
    T_C,
    real(
        "squeezing",
        0.0,
        NONNEG,
        "squeezing parameter r of the hot bath",
    ),
];

const OTTO_NUMERIC: &[ParamSpec] = &[
    req("omega_a", POS, "oscillator frequency on the hot isochore"),
    req("omega_b", POS, "oscillator frequency on the cold isochore"),
    T_H,
    T_C,
    req("ramp_time", POS, "duration of each linear frequency ramp"),
    real(
        "thermalization_time",
        40.0,
        POS,
        "duration of each bath contact",
    ),
    int("n_max", 40, Bounds::closed(2.0, 400.0), "Fock cutoff"),
    real("bath_rate", 1.0, POS, "flat bath coupling rate"),
    real(
        "max_step",
        0.05,
        POS,
        "largest integration step on the ramps",
    ),
    int(
        "max_cycles",
        60,
        Bounds::closed(1.0, 10000.0),
        "cycles allowed to reach the limit cycle",
    ),
];

const TWO_STROKE: &[ParamSpec] = &[
    req("omega_k", POS, "half gap of the hot-side qubit"),
    req("omega_un", POS, "half gap of the cold-side qubit"),
    T_H,
    T_C,
    real(
        "theta",
        PI / 2.0,
        Bounds::closed(0.0, PI),
        "partial swap angle",
    ),
];

const CTM: &[ParamSpec] = &[
    real("omega0", 10.0, POS, "mean qubit gap"),
    req("omega", POS, "modulation frequency"),
    T_H,
    T_C,
    p(
        "waveform",
        Kind::Choice(&["constant", "sinusoidal", "asymmetric"]),
        Default::Choice("sinusoidal"),
        Bounds::ANY,
        "gap modulation shape",
    ),
    real(
        "lambda_m",
        0.1,
        NONNEG,
        "modulation amplitude (peak-to-peak swing for asymmetric)",
    ),
    real(
        "up_fraction",
        0.5,
        Bounds::open(0.0, 1.0),
        "fraction of the period spent high (asymmetric only)",
    ),
    real("rate", 1.0, POS, "flat bath coupling rate"),
    int(
        "m_max",
        40,
        Bounds::closed(1.0, 10000.0),
        "largest sideband order kept",
    ),
];

const STA_ERMAKOV: &[ParamSpec] = &[
    req("omega_i", POS, "initial trap frequency"),
    req("omega_f", POS, "final trap frequency"),
    req("tau", POS, "protocol duration"),
    real(
        "temperature",
        1.0,
        POS,
        "temperature of the initial thermal state",
    ),
    int(
        "n_max",
        60,
        Bounds::closed(2.0, 400.0),
        "Fock cutoff for the invariant check",
    ),
    int(
        "samples",
        20,
        Bounds::closed(1.0, 10000.0),
        "times at which the invariant is checked",
    ),
    int(
        "trace_points",
        201,
        Bounds::closed(2.0, 1_000_000.0),
        "rows in the schedule trace",
    ),
];

const STA_CD: &[ParamSpec] = &[
    real(
        "delta",
        1.0,
        POS,
        "Landau-Zener coupling, H = delta sx + w(t) sz",
    ),
    real("w_start", -5.0, Bounds::ANY, "bias at t = 0"),
    real("w_end", 5.0, Bounds::ANY, "bias at t = tau"),
    req("tau", POS, "sweep duration"),
    int(
        "steps",
        4000,
        Bounds::closed(1.0, 10_000_000.0),
        "integration steps",
    ),
    real(
        "fd_step",
        1e-6,
        POS,
        "finite-difference step for the eigenvector derivative",
    ),
];

const OUTCOUPLED: &[ParamSpec] = &[
    real(
        "delta",
        1.0,
        POS,
        "two-level gap, the energy unit of the reference parameters",
    ),
    int(
        "n_cycles",
        10,
        Bounds::closed(1.0, 1000.0),
        "number of periods",
    ),
    real("coupling", 0.02, POS, "qubit-oscillator coupling"),
    int(
        "cutoff",
        24,
        Bounds::closed(2.0, 400.0),
        "oscillator Fock cutoff",
    ),
];

const QFI: &[ParamSpec] = &[
    p(
        "family",
        Kind::Choice(&["thermal", "phase"]),
        Default::Choice("thermal"),
        Bounds::ANY,
        "thermal: qubit Gibbs state in T; phase: dephased qubit rotated about z",
    ),
    req(
        "theta",
        Bounds::ANY,
        "parameter value (temperature or phase)",
    ),
    real("omega", 1.0, POS, "qubit gap"),
    real(
        "purity",
        0.9,
        Bounds::closed(0.0, 1.0),
        "Bloch vector length of the phase probe",
    ),
    real("eps", 1e-2, POS, "step of the fidelity susceptibility"),
];

const THERMOMETRY: &[ParamSpec] = &[
    real("omega_h", 8.5, POS, "hot cavity frequency"),
    real("omega_c", 1.0, POS, "cold cavity frequency"),
    real("kappa_h", 0.06, POS, "hot cavity loss rate"),
    real("kappa_c", 0.06, POS, "cold cavity loss rate"),
    real("g", 0.02, POS, "effective exchange coupling"),
    req("t_c", POS, "true cold temperature to recover"),
    req("t_h_from", POS, "start of the T_h sweep"),
    req("t_h_to", POS, "end of the T_h sweep"),
    int(
        "t_h_steps",
        41,
        Bounds::closed(2.0, 1_000_000.0),
        "points in the T_h sweep",
    ),
    real("delta_i", 0.0, NONNEG, "current noise"),
    real("delta_t_h", 0.0, NONNEG, "uncertainty of T_h"),
    p(
        "n_max",
        Kind::Int,
        Default::Optional,
        Bounds::closed(1.0, 200.0),
        "per-mode Fock cutoff (derived from the tail when omitted)",
    ),
];

const MAGNETOMETRY: &[ParamSpec] = &[
    req("omega_un", POS, "unknown field to recover"),
    T_H,
    T_C,
    real(
        "theta",
        PI / 2.0,
        Bounds::closed(0.0, PI),
        "partial swap angle",
    ),
    req("omega_k_from", POS, "start of the known-field sweep"),
    req("omega_k_to", POS, "end of the known-field sweep"),
    int(
        "omega_k_steps",
        41,
        Bounds::closed(2.0, 1_000_000.0),
        "points in the known-field sweep",
    ),
    real("omega_k_error", 0.0, NONNEG, "error of the known field"),
];

const ERGOTROPY: &[ParamSpec] = &[
    p(
        "energies",
        Kind::RealList,
        Default::Required,
        Bounds::ANY,
        "battery levels",
    ),
    p(
        "populations",
        Kind::RealList,
        Default::Optional,
        Bounds::NON_NEGATIVE,
        "diagonal state; a seeded random state is used when omitted",
    ),
    p(
        "normalize",
        Kind::Bool,
        Default::Bool(false),
        Bounds::ANY,
        "rescale populations to unit sum",
    ),
];

const N_COPY: &[ParamSpec] = &[
    p(
        "energies",
        Kind::RealList,
        Default::Required,
        Bounds::ANY,
        "single-copy levels",
    ),
    p(
        "populations",
        Kind::RealList,
        Default::Optional,
        Bounds::NON_NEGATIVE,
        "single-copy diagonal passive state; seeded random when omitted",
    ),
    p(
        "normalize",
        Kind::Bool,
        Default::Bool(false),
        Bounds::ANY,
        "rescale populations to unit sum",
    ),
    int(
        "n_max",
        4,
        Bounds::closed(1.0, 12.0),
        "largest number of copies",
    ),
];

const QSL: &[ParamSpec] = &[
    real("omega", 1.0, POS, "qubit gap"),
    real(
        "drive_amplitude",
        0.0,
        NONNEG,
        "transverse drive A in H = omega/2 sz + A cos(nu t) sx",
    ),
    real("drive_frequency", 1.0, POS, "drive frequency nu"),
    real(
        "polar_angle",
        PI / 2.0,
        Bounds::closed(0.0, PI),
        "Bloch polar angle of the initial pure state",
    ),
    req("tau", POS, "evolution time"),
    int(
        "steps",
        1000,
        Bounds::closed(1.0, 10_000_000.0),
        "integration steps",
    ),
];

const CHARGE_XXZ: &[ParamSpec] = &[
    p(
        "n",
        Kind::Int,
        Default::Required,
        Bounds::closed(1.0, 12.0),
        "number of spins",
    ),
    real("b", 1.0, POS, "battery field"),
    real("g", 0.0, Bounds::ANY, "exchange coupling"),
    real("alpha", 0.5, Bounds::ANY, "flip-flop anisotropy"),
    real("nu", 1.0, NONNEG, "power-law decay exponent"),
    p(
        "range",
        Kind::Choice(&["nearest", "power-law"]),
        Default::Choice("nearest"),
        Bounds::ANY,
        "coupling range",
    ),
    real("omega", 1.0, Bounds::ANY, "charging field"),
    req("tau", POS, "charging window"),
    real("dt", 0.01, POS, "sampling step"),
];

const CHARGE_LMG: &[ParamSpec] = &[
    p(
        "n",
        Kind::Int,
        Default::Required,
        Bounds::closed(1.0, 14.0),
        "number of spins",
    ),
    req("lambda", Bounds::ANY, "all-to-all coupling"),
    real("gamma", -1.0, Bounds::ANY, "yy anisotropy"),
    real("b", 1.0, POS, "battery field"),
    req("tau", POS, "charging window"),
    real("dt", 0.001, POS, "sampling step"),
];

const CHARGE_DICKE: &[ParamSpec] = &[
    p(
        "n",
        Kind::Int,
        Default::Required,
        Bounds::closed(1.0, 64.0),
        "number of atoms",
    ),
    req("lambda", Bounds::ANY, "atom-cavity coupling"),
    p(
        "rescale",
        Kind::Bool,
        Default::Bool(false),
        Bounds::ANY,
        "use lambda/sqrt(n)",
    ),
    real("omega", 1.0, POS, "atomic gap"),
    real("omega_c", 1.0, POS, "cavity frequency"),
    p(
        "n_photons",
        Kind::Int,
        Default::Optional,
        Bounds::closed(0.0, 10000.0),
        "initial photon number (defaults to n)",
    ),
    p(
        "photon_cutoff",
        Kind::Int,
        Default::Optional,
        Bounds::closed(1.0, 10000.0),
        "Fock cutoff (defaults to 3n + 20)",
    ),
    req("tau", POS, "charging window"),
    real("dt", 0.002, POS, "sampling step"),
];

const ADVANTAGE: &[ParamSpec] = &[
    p(
        "n",
        Kind::Int,
        Default::Required,
        Bounds::closed(1.0, 64.0),
        "number of atoms",
    ),
    req("lambda", Bounds::ANY, "atom-cavity coupling"),
    p(
        "rescale",
        Kind::Bool,
        Default::Bool(false),
        Bounds::ANY,
        "use lambda/sqrt(n) in the collective run",
    ),
    p(
        "photon_cutoff",
        Kind::Int,
        Default::Optional,
        Bounds::closed(1.0, 10000.0),
        "Fock cutoff of the collective run (defaults to 3n + 20)",
    ),
    int(
        "single_cutoff",
        24,
        Bounds::closed(1.0, 10000.0),
        "Fock cutoff of the single-atom run",
    ),
    req("tau", POS, "charging window"),
    real("dt", 0.002, POS, "sampling step"),
];

impl Experiment {
    pub const ALL: [Experiment; 20] = [
        Experiment::Maser,
        Experiment::BoxCarnot,
        Experiment::Otto,
        Experiment::OttoSqueezed,
        Experiment::OttoNumeric,
        Experiment::TwoStroke,
        Experiment::Ctm,
        Experiment::StaErmakov,
        Experiment::StaCd,
        Experiment::Outcoupled,
        Experiment::Qfi,
        Experiment::Thermometry,
        Experiment::Magnetometry,
        Experiment::Ergotropy,
        Experiment::NCopy,
        Experiment::Qsl,
        Experiment::ChargeXxz,
        Experiment::ChargeLmg,
        Experiment::ChargeDicke,
        Experiment::Advantage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Maser => "maser",
            Experiment::BoxCarnot => "box-carnot",
            Experiment::Otto => "otto",
            Experiment::OttoSqueezed => "otto-squeezed",
            Experiment::OttoNumeric => "otto-numeric",
            Experiment::TwoStroke => "two-stroke",
            Experiment::Ctm => "ctm",
            Experiment::StaErmakov => "sta-ermakov",
            Experiment::StaCd => "sta-cd",
            Experiment::Outcoupled => "outcoupled",
            Experiment::Qfi => "qfi",
            Experiment::Thermometry => "thermometry",
            Experiment::Magnetometry => "magnetometry",
            Experiment::Ergotropy => "ergotropy",
            Experiment::NCopy => "n-copy",
            Experiment::Qsl => "qsl",
            Experiment::ChargeXxz => "charge-xxz",
            Experiment::ChargeLmg => "charge-lmg",
            Experiment::ChargeDicke => "charge-dicke",
            Experiment::Advantage => "advantage",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::Maser => "quasi-static three-level maser",
            Experiment::BoxCarnot => "Carnot cycle of a particle in a box",
            Experiment::Otto => "ideal harmonic Otto cycle",
            Experiment::OttoSqueezed => "Otto cycle with a squeezed hot bath",
            Experiment::OttoNumeric => "finite-time Otto cycle simulated to its limit cycle",
            Experiment::TwoStroke => "two-qubit two-stroke machine",
            Experiment::Ctm => "continuously modulated qubit between two baths",
            Experiment::StaErmakov => "shortcut to adiabaticity for a harmonic trap",
            Experiment::StaCd => "counterdiabatic Landau-Zener sweep",
            Experiment::Outcoupled => "work stored in an out-coupled oscillator over many cycles",
            Experiment::Qfi => "quantum and classical Fisher information of a qubit family",
            Experiment::Thermometry => "two-cavity null-current thermometer",
            Experiment::Magnetometry => "two-stroke null-work magnetometer",
            Experiment::Ergotropy => "ergotropy and thermal bound of a diagonal state",
            Experiment::NCopy => "passive energy per copy of n identical cells",
            Experiment::Qsl => "speed limits of a driven qubit",
            Experiment::ChargeXxz => "charging an XXZ spin chain",
            Experiment::ChargeLmg => "charging an all-to-all (LMG) spin battery",
            Experiment::ChargeDicke => "charging N atoms through one cavity",
            Experiment::Advantage => "collective charging speed-up over parallel cavities",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Experiment::Maser => MASER,
            Experiment::BoxCarnot => BOX_CARNOT,
            Experiment::Otto => OTTO,
            Experiment::OttoSqueezed => OTTO_SQUEEZED,
            Experiment::OttoNumeric => OTTO_NUMERIC,
            Experiment::TwoStroke => TWO_STROKE,
            Experiment::Ctm => CTM,
            Experiment::StaErmakov => STA_ERMAKOV,
            Experiment::StaCd => STA_CD,
            Experiment::Outcoupled => OUTCOUPLED,
            Experiment::Qfi => QFI,
            Experiment::Thermometry => THERMOMETRY,
            Experiment::Magnetometry => MAGNETOMETRY,
            Experiment::Ergotropy => ERGOTROPY,
            Experiment::NCopy => N_COPY,
            Experiment::Qsl => QSL,
            Experiment::ChargeXxz => CHARGE_XXZ,
            Experiment::ChargeLmg => CHARGE_LMG,
            Experiment::ChargeDicke => CHARGE_DICKE,
            Experiment::Advantage => ADVANTAGE,
        }
    }

    pub fn param(self, key: &str) -> Option<&'static ParamSpec> {
        self.params().iter().find(|s| s.key == key)
    }

    /// Orderings between parameters that the models require.
    pub fn relations(self) -> &'static [Relation] {
        const MASER_REL: &[Relation] = &[
            gt("omega_h", "omega_c"),
            Relation {
                greater: "t_h",
                lesser: "t_c",
                strict: false,
            },
        ];
        const BOX_REL: &[Relation] = &[gt("l_a", "l_b")];
        const OTTO_REL: &[Relation] = &[gt("omega_a", "omega_b"), gt("t_h", "t_c")];
        const TWO_STROKE_REL: &[Relation] = &[gt("omega_k", "omega_un"), gt("t_h", "t_c")];
        const CTM_REL: &[Relation] = &[gt("t_h", "t_c")];
        const THERMO_REL: &[Relation] = &[gt("omega_h", "omega_c"), gt("t_h_to", "t_h_from")];
        const MAGNETO_REL: &[Relation] = &[
            gt("t_h", "t_c"),
            gt("omega_k_to", "omega_k_from"),
            gt("omega_k_from", "omega_un"),
        ];
        match self {
            Experiment::Maser => MASER_REL,
            Experiment::BoxCarnot => BOX_REL,
            Experiment::Otto | Experiment::OttoSqueezed | Experiment::OttoNumeric => OTTO_REL,
            Experiment::TwoStroke => TWO_STROKE_REL,
            Experiment::Ctm => CTM_REL,
            Experiment::Thermometry => THERMO_REL,
            Experiment::Magnetometry => MAGNETO_REL,
            _ => &[],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
