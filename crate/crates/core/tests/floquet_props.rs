use proptest::prelude::*;
use qtherm::floquet::{
    ctm_currents, sideband_weights, sideband_weights_auto, CtmConfig, Mode, PeriodicModulation,
    Waveform,
};

fn waveform(kind: u8, amp: f64, frac: f64) -> Waveform {
    match kind % 3 {
        0 => Waveform::Constant,
        1 => Waveform::Sinusoidal { amplitude: amp },
        _ => Waveform::PiecewiseAsymmetric {
            up_fraction: frac,
            amplitude: amp,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sideband_weights_sum_to_one(kind in 0u8..3, ratio in 0.0f64..5.0, frac in 0.1f64..0.9, omega in 0.5f64..3.0) {
        let m = PeriodicModulation::new(10.0, waveform(kind, ratio * omega, frac), omega).unwrap();
        let w = sideband_weights_auto(&m, 40, 1e-8).unwrap();
        prop_assert!(w.total() >= 1.0 - 1e-8 && w.total() <= 1.0 + 1e-10);
        prop_assert!(w.iter().all(|(_, p)| p >= 0.0));
    }

    #[test]
    fn ctm_obeys_both_laws(kind in 1u8..3, ratio in 0.0f64..3.0, frac in 0.2f64..0.8, omega in 0.2f64..9.0,
                           t_c in 0.3f64..2.0, dt in 0.2f64..6.0) {
        let t_h = t_c + dt;
        let m = PeriodicModulation::new(10.0, waveform(kind, ratio * omega, frac), omega).unwrap();
        let cfg = CtmConfig::separated(m, t_h, t_c, 1.0, 40).unwrap();
        let rep = ctm_currents(&cfg, 40).unwrap();
        let scale = rep.j_h.abs() + rep.j_c.abs() + rep.power.abs();
        prop_assert!((rep.j_h + rep.j_c + rep.power).abs() <= 1e-9 * (scale + 1e-300));
        prop_assert!(rep.second_law(t_h, t_c) <= 1e-9);
        if rep.mode == Mode::Engine {
            prop_assert!(rep.efficiency_or_cop.unwrap() <= 1.0 - t_c / t_h + 1e-9);
        }
    }
}

#[test]
fn sinusoidal_weights_are_bessel_squares() {
    // J_m(x) by its integral representation, an oracle independent of the
    // closed-form phase coefficients
    let bessel = |m: i64, x: f64| {
        let n = 20000;
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| (m as f64 * t - x * t.sin()).cos();
        let mut s = f(0.0) + f(std::f64::consts::PI);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0 / std::f64::consts::PI
    };
    for &(lam, omega) in &[(0.5, 1.0), (2.0, 1.3), (5.0, 1.0)] {
        let m =
            PeriodicModulation::new(10.0, Waveform::Sinusoidal { amplitude: lam }, omega).unwrap();
        let w = sideband_weights(&m, 40).unwrap();
        for k in -8i64..=8 {
            let j = bessel(k, lam / omega);
            assert!((w.get(k) - j * j).abs() < 1e-8, "m = {k}");
        }
    }
}

#[test]
fn square_pulse_tail_falls_as_fourth_power() {
    // kinked phase: P_m ∝ m⁻⁴, so the missing weight at fixed m_max grows
    // with the square of a small swing
    let missing = |ratio: f64, m_max: usize| {
        let m = PeriodicModulation::new(
            10.0,
            Waveform::PiecewiseAsymmetric {
                up_fraction: 0.3,
                amplitude: ratio,
            },
            1.0,
        )
        .unwrap();
        1.0 - sideband_weights(&m, m_max).unwrap().total()
    };
    let (a, b) = (missing(0.1, 40), missing(0.2, 40));
    assert!((b / a - 4.0).abs() < 0.05, "{}", b / a);
    // doubling m_max cuts a Σ m⁻⁴ tail by about 8
    let ratio = missing(0.5, 40) / missing(0.5, 80);
    assert!((ratio - 8.0).abs() < 0.8, "{ratio}");
}
