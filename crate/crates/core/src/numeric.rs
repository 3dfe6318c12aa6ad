//! Quadrature, root finding, 1-D optimization, ODE stepping and fits.

use crate::qcore::{c, hermitian_eig, CMat, Hermitian};

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let fc = f(m);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(m - x) + f(m + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (v, err) = gk15(&f, lo, hi);
        if err <= t || depth >= 40 {
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t, depth + 1));
            stack.push((mid, hi, 0.5 * t, depth + 1));
        }
    }
    total
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > xtol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// One fourth-order Magnus step of `i dU/dt = H(t) U` over `[t, t + dt]`.
pub fn magnus4_step(h: &impl Fn(f64) -> CMat, t: f64, dt: f64) -> CMat {
    let s = 3f64.sqrt() / 6.0;
    magnus4_from_samples(&h(t + (0.5 - s) * dt), &h(t + (0.5 + s) * dt), dt)
}

/// Magnus step from `H` sampled at the two Gauss points of `[t, t + dt]`.
pub fn magnus4_from_samples(h1: &CMat, h2: &CMat, dt: f64) -> CMat {
    // K = dt/2 (H1 + H2) − i √3 dt²/12 [H2, H1]; U = exp(−iK)
    let comm = h2 * h1 - h1 * h2;
    let k = (h1 + h2) * c(0.5 * dt, 0.0) + comm * c(0.0, -(3f64.sqrt()) * dt * dt / 12.0);
    hermitian_eig(&Hermitian::symmetrized(k)).propagator(1.0)
}

/// Propagator of `i dU/dt = H(t) U` from `t0` to `t1` with `steps` Magnus steps.
pub fn propagate(h: impl Fn(f64) -> CMat, t0: f64, t1: f64, steps: usize) -> CMat {
    let d = h(t0).nrows();
    let dt = (t1 - t0) / steps as f64;
    let mut u = CMat::identity(d, d);
    for k in 0..steps {
        u = magnus4_step(&h, t0 + k as f64 * dt, dt) * u;
    }
    u
}

/// Dormand–Prince 5(4) integration of `dy/dt = f(t, y)` for matrix-valued `y`
/// with a mixed absolute/relative error control.
pub fn rk45(f: impl Fn(f64, &CMat) -> CMat, y0: &CMat, t0: f64, t1: f64, tol: f64) -> CMat {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const CN: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut t = t0;
    let mut y = y0.clone();
    if t1 == t0 {
        return y;
    }
    let mut h = (t1 - t0) / 100.0;
    let mut k = vec![f(t, &y)];
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        k.truncate(1);
        for (i, row) in A.iter().enumerate() {
            let mut yi = y.clone();
            for (j, &a) in row.iter().enumerate().take(i + 1) {
                if a != 0.0 {
                    yi += &k[j] * c(h * a, 0.0);
                }
            }
            if i < 5 {
                k.push(f(t + CN[i] * h, &yi));
            } else {
                // FSAL: the last stage is evaluated at the proposed solution
                k.push(f(t + h, &yi));
                let mut err = CMat::zeros(y.nrows(), y.ncols());
                for (j, &e) in E.iter().enumerate() {
                    if e != 0.0 {
                        err += &k[j] * c(h * e, 0.0);
                    }
                }
                let scale = tol * (1.0 + yi.iter().fold(0.0f64, |m, z| m.max(z.norm())));
                let en = err.iter().fold(0.0f64, |m, z| m.max(z.norm())) / scale;
                if en <= 1.0 {
                    t += h;
                    y = yi;
                    let last = k.pop().unwrap();
                    k[0] = last;
                }
                let fac = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= fac;
            }
        }
    }
    y
}
