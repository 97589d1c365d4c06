//! Distribution functions used by the tests.
//!
//! Chi-square, Student t, F and the normal are delegated to `statrs`. The
//! Kolmogorov limiting distribution and the studentized range are computed
//! here.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, StudentsT};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Two-sided p-value for a standard normal deviate.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() * FRAC_1_SQRT_2).min(1.0)
}

pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    StudentsT::new(0.0, 1.0, df)
        .map(|d| 2.0 * d.sf(t.abs()))
        .unwrap_or(f64::NAN)
        .min(1.0)
}

pub fn f_sf(f: f64, df1: f64, df2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(df1, df2)
        .map(|d| d.sf(f))
        .unwrap_or(f64::NAN)
}

/// Survival function of the Kolmogorov limiting distribution, P(K > lambda).
///
/// Series are truncated once a term drops below 1e-12.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    const EPS: f64 = 1e-12;
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series for the CDF converges fast for small lambda.
        let mut cdf = 0.0;
        let c = PI * PI / (8.0 * lambda * lambda);
        for j in 1..200 {
            let odd = (2 * j - 1) as f64;
            let term = (-odd * odd * c).exp();
            cdf += term;
            if term < EPS {
                break;
            }
        }
        let cdf = (2.0 * PI).sqrt() / lambda * cdf;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for j in 1..200 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * lambda * lambda).exp();
            sum += if j % 2 == 1 { term } else { -term };
            if term < EPS {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth - 1) + recurse(f, mid, b, 0.5 * tol, depth - 1)
    }
    recurse(f, a, b, tol, 30)
}

/// CDF of the range of `k` independent standard normals.
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let kf = k as f64;
    let integrand = |z: f64| {
        let inner = normal_cdf(z) - normal_cdf(z - w);
        if inner <= 0.0 {
            0.0
        } else {
            normal_pdf(z) * inner.powi(k as i32 - 1)
        }
    };
    // The integrand is supported where both z and z - w are within the
    // normal bulk; splitting at the peak keeps the adaptive rule honest.
    let lo = -8.5;
    let hi = 8.5 + w.min(8.5);
    let peak = 0.5 * w;
    let value = integrate(&integrand, lo, peak, 1e-11) + integrate(&integrand, peak, hi, 1e-11);
    (kf * value).clamp(0.0, 1.0)
}

/// CDF of the studentized range distribution with `k` means and `df` error
/// degrees of freedom. `df = f64::INFINITY` gives the normal-range limit.
pub fn ptukey(q: f64, k: usize, df: f64) -> f64 {
    assert!(k >= 2, "studentized range needs at least two groups");
    if q <= 0.0 {
        return 0.0;
    }
    if !df.is_finite() {
        return normal_range_cdf(q, k);
    }
    // S = sqrt(chi2_df / df) has density c * s^(df-1) * exp(-df s^2 / 2).
    let half = 0.5 * df;
    let ln_c = half * df.ln() - ln_gamma(half) - (half - 1.0) * std::f64::consts::LN_2;
    let density = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            (ln_c + (df - 1.0) * s.ln() - half * s * s).exp()
        }
    };
    let mean_s = (2.0 / df).sqrt() * (ln_gamma(0.5 * (df + 1.0)) - ln_gamma(half)).exp();
    let sd_s = (1.0 - mean_s * mean_s).max(0.0).sqrt().max(1e-6);
    let lo = (mean_s - 12.0 * sd_s).max(0.0);
    let hi = mean_s + 12.0 * sd_s + if df < 3.0 { 6.0 } else { 0.0 };
    let integrand = |s: f64| density(s) * normal_range_cdf(q * s, k);
    let mid = mean_s.clamp(lo, hi);
    let value = integrate(&integrand, lo, mid, 1e-9) + integrate(&integrand, mid, hi, 1e-9);
    value.clamp(0.0, 1.0)
}

/// Upper-tail probability of the studentized range.
pub fn ptukey_sf(q: f64, k: usize, df: f64) -> f64 {
    (1.0 - ptukey(q, k, df)).clamp(0.0, 1.0)
}

/// Quantile of the studentized range distribution, by bisection.
pub fn qtukey(p: f64, k: usize, df: f64) -> f64 {
    assert!((0.0..1.0).contains(&p), "probability must lie in [0, 1)");
    let (mut lo, mut hi) = (0.0, 1.0);
    while ptukey(hi, k, df) < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ptukey(mid, k, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    0.5 * (lo + hi)
}
