//! Reference computations for tests. Nothing here calls the library's own
//! quadrature or special functions.
#![allow(dead_code)]

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Integral over (0, upper] of a density-like integrand, taken in `y = ln x`
/// so that both the Levy tail and the essential singularity at 0 are cheap.
pub fn integrate_positive<F: Fn(f64) -> f64>(f: F, upper: f64, tol: f64) -> f64 {
    let g = |y: f64| {
        let x = y.exp();
        f(x) * x
    };
    let top = if upper.is_finite() { upper.ln() } else { 80.0 };
    // Split into unit pieces so the adaptive rule sees every feature.
    let bottom = -80.0;
    let mut total = 0.0;
    let mut lo = bottom;
    while lo < top {
        let hi = (lo + 1.0).min(top);
        total += simpson(&g, lo, hi, tol);
        lo = hi;
    }
    total
}

/// Closed form of the alpha = 3 Q-factor, via `u = t^2` and
/// `int 2t/(1+t^3) dt = -(2/3) ln(1+t) + (1/3) ln(t^2-t+1) + (2/sqrt 3) atan((2t-1)/sqrt 3)`.
pub fn q_factor_alpha3(r: f64, big_r: f64) -> f64 {
    let anti = |u: f64| {
        let t = u.sqrt();
        -(2.0 / 3.0) * (1.0 + t).ln()
            + (1.0 / 3.0) * (t * t - t + 1.0).ln()
            + (2.0 / 3f64.sqrt()) * ((2.0 * t - 1.0) / 3f64.sqrt()).atan()
    };
    anti(big_r) - anti(r)
}

/// Levy density written out independently of the library.
pub fn levy_pdf(i: f64, q: f64, agg: f64) -> f64 {
    let a = std::f64::consts::PI * q * agg;
    std::f64::consts::PI.sqrt() * q * agg / (2.0 * i.powf(1.5)) * (-a * a / (4.0 * i)).exp()
}

/// Reference erfc from statrs.
pub fn erfc_ref(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic KS critical value at significance `alpha` for effective size `n`.
pub fn ks_critical(alpha: f64, n: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / n.sqrt()
}

pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * p).round() as usize;
    sorted[idx]
}
