//! Validation statistics: the pooled two-sample t test over per-leaf times
//! (leaves as a proxy for wall-clock cost) and the profile histograms of
//! per-problem leaf-count ratios.

use std::fmt;

/// One timed run of a whole problem set under one heuristic.
#[derive(Clone, PartialEq, Debug)]
pub struct TimingSample {
    pub heuristic_label: String,
    pub run_index: u32,
    pub total_leaves: u64,
    /// Seconds.
    pub total_time: f64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct MeansTestResult {
    /// Mean seconds per leaf, old heuristic.
    pub mean_tau_o: f64,
    /// Mean seconds per leaf, new heuristic.
    pub mean_tau_n: f64,
    pub pooled_sp: f64,
    pub t_quantile: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
    pub degrees_of_freedom: u32,
    pub contains_zero: bool,
}

impl MeansTestResult {
    /// CSV rows `stat,value`.
    pub fn to_csv(&self) -> String {
        format!(
            "stat,value\n\
             mean_tau_o,{}\n\
             mean_tau_n,{}\n\
             pooled_sp,{}\n\
             t_quantile,{}\n\
             ci_low,{}\n\
             ci_high,{}\n\
             alpha,{}\n\
             degrees_of_freedom,{}\n\
             contains_zero,{}\n",
            self.mean_tau_o,
            self.mean_tau_n,
            self.pooled_sp,
            self.t_quantile,
            self.ci_low,
            self.ci_high,
            self.alpha,
            self.degrees_of_freedom,
            self.contains_zero
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StatsError {
    /// Both groups have identical values and the difference is zero; the
    /// interval degenerates to the point 0.
    DegenerateVariance,
    EmptyInput,
    BadArgument(String),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::DegenerateVariance => {
                write!(f, "all normalized times identical; interval is the point 0")
            }
            StatsError::EmptyInput => write!(f, "empty input"),
            StatsError::BadArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for StatsError {}

/// Pooled two-sample difference-of-means test over per-leaf times.
///
/// Each run's time is normalized by that heuristic's (fixed) leaf total:
/// τ = T / L. The two-sided confidence interval at level `alpha` is
/// `(τ̄_o − τ̄_n) ± t_{α/2, n_o+n_n−2} · S_p · √(1/n_o + 1/n_n)`.
pub fn difference_of_means(
    times_o: &[f64],
    times_n: &[f64],
    leaves_o: u64,
    leaves_n: u64,
    alpha: f64,
) -> Result<MeansTestResult, StatsError> {
    if times_o.len() < 2 || times_n.len() < 2 {
        return Err(StatsError::BadArgument(
            "need at least two runs per group".into(),
        ));
    }
    if leaves_o == 0 || leaves_n == 0 {
        return Err(StatsError::BadArgument("leaf totals must be positive".into()));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(StatsError::BadArgument("alpha must be in (0,1)".into()));
    }
    let tau_o: Vec<f64> = times_o.iter().map(|t| t / leaves_o as f64).collect();
    let tau_n: Vec<f64> = times_n.iter().map(|t| t / leaves_n as f64).collect();
    let n_o = tau_o.len() as f64;
    let n_n = tau_n.len() as f64;
    let mean_o = tau_o.iter().sum::<f64>() / n_o;
    let mean_n = tau_n.iter().sum::<f64>() / n_n;
    let var_o = tau_o.iter().map(|t| (t - mean_o).powi(2)).sum::<f64>() / (n_o - 1.0);
    let var_n = tau_n.iter().map(|t| (t - mean_n).powi(2)).sum::<f64>() / (n_n - 1.0);
    let df = tau_o.len() + tau_n.len() - 2;
    let pooled_sp = (((n_o - 1.0) * var_o + (n_n - 1.0) * var_n) / df as f64).sqrt();
    let diff = mean_o - mean_n;
    if pooled_sp == 0.0 && diff == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t_quantile = student_t_quantile(1.0 - alpha / 2.0, df as u32);
    let margin = t_quantile * pooled_sp * (1.0 / n_o + 1.0 / n_n).sqrt();
    let ci_low = diff - margin;
    let ci_high = diff + margin;
    Ok(MeansTestResult {
        mean_tau_o: mean_o,
        mean_tau_n: mean_n,
        pooled_sp,
        t_quantile,
        ci_low,
        ci_high,
        alpha,
        degrees_of_freedom: df as u32,
        contains_zero: ci_low <= 0.0 && 0.0 <= ci_high,
    })
}

/// Inverse CDF of the Student t distribution, computed by bisection on the
/// regularized incomplete beta representation of the CDF. Absolute error is
/// well below 1e-9.
pub fn student_t_quantile(p: f64, df: u32) -> f64 {
    assert!(0.0 < p && p < 1.0, "p must be in (0,1)");
    assert!(df >= 1, "degrees of freedom must be positive");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, df);
    }
    let mut hi = 1.0f64;
    while t_cdf(hi, df) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn t_cdf(t: f64, df: u32) -> f64 {
    let v = df as f64;
    let x = v / (v + t * t);
    let ib = regularized_incomplete_beta(v / 2.0, 0.5, x);
    if t >= 0.0 {
        1.0 - 0.5 * ib
    } else {
        0.5 * ib
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7.
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta I_x(a, b) via the standard continued
/// fraction.
fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Histogram of per-problem performance ratios `100 · tl_new / tl_old`,
/// over the x-range [0, 300] percent. Ratios beyond the range accumulate in
/// the last bin so counts are conserved.
#[derive(Clone, PartialEq, Debug)]
pub struct ProfileHistogram {
    pub bin_width_pct: f64,
    pub bins: Vec<u64>,
    /// Bin counts divided by the maximum count.
    pub normalized: Vec<f64>,
}

impl ProfileHistogram {
    pub fn total_count(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// CSV rows `bin_low_pct,count,normalized`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low_pct,count,normalized\n");
        for (i, (&count, &normalized)) in self.bins.iter().zip(&self.normalized).enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                i as f64 * self.bin_width_pct,
                count,
                normalized
            ));
        }
        out
    }
}

pub fn profile_histogram(
    pairs: &[(u64, u64)],
    bin_width_pct: f64,
) -> Result<ProfileHistogram, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if !(bin_width_pct > 0.0) {
        return Err(StatsError::BadArgument("bin width must be positive".into()));
    }
    if pairs.iter().any(|&(old, new)| old == 0 || new == 0) {
        return Err(StatsError::BadArgument("leaf counts must be positive".into()));
    }
    let bin_count = ((300.0 / bin_width_pct).floor() as usize).max(1);
    let mut bins = vec![0u64; bin_count];
    for &(old, new) in pairs {
        let ratio = 100.0 * new as f64 / old as f64;
        let idx = ((ratio / bin_width_pct).floor() as usize).min(bin_count - 1);
        bins[idx] += 1;
    }
    let max = *bins.iter().max().expect("nonempty bins") as f64;
    let normalized = bins.iter().map(|&c| c as f64 / max).collect();
    Ok(ProfileHistogram {
        bin_width_pct,
        bins,
        normalized,
    })
}
