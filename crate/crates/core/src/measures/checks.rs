//! Certificates on a [`MeasureSeries`]: the differential inequality, the
//! decay bound along a characteristic, and monotonicity in r.

use super::MeasureSeries;
use crate::material::DecayParameters;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("material: {0}")]
    Material(String),
    #[error("time weight exp(lambda*t) overflows: lambda = {lambda}, t = {horizon}")]
    WeightOverflow { lambda: f64, horizon: f64 },
    #[error("infeasible window: t0 = {t0}, r0 = {r0} need L <= zeta*t0 + r0 <= zeta*T (L = {length}, zeta = {zeta}, T = {horizon})")]
    InfeasibleWindow {
        t0: f64,
        r0: f64,
        length: f64,
        zeta: f64,
        horizon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DiffViolation {
    pub r: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs, negative here.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DiffInequalityReport {
    pub samples: usize,
    /// Largest |E|, |(ζ/λ)∂E/∂r| or |∂E/∂t/λ| over the samples.
    pub scale: f64,
    pub tolerance: f64,
    /// Smallest (rhs − lhs)/scale seen.
    pub worst_margin: f64,
    pub violations: Vec<DiffViolation>,
}

impl DiffInequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// E ≤ −(ζ/λ)∂E/∂r + (1/λ)∂E/∂t at every sample, up to `slack`·scale.
pub fn check_diff_inequality(series: &MeasureSeries, decay: &DecayParameters, slack: f64) -> DiffInequalityReport {
    let (lambda, zeta) = (decay.lambda, decay.zeta);
    let mut scale: f64 = 0.0;
    for ri in 0..series.r.len() {
        for n in 0..series.t.len() {
            scale = scale
                .max(series.e[ri][n].abs())
                .max((zeta / lambda * series.de_dr[ri][n]).abs())
                .max((series.de_dt[ri][n] / lambda).abs());
        }
    }
    let mut report = DiffInequalityReport {
        samples: series.r.len() * series.t.len(),
        scale,
        tolerance: slack,
        worst_margin: f64::INFINITY,
        violations: Vec::new(),
    };
    for (ri, &r) in series.r.iter().enumerate() {
        for (n, &t) in series.t.iter().enumerate() {
            let lhs = series.e[ri][n];
            let rhs = -zeta / lambda * series.de_dr[ri][n] + series.de_dt[ri][n] / lambda;
            let margin = rhs - lhs;
            if scale > 0.0 {
                report.worst_margin = report.worst_margin.min(margin / scale);
            }
            if margin < -slack * scale {
                report.violations.push(DiffViolation { r, t, lhs, rhs, margin });
            }
        }
    }
    if !report.worst_margin.is_finite() {
        report.worst_margin = 0.0;
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecaySample {
    pub r: f64,
    /// t(r) = t₀ + (r₀ − r)/ζ
    pub t: f64,
    pub e: f64,
    /// ln max(E, floor)
    pub log_e: f64,
    /// ln E(0, t(0)) − (λ/ζ)r
    pub log_bound: f64,
    /// E was at or below the floor; the bound holds trivially.
    pub floored: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayReport {
    pub lambda: f64,
    pub zeta: f64,
    pub t0: f64,
    pub r0: f64,
    pub samples: Vec<DecaySample>,
    pub violations: usize,
    /// Least-squares slope of ln E − ln E(0) through the origin.
    pub fitted_slope: Option<f64>,
    /// −λ/ζ
    pub predicted_slope: f64,
    pub slope_ok: bool,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.slope_ok
    }
}

/// E at time t on row `ri`, log-linear between the bracketing samples
/// (linear if either is zero).
fn interpolate(series: &MeasureSeries, ri: usize, t: f64) -> f64 {
    let ts = &series.t;
    let e = &series.e[ri];
    let last = ts.len() - 1;
    if t <= ts[0] {
        return e[0];
    }
    if t >= ts[last] {
        return e[last];
    }
    let hi = ts.partition_point(|&s| s < t);
    if ts[hi] == t {
        return e[hi];
    }
    let lo = hi - 1;
    let s = (t - ts[lo]) / (ts[hi] - ts[lo]);
    let (a, b) = (e[lo], e[hi]);
    if a > 0.0 && b > 0.0 {
        (a.ln() * (1.0 - s) + b.ln() * s).exp()
    } else {
        a * (1.0 - s) + b * s
    }
}

/// ln E(r, t(r)) ≤ ln E(0, t(0)) − (λ/ζ)r + ln(1 + slack) along the
/// characteristic, and the fitted slope against −λ/ζ.
pub fn check_decay(
    series: &MeasureSeries,
    decay: &DecayParameters,
    length: f64,
    horizon: f64,
    t0: f64,
    r0: f64,
    slack: f64,
    floor: f64,
) -> Result<DecayReport, MeasureError> {
    let zeta = decay.zeta;
    let s = zeta * t0 + r0;
    let eps = 1e-12 * s.abs().max(1.0);
    let feasible = (0.0..=horizon).contains(&t0)
        && (0.0..=length).contains(&r0)
        && length <= s + eps
        && s <= zeta * horizon + eps;
    if !feasible || series.r.is_empty() || series.t.is_empty() {
        return Err(MeasureError::InfeasibleWindow {
            t0,
            r0,
            length,
            zeta,
            horizon,
        });
    }
    let rate = decay.lambda / zeta;
    let t_of = |r: f64| (t0 + (r0 - r) / zeta).clamp(0.0, horizon);
    let e0 = interpolate(series, 0, t_of(series.r[0]));
    let log0 = e0.max(floor).ln();
    let tol = (1.0 + slack).ln();
    let mut samples = Vec::with_capacity(series.r.len());
    let (mut num, mut den) = (0.0, 0.0);
    for (ri, &r) in series.r.iter().enumerate() {
        let t = t_of(r);
        let e = interpolate(series, ri, t);
        let floored = e <= floor;
        let log_e = e.max(floor).ln();
        let log_bound = log0 - rate * (r - series.r[0]);
        let ok = floored || log_e <= log_bound + tol;
        if !floored && e0 > floor && r > series.r[0] {
            let dr = r - series.r[0];
            num += (log_e - log0) * dr;
            den += dr * dr;
        }
        samples.push(DecaySample {
            r,
            t,
            e,
            log_e,
            log_bound,
            floored,
            ok,
        });
    }
    let fitted_slope = (den > 0.0).then(|| num / den);
    let slope_tol = if den > 0.0 { tol * series.r.iter().map(|r| r - series.r[0]).sum::<f64>() / den } else { 0.0 };
    Ok(DecayReport {
        lambda: decay.lambda,
        zeta,
        t0,
        r0,
        violations: samples.iter().filter(|s| !s.ok).count(),
        samples,
        fitted_slope,
        predicted_slope: -rate,
        slope_ok: fitted_slope.map_or(true, |s| s <= -rate + slope_tol),
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MonotonicityReport {
    pub checked: usize,
    /// (r, t) pairs where E increased in r beyond the tolerance.
    pub violations: Vec<(f64, f64)>,
}

/// E(r, t) nonincreasing in r for every t, within `rel`·E(r₀, t).
pub fn check_monotonicity(series: &MeasureSeries, rel: f64) -> MonotonicityReport {
    let mut report = MonotonicityReport {
        checked: 0,
        violations: Vec::new(),
    };
    for n in 0..series.t.len() {
        let base = series.e.first().map_or(0.0, |row| row[n].abs());
        for ri in 1..series.r.len() {
            report.checked += 1;
            if series.e[ri][n] > series.e[ri - 1][n] + rel * base {
                report.violations.push((series.r[ri], series.t[n]));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(lambda: f64, zeta: f64) -> DecayParameters {
        DecayParameters {
            lambda,
            epsilon: 0.0,
            zeta,
            eps1: 1.0 / zeta,
            eps2: 1.0,
            decay_rate: lambda / zeta,
        }
    }

    /// E = e^{−r}·t on r ∈ [0,1], t ∈ [0,2] sampled coarsely.
    fn exponential_series() -> MeasureSeries {
        let r: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let t: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let mut s = MeasureSeries::zeros(1.0, 1.0, r.clone(), t.clone());
        for (ri, rv) in r.iter().enumerate() {
            for (n, tv) in t.iter().enumerate() {
                s.e[ri][n] = (-rv).exp() * (tv + 1.0);
                s.de_dr[ri][n] = -s.e[ri][n];
                s.de_dt[ri][n] = (-rv).exp();
            }
        }
        s
    }

    #[test]
    fn diff_inequality_margin() {
        let s = exponential_series();
        // rhs − lhs = e^{−r}(t+1)(ζ/λ − 1) + e^{−r}/λ ≥ 0 with ζ = λ
        let rep = check_diff_inequality(&s, &decay(1.0, 1.0), 0.0);
        assert!(rep.passed());
        // ζ/λ = 0.1 makes the first term dominate negatively.
        let rep = check_diff_inequality(&s, &decay(10.0, 1.0), 0.0);
        assert!(!rep.passed());
    }

    #[test]
    fn decay_equality_at_origin_and_infeasible() {
        let s = exponential_series();
        let d = decay(1.0, 1.0);
        let rep = check_decay(&s, &d, 1.0, 2.0, 1.0, 0.5, 0.0, 1e-300).unwrap();
        assert_eq!(rep.samples[0].log_e, rep.samples[0].log_bound);
        assert!(matches!(
            check_decay(&s, &d, 1.0, 2.0, 0.0, 0.5, 0.0, 1e-300),
            Err(MeasureError::InfeasibleWindow { .. })
        ));
    }

    #[test]
    fn log_linear_interpolation_exact_for_exponentials() {
        let mut s = MeasureSeries::zeros(1.0, 1.0, vec![0.0], vec![0.0, 1.0]);
        s.e[0] = vec![1.0, std::f64::consts::E];
        assert!((interpolate(&s, 0, 0.5) - 0.5f64.exp()).abs() < 1e-15);
        s.e[0] = vec![0.0, 2.0];
        assert_eq!(interpolate(&s, 0, 0.25), 0.5);
    }

    #[test]
    fn monotonicity_flags_increase() {
        let mut s = exponential_series();
        assert!(check_monotonicity(&s, 1e-12).violations.is_empty());
        s.e[3][4] = 10.0;
        assert_eq!(check_monotonicity(&s, 1e-12).violations, vec![(0.75, 1.0)]);
    }
}
