//! Threshold extraction by finite-size scaling.
//!
//! Failure-rate curves for different code distances cross at the threshold.
//! Near the crossing each curve collapses onto the universal quadratic
//! `p_fail = A + B u + C u^2` with `u = (x - x_c) d^{1/nu}`; the fit searches
//! `(x_c, nu)` by nested grid refinement with the polynomial coefficients
//! solved in closed form, and a parametric bootstrap provides the confidence
//! interval on the crossing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::TrialBatch;
use crate::rng::{Purpose, Stream};

/// Which noise parameter was swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DeltaDb,
    P0,
}

impl SweepAxis {
    pub fn token(&self) -> &'static str {
        match self {
            SweepAxis::DeltaDb => "delta_db",
            SweepAxis::P0 => "p0",
        }
    }
}

/// One data point of the sweep.
#[derive(Debug, Clone, Copy)]
pub struct FitPoint {
    pub d: usize,
    /// Swept parameter value.
    pub x: f64,
    pub p_fail: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl FitPoint {
    pub fn from_batch(axis: SweepAxis, b: &TrialBatch) -> FitPoint {
        let x = match axis {
            SweepAxis::DeltaDb => b.delta_db.unwrap_or(f64::INFINITY),
            SweepAxis::P0 => b.p0,
        };
        FitPoint {
            d: b.d,
            x,
            p_fail: b.p_fail,
            stderr: b.stderr,
            trials: b.trials,
        }
    }
}

/// Fitted crossing with its bootstrap interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub axis: SweepAxis,
    pub x_c: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub nu: f64,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub coeff_c: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub residual: f64,
    pub n_points: usize,
}

fn effective_sigma(p: &FitPoint) -> f64 {
    p.stderr.max(0.5 / p.trials as f64).max(1e-9)
}

/// Weighted least squares of `p = A + B u + C u^2` for fixed `(x_c, nu)`;
/// returns the coefficients and the weighted SSE.
fn poly_fit(points: &[FitPoint], x_c: f64, nu: f64) -> (f64, f64, f64, f64) {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for p in points {
        let u = (p.x - x_c) * (p.d as f64).powf(1.0 / nu);
        let w = 1.0 / effective_sigma(p).powi(2);
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += w * basis[i] * basis[j];
            }
            rhs[i] += w * basis[i] * p.p_fail;
        }
    }
    // 3x3 Gaussian elimination with partial pivoting.
    let mut a = [
        [m[0][0], m[0][1], m[0][2], rhs[0]],
        [m[1][0], m[1][1], m[1][2], rhs[1]],
        [m[2][0], m[2][1], m[2][2], rhs[2]],
    ];
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        if a[col][col].abs() < 1e-30 {
            return (0.0, 0.0, 0.0, f64::INFINITY);
        }
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let coeff = [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]];
    let mut sse = 0.0;
    for p in points {
        let u = (p.x - x_c) * (p.d as f64).powf(1.0 / nu);
        let w = 1.0 / effective_sigma(p).powi(2);
        let model = coeff[0] + coeff[1] * u + coeff[2] * u * u;
        sse += w * (model - p.p_fail).powi(2);
    }
    (coeff[0], coeff[1], coeff[2], sse)
}

fn grid_search(
    points: &[FitPoint],
    x_range: (f64, f64),
    nu_range: (f64, f64),
) -> (f64, f64, f64, f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut xlo, mut xhi) = x_range;
    let (mut nlo, mut nhi) = nu_range;
    for _round in 0..3 {
        for xi in 0..=40 {
            let x_c = xlo + (xhi - xlo) * xi as f64 / 40.0;
            for ni in 0..=20 {
                let nu = nlo + (nhi - nlo) * ni as f64 / 20.0;
                let (a, b, c, sse) = poly_fit(points, x_c, nu);
                if sse < best.0 {
                    best = (sse, x_c, nu, a, b, c);
                }
            }
        }
        // Shrink around the optimum for the next round.
        let xw = (xhi - xlo) / 8.0;
        let nw = (nhi - nlo) / 8.0;
        (xlo, xhi) = (best.1 - xw, best.1 + xw);
        (nlo, nhi) = ((best.2 - nw).max(0.3), best.2 + nw);
    }
    best
}

/// Weighted difference between the largest-d and smallest-d failure rates at
/// one sweep value; positive means bigger codes fail more.
fn size_trend(points: &[FitPoint], x: f64) -> Option<(f64, f64)> {
    let mut at_x: Vec<&FitPoint> = points.iter().filter(|p| p.x == x).collect();
    if at_x.len() < 2 {
        return None;
    }
    at_x.sort_by_key(|p| p.d);
    let lo = at_x.first().unwrap();
    let hi = at_x.last().unwrap();
    let diff = hi.p_fail - lo.p_fail;
    let sigma = (effective_sigma(hi).powi(2) + effective_sigma(lo).powi(2)).sqrt();
    Some((diff, sigma))
}

/// Fit the crossing of the batch family. Requires at least 3 distances and
/// 4 sweep values, and a visible inversion of the size ordering between the
/// sweep ends; otherwise reports `NoCrossing`.
pub fn fit_threshold(
    axis: SweepAxis,
    points: &[FitPoint],
    bootstrap_resamples: usize,
    seed: u64,
) -> Result<ThresholdEstimate> {
    let mut ds: Vec<usize> = points.iter().map(|p| p.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    if ds.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 distances, got {}",
            ds.len()
        )));
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 sweep points, got {}",
            xs.len()
        )));
    }
    let (x_min, x_max) = (xs[0], xs[xs.len() - 1]);

    // The size ordering must invert across the sweep with some significance.
    let lo_trend = size_trend(points, x_min).ok_or(Error::NoCrossing)?;
    let hi_trend = size_trend(points, x_max).ok_or(Error::NoCrossing)?;
    let significant =
        |t: (f64, f64)| -> f64 { if t.0.abs() > t.1 { t.0.signum() } else { 0.0 } };
    if significant(lo_trend) * significant(hi_trend) >= 0.0 {
        return Err(Error::NoCrossing);
    }

    let (sse, x_c, nu, a, b, c) = grid_search(points, (x_min, x_max), (0.5, 2.5));
    if !(x_min..=x_max).contains(&x_c) {
        return Err(Error::NoCrossing);
    }

    // Parametric bootstrap on the failure rates.
    let mut crossings = Vec::with_capacity(bootstrap_resamples);
    for r in 0..bootstrap_resamples {
        let mut stream = Stream::keyed(seed, Purpose::Bootstrap, r as u64, 0);
        let resampled: Vec<FitPoint> = points
            .iter()
            .map(|p| {
                let mut q = *p;
                q.p_fail = (p.p_fail + effective_sigma(p) * stream.standard_normal())
                    .clamp(0.0, 1.0);
                q
            })
            .collect();
        let (_, xc_r, _, _, _, _) = grid_search(&resampled, (x_min, x_max), (0.5, 2.5));
        crossings.push(xc_r.clamp(x_min, x_max));
    }
    crossings.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let pick = |q: f64| -> f64 {
        if crossings.is_empty() {
            x_c
        } else {
            let idx = ((crossings.len() - 1) as f64 * q).round() as usize;
            crossings[idx]
        }
    };

    Ok(ThresholdEstimate {
        axis,
        x_c,
        ci_low: pick(0.025),
        ci_high: pick(0.975),
        nu,
        coeff_a: a,
        coeff_b: b,
        coeff_c: c,
        residual: sse,
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Synthetic generator: known scaling law plus binomial-scale noise.
    fn synthetic(x_c: f64, nu: f64, noise_seed: u64) -> Vec<FitPoint> {
        let (a, b, c) = (0.12, 0.04, 0.004);
        let trials = 200_000u64;
        let mut out = Vec::new();
        let mut stream = Stream::keyed(noise_seed, Purpose::Test, 0, 0);
        for d in [3usize, 5, 7] {
            for i in 0..7 {
                let x = 10.0 + 0.2 * i as f64;
                let u = (x - x_c) * (d as f64).powf(1.0 / nu);
                let p = (a + b * u + c * u * u).clamp(0.0005, 0.9);
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                let observed = (p + sigma * stream.standard_normal()).clamp(0.0, 1.0);
                out.push(FitPoint {
                    d,
                    x,
                    p_fail: observed,
                    stderr: sigma,
                    trials,
                });
            }
        }
        out
    }

    #[test]
    fn recovers_synthetic_crossing() {
        let truth = 10.6;
        let points = synthetic(truth, 0.97, 4);
        let est = fit_threshold(SweepAxis::DeltaDb, &points, 120, 11).unwrap();
        assert!(
            (est.x_c - truth).abs() < 0.1,
            "x_c {} vs truth {truth}",
            est.x_c
        );
        assert!(est.ci_low <= est.x_c && est.x_c <= est.ci_high);
        assert!(
            est.ci_low <= truth && truth <= est.ci_high,
            "truth outside CI [{}, {}]",
            est.ci_low,
            est.ci_high
        );
    }

    #[test]
    fn flat_data_reports_no_crossing() {
        let mut points = Vec::new();
        for d in [3usize, 5, 7] {
            for i in 0..5 {
                points.push(FitPoint {
                    d,
                    x: 10.0 + i as f64 * 0.3,
                    p_fail: 0.2,
                    stderr: 0.004,
                    trials: 10_000,
                });
            }
        }
        assert!(matches!(
            fit_threshold(SweepAxis::DeltaDb, &points, 20, 1),
            Err(Error::NoCrossing)
        ));
    }

    #[test]
    fn input_validation() {
        let points = synthetic(10.5, 1.0, 9);
        let two_d: Vec<FitPoint> = points.iter().filter(|p| p.d < 7).copied().collect();
        assert!(matches!(
            fit_threshold(SweepAxis::DeltaDb, &two_d, 10, 1),
            Err(Error::InsufficientData(_))
        ));
        let three_x: Vec<FitPoint> = points.iter().filter(|p| p.x < 10.4).copied().collect();
        assert!(matches!(
            fit_threshold(SweepAxis::DeltaDb, &three_x, 10, 1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn estimate_serializes() {
        let points = synthetic(10.4, 1.1, 2);
        let est = fit_threshold(SweepAxis::DeltaDb, &points, 30, 5).unwrap();
        let json = serde_json::to_string(&est).unwrap();
        assert!(json.contains("\"axis\":\"delta_db\""));
        assert!(json.contains("x_c"));
    }
}
