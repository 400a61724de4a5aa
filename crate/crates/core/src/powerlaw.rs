//! Power-law fitting of degree distributions.
//!
//! Click graph degree histograms tend to follow y = A * x^-B over several
//! orders of magnitude. The fit is ordinary least squares on the log-log
//! points: ln y = ln A - B ln x.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("need at least 3 points with positive x and y, got {usable}")]
    TooFewPoints { usable: usize },
    #[error("all points share the same x; the slope is undetermined")]
    DegenerateX,
}

/// Fit of y = amplitude * x^-exponent, with the goodness of the
/// underlying log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Histogram of a degree vector: (degree, count) sorted by degree,
/// zero degrees excluded since they cannot appear on a log axis.
pub fn degree_histogram(degrees: &[u32]) -> Vec<(u32, u64)> {
    let mut sorted: Vec<u32> = degrees.iter().copied().filter(|&d| d > 0).collect();
    sorted.sort_unstable();
    let mut hist: Vec<(u32, u64)> = Vec::new();
    for d in sorted {
        match hist.last_mut() {
            Some((last, count)) if *last == d => *count += 1,
            _ => hist.push((d, 1)),
        }
    }
    hist
}

/// Least-squares fit in log-log space. Points with non-positive x or y
/// are skipped; at least three usable points with distinct x are
/// required. `r_squared` is reported for the log-log line and is 1.0
/// for an exact fit, including the degenerate all-ys-equal case.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, FitError> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(FitError::TooFewPoints { usable: logs.len() });
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mean_x) * (y - mean_y)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = logs.iter().map(|&(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(PowerLawFit { amplitude: intercept.exp(), exponent: -slope, r_squared })
}
