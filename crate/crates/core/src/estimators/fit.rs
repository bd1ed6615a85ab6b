use alloc::vec::Vec;

use crate::construction::Variant;
use crate::error::{invalid_argument, Result};

/// Ordinary least-squares line through `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the ordinates have no spread.
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(invalid_argument!(
            "a rate-law fit needs at least 3 points (got {})",
            points.len()
        ));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid_argument!("fit points must be finite"));
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let scale_x: f64 = points.iter().map(|p| p.0 * p.0).sum::<f64>();
    if sxx <= 1e-24 * (1.0 + scale_x) {
        return Err(invalid_argument!(
            "all abscissas are equal; the slope is undefined"
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let scale_y: f64 = points.iter().map(|p| p.1 * p.1).sum::<f64>();
    let r_squared = if ss_tot <= 1e-24 * (1.0 + scale_y) {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// Fits `rate^2 · n / k` against `log2(n/k)` (order-independent) or
/// `log2(n)` (order-dependent).
///
/// Under a `sqrt(k log(n/k) / n)` law the ordinate grows linearly in the
/// abscissa; under a log-free `sqrt(k / n)` law it is flat.
pub fn fit_rate_law(points: &[(usize, usize, f64)], variant: Variant) -> Result<FitResult> {
    let mut xy = Vec::with_capacity(points.len());
    for &(n, k, rate) in points {
        if n == 0 || k == 0 {
            return Err(invalid_argument!("fit point has n={n}, k={k}"));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid_argument!(
                "rates must be positive (got {rate} at n={n}, k={k})"
            ));
        }
        let (nf, kf) = (n as f64, k as f64);
        let x = match variant {
            Variant::OrderIndependent => libm::log2(nf / kf),
            Variant::OrderDependent => libm::log2(nf),
        };
        xy.push((x, rate * rate * nf / kf));
    }
    fit_line(&xy)
}
