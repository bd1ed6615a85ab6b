use crate::construction::{BlockGeometry, Variant};
use crate::error::{invalid_argument, Result};

/// `1 / (16 e^4)`: constant in the excess-risk lower bound `≥ ε / (16 e^4)`.
pub const FLOOR_CONSTANT: f64 = 0.001_144_727_430_545_886_4;

/// `FLOOR_CONSTANT · ε` for a geometry.
pub fn lower_envelope(geometry: &BlockGeometry) -> f64 {
    FLOOR_CONSTANT * geometry.epsilon()
}

/// Finite-class bound on the expected uniform deviation over the reachable
/// class: `sqrt(2 (k ln(e n / k) + ln 2) / n)` when at most `(e n / k)^k`
/// hypotheses are reachable (multisets), `sqrt(2 (k ln(e n) + ln 2) / n)` for
/// sequences, whose `Σ_{j≤k} n^j ≤ (e n)^k` arguments can all be distinct.
pub fn upper_bound_uc(n: usize, k: usize, variant: Variant) -> Result<f64> {
    if k == 0 || n <= k {
        return Err(invalid_argument!(
            "upper bound requires n > k ≥ 1 (got n={n}, k={k})"
        ));
    }
    let (nf, kf) = (n as f64, k as f64);
    let log_class = match variant {
        Variant::OrderIndependent => kf * (1.0 + libm::log(nf / kf)),
        Variant::OrderDependent => kf * (1.0 + libm::log(nf)),
    };
    Ok(libm::sqrt(2.0 * (log_class + core::f64::consts::LN_2) / nf))
}
