use crate::error::{Error, Result};

const BISECTION_WIDTH: f64 = 1e-13;

/// The unique `t >= 0` with `Σ r_i^t = 1`, by bisection.
pub fn moran_solve(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::InvalidInput("moran_solve needs at least one ratio".into()));
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidInput(format!("ratios must lie in (0, 1), got {r}")));
    }
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let sum = |t: f64| ratios.iter().map(|r| r.powf(t)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = 2.0 * ratios.len() as f64;
    // ratios close to 1 push the root far out
    while sum(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_WIDTH * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if sum(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
