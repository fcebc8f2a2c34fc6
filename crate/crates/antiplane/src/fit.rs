//! Log-log least-squares rate fitting for decay studies.

/// Least-squares fit of `log(y) = intercept + slope * log(x)`.
///
/// Points with nonpositive coordinates are skipped. Returns `None` when
/// fewer than two usable points remain.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &pts {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LogLogFit {
        slope,
        intercept: mean_y - slope * mean_x,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl LogLogFit {
    /// Prefactor `exp(intercept)` of the fitted power law.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}
