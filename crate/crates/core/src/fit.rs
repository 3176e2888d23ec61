//! Straight-line least squares in log-log coordinates.

use crate::{Error, Result};

/// Fitted line `log y = slope·log x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero when only two points are fitted.
    pub stderr: f64,
    pub points: usize,
}

/// Ordinary least squares on `(ln x, ln y)` over the pairs with `x, y > 0`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::param("curve", "abscissa and ordinate lengths differ"));
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let m = pts.len();
    if m < 2 {
        return Err(Error::Degenerate(format!("{m} positive points, need at least 2")));
    }
    let mf = m as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if m > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (mf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LogLogFit {
        slope,
        intercept,
        stderr,
        points: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        let f = loglog_fit(&x, &y).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn zeros_are_skipped_and_degenerate_rejected() {
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 0.0]).is_err());
        assert!(loglog_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        let f = loglog_fit(&[1.0, 2.0, 4.0], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(f.points, 2);
        assert!((f.slope - 1.0).abs() < 1e-12);
    }
}
