//! Ordinary least squares on a line.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Residual sum of squares.
    pub rss: T,
    /// Standard error of the slope (zero with fewer than three points).
    pub slope_se: T,
}

pub fn linear_fit<T: Real>(pts: &[(T, T)]) -> LinearFit<T> {
    let k = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1).sum::<T>() / k;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let rss: T = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let slope_se = if pts.len() > 2 && sxx > T::zero() {
        (rss / T::from_usize_lossy(pts.len() - 2) / sxx).sqrt()
    } else {
        T::zero()
    };
    LinearFit {
        slope,
        intercept,
        rss,
        slope_se,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit::<f64>(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.rss < 1e-24 && f.slope_se < 1e-12);
    }

    #[test]
    fn noisy_line_has_error() {
        let f = linear_fit(&[(0.0, 0.0), (1.0, 1.5), (2.0, 1.5), (3.0, 3.0)]);
        assert!(f.slope_se > 0.0);
    }
}
