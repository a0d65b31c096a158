//! Finite-difference stencils on uniformly spaced samples.

/// First derivative at sample `i`: fourth-order central where five points
/// are available, second-order central next to the ends, `None` at the ends.
pub(crate) fn d1<const N: usize>(v: &[[f64; N]], i: usize, h: f64) -> Option<[f64; N]> {
    let n = v.len();
    let mut out = [0.0; N];
    if i >= 2 && i + 2 < n {
        for k in 0..N {
            out[k] = (-v[i + 2][k] + 8.0 * v[i + 1][k] - 8.0 * v[i - 1][k] + v[i - 2][k]) / (12.0 * h);
        }
        Some(out)
    } else if i >= 1 && i + 1 < n {
        for k in 0..N {
            out[k] = (v[i + 1][k] - v[i - 1][k]) / (2.0 * h);
        }
        Some(out)
    } else {
        None
    }
}

/// Fourth-order central first derivative; `None` within two samples of an end.
pub(crate) fn d1_fourth<const N: usize>(v: &[[f64; N]], i: usize, h: f64) -> Option<[f64; N]> {
    if i >= 2 && i + 2 < v.len() {
        d1(v, i, h)
    } else {
        None
    }
}

/// Three-point central first and second derivatives at interior sample `i`.
pub(crate) fn central<const N: usize>(v: &[[f64; N]], i: usize, h: f64) -> ([f64; N], [f64; N]) {
    let mut d = [0.0; N];
    let mut dd = [0.0; N];
    for k in 0..N {
        d[k] = (v[i + 1][k] - v[i - 1][k]) / (2.0 * h);
        dd[k] = (v[i + 1][k] - 2.0 * v[i][k] + v[i - 1][k]) / (h * h);
    }
    (d, dd)
}

/// Second-order derivative of scalar samples, one-sided at the ends.
pub(crate) fn derivative(v: &[f64], i: usize, h: f64) -> f64 {
    let n = v.len();
    if i == 0 {
        (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    } else if i + 1 == n {
        (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
    } else {
        (v[i + 1] - v[i - 1]) / (2.0 * h)
    }
}

/// Centered moving average over `window` samples (odd), shrinking at the ends.
pub(crate) fn moving_average(v: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..v.len())
        .map(|i| {
            let r = half.min(i).min(v.len() - 1 - i);
            let s = &v[i - r..=i + r];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_on_polynomials() {
        let h = 0.1;
        let v: Vec<[f64; 1]> = (0..7).map(|i| [(i as f64 * h).powi(4)]).collect();
        let x: f64 = 0.3;
        assert!((d1(&v, 3, h).unwrap()[0] - 4.0 * x.powi(3)).abs() < 1e-12);
        assert!(d1(&v, 0, h).is_none());
        let q: Vec<[f64; 1]> = (0..3).map(|i| [(i as f64 * h).powi(2)]).collect();
        let (d, dd) = central(&q, 1, h);
        assert!((d[0] - 0.2).abs() < 1e-12 && (dd[0] - 2.0).abs() < 1e-12);
        let s: Vec<f64> = (0..4).map(|i| (i as f64 * h).powi(2)).collect();
        assert!((derivative(&s, 0, h)).abs() < 1e-12);
        assert!((derivative(&s, 3, h) - 0.6).abs() < 1e-12);
        assert_eq!(moving_average(&[1.0, 2.0, 3.0, 10.0], 3), vec![1.0, 2.0, 5.0, 10.0]);
    }
}
