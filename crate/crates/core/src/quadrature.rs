//! Tensor-product quadrature on rectangles with a fixed-order reduction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intrinsic_graph::{GraphDomain, GridData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Midpoint,
    GaussLegendre(usize),
}

/// `rule` applied on each of `nx × nt` equal sub-rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    pub rule: Rule,
    pub nx: usize,
    pub nt: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rule: Rule::GaussLegendre(4),
            nx: 64,
            nt: 64,
        }
    }
}

impl Quadrature {
    pub fn gauss(order: usize, nx: usize, nt: usize) -> Self {
        Quadrature {
            rule: Rule::GaussLegendre(order),
            nx,
            nt,
        }
    }

    pub fn midpoint(nx: usize, nt: usize) -> Self {
        Quadrature {
            rule: Rule::Midpoint,
            nx,
            nt,
        }
    }

    /// Sub-rectangles coincide with the cells of `grid`.
    pub fn aligned(grid: &GridData, order: usize) -> Self {
        Self::gauss(order, grid.nx - 1, grid.nt - 1)
    }

    fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.nt == 0 {
            return Err(Error::InvalidArgument("quadrature resolution must be positive".into()));
        }
        if let Rule::GaussLegendre(n) = self.rule {
            if !(1..=32).contains(&n) {
                return Err(Error::InvalidArgument(format!(
                    "Gauss-Legendre order {n} not in 1..=32"
                )));
            }
        }
        Ok(())
    }

    fn reference(&self) -> Vec<(f64, f64)> {
        match self.rule {
            Rule::Midpoint => vec![(0.5, 1.0)],
            Rule::GaussLegendre(n) => gauss_legendre(n)
                .into_iter()
                .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect(),
        }
    }

    /// Nodes `(x, t, weight)` in a fixed order; weights sum to `|D|`.
    pub fn nodes(&self, d: &GraphDomain) -> Result<Vec<(f64, f64, f64)>> {
        self.validate()?;
        let r = self.reference();
        let hx = (d.x1 - d.x0) / self.nx as f64;
        let ht = (d.t1 - d.t0) / self.nt as f64;
        let mut out = Vec::with_capacity(self.nx * self.nt * r.len() * r.len());
        for i in 0..self.nx {
            for j in 0..self.nt {
                for &(sx, wx) in &r {
                    for &(st, wt) in &r {
                        out.push((
                            d.x0 + (i as f64 + sx) * hx,
                            d.t0 + (j as f64 + st) * ht,
                            wx * wt * hx * ht,
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `∫_D integrand`; node evaluation may run in parallel, the sum is
    /// pairwise in node order so the result does not depend on thread count.
    pub fn integrate<F>(&self, d: &GraphDomain, integrand: F) -> Result<f64>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let nodes = self.nodes(d)?;
        let values: Vec<f64> = nodes
            .par_iter()
            .map(|&(x, t, w)| integrand(x, t).map(|v| v * w))
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&values))
    }
}

pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_and_exactness() {
        for n in 1..=10 {
            let r = gauss_legendre(n);
            let s: f64 = r.iter().map(|p| p.1).sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}");
            // exact for degree 2n - 1
            let deg = 2 * n - 1;
            let q: f64 = r.iter().map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n = {n}");
        }
        assert_eq!(gauss_legendre(1), vec![(0.0, 2.0)]);
    }

    #[test]
    fn weights_sum_to_area() {
        let d = GraphDomain::new(-1.0, 2.0, 0.5, 1.5).unwrap();
        for q in [Quadrature::midpoint(7, 3), Quadrature::gauss(3, 4, 5)] {
            let s: f64 = q.nodes(&d).unwrap().iter().map(|n| n.2).sum();
            assert!((s - 3.0).abs() < 1e-13);
            assert!(q.nodes(&d).unwrap().iter().all(|n| n.2 > 0.0));
        }
        assert!(Quadrature::gauss(0, 1, 1).nodes(&d).is_err());
        assert!(Quadrature::midpoint(0, 1).nodes(&d).is_err());
    }

    #[test]
    fn integrates_polynomials() {
        let d = GraphDomain::unit();
        let v = Quadrature::gauss(4, 2, 2)
            .integrate(&d, |x, t| Ok(x.powi(5) * t.powi(3)))
            .unwrap();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
    }
}
