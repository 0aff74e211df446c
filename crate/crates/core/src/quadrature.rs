//! One-dimensional quadrature rules.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

/// Nodes and weights of an `n`-point rule on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    /// Gauss-Legendre: exact for polynomials of degree `2n - 1`.
    ///
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev guess `cos(π(i + 3/4)/(n + 1/2))`; computed in `f64`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        check_resolution(n)?;
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let derivative = legendre(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes[i] = T::lit(-x);
            nodes[n - 1 - i] = T::lit(x);
            weights[i] = T::lit(w);
            weights[n - 1 - i] = T::lit(w);
        }
        Ok(Self { nodes, weights })
    }

    /// Midpoint rule: `n` equal cells, one node at each centre.
    pub fn midpoint(n: usize) -> Result<Self> {
        check_resolution(n)?;
        let h = 2.0 / n as f64;
        Ok(Self {
            nodes: (0..n).map(|i| T::lit(-1.0 + h * (i as f64 + 0.5))).collect(),
            weights: vec![T::lit(h); n],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The nodes mapped affinely onto `[lo, hi]`, with rescaled weights.
    pub fn on_interval(&self, lo: T, hi: T) -> Vec<(T, T)> {
        let half = (hi - lo) / T::lit(2.0);
        let mid = (hi + lo) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, w * half))
            .collect()
    }

    /// `∫_lo^hi f` with a fallible integrand.
    pub fn integrate<F>(&self, lo: T, hi: T, mut f: F) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        let terms = self
            .on_interval(lo, hi)
            .into_iter()
            .map(|(x, w)| f(x).map(|y| w * y))
            .collect::<Result<Vec<T>>>()?;
        Ok(compensated_sum(terms))
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::QuadratureResolution(n));
    }
    Ok(())
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
