//! Gauss–Legendre rules on the unit interval.

use serde::{Deserialize, Serialize};

/// Composite Gauss–Legendre rule; one rule per panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "QuadratureOrder", into = "QuadratureOrder")]
pub struct QuadratureSpec {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct QuadratureOrder {
    order: usize,
}

impl From<QuadratureOrder> for QuadratureSpec {
    fn from(o: QuadratureOrder) -> Self {
        QuadratureSpec::new(o.order)
    }
}

impl From<QuadratureSpec> for QuadratureOrder {
    fn from(q: QuadratureSpec) -> Self {
        QuadratureOrder { order: q.order }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(5)
    }
}

impl QuadratureSpec {
    /// `order` points per panel; orders below 1 are raised to 1.
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre_unit(order.max(1));
        Self { order: order.max(1), nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in `(0, 1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ g` over `[a, b]` with one panel.
    pub fn integrate(&self, a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * g(a + s * h))
            .sum::<f64>()
            * h
    }
}

/// Nodes and weights of the `n`-point rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
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
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
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
    fn five_point_rule_matches_tabulated_values() {
        let q = QuadratureSpec::default();
        let x = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
        let w = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];
        for (k, (&xi, &wi)) in x.iter().zip(&w).enumerate() {
            let node = 0.5 * (1.0 + xi);
            assert!(q.nodes().iter().any(|&n| (n - node).abs() < 1e-15), "node {k}");
            let idx = q.nodes().iter().position(|&n| (n - node).abs() < 1e-15).unwrap();
            assert!((q.weights()[idx] - 0.5 * wi).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in 1..12 {
            let q = QuadratureSpec::new(n);
            for deg in 0..2 * n {
                let got = q.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }
}
