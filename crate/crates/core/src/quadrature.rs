//! Composite Gauss–Legendre quadrature on panel grids.
//!
//! Every integral in the crate goes through a [`PanelGrid`]: a sorted list of
//! panel edges with a fixed-order Gauss–Legendre rule on each panel. Sampled
//! functions live on the grid nodes, which also makes them piecewise
//! polynomials (barycentric interpolation within a panel).

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 64;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
}

fn rule(order: usize) -> &'static Rule {
    static RULES: [OnceLock<Rule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "Gauss-Legendre order {order} out of range"
    );
    RULES[order].get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let bary = nodes
            .iter()
            .enumerate()
            .map(|(j, &xj)| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, &xi)| xj - xi)
                    .product();
                1.0 / prod
            })
            .collect();
        Rule {
            nodes,
            weights,
            bary,
        }
    })
}

/// Reference Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn reference_rule(order: usize) -> (&'static [f64], &'static [f64]) {
    let r = rule(order);
    (&r.nodes, &r.weights)
}

/// Integrates `f` over `[a, b]` with one Gauss–Legendre panel.
pub fn gauss_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, order: usize) -> f64 {
    let r = rule(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integrates `f` over consecutive panels given by sorted `edges`.
pub fn integrate_edges<F: FnMut(f64) -> f64>(mut f: F, edges: &[f64], order: usize) -> f64 {
    edges
        .windows(2)
        .map(|e| gauss_panel(&mut f, e[0], e[1], order))
        .sum()
}

/// Panel edges covering `[a, b]` that break at every power of two and never
/// exceed `max_width`. Suited to integrands spanning many decades.
pub fn dyadic_edges(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    assert!(a >= 0.0 && b > a && max_width > 0.0);
    let mut breaks = vec![a];
    if a == 0.0 {
        // geometric refinement towards the origin
        let mut x = b.min(1.0);
        let mut small = Vec::new();
        while x > 1e-12 * b.min(1.0) && small.len() < 40 {
            small.push(x);
            x *= 0.5;
        }
        small.reverse();
        breaks.extend(small.into_iter().filter(|&x| x < b));
    }
    let mut p = if a > 0.0 {
        2f64.powi(a.log2().floor() as i32 + 1)
    } else {
        2.0
    };
    while p < b {
        if p > *breaks.last().unwrap() {
            breaks.push(p);
        }
        p *= 2.0;
    }
    breaks.push(b);
    let mut edges = Vec::with_capacity(breaks.len());
    edges.push(breaks[0]);
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for i in 1..=n {
            edges.push(if i == n {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * i as f64 / n as f64
            });
        }
    }
    edges.dedup();
    edges
}

/// Inserts extra breakpoints (inside `(edges[0], edges[last])`) into a sorted edge list.
pub fn with_breakpoints(mut edges: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    let (lo, hi) = (edges[0], *edges.last().unwrap());
    edges.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// `∫_s^∞ f(x) dx` through the substitution `x = e^u`, marching unit panels in
/// `u` until contributions become negligible.
pub fn integrate_log_tail<F: FnMut(f64) -> f64>(mut f: F, s: f64, order: usize) -> Result<f64> {
    assert!(s > 0.0);
    let mut u = s.ln();
    let mut total = 0.0;
    let mut quiet = 0;
    while u < 700.0 {
        let panel = gauss_panel(
            |v| {
                let x = v.exp();
                f(x) * x
            },
            u,
            u + 1.0,
            order,
        );
        if !panel.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                achieved: f64::INFINITY,
                target: 0.0,
            });
        }
        total += panel;
        u += 1.0;
        if panel.abs() <= 1e-17 * total.abs() || (total == 0.0 && panel == 0.0) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::QuadratureNonConvergence {
        achieved: total.abs(),
        target: 1e-17 * total.abs(),
    })
}

/// A composite Gauss–Legendre grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid {
    edges: Vec<f64>,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelGrid {
    pub fn from_edges(edges: Vec<f64>, order: usize) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidGrid("need at least one panel".into()));
        }
        if !edges.windows(2).all(|w| w[1] > w[0]) || edges.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(
                "panel edges must be finite and strictly increasing".into(),
            ));
        }
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidGrid(format!(
                "panel order {order} outside 1..={MAX_ORDER}"
            )));
        }
        let r = rule(order);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for e in edges.windows(2) {
            let half = 0.5 * (e[1] - e[0]);
            let mid = 0.5 * (e[0] + e[1]);
            for (&x, &w) in r.nodes.iter().zip(&r.weights) {
                nodes.push(mid + half * x);
                weights.push(w * half);
            }
        }
        Ok(Self {
            edges,
            order,
            nodes,
            weights,
        })
    }

    /// Equal-width panels on `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid needs b > a and panels > 0 (got [{a}, {b}], {panels})"
            )));
        }
        let edges = (0..=panels)
            .map(|i| {
                if i == panels {
                    b
                } else {
                    a + (b - a) * i as f64 / panels as f64
                }
            })
            .collect();
        Self::from_edges(edges, order)
    }

    /// Dyadic panels on `[a, b]`, refined towards zero, width at most `max_width`.
    pub fn dyadic(a: f64, b: f64, max_width: f64, order: usize) -> Result<Self> {
        if !(a >= 0.0 && b > a && max_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "dyadic grid needs 0 <= a < b and positive width (got [{a}, {b}], {max_width})"
            )));
        }
        Self::from_edges(dyadic_edges(a, b, max_width), order)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    /// `Σ w_i v_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Evaluates `f` on the grid nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Index of the panel containing `x` (clamped to the grid).
    pub fn panel_of(&self, x: f64) -> usize {
        let p = self.edges.partition_point(|&e| e <= x);
        p.saturating_sub(1).min(self.edges.len() - 2)
    }

    /// Barycentric interpolation of grid samples at `x`; `None` outside the grid.
    pub fn interpolate(&self, values: &[f64], x: f64) -> Option<f64> {
        if !(x >= self.lower() && x <= self.upper()) {
            return None;
        }
        let p = self.panel_of(x);
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        let xi = (2.0 * x - a - b) / (b - a);
        let r = rule(self.order);
        let vals = &values[p * self.order..(p + 1) * self.order];
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xn, &wb), &v) in r.nodes.iter().zip(&r.bary).zip(vals) {
            let d = xi - xn;
            if d == 0.0 {
                return Some(v);
            }
            let c = wb / d;
            num += c * v;
            den += c;
        }
        Some(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_is_ascending_and_normalized() {
        for order in [1, 4, 16, 32] {
            let (x, w) = reference_rule(order);
            assert!(x.windows(2).all(|p| p[1] > p[0]));
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let g = PanelGrid::uniform(0.0, 3.0, 6, 12).unwrap();
        let v = g.sample(f64::exp);
        assert!((g.integrate(&v) - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let g = PanelGrid::uniform(-1.0, 2.0, 3, 8).unwrap();
        let poly = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(5);
        let v = g.sample(poly);
        for x in [-1.0, -0.3, 0.0, 0.77, 1.999, 2.0] {
            assert!((g.interpolate(&v, x).unwrap() - poly(x)).abs() < 1e-12);
        }
        assert!(g.interpolate(&v, 2.5).is_none());
    }

    #[test]
    fn dyadic_edges_refine_origin_and_cap_width() {
        let e = dyadic_edges(0.0, 40.0, 3.0);
        assert_eq!(e[0], 0.0);
        assert!(e[1] < 1e-9);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 3.0 + 1e-12));
        assert_eq!(*e.last().unwrap(), 40.0);
    }

    #[test]
    fn log_tail_matches_power_law() {
        let v = integrate_log_tail(|x| x.powf(-2.5), 3.0, 16).unwrap();
        assert!((v - 3f64.powf(-1.5) / 1.5).abs() < 1e-13);
    }

    #[test]
    fn rejects_unsorted_edges() {
        assert!(PanelGrid::from_edges(vec![0.0, 1.0, 1.0], 4).is_err());
    }
}
