//! Projected limited-memory BFGS for box-constrained smooth problems.
//!
//! The search direction is the two-loop L-BFGS product restricted to the
//! variables that are not held at an active bound, followed by a
//! backtracking Armijo search along the projected path.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsbSettings {
    pub memory: usize,
    pub max_iter: usize,
    pub ftol: f64,
    pub pgtol: f64,
}

impl Default for LbfgsbSettings {
    fn default() -> Self {
        Self { memory: 10, max_iter: 15_000, ftol: 1e7 * f64::EPSILON, pgtol: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsbResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot_on(a: &[f64], b: &[f64], free: &[bool]) -> f64 {
    a.iter().zip(b).zip(free).filter(|(_, &f)| f).map(|((x, y), _)| x * y).sum()
}

/// Minimizes `f` subject to `lower ≤ x ≤ upper`. `f` returns the value and
/// gradient; a non-finite value is treated as infeasible by the line search.
pub fn minimize_box<F>(mut f: F, x0: &[f64], lower: &[f64], upper: &[f64], cfg: &LbfgsbSettings) -> LbfgsbResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let (mut fx, mut g) = f(&x);
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.memory);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let mut free = vec![true; n];
        let mut pg_max = 0.0f64;
        for i in 0..n {
            let at_lower = x[i] <= lower[i] && g[i] > 0.0;
            let at_upper = x[i] >= upper[i] && g[i] < 0.0;
            if lower[i] == upper[i] || at_lower || at_upper {
                free[i] = false;
            } else {
                pg_max = pg_max.max(g[i].abs());
            }
        }
        if pg_max <= cfg.pgtol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir = lbfgs_direction(&g, &free, &memory);
        if !(dot_on(&g, &dir, &free) < 0.0) {
            memory.clear();
            dir = g.iter().zip(&free).map(|(gi, &fr)| if fr { -gi } else { 0.0 }).collect();
        }
        let mut t = if memory.is_empty() { (1.0 / pg_max).min(1.0) } else { 1.0 };

        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            project(&mut xn);
            let (fxn, gn) = f(&xn);
            let decrease: f64 = g.iter().zip(xn.iter().zip(&x)).map(|(gi, (a, b))| gi * (a - b)).sum();
            if fxn.is_finite() && fxn <= fx + 1e-4 * decrease.min(0.0) {
                accepted = Some((xn, fxn, gn));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fxn, gn)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-10 {
            if memory.len() == cfg.memory {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        let rel = (fx - fxn) / fx.abs().max(fxn.abs()).max(1.0);
        x = xn;
        fx = fxn;
        g = gn;
        if rel <= cfg.ftol {
            converged = true;
            break;
        }
    }
    LbfgsbResult { x, f: fx, iterations, converged }
}

fn lbfgs_direction(g: &[f64], free: &[bool], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.iter().zip(free).map(|(gi, &fr)| if fr { *gi } else { 0.0 }).collect();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot_on(s, &q, free);
        for i in 0..q.len() {
            if free[i] {
                q[i] -= a * y[i];
            }
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let yy = dot_on(y, y, free);
        let sy = dot_on(s, y, free);
        if yy > 0.0 && sy > 0.0 {
            q.iter_mut().for_each(|v| *v *= sy / yy);
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
        let b = rho * dot_on(y, &q, free);
        for i in 0..q.len() {
            if free[i] {
                q[i] += (a - b) * s[i];
            }
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_unconstrained() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            (v, vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)])
        };
        let inf = f64::INFINITY;
        let cfg = LbfgsbSettings { ftol: 1e-15, pgtol: 1e-9, ..Default::default() };
        let r = minimize_box(f, &[-1.2, 1.0], &[-inf, -inf], &[inf, inf], &cfg);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn active_bounds() {
        // min (x-2)^2 + (y+3)^2 on [0, 1] x [0, inf)
        let f = |x: &[f64]| ((x[0] - 2.0).powi(2) + (x[1] + 3.0).powi(2), vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 3.0)]);
        let r = minimize_box(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, f64::INFINITY], &LbfgsbSettings::default());
        assert_eq!(r.x, vec![1.0, 0.0]);
        assert!(r.converged);
    }

    #[test]
    fn fixed_variables_stay_put() {
        let f = |x: &[f64]| (x.iter().map(|v| (v - 1.0).powi(2)).sum(), x.iter().map(|v| 2.0 * (v - 1.0)).collect());
        let r = minimize_box(f, &[0.0, 0.0, 0.0], &[0.0, -5.0, 0.0], &[0.0, 5.0, 0.0], &LbfgsbSettings::default());
        assert_eq!(r.x[0], 0.0);
        assert_eq!(r.x[2], 0.0);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
    }
}
