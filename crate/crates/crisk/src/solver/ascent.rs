//! Unconstrained maximization of a concave function by gradient ascent with
//! golden line searches, followed by coordinatewise polish.  Used for
//! conjugates of black-box risk evaluators, where only a value oracle
//! exists.  Divergence (an unbounded objective) is detected by the iterate
//! escaping a large box.

use super::golden_max;

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub divergence_bound: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_iters: 5_000,
            grad_tol: 1e-10,
            divergence_bound: 1e8,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// The iterate escaped the divergence box: the supremum is `+inf` or
    /// approached only at infinity beyond the box.
    pub diverged: bool,
    #[allow(dead_code)]
    pub iterations: usize,
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut z = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        let xi = x[i];
        z[i] = xi + h;
        let fp = f(&z);
        z[i] = xi - h;
        let fm = f(&z);
        z[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Maximizes `f` from `x0`.
pub(crate) fn maximize(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    opts: &AscentOptions,
) -> AscentResult {
    let mut x = x0.to_vec();
    let mut value = f(&x);
    let mut iterations = 0;
    let mut step_hi = 1.0;
    let mut flat_rounds = 0;

    for iter in 0..opts.max_iters {
        iterations = iter + 1;
        if x.iter().any(|v| v.abs() > opts.divergence_bound) {
            return AscentResult {
                x,
                value,
                diverged: true,
                iterations,
            };
        }
        let g = gradient(f, &x);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < opts.grad_tol {
            break;
        }
        // line search along the gradient; expand the bracket while the far
        // end keeps improving
        let phi = |t: f64, x: &[f64]| -> Vec<f64> {
            x.iter()
                .zip(&g)
                .map(|(xi, gi)| xi + t * gi / gnorm)
                .collect()
        };
        while f(&phi(step_hi, &x)) > f(&phi(step_hi / 2.0, &x)) && step_hi < 1e7 {
            step_hi *= 2.0;
        }
        let mut line = |t: f64| f(&phi(t, &x));
        let (t, new_value) = golden_max(&mut line, 0.0, step_hi, 60);
        if new_value > value + 1e-14 {
            x = phi(t, &x);
            value = new_value;
            flat_rounds = 0;
        } else {
            flat_rounds += 1;
            if flat_rounds >= 3 {
                break;
            }
        }
        step_hi = (t * 4.0).clamp(1e-6, 1e7);
    }

    // coordinatewise polish
    for _ in 0..3 {
        let mut improved = false;
        for i in 0..x.len() {
            let xi = x[i];
            let mut line = |t: f64| {
                let mut z = x.clone();
                z[i] = xi + t;
                f(&z)
            };
            let (t, v) = golden_max(&mut line, -1.0, 1.0, 60);
            if v > value + 1e-14 {
                x[i] = xi + t;
                value = v;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }

    AscentResult {
        x,
        value,
        diverged: false,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.5).powi(2);
        let r = maximize(&f, &[0.0, 0.0], &AscentOptions::default());
        assert!(!r.diverged);
        assert!((r.x[0] - 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn flat_ridge_converges_in_value() {
        // constant along (1,1); the value is what matters
        let f = |x: &[f64]| -(x[0] - x[1] - 2.0).powi(2);
        let r = maximize(&f, &[5.0, -3.0], &AscentOptions::default());
        assert!(!r.diverged);
        assert!(r.value > -1e-9, "value {}", r.value);
    }

    #[test]
    fn linear_objective_diverges() {
        let f = |x: &[f64]| x[0];
        let r = maximize(&f, &[0.0], &AscentOptions::default());
        assert!(r.diverged);
    }

    #[test]
    fn log_sum_exp_conjugate_shape() {
        // max  c.x - ln(sum e^{x_i})  over x; optimum value is
        // sum c_i ln(c_i) for c in the open simplex (relative entropy form)
        let c = [0.3, 0.7];
        let f = move |x: &[f64]| {
            let lse = (x[0].exp() + x[1].exp()).ln();
            c[0] * x[0] + c[1] * x[1] - lse
        };
        let expected: f64 = c.iter().map(|&v| v * v.ln()).sum();
        let r = maximize(&f, &[0.0, 0.0], &AscentOptions::default());
        assert!(!r.diverged);
        assert!(
            (r.value - expected).abs() < 1e-8,
            "{} vs {expected}",
            r.value
        );
    }
}
