//! Away-step Frank-Wolfe maximization of `linear . w + g(w)` over the
//! probability simplex, `g` concave and possibly `-inf` off its effective
//! domain.
//!
//! On the simplex the iterate's coordinates are its own vertex weights, so
//! the active set of the away step is just the support of `w`.  The FW gap
//! `max_i grad . (e_i - w)` upper-bounds the suboptimality of a concave
//! objective and is the stopping certificate.  Line searches bisect the sign
//! of the directional derivative instead of comparing objective values:
//! near the optimum the per-step value improvement drops below f64
//! resolution long before the gap reaches its tolerance.

pub(crate) type ValueFn<'a> = &'a dyn Fn(&[f64]) -> f64;
pub(crate) type GradFn<'a> = &'a dyn Fn(&[f64]) -> Vec<f64>;

pub(crate) struct SimplexProblem<'a> {
    /// Coefficients of the linear part.
    pub linear: &'a [f64],
    /// Concave part; `-inf` marks points outside the domain.
    pub concave: ValueFn<'a>,
    /// Exact gradient of the concave part, when available.  Without it,
    /// directional derivatives are estimated by Richardson-extrapolated
    /// central differences along feasible directions.
    pub concave_grad: Option<GradFn<'a>>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct FwOptions {
    pub max_iters: usize,
    pub gap_tol: f64,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            gap_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct FwResult {
    pub w: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug)]
pub(crate) enum FwError {
    /// No probed starting point had a finite objective.
    NoFiniteStart,
}

impl SimplexProblem<'_> {
    fn eval(&self, w: &[f64]) -> f64 {
        let lin: f64 = self.linear.iter().zip(w).map(|(c, v)| c * v).sum();
        lin + (self.concave)(w)
    }

    /// Derivative of `t -> f(w + t d)` at `t`, staying inside `[0, t_max]`.
    fn dir_derivative(&self, w: &[f64], d: &[f64], t: f64, t_max: f64) -> f64 {
        let point = |t: f64| -> Vec<f64> { w.iter().zip(d).map(|(wi, di)| wi + t * di).collect() };
        let lin_d: f64 = self.linear.iter().zip(d).map(|(c, v)| c * v).sum();
        if let Some(grad_fn) = self.concave_grad {
            let g = grad_fn(&point(t));
            return lin_d + g.iter().zip(d).map(|(a, b)| a * b).sum::<f64>();
        }
        let h = (1e-5 * t_max.max(1e-3)).min(1e-4);
        let f = |t: f64| (self.concave)(&point(t));
        let d_est = if t - h >= 0.0 && t + h <= t_max {
            let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let d2 = (f(t + h / 2.0) - f(t - h / 2.0)) / h;
            (4.0 * d2 - d1) / 3.0
        } else if t + 2.0 * h <= t_max {
            (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h)
        } else if t - 2.0 * h >= 0.0 {
            (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h)
        } else {
            (f(t_max) - f(0.0)) / t_max.max(1e-300)
        };
        lin_d + d_est
    }
}

fn normalize(w: &mut [f64]) {
    let mut sum = 0.0;
    for v in w.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
        sum += *v;
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
}

/// Line search along `d` on `[0, t_max]` for a concave profile: bisect the
/// sign change of the directional derivative.
fn line_search(p: &SimplexProblem, w: &[f64], d: &[f64], mut t_max: f64) -> f64 {
    let point = |t: f64| -> Vec<f64> {
        let mut z: Vec<f64> = w.iter().zip(d).map(|(wi, di)| wi + t * di).collect();
        normalize(&mut z);
        z
    };
    // shrink into the effective domain
    let mut shrinks = 0;
    while !p.eval(&point(t_max)).is_finite() && shrinks < 80 {
        t_max *= 0.5;
        shrinks += 1;
    }
    if !p.eval(&point(t_max)).is_finite() {
        return 0.0;
    }
    if p.dir_derivative(w, d, t_max, t_max) >= 0.0 {
        return t_max; // improving all the way to the boundary
    }
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if p.dir_derivative(w, d, mid, t_max) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizes over the simplex, starting from `start` (the barycenter when
/// `None`).  If the start is outside the effective domain, the vertices and
/// vertex-barycenter midpoints are probed.
pub(crate) fn maximize(
    p: &SimplexProblem,
    start: Option<&[f64]>,
    opts: &FwOptions,
) -> Result<FwResult, FwError> {
    let k = p.linear.len();
    let barycenter = vec![1.0 / k as f64; k];
    let mut w = start
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| barycenter.clone());
    if !p.eval(&w).is_finite() {
        let mut probes = Vec::with_capacity(2 * k + 1);
        probes.push(barycenter.clone());
        for i in 0..k {
            let mut vertex = vec![0.0; k];
            vertex[i] = 1.0;
            let mut mid = barycenter.clone();
            for (m, v) in mid.iter_mut().zip(&vertex) {
                *m = 0.5 * (*m + v);
            }
            probes.push(vertex);
            probes.push(mid);
        }
        match probes
            .into_iter()
            .map(|q| (p.eval(&q), q))
            .filter(|(v, _)| v.is_finite())
            .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"))
        {
            Some((_, q)) => w = q,
            None => return Err(FwError::NoFiniteStart),
        }
    }

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut tiny_steps = 0;
    for iter in 0..opts.max_iters {
        iterations = iter + 1;
        // directional derivatives along e_i - w
        let d: Vec<f64> = (0..k)
            .map(|i| {
                let mut dir = w.iter().map(|v| -v).collect::<Vec<f64>>();
                dir[i] += 1.0;
                if dir.iter().all(|v| v.abs() < 1e-15) {
                    return 0.0; // w is the vertex e_i
                }
                p.dir_derivative(&w, &dir, 0.0, 1.0)
            })
            .collect();
        let mut s = 0;
        for i in 1..k {
            if d[i] > d[s] {
                s = i;
            }
        }
        gap = d[s].max(0.0);
        if gap <= opts.gap_tol {
            break;
        }
        let mut away: Option<usize> = None;
        for i in 0..k {
            if w[i] > 1e-14 && away.is_none_or(|v| d[i] < d[v]) {
                away = Some(i);
            }
        }
        let use_away = match away {
            Some(v) if w[v] < 1.0 - 1e-12 => -d[v] > d[s],
            _ => false,
        };
        let (dir, t_max) = if use_away {
            let v = away.expect("away vertex exists");
            let mut dir: Vec<f64> = w.clone();
            dir[v] -= 1.0; // w - e_v
            (dir, w[v] / (1.0 - w[v]))
        } else {
            let mut dir: Vec<f64> = w.iter().map(|v| -v).collect();
            dir[s] += 1.0; // e_s - w
            (dir, 1.0)
        };
        let t = line_search(p, &w, &dir, t_max);
        if t <= 1e-16 {
            tiny_steps += 1;
            if tiny_steps >= 5 {
                break; // derivative noise floor reached
            }
            continue;
        }
        tiny_steps = 0;
        for (wi, di) in w.iter_mut().zip(&dir) {
            *wi += t * di;
        }
        normalize(&mut w);
    }
    let value = p.eval(&w);
    Ok(FwResult {
        converged: gap <= opts.gap_tol,
        w,
        value,
        gap,
        iterations,
    })
}
