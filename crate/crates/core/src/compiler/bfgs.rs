//! Dense BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop once ‖∇f‖ falls below this.
    pub gradient_tolerance: f64,
    /// Stop once f falls below this.
    pub target_value: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            gradient_tolerance: 1e-10,
            target_value: 0.0,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    TargetReached,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

struct Objective<'a, F> {
    f: &'a mut F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> Objective<'_, F> {
    fn eval(&mut self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        self.evaluations += 1;
        let (v, g) = (self.f)(x.as_slice());
        (v, DVector::from_vec(g))
    }
}

/// Minimizes `f`, which returns (value, gradient).
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut obj = Objective { f: &mut f, evaluations: 0 };
    let mut x = DVector::from_column_slice(x0);
    let (mut fx, mut g) = obj.eval(&x);
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh_h = true;
    let mut iterations = 0;
    let termination = loop {
        if fx <= opts.target_value {
            break Termination::TargetReached;
        }
        if g.norm() < opts.gradient_tolerance {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iterations {
            break Termination::MaxIterations;
        }
        let mut p = -(&h * &g);
        if p.dot(&g) >= 0.0 {
            h = DMatrix::identity(n, n);
            fresh_h = true;
            p = -g.clone();
        }
        let initial = if fresh_h { (1.0 / g.norm()).min(1.0) } else { 1.0 };
        match line_search(&mut obj, &x, fx, &g, &p, initial, opts) {
            Some((alpha, f_new, g_new)) => {
                let s = &p * alpha;
                let y = &g_new - &g;
                x += &s;
                let sy = s.dot(&y);
                if sy > 1e-300 {
                    if fresh_h {
                        // scale the initial inverse Hessian before the first update
                        h *= sy / y.dot(&y);
                    }
                    let rho = 1.0 / sy;
                    let hy = &h * &y;
                    let yhy = y.dot(&hy);
                    h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                        - (&hy * s.transpose() + &s * hy.transpose()) * rho;
                    fresh_h = false;
                }
                fx = f_new;
                g = g_new;
                iterations += 1;
            }
            None => {
                if fresh_h {
                    break Termination::LineSearchFailed;
                }
                h = DMatrix::identity(n, n);
                fresh_h = true;
            }
        }
    };
    BfgsResult {
        x: x.as_slice().to_vec(),
        value: fx,
        gradient_norm: g.norm(),
        iterations,
        evaluations: obj.evaluations,
        termination,
    }
}

/// Strong-Wolfe search along p (bracketing then zoom).
fn line_search<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    obj: &mut Objective<'_, F>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    p: &DVector<f64>,
    initial: f64,
    opts: &BfgsOptions,
) -> Option<(f64, f64, DVector<f64>)> {
    let d0 = g0.dot(p);
    let mut a_prev = 0.0;
    let mut f_prev = f0;
    let mut d_prev = d0;
    let mut a = initial;
    for i in 0..40 {
        let (fa, ga) = obj.eval(&(x + p * a));
        let da = ga.dot(p);
        if !fa.is_finite() {
            a = 0.5 * (a_prev + a);
            continue;
        }
        if fa > f0 + opts.c1 * a * d0 || (i > 0 && fa >= f_prev) {
            return zoom(obj, x, f0, d0, p, (a_prev, f_prev, d_prev), (a, fa, da), opts);
        }
        if da.abs() <= -opts.c2 * d0 {
            return Some((a, fa, ga));
        }
        if da >= 0.0 {
            return zoom(obj, x, f0, d0, p, (a, fa, da), (a_prev, f_prev, d_prev), opts);
        }
        a_prev = a;
        f_prev = fa;
        d_prev = da;
        a *= 2.0;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn zoom<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(
    obj: &mut Objective<'_, F>,
    x: &DVector<f64>,
    f0: f64,
    d0: f64,
    p: &DVector<f64>,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    opts: &BfgsOptions,
) -> Option<(f64, f64, DVector<f64>)> {
    for _ in 0..60 {
        let a = cubic_min(lo, hi);
        let (fa, ga) = obj.eval(&(x + p * a));
        let da = ga.dot(p);
        if fa > f0 + opts.c1 * a * d0 || fa >= lo.1 {
            hi = (a, fa, da);
        } else {
            if da.abs() <= -opts.c2 * d0 {
                return Some((a, fa, ga));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1.0) {
            break;
        }
    }
    // accept any decrease once the interval collapses
    if lo.0 > 0.0 && lo.1 < f0 {
        let (fa, ga) = obj.eval(&(x + p * lo.0));
        return Some((lo.0, fa, ga));
    }
    None
}

/// Minimizer of the cubic through two (a, f, f') points, safeguarded to
/// the interior of the interval.
fn cubic_min(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (x0, f0, d0) = a;
    let (x1, f1, d1) = b;
    let lo = x0.min(x1);
    let hi = x0.max(x1);
    let width = hi - lo;
    let d = x1 - x0;
    let t1 = d0 + d1 - 3.0 * (f0 - f1) / (x0 - x1);
    let disc = t1 * t1 - d0 * d1;
    let mut cand = f64::NAN;
    if disc >= 0.0 && d != 0.0 {
        let t2 = disc.sqrt() * d.signum();
        let denom = d1 - d0 + 2.0 * t2;
        if denom != 0.0 {
            cand = x1 - d * (d1 + t2 - t1) / denom;
        }
    }
    if !cand.is_finite() || cand <= lo + 0.1 * width || cand >= hi - 0.1 * width {
        0.5 * (lo + hi)
    } else {
        cand
    }
}
