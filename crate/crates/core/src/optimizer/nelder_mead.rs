//! Derivative-free simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below
    /// `f_tol * (1 + |best|)` and its diameter below `x_tol`.
    pub f_tol: f64,
    pub x_tol: f64,
    pub restarts: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_evals: 20_000,
            f_tol: 1e-15,
            x_tol: 1e-10,
            restarts: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

fn run<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], steps: &[f64], opts: &Options) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if worst - best <= opts.f_tol * (1.0 + best.abs()) && diameter <= opts.x_tol {
            break;
        }
        if diameter == 0.0 {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = toward(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = toward(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let outside = fr < simplex[n].1;
        let xc = toward(if outside { -0.5 } else { 0.5 });
        let fc = eval(&xc, &mut evals);
        if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let x0 = simplex[0].0.clone();
        for (x, v) in simplex[1..].iter_mut() {
            for (xi, bi) in x.iter_mut().zip(&x0) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *v = eval(x, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evals }
}

/// Minimizes `f` from `x0`, restarting with a fresh simplex around the best
/// point until a restart no longer improves.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], steps: &[f64], opts: &Options) -> Minimum {
    assert_eq!(x0.len(), steps.len());
    if x0.is_empty() {
        return Minimum {
            x: Vec::new(),
            value: f(x0),
            evals: 1,
        };
    }
    let mut best = run(&mut f, x0, steps, opts);
    let mut evals = best.evals;
    let mut scale = 1.0;
    for _ in 0..opts.restarts {
        scale *= 0.5;
        let s: Vec<f64> = steps.iter().map(|v| v * scale).collect();
        let next = run(&mut f, &best.x, &s, opts);
        evals += next.evals;
        let gain = best.value - next.value;
        if next.value < best.value {
            best = next;
        }
        if gain <= opts.f_tol * (1.0 + best.value.abs()) {
            break;
        }
    }
    best.evals = evals;
    best
}
