//! Nelder-Mead downhill simplex with dimension-adaptive coefficients
//! (Gao & Han, 2012).

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Budget of objective evaluations.
    pub max_evals: usize,
    /// Stop once `f_worst − f_best` falls to this value.
    pub f_tol: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub x_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 5000,
            f_tol: 1e-14,
            x_tol: 1e-12,
            initial_step: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// True if a tolerance was met before the budget ran out.
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

pub fn minimize<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Counted { f, evals: 0 };
    if n == 0 {
        let f0 = obj.call(x0);
        return Minimum {
            x: Vec::new(),
            f: f0,
            evals: obj.evals,
            converged: true,
        };
    }

    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 0.5 / nf;
    let sigma = 1.0 - 1.0 / nf.max(2.0);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), obj.call(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = obj.call(&x);
        simplex.push((x, fx));
    }

    let mut converged = false;
    while obj.evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = simplex[1..]
            .iter()
            .map(|(x, _)| dist_inf(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if worst - best <= opts.f_tol || spread <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = obj.call(&xr);
        if fr < best {
            let xe = along(gamma);
            let fe = obj.call(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = along(alpha * rho);
            let fc = obj.call(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = obj.call(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (xi, bi) in vertex.0.iter_mut().zip(&x_best) {
                *xi = bi + sigma * (*xi - bi);
            }
            vertex.1 = obj.call(&vertex.0);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Minimum {
        x,
        f,
        evals: obj.evals,
        converged,
    }
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = minimize(
            |x| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::default(),
        );
        assert!(m.converged);
        assert!(m.f < 1e-13);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let opts = NelderMeadOptions {
            max_evals: 20_000,
            f_tol: 1e-20,
            ..Default::default()
        };
        let m = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!(m.f < 1e-12, "f = {}", m.f);
    }

    #[test]
    fn respects_budget() {
        let opts = NelderMeadOptions {
            max_evals: 50,
            f_tol: 0.0,
            x_tol: 0.0,
            ..Default::default()
        };
        let m = minimize(|x| x.iter().map(|v| v.abs()).sum(), &[3.0; 5], &opts);
        assert!(!m.converged);
        // One iteration may overshoot by at most n + 1 evaluations.
        assert!(m.evals <= 50 + 6);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let m = minimize(
            |x| {
                if x[0] > 2.0 {
                    f64::NAN
                } else {
                    (x[0] - 1.0).powi(2)
                }
            },
            &[0.0],
            &NelderMeadOptions::default(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6);
    }
}
