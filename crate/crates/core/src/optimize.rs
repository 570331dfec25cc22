//! Nelder–Mead simplex descent for small unconstrained problems.

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop once max f − min f over the simplex falls below this.
    pub f_tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            initial_step: 0.25,
            f_tolerance: 1e-14,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: NelderMeadOptions) -> NelderMeadResult {
    let dim = x0.len();
    assert!(dim >= 1, "nelder_mead needs at least one parameter");

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= opts.f_tolerance {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = f(&xr);
        if fr < best {
            let xe = along(EXPAND);
            let fe = f(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        let (xc, fc) = if fr < worst {
            let x = along(CONTRACT);
            let fx = f(&x);
            (x, fx)
        } else {
            let x = along(-CONTRACT);
            let fx = f(&x);
            (x, fx)
        };
        if fc < worst.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, ai) in x.iter_mut().zip(&anchor) {
                *xi = ai + SHRINK * (*xi - ai);
            }
            *fx = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            NelderMeadOptions {
                max_iterations: 500,
                ..Default::default()
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] + 2.0).abs() < 1e-5);
        assert!(r.value < 1e-10);
    }

    #[test]
    fn rosenbrock_progress() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            rosen,
            &[-1.2, 1.0],
            NelderMeadOptions {
                max_iterations: 2000,
                initial_step: 0.5,
                f_tolerance: 1e-16,
            },
        );
        assert!(r.value < 1e-8, "value {}", r.value);
    }

    #[test]
    fn respects_iteration_cap() {
        let r = nelder_mead(|x| x.iter().map(|v| v * v).sum(), &[5.0; 6], NelderMeadOptions {
            max_iterations: 3,
            ..Default::default()
        });
        assert_eq!(r.iterations, 3);
    }
}
