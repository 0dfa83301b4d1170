//! Small derivative-free minimizer used by the hull geometry.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Nelder–Mead with standard coefficients. Stops when the simplex spread in
/// both value and position falls under the tolerances, or after `max_iter`.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    step: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let fspread = (values[n] - values[0]).abs();
        let xspread = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if fspread <= ftol && xspread <= xtol {
            break;
        }

        for c in centroid.iter_mut() {
            *c = 0.0;
        }
        for p in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        for i in 0..n {
            trial[i] = centroid[i] + (centroid[i] - worst[i]);
        }
        let fr = f(&trial);
        if fr < values[0] {
            for i in 0..n {
                trial2[i] = centroid[i] + 2.0 * (centroid[i] - worst[i]);
            }
            let fe = f(&trial2);
            if fe < fr {
                simplex[n].copy_from_slice(&trial2);
                values[n] = fe;
            } else {
                simplex[n].copy_from_slice(&trial);
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n].copy_from_slice(&trial);
            values[n] = fr;
            continue;
        }
        let (base, fbase) = if fr < values[n] {
            (trial.clone(), fr)
        } else {
            (worst.clone(), values[n])
        };
        for i in 0..n {
            trial2[i] = centroid[i] + 0.5 * (base[i] - centroid[i]);
        }
        let fc = f(&trial2);
        if fc < fbase {
            simplex[n].copy_from_slice(&trial2);
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for k in 1..=n {
            for i in 0..n {
                simplex[k][i] = best[i] + 0.5 * (simplex[k][i] - best[i]);
            }
            values[k] = f(&simplex[k]);
        }
    }
    let (mut bi, mut bv) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    Minimum {
        x: simplex.swap_remove(bi),
        value: bv,
    }
}

/// Restarts Nelder–Mead from its own optimum with a shrinking step; this
/// gets past the stalls the method is prone to at kinks.
pub(crate) fn nelder_mead_restarts<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    step: f64,
    restarts: usize,
) -> Minimum {
    let mut best = nelder_mead(&mut f, start, step, 1e-13, 1e-15, 400);
    let mut s = step;
    for _ in 0..restarts {
        s *= 0.1;
        let next = nelder_mead(&mut f, &best.x, s.max(1e-9), 1e-14, 1e-16, 400);
        if next.value <= best.value {
            best = next;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |p| (p[0] - 1.0).powi(2) + 3.0 * (p[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            1e-12,
            1e-20,
            2000,
        );
        assert!((m.x[0] - 1.0).abs() < 1e-8 && (m.x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn kinked_convex_function() {
        let m = nelder_mead_restarts(
            |p| (p[0] - 0.3).abs() + 2.0 * (p[1] - 0.7).abs() + 0.1 * p[0] * p[0],
            &[2.0, -1.0],
            0.5,
            4,
        );
        assert!((m.x[0] - 0.3).abs() < 1e-9 && (m.x[1] - 0.7).abs() < 1e-9);
    }
}
