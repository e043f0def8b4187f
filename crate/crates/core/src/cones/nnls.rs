//! Lawson–Hanson active-set nonnegative least squares.

use crate::linalg::vector;

#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// `argmin ‖Σ cᵢ colᵢ − b‖` subject to `c ≥ 0`.
///
/// Columns enter the passive set by largest dual value with ties broken by
/// lowest index, so results are reproducible.
pub fn nnls(columns: &[Vec<f64>], b: &[f64]) -> NnlsSolution {
    let m = columns.len();
    let mut x = vec![0.0; m];
    if m == 0 {
        return NnlsSolution {
            coefficients: x,
            residual: vector::norm(b),
        };
    }
    let scale = 1.0 + vector::norm(b);
    let mut passive = vec![false; m];
    // columns whose entry failed to reduce the residual since the last success
    let mut blocked = vec![false; m];
    let mut res = vector::norm(b);
    let max_outer = 6 * m + 10;
    for _ in 0..max_outer {
        let r = residual_vec(columns, &x, b);
        if res <= f64::EPSILON * scale {
            break;
        }
        // Dual values near the noise floor carry no sign information, so a
        // column with nonpositive dual value is still tried; the residual
        // decrease test below rejects useless entries.
        let mut enter = None;
        let mut best = f64::NEG_INFINITY;
        for j in 0..m {
            if passive[j] || blocked[j] {
                continue;
            }
            let w = vector::dot(&columns[j], &r);
            if w > best {
                best = w;
                enter = Some(j);
            }
        }
        let Some(j) = enter else { break };
        let saved = (x.clone(), passive.clone());
        passive[j] = true;
        for _ in 0..(3 * m + 10) {
            let idx: Vec<usize> = (0..m).filter(|k| passive[*k]).collect();
            let Some(z) = least_squares(columns, &idx, b) else {
                // the entering column is dependent on the passive set
                passive[j] = false;
                break;
            };
            if z.iter().all(|zi| *zi > 0.0) {
                x.iter_mut().for_each(|xi| *xi = 0.0);
                for (k, zi) in idx.iter().zip(&z) {
                    x[*k] = *zi;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, zi) in idx.iter().zip(&z) {
                if *zi <= 0.0 {
                    let denom = x[*k] - zi;
                    let a = if denom > 0.0 { x[*k] / denom } else { 0.0 };
                    alpha = alpha.min(a);
                }
            }
            for (k, zi) in idx.iter().zip(&z) {
                x[*k] += alpha * (zi - x[*k]);
            }
            for k in idx {
                if x[k] <= 1e-15 * scale {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
        let new_res = vector::norm(&residual_vec(columns, &x, b));
        if new_res < res {
            res = new_res;
            blocked.iter_mut().for_each(|b| *b = false);
        } else {
            (x, passive) = saved;
            blocked[j] = true;
        }
    }
    let residual = vector::norm(&residual_vec(columns, &x, b));
    NnlsSolution {
        coefficients: x,
        residual,
    }
}

fn residual_vec(columns: &[Vec<f64>], x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (c, xi) in columns.iter().zip(x) {
        if *xi != 0.0 {
            vector::axpy(-xi, c, &mut r);
        }
    }
    r
}

/// Unconstrained least squares on the selected columns by Householder QR.
/// `None` when the selected columns are numerically dependent.
fn least_squares(columns: &[Vec<f64>], idx: &[usize], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let k = idx.len();
    if k > n {
        return None;
    }
    let mut a: Vec<Vec<f64>> = idx.iter().map(|j| columns[*j].clone()).collect();
    let mut rhs = b.to_vec();
    let norms: Vec<f64> = a.iter().map(|c| vector::norm(c)).collect();
    for p in 0..k {
        let x = a[p][p..].to_vec();
        let alpha = vector::norm(&x);
        if alpha <= 8.0 * f64::EPSILON * norms[p].max(f64::MIN_POSITIVE) {
            return None;
        }
        let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = x;
        v[0] += sign * alpha;
        let vn = vector::norm(&v);
        v.iter_mut().for_each(|vi| *vi /= vn);
        for col in a.iter_mut().skip(p) {
            let s = 2.0 * vector::dot(&v, &col[p..]);
            vector::axpy(-s, &v, &mut col[p..]);
        }
        let s = 2.0 * vector::dot(&v, &rhs[p..]);
        vector::axpy(-s, &v, &mut rhs[p..]);
    }
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| a[j][i] * z[j]).sum();
        z[i] = (rhs[i] - s) / a[i][i];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_nonnegative_combination() {
        let cols = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let s = nnls(&cols, &[2.0, 1.0]);
        assert!(s.residual < 1e-14);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((s.coefficients[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projects_onto_boundary() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = nnls(&cols, &[-1.0, 2.0]);
        assert_eq!(s.coefficients[0], 0.0);
        assert!((s.coefficients[1] - 2.0).abs() < 1e-14);
        assert!((s.residual - 1.0).abs() < 1e-14);
    }

    #[test]
    fn handles_more_columns_than_rows() {
        let cols = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
        ];
        let s = nnls(&cols, &[-1.0, 3.0]);
        assert!(s.residual < 1e-12);
        assert!(s.coefficients.iter().all(|c| *c >= 0.0));
    }
}
