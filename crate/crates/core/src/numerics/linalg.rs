use crate::error::{Error, Result};

/// Relative pivot threshold for [`solve_linear_3`].
pub const PIVOT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSolution {
    pub x: [f64; 3],
    /// `‖Mx − b‖∞` of the returned solution.
    pub residual: f64,
}

/// Gaussian elimination with partial pivoting. A pivot smaller than
/// `PIVOT_THRESHOLD` times the largest entry of its original row is
/// treated as singular.
pub fn solve_linear_3(matrix: [[f64; 3]; 3], rhs: [f64; 3]) -> Result<LinearSolution> {
    let mut m = matrix;
    let mut b = rhs;
    let mut scale = matrix.map(|row| row.iter().fold(0.0f64, |acc, v| acc.max(v.abs())));

    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        scale.swap(col, pivot_row);

        let pivot = m[col][col];
        if !(pivot.abs() > PIVOT_THRESHOLD * scale[col]) {
            return Err(Error::SingularMatrix { column: col, pivot });
        }
        for row in col + 1..3 {
            let factor = m[row][col] / pivot;
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / m[row][row];
    }

    let residual = (0..3)
        .map(|i| {
            let mx: f64 = (0..3).map(|k| matrix[i][k] * x[k]).sum();
            (mx - rhs[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(LinearSolution { x, residual })
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off.len() == diag.len() - 1`), by Sturm
/// sequence bisection between Gershgorin bounds.
pub fn tridiagonal_min_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    assert!(!diag.is_empty() && off.len() + 1 == diag.len());
    let n = diag.len();
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);

    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let coupling = if i > 0 { off[i - 1] * off[i - 1] / d } else { 0.0 };
            d = diag[i] - x - coupling;
            if d == 0.0 {
                d = -f64::EPSILON * scale;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let s = solve_linear_3(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [1.0, 2.0, 3.0],
        )
        .unwrap();
        assert_eq!(s.x, [1.0, 2.0, 3.0]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn unit_square_extremal_system() {
        // Moment integrals of the unit square against boundary data E1 = E2 = 2, E0 = 4.
        let (a, b, c, d) = (1.0 / 3.0, 0.25, 0.5, 1.0);
        let s = solve_linear_3([[a, b, c], [b, a, c], [c, c, d]], [2.0, 2.0, 4.0]).unwrap();
        for (got, want) in s.x.iter().zip([0.0, 0.0, 4.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", s.x);
        }
        assert!(s.residual <= 1e-10 * 4.0);
    }

    #[test]
    fn needs_pivoting() {
        let s = solve_linear_3(
            [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]],
            [5.0, 7.0, 8.0],
        )
        .unwrap();
        assert_eq!(s.x, [7.0, 5.0, 4.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let err = solve_linear_3(
            [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 0.0, 1.0]],
            [1.0, 2.0, 3.0],
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn tridiagonal_laplacian_spectrum() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2cos(kπ/(n+1)).
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let want = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let got = tridiagonal_min_eigenvalue(&diag, &off);
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn tridiagonal_single_entry() {
        assert_eq!(tridiagonal_min_eigenvalue(&[-3.5], &[]), -3.5);
    }
}
