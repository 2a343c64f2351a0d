//! Small dense solves shared by the matcher and the sine fit.

/// Solve a 3x3 system `m * x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
pub(crate) fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for ((row, src), rhs) in a.iter_mut().zip(&m).zip(&b) {
        row[..3].copy_from_slice(src);
        row[3] = *rhs;
    }
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= scale * 1e-14 {
            return None;
        }
        a.swap(col, pivot_row);
        let pivot = a[col];
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                *dst -= f * src;
            }
        }
    }

    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut s = a[col][3];
        for k in col + 1..3 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_identity() {
        let x = solve3(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [1.0, 2.0, 3.0],
        )
        .unwrap();
        assert_eq!(x, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn solves_general() {
        let m = [[2.0, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]];
        let x = solve3(m, [8.0, -11.0, -3.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        assert!((x[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 0.0, 1.0]];
        assert!(solve3(m, [1.0, 2.0, 3.0]).is_none());
    }
}
