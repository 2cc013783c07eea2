//! Fixed-size vector and matrix helpers for `d ∈ {2, 3}`.
//!
//! Points are plain `[f64; D]` arrays and matrices are row-major
//! `[[f64; D]; D]`. Only the handful of operations the geometry code needs
//! are provided.

pub type Point<const D: usize> = [f64; D];
pub type Matrix<const D: usize> = [[f64; D]; D];

pub fn identity<const D: usize>() -> Matrix<D> {
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn dot<const D: usize>(a: &Point<D>, b: &Point<D>) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm<const D: usize>(a: &Point<D>) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec<const D: usize>(m: &Matrix<D>, v: &Point<D>) -> Point<D> {
    let mut out = [0.0; D];
    for (o, row) in out.iter_mut().zip(m) {
        *o = dot(row, v);
    }
    out
}

/// `mᵀ v`
pub fn mat_t_vec<const D: usize>(m: &Matrix<D>, v: &Point<D>) -> Point<D> {
    let mut out = [0.0; D];
    for (row, vi) in m.iter().zip(v) {
        for (o, mij) in out.iter_mut().zip(row) {
            *o += mij * vi;
        }
    }
    out
}

pub fn transpose<const D: usize>(m: &Matrix<D>) -> Matrix<D> {
    let mut t = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            t[j][i] = m[i][j];
        }
    }
    t
}

pub fn mat_mul<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> Matrix<D> {
    let mut c = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            c[i][j] = (0..D).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn det<const D: usize>(m: &Matrix<D>) -> f64 {
    match D {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("det is only implemented for D <= 3"),
    }
}

/// Explicit adjugate inverse. Returns `None` when the determinant is exactly zero.
pub fn inverse<const D: usize>(m: &Matrix<D>) -> Option<Matrix<D>> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; D]; D];
    match D {
        1 => inv[0][0] = 1.0 / d,
        2 => {
            inv[0][0] = m[1][1] / d;
            inv[0][1] = -m[0][1] / d;
            inv[1][0] = -m[1][0] / d;
            inv[1][1] = m[0][0] / d;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor of (j, i)
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
                }
            }
        }
        _ => panic!("inverse is only implemented for D <= 3"),
    }
    Some(inv)
}

pub fn cross(a: &Point<3>, b: &Point<3>) -> Point<3> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = [[1.0, -3.0, 0.0], [2.0, 1.0, 0.0], [1.0, 1.0, 1.0]];
        assert_eq!(det(&m), 7.0);
        let p = mat_mul(&inverse(&m).unwrap(), &m);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[i][j] - e).abs() < 1e-15);
            }
        }
        let m2 = [[2.0, 1.0], [1.0, 3.0]];
        let p2 = mat_mul(&m2, &inverse(&m2).unwrap());
        assert!((p2[0][0] - 1.0).abs() < 1e-15 && p2[0][1].abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        assert!(inverse(&[[1.0, 2.0], [2.0, 4.0]]).is_none());
    }
}
