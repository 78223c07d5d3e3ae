//! Dense matrix exponential: Osborne balancing followed by Pade-13
//! scaling-and-squaring.
//!
//! The generator Omega*M of the symplectic flow is badly scaled (position
//! rows are O(1), momentum rows are O(omega^2)), which makes plain
//! scaling-and-squaring lose several digits at large frequencies. Balancing
//! with powers of two is exact in floating point and restores the accuracy.

use nalgebra::DMatrix;

const PADE13_THETA: f64 = 5.371_920_351_148_152;

const PADE13_B: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Diagonal similarity scaling with powers of two that approximately
/// equalizes row and column norms (Osborne's algorithm).
fn balance(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut b = a.clone();
    let mut d = vec![1.0f64; n];
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&k| k != i).map(|k| b[(k, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&k| k != i).map(|k| b[(i, k)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0f64;
            while c * 2.0 < r {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if f != 1.0 {
                converged = false;
                d[i] *= f;
                for k in 0..n {
                    b[(k, i)] *= f;
                }
                for k in 0..n {
                    b[(i, k)] /= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (b, d)
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade13(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13_B;
    let u_inner = &a6 * (b[13] * &a6 + b[11] * &a4 + b[9] * &a2)
        + b[7] * &a6
        + b[5] * &a4
        + b[3] * &a2
        + b[1] * &id;
    let u = a * u_inner;
    let v = &a6 * (b[12] * &a6 + b[10] * &a4 + b[8] * &a2)
        + b[6] * &a6
        + b[4] * &a4
        + b[2] * &a2
        + b[0] * &id;
    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu().solve(&rhs).expect("Pade denominator is nonsingular for scaled input")
}

/// exp(A) for a square real matrix.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let (balanced, d) = balance(a);
    let norm = one_norm(&balanced);
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &balanced / 2f64.powi(squarings as i32);
    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = &result * &result;
    }
    // undo the balancing: exp(A) = D exp(B) D^-1
    let mut out = result;
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= d[i] / d[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = DMatrix::zeros(4, 4);
        assert_relative_eq!(expm(&z), DMatrix::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn exponential_of_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5]));
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], 1f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(1, 1)], (-2f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(2, 2)], 0.5f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(0, 1)], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0,1],[-1,0]]) = [[cos t, sin t], [-sin t, cos t]]
        let t = 0.7;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], t.cos(), max_relative = 1e-13);
        assert_relative_eq!(e[(0, 1)], t.sin(), max_relative = 1e-13);
        assert_relative_eq!(e[(1, 0)], -t.sin(), max_relative = 1e-13);
    }

    #[test]
    fn badly_scaled_oscillator() {
        // harmonic oscillator at nu = 2000: generator [[0,1],[-nu^2,0]]
        let nu = 2000.0f64;
        let t = 1.0;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, t, -nu * nu * t, 0.0]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], (nu * t).cos(), epsilon = 1e-9);
        assert_relative_eq!(e[(0, 1)], (nu * t).sin() / nu, epsilon = 1e-12);
        assert_relative_eq!(e[(1, 0)], -nu * (nu * t).sin(), epsilon = 1e-6);
    }
}
