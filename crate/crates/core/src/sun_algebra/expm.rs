use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Norm bound for the Taylor core after scaling.
const THETA: f64 = 0.25;
const MAX_TERMS: usize = 30;

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = m.norm_one();
    let squarings = if norm > THETA {
        (norm / THETA).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale_real(0.5f64.powi(squarings));

    let n = m.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        sum += &term;
        if term.norm_one() <= f64::EPSILON * 1e-3 * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sun_algebra::matrix::{C64, I, ONE, ZERO};

    #[test]
    fn zero_gives_identity() {
        for n in 1..=4 {
            let e = expm(&ComplexMatrix::zeros(n)).unwrap();
            assert_eq!(e, ComplexMatrix::identity(n));
        }
    }

    #[test]
    fn diagonal_quarter_turn() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let m = ComplexMatrix::from_diag(&[I * half_pi, -I * half_pi]);
        let e = expm(&m).unwrap();
        let target = ComplexMatrix::from_diag(&[I, -I]);
        assert!((&e - &target).frobenius() < 1e-14);
    }

    #[test]
    fn large_diagonal_has_small_relative_error() {
        // ‖M‖_F = 10
        let d = [C64::new(6.0, 0.0), C64::new(0.0, 8.0)];
        let m = ComplexMatrix::from_diag(&d);
        assert!((m.frobenius() - 8.0f64.hypot(6.0)).abs() < 1e-12);
        let e = expm(&m).unwrap();
        let target = ComplexMatrix::from_diag(&[d[0].exp(), d[1].exp()]);
        let rel = (&e - &target).frobenius() / target.frobenius();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn nilpotent_is_exact() {
        let m = ComplexMatrix::from_rows(&[&[ZERO, C64::new(3.0, -1.0)], &[ZERO, ZERO]]).unwrap();
        let e = expm(&m).unwrap();
        let target = ComplexMatrix::from_rows(&[&[ONE, C64::new(3.0, -1.0)], &[ZERO, ONE]]).unwrap();
        assert!((&e - &target).frobenius() < 1e-13);
    }

    #[test]
    fn non_finite_input_rejected() {
        let m = ComplexMatrix::from_diag(&[C64::new(f64::NAN, 0.0), ONE]);
        assert_eq!(expm(&m), Err(Error::NonFinite));
    }
}
