//! Gamma function at integer and half-integer arguments, factorials.
//!
//! Every Gamma value needed here is of the form `Γ(N/2)` with integer `N`,
//! so only the two exact branches are provided.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `Γ(k/2)` for a positive integer `k`.
///
/// Even `k`: `Γ(m) = (m-1)!`. Odd `k`: `Γ(m + 1/2) = (2m)! √π / (4^m m!)`,
/// evaluated as the product `√π · Π_{i=1}^{m} (i - 1/2)` to avoid large factorials.
pub fn gamma_half(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("Γ(k/2) requires k ≥ 1"));
    }
    if k % 2 == 0 {
        Ok(factorial(k / 2 - 1))
    } else {
        let m = k / 2;
        Ok((1..=m).fold(PI.sqrt(), |acc, i| acc * (i as f64 - 0.5)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_branch() {
        assert_eq!(gamma_half(2).unwrap(), 1.0);
        assert_eq!(gamma_half(4).unwrap(), 1.0);
        assert_eq!(gamma_half(10).unwrap(), 24.0);
    }

    #[test]
    fn half_integer_branch() {
        let sp = PI.sqrt();
        assert!((gamma_half(1).unwrap() - sp).abs() < 1e-15);
        assert!((gamma_half(3).unwrap() - sp / 2.0).abs() < 1e-15);
        assert!((gamma_half(5).unwrap() - 0.75 * sp).abs() < 1e-15);
        // Γ(7/2) = 15/8 √π
        assert!((gamma_half(7).unwrap() - 15.0 / 8.0 * sp).abs() < 1e-14);
    }

    #[test]
    fn zero_rejected() {
        assert!(gamma_half(0).is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
    }
}
