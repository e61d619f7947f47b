/// Smooth cutoff: 1 on `|x| <= 1`, 0 on `|x| >= 2`, quintic smoothstep
/// `s(u) = 6u^5 - 15u^4 + 10u^3` on the shell in between (C² overall).
pub fn chi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(a - 1.0)
    }
}

/// Derivative of [`chi`].
pub fn chi_prime(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 || a >= 2.0 {
        return 0.0;
    }
    let u = a - 1.0;
    let ds = 30.0 * u * u * (u - 1.0) * (u - 1.0);
    -ds * x.signum()
}

fn smoothstep(u: f64) -> f64 {
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(3.0), 0.0);
        let v = chi(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(v, chi(-1.5));
    }

    #[test]
    fn sampled_properties() {
        let n = 10_000;
        let mut prev = 1.0;
        for i in 0..=n {
            let x = -3.0 + 6.0 * i as f64 / n as f64;
            let v = chi(x);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, chi(-x));
            if x.abs() <= 1.0 {
                assert_eq!(v, 1.0);
            }
            if x.abs() >= 2.0 {
                assert_eq!(v, 0.0);
            }
            if x >= 0.0 {
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn derivative_continuous_and_matches_difference_quotient() {
        for &x in &[1.0, 2.0, -1.0, -2.0] {
            assert!(chi_prime(x + 1e-9).abs() < 1e-6);
            assert!(chi_prime(x - 1e-9).abs() < 1e-6);
        }
        for &x in &[1.2, 1.5, 1.9, -1.3] {
            let h = 1e-6;
            let fd = (chi(x + h) - chi(x - h)) / (2.0 * h);
            assert!((fd - chi_prime(x)).abs() < 1e-8);
        }
        assert_eq!(chi_prime(0.3), 0.0);
        assert_eq!(chi_prime(2.5), 0.0);
    }
}
