use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gaussian tail probability Q(x) = ½·erfc(x/√2).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// ln Q(x), finite far beyond the point where Q underflows.
pub fn ln_q_function(x: f64) -> f64 {
    let u = x * FRAC_1_SQRT_2;
    if u < 20.0 {
        return q_function(x).ln();
    }
    // erfc(u) = e^{-u²}/√π · 1/(u + (1/2)/(u + 1/(u + (3/2)/(u + ...))))
    let mut tail = u;
    for k in (1..=60).rev() {
        tail = u + 0.5 * k as f64 / tail;
    }
    -u * u - 0.5 * PI.ln() - tail.ln() - std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn q_reference_values() {
        // mpmath, 40 digits
        let table = [
            (-8.0, 0.999_999_999_999_999_377_9),
            (-3.0, 0.998_650_101_968_369_905_47),
            (-1.0, 0.841_344_746_068_542_948_59),
            (0.3, 0.382_088_577_811_047_362_69),
            (1.0, 0.158_655_253_931_457_051_41),
            (2.0, 0.022_750_131_948_179_207_2),
            (3.0, 0.001_349_898_031_630_094_526_7),
            (5.0, 2.866_515_718_791_939_116_7e-7),
            (8.0, 6.220_960_574_271_784_123_5e-16),
            (12.0, 1.776_482_112_077_678_997_7e-33),
        ];
        for (x, want) in table {
            assert!(rel(q_function(x), want) < 1e-12, "Q({x})");
        }
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.281_551_565_5) - 0.1).abs() < 1e-10);
        assert!(q_function(40.0) < 1e-300);
    }

    #[test]
    fn q_symmetry() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((q_function(x) + q_function(-x) - 1.0).abs() <= 1e-12);
            x += 0.0625;
        }
    }

    #[test]
    fn ln_q_continues_past_underflow() {
        for x in [1.0, 10.0, 28.0, 30.0] {
            assert!(
                (ln_q_function(x) - q_function(x).ln()).abs() < 1e-11 * q_function(x).ln().abs()
            );
        }
        // Mills-ratio asymptote: Q(x) ≈ φ(x)/x (1 - 1/x²)
        let x = 100.0f64;
        let approx = -0.5 * x * x - (2.0 * PI).sqrt().ln() - x.ln()
            + (1.0 - 1.0 / (x * x) + 3.0 / x.powi(4)).ln();
        assert!((ln_q_function(x) - approx).abs() < 1e-9);
        assert!(ln_q_function(1e3).is_finite());
    }

    #[test]
    fn erfc_limits() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(-30.0) - 2.0).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn q_complements(x in -8.0f64..8.0) {
            proptest::prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() <= 1e-12);
        }
    }
}
