//! Gamma function.

#![allow(clippy::excessive_precision)]

use crate::scalar::Real;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation, with the reflection
/// formula below 1/2. Poles at non-positive integers give infinity or NaN.
pub fn gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::nan();
        }
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let mut sum = T::lit(LANCZOS_P[0]);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        sum += T::lit(p) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    (T::TAU()).sqrt() * t.powf(x + half) * (-t).exp() * sum
}
