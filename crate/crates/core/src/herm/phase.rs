//! Exact unit-circle phases: a rational `q` standing for `e^{2 pi i q}`.
//!
//! Products of phases are sums of the rational values mod 1, so every phase
//! computation in the pipeline stays exact until the final materialization
//! to floating point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::ratlin::Rational;

/// `e^{2 pi i q}` with `q` reduced into `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Phase(Rational);

impl Phase {
    pub fn new(q: Rational) -> Phase {
        let f = q.floor();
        Phase(q - f)
    }

    pub fn one() -> Phase {
        Phase(Rational::zero())
    }

    /// The reduced exponent in `[0, 1)`.
    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, other: &Phase) -> Phase {
        Phase::new(&self.0 + &other.0)
    }

    pub fn inv(&self) -> Phase {
        Phase::new(-self.0.clone())
    }

    pub fn conj(&self) -> Phase {
        self.inv()
    }

    pub fn pow(&self, k: &BigInt) -> Phase {
        Phase::new(&self.0 * Rational::from_integer(k.clone()))
    }

    /// Materialize at working precision. Quadrant folding keeps the argument
    /// of the trigonometric kernel in `[0, pi/2]`.
    pub fn to_c64(&self) -> Complex64 {
        let q = &self.0;
        let quarter = Rational::new(1.into(), 4.into());
        // q = quadrant/4 + t with t in [0, 1/4)
        let quadrant = (q / &quarter).floor().to_integer().to_i64().unwrap_or(0);
        let t = q - Rational::new(quadrant.into(), 4.into());
        let (c, s) = if t.is_zero() {
            (1.0, 0.0)
        } else if t == Rational::new(1.into(), 8.into()) {
            let v = std::f64::consts::FRAC_1_SQRT_2;
            (v, v)
        } else {
            let angle = 2.0 * std::f64::consts::PI * rational_to_f64(&t);
            (angle.cos(), angle.sin())
        };
        match quadrant {
            0 => Complex64::new(c, s),
            1 => Complex64::new(-s, c),
            2 => Complex64::new(-c, -s),
            _ => Complex64::new(s, -c),
        }
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Phase of `e^{2 pi i (mu . n)}` for an integer vector `n`.
pub fn phase_dot_int(mu: &[Rational], n: &[BigInt]) -> Phase {
    assert_eq!(mu.len(), n.len());
    Phase::new(
        mu.iter()
            .zip(n)
            .map(|(m, k)| m * Rational::from_integer(k.clone()))
            .sum(),
    )
}

/// Phase of `e^{2 pi i (a . b)}` for rational vectors.
pub fn phase_dot(a: &[Rational], b: &[Rational]) -> Phase {
    assert_eq!(a.len(), b.len());
    Phase::new(a.iter().zip(b).map(|(x, y)| x * y).sum())
}

/// `sin(pi q)` evaluated from the exact rational argument, with the sign and
/// the special values handled exactly.
pub fn sin_pi(q: &Rational) -> f64 {
    let (sign, folded) = fold_sin(q);
    if folded.is_zero() {
        return 0.0;
    }
    let half = Rational::new(1.into(), 2.into());
    if folded == half {
        return sign as f64;
    }
    sign as f64 * (std::f64::consts::PI * rational_to_f64(&folded)).sin()
}

/// Exact sign of `sin(pi q)`: 0 when `q` is an integer.
pub fn sin_pi_sign(q: &Rational) -> i8 {
    let (sign, folded) = fold_sin(q);
    if folded.is_zero() {
        0
    } else {
        sign
    }
}

/// Reduce to `sin(pi q) = sign * sin(pi folded)` with `folded` in `[0, 1/2]`.
fn fold_sin(q: &Rational) -> (i8, Rational) {
    let f = q.floor();
    let mut frac = q - &f;
    // sin(pi (k + frac)) = (-1)^k sin(pi frac)
    let mut sign: i8 = if f.to_integer().is_even() { 1 } else { -1 };
    let one = Rational::one();
    let half = Rational::new(1.into(), 2.into());
    if frac > half {
        frac = one - frac;
    }
    if frac.is_zero() {
        sign = 1;
    }
    (sign, frac)
}

/// Parity sign `(-1)^k` of an integer-valued rational.
pub fn parity_sign(q: &Rational) -> i8 {
    debug_assert!(q.denom().is_one(), "parity of a non-integer");
    if q.numer().is_even() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn reduction_into_unit_interval() {
        assert_eq!(Phase::new(rat(7, 3)).value(), &rat(1, 3));
        assert_eq!(Phase::new(rat(-1, 4)).value(), &rat(3, 4));
        assert!(Phase::new(rat(5, 1)).is_one());
    }

    #[test]
    fn group_law() {
        let a = Phase::new(rat(2, 3));
        let b = Phase::new(rat(1, 2));
        assert_eq!(a.mul(&b).value(), &rat(1, 6));
        assert!(a.mul(&a.inv()).is_one());
        assert_eq!(a.pow(&3.into()).value(), &rat(0, 1));
    }

    #[test]
    fn exact_cardinal_directions() {
        assert_eq!(Phase::new(rat(0, 1)).to_c64(), Complex64::new(1.0, 0.0));
        assert_eq!(Phase::new(rat(1, 4)).to_c64(), Complex64::new(0.0, 1.0));
        assert_eq!(Phase::new(rat(1, 2)).to_c64(), Complex64::new(-1.0, 0.0));
        assert_eq!(Phase::new(rat(3, 4)).to_c64(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn unit_modulus() {
        for k in 1..60 {
            let p = Phase::new(rat(k, 61));
            assert_abs_diff_eq!(p.to_c64().norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sin_pi_values() {
        assert_eq!(sin_pi(&rat(0, 1)), 0.0);
        assert_eq!(sin_pi(&rat(1, 2)), 1.0);
        assert_eq!(sin_pi(&rat(3, 2)), -1.0);
        assert_abs_diff_eq!(sin_pi(&rat(1, 6)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sin_pi(&rat(-13, 10)), 0.8090169943749475, epsilon = 1e-15);
        assert_abs_diff_eq!(
            sin_pi(&rat(49, 30)),
            -0.9135454576426009,
            epsilon = 1e-15
        );
    }

    #[test]
    fn sign_agreement() {
        for p in -25i64..=25 {
            let q = rat(p, 7);
            let s = sin_pi(&q);
            let sg = sin_pi_sign(&q) as f64;
            assert_eq!(s == 0.0, sg == 0.0);
            if s != 0.0 {
                assert_eq!(s.signum(), sg.signum());
            }
        }
    }

    #[test]
    fn parity() {
        assert_eq!(parity_sign(&rat(-1, 1)), -1);
        assert_eq!(parity_sign(&rat(0, 1)), 1);
        assert_eq!(parity_sign(&rat(4, 1)), 1);
        assert_eq!(parity_sign(&rat(-3, 1)), -1);
    }
}
