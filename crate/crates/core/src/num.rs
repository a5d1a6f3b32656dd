//! Small helpers over `num`'s exact integer and rational types.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact integer.
pub type Z = BigInt;
/// Exact rational.
pub type Q = BigRational;

/// `n` as a `Z`.
pub fn z(n: i64) -> Z {
    Z::from(n)
}

/// `n` as a `Q`.
pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

/// `n / d` as a `Q`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

/// `n!` as a `Z`.
pub fn factorial(n: u64) -> Z {
    let mut acc = Z::one();
    for k in 2..=n {
        acc *= Z::from(k);
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a `Z` (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> Z {
    if k > n {
        return Z::zero();
    }
    let k = k.min(n - k);
    let mut acc = Z::one();
    for i in 0..k {
        acc = acc * Z::from(n - i) / Z::from(i + 1);
    }
    acc
}

/// Sign of a rational as -1, 0, 1.
pub fn sign_q(x: &Q) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// True when the rational is a (possibly negative) integer.
pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Parse a rational from `p`, `-p`, or `p/q` decimal notation.
pub fn parse_q(s: &str) -> Option<Q> {
    s.parse::<Q>().ok()
}

/// Format a rational as `p` or `p/q` decimal notation (canonical form).
pub fn format_q(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(xs: &[Q]) -> Z {
    let mut acc = Z::one();
    for x in xs {
        acc = num::integer::lcm(acc, x.denom().clone());
    }
    acc
}

/// Scale a rational vector to a primitive integer vector (gcd 1), preserving
/// direction.  Returns None for the zero vector.
pub fn primitive_integer_vector(xs: &[Q]) -> Option<Vec<Z>> {
    if xs.iter().all(|x| x.is_zero()) {
        return None;
    }
    let den = common_denominator(xs);
    let ints: Vec<Z> = xs.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    let mut g = Z::zero();
    for v in &ints {
        g = num::integer::gcd(g, v.abs());
    }
    Some(ints.into_iter().map(|v| v / g.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), z(1));
        assert_eq!(factorial(5), z(120));
        assert_eq!(factorial(10), z(3628800));
    }

    #[test]
    fn binomial_matches_pascal() {
        for n in 0..12u64 {
            for k in 0..=n {
                let lhs = binomial(n + 1, k + 1);
                let rhs = binomial(n, k) + binomial(n, k + 1);
                if k + 1 <= n {
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert_eq!(binomial(10, 3), z(120));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "-7", "3/4", "-22/7"] {
            let x = parse_q(s).unwrap();
            assert_eq!(format_q(&x), s);
        }
        // Non-canonical input normalises.
        assert_eq!(format_q(&parse_q("4/2").unwrap()), "2");
    }

    #[test]
    fn primitive_vector_clears_denominators() {
        let v = [qr(1, 2), qr(-3, 4), q(0)];
        assert_eq!(primitive_integer_vector(&v).unwrap(), vec![z(2), z(-3), z(0)]);
        assert!(primitive_integer_vector(&[q(0), q(0)]).is_none());
    }
}
