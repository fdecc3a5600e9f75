//! Exact integer and rational arithmetic, dense univariate polynomials,
//! truncated p-adic residues and binomial utilities.
//!
//! Integers and rationals are the `num` crate's `BigInt` and `BigRational`.
//! `BigRational` keeps itself in lowest terms with a positive denominator, so
//! integrality of a rational is a denominator comparison.

mod padic;
mod poly;
mod ring;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use padic::PadicResidue;
pub use poly::{poly_divmod, PolyRing, UniPoly};
pub use ring::{IntegerRing, RationalField, Ring};

use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::error::{AlgebraError, Result};

/// Serde adapters writing integers as decimal strings, for use with
/// `#[serde(with = "...")]`.
pub mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }

    pub mod option {
        use num_bigint::BigInt;
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&v.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| s.parse().map_err(D::Error::custom))
                .transpose()
        }
    }
}

/// Exact unbounded integer.
pub type ArbitraryInteger = BigInt;
/// Exact rational in lowest terms.
pub type ArbitraryRational = BigRational;

/// Trial-division primality test; inputs here are small primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(AlgebraError::domain(format!("{p} is not prime")))
    }
}

/// `n` choose `i`, exactly.
pub fn binomial(n: u64, i: i64) -> Result<BigInt> {
    if i < 0 || i as u64 > n {
        return Err(AlgebraError::domain(format!(
            "binomial({n}, {i}): index out of range"
        )));
    }
    let i = (i as u64).min(n - i as u64);
    let mut acc = BigInt::one();
    for t in 0..i {
        acc *= n - t;
        acc /= t + 1;
    }
    Ok(acc)
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::one();
    row.push(acc.clone());
    for t in 0..n {
        acc = acc * (n - t) / (t + 1);
        row.push(acc.clone());
    }
    row
}

/// `C(p, i) / p` for `1 <= i <= p - 1`, which is integral because `p` is prime.
pub fn divided_binomial(p: u64, i: i64) -> Result<BigInt> {
    require_prime(p)?;
    if i < 1 || i as u64 >= p {
        return Err(AlgebraError::domain(format!(
            "divided_binomial({p}, {i}): need 1 <= i <= {}",
            p - 1
        )));
    }
    let c = binomial(p, i)?;
    let (q, r) = c.div_rem(&BigInt::from(p));
    debug_assert!(r.is_zero());
    Ok(q)
}

/// The Fermat quotient `(c - c^p) / p`, i.e. theta of an integer constant
/// when psi acts as the identity on `Z_p`.
pub fn fermat_theta(c: &BigInt, p: u64) -> Result<BigInt> {
    require_prime(p)?;
    let diff = c - Pow::pow(c, p as u32);
    let (q, r) = diff.div_rem(&BigInt::from(p));
    if !r.is_zero() {
        return Err(AlgebraError::Inconsistent(format!(
            "Fermat quotient of {c} at {p} is not integral"
        )));
    }
    Ok(q)
}

/// `base^exp` for machine-sized results, panicking on overflow.
pub(crate) fn upow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("prime power overflows u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, t| acc * t)
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2).unwrap(), BigInt::from(10));
        assert_eq!(binomial(11, 0).unwrap(), BigInt::one());
        assert_eq!(binomial(7, 3).unwrap(), BigInt::from(35));
        assert!(binomial(4, 5).is_err());
        assert!(binomial(4, -1).is_err());
    }

    #[test]
    fn binomial_matches_factorials() {
        for n in 0..20u64 {
            let row = binomial_row(n);
            for i in 0..=n {
                let expect = factorial(n) / (factorial(i) * factorial(n - i));
                assert_eq!(binomial(n, i as i64).unwrap(), expect);
                assert_eq!(row[i as usize], expect);
            }
        }
    }

    #[test]
    fn divided_binomial_values() {
        assert_eq!(divided_binomial(3, 1).unwrap(), BigInt::from(1));
        assert_eq!(divided_binomial(5, 2).unwrap(), BigInt::from(2));
        assert_eq!(divided_binomial(2, 1).unwrap(), BigInt::from(1));
        assert!(divided_binomial(5, 0).is_err());
        assert!(divided_binomial(5, 5).is_err());
        assert!(divided_binomial(6, 1).is_err());
    }

    #[test]
    fn divided_binomial_times_p() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for i in 1..p as i64 {
                let d = divided_binomial(p, i).unwrap();
                assert_eq!(d * p, binomial(p, i).unwrap());
            }
        }
    }

    #[test]
    fn fermat_theta_values() {
        assert_eq!(fermat_theta(&BigInt::from(-1), 2).unwrap(), BigInt::from(-1));
        for p in [2u64, 3, 5, 7] {
            assert!(fermat_theta(&BigInt::one(), p).unwrap().is_zero());
        }
        assert_eq!(fermat_theta(&BigInt::from(2), 3).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn big() -> impl Strategy<Value = BigInt> {
        (any::<i64>(), any::<i64>(), 0u32..3)
            .prop_map(|(hi, lo, shift)| (BigInt::from(hi) << (64 * shift)) + BigInt::from(lo))
    }

    proptest! {
        #[test]
        fn integer_ring_axioms(a in big(), b in big(), c in big()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn rational_reduced(n in -1000i64..1000, d in 1i64..1000) {
            let q = BigRational::new(BigInt::from(n), BigInt::from(d));
            prop_assert!(q.denom() > &BigInt::zero());
            prop_assert!(num_integer::Integer::gcd(q.numer(), q.denom()).is_one() || q.numer().is_zero());
        }

        #[test]
        fn fermat_theta_unwinds(c in -10_000i64..10_000, pi in 0usize..6) {
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            let c = BigInt::from(c);
            let t = fermat_theta(&c, p).unwrap();
            prop_assert_eq!(t * p + Pow::pow(&c, p as u32), c);
        }
    }
}
