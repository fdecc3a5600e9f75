use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ring::{IntegerRing, Ring};
use crate::error::{AlgebraError, Result};

/// Dense univariate polynomial, constant term first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `degree` is `len - 1`. Construct through [`PolyRing`] or,
/// for coefficient types with a context-free zero, [`UniPoly::new`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T> UniPoly<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }
}

impl<T: Zero> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }
}

impl UniPoly<BigInt> {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Evaluate at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        PolyRing::new(IntegerRing).eval(self, x)
    }
}

/// Human-readable rendering in the variable `var`, highest degree first.
pub struct PolyDisplay<'a, T> {
    poly: &'a UniPoly<T>,
    var: &'a str,
}

impl<T> UniPoly<T> {
    pub fn display<'a>(&'a self, var: &'a str) -> PolyDisplay<'a, T> {
        PolyDisplay { poly: self, var }
    }
}

impl<T: fmt::Display> fmt::Display for PolyDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = &self.poly.coeffs;
        if coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in coeffs.iter().enumerate().rev() {
            let s = c.to_string();
            if s == "0" {
                continue;
            }
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == "1";
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "{}", self.var)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Display for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display("x").fmt(f)
    }
}

// JSON form: array of decimal strings, constant term first.
impl<T: fmt::Display> Serialize for UniPoly<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de, T> Deserialize<'de> for UniPoly<T>
where
    T: FromStr + Zero,
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coeffs = raw
            .iter()
            .map(|s| s.parse::<T>().map_err(|e| D::Error::custom(format!("{s:?}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(UniPoly::new(coeffs))
    }
}

/// Polynomials in one variable over a base ring.
#[derive(Debug, Clone, Default)]
pub struct PolyRing<R> {
    base: R,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<R::Elem>) -> UniPoly<R::Elem> {
        while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(&self, c: R::Elem) -> UniPoly<R::Elem> {
        self.from_coeffs(vec![c])
    }

    /// The variable itself.
    pub fn x(&self) -> UniPoly<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    /// `c * x^n`.
    pub fn monomial(&self, c: R::Elem, n: usize) -> UniPoly<R::Elem> {
        let mut coeffs = vec![self.base.zero(); n];
        coeffs.push(c);
        self.from_coeffs(coeffs)
    }

    /// Map an integer polynomial into this ring.
    pub fn lift(&self, f: &UniPoly<BigInt>) -> UniPoly<R::Elem> {
        self.from_coeffs(f.coeffs.iter().map(|c| self.base.from_int(c)).collect())
    }

    pub fn scale(&self, f: &UniPoly<R::Elem>, c: &R::Elem) -> UniPoly<R::Elem> {
        self.from_coeffs(f.coeffs.iter().map(|a| self.base.mul(a, c)).collect())
    }

    /// Horner evaluation at a point of the base ring.
    pub fn eval(&self, f: &UniPoly<R::Elem>, x: &R::Elem) -> R::Elem {
        f.coeffs.iter().rev().fold(self.base.zero(), |acc, c| {
            self.base.add(&self.base.mul(&acc, x), c)
        })
    }

    /// Evaluate at an element of an arbitrary ring `target` into which the
    /// coefficients are mapped by `embed`.
    pub fn eval_in<S: Ring>(
        &self,
        f: &UniPoly<R::Elem>,
        target: &S,
        x: &S::Elem,
        embed: impl Fn(&R::Elem) -> S::Elem,
    ) -> S::Elem {
        f.coeffs.iter().rev().fold(target.zero(), |acc, c| {
            target.add(&target.mul(&acc, x), &embed(c))
        })
    }

    /// `f(g(x))`.
    pub fn compose(&self, f: &UniPoly<R::Elem>, g: &UniPoly<R::Elem>) -> UniPoly<R::Elem> {
        f.coeffs.iter().rev().fold(self.zero(), |acc, c| {
            self.add(&self.mul(&acc, g), &self.constant(c.clone()))
        })
    }

    /// Division with remainder: `a = b*q + r` with `deg r < deg b`.
    ///
    /// The leading coefficient of `b` must be a unit of the base ring.
    pub fn divmod(
        &self,
        a: &UniPoly<R::Elem>,
        b: &UniPoly<R::Elem>,
    ) -> Result<(UniPoly<R::Elem>, UniPoly<R::Elem>)> {
        let lead = b
            .leading()
            .ok_or_else(|| AlgebraError::domain("division by the zero polynomial"))?;
        let lead_inv = self.base.unit_inverse(lead).ok_or_else(|| {
            AlgebraError::domain(format!("leading coefficient {lead:?} is not a unit"))
        })?;
        let db = b.coeffs.len() - 1;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((self.zero(), a.clone()));
        }
        let mut quot = vec![self.base.zero(); rem.len() - db];
        for n in (db..rem.len()).rev() {
            if self.base.is_zero(&rem[n]) {
                continue;
            }
            let c = self.base.mul(&rem[n], &lead_inv);
            for (i, bc) in b.coeffs.iter().enumerate() {
                if self.base.is_zero(bc) {
                    continue;
                }
                let t = self.base.mul(&c, bc);
                rem[n - db + i] = self.base.sub(&rem[n - db + i], &t);
            }
            quot[n - db] = c;
        }
        rem.truncate(db);
        Ok((self.from_coeffs(quot), self.from_coeffs(rem)))
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = UniPoly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        UniPoly { coeffs: Vec::new() }
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn from_int(&self, n: &BigInt) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = self.base.add(c, s);
        }
        self.from_coeffs(coeffs)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        UniPoly {
            coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(),
        }
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = self.base.zero();
        let coeffs = (0..n)
            .map(|i| {
                let x = a.coeffs.get(i).unwrap_or(&zero);
                let y = b.coeffs.get(i).unwrap_or(&zero);
                self.base.sub(x, y)
            })
            .collect();
        self.from_coeffs(coeffs)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut coeffs = vec![self.base.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                coeffs[i + j] = self.base.add(&coeffs[i + j], &self.base.mul(x, y));
            }
        }
        self.from_coeffs(coeffs)
    }

    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        match a.coeffs.as_slice() {
            [c] => self.base.unit_inverse(c).map(|inv| self.constant(inv)),
            _ => None,
        }
    }
}

/// Division with remainder of polynomials over `ring`; see [`PolyRing::divmod`].
pub fn poly_divmod<R: Ring + Clone>(
    ring: &R,
    a: &UniPoly<R::Elem>,
    b: &UniPoly<R::Elem>,
) -> Result<(UniPoly<R::Elem>, UniPoly<R::Elem>)> {
    PolyRing::new(ring.clone()).divmod(a, b)
}

impl<T> From<UniPoly<T>> for Vec<T> {
    fn from(p: UniPoly<T>) -> Vec<T> {
        p.coeffs
    }
}

impl UniPoly<BigInt> {
    /// True iff the polynomial is exactly the constant `1`.
    pub fn is_one(&self) -> bool {
        matches!(self.coeffs.as_slice(), [c] if c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{BigRational, RationalField};
    use proptest::prelude::*;

    fn zpoly(c: &[i64]) -> UniPoly<BigInt> {
        UniPoly::from_i64s(c)
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let f = zpoly(&[1, 2, 0, 0]);
        assert_eq!(f.degree(), Some(1));
        assert!(zpoly(&[0, 0]).is_zero());
        assert_eq!(zpoly(&[]).degree(), None);
    }

    #[test]
    fn divmod_examples() {
        let ring = PolyRing::new(IntegerRing);
        let (q, r) = ring.divmod(&zpoly(&[1, 1, 1]), &zpoly(&[-1, 1])).unwrap();
        assert_eq!(q, zpoly(&[2, 1]));
        assert_eq!(r, zpoly(&[3]));

        let b = zpoly(&[4, 0, 7, 1]);
        let (q, r) = ring.divmod(&b, &b).unwrap();
        assert!(q.is_one());
        assert!(r.is_zero());

        // (1+x)^3 - 1 divided by x
        let (q, r) = ring.divmod(&zpoly(&[0, 3, 3, 1]), &zpoly(&[0, 1])).unwrap();
        assert_eq!(q, zpoly(&[3, 3, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_rejects_non_unit_leading() {
        let ring = PolyRing::new(IntegerRing);
        let err = ring.divmod(&zpoly(&[1, 1, 1]), &zpoly(&[1, 2])).unwrap_err();
        assert!(matches!(err, AlgebraError::Domain(_)));
        assert!(ring.divmod(&zpoly(&[1]), &zpoly(&[])).is_err());
    }

    #[test]
    fn divmod_over_rationals_accepts_any_nonzero_leading() {
        let ring = PolyRing::new(RationalField);
        let a = UniPoly::new(vec![BigRational::from_integer(1.into()); 3]);
        let b = UniPoly::new(vec![
            BigRational::from_integer(1.into()),
            BigRational::from_integer(2.into()),
        ]);
        let (q, r) = ring.divmod(&a, &b).unwrap();
        assert_eq!(ring.add(&ring.mul(&b, &q), &r), a);
    }

    #[test]
    fn compose_and_eval() {
        let ring = PolyRing::new(IntegerRing);
        let f = zpoly(&[1, 0, 1]);
        let g = zpoly(&[1, 1]);
        assert_eq!(ring.compose(&f, &g), zpoly(&[2, 2, 1]));
        assert_eq!(f.eval_int(&BigInt::from(3)), BigInt::from(10));
    }

    #[test]
    fn display() {
        assert_eq!(zpoly(&[3, 3, 1]).display("y").to_string(), "y^2 + 3*y + 3");
        assert_eq!(zpoly(&[-1, 1]).to_string(), "x - 1");
        assert_eq!(zpoly(&[0, -2]).to_string(), "-2*x");
        assert_eq!(zpoly(&[]).to_string(), "0");
    }

    #[test]
    fn json_format() {
        let f = zpoly(&[3, -3, 1]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"["3","-3","1"]"#);
        let back: UniPoly<BigInt> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<UniPoly<BigInt>>(r#"["x"]"#).is_err());
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = UniPoly<BigInt>> {
        prop::collection::vec(-50i64..50, 0..max_len).prop_map(|c| zpoly(&c))
    }

    fn arb_monic(max_len: usize) -> impl Strategy<Value = UniPoly<BigInt>> {
        (prop::collection::vec(-50i64..50, 0..max_len), prop::bool::ANY).prop_map(|(mut c, neg)| {
            c.push(if neg { -1 } else { 1 });
            zpoly(&c)
        })
    }

    proptest! {
        #[test]
        fn divmod_round_trip(a in arb_poly(12), b in arb_monic(6)) {
            let ring = PolyRing::new(IntegerRing);
            let (q, r) = ring.divmod(&a, &b).unwrap();
            prop_assert!(r.degree() < b.degree() || r.is_zero());
            prop_assert_eq!(ring.add(&ring.mul(&b, &q), &r), a);
        }

        #[test]
        fn ring_axioms(a in arb_poly(6), b in arb_poly(6), c in arb_poly(6)) {
            let ring = PolyRing::new(IntegerRing);
            prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
            prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
            prop_assert_eq!(
                ring.mul(&a, &ring.add(&b, &c)),
                ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c))
            );
            prop_assert_eq!(ring.sub(&ring.add(&a, &b), &b), a);
        }
    }
}
