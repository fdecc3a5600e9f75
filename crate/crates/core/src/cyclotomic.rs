//! Arithmetic in `Z[x]/Phi_{p^k}(x)`, the ring of integers of the `p^k`-th
//! cyclotomic field, on the power basis `1, zeta, ..., zeta^{d-1}` with
//! `d = p^{k-1}(p-1)`.
//!
//! `Z[zeta]` is free on the power basis, so `a` lies in `p Z[zeta]` exactly
//! when every coordinate of `a` is divisible by `p`. That coordinatewise test
//! is the only valuation-like query this module offers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{AlgebraError, Result};
use crate::exact::{require_prime, upow, PolyRing, Ring, UniPoly};

/// `Phi_{p^k}(x) = sum_{i<p} x^{i p^{k-1}}`.
pub fn cyclotomic_polynomial(p: u64, k: u32) -> Result<UniPoly<BigInt>> {
    require_prime(p)?;
    if k < 1 {
        return Err(AlgebraError::domain("cyclotomic level must be >= 1"));
    }
    let step = upow(p, k - 1) as usize;
    let mut coeffs = vec![BigInt::zero(); (p as usize - 1) * step + 1];
    for i in 0..p as usize {
        coeffs[i * step] = BigInt::one();
    }
    Ok(UniPoly::new(coeffs))
}

/// The ring `Z[zeta_{p^k}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloRing {
    p: u64,
    k: u32,
    order: u64,
    degree: usize,
    modulus: UniPoly<BigInt>,
}

/// An element of a [`CycloRing`], as its exactly `d` power-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycloElem {
    p: u64,
    k: u32,
    coeffs: Vec<BigInt>,
}

impl CycloElem {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// The integer `c` if this element is the constant `c`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = UniPoly::new(self.coeffs.clone());
        write!(f, "{}", poly.display("z"))
    }
}

#[derive(Serialize, Deserialize)]
struct CycloElemRepr {
    p: u64,
    k: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycloElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloElemRepr {
            p: self.p,
            k: self.k,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloElemRepr::deserialize(d)?;
        let ring = CycloRing::new(repr.p, repr.k).map_err(D::Error::custom)?;
        if repr.coeffs.len() != ring.degree {
            return Err(D::Error::custom(format!(
                "expected {} coefficients, got {}",
                ring.degree,
                repr.coeffs.len()
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CycloElem {
            p: repr.p,
            k: repr.k,
            coeffs,
        })
    }
}

impl CycloRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let modulus = cyclotomic_polynomial(p, k)?;
        let order = upow(p, k);
        Ok(CycloRing {
            p,
            k,
            order,
            degree: (order - order / p) as usize,
            modulus,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    /// `p^k`, the multiplicative order of `zeta`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Rank `d = p^{k-1}(p-1)` of the power basis.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &UniPoly<BigInt> {
        &self.modulus
    }

    fn contains(&self, a: &CycloElem) -> bool {
        a.p == self.p && a.k == self.k
    }

    fn check(&self, a: &CycloElem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch(format!(
                "element of Z[zeta_{}^{}] used in Z[zeta_{}^{}]",
                a.p, a.k, self.p, self.k
            )))
        }
    }

    fn assert_member(&self, a: &CycloElem) {
        if let Err(e) = self.check(a) {
            panic!("{e}");
        }
    }

    /// Reduce an arbitrary coefficient vector modulo `Phi_{p^k}`.
    ///
    /// The modulus is monic with `p` unit coefficients spaced `p^{k-1}`
    /// apart, so the remainder loop only touches those positions.
    fn reduce(&self, mut coeffs: Vec<BigInt>) -> CycloElem {
        let d = self.degree;
        let step = (self.order / self.p) as usize;
        for n in (d..coeffs.len()).rev() {
            if coeffs[n].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut coeffs[n]);
            let base = n - d;
            for i in 0..(self.p as usize - 1) {
                coeffs[base + i * step] -= &c;
            }
        }
        coeffs.resize(d, BigInt::zero());
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs,
        }
    }

    /// The element with the given power-basis coordinates, reduced if longer
    /// than `d`.
    pub fn element(&self, coeffs: Vec<BigInt>) -> CycloElem {
        self.reduce(coeffs)
    }

    pub fn from_i64s(&self, coeffs: &[i64]) -> CycloElem {
        self.reduce(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Image of an integer polynomial under `x -> zeta`.
    pub fn from_poly(&self, f: &UniPoly<BigInt>) -> CycloElem {
        self.reduce(f.coeffs().to_vec())
    }

    pub fn as_poly(&self, a: &CycloElem) -> UniPoly<BigInt> {
        UniPoly::new(a.coeffs.clone())
    }

    /// `zeta^j`, with `j` taken modulo `p^k`.
    pub fn zeta_power(&self, j: i64) -> CycloElem {
        let j = j.mod_floor(&(self.order as i64)) as usize;
        let mut coeffs = vec![BigInt::zero(); j.max(self.degree - 1) + 1];
        coeffs[j] = BigInt::one();
        self.reduce(coeffs)
    }

    pub fn zeta(&self) -> CycloElem {
        self.zeta_power(1)
    }

    /// `1 + zeta + ... + zeta^{j-1}`, the algebraic integer equal to
    /// `(1 - zeta^j) / (1 - zeta)`.
    pub fn geometric_unit(&self, j: u64) -> Result<CycloElem> {
        if j < 1 {
            return Err(AlgebraError::domain("geometric_unit needs j >= 1"));
        }
        let mut coeffs = vec![BigInt::zero(); self.degree];
        for l in 0..j {
            let idx = (l % self.order) as usize;
            if idx < self.degree {
                coeffs[idx] += 1;
            } else {
                let reduced = self.zeta_power(idx as i64);
                for (c, r) in coeffs.iter_mut().zip(&reduced.coeffs) {
                    *c += r;
                }
            }
        }
        Ok(CycloElem {
            p: self.p,
            k: self.k,
            coeffs,
        })
    }

    /// Whether `a` lies in `p Z[zeta]`.
    pub fn divisible_by_p(&self, a: &CycloElem) -> bool {
        self.assert_member(a);
        let p = BigInt::from(self.p);
        a.coeffs.iter().all(|c| c.is_multiple_of(&p))
    }

    /// `a / p`, defined only when [`divisible_by_p`](Self::divisible_by_p).
    pub fn exact_divide_by_p(&self, a: &CycloElem) -> Result<CycloElem> {
        self.check(a)?;
        if !self.divisible_by_p(a) {
            return Err(AlgebraError::NotDivisible(format!(
                "{a} is not divisible by {} in Z[zeta_{}]",
                self.p, self.order
            )));
        }
        let p = BigInt::from(self.p);
        Ok(CycloElem {
            p: self.p,
            k: self.k,
            coeffs: a.coeffs.iter().map(|c| c / &p).collect(),
        })
    }

    pub fn checked_add(&self, a: &CycloElem, b: &CycloElem) -> Result<CycloElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_sub(&self, a: &CycloElem, b: &CycloElem) -> Result<CycloElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub(a, b))
    }

    pub fn checked_mul(&self, a: &CycloElem, b: &CycloElem) -> Result<CycloElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Evaluate an integer polynomial at `a`.
    pub fn eval_poly(&self, f: &UniPoly<BigInt>, a: &CycloElem) -> CycloElem {
        PolyRing::new(crate::exact::IntegerRing).eval_in(f, self, a, |c| self.from_int(c))
    }
}

/// Ring operations panic on elements of a different cyclotomic ring; use the
/// `checked_*` methods to get an error instead.
impl Ring for CycloRing {
    type Elem = CycloElem;

    fn zero(&self) -> CycloElem {
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs: vec![BigInt::zero(); self.degree],
        }
    }

    fn one(&self) -> CycloElem {
        self.from_int(&BigInt::one())
    }

    fn from_int(&self, n: &BigInt) -> CycloElem {
        let mut e = self.zero();
        e.coeffs[0] = n.clone();
        e
    }

    fn is_zero(&self, a: &CycloElem) -> bool {
        a.coeffs.iter().all(Zero::is_zero)
    }

    fn add(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.assert_member(a);
        self.assert_member(b);
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    fn sub(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.assert_member(a);
        self.assert_member(b);
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    fn neg(&self, a: &CycloElem) -> CycloElem {
        self.assert_member(a);
        CycloElem {
            p: self.p,
            k: self.k,
            coeffs: a.coeffs.iter().map(|x| -x).collect(),
        }
    }

    // Schoolbook product, then remainder by Phi_{p^k}.
    fn mul(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        self.assert_member(a);
        self.assert_member(b);
        let d = self.degree;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    fn unit_inverse(&self, a: &CycloElem) -> Option<CycloElem> {
        match a.as_integer() {
            Some(c) if c.is_one() || (-c).is_one() => Some(a.clone()),
            _ => None,
        }
    }
}
