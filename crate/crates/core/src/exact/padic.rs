use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};

/// An element of `Z_p` known modulo `p^N`.
///
/// The residue is always reduced into `[0, p^N)`. Arithmetic between residues
/// of different `(p, N)` is refused rather than coerced to the lower precision.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PadicResidue {
    prime: u64,
    precision: u32,
    #[serde(with = "crate::exact::decimal")]
    residue: BigInt,
}

impl PadicResidue {
    pub fn new(prime: u64, precision: u32, value: &BigInt) -> Result<Self> {
        if prime < 2 {
            return Err(AlgebraError::domain(format!("p = {prime} must be >= 2")));
        }
        if precision < 1 {
            return Err(AlgebraError::domain("precision must be >= 1"));
        }
        let modulus = Self::modulus_of(prime, precision);
        Ok(PadicResidue {
            prime,
            precision,
            residue: value.mod_floor(&modulus),
        })
    }

    pub fn from_i64(prime: u64, precision: u32, value: i64) -> Result<Self> {
        Self::new(prime, precision, &BigInt::from(value))
    }

    fn modulus_of(prime: u64, precision: u32) -> BigInt {
        Pow::pow(BigInt::from(prime), precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        Self::modulus_of(self.prime, self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Number of factors of `p` in the residue, capped at the precision.
    pub fn valuation(&self) -> u32 {
        let p = BigInt::from(self.prime);
        let mut r = self.residue.clone();
        let mut v = 0;
        while v < self.precision && !r.is_zero() && (&r % &p).is_zero() {
            r /= &p;
            v += 1;
        }
        if r.is_zero() {
            self.precision
        } else {
            v
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime || self.precision != other.precision {
            return Err(AlgebraError::RingMismatch(format!(
                "residues mod {}^{} and {}^{}",
                self.prime, self.precision, other.prime, other.precision
            )));
        }
        Ok(())
    }

    fn with(&self, value: BigInt) -> Self {
        PadicResidue {
            prime: self.prime,
            precision: self.precision,
            residue: value.mod_floor(&self.modulus()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(&self.residue + &other.residue))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(&self.residue - &other.residue))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(&self.residue * &other.residue))
    }

    pub fn neg(&self) -> Self {
        self.with(-&self.residue)
    }
}

impl fmt::Display for PadicResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}
