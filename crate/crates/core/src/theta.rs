//! The free theta-ring on finitely many generators.
//!
//! Atoms are [`ThetaVar`]s `x_{g,i}`, standing for `theta^i(x_g)`; the free
//! theta-ring over `Z_p` on generators `x_g` is the polynomial ring in all of
//! them. `psi` is the ring endomorphism fixing constants with
//! `psi(x_{g,i}) = x_{g,i}^p + p x_{g,i+1}`, and `theta` is *defined* as
//! `(psi(f) - f^p) / p`. Sum and product rules for `theta` are therefore
//! theorems checked by the `verify_*` functions, not definitions.
//!
//! Coefficients are exact rationals so the division by `p` can be carried
//! out unconditionally and integrality checked afterwards.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::exact::{divided_binomial, require_prime, Ring};

/// Sign of the cross term in
/// `theta(x + y) = theta(x) + theta(y) + sign * sum_{0<i<p} C(p,i)/p x^i y^(p-i)`,
/// as established by [`verify_additivity`]. Expanding
/// `psi(x + y) = (x + y)^p + p theta(x + y)` forces it to be negative.
pub const ADDITIVITY_SIGN: i64 = -1;

/// Default bound on the number of monomials any intermediate may hold.
pub const DEFAULT_MONOMIAL_CAP: usize = 1_000_000;

/// The atom `theta^level(x_generator)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ThetaVar {
    pub generator: u32,
    pub level: u32,
}

impl ThetaVar {
    pub const fn new(generator: u32, level: u32) -> Self {
        ThetaVar { generator, level }
    }

    /// `theta` of this atom.
    pub const fn next(self) -> Self {
        ThetaVar::new(self.generator, self.level + 1)
    }
}

impl fmt::Display for ThetaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            0 => write!(f, "x{}", self.generator),
            l => write!(f, "x{}_{}", self.generator, l),
        }
    }
}

/// A monomial: atoms with positive exponents, sorted by atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(ThetaVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: ThetaVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Build from arbitrary `(atom, exponent)` pairs; repeated atoms are merged
    /// and zero exponents dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = (ThetaVar, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(ThetaVar, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (v, e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// An element of the free theta-ring at the prime `p`, with exact rational
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaPoly {
    p: u64,
    terms: BTreeMap<Monomial, BigRational>,
}

/// One term in the JSON form of a [`ThetaPoly`]: the monomial as
/// `[generator, level, exponent]` triples and the coefficient as a decimal
/// string (`"n"` or `"n/d"`).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ThetaTerm {
    pub monomial: Vec<[u32; 3]>,
    pub coeff: String,
}

impl ThetaPoly {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Every coefficient has denominator one.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Every coefficient is an integer divisible by `p`.
    pub fn divisible_by_p(&self) -> bool {
        let p = BigInt::from(self.p);
        self.terms
            .values()
            .all(|c| c.is_integer() && (c.numer() % &p).is_zero())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn to_terms(&self) -> Vec<ThetaTerm> {
        self.terms
            .iter()
            .map(|(m, c)| ThetaTerm {
                monomial: m
                    .factors()
                    .iter()
                    .map(|&(v, e)| [v.generator, v.level, e])
                    .collect(),
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_terms(p: u64, terms: &[ThetaTerm]) -> Result<Self> {
        require_prime(p)?;
        let mut poly = ThetaPoly {
            p,
            terms: BTreeMap::new(),
        };
        for t in terms {
            let coeff: BigRational = t
                .coeff
                .parse()
                .map_err(|e| AlgebraError::Parse(format!("coefficient {:?}: {e}", t.coeff)))?;
            let m = Monomial::from_factors(
                t.monomial
                    .iter()
                    .map(|&[g, i, e]| (ThetaVar::new(g, i), e)),
            );
            poly.add_term(m, coeff);
        }
        Ok(poly)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl Serialize for ThetaPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_terms().serialize(s)
    }
}

impl fmt::Display for ThetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(a.0.cmp(b.0)));
        for (n, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.factors().is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Arithmetic context for the free theta-ring at a prime `p`.
#[derive(Clone, Debug)]
pub struct ThetaRing {
    p: u64,
    monomial_cap: usize,
}

impl ThetaRing {
    pub fn new(p: u64) -> Result<Self> {
        require_prime(p)?;
        Ok(ThetaRing {
            p,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        })
    }

    pub fn with_monomial_cap(mut self, cap: usize) -> Self {
        self.monomial_cap = cap;
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn monomial_cap(&self) -> usize {
        self.monomial_cap
    }

    fn empty(&self) -> ThetaPoly {
        ThetaPoly {
            p: self.p,
            terms: BTreeMap::new(),
        }
    }

    fn check(&self, f: &ThetaPoly) {
        assert_eq!(
            f.p, self.p,
            "theta polynomial at p = {} used in ring at p = {}",
            f.p, self.p
        );
    }

    fn guard(&self, terms: usize) -> Result<()> {
        if terms > self.monomial_cap {
            Err(AlgebraError::ResourceLimit {
                terms,
                cap: self.monomial_cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn zero(&self) -> ThetaPoly {
        self.empty()
    }

    pub fn one(&self) -> ThetaPoly {
        self.constant(BigRational::one())
    }

    pub fn constant(&self, c: BigRational) -> ThetaPoly {
        let mut f = self.empty();
        f.add_term(Monomial::one(), c);
        f
    }

    pub fn integer(&self, c: i64) -> ThetaPoly {
        self.constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(&self, v: ThetaVar) -> ThetaPoly {
        self.monomial(Monomial::var(v), BigRational::one())
    }

    /// The generator `x_g` (level zero).
    pub fn generator(&self, g: u32) -> ThetaPoly {
        self.var(ThetaVar::new(g, 0))
    }

    pub fn monomial(&self, m: Monomial, c: BigRational) -> ThetaPoly {
        let mut f = self.empty();
        f.add_term(m, c);
        f
    }

    pub fn add(&self, a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
        self.check(a);
        self.check(b);
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, a: &ThetaPoly) -> ThetaPoly {
        self.check(a);
        ThetaPoly {
            p: self.p,
            terms: a.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
        self.check(a);
        self.check(b);
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, a: &ThetaPoly, c: &BigRational) -> ThetaPoly {
        self.check(a);
        if c.is_zero() {
            return self.empty();
        }
        ThetaPoly {
            p: self.p,
            terms: a.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_int(&self, a: &ThetaPoly, c: i64) -> ThetaPoly {
        self.scale(a, &BigRational::from_integer(BigInt::from(c)))
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a ThetaPoly>) -> ThetaPoly {
        items
            .into_iter()
            .fold(self.empty(), |acc, f| self.add(&acc, f))
    }

    pub fn mul(&self, a: &ThetaPoly, b: &ThetaPoly) -> Result<ThetaPoly> {
        self.check(a);
        self.check(b);
        let mut out = self.empty();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
            self.guard(out.terms.len())?;
        }
        Ok(out)
    }

    pub fn pow(&self, a: &ThetaPoly, mut exp: u64) -> Result<ThetaPoly> {
        let mut result = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(&result, &base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(result)
    }

    /// `psi(x_{g,i}) = x_{g,i}^p + p x_{g,i+1}`.
    pub fn psi_atom(&self, v: ThetaVar) -> ThetaPoly {
        let mut f = self.monomial(Monomial::from_factors([(v, self.p as u32)]), BigRational::one());
        f.add_term(
            Monomial::var(v.next()),
            BigRational::from_integer(BigInt::from(self.p)),
        );
        f
    }

    /// The Frobenius lift: the ring endomorphism fixing constants and sending
    /// each atom to [`psi_atom`](Self::psi_atom).
    pub fn psi(&self, f: &ThetaPoly) -> Result<ThetaPoly> {
        self.check(f);
        let mut powers: HashMap<(ThetaVar, u32), ThetaPoly> = HashMap::new();
        let mut out = self.empty();
        for (m, c) in &f.terms {
            let mut image = self.constant(c.clone());
            for &(v, e) in m.factors() {
                let factor = match powers.get(&(v, e)) {
                    Some(pw) => pw.clone(),
                    None => {
                        let pw = self.pow(&self.psi_atom(v), e as u64)?;
                        powers.insert((v, e), pw.clone());
                        pw
                    }
                };
                image = self.mul(&image, &factor)?;
            }
            out = self.add(&out, &image);
            self.guard(out.terms.len())?;
        }
        Ok(out)
    }

    /// `theta(f) = (psi(f) - f^p) / p`.
    ///
    /// For integral `f` the result is integral; anything else is reported as
    /// an internal inconsistency.
    pub fn theta(&self, f: &ThetaPoly) -> Result<ThetaPoly> {
        let diff = self.sub(&self.psi(f)?, &self.pow(f, self.p)?);
        let out = self.scale(&diff, &BigRational::new(BigInt::one(), BigInt::from(self.p)));
        if f.is_integral() && !out.is_integral() {
            return Err(AlgebraError::Inconsistent(format!(
                "theta of an integral polynomial is not integral: {out}"
            )));
        }
        Ok(out)
    }

    /// `psi(f) - f^p`, which must be divisible by `p` for integral `f`.
    pub fn frobenius_defect(&self, f: &ThetaPoly) -> Result<ThetaPoly> {
        Ok(self.sub(&self.psi(f)?, &self.pow(f, self.p)?))
    }

    /// Evaluate an integral polynomial in `target`, sending each atom through
    /// `assign`.
    pub fn evaluate<R: Ring>(
        &self,
        f: &ThetaPoly,
        target: &R,
        assign: impl Fn(ThetaVar) -> Option<R::Elem>,
    ) -> Result<R::Elem> {
        self.check(f);
        let mut acc = target.zero();
        for (m, c) in &f.terms {
            if !c.is_integer() {
                return Err(AlgebraError::domain(format!(
                    "cannot evaluate non-integral coefficient {c}"
                )));
            }
            let mut term = target.from_int(c.numer());
            for &(v, e) in m.factors() {
                let value = assign(v)
                    .ok_or_else(|| AlgebraError::domain(format!("no value assigned to {v}")))?;
                term = target.mul(&term, &target.pow(&value, e as u64));
            }
            acc = target.add(&acc, &term);
        }
        Ok(acc)
    }
}

/// Outcome of comparing two sides of an identity: holds iff the difference is
/// zero.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub difference: ThetaPoly,
}

impl IdentityCheck {
    fn compare(name: impl Into<String>, ring: &ThetaRing, lhs: &ThetaPoly, rhs: &ThetaPoly) -> Self {
        IdentityCheck {
            name: name.into(),
            difference: ring.sub(lhs, rhs),
        }
    }

    pub fn holds(&self) -> bool {
        self.difference.is_zero()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            Err(AlgebraError::VerificationFailed(format!(
                "{}: difference {}",
                self.name, self.difference
            )))
        }
    }
}

/// The resolved sign of the additivity cross term at one prime.
#[derive(Clone, Debug)]
pub struct SignReport {
    pub p: u64,
    pub sign: i64,
    /// `theta(x + y) - theta(x) - theta(y)`.
    pub delta: ThetaPoly,
    /// `sum_{0<i<p} C(p,i)/p x^i y^(p-i)`.
    pub cross_term: ThetaPoly,
}

/// `sum_{0<i<p} C(p,i)/p * a^i * b^(p-i)`.
fn divided_cross_term(ring: &ThetaRing, a: &ThetaPoly, b: &ThetaPoly) -> Result<ThetaPoly> {
    let p = ring.prime();
    let mut out = ring.zero();
    for i in 1..p {
        let c = BigRational::from_integer(divided_binomial(p, i as i64)?);
        let t = ring.mul(&ring.pow(a, i)?, &ring.pow(b, p - i)?)?;
        out = ring.add(&out, &ring.scale(&t, &c));
        ring.guard(out.term_count())?;
    }
    Ok(out)
}

/// Compute `theta(x + y) - theta(x) - theta(y)` and decide which sign of the
/// divided-binomial cross term it equals.
pub fn verify_additivity(ring: &ThetaRing) -> Result<SignReport> {
    let x = ring.generator(0);
    let y = ring.generator(1);
    let delta = ring.sub(
        &ring.theta(&ring.add(&x, &y))?,
        &ring.add(&ring.theta(&x)?, &ring.theta(&y)?),
    );
    let cross_term = divided_cross_term(ring, &x, &y)?;
    let sign = if delta == cross_term {
        1
    } else if delta == ring.neg(&cross_term) {
        -1
    } else {
        return Err(AlgebraError::VerificationFailed(format!(
            "additivity at p = {}: delta {delta} matches neither sign of {cross_term}",
            ring.prime()
        )));
    };
    Ok(SignReport {
        p: ring.prime(),
        sign,
        delta,
        cross_term,
    })
}

/// Check
/// `theta(x_1 + ... + x_m) = sum theta(x_i)
///     + sign * sum_{0<i<p} C(p,i)/p sum_{j=1}^{m-1} x_{j+1}^(p-i) (x_1 + ... + x_j)^i`
/// symbolically, with generators `x_0 .. x_{m-1}` standing for `x_1 .. x_m`.
pub fn verify_multsum(ring: &ThetaRing, m: u32, sign: i64) -> Result<IdentityCheck> {
    if m < 2 {
        return Err(AlgebraError::domain("multsum needs at least two summands"));
    }
    let xs: Vec<ThetaPoly> = (0..m).map(|g| ring.generator(g)).collect();
    let lhs = ring.theta(&ring.sum(&xs))?;

    let mut rhs = ring.zero();
    for x in &xs {
        rhs = ring.add(&rhs, &ring.theta(x)?);
    }
    let mut partial = xs[0].clone();
    let mut cross = ring.zero();
    for next in &xs[1..] {
        cross = ring.add(&cross, &divided_cross_term(ring, &partial, next)?);
        partial = ring.add(&partial, next);
    }
    rhs = ring.add(&rhs, &ring.scale_int(&cross, sign));
    Ok(IdentityCheck::compare(
        format!("multsum p={} m={m}", ring.prime()),
        ring,
        &lhs,
        &rhs,
    ))
}

/// Check `theta(x^n) = ((x^p + p theta(x))^n - x^(np)) / p`.
pub fn verify_theta_power(ring: &ThetaRing, n: u64) -> Result<IdentityCheck> {
    if n < 1 {
        return Err(AlgebraError::domain("theta power needs n >= 1"));
    }
    let p = ring.prime();
    let x = ring.generator(0);
    let lhs = ring.theta(&ring.pow(&x, n)?)?;
    let lift = ring.add(
        &ring.pow(&x, p)?,
        &ring.scale_int(&ring.theta(&x)?, p as i64),
    );
    let numer = ring.sub(&ring.pow(&lift, n)?, &ring.pow(&x, n * p)?);
    let rhs = ring.scale(&numer, &BigRational::new(BigInt::one(), BigInt::from(p)));
    Ok(IdentityCheck::compare(
        format!("theta power p={p} n={n}"),
        ring,
        &lhs,
        &rhs,
    ))
}

/// Check `theta(fg) = theta(f) g^p + f^p theta(g) + p theta(f) theta(g)`.
pub fn verify_product_rule(ring: &ThetaRing, f: &ThetaPoly, g: &ThetaPoly) -> Result<IdentityCheck> {
    let p = ring.prime();
    let lhs = ring.theta(&ring.mul(f, g)?)?;
    let tf = ring.theta(f)?;
    let tg = ring.theta(g)?;
    let rhs = ring.sum(&[
        ring.mul(&tf, &ring.pow(g, p)?)?,
        ring.mul(&ring.pow(f, p)?, &tg)?,
        ring.scale_int(&ring.mul(&tf, &tg)?, p as i64),
    ]);
    Ok(IdentityCheck::compare(
        format!("product rule p={p}"),
        ring,
        &lhs,
        &rhs,
    ))
}

/// At `p = 2`: `theta(xy) = theta(x) y^2 + theta(y) x^2 + 2 theta(x) theta(y)`,
/// with the right-hand side written out term by term.
pub fn verify_p2_product_formula(ring: &ThetaRing) -> Result<IdentityCheck> {
    if ring.prime() != 2 {
        return Err(AlgebraError::domain("the quadratic product formula is specific to p = 2"));
    }
    let x = ThetaVar::new(0, 0);
    let y = ThetaVar::new(1, 0);
    let one = BigRational::one();
    let rhs = ring.sum(&[
        ring.monomial(Monomial::from_factors([(x.next(), 1), (y, 2)]), one.clone()),
        ring.monomial(Monomial::from_factors([(y.next(), 1), (x, 2)]), one),
        ring.monomial(
            Monomial::from_factors([(x.next(), 1), (y.next(), 1)]),
            BigRational::from_integer(BigInt::from(2)),
        ),
    ]);
    let lhs = ring.theta(&ring.mul(&ring.var(x), &ring.var(y))?)?;
    Ok(IdentityCheck::compare("p=2 product formula", ring, &lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{fermat_theta, IntegerRing};

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn atom(g: u32, i: u32) -> ThetaVar {
        ThetaVar::new(g, i)
    }

    #[test]
    fn psi_examples() {
        let r = ThetaRing::new(3).unwrap();
        assert_eq!(r.psi(&r.one()).unwrap(), r.one());
        let x = r.generator(0);
        let expect = r.add(&r.pow(&x, 3).unwrap(), &r.scale_int(&r.var(atom(0, 1)), 3));
        assert_eq!(r.psi(&x).unwrap(), expect);

        let y = r.generator(1);
        let xy = r.mul(&x, &y).unwrap();
        let expect = r
            .mul(&r.psi_atom(atom(0, 0)), &r.psi_atom(atom(1, 0)))
            .unwrap();
        assert_eq!(r.psi(&xy).unwrap(), expect);
    }

    #[test]
    fn theta_examples() {
        for p in [2u64, 3, 5] {
            let r = ThetaRing::new(p).unwrap();
            assert_eq!(r.theta(&r.generator(0)).unwrap(), r.var(atom(0, 1)));
            for c in [-3i64, -1, 0, 1, 2, 7] {
                let expect = fermat_theta(&BigInt::from(c), p).unwrap();
                assert_eq!(
                    r.theta(&r.integer(c)).unwrap(),
                    r.constant(BigRational::from_integer(expect))
                );
            }
        }
    }

    #[test]
    fn theta_of_atoms_climbs_levels() {
        let r = ThetaRing::new(5).unwrap();
        for g in 0..3 {
            for i in 0..3 {
                assert_eq!(r.theta(&r.var(atom(g, i))).unwrap(), r.var(atom(g, i + 1)));
            }
        }
    }

    #[test]
    fn p2_product_formula() {
        let r = ThetaRing::new(2).unwrap();
        assert!(verify_p2_product_formula(&r).unwrap().holds());
        assert!(verify_p2_product_formula(&ThetaRing::new(3).unwrap()).is_err());
    }

    #[test]
    fn additivity_sign_is_negative() {
        for p in [2u64, 3, 5, 7] {
            let r = ThetaRing::new(p).unwrap();
            let report = verify_additivity(&r).unwrap();
            assert_eq!(report.sign, ADDITIVITY_SIGN, "p={p}");
        }
    }

    #[test]
    fn additivity_examples() {
        let r = ThetaRing::new(2).unwrap();
        let xy = Monomial::from_factors([(atom(0, 0), 1), (atom(1, 0), 1)]);
        let report = verify_additivity(&r).unwrap();
        assert_eq!(report.delta, r.monomial(xy, int(-1)));

        let r = ThetaRing::new(3).unwrap();
        let report = verify_additivity(&r).unwrap();
        let x2y = Monomial::from_factors([(atom(0, 0), 2), (atom(1, 0), 1)]);
        let xy2 = Monomial::from_factors([(atom(0, 0), 1), (atom(1, 0), 2)]);
        let expect = r.add(&r.monomial(x2y, int(-1)), &r.monomial(xy2, int(-1)));
        assert_eq!(report.delta, expect);

        // with x = 0 the difference vanishes
        let y = r.generator(1);
        let d = r.sub(
            &r.theta(&y).unwrap(),
            &r.add(&r.theta(&r.zero()).unwrap(), &r.theta(&y).unwrap()),
        );
        assert!(d.is_zero());
    }

    #[test]
    fn multsum_examples() {
        let r3 = ThetaRing::new(3).unwrap();
        assert!(verify_multsum(&r3, 2, ADDITIVITY_SIGN).unwrap().holds());
        assert!(verify_multsum(&r3, 3, ADDITIVITY_SIGN).unwrap().holds());
        assert!(!verify_multsum(&r3, 3, -ADDITIVITY_SIGN).unwrap().holds());
        let r2 = ThetaRing::new(2).unwrap();
        assert!(verify_multsum(&r2, 4, ADDITIVITY_SIGN).unwrap().holds());
        assert!(verify_multsum(&r2, 1, ADDITIVITY_SIGN).is_err());
    }

    #[test]
    fn theta_power_examples() {
        for p in [2u64, 3] {
            let r = ThetaRing::new(p).unwrap();
            for n in 1..=5 {
                assert!(verify_theta_power(&r, n).unwrap().holds(), "p={p} n={n}");
            }
        }
    }

    // theta(x^2) at p = 3, expanded by hand:
    // ((x^3 + 3 x1)^2 - x^6) / 3 = 2 x^3 x1 + 3 x1^2.
    #[test]
    fn theta_of_square_at_three() {
        let r = ThetaRing::new(3).unwrap();
        let x = atom(0, 0);
        let expect = r.add(
            &r.monomial(Monomial::from_factors([(x, 3), (x.next(), 1)]), int(2)),
            &r.monomial(Monomial::from_factors([(x.next(), 2)]), int(3)),
        );
        let got = r.theta(&r.pow(&r.generator(0), 2).unwrap()).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn monomial_cap_is_enforced() {
        let r = ThetaRing::new(5).unwrap().with_monomial_cap(20);
        let f = r.sum(&[r.generator(0), r.generator(1), r.generator(2)]);
        let err = r.theta(&f).unwrap_err();
        assert!(matches!(err, AlgebraError::ResourceLimit { cap: 20, .. }));
    }

    #[test]
    fn evaluate_into_integers() {
        let r = ThetaRing::new(3).unwrap();
        let f = r.theta(&r.pow(&r.generator(0), 2).unwrap()).unwrap();
        let v = r
            .evaluate(&f, &IntegerRing, |v| Some(BigInt::from(v.level as i64 + 2)))
            .unwrap();
        // 2*8*3 + 3*9
        assert_eq!(v, BigInt::from(75));
        let half = r.scale(&r.one(), &BigRational::new(1.into(), 2.into()));
        assert!(r.evaluate(&half, &IntegerRing, |_| None).is_err());
    }

    #[test]
    fn json_terms() {
        let r = ThetaRing::new(2).unwrap();
        let f = r.theta(&r.mul(&r.generator(0), &r.generator(1)).unwrap()).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains(r#"{"monomial":[[0,1,1],[1,0,2]],"coeff":"1"}"#), "{json}");
        let terms: Vec<ThetaTerm> = serde_json::from_str(&json).unwrap();
        assert_eq!(ThetaPoly::from_terms(2, &terms).unwrap(), f);
        let bad = vec![ThetaTerm {
            monomial: vec![],
            coeff: "x".into(),
        }];
        assert!(ThetaPoly::from_terms(2, &bad).is_err());
    }

    #[test]
    fn display() {
        let r = ThetaRing::new(2).unwrap();
        let f = r.theta(&r.mul(&r.generator(0), &r.generator(1)).unwrap()).unwrap();
        assert_eq!(f.to_string(), "x0^2*x1_1 + x0_1*x1^2 + 2*x0_1*x1_1");
    }
}
