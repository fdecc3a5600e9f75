//! Finite, exact computations showing that `Z_p[zeta_{p^k}]` carries no
//! theta-structure (for odd `p`, and for `p = 2` with `k >= 2`).
//!
//! Two independent lines are implemented:
//!
//! * Frobenius-lift enumeration. A ring endomorphism `psi` must send `zeta`
//!   to a root of `Phi_{p^k}`, i.e. to some `zeta^j` with `j` a unit mod
//!   `p^k`. A theta-structure then needs `theta(zeta) = (zeta^j - zeta^p)/p`
//!   to be integral. [`obstruction_report`] checks every `j`.
//! * The sum argument. Applying `theta` to `1 + zeta + ... + zeta^{p-1} = 0`
//!   with the additivity rule yields `0 = p * u + sign * T`, where `T` is the
//!   cross-term sum ([`telescoping_sum`], equal to `-1`) and `p * u` collects
//!   the `theta(zeta^i)` ([`theta_sum_divisibility`]). So `p` would be a unit.
//!   [`contradiction_report`] assembles this from recomputed ingredients.
//!
//! At `p = 2` the sum argument degenerates; [`p2_quartic_search`] instead
//! searches `(Z/2^N)[i]` for a value of `theta(i)` satisfying the relation
//! `theta(-1) = theta(i * i)` forced by the product rule.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycloElem, CycloRing};
use crate::error::{AlgebraError, Result};
use crate::exact::{
    binomial_row, divided_binomial, fermat_theta, require_prime, upow, IntegerRing,
    PadicResidue, PolyRing, Ring, UniPoly,
};
use crate::theta::{verify_additivity, ThetaRing, ThetaVar};

/// Largest precision accepted by [`p2_quartic_search`]; the search visits
/// `4^N` residues.
pub const MAX_SEARCH_PRECISION: u32 = 8;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Conclusion {
    NoThetaStructure,
    ThetaPossible,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::NoThetaStructure => "NoThetaStructure",
            Conclusion::ThetaPossible => "ThetaPossible",
        })
    }
}

/// Verdict on the candidate Frobenius lift `zeta -> zeta^j`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub exponent: u64,
    /// Whether `witness` is divisible by `p`, i.e. whether `theta(zeta)`
    /// would be integral under this lift.
    pub divisible: bool,
    /// `zeta^j - zeta^p`.
    pub witness: CycloElem,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub p: u64,
    pub k: u32,
    pub candidates: Vec<CandidateVerdict>,
    /// Cross-term sum in `Z[zeta_p]`; see [`telescoping_sum`].
    pub telescoping_sum: CycloElem,
    /// `S(t)` from [`theta_sum_divisibility`].
    pub theta_sum_poly: UniPoly<BigInt>,
    pub conclusion: Conclusion,
    /// `(p, k) = (2, 1)`: `Z_2` itself, which does carry a theta-structure.
    /// Reported for completeness only.
    pub informational: bool,
}

impl ObstructionReport {
    pub fn all_candidates_fail(&self) -> bool {
        self.candidates.iter().all(|c| !c.divisible)
    }
}

fn check_unit_exponent(ring: &CycloRing, j: u64) -> Result<()> {
    if j == 0 || j >= ring.order() || j % ring.prime() == 0 {
        return Err(AlgebraError::domain(format!(
            "{j} is not a unit exponent in (0, {})",
            ring.order()
        )));
    }
    Ok(())
}

/// Test the candidate lift `zeta -> zeta^j` inside an existing ring.
pub fn check_candidate_in(ring: &CycloRing, j: u64) -> Result<CandidateVerdict> {
    check_unit_exponent(ring, j)?;
    let witness = ring.sub(
        &ring.zeta_power(j as i64),
        &ring.zeta_power(ring.prime() as i64),
    );
    Ok(CandidateVerdict {
        exponent: j,
        divisible: ring.divisible_by_p(&witness),
        witness,
    })
}

/// Test the candidate lift `zeta -> zeta^j` on `Z[zeta_{p^k}]`.
pub fn check_candidate(p: u64, k: u32, j: u64) -> Result<CandidateVerdict> {
    check_candidate_in(&CycloRing::new(p, k)?, j)
}

/// Check every unit exponent `j` mod `p^k`, in increasing order.
pub fn obstruction_report(p: u64, k: u32) -> Result<ObstructionReport> {
    let ring = CycloRing::new(p, k)?;
    let candidates = (1..ring.order())
        .filter(|j| j % p != 0)
        .map(|j| check_candidate_in(&ring, j))
        .collect::<Result<Vec<_>>>()?;
    let conclusion = if candidates.iter().all(|c| !c.divisible) {
        Conclusion::NoThetaStructure
    } else {
        Conclusion::ThetaPossible
    };
    Ok(ObstructionReport {
        p,
        k,
        candidates,
        telescoping_sum: telescoping_sum(p)?,
        theta_sum_poly: theta_sum_divisibility(p)?.poly,
        conclusion,
        informational: p == 2 && k == 1,
    })
}

/// `sum_{0<i<p} C(p,i)/p * sum_{0<j<p} zeta^{j(p-i)} * (1 + ... + zeta^{j-1})^i`
/// evaluated in `Z[zeta_p]`.
pub fn telescoping_sum(p: u64) -> Result<CycloElem> {
    let ring = CycloRing::new(p, 1)?;
    let units = (1..p)
        .map(|j| ring.geometric_unit(j))
        .collect::<Result<Vec<_>>>()?;
    let mut total = ring.zero();
    for i in 1..p {
        let c = ring.from_int(&divided_binomial(p, i as i64)?);
        let mut inner = ring.zero();
        for (j, g) in (1..p).zip(&units) {
            let term = ring.mul(
                &ring.zeta_power((j * (p - i)) as i64),
                &ring.pow(g, i),
            );
            inner = ring.add(&inner, &term);
        }
        total = ring.add(&total, &ring.mul(&c, &inner));
    }
    Ok(total)
}

/// The cross term of the iterated additivity rule for `theta(x_1 + ... + x_m)`,
/// without its sign:
/// `sum_{0<i<p} C(p,i)/p * sum_{j=1}^{m-1} x_{j+1}^{p-i} (x_1 + ... + x_j)^i`,
/// evaluated at concrete ring elements.
pub fn multsum_cross_term<R: Ring>(ring: &R, p: u64, xs: &[R::Elem]) -> Result<R::Elem> {
    let mut total = ring.zero();
    for i in 1..p {
        let c = ring.from_int(&divided_binomial(p, i as i64)?);
        let mut partial = ring.zero();
        let mut inner = ring.zero();
        for j in 1..xs.len() {
            partial = ring.add(&partial, &xs[j - 1]);
            let term = ring.mul(&ring.pow(&xs[j], p - i), &ring.pow(&partial, i));
            inner = ring.add(&inner, &term);
        }
        total = ring.add(&total, &ring.mul(&c, &inner));
    }
    Ok(total)
}

/// The same cross term as [`telescoping_sum`], but obtained by substituting
/// `x_l = zeta^{l-1}` into the general iterated-additivity form.
pub fn cross_term_from_multsum(p: u64) -> Result<CycloElem> {
    let ring = CycloRing::new(p, 1)?;
    let xs: Vec<CycloElem> = (0..p).map(|l| ring.zeta_power(l as i64)).collect();
    multsum_cross_term(&ring, p, &xs)
}

/// Check the two algebraic steps behind the telescoping evaluation, for each
/// `1 <= j <= p-1`, writing `G_j = 1 + zeta + ... + zeta^{j-1}`:
///
/// * `zeta^j + G_j = G_{j+1}`;
/// * `sum_{0<i<p} C(p,i) zeta^{j(p-i)} G_j^i = G_{j+1}^p - 1 - G_j^p`.
pub fn telescoping_rewrite_holds(p: u64) -> Result<bool> {
    let ring = CycloRing::new(p, 1)?;
    let row = binomial_row(p);
    for j in 1..p {
        let g = ring.geometric_unit(j)?;
        let g_next = ring.geometric_unit(j + 1)?;
        if ring.add(&ring.zeta_power(j as i64), &g) != g_next {
            return Ok(false);
        }
        let mut lhs = ring.zero();
        for i in 1..p {
            let term = ring.mul(
                &ring.zeta_power((j * (p - i)) as i64),
                &ring.pow(&g, i),
            );
            lhs = ring.add(&lhs, &ring.mul(&ring.from_int(&row[i as usize]), &term));
        }
        let rhs = ring.sub(
            &ring.sub(&ring.pow(&g_next, p), &ring.one()),
            &ring.pow(&g, p),
        );
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S(t) = sum_{0<i<p} ((1 + p t)^i - 1) / p`, the value of
/// `sum_{i<p} theta(zeta^i)` as a polynomial in `t = theta(zeta)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ThetaSum {
    pub p: u64,
    pub poly: UniPoly<BigInt>,
    /// Every coefficient of `S` is divisible by `p`.
    pub divisible: bool,
    /// `S / p` when `divisible`.
    pub unit_side: Option<UniPoly<BigInt>>,
}

pub fn theta_sum_divisibility(p: u64) -> Result<ThetaSum> {
    require_prime(p)?;
    let zt = PolyRing::new(IntegerRing);
    let pb = BigInt::from(p);
    let lift = UniPoly::new(vec![BigInt::one(), pb.clone()]);
    let mut numer = zt.zero();
    for i in 1..p {
        numer = zt.add(&numer, &zt.sub(&zt.pow(&lift, i), &zt.one()));
    }
    let poly = exact_div_int_poly(&numer, &pb).ok_or_else(|| {
        AlgebraError::Inconsistent(format!("theta sum numerator {numer} not divisible by {p}"))
    })?;
    let unit_side = exact_div_int_poly(&poly, &pb);
    Ok(ThetaSum {
        p,
        divisible: unit_side.is_some(),
        poly,
        unit_side,
    })
}

fn exact_div_int_poly(f: &UniPoly<BigInt>, d: &BigInt) -> Option<UniPoly<BigInt>> {
    f.coeffs()
        .iter()
        .map(|c| {
            let (q, r) = c.div_rem(d);
            r.is_zero().then_some(q)
        })
        .collect::<Option<Vec<_>>>()
        .map(UniPoly::new)
}

/// `sum_{i<p} theta(x^i)` computed in the free theta-ring and then evaluated
/// at `x = 1`, `theta(x) = t`. This reproduces `S(t)` through `psi` alone,
/// using only `zeta^p = 1`.
pub fn theta_sum_from_theta_ring(p: u64) -> Result<UniPoly<BigInt>> {
    let ring = ThetaRing::new(p)?;
    let zt = PolyRing::new(IntegerRing);
    let x = ring.generator(0);
    let mut total = ring.zero();
    for i in 0..p {
        total = ring.add(&total, &ring.theta(&ring.pow(&x, i)?)?);
    }
    ring.evaluate(&total, &zt, |v| match v {
        ThetaVar { generator: 0, level: 0 } => Some(zt.one()),
        ThetaVar { generator: 0, level: 1 } => Some(zt.x()),
        _ => None,
    })
}

/// The assembled contradiction for an odd prime `p` and level `k`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ContradictionReport {
    pub p: u64,
    pub k: u32,
    /// `zeta_{p^k}^{p^{k-1}}` has order exactly `p` and is a root of `Phi_p`.
    pub primitive_p_root: bool,
    /// `1 + zeta + ... + zeta^{p-1} = 0` in `Z[zeta_p]`, so its theta is
    /// `theta(0)`, which is zero.
    pub root_sum_vanishes: bool,
    #[serde(with = "crate::exact::decimal")]
    pub theta_of_zero: BigInt,
    /// Sign found by expanding `theta(x + y)` symbolically.
    pub additivity_sign_resolved: i64,
    /// Sign the assembly was asked to use.
    pub additivity_sign_used: i64,
    pub telescoping_sum: CycloElem,
    pub telescoping_matches_multsum_form: bool,
    pub telescoping_rewrite_holds: bool,
    pub theta_sum_poly: UniPoly<BigInt>,
    pub theta_sum_matches_theta_ring: bool,
    pub theta_sum_divisible: bool,
    pub unit_side: Option<UniPoly<BigInt>>,
    /// `c` in `p * u(theta(zeta)) = c`, i.e. `-sign * T`.
    #[serde(with = "crate::exact::decimal::option")]
    pub residual: Option<BigInt>,
    pub equation: String,
    /// Every ingredient checked out.
    pub consistent: bool,
    /// Consistent, and the residual is a unit, so `p` would be invertible.
    pub established: bool,
}

/// Assemble `0 = p * u + sign * T` for odd `p`, recomputing every ingredient.
///
/// `sign` is the additivity sign to use; pass [`crate::theta::ADDITIVITY_SIGN`].
/// A sign disagreeing with the symbolically resolved one marks the report
/// inconsistent.
pub fn contradiction_report(p: u64, k: u32, sign: i64) -> Result<ContradictionReport> {
    require_prime(p)?;
    if p == 2 {
        return Err(AlgebraError::domain(
            "the sum argument needs an odd prime; use p2_quartic_search at p = 2",
        ));
    }
    if k < 1 {
        return Err(AlgebraError::domain("level must be >= 1"));
    }

    let big = CycloRing::new(p, k)?;
    let zeta_p = big.zeta_power(upow(p, k - 1) as i64);
    let phi_p = crate::cyclotomic::cyclotomic_polynomial(p, 1)?;
    let primitive_p_root = big.pow(&zeta_p, p) == big.one()
        && zeta_p != big.one()
        && big.is_zero(&big.eval_poly(&phi_p, &zeta_p));

    let small = CycloRing::new(p, 1)?;
    let root_sum_vanishes = small.is_zero(&small.geometric_unit(p)?);
    let theta_of_zero = fermat_theta(&BigInt::zero(), p)?;

    let additivity_sign_resolved = verify_additivity(&ThetaRing::new(p)?)?.sign;

    let t_sum = telescoping_sum(p)?;
    let telescoping_matches_multsum_form = cross_term_from_multsum(p)? == t_sum;
    let rewrite = telescoping_rewrite_holds(p)?;

    let theta_sum = theta_sum_divisibility(p)?;
    let theta_sum_matches_theta_ring = theta_sum_from_theta_ring(p)? == theta_sum.poly;

    let residual = t_sum.as_integer().map(|c| -(c * sign));
    let consistent = primitive_p_root
        && root_sum_vanishes
        && theta_of_zero.is_zero()
        && additivity_sign_resolved == sign
        && telescoping_matches_multsum_form
        && rewrite
        && theta_sum_matches_theta_ring
        && theta_sum.divisible
        && residual.is_some();
    let established = consistent && residual.as_ref().is_some_and(|c| c.abs().is_one());

    let equation = match (&theta_sum.unit_side, &residual) {
        (Some(u), Some(c)) => format!(
            "0 = {p}*({}) {} {}  =>  {p}*({}) = {c}",
            u.display("t"),
            if sign < 0 { "-" } else { "+" },
            t_sum,
            u.display("t"),
        ),
        _ => "incomplete".to_string(),
    };

    Ok(ContradictionReport {
        p,
        k,
        primitive_p_root,
        root_sum_vanishes,
        theta_of_zero,
        additivity_sign_resolved,
        additivity_sign_used: sign,
        telescoping_sum: t_sum,
        telescoping_matches_multsum_form,
        telescoping_rewrite_holds: rewrite,
        theta_sum_poly: theta_sum.poly,
        theta_sum_matches_theta_ring,
        theta_sum_divisible: theta_sum.divisible,
        unit_side: theta_sum.unit_side,
        residual,
        equation,
        consistent,
        established,
    })
}

/// `(Z/2^N)[i]`, the Gaussian integers modulo `2^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussianResidueRing {
    precision: u32,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianResidue {
    pub re: PadicResidue,
    pub im: PadicResidue,
}

impl fmt::Display for GaussianResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re.residue(), self.im.residue())
    }
}

impl GaussianResidueRing {
    pub fn new(precision: u32) -> Result<Self> {
        PadicResidue::from_i64(2, precision, 0)?;
        Ok(GaussianResidueRing { precision })
    }

    fn residue(&self, v: &BigInt) -> PadicResidue {
        PadicResidue::new(2, self.precision, v).expect("validated precision")
    }

    pub fn element(&self, re: &BigInt, im: &BigInt) -> GaussianResidue {
        GaussianResidue {
            re: self.residue(re),
            im: self.residue(im),
        }
    }

    pub fn i(&self) -> GaussianResidue {
        self.element(&BigInt::zero(), &BigInt::one())
    }
}

impl Ring for GaussianResidueRing {
    type Elem = GaussianResidue;

    fn zero(&self) -> GaussianResidue {
        self.from_int(&BigInt::zero())
    }
    fn one(&self) -> GaussianResidue {
        self.from_int(&BigInt::one())
    }
    fn from_int(&self, n: &BigInt) -> GaussianResidue {
        self.element(n, &BigInt::zero())
    }
    fn is_zero(&self, a: &GaussianResidue) -> bool {
        a.re.is_zero() && a.im.is_zero()
    }
    fn add(&self, a: &GaussianResidue, b: &GaussianResidue) -> GaussianResidue {
        GaussianResidue {
            re: a.re.add(&b.re).expect("same precision"),
            im: a.im.add(&b.im).expect("same precision"),
        }
    }
    fn neg(&self, a: &GaussianResidue) -> GaussianResidue {
        GaussianResidue {
            re: a.re.neg(),
            im: a.im.neg(),
        }
    }
    fn mul(&self, a: &GaussianResidue, b: &GaussianResidue) -> GaussianResidue {
        let rr = a.re.mul(&b.re).expect("same precision");
        let ii = a.im.mul(&b.im).expect("same precision");
        let ri = a.re.mul(&b.im).expect("same precision");
        let ir = a.im.mul(&b.re).expect("same precision");
        GaussianResidue {
            re: rr.sub(&ii).expect("same precision"),
            im: ri.add(&ir).expect("same precision"),
        }
    }
    fn unit_inverse(&self, a: &GaussianResidue) -> Option<GaussianResidue> {
        (*a == self.one() || *a == self.neg(&self.one())).then(|| a.clone())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub precision: u32,
    pub candidates_checked: u64,
    /// `theta(i * i)` as a polynomial in `t = theta(i)`, rendered.
    pub relation: String,
    /// `theta(-1)`.
    #[serde(with = "crate::exact::decimal")]
    pub lhs: BigInt,
    /// Values of `t` (as `"a + bi"`) satisfying the relation.
    pub solutions: Vec<String>,
    /// Every right-hand value has both coordinates even while `theta(-1)` is
    /// odd.
    pub parity_witness: bool,
}

impl SearchResult {
    pub fn no_solution(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Search all `t` in `(Z/2^N)[i]` for `theta(-1) = theta(i * i)`, where the
/// right side is `theta(xy)` from the free theta-ring at `p = 2` evaluated at
/// `x = y = i`, `theta(x) = theta(y) = t`.
pub fn p2_quartic_search(precision: u32) -> Result<SearchResult> {
    if precision < 1 || precision > MAX_SEARCH_PRECISION {
        return Err(AlgebraError::domain(format!(
            "precision {precision} outside 1..={MAX_SEARCH_PRECISION}"
        )));
    }
    let gauss = GaussianResidueRing::new(precision)?;
    let gt = PolyRing::new(gauss);
    let theta2 = ThetaRing::new(2)?;
    let xy = theta2.mul(&theta2.generator(0), &theta2.generator(1))?;
    let relation = theta2.evaluate(&theta2.theta(&xy)?, &gt, |v| match v.level {
        0 => Some(gt.constant(gauss.i())),
        1 => Some(gt.x()),
        _ => None,
    })?;
    let lhs_int = fermat_theta(&BigInt::from(-1), 2)?;
    let lhs = gauss.from_int(&lhs_int);

    let modulus = 1i64 << precision;
    let mut solutions = Vec::new();
    let mut parity_witness = lhs.re.residue().is_odd();
    let mut checked = 0u64;
    for a in 0..modulus {
        for b in 0..modulus {
            let t = gauss.element(&BigInt::from(a), &BigInt::from(b));
            let rhs = gt.eval(&relation, &t);
            checked += 1;
            if rhs.re.residue().is_odd() || rhs.im.residue().is_odd() {
                parity_witness = false;
            }
            if rhs == lhs {
                solutions.push(t.to_string());
            }
        }
    }
    let shown: Vec<String> = relation
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| format!("({c})*t^{n}"))
        .collect();
    Ok(SearchResult {
        precision,
        candidates_checked: checked,
        relation: shown.join(" + "),
        lhs: lhs_int,
        solutions,
        parity_witness,
    })
}
