//! The height-one Lubin-Tate tower for the multiplicative formal group.
//!
//! `A_1 = Z[y_1]/(g_1)` with `g_1(y) = ((1+y)^p - 1)/y`, and for `m >= 2`
//! `A_m = A_{m-1}[y_m]/(g_m)` with `g_m(y) = (1+y)^p - 1 - y_{m-1}`: the new
//! generator is a `[p]`-preimage of the previous level's `zeta - 1`. Elements
//! are kept as nested residues, each level's coefficients living in the level
//! below. [`verify_cyclotomic_iso`] checks that `A_k` is `Z[zeta_{p^k}]` with
//! `zeta = 1 + y_k`, and [`drinfeld_divisibility`] checks the level-structure
//! divisor condition.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclotomic::cyclotomic_polynomial;
use crate::error::{AlgebraError, Result};
use crate::exact::{binomial_row, require_prime, upow, IntegerRing, PolyRing, Ring, UniPoly};

/// `p^k` at or below which [`verify_level_homomorphism`] checks every pair.
pub const EXHAUSTIVE_LEVEL_LIMIT: u64 = 128;
/// Pairs sampled by [`verify_level_homomorphism`] above the limit.
pub const SAMPLED_PAIRS: usize = 256;

/// The multiplicative formal group `F(x, y) = x + y + xy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplicativeFormalGroup {
    p: u64,
}

impl MultiplicativeFormalGroup {
    pub fn new(p: u64) -> Result<Self> {
        require_prime(p)?;
        Ok(MultiplicativeFormalGroup { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn law<R: Ring>(&self, ring: &R, x: &R::Elem, y: &R::Elem) -> R::Elem {
        ring.add(&ring.add(x, y), &ring.mul(x, y))
    }

    /// `[p](x) = (1+x)^p - 1`.
    pub fn p_series(&self) -> UniPoly<BigInt> {
        let mut row = binomial_row(self.p);
        row[0] = BigInt::zero();
        UniPoly::new(row)
    }
}

/// `[p^m](x)`, computed as the `m`-fold composite of `[p]`.
pub fn p_series(p: u64, m: u32) -> Result<UniPoly<BigInt>> {
    let group = MultiplicativeFormalGroup::new(p)?;
    let zx = PolyRing::new(IntegerRing);
    let step = group.p_series();
    let mut acc = zx.x();
    for _ in 0..m {
        acc = zx.compose(&step, &acc);
    }
    Ok(acc)
}

/// `((1+y)^p - 1) / y`.
pub fn divided_p_series(p: u64) -> Result<UniPoly<BigInt>> {
    require_prime(p)?;
    Ok(UniPoly::new(binomial_row(p).split_off(1)))
}

/// An element of some level `A_m` of the tower: an integer at level zero, or
/// the `deg g_m` coordinates over `A_{m-1}` above it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TowerElem {
    Int(BigInt),
    Ext(Vec<TowerElem>),
}

impl TowerElem {
    pub fn is_zero(&self) -> bool {
        match self {
            TowerElem::Int(n) => n.is_zero(),
            TowerElem::Ext(v) => v.iter().all(TowerElem::is_zero),
        }
    }

    /// The integer `n` if this element is the constant `n`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            TowerElem::Int(n) => Some(n),
            TowerElem::Ext(v) => {
                if v[1..].iter().all(TowerElem::is_zero) {
                    v[0].as_integer()
                } else {
                    None
                }
            }
        }
    }
}

// Nested JSON: integers as decimal strings, higher levels as coefficient
// arrays without trailing zeros.
impl Serialize for TowerElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TowerElem::Int(n) => s.serialize_str(&n.to_string()),
            TowerElem::Ext(v) => {
                let len = v.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
                s.collect_seq(&v[..len])
            }
        }
    }
}

/// Presentation of `A_1, ..., A_k`. `stages[s]` is the monic relation
/// adjoining `y_{s+1}`, with coefficients in `A_s`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TowerPresentation {
    p: u64,
    k: u32,
    stages: Vec<UniPoly<TowerElem>>,
}

/// Ring operations on level `level` of a tower.
#[derive(Clone, Copy, Debug)]
pub struct TowerRing<'a> {
    tower: &'a TowerPresentation,
    level: usize,
}

impl<'a> TowerRing<'a> {
    pub fn level(&self) -> usize {
        self.level
    }

    fn below(&self) -> TowerRing<'a> {
        TowerRing {
            tower: self.tower,
            level: self.level - 1,
        }
    }

    fn modulus(&self) -> &'a UniPoly<TowerElem> {
        &self.tower.stages[self.level - 1]
    }

    fn rank(&self) -> usize {
        self.modulus().coeffs().len() - 1
    }

    fn parts<'e>(&self, a: &'e TowerElem) -> &'e [TowerElem] {
        match a {
            TowerElem::Ext(v) if v.len() == self.rank() => v,
            _ => panic!("element {a:?} does not belong to tower level {}", self.level),
        }
    }

    fn int<'e>(&self, a: &'e TowerElem) -> &'e BigInt {
        match a {
            TowerElem::Int(n) => n,
            _ => panic!("element {a:?} does not belong to tower level 0"),
        }
    }

    /// `y_level`, the residue class of the adjoined variable.
    pub fn generator(&self) -> TowerElem {
        assert!(self.level >= 1, "level 0 has no generator");
        let below = self.below();
        let g = self.modulus().coeffs();
        let mut v = vec![below.zero(); self.rank()];
        if self.rank() >= 2 {
            v[1] = below.one();
        } else {
            // y = -g_0 when the relation is linear
            v[0] = below.neg(&g[0]);
        }
        TowerElem::Ext(v)
    }

    /// Embed an element of level `from <= self.level`.
    pub fn embed(&self, a: &TowerElem, from: usize) -> TowerElem {
        assert!(from <= self.level);
        if from == self.level {
            return a.clone();
        }
        let below = self.below();
        let mut v = vec![below.zero(); self.rank()];
        v[0] = below.embed(a, from);
        TowerElem::Ext(v)
    }
}

impl Ring for TowerRing<'_> {
    type Elem = TowerElem;

    fn zero(&self) -> TowerElem {
        self.from_int(&BigInt::zero())
    }

    fn one(&self) -> TowerElem {
        self.from_int(&BigInt::one())
    }

    fn from_int(&self, n: &BigInt) -> TowerElem {
        if self.level == 0 {
            return TowerElem::Int(n.clone());
        }
        let below = self.below();
        let mut v = vec![below.zero(); self.rank()];
        v[0] = below.from_int(n);
        TowerElem::Ext(v)
    }

    fn is_zero(&self, a: &TowerElem) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if self.level == 0 {
            return TowerElem::Int(self.int(a) + self.int(b));
        }
        let below = self.below();
        TowerElem::Ext(
            self.parts(a)
                .iter()
                .zip(self.parts(b))
                .map(|(x, y)| below.add(x, y))
                .collect(),
        )
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if self.level == 0 {
            return TowerElem::Int(self.int(a) - self.int(b));
        }
        let below = self.below();
        TowerElem::Ext(
            self.parts(a)
                .iter()
                .zip(self.parts(b))
                .map(|(x, y)| below.sub(x, y))
                .collect(),
        )
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        if self.level == 0 {
            return TowerElem::Int(-self.int(a));
        }
        let below = self.below();
        TowerElem::Ext(self.parts(a).iter().map(|x| below.neg(x)).collect())
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if self.level == 0 {
            return TowerElem::Int(self.int(a) * self.int(b));
        }
        let below = self.below();
        let (xa, xb) = (self.parts(a), self.parts(b));
        let d = self.rank();
        let mut prod = vec![below.zero(); 2 * d - 1];
        for (i, x) in xa.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in xb.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = below.add(&prod[i + j], &below.mul(x, y));
                }
            }
        }
        // reduce by the monic stage relation, top degree first
        let g = self.modulus().coeffs();
        for n in (d..prod.len()).rev() {
            if prod[n].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut prod[n], below.zero());
            for (i, gi) in g[..d].iter().enumerate() {
                if !gi.is_zero() {
                    prod[n - d + i] = below.sub(&prod[n - d + i], &below.mul(&c, gi));
                }
            }
        }
        prod.truncate(d);
        TowerElem::Ext(prod)
    }

    fn unit_inverse(&self, a: &TowerElem) -> Option<TowerElem> {
        match a.as_integer() {
            Some(n) if n.is_one() || (-n).is_one() => Some(a.clone()),
            _ => None,
        }
    }
}

impl TowerPresentation {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn levels(&self) -> u32 {
        self.k
    }

    pub fn stages(&self) -> &[UniPoly<TowerElem>] {
        &self.stages
    }

    pub fn stage_degrees(&self) -> Vec<usize> {
        self.stages.iter().map(|g| g.coeffs().len() - 1).collect()
    }

    /// Rank of `A_k` over `Z`: the product of the stage degrees.
    pub fn flattened_degree(&self) -> usize {
        self.stage_degrees().iter().product()
    }

    pub fn ring(&self, level: usize) -> TowerRing<'_> {
        assert!(level <= self.stages.len(), "tower has no level {level}");
        TowerRing { tower: self, level }
    }

    pub fn top(&self) -> TowerRing<'_> {
        self.ring(self.stages.len())
    }

    /// Render an element of level `level` as a nested polynomial in `y1, y2, ...`.
    pub fn render(&self, a: &TowerElem, level: usize) -> String {
        match a {
            TowerElem::Int(n) => n.to_string(),
            TowerElem::Ext(v) => {
                let terms: Vec<String> = v
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| {
                        let c = self.render(c, level - 1);
                        let c = if c.contains(' ') { format!("({c})") } else { c };
                        match i {
                            0 => c,
                            1 if c == "1" => format!("y{level}"),
                            1 => format!("{c}*y{level}"),
                            _ if c == "1" => format!("y{level}^{i}"),
                            _ => format!("{c}*y{level}^{i}"),
                        }
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            }
        }
    }

    /// Stage relation `g_{m}` (1-based) rendered in its own variable `y`.
    pub fn render_stage(&self, m: usize) -> String {
        let g = &self.stages[m - 1];
        let terms: Vec<String> = g
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let c = self.render(c, m - 1);
                let c = if c.contains(' ') { format!("({c})") } else { c };
                match i {
                    0 => c,
                    1 if c == "1" => "y".to_string(),
                    1 => format!("{c}*y"),
                    _ if c == "1" => format!("y^{i}"),
                    _ => format!("{c}*y^{i}"),
                }
            })
            .collect();
        terms.join(" + ")
    }

    /// `[p^{k-m}](y)` reduced modulo `modulus`: the image of `y_m` under the
    /// flattening `y_k -> y`.
    fn generator_images(&self, modulus: &UniPoly<BigInt>) -> Result<Vec<UniPoly<BigInt>>> {
        let zy = PolyRing::new(IntegerRing);
        let k = self.stages.len();
        let step = MultiplicativeFormalGroup::new(self.p)?.p_series();
        // images[m] for m = 1..=k; images[0] unused
        let mut images = vec![zy.zero(); k + 1];
        images[k] = zy.divmod(&zy.x(), modulus)?.1;
        for m in (1..k).rev() {
            let composed = zy.compose(&step, &images[m + 1]);
            images[m] = zy.divmod(&composed, modulus)?.1;
        }
        Ok(images)
    }

    fn flatten_with(
        &self,
        a: &TowerElem,
        level: usize,
        images: &[UniPoly<BigInt>],
        modulus: &UniPoly<BigInt>,
    ) -> Result<UniPoly<BigInt>> {
        let zy = PolyRing::new(IntegerRing);
        match a {
            TowerElem::Int(n) => Ok(zy.constant(n.clone())),
            TowerElem::Ext(v) => {
                let mut acc = zy.zero();
                for c in v.iter().rev() {
                    let c = self.flatten_with(c, level - 1, images, modulus)?;
                    acc = zy.add(&zy.mul(&acc, &images[level]), &c);
                    acc = zy.divmod(&acc, modulus)?.1;
                }
                Ok(acc)
            }
        }
    }

    /// `Phi_{p^k}(1 + y)`, the minimal polynomial of `y_k` over `Z`.
    pub fn flattened_modulus(&self) -> Result<UniPoly<BigInt>> {
        let zy = PolyRing::new(IntegerRing);
        let phi = cyclotomic_polynomial(self.p, self.k)?;
        Ok(zy.compose(&phi, &UniPoly::from_i64s(&[1, 1])))
    }

    /// Image of a level-`level` element in `Z[y]/(Phi_{p^k}(1+y))` under
    /// `y_m -> [p^{k-m}](y)`.
    pub fn flatten(&self, a: &TowerElem, level: usize) -> Result<UniPoly<BigInt>> {
        let modulus = self.flattened_modulus()?;
        let images = self.generator_images(&modulus)?;
        self.flatten_with(a, level, &images, &modulus)
    }
}

impl Serialize for TowerPresentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TowerPresentation", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("k", &self.k)?;
        let stages: Vec<&[TowerElem]> = self.stages.iter().map(|g| g.coeffs()).collect();
        st.serialize_field("stages", &stages)?;
        st.end()
    }
}

impl fmt::Display for TowerPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in 1..=self.stages.len() {
            if m > 1 {
                write!(f, "; ")?;
            }
            write!(f, "g{m}(y) = {}", self.render_stage(m))?;
        }
        Ok(())
    }
}

/// Read a tower back from its JSON form, rebuilding dense coordinates from
/// the stage degrees.
pub fn tower_from_json(value: &serde_json::Value) -> Result<TowerPresentation> {
    let bad = |msg: &str| AlgebraError::Parse(msg.to_string());
    let p = value["p"].as_u64().ok_or_else(|| bad("missing p"))?;
    let k = value["k"].as_u64().ok_or_else(|| bad("missing k"))? as u32;
    require_prime(p)?;
    let raw = value["stages"].as_array().ok_or_else(|| bad("missing stages"))?;
    if raw.len() != k as usize {
        return Err(bad("stage count differs from k"));
    }
    let mut tower = TowerPresentation {
        p,
        k,
        stages: Vec::new(),
    };
    for (s, stage) in raw.iter().enumerate() {
        let coeffs = stage.as_array().ok_or_else(|| bad("stage is not an array"))?;
        let parsed = {
            let ring = tower.ring(s);
            let elems = coeffs
                .iter()
                .map(|c| parse_elem(&ring, c))
                .collect::<Result<Vec<_>>>()?;
            PolyRing::new(ring).from_coeffs(elems)
        };
        match parsed.leading().and_then(TowerElem::as_integer) {
            Some(c) if c.is_one() && parsed.coeffs().len() >= 2 => {}
            _ => return Err(bad("stage relation is not monic of positive degree")),
        }
        tower.stages.push(parsed);
    }
    Ok(tower)
}

fn parse_elem(ring: &TowerRing<'_>, v: &serde_json::Value) -> Result<TowerElem> {
    let bad = |msg: String| AlgebraError::Parse(msg);
    if ring.level == 0 {
        let s = v.as_str().ok_or_else(|| bad(format!("expected integer string, got {v}")))?;
        let n: BigInt = s.parse().map_err(|e| bad(format!("{s:?}: {e}")))?;
        return Ok(TowerElem::Int(n));
    }
    let arr = v.as_array().ok_or_else(|| bad(format!("expected array, got {v}")))?;
    if arr.len() > ring.rank() {
        return Err(bad(format!("too many coefficients at level {}", ring.level)));
    }
    let below = ring.below();
    let mut out = vec![below.zero(); ring.rank()];
    for (slot, c) in out.iter_mut().zip(arr) {
        *slot = parse_elem(&below, c)?;
    }
    Ok(TowerElem::Ext(out))
}

/// Build `A_1, ..., A_k` for the multiplicative formal group at `p`.
pub fn build_tower(p: u64, k: u32) -> Result<TowerPresentation> {
    require_prime(p)?;
    if k < 1 {
        return Err(AlgebraError::domain("tower level must be >= 1"));
    }
    let base = PolyRing::new(IntegerRing);
    let mut tower = TowerPresentation {
        p,
        k,
        stages: vec![PolyRing::new(TowerRing {
            tower: &TowerPresentation {
                p,
                k: 0,
                stages: Vec::new(),
            },
            level: 0,
        })
        .from_coeffs(
            base.from_coeffs(divided_p_series(p)?.into_coeffs())
                .into_coeffs()
                .into_iter()
                .map(TowerElem::Int)
                .collect(),
        )],
    };
    let row = binomial_row(p);
    for m in 1..k as usize {
        let stage = {
            let ring = tower.ring(m);
            let mut coeffs: Vec<TowerElem> = row.iter().map(|c| ring.from_int(c)).collect();
            // (1+y)^p - 1 - y_m
            coeffs[0] = ring.neg(&ring.generator());
            PolyRing::new(ring).from_coeffs(coeffs)
        };
        tower.stages.push(stage);
    }
    Ok(tower)
}

/// Result of checking `A_k = Z[zeta_{p^k}]`.
#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub p: u64,
    pub k: u32,
    pub stage_degrees: Vec<usize>,
    pub flattened_degree: usize,
    /// `p^{k-1}(p-1)`.
    pub expected_degree: usize,
    /// `Phi_{p^k}(1 + y)`.
    pub flattened_modulus: UniPoly<BigInt>,
    /// `Phi_{p^k}(1 + y_k)` computed in `A_k`.
    pub relation_residue: TowerElem,
    /// Every stage relation maps to zero under `y_m -> [p^{k-m}](y)`.
    pub forward_well_defined: bool,
    /// `y_m = [p^{k-m}](y_k)` holds in `A_k` for every `m`.
    pub round_trip: bool,
}

impl IsoReport {
    pub fn holds(&self) -> bool {
        self.relation_residue.is_zero()
            && self.flattened_degree == self.expected_degree
            && self.flattened_modulus.degree() == Some(self.expected_degree)
            && self.forward_well_defined
            && self.round_trip
    }
}

/// Check that `y -> y_k` induces `Z[y]/(Phi_{p^k}(1+y)) = A_k`.
///
/// The map is well defined because `Phi_{p^k}(1 + y_k) = 0` in `A_k`. Its
/// candidate inverse sends `y_m` to `[p^{k-m}](y)`; that respects every stage
/// relation, and the two composites fix the generators, so both are
/// isomorphisms. The degree count is checked alongside.
pub fn verify_cyclotomic_iso(p: u64, k: u32) -> Result<IsoReport> {
    let tower = build_tower(p, k)?;
    let top = tower.top();
    let kk = k as usize;
    let y = top.generator();
    let u = top.add(&top.one(), &y);

    let phi = cyclotomic_polynomial(p, k)?;
    let relation_residue =
        PolyRing::new(IntegerRing).eval_in(&phi, &top, &u, |c| top.from_int(c));

    let modulus = tower.flattened_modulus()?;
    let images = tower.generator_images(&modulus)?;
    let zy = PolyRing::new(IntegerRing);
    let mut forward_well_defined = true;
    for (s, stage) in tower.stages.iter().enumerate() {
        let mut acc = zy.zero();
        for c in stage.coeffs().iter().rev() {
            let c = tower.flatten_with(c, s, &images, &modulus)?;
            acc = zy.add(&zy.mul(&acc, &images[s + 1]), &c);
        }
        if !zy.divmod(&acc, &modulus)?.1.is_zero() {
            forward_well_defined = false;
        }
    }

    let mut round_trip = true;
    for m in 1..=kk {
        let series = p_series(p, (kk - m) as u32)?;
        let value = PolyRing::new(IntegerRing).eval_in(&series, &top, &y, |c| top.from_int(c));
        let gen_m = top.embed(&tower.ring(m).generator(), m);
        if value != gen_m {
            round_trip = false;
        }
    }

    Ok(IsoReport {
        p,
        k,
        stage_degrees: tower.stage_degrees(),
        flattened_degree: tower.flattened_degree(),
        expected_degree: (upow(p, k) - upow(p, k - 1)) as usize,
        flattened_modulus: modulus,
        relation_residue,
        forward_well_defined,
        round_trip,
    })
}

/// Quotient and remainder of `[p](x)` by the `p`-torsion divisor
/// `prod_{a in p^{k-1} Z/p^k} (x - phi(a))`, over `A_k`.
#[derive(Clone, Debug, Serialize)]
pub struct DrinfeldReport {
    pub p: u64,
    pub k: u32,
    pub quotient: Vec<TowerElem>,
    pub remainder: Vec<TowerElem>,
    pub quotient_is_one: bool,
    pub remainder_is_zero: bool,
}

pub fn drinfeld_divisibility(p: u64, k: u32) -> Result<DrinfeldReport> {
    let tower = build_tower(p, k)?;
    let top = tower.top();
    let ax = PolyRing::new(top);
    let u = top.add(&top.one(), &top.generator());
    let step = upow(p, k - 1);
    let mut divisor = ax.one();
    for c in 0..p {
        let phi = top.sub(&top.pow(&u, c * step), &top.one());
        let factor = ax.from_coeffs(vec![top.neg(&phi), top.one()]);
        divisor = ax.mul(&divisor, &factor);
    }
    let series = ax.lift(&MultiplicativeFormalGroup::new(p)?.p_series());
    let (q, r) = ax.divmod(&series, &divisor)?;
    Ok(DrinfeldReport {
        p,
        k,
        quotient_is_one: q == ax.one(),
        remainder_is_zero: r.is_zero(),
        quotient: q.into_coeffs(),
        remainder: r.into_coeffs(),
    })
}

/// The universal level structure `phi(a) = (1 + y_k)^a - 1` on `Z/p^k`.
#[derive(Clone, Debug)]
pub struct LevelStructure {
    pub p: u64,
    pub k: u32,
    pub values: Vec<TowerElem>,
}

impl LevelStructure {
    pub fn new(tower: &TowerPresentation) -> Self {
        let top = tower.top();
        let u = top.add(&top.one(), &top.generator());
        let order = upow(tower.p, tower.k);
        let mut values = Vec::with_capacity(order as usize);
        let mut power = top.one();
        for _ in 0..order {
            values.push(top.sub(&power, &top.one()));
            power = top.mul(&power, &u);
        }
        LevelStructure {
            p: tower.p,
            k: tower.k,
            values,
        }
    }

    pub fn order(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn value(&self, a: u64) -> &TowerElem {
        &self.values[(a % self.order()) as usize]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelHomReport {
    pub p: u64,
    pub k: u32,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub failures: Vec<(u64, u64)>,
    /// `phi(0) = 0` and `(1 + y_k)^{p^k} = 1`, so `phi` is defined on `Z/p^k`.
    pub well_defined: bool,
}

impl LevelHomReport {
    pub fn holds(&self) -> bool {
        self.well_defined && self.failures.is_empty()
    }
}

/// Check `phi(a + b) = F(phi(a), phi(b))` for the universal level structure:
/// every pair when `p^k <= 128`, otherwise a fixed-seed random sample.
pub fn verify_level_homomorphism(p: u64, k: u32) -> Result<LevelHomReport> {
    let tower = build_tower(p, k)?;
    let top = tower.top();
    let group = MultiplicativeFormalGroup::new(p)?;
    let phi = LevelStructure::new(&tower);
    let order = phi.order();

    let u = top.add(&top.one(), &top.generator());
    let wraps = top.mul(&top.add(phi.value(order - 1), &top.one()), &u) == top.one();
    let well_defined = phi.value(0).is_zero() && wraps;

    let exhaustive = order <= EXHAUSTIVE_LEVEL_LIMIT;
    let pairs: Vec<(u64, u64)> = if exhaustive {
        // the group law is symmetric, so unordered pairs cover every (a, b)
        (0..order)
            .flat_map(|a| (a..order).map(move |b| (a, b)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(p * 1000 + k as u64);
        (0..SAMPLED_PAIRS)
            .map(|_| (rng.gen_range(0..order), rng.gen_range(0..order)))
            .collect()
    };
    let failures = pairs
        .iter()
        .copied()
        .filter(|&(a, b)| {
            group.law(&top, phi.value(a), phi.value(b)) != *phi.value(a + b)
        })
        .collect();
    Ok(LevelHomReport {
        p,
        k,
        exhaustive,
        pairs_checked: pairs.len(),
        failures,
        well_defined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zpoly(c: &[i64]) -> UniPoly<BigInt> {
        UniPoly::from_i64s(c)
    }

    fn int_stage(t: &TowerPresentation, m: usize) -> Option<UniPoly<BigInt>> {
        let c = t.stages()[m - 1]
            .coeffs()
            .iter()
            .map(|c| c.as_integer().cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(UniPoly::new(c))
    }

    #[test]
    fn p_series_examples() {
        assert_eq!(p_series(3, 1).unwrap(), zpoly(&[0, 3, 3, 1]));
        for p in [2u64, 3, 5] {
            for m in 0..3 {
                let s = p_series(p, m).unwrap();
                assert!(s.coeff(0).map_or(true, Zero::is_zero));
            }
        }
        assert_eq!(p_series(2, 2).unwrap(), zpoly(&[0, 4, 6, 4, 1]));
    }

    #[test]
    fn p_series_composition_law() {
        let zx = PolyRing::new(IntegerRing);
        for p in [2u64, 3, 5] {
            for a in 0..=3u32 {
                for b in 0..=(3 - a) {
                    let lhs = p_series(p, a + b).unwrap();
                    let rhs = zx.compose(&p_series(p, a).unwrap(), &p_series(p, b).unwrap());
                    assert_eq!(lhs, rhs, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn p_series_is_binomial_expansion() {
        let zx = PolyRing::new(IntegerRing);
        for p in [2u64, 3, 5] {
            for m in 1..=3u32 {
                let direct = zx.sub(&zx.pow(&zpoly(&[1, 1]), upow(p, m)), &zx.one());
                assert_eq!(p_series(p, m).unwrap(), direct);
            }
        }
    }

    #[test]
    fn build_tower_examples() {
        let t = build_tower(3, 1).unwrap();
        assert_eq!(int_stage(&t, 1), Some(zpoly(&[3, 3, 1])));
        assert_eq!(t.render_stage(1), "y^2 + 3*y + 3");

        let t = build_tower(2, 1).unwrap();
        assert_eq!(int_stage(&t, 1), Some(zpoly(&[2, 1])));

        let t = build_tower(2, 2).unwrap();
        assert_eq!(int_stage(&t, 1), Some(zpoly(&[2, 1])));
        assert_eq!(int_stage(&t, 2), Some(zpoly(&[2, 2, 1])));
        assert_eq!(t.stage_degrees(), vec![1, 2]);
    }

    #[test]
    fn stage_two_involves_previous_generator() {
        let t = build_tower(3, 2).unwrap();
        assert_eq!(t.render_stage(2), "y^3 + 3*y^2 + 3*y + -1*y1");
        assert!(int_stage(&t, 2).is_none());
    }

    #[test]
    fn tower_json_round_trip() {
        for (p, k) in [(2u64, 2u32), (3, 2), (2, 3), (5, 1)] {
            let t = build_tower(p, k).unwrap();
            let v = serde_json::to_value(&t).unwrap();
            assert_eq!(tower_from_json(&v).unwrap(), t);
        }
        let v = serde_json::to_value(build_tower(2, 2).unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"p": 2, "k": 2, "stages": [["2", "1"], [["2"], ["2"], ["1"]]]})
        );
        assert!(tower_from_json(&serde_json::json!({"p": 4, "k": 1, "stages": [["1","1"]]})).is_err());
    }

    #[test]
    fn iso_examples() {
        let r = verify_cyclotomic_iso(3, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.flattened_modulus, zpoly(&[3, 3, 1]));

        let r = verify_cyclotomic_iso(2, 2).unwrap();
        assert!(r.holds());
        assert_eq!(r.flattened_modulus, zpoly(&[2, 2, 1]));

        let r = verify_cyclotomic_iso(5, 2).unwrap();
        assert!(r.holds());
        assert_eq!(r.flattened_degree, 20);
    }

    #[test]
    fn flatten_sends_generators_to_p_series() {
        let t = build_tower(3, 2).unwrap();
        let y1 = t.ring(2).embed(&t.ring(1).generator(), 1);
        assert_eq!(t.flatten(&y1, 2).unwrap(), p_series(3, 1).unwrap());
        assert_eq!(t.flatten(&t.ring(2).generator(), 2).unwrap(), zpoly(&[0, 1]));
    }

    #[test]
    fn drinfeld_examples() {
        for (p, k) in [(3u64, 1u32), (2, 1), (2, 2), (3, 2)] {
            let r = drinfeld_divisibility(p, k).unwrap();
            assert!(r.remainder_is_zero, "p={p} k={k}");
            assert!(r.quotient_is_one, "p={p} k={k}");
        }
    }

    #[test]
    fn level_homomorphism_examples() {
        let t = build_tower(3, 1).unwrap();
        let top = t.top();
        let phi = LevelStructure::new(&t);
        let g = MultiplicativeFormalGroup::new(3).unwrap();
        assert!(phi.value(0).is_zero());
        assert!(g.law(&top, phi.value(1), phi.value(2)).is_zero());

        let t = build_tower(2, 2).unwrap();
        let top = t.top();
        let phi = LevelStructure::new(&t);
        let g = MultiplicativeFormalGroup::new(2).unwrap();
        assert!(g.law(&top, phi.value(2), phi.value(2)).is_zero());

        for (p, k) in [(2u64, 3u32), (3, 2), (5, 1)] {
            let r = verify_level_homomorphism(p, k).unwrap();
            assert!(r.holds(), "p={p} k={k}");
            assert!(r.exhaustive);
        }
    }

    #[test]
    fn ring_axioms_at_top_level() {
        let t = build_tower(3, 2).unwrap();
        let top = t.top();
        let y = top.generator();
        let y1 = top.embed(&t.ring(1).generator(), 1);
        let a = top.add(&y, &top.from_i64(2));
        let b = top.sub(&top.mul(&y, &y), &y1);
        let c = top.add(&top.mul(&y1, &y), &top.one());
        assert_eq!(top.mul(&a, &b), top.mul(&b, &a));
        assert_eq!(top.mul(&top.mul(&a, &b), &c), top.mul(&a, &top.mul(&b, &c)));
        assert_eq!(
            top.mul(&a, &top.add(&b, &c)),
            top.add(&top.mul(&a, &b), &top.mul(&a, &c))
        );
    }
}
