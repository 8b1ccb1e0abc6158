//! Cyclotomic integers, residue fields of Z[zeta_d] and the characters that
//! take values in them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{invalid, precondition, Error, Result};
use crate::ff::{Elem, Field, FieldCaps, FieldSpec};

/// Default cap on `phi(d)` for exact cyclotomic evaluation.
pub const DEFAULT_PHI_BUDGET: u64 = 64;

/// Integer coefficients of the `d`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<BigInt> {
    assert!(d >= 1, "cyclotomic index must be positive");
    // x^d - 1 divided by Phi_k for every proper divisor k of d.
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = -BigInt::one();
    num[d as usize] = BigInt::one();
    for k in 1..d {
        if d.is_multiple_of(k) {
            num = div_monic(&num, &cyclotomic_polynomial(k));
        }
    }
    num
}

fn div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for top in (db..a.len()).rev() {
        let c = rem[top].clone();
        if c.is_zero() {
            continue;
        }
        let shift = top - db;
        for (i, bi) in b.iter().enumerate() {
            rem[shift + i] -= &c * bi;
        }
        quot[shift] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// An element of Z[zeta_d], stored as its residue modulo `Phi_d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElement {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloElement(d={}, {})", self.order, self)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl CycloElement {
    pub fn zero(d: u64) -> Self {
        CycloElement { order: d, coeffs: vec![BigInt::zero(); arith::totient(d) as usize] }
    }

    pub fn from_int(d: u64, n: i64) -> Self {
        let mut out = Self::zero(d);
        out.coeffs[0] = BigInt::from(n);
        out
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(d, 1)
    }

    /// `zeta_d^k` for any integer `k`.
    pub fn zeta_pow(d: u64, k: i64) -> Self {
        let mut dense = vec![BigInt::zero(); d as usize];
        dense[k.rem_euclid(d as i64) as usize] = BigInt::one();
        Self::from_dense(d, dense)
    }

    /// Reduces a coefficient vector of any length (powers of zeta_d) mod `Phi_d`.
    pub fn from_dense(d: u64, mut dense: Vec<BigInt>) -> Self {
        let phi = cyclotomic_polynomial(d);
        let n = phi.len() - 1;
        while dense.len() > n {
            let top = dense.len() - 1;
            let c = dense.pop().expect("nonempty");
            if !c.is_zero() {
                let shift = top - n;
                for (i, pi) in phi.iter().take(n).enumerate() {
                    dense[shift + i] -= &c * pi;
                }
            }
        }
        dense.resize(n, BigInt::zero());
        CycloElement { order: d, coeffs: dense }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(invalid(format!(
                "cyclotomic orders differ: {} vs {}",
                self.order, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycloElement { order: self.order, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CycloElement { order: self.order, coeffs })
    }

    pub fn neg(&self) -> Self {
        CycloElement { order: self.order, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut dense = vec![BigInt::zero(); (2 * n).saturating_sub(1).max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                dense[i + j] += a * b;
            }
        }
        Ok(Self::from_dense(self.order, dense))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.order), |acc, _| acc.mul(self).expect("same order"))
    }

    /// Complex value under `zeta_d -> exp(2 pi i / d)`.
    pub fn to_complex(&self) -> Complex64 {
        let d = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(c, std::f64::consts::TAU * i as f64 / d)
            })
            .sum()
    }
}

/// Exact value of the formal sum `sum_i c_i zeta_d^{e_i}` in Z[zeta_d].
pub fn cyclo_oracle_value(d: u64, terms: &[(i64, i64)]) -> Result<CycloElement> {
    cyclo_oracle_value_with_budget(d, terms, DEFAULT_PHI_BUDGET)
}

pub fn cyclo_oracle_value_with_budget(d: u64, terms: &[(i64, i64)], budget: u64) -> Result<CycloElement> {
    if d == 0 {
        return Err(invalid("cyclotomic order must be positive"));
    }
    let phi = arith::totient(d);
    if phi > budget {
        return Err(Error::BudgetExceeded {
            what: "cyclotomic degree",
            needed: phi as u128,
            budget: budget as u128,
        });
    }
    let mut dense = vec![0i128; d as usize];
    for &(c, e) in terms {
        dense[e.rem_euclid(d as i64) as usize] += c as i128;
    }
    Ok(CycloElement::from_dense(d, dense.into_iter().map(BigInt::from).collect()))
}

/// Least `m >= 1` with `ell^m = 1 (mod d)`.
pub fn residue_degree(d: u64, ell: u64) -> Result<u32> {
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    if arith::gcd(ell, d) != 1 {
        return Err(Error::Ramified { ell, d });
    }
    Ok(arith::multiplicative_order(ell, d) as u32)
}

/// Serializable description of a [`ResidueContext`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDescriptor {
    pub d: u64,
    pub ell: u64,
    pub m: u32,
    pub modulus: Vec<u64>,
    pub zeta_d: String,
    pub generator: String,
    pub conjugate: u64,
}

/// The residue field F_l = Z[zeta_d]/l realised as F_{ell^m}, together with the
/// image of zeta_d that pins down the prime ideal l.
#[derive(Clone)]
pub struct ResidueContext {
    d: u64,
    ell: u64,
    m: u32,
    conjugate: u64,
    field: Field,
    zeta_powers: Arc<[Elem]>,
}

impl fmt::Debug for ResidueContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResidueContext")
            .field("d", &self.d)
            .field("ell", &self.ell)
            .field("m", &self.m)
            .field("conjugate", &self.conjugate)
            .finish()
    }
}

const MAX_ZETA_ORDER: u64 = 1 << 24;

impl ResidueContext {
    pub fn new(d: u64, ell: u64) -> Result<Self> {
        Self::with_conjugate(d, ell, 1)
    }

    /// Uses `zeta_d := g^{k (ell^m - 1)/d}`; different `k` coprime to `d` give
    /// the Galois-conjugate prime ideals above `ell`.
    pub fn with_conjugate(d: u64, ell: u64, k: u64) -> Result<Self> {
        Self::with_caps(d, ell, k, FieldCaps::default())
    }

    pub fn with_caps(d: u64, ell: u64, k: u64, caps: FieldCaps) -> Result<Self> {
        if !arith::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        let m = residue_degree(d, ell)?;
        if arith::gcd(k % d.max(1), d) != 1 && d > 1 {
            return Err(invalid(format!("conjugate exponent {k} is not coprime to d = {d}")));
        }
        if d > MAX_ZETA_ORDER {
            return Err(Error::CapExceeded { what: "root of unity order", size: d as u128, cap: MAX_ZETA_ORDER as u128 });
        }
        let spec = FieldSpec::canonical(ell, m)?;
        let field = Field::with_caps(spec, caps)?;
        let q1 = field.order() - 1;
        let zeta = field.pow_u(field.generator(), (k % d.max(1)).max(1) * (q1 / d) % q1.max(1));
        let zeta = if d == 1 { Elem::ONE } else { zeta };
        let mut powers = Vec::with_capacity(d as usize);
        let mut cur = Elem::ONE;
        for _ in 0..d {
            powers.push(cur);
            cur = field.mul(cur, zeta);
        }
        debug_assert_eq!(cur, Elem::ONE);
        Ok(ResidueContext { d, ell, m, conjugate: if d == 1 { 1 } else { k % d }, field, zeta_powers: powers.into() })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn conjugate(&self) -> u64 {
        self.conjugate
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// |F_l| = ell^m.
    pub fn order(&self) -> u64 {
        self.field.order()
    }

    pub fn zeta_d(&self) -> Elem {
        self.zeta_pow(1)
    }

    /// Image of `zeta_d^k`.
    #[inline]
    pub fn zeta_pow(&self, k: i64) -> Elem {
        self.zeta_powers[k.rem_euclid(self.d as i64) as usize]
    }

    /// Image of `zeta_r` for `r | d`, i.e. `zeta_d^{d/r}`.
    pub fn root_of_unity(&self, r: u64) -> Result<Elem> {
        if r == 0 || !self.d.is_multiple_of(r) {
            return Err(precondition(format!("{r} does not divide d = {}", self.d)));
        }
        Ok(self.zeta_pow((self.d / r) as i64))
    }

    /// Image of an integer.
    pub fn image_int(&self, n: i128) -> Elem {
        Elem(n.rem_euclid(self.ell as i128) as u32)
    }

    pub fn image_big(&self, n: &BigInt) -> Elem {
        let r = n.mod_floor(&BigInt::from(self.ell));
        Elem(r.to_u32().expect("reduced below ell"))
    }

    /// Reduction Z[zeta_d] -> F_l.
    pub fn reduce(&self, x: &CycloElement) -> Result<Elem> {
        if x.order() != self.d {
            return Err(invalid(format!(
                "element lives in Z[zeta_{}], context has d = {}",
                x.order(),
                self.d
            )));
        }
        let f = &self.field;
        Ok(x.coefficients().iter().enumerate().fold(Elem::ZERO, |acc, (i, c)| {
            if c.is_zero() {
                acc
            } else {
                f.add(acc, f.mul(self.image_big(c), self.zeta_pow(i as i64)))
            }
        }))
    }

    pub fn descriptor(&self) -> ContextDescriptor {
        ContextDescriptor {
            d: self.d,
            ell: self.ell,
            m: self.m,
            modulus: self.field.spec().modulus().to_vec(),
            zeta_d: self.field.format(self.zeta_d()),
            generator: self.field.format(self.field.generator()),
            conjugate: self.conjugate,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.descriptor()).expect("descriptor serializes")
    }
}

/// psi(x) = zeta_p^{tr(x)} on F_q.
#[derive(Clone, Debug)]
pub struct AdditiveCharacter {
    domain: Field,
    ctx: ResidueContext,
    step: u64,
}

impl AdditiveCharacter {
    pub fn new(domain: &Field, ctx: &ResidueContext) -> Result<Self> {
        let p = domain.characteristic();
        if !ctx.d().is_multiple_of(p) {
            return Err(precondition(format!(
                "additive character of F_{} needs p = {p} to divide d = {}",
                domain.order(),
                ctx.d()
            )));
        }
        Ok(AdditiveCharacter { domain: domain.clone(), ctx: ctx.clone(), step: ctx.d() / p })
    }

    pub fn domain(&self) -> &Field {
        &self.domain
    }

    pub fn context(&self) -> &ResidueContext {
        &self.ctx
    }

    /// `tr(x)` in `[0, p)`, the exponent of zeta_p.
    #[inline]
    pub fn exponent(&self, x: Elem) -> u64 {
        self.domain.trace(x)
    }

    /// Image of `zeta_p^j`.
    #[inline]
    pub fn zeta_p_pow(&self, j: u64) -> Elem {
        self.ctx.zeta_pow((self.step * (j % self.domain.characteristic())) as i64)
    }

    #[inline]
    pub fn value(&self, x: Elem) -> Elem {
        self.zeta_p_pow(self.exponent(x))
    }

    pub fn complex(&self, x: Elem) -> Complex64 {
        unit(self.exponent(x), self.domain.characteristic())
    }
}

/// chi(g^k) = zeta_order^k on F_q^x, chi(0) = 0.
#[derive(Clone, Debug)]
pub struct MultiplicativeCharacter {
    domain: Field,
    ctx: ResidueContext,
    order: u64,
    step: u64,
}

impl MultiplicativeCharacter {
    pub fn new(domain: &Field, order: u64, ctx: &ResidueContext) -> Result<Self> {
        if order < 1 || !(domain.order() - 1).is_multiple_of(order) {
            return Err(precondition(format!(
                "d = {order} does not divide q - 1 = {}",
                domain.order() - 1
            )));
        }
        if !ctx.d().is_multiple_of(order) {
            return Err(precondition(format!(
                "character order {order} does not divide the context's d = {}",
                ctx.d()
            )));
        }
        if !domain.is_tabulated() {
            return Err(Error::CapExceeded {
                what: "discrete log table",
                size: domain.order() as u128,
                cap: FieldCaps::default().tabulation as u128,
            });
        }
        Ok(MultiplicativeCharacter { domain: domain.clone(), ctx: ctx.clone(), order, step: ctx.d() / order })
    }

    pub fn domain(&self) -> &Field {
        &self.domain
    }

    pub fn context(&self) -> &ResidueContext {
        &self.ctx
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `k mod d` with `x = g^k`, or `None` at zero.
    #[inline]
    pub fn exponent(&self, x: Elem) -> Option<u64> {
        self.domain.dlog(x).ok().map(|k| k % self.order)
    }

    #[inline]
    pub fn value(&self, x: Elem) -> Elem {
        match self.exponent(x) {
            Some(k) => self.ctx.zeta_pow((k * self.step) as i64),
            None => Elem::ZERO,
        }
    }

    pub fn complex(&self, x: Elem) -> Complex64 {
        match self.exponent(x) {
            Some(k) => unit(k, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Either kind of character, for callers that treat them uniformly.
#[derive(Clone, Debug)]
pub enum Character {
    Additive(AdditiveCharacter),
    Multiplicative(MultiplicativeCharacter),
}

impl Character {
    pub fn value(&self, x: Elem) -> Elem {
        match self {
            Character::Additive(c) => c.value(x),
            Character::Multiplicative(c) => c.value(x),
        }
    }

    pub fn complex(&self, x: Elem) -> Complex64 {
        match self {
            Character::Additive(c) => c.complex(x),
            Character::Multiplicative(c) => c.complex(x),
        }
    }
}

/// `exp(2 pi i k / n)`.
pub fn unit(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    // Exact values at the quarter points keep real Kloosterman sums exactly real.
    if 4 * k == n {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * k == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * n {
        return Complex64::new(0.0, -1.0);
    }
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
}

/// Square roots of p and q in F_l obtained from the quadratic Gauss sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussRoots {
    /// `g_p = sum_{x in F_p} psi(x^2)`.
    pub gauss_sum: Elem,
    pub sqrt_p: Elem,
    /// `(sqrt p)^e`.
    pub sqrt_q: Elem,
}

pub fn gauss_sqrt(q_field: &Field, ctx: &ResidueContext) -> Result<GaussRoots> {
    let p = q_field.characteristic();
    if p == 2 {
        return Err(Error::Unsupported("square roots of q in characteristic 2".into()));
    }
    if !ctx.d().is_multiple_of(p) {
        return Err(precondition(format!("p = {p} must divide d = {} to realise zeta_p", ctx.d())));
    }
    let f = ctx.field();
    let step = ctx.d() / p;
    let gauss_sum = (0..p).fold(Elem::ZERO, |acc, x| {
        f.add(acc, ctx.zeta_pow((step * (x * x % p)) as i64))
    });
    let sqrt_p = if p % 4 == 1 {
        gauss_sum
    } else {
        if !ctx.d().is_multiple_of(4) {
            return Err(precondition(format!(
                "p = {p} is 3 mod 4, so zeta_4 is required but 4 does not divide d = {}",
                ctx.d()
            )));
        }
        f.div(gauss_sum, ctx.zeta_pow((ctx.d() / 4) as i64))?
    };
    let image_p = ctx.image_int(p as i128);
    if f.mul(sqrt_p, sqrt_p) != image_p {
        return Err(precondition("Gauss sum does not square to p in the residue field"));
    }
    let sqrt_q = f.pow_u(sqrt_p, q_field.degree() as u64);
    debug_assert_eq!(f.mul(sqrt_q, sqrt_q), ctx.image_int(q_field.order() as i128));
    Ok(GaussRoots { gauss_sum, sqrt_p, sqrt_q })
}

/// Whether `gauss_sum^2 = (-1)^{(p-1)/2} p` holds in F_l.
pub fn gauss_square_law_holds(p: u64, ctx: &ResidueContext) -> Result<bool> {
    let f = ctx.field();
    let fp = Field::prime(p)?;
    let psi = AdditiveCharacter::new(&fp, ctx)?;
    let g = fp.elements().fold(Elem::ZERO, |acc, x| f.add(acc, psi.value(fp.mul(x, x))));
    let sign: i128 = if ((p - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    Ok(f.mul(g, g) == ctx.image_int(sign * p as i128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn residue_degrees() {
        assert_eq!(residue_degree(4, 5).unwrap(), 1);
        assert_eq!(residue_degree(5, 7).unwrap(), 4);
        assert_eq!(residue_degree(13, 3).unwrap(), 3);
        assert_eq!(residue_degree(1, 7).unwrap(), 1);
        assert!(matches!(residue_degree(6, 3), Err(Error::Ramified { .. })));
    }

    #[test]
    fn contexts() {
        let c = ResidueContext::new(4, 5).unwrap();
        assert_eq!(c.zeta_d(), Elem(2));
        let c = ResidueContext::new(1, 7).unwrap();
        assert_eq!(c.zeta_d(), Elem::ONE);
        let c = ResidueContext::new(5, 11).unwrap();
        assert_eq!(c.zeta_d(), Elem(4));
        let desc = c.descriptor();
        assert_eq!(desc.zeta_d, "4");
        assert_eq!(desc.generator, "2");
    }

    #[test]
    fn reduction_examples() {
        let c = ResidueContext::new(4, 5).unwrap();
        let z = CycloElement::zeta_pow(4, 1);
        assert_eq!(c.reduce(&z).unwrap(), c.zeta_d());
        let one_plus = CycloElement::one(4).add(&z).unwrap();
        assert_eq!(c.reduce(&one_plus).unwrap(), Elem(3));
        let c = ResidueContext::new(7, 13).unwrap();
        let s = cyclo_oracle_value(7, &(1..7).map(|i| (1, i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(c.reduce(&s).unwrap(), c.image_int(-1));
        assert!(c.reduce(&CycloElement::one(5)).is_err());
    }

    #[test]
    fn oracle_examples() {
        let v = cyclo_oracle_value(3, &[(1, 2), (1, 4)]).unwrap();
        assert_eq!(v, CycloElement::from_int(3, -1));
        assert!(cyclo_oracle_value(7, &[]).unwrap().is_zero());
        let a = cyclo_oracle_value(5, &[(1, 1), (1, 4)]).unwrap();
        let sq = a.mul(&a).unwrap();
        // (z + z^4)^2 = z^2 + 2 + z^3
        assert_eq!(sq, cyclo_oracle_value(5, &[(1, 2), (2, 0), (1, 3)]).unwrap());
        assert!(cyclo_oracle_value(67, &[]).is_err());
    }

    #[test]
    fn characters() {
        let f7 = Field::prime(7).unwrap();
        let ctx = ResidueContext::new(2, 5).unwrap();
        let chi = MultiplicativeCharacter::new(&f7, 2, &ctx).unwrap();
        assert_eq!(chi.value(Elem(2)), Elem::ONE);
        assert_eq!(chi.value(Elem(3)), ctx.image_int(-1));
        assert_eq!(chi.value(Elem::ZERO), Elem::ZERO);
        assert!(MultiplicativeCharacter::new(&f7, 4, &ResidueContext::new(4, 5).unwrap()).is_err());

        let f3 = Field::prime(3).unwrap();
        let ctx = ResidueContext::new(3, 13).unwrap();
        let psi = AdditiveCharacter::new(&f3, &ctx).unwrap();
        assert_eq!(psi.value(Elem::ZERO), Elem::ONE);
        assert_eq!(psi.value(Elem::ONE), ctx.zeta_d());
        let total = f3.elements().fold(Elem::ZERO, |a, x| ctx.field().add(a, psi.value(x)));
        assert_eq!(total, Elem::ZERO);
    }

    #[test]
    fn gauss_roots() {
        let f5 = Field::prime(5).unwrap();
        let ctx = ResidueContext::new(5, 11).unwrap();
        let r = gauss_sqrt(&f5, &ctx).unwrap();
        assert_eq!(ctx.field().mul(r.sqrt_p, r.sqrt_p), ctx.image_int(5));

        let f3 = Field::prime(3).unwrap();
        let ctx = ResidueContext::new(12, 13).unwrap();
        let r = gauss_sqrt(&f3, &ctx).unwrap();
        let g2 = ctx.field().mul(r.gauss_sum, r.gauss_sum);
        assert_eq!(g2, ctx.image_int(-3));
        let exact = cyclo_oracle_value(3, &[(1, 0), (2, 1)]).unwrap();
        assert_eq!(exact.mul(&exact).unwrap(), CycloElement::from_int(3, -3));
        assert!(gauss_sqrt(&f3, &ResidueContext::new(3, 7).unwrap()).is_err());

        let f25 = Field::canonical(5, 2).unwrap();
        let ctx = ResidueContext::new(20, 3).unwrap();
        let r = gauss_sqrt(&f25, &ctx).unwrap();
        assert_eq!(ctx.field().mul(r.sqrt_q, r.sqrt_q), ctx.image_int(25));
    }
}
