//! Finite fields F_{p^e} as residues of polynomials over Z/p.
//!
//! Elements are addressed by their *enumeration index*
//! `c0 + c1 p + ... + c_{e-1} p^{e-1}`, where `c_i` are the coefficients of
//! the residue polynomial. Index 0 is zero, index 1 is one, and the element
//! `x` sits at index `p`. The index is the bijection used by every tabulated
//! function in the crate.
//!
//! The modulus and the multiplicative generator are chosen canonically (the
//! lexicographically smallest candidates in enumeration order), so two runs
//! always produce the same representation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{self, mul_mod};
use crate::error::{invalid, Error, Result};

/// Size caps for field construction and exhaustive tabulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCaps {
    /// Largest order a field may have at all.
    pub existence: u64,
    /// Largest order for which log/exp tables (and enumeration) are built.
    pub tabulation: u64,
}

impl Default for FieldCaps {
    fn default() -> Self {
        FieldCaps { existence: 1 << 31, tabulation: 1 << 22 }
    }
}

/// Enumeration index of a field element. Only meaningful next to its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Description of F_{p^e}: characteristic, degree and monic modulus
/// (coefficients constant term first, leading 1 included).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    characteristic: u64,
    degree: u32,
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Validates primality, the modulus shape, irreducibility and the default cap.
    pub fn new(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self> {
        Self::with_cap(p, e, modulus, FieldCaps::default().existence)
    }

    pub fn with_cap(p: u64, e: u32, modulus: Vec<u64>, cap: u64) -> Result<Self> {
        check_order(p, e, cap)?;
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::ReducibleModulus { p, degree: e, modulus });
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus { p, degree: e, modulus });
        }
        Ok(FieldSpec { characteristic: p, degree: e, modulus })
    }

    /// F_{p^e} with the canonical modulus from [`find_irreducible`].
    pub fn canonical(p: u64, e: u32) -> Result<Self> {
        let modulus = find_irreducible(p, e)?;
        Ok(FieldSpec { characteristic: p, degree: e, modulus })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::canonical(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.characteristic.pow(self.degree)
    }

    /// Text form `p^e:m0,m1,...,1`.
    pub fn canonical_string(&self) -> String {
        format!("{}^{}:{}", self.characteristic, self.degree, join(&self.modulus))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("field {s:?}: expected p^e:m0,...,1"));
        let (pe, m) = s.split_once(':').ok_or_else(bad)?;
        let (p, e) = pe.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let e: u32 = e.trim().parse().map_err(|_| bad())?;
        let modulus = m
            .split(',')
            .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, e, modulus)
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn check_order(p: u64, e: u32, cap: u64) -> Result<()> {
    if e == 0 {
        return Err(invalid("field degree must be >= 1"));
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match arith::checked_pow(p, e) {
        Some(q) if q <= cap as u128 => Ok(()),
        Some(q) => Err(Error::CapExceeded { what: "field order", size: q, cap: cap as u128 }),
        None => Err(Error::CapExceeded { what: "field order", size: u128::MAX, cap: cap as u128 }),
    }
}

// ---------------------------------------------------------------------------
// Polynomials over Z/p (coefficient vectors, constant term first).

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn zp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = arith::pow_mod(f[df], p - 2, p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = mul_mod(r[top], lead_inv, p);
        if c != 0 {
            let shift = top - df;
            for (i, &fi) in f.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, fi, p)) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn zp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

fn zp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    zp_rem(&zp_mul(a, b, p), f, p)
}

fn zp_powmod(a: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = zp_rem(a, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = zp_mulmod(&acc, &base, f, p);
        }
        base = zp_mulmod(&base, &base, f, p);
        exp >>= 1;
    }
    zp_rem(&acc, f, p)
}

fn zp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = zp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility of a monic `f` over Z/p: no factor of degree k <= deg/2,
/// checked by `gcd(x^{p^k} - x, f) = 1`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = f.len() - 1;
    if e == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..=e / 2 {
        frob = zp_powmod(&frob, p, f, p);
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = zp_gcd(&diff, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `e` over
/// Z/p, where candidates `x^e + c_{e-1} x^{e-1} + ... + c_0` are ordered by
/// the integer `c_0 + c_1 p + ...` (higher coefficients most significant).
pub fn find_irreducible(p: u64, e: u32) -> Result<Vec<u64>> {
    find_irreducible_with_cap(p, e, FieldCaps::default().existence)
}

pub fn find_irreducible_with_cap(p: u64, e: u32, cap: u64) -> Result<Vec<u64>> {
    check_order(p, e, cap)?;
    let q = p.pow(e);
    let e = e as usize;
    for idx in 0..q {
        let mut f = digits(idx, p, e);
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn digits(mut idx: u64, p: u64, e: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(e);
    for _ in 0..e {
        out.push(idx % p);
        idx /= p;
    }
    out
}

// ---------------------------------------------------------------------------

struct Tables {
    /// `exp[k]` is the index of `g^k`, `0 <= k < q - 1`.
    exp: Vec<u32>,
    /// `log[i]` is the discrete log of the element with index `i != 0`.
    log: Vec<u32>,
}

struct FieldInner {
    spec: FieldSpec,
    q: u64,
    p: u64,
    e: usize,
    pows: Vec<u64>,
    generator: Elem,
    /// tr(x^i) for i < e; the trace of any element follows by linearity.
    trace_basis: Vec<u64>,
    tables: Option<Tables>,
    add_table: Option<Vec<u32>>,
}

/// A constructed finite field, cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.inner.spec.canonical_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Field {}

const ADD_TABLE_MAX: u64 = 1024;

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        Self::with_caps(spec, FieldCaps::default())
    }

    /// Canonical F_{p^e}.
    pub fn canonical(p: u64, e: u32) -> Result<Self> {
        Self::new(FieldSpec::canonical(p, e)?)
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::canonical(p, 1)
    }

    pub fn with_caps(spec: FieldSpec, caps: FieldCaps) -> Result<Self> {
        check_order(spec.characteristic, spec.degree, caps.existence)?;
        let p = spec.characteristic;
        let e = spec.degree as usize;
        let q = spec.order();
        let pows: Vec<u64> = (0..=e as u32).map(|i| p.pow(i)).collect();
        let mut inner = FieldInner {
            spec,
            q,
            p,
            e,
            pows,
            generator: Elem::ONE,
            trace_basis: Vec::new(),
            tables: None,
            add_table: None,
        };
        let basis: Vec<u64> = (0..e)
            .map(|i| inner.trace_by_frobenius(Elem(inner.pows[i] as u32)))
            .collect();
        inner.trace_basis = basis;
        inner.generator = inner.search_generator();
        if q <= caps.tabulation {
            inner.tables = Some(inner.build_tables());
            if e > 1 && q <= ADD_TABLE_MAX {
                inner.add_table = Some(inner.build_add_table());
            }
        }
        Ok(Field { inner: Arc::new(inner) })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    /// Order as a usize, for sizing tables.
    pub fn size(&self) -> usize {
        self.inner.q as usize
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e as u32
    }

    pub fn is_tabulated(&self) -> bool {
        self.inner.tables.is_some()
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// The element `x` (the class of the indeterminate); equals `p` mod p when e = 1.
    pub fn x(&self) -> Elem {
        if self.inner.e == 1 {
            Elem::ZERO
        } else {
            Elem(self.inner.p as u32)
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.inner.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        let inner = &self.inner;
        if coeffs.len() > inner.e {
            return Err(invalid(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                inner.e
            )));
        }
        let mut idx = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= inner.p {
                return Err(invalid(format!("coefficient {c} not reduced mod {}", inner.p)));
            }
            idx += c * inner.pows[i];
        }
        Ok(Elem(idx as u32))
    }

    pub fn from_index(&self, idx: u64) -> Result<Elem> {
        if idx >= self.inner.q {
            return Err(invalid(format!("index {idx} out of range for field of order {}", self.inner.q)));
        }
        Ok(Elem(idx as u32))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        digits(a.0 as u64, self.inner.p, self.inner.e)
    }

    /// The `i`-th coordinate of `a` in the basis `1, x, ..., x^{e-1}`.
    #[inline]
    pub fn coord(&self, a: Elem, i: usize) -> u64 {
        (a.0 as u64 / self.inner.pows[i]) % self.inner.p
    }

    /// Text form `c0,c1,...,c{e-1}`.
    pub fn format(&self, a: Elem) -> String {
        join(&self.coeffs(a))
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let coeffs = s
            .split(',')
            .map(|c| {
                let v: i64 = c.trim().parse().map_err(|_| Error::Parse(format!("element {s:?}")))?;
                Ok(v.rem_euclid(self.inner.p as i64) as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        self.from_coeffs(&coeffs)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.e == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return Elem(if s >= inner.p { s - inner.p } else { s } as u32);
        }
        if let Some(t) = &inner.add_table {
            return Elem(t[a.index() * inner.q as usize + b.index()]);
        }
        inner.add_digits(a, b)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.e == 1 {
            return Elem(if a.0 == 0 { 0 } else { (inner.p - a.0 as u64) as u32 });
        }
        let mut idx = 0u64;
        let mut rest = a.0 as u64;
        for i in 0..inner.e {
            let c = rest % inner.p;
            rest /= inner.p;
            if c != 0 {
                idx += (inner.p - c) * inner.pows[i];
            }
        }
        Elem(idx as u32)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.inner;
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if inner.e == 1 {
            return Elem(mul_mod(a.0 as u64, b.0 as u64, inner.p) as u32);
        }
        match &inner.tables {
            Some(t) => {
                let n = inner.q - 1;
                let s = t.log[a.index()] as u64 + t.log[b.index()] as u64;
                Elem(t.exp[(if s >= n { s - n } else { s }) as usize])
            }
            None => inner.mul_poly(a, b),
        }
    }

    /// Multiplication by an integer.
    pub fn scale(&self, a: Elem, k: i64) -> Elem {
        self.mul(a, self.from_int(k))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.inner.q - 1;
        match &self.inner.tables {
            Some(t) => {
                let l = t.log[a.index()] as u64;
                Ok(Elem(t.exp[((n - l) % n) as usize]))
            }
            None => Ok(self.pow_u(a, n - 1)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k` for a nonnegative exponent; `0^0 = 1`.
    pub fn pow_u(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let n = self.inner.q - 1;
        if let Some(t) = &self.inner.tables {
            let l = t.log[a.index()] as u128 * (k % n) as u128 % n as u128;
            return Elem(t.exp[l as usize]);
        }
        let mut acc = Elem::ONE;
        let mut base = a;
        let mut k = k % n + if k.is_multiple_of(n) { n } else { 0 };
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `a^k` for any integer exponent; negative exponents go through the inverse.
    pub fn pow(&self, a: Elem, k: i64) -> Result<Elem> {
        if k >= 0 {
            Ok(self.pow_u(a, k as u64))
        } else {
            Ok(self.pow_u(self.inv(a)?, k.unsigned_abs()))
        }
    }

    /// Absolute trace to the prime field, as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Elem) -> u64 {
        let inner = &*self.inner;
        if inner.e == 1 {
            return a.0 as u64;
        }
        let mut rest = a.0 as u64;
        let mut acc = 0u64;
        for i in 0..inner.e {
            let c = rest % inner.p;
            rest /= inner.p;
            acc += c * inner.trace_basis[i];
        }
        acc % inner.p
    }

    /// Trace computed literally as `a + a^p + ... + a^{p^{e-1}}`.
    pub fn trace_frobenius(&self, a: Elem) -> u64 {
        self.inner.trace_by_frobenius(a)
    }

    /// The canonical multiplicative generator.
    pub fn generator(&self) -> Elem {
        self.inner.generator
    }

    /// `g^k` for the canonical generator.
    pub fn exp(&self, k: u64) -> Elem {
        let n = self.inner.q - 1;
        match &self.inner.tables {
            Some(t) => Elem(t.exp[(k % n) as usize]),
            None => self.pow_u(self.inner.generator, k % n),
        }
    }

    /// Discrete log to the canonical generator, in `[0, q - 1)`.
    pub fn dlog(&self, a: Elem) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.inner.tables {
            Some(t) => Ok(t.log[a.index()] as u64),
            None => Err(Error::CapExceeded {
                what: "discrete log table",
                size: self.inner.q as u128,
                cap: 0,
            }),
        }
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.inner.q as u32).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.inner.q as u32).map(Elem)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: Elem) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.inner.q - 1;
        let mut ord = n;
        for r in arith::prime_factors(n) {
            while ord.is_multiple_of(r) && self.pow_u(a, ord / r) == Elem::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Checked wrapper binding `a` to this field.
    pub fn element(&self, a: Elem) -> FieldElement {
        FieldElement { field: self.clone(), elem: a }
    }
}

impl FieldInner {
    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut idx = 0u64;
        for i in 0..self.e {
            let s = x % self.p + y % self.p;
            x /= self.p;
            y /= self.p;
            idx += (if s >= self.p { s - self.p } else { s }) * self.pows[i];
        }
        Elem(idx as u32)
    }

    fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        let pa = digits(a.0 as u64, self.p, self.e);
        let pb = digits(b.0 as u64, self.p, self.e);
        let r = zp_mulmod(&pa, &pb, &self.spec.modulus, self.p);
        Elem(r.iter().enumerate().map(|(i, &c)| c * self.pows[i]).sum::<u64>() as u32)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.e == 1 {
            return Elem(mul_mod(a.0 as u64, b.0 as u64, self.p) as u32);
        }
        self.mul_poly(a, b)
    }

    fn pow_slow(&self, a: Elem, mut k: u64) -> Elem {
        let mut acc = Elem::ONE;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            k >>= 1;
        }
        acc
    }

    fn trace_by_frobenius(&self, a: Elem) -> u64 {
        let mut acc = Elem::ZERO;
        let mut conj = a;
        for _ in 0..self.e {
            acc = if self.e == 1 {
                Elem(((acc.0 as u64 + conj.0 as u64) % self.p) as u32)
            } else {
                self.add_digits(acc, conj)
            };
            conj = self.pow_slow(conj, self.p);
        }
        debug_assert!((acc.0 as u64) < self.p, "trace must lie in the prime field");
        acc.0 as u64
    }

    fn search_generator(&self) -> Elem {
        let n = self.q - 1;
        let factors = arith::prime_factors(n);
        for idx in 1..self.q {
            let g = Elem(idx as u32);
            if factors.iter().all(|&r| self.pow_slow(g, n / r) != Elem::ONE) {
                return g;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let n = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(n.max(1));
        let mut log = vec![0u32; self.q as usize];
        let mut cur = Elem::ONE;
        for k in 0..n.max(1) {
            exp.push(cur.0);
            log[cur.index()] = k as u32;
            cur = self.mul_slow(cur, self.generator);
        }
        Tables { exp, log }
    }

    fn build_add_table(&self) -> Vec<u32> {
        let q = self.q as u32;
        let mut t = Vec::with_capacity((q * q) as usize);
        for a in 0..q {
            for b in 0..q {
                t.push(self.add_digits(Elem(a), Elem(b)).0);
            }
        }
        t
    }
}

/// A field element bound to its field, for checked arithmetic across APIs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    elem: Elem,
}

impl FieldElement {
    pub fn new(field: &Field, coeffs: &[u64]) -> Result<Self> {
        Ok(field.element(field.from_coeffs(coeffs)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.elem
    }

    pub fn coefficients(&self) -> Vec<u64> {
        self.field.coeffs(self.elem)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(
                self.field.spec().canonical_string(),
                other.field.spec().canonical_string(),
            ))
        }
    }

    fn wrap(&self, elem: Elem) -> Self {
        FieldElement { field: self.field.clone(), elem }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.add(self.elem, other.elem)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.sub(self.elem, other.elem)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.mul(self.elem, other.elem)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.div(self.elem, other.elem)?))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.field.neg(self.elem))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.wrap(self.field.inv(self.elem)?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        Ok(self.wrap(self.field.pow(self.elem, k)?))
    }

    pub fn trace_to_prime(&self) -> u64 {
        self.field.trace_frobenius(self.elem)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.elem))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(find_irreducible(3, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(find_irreducible(5, 2).unwrap(), vec![2, 0, 1]);
        assert!(matches!(find_irreducible(2, 40), Err(Error::CapExceeded { .. })));
        assert!(matches!(FieldSpec::new(4, 1, vec![0, 1]), Err(Error::NotPrime(4))));
        assert!(matches!(
            FieldSpec::new(3, 2, vec![2, 0, 1]),
            Err(Error::ReducibleModulus { .. })
        ));
    }

    #[test]
    fn small_arithmetic() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.inv(Elem(3)).unwrap(), Elem(5));
        assert_eq!(f7.pow(Elem(4), 0).unwrap(), Elem::ONE);
        assert!(matches!(f7.inv(Elem::ZERO), Err(Error::DivisionByZero)));
        let f9 = Field::canonical(3, 2).unwrap();
        let x = f9.x();
        assert_eq!(x, Elem(3));
        assert_eq!(f9.mul(x, x), Elem(2));
        assert_eq!(f9.pow(x, -1).unwrap(), f9.inv(x).unwrap());
    }

    #[test]
    fn traces() {
        let f9 = Field::canonical(3, 2).unwrap();
        assert_eq!(f9.trace(Elem::ONE), 2);
        assert_eq!(f9.trace_frobenius(f9.x()), 0);
        let f7 = Field::prime(7).unwrap();
        for a in f7.elements() {
            assert_eq!(f7.trace(a), a.0 as u64);
        }
    }

    #[test]
    fn generators() {
        assert_eq!(Field::prime(7).unwrap().generator(), Elem(3));
        assert_eq!(Field::prime(2).unwrap().generator(), Elem(1));
        assert_eq!(Field::prime(5).unwrap().generator(), Elem(2));
    }

    #[test]
    fn discrete_logs() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.dlog(Elem(1)).unwrap(), 0);
        assert_eq!(f7.dlog(Elem(3)).unwrap(), 1);
        assert_eq!(f7.dlog(Elem(6)).unwrap(), 3);
        assert!(f7.dlog(Elem::ZERO).is_err());
    }

    #[test]
    fn enumeration_order() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.elements().collect::<Vec<_>>(), vec![Elem(0), Elem(1), Elem(2)]);
        let f9 = Field::canonical(3, 2).unwrap();
        assert_eq!(f9.elements().count(), 9);
        assert_eq!(f9.from_coeffs(&[0, 1]).unwrap(), Elem(3));
    }

    #[test]
    fn untabulated_field_agrees_with_tabulated() {
        let spec = FieldSpec::canonical(3, 4).unwrap();
        let fast = Field::new(spec.clone()).unwrap();
        let slow = Field::with_caps(spec, FieldCaps { existence: 1 << 31, tabulation: 1 }).unwrap();
        assert!(!slow.is_tabulated());
        for a in fast.elements().step_by(7) {
            for b in fast.elements().step_by(5) {
                assert_eq!(fast.mul(a, b), slow.mul(a, b));
            }
            if !a.is_zero() {
                assert_eq!(fast.inv(a).unwrap(), slow.inv(a).unwrap());
            }
        }
        assert_eq!(fast.generator(), slow.generator());
    }

    #[test]
    fn checked_elements() {
        let f7 = Field::prime(7).unwrap();
        let f9 = Field::canonical(3, 2).unwrap();
        let a = FieldElement::new(&f7, &[3]).unwrap();
        let b = FieldElement::new(&f9, &[1]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::FieldMismatch(..))));
        assert_eq!(a.inv().unwrap().to_string(), "5");
        assert_eq!(FieldElement::new(&f9, &[0, 1]).unwrap().trace_to_prime(), 0);
        assert_eq!(
            FieldSpec::parse(&f9.spec().canonical_string()).unwrap(),
            *f9.spec()
        );
        assert_eq!(f9.spec().canonical_string(), "3^2:1,0,1");
        assert_eq!(f9.parse_elem("2,1").unwrap(), Elem(5));
    }
}
