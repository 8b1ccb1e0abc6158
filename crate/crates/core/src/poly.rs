//! Dense univariate polynomials over a [`Field`].

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::ff::{Elem, Field};

/// Polynomial with coefficients constant term first, never with trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({:?})", self.coeffs.iter().map(|c| c.0).collect::<Vec<_>>())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Self {
        Poly::new(vec![c])
    }

    /// `X`.
    pub fn x() -> Self {
        Poly::new(vec![Elem::ZERO, Elem::ONE])
    }

    /// `X - r`.
    pub fn linear_root(field: &Field, r: Elem) -> Self {
        Poly::new(vec![field.neg(r), Elem::ONE])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(field: &Field, roots: &[Elem]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(Elem::ONE), |acc, &r| acc.mul(field, &Poly::linear_root(field, r)))
    }

    /// From integer coefficients reduced into the prime field.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    /// Parses `c0;c1;...` where each coefficient is an element in text form.
    pub fn parse(field: &Field, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let coeffs = s
            .split(';')
            .map(|c| field.parse_elem(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn format(&self, field: &Field) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs.iter().map(|&c| field.format(c)).collect::<Vec<_>>().join(";")
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, field: &Field, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or(Elem::ZERO);
        Poly::new((0..n).map(|i| field.add(get(self, i), get(other, i))).collect())
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &Field, c: Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, field: &Field, k: u32) -> Poly {
        (0..k).fold(Poly::constant(Elem::ONE), |acc, _| acc.mul(field, self))
    }

    /// Euclidean division `(quotient, remainder)`.
    pub fn div_rem(&self, field: &Field, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = field.inv(divisor.lead())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = field.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dd;
            quot[shift] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = field.sub(rem[shift + i], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn div_exact(&self, field: &Field, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(field, divisor)?;
        if !r.is_zero() {
            return Err(invalid("polynomial division is not exact"));
        }
        Ok(q)
    }

    pub fn monic(&self, field: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = field.inv(self.lead()).expect("nonzero leading coefficient");
        self.scale(field, inv)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, field: &Field, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(field, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(field)
    }

    pub fn derivative(&self, field: &Field) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.scale(c, i as i64))
                .collect(),
        )
    }

    pub fn is_squarefree(&self, field: &Field) -> bool {
        !self.is_zero() && self.gcd(field, &self.derivative(field)).is_constant()
    }

    /// Roots in the base field, in enumeration order, without multiplicity.
    pub fn roots(&self, field: &Field) -> Vec<Elem> {
        field.elements().filter(|&x| self.eval(field, x).is_zero()).collect()
    }

    /// Multiplicity of `r` as a root.
    pub fn root_multiplicity(&self, field: &Field, r: Elem) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear_root(field, r);
        let mut cur = self.clone();
        let mut k = 0;
        loop {
            let (q, rem) = cur.div_rem(field, &lin).expect("monic divisor");
            if !rem.is_zero() {
                return k;
            }
            cur = q;
            k += 1;
        }
    }

    /// Squarefree decomposition `f = c * prod_i f_i^{m_i}` with pairwise coprime,
    /// squarefree, monic, nonconstant `f_i`. Works in any characteristic.
    pub fn squarefree_decomposition(&self, field: &Field) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic(field);
        yun(field, &f, 1, &mut out);
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
        out
    }
}

fn yun(field: &Field, f: &Poly, scale: usize, out: &mut Vec<(Poly, usize)>) {
    let p = field.characteristic() as usize;
    let mut c = f.gcd(field, &f.derivative(field));
    let mut w = f.div_exact(field, &c).expect("gcd divides");
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(field, &c);
        let fac = w.div_exact(field, &y).expect("gcd divides");
        if !fac.is_constant() {
            out.push((fac, i * scale));
        }
        w = y;
        c = c.div_exact(field, &w).expect("gcd divides");
        i += 1;
    }
    if !c.is_constant() {
        // c is a p-th power: take the p-th root coefficientwise.
        let q = field.order();
        let root_exp = q / field.characteristic();
        let coeffs: Vec<Elem> = c
            .coeffs
            .iter()
            .step_by(p)
            .map(|&a| field.pow_u(a, root_exp))
            .collect();
        yun(field, &Poly::new(coeffs), scale * p, out);
    }
}
