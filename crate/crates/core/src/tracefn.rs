//! Trace functions `F_q -> F_l`: Kummer, hyper-Kloosterman and the hyperelliptic
//! family, tabulated over the whole domain, with complex twins.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cyclo::{gauss_sqrt, unit, AdditiveCharacter, MultiplicativeCharacter, ResidueContext};
use crate::error::{invalid, precondition, Error, Result};
use crate::ff::{Elem, Field};
use crate::model::{GroupKind, GroupSpec};
use crate::poly::Poly;

/// Default cap on `n * q^2` for the convolution path.
pub const KLOOSTERMAN_BUDGET: u128 = 1 << 33;
/// Default cap on `(q - 1)^n` for the direct Kloosterman sum.
pub const DIRECT_BUDGET: u128 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Kummer,
    Kloosterman,
    Hyperelliptic,
    Custom,
}

/// `f = f1 / f2` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
    zero_orders: Vec<(Poly, usize)>,
    pole_orders: Vec<(Poly, usize)>,
}

impl RationalFunction {
    pub fn new(field: &Field, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Err(invalid("rational function is identically zero"));
        }
        let g = num.gcd(field, &den);
        let mut num = num.div_exact(field, &g)?;
        let mut den = den.div_exact(field, &g)?;
        let lead = den.lead();
        if lead != Elem::ONE {
            let inv = field.inv(lead)?;
            num = num.scale(field, inv);
            den = den.scale(field, inv);
        }
        let zero_orders = num.squarefree_decomposition(field);
        let pole_orders = den.squarefree_decomposition(field);
        Ok(RationalFunction { num, den, zero_orders, pole_orders })
    }

    pub fn polynomial(field: &Field, f: Poly) -> Result<Self> {
        Self::new(field, f, Poly::constant(Elem::ONE))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// `max(deg f1, deg f2)`.
    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Squarefree factors of the numerator with their multiplicities.
    pub fn zero_orders(&self) -> &[(Poly, usize)] {
        &self.zero_orders
    }

    pub fn pole_orders(&self) -> &[(Poly, usize)] {
        &self.pole_orders
    }

    /// `deg f2 - deg f1`, the order of vanishing at infinity.
    pub fn order_at_infinity(&self) -> i64 {
        self.den.deg() as i64 - self.num.deg() as i64
    }

    /// Rational zeros and poles, sorted.
    pub fn rational_singularities(&self, field: &Field) -> Vec<Elem> {
        let mut pts: Vec<Elem> = field
            .elements()
            .filter(|&x| self.num.eval(field, x).is_zero() || self.den.eval(field, x).is_zero())
            .collect();
        pts.sort();
        pts
    }
}

/// Kind-specific parameters kept alongside the table.
#[derive(Clone, Debug)]
pub enum TraceParams {
    Kummer {
        order: u64,
        f: RationalFunction,
        /// `k mod d` with `f(x) = g^k`, or `None` at zeros and poles.
        exponents: Vec<Option<u64>>,
    },
    Kloosterman {
        n: u32,
    },
    Hyperelliptic {
        f: Poly,
        genus: u32,
        /// `a(z) = sum_x chi_2(f(x)(x - z))`.
        char_sums: Vec<i64>,
    },
    Custom,
}

/// A fully tabulated trace function.
#[derive(Clone, Debug)]
pub struct TraceFunction {
    kind: TraceKind,
    domain: Field,
    ctx: ResidueContext,
    values: Vec<Elem>,
    singular: Vec<Elem>,
    singular_infinity: bool,
    conductor_bound: u64,
    group: GroupSpec,
    params: TraceParams,
    normalized: bool,
    sqrt_q: Option<Elem>,
}

impl TraceFunction {
    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn domain(&self) -> &Field {
        &self.domain
    }

    pub fn context(&self) -> &ResidueContext {
        &self.ctx
    }

    /// Values indexed by element index of the domain.
    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    #[inline]
    pub fn value(&self, x: Elem) -> Elem {
        self.values[x.index()]
    }

    /// Finite singular points, sorted.
    pub fn singular_set(&self) -> &[Elem] {
        &self.singular
    }

    pub fn singular_at_infinity(&self) -> bool {
        self.singular_infinity
    }

    pub fn is_singular(&self, x: Elem) -> bool {
        self.singular.binary_search(&x).is_ok()
    }

    pub fn conductor_bound(&self) -> u64 {
        self.conductor_bound
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn params(&self) -> &TraceParams {
        &self.params
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sqrt_q(&self) -> Option<Elem> {
        self.sqrt_q
    }

    /// Builds a trace function from an explicit table.
    pub fn custom(domain: &Field, ctx: &ResidueContext, values: Vec<Elem>, group: GroupSpec) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(invalid(format!("table has {} entries, domain has {}", values.len(), domain.size())));
        }
        let r = ctx.field();
        if values.iter().any(|v| v.index() >= r.size()) {
            return Err(invalid("table entry outside the residue field"));
        }
        if group.field() != r {
            return Err(Error::FieldMismatch(group.label(), format!("F_{}", ctx.order())));
        }
        Ok(TraceFunction {
            kind: TraceKind::Custom,
            domain: domain.clone(),
            ctx: ctx.clone(),
            values,
            singular: Vec::new(),
            singular_infinity: false,
            conductor_bound: 0,
            group,
            params: TraceParams::Custom,
            normalized: false,
            sqrt_q: None,
        })
    }

    /// `S(t, E) = sum_{x in E} t(x)`.
    pub fn partial_sum(&self, set: &[Elem]) -> Elem {
        let r = self.ctx.field();
        set.iter().fold(Elem::ZERO, |acc, &x| r.add(acc, self.value(x)))
    }

    /// Sum over the full domain.
    pub fn total_sum(&self) -> Elem {
        let r = self.ctx.field();
        self.values.iter().fold(Elem::ZERO, |acc, &v| r.add(acc, v))
    }

    /// `|X_z(F_q)| = q + 1 + a(z)` for the hyperelliptic family, `None` elsewhere or on `Z_f`.
    pub fn point_count(&self, z: Elem) -> Option<u64> {
        match &self.params {
            TraceParams::Hyperelliptic { char_sums, .. } if !self.is_singular(z) => {
                Some((self.domain.order() as i64 + 1 + char_sums[z.index()]) as u64)
            }
            _ => None,
        }
    }

    pub fn params_json(&self) -> serde_json::Value {
        let d = &self.domain;
        match &self.params {
            TraceParams::Kummer { order, f, .. } => json!({
                "order": order,
                "numerator": f.numerator().format(d),
                "denominator": f.denominator().format(d),
            }),
            TraceParams::Kloosterman { n } => json!({ "n": n }),
            TraceParams::Hyperelliptic { f, genus, .. } => json!({ "f": f.format(d), "genus": genus }),
            TraceParams::Custom => json!({}),
        }
    }

    /// JSON descriptor of everything except the table.
    pub fn descriptor(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "domain": self.domain.spec().canonical_string(),
            "params": self.params_json(),
            "normalized": self.normalized,
            "conductor_bound": self.conductor_bound,
            "group": self.group.descriptor(),
            "ctx": self.ctx.descriptor(),
        })
    }

    /// Writes `index,x,value` rows after a `#` line holding the descriptor.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", self.descriptor())?;
        writeln!(w, "index,x,value")?;
        let r = self.ctx.field();
        for (i, &v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{},{}", self.domain.format(Elem(i as u32)), r.format(v))?;
        }
        Ok(())
    }
}

/// `t(x) = chi(f(x))`, zero at the zeros and poles of `f`.
pub fn kummer(chi: &MultiplicativeCharacter, f: &RationalFunction) -> Result<TraceFunction> {
    let domain = chi.domain().clone();
    let ctx = chi.context().clone();
    let d = chi.order();
    if f.is_constant() {
        return Err(invalid("Kummer trace function needs a nonconstant f"));
    }
    for (fac, k) in f.zero_orders().iter().chain(f.pole_orders()) {
        if (*k as u64).is_multiple_of(d) {
            return Err(precondition(format!(
                "factor {} of f has order {k}, divisible by d = {d}",
                fac.format(&domain)
            )));
        }
    }
    let r = ctx.field();
    let exponents: Vec<Option<u64>> = domain
        .elements()
        .map(|x| {
            let a = f.numerator().eval(&domain, x);
            let b = f.denominator().eval(&domain, x);
            let (Some(ka), Some(kb)) = (chi.exponent(a), chi.exponent(b)) else {
                return None;
            };
            Some((ka + d - kb) % d)
        })
        .collect();
    let step = ctx.d() / d;
    let values = exponents
        .iter()
        .map(|e| e.map_or(Elem::ZERO, |k| ctx.zeta_pow((k * step) as i64)))
        .collect();
    let singular = f.rational_singularities(&domain);
    let group = GroupSpec::new(GroupKind::Mu, d as u32, r)?;
    Ok(TraceFunction {
        kind: TraceKind::Kummer,
        domain,
        ctx,
        values,
        singular,
        singular_infinity: f.order_at_infinity() % d as i64 != 0,
        conductor_bound: 1 + f.numerator().deg() as u64 + f.denominator().deg() as u64,
        group,
        params: TraceParams::Kummer { order: d, f: f.clone(), exponents },
        normalized: false,
        sqrt_q: None,
    })
}

/// `tr(g^t)` for `t` in `0..q-1`.
fn trace_by_log(domain: &Field) -> Vec<u32> {
    (0..domain.order() - 1).map(|t| domain.trace(domain.exp(t)) as u32).collect()
}

/// Unsigned, unnormalized sums `U_n(g^s) = sum_{x_1...x_n = g^s} psi(x_1 + ... + x_n)`,
/// indexed by discrete log, via iterated multiplicative convolution in `F_l`.
pub fn kloosterman_by_log(n: u32, domain: &Field, ctx: &ResidueContext, budget: u128) -> Result<Vec<Elem>> {
    if n < 1 {
        return Err(invalid("Kloosterman sums need n >= 1"));
    }
    let psi = AdditiveCharacter::new(domain, ctx)?;
    if !domain.is_tabulated() {
        return Err(Error::Unsupported("Kloosterman sums over untabulated fields".into()));
    }
    let q = domain.order() as u128;
    let needed = n as u128 * q * q;
    if needed > budget {
        return Err(Error::BudgetExceeded { what: "Kloosterman convolution", needed, budget });
    }
    let r = ctx.field();
    let p = domain.characteristic() as usize;
    let big_n = (domain.order() - 1) as usize;
    let trexp = trace_by_log(domain);
    let zp: Vec<Elem> = (0..p as u64).map(|j| psi.zeta_p_pow(j)).collect();
    let combine = |counts: &[u64]| -> Elem {
        counts
            .iter()
            .zip(&zp)
            .fold(Elem::ZERO, |acc, (&c, &z)| r.add(acc, r.mul(ctx.image_int(c as i128), z)))
    };
    let mut cur: Vec<Elem> = trexp.iter().map(|&t| zp[t as usize]).collect();
    if n == 1 {
        return Ok(cur);
    }
    // Second step from exponent counts alone.
    cur = (0..big_n)
        .into_par_iter()
        .map(|s| {
            let mut counts = vec![0u64; p];
            for i in 0..=s {
                counts[(trexp[i] + trexp[s - i]) as usize % p] += 1;
            }
            for i in s + 1..big_n {
                counts[(trexp[i] + trexp[s + big_n - i]) as usize % p] += 1;
            }
            combine(&counts)
        })
        .collect();
    let m = r.degree() as usize;
    let ell = r.characteristic();
    for _ in 3..=n {
        let digits: Vec<u64> = cur.iter().flat_map(|&v| r.coeffs(v)).collect();
        cur = (0..big_n)
            .into_par_iter()
            .map(|s| {
                let mut acc = vec![0u64; p * m];
                let mut add = |i: usize, t: usize| {
                    let base = trexp[t] as usize * m;
                    for c in 0..m {
                        acc[base + c] += digits[i * m + c];
                    }
                };
                for i in 0..=s {
                    add(i, s - i);
                }
                for i in s + 1..big_n {
                    add(i, s + big_n - i);
                }
                (0..p).fold(Elem::ZERO, |sum, j| {
                    let coeffs: Vec<u64> = acc[j * m..(j + 1) * m].iter().map(|&a| a % ell).collect();
                    let v = r.from_coeffs(&coeffs).expect("reduced digits");
                    r.add(sum, r.mul(v, zp[j]))
                })
            })
            .collect();
    }
    Ok(cur)
}

/// Unsigned, unnormalized Kloosterman sums indexed by element, by direct
/// enumeration of `(x_1, ..., x_{n-1})`; entry 0 is the empty sum.
pub fn kloosterman_direct(n: u32, domain: &Field, ctx: &ResidueContext, budget: u128) -> Result<Vec<Elem>> {
    if n < 2 {
        return Err(invalid("direct Kloosterman sums need n >= 2"));
    }
    let psi = AdditiveCharacter::new(domain, ctx)?;
    let q = domain.order();
    let needed = (q as u128 - 1).checked_pow(n).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { what: "direct Kloosterman sum", needed, budget });
    }
    let p = domain.characteristic();
    let r = ctx.field();
    let mut counts = vec![0u64; domain.size() * p as usize];
    let nonzero: Vec<Elem> = domain.nonzero().collect();
    let mut idx = vec![0usize; n as usize - 1];
    loop {
        let (sum, prod) = idx.iter().fold((Elem::ZERO, Elem::ONE), |(s, pr), &k| {
            (domain.add(s, nonzero[k]), domain.mul(pr, nonzero[k]))
        });
        let pinv = domain.inv(prod)?;
        let ts = domain.trace(sum);
        for &x in &nonzero {
            let e = (ts + domain.trace(domain.mul(x, pinv))) % p;
            counts[x.index() * p as usize + e as usize] += 1;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok((0..domain.size())
                    .map(|xi| {
                        (0..p).fold(Elem::ZERO, |acc, j| {
                            let c = counts[xi * p as usize + j as usize];
                            r.add(acc, r.mul(ctx.image_int(c as i128), psi.zeta_p_pow(j)))
                        })
                    })
                    .collect());
            }
            idx[k] += 1;
            if idx[k] < nonzero.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Complex unsigned, unnormalized sums indexed by element; entry 0 is the empty sum.
pub fn kloosterman_complex_unsigned(n: u32, domain: &Field) -> Result<Vec<Complex64>> {
    if n < 1 {
        return Err(invalid("Kloosterman sums need n >= 1"));
    }
    if !domain.is_tabulated() {
        return Err(Error::Unsupported("Kloosterman sums over untabulated fields".into()));
    }
    let q = domain.order() as u128;
    let needed = n as u128 * q * q;
    if needed > KLOOSTERMAN_BUDGET {
        return Err(Error::BudgetExceeded { what: "complex Kloosterman convolution", needed, budget: KLOOSTERMAN_BUDGET });
    }
    let p = domain.characteristic();
    let big_n = (domain.order() - 1) as usize;
    let base: Vec<Complex64> = trace_by_log(domain).iter().map(|&t| unit(t as u64, p)).collect();
    let mut cur = base.clone();
    for _ in 2..=n {
        cur = (0..big_n)
            .into_par_iter()
            .map(|s| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..=s {
                    acc += cur[i] * base[s - i];
                }
                for i in s + 1..big_n {
                    acc += cur[i] * base[s + big_n - i];
                }
                acc
            })
            .collect();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); domain.size()];
    for (s, v) in cur.into_iter().enumerate() {
        out[domain.exp(s as u64).index()] = v;
    }
    Ok(out)
}

/// `Kl_n` on `F_q`, signed by `(-1)^{n-1}`, optionally normalized by `q^{-(n-1)/2}`.
pub fn kloosterman(n: u32, domain: &Field, ctx: &ResidueContext, normalized: bool) -> Result<TraceFunction> {
    kloosterman_with_budget(n, domain, ctx, normalized, KLOOSTERMAN_BUDGET)
}

pub fn kloosterman_with_budget(
    n: u32,
    domain: &Field,
    ctx: &ResidueContext,
    normalized: bool,
    budget: u128,
) -> Result<TraceFunction> {
    if n < 2 {
        return Err(invalid("Kloosterman trace functions need n >= 2"));
    }
    let sqrt_q = if normalized { Some(gauss_sqrt(domain, ctx)?.sqrt_q) } else { None };
    let r = ctx.field();
    let by_log = kloosterman_by_log(n, domain, ctx, budget)?;
    let odd = n % 2 == 1;
    let minus_one = r.neg(Elem::ONE);
    let sign = if odd { Elem::ONE } else { minus_one };
    let scale = match sqrt_q {
        Some(s) => r.mul(sign, r.pow_u(r.inv(s)?, (n - 1) as u64)),
        None => sign,
    };
    let mut values = vec![Elem::ZERO; domain.size()];
    for (s, &v) in by_log.iter().enumerate() {
        values[domain.exp(s as u64).index()] = r.mul(scale, v);
    }
    values[0] = match sqrt_q {
        Some(s) => r.pow_u(r.neg(s), (n - 1) as u64),
        None => {
            let qn = ctx.image_int(domain.order() as i128);
            r.mul(sign, r.pow_u(qn, (n - 1) as u64))
        }
    };
    let kind = if odd { GroupKind::SL } else { GroupKind::Sp };
    Ok(TraceFunction {
        kind: TraceKind::Kloosterman,
        domain: domain.clone(),
        ctx: ctx.clone(),
        values,
        singular: vec![Elem::ZERO],
        singular_infinity: true,
        conductor_bound: n as u64 + 3,
        group: GroupSpec::new(kind, n, r)?,
        params: TraceParams::Kloosterman { n },
        normalized,
        sqrt_q,
    })
}

/// `chi_2` on the whole domain, indexed by element.
fn quadratic_character_table(domain: &Field) -> Result<Vec<i8>> {
    if domain.characteristic() == 2 {
        return Err(Error::Unsupported("quadratic character in characteristic 2".into()));
    }
    domain
        .elements()
        .map(|x| {
            if x.is_zero() {
                Ok(0)
            } else {
                Ok(if domain.dlog(x)? % 2 == 0 { 1 } else { -1 })
            }
        })
        .collect()
}

/// Family of curves `y^2 = f(x)(x - z)` over `z`, with `t(z) = (q + 1 - |X_z|) / sqrt(q)`.
pub fn hyperelliptic_family(f: &Poly, domain: &Field, ctx: &ResidueContext, normalized: bool) -> Result<TraceFunction> {
    let deg = f.degree().ok_or_else(|| invalid("f is zero"))?;
    if deg < 2 || deg % 2 == 1 {
        return Err(invalid(format!("f must have even degree >= 2, got {deg}")));
    }
    if !f.is_squarefree(domain) {
        return Err(precondition("f is not squarefree"));
    }
    let roots = f.roots(domain);
    if roots.len() != deg {
        return Err(precondition(format!("f has {} rational roots out of {deg}", roots.len())));
    }
    let sqrt_q = if normalized { Some(gauss_sqrt(domain, ctx)?.sqrt_q) } else { None };
    let chi2 = quadratic_character_table(domain)?;
    let fx: Vec<Elem> = domain.elements().map(|x| f.eval(domain, x)).collect();
    let char_sums: Vec<i64> = domain
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&z| {
            domain
                .elements()
                .map(|x| chi2[domain.mul(fx[x.index()], domain.sub(x, z)).index()] as i64)
                .sum()
        })
        .collect();
    let r = ctx.field();
    let scale = match sqrt_q {
        Some(s) => r.inv(s)?,
        None => Elem::ONE,
    };
    let mut singular = roots.clone();
    singular.sort();
    let values = domain
        .elements()
        .map(|z| {
            if singular.binary_search(&z).is_ok() {
                Elem::ZERO
            } else {
                r.mul(ctx.image_int(-(char_sums[z.index()] as i128)), scale)
            }
        })
        .collect();
    let genus = (deg / 2) as u32;
    Ok(TraceFunction {
        kind: TraceKind::Hyperelliptic,
        domain: domain.clone(),
        ctx: ctx.clone(),
        values,
        conductor_bound: 2 * genus as u64 + singular.len() as u64,
        singular,
        singular_infinity: true,
        group: GroupSpec::new(GroupKind::Sp, 2 * genus, r)?,
        params: TraceParams::Hyperelliptic { f: f.clone(), genus, char_sums },
        normalized,
        sqrt_q,
    })
}

/// The same formulas evaluated in complex double precision, with `sqrt(q) > 0`.
pub fn complex_embedding(t: &TraceFunction) -> Result<Vec<Complex64>> {
    let domain = t.domain();
    let q = domain.order() as f64;
    let zero = Complex64::new(0.0, 0.0);
    match t.params() {
        TraceParams::Kummer { order, exponents, .. } => {
            Ok(exponents.iter().map(|e| e.map_or(zero, |k| unit(k, *order))).collect())
        }
        TraceParams::Kloosterman { n } => {
            let n = *n;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let scale = if t.is_normalized() { sign / q.powf((n - 1) as f64 / 2.0) } else { sign };
            let mut out: Vec<Complex64> =
                kloosterman_complex_unsigned(n, domain)?.into_iter().map(|v| v * scale).collect();
            out[0] = if t.is_normalized() {
                Complex64::new((-q.sqrt()).powi(n as i32 - 1), 0.0)
            } else {
                Complex64::new(sign * q.powi(n as i32 - 1), 0.0)
            };
            Ok(out)
        }
        TraceParams::Hyperelliptic { char_sums, .. } => {
            let scale = if t.is_normalized() { 1.0 / q.sqrt() } else { 1.0 };
            Ok(domain
                .elements()
                .map(|z| {
                    if t.is_singular(z) {
                        zero
                    } else {
                        Complex64::new(-(char_sums[z.index()] as f64) * scale, 0.0)
                    }
                })
                .collect())
        }
        TraceParams::Custom => Err(Error::Unsupported("custom trace functions have no complex twin".into())),
    }
}
