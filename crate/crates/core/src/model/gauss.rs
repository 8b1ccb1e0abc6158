//! Gaussian sums `sum_{v in G} psi_a(tr v)` by enumeration and by closed formulas.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclo::unit;
use crate::error::{Error, Result};
use crate::ff::{Elem, Field};
use crate::model::groups::{trace_histogram, GroupKind, GroupSpec};
use crate::tracefn::kloosterman_complex_unsigned;

/// Whether the printed Sp_{2m} expansion reproduced enumeration at Sp_4(F_3).
/// When false the closed form is used only for m = 1.
pub const SP_EXPANSION_VERIFIED: bool = true;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussSource {
    Closed,
    Brute,
}

/// `psi_a(x) = exp(2 pi i tr(a x) / l)`.
#[inline]
pub fn psi(field: &Field, a: Elem, x: Elem) -> Complex64 {
    unit(field.trace(field.mul(a, x)), field.characteristic())
}

/// Sum over the group of `psi_a(tr v)` for every `a`, indexed by element, from the trace histogram.
pub fn gaussian_sums_bruteforce(spec: &GroupSpec) -> Result<Vec<Complex64>> {
    let hist = trace_histogram(spec)?;
    Ok(sums_from_histogram(spec.field(), &hist))
}

fn sums_from_histogram(f: &Field, hist: &[u64]) -> Vec<Complex64> {
    let support: Vec<(Elem, f64)> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| (Elem(t as u32), c as f64))
        .collect();
    (0..f.size())
        .into_par_iter()
        .map(|a| support.iter().map(|&(t, c)| psi(f, Elem(a as u32), t) * c).sum())
        .collect()
}

pub fn gaussian_sum_bruteforce(spec: &GroupSpec, a: Elem) -> Result<Complex64> {
    let hist = trace_histogram(spec)?;
    let f = spec.field();
    Ok(hist
        .iter()
        .enumerate()
        .map(|(t, &c)| psi(f, a, Elem(t as u32)) * c as f64)
        .sum())
}

/// Gaussian binomial `binom(m, r)_L`.
pub fn gaussian_binomial(m: u32, r: u32, l: f64) -> f64 {
    (0..r).map(|j| (l.powi((m - j) as i32) - 1.0) / (l.powi((r - j) as i32) - 1.0)).product()
}

/// `sum (L^{j_1} - 1) ... (L^{j_{l-1}} - 1)` over `2l-3 <= j_1 <= top`,
/// `2l-1-2i <= j_i <= j_{i-1} - 2`; the empty product is 1.
fn chain_sum(l: u32, top: i64, lf: f64) -> f64 {
    fn rec(i: u32, l: u32, upper: i64, lf: f64) -> f64 {
        if i == l {
            return 1.0;
        }
        let lower = 2 * l as i64 - 1 - 2 * i as i64;
        (lower..=upper).map(|j| (lf.powi(j as i32) - 1.0) * rec(i + 1, l, j - 2, lf)).sum()
    }
    rec(1, l, top, lf)
}

/// Kim's expansion of `sum_{v in Sp_{2m}} psi(tr v)` as printed, with `kl = Kl_2(a^2)`.
pub fn kim_sp_expansion(m: u32, big_l: f64, kl: Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for r in 0..=m / 2 {
        let prefix = big_l.powi((r * (r + 1)) as i32)
            * gaussian_binomial(m, 2 * r, big_l)
            * (1..=r).map(|i| big_l.powi(2 * i as i32 - 1) - 1.0).product::<f64>();
        let mut inner = Complex64::new(0.0, 0.0);
        for l in 1..=(m / 2 - r + 1) {
            let power = m as i32 - 2 * r as i32 + 2 - 2 * l as i32;
            inner += kl.powi(power) * big_l.powi(l as i32) * chain_sum(l, m as i64 - 2 * r as i64 - 1, big_l);
        }
        total += inner * prefix;
    }
    total * big_l.powi((m * m) as i32 - 1)
}

/// Whether a closed form is used for this group.
pub fn closed_form_available(spec: &GroupSpec) -> bool {
    match spec.kind() {
        GroupKind::Sp => spec.n() == 2 || SP_EXPANSION_VERIFIED,
        GroupKind::SOOdd => spec.n() == 3 || SP_EXPANSION_VERIFIED,
        GroupKind::SOPlus => spec.n() == 2 || SP_EXPANSION_VERIFIED,
        _ => true,
    }
}

/// Closed-form Gaussian sums for every `a`, indexed by element (entry 0 is `|G|`).
pub fn gaussian_sums_closed(spec: &GroupSpec) -> Result<Vec<Complex64>> {
    gaussian_sums_closed_ungated(spec, !closed_form_available(spec))
}

/// Closed forms, optionally refusing the Sp expansion for `m >= 2`.
pub fn gaussian_sums_closed_ungated(spec: &GroupSpec, refuse_sp: bool) -> Result<Vec<Complex64>> {
    let f = spec.field();
    let q = f.order() as f64;
    let n = spec.n();
    let order = spec.order()? as f64;
    let mut out = vec![Complex64::new(order, 0.0); f.size()];
    let sp_sums = |m: u32| -> Result<Vec<Complex64>> {
        if m >= 2 && refuse_sp {
            return Err(Error::Unsupported(format!(
                "closed form for Sp_{} is gated off; use enumeration",
                2 * m
            )));
        }
        let kl = kloosterman_complex_unsigned(2, f)?;
        Ok(f.elements()
            .map(|a| kim_sp_expansion(m, q, kl[f.mul(a, a).index()]))
            .collect())
    };
    match spec.kind() {
        GroupKind::GL => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let v = Complex64::new(sign * q.powi((n * (n - 1) / 2) as i32), 0.0);
            out[1..].fill(v);
        }
        GroupKind::SL => {
            let kl = kloosterman_complex_unsigned(n, f)?;
            let scale = q.powi((n * (n - 1) / 2) as i32);
            for a in f.nonzero() {
                out[a.index()] = kl[f.pow_u(a, n as u64).index()] * scale;
            }
        }
        GroupKind::Sp => {
            let s = sp_sums(n / 2)?;
            out[1..].copy_from_slice(&s[1..]);
        }
        GroupKind::SOOdd => {
            let s = sp_sums((n - 1) / 2)?;
            for a in f.nonzero() {
                out[a.index()] = psi(f, a, Elem::ONE) * s[a.index()];
            }
        }
        GroupKind::SOPlus => {
            let s = sp_sums(n / 2)?;
            let scale = q.powi(-((n / 2) as i32));
            for a in f.nonzero() {
                out[a.index()] = s[a.index()] * scale;
            }
        }
        GroupKind::Mu => {
            let step = (f.order() - 1) / n as u64;
            let roots: Vec<Elem> = (0..n as u64).map(|i| f.exp(i * step)).collect();
            for a in f.nonzero() {
                out[a.index()] = roots.iter().map(|&z| psi(f, a, z)).sum();
            }
        }
    }
    Ok(out)
}

pub fn gaussian_sum_closed(spec: &GroupSpec, a: Elem) -> Result<Complex64> {
    Ok(gaussian_sums_closed(spec)?[a.index()])
}

/// Closed form when available, enumeration otherwise.
pub fn gaussian_sums(spec: &GroupSpec) -> Result<(Vec<Complex64>, GaussSource)> {
    if closed_form_available(spec) {
        if let Ok(v) = gaussian_sums_closed(spec) {
            return Ok((v, GaussSource::Closed));
        }
    }
    Ok((gaussian_sums_bruteforce(spec)?, GaussSource::Brute))
}

/// `mu_b = (1/|G|) sum_{v in G} psi_b(tr v)` for every `b` (so `mu_0 = 1`).
pub fn character_means(spec: &GroupSpec) -> Result<(Vec<Complex64>, GaussSource)> {
    let (sums, src) = gaussian_sums(spec)?;
    let order = spec.order()? as f64;
    Ok((sums.into_iter().map(|s| s / order).collect(), src))
}

/// One row of a closed-vs-brute comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussRow {
    pub a: String,
    pub closed: Option<(f64, f64)>,
    pub brute: Option<(f64, f64)>,
    /// `|closed - brute| / max(1, |brute|)`.
    pub rel_diff: Option<f64>,
}

/// Both paths for every `a != 0`; a path that is unavailable is left empty.
pub fn compare_gaussian_sums(spec: &GroupSpec, ungated: bool) -> Result<Vec<GaussRow>> {
    let f = spec.field();
    let closed = gaussian_sums_closed_ungated(spec, !ungated && !closed_form_available(spec)).ok();
    let brute = gaussian_sums_bruteforce(spec).ok();
    if closed.is_none() && brute.is_none() {
        return Err(Error::Unsupported(format!("no Gaussian-sum path for {}", spec.label())));
    }
    Ok(f.nonzero()
        .map(|a| {
            let c = closed.as_ref().map(|v| v[a.index()]);
            let b = brute.as_ref().map(|v| v[a.index()]);
            let rel_diff = match (c, b) {
                (Some(c), Some(b)) => Some((c - b).norm() / b.norm().max(1.0)),
                _ => None,
            };
            GaussRow { a: f.format(a), closed: c.map(|z| (z.re, z.im)), brute: b.map(|z| (z.re, z.im)), rel_diff }
        })
        .collect())
}

/// CSV `group,Q,a,real,imag,source`, one row per path.
pub fn write_gauss_csv<W: Write>(spec: &GroupSpec, rows: &[GaussRow], mut w: W) -> Result<()> {
    writeln!(w, "group,Q,a,real,imag,source")?;
    let label = spec.label();
    let q = spec.q();
    for row in rows {
        if let Some((re, im)) = row.closed {
            writeln!(w, "{label},{q},{},{re},{im},closed", row.a)?;
        }
        if let Some((re, im)) = row.brute {
            writeln!(w, "{label},{q},{},{re},{im},brute", row.a)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GroupKind, n: u32, p: u64, e: u32) -> GroupSpec {
        GroupSpec::new(kind, n, &Field::canonical(p, e).unwrap()).unwrap()
    }

    #[test]
    fn known_small_values() {
        let gl = spec(GroupKind::GL, 2, 3, 1);
        for a in gl.field().nonzero() {
            assert!((gaussian_sum_bruteforce(&gl, a).unwrap() - Complex64::new(3.0, 0.0)).norm() < 1e-9);
        }
        let gl3 = spec(GroupKind::GL, 3, 5, 1);
        assert_eq!(gaussian_sum_closed(&gl3, Elem(2)).unwrap(), Complex64::new(-125.0, 0.0));
        let sl = spec(GroupKind::SL, 2, 2, 1);
        assert!((gaussian_sum_bruteforce(&sl, Elem::ONE).unwrap().re - 2.0).abs() < 1e-12);
        assert!((gaussian_sum_closed(&sl, Elem::ONE).unwrap().re - 2.0).abs() < 1e-12);
        let mu = spec(GroupKind::Mu, 2, 5, 1);
        let g = gaussian_sum_bruteforce(&mu, Elem::ONE).unwrap();
        assert!((g.re - 0.618034).abs() < 1e-6 && g.im.abs() < 1e-12);
    }

    #[test]
    fn sp2_collapses_to_sl2() {
        for (p, e) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let sp = gaussian_sums_closed(&spec(GroupKind::Sp, 2, p, e)).unwrap();
            let sl = gaussian_sums_bruteforce(&spec(GroupKind::SL, 2, p, e)).unwrap();
            for (x, y) in sp.iter().zip(&sl) {
                assert!((x - y).norm() <= 1e-6 * y.norm().max(1.0), "Q={}: {x} vs {y}", p.pow(e));
            }
        }
    }

    #[test]
    fn gaussian_binomial_small() {
        assert_eq!(gaussian_binomial(2, 1, 3.0), 4.0);
        assert_eq!(gaussian_binomial(4, 2, 2.0), 35.0);
        assert_eq!(gaussian_binomial(3, 0, 5.0), 1.0);
    }
}
