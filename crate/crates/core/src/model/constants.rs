//! Group constants `alpha`, `beta_pm`, the error scale `E(G, L)` and the
//! explicit error terms of the equidistribution statements, without implied constants.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{invalid, Error, Result};
use crate::model::gauss::gaussian_sums_closed;
use crate::model::groups::{GroupKind, GroupSpec};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConstants {
    pub alpha: Rational,
    pub beta_plus: Rational,
    pub beta_minus: Rational,
    pub dim: i64,
    pub rank: i64,
}

/// Exact constants of a classical group.
pub fn constants(spec: &GroupSpec) -> Result<GroupConstants> {
    let n = spec.n() as i64;
    let r = |a: i64, b: i64| Rational::new(a, b);
    let (alpha, dim, rank) = match spec.kind() {
        GroupKind::GL => (r(n * (n - 1), 2), n * n, n),
        GroupKind::SL => (r(n * n - 1, 2), n * n - 1, n - 1),
        GroupKind::Sp => (r(n * (n + 2), 8), n * (n + 1) / 2, n / 2),
        GroupKind::SOOdd => (r(n * n - 1, 8), n * (n - 1) / 2, (n - 1) / 2),
        GroupKind::SOPlus => (r(n * (n - 2), 8), n * (n - 1) / 2, n / 2),
        GroupKind::Mu => {
            return Err(Error::Unsupported("alpha(mu_d) is empirical; use mu_alpha_empirical".into()))
        }
    };
    Ok(GroupConstants {
        alpha,
        beta_plus: r(dim + rank, 2),
        beta_minus: r(dim - rank, 2),
        dim,
        rank,
    })
}

pub fn to_f64(x: Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `E(G, L, F_l)`: `Q^{L beta_+ + 2 beta_-}`, `d^L` for prime `d`, `d^{L+1}` otherwise.
pub fn error_scale(spec: &GroupSpec, steps: u32) -> Result<f64> {
    let q = spec.q() as f64;
    match spec.kind() {
        GroupKind::Mu => {
            let d = spec.n() as f64;
            Ok(if is_prime(spec.n() as u64) { d.powi(steps as i32) } else { d.powi(steps as i32 + 1) })
        }
        _ => {
            let c = constants(spec)?;
            let exponent = c.beta_plus * Rational::from_integer(steps as i64) + c.beta_minus * 2;
            Ok(q.powf(to_f64(exponent)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuAlpha {
    pub alpha: f64,
    /// Index of a maximizing `b`.
    pub argmax: u32,
    /// `max_{b != 0} |sum_{v in mu_d} psi_b(v)|`.
    pub max_abs_sum: f64,
}

/// `alpha_emp = -log(max_{b != 0} |(1/d) sum_{v in mu_d} psi_b(v)|) / log Q`.
pub fn mu_alpha_empirical(spec: &GroupSpec) -> Result<MuAlpha> {
    if spec.kind() != GroupKind::Mu {
        return Err(invalid("mu_alpha_empirical needs a mu_d group"));
    }
    let sums = gaussian_sums_closed(spec)?;
    let (argmax, max_abs_sum) = sums
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, z)| (i as u32, z.norm()))
        .fold((1u32, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    let d = spec.n() as f64;
    let alpha = -(max_abs_sum / d).ln() / (spec.q() as f64).ln();
    Ok(MuAlpha { alpha, argmax, max_abs_sum })
}

/// Admissible `alpha(delta)` for `mu_d` when `d >= Q^delta`: `delta - 1/2` for
/// `delta > 1/2`, and the explicit table over a prime field; the largest applicable value.
pub fn explicit_alpha(delta: f64, prime_field: bool) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut offer = |v: f64| best = Some(best.map_or(v, |b: f64| b.max(v)));
    if delta > 0.5 && delta < 1.0 {
        offer(delta - 0.5);
    }
    if prime_field {
        if delta > 1.0 / 3.0 && delta <= 0.5 {
            offer((3.0 * delta - 1.0) / 8.0);
        } else if delta > 0.5 && delta <= 2.0 / 3.0 {
            offer((5.0 * delta - 2.0) / 8.0);
        } else if delta > 2.0 / 3.0 && delta <= 1.0 {
            offer(delta - 2.0 / 3.0);
        }
    }
    best
}

/// The two error summands of the shift equidistribution statement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoTerms {
    pub model: f64,
    pub sheaf: f64,
}

impl TwoTerms {
    pub fn sum(&self) -> f64 {
        self.model + self.sheaf
    }
}

/// Classical: `Q^{-L alpha} + L Q^{L beta_+ + 2 beta_- - 1} / q^{1/2}`.
pub fn equidist_bound_classical(spec: &GroupSpec, steps: u32, q: f64) -> Result<TwoTerms> {
    let c = constants(spec)?;
    let big_q = spec.q() as f64;
    let l = steps as f64;
    let e = to_f64(c.beta_plus) * l + 2.0 * to_f64(c.beta_minus) - 1.0;
    Ok(TwoTerms { model: big_q.powf(-l * to_f64(c.alpha)), sheaf: l * big_q.powf(e) / q.sqrt() })
}

/// Cyclic: `Q^{-L alpha} + L d^{L+1} / (q^{1/2} Q^{min(L alpha, 1)})`, with `d^L` for prime `d`.
pub fn equidist_bound_cyclic(spec: &GroupSpec, steps: u32, q: f64, alpha: f64) -> Result<TwoTerms> {
    if spec.kind() != GroupKind::Mu {
        return Err(invalid("cyclic bound needs a mu_d group"));
    }
    let big_q = spec.q() as f64;
    let l = steps as f64;
    Ok(TwoTerms {
        model: big_q.powf(-l * alpha),
        sheaf: l * error_scale(spec, steps)? / (q.sqrt() * big_q.powf((l * alpha).min(1.0))),
    })
}

/// `log Q` for classical groups, `log d` for `mu_d`.
fn group_log(spec: &GroupSpec) -> f64 {
    match spec.kind() {
        GroupKind::Mu => (spec.n() as f64).ln(),
        _ => (spec.q() as f64).ln(),
    }
}

/// `q^{-1/4 + eps/2} + (|E| log Q / log q)^{1/2}` (log d for `mu_d`).
pub fn shift_subset_bound(spec: &GroupSpec, set_size: u64, q: f64, eps: f64) -> [f64; 2] {
    [q.powf(-0.25 + eps / 2.0), (set_size as f64 * group_log(spec) / q.ln()).sqrt()]
}

/// The three summands for partial intervals over `F_p`; the last is 0 when `S(t, F_p) = 0`.
pub fn partial_interval_bound(spec: &GroupSpec, p: f64, eps: f64, full_sum_nonzero: bool) -> [f64; 3] {
    let big_q = spec.q() as f64;
    let lg = group_log(spec);
    [
        p.powf(-0.25 + eps / 2.0),
        (lg / p.ln()).sqrt(),
        if full_sum_nonzero { (big_q * p.ln() / (p * lg)).sqrt() } else { 0.0 },
    ]
}

/// Partial intervals with shifts: same shape as the shifted-subset bound.
pub fn partial_interval_shift_bound(spec: &GroupSpec, set_size: u64, q: f64, eps: f64) -> [f64; 2] {
    shift_subset_bound(spec, set_size, q, eps)
}

/// `(ell / log p)^{1/2}`, the short-sum baseline for the Legendre symbol.
pub fn legendre_baseline(ell: u64, p: u64) -> f64 {
    (ell as f64 / (p as f64).ln()).sqrt()
}

/// Inputs and verdict of the parameter condition for `V(t, I) = o(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `M + 2(log(M/|I|) + log H) / log(|G| |G#|)` with
/// `(1/beta_+) log q / log Q - 2 beta_-/beta_+` (classical) or `log q / log d - 1` (cyclic).
/// `class_count` is `|G#|`; for `mu_d` it defaults to `d`.
pub fn parameter_check(
    spec: &GroupSpec,
    big_m: u64,
    family_size: u64,
    big_h: f64,
    q: f64,
    class_count: Option<u128>,
) -> Result<ParameterCheck> {
    let order = spec.order()? as f64;
    let classes = match (spec.kind(), class_count) {
        (_, Some(c)) => c as f64,
        (GroupKind::Mu, None) => spec.n() as f64,
        _ => return Err(invalid("the number of conjugacy classes is required for classical groups")),
    };
    let lhs = big_m as f64 + 2.0 * ((big_m as f64 / family_size as f64).ln() + big_h.ln()) / (order * classes).ln();
    let rhs = match spec.kind() {
        GroupKind::Mu => q.ln() / (spec.n() as f64).ln() - 1.0,
        _ => {
            let c = constants(spec)?;
            let bp = to_f64(c.beta_plus);
            q.ln() / (bp * (spec.q() as f64).ln()) - 2.0 * to_f64(c.beta_minus) / bp
        }
    };
    Ok(ParameterCheck { lhs, rhs, holds: lhs < rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;

    fn spec(kind: GroupKind, n: u32, p: u64, e: u32) -> GroupSpec {
        GroupSpec::new(kind, n, &Field::canonical(p, e).unwrap()).unwrap()
    }

    #[test]
    fn table_values() {
        assert_eq!(constants(&spec(GroupKind::SL, 3, 3, 1)).unwrap().alpha, Rational::from_integer(4));
        assert_eq!(constants(&spec(GroupKind::Sp, 4, 3, 1)).unwrap().alpha, Rational::from_integer(3));
        let sp2 = constants(&spec(GroupKind::Sp, 2, 3, 1)).unwrap();
        assert_eq!((sp2.beta_plus, sp2.beta_minus), (Rational::from_integer(2), Rational::from_integer(1)));
        let sl = constants(&spec(GroupKind::SL, 4, 3, 1)).unwrap();
        assert_eq!(sl.beta_plus, Rational::new(4 * 4 + 4 - 2, 2));
        assert_eq!(sl.beta_minus, Rational::new(4 * 3, 2));
        assert!(constants(&spec(GroupKind::Mu, 2, 3, 1)).is_err());
    }

    #[test]
    fn error_scales() {
        assert_eq!(error_scale(&spec(GroupKind::Sp, 2, 3, 3), 1).unwrap(), 27f64.powi(4));
        assert_eq!(error_scale(&spec(GroupKind::Mu, 3, 7, 1), 2).unwrap(), 9.0);
        assert_eq!(error_scale(&spec(GroupKind::Mu, 4, 5, 1), 2).unwrap(), 64.0);
    }

    #[test]
    fn mu_alpha() {
        // Full multiplicative group: the sum is -1.
        let full = mu_alpha_empirical(&spec(GroupKind::Mu, 12, 13, 1)).unwrap();
        assert!((full.max_abs_sum - 1.0).abs() < 1e-9);
        assert!((full.alpha - 12f64.ln() / 13f64.ln()).abs() < 1e-9);
        let quad = mu_alpha_empirical(&spec(GroupKind::Mu, 2, 11, 1)).unwrap();
        assert!(quad.max_abs_sum <= 11f64.sqrt());
    }

    #[test]
    fn explicit_alpha_table() {
        assert_eq!(explicit_alpha(0.4, false), None);
        assert!((explicit_alpha(0.4, true).unwrap() - 0.025).abs() < 1e-12);
        assert!((explicit_alpha(0.9, true).unwrap() - 0.4).abs() < 1e-12);
        assert!((explicit_alpha(0.6, true).unwrap() - 0.125).abs() < 1e-12);
    }
}
