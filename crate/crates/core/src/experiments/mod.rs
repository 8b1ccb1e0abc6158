//! Desk-scale experiments: each command builds a trace function and a family
//! of sums from an [`ExperimentConfig`] and returns a self-contained [`Report`].

mod commands;
pub mod config;
pub mod report;

use std::collections::HashSet;

use rayon::prelude::*;
use serde_json::json;

pub use commands::*;
pub use config::{Experiment, ExperimentConfig};
pub use report::{Bound, Report, Summary, Table, Verdict};

use crate::cyclo::{MultiplicativeCharacter, ResidueContext};
use crate::error::{invalid, Error, Result};
use crate::ff::{Elem, Field};
use crate::model::constants::{equidist_bound_classical, equidist_bound_cyclic, mu_alpha_empirical};
use crate::model::{GroupKind, GroupSpec};
use crate::poly::Poly;
use crate::tracefn::{hyperelliptic_family, kloosterman, kummer, RationalFunction, TraceFunction, TraceParams};

/// Runs one experiment, on a dedicated pool when `workers` is set.
pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let go = || match experiment {
        Experiment::EquidistShift => cmd_equidist_shift(cfg),
        Experiment::PartialIntervals => cmd_partial_intervals(cfg),
        Experiment::ShiftSubsets => cmd_shift_subsets(cfg),
        Experiment::PartialIntervalShifts => cmd_partial_interval_shifts(cfg),
        Experiment::Variance => cmd_variance(cfg),
        Experiment::Model => cmd_model(cfg),
        Experiment::GaussSum => cmd_gauss_sum(cfg),
    };
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    }
}

/// Elements separated by `;`, each in coordinate form `c0,c1,...`.
pub fn parse_elems(field: &Field, s: &str) -> Result<Vec<Elem>> {
    let out: Vec<Elem> = s
        .split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| field.parse_elem(x))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Parse(format!("no elements in {s:?}")));
    }
    Ok(out)
}

fn parse_u64s(s: &str, sep: char) -> Result<Vec<u64>> {
    s.split(sep)
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Parse(format!("integer {x:?}"))))
        .collect()
}

/// `a,b;c,d` into `[[a, b], [c, d]]`.
pub fn parse_int_lists(s: &str, outer: char, inner: char) -> Result<Vec<Vec<u64>>> {
    let out: Vec<Vec<u64>> = s.split(outer).map(|part| parse_u64s(part, inner)).collect::<Result<_>>()?;
    if out.is_empty() || out.iter().any(Vec::is_empty) {
        return Err(Error::Parse(format!("empty list in {s:?}")));
    }
    Ok(out)
}

/// `num` or `num/den`, each polynomial written `c0;c1;...`.
pub fn parse_rational(field: &Field, s: &str) -> Result<RationalFunction> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (Poly::parse(field, n)?, Poly::parse(field, d)?),
        None => (Poly::parse(field, s)?, Poly::constant(Elem::ONE)),
    };
    RationalFunction::new(field, num, den)
}

pub fn domain_field(cfg: &ExperimentConfig) -> Result<Field> {
    Field::canonical(cfg.p, cfg.e)
}

/// The trace function named by `cfg.kind` over `F_{p^e}`.
pub fn build_trace(cfg: &ExperimentConfig) -> Result<TraceFunction> {
    let domain = domain_field(cfg)?;
    match cfg.kind.to_ascii_lowercase().as_str() {
        "kummer" => {
            let ctx = ResidueContext::with_conjugate(cfg.d.unwrap_or(cfg.order), cfg.ell, cfg.conjugate)?;
            let chi = MultiplicativeCharacter::new(&domain, cfg.order, &ctx)?;
            let f = parse_rational(&domain, cfg.f.as_deref().unwrap_or("0;1"))?;
            kummer(&chi, &f)
        }
        "kloosterman" => {
            let ctx = ResidueContext::with_conjugate(cfg.d.unwrap_or(cfg.p), cfg.ell, cfg.conjugate)?;
            kloosterman(cfg.n, &domain, &ctx, cfg.normalized)
        }
        "hyperelliptic" => {
            let ctx = ResidueContext::with_conjugate(cfg.d.unwrap_or(cfg.p), cfg.ell, cfg.conjugate)?;
            let f = Poly::parse(&domain, cfg.f.as_deref().unwrap_or("-1;0;1"))?;
            hyperelliptic_family(&f, &domain, &ctx, cfg.normalized)
        }
        other => Err(invalid(format!(
            "unknown trace kind {other:?}; expected kummer, kloosterman or hyperelliptic"
        ))),
    }
}

pub fn build_group(cfg: &ExperimentConfig) -> Result<GroupSpec> {
    let field = Field::canonical(cfg.ell, cfg.m)?;
    GroupSpec::new(GroupKind::parse(&cfg.kind)?, cfg.n, &field)
}

fn kummer_f(t: &TraceFunction) -> Option<&RationalFunction> {
    match t.params() {
        TraceParams::Kummer { f, .. } => Some(f),
        _ => None,
    }
}

/// `deg f_1` for a Kummer trace function `chi(f_1/f_2)`.
pub fn kummer_numerator_degree(t: &TraceFunction) -> Option<usize> {
    kummer_f(t).map(|f| f.numerator().deg())
}

fn is_identity_function(f: &RationalFunction) -> bool {
    f.numerator() == &Poly::x() && f.denominator() == &Poly::constant(Elem::ONE)
}

/// Kummer compatibility of `I`: automatic when `deg f = 1`, otherwise
/// `x_1 + ... + x_m != 0` for all `x_i in I` and `1 <= m <= deg f_1`.
/// `None` for non-Kummer trace functions.
pub fn kummer_compatible(t: &TraceFunction, set: &[Elem]) -> Option<bool> {
    let f = kummer_f(t)?;
    if f.degree() == 1 {
        return Some(true);
    }
    let d = t.domain();
    let mut sums: HashSet<Elem> = HashSet::from([Elem::ZERO]);
    for _ in 0..f.numerator().deg() {
        sums = sums.iter().flat_map(|&s| set.iter().map(move |&x| d.add(s, x))).collect();
        if sums.contains(&Elem::ZERO) {
            return Some(false);
        }
    }
    Some(true)
}

/// Counts of `S(t, set + x)` over the given shifts.
pub fn shift_sum_counts(t: &TraceFunction, set: &[Elem], xs: &[Elem]) -> Vec<u64> {
    let d = t.domain();
    let r = t.context().field();
    let sums: Vec<Elem> = xs
        .par_iter()
        .map(|&x| set.iter().fold(Elem::ZERO, |acc, &i| r.add(acc, t.value(d.add(i, x)))))
        .collect();
    let mut counts = vec![0u64; r.size()];
    for s in sums {
        counts[s.index()] += 1;
    }
    counts
}

/// `max_a |count_a / total - 1/Q|`.
pub fn max_deviation(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let u = 1.0 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 / total as f64 - u).abs()).fold(0.0, f64::max)
}

fn density_table(name: &str, r: &Field, counts: &[u64]) -> Table {
    let total: u64 = counts.iter().sum();
    let u = 1.0 / counts.len() as f64;
    let mut t = Table::new(name, &["a", "count", "phi", "deviation"]);
    for (i, &c) in counts.iter().enumerate() {
        let phi = c as f64 / total as f64;
        t.push(vec![json!(r.format(Elem(i as u32))), json!(c), json!(phi), json!(phi - u)]);
    }
    t
}

/// Both summands of the shift equidistribution error for a walk of length `steps`.
pub fn equidistribution_bound(group: &GroupSpec, steps: u32, q: f64) -> Result<Bound> {
    let terms = if group.kind() == GroupKind::Mu {
        let alpha = mu_alpha_empirical(group)?.alpha;
        equidist_bound_cyclic(group, steps, q, alpha)?
    } else {
        equidist_bound_classical(group, steps, q)?
    };
    Ok(Bound::new("equidistribution", &[terms.model, terms.sheaf]))
}

fn bound_verdict(report: &mut Report, name: &str, deviation: f64, bound: &Bound, c: f64) {
    let passed = deviation <= c * bound.value;
    report.soft(name, passed, format!("deviation {deviation:.6e} vs {c} * {:.6e}", bound.value));
}

fn mass_verdict(report: &mut Report, counts: &[u64], expected: u64) {
    let total: u64 = counts.iter().sum();
    report.exact("densities_sum_to_one", total == expected, format!("{total} of {expected} counted"));
}
