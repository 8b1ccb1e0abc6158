//! Laws of `S(L) = Z_1 + ... + Z_L` with `Z_i` traces of independent uniform elements of `G`.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ff::{Elem, Field};
use crate::model::gauss::{character_means, psi, GaussSource};
use crate::model::groups::{trace_histogram, GroupDescriptor, GroupSampler, GroupSpec};

/// Trials per Monte Carlo chunk; each chunk owns one RNG stream.
pub const MC_CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawSource {
    Formula(GaussSource),
    Enumeration,
    MonteCarlo,
    Empirical,
}

/// A distribution on `F_Q`, indexed by element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkLaw {
    pub group: Option<GroupDescriptor>,
    pub steps: u32,
    pub probabilities: Vec<f64>,
    /// Exact counts over `|G|^L` (enumeration) or trials (Monte Carlo).
    pub counts: Option<Vec<u128>>,
    pub denominator: Option<u128>,
    /// Largest imaginary part discarded by the character formula.
    pub max_imaginary: f64,
    pub source: LawSource,
}

impl WalkLaw {
    fn from_counts(group: Option<GroupDescriptor>, steps: u32, counts: Vec<u128>, source: LawSource) -> Self {
        let total: u128 = counts.iter().sum();
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        WalkLaw { group, steps, probabilities, counts: Some(counts), denominator: Some(total), max_imaginary: 0.0, source }
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn probability(&self, a: Elem) -> f64 {
        self.probabilities[a.index()]
    }

    /// `P(S(L) in A)`.
    pub fn probability_of(&self, set: &[Elem]) -> f64 {
        set.iter().map(|&a| self.probability(a)).sum()
    }

    /// Whether `P(a) |G|^L` rounds to the given counts and lies within `tol` of them.
    pub fn matches_counts(&self, counts: &[u128], denominator: u128, tol: f64) -> bool {
        counts.len() == self.probabilities.len()
            && self.probabilities.iter().zip(counts).all(|(&p, &c)| {
                let scaled = p * denominator as f64;
                scaled.round() as u128 == c && (scaled - c as f64).abs() <= tol
            })
    }

    pub fn write_csv<W: Write>(&self, field: &Field, mut w: W) -> Result<()> {
        writeln!(w, "a,probability")?;
        for (i, p) in self.probabilities.iter().enumerate() {
            writeln!(w, "{},{p}", field.format(Elem(i as u32)))?;
        }
        Ok(())
    }
}

/// Total variation distance `(1/2) sum |P - P'|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|a| (a - u).abs()).sum::<f64>()
}

/// `P(a) = (1/Q) [1 + sum_{b != 0} psi_b(-a) mu_b^L]`.
pub fn walk_law_exact(spec: &GroupSpec, steps: u32) -> Result<WalkLaw> {
    if steps < 1 {
        return Err(invalid("walk length must be >= 1"));
    }
    let (mu, src) = character_means(spec)?;
    Ok(law_from_means(spec, steps, &mu, LawSource::Formula(src)))
}

/// The character formula with caller-supplied means `mu_b`.
pub fn law_from_means(spec: &GroupSpec, steps: u32, mu: &[Complex64], source: LawSource) -> WalkLaw {
    let f = spec.field();
    let q = f.size();
    let powered: Vec<(Elem, Complex64)> = f.nonzero().map(|b| (b, mu[b.index()].powu(steps))).collect();
    let raw: Vec<Complex64> = (0..q)
        .into_par_iter()
        .map(|a| {
            let minus_a = f.neg(Elem(a as u32));
            let s: Complex64 = powered.iter().map(|&(b, m)| psi(f, b, minus_a) * m).sum();
            (s + 1.0) / q as f64
        })
        .collect();
    let max_imaginary = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let probabilities = raw.iter().map(|z| if z.re < 0.0 && z.re > -1e-12 { 0.0 } else { z.re }).collect();
    WalkLaw {
        group: Some(spec.descriptor()),
        steps,
        probabilities,
        counts: None,
        denominator: None,
        max_imaginary,
        source,
    }
}

/// Exact law from the trace histogram convolved `L` times.
pub fn walk_law_enumerated(spec: &GroupSpec, steps: u32) -> Result<WalkLaw> {
    if steps < 1 {
        return Err(invalid("walk length must be >= 1"));
    }
    let f = spec.field();
    let hist: Vec<u128> = trace_histogram(spec)?.into_iter().map(u128::from).collect();
    let mut cur = hist.clone();
    for _ in 1..steps {
        let mut next = vec![0u128; f.size()];
        for (s, &cs) in cur.iter().enumerate() {
            if cs == 0 {
                continue;
            }
            for (t, &ct) in hist.iter().enumerate() {
                if ct == 0 {
                    continue;
                }
                let v = cs.checked_mul(ct).ok_or(Error::CapExceeded { what: "walk-law counts", size: u128::MAX, cap: u128::MAX })?;
                next[f.add(Elem(s as u32), Elem(t as u32)).index()] += v;
            }
        }
        cur = next;
    }
    Ok(WalkLaw::from_counts(Some(spec.descriptor()), steps, cur, LawSource::Enumeration))
}

/// Monte Carlo law; chunk `c` draws from ChaCha8 stream `c` of `seed`.
pub fn walk_law_mc(spec: &GroupSpec, steps: u32, trials: u64, seed: u64) -> Result<WalkLaw> {
    if trials == 0 {
        return Err(invalid("Monte Carlo walk law needs at least one trial"));
    }
    if steps < 1 {
        return Err(invalid("walk length must be >= 1"));
    }
    let sampler = GroupSampler::new(spec)?;
    let f = spec.field();
    let chunks = trials.div_ceil(MC_CHUNK);
    let partial: Vec<Vec<u128>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut counts = vec![0u128; f.size()];
            for _ in 0..n {
                let s = (0..steps).fold(Elem::ZERO, |acc, _| f.add(acc, sampler.sample_trace(&mut rng)));
                counts[s.index()] += 1;
            }
            counts
        })
        .collect();
    let mut counts = vec![0u128; f.size()];
    for part in partial {
        for (a, c) in counts.iter_mut().zip(part) {
            *a += c;
        }
    }
    Ok(WalkLaw::from_counts(Some(spec.descriptor()), steps, counts, LawSource::MonteCarlo))
}

/// Empirical law of a list of residue values.
pub fn empirical_law(field: &Field, values: impl IntoIterator<Item = Elem>) -> WalkLaw {
    let mut counts = vec![0u128; field.size()];
    for v in values {
        counts[v.index()] += 1;
    }
    WalkLaw::from_counts(None, 1, counts, LawSource::Empirical)
}

/// `(Q - 1) (max_{b != 0} |mu_b|)^L`, the bound on the distance to uniform.
pub fn uniform_distance_bound(spec: &GroupSpec, steps: u32) -> Result<f64> {
    let (mu, _) = character_means(spec)?;
    let max = mu[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((spec.q() - 1) as f64 * max.powi(steps as i32))
}
