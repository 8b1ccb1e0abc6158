//! Model expected value and variance of the density `Phi(I, a)` when each
//! `t(x)` is replaced by an independent trace `Z_x` of a uniform element of `G`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::families::{FamilyStats, SumFamily};
use crate::ff::Elem;
use crate::model::constants::{constants, mu_alpha_empirical, to_f64};
use crate::model::gauss::character_means;
use crate::model::groups::{trace_histogram, GroupKind, GroupSampler, GroupSpec};
use crate::model::walk::MC_CHUNK;

/// Largest `Q^M` enumerated by [`model_variance_exact`].
pub const MODEL_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFamilyStats {
    /// `alpha(G)` used for `G_I(alpha, Q)`; empirical for `mu_d`.
    pub alpha: f64,
    /// `G_I(alpha, Q)`, the scale of `|E Phi(I, a) - 1/Q|`.
    pub expected_density_error: f64,
    /// `sum_a E[(Phi(I, a) - 1/Q)^2]`.
    pub model_variance: f64,
    /// `|I| * model_variance`, close to `(Q - 1)/Q` for well spread families.
    pub normalized_variance: f64,
}

pub fn group_alpha(spec: &GroupSpec) -> Result<f64> {
    match spec.kind() {
        GroupKind::Mu => Ok(mu_alpha_empirical(spec)?.alpha),
        _ => Ok(to_f64(constants(spec)?.alpha)),
    }
}

/// `(1/K) [(Q-1)/Q + (1/(K Q)) sum_{b != 0} sum_{k1 != k2} mu_b^{|k1 \ k2|} conj(mu_b)^{|k2 \ k1|}]`.
pub fn model_family_stats(spec: &GroupSpec, stats: &FamilyStats) -> Result<ModelFamilyStats> {
    if stats.size == 0 {
        return Err(invalid("empty family"));
    }
    let (mu, _) = character_means(spec)?;
    let q = spec.q() as f64;
    let k = stats.size as f64;
    let cross: f64 = mu[1..]
        .par_iter()
        .map(|&m| {
            stats
                .diff_pairs
                .iter()
                .map(|(&(x, y), &c)| c as f64 * (m.powu(x as u32) * m.conj().powu(y as u32)))
                .sum::<Complex64>()
                .re
        })
        .sum();
    let model_variance = ((q - 1.0) / q + cross / (k * q)) / k;
    let alpha = group_alpha(spec)?;
    Ok(ModelFamilyStats {
        alpha,
        expected_density_error: stats.big_g(alpha, q),
        model_variance,
        normalized_variance: model_variance * k,
    })
}

fn union_positions(fam: &SumFamily) -> (Vec<u32>, Vec<Vec<usize>>) {
    let union = fam.union();
    let members = (0..fam.len())
        .map(|i| fam.member(i).iter().map(|x| union.binary_search(x).expect("member in union")).collect())
        .collect();
    (union, members)
}

fn squared_deviation(counts: &[u64], k: f64) -> f64 {
    let u = 1.0 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 / k - u).powi(2)).sum()
}

/// Exact model variance by enumerating every trace assignment on the union.
pub fn model_variance_exact(spec: &GroupSpec, fam: &SumFamily) -> Result<f64> {
    if fam.is_empty() {
        return Err(invalid("empty family"));
    }
    let f = spec.field();
    let q = f.size();
    let (union, members) = union_positions(fam);
    let size = (q as u128).checked_pow(union.len() as u32).unwrap_or(u128::MAX);
    if size > MODEL_ENUMERATION_CAP {
        return Err(Error::CapExceeded { what: "model variance enumeration", size, cap: MODEL_ENUMERATION_CAP });
    }
    let hist = trace_histogram(spec)?;
    let order: u64 = hist.iter().sum();
    let law: Vec<f64> = hist.iter().map(|&c| c as f64 / order as f64).collect();
    let k = fam.len() as f64;
    let total: f64 = (0..size as u64)
        .into_par_iter()
        .map(|code| {
            let mut z = vec![Elem::ZERO; union.len()];
            let mut c = code;
            let mut weight = 1.0;
            for zi in z.iter_mut() {
                let v = (c % q as u64) as usize;
                c /= q as u64;
                weight *= law[v];
                *zi = Elem(v as u32);
            }
            if weight == 0.0 {
                return 0.0;
            }
            let mut counts = vec![0u64; q];
            for m in &members {
                let s = m.iter().fold(Elem::ZERO, |acc, &i| f.add(acc, z[i]));
                counts[s.index()] += 1;
            }
            weight * squared_deviation(&counts, k)
        })
        .sum();
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simulated {
    pub mean: f64,
    pub standard_error: f64,
    pub trials: u64,
}

/// Monte Carlo estimate of the model variance; chunk `c` uses ChaCha8 stream `c`.
pub fn model_variance_mc(spec: &GroupSpec, fam: &SumFamily, trials: u64, seed: u64) -> Result<Simulated> {
    if fam.is_empty() {
        return Err(invalid("empty family"));
    }
    if trials < 2 {
        return Err(invalid("simulation needs at least two trials"));
    }
    let f = spec.field();
    let q = f.size();
    let sampler = GroupSampler::new(spec)?;
    let (union, members) = union_positions(fam);
    let k = fam.len() as f64;
    let chunks = trials.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = MC_CHUNK.min(trials - c * MC_CHUNK);
            let mut z = vec![Elem::ZERO; union.len()];
            let mut counts = vec![0u64; q];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                for zi in z.iter_mut() {
                    *zi = sampler.sample_trace(&mut rng);
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for m in &members {
                    let s = m.iter().fold(Elem::ZERO, |acc, &i| f.add(acc, z[i]));
                    counts[s.index()] += 1;
                }
                let v = squared_deviation(&counts, k);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = s1 / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(Simulated { mean, standard_error: (var / n).sqrt(), trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::stats;
    use crate::ff::Field;

    fn spec(kind: GroupKind, n: u32, p: u64) -> GroupSpec {
        GroupSpec::new(kind, n, &Field::prime(p).unwrap()).unwrap()
    }

    #[test]
    fn single_member_matches_enumeration() {
        let s = spec(GroupKind::SL, 2, 3);
        let dom = Field::prime(5).unwrap();
        let fam = SumFamily::intervals(&dom, &[1]).unwrap();
        let formula = model_family_stats(&s, &stats(&fam).unwrap()).unwrap();
        let exact = model_variance_exact(&s, &fam).unwrap();
        assert!((formula.model_variance - exact).abs() < 1e-12);
    }

    #[test]
    fn mu2_intervals_match_enumeration() {
        let s = spec(GroupKind::Mu, 2, 3);
        let dom = Field::prime(7).unwrap();
        let fam = SumFamily::intervals(&dom, &[1, 2]).unwrap();
        let formula = model_family_stats(&s, &stats(&fam).unwrap()).unwrap();
        let exact = model_variance_exact(&s, &fam).unwrap();
        assert!((formula.model_variance - exact).abs() < 1e-12, "{} vs {exact}", formula.model_variance);
    }

    #[test]
    fn disjoint_members_reduce() {
        let s = spec(GroupKind::Mu, 2, 5);
        let dom = Field::prime(11).unwrap();
        let members: Vec<Vec<Elem>> =
            (0..3).map(|i| vec![dom.from_int(2 * i + 1), dom.from_int(2 * i + 2)]).collect();
        let fam = SumFamily::custom(&dom, (0..3).map(|i| vec![i]).collect(), members).unwrap();
        let formula = model_family_stats(&s, &stats(&fam).unwrap()).unwrap();
        let (mu, _) = character_means(&s).unwrap();
        let q = 5.0;
        let psum: f64 = mu[1..].iter().map(|m| m.norm().powi(4)).sum();
        let expected = ((q - 1.0) / q + 2.0 / q * psum) / 3.0;
        assert!((formula.model_variance - expected).abs() < 1e-12);
    }

    #[test]
    fn simulation_agrees() {
        let s = spec(GroupKind::SL, 2, 3);
        let dom = Field::prime(11).unwrap();
        let fam = SumFamily::intervals(&dom, &[1, 2, 3, 4]).unwrap();
        let formula = model_family_stats(&s, &stats(&fam).unwrap()).unwrap();
        let sim = model_variance_mc(&s, &fam, 20_000, 7).unwrap();
        assert!((sim.mean - formula.model_variance).abs() <= 5.0 * sim.standard_error);
    }
}
