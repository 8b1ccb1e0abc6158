//! Families of sums `k -> I(k) ⊂ F_q`, their combinatorial statistics, the
//! empirical densities `Phi` and the averaged variance over shifts.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::integer_root;
use crate::error::{invalid, precondition, Error, Result};
use crate::ff::{Elem, Field};
use crate::tracefn::TraceFunction;

/// Default cap on `|K|^2 * m` for pairwise statistics.
pub const STATS_BUDGET: u128 = 1 << 34;
/// Default cap on `q * sum |I(k)|` for shift scans.
pub const SHIFT_BUDGET: u128 = 1 << 34;
/// Cap on the number of parameters of a product family.
pub const PRODUCT_CAP: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Intervals,
    Boxes,
    ShiftedSubset,
    Product,
    Custom,
}

#[derive(Clone, Debug)]
enum Members {
    /// Sorted element indices per parameter.
    Explicit(Vec<Vec<u32>>),
    /// `I(k) = {1, ..., k}` in a prime field, kept implicit.
    Intervals(Vec<u64>),
}

/// An injective family `K -> P(F_q)` with parameters in a fixed order.
#[derive(Clone, Debug)]
pub struct SumFamily {
    domain: Field,
    kind: FamilyKind,
    params: Vec<Vec<u64>>,
    members: Members,
    bounding_box: Option<Vec<(u64, u64)>>,
}

/// Coordinates `c_i in [0, p)` of an element in the basis `1, x, ..., x^{e-1}`.
pub fn coordinates(field: &Field, a: Elem) -> Vec<u64> {
    field.coeffs(a)
}

fn from_coords(field: &Field, coords: &[u64]) -> Result<Elem> {
    let p = field.characteristic();
    let reduced: Vec<u64> = coords.iter().map(|c| c % p).collect();
    field.from_coeffs(&reduced)
}

fn sorted_indices(set: impl IntoIterator<Item = Elem>) -> Vec<u32> {
    let mut v: Vec<u32> = set.into_iter().map(|e| e.0).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Bounding box `prod_i [min x_i, max x_i]` of a nonempty set.
pub fn bounding_box(field: &Field, set: &[Elem]) -> Result<Vec<(u64, u64)>> {
    let first = set.first().ok_or_else(|| invalid("bounding box of an empty set"))?;
    let mut bbox: Vec<(u64, u64)> = coordinates(field, *first).into_iter().map(|c| (c, c)).collect();
    for &x in &set[1..] {
        for (b, c) in bbox.iter_mut().zip(coordinates(field, x)) {
            b.0 = b.0.min(c);
            b.1 = b.1.max(c);
        }
    }
    Ok(bbox)
}

/// `|B| = prod_i (max_i - min_i + 1)`.
pub fn box_size(bbox: &[(u64, u64)]) -> u128 {
    bbox.iter().map(|(lo, hi)| (hi - lo + 1) as u128).product()
}

impl SumFamily {
    fn check_injective(members: &[Vec<u32>]) -> Result<()> {
        let mut seen = HashSet::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            if !seen.insert(m.as_slice()) {
                return Err(invalid(format!("family is not injective: member {i} repeats an earlier set")));
            }
        }
        Ok(())
    }

    /// A family given by explicit member sets.
    pub fn custom(domain: &Field, params: Vec<Vec<u64>>, members: Vec<Vec<Elem>>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("family has no parameters"));
        }
        if params.len() != members.len() {
            return Err(invalid("parameter and member counts differ"));
        }
        let q = domain.order();
        if members.iter().flatten().any(|e| e.0 as u64 >= q) {
            return Err(invalid("member element outside the domain"));
        }
        let members: Vec<Vec<u32>> = members.into_iter().map(sorted_indices).collect();
        Self::check_injective(&members)?;
        Ok(SumFamily { domain: domain.clone(), kind: FamilyKind::Custom, params, members: Members::Explicit(members), bounding_box: None })
    }

    /// `I(k) = {1, ..., k}` for `k in K ⊂ {1, ..., p}`.
    pub fn intervals(domain: &Field, ks: &[u64]) -> Result<Self> {
        if domain.degree() != 1 {
            return Err(Error::Unsupported("interval families need a prime field; use boxes".into()));
        }
        if ks.is_empty() {
            return Err(invalid("family has no parameters"));
        }
        let p = domain.order();
        if let Some(k) = ks.iter().find(|&&k| k < 1 || k > p) {
            return Err(invalid(format!("interval length {k} outside [1, {p}]")));
        }
        let distinct: HashSet<_> = ks.iter().collect();
        if distinct.len() != ks.len() {
            return Err(invalid("family is not injective: repeated interval length"));
        }
        Ok(SumFamily {
            domain: domain.clone(),
            kind: FamilyKind::Intervals,
            params: ks.iter().map(|&k| vec![k]).collect(),
            members: Members::Intervals(ks.to_vec()),
            bounding_box: None,
        })
    }

    /// All intervals `{1..k}`, `k = 1..p`.
    pub fn all_intervals(domain: &Field) -> Result<Self> {
        let ks: Vec<u64> = (1..=domain.order()).collect();
        Self::intervals(domain, &ks)
    }

    /// `I(k_1, ..., k_e) = prod_i {1, ..., k_i}` under the basis identification.
    pub fn boxes(domain: &Field, ks: &[Vec<u64>]) -> Result<Self> {
        if ks.is_empty() {
            return Err(invalid("family has no parameters"));
        }
        let e = domain.degree() as usize;
        let p = domain.characteristic();
        let mut members = Vec::with_capacity(ks.len());
        for k in ks {
            if k.len() != e || k.iter().any(|&c| c < 1 || c > p) {
                return Err(invalid(format!("box {k:?} outside {{1..{p}}}^{e}")));
            }
            let factors: Vec<Vec<u64>> = k.iter().map(|&c| (1..=c).collect()).collect();
            members.push(sorted_indices(cartesian(&factors).map(|c| from_coords(domain, &c).expect("in range"))));
        }
        Self::check_injective(&members)?;
        Ok(SumFamily { domain: domain.clone(), kind: FamilyKind::Boxes, params: ks.to_vec(), members: Members::Explicit(members), bounding_box: None })
    }

    /// `I(x) = E + x` for `x` in `shifts`; records the bounding box of `E`.
    pub fn shifted_subset(domain: &Field, set: &[Elem], shifts: &[Elem]) -> Result<Self> {
        if set.is_empty() {
            return Err(invalid("shifted-subset family needs a nonempty E"));
        }
        if shifts.is_empty() {
            return Err(invalid("family has no parameters"));
        }
        let base = sorted_indices(set.iter().copied());
        let members: Vec<Vec<u32>> = shifts
            .iter()
            .map(|&x| sorted_indices(base.iter().map(|&b| domain.add(Elem(b), x))))
            .collect();
        Self::check_injective(&members)?;
        let set: Vec<Elem> = base.iter().map(|&b| Elem(b)).collect();
        Ok(SumFamily {
            domain: domain.clone(),
            kind: FamilyKind::ShiftedSubset,
            params: shifts.iter().map(|x| vec![x.0 as u64]).collect(),
            members: Members::Explicit(members),
            bounding_box: Some(bounding_box(domain, &set)?),
        })
    }

    /// `I(k_1, ..., k_e) = prod_i I_i(k_i)` with one family over `F_p` per coordinate.
    pub fn product(domain: &Field, factors: &[SumFamily]) -> Result<Self> {
        let e = domain.degree() as usize;
        if factors.len() != e {
            return Err(invalid(format!("{} factor families for a field of degree {e}", factors.len())));
        }
        let p = domain.characteristic();
        if let Some(f) = factors.iter().find(|f| f.domain.order() != p) {
            return Err(Error::FieldMismatch(format!("F_{}", f.domain.order()), format!("F_{p}")));
        }
        let count: u128 = factors.iter().map(|f| f.len() as u128).product();
        if count > PRODUCT_CAP {
            return Err(Error::CapExceeded { what: "product family", size: count, cap: PRODUCT_CAP });
        }
        let index_lists: Vec<Vec<u64>> = factors.iter().map(|f| (0..f.len() as u64).collect()).collect();
        let mut params = Vec::new();
        let mut members = Vec::new();
        for choice in cartesian(&index_lists) {
            let parts: Vec<Vec<u64>> = choice
                .iter()
                .zip(factors)
                .map(|(&i, f)| f.member(i as usize).iter().map(|&x| x as u64).collect())
                .collect();
            members.push(sorted_indices(cartesian(&parts).map(|c| from_coords(domain, &c).expect("in range"))));
            params.push(choice.iter().zip(factors).flat_map(|(&i, f)| f.params[i as usize].clone()).collect());
        }
        Self::check_injective(&members)?;
        Ok(SumFamily { domain: domain.clone(), kind: FamilyKind::Product, params, members: Members::Explicit(members), bounding_box: None })
    }

    pub fn domain(&self) -> &Field {
        &self.domain
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// `|K|`.
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[Vec<u64>] {
        &self.params
    }

    /// Sorted element indices of `I(k_i)`.
    pub fn member(&self, i: usize) -> Cow<'_, [u32]> {
        match &self.members {
            Members::Explicit(m) => Cow::Borrowed(&m[i]),
            Members::Intervals(ks) => {
                let p = self.domain.order();
                Cow::Owned(sorted_indices((1..=ks[i]).map(|j| Elem((j % p) as u32))))
            }
        }
    }

    pub fn member_elems(&self, i: usize) -> Vec<Elem> {
        self.member(i).iter().map(|&x| Elem(x)).collect()
    }

    pub fn member_size(&self, i: usize) -> u64 {
        match &self.members {
            Members::Explicit(m) => m[i].len() as u64,
            Members::Intervals(ks) => ks[i],
        }
    }

    /// Bounding box of `E` for shifted-subset families.
    pub fn bounding_box(&self) -> Option<&[(u64, u64)]> {
        self.bounding_box.as_deref()
    }

    pub fn descriptor(&self) -> serde_json::Value {
        let mut d = json!({ "kind": self.kind, "params": self.params, "domain": self.domain.spec().canonical_string() });
        if let Some(b) = &self.bounding_box {
            d["bounding_box"] = json!(b);
        }
        d
    }

    fn total_size(&self) -> u128 {
        (0..self.len()).map(|i| self.member_size(i) as u128).sum()
    }

    /// `S(t, I(k) + x)` for every parameter, in parameter order.
    pub fn shifted_sums(&self, t: &TraceFunction, x: Elem) -> Vec<Elem> {
        let r = t.context().field();
        let d = &self.domain;
        match &self.members {
            Members::Explicit(m) => m
                .iter()
                .map(|set| set.iter().fold(Elem::ZERO, |acc, &e| r.add(acc, t.value(d.add(Elem(e), x)))))
                .collect(),
            Members::Intervals(ks) => {
                let p = d.order();
                let kmax = *ks.iter().max().expect("nonempty") as usize;
                let mut prefix = Vec::with_capacity(kmax + 1);
                prefix.push(Elem::ZERO);
                let mut acc = Elem::ZERO;
                for j in 1..=kmax as u64 {
                    acc = r.add(acc, t.value(d.add(Elem((j % p) as u32), x)));
                    prefix.push(acc);
                }
                ks.iter().map(|&k| prefix[k as usize]).collect()
            }
        }
    }

    fn check_domain(&self, t: &TraceFunction) -> Result<()> {
        if t.domain() != &self.domain {
            return Err(Error::FieldMismatch(
                t.domain().spec().canonical_string(),
                self.domain.spec().canonical_string(),
            ));
        }
        Ok(())
    }

    /// Union of all members, as sorted indices.
    pub fn union(&self) -> Vec<u32> {
        match &self.members {
            Members::Explicit(m) => sorted_indices(m.iter().flatten().map(|&x| Elem(x))),
            Members::Intervals(ks) => {
                let kmax = *ks.iter().max().expect("nonempty");
                self.member(ks.iter().position(|&k| k == kmax).expect("present")).into_owned()
            }
        }
    }
}

/// Cartesian product with the first coordinate varying fastest.
fn cartesian(lists: &[Vec<u64>]) -> impl Iterator<Item = Vec<u64>> + '_ {
    let total: usize = if lists.iter().any(|l| l.is_empty()) { 0 } else { lists.iter().map(Vec::len).product() };
    (0..total).map(move |mut idx| {
        lists
            .iter()
            .map(|l| {
                let v = l[idx % l.len()];
                idx /= l.len();
                v
            })
            .collect()
    })
}

/// Exact integer statistics of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyStats {
    /// `|K|`.
    pub size: u64,
    /// `|union of members|`.
    pub big_m: u64,
    /// `max |I(k)|`.
    pub m: u64,
    /// `min_{k1 != k2} |I(k1) Δ I(k2)|`, absent for singleton families.
    pub a: Option<u64>,
    /// `g(d) = #{k : |I(k)| = d}`.
    pub g: BTreeMap<u64, u64>,
    /// `h(d) = #{(k1, k2) : |I(k1) Δ I(k2)| = d}`, `d >= 1`.
    pub h: BTreeMap<u64, u64>,
    /// Ordered pairs `k1 != k2` keyed by `(|I(k1) \ I(k2)|, |I(k2) \ I(k1)|)`.
    pub diff_pairs: BTreeMap<(u64, u64), u64>,
    pub bounding_box_size: Option<u128>,
}

impl FamilyStats {
    /// `G(alpha, n) = (1/|K|) sum_{d >= 1} g(d) n^{-alpha d}`.
    pub fn big_g(&self, alpha: f64, n: f64) -> f64 {
        weighted(&self.g, self.size, alpha, n)
    }

    /// `H(alpha, n) = (1/|K|) sum_{d >= 1} h(d) n^{-alpha d}`.
    pub fn big_h(&self, alpha: f64, n: f64) -> f64 {
        weighted(&self.h, self.size, alpha, n)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "d,g,h")?;
        let ds: std::collections::BTreeSet<u64> = self.g.keys().chain(self.h.keys()).copied().collect();
        for d in ds {
            writeln!(w, "{d},{},{}", self.g.get(&d).unwrap_or(&0), self.h.get(&d).unwrap_or(&0))?;
        }
        Ok(())
    }
}

fn weighted(map: &BTreeMap<u64, u64>, size: u64, alpha: f64, n: f64) -> f64 {
    map.iter()
        .filter(|(&d, _)| d >= 1)
        .map(|(&d, &c)| c as f64 * n.powf(-alpha * d as f64))
        .sum::<f64>()
        / size as f64
}

/// `(|a \ b|, |b \ a|)` for sorted slices.
fn set_differences(a: &[u32], b: &[u32]) -> (u64, u64) {
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (a.len() as u64 - common, b.len() as u64 - common)
}

pub fn stats(fam: &SumFamily) -> Result<FamilyStats> {
    stats_with_budget(fam, STATS_BUDGET)
}

pub fn stats_with_budget(fam: &SumFamily, budget: u128) -> Result<FamilyStats> {
    let k = fam.len() as u128;
    let m = (0..fam.len()).map(|i| fam.member_size(i)).max().unwrap_or(0);
    let needed = match fam.members {
        Members::Explicit(_) => k * k * (m as u128).max(1),
        Members::Intervals(_) => k * k,
    };
    if needed > budget {
        return Err(Error::BudgetExceeded { what: "family statistics", needed, budget });
    }
    let mut g = BTreeMap::new();
    for i in 0..fam.len() {
        *g.entry(fam.member_size(i)).or_insert(0) += 1;
    }
    type Acc = BTreeMap<(u64, u64), u64>;
    let merge = |mut a: Acc, b: Acc| {
        for (key, c) in b {
            *a.entry(key).or_insert(0) += c;
        }
        a
    };
    let diff_pairs: Acc = match &fam.members {
        Members::Explicit(members) => (0..members.len())
            .into_par_iter()
            .fold(Acc::new, |mut acc, i| {
                for j in i + 1..members.len() {
                    let (x, y) = set_differences(&members[i], &members[j]);
                    *acc.entry((x, y)).or_insert(0) += 1;
                    *acc.entry((y, x)).or_insert(0) += 1;
                }
                acc
            })
            .reduce(Acc::new, merge),
        Members::Intervals(ks) => (0..ks.len())
            .into_par_iter()
            .fold(Acc::new, |mut acc, i| {
                for j in i + 1..ks.len() {
                    let (x, y) = (ks[i].saturating_sub(ks[j]), ks[j].saturating_sub(ks[i]));
                    *acc.entry((x, y)).or_insert(0) += 1;
                    *acc.entry((y, x)).or_insert(0) += 1;
                }
                acc
            })
            .reduce(Acc::new, merge),
    };
    let mut h = BTreeMap::new();
    for (&(x, y), &c) in &diff_pairs {
        if x + y >= 1 {
            *h.entry(x + y).or_insert(0) += c;
        }
    }
    let a = h.keys().next().copied();
    Ok(FamilyStats {
        size: fam.len() as u64,
        big_m: fam.union().len() as u64,
        m,
        a,
        g,
        h,
        diff_pairs,
        bounding_box_size: fam.bounding_box().map(box_size),
    })
}

/// Counts `#{k : S(t, I(k) + x) = a}` for every `a`, indexed by residue element.
fn residue_counts(t: &TraceFunction, fam: &SumFamily, x: Elem) -> Vec<u64> {
    let mut counts = vec![0u64; t.context().field().size()];
    for s in fam.shifted_sums(t, x) {
        counts[s.index()] += 1;
    }
    counts
}

/// Exact counting density `Phi(t, I, a) = count[a] / total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Density {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Density { counts, total }
    }

    pub fn phi(&self, a: Elem) -> f64 {
        self.counts[a.index()] as f64 / self.total as f64
    }

    pub fn values(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    /// `max_a |Phi(a) - 1/Q|`.
    pub fn max_deviation(&self) -> f64 {
        let uniform = 1.0 / self.counts.len() as f64;
        self.counts
            .iter()
            .map(|&c| (c as f64 / self.total as f64 - uniform).abs())
            .fold(0.0, f64::max)
    }
}

/// `Phi(t, I, a) = #{k : S(t, I(k)) = a} / |K|` for every `a`.
pub fn density(t: &TraceFunction, fam: &SumFamily) -> Result<Density> {
    fam.check_domain(t)?;
    Ok(Density::from_counts(residue_counts(t, fam, Elem::ZERO)))
}

/// Which shifts enter an average over `x in F_q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDomain {
    #[default]
    All,
    /// Only `x` with `(union of members) + x` avoiding the singular set.
    Regular,
}

pub fn shifts(t: &TraceFunction, fam: &SumFamily, which: ShiftDomain) -> Vec<Elem> {
    let d = t.domain();
    match which {
        ShiftDomain::All => d.elements().collect(),
        ShiftDomain::Regular => {
            let union = fam.union();
            d.elements()
                .filter(|&x| union.iter().all(|&u| !t.is_singular(d.add(Elem(u), x))))
                .collect()
        }
    }
}

/// Per-shift counts `c_{x,a}` for every shift in `xs`.
pub fn shift_counts(t: &TraceFunction, fam: &SumFamily, xs: &[Elem]) -> Result<Vec<Vec<u64>>> {
    fam.check_domain(t)?;
    let needed = xs.len() as u128 * fam.total_size().max(1);
    if needed > SHIFT_BUDGET {
        return Err(Error::BudgetExceeded { what: "shift scan", needed, budget: SHIFT_BUDGET });
    }
    Ok(xs.par_iter().map(|&x| residue_counts(t, fam, x)).collect())
}

/// Averaged variance with its exact rational form `(N Q - n K^2) / (n K^2 Q)`,
/// where `n` is the number of shifts and `N = sum_x sum_a c_{x,a}^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedVariance {
    pub shifts: u64,
    pub family_size: u64,
    pub residue_size: u64,
    /// `N`.
    pub sum_squares: u128,
    /// `C_a = sum_x c_{x,a}`.
    pub column_totals: Vec<u64>,
    pub numerator: i128,
    pub denominator: u128,
    pub value: f64,
}

impl AveragedVariance {
    /// `Phi(t, I', a) = C_a / (n K)`.
    pub fn averaged_density(&self) -> Vec<f64> {
        let denom = (self.shifts * self.family_size) as f64;
        self.column_totals.iter().map(|&c| c as f64 / denom).collect()
    }

    /// `max_a |Phi(t, I', a) - 1/Q|`.
    pub fn averaged_max_deviation(&self) -> f64 {
        let uniform = 1.0 / self.residue_size as f64;
        self.averaged_density().iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max)
    }

    /// Exact check of `|Phi(t, I', a) - 1/Q| <= sqrt(V)` for every `a`:
    /// `(C_a Q - n K)^2 <= (N Q - n K^2) n Q`.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let q = self.residue_size as i128;
        let n = self.shifts as i128;
        let k = self.family_size as i128;
        let rhs = self.numerator * n * q;
        self.column_totals.iter().all(|&c| {
            let lhs = c as i128 * q - n * k;
            lhs * lhs <= rhs
        })
    }
}

/// `V(t, I) = sum_a (1/q) sum_x (Phi(t, I + x, a) - 1/Q)^2`.
pub fn averaged_variance(t: &TraceFunction, fam: &SumFamily) -> Result<AveragedVariance> {
    averaged_variance_over(t, fam, ShiftDomain::All)
}

pub fn averaged_variance_over(t: &TraceFunction, fam: &SumFamily, which: ShiftDomain) -> Result<AveragedVariance> {
    if fam.is_empty() {
        return Err(invalid("empty family"));
    }
    let xs = shifts(t, fam, which);
    if xs.is_empty() {
        return Err(precondition("no admissible shifts"));
    }
    let rows = shift_counts(t, fam, &xs)?;
    let q_res = t.context().field().size();
    let mut column_totals = vec![0u64; q_res];
    let mut sum_squares = 0u128;
    for row in &rows {
        for (a, &c) in row.iter().enumerate() {
            column_totals[a] += c;
            sum_squares += c as u128 * c as u128;
        }
    }
    let n = xs.len() as u128;
    let k = fam.len() as u128;
    let qq = q_res as u128;
    let numerator = (sum_squares * qq) as i128 - (n * k * k) as i128;
    let denominator = n * k * k * qq;
    Ok(AveragedVariance {
        shifts: n as u64,
        family_size: k as u64,
        residue_size: q_res as u64,
        sum_squares,
        column_totals,
        numerator,
        denominator,
        value: numerator as f64 / denominator as f64,
    })
}

/// `|{y in B : |E ∩ (E + y)| = d}|` for every `d`, with `B` the distinct
/// pairwise differences of `shifts`.
pub fn shift_overlap_counts(field: &Field, set: &[Elem], shifts: &[Elem]) -> BTreeMap<u64, u64> {
    let base: HashSet<Elem> = set.iter().copied().collect();
    let mut diffs = HashSet::new();
    for &a in shifts {
        for &b in shifts {
            if a != b {
                diffs.insert(field.sub(a, b));
            }
        }
    }
    let mut out = BTreeMap::new();
    for y in diffs {
        let overlap = set.iter().filter(|&&e| base.contains(&field.add(e, y))).count() as u64;
        *out.entry(overlap).or_insert(0) += 1;
    }
    out
}

/// Whether every shift lies in `prod_i [0, p - max_{x in E} x_i]`.
pub fn no_wraparound(field: &Field, set: &[Elem], shifts: &[Elem]) -> bool {
    let p = field.characteristic();
    let e = field.degree() as usize;
    let maxes: Vec<u64> = (0..e).map(|i| set.iter().map(|&x| field.coord(x, i)).max().unwrap_or(0)).collect();
    shifts.iter().all(|&y| (0..e).all(|i| field.coord(y, i) <= p - maxes[i]))
}

/// `(I_1, a)` with `a = ceil(log I / log(delta p))` and `I_1 = floor(I^{1/a})`.
pub fn choose_averaging_size(target: u64, p: u64, e: u32, delta: f64) -> Result<(u64, u32)> {
    if target < 1 || !(delta > 0.0) {
        return Err(invalid("target size must be >= 1 and delta positive"));
    }
    let x = delta * p as f64;
    if x <= 1.0 {
        return Err(precondition("delta * p must exceed 1"));
    }
    let log_i = (target as f64).ln();
    if log_i > (e as f64 - 1.0) * x.ln() * (1.0 + 1e-12) {
        return Err(precondition(format!("log I = {log_i:.4} exceeds (e - 1) log(delta p)")));
    }
    let mut a = 1u32;
    while x.powi(a as i32) * (1.0 + 1e-12) < target as f64 {
        a += 1;
    }
    Ok((integer_root(target, a), a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, e: u32) -> Field {
        Field::canonical(p, e).unwrap()
    }

    #[test]
    fn interval_statistics() {
        let fam = SumFamily::intervals(&f(7, 1), &[1, 2, 3]).unwrap();
        assert_eq!(fam.member_elems(1), vec![Elem(1), Elem(2)]);
        let s = stats(&fam).unwrap();
        assert_eq!((s.big_m, s.m, s.a), (3, 3, Some(1)));
        assert_eq!(s.h, BTreeMap::from([(1, 4), (2, 2)]));
        let (alpha, n) = (0.5f64, 3.0f64);
        let expect = (4.0 * n.powf(-alpha) + 2.0 * n.powf(-2.0 * alpha)) / 3.0;
        assert!((s.big_h(alpha, n) - expect).abs() < 1e-15);
    }

    #[test]
    fn lazy_intervals_match_explicit_members() {
        let d = f(11, 1);
        let lazy = SumFamily::intervals(&d, &[3, 7, 11]).unwrap();
        let explicit = SumFamily::custom(&d, lazy.params().to_vec(), (0..3).map(|i| lazy.member_elems(i)).collect()).unwrap();
        assert_eq!(stats(&lazy).unwrap().h, stats(&explicit).unwrap().h);
        assert!(lazy.member(2).contains(&0));
    }

    #[test]
    fn boxes_and_products() {
        let d = f(3, 2);
        let fam = SumFamily::boxes(&d, &[vec![2, 2], vec![1, 1], vec![2, 1]]).unwrap();
        assert_eq!(fam.member_size(0), 4);
        assert_eq!(fam.member_size(1), 1);
        let two = SumFamily::boxes(&d, &[vec![1, 1], vec![2, 1]]).unwrap();
        assert_eq!(stats(&two).unwrap().h.get(&1), Some(&2));

        let fp = f(3, 1);
        let iv = SumFamily::intervals(&fp, &[1, 2]).unwrap();
        let sh = SumFamily::shifted_subset(&fp, &[Elem(0), Elem(1)], &[Elem(0), Elem(1)]).unwrap();
        let prod = SumFamily::product(&d, &[iv, sh]).unwrap();
        assert_eq!(prod.len(), 4);
        // (k1 = 2, shift 1): {1, 2} x ({0, 1} + 1).
        let idx = prod.params().iter().position(|p| p == &vec![2, 1]).unwrap();
        let dr = &d;
        let expect = sorted_indices(
            [1u64, 2].iter().flat_map(|&a| [1u64, 2].map(move |b| from_coords(dr, &[a, b]).unwrap())),
        );
        assert_eq!(prod.member(idx).into_owned(), expect);
    }

    #[test]
    fn shifted_subset_statistics() {
        let d = f(5, 1);
        let fam = SumFamily::shifted_subset(&d, &[Elem(0), Elem(1)], &[Elem(0), Elem(1), Elem(2)]).unwrap();
        assert_eq!(fam.member_elems(0), vec![Elem(0), Elem(1)]);
        assert_eq!(stats(&fam).unwrap().a, Some(2));
        let all: Vec<Elem> = d.elements().collect();
        let full = SumFamily::shifted_subset(&d, &[Elem(0), Elem(1)], &all).unwrap();
        assert_eq!(stats(&full).unwrap().big_m, 5);
        assert!(SumFamily::shifted_subset(&d, &all, &[Elem(0), Elem(1)]).is_err());
    }

    #[test]
    fn averaging_size() {
        assert_eq!(choose_averaging_size(7, 10, 2, 1.0).unwrap(), (7, 1));
        assert_eq!(choose_averaging_size(100, 10, 3, 1.0).unwrap(), (10, 2));
        assert_eq!(choose_averaging_size(1000, 10, 4, 1.0).unwrap(), (10, 3));
        assert!(choose_averaging_size(1000, 10, 2, 1.0).is_err());
    }
}
