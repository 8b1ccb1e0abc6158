//! Finite monodromy groups over F_Q: descriptors, orders, enumeration,
//! trace histograms and uniform sampling.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ff::{Elem, Field, FieldSpec};

/// Default cap on stored enumerations.
pub const ENUMERATION_CAP: u128 = 1_000_000;
/// Default cap on the number of matrices scanned when streaming GL/SL.
pub const STREAM_CAP: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL")]
    GL,
    #[serde(rename = "SL")]
    SL,
    #[serde(rename = "Sp")]
    Sp,
    #[serde(rename = "SO_odd")]
    SOOdd,
    #[serde(rename = "SO_plus")]
    SOPlus,
    #[serde(rename = "mu")]
    Mu,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::GL => "GL",
            GroupKind::SL => "SL",
            GroupKind::Sp => "Sp",
            GroupKind::SOOdd => "SO_odd",
            GroupKind::SOPlus => "SO_plus",
            GroupKind::Mu => "mu",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(GroupKind::GL),
            "sl" => Ok(GroupKind::SL),
            "sp" => Ok(GroupKind::Sp),
            "so_odd" | "so" => Ok(GroupKind::SOOdd),
            "so_plus" | "so+" => Ok(GroupKind::SOPlus),
            "mu" => Ok(GroupKind::Mu),
            _ => Err(Error::Parse(format!("unknown group kind {s:?}"))),
        }
    }

    pub fn is_classical(self) -> bool {
        self != GroupKind::Mu
    }
}

/// A finite group `G(F_Q)`: matrix size `n` for classical kinds, `d` for `mu_d`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    n: u32,
    field: Field,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Serialized form of a [`GroupSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub kind: GroupKind,
    pub n: u32,
    pub field: String,
}

impl GroupSpec {
    pub fn new(kind: GroupKind, n: u32, field: &Field) -> Result<Self> {
        let q = field.order();
        let odd = q % 2 == 1;
        match kind {
            GroupKind::GL | GroupKind::SL if n >= 1 => {}
            GroupKind::Sp if n >= 2 && n.is_multiple_of(2) => {}
            GroupKind::Sp => return Err(invalid(format!("Sp_n needs n even, got {n}"))),
            GroupKind::SOOdd if n >= 3 && n % 2 == 1 && odd => {}
            GroupKind::SOPlus if n >= 2 && n.is_multiple_of(2) && odd => {}
            GroupKind::SOOdd | GroupKind::SOPlus if !odd => {
                return Err(Error::Unsupported("orthogonal groups in characteristic 2".into()))
            }
            GroupKind::Mu if n >= 1 && (q - 1).is_multiple_of(n as u64) => {}
            GroupKind::Mu => {
                return Err(invalid(format!("mu_{n} needs {n} | Q - 1 = {}", q - 1)))
            }
            _ => return Err(invalid(format!("invalid size {n} for {}", kind.name()))),
        }
        Ok(GroupSpec { kind, n, field: field.clone() })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Matrix size (or `d` for `mu_d`).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// |F_Q|.
    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// Size of the matrices representing elements.
    pub fn dim(&self) -> usize {
        match self.kind {
            GroupKind::Mu => 1,
            _ => self.n as usize,
        }
    }

    pub fn label(&self) -> String {
        let q = self.q();
        match self.kind {
            GroupKind::Mu => format!("mu_{}(F_{q})", self.n),
            GroupKind::SOOdd => format!("SO_{}(F_{q})", self.n),
            GroupKind::SOPlus => format!("SO+_{}(F_{q})", self.n),
            k => format!("{}_{}(F_{q})", k.name(), self.n),
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor { kind: self.kind, n: self.n, field: self.field.spec().canonical_string() }
    }

    pub fn from_descriptor(desc: &GroupDescriptor) -> Result<Self> {
        let field = Field::new(FieldSpec::parse(&desc.field)?)?;
        Self::new(desc.kind, desc.n, &field)
    }

    /// Exact group order.
    pub fn order(&self) -> Result<u128> {
        let q = self.q() as u128;
        let n = self.n;
        let overflow = || Error::CapExceeded { what: "group order", size: u128::MAX, cap: u128::MAX };
        let pow = |b: u128, e: u32| b.checked_pow(e).ok_or_else(overflow);
        let mul = |a: u128, b: u128| a.checked_mul(b).ok_or_else(overflow);
        match self.kind {
            GroupKind::GL | GroupKind::SL => {
                let qn = pow(q, n)?;
                let mut acc = 1u128;
                for i in 0..n {
                    acc = mul(acc, qn - pow(q, i)?)?;
                }
                Ok(if self.kind == GroupKind::SL { acc / (q - 1) } else { acc })
            }
            GroupKind::Sp | GroupKind::SOOdd => {
                let m = if self.kind == GroupKind::Sp { n / 2 } else { (n - 1) / 2 };
                let mut acc = pow(q, m * m)?;
                for i in 1..=m {
                    acc = mul(acc, pow(q, 2 * i)? - 1)?;
                }
                Ok(acc)
            }
            GroupKind::SOPlus => {
                let m = n / 2;
                let mut acc = mul(pow(q, m * (m - 1))?, pow(q, m)? - 1)?;
                for i in 1..m {
                    acc = mul(acc, pow(q, 2 * i)? - 1)?;
                }
                Ok(acc)
            }
            GroupKind::Mu => Ok(n as u128),
        }
    }
}

/// Square matrix over a field, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    a: Vec<Elem>,
}

impl Matrix {
    pub fn from_entries(n: usize, a: Vec<Elem>) -> Self {
        assert_eq!(a.len(), n * n, "matrix entries must be n^2");
        Matrix { n, a }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = vec![Elem::ZERO; n * n];
        for i in 0..n {
            a[i * n + i] = Elem::ONE;
        }
        Matrix { n, a }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Elem] {
        &self.a
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut a = vec![Elem::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] = f.add(a[i * n + j], f.mul(x, other.get(k, j)));
                }
            }
        }
        Matrix { n, a }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut a = vec![Elem::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                a[j * n + i] = self.get(i, j);
            }
        }
        Matrix { n, a }
    }

    pub fn trace(&self, f: &Field) -> Elem {
        (0..self.n).fold(Elem::ZERO, |acc, i| f.add(acc, self.get(i, i)))
    }

    pub fn det(&self, f: &Field) -> Elem {
        det_slice(f, &self.a, self.n)
    }

    pub fn inverse(&self, f: &Field) -> Result<Matrix> {
        let n = self.n;
        let mut m = self.a.clone();
        let mut inv = Matrix::identity(n).a;
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r * n + col].is_zero()).ok_or(Error::DivisionByZero)?;
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
                inv.swap(col * n + j, piv * n + j);
            }
            let s = f.inv(m[col * n + col])?;
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], s);
                inv[col * n + j] = f.mul(inv[col * n + j], s);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let c = m[r * n + col];
                if c.is_zero() {
                    continue;
                }
                for j in 0..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(c, m[col * n + j]));
                    inv[r * n + j] = f.sub(inv[r * n + j], f.mul(c, inv[col * n + j]));
                }
            }
        }
        Ok(Matrix { n, a: inv })
    }

    /// Multiplies row `i` by `c`.
    pub fn scale_row(&mut self, f: &Field, i: usize, c: Elem) {
        for j in 0..self.n {
            self.a[i * self.n + j] = f.mul(self.a[i * self.n + j], c);
        }
    }

    fn pack(&self, q: u64) -> u64 {
        self.a.iter().rev().fold(0u64, |acc, e| acc * q + e.0 as u64)
    }

    fn unpack(mut code: u64, n: usize, q: u64) -> Matrix {
        let mut a = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            a.push(Elem((code % q) as u32));
            code /= q;
        }
        Matrix { n, a }
    }
}

fn det_slice(f: &Field, a: &[Elem], n: usize) -> Elem {
    match n {
        1 => a[0],
        2 => f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2])),
        3 => {
            let m = |x: Elem, y: Elem, z: Elem| f.mul(x, f.mul(y, z));
            let pos = f.add(f.add(m(a[0], a[4], a[8]), m(a[1], a[5], a[6])), m(a[2], a[3], a[7]));
            let neg = f.add(f.add(m(a[2], a[4], a[6]), m(a[0], a[5], a[7])), m(a[1], a[3], a[8]));
            f.sub(pos, neg)
        }
        _ => {
            let mut m = a.to_vec();
            let mut det = Elem::ONE;
            for col in 0..n {
                let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                    return Elem::ZERO;
                };
                if piv != col {
                    for j in 0..n {
                        m.swap(col * n + j, piv * n + j);
                    }
                    det = f.neg(det);
                }
                let d = m[col * n + col];
                det = f.mul(det, d);
                let dinv = f.inv(d).expect("nonzero pivot");
                for r in col + 1..n {
                    let c = f.mul(m[r * n + col], dinv);
                    if c.is_zero() {
                        continue;
                    }
                    for j in col..n {
                        m[r * n + j] = f.sub(m[r * n + j], f.mul(c, m[col * n + j]));
                    }
                }
            }
            det
        }
    }
}

/// Fixed alternating form `J = antidiag(1, ..., 1, -1, ..., -1)` of size `2m`.
pub fn symplectic_form(f: &Field, size: usize) -> Matrix {
    let mut j = Matrix { n: size, a: vec![Elem::ZERO; size * size] };
    for i in 0..size {
        j.a[i * size + (size - 1 - i)] = if i < size / 2 { Elem::ONE } else { f.neg(Elem::ONE) };
    }
    j
}

/// Fixed split symmetric form `antidiag(1, ..., 1)`.
pub fn orthogonal_form(size: usize) -> Matrix {
    let mut b = Matrix { n: size, a: vec![Elem::ZERO; size * size] };
    for i in 0..size {
        b.a[i * size + (size - 1 - i)] = Elem::ONE;
    }
    b
}

fn check_cap(what: &'static str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// All elements of the group, in a deterministic order.
pub fn enumerate_group(spec: &GroupSpec) -> Result<Vec<Matrix>> {
    enumerate_group_with_cap(spec, ENUMERATION_CAP)
}

pub fn enumerate_group_with_cap(spec: &GroupSpec, cap: u128) -> Result<Vec<Matrix>> {
    check_cap("group enumeration", spec.order()?, cap)?;
    let f = spec.field();
    match spec.kind {
        GroupKind::GL | GroupKind::SL => {
            let mut out = Vec::new();
            stream_linear(spec, |m, _| out.push(Matrix::from_entries(spec.dim(), m.to_vec())))?;
            Ok(out)
        }
        GroupKind::Sp => symplectic_closure(spec),
        GroupKind::SOOdd | GroupKind::SOPlus => orthogonal_backtrack(spec),
        GroupKind::Mu => {
            let step = (f.order() - 1) / spec.n as u64;
            Ok((0..spec.n as u64)
                .map(|i| Matrix::from_entries(1, vec![f.exp(i * step)]))
                .collect())
        }
    }
}

/// Calls `visit(entries, det)` for every matrix of GL_n or SL_n.
fn stream_linear(spec: &GroupSpec, mut visit: impl FnMut(&[Elem], Elem)) -> Result<()> {
    let f = spec.field();
    let n = spec.dim();
    let q = f.order();
    let total = (q as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    check_cap("matrix stream", total, STREAM_CAP)?;
    let mut entries = vec![Elem::ZERO; n * n];
    let want_sl = spec.kind == GroupKind::SL;
    for _ in 0..total as u64 {
        let det = det_slice(f, &entries, n);
        if !det.is_zero() && (!want_sl || det == Elem::ONE) {
            visit(&entries, det);
        }
        for e in entries.iter_mut() {
            e.0 += 1;
            if (e.0 as u64) < q {
                break;
            }
            e.0 = 0;
        }
    }
    Ok(())
}

fn symplectic_closure(spec: &GroupSpec) -> Result<Vec<Matrix>> {
    let f = spec.field();
    let size = spec.dim();
    let q = f.order();
    if (q as f64).powi((size * size) as i32) >= u64::MAX as f64 {
        return Err(Error::Unsupported(format!("{} is too large to pack", spec.label())));
    }
    let j = symplectic_form(f, size);
    // Transvections x -> x + c w(v, x) v along e_i and e_i + e_k.
    let mut dirs: Vec<Vec<Elem>> = Vec::new();
    for i in 0..size {
        let mut v = vec![Elem::ZERO; size];
        v[i] = Elem::ONE;
        dirs.push(v.clone());
        for k in i + 1..size {
            let mut w = v.clone();
            w[k] = Elem::ONE;
            dirs.push(w);
        }
    }
    let mut gens = Vec::new();
    for v in &dirs {
        // v^T J as a row vector.
        let vj: Vec<Elem> = (0..size)
            .map(|c| (0..size).fold(Elem::ZERO, |acc, r| f.add(acc, f.mul(v[r], j.get(r, c)))))
            .collect();
        for c in f.nonzero() {
            let mut t = Matrix::identity(size);
            for r in 0..size {
                for s in 0..size {
                    t.a[r * size + s] = f.add(t.a[r * size + s], f.mul(c, f.mul(v[r], vj[s])));
                }
            }
            gens.push(t);
        }
    }
    let order = spec.order()?;
    let id = Matrix::identity(size);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut list = vec![id.pack(q)];
    seen.insert(list[0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let g = Matrix::unpack(list[idx], size, q);
        for t in &gens {
            let h = g.mul(f, t).pack(q);
            if seen.insert(h) {
                list.push(h);
                queue.push_back(list.len() - 1);
            }
        }
        if list.len() as u128 > order {
            return Err(invalid("symplectic closure exceeded the group order"));
        }
    }
    if list.len() as u128 != order {
        return Err(invalid(format!(
            "symplectic closure produced {} elements, expected {order}",
            list.len()
        )));
    }
    Ok(list.into_iter().map(|c| Matrix::unpack(c, size, q)).collect())
}

fn orthogonal_backtrack(spec: &GroupSpec) -> Result<Vec<Matrix>> {
    let f = spec.field();
    let size = spec.dim();
    let q = f.order();
    let b = orthogonal_form(size);
    let vectors: Vec<Vec<Elem>> = (0..(q as u128).pow(size as u32) as u64)
        .map(|mut code| {
            (0..size)
                .map(|_| {
                    let e = Elem((code % q) as u32);
                    code /= q;
                    e
                })
                .collect()
        })
        .collect();
    let form = |x: &[Elem], y: &[Elem]| -> Elem {
        (0..size).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(x[i], y[size - 1 - i])))
    };
    let mut out = Vec::new();
    let mut cols: Vec<usize> = Vec::with_capacity(size);
    fn go(
        cols: &mut Vec<usize>,
        vectors: &[Vec<Elem>],
        size: usize,
        b: &Matrix,
        form: &dyn Fn(&[Elem], &[Elem]) -> Elem,
        f: &Field,
        out: &mut Vec<Matrix>,
    ) {
        let j = cols.len();
        if j == size {
            let mut a = vec![Elem::ZERO; size * size];
            for (c, &vi) in cols.iter().enumerate() {
                for r in 0..size {
                    a[r * size + c] = vectors[vi][r];
                }
            }
            let m = Matrix::from_entries(size, a);
            if m.det(f) == Elem::ONE {
                out.push(m);
            }
            return;
        }
        for (vi, v) in vectors.iter().enumerate() {
            if form(v, v) != b.get(j, j) {
                continue;
            }
            if cols.iter().enumerate().all(|(i, &ci)| form(&vectors[ci], v) == b.get(i, j)) {
                cols.push(vi);
                go(cols, vectors, size, b, form, f, out);
                cols.pop();
            }
        }
    }
    go(&mut cols, &vectors, size, &b, &form, f, &mut out);
    let order = spec.order()?;
    if out.len() as u128 != order {
        return Err(invalid(format!(
            "orthogonal enumeration produced {} elements, expected {order}",
            out.len()
        )));
    }
    Ok(out)
}

/// `hist[t]` = number of group elements with trace `t` (indexed by element index).
pub fn trace_histogram(spec: &GroupSpec) -> Result<Vec<u64>> {
    let f = spec.field();
    let mut hist = vec![0u64; f.size()];
    match spec.kind {
        GroupKind::GL | GroupKind::SL => {
            let n = spec.dim();
            stream_linear(spec, |m, _| {
                let t = (0..n).fold(Elem::ZERO, |acc, i| f.add(acc, m[i * n + i]));
                hist[t.index()] += 1;
            })?;
        }
        _ => {
            for g in enumerate_group_with_cap(spec, ENUMERATION_CAP)? {
                hist[g.trace(f).index()] += 1;
            }
        }
    }
    Ok(hist)
}

/// Conjugacy classes of an enumerated group, as index lists in first-seen order.
pub fn conjugacy_classes(f: &Field, elements: &[Matrix]) -> Result<Vec<Vec<usize>>> {
    let index: HashMap<&Matrix, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let inverses = elements.iter().map(|g| g.inverse(f)).collect::<Result<Vec<_>>>()?;
    let mut class_of = vec![usize::MAX; elements.len()];
    let mut classes = Vec::new();
    for i in 0..elements.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        for (h, hinv) in elements.iter().zip(&inverses) {
            let c = h.mul(f, &elements[i]).mul(f, hinv);
            let k = *index.get(&c).ok_or_else(|| invalid("enumeration is not closed under conjugation"))?;
            if class_of[k] == usize::MAX {
                class_of[k] = id;
                members.push(k);
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    Ok(classes)
}

/// Uniform sampler over a group.
pub struct GroupSampler {
    spec: GroupSpec,
    elements: Option<Vec<Matrix>>,
    zeta: Elem,
}

impl GroupSampler {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let f = spec.field();
        let (elements, zeta) = match spec.kind {
            GroupKind::GL | GroupKind::SL => (None, Elem::ONE),
            GroupKind::Mu => (None, f.exp((f.order() - 1) / spec.n as u64)),
            _ => (Some(enumerate_group(spec)?), Elem::ONE),
        };
        Ok(GroupSampler { spec: spec.clone(), elements, zeta })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        let f = self.spec.field();
        let n = self.spec.dim();
        let q = f.order();
        match self.spec.kind {
            GroupKind::GL | GroupKind::SL => loop {
                let a: Vec<Elem> = (0..n * n).map(|_| Elem(rng.gen_range(0..q) as u32)).collect();
                let mut m = Matrix::from_entries(n, a);
                let det = m.det(f);
                if det.is_zero() {
                    continue;
                }
                if self.spec.kind == GroupKind::SL {
                    m.scale_row(f, 0, f.inv(det).expect("nonzero"));
                }
                return m;
            },
            GroupKind::Mu => {
                let u = rng.gen_range(0..self.spec.n as u64);
                Matrix::from_entries(1, vec![f.pow_u(self.zeta, u)])
            }
            _ => {
                let els = self.elements.as_ref().expect("enumerated");
                els[rng.gen_range(0..els.len())].clone()
            }
        }
    }

    pub fn sample_trace<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        self.sample(rng).trace(self.spec.field())
    }
}
