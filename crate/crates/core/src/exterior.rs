//! Exterior algebra on `R^d` with coefficient storage in lexicographic order.
//!
//! A `p`-form is stored as the dense vector of its coefficients `A_J` over the
//! increasing `p`-tuples `J`, enumerated lexicographically by
//! [`enumerate_subsets`]. Axes are 0-based; in time-dependent models axis 0 is
//! time.
//!
//! Linear maps act by pullback, `M^* dy_I = sum_J M(I, J) dy_J`, where
//! `M(I, J)` is the minor with rows `I` and columns `J`. By Cauchy-Binet this
//! composes contravariantly: `(M1 M2)^* = M2^* . M1^*`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sign carried by a reordered tuple. `Zero` marks a repeated index, whose
/// wedge product vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Zero,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::Zero => 0.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
            Parity::Zero => 0,
        }
    }

    fn from_inversions(count: usize) -> Self {
        if count % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// An ordered tuple of axis indices. Canonical tuples are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0.contains(&axis)
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// The tuple `(axis, k_1, ..., k_{p-1})`.
    pub fn prepend(&self, axis: usize) -> MultiIndex {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(axis);
        v.extend_from_slice(&self.0);
        MultiIndex(v)
    }

    /// Canonical tuple with `axis` inserted at its sorted position.
    pub fn insert_sorted(&self, axis: usize) -> MultiIndex {
        let pos = self.0.partition_point(|&k| k < axis);
        let mut v = self.0.clone();
        v.insert(pos, axis);
        MultiIndex(v)
    }

    /// Canonical tuple with `axis` removed.
    pub fn without(&self, axis: usize) -> MultiIndex {
        MultiIndex(self.0.iter().copied().filter(|&k| k != axis).collect())
    }

    /// Compact label such as `A013` used by expression densities and CSV headers.
    pub fn label(&self) -> String {
        let mut s = String::from("A");
        for k in &self.0 {
            s.push_str(&k.to_string());
        }
        s
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (n, k) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Sorts `raw` and returns the signature of the sorting permutation, or
/// [`Parity::Zero`] when an index repeats.
pub fn canonicalize(raw: &[usize], dim: usize) -> Result<(MultiIndex, Parity)> {
    if let Some(&index) = raw.iter().find(|&&k| k >= dim) {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    let mut inversions = 0usize;
    let mut repeated = false;
    for a in 0..raw.len() {
        for b in a + 1..raw.len() {
            match raw[a].cmp(&raw[b]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => repeated = true,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = raw.to_vec();
    sorted.sort_unstable();
    let parity = if repeated {
        Parity::Zero
    } else {
        Parity::from_inversions(inversions)
    };
    Ok((MultiIndex(sorted), parity))
}

/// `(-1)^q` where `q` counts the entries of `k` strictly between `i` and `j`.
pub fn between_sign(i: usize, j: usize, k: &MultiIndex) -> Result<f64> {
    if i == j || k.contains(i) || k.contains(j) {
        return Err(Error::BetweenSign { i, j });
    }
    Ok(between_sign_unchecked(i, j, k.entries()))
}

pub(crate) fn between_sign_unchecked(i: usize, j: usize, k: &[usize]) -> f64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let q = k.iter().filter(|&&x| lo < x && x < hi).count();
    if q % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All increasing `p`-tuples of `0..d` in lexicographic order. This order is
/// the coefficient storage order everywhere in the crate.
pub fn enumerate_subsets(dim: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(dim, degree));
    if degree > dim {
        return out;
    }
    let mut current: Vec<usize> = (0..degree).collect();
    loop {
        out.push(MultiIndex(current.clone()));
        // advance to the next combination
        let mut pos = degree;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if current[pos] < dim - degree + pos {
                current[pos] += 1;
                for q in pos + 1..degree {
                    current[q] = current[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of a canonical tuple in the lexicographic enumeration.
pub fn subset_rank(dim: usize, entries: &[usize]) -> usize {
    let p = entries.len();
    let mut rank = 0;
    let mut start = 0;
    for (pos, &c) in entries.iter().enumerate() {
        for skipped in start..c {
            rank += binomial(dim - 1 - skipped, p - 1 - pos);
        }
        start = c + 1;
    }
    rank
}

/// Pointwise value of a `p`-form on `R^d`, plus the entropy scalar when the
/// model carries one.
#[derive(Clone, Debug, PartialEq)]
pub struct PFormValue {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
    entropy: Option<f64>,
}

impl PFormValue {
    pub fn zeros(dim: usize, degree: usize) -> Self {
        PFormValue {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
            entropy: None,
        }
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > dim {
            return Err(Error::InvalidLayout { d: dim, p: degree });
        }
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(PFormValue {
            dim,
            degree,
            coeffs,
            entropy: None,
        })
    }

    pub fn with_entropy(mut self, s: f64) -> Self {
        self.entropy = Some(s);
        self
    }

    pub fn set_entropy(&mut self, s: Option<f64>) {
        self.entropy = s;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn entropy(&self) -> Option<f64> {
        self.entropy
    }

    /// Entropy, or 0 for entropy-free states.
    pub fn s(&self) -> f64 {
        self.entropy.unwrap_or(0.0)
    }

    /// Coefficient `A_H` for an arbitrary tuple `H`: `eps(sigma) A_J`, and 0 on repeats.
    pub fn get(&self, raw: &[usize]) -> Result<f64> {
        if raw.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: raw.len(),
            });
        }
        let (canon, parity) = canonicalize(raw, self.dim)?;
        if parity == Parity::Zero {
            return Ok(0.0);
        }
        Ok(parity.sign() * self.coeffs[subset_rank(self.dim, canon.entries())])
    }

    /// Sets `A_H = value`, i.e. stores `eps(sigma) value` at the canonical slot.
    pub fn set(&mut self, raw: &[usize], value: f64) -> Result<()> {
        if raw.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: raw.len(),
            });
        }
        let (canon, parity) = canonicalize(raw, self.dim)?;
        if parity == Parity::Zero {
            return Err(Error::Input(format!(
                "tuple {canon} repeats an index; its coefficient is identically zero"
            )));
        }
        let slot = subset_rank(self.dim, canon.entries());
        self.coeffs[slot] = parity.sign() * value;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= factor);
        out
    }

    pub fn plus(&self, other: &PFormValue) -> Result<Self> {
        self.check_layout(other.dim, other.degree)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub(crate) fn check_layout(&self, dim: usize, degree: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim,
            });
        }
        if self.degree != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                got: self.degree,
            });
        }
        Ok(())
    }
}

/// A linear map of `R^d`, acting on forms by pullback.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap(pub DMatrix<f64>);

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        LinearMap(DMatrix::identity(dim, dim))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Self {
        LinearMap(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `exp(t N)`.
    pub fn exp_of(generator: &DMatrix<f64>, t: f64) -> Self {
        LinearMap((generator * t).exp())
    }

    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap(&self.0 * &other.0)
    }
}

/// Determinant of the submatrix of `m` with rows `rows` and columns `cols`.
pub fn minor(m: &LinearMap, rows: &MultiIndex, cols: &MultiIndex) -> Result<f64> {
    if rows.degree() != cols.degree() {
        return Err(Error::DegreeMismatch {
            expected: rows.degree(),
            got: cols.degree(),
        });
    }
    let d = m.dim();
    if let Some(&index) = rows.entries().iter().chain(cols.entries()).find(|&&k| k >= d) {
        return Err(Error::IndexOutOfRange { index, dim: d });
    }
    Ok(minor_unchecked(m.matrix(), rows.entries(), cols.entries()))
}

pub(crate) fn minor_unchecked(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let n = rows.len();
    let mut buf = [0.0f64; 64];
    let mut heap;
    let sub: &mut [f64] = if n * n <= buf.len() {
        &mut buf[..n * n]
    } else {
        heap = vec![0.0; n * n];
        &mut heap
    };
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            sub[a * n + b] = m[(r, c)];
        }
    }
    determinant(sub, n)
}

/// Determinant of a row-major `n x n` matrix. Cofactor expansion up to 4x4,
/// partial-pivot elimination above. The buffer is clobbered.
pub(crate) fn determinant(a: &mut [f64], n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        4 => {
            let s0 = a[0] * a[5] - a[1] * a[4];
            let s1 = a[0] * a[6] - a[2] * a[4];
            let s2 = a[0] * a[7] - a[3] * a[4];
            let s3 = a[1] * a[6] - a[2] * a[5];
            let s4 = a[1] * a[7] - a[3] * a[5];
            let s5 = a[2] * a[7] - a[3] * a[6];
            let c5 = a[10] * a[15] - a[11] * a[14];
            let c4 = a[9] * a[15] - a[11] * a[13];
            let c3 = a[9] * a[14] - a[10] * a[13];
            let c2 = a[8] * a[15] - a[11] * a[12];
            let c1 = a[8] * a[14] - a[10] * a[12];
            let c0 = a[8] * a[13] - a[9] * a[12];
            s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
        }
        _ => {
            let mut det = 1.0;
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                    .unwrap_or(col);
                if a[pivot * n + col] == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    for k in 0..n {
                        a.swap(pivot * n + k, col * n + k);
                    }
                    det = -det;
                }
                let p = a[col * n + col];
                det *= p;
                for r in col + 1..n {
                    let f = a[r * n + col] / p;
                    if f != 0.0 {
                        for k in col..n {
                            a[r * n + k] -= f * a[col * n + k];
                        }
                    }
                }
            }
            det
        }
    }
}

/// The `p`-th compound matrix `C[I][J] = M(I, J)` in storage order.
pub fn compound_matrix(m: &LinearMap, degree: usize) -> DMatrix<f64> {
    let subsets = enumerate_subsets(m.dim(), degree);
    let n = subsets.len();
    DMatrix::from_fn(n, n, |r, c| {
        minor_unchecked(m.matrix(), subsets[r].entries(), subsets[c].entries())
    })
}

/// Pullback `M^* alpha`: `B_J = sum_I A_I M(I, J)`. Entropy passes through.
pub fn pullback(m: &LinearMap, alpha: &PFormValue) -> Result<PFormValue> {
    if m.dim() != alpha.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: alpha.dim(),
        });
    }
    let subsets = enumerate_subsets(alpha.dim(), alpha.degree());
    let mut out = PFormValue::zeros(alpha.dim(), alpha.degree());
    out.entropy = alpha.entropy;
    for (ri, i_set) in subsets.iter().enumerate() {
        let a = alpha.coeffs[ri];
        if a == 0.0 {
            continue;
        }
        for (rj, j_set) in subsets.iter().enumerate() {
            out.coeffs[rj] += a * minor_unchecked(m.matrix(), i_set.entries(), j_set.entries());
        }
    }
    Ok(out)
}

/// First-order coefficient of `t -> (exp(tN))^* alpha` at `t = 0`:
/// `B_J = sum_{K subset J} sum_{i not in K} (-1)^q n_ij A_{K+i}` with `{j} = J \ K`.
pub fn infinitesimal_pullback(n: &DMatrix<f64>, alpha: &PFormValue) -> Result<PFormValue> {
    let d = alpha.dim();
    if n.nrows() != d || n.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: n.nrows(),
        });
    }
    let subsets = enumerate_subsets(d, alpha.degree());
    let mut out = PFormValue::zeros(d, alpha.degree());
    out.entropy = alpha.entropy;
    for (rj, j_set) in subsets.iter().enumerate() {
        let mut acc = 0.0;
        for &j in j_set.entries() {
            let k_set = j_set.without(j);
            for i in 0..d {
                if k_set.contains(i) {
                    continue;
                }
                let i_set = k_set.insert_sorted(i);
                let a = alpha.coeffs[subset_rank(d, i_set.entries())];
                let sign = if i == j {
                    1.0
                } else {
                    between_sign_unchecked(i, j, k_set.entries())
                };
                acc += sign * n[(i, j)] * a;
            }
        }
        out.coeffs[rj] = acc;
    }
    Ok(out)
}

/// Pfaffian of a 2-form on `R^4`, taken in the `(x1, x2, x3, t)` orientation.
///
/// With `A_{j0} = E_j` and `A_{ij} = eps(ijk) B_k` this equals `E . B`. In the
/// storage orientation `(t, x1, x2, x3)` the Pfaffian has the opposite sign,
/// since moving the time axis last is an odd permutation.
pub fn pfaffian_2form(alpha: &PFormValue) -> Result<f64> {
    alpha.check_layout(4, 2)?;
    let a = alpha.coeffs();
    // storage order: 01, 02, 03, 12, 13, 23
    let storage_orientation = a[0] * a[5] - a[1] * a[4] + a[2] * a[3];
    Ok(-storage_orientation)
}
