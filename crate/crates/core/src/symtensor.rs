//! Dense symmetric tensors over ℝⁿ.
//!
//! A rank-`p` tensor is stored as one coefficient per sorted multi-index
//! `i₁ ≤ … ≤ i_p`, in lexicographic order. The stored value is the tensor
//! evaluated on the basis vectors `(e_{i₁}, …, e_{i_p})`; symmetry makes the
//! argument order irrelevant. Products are symmetrised, so `e₁e₂` evaluated
//! at `(e₁, e₂)` is `1/2`.

use crate::error::{Error, Result};

/// Positive definiteness threshold on the smallest eigenvalue.
pub const POSDEF_EPS: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// `C(n, k)` as `f64`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of independent components of a symmetric rank-`p` tensor on ℝⁿ.
pub fn num_components(dim: usize, rank: usize) -> usize {
    if dim == 0 {
        return usize::from(rank == 0);
    }
    binomial(dim + rank - 1, rank) as usize
}

/// All sorted multi-indices (0-based) of length `rank` over `0..dim`, in
/// lexicographic order.
pub fn multi_indices(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(num_components(dim, rank));
    let mut cur = Vec::with_capacity(rank);
    fn rec(dim: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for v in start..dim {
            cur.push(v);
            rec(dim, rank, v, cur, out);
            cur.pop();
        }
    }
    rec(dim, rank, 0, &mut cur, &mut out);
    out
}

/// Position of a sorted multi-index in the lexicographic layout.
fn position_sorted(dim: usize, sorted: &[usize]) -> usize {
    let p = sorted.len();
    let mut pos = 0usize;
    let mut prev = 0usize;
    for (k, &ik) in sorted.iter().enumerate() {
        let rest = p - k - 1;
        for v in prev..ik {
            // multisets of size `rest` over values v..dim
            pos += num_components(dim - v, rest);
        }
        prev = ik;
    }
    pos
}

fn counts_to_sorted(counts: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for (v, &c) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(v, c));
    }
    out
}

fn sorted_to_counts(dim: usize, sorted: &[usize]) -> Vec<usize> {
    let mut c = vec![0; dim];
    for &i in sorted {
        c[i] += 1;
    }
    c
}

fn position_counts(counts: &[usize]) -> usize {
    position_sorted(counts.len(), &counts_to_sorted(counts))
}

/// Enumerates sub-multisets of `counts` with total size `size`, calling `f`
/// with the sub-multiset counts.
fn for_each_submultiset(counts: &[usize], size: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(counts: &[usize], k: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == counts.len() {
            if left == 0 {
                f(cur);
            }
            return;
        }
        let cap: usize = counts[k..].iter().sum();
        if cap < left {
            return;
        }
        for j in 0..=counts[k].min(left) {
            cur[k] = j;
            rec(counts, k + 1, left - j, cur, f);
        }
        cur[k] = 0;
    }
    let mut cur = vec![0; counts.len()];
    rec(counts, 0, size, &mut cur, f);
}

/// Multinomial coefficient `p! / Π mₖ!`: how many index tuples sort to a
/// given multi-index.
fn multiplicity(counts: &[usize]) -> f64 {
    let mut left: usize = counts.iter().sum();
    let mut acc = 1.0;
    for &c in counts {
        acc *= binomial(left, c);
        left -= c;
    }
    acc
}

/// A symmetric tensor of rank `p` over ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    dim: usize,
    rank: usize,
    coeffs: Vec<f64>,
}

impl SymmetricTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self { dim, rank, coeffs: vec![0.0; num_components(dim, rank)] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Self { dim, rank: 0, coeffs: vec![value] }
    }

    /// Builds a tensor from coefficients in the lexicographic layout.
    pub fn from_coeffs(dim: usize, rank: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = num_components(dim, rank);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(Self { dim, rank, coeffs })
    }

    /// The rank-1 tensor `z ↦ ⟨z, x⟩`.
    pub fn from_vector(x: &[f64]) -> Self {
        Self { dim: x.len(), rank: 1, coeffs: x.to_vec() }
    }

    /// The `p`-fold symmetric power `xᵖ`, whose coefficients are plain
    /// monomials `x_{i₁}⋯x_{i_p}`.
    pub fn vector_power(x: &[f64], p: usize) -> Self {
        let coeffs = multi_indices(x.len(), p)
            .iter()
            .map(|idx| idx.iter().map(|&i| x[i]).product())
            .collect();
        Self { dim: x.len(), rank: p, coeffs }
    }

    /// The metric tensor `Q(x, y) = ⟨x, y⟩`.
    pub fn metric(dim: usize) -> Self {
        let coeffs = multi_indices(dim, 2)
            .iter()
            .map(|idx| if idx[0] == idx[1] { 1.0 } else { 0.0 })
            .collect();
        Self { dim, rank: 2, coeffs }
    }

    /// `Q(L)(x, y) = ⟨x, u⟩⟨y, u⟩` for the line `L = span(u)`.
    pub fn line_metric(dir: &LinearDirection) -> Self {
        Self::vector_power(dir.unit(), 2)
    }

    /// Symmetric rank-2 tensor from a square matrix (upper triangle read).
    pub fn from_matrix(m: &[Vec<f64>]) -> Result<Self> {
        let dim = m.len();
        if m.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        let coeffs = multi_indices(dim, 2).iter().map(|idx| m[idx[0]][idx[1]]).collect();
        Ok(Self { dim, rank: 2, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn multi_indices(&self) -> Vec<Vec<usize>> {
        multi_indices(self.dim, self.rank)
    }

    fn check_index(&self, index: &[usize]) -> Result<Vec<usize>> {
        if index.len() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: index.len() });
        }
        if let Some(&bad) = index.iter().find(|&&i| i >= self.dim) {
            return Err(Error::OutOfRange(format!("index {bad} for dimension {}", self.dim)));
        }
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        Ok(sorted)
    }

    /// Component at a (0-based, any order) index tuple.
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        let sorted = self.check_index(index)?;
        Ok(self.coeffs[position_sorted(self.dim, &sorted)])
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let sorted = self.check_index(index)?;
        let pos = position_sorted(self.dim, &sorted);
        self.coeffs[pos] = value;
        Ok(())
    }

    /// Evaluates the multilinear form on `rank` vectors.
    pub fn evaluate(&self, args: &[&[f64]]) -> Result<f64> {
        if args.len() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.len() });
        }
        let mut counts = vec![0usize; self.dim];
        Ok(self.eval_rec(args, 0, 1.0, &mut counts))
    }

    fn eval_rec(&self, args: &[&[f64]], k: usize, weight: f64, counts: &mut [usize]) -> f64 {
        if k == args.len() {
            return weight * self.coeffs[position_counts(counts)];
        }
        let mut acc = 0.0;
        for j in 0..self.dim {
            let x = args[k][j];
            if x == 0.0 {
                continue;
            }
            counts[j] += 1;
            acc += self.eval_rec(args, k + 1, weight * x, counts);
            counts[j] -= 1;
        }
        acc
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs, ..*self })
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect(), ..*self }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Symmetric tensor product; rank adds.
    pub fn sym_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (p, q) = (self.rank, other.rank);
        let norm = binomial(p + q, p);
        let coeffs = multi_indices(self.dim, p + q)
            .iter()
            .map(|idx| {
                let counts = sorted_to_counts(self.dim, idx);
                let mut acc = 0.0;
                for_each_submultiset(&counts, p, &mut |sub| {
                    let rest: Vec<usize> = counts.iter().zip(sub).map(|(c, s)| c - s).collect();
                    let w: f64 = counts.iter().zip(sub).map(|(&c, &s)| binomial(c, s)).product();
                    acc += w * self.coeffs[position_counts(sub)] * other.coeffs[position_counts(&rest)];
                });
                acc / norm
            })
            .collect();
        Ok(Self { dim: self.dim, rank: p + q, coeffs })
    }

    /// `k`-fold symmetric power; `t⁰` is the scalar one.
    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::scalar(self.dim, 1.0);
        for _ in 0..k {
            acc = acc.sym_product(self).expect("same dimension");
        }
        acc
    }

    /// Full contraction `Σ_{i₁…i_p} a_{i₁…i_p} b_{i₁…i_p}` over all index
    /// tuples (rotation invariant inner product).
    pub fn full_contraction(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .multi_indices()
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .map(|(idx, (a, b))| multiplicity(&sorted_to_counts(self.dim, idx)) * a * b)
            .sum())
    }

    /// Image under the rotation `ρ`: `(ρT)(x₁,…) = T(ρᵀx₁,…)`.
    /// `rotation` is given row-major.
    pub fn rotated(&self, rotation: &[Vec<f64>]) -> Result<Self> {
        if rotation.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rotation.len() });
        }
        let coeffs = self
            .multi_indices()
            .iter()
            .map(|idx| {
                let args: Vec<&[f64]> = idx.iter().map(|&i| rotation[i].as_slice()).collect();
                self.evaluate(&args)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeffs, ..*self })
    }

    fn require_rank2(&self) -> Result<()> {
        if self.rank != 2 {
            return Err(Error::RankMismatch { expected: 2, found: self.rank });
        }
        Ok(())
    }

    /// Matrix `{t(e_i, e_j)}` of a rank-2 tensor.
    pub fn to_matrix(&self) -> Result<Vec<Vec<f64>>> {
        self.require_rank2()?;
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for (idx, &c) in self.multi_indices().iter().zip(&self.coeffs) {
            m[idx[0]][idx[1]] = c;
            m[idx[1]][idx[0]] = c;
        }
        Ok(m)
    }

    pub fn trace(&self) -> Result<f64> {
        let m = self.to_matrix()?;
        Ok((0..self.dim).map(|i| m[i][i]).sum())
    }

    /// Ascending eigenvalues of the matrix form of a rank-2 tensor.
    pub fn rank2_spectrum(&self) -> Result<Vec<f64>> {
        Ok(jacobi_eigenvalues(self.to_matrix()?))
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        let spec = self.rank2_spectrum()?;
        Ok(spec.first().is_some_and(|&l| l > POSDEF_EPS))
    }

    /// CSV rows `i-j-…,coefficient` with 1-based indices and 17 significant
    /// digits.
    pub fn to_csv_rows(&self) -> Vec<String> {
        self.multi_indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(idx, c)| {
                let key = if idx.is_empty() {
                    "0".to_string()
                } else {
                    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("-")
                };
                format!("{key},{}", fmt17(*c))
            })
            .collect()
    }
}

/// Formats with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Returns the
/// eigenvalues in ascending order.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// A line through the origin, represented by a unit vector whose first
/// non-zero coordinate is positive (`u` and `-u` are identified).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDirection {
    unit: Vec<f64>,
}

impl LinearDirection {
    pub fn new(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::Degenerate("direction vector has zero length".into()));
        }
        let mut unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
        if let Some(&first) = unit.iter().find(|&&x| x != 0.0) {
            if first < 0.0 {
                unit.iter_mut().for_each(|x| *x = -*x);
            }
        }
        Ok(Self { unit })
    }

    /// The planar direction `(cos φ, sin φ)`.
    pub fn from_angle(phi: f64) -> Self {
        Self::new(&[phi.cos(), phi.sin()]).expect("unit vector")
    }

    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self { unit: v }
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn layout_matches_enumeration() {
        for dim in 1..=4 {
            for rank in 0..=5 {
                let all = multi_indices(dim, rank);
                assert_eq!(all.len(), num_components(dim, rank));
                for (pos, idx) in all.iter().enumerate() {
                    assert_eq!(position_sorted(dim, idx), pos);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let q = SymmetricTensor::metric(2);
        let qq = q.sym_product(&q).unwrap();
        assert_abs_diff_eq!(qq.get(&[0, 0, 0, 0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(qq.get(&[0, 0, 1, 1]).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.power(2).get(&[0, 1, 0, 1]).unwrap(), 1.0 / 3.0, epsilon = 1e-15);

        let x = SymmetricTensor::from_vector(&[1.0, 0.0]);
        let y = SymmetricTensor::from_vector(&[0.0, 1.0]);
        assert_abs_diff_eq!(x.sym_product(&y).unwrap().get(&[0, 1]).unwrap(), 0.5, epsilon = 1e-15);

        let u2 = SymmetricTensor::vector_power(&[S, S], 2);
        assert_abs_diff_eq!(u2.get(&[0, 1]).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn power_zero_and_one() {
        let q = SymmetricTensor::metric(3);
        assert_eq!(q.power(0), SymmetricTensor::scalar(3, 1.0));
        assert_eq!(q.power(1), q);
    }

    #[test]
    fn metric_examples() {
        let q2 = SymmetricTensor::metric(2);
        assert_eq!(q2.evaluate(&[&[1.0, 0.0], &[1.0, 0.0]]).unwrap(), 1.0);
        let q3 = SymmetricTensor::metric(3);
        assert_eq!(q3.evaluate(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap(), 0.0);
        assert_eq!(q3.evaluate(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]).unwrap(), 32.0);
    }

    #[test]
    fn line_metric_examples() {
        let e1 = LinearDirection::axis(2, 0);
        let l = SymmetricTensor::line_metric(&e1);
        assert_eq!(l.get(&[0, 0]).unwrap(), 1.0);
        assert_eq!(l.get(&[1, 1]).unwrap(), 0.0);
        let d = LinearDirection::new(&[1.0, 1.0]).unwrap();
        let l = SymmetricTensor::line_metric(&d);
        assert_abs_diff_eq!(l.get(&[0, 1]).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.trace().unwrap(), 1.0, epsilon = 1e-15);
        let neg = LinearDirection::new(&[-1.0, -1.0]).unwrap();
        assert_eq!(SymmetricTensor::line_metric(&neg), l);
    }

    #[test]
    fn spectrum_examples() {
        let u = LinearDirection::new(&[0.3, -0.4, 0.8]).unwrap();
        let t = SymmetricTensor::line_metric(&u).scale(4.0).sub(&SymmetricTensor::metric(3)).unwrap();
        let spec = t.rank2_spectrum().unwrap();
        for (got, want) in spec.iter().zip([-1.0, -1.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(SymmetricTensor::metric(2).rank2_spectrum().unwrap(), vec![1.0, 1.0]);
        let l = SymmetricTensor::line_metric(&LinearDirection::axis(2, 0));
        assert_eq!(l.rank2_spectrum().unwrap(), vec![0.0, 1.0]);
        assert!(!l.is_positive_definite().unwrap());
        assert!(SymmetricTensor::metric(2).is_positive_definite().unwrap());
    }

    #[test]
    fn errors() {
        let a = SymmetricTensor::metric(2);
        let b = SymmetricTensor::metric(3);
        assert!(matches!(a.sym_product(&b), Err(Error::DimensionMismatch { .. })));
        let v = SymmetricTensor::from_vector(&[1.0, 2.0]);
        assert!(matches!(v.rank2_spectrum(), Err(Error::RankMismatch { .. })));
        assert!(LinearDirection::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn csv_rows() {
        let rows = SymmetricTensor::metric(2).to_csv_rows();
        assert_eq!(rows[0], "1-1,1.0000000000000000e0");
        assert_eq!(rows[1], "1-2,0.0000000000000000e0");
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn rotation_of_metric_is_metric() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = vec![vec![c, -s], vec![s, c]];
        let q = SymmetricTensor::metric(2).power(2);
        assert!(q.rotated(&r).unwrap().max_abs_diff(&q).unwrap() < 1e-14);
    }
}
