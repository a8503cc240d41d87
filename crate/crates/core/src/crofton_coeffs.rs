//! Constants of the linear Crofton formula for surface tensors and its
//! inversion: `c_k^(m)`, the normalisers `C_j`, the inverse triangular
//! matrix `d_ij` and the measurement functions `G_s`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::symtensor::{binomial, multi_indices, LinearDirection, SymmetricTensor};

/// Volume of the unit ball in ℝⁿ, by `κ_n = 2π κ_{n-2} / n`.
pub fn kappa(n: usize) -> f64 {
    let mut k = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut i = n % 2;
    while i < n {
        i += 2;
        k *= 2.0 * PI / i as f64;
    }
    k
}

/// Surface area of the unit sphere in ℝⁿ, `ω_n = n κ_n` (so `ω₀ = 0`).
pub fn omega(n: usize) -> f64 {
    n as f64 * kappa(n)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `c_k^(m) = (-1)^k C(m,k) (2k)! ω_{2k+1} / (1 - 2k)`.
pub fn c_coeff(m: usize, k: usize) -> Result<f64> {
    if k > m {
        return Err(Error::OutOfRange(format!("c_k^(m) needs k <= m, got k={k}, m={m}")));
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * binomial(m, k) * factorial(2 * k) * omega(2 * k + 1) / (1.0 - 2.0 * k as f64))
}

/// `C_j = π j! ω_{j+1}² ω_n / (2 ω_{n+j+1})` for even `j`.
pub fn c_normalizer(j: usize, n: usize) -> Result<f64> {
    if j % 2 == 1 {
        return Err(Error::OddRank(j));
    }
    let w = omega(j + 1);
    Ok(PI * factorial(j) * w * w * omega(n) / (2.0 * omega(n + j + 1)))
}

/// Lower-triangular matrix `C` with entries `c_k^(i)`, `0 ≤ k ≤ i ≤ s/2`.
pub fn c_matrix(s: usize) -> Result<Vec<Vec<f64>>> {
    if s % 2 == 1 {
        return Err(Error::OddRank(s));
    }
    let m = s / 2;
    (0..=m)
        .map(|i| (0..=m).map(|k| if k <= i { c_coeff(i, k) } else { Ok(0.0) }).collect())
        .collect()
}

/// Inverse of [`c_matrix`] via `d_ii = 1/c_i^(i)` and
/// `d_ij = -(1/c_i^(i)) Σ_{k=j}^{i-1} c_k^(i) d_kj`.
pub fn d_matrix(s: usize) -> Result<Vec<Vec<f64>>> {
    let c = c_matrix(s)?;
    let m = s / 2;
    let mut d = vec![vec![0.0; m + 1]; m + 1];
    for i in 0..=m {
        d[i][i] = 1.0 / c[i][i];
        for j in 0..i {
            let acc: f64 = (j..i).map(|k| c[i][k] * d[k][j]).sum();
            d[i][j] = -acc / c[i][i];
        }
    }
    Ok(d)
}

/// All constants needed for rank `s` in dimension `n`.
#[derive(Debug, Clone)]
pub struct CroftonTable {
    dim: usize,
    rank: usize,
    c: Vec<Vec<f64>>,
    normalizers: Vec<f64>,
    d: Vec<Vec<f64>>,
}

impl CroftonTable {
    pub fn new(dim: usize, rank: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let c = c_matrix(rank)?;
        let d = d_matrix(rank)?;
        let normalizers = (0..=rank / 2).map(|j| c_normalizer(2 * j, dim)).collect::<Result<_>>()?;
        Ok(Self { dim, rank, c, normalizers, d })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `c_k^(m)` indexed `[m][k]`.
    pub fn c(&self) -> &[Vec<f64>] {
        &self.c
    }

    /// `C_{2j}` indexed by `j`.
    pub fn normalizers(&self) -> &[f64] {
        &self.normalizers
    }

    /// `d_ij` indexed `[i][j]`.
    pub fn d(&self) -> &[Vec<f64>] {
        &self.d
    }

    /// Coefficient of `Q^{m-j} Q(L)^j` in `G_{2m}`.
    pub fn g_weight(&self, j: usize) -> f64 {
        let m = self.rank / 2;
        2.0 * self.d[m][j] * self.normalizers[j] / (factorial(2 * j) * omega(2 * j + 1))
    }

    /// Max deviation of `D·C` from the identity.
    pub fn dc_identity_error(&self) -> f64 {
        let m = self.rank / 2;
        let mut err: f64 = 0.0;
        for i in 0..=m {
            for j in 0..=m {
                let v: f64 = (0..=m).map(|k| self.d[i][k] * self.c[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((v - want).abs());
            }
        }
        err
    }

    /// Right-hand side of the forward Crofton formula: the line-section
    /// integral of rank `s` written through the surface tensors of rank
    /// `0, 2, …, s` (given in that order).
    pub fn forward_combination(&self, surface: &[SymmetricTensor]) -> Result<SymmetricTensor> {
        let (n, s, m) = (self.dim, self.rank, self.rank / 2);
        check_ladder(surface, n, m)?;
        let q = SymmetricTensor::metric(n);
        let ws = omega(s + 1);
        let pre = 2.0 * omega(n + s + 1) / (PI * factorial(s) * ws * ws * omega(n));
        let mut out = SymmetricTensor::zeros(n, s);
        for (k, phi) in surface.iter().enumerate() {
            let term = q.power(m - k).sym_product(phi)?;
            out.add_scaled(pre * self.c[m][k], &term)?;
        }
        Ok(out)
    }

    /// Recovers the rank-`s` surface tensor from the line-section integrals
    /// of rank `0, 2, …, s`: `Σ_j d_{m j} C_{2j} Q^{m-j} I_{2j}`.
    pub fn reconstruct(&self, integrals: &[SymmetricTensor]) -> Result<SymmetricTensor> {
        let (n, m) = (self.dim, self.rank / 2);
        check_ladder(integrals, n, m)?;
        let q = SymmetricTensor::metric(n);
        let mut out = SymmetricTensor::zeros(n, self.rank);
        for (j, int) in integrals.iter().enumerate() {
            let term = q.power(m - j).sym_product(int)?;
            out.add_scaled(self.d[m][j] * self.normalizers[j], &term)?;
        }
        Ok(out)
    }
}

fn check_ladder(ts: &[SymmetricTensor], n: usize, m: usize) -> Result<()> {
    if ts.len() != m + 1 {
        return Err(Error::InvalidArgument(format!("expected {} tensors, got {}", m + 1, ts.len())));
    }
    for (k, t) in ts.iter().enumerate() {
        if t.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.dim() });
        }
        if t.rank() != 2 * k {
            return Err(Error::RankMismatch { expected: 2 * k, found: t.rank() });
        }
    }
    Ok(())
}

/// Reference construction of `G_s(L)` through symmetric products.
pub fn g_s(dir: &LinearDirection, n: usize, s: usize) -> Result<SymmetricTensor> {
    if dir.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dir.dim() });
    }
    let table = CroftonTable::new(n, s)?;
    let m = s / 2;
    let q = SymmetricTensor::metric(n);
    let ql = SymmetricTensor::line_metric(dir);
    let mut out = SymmetricTensor::zeros(n, s);
    for j in 0..=m {
        let term = q.power(m - j).sym_product(&ql.power(j))?;
        out.add_scaled(table.g_weight(j), &term)?;
    }
    Ok(out)
}

/// `G_s` expanded once into a polynomial in the direction coordinates, for
/// fast repeated evaluation inside Monte-Carlo loops.
#[derive(Debug, Clone)]
pub struct MeasurementFunction {
    dim: usize,
    rank: usize,
    /// Per output component: `(coefficient, exponents)` monomials.
    terms: Vec<Vec<(f64, Vec<u32>)>>,
}

impl MeasurementFunction {
    pub fn new(dim: usize, rank: usize) -> Result<Self> {
        let table = CroftonTable::new(dim, rank)?;
        let m = rank / 2;
        let q = SymmetricTensor::metric(dim);
        let q_powers: Vec<SymmetricTensor> = (0..=m).map(|k| q.power(k)).collect();
        let terms = multi_indices(dim, rank)
            .iter()
            .map(|idx| {
                let mut counts = vec![0usize; dim];
                idx.iter().for_each(|&i| counts[i] += 1);
                let mut monos: Vec<(f64, Vec<u32>)> = Vec::new();
                for j in 0..=m {
                    let weight = table.g_weight(j) / binomial(rank, 2 * j);
                    let qp = &q_powers[m - j];
                    sub_multisets(&counts, 2 * j, &mut |sub| {
                        let rest: Vec<usize> = counts.iter().zip(sub).map(|(c, s)| c - s).collect();
                        let mult: f64 = counts.iter().zip(sub).map(|(&c, &s)| binomial(c, s)).product();
                        let rest_idx: Vec<usize> =
                            rest.iter().enumerate().flat_map(|(v, &c)| std::iter::repeat_n(v, c)).collect();
                        let qv = qp.get(&rest_idx).expect("valid index");
                        if qv != 0.0 {
                            let exps: Vec<u32> = sub.iter().map(|&e| e as u32).collect();
                            let coef = weight * mult * qv;
                            match monos.iter_mut().find(|(_, e)| *e == exps) {
                                Some(entry) => entry.0 += coef,
                                None => monos.push((coef, exps)),
                            }
                        }
                    });
                }
                monos
            })
            .collect();
        Ok(Self { dim, rank, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_components(&self) -> usize {
        self.terms.len()
    }

    /// Writes the coefficients of `G_s(span(u))` into `out`.
    pub fn eval_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.dim);
        for (slot, monos) in out.iter_mut().zip(&self.terms) {
            *slot = monos
                .iter()
                .map(|(c, e)| c * e.iter().zip(u).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
                .sum();
        }
    }

    pub fn eval(&self, dir: &LinearDirection) -> SymmetricTensor {
        let mut coeffs = vec![0.0; self.terms.len()];
        self.eval_into(dir.unit(), &mut coeffs);
        SymmetricTensor::from_coeffs(self.dim, self.rank, coeffs).expect("layout")
    }
}

fn sub_multisets(counts: &[usize], size: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(counts: &[usize], k: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == counts.len() {
            if left == 0 {
                f(cur);
            }
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

fn big_binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact value of `C(n - 1/2, j) = Π_{i<j} (2n - 1 - 2i) / (2^j j!)`.
fn half_binomial(n: i64, j: i64) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j {
        num *= BigInt::from(2 * n - 1 - 2 * i);
        den *= BigInt::from(2 * (i + 1));
    }
    BigRational::new(num, den)
}

/// Exact difference between the two sides of the binomial identity
/// `Σ_j (-1)^j C(2n,2j) C(n-j,m-j) / C(n-1/2,j) = C(n,m) / (1-2m)`.
pub fn binomial_identity_residual(n: u32, m: u32) -> BigRational {
    let (n, m) = (n as i64, m as i64);
    let mut lhs = BigRational::zero();
    for j in 0..=m {
        let num = big_binomial(2 * n, 2 * j) * big_binomial(n - j, m - j);
        if num.is_zero() {
            continue;
        }
        let term = BigRational::from_integer(num) / half_binomial(n, j);
        if j % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let rhs = BigRational::new(big_binomial(n, m), BigInt::from(1 - 2 * m));
    lhs - rhs
}

/// Whether the binomial identity holds exactly for `(n, m)`.
pub fn binomial_identity_holds(n: u32, m: u32) -> bool {
    binomial_identity_residual(n, m).is_zero()
}

/// `|Σ_j (-1)^j C(m,j)/(1-2j) - √π Γ(m+1)/Γ(m+1/2)|`. The left side is
/// summed exactly in rationals before rounding, so cancellation in the
/// alternating sum does not leak into the result.
pub fn alternating_sum_check(m: u32) -> f64 {
    let mut lhs = BigRational::zero();
    for j in 0..=m as i64 {
        let term = BigRational::new(big_binomial(m as i64, j), BigInt::from(1 - 2 * j));
        if j % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let lhs = rational_to_f64(&lhs);
    let rhs = (0.5 * PI.ln() + ln_gamma(m as f64 + 1.0) - ln_gamma(m as f64 + 0.5)).exp();
    (lhs - rhs).abs()
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn omega_kappa() {
        assert_relative_eq!(omega(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(omega(2), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(omega(3), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(omega(5), 8.0 * PI * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(kappa(2), PI, max_relative = 1e-14);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_eq!(kappa(0), 1.0);
        for n in 1..20 {
            assert_relative_eq!(omega(n), n as f64 * kappa(n), max_relative = 1e-13);
            // ω_{n+2} = 2π ω_n / n
            assert_relative_eq!(omega(n + 2), 2.0 * PI * omega(n) / n as f64, max_relative = 1e-13);
        }
    }

    #[test]
    fn c_examples() {
        assert_relative_eq!(c_coeff(0, 0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(c_coeff(1, 1).unwrap(), 8.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(c_coeff(2, 2).unwrap(), -64.0 * PI * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(c_coeff(2, 1).unwrap(), 16.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(c_coeff(2, 0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(c_coeff(1, 2).is_err());
    }

    #[test]
    fn c_signs_alternate_and_diagonal_nonzero() {
        for m in 0..=10 {
            for k in 0..=m {
                let c = c_coeff(m, k).unwrap();
                // (-1)^k / (1 - 2k) is positive for k = 0, 1 and then alternates
                let expect_positive = k <= 1 || k % 2 == 1;
                assert_eq!(c > 0.0, expect_positive, "m={m} k={k}");
            }
            assert!(c_coeff(m, m).unwrap() != 0.0);
        }
    }

    #[test]
    fn normalizer_examples() {
        for n in 1..6 {
            let w = omega(n);
            assert_relative_eq!(c_normalizer(0, n).unwrap(), 2.0 * PI * w / omega(n + 1), max_relative = 1e-13);
            assert_relative_eq!(
                c_normalizer(2, n).unwrap(),
                16.0 * PI.powi(3) * w / omega(n + 3),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                c_normalizer(4, n).unwrap(),
                256.0 * PI.powi(5) * w / (3.0 * omega(n + 5)),
                max_relative = 1e-13
            );
        }
        assert_eq!(c_normalizer(3, 2), Err(Error::OddRank(3)));
    }

    #[test]
    fn d_examples() {
        let d = d_matrix(4).unwrap();
        assert_relative_eq!(d[0][0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(d[1][0], -1.0 / (8.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(d[1][1], 1.0 / (8.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(d[2][0], -3.0 / (64.0 * PI * PI), max_relative = 1e-13);
        assert_relative_eq!(d[2][1], 3.0 / (32.0 * PI * PI), max_relative = 1e-13);
        assert_relative_eq!(d[2][2], -3.0 / (64.0 * PI * PI), max_relative = 1e-13);
    }

    #[test]
    fn dc_identity_up_to_rank_20() {
        for s in (0..=20).step_by(2) {
            let t = CroftonTable::new(3, s).unwrap();
            assert!(t.dc_identity_error() <= 1e-10, "s={s}: {}", t.dc_identity_error());
            for i in 0..=s / 2 {
                assert_eq!(t.d()[i][i], 1.0 / t.c()[i][i]);
            }
        }
    }

    #[test]
    fn g0_and_g2_closed_forms() {
        for n in 2..=4 {
            let u: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5).sin()).collect();
            let dir = LinearDirection::new(&u).unwrap();
            let g0 = g_s(&dir, n, 0).unwrap();
            assert_relative_eq!(g0.coeffs()[0], PI * omega(n) / omega(n + 1), max_relative = 1e-13);
            assert_relative_eq!(g0.coeffs()[0], c_normalizer(0, n).unwrap() / 2.0, max_relative = 1e-13);

            let q = SymmetricTensor::metric(n);
            let want = SymmetricTensor::line_metric(&dir)
                .scale((n + 1) as f64)
                .sub(&q)
                .unwrap()
                .scale(omega(n) / (4.0 * omega(n + 1)));
            let g2 = g_s(&dir, n, 2).unwrap();
            assert!(g2.max_abs_diff(&want).unwrap() < 1e-14);
            assert_relative_eq!(g2.trace().unwrap(), omega(n) / (4.0 * omega(n + 1)), max_relative = 1e-12);
        }
        let g2 = g_s(&LinearDirection::axis(2, 0), 2, 2).unwrap();
        assert_abs_diff_eq!(g2.get(&[0, 0]).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g2.get(&[0, 1]).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g2.get(&[1, 1]).unwrap(), -0.125, epsilon = 1e-15);
        assert!(g_s(&LinearDirection::axis(2, 0), 2, 3).is_err());
    }

    #[test]
    fn g4_follows_recursion() {
        // G_4 = -(ω_n/(32π ω_{n+1})) (3Q² - 6(n+1) Q Q(L) + (n+1)(n+3) Q(L)²)
        for n in 2..=3 {
            let dir = LinearDirection::new(&vec![1.0; n]).unwrap();
            let q = SymmetricTensor::metric(n);
            let ql = SymmetricTensor::line_metric(&dir);
            let nf = n as f64;
            let mut want = q.power(2).scale(3.0);
            want.add_scaled(-6.0 * (nf + 1.0), &q.sym_product(&ql).unwrap()).unwrap();
            want.add_scaled((nf + 1.0) * (nf + 3.0), &ql.power(2)).unwrap();
            let want = want.scale(-omega(n) / (32.0 * PI * omega(n + 1)));
            let got = g_s(&dir, n, 4).unwrap();
            assert!(got.max_abs_diff(&want).unwrap() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn measurement_function_matches_reference() {
        for n in 2..=3 {
            for s in [0, 2, 4, 6] {
                let mf = MeasurementFunction::new(n, s).unwrap();
                for seed in 0..5 {
                    let u: Vec<f64> = (0..n).map(|i| ((seed * 7 + i * 3) as f64 * 0.37).cos()).collect();
                    let dir = LinearDirection::new(&u).unwrap();
                    let fast = mf.eval(&dir);
                    let slow = g_s(&dir, n, s).unwrap();
                    assert!(fast.max_abs_diff(&slow).unwrap() < 1e-13, "n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn binomial_identity_examples() {
        assert!(binomial_identity_residual(0, 0).is_zero());
        assert!(binomial_identity_residual(2, 1).is_zero());
        assert!(binomial_identity_residual(15, 7).is_zero());
    }

    #[test]
    fn alternating_sum_examples() {
        assert!(alternating_sum_check(0) < 1e-14);
        assert!(alternating_sum_check(1) < 1e-14);
        assert!(alternating_sum_check(10) < 1e-10);
    }
}
