//! Truncated power series over the rationals and series solutions of
//! logarithmic first-order systems `theta w = A(z) w (+ inhomogeneity)`.
//!
//! Each series stores exactly `order` coefficients. Operations that lose
//! information (differentiation) lower `valid`, the number of leading
//! coefficients that are still exact; reading past it is an error.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{RatFunc, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
    valid: usize,
}

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Rational::zero(); order],
            valid: order,
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The series `z`.
    pub fn var(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    /// Pads with zeros or truncates to exactly `order` coefficients.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order, Rational::zero());
        PowerSeries {
            coeffs,
            valid: order,
        }
    }

    /// Taylor expansion at `z = 0` of a rational function regular there.
    pub fn from_ratfunc(f: &RatFunc, order: usize) -> Result<Self> {
        let num = Self::from_coeffs(f.num().coeffs().to_vec(), order);
        let den = Self::from_coeffs(f.den().coeffs().to_vec(), order);
        if den.coeffs.first().is_none_or(Zero::is_zero) {
            return Err(Error::PoleAtOrigin);
        }
        Ok(num.mul(&den.reciprocal()?))
    }

    /// Number of stored coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Number of leading coefficients that are exact.
    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn coeff(&self, i: usize) -> Result<&Rational> {
        if i >= self.valid {
            return Err(Error::OrderExhausted {
                requested: i,
                valid: self.valid,
            });
        }
        Ok(&self.coeffs[i])
    }

    /// The exact coefficients.
    pub fn valid_coeffs(&self) -> &[Rational] {
        &self.coeffs[..self.valid]
    }

    /// Same series with `valid` capped at `valid`.
    pub fn truncated(&self, valid: usize) -> Self {
        let mut s = self.clone();
        s.valid = s.valid.min(valid);
        for c in &mut s.coeffs[s.valid..] {
            *c = Rational::zero();
        }
        s
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "series orders must match");
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        self.check_order(other);
        let valid = self.valid.min(other.valid);
        let mut coeffs: Vec<Rational> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect();
        for c in &mut coeffs[valid..] {
            *c = Rational::zero();
        }
        PowerSeries { coeffs, valid }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            valid: self.valid,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            valid: self.valid,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_order(other);
        let valid = self.valid.min(other.valid);
        let mut coeffs = vec![Rational::zero(); self.order()];
        for (i, a) in self.coeffs[..valid].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..valid - i].iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        PowerSeries { coeffs, valid }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(self.order());
        r.valid = self.valid;
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = match self.coeffs.first() {
            Some(c) if self.valid > 0 && !c.is_zero() => c,
            _ => return Err(Error::NotAUnit),
        };
        let inv0 = a0.recip();
        let mut out = vec![Rational::zero(); self.order()];
        out[0] = inv0.clone();
        for n in 1..self.valid {
            let s: Rational = (1..=n).map(|k| &self.coeffs[k] * &out[n - k]).sum();
            out[n] = -s * &inv0;
        }
        Ok(PowerSeries {
            coeffs: out,
            valid: self.valid,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// `d/dz`; the top coefficient becomes an explicit zero and `valid` drops by one.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![Rational::zero(); n];
        let valid = self.valid.saturating_sub(1);
        for (i, c) in coeffs.iter_mut().enumerate().take(valid) {
            *c = &self.coeffs[i + 1] * int(i + 1);
        }
        PowerSeries { coeffs, valid }
    }

    /// `theta = z d/dz`, exact at every order.
    pub fn theta(&self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| c * int(i)).collect(),
            valid: self.valid,
        }
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.valid == 0 || !self.coeffs[0].is_zero() {
            return Err(Error::BadConstantTerm("exp"));
        }
        // n e_n = sum_{k=1..n} k a_k e_{n-k}
        let mut e = vec![Rational::zero(); self.order()];
        e[0] = Rational::one();
        for n in 1..self.valid {
            let s: Rational = (1..=n).map(|k| &self.coeffs[k] * int(k) * &e[n - k]).sum();
            e[n] = s / int(n);
        }
        Ok(PowerSeries {
            coeffs: e,
            valid: self.valid,
        })
    }

    /// Logarithm of a series with constant term one.
    pub fn log(&self) -> Result<Self> {
        if self.valid == 0 || !self.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm("log"));
        }
        // n l_n = n a_n - sum_{k=1..n-1} k l_k a_{n-k}
        let mut l = vec![Rational::zero(); self.order()];
        for n in 1..self.valid {
            let s: Rational = (1..n).map(|k| int(k) * &l[k] * &self.coeffs[n - k]).sum();
            l[n] = (&self.coeffs[n] * int(n) - s) / int(n);
        }
        Ok(PowerSeries {
            coeffs: l,
            valid: self.valid,
        })
    }

    /// True when every exact coefficient below `through` vanishes.
    pub fn vanishes_through(&self, through: usize) -> bool {
        through <= self.valid && self.coeffs[..through].iter().all(Zero::is_zero)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.valid_coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.valid)
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::exact::rational::vec_as_strings::serialize(self.valid_coeffs(), s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coeffs = crate::exact::rational::vec_as_strings::deserialize(d)?;
        let n = coeffs.len();
        Ok(PowerSeries::from_coeffs(coeffs, n))
    }
}

/// Series vector of uniform order (one series per unknown of the system).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesVector(pub Vec<PowerSeries>);

impl SeriesVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> usize {
        self.0.first().map_or(0, PowerSeries::order)
    }

    fn coeff_vector(&self, m: usize) -> Vec<Rational> {
        self.0.iter().map(|s| s.coeffs[m].clone()).collect()
    }
}

impl std::ops::Index<usize> for SeriesVector {
    type Output = PowerSeries;
    fn index(&self, i: usize) -> &PowerSeries {
        &self.0[i]
    }
}

/// Taylor coefficients `A_0, A_1, ..` of a rational-function matrix.
struct MatrixSeries {
    dim: usize,
    /// `coeffs[m][i][j]`
    coeffs: Vec<Vec<Vec<Rational>>>,
}

impl MatrixSeries {
    fn expand<R: AsRef<[RatFunc]>>(a: &[R], order: usize) -> Result<Self> {
        let dim = a.len();
        let mut coeffs = vec![vec![vec![Rational::zero(); dim]; dim]; order];
        for (i, row) in a.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, f) in row.iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let s = PowerSeries::from_ratfunc(f, order)?;
                for (m, c) in s.coeffs.into_iter().enumerate() {
                    coeffs[m][i][j] = c;
                }
            }
        }
        Ok(MatrixSeries { dim, coeffs })
    }

    /// `sum_{i=1..m} A_i x_{m-i}`
    fn tail_product(&self, x: &[Vec<Rational>], m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for i in 1..=m {
            let a = &self.coeffs[i];
            let v = &x[m - i];
            for (r, o) in out.iter_mut().enumerate() {
                for (c, vc) in v.iter().enumerate() {
                    if !a[r][c].is_zero() && !vc.is_zero() {
                        *o += &a[r][c] * vc;
                    }
                }
            }
        }
        out
    }
}

/// Solves the (possibly overdetermined) system `m x = rhs` by Gaussian
/// elimination. `None` if inconsistent or not uniquely solvable.
fn solve_linear(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(cols);
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !m[r][c].is_zero())?;
        m.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for r in 0..rows {
            if r == pivot_row || m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for cc in c..cols {
                let d = &f * &m[pivot_row][cc];
                m[r][cc] -= d;
            }
            let d = &f * &rhs[pivot_row];
            rhs[r] -= d;
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rhs[pivot_row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(
        (0..cols)
            .map(|c| &rhs[pivots[c]] / &m[pivots[c]][c])
            .collect(),
    )
}

/// `m I - A_0`
fn shifted(a0: &[Vec<Rational>], m: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = a0.iter().map(|r| r.iter().map(|c| -c).collect()).collect();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += int(m);
    }
    out
}

fn assemble(x: Vec<Vec<Rational>>, dim: usize, order: usize) -> SeriesVector {
    SeriesVector(
        (0..dim)
            .map(|i| PowerSeries::from_coeffs(x.iter().map(|v| v[i].clone()).collect(), order))
            .collect(),
    )
}

/// The solution of `theta w = A(z) w` regular at 0 with `w(0) = e_1`.
///
/// Coefficient `m >= 1` solves `(m I - A_0) w_m = sum_{i=1..m} A_i w_{m-i}`.
pub fn solve_homogeneous<R: AsRef<[RatFunc]>>(a: &[R], order: usize) -> Result<SeriesVector> {
    let ms = MatrixSeries::expand(a, order.max(1))?;
    let dim = ms.dim;
    let a0 = &ms.coeffs[0];
    if a0.iter().any(|row| !row[0].is_zero()) {
        return Err(Error::NoRegularSolution);
    }
    let mut w: Vec<Vec<Rational>> = Vec::with_capacity(order);
    let mut e1 = vec![Rational::zero(); dim];
    e1[0] = Rational::one();
    w.push(e1);
    for m in 1..order {
        let rhs = ms.tail_product(&w, m);
        let wm = solve_linear(shifted(a0, m), rhs).ok_or(Error::NoRegularSolution)?;
        w.push(wm);
    }
    w.truncate(order);
    Ok(assemble(w, dim, order))
}

/// The solution of `theta v = A(z) v - w0(z)` regular at 0 with `v_0(0) = 0`.
pub fn solve_inhomogeneous<R: AsRef<[RatFunc]>>(
    a: &[R],
    w0: &SeriesVector,
    order: usize,
) -> Result<SeriesVector> {
    let ms = MatrixSeries::expand(a, order.max(1))?;
    let dim = ms.dim;
    assert_eq!(w0.len(), dim, "inhomogeneity has wrong dimension");
    assert!(w0.order() >= order, "inhomogeneity truncated below requested order");
    let a0 = &ms.coeffs[0];
    // order 0: A_0 v_0 = w0(0) together with the normalization v_0[0] = 0
    let mut system = a0.clone();
    let mut norm = vec![Rational::zero(); dim];
    norm[0] = Rational::one();
    system.push(norm);
    let mut rhs = w0.coeff_vector(0);
    rhs.push(Rational::zero());
    let v0 = solve_linear(system, rhs).ok_or(Error::NoSolution(0))?;
    let mut v = vec![v0];
    for m in 1..order {
        let tail = ms.tail_product(&v, m);
        let rhs: Vec<Rational> = tail
            .iter()
            .zip(w0.coeff_vector(m))
            .map(|(t, w)| t - w)
            .collect();
        let vm = solve_linear(shifted(a0, m), rhs).ok_or(Error::NoSolution(m))?;
        v.push(vm);
    }
    v.truncate(order);
    Ok(assemble(v, dim, order))
}

/// `theta w - A w + inhomogeneity`, component by component.
pub fn system_residual<R: AsRef<[RatFunc]>>(
    a: &[R],
    w: &SeriesVector,
    inhomogeneity: Option<&SeriesVector>,
) -> Result<SeriesVector> {
    let order = w.order();
    let mut out = Vec::with_capacity(w.len());
    for (i, row) in a.iter().enumerate() {
        let mut r = w[i].theta();
        for (j, f) in row.as_ref().iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            r = r.sub(&PowerSeries::from_ratfunc(f, order)?.mul(&w[j]));
        }
        if let Some(h) = inhomogeneity {
            r = r.add(&h[i]);
        }
        out.push(r);
    }
    Ok(SeriesVector(out))
}

/// `theta^4 f + sum_j B_j theta^j f` for the logarithmic-form operator.
pub fn apply_log_operator(b: &[RatFunc; 4], f: &PowerSeries) -> Result<PowerSeries> {
    let order = f.order();
    let mut thetas = vec![f.clone()];
    for _ in 0..4 {
        let next = thetas.last().unwrap().theta();
        thetas.push(next);
    }
    let mut out = thetas[4].clone();
    for (j, bj) in b.iter().enumerate() {
        out = out.add(&PowerSeries::from_ratfunc(bj, order)?.mul(&thetas[j]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int as q, rat, UniPoly};

    const N: usize = 8;

    fn s(c: &[i64]) -> PowerSeries {
        PowerSeries::from_coeffs(c.iter().map(|&v| q(v)).collect(), N)
    }

    #[test]
    fn reciprocal_of_one_minus_z() {
        let r = s(&[1, -1]).reciprocal().unwrap();
        assert_eq!(r, s(&[1; N]));
        assert_eq!(s(&[0, 1]).reciprocal(), Err(Error::NotAUnit));
    }

    #[test]
    fn theta_and_mul() {
        assert_eq!(s(&[0, 0, 0, 1]).theta(), s(&[0, 0, 0, 3]));
        assert_eq!(s(&[1, 1]).mul(&s(&[1, -1])), s(&[1, 0, -1]));
    }

    #[test]
    fn derivative_tracks_validity() {
        let d = s(&[1, 1, 1, 1, 1, 1, 1, 1]).derivative();
        assert_eq!(d.valid(), N - 1);
        assert_eq!(d.coeff(2).unwrap(), &q(3));
        assert_eq!(
            d.coeff(N - 1),
            Err(Error::OrderExhausted {
                requested: N - 1,
                valid: N - 1
            })
        );
        assert_eq!(d.order(), N);
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(PowerSeries::zero(N).exp().unwrap(), PowerSeries::one(N));
        let l = s(&[1, 1]).log().unwrap();
        for n in 1..N {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.coeff(n).unwrap(), &rat(sign, n as i64));
        }
        let a = PowerSeries::from_coeffs(vec![q(1), rat(-1, 2)], N);
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
        assert_eq!(s(&[1]).exp(), Err(Error::BadConstantTerm("exp")));
        assert_eq!(s(&[2]).log(), Err(Error::BadConstantTerm("log")));
    }

    #[test]
    fn ratfunc_expansion() {
        // 1/(z - 2) = -1/2 - z/4 - ...
        let f = RatFunc::normalize(UniPoly::one(), UniPoly::from_i64(&[-2, 1])).unwrap();
        let e = PowerSeries::from_ratfunc(&f, 4).unwrap();
        assert_eq!(e.valid_coeffs(), &[rat(-1, 2), rat(-1, 4), rat(-1, 8), rat(-1, 16)]);
        let pole = RatFunc::normalize(UniPoly::one(), UniPoly::var()).unwrap();
        assert_eq!(PowerSeries::from_ratfunc(&pole, 4), Err(Error::PoleAtOrigin));
    }

    #[test]
    fn homogeneous_zero_matrix() {
        let a = vec![vec![RatFunc::zero(); 4]; 4];
        let w = solve_homogeneous(&a, N).unwrap();
        assert_eq!(w[0], PowerSeries::one(N));
        for i in 1..4 {
            assert_eq!(w[i], PowerSeries::zero(N));
        }
    }

    #[test]
    fn homogeneous_scalar_toy() {
        // theta f = z f  =>  f = e^z
        let a = vec![vec![RatFunc::var()]];
        let w = solve_homogeneous(&a, N).unwrap();
        let mut fact = q(1);
        for m in 0..N {
            if m > 0 {
                fact *= q(m as i64);
            }
            assert_eq!(w[0].coeff(m).unwrap(), &fact.recip());
        }
    }

    #[test]
    fn homogeneous_rejects_bad_kernel() {
        let a = vec![vec![RatFunc::one()]];
        assert_eq!(solve_homogeneous(&a, N), Err(Error::NoRegularSolution));
    }

    fn nilpotent() -> Vec<Vec<RatFunc>> {
        let mut a = vec![vec![RatFunc::zero(); 4]; 4];
        for i in 0..3 {
            a[i][i + 1] = RatFunc::one();
        }
        a
    }

    #[test]
    fn inhomogeneous_examples() {
        let zero = vec![vec![RatFunc::zero(); 4]; 4];
        let e1 = solve_homogeneous(&zero, N).unwrap();
        assert_eq!(solve_inhomogeneous(&zero, &e1, N), Err(Error::NoSolution(0)));

        let a = nilpotent();
        let v = solve_inhomogeneous(&a, &e1, N).unwrap();
        assert_eq!(v[0], PowerSeries::zero(N));
        assert_eq!(v[1], PowerSeries::one(N));
        assert_eq!(v[2], PowerSeries::zero(N));
        assert_eq!(v[3], PowerSeries::zero(N));
        let res = system_residual(&a, &v, Some(&e1)).unwrap();
        assert!(res.0.iter().all(|r| r.vanishes_through(N)));
    }

    #[test]
    fn linear_solver_handles_overdetermined() {
        let m = vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(2), q(0)]];
        assert_eq!(solve_linear(m.clone(), vec![q(3), q(1), q(4)]), Some(vec![q(2), q(1)]));
        assert_eq!(solve_linear(m, vec![q(3), q(1), q(5)]), None);
    }

    #[test]
    fn serde_valid_prefix() {
        let d = s(&[1, 2, 3]).derivative();
        let js = serde_json::to_string(&d).unwrap();
        assert_eq!(js, r#"["2","6","0","0","0","0","0"]"#);
    }
}
