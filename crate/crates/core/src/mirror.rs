//! Mirror map, gauge-fixed Yukawa coupling in `q` and instanton numbers.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{as_string, is_integral, pow_i, vec_as_strings};
use crate::exact::Rational;
use crate::griffiths::{companion_matrix, PFOperator};
use crate::multipoly::FamilySpec;
use crate::series::{solve_homogeneous, solve_inhomogeneous, PowerSeries};

pub use crate::griffiths::verify_c3;

/// Default truncation order of every series.
pub const DEFAULT_ORDER: usize = 30;
/// Default number of `q`-coefficients after the constant one.
pub const DEFAULT_DEPTH: usize = 20;

/// The period `f0`, the logarithmic partner `g`, `delta = 1 + theta(g/f0)`
/// and `u = exp(g/f0)`, all normalized so that `f0(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorData {
    pub f0: PowerSeries,
    pub g: PowerSeries,
    pub delta: PowerSeries,
    pub u: PowerSeries,
}

impl MirrorData {
    /// Builds the data from an unnormalized pair; both are divided by `f0(0)`.
    pub fn from_periods(f0: &PowerSeries, g: &PowerSeries) -> Result<Self> {
        let c = f0.coeff(0)?;
        if c.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv = c.recip();
        let f0 = f0.scale(&inv);
        let g = g.scale(&inv);
        let ratio = g.div(&f0)?;
        let delta = PowerSeries::one(f0.order()).add(&ratio.theta());
        let u = ratio.exp()?;
        Ok(MirrorData { f0, g, delta, u })
    }
}

pub fn mirror_data(pf: &PFOperator, order: usize) -> Result<MirrorData> {
    let a = companion_matrix(pf);
    let w = solve_homogeneous(&a, order)?;
    let v = solve_inhomogeneous(&a, &w, order)?;
    MirrorData::from_periods(&w[0], &v[0])
}

/// `h_0 = 1/(delta^3 (z - lambda) f0^2)`, `h_j = (delta u)^{-1} dh_{j-1}/dz`.
pub fn h_sequence(lambda: &Rational, data: &MirrorData, jmax: usize) -> Result<Vec<PowerSeries>> {
    if lambda.is_zero() {
        return Err(Error::UnsupportedSingularityStructure(
            "singular point coincides with z = 0".into(),
        ));
    }
    let order = data.f0.order();
    // 1/(z - lambda) = -(1/lambda) sum (z/lambda)^m
    let inv_lambda = lambda.recip();
    let mut geo = Vec::with_capacity(order);
    let mut c = -inv_lambda.clone();
    for _ in 0..order {
        geo.push(c.clone());
        c *= &inv_lambda;
    }
    let pole = PowerSeries::from_coeffs(geo, order);
    let denom = data.delta.pow(3).mul(&data.f0.pow(2));
    let h0 = pole.mul(&denom.reciprocal()?);
    let step = data.delta.mul(&data.u).reciprocal()?;
    let mut hs = vec![h0];
    for _ in 0..jmax {
        let next = step.mul(&hs.last().unwrap().derivative());
        hs.push(next);
    }
    hs.last().unwrap().coeff(0)?;
    Ok(hs)
}

/// `q`-expansion of the Yukawa coupling and, when extraction succeeds, the
/// instanton numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YukawaExpansion {
    #[serde(with = "as_string")]
    pub c1: Rational,
    #[serde(with = "as_string")]
    pub c2: Rational,
    #[serde(with = "vec_as_strings")]
    pub a: Vec<Rational>,
    #[serde(with = "bigints_as_strings", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<BigInt>>,
}

mod bigints_as_strings {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        let v = v.as_ref().expect("skipped when absent");
        s.collect_seq(v.iter().map(|n| n.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<_, _>>()
            .map(Some)
    }
}

/// `k^{-k}`
pub fn default_c2(spec: &FamilySpec) -> Rational {
    let k = Rational::from_integer(BigInt::from(spec.k()));
    pow_i(&k, -(spec.k() as i64))
}

/// `c1 = -lambda d` with `d` the smallest exponent of the family.
pub fn default_c1(spec: &FamilySpec, pf: &PFOperator) -> Rational {
    -&pf.lambda * Rational::from_integer(BigInt::from(spec.min_exponent()))
}

/// `a_j = c1 c2^{-j} h_j(0) / j!` for `j = 0..=depth`.
pub fn q_coefficients(c1: &Rational, c2: &Rational, h: &[PowerSeries]) -> Result<Vec<Rational>> {
    if c2.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let inv_c2 = c2.recip();
    let mut scale = c1.clone();
    let mut out = Vec::with_capacity(h.len());
    for (j, hj) in h.iter().enumerate() {
        if j > 0 {
            scale = scale * &inv_c2 / Rational::from_integer(BigInt::from(j));
        }
        out.push(&scale * hj.coeff(0)?);
    }
    Ok(out)
}

/// The `a`-part of the expansion; `n` is left empty.
pub fn q_expansion(
    spec: &FamilySpec,
    pf: &PFOperator,
    depth: usize,
    order: usize,
    c2: Option<Rational>,
) -> Result<YukawaExpansion> {
    let data = mirror_data(pf, order)?;
    let h = h_sequence(&pf.lambda, &data, depth)?;
    let c1 = default_c1(spec, pf);
    let c2 = c2.unwrap_or_else(|| default_c2(spec));
    let a = q_coefficients(&c1, &c2, &h)?;
    Ok(YukawaExpansion { c1, c2, a, n: None })
}

/// `q_expansion` followed by `extract_n`.
pub fn curve_counts(
    spec: &FamilySpec,
    pf: &PFOperator,
    depth: usize,
    order: usize,
    c2: Option<Rational>,
) -> Result<YukawaExpansion> {
    let mut y = q_expansion(spec, pf, depth, order, c2)?;
    y.n = Some(extract_n(&y.a)?);
    Ok(y)
}

/// Inverts `a_0 = n_0`, `a_m = sum_{j | m} n_j j^3` without any integrality check.
pub fn invert_multicover(a: &[Rational]) -> Vec<Rational> {
    let mut n: Vec<Rational> = Vec::with_capacity(a.len());
    for (m, am) in a.iter().enumerate() {
        if m == 0 {
            n.push(am.clone());
            continue;
        }
        let mut rest = am.clone();
        for (j, nj) in n.iter().enumerate().take(m).skip(1) {
            if m % j == 0 {
                rest -= nj * cube(j);
            }
        }
        n.push(rest / cube(m));
    }
    n
}

fn cube(j: usize) -> Rational {
    Rational::from_integer(BigInt::from(j).pow(3))
}

pub fn extract_n(a: &[Rational]) -> Result<Vec<BigInt>> {
    invert_multicover(a)
        .into_iter()
        .enumerate()
        .map(|(index, value)| {
            if is_integral(&value) {
                Ok(value.to_integer())
            } else {
                Err(Error::NonIntegralInstanton { index, value })
            }
        })
        .collect()
}

/// `a` from `n`: the inverse of `extract_n`.
pub fn synthesize_a(n: &[BigInt]) -> Vec<Rational> {
    (0..n.len())
        .map(|m| {
            if m == 0 {
                return Rational::from_integer(n[0].clone());
            }
            (1..=m)
                .filter(|j| m % j == 0)
                .map(|j| Rational::from_integer(&n[j] * BigInt::from(j).pow(3)))
                .sum()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralityEntry {
    pub index: usize,
    #[serde(with = "as_string")]
    pub value: Rational,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralityReport {
    #[serde(with = "as_string")]
    pub c2: Rational,
    pub depth: usize,
    pub entries: Vec<IntegralityEntry>,
    pub passed: bool,
}

impl IntegralityReport {
    pub fn first_failure(&self) -> Option<&IntegralityEntry> {
        self.entries.iter().find(|e| !e.integral)
    }
}

/// Checks `n_1..n_depth` under the given `c2`.
pub fn verify_integrality(
    spec: &FamilySpec,
    pf: &PFOperator,
    depth: usize,
    order: usize,
    c2: &Rational,
) -> Result<IntegralityReport> {
    let y = q_expansion(spec, pf, depth, order, Some(c2.clone()))?;
    let entries: Vec<IntegralityEntry> = invert_multicover(&y.a)
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(index, value)| IntegralityEntry {
            index,
            integral: is_integral(&value),
            value,
        })
        .collect();
    let passed = entries.iter().all(|e| e.integral);
    Ok(IntegralityReport {
        c2: c2.clone(),
        depth,
        entries,
        passed,
    })
}

/// Lines four-times tangent to a general surface of degree `n` in P^3:
/// `n(n-4)(n-5)(n-6)(n-7)(n^3+6n^2+7n-30)/12`.
pub fn schubert_tangent_lines(n: u64) -> BigInt {
    let n = BigInt::from(n);
    let lin = |c: i64| &n - BigInt::from(c);
    let cubic = &n * &n * &n + BigInt::from(6) * &n * &n + BigInt::from(7) * &n - BigInt::from(30);
    let prod = &n * lin(4) * lin(5) * lin(6) * lin(7) * cubic;
    debug_assert!((&prod % BigInt::from(12)).is_zero());
    prod / BigInt::from(12)
}

/// True when `n_1 = 2 * schubert(8)`; only meaningful for the degree-8 family.
pub fn schubert_doubling_holds(n: &[BigInt]) -> bool {
    n.get(1).is_some_and(|n1| *n1 == BigInt::from(2) * schubert_tangent_lines(8) && n1.is_positive())
}
