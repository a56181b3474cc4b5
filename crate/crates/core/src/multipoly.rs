//! Sparse polynomials in `x0..x4` over a generic coefficient field, with
//! weighted-degree machinery and the one-parameter family polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exact::{Field, RatFunc, Rational};

pub const NVARS: usize = 5;

/// Exponents `(e0, .., e4)` of a monomial `x0^e0 .. x4^e4`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ExponentVector(pub [u16; NVARS]);

impl ExponentVector {
    pub const ONE: ExponentVector = ExponentVector([0; NVARS]);

    pub fn var(j: usize) -> Self {
        let mut e = [0; NVARS];
        e[j] = 1;
        ExponentVector(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn weighted_degree(&self, weights: &[u32; NVARS]) -> u32 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as u32 * w).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        ExponentVector(e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0).all(|(&a, b)| a <= b)
    }

    /// `self / other`, if `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a -= b;
        }
        Some(ExponentVector(e))
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).max(b);
        }
        ExponentVector(e)
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0).all(|(&a, b)| a == 0 || b == 0)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "x{j}^{e}")?;
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Term order on monomials. All variants rank `x0 > x1 > .. > x4`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic (by total degree).
    #[default]
    Grevlex,
    /// Graded lexicographic (by total degree).
    Grlex,
    /// Reverse lexicographic refined by a weighted degree.
    WeightedGrevlex([u32; NVARS]),
}

impl MonomialOrder {
    /// A key whose lexicographic order is the term order. The key is linear in
    /// the exponents, so multiplying monomials adds keys.
    pub fn rank(&self, e: &ExponentVector) -> [i64; NVARS + 1] {
        let x = e.0.map(|v| v as i64);
        match self {
            MonomialOrder::Grevlex => {
                let d = x.iter().sum();
                [d, -x[4], -x[3], -x[2], -x[1], -x[0]]
            }
            MonomialOrder::Grlex => {
                let d = x.iter().sum();
                [d, x[0], x[1], x[2], x[3], x[4]]
            }
            MonomialOrder::WeightedGrevlex(w) => {
                let d = x.iter().zip(w).map(|(a, &b)| a * b as i64).sum();
                [d, -x[4], -x[3], -x[2], -x[1], -x[0]]
            }
        }
    }

    pub fn cmp(&self, a: &ExponentVector, b: &ExponentVector) -> std::cmp::Ordering {
        self.rank(a).cmp(&self.rank(b))
    }
}

/// A monomial together with its order key; sorts by key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Ranked {
    rank: [i64; NVARS + 1],
    exps: ExponentVector,
}

impl Ranked {
    fn new(order: &MonomialOrder, exps: ExponentVector) -> Self {
        Ranked {
            rank: order.rank(&exps),
            exps,
        }
    }

    fn mul(&self, other: &Ranked) -> Ranked {
        let mut rank = self.rank;
        for (a, b) in rank.iter_mut().zip(other.rank) {
            *a += b;
        }
        Ranked {
            rank,
            exps: self.exps.mul(&other.exps),
        }
    }
}

/// Sparse polynomial; zero coefficients are never stored. Terms are kept
/// sorted by the polynomial's monomial order.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<F: Field> {
    order: MonomialOrder,
    terms: BTreeMap<Ranked, F>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(order: MonomialOrder) -> Self {
        MultiPoly {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(order: MonomialOrder, c: F) -> Self {
        Self::monomial(order, ExponentVector::ONE, c)
    }

    pub fn monomial(order: MonomialOrder, exps: ExponentVector, c: F) -> Self {
        let mut p = Self::zero(order);
        if !c.is_zero() {
            p.terms.insert(Ranked::new(&order, exps), c);
        }
        p
    }

    /// The variable `x_j`.
    pub fn var(order: MonomialOrder, j: usize) -> Self {
        Self::monomial(order, ExponentVector::var(j), F::one())
    }

    /// Sums the given terms, merging repeated monomials.
    pub fn from_terms(order: MonomialOrder, terms: impl IntoIterator<Item = (ExponentVector, F)>) -> Self {
        let mut p = Self::zero(order);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &F)> + '_ {
        self.terms.iter().rev().map(|(r, c)| (&r.exps, c))
    }

    pub fn leading_term(&self) -> Option<(&ExponentVector, &F)> {
        self.terms.iter().next_back().map(|(r, c)| (&r.exps, c))
    }

    pub fn leading_monomial(&self) -> Option<ExponentVector> {
        self.leading_term().map(|(e, _)| *e)
    }

    /// Removes and returns the leading term.
    pub fn pop_leading(&mut self) -> Option<(ExponentVector, F)> {
        self.terms.pop_last().map(|(r, c)| (r.exps, c))
    }

    pub fn coeff(&self, e: &ExponentVector) -> Option<&F> {
        self.terms.get(&Ranked::new(&self.order, *e))
    }

    pub fn add_term(&mut self, e: ExponentVector, c: &F) {
        self.add_ranked(Ranked::new(&self.order, e), c);
    }

    fn add_ranked(&mut self, key: Ranked, c: &F) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * x^m * other`.
    pub fn add_scaled(&mut self, c: &F, m: &ExponentVector, other: &Self) {
        debug_assert_eq!(self.order, other.order, "mixed monomial orders");
        if c.is_zero() {
            return;
        }
        let rm = Ranked::new(&self.order, *m);
        let unit = c.is_one();
        for (r, oc) in &other.terms {
            let v = if unit { oc.clone() } else { c.mul(oc) };
            self.add_ranked(r.mul(&rm), &v);
        }
    }

    /// `c * x^m * self`.
    pub fn mul_term(&self, c: &F, m: &ExponentVector) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        let rm = Ranked::new(&self.order, *m);
        MultiPoly {
            order: self.order,
            terms: self.terms.iter().map(|(r, v)| (r.mul(&rm), c.mul(v))).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        self.mul_term(c, &ExponentVector::ONE)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_scaled(&F::one(), &ExponentVector::ONE, other);
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_scaled(&F::one().neg(), &ExponentVector::ONE, other);
        r
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            order: self.order,
            terms: self.terms.iter().map(|(r, c)| (*r, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut r = Self::zero(self.order);
        for (e, c) in small.terms() {
            r.add_scaled(c, e, large);
        }
        r
    }

    /// Divides every coefficient by the leading one.
    pub fn make_monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Formal partial derivative with respect to `x_j`.
    pub fn partial_derivative(&self, j: usize) -> Self {
        let mut r = Self::zero(self.order);
        for (e, c) in self.terms() {
            let ej = e.0[j];
            if ej == 0 {
                continue;
            }
            let mut ne = *e;
            ne.0[j] -= 1;
            let factor = F::from_rational(&Rational::from_integer(ej.into()));
            r.add_term(ne, &c.mul(&factor));
        }
        r
    }

    /// Common weighted degree of all terms; zero polynomial has no degree.
    pub fn weighted_degree(&self, weights: &[u32; NVARS]) -> Result<u32> {
        let mut degs = self.terms().map(|(e, _)| e.weighted_degree(weights));
        let first = degs.next().ok_or(Error::NotHomogeneous)?;
        if degs.all(|d| d == first) {
            Ok(first)
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    /// Euler operator `sum_j k_j x_j d/dx_j`.
    pub fn euler(&self, weights: &[u32; NVARS]) -> Self {
        let mut r = Self::zero(self.order);
        for (e, c) in self.terms() {
            let w = e.weighted_degree(weights);
            r.add_term(*e, &c.mul(&F::from_rational(&Rational::from_integer(w.into()))));
        }
        r
    }

    /// Same polynomial sorted under another order.
    pub fn reorder(&self, order: MonomialOrder) -> Self {
        Self::from_terms(order, self.terms().map(|(e, c)| (*e, c.clone())))
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiPoly<G> {
        MultiPoly::from_terms(self.order, self.terms().map(|(e, c)| (*e, f(c))))
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    /// `c * x0^e0 x1^e1 ...` terms joined by `" + "`, leading term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *e == ExponentVector::ONE {
                write!(f, "{}", c.render())?;
            } else {
                write!(f, "{} * {e}", c.render())?;
            }
        }
        Ok(())
    }
}

/// Weights of a one-parameter family `sum_j x_j^{d_j} - k psi prod_j x_j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FamilySpec {
    weights: [u32; NVARS],
    k: u32,
    exponents: [u32; NVARS],
}

impl FamilySpec {
    pub fn new(weights: [u32; NVARS]) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidFamily(msg));
        if weights.contains(&0) {
            return invalid(format!("weights {weights:?} must be positive"));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return invalid(format!("weights {weights:?} must be non-increasing"));
        }
        let k: u32 = weights.iter().sum();
        let mut exponents = [0; NVARS];
        for (j, &w) in weights.iter().enumerate() {
            if !k.is_multiple_of(w) {
                return invalid(format!("d_{j} = {k}/{w} is not an integer"));
            }
            exponents[j] = k / w;
        }
        for skip in 0..NVARS {
            let g = (0..NVARS)
                .filter(|&j| j != skip)
                .fold(0u32, |g, j| g.gcd(&weights[j]));
            if g != 1 {
                return invalid(format!(
                    "weights other than k_{skip} have common factor {g}"
                ));
            }
        }
        let l = exponents.iter().fold(1u32, |l, d| l.lcm(d));
        if l != k {
            return invalid(format!("lcm of exponents is {l}, not k = {k}"));
        }
        Ok(FamilySpec {
            weights,
            k,
            exponents,
        })
    }

    /// One of the four built-in families, selected by `k`.
    pub fn builtin(k: u32) -> Option<Self> {
        let w = match k {
            5 => [1, 1, 1, 1, 1],
            6 => [2, 1, 1, 1, 1],
            8 => [4, 1, 1, 1, 1],
            10 => [5, 2, 1, 1, 1],
            _ => return None,
        };
        Some(Self::new(w).expect("built-in weights are valid"))
    }

    pub fn builtins() -> [FamilySpec; 4] {
        [5, 6, 8, 10].map(|k| Self::builtin(k).unwrap())
    }

    pub fn weights(&self) -> &[u32; NVARS] {
        &self.weights
    }

    /// `k = sum_j k_j`, the weighted degree of the family polynomial.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `d_j = k / k_j`.
    pub fn exponents(&self) -> &[u32; NVARS] {
        &self.exponents
    }

    /// Lowest pure-power exponent, `min_j d_j`.
    pub fn min_exponent(&self) -> u32 {
        *self.exponents.iter().min().unwrap()
    }

    /// `x0 x1 x2 x3 x4`.
    pub fn product_monomial(&self) -> ExponentVector {
        ExponentVector([1; NVARS])
    }

    pub fn weighted_degree<F: Field>(&self, p: &MultiPoly<F>) -> Result<u32> {
        p.weighted_degree(&self.weights)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.weights;
        write!(f, "k{} ({},{},{},{},{})", self.k, w[0], w[1], w[2], w[3], w[4])
    }
}

/// `Q(x, psi) = sum_j x_j^{d_j} - k psi prod_j x_j` over `Q(psi)`.
pub fn family_polynomial(spec: &FamilySpec, order: MonomialOrder) -> MultiPoly<RatFunc> {
    let mut q = MultiPoly::zero(order);
    for (j, &d) in spec.exponents().iter().enumerate() {
        let mut e = [0u16; NVARS];
        e[j] = d as u16;
        q.add_term(ExponentVector(e), &RatFunc::one());
    }
    let deformation = RatFunc::var().scale(&Rational::from_integer((-(spec.k() as i64)).into()));
    q.add_term(spec.product_monomial(), &deformation);
    q
}

/// `dQ/dx_0, .., dQ/dx_4`, the generators of the Jacobian ideal.
pub fn jacobian_generators(q: &MultiPoly<RatFunc>) -> Vec<MultiPoly<RatFunc>> {
    (0..NVARS).map(|j| q.partial_derivative(j)).collect()
}
