//! Buchberger's algorithm with cofactor tracking.
//!
//! Every basis element carries a row of polynomials expressing it as a
//! combination of the original generators, so that division by the basis
//! yields ideal-membership certificates in terms of the generators.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::Field;
pub use crate::multipoly::MonomialOrder;
use crate::multipoly::{ExponentVector, MultiPoly};

/// Standard S-polynomial of `f` and `g`; the leading terms cancel.
pub fn s_polynomial<F: Field>(f: &MultiPoly<F>, g: &MultiPoly<F>) -> MultiPoly<F> {
    let (mf, cf) = f.leading_term().expect("nonzero polynomial");
    let (mg, cg) = g.leading_term().expect("nonzero polynomial");
    let l = mf.lcm(mg);
    let mut s = f.mul_term(&cf.inv().unwrap(), &l.checked_div(mf).unwrap());
    s.add_scaled(&cg.inv().unwrap().neg(), &l.checked_div(g_lead(g)).unwrap(), g);
    s
}

fn g_lead<F: Field>(g: &MultiPoly<F>) -> &ExponentVector {
    g.leading_term().unwrap().0
}

/// Result of dividing by a basis: `p = sum_i quotients[i] * basis[i] + remainder`.
struct Division<F: Field> {
    remainder: MultiPoly<F>,
    quotients: Vec<MultiPoly<F>>,
}

/// Full reduction of `p` by monic polynomials `divisors`.
fn reduce<F: Field>(p: &MultiPoly<F>, divisors: &[MultiPoly<F>], skip: Option<usize>) -> Division<F> {
    let order = p.order();
    let leads: Vec<ExponentVector> = divisors.iter().map(|g| *g_lead(g)).collect();
    let mut work = p.clone();
    let mut remainder = MultiPoly::zero(order);
    let mut quotients = vec![MultiPoly::zero(order); divisors.len()];
    while let Some((m, c)) = work.pop_leading() {
        let hit = leads
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .find_map(|(i, lm)| m.checked_div(lm).map(|q| (i, q)));
        match hit {
            Some((i, q)) => {
                // leading term of divisor is 1 * lm; it cancels the popped term
                let g = &divisors[i];
                let neg = c.neg();
                for (e, gc) in g.terms().skip(1) {
                    work.add_term(e.mul(&q), &neg.mul(gc));
                }
                quotients[i].add_term(q, &c);
            }
            None => remainder.add_term(m, &c),
        }
    }
    Division {
        remainder,
        quotients,
    }
}

/// A Groebner basis together with the transform back to the generators:
/// `basis[i] = sum_j transform[i][j] * generators[j]`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    generators: Vec<MultiPoly<F>>,
    basis: Vec<MultiPoly<F>>,
    transform: Vec<Vec<MultiPoly<F>>>,
    order: MonomialOrder,
}

/// Counters from a basis computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuchbergerStats {
    pub pairs_reduced: usize,
    pub pairs_skipped_coprime: usize,
    pub pairs_skipped_chain: usize,
    pub zero_reductions: usize,
}

struct Builder<F: Field> {
    order: MonomialOrder,
    ngens: usize,
    polys: Vec<MultiPoly<F>>,
    rows: Vec<Vec<MultiPoly<F>>>,
    stats: BuchbergerStats,
}

impl<F: Field> Builder<F> {
    fn scaled_row(&self, i: usize, c: &F, m: &ExponentVector) -> Vec<MultiPoly<F>> {
        self.rows[i].iter().map(|r| r.mul_term(c, m)).collect()
    }

    /// Reduces the S-polynomial of `(i, j)`; returns the normalized remainder
    /// and its transform row when nonzero.
    fn reduce_pair(&mut self, i: usize, j: usize) -> Option<(MultiPoly<F>, Vec<MultiPoly<F>>)> {
        let (mi, mj) = (*g_lead(&self.polys[i]), *g_lead(&self.polys[j]));
        let l = mi.lcm(&mj);
        let (ui, uj) = (l.checked_div(&mi).unwrap(), l.checked_div(&mj).unwrap());
        // basis polys are monic
        let mut s = self.polys[i].mul_term(&F::one(), &ui);
        s.add_scaled(&F::one().neg(), &uj, &self.polys[j]);
        let div = reduce(&s, &self.polys, None);
        self.stats.pairs_reduced += 1;
        if div.remainder.is_zero() {
            self.stats.zero_reductions += 1;
            return None;
        }
        let mut row = self.scaled_row(i, &F::one(), &ui);
        let rj = self.scaled_row(j, &F::one().neg(), &uj);
        let qs = combine_rows(self.order, self.ngens, &div.quotients, &self.rows);
        for ((r, b), q) in row.iter_mut().zip(&rj).zip(&qs) {
            *r = r.add(b).sub(q);
        }
        let lc_inv = div.remainder.leading_term().unwrap().1.inv().unwrap();
        let row = row.iter().map(|r| r.scale(&lc_inv)).collect();
        Some((div.remainder.scale(&lc_inv), row))
    }

    fn push(&mut self, p: MultiPoly<F>, row: Vec<MultiPoly<F>>, pairs: &mut BTreeSet<PairKey>) {
        let n = self.polys.len();
        let lm = *g_lead(&p);
        self.polys.push(p);
        self.rows.push(row);
        for i in 0..n {
            let l = g_lead(&self.polys[i]).lcm(&lm);
            pairs.insert(PairKey {
                rank: self.order.rank(&l),
                i,
                j: n,
            });
        }
    }

    /// Buchberger's chain criterion: some `l` with `lm_l | lcm(i, j)` whose
    /// pairs with `i` and `j` have already been treated.
    fn chain_criterion(&self, i: usize, j: usize, lcm: &ExponentVector, pending: &BTreeSet<PairKey>) -> bool {
        let has_pending = |a: usize, b: usize| {
            let (a, b) = (a.min(b), a.max(b));
            let l = g_lead(&self.polys[a]).lcm(g_lead(&self.polys[b]));
            pending.contains(&PairKey {
                rank: self.order.rank(&l),
                i: a,
                j: b,
            })
        };
        (0..self.polys.len()).any(|l| {
            l != i
                && l != j
                && g_lead(&self.polys[l]).divides(lcm)
                && !has_pending(i, l)
                && !has_pending(j, l)
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct PairKey {
    rank: [i64; 6],
    i: usize,
    j: usize,
}

/// Computes a reduced Groebner basis of the ideal generated by `generators`,
/// tracking each basis element as a combination of the generators.
pub fn buchberger<F: Field>(generators: &[MultiPoly<F>], order: MonomialOrder) -> GroebnerBasis<F> {
    buchberger_with_stats(generators, order).0
}

pub fn buchberger_with_stats<F: Field>(
    generators: &[MultiPoly<F>],
    order: MonomialOrder,
) -> (GroebnerBasis<F>, BuchbergerStats) {
    assert!(!generators.is_empty(), "at least one generator required");
    let generators: Vec<MultiPoly<F>> = generators.iter().map(|g| g.reorder(order)).collect();
    let ngens = generators.len();
    let mut b = Builder {
        order,
        ngens,
        polys: Vec::new(),
        rows: Vec::new(),
        stats: BuchbergerStats::default(),
    };
    let mut pairs = BTreeSet::new();
    for (j, g) in generators.iter().enumerate() {
        assert!(!g.is_zero(), "generators must be nonzero");
        let lc_inv = g.leading_term().unwrap().1.inv().unwrap();
        let mut row = vec![MultiPoly::zero(order); ngens];
        row[j] = MultiPoly::constant(order, lc_inv.clone());
        b.push(g.scale(&lc_inv), row, &mut pairs);
    }

    // normal strategy: smallest lcm first
    while let Some(key) = pairs.pop_first() {
        let (i, j) = (key.i, key.j);
        let (mi, mj) = (g_lead(&b.polys[i]), g_lead(&b.polys[j]));
        if mi.is_coprime(mj) {
            b.stats.pairs_skipped_coprime += 1;
            continue;
        }
        let l = mi.lcm(mj);
        if b.chain_criterion(i, j, &l, &pairs) {
            b.stats.pairs_skipped_chain += 1;
            continue;
        }
        if let Some((p, row)) = b.reduce_pair(i, j) {
            b.push(p, row, &mut pairs);
        }
    }

    let stats = b.stats;
    let gb = interreduce(b, generators);
    (gb, stats)
}

/// Drops redundant elements and reduces tails, keeping transforms in sync.
fn interreduce<F: Field>(b: Builder<F>, generators: Vec<MultiPoly<F>>) -> GroebnerBasis<F> {
    let order = b.order;
    let n = b.polys.len();
    let leads: Vec<ExponentVector> = b.polys.iter().map(|p| *g_lead(p)).collect();
    let mut kept: Vec<(MultiPoly<F>, Vec<MultiPoly<F>>)> = b
        .polys
        .into_iter()
        .zip(b.rows)
        .enumerate()
        .filter(|&(i, _)| {
            !(0..n).any(|j| j != i && leads[j].divides(&leads[i]) && (leads[j] != leads[i] || j < i))
        })
        .map(|(_, pr)| pr)
        .collect();
    kept.sort_by(|a, c| order.cmp(g_lead(&a.0), g_lead(&c.0)));
    let (mut polys, mut rows): (Vec<_>, Vec<_>) = kept.into_iter().unzip();

    for i in 0..polys.len() {
        let div = reduce(&polys[i], &polys, Some(i));
        if div.quotients.iter().all(MultiPoly::is_zero) {
            continue;
        }
        let qs = combine_rows(order, generators.len(), &div.quotients, &rows);
        for (r, q) in rows[i].iter_mut().zip(&qs) {
            *r = r.sub(q);
        }
        polys[i] = div.remainder;
    }
    GroebnerBasis {
        generators,
        basis: polys,
        transform: rows,
        order,
    }
}

/// `sum_i quotients[i] * rows[i]`
fn combine_rows<F: Field>(
    order: MonomialOrder,
    ngens: usize,
    quotients: &[MultiPoly<F>],
    rows: &[Vec<MultiPoly<F>>],
) -> Vec<MultiPoly<F>> {
    let mut out = vec![MultiPoly::zero(order); ngens];
    for (q, row) in quotients.iter().zip(rows) {
        if q.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o = o.add(&q.mul(r));
            }
        }
    }
    out
}

impl<F: Field> GroebnerBasis<F> {
    pub fn generators(&self) -> &[MultiPoly<F>] {
        &self.generators
    }

    pub fn basis(&self) -> &[MultiPoly<F>] {
        &self.basis
    }

    /// `transform()[i][j]` multiplies generator `j` in basis element `i`.
    pub fn transform(&self) -> &[Vec<MultiPoly<F>>] {
        &self.transform
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn normal_form(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        reduce(&p.reorder(self.order), &self.basis, None).remainder
    }

    /// Divides `p` by the basis. Returns the normal form and cofactors `c_j`
    /// with `p = sum_j c_j * generators[j] + remainder`.
    pub fn divide_with_cofactors(&self, p: &MultiPoly<F>) -> (MultiPoly<F>, Vec<MultiPoly<F>>) {
        let div = reduce(&p.reorder(self.order), &self.basis, None);
        let cof = combine_rows(self.order, self.generators.len(), &div.quotients, &self.transform);
        (div.remainder, cof)
    }

    /// Every S-polynomial of basis pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let n = self.basis.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| self.normal_form(&s_polynomial(&self.basis[i], &self.basis[j])).is_zero())
        })
    }

    /// Every basis element equals its transform row applied to the generators.
    pub fn transform_is_exact(&self) -> bool {
        self.basis.iter().zip(&self.transform).all(|(g, row)| {
            let mut acc = MultiPoly::zero(self.order);
            for (c, gen) in row.iter().zip(&self.generators) {
                acc = acc.add(&c.mul(gen));
            }
            acc == *g
        })
    }

    /// Leading monomials of the basis, one per line.
    pub fn debug_dump(&self) -> String {
        self.basis
            .iter()
            .map(|g| format!("{}\n", g_lead(g)))
            .collect()
    }

    /// Writes `p = epsilon * reference + sum_j A_j * generators[j]` with
    /// `epsilon` the unique scalar making `NF(p) = epsilon * NF(reference)`.
    pub fn jacobian_split(
        &self,
        p: &MultiPoly<F>,
        reference: &MultiPoly<F>,
        pole_order: u32,
    ) -> Result<CofactorDecomposition<F>> {
        let nf_p = self.normal_form(p);
        let nf_ref = self.normal_form(reference);
        let epsilon = match nf_ref.leading_term() {
            None if nf_p.is_zero() => F::zero(),
            None => return Err(Error::NonProportionalNormalForm { pole_order }),
            Some((m, c)) => {
                let pc = nf_p.coeff(m).cloned().unwrap_or_else(F::zero);
                pc.div(c).unwrap()
            }
        };
        if nf_p != nf_ref.scale(&epsilon) {
            return Err(Error::NonProportionalNormalForm { pole_order });
        }
        let residual = p.reorder(self.order).sub(&reference.reorder(self.order).scale(&epsilon));
        let (rem, cofactors) = self.divide_with_cofactors(&residual);
        debug_assert!(rem.is_zero());
        Ok(CofactorDecomposition { epsilon, cofactors })
    }
}

impl<F: Field> fmt::Display for GroebnerBasis<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.basis {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// `p = epsilon * reference + sum_j cofactors[j] * generators[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CofactorDecomposition<F: Field> {
    pub epsilon: F,
    pub cofactors: Vec<MultiPoly<F>>,
}

impl<F: Field> CofactorDecomposition<F> {
    /// Checks the certificate identity by direct expansion.
    pub fn certifies(&self, p: &MultiPoly<F>, reference: &MultiPoly<F>, generators: &[MultiPoly<F>]) -> bool {
        let order = p.order();
        let mut acc = reference.reorder(order).scale(&self.epsilon);
        for (a, g) in self.cofactors.iter().zip(generators) {
            acc = acc.add(&a.reorder(order).mul(&g.reorder(order)));
        }
        acc == *p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Rational};

    type QPoly = MultiPoly<Rational>;
    const G: MonomialOrder = MonomialOrder::Grevlex;

    fn poly(terms: &[([u16; 5], i64)]) -> QPoly {
        QPoly::from_terms(G, terms.iter().map(|&(e, c)| (ExponentVector(e), int(c))))
    }

    #[test]
    fn s_polynomial_examples() {
        let x0 = poly(&[([1, 0, 0, 0, 0], 1)]);
        let x1 = poly(&[([0, 1, 0, 0, 0], 1)]);
        assert!(s_polynomial(&x0, &x1).is_zero());
        let f = poly(&[([2, 0, 0, 0, 0], 1), ([0, 1, 0, 0, 0], -1)]);
        let g = poly(&[([1, 1, 0, 0, 0], 1)]);
        assert_eq!(s_polynomial(&f, &g), poly(&[([0, 2, 0, 0, 0], -1)]));
        assert!(s_polynomial(&f, &f).is_zero());
    }

    #[test]
    fn trivial_basis() {
        let gens = [poly(&[([1, 0, 0, 0, 0], 1)]), poly(&[([0, 1, 0, 0, 0], 1)])];
        let gb = buchberger(&gens, G);
        assert_eq!(gb.basis().len(), 2);
        assert!(gb.basis().contains(&gens[0]));
        assert!(gb.basis().contains(&gens[1]));
    }

    #[test]
    fn small_basis_contains_x1_squared() {
        let gens = [
            poly(&[([2, 0, 0, 0, 0], 1), ([0, 1, 0, 0, 0], -1)]),
            poly(&[([1, 1, 0, 0, 0], 1)]),
        ];
        let gb = buchberger(&gens, G);
        assert!(gb.basis().contains(&poly(&[([0, 2, 0, 0, 0], 1)])));
        assert!(gb.is_groebner());
        assert!(gb.transform_is_exact());
    }

    #[test]
    fn division_examples() {
        let gens = [poly(&[([1, 0, 0, 0, 0], 1)])];
        let gb = buchberger(&gens, G);
        let (r, c) = gb.divide_with_cofactors(&poly(&[([2, 0, 0, 0, 0], 1)]));
        assert!(r.is_zero());
        assert_eq!(c[0], poly(&[([1, 0, 0, 0, 0], 1)]));
        let (r, c) = gb.divide_with_cofactors(&poly(&[([0, 1, 0, 0, 0], 1)]));
        assert_eq!(r, poly(&[([0, 1, 0, 0, 0], 1)]));
        assert!(c[0].is_zero());
    }
}
