//! Pole-order reduction of `P Omega / Q^l` modulo exact forms, the resulting
//! relation `omega_5 = sum eps_l omega_l`, and the logarithmic-form
//! Picard-Fuchs operator built from it.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, rat, RatFunc, Rational, UniPoly};
use crate::groebner::{buchberger, CofactorDecomposition, GroebnerBasis, MonomialOrder};
use crate::multipoly::{family_polynomial, jacobian_generators, FamilySpec, MultiPoly, NVARS};

pub type Poly = MultiPoly<RatFunc>;

/// `numerator * Omega / Q^pole_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub numerator: Poly,
    pub pole_order: u32,
    pub spec: FamilySpec,
}

impl RationalForm {
    /// Weighted degree the numerator must have: `(pole_order - 1) * k`.
    pub fn expected_degree(&self) -> u32 {
        (self.pole_order - 1) * self.spec.k()
    }

    /// Checks the degree invariant; a zero numerator passes.
    pub fn check_degree(&self) -> Result<()> {
        if self.numerator.is_zero() {
            return Ok(());
        }
        let expected = self.expected_degree();
        match self.spec.weighted_degree(&self.numerator) {
            Ok(d) if d == expected => Ok(()),
            Ok(d) => Err(Error::InternalDegreeError { expected, found: d }),
            Err(_) => Err(Error::NotHomogeneous),
        }
    }
}

/// `omega_l = (-1)^(l-1) (l-1)! psi^l (prod x_i)^(l-1) Omega / Q^l`.
pub fn build_omega_ell(spec: &FamilySpec, ell: u32, order: MonomialOrder) -> RationalForm {
    assert!((1..=5).contains(&ell), "pole order must be in 1..=5");
    let factorial: i64 = (1..ell as i64).product();
    let sign = if ell % 2 == 1 { 1 } else { -1 };
    let coeff = RatFunc::from_poly(UniPoly::monomial(int(sign * factorial), ell as usize));
    let mut e = spec.product_monomial();
    e.0 = e.0.map(|v| v * (ell as u16 - 1));
    RationalForm {
        numerator: MultiPoly::monomial(order, e, coeff),
        pole_order: ell,
        spec: *spec,
    }
}

/// One application of the reduction formula: given
/// `numerator(eta) - eps * numerator(omega_l) = sum_j A_j dQ/dx_j`, the
/// remainder `eta - eps * omega_l` equals, modulo exact forms,
/// `(1/(l-1)) sum_j dA_j/dx_j * Omega / Q^(l-1)`.
pub fn pole_reduce_step(
    eta: &RationalForm,
    decomposition: &CofactorDecomposition<RatFunc>,
) -> Result<RationalForm> {
    assert!(eta.pole_order >= 2, "pole order must be at least 2");
    let order = eta.numerator.order();
    let mut div = MultiPoly::zero(order);
    for (j, a) in decomposition.cofactors.iter().enumerate().take(NVARS) {
        div = div.add(&a.partial_derivative(j));
    }
    let scale = RatFunc::constant(rat(1, eta.pole_order as i64 - 1));
    let out = RationalForm {
        numerator: div.scale(&scale),
        pole_order: eta.pole_order - 1,
        spec: eta.spec,
    };
    out.check_degree().map_err(|e| match e {
        Error::NotHomogeneous => Error::InternalDegreeError {
            expected: out.expected_degree(),
            found: 0,
        },
        other => other,
    })?;
    Ok(out)
}

/// One recorded reduction `eta_l -> eta_(l-1)`.
#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub eta: RationalForm,
    pub omega: RationalForm,
    pub decomposition: CofactorDecomposition<RatFunc>,
    pub next: RationalForm,
}

/// Full record of a derivation, with every certificate kept for checking.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub spec: FamilySpec,
    pub jacobian: Vec<Poly>,
    pub basis: GroebnerBasis<RatFunc>,
    /// Steps for pole orders 5, 4, 3, 2.
    pub steps: Vec<ReductionStep>,
    /// `eps_1..eps_4` as functions of `psi`.
    pub epsilons_psi: [RatFunc; 4],
    /// `eps_1..eps_4` as functions of `z = psi^-k`.
    pub epsilons: [RatFunc; 4],
}

impl Derivation {
    /// Re-expands every recorded certificate as a polynomial identity.
    pub fn certificates_hold(&self) -> bool {
        self.steps.iter().all(|s| {
            s.decomposition
                .certifies(&s.eta.numerator, &s.omega.numerator, &self.jacobian)
                && s.eta.check_degree().is_ok()
                && s.next.check_degree().is_ok()
        })
    }
}

/// Starting from `eta_5 = omega_5`, reduces pole order down to 1 and returns
/// `eps_1..eps_4` with `omega_5 = sum_l eps_l omega_l` modulo exact forms.
pub fn derive(spec: &FamilySpec, order: MonomialOrder) -> Result<Derivation> {
    let q = family_polynomial(spec, order);
    let jacobian = jacobian_generators(&q);
    let basis = buchberger(&jacobian, order);
    let k = spec.k() as usize;

    let mut eta = build_omega_ell(spec, 5, order);
    let mut steps = Vec::new();
    let mut eps_psi: [RatFunc; 4] = Default::default();
    for ell in (2..=5u32).rev() {
        let omega = build_omega_ell(spec, ell, order);
        let decomposition = basis.jacobian_split(&eta.numerator, &omega.numerator, ell)?;
        let next = pole_reduce_step(&eta, &decomposition)?;
        if ell <= 4 {
            eps_psi[ell as usize - 1] = decomposition.epsilon.clone();
        } else if !decomposition.epsilon.is_zero() {
            // degree 4k lies entirely in the Jacobian ideal
            return Err(Error::NonProportionalNormalForm { pole_order: 5 });
        }
        steps.push(ReductionStep {
            eta,
            omega,
            decomposition,
            next: next.clone(),
        });
        eta = next;
    }
    // pole order 1: the numerator is a constant, omega_1 has numerator psi
    let omega1 = build_omega_ell(spec, 1, order);
    let decomposition = basis.jacobian_split(&eta.numerator, &omega1.numerator, 1)?;
    eps_psi[0] = decomposition.epsilon;

    let mut epsilons: [RatFunc; 4] = Default::default();
    for (e, p) in epsilons.iter_mut().zip(&eps_psi) {
        *e = p.psi_to_z(k)?;
    }
    Ok(Derivation {
        spec: *spec,
        jacobian,
        basis,
        steps,
        epsilons_psi: eps_psi,
        epsilons,
    })
}

/// `eps_1..eps_4` in `z` under the default (grevlex) order.
pub fn derive_epsilons(spec: &FamilySpec) -> Result<[RatFunc; 4]> {
    Ok(derive(spec, MonomialOrder::Grevlex)?.epsilons)
}

/// Logarithmic-form operator `theta^4 + sum_j B_j(z) theta^j`, `theta = z d/dz`.
#[derive(Clone, Debug, PartialEq)]
pub struct PFOperator {
    pub b: [RatFunc; 4],
    pub k: u32,
    pub lambda: Rational,
}

pub type RatMatrix = [[RatFunc; 4]; 4];
pub type QMatrix = [[Rational; 4]; 4];

impl PFOperator {
    pub fn new(b: [RatFunc; 4], k: u32, lambda: Rational) -> Self {
        PFOperator { b, k, lambda }
    }

    /// `C_3(z) = (6 + B_3(z)) / z`.
    pub fn c3(&self) -> RatFunc {
        let six = RatFunc::from_i64(6);
        &(&six + &self.b[3]) / &RatFunc::var()
    }
}

/// Coefficients `B_0..B_3` from `eps_1..eps_4` after the change of basis to
/// `(omega_1, theta omega_1, theta^2 omega_1, theta^3 omega_1)`.
pub fn b_coefficients(k: u32, eps: &[RatFunc; 4]) -> [RatFunc; 4] {
    let kk = k as i64;
    let c = |n: i64, p: u32| RatFunc::constant(rat(n, kk.pow(p)));
    let lin = |terms: &[(i64, u32, usize)], tail: RatFunc| {
        terms.iter().fold(tail, |acc, &(n, p, i)| &acc - &eps[i].scale(&rat(n, kk.pow(p))))
    };
    [
        lin(&[(1, 0, 0), (1, 1, 1), (2, 2, 2), (6, 3, 3)], c(24, 4)),
        lin(&[(1, 0, 1), (3, 1, 2), (11, 2, 3)], c(50, 3)),
        lin(&[(1, 0, 2), (6, 1, 3)], c(35, 2)),
        lin(&[(1, 0, 3)], c(10, 1)),
    ]
}

/// Builds the operator and checks `B_j(0) = 0` for every `j`.
pub fn assemble_pf(spec: &FamilySpec, eps: &[RatFunc; 4]) -> Result<PFOperator> {
    let b = b_coefficients(spec.k(), eps);
    for (index, bj) in b.iter().enumerate() {
        let value = bj.eval_zero()?;
        if !value.is_zero() {
            return Err(Error::NotMaximallyUnipotent { index, value });
        }
    }
    let lambda = extract_lambda(&eps[3])?;
    Ok(PFOperator::new(b, spec.k(), lambda))
}

/// Root of the (linear) denominator of `eps_4`.
pub fn extract_lambda(eps4: &RatFunc) -> Result<Rational> {
    let den = eps4.den();
    if den.degree() != Some(1) {
        return Err(Error::UnsupportedSingularityStructure(format!(
            "denominator of eps_4 has degree {:?}, expected 1",
            den.degree()
        )));
    }
    let lambda = -den.coeff(0) / den.coeff(1);
    if lambda.is_zero() {
        return Err(Error::UnsupportedSingularityStructure(
            "singular point coincides with z = 0".into(),
        ));
    }
    Ok(lambda)
}

/// First-order system matrix: ones on the superdiagonal, `-B_j` in the last row.
pub fn companion_matrix(pf: &PFOperator) -> RatMatrix {
    let mut a: RatMatrix = Default::default();
    for (i, row) in a.iter_mut().enumerate().take(3) {
        row[i + 1] = RatFunc::one();
    }
    for j in 0..4 {
        a[3][j] = -&pf.b[j];
    }
    a
}

pub fn eval_matrix_zero(a: &RatMatrix) -> Result<QMatrix> {
    let mut out: QMatrix = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j].eval_zero()?;
        }
    }
    Ok(out)
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let mut out: QMatrix = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| &a[i][l] * &b[l][j]).sum();
        }
    }
    out
}

fn is_zero_matrix(a: &QMatrix) -> bool {
    a.iter().flatten().all(Zero::is_zero)
}

/// True iff every `B_j(0) = 0` and `A(0)` is nilpotent of index exactly 4.
pub fn check_max_unipotent(pf: &PFOperator) -> bool {
    if pf.b.iter().any(|b| b.eval_zero().map_or(true, |v| !v.is_zero())) {
        return false;
    }
    let Ok(a0) = eval_matrix_zero(&companion_matrix(pf)) else {
        return false;
    };
    let a2 = mat_mul(&a0, &a0);
    let a3 = mat_mul(&a2, &a0);
    let a4 = mat_mul(&a3, &a0);
    !is_zero_matrix(&a3) && is_zero_matrix(&a4)
}

/// `(6 + B_3)/z = 6/z + 2/(z - lambda)`, equivalently `B_3 = 2z/(z - lambda)`.
pub fn verify_c3(pf: &PFOperator) -> bool {
    let z = RatFunc::var();
    let Ok(shifted) = RatFunc::normalize(UniPoly::from_coeffs(vec![-pf.lambda.clone(), Rational::one()]), UniPoly::one())
    else {
        return false;
    };
    if shifted.is_zero() {
        return false;
    }
    let expected = &(&RatFunc::from_i64(6) / &z) + &(&RatFunc::from_i64(2) / &shifted);
    pf.c3() == expected
}

/// JSON derivation record shared with the command-line front end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationRecord {
    pub family: FamilyRecord,
    pub epsilons: Vec<RatFuncRecord>,
    #[serde(rename = "B")]
    pub b: Vec<RatFuncRecord>,
    pub lambda: String,
    pub unipotent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub k: u32,
    pub weights: [u32; NVARS],
}

/// A rational function as display text plus exact coefficient lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatFuncRecord {
    pub text: String,
    #[serde(flatten)]
    pub value: RatFunc,
}

impl From<&RatFunc> for RatFuncRecord {
    fn from(f: &RatFunc) -> Self {
        RatFuncRecord {
            text: f.to_string(),
            value: f.clone(),
        }
    }
}

impl DerivationRecord {
    pub fn new(spec: &FamilySpec, eps: &[RatFunc; 4], pf: &PFOperator) -> Self {
        DerivationRecord {
            family: FamilyRecord {
                k: spec.k(),
                weights: *spec.weights(),
            },
            epsilons: eps.iter().map(RatFuncRecord::from).collect(),
            b: pf.b.iter().map(RatFuncRecord::from).collect(),
            lambda: pf.lambda.to_string(),
            unipotent: check_max_unipotent(pf),
        }
    }
}

/// `numerator / (scale * (z - root))`
#[cfg(test)]
pub(crate) fn simple_pole(numerator: UniPoly, scale: i64, root: i64) -> RatFunc {
    RatFunc::normalize(numerator, UniPoly::from_i64(&[-root, 1]).scale(&int(scale)))
        .expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: MonomialOrder = MonomialOrder::Grevlex;

    fn lin(a: i64, b: i64) -> UniPoly {
        // a*z + b
        UniPoly::from_i64(&[b, a])
    }

    #[test]
    fn omega_numerators() {
        let spec = FamilySpec::builtin(5).unwrap();
        let w1 = build_omega_ell(&spec, 1, G);
        assert_eq!(w1.numerator, MultiPoly::constant(G, RatFunc::var()));
        assert_eq!(w1.pole_order, 1);
        let w2 = build_omega_ell(&spec, 2, G);
        let psi2 = RatFunc::from_poly(UniPoly::monomial(int(-1), 2));
        assert_eq!(w2.numerator, MultiPoly::monomial(G, spec.product_monomial(), psi2));
        let w3 = build_omega_ell(&spec, 3, G);
        let (e, c) = w3.numerator.leading_term().unwrap();
        assert_eq!(e.0, [2; 5]);
        assert_eq!(c, &RatFunc::from_poly(UniPoly::monomial(int(2), 3)));
        assert_eq!(spec.weighted_degree(&w3.numerator).unwrap(), 10);
        for ell in 1..=5 {
            assert!(build_omega_ell(&spec, ell, G).check_degree().is_ok());
        }
    }

    #[test]
    fn reduce_step_with_zero_cofactors() {
        let spec = FamilySpec::builtin(5).unwrap();
        let eta = build_omega_ell(&spec, 3, G);
        let dec = CofactorDecomposition {
            epsilon: RatFunc::one(),
            cofactors: vec![MultiPoly::zero(G); 5],
        };
        let next = pole_reduce_step(&eta, &dec).unwrap();
        assert!(next.numerator.is_zero());
        assert_eq!(next.pole_order, 2);
    }

    #[test]
    fn reduce_step_with_euler_cofactors() {
        // A_j = c * k_j * x_j * m for a monomial m of degree (l-2)k:
        // sum_j A_j dQ/dx_j = c*m*k*Q by Euler, and
        // sum_j dA_j/dx_j = c * sum_j k_j (1 + e_j(m)) m = c * (k + deg m) * m.
        let spec = FamilySpec::builtin(6).unwrap();
        let ell = 3;
        let m = MultiPoly::monomial(G, spec.product_monomial(), RatFunc::from_i64(7));
        let cofactors: Vec<Poly> = (0..5)
            .map(|j| {
                m.mul(&MultiPoly::var(G, j))
                    .scale(&RatFunc::from_i64(spec.weights()[j] as i64))
            })
            .collect();
        let q = family_polynomial(&spec, G);
        let numerator = m.mul(&q).scale(&RatFunc::from_i64(spec.k() as i64));
        let eta = RationalForm {
            numerator,
            pole_order: ell,
            spec,
        };
        let dec = CofactorDecomposition {
            epsilon: RatFunc::zero(),
            cofactors,
        };
        let next = pole_reduce_step(&eta, &dec).unwrap();
        let k = spec.k() as i64;
        let expected = m.scale(&RatFunc::constant(rat(k + k, ell as i64 - 1)));
        assert_eq!(next.numerator, expected);
    }

    #[test]
    fn quintic_epsilons() {
        let spec = FamilySpec::builtin(5).unwrap();
        let eps = derive_epsilons(&spec).unwrap();
        assert_eq!(eps[0], simple_pole(UniPoly::from_i64(&[1]), 625, 1));
        assert_eq!(eps[1], simple_pole(UniPoly::from_i64(&[-3]), 25, 1));
        assert_eq!(eps[2], simple_pole(UniPoly::from_i64(&[1]), 1, 1));
        assert_eq!(eps[3], simple_pole(UniPoly::from_i64(&[-2]), 1, 1));
    }

    #[test]
    fn operator_assembly_quintic() {
        let spec = FamilySpec::builtin(5).unwrap();
        let eps = derive_epsilons(&spec).unwrap();
        let pf = assemble_pf(&spec, &eps).unwrap();
        assert_eq!(pf.lambda, int(1));
        assert_eq!(pf.b[3], simple_pole(lin(2, 0), 1, 1));
        let a = companion_matrix(&pf);
        assert!(a[0][1].is_one());
        assert!(a[0][0].is_zero());
        assert_eq!(a[3][3], simple_pole(lin(-2, 0), 1, 1));
        assert!(check_max_unipotent(&pf));
        assert!(verify_c3(&pf));
    }

    #[test]
    fn b3_for_sextic() {
        let eps4 = simple_pole(lin(-1, -20), 3, 4);
        let eps = [RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), eps4];
        let b = b_coefficients(6, &eps);
        assert_eq!(b[3], simple_pole(lin(2, 0), 1, 4));
    }

    #[test]
    fn lambda_extraction() {
        assert_eq!(extract_lambda(&simple_pole(lin(0, -2), 1, 1)).unwrap(), int(1));
        assert_eq!(
            extract_lambda(&simple_pole(lin(-3, -1280), 4, 256)).unwrap(),
            int(256)
        );
        let quad = RatFunc::normalize(UniPoly::one(), UniPoly::from_i64(&[-1, 0, 1])).unwrap();
        assert!(matches!(
            extract_lambda(&quad),
            Err(Error::UnsupportedSingularityStructure(_))
        ));
        let at_origin = RatFunc::normalize(UniPoly::one(), UniPoly::var()).unwrap();
        assert!(matches!(
            extract_lambda(&at_origin),
            Err(Error::UnsupportedSingularityStructure(_))
        ));
    }

    #[test]
    fn unipotency_checks() {
        let zero = PFOperator::new(Default::default(), 5, int(1));
        assert!(check_max_unipotent(&zero));
        let a0 = eval_matrix_zero(&companion_matrix(&zero)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if j == i + 1 { int(1) } else { int(0) };
                assert_eq!(a0[i][j], expected);
            }
        }
        let mut b: [RatFunc; 4] = Default::default();
        b[3] = RatFunc::one();
        assert!(!check_max_unipotent(&PFOperator::new(b, 5, int(1))));
    }

    #[test]
    fn c3_relation_rejects_mismatch() {
        let b3 = simple_pole(lin(1, 0), 1, 1);
        let pf = PFOperator::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), b3], 5, int(1));
        assert!(!verify_c3(&pf));
        let b3 = simple_pole(lin(2, 0), 1, 1);
        let pf = PFOperator::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), b3], 5, int(2));
        assert!(!verify_c3(&pf));
    }
}
