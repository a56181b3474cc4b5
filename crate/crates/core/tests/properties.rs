use mirrorpf_core::exact::{int, rat, RatFunc, Rational, UniPoly};
use mirrorpf_core::griffiths::{assemble_pf, companion_matrix, derive, derive_epsilons};
use mirrorpf_core::groebner::{buchberger, MonomialOrder};
use mirrorpf_core::mirror::{extract_n, h_sequence, q_coefficients, synthesize_a, MirrorData};
use mirrorpf_core::multipoly::{family_polynomial, jacobian_generators, ExponentVector, FamilySpec, MultiPoly};
use mirrorpf_core::series::{solve_homogeneous, solve_inhomogeneous, system_residual, PowerSeries};
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(coeffs: &[i64]) -> UniPoly {
    UniPoly::from_i64(coeffs)
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 1..=max_len)
}

fn nonzero_coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    coeffs(max_len).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (coeffs(4), nonzero_coeffs(3)).prop_map(|(n, d)| RatFunc::normalize(poly(&n), poly(&d)).unwrap())
}

/// Rational functions with a nonzero constant term in the denominator.
fn regular_ratfunc() -> impl Strategy<Value = RatFunc> {
    (coeffs(3), 1i64..=9, coeffs(2)).prop_map(|(n, d0, d)| {
        let mut den = vec![d0];
        den.extend(d);
        RatFunc::normalize(poly(&n), poly(&den)).unwrap()
    })
}

fn exps() -> impl Strategy<Value = ExponentVector> {
    prop::array::uniform5(0u16..=2).prop_map(ExponentVector)
}

fn mpoly(order: MonomialOrder) -> impl Strategy<Value = MultiPoly<Rational>> {
    prop::collection::vec((exps(), -5i64..=5), 0..5)
        .prop_map(move |ts| MultiPoly::from_terms(order, ts.into_iter().map(|(e, c)| (e, int(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn normalize_ignores_common_factors(n in coeffs(4), d in nonzero_coeffs(3), c in nonzero_coeffs(3)) {
        let plain = RatFunc::normalize(poly(&n), poly(&d)).unwrap();
        let scaled = RatFunc::normalize(&poly(&n) * &poly(&c), &poly(&d) * &poly(&c)).unwrap();
        prop_assert_eq!(&plain, &scaled);
        prop_assert!(plain.den().leading().is_some_and(|l| *l == int(1)));
    }

    #[test]
    fn psi_to_z_round_trip(f in ratfunc(), k in prop::sample::select(vec![5usize, 6, 8, 10])) {
        let in_psi = f.substitute_inverse_power(k);
        prop_assert_eq!(in_psi.psi_to_z(k).unwrap(), f);
    }

    #[test]
    fn multipoly_ring_laws(
        a in mpoly(MonomialOrder::Grevlex),
        b in mpoly(MonomialOrder::Grevlex),
        c in mpoly(MonomialOrder::Grevlex),
    ) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        for j in 0..5 {
            // Leibniz rule
            prop_assert_eq!(
                a.mul(&b).partial_derivative(j),
                a.partial_derivative(j).mul(&b).add(&a.mul(&b.partial_derivative(j)))
            );
        }
    }

    #[test]
    fn power_series_identities(c in prop::collection::vec(-6i64..=6, 1..8)) {
        let n = 10;
        let mut a = vec![Rational::from_integer(0.into())];
        a.extend(c.iter().map(|&x| rat(x, 3)));
        let s = PowerSeries::from_coeffs(a, n);
        let one = PowerSeries::one(n);
        let unit = one.add(&s);
        prop_assert_eq!(unit.mul(&unit.reciprocal().unwrap()), one.clone());
        prop_assert_eq!(unit.log().unwrap().exp().unwrap(), unit.clone());
        prop_assert_eq!(s.exp().unwrap().log().unwrap(), s.clone());
        // theta = z d/dz
        let zd = PowerSeries::var(n).mul(&s.derivative());
        let th = s.theta();
        prop_assert_eq!(zd.valid_coeffs(), &th.valid_coeffs()[..n - 1]);
    }

    #[test]
    fn ratfunc_series_expansion_multiplies(f in regular_ratfunc(), g in regular_ratfunc()) {
        let n = 8;
        let fs = PowerSeries::from_ratfunc(&f, n).unwrap();
        let gs = PowerSeries::from_ratfunc(&g, n).unwrap();
        prop_assert_eq!(PowerSeries::from_ratfunc(&(&f * &g), n).unwrap(), fs.mul(&gs));
        prop_assert_eq!(PowerSeries::from_ratfunc(&(&f + &g), n).unwrap(), fs.add(&gs));
    }

    #[test]
    fn multicover_round_trip(n in prop::collection::vec(-1_000_000i64..=1_000_000, 1..25)) {
        let n: Vec<BigInt> = n.into_iter().map(BigInt::from).collect();
        prop_assert_eq!(extract_n(&synthesize_a(&n)).unwrap(), n);
    }

    #[test]
    fn solver_residual_vanishes(b in prop::collection::vec(regular_ratfunc(), 4)) {
        // companion systems with B_j(0) = 0: multiply each B_j by z
        let z = RatFunc::var();
        let b: Vec<RatFunc> = b.iter().map(|f| f * &z).collect();
        let mut a = vec![vec![RatFunc::zero(); 4]; 4];
        for i in 0..3 {
            a[i][i + 1] = RatFunc::one();
        }
        for j in 0..4 {
            a[3][j] = -&b[j];
        }
        let n = 10;
        let w = solve_homogeneous(&a, n).unwrap();
        let v = solve_inhomogeneous(&a, &w, n).unwrap();
        for r in system_residual(&a, &w, None).unwrap().0 {
            prop_assert!(r.vanishes_through(n));
        }
        for r in system_residual(&a, &v, Some(&w)).unwrap().0 {
            prop_assert!(r.vanishes_through(n));
        }
        prop_assert!(v[0].coeff(0).unwrap() == &int(0));
        let longer = solve_homogeneous(&a, n + 4).unwrap();
        prop_assert_eq!(&longer[0].valid_coeffs()[..n], w[0].valid_coeffs());
    }
}

/// Jacobian ideal of the quintic at `psi = 2` over the rationals.
fn quintic_jacobian_at_two() -> Vec<MultiPoly<Rational>> {
    let o = MonomialOrder::Grevlex;
    (0..5)
        .map(|j| {
            let mut fourth = [0u16; 5];
            fourth[j] = 4;
            let mut p = MultiPoly::monomial(o, ExponentVector(fourth), int(5));
            let mut others = [1u16; 5];
            others[j] = 0;
            p.add_term(ExponentVector(others), &int(-10));
            p
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_form_is_linear_and_kills_the_ideal(
        p in mpoly(MonomialOrder::Grevlex),
        q in mpoly(MonomialOrder::Grevlex),
        m in mpoly(MonomialOrder::Grevlex),
        a in -4i64..=4,
        i in 0usize..5,
    ) {
        let gens = quintic_jacobian_at_two();
        let gb = buchberger(&gens, MonomialOrder::Grevlex);
        let lhs = gb.normal_form(&p.scale(&int(a)).add(&q));
        let rhs = gb.normal_form(&p).scale(&int(a)).add(&gb.normal_form(&q));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(gb.normal_form(&m.mul(&gens[i])).is_zero());
        let (rem, cof) = gb.divide_with_cofactors(&p);
        let rebuilt = cof.iter().zip(&gens).fold(rem, |acc, (c, g)| acc.add(&c.mul(g)));
        prop_assert_eq!(rebuilt, p);
    }
}

#[test]
fn epsilons_independent_of_monomial_order() {
    let spec = FamilySpec::builtin(5).unwrap();
    let grevlex = derive(&spec, MonomialOrder::Grevlex).unwrap();
    let grlex = derive(&spec, MonomialOrder::Grlex).unwrap();
    assert_eq!(grevlex.epsilons, grlex.epsilons);
    assert!(grlex.certificates_hold());
}

#[test]
fn euler_identity_on_family_polynomials() {
    for spec in FamilySpec::builtins() {
        let q = family_polynomial(&spec, MonomialOrder::Grevlex);
        let k = RatFunc::from_i64(spec.k() as i64);
        assert_eq!(q.euler(spec.weights()), q.scale(&k));
        let gens = jacobian_generators(&q);
        let sum = gens.iter().enumerate().fold(MultiPoly::zero(MonomialOrder::Grevlex), |acc, (j, g)| {
            let xg = g.mul(&MultiPoly::var(MonomialOrder::Grevlex, j));
            acc.add(&xg.scale(&RatFunc::from_i64(spec.weights()[j] as i64)))
        });
        assert_eq!(sum, q.scale(&k));
    }
}

#[test]
fn truncation_stability_on_families() {
    for spec in FamilySpec::builtins() {
        let pf = assemble_pf(&spec, &derive_epsilons(&spec).unwrap()).unwrap();
        let a = companion_matrix(&pf);
        let short = solve_homogeneous(&a, 12).unwrap();
        let long = solve_homogeneous(&a, 20).unwrap();
        let vs = solve_inhomogeneous(&a, &short, 12).unwrap();
        let vl = solve_inhomogeneous(&a, &long, 20).unwrap();
        for i in 0..4 {
            assert_eq!(short[i].valid_coeffs(), &long[i].valid_coeffs()[..12]);
            assert_eq!(vs[i].valid_coeffs(), &vl[i].valid_coeffs()[..12]);
        }
    }
}

#[test]
fn gauge_rescaling_leaves_instantons_unchanged() {
    let spec = FamilySpec::builtin(6).unwrap();
    let pf = assemble_pf(&spec, &derive_epsilons(&spec).unwrap()).unwrap();
    let a = companion_matrix(&pf);
    let n = 14;
    let w = solve_homogeneous(&a, n).unwrap();
    let v = solve_inhomogeneous(&a, &w, n).unwrap();
    let c1 = -&pf.lambda * int(3);
    let c2 = rat(1, 46656);
    let counts = |scale: Rational| {
        let data = MirrorData::from_periods(&w[0].scale(&scale), &v[0].scale(&scale)).unwrap();
        let h = h_sequence(&pf.lambda, &data, 8).unwrap();
        extract_n(&q_coefficients(&c1, &c2, &h).unwrap()).unwrap()
    };
    let base = counts(int(1));
    assert_eq!(base[1], BigInt::from(7884));
    assert_eq!(counts(rat(-7, 3)), base);
    assert_eq!(counts(rat(1, 1000)), base);
}
