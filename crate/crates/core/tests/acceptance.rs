//! One pass/fail line per acceptance criterion; exits nonzero if any fails.

use std::time::Instant;

use mirrorpf_core::exact::{int, RatFunc, Rational, UniPoly};
use mirrorpf_core::griffiths::{
    assemble_pf, check_max_unipotent, companion_matrix, derive, eval_matrix_zero, mat_mul, verify_c3, Derivation,
    PFOperator,
};
use mirrorpf_core::groebner::MonomialOrder;
use mirrorpf_core::mirror::{curve_counts, mirror_data, schubert_tangent_lines, synthesize_a};
use mirrorpf_core::multipoly::{family_polynomial, FamilySpec};
use mirrorpf_core::series::apply_log_operator;
use num_bigint::BigInt;
use num_traits::{One, Zero};

const ORDER: usize = 30;
const DEPTH: usize = 20;

fn frac(num: &[i64], den: &[i64]) -> RatFunc {
    RatFunc::normalize(UniPoly::from_i64(num), UniPoly::from_i64(den)).unwrap()
}

/// Expected reduction coefficients, written as numerator/denominator in `z`.
fn table2(k: u32) -> [RatFunc; 4] {
    match k {
        5 => [frac(&[1], &[-625, 625]), frac(&[-3], &[-25, 25]), frac(&[1], &[-1, 1]), frac(&[-2], &[-1, 1])],
        6 => [
            frac(&[1], &[-1296, 324]),
            frac(&[-5], &[-72, 18]),
            frac(&[50, -1], &[-72, 18]),
            frac(&[-20, -1], &[-12, 3]),
        ],
        8 => [
            frac(&[1], &[-4096, 16]),
            frac(&[-15 * 256, -15], &[-256 * 512, 512]),
            frac(&[5 * 1280, -15], &[-256 * 64, 64]),
            frac(&[-1280, -3], &[-1024, 4]),
        ],
        10 => [
            frac(&[5], &[-4 * 12500, 4]),
            frac(&[-37500, -7], &[-200 * 12500, 200]),
            frac(&[62500, -7], &[-20 * 12500, 20]),
            frac(&[-12500, -1], &[-12500, 1]),
        ],
        _ => unreachable!(),
    }
}

fn lambda(k: u32) -> i64 {
    match k {
        5 => 1,
        6 => 4,
        8 => 256,
        10 => 12500,
        _ => unreachable!(),
    }
}

fn table3(k: u32) -> [&'static str; 5] {
    match k {
        5 => ["5", "2875", "609250", "317206375", "242467530000"],
        6 => ["3", "7884", "6028452", "11900417220", "34600752005688"],
        8 => ["2", "29504", "128834912", "1423720546880", "23193056024793312"],
        10 => ["2", "462400", "24431571200", "3401788732948800", "700309317702649312000"],
        _ => unreachable!(),
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Constant-term period `sum_m (km)!/prod_j (w_j m)! k^{-km} z^m`.
fn period_oracle(spec: &FamilySpec, m: u64) -> Rational {
    let k = spec.k() as u64;
    let den: BigInt = spec.weights().iter().map(|&w| factorial(w as u64 * m)).product();
    Rational::new(factorial(k * m), den * BigInt::from(k).pow((k * m) as u32))
}

struct FamilyRun {
    spec: FamilySpec,
    derivation: Derivation,
    pf: PFOperator,
    n: Vec<BigInt>,
    seconds: f64,
}

fn run(spec: FamilySpec) -> FamilyRun {
    let start = Instant::now();
    let derivation = derive(&spec, MonomialOrder::Grevlex).expect("derivation");
    let pf = assemble_pf(&spec, &derivation.epsilons).expect("operator");
    let y = curve_counts(&spec, &pf, DEPTH, ORDER, None).expect("curve counts");
    FamilyRun {
        spec,
        derivation,
        pf,
        n: y.n.unwrap(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

struct Ledger {
    failures: usize,
}

impl Ledger {
    fn record(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        let status = if ok { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {id}: {name} ({detail})");
        if !ok {
            self.failures += 1;
        }
    }
}

fn main() {
    let runs: Vec<FamilyRun> = std::thread::scope(|s| {
        let handles: Vec<_> = FamilySpec::builtins().into_iter().map(|spec| s.spawn(move || run(spec))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut ledger = Ledger { failures: 0 };

    let mismatched: Vec<String> = runs
        .iter()
        .flat_map(|r| {
            let expected = table2(r.spec.k());
            (0..4)
                .filter(move |&i| r.derivation.epsilons[i] != expected[i])
                .map(move |i| format!("k{} eps{}", r.spec.k(), i + 1))
        })
        .collect();
    let slowest = runs.iter().map(|r| r.seconds).fold(0.0, f64::max);
    ledger.record(
        1,
        "reduction coefficients for k = 5, 6, 8, 10",
        mismatched.is_empty(),
        format!("16 exact comparisons, {} mismatched, slowest family {slowest:.2}s", mismatched.len()),
    );

    let unipotent = runs.iter().all(|r| {
        let b_zero = r.pf.b.iter().all(|b| b.eval_zero().is_ok_and(|v| v.is_zero()));
        let a0 = eval_matrix_zero(&companion_matrix(&r.pf)).unwrap();
        let a3 = mat_mul(&mat_mul(&a0, &a0), &a0);
        let a4 = mat_mul(&a3, &a0);
        let nonzero = |m: &[[Rational; 4]; 4]| m.iter().flatten().any(|v| !v.is_zero());
        b_zero && nonzero(&a3) && !nonzero(&a4) && check_max_unipotent(&r.pf)
    });
    ledger.record(2, "B_j(0) = 0, A(0)^3 != 0, A(0)^4 = 0", unipotent, "4 families".into());

    let singular = runs.iter().all(|r| {
        let l = int(lambda(r.spec.k()));
        let expected_b3 = &frac(&[0, 2], &[1]) / &RatFunc::normalize(UniPoly::from_coeffs(vec![-l.clone(), int(1)]), UniPoly::one()).unwrap();
        r.pf.lambda == l && r.pf.b[3] == expected_b3 && verify_c3(&r.pf)
    });
    ledger.record(
        3,
        "B_3 = 2z/(z - lambda), lambda = 1, 4, 256, 12500, C_3 relation",
        singular,
        runs.iter().map(|r| format!("k{}: {}", r.spec.k(), r.pf.lambda)).collect::<Vec<_>>().join(", "),
    );

    let table_ok = runs.iter().all(|r| (0..5).all(|j| r.n[j].to_string() == table3(r.spec.k())[j]));
    ledger.record(
        4,
        "instanton numbers n0..n4 for all families",
        table_ok,
        format!("20 entries, k10 n4 = {}", runs[3].n[4]),
    );

    let integral = runs.iter().all(|r| r.n.len() == DEPTH + 1);
    ledger.record(
        5,
        "n1..n20 integral for all families",
        integral,
        format!("order {ORDER}, depth {DEPTH}"),
    );

    let k8 = runs.iter().find(|r| r.spec.k() == 8).unwrap();
    let schubert = schubert_tangent_lines(8) == BigInt::from(14752) && k8.n[1] == BigInt::from(2 * 14752);
    ledger.record(6, "schubert(8) = 14752 and n1(k=8) = 2 * 14752", schubert, format!("n1 = {}", k8.n[1]));

    let annihilated = runs.iter().all(|r| {
        let data = mirror_data(&r.pf, ORDER).unwrap();
        let oracle = (0..ORDER as u64).all(|m| data.f0.coeff(m as usize).unwrap() == &period_oracle(&r.spec, m));
        let residual = apply_log_operator(&r.pf.b, &data.f0).unwrap();
        oracle && residual.vanishes_through(ORDER - 4)
    });
    ledger.record(
        7,
        "operator annihilates f0 through order N - 4",
        annihilated,
        format!("N = {ORDER}, f0 also equals the constant-term period"),
    );

    let mut failed_props = Vec::new();
    for r in &runs {
        let k = r.spec.k();
        let pf_longer = curve_counts(&r.spec, &r.pf, DEPTH, ORDER + 10, None).unwrap();
        if pf_longer.n.as_ref() != Some(&r.n) {
            failed_props.push(format!("k{k} order independence"));
        }
        let a: Vec<Rational> = synthesize_a(&r.n);
        let y = curve_counts(&r.spec, &r.pf, DEPTH, ORDER, None).unwrap();
        if a != y.a {
            failed_props.push(format!("k{k} multicover round trip"));
        }
        if !r.derivation.certificates_hold()
            || !r.derivation.basis.is_groebner()
            || !r.derivation.basis.transform_is_exact()
        {
            failed_props.push(format!("k{k} reduction certificates"));
        }
        let q = family_polynomial(&r.spec, MonomialOrder::Grevlex);
        if q.euler(r.spec.weights()) != q.scale(&RatFunc::from_i64(k as i64)) {
            failed_props.push(format!("k{k} Euler identity"));
        }
    }
    ledger.record(
        8,
        "order independence, multicover round trip, certificates, Euler identity",
        failed_props.is_empty(),
        if failed_props.is_empty() {
            "16 checks".into()
        } else {
            failed_props.join(", ")
        },
    );

    if ledger.failures > 0 {
        println!("{} criteria failed", ledger.failures);
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
