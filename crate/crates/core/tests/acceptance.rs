//! Acceptance suite. Every criterion prints one PASS/FAIL line; the whole
//! suite runs twice and the second pass must reproduce the first byte for
//! byte. Exits nonzero if anything fails.

mod common;

use std::fmt::Write as _;
use std::time::Instant;

use algdyn::analysis::{is_torsion, mixing_search, verify_not_mixing, MixingStatus};
use algdyn::analytic::{
    variety_measure_check, vk_decompose, vk_verify_uniqueness, zero_divisor_check, FiniteSupport, TrigLift,
};
use algdyn::entropy::{
    entropy_classify, mahler_d1_exact, mahler_quadrature, mahler_roots_of_unity, periodic_point_count,
    periodic_point_growth, EntropyOptions, EntropyValue,
};
use algdyn::grobner::{strong_groebner_rows, Limits, ModElem, MonomialOrder, Term};
use algdyn::parse::parse_poly;
use algdyn::report::{self, AnalysisOptions, SystemSpec};
use algdyn::rigidity::Verdict;
use algdyn::{LaurentPoly, ModulePresentation};
use common::{in_bounded_span, monomials_upto, poly};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    /// Everything computed, for the determinism comparison.
    report: String,
    detail: String,
}

fn pp(s: &str, d: usize) -> LaurentPoly {
    parse_poly(s, Some(d)).unwrap()
}

fn spec(name: &str, d: usize, relations: &[&str]) -> SystemSpec {
    let rel: Vec<String> = relations.iter().map(|r| format!("{r:?}")).collect();
    SystemSpec::from_json(&format!(
        r#"{{"name": "{name}", "d": {d}, "relations": [{}]}}"#,
        rel.join(", ")
    ))
    .unwrap()
}

fn ledrappier_end_to_end() -> Outcome {
    let start = Instant::now();
    let opts = AnalysisOptions::default();
    let led = spec("ledrappier", 2, &["1 + u1 + u2"]);
    let doc = report::analyze(&led, &opts).unwrap();
    let rig = report::rigidity(&led, &led, &opts).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let s = &doc.systems[0];
    let mixing_ok = matches!(s.mixing.value, MixingStatus::NoWitnessUpTo { bound } if bound >= 4);
    let verdict = rig.rigidity.as_ref().map(|r| r.verdict.clone());
    let pass = s.connected.value.connected
        && mixing_ok
        && s.entropy.value.finite
        && verdict == Some(Verdict::Rigid)
        && secs < 30.0;
    Outcome {
        pass,
        report: format!("{}\n{}", doc.to_json(), rig.to_json()),
        detail: format!(
            "connected={}, mixing={:?}, entropy finite={}, self-map verdict={:?}, {:.2}s",
            s.connected.value.connected, s.mixing.value, s.entropy.value.finite, verdict, secs
        ),
    }
}

fn mahler_oracles() -> Outcome {
    let start = Instant::now();
    let f = pp("1 + u1 + u2", 2);
    let q = mahler_quadrature(&f, 512).unwrap();
    let r = mahler_roots_of_unity(&f, 64).unwrap();
    let secs = start.elapsed().as_secs_f64();
    #[allow(clippy::approx_constant)]
    let inside = |x: f64| (0.318..=0.328).contains(&x);
    let pass = (q.estimate - r.estimate).abs() < 5e-3 && inside(q.estimate) && inside(r.estimate) && secs < 60.0;
    Outcome {
        pass,
        report: format!("{:?}\n{:?}", q, r),
        detail: format!(
            "quadrature {:.10}, roots of unity {:.10}, gap {:.2e}, {:.2}s",
            q.estimate,
            r.estimate,
            (q.estimate - r.estimate).abs(),
            secs
        ),
    }
}

fn one_variable_exactness() -> Outcome {
    let f = pp("u1 - 2", 1);
    let exact = mahler_d1_exact(&f).unwrap();
    let q = mahler_quadrature(&f, 512).unwrap();
    let ln2 = 2f64.ln();
    let mut counts_ok = true;
    let mut report = format!("{exact:?}\n{q:?}\n");
    for n in 1..=30u32 {
        let c = periodic_point_count(&f, n).unwrap();
        counts_ok &= c == (BigInt::from(1) << n) - 1;
        writeln!(report, "{n} {c}").unwrap();
    }
    let growth = periodic_point_growth(&f, &[30]).unwrap()[0].growth.unwrap();
    writeln!(report, "{growth:?}").unwrap();
    let pass = (exact.estimate - ln2).abs() < 1e-9
        && (q.estimate - ln2).abs() < 1e-3
        && counts_ok
        && (growth - ln2).abs() < 1e-3;
    Outcome {
        pass,
        report,
        detail: format!(
            "root formula err {:.1e}, quadrature err {:.1e}, counts 2^N-1 for N<=30: {}, growth err {:.1e}",
            (exact.estimate - ln2).abs(),
            (q.estimate - ln2).abs(),
            counts_ok,
            (growth - ln2).abs()
        ),
    }
}

fn infinite_entropy() -> Outcome {
    let opts = AnalysisOptions::default();
    let mut pass = true;
    let mut report = String::new();
    for d in 1..=2 {
        let m = ModulePresentation::free(d, 1).unwrap();
        let e = entropy_classify(&m, &EntropyOptions::default()).unwrap();
        pass &= !is_torsion(&m) && !e.finite && e.value == EntropyValue::Infinite;
        writeln!(report, "{e:?}").unwrap();
    }
    let free1 = spec("free", 1, &[]);
    let free2 = spec("free", 2, &[]);
    let pairs = [
        (spec("ledrappier", 2, &["1 + u1 + u2"]), free2),
        (spec("times two", 1, &["u1 - 2"]), free1),
    ];
    let mut verdicts = Vec::new();
    for (x1, x2) in &pairs {
        let doc = report::rigidity(x1, x2, &opts).unwrap();
        let v = doc.rigidity.as_ref().unwrap().verdict.clone();
        pass &= v == Verdict::NotRigid;
        report += &doc.to_json();
        verdicts.push(v);
    }
    Outcome {
        pass,
        report,
        detail: format!("free R_1, R_2 infinite entropy; verdicts into them {verdicts:?}"),
    }
}

fn non_mixing_certificate() -> Outcome {
    let m = ModulePresentation::principal(pp("u1*u2 - 1", 2)).unwrap();
    let status = mixing_search(&m, 4).unwrap();
    let (pass, detail) = match &status {
        MixingStatus::NotMixing { witness, certificate } => {
            let verified = verify_not_mixing(&m, witness, certificate).unwrap();
            (
                witness == &[1, 1] && verified,
                format!("witness {witness:?}, certificate verified: {verified}"),
            )
        }
        other => (false, format!("got {other:?}")),
    };
    Outcome {
        pass,
        report: format!("{status:?}"),
        detail,
    }
}

/// Values at the four points of `{-1, 1}^2`, where Laurent monomials are
/// units, so `f | q` forces `f(p) | q(p)`.
fn unit_values(p: &LaurentPoly) -> [i64; 4] {
    let mut out = [0i64; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let signs = [if k & 1 == 0 { 1 } else { -1 }, if k & 2 == 0 { 1 } else { -1 }];
        *o = p
            .terms()
            .map(|(m, c)| {
                let s: i64 =
                    m.0.iter()
                        .zip(signs)
                        .map(|(&e, s)| if e.rem_euclid(2) == 1 { s } else { 1 })
                        .product();
                s * c.to_i64().unwrap()
            })
            .sum();
    }
    out
}

fn torsion_oracle() -> Outcome {
    let mons = monomials_upto(2, 2);
    let mut all = vec![LaurentPoly::zero(2)];
    for m in &mons {
        all = all
            .into_iter()
            .flat_map(|p| (-2i64..=2).map(move |c| &p + &poly(2, &[(m.clone(), c)])))
            .collect();
    }
    let candidates: Vec<(LaurentPoly, [i64; 4])> = all
        .iter()
        .filter(|q| !q.is_zero())
        .map(|q| (q.clone(), unit_values(q)))
        .collect();
    let mut agree = 0usize;
    let mut disagree = Vec::new();
    let mut torsion_count = 0usize;
    for f in &all {
        let m = ModulePresentation::new(2, 1, vec![vec![f.clone()]]).unwrap();
        let engine = is_torsion(&m);
        let fv = unit_values(f);
        let divides = |q: &LaurentPoly, qv: &[i64; 4]| {
            fv.iter()
                .zip(qv)
                .all(|(&a, &b)| if a == 0 { b == 0 } else { b % a == 0 })
                && !f.is_zero()
                && q.div_exact(f).unwrap().is_some()
        };
        let brute = candidates.iter().any(|(q, qv)| divides(q, qv));
        torsion_count += engine as usize;
        if engine == brute {
            agree += 1;
        } else {
            disagree.push(f.to_string());
        }
    }
    Outcome {
        pass: disagree.is_empty(),
        report: format!("{agree} {torsion_count} {disagree:?}"),
        detail: format!(
            "{agree}/{} cyclic systems agree ({torsion_count} torsion){}",
            all.len(),
            if disagree.is_empty() {
                String::new()
            } else {
                format!(", first mismatch {}", disagree[0])
            }
        ),
    }
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize, max_terms: usize, deg: i32, cmax: i64) -> LaurentPoly {
    let terms: Vec<(Vec<i32>, i64)> = (0..rng.gen_range(1..=max_terms))
        .map(|_| {
            let mut e = vec![0i32; d];
            let total = rng.gen_range(0..=deg);
            for _ in 0..total {
                e[rng.gen_range(0..d)] += 1;
            }
            (e, rng.gen_range(-cmax..=cmax))
        })
        .collect();
    poly(d, &terms)
}

fn elem(p: &LaurentPoly, order: &MonomialOrder) -> ModElem {
    let terms = p
        .terms()
        .map(|(m, c)| {
            (
                Term {
                    pos: 0,
                    exp: m.0.iter().map(|&e| e as u32).collect(),
                },
                c.clone(),
            )
        })
        .collect();
    ModElem::from_terms(terms, order)
}

fn groebner_membership() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let order = MonomialOrder::grevlex();
    let mut agree = 0;
    let mut members = 0;
    let mut mismatches = Vec::new();
    let mut ideals = 0;
    while ideals < 200 {
        let d = rng.gen_range(1..=2);
        let gens: Vec<LaurentPoly> = (0..rng.gen_range(1..=3))
            .map(|_| random_poly(&mut rng, d, 4, 3, 5))
            .collect();
        if gens.iter().all(|g| g.is_zero()) {
            continue;
        }
        ideals += 1;
        let mut v = LaurentPoly::zero(d);
        for g in &gens {
            v = &v + &(g * &random_poly(&mut rng, d, 3, 2, 5));
        }
        if rng.gen_bool(0.5) {
            v = &v + &random_poly(&mut rng, d, 2, 3, 3);
        }
        let rows: Vec<Vec<LaurentPoly>> = gens.iter().filter(|g| !g.is_zero()).map(|g| vec![g.clone()]).collect();
        let basis = strong_groebner_rows(d, 1, &rows, &order, &Limits::default()).unwrap();
        let engine = basis.contains(&elem(&v, &order));
        let oracle = in_bounded_span(&v, &gens, 8);
        members += engine as usize;
        if engine == oracle {
            agree += 1;
        } else {
            mismatches.push(format!("{v} in {gens:?}"));
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        report: format!("{agree} {members} {mismatches:?}"),
        detail: format!(
            "{agree}/200 membership verdicts agree ({members} members){}",
            mismatches
                .first()
                .map(|m| format!(", first mismatch {m}"))
                .unwrap_or_default()
        ),
    }
}

fn van_kampen_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1024;
    let mut worst: f64 = 0.0;
    let mut characters_exact = 0;
    let mut unique = 0;
    let mut total = 0;
    let mut report = String::new();
    for m in 1..=2usize {
        for _ in 0..50 {
            total += 1;
            let modes = rng.gen_range(1..=4);
            let s = TrigLift::random(m, modes, rng.gen_range(0.0..4.9), &mut rng);
            let c: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let f = s.sample(&c, n).unwrap();
            let dec = vk_decompose(&f).unwrap();
            characters_exact += (dec.character == c) as usize;
            let err = dec
                .lift
                .iter()
                .enumerate()
                .map(|(i, got)| {
                    let x: Vec<f64> = if m == 1 {
                        vec![i as f64 / n as f64]
                    } else {
                        vec![(i / n) as f64 / n as f64, (i % n) as f64 / n as f64]
                    };
                    (got - s.eval(&x)).abs()
                })
                .fold(0.0, f64::max);
            worst = worst.max(err);
            let u = vk_verify_uniqueness(&f).unwrap();
            unique += u.unique as usize;
            writeln!(report, "{:?} {:?} {:e} {}", dec.character, c, err, u.unique).unwrap();
        }
    }
    Outcome {
        pass: characters_exact == total && unique == total && worst < 1e-9,
        report,
        detail: format!(
            "{characters_exact}/{total} characters exact, worst lift error {worst:.1e}, {unique}/{total} unique"
        ),
    }
}

fn zero_divisors() -> Outcome {
    let mut pass = true;
    let mut report = String::new();
    let mut detail = Vec::new();
    for (name, g) in [
        ("delta0 - delta1", pp("1 - u1", 1)),
        ("ledrappier", pp("1 + u1 + u2", 2)),
    ] {
        let r = zero_divisor_check(&FiniteSupport::from_poly(&g), 100, 8, 3).unwrap();
        pass &= r.norm_ratio < 1e-6 && r.kernel_dim == 0 && r.fourier_residual < 1e-10;
        writeln!(report, "{r:?}").unwrap();
        detail.push(format!(
            "{name}: kernel dim {}, ratio {:.1e}, Fourier residual {:.1e}",
            r.kernel_dim, r.norm_ratio, r.fourier_residual
        ));
    }
    Outcome {
        pass,
        report,
        detail: detail.join("; "),
    }
}

fn variety_measure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut report = String::new();
    let mut hits = 0;
    let mut count = 0;
    while count < 10 {
        let p = random_poly(&mut rng, 2, 5, 3, 5);
        if p.is_zero() {
            continue;
        }
        count += 1;
        let r = variety_measure_check(&p, 100_000, count as u64).unwrap();
        hits += r.near_zero;
        writeln!(report, "{p} {r:?}").unwrap();
    }
    Outcome {
        pass: hits == 0,
        report,
        detail: format!("{hits} near-zero samples over 10 x 10^5"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    ("ledrappier end to end", ledrappier_end_to_end),
    ("entropy oracle agreement", mahler_oracles),
    ("one-variable exactness", one_variable_exactness),
    ("infinite entropy detection", infinite_entropy),
    ("non-mixing certificate", non_mixing_certificate),
    ("torsion oracle equivalence", torsion_oracle),
    ("groebner membership", groebner_membership),
    ("van kampen round trip", van_kampen_round_trip),
    ("zero-divisor property", zero_divisors),
    ("variety measure", variety_measure),
];

fn main() {
    let mut failures = 0;
    let mut first = Vec::new();
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        let o = run();
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failures += (!o.pass) as usize;
        first.push(o.report);
    }
    let second: Vec<String> = CRITERIA.iter().map(|(_, run)| run().report).collect();
    let differing: Vec<&str> = CRITERIA
        .iter()
        .zip(first.iter().zip(&second))
        .filter(|(_, (a, b))| a != b)
        .map(|((name, _), _)| *name)
        .collect();
    let bytes: usize = first.iter().map(String::len).sum();
    if differing.is_empty() {
        println!("PASS 11 determinism: second run reproduced all {bytes} report bytes");
    } else {
        println!("FAIL 11 determinism: reports differ for {differing:?}");
        failures += 1;
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
