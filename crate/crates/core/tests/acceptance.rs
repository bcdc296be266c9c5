//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use woundcert::cli;
use woundcert::cokernel::{self, certify_infinite_cokernel, dk_decompose, ImageTable, OracleResult, Verdict};
use woundcert::edim::{self, EdBoundReport, FieldContext, GroupProfile, UnipotentProfile};
use woundcert::field_tower::Tower;
use woundcert::linalg;
use woundcert::pgroup::{self, FiniteGroup};
use woundcert::valuation::{val, Val, ValuationContext};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn russell_certificate() -> Outcome {
    let poly = common::russell();
    let k = poly.tower().clone();
    let cert = certify_infinite_cokernel(&poly, 20, false).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::InfiniteCokernel, "verdict")?;
    ensure((cert.s, cert.capacity) == (2, 3), format!("s = {}, capacity = {}", cert.s, cert.capacity))?;
    let ell = cert.missing_residue.as_ref().ok_or("no residue")?;
    ensure(ell.rep().coords() == [2] && ell.modulus() == 3, format!("residue {}", ell.rep()))?;
    ensure(cert.representatives.len() == 20, "representative count")?;
    for e in &cert.representatives {
        let Val::Finite(g) = val(e) else { return Err("zero representative".into()) };
        ensure(*e == k.monomial_with_valuation(&g), format!("{e} is not a monomial"))?;
    }
    ensure(cokernel::check_representatives(&cert), "representative structure")?;

    let table = ImageTable::build(&poly, 2, 4).map_err(|e| e.to_string())?;
    let reps = &cert.representatives;
    let mut pairs = 0;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let diff = &reps[i] - &reps[j];
            ensure(table.contains(&diff) == OracleResult::NoWithinBound, format!("e{i} - e{j} found by oracle"))?;
            pairs += 1;
        }
    }
    let sampled = cokernel::sampled_non_membership(&poly, reps, 10_000, 1).map_err(|e| e.to_string())?;
    ensure(sampled.passed(), format!("sampled hits {:?}", sampled.hits))?;
    Ok(format!("{pairs} pairs absent from {} bounded images; 10^4 samples clean", table.len()))
}

fn boundary() -> Outcome {
    let cert = certify_infinite_cokernel(&common::boundary_p2(), 5, false).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::Inconclusive, "verdict")?;
    ensure((cert.s, cert.capacity) == (2, 2), "s = p^(md) = 2")?;
    ensure(cert.divisibility == Some(true), "divisibility")?;
    let out = cli::run(["woundcert", "cokernel", &fixture("boundary_p2.json")]);
    ensure(out.code == cli::EXIT_INCONCLUSIVE, format!("exit code {}", out.code))?;
    Ok("Inconclusive, s = 2 = p^(md), (p^m - 1) | (r - 1), exit 3".into())
}

fn valuation_identity() -> Outcome {
    let cert = certify_infinite_cokernel(&common::russell(), 1, false).map_err(|e| e.to_string())?;
    let r = cokernel::tt_valuation_identity_check(&cert.dk.g, &cert.c0, 10_000, 3).map_err(|e| e.to_string())?;
    ensure(r.passed, format!("{:?}", r.counterexample))?;
    ensure(r.checked > 0, "no sample fell below C0")?;
    Ok(format!("{} of {} samples below C0, zero failures", r.checked, r.samples))
}

fn dk_identities() -> Outcome {
    let start = Instant::now();
    let dk = dk_decompose(&common::russell(), false).map_err(|e| e.to_string())?;
    ensure(dk.identities_hold(), "Russell form")?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [2, 3] {
        let k = Tower::new(p, &["t"]).unwrap();
        for _ in 0..20 {
            let poly = common::random_disjoint_poly(&k, 3, 2, &mut rng);
            let dk = dk_decompose(&poly, false).map_err(|e| format!("{poly}: {e}"))?;
            ensure(dk.identities_hold(), format!("identities fail for {poly}"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("Russell + 40 random polynomials in {secs:.2}s"))
}

fn elimination() -> Outcome {
    let k = Tower::new(2, &["t"]).unwrap();
    let ctx = ValuationContext::new(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 50 {
        let d = rng.gen_range(1..=2);
        let s = rng.gen_range(1..=3);
        let b: Vec<_> = (0..s).map(|_| k.random_nonzero(&mut rng, 3)).collect();
        let (_, coords) = ctx.coordinate_matrix(&b, d);
        if linalg::rank(&k, &coords) < s {
            continue;
        }
        let e = ctx.eliminate_to_valuation_basis(&b, d).map_err(|e| e.to_string())?;
        ensure(ctx.is_valuation_independent(e.basis.elements(), d) == Ok(true), "output not valuation independent")?;
        ensure(e.reconstruct_input(&k).as_deref() == Some(&b[..]), "inverse transform misses the input")?;
        done += 1;
    }
    Ok("50 tuples eliminated and reconstructed".into())
}

fn index_and_axioms() -> Outcome {
    for vars in [&["t"][..], &["t", "u"][..]] {
        for p in [2, 3] {
            let k = Tower::new(p, vars).unwrap();
            let ctx = ValuationContext::new(&k);
            for d in [1, 2] {
                let ie = ctx.index_equality(d);
                ensure(ie.agree(), format!("{k}, d = {d}: {ie:?}"))?;
            }
            let ax = ctx.valuation_axioms_check(10_000, p as u64);
            ensure(ax.passed, format!("{k}: {:?}", ax.counterexample))?;
        }
    }
    Ok("index equality at depths 1, 2 and d = 1, 2; 10^4 axiom samples per tower".into())
}

fn finite_group_bounds() -> Outcome {
    let start = Instant::now();
    let g = |s: &str| FiniteGroup::from_spec(s).map_err(|e| e.to_string());
    ensure(pgroup::ledet_bound(&g("cyclic:27")?) == 3, "ledet Z/27")?;
    ensure(pgroup::ledet_bound(&g("abelian:2,2,4")?) == 4, "ledet Z/2 x Z/2 x Z/4")?;
    ensure(pgroup::jly_bound(&g("cyclic:9")?, false) == Ok(2), "jly Z/9")?;
    ensure(pgroup::elementary_bound(&g("abelian:2,2,2,2")?, true) == Some(2), "elementary (Z/2)^4")?;
    let e3 = g("abelian:3,3,3")?;
    ensure(pgroup::pgl2_lower_bound(&e3) == 2, "pgl2 (Z/3)^3")?;
    ensure(e3.order() == 27 && pgroup::pgl2_order(3) == 24, "27 > 24")?;
    let specs = [
        "cyclic:2",
        "cyclic:8",
        "cyclic:27",
        "abelian:2,2,2",
        "abelian:3,3",
        "abelian:5,5",
        "perm:p=2;(1 2 3 4),(1 3)",
        "perm:p=2;(1 2 3 4)(5 6 7 8),(1 5 3 7)(2 8 4 6)",
        "abelian:9,3",
    ];
    for spec in specs {
        let group = g(spec)?;
        let f = pgroup::frattini(&group).map_err(|e| format!("{spec}: {e}"))?;
        ensure(f.oracle_order == Some(f.phi_order), format!("{spec}: {:?} vs {}", f.oracle_order, f.phi_order))?;
        ensure(f.quotient_elementary, format!("{spec}: quotient not elementary"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("bounds exact; Frattini paths agree on {} groups", specs.len()))
}

fn theorem_arithmetic() -> Outcome {
    let u = UnipotentProfile { dim: 5, split_part_dim: 2, n: 1, l: Some(2), ..Default::default() };
    let r = edim::bound(&GroupProfile::SmoothUnipotent(u), &FieldContext::default()).map_err(|e| e.to_string())?;
    ensure(r.upper == Some(2) && r.cites("R3"), format!("upper {:?}", r.upper))?;
    ensure(edim::specialness_witness_degree(2, 3, 2, 2) == Ok(2), "witness degree")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let g = GroupProfile::SmoothUnipotent(common::random_profile(&mut rng));
        let (d1, d2) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let twice = edim::weil_restrict_profile(&edim::weil_restrict_profile(&g, d1).unwrap(), d2).unwrap();
        let once = edim::weil_restrict_profile(&g, d1 * d2).unwrap();
        let (GroupProfile::SmoothUnipotent(a), GroupProfile::SmoothUnipotent(b)) = (twice, once) else {
            return Err("restriction changed the profile kind".into());
        };
        ensure(a == b, format!("d1 = {d1}, d2 = {d2}"))?;
    }
    Ok("upper 2 via R3; witness degree 2; 100 restrictions multiplicative".into())
}

fn dimension_one() -> Outcome {
    let geometric = FieldContext { finite: false, geometric_over_perfect: true, tower: None };
    let wound = UnipotentProfile { dim: 1, is_wound_witnessed: true, ..Default::default() };
    let r: EdBoundReport = edim::bound(&GroupProfile::SmoothUnipotent(wound), &geometric).map_err(|e| e.to_string())?;
    ensure((r.lower, r.upper) == (1, Some(1)), format!("wound: [{}, {:?}]", r.lower, r.upper))?;
    let split = UnipotentProfile { dim: 1, split_part_dim: 1, is_split: Some(true), ..Default::default() };
    let r = edim::bound(&GroupProfile::SmoothUnipotent(split), &geometric).map_err(|e| e.to_string())?;
    ensure((r.lower, r.upper) == (0, Some(0)), format!("split: [{}, {:?}]", r.lower, r.upper))?;
    Ok("wound: ed = 1; split: ed = 0".into())
}

fn cli_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let towers = [
        Tower::new(2, &["t"]).unwrap(),
        Tower::new(3, &["t"]).unwrap(),
        Tower::new(5, &["t", "u"]).unwrap(),
        Tower::new(2, &["a", "b", "c"]).unwrap(),
    ];
    for k in &towers {
        for _ in 0..1000 {
            let a = k.random(&mut rng, 3);
            let back = cli::parse_element(&a.to_string(), k).map_err(|e| format!("{a}: {e}"))?;
            ensure(back == a, format!("{a} reparsed as {back}"))?;
        }
    }
    let bin = env!("CARGO_BIN_EXE_woundcert");
    let runs: Vec<Vec<String>> = [
        vec!["analyze", "@russell.json"],
        vec!["analyze", "@boundary_p2.json", "--json"],
        vec!["cokernel", "@russell.json", "--count", "5", "--json"],
        vec!["cokernel", "@russell.json", "--count", "20"],
        vec!["cokernel", "@boundary_p2.json"],
        vec!["cokernel", "@overlapping.json"],
        vec!["cokernel", "@overlapping.json", "--assume-nowhere-vanishing", "--json"],
        vec!["cokernel", "@asserted.json", "--assume-nowhere-vanishing", "--json"],
        vec!["cokernel", "@two_variables.json", "--json"],
        vec!["cokernel", "@malformed.json"],
        vec!["oracle", "@russell.json", "t^-1 + t^-2", "--bound", "1", "--jobs", "3"],
        vec!["frattini", "perm:p=2;(1 2 3 4)(5 6 7 8),(1 5 3 7)(2 8 4 6)", "--json"],
        vec!["edim", "--dim", "5", "--split-part-dim", "2", "--n", "1", "--l", "2", "--json"],
        vec!["edim", "--group", "abelian:3,3,3", "--p", "3"],
        vec!["field-info", "--p", "3", "--vars", "t,u", "--json"],
    ]
    .iter()
    .map(|args| args.iter().map(|a| a.strip_prefix('@').map_or(a.to_string(), fixture)).collect())
    .collect();
    for args in &runs {
        let first = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let second = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(first == second, format!("{args:?} differs between runs"))?;
        ensure(!first.stdout.contains(&b'\r'), format!("{args:?} emits CR"))?;
    }
    Ok(format!("4000 elements round-trip; {} fixture commands byte-stable", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("russell-form certificate", russell_certificate),
        ("boundary behaviour", boundary),
        ("valuation identity below C0", valuation_identity),
        ("decomposition identities", dk_identities),
        ("elimination to a valuation basis", elimination),
        ("index equality and valuation axioms", index_and_axioms),
        ("finite p-group bounds", finite_group_bounds),
        ("rule arithmetic", theorem_arithmetic),
        ("dimension-one classification", dimension_one),
        ("round trip and determinism", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
