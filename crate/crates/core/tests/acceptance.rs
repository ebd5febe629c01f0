//! Runs the eleven acceptance criteria and prints one PASS/FAIL line each.
//!
//! Criteria listed in `EXPECTED_FAILURES` are known to fail; the run aborts
//! if any other criterion fails or an expected failure starts passing.

use std::time::{Duration, Instant};

use skeincert_core::castle::{build_castle, build_special_tree, find_appropriate_pair, find_traps};
use skeincert_core::certify::{certify, leaf_spectrum, mfw_report, verify_theorem2, Theorem2Verdict};
use skeincert_core::corpus::{
    conjugation_pairs, showcase, golden, random_diagrams, random_locally_twisted, random_locally_twisted_capped,
    stabilization_pairs, sum_anywhere, Instance,
};
use skeincert_core::jones::{jones_oracle, ORACLE_CAP};
use skeincert_core::seifert::classify;
use skeincert_core::skein::{build_tree, evaluate_tree, homfly, homfly_uncached, unlink_poly, Chooser, Strategy};
use skeincert_core::{BraidWord, Diagram, Laurent2, Sign};

/// Doubling a crossing inside a literal half-twist prefix or suffix breaks
/// the literal factorization, so LTH is not preserved there.
const EXPECTED_FAILURES: &[usize] = &[8];

struct Outcome {
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { failures: vec![], note: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn d(s: &str) -> Diagram {
    Diagram::parse_braid(s).unwrap()
}

fn closure(w: &BraidWord) -> Diagram {
    Diagram::from_braid(w)
}

fn unlink_factor() -> Laurent2 {
    Laurent2::from_terms([(1, -1, 1), (-1, -1, -1)])
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    for n in 1..=5 {
        let expected = unlink_factor().pow(n as u32 - 1);
        o.check(unlink_poly(n).unwrap() == expected, || format!("unlink_poly({n})"));
        let w = BraidWord::new(vec![], n).unwrap();
        o.check(homfly(&closure(&w)) == expected, || format!("{n}-strand empty closure"));
    }
    let hopf = Laurent2::from_terms([(-1, -1, 1), (-3, -1, -1), (-1, 1, 1)]);
    let trefoil = Laurent2::from_terms([(-4, 0, -1), (-2, 0, 2), (-2, 2, 1)]);
    o.check(homfly(&d("1 1")) == hopf, || "hopf".into());
    o.check(homfly(&d("1 1 1")) == trefoil, || "trefoil".into());
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let a = Laurent2::monomial(1, 1, 0);
    let a_inv = Laurent2::monomial(1, -1, 0);
    let z = Laurent2::monomial(1, 0, 1);
    let mut checked = 0;
    for inst in random_diagrams(200, 2) {
        let dg = &inst.diagram;
        for g in 0..dg.crossing_count() {
            let flipped = dg.flip_crossing(g).unwrap();
            let (plus, minus) = match dg.sign(g) {
                Sign::Pos => (dg.clone(), flipped),
                Sign::Neg => (flipped, dg.clone()),
            };
            let zero = dg.smooth_crossing(g).unwrap();
            let p = |x: &Diagram| homfly_uncached(x, Strategy::Descending, Chooser::First);
            let lhs = &(&a * &p(&plus)) - &(&a_inv * &p(&minus));
            o.check(lhs == &z * &p(&zero), || format!("{} at crossing {g}", inst.name));
            checked += 1;
        }
    }
    o.note = format!("{checked} crossings");
    o
}

fn c3(corpus: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    for inst in corpus {
        let dg = &inst.diagram;
        let p = evaluate_tree(&build_tree(dg, Strategy::Descending, Chooser::First));
        for s in [Strategy::XCoherent, Strategy::YCoherent] {
            o.check(evaluate_tree(&build_tree(dg, s, Chooser::First)) == p, || format!("{} {s:?}", inst.name));
            let special = build_special_tree(dg, s).map(|t| evaluate_tree(&t));
            o.check(special.as_ref() == Ok(&p), || format!("{} special {s:?}", inst.name));
        }
    }
    o.note = format!("{} diagrams", corpus.len());
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    for (u, v) in conjugation_pairs(100, 4) {
        o.check(homfly(&closure(&u)) == homfly(&closure(&v)), || format!("conjugation [{u}] [{v}]"));
    }
    for (w, s) in stabilization_pairs(100, 5) {
        o.check(homfly(&closure(&w)) == homfly(&closure(&s)), || format!("stabilization [{w}] [{s}]"));
    }
    o
}

fn c5(lt: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    for inst in showcase().iter().chain(lt) {
        let dg = &inst.diagram;
        let r = mfw_report(dg).unwrap();
        let t = verify_theorem2(dg);
        let ok = r.mfw_sharp
            && r.eq2_upper_sharp
            && r.eq2_lower_sharp
            && matches!(t, Ok(ref t) if t.verdict == Theorem2Verdict::Confirmed);
        o.check(ok, || format!("{}: {r:?} {t:?}", inst.name));
    }
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let mut expect = |word: String, crossings: usize, index: usize| {
        let c = certify(&d(&word)).unwrap();
        let ok = c.minimal.holds && c.crossing_number == Some(crossings) && c.braid_index == Some(index);
        o.check(ok, || format!("[{word}]: {c:?}"));
    };
    for k in [1, 2] {
        expect(skeincert_core::corpus::SHOWCASE[k].to_string(), 9, 4);
    }
    for q in 2..=7 {
        expect(vec!["1"; q].join(" "), q, 2);
    }
    for q in 3..=6 {
        expect(vec!["1 2"; q].join(" "), 2 * q, 3);
    }
    expect("1 2 1 1 2 1".to_string(), 6, 3);
    o
}

fn c7(corpus: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for inst in corpus.iter().filter(|i| classify(&i.diagram).homogeneous) {
        let r = mfw_report(&inst.diagram).unwrap();
        o.check(r.eq5_sharp, || format!("{}: M = {}", inst.name, r.M));
        count += 1;
    }
    o.note = format!("{count} homogeneous diagrams");
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    let inst = random_locally_twisted_capped(50, 8, 9);
    let (mut doublings, mut lost) = (0, 0);
    for (k, i) in inst.iter().enumerate() {
        let dg = &i.diagram;
        o.check(classify(dg).lth, || format!("{} is not LTH", i.name));
        o.check(classify(&dg.mirror()).lth, || format!("mirror of {}", i.name));
        o.check(classify(&dg.reverse()).lth, || format!("reverse of {}", i.name));
        for g in 0..dg.crossing_count() {
            let dd = dg.double_crossing(g).unwrap();
            doublings += 1;
            if !classify(&dd).lth {
                lost += 1;
            }
            o.check(certify(&dd).unwrap().minimal.holds, || format!("{} doubled at {g} not certified", i.name));
        }
        let other = &inst[(k + 1) % inst.len()];
        let sum = sum_anywhere(dg, &other.diagram).unwrap();
        o.check(classify(&sum).lth, || format!("{} # {} is not LTH", i.name, other.name));
        o.check(certify(&sum).unwrap().minimal.holds, || format!("{} # {} not certified", i.name, other.name));
    }
    o.check(lost == 0, || format!("LTH lost in {lost} of {doublings} doublings"));
    o.note = format!("{doublings} doublings, LTH kept in {}", doublings - lost);
    o
}

fn c9(corpus: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    let mut castles = 0;
    for inst in corpus {
        let dg = &inst.diagram;
        for c in dg.innermost_circles() {
            for s in 0..dg.template().segment_count(c) {
                let castle = build_castle(dg, c, dg.segment_id(c, s)).unwrap();
                o.check(castle.check_invariants().is_ok(), || format!("{} castle ({c}, {s})", inst.name));
                castles += 1;
            }
        }
        let cap = dg.crossing_count() * dg.seifert_circle_count();
        match find_appropriate_pair(dg) {
            Ok(pair) => {
                let castle = build_castle(dg, pair.circle, pair.base_point).unwrap();
                let clean = find_traps(dg, &castle).map(|t| t.is_empty()).unwrap_or(false);
                o.check(clean && pair.derivations <= cap.max(1), || format!("{}: {pair:?}", inst.name));
            }
            Err(e) => o.failures.push(format!("{}: {e}", inst.name)),
        }
    }
    o.note = format!("{castles} castles");
    o
}

fn c10(corpus: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    let minus = corpus.iter().filter(|i| {
        i.diagram.words().iter().all(|w| skeincert_core::braid::locally_twisted_check(w, skeincert_core::TwistMode::Minus).holds)
    });
    let mut count = 0;
    for inst in minus {
        let dg = &inst.diagram;
        let s = dg.seifert_circle_count();
        let sp = leaf_spectrum(&build_special_tree(dg, Strategy::XCoherent).unwrap());
        o.check(sp.bound_holds(), || format!("{}: leaf above the bound", inst.name));
        o.check(
            sp.tight().all(|r| r.writhe == 0 && r.components == s && r.self_crossing_free),
            || format!("{}: irregular tight leaf", inst.name),
        );
        o.check(sp.tight().any(|r| r.all_positive_smoothed), || format!("{}: no tight leaf smooths every positive crossing", inst.name));
        o.check(sp.top_sign_uniform(), || format!("{}: mixed top signs", inst.name));
        count += 1;
    }
    o.note = format!("{count} locally twisted diagrams");
    o
}

fn c11(corpus: &[Instance]) -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for inst in corpus.iter().filter(|i| i.diagram.crossing_count() <= ORACLE_CAP.min(10)) {
        let v = jones_oracle(&inst.diagram).unwrap();
        o.check(homfly(&inst.diagram).jones_substitution() == v, || inst.name.clone());
        count += 1;
    }
    o.note = format!("{count} diagrams");
    o
}

fn main() {
    let gold = golden();
    let lt = random_locally_twisted(100, skeincert_core::corpus::GOLDEN_SEED);
    let mut wide = gold.clone();
    wide.extend(random_diagrams(200, 2));

    let secs = Duration::from_secs;
    let criteria: Vec<(usize, &str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "exact values", secs(1), Box::new(c1)),
        (2, "skein identity", secs(60), Box::new(c2)),
        (3, "strategy agreement", secs(300), Box::new(|| c3(&gold))),
        (4, "Markov invariance", secs(120), Box::new(c4)),
        (5, "MFW sharp for locally twisted diagrams", secs(300), Box::new(|| c5(&lt))),
        (6, "minimality certificates", secs(60), Box::new(c6)),
        (7, "z-degree bound sharp for homogeneous diagrams", secs(120), Box::new(|| c7(&wide))),
        (8, "closure properties", secs(120), Box::new(c8)),
        (9, "castles and appropriate pairs", secs(60), Box::new(|| c9(&wide))),
        (10, "leaf spectrum", secs(180), Box::new(|| c10(&gold))),
        (11, "Jones cross-check", secs(120), Box::new(|| c11(&wide))),
    ];

    let mut failed = vec![];
    for (k, name, budget, run) in criteria {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > budget {
            out.failures.push(format!("took {took:.1?}, budget {budget:?}"));
        }
        let verdict = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {verdict} {name} ({took:.1?}) {}", out.note);
        for f in out.failures.iter().take(5) {
            println!("    {f}");
        }
        if !out.failures.is_empty() {
            failed.push(k);
        }
    }
    assert_eq!(failed, EXPECTED_FAILURES, "unexpected set of failing criteria");
}
