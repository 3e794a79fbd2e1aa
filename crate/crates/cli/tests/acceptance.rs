//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Every comparison is exact (rational or integer equality); the only
//! tolerances are the wall-clock limits below.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigcoh::completions::{completion_noninjectivity_witness, spectral_law, spectral_radius_estimate, witness_generator, SubmoduleSpan, TruncationParams};
use rigcoh::cyclic::{check_hkr, check_identities, hh_graded_dims, hp_report, random_algebra, random_chain, CyclicOps};
use rigcoh::derham::{de_rham_complex, infinitesimal_complex, rigid_report, Form, RigidParams, RigidPresentation, RigidReport};
use rigcoh::polyalg::{parse_poly, Monomial, MonomialOrder, PresentedAlgebra, SparsePoly};
use rigcoh::tubes::{tube_identity_check, TubeOptions, TubeSystem};
use rigcoh_cli::corpus::EXAMPLES;
use rigcoh_cli::{run_task, Report, TaskSpec};
use serde_json::Value;

const P: u64 = 5;
const LIMIT_MIXED: Duration = Duration::from_secs(30);
const LIMIT_SMALL_BETTI: Duration = Duration::from_secs(60);
const LIMIT_GM: Duration = Duration::from_secs(120);
const LIMIT_FT: Duration = Duration::from_secs(10);
/// Caps where the level-3 tower of G_m has stabilized (smaller caps lose the H^1 class at level 3).
const GM_CAPS: [u32; 3] = [20, 22, 24];
const DEFAULT_CAPS: [u32; 3] = [8, 12, 16];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn pres(vars: &[&str], rels: &[&str], w: Option<Vec<u32>>) -> RigidPresentation {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let rels = rels.iter().map(|r| parse_poly(r, &vars).unwrap()).collect();
    RigidPresentation::new(P, vars, rels, w).unwrap()
}

fn betti(vars: &[&str], rels: &[&str], w: Option<Vec<u32>>, caps: &[u32]) -> (RigidReport, Duration) {
    let t = Instant::now();
    let r = rigid_report(&pres(vars, rels, w), &RigidParams::default(), caps, 3, 3);
    (r, t.elapsed())
}

fn c1_mixed_complex() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut chains = 0;
    let mut failures = Vec::new();
    for k in 0..5 {
        let a = random_algebra(&mut rng);
        let ops = CyclicOps::new(&a);
        let xs: Vec<_> = (0..24).map(|i| random_chain(&a, i % 5, 2, 2, &mut rng)).collect();
        chains += xs.len();
        let r = check_identities(&ops, &xs);
        if !r.all_hold() {
            failures.push(format!("algebra {k}: {r:?}"));
        }
    }
    let el = t.elapsed();
    outcome(failures.is_empty() && chains >= 100 && el < LIMIT_MIXED, format!("{chains} chains over 5 algebras, {el:.1?}; {failures:?}"))
}

fn c2_small_betti() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, vars, want) in [("A^1", &["t"][..], vec![1]), ("point", &[][..], vec![1]), ("A^2", &["t", "u"][..], vec![1])] {
        let (r, el) = betti(vars, &[], None, &DEFAULT_CAPS);
        let got = r.betti.stabilized_betti();
        ok &= got.as_ref() == Some(&want) && el < LIMIT_SMALL_BETTI;
        parts.push(format!("{name} {got:?} {el:.1?}"));
    }
    outcome(ok, parts.join(", "))
}

fn laurent_form(nvars: usize, t_exp: i64) -> Form {
    // t^a dt with t^{-1} = u
    let m = if t_exp >= 0 { Monomial(vec![t_exp as u32, 0]) } else { Monomial(vec![0, (-t_exp) as u32]) };
    Form::dx(nvars, 0).mul_poly(&SparsePoly::monomial(m))
}

fn c3_gm(gm: &RigidReport, el: Duration) -> Outcome {
    let got = gm.betti.stabilized_betti();
    let alg = PresentedAlgebra::parse(&["t", "u"], &["t*u - 1"]).unwrap();
    let mut udt_ok = true;
    let mut oracle_ok = true;
    for &d in &GM_CAPS {
        let dr = de_rham_complex(&alg, d);
        udt_ok &= dr.is_exact(1, &laurent_form(2, -1)) == Some(false);
        // Laurent oracle: t^a dt is exact for a ≠ -1, since it is d(t^{a+1}/(a+1))
        for a in -4i64..=4 {
            let want = a != -1;
            oracle_ok &= dr.is_exact(1, &laurent_form(2, a)) == Some(want);
        }
    }
    outcome(
        got == Some(vec![1, 1]) && udt_ok && oracle_ok && el < LIMIT_GM,
        format!("betti {got:?} at D={GM_CAPS:?}, u·dt non-exact at every cap: {udt_ok}, Laurent oracle: {oracle_ok}, {el:.1?}"),
    )
}

fn c4_presentation_independence(gm: &RigidReport) -> Outcome {
    let (alt, _) = betti(&["t", "u", "s"], &["t*u - 1", "s - t^2"], Some(vec![1, 1, 2]), &GM_CAPS);
    let a = gm.betti.stabilized_betti();
    let b = alt.betti.stabilized_betti();
    let vars: Vec<String> = vec!["t".into(), "u".into()];
    let j = vec![parse_poly("t*u - 1", &vars).unwrap(), parse_poly("5", &vars).unwrap()];
    let mut by_order = Vec::new();
    let mut maps_ok = true;
    for order in [MonomialOrder::GrevLex, MonomialOrder::Lex] {
        let ts = TubeSystem::new(P, vars.clone(), &j, 3, TubeOptions { lift_order: order, ..TubeOptions::default() }).unwrap();
        maps_ok &= ts.check_realization() && (1..3).all(|m| ts.check_compatibility(m + 1, m).unwrap_or(false));
        let p = RigidPresentation::from_tube_system(&ts, None).unwrap();
        by_order.push(rigid_report(&p, &RigidParams::default(), &GM_CAPS, 3, 3).betti.stabilized_betti());
    }
    let ok = a.is_some() && a == b && by_order.iter().all(|x| *x == a) && maps_ok;
    outcome(ok, format!("gm {a:?}, gm-alt {b:?}, lift orders grevlex/lex {by_order:?}, tube maps consistent: {maps_ok}"))
}

fn c5_tube_identity() -> Outcome {
    let x: Vec<String> = vec!["x".into()];
    let xy: Vec<String> = vec!["x".into(), "y".into()];
    let jx = vec![parse_poly("x", &x).unwrap(), parse_poly("5", &x).unwrap()];
    let jxy = vec![parse_poly("x*y - 1", &xy).unwrap(), parse_poly("5", &xy).unwrap()];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, j, m) in [("V[x], m=2", &jx, 2), ("V[x], m=3", &jx, 3), ("V[x,y], m=2", &jxy, 2)] {
        let r = tube_identity_check(P, j, m, 10, TubeOptions::default()).unwrap();
        let tested: usize = r.forward.iter().chain(&r.backward).map(|e| e.generators).sum();
        ok &= r.holds && tested > 0;
        parts.push(format!("{name}: {} ({tested} generators)", r.holds));
    }
    outcome(ok, parts.join(", "))
}

fn c6_spectral() -> Outcome {
    let a = PresentedAlgebra::polynomial_ring(&["x"]);
    let params = TruncationParams { p: P, depth: 24, ..TruncationParams::default() };
    let vars = vec!["x".to_string()];
    let mut ok = true;
    let mut rows = 0;
    // exact exponents of the spans themselves: |x| = |1| = 1, |p x| = ε
    for (gens, base) in [(&["x"][..], 0), (&["1", "x"][..], 0), (&["5*x"][..], 1)] {
        let span = SubmoduleSpan::new(gens.iter().map(|g| parse_poly(g, &vars).unwrap()).collect()).unwrap();
        let e = spectral_radius_estimate(&span, &a, &params).exponent;
        ok &= e == Some(BigRational::from_integer(base.into()));
        for row in spectral_law(&span, &a, &params, &[0, 1, 2], &[1, 2, 3]) {
            rows += 1;
            let want = BigRational::from_integer((row.j as i64 + row.c as i64 * base).into());
            ok &= row.holds && row.lhs == Some(want);
        }
    }
    outcome(ok && rows == 27, format!("{rows} (span, j, c) rows at depth 24"))
}

fn c7_noninjective() -> Outcome {
    let w = completion_noninjectivity_witness(P, 6, 12);
    // recompute Σ_{i≤n}(pt)^i - p^m f_m - Σ_{m≤i≤n}(pt)^i coefficientwise
    let p = BigInt::from(P);
    let mut oracle = true;
    for m in 0..=6u32 {
        let f = witness_generator(P, m);
        for n in m..=12u32 {
            for i in 0..=n {
                let lhs = BigRational::from_integer(p.pow(i));
                let fm = f.coeff(&Monomial(vec![i])).to_rational() * BigRational::from_integer(p.pow(m));
                let rest = if i >= m { BigRational::from_integer(p.pow(i)) } else { BigRational::zero() };
                oracle &= lhs == fm + rest;
            }
        }
    }
    outcome(w.verified() && oracle && w.entries.len() == (0..=6).map(|m| 13 - m).sum::<usize>(), format!("{} (m, n) pairs, library {}, direct {}", w.entries.len(), w.verified(), oracle))
}

fn c8_hkr() -> Outcome {
    let a = PresentedAlgebra::polynomial_ring(&["x"]);
    let dr = de_rham_complex(&a, 12);
    let mut ok = true;
    for d in 0..=10usize {
        let hh = hh_graded_dims(&a, d, 3).unwrap();
        let forms: Vec<usize> = (0..=3).map(|l| dr.bases.get(l).map_or(0, |b| b.iter().filter(|(m, k)| (m.degree() + k.count_ones()) as usize == d).count())).collect();
        let want = if d == 0 { vec![1, 0, 0, 0] } else { vec![1, 1, 0, 0] };
        ok &= hh == want && forms == want;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut chains = 0;
    for names in [&["x"][..], &["x", "y"], &["x", "y", "z"]] {
        let alg = PresentedAlgebra::polynomial_ring(names);
        let xs: Vec<_> = (0..12).map(|i| random_chain(&alg, i % 4, 2, 2, &mut rng)).collect();
        chains += xs.len();
        ok &= check_hkr(&CyclicOps::new(&alg), &xs).all_hold();
    }
    outcome(ok, format!("HH slices of Q[x] for d ≤ 10 match forms; hkr∘b = 0 and hkr∘B = d∘hkr on {chains} chains"))
}

fn c9_hp(gm: &RigidReport) -> Outcome {
    let (line, _) = betti(&["t"], &[], None, &DEFAULT_CAPS);
    let (point, _) = betti(&[], &[], None, &DEFAULT_CAPS);
    let g = hp_report(&gm.betti);
    let l = hp_report(&line.betti);
    let pt = hp_report(&point.betti);
    let ok = (g.hp0, g.hp1) == (Some(1), Some(1)) && (l.hp0, l.hp1) == (Some(1), Some(0)) && (pt.hp0, pt.hp1) == (Some(1), Some(0));
    outcome(ok, format!("G_m ({:?}, {:?}), A^1 ({:?}, {:?}), point ({:?}, {:?})", g.hp0, g.hp1, l.hp0, l.hp1, pt.hp0, pt.hp1))
}

fn c10_feigin_tsygan() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for names in [&["x"][..], &["x", "y"]] {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let j: Vec<SparsePoly> = (0..vars.len()).map(|i| SparsePoly::var(vars.len(), i)).collect();
        let c = infinitesimal_complex(&vars, &[], &j, 6, 8).unwrap();
        let h = c.complex.homology_dims(2, 0).unwrap();
        let mut want = vec![0; h.len()];
        want[0] = 1;
        ok &= h == want;
        parts.push(format!("Q[{}]: {h:?}", names.join(",")));
    }
    let el = t.elapsed();
    outcome(ok && el < LIMIT_FT, format!("{}, {el:.1?}", parts.join(", ")))
}

fn corpus_runs() -> Vec<(String, Report, Report)> {
    EXAMPLES
        .iter()
        .map(|ex| {
            let spec = TaskSpec::from_toml(ex.file, ex.text).unwrap();
            let a = run_task(&spec, ex.file, ex.text, None).unwrap();
            let b = run_task(&spec, ex.file, ex.text, None).unwrap();
            (ex.name.to_string(), a, b)
        })
        .collect()
}

fn c11_holim(runs: &[(String, Report, Report)]) -> Outcome {
    let mut towers = 0;
    let mut rows = 0;
    let mut ok = true;
    for (_, r, _) in runs {
        let res = &r.payload.results;
        if let Some(checks) = res.get("holim_checks").and_then(Value::as_array) {
            towers += r.payload.task.degree_caps.len();
            for c in checks {
                rows += 1;
                let (h, l, l1) = (c["holim"].as_u64(), c["lim"].as_u64(), c["lim1"].as_u64());
                ok &= h.is_some() && h == Some(l.unwrap_or(0) + l1.unwrap_or(0));
            }
        }
        if let Some(caps) = res.get("caps").and_then(Value::as_array) {
            for cap in caps {
                towers += 1;
                for row in cap["holim"].as_array().into_iter().flatten() {
                    rows += 1;
                    let v: Vec<u64> = row.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
                    ok &= v[0] == v[1] + v[2];
                }
            }
        }
    }
    outcome(ok && towers > 0, format!("{towers} pro-complexes, {rows} degree rows"))
}

fn c12_determinism(runs: &[(String, Report, Report)]) -> Outcome {
    let mut differing = Vec::new();
    let mut failed = Vec::new();
    let mut compared = 0;
    let mut disagree = 0;
    for (name, a, b) in runs {
        if a.payload_json() != b.payload_json() {
            differing.push(name.clone());
        }
        if !a.passed {
            failed.push(name.clone());
        }
        for row in &a.payload.agreement {
            if row.rational.is_some() && row.padic.is_some() && row.certified {
                compared += 1;
                disagree += usize::from(row.rational != row.padic);
            }
        }
    }
    let ok = differing.is_empty() && failed.is_empty() && disagree == 0 && compared > 0;
    outcome(ok, format!("{} tasks, non-identical {differing:?}, failing {failed:?}, {compared} certified ranks compared, {disagree} disagreements", runs.len()))
}

fn main() {
    let mut results: BTreeMap<u32, (&str, Outcome)> = BTreeMap::new();
    let t = Instant::now();
    let (gm, gm_time) = betti(&["t", "u"], &["t*u - 1"], None, &GM_CAPS);
    results.insert(1, ("mixed-complex identities", c1_mixed_complex()));
    results.insert(2, ("rigid Betti of A^1, point, A^2", c2_small_betti()));
    results.insert(3, ("rigid Betti of G_m and the class of u·dt", c3_gm(&gm, gm_time)));
    results.insert(4, ("presentation and lift-order independence", c4_presentation_independence(&gm)));
    results.insert(5, ("tube identity", c5_tube_identity()));
    results.insert(6, ("spectral radius scaling law", c6_spectral()));
    results.insert(7, ("non-injectivity witness", c7_noninjective()));
    results.insert(8, ("graded HKR", c8_hkr()));
    results.insert(9, ("periodification", c9_hp(&gm)));
    results.insert(10, ("infinitesimal desk check", c10_feigin_tsygan()));
    let runs = corpus_runs();
    results.insert(11, ("holim / lim^1 bookkeeping", c11_holim(&runs)));
    results.insert(12, ("determinism and backend agreement", c12_determinism(&runs)));
    let mut all = true;
    for (k, (name, o)) in &results {
        all &= o.ok;
        println!("criterion {k:>2} {} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} in {:.1?}", if all { "all criteria pass" } else { "FAILURES" }, t.elapsed());
    if !all {
        std::process::exit(1);
    }
}
