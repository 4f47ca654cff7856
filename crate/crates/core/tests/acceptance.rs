//! Acceptance run: one PASS/FAIL line per criterion, with timings. Exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;
use scclab::axioms::derived::{iis_violations_bruteforce, monotonicity_violations, zero_propagation_violations};
use scclab::axioms::{applicable_axioms, check, check_many, recheck, AxiomId, CheckOptions, Witness};
use scclab::fuzz::{
    all_variants, fuzz_characterization, fuzz_equivalences, fuzz_necessity, fuzz_relationships,
    sample_params, trial_seed, GenConfig,
};
use scclab::identify::{identify_ic, identify_nsc, identify_rrm};
use scclab::io::{estimate_from_counts, write_counts, CountsTable};
use scclab::models::{eval_ar_first_stage, eval_ar_item, generate_scc, ModelParams, ModelTag};
use scclab::{Mask, Mode, Prob, ToleranceConfig, Universe};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn fixtures() -> Outcome {
    let start = Instant::now();
    let ab = Mask(0b11);
    let logit = scc_of(&logit_example(), 2);
    let row = [logit.lookup(Mask(0b01), ab), logit.lookup(Mask(0b10), ab), logit.lookup(ab, ab)];
    ensure(
        row.iter().map(|p| p.as_ref().unwrap().clone()).collect::<Vec<_>>() == [q(1, 2), q(1, 4), q(1, 4)],
        "logit row",
    )?;

    let ic = scc_of(&ic_example(), 2);
    let row: Vec<Prob> = [Mask(0b01), Mask(0b10), ab].iter().map(|t| ic.lookup(*t, ab).unwrap()).collect();
    ensure(row == [q(1, 2), q(1, 4), q(1, 4)], "ic row")?;
    let rec = identify_ic(&ic, false, &CheckOptions::default()).map_err(err)?;
    ensure(rec.round_trip_exact, "ic round trip")?;
    ensure(
        matches!(&rec.spec.params, ModelParams::Ic(p) if p.gamma == [q(1, 2), q(1, 3)]),
        "ic γ recovery",
    )?;

    let rcg = scc_of(&rcg_example(), 3);
    let ac = Mask(0b101);
    let row: Vec<Prob> = [Mask(0b001), Mask(0b100), ac].iter().map(|t| rcg.lookup(*t, ac).unwrap()).collect();
    ensure(row == [q(1, 2), q(1, 4), q(1, 4)], "rcg row")?;

    let eba = scc_of(&eba_example(), 3);
    ensure(
        eba.lookup(Mask(0b001), ac).unwrap() == q(3, 5) && eba.lookup(Mask(0b100), ac).unwrap() == q(2, 5),
        "eba row",
    )?;

    let ar = ar_example();
    let x = Mask(0b111);
    let p: Vec<Prob> = (0..3).map(|i| eval_ar_item(&ar, i, x).unwrap().p).collect();
    ensure(p == [q(1, 6), q(1, 3), q(1, 2)], "ar item probabilities")?;
    let a = eval_ar_item(&ar, 0, x).unwrap();
    ensure(a.decomposition.get(&Mask(0b011)) == Some(&(q(1, 2), q(1, 3))), "ar decomposition at {a,b}")?;
    ensure(a.recombined() == a.p, "ar decomposition identity")?;
    ensure(eval_ar_first_stage(&ar, Mask(0b011), x).unwrap() == q(1, 2), "ar first stage")?;

    let nsc = scc_of(&nsc_example(), 3);
    let rec = identify_nsc(&nsc, &CheckOptions::default()).map_err(err)?;
    let ModelParams::Nsc(p) = &rec.spec.params else { return Err("nsc recovery kind".into()) };
    let sigma: Vec<Prob> = [0b001, 0b010, 0b011, 0b100].iter().map(|m| p.sigma[&Mask(*m)].clone()).collect();
    ensure(sigma == [Prob::int(1), Prob::int(2), Prob::int(4), Prob::int(3)], "nsc σ recovery")?;
    ensure(p.nests == [Mask(0b011), Mask(0b100)], "nsc nests")?;
    ensure(scc_of(&nested_logit_example(), 3).lookup(Mask(0b011), x).unwrap() == q(4, 7), "nested logit")?;

    let (rrm, u) = rrm_table_two();
    let table = generate_scc(&rrm, &u).map_err(err)?;
    let (sx, sy) = (Mask(0b01), Mask(0b10));
    ensure(
        table.lookup(ab, ab).unwrap() == q(1, 2)
            && table.lookup(sy, ab).unwrap() == q(1, 2)
            && table.lookup(sx, ab).unwrap() == Prob::int(0),
        "rrm table row",
    )?;
    let rec = identify_rrm(&table, &CheckOptions::default()).map_err(err)?;
    ensure(
        matches!(&rec.spec.params, ModelParams::Rrm(p) if p.constraints == [ab, sy] && p.salience == [q(1, 2), q(1, 2)]),
        "rrm recovery",
    )?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("logit, ic, rcg, eba, ar, nsc, nested logit and rrm fixtures exact".into())
}

const SEED: u64 = 20_240_601;

fn necessity() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (model, ev) in all_variants() {
        let s = fuzz_necessity(model, ev, 100, &[3, 4], SEED).map_err(err)?;
        if s.failures > 0 {
            let r = &s.reproducers[0];
            return Err(format!("{model} (empty={ev}): {} failures, first at {}: {}", s.failures, r.stage, r.detail));
        }
        total += s.passed;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{total} bundles over 11 variants pass their characterizing axioms"))
}

fn sufficiency() -> Outcome {
    let start = Instant::now();
    let (mut total, mut scaled) = (0, 0);
    for (model, ev) in all_variants() {
        let s = fuzz_characterization(model, ev, 100, &[3, 4], SEED).map_err(err)?;
        if s.failures > 0 {
            let r = &s.reproducers[0];
            return Err(format!("{model} (empty={ev}): {} failures, first at {}: {}", s.failures, r.stage, r.detail));
        }
        total += s.passed;
        scaled += s.scaling_checks;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{total} exact recoveries, {scaled} rescaling checks"))
}

fn equivalences() -> Outcome {
    let s = fuzz_equivalences(100, &[3, 4], SEED).map_err(err)?;
    ensure(s.failures.is_empty(), s.failures.join("; "))?;
    let counts = [
        s.eba_equals_rcg,
        s.ar_first_stage_equals_eba,
        s.ar_item_identity,
        s.ic_equals_product_logit,
        s.nested_logit_equals_nsc,
    ];
    ensure(counts.iter().all(|c| *c >= 100), format!("counts {counts:?}"))?;
    Ok(format!("5 identities bit-exact on {} seeds each", s.trials))
}

fn relationships() -> Outcome {
    let s = fuzz_relationships(500, &[3], SEED).map_err(err)?;
    if s.total_failures() > 0 {
        let first = s.issues.first().map(|i| format!("{} trial {}: {}", i.suite, i.trial, i.detail));
        return Err(format!(
            "violations {}, membership {}, full-support overlaps {}, singleton {}, nest-invariant {}, logit search {}; {}",
            s.relationship_violations,
            s.membership_errors,
            s.full_support_overlaps,
            s.singleton.mismatches,
            s.nest_invariant.mismatches,
            s.logit_search.counterexamples,
            first.unwrap_or_default()
        ));
    }
    ensure(s.logit_search.rel_add_candidates > 0, "no logit bundle satisfied REL_ADD")?;
    Ok(format!(
        "500 mixed trials clean; {} singleton and {} nest-invariant trials as required; {} logit+REL_ADD bundles all IC",
        s.singleton.trials, s.nest_invariant.trials, s.logit_search.rel_add_candidates
    ))
}

fn find(witnesses: &[Witness], pred: impl Fn(&Witness) -> bool) -> Option<&Witness> {
    witnesses.iter().find(|w| pred(w))
}

fn witnesses() -> Outcome {
    let all = CheckOptions {
        witness_cap: usize::MAX,
        ..CheckOptions::default()
    };
    let mut rechecked = 0;
    let mut verify = |scc: &scclab::Scc, ws: &[Witness]| -> Result<(), String> {
        for w in ws {
            rechecked += 1;
            ensure(recheck(scc, w, &all).map_err(err)?, format!("{:?} does not re-evaluate", w.axiom))?;
        }
        Ok(())
    };

    // Logit with one row perturbed.
    let base = scc_of(&logit_example_three(), 3);
    let menu = Mask(0b011);
    let bumped = perturb(&base, menu, Mask(0b001), &q(1, 100));
    let r = check(&bumped, AxiomId::Iis, &all).map_err(err)?;
    ensure(!r.holds, "perturbed logit passes IIS")?;
    ensure(
        r.witnesses.iter().all(|w| w.set("S") == Some(menu) || w.set("S'") == Some(menu)),
        "an IIS witness does not name the perturbed menu",
    )?;
    verify(&bumped, &r.witnesses)?;

    let nsc = scc_of(&nsc_example(), 3);
    let x = Mask(0b111);
    let r = check(&nsc, AxiomId::RelAdd, &all).map_err(err)?;
    let w = find(&r.witnesses, |w| {
        w.set("S") == Some(x) && w.item("x") == Some(1) && w.set("T") == Some(Mask(0b001)) && w.set("T'") == Some(Mask(0b100))
    })
    .ok_or("REL_ADD witness (X, b, {a}, {c}) missing")?;
    ensure(
        w.lhs_value() == Some(&q(3, 28)) && w.rhs_value() == Some(&q(12, 28)),
        "REL_ADD witness values",
    )?;
    verify(&nsc, &r.witnesses)?;

    let r = check(&nsc, AxiomId::Paf, &all).map_err(err)?;
    let w = find(&r.witnesses, |w| {
        w.set("S") == Some(x) && w.item("x") == Some(1) && w.set("T") == Some(Mask(0b100))
    })
    .ok_or("PAF witness (X, b, {c}) missing")?;
    ensure(w.lhs_value() == Some(&q(3, 7)) && w.rhs_value() == Some(&q(3, 4)), "PAF witness values")?;
    verify(&nsc, &r.witnesses)?;

    // Full batteries on generated data of every variant.
    let mut generated = 0;
    for (model, ev) in all_variants() {
        for i in 0..30 {
            let n = 3 + i % 2;
            let cfg = GenConfig::new(n, model, trial_seed(SEED ^ 0x77, i as u64)).with_empty_variant(ev);
            let spec = sample_params(&cfg).map_err(err)?;
            let scc = generate_scc(&spec, &letters(n)).map_err(err)?;
            let mut opts = all.clone();
            opts.attributes = scclab::fuzz::attribute_carriers(&spec);
            let reports = check_many(&scc, &applicable_axioms(&scc, &opts), &opts).map_err(err)?;
            for r in &reports {
                verify(&scc, &r.witnesses)?;
            }
            generated += 1;
        }
    }
    let rel = fuzz_relationships(100, &[3, 4], SEED ^ 0x99).map_err(err)?;
    ensure(rel.witness_failures == 0, format!("{} relationship-suite witnesses fail", rel.witness_failures))?;
    Ok(format!(
        "3 hand-built counterexamples found; {} witnesses on {generated} batteries plus {} in fuzz trials all re-evaluate",
        rechecked, rel.witnesses_rechecked
    ))
}

/// π ≡ 1 except π({a}) = 2, on three items.
fn logit_example_three() -> scclab::models::ModelSpec {
    let mut pi: BTreeMap<Mask, Prob> = Mask::full(3).nonempty_subsets().map(|t| (t, Prob::int(1))).collect();
    pi.insert(Mask(0b001), Prob::int(2));
    scclab::models::ModelSpec::standard(ModelParams::Logit(scclab::models::LogitParams { pi, pi_empty: None }))
}

fn derived() -> Outcome {
    let tol = ToleranceConfig::default();
    let opts = CheckOptions::default();
    let cases: Vec<(ModelTag, bool, usize)> = ModelTag::ALL
        .iter()
        .flat_map(|m| (0..40).map(move |i| (*m, false, i)))
        .collect();
    let results: Vec<Result<(bool, bool), String>> = cases
        .par_iter()
        .map(|&(model, ev, i)| {
            let n = 3 + i % 2;
            let cfg = GenConfig::new(n, model, trial_seed(SEED ^ 0xde, i as u64)).with_empty_variant(ev);
            let spec = sample_params(&cfg).map_err(err)?;
            let scc = generate_scc(&spec, &letters(n)).map_err(err)?;
            let rel_add = check(&scc, AxiomId::RelAdd, &opts).map_err(err)?.holds;
            if rel_add {
                let m = monotonicity_violations(&scc, &tol).map_err(err)?;
                ensure(m.is_empty(), format!("{model} seed {}: monotonicity fails", cfg.seed))?;
                let z = zero_propagation_violations(&scc, &tol).map_err(err)?;
                ensure(z.is_empty(), format!("{model} seed {}: zero propagation fails", cfg.seed))?;
            }
            let piis = check(&scc, AxiomId::Piis, &opts).map_err(err)?.holds;
            if piis {
                let v = iis_violations_bruteforce(&scc, &tol).map_err(err)?;
                ensure(v.is_empty(), format!("{model} seed {}: positive IIS instance fails", cfg.seed))?;
            }
            Ok((rel_add, piis))
        })
        .collect();
    let (mut rel, mut piis) = (0, 0);
    for r in results {
        let (a, b) = r?;
        rel += usize::from(a);
        piis += usize::from(b);
    }
    ensure(rel > 0 && piis > 0, "no dataset exercised the implications")?;
    Ok(format!("{rel} REL_ADD datasets monotone with zero propagation; {piis} PIIS datasets pass positive IIS"))
}

fn empirical() -> Outcome {
    let start = Instant::now();
    let u = Universe::new(["a", "b"]).map_err(err)?;
    let gamma = [0.5, 1.0 / 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut table = CountsTable::new();
    for s in u.menus() {
        let mut draws = 0;
        while draws < 1_000_000 {
            let t = s.items().filter(|x| rng.gen_bool(gamma[*x])).fold(Mask::EMPTY, Mask::with);
            if t.is_empty() {
                continue;
            }
            *table.entry((s, t)).or_insert(0) += 1;
            draws += 1;
        }
    }
    let text = write_counts(&u, &table).map_err(err)?;
    let scc = estimate_from_counts(&text).map_err(err)?;
    ensure(scc.mode() == Mode::Float, "estimate is not float")?;
    let opts = CheckOptions::with_tol(ToleranceConfig::default().with_eps_eq(1e-2));
    for axiom in [AxiomId::Iis, AxiomId::RelAdd] {
        ensure(check(&scc, axiom, &opts).map_err(err)?.holds, format!("{axiom} fails on the estimate"))?;
    }
    let rec = identify_ic(&scc, false, &opts).map_err(err)?;
    let ModelParams::Ic(p) = &rec.spec.params else { return Err("wrong recovery".into()) };
    let got: Vec<f64> = p.gamma.iter().map(Prob::to_f64).collect();
    for (g, want) in got.iter().zip(gamma) {
        ensure((g - want).abs() <= 0.01, format!("γ estimate {got:?}"))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("γ̂ = ({:.4}, {:.4}) from 10^6 draws per menu", got[0], got[1]))
}

fn battery(n: usize) -> Result<Duration, String> {
    let cfg = GenConfig::new(n, ModelTag::Logit, SEED);
    let spec = sample_params(&cfg).map_err(err)?;
    let scc = generate_scc(&spec, &letters(n)).map_err(err)?;
    let opts = CheckOptions::default();
    let axioms = applicable_axioms(&scc, &opts);
    let start = Instant::now();
    let reports = check_many(&scc, &axioms, &opts).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(reports.len() == axioms.len(), "missing reports")?;
    Ok(elapsed)
}

fn performance() -> Outcome {
    let six = battery(6)?;
    within(six, Duration::from_secs(10))?;
    let eight = battery(8)?;
    within(eight, Duration::from_secs(300))?;
    Ok(format!("full battery on full-support exact data: n=6 {six:.2?}, n=8 {eight:.2?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixture exactness", fixtures),
        ("necessity suite", necessity),
        ("sufficiency suite", sufficiency),
        ("equivalence identities", equivalences),
        ("relationship consistency", relationships),
        ("witness validity", witnesses),
        ("derived consequences", derived),
        ("empirical pipeline", empirical),
        ("performance floor", performance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
