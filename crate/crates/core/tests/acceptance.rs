//! Acceptance run: every criterion with its stated trial count and time
//! limit, one pass/fail line each. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use fpmod::harness::{run, run_suite, Gen, HarnessConfig, SuiteReport};
use fpmod::limits::{inverse_tower_stabilization, tower_ml_check, tower_surjective_lift, Direction, MLStatus, Tower};
use fpmod::matrix::Mat;
use fpmod::module::{FpModule, Morphism};
use fpmod::error::Error;
use fpmod::ring::RingDesc;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const Z: RingDesc = RingDesc::Integers;

type Criterion = (&'static str, Duration, fn() -> Result<String, String>);

struct Verdict {
    ok: bool,
    detail: String,
}

fn config(trials: usize, rings: &[RingDesc]) -> HarnessConfig {
    let mut c = HarnessConfig::new(SEED, trials);
    c.rings = rings.to_vec();
    c
}

fn suite(name: &str, cfg: &HarnessConfig) -> SuiteReport {
    run_suite(name, cfg).expect("valid configuration")
}

fn clean(r: &SuiteReport, expected: usize) -> Result<String, String> {
    if r.trials != expected {
        return Err(format!("{}: ran {} of {expected} trials", r.name, r.trials));
    }
    if r.failed > 0 {
        let first = r.failures.first().map(|f| f.message.as_str()).unwrap_or("");
        return Err(format!("{}: {} of {} failed (first: {first})", r.name, r.failed, r.trials));
    }
    Ok(format!("{}: {}/{}", r.name, r.trials, r.trials))
}

fn all_rings() -> Vec<RingDesc> {
    fpmod::harness::default_rings()
}

fn snf_suite() -> Result<String, String> {
    let mut cfg = config(1000, &[Z]);
    cfg.max_gens = 4;
    clean(&suite("snf", &cfg), 1000)
}

fn pushout_suite() -> Result<String, String> {
    let cfg = config(500, &[Z, RingDesc::IntegersMod(6)]);
    clean(&suite("pushout", &cfg), 500)
}

fn domination_suite() -> Result<String, String> {
    let r = suite("domination", &config(500, &all_rings()));
    let line = clean(&r, 500)?;
    if r.tag("dominates") == 0 || r.tag("does_not_dominate") == 0 {
        return Err(format!("only one verdict occurred: {:?}", r.tags));
    }
    Ok(format!("{line}, {} positive verdicts re-verified", r.tag("dominates")))
}

fn purity_suite() -> Result<String, String> {
    let p = suite("purity", &config(500, &[Z]));
    let mut cfg = config(200, &all_rings());
    cfg.max_gens = 3;
    let l = suite("lift", &cfg);
    let a = clean(&p, 500)?;
    let b = clean(&l, 200)?;
    if p.tag("pure") == 0 {
        return Err("no split map was generated".into());
    }
    Ok(format!("{a} ({} split, all probes injective); {b}", p.tag("pure")))
}

fn scalar_tower(m: &FpModule, s: i64, dir: Direction) -> Tower {
    Tower::new(Morphism::identity(m).scale(&m.ring().from_i64(s)), dir).unwrap()
}

fn ml_towers() -> Result<String, String> {
    let zx2 = scalar_tower(&FpModule::free(Z, 1), 2, Direction::Forward);
    let v = tower_ml_check(&zx2, 20).map_err(|e| e.to_string())?;
    if !matches!(v.status, MLStatus::UnknownAtHorizon) {
        return Err(format!("(Z, ×2) gave {:?}", v.status));
    }
    let z4 = FpModule::free(RingDesc::IntegersMod(4), 1);
    let v = tower_ml_check(&scalar_tower(&z4, 2, Direction::Forward), 20).map_err(|e| e.to_string())?;
    if v.level() != Some(2) {
        return Err(format!("(Z/4, ×2) forward gave {:?}", v.status));
    }
    let v = inverse_tower_stabilization(&scalar_tower(&z4, 2, Direction::Backward), 20).map_err(|e| e.to_string())?;
    if v.level() != Some(2) {
        return Err(format!("(Z/4, ×2) backward gave {:?}", v.status));
    }
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED), ring: Z, max_gens: 4, max_entry: 10 };
    for i in 0..50 {
        g.ring = g.pick(&all_rings());
        let (k, r) = (g.size(1), g.size(0));
        let rels = g.mat(k, r);
        let m = FpModule::new(g.ring, rels).unwrap();
        let v = tower_ml_check(&scalar_tower(&m, 1, Direction::Forward), 20).map_err(|e| e.to_string())?;
        if v.level() != Some(0) {
            return Err(format!("(M, id) #{i} gave {:?}", v.status));
        }
    }
    let z8 = RingDesc::IntegersMod(8);
    let a = FpModule::diagonal(z8, &[4]);
    let b = FpModule::free(z8, 1);
    let c = FpModule::diagonal(z8, &[2]);
    let ta = scalar_tower(&a, 2, Direction::Backward);
    let tb = scalar_tower(&b, 2, Direction::Backward);
    let tc = scalar_tower(&c, 0, Direction::Backward);
    let f = Morphism::new(&a, &b, Mat::from_i64(z8, 1, 1, &[2])).unwrap();
    let gm = Morphism::new(&b, &c, Mat::from_i64(z8, 1, 1, &[1])).unwrap();
    let fam: Vec<Mat> = [0, 0, 0, 1].iter().map(|&v| Mat::from_i64(z8, 1, 1, &[v])).collect();
    let lifted = tower_surjective_lift(&ta, &tb, &tc, &f, &gm, &fam, 3).map_err(|e| e.to_string())?;
    for i in 0..3 {
        if !b.elems_equal(&tb.step.apply(&lifted[i + 1]), &lifted[i]) || !c.elems_equal(&gm.apply(&lifted[i]), &fam[i]) {
            return Err(format!("tower lift is not a compatible preimage at level {i}"));
        }
    }
    let zf = FpModule::free(Z, 1);
    let zero = FpModule::zero(Z);
    let t2 = scalar_tower(&zf, 2, Direction::Backward);
    let t0 = Tower::new(Morphism::identity(&zero), Direction::Backward).unwrap();
    let id = Morphism::identity(&zf);
    let to_zero = Morphism::zero(&zf, &zero);
    let fam: Vec<Mat> = (0..5).map(|_| Mat::zeros(Z, 0, 1)).collect();
    match tower_surjective_lift(&t2, &t2, &t0, &id, &to_zero, &fam, 4) {
        Err(Error::LiftFailedAtHorizon(4)) => {}
        other => return Err(format!("(Z, ×2) fixture gave {other:?}")),
    }
    Ok("UnknownAtHorizon at 20; ML level 2 and stabilization at 2; 50/50 identity towers at level 0; both lift fixtures".into())
}

fn devissage_suite() -> Result<String, String> {
    let a = clean(&suite("devissage-roundtrip", &config(300, &all_rings())), 300)?;
    let rings = [Z, RingDesc::IntegersMod(6), RingDesc::IntegersMod(12)];
    let b = clean(&suite("devissage-summand", &config(300, &rings)), 300)?;
    Ok(format!("{a}; {b}"))
}

fn descent_suite() -> Result<String, String> {
    let r = suite("descent", &config(1000, &[Z]));
    let line = clean(&r, 1000)?;
    let d = r.tag("divergence");
    if d == 0 {
        return Err("no divergence along Z → Q".into());
    }
    Ok(format!("{line}, {d} divergences along Z → Q, all with torsion"))
}

fn projchar_suite() -> Result<String, String> {
    let r = suite("projchar", &config(1000, &all_rings()));
    clean(&r, 1000)
}

fn enlarge_suite() -> Result<String, String> {
    clean(&suite("enlarge", &config(100, &[Z])), 100)
}

fn determinism() -> Result<String, String> {
    let mut one = config(100, &all_rings());
    one.parallelism = 1;
    let mut eight = one.clone();
    eight.parallelism = 8;
    let a = serde_json::to_string_pretty(&run(&one)?.to_json()).unwrap();
    let b = serde_json::to_string_pretty(&run(&eight)?.to_json()).unwrap();
    if a != b {
        return Err("reports differ between parallelism 1 and 8".into());
    }
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    Ok(format!("{} bytes, identical across parallelism 1 and 8 ({} trials)", a.len(), v["total_trials"]))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("SNF suite", Duration::from_secs(10), snf_suite),
        ("pushout universal property", Duration::from_secs(30), pushout_suite),
        ("domination cross-oracle", Duration::from_secs(60), domination_suite),
        ("purity suite", Duration::from_secs(60), purity_suite),
        ("ML towers", Duration::from_secs(10), ml_towers),
        ("devissage round trip", Duration::from_secs(60), devissage_suite),
        ("descent of projectivity", Duration::from_secs(60), descent_suite),
        ("projectivity characterization", Duration::from_secs(60), projchar_suite),
        ("enlarge_to_free", Duration::from_secs(10), enlarge_suite),
        ("determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let v = match result {
            Ok(detail) if took <= limit => Verdict { ok: true, detail },
            Ok(detail) => Verdict { ok: false, detail: format!("{detail}; over the {}s limit", limit.as_secs()) },
            Err(detail) => Verdict { ok: false, detail },
        };
        if !v.ok {
            failed += 1;
        }
        let budget = if limit == Duration::MAX { "no limit".to_string() } else { format!("{}s", limit.as_secs()) };
        println!(
            "{} {:>2}. {name} [{:.2}s / {budget}] {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
