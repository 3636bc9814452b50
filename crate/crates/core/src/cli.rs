//! Command dispatch: parse arguments, read an input document, run one
//! operation, and render the result as JSON with an exit code.
//!
//! Exit codes: 0 on success, 2 for malformed input or a violated
//! precondition, 1 when an internal consistency check fails.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::descent::{check_ml_descent, check_projectivity_descent, descend_generators, projchar_check, MLDescentStatus};
use crate::devissage::{
    cyclic_decomposition, decomposition_to_filtration, filtration_to_decomposition, summand_devissage,
    validate_filtration, InternalDecomposition, KaplanskyFiltration,
};
use crate::error::Error;
use crate::harness::{self, Case, HarnessConfig};
use crate::homtensor::{base_change, base_change_mor, hom_module, is_flat, is_projective, split_section, tensor};
use crate::json::{
    elem_from_value, elem_to_json, invariants_to_json, mat_from_value, mat_to_json, module_to_json, morphism_to_json,
    parse_document, parse_ring_name, ring_map_to_json, vector_from_value, vector_to_json, Context, InputError,
};
use crate::limits::{enlarge_to_free, inverse_tower_stabilization, tower_ml_check, tower_surjective_lift, MLStatus, MLVerdict, Tower};
use crate::matrix::Mat;
use crate::module::{FpModule, Morphism, SubmoduleRep};
use crate::normal_form::snf;
use crate::purity::{dominates, is_universally_injective, lift_through_univ_injective};
use crate::pushout::{pushout, pushout_induced};
use crate::ring::{RingDesc, RingMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "fpmod", version, about = "Exact computations with finitely presented modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input document (JSON); standard input when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, env = "FPMOD_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Comma-separated ring names, e.g. `Integers,IntegersMod(6)`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_ring_name)]
    pub rings: Option<Vec<RingDesc>>,
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Harness only: restrict to these suites.
    #[arg(long, global = true, value_delimiter = ',')]
    pub suites: Option<Vec<String>>,
    /// Harness only: corrupt a decider to exercise failure reporting.
    #[arg(long, global = true, hide = true)]
    pub fault: Option<String>,
    #[arg(long, global = true)]
    pub max_gens: Option<usize>,
    #[arg(long, global = true)]
    pub max_entry: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Smith normal form of `params.matrix` (or of a module's relations).
    Snf,
    /// Invariant factors of a module.
    Invariants,
    /// Presentation of Hom(source, target).
    Hom,
    /// Presentation of left ⊗ right.
    Tensor,
    /// Extension of scalars along `map`.
    Basechange,
    /// Pushout of `f` and `g`, and the induced map from `u`, `v` if given.
    Pushout,
    /// Universal injectivity of `f`.
    Univinj,
    /// Whether `g` factors through `f`, cross-checked by pushout purity.
    Dominates,
    /// Lift through a universally injective map.
    Lift,
    /// Mittag-Leffler check of a forward tower.
    MlTower,
    /// Image stabilization of a backward tower.
    InvStab,
    /// Lift a compatible family along a surjection of backward towers.
    TowerLift,
    /// Enlarge a submodule of the kernel so the quotient is free.
    EnlargeFree,
    /// Filtrations, internal decompositions and summand devissage.
    Devissage,
    /// Descent of generators, projectivity or the Mittag-Leffler property.
    Descend,
    /// Projectivity of a module.
    Projtest,
    /// Flatness of a module.
    Flattest,
    /// Projectivity against flatness, ML and cyclic decomposition.
    Projchar,
    /// Randomized property harness, or replay of one serialized instance.
    Harness,
}

/// Result of a command: exit code and the JSON printed on standard output.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Value,
    /// Printed on standard error; kept out of the JSON for reproducibility.
    pub note: Option<String>,
    pub pretty: bool,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Outcome { code: 0, output, note: None, pretty: false }
    }

    fn internal(output: Value) -> Self {
        Outcome { code: 1, output, note: None, pretty: false }
    }
}

enum Failure {
    Input(InputError),
    Internal(String, Value),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn domain(location: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e: Error| {
        if e.is_internal() {
            Failure::Internal(e.clause().to_string(), json!({ "message": e.to_string(), "location": location }))
        } else {
            Failure::Input(InputError::from_error(location, &e))
        }
    }
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, output: Value::Null, note: Some(e.to_string()), pretty: false };
            }
            let err = InputError::new("UsageError", "argv", e.to_string().trim().to_string());
            return Outcome { code: 2, output: err.to_json(), note: None, pretty: false };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let result = if cli.command == Command::Harness { run_harness(cli) } else { run_operation(cli) };
    match result {
        Ok(o) => o,
        Err(Failure::Input(e)) => Outcome { code: 2, output: e.to_json(), note: None, pretty: false },
        Err(Failure::Internal(clause, detail)) => {
            Outcome::internal(json!({ "error": { "clause": clause, "internal": true, "detail": detail } }))
        }
    }
}

fn read_input(cli: &Cli) -> Run<String> {
    match &cli.input {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| InputError::new("UnreadableInput", p.display().to_string(), e.to_string()).into()),
        _ => {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                .map_err(|e| InputError::new("UnreadableInput", "stdin", e.to_string()))?;
            Ok(s)
        }
    }
}

// ---- parameter lookup ----------------------------------------------------------

fn missing(key: &str, what: &str) -> InputError {
    InputError::new("MissingParameter", format!("params.{key}"), format!("expected the name of a {what}"))
}

fn named<'a, T>(ctx: &Context, map: &'a std::collections::BTreeMap<String, T>, key: &str, what: &str) -> Run<&'a T> {
    match ctx.params.get(key) {
        Some(Value::String(name)) => map.get(name).ok_or_else(|| {
            InputError::new("UnresolvedName", format!("params.{key}"), format!("no {what} named `{name}`")).into()
        }),
        Some(_) => Err(missing(key, what).into()),
        None if map.len() == 1 => Ok(map.values().next().expect("one entry")),
        None => Err(missing(key, what).into()),
    }
}

fn module<'a>(ctx: &'a Context, key: &str) -> Run<&'a FpModule> {
    named(ctx, &ctx.modules, key, "module")
}

fn morphism<'a>(ctx: &'a Context, key: &str) -> Run<&'a Morphism> {
    named(ctx, &ctx.morphisms, key, "morphism")
}

fn tower<'a>(ctx: &'a Context, key: &str) -> Run<&'a Tower> {
    named(ctx, &ctx.towers, key, "tower")
}

fn param<'a>(ctx: &'a Context, key: &str) -> Run<&'a Value> {
    ctx.params
        .get(key)
        .ok_or_else(|| InputError::new("MissingParameter", format!("params.{key}"), "required parameter").into())
}

fn ring(ctx: &Context) -> Run<RingDesc> {
    ctx.ring.ok_or_else(|| InputError::new("MissingRing", "ring", "this command needs a ring").into())
}

fn ring_map(ctx: &Context) -> Run<RingMap> {
    ctx.map.ok_or_else(|| InputError::new("MissingRingMap", "map", "this command needs a ring map").into())
}

fn mat_param(ctx: &Context, key: &str) -> Run<Mat> {
    Ok(mat_from_value(param(ctx, key)?, ring(ctx)?, &format!("params.{key}"))?)
}

fn mat_list(ctx: &Context, key: &str) -> Run<Vec<Mat>> {
    let r = ring(ctx)?;
    let Value::Array(items) = param(ctx, key)? else {
        return Err(InputError::new("InvalidParameter", format!("params.{key}"), "expected a list of matrices").into());
    };
    Ok(items
        .iter()
        .enumerate()
        .map(|(i, v)| mat_from_value(v, r, &format!("params.{key}[{i}]")))
        .collect::<Result<_, _>>()?)
}

fn str_param<'a>(ctx: &'a Context, key: &str) -> Run<&'a str> {
    param(ctx, key)?
        .as_str()
        .ok_or_else(|| InputError::new("InvalidParameter", format!("params.{key}"), "expected a string").into())
}

fn horizon(cli: &Cli, ctx: &Context) -> Run<usize> {
    let h = match (cli.horizon, ctx.params.get("horizon")) {
        (Some(h), _) => h,
        (None, Some(v)) => v
            .as_u64()
            .ok_or_else(|| InputError::new("InvalidParameter", "params.horizon", "expected a positive integer"))?
            as usize,
        (None, None) => 10,
    };
    if h == 0 {
        return Err(InputError::new("InvalidParameter", "horizon", "horizon must be positive").into());
    }
    Ok(h)
}

fn verdict_json(v: &MLVerdict) -> Value {
    let (status, level, factor) = match &v.status {
        MLStatus::ML { level, factor } => ("ML", json!(level), factor.as_ref().map(|f| mat_to_json(f.mat()))),
        MLStatus::NotML { level } => ("NotML", json!(level), None),
        MLStatus::UnknownAtHorizon => ("UnknownAtHorizon", Value::Null, None),
    };
    json!({ "status": status, "level": level, "factor": factor, "horizon": v.horizon })
}

fn submodule_json(s: &SubmoduleRep) -> Value {
    mat_to_json(s.gens())
}

fn decomposition_json(d: &InternalDecomposition) -> Value {
    json!({ "total": submodule_json(&d.total), "parts": d.parts.iter().map(submodule_json).collect::<Vec<_>>() })
}

fn submodules(m: &FpModule, mats: Vec<Mat>, key: &str) -> Run<Vec<SubmoduleRep>> {
    mats.into_iter()
        .enumerate()
        .map(|(i, g)| SubmoduleRep::new(m, g).map_err(domain(&format!("params.{key}[{i}]"))))
        .collect()
}

// ---- operations -------------------------------------------------------------------

fn run_operation(cli: &Cli) -> Run<Outcome> {
    let text = read_input(cli)?;
    let ctx = parse_document(&text)?.resolve()?;
    let out = match cli.command {
        Command::Snf => {
            let a = if ctx.params.contains_key("matrix") { mat_param(&ctx, "matrix")? } else { module(&ctx, "module")?.rels().clone() };
            let s = snf(&a).map_err(domain("params.matrix"))?;
            json!({
                "invariant_factors": s.invariant_factors.iter().map(elem_to_json).collect::<Vec<_>>(),
                "rank": s.rank,
                "u": mat_to_json(&s.u),
                "v": mat_to_json(&s.v),
                "d": mat_to_json(&s.d),
            })
        }
        Command::Invariants => {
            let m = module(&ctx, "module")?;
            json!({ "invariants": invariants_to_json(m.invariants()), "is_zero": m.is_zero() })
        }
        Command::Hom => {
            let h = hom_module(module(&ctx, "source")?, module(&ctx, "target")?).map_err(domain("params"))?;
            json!({ "module": module_to_json(&h.underlying) })
        }
        Command::Tensor => {
            let t = tensor(module(&ctx, "left")?, module(&ctx, "right")?).map_err(domain("params"))?;
            json!({ "module": module_to_json(&t) })
        }
        Command::Basechange => {
            let phi = ring_map(&ctx)?;
            let mut out = json!({ "map": ring_map_to_json(&phi) });
            if ctx.params.contains_key("morphism") || (ctx.modules.len() != 1 && !ctx.morphisms.is_empty()) {
                let f = base_change_mor(&phi, morphism(&ctx, "morphism")?).map_err(domain("params.morphism"))?;
                out["morphism"] = morphism_to_json(&f);
            } else {
                let m = base_change(&phi, module(&ctx, "module")?).map_err(domain("params.module"))?;
                out["module"] = module_to_json(&m);
            }
            out
        }
        Command::Pushout => {
            let p = pushout(morphism(&ctx, "f")?, morphism(&ctx, "g")?).map_err(domain("params"))?;
            let mut out = json!({
                "object": module_to_json(&p.object),
                "inl": mat_to_json(p.inl.mat()),
                "inr": mat_to_json(p.inr.mat()),
                "commutes": p.commutes().map_err(domain("params"))?,
            });
            if ctx.params.contains_key("u") {
                let w = pushout_induced(&p, morphism(&ctx, "u")?, morphism(&ctx, "v")?).map_err(domain("params"))?;
                out["induced"] = mat_to_json(w.mat());
            }
            out
        }
        Command::Univinj => {
            let v = is_universally_injective(morphism(&ctx, "f")?).map_err(domain("params.f"))?;
            json!({
                "pure": v.pure,
                "retraction": v.retraction.as_ref().map(|r| mat_to_json(r.mat())),
                "counterexample": v.counterexample.as_ref().map(|w| json!({
                    "probe": module_to_json(&w.probe),
                    "element": vector_to_json(&w.element),
                })),
            })
        }
        Command::Dominates => {
            let v = dominates(morphism(&ctx, "f")?, morphism(&ctx, "g")?).map_err(domain("params"))?;
            let out = json!({
                "dominates": v.dominates,
                "pushout_agrees": v.pushout_agrees,
                "factor": v.factor.as_ref().map(|h| mat_to_json(h.mat())),
            });
            if !v.pushout_agrees {
                return Ok(Outcome::internal(out));
            }
            out
        }
        Command::Lift => {
            let phi = lift_through_univ_injective(
                morphism(&ctx, "f")?,
                morphism(&ctx, "pi")?,
                morphism(&ctx, "g")?,
                morphism(&ctx, "h")?,
                morphism(&ctx, "k")?,
            )
            .map_err(domain("params"))?;
            json!({ "lift": mat_to_json(phi.mat()) })
        }
        Command::MlTower => {
            let v = tower_ml_check(tower(&ctx, "tower")?, horizon(cli, &ctx)?).map_err(domain("params.tower"))?;
            verdict_json(&v)
        }
        Command::InvStab => {
            let v = inverse_tower_stabilization(tower(&ctx, "tower")?, horizon(cli, &ctx)?)
                .map_err(domain("params.tower"))?;
            verdict_json(&v)
        }
        Command::TowerLift => {
            let (a, b, c) = (tower(&ctx, "a")?, tower(&ctx, "b")?, tower(&ctx, "c")?);
            let Value::Array(items) = param(&ctx, "c_family")? else {
                return Err(InputError::new("InvalidParameter", "params.c_family", "expected a list of vectors").into());
            };
            let r = ring(&ctx)?;
            let family: Vec<Mat> = items
                .iter()
                .enumerate()
                .map(|(i, v)| vector_from_value(v, r, c.object.gens(), &format!("params.c_family[{i}]")))
                .collect::<Result<_, _>>()?;
            let h = horizon(cli, &ctx)?;
            let lifted = tower_surjective_lift(a, b, c, morphism(&ctx, "f")?, morphism(&ctx, "g")?, &family, h)
                .map_err(domain("params"))?;
            json!({ "lift": lifted.iter().map(vector_to_json).collect::<Vec<_>>() })
        }
        Command::EnlargeFree => {
            let m = module(&ctx, "module")?;
            let e = enlarge_to_free(m, &mat_param(&ctx, "psi")?, &mat_param(&ctx, "n")?).map_err(domain("params"))?;
            json!({
                "n_prime": mat_to_json(&e.n_prime),
                "coefficients": mat_to_json(&e.coefficients),
                "quotient": module_to_json(&e.quotient),
            })
        }
        Command::Devissage => devissage(&ctx)?,
        Command::Descend => return descend(cli, &ctx),
        Command::Projtest => {
            let m = module(&ctx, "module")?;
            let projective = is_projective(m).map_err(domain("params.module"))?;
            let section = split_section(m).map_err(domain("params.module"))?;
            json!({ "projective": projective, "section": section.as_ref().map(|s| mat_to_json(s.mat())) })
        }
        Command::Flattest => {
            json!({ "flat": is_flat(module(&ctx, "module")?).map_err(domain("params.module"))? })
        }
        Command::Projchar => {
            let r = projchar_check(module(&ctx, "module")?).map_err(domain("params.module"))?;
            let out = json!({
                "flat": r.flat,
                "mittag_leffler": r.mittag_leffler,
                "direct_sum_of_cyclics": r.direct_sum_of_cyclics,
                "projective": r.projective,
                "consistent": r.consistent,
            });
            if !r.consistent {
                return Ok(Outcome::internal(out));
            }
            out
        }
        Command::Harness => unreachable!("dispatched separately"),
    };
    Ok(Outcome::ok(out))
}

fn devissage(ctx: &Context) -> Run<Value> {
    let m = module(ctx, "module")?;
    match str_param(ctx, "mode")? {
        "filtration" => {
            let f = KaplanskyFiltration {
                ambient: m.clone(),
                stages: submodules(m, mat_list(ctx, "stages")?, "stages")?,
                complements: submodules(m, mat_list(ctx, "complements")?, "complements")?,
            };
            let rep = validate_filtration(&f).map_err(domain("params"))?;
            let mut out = json!({
                "valid": rep.valid,
                "violation": rep.violation,
                "limit_continuity_vacuous": rep.limit_continuity_vacuous,
            });
            if rep.valid {
                out["decomposition"] = decomposition_json(&filtration_to_decomposition(&f).map_err(domain("params"))?);
            }
            Ok(out)
        }
        "decomposition" => {
            let d = InternalDecomposition::new(m, submodules(m, mat_list(ctx, "parts")?, "parts")?)
                .map_err(domain("params.parts"))?;
            let f = decomposition_to_filtration(&d).map_err(domain("params.parts"))?;
            Ok(json!({
                "stages": f.stages.iter().map(submodule_json).collect::<Vec<_>>(),
                "complements": f.complements.iter().map(submodule_json).collect::<Vec<_>>(),
            }))
        }
        "summand" => {
            let d = InternalDecomposition::new(m, submodules(m, mat_list(ctx, "parts")?, "parts")?)
                .map_err(domain("params.parts"))?;
            let e = morphism(ctx, "e")?;
            let sd = summand_devissage(&d, e).map_err(domain("params"))?;
            Ok(json!({
                "decomposition": decomposition_json(&sd.decomposition),
                "stages": sd.stages.iter().map(submodule_json).collect::<Vec<_>>(),
            }))
        }
        "cyclic" => {
            let d = cyclic_decomposition(m).map_err(domain("params.module"))?;
            Ok(decomposition_json(&d))
        }
        other => Err(InputError::new(
            "InvalidParameter",
            "params.mode",
            format!("unknown mode `{other}`; expected filtration, decomposition, summand or cyclic"),
        )
        .into()),
    }
}

fn descend(cli: &Cli, ctx: &Context) -> Run<Outcome> {
    let phi = ring_map(ctx)?;
    match str_param(ctx, "mode")? {
        "generators" => {
            let p = module(ctx, "module")?;
            let Value::Array(gens) = param(ctx, "generators")? else {
                return Err(InputError::new("InvalidParameter", "params.generators", "expected a list").into());
            };
            let mut sums = Vec::new();
            for (i, g) in gens.iter().enumerate() {
                let loc = format!("params.generators[{i}]");
                let Value::Array(terms) = g else {
                    return Err(InputError::new("InvalidParameter", loc, "expected a list of terms").into());
                };
                let mut sum = Vec::new();
                for (j, t) in terms.iter().enumerate() {
                    let tl = format!("{loc}[{j}]");
                    let s = elem_from_value(t.get("scalar").unwrap_or(&Value::Null), phi.target, &format!("{tl}.scalar"))?;
                    let v = vector_from_value(t.get("vector").unwrap_or(&Value::Null), phi.source, p.gens(), &format!("{tl}.vector"))?;
                    sum.push((s, v));
                }
                sums.push(sum);
            }
            let comps = descend_generators(&phi, p, &sums).map_err(domain("params.generators"))?;
            Ok(Outcome::ok(json!({ "components": comps.iter().map(vector_to_json).collect::<Vec<_>>() })))
        }
        "projectivity" => {
            let r = check_projectivity_descent(&phi, module(ctx, "module")?).map_err(domain("params.module"))?;
            let out = json!({
                "map": ring_map_to_json(&r.map),
                "module_invariants": invariants_to_json(&r.module_invariants),
                "extended_invariants": invariants_to_json(&r.extended_invariants),
                "verdict_base": r.verdict_base,
                "verdict_extended": r.verdict_extended,
                "equivalence_holds": r.equivalence_holds,
                "counterexample_flag": r.counterexample_flag,
            });
            Ok(if r.is_violation() { Outcome::internal(out) } else { Outcome::ok(out) })
        }
        "ml" => {
            let r = check_ml_descent(&phi, tower(ctx, "tower")?, horizon(cli, ctx)?).map_err(domain("params.tower"))?;
            let status = match r.status {
                MLDescentStatus::Holds => "holds",
                MLDescentStatus::Inconclusive => "inconclusive",
                MLDescentStatus::Violated => "violated",
            };
            let out = json!({ "base": verdict_json(&r.base), "extended": verdict_json(&r.extended), "status": status });
            Ok(if r.status == MLDescentStatus::Violated { Outcome::internal(out) } else { Outcome::ok(out) })
        }
        other => Err(InputError::new(
            "InvalidParameter",
            "params.mode",
            format!("unknown mode `{other}`; expected generators, projectivity or ml"),
        )
        .into()),
    }
}

// ---- harness ------------------------------------------------------------------------

fn harness_config(cli: &Cli) -> Run<HarnessConfig> {
    let mut cfg = HarnessConfig::new(cli.seed.unwrap_or(0), cli.trials.unwrap_or(100));
    if let Some(r) = &cli.rings {
        cfg.rings = r.clone();
    }
    if let Some(p) = cli.parallelism {
        cfg.parallelism = p;
    }
    if let Some(h) = cli.horizon {
        cfg.horizon = h;
    }
    if let Some(g) = cli.max_gens {
        cfg.max_gens = g;
    }
    if let Some(e) = cli.max_entry {
        cfg.max_entry = e;
    }
    if let Some(s) = &cli.suites {
        cfg.suites = s.clone();
    }
    if let Some(f) = &cli.fault {
        cfg.fault = Some(
            harness::Fault::parse(f).ok_or_else(|| InputError::new("InvalidParameter", "--fault", format!("unknown fault `{f}`")))?,
        );
    }
    cfg.validate().map_err(|m| InputError::new("InvalidConfig", "argv", m))?;
    Ok(cfg)
}

fn run_harness(cli: &Cli) -> Run<Outcome> {
    if cli.input.is_some() {
        return replay(cli);
    }
    let cfg = harness_config(cli)?;
    let start = Instant::now();
    let report = harness::run(&cfg).map_err(|m| InputError::new("InvalidConfig", "argv", m))?;
    let note = format!("harness wall-clock time: {:.3} s", start.elapsed().as_secs_f64());
    let code = if report.total_failures() == 0 { 0 } else { 1 };
    Ok(Outcome { code, output: report.to_json(), note: Some(note), pretty: true })
}

/// Accepts one serialized instance, or a whole report (every failure in it
/// is replayed).
fn replay(cli: &Cli) -> Run<Outcome> {
    let text = read_input(cli)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        InputError::new("MalformedJson", format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let mut cases = Vec::new();
    if let Some(suites) = v.get("suites").and_then(Value::as_array) {
        for (i, s) in suites.iter().enumerate() {
            for (j, f) in s.get("failures").and_then(Value::as_array).into_iter().flatten().enumerate() {
                let c = f.get("counterexample").unwrap_or(&Value::Null);
                cases.push(Case::from_json(c).map_err(|mut e| {
                    e.location = format!("suites[{i}].failures[{j}].counterexample.{}", e.location);
                    e
                })?);
            }
        }
    } else {
        cases.push(Case::from_json(&v)?);
    }
    let mut results = Vec::new();
    let mut reproduced = 0;
    for case in &cases {
        let (failure, error) = match harness::replay(case) {
            Ok(c) => (c.failure, None),
            Err(e) if e.is_internal() => (Some(format!("{}: {e}", e.clause())), None),
            Err(e) => (None, Some(InputError::from_error("instance", &e).to_json()["error"].clone())),
        };
        if failure.is_some() {
            reproduced += 1;
        }
        results.push(json!({ "suite": case.suite, "failure": failure, "error": error }));
    }
    let out = json!({ "replayed": cases.len(), "failures": reproduced, "results": results });
    Ok(Outcome { code: if reproduced > 0 { 1 } else { 0 }, output: out, note: None, pretty: false })
}

/// Render an outcome the way the binary prints it.
pub fn render(o: &Outcome) -> String {
    if o.output.is_null() {
        return String::new();
    }
    if o.pretty {
        serde_json::to_string_pretty(&o.output).expect("serializable")
    } else {
        serde_json::to_string(&o.output).expect("serializable")
    }
}
