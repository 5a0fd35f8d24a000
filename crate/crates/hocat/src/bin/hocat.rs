//! Batch front-end over the library: load instances and batteries, run the
//! validator / builder / classifier / derived-functor pipelines, and emit
//! text or JSON reports.
//!
//! Exit codes: 0 pass, 1 property failure, 2 invalid input, 3 refused
//! (budget exhausted or non-confluent rewriting). Every run is
//! deterministic; there is no seed flag because nothing is random.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map as JsonMap, Value};

use hocat::battery::Battery;
use hocat::fincat::{load_instance, serialize_instance, FunctorFile, InstanceData, LoadError};
use hocat::homotopy::{build_ho, build_ho_route, build_hok, HoRoute};
use hocat::localization::identity_witness;
use hocat::model::ModelData;
use hocat::report::{self, Report, Verdict};
use hocat::{
    classify, compare_kf, compare_ks, derive_f, derive_k_quillen, derive_s,
    localize_by_rewriting, validate_model, EngineError, Functor, Meter, MorphismClass,
    DEFAULT_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "hocat",
    version,
    about = "Finite-category engine: localizations, homotopy categories and \
             derived functors from explicit composition tables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Instance file (canonical JSON).
    #[arg(long, global = true, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Target instance for derive/compare; defaults to --instance.
    #[arg(long, global = true, value_name = "FILE")]
    target_instance: Option<PathBuf>,
    /// Functor file (obj_map/mor_map by name); defaults to the identity.
    #[arg(long, global = true, value_name = "FILE")]
    functor: Option<PathBuf>,
    /// Battery directory; default: $HOCAT_BATTERY_DIR, else the shipped set.
    #[arg(long, global = true, value_name = "DIR")]
    battery: Option<PathBuf>,
    /// Search node budget for the whole command.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Replacement route for ho builds and k derivations.
    #[arg(long, global = true, value_enum, default_value_t = RouteArg::Both)]
    route: RouteArg,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the category table and, when present, the model axioms.
    Validate,
    /// Build a homotopy category or a strict localization by rewriting.
    Build {
        #[arg(value_enum)]
        which: BuildKind,
    },
    /// Build a localization witness and classify it against the battery.
    Classify {
        /// Witness to classify; default: ho when the instance has model
        /// data, else localize.
        #[arg(value_enum)]
        which: Option<WitnessKind>,
    },
    /// Construct a derived functor between two model instances.
    Derive {
        #[arg(value_enum)]
        kind: DeriveKind,
    },
    /// Cross-check two derived-functor constructions against each other.
    Compare {
        #[arg(value_enum)]
        pair: ComparePair,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Hok,
    Ho,
    Localize,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Hok,
    Ho,
    Localize,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeriveKind {
    K,
    F,
    S,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComparePair {
    Kf,
    Ks,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Q,
    Ctilde,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn command_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::Validate => "validate".into(),
        Cmd::Build { which } => format!("build {}", match which {
            BuildKind::Hok => "hok",
            BuildKind::Ho => "ho",
            BuildKind::Localize => "localize",
        }),
        Cmd::Classify { .. } => "classify".into(),
        Cmd::Derive { kind } => format!("derive {}", match kind {
            DeriveKind::K => "k",
            DeriveKind::F => "f",
            DeriveKind::S => "s",
        }),
        Cmd::Compare { pair } => format!("compare {}", match pair {
            ComparePair::Kf => "kf",
            ComparePair::Ks => "ks",
        }),
    }
}

/// Input problems exit 2 without a report; engine errors become a verdict.
enum RunError {
    Input(String),
    Engine(EngineError),
}

impl From<LoadError> for RunError {
    fn from(e: LoadError) -> RunError {
        RunError::Input(e.to_string())
    }
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> RunError {
        RunError::Engine(e)
    }
}

type RunOutput = (Verdict, Vec<String>, Value);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let meter = Meter::new(cli.opts.budget);
    let (verdict, counterexamples, detail) = match run(&cli.cmd, &cli.opts, &meter) {
        Ok(out) => out,
        Err(RunError::Input(msg)) => {
            eprintln!("invalid input: {msg}");
            return ExitCode::from(2);
        }
        Err(RunError::Engine(e)) => match e {
            EngineError::BudgetExceeded { .. } | EngineError::NonConfluent { .. } => {
                (Verdict::Refused, vec![e.to_string()], Value::Null)
            }
            EngineError::MissingQ | EngineError::Mismatch(_) => {
                eprintln!("invalid input: {e}");
                return ExitCode::from(2);
            }
            other => (Verdict::Fail, vec![other.to_string()], Value::Null),
        },
    };
    let report = Report {
        command: command_name(&cli.cmd),
        verdict,
        counterexamples,
        nodes_used: meter.used(),
        budget: meter.limit(),
        elapsed_ms: start.elapsed().as_millis() as u64,
        detail,
    };
    match cli.opts.format {
        FormatArg::Text => print!("{}", report.to_text()),
        FormatArg::Json => print!("{}", report.to_json()),
    }
    ExitCode::from(report.verdict.exit_code())
}

fn run(cmd: &Cmd, opts: &Opts, meter: &Meter) -> Result<RunOutput, RunError> {
    match cmd {
        Cmd::Validate => cmd_validate(opts, meter),
        Cmd::Build { which } => cmd_build(*which, opts, meter),
        Cmd::Classify { which } => cmd_classify(*which, opts, meter),
        Cmd::Derive { kind } => cmd_derive(*kind, opts, meter),
        Cmd::Compare { pair } => cmd_compare(*pair, opts, meter),
    }
}

fn load(opts: &Opts) -> Result<InstanceData, RunError> {
    let path = opts
        .instance
        .as_ref()
        .ok_or_else(|| RunError::Input("--instance is required".into()))?;
    Ok(load_instance(path)?)
}

fn model_of(inst: &InstanceData) -> Result<ModelData, RunError> {
    if inst.model.is_none() {
        return Err(RunError::Input(format!("instance {} has no model data", inst.label)));
    }
    // from_instance only rejects shape-level corruption in the replacement
    // sections, which counts as invalid input, not a property failure
    ModelData::from_instance(inst).map_err(|e| match e {
        EngineError::Inconsistency(msg) => RunError::Input(msg),
        other => RunError::Engine(other),
    })
}

fn weq_of(inst: &InstanceData) -> Result<&MorphismClass, RunError> {
    inst.weq().ok_or_else(|| {
        RunError::Input(format!("instance {} marks no weak equivalences", inst.label))
    })
}

fn battery_of(opts: &Opts) -> Result<Battery, RunError> {
    match &opts.battery {
        Some(dir) => Ok(Battery::load_dir(dir)?),
        None => Ok(Battery::default_battery()?),
    }
}

fn obj_names(c: &hocat::CatRef, objs: &[hocat::ObjId]) -> Vec<String> {
    objs.iter().map(|&x| c.obj_name(x).to_string()).collect()
}

fn cmd_validate(opts: &Opts, meter: &Meter) -> Result<RunOutput, RunError> {
    let inst = load(opts)?;
    let mut detail = JsonMap::new();
    detail.insert("instance".into(), json!(inst.label));
    detail.insert("category".into(), report::category_value(&inst.cat));
    let mut cex = Vec::new();
    if inst.model.is_some() {
        let md = model_of(&inst)?;
        let vr = validate_model(&md, meter)?;
        let mut items = Vec::new();
        for it in &vr.items {
            let mut row = JsonMap::new();
            row.insert("axiom".into(), json!(it.name));
            row.insert("ok".into(), json!(it.ok));
            row.insert("checked".into(), json!(it.checked));
            if let Some(c) = &it.counterexample {
                row.insert("counterexample".into(), json!(c));
                cex.push(format!("{}: {}", it.name, c));
            }
            items.push(Value::Object(row));
        }
        detail.insert("axioms".into(), Value::Array(items));
    } else {
        detail.insert("axioms".into(), json!("category table only (no model data)"));
    }
    let verdict = if cex.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok((verdict, cex, Value::Object(detail)))
}

fn cmd_build(which: BuildKind, opts: &Opts, meter: &Meter) -> Result<RunOutput, RunError> {
    let inst = load(opts)?;
    let mut detail = JsonMap::new();
    detail.insert("instance".into(), json!(inst.label));
    match which {
        BuildKind::Hok => {
            let md = model_of(&inst)?;
            let (hok, wit) = build_hok(&md, meter)?;
            detail.insert("fc_objects".into(), json!(obj_names(&md.cat, &hok.fc)));
            detail.insert("category".into(), report::category_value(hok.cat()));
            detail.insert("localization".into(), report::functor_value(&hok.l));
            detail.insert("witness".into(), report::witness_value(&wit));
        }
        BuildKind::Ho => {
            let md = model_of(&inst)?;
            let (ho, wit) = match opts.route {
                RouteArg::Both => build_ho(&md, meter)?,
                RouteArg::Q => build_ho_route(&md, HoRoute::Q, meter)?,
                RouteArg::Ctilde => build_ho_route(&md, HoRoute::CTilde, meter)?,
            };
            detail.insert("route".into(), json!(route_str(ho.route)));
            detail.insert("fc_images".into(), json!(obj_names(&md.cat, &ho.img)));
            detail.insert("category".into(), report::category_value(ho.cat()));
            detail.insert("localization".into(), report::functor_value(&ho.gamma));
            detail.insert("witness".into(), report::witness_value(&wit));
        }
        BuildKind::Localize => {
            let w = weq_of(&inst)?.clone();
            let wit = localize_by_rewriting(&inst.cat, &w, meter)?;
            detail.insert("category".into(), report::category_value(&wit.loc));
            detail.insert("localization".into(), report::functor_value(&wit.l));
            detail.insert("witness".into(), report::witness_value(&wit));
            // loadable snapshot of the result, for piping back into the CLI
            let out = InstanceData {
                label: format!("{}_localized", inst.label),
                cat: wit.loc.clone(),
                w: None,
                model: None,
            };
            let raw: Value = serde_json::from_str(&serialize_instance(&out))
                .expect("canonical instance serialization is valid json");
            detail.insert("localized_instance".into(), raw);
        }
    }
    Ok((Verdict::Pass, Vec::new(), Value::Object(detail)))
}

fn route_str(route: HoRoute) -> &'static str {
    match route {
        HoRoute::Q => "q",
        HoRoute::CTilde => "ctilde",
    }
}

fn cmd_classify(
    which: Option<WitnessKind>,
    opts: &Opts,
    meter: &Meter,
) -> Result<RunOutput, RunError> {
    let inst = load(opts)?;
    let which = which.unwrap_or(if inst.model.is_some() {
        WitnessKind::Ho
    } else {
        WitnessKind::Localize
    });
    let mut wit = match which {
        WitnessKind::Hok => build_hok(&model_of(&inst)?, meter)?.1,
        WitnessKind::Ho => build_ho(&model_of(&inst)?, meter)?.1,
        WitnessKind::Localize => localize_by_rewriting(&inst.cat, weq_of(&inst)?, meter)?,
        WitnessKind::Identity => identity_witness(&inst.cat),
    };
    // the default battery includes the witness's own endpoints; an explicit
    // --battery directory is used literally
    let battery = match battery_of(opts)? {
        b if opts.battery.is_none() => b.with_extra(&[&wit.base, &wit.loc]),
        b => b,
    };
    classify(&mut wit, &battery, meter)?;
    let mut detail = JsonMap::new();
    detail.insert("instance".into(), json!(inst.label));
    detail.insert(
        "witness".into(),
        json!(match which {
            WitnessKind::Hok => "hok",
            WitnessKind::Ho => "ho",
            WitnessKind::Localize => "localize",
            WitnessKind::Identity => "identity",
        }),
    );
    detail.insert(
        "battery".into(),
        json!({
            "id": battery.id,
            "members": battery.members.iter().map(|d| d.label()).collect::<Vec<_>>(),
        }),
    );
    detail.insert("flags".into(), serde_json::to_value(&wit.flags).expect("flags serialize"));
    detail.insert(
        "evidence".into(),
        serde_json::to_value(&wit.evidence).expect("evidence serializes"),
    );
    Ok((Verdict::Pass, Vec::new(), Value::Object(detail)))
}

/// Loads source and target, resolving the functor file between them; with
/// no --functor the pair must be a single instance and the identity is used.
fn load_span(opts: &Opts) -> Result<(InstanceData, InstanceData, Functor), RunError> {
    let src = load(opts)?;
    let tgt = match &opts.target_instance {
        Some(p) => Some(load_instance(p)?),
        None => None,
    };
    let f = match &opts.functor {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
            let ff = FunctorFile::parse(&text)?;
            ff.resolve(&src.cat, &tgt.as_ref().unwrap_or(&src).cat)?
        }
        None => {
            if tgt.is_some() {
                return Err(RunError::Input(
                    "--functor is required when --target-instance is given".into(),
                ));
            }
            Functor::identity(src.cat.clone())
        }
    };
    let tgt = tgt.unwrap_or_else(|| src.clone());
    Ok((src, tgt, f))
}

fn routes_for(route: RouteArg, mdm: &ModelData) -> Vec<HoRoute> {
    match route {
        RouteArg::Q => vec![HoRoute::Q],
        RouteArg::Ctilde => vec![HoRoute::CTilde],
        RouteArg::Both => {
            let mut v = Vec::new();
            if mdm.qfun.is_some() && mdm.rfun.is_some() {
                v.push(HoRoute::Q);
            }
            v.push(HoRoute::CTilde);
            v
        }
    }
}

fn cmd_derive(kind: DeriveKind, opts: &Opts, meter: &Meter) -> Result<RunOutput, RunError> {
    let (src, tgt, f) = load_span(opts)?;
    let mdm = model_of(&src)?;
    let mdn = model_of(&tgt)?;
    let mut detail = JsonMap::new();
    detail.insert("source".into(), json!(src.label));
    detail.insert("target".into(), json!(tgt.label));
    detail.insert("functor".into(), report::functor_value(&f));
    match kind {
        DeriveKind::K => {
            let mut routes = Vec::new();
            for route in routes_for(opts.route, &mdm) {
                let dk = derive_k_quillen(&f, &mdm, &mdn, route, meter)?;
                let mut comparisons = JsonMap::new();
                for x in mdm.cat.objects() {
                    comparisons.insert(
                        mdm.cat.obj_name(x).to_string(),
                        json!(mdm.cat.mor_name(dk.phi[x.0 as usize])),
                    );
                }
                routes.push(json!({
                    "route": route_str(dk.route),
                    "extension": report::functor_value(&dk.pair.ext),
                    "counit": report::nat_value(&dk.pair.counit),
                    "certificate_rows": dk.pair.certificate.len(),
                    "replacement_comparisons": comparisons,
                }));
            }
            detail.insert("routes".into(), Value::Array(routes));
        }
        DeriveKind::F => {
            let df = derive_f(&f, &mdm, &mdn, meter)?;
            let cofs: Vec<&str> =
                df.sub.cat.objects().map(|x| df.sub.cat.obj_name(x)).collect();
            detail.insert("cofibrant_objects".into(), json!(cofs));
            detail.insert("extension".into(), report::functor_value(&df.functor));
            detail.insert("iota".into(), report::nat_value(&df.iota));
            detail.insert("weak_comparison".into(), report::nat_value(&df.weak));
        }
        DeriveKind::S => {
            let ds = derive_s(&f, &mdm, &mdn, meter)?;
            detail.insert("extension".into(), report::functor_value(&ds.functor));
            detail.insert("quasi_inverse".into(), report::functor_value(&ds.quasi_inverse));
            detail.insert("replacement_identity_checked".into(), json!(ds.checked));
            detail.insert("weak_comparison".into(), report::nat_value(&ds.weak));
        }
    }
    Ok((Verdict::Pass, Vec::new(), Value::Object(detail)))
}

fn cmd_compare(pair: ComparePair, opts: &Opts, meter: &Meter) -> Result<RunOutput, RunError> {
    let (src, tgt, f) = load_span(opts)?;
    let mdm = model_of(&src)?;
    let mdn = model_of(&tgt)?;
    let mut detail = JsonMap::new();
    detail.insert("source".into(), json!(src.label));
    detail.insert("target".into(), json!(tgt.label));
    detail.insert("functor".into(), report::functor_value(&f));
    match pair {
        ComparePair::Kf => {
            let rep = compare_kf(&f, &mdm, &mdn, meter)?;
            detail.insert("equal".into(), json!(rep.equal));
            detail.insert("certificate_rows".into(), json!(rep.kan.pair.certificate.len()));
            detail.insert("extension".into(), report::functor_value(&rep.kan.pair.ext));
            detail.insert("iota".into(), report::nat_value(&rep.kan.from_f.iota));
        }
        ComparePair::Ks => {
            let rep = compare_ks(&f, &mdm, &mdn, meter)?;
            detail.insert("extensions_equal".into(), json!(true));
            detail.insert("routes_coincide".into(), json!(rep.routes_coincide));
            detail.insert("replacement_identity_checked".into(), json!(rep.checked));
            detail.insert("extension".into(), report::functor_value(&rep.s.functor));
            detail.insert("quasi_inverse".into(), report::functor_value(&rep.s.quasi_inverse));
            detail.insert("cross_route_iso".into(), report::nat_value(&rep.cross_iso));
        }
    }
    Ok((Verdict::Pass, Vec::new(), Value::Object(detail)))
}
