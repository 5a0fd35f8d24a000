//! C ABI over the engine. Callers hold parsed instances behind opaque
//! pointers, every operation returns a status code aligned with the CLI
//! exit codes, and results come back as the same JSON report strings the
//! CLI prints with `--format json`.
//!
//! Conventions, uniform across the surface:
//! - out parameters are written only on the statuses documented per call;
//!   returned strings are heap allocations owned by the caller and must be
//!   released with [`hocat_string_free`].
//! - a null required pointer gives `InvalidInput` and sets the thread's
//!   error message; nothing is written through out parameters.
//! - `budget` is a search-node limit; 0 means the library default.
//! - panics never unwind across the boundary: they surface as `Internal`
//!   with the message in [`hocat_last_error`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Instant;

use hocat::battery::Battery;
use hocat::fincat::{load_instance, parse_instance, serialize_instance, InstanceData};
use hocat::localization::identity_witness;
use hocat::model::validate_model;
use hocat::report::{category_value, class_value, witness_value, Report, Verdict};
use hocat::{
    build_ho, build_hok, classify, localize_by_rewriting, EngineError, LocalizationWitness,
    Meter, ModelData, DEFAULT_BUDGET,
};
use serde_json::{json, Value};

/// Status of one call. The values match the CLI's exit codes, with one
/// extra for trapped panics.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HocatStatus {
    /// The operation ran and every checked property held.
    Pass = 0,
    /// The operation ran and found a genuine counterexample; the report
    /// names it.
    Fail = 1,
    /// The input was unusable: unreadable file, malformed tables, missing
    /// sections, a null pointer. Details in `hocat_last_error`.
    InvalidInput = 2,
    /// The engine refused to finish inside the node budget; the report
    /// carries the refusal.
    Refused = 3,
    /// A trapped internal panic. Details in `hocat_last_error`.
    Internal = 4,
}

/// Witness selector for [`hocat_classify`]. Passed as `uint32_t` so that an
/// out-of-range value is a reportable error instead of undefined behavior.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HocatWitnessKind {
    /// The fibrant-cofibrant quotient built from model data.
    WitnessHok = 0,
    /// The all-object quotient built from model data.
    WitnessHo = 1,
    /// The rewriting localization at the instance's marked class.
    WitnessLocalize = 2,
    /// The identity functor on the instance's category.
    WitnessIdentity = 3,
}

/// A parsed instance: a finite category with optional marked-class and
/// model-structure tables. Opaque; create with [`hocat_instance_parse`] or
/// [`hocat_instance_load`], release with [`hocat_instance_free`].
pub struct HocatInstance {
    inner: InstanceData,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn invalid(msg: &str) -> HocatStatus {
    set_error(msg);
    HocatStatus::InvalidInput
}

fn guard(f: impl FnOnce() -> HocatStatus) -> HocatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_error(&msg);
            HocatStatus::Internal
        }
    }
}

/// The crate version as a static string; never freed.
#[no_mangle]
pub extern "C" fn hocat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// The error message of the current thread's most recent failing call, or
/// an empty string. The pointer stays valid until the next failing call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn hocat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned through an out parameter. Null is a no-op.
///
/// # Safety
///
/// `s` must be null or a pointer previously returned by this library
/// through a `char **` out parameter, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hocat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases an instance handle. Null is a no-op.
///
/// # Safety
///
/// `inst` must be null or a pointer previously returned by
/// [`hocat_instance_parse`] or [`hocat_instance_load`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hocat_instance_free(inst: *mut HocatInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

unsafe fn take_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, HocatStatus> {
    if p.is_null() {
        return Err(invalid(&format!("null pointer passed as {what}")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not valid UTF-8")))
}

fn emit_instance(inst: InstanceData, out: *mut *mut HocatInstance) -> HocatStatus {
    let boxed = Box::new(HocatInstance { inner: inst });
    unsafe { *out = Box::into_raw(boxed) };
    HocatStatus::Pass
}

/// Parses an instance from JSON text under the given label. On `Pass`
/// writes a fresh handle to `out`; on any other status `out` is untouched.
///
/// # Safety
///
/// `json` and `label` must be null-terminated strings and `out` a valid
/// pointer to writable memory, all readable for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn hocat_instance_parse(
    label: *const c_char,
    json: *const c_char,
    out: *mut *mut HocatInstance,
) -> HocatStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null pointer passed as out");
        }
        let label = match take_str(label, "label") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let json = match take_str(json, "json") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_instance(label, json) {
            Ok(inst) => emit_instance(inst, out),
            Err(e) => invalid(&e.to_string()),
        }
    })
}

/// Loads an instance from a JSON file; the label is the file stem. On
/// `Pass` writes a fresh handle to `out`.
///
/// # Safety
///
/// `path` must be a null-terminated string and `out` a valid pointer to
/// writable memory, both readable for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn hocat_instance_load(
    path: *const c_char,
    out: *mut *mut HocatInstance,
) -> HocatStatus {
    guard(|| {
        if out.is_null() {
            return invalid("null pointer passed as out");
        }
        let path = match take_str(path, "path") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match load_instance(Path::new(path)) {
            Ok(inst) => emit_instance(inst, out),
            Err(e) => invalid(&e.to_string()),
        }
    })
}

/// Writes the instance back out as canonical JSON (the same bytes the
/// repository's instance files use). On `Pass` the caller owns `*out_json`.
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_json` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_instance_to_json(
    inst: *const HocatInstance,
    out_json: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        if inst.is_null() || out_json.is_null() {
            return invalid("null pointer passed to hocat_instance_to_json");
        }
        let text = serialize_instance(&(*inst).inner);
        match CString::new(text) {
            Ok(c) => {
                *out_json = c.into_raw();
                HocatStatus::Pass
            }
            Err(_) => invalid("serialized instance contained an interior NUL"),
        }
    })
}

enum OpError {
    Input(String),
    Engine(EngineError),
}

impl From<EngineError> for OpError {
    fn from(e: EngineError) -> Self {
        OpError::Engine(e)
    }
}

type OpResult = Result<(Verdict, Vec<String>, Value), OpError>;

fn meter_for(budget: u64) -> (u64, Meter) {
    let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };
    (budget, Meter::new(budget))
}

/// Runs one operation and converts the outcome into (status, report JSON),
/// with the same mapping the CLI applies to its exit code.
fn run_op(
    command: &str,
    budget: u64,
    out_report: *mut *mut c_char,
    op: impl FnOnce(&Meter) -> OpResult,
) -> HocatStatus {
    if out_report.is_null() {
        return invalid("null pointer passed as out_report");
    }
    let started = Instant::now();
    let (budget, meter) = meter_for(budget);
    let (verdict, counterexamples, detail) = match op(&meter) {
        Ok(parts) => parts,
        Err(OpError::Input(msg)) => return invalid(&msg),
        Err(OpError::Engine(e)) => match e {
            EngineError::BudgetExceeded { .. } | EngineError::NonConfluent { .. } => {
                (Verdict::Refused, vec![e.to_string()], Value::Null)
            }
            EngineError::MissingQ | EngineError::Mismatch => return invalid(&e.to_string()),
            other => (Verdict::Fail, vec![other.to_string()], Value::Null),
        },
    };
    let status = match verdict {
        Verdict::Pass => HocatStatus::Pass,
        Verdict::Fail => HocatStatus::Fail,
        Verdict::Refused => HocatStatus::Refused,
    };
    let report = Report {
        command: command.to_string(),
        verdict,
        counterexamples,
        nodes_used: meter.used(),
        budget,
        elapsed_ms: started.elapsed().as_millis() as u64,
        detail,
    };
    match CString::new(report.to_json()) {
        Ok(c) => {
            unsafe { *out_report = c.into_raw() };
            status
        }
        Err(_) => invalid("report contained an interior NUL"),
    }
}

unsafe fn instance_ref<'a>(inst: *const HocatInstance) -> Result<&'a InstanceData, HocatStatus> {
    if inst.is_null() {
        return Err(invalid("null pointer passed as inst"));
    }
    Ok(&(*inst).inner)
}

fn model_of(inst: &InstanceData) -> Result<ModelData, OpError> {
    if inst.model.is_none() {
        return Err(OpError::Input(format!(
            "instance {} has no model data",
            inst.label
        )));
    }
    ModelData::from_instance(inst).map_err(|e| OpError::Input(e.to_string()))
}

fn op_validate(inst: &InstanceData, m: &Meter) -> OpResult {
    if inst.model.is_none() {
        return Ok((
            Verdict::Pass,
            Vec::new(),
            json!({
                "instance": inst.label,
                "category": category_value(&inst.cat),
                "axioms": "category table only (no model data)",
            }),
        ));
    }
    let md = model_of(inst)?;
    let rep = validate_model(&md, m)?;
    let mut counterexamples = Vec::new();
    let mut rows = Vec::new();
    for item in &rep.items {
        let mut row = json!({
            "axiom": item.name,
            "ok": item.ok,
            "checked": item.checked,
        });
        if let Some(c) = &item.counterexample {
            row["counterexample"] = json!(c);
            counterexamples.push(format!("{}: {}", item.name, c));
        }
        rows.push(row);
    }
    let verdict = if rep.is_valid() { Verdict::Pass } else { Verdict::Fail };
    Ok((
        verdict,
        counterexamples,
        json!({
            "instance": inst.label,
            "category": category_value(&inst.cat),
            "axioms": rows,
        }),
    ))
}

/// Checks every model axiom of the instance and reports per-axiom rows.
/// `Pass` or `Fail` write the report to `out_report`; an instance without
/// model data passes with a note.
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_report` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_validate(
    inst: *const HocatInstance,
    budget: u64,
    out_report: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        let inst = match instance_ref(inst) {
            Ok(i) => i,
            Err(st) => return st,
        };
        run_op("validate", budget, out_report, |m| op_validate(inst, m))
    })
}

fn detail_for_witness(inst: &InstanceData, wit: &LocalizationWitness) -> Value {
    json!({
        "instance": inst.label,
        "category": category_value(&wit.loc),
        "witness": witness_value(wit),
    })
}

/// Builds the fibrant-cofibrant quotient of a model instance and writes the
/// report, including the localization witness, to `out_report`.
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_report` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_build_hok(
    inst: *const HocatInstance,
    budget: u64,
    out_report: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        let inst = match instance_ref(inst) {
            Ok(i) => i,
            Err(st) => return st,
        };
        run_op("build hok", budget, out_report, |m| {
            let md = model_of(inst)?;
            let (_, wit) = build_hok(&md, m)?;
            Ok((Verdict::Pass, Vec::new(), detail_for_witness(inst, &wit)))
        })
    })
}

/// Builds the all-object quotient of a model instance, preferring the
/// replacement-functor route when the instance ships one.
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_report` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_build_ho(
    inst: *const HocatInstance,
    budget: u64,
    out_report: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        let inst = match instance_ref(inst) {
            Ok(i) => i,
            Err(st) => return st,
        };
        run_op("build ho", budget, out_report, |m| {
            let md = model_of(inst)?;
            let (_, wit) = build_ho(&md, m)?;
            Ok((Verdict::Pass, Vec::new(), detail_for_witness(inst, &wit)))
        })
    })
}

/// Localizes the instance's category at its marked class by rewriting. The
/// report embeds `localized_instance`, a canonical instance snapshot of the
/// result that parses back through [`hocat_instance_parse`].
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_report` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_localize(
    inst: *const HocatInstance,
    budget: u64,
    out_report: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        let inst = match instance_ref(inst) {
            Ok(i) => i,
            Err(st) => return st,
        };
        run_op("build localize", budget, out_report, |m| {
            let w = inst.weq().ok_or_else(|| {
                OpError::Input(format!("instance {} marks no morphism class", inst.label))
            })?;
            let wit = localize_by_rewriting(&inst.cat, w, m)?;
            let snapshot = InstanceData {
                label: format!("{}_localized", inst.label),
                cat: wit.loc.clone(),
                w: None,
                model: None,
            };
            let mut detail = detail_for_witness(inst, &wit);
            detail["localized_instance"] =
                serde_json::from_str(&serialize_instance(&snapshot)).expect("canonical JSON");
            Ok((Verdict::Pass, Vec::new(), detail))
        })
    })
}

/// Builds the selected witness (`kind` is a `HocatWitnessKind` value),
/// grades it against the default battery extended with the witness's own
/// endpoint categories, and reports the four flags with their evidence.
/// A refuted flag is still a `Pass`: the classification itself succeeded.
///
/// # Safety
///
/// `inst` must be a live handle from this library and `out_report` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hocat_classify(
    inst: *const HocatInstance,
    kind: u32,
    budget: u64,
    out_report: *mut *mut c_char,
) -> HocatStatus {
    guard(|| {
        let inst = match instance_ref(inst) {
            Ok(i) => i,
            Err(st) => return st,
        };
        let (name, kind) = match kind {
            0 => ("classify hok", HocatWitnessKind::WitnessHok),
            1 => ("classify ho", HocatWitnessKind::WitnessHo),
            2 => ("classify localize", HocatWitnessKind::WitnessLocalize),
            3 => ("classify identity", HocatWitnessKind::WitnessIdentity),
            other => return invalid(&format!("unknown witness kind {other}")),
        };
        run_op(name, budget, out_report, |m| {
            let mut wit = match kind {
                HocatWitnessKind::WitnessHok => build_hok(&model_of(inst)?, m)?.1,
                HocatWitnessKind::WitnessHo => build_ho(&model_of(inst)?, m)?.1,
                HocatWitnessKind::WitnessLocalize => {
                    let w = inst.weq().ok_or_else(|| {
                        OpError::Input(format!(
                            "instance {} marks no morphism class",
                            inst.label
                        ))
                    })?;
                    localize_by_rewriting(&inst.cat, w, m)?
                }
                HocatWitnessKind::WitnessIdentity => identity_witness(&inst.cat),
            };
            let battery = Battery::default_battery()
                .map_err(|e| OpError::Input(e.to_string()))?
                .with_extra(&[&wit.base, &wit.loc]);
            classify(&mut wit, &battery, m)?;
            Ok((
                Verdict::Pass,
                Vec::new(),
                json!({
                    "instance": inst.label,
                    "battery": {
                        "id": battery.id,
                        "members": battery.members.iter().map(|c| c.label()).collect::<Vec<_>>(),
                    },
                    "marked": class_value(&wit.base, &wit.w),
                    "witness": witness_value(&wit),
                }),
            ))
        })
    })
}
