//! Instance files: parsing, shape checking and canonical serialization.
//!
//! An instance file carries one category as a total composition table, with
//! optional morphism classes and optional model-structure data. All
//! references are by name; numeric ids are assigned densely in file order.
//! [`serialize_instance`] emits a canonical form, and parsing followed by
//! serializing reproduces a canonical file byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Map as JsonMap;

use super::{CatRef, FinCategory, Functor, MorId, MorphismClass, ObjId, ShapeError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("duplicate entry for `{0}`")]
    DuplicateEntry(String),
    #[error("identities must cover every object exactly once; problem at `{0}`")]
    BadIdentities(String),
    #[error("model data incomplete: missing {0}")]
    IncompleteModel(String),
    #[error("factorization table must cover every morphism; problem at `{0}`")]
    BadFactorization(String),
    #[error("replacement data malformed: {0}")]
    BadReplacement(String),
}

#[derive(Serialize, Deserialize)]
struct RawMorphism {
    id: String,
    dom: String,
    cod: String,
}

#[derive(Serialize, Deserialize)]
struct RawComposition {
    g: String,
    f: String,
    gf: String,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawClasses {
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    w: Option<Vec<String>>,
    #[serde(rename = "Cof", skip_serializing_if = "Option::is_none")]
    cof: Option<Vec<String>>,
    #[serde(rename = "Fib", skip_serializing_if = "Option::is_none")]
    fib: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawFactorization {
    first: String,
    second: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQ {
    obj_map: JsonMap<String, serde_json::Value>,
    mor_map: JsonMap<String, serde_json::Value>,
    q_components: JsonMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawR {
    obj_map: JsonMap<String, serde_json::Value>,
    mor_map: JsonMap<String, serde_json::Value>,
    r_components: JsonMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    objects: Vec<String>,
    morphisms: Vec<RawMorphism>,
    identities: JsonMap<String, serde_json::Value>,
    composition: Vec<RawComposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<RawClasses>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terminal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fact_cof_trivfib: Option<JsonMap<String, serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fact_trivcof_fib: Option<JsonMap<String, serde_json::Value>>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<RawQ>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    r: Option<RawR>,
}

/// Replacement functor data resolved to ids (shape-checked, not law-checked).
#[derive(Debug, Clone)]
pub struct ReplacementSection {
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
    /// Component at each object: `QX -> X` for Q, `X -> RX` for R.
    pub components: Vec<MorId>,
}

/// Model-structure data resolved to ids (shape-checked, not law-checked).
#[derive(Debug, Clone)]
pub struct ModelSection {
    pub w: MorphismClass,
    pub cof: MorphismClass,
    pub fib: MorphismClass,
    pub initial: ObjId,
    pub terminal: ObjId,
    /// Per morphism: (cofibration, trivial fibration) with second e first = f.
    pub fact1: Vec<(MorId, MorId)>,
    /// Per morphism: (trivial cofibration, fibration).
    pub fact2: Vec<(MorId, MorId)>,
    pub q: Option<ReplacementSection>,
    pub r: Option<ReplacementSection>,
}

/// A parsed instance: the category plus whatever extensions the file carried.
#[derive(Debug, Clone)]
pub struct InstanceData {
    pub label: String,
    pub cat: CatRef,
    /// Marked weak equivalences, when the file has `classes.W` but no model.
    pub w: Option<MorphismClass>,
    pub model: Option<ModelSection>,
}

impl InstanceData {
    pub fn is_model(&self) -> bool {
        self.model.is_some()
    }

    /// The marked weak equivalences, from either the model or the bare class.
    pub fn weq(&self) -> Option<&MorphismClass> {
        self.model.as_ref().map(|m| &m.w).or(self.w.as_ref())
    }
}

fn str_value(v: &serde_json::Value, what: &str) -> Result<String, LoadError> {
    v.as_str()
        .map(|s| s.to_string())
        .ok_or_else(|| LoadError::BadReplacement(format!("{what} must map names to names")))
}

struct Resolver<'a> {
    cat: &'a FinCategory,
}

impl<'a> Resolver<'a> {
    fn obj(&self, name: &str) -> Result<ObjId, LoadError> {
        self.cat
            .obj_by_name(name)
            .ok_or_else(|| LoadError::UnknownObject(name.to_string()))
    }

    fn mor(&self, name: &str) -> Result<MorId, LoadError> {
        self.cat
            .mor_by_name(name)
            .ok_or_else(|| LoadError::UnknownMorphism(name.to_string()))
    }

    fn class(&self, names: &[String]) -> Result<MorphismClass, LoadError> {
        let mut members = Vec::new();
        for n in names {
            members.push(self.mor(n)?);
        }
        Ok(MorphismClass::new(self.cat, members))
    }

    /// A total name-keyed map over all objects, read in object order.
    fn obj_total<T>(
        &self,
        map: &JsonMap<String, serde_json::Value>,
        what: &str,
        mut read: impl FnMut(&Self, &serde_json::Value) -> Result<T, LoadError>,
    ) -> Result<Vec<T>, LoadError> {
        if map.len() != self.cat.n_objects() {
            return Err(LoadError::BadReplacement(format!(
                "{what} must cover every object exactly once"
            )));
        }
        let mut out = Vec::with_capacity(map.len());
        for x in self.cat.objects() {
            let v = map
                .get(self.cat.obj_name(x))
                .ok_or_else(|| LoadError::UnknownObject(self.cat.obj_name(x).to_string()))?;
            out.push(read(self, v)?);
        }
        Ok(out)
    }

    /// A total name-keyed map over all morphisms, read in morphism order.
    fn mor_total<T>(
        &self,
        map: &JsonMap<String, serde_json::Value>,
        what: &str,
        mut read: impl FnMut(&Self, &serde_json::Value) -> Result<T, LoadError>,
    ) -> Result<Vec<T>, LoadError> {
        if map.len() != self.cat.n_morphisms() {
            return Err(LoadError::BadFactorization(what.to_string()));
        }
        let mut out = Vec::with_capacity(map.len());
        for m in self.cat.morphisms() {
            let v = map
                .get(self.cat.mor_name(m))
                .ok_or_else(|| LoadError::UnknownMorphism(self.cat.mor_name(m).to_string()))?;
            out.push(read(self, v)?);
        }
        Ok(out)
    }
}

fn resolve_replacement(
    r: &Resolver<'_>,
    obj_map: &JsonMap<String, serde_json::Value>,
    mor_map: &JsonMap<String, serde_json::Value>,
    components: &JsonMap<String, serde_json::Value>,
) -> Result<ReplacementSection, LoadError> {
    Ok(ReplacementSection {
        obj_map: r.obj_total(obj_map, "obj_map", |r, v| r.obj(&str_value(v, "obj_map")?))?,
        mor_map: r.mor_total(mor_map, "mor_map", |r, v| r.mor(&str_value(v, "mor_map")?))?,
        components: r.obj_total(components, "components", |r, v| {
            r.mor(&str_value(v, "components")?)
        })?,
    })
}

fn resolve_factorization(
    r: &Resolver<'_>,
    map: &JsonMap<String, serde_json::Value>,
    what: &str,
) -> Result<Vec<(MorId, MorId)>, LoadError> {
    r.mor_total(map, what, |r, v| {
        let raw: RawFactorization = serde_json::from_value(v.clone())?;
        Ok((r.mor(&raw.first)?, r.mor(&raw.second)?))
    })
}

/// Parses an instance from JSON text.
pub fn parse_instance(label: &str, text: &str) -> Result<InstanceData, LoadError> {
    let raw: RawInstance = serde_json::from_str(text)?;

    let mut name_to_idx = std::collections::BTreeMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if name_to_idx.insert(o.clone(), i as u32).is_some() {
            return Err(LoadError::DuplicateEntry(o.clone()));
        }
    }
    let obj_idx = |name: &str| -> Result<u32, LoadError> {
        name_to_idx
            .get(name)
            .copied()
            .ok_or_else(|| LoadError::UnknownObject(name.to_string()))
    };

    let mut mor_names = std::collections::BTreeMap::new();
    let mut morphisms = Vec::new();
    for (i, m) in raw.morphisms.iter().enumerate() {
        if mor_names.insert(m.id.clone(), i as u32).is_some() {
            return Err(LoadError::DuplicateEntry(m.id.clone()));
        }
        morphisms.push((m.id.clone(), obj_idx(&m.dom)?, obj_idx(&m.cod)?));
    }
    let mor_idx = |name: &str| -> Result<u32, LoadError> {
        mor_names
            .get(name)
            .copied()
            .ok_or_else(|| LoadError::UnknownMorphism(name.to_string()))
    };

    if raw.identities.len() != raw.objects.len() {
        return Err(LoadError::BadIdentities(format!(
            "{} entries for {} objects",
            raw.identities.len(),
            raw.objects.len()
        )));
    }
    let mut identities = Vec::with_capacity(raw.objects.len());
    for o in &raw.objects {
        let v = raw
            .identities
            .get(o)
            .ok_or_else(|| LoadError::BadIdentities(o.clone()))?;
        let name = v
            .as_str()
            .ok_or_else(|| LoadError::BadIdentities(o.clone()))?;
        identities.push(mor_idx(name)?);
    }

    let mut compositions = Vec::with_capacity(raw.composition.len());
    for e in &raw.composition {
        compositions.push((mor_idx(&e.g)?, mor_idx(&e.f)?, mor_idx(&e.gf)?));
    }

    let cat = FinCategory::new(label, raw.objects, morphisms, identities, &compositions)?
        .into_ref();
    let r = Resolver { cat: &cat };

    let classes = raw.classes.as_ref();
    let w_names = classes.and_then(|c| c.w.as_ref());
    let cof_names = classes.and_then(|c| c.cof.as_ref());
    let fib_names = classes.and_then(|c| c.fib.as_ref());

    let model_parts_present = [
        cof_names.is_some(),
        fib_names.is_some(),
        raw.initial.is_some(),
        raw.terminal.is_some(),
        raw.fact_cof_trivfib.is_some(),
        raw.fact_trivcof_fib.is_some(),
    ];
    let model = if model_parts_present.iter().any(|&b| b) {
        let missing: Vec<&str> = [
            ("classes.W", w_names.is_some()),
            ("classes.Cof", cof_names.is_some()),
            ("classes.Fib", fib_names.is_some()),
            ("initial", raw.initial.is_some()),
            ("terminal", raw.terminal.is_some()),
            ("fact_cof_trivfib", raw.fact_cof_trivfib.is_some()),
            ("fact_trivcof_fib", raw.fact_trivcof_fib.is_some()),
        ]
        .iter()
        .filter(|(_, present)| !present)
        .map(|(name, _)| *name)
        .collect();
        if !missing.is_empty() {
            return Err(LoadError::IncompleteModel(missing.join(", ")));
        }
        Some(ModelSection {
            w: r.class(w_names.unwrap())?,
            cof: r.class(cof_names.unwrap())?,
            fib: r.class(fib_names.unwrap())?,
            initial: r.obj(raw.initial.as_ref().unwrap())?,
            terminal: r.obj(raw.terminal.as_ref().unwrap())?,
            fact1: resolve_factorization(&r, raw.fact_cof_trivfib.as_ref().unwrap(), "fact_cof_trivfib")?,
            fact2: resolve_factorization(&r, raw.fact_trivcof_fib.as_ref().unwrap(), "fact_trivcof_fib")?,
            q: match &raw.q {
                None => None,
                Some(q) => Some(resolve_replacement(&r, &q.obj_map, &q.mor_map, &q.q_components)?),
            },
            r: match &raw.r {
                None => None,
                Some(rr) => Some(resolve_replacement(&r, &rr.obj_map, &rr.mor_map, &rr.r_components)?),
            },
        })
    } else {
        None
    };

    let w = if model.is_none() {
        match w_names {
            Some(names) => Some(r.class(names)?),
            None => None,
        }
    } else {
        None
    };

    Ok(InstanceData { label: label.to_string(), cat, w, model })
}

/// Loads an instance file; the label is the file stem.
pub fn load_instance(path: &Path) -> Result<InstanceData, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|err| LoadError::Io {
        path: path.display().to_string(),
        err,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string());
    parse_instance(&label, &text)
}

fn class_names(cat: &FinCategory, class: &MorphismClass) -> Vec<String> {
    class.members().map(|m| cat.mor_name(m).to_string()).collect()
}

fn replacement_raw(
    cat: &FinCategory,
    rep: &ReplacementSection,
) -> (JsonMap<String, serde_json::Value>, JsonMap<String, serde_json::Value>, JsonMap<String, serde_json::Value>) {
    let mut obj_map = JsonMap::new();
    let mut components = JsonMap::new();
    for x in cat.objects() {
        obj_map.insert(
            cat.obj_name(x).to_string(),
            cat.obj_name(rep.obj_map[x.0 as usize]).to_string().into(),
        );
        components.insert(
            cat.obj_name(x).to_string(),
            cat.mor_name(rep.components[x.0 as usize]).to_string().into(),
        );
    }
    let mut mor_map = JsonMap::new();
    for m in cat.morphisms() {
        mor_map.insert(
            cat.mor_name(m).to_string(),
            cat.mor_name(rep.mor_map[m.0 as usize]).to_string().into(),
        );
    }
    (obj_map, mor_map, components)
}

fn factorization_raw(cat: &FinCategory, fact: &[(MorId, MorId)]) -> JsonMap<String, serde_json::Value> {
    let mut map = JsonMap::new();
    for m in cat.morphisms() {
        let (a, b) = fact[m.0 as usize];
        map.insert(
            cat.mor_name(m).to_string(),
            serde_json::json!({
                "first": cat.mor_name(a),
                "second": cat.mor_name(b),
            }),
        );
    }
    map
}

/// Serializes an instance in canonical form (object order, morphism order,
/// composition sorted by (g, f)), with a trailing newline.
pub fn serialize_instance(inst: &InstanceData) -> String {
    let cat = &inst.cat;
    let mut identities = JsonMap::new();
    for x in cat.objects() {
        identities.insert(
            cat.obj_name(x).to_string(),
            cat.mor_name(cat.identity(x)).to_string().into(),
        );
    }
    let mut composition = Vec::new();
    for g in cat.morphisms() {
        for f in cat.morphisms() {
            if let Some(gf) = cat.try_comp(g, f) {
                composition.push(RawComposition {
                    g: cat.mor_name(g).to_string(),
                    f: cat.mor_name(f).to_string(),
                    gf: cat.mor_name(gf).to_string(),
                });
            }
        }
    }
    let classes = if let Some(model) = &inst.model {
        Some(RawClasses {
            w: Some(class_names(cat, &model.w)),
            cof: Some(class_names(cat, &model.cof)),
            fib: Some(class_names(cat, &model.fib)),
        })
    } else {
        inst.w.as_ref().map(|w| RawClasses {
            w: Some(class_names(cat, w)),
            cof: None,
            fib: None,
        })
    };
    let raw = RawInstance {
        objects: cat.objects().map(|x| cat.obj_name(x).to_string()).collect(),
        morphisms: cat
            .morphisms()
            .map(|m| RawMorphism {
                id: cat.mor_name(m).to_string(),
                dom: cat.obj_name(cat.dom(m)).to_string(),
                cod: cat.obj_name(cat.cod(m)).to_string(),
            })
            .collect(),
        identities,
        composition,
        classes,
        initial: inst.model.as_ref().map(|m| cat.obj_name(m.initial).to_string()),
        terminal: inst.model.as_ref().map(|m| cat.obj_name(m.terminal).to_string()),
        fact_cof_trivfib: inst.model.as_ref().map(|m| factorization_raw(cat, &m.fact1)),
        fact_trivcof_fib: inst.model.as_ref().map(|m| factorization_raw(cat, &m.fact2)),
        q: inst.model.as_ref().and_then(|m| m.q.as_ref()).map(|q| {
            let (obj_map, mor_map, q_components) = replacement_raw(cat, q);
            RawQ { obj_map, mor_map, q_components }
        }),
        r: inst.model.as_ref().and_then(|m| m.r.as_ref()).map(|r| {
            let (obj_map, mor_map, r_components) = replacement_raw(cat, r);
            RawR { obj_map, mor_map, r_components }
        }),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("instances serialize");
    text.push('\n');
    text
}

/// A functor between two loaded instances, by name.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub obj_map: JsonMap<String, serde_json::Value>,
    pub mor_map: JsonMap<String, serde_json::Value>,
}

impl FunctorFile {
    pub fn parse(text: &str) -> Result<FunctorFile, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self, source: &CatRef, target: &CatRef) -> Result<Functor, LoadError> {
        let rs = Resolver { cat: source };
        let rt = Resolver { cat: target };
        let obj_map = rs.obj_total(&self.obj_map, "obj_map", |_, v| {
            rt.obj(&str_value(v, "obj_map")?)
        })?;
        let mor_map = rs.mor_total(&self.mor_map, "mor_map", |_, v| {
            rt.mor(&str_value(v, "mor_map")?)
        })?;
        Ok(Functor::new(source.clone(), target.clone(), obj_map, mor_map)?)
    }

    pub fn of(f: &Functor) -> FunctorFile {
        let (c, d) = (f.source(), f.target());
        let mut obj_map = JsonMap::new();
        for x in c.objects() {
            obj_map.insert(
                c.obj_name(x).to_string(),
                d.obj_name(f.on_obj(x)).to_string().into(),
            );
        }
        let mut mor_map = JsonMap::new();
        for m in c.morphisms() {
            mor_map.insert(
                c.mor_name(m).to_string(),
                d.mor_name(f.on_mor(m)).to_string().into(),
            );
        }
        FunctorFile { obj_map, mor_map }
    }
}
