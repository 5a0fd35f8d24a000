//! Batteries of finite test categories.
//!
//! Universal properties quantify over "every category D"; the engine checks
//! them against a finite battery instead and stamps verdicts with the
//! battery id, a digest of the canonical serialization of every member.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus;
use crate::fincat::{serialize_instance, CatRef, InstanceData, LoadError};

/// Environment variable naming a directory of instance files to use as the
/// battery instead of the shipped one.
pub const BATTERY_DIR_VAR: &str = "HOCAT_BATTERY_DIR";

#[derive(Debug, Clone)]
pub struct Battery {
    pub id: String,
    pub members: Vec<CatRef>,
}

fn digest(members: &[CatRef]) -> String {
    let mut h = Sha256::new();
    for cat in members {
        let inst = InstanceData {
            label: cat.label().to_string(),
            cat: cat.clone(),
            w: None,
            model: None,
        };
        h.update(serialize_instance(&inst).as_bytes());
    }
    let out = h.finalize();
    out.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Battery {
    pub fn from_members(members: Vec<CatRef>) -> Battery {
        Battery { id: digest(&members), members }
    }

    /// The categories bundled with the engine, in file order.
    pub fn shipped() -> Battery {
        Battery::from_members(corpus::shipped_battery().into_iter().map(|i| i.cat).collect())
    }

    /// All instance files in `dir`, sorted by filename.
    pub fn load_dir(dir: &Path) -> Result<Battery, LoadError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| LoadError::Io { path: dir.display().to_string(), err: e })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
            .collect();
        paths.sort();
        let mut members = Vec::new();
        for p in &paths {
            members.push(crate::fincat::load_instance(p)?.cat);
        }
        Ok(Battery::from_members(members))
    }

    /// The battery named by the environment, falling back to the shipped
    /// one.
    pub fn default_battery() -> Result<Battery, LoadError> {
        match std::env::var_os(BATTERY_DIR_VAR) {
            Some(dir) => Battery::load_dir(Path::new(&dir)),
            None => Ok(Battery::shipped()),
        }
    }

    /// This battery extended by `extra` members (deduplicated by identity),
    /// with the id recomputed. Used to add a witness's base and target.
    pub fn with_extra(&self, extra: &[&CatRef]) -> Battery {
        let mut members = self.members.clone();
        for cat in extra {
            if !members.iter().any(|m| m.tag() == cat.tag()) {
                members.push((*cat).clone());
            }
        }
        Battery::from_members(members)
    }
}
