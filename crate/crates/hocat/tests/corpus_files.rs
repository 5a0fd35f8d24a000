//! The files under instances/ and battery/ are generated from the corpus
//! builders; these tests pin them byte-for-byte so the code stays the source
//! of truth. After changing a builder, run the ignored regeneration test:
//!
//!     cargo test -p hocat --test corpus_files -- --ignored

use std::fs;
use std::path::{Path, PathBuf};

use hocat::corpus::{shipped_battery, shipped_instances};
use hocat::fincat::{load_instance, serialize_instance, InstanceData};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("..").join("..")
}

fn check_dir(dir: &Path, built: &[InstanceData]) {
    for inst in built {
        let path = dir.join(format!("{}.json", inst.label));
        let on_disk = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; regenerate with --ignored", path.display()));
        assert_eq!(
            on_disk,
            serialize_instance(inst),
            "{} differs from its builder; regenerate with --ignored",
            path.display()
        );
        let reloaded = load_instance(&path).expect("shipped files load");
        assert_eq!(serialize_instance(&reloaded), on_disk, "round-trip of {}", path.display());
    }
    let mut files: Vec<String> = fs::read_dir(dir)
        .expect("shipped dir exists")
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    let mut expected: Vec<String> =
        built.iter().map(|i| format!("{}.json", i.label)).collect();
    expected.sort();
    assert_eq!(files, expected, "stray or missing files under {}", dir.display());
}

#[test]
fn instance_files_match_the_builders() {
    check_dir(&repo_root().join("instances"), &shipped_instances());
}

#[test]
fn battery_files_match_the_builders() {
    check_dir(&repo_root().join("battery"), &shipped_battery());
}

#[test]
#[ignore = "writes the shipped files from the builders"]
fn regenerate_shipped_files() {
    for (dir, built) in [
        ("instances", shipped_instances()),
        ("battery", shipped_battery()),
    ] {
        let dir = repo_root().join(dir);
        fs::create_dir_all(&dir).unwrap();
        for inst in &built {
            fs::write(dir.join(format!("{}.json", inst.label)), serialize_instance(inst))
                .unwrap();
        }
    }
}
