//! On-disk cache of `P_n` and `F_n`, one JSON file per polynomial.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use modunits::bivar_poly::BivarPoly;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyKind {
    P,
    F,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CacheEntry {
    pub kind: PolyKind,
    pub n: i64,
    pub polynomial: BivarPoly,
    pub tool_version: String,
    pub content_hash: String,
}

fn content_hash(kind: PolyKind, n: i64, poly_json: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("{kind:?}").as_bytes());
    h.update([0]);
    h.update(n.to_string().as_bytes());
    h.update([0]);
    h.update(poly_json.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl CacheEntry {
    pub fn new(kind: PolyKind, n: i64, polynomial: BivarPoly) -> Self {
        let json = serde_json::to_string(&polynomial).expect("polynomials serialize");
        CacheEntry {
            kind,
            n,
            content_hash: content_hash(kind, n, &json),
            polynomial,
            tool_version: TOOL_VERSION.into(),
        }
    }

    /// Current version and an intact hash.
    pub fn is_valid(&self) -> bool {
        let json = serde_json::to_string(&self.polynomial).expect("polynomials serialize");
        self.tool_version == TOOL_VERSION
            && self.content_hash == content_hash(self.kind, self.n, &json)
    }
}

pub struct PolyCache {
    dir: PathBuf,
}

impl PolyCache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(PolyCache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, kind: PolyKind, n: i64) -> PathBuf {
        let sign = if n < 0 { "m" } else { "" };
        self.dir
            .join(format!("{kind:?}_{sign}{:06}.json", n.unsigned_abs()))
    }

    /// A valid entry, or `None` for missing, unreadable or stale files.
    pub fn get(&self, kind: PolyKind, n: i64) -> Option<BivarPoly> {
        let text = fs::read_to_string(self.path(kind, n)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.is_valid() && entry.kind == kind && entry.n == n).then_some(entry.polynomial)
    }

    /// Writes through a temporary file and renames it into place.
    pub fn put(&self, kind: PolyKind, n: i64, poly: &BivarPoly) -> std::io::Result<()> {
        let entry = CacheEntry::new(kind, n, poly.clone());
        let target = self.path(kind, n);
        let tmp = self.dir.join(format!(
            ".{}.{}.tmp",
            target.file_name().unwrap().to_string_lossy(),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer_pretty(&mut f, &entry)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)
    }
}
