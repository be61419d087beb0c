//! One JSON file per `(f, g, h, σ_K, σ_Ψrec)`.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "checksum": "<sha256 hex of the canonical JSON of `corr`>",
//!   "corr": { "g": 1, "h": 1, "f": 1,
//!             "conventions": { "sign_kernel": 1, "sign_psirec": 1 },
//!             "terms": [ { "n": [0], "c": "1/8" }, { "n": [1], "c": "-1/12" } ] }
//! }
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::corrdiff::{CorrDiff, CorrDiffJson};
use crate::conventions::{Conventions, Sign};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    checksum: String,
    corr: CorrDiffJson,
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn checksum<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn sign_tag(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "p",
        Sign::Minus => "m",
    }
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, f: i64, g: u32, h: u32, conv: Conventions) -> PathBuf {
        self.dir.join(format!(
            "w_f{f}_g{g}_h{h}_k{}_r{}.json",
            sign_tag(conv.sign_kernel),
            sign_tag(conv.sign_psirec)
        ))
    }

    /// `Ok(None)` when absent; `Err` when present but unreadable, of another
    /// format version, or failing its checksum.
    pub fn load(&self, f: i64, g: u32, h: u32, conv: Conventions) -> Result<Option<CorrDiff>> {
        let path = self.path(f, g, h, conv);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        let file: CacheFile = serde_json::from_str(&text)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Cache(format!(
                "{}: format version {} (expected {FORMAT_VERSION})",
                path.display(),
                file.format_version
            )));
        }
        if file.checksum != checksum(&file.corr) {
            return Err(Error::Cache(format!(
                "{}: checksum mismatch",
                path.display()
            )));
        }
        if (file.corr.f, file.corr.g, file.corr.h, file.corr.conventions) != (f, g, h, conv) {
            return Err(Error::Cache(format!(
                "{}: header does not match its name",
                path.display()
            )));
        }
        CorrDiff::from_json(&file.corr).map(Some)
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial file.
    pub fn store(&self, w: &CorrDiff, conv: Conventions) -> Result<()> {
        let corr = w.to_json(conv);
        let file = CacheFile {
            format_version: FORMAT_VERSION,
            checksum: checksum(&corr),
            corr,
        };
        let path = self.path(w.f, w.g, w.h, conv);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut out = fs::File::create(&tmp).map_err(io)?;
        let mut text = serde_json::to_string_pretty(&file).expect("serializable");
        text.push('\n');
        out.write_all(text.as_bytes()).map_err(io)?;
        out.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }
}
