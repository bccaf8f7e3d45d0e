//! Memo and content-addressed disk store for `F_q(T, X)`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{compute_siegel_series_polynomial, LocalPolynomial};
use crate::error::{Error, Result};
use crate::quadform::HalfIntegralForm;

/// On-disk payload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub q: u64,
    pub coeffs: Vec<i64>,
    #[serde(rename = "D")]
    pub d: i64,
    pub ord: u32,
}

impl CacheRecord {
    pub fn from_polynomial(f: &LocalPolynomial) -> Self {
        let mut ord = 0;
        let mut d = f.subject_d;
        while d != 0 && d % f.q as i64 == 0 {
            d /= f.q as i64;
            ord += 1;
        }
        CacheRecord { q: f.q, coeffs: f.coeffs.clone(), d: f.subject_d, ord }
    }
}

#[derive(Default)]
pub struct FqCache {
    dir: RwLock<Option<PathBuf>>,
    memo: Mutex<HashMap<(HalfIntegralForm, u64), LocalPolynomial>>,
}

impl FqCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        FqCache { dir: RwLock::new(dir), memo: Mutex::new(HashMap::new()) }
    }

    pub fn global() -> &'static FqCache {
        static GLOBAL: OnceLock<FqCache> = OnceLock::new();
        GLOBAL.get_or_init(FqCache::default)
    }

    pub fn set_dir(&self, dir: Option<PathBuf>) -> Result<()> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        *self.dir.write() = dir;
        Ok(())
    }

    pub fn dir(&self) -> Option<PathBuf> {
        self.dir.read().clone()
    }

    /// Hex sha256 of `n`, the doubled entries and `q`.
    pub fn key(t: &HalfIntegralForm, q: u64) -> String {
        let mut h = Sha256::new();
        h.update(format!("n={};G={:?};q={}", t.degree(), t.doubled(), q).as_bytes());
        hex::encode(h.finalize())
    }

    fn path_for(dir: &Path, t: &HalfIntegralForm, q: u64) -> PathBuf {
        dir.join(format!("{}.json", Self::key(t, q)))
    }

    fn load(&self, t: &HalfIntegralForm, q: u64) -> Result<Option<LocalPolynomial>> {
        let Some(dir) = self.dir() else { return Ok(None) };
        let path = Self::path_for(&dir, t, q);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let rec: CacheRecord = serde_json::from_slice(&bytes)?;
        if rec.q != q || rec.coeffs.first() != Some(&1) {
            return Err(Error::Consistency(format!("corrupt cache record {}", path.display())));
        }
        Ok(Some(LocalPolynomial {
            q,
            coeffs: rec.coeffs,
            subject_rank: t.degree(),
            subject_d: rec.d,
        }))
    }

    fn store(&self, t: &HalfIntegralForm, f: &LocalPolynomial) -> Result<()> {
        let Some(dir) = self.dir() else { return Ok(()) };
        let path = Self::path_for(&dir, t, f.q);
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        serde_json::to_writer(&mut tmp, &CacheRecord::from_polynomial(f))?;
        tmp.flush()?;
        // rename is atomic; a concurrent writer of the same key writes the same bytes
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    pub fn get_or_compute(&self, t: &HalfIntegralForm, q: u64) -> Result<LocalPolynomial> {
        let key = (t.clone(), q);
        if let Some(f) = self.memo.lock().get(&key) {
            return Ok(f.clone());
        }
        let f = match self.load(t, q)? {
            Some(f) => f,
            None => {
                let f = compute_siegel_series_polynomial(t, q)?;
                self.store(t, &f)?;
                f
            }
        };
        self.memo.lock().insert(key, f.clone());
        Ok(f)
    }

    pub fn clear_memory(&self) {
        self.memo.lock().clear();
    }
}
