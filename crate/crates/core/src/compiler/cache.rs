//! JSON cache of compiled ansatz parameters keyed by a target hash.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheEntry {
    pub target_hash: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub params: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileCache {
    pub entries: Vec<CacheEntry>,
}

/// sha256 over the little-endian bytes of the input and target amplitudes.
pub fn target_hash(target: &[Complex64], input: &[Complex64]) -> String {
    let mut h = Sha256::new();
    for v in [input, target] {
        h.update((v.len() as u64).to_le_bytes());
        for z in v {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl CompileCache {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Io(format!("bad cache file: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn get(&self, hash: &str, depth: usize) -> Option<&CacheEntry> {
        self.entries
            .iter()
            .find(|e| e.target_hash == hash && e.depth == depth)
    }

    /// Inserts or replaces when the new loss is lower.
    pub fn insert(&mut self, entry: CacheEntry) {
        match self
            .entries
            .iter_mut()
            .find(|e| e.target_hash == entry.target_hash && e.depth == entry.depth)
        {
            Some(old) if old.loss <= entry.loss => {}
            Some(old) => *old = entry,
            None => self.entries.push(entry),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_replace() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let t = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let hash = target_hash(&t, &t);
        assert_eq!(hash.len(), 64);
        let mut c = CompileCache::load(&path).unwrap();
        c.insert(CacheEntry { target_hash: hash.clone(), n_qubits: 1, depth: 2, params: vec![0.1], loss: 1e-3 });
        c.insert(CacheEntry { target_hash: hash.clone(), n_qubits: 1, depth: 2, params: vec![0.2], loss: 1e-7 });
        c.insert(CacheEntry { target_hash: hash.clone(), n_qubits: 1, depth: 2, params: vec![0.3], loss: 1e-5 });
        c.save(&path).unwrap();
        let back = CompileCache::load(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.get(&hash, 2).unwrap().params, vec![0.2]);
        assert!(back.get(&hash, 3).is_none());
        let other = target_hash(&t, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_ne!(other, hash);
    }
}
