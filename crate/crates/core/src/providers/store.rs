//! Append-only binary embedding store.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! header:  b"VWSE" | version: u16 | dim: u32
//! record:  key_len: u16 | key bytes (UTF-8) | modality: u8 (0 text, 1 image)
//!          | model_len: u16 | model id bytes (UTF-8) | dim x f32
//! ```
//!
//! Every record in a file has the header's dim. Keys are unique per
//! (model id, modality, key); the first value written for a key is the one
//! that stays.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::providers::vector::{EmbeddingVector, Modality};

pub const MAGIC: &[u8; 4] = b"VWSE";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoreKey {
    pub model_id: String,
    pub modality: Modality,
    pub key: String,
}

impl StoreKey {
    pub fn new(model_id: &str, modality: Modality, key: &str) -> Self {
        StoreKey {
            model_id: model_id.to_string(),
            modality,
            key: key.to_string(),
        }
    }

    fn of(v: &EmbeddingVector) -> Self {
        StoreKey::new(&v.model_id, v.modality, &v.key)
    }
}

#[derive(Debug)]
pub struct EmbeddingStore {
    path: Option<PathBuf>,
    dim: Option<usize>,
    records: Vec<EmbeddingVector>,
    index: HashMap<StoreKey, usize>,
    writer: Option<BufWriter<File>>,
}

impl EmbeddingStore {
    pub fn in_memory() -> Self {
        EmbeddingStore {
            path: None,
            dim: None,
            records: Vec::new(),
            index: HashMap::new(),
            writer: None,
        }
    }

    /// Opens (or prepares to create) a store file. A missing or zero-length
    /// file is an empty store whose dim is fixed by the first insert.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut store = EmbeddingStore::in_memory();
        if path.exists() {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            if !bytes.is_empty() {
                let (dim, records) = decode(&bytes)
                    .map_err(|e| Error::Integrity(format!("{}: {e}", path.display())))?;
                store.dim = Some(dim);
                for r in records {
                    store.push_indexed(r)?;
                }
            }
        }
        store.path = Some(path);
        Ok(store)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (dim, records) = decode(bytes)?;
        let mut store = EmbeddingStore::in_memory();
        store.dim = Some(dim);
        for r in records {
            store.push_indexed(r)?;
        }
        Ok(store)
    }

    fn push_indexed(&mut self, v: EmbeddingVector) -> Result<()> {
        let key = StoreKey::of(&v);
        if self.index.contains_key(&key) {
            return Err(Error::Integrity(format!(
                "duplicate store key {}/{}/{:?}",
                key.model_id, key.modality, key.key
            )));
        }
        self.index.insert(key, self.records.len());
        self.records.push(v);
        Ok(())
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EmbeddingVector] {
        &self.records
    }

    pub fn get(&self, model_id: &str, modality: Modality, key: &str) -> Option<&EmbeddingVector> {
        self.index
            .get(&StoreKey::new(model_id, modality, key))
            .map(|&i| &self.records[i])
    }

    pub fn contains(&self, model_id: &str, modality: Modality, key: &str) -> bool {
        self.index.contains_key(&StoreKey::new(model_id, modality, key))
    }

    /// Inserts a vector, appending it to the backing file when there is one.
    /// Returns `false` (and keeps the existing value) if the key is present.
    pub fn insert(&mut self, v: EmbeddingVector) -> Result<bool> {
        v.validate()?;
        if self.contains(&v.model_id, v.modality, &v.key) {
            return Ok(false);
        }
        match self.dim {
            Some(d) if d != v.dim() => {
                return Err(Error::Integrity(format!(
                    "vector {:?} has dim {} but store dim is {d}",
                    v.key,
                    v.dim()
                )))
            }
            _ => {}
        }
        let record = encode_record(&v)?;
        if let Some(path) = self.path.clone() {
            if self.writer.is_none() {
                let fresh = fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
                let file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .map_err(|e| Error::io(&path, e))?;
                let mut w = BufWriter::new(file);
                if fresh {
                    w.write_all(&encode_header(v.dim())?).map_err(|e| Error::io(&path, e))?;
                }
                self.writer = Some(w);
            }
            let w = self.writer.as_mut().expect("writer opened above");
            w.write_all(&record).map_err(|e| Error::io(&path, e))?;
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        self.dim.get_or_insert(v.dim());
        self.push_indexed(v)?;
        Ok(true)
    }

    /// Full serialized image of the store.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let dim = self
            .dim
            .ok_or_else(|| Error::Validation("cannot encode a store with no dim".into()))?;
        let mut out = encode_header(dim)?;
        for r in &self.records {
            out.extend_from_slice(&encode_record(r)?);
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }
}

fn encode_header(dim: usize) -> Result<Vec<u8>> {
    let dim = u32::try_from(dim).map_err(|_| Error::Validation(format!("dim {dim} too large")))?;
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    Ok(out)
}

fn encode_record(v: &EmbeddingVector) -> Result<Vec<u8>> {
    let key_len = u16::try_from(v.key.len())
        .map_err(|_| Error::Validation(format!("store key of {} bytes exceeds u16", v.key.len())))?;
    let model_len = u16::try_from(v.model_id.len())
        .map_err(|_| Error::Validation("model id exceeds u16 length".into()))?;
    let mut out = Vec::with_capacity(5 + v.key.len() + v.model_id.len() + 4 * v.dim());
    out.extend_from_slice(&key_len.to_le_bytes());
    out.extend_from_slice(v.key.as_bytes());
    out.push(v.modality.to_byte());
    out.extend_from_slice(&model_len.to_le_bytes());
    out.extend_from_slice(v.model_id.as_bytes());
    for x in &v.values {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::Integrity(format!("truncated {what} at byte offset {}", self.pos))
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn string(&mut self, n: usize, what: &str) -> Result<String> {
        let offset = self.pos;
        let b = self.take(n, what)?;
        String::from_utf8(b.to_vec())
            .map_err(|_| Error::Integrity(format!("{what} at offset {offset} is not UTF-8")))
    }
}

/// Decodes a complete store image into its dim and records (in file order).
/// Duplicate keys are not checked here.
pub fn decode(bytes: &[u8]) -> Result<(usize, Vec<EmbeddingVector>)> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "magic")? != MAGIC {
        return Err(Error::Integrity("bad magic; not a VWSE store".into()));
    }
    let version = cur.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Integrity(format!("unsupported store version {version}")));
    }
    let d = cur.take(4, "dim")?;
    let dim = u32::from_le_bytes([d[0], d[1], d[2], d[3]]) as usize;
    if dim == 0 {
        return Err(Error::Integrity("store dim is 0".into()));
    }
    let mut records = Vec::new();
    while cur.pos < bytes.len() {
        let record_start = cur.pos;
        let key_len = cur.u16("key length")? as usize;
        let key = cur.string(key_len, "key")?;
        let m = cur.take(1, "modality")?[0];
        let modality = Modality::from_byte(m).ok_or_else(|| {
            Error::Integrity(format!("bad modality byte {m} in record at offset {record_start}"))
        })?;
        let model_len = cur.u16("model id length")? as usize;
        let model_id = cur.string(model_len, "model id")?;
        let raw = cur.take(
            dim.checked_mul(4).ok_or_else(|| Error::Integrity("dim overflow".into()))?,
            "vector",
        )?;
        let values: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Integrity(format!(
                "non-finite value in record at offset {record_start}"
            )));
        }
        records.push(EmbeddingVector {
            model_id,
            modality,
            key,
            values,
        });
    }
    Ok((dim, records))
}
