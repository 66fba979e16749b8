//! `HANCKPT1` checkpoint files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic      8 bytes  "HANCKPT1"
//! version    u32
//! config     u32 length + UTF-8 run config text
//! count      u32
//! entries    count x { u32 name length, name, u8 dtype, u8 rank, rank x u64 extent, values }
//! checksum   u32 CRC-32 of every preceding byte
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use han_core::{DType, ParamSet, Tensor};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"HANCKPT1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl Values {
    pub fn dtype(&self) -> DType {
        match self {
            Values::F32(_) => DType::F32,
            Values::F64(_) => DType::F64,
        }
    }

    fn len(&self) -> usize {
        match self {
            Values::F32(v) => v.len(),
            Values::F64(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Values,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config_text: String,
    pub entries: Vec<Entry>,
}

fn corrupt(detail: impl Into<String>) -> CliError {
    CliError::Io(format!("corrupt checkpoint: {}", detail.into()))
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("string is not UTF-8"))
    }
}

impl Checkpoint {
    pub fn from_params(config_text: String, params: &ParamSet<f32>) -> Self {
        let entries = params
            .iter()
            .map(|(name, t)| Entry { name: name.to_string(), shape: t.shape().to_vec(), values: Values::F32(t.data().to_vec()) })
            .collect();
        Checkpoint { config_text, entries }
    }

    /// Rebuild the parameter set; `f64` entries are narrowed to `f32`.
    pub fn to_params(&self) -> Result<ParamSet<f32>> {
        let mut set = ParamSet::new();
        for e in &self.entries {
            let data = match &e.values {
                Values::F32(v) => v.clone(),
                Values::F64(v) => v.iter().map(|&x| x as f32).collect(),
            };
            let t = Tensor::from_vec(&e.shape, data).map_err(|err| corrupt(format!("{}: {err}", e.name)))?;
            set.push(e.name.clone(), t).map_err(|err| corrupt(err.to_string()))?;
        }
        Ok(set)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.config_text.len() as u32).to_le_bytes());
        out.extend_from_slice(self.config_text.as_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&(e.name.len() as u32).to_le_bytes());
            out.extend_from_slice(e.name.as_bytes());
            out.push(e.values.dtype().code());
            out.push(e.shape.len() as u8);
            for &d in &e.shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            match &e.values {
                Values::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
                Values::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 8 || &bytes[..8] != MAGIC {
            return Err(corrupt("missing HANCKPT1 magic"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != stored {
            return Err(corrupt("checksum mismatch"));
        }
        let mut c = Cursor { buf: body, pos: MAGIC.len() };
        let version = c.u32()?;
        if version != VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        let config_text = c.string()?;
        let count = c.u32()?;
        let mut entries = Vec::new();
        for _ in 0..count {
            let name = c.string()?;
            let dtype = DType::from_code(c.u8()?).ok_or_else(|| corrupt(format!("{name}: unknown dtype")))?;
            let rank = c.u8()? as usize;
            let shape = (0..rank).map(|_| Ok(c.u64()? as usize)).collect::<Result<Vec<_>>>()?;
            let n = shape.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| corrupt("extent overflow"))?;
            let raw = c.take(n.checked_mul(dtype.size_bytes()).ok_or_else(|| corrupt("extent overflow"))?)?;
            let values = match dtype {
                DType::F32 => Values::F32(raw.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect()),
                DType::F64 => Values::F64(raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect()),
            };
            debug_assert_eq!(values.len(), n);
            entries.push(Entry { name, shape, values });
        }
        if c.pos != body.len() {
            return Err(corrupt("trailing bytes before checksum"));
        }
        Ok(Checkpoint { config_text, entries })
    }

    /// Write to a sibling temporary file, then rename over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io)?;
        }
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&self.to_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        drop(f);
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
