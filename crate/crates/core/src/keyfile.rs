//! Key files: binary (little-endian `u64` count, then 8-byte keys) or text
//! (one key per line).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::comparators::{FiniteF64, Key, NotSorted};
use crate::executor::LaneSource;

#[derive(Debug, Error)]
pub enum KeyFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: malformed key {text:?}")]
    Malformed { line: usize, text: String },
    #[error("key {index}: not a finite number")]
    NonFinite { index: usize },
    #[error("header announces {expected} keys but the file holds {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("lane is not sorted: {0}")]
    NotSorted(NotSorted),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyFormat {
    Binary,
    Text,
}

impl KeyFormat {
    /// `.bin` files are binary, everything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => KeyFormat::Binary,
            _ => KeyFormat::Text,
        }
    }
}

/// A key type with a fixed 8-byte little-endian encoding and a text form.
pub trait FileKey: Key + FromStr + std::fmt::Display {
    fn to_le_bytes(&self) -> [u8; 8];
    fn from_le_bytes(bytes: [u8; 8]) -> Option<Self>;
}

impl FileKey for i64 {
    fn to_le_bytes(&self) -> [u8; 8] {
        i64::to_le_bytes(*self)
    }

    fn from_le_bytes(bytes: [u8; 8]) -> Option<Self> {
        Some(i64::from_le_bytes(bytes))
    }
}

impl FileKey for FiniteF64 {
    fn to_le_bytes(&self) -> [u8; 8] {
        self.get().to_le_bytes()
    }

    fn from_le_bytes(bytes: [u8; 8]) -> Option<Self> {
        FiniteF64::new(f64::from_le_bytes(bytes)).ok()
    }
}

pub fn read_keys_from<K: FileKey, R: Read>(reader: R, format: KeyFormat) -> Result<Vec<K>, KeyFileError> {
    let mut reader = BufReader::new(reader);
    match format {
        KeyFormat::Binary => {
            let mut header = [0u8; 8];
            let mut filled = 0;
            while filled < 8 {
                match reader.read(&mut header[filled..])? {
                    0 => break,
                    n => filled += n,
                }
            }
            // A zero-length file is an empty key file.
            match filled {
                0 => return Ok(Vec::new()),
                8 => {}
                _ => return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "short key file header").into()),
            }
            let expected = u64::from_le_bytes(header);
            let mut keys = Vec::with_capacity(expected.min(1 << 24) as usize);
            let mut buf = [0u8; 8];
            for index in 0..expected {
                match reader.read_exact(&mut buf) {
                    Ok(()) => {}
                    Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
                        return Err(KeyFileError::Truncated { expected, found: index })
                    }
                    Err(e) => return Err(e.into()),
                }
                keys.push(K::from_le_bytes(buf).ok_or(KeyFileError::NonFinite { index: index as usize })?);
            }
            Ok(keys)
        }
        KeyFormat::Text => {
            let mut keys = Vec::new();
            for (no, line) in reader.lines().enumerate() {
                let line = line?;
                let text = line.trim();
                if text.is_empty() {
                    continue;
                }
                let key = text.parse::<K>().map_err(|_| KeyFileError::Malformed {
                    line: no + 1,
                    text: text.to_string(),
                })?;
                keys.push(key);
            }
            Ok(keys)
        }
    }
}

pub fn write_keys_to<K: FileKey, W: Write>(writer: W, format: KeyFormat, keys: &[K]) -> Result<(), KeyFileError> {
    let mut writer = BufWriter::new(writer);
    match format {
        KeyFormat::Binary => {
            writer.write_all(&(keys.len() as u64).to_le_bytes())?;
            for k in keys {
                writer.write_all(&k.to_le_bytes())?;
            }
        }
        KeyFormat::Text => {
            for k in keys {
                writeln!(writer, "{k}")?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn read_keys<K: FileKey>(path: &Path, format: KeyFormat) -> Result<Vec<K>, KeyFileError> {
    read_keys_from(File::open(path)?, format)
}

pub fn write_keys<K: FileKey>(path: &Path, format: KeyFormat, keys: &[K]) -> Result<(), KeyFileError> {
    write_keys_to(File::create(path)?, format, keys)
}

/// A lane backed by a key file.
#[derive(Clone, Debug)]
pub struct KeyFile<K> {
    pub path: PathBuf,
    pub format: KeyFormat,
    _key: PhantomData<fn() -> K>,
}

impl<K> KeyFile<K> {
    pub fn new(path: impl Into<PathBuf>, format: KeyFormat) -> Self {
        KeyFile {
            path: path.into(),
            format,
            _key: PhantomData,
        }
    }
}

impl<K: FileKey> LaneSource<K> for KeyFile<K> {
    fn load(self: Box<Self>) -> Result<Vec<K>, KeyFileError> {
        read_keys(&self.path, self.format)
    }
}
