use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use symdyn::Error;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    Schema {
        path: PathBuf,
        source: serde_json::Error,
    },
    Usage(String),
}

impl CliError {
    /// Exit status: 1 for broken internal invariants, 2 for everything the
    /// caller can fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_invariant_violation() => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse { path, source } => {
                write!(f, "parse error in {}: {source}", path.display())
            }
            CliError::Schema { path, source } => {
                write!(f, "schema error in {}: {source}", path.display())
            }
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Raw bytes of an input file with their digest.
pub struct Input {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Input {
            path: path.to_path_buf(),
            bytes,
        })
    }

    pub fn digest(&self) -> InputDigest {
        let hash = Sha256::digest(&self.bytes);
        InputDigest {
            path: self.path.display().to_string(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    pub fn parse<T: serde::de::DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_slice(&self.bytes).map_err(|source| {
            let path = self.path.clone();
            if source.is_data() {
                CliError::Schema { path, source }
            } else {
                CliError::Parse { path, source }
            }
        })
    }
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub parameters: Value,
    pub result: Value,
}

impl<'a> Envelope<'a> {
    pub fn new(command: &'a str, inputs: &[&Input], parameters: Value) -> Self {
        Envelope {
            tool: "symdyn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: inputs.iter().map(|i| i.digest()).collect(),
            seed: None,
            parameters,
            result: Value::Null,
        }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline, to `out` or standard output.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
