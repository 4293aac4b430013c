//! OEIS b-files: parsing, an on-disk cache, and offline fixtures.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use thiserror::Error;

use crate::holorec::SequenceTerms;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "EGFREC_CACHE_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("A025163", include_str!("../fixtures/b025163.txt")),
    ("A025166", include_str!("../fixtures/b025166.txt")),
];

#[derive(Debug, PartialEq, Eq, Error)]
pub enum BFileError {
    #[error("line {line}: expected '<index> <value>', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("line {line}: index {found} breaks the contiguous run (expected {expected})")]
    NonContiguous {
        line: usize,
        expected: i64,
        found: i64,
    },
    #[error("b-file contains no entries")]
    Empty,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("'{0}' is not an OEIS id (expected 'A' followed by 6 digits)")]
    InvalidId(String),
    #[error("network error fetching {url}: {message}")]
    Network {
        url: String,
        status: Option<u16>,
        message: String,
    },
    #[error("no fixture for {0}")]
    FixtureMissing(String),
    #[error("cache I/O on {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("b-file for {id}: {source}")]
    Parse {
        id: String,
        #[source]
        source: BFileError,
    },
}

/// Parses `index value` lines. `#` comments and blank lines are skipped;
/// the offset is the first index.
pub fn parse_bfile(text: &str) -> Result<SequenceTerms, BFileError> {
    let mut out: Option<SequenceTerms> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = || BFileError::Malformed {
            line: i + 1,
            text: raw.to_string(),
        };
        let mut fields = line.split_whitespace();
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed());
        };
        let index: i64 = index.parse().map_err(|_| malformed())?;
        let value: BigInt = value.parse().map_err(|_| malformed())?;
        let terms = out.get_or_insert_with(|| SequenceTerms::new(index, Vec::new()));
        let expected = terms.offset() + terms.len() as i64;
        if index != expected {
            return Err(BFileError::NonContiguous {
                line: i + 1,
                expected,
                found: index,
            });
        }
        terms.push(value);
    }
    out.ok_or(BFileError::Empty)
}

/// One `index value` line per term.
pub fn serialize_bfile(terms: &SequenceTerms) -> String {
    let mut out = String::new();
    for (n, v) in terms.iter() {
        out.push_str(&format!("{n} {v}\n"));
    }
    out
}

pub fn validate_id(id: &str) -> Result<(), FetchError> {
    let digits = id.strip_prefix('A').unwrap_or("");
    if digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_digit()) {
        Ok(())
    } else {
        Err(FetchError::InvalidId(id.to_string()))
    }
}

/// `b025166.txt` for `A025166`.
pub fn bfile_name(id: &str) -> String {
    format!("b{}.txt", &id[1..])
}

pub fn bfile_url(id: &str) -> String {
    format!("https://oeis.org/{id}/{}", bfile_name(id))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BFileSource {
    Network,
    Cache,
    Fixture,
}

impl fmt::Display for BFileSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BFileSource::Network => "network",
            BFileSource::Cache => "cache",
            BFileSource::Fixture => "fixture",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub sequence_id: String,
    pub entries: SequenceTerms,
    pub source: BFileSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FetchPolicy {
    CacheFirst,
    NetworkOnly,
    FixtureOnly,
}

/// Fetches raw b-file text over HTTP.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String, FetchError>;
}

/// HTTPS via `ureq`.
#[derive(Debug, Default)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, FetchError> {
        let network = |status, message: String| FetchError::Network {
            url: url.to_string(),
            status,
            message,
        };
        let mut response = ureq::get(url).call().map_err(|e| match e {
            ureq::Error::StatusCode(code) => network(Some(code), format!("HTTP status {code}")),
            other => network(None, other.to_string()),
        })?;
        response
            .body_mut()
            .with_config()
            .limit(256 * 1024 * 1024)
            .read_to_string()
            .map_err(|e| network(None, e.to_string()))
    }
}

/// Serves the last path segment of each URL from a local directory, as a
/// stand-in for a mirror of the OEIS data files.
#[derive(Clone, Debug)]
pub struct DirTransport(pub PathBuf);

impl Transport for DirTransport {
    fn get(&self, url: &str) -> Result<String, FetchError> {
        let name = url.rsplit('/').next().unwrap_or(url);
        fs::read_to_string(self.0.join(name)).map_err(|e| FetchError::Network {
            url: url.to_string(),
            status: (e.kind() == io::ErrorKind::NotFound).then_some(404),
            message: e.to_string(),
        })
    }
}

/// Refuses every request.
#[derive(Debug, Default)]
pub struct NoNetwork;

impl Transport for NoNetwork {
    fn get(&self, url: &str) -> Result<String, FetchError> {
        Err(FetchError::Network {
            url: url.to_string(),
            status: None,
            message: "network access is disabled".to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixtures {
    /// The snapshots compiled into this crate.
    Bundled,
    Dir(PathBuf),
}

impl Fixtures {
    fn read(&self, id: &str) -> Result<String, FetchError> {
        match self {
            Fixtures::Bundled => BUNDLED
                .iter()
                .find(|(k, _)| *k == id)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| FetchError::FixtureMissing(id.to_string())),
            Fixtures::Dir(dir) => {
                let path = dir.join(bfile_name(id));
                fs::read_to_string(&path).map_err(|e| match e.kind() {
                    io::ErrorKind::NotFound => FetchError::FixtureMissing(id.to_string()),
                    _ => FetchError::Cache { path, source: e },
                })
            }
        }
    }
}

/// `$EGFREC_CACHE_DIR`, else `$XDG_CACHE_HOME/egfrec`, else `~/.cache/egfrec`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("egfrec"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("egfrec"))
}

/// Where b-files come from: cache directory, fixtures, and network.
pub struct BFileStore {
    cache_dir: Option<PathBuf>,
    fixtures: Fixtures,
    transport: Box<dyn Transport>,
}

impl fmt::Debug for BFileStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BFileStore")
            .field("cache_dir", &self.cache_dir)
            .field("fixtures", &self.fixtures)
            .finish_non_exhaustive()
    }
}

impl BFileStore {
    pub fn new(
        cache_dir: Option<PathBuf>,
        fixtures: Fixtures,
        transport: Box<dyn Transport>,
    ) -> Self {
        BFileStore {
            cache_dir,
            fixtures,
            transport,
        }
    }

    /// Bundled fixtures only; no cache, no network.
    pub fn offline() -> Self {
        Self::new(None, Fixtures::Bundled, Box::new(NoNetwork))
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    pub fn cache_path(&self, id: &str) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(bfile_name(id)))
    }

    /// Raw payload and where it came from.
    pub fn fetch_raw(
        &self,
        id: &str,
        policy: FetchPolicy,
    ) -> Result<(String, BFileSource), FetchError> {
        validate_id(id)?;
        match policy {
            FetchPolicy::FixtureOnly => Ok((self.fixtures.read(id)?, BFileSource::Fixture)),
            FetchPolicy::CacheFirst => {
                if let Some(path) = self.cache_path(id) {
                    match fs::read_to_string(&path) {
                        Ok(text) => return Ok((text, BFileSource::Cache)),
                        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                        Err(source) => return Err(FetchError::Cache { path, source }),
                    }
                }
                self.download(id)
            }
            FetchPolicy::NetworkOnly => self.download(id),
        }
    }

    fn download(&self, id: &str) -> Result<(String, BFileSource), FetchError> {
        let text = self.transport.get(&bfile_url(id))?;
        // refuse to cache a payload that does not parse
        parse_bfile(&text).map_err(|source| FetchError::Parse {
            id: id.to_string(),
            source,
        })?;
        if let Some(path) = self.cache_path(id) {
            let write = || -> io::Result<()> {
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent)?;
                }
                fs::write(&path, &text)
            };
            write().map_err(|source| FetchError::Cache {
                path: path.clone(),
                source,
            })?;
        }
        Ok((text, BFileSource::Network))
    }

    pub fn fetch(&self, id: &str, policy: FetchPolicy) -> Result<BFile, FetchError> {
        let (text, source) = self.fetch_raw(id, policy)?;
        let entries = parse_bfile(&text).map_err(|source| FetchError::Parse {
            id: id.to_string(),
            source,
        })?;
        Ok(BFile {
            sequence_id: id.to_string(),
            entries,
            source,
        })
    }
}

pub fn fetch_bfile(
    store: &BFileStore,
    sequence_id: &str,
    policy: FetchPolicy,
) -> Result<BFile, FetchError> {
    store.fetch(sequence_id, policy)
}
