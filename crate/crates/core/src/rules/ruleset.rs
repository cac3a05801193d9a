use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{parse_rules, serialize_rule, Rule, RuleError};

#[derive(Debug, Error)]
pub enum RuleSetError {
    #[error("duplicate rule name {0:?}")]
    DuplicateName(String),
    #[error("{file}: {source}")]
    Parse { file: String, source: RuleError },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("checksum mismatch for {file}")]
    Checksum { file: String },
    #[error("{0} does not contain any rules")]
    Empty(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    /// Hex SHA-256 of the file contents.
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub rules: Vec<ManifestEntry>,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

/// Ordered rules with unique names plus free-form metadata (source,
/// generation parameters).
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    metadata: serde_json::Value,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, metadata: serde_json::Value) -> Result<Self, RuleSetError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name()) {
                return Err(RuleSetError::DuplicateName(r.name().to_string()));
            }
        }
        Ok(Self { rules, metadata })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    pub fn metadata(&self) -> &serde_json::Value {
        &self.metadata
    }

    /// All rules in one `---`-separated document.
    pub fn to_text(&self) -> String {
        self.rules.iter().map(serialize_rule).collect::<Vec<_>>().join("---\n")
    }

    pub fn from_text(text: &str) -> Result<Self, RuleSetError> {
        let rules = parse_rules(text).map_err(|source| RuleSetError::Parse { file: "<text>".into(), source })?;
        Self::new(rules, serde_json::Value::Null)
    }

    /// Writes `<name>.rq` per rule and `manifest.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<Manifest, RuleSetError> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let file = format!("{}.rq", r.name());
            let text = serialize_rule(r);
            fs::write(dir.join(&file), &text)?;
            entries.push(ManifestEntry { name: r.name().to_string(), file, checksum: sha256_hex(text.as_bytes()) });
        }
        let manifest = Manifest { rules: entries, metadata: self.metadata.clone() };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| RuleSetError::Manifest(e.to_string()))?;
        fs::write(dir.join("manifest.json"), json + "\n")?;
        Ok(manifest)
    }

    /// Reads a rule file, or a directory. A directory with `manifest.json`
    /// loads exactly the listed files after verifying checksums; otherwise
    /// every `*.rq` file is loaded in file-name order.
    pub fn read_path(path: &Path) -> Result<Self, RuleSetError> {
        if path.is_dir() {
            return Self::read_dir(path);
        }
        let rules = Self::read_file(path)?;
        if rules.is_empty() {
            return Err(RuleSetError::Empty(path.display().to_string()));
        }
        Self::new(rules, serde_json::Value::Null)
    }

    fn read_file(path: &Path) -> Result<Vec<Rule>, RuleSetError> {
        let text = fs::read_to_string(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("rule").to_string();
        let file = path.display().to_string();
        let mut rules = parse_rules(&text).map_err(|source| RuleSetError::Parse { file: file.clone(), source })?;
        // A single unnamed rule takes its file's name.
        if rules.len() == 1 && rules[0].name() == "rule_1" && !text.contains("rule: rule_1") {
            rules[0] = rules[0].renamed(stem).map_err(|source| RuleSetError::Parse { file, source })?;
        }
        Ok(rules)
    }

    fn read_dir(dir: &Path) -> Result<Self, RuleSetError> {
        let manifest_path = dir.join("manifest.json");
        if manifest_path.exists() {
            let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)
                .map_err(|e| RuleSetError::Manifest(e.to_string()))?;
            let mut rules = Vec::with_capacity(manifest.rules.len());
            for entry in &manifest.rules {
                let path = dir.join(&entry.file);
                let bytes = fs::read(&path)?;
                if sha256_hex(&bytes) != entry.checksum {
                    return Err(RuleSetError::Checksum { file: entry.file.clone() });
                }
                let found = Self::read_file(&path)?;
                match found.as_slice() {
                    [r] if r.name() == entry.name => rules.push(r.clone()),
                    _ => return Err(RuleSetError::Manifest(format!("{} should hold exactly rule {:?}", entry.file, entry.name))),
                }
            }
            return Self::new(rules, manifest.metadata);
        }
        let mut files: Vec<_> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "rq"))
            .collect();
        files.sort();
        let mut rules = Vec::new();
        for f in files {
            rules.extend(Self::read_file(&f)?);
        }
        if rules.is_empty() {
            return Err(RuleSetError::Empty(dir.display().to_string()));
        }
        Self::new(rules, serde_json::Value::Null)
    }
}
