//! Design tables, factors and the partitions of units they induce.
//!
//! Every cell of a [`DesignTable`] is recoded at load time to a dense index
//! into its factor's level list (first-appearance order). Everything
//! downstream works on [`Partition`]s, so level labels never take part in
//! the algebra.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::Diagnostic;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("design has no header row")]
    MissingHeader,
    #[error("design has no rows")]
    EmptyBody,
    #[error("column {index} has an empty name")]
    EmptyColumnName { index: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("row {line} has {found} fields, expected {expected}")]
    RaggedRow { line: u64, found: usize, expected: usize },
    #[error("missing value in row {line}, column `{column}`")]
    MissingValue { line: u64, column: String },
    #[error("{found} random flags given for {expected} factors")]
    FlagCountMismatch { expected: usize, found: usize },
    #[error("flags file line {line}: {reason}")]
    BadFlagLine { line: usize, reason: String },
    #[error("flags file names unknown factor `{0}`")]
    UnknownFlagFactor(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("factor `{factor}`: {reason}")]
    InvalidFactor { factor: String, reason: String },
}

/// A design factor: a column of the design table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    /// Distinct level labels in first-appearance order.
    pub levels: Vec<String>,
    pub is_random: bool,
}

impl Factor {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }
}

/// Observational units by factors, with every cell recoded to a level index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignTable {
    factors: Vec<Factor>,
    n_units: usize,
    /// `columns[f][u]` is the level index of factor `f` on unit `u`.
    columns: Vec<Vec<u32>>,
}

/// Grouping of units: `class_of[u]` is the class of unit `u`.
///
/// Classes are numbered in order of first appearance, so two partitions
/// that group the units identically compare equal regardless of how their
/// source factors labelled their levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<u32>,
    n_classes: usize,
}

impl Partition {
    /// Canonicalises arbitrary per-unit keys into a partition.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids: HashMap<K, u32> = HashMap::new();
        let class_of: Vec<u32> = keys
            .into_iter()
            .map(|k| {
                let next = ids.len() as u32;
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition {
            n_classes: ids.len(),
            class_of,
        }
    }

    /// The single-class partition of the Mean.
    pub fn mean(n_units: usize) -> Self {
        Partition {
            class_of: vec![0; n_units],
            n_classes: usize::from(n_units > 0),
        }
    }

    pub fn class_of(&self) -> &[u32] {
        &self.class_of
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_units(&self) -> usize {
        self.class_of.len()
    }

    /// True when every unit sits in its own class.
    pub fn is_discrete(&self) -> bool {
        self.n_classes == self.class_of.len()
    }

    /// Coarsest common refinement: units share a class iff they share a class
    /// in both inputs.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.n_units(), other.n_units(), "partitions over different units");
        let width = other.n_classes.max(1);
        if self.n_classes.saturating_mul(width) <= 1 << 20 {
            let mut table = vec![u32::MAX; self.n_classes * width];
            let mut next = 0u32;
            let class_of = self
                .class_of
                .iter()
                .zip(&other.class_of)
                .map(|(&a, &b)| {
                    let slot = &mut table[a as usize * width + b as usize];
                    if *slot == u32::MAX {
                        *slot = next;
                        next += 1;
                    }
                    *slot
                })
                .collect();
            Partition {
                class_of,
                n_classes: next as usize,
            }
        } else {
            Partition::from_keys(self.class_of.iter().zip(&other.class_of))
        }
    }

    /// Unit indices grouped by class, classes in id order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.n_classes];
        for (u, &c) in self.class_of.iter().enumerate() {
            blocks[c as usize].push(u);
        }
        blocks
    }
}

impl DesignTable {
    /// Builds a table from label columns. `columns[f]` holds factor `f`'s
    /// labels for every unit.
    pub fn from_columns(names: &[&str], columns: Vec<Vec<String>>, random: &[bool]) -> Result<Self, DesignError> {
        if names.is_empty() {
            return Err(DesignError::MissingHeader);
        }
        if random.len() != names.len() {
            return Err(DesignError::FlagCountMismatch {
                expected: names.len(),
                found: random.len(),
            });
        }
        check_names(names.iter().copied())?;
        let n_units = columns.first().map_or(0, Vec::len);
        if n_units == 0 {
            return Err(DesignError::EmptyBody);
        }
        let mut factors = Vec::with_capacity(names.len());
        let mut coded = Vec::with_capacity(names.len());
        for ((name, labels), &is_random) in names.iter().zip(columns).zip(random) {
            if labels.len() != n_units {
                return Err(DesignError::InvalidFactor {
                    factor: name.to_string(),
                    reason: format!("{} values for {} units", labels.len(), n_units),
                });
            }
            let (levels, codes) = recode(labels.iter().map(|s| s.trim()));
            if let Some(u) = labels.iter().position(|l| l.trim().is_empty()) {
                return Err(DesignError::MissingValue {
                    line: u as u64 + 2,
                    column: name.to_string(),
                });
            }
            factors.push(Factor {
                name: name.to_string(),
                levels,
                is_random,
            });
            coded.push(codes);
        }
        Ok(DesignTable {
            factors,
            n_units,
            columns: coded,
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, index: usize) -> &Factor {
        &self.factors[index]
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn factor_names(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.name.clone()).collect()
    }

    pub fn random_flags(&self) -> Vec<bool> {
        self.factors.iter().map(|f| f.is_random).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Level index of `factor` on `unit`.
    pub fn cell(&self, unit: usize, factor: usize) -> u32 {
        self.columns[factor][unit]
    }

    pub fn label(&self, unit: usize, factor: usize) -> &str {
        &self.factors[factor].levels[self.columns[factor][unit] as usize]
    }

    /// Returns a copy with different fixed/random flags.
    pub fn with_random_flags(mut self, random: &[bool]) -> Result<Self, DesignError> {
        if random.len() != self.factors.len() {
            return Err(DesignError::FlagCountMismatch {
                expected: self.factors.len(),
                found: random.len(),
            });
        }
        for (f, &r) in self.factors.iter_mut().zip(random) {
            f.is_random = r;
        }
        Ok(self)
    }

    /// Partition of the units by a single factor.
    pub fn factor_partition(&self, factor: usize) -> Partition {
        // Level codes are already in first-appearance order.
        Partition {
            class_of: self.columns[factor].clone(),
            n_classes: self.factors[factor].n_levels(),
        }
    }

    /// Serialises the table back to CSV (header plus one row per unit).
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.factors.iter().map(|f| f.name.as_str()))
            .expect("in-memory write");
        for u in 0..self.n_units {
            w.write_record((0..self.factors.len()).map(|f| self.label(u, f)))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("labels are UTF-8")
    }
}

fn check_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<(), DesignError> {
    let mut seen = HashMap::new();
    for (index, name) in names.enumerate() {
        if name.trim().is_empty() {
            return Err(DesignError::EmptyColumnName { index });
        }
        if seen.insert(name.to_string(), index).is_some() {
            return Err(DesignError::DuplicateColumn(name.to_string()));
        }
    }
    Ok(())
}

fn recode<'a>(labels: impl Iterator<Item = &'a str>) -> (Vec<String>, Vec<u32>) {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut levels = Vec::new();
    let codes = labels
        .map(|l| {
            *index.entry(l).or_insert_with(|| {
                levels.push(l.to_string());
                levels.len() as u32 - 1
            })
        })
        .collect();
    (levels, codes)
}

/// Parses a design from CSV text. Without `random_flags` every factor is fixed.
pub fn load_design(csv_text: &str, random_flags: Option<&[bool]>) -> Result<DesignTable, DesignError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DesignError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(DesignError::MissingHeader);
    }
    check_names(header.iter().map(String::as_str))?;
    if let Some(flags) = random_flags {
        if flags.len() != header.len() {
            return Err(DesignError::FlagCountMismatch {
                expected: header.len(),
                found: flags.len(),
            });
        }
    }

    let mut columns: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record.map_err(|e| DesignError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() && header.len() > 1 {
            // blank line
            continue;
        }
        if record.len() != header.len() {
            return Err(DesignError::RaggedRow {
                line,
                found: record.len(),
                expected: header.len(),
            });
        }
        for (f, value) in record.iter().enumerate() {
            if value.is_empty() {
                return Err(DesignError::MissingValue {
                    line,
                    column: header[f].clone(),
                });
            }
            columns[f].push(value.to_string());
        }
    }
    if columns[0].is_empty() {
        return Err(DesignError::EmptyBody);
    }
    let names: Vec<&str> = header.iter().map(String::as_str).collect();
    let flags = random_flags.map_or_else(|| vec![false; names.len()], <[bool]>::to_vec);
    DesignTable::from_columns(&names, columns, &flags)
}

/// Reads a flags sidecar: one `name=0|1` per line, `#` comments allowed.
/// Factors not mentioned are fixed.
pub fn parse_flags_sidecar(text: &str, names: &[String]) -> Result<Vec<bool>, DesignError> {
    let mut flags = vec![false; names.len()];
    let mut seen = vec![false; names.len()];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| DesignError::BadFlagLine {
            line: i + 1,
            reason: reason.to_string(),
        };
        let (name, value) = line.split_once('=').ok_or_else(|| bad("expected `name=0|1`"))?;
        let name = name.trim();
        let index = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DesignError::UnknownFlagFactor(name.to_string()))?;
        if std::mem::replace(&mut seen[index], true) {
            return Err(bad("factor listed twice"));
        }
        flags[index] = match value.trim() {
            "1" => true,
            "0" => false,
            _ => return Err(bad("value must be 0 or 1")),
        };
    }
    Ok(flags)
}

pub fn format_flags_sidecar(table: &DesignTable) -> String {
    table
        .factors()
        .iter()
        .map(|f| format!("{}={}\n", f.name, u8::from(f.is_random)))
        .collect()
}

/// Partition induced by a set of factors. The empty set gives the Mean.
pub fn partition_of(table: &DesignTable, subset: &[usize]) -> Partition {
    subset.iter().fold(Partition::mean(table.n_units()), |acc, &f| {
        acc.join(&table.factor_partition(f))
    })
}

/// Non-fatal observations about a design table.
pub fn check_design(table: &DesignTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let parts: Vec<Partition> = (0..table.n_factors()).map(|f| table.factor_partition(f)).collect();
    for (f, factor) in table.factors().iter().enumerate() {
        if factor.n_levels() == 1 {
            out.push(Diagnostic::SingleLevel {
                factor: factor.name.clone(),
            });
        } else if parts[f].is_discrete() {
            out.push(Diagnostic::DiscreteFactor {
                factor: factor.name.clone(),
            });
        }
    }
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            if parts[a] == parts[b] {
                out.push(Diagnostic::IdenticalFactors {
                    first: table.factor(a).name.clone(),
                    second: table.factor(b).name.clone(),
                });
            }
        }
    }
    out
}

impl fmt::Display for DesignTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} units x {} factors (", self.n_units, self.factors.len())?;
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {}", factor.name, factor.n_levels())?;
        }
        f.write_str(")")
    }
}
