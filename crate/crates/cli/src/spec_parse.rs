//! Family spec grammar: `name(:key=value(,key=value)*)?`.

use std::collections::BTreeMap;

use spectral_search_core::graphs::{Family, FamilySpec};

use crate::error::CliError;

/// A family name with possibly incomplete parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSpec {
    pub family: Family,
    pub params: BTreeMap<&'static str, usize>,
}

fn allowed_keys(family: Family) -> &'static [&'static str] {
    match family {
        Family::Complete | Family::Cycle => &["n"],
        Family::Hamming => &["n", "q"],
        Family::Johnson => &["n", "k"],
        Family::Grassmann => &["q", "n", "k"],
        Family::Paley | Family::CycleInverseMatching => &["p"],
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_family_spec(text: &str) -> Result<PartialSpec, CliError> {
    let text = text.trim();
    let (name, rest) = match text.split_once(':') {
        Some((name, rest)) => (name, Some(rest)),
        None => (text, None),
    };
    let family = match name {
        "clique" => Some(Family::Complete),
        other => Family::from_name(other),
    }
    .ok_or_else(|| {
        let known: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
        usage(format!("unknown family '{name}' (known: {})", known.join(", ")))
    })?;
    let keys = allowed_keys(family);
    let mut params = BTreeMap::new();
    if let Some(rest) = rest {
        if rest.is_empty() {
            return Err(usage(format!("empty parameter list in '{text}'")));
        }
        for pair in rest.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got '{pair}'")))?;
            let key = keys
                .iter()
                .copied()
                .find(|k| *k == key.trim())
                .ok_or_else(|| usage(format!("{family} takes parameters {keys:?}, got '{key}'")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| usage(format!("parameter {key} must be a non-negative integer, got '{value}'")))?;
            if params.insert(key, value).is_some() {
                return Err(usage(format!("parameter {key} given twice")));
            }
        }
    }
    Ok(PartialSpec { family, params })
}

impl PartialSpec {
    /// Fills `key` from a command-line flag unless the spec already set it.
    pub fn fill(&mut self, key: &str, value: Option<usize>) -> Result<(), CliError> {
        let Some(value) = value else {
            return Ok(());
        };
        let key = allowed_keys(self.family)
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| usage(format!("{} takes no parameter {key}", self.family)))?;
        self.params.entry(key).or_insert(value);
        Ok(())
    }

    /// Completes the spec, with `size` overriding the growing parameter.
    pub fn resolve(&self, size: Option<usize>) -> Result<FamilySpec, CliError> {
        let mut params = self.params.clone();
        if let Some(size) = size {
            params.insert(self.family.size_key(), size);
        }
        let get = |key: &str| {
            params.get(key).copied().ok_or_else(|| {
                usage(format!(
                    "{} needs parameter {key} (as {}:{key}=… or a flag)",
                    self.family, self.family
                ))
            })
        };
        let spec = match self.family {
            Family::Complete => FamilySpec::Complete { n: get("n")? },
            Family::Cycle => FamilySpec::Cycle { n: get("n")? },
            Family::Hamming => FamilySpec::Hamming {
                n: get("n")?,
                q: get("q")?,
            },
            Family::Johnson => FamilySpec::Johnson {
                n: get("n")?,
                k: get("k")?,
            },
            Family::Grassmann => FamilySpec::Grassmann {
                q: get("q")?,
                n: get("n")?,
                k: get("k")?,
            },
            Family::Paley => FamilySpec::Paley { p: get("p")? },
            Family::CycleInverseMatching => FamilySpec::CycleInverseMatching { p: get("p")? },
        };
        spec.validate().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}
