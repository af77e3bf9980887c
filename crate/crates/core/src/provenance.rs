//! `# key=value` comment headers that make CSV outputs self-describing.

use std::fmt::{self, Display};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends or overwrites `key`, keeping first-insertion order.
    pub fn set(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Display) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: &Provenance) {
        for (k, v) in &other.entries {
            self.set(k.clone(), v);
        }
    }

    /// Collects every `# key=value` line of `text`.
    pub fn parse(text: &str) -> Self {
        let mut out = Self::new();
        for line in text.lines() {
            if let Some((key, value)) = line
                .trim()
                .strip_prefix('#')
                .and_then(|rest| rest.trim().split_once('='))
            {
                out.set(key.trim(), value.trim());
            }
        }
        out
    }
}

impl Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "# {k}={v}")?;
        }
        Ok(())
    }
}
