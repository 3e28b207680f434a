use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::frontend::SourceUnit;
use crate::{Error, Result};

/// A set of parsed programs keyed by PROGRAM-ID.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Workspace {
    units: BTreeMap<String, SourceUnit>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_units(units: impl IntoIterator<Item = SourceUnit>) -> Result<Self> {
        let mut w = Workspace::new();
        for u in units {
            w.insert(u)?;
        }
        Ok(w)
    }

    pub fn insert(&mut self, unit: SourceUnit) -> Result<()> {
        if self.units.contains_key(&unit.program_id) {
            return Err(Error::DuplicateProgram(unit.program_id));
        }
        self.units.insert(unit.program_id.clone(), unit);
        Ok(())
    }

    pub fn get(&self, program: &str) -> Option<&SourceUnit> {
        self.units.get(program)
    }

    pub fn unit(&self, program: &str) -> Result<&SourceUnit> {
        self.get(program).ok_or_else(|| Error::UnknownProgram(program.into()))
    }

    pub fn units(&self) -> impl Iterator<Item = &SourceUnit> + '_ {
        self.units.values()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}
