//! Parsed model: named systems, operators, characteristics and densities.

use std::fmt::Write;

use indexmap::IndexMap;
use sha2::{Digest, Sha256};

use crate::jet::{DiffPoly, EvolutionSystem, Functional, Space};
use crate::operator::PseudoDiffOp;

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub eps_order: usize,
    pub max_jet_order: usize,
    pub depvars: Vec<String>,
    pub systems: IndexMap<String, EvolutionSystem>,
    pub operators: IndexMap<String, PseudoDiffOp>,
    pub characteristics: IndexMap<String, Vec<DiffPoly>>,
    pub densities: IndexMap<String, DiffPoly>,
}

impl Default for Model {
    fn default() -> Self {
        Model {
            eps_order: 1,
            max_jet_order: 12,
            depvars: vec!["u".into()],
            systems: IndexMap::new(),
            operators: IndexMap::new(),
            characteristics: IndexMap::new(),
            densities: IndexMap::new(),
        }
    }
}

fn join(polys: &[DiffPoly], names: &[String]) -> String {
    polys
        .iter()
        .map(|p| p.display_with(names).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl Model {
    pub fn space(&self) -> Space {
        Space::new(self.depvars.len(), self.eps_order)
    }

    /// Canonical source text; parsing it gives back an equal model.
    pub fn to_source(&self) -> String {
        let names = &self.depvars;
        let mut s = String::new();
        writeln!(s, "set eps_order = {};", self.eps_order).unwrap();
        writeln!(s, "set max_jet_order = {};", self.max_jet_order).unwrap();
        if self.depvars != ["u"] {
            writeln!(s, "depvars {};", self.depvars.join(", ")).unwrap();
        }
        for (name, sys) in &self.systems {
            writeln!(s, "system {name} {{ rhs: {}; }}", join(sys.rhs(), names)).unwrap();
        }
        for (name, op) in &self.operators {
            writeln!(s, "operator {name} {{ {}; }}", op.display_with(names)).unwrap();
        }
        for (name, q) in &self.characteristics {
            writeln!(s, "char {name} = {};", join(q, names)).unwrap();
        }
        for (name, d) in &self.densities {
            writeln!(s, "density {name} = {};", d.display_with(names)).unwrap();
        }
        s
    }

    /// SHA-256 of the canonical source, in hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_source().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn functional(&self, name: &str) -> Option<Functional> {
        self.densities
            .get(name)
            .map(|d| Functional::named(d.clone(), name))
    }
}
