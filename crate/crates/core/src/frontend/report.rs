//! Report assembly and the text, JSON and LaTeX emitters.

use std::fmt::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use super::Model;
use crate::engine::{CheckReport, HierarchyResult, Residual};
use crate::jet::DiffPoly;
use crate::numeric::DriftRow;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

/// Drift series from a numerical run.
#[derive(Clone, Debug, Serialize)]
pub struct NumericSeries {
    pub epsilon: f64,
    pub max_drift: f64,
    pub noise_floor: f64,
    pub rows: Vec<DriftRow>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub model_hash: String,
    pub eps_order: usize,
    pub max_jet_order: usize,
    pub depvars: Vec<String>,
    pub checks: Vec<CheckReport>,
    pub numeric: Vec<NumericSeries>,
}

impl Report {
    /// Empty report stamped with the model's hash and caps.
    pub fn for_model(command: impl Into<String>, model: &Model) -> Self {
        Report {
            command: command.into(),
            model_hash: model.hash(),
            eps_order: model.eps_order,
            max_jet_order: model.max_jet_order,
            depvars: model.depvars.clone(),
            checks: Vec::new(),
            numeric: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("valid JSON");
                s.push('\n');
                s
            }
            Format::Latex => self.to_latex(),
        }
    }

    fn text(&self, p: &DiffPoly) -> String {
        p.display_with(&self.depvars).to_string()
    }

    fn text_tuple(&self, ps: &[DiffPoly]) -> String {
        match ps {
            [] => "0".into(),
            [single] => self.text(single),
            _ => {
                let parts: Vec<String> = ps.iter().map(|p| self.text(p)).collect();
                format!("({})", parts.join(", "))
            }
        }
    }

    fn latex_tuple(&self, ps: &[DiffPoly]) -> String {
        let parts: Vec<String> = ps.iter().map(|p| p.to_latex_with(&self.depvars)).collect();
        match parts.as_slice() {
            [] => "0".into(),
            [single] => single.clone(),
            _ => format!("\\left({}\\right)", parts.join(",\\ ")),
        }
    }

    fn residual_text(&self, r: &Residual) -> String {
        match r {
            Residual::Poly(p) => self.text(p),
            Residual::Tuple(ps) => self.text_tuple(ps),
            Residual::Operator(op) => op.display_with(&self.depvars).to_string(),
            Residual::MultiVector(m) => m.display_with(&self.depvars),
        }
    }

    fn residual_latex(&self, r: &Residual) -> String {
        match r {
            Residual::Poly(p) => p.to_latex_with(&self.depvars),
            Residual::Tuple(ps) => self.latex_tuple(ps),
            Residual::Operator(op) => op.to_latex_with(&self.depvars),
            Residual::MultiVector(m) => m.to_latex_with(&self.depvars),
        }
    }

    fn hierarchy_json(&self, h: &HierarchyResult) -> Value {
        json!({
            "flows": h.flows.iter().map(|k| self.text(k)).collect::<Vec<_>>(),
            "functionals": h
                .functionals
                .iter()
                .map(|f| f.as_ref().map(|f| self.text(&f.density)))
                .collect::<Vec<_>>(),
            "stopped_at": h.stopped_at.as_ref().map(|s| json!({
                "step": s.step,
                "reason": s.reason,
                "obstruction": self.text_tuple(&s.obstruction),
            })),
            "notes": h.notes,
        })
    }

    fn check_json(&self, c: &CheckReport) -> Value {
        let mut certs = serde_json::Map::new();
        if let Some(flux) = &c.certificates.flux {
            certs.insert("flux".into(), self.text(flux).into());
        }
        if let Some(density) = &c.certificates.density {
            certs.insert("density".into(), self.text(density).into());
        }
        if !c.certificates.characteristics.is_empty() {
            let qs: Vec<String> = c
                .certificates
                .characteristics
                .iter()
                .map(|q| self.text(q))
                .collect();
            certs.insert("characteristics".into(), qs.into());
        }
        if let Some(h) = &c.certificates.hierarchy {
            certs.insert("hierarchy".into(), self.hierarchy_json(h));
        }
        json!({
            "name": c.name,
            "verdict": c.verdict.as_str(),
            "residual": self.residual_text(&c.residual),
            "certificates": certs,
            "obstruction": c.obstruction.as_ref().map(|o| self.text_tuple(o)),
            "notes": c.notes,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "model_hash": self.model_hash,
            "eps_order": self.eps_order,
            "max_jet_order": self.max_jet_order,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "checks": self.checks.iter().map(|c| self.check_json(c)).collect::<Vec<_>>(),
        });
        if !self.numeric.is_empty() {
            v["numeric"] = serde_json::to_value(&self.numeric).expect("finite drift rows");
        }
        v
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "model: {}", self.model_hash);
        let _ = writeln!(
            s,
            "eps_order: {}, max_jet_order: {}",
            self.eps_order, self.max_jet_order
        );
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}", c.verdict.as_str(), c.name);
            let _ = writeln!(s, "  residual: {}", self.residual_text(&c.residual));
            if let Some(flux) = &c.certificates.flux {
                let _ = writeln!(s, "  flux: {}", self.text(flux));
            }
            if let Some(density) = &c.certificates.density {
                let _ = writeln!(s, "  density: {}", self.text(density));
            }
            for q in &c.certificates.characteristics {
                let _ = writeln!(s, "  image: {}", self.text(q));
            }
            if let Some(h) = &c.certificates.hierarchy {
                for (i, k) in h.flows.iter().enumerate() {
                    let _ = writeln!(s, "  K{i}: {}", self.text(k));
                }
                for (i, f) in h.functionals.iter().enumerate() {
                    match f {
                        Some(f) => {
                            let _ = writeln!(s, "  H{i}: {}", self.text(&f.density));
                        }
                        None => {
                            let _ = writeln!(s, "  H{i}: none");
                        }
                    }
                }
                if let Some(stop) = &h.stopped_at {
                    let _ = writeln!(s, "  stopped at step {}: {}", stop.step, stop.reason);
                }
            }
            if let Some(o) = &c.obstruction {
                let _ = writeln!(s, "  obstruction: {}", self.text_tuple(o));
            }
            for note in &c.notes {
                let _ = writeln!(s, "  note: {note}");
            }
        }
        for n in &self.numeric {
            let _ = writeln!(
                s,
                "numeric eps={}: max drift {:.3e}, noise floor {:.3e}",
                n.epsilon, n.max_drift, n.noise_floor
            );
            for r in &n.rows {
                let _ = writeln!(
                    s,
                    "  t={:.4} value={:.12e} drift={:.3e}",
                    r.t, r.value, r.drift
                );
            }
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "pass" } else { "fail" });
        s
    }

    fn to_latex(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "% {}", self.command);
        let _ = writeln!(
            s,
            "% model {}; eps order {}; jet order cap {}",
            self.model_hash, self.eps_order, self.max_jet_order
        );
        let _ = writeln!(s, "\\begin{{itemize}}");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "\\item \\texttt{{{}}}: {}, residual ${}$",
                latex_escape(&c.name),
                c.verdict.as_str(),
                self.residual_latex(&c.residual)
            );
            if let Some(flux) = &c.certificates.flux {
                let _ = writeln!(s, "  flux ${}$", flux.to_latex_with(&self.depvars));
            }
            if let Some(density) = &c.certificates.density {
                let _ = writeln!(s, "  density ${}$", density.to_latex_with(&self.depvars));
            }
            for q in &c.certificates.characteristics {
                let _ = writeln!(s, "  image ${}$", q.to_latex_with(&self.depvars));
            }
            if let Some(h) = &c.certificates.hierarchy {
                let _ = writeln!(s, "  \\begin{{align*}}");
                for (i, k) in h.flows.iter().enumerate() {
                    let _ = writeln!(s, "  K_{{{i}}} &= {} \\\\", k.to_latex_with(&self.depvars));
                }
                for (i, f) in h.functionals.iter().enumerate() {
                    if let Some(f) = f {
                        let _ = writeln!(
                            s,
                            "  H_{{{i}}} &= \\int {}\\,dx \\\\",
                            f.density.to_latex_with(&self.depvars)
                        );
                    }
                }
                let _ = writeln!(s, "  \\end{{align*}}");
            }
            if let Some(o) = &c.obstruction {
                let _ = writeln!(s, "  obstruction ${}$", self.latex_tuple(o));
            }
        }
        let _ = writeln!(s, "\\end{{itemize}}");
        s
    }
}

fn latex_escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}")
        .replace('_', "\\_")
        .replace('&', "\\&")
        .replace('%', "\\%")
        .replace('#', "\\#")
}
