//! Graph text format.
//!
//! ```text
//! # comment
//! format_version 1
//! marked x0            # defaults to the first vertex listed
//! x0 x1                # edge, multiplicity 1
//! x2 x4 2              # edge with multiplicity
//! local x1 x4          # local set S
//! coef x0 x1 x1 1      # N_{x0, x1}^{x1}
//! dim y delta          # dimension: a number or `delta`
//! ```
//!
//! Vertex dimensions default to the Perron–Frobenius weights.

use super::{check_version, read_file, IoError};
use crate::graph::{graph_pf_dims, local_matrix_check, BipartiteGraph, LocalCheck, LocalFusionData};
use crate::linalg::PsdPolicy;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimSpec {
    Value(f64),
    Delta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: BipartiteGraph,
    pub local_set: Vec<String>,
    pub coefficients: Vec<(String, String, String, u32)>,
    pub dims: BTreeMap<String, DimSpec>,
}

fn syntax(line: usize, message: impl Into<String>) -> IoError {
    IoError::GraphSyntax { line, message: message.into() }
}

pub fn parse_graph_str(text: &str) -> Result<GraphFile, IoError> {
    let mut labels: Vec<String> = Vec::new();
    let index = |labels: &mut Vec<String>, l: &str| match labels.iter().position(|x| x == l) {
        Some(p) => p,
        None => {
            labels.push(l.to_string());
            labels.len() - 1
        }
    };
    let mut edges = Vec::new();
    let mut marked: Option<(usize, String)> = None;
    let mut local_set = Vec::new();
    let mut coefficients = Vec::new();
    let mut dims = BTreeMap::new();
    let mut version = None;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tok: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tok.first() else { continue };
        match head {
            "format_version" => {
                let v = tok.get(1).and_then(|v| v.parse::<u32>().ok()).ok_or_else(|| syntax(line, "expected a version number"))?;
                version = Some(v);
            }
            "marked" => {
                let [_, l] = tok[..] else { return Err(syntax(line, "expected `marked <vertex>`")) };
                marked = Some((line, l.to_string()));
            }
            "local" => {
                if tok.len() < 2 {
                    return Err(syntax(line, "expected `local <label>...`"));
                }
                local_set.extend(tok[1..].iter().map(|s| s.to_string()));
            }
            "coef" => {
                let [_, i, j, k, v] = tok[..] else { return Err(syntax(line, "expected `coef <i> <j> <k> <value>`")) };
                let v = v.parse::<u32>().map_err(|_| syntax(line, format!("coefficient {v} is not a nonnegative integer")))?;
                coefficients.push((i.to_string(), j.to_string(), k.to_string(), v));
            }
            "dim" => {
                let [_, l, v] = tok[..] else { return Err(syntax(line, "expected `dim <label> <value|delta>`")) };
                let spec = if v == "delta" {
                    DimSpec::Delta
                } else {
                    DimSpec::Value(v.parse::<f64>().map_err(|_| syntax(line, format!("dimension {v} is not a number")))?)
                };
                dims.insert(l.to_string(), spec);
            }
            _ => {
                let (u, v, m) = match tok[..] {
                    [u, v] => (u, v, 1),
                    [u, v, m] => (u, v, m.parse::<u32>().map_err(|_| syntax(line, format!("multiplicity {m} is not an integer")))?),
                    _ => return Err(syntax(line, format!("unrecognized line `{}`", content.trim()))),
                };
                if u == v {
                    return Err(syntax(line, format!("self-loop at {u}")));
                }
                let (a, b) = (index(&mut labels, u), index(&mut labels, v));
                edges.push((a, b, m));
            }
        }
    }
    if let Some(v) = version {
        check_version(v)?;
    }
    let marked = match marked {
        Some((line, l)) => labels.iter().position(|x| *x == l).ok_or_else(|| syntax(line, format!("unknown vertex {l}")))?,
        None => 0,
    };
    if labels.is_empty() {
        return Err(IoError::Graph(crate::graph::GraphError::Empty));
    }
    let graph = BipartiteGraph::new(labels, marked, edges)?;
    Ok(GraphFile { graph, local_set, coefficients, dims })
}

pub fn parse_graph(path: &Path) -> Result<GraphFile, IoError> {
    parse_graph_str(&read_file(path)?)
}

impl GraphFile {
    /// Local fusion data with dimensions resolved against the graph's weights.
    pub fn local_data(&self) -> Result<Option<LocalFusionData>, IoError> {
        if self.local_set.is_empty() {
            return Ok(None);
        }
        let pf = graph_pf_dims(&self.graph)?;
        let mut dims: BTreeMap<String, f64> =
            self.graph.labels().iter().cloned().zip(pf.weights.iter().copied()).collect();
        for (l, spec) in &self.dims {
            let d = match spec {
                DimSpec::Value(v) => *v,
                DimSpec::Delta => pf.delta,
            };
            dims.insert(l.clone(), d);
        }
        let data = LocalFusionData { local_set: self.local_set.clone(), coefficients: self.coefficients.clone(), dims };
        data.validate()?;
        Ok(Some(data))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexReport {
    pub label: String,
    pub weight: f64,
    pub even: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalReport {
    pub n: usize,
    #[serde(flatten)]
    pub check: LocalCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub format_version: u32,
    pub delta: f64,
    pub delta_squared: f64,
    pub marked: String,
    pub vertices: Vec<VertexReport>,
    pub pf_residual: f64,
    pub local_set: Vec<String>,
    pub local_checks: Vec<LocalReport>,
    pub policy: PsdPolicy,
    /// Set when some local check fails.
    pub conclusion: Option<String>,
}

/// PF data plus local-matrix checks for `n = 1..=n_max` when the file has local data.
pub fn graph_report(file: &GraphFile, n_max: usize, policy: &PsdPolicy) -> Result<GraphReport, IoError> {
    let g = &file.graph;
    let pf = graph_pf_dims(g)?;
    let even = g.even();
    let vertices = g
        .labels()
        .iter()
        .enumerate()
        .map(|(v, l)| VertexReport { label: l.clone(), weight: pf.weights[v], even: even.contains(&v) })
        .collect();
    let mut local_checks = Vec::new();
    if let Some(data) = file.local_data()? {
        for n in 1..=n_max {
            local_checks.push(LocalReport { n, check: local_matrix_check(&data, n, policy)? });
        }
    }
    let conclusion = local_checks
        .iter()
        .find(|c| c.check.verdict.fails())
        .map(|c| format!("T_{}^S is not positive semidefinite: the graph is not a principal graph of a subfactor", c.n));
    Ok(GraphReport {
        format_version: super::FORMAT_VERSION,
        delta: pf.delta,
        delta_squared: pf.delta * pf.delta,
        marked: g.labels()[g.marked()].clone(),
        vertices,
        pf_residual: pf.residual,
        local_set: file.local_set.clone(),
        local_checks,
        policy: *policy,
        conclusion,
    })
}
