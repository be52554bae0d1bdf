//! Bipartite graphs, their Perron–Frobenius dimensions, local-matrix checks from
//! supplied local fusion data, and the dimension-bound exclusion.

use crate::criteria::{tensor_matrix, tensor_verdict, CriteriaError, LocalTerms, DEFAULT_ROW_CAP};
use crate::fusion::FusionRing;
use crate::linalg::{pf_eigen, CriterionVerdict, LinalgError, PsdPolicy};
use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("EMPTY_GRAPH: the graph has no edges")]
    Empty,
    #[error("DISCONNECTED: vertex {0} is not connected to the marked vertex")]
    Disconnected(String),
    #[error("NOT_BIPARTITE: edge {0} - {1} joins vertices of the same parity")]
    NotBipartite(String, String),
    #[error("UNKNOWN_VERTEX: {0}")]
    UnknownVertex(String),
    #[error("MISSING_DIM: no dimension for label {0}")]
    MissingDim(String),
    #[error("INVALID_LOCAL_DATA: {0}")]
    InvalidLocalData(String),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Connected bipartite multigraph with a marked vertex `★`; parts are the even
/// and odd distances from `★`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    labels: Vec<String>,
    marked: usize,
    edges: Vec<(usize, usize, u32)>,
    depth_parity: Vec<bool>,
}

impl BipartiteGraph {
    pub fn new(labels: Vec<String>, marked: usize, edges: Vec<(usize, usize, u32)>) -> Result<Self, GraphError> {
        let n = labels.len();
        if marked >= n {
            return Err(GraphError::UnknownVertex(format!("#{marked}")));
        }
        if edges.iter().all(|e| e.2 == 0) {
            return Err(GraphError::Empty);
        }
        for &(u, v, _) in &edges {
            if u >= n || v >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", u.max(v))));
            }
        }
        let mut uf = UnionFind::<usize>::new(n);
        for &(u, v, m) in &edges {
            if m > 0 {
                uf.union(u, v);
            }
        }
        if let Some(v) = (0..n).find(|&v| !uf.equiv(v, marked)) {
            return Err(GraphError::Disconnected(labels[v].clone()));
        }
        let mut parity = vec![None; n];
        parity[marked] = Some(false);
        let mut queue = VecDeque::from([marked]);
        while let Some(u) = queue.pop_front() {
            for &(a, b, m) in &edges {
                if m == 0 || (a != u && b != u) {
                    continue;
                }
                let w = if a == u { b } else { a };
                let pu = parity[u].expect("visited");
                match parity[w] {
                    None => {
                        parity[w] = Some(!pu);
                        queue.push_back(w);
                    }
                    Some(pw) if pw == pu => return Err(GraphError::NotBipartite(labels[a].clone(), labels[b].clone())),
                    Some(_) => {}
                }
            }
        }
        Ok(BipartiteGraph {
            depth_parity: parity.into_iter().map(|p| p.expect("connected")).collect(),
            labels,
            marked,
            edges,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn even(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| !self.depth_parity[v]).collect()
    }

    pub fn odd(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.depth_parity[v]).collect()
    }

    /// Symmetric adjacency with multiplicities.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.labels.len();
        let mut a = DMatrix::zeros(n, n);
        for &(u, v, m) in &self.edges {
            a[(u, v)] += m as f64;
            a[(v, u)] += m as f64;
        }
        a
    }

    /// Even × odd biadjacency.
    pub fn biadjacency(&self) -> DMatrix<f64> {
        let (ev, od) = (self.even(), self.odd());
        let a = self.adjacency();
        DMatrix::from_fn(ev.len(), od.len(), |r, c| a[(ev[r], od[c])])
    }

    /// Path `A_n` with vertices `v0 .. v{n-1}`, marked at `v0`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        Self::new(labels, 0, (1..n).map(|i| (i - 1, i, 1)).collect())
    }

    /// `D_5`: `x0 - x1 - x2 - x3` with `x2 - x4`, marked at `x0`.
    pub fn d5() -> Self {
        let labels = (0..5).map(|i| format!("x{i}")).collect();
        Self::new(labels, 0, vec![(0, 1, 1), (1, 2, 1), (2, 3, 1), (2, 4, 1)]).expect("well formed")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphDims {
    /// Perron–Frobenius eigenvalue of the adjacency (`δ`).
    pub delta: f64,
    /// Eigenvector scaled so the marked vertex has weight 1.
    pub weights: Vec<f64>,
    pub residual: f64,
}

pub fn graph_pf_dims(g: &BipartiteGraph) -> Result<GraphDims, GraphError> {
    let pf = pf_eigen(&g.adjacency())?;
    let scale = pf.right[g.marked];
    let weights = pf.right.iter().map(|w| w / scale).collect();
    Ok(GraphDims { delta: pf.radius, weights, residual: pf.residual })
}

/// Sparse local fusion rules: `N[i][j][k]` for `j, k` in the local set, with dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFusionData {
    pub local_set: Vec<String>,
    /// `(i, j, k, N_{i,j}^k)`.
    pub coefficients: Vec<(String, String, String, u32)>,
    pub dims: BTreeMap<String, f64>,
}

impl LocalFusionData {
    /// Local data of a ring on index set `s` (labels are `x{index}`).
    pub fn from_ring(ring: &FusionRing, s: &[usize], dims: &[f64]) -> Self {
        let label = |i: usize| format!("x{i}");
        let mut coefficients = Vec::new();
        for i in 0..ring.rank() {
            for &j in s {
                for &k in s {
                    let v = ring.n(i, j, k);
                    if v > 0 {
                        coefficients.push((label(i), label(j), label(k), v));
                    }
                }
            }
        }
        LocalFusionData {
            local_set: s.iter().map(|&i| label(i)).collect(),
            coefficients,
            dims: (0..ring.rank()).map(|i| (label(i), dims[i])).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.local_set.is_empty() {
            return Err(GraphError::Criteria(CriteriaError::EmptyLocalSet));
        }
        for (a, l) in self.local_set.iter().enumerate() {
            if self.local_set[..a].contains(l) {
                return Err(GraphError::InvalidLocalData(format!("duplicate local label {l}")));
            }
        }
        for (i, j, k, _) in &self.coefficients {
            for x in [j, k] {
                if !self.local_set.contains(x) {
                    return Err(GraphError::InvalidLocalData(format!("label {x} is not in the local set")));
                }
            }
            let d = *self.dims.get(i).ok_or_else(|| GraphError::MissingDim(i.clone()))?;
            if !d.is_finite() || d < 1.0 {
                return Err(GraphError::InvalidLocalData(format!("dimension of {i} must be at least 1, got {d}")));
            }
        }
        Ok(())
    }

    /// `M_i^S` for every label appearing in a coefficient, in sorted label order.
    pub fn terms(&self) -> Result<LocalTerms, GraphError> {
        self.validate()?;
        let m = self.local_set.len();
        let pos = |l: &str| self.local_set.iter().position(|x| x == l).expect("validated");
        let mut mats: BTreeMap<&str, DMatrix<f64>> = BTreeMap::new();
        for (i, j, k, v) in &self.coefficients {
            let mat = mats.entry(i.as_str()).or_insert_with(|| DMatrix::zeros(m, m));
            mat[(pos(j), pos(k))] += f64::from(*v);
        }
        let dims = mats.keys().map(|i| self.dims[*i]).collect();
        Ok(LocalTerms { dims, dims_dd: None, mats: mats.into_values().collect() })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalCheck {
    pub verdict: CriterionVerdict,
    /// Determinant of `T_n^S` (reported for matrices with at most 12 rows).
    pub determinant: Option<f64>,
}

/// Positivity of `T_n^S = Σ_i d_i² (M_i^S / d_i)^{⊗n}` built from local data.
pub fn local_matrix_check(data: &LocalFusionData, n: usize, policy: &PsdPolicy) -> Result<LocalCheck, GraphError> {
    let terms = data.terms()?;
    let verdict = tensor_verdict(&terms, n, policy, DEFAULT_ROW_CAP)?;
    let determinant = (verdict.dim <= 12)
        .then(|| tensor_matrix(&terms, n, DEFAULT_ROW_CAP).map(|t| t.to_dense().determinant()))
        .transpose()?;
    Ok(LocalCheck { verdict, determinant })
}

/// Local data of the `D_5` example on `S = {x1, x4}`. The label `y` carries the
/// off-diagonal entry; its dimension `√(2+√2)` is the value forced by `det T_1^S = −1 − √2`.
pub fn d5_local_data() -> LocalFusionData {
    let c = (2.0 + 2f64.sqrt()).sqrt();
    let s = |x: &str| x.to_string();
    LocalFusionData {
        local_set: vec![s("x1"), s("x4")],
        coefficients: vec![
            (s("x0"), s("x1"), s("x1"), 1),
            (s("x0"), s("x4"), s("x4"), 1),
            (s("y"), s("x1"), s("x4"), 1),
            (s("y"), s("x4"), s("x1"), 1),
        ],
        dims: BTreeMap::from([(s("x0"), 1.0), (s("y"), c)]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionBound {
    pub excluded: bool,
    pub bound: Option<f64>,
    pub note: Option<String>,
}

/// Excluded iff `dim P_3 < ((δ²−1)/ℓ) √(ℓ⁴/δ² − 1) + ℓ⁴ + ℓ² + 2`, applicable when `ℓ ≥ 1`,
/// `δ² > 1` and `ℓ⁴ ≥ δ²`.
pub fn dimension_bound_exclusion(l: u32, delta_sq: f64, dim_p3: f64) -> DimensionBound {
    let lf = f64::from(l);
    let l4 = lf.powi(4);
    if l < 1 || !(delta_sq > 1.0) || l4 < delta_sq {
        return DimensionBound {
            excluded: false,
            bound: None,
            note: Some(format!("inapplicable: need l >= 1, delta^2 > 1 and l^4 >= delta^2 (l = {l}, delta^2 = {delta_sq})")),
        };
    }
    let bound = (delta_sq - 1.0) / lf * (l4 / delta_sq - 1.0).sqrt() + l4 + lf * lf + 2.0;
    DimensionBound { excluded: dim_p3 < bound, bound: Some(bound), note: None }
}
