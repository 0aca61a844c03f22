//! Random graph generators: Erdős–Rényi, random geometric and k-nearest-neighbour.
//!
//! Geometric and k-NN graphs place nodes uniformly in the unit square and
//! weight each edge with a Gaussian kernel `exp(-d²/d̄²)`, where `d̄` is the
//! mean length of the edges that survived selection. Every generator retries
//! with fresh draws until the graph is connected.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{count, real, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    ErdosRenyi,
    Geometric,
    Knn,
}

/// Parameters for a random graph family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Edge probability (Erdős–Rényi).
    pub p: f64,
    /// Distance threshold (geometric).
    pub radius: f64,
    /// Neighbour count (k-NN).
    pub k: usize,
    pub max_attempts: usize,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            kind: GraphKind::ErdosRenyi,
            n: 100,
            p: 0.7,
            radius: 0.3,
            k: 7,
            max_attempts: 1000,
        }
    }
}

impl GenSpec {
    pub fn erdos_renyi(n: usize, p: f64) -> Self {
        Self {
            kind: GraphKind::ErdosRenyi,
            n,
            p,
            ..Self::default()
        }
    }

    pub fn geometric(n: usize, radius: f64) -> Self {
        Self {
            kind: GraphKind::Geometric,
            n,
            radius,
            ..Self::default()
        }
    }

    pub fn knn(n: usize, k: usize) -> Self {
        Self {
            kind: GraphKind::Knn,
            n,
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("graph.n must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return bad("graph.max_attempts must be at least 1".into());
        }
        match self.kind {
            GraphKind::ErdosRenyi if !(self.p > 0.0 && self.p <= 1.0) => {
                bad(format!("graph.p must lie in (0, 1], got {}", self.p))
            }
            GraphKind::Geometric if !(self.radius > 0.0) => {
                bad(format!("graph.radius must be positive, got {}", self.radius))
            }
            GraphKind::Knn if self.k == 0 || self.k >= self.n => bad(format!(
                "graph.k must satisfy 1 <= k < n, got k={} n={}",
                self.k, self.n
            )),
            _ => Ok(()),
        }
    }
}

/// A generated graph together with the number of draws it took.
#[derive(Clone, Debug)]
pub struct Generated<T: Real> {
    pub graph: Graph<T>,
    pub attempts: usize,
}

/// Draws a connected graph from the family described by `spec`.
pub fn generate<T: Real, R: Rng + ?Sized>(spec: &GenSpec, rng: &mut R) -> Result<Generated<T>> {
    spec.validate()?;
    for attempt in 1..=spec.max_attempts {
        let candidate = match spec.kind {
            GraphKind::ErdosRenyi => Some(erdos_renyi_draw(spec.n, spec.p, rng)?),
            GraphKind::Geometric => {
                let coords = unit_square(spec.n, rng);
                geometric_from_coords(coords, real(spec.radius))?
            }
            GraphKind::Knn => Some(knn_graph(unit_square(spec.n, rng), spec.k)?),
        };
        if let Some(graph) = candidate.filter(Graph::is_connected) {
            log::debug!("{:?} graph connected after {attempt} attempt(s)", spec.kind);
            return Ok(Generated {
                graph,
                attempts: attempt,
            });
        }
    }
    Err(Error::ConnectivityNotAchieved {
        attempts: spec.max_attempts,
    })
}

/// Erdős–Rényi graph with unit weights, retried until connected.
pub fn gen_erdos_renyi<T: Real, R: Rng + ?Sized>(
    spec: &GenSpec,
    rng: &mut R,
) -> Result<Generated<T>> {
    expect_kind(spec, GraphKind::ErdosRenyi)?;
    generate(spec, rng)
}

/// Random geometric graph on the unit square, retried until connected.
pub fn gen_geometric<T: Real, R: Rng + ?Sized>(
    spec: &GenSpec,
    rng: &mut R,
) -> Result<Generated<T>> {
    expect_kind(spec, GraphKind::Geometric)?;
    generate(spec, rng)
}

fn expect_kind(spec: &GenSpec, kind: GraphKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "expected a {kind:?} spec, got {:?}",
            spec.kind
        )))
    }
}

fn erdos_renyi_draw<T: Real, R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph<T>> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, T::one()));
            }
        }
    }
    Graph::build(n, &edges)
}

/// Uniform points on `[0, 1)²`.
pub fn unit_square<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<[T; 2]> {
    (0..n).map(|_| [T::unit(rng), T::unit(rng)]).collect()
}

fn distance<T: Real>(a: &[T; 2], b: &[T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Threshold graph `d_ij < radius` with Gaussian-kernel weights.
///
/// Returns `None` when no pair is within range or every selected edge has
/// zero length, since the kernel scale is then undefined.
pub fn geometric_from_coords<T: Real>(coords: Vec<[T; 2]>, radius: T) -> Result<Option<Graph<T>>> {
    let n = coords.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(&coords[i], &coords[j]);
            if d < radius {
                pairs.push((i, j, d));
            }
        }
    }
    kernel_graph(coords, pairs)
}

/// k-NN graph symmetrised by union with Gaussian-kernel weights.
///
/// Distance ties are broken toward the lower node index.
pub fn knn_graph<T: Real>(coords: Vec<[T; 2]>, k: usize) -> Result<Graph<T>> {
    let n = coords.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidConfig(format!(
            "k-NN requires 1 <= k < n, got k={k} n={n}"
        )));
    }
    let mut adjacent = vec![vec![false; n]; n];
    for i in 0..n {
        let mut others: Vec<(T, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (distance(&coords[i], &coords[j]), j))
            .collect();
        others.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distances")
                .then(a.1.cmp(&b.1))
        });
        for &(_, j) in &others[..k] {
            adjacent[i][j] = true;
            adjacent[j][i] = true;
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if adjacent[i][j] {
                pairs.push((i, j, distance(&coords[i], &coords[j])));
            }
        }
    }
    kernel_graph(coords, pairs)?.ok_or_else(|| {
        Error::InvalidConfig("k-NN graph on coincident points has no kernel scale".into())
    })
}

/// Same as [`knn_graph`]; named after the generator it stands in for.
pub fn gen_knn<T: Real>(coords: Vec<[T; 2]>, k: usize) -> Result<Graph<T>> {
    knn_graph(coords, k)
}

fn kernel_graph<T: Real>(
    coords: Vec<[T; 2]>,
    pairs: Vec<(usize, usize, T)>,
) -> Result<Option<Graph<T>>> {
    if pairs.is_empty() {
        return Ok(None);
    }
    let mean_len = pairs.iter().fold(T::zero(), |a, p| a + p.2) / count(pairs.len());
    if !(mean_len > T::zero()) {
        return Ok(None);
    }
    let scale2 = mean_len * mean_len;
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(i, j, d)| (i, j, (-(d * d) / scale2).exp()))
        .collect();
    let n = coords.len();
    Graph::build(n, &edges)?.with_coords(coords).map(Some)
}
