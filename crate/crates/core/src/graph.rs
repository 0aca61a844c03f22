//! Weighted undirected graphs with dense storage.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An undirected graph with a dense symmetric nonnegative weight matrix.
///
/// The diagonal is always zero. Optional node coordinates are carried along
/// for generators that place nodes in the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<T: Real> {
    weights: DMatrix<T>,
    coords: Option<Vec<[T; 2]>>,
}

impl<T: Real> Graph<T> {
    /// Assembles a graph from an undirected edge list `(i, j, w)`.
    pub fn build(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut weights = DMatrix::zeros(n, n);
        let mut seen = HashSet::with_capacity(edges.len());
        for &(i, j, w) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop { i });
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::InvalidWeight { i, j, w: w.as_f64() });
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge { i, j });
            }
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
        Ok(Self {
            weights,
            coords: None,
        })
    }

    /// Wraps an existing weight matrix after checking the graph invariants.
    pub fn from_weights(weights: DMatrix<T>) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "weight matrix columns",
                expected: n,
                found: weights.ncols(),
            });
        }
        for i in 0..n {
            if weights[(i, i)] != T::zero() {
                return Err(Error::SelfLoop { i });
            }
            for j in (i + 1)..n {
                let w = weights[(i, j)];
                if w != weights[(j, i)] {
                    return Err(Error::InvalidConfig(format!(
                        "weight matrix not symmetric at ({i}, {j})"
                    )));
                }
                if w < T::zero() || !w.is_finite() {
                    return Err(Error::InvalidWeight { i, j, w: w.as_f64() });
                }
            }
        }
        Ok(Self {
            weights,
            coords: None,
        })
    }

    /// Attaches node coordinates.
    pub fn with_coords(mut self, coords: Vec<[T; 2]>) -> Result<Self> {
        if coords.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "coordinates",
                expected: self.n(),
                found: coords.len(),
            });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<T> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[(i, j)]
    }

    pub fn coords(&self) -> Option<&[[T; 2]]> {
        self.coords.as_deref()
    }

    /// Row sums of the weight matrix.
    pub fn degrees(&self) -> DVector<T> {
        DVector::from_iterator(
            self.n(),
            self.weights.row_iter().map(|row| row.iter().fold(T::zero(), |a, &w| a + w)),
        )
    }

    /// Combinatorial Laplacian `D - W`.
    pub fn laplacian(&self) -> DMatrix<T> {
        let mut l = -self.weights.clone();
        for (i, d) in self.degrees().iter().enumerate() {
            l[(i, i)] = *d;
        }
        l
    }

    /// Edges with positive weight, each reported once with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weights[(i, j)];
                (w > T::zero()).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Nodes adjacent to `i` through a positive-weight edge.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| self.weights[(i, j)] > T::zero())
            .collect()
    }

    /// Laplacian quadratic form `yᵀ L y`.
    pub fn quadratic_form(&self, y: &[T]) -> Result<T> {
        check_len("signal", self.n(), y.len())?;
        let y = DVector::from_column_slice(y);
        let ly = self.laplacian() * &y;
        Ok(y.dot(&ly))
    }

    /// Breadth-first traversal over positive-weight edges.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !visited[j] && self.weights[(i, j)] > T::zero() {
                    visited[j] = true;
                    reached += 1;
                    queue.push_back(j);
                }
            }
        }
        reached == n
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph<f64> {
        Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_laplacian() {
        let g = Graph::build(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.weights(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(
            g.laplacian(),
            DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn empty_edge_set_gives_zero_laplacian() {
        let g = Graph::<f64>::build(3, &[]).unwrap();
        assert_eq!(g.laplacian(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Graph::build(2, &[(0, 0, 1.0)]),
            Err(Error::SelfLoop { i: 0 })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 1, -1.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            Graph::build(3, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(matches!(Graph::<f64>::build(0, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g: Graph<f64> = Graph::build(4, &[(0, 1, 0.5), (1, 2, 2.0), (0, 3, 1.5), (1, 3, 0.25)]).unwrap();
        let l = g.laplacian();
        for row in l.row_iter() {
            assert!(row.sum().abs() < 1e-15);
        }
        assert_eq!(g.degrees()[1], 2.75);
    }

    #[test]
    fn quadratic_form_examples() {
        assert_eq!(path3().quadratic_form(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(path3().quadratic_form(&[4.0, 4.0, 4.0]).unwrap(), 0.0);
        let g = Graph::build(2, &[(0, 1, 2.0)]).unwrap();
        assert_eq!(g.quadratic_form(&[0.0, 1.0]).unwrap(), 2.0);
        assert!(matches!(
            path3().quadratic_form(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn connectivity() {
        assert!(!Graph::<f64>::build(2, &[]).unwrap().is_connected());
        assert!(path3().is_connected());
        let two = Graph::build(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!two.is_connected());
        assert!(Graph::<f64>::build(1, &[]).unwrap().is_connected());
    }

    #[test]
    fn from_weights_checks_symmetry() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(Graph::from_weights(w).is_err());
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(Graph::from_weights(w).unwrap().edge_count(), 1);
    }

    #[test]
    fn works_in_single_precision() {
        let g = Graph::<f32>::build(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.quadratic_form(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
    }
}
