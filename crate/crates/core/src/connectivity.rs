//! Connectivity of a plan's link graph, decided two ways: the Fiedler value
//! of the Laplacian and a disjoint-set union.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::topology::Plan;

/// Threshold above which λ2 counts as nonzero.
pub const FIEDLER_EPS: f64 = 1e-6;

/// Union-find with union by size and undo support.
///
/// No path compression, so every union can be rolled back in O(1).
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
    history: Vec<Option<(usize, usize)>>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
            history: Vec::new(),
        }
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns `true` if two components were merged. Always records one
    /// history entry so that `rollback` pairs with `union` one-to-one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut x, mut y) = (self.find(a), self.find(b));
        if x == y {
            self.history.push(None);
            return false;
        }
        if self.size[x] < self.size[y] {
            std::mem::swap(&mut x, &mut y);
        }
        self.parent[y] = x;
        self.size[x] += self.size[y];
        self.components -= 1;
        self.history.push(Some((x, y)));
        true
    }

    /// Number of recorded unions; pass to [`DisjointSet::rollback`].
    pub fn checkpoint(&self) -> usize {
        self.history.len()
    }

    pub fn rollback(&mut self, checkpoint: usize) {
        while self.history.len() > checkpoint {
            if let Some((x, y)) = self.history.pop().flatten() {
                self.parent[y] = y;
                self.size[x] -= self.size[y];
                self.components += 1;
            }
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn component_size(&self, v: usize) -> usize {
        self.size[self.find(v)]
    }
}

/// Degree vector, 0/1 adjacency, and Laplacian `L = D - C` of a plan.
#[derive(Clone, Debug)]
pub struct LaplacianView {
    pub degree: Vec<usize>,
    pub adjacency: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
}

impl LaplacianView {
    pub fn new(p: &Plan) -> Self {
        let m = p.len();
        let adjacency = DMatrix::from_fn(m, m, |i, j| {
            if i != j && p.kind(i, j).is_link() {
                1.0
            } else {
                0.0
            }
        });
        let degree: Vec<usize> = (0..m).map(|i| p.degree(i)).collect();
        let laplacian = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                degree[i] as f64
            } else {
                -adjacency[(i, j)]
            }
        });
        Self {
            degree,
            adjacency,
            laplacian,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self
            .laplacian
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        eig
    }
}

/// Second-smallest Laplacian eigenvalue (algebraic connectivity).
pub fn fiedler_value(p: &Plan) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::Precondition(format!(
            "Fiedler value needs at least 2 nodes, plan has {}",
            p.len()
        )));
    }
    Ok(LaplacianView::new(p).spectrum()[1])
}

pub fn is_connected(p: &Plan) -> bool {
    let mut dsu = DisjointSet::new(p.len());
    for (i, j, _) in p.links() {
        dsu.union(i, j);
    }
    dsu.components() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::LinkKind;

    fn plan(m: usize, edges: &[(usize, usize)]) -> Plan {
        let mut p = Plan::empty(m);
        for &(i, j) in edges {
            p.set(i, j, LinkKind::Of);
        }
        p
    }

    #[test]
    fn two_nodes() {
        let linked = plan(2, &[(0, 1)]);
        assert!((fiedler_value(&linked).unwrap() - 2.0).abs() < 1e-9);
        assert!(fiedler_value(&plan(2, &[])).unwrap().abs() < 1e-9);
        assert!(fiedler_value(&plan(1, &[])).is_err());
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let p = plan(4, &[(0, 1), (1, 2), (1, 3)]);
        let view = LaplacianView::new(&p);
        assert_eq!(view.degree, vec![1, 3, 1, 1]);
        for i in 0..4 {
            assert_eq!(view.laplacian.row(i).sum(), 0.0);
        }
        assert!(view.spectrum()[0].abs() < 1e-9);
    }

    #[test]
    fn connectivity_cases() {
        assert!(is_connected(&plan(3, &[(0, 1), (1, 2)])));
        assert!(!is_connected(&plan(3, &[(0, 1)])));
        assert!(is_connected(&plan(1, &[])));
    }

    #[test]
    fn rollback_restores_components() {
        let mut d = DisjointSet::new(5);
        d.union(0, 1);
        let cp = d.checkpoint();
        d.union(2, 3);
        d.union(1, 3);
        d.union(0, 2);
        assert_eq!(d.components(), 2);
        assert_eq!(d.component_size(0), 4);
        d.rollback(cp);
        assert_eq!(d.components(), 4);
        assert!(d.same(0, 1));
        assert!(!d.same(2, 3));
        assert_eq!(d.component_size(2), 1);
    }

    /// Cyclic Jacobi rotations on a dense symmetric matrix.
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-22 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for row in a.iter_mut() {
                        let (akp, akq) = (row[p], row[q]);
                        row[p] = c * akp - s * akq;
                        row[q] = s * akp + c * akq;
                    }
                    let (row_p, row_q) = (a[p].clone(), a[q].clone());
                    for (k, (apk, aqk)) in row_p.into_iter().zip(row_q).enumerate() {
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn dense_laplacian(p: &Plan) -> Vec<Vec<f64>> {
        let m = p.len();
        let mut l = vec![vec![0.0; m]; m];
        for (i, j, _) in p.links() {
            l[i][j] -= 1.0;
            l[j][i] -= 1.0;
            l[i][i] += 1.0;
            l[j][j] += 1.0;
        }
        l
    }

    #[test]
    fn complete_graph_k4() {
        let k4 = plan(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!((fiedler_value(&k4).unwrap() - 4.0).abs() < 1e-9);
        let oracle = jacobi_eigenvalues(dense_laplacian(&k4));
        assert!((oracle[1] - 4.0).abs() < 1e-9);
        let path = plan(3, &[(0, 1), (1, 2)]);
        let spec = LaplacianView::new(&path).spectrum();
        for (got, want) in spec.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_matches_jacobi_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let m = rng.random_range(2..=9);
            let density = rng.random_range(0.1..0.9);
            let mut p = Plan::empty(m);
            for i in 0..m {
                for j in i + 1..m {
                    if rng.random_bool(density) {
                        p.set(i, j, LinkKind::Hybrid);
                    }
                }
            }
            let got = LaplacianView::new(&p).spectrum();
            let want = jacobi_eigenvalues(dense_laplacian(&p));
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-8, "{got:?} vs {want:?}");
            }
        }
    }
}
