//! Bipartite graphs between finite probability spaces: neighbourhoods,
//! the preimage operator `e⁻¹`, the G-transform and the sandwich bound
//! `μ(e⁻¹(B)) ≤ G(μ)(B) ≤ μ(e(B))`.

use crate::enumeration::EdgeList;
use crate::error::{Error, Result};

/// Tolerance for a measure's total mass.
pub const MASS_TOL: f64 = 1e-12;

/// A probability measure on `{0, ..., n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure {
    weights: Vec<f64>,
}

/// Allowed deviation of the total mass from one for `n` weights: `MASS_TOL`,
/// widened to the worst-case rounding error of summing `n` terms.
pub fn mass_tolerance(n: usize) -> f64 {
    MASS_TOL.max(4.0 * n as f64 * f64::EPSILON)
}

impl FiniteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("measure on an empty set"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {w} is not a nonnegative number")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > mass_tolerance(weights.len()) {
            return Err(Error::InvalidMeasure(format!("total mass {total} differs from 1")));
        }
        Ok(FiniteMeasure { weights })
    }

    /// Normalises nonnegative weights with positive total.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure(format!("cannot normalise total mass {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        FiniteMeasure::new(weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("measure on an empty set"));
        }
        Ok(FiniteMeasure { weights: vec![1.0 / n as f64; n] })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mass of a set of points (duplicates counted once).
    pub fn mass(&self, set: &[usize]) -> f64 {
        let mut seen = vec![false; self.weights.len()];
        set.iter()
            .filter(|&&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
            .map(|&i| self.weights[i])
            .sum()
    }

    /// Mass of the points flagged in `mask`.
    pub fn mass_of_mask(&self, mask: &[bool]) -> f64 {
        self.weights.iter().zip(mask).filter(|(_, &m)| m).map(|(w, _)| w).sum()
    }
}

/// A vertex of a bipartite graph, on the `X` or the `Y` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    X(usize),
    Y(usize),
}

/// Compressed adjacency of one side: neighbours and multiplicities.
#[derive(Clone, Debug, Default, PartialEq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    mult: Vec<u32>,
}

impl Adjacency {
    fn build(n: usize, mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable();
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::new();
        let mut mult: Vec<u32> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for p in pairs {
            if last == Some(p) {
                *mult.last_mut().expect("previous edge") += 1;
            } else {
                offsets[p.0 as usize + 1] += 1;
                targets.push(p.1);
                mult.push(1);
                last = Some(p);
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Adjacency { offsets, targets, mult }
    }

    fn range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    fn degree(&self, v: usize) -> u64 {
        self.mult[self.range(v)].iter().map(|&m| m as u64).sum()
    }
}

/// A finite bipartite multigraph `G ⊂ X × Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph {
    nx: usize,
    ny: usize,
    from_x: Adjacency,
    from_y: Adjacency,
}

impl BipartiteGraph {
    /// Builds the graph from an edge multiset; repeated pairs add multiplicity.
    pub fn new(nx: usize, ny: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(x, y) in edges {
            if x >= nx {
                return Err(Error::UnknownVertex(x));
            }
            if y >= ny {
                return Err(Error::UnknownVertex(y));
            }
        }
        let xy: Vec<(u32, u32)> = edges.iter().map(|&(x, y)| (x as u32, y as u32)).collect();
        let yx: Vec<(u32, u32)> = xy.iter().map(|&(x, y)| (y, x)).collect();
        Ok(BipartiteGraph { nx, ny, from_x: Adjacency::build(nx, xy), from_y: Adjacency::build(ny, yx) })
    }

    /// The modular graph `G_N`: cosets on the `X` side, classes on `Y`, one
    /// edge per `(x, y, k)` triple.
    pub fn from_edge_list(g: &EdgeList) -> Self {
        let xy: Vec<(u32, u32)> = g.edges.iter().map(|e| (e.x, e.y)).collect();
        let yx: Vec<(u32, u32)> = xy.iter().map(|&(x, y)| (y, x)).collect();
        BipartiteGraph {
            nx: g.cosets.len(),
            ny: g.classes.len(),
            from_x: Adjacency::build(g.cosets.len(), xy),
            from_y: Adjacency::build(g.classes.len(), yx),
        }
    }

    pub fn x_len(&self) -> usize {
        self.nx
    }

    pub fn y_len(&self) -> usize {
        self.ny
    }

    fn check(&self, v: Vertex) -> Result<()> {
        match v {
            Vertex::X(i) if i >= self.nx => Err(Error::UnknownVertex(i)),
            Vertex::Y(i) if i >= self.ny => Err(Error::UnknownVertex(i)),
            _ => Ok(()),
        }
    }

    /// The neighbour set `e(v)`, sorted.
    pub fn neighbors(&self, v: Vertex) -> Result<Vec<usize>> {
        self.check(v)?;
        let (adj, i) = match v {
            Vertex::X(i) => (&self.from_x, i),
            Vertex::Y(i) => (&self.from_y, i),
        };
        Ok(adj.targets[adj.range(i)].iter().map(|&t| t as usize).collect())
    }

    /// Degree with multiplicity.
    pub fn degree(&self, v: Vertex) -> Result<u64> {
        self.check(v)?;
        Ok(match v {
            Vertex::X(i) => self.from_x.degree(i),
            Vertex::Y(i) => self.from_y.degree(i),
        })
    }

    fn mask(n: usize, set: &[usize]) -> Result<Vec<bool>> {
        let mut m = vec![false; n];
        for &i in set {
            if i >= n {
                return Err(Error::UnknownVertex(i));
            }
            m[i] = true;
        }
        Ok(m)
    }

    fn from_mask(mask: &[bool]) -> Vec<usize> {
        mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
    }

    /// `e(B) ⊆ X` for `B ⊆ Y`, as a mask.
    fn e_of_y_mask(&self, b: &[bool]) -> Vec<bool> {
        let mut out = vec![false; self.nx];
        for (y, _) in b.iter().enumerate().filter(|(_, &m)| m) {
            for &x in &self.from_y.targets[self.from_y.range(y)] {
                out[x as usize] = true;
            }
        }
        out
    }

    /// `e⁻¹(B) = {x : deg x ≥ 1, e(x) ⊆ B}` for `B ⊆ Y`, as a mask.
    fn e_inverse_mask(&self, b: &[bool]) -> Vec<bool> {
        (0..self.nx)
            .map(|x| {
                let r = self.from_x.range(x);
                !r.is_empty() && self.from_x.targets[r].iter().all(|&y| b[y as usize])
            })
            .collect()
    }

    /// The neighbourhood `e(B) ⊆ X` of a set `B ⊆ Y`.
    pub fn neighborhood_of_y_set(&self, b: &[usize]) -> Result<Vec<usize>> {
        Ok(Self::from_mask(&self.e_of_y_mask(&Self::mask(self.ny, b)?)))
    }

    /// `e⁻¹(B)` for `B ⊆ Y`: the non-isolated `x` all of whose neighbours lie in `B`.
    pub fn e_inverse(&self, b: &[usize]) -> Result<Vec<usize>> {
        Ok(Self::from_mask(&self.e_inverse_mask(&Self::mask(self.ny, b)?)))
    }

    /// The G-transform `G(μ)(y) = Σ_{x ∈ e(y)} m(x, y) μ(x) / deg(x)`.
    pub fn g_transform(&self, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
        if mu.len() != self.nx {
            return Err(Error::InvalidMeasure(format!("measure on {} points, graph has {}", mu.len(), self.nx)));
        }
        let mut out = vec![0.0; self.ny];
        for x in 0..self.nx {
            let w = mu.weights[x];
            if w == 0.0 {
                continue;
            }
            let deg = self.from_x.degree(x);
            if deg == 0 {
                return Err(Error::IsolatedMass(x));
            }
            let share = w / deg as f64;
            for i in self.from_x.range(x) {
                out[self.from_x.targets[i] as usize] += share * self.from_x.mult[i] as f64;
            }
        }
        FiniteMeasure::new(out)
    }

    /// `(μ(e⁻¹(B)), G(μ)(B), μ(e(B)))` for `B ⊆ Y`.
    pub fn sandwich_check(&self, mu: &FiniteMeasure, b: &[usize]) -> Result<Sandwich> {
        let g = self.g_transform(mu)?;
        let mask = Self::mask(self.ny, b)?;
        Ok(self.sandwich_with(mu, &g, &mask))
    }

    /// Sandwich values with a precomputed transform and a mask on `Y`.
    pub fn sandwich_with(&self, mu: &FiniteMeasure, g: &FiniteMeasure, mask: &[bool]) -> Sandwich {
        Sandwich {
            lower: mu.mass_of_mask(&self.e_inverse_mask(mask)),
            value: g.mass_of_mask(mask),
            upper: mu.mass_of_mask(&self.e_of_y_mask(mask)),
        }
    }
}

/// The three quantities of the sandwich bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.value + tol && self.value <= self.upper + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_built() -> BipartiteGraph {
        BipartiteGraph::new(3, 2, &[(0, 0), (0, 1), (1, 0), (2, 1)]).unwrap()
    }

    #[test]
    fn hand_built_examples() {
        let g = hand_built();
        assert_eq!(g.neighbors(Vertex::Y(0)).unwrap(), vec![0, 1]);
        assert_eq!(g.e_inverse(&[0]).unwrap(), vec![1]);
        let mu = FiniteMeasure::uniform(3).unwrap();
        let t = g.g_transform(&mu).unwrap();
        assert!((t.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn isolated_mass_is_rejected() {
        let g = BipartiteGraph::new(2, 1, &[(0, 0)]).unwrap();
        let mu = FiniteMeasure::uniform(2).unwrap();
        assert!(matches!(g.g_transform(&mu), Err(Error::IsolatedMass(1))));
        let mu = FiniteMeasure::new(vec![1.0, 0.0]).unwrap();
        assert!(g.g_transform(&mu).is_ok());
    }

    #[test]
    fn multiplicity_enters_degree_and_transform() {
        let g = BipartiteGraph::new(1, 2, &[(0, 0), (0, 0), (0, 1)]).unwrap();
        assert_eq!(g.degree(Vertex::X(0)).unwrap(), 3);
        let t = g.g_transform(&FiniteMeasure::uniform(1).unwrap()).unwrap();
        assert!((t.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn measure_validation() {
        assert!(FiniteMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteMeasure::new(vec![-0.5, 1.5]).is_err());
        assert!(FiniteMeasure::normalized(vec![1.0, 3.0]).is_ok());
    }
}
