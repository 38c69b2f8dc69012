use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Deterministic generator used throughout the crate.
pub type NetRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> NetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `master`; used to
/// give every experiment trial its own reproducible randomness.
pub fn stream_rng(master: u64, stream: u64) -> NetRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Every directed entry, diagonal included, present with probability
    /// `p_edge`.
    ErdosRenyi { p_edge: f64 },
    /// Directed ring where each node feeds its `k` clockwise successors; each
    /// edge is moved to a fresh random target with probability `beta`.
    WattsStrogatz { k: usize, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEnsembleConfig {
    pub model: GraphModel,
    pub n: usize,
    pub seed: u64,
}

impl GraphEnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("ensemble needs at least one node"));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        match self.model {
            GraphModel::ErdosRenyi { p_edge } if !unit(p_edge) => {
                Err(Error::invalid("edge probability must lie in [0, 1]"))
            }
            GraphModel::WattsStrogatz { beta, .. } if !unit(beta) => {
                Err(Error::invalid("rewiring probability must lie in [0, 1]"))
            }
            GraphModel::WattsStrogatz { k, .. } if k >= self.n => {
                Err(Error::invalid("neighbour count must be smaller than n"))
            }
            _ => Ok(()),
        }
    }

    /// Short ensemble name: `"er"` or `"ws"`.
    pub fn name(&self) -> &'static str {
        match self.model {
            GraphModel::ErdosRenyi { .. } => "er",
            GraphModel::WattsStrogatz { .. } => "ws",
        }
    }

    /// Draws an adjacency matrix from the generator seeded with `self.seed`.
    pub fn generate(&self) -> Result<Matrix> {
        self.generate_with(&mut seeded_rng(self.seed))
    }

    /// Draws an adjacency matrix from `rng`, ignoring `self.seed`.
    pub fn generate_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matrix> {
        self.validate()?;
        Ok(match self.model {
            GraphModel::ErdosRenyi { p_edge } => generate_er(self.n, p_edge, rng),
            GraphModel::WattsStrogatz { k, beta } => generate_ws(self.n, k, beta, rng),
        })
    }
}

/// Directed Erdős–Rényi matrix with standard-normal weights. Entries are
/// visited in row-major order; each consumes one uniform draw and, when
/// present, one normal draw.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p_edge: f64, rng: &mut R) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < p_edge {
                a[(i, j)] = rng.sample(StandardNormal);
            }
        }
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub rewired: bool,
}

/// Edge list of the directed Watts–Strogatz construction.
///
/// Node `i` first gets edges to `i+1, …, i+k (mod n)`, each with a
/// standard-normal weight. A second pass visits the edges in the same order
/// and, with probability `beta`, moves the target to a uniformly chosen node
/// that is neither `i` nor already a target of `i`. Out-degrees stay `k`.
pub fn watts_strogatz_edges<R: Rng + ?Sized>(n: usize, k: usize, beta: f64, rng: &mut R) -> Vec<DirectedEdge> {
    let mut edges = Vec::with_capacity(n * k);
    for source in 0..n {
        for step in 1..=k {
            let weight = rng.sample(StandardNormal);
            edges.push(DirectedEdge { source, target: (source + step) % n, weight, rewired: false });
        }
    }
    for source in 0..n {
        let own = source * k..(source + 1) * k;
        for e in own.clone() {
            if rng.random::<f64>() >= beta {
                continue;
            }
            let taken: Vec<usize> = edges[own.clone()].iter().map(|d| d.target).collect();
            let candidates: Vec<usize> = (0..n).filter(|&t| t != source && !taken.contains(&t)).collect();
            if candidates.is_empty() {
                continue;
            }
            let pick = candidates[rng.random_range(0..candidates.len())];
            edges[e].target = pick;
            edges[e].rewired = true;
        }
    }
    edges
}

/// Directed Watts–Strogatz adjacency matrix: `A[(target, source)] = weight`.
pub fn generate_ws<R: Rng + ?Sized>(n: usize, k: usize, beta: f64, rng: &mut R) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for e in watts_strogatz_edges(n, k, beta, rng) {
        a[(e.target, e.source)] = e.weight;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        let mut rng = seeded_rng(3);
        assert_eq!(generate_er(6, 0.0, &mut rng), Matrix::zeros(6, 6));
        assert!(generate_er(6, 1.0, &mut rng).iter().all(|&x| x != 0.0));
    }

    #[test]
    fn ws_ring_lattice() {
        let a = generate_ws(4, 1, 0.0, &mut seeded_rng(1));
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(a[(i, j)] != 0.0, i == (j + 1) % 4, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn ws_out_degree_preserved() {
        for seed in 0..20 {
            let a = generate_ws(12, 3, 0.5, &mut seeded_rng(seed));
            for j in 0..12 {
                assert_eq!(a.column(j).iter().filter(|&&x| x != 0.0).count(), 3);
                assert_eq!(a[(j, j)], 0.0);
            }
        }
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let cfg = GraphEnsembleConfig { model: GraphModel::WattsStrogatz { k: 3, beta: 0.2 }, n: 30, seed: 9 };
        assert_eq!(cfg.generate().unwrap(), cfg.generate().unwrap());
        let er = GraphEnsembleConfig { model: GraphModel::ErdosRenyi { p_edge: 0.3 }, n: 30, seed: 9 };
        assert_eq!(er.generate().unwrap(), er.generate().unwrap());
        assert_ne!(stream_rng(1, 0).random::<u64>(), stream_rng(1, 1).random::<u64>());
    }

    #[test]
    fn config_validation() {
        let bad = GraphEnsembleConfig { model: GraphModel::WattsStrogatz { k: 5, beta: 0.1 }, n: 5, seed: 0 };
        assert!(bad.validate().is_err());
        let bad = GraphEnsembleConfig { model: GraphModel::ErdosRenyi { p_edge: 1.5 }, n: 5, seed: 0 };
        assert!(bad.generate().is_err());
    }
}
