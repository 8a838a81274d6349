//! Separable and maximal separable node sets.

mod grid;
mod index;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

pub use grid::probe_grid;
pub(crate) use index::SpatialIndex;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Site, SpherePoint};
use crate::rng::derive_seed;

/// Slack allowed in separation and covering comparisons.
pub const SEPARATION_TOL: f64 = 1e-12;

/// Default probe resolution (probes per `ε`-length) for maximality checks.
pub const DEFAULT_PROBE_RESOLUTION: usize = 4;

/// Candidate-pool resolution used by the greedy construction.
const POOL_RESOLUTION: usize = 4;

/// A node set `Λ` in a cap or collar, with the separation target
/// `ε = δ/n` it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    pub domain: Domain,
    pub points: Vec<SpherePoint>,
    pub epsilon: f64,
    pub degree: usize,
    pub delta: f64,
    pub seed: u64,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("separation must be positive and finite, got {epsilon}")))
    }
}

fn sites(domain: &Domain, points: &[SpherePoint]) -> Result<Vec<Site>> {
    points
        .iter()
        .map(|p| {
            if p.dim() != domain.dim() {
                return Err(Error::DimensionMismatch { expected: domain.dim(), got: p.dim() });
            }
            domain.site(p)
        })
        .collect()
}

fn index_of(sites: &[Site], cell: f64) -> SpatialIndex {
    SpatialIndex::new(sites.iter().map(|s| s.c).collect(), cell)
}

/// True iff all pairwise metric distances are at least `ε − 1e-12`.
pub fn is_separable(domain: &Domain, points: &[SpherePoint], epsilon: f64) -> Result<bool> {
    let s = sites(domain, points)?;
    if epsilon <= SEPARATION_TOL {
        return Ok(true);
    }
    let idx = index_of(&s, domain.chord_bound(epsilon));
    let radius = domain.chord_bound(epsilon);
    let bad = (0..s.len()).into_par_iter().any(|i| {
        let mut hit = false;
        idx.for_each_within(&s[i].c, radius, |j| {
            if j > i && domain.site_metric(&s[i], &s[j]) < epsilon - SEPARATION_TOL {
                hit = true;
            }
        });
        hit
    });
    Ok(!bad)
}

/// Indices of probe points not within `radius` of any node.
fn uncovered(domain: &Domain, nodes: &[Site], probes: &[Site], radius: f64) -> Vec<usize> {
    let idx = index_of(nodes, domain.chord_bound(radius));
    let chord = domain.chord_bound(radius);
    (0..probes.len())
        .into_par_iter()
        .filter(|&i| {
            let mut hit = false;
            idx.for_each_within(&probes[i].c, chord, |j| {
                if !hit && domain.site_metric(&probes[i], &nodes[j]) <= radius + SEPARATION_TOL {
                    hit = true;
                }
            });
            !hit
        })
        .collect()
}

/// Separable, and every point of the phase-0 probe grid at
/// `probe_resolution` probes per `ε` is within `ε` of a node.
pub fn is_maximal_separable(
    domain: &Domain,
    points: &[SpherePoint],
    epsilon: f64,
    probe_resolution: usize,
) -> Result<bool> {
    check_epsilon(epsilon)?;
    if probe_resolution < DEFAULT_PROBE_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "probe resolution must be at least {DEFAULT_PROBE_RESOLUTION}, got {probe_resolution}"
        )));
    }
    if !is_separable(domain, points, epsilon)? {
        return Ok(false);
    }
    if points.is_empty() {
        return Ok(false);
    }
    let nodes = sites(domain, points)?;
    let probes = probe_sites(domain, epsilon, probe_resolution, 0.0);
    Ok(uncovered(domain, &nodes, &probes, epsilon).is_empty())
}

fn probe_sites(domain: &Domain, epsilon: f64, resolution: usize, phase: f64) -> Vec<Site> {
    probe_grid(domain, epsilon, resolution, phase).iter().map(|p| domain.site_unchecked(p)).collect()
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Farthest-point insertion over `cands`, starting from candidate 0, until
/// the largest distance to the chosen set drops below `epsilon`. Ties go
/// to the lowest candidate index.
fn farthest_point_insertion(domain: &Domain, cands: &[Site], epsilon: f64) -> Vec<usize> {
    if cands.is_empty() {
        return Vec::new();
    }
    let idx = index_of(cands, domain.chord_bound(epsilon));
    let first = cands[0];
    let mut dist: Vec<f64> = cands.par_iter().map(|s| domain.site_metric(&first, s)).collect();
    dist[0] = 0.0;
    let mut chosen = vec![0];
    let mut heap: BinaryHeap<Entry> =
        dist.iter().enumerate().filter(|(_, d)| **d >= epsilon).map(|(idx, &dist)| Entry { dist, idx }).collect();
    while let Some(Entry { dist: d, idx: j }) = heap.pop() {
        if dist[j] < d {
            if dist[j] >= epsilon {
                heap.push(Entry { dist: dist[j], idx: j });
            }
            continue;
        }
        chosen.push(j);
        dist[j] = 0.0;
        let q = cands[j];
        idx.for_each_within(&q.c, domain.chord_bound(d), |k| {
            let m = domain.site_metric(&q, &cands[k]);
            if m < dist[k] {
                dist[k] = m;
            }
        });
    }
    chosen
}

/// Adds every probe that is farther than `epsilon` from all current nodes,
/// scanning probes in order.
fn complete_on_probes(domain: &Domain, nodes: &mut Vec<SpherePoint>, epsilon: f64) {
    let probes = probe_grid(domain, epsilon, DEFAULT_PROBE_RESOLUTION, 0.0);
    let mut node_sites: Vec<Site> = nodes.iter().map(|p| domain.site_unchecked(p)).collect();
    let probe_sites: Vec<Site> = probes.iter().map(|p| domain.site_unchecked(p)).collect();
    let gaps = uncovered(domain, &node_sites, &probe_sites, epsilon);
    if gaps.is_empty() {
        return;
    }
    let chord = domain.chord_bound(epsilon);
    let mut idx = index_of(&node_sites, chord);
    for i in gaps {
        let s = probe_sites[i];
        let mut hit = false;
        idx.for_each_within(&s.c, chord, |j| {
            if !hit && domain.site_metric(&s, &node_sites[j]) <= epsilon + SEPARATION_TOL {
                hit = true;
            }
        });
        if !hit {
            idx.insert(s.c);
            node_sites.push(s);
            nodes.push(probes[i]);
        }
    }
}

/// Greedy maximal `(ε, ρ)`-separable set. The seed rotates the candidate
/// pool azimuthally; the output is deterministic for a fixed seed.
pub fn greedy_maximal_set(domain: &Domain, epsilon: f64, seed: u64) -> Result<NodeSet> {
    check_epsilon(epsilon)?;
    let phase = (derive_seed(seed, 0x706f6f6c) >> 11) as f64 / (1u64 << 53) as f64;
    let pool = probe_grid(domain, epsilon, POOL_RESOLUTION, phase);
    let cands: Vec<Site> = pool.iter().map(|p| domain.site_unchecked(p)).collect();
    let chosen = farthest_point_insertion(domain, &cands, epsilon);
    let mut points: Vec<SpherePoint> = chosen.into_iter().map(|i| pool[i]).collect();
    complete_on_probes(domain, &mut points, epsilon);
    Ok(NodeSet { domain: *domain, points, epsilon, degree: 1, delta: epsilon, seed })
}

/// Maximal `(δ/n)`-separable set for degree `n`.
pub fn maximal_set_for(domain: &Domain, degree: usize, delta: f64, seed: u64) -> Result<NodeSet> {
    if degree == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    let mut set = greedy_maximal_set(domain, delta / degree as f64, seed)?;
    set.degree = degree;
    set.delta = delta;
    Ok(set)
}

/// Largest number of metric balls of radius `radius` around `points` that
/// contain a common probe, over a probe grid plus the points themselves.
fn max_ball_count(domain: &Domain, points: &[SpherePoint], radius: f64, probe_res: usize) -> Result<usize> {
    check_epsilon(radius)?;
    let nodes = sites(domain, points)?;
    if nodes.is_empty() {
        return Ok(0);
    }
    let mut probes = probe_sites(domain, radius, probe_res.max(1), 0.0);
    probes.extend(nodes.iter().copied());
    let chord = domain.chord_bound(radius);
    let idx = index_of(&nodes, chord);
    Ok(probes
        .par_iter()
        .map(|p| {
            let mut count = 0;
            idx.for_each_within(&p.c, chord, |j| {
                if domain.site_metric(p, &nodes[j]) <= radius + SEPARATION_TOL {
                    count += 1;
                }
            });
            count
        })
        .max()
        .unwrap_or(0))
}

/// `max_x Σ_ω χ_{B(ω, βε)}(x)` over probe points.
pub fn covering_multiplicity(domain: &Domain, nodes: &NodeSet, beta: f64, probes: usize) -> Result<usize> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be at least 1, got {beta}")));
    }
    max_ball_count(domain, &nodes.points, beta * nodes.epsilon, probes)
}

/// `τ = max_x #(Λ ∩ B(x, 1/n))` over probe points.
pub fn tau_statistic(domain: &Domain, points: &[SpherePoint], n: usize, probes: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    max_ball_count(domain, points, 1.0 / n as f64, probes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Cap, Collar};

    fn cap(alpha: f64) -> Domain {
        Cap::north(2, alpha).unwrap().into()
    }

    #[test]
    fn separability_examples() {
        let d = cap(1.0);
        let e = SpherePoint::north_pole(2).unwrap();
        assert!(is_separable(&d, &[], 0.5).unwrap());
        assert!(is_separable(&d, &[e], 0.5).unwrap());
        assert!(!is_separable(&d, &[e, e], 1e-6).unwrap());
        let out = SpherePoint::from_polar(2, 1.5, 0.0).unwrap();
        assert!(is_separable(&d, &[out], 0.1).is_err());
    }

    #[test]
    fn maximality_examples() {
        let d = cap(1.0);
        let e = SpherePoint::north_pole(2).unwrap();
        assert!(is_maximal_separable(&d, &[e], 2.0, 4).unwrap());
        assert!(!is_maximal_separable(&d, &[e], 0.01, 4).unwrap());
        assert!(is_maximal_separable(&d, &[e], 2.0, 3).is_err());
    }

    #[test]
    fn greedy_is_maximal_and_deterministic() {
        let doms = vec![
            cap(1.0),
            Cap::new(SpherePoint::new(&[1.0, 2.0, -0.5]).unwrap(), 0.3).unwrap().into(),
            Collar::north(2, 0.5, 1.0).unwrap().into(),
            Cap::north(1, 0.5).unwrap().into(),
            Collar::north(1, 0.3, 1.3).unwrap().into(),
        ];
        for d in doms {
            for seed in [0, 9] {
                let eps = 0.125;
                let s = greedy_maximal_set(&d, eps, seed).unwrap();
                assert!(is_separable(&d, &s.points, eps).unwrap());
                assert!(is_maximal_separable(&d, &s.points, eps, 4).unwrap());
                assert_eq!(s, greedy_maximal_set(&d, eps, seed).unwrap());
            }
        }
    }

    #[test]
    fn large_epsilon_gives_single_point() {
        let d = cap(2.0);
        let s = greedy_maximal_set(&d, 3.0, 1).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.points[0].chordal(d.center()) < 1e-15);
    }

    #[test]
    fn covering_and_tau_examples() {
        let d = cap(1.0);
        let e = SpherePoint::north_pole(2).unwrap();
        let single = NodeSet { domain: d, points: vec![e], epsilon: 0.1, degree: 10, delta: 1.0, seed: 0 };
        assert_eq!(covering_multiplicity(&d, &single, 1.0, 4).unwrap(), 1);
        assert_eq!(tau_statistic(&d, &[e], 8, 4).unwrap(), 1);
        let p = SpherePoint::from_polar(2, 0.4, 1.0).unwrap();
        assert_eq!(tau_statistic(&d, &[p, p, p, e], 8, 4).unwrap(), 3);
        let s = maximal_set_for(&d, 8, 0.5, 0).unwrap();
        let m1 = covering_multiplicity(&d, &s, 1.0, 4).unwrap();
        let m2 = covering_multiplicity(&d, &s, 2.0, 4).unwrap();
        assert!(m1 >= 1 && m2 >= m1);
    }
}
