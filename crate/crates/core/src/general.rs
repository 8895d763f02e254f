//! The general cluster-growth decoder.
//!
//! Every syndrome check starts as its own cluster. While some cluster is
//! invalid, the invalid clusters absorb their full neighbourhood and clusters
//! that now share a vertex are merged. A cluster is valid when the checks it
//! contains can be explained by bits in its interior, which is decided by
//! Gaussian elimination on the local system. The solution found by the last
//! successful validity check is the cluster's correction.
//!
//! Clusters are kept as dense vertex sets and merged by pairwise intersection
//! tests. This is the straightforward representation; the union-find decoder
//! in [`crate::uf`] replaces it with a disjoint-set forest.

use alloc::format;
use alloc::vec::Vec;

use crate::code::{CssCode, Side, TannerGraph, VertexId};
use crate::decoder::{timed, DecodeOutcome};
use crate::error::{Error, Result};
use crate::gf2::{solve_rows, BitVector};

/// Options for [`decode_general`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GeneralOptions {
    /// Keep growing valid clusters while any invalid cluster remains.
    /// Off by default: valid clusters are frozen.
    pub grow_valid: bool,
}

/// A set of Tanner-graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    checks: usize,
    members: BitVector,
}

impl Cluster {
    pub fn empty(g: &TannerGraph) -> Self {
        Self {
            checks: g.check_count(),
            members: BitVector::zeros(g.vertex_count()),
        }
    }

    pub fn from_vertices<I>(g: &TannerGraph, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = VertexId>,
    {
        let mut c = Self::empty(g);
        for v in vertices {
            c.members.set(g.flat(v)?, true);
        }
        Ok(c)
    }

    /// Every vertex of the graph.
    pub fn full(g: &TannerGraph) -> Self {
        Self {
            checks: g.check_count(),
            members: BitVector::ones(g.vertex_count()),
        }
    }

    fn singleton_check(g: &TannerGraph, check: usize) -> Self {
        let mut c = Self::empty(g);
        c.members.set(check, true);
        c
    }

    pub fn len(&self) -> usize {
        self.members.weight()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_zero()
    }

    pub fn contains(&self, g: &TannerGraph, v: VertexId) -> bool {
        g.flat(v).map(|f| self.members.get(f)).unwrap_or(false)
    }

    pub fn vertices(&self, g: &TannerGraph) -> Vec<VertexId> {
        self.members.iter_ones().map(|f| g.vertex(f)).collect()
    }

    /// Check indices in the cluster, ascending.
    pub fn checks(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.checks;
        self.members.iter_ones().take_while(move |&f| f < m)
    }

    /// Bit indices in the cluster, ascending.
    pub fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.checks;
        self.members
            .iter_ones()
            .skip_while(move |&f| f < m)
            .map(move |f| f - m)
    }

    /// Bits whose every check lies in the cluster.
    pub fn interior_bits(&self, g: &TannerGraph) -> Vec<usize> {
        self.bits()
            .filter(|&b| g.bit_checks(b).iter().all(|&c| self.members.get(c)))
            .collect()
    }

    fn absorb(&mut self, other: &Self) {
        self.members.or_assign(&other.members);
    }
}

/// `c ∪ N(c)`.
pub fn grow_cluster(g: &TannerGraph, c: &Cluster) -> Cluster {
    let mut grown = c.clone();
    for v in c.members.iter_ones() {
        for &u in g.flat_neighbours(v) {
            grown.members.set(u, true);
        }
    }
    grown
}

/// Solves the local system of a cluster: rows are the given checks, columns the
/// given interior bits, right-hand side the syndrome on those checks. Returns
/// the bits of one solution.
pub(crate) fn solve_local(
    g: &TannerGraph,
    checks: &[usize],
    interior: &[usize],
    syndrome: &BitVector,
) -> Option<Vec<usize>> {
    let mut rhs = BitVector::zeros(checks.len());
    for (r, &c) in checks.iter().enumerate() {
        if syndrome.get(c) {
            rhs.set(r, true);
        }
    }
    if rhs.is_zero() {
        return Some(Vec::new());
    }
    if interior.is_empty() {
        return None;
    }
    let mut rows = alloc::vec![BitVector::zeros(interior.len()); checks.len()];
    for (t, &b) in interior.iter().enumerate() {
        for c in g.bit_checks(b) {
            // interior bits only touch checks inside the cluster
            let r = checks
                .binary_search(c)
                .expect("interior bit has an outside check");
            rows[r].set(t, true);
        }
    }
    let y = solve_rows(&rows, interior.len(), &rhs)?;
    Some(y.iter_ones().map(|t| interior[t]).collect())
}

fn check_syndrome_len(code: &CssCode, side: Side, syndrome: &BitVector) -> Result<()> {
    let m = code.tanner(side).check_count();
    if syndrome.len() != m {
        return Err(Error::DimensionMismatch {
            op: "syndrome",
            expected: m,
            found: syndrome.len(),
        });
    }
    Ok(())
}

fn cluster_solution(g: &TannerGraph, c: &Cluster, syndrome: &BitVector) -> Option<Vec<usize>> {
    let checks: Vec<usize> = c.checks().collect();
    let interior = c.interior_bits(g);
    solve_local(g, &checks, &interior, syndrome)
}

/// True iff the syndrome on the cluster's checks is explained by some set of
/// interior bits.
pub fn is_valid_cluster(
    code: &CssCode,
    side: Side,
    c: &Cluster,
    syndrome: &BitVector,
) -> Result<bool> {
    check_syndrome_len(code, side, syndrome)?;
    Ok(cluster_solution(code.tanner(side), c, syndrome).is_some())
}

/// A correction supported on the cluster's interior that reproduces the
/// syndrome on the cluster's checks.
pub fn local_correction(
    code: &CssCode,
    side: Side,
    c: &Cluster,
    syndrome: &BitVector,
) -> Result<BitVector> {
    check_syndrome_len(code, side, syndrome)?;
    let bits = cluster_solution(code.tanner(side), c, syndrome).ok_or(Error::InvalidCluster)?;
    Ok(BitVector::from_support(code.n(), &bits))
}

#[derive(Clone, Debug)]
enum Status {
    Dirty,
    Invalid,
    Valid(Vec<usize>),
}

/// Decodes `syndrome` (measured by the syndrome matrix of `side`).
pub fn decode_general(
    code: &CssCode,
    side: Side,
    syndrome: &BitVector,
    opts: &GeneralOptions,
) -> Result<DecodeOutcome> {
    check_syndrome_len(code, side, syndrome)?;
    let (outcome, elapsed) = timed(|| run(code, side, syndrome, opts));
    Ok(DecodeOutcome { elapsed, ..outcome })
}

fn run(code: &CssCode, side: Side, syndrome: &BitVector, opts: &GeneralOptions) -> DecodeOutcome {
    let g = code.tanner(side);
    let mut clusters: Vec<Cluster> = syndrome
        .iter_ones()
        .map(|c| Cluster::singleton_check(g, c))
        .collect();
    let mut status: Vec<Status> = alloc::vec![Status::Dirty; clusters.len()];
    let mut growth_steps = 0;
    let mut diagnostic = None;

    loop {
        for (c, st) in clusters.iter().zip(status.iter_mut()) {
            if matches!(st, Status::Dirty) {
                *st = match cluster_solution(g, c, syndrome) {
                    Some(bits) => Status::Valid(bits),
                    None => Status::Invalid,
                };
            }
        }
        if !status.iter().any(|s| matches!(s, Status::Invalid)) {
            break;
        }

        let mut invalid_grew = false;
        for (c, st) in clusters.iter_mut().zip(status.iter_mut()) {
            let invalid = matches!(st, Status::Invalid);
            if !invalid && !opts.grow_valid {
                continue;
            }
            let grown = grow_cluster(g, c);
            if grown != *c {
                invalid_grew |= invalid;
                *c = grown;
                *st = Status::Dirty;
            }
        }
        if !invalid_grew {
            // every invalid cluster is a closed component with no local solution
            diagnostic = Some(format!(
                "syndrome is inconsistent: {} closed cluster(s) admit no correction",
                status
                    .iter()
                    .filter(|s| matches!(s, Status::Invalid))
                    .count()
            ));
            break;
        }
        growth_steps += 1;
        merge_overlapping(&mut clusters, &mut status);
    }

    let converged = diagnostic.is_none();
    let mut estimate = BitVector::zeros(code.n());
    if converged {
        for st in &status {
            if let Status::Valid(bits) = st {
                for &b in bits {
                    estimate.flip(b);
                }
            }
        }
    }
    DecodeOutcome {
        estimate,
        growth_steps,
        converged,
        elapsed: Default::default(),
        diagnostic,
    }
}

fn merge_overlapping(clusters: &mut Vec<Cluster>, status: &mut Vec<Status>) {
    let mut i = 0;
    while i < clusters.len() {
        let mut j = i + 1;
        let mut merged = false;
        while j < clusters.len() {
            if clusters[i].members.intersects(&clusters[j].members) {
                let other = clusters.remove(j);
                status.remove(j);
                clusters[i].absorb(&other);
                merged = true;
                // the union may now touch clusters already passed over
                j = i + 1;
            } else {
                j += 1;
            }
        }
        if merged {
            status[i] = Status::Dirty;
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{steane, toric_code};
    use crate::gf2::RowspaceBasis;
    use alloc::collections::VecDeque;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    fn syndrome_of(code: &CssCode, bits: &[usize]) -> BitVector {
        code.syndrome(Side::X, &BitVector::from_support(code.n(), bits))
            .unwrap()
    }

    fn decode(code: &CssCode, s: &BitVector) -> DecodeOutcome {
        decode_general(code, Side::X, s, &GeneralOptions::default()).unwrap()
    }

    #[test]
    fn zero_syndrome_needs_no_growth() {
        let code = toric_code(3).unwrap();
        let out = decode(&code, &BitVector::zeros(9));
        assert!(out.converged);
        assert!(out.estimate.is_zero());
        assert_eq!(out.growth_steps, 0);
    }

    #[test]
    fn steane_single_check_example() {
        let code = steane();
        let out = decode(&code, &"010".parse().unwrap());
        assert!(out.converged);
        assert_eq!(out.estimate.support(), vec![1]);
        assert_eq!(out.growth_steps, 1);
    }

    #[test]
    fn grow_examples() {
        let code = steane();
        let g = code.tanner_z();
        let c = Cluster::from_vertices(g, [VertexId::Check(1)]).unwrap();
        let grown = grow_cluster(g, &c);
        let expected = Cluster::from_vertices(
            g,
            [
                VertexId::Check(1),
                VertexId::Bit(1),
                VertexId::Bit(3),
                VertexId::Bit(4),
                VertexId::Bit(6),
            ],
        )
        .unwrap();
        assert_eq!(grown, expected);

        let full = Cluster::full(g);
        assert_eq!(grow_cluster(g, &full), full);

        let toric = toric_code(2).unwrap();
        let tg = toric.tanner_z();
        let one = Cluster::from_vertices(tg, [VertexId::Check(0)]).unwrap();
        let grown = grow_cluster(tg, &one);
        assert_eq!(grown.len(), 5);
        assert_eq!(grown.bits().count(), 4);
    }

    #[test]
    fn validity_examples() {
        let code = steane();
        let g = code.tanner_z();
        let s: BitVector = "010".parse().unwrap();

        let quiet = Cluster::from_vertices(g, [VertexId::Check(0), VertexId::Bit(0)]).unwrap();
        assert!(is_valid_cluster(&code, Side::X, &quiet, &s).unwrap());
        assert!(local_correction(&code, Side::X, &quiet, &s)
            .unwrap()
            .is_zero());

        let lone = Cluster::from_vertices(g, [VertexId::Check(1)]).unwrap();
        assert!(!is_valid_cluster(&code, Side::X, &lone, &s).unwrap());
        assert_eq!(
            local_correction(&code, Side::X, &lone, &s),
            Err(Error::InvalidCluster)
        );

        let grown = grow_cluster(g, &lone);
        assert!(is_valid_cluster(&code, Side::X, &grown, &s).unwrap());
        assert_eq!(
            local_correction(&code, Side::X, &grown, &s)
                .unwrap()
                .support(),
            vec![1]
        );
    }

    #[test]
    fn random_valid_clusters_on_toric() {
        let code = toric_code(4).unwrap();
        let g = code.tanner_z();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let err: Vec<usize> = (0..code.n()).filter(|_| rng.gen_bool(0.1)).collect();
            let s = syndrome_of(&code, &err);
            let start: Vec<VertexId> = (0..g.vertex_count())
                .filter(|_| rng.gen_bool(0.2))
                .map(|v| g.vertex(v))
                .collect();
            let mut c = Cluster::from_vertices(g, start).unwrap();
            for _ in 0..rng.gen_range(0..3) {
                c = grow_cluster(g, &c);
            }
            if !is_valid_cluster(&code, Side::X, &c, &s).unwrap() {
                continue;
            }
            let y = local_correction(&code, Side::X, &c, &s).unwrap();
            let interior = c.interior_bits(g);
            assert!(y.iter_ones().all(|b| interior.contains(&b)));
            let sy = code.syndrome(Side::X, &y).unwrap();
            for check in 0..g.check_count() {
                let inside = c.members.get(check);
                assert_eq!(sy.get(check), inside && s.get(check));
            }
            checked += 1;
        }
    }

    #[test]
    fn inconsistent_syndrome_does_not_converge() {
        // every toric syndrome has even weight; a single check flip cannot be explained
        let code = toric_code(3).unwrap();
        let out = decode(&code, &BitVector::unit(9, 4));
        assert!(!out.converged);
        assert!(out.diagnostic.is_some());
    }

    #[test]
    fn rejects_bad_syndrome_length() {
        let code = steane();
        assert!(decode_general(&code, Side::X, &BitVector::zeros(4), &Default::default()).is_err());
    }

    #[test]
    fn corrects_every_single_error() {
        for l in [3, 4, 5] {
            let code = toric_code(l).unwrap();
            let stab = RowspaceBasis::new(code.hx());
            for j in 0..code.n() {
                let s = syndrome_of(&code, &[j]);
                let out = decode(&code, &s);
                assert!(out.converged);
                assert_eq!(code.syndrome(Side::X, &out.estimate).unwrap(), s);
                let mut residual = out.estimate.clone();
                residual.flip(j);
                assert!(stab.contains(&residual).unwrap(), "toric({l}) bit {j}");
            }
        }
    }

    fn diameter(g: &TannerGraph) -> usize {
        let mut best = 0;
        for src in 0..g.vertex_count() {
            let mut dist = vec![usize::MAX; g.vertex_count()];
            dist[src] = 0;
            let mut q = VecDeque::from([src]);
            while let Some(v) = q.pop_front() {
                for &u in g.flat_neighbours(v) {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        q.push_back(u);
                    }
                }
            }
            best = best.max(dist.into_iter().filter(|&d| d != usize::MAX).max().unwrap());
        }
        best
    }

    #[test]
    fn sound_and_bounded_on_random_errors() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for (code, p) in [(steane(), 0.3), (toric_code(4).unwrap(), 0.1)] {
            let bound = diameter(code.tanner_z()) + 1;
            for grow_valid in [false, true] {
                let opts = GeneralOptions { grow_valid };
                for _ in 0..300 {
                    let err: Vec<usize> = (0..code.n()).filter(|_| rng.gen_bool(p)).collect();
                    let s = syndrome_of(&code, &err);
                    let out = decode_general(&code, Side::X, &s, &opts).unwrap();
                    assert!(out.converged);
                    assert_eq!(code.syndrome(Side::X, &out.estimate).unwrap(), s);
                    assert!(out.growth_steps <= bound);
                }
            }
        }
    }

    #[test]
    fn merged_clusters_are_disjoint() {
        let code = toric_code(5).unwrap();
        let g = code.tanner_z();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let mut clusters: Vec<Cluster> = (0..g.check_count())
                .filter(|_| rng.gen_bool(0.3))
                .map(|c| grow_cluster(g, &Cluster::singleton_check(g, c)))
                .collect();
            let before = clusters.iter().fold(Cluster::empty(g), |mut acc, c| {
                acc.absorb(c);
                acc
            });
            let mut status = vec![Status::Invalid; clusters.len()];
            merge_overlapping(&mut clusters, &mut status);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    assert!(!clusters[i].members.intersects(&clusters[j].members));
                }
            }
            let after = clusters.iter().fold(Cluster::empty(g), |mut acc, c| {
                acc.absorb(c);
                acc
            });
            assert_eq!(before, after);
        }
    }
}
