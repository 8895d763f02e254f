use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use qldpc_core::{
    decode_general, decode_uf, toric_code, BitMatrix, BitVector, CssCode, GeneralOptions,
    GrowthStrategy, Side, TannerGraph, UfOptions, UnionFindForest, VertexId,
};

fn bits(len: usize) -> impl Strategy<Value = BitVector> {
    proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bools(&b))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(bits(c), r)
            .prop_map(move |rows| BitMatrix::from_rows(c, rows).unwrap())
    })
}

fn sparse_error(n: usize) -> impl Strategy<Value = BitVector> {
    proptest::collection::vec(0..n, 0..=n / 8).prop_map(move |s| {
        let mut v = BitVector::zeros(n);
        for j in s {
            v.flip(j);
        }
        v
    })
}

fn diameter(g: &TannerGraph) -> usize {
    let nv = g.vertex_count();
    let mut best = 0;
    for s in 0..nv {
        let mut dist = vec![usize::MAX; nv];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.flat_neighbours(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        best = best.max(
            dist.into_iter()
                .filter(|&d| d != usize::MAX)
                .max()
                .unwrap_or(0),
        );
    }
    best
}

const STRATEGIES: [GrowthStrategy; 3] = [
    GrowthStrategy::All,
    GrowthStrategy::SmallestSingle,
    GrowthStrategy::RandomSingle,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_returns_solutions(a in matrix(40, 60), seed in any::<u64>()) {
        let x0 = BitVector::from_support(a.cols(), &[(seed as usize) % a.cols()]);
        let b = a.mul_vec(&x0).unwrap();
        let x = a.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
    }

    #[test]
    fn rank_is_transpose_invariant(a in matrix(30, 30)) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn interior_is_pointwise(mask in bits(7 + 3)) {
        let code = qldpc_core::steane();
        let g = code.tanner_z();
        let w: BTreeSet<VertexId> = (0..g.vertex_count())
            .filter(|&f| mask.get(f))
            .map(|f| g.vertex(f))
            .collect();
        let int = g.interior(&w);
        for v in (0..g.vertex_count()).map(|f| g.vertex(f)) {
            let inside = g.neighbours(v).unwrap().iter().all(|u| w.contains(u));
            prop_assert_eq!(int.contains(&v), w.contains(&v) && inside);
        }
    }

    #[test]
    fn decoders_are_sound_on_toric(l in 3usize..=6, seed in any::<u64>(), e in sparse_error(72)) {
        let code = toric_code(l).unwrap();
        let n = code.n();
        let error = BitVector::from_support(n, &e.iter_ones().filter(|&j| j < n).collect::<Vec<_>>());
        let s = code.syndrome(Side::X, &error).unwrap();

        let gd = decode_general(&code, Side::X, &s, &GeneralOptions::default()).unwrap();
        prop_assert!(gd.converged);
        prop_assert_eq!(code.syndrome(Side::X, &gd.estimate).unwrap(), s.clone());
        prop_assert!(gd.growth_steps <= diameter(code.tanner_z()) + 1);

        for strategy in STRATEGIES {
            let opts = UfOptions { strategy, ..Default::default() };
            let out = decode_uf(&code, Side::X, &s, &opts, seed).unwrap();
            if out.converged {
                prop_assert_eq!(code.syndrome(Side::X, &out.estimate).unwrap(), s.clone());
            } else {
                prop_assert!(out.diagnostic.is_some());
            }
        }
    }

    #[test]
    fn decoders_are_sound_on_random_codes(
        h in matrix(12, 16),
        e in bits(16),
        seed in any::<u64>(),
    ) {
        let n = h.cols();
        let code = CssCode::new(BitMatrix::zeros(1, n), h).unwrap();
        let error = BitVector::from_support(n, &e.iter_ones().filter(|&j| j < n).collect::<Vec<_>>());
        let s = code.syndrome(Side::X, &error).unwrap();
        let gd = decode_general(&code, Side::X, &s, &GeneralOptions::default()).unwrap();
        prop_assert!(gd.converged);
        prop_assert_eq!(code.syndrome(Side::X, &gd.estimate).unwrap(), s.clone());
        for strategy in STRATEGIES {
            let opts = UfOptions { strategy, ..Default::default() };
            let out = decode_uf(&code, Side::X, &s, &opts, seed).unwrap();
            if out.converged {
                prop_assert_eq!(code.syndrome(Side::X, &out.estimate).unwrap(), s.clone());
            }
        }
    }

    #[test]
    fn strategies_agree_on_zero_syndrome(h in matrix(10, 14), seed in any::<u64>()) {
        let code = CssCode::new(BitMatrix::zeros(1, h.cols()), h).unwrap();
        let zero = BitVector::zeros(code.hz().rows());
        for strategy in STRATEGIES {
            let opts = UfOptions { strategy, ..Default::default() };
            let out = decode_uf(&code, Side::X, &zero, &opts, seed).unwrap();
            prop_assert!(out.converged);
            prop_assert!(out.estimate.is_zero());
        }
    }

    #[test]
    fn forest_matches_partition(ops in proptest::collection::vec((0usize..200, 0usize..200, any::<bool>()), 1..400)) {
        let n = 200;
        let mut f = UnionFindForest::new(n);
        for v in 0..n {
            f.register(v);
        }
        let mut label: Vec<usize> = (0..n).collect();
        for (a, b, join) in ops {
            if join {
                f.union(a, b).unwrap();
                let (la, lb) = (label[a], label[b]);
                for l in label.iter_mut().filter(|l| **l == lb) {
                    *l = la;
                }
            }
            prop_assert_eq!(f.find(a).unwrap() == f.find(b).unwrap(), label[a] == label[b]);
        }
        for v in 0..n {
            let r = f.find(v).unwrap();
            let same: BTreeSet<usize> = (0..n).filter(|&u| label[u] == label[v]).collect();
            prop_assert_eq!(f.members(r).collect::<BTreeSet<_>>(), same.clone());
            prop_assert_eq!(f.size(r), same.len());
        }
    }

    #[test]
    fn compression_keeps_roots(
        links in proptest::collection::vec((0usize..60, 0usize..60), 1..120),
        probes in proptest::collection::vec(0usize..60, 1..30),
    ) {
        let n = 60;
        let mut f = UnionFindForest::new(n);
        for v in 0..n {
            f.register(v);
        }
        for (a, b) in links {
            f.union(a, b).unwrap();
        }
        let walk = |f: &UnionFindForest, mut v: usize| {
            while f.parent(v) != Some(v) {
                v = f.parent(v).unwrap();
            }
            v
        };
        let before: Vec<usize> = (0..n).map(|v| walk(&f, v)).collect();
        for p in probes {
            f.find(p).unwrap();
            prop_assert_eq!(f.parent(p), Some(before[p]));
        }
        let after: Vec<usize> = (0..n).map(|v| walk(&f, v)).collect();
        prop_assert_eq!(before, after);
    }
}
