//! CSS codes and their Tanner graphs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// A vertex of a Tanner graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexId {
    Check(usize),
    Bit(usize),
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Check(i) => write!(f, "c{i}"),
            Self::Bit(j) => write!(f, "v{j}"),
        }
    }
}

/// Bipartite check/bit graph of a parity-check matrix.
///
/// Vertices also have a flat index: checks occupy `0..m`, bits `m..m+n`.
/// The decoders work on flat indices; [`VertexId`] is the public view.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    checks: usize,
    bits: usize,
    check_adj: Vec<Vec<usize>>,
    bit_adj: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl TannerGraph {
    pub fn from_matrix(h: &BitMatrix) -> Self {
        let checks = h.rows();
        let bits = h.cols();
        let check_adj: Vec<Vec<usize>> = h.row_iter().map(|r| r.support()).collect();
        let mut bit_adj = vec![Vec::new(); bits];
        for (i, row) in check_adj.iter().enumerate() {
            for &j in row {
                bit_adj[j].push(i);
            }
        }

        let mut offsets = Vec::with_capacity(checks + bits + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for row in &check_adj {
            targets.extend(row.iter().map(|&j| checks + j));
            offsets.push(targets.len());
        }
        for col in &bit_adj {
            targets.extend_from_slice(col);
            offsets.push(targets.len());
        }

        Self {
            checks,
            bits,
            check_adj,
            bit_adj,
            offsets,
            targets,
        }
    }

    #[inline]
    pub fn check_count(&self) -> usize {
        self.checks
    }

    #[inline]
    pub fn bit_count(&self) -> usize {
        self.bits
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.checks + self.bits
    }

    /// Bits incident to check `i`, ascending.
    #[inline]
    pub fn check_bits(&self, i: usize) -> &[usize] {
        &self.check_adj[i]
    }

    /// Checks incident to bit `j`, ascending.
    #[inline]
    pub fn bit_checks(&self, j: usize) -> &[usize] {
        &self.bit_adj[j]
    }

    /// Neighbours of a flat vertex index, as flat indices.
    #[inline]
    pub fn flat_neighbours(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn is_check(&self, flat: usize) -> bool {
        flat < self.checks
    }

    pub fn flat(&self, v: VertexId) -> Result<usize> {
        self.validate(v)?;
        Ok(match v {
            VertexId::Check(i) => i,
            VertexId::Bit(j) => self.checks + j,
        })
    }

    pub fn vertex(&self, flat: usize) -> VertexId {
        if flat < self.checks {
            VertexId::Check(flat)
        } else {
            VertexId::Bit(flat - self.checks)
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        match v {
            VertexId::Check(i) => i < self.checks,
            VertexId::Bit(j) => j < self.bits,
        }
    }

    fn validate(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            return Ok(());
        }
        let limit = match v {
            VertexId::Check(_) => self.checks,
            VertexId::Bit(_) => self.bits,
        };
        Err(Error::VertexOutOfRange {
            vertex: v.to_string(),
            limit,
        })
    }

    pub fn max_check_degree(&self) -> usize {
        self.check_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_bit_degree(&self) -> usize {
        self.bit_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Rejects graphs whose degrees exceed the given LDPC bounds.
    pub fn check_degree_bounds(&self, max_check: usize, max_bit: usize) -> Result<()> {
        let dc = self.max_check_degree();
        if dc > max_check {
            return Err(Error::DegreeBound {
                degree_kind: "check",
                degree: dc,
                bound: max_check,
            });
        }
        let db = self.max_bit_degree();
        if db > max_bit {
            return Err(Error::DegreeBound {
                degree_kind: "bit",
                degree: db,
                bound: max_bit,
            });
        }
        Ok(())
    }

    /// `N(v)`.
    pub fn neighbours(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.validate(v)?;
        Ok(match v {
            VertexId::Check(i) => self.check_adj[i]
                .iter()
                .map(|&j| VertexId::Bit(j))
                .collect(),
            VertexId::Bit(j) => self.bit_adj[j]
                .iter()
                .map(|&i| VertexId::Check(i))
                .collect(),
        })
    }

    /// `Int(W) = { v ∈ W : N(v) ⊆ W }`. Vertices outside the graph are dropped.
    pub fn interior(&self, w: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        w.iter()
            .copied()
            .filter(|&v| {
                self.neighbours(v)
                    .map(|ns| ns.iter().all(|u| w.contains(u)))
                    .unwrap_or(false)
            })
            .collect()
    }
}

/// Which error type is being decoded.
///
/// `X` errors are detected by `hz` and are trivial when they lie in the
/// rowspace of `hx`; `Z` errors the other way round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Side {
    #[default]
    X,
    Z,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Self::X),
            "z" => Ok(Self::Z),
            other => Err(Error::InvalidParameter(format!("unknown side '{other}'"))),
        }
    }
}

/// A CSS code given by `hx` (m×n) and `hz` (l×n) with `hx · hzᵀ = 0`.
#[derive(Clone, Debug)]
pub struct CssCode {
    hx: BitMatrix,
    hz: BitMatrix,
    n: usize,
    k: usize,
    tanner_x: TannerGraph,
    tanner_z: TannerGraph,
}

impl CssCode {
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::ColumnMismatch {
                hx_cols: hx.cols(),
                hz_cols: hz.cols(),
            });
        }
        for (row_x, a) in hx.row_iter().enumerate() {
            if let Some(row_z) = hz.row_iter().position(|b| a.dot(b)) {
                return Err(Error::NotCommuting { row_x, row_z });
            }
        }
        let n = hx.cols();
        // commuting rowspaces are orthogonal, so the ranks never exceed n
        let k = n - hx.rank() - hz.rank();
        let tanner_x = TannerGraph::from_matrix(&hx);
        let tanner_z = TannerGraph::from_matrix(&hz);
        Ok(Self {
            hx,
            hz,
            n,
            k,
            tanner_x,
            tanner_z,
        })
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of logical qubits.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tanner_x(&self) -> &TannerGraph {
        &self.tanner_x
    }

    pub fn tanner_z(&self) -> &TannerGraph {
        &self.tanner_z
    }

    /// The matrix that measures errors of this side.
    pub fn syndrome_matrix(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => &self.hz,
            Side::Z => &self.hx,
        }
    }

    /// The matrix whose rowspace holds the trivial errors of this side.
    pub fn stabilizer_matrix(&self, side: Side) -> &BitMatrix {
        match side {
            Side::X => &self.hx,
            Side::Z => &self.hz,
        }
    }

    /// Tanner graph of [`Self::syndrome_matrix`].
    pub fn tanner(&self, side: Side) -> &TannerGraph {
        match side {
            Side::X => &self.tanner_z,
            Side::Z => &self.tanner_x,
        }
    }

    pub fn syndrome(&self, side: Side, error: &BitVector) -> Result<BitVector> {
        self.syndrome_matrix(side).mul_vec(error)
    }
}

/// The [7,4] Hamming parity-check matrix used as the running example:
/// `c0 = {0,3,5,6}`, `c1 = {1,3,4,6}`, `c2 = {2,4,5,6}`.
pub fn hamming7() -> BitMatrix {
    BitMatrix::from_row_supports(7, &[&[0, 3, 5, 6], &[1, 3, 4, 6], &[2, 4, 5, 6]])
}

/// The Steane code: `hx = hz =` [`hamming7`].
pub fn steane() -> CssCode {
    CssCode::new(hamming7(), hamming7()).expect("Hamming rows overlap evenly")
}

fn kron(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = BitMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i1 in 0..a.rows() {
        for j1 in a.row(i1).iter_ones() {
            for i2 in 0..b.rows() {
                for j2 in b.row(i2).iter_ones() {
                    out.set(i1 * b.rows() + i2, j1 * b.cols() + j2, true);
                }
            }
        }
    }
    out
}

fn hstack(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    debug_assert_eq!(a.rows(), b.rows());
    let mut out = BitMatrix::zeros(a.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in a.row(i).iter_ones() {
            out.set(i, j, true);
        }
        for j in b.row(i).iter_ones() {
            out.set(i, a.cols() + j, true);
        }
    }
    out
}

/// Toric code on an `L×L` torus as the hypergraph product of two cyclic
/// repetition codes: `hx = [H⊗I | I⊗Hᵀ]`, `hz = [I⊗H | Hᵀ⊗I]` where `H` is
/// the `L×L` cyclic difference matrix. `n = 2L²`, `k = 2`.
pub fn toric_code(l: usize) -> Result<CssCode> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!(
            "toric code needs L >= 2, got {l}"
        )));
    }
    let mut h = BitMatrix::zeros(l, l);
    for i in 0..l {
        h.set(i, i, true);
        h.set(i, (i + 1) % l, true);
    }
    let ht = h.transpose();
    let id = BitMatrix::identity(l);
    let hx = hstack(&kron(&h, &id), &kron(&id, &ht));
    let hz = hstack(&kron(&id, &h), &kron(&ht, &id));
    CssCode::new(hx, hz)
}

/// A named fixture.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum Builtin {
    Code(CssCode),
    Matrix(BitMatrix),
}

impl Builtin {
    pub fn into_code(self) -> Option<CssCode> {
        match self {
            Self::Code(c) => Some(c),
            Self::Matrix(_) => None,
        }
    }
}

/// Looks up `steane`, `hamming7`, `toric:L` or `toric(L)`.
pub fn builtin(name: &str) -> Result<Builtin> {
    let name = name.trim();
    match name.to_ascii_lowercase().as_str() {
        "steane" => return Ok(Builtin::Code(steane())),
        "hamming7" | "hamming" => return Ok(Builtin::Matrix(hamming7())),
        _ => {}
    }
    let size = name
        .strip_prefix("toric:")
        .or_else(|| {
            name.strip_prefix("toric(")
                .and_then(|s| s.strip_suffix(')'))
        })
        .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    let l = size
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
    toric_code(l).map(Builtin::Code)
}
