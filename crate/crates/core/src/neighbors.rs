//! The frame matrix (one row of pixel intensities per frame) and exact
//! alpha-nearest-neighbor search over its rows.
//!
//! Search is a vantage-point tree over row indices with Euclidean row
//! distance. Ordering is total and deterministic: candidates compare by
//! `(distance, frame index)`, so ties always resolve to the smaller frame,
//! and tree results are identical to a brute-force scan.

use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// N x P row-major matrix; row n holds the pixel intensities of frame n.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FrameMatrix {
    /// Validates shape (N >= 2, P >= 1) and that every entry is finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows < 2 || cols < 1 {
            return Err(Error::InvalidParameter(format!(
                "frame matrix must be at least 2 x 1, got {rows} x {cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "buffer of {} values for a {rows} x {cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(FrameMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        FrameMatrix::new(n, p, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Row of frame `n` (1-based).
    pub fn frame(&self, n: usize) -> Result<&[f64]> {
        if n == 0 || n > self.rows {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.rows,
            });
        }
        Ok(self.row0(n - 1))
    }

    #[inline]
    pub(crate) fn row0(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy of the rows `lo..=hi` (1-based, inclusive) as a new matrix.
    pub fn slice_rows(&self, lo: usize, hi: usize) -> Result<FrameMatrix> {
        if lo == 0 || hi > self.rows || lo > hi {
            return Err(Error::IndexOutOfRange {
                index: if hi > self.rows { hi } else { lo },
                len: self.rows,
            });
        }
        FrameMatrix::new(
            hi - lo + 1,
            self.cols,
            self.data[(lo - 1) * self.cols..hi * self.cols].to_vec(),
        )
    }
}

#[inline]
pub(crate) fn sqdist0(d: &FrameMatrix, i: usize, j: usize) -> f64 {
    let a = d.row0(i);
    let b = d.row0(j);
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

#[inline]
pub(crate) fn dist0(d: &FrameMatrix, i: usize, j: usize) -> f64 {
    sqrt(sqdist0(d, i, j))
}

/// Euclidean distance between the rows of frames `n` and `m` (1-based).
pub fn row_distance(d: &FrameMatrix, n: usize, m: usize) -> Result<f64> {
    for idx in [n, m] {
        if idx == 0 || idx > d.rows() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                len: d.rows(),
            });
        }
    }
    Ok(dist0(d, n - 1, m - 1))
}

/// The alpha nearest frames of a center frame, the center itself included.
///
/// `members` is sorted by ascending `(distance, frame)`, so `members[0]` is
/// always the center; `distances` is aligned with it.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborSet {
    pub center: usize,
    pub members: Vec<usize>,
    pub distances: Vec<f64>,
}

/// Candidate ordering: by distance, the query itself outranking any other
/// zero-distance duplicate (so the center always makes the set), remaining
/// ties to the smaller frame index. The max-heap top is the one to evict.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Candidate {
    dist: f64,
    /// 0 for the query frame itself, 1 otherwise.
    other: u8,
    idx: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.dist
            .partial_cmp(&other.dist)
            .expect("finite distances")
            .then(self.other.cmp(&other.other))
            .then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct VpNode {
    point: u32,
    radius: f64,
    inside: Option<Box<VpNode>>,
    outside: Option<Box<VpNode>>,
}

fn build_tree(d: &FrameMatrix, indices: &mut [u32]) -> Option<Box<VpNode>> {
    let (&vantage, rest) = indices.split_first()?;
    if rest.is_empty() {
        return Some(Box::new(VpNode {
            point: vantage,
            radius: 0.0,
            inside: None,
            outside: None,
        }));
    }
    let mut pairs: Vec<Candidate> = rest
        .iter()
        .map(|&i| Candidate {
            dist: dist0(d, vantage as usize, i as usize),
            other: 1,
            idx: i,
        })
        .collect();
    let mid = pairs.len() / 2;
    pairs.select_nth_unstable(mid);
    let radius = pairs[mid].dist;
    let mut near: Vec<u32> = pairs[..mid].iter().map(|c| c.idx).collect();
    let mut far: Vec<u32> = pairs[mid..].iter().map(|c| c.idx).collect();
    Some(Box::new(VpNode {
        point: vantage,
        radius,
        inside: build_tree(d, &mut near),
        outside: build_tree(d, &mut far),
    }))
}

fn search(
    node: &VpNode,
    d: &FrameMatrix,
    query: usize,
    k: usize,
    heap: &mut BinaryHeap<Candidate>,
) {
    let dist = dist0(d, query, node.point as usize);
    heap.push(Candidate {
        dist,
        other: (node.point as usize != query) as u8,
        idx: node.point,
    });
    if heap.len() > k {
        heap.pop();
    }
    let worst = |heap: &BinaryHeap<Candidate>| {
        if heap.len() < k {
            f64::INFINITY
        } else {
            heap.peek().map(|c| c.dist).unwrap_or(f64::INFINITY)
        }
    };
    // Visit the side containing the query ball center first; enter the other
    // side whenever it could still hold a candidate at distance <= worst
    // (non-strict, so equal-distance smaller-index candidates are not lost).
    if dist < node.radius {
        if let Some(inside) = &node.inside {
            search(inside, d, query, k, heap);
        }
        if let Some(outside) = &node.outside {
            if node.radius - dist <= worst(heap) {
                search(outside, d, query, k, heap);
            }
        }
    } else {
        if let Some(outside) = &node.outside {
            search(outside, d, query, k, heap);
        }
        if let Some(inside) = &node.inside {
            if dist - node.radius <= worst(heap) {
                search(inside, d, query, k, heap);
            }
        }
    }
}

/// Exact alpha-nearest-neighbor sets for every frame, via one shared
/// vantage-point tree. Requires `2 <= alpha <= N`.
pub fn knn_all(d: &FrameMatrix, alpha: usize) -> Result<Vec<NeighborSet>> {
    let n = d.rows();
    if alpha < 2 || alpha > n {
        return Err(Error::AlphaOutOfRange { alpha, max: n });
    }
    let mut indices: Vec<u32> = (0..n as u32).collect();
    let root = build_tree(d, &mut indices).expect("non-empty matrix");
    let mut result = Vec::with_capacity(n);
    for q in 0..n {
        let mut heap = BinaryHeap::with_capacity(alpha + 1);
        search(&root, d, q, alpha, &mut heap);
        let sorted = heap.into_sorted_vec();
        debug_assert_eq!(sorted.len(), alpha);
        debug_assert_eq!(sorted[0].idx as usize, q);
        result.push(NeighborSet {
            center: q + 1,
            members: sorted.iter().map(|c| c.idx as usize + 1).collect(),
            distances: sorted.iter().map(|c| c.dist).collect(),
        });
    }
    Ok(result)
}

/// Brute-force scan with the same `(distance, index)` ordering; the testing
/// oracle for [`knn_all`].
#[doc(hidden)]
pub fn knn_brute_force(d: &FrameMatrix, alpha: usize) -> Result<Vec<NeighborSet>> {
    let n = d.rows();
    if alpha < 2 || alpha > n {
        return Err(Error::AlphaOutOfRange { alpha, max: n });
    }
    let mut result = Vec::with_capacity(n);
    for q in 0..n {
        let mut cands: Vec<Candidate> = (0..n)
            .map(|i| Candidate {
                dist: dist0(d, q, i),
                other: (i != q) as u8,
                idx: i as u32,
            })
            .collect();
        cands.sort_unstable();
        cands.truncate(alpha);
        result.push(NeighborSet {
            center: q + 1,
            members: cands.iter().map(|c| c.idx as usize + 1).collect(),
            distances: cands.iter().map(|c| c.dist).collect(),
        });
    }
    Ok(result)
}
