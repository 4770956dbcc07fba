//! Intrinsic-dimension diagnostics for frame ranges: geodesic distances on
//! a symmetric k-nearest-neighbor graph, classical multidimensional
//! scaling, and the residual-variance curve whose elbow estimates the
//! embedding dimension.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::sym_eigen;
use crate::math::sqrt;
use crate::neighbors::{knn_all, FrameMatrix};
use crate::{Error, Result};

/// All-pairs geodesic distances over the retained frames of a range.
#[derive(Clone, Debug)]
pub struct GeodesicMatrix {
    /// Number of retained frames.
    pub n: usize,
    /// Absolute 1-based frame numbers retained, ascending.
    pub kept: Vec<usize>,
    /// Frames dropped because they fell outside the largest connected
    /// component of the neighbor graph.
    pub dropped: usize,
    /// Set whenever the graph was disconnected (`dropped > 0`).
    pub disconnected: bool,
    dist: Vec<f64>,
}

impl GeodesicMatrix {
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

/// Min-heap entry for Dijkstra (inverted ordering).
#[derive(Clone, Copy, PartialEq)]
struct QueueItem {
    dist: f64,
    node: u32,
}

impl Eq for QueueItem {}

impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("finite distances")
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Geodesic distances over the rows `lo..=hi` (1-based, inclusive) of the
/// matrix: a symmetric alpha-nearest-neighbor graph (an edge exists when
/// either endpoint lists the other) weighted by row distance, then
/// single-source shortest paths from every node. A disconnected graph is
/// restricted to its largest component (ties to the one holding the
/// earliest frame) and flagged.
pub fn geodesic_distances(
    d: &FrameMatrix,
    lo: usize,
    hi: usize,
    alpha: usize,
) -> Result<GeodesicMatrix> {
    if lo == 0 || hi > d.rows() || lo > hi {
        return Err(Error::IndexOutOfRange {
            index: if hi > d.rows() { hi } else { lo },
            len: d.rows(),
        });
    }
    let len = hi - lo + 1;
    if len < alpha + 1 {
        return Err(Error::RangeTooSmall { len, alpha });
    }
    let sub = d.slice_rows(lo, hi)?;
    let sets = knn_all(&sub, alpha)?;

    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); len];
    for set in &sets {
        let c = set.center - 1;
        for (&m, &w) in set.members.iter().zip(set.distances.iter()) {
            let m = m - 1;
            if m != c {
                adjacency[c].push((m as u32, w));
                adjacency[m].push((c as u32, w));
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        list.dedup_by_key(|e| e.0);
    }

    // Connected components by breadth-first sweep in index order.
    let mut component = vec![usize::MAX; len];
    let mut sizes = Vec::new();
    for start in 0..len {
        if component[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut queue = vec![start];
        component[start] = id;
        let mut size = 0usize;
        while let Some(u) = queue.pop() {
            size += 1;
            for &(v, _) in &adjacency[u] {
                if component[v as usize] == usize::MAX {
                    component[v as usize] = id;
                    queue.push(v as usize);
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
        .unwrap_or(0);

    let local_kept: Vec<usize> = (0..len).filter(|&i| component[i] == best).collect();
    let n = local_kept.len();
    let dropped = len - n;
    let mut local_index = vec![usize::MAX; len];
    for (new, &old) in local_kept.iter().enumerate() {
        local_index[old] = new;
    }

    let mut dist = vec![f64::INFINITY; n * n];
    let mut node_dist = vec![f64::INFINITY; len];
    for (src_new, &src_old) in local_kept.iter().enumerate() {
        node_dist.fill(f64::INFINITY);
        node_dist[src_old] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(QueueItem {
            dist: 0.0,
            node: src_old as u32,
        });
        while let Some(QueueItem { dist: du, node: u }) = heap.pop() {
            let u = u as usize;
            if du > node_dist[u] {
                continue;
            }
            for &(v, w) in &adjacency[u] {
                let v = v as usize;
                let cand = du + w;
                if cand < node_dist[v] {
                    node_dist[v] = cand;
                    heap.push(QueueItem {
                        dist: cand,
                        node: v as u32,
                    });
                }
            }
        }
        for (dst_new, &dst_old) in local_kept.iter().enumerate() {
            dist[src_new * n + dst_new] = node_dist[dst_old];
        }
    }

    Ok(GeodesicMatrix {
        n,
        kept: local_kept.iter().map(|&i| lo + i).collect(),
        dropped,
        disconnected: dropped > 0,
        dist,
    })
}

/// Default relative-drop threshold for the elbow rule.
pub const DEFAULT_ELBOW_TAU: f64 = 0.05;

/// Residual variance per embedding dimension, its scaled form (maximum 1),
/// and the elbow estimate.
#[derive(Clone, Debug)]
pub struct ResidualCurve {
    /// `residuals[d-1]` is `1 - rho^2` between geodesic and d-dimensional
    /// embedded distances.
    pub residuals: Vec<f64>,
    /// Residuals divided by their maximum.
    pub scaled: Vec<f64>,
    /// Smallest d whose relative drop `(res_d - res_{d+1}) / res_1` falls
    /// below tau; `d_max` if none does.
    pub elbow: usize,
    pub tau: f64,
}

/// Residual curve with the default elbow threshold.
pub fn residual_curve(g: &GeodesicMatrix, d_max: usize) -> Result<ResidualCurve> {
    residual_curve_with(g, d_max, DEFAULT_ELBOW_TAU)
}

/// Classical MDS of the double-centered squared geodesics, embedding into
/// d = 1..d_max dimensions (negative eigenvalues clamp to zero) and scoring
/// each by the Pearson correlation between geodesic and embedded distances.
pub fn residual_curve_with(g: &GeodesicMatrix, d_max: usize, tau: f64) -> Result<ResidualCurve> {
    if d_max < 1 {
        return Err(Error::InvalidParameter("d_max must be at least 1".into()));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter("tau must lie in (0, 1)".into()));
    }
    let n = g.n;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 retained frames".into(),
        ));
    }

    // b = -1/2 J D^2 J
    let mut sq = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = g.dist(i, j);
            sq[i * n + j] = v * v;
        }
    }
    let mut row_mean = vec![0.0f64; n];
    let mut grand = 0.0;
    for i in 0..n {
        let m: f64 = sq[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64;
        row_mean[i] = m;
        grand += m;
    }
    grand /= n as f64;
    let mut b = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    let eig = sym_eigen(n, &b)?;

    // Geodesic side of the correlation, over unordered pairs.
    let pairs = n * (n - 1) / 2;
    let mut sum_g = 0.0;
    let mut sum_gg = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = g.dist(i, j);
            sum_g += v;
            sum_gg += v * v;
        }
    }
    let mean_g = sum_g / pairs as f64;
    let var_g = sum_gg / pairs as f64 - mean_g * mean_g;

    let dims = d_max.min(n);
    let mut embed_sq = vec![0.0f64; n * n];
    let mut residuals = Vec::with_capacity(d_max);
    for t in 0..dims {
        let scale = sqrt(eig.values[t].max(0.0));
        let coord: Vec<f64> = (0..n).map(|i| scale * eig.vector_component(i, t)).collect();
        let mut sum_e = 0.0;
        let mut sum_ee = 0.0;
        let mut sum_ge = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = coord[i] - coord[j];
                let idx = i * n + j;
                embed_sq[idx] += diff * diff;
                let e = sqrt(embed_sq[idx]);
                sum_e += e;
                sum_ee += e * e;
                sum_ge += g.dist(i, j) * e;
            }
        }
        let mean_e = sum_e / pairs as f64;
        let var_e = sum_ee / pairs as f64 - mean_e * mean_e;
        let cov = sum_ge / pairs as f64 - mean_g * mean_e;
        let rho2 = if var_g > 0.0 && var_e > 0.0 {
            (cov * cov) / (var_g * var_e)
        } else {
            0.0
        };
        let raw = (1.0 - rho2).max(0.0);
        // A larger embedding cannot fit worse; raw correlation can still
        // dip by ~1e-3 when near-zero eigenvalues contribute noise
        // coordinates, so the curve stores the running minimum.
        let prev = residuals.last().copied().unwrap_or(f64::INFINITY);
        residuals.push(raw.min(prev));
    }
    while residuals.len() < d_max {
        let last = *residuals.last().expect("dims >= 1");
        residuals.push(last);
    }

    let max = residuals.iter().cloned().fold(0.0f64, f64::max);
    let scaled = if max > 0.0 {
        residuals.iter().map(|r| r / max).collect()
    } else {
        vec![0.0; residuals.len()]
    };

    let elbow = if residuals[0] <= 1e-12 {
        1
    } else {
        let mut found = d_max;
        for d in 1..d_max {
            if (residuals[d - 1] - residuals[d]) / residuals[0] < tau {
                found = d;
                break;
            }
        }
        found
    };

    Ok(ResidualCurve {
        residuals,
        scaled,
        elbow,
        tau,
    })
}
