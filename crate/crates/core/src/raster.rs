//! Particle positions to grayscale frames: binary occupancy grid, Gaussian
//! low-pass filtering, 8-bit quantization, and stacking frames into the
//! detection matrix.
//!
//! The convolution follows `C(n1, n2) = sum_k A(n1 - k1, n2 - k2) B(k1, k2)`
//! with zero padding, realized as a scatter over the (sparse) set pixels;
//! a particle's blob therefore sits offset by `1..=kernel_size` pixels from
//! its occupancy cell, which is immaterial to the pipeline. Quantization
//! maps filter mass to `round(255 (1 - min(1, C / C_max)))` where `C_max`
//! is the largest kernel entry, so isolated particles render as dark
//! kernel-sized blobs on a white background.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, floor, round};
use crate::neighbors::FrameMatrix;
use crate::vicsek::SwarmTrajectory;
use crate::{Error, Result};

/// Rasterization parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterConfig {
    /// Image side in pixels (frames are square).
    pub resolution: usize,
    /// Side of the square filter kernel in pixels.
    pub kernel_size: usize,
    /// Standard deviation of the kernel in pixels.
    pub kernel_std: f64,
    /// Side of the simulation box being imaged.
    pub box_side: f64,
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig {
            resolution: 128,
            kernel_size: 10,
            kernel_std: 10.0,
            box_side: 5.0,
        }
    }
}

impl RasterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_size == 0 || self.resolution < self.kernel_size {
            return Err(Error::InvalidParameter(format!(
                "resolution {} must be at least the kernel size {}",
                self.resolution, self.kernel_size
            )));
        }
        if !(self.kernel_std > 0.0) || !(self.box_side > 0.0) {
            return Err(Error::InvalidParameter(
                "kernel std and box side must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Rotationally symmetric Gaussian kernel, normalized to sum 1. Entries are
/// proportional to `exp(-((i - c)^2 + (j - c)^2) / (2 std^2))` with
/// `c = (size - 1) / 2`.
pub fn gaussian_kernel(size: usize, std: f64) -> Result<Vec<f64>> {
    if size == 0 {
        return Err(Error::InvalidParameter(
            "kernel size must be positive".into(),
        ));
    }
    if !(std > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel std must be positive, got {std}"
        )));
    }
    let c = (size as f64 - 1.0) / 2.0;
    let inv = 1.0 / (2.0 * std * std);
    let mut kernel = Vec::with_capacity(size * size);
    let mut sum = 0.0;
    for i in 0..size {
        for j in 0..size {
            let di = i as f64 - c;
            let dj = j as f64 - c;
            let v = exp(-(di * di + dj * dj) * inv);
            kernel.push(v);
            sum += v;
        }
    }
    for v in &mut kernel {
        *v /= sum;
    }
    Ok(kernel)
}

/// Binary occupancy grid: the set of pixels holding at least one particle.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFrame {
    pub resolution: usize,
    /// Sorted, deduplicated `(row, col)` cells.
    pub pixels: Vec<(u32, u32)>,
}

/// Maps positions in `[0, box_side)^2` to occupancy cells by
/// `floor(resolution * coordinate / box_side)`; multiple particles in one
/// cell still produce a single set pixel.
pub fn positions_to_sparse(positions: &[[f64; 2]], cfg: &RasterConfig) -> SparseFrame {
    let r = cfg.resolution as f64;
    let mut pixels: Vec<(u32, u32)> = positions
        .iter()
        .map(|p| {
            debug_assert!(p[0] >= 0.0 && p[0] < cfg.box_side);
            debug_assert!(p[1] >= 0.0 && p[1] < cfg.box_side);
            let i = floor(r * p[0] / cfg.box_side) as usize;
            let j = floor(r * p[1] / cfg.box_side) as usize;
            (
                i.min(cfg.resolution - 1) as u32,
                j.min(cfg.resolution - 1) as u32,
            )
        })
        .collect();
    pixels.sort_unstable();
    pixels.dedup();
    SparseFrame {
        resolution: cfg.resolution,
        pixels,
    }
}

/// One 8-bit grayscale frame, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub resolution: usize,
    pub pixels: Vec<u8>,
}

/// Filter mass before quantization: the convolution of the occupancy grid
/// with the kernel, zero-padded.
pub fn filter_frame_real(a: &SparseFrame, kernel: &[f64], kernel_size: usize) -> Vec<f64> {
    debug_assert_eq!(kernel.len(), kernel_size * kernel_size);
    let r = a.resolution;
    let mut c = vec![0.0f64; r * r];
    for &(p1, p2) in &a.pixels {
        for k1 in 0..kernel_size {
            let c1 = p1 as usize + 1 + k1;
            if c1 >= r {
                break;
            }
            for k2 in 0..kernel_size {
                let c2 = p2 as usize + 1 + k2;
                if c2 >= r {
                    break;
                }
                c[c1 * r + c2] += kernel[k1 * kernel_size + k2];
            }
        }
    }
    c
}

/// 8-bit mapping of filter mass: `C = 0` is white (255) and anything at or
/// above `c_max` is black (0).
pub fn quantize(c: &[f64], c_max: f64, resolution: usize) -> Frame {
    debug_assert!(c_max > 0.0);
    let pixels = c
        .iter()
        .map(|&v| round(255.0 * (1.0 - (v / c_max).min(1.0))) as u8)
        .collect();
    Frame { resolution, pixels }
}

/// Filtered and quantized frame of an occupancy grid.
pub fn filter_frame(a: &SparseFrame, kernel: &[f64], kernel_size: usize) -> Frame {
    let real = filter_frame_real(a, kernel, kernel_size);
    let c_max = kernel.iter().cloned().fold(0.0f64, f64::max);
    quantize(&real, c_max, a.resolution)
}

/// Stacks frames into the detection matrix: row n is the row-major
/// flattening of frame n, cast to real.
pub fn frames_to_matrix(frames: &[Frame]) -> Result<FrameMatrix> {
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidParameter("no frames".into()))?;
    let r = first.resolution;
    let mut data = Vec::with_capacity(frames.len() * r * r);
    for f in frames {
        if f.resolution != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: f.resolution,
            });
        }
        data.extend(f.pixels.iter().map(|&v| v as f64));
    }
    FrameMatrix::new(frames.len(), r * r, data)
}

/// Stacks real-valued (unquantized) frames into a detection matrix.
pub fn real_frames_to_matrix(frames: &[Vec<f64>], resolution: usize) -> Result<FrameMatrix> {
    let p = resolution * resolution;
    let mut data = Vec::with_capacity(frames.len() * p);
    for f in frames {
        if f.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: f.len(),
            });
        }
        data.extend_from_slice(f);
    }
    FrameMatrix::new(frames.len(), p, data)
}

/// Renders every step of a trajectory. The config's box side must match the
/// trajectory's.
pub fn rasterize_trajectory(traj: &SwarmTrajectory, cfg: &RasterConfig) -> Result<Vec<Frame>> {
    cfg.validate()?;
    if traj.box_side != cfg.box_side {
        return Err(Error::InvalidParameter(format!(
            "box side mismatch: trajectory {} vs raster config {}",
            traj.box_side, cfg.box_side
        )));
    }
    let kernel = gaussian_kernel(cfg.kernel_size, cfg.kernel_std)?;
    Ok(traj
        .states
        .iter()
        .map(|s| {
            filter_frame(
                &positions_to_sparse(&s.positions, cfg),
                &kernel,
                cfg.kernel_size,
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn kernel_size_one() {
        assert_eq!(gaussian_kernel(1, 10.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn kernel_extreme_ratio() {
        // Largest over smallest entry of the 10 x 10, std 10 kernel:
        // exp(((4.5^2 + 4.5^2) - (0.5^2 + 0.5^2)) / 200) = exp(0.2).
        let kernel = gaussian_kernel(10, 10.0).unwrap();
        let max = kernel.iter().cloned().fold(f64::MIN, f64::max);
        let min = kernel.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max / min - exp(0.2)).abs() < 1e-12);
        assert!((max / min - 1.2214027581601699).abs() < 1e-12);
    }

    #[test]
    fn kernel_rotation_symmetric_and_normalized() {
        for (size, std) in [(10usize, 10.0), (7, 2.5), (4, 0.8)] {
            let kernel = gaussian_kernel(size, std).unwrap();
            let sum: f64 = kernel.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for i in 0..size {
                for j in 0..size {
                    // 90-degree rotation: (i, j) -> (j, size-1-i).
                    assert_eq!(kernel[i * size + j], kernel[j * size + (size - 1 - i)]);
                }
            }
        }
    }

    #[test]
    fn sparse_corner_cells() {
        let cfg = RasterConfig::default();
        let eps = 1e-9;
        let sf = positions_to_sparse(
            &[[0.0, 0.0], [cfg.box_side - eps, cfg.box_side - eps]],
            &cfg,
        );
        assert_eq!(sf.pixels, vec![(0, 0), (127, 127)]);
    }

    #[test]
    fn sparse_collision_bound() {
        let cfg = RasterConfig::default();
        let mut rng = Rng::new(4);
        let positions: Vec<[f64; 2]> = (0..50)
            .map(|_| [rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)])
            .collect();
        let sf = positions_to_sparse(&positions, &cfg);
        assert!(sf.pixels.len() <= 50);
        assert!(!sf.pixels.is_empty());
    }

    #[test]
    fn empty_frame_is_white() {
        let cfg = RasterConfig::default();
        let kernel = gaussian_kernel(10, 10.0).unwrap();
        let sf = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![],
        };
        let frame = filter_frame(&sf, &kernel, 10);
        assert!(frame.pixels.iter().all(|&v| v == 255));
    }

    #[test]
    fn single_particle_blob_layout() {
        let cfg = RasterConfig::default();
        let kernel = gaussian_kernel(10, 10.0).unwrap();
        let sf = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(60, 64)],
        };
        let frame = filter_frame(&sf, &kernel, 10);
        let mut dark = 0;
        for i in 0..128 {
            for j in 0..128 {
                let v = frame.pixels[i * 128 + j];
                if v < 255 {
                    dark += 1;
                    assert!((61..=70).contains(&i), "row {i}");
                    assert!((65..=74).contains(&j), "col {j}");
                }
            }
        }
        // Every kernel cell leaves a mark: min entry maps to
        // round(255 (1 - 1/1.2214)) = 46 < 255.
        assert_eq!(dark, 100);
    }

    #[test]
    fn scatter_matches_direct_convolution() {
        // Direct evaluation of the definition, dense in (n1, n2, k1, k2).
        let size = 6;
        let res = 32;
        let mut rng = Rng::new(9);
        let kernel: Vec<f64> = (0..size * size).map(|_| rng.next_f64()).collect();
        let mut pixels: Vec<(u32, u32)> = (0..40)
            .map(|_| {
                (
                    (rng.next_u64() % res as u64) as u32,
                    (rng.next_u64() % res as u64) as u32,
                )
            })
            .collect();
        pixels.sort_unstable();
        pixels.dedup();
        let sf = SparseFrame {
            resolution: res,
            pixels: pixels.clone(),
        };
        let fast = filter_frame_real(&sf, &kernel, size);
        let mut dense = vec![0.0f64; res * res];
        let a = |i: i64, j: i64| -> f64 {
            if i < 0 || j < 0 || i >= res as i64 || j >= res as i64 {
                0.0
            } else if pixels.binary_search(&(i as u32, j as u32)).is_ok() {
                1.0
            } else {
                0.0
            }
        };
        for n1 in 0..res as i64 {
            for n2 in 0..res as i64 {
                let mut acc = 0.0;
                for k1 in 1..=size as i64 {
                    for k2 in 1..=size as i64 {
                        acc += a(n1 - k1, n2 - k2)
                            * kernel[(k1 - 1) as usize * size + (k2 - 1) as usize];
                    }
                }
                dense[n1 as usize * res + n2 as usize] = acc;
            }
        }
        for (f, d) in fast.iter().zip(dense.iter()) {
            assert!((f - d).abs() < 1e-10);
        }
    }

    #[test]
    fn disjoint_particles_min_composition() {
        let cfg = RasterConfig::default();
        let kernel = gaussian_kernel(10, 10.0).unwrap();
        let both = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(20, 20), (90, 90)],
        };
        let first = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(20, 20)],
        };
        let second = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(90, 90)],
        };
        let fb = filter_frame(&both, &kernel, 10);
        let f1 = filter_frame(&first, &kernel, 10);
        let f2 = filter_frame(&second, &kernel, 10);
        for i in 0..fb.pixels.len() {
            assert_eq!(fb.pixels[i], f1.pixels[i].min(f2.pixels[i]));
        }
    }

    #[test]
    fn translation_shifts_blob() {
        let cfg = RasterConfig::default();
        let kernel = gaussian_kernel(10, 10.0).unwrap();
        let base = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(50, 50)],
        };
        let shifted = SparseFrame {
            resolution: cfg.resolution,
            pixels: vec![(51, 50)],
        };
        let fa = filter_frame(&base, &kernel, 10);
        let fb = filter_frame(&shifted, &kernel, 10);
        for i in 40..80usize {
            for j in 40..80usize {
                assert_eq!(fa.pixels[i * 128 + j], fb.pixels[(i + 1) * 128 + j]);
            }
        }
    }

    #[test]
    fn matrix_flattening_convention() {
        let frames = vec![
            Frame {
                resolution: 2,
                pixels: vec![10, 20, 30, 40],
            },
            Frame {
                resolution: 2,
                pixels: vec![50, 60, 70, 80],
            },
        ];
        let d = frames_to_matrix(&frames).unwrap();
        assert_eq!(d.rows(), 2);
        assert_eq!(d.cols(), 4);
        // Row order: top-left, top-right, bottom-left, bottom-right.
        assert_eq!(d.frame(1).unwrap(), &[10.0, 20.0, 30.0, 40.0]);
        assert_eq!(d.frame(2).unwrap(), &[50.0, 60.0, 70.0, 80.0]);
        // Unflattening recovers the frame exactly.
        let back: Vec<u8> = d.frame(2).unwrap().iter().map(|&v| v as u8).collect();
        assert_eq!(back, frames[1].pixels);
    }

    #[test]
    fn trajectory_matrix_shape() {
        let mut cfg = crate::vicsek::SwarmConfig::default();
        cfg.steps = 12;
        cfg.schedule = vec![crate::vicsek::NoiseBand {
            start: 1,
            end: 12,
            sigma: 0.25,
        }];
        let traj = crate::vicsek::simulate(&cfg).unwrap();
        let frames = rasterize_trajectory(&traj, &RasterConfig::default()).unwrap();
        assert_eq!(frames.len(), 12);
        let d = frames_to_matrix(&frames).unwrap();
        assert_eq!(d.rows(), 12);
        assert_eq!(d.cols(), 128 * 128);
    }

    #[test]
    fn box_side_mismatch_rejected() {
        let mut cfg = crate::vicsek::SwarmConfig::default();
        cfg.steps = 3;
        cfg.schedule = vec![crate::vicsek::NoiseBand {
            start: 1,
            end: 3,
            sigma: 0.25,
        }];
        let traj = crate::vicsek::simulate(&cfg).unwrap();
        let rcfg = RasterConfig {
            box_side: 4.0,
            ..RasterConfig::default()
        };
        assert!(rasterize_trajectory(&traj, &rcfg).is_err());
    }
}
