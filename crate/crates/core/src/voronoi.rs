//! Sampled Voronoi (minimization) diagrams of polygonal chains.
//!
//! A [`SliceSpec`] embeds an `m`-dimensional grid (`m` in 1..=3) affinely
//! into configuration space. Every grid sample decodes to a query chain whose
//! nearest site, under the discrete Fréchet distance, becomes the sample's
//! owner. Owner changes between axis neighbours mark boundary cells, and any
//! `2^m` block of samples with three or more owners is a vertex candidate.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use crate::configspace::ConfigPoint;
use crate::error::{Error, Result};
use crate::frechet::{dfd_distance, dfd_sq};
use crate::geometry::{Chain, Dim, Point};

/// Absolute slack under which two site distances count as tied.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of grid samples in one raster.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 10_000_000;

/// Non-empty set of chains with unique ids and a shared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSet {
    sites: Vec<Chain>,
}

impl SiteSet {
    pub fn new(sites: Vec<Chain>) -> Result<Self> {
        let first = sites.first().ok_or(Error::EmptySiteSet)?;
        let dim = first.dim();
        let mut seen = HashSet::new();
        for site in &sites {
            if site.dim() != dim {
                return Err(Error::Dimension(format!(
                    "site {:?} is {} but site {:?} is {dim}",
                    site.id(),
                    site.dim(),
                    first.id()
                )));
            }
            if !seen.insert(site.id()) {
                return Err(Error::DuplicateId {
                    id: site.id().to_string(),
                    line: None,
                });
            }
        }
        Ok(SiteSet { sites })
    }

    pub fn sites(&self) -> &[Chain] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> Dim {
        self.sites[0].dim()
    }

    pub fn get(&self, id: &str) -> Option<&Chain> {
        self.sites.iter().find(|c| c.id() == id)
    }

    pub fn into_inner(self) -> Vec<Chain> {
        self.sites
    }
}

/// Answer to a nearest-site query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    /// 0-based index into the site set; the lowest index among tied sites.
    pub index: usize,
    pub distance: f64,
    /// Another site lies within the tie tolerance of the minimum.
    pub tie: bool,
}

/// Picks the lowest index among distances within `tol` of the minimum.
fn pick_nearest(distances: impl Iterator<Item = f64> + Clone, tol: f64) -> Nearest {
    let min = distances.clone().fold(f64::INFINITY, f64::min);
    let mut found: Option<(usize, f64)> = None;
    let mut tie = false;
    for (i, d) in distances.enumerate() {
        if d <= min + tol {
            if found.is_none() {
                found = Some((i, d));
            } else {
                tie = true;
            }
        }
    }
    let (index, distance) = found.expect("non-empty site set");
    Nearest { index, distance, tie }
}

/// Nearest site to `query` under the discrete Fréchet distance.
pub fn nearest_site(query: &Chain, sites: &SiteSet) -> Result<Nearest> {
    nearest_site_with_tolerance(query, sites, DEFAULT_TIE_TOLERANCE)
}

pub fn nearest_site_with_tolerance(query: &Chain, sites: &SiteSet, tol: f64) -> Result<Nearest> {
    let distances = sites
        .sites()
        .iter()
        .map(|s| dfd_distance(query, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_nearest(distances.iter().copied(), tol))
}

/// An affine grid embedded in configuration space:
/// `sample(t) = origin + sum_a t_a * axes[a]`, with each `t_a` running over
/// `resolution[a]` evenly spaced values spanning `extents[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    origin: ConfigPoint,
    axes: Vec<Vec<f64>>,
    extents: Vec<(f64, f64)>,
    resolution: Vec<usize>,
}

impl SliceSpec {
    pub fn new(
        origin: ConfigPoint,
        axes: Vec<Vec<f64>>,
        extents: Vec<(f64, f64)>,
        resolution: Vec<usize>,
    ) -> Result<Self> {
        let m = axes.len();
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidSlice(format!("expected 1 to 3 axes, got {m}")));
        }
        if extents.len() != m || resolution.len() != m {
            return Err(Error::InvalidSlice(format!(
                "{m} axes but {} extents and {} resolutions",
                extents.len(),
                resolution.len()
            )));
        }
        let n = origin.values().len();
        for (a, axis) in axes.iter().enumerate() {
            if axis.len() != n {
                return Err(Error::Dimension(format!(
                    "axis {a} has {} coordinates, origin has {n}",
                    axis.len()
                )));
            }
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSlice(format!("axis {a} is not finite")));
            }
        }
        for (a, &(lo, hi)) in extents.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSlice(format!(
                    "extent {a} must satisfy lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        if let Some(a) = resolution.iter().position(|&r| r < 2) {
            return Err(Error::InvalidSlice(format!("axis {a} needs at least 2 samples")));
        }
        let g = gram_determinant(&axes);
        if g.is_nan() || g <= 1e-12 {
            return Err(Error::InvalidSlice(format!(
                "axes are not linearly independent (Gram determinant {g:e})"
            )));
        }
        Ok(SliceSpec {
            origin,
            axes,
            extents,
            resolution,
        })
    }

    pub fn origin(&self) -> &ConfigPoint {
        &self.origin
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn extents(&self) -> &[(f64, f64)] {
        &self.extents
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    /// Number of grid axes `m`.
    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn sample_count(&self) -> u128 {
        self.resolution.iter().map(|&r| r as u128).product()
    }

    pub fn check_budget(&self, budget: u64) -> Result<()> {
        let samples = self.sample_count();
        if samples > budget as u128 {
            return Err(Error::BudgetExceeded { samples, budget });
        }
        Ok(())
    }

    /// The same slice with every grid gap halved; sample `i` of this slice
    /// sits at sample `2i` of the refined one, bit for bit.
    pub fn refined(&self) -> SliceSpec {
        SliceSpec {
            resolution: self.resolution.iter().map(|&r| 2 * r - 1).collect(),
            ..self.clone()
        }
    }

    /// Grid parameter along `axis` at index `idx`.
    pub fn param(&self, axis: usize, idx: usize) -> f64 {
        let (lo, hi) = self.extents[axis];
        let steps = (self.resolution[axis] - 1) as f64;
        lo + (hi - lo) * idx as f64 / steps
    }

    /// Multi-index of a flat sample index; axis 0 varies fastest.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        self.resolution
            .iter()
            .map(|&r| {
                let i = flat % r;
                flat /= r;
                i
            })
            .collect()
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.resolution)
            .rev()
            .fold(0, |acc, (&i, &r)| acc * r + i)
    }

    /// Grid parameters `(t_0, …, t_{m-1})` of a flat sample.
    pub fn params(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.param(a, i))
            .collect()
    }

    /// Configuration-space coordinates of a flat sample.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let t = self.params(flat);
        self.origin
            .values()
            .iter()
            .enumerate()
            .map(|(c, &o)| t.iter().zip(&self.axes).fold(o, |acc, (ta, axis)| acc + ta * axis[c]))
            .collect()
    }

    /// Length of the diagonal of one grid cell, measured in configuration space.
    pub fn cell_diagonal(&self) -> f64 {
        self.axes
            .iter()
            .enumerate()
            .map(|(a, axis)| {
                let (lo, hi) = self.extents[a];
                let step = (hi - lo) / (self.resolution[a] - 1) as f64;
                step * step * axis.iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn gram_determinant(axes: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let m = axes.len();
    let g: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| dot(&axes[i], &axes[j])).collect())
        .collect();
    match m {
        1 => g[0][0],
        2 => g[0][0] * g[1][1] - g[0][1] * g[1][0],
        3 => {
            g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
        }
        _ => unreachable!("slice rank checked by caller"),
    }
}

/// A `2^m` block of samples holding at least three distinct owners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCandidate {
    /// Flat index of the block's lowest corner.
    pub anchor: usize,
    /// Distinct owners in the block, ascending.
    pub owners: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterDiagram {
    pub slice: SliceSpec,
    pub owner: Vec<usize>,
    pub distance: Vec<f64>,
    pub tie: Vec<bool>,
    /// Flat indices of samples with an axis neighbour of another owner.
    pub boundary_cells: Vec<usize>,
    pub vertex_candidates: Vec<VertexCandidate>,
}

#[derive(Debug, Clone, Copy)]
pub struct RasterOptions {
    pub sample_budget: u64,
    pub tie_tolerance: f64,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

/// Evaluates every site's distance field over the slice grid. Samples are
/// independent and computed in parallel; the output does not depend on the
/// schedule.
pub fn rasterize(sites: &SiteSet, slice: &SliceSpec, opts: RasterOptions) -> Result<RasterDiagram> {
    slice.check_budget(opts.sample_budget)?;
    if slice.origin().dim() != sites.dim() {
        return Err(Error::Dimension(format!(
            "slice lives in {} configuration space, sites are {}",
            slice.origin().dim(),
            sites.dim()
        )));
    }
    let d = sites.dim().get();
    let n = slice.sample_count() as usize;

    let samples: Vec<Nearest> = (0..n)
        .into_par_iter()
        .map(|flat| {
            let coords = slice.point(flat);
            let query: Vec<Point> = coords
                .chunks_exact(d)
                .map(|c| Point::new(c).expect("finite slice coordinates"))
                .collect();
            let distances = sites.sites().iter().map(|s| dfd_sq(&query, s.vertices()).sqrt());
            pick_nearest(distances, opts.tie_tolerance)
        })
        .collect();

    let owner: Vec<usize> = samples.iter().map(|s| s.index).collect();
    let distance = samples.iter().map(|s| s.distance).collect();
    let tie = samples.iter().map(|s| s.tie).collect();
    let boundary_cells = find_boundary(slice, &owner);
    let vertex_candidates = find_vertex_candidates(slice, &owner);

    Ok(RasterDiagram {
        slice: slice.clone(),
        owner,
        distance,
        tie,
        boundary_cells,
        vertex_candidates,
    })
}

/// Flat offsets to the `+1` neighbour along each axis.
fn strides(slice: &SliceSpec) -> Vec<usize> {
    let mut acc = 1;
    slice
        .resolution()
        .iter()
        .map(|&r| {
            let s = acc;
            acc *= r;
            s
        })
        .collect()
}

fn find_boundary(slice: &SliceSpec, owner: &[usize]) -> Vec<usize> {
    let stride = strides(slice);
    let res = slice.resolution();
    (0..owner.len())
        .filter(|&flat| {
            let idx = slice.unflatten(flat);
            (0..res.len()).any(|a| {
                (idx[a] > 0 && owner[flat - stride[a]] != owner[flat])
                    || (idx[a] + 1 < res[a] && owner[flat + stride[a]] != owner[flat])
            })
        })
        .collect()
}

fn find_vertex_candidates(slice: &SliceSpec, owner: &[usize]) -> Vec<VertexCandidate> {
    let stride = strides(slice);
    let res = slice.resolution();
    let m = res.len();
    let corners: Vec<usize> = (0..1usize << m)
        .map(|mask| (0..m).filter(|a| mask >> a & 1 == 1).map(|a| stride[a]).sum())
        .collect();
    (0..owner.len())
        .filter_map(|flat| {
            let idx = slice.unflatten(flat);
            if idx.iter().zip(res).any(|(&i, &r)| i + 1 >= r) {
                return None;
            }
            let owners: BTreeSet<usize> = corners.iter().map(|&c| owner[flat + c]).collect();
            (owners.len() >= 3).then(|| VertexCandidate {
                anchor: flat,
                owners: owners.into_iter().collect(),
            })
        })
        .collect()
}

impl RasterDiagram {
    /// Flat indices of the `2^m` samples in a candidate's block.
    pub fn block(&self, anchor: usize) -> Vec<usize> {
        let stride = strides(&self.slice);
        let m = stride.len();
        (0..1usize << m)
            .map(|mask| anchor + (0..m).filter(|a| mask >> a & 1 == 1).map(|a| stride[a]).sum::<usize>())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCounts {
    /// Distinct owners present in the raster.
    pub num_cells: usize,
    pub num_boundary: usize,
    pub num_vertex_candidates: usize,
    /// Distinct owner sets (of size three or more) over all vertex candidates.
    pub distinct_owner_triples: usize,
    /// Samples whose owner was decided by the tie rule.
    pub num_ties: usize,
}

pub fn count_features(r: &RasterDiagram) -> FeatureCounts {
    let owners: HashSet<usize> = r.owner.iter().copied().collect();
    let triples: HashSet<&[usize]> = r.vertex_candidates.iter().map(|v| v.owners.as_slice()).collect();
    FeatureCounts {
        num_cells: owners.len(),
        num_boundary: r.boundary_cells.len(),
        num_vertex_candidates: r.vertex_candidates.len(),
        distinct_owner_triples: triples.len(),
        num_ties: r.tie.iter().filter(|&&t| t).count(),
    }
}
