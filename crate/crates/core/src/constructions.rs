//! Generators and checkers for two lower-bound families.
//!
//! **Chebyshev flat.** Points `p` of `[-M, M]^k` are lifted to planar chains
//! `<(p_1, M), (p_2, 2M), …, (p_k, kM)>`. All lifted chains lie in one
//! `k`-flat of configuration space, and between two of them any walk other
//! than the lockstep one pairs vertices at least `M` apart vertically, so
//! whenever the L∞ distance of the base points is below `M` the discrete
//! Fréchet distance equals it.
//!
//! **Co-planar segments.** Planar segments `<(a_1, a_2), (b_1, 0)>` are
//! identified with points `(a_1, a_2, b_1)` of R^3. The family
//! `p_i = <(0,0), (i,0)>` and `q_j = <(j,0), (0,0)>` has bisectors made of
//! planes, circular cones, and full-dimensional lune regions, and a closed
//! form point `t_ij` for each pair of consecutive-site bisectors.

use std::collections::HashSet;

use rand::Rng;

use crate::configspace::{encode, ConfigPoint};
use crate::error::{Error, Result};
use crate::frechet::{dfd, dfd_distance, PairedWalk};
use crate::geometry::{Chain, Dim, Point};
use crate::voronoi::{nearest_site_with_tolerance, Nearest, SiteSet};

// ---------------------------------------------------------------------------
// Chebyshev flat

#[derive(Debug, Clone, PartialEq)]
pub struct LinfEmbedding {
    k: usize,
    bound: f64,
    base_points: Vec<Vec<f64>>,
    chains: Vec<Chain>,
}

fn check_in_cube(p: &[f64], bound: f64) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || v.abs() > bound) {
        return Err(Error::OutOfHypercube {
            point: p.to_vec(),
            bound,
        });
    }
    Ok(())
}

/// `<(p_1, M), (p_2, 2M), …, (p_k, kM)>`.
pub fn lift_to_flat(id: impl Into<String>, p: &[f64], bound: f64) -> Result<Chain> {
    let vertices = p
        .iter()
        .enumerate()
        .map(|(m, &x)| Point::new(&[x, (m + 1) as f64 * bound]))
        .collect::<Result<Vec<_>>>()?;
    Chain::new(id, vertices)
}

/// Keeps the odd-position (x) coordinates of a planar configuration point.
pub fn project_to_base(v: &ConfigPoint) -> Result<Vec<f64>> {
    if v.dim() != Dim::Two {
        return Err(Error::Dimension("projection is defined on planar chains".into()));
    }
    Ok(v.values().iter().step_by(2).copied().collect())
}

pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `n` points drawn uniformly from `[-bound, bound]^k`.
pub fn random_base_points<R: Rng>(rng: &mut R, n: usize, k: usize, bound: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

pub fn build_linf_embedding(base_points: Vec<Vec<f64>>, bound: f64) -> Result<LinfEmbedding> {
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::InvalidArity(format!(
            "hypercube bound must be positive, got {bound}"
        )));
    }
    let k = base_points.first().map(Vec::len).ok_or(Error::EmptySiteSet)?;
    if k == 0 {
        return Err(Error::InvalidArity("base points need at least one coordinate".into()));
    }
    let mut chains = Vec::with_capacity(base_points.len());
    for (i, p) in base_points.iter().enumerate() {
        if p.len() != k {
            return Err(Error::Dimension(format!(
                "base point {} has {} coordinates, expected {k}",
                i + 1,
                p.len()
            )));
        }
        check_in_cube(p, bound)?;
        chains.push(lift_to_flat(format!("c{}", i + 1), p, bound)?);
    }
    Ok(LinfEmbedding {
        k,
        bound,
        base_points,
        chains,
    })
}

impl LinfEmbedding {
    /// Recovers an embedding from its lifted chains, checking that every
    /// vertex `m` sits at height `m * M`.
    pub fn from_chains(chains: Vec<Chain>) -> Result<Self> {
        let first = chains.first().ok_or(Error::EmptySiteSet)?;
        let bound = first.vertices()[0].y();
        let k = first.len();
        let mut base_points = Vec::with_capacity(chains.len());
        for c in &chains {
            if c.dim() != Dim::Two || c.len() != k {
                return Err(Error::Dimension(format!(
                    "chain {:?} is not a planar chain with {k} vertices",
                    c.id()
                )));
            }
            for (m, v) in c.vertices().iter().enumerate() {
                if v.y() != (m + 1) as f64 * bound {
                    return Err(Error::InvalidArity(format!(
                        "chain {:?} vertex {} has height {}, expected {}",
                        c.id(),
                        m + 1,
                        v.y(),
                        (m + 1) as f64 * bound
                    )));
                }
            }
            base_points.push(project_to_base(&encode(c))?);
        }
        if bound.is_nan() || bound <= 0.0 {
            return Err(Error::InvalidArity(format!(
                "hypercube bound must be positive, got {bound}"
            )));
        }
        for p in &base_points {
            check_in_cube(p, bound)?;
        }
        Ok(LinfEmbedding {
            k,
            bound,
            base_points,
            chains,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn base_points(&self) -> &[Vec<f64>] {
        &self.base_points
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn sites(&self) -> Result<SiteSet> {
        SiteSet::new(self.chains.clone())
    }

    /// Brute-force L∞ nearest base point, lowest index on ties.
    pub fn linf_nearest(&self, query: &[f64], tol: f64) -> Nearest {
        let ds: Vec<f64> = self.base_points.iter().map(|p| chebyshev(query, p)).collect();
        let best = ds.iter().copied().fold(f64::INFINITY, f64::min);
        let mut close = ds.iter().enumerate().filter(|(_, &d)| d <= best + tol);
        let (index, &distance) = close.next().expect("non-empty embedding");
        Nearest {
            index,
            distance,
            tie: close.next().is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteIdentity {
    /// 0-based site index.
    pub index: usize,
    pub linf: f64,
    pub frechet: f64,
    /// `linf < M`: the identity is asserted only for these sites.
    pub gated: bool,
    pub matches: bool,
    /// The optimal alignment is the lockstep walk `{(t_m, c_m)}`.
    pub lockstep: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinfReport {
    pub query: Vec<f64>,
    pub sites: Vec<SiteIdentity>,
    pub linf_nearest: Nearest,
    pub frechet_nearest: Nearest,
    /// `None` when the comparison is not asserted (tie, or L∞ NN at least `M`).
    pub nearest_agrees: Option<bool>,
}

impl LinfReport {
    pub fn passed(&self) -> bool {
        self.sites.iter().all(|s| !s.gated || (s.matches && s.lockstep)) && self.nearest_agrees != Some(false)
    }
}

/// Checks `d_F(T, C_i) = d_∞(T', C'_i)` at every site closer than `M` in
/// L∞, and that Fréchet and L∞ nearest neighbours agree.
pub fn verify_linf_identity(emb: &LinfEmbedding, query: &[f64], tol: f64) -> Result<LinfReport> {
    if query.len() != emb.k {
        return Err(Error::Dimension(format!(
            "query has {} coordinates, embedding has k = {}",
            query.len(),
            emb.k
        )));
    }
    check_in_cube(query, emb.bound)?;
    let t = lift_to_flat("T", query, emb.bound)?;
    let lockstep = PairedWalk::lockstep(emb.k);
    let sites = emb
        .chains
        .iter()
        .zip(&emb.base_points)
        .enumerate()
        .map(|(index, (c, p))| {
            let linf = chebyshev(query, p);
            let r = dfd(&t, c)?;
            Ok(SiteIdentity {
                index,
                linf,
                frechet: r.distance,
                gated: linf < emb.bound,
                matches: (r.distance - linf).abs() <= tol,
                lockstep: r.alignment == lockstep,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let linf_nearest = emb.linf_nearest(query, tol);
    let frechet_nearest = nearest_site_with_tolerance(&t, &emb.sites()?, tol)?;
    let nearest_agrees = (!linf_nearest.tie && linf_nearest.distance < emb.bound)
        .then_some(frechet_nearest.index == linf_nearest.index && !frechet_nearest.tie);

    Ok(LinfReport {
        query: query.to_vec(),
        sites,
        linf_nearest,
        frechet_nearest,
        nearest_agrees,
    })
}

// ---------------------------------------------------------------------------
// Co-planar segment family

/// The segment `<(x, y), (z, 0)>` standing for the spatial point `(x, y, z)`.
pub fn point_chain(s: [f64; 3]) -> Chain {
    Chain::planar("s", &[(s[0], s[1]), (s[2], 0.0)]).expect("finite point")
}

/// Inverse of [`point_chain`] for planar segments ending on the x-axis.
pub fn chain_point(c: &Chain) -> Result<[f64; 3]> {
    let v = c.vertices();
    if c.dim() != Dim::Two || v.len() != 2 || v[1].y() != 0.0 {
        return Err(Error::InvalidArity(format!(
            "chain {:?} is not a planar segment ending on the x-axis",
            c.id()
        )));
    }
    Ok([v[0].x(), v[0].y(), v[1].x()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateFamily {
    n: usize,
    p: Vec<Chain>,
    q: Vec<Chain>,
}

pub fn build_degenerate(n: usize) -> Result<DegenerateFamily> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArity(format!(
            "family size must be even and at least 4, got {n}"
        )));
    }
    let half = n / 2;
    let p = (1..=half)
        .map(|i| point_chain([0.0, 0.0, i as f64]).with_id(format!("p{i}")))
        .collect();
    let q = (1..=half)
        .map(|j| point_chain([j as f64, 0.0, 0.0]).with_id(format!("q{j}")))
        .collect();
    Ok(DegenerateFamily { n, p, q })
}

impl DegenerateFamily {
    /// Rebuilds a family from its chains (ids `p1…`, `q1…` in any order) and
    /// checks every chain against the generator.
    pub fn from_sites(sites: &SiteSet) -> Result<Self> {
        let n = sites.len();
        let expected = build_degenerate(n)?;
        for c in expected.p.iter().chain(&expected.q) {
            let got = sites
                .get(c.id())
                .ok_or_else(|| Error::InvalidArity(format!("family is missing chain {:?}", c.id())))?;
            if got != c {
                return Err(Error::InvalidArity(format!(
                    "chain {:?} does not match the co-planar construction",
                    c.id()
                )));
            }
        }
        Ok(expected)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// `p_i`, 1-based.
    pub fn p(&self, i: usize) -> &Chain {
        &self.p[i - 1]
    }

    /// `q_j`, 1-based.
    pub fn q(&self, j: usize) -> &Chain {
        &self.q[j - 1]
    }

    /// All chains, `p_1…p_{n/2}` then `q_1…q_{n/2}`.
    pub fn chains(&self) -> Vec<Chain> {
        self.p.iter().chain(&self.q).cloned().collect()
    }

    pub fn sites(&self) -> SiteSet {
        SiteSet::new(self.chains()).expect("generated family is a valid site set")
    }

    /// The family as points of R^3.
    pub fn points(&self) -> Vec<[f64; 3]> {
        self.p
            .iter()
            .chain(&self.q)
            .map(|c| chain_point(c).expect("generated segment"))
            .collect()
    }

    /// Pairs `(i, j)` with a real `t_ij` and all four defining sites present.
    pub fn vertex_pairs(&self) -> Vec<(usize, usize)> {
        let half = self.half();
        (1..half)
            .flat_map(|i| (1..i).filter(move |&j| j < half).map(move |j| (i, j)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatchKind {
    Plane,
    ParaboloidCap,
    LuneRegion,
}

/// A piece of a bisector in the spatial picture of the co-planar family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BisectorPatch {
    /// The plane `z = height` restricted to `x² + y² <= radius²`.
    DiskPlane { height: f64, radius: f64 },
    /// The plane `x = j + 1/2` where `z² <= (x - j)² + y²`.
    StripPlane { j: f64 },
    /// One sheet of the cone `(z - apex)² = x² + y²`: `z = apex + r` when
    /// `upward`, `z = apex - r` otherwise, for `r = √(x² + y²) >= min_radius`.
    ParaboloidCap { apex: f64, upward: bool, min_radius: f64 },
    /// Points with `z² >= (x - j)² + y²` and `z² >= (x - j - 1)² + y²`; each
    /// horizontal slice is the lune of two disks of radius `|z|`.
    LuneRegion { j: f64 },
}

impl BisectorPatch {
    pub fn kind(&self) -> PatchKind {
        match self {
            BisectorPatch::DiskPlane { .. } | BisectorPatch::StripPlane { .. } => PatchKind::Plane,
            BisectorPatch::ParaboloidCap { .. } => PatchKind::ParaboloidCap,
            BisectorPatch::LuneRegion { .. } => PatchKind::LuneRegion,
        }
    }

    pub fn contains(&self, s: [f64; 3], tol: f64) -> bool {
        let [x, y, z] = s;
        match *self {
            BisectorPatch::DiskPlane { height, radius } => (z - height).abs() <= tol && x.hypot(y) <= radius + tol,
            BisectorPatch::StripPlane { j } => (x - j - 0.5).abs() <= tol && z.abs() <= (x - j).hypot(y) + tol,
            BisectorPatch::ParaboloidCap {
                apex,
                upward,
                min_radius,
            } => {
                let r = x.hypot(y);
                let rise = if upward { z - apex } else { apex - z };
                (rise - r).abs() <= tol && r >= min_radius - tol
            }
            BisectorPatch::LuneRegion { j } => {
                let c = z.abs();
                (x - j).hypot(y) <= c + tol && (x - j - 1.0).hypot(y) <= c + tol
            }
        }
    }

    /// Draws a point on the patch. Unbounded patches are truncated to radii
    /// (or heights) up to `reach`.
    pub fn sample<R: Rng>(&self, rng: &mut R, reach: f64) -> [f64; 3] {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        match *self {
            BisectorPatch::DiskPlane { height, radius } => {
                let r = radius * rng.gen_range(0.0f64..=1.0).sqrt();
                [r * angle.cos(), r * angle.sin(), height]
            }
            BisectorPatch::StripPlane { j } => {
                let y = rng.gen_range(-reach..=reach);
                let limit = 0.5f64.hypot(y);
                [j + 0.5, y, rng.gen_range(-limit..=limit)]
            }
            BisectorPatch::ParaboloidCap {
                apex,
                upward,
                min_radius,
            } => {
                let r = rng.gen_range(min_radius..=min_radius.max(reach));
                let z = if upward { apex + r } else { apex - r };
                [r * angle.cos(), r * angle.sin(), z]
            }
            BisectorPatch::LuneRegion { j } => {
                // The lune is non-empty once |z| exceeds 1/2.
                let c = rng.gen_range(0.75..=reach.max(0.75));
                let z = if rng.gen_bool(0.5) { c } else { -c };
                loop {
                    let x = rng.gen_range(j + 1.0 - c..=j + c);
                    let y = rng.gen_range(-c..=c);
                    if (x - j).hypot(y) <= c && (x - j - 1.0).hypot(y) <= c {
                        return [x, y, z];
                    }
                }
            }
        }
    }
}

/// Bisector of `p_i` and `p_{i+1}`: the disk `z = i + 1/2, r <= 1/2`
/// and the two cone sheets bounding the region where `√(x²+y²)` dominates.
pub fn p_bisector(i: usize) -> Vec<BisectorPatch> {
    let i = i as f64;
    vec![
        BisectorPatch::DiskPlane {
            height: i + 0.5,
            radius: 0.5,
        },
        BisectorPatch::ParaboloidCap {
            apex: i,
            upward: true,
            min_radius: 0.5,
        },
        BisectorPatch::ParaboloidCap {
            apex: i + 1.0,
            upward: false,
            min_radius: 0.5,
        },
    ]
}

/// Bisector of `q_j` and `q_{j+1}`: the plane `x = j + 1/2` where the
/// in-plane term dominates, and the lune region where `|z|` dominates.
pub fn q_bisector(j: usize) -> Vec<BisectorPatch> {
    let j = j as f64;
    vec![BisectorPatch::StripPlane { j }, BisectorPatch::LuneRegion { j }]
}

/// Distance-equality membership test: `|d_F(s, a) - d_F(s, b)| <= tol`.
pub fn equidistant(s: [f64; 3], a: &Chain, b: &Chain, tol: f64) -> Result<bool> {
    let c = point_chain(s);
    Ok((dfd_distance(&c, a)? - dfd_distance(&c, b)?).abs() <= tol)
}

/// `t_ij = ((j+1)/2, √(i² - (j+1)²)/2, i/2)`, the first intersection of the
/// `p_i | p_{i+1}` and `q_j | q_{j+1}` bisectors.
pub fn t_vertex(i: usize, j: usize) -> Result<Point> {
    if i == 0 || j == 0 {
        return Err(Error::OutOfRange(format!("indices start at 1, got ({i}, {j})")));
    }
    if i < j + 1 {
        return Err(Error::ComplexVertex { i, j });
    }
    let (fi, fj1) = (i as f64, (j + 1) as f64);
    Ok(Point::xyz(fj1 / 2.0, (fi * fi - fj1 * fj1).sqrt() / 2.0, fi / 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub site: String,
    pub distance: f64,
    pub requirement: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexReport {
    pub i: usize,
    pub j: usize,
    pub t: Point,
    /// `d_F(t_ij, p_h)` for `h = 1..=n/2`.
    pub p_distances: Vec<f64>,
    /// `d_F(t_ij, q_m)` for `m = 1..=n/2`.
    pub q_distances: Vec<f64>,
    /// Distances to `p_i, p_{i+1}, q_j, q_{j+1}`.
    pub defining: [f64; 4],
    pub violations: Vec<Violation>,
}

impl VertexReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether all four defining sites sit at exactly `i/2`.
    pub fn equidistant(&self, tol: f64) -> bool {
        let half = self.i as f64 / 2.0;
        self.defining.iter().all(|d| (d - half).abs() <= tol)
    }
}

/// Checks the distances from `t_ij` to every site of the family:
/// `d_F(t_ij, p_h) = max(i/2, |i/2 - h|)` (so `= i/2` for `h < i` and
/// `> i/2` for `h > i`), and `d_F(t_ij, q_m) >= i/2` with strict inequality
/// for `m > j + 1`.
pub fn verify_vertex(family: &DegenerateFamily, i: usize, j: usize, tol: f64) -> Result<VertexReport> {
    let t = t_vertex(i, j)?;
    let half_n = family.half();
    if i + 1 > half_n || j + 1 > half_n {
        return Err(Error::OutOfRange(format!(
            "t({i},{j}) needs p_{} and q_{}, family has {half_n} of each",
            i + 1,
            j + 1
        )));
    }
    let tc = point_chain([t.x(), t.y(), t.z()]);
    let half = i as f64 / 2.0;
    let mut violations = Vec::new();
    let mut flag = |site: &Chain, distance: f64, requirement: String| {
        violations.push(Violation {
            site: site.id().to_string(),
            distance,
            requirement,
        })
    };

    let mut p_distances = Vec::with_capacity(half_n);
    for h in 1..=half_n {
        let site = family.p(h);
        let d = dfd_distance(&tc, site)?;
        let expected = half.max((half - h as f64).abs());
        if (d - expected).abs() > tol {
            flag(site, d, format!("= max(i/2, |i/2 - h|) = {expected}"));
        }
        if h > i && d <= half + tol {
            flag(site, d, format!("> i/2 = {half}"));
        }
        if h < i && (d - half).abs() > tol {
            flag(site, d, format!("= i/2 = {half}"));
        }
        p_distances.push(d);
    }

    let mut q_distances = Vec::with_capacity(half_n);
    for m in 1..=half_n {
        let site = family.q(m);
        let d = dfd_distance(&tc, site)?;
        if d < half - tol {
            flag(site, d, format!(">= i/2 = {half}"));
        }
        if m > j + 1 && d <= half + tol {
            flag(site, d, format!("> i/2 = {half}"));
        }
        q_distances.push(d);
    }

    let defining = [p_distances[i - 1], p_distances[i], q_distances[j - 1], q_distances[j]];
    Ok(VertexReport {
        i,
        j,
        t,
        p_distances,
        q_distances,
        defining,
        violations,
    })
}

/// Number of pairs `(i, j)` whose `t_ij` passes [`verify_vertex`] and is
/// distinct from every other counted point.
pub fn count_vertices(family: &DegenerateFamily, tol: f64) -> Result<usize> {
    let mut seen = HashSet::new();
    let mut count = 0;
    for (i, j) in family.vertex_pairs() {
        let report = verify_vertex(family, i, j, tol)?;
        let key = report.t.coords().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        if report.passed() && seen.insert(key) {
            count += 1;
        }
    }
    Ok(count)
}
