//! Points, chains, and the Euclidean metric in two or three dimensions.
//!
//! Dimension is a runtime property: a [`Point`] knows whether it lives in the
//! plane or in space, and every binary operation rejects mixed dimensions.

use std::fmt;

use crate::error::{Error, Result};

/// Ambient dimension of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(Error::Dimension(format!(
                "only 2D and 3D coordinates are supported, got {other}"
            ))),
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D", self.get())
    }
}

/// A position in R^2 or R^3 with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: Dim,
}

impl Point {
    /// Builds a point from a 2- or 3-element coordinate slice.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = Dim::new(coords.len())?;
        let mut buf = [0.0; 3];
        for (position, (&value, slot)) in coords.iter().zip(buf.iter_mut()).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { position, value });
            }
            *slot = value;
        }
        Ok(Point { coords: buf, dim })
    }

    /// Planar point. Panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Point::new(&[x, y]).expect("finite 2D coordinates")
    }

    /// Spatial point. Panics on non-finite input.
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point::new(&[x, y, z]).expect("finite 3D coordinates")
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim.get()]
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    /// Third coordinate; zero for planar points.
    #[inline]
    pub fn z(&self) -> f64 {
        self.coords[2]
    }

    /// Squared distance without the dimension check. Planar points carry a
    /// zero third coordinate, so the sum over all three slots is exact.
    #[inline]
    pub(crate) fn dist_sq_unchecked(&self, other: &Point) -> f64 {
        let dx = self.coords[0] - other.coords[0];
        let dy = self.coords[1] - other.coords[1];
        let dz = self.coords[2] - other.coords[2];
        dx * dx + dy * dy + dz * dz
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            Dim::Two => write!(f, "({}, {})", self.x(), self.y()),
            Dim::Three => write!(f, "({}, {}, {})", self.x(), self.y(), self.z()),
        }
    }
}

fn check_same_dim(a: &Point, b: &Point) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::Dimension(format!(
            "cannot compare a {} point with a {} point",
            a.dim, b.dim
        )));
    }
    Ok(())
}

/// Euclidean distance.
pub fn euclid(a: &Point, b: &Point) -> Result<f64> {
    euclid_sq(a, b).map(f64::sqrt)
}

/// Squared Euclidean distance, for comparisons where only ordering matters.
pub fn euclid_sq(a: &Point, b: &Point) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok(a.dist_sq_unchecked(b))
}

/// A polygonal chain: a labelled, non-empty sequence of vertices sharing one
/// dimension. Consecutive duplicates are kept as given.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    id: String,
    vertices: Vec<Point>,
}

impl Chain {
    pub fn new(id: impl Into<String>, vertices: Vec<Point>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyChain)?;
        if let Some((pos, bad)) = vertices.iter().enumerate().find(|(_, v)| v.dim() != first.dim()) {
            return Err(Error::Dimension(format!(
                "vertex {} is {} but vertex 1 is {}",
                pos + 1,
                bad.dim(),
                first.dim()
            )));
        }
        Ok(Chain {
            id: id.into(),
            vertices,
        })
    }

    /// Convenience constructor for planar chains from coordinate pairs.
    pub fn planar(id: impl Into<String>, coords: &[(f64, f64)]) -> Result<Self> {
        let vertices = coords
            .iter()
            .map(|&(x, y)| Point::new(&[x, y]))
            .collect::<Result<Vec<_>>>()?;
        Chain::new(id, vertices)
    }

    /// Convenience constructor for spatial chains from coordinate triples.
    pub fn spatial(id: impl Into<String>, coords: &[(f64, f64, f64)]) -> Result<Self> {
        let vertices = coords
            .iter()
            .map(|&(x, y, z)| Point::new(&[x, y, z]))
            .collect::<Result<Vec<_>>>()?;
        Chain::new(id, vertices)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Number of vertices, always at least one.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> Dim {
        self.vertices[0].dim()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}
