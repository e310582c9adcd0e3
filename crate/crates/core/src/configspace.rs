//! Chains as points of configuration space.
//!
//! A chain of `k` vertices in R^d is a single point of R^{dk}, laid out
//! vertex-major: `(x(c_1), y(c_1)[, z(c_1)], x(c_2), …)`. Distance to a site
//! chain then becomes a scalar field over that space, and the vertex pair
//! realizing the distance identifies which algebraic branch of the field is
//! active at a sample.

use crate::error::{Error, Result};
use crate::frechet::dfd;
use crate::geometry::{Chain, Dim, Point};

/// A chain flattened to `d * k` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigPoint {
    values: Vec<f64>,
    dim: Dim,
}

impl ConfigPoint {
    pub fn new(values: Vec<f64>, dim: Dim) -> Result<Self> {
        let d = dim.get();
        if values.is_empty() || !values.len().is_multiple_of(d) {
            return Err(Error::Dimension(format!(
                "{} coordinates do not form whole {dim} vertices",
                values.len()
            )));
        }
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(ConfigPoint { values, dim })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Number of chain vertices encoded.
    pub fn vertex_count(&self) -> usize {
        self.values.len() / self.dim.get()
    }
}

/// Flattens a chain into configuration space.
pub fn encode(chain: &Chain) -> ConfigPoint {
    let values = chain
        .vertices()
        .iter()
        .flat_map(|v| v.coords().iter().copied())
        .collect();
    ConfigPoint {
        values,
        dim: chain.dim(),
    }
}

/// Rebuilds the chain a configuration point stands for. The chain id is
/// empty; attach one with [`Chain::with_id`].
pub fn decode(v: &ConfigPoint) -> Chain {
    let vertices = v
        .values
        .chunks_exact(v.dim.get())
        .map(|c| Point::new(c).expect("validated on construction"))
        .collect();
    Chain::new(String::new(), vertices).expect("validated on construction")
}

/// Which vertex pair determines the distance field at a sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegionSignature {
    /// 1-based `(i, j)`: vertex `i` of the query chain and vertex `j` of the site.
    pub active_pair: (usize, usize),
    /// All `k * l` vertex pairs, sorted by increasing distance (ties by
    /// index). Filled only when requested.
    pub distance_order: Option<Vec<(usize, usize)>>,
}

/// Value of the field `C -> d_F(C, site)` at `v`, plus the active branch.
pub fn distance_field(site: &Chain, v: &ConfigPoint, with_order: bool) -> Result<(f64, RegionSignature)> {
    if v.dim != site.dim() {
        return Err(Error::Dimension(format!(
            "configuration point is {} but site {:?} is {}",
            v.dim,
            site.id(),
            site.dim()
        )));
    }
    let query = decode(v);
    let result = dfd(&query, site)?;
    let distance_order = with_order.then(|| {
        let mut pairs: Vec<(f64, (usize, usize))> = query
            .vertices()
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                site.vertices()
                    .iter()
                    .enumerate()
                    .map(move |(j, b)| (c.dist_sq_unchecked(b), (i + 1, j + 1)))
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        pairs.into_iter().map(|(_, p)| p).collect()
    });
    Ok((
        result.distance,
        RegionSignature {
            active_pair: result.realizing_pair,
            distance_order,
        },
    ))
}

/// Evaluates the single branch `|c_i - b_j|` named by `signature` directly.
pub fn branch_value(site: &Chain, v: &ConfigPoint, signature: &RegionSignature) -> Result<f64> {
    let (i, j) = signature.active_pair;
    let k = v.vertex_count();
    if i == 0 || i > k || j == 0 || j > site.len() {
        return Err(Error::OutOfRange(format!(
            "active pair ({i}, {j}) outside 1..={k} x 1..={}",
            site.len()
        )));
    }
    if v.dim != site.dim() {
        return Err(Error::Dimension("configuration point and site differ".into()));
    }
    let d = v.dim.get();
    let c = &v.values[(i - 1) * d..i * d];
    let b = site.vertices()[j - 1].coords();
    Ok(c.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}
