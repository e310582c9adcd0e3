//! File formats: JSON-Lines chain files, JSON slice specs, and PGM / CSV
//! rasters.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::configspace::ConfigPoint;
use crate::error::{Error, Result};
use crate::geometry::{Chain, Dim, Point};
use crate::voronoi::{RasterDiagram, SiteSet, SliceSpec, DEFAULT_SAMPLE_BUDGET};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainRecord {
    id: String,
    vertices: Vec<Vec<f64>>,
}

/// Parses a chain file: one `{"id": …, "vertices": [[x, y], …]}` object per
/// line. Blank lines are skipped. The dimension is taken from the first
/// record.
pub fn parse_chains(text: &str) -> Result<SiteSet> {
    let mut chains = Vec::new();
    let mut first: Option<(usize, Dim)> = None;
    let mut ids: HashMap<String, usize> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let record: ChainRecord = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let vertices = record
            .vertices
            .iter()
            .map(|v| Point::new(v))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| parse_err(format!("chain {:?}: {e}", record.id)))?;
        let chain = Chain::new(record.id, vertices).map_err(|e| parse_err(e.to_string()))?;
        match first {
            None => first = Some((line_no, chain.dim())),
            Some((first_line, dim)) if dim != chain.dim() => {
                return Err(Error::Dimension(format!(
                    "line {line_no} holds a {} chain but line {first_line} set the file to {dim}",
                    chain.dim()
                )));
            }
            Some(_) => {}
        }
        if ids.insert(chain.id().to_string(), line_no).is_some() {
            return Err(Error::DuplicateId {
                id: chain.id().to_string(),
                line: Some(line_no),
            });
        }
        chains.push(chain);
    }
    SiteSet::new(chains)
}

pub fn load_chains(path: impl AsRef<Path>) -> Result<SiteSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_chains(&text)
}

/// Serializes chains as JSON Lines, one record per chain.
pub fn format_chains(chains: &[Chain]) -> String {
    let mut out = String::new();
    for c in chains {
        let record = ChainRecord {
            id: c.id().to_string(),
            vertices: c.vertices().iter().map(|v| v.coords().to_vec()).collect(),
        };
        out.push_str(&serde_json::to_string(&record).expect("finite coordinates serialize"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceRecord {
    origin: Vec<f64>,
    axes: Vec<Vec<f64>>,
    extents: Vec<[f64; 2]>,
    resolution: Vec<usize>,
}

/// Parses a slice document
/// `{"origin": [...], "axes": [[...], ...], "extents": [[lo, hi], ...], "resolution": [...]}`
/// for chains of dimension `dim`.
pub fn parse_slice(text: &str, dim: Dim) -> Result<SliceSpec> {
    let r: SliceRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let origin = ConfigPoint::new(r.origin, dim)?;
    SliceSpec::new(
        origin,
        r.axes,
        r.extents.into_iter().map(|[lo, hi]| (lo, hi)).collect(),
        r.resolution,
    )
}

pub fn format_slice(slice: &SliceSpec) -> String {
    let r = SliceRecord {
        origin: slice.origin().values().to_vec(),
        axes: slice.axes().to_vec(),
        extents: slice.extents().iter().map(|&(lo, hi)| [lo, hi]).collect(),
        resolution: slice.resolution().to_vec(),
    };
    serde_json::to_string_pretty(&r).expect("finite slice serializes") + "\n"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    Pgm,
    Csv,
}

impl std::str::FromStr for RasterFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm" => Ok(RasterFormat::Pgm),
            "csv" => Ok(RasterFormat::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Renders a raster in the requested format.
///
/// PGM is plain `P2` with maxval 255, one text row per value of axis 1;
/// owners map linearly onto 0..=254 and tied samples are 255. CSV has the
/// header `axis0,axis1[,axis2],owner,distance,tie` and one row per sample,
/// axis 0 varying fastest, with reals printed to 17 significant digits.
pub fn emit_raster(r: &RasterDiagram, format: RasterFormat) -> Result<String> {
    match format {
        RasterFormat::Pgm => emit_pgm(r),
        RasterFormat::Csv => Ok(emit_csv(r)),
    }
}

fn emit_pgm(r: &RasterDiagram) -> Result<String> {
    let res = r.slice.resolution();
    if res.len() != 2 {
        return Err(Error::UnsupportedFormat(format!(
            "pgm needs a 2D slice, this one has {} axes",
            res.len()
        )));
    }
    let top = r.owner.iter().copied().max().unwrap_or(0);
    let level = |flat: usize| -> usize {
        if r.tie[flat] {
            255
        } else {
            (r.owner[flat] * 254 + top / 2).checked_div(top).unwrap_or(0)
        }
    };
    let (w, h) = (res[0], res[1]);
    let mut out = format!("P2\n{w} {h}\n255\n");
    for row in 0..h {
        let line: Vec<String> = (0..w).map(|col| level(row * w + col).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn emit_csv(r: &RasterDiagram) -> String {
    let m = r.slice.rank();
    let mut out = String::new();
    for a in 0..m {
        let _ = write!(out, "axis{a},");
    }
    out.push_str("owner,distance,tie\n");
    for flat in 0..r.owner.len() {
        for t in r.slice.params(flat) {
            let _ = write!(out, "{t:.16e},");
        }
        let _ = writeln!(
            out,
            "{},{:.16e},{}",
            r.owner[flat],
            r.distance[flat],
            u8::from(r.tie[flat])
        );
    }
    out
}

/// One parsed CSV raster row.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterRow {
    pub params: Vec<f64>,
    pub owner: usize,
    pub distance: f64,
    pub tie: bool,
}

/// Parses CSV produced by [`emit_raster`].
pub fn parse_raster_csv(text: &str) -> Result<Vec<RasterRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let m = headers
        .len()
        .checked_sub(3)
        .filter(|m| (1..=3).contains(m))
        .ok_or(Error::Parse {
            line: 1,
            message: format!("expected 4 to 6 columns, got {}", headers.len()),
        })?;
    let expected: Vec<String> = (0..m)
        .map(|a| format!("axis{a}"))
        .chain(["owner", "distance", "tie"].map(String::from))
        .collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let line = n + 2;
        let err = |message: String| Error::Parse { line, message };
        let record = record.map_err(|e| err(e.to_string()))?;
        let real = |i: usize| -> Result<f64> {
            let v: f64 = record[i].parse().map_err(|e| err(format!("column {}: {e}", i + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("column {} is not finite", i + 1)))
            }
        };
        let params = (0..m).map(real).collect::<Result<Vec<_>>>()?;
        let owner = record[m].parse().map_err(|e| err(format!("owner: {e}")))?;
        let distance = real(m + 1)?;
        let tie = match &record[m + 2] {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("tie must be 0 or 1, got {other:?}"))),
        };
        rows.push(RasterRow {
            params,
            owner,
            distance,
            tie,
        });
    }
    Ok(rows)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, renamed into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Settings shared by randomized sweeps and raster runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub sample_budget: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-9,
            sample_budget: DEFAULT_SAMPLE_BUDGET,
            seed: 0,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArity(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.sample_budget == 0 {
            return Err(Error::InvalidArity("sample budget must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::{rasterize, RasterOptions};

    #[test]
    fn parse_examples() {
        let s = parse_chains("{\"id\":\"a\",\"vertices\":[[0,0],[1,0]]}\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.dim(), Dim::Two);
        assert_eq!(s.sites()[0].len(), 2);
        assert!(matches!(parse_chains(""), Err(Error::EmptySiteSet)));
        assert!(matches!(parse_chains("\n  \n"), Err(Error::EmptySiteSet)));
    }

    #[test]
    fn mixed_dimensions_name_both_lines() {
        let text = "{\"id\":\"a\",\"vertices\":[[0,0]]}\n\n{\"id\":\"b\",\"vertices\":[[0,0,0]]}\n";
        match parse_chains(text) {
            Err(Error::Dimension(msg)) => {
                assert!(msg.contains("line 3") && msg.contains("line 1"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\"id\":\"a\",\"vertices\":[[0,0]]}\n{\"id\":\"b\",\"vertices\":[]}\n";
        assert!(matches!(parse_chains(text), Err(Error::Parse { line: 2, .. })));
        let text = "{\"id\":\"a\",\"vertices\":[[0,0]]}\nnot json\n";
        assert!(matches!(parse_chains(text), Err(Error::Parse { line: 2, .. })));
        let text = "{\"id\":\"a\",\"vertices\":[[0]]}\n";
        assert!(matches!(parse_chains(text), Err(Error::Parse { line: 1, .. })));
        let text = "{\"id\":\"a\",\"vertices\":[[0,0]],\"extra\":1}\n";
        assert!(matches!(parse_chains(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = "{\"id\":\"a\",\"vertices\":[[0,0]]}\n{\"id\":\"a\",\"vertices\":[[1,0]]}\n";
        assert!(matches!(
            parse_chains(text),
            Err(Error::DuplicateId { line: Some(2), .. })
        ));
    }

    #[test]
    fn chain_file_round_trip() {
        let chains = vec![
            Chain::spatial("x", &[(0.1, -2.5, 1e-300), (3.0, 4.0, 5.0)]).unwrap(),
            Chain::spatial("y", &[(1.0 / 3.0, 0.0, 0.0)]).unwrap(),
        ];
        let parsed = parse_chains(&format_chains(&chains)).unwrap();
        assert_eq!(parsed.sites(), chains.as_slice());
    }

    fn sample_raster(res: [usize; 2]) -> RasterDiagram {
        let sites = SiteSet::new(vec![
            Chain::planar("a", &[(0.0, 0.0)]).unwrap(),
            Chain::planar("b", &[(4.0, 0.0)]).unwrap(),
        ])
        .unwrap();
        let slice = parse_slice(
            &format!(
                r#"{{"origin":[0,0],"axes":[[1,0],[0,1]],"extents":[[0,4],[-1,1]],"resolution":[{},{}]}}"#,
                res[0], res[1]
            ),
            Dim::Two,
        )
        .unwrap();
        rasterize(&sites, &slice, RasterOptions::default()).unwrap()
    }

    #[test]
    fn pgm_output() {
        let single = SiteSet::new(vec![Chain::planar("a", &[(0.0, 0.0)]).unwrap()]).unwrap();
        let slice = parse_slice(
            r#"{"origin":[0,0],"axes":[[1,0],[0,1]],"extents":[[0,1],[0,1]],"resolution":[2,2]}"#,
            Dim::Two,
        )
        .unwrap();
        let r = rasterize(&single, &slice, RasterOptions::default()).unwrap();
        assert_eq!(emit_raster(&r, RasterFormat::Pgm).unwrap(), "P2\n2 2\n255\n0 0\n0 0\n");

        let r = sample_raster([5, 2]);
        assert_eq!(
            emit_raster(&r, RasterFormat::Pgm).unwrap(),
            "P2\n5 2\n255\n0 0 255 254 254\n0 0 255 254 254\n"
        );
    }

    #[test]
    fn pgm_rejects_other_ranks() {
        let sites = SiteSet::new(vec![Chain::planar("a", &[(0.0, 0.0)]).unwrap()]).unwrap();
        let slice = parse_slice(
            r#"{"origin":[0,0],"axes":[[1,0]],"extents":[[0,1]],"resolution":[4]}"#,
            Dim::Two,
        )
        .unwrap();
        let r = rasterize(&sites, &slice, RasterOptions::default()).unwrap();
        assert!(matches!(
            emit_raster(&r, RasterFormat::Pgm),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(emit_raster(&r, RasterFormat::Csv)
            .unwrap()
            .starts_with("axis0,owner,distance,tie\n"));
    }

    #[test]
    fn csv_output_round_trips() {
        let r = sample_raster([9, 5]);
        let text = emit_raster(&r, RasterFormat::Csv).unwrap();
        assert!(text.starts_with("axis0,axis1,owner,distance,tie\n"));
        assert_eq!(text.lines().count(), 1 + 9 * 5);
        let rows = parse_raster_csv(&text).unwrap();
        assert_eq!(rows.iter().map(|r| r.owner).collect::<Vec<_>>(), r.owner);
        assert_eq!(rows.iter().map(|r| r.distance).collect::<Vec<_>>(), r.distance);
        assert_eq!(rows.iter().map(|r| r.tie).collect::<Vec<_>>(), r.tie);
        assert_eq!(rows[10].params, r.slice.params(10));
    }

    #[test]
    fn csv_parse_errors() {
        assert!(parse_raster_csv("a,b\n").is_err());
        assert!(parse_raster_csv("axis0,owner,distance,tie\n0,0,1.0,2\n").is_err());
        assert!(parse_raster_csv("axis0,owner,distance,tie\n0,x,1.0,0\n").is_err());
        assert!(parse_raster_csv("axis0,owner,distance,tie\nNaN,0,1.0,0\n").is_err());
        assert_eq!(parse_raster_csv("axis0,owner,distance,tie\n").unwrap(), vec![]);
    }

    #[test]
    fn slice_round_trip() {
        let text = r#"{"origin":[0,0,1,1],"axes":[[1,0,0,0],[0,0,1,0]],"extents":[[0,6],[0,6]],"resolution":[7,13]}"#;
        let s = parse_slice(text, Dim::Two).unwrap();
        assert_eq!(parse_slice(&format_slice(&s), Dim::Two).unwrap(), s);
        assert!(parse_slice(text, Dim::Three).is_err());
        assert!(matches!(parse_slice("{", Dim::Two), Err(Error::Parse { .. })));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            tolerance: 0.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
