use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frechet_voronoi::constructions::{
    build_degenerate, build_linf_embedding, count_vertices, random_base_points, verify_linf_identity, verify_vertex,
    DegenerateFamily, LinfEmbedding,
};
use frechet_voronoi::io::{
    emit_raster, format_chains, load_chains, parse_slice, write_atomic, RasterFormat, RunConfig,
};
use frechet_voronoi::voronoi::{count_features, nearest_site_with_tolerance, rasterize, RasterOptions};
use frechet_voronoi::{dfd, dfd_oracle, Chain, Dim, Error, Point};

/// Discrete Fréchet distance and Voronoi diagrams of polygonal chains.
#[derive(Debug, Parser)]
#[command(name = "fvd", version)]
struct Cli {
    /// Absolute tolerance for equality checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two chains of a chain file.
    Dfd {
        file: PathBuf,
        id_a: String,
        id_b: String,
        /// Also print the optimal paired walk.
        #[arg(long)]
        alignment: bool,
    },
    /// Compare the table recurrence against exhaustive enumeration on random chains.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Nearest site for every chain of the query file.
    Nn { sites: PathBuf, queries: PathBuf },
    /// Rasterize the diagram over a slice of configuration space.
    VoronoiSlice {
        sites: PathBuf,
        #[arg(long)]
        slice: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = ["pgm", "csv"])]
        format: String,
        #[arg(long, default_value_t = frechet_voronoi::voronoi::DEFAULT_SAMPLE_BUDGET)]
        budget: u64,
    },
    /// Write the chains of a lower-bound construction.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a lower-bound construction.
    #[command(subcommand)]
    Verify(Verify),
    /// Number of verified t_ij points of the co-planar family of size n.
    CountVertices {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// Random points of [-M, M]^k lifted onto the Chebyshev flat.
    Linf {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "M")]
        bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Segments p_i = <(0,0),(i,0)> and q_j = <(j,0),(0,0)>, i, j <= n/2.
    Coplanar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Fréchet / L∞ identity at random query points.
    Linf {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distances from every t_ij to every site of the family.
    Coplanar { file: PathBuf },
}

enum Outcome {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        tolerance: cli.tolerance,
        ..RunConfig::default()
    };
    let result = config.validate().and_then(|()| run(cli.command, &config));
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, config: &RunConfig) -> Result<Outcome, Error> {
    let tol = config.tolerance;
    match command {
        Command::Dfd {
            file,
            id_a,
            id_b,
            alignment,
        } => {
            let sites = load_chains(&file)?;
            let find = |id: &str| {
                sites
                    .get(id)
                    .ok_or_else(|| Error::OutOfRange(format!("no chain with id {id:?} in {}", file.display())))
            };
            let r = dfd(find(&id_a)?, find(&id_b)?)?;
            println!("{}", r.distance);
            if alignment {
                for step in r.alignment.steps() {
                    println!("{step}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::OracleCheck { trials, max_k, seed } => oracle_check(trials, max_k, seed, tol),
        Command::Nn { sites, queries } => {
            let sites = load_chains(sites)?;
            let queries = load_chains(queries)?;
            for q in queries.sites() {
                let n = nearest_site_with_tolerance(q, &sites, tol)?;
                let tie = if n.tie { "\ttie" } else { "" };
                println!("{}\t{}\t{}{tie}", q.id(), sites.sites()[n.index].id(), n.distance);
            }
            Ok(Outcome::Ok)
        }
        Command::VoronoiSlice {
            sites,
            slice,
            out,
            format,
            budget,
        } => {
            let sites = load_chains(sites)?;
            let text = std::fs::read_to_string(&slice).map_err(|e| Error::Io { path: slice, source: e })?;
            let slice = parse_slice(&text, sites.dim())?;
            let format: RasterFormat = format.parse()?;
            let opts = RasterOptions {
                sample_budget: budget,
                tie_tolerance: tol,
            };
            let raster = rasterize(&sites, &slice, opts)?;
            let rendered = emit_raster(&raster, format)?;
            write_atomic(&out, rendered.as_bytes())?;
            let c = count_features(&raster);
            println!(
                "samples {} cells {} boundary {} vertex_candidates {} owner_sets {} ties {}",
                raster.owner.len(),
                c.num_cells,
                c.num_boundary,
                c.num_vertex_candidates,
                c.distinct_owner_triples,
                c.num_ties
            );
            Ok(Outcome::Ok)
        }
        Command::Construct(Construct::Linf { k, n, bound, seed, out }) => {
            if k == 0 || n == 0 {
                return Err(Error::InvalidArity("--k and --n must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let emb = build_linf_embedding(random_base_points(&mut rng, n, k, bound), bound)?;
            write_atomic(&out, format_chains(emb.chains()).as_bytes())?;
            println!("wrote {n} chains with {k} vertices (M = {bound}) to {}", out.display());
            Ok(Outcome::Ok)
        }
        Command::Construct(Construct::Coplanar { n, out }) => {
            let family = build_degenerate(n)?;
            write_atomic(&out, format_chains(&family.chains()).as_bytes())?;
            println!("wrote {n} segments to {}", out.display());
            Ok(Outcome::Ok)
        }
        Command::Verify(Verify::Linf { file, trials, seed }) => {
            let emb = LinfEmbedding::from_chains(load_chains(file)?.into_inner())?;
            verify_linf(&emb, trials, seed, tol)
        }
        Command::Verify(Verify::Coplanar { file }) => {
            let family = DegenerateFamily::from_sites(&load_chains(file)?)?;
            verify_coplanar(&family, tol)
        }
        Command::CountVertices { n } => {
            println!("{}", count_vertices(&build_degenerate(n)?, tol)?);
            Ok(Outcome::Ok)
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, id: &str, dim: Dim, k: usize) -> Chain {
    let vertices = (0..k)
        .map(|_| {
            let c: Vec<f64> = (0..dim.get()).map(|_| rng.gen_range(-10.0..=10.0)).collect();
            Point::new(&c).expect("finite")
        })
        .collect();
    Chain::new(id, vertices).expect("non-empty uniform chain")
}

fn oracle_check(trials: usize, max_k: usize, seed: u64, tol: f64) -> Result<Outcome, Error> {
    let limit = (frechet_voronoi::frechet::ORACLE_PAIR_LIMIT as f64).sqrt() as usize;
    if max_k == 0 || max_k > limit {
        return Err(Error::InvalidArity(format!("--max-k must be in 1..={limit}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for trial in 0..trials {
        let dim = if rng.gen_bool(0.5) { Dim::Two } else { Dim::Three };
        let k = rng.gen_range(1..=max_k);
        let l = rng.gen_range(1..=max_k);
        let a = random_chain(&mut rng, "a", dim, k);
        let b = random_chain(&mut rng, "b", dim, l);
        let fast = dfd(&a, &b)?.distance;
        let slow = dfd_oracle(&a, &b)?;
        let err = (fast - slow).abs();
        worst = worst.max(err);
        if err > tol {
            mismatches += 1;
            println!("trial {trial}: {dim} k={k} l={l} table {fast} oracle {slow}");
        }
    }
    println!("{trials} trials, {mismatches} mismatches, max |table - oracle| = {worst:e}");
    Ok(if mismatches == 0 {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn verify_linf(emb: &LinfEmbedding, trials: usize, seed: u64, tol: f64) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut gated, mut nn_checked) = (0, 0, 0);
    for (trial, q) in random_base_points(&mut rng, trials, emb.k(), emb.bound())
        .iter()
        .enumerate()
    {
        let r = verify_linf_identity(emb, q, tol)?;
        gated += r.sites.iter().filter(|s| s.gated).count();
        nn_checked += usize::from(r.nearest_agrees.is_some());
        if !r.passed() {
            failures += 1;
            for s in r.sites.iter().filter(|s| s.gated && !(s.matches && s.lockstep)) {
                println!(
                    "trial {trial}: site {} linf {} frechet {} lockstep {}",
                    emb.chains()[s.index].id(),
                    s.linf,
                    s.frechet,
                    s.lockstep
                );
            }
            if r.nearest_agrees == Some(false) {
                println!(
                    "trial {trial}: L∞ nearest {} but Fréchet nearest {}",
                    emb.chains()[r.linf_nearest.index].id(),
                    emb.chains()[r.frechet_nearest.index].id()
                );
            }
        }
    }
    println!(
        "{trials} queries, {gated} site checks below M = {}, {nn_checked} nearest-neighbour checks, {failures} failing queries",
        emb.bound()
    );
    Ok(if failures == 0 { Outcome::Ok } else { Outcome::Violation })
}

fn verify_coplanar(family: &DegenerateFamily, tol: f64) -> Result<Outcome, Error> {
    let mut failed = 0;
    let pairs = family.vertex_pairs();
    println!("i\tj\tt\td(p_i)\td(p_i+1)\td(q_j)\td(q_j+1)\tstatus");
    for &(i, j) in &pairs {
        let r = verify_vertex(family, i, j, tol)?;
        let [a, b, c, d] = r.defining;
        let status = if r.passed() { "ok" } else { "FAIL" };
        println!("{i}\t{j}\t{}\t{a}\t{b}\t{c}\t{d}\t{status}", r.t);
        for v in &r.violations {
            println!("  {}: distance {} violates {}", v.site, v.distance, v.requirement);
        }
        failed += usize::from(!r.passed());
    }
    if failed == 0 {
        println!("all pairs verified ({})", pairs.len());
        Ok(Outcome::Ok)
    } else {
        println!("{failed} of {} pairs failed", pairs.len());
        Ok(Outcome::Violation)
    }
}
