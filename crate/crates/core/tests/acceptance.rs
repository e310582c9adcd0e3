//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Run with `cargo test -p frechet-voronoi --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frechet_voronoi::configspace::ConfigPoint;
use frechet_voronoi::constructions::{
    build_degenerate, build_linf_embedding, count_vertices, lift_to_flat, p_bisector, point_chain, q_bisector,
    random_base_points, t_vertex, verify_vertex, PatchKind,
};
use frechet_voronoi::voronoi::{nearest_site, rasterize, RasterOptions, SiteSet, SliceSpec};
use frechet_voronoi::{dfd, dfd_oracle, dfd_segments, euclid, Chain, Dim, Point};

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn random_chain(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Chain {
    let vertices = (0..k)
        .map(|_| {
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-10.0..=10.0)).collect();
            Point::new(&c).unwrap()
        })
        .collect();
    Chain::new("r", vertices).unwrap()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let (k, l) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = random_chain(&mut rng, dim, k);
        let b = random_chain(&mut rng, dim, l);
        worst = worst.max((dfd(&a, &b).unwrap().distance - dfd_oracle(&a, &b).unwrap()).abs());
    }
    let elapsed = start.elapsed();
    report(
        1,
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("1000 pairs, max |dp - oracle| = {worst:e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_segment_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let a = random_chain(&mut rng, dim, 2);
        let b = random_chain(&mut rng, dim, 2);
        worst = worst.max((dfd(&a, &b).unwrap().distance - dfd_segments(&a, &b).unwrap()).abs());
    }
    report(
        2,
        worst <= 1e-12,
        format!("1000 segment pairs, max deviation {worst:e}"),
    );
}

#[test]
fn criterion_3_recurrence_base_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for flip in [false, true] {
        for _ in 0..100 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let len = rng.gen_range(1..=12);
            let long = random_chain(&mut rng, dim, len);
            let single = random_chain(&mut rng, dim, 1);
            let expected = long
                .vertices()
                .iter()
                .map(|v| euclid(v, &single.vertices()[0]).unwrap())
                .fold(0.0, f64::max);
            let got = if flip { dfd(&single, &long) } else { dfd(&long, &single) }
                .unwrap()
                .distance;
            worst = worst.max((got - expected).abs());
        }
    }
    report(
        3,
        worst <= 1e-12,
        format!("100 l=1 and 100 k=1 instances, max deviation {worst:e}"),
    );
}

#[test]
fn criterion_4_chebyshev_identity() {
    let start = Instant::now();
    let (k, bound) = (4, 100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let base = random_base_points(&mut rng, 16, k, bound);
    let emb = build_linf_embedding(base.clone(), bound).unwrap();
    let sites = emb.sites().unwrap();
    let linf = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let (mut checked, mut worst, mut nn_checked, mut nn_bad) = (0, 0.0f64, 0, 0);
    for q in random_base_points(&mut rng, 100, k, bound) {
        let t = lift_to_flat("T", &q, bound).unwrap();
        let ds: Vec<f64> = base.iter().map(|p| linf(&q, p)).collect();
        for (site, &d) in sites.sites().iter().zip(&ds) {
            if d < bound {
                checked += 1;
                worst = worst.max((dfd(&t, site).unwrap().distance - d).abs());
            }
        }
        let best = ds.iter().copied().fold(f64::INFINITY, f64::min);
        let winners: Vec<usize> = (0..ds.len()).filter(|&i| ds[i] <= best + 1e-9).collect();
        if winners.len() == 1 && best < bound {
            nn_checked += 1;
            let got = nearest_site(&t, &sites).unwrap();
            nn_bad += usize::from(got.index != winners[0] || got.tie);
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        worst <= 1e-9 && nn_bad == 0 && elapsed < Duration::from_secs(5),
        format!(
            "{checked} gated site checks, max |d_F - d_inf| = {worst:e}; {nn_checked} NN checks, {nn_bad} disagreements; {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_5_segment_family_distance_formulas() {
    let family = build_degenerate(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-10.0..=10.0));
        let s = point_chain([x, y, z]);
        let (i, j) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let p_want = (z - i as f64).abs().max(x.hypot(y));
        let q_want = z.abs().max((x - j as f64).hypot(y));
        worst = worst.max((dfd(&s, family.p(i)).unwrap().distance - p_want).abs());
        worst = worst.max((dfd(&s, family.q(j)).unwrap().distance - q_want).abs());
    }
    report(5, worst <= 1e-9, format!("1000 points, max deviation {worst:e}"));
}

#[test]
fn criterion_6_vertex_verification_and_growth() {
    let start = Instant::now();
    let tol = 1e-9;
    let family = build_degenerate(16).unwrap();
    let half_n = family.half();
    let (mut pairs, mut equidistance_misses, mut formula_misses, mut strict_misses, mut lower_misses) =
        (0, Vec::new(), 0, 0, 0);
    let mut verifier_failures = 0;
    for i in 1..half_n {
        for j in (1..i).filter(|&j| j < half_n) {
            pairs += 1;
            let t = t_vertex(i, j).unwrap();
            let tc = point_chain([t.x(), t.y(), t.z()]);
            let half = i as f64 / 2.0;
            let d = |c: &Chain| dfd(&tc, c).unwrap().distance;

            let defining = [d(family.p(i)), d(family.p(i + 1)), d(family.q(j)), d(family.q(j + 1))];
            if defining.iter().any(|x| (x - half).abs() > tol) {
                equidistance_misses.push(format!("t({i},{j}) at {defining:?} vs {half}"));
            }
            for h in 1..=half_n {
                let dh = d(family.p(h));
                formula_misses += usize::from((dh - half.max((half - h as f64).abs())).abs() > tol);
                if h > i {
                    strict_misses += usize::from(dh <= half + tol);
                } else {
                    lower_misses += usize::from(dh < half - tol);
                }
            }
            for m in 1..=half_n {
                let dm = d(family.q(m));
                if m > j + 1 {
                    strict_misses += usize::from(dm <= half + tol);
                } else {
                    lower_misses += usize::from(dm < half - tol);
                }
            }
            verifier_failures += usize::from(!verify_vertex(&family, i, j, tol).unwrap().passed());
        }
    }
    let c16 = count_vertices(&family, tol).unwrap();
    let c32 = count_vertices(&build_degenerate(32).unwrap(), tol).unwrap();
    let ratio = c32 as f64 / c16 as f64;
    let elapsed = start.elapsed();

    let ok = equidistance_misses.is_empty()
        && formula_misses == 0
        && strict_misses == 0
        && lower_misses == 0
        && verifier_failures == 0
        && (3.0..=5.0).contains(&ratio)
        && elapsed < Duration::from_secs(5);
    report(
        6,
        ok,
        format!(
            "{pairs} pairs; equidistance misses {} (first: {}); p_h formula misses {formula_misses}; \
             strict misses {strict_misses}; >= i/2 misses {lower_misses}; verify_vertex failures {verifier_failures}; \
             count n=16 {c16}, n=32 {c32}, ratio {ratio}; {elapsed:.2?}",
            equidistance_misses.len(),
            equidistance_misses.first().map(String::as_str).unwrap_or("-"),
        ),
    );
}

#[test]
fn criterion_7_bisector_consistency() {
    let tol = 1e-9;
    let family = build_degenerate(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let equal = |s: [f64; 3], a: &Chain, b: &Chain| {
        let c = point_chain(s);
        (dfd(&c, a).unwrap().distance - dfd(&c, b).unwrap().distance).abs() <= tol
    };
    let mut sampled = 0;
    let mut misses = 0;
    let mut kinds = BTreeSet::new();
    for (patches, a, b) in [
        (p_bisector(3), family.p(3), family.p(4)),
        (q_bisector(3), family.q(3), family.q(4)),
    ] {
        for patch in patches {
            kinds.insert(format!("{:?}", patch.kind()));
            for _ in 0..500 {
                let s = patch.sample(&mut rng, 8.0);
                sampled += 1;
                misses += usize::from(!patch.contains(s, tol) || !equal(s, a, b));
            }
        }
    }

    let mut circle_misses = 0;
    let i = 3;
    let plane_and_caps = p_bisector(i);
    for n in 0..360 {
        let angle = (n as f64).to_radians();
        let s = [0.5 * angle.cos(), 0.5 * angle.sin(), (2 * i + 1) as f64 / 2.0];
        let on_plane = plane_and_caps
            .iter()
            .any(|p| p.kind() == PatchKind::Plane && p.contains(s, tol));
        let on_caps = plane_and_caps
            .iter()
            .filter(|p| p.kind() == PatchKind::ParaboloidCap)
            .all(|p| p.contains(s, tol));
        circle_misses += usize::from(!(on_plane && on_caps && equal(s, family.p(i), family.p(i + 1))));
    }
    report(
        7,
        misses == 0 && circle_misses == 0 && kinds.len() == 3,
        format!("{sampled} patch samples over kinds {kinds:?}, {misses} misses; circle misses {circle_misses}/360"),
    );
}

#[test]
fn criterion_8_raster_sanity() {
    let sites = SiteSet::new(vec![
        Chain::planar("a", &[(0.0, 0.0)]).unwrap(),
        Chain::planar("b", &[(4.0, 0.0)]).unwrap(),
    ])
    .unwrap();
    let slice = SliceSpec::new(
        ConfigPoint::new(vec![0.0, 0.0], Dim::Two).unwrap(),
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![(0.0, 4.0), (-1.0, 1.0)],
        vec![81, 41],
    )
    .unwrap();
    let coarse = rasterize(&sites, &slice, RasterOptions::default()).unwrap();
    let step = 4.0 / 80.0;
    let columns: BTreeSet<usize> = coarse.boundary_cells.iter().map(|&f| slice.unflatten(f)[0]).collect();
    let confined = !columns.is_empty()
        && columns.len() <= 2
        && columns.iter().all(|&c| (slice.param(0, c) - 2.0).abs() <= step + 1e-12);

    let fine_slice = slice.refined();
    assert_eq!(fine_slice.resolution(), &[161, 81]);
    let fine = rasterize(&sites, &fine_slice, RasterOptions::default()).unwrap();
    let mut changed = 0;
    for flat in 0..coarse.owner.len() {
        let idx: Vec<usize> = slice.unflatten(flat).iter().map(|i| 2 * i).collect();
        let ff = fine_slice.flatten(&idx);
        assert_eq!(slice.point(flat), fine_slice.point(ff));
        changed += usize::from(coarse.owner[flat] != fine.owner[ff]);
    }
    report(
        8,
        confined && changed == 0,
        format!(
            "boundary columns {:?} at x = {:?}; {changed} shared samples changed owner under refinement",
            columns,
            columns.iter().map(|&c| slice.param(0, c)).collect::<Vec<_>>()
        ),
    );
}

fn fvd(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fvd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run fvd");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_9_cli_determinism() {
    let mut runs: Vec<Vec<(String, i32, Vec<u8>)>> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        std::fs::write(
            d.join("slice.json"),
            r#"{"origin":[0,0,0,0],"axes":[[1,0,0,0],[0,0,1,0]],"extents":[[0,6],[0,6]],"resolution":[61,61]}"#,
        )
        .unwrap();
        let commands: &[&[&str]] = &[
            &[
                "construct",
                "linf",
                "--k",
                "4",
                "--n",
                "16",
                "--M",
                "100",
                "--seed",
                "0",
                "--out",
                "linf.jsonl",
            ],
            &["verify", "linf", "linf.jsonl", "--trials", "100", "--seed", "0"],
            &["construct", "coplanar", "--n", "16", "--out", "coplanar.jsonl"],
            &["verify", "coplanar", "coplanar.jsonl"],
            &["count-vertices", "--n", "16"],
            &["oracle-check", "--trials", "200", "--max-k", "6", "--seed", "0"],
            &[
                "voronoi-slice",
                "coplanar.jsonl",
                "--slice",
                "slice.json",
                "--out",
                "r.csv",
                "--format",
                "csv",
            ],
            &[
                "voronoi-slice",
                "coplanar.jsonl",
                "--slice",
                "slice.json",
                "--out",
                "r.pgm",
                "--format",
                "pgm",
            ],
            &["nn", "coplanar.jsonl", "linf.jsonl"],
        ];
        let mut outputs = Vec::new();
        for args in commands {
            let (code, stdout) = fvd(args, d);
            outputs.push((args.join(" "), code, stdout));
        }
        for file in ["linf.jsonl", "coplanar.jsonl", "r.csv", "r.pgm"] {
            outputs.push((file.to_string(), 0, std::fs::read(d.join(file)).unwrap()));
        }
        runs.push(outputs);
    }
    let (first, second) = (&runs[0], &runs[1]);
    let differing: Vec<&str> = first
        .iter()
        .zip(second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let failing: Vec<&str> = first.iter().filter(|o| o.1 != 0).map(|o| o.0.as_str()).collect();
    report(
        9,
        differing.is_empty() && failing.is_empty(),
        format!(
            "{} outputs compared byte for byte; differing {differing:?}; nonzero exits {failing:?}",
            first.len()
        ),
    );
}
