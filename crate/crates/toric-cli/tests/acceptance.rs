//! End-to-end checks of the shipped contracts, one printed line per
//! criterion. The runner is a single sequential test: some criteria carry
//! wall-clock budgets that only mean something run alone, and later ones
//! reuse earlier results. Run with `-- --nocapture` to see every line.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric::degeneration::{
    control_surface, convergence_sweep, degeneration_weights, distance_sweep,
    support_decay_probe, SweepReport,
};
use toric::io;
use toric::lattice::LatticeConfig;
use toric::patch::{
    bezier_curve, beta_map, check_binomial_relations, evaluate, evaluate_factored,
    generate_relations, project, toric_basis, triangle_patch, weight_action, PatchSpec,
};
use toric::subdivision::{
    certify_regularity, regular_decomposition, validate_decomposition, verify_regularity,
    Decomposition, Lifting, Regularity,
};

type Check = Result<String, String>;

const SCHEDULE: [f64; 5] = [1.0, 5.0, 25.0, 125.0, 625.0];
const FLOOR: f64 = 0.4; // pinned after the first measured run (min was 0.4579)

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn read(name: &str) -> Result<String, String> {
    io::read_text(&data(name)).map_err(|e| e.to_string())
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sorted_facets(deco: &Decomposition) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = deco.facets().map(|f| f.members.clone()).collect();
    sets.sort();
    sets
}

fn sorted_faces(deco: &Decomposition) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = deco.faces().iter().map(|f| f.members.clone()).collect();
    sets.sort();
    sets
}

fn grid(nx: i64, ny: i64) -> LatticeConfig {
    let mut pts = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            pts.push(vec![i, j]);
        }
    }
    LatticeConfig::new(2, pts).unwrap()
}

fn bicubic_spec() -> Result<PatchSpec, String> {
    io::parse_patch_spec(&read("bicubic_spec.json")?).map_err(fail)
}

fn shipped_lifting() -> Result<Lifting, String> {
    io::parse_lifting(&read("bicubic_lifting.json")?).map_err(fail)
}

fn cubic_spec() -> Result<PatchSpec, String> {
    io::parse_patch_spec(&read("cubic_spec.json")?).map_err(fail)
}

// 1. The broken-line decomposition of the lifted cubic, exactly and fast.
fn criterion_1() -> Check {
    let config = LatticeConfig::new(1, vec![vec![0], vec![1], vec![2], vec![3]]).map_err(fail)?;
    let lifting = Lifting::from_ints(&[0, 1, 2, 0]);
    let start = Instant::now();
    let deco = regular_decomposition(&config, &lifting).map_err(fail)?;
    let elapsed = start.elapsed();
    let facets = sorted_facets(&deco);
    if facets != vec![vec![0, 1, 2], vec![2, 3]] {
        return Err(format!("facets {facets:?}"));
    }
    if elapsed.as_millis() >= 10 {
        return Err(format!("took {elapsed:?}, budget 10ms"));
    }
    Ok(format!("facets {{0,1,2}},{{2,3}} in {elapsed:?}"))
}

// 2. The shipped bicubic lifting leaves (1,2) and (2,2) on no face.
fn criterion_2() -> Check {
    let spec = bicubic_spec()?;
    let lifting = shipped_lifting()?;
    let start = Instant::now();
    let deco = regular_decomposition(spec.config(), &lifting).map_err(fail)?;
    let elapsed = start.elapsed();
    let mut orphans = deco.no_face_labels();
    orphans.sort_unstable();
    if orphans != vec![9, 10] {
        return Err(format!("no-face labels {orphans:?}, expected [9, 10]"));
    }
    for (label, point) in [(9usize, [1i64, 2]), (10, [2, 2])] {
        if spec.config().point(label) != point {
            return Err(format!("label {label} is not {point:?}"));
        }
    }
    if elapsed.as_millis() >= 50 {
        return Err(format!("took {elapsed:?}, budget 50ms"));
    }
    Ok(format!("points (1,2),(2,2) on no face in {elapsed:?}"))
}

// 3. Corner/edge/interior heights cut the 4x4 grid into nine quads.
fn criterion_3() -> Check {
    let config = grid(4, 4);
    let values: Vec<i64> = config
        .points()
        .iter()
        .map(|p| {
            let ends = [0i64, 3];
            match (ends.contains(&p[0]), ends.contains(&p[1])) {
                (true, true) => 0,
                (false, false) => 2,
                _ => 1,
            }
        })
        .collect();
    let deco = regular_decomposition(&config, &Lifting::from_ints(&values)).map_err(fail)?;
    let mut expected = Vec::new();
    for j in 0..3usize {
        for i in 0..3usize {
            let c = 4 * j + i;
            expected.push(vec![c, c + 1, c + 4, c + 5]);
        }
    }
    expected.sort();
    let facets = sorted_facets(&deco);
    if facets != expected {
        return Err(format!("facets {facets:?}"));
    }
    Ok("nine unit quadrilaterals, exactly".into())
}

// 4. Pinwheel certified irregular with a checkable certificate; random
// liftings certify regular and their witnesses reproduce the face sets.
fn criterion_4() -> Check {
    let start = Instant::now();
    let (config, facets) = io::parse_facets_input(&read("pinwheel.json")?).map_err(fail)?;
    let mut deco = validate_decomposition(&config, &facets).map_err(fail)?;
    certify_regularity(&config, &mut deco).map_err(fail)?;
    if !matches!(deco.regularity, Regularity::Irregular { .. }) {
        return Err(format!("pinwheel certified {:?}", deco.regularity));
    }
    if !verify_regularity(&config, &deco).map_err(fail)? {
        return Err("Farkas certificate failed rational verification".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let shapes = [(2i64, 2i64), (3, 2), (3, 3), (4, 3), (4, 4)];
    for round in 0..200 {
        let config = grid(shapes[round % 5].0, shapes[round % 5].1);
        let values: Vec<i64> = (0..config.len()).map(|_| rng.gen_range(-9..=9)).collect();
        let mut deco =
            regular_decomposition(&config, &Lifting::from_ints(&values)).map_err(fail)?;
        let faces = sorted_faces(&deco);
        certify_regularity(&config, &mut deco).map_err(fail)?;
        let witness = match &deco.regularity {
            Regularity::Regular { witness, .. } => witness.clone(),
            other => return Err(format!("lifting {values:?} certified {other:?}")),
        };
        let redone = regular_decomposition(&config, &witness).map_err(fail)?;
        if sorted_faces(&redone) != faces {
            return Err(format!("witness for {values:?} changes the face set"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        return Err(format!("took {elapsed:?}, budget 5s"));
    }
    Ok(format!(
        "pinwheel irregular, certificate verifies; 200 random liftings regular and round-trip in {elapsed:?}"
    ))
}

// 5. The basis functions are the classical Bernstein monomials (no
// binomial coefficient) on curves and triangles.
fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let curve = bezier_curve(3).map_err(fail)?;
    for _ in 0..1000 {
        let x = 0.001 + rng.gen::<f64>() * 2.998;
        for a in 0..4 {
            let i = curve.point(a)[0] as i32;
            let closed = x.powi(i) * (3.0 - x).powi(3 - i);
            let got = toric_basis(&curve, a, &[x]).map_err(fail)?;
            worst = worst.max((got - closed).abs() / closed);
        }
    }
    let triangle = triangle_patch(3).map_err(fail)?;
    for _ in 0..1000 {
        let (x, y) = loop {
            let x = 0.001 + rng.gen::<f64>() * 2.998;
            let y = 0.001 + rng.gen::<f64>() * 2.998;
            if x + y < 2.999 {
                break (x, y);
            }
        };
        for a in 0..triangle.len() {
            let p = triangle.point(a);
            let (i, j) = (p[0] as i32, p[1] as i32);
            let closed = x.powi(i) * y.powi(j) * (3.0 - x - y).powi(3 - i - j);
            let got = toric_basis(&triangle, a, &[x, y]).map_err(fail)?;
            worst = worst.max((got - closed).abs() / closed);
        }
    }
    if worst > 1e-12 {
        return Err(format!("relative error {worst:e} > 1e-12"));
    }
    Ok(format!("matches x^i(d-x)^(d-i) forms, worst relative {worst:.2e}"))
}

fn sup_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

// 6. Vertex interpolation, edge restriction, hull membership with an
// explicit barycentric witness, and the two-route factorization identity.
fn criterion_6() -> Check {
    let bicubic = bicubic_spec()?;
    let cubic = cubic_spec()?;

    for (spec, corners) in [(&bicubic, vec![0usize, 3, 12, 15]), (&cubic, vec![0, 3])] {
        for &a in &corners {
            let x: Vec<f64> = spec.config().point(a).iter().map(|&c| c as f64).collect();
            let image = evaluate(spec, &x).map_err(fail)?;
            let d = sup_distance(&image, &spec.control_points()[a]);
            if d > 1e-12 {
                return Err(format!("vertex {a}: |F(a) - b_a| = {d:e}"));
            }
        }
    }

    let edge = bicubic.restrict(&[0, 1, 2, 3]).map_err(fail)?;
    let curve = PatchSpec::new(
        bezier_curve(3).map_err(fail)?,
        bicubic.weights()[..4].to_vec(),
        bicubic.control_points()[..4].to_vec(),
    )
    .map_err(fail)?;
    for k in 0..=100 {
        let s = 3.0 * k as f64 / 100.0;
        let on_edge = evaluate(&edge, &[s, 0.0]).map_err(fail)?;
        let on_curve = evaluate(&curve, &[s]).map_err(fail)?;
        let d = sup_distance(&on_edge, &on_curve);
        if d > 1e-10 {
            return Err(format!("edge vs curve at s={s}: {d:e}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_slack = 0.0f64;
    let mut worst_fact = 0.0f64;
    for _ in 0..1000 {
        let x = [rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0];
        let z = weight_action(
            bicubic.weights(),
            &beta_map(bicubic.config(), &x).map_err(fail)?,
        )
        .map_err(fail)?;
        let min = z.coordinates.iter().cloned().fold(f64::INFINITY, f64::min);
        let sum: f64 = z.coordinates.iter().sum();
        worst_slack = worst_slack.max((-min).max((sum - 1.0).abs()));
        let image = evaluate(&bicubic, &x).map_err(fail)?;
        let combo = project(bicubic.control_points(), &z).map_err(fail)?;
        worst_slack = worst_slack.max(sup_distance(&image, &combo));
        let factored = evaluate_factored(&bicubic, &x).map_err(fail)?;
        worst_fact = worst_fact.max(sup_distance(&image, &factored));
    }
    if worst_slack > 1e-12 {
        return Err(format!("barycentric slack {worst_slack:e} > 1e-12"));
    }
    if worst_fact > 1e-10 {
        return Err(format!("factorization residual {worst_fact:e} > 1e-10"));
    }
    Ok(format!(
        "interpolation, edge restriction, hull slack {worst_slack:.1e}, factorization {worst_fact:.1e}"
    ))
}

// 7. Generated spanning relation sets hold on the weighted simplex points
// of every example configuration, across degeneration weight families.
fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cubic = cubic_spec()?;
    let bicubic = bicubic_spec()?;
    let pillow = io::parse_patch_spec(&read("pillow_spec.json")?).map_err(fail)?;

    let cubic_samples: Vec<Vec<f64>> = (0..1000)
        .map(|_| vec![0.001 + rng.gen::<f64>() * 2.998])
        .collect();
    let square_samples: Vec<Vec<f64>> = (0..1000)
        .map(|_| vec![rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0])
        .collect();
    let pillow_samples: Vec<Vec<f64>> = (0..1000)
        .map(|_| loop {
            let x = rng.gen::<f64>() * 2.0;
            let y = rng.gen::<f64>() * 2.0;
            if (x - 1.0).abs() + (y - 1.0).abs() < 0.999 {
                break vec![x, y];
            }
        })
        .collect();

    let cases: [(&str, &PatchSpec, Lifting, &[Vec<f64>]); 3] = [
        ("cubic", &cubic, Lifting::from_ints(&[0, 1, 2, 0]), &cubic_samples),
        ("bicubic", &bicubic, shipped_lifting()?, &square_samples),
        ("pillow", &pillow, Lifting::from_ints(&[0, 0, 0, 0, 1]), &pillow_samples),
    ];
    let mut worst = 0.0f64;
    let mut spans = Vec::new();
    for (name, spec, lifting, samples) in cases {
        let relations = generate_relations(spec.config());
        let expected = spec.config().len() - spec.config().dim() - 1;
        if relations.len() != expected {
            return Err(format!(
                "{name}: {} relations, expected a spanning set of {expected}",
                relations.len()
            ));
        }
        spans.push(relations.len());
        for t in [1.0, 10.0, 100.0] {
            let weights = degeneration_weights(spec.weights(), &lifting, t).map_err(fail)?;
            let family = PatchSpec::new(
                spec.config().clone(),
                weights,
                spec.control_points().to_vec(),
            )
            .map_err(fail)?;
            let residual = check_binomial_relations(&family, &relations, samples).map_err(fail)?;
            if residual > 1e-9 {
                return Err(format!("{name} at t={t}: residual {residual:e} > 1e-9"));
            }
            worst = worst.max(residual);
        }
    }
    Ok(format!(
        "spanning sets of {spans:?} relations hold, worst residual {worst:.1e}"
    ))
}

struct SweepOutcome {
    bicubic: SweepReport,
    line: String,
}

fn monotone_with_noise(report: &SweepReport) -> bool {
    let noise = report.threshold / 10.0;
    report
        .rows
        .windows(2)
        .all(|w| w[1].hausdorff <= w[0].hausdorff + noise)
}

fn probe_decays(spec: &PatchSpec, lifting: &Lifting, samples: &[Vec<f64>]) -> Check {
    let mut pairs = Vec::new();
    let mut solos = Vec::new();
    for t in [1.0, 10.0, 100.0] {
        let decay = support_decay_probe(spec, lifting, t, samples).map_err(fail)?;
        pairs.push(decay.pair_mass);
        solos.push(decay.solo_mass);
    }
    for series in [&pairs, &solos] {
        let values: Vec<f64> = series.iter().flatten().cloned().collect();
        if !values.is_empty() && values.len() != series.len() {
            return Err("probe reported a mass only for some t".into());
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("probe masses not strictly decreasing: {values:?}"));
        }
    }
    Ok(format!("pair {pairs:?} solo {solos:?}"))
}

// 8. The degenerations of the cubic and of the bicubic descend to their
// regular control surfaces below tau(m), and excluded-support mass decays.
fn criterion_8() -> Result<SweepOutcome, String> {
    let cubic = cubic_spec()?;
    let cubic_lifting = Lifting::from_ints(&[0, 1, 2, 0]);
    let bicubic = bicubic_spec()?;
    let bicubic_lifting = shipped_lifting()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(fail)?;
    let start = Instant::now();
    let (cubic_report, bicubic_report) = pool.install(|| -> toric::Result<_> {
        Ok((
            convergence_sweep(&cubic, &cubic_lifting, &SCHEDULE, 65)?,
            convergence_sweep(&bicubic, &bicubic_lifting, &SCHEDULE, 65)?,
        ))
    })
    .map_err(fail)?;
    let elapsed = start.elapsed();

    for (name, report) in [("cubic", &cubic_report), ("bicubic", &bicubic_report)] {
        if !monotone_with_noise(report) {
            let col: Vec<f64> = report.rows.iter().map(|r| r.hausdorff).collect();
            return Err(format!("{name} distance column not nonincreasing: {col:?}"));
        }
        let last = report.rows.last().unwrap();
        if !last.pass {
            return Err(format!(
                "{name} final distance {} >= tau(65) = {}",
                last.hausdorff, report.threshold
            ));
        }
    }

    let line_samples: Vec<Vec<f64>> = (0..60).map(|k| vec![0.05 + k as f64 * 0.049]).collect();
    let grid_samples: Vec<Vec<f64>> = (0..225)
        .map(|k| {
            let (i, j) = (k % 15, k / 15);
            vec![0.1 + i as f64 * 0.2, 0.1 + j as f64 * 0.2]
        })
        .collect();
    probe_decays(&cubic, &cubic_lifting, &line_samples)?;
    let bicubic_probe = probe_decays(&bicubic, &bicubic_lifting, &grid_samples)?;

    if elapsed.as_secs_f64() >= 60.0 {
        return Err(format!("sweeps took {elapsed:?}, budget 60s single-threaded"));
    }
    let finals: Vec<f64> = [&cubic_report, &bicubic_report]
        .iter()
        .map(|r| r.rows.last().unwrap().hausdorff)
        .collect();
    Ok(SweepOutcome {
        bicubic: bicubic_report,
        line: format!(
            "both sweeps converge (finals {finals:?}) in {elapsed:?} on one thread; {bicubic_probe}"
        ),
    })
}

// 9. The same family stays far from the certified-irregular pinwheel
// surface: every scheduled distance exceeds the pinned floor.
fn criterion_9(bicubic_report: Option<&SweepReport>) -> Check {
    let spec = bicubic_spec()?;
    let lifting = shipped_lifting()?;
    let (_, facets) = io::parse_facets_input(&read("pinwheel.json")?).map_err(fail)?;
    let mut deco = validate_decomposition(spec.config(), &facets).map_err(fail)?;
    certify_regularity(spec.config(), &mut deco).map_err(fail)?;
    if !matches!(deco.regularity, Regularity::Irregular { .. }) {
        return Err(format!("pinwheel certified {:?}", deco.regularity));
    }
    let surface = control_surface(&spec, &deco).map_err(fail)?;
    let rows = distance_sweep(&spec, &lifting, &SCHEDULE, 65, &surface).map_err(fail)?;
    let min = rows.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    if min <= FLOOR {
        return Err(format!("distance {min} fell to or below the pinned floor {FLOOR}"));
    }
    match bicubic_report {
        Some(report) if report.converged() => {}
        Some(_) => return Err("regular-limit sweep did not converge".into()),
        None => return Err("criterion 8 did not produce the regular sweep".into()),
    }
    Ok(format!(
        "irregular-surface distance stays above {FLOOR} (min {min:.4}) while the regular sweep passes"
    ))
}

// 10. Byte-identical sweep CSVs across repeats and thread counts, both
// through the library and through the installed binary.
fn criterion_10() -> Check {
    let cubic = cubic_spec()?;
    let lifting = Lifting::from_ints(&[0, 1, 2, 0]);
    let schedule = [1.0, 5.0, 25.0];
    let mut csvs = Vec::new();
    for threads in [1usize, 4, 1] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(fail)?;
        let report = pool
            .install(|| convergence_sweep(&cubic, &lifting, &schedule, 33))
            .map_err(fail)?;
        csvs.push(io::sweep_csv(&report));
    }
    if csvs[0] != csvs[1] || csvs[0] != csvs[2] {
        return Err("library CSVs differ across thread counts".into());
    }

    let base = std::env::temp_dir().join(format!("toric-acceptance-{}", std::process::id()));
    let mut cli_csvs = Vec::new();
    for run in 0..2 {
        let dir = base.join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_toric"))
            .args(["verify", data("cubic_degen.json").to_str().unwrap()])
            .args(["-m", "33", "--schedule", "1,5,25"])
            .args(["--out", dir.to_str().unwrap()])
            .status()
            .map_err(fail)?;
        if !status.success() {
            return Err(format!("verify run {run} exited {status}"));
        }
        cli_csvs.push(io::read_text(&dir.join("sweep.csv")).map_err(fail)?);
    }
    let _ = std::fs::remove_dir_all(&base);
    if cli_csvs[0] != cli_csvs[1] {
        return Err("CLI CSVs differ between runs".into());
    }
    if cli_csvs[0] != csvs[0] {
        return Err("CLI CSV differs from the library CSV".into());
    }
    Ok("identical CSVs across repeats, thread counts, and the binary".into())
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    let mut bicubic_report = None;

    let mut record = |n: usize, outcome: Check| match outcome {
        Ok(detail) => println!("criterion {n:2}: pass  {detail}"),
        Err(reason) => {
            println!("criterion {n:2}: FAIL  {reason}");
            failures.push(n);
        }
    };

    record(1, criterion_1());
    record(2, criterion_2());
    record(3, criterion_3());
    record(4, criterion_4());
    record(5, criterion_5());
    record(6, criterion_6());
    record(7, criterion_7());
    let c8 = criterion_8();
    record(8, c8.as_ref().map(|o| o.line.clone()).map_err(Clone::clone));
    if let Ok(outcome) = c8 {
        bicubic_report = Some(outcome.bicubic);
    }
    record(9, criterion_9(bicubic_report.as_ref()));
    record(10, criterion_10());

    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
