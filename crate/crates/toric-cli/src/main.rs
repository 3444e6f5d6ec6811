//! Command line front end: decompositions, certificates, meshes and
//! degeneration experiments, wired together from JSON inputs.
//!
//! Exit codes carry the mathematical answer where there is one: 0 means
//! success (and "regular" / "converged"), 2 means certified irregular,
//! 3 means the convergence criterion failed, and 1 is reserved for errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric::degeneration::{control_surface, convergence_sweep, distance_sweep, DegenerationFamily};
use toric::io;
use toric::obj;
use toric::subdivision::{
    certify_regularity, regular_decomposition, validate_decomposition, Decomposition, Lifting,
    Regularity,
};

#[derive(Parser)]
#[command(name = "toric", version, about = "Toric patches, regular decompositions, degenerations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the decomposition induced by a lifting.
    Decompose {
        /// JSON file with `config` and `lifting`.
        input: PathBuf,
        /// Write the decomposition here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a decomposition regular (exit 0) or irregular (exit 2).
    CheckRegular {
        /// JSON file with `config` and `facets`.
        input: PathBuf,
        /// Write the certified decomposition here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Additionally certify this many random liftings of the same
        /// configuration and check their witnesses round-trip.
        #[arg(long, default_value_t = 0)]
        random_liftings: usize,
        /// Seed for --random-liftings.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mesh a patch to OBJ.
    Eval {
        /// JSON file with `config`, `weights`, `control_points`.
        spec: PathBuf,
        #[arg(short = 'm', long, default_value_t = 33)]
        resolution: usize,
        /// Output OBJ path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a degeneration experiment: one mesh per t, the control surface
    /// mesh, and the sweep CSV.
    Degenerate {
        experiment: PathBuf,
        #[arg(short = 'm', long)]
        resolution: Option<usize>,
        /// Comma-separated t values overriding the experiment schedule.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
        /// Output directory overriding the experiment file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Judge an experiment against the convergence criterion
    /// (exit 0 pass, 3 fail); writes the sweep CSV.
    Verify {
        experiment: PathBuf,
        #[arg(short = 'm', long)]
        resolution: Option<usize>,
        /// Comma-separated t values overriding the experiment schedule.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
        /// Output directory overriding the experiment file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiplier applied to the convergence threshold.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> toric::Result<ExitCode> {
    match cli.command {
        Command::Decompose { input, out } => decompose(&input, out.as_deref()),
        Command::CheckRegular {
            input,
            out,
            random_liftings,
            seed,
        } => check_regular(&input, out.as_deref(), random_liftings, seed),
        Command::Eval {
            spec,
            resolution,
            out,
        } => eval(&spec, resolution, out.as_deref()),
        Command::Degenerate {
            experiment,
            resolution,
            schedule,
            out,
        } => degenerate(&experiment, resolution, schedule, out),
        Command::Verify {
            experiment,
            resolution,
            schedule,
            out,
            tolerance_scale,
        } => verify(&experiment, resolution, schedule, out, tolerance_scale),
    }
}

fn emit(text: &str, out: Option<&Path>) -> toric::Result<()> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn decompose(input: &Path, out: Option<&Path>) -> toric::Result<ExitCode> {
    let text = io::read_text(input)?;
    let (config, lifting) = io::parse_decompose_input(&text)?;
    let deco = regular_decomposition(&config, &lifting)?;
    emit(&io::to_canonical(&io::decomposition_to_value(&deco)), out)?;
    Ok(ExitCode::SUCCESS)
}

fn check_regular(
    input: &Path,
    out: Option<&Path>,
    random_liftings: usize,
    seed: u64,
) -> toric::Result<ExitCode> {
    let text = io::read_text(input)?;
    let (config, facets) = io::parse_facets_input(&text)?;
    let mut deco = validate_decomposition(&config, &facets)?;
    certify_regularity(&config, &mut deco)?;
    emit(&io::to_canonical(&io::decomposition_to_value(&deco)), out)?;

    if random_liftings > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..random_liftings {
            let values: Vec<i64> = (0..config.len()).map(|_| rng.gen_range(-9..=9)).collect();
            let lifting = Lifting::from_ints(&values);
            let mut sample = regular_decomposition(&config, &lifting)?;
            let faces = face_sets(&sample);
            certify_regularity(&config, &mut sample)?;
            let witness = match &sample.regularity {
                Regularity::Regular { witness, .. } => witness.clone(),
                other => {
                    eprintln!("random lifting {k} ({values:?}) certified {other:?}");
                    return Ok(ExitCode::from(2));
                }
            };
            if face_sets(&regular_decomposition(&config, &witness)?) != faces {
                eprintln!("random lifting {k} ({values:?}): witness changes the face set");
                return Ok(ExitCode::from(1));
            }
        }
        eprintln!("{random_liftings} random liftings: all regular, witnesses round-trip");
    }

    match deco.regularity {
        Regularity::Regular { .. } => Ok(ExitCode::SUCCESS),
        _ => Ok(ExitCode::from(2)),
    }
}

fn face_sets(deco: &Decomposition) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = deco.faces().iter().map(|f| f.members.clone()).collect();
    sets.sort();
    sets
}

fn eval(spec: &Path, resolution: usize, out: Option<&Path>) -> toric::Result<ExitCode> {
    let text = io::read_text(spec)?;
    let spec = io::parse_patch_spec(&text)?;
    emit(&obj::patch_obj(&spec, resolution)?, out)?;
    Ok(ExitCode::SUCCESS)
}

struct Run {
    experiment: io::Experiment,
    dir: PathBuf,
}

fn load_run(
    path: &Path,
    resolution: Option<usize>,
    schedule: Option<Vec<f64>>,
    out: Option<PathBuf>,
) -> toric::Result<Run> {
    let mut experiment = io::load_experiment(path)?;
    if let Some(m) = resolution {
        experiment.resolution = m;
    }
    if let Some(s) = schedule {
        experiment.schedule = s;
    }
    let dir = out.unwrap_or_else(|| experiment.output.clone());
    Ok(Run { experiment, dir })
}

/// The probe surface an experiment's separate decomposition describes,
/// certified so the report can name its status.
fn probe_surface(
    run: &Run,
) -> toric::Result<Option<(Decomposition, toric::degeneration::ControlSurface)>> {
    let Some(facets) = &run.experiment.decomposition else {
        return Ok(None);
    };
    let config = run.experiment.spec.config();
    let mut deco = validate_decomposition(config, facets)?;
    certify_regularity(config, &mut deco)?;
    let surface = control_surface(&run.experiment.spec, &deco)?;
    Ok(Some((deco, surface)))
}

fn probe_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("t,distance\n");
    for (t, d) in rows {
        out.push_str(&format!("{t},{d}\n"));
    }
    out
}

fn run_probe(run: &Run) -> toric::Result<()> {
    let Some((deco, surface)) = probe_surface(run)? else {
        return Ok(());
    };
    let e = &run.experiment;
    let rows = distance_sweep(&e.spec, &e.lifting, &e.schedule, e.resolution, &surface)?;
    io::write_text(&run.dir.join("probe.csv"), &probe_csv(&rows))?;
    let floor = rows.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    let status = match deco.regularity {
        Regularity::Regular { .. } => "regular",
        Regularity::Irregular { .. } => "irregular",
        Regularity::Unknown => "unknown",
    };
    println!("probe surface ({status}): min distance over schedule = {floor}");
    Ok(())
}

fn degenerate(
    path: &Path,
    resolution: Option<usize>,
    schedule: Option<Vec<f64>>,
    out: Option<PathBuf>,
) -> toric::Result<ExitCode> {
    let run = load_run(path, resolution, schedule, out)?;
    let e = &run.experiment;
    let m = e.resolution;

    let deco = regular_decomposition(e.spec.config(), &e.lifting)?;
    let surface = control_surface(&e.spec, &deco)?;
    obj::write_surface_obj(&surface, m, &run.dir.join("control_surface.obj"))?;

    let family = DegenerationFamily::new(e.spec.clone(), e.lifting.clone())?;
    for &t in &e.schedule {
        let member = family.member(t)?;
        obj::write_patch_obj(&member, m, &run.dir.join(format!("member_t{t}.obj")))?;
    }

    let report = convergence_sweep(&e.spec, &e.lifting, &e.schedule, m)?;
    io::write_text(&run.dir.join("sweep.csv"), &io::sweep_csv(&report))?;
    run_probe(&run)?;
    println!(
        "wrote {} meshes and sweep.csv to {}",
        e.schedule.len() + 1,
        run.dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn verify(
    path: &Path,
    resolution: Option<usize>,
    schedule: Option<Vec<f64>>,
    out: Option<PathBuf>,
    tolerance_scale: f64,
) -> toric::Result<ExitCode> {
    let run = load_run(path, resolution, schedule, out)?;
    let e = &run.experiment;
    let mut report = convergence_sweep(&e.spec, &e.lifting, &e.schedule, e.resolution)?;
    report.apply_tolerance_scale(tolerance_scale);
    io::write_text(&run.dir.join("sweep.csv"), &io::sweep_csv(&report))?;

    for row in &report.rows {
        println!(
            "t={} hausdorff={} pitch={} pass={}",
            row.t, row.hausdorff, row.sampling_pitch, row.pass
        );
    }
    println!(
        "threshold = {} (m = {}, tolerance scale {})",
        report.threshold, e.resolution, tolerance_scale
    );
    run_probe(&run)?;

    if report.converged() {
        println!("converged: yes");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("converged: no");
        Ok(ExitCode::from(3))
    }
}
