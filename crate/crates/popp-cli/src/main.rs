//! `popp`: growth vectors, Popp volume densities, sub-Laplacian
//! coefficients and isometry verification for polynomial sub-Riemannian
//! structures, driven by TOML structure files or builtin examples.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use popp_core::{
    check_equiregular, check_volume_preserving, growth_vector, hausdorff_dimension, is_isometry,
    popp_report, Error, GridSpec, IsometryReport, PoppReport, ReportOptions, StructureFile,
    VolumeReport,
};

#[derive(Parser)]
#[command(
    name = "popp",
    about = "Popp volume and sub-Laplacian computations for polynomial sub-Riemannian structures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth vector and equiregularity over a point set
    Growth(CommonArgs),
    /// Popp volume densities (and full per-point report)
    Volume(VolumeArgs),
    /// Canonical sub-Laplacian coefficients
    Sublap(VolumeArgs),
    /// Verify that the maps of a structure file are volume-preserving
    /// isometries
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Structure file (TOML); omit when using --builtin
    file: Option<PathBuf>,

    /// Builtin structure: heisenberg, martinet, engel, carnot-k3
    #[arg(long, conflicts_with = "file")]
    builtin: Option<String>,

    /// Evaluation point "x,y,..." (repeatable)
    #[arg(short, long = "point", allow_hyphen_values = true)]
    points: Vec<String>,

    /// Evaluation grid "start:stop:count" per axis, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Relative tolerance for rank decisions and residual checks
    #[arg(long, default_value_t = popp_core::DEFAULT_RANK_TOL)]
    tol: f64,

    /// Emit machine-readable JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Finite-difference step for divergence computations
    #[arg(long, default_value_t = popp_core::DEFAULT_FD_STEP)]
    fd_step: f64,

    /// Cross-validate the density against the minimum-norm oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Number of sample points when the file provides none
    #[arg(long, default_value_t = 20)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Growth(args) => cmd_growth(&args),
        Command::Volume(args) => cmd_report(&args, false),
        Command::Sublap(args) => cmd_report(&args, true),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(args: &CommonArgs) -> Result<StructureFile, Error> {
    match (&args.file, &args.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidStructure(format!("cannot read {}: {e}", path.display()))
            })?;
            StructureFile::from_toml_str(&text)
        }
        (None, Some(name)) => StructureFile::builtin(name),
        (None, None) => Err(Error::InvalidStructure(
            "give a structure file or --builtin NAME".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap prevents file together with --builtin"),
    }
}

/// File points, file grid, then command-line points and grid, in order.
fn evaluation_points(file: &StructureFile, args: &CommonArgs) -> Result<Vec<Vec<f64>>, Error> {
    let n = file.structure.nvars();
    let mut points = file.points.clone();
    if let Some(grid) = &file.grid {
        points.extend(grid.points());
    }
    for spec in &args.points {
        let coords: Vec<f64> = spec
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidStructure(format!("bad coordinate `{c}` in -p")))
            })
            .collect::<Result<_, _>>()?;
        if coords.len() != n {
            return Err(Error::InvalidStructure(format!(
                "point `{spec}` has {} coordinates, structure has dimension {n}",
                coords.len()
            )));
        }
        points.push(coords);
    }
    if let Some(spec) = &args.grid {
        points.extend(GridSpec::parse(spec, n)?.points());
    }
    Ok(points)
}

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
    format!("({})", coords.join(", "))
}

fn fmt_vec(v: &[f64]) -> String {
    let coords: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("({})", coords.join(", "))
}

#[derive(Serialize)]
struct GrowthPoint {
    point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth_vector: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hausdorff_dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_growth(args: &CommonArgs) -> Result<ExitCode, Error> {
    let file = load(args)?;
    let points = evaluation_points(&file, args)?;
    if points.is_empty() {
        return Err(Error::InvalidStructure(
            "no evaluation points: use -p or --grid, or add points to the file".into(),
        ));
    }
    let s = &file.structure;
    let per_point: Vec<GrowthPoint> = points
        .par_iter()
        .map(|q| match growth_vector(s, q, args.tol) {
            Ok(g) => GrowthPoint {
                point: q.clone(),
                hausdorff_dimension: Some(hausdorff_dimension(&g)),
                growth_vector: Some(g),
                error: None,
            },
            Err(e) => GrowthPoint {
                point: q.clone(),
                growth_vector: None,
                hausdorff_dimension: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let equireg = check_equiregular(s, &points, args.tol);

    if args.json {
        #[derive(Serialize)]
        struct Output<'a> {
            structure: &'a str,
            points: &'a [GrowthPoint],
            equiregularity: &'a popp_core::EquiregularityReport,
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&Output {
                structure: s.name(),
                points: &per_point,
                equiregularity: &equireg,
            })
            .expect("report serializes")
        );
    } else {
        for gp in &per_point {
            match (&gp.growth_vector, &gp.error) {
                (Some(g), _) => println!(
                    "{}: growth vector {:?}, step {}, Hausdorff dimension {}",
                    fmt_point(&gp.point),
                    g,
                    g.len(),
                    gp.hausdorff_dimension.unwrap()
                ),
                (None, Some(e)) => println!("{}: ERROR {e}", fmt_point(&gp.point)),
                _ => unreachable!(),
            }
        }
        if equireg.equiregular {
            println!(
                "equiregular over the sample: yes, growth vector {:?}",
                equireg.strata[0].growth_vector
            );
        } else {
            println!("equiregular over the sample: no");
            for stratum in &equireg.strata {
                println!(
                    "  growth vector {:?} at {} point(s)",
                    stratum.growth_vector,
                    stratum.point_indices.len()
                );
            }
            if !equireg.failures.is_empty() {
                println!("  {} point(s) failed", equireg.failures.len());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: &VolumeArgs, sublap_focus: bool) -> Result<ExitCode, Error> {
    let file = load(&args.common)?;
    let points = evaluation_points(&file, &args.common)?;
    if points.is_empty() {
        return Err(Error::InvalidStructure(
            "no evaluation points: use -p or --grid, or add points to the file".into(),
        ));
    }
    let opts = ReportOptions {
        tol: args.common.tol,
        fd_step: args.fd_step,
        oracle: args.oracle,
        with_sublaplacian: true,
        require_sublaplacian: sublap_focus,
    };
    let completion = if file.completion.is_empty() {
        None
    } else {
        Some(file.completion.as_slice())
    };
    let reports: Vec<PoppReport> = points
        .par_iter()
        .map(|q| popp_report(&file.structure, completion, q, &opts))
        .collect::<Result<_, _>>()?;

    if args.common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("report serializes")
        );
        return Ok(ExitCode::SUCCESS);
    }
    for r in &reports {
        println!("{}:", fmt_point(&r.point));
        println!(
            "  growth vector {:?}, step {}, Hausdorff dimension {}",
            r.growth_vector, r.step, r.hausdorff_dimension
        );
        println!("  frame: {}", r.frame.join(", "));
        if sublap_focus {
            if let Some(sub) = &r.sublaplacian {
                println!(
                    "  sub-Laplacian first-order coefficients: {}",
                    fmt_vec(&sub.first_order)
                );
                println!("  divergences of horizontal fields: {}", fmt_vec(&sub.divergences));
            }
        } else {
            let dets: Vec<String> = r
                .gram_determinants
                .iter()
                .map(|d| format!("{d:.12}"))
                .collect();
            println!("  Gram determinants by level: {}", dets.join(", "));
            println!("  Popp density (adapted coframe): {:.12}", r.popp_density_adapted);
            println!("  Popp density (coordinates):     {:.12}", r.popp_density_coordinates);
            if let Some(sub) = &r.sublaplacian {
                println!(
                    "  sub-Laplacian first-order coefficients: {}",
                    fmt_vec(&sub.first_order)
                );
            }
        }
        if let Some(dev) = r.oracle_deviation {
            println!("  oracle deviation: {dev:.3e}");
        }
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MapVerification {
    map: String,
    isometry: IsometryReport,
    volume: VolumeReport,
    pass: bool,
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let file = load(&args.common)?;
    let s = &file.structure;
    let mut sample = evaluation_points(&file, &args.common)?;
    if sample.is_empty() {
        // Deterministic fallback sample.
        let mut rng = ChaCha8Rng::seed_from_u64(0x706f7070);
        while sample.len() < args.samples {
            let q: Vec<f64> = (0..s.nvars()).map(|_| rng.random_range(-1.0..1.0)).collect();
            sample.push(q);
        }
    }
    if file.maps.is_empty() {
        println!("PASS (warning: no maps to verify)");
        return Ok(ExitCode::SUCCESS);
    }

    let mut results = Vec::new();
    for map in &file.maps {
        let isometry = is_isometry(map, s, &sample, args.common.tol.max(1e-8))?;
        let volume = check_volume_preserving(map, s, &sample, args.common.tol.max(1e-8))?;
        let pass = isometry.pass && volume.pass;
        results.push(MapVerification {
            map: map.name().to_string(),
            isometry,
            volume,
            pass,
        });
    }
    let all_pass = results.iter().all(|r| r.pass);

    if args.common.json {
        #[derive(Serialize)]
        struct Output<'a> {
            structure: &'a str,
            maps: &'a [MapVerification],
            pass: bool,
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&Output {
                structure: s.name(),
                maps: &results,
                pass: all_pass,
            })
            .expect("report serializes")
        );
    } else {
        for r in &results {
            println!(
                "map `{}`: {}",
                r.map,
                if r.pass { "PASS" } else { "FAIL" }
            );
            println!(
                "  distribution + metric: {} (max span residual {:.3e}, max Gram deviation {:.3e})",
                if r.isometry.pass { "ok" } else { "VIOLATED" },
                r.isometry.max_span_residual,
                r.isometry.max_gram_deviation
            );
            println!(
                "  Popp volume pullback:  {} (max relative error {:.3e})",
                if r.volume.pass { "ok" } else { "VIOLATED" },
                r.volume.max_rel_error
            );
        }
        println!("{}", if all_pass { "PASS" } else { "FAIL" });
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
