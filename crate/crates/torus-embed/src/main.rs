//! Command-line driver: split, embed, verify, export.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use torus_embed::config::RunConfig;
use torus_embed::export::{write_map_csv, write_obj, write_spiral_csv};
use torus_embed::pipeline::{prepare_split, Pipeline};
use torus_embed::scalar::to_f64;
use torus_embed::verify::run_suite;
use torus_embed::Result;

#[derive(Parser)]
#[command(
    name = "torus-embed",
    about = "Bounded and equivariant isometric embeddings of periodic-metric covers, with numerical certification",
    long_about = None,
    after_help = "Expression syntax for config fields (metric entries, oracle components):\n  \
        variables x1..xn, literals, pi, + - * / ^ and unary -, and the\n  \
        functions sin, cos, exp, log, sqrt, pow(a,b). `^` binds tighter than\n  \
        * and /, unary minus tighter than `^`; binary operators associate left."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to a JSON config; defaults to the built-in identity 2-torus run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides verify.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the per-check sample budget.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapChoice {
    E,
    F,
    Phi,
    Psi,
    Spiral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Obj,
}

#[derive(Subcommand)]
enum Command {
    /// Print the metric decomposition g = Q1 + c·I.
    Split {
        #[command(flatten)]
        common: Common,
    },
    /// Construct an embedding and summarize its dimensions and bounds.
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "e")]
        map: MapChoice,
    },
    /// Run the certification suite and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Report path.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Export map samples (CSV) or a quad mesh (OBJ).
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "e")]
        map: MapChoice,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Sampling window half-width (defaults to export.window).
        #[arg(long)]
        window: Option<f64>,
        /// Output path.
        #[arg(long, default_value = "export.out")]
        out: PathBuf,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::parse(&fs::read_to_string(path)?)?,
        None => RunConfig::default_for_n(2),
    };
    if let Some(seed) = common.seed {
        cfg.verify.seed = seed;
    }
    if let Some(samples) = common.samples {
        cfg.verify.samples = samples;
    }
    cfg.effective()
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Split { common } => {
            let (_, metric, split) = prepare_split(&load_config(&common)?)?;
            println!("metric family: {}", metric.family());
            println!("grid resolution: {}", split.grid_resolution());
            println!("c = {}", split.c());
            println!("margin = {}", split.margin());
            Ok(true)
        }
        Command::Embed { common, map } => {
            let p = Pipeline::prepare(&load_config(&common)?)?;
            let n = p.config.n;
            let big_n = p.oracle.ambient_dim();
            match map {
                MapChoice::E => {
                    let e = p.e_map()?;
                    println!("map E: R^{n} -> R^{}", e.ambient_dim());
                    println!("D = {} (N = {big_n}, N + 2n)", e.ambient_dim());
                    println!("R_Phi = {}", to_f64(p.oracle.radius_bound()));
                    println!("bound = {}", to_f64(e.radius_bound().expect("E bounded")));
                }
                MapChoice::F => {
                    let f = p.f_map()?;
                    println!("map F: R^{n} -> R^{}", f.ambient_dim());
                    println!("D = {} (N = {big_n}, N + n)", f.ambient_dim());
                    println!("R_Phi = {}", to_f64(p.oracle.radius_bound()));
                    println!("bound = unbounded (equivariant factor e is linear)");
                }
                MapChoice::Phi => {
                    let phi = p.phi_map()?;
                    println!("map Phi: R^{n} -> R^{}", phi.ambient_dim());
                    println!("R_Phi = {}", to_f64(p.oracle.radius_bound()));
                }
                MapChoice::Psi => {
                    let psi = p.psi_map()?;
                    println!("map Psi: R^{n} -> R^{}", psi.ambient_dim());
                    println!("bound = {}", to_f64(psi.radius_bound().expect("Psi bounded")));
                }
                MapChoice::Spiral => {
                    println!("spiral: r_in = {}, r_out = {}, k = {}", p.config.spiral.r_in, p.config.spiral.r_out, p.config.spiral.k);
                    println!("speed budget = {}", to_f64(p.curve.speed_budget()));
                }
            }
            println!("c = {}", p.split.c());
            Ok(true)
        }
        Command::Verify { common, out } => {
            let p = Pipeline::prepare(&load_config(&common)?)?;
            let report = run_suite(&p)?;
            for c in &report.checks {
                println!(
                    "{} {:<28} residual {: >13.6e}  tol {: >10.3e}  ({:.1} ms)",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.tolerance,
                    c.wall_ms
                );
            }
            fs::write(&out, report.to_json())?;
            println!(
                "{}: {} checks, report written to {}",
                if report.pass { "PASS" } else { "FAIL" },
                report.checks.len(),
                out.display()
            );
            Ok(report.pass)
        }
        Command::Export { common, map, format, window, out } => {
            let cfg = load_config(&common)?;
            let p = Pipeline::prepare(&cfg)?;
            let window = window.unwrap_or(cfg.export.window);
            let mut buf: Vec<u8> = Vec::new();
            match (map, format) {
                (MapChoice::Spiral, Format::Csv) => {
                    write_spiral_csv(&mut buf, &p.curve, window, cfg.export.samples)?
                }
                (MapChoice::Spiral, Format::Obj) => {
                    return Err(torus_embed::Error::Config(
                        "the spiral exports as CSV only".into(),
                    ))
                }
                (choice, format) => {
                    let target = match choice {
                        MapChoice::E => p.e_map()?,
                        MapChoice::F => p.f_map()?,
                        MapChoice::Phi => p.phi_map()?,
                        MapChoice::Psi => p.psi_map()?,
                        MapChoice::Spiral => unreachable!(),
                    };
                    match format {
                        Format::Csv => write_map_csv(
                            &mut buf,
                            &target,
                            cfg.verify.seed,
                            window,
                            cfg.export.samples,
                        )?,
                        Format::Obj => write_obj(
                            &mut buf,
                            &target,
                            window,
                            cfg.export.mesh_resolution,
                            cfg.export.coords,
                            &cfg.hash(),
                        )?,
                    }
                }
            }
            fs::write(&out, buf)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
