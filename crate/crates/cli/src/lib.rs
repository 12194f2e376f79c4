//! `boltid` command-line front end.
//!
//! Verbs: `enroll`, `identify`, `measure`, `gen`, `bench`. Exit codes are 0
//! on success, 1 on runtime failure and 2 on usage or configuration errors.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{cmd_bench, cmd_enroll, cmd_gen, cmd_identify, cmd_measure};
pub use config::{ConfigArgs, RunConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "boltid", version, about = "Identify bolts from binary silhouette images")]
pub struct Cli {
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a lookup table from single-bolt images
    Enroll(EnrollArgs),
    /// Match every bolt in the given images against a table
    Identify(IdentifyArgs),
    /// Print the features of the bolts in one image
    Measure(MeasureArgs),
    /// Render synthetic bolts plus a ground-truth manifest
    Gen(GenArgs),
    /// Time the feature-extraction path
    Bench(BenchArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct EnrollArgs {
    /// CSV of `file,name[,angle_deg,noise]`
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory the manifest's files are relative to (default: its own)
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Table to write
    #[arg(long = "table", visible_alias = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct IdentifyArgs {
    /// PGM files or directories of them
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[arg(long)]
    pub table: PathBuf,
    /// Write the JSON report here (`-` for stdout)
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Ground-truth manifest for true/false positive counts
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Leave the timing section out of the report
    #[arg(long)]
    pub no_timings: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct MeasureArgs {
    pub image: PathBuf,
    /// Write the JSON report here (`-` for stdout)
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub no_timings: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GenArgs {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Catalog CSV, or `builtin`
    #[arg(long, default_value = "builtin")]
    pub catalog: String,
    /// Random renders (random bolt, angle and position)
    #[arg(long)]
    pub count: Option<usize>,
    /// Comma-separated angles, every bolt centered at each (default: 0 to 330 by 30)
    #[arg(long)]
    pub angles: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1100x1100")]
    pub canvas: String,
    #[arg(long, default_value_t = boltid_core::synth::DEFAULT_PX_PER_MM)]
    pub px_per_mm: f64,
}

#[derive(Debug, Clone, clap::Args)]
pub struct BenchArgs {
    /// PGM files or directories of them
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Also write the rows as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

fn print_components(report: &report::RunReport) {
    for img in &report.images {
        if let Some(e) = &img.error {
            println!("{}\terror\t{e}", img.path);
            continue;
        }
        for c in &img.components {
            let what = match (&c.features, &c.match_result, &c.error) {
                (_, _, Some(e)) => format!("error\t{e}"),
                (_, Some(m), _) if m.known => format!("{}\t{:.2}", m.name, m.distance_px),
                (_, Some(m), _) => format!("unknown\t{:.2} (nearest {})", m.distance_px, m.name),
                (Some(f), None, _) => {
                    let pitch = f.pitch_px.map(|p| format!("{p:.2}")).unwrap_or_else(|| "-".into());
                    let mm = c
                        .features_mm
                        .map(|m| format!("\t{:.2}x{:.2} mm", m.minor, m.major))
                        .unwrap_or_default();
                    format!(
                        "{:.2}x{:.2} px\t{}\tpitch {pitch}{mm}",
                        f.minor_px, f.major_px, f.threading
                    )
                }
                _ => "no features".into(),
            };
            println!("{}\t#{}\t{what}", img.path, c.index);
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Enroll(a) => {
            let e = cmd_enroll(&a)?;
            println!("enrolled {} bolts into {}", e.table.len(), a.out.display());
            for c in &e.collisions {
                eprintln!("warning: {} and {} are nearly the same size", c.first, c.second);
            }
        }
        Command::Identify(a) => {
            let r = cmd_identify(&a)?;
            if a.json.as_deref() != Some(std::path::Path::new("-")) {
                print_components(&r);
            }
        }
        Command::Measure(a) => {
            let r = cmd_measure(&a)?;
            if a.json.as_deref() != Some(std::path::Path::new("-")) {
                print_components(&r);
            }
        }
        Command::Gen(a) => {
            let m = cmd_gen(&a)?;
            println!("wrote {} images and manifest.csv to {}", m.len(), a.out.display());
        }
        Command::Bench(a) => {
            let r = cmd_bench(&a)?;
            print!("{}", r.to_csv());
        }
    }
    Ok(())
}
