//! `spmf`: encode skeleton datasets into SPMF image corpora and train or
//! evaluate the linear baseline on them.
//!
//! Exit status is 0 on success, 1 on data errors and 2 on usage errors.

mod config;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{AugmentFlags, FileConfig, TrainFlags};
use spmf_core::augment::{augment, replica_rng};
use spmf_core::baseline::{
    evaluate, load_checkpoint, save_checkpoint, sidecar_path, train, Dataset,
};
use spmf_core::ingest::{read_file, MsrFormatConfig, NtuFormatConfig, SourceFormat};
use spmf_core::pipeline::{
    corpus_stats, encode_corpus, DatasetManifest, EncodeConfig, Split, StatsScope, INDEX_FILE,
};
use spmf_core::{validate_sequence, DistanceStats, SpmfImage};

#[derive(Debug, Parser)]
#[command(name = "spmf", version = spmf_core::VERSION, about, propagate_version = true)]
struct Cli {
    /// Seed for every stochastic stage
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parsing and encoding (0 = one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file with default settings; flags win on conflict
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse skeleton files and print one JSON summary line per sequence
    Parse {
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Joints per frame (MSR) or per body (NTU); defaults to 20 / 25
        #[arg(long)]
        joints: Option<usize>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Compute the distance statistics of a manifest
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum)]
        scope: Option<ScopeArg>,
        /// Write the record here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode every sample of a manifest into a PNG corpus with an index
    Encode {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Existing statistics record; computed from the manifest when absent
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, value_enum)]
        scope: Option<ScopeArg>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Augmented copies per training sample
        #[arg(long)]
        replicas: Option<u32>,
        #[command(flatten)]
        augment: AugmentFlags,
    },
    /// Apply random crop, flip and blur to one image
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Identifier mixed into the random stream; defaults to the file stem
        #[arg(long)]
        sample_id: Option<String>,
        #[arg(long, default_value_t = 1)]
        replica: u32,
        #[command(flatten)]
        augment: AugmentFlags,
    },
    /// Train the linear softmax baseline on the train split of a corpus
    TrainBaseline {
        /// Corpus directory or its index file
        #[arg(long)]
        index: PathBuf,
        /// Checkpoint path; metadata goes next to it with a .json extension
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        train: TrainFlags,
    },
    /// Evaluate a baseline checkpoint on one split of a corpus
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
        /// Also write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print JSON instead of the text table
        #[arg(long)]
        json: bool,
    },
    /// Print the version
    Version,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Msr,
    Ntu,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ScopeArg {
    Corpus,
    Train,
}

#[derive(Debug, Clone, Copy, PartialEq, clap::ValueEnum)]
enum SplitArg {
    Train,
    Test,
}

impl From<ScopeArg> for StatsScope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::Corpus => StatsScope::Corpus,
            ScopeArg::Train => StatsScope::Train,
        }
    }
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

struct RunContext {
    seed: u64,
    jobs: usize,
    file: FileConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let ctx = RunContext {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        jobs: cli.jobs.or(file.jobs).unwrap_or(0),
        file,
    };
    match cli.command {
        Command::Parse {
            format,
            joints,
            files,
        } => parse(&ctx, format, joints, &files),
        Command::Stats {
            manifest,
            scope,
            out,
        } => stats(&ctx, &manifest, scope, out.as_deref()),
        Command::Encode {
            manifest,
            out,
            stats,
            scope,
            width,
            height,
            replicas,
            augment,
        } => {
            let e = &ctx.file.encode;
            let cfg = EncodeConfig {
                width: width.or(e.width).unwrap_or(spmf_core::spmf::DEFAULT_SIZE),
                height: height.or(e.height).unwrap_or(spmf_core::spmf::DEFAULT_SIZE),
                replicas: replicas.or(e.replicas).unwrap_or(0),
                augment: augment.resolve(&ctx.file.augment, ctx.seed),
                jobs: ctx.jobs,
            };
            encode(&ctx, &manifest, &out, stats.as_deref(), scope, &cfg)
        }
        Command::Augment {
            input,
            out,
            sample_id,
            replica,
            augment: flags,
        } => {
            let cfg = flags.resolve(&ctx.file.augment, ctx.seed);
            cfg.check().map_err(|e| Failure::Usage(e.to_string()))?;
            let img = SpmfImage::read_png(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let id = sample_id.unwrap_or_else(|| {
                input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let mut rng = replica_rng(cfg.seed, &id, replica);
            let aug = augment(&img, &cfg, &mut rng).map_err(|e| anyhow!(e))?;
            aug.write_png(&out).map_err(|e| anyhow!(e))?;
            Ok(())
        }
        Command::TrainBaseline {
            index,
            out,
            train: flags,
        } => {
            let cfg = flags.resolve(&ctx.file.train, ctx.seed);
            cfg.check().map_err(|e| Failure::Usage(e.to_string()))?;
            let index = index_path(&index);
            let (data, skipped) =
                Dataset::from_index(&index, Split::Train).map_err(|e| anyhow!(e))?;
            let outcome = train(&data, &cfg).map_err(|e| anyhow!(e))?;
            save_checkpoint(&out, &outcome.model, &cfg, &outcome.loss_history)
                .map_err(|e| anyhow!(e))?;
            let summary = json!({
                "checkpoint": out,
                "metadata": sidecar_path(&out),
                "train_samples": data.len(),
                "skipped_rows": skipped,
                "classes": outcome.model.class_ids,
                "epochs": cfg.epochs,
                "steps": outcome.steps,
                "final_loss": outcome.loss_history.last(),
            });
            println!("{summary}");
            Ok(())
        }
        Command::Eval {
            index,
            model,
            split,
            report,
            json,
        } => {
            let split = if split == SplitArg::Train {
                Split::Train
            } else {
                Split::Test
            };
            let model = load_checkpoint(&model).map_err(|e| anyhow!(e))?;
            let (data, _) =
                Dataset::from_index(&index_path(&index), split).map_err(|e| anyhow!(e))?;
            let r = evaluate(&model, &data).map_err(|e| anyhow!(e))?;
            if let Some(p) = &report {
                std::fs::write(p, r.to_json() + "\n")
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            if json {
                println!("{}", r.to_json());
            } else {
                print!("{}", r.to_table());
            }
            Ok(())
        }
        Command::Version => {
            println!("spmf {}", spmf_core::VERSION);
            Ok(())
        }
    }
}

fn index_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(INDEX_FILE)
    } else {
        p.to_path_buf()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Data(anyhow!("cannot start worker pool: {e}")))
}

fn parse(
    ctx: &RunContext,
    format: FormatArg,
    joints: Option<usize>,
    files: &[PathBuf],
) -> Result<(), Failure> {
    let mut msr = MsrFormatConfig::default();
    let mut ntu = NtuFormatConfig::default();
    let format = match format {
        FormatArg::Msr => {
            msr.joints_per_frame = joints.unwrap_or(msr.joints_per_frame);
            SourceFormat::Msr
        }
        FormatArg::Ntu => {
            ntu.joints_per_body = joints.unwrap_or(ntu.joints_per_body);
            SourceFormat::Ntu
        }
    };
    let results: Vec<_> = pool(ctx.jobs)?.install(|| {
        files
            .par_iter()
            .map(|f| read_file(f, format, &msr, &ntu))
            .collect()
    });
    let mut failures = 0;
    for (file, result) in files.iter().zip(results) {
        match result {
            Ok(seqs) => {
                for s in seqs {
                    let report = validate_sequence(&s);
                    let line = json!({
                        "file": file,
                        "id": s.id,
                        "label": s.label,
                        "subject_id": s.subject_id,
                        "camera_id": s.camera_id,
                        "body_id": s.body_id,
                        "frames": s.len(),
                        "joints": s.joint_count,
                        "dropout_frames": report.dropout_frames,
                        "violations": report.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    });
                    println!("{line}");
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(Failure::Data(anyhow!(
            "{failures} of {} files failed to parse",
            files.len()
        )));
    }
    Ok(())
}

fn load_manifest(path: &Path) -> Result<DatasetManifest, Failure> {
    DatasetManifest::load(path).map_err(|e| Failure::Data(anyhow!(e)))
}

fn compute(
    ctx: &RunContext,
    manifest: &DatasetManifest,
    scope: Option<ScopeArg>,
) -> Result<DistanceStats, Failure> {
    let scope = scope
        .map(StatsScope::from)
        .or(ctx.file.encode.scope)
        .unwrap_or_default();
    let (stats, skipped) = corpus_stats(manifest, scope, ctx.jobs).map_err(|e| anyhow!(e))?;
    for s in &skipped {
        eprintln!("warning: {} skipped: {}", s.id, s.message);
    }
    Ok(stats)
}

fn stats(
    ctx: &RunContext,
    manifest: &Path,
    scope: Option<ScopeArg>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let m = load_manifest(manifest)?;
    let stats = compute(ctx, &m, scope)?;
    match out {
        Some(p) => stats.save(p).map_err(|e| anyhow!(e))?,
        None => print!("{}", stats.to_record()),
    }
    Ok(())
}

fn encode(
    ctx: &RunContext,
    manifest: &Path,
    out: &Path,
    stats_path: Option<&Path>,
    scope: Option<ScopeArg>,
    cfg: &EncodeConfig,
) -> Result<(), Failure> {
    cfg.augment
        .check()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if cfg.width == 0 || cfg.height == 0 {
        return Err(Failure::Usage(
            "--width and --height must be at least 1".into(),
        ));
    }
    let m = load_manifest(manifest)?;
    let stats = match stats_path {
        Some(p) => DistanceStats::load(p).map_err(|e| anyhow!(e))?,
        None => compute(ctx, &m, scope)?,
    };
    let summary = encode_corpus(&m, &stats, cfg, out).map_err(|e| anyhow!(e))?;
    if summary.augmentation_skipped {
        eprintln!("warning: replicas are only generated for MSR datasets; none written");
    }
    println!(
        "{}",
        json!({
            "index": summary.index_path,
            "rows": summary.rows,
            "images": summary.images,
            "errors": summary.errors,
            "train_samples": summary.train_samples,
            "test_samples": summary.test_samples,
        })
    );
    if summary.errors > 0 {
        return Err(Failure::Data(anyhow!(
            "{} samples failed to encode; see the error rows in {}",
            summary.errors,
            summary.index_path.display()
        )));
    }
    Ok(())
}
