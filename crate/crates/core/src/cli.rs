//! `radontex` command-line interface.
//!
//! Exit codes: 0 success, 2 I/O, 3 precondition or domain error, 4 feature
//! configuration mismatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::{feature_vector, nearest_with, ExtractConfig, FeatureVector, Weights};
use crate::error::{Error, Result};
use crate::imageio::{binarize, load_netpbm, Binarization, BinaryImage};
use crate::par::Execution;
use crate::report;
use crate::seqfeat::{autocorrelation, column_bits, step_sweep};
use crate::slant::{entropy_curve, estimate_slant, AngleGrid};
use crate::synth::{synth_strokes, SynthConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "radontex", version, about = "Radon-projection texture features of handwritten strips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy-vs-angle curves and the generalized slant per sub-strip height.
    Slant(SlantArgs),
    /// Column-occupancy autocorrelation for one step or a sweep of steps.
    Autocorr(AutocorrArgs),
    /// Write the serialized feature vector of a strip.
    Features(FeaturesArgs),
    /// Rank a gallery of feature files by distance to a query.
    Classify(ClassifyArgs),
    /// Generate a synthetic strip of slanted strokes as P5.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct ImageArgs {
    /// Input strip (netpbm P4 or P5).
    input: PathBuf,
    /// `otsu` or `fixed:<0-255>`.
    #[arg(long, default_value = "otsu", value_parser = parse_binarization)]
    binarize: Binarization,
}

#[derive(Debug, Args)]
struct SlantArgs {
    #[command(flatten)]
    image: ImageArgs,
    /// Sub-strip heights in pixels.
    #[arg(long, default_value = "30,50", value_parser = parse_counts)]
    heights: Counts,
    /// Angle grid `start:stop:step` in degrees.
    #[arg(long, default_value = "30:150:1", value_parser = parse_grid)]
    grid: AngleGrid,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AutocorrArgs {
    #[command(flatten)]
    image: ImageArgs,
    /// Single step (sub-strip height).
    #[arg(long, conflicts_with = "steps")]
    step: Option<usize>,
    /// Step sweep `a:b:c` or a comma list.
    #[arg(long, value_parser = parse_counts)]
    steps: Option<Counts>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[command(flatten)]
    image: ImageArgs,
    #[arg(long, default_value = "30,50", value_parser = parse_counts)]
    heights: Counts,
    #[arg(long, default_value = "30:150:1", value_parser = parse_grid)]
    grid: AngleGrid,
    #[arg(long, default_value = "5:30:5", value_parser = parse_counts)]
    steps: Counts,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Query feature file.
    #[arg(long)]
    query: PathBuf,
    /// Directory of `*.fv` feature files; ids are the file stems.
    #[arg(long)]
    gallery: PathBuf,
    /// Distance weights `slant,entropy,autocorr`.
    #[arg(long, default_value = "1,1,1", value_parser = parse_weights)]
    weights: Weights,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// True slant in degrees.
    #[arg(long)]
    angle: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = SynthConfig::default().rows)]
    rows: usize,
    #[arg(long, default_value_t = SynthConfig::default().cols)]
    cols: usize,
    #[arg(long, default_value_t = SynthConfig::default().stroke_len)]
    stroke_len: usize,
    #[arg(long, default_value_t = SynthConfig::default().stroke_width)]
    stroke_width: usize,
    #[arg(long, default_value_t = SynthConfig::default().stroke_count)]
    stroke_count: usize,
    #[arg(long, default_value_t = SynthConfig::default().gap_period)]
    gap_period: usize,
    #[arg(long, default_value_t = SynthConfig::default().word_len)]
    word_len: usize,
    #[arg(long, default_value_t = SynthConfig::default().word_gap)]
    word_gap: usize,
    #[arg(long, default_value_t = SynthConfig::default().jitter)]
    jitter: u32,
}

#[derive(Debug, Clone)]
struct Counts(Vec<usize>);

fn parse_binarization(s: &str) -> std::result::Result<Binarization, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<AngleGrid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `a:b:c` (inclusive range) or `a,b,c`; every value must be at least 1.
fn parse_counts(s: &str) -> std::result::Result<Counts, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not a count"));
    let values = if s.contains(':') {
        let parts = s.split(':').map(num).collect::<std::result::Result<Vec<_>, _>>()?;
        match parts[..] {
            [a, b, c] if c > 0 && a <= b => (a..=b).step_by(c).collect(),
            _ => return Err(format!("{s:?} is not start:stop:step with start <= stop and step > 0")),
        }
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(format!("{s:?}: values must be at least 1"));
    }
    Ok(Counts(values))
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    let w = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| format!("{s:?} is not three numbers"))?;
    match w[..] {
        [slant, entropy, autocorr] if w.iter().all(|v| v.is_finite() && *v >= 0.0) => {
            Ok(Weights { slant, entropy, autocorr })
        }
        _ => Err(format!("{s:?} must be three non-negative numbers")),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Io(_) => EXIT_IO,
        Error::ConfigMismatch(..) => EXIT_MISMATCH,
        _ => EXIT_DOMAIN,
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, data).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_strip(args: &ImageArgs) -> Result<BinaryImage> {
    let gray = load_netpbm(&read(&args.input)?)?;
    binarize(&gray, args.binarize)
}

fn cmd_slant(args: &SlantArgs) -> Result<()> {
    let m = load_strip(&args.image)?;
    for &h in &args.heights.0 {
        // fail before any curve is computed
        if h > m.rows() {
            return Err(Error::BadHeight { height: h, rows: m.rows() });
        }
    }
    let curves = args.heights.0.iter().map(|&h| entropy_curve(&m, &args.grid, h)).collect::<Result<Vec<_>>>()?;
    for c in &curves {
        let s = estimate_slant(c)?;
        println!(
            "h={}\tslant={:.3}\tgrid_angle={}\tentropy={:.6}",
            c.sub_strip_height, s.angle, s.grid_angle, s.entropy_at_min
        );
    }
    if let Some(path) = &args.csv {
        write(path, report::entropy_csv(&curves)?)?;
    }
    if let Some(path) = &args.svg {
        write(path, report::entropy_svg(&curves))?;
    }
    Ok(())
}

fn cmd_autocorr(args: &AutocorrArgs) -> Result<()> {
    let m = load_strip(&args.image)?;
    match &args.steps {
        Some(steps) => {
            let mat = step_sweep(&m, &steps.0)?;
            println!("steps={:?}\tcolumns={}", mat.steps, mat.curves.first().map_or(0, Vec::len));
            if let Some(path) = &args.csv {
                write(path, report::matrix_csv(&mat))?;
            }
            if let Some(path) = &args.svg {
                write(path, report::matrix_svg(&mat))?;
            }
        }
        None => {
            let step = args.step.unwrap_or(15);
            let curve = column_bits(&m, step).and_then(|s| autocorrelation(&s)).map_err(|e| Error::at_step(step, e))?;
            println!("step={step}\tmax_lag={}", curve.max_lag());
            if let Some(path) = &args.csv {
                write(path, report::autocorr_csv(&curve))?;
            }
            if let Some(path) = &args.svg {
                write(path, report::autocorr_svg(&curve))?;
            }
        }
    }
    Ok(())
}

fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let cfg = ExtractConfig {
        grid: args.grid,
        heights: args.heights.0.clone(),
        steps: args.steps.0.clone(),
        binarization: args.image.binarize,
    };
    let m = load_strip(&args.image)?;
    let fv = feature_vector(&m, &cfg)?;
    match &args.output {
        Some(path) => write(path, fv.to_json()),
        None => {
            print!("{}", fv.to_json());
            Ok(())
        }
    }
}

fn load_gallery(dir: &Path) -> Result<Vec<(String, FeatureVector)>> {
    let mut paths = fs::read_dir(dir)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.display()))))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "fv"));
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().expect("has extension").to_string_lossy().into_owned();
            let text = String::from_utf8(read(&p)?).map_err(|e| Error::BadFeatureFile(e.to_string()))?;
            Ok((id, FeatureVector::from_json(&text)?))
        })
        .collect()
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let text = String::from_utf8(read(&args.query)?).map_err(|e| Error::BadFeatureFile(e.to_string()))?;
    let query = FeatureVector::from_json(&text)?;
    let gallery = load_gallery(&args.gallery)?;
    let ranked = nearest_with(&query, &gallery, args.weights, Execution::default())?;
    println!("id\tdistance");
    for (id, d) in ranked {
        println!("{id}\t{}", report::fmt_f64(d));
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        rows: args.rows,
        cols: args.cols,
        angle: args.angle,
        stroke_len: args.stroke_len,
        stroke_width: args.stroke_width,
        stroke_count: args.stroke_count,
        gap_period: args.gap_period,
        word_len: args.word_len,
        word_gap: args.word_gap,
        jitter: args.jitter,
        seed: args.seed,
    };
    let m = synth_strokes(&cfg)?;
    write(&args.out, m.to_gray().to_pgm())?;
    println!("wrote {}x{} strip at {}° to {}", cfg.cols, cfg.rows, cfg.angle, args.out.display());
    Ok(())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Slant(a) => cmd_slant(a),
        Command::Autocorr(a) => cmd_autocorr(a),
        Command::Features(a) => cmd_features(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqfeat::DEFAULT_STEPS;

    #[test]
    fn count_lists() {
        assert_eq!(parse_counts("5:30:5").unwrap().0, DEFAULT_STEPS.to_vec());
        assert_eq!(parse_counts("30,50").unwrap().0, vec![30, 50]);
        assert_eq!(parse_counts("15").unwrap().0, vec![15]);
        assert!(parse_counts("0,5").is_err());
        assert!(parse_counts("5:1:1").is_err());
        assert!(parse_counts("5:10:0").is_err());
        assert!(parse_counts("a").is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weights("1,1,1").unwrap(), Weights::default());
        assert!(parse_weights("1,1").is_err());
        assert!(parse_weights("1,-1,1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::ConfigMismatch("a".into(), "b".into())), EXIT_MISMATCH);
        assert_eq!(exit_code(&Error::at_step(15, Error::ZeroVariance)), EXIT_DOMAIN);
        assert_eq!(exit_code(&Error::stage("x", Error::Io(std::io::Error::other("y")))), EXIT_IO);
    }

    #[test]
    fn usage_errors_are_domain_errors() {
        assert_eq!(run(["radontex", "slant"]), EXIT_DOMAIN);
        assert_eq!(run(["radontex", "slant", "x.pgm", "--grid", "0:10:1"]), EXIT_DOMAIN);
        assert_eq!(run(["radontex", "--help"]), EXIT_OK);
    }
}
