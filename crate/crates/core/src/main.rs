use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use vfcp::codec::{self, Backend, CodecConfig, ErrorBound, FrameSink, Predictor};
use vfcp::field::{
    self, f32_le_bytes, load_raw, quality, write_raw, Dims, FieldSeries, Metadata, Scale,
};
use vfcp::synth::{gen_synthetic, SynthKind, SynthParams};
use vfcp::track::{extract_trajectories, residual_stats, verify};
use vfcp::{Error, Result};

/// Lossy compression of 2D time-varying vector fields that keeps critical
/// point trajectories.
///
/// A field on disk is a prefix `P`: `P.u.f32` and `P.v.f32` hold the
/// components (little-endian float32, frame-major, row-major) and `P.json`
/// the dimensions and spacing.
#[derive(Debug, Parser)]
#[command(name = "vfcp", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic field.
    Gen(GenArgs),
    /// Compress a field into an archive.
    Compress(CompressArgs),
    /// Decompress an archive into a field.
    Decompress(DecompressArgs),
    /// Compare an original field with a reconstruction.
    Verify(VerifyArgs),
    /// Write critical point trajectories as CSV.
    Track(TrackArgs),
    /// Write residual distribution tables of an archive.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: SynthKind,
    /// Grid size as HxWxT.
    #[arg(long, value_parser = parse_dims)]
    dims: Dims,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator parameter, repeatable: center=x,y velocity=x,y amplitude,
    /// core_radius, separation, omega, base_speed, shift, wavelength, modes.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output prefix.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CompressArgs {
    /// Input field prefix.
    input: PathBuf,
    /// Archive path.
    #[arg(short, long)]
    out: PathBuf,
    #[command(flatten)]
    eps: EpsArgs,
    #[command(flatten)]
    tune: TuneArgs,
    /// Skip the decompression pass that measures PSNR.
    #[arg(long)]
    no_check: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct EpsArgs {
    /// Error bound in field units.
    #[arg(long, allow_negative_numbers = true)]
    eps_abs: Option<f64>,
    /// Error bound as a fraction of the joint value range.
    #[arg(long, allow_negative_numbers = true)]
    eps_rel: Option<f64>,
}

impl EpsArgs {
    fn bound(&self) -> ErrorBound {
        match (self.eps_abs, self.eps_rel) {
            (Some(a), _) => ErrorBound::Absolute(a),
            (None, Some(r)) => ErrorBound::Relative(r),
            (None, None) => unreachable!("clap requires one of the bounds"),
        }
    }
}

/// Encoder tunables. Unset flags keep the value from `--config`, or the
/// library default.
#[derive(Debug, Args, Default)]
struct TuneArgs {
    /// JSON file with any subset of the encoder settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mop, lorenzo (or 3dl), sl.
    #[arg(long, value_parser = parse_predictor)]
    predictor: Option<Predictor>,
    /// Mode block size, `N` or `RxC`.
    #[arg(long, value_parser = parse_block)]
    block: Option<(usize, usize)>,
    /// Scoring subsample stride.
    #[arg(long)]
    stride: Option<usize>,
    /// Relative rate improvement SL needs over Lorenzo.
    #[arg(long)]
    theta: Option<f64>,
    /// Overflow penalty in bits.
    #[arg(long)]
    lambda: Option<f64>,
    /// Quantization radius.
    #[arg(long)]
    radius: Option<u32>,
    /// Largest backtracking displacement (cells) handled by one RK2 step.
    #[arg(long)]
    d_max: Option<f64>,
    /// Cap on Euler substeps.
    #[arg(long)]
    n_max: Option<u32>,
    /// Exponent ladder depth.
    #[arg(long)]
    k_max: Option<u8>,
    /// deflate or identity.
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Fixed-point scale exponent; default picks it from the data.
    #[arg(long, allow_hyphen_values = true)]
    scale_exponent: Option<i32>,
}

impl TuneArgs {
    fn config(&self) -> Result<CodecConfig> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
            None => CodecConfig::default(),
        };
        if let Some(x) = self.predictor {
            c.predictor = x;
        }
        if let Some((bx, by)) = self.block {
            c.mop.bx = bx;
            c.mop.by = by;
        }
        if let Some(x) = self.stride {
            c.mop.stride = x;
        }
        if let Some(x) = self.theta {
            c.mop.theta = x;
        }
        if let Some(x) = self.lambda {
            c.mop.lambda = x;
        }
        if let Some(x) = self.radius {
            c.radius = x;
        }
        if let Some(x) = self.d_max {
            c.d_max = x;
        }
        if let Some(x) = self.n_max {
            c.n_max = x;
        }
        if let Some(x) = self.k_max {
            c.k_max = x;
        }
        if let Some(x) = self.backend {
            c.backend = x;
        }
        if self.scale_exponent.is_some() {
            c.scale_exponent = self.scale_exponent;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct DecompressArgs {
    archive: PathBuf,
    /// Output field prefix.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Original field prefix.
    orig: PathBuf,
    /// Reconstructed field prefix.
    recon: PathBuf,
    /// Archive the reconstruction came from; supplies the fixed-point scale
    /// and the compression ratio.
    #[arg(long)]
    archive: Option<PathBuf>,
    /// Exit with status 3 when the trajectories differ.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Args)]
struct TrackArgs {
    input: PathBuf,
    /// CSV path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    scale_exponent: Option<i32>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    archive: PathBuf,
    /// Directory for pmf.csv, tail_ccdf.csv and run_ccdf.csv.
    #[arg(short, long)]
    out_dir: PathBuf,
}

fn parse_kind(s: &str) -> Result<SynthKind> {
    s.parse()
}

fn parse_dims(s: &str) -> Result<Dims> {
    Dims::parse(s)
}

fn parse_predictor(s: &str) -> Result<Predictor> {
    s.parse()
}

fn parse_backend(s: &str) -> Result<Backend> {
    s.parse()
}

fn parse_block(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParam(format!("block `{s}`"));
    let n = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((n(a)?, n(b)?)),
        None => n(s).map(|k| (k, k)),
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn read_field(prefix: &Path) -> Result<FieldSeries> {
    let meta = Metadata::read(with_ext(prefix, ".json"))?;
    load_raw(
        with_ext(prefix, ".u.f32"),
        with_ext(prefix, ".v.f32"),
        meta.dims()?,
        meta.spacing(),
    )
}

fn write_field(f: &FieldSeries, prefix: &Path) -> Result<()> {
    write_raw(f, with_ext(prefix, ".u.f32"), with_ext(prefix, ".v.f32"))?;
    f.metadata().write(with_ext(prefix, ".json"))
}

/// Streams decoded frames straight to the component files.
struct FileSink {
    u: BufWriter<File>,
    v: BufWriter<File>,
}

impl FrameSink for FileSink {
    fn frame(&mut self, _t: usize, u: &[f32], v: &[f32]) -> Result<()> {
        self.u.write_all(&f32_le_bytes(u))?;
        self.v.write_all(&f32_le_bytes(v))?;
        Ok(())
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut p = SynthParams::default();
    for kv in &a.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParam(format!("expected KEY=VALUE, got `{kv}`")))?;
        p.set(k.trim(), v)?;
    }
    let f = gen_synthetic(a.kind, a.dims, &p, a.seed)?;
    write_field(&f, &a.out)?;
    let (lo, hi) = f.value_range();
    println!(
        "kind={} dims={}x{}x{} seed={} min={lo} max={hi}",
        a.kind.name(),
        a.dims.h,
        a.dims.w,
        a.dims.t,
        a.seed
    );
    Ok(())
}

fn cmd_compress(a: CompressArgs) -> Result<()> {
    let cfg = a.tune.config()?;
    let f = read_field(&a.input)?;
    let eps = a.eps.bound().resolve(&f)?;
    let (archive, stats) = codec::compress_with_stats(&f, eps, &cfg)?;
    fs::write(&a.out, archive.as_bytes())?;
    let cr = f.raw_bytes() as f64 / archive.len() as f64;
    println!("eps={eps:e}");
    println!("bytes={}", archive.len());
    println!("cr={cr:.4}");
    println!("compress_ms={:.3}", stats.elapsed.as_secs_f64() * 1e3);
    println!(
        "critical_faces={}",
        stats.critical_slice_faces + stats.critical_slab_faces
    );
    println!("lossless_vertices={}", stats.lossless_vertices);
    println!("sl_blocks={}", stats.sl_blocks);
    println!("lorenzo_blocks={}", stats.lorenzo_blocks);
    if !a.no_check {
        let start = Instant::now();
        let g = codec::decompress(archive.as_bytes())?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let q = quality(&f, &g, Some(archive.len()))?;
        println!("decompress_ms={ms:.3}");
        println!("psnr={:.4}", q.psnr_joint);
        println!("max_abs_err={:e}", q.max_abs_err);
    }
    Ok(())
}

fn cmd_decompress(a: DecompressArgs) -> Result<()> {
    let bytes = fs::read(&a.archive)?;
    let start = Instant::now();
    let mut sink = FileSink {
        u: BufWriter::new(File::create(with_ext(&a.out, ".u.f32"))?),
        v: BufWriter::new(File::create(with_ext(&a.out, ".v.f32"))?),
    };
    let header = codec::decompress_into(&bytes, &mut sink)?;
    sink.u.flush()?;
    sink.v.flush()?;
    let d = header.dims;
    Metadata {
        h: d.h,
        w: d.w,
        t: d.t,
        dx: header.spacing.dx,
        dy: header.spacing.dy,
        dt: header.spacing.dt,
    }
    .write(with_ext(&a.out, ".json"))?;
    println!("dims={}x{}x{}", d.h, d.w, d.t);
    println!("decompress_ms={:.3}", start.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let f = read_field(&a.orig)?;
    let g = read_field(&a.recon)?;
    let (size, scale) = match &a.archive {
        Some(p) => {
            let bytes = fs::read(p)?;
            let h = codec::archive::open(&bytes)?.0;
            (Some(bytes.len()), Some(h.scale))
        }
        None => (None, None),
    };
    let r = verify(&f, &g, size, scale)?;
    print!("{}", r.to_text());
    Ok(!a.check || r.passed())
}

fn cmd_track(a: TrackArgs) -> Result<()> {
    let f = read_field(&a.input)?;
    let ff = match a.scale_exponent {
        Some(exponent) => field::to_fixed_with_scale(&f, Scale { exponent })?,
        None => field::to_fixed(&f),
    };
    let g = extract_trajectories(&ff)?;
    let csv = g.to_csv();
    match a.out {
        Some(p) => {
            fs::write(p, csv)?;
            println!("trajectories={}", g.components.len());
            println!("crossed_faces={}", g.nodes.len());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let s = codec::read_streams(&fs::read(&a.archive)?)?;
    let r = residual_stats(&s.residuals);
    r.write_csv(&a.out_dir)?;
    println!("symbols={}", r.total);
    println!("overflow={}", r.overflow);
    println!("run_mean={:.4}", r.run_mean);
    for (q, v) in r.run_percentiles {
        println!("run_p{q}={v}");
    }
    println!("sl_blocks={}", s.modes.iter().filter(|&&m| m).count());
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Compress(a) => cmd_compress(a).map(|_| true),
        Command::Decompress(a) => cmd_decompress(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Track(a) => cmd_track(a).map(|_| true),
        Command::Stats(a) => cmd_stats(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!("error\tcode=usage\tmessage={first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error\tcode={}\tmessage={msg}", e.code());
            ExitCode::FAILURE
        }
    }
}
