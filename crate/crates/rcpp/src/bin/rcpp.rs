//! Command-line front end: spectra analysis, code construction, BLER
//! simulation, and equivalence-class reports. Every command writes its data
//! files plus a JSON manifest that `rcpp replay` reproduces bit-exactly.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rcpp::puncture::{
    count_equivalent_tables, derive_source_puncture_set, enumerate_equivalent_tables, Mode,
    PuncturingTable, SourcePunctureSet,
};
use rcpp::reliability::{
    a0_from_ebn0, bec_exact, construct_ga, propagate_bounds, select_info_set, InfoSet,
    ReliabilityVector,
};
use rcpp::sim::{run_bler, ChannelParams, CodeConfig, DecoderChoice};
use rcpp::spectra::SpectrumDistances;
use rcpp::{Crc, PolarSpectrum, SpectrumKind};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "RCPP_OUT_DIR";
const MANIFEST_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "rcpp", version, about = "Rate-compatible punctured polar code toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Clone, Serialize, Deserialize)]
enum Cmd {
    /// Polar spectra and spectrum distances for a puncturing scheme.
    Spectra(SpectraArgs),
    /// Construct an RCPP code and write its partition file.
    Construct(ConstructArgs),
    /// Monte-Carlo BLER sweep over a constructed code.
    Simulate(SimulateArgs),
    /// Equivalent puncturing-table class count (and optional enumeration).
    Equiv(EquivArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Scheme {
    Qup,
    Rqup,
    Wang,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Qup => "qup",
            Scheme::Rqup => "rqup",
            Scheme::Wang => "wang",
        }
    }

    fn table(self, n: usize, q: usize) -> rcpp::Result<PuncturingTable> {
        match self {
            Scheme::Qup => PuncturingTable::qup(n, q),
            Scheme::Rqup => PuncturingTable::rqup(n, q),
            Scheme::Wang => PuncturingTable::wang_reference(n, q),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
enum ModeArg {
    C0,
    C1,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::C0 => Mode::C0,
            ModeArg::C1 => Mode::C1,
        }
    }
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct SpectraArgs {
    /// Parent code length N (power of two).
    #[arg(long)]
    n: usize,
    /// Single transmitted length M.
    #[arg(long, conflicts_with = "m_range")]
    m: Option<usize>,
    /// Inclusive sweep `lo..hi`; M values outside (N/2, N] are skipped.
    #[arg(long)]
    m_range: Option<String>,
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Puncturing mode; defaults to the scheme's natural mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Output directory (default: $RCPP_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    /// Log-domain Bhattacharyya bound propagation; design value is Eb/N0 dB.
    Bound,
    /// Exact erasure-channel evolution; design value is the erasure rate.
    Bec,
    /// Gaussian approximation; design value is Eb/N0 dB.
    Ga,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Bound => "bound",
            Method::Bec => "bec",
            Method::Ga => "ga",
        }
    }
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Information length K.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    scheme: Scheme,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    method: Method,
    /// Design parameter; meaning depends on --method.
    #[arg(long, default_value_t = 2.0)]
    design: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Decoder {
    Sc,
    Scl,
    Cascl,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct SimulateArgs {
    /// Construction file written by `rcpp construct`.
    #[arg(long)]
    construction: PathBuf,
    #[arg(long, value_enum, default_value = "sc")]
    decoder: Decoder,
    /// List size for scl / cascl.
    #[arg(long, default_value_t = 8)]
    list: usize,
    /// CRC degree for cascl.
    #[arg(long, default_value_t = 16)]
    crc_degree: usize,
    /// CRC polynomial (hex, leading x^degree term implicit).
    #[arg(long, default_value = "1021")]
    crc_poly: String,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long)]
    ebn0: String,
    #[arg(long, default_value_t = rcpp::sim::DEFAULT_MAX_TRIALS)]
    trials: u64,
    /// Early-stop block error threshold.
    #[arg(long, default_value_t = rcpp::sim::DEFAULT_MAX_ERRORS)]
    errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct EquivArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: usize,
    /// Also enumerate the class members (N <= 32 only).
    #[arg(long, default_value_t = false)]
    enumerate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct ReplayArgs {
    /// Manifest written by a previous run.
    #[arg(long)]
    manifest: PathBuf,
    /// Optional output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: u32,
    tool_version: String,
    command: Cmd,
    outputs: Vec<String>,
}

fn main() -> ExitCode {
    let argv = match expand_params_files(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Replaces every `--params FILE` pair with the flags read from FILE
/// (`key=value` per line, `#` comments).
fn expand_params_files(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--params" {
            let path = it
                .next()
                .ok_or_else(|| "--params requires a file".to_string())?;
            let text = fs::read_to_string(&path)
                .map_err(|e| format!("cannot read params file {path}: {e}"))?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| format!("bad params line {line:?}"))?;
                out.push(format!("--{}", key.trim().replace('_', "-")));
                let value = value.trim();
                if !value.is_empty() {
                    out.push(value.to_string());
                }
            }
        } else {
            out.push(a);
        }
    }
    Ok(out)
}

fn run(cmd: Cmd) -> anyhow::Result<()> {
    match cmd {
        Cmd::Spectra(a) => cmd_spectra(&a),
        Cmd::Construct(a) => cmd_construct(&a),
        Cmd::Simulate(a) => cmd_simulate(&a),
        Cmd::Equiv(a) => cmd_equiv(&a),
        Cmd::Replay(a) => cmd_replay(&a),
    }
}

fn out_dir(arg: &Option<PathBuf>) -> anyhow::Result<PathBuf> {
    let dir = arg
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_manifest(dir: &Path, stem: &str, command: Cmd, outputs: &[PathBuf]) -> anyhow::Result<()> {
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        outputs: outputs
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect(),
    };
    let path = dir.join(format!("{stem}.manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn surviving_set(d: &SourcePunctureSet, n: usize) -> Vec<usize> {
    (1..=(1usize << n)).filter(|&i| !d.contains(i)).collect()
}

fn cmd_spectra(args: &SpectraArgs) -> anyhow::Result<()> {
    let n = levels_of(args.n)?;
    let ms: Vec<usize> = match (&args.m, &args.m_range) {
        (Some(m), None) => vec![*m],
        (None, Some(range)) => {
            let (lo, hi) = parse_range(range)?;
            (lo..=hi).filter(|&m| 2 * m > args.n && m <= args.n).collect()
        }
        _ => anyhow::bail!("exactly one of --m and --m-range is required"),
    };
    let dir = out_dir(&args.out)?;
    let stem = format!("spectra_{}_{}", args.scheme.name(), args.n);
    let spectra_path = dir.join(format!("{stem}.csv"));
    let dist_path = dir.join(format!("distances_{}_{}.csv", args.scheme.name(), args.n));

    let mut spectra_csv = String::from("m,kind");
    for w in 0..=n {
        write!(spectra_csv, ",w{w}")?;
    }
    spectra_csv.push('\n');
    let mut dist_csv = String::from("m,sd1,sd0,jsd\n");

    for &m in &ms {
        let q = args.n - m;
        let mut table = args.scheme.table(args.n, q)?;
        if let Some(mode) = args.mode {
            table = PuncturingTable::from_bits(table.bits().to_vec(), mode.into())?;
        }
        let d = derive_source_puncture_set(&table)?;
        let surviving = surviving_set(&d, n);
        for kind in [SpectrumKind::Ps1, SpectrumKind::Ps0] {
            let s = PolarSpectrum::from_forest(&surviving, n, kind)?;
            write!(
                spectra_csv,
                "{m},{}",
                if kind == SpectrumKind::Ps1 { "ps1" } else { "ps0" }
            )?;
            for c in s.counts() {
                write!(spectra_csv, ",{c}")?;
            }
            spectra_csv.push('\n');
        }
        let dist = SpectrumDistances::from_forest(&surviving, n)?;
        writeln!(dist_csv, "{m},{},{},{}", dist.sd1, dist.sd0, dist.jsd)?;
    }
    fs::write(&spectra_path, spectra_csv)?;
    fs::write(&dist_path, dist_csv)?;
    println!("wrote {}", spectra_path.display());
    println!("wrote {}", dist_path.display());
    write_manifest(
        &dir,
        &stem,
        Cmd::Spectra(args.clone()),
        &[spectra_path, dist_path],
    )
}

fn cmd_construct(args: &ConstructArgs) -> anyhow::Result<()> {
    levels_of(args.n)?;
    anyhow::ensure!(args.m <= args.n, "M = {} exceeds N = {}", args.m, args.n);
    if args.k > args.m {
        anyhow::bail!(rcpp::Error::Capacity(format!(
            "K = {} exceeds M = {}",
            args.k, args.m
        )));
    }
    let q = args.n - args.m;
    let mut table = args.scheme.table(args.n, q)?;
    if let Some(mode) = args.mode {
        table = PuncturingTable::from_bits(table.bits().to_vec(), mode.into())?;
    }
    let rate = args.k as f64 / args.m as f64;
    let metric: ReliabilityVector = match args.method {
        Method::Bound => propagate_bounds(&table, a0_from_ebn0(args.design, rate))?,
        Method::Bec => ReliabilityVector::from_values(table.mode(), bec_exact(&table, args.design)?)?,
        Method::Ga => {
            let sigma = ChannelParams::new(args.design, rate)?.sigma;
            construct_ga(&table, sigma)?
        }
    };
    let d = derive_source_puncture_set(&table)?;
    let info = select_info_set(&metric, args.k, &d)?;
    let cfg = CodeConfig::new(table, &info)?;

    let dir = out_dir(&args.out)?;
    let stem = format!(
        "construct_{}_{}_{}_{}_{}",
        args.scheme.name(),
        args.n,
        args.m,
        args.k,
        args.method.name()
    );
    let path = dir.join(format!("{stem}.code"));
    let mut text = String::from("rcpp-construction v1\n");
    writeln!(
        text,
        "n={} m={} k={} scheme={} mode={} method={} design={}",
        args.n,
        args.m,
        args.k,
        args.scheme.name(),
        cfg.table().mode(),
        args.method.name(),
        args.design
    )?;
    let table_bits: String = cfg.table().bits().iter().map(|&b| char::from(b'0' + b)).collect();
    writeln!(text, "table={table_bits}")?;
    writeln!(text, "partition={}", info.partition_string())?;
    fs::write(&path, text)?;
    println!("wrote {}", path.display());
    write_manifest(&dir, &stem, Cmd::Construct(args.clone()), &[path])
}

/// Parsed construction file contents.
struct Construction {
    scheme: String,
    cfg: CodeConfig,
}

fn load_construction(path: &Path) -> anyhow::Result<Construction> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    anyhow::ensure!(
        lines.next() == Some("rcpp-construction v1"),
        "unrecognized construction file {}",
        path.display()
    );
    let mut fields = std::collections::HashMap::new();
    for line in lines {
        for pair in line.split_whitespace() {
            if let Some((k, v)) = pair.split_once('=') {
                fields.insert(k.to_string(), v.to_string());
            }
        }
    }
    let get = |k: &str| -> anyhow::Result<&String> {
        fields
            .get(k)
            .ok_or_else(|| anyhow::anyhow!("construction file missing {k}"))
    };
    let mode: Mode = get("mode")?.parse()?;
    let bits: Vec<u8> = get("table")?
        .chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => Err(anyhow::anyhow!("bad table character {other:?}")),
        })
        .collect::<anyhow::Result<_>>()?;
    let table = PuncturingTable::from_bits(bits, mode)?;
    let partition = get("partition")?;
    anyhow::ensure!(
        partition.len() == table.parent_len(),
        "partition length {} does not match N = {}",
        partition.len(),
        table.parent_len()
    );
    let info: Vec<usize> = partition
        .chars()
        .enumerate()
        .filter_map(|(i, c)| (c == 'A').then_some(i + 1))
        .collect();
    let d = derive_source_puncture_set(&table)?;
    let info_set = InfoSet::new(table.parent_len(), info, &d)?;
    Ok(Construction {
        scheme: get("scheme")?.clone(),
        cfg: CodeConfig::new(table, &info_set)?,
    })
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let construction = load_construction(&args.construction)?;
    let cfg = &construction.cfg;
    let decoder = match args.decoder {
        Decoder::Sc => DecoderChoice::Sc,
        Decoder::Scl => DecoderChoice::Scl { list: args.list },
        Decoder::Cascl => DecoderChoice::CaScl {
            list: args.list,
            crc: Crc::new(args.crc_degree, u64::from_str_radix(&args.crc_poly, 16)?)?,
        },
    };
    let ebn0: Vec<f64> = args
        .ebn0
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    anyhow::ensure!(!ebn0.is_empty(), "at least one Eb/N0 point is required");
    let records = run_bler(cfg, decoder, &ebn0, args.trials, args.errors, args.seed)?;

    let dir = out_dir(&args.out)?;
    let stem = format!(
        "bler_{}_{}_{}_{}_s{}",
        construction.scheme,
        cfg.parent_len(),
        cfg.transmitted_len(),
        cfg.info_len(),
        args.seed
    );
    let path = dir.join(format!("{stem}.csv"));
    let mut csv = String::from("scheme,mode,N,M,K,ebn0_db,trials,errors,bler,ci95,seed\n");
    for r in &records {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            construction.scheme,
            cfg.table().mode(),
            cfg.parent_len(),
            cfg.transmitted_len(),
            cfg.info_len(),
            r.ebn0_db,
            r.trials,
            r.errors,
            r.bler,
            r.ci95,
            r.seed
        )?;
    }
    fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    write_manifest(&dir, &stem, Cmd::Simulate(args.clone()), &[path])
}

fn cmd_equiv(args: &EquivArgs) -> anyhow::Result<()> {
    levels_of(args.n)?;
    let count = count_equivalent_tables(args.n, args.q)?;
    let dir = out_dir(&args.out)?;
    let stem = format!("equiv_{}_{}", args.n, args.q);
    let path = dir.join(format!("{stem}.csv"));
    let mut csv = String::from("n,q,exponent,count\n");
    writeln!(
        csv,
        "{},{},{},{}",
        args.n,
        args.q,
        count.exponent,
        count
            .exact()
            .map_or(String::new(), |c| c.to_string())
    )?;
    fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    let mut outputs = vec![path];

    if args.enumerate {
        let reference = SourcePunctureSet::new((1..=args.q).collect(), Mode::C0);
        let sets = enumerate_equivalent_tables(args.n, args.q, &reference)?;
        let path = dir.join(format!("{stem}.members.csv"));
        let mut csv = String::from("positions\n");
        for set in &sets {
            let row: Vec<String> = set.iter().map(|p| p.to_string()).collect();
            writeln!(csv, "{}", row.join(" "))?;
        }
        fs::write(&path, csv)?;
        println!("wrote {} ({} members)", path.display(), sets.len());
        outputs.push(path);
    }
    write_manifest(&dir, &stem, Cmd::Equiv(args.clone()), &outputs)
}

fn cmd_replay(args: &ReplayArgs) -> anyhow::Result<()> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&args.manifest)?)?;
    anyhow::ensure!(
        manifest.version == MANIFEST_VERSION,
        "unsupported manifest version {}",
        manifest.version
    );
    let mut command = manifest.command;
    if let Some(dir) = &args.out {
        let target = Some(dir.clone());
        match &mut command {
            Cmd::Spectra(a) => a.out = target,
            Cmd::Construct(a) => a.out = target,
            Cmd::Simulate(a) => a.out = target,
            Cmd::Equiv(a) => a.out = target,
            Cmd::Replay(_) => anyhow::bail!("manifest records a replay command"),
        }
    }
    match command {
        Cmd::Replay(_) => anyhow::bail!("manifest records a replay command"),
        other => run(other),
    }
}

fn levels_of(n: usize) -> anyhow::Result<usize> {
    anyhow::ensure!(
        n > 0 && n.is_power_of_two(),
        "N = {n} is not a power of two"
    );
    Ok(n.trailing_zeros() as usize)
}

fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| anyhow::anyhow!("range must look like lo..hi, got {s:?}"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}
