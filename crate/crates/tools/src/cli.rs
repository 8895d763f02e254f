//! Command-line front end. Every subcommand parses flags, calls into
//! `qldpc_core` or the simulator, and serializes the result.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qldpc_core::{
    builtin, toric_code, BitVector, CssCode, Decoder, GeneralOptions, GrowthStrategy, PeelFallback,
    Side, UfOptions,
};
use serde::Serialize;

use crate::pcm::{load_pcm, PcmFormat};
use crate::simulator::{bench_runtime, linspace, run_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qldpc",
    version,
    about = "Cluster-growth decoders for QLDPC codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode one syndrome and print the estimate as JSON.
    Decode(DecodeArgs),
    /// Sweep physical error rates and write a CSV of logical error rates.
    Simulate(SimulateArgs),
    /// Time both decoders on toric codes of several sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Built-in code: `steane` or `toric:L`.
    #[arg(long, conflicts_with_all = ["hx", "hz"], required_unless_present_all = ["hx", "hz"])]
    pub code: Option<String>,
    /// X-check matrix file.
    #[arg(long, requires = "hz")]
    pub hx: Option<PathBuf>,
    /// Z-check matrix file.
    #[arg(long, requires = "hx")]
    pub hz: Option<PathBuf>,
    /// Matrix file format; `auto` picks alist for `.alist` files.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    pub format: FormatArg,
}

impl CodeArgs {
    pub fn load(&self) -> Result<CssCode> {
        if let Some(name) = &self.code {
            return builtin(name)?
                .into_code()
                .ok_or_else(|| anyhow!("'{name}' is a classical matrix, not a CSS code"));
        }
        let (hx, hz) = match (&self.hx, &self.hz) {
            (Some(hx), Some(hz)) => (hx, hz),
            _ => bail!("either --code or both --hx and --hz are required"),
        };
        let read = |p: &Path| {
            let format = match self.format {
                FormatArg::Auto => PcmFormat::from_path(p),
                FormatArg::Dense => PcmFormat::Dense,
                FormatArg::Alist => PcmFormat::Alist,
            };
            load_pcm(p, format).with_context(|| format!("loading {}", p.display()))
        };
        Ok(CssCode::new(read(hx)?, read(hz)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    Dense,
    Alist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    General,
    Ufh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GrowthArg {
    Ag,
    Ssg,
    Srg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    /// Keep growing when peeling fails.
    Grow,
    /// Solve the cluster by elimination when peeling fails.
    Gauss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    X,
    Z,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::X => Side::X,
            SideArg::Z => Side::Z,
        }
    }
}

#[derive(Debug, Args)]
pub struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = DecoderArg::Ufh)]
    pub decoder: DecoderArg,
    /// Growth rule. The general decoder only accepts `ag`.
    #[arg(long, value_enum)]
    pub growth: Option<GrowthArg>,
    /// What the union-find decoder does when peeling fails.
    #[arg(long, value_enum, default_value_t = FallbackArg::Grow)]
    pub fallback: FallbackArg,
    #[arg(long, value_enum, default_value_t = SideArg::X)]
    pub side: SideArg,
}

fn uf_options(growth: Option<GrowthArg>, fallback: FallbackArg) -> UfOptions {
    UfOptions {
        strategy: match growth {
            Some(GrowthArg::Ag) => GrowthStrategy::All,
            Some(GrowthArg::Srg) => GrowthStrategy::RandomSingle,
            Some(GrowthArg::Ssg) | None => GrowthStrategy::SmallestSingle,
        },
        fallback: match fallback {
            FallbackArg::Grow => PeelFallback::KeepGrowing,
            FallbackArg::Gauss => PeelFallback::GaussianElimination,
        },
    }
}

impl DecoderArgs {
    pub fn build(&self) -> Result<Decoder> {
        match self.decoder {
            DecoderArg::General => {
                let grow_valid = match self.growth {
                    None => false,
                    Some(GrowthArg::Ag) => true,
                    Some(other) => bail!(
                        "--growth {} is a union-find strategy; the general decoder accepts only ag",
                        other
                            .to_possible_value()
                            .map(|v| v.get_name().to_string())
                            .unwrap_or_default()
                    ),
                };
                Ok(Decoder::General(GeneralOptions { grow_valid }))
            }
            DecoderArg::Ufh => Ok(Decoder::UnionFind(uf_options(self.growth, self.fallback))),
        }
    }
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Syndrome as a bit string, or a file holding one.
    #[arg(long)]
    pub syndrome: String,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub per_start: f64,
    #[arg(long)]
    pub per_end: f64,
    #[arg(long)]
    pub per_points: usize,
    #[arg(long)]
    pub samples: usize,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "QECC_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Code family; only `toric` is supported.
    #[arg(long, default_value = "toric")]
    pub code: String,
    /// Lattice sizes L.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub per: f64,
    #[arg(long)]
    pub samples: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "general,ufh")]
    pub decoders: Vec<DecoderArg>,
    /// Growth rule for the union-find decoder.
    #[arg(long, value_enum, default_value_t = GrowthArg::Ssg)]
    pub growth: GrowthArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct DecodeReport {
    estimate: String,
    converged: bool,
    growth_steps: usize,
    decode_ns: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

fn is_bit_string(s: &str) -> bool {
    let mut any = false;
    for c in s.chars() {
        match c {
            '0' | '1' => any = true,
            c if c.is_whitespace() => {}
            _ => return false,
        }
    }
    any
}

/// A literal bit string is used as is; anything else names a file.
pub fn read_syndrome(arg: &str) -> Result<BitVector> {
    let text = if is_bit_string(arg) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading syndrome file {arg}"))?
    };
    text.parse::<BitVector>()
        .map_err(|e| anyhow!("invalid syndrome: {e}"))
}

pub fn cmd_decode(args: &DecodeArgs) -> Result<String> {
    let code = args.code.load()?;
    let decoder = args.decoder.build()?;
    let side = Side::from(args.decoder.side);
    let syndrome = read_syndrome(&args.syndrome)?;
    let expected = code.syndrome_matrix(side).rows();
    if syndrome.len() != expected {
        bail!(
            "syndrome has {} bits but the code has {expected} checks on this side",
            syndrome.len()
        );
    }
    let out = decoder.decode(&code, side, &syndrome, args.seed)?;
    let report = DecodeReport {
        estimate: out.estimate.to_string(),
        converged: out.converged,
        growth_steps: out.growth_steps,
        decode_ns: u64::try_from(out.elapsed.as_nanos()).unwrap_or(u64::MAX),
        diagnostic: out.diagnostic,
    };
    Ok(serde_json::to_string(&report)?)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file_mut());
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    tmp.as_file_mut().flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn check_range(start: f64, end: f64, points: usize) -> Result<()> {
    for (flag, p) in [("--per-start", start), ("--per-end", end)] {
        if !(0.0..=1.0).contains(&p) {
            bail!("{flag} {p} is outside [0, 1]");
        }
    }
    if points == 0 {
        bail!("--per-points must be at least 1");
    }
    if start > end {
        bail!("--per-start must not exceed --per-end");
    }
    if points == 1 && start != end {
        bail!("--per-points 1 needs --per-start equal to --per-end");
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    check_range(args.per_start, args.per_end, args.per_points)?;
    if args.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let cfg = SweepConfig {
        code: args.code.load()?,
        side: Side::from(args.decoder.side),
        decoder: args.decoder.build()?,
        per_values: linspace(args.per_start, args.per_end, args.per_points),
        samples_per_point: args.samples,
        master_seed: args.seed,
        threads: args.threads,
    };
    let result = run_sweep(&cfg)?;
    write_csv(&args.out, &result.points)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    if !args.code.eq_ignore_ascii_case("toric") {
        bail!("bench supports only --code toric, got '{}'", args.code);
    }
    let codes = args
        .sizes
        .iter()
        .map(|&l| toric_code(l))
        .collect::<Result<Vec<_>, _>>()?;
    let decoders: Vec<Decoder> = args
        .decoders
        .iter()
        .map(|d| match d {
            DecoderArg::General => Decoder::General(GeneralOptions::default()),
            DecoderArg::Ufh => Decoder::UnionFind(uf_options(Some(args.growth), FallbackArg::Grow)),
        })
        .collect();
    let rows = bench_runtime(&codes, &decoders, args.per, args.samples, args.seed)?;
    write_csv(&args.out, &rows)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Decode(a) => {
            println!("{}", cmd_decode(a)?);
            Ok(())
        }
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("qldpc").chain(args.iter().copied()))
    }

    #[test]
    fn code_flags_conflict() {
        assert!(parse(&[
            "decode",
            "--code",
            "steane",
            "--hx",
            "a",
            "--hz",
            "b",
            "--syndrome",
            "0"
        ])
        .is_err());
        assert!(parse(&["decode", "--hx", "a", "--syndrome", "0"]).is_err());
        assert!(parse(&["decode", "--syndrome", "0"]).is_err());
        assert!(parse(&["decode", "--hx", "a", "--hz", "b", "--syndrome", "0"]).is_ok());
    }

    #[test]
    fn general_rejects_single_growth() {
        let cli = parse(&[
            "decode",
            "--code",
            "steane",
            "--syndrome",
            "010",
            "--decoder",
            "general",
            "--growth",
            "ssg",
        ])
        .unwrap();
        let Command::Decode(a) = cli.command else {
            unreachable!()
        };
        assert!(a.decoder.build().is_err());
    }

    #[test]
    fn steane_decode_json() {
        let cli = parse(&[
            "decode",
            "--code",
            "steane",
            "--syndrome",
            "010",
            "--decoder",
            "general",
        ])
        .unwrap();
        let Command::Decode(a) = cli.command else {
            unreachable!()
        };
        let v: serde_json::Value = serde_json::from_str(&cmd_decode(&a).unwrap()).unwrap();
        assert_eq!(v["estimate"], "0100000");
        assert_eq!(v["converged"], true);
        assert!(v["decode_ns"].is_u64());
    }

    #[test]
    fn syndrome_literal_or_file() {
        assert_eq!(read_syndrome("0101").unwrap().support(), vec![1, 3]);
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("s.txt");
        fs::write(&f, "110\n").unwrap();
        assert_eq!(
            read_syndrome(f.to_str().unwrap()).unwrap().support(),
            vec![0, 1]
        );
        assert!(read_syndrome("/no/such/file").is_err());
    }

    #[test]
    fn ranges() {
        assert!(check_range(0.0, 0.0, 1).is_ok());
        assert!(check_range(0.01, 0.05, 5).is_ok());
        assert!(check_range(0.01, 0.05, 1).is_err());
        assert!(check_range(0.05, 0.01, 3).is_err());
        assert!(check_range(0.0, 1.5, 3).is_err());
        assert!(check_range(0.0, 0.1, 0).is_err());
    }
}
