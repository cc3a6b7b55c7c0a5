//! `frame-lab` command-line front end.
//!
//! Every invocation prints exactly one JSON envelope
//! (`command`, `version`, `inputs`, `results`) or, for `search --format csv`,
//! a CSV table. Exit codes: 0 success, 1 verification failure, 2 invalid
//! input, 3 resource guard.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frame_lab::verify::run_verification;
use frame_lab::{
    build_generator, build_systematic, rank_patterns, simulate, spectrum_report, DedupMode, Error,
    FrameKind, FrameSpec, NoiseModel, PatternMask, SearchResult,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "FRAME_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "frame-lab", version, about = "Systematic DFT frame laboratory")]
pub struct Cli {
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the generator matrix, and the systematic frame for a pattern.
    Build(BuildArgs),
    /// Eigen-structure of the subframe selected by a pattern.
    Spectrum(SpectrumArgs),
    /// Rank every codeword pattern class of a code.
    Search(SearchArgs),
    /// Monte-Carlo run of quantized encoding and reconstruction.
    Simulate(SimulateArgs),
    /// Check the structural and spectral claims for all codes up to a length.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Real,
    Complex,
}

impl From<KindArg> for FrameKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Real => FrameKind::Real,
            KindArg::Complex => FrameKind::Complex,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CodeArgs {
    /// Codeword length.
    #[arg(long)]
    pub n: usize,
    /// Message length.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "real")]
    pub kind: KindArg,
    /// Leading identity block size of Σ (complex codes only).
    #[arg(long)]
    pub alpha: Option<usize>,
}

impl CodeArgs {
    fn spec(&self) -> Result<FrameSpec, Error> {
        FrameSpec::with_alpha(self.n, self.k, self.kind.into(), self.alpha)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Data positions, `x` for data and `-` for parity (e.g. "x-x-x-").
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub pattern: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Rotation,
    RotationAndReflection,
}

impl From<ModeArg> for DedupMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rotation => DedupMode::Rotation,
            ModeArg::RotationAndReflection => DedupMode::RotationAndReflection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value = "rotation")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    /// Independent Gaussian noise of variance --sigma-q2.
    Iid,
    /// Midrise quantizer with --bits over [-range, range].
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub pattern: String,
    #[arg(long, value_enum, default_value = "iid")]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 1e-2)]
    pub sigma_q2: f64,
    #[arg(long, default_value_t = 8)]
    pub bits: u32,
    #[arg(long, default_value_t = 8.0)]
    pub range: f64,
    /// Source variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x2: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
}

#[derive(Debug, Serialize)]
struct Envelope<'a, I: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    inputs: &'a I,
    results: R,
}

/// What a run produced: the process exit code and the bytes for stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::TooLarge(_) => EXIT_GUARD,
        Error::NoConvergence { .. } | Error::Internal(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_INVALID_INPUT,
    }
}

fn envelope<I: Serialize, R: Serialize>(command: &str, inputs: &I, results: R) -> String {
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        inputs,
        results,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
    s.push('\n');
    s
}

fn parse_pattern(text: &str, spec: &FrameSpec) -> Result<PatternMask, Error> {
    let p: PatternMask = text.parse()?;
    p.check_against(spec)?;
    Ok(p)
}

#[derive(Serialize)]
struct BuildResults {
    alpha: usize,
    beta: usize,
    generator: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    systematic: Option<Vec<Vec<[f64; 2]>>>,
}

fn cmd_build(args: &BuildArgs) -> Result<String, Error> {
    let spec = args.code.spec()?;
    let pattern = args
        .pattern
        .as_deref()
        .map(|p| parse_pattern(p, &spec))
        .transpose()?;
    let g = build_generator(&spec)?;
    let systematic = pattern
        .as_ref()
        .map(|p| build_systematic(&g, p).map(|s| s.to_pairs()))
        .transpose()?;
    let results = BuildResults {
        alpha: spec.alpha(),
        beta: spec.beta(),
        generator: g.to_pairs(),
        systematic,
    };
    Ok(envelope("build", args, results))
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<String, Error> {
    let spec = args.code.spec()?;
    let pattern = parse_pattern(&args.pattern, &spec)?;
    let g = build_generator(&spec)?;
    Ok(envelope("spectrum", args, spectrum_report(&g, &pattern)?))
}

#[derive(Serialize)]
struct SearchRow<'a> {
    pattern: &'a PatternMask,
    class_size: usize,
    lambda_min: f64,
    lambda_max: f64,
    inv_sum: Option<f64>,
    product: f64,
    tight: bool,
    eigenvalues: &'a [f64],
}

#[derive(Serialize)]
struct SearchResults<'a> {
    dedup_mode: DedupMode,
    class_count: usize,
    best: &'a PatternMask,
    worst: &'a PatternMask,
    classes: Vec<SearchRow<'a>>,
}

fn search_csv(result: &SearchResult) -> String {
    let mut out = String::from("pattern,lambda_min,lambda_max,inv_sum,product,tight\n");
    for c in &result.classes {
        let r = &c.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.pattern, r.lambda_min, r.lambda_max, r.inv_sum, r.product, r.is_tight
        );
    }
    out
}

fn cmd_search(args: &SearchArgs) -> Result<String, Error> {
    let spec = args.code.spec()?;
    let result = rank_patterns(&spec, args.mode.into())?;
    if args.format == FormatArg::Csv {
        return Ok(search_csv(&result));
    }
    let classes = result
        .classes
        .iter()
        .map(|c| SearchRow {
            pattern: &c.pattern,
            class_size: c.class_size,
            lambda_min: c.report.lambda_min,
            lambda_max: c.report.lambda_max,
            inv_sum: c.report.inv_sum.is_finite().then_some(c.report.inv_sum),
            product: c.report.product,
            tight: c.report.is_tight,
            eigenvalues: c.report.eigenvalues.values(),
        })
        .collect();
    let results = SearchResults {
        dedup_mode: result.dedup_mode,
        class_count: result.classes.len(),
        best: &result.best,
        worst: &result.worst,
        classes,
    };
    Ok(envelope("search", args, results))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String, Error> {
    let spec = args.code.spec()?;
    let pattern = parse_pattern(&args.pattern, &spec)?;
    let noise = match args.noise {
        NoiseArg::Iid => NoiseModel::IidAdditive {
            sigma_q2: args.sigma_q2,
        },
        NoiseArg::Uniform => NoiseModel::UniformQuantizer {
            bits: args.bits,
            range: args.range,
        },
    };
    let report = simulate(
        &spec,
        &pattern,
        noise,
        args.sigma_x2,
        args.trials,
        args.seed,
    )?;
    Ok(envelope("simulate", args, report))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), Error> {
    let report = run_verification(args.n_max)?;
    let passed = report.all_passed;
    Ok((envelope("verify", args, report), passed))
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a).map(|s| (s, true)),
        Command::Spectrum(a) => cmd_spectrum(a).map(|s| (s, true)),
        Command::Search(a) => cmd_search(a).map(|s| (s, true)),
        Command::Simulate(a) => cmd_simulate(a).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a),
    };
    let mut outcome = match result {
        Ok((stdout, true)) => Outcome::ok(stdout),
        Ok((stdout, false)) => Outcome {
            code: EXIT_VERIFY_FAILED,
            stdout,
            stderr: "error: one or more claims failed\n".into(),
        },
        Err(e) => return Outcome::fail(exit_code(&e), format!("error: {e}\n")),
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &outcome.stdout) {
            outcome = Outcome::fail(
                EXIT_INVALID_INPUT,
                format!("error: cannot write {}: {e}\n", path.display()),
            );
        }
    }
    outcome
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, text)
            }
        }
    }
}

/// Sizes the global worker pool from `FRAME_LAB_THREADS`, if set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("frame-lab").chain(args.iter().copied()))
    }

    fn json(o: &Outcome) -> serde_json::Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn build_real_generator() {
        let o = run_args(&["build", "--n", "6", "--k", "3", "--kind", "real"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json(&o);
        assert_eq!(v["command"], "build");
        assert_eq!(v["inputs"]["n"], 6);
        let g = v["results"]["generator"].as_array().unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0].as_array().unwrap().len(), 3);
        assert!(g
            .iter()
            .flat_map(|r| r.as_array().unwrap())
            .all(|z| z[1].as_f64() == Some(0.0)));
        assert!(v["results"].get("systematic").is_none());
    }

    #[test]
    fn build_systematic_has_identity_rows() {
        let o = run_args(&["build", "--n", "6", "--k", "3", "--pattern", "x-x-x-"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json(&o);
        let sys = v["results"]["systematic"].as_array().unwrap();
        for (i, row) in [0usize, 2, 4].iter().enumerate() {
            for (c, z) in sys[*row].as_array().unwrap().iter().enumerate() {
                let re = z[0].as_f64().unwrap();
                let expect = if c == i { 1.0 } else { 0.0 };
                assert!((re - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn build_rejects_even_real_code() {
        let o = run_args(&["build", "--n", "4", "--k", "2", "--kind", "real"]);
        assert_eq!(o.code, EXIT_INVALID_INPUT);
        assert!(
            o.stderr.contains("n and k cannot be even simultaneously"),
            "{}",
            o.stderr
        );
        assert!(o.stdout.is_empty());
    }

    #[test]
    fn spectrum_reports_table_figures() {
        let o = run_args(&["spectrum", "--n", "7", "--k", "5", "--pattern", "xx-xx-x"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let r = &json(&o)["results"];
        assert!((r["lambda_min"].as_f64().unwrap() - 0.3110).abs() < 5e-5);
        assert!((r["lambda_max"].as_f64().unwrap() - 1.4).abs() < 5e-5);
        assert!((r["inv_sum"].as_f64().unwrap() - 7.40).abs() < 5e-3);
        assert!((r["product"].as_f64().unwrap() - 0.4173).abs() < 5e-5);

        let tight = run_args(&["spectrum", "--n", "6", "--k", "3", "--pattern", "X-X-X-"]);
        assert_eq!(json(&tight)["results"]["is_tight"], true);
    }

    #[test]
    fn spectrum_rejects_malformed_patterns() {
        for p in ["xx", "xx----", "x?x-x-"] {
            let o = run_args(&["spectrum", "--n", "6", "--k", "3", "--pattern", p]);
            assert_eq!(o.code, EXIT_INVALID_INPUT, "{p}");
        }
    }

    #[test]
    fn search_table_and_guard() {
        let o = run_args(&["search", "--n", "6", "--k", "3"]);
        let v = json(&o);
        assert_eq!(v["results"]["classes"].as_array().unwrap().len(), 4);
        assert_eq!(v["results"]["best"], "x-x-x-");
        assert_eq!(v["results"]["worst"], "xxx---");
        let o75 = run_args(&["search", "--n", "7", "--k", "5"]);
        assert_eq!(json(&o75)["results"]["class_count"], 3);
        let big = run_args(&["search", "--n", "30", "--k", "7"]);
        assert_eq!(big.code, EXIT_GUARD);
    }

    #[test]
    fn search_csv_columns() {
        let o = run_args(&["search", "--n", "6", "--k", "3", "--format", "csv"]);
        let mut lines = o.stdout.lines();
        assert_eq!(
            lines.next().unwrap(),
            "pattern,lambda_min,lambda_max,inv_sum,product,tight"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("x-x-x-,"));
        assert!(rows[0].ends_with(",true"));
    }

    #[test]
    fn simulate_guards() {
        let base = ["simulate", "--n", "6", "--k", "3", "--pattern", "x-x-x-"];
        let zero: Vec<&str> = base.iter().copied().chain(["--trials", "0"]).collect();
        assert_eq!(run_args(&zero).code, EXIT_INVALID_INPUT);
        let neg: Vec<&str> = base.iter().copied().chain(["--sigma-q2=-1"]).collect();
        assert_eq!(run_args(&neg).code, EXIT_INVALID_INPUT);
        let bits: Vec<&str> = base
            .iter()
            .copied()
            .chain(["--noise", "uniform", "--bits", "0"])
            .collect();
        assert_eq!(run_args(&bits).code, EXIT_INVALID_INPUT);
    }

    #[test]
    fn simulate_is_repeatable() {
        let args = [
            "simulate",
            "--n",
            "6",
            "--k",
            "3",
            "--pattern",
            "xx-x--",
            "--trials",
            "20000",
            "--seed",
            "7",
        ];
        let a = run_args(&args);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a, run_args(&args));
    }

    #[test]
    fn verify_guard_and_small_run() {
        assert_eq!(
            run_args(&["verify", "--n-max", "20"]).code,
            EXIT_INVALID_INPUT
        );
        let o = run_args(&["verify", "--n-max", "5"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        assert_eq!(json(&o)["results"]["all_passed"], true);
    }

    #[test]
    fn unknown_flags_are_invalid_input() {
        assert_eq!(run_args(&["build", "--n", "6"]).code, EXIT_INVALID_INPUT);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_INVALID_INPUT);
        assert_eq!(run_args(&["--version"]).code, EXIT_OK);
    }

    #[test]
    fn out_file_gets_stdout_bytes() {
        let dir = std::env::temp_dir().join(format!("frame-lab-out-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("build.json");
        let o = run_args(&[
            "build",
            "--n",
            "3",
            "--k",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.code, 0);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), o.stdout);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
