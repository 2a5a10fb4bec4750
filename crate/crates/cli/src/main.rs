//! `normid`: verify, reduce, generate and stress-test squared-norm identities.
//!
//! Exit codes: 0 success (valid / counterexample found), 1 identity invalid,
//! 2 usage or input error, 3 counterexample search exhausted.

mod report;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use normid_core::algebra::{expand_to_pairs, singleton_sums, verify};
use normid_core::dsl::{self, Format, SourceText};
use normid_core::eval::{self, NormSpec};
use normid_core::{families, signed_to_plain, Rational, SignedIdentity};
use serde_json::{json, Value};

use report::RunReport;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "normid", version, about = "Exact verifier for squared-norm identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an identity holds in every inner-product space.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Also report every reduced coefficient and singleton sum.
        #[arg(long)]
        full_table: bool,
    },
    /// Print the pair/singleton reduced form and the singleton sums.
    Reduce {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Emit a named identity family.
    Gen(GenArgs),
    /// Search for vectors violating a valid identity under another norm.
    Refute {
        #[command(flatten)]
        input: InputArgs,
        /// lp:P with 1 <= P <= 64, or linf.
        #[arg(long)]
        norm: String,
        #[arg(long, default_value_t = eval::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Probe whether t -> ||x + t y||^2 is quadratic on a fixed grid.
    Fdprobe {
        #[arg(long)]
        norm: String,
        /// Comma-separated components, e.g. 1,0
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Identity file; reads standard input when absent or `-`.
    input: Option<PathBuf>,
    /// Emit a JSON report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: FamilyArg,
    #[arg(long, global = true)]
    json: bool,
    /// Also verify the generated identity (exit 1 if invalid).
    #[arg(long, global = true)]
    verify: bool,
    #[arg(long, global = true, value_enum, default_value_t = TextFormat::Dsl)]
    format: TextFormat,
}

#[derive(Subcommand)]
enum FamilyArg {
    /// The three-vector alternating identity.
    Frechet,
    /// ||x1+x2||^2 + ||x1-x2||^2 - 2||x1||^2 - 2||x2||^2.
    Parallelogram,
    /// C(n-2,k-2)||x_1..n||^2 - sum_{|A|=k} ||x_A||^2 + C(n-2,k-1) sum_i ||x_i||^2.
    #[command(name = "lemma31", alias = "binomial")]
    Binomial { n: usize, k: usize },
    /// sum over I of (-1)^|I| ||x_I||^2, n >= 3.
    #[command(name = "lemma32", alias = "alternating")]
    Alternating { n: usize },
    /// Sign sums with coefficients (-1)^k 2^(n-k).
    #[command(name = "ppd", alias = "parallelepiped")]
    Parallelepiped { n: usize },
    /// Full product-weight sign-sum family for scalars a1..an.
    #[command(name = "cor35", alias = "product")]
    Product {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        scalars: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Dsl,
    Latex,
    Json,
}

impl From<TextFormat> for Format {
    fn from(f: TextFormat) -> Format {
        match f {
            TextFormat::Dsl => Format::Dsl,
            TextFormat::Latex => Format::Latex,
            TextFormat::Json => Format::Json,
        }
    }
}

/// An error that should end the run with exit code 2.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

fn read_input(args: &InputArgs) -> Result<SourceText> {
    match &args.input {
        Some(path) if path.as_os_str() != "-" => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            Ok(SourceText::new(path.display().to_string(), text))
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .context("cannot read standard input")?;
            Ok(SourceText::new("<stdin>", text))
        }
    }
}

fn load(args: &InputArgs) -> Result<(SourceText, SignedIdentity)> {
    let src = read_input(args)?;
    let sid = src
        .parse()
        .map_err(|e| anyhow!("{}:{}:{}: parse error: {}", src.name, e.line, e.column, e.message))?;
    Ok((src, sid))
}

fn input_json(src: &SourceText, sid: &SignedIdentity) -> Value {
    json!({ "source": src.name, "identity": dsl::to_json(sid) })
}

fn emit(report: Value) {
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn cmd_verify(input: &InputArgs, full_table: bool, start: Instant) -> Result<u8, Usage> {
    let (src, sid) = load(input)?;
    let verdict = verify(&signed_to_plain(&sid));
    let code = if verdict.is_valid() { EXIT_OK } else { EXIT_INVALID };
    if input.json {
        let mut out = RunReport::new("verify", input_json(&src, &sid));
        out.set("verdict", json!(report::verdict_word(&verdict)));
        if let Some(r) = &verdict.refutation {
            out.set("certificate", report::certificate_json(&r.certificate));
            out.set("witness", report::witness_json(&r.witness));
        }
        if full_table {
            out.set("table", report::table_json(&verdict.reduced, &verdict.singleton_sums));
        }
        emit(out.finish(elapsed_ms(start)));
        return Ok(code);
    }
    match &verdict.refutation {
        None => println!("Valid"),
        Some(r) => {
            println!("Invalid");
            println!("certificate: {}", report::describe_certificate(&r.certificate));
            println!("witness: {}", report::describe_vectors(r.witness.assignment.vectors()));
            println!("residual: {}", r.witness.residual);
        }
    }
    if full_table {
        print!("{}", report::describe_table(&verdict.reduced, &verdict.singleton_sums));
    }
    Ok(code)
}

fn cmd_reduce(input: &InputArgs, start: Instant) -> Result<u8, Usage> {
    let (src, sid) = load(input)?;
    let plain = signed_to_plain(&sid);
    let reduced = expand_to_pairs(&plain);
    let sums = singleton_sums(&plain);
    if input.json {
        let mut out = RunReport::new("reduce", input_json(&src, &sid));
        out.set("result", report::table_json(&reduced, &sums));
        emit(out.finish(elapsed_ms(start)));
    } else {
        print!("{}", report::describe_table(&reduced, &sums));
    }
    Ok(EXIT_OK)
}

fn generate(family: &FamilyArg) -> Result<(&'static str, Vec<String>, SignedIdentity)> {
    Ok(match family {
        FamilyArg::Frechet => ("frechet", vec![], SignedIdentity::from_plain(&families::frechet())),
        FamilyArg::Parallelogram => ("parallelogram", vec![], families::parallelogram()),
        FamilyArg::Binomial { n, k } => (
            "lemma31",
            vec![n.to_string(), k.to_string()],
            SignedIdentity::from_plain(&families::binomial_family(*n, *k)?),
        ),
        FamilyArg::Alternating { n } => (
            "lemma32",
            vec![n.to_string()],
            SignedIdentity::from_plain(&families::alternating(*n)?),
        ),
        FamilyArg::Parallelepiped { n } => ("ppd", vec![n.to_string()], families::parallelepiped(*n)?),
        FamilyArg::Product { scalars } => {
            let values = scalars
                .iter()
                .map(|s| s.parse::<Rational>())
                .collect::<Result<Vec<_>, _>>()?;
            ("cor35", scalars.clone(), families::product_sign_sum(&values)?)
        }
    })
}

/// Hyphen-tolerant scalars also swallow trailing flags (`cor35 -1/2 1 --verify`),
/// so peel known gen flags back off the list.
fn take_trailing_flags(args: &mut GenArgs) -> Result<()> {
    let FamilyArg::Product { scalars } = &mut args.family else {
        return Ok(());
    };
    let mut kept = Vec::with_capacity(scalars.len());
    let mut rest = std::mem::take(scalars).into_iter();
    while let Some(item) = rest.next() {
        match item.as_str() {
            "--json" => args.json = true,
            "--verify" => args.verify = true,
            "--format" => {
                let value = rest.next().ok_or_else(|| anyhow!("--format needs a value"))?;
                args.format = TextFormat::from_str(&value, false).map_err(|e| anyhow!(e))?;
            }
            other if other.starts_with("--format=") => {
                args.format = TextFormat::from_str(&other["--format=".len()..], false)
                    .map_err(|e| anyhow!(e))?;
            }
            _ => kept.push(item),
        }
    }
    if kept.is_empty() {
        bail!("cor35 needs at least one scalar");
    }
    *scalars = kept;
    Ok(())
}

fn cmd_gen(args: &mut GenArgs, start: Instant) -> Result<u8, Usage> {
    take_trailing_flags(args)?;
    let (name, params, sid) = generate(&args.family)?;
    let verdict = args.verify.then(|| verify(&signed_to_plain(&sid)));
    let code = match &verdict {
        Some(v) if !v.is_valid() => EXIT_INVALID,
        _ => EXIT_OK,
    };
    if args.json {
        let mut out = RunReport::new("gen", json!({ "family": name, "params": params }));
        out.set(
            "result",
            json!({ "dsl": dsl::serialize(&sid, Format::Dsl), "identity": dsl::to_json(&sid) }),
        );
        if let Some(v) = &verdict {
            out.set("verdict", json!(report::verdict_word(v)));
            if let Some(r) = &v.refutation {
                out.set("certificate", report::certificate_json(&r.certificate));
                out.set("witness", report::witness_json(&r.witness));
            }
        }
        emit(out.finish(elapsed_ms(start)));
        return Ok(code);
    }
    println!("{}", dsl::serialize(&sid, args.format.into()));
    if let Some(v) = &verdict {
        match v.certificate() {
            None => println!("Valid"),
            Some(c) => println!("Invalid: {}", report::describe_certificate(c)),
        }
    }
    Ok(code)
}

fn cmd_refute(input: &InputArgs, norm: &str, budget: u64, seed: u64, start: Instant) -> Result<u8, Usage> {
    let norm: NormSpec = norm.parse()?;
    let (src, sid) = load(input)?;
    let verdict = verify(&signed_to_plain(&sid));
    if let Some(c) = verdict.certificate() {
        return Err(Usage(anyhow!(
            "the identity already fails in inner-product spaces ({}); use `verify` for a witness",
            report::describe_certificate(c)
        )));
    }
    let hit = eval::find_counterexample(&sid, &norm, budget, seed)?;
    let code = if hit.is_some() { EXIT_OK } else { EXIT_EXHAUSTED };
    if input.json {
        let mut in_json = input_json(&src, &sid);
        in_json["norm"] = json!(norm.to_string());
        in_json["budget"] = json!(budget);
        let mut out = RunReport::new("refute", in_json);
        out.set(
            "result",
            match &hit {
                Some(h) => report::counterexample_json(h),
                None => json!({ "found": false, "trials": budget }),
            },
        );
        out.set("seed", json!(seed));
        emit(out.finish(elapsed_ms(start)));
        return Ok(code);
    }
    match &hit {
        Some(h) => {
            let origin = if h.from_grid { "fixed grid" } else { "random search" };
            println!("violation found at trial {} ({origin}, seed {seed})", h.trial);
            println!("vectors: {}", report::describe_vectors(h.assignment.vectors()));
            println!("residual: {} (magnitude scale {})", h.residual.value, h.residual.scale);
        }
        None => {
            println!("no violation found in {budget} trials (seed {seed}) under {norm}");
            println!("this does not show that the identity holds for this norm");
        }
    }
    Ok(code)
}

fn parse_vector(flag: &str, text: &str) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|c| c.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| anyhow!("--{flag}: expected comma-separated numbers, got `{text}`"))?;
    if v.is_empty() {
        bail!("--{flag}: empty vector");
    }
    Ok(v)
}

fn cmd_fdprobe(norm: &str, x: &str, y: &str, json_out: bool, start: Instant) -> Result<u8, Usage> {
    let norm: NormSpec = norm.parse()?;
    let xv = parse_vector("x", x)?;
    let yv = parse_vector("y", y)?;
    let grid = eval::default_probe_grid();
    let probe = eval::degree_probe(&xv, &yv, &norm, &grid)?;
    if json_out {
        let mut out = RunReport::new(
            "fdprobe",
            json!({ "norm": norm.to_string(), "x": xv, "y": yv, "grid": grid }),
        );
        out.set("result", report::probe_json(&probe));
        emit(out.finish(elapsed_ms(start)));
    } else {
        println!("max |third difference|: {}", probe.max_abs_third_difference);
        println!("worst grid point (r, s): {:?}", probe.worst_point);
        println!(
            "quadratic on grid: {}",
            if probe.is_quadratic_on_grid { "yes" } else { "no" }
        );
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut cli = Cli::parse();
    let start = Instant::now();
    let outcome = match &mut cli.command {
        Command::Verify { input, full_table } => cmd_verify(input, *full_table, start),
        Command::Reduce { input } => cmd_reduce(input, start),
        Command::Gen(args) => cmd_gen(args, start),
        Command::Refute {
            input,
            norm,
            budget,
            seed,
        } => cmd_refute(input, norm, *budget, *seed, start),
        Command::Fdprobe { norm, x, y, json } => cmd_fdprobe(norm, x, y, *json, start),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
