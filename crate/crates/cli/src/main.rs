#![allow(clippy::result_large_err)]

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qiline::approx::{approximate, slope_window, ApproxError, Family, Oracle};
use qiline::qi::{qi_constant_from_slopes, verify_qi_inequality, QiCheck, QiConstant};
use qiline::rational::{int, parse_rational, ratio};
use qiline::structured::{
    find_growth_witness, growth_formula, growth_row, psi_conjugate, GrowthRow, LiftCore,
    StructuredError, StructuredMap,
};
use qiline::text::{
    grid_csv, growth_csv, parse_map, parse_pairs, parse_table, serialize_map, TextError,
};
use qiline::thompson::{
    embed_to_qi, embedding_witness, relation_table, word_problem, ThompsonWord,
};
use qiline::{PlMap, Rational};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "qiline",
    version,
    about = "Exact PL maps, quasi-isometry approximation and Thompson's group F"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Algebra on PL maps read from text files.
    #[command(subcommand)]
    Map(MapCommand),
    /// Bounded-slope PL approximation of an integer oracle.
    Approximate(ApproximateArgs),
    /// Displacement table of an embedded word or lift.
    Growth(GrowthArgs),
    /// Checks x_i x_j x_i^-1 = x_{j+1} for all 0 <= i < j <= j_max.
    Relations {
        #[arg(long = "j-max")]
        j_max: u32,
    },
    /// Decides whether a word in Thompson's group F is the identity.
    WordProblem {
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand)]
enum MapCommand {
    /// Prints f ∘ g.
    Compose { f: PathBuf, g: PathBuf },
    /// Prints f⁻¹.
    Invert { f: PathBuf },
    /// Prints f(x) exactly.
    Eval { f: PathBuf, x: String },
    /// Reprints a map in canonical form.
    Normalize { f: PathBuf },
    /// Checks the quasi-isometry inequality on a two-column pair file.
    QiCheck {
        f: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        /// Constant to test; defaults to the one derived from the slopes.
        #[arg(long)]
        c: Option<String>,
    },
}

#[derive(Args)]
struct ApproximateArgs {
    /// identity, scale:A, sqrt-drift, noise:R, block-swap, pl:FILE or table:FILE.
    #[arg(long)]
    oracle: String,
    /// Quasi-isometry constant; defaults to the family's own.
    #[arg(long)]
    c: Option<u32>,
    #[arg(long, default_value_t = 10)]
    n: u32,
    /// Seed for the noise family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for map.txt and grid.csv; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long, conflicts_with_all = ["lift", "translation"])]
    word: Option<String>,
    /// File holding a PL map whose restriction to [0, 1] is the lift core.
    #[arg(long, conflicts_with = "translation")]
    lift: Option<PathBuf>,
    /// Lift of a rotation: x ↦ x + T.
    #[arg(long)]
    translation: Option<String>,
    #[arg(long, default_value_t = 20)]
    n: u32,
    #[arg(long, default_value_t = 20)]
    digits: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: TextError },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Contract(_) => 1,
            CliError::Parse {
                source: TextError::Invariant(_),
                ..
            } => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io(_) => 2,
        }
    }
}

impl From<ApproxError> for CliError {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::ConstantTooSmall { .. } | ApproxError::EmptyWindow => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Contract(other.to_string()),
        }
    }
}

impl From<StructuredError> for CliError {
    fn from(e: StructuredError) -> Self {
        CliError::Contract(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<PlMap, CliError> {
    parse_map(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn rational_arg(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Usage(format!("`{text}`: {e}")))
}

fn word_arg(text: &str) -> Result<ThompsonWord, CliError> {
    text.parse().map_err(|e| CliError::Usage(format!("{e}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_map(cmd: MapCommand) -> Result<(), CliError> {
    match cmd {
        MapCommand::Compose { f, g } => {
            let h = load_map(&f)?.compose(&load_map(&g)?);
            emit(None, &serialize_map(&h))
        }
        MapCommand::Invert { f } => emit(None, &serialize_map(&load_map(&f)?.invert())),
        MapCommand::Eval { f, x } => {
            let v = load_map(&f)?.evaluate(&rational_arg(&x)?);
            emit(None, &format!("{v}\n"))
        }
        MapCommand::Normalize { f } => emit(None, &serialize_map(&load_map(&f)?)),
        MapCommand::QiCheck { f, pairs, c } => {
            let map = load_map(&f)?;
            let pairs = parse_pairs(&read(&pairs)?).map_err(|source| CliError::Parse {
                path: "pairs".into(),
                source,
            })?;
            let c = match c {
                Some(c) => QiConstant::new(rational_arg(&c)?)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
                None => qi_constant_from_slopes(&map),
            };
            match verify_qi_inequality(|x| map.evaluate(x), &c, &pairs) {
                QiCheck::Holds => emit(None, &format!("holds with C = {}\n", c.value())),
                QiCheck::Violated { x, y } => Err(CliError::Contract(format!(
                    "inequality fails with C = {} at ({x}, {y})",
                    c.value()
                ))),
            }
        }
    }
}

fn parse_family(spec: &str, seed: u64) -> Result<Family, CliError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let need =
        |what: &str| CliError::Usage(format!("oracle `{name}` needs {what}, as in `{name}:…`"));
    Ok(match name {
        "identity" => Family::Pl(PlMap::identity()),
        "scale" => {
            let a = rational_arg(arg.ok_or_else(|| need("a slope"))?)?;
            Family::Pl(PlMap::affine(a, int(0)).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        "sqrt-drift" => Family::SqrtDrift,
        "noise" => {
            let r: u32 = arg
                .ok_or_else(|| need("an amplitude"))?
                .parse()
                .map_err(|_| CliError::Usage(format!("bad amplitude in `{spec}`")))?;
            if r == 0 {
                return Err(CliError::Usage("noise amplitude must be positive".into()));
            }
            Family::BoundedNoise { amplitude: r, seed }
        }
        "block-swap" => Family::BlockSwap,
        "pl" => Family::Pl(load_map(Path::new(arg.ok_or_else(|| need("a file"))?))?),
        "table" => {
            let path = arg.ok_or_else(|| need("a file"))?;
            let table = parse_table(&read(Path::new(path))?).map_err(|source| CliError::Parse {
                path: path.into(),
                source,
            })?;
            Family::Table(table)
        }
        other => return Err(CliError::Usage(format!("unknown oracle `{other}`"))),
    })
}

fn run_approximate(args: ApproximateArgs) -> Result<(), CliError> {
    let family = parse_family(&args.oracle, args.seed)?;
    if args.c.is_some_and(|c| c < 2) {
        return Err(CliError::Usage("--c must be at least 2".into()));
    }
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let oracle = match args.c {
        Some(c) => Oracle::with_constant(family, c)?,
        None => Oracle::new(family)?,
    };
    let a = approximate(&oracle, args.n)?;
    let c = a.grid.constant();
    let window = slope_window(c);
    if let Some(s) = a.map.slope_set().into_iter().find(|s| !window.contains(s)) {
        return Err(CliError::Contract(format!("slope {s} outside {window}")));
    }
    let map = serialize_map(&a.map);
    let grid = grid_csv(&a.grid);
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("map.txt"), map)?;
            fs::write(dir.join("grid.csv"), grid)?;
        }
        None => emit(None, &format!("{map}\n{grid}"))?,
    }
    eprintln!(
        "C = {c}, N = {}: {} slopes in {window}, longest scan {} steps",
        args.n,
        a.map.slope_set().len(),
        a.grid.max_step()
    );
    Ok(())
}

/// Rows for `n = 1..=N` at the witness, or at `x = 0` when nothing moves.
fn lift_rows(lift: &StructuredMap, n: u32) -> Result<Vec<GrowthRow>, CliError> {
    let probes: Vec<Rational> = (0..64).map(|j| ratio(j, 64)).collect();
    match find_growth_witness(lift, &probes)? {
        Some(w) => (1..=n).map(|k| Ok(growth_formula(lift, &w, k)?)).collect(),
        None => {
            let f0 = psi_conjugate(lift)?;
            (1..=n).map(|k| Ok(growth_row(&f0, &int(0), k)?)).collect()
        }
    }
}

fn run_growth(args: GrowthArgs) -> Result<(), CliError> {
    if args.digits == 0 {
        return Err(CliError::Usage("--digits must be at least 1".into()));
    }
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let rows = if let Some(w) = &args.word {
        let w = word_arg(w)?;
        match embedding_witness(&w) {
            Some((lift, witness)) => (1..=args.n)
                .map(|k| Ok(growth_formula(&lift, &witness, k)?))
                .collect::<Result<Vec<_>, CliError>>()?,
            None => {
                let f0 = embed_to_qi(&w);
                (1..=args.n)
                    .map(|k| Ok(growth_row(&f0, &int(0), k)?))
                    .collect::<Result<Vec<_>, CliError>>()?
            }
        }
    } else if let Some(path) = &args.lift {
        let core = LiftCore::from_map(&load_map(path)?)?;
        lift_rows(&StructuredMap::PeriodicLift(core), args.n)?
    } else if let Some(t) = &args.translation {
        let core = LiftCore::translation(rational_arg(t)?);
        lift_rows(&StructuredMap::PeriodicLift(core), args.n)?
    } else {
        return Err(CliError::Usage(
            "give one of --word, --lift or --translation".into(),
        ));
    };
    emit(args.out.as_deref(), &growth_csv(&rows, args.digits))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Map(cmd) => run_map(cmd),
        Command::Approximate(args) => run_approximate(args),
        Command::Growth(args) => run_growth(args),
        Command::Relations { j_max } => {
            let table = relation_table(j_max);
            let mut out = String::from("i,j,holds\n");
            for (i, j, ok) in &table {
                out.push_str(&format!("{i},{j},{}\n", if *ok { "pass" } else { "fail" }));
            }
            emit(None, &out)?;
            if table.iter().any(|(_, _, ok)| !ok) {
                return Err(CliError::Contract("some relations fail".into()));
            }
            Ok(())
        }
        Command::WordProblem { word } => {
            let w = word_arg(&word)?;
            let verdict = if word_problem(&w) {
                "trivial"
            } else {
                "nontrivial"
            };
            emit(None, &format!("{verdict}\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
