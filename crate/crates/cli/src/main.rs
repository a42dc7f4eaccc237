use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use sectionrep::boundary::{ck_norm, extends_to_ck, GrowthSpec, SampledSection};
use sectionrep::charfactor::{factor_characters, verify_factorization, CharacterMultiset, PolynomialDoc, VERIFY_TRIALS};
use sectionrep::evalrep::{
    classify_inducible, commutant_analysis, equivalent, extract_highest_weight, realize, tensor, Classification,
    EvalRepSpecDoc, FunctionalDoc, MAX_COMMUTANT_DIM,
};
use sectionrep::irrep::{build_irrep, operator_norm, CompactElement};
use sectionrep::rootdata::{build_root_system, kappa_norm, Normalization, Series, Weight};
use sectionrep::selftest::{self, DEFAULT_SEED};
use sectionrep::series::TermRule;
use sectionrep::uhf::{itp_equivalent, powers_factor_type, state_eval, ProductState, VectorSequence};
use sectionrep::Error;

#[derive(Parser)]
#[command(name = "sectionrep", version, about = "Bounded representations of section Lie algebras of type A")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized checks
    #[arg(long, global = true, env = "SECTIONREP_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducible representations of su(r+1)
    #[command(subcommand)]
    Irrep(IrrepCmd),
    /// Evaluation representations and highest weights
    #[command(subcommand)]
    Evalrep(EvalrepCmd),
    /// Product vectors and product states on UHF algebras
    #[command(subcommand)]
    Uhf(UhfCmd),
    /// C^k extension and sampled section norms
    Growth(GrowthCmd),
    /// Character factorization of multiplicative maps
    Factor(FactorCmd),
    /// Run the randomized invariant suite
    Selftest,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value = "A")]
    series: String,
    #[arg(long)]
    rank: usize,
    /// Highest weight in fundamental coordinates, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weight: Vec<i64>,
}

#[derive(Subcommand)]
enum IrrepCmd {
    /// Export generators, basis weights and the Gram matrix
    Build(WeightArgs),
    /// Operator norm of a compact element
    Norm {
        #[command(flatten)]
        weight: WeightArgs,
        /// Compact element as JSON (path or inline)
        #[arg(long)]
        element: String,
        #[arg(long, default_value = "killing")]
        normalization: String,
    },
}

#[derive(Subcommand)]
enum EvalrepCmd {
    Tensor { a: String, b: String },
    Equiv { a: String, b: String },
    Realize {
        spec: String,
        /// Include the generator matrices
        #[arg(long)]
        matrices: bool,
    },
    Extract { spec: String },
    Classify { functional: String },
}

#[derive(Subcommand)]
enum UhfCmd {
    Equiv { v: String, w: String },
    Powers {
        /// Product state JSON `{"rule": ...}`
        #[arg(long, conflicts_with = "rule")]
        input: Option<String>,
        /// Weight rule in short form, e.g. `const:0.25`
        #[arg(long)]
        rule: Option<String>,
    },
    /// Evaluate a product state on a finitely supported operator
    State { input: String },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct GrowthCmd {
    #[command(subcommand)]
    sub: Option<GrowthSub>,
    #[command(flatten)]
    check: GrowthCheck,
}

#[derive(Args, Default)]
struct GrowthCheck {
    #[arg(long)]
    k: Option<u32>,
    /// Boundary distance rule `d_n`
    #[arg(long)]
    dist: Option<String>,
    /// Weight norm rule `‖λ_n‖_κ`
    #[arg(long)]
    wnorm: Option<String>,
    /// Growth spec JSON instead of the flags
    #[arg(long, conflicts_with_all = ["k", "dist", "wnorm"])]
    input: Option<String>,
}

#[derive(Subcommand)]
enum GrowthSub {
    /// Decide extension to C^k sections
    Check(GrowthCheck),
    /// C^k norm of a sampled section
    Cknorm {
        #[arg(long)]
        input: String,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value = "killing")]
        normalization: String,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct FactorCmd {
    #[command(subcommand)]
    sub: Option<FactorSub>,
    #[arg(long)]
    input: Option<String>,
}

#[derive(Subcommand)]
enum FactorSub {
    Run {
        #[arg(long)]
        input: String,
    },
    Verify {
        #[arg(long)]
        input: String,
        /// Character multiset JSON `{"m": .., "multiplicities": {..}}`
        #[arg(long)]
        multiset: String,
        #[arg(long, default_value_t = VERIFY_TRIALS)]
        trials: usize,
    },
}

enum Failure {
    Validation(String, String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.kind().to_string(), e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation("Invalid".into(), msg.into())
}

type Outcome = Result<Value, Failure>;

/// Reads inline JSON, `-` for stdin, or a file path.
fn load(arg: &str) -> Result<Value, Failure> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ if arg == "-" => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| invalid(format!("reading stdin: {e}")))?;
            s
        }
        _ => std::fs::read_to_string(Path::new(arg)).map_err(|e| invalid(format!("reading `{arg}`: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| invalid(format!("malformed JSON in `{arg}`: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T, Failure> {
    serde_json::from_value(load(arg)?).map_err(|e| invalid(format!("`{arg}` does not match the schema: {e}")))
}

fn normalization(s: &str) -> Result<Normalization, Failure> {
    s.parse::<Normalization>().map_err(Failure::from)
}

fn rule(s: &str) -> Result<TermRule, Failure> {
    Ok(TermRule::parse_short(s)?)
}

fn seed(cli_seed: Option<u64>) -> u64 {
    cli_seed.unwrap_or(DEFAULT_SEED)
}

fn irrep_cmd(cmd: IrrepCmd) -> Outcome {
    let setup = |w: &WeightArgs| -> Result<_, Failure> {
        let rs = build_root_system(w.series.parse::<Series>()?, w.rank)?;
        let weight = Weight::from_ints(&w.weight);
        let rho = build_irrep(&rs, &weight)?;
        Ok((rs, weight, rho))
    };
    match cmd {
        IrrepCmd::Build(w) => Ok(setup(&w)?.2.to_json()),
        IrrepCmd::Norm {
            weight,
            element,
            normalization: n,
        } => {
            let n = normalization(&n)?;
            let (rs, lambda, rho) = setup(&weight)?;
            let x: CompactElement = parse(&element)?;
            let norm = operator_norm(&rho, &x)?;
            Ok(json!({
                "operator_norm": norm,
                "upper_bound": kappa_norm(&rs, &lambda, n) * x.kappa_norm(&rs, n),
                "normalization": n,
            }))
        }
    }
}

fn spec(arg: &str) -> Result<sectionrep::evalrep::EvalRepSpec, Failure> {
    Ok(parse::<EvalRepSpecDoc>(arg)?.to_spec()?)
}

fn matrix_json(m: &nalgebra::DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn evalrep_cmd(cmd: EvalrepCmd) -> Outcome {
    match cmd {
        EvalrepCmd::Tensor { a, b } => {
            let t = tensor(&spec(&a)?, &spec(&b)?)?;
            Ok(serde_json::to_value(EvalRepSpecDoc::from_spec(&t)).expect("serializable"))
        }
        EvalrepCmd::Equiv { a, b } => Ok(json!({ "equivalent": equivalent(&spec(&a)?, &spec(&b)?)? })),
        EvalrepCmd::Realize { spec: s, matrices } => {
            let rep = realize(&spec(&s)?)?;
            let mut out = json!({
                "dimension": rep.dim,
                "points": rep.points.iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
                "relation_defect": rep.relation_defect(),
            });
            if rep.dim <= MAX_COMMUTANT_DIM {
                out["commutant"] = serde_json::to_value(commutant_analysis(&rep)?).expect("serializable");
            }
            if matrices {
                let sites: Vec<Value> = (0..rep.sites())
                    .map(|s| {
                        json!({
                            "point": rep.points[s].id,
                            "E": rep.e[s].iter().map(matrix_json).collect::<Vec<_>>(),
                            "F": rep.f[s].iter().map(matrix_json).collect::<Vec<_>>(),
                            "H": rep.h[s].iter().map(matrix_json).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                out["generators"] = Value::Array(sites);
            }
            Ok(out)
        }
        EvalrepCmd::Extract { spec: s } => {
            let hw = extract_highest_weight(&realize(&spec(&s)?)?)?;
            Ok(json!({
                "e_dim": hw.e_dim,
                "functional": FunctionalDoc::from_functional(&hw.functional),
            }))
        }
        EvalrepCmd::Classify { functional } => {
            let f = parse::<FunctionalDoc>(&functional)?.to_functional()?;
            Ok(match classify_inducible(&f) {
                Classification::Inducible(s) => json!({
                    "inducible": true,
                    "spec": EvalRepSpecDoc::from_spec(&s),
                }),
                Classification::NotInducible(reason) => json!({
                    "inducible": false,
                    "detail": reason,
                }),
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateInput {
    state: ProductState,
    #[serde(default)]
    op: Vec<SiteOperator>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteOperator {
    site: u64,
    /// Row-major 2×2 matrix of `[re, im]` pairs or reals.
    matrix: [[Value; 2]; 2],
}

fn complex(v: &Value) -> Result<Complex64, Failure> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| Complex64::new(x, 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Some(Complex64::new(re, im)),
            _ => None,
        },
        _ => None,
    }
    .ok_or_else(|| invalid(format!("`{v}` is not a complex number")))
}

fn uhf_cmd(cmd: UhfCmd) -> Outcome {
    match cmd {
        UhfCmd::Equiv { v, w } => {
            let v: VectorSequence = parse(&v)?;
            let w: VectorSequence = parse(&w)?;
            Ok(serde_json::to_value(itp_equivalent(&v, &w)?).expect("serializable"))
        }
        UhfCmd::Powers { input, rule: r } => {
            let state = match (input, r) {
                (Some(i), None) => parse::<ProductState>(&i)?,
                (None, Some(r)) => ProductState { rule: rule(&r)? },
                _ => return Err(invalid("give either --input or --rule")),
            };
            let state = ProductState::new(state.rule)?;
            Ok(json!({ "factor_type": powers_factor_type(&state) }))
        }
        UhfCmd::State { input } => {
            let req: StateInput = parse(&input)?;
            let state = ProductState::new(req.state.rule)?;
            let mut op = Vec::with_capacity(req.op.len());
            for s in &req.op {
                let [[a, b], [c, d]] = &s.matrix;
                op.push((s.site, Matrix2::new(complex(a)?, complex(b)?, complex(c)?, complex(d)?)));
            }
            let z = state_eval(&state, &op)?;
            Ok(json!({ "value": [z.re, z.im] }))
        }
    }
}

fn growth_check(args: GrowthCheck) -> Outcome {
    let spec = match args.input {
        Some(i) => parse::<GrowthSpec>(&i)?,
        None => {
            let (Some(k), Some(d), Some(w)) = (args.k, args.dist, args.wnorm) else {
                return Err(invalid("growth check needs --k, --dist and --wnorm, or --input"));
            };
            GrowthSpec {
                k,
                distance_rule: rule(&d)?,
                weight_norm_rule: rule(&w)?,
            }
        }
    };
    Ok(serde_json::to_value(extends_to_ck(&spec)?).expect("serializable"))
}

fn growth_cmd(cmd: GrowthCmd) -> Outcome {
    match cmd.sub {
        None => growth_check(cmd.check),
        Some(GrowthSub::Check(c)) => growth_check(c),
        Some(GrowthSub::Cknorm {
            input,
            k,
            rank,
            normalization: n,
        }) => {
            let s: SampledSection = parse(&input)?;
            let rs = build_root_system(Series::A, rank)?;
            Ok(json!({ "ck_norm": ck_norm(&s, k, &rs, normalization(&n)?)?, "k": k }))
        }
    }
}

fn factor_cmd(cmd: FactorCmd, seed: u64) -> Outcome {
    let run = |input: &str| -> Outcome {
        let phi = parse::<PolynomialDoc>(input)?.to_polynomial()?;
        let cm = factor_characters(&phi, seed)?;
        Ok(serde_json::to_value(cm).expect("serializable"))
    };
    match cmd.sub {
        None => match cmd.input {
            Some(i) => run(&i),
            None => Err(invalid("factor needs --input")),
        },
        Some(FactorSub::Run { input }) => run(&input),
        Some(FactorSub::Verify {
            input,
            multiset,
            trials,
        }) => {
            let phi = parse::<PolynomialDoc>(&input)?.to_polynomial()?;
            let cm: CharacterMultiset = parse(&multiset)?;
            let cm = CharacterMultiset::new(cm.m, cm.multiplicities)?;
            Ok(json!({ "verified": verify_factorization(&phi, &cm, trials, seed), "trials": trials }))
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let seed = seed(cli.seed);
    match cli.command {
        Command::Irrep(c) => irrep_cmd(c),
        Command::Evalrep(c) => evalrep_cmd(c),
        Command::Uhf(c) => uhf_cmd(c),
        Command::Growth(c) => growth_cmd(c),
        Command::Factor(c) => factor_cmd(c, seed),
        Command::Selftest => Ok(serde_json::to_value(selftest::run(seed)).expect("serializable")),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Two-column key/value table; arrays of objects become column tables.
fn table(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, x) in map {
                match x {
                    Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
                        out.push_str(&format!("{k}:\n"));
                        out.push_str(&rows_table(rows));
                    }
                    _ => out.push_str(&format!("{k:width$}  {}\n", scalar(x))),
                }
            }
        }
        Value::Array(rows) if rows.iter().all(Value::is_object) => out.push_str(&rows_table(rows)),
        other => out.push_str(&format!("{}\n", scalar(other))),
    }
    out
}

fn rows_table(rows: &[Value]) -> String {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.as_object().expect("object rows").keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: BTreeMap<usize, usize> = (0..cols.len())
        .map(|i| {
            let w = cells.iter().map(|row| row[i].chars().count()).max().unwrap_or(0);
            (i, w.max(cols[i].chars().count()))
        })
        .collect();
    let line = |items: &[String]| -> String {
        let parts: Vec<String> = items.iter().enumerate().map(|(i, s)| format!("{s:w$}", w = widths[&i])).collect();
        format!("  {}\n", parts.join("  ").trim_end())
    };
    let mut out = line(&cols);
    for row in &cells {
        out.push_str(&line(row));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let is_selftest = matches!(cli.command, Command::Selftest);
    std::panic::set_hook(Box::new(|_| {}));
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli)));
    match result {
        Ok(Ok(v)) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Format::Table => print!("{}", table(&v)),
            }
            if is_selftest && v["passed"] == Value::Bool(false) {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Ok(Err(Failure::Validation(kind, message))) => {
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(message))) => {
            eprintln!("{}", json!({ "error": "Internal", "message": message }));
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("{}", json!({ "error": "Internal", "message": "unexpected panic" }));
            ExitCode::from(1)
        }
    }
}
