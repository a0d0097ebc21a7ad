//! Argument parsing and dispatch for the `floppy` command.
//!
//! Every command prints one JSON document on standard output. Exit status is
//! 0 on success, 1 when the input violates a mathematical precondition, and
//! 2 when it is malformed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floppy_metric::extension::{
    full_extend, one_step_extend, verify_pstep, ChoicePolicy, Mode, OrderPolicy,
};
use floppy_metric::game::{
    play, play_sabotage, sabotage_witness, AdversaryPlayerTwo, FamilyPlayerOne, LeastPlayerTwo,
    PlayerOne, PlayerTwo, RandomPlayerTwo, Sampler, WinningPlayerOne,
};
use floppy_metric::generators::{random_patchwork, GenKind, GenSpec};
use floppy_metric::glue::{floppy_certificate, glue, validate_patchwork, Glued, Patchwork};
use floppy_metric::metric::{is_floppy, minimal_floppy_extension, tables_for, validate, Grade};
use floppy_metric::{
    admissible_interval, ChoiceSet, Doubleton, Error, PartialMetric, Rational, VertexId,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "floppy",
    version,
    about = "Exact extension of partial graph metrics"
)]
pub struct Cli {
    /// Print the resulting metric as a Graphviz graph instead of JSON.
    #[arg(long, global = true)]
    pub dot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Connectivity, polygonal inequality, positivity and completeness.
    Validate { input: String },
    /// Distances and intervals for single pairs.
    Query(QueryArgs),
    /// Floppiness report, or the forced-pair extension with --minimal.
    Floppy {
        input: String,
        #[arg(long)]
        minimal: bool,
    },
    /// Extend to a full metric one admissible value at a time.
    Extend(ExtendArgs),
    /// Add one pair with a given value.
    Step(StepArgs),
    /// Evaluate the one-step inequalities on every vertex pair.
    Pstep {
        input: String,
        #[arg(long)]
        pair: String,
        #[arg(long)]
        r: String,
    },
    /// Play or analyse the metric-extending game.
    #[command(subcommand)]
    Game(GameCommand),
    /// Glue pieces onto a base metric.
    #[command(subcommand)]
    Glue(GlueCommand),
    /// Generate an instance.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    input: String,
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    hat: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    check: Option<Vec<String>>,
    /// Two pairs written "x,y".
    #[arg(long, num_args = 2, value_names = ["XY", "UV"])]
    ddot: Option<Vec<String>>,
    /// Admissible interval of a missing pair "x,y".
    #[arg(long, value_name = "XY")]
    interval: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    input: String,
    /// lex, maxgap or random:SEED
    #[arg(long, default_value = "lex")]
    order: String,
    /// midpoint or set-file:PATH (a JSON object from "x,y" to choice sets)
    #[arg(long, default_value = "midpoint")]
    choice: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Theorem,
    Proposition,
}

#[derive(Args, Debug)]
pub struct StepArgs {
    input: String,
    #[arg(long)]
    pair: String,
    #[arg(long)]
    r: String,
    #[arg(long, value_enum, default_value = "theorem")]
    mode: ModeArg,
}

#[derive(Subcommand, Debug)]
pub enum GameCommand {
    /// Play one game and print the transcript.
    Play(PlayArgs),
    /// Look for two pairs whose choice sets let Player II break every extension.
    Sabotage {
        input: String,
        /// JSON object from "x,y" to choice sets, covering every missing pair.
        #[arg(long)]
        family: String,
        /// Also play the plan out and include the transcript.
        #[arg(long)]
        replay: bool,
    },
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    input: String,
    /// winning or family (offers the sets from --family)
    #[arg(long, default_value = "winning")]
    p1: String,
    /// random:SEED, least or adversary (watches the pairs in --family)
    #[arg(long, default_value = "least")]
    p2: String,
    #[arg(long, value_enum, default_value = "mixed")]
    sampler: SamplerArg,
    #[arg(long)]
    family: Option<String>,
    /// Number of innings; defaults to the number of missing pairs.
    #[arg(long)]
    lambda: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SamplerArg {
    Endpoints,
    Midpoint,
    Grid,
    Mixed,
}

#[derive(Subcommand, Debug)]
pub enum GlueCommand {
    /// Check the gluing conditions.
    Validate { input: String },
    /// The glued metric.
    Build { input: String },
    /// Distance between two vertices through gateways.
    Hat { input: String, x: String, y: String },
    /// Least triangle slack of a vertex against a vertex set.
    Lambda {
        input: String,
        v: String,
        /// Comma-separated vertex set.
        #[arg(long)]
        set: String,
    },
    /// Sufficient conditions for the glued metric to be floppy.
    Certify { input: String },
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    kind: GenKindArg,
    /// Multiply every weight by this rational.
    #[arg(long, default_value = "1", global = true)]
    scale: String,
}

#[derive(Subcommand, Debug)]
pub enum GenKindArg {
    Cantor {
        #[arg(long)]
        depth: u32,
    },
    Path {
        #[arg(long)]
        n: usize,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    Star {
        #[arg(long)]
        n: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
    RandomFloppy {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        density: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random patchwork document for the glue commands.
    Patchwork {
        #[arg(long, default_value_t = 4)]
        pieces: usize,
        #[arg(long, default_value_t = 5)]
        piece_vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Result of a command: a JSON value, plus the metric it describes for `--dot`.
struct Output {
    json: Value,
    metric: Option<PartialMetric>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn out<T: Serialize>(v: &T) -> Output {
    Output {
        json: to_value(v),
        metric: None,
    }
}

fn with_metric(json: Value, m: PartialMetric) -> Output {
    Output {
        json,
        metric: Some(m),
    }
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Malformed(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("reading {path}: {e}")))
    }
}

fn load_metric(path: &str) -> Result<PartialMetric, Error> {
    PartialMetric::from_json(&read_input(path)?)
}

fn load_family(path: &str) -> Result<BTreeMap<Doubleton, ChoiceSet>, Error> {
    let raw: BTreeMap<String, ChoiceSet> = serde_json::from_str(&read_input(path)?)
        .map_err(|e| Error::Malformed(format!("{path}: {e}")))?;
    raw.into_iter().map(|(k, v)| Ok((k.parse()?, v))).collect()
}

fn rational(s: &str) -> Result<Rational, Error> {
    s.parse().map_err(|e| Error::Malformed(format!("{e}")))
}

fn vertex(m: &PartialMetric, s: &str) -> Result<VertexId, Error> {
    let v = VertexId::from(s);
    m.index_of(&v)?;
    Ok(v)
}

fn pair(m: &PartialMetric, s: &str) -> Result<Doubleton, Error> {
    let p: Doubleton = s.parse()?;
    m.index_of(p.a())?;
    m.index_of(p.b())?;
    Ok(p)
}

fn order_policy(s: &str) -> Result<OrderPolicy, Error> {
    match s {
        "lex" => Ok(OrderPolicy::Lexicographic),
        "maxgap" => Ok(OrderPolicy::MaxGapFirst),
        _ => match s.strip_prefix("random:") {
            Some(seed) => seed
                .parse()
                .map(OrderPolicy::Random)
                .map_err(|_| Error::Malformed(format!("bad seed in {s:?}"))),
            None => Err(Error::Malformed(format!(
                "unknown order {s:?}; expected lex, maxgap or random:SEED"
            ))),
        },
    }
}

fn choice_policy(s: &str) -> Result<ChoicePolicy, Error> {
    if s == "midpoint" {
        return Ok(ChoicePolicy::Midpoint);
    }
    match s.strip_prefix("set-file:") {
        Some(path) => Ok(ChoicePolicy::Sets(load_family(path)?)),
        None => Err(Error::Malformed(format!(
            "unknown choice {s:?}; expected midpoint or set-file:PATH"
        ))),
    }
}

fn query(a: &QueryArgs) -> Result<Output, Error> {
    let m = load_metric(&a.input)?;
    let given = [
        a.hat.is_some(),
        a.check.is_some(),
        a.ddot.is_some(),
        a.interval.is_some(),
    ];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(Error::Malformed(
            "give exactly one of --hat, --check, --ddot, --interval".into(),
        ));
    }
    let t = || tables_for(&m, Grade::Pseudometric);
    if let Some(xy) = &a.hat {
        let (x, y) = (vertex(&m, &xy[0])?, vertex(&m, &xy[1])?);
        return Ok(out(&json!({ "value": floppy_metric::hat(&m, &x, &y)? })));
    }
    if let Some(xy) = &a.check {
        let (x, y) = (vertex(&m, &xy[0])?, vertex(&m, &xy[1])?);
        return Ok(out(&json!({ "value": t()?.check(&x, &y)? })));
    }
    if let Some(ps) = &a.ddot {
        let (p, q) = (pair(&m, &ps[0])?, pair(&m, &ps[1])?);
        return Ok(out(&json!({ "value": floppy_metric::ddot(&m, &p, &q)? })));
    }
    let xy = pair(&m, a.interval.as_deref().unwrap())?;
    Ok(out(&admissible_interval(&m, &xy)?))
}

fn game_play(a: &PlayArgs) -> Result<Output, Error> {
    let base = load_metric(&a.input)?;
    let family = a.family.as_deref().map(load_family).transpose()?;
    let need_family = || {
        family
            .clone()
            .ok_or_else(|| Error::Malformed("this strategy needs --family".into()))
    };
    let mut one: Box<dyn PlayerOne> = match a.p1.as_str() {
        "winning" => Box::new(WinningPlayerOne::new(&base)?),
        "family" => Box::new(FamilyPlayerOne::new(&base, &need_family()?)?),
        other => {
            return Err(Error::Malformed(format!(
                "unknown Player I strategy {other:?}"
            )))
        }
    };
    let sampler = match a.sampler {
        SamplerArg::Endpoints => Sampler::NearEndpoints,
        SamplerArg::Midpoint => Sampler::Midpoint,
        SamplerArg::Grid => Sampler::Grid,
        SamplerArg::Mixed => Sampler::Mixed,
    };
    let mut two: Box<dyn PlayerTwo> = match a.p2.as_str() {
        "least" => Box::new(LeastPlayerTwo),
        "adversary" => Box::new(AdversaryPlayerTwo::new(&base, &need_family()?)?),
        other => match other.strip_prefix("random:").map(str::parse::<u64>) {
            Some(Ok(seed)) => Box::new(RandomPlayerTwo::new(seed, sampler)),
            _ => {
                return Err(Error::Malformed(format!(
                    "unknown Player II strategy {other:?}"
                )))
            }
        },
    };
    let lambda = a.lambda.unwrap_or_else(|| base.missing_pairs().len());
    let t = play(&base, lambda, one.as_mut(), two.as_mut())?;
    let metric = t.final_relation();
    Ok(Output {
        json: to_value(&t),
        metric,
    })
}

fn gen(a: &GenArgs) -> Result<Output, Error> {
    let scale = rational(&a.scale)?;
    let kind = match &a.kind {
        GenKindArg::Cantor { depth } => GenKind::Cantor { depth: *depth },
        GenKindArg::Path { n } => GenKind::Path { n: *n },
        GenKindArg::Cycle { n } => GenKind::Cycle { n: *n },
        GenKindArg::Star { n } => GenKind::Star { n: *n },
        GenKindArg::Complete { n } => GenKind::Complete { n: *n },
        GenKindArg::RandomFloppy { n, density, seed } => GenKind::RandomFloppy {
            n: *n,
            density: rational(density)?,
            seed: *seed,
        },
        GenKindArg::Patchwork {
            pieces,
            piece_vertices,
            seed,
        } => {
            let pw = random_patchwork(*pieces, *piece_vertices, *seed)?;
            return Ok(out(&pw));
        }
    };
    let m = GenSpec { kind, scale }.generate()?;
    Ok(with_metric(to_value(&m), m))
}

fn glue_command(c: &GlueCommand) -> Result<Output, Error> {
    let load = |p: &str| Patchwork::from_json(&read_input(p)?);
    match c {
        GlueCommand::Validate { input } => Ok(out(&validate_patchwork(&load(input)?))),
        GlueCommand::Build { input } => {
            let m = glue(&load(input)?)?;
            Ok(with_metric(to_value(&m), m))
        }
        GlueCommand::Hat { input, x, y } => {
            let g = Glued::new(&load(input)?)?;
            Ok(out(
                &json!({ "value": g.hat(&VertexId::from(x.as_str()), &VertexId::from(y.as_str()))? }),
            ))
        }
        GlueCommand::Lambda { input, v, set } => {
            let g = Glued::new(&load(input)?)?;
            let b: Vec<VertexId> = set
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(VertexId::from)
                .collect();
            Ok(out(
                &json!({ "value": g.lambda(&VertexId::from(v.as_str()), &b)? }),
            ))
        }
        GlueCommand::Certify { input } => Ok(out(&floppy_certificate(&load(input)?)?)),
    }
}

fn dispatch(cmd: &Command) -> Result<Output, Error> {
    match cmd {
        Command::Validate { input } => Ok(out(&validate(&load_metric(input)?))),
        Command::Query(a) => query(a),
        Command::Floppy { input, minimal } => {
            let m = load_metric(input)?;
            if *minimal {
                let ext = minimal_floppy_extension(&m)?;
                let metric = ext.metric.clone();
                Ok(with_metric(to_value(&ext), metric))
            } else {
                Ok(out(&is_floppy(&m)?))
            }
        }
        Command::Extend(a) => {
            let m = load_metric(&a.input)?;
            let trace = full_extend(&m, order_policy(&a.order)?, &choice_policy(&a.choice)?)?;
            let result = trace.result.clone();
            Ok(with_metric(to_value(&trace), result))
        }
        Command::Step(a) => {
            let m = load_metric(&a.input)?;
            let mode = match a.mode {
                ModeArg::Theorem => Mode::Theorem,
                ModeArg::Proposition => Mode::Proposition,
            };
            let out = one_step_extend(&m, &pair(&m, &a.pair)?, &rational(&a.r)?, mode)?;
            Ok(with_metric(to_value(&out), out))
        }
        Command::Pstep { input, pair: p, r } => {
            let m = load_metric(input)?;
            Ok(out(&verify_pstep(&m, &pair(&m, p)?, &rational(r)?)?))
        }
        Command::Game(GameCommand::Play(a)) => game_play(a),
        Command::Game(GameCommand::Sabotage {
            input,
            family,
            replay,
        }) => {
            let base = load_metric(input)?;
            let fam = load_family(family)?;
            let plan = sabotage_witness(&base, &fam)?;
            let transcript = match (&plan, replay) {
                (Some(p), true) => Some(play_sabotage(&base, &fam, p.clone())?),
                _ => None,
            };
            Ok(out(&json!({ "plan": plan, "transcript": transcript })))
        }
        Command::Glue(c) => glue_command(c),
        Command::Gen(a) => gen(a),
    }
}

fn error_json(e: &Error) -> String {
    let v = json!({ "error": e.code(), "message": e.to_string() });
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(o) if cli.dot => match o.metric {
            Some(m) => Outcome {
                code: 0,
                stdout: m.to_dot(),
                stderr: String::new(),
            },
            None => {
                let e = Error::Malformed("--dot needs a command whose result is a metric".into());
                Outcome {
                    code: 2,
                    stdout: error_json(&e),
                    stderr: String::new(),
                }
            }
        },
        Ok(o) => Outcome {
            code: 0,
            stdout: serde_json::to_string_pretty(&o.json).unwrap() + "\n",
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: if e.is_malformed() { 2 } else { 1 },
            stdout: error_json(&e),
            stderr: String::new(),
        },
    }
}
