//! The `gptforge` command line.
//!
//! Exit codes: 0 for an affirmative verdict, 1 for a negative one, 2 for
//! usage, I/O, parse and shape errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::classicality::{
    classical_theory_report, extend_to_maximal, is_distinguishable, pair_table, ClassicalSet,
};
use crate::composition::{
    check_axiom_product_pure, check_information_locality, check_mid_factorization,
    composite_classical_set, effects_linearly_independent, CompositeSystem,
};
use crate::decoherence::{
    alternative_complete_decoherence, decohered_effect_set, mid, mid_property_suite, Uniqueness,
};
use crate::error::GptError;
use crate::exactmath::RationalVector;
use crate::format::{
    load_states_file, load_strategies_file, resolve_theory, save_theory_file, FormatError,
    LoadedTheory,
};
use crate::gpt::{validate_system, GptState, GptSystem};
use crate::objectivity::{
    is_sbs, play_game, referee_test, scan_canonical_strategies, synthesize_winning_strategy,
    GameOutcome, SbsVerdict, SrmTest,
};
use crate::report::{self, Report};
use crate::zoo::{is_unrestricted, unrestricted_completion, DEFAULT_MAX_DIM};

pub const MAX_DIM_VAR: &str = "GPTFORGE_MAX_DIM";

#[derive(Parser, Debug)]
#[command(
    name = "gptforge",
    version,
    about = "Exact checks on generalized probabilistic theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Theory file, or a recipe such as `rtrit`, `sqbit x bit`, `rtrit^3`.
    #[arg(long)]
    theory: String,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SetArg {
    /// Pure-state indices: 0-based numbers or 1-based names `a1`, `alpha1`, `α1`.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the defining invariants of a theory.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether states are perfectly distinguishable.
    Distinguish {
        #[command(flatten)]
        common: Common,
        /// File listing the states to distinguish.
        #[arg(long)]
        state: Option<PathBuf>,
        #[command(flatten)]
        set: SetArg,
        /// Check every pair of pure states.
        #[arg(long)]
        all_pairs: bool,
    },
    /// Extend a set of pure states to a maximal classical set.
    ClassicalSet {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        set: SetArg,
    },
    /// The measurement-induced decoherence of a classical set.
    Mid {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        set: SetArg,
    },
    /// Decoherence properties, decohered effects and uniqueness.
    Decohere {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        set: SetArg,
    },
    /// Build a minimal tensor product and check the composition axioms.
    Compose {
        #[command(flatten)]
        common: Common,
        /// Write the composite theory file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace the effects by the full dual of the state cone.
    Complete {
        #[command(flatten)]
        common: Common,
        /// Write the completed theory file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide spectrum broadcast structure of a joint state.
    SbsCheck {
        #[command(flatten)]
        common: Common,
        /// File holding the joint state.
        #[arg(long)]
        state: PathBuf,
        /// Classical set on the system (factor 0).
        #[command(flatten)]
        set: SetArg,
    },
    /// Play the objectivity game on a joint state.
    Game {
        #[command(flatten)]
        common: Common,
        /// File holding the joint state.
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        set: SetArg,
        /// Explicit player strategies; otherwise they are synthesized.
        #[arg(long)]
        strategies: Option<PathBuf>,
    },
}

/// Anything that ends the run with exit code 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Format(FormatError),
    Gpt(GptError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
            Self::Format(e) => write!(f, "{e}"),
            Self::Gpt(e) => write!(f, "{e}"),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        Self::Format(e)
    }
}

impl From<GptError> for CliError {
    fn from(e: GptError) -> Self {
        Self::Gpt(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parse arguments, run, and write the report. Returns the exit code.
pub fn run<I, T>(
    args: I,
    max_dim_env: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = max_dim(max_dim_env).and_then(|limit| dispatch(cli.command, limit));
    match result {
        Ok((report, json)) => {
            let text = if json {
                report.to_json()
            } else {
                report.to_text()
            };
            let _ = out.write_all(text.as_bytes());
            report.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn max_dim(env: Option<&str>) -> CliResult<usize> {
    match env {
        None => Ok(DEFAULT_MAX_DIM),
        Some(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{MAX_DIM_VAR} must be a positive integer, got {v:?}"
                ))
            }),
    }
}

fn dispatch(command: Command, max_dim: usize) -> CliResult<(Report, bool)> {
    let load = |c: &Common| resolve_theory(&c.theory, max_dim).map_err(CliError::from);
    Ok(match command {
        Command::Validate { common } => (cmd_validate(&load(&common)?)?, common.json),
        Command::Distinguish {
            common,
            state,
            set,
            all_pairs,
        } => (
            cmd_distinguish(
                &load(&common)?,
                state.as_deref(),
                set.set.as_deref(),
                all_pairs,
            )?,
            common.json,
        ),
        Command::ClassicalSet { common, set } => (
            cmd_classical_set(&load(&common)?, set.set.as_deref())?,
            common.json,
        ),
        Command::Mid { common, set } => {
            (cmd_mid(&load(&common)?, set.set.as_deref())?, common.json)
        }
        Command::Decohere { common, set } => (
            cmd_decohere(&load(&common)?, set.set.as_deref())?,
            common.json,
        ),
        Command::Compose { common, out } => {
            (cmd_compose(&load(&common)?, out.as_deref())?, common.json)
        }
        Command::Complete { common, out } => {
            (cmd_complete(&load(&common)?, out.as_deref())?, common.json)
        }
        Command::SbsCheck { common, state, set } => (
            cmd_sbs_check(&load(&common)?, &state, set.set.as_deref())?,
            common.json,
        ),
        Command::Game {
            common,
            state,
            set,
            strategies,
        } => (
            cmd_game(
                &load(&common)?,
                &state,
                set.set.as_deref(),
                strategies.as_deref(),
            )?,
            common.json,
        ),
    })
}

/// Parse `0,1`, `a1,a2`, `alpha1`, `α1` into 0-based indices.
pub fn parse_set(text: &str, available: usize) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim) {
        let named = ["alpha", "α", "a"]
            .iter()
            .find_map(|p| token.strip_prefix(p));
        let index = match named {
            Some(rest) => match rest.parse::<usize>() {
                Ok(k) if k >= 1 => k - 1,
                _ => return Err(CliError::Usage(format!("bad set member {token:?}"))),
            },
            None => token
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad set member {token:?}")))?,
        };
        if index >= available {
            return Err(CliError::Usage(format!(
                "set member {token:?} out of range ({available} pure states)"
            )));
        }
        if out.contains(&index) {
            return Err(CliError::Usage(format!("set member {token:?} repeats")));
        }
        out.push(index);
    }
    Ok(out)
}

fn index_list(v: &[usize]) -> Value {
    json!(v)
}

fn cmd_validate(theory: &LoadedTheory) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("validate", sys.name());
    let v = validate_system(sys)?;
    r.push("dim", json!(sys.dim()));
    r.push("state_generators", json!(sys.num_states()));
    r.push("effect_generators", json!(sys.effects().len()));
    r.push("generators_exhaustive", json!(sys.exhaustive()));
    let checks: Vec<Value> = v
        .checks
        .iter()
        .map(|c| {
            json!({
                "invariant": c.invariant.label(),
                "holds": c.holds,
                "offending": c.offending,
            })
        })
        .collect();
    r.push("invariants", Value::Array(checks));
    match v.first_violation() {
        None => {
            r.push("unrestricted", json!(is_unrestricted(sys)?));
            r.conclude(true, "valid");
        }
        Some(c) => {
            let what = match c.offending {
                Some(i) => format!("{} violated at generator {i}", c.invariant.label()),
                None => format!("{} violated", c.invariant.label()),
            };
            r.push("violation", json!(what));
            r.conclude(false, "invalid");
        }
    }
    Ok(r)
}

fn cmd_distinguish(
    theory: &LoadedTheory,
    state: Option<&Path>,
    set: Option<&str>,
    all_pairs: bool,
) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("distinguish", sys.name());
    let chosen = [state.is_some(), set.is_some(), all_pairs]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen != 1 {
        return Err(CliError::Usage(
            "distinguish needs exactly one of --state, --set, --all-pairs".into(),
        ));
    }
    if all_pairs {
        let table = pair_table(sys)?;
        let any = table.iter().any(|p| p.witness.is_some());
        let rows: Vec<Value> = table
            .iter()
            .map(|p| {
                json!({
                    "pair": [p.first, p.second],
                    "distinguishable": p.witness.is_some(),
                })
            })
            .collect();
        r.push("pairs_checked", json!(table.len()));
        r.push(
            "distinguishable_pairs",
            json!(table.iter().filter(|p| p.witness.is_some()).count()),
        );
        r.push("pairs", Value::Array(rows));
        r.conclude(
            any,
            if any {
                "some pair distinguishable"
            } else {
                "infeasible"
            },
        );
        return Ok(r);
    }
    let states: Vec<GptState> = match (state, set) {
        (Some(path), _) => load_states_file(path)?
            .into_iter()
            .map(|v| GptState::new(sys, v))
            .collect::<Result<_, _>>()?,
        (None, Some(text)) => parse_set(text, sys.num_states())?
            .into_iter()
            .map(|i| sys.pure_state(i))
            .collect::<Result<_, _>>()?,
        (None, None) => unreachable!("checked above"),
    };
    r.push(
        "states",
        report::vectors(
            &states
                .iter()
                .map(|s| s.vector().clone())
                .collect::<Vec<_>>(),
        ),
    );
    match is_distinguishable(sys, &states)? {
        Some(m) => {
            r.push("measurement", report::measurement(&m));
            r.conclude(true, "distinguishable");
        }
        None => r.conclude(false, "infeasible"),
    }
    Ok(r)
}

/// Use `--set` as given, or the greedy maximal set from the empty seed.
fn resolve_classical_set(
    sys: &GptSystem,
    set: Option<&str>,
) -> CliResult<Result<ClassicalSet, String>> {
    match set {
        Some(text) => {
            let idx = parse_set(text, sys.num_states())?;
            if idx.len() < 2 {
                return Ok(Err("a classical set needs at least two states".into()));
            }
            Ok(match ClassicalSet::from_indices(sys, &idx)? {
                None => Err("states are not distinguishable".into()),
                Some(cs) if !cs.maximal() => Err("classical set is not maximal".into()),
                Some(cs) => Ok(cs),
            })
        }
        None => {
            Ok(extend_to_maximal(sys, &[])?
                .ok_or_else(|| "theory has no classical set".to_string()))
        }
    }
}

fn push_set(r: &mut Report, cs: &ClassicalSet) {
    r.push("classical_set", index_list(cs.pure_states()));
    r.push("measurement", report::measurement(cs.measurement()));
}

fn cmd_classical_set(theory: &LoadedTheory, set: Option<&str>) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("classical-set", sys.name());
    let seed = match set {
        Some(t) => parse_set(t, sys.num_states())?,
        None => Vec::new(),
    };
    r.push("seed", index_list(&seed));
    let found = match extend_to_maximal(sys, &seed) {
        Err(GptError::NotDistinguishable(_)) => {
            r.push("reason", json!("seed states are not distinguishable"));
            r.conclude(false, "none");
            return Ok(r);
        }
        other => other?,
    };
    let ct = classical_theory_report(sys)?;
    r.push("classical_theory", json!(ct.classical));
    match found {
        Some(cs) => {
            push_set(&mut r, &cs);
            r.push("maximal", json!(cs.maximal()));
            r.push("generators_exhaustive", json!(sys.exhaustive()));
            r.conclude(true, "maximal classical set");
        }
        None => {
            r.push("reason", json!("no two pure states are distinguishable"));
            r.conclude(false, "none");
        }
    }
    Ok(r)
}

fn cmd_mid(theory: &LoadedTheory, set: Option<&str>) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("mid", sys.name());
    match resolve_classical_set(sys, set)? {
        Err(reason) => {
            r.push("reason", json!(reason));
            r.conclude(false, "no decoherence");
        }
        Ok(cs) => {
            push_set(&mut r, &cs);
            r.push("matrix", report::channel(&mid(sys, &cs)?));
            r.conclude(true, "complete decoherence");
        }
    }
    Ok(r)
}

fn cmd_decohere(theory: &LoadedTheory, set: Option<&str>) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("decohere", sys.name());
    let cs = match resolve_classical_set(sys, set)? {
        Err(reason) => {
            r.push("reason", json!(reason));
            r.conclude(false, "no decoherence");
            return Ok(r);
        }
        Ok(cs) => cs,
    };
    push_set(&mut r, &cs);
    let suite = mid_property_suite(sys, &cs)?;
    r.push("matrix", report::channel(&suite.channel));
    r.push("complete_decoherence", json!(suite.is_complete));
    r.push("idempotent", json!(suite.idempotent));
    r.push(
        "fixes_classical_effects",
        json!(suite.fixes_classical_effects),
    );
    r.push(
        "decohered_effects",
        report::vectors(&decohered_effect_set(sys, &cs)?),
    );
    let purity: Vec<Value> = suite
        .purity_increasing_inputs
        .iter()
        .map(|p| {
            json!({
                "classical_state": p.classical_index,
                "outside_state": p.outside_state,
                "input": report::vector(&p.input),
                "output": report::vector(&p.output),
            })
        })
        .collect();
    r.push("purity_increase", Value::Array(purity));
    match alternative_complete_decoherence(sys, &cs)? {
        Uniqueness::Unique => {
            r.push("unique_among_measure_prepare", json!(true));
        }
        Uniqueness::Alternative {
            channel,
            separating_state,
        } => {
            r.push("unique_among_measure_prepare", json!(false));
            r.push("alternative", report::channel(&channel));
            r.push("separating_state", json!(separating_state));
        }
    }
    let ok = suite.is_complete && suite.idempotent && suite.fixes_classical_effects;
    r.conclude(
        ok,
        if ok {
            "complete decoherence"
        } else {
            "property failure"
        },
    );
    Ok(r)
}

fn factor_sets(composite: &CompositeSystem) -> CliResult<Option<Vec<ClassicalSet>>> {
    let mut sets = Vec::new();
    for f in composite.factors() {
        match extend_to_maximal(f, &[])? {
            Some(cs) => sets.push(cs),
            None => return Ok(None),
        }
    }
    Ok(Some(sets))
}

fn cmd_compose(theory: &LoadedTheory, out: Option<&Path>) -> CliResult<Report> {
    let composite = &theory.composite;
    let sys = composite.system();
    let mut r = Report::new("compose", sys.name());
    r.push(
        "factors",
        json!(composite
            .factors()
            .iter()
            .map(|f| f.name().to_string())
            .collect::<Vec<_>>()),
    );
    r.push("dim", json!(sys.dim()));
    r.push("state_generators", json!(sys.num_states()));
    r.push("effect_generators", json!(sys.effects().len()));
    r.push("valid", json!(validate_system(sys)?.is_ok()));
    r.push(
        "effects_linearly_independent",
        json!(effects_linearly_independent(sys)),
    );
    let product_pure = check_axiom_product_pure(composite)?;
    r.push("product_states_pure", json!(product_pure));
    let mut ok = product_pure;
    match factor_sets(composite)? {
        None => {
            r.push("information_locality", Value::Null);
            r.push("mid_factorization", Value::Null);
        }
        Some(sets) => {
            let il = check_information_locality(composite, &sets)?;
            r.push("information_locality", json!(il));
            ok &= il;
            if il && product_pure {
                let joint = composite_classical_set(composite, &sets)?;
                r.push("composite_classical_set", index_list(joint.pure_states()));
                let fact = check_mid_factorization(composite, &sets)?;
                r.push("mid_factorization", json!(fact));
                ok &= fact;
            } else {
                r.push("mid_factorization", Value::Null);
            }
        }
    }
    if let Some(path) = out {
        save_theory_file(path, sys, theory.recipe.as_ref())?;
    }
    r.conclude(ok, if ok { "axioms hold" } else { "axiom failure" });
    Ok(r)
}

fn cmd_complete(theory: &LoadedTheory, out: Option<&Path>) -> CliResult<Report> {
    let sys = theory.system();
    let mut r = Report::new("complete", sys.name());
    r.push("was_unrestricted", json!(is_unrestricted(sys)?));
    let done = unrestricted_completion(sys)?;
    r.push("effect_generators", report::vectors(done.effects()));
    r.push("unit", report::vector(done.unit()));
    let ct = classical_theory_report(&done)?;
    r.push("classical_theory", json!(ct.classical));
    if let Some(path) = out {
        save_theory_file(path, &done, None)?;
    }
    r.conclude(true, "unrestricted");
    Ok(r)
}

fn load_joint_state(sys: &GptSystem, path: &Path) -> CliResult<GptState> {
    let mut states = load_states_file(path)?;
    if states.len() != 1 {
        return Err(CliError::Usage(format!(
            "{}: expected exactly one joint state, found {}",
            path.display(),
            states.len()
        )));
    }
    let v: RationalVector = states.pop().expect("one state");
    let rho = GptState::new(sys, v)?;
    if !rho.is_normalized() {
        return Err(GptError::BadNorm(crate::exactmath::format_rational(rho.norm())).into());
    }
    Ok(rho)
}

fn joint_setup(
    theory: &LoadedTheory,
    state: &Path,
    set: Option<&str>,
) -> CliResult<(GptState, Result<ClassicalSet, String>)> {
    let composite = &theory.composite;
    if composite.factors().len() < 2 {
        return Err(CliError::Usage(
            "the theory must be a composite `S x E1 x ...` (use a recipe)".into(),
        ));
    }
    let rho = load_joint_state(composite.system(), state)?;
    let cs = resolve_classical_set(&composite.factors()[0], set)?;
    Ok((rho, cs))
}

fn push_witness(r: &mut Report, verdict: &SbsVerdict) {
    match verdict {
        SbsVerdict::Witness(w) => {
            r.push(
                "probabilities",
                Value::Array(w.probs.iter().map(report::rational).collect()),
            );
            r.push("pointers", index_list(&w.pointers));
            let fragments: Vec<Value> = w
                .fragment_states
                .iter()
                .map(|row| {
                    report::vectors(&row.iter().map(|s| s.vector().clone()).collect::<Vec<_>>())
                })
                .collect();
            r.push("fragment_states", Value::Array(fragments));
            let ms: Vec<Value> = w
                .fragment_measurements
                .iter()
                .map(|m| m.as_ref().map_or(Value::Null, report::measurement))
                .collect();
            r.push("fragment_measurements", Value::Array(ms));
        }
        SbsVerdict::No { step, reason } => {
            r.push("failed_step", json!(step.number()));
            r.push("failed_check", json!(step.label()));
            r.push("reason", json!(reason));
        }
    }
}

fn cmd_sbs_check(theory: &LoadedTheory, state: &Path, set: Option<&str>) -> CliResult<Report> {
    let composite = &theory.composite;
    let mut r = Report::new("sbs-check", composite.system().name());
    let (rho, cs) = joint_setup(theory, state, set)?;
    let cs = match cs {
        Ok(cs) => cs,
        Err(reason) => {
            r.push("reason", json!(reason));
            r.conclude(false, "not SBS");
            return Ok(r);
        }
    };
    push_set(&mut r, &cs);
    let verdict = is_sbs(composite, &rho, &cs)?;
    push_witness(&mut r, &verdict);
    let yes = verdict.is_sbs();
    r.conclude(yes, if yes { "SBS" } else { "not SBS" });
    Ok(r)
}

fn push_outcome(r: &mut Report, game: &GameOutcome) {
    let table: Vec<Value> = game
        .joint_probs
        .iter()
        .map(|e| json!({"outcomes": e.outcomes, "probability": report::rational(&e.probability)}))
        .collect();
    r.push("joint_probabilities", Value::Array(table));
    r.push("agreement", json!(game.agreement));
    r.push("non_disturbing", json!(game.non_disturbing));
}

fn cmd_game(
    theory: &LoadedTheory,
    state: &Path,
    set: Option<&str>,
    strategies: Option<&Path>,
) -> CliResult<Report> {
    let composite = &theory.composite;
    let mut r = Report::new("game", composite.system().name());
    let (rho, cs) = joint_setup(theory, state, set)?;
    let cs = match cs {
        Ok(cs) => cs,
        Err(reason) => {
            r.push("reason", json!(reason));
            r.conclude(false, "LOSE");
            return Ok(r);
        }
    };
    push_set(&mut r, &cs);
    let referee = referee_test(&composite.factors()[0], &cs)?;
    let players: Vec<SrmTest> = match strategies {
        Some(path) => {
            let raw = load_strategies_file(path)?;
            if raw.len() + 1 != composite.factors().len() {
                return Err(CliError::Usage(format!(
                    "{}: expected {} players, found {}",
                    path.display(),
                    composite.factors().len() - 1,
                    raw.len()
                )));
            }
            r.push("strategies", json!("file"));
            raw.into_iter()
                .enumerate()
                .map(|(k, branches)| SrmTest::new(&composite.factors()[k + 1], branches))
                .collect::<Result<_, _>>()?
        }
        None => match synthesize_winning_strategy(composite, &rho, &cs)? {
            Some(p) => {
                r.push("strategies", json!("synthesized"));
                p
            }
            None => {
                let scan = scan_canonical_strategies(composite, &rho, &cs)?;
                r.push("strategies", json!("canonical family"));
                r.push("strategies_tried", json!(scan.strategies_tried));
                r.push("wins", json!(scan.wins));
                let win = scan.wins > 0;
                r.conclude(win, if win { "WIN" } else { "LOSE" });
                return Ok(r);
            }
        },
    };
    let game = play_game(composite, &rho, &cs, &referee, &players)?;
    push_outcome(&mut r, &game);
    r.conclude(game.win, if game.win { "WIN" } else { "LOSE" });
    Ok(r)
}
