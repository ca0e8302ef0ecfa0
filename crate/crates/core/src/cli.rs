//! Command-line front end. `run` returns the process exit code: 0 success,
//! 1 self-test failure or internal error, 2 usage or parameter error,
//! 3 data integrity error, 4 decoder declined.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::agcode::{gv_compare, gv_verdict, make_code, naive_encode, CodeError, CodeInstance, CodeParams};
use crate::channel::{corrupt, ChannelError};
use crate::decode::{
    build_lift_tables, choose_params, find_place_of_degree, list_decode, unique_decode, Candidate, DecodeError,
    Mode, UniqueOutcome,
};
use crate::fastenc::{encode, precompute_tables, FastEncError};
use crate::ffield::{Gf, SmallField};
use crate::rng::SeedRng;
use crate::selftest::{self, Fault, Level};
use crate::tablefile::{DecodeMode, LiftSection, TableError, TableFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;
pub const EXIT_DECLINED: i32 = 4;

const GV_GRID: usize = 4000;
const PLACE_RETRIES: usize = 256;

#[derive(Parser, Debug)]
#[command(name = "gsag", version, about = "Tower-based algebraic geometry codes: parameters, encoding, decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct CodeArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long = "K")]
    dim: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report N, K, the distance bound and the GV verdict for one code.
    Params {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Find the smallest q whose family beats the GV bound for a given k.
    Gv {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 64)]
        q_max: u64,
    },
    /// Build the code and write the table file.
    Precompute {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// List-size bound; requires --B.
        #[arg(long)]
        ell: Option<u64>,
        /// Agreement threshold; requires --ell.
        #[arg(long = "B")]
        b: Option<u64>,
        /// Use the list-decoding parameter formulas instead of unique decoding.
        #[arg(long)]
        list: bool,
        /// Lifting place degree below degG + K.
        #[arg(long)]
        optimistic_d: Option<usize>,
        /// Omit the decoder section.
        #[arg(long)]
        no_lift: bool,
    },
    /// Encode a message file of K little-endian 2-byte symbols.
    Encode {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Change exactly --errors symbols at seed-determined positions.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        errors: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Field parameter; taken from --tables when absent.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Decode a received word; writes a JSON list of (message, agreement).
    Decode {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the first decoded message as a symbol file.
        #[arg(long)]
        message_out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Ci)]
        level: LevelArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run a single check by id (1..11, 10a, 10b, 10c, T).
        #[arg(long)]
        criterion: Option<String>,
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
        /// Lifting degree for the q=11 unique decoding run.
        #[arg(long, default_value_t = 8)]
        optimistic_d: usize,
        /// Number of q=11 trials.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Time table construction and fast versus naive encoding.
    Bench {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LevelArg {
    Ci,
    Extended,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FaultArg {
    GTable,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Integrity(String),
    Declined(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Integrity(_) => EXIT_INTEGRITY,
            Failure::Declined(_) => EXIT_DECLINED,
            Failure::Runtime(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Integrity(m) | Failure::Declined(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<CodeError> for Failure {
    fn from(e: CodeError) -> Failure {
        match e {
            CodeError::LengthMismatch { .. } => Failure::Integrity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Failure {
        match e {
            TableError::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Integrity(e.to_string()),
        }
    }
}

impl From<FastEncError> for Failure {
    fn from(e: FastEncError) -> Failure {
        match e {
            FastEncError::DigestMismatch | FastEncError::Length { .. } => Failure::Integrity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Failure {
        match e {
            DecodeError::Infeasible(_) => Failure::Usage(e.to_string()),
            DecodeError::Shape(_) => Failure::Integrity(e.to_string()),
            DecodeError::Encode(inner) => inner.into(),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Failure {
        match e {
            ChannelError::TooManyErrors { .. } => Failure::Usage(e.to_string()),
            ChannelError::BadSymbol { .. } => Failure::Integrity(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("gsag: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Params { code } => cmd_params(code),
        Command::Gv { k, q_max } => cmd_gv(k, q_max),
        Command::Precompute { code, out, seed, ell, b, list, optimistic_d, no_lift } => {
            cmd_precompute(code, &out, seed, ell, b, list, optimistic_d, no_lift)
        }
        Command::Encode { tables, input, out } => cmd_encode(&tables, &input, &out),
        Command::Corrupt { input, out, errors, seed, q, tables } => {
            cmd_corrupt(&input, &out, errors, seed, q, tables.as_deref())
        }
        Command::Decode { tables, input, out, seed, message_out } => {
            cmd_decode(&tables, &input, &out, seed, message_out.as_deref())
        }
        Command::Selftest { level, seed, criterion, inject_fault, optimistic_d, trials } => {
            cmd_selftest(level, seed, criterion.as_deref(), inject_fault, optimistic_d, trials)
        }
        Command::Bench { code, seed, reps } => cmd_bench(code, seed, reps),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn params_report(p: &CodeParams) -> Value {
    let gv = gv_verdict(p.q, p.k, GV_GRID);
    json!({
        "q": p.q,
        "n": p.n,
        "k": p.k,
        "K": p.dim,
        "N": p.len,
        "degG_bound": p.deg_g,
        "Dstar": p.dstar,
        "K_max": p.dim_max,
        "rate": p.rate(),
        "delta_bound": p.delta(),
        "gv_verdict": {
            "beats": gv.beats,
            "margin": gv.margin,
            "best_delta": gv.best_delta,
            "line": gv.line,
        },
    })
}

fn cmd_params(c: CodeArgs) -> Result<(), Failure> {
    let p = CodeParams::new(c.q, c.n, c.k, c.dim)?;
    print_json(&params_report(&p));
    Ok(())
}

fn cmd_gv(k: u64, q_max: u64) -> Result<(), Failure> {
    if k < 2 || q_max < 2 {
        return Err(Failure::Usage("gv needs k ≥ 2 and q_max ≥ 2".into()));
    }
    let rep = gv_compare(k, 2..=q_max, GV_GRID);
    print_json(&json!({ "k": k, "smallest_beating_q": rep.smallest, "verdicts": rep.verdicts }));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_precompute(
    c: CodeArgs,
    out: &Path,
    seed: u64,
    ell: Option<u64>,
    b: Option<u64>,
    list: bool,
    optimistic_d: Option<usize>,
    no_lift: bool,
) -> Result<(), Failure> {
    let p = CodeParams::new(c.q, c.n, c.k, c.dim)?;
    let (mode, tag) = match (ell, b, list) {
        (Some(ell), Some(b), _) => (Mode::Explicit { ell, b }, if ell == 1 { DecodeMode::Unique } else { DecodeMode::List }),
        (None, None, false) => (Mode::Unique, DecodeMode::Unique),
        (None, None, true) => (Mode::List, DecodeMode::List),
        _ => return Err(Failure::Usage("--ell and --B must be given together".into())),
    };
    let dparams = if no_lift { None } else { Some(choose_params(&p, mode)?) };
    let code = make_code(c.q, c.n, c.k, c.dim)?;
    let table = precompute_tables(&code)?;
    let mut tf = TableFile::new(code.clone(), table);
    if let Some(dp) = dparams {
        let d = optimistic_d.unwrap_or((p.deg_g + p.dim) as usize);
        if d == 0 {
            return Err(Failure::Usage("lifting degree must be positive".into()));
        }
        let mut rng = SeedRng::new(seed).split(1);
        let place = find_place_of_degree(&code, d, &mut rng, PLACE_RETRIES)?;
        let tables = build_lift_tables(&code, &dp, place)
            .map_err(|e| Failure::Usage(format!("{e}; raise --optimistic-d or omit it")))?;
        tf.lift = Some(LiftSection { mode: tag, params: dp, tables });
    }
    tf.write(out)?;
    let mut rep = params_report(&p);
    rep["table_bytes"] = json!(std::fs::metadata(out).map(|m| m.len()).unwrap_or(0));
    if let Some(l) = &tf.lift {
        rep["decoder"] = json!({
            "mode": if l.mode == DecodeMode::Unique { "unique" } else { "list" },
            "ell": l.params.ell,
            "B": l.params.b,
            "radius": l.params.radius(&p),
            "D": l.tables.place.degree(),
        });
    }
    print_json(&rep);
    Ok(())
}

fn read_symbols(path: &Path) -> Result<Vec<Gf>, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() % 2 != 0 {
        return Err(Failure::Integrity(format!("{} has odd length {}", path.display(), bytes.len())));
    }
    Ok(bytes.chunks_exact(2).map(|c| Gf(u16::from_le_bytes([c[0], c[1]]))).collect())
}

fn symbol_bytes(v: &[Gf]) -> Vec<u8> {
    v.iter().flat_map(|g| g.0.to_le_bytes()).collect()
}

fn write_symbols(path: &Path, v: &[Gf]) -> Result<(), Failure> {
    std::fs::write(path, symbol_bytes(v)).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn check_symbols(f: &SmallField, v: &[Gf], what: &str) -> Result<(), Failure> {
    match v.iter().position(|g| g.0 as u32 >= f.size()) {
        Some(i) => Err(Failure::Integrity(format!("{what} symbol {i} is {} but the field has {} elements", v[i].0, f.size()))),
        None => Ok(()),
    }
}

fn cmd_encode(tables: &Path, input: &Path, out: &Path) -> Result<(), Failure> {
    let tf = TableFile::read(tables)?;
    let v = read_symbols(input)?;
    let code = &tf.code;
    check_symbols(code.tower().field(), &v, "message")?;
    if v.len() as u64 != code.params.dim {
        return Err(Failure::Usage(format!("message has {} symbols, K = {}", v.len(), code.params.dim)));
    }
    let c = encode(code, &tf.table, &v)?;
    write_symbols(out, &c)
}

fn cmd_corrupt(
    input: &Path,
    out: &Path,
    errors: usize,
    seed: u64,
    q: Option<u64>,
    tables: Option<&Path>,
) -> Result<(), Failure> {
    let q = match (q, tables) {
        (Some(q), _) => q,
        (None, Some(t)) => TableFile::read(t)?.code.params.q,
        (None, None) => return Err(Failure::Usage("corrupt needs --q or --tables".into())),
    };
    let f = SmallField::for_q_squared(q).map_err(|e| Failure::Usage(e.to_string()))?;
    let w = read_symbols(input)?;
    let mut rng = SeedRng::new(seed).split(2);
    let y = corrupt(&f, &w, errors, &mut rng)?;
    write_symbols(out, &y)
}

fn hex(v: &[u16]) -> String {
    v.iter().flat_map(|g| g.to_le_bytes()).map(|b| format!("{b:02x}")).collect()
}

fn cmd_decode(tables: &Path, input: &Path, out: &Path, seed: u64, message_out: Option<&Path>) -> Result<(), Failure> {
    let tf = TableFile::read(tables)?;
    let code: &CodeInstance = &tf.code;
    let lift = tf.lift.as_ref().ok_or_else(|| Failure::Usage("table file has no LIFT section".into()))?;
    let y = read_symbols(input)?;
    check_symbols(code.tower().field(), &y, "received")?;
    if y.len() as u64 != code.params.len {
        return Err(Failure::Integrity(format!("received word has {} symbols, N = {}", y.len(), code.params.len)));
    }
    let mut rng = SeedRng::new(seed).split(3);
    let found: Vec<Candidate> = match lift.mode {
        DecodeMode::Unique if lift.params.ell == 1 => {
            match unique_decode(code, &tf.table, &lift.tables, &lift.params, &y, &mut rng)? {
                UniqueOutcome::Decoded(c) => vec![c],
                UniqueOutcome::Declined => Vec::new(),
            }
        }
        _ => list_decode(code, &tf.table, &lift.tables, &lift.params, &y, &mut rng)?,
    };
    let report: Vec<Value> =
        found.iter().map(|c| json!({ "message": hex(&c.message), "agreement": c.agreement })).collect();
    let text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
    std::fs::write(out, text + "\n").map_err(|e| Failure::Usage(format!("cannot write {}: {e}", out.display())))?;
    if found.is_empty() {
        return Err(Failure::Declined(format!(
            "no message agrees with the received word in more than B = {} positions",
            lift.params.b
        )));
    }
    if let Some(p) = message_out {
        let msg: Vec<Gf> = found[0].message.iter().map(|&x| Gf(x)).collect();
        write_symbols(p, &msg)?;
    }
    Ok(())
}

fn cmd_selftest(
    level: LevelArg,
    seed: u64,
    criterion: Option<&str>,
    fault: Option<FaultArg>,
    optimistic_d: usize,
    trials: usize,
) -> Result<(), Failure> {
    let level = match level {
        LevelArg::Ci => Level::Ci,
        LevelArg::Extended => Level::Extended,
    };
    let fault = fault.map(|FaultArg::GTable| Fault::GTable);
    let known = |c: &str| selftest::CI_IDS.contains(&c) || c == "9" || c == "10";
    if let Some(c) = criterion.filter(|c| !known(c)) {
        return Err(Failure::Usage(format!("unknown criterion {c}")));
    }
    let mut checks = if criterion == Some("9") { Vec::new() } else { selftest::run(Level::Ci, seed, criterion, fault) };
    if level == Level::Extended && criterion.is_none_or(|c| c == "9") {
        let mut rng = SeedRng::new(seed).split(9);
        checks.push(selftest::unique_at_capacity(&mut rng, trials, optimistic_d));
    }
    for c in &checks {
        println!("{}", c.line());
    }
    let failed: Vec<String> =
        checks.iter().filter(|c| c.blocking && !c.passed).map(|c| format!("{} ({})", c.id, c.name)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_bench(c: CodeArgs, seed: u64, reps: usize) -> Result<(), Failure> {
    let reps = reps.max(1);
    let t = Instant::now();
    let code = make_code(c.q, c.n, c.k, c.dim)?;
    let build = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let table = precompute_tables(&code)?;
    let pre = t.elapsed().as_secs_f64();
    let f = code.tower().field().clone();
    let mut rng = SeedRng::new(seed).split(4);
    let v: Vec<Gf> = (0..c.dim).map(|_| crate::ffield::FieldOps::random(&*f, &mut rng)).collect();
    let t = Instant::now();
    let mut fast = Vec::new();
    for _ in 0..reps {
        fast = encode(&code, &table, &v)?;
    }
    let enc = t.elapsed().as_secs_f64() / reps as f64;
    let t = Instant::now();
    let mut slow = Vec::new();
    for _ in 0..reps {
        slow = naive_encode(&code, &v)?;
    }
    let naive = t.elapsed().as_secs_f64() / reps as f64;
    if fast != slow {
        return Err(Failure::Runtime("fast and naive encodings differ".into()));
    }
    print_json(&json!({
        "q": c.q, "n": c.n, "k": c.k, "K": c.dim, "N": code.params.len,
        "code_build_s": build,
        "precompute_s": pre,
        "encode_s": enc,
        "naive_encode_s": naive,
        "table_entries": table.entry_count(),
    }));
    Ok(())
}
