//! `cdc`: build, verify and measure cyclic constant-dimension subspace codes.
//!
//! Exit status: 0 when every claim checks out, 2 on a claim mismatch, 3 when
//! a scan exceeds its budget, 4 on bad input.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use cyclic_cdc::channel::{self, ChannelConfig, ChannelError, CODEBOOK_CAP};
use cyclic_cdc::field::factor::prime_power;
use cyclic_cdc::linearized::{
    check_binary_conditions, check_rank_conditions, find_splitting_n, poly_code_distance,
    PolyError, PolySet,
};
use cyclic_cdc::orbit::{
    self, build_union, compare_with_prior, construction_code, criterion_failures, johnson_bound,
    rational_to_f64, sphere_packing_bound, verify_min_distance, CriterionFailure, Mode, OrbitError,
    TableRow, Theorem, UnionCode, DEFAULT_BUDGET,
};
use cyclic_cdc::sidon::{is_sidon, Constructions};
use cyclic_cdc::subspace::Subspace;
use cyclic_cdc::{FieldTower, TowerSpec};

use output::{csv, digest, emit, millis, table, write_manifest, Manifest};

#[derive(Parser, Serialize)]
#[command(
    name = "cdc",
    version,
    about = "Cyclic subspace codes from Sidon spaces and subspace polynomials"
)]
struct Cli {
    /// Worker threads for parallel scans (defaults to all cores).
    #[arg(long, env = "CDC_THREADS", global = true)]
    threads: Option<usize>,
    /// Cap on exhaustive (pair, shift) iterations.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u64,
    /// Where to write the run manifest (stderr if omitted).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Where to write the result (stdout if omitted).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build the union of Sidon-space orbits for n = (2r+1)k or n = 2rk.
    Construct(ConstructArgs),
    /// Check a code file's claimed size and minimum distance.
    Verify(VerifyArgs),
    /// Report Sidon status, linearity and orbit size of each generator.
    SidonCheck(CodeArgs),
    /// Exact sphere-packing and Johnson bounds.
    Bounds(BoundsArgs),
    /// Compare constructed sizes with the previously best known ones.
    Table(TableArgs),
    /// Check subspace polynomials and measure the code they generate.
    Poly(PolyArgs),
    /// Send codewords through an erasure/insertion channel and decode.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ParityArg {
    Odd,
    Even,
}

#[derive(clap::Args, Serialize)]
struct ConstructArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u32,
    #[arg(long, required_unless_present = "subfield")]
    r: Option<u32>,
    #[arg(
        long,
        value_enum,
        required_unless_present = "subfield",
        conflicts_with = "subfield"
    )]
    parity: Option<ParityArg>,
    /// Instead build the single orbit of GF(q^k) inside GF(q^(kT)).
    #[arg(long, value_name = "T", conflicts_with = "r")]
    subfield: Option<u32>,
    /// Refuse to materialize more generators than this.
    #[arg(long, default_value_t = 1 << 20)]
    max_generators: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Exact,
    Criterion,
}

#[derive(clap::Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum, default_value = "criterion")]
    mode: ModeArg,
}

#[derive(clap::Args, Serialize)]
struct CodeArgs {
    #[arg(long)]
    code: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(clap::Args, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Minimum distance, an even number in 2..=2k.
    #[arg(long)]
    d: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RowArg {
    Odd,
    Even,
    FiveK,
}

#[derive(clap::Args, Serialize)]
struct TableArgs {
    /// Rows to evaluate; repeat for several.
    #[arg(long, value_enum, required = true)]
    row: Vec<RowArg>,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u32,
    /// Ignored by the n = 5k row, which has r = 2.
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(clap::Args, Serialize)]
struct PolyArgs {
    #[arg(long)]
    file: PathBuf,
    /// Degree N of the working field; found by search if omitted.
    #[arg(long = "big-n")]
    big_n: Option<u32>,
    /// Overrides the file's s.
    #[arg(long)]
    s: Option<usize>,
    /// Largest multiple of n tried when searching for N.
    #[arg(long, default_value_t = 16)]
    max_multiple: u32,
}

#[derive(clap::Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, default_value_t = 0)]
    erasures: usize,
    #[arg(long, default_value_t = 0)]
    insertions: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use only the first this many generators as the codebook.
    #[arg(long)]
    orbits: Option<usize>,
}

enum Failure {
    Infeasible(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 3,
            Failure::Input(_) => 4,
        }
    }
}

impl From<OrbitError> for Failure {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::CodebookTooLarge { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// What a command produced: the result bytes, whether every claim held,
/// and details for the manifest.
struct Run {
    body: Vec<u8>,
    ok: bool,
    tower: Option<TowerSpec>,
    timings: Vec<(String, u128)>,
}

impl Run {
    fn json(value: &Value, ok: bool, tower: Option<TowerSpec>) -> Self {
        let mut body = serde_json::to_vec_pretty(value).expect("json value");
        body.push(b'\n');
        Run {
            body,
            ok,
            tower,
            timings: Vec::new(),
        }
    }

    fn text(body: String, tower: Option<TowerSpec>) -> Self {
        Run {
            body: body.into_bytes(),
            ok: true,
            tower,
            timings: Vec::new(),
        }
    }
}

fn tower_for(q: u64, k: u32, t: u32) -> Result<FieldTower, Failure> {
    let (p, a) =
        prime_power(q).ok_or_else(|| Failure::Input(format!("q = {q} is not a prime power")))?;
    FieldTower::build(p as u32, a, k, t).map_err(input)
}

fn load_code(path: &Path) -> Result<UnionCode, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(UnionCode::from_json(value)?)
}

fn construct(args: &ConstructArgs) -> Result<Run, Failure> {
    if let Some(t) = args.subfield {
        if t < 2 {
            return Err(Failure::Input("--subfield needs T >= 2".into()));
        }
        let tower = Arc::new(tower_for(args.q, args.k, t)?);
        let basis: Vec<_> = (0..args.k as u64)
            .map(|i| tower.top().constant(tower.xi_pow(i)))
            .collect();
        let g = Subspace::span(&tower, &basis);
        let spec = tower.spec();
        let code = build_union(
            tower,
            vec![g],
            format!("subfield q={} k={} t={t}", args.q, args.k),
        )?;
        return Ok(Run::json(&code.to_json(), true, Some(spec)));
    }
    let r = args.r.expect("required by clap");
    let t = match args.parity.expect("required by clap") {
        ParityArg::Odd => 2 * r + 1,
        ParityArg::Even => 2 * r,
    };
    let tower = Arc::new(tower_for(args.q, args.k, t)?);
    let count = Constructions::new(&tower).map_err(input)?.count();
    if count > BigUint::from(args.max_generators) {
        return Err(Failure::Infeasible(format!(
            "{count} generators exceed --max-generators {}",
            args.max_generators
        )));
    }
    let spec = tower.spec();
    let code = construction_code(tower)?;
    Ok(Run::json(&code.to_json(), true, Some(spec)))
}

fn describe(f: &CriterionFailure) -> String {
    match f {
        CriterionFailure::NotSidon { generator } => {
            format!("generator {generator} is not a Sidon space")
        }
        CriterionFailure::SharedQuotient { first, second } => {
            format!("generators {first} and {second} share a quotient of points")
        }
    }
}

fn verify(args: &VerifyArgs, budget: u64) -> Result<Run, Failure> {
    let code = load_code(&args.code)?;
    let mode = match args.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Criterion => Mode::Criterion,
    };
    let start = Instant::now();
    let sum = code.orbit_size_sum();
    let size_time = millis(start.elapsed());
    let start = Instant::now();
    let v = verify_min_distance(&code, mode, budget)?;
    let distance_time = millis(start.elapsed());
    for f in &v.criterion_failures {
        eprintln!("criterion: {}", describe(f));
    }
    let verified_size = v.disjoint.then(|| sum.clone());
    let size_ok = verified_size.as_ref() == Some(&code.claimed_size);
    let distance_ok = v.min_distance == Some(code.claimed_min_distance);
    if !size_ok {
        eprintln!(
            "size mismatch: claimed {}, orbits sum to {sum}, disjoint = {}",
            code.claimed_size, v.disjoint
        );
    }
    if !distance_ok {
        eprintln!(
            "distance mismatch: claimed {}, found {:?}",
            code.claimed_min_distance, v.min_distance
        );
    }
    let report = json!({
        "provenance": code.provenance,
        "generators": code.generators.len(),
        "claimed_size": code.claimed_size.to_string(),
        "orbit_size_sum": sum.to_string(),
        "verified_size": verified_size.map(|s| s.to_string()),
        "claimed_min_distance": code.claimed_min_distance,
        "min_distance": v.min_distance,
        "mode": v.mode,
        "iterations": v.iterations,
        "disjoint": v.disjoint,
        "collisions": v.collisions,
        "criterion_failures": v.criterion_failures,
        "size_ok": size_ok,
        "distance_ok": distance_ok,
    });
    let mut run = Run::json(&report, size_ok && distance_ok, Some(code.tower.spec()));
    run.timings = vec![
        ("size".into(), size_time),
        ("distance".into(), distance_time),
    ];
    Ok(run)
}

fn sidon_check(args: &CodeArgs) -> Result<Run, Failure> {
    let code = load_code(&args.code)?;
    let tower = &code.tower;
    let per: Vec<Value> = code
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            json!({
                "index": i,
                "dim": g.dim(),
                "sidon": is_sidon(tower, g),
                "linearity_field": g.linearity_field(tower),
                "orbit_size": g.orbit_size(tower).to_string(),
            })
        })
        .collect();
    let failures = criterion_failures(&code);
    for f in &failures {
        eprintln!("{}", describe(f));
    }
    let report = json!({ "generators": per, "failures": failures });
    Ok(Run::json(&report, failures.is_empty(), Some(tower.spec())))
}

fn render(
    format: Format,
    header: &[&str],
    rows: &[Vec<String>],
    json: &Value,
    tower: Option<TowerSpec>,
) -> Run {
    match format {
        Format::Json => Run::json(json, true, tower),
        Format::Csv => Run::text(csv(header, rows), tower),
        Format::Pretty => Run::text(table(header, rows), tower),
    }
}

fn rational_string(x: &num_rational::BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn bounds(args: &BoundsArgs) -> Result<Run, Failure> {
    let (q, n, k, d) = (args.q, args.n, args.k, args.d);
    if prime_power(q).is_none() {
        return Err(Failure::Input(format!("q = {q} is not a prime power")));
    }
    if d < 2 || d % 2 == 1 || d > 2 * k || k > n {
        return Err(Failure::Input(
            "need an even d with 2 <= d <= 2k and k <= n".into(),
        ));
    }
    let sp = sphere_packing_bound(q, n, k, d / 2 - 1)?;
    let jb = johnson_bound(q, n, k, d / 2)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (name, b) in [("sphere-packing", &sp), ("johnson", &jb)] {
        let floor = b.floor().to_integer().to_string();
        rows.push(vec![
            name.to_string(),
            n.to_string(),
            k.to_string(),
            d.to_string(),
            rational_string(b),
            floor.clone(),
            format!("{:.6e}", rational_to_f64(b)),
        ]);
        entries.push(json!({
            "bound": name,
            "exact": rational_string(b),
            "floor": floor,
            "approx": rational_to_f64(b),
        }));
    }
    let mut value = json!({ "q": q, "n": n, "k": k, "d": d, "bounds": entries });
    if n == 4 * k && d + 2 == 2 * k {
        let size = orbit::theorem_size(Theorem::EvenUnion, q, k, 2)?;
        let ratio = orbit::ratio_to_bound(q, k)?;
        value["even_union_size"] = json!(size.to_string());
        value["ratio_to_bound"] = json!(rational_string(&ratio));
        value["ratio_approx"] = json!(rational_to_f64(&ratio));
        value["rate"] = json!(orbit::rate(&size, q, n, k));
    }
    let header = ["bound", "n", "k", "d", "exact", "floor", "approx"];
    Ok(render(args.format, &header, &rows, &value, None))
}

fn table_cmd(args: &TableArgs) -> Result<Run, Failure> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for row in &args.row {
        let (row, r) = match row {
            RowArg::Odd => (TableRow::Odd, args.r),
            RowArg::Even => (TableRow::Even, args.r),
            RowArg::FiveK => (TableRow::FiveK, 2),
        };
        let c = compare_with_prior(row, args.q, args.k, r)?;
        let label = serde_json::to_value(c.row)
            .expect("row")
            .as_str()
            .unwrap_or_default()
            .to_string();
        rows.push(vec![
            label,
            c.q.to_string(),
            c.k.to_string(),
            c.r.to_string(),
            c.n.to_string(),
            c.ours.to_string(),
            c.known.to_string(),
            c.difference.to_string(),
            format!("{:.3}", c.rate_ours),
            format!("{:.3}", c.rate_known),
        ]);
        records.push(c);
    }
    let header = [
        "row",
        "q",
        "k",
        "r",
        "n",
        "ours",
        "known",
        "difference",
        "rate_ours",
        "rate_known",
    ];
    let value = serde_json::to_value(&records).expect("records");
    Ok(render(args.format, &header, &rows, &value, None))
}

fn poly(args: &PolyArgs, budget: u64) -> Result<Run, Failure> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.file.display())))?;
    let set: PolySet = serde_json::from_str(&text).map_err(input)?;
    let s = args.s.unwrap_or(set.s);
    if s < 1 || s + 2 > set.k {
        return Err(Failure::Input(format!(
            "need 1 <= s < k - 1, got s = {s} with k = {}",
            set.k
        )));
    }
    let template = tower_for(set.q as u64, set.n, 1)?;
    let big_n = match args.big_n {
        Some(n) if n % set.n == 0 && n > 0 => n,
        Some(n) => {
            return Err(Failure::Input(format!(
                "N = {n} is not a multiple of n = {}",
                set.n
            )))
        }
        None => {
            let mut lcm = set.n;
            for p in set.resolve(&template)? {
                let (n, _) = find_splitting_n(&template, &p, args.max_multiple)?;
                lcm = num_integer::lcm(lcm, n);
            }
            lcm
        }
    };
    let tower = tower_for(set.q as u64, set.n, big_n / set.n)?;
    let polys = set.resolve(&tower)?;
    let start = Instant::now();
    let verdict = check_rank_conditions(&tower, &polys, s, budget)?;
    let binary = if tower.q() == 2 {
        Some(check_binary_conditions(&tower, &polys, s, budget)?)
    } else {
        None
    };
    let check_time = millis(start.elapsed());
    let start = Instant::now();
    let report = poly_code_distance(&tower, &polys, budget)?;
    let distance_time = millis(start.elapsed());
    let q = BigUint::from(tower.q());
    let expected_size = BigUint::from(polys.len()) * (q.pow(big_n) - 1u32) / (q - 1u32);
    let bound = 2 * set.k - 2 * s;
    let conclusion = report.size == expected_size
        && report.disjoint
        && report.min_distance.is_some_and(|d| d >= bound);
    if let Some(w) = &verdict.rank_witness {
        eprintln!(
            "rank condition fails for (i, j) = ({}, {}) at alpha = {:?}: rank {}",
            w.i, w.j, w.alpha, w.rank
        );
    }
    if let Some((i, j)) = verdict.coefficient_witness {
        eprintln!("coefficient condition fails for (i, j) = ({i}, {j})");
    }
    let value = json!({
        "q": set.q,
        "n": set.n,
        "k": set.k,
        "s": s,
        "big_n": big_n,
        "polynomials": polys.len(),
        "conditions": verdict,
        "binary_conditions": binary,
        "size": report.size.to_string(),
        "expected_size": expected_size.to_string(),
        "min_distance": report.min_distance,
        "distance_bound": bound,
        "disjoint": report.disjoint,
        "conclusion_holds": conclusion,
    });
    let ok = verdict.passed() && conclusion;
    let mut run = Run::json(&value, ok, Some(tower.spec()));
    run.timings = vec![
        ("conditions".into(), check_time),
        ("distance".into(), distance_time),
    ];
    Ok(run)
}

fn simulate(args: &SimulateArgs, budget: u64) -> Result<Run, Failure> {
    let code = load_code(&args.code)?;
    let take = args
        .orbits
        .unwrap_or(code.generators.len())
        .min(code.generators.len());
    if take == 0 {
        return Err(Failure::Input("--orbits must be positive".into()));
    }
    let sub = build_union(
        code.tower.clone(),
        code.generators[..take].to_vec(),
        code.provenance.clone(),
    )?;
    let v = verify_min_distance(&sub, Mode::Criterion, budget)?;
    let d = v
        .min_distance
        .ok_or_else(|| Failure::Input("codebook has a single word".into()))?;
    let book = channel::materialize(&code.tower, &sub.generators, CODEBOOK_CAP)?;
    let cfg = ChannelConfig {
        erasures: args.erasures,
        insertions: args.insertions,
        trials: args.trials,
        seed: args.seed,
    };
    let start = Instant::now();
    let report = channel::simulate(&code.tower, &book, d, &cfg)?;
    let sim_time = millis(start.elapsed());
    let ok = !report.guarantee_active || report.successes == report.trials;
    let mut run = Run::json(
        &serde_json::to_value(&report).expect("report"),
        ok,
        Some(code.tower.spec()),
    );
    run.timings = vec![("simulate".into(), sim_time)];
    Ok(run)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct(_) => "construct",
        Command::Verify(_) => "verify",
        Command::SidonCheck(_) => "sidon-check",
        Command::Bounds(_) => "bounds",
        Command::Table(_) => "table",
        Command::Poly(_) => "poly",
        Command::Simulate(_) => "simulate",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let start = Instant::now();
    let result = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a, cli.budget),
        Command::SidonCheck(a) => sidon_check(a),
        Command::Bounds(a) => bounds(a),
        Command::Table(a) => table_cmd(a),
        Command::Poly(a) => poly(a, cli.budget),
        Command::Simulate(a) => simulate(a, cli.budget),
    };
    let run = match result {
        Ok(run) => run,
        Err(f) => {
            let (Failure::Infeasible(m) | Failure::Input(m)) = &f;
            eprintln!("error: {m}");
            return ExitCode::from(f.code());
        }
    };
    if let Err(e) = emit(cli.out.as_deref(), &run.body) {
        eprintln!("error: cannot write result: {e}");
        return ExitCode::from(4);
    }
    let manifest = Manifest {
        command: command_name(&cli.command).to_string(),
        params: serde_json::to_value(&cli).expect("arguments serialize"),
        tower: run.tower,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: millis(start.elapsed()),
        timings_ms: run.timings,
        result_sha256: digest(&run.body),
    };
    if let Err(e) = write_manifest(cli.manifest.as_deref(), &manifest) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(4);
    }
    if run.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
