use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use stabforge::checks::{self, CheckConfig, Status};
use stabforge::group::{annihilator, enumerate_subgroups_within};
use stabforge::phase_space::PhasePoint;
use stabforge::quadratic::sym_count;
use stabforge::random::random_non_stabilizer;
use stabforge::serial::{self, DensityJson, StabilizerGroupJson, WaveFunctionJson};
use stabforge::stabilizer::{
    count_states, enumerate_states, group_from_sstate, is_sstate, sstate_from_group, sstate_synthesize,
    verify_stabilized, StabilizerGroup,
};
use stabforge::wehrl::{berezin_lieb, fourier_husimi, verify_max_bound, verify_min_bound, ConcaveFn};
use stabforge::weyl::{DensityOperator, WaveFunction};
use stabforge::{Error, Group};

#[derive(Parser, Debug)]
#[command(name = "stabforge", version, about = "Stabilizer states and Wehrl-entropy bounds on finite Abelian groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Floating-point tolerance for state recognition.
    #[arg(long, default_value_t = 1e-9, global = true)]
    tolerance: f64,
    /// Largest group order accepted by exhaustive enumerations.
    #[arg(long, default_value_t = stabforge::group::DEFAULT_ENUMERATION_BOUND, global = true)]
    bound: u64,
    /// Seed for randomized suites and sweeps.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the subgroups of a group with annihilators, #Sym(H) and #Ch₂(H).
    Subgroups {
        #[arg(long)]
        group: String,
    },
    /// Count or enumerate the stabilizer states of a group.
    States {
        #[arg(long)]
        group: String,
        #[arg(value_enum, default_value_t = StatesMode::Count)]
        mode: StatesMode,
    },
    /// Convert between stabilizer states and stabilizer groups.
    Stab {
        #[arg(value_enum)]
        direction: Direction,
        /// Wave-function JSON (to-group) or stabilizer-group JSON (to-state).
        input: PathBuf,
    },
    /// Wehrl-entropy reports.
    Wehrl {
        #[command(subcommand)]
        report: WehrlCommand,
    },
    /// Run the invariant suites on a list of groups.
    Selftest {
        #[arg(default_values_t = ["Z2".to_string(), "Z3".to_string(), "Z4".to_string(), "Z2xZ2".to_string()])]
        groups: Vec<String>,
        /// Random cases per randomized suite.
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StatesMode {
    Count,
    Enumerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    ToGroup,
    ToState,
}

#[derive(clap::Args, Debug)]
struct PairArgs {
    /// Window state `φ` (wave-function JSON).
    #[arg(long)]
    window: PathBuf,
    /// Pure state `ψ` giving `ρ = |ψ⟩⟨ψ|`.
    #[arg(long, conflicts_with = "density")]
    state: Option<PathBuf>,
    /// Density matrix JSON.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Concave function: entropy, quadratic, sine or an expression in t.
    #[arg(long = "g", default_value = "entropy")]
    g: String,
}

#[derive(Subcommand, Debug)]
enum WehrlCommand {
    /// Lower bound `E_G ≥ G(1)` with the equality witness.
    Min(PairArgs),
    /// Upper bound `E_G ≤ N·G(1/N)` and the support-overlap criterion.
    Max(PairArgs),
    /// Berezin–Lieb inequality `E_G ≥ Tr G(ρ)`.
    Berezin(PairArgs),
    /// Fourier transform of the Husimi function versus characteristic functions.
    Fourier(PairArgs),
    /// Entropy of every stabilizer window and of random states.
    Sweep {
        #[arg(long)]
        group: String,
        /// Concave functions to evaluate (repeatable); defaults to the built-ins.
        #[arg(long = "g")]
        g: Vec<String>,
        /// Number of random non-stabilizer states.
        #[arg(long, default_value_t = 10)]
        random: usize,
    },
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BoundExceeded { .. } => 3,
            Error::NotStabilizerState => 4,
            Error::NotStabilizerGroup(_)
            | Error::NotIsotropic(_)
            | Error::NotSubgroup(_)
            | Error::WrongCardinality { .. }
            | Error::NotACharacter(_)
            | Error::NotSecondDegree(_) => 5,
            Error::TheoryViolation(_) => 6,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(2, e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

struct Ctx {
    format: Format,
    tolerance: f64,
    bound: u64,
    seed: u64,
    out: Box<dyn Write>,
}

impl Ctx {
    fn line(&mut self, text: impl AsRef<str>) -> CliResult<()> {
        writeln!(self.out, "{}", text.as_ref())?;
        Ok(())
    }

    fn json(&mut self, value: &Value) -> CliResult<()> {
        self.line(value.to_string())
    }
}

fn parse_group(spec: &str) -> CliResult<Group> {
    Ok(spec.parse::<Group>()?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> CliResult<WaveFunction> {
    Ok(serial::wavefunction_from_json(&read_json::<WaveFunctionJson>(path)?)?)
}

fn point_text(p: &PhasePoint) -> String {
    p.to_string()
}

fn cmd_subgroups(ctx: &mut Ctx, spec: &str) -> CliResult<()> {
    let group = parse_group(spec)?;
    let subs = enumerate_subgroups_within(&group, ctx.bound)?;
    let rows: Vec<(usize, String, usize, u64, u64)> = subs
        .iter()
        .map(|h| {
            let gens = h.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ");
            let sym = sym_count(h);
            (h.len(), gens, annihilator(h).len(), sym, h.len() as u64 * sym)
        })
        .collect();
    match ctx.format {
        Format::Human => {
            ctx.line(format!("{:>5} {:>6} {:>8} {:>6} {:>7}  generators", "index", "order", "#ann", "#Sym", "#Ch2"))?;
            for (i, (order, gens, ann, sym, ch2)) in rows.iter().enumerate() {
                ctx.line(format!("{i:>5} {order:>6} {ann:>8} {sym:>6} {ch2:>7}  {gens}"))?;
            }
        }
        Format::Json => {
            let list: Vec<Value> = rows
                .iter()
                .zip(&subs)
                .map(|((order, _, ann, sym, ch2), h)| {
                    json!({
                        "order": order,
                        "generators": h.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                        "elements": h.element_list().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                        "annihilator_order": ann,
                        "sym": sym,
                        "ch2": ch2,
                    })
                })
                .collect();
            ctx.json(&json!({ "group": group.to_string(), "subgroups": list }))?;
        }
        Format::Csv => {
            ctx.line("index,order,annihilator_order,sym,ch2,generators")?;
            for (i, (order, gens, ann, sym, ch2)) in rows.iter().enumerate() {
                ctx.line(format!("{i},{order},{ann},{sym},{ch2},\"{gens}\""))?;
            }
        }
    }
    Ok(())
}

fn cmd_states(ctx: &mut Ctx, spec: &str, mode: StatesMode) -> CliResult<()> {
    let group = parse_group(spec)?;
    match mode {
        StatesMode::Count => {
            let n = count_states(&group, ctx.bound)?;
            match ctx.format {
                Format::Json => ctx.json(&json!({ "group": group.to_string(), "count": n })),
                Format::Csv => {
                    ctx.line("group,count")?;
                    ctx.line(format!("{group},{n}"))
                }
                Format::Human => ctx.line(n.to_string()),
            }
        }
        StatesMode::Enumerate => {
            for entry in enumerate_states(&group, ctx.bound)? {
                let record = serde_json::to_value(serial::state_record(&entry)).expect("serializable");
                ctx.json(&record)?;
            }
            Ok(())
        }
    }
}

fn emit_group(ctx: &mut Ctx, g: &StabilizerGroup, extra: Value) -> CliResult<()> {
    let mut v = serde_json::to_value(serial::stabilizer_to_json(g)).expect("serializable");
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    match ctx.format {
        Format::Human => {
            let group = g.group();
            ctx.line(format!("stabilizer group on {group} ({} elements)", g.isotropic().len()))?;
            for (&p, a) in g.isotropic().points().iter().zip(g.alpha()) {
                ctx.line(format!("  {}  alpha = zeta^{}", group.point(p), a.exponent()))?;
            }
            Ok(())
        }
        _ => ctx.json(&v),
    }
}

fn cmd_stab(ctx: &mut Ctx, direction: Direction, input: &Path) -> CliResult<()> {
    match direction {
        Direction::ToGroup => {
            let phi = read_state(input)?.normalized()?;
            let desc = is_sstate(&phi, ctx.tolerance)?.ok_or(Error::NotStabilizerState)?;
            let g = group_from_sstate(&desc);
            if !verify_stabilized(&g, &phi)? {
                return Err(Error::TheoryViolation("recovered group does not stabilize the input".into()).into());
            }
            let moduli = serde_json::to_value(serial::moduli_to_json(&desc.moduli())).expect("serializable");
            emit_group(ctx, &g, json!({ "moduli": moduli }))
        }
        Direction::ToState => {
            let g = serial::stabilizer_from_json(&read_json::<StabilizerGroupJson>(input)?)?;
            let desc = sstate_from_group(&g)?;
            let phi = sstate_synthesize(&desc);
            if !verify_stabilized(&g, &phi)? {
                return Err(Error::TheoryViolation("synthesized state is not stabilized".into()).into());
            }
            let json = serial::wavefunction_to_json(&phi);
            match ctx.format {
                Format::Human => {
                    ctx.line(format!("stabilizer state on {}", phi.group()))?;
                    for (y, a) in phi.amplitudes().iter().enumerate() {
                        ctx.line(format!("  {}  {:+.12} {:+.12}i", phi.group().format_index(y), a.re, a.im))?;
                    }
                    Ok(())
                }
                _ => {
                    let moduli = serial::moduli_to_json(&desc.moduli());
                    ctx.json(&json!({ "moduli": moduli, "wavefunction": json }))
                }
            }
        }
    }
}

fn load_pair(args: &PairArgs) -> CliResult<(WaveFunction, DensityOperator, ConcaveFn)> {
    let phi = read_state(&args.window)?.normalized()?;
    let rho = match (&args.state, &args.density) {
        (Some(path), None) => DensityOperator::pure(&read_state(path)?.normalized()?)?,
        (None, Some(path)) => serial::density_from_json(&read_json::<DensityJson>(path)?)?,
        _ => return Err(Failure::new(2, "exactly one of --state or --density is required")),
    };
    let g = ConcaveFn::parse(&args.g)?;
    Ok((phi, rho, g))
}

fn emit_report(ctx: &mut Ctx, value: Value) -> CliResult<()> {
    match ctx.format {
        Format::Human => {
            if let Value::Object(map) = &value {
                for (k, v) in map {
                    ctx.line(format!("{k:<16} {v}"))?;
                }
            }
            Ok(())
        }
        Format::Csv => {
            if let Value::Object(map) = &value {
                let scalars: Vec<(&String, &Value)> =
                    map.iter().filter(|(_, v)| !v.is_object() && !v.is_array()).collect();
                ctx.line(scalars.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join(","))?;
                ctx.line(scalars.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>().join(","))?;
            }
            Ok(())
        }
        Format::Json => ctx.json(&value),
    }
}

fn cmd_wehrl(ctx: &mut Ctx, report: &WehrlCommand) -> CliResult<()> {
    match report {
        WehrlCommand::Min(args) => {
            let (phi, rho, g) = load_pair(args)?;
            let r = verify_min_bound(&g, &phi, &rho)?;
            let witness = r.witness.as_ref().map(|w| {
                json!({
                    "theta": w.theta,
                    "z": point_text(&w.z),
                    "support": w.support.iter().map(point_text).collect::<Vec<_>>(),
                    "support_size": w.support_size,
                })
            });
            emit_report(
                ctx,
                json!({ "entropy": r.entropy, "bound": r.bound + 0.0, "equality": r.equality, "witness": witness }),
            )
        }
        WehrlCommand::Max(args) => {
            let (phi, rho, g) = load_pair(args)?;
            let r = verify_max_bound(&g, &phi, &rho)?;
            emit_report(
                ctx,
                json!({
                    "entropy": r.entropy,
                    "bound": r.bound,
                    "equality": r.equality,
                    "overlap_trivial": r.overlap_trivial,
                    "support_overlap": r.support_overlap.iter().map(point_text).collect::<Vec<_>>(),
                }),
            )
        }
        WehrlCommand::Berezin(args) => {
            let (phi, rho, g) = load_pair(args)?;
            let r = berezin_lieb(&g, &phi, &rho)?;
            let shifts = r.shifts.as_ref().map(|s| {
                s.iter()
                    .map(|m| json!({ "weight": m.weight, "theta": m.theta, "z": point_text(&m.z) }))
                    .collect::<Vec<_>>()
            });
            emit_report(
                ctx,
                json!({
                    "entropy": r.entropy,
                    "trace_g": r.trace_g,
                    "gap": r.gap,
                    "equality": r.equality,
                    "shifts": shifts,
                }),
            )
        }
        WehrlCommand::Fourier(args) => {
            let (phi, rho, _) = load_pair(args)?;
            let r = fourier_husimi(&phi, &rho)?;
            let lhs: Vec<[f64; 2]> = r.lhs.iter().map(|c| [c.re, c.im]).collect();
            let rhs: Vec<[f64; 2]> = r.rhs.iter().map(|c| [c.re, c.im]).collect();
            emit_report(ctx, json!({ "residual": r.residual, "lhs": lhs, "rhs": rhs }))
        }
        WehrlCommand::Sweep { group, g, random } => {
            let group = parse_group(group)?;
            let gs: Vec<ConcaveFn> = if g.is_empty() {
                ConcaveFn::builtins()
            } else {
                g.iter().map(|s| ConcaveFn::parse(s)).collect::<stabforge::Result<_>>()?
            };
            let mut windows: Vec<(String, WaveFunction)> = enumerate_states(&group, ctx.bound)?
                .iter()
                .enumerate()
                .map(|(i, e)| (format!("stab-{i}"), e.wavefunction()))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            for i in 0..*random {
                windows.push((format!("rand-{i}"), random_non_stabilizer(&group, &mut rng)));
            }
            match ctx.format {
                Format::Csv => ctx.line("state-id,G-id,entropy,gap")?,
                Format::Human => ctx.line(format!("{:<10} {:<16} {:>16} {:>16}", "state", "G", "entropy", "gap"))?,
                Format::Json => {}
            }
            for (id, phi) in &windows {
                let rho = DensityOperator::pure(phi)?;
                for gf in &gs {
                    let r = verify_min_bound(gf, phi, &rho)?;
                    let gap = r.entropy - r.bound;
                    match ctx.format {
                        Format::Csv => ctx.line(format!("{id},{},{:.12e},{:.12e}", csv_field(gf.name()), r.entropy, gap))?,
                        Format::Human => ctx.line(format!("{id:<10} {:<16} {:>16.12} {:>16.3e}", gf.name(), r.entropy, gap))?,
                        Format::Json => ctx.json(&json!({
                            "state-id": id, "G-id": gf.name(), "entropy": r.entropy, "gap": gap, "equality": r.equality,
                        }))?,
                    }
                }
            }
            Ok(())
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_selftest(ctx: &mut Ctx, groups: &[String], cases: usize) -> CliResult<bool> {
    let config = CheckConfig {
        bound: ctx.bound,
        seed: ctx.seed,
        random_cases: cases,
        tolerance: ctx.tolerance,
    };
    let mut ok = true;
    let start = std::time::Instant::now();
    for spec in groups {
        let group = parse_group(spec)?;
        for r in checks::run_all(&group, &config) {
            let (tag, detail) = match &r.status {
                Status::Passed(d) => ("PASS", d.clone()),
                Status::Failed(d) => {
                    ok = false;
                    ("FAIL", d.clone())
                }
                Status::Skipped(d) => ("SKIP", d.clone()),
            };
            match ctx.format {
                Format::Json => ctx.json(&json!({ "group": r.group, "suite": r.suite, "status": tag, "detail": detail }))?,
                Format::Csv => ctx.line(format!("{},{},{tag},{}", r.group, r.suite, csv_field(&detail)))?,
                Format::Human => ctx.line(format!(
                    "{tag}  {:<10} {:<15} {:>8.3}s  {detail}",
                    r.group,
                    r.suite,
                    r.elapsed.as_secs_f64()
                ))?,
            }
        }
    }
    if ctx.format == Format::Human {
        let verdict = if ok { "PASS" } else { "FAIL" };
        ctx.line(format!("selftest {verdict} in {:.2}s", start.elapsed().as_secs_f64()))?;
    }
    Ok(ok)
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("STABFORGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    if !(cli.tolerance > 0.0) {
        return Err(Failure::new(2, "--tolerance must be positive"));
    }
    if cli.bound < 1 {
        return Err(Failure::new(2, "--bound must be at least 1"));
    }
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut ctx = Ctx {
        format: cli.format,
        tolerance: cli.tolerance,
        bound: cli.bound,
        seed: cli.seed,
        out,
    };
    let ok = match &cli.command {
        Command::Subgroups { group } => cmd_subgroups(&mut ctx, group).map(|_| true),
        Command::States { group, mode } => cmd_states(&mut ctx, group, *mode).map(|_| true),
        Command::Stab { direction, input } => cmd_stab(&mut ctx, *direction, input).map(|_| true),
        Command::Wehrl { report } => cmd_wehrl(&mut ctx, report).map(|_| true),
        Command::Selftest { groups, cases } => cmd_selftest(&mut ctx, groups, *cases),
    };
    ctx.out.flush()?;
    ok
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
