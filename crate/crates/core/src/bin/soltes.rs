//! Command-line front end.
//!
//! Exit codes: 0 success or verdict holds, 1 verdict fails or search miss,
//! 2 input error, 3 digraph not strongly connected.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use soltes::construct::{
    appendix_c_spec, construct_z_soltes, BackwardMode, ConstructError, ConstructOptions,
    APPENDIX_C_CLAIMED_DEGREES, APPENDIX_C_N,
};
use soltes::digraph::internal_to_label;
use soltes::distance::{all_pairs, is_strongly_connected, BfsScratch, Direction};
use soltes::formulas::{appendix_b_sum, grid_row, AppendixVariant, GridRow, ParamTriple};
use soltes::generate::random_dense;
use soltes::io::{parse_any, write, Format};
use soltes::soltes::{
    circulant_delta, delta_profile_with_progress, is_z_soltes_with, DeltaValue, Verification,
};
use soltes::structure::automorphism_triviality;
use soltes::{
    build_circulant, build_rule_digraph, degree_stats, CirculantSpec, Digraph, SoltesError,
};

/// Smaller runs finish too quickly to need progress lines.
const PROGRESS_MIN_SOURCES: usize = 500;

/// Largest order evaluated per formulas grid point.
const FORMULAS_MAX_N: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "soltes",
    version,
    about = "Exact z-Šoltés digraph verification and search"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "SOLTES_WORKERS", value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    /// Show vertex labels as 1..n, with internal vertex 0 shown as n.
    #[arg(long, global = true)]
    one_based: bool,
    /// Write machine-readable output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// No progress lines on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every vertex deletion lowers W by exactly z.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
        /// symmetric, exhaustive or sample(k); symmetric for circulants by default.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Verification>,
    },
    /// Search for a z-Šoltés circulant with largest difference m.
    Construct {
        #[arg(long, allow_negative_numbers = true)]
        z: i64,
        #[arg(long)]
        m: u64,
        /// Final verification: symmetric or exhaustive.
        #[arg(long, value_parser = parse_mode, default_value = "symmetric")]
        mode: Verification,
        /// Run below the m > max(|z|, 20) guard.
        #[arg(long)]
        force: bool,
        /// JSON-lines stage trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Closed forms against BFS on a grid, or the double-sum trend table.
    Formulas {
        /// m values: `lo..hi`, `a,b,c` or a single value.
        #[arg(long, value_parser = parse_int_set)]
        m: Option<IntSet>,
        /// a values, same syntax as --m.
        #[arg(long, value_parser = parse_int_set, default_value = "2..10")]
        a: IntSet,
        #[arg(long)]
        appendix_b: bool,
    },
    /// Degrees, diameter, connectivity, bipartiteness and colour refinement.
    Analyze {
        #[command(flatten)]
        source: Source,
    },
    /// Delta sign across a family of digraphs, as CSV.
    Sweep {
        #[arg(long, value_enum, default_value_t = Family::Circulant)]
        family: Family,
        /// Difference set for the circulant family.
        #[arg(long, value_delimiter = ',')]
        s: Vec<usize>,
        /// Orders: `lo:hi` or `lo:hi:step`.
        #[arg(long, value_parser = parse_order_range)]
        n: IntSet,
        /// Random instances per order (dense family).
        #[arg(long, default_value_t = 3)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a digraph as an edge list, JSON spec or DOT.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_format)]
        format: Format,
    },
}

#[derive(Args)]
struct Source {
    /// Circulant order.
    #[arg(long)]
    n: Option<usize>,
    /// Circulant difference set, comma separated.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    /// Built-in digraph.
    #[arg(long, value_enum)]
    spec: Option<Named>,
    /// Edge-list or JSON spec file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Backward arcs for the built-in: on, off, or auto (both readings).
    #[arg(long, value_enum, default_value_t = Backward::Auto)]
    backward: Backward,
}

#[derive(Clone, Copy, ValueEnum)]
enum Named {
    AppendixC,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backward {
    On,
    Off,
    Auto,
}

impl From<Backward> for BackwardMode {
    fn from(b: Backward) -> Self {
        match b {
            Backward::On => BackwardMode::On,
            Backward::Off => BackwardMode::Off,
            Backward::Auto => BackwardMode::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Circulant,
    Dense,
}

#[derive(Clone, Debug)]
struct IntSet(Vec<u64>);

fn parse_int_set(text: &str) -> Result<IntSet, String> {
    let num = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("{s:?}: {e}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {text}"));
        }
        return Ok(IntSet((lo..=hi).collect()));
    }
    text.split(',')
        .map(num)
        .collect::<Result<_, _>>()
        .map(IntSet)
}

fn parse_order_range(text: &str) -> Result<IntSet, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("{s:?}: {e}"));
    match parts.as_slice() {
        [single] => parse_int_set(single),
        [lo, hi] | [lo, hi, _] => {
            let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
            let (lo, hi) = (num(lo)?, num(hi)?);
            if step == 0 || lo > hi {
                return Err(format!("bad range {text}"));
            }
            Ok(IntSet((lo..=hi).step_by(step as usize).collect()))
        }
        _ => Err(format!("bad range {text}")),
    }
}

fn parse_mode(text: &str) -> Result<Verification, String> {
    match text {
        "symmetric" => Ok(Verification::Symmetric),
        "exhaustive" => Ok(Verification::Exhaustive),
        _ => {
            let k = text
                .strip_prefix("sample(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| text.strip_prefix("sample:"))
                .ok_or_else(|| {
                    format!("unknown mode {text:?}; use symmetric, exhaustive or sample(k)")
                })?;
            match k.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Verification::Sample(k)),
                _ => Err(format!("bad sample size in {text:?}")),
            }
        }
    }
}

fn parse_format(text: &str) -> Result<Format, String> {
    text.parse().map_err(|e: SoltesError| e.to_string())
}

enum Failure {
    Input(String),
    Connectivity(String),
}

impl From<SoltesError> for Failure {
    fn from(e: SoltesError) -> Self {
        match e {
            SoltesError::NotStronglyConnected => Failure::Connectivity(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult = Result<ExitCode, Failure>;

struct Ctx {
    one_based: bool,
    output: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn label(&self, v: usize, n: usize) -> usize {
        if self.one_based {
            internal_to_label(v, n)
        } else {
            v
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json(&self, value: &Value) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).expect("json serializes");
        text.push('\n');
        self.emit(&text)
    }

    fn progress(&self, what: &'static str) -> impl Fn(usize, usize) + Sync {
        let quiet = self.quiet;
        move |done, total| {
            if !quiet && total >= PROGRESS_MIN_SOURCES {
                eprintln!("{what}: {done}/{total} sources");
            }
        }
    }
}

fn verdict_code(holds: bool) -> ExitCode {
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// A loaded digraph; `backward` is set for the built-in readings.
struct Loaded {
    name: String,
    backward: Option<bool>,
    digraph: Digraph,
}

fn load(source: &Source) -> Result<Vec<Loaded>, Failure> {
    let given = [
        source.n.is_some(),
        source.spec.is_some(),
        source.file.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Failure::Input(
            "give exactly one of --n/--s, --spec or --file".into(),
        ));
    }
    if let Some(n) = source.n {
        let spec = CirculantSpec::new(n, source.s.iter().copied())?;
        return Ok(vec![Loaded {
            name: format!("D({n},{:?})", spec.differences()),
            backward: None,
            digraph: build_circulant(&spec),
        }]);
    }
    if !source.s.is_empty() {
        return Err(Failure::Input("--s needs --n".into()));
    }
    if let Some(path) = &source.file {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        return Ok(vec![Loaded {
            name: path.display().to_string(),
            backward: None,
            digraph: parse_any(&text)?,
        }]);
    }
    Ok(BackwardMode::from(source.backward)
        .readings()
        .into_iter()
        .map(|b| Loaded {
            name: "appendix-c".into(),
            backward: Some(b),
            digraph: build_rule_digraph(&appendix_c_spec(b)),
        })
        .collect())
}

fn cmd_verify(ctx: &Ctx, source: &Source, z: i64, mode: Option<Verification>) -> CliResult {
    let loaded = load(source)?;
    let progress = ctx.progress("verify");
    let mut reports = Vec::new();
    let mut holds_any = false;
    let mut resolved = None;
    for item in &loaded {
        let d = &item.digraph;
        let mode = mode.unwrap_or(if d.as_circulant().is_some() {
            Verification::Symmetric
        } else {
            Verification::Exhaustive
        });
        if item.backward.is_some() && !is_strongly_connected(d) {
            reports.push(json!({"include_backward": item.backward, "strongly_connected": false}));
            continue;
        }
        let v = is_z_soltes_with(d, z, mode, Some(&progress))?;
        if v.holds && !holds_any {
            resolved = item.backward;
        }
        holds_any |= v.holds;
        let constant = v.disconnected == 0 && v.min_delta.is_some() && v.min_delta == v.max_delta;
        let mut report = json!({
            "digraph": item.name,
            "order": d.order(),
            "arcs": d.arc_count(),
            "z": z,
            "mode": v.mode,
            "holds": v.holds,
            "wiener": v.wiener,
            "vertices_checked": v.vertices_checked,
            "min_delta": v.min_delta,
            "max_delta": v.max_delta,
            "constant": constant,
            "disconnected": v.disconnected,
            "witness": v.witness.map(|w| ctx.label(w, d.n())),
            "witness_delta": v.witness_delta,
        });
        if let Some(h) = v.histogram {
            report["delta_histogram"] = h;
        }
        if let Some(b) = item.backward {
            report["include_backward"] = json!(b);
            report["strongly_connected"] = json!(true);
        }
        reports.push(report);
    }
    if loaded.iter().any(|l| l.backward.is_some()) {
        ctx.emit_json(&json!({
            "digraph": "appendix-c",
            "n": APPENDIX_C_N,
            "z": z,
            "holds": holds_any,
            "resolved_include_backward": resolved,
            "interpretations": reports,
        }))?;
    } else {
        ctx.emit_json(&reports.remove(0))?;
    }
    Ok(verdict_code(holds_any))
}

fn cmd_construct(
    ctx: &Ctx,
    z: i64,
    m: u64,
    mode: Verification,
    force: bool,
    trace_path: Option<&PathBuf>,
) -> CliResult {
    if matches!(mode, Verification::Sample(_)) {
        return Err(Failure::Input(
            "construct supports symmetric or exhaustive".into(),
        ));
    }
    let progress = ctx.progress("construct");
    let opts = ConstructOptions {
        force,
        verification: mode,
        progress: Some(&progress),
    };
    let write_trace = |text: &str| -> Result<(), Failure> {
        match trace_path {
            Some(p) => {
                fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
            }
            None => Ok(()),
        }
    };
    match construct_z_soltes(z, m, opts) {
        Ok((cert, trace)) => {
            write_trace(&trace.to_json_lines())?;
            ctx.emit_json(&serde_json::to_value(&cert).expect("certificate serializes"))?;
            Ok(ExitCode::SUCCESS)
        }
        Err(failure) => {
            let text = failure.trace.to_json_lines();
            write_trace(&text)?;
            if trace_path.is_none() {
                eprint!("{text}");
            }
            match failure.error {
                ConstructError::Guard { .. } => Err(Failure::Input(failure.error.to_string())),
                ConstructError::Graph(e) => Err(e.into()),
                other => {
                    eprintln!("search miss: {other}");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn cmd_formulas(ctx: &Ctx, m: Option<IntSet>, a: IntSet, appendix_b: bool) -> CliResult {
    if appendix_b {
        let ms = m.unwrap_or(IntSet(vec![10, 20, 40]));
        let mut out = String::from("m,variant,direct,chains_agree,leading_ratio,limit\n");
        for &m in &ms.0 {
            for variant in [AppendixVariant::REqM, AppendixVariant::REq0] {
                let sum = appendix_b_sum(m, variant)?;
                let name = match variant {
                    AppendixVariant::REqM => "r=m",
                    AppendixVariant::REq0 => "r=0",
                };
                out.push_str(&format!(
                    "{m},{name},{},{},{:.6},{:.6}\n",
                    sum.direct,
                    sum.consistent(),
                    sum.leading_ratio(),
                    variant.limit_ratio()
                ));
            }
        }
        ctx.emit(&out)?;
        return Ok(ExitCode::SUCCESS);
    }
    let ms = m.unwrap_or(IntSet((2..=6).collect()));
    let mut params = Vec::new();
    for &m in &ms.0 {
        for &a in &a.0 {
            for r in 0..=m {
                let p = ParamTriple::new(m, a, r)?;
                if p.n() > FORMULAS_MAX_N {
                    return Err(Failure::Input(format!(
                        "n = {} at (m={m}, a={a}, r={r}) exceeds {FORMULAS_MAX_N}",
                        p.n()
                    )));
                }
                params.push(p);
            }
        }
    }
    let mut out = format!("{}\n", GridRow::HEADER);
    let mut failures = 0;
    for p in params {
        let row = grid_row(p)?;
        if !row.all_ok() {
            failures += 1;
        }
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    ctx.emit(&out)?;
    if failures > 0 {
        eprintln!("{failures} grid rows violate an identity");
    }
    Ok(verdict_code(failures == 0))
}

fn analyze_one(ctx: &Ctx, item: &Loaded) -> Value {
    let d = &item.digraph;
    let connected = is_strongly_connected(d);
    let progress = ctx.progress("analyze");
    let ap = if connected {
        all_pairs(d, Some(&progress)).ok()
    } else {
        None
    };
    let deg = degree_stats(d);
    let triv = automorphism_triviality(d);
    let sizes: Vec<Value> = triv
        .partition
        .size_multiset()
        .into_iter()
        .map(|(size, count)| json!({"size": size, "count": count}))
        .collect();
    let mut report = json!({
        "digraph": item.name,
        "order": d.order(),
        "arcs": d.arc_count(),
        "strongly_connected": connected,
        "wiener": ap.map(|a| a.wiener),
        "diameter": ap.map(|a| a.diameter),
        "degree_stats": deg,
        "bipartite_underlying": soltes::structure::is_bipartite_underlying(d),
        "refinement": {
            "verdict": triv.verdict,
            "classes": triv.partition.classes.len(),
            "rounds": triv.partition.rounds,
            "class_sizes": sizes,
        },
    });
    if let Some(b) = item.backward {
        let c = APPENDIX_C_CLAIMED_DEGREES;
        report["include_backward"] = json!(b);
        report["claimed_degrees"] = json!(c);
        report["degree_claim_matches"] = json!(deg == c);
        report["degree_claim_matches_transposed"] = json!(
            deg.min_out == c.min_in
                && deg.max_out == c.max_in
                && deg.min_in == c.min_out
                && deg.max_in == c.max_out
        );
    }
    report
}

fn cmd_analyze(ctx: &Ctx, source: &Source) -> CliResult {
    let loaded = load(source)?;
    let reports: Vec<Value> = loaded.iter().map(|l| analyze_one(ctx, l)).collect();
    if loaded.len() == 1 && loaded[0].backward.is_none() {
        ctx.emit_json(&reports[0])?;
    } else {
        ctx.emit_json(&json!({"digraph": "appendix-c", "interpretations": reports}))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sign(x: Option<i64>) -> &'static str {
    match x {
        None => "disconnected",
        Some(x) if x > 0 => "positive",
        Some(0) => "zero",
        Some(_) => "negative",
    }
}

fn show(v: DeltaValue) -> String {
    match v {
        DeltaValue::Finite(x) => x.to_string(),
        DeltaValue::Disconnected => "DISCONNECTED".into(),
    }
}

fn cmd_sweep(
    ctx: &Ctx,
    family: Family,
    s: &[usize],
    ns: &IntSet,
    samples: u64,
    seed: u64,
) -> CliResult {
    let mut out = String::new();
    match family {
        Family::Circulant => {
            if s.is_empty() {
                return Err(Failure::Input("the circulant family needs --s".into()));
            }
            let label: Vec<String> = s.iter().map(|k| k.to_string()).collect();
            out.push_str("n,s,delta,diameter,sign\n");
            for &n in &ns.0 {
                let spec = CirculantSpec::new(n as usize, s.iter().copied())?;
                let delta = circulant_delta(&spec)?;
                let d = build_circulant(&spec);
                let sweep = BfsScratch::new(d.n()).run(&d, 0, None, Direction::Forward);
                let diameter = if sweep.reached == d.order() {
                    sweep.eccentricity.to_string()
                } else {
                    "inf".into()
                };
                out.push_str(&format!(
                    "{n},{},{},{diameter},{}\n",
                    label.join(" "),
                    show(delta),
                    sign(delta.finite())
                ));
            }
        }
        Family::Dense => {
            out.push_str("n,instance,seed,arcs,min_delta,max_delta,disconnected,diameter,sign\n");
            for &n in &ns.0 {
                if n < 2 {
                    return Err(Failure::Input("dense digraphs need n >= 2".into()));
                }
                for i in 0..samples {
                    let inst_seed = seed.wrapping_add(n.wrapping_mul(1_000_003)).wrapping_add(i);
                    let d = random_dense(n as usize, &mut ChaCha8Rng::seed_from_u64(inst_seed));
                    let ap = all_pairs(&d, None)?;
                    let profile = delta_profile_with_progress(&d, None)?;
                    let (lo, hi) = (profile.min_finite(), profile.max_finite());
                    let cut = profile.disconnected_count();
                    let opt = |x: Option<i64>| x.map_or_else(|| "none".into(), |x| x.to_string());
                    out.push_str(&format!(
                        "{n},{i},{inst_seed},{},{},{},{cut},{},{}\n",
                        d.arc_count(),
                        opt(lo),
                        opt(hi),
                        ap.diameter,
                        if cut > 0 { "disconnected" } else { sign(lo) }
                    ));
                }
            }
        }
    }
    ctx.emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(ctx: &Ctx, source: &Source, format: Format) -> CliResult {
    let mut loaded = load(source)?;
    if loaded.len() > 1 {
        if !ctx.quiet {
            eprintln!("exporting the backward-on reading; pass --backward off for the other");
        }
        loaded.truncate(1);
    }
    ctx.emit(&write(&loaded[0].digraph, format, ctx.one_based))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let ctx = Ctx {
        one_based: cli.one_based,
        output: cli.output,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Verify { source, z, mode } => cmd_verify(&ctx, &source, z, mode),
        Command::Construct {
            z,
            m,
            mode,
            force,
            trace,
        } => cmd_construct(&ctx, z, m, mode, force, trace.as_ref()),
        Command::Formulas { m, a, appendix_b } => cmd_formulas(&ctx, m, a, appendix_b),
        Command::Analyze { source } => cmd_analyze(&ctx, &source),
        Command::Sweep {
            family,
            s,
            n,
            samples,
            seed,
        } => cmd_sweep(&ctx, family, &s, &n, samples, seed),
        Command::Export { source, format } => cmd_export(&ctx, &source, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Connectivity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
