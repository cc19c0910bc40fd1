//! Command-line interface over the polygon-family library.
//!
//! Exit codes, uniformly across subcommands:
//!
//! * `0` — success, including certified negative results (a clean `verify`,
//!   a pipeline run that completed its search without finding a witness, an
//!   exhausted `search`);
//! * `1` — a meaningful finding: a verification violation or a verified
//!   witness pair;
//! * `2` — bad input: unparsable documents or flags, infeasible parameters,
//!   degenerate projection directions;
//! * `3` — no certificate: a budget ran out or a pipeline stage could not
//!   complete.

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyfam::certified::{cos_interval, pi};
use polyfam::classify::{classify_pair, satisfies, verify_family, Relation};
use polyfam::construct::{
    christmas_tree, fat_hexagon_stack, prism_quads, scattered_hexagons,
};
use polyfam::doc::{load_family, save_family};
use polyfam::export::{export_obj, export_svg, DEFAULT_OBJ_DIGITS};
use polyfam::model::FatnessParams;
use polyfam::pipeline::{run_pipeline, Outcome, PipelineConfig};
use polyfam::scalar::{int, parse_scalar, simplest_in_interval, Scalar};
use polyfam::search::{check_counting_bounds, max_family, SearchLimits, SearchProblem};
use polyfam::{Family, Vec3};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_FINDING: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_NO_CERTIFICATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "polyfam",
    version,
    about = "Exact geometry of convex polygon families in 3-space: \
             generation, verification, witness screening, exhaustive search, export"
)]
struct Cli {
    /// Worker thread count (overrides the POLYFAM_THREADS environment
    /// variable; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a reference family and write it as a document.
    Generate(GenerateArgs),
    /// Check every polygon pair of a document against a relation.
    Verify(VerifyArgs),
    /// Print the exact intersection classification of one polygon pair.
    Classify(ClassifyArgs),
    /// Run the projection screening pipeline on a hexagon family.
    Pipeline(PipelineArgs),
    /// Exhaustively search a point set for a largest compatible family.
    Search(SearchArgs),
    /// Render a document as an SVG drawing or an OBJ mesh.
    Export(ExportArgs),
    /// Summarize a document: sizes, metadata, pairwise contact profile.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Triangles fanning from a vertical axis to convex base points.
    ChristmasTree,
    /// Parallelogram walls over all base-point pairs of a prism.
    PrismQuads,
    /// Stacked fat hexagons engineered to contain one bad pair.
    HexagonStack,
    /// Far-apart flat fat hexagons: a negative control with no contacts.
    ScatteredHexagons,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Size parameter for christmas-tree / prism-quads.
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Hexagon count for hexagon-stack / scattered-hexagons.
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Prism sweep axis as `x,y,z` rationals (default `0,0,1`).
    #[arg(long)]
    axis: Option<String>,
    /// Fatness side-ratio bound c (rational, >= 1) for hexagon kinds.
    #[arg(long, default_value = "2")]
    c: String,
    /// Fatness angle bound as an exact rational cos(alpha) in (0, 1).
    #[arg(long, default_value = "3/5")]
    cos_alpha: String,
    /// Angle bound in degrees; prints a certified rational bound to confirm.
    #[arg(long)]
    alpha_deg: Option<String>,
    /// Output document path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// almost-disjoint | vertex-or-edge | no-bad
    #[arg(long)]
    relation: String,
}

#[derive(Args)]
struct ClassifyArgs {
    file: PathBuf,
    /// Index of the first polygon.
    i: usize,
    /// Index of the second polygon.
    j: usize,
    /// Optional relation to test; exit 1 when the pair violates it.
    #[arg(long)]
    relation: Option<String>,
}

#[derive(Args)]
struct PipelineArgs {
    file: PathBuf,
    /// Fatness side-ratio bound c (rational, >= 1).
    #[arg(long, default_value = "2")]
    c: String,
    /// Fatness angle bound as an exact rational cos(alpha) in (0, 1).
    #[arg(long, default_value = "3/5")]
    cos_alpha: String,
    /// Angle bound in degrees; prints a certified rational bound to confirm.
    #[arg(long)]
    alpha_deg: Option<String>,
    /// Bucket width in radians (rational), or `auto` for half the certified
    /// safe bound.
    #[arg(long, default_value = "auto")]
    phi: String,
    /// Minimum cos^2 of the plane angle for a hexagon to survive filtering
    /// (rational; default `(3 + cos_alpha)/4`).
    #[arg(long)]
    min_cos_sq_theta: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Projection directions to try before giving up.
    #[arg(long, default_value_t = 64)]
    attempts: usize,
    /// Working precision in bits for certified enclosures.
    #[arg(long, default_value_t = 96)]
    bits: u32,
}

#[derive(Args)]
struct SearchArgs {
    /// Input document; only its point set is used.
    file: PathBuf,
    /// Vertex count of the candidate polygons.
    #[arg(long)]
    k: usize,
    /// almost-disjoint | vertex-or-edge | no-bad
    #[arg(long)]
    relation: String,
    /// Search node budget.
    #[arg(long, default_value_t = 50_000_000)]
    node_budget: u64,
    /// Optional wall-clock budget in milliseconds.
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Refuse point sets larger than this.
    #[arg(long, default_value_t = 10)]
    max_points: usize,
    /// Write the maximum family found as a document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Obj,
}

#[derive(Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Projection direction for SVG as `x,y,z` rationals (default: choose a
    /// generic direction automatically).
    #[arg(long)]
    direction: Option<String>,
    /// Significant digits for OBJ coordinates.
    #[arg(long, default_value_t = DEFAULT_OBJ_DIGITS)]
    digits: u32,
    /// Output file path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads(cli.threads) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let code = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Search(args) => cmd_search(args),
        Command::Export(args) => cmd_export(args),
        Command::Stats(args) => cmd_stats(args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn bad_input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_BAD_INPUT,
        message: message.into(),
    }
}

fn no_certificate(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_NO_CERTIFICATE,
        message: message.into(),
    }
}

/// Thread-pool size: `--threads` beats `POLYFAM_THREADS` beats the rayon
/// default (all cores).
fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("POLYFAM_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| format!("POLYFAM_THREADS must be a positive integer, got {v:?}"))?,
            ),
            Err(_) => None,
        },
    };
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        return Err("thread count must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("could not configure {n} worker threads: {e}"))
}

fn parse_rational(s: &str, what: &str) -> Result<Scalar, Failure> {
    parse_scalar(s).map_err(|e| bad_input(format!("{what} {s:?}: {e}")))
}

fn parse_vec3(s: &str, what: &str) -> Result<Vec3, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(bad_input(format!(
            "{what} must be three comma-separated rationals, got {s:?}"
        )));
    }
    let x = parse_rational(parts[0], what)?;
    let y = parse_rational(parts[1], what)?;
    let z = parse_rational(parts[2], what)?;
    Ok(Vec3::new(x, y, z))
}

fn parse_relation(s: &str) -> Result<Relation, Failure> {
    Relation::parse(s).ok_or_else(|| {
        bad_input(format!(
            "unknown relation {s:?}; expected almost-disjoint, vertex-or-edge, or no-bad"
        ))
    })
}

fn load(path: &Path) -> Result<Family, Failure> {
    load_family(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))
}

/// Resolves the fatness angle bound. With `--alpha-deg` the exact cosine is
/// irrational in general, so the command prints a certified enclosure plus
/// the simplest rational inside it and asks the user to confirm a bound.
fn resolve_cos_alpha(cos_alpha: &str, alpha_deg: Option<&str>) -> Result<Scalar, Failure> {
    if let Some(deg_str) = alpha_deg {
        let deg = parse_rational(deg_str, "--alpha-deg")?;
        if deg <= int(0) || deg >= int(90) {
            return Err(bad_input(format!(
                "--alpha-deg must be strictly between 0 and 90, got {deg}"
            )));
        }
        let bits = 96;
        let radians = pi(bits).scaled(&(deg.clone() / int(180)));
        let enclosure = cos_interval(&radians, bits)
            .map_err(|e| bad_input(format!("could not evaluate cos({deg} deg): {e}")))?;
        let suggestion = simplest_in_interval(enclosure.lo(), enclosure.hi());
        return Err(bad_input(format!(
            "cos({deg} deg) is irrational; it is certified to lie in\n  [{}, {}]\n\
             confirm an exact rational bound, e.g. rerun with --cos-alpha {}",
            enclosure.lo(),
            enclosure.hi(),
            suggestion
        )));
    }
    parse_rational(cos_alpha, "--cos-alpha")
}

fn fatness_params(c: &str, cos_alpha: &str, alpha_deg: Option<&str>) -> Result<FatnessParams, Failure> {
    let c = parse_rational(c, "--c")?;
    let cos_alpha = resolve_cos_alpha(cos_alpha, alpha_deg)?;
    FatnessParams::new(&c, &cos_alpha).map_err(|e| bad_input(e.to_string()))
}

fn cmd_generate(args: GenerateArgs) -> Result<u8, Failure> {
    let family = match args.kind {
        Kind::ChristmasTree => {
            christmas_tree(args.m).map_err(|e| bad_input(e.to_string()))?
        }
        Kind::PrismQuads => {
            let axis = match &args.axis {
                Some(s) => Some(parse_vec3(s, "--axis")?),
                None => None,
            };
            prism_quads(args.m, args.seed, axis).map_err(|e| bad_input(e.to_string()))?
        }
        Kind::HexagonStack => {
            let params = fatness_params(&args.c, &args.cos_alpha, args.alpha_deg.as_deref())?;
            fat_hexagon_stack(args.count, &params, args.seed)
                .map_err(|e| bad_input(e.to_string()))?
        }
        Kind::ScatteredHexagons => {
            let params = fatness_params(&args.c, &args.cos_alpha, args.alpha_deg.as_deref())?;
            scattered_hexagons(args.count, &params, args.seed)
                .map_err(|e| bad_input(e.to_string()))?
        }
    };
    save_family(&family, &args.out)
        .map_err(|e| bad_input(format!("{}: {e}", args.out.display())))?;
    println!(
        "wrote {} polygons over {} points to {}",
        family.len(),
        family.point_set().len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let relation = parse_relation(&args.relation)?;
    let family = load(&args.file)?;
    let n = family.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let violations = verify_family(&family, relation);
    println!(
        "checked {pairs} pairs of {n} polygons under {relation}: {} violation(s)",
        violations.len()
    );
    for v in &violations {
        println!("  polygons ({}, {}): {}", v.i, v.j, v.classification);
    }
    if violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_FINDING)
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<u8, Failure> {
    let relation = args.relation.as_deref().map(parse_relation).transpose()?;
    let family = load(&args.file)?;
    let n = family.len();
    if args.i >= n || args.j >= n || args.i == args.j {
        return Err(bad_input(format!(
            "need two distinct polygon indices below {n}, got {} and {}",
            args.i, args.j
        )));
    }
    let c = classify_pair(
        family.point_set(),
        &family.polygons()[args.i],
        &family.polygons()[args.j],
    )
    .map_err(|e| bad_input(e.to_string()))?;
    println!("polygons ({}, {}): {c}", args.i, args.j);
    for r in Relation::ALL {
        println!(
            "  {}: {}",
            r,
            if satisfies(r, &c) { "satisfied" } else { "violated" }
        );
    }
    match relation {
        Some(r) if !satisfies(r, &c) => Ok(EXIT_FINDING),
        _ => Ok(EXIT_OK),
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<u8, Failure> {
    let params = fatness_params(&args.c, &args.cos_alpha, args.alpha_deg.as_deref())?;
    let family = load(&args.file)?;
    let phi = match args.phi.as_str() {
        "auto" => None,
        s => Some(parse_rational(s, "--phi")?),
    };
    let min_cos_sq_theta = args
        .min_cos_sq_theta
        .as_deref()
        .map(|s| parse_rational(s, "--min-cos-sq-theta"))
        .transpose()?;
    let config = PipelineConfig {
        phi,
        min_cos_sq_theta,
        seed: args.seed,
        max_attempts: args.attempts,
        precision_bits: args.bits,
    };
    let report = run_pipeline(&family, &params, &config)
        .map_err(|e| bad_input(e.to_string()))?;
    print!("{}", report.render());
    Ok(match report.outcome {
        Outcome::Witness { .. } => EXIT_FINDING,
        Outcome::NoRainbow { .. } => EXIT_OK,
        Outcome::Failed { .. } => EXIT_NO_CERTIFICATE,
    })
}

fn cmd_search(args: SearchArgs) -> Result<u8, Failure> {
    let relation = parse_relation(&args.relation)?;
    let family = load(&args.file)?;
    let problem = SearchProblem {
        point_set: family.point_set().clone(),
        k: args.k,
        relation,
        limits: SearchLimits {
            node_budget: args.node_budget,
            time_budget_ms: args.time_budget_ms,
            max_points: args.max_points,
        },
    };
    let result = max_family(&problem).map_err(|e| bad_input(e.to_string()))?;
    println!(
        "relation {relation}, k = {}: {} candidate polygons, {} nodes explored",
        result.k, result.candidates_count, result.nodes_explored
    );
    if !result.exhausted {
        println!(
            "search budget exhausted; best family found so far has size {}",
            result.max_size
        );
        return Err(no_certificate(
            "the search did not complete within its budget; the maximum is unconfirmed",
        ));
    }
    println!("maximum family size: {}", result.max_size);
    for poly in result.witness_family.polygons() {
        println!("  polygon {:?}", poly.vertices());
    }
    let bounds = check_counting_bounds(&result).map_err(|e| bad_input(e.to_string()))?;
    print!("{}", bounds.render());
    if let Some(out) = &args.out {
        save_family(&result.witness_family, out)
            .map_err(|e| bad_input(format!("{}: {e}", out.display())))?;
        println!("wrote maximum family to {}", out.display());
    }
    Ok(EXIT_OK)
}

fn cmd_export(args: ExportArgs) -> Result<u8, Failure> {
    let family = load(&args.file)?;
    let text = match args.format {
        Format::Svg => {
            let direction = match &args.direction {
                Some(s) => Some(parse_vec3(s, "--direction")?),
                None => None,
            };
            export_svg(&family, direction.as_ref()).map_err(|e| bad_input(e.to_string()))?
        }
        Format::Obj => export_obj(&family, args.digits).map_err(|e| bad_input(e.to_string()))?,
    };
    std::fs::write(&args.out, text)
        .map_err(|e| bad_input(format!("{}: {e}", args.out.display())))?;
    println!(
        "wrote {} polygons over {} points to {}",
        family.len(),
        family.point_set().len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_stats(args: StatsArgs) -> Result<u8, Failure> {
    let family = load(&args.file)?;
    println!(
        "{}: {} points, {} polygons",
        args.file.display(),
        family.point_set().len(),
        family.len()
    );
    let mut k_hist: BTreeMap<usize, usize> = BTreeMap::new();
    for poly in family.polygons() {
        *k_hist.entry(poly.len()).or_default() += 1;
    }
    for (k, count) in &k_hist {
        println!("  {count} polygon(s) with {k} vertices");
    }
    for (key, value) in family.metadata() {
        println!("  meta {key} {value}");
    }
    let polys = family.polygons();
    let mut shape_hist: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut relation_violations: BTreeMap<&'static str, usize> = BTreeMap::new();
    for i in 0..polys.len() {
        for j in (i + 1)..polys.len() {
            let c = classify_pair(family.point_set(), &polys[i], &polys[j])
                .map_err(|e| bad_input(format!("polygons ({i}, {j}): {e}")))?;
            *shape_hist.entry(c.shape.kind_name()).or_default() += 1;
            for r in Relation::ALL {
                if !satisfies(r, &c) {
                    *relation_violations.entry(r.name()).or_default() += 1;
                }
            }
        }
    }
    let pairs = polys.len() * polys.len().saturating_sub(1) / 2;
    println!("  {pairs} polygon pair(s) by hull intersection:");
    for (kind, count) in &shape_hist {
        println!("    {kind}: {count}");
    }
    for r in Relation::ALL {
        let v = relation_violations.get(r.name()).copied().unwrap_or(0);
        println!("  {}: {v} violating pair(s)", r.name());
    }
    Ok(EXIT_OK)
}
