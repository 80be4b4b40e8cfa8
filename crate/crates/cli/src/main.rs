//! `rule30`: run automaton experiments and write PBM images, CSV metrics and
//! text reports.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error.

mod presets;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rule30_lab::algebra::{combine, complement, divergence_mask, mirror, pointwise_combine};
use rule30_lab::column::parse_bits;
use rule30_lab::metrics::{metrics_report, steady_state_values};
use rule30_lab::render::{format_sig12, write_report_csv, ImageSpec, PbmRowWriter};
use rule30_lab::{
    central_column, period_scan, prefix_ratio, single_seed, write_pbm, BoolOp, Evolution,
    EvolveError, MetricsError, ObserverError, PbmFormat, RatioScope, RenderError, RuleTable, Tape,
    WindowPolicy, DEFAULT_RETENTION_LIMIT,
};

use presets::{Params, Preset, TABLE2_ITERATIONS};

const PROGRESS_EVERY: usize = 1 << 16;

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Observer { .. } => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "rule30",
    version,
    about = "Elementary cellular automaton experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a spacetime diagram as a PBM image.
    Evolve(RunArgs),
    /// Write randomness-count and zeros/ones ratio series as CSV.
    Metrics(RunArgs),
    /// Report balance and eventual periodicity of the central column.
    Column(ColumnArgs),
    /// Compose, mirror or complement rules: `30 AND 150`, `mirror 30`.
    Algebra(AlgebraArgs),
    /// Run a preset (or `all`) and write its outputs into a directory.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    P1,
    P4,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Wolfram rule number, 0-255.
    #[arg(long, value_parser = parse_rule)]
    rule: Option<RuleTable>,
    #[arg(long)]
    steps: Option<usize>,
    /// lightcone, fixed:<w> or cyclic:<w>.
    #[arg(long)]
    policy: Option<WindowPolicy>,
    /// full-window or central-column.
    #[arg(long)]
    scope: Option<RatioScope>,
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Runs with more rows than this are streamed instead of retained.
    #[arg(long, default_value_t = DEFAULT_RETENTION_LIMIT)]
    retention: usize,
}

#[derive(Args)]
struct ColumnArgs {
    #[arg(long, value_parser = parse_rule, default_value = "30")]
    rule: RuleTable,
    #[arg(long, default_value_t = 131072)]
    steps: usize,
    #[arg(long, default_value = "lightcone")]
    policy: WindowPolicy,
    #[arg(long, default_value_t = 2048)]
    max_period: usize,
    #[arg(long, default_value_t = 2048)]
    max_onset: usize,
    /// Analyse a file of 0/1 characters instead of a generated column.
    #[arg(long)]
    bits_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlgebraArgs {
    /// `<A> <AND|OR|XOR> <B>`, `mirror <A>` or `complement <A>`.
    #[arg(required = true, num_args = 2..=3)]
    terms: Vec<String>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Preset name or `all`.
    preset: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "p4")]
    format: Format,
}

fn parse_rule(s: &str) -> std::result::Result<RuleTable, String> {
    s.parse::<RuleTable>().map_err(|e| e.to_string())
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn resolve(args: &RunArgs, default: Params) -> Result<Params> {
    let base = args.preset.map_or(default, Preset::params);
    let mut p = Params {
        rule: args.rule.unwrap_or(base.rule),
        steps: args.steps.unwrap_or(base.steps),
        policy: args.policy.unwrap_or(base.policy),
        scope: args.scope.unwrap_or(base.scope),
    };
    if args.preset.is_none() && args.policy.is_none() && default.policy != WindowPolicy::LightCone {
        // Metric runs default to a fixed window twice the step count.
        p.policy = WindowPolicy::FixedWidth(2 * p.steps.max(1));
    }
    if p.steps == 0 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    Ok(p)
}

fn image_format(f: Option<Format>, default: PbmFormat) -> Result<PbmFormat> {
    match f {
        None => Ok(default),
        Some(Format::P1) => Ok(PbmFormat::P1),
        Some(Format::P4) => Ok(PbmFormat::P4),
        Some(Format::Csv) => Err(CliError::Config(
            "evolve writes images; use --format p1 or p4".into(),
        )),
    }
}

/// Leftmost absolute position and width of the final row from a single seed.
fn image_geometry(policy: WindowPolicy, steps: usize) -> (isize, usize) {
    match policy {
        WindowPolicy::LightCone => (-(steps as isize), 2 * steps + 1),
        WindowPolicy::FixedWidth(w) | WindowPolicy::Cyclic(w) => (-((w / 2) as isize), w),
    }
}

fn render_evolution(
    p: &Params,
    format: PbmFormat,
    retention: usize,
    sink: Box<dyn Write>,
) -> Result<usize> {
    let evo = Evolution::new(p.rule, p.policy).with_retention_limit(retention);
    let seed = single_seed(p.policy).map_err(|e| CliError::Config(e.to_string()))?;
    if evo.retains(p.steps) {
        let diagram = evo.run(seed, p.steps, &mut [])?;
        let mut sink = sink;
        let n = write_pbm(&diagram, format, &mut sink)?;
        sink.flush()?;
        return Ok(n);
    }
    let (left, width) = image_geometry(p.policy, p.steps);
    let spec = ImageSpec {
        format,
        width,
        height: p.steps + 1,
    };
    let mut writer = PbmRowWriter::new(sink, spec, left)?;
    let total = p.steps;
    let mut progress = |t: usize, _: &Tape| -> std::result::Result<(), ObserverError> {
        if t > 0 && t.is_multiple_of(PROGRESS_EVERY) {
            eprintln!("progress: row {t}/{total}");
        }
        Ok(())
    };
    evo.stream(seed, p.steps, &mut [&mut writer, &mut progress])?;
    Ok(writer.finish()?.0)
}

fn cmd_evolve(args: &RunArgs) -> Result<()> {
    let default = Params {
        rule: RuleTable::new(30),
        steps: 256,
        policy: WindowPolicy::LightCone,
        scope: RatioScope::CentralColumn,
    };
    if args.preset.is_some_and(|p| !p.is_image()) {
        return Err(CliError::Config(
            "evolve presets: fig1, fig3, fig4, fig5, fig6".into(),
        ));
    }
    let p = resolve(args, default)?;
    let format = image_format(args.format, PbmFormat::P1)?;
    render_evolution(&p, format, args.retention, open_out(args.out.as_deref())?)?;
    Ok(())
}

fn write_table2(rule: RuleTable, sink: &mut dyn Write) -> Result<()> {
    let values = steady_state_values(rule, &TABLE2_ITERATIONS)?;
    writeln!(sink, "iterations,randomness_count")?;
    for (n, v) in values {
        writeln!(sink, "{n},{}", format_sig12(v))?;
    }
    sink.flush()?;
    Ok(())
}

fn write_metrics(p: &Params, sink: &mut dyn Write) -> Result<()> {
    let report = metrics_report(p.rule, p.policy, p.steps, p.scope)?;
    write_report_csv(&report, sink)?;
    sink.flush()?;
    Ok(())
}

fn cmd_metrics(args: &RunArgs) -> Result<()> {
    if matches!(args.format, Some(Format::P1 | Format::P4)) {
        return Err(CliError::Config(
            "metrics writes CSV; use --format csv".into(),
        ));
    }
    if args.preset.is_some_and(|p| !p.has_metrics()) {
        return Err(CliError::Config(
            "metrics presets: fig3, fig7, fig8, fig9, table2".into(),
        ));
    }
    let default = Params {
        rule: RuleTable::new(30),
        steps: 1024,
        policy: WindowPolicy::FixedWidth(2048),
        scope: RatioScope::CentralColumn,
    };
    let p = resolve(args, default)?;
    let mut sink = open_out(args.out.as_deref())?;
    if args.preset == Some(Preset::Table2) {
        return write_table2(p.rule, &mut sink);
    }
    write_metrics(&p, &mut sink)
}

fn column_report(args: &ColumnArgs) -> Result<String> {
    let (bits, source) = match &args.bits_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let bits = parse_bits(&text).map_err(|e| CliError::Config(e.to_string()))?;
            (bits, format!("file {}", path.display()))
        }
        None => {
            if args.steps == 0 {
                return Err(CliError::Config("--steps must be at least 1".into()));
            }
            let bits = central_column(args.rule, args.policy, args.steps)
                .map_err(|e| CliError::Config(e.to_string()))?;
            (
                bits,
                format!("rule {} {} {} steps", args.rule, args.policy, args.steps),
            )
        }
    };
    let ones = bits.iter().filter(|&&b| b).count();
    let ratio = match prefix_ratio(&bits, bits.len()) {
        Ok(r) => format_sig12(r),
        Err(_) => "undefined".into(),
    };
    let report = period_scan(&bits, args.max_period, args.max_onset)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "source: {source}");
    let _ = writeln!(out, "column_length: {}", bits.len());
    let _ = writeln!(out, "ones: {ones}");
    let _ = writeln!(out, "zeros: {}", bits.len() - ones);
    let _ = writeln!(out, "prefix_ratio: {ratio}");
    let _ = writeln!(
        out,
        "period: {report} (max_period={}, max_onset={})",
        args.max_period, args.max_onset
    );
    Ok(out)
}

fn cmd_column(args: &ColumnArgs) -> Result<()> {
    let report = column_report(args)?;
    let mut sink = open_out(args.out.as_deref())?;
    sink.write_all(report.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn algebra_report(terms: &[String]) -> Result<String> {
    let rule = |s: &str| parse_rule(s).map_err(CliError::Config);
    let mut out = String::new();
    match terms {
        [op, a] if op.eq_ignore_ascii_case("mirror") => {
            let a = rule(a)?;
            let _ = writeln!(out, "mirror({a}) = {}", mirror(a));
        }
        [op, a] if op.eq_ignore_ascii_case("complement") => {
            let a = rule(a)?;
            let _ = writeln!(out, "complement({a}) = {}", complement(a));
        }
        [a, op, b] => {
            let (a, b) = (rule(a)?, rule(b)?);
            let op: BoolOp = op
                .parse()
                .map_err(|e: rule30_lab::AlgebraError| CliError::Config(e.to_string()))?;
            let _ = writeln!(out, "{a} {op} {b} = {}", combine(a, b, op));
            let _ = writeln!(out, "mirror({a}) = {}", mirror(a));
            let _ = writeln!(out, "mirror({b}) = {}", mirror(b));
            let _ = writeln!(out, "divergence_mask({a}, {b}) = {}", divergence_mask(a, b));
        }
        _ => {
            return Err(CliError::Config(
                "expected `<A> <AND|OR|XOR> <B>`, `mirror <A>` or `complement <A>`".into(),
            ))
        }
    }
    Ok(out)
}

fn cmd_algebra(args: &AlgebraArgs) -> Result<()> {
    print!("{}", algebra_report(&args.terms)?);
    Ok(())
}

fn create(dir: &Path, name: &str, written: &mut Vec<PathBuf>) -> Result<Box<dyn Write>> {
    let path = dir.join(name);
    let out = open_out(Some(&path))?;
    written.push(path);
    Ok(out)
}

fn reproduce_one(
    preset: Preset,
    dir: &Path,
    format: PbmFormat,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    let p = preset.params();
    if preset.is_image() {
        let sink = create(dir, &format!("{preset}.pbm"), written)?;
        render_evolution(&p, format, DEFAULT_RETENTION_LIMIT, sink)?;
    }
    if preset == Preset::Fig6 {
        // The same figure read as a cell-by-cell AND of the two evolutions.
        let run = |rule: u8| {
            Evolution::new(RuleTable::new(rule), p.policy).run(
                single_seed(p.policy).expect("light cone seed"),
                p.steps,
                &mut [],
            )
        };
        let both = pointwise_combine(&run(30)?, &run(150)?, BoolOp::And)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mut sink = create(dir, "fig6_pointwise.pbm", written)?;
        write_pbm(&both, format, &mut sink)?;
        sink.flush()?;
    }
    if preset == Preset::Table2 {
        let mut sink = create(dir, "table2.csv", written)?;
        write_table2(p.rule, &mut sink)?;
    } else if preset.has_metrics() {
        let mut sink = create(dir, &format!("{preset}_metrics.csv"), written)?;
        write_metrics(&p, &mut sink)?;
    }
    Ok(())
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<()> {
    let format = image_format(Some(args.format), PbmFormat::P4)?;
    let chosen: Vec<Preset> = if args.preset.eq_ignore_ascii_case("all") {
        presets::ALL.to_vec()
    } else {
        vec![args.preset.parse().map_err(CliError::Config)?]
    };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;
    let mut written = Vec::new();
    for preset in chosen {
        reproduce_one(preset, &args.out_dir, format, &mut written)?;
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Column(a) => cmd_column(a),
        Command::Algebra(a) => cmd_algebra(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rule30: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn algebra_lines() {
        let out = algebra_report(&terms("30 AND 150")).unwrap();
        assert!(out.starts_with("30 AND 150 = 22\n"));
        assert!(out.contains("divergence_mask(30, 150) = {011,111}"));
        assert_eq!(
            algebra_report(&terms("mirror 30")).unwrap(),
            "mirror(30) = 86\n"
        );
        assert!(algebra_report(&terms("30 XOR 30"))
            .unwrap()
            .starts_with("30 XOR 30 = 0\n"));
        assert!(matches!(
            algebra_report(&terms("30 NAND 150")),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            algebra_report(&terms("300 AND 1")),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn geometry_matches_seed() {
        assert_eq!(image_geometry(WindowPolicy::LightCone, 4), (-4, 9));
        assert_eq!(image_geometry(WindowPolicy::FixedWidth(5), 9), (-2, 5));
    }
}
