//! The `hasse` command-line tool.
//!
//! `run` takes the argument list and output streams so that tests can drive
//! the tool in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hasse_core::confound::{detect_confounding, ConfoundReport};
use hasse_core::design::{format_flags_sidecar, parse_flags_sidecar};
use hasse_core::render::{emit_dot, emit_svg, layout_diagram, rls_diagram, DiagramSpec, StyleConfig};
use hasse_core::rls::{parse_rand_expr, suggest_rls_objects, RandExpr, RandomisationPlan, RestrictedLayoutStructure};
use hasse_core::{datasets, load_design, DesignTable, LayoutOptions, LayoutStructure};

#[derive(Debug, Parser)]
#[command(
    name = "hasse",
    version,
    about = "Layout structures and Hasse diagrams for experimental designs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the layout structure of a design and draw its Hasse diagram.
    Layout(LayoutArgs),
    /// List the structural objects and write a randomisation plan template.
    Objects(ObjectsArgs),
    /// Build the restricted layout structure from a randomisation plan.
    Rls(RlsArgs),
    /// Built-in example designs.
    Datasets {
        #[command(subcommand)]
        command: DatasetsCommand,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetsCommand {
    /// List the example designs.
    List,
    /// Write an example design as CSV plus a random-flags file.
    Export {
        name: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Design CSV: one row per unit, one column per factor.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    design: Option<PathBuf>,
    /// Use a built-in example design instead of a file.
    #[arg(long)]
    example: Option<String>,
    /// File of `name=0|1` lines marking random factors.
    #[arg(long)]
    flags: Option<PathBuf>,
    /// Largest number of factors to enumerate.
    #[arg(long, default_value_t = LayoutOptions::default().max_factors)]
    max_factors: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Dot,
    Both,
}

fn yes_no(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "y" | "yes" | "true" | "1" => Ok(true),
        "n" | "no" | "false" | "0" => Ok(false),
        _ => Err(format!("expected Y or N, got `{s}`")),
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Base name of diagram files.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    format: Format,
    /// Skip writing diagram files.
    #[arg(long)]
    no_diagram: bool,
    /// Draw dotted lines between partially crossed objects.
    #[arg(long, value_name = "Y|N", default_value = "Y", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    show_partial: bool,
    /// Show degrees of freedom.
    #[arg(long, value_name = "Y|N", default_value = "Y", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    show_df: bool,
    /// Show the maximum possible number of levels of generalised factors.
    #[arg(long, value_name = "Y|N", default_value = "Y", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    show_max_levels: bool,
    /// Check degrees of freedom for confounding.
    #[arg(long, value_name = "Y|N", default_value = "Y", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    check_confound: bool,
    /// Print the relation table.
    #[arg(long, value_name = "Y|N", default_value = "N", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    table_out: bool,
    /// Black and white output.
    #[arg(long, value_name = "Y|N", default_value = "N", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    bw: bool,
    #[command(flatten)]
    style: StyleArgs,
}

#[derive(Debug, Args)]
struct StyleArgs {
    #[arg(long)]
    structural_colour: Option<String>,
    #[arg(long)]
    partial_colour: Option<String>,
    #[arg(long)]
    object_colour: Option<String>,
    #[arg(long)]
    df_colour: Option<String>,
    #[arg(long)]
    arrow_colour: Option<String>,
    #[arg(long)]
    structural_width: Option<f64>,
    #[arg(long)]
    partial_width: Option<f64>,
    #[arg(long)]
    arrow_width: Option<f64>,
    /// Larger values end arrows further from their target.
    #[arg(long)]
    arrow_pos: Option<f64>,
    #[arg(long)]
    font_family: Option<String>,
    #[arg(long)]
    font_size: Option<f64>,
    #[arg(long)]
    larger_font_multiplier: Option<f64>,
    #[arg(long)]
    middle_font_multiplier: Option<f64>,
    #[arg(long)]
    smaller_font_multiplier: Option<f64>,
}

#[derive(Debug, Args)]
struct LayoutArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Print the layout structure as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ObjectsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Where to write the plan template.
    #[arg(long, default_value = "plan.csv")]
    template: PathBuf,
}

#[derive(Debug, Args)]
struct RlsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Randomisation plan CSV (see `objects`).
    #[arg(long, required_unless_present = "suggest")]
    plan: Option<PathBuf>,
    /// Randomisation arrows CSV with header `from,to`.
    #[arg(long)]
    arrows: Option<PathBuf>,
    /// Print the plan proposed from the arrows; the plan file is not changed.
    #[arg(long, requires = "arrows")]
    suggest: bool,
    /// Print the suggested mixed model.
    #[arg(long, value_name = "Y|N", default_value = "N", default_missing_value = "Y", num_args = 0..=1, value_parser = yes_no)]
    equation_out: bool,
    #[command(flatten)]
    output: OutputArgs,
}

/// Runs the tool and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let stream: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = stream.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Layout(args) => cmd_layout(&args, stdout, stderr),
        Command::Objects(args) => cmd_objects(&args, stdout, stderr),
        Command::Rls(args) => cmd_rls(&args, stdout, stderr),
        Command::Datasets { command } => cmd_datasets(&command, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

fn load_input(input: &InputArgs) -> Result<DesignTable> {
    let table = match (&input.design, &input.example) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            load_design(&text, None).with_context(|| format!("invalid design {}", path.display()))?
        }
        (None, Some(name)) => match datasets::by_name(name) {
            Some(f) => f.table,
            None => bail!("unknown example `{name}`; available: {}", datasets::NAMES.join(", ")),
        },
        (None, None) => bail!("no design given"),
    };
    match &input.flags {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let flags = parse_flags_sidecar(&text, &table.factor_names())
                .with_context(|| format!("invalid flags file {}", path.display()))?;
            Ok(table.with_random_flags(&flags)?)
        }
        None => Ok(table),
    }
}

fn build_layout(input: &InputArgs, stderr: &mut dyn Write) -> Result<LayoutStructure> {
    let table = load_input(input)?;
    let ls = LayoutStructure::build_with(
        &table,
        LayoutOptions {
            max_factors: input.max_factors,
        },
    )?;
    for d in ls.diagnostics() {
        writeln!(stderr, "warning: {d}")?;
    }
    Ok(ls)
}

fn style_from(out: &OutputArgs) -> Result<StyleConfig> {
    let mut style = StyleConfig {
        show_partial: out.show_partial,
        show_df: out.show_df,
        show_max_levels: out.show_max_levels,
        monochrome: out.bw,
        ..StyleConfig::default()
    };
    let s = &out.style;
    let colours = [
        (&s.structural_colour, &mut style.structural_colour),
        (&s.partial_colour, &mut style.partial_colour),
        (&s.object_colour, &mut style.object_colour),
        (&s.df_colour, &mut style.df_colour),
        (&s.arrow_colour, &mut style.arrow_colour),
        (&s.font_family, &mut style.font_family),
    ];
    for (given, field) in colours {
        if let Some(v) = given {
            *field = v.clone();
        }
    }
    let numbers = [
        (s.structural_width, &mut style.structural_width),
        (s.partial_width, &mut style.partial_width),
        (s.arrow_width, &mut style.arrow_width),
        (s.arrow_pos, &mut style.arrow_pos),
        (s.font_size, &mut style.font_size),
        (s.larger_font_multiplier, &mut style.larger_multiplier),
        (s.middle_font_multiplier, &mut style.middle_multiplier),
        (s.smaller_font_multiplier, &mut style.smaller_multiplier),
    ];
    for (given, field) in numbers {
        if let Some(v) = given {
            *field = v;
        }
    }
    style.validate()?;
    Ok(style)
}

/// Diagram files to write, as (path, contents).
fn diagram_files(
    out: &OutputArgs,
    default_name: &str,
    spec: &DiagramSpec,
    style: &StyleConfig,
) -> Result<Vec<(PathBuf, String)>> {
    if out.no_diagram {
        return Ok(Vec::new());
    }
    let name = out.name.as_deref().unwrap_or(default_name);
    if name.is_empty() {
        bail!("output name must not be empty");
    }
    let mut files = Vec::new();
    if matches!(out.format, Format::Svg | Format::Both) {
        files.push((out.out_dir.join(format!("{name}.svg")), emit_svg(spec, style)));
    }
    if matches!(out.format, Format::Dot | Format::Both) {
        files.push((out.out_dir.join(format!("{name}.dot")), emit_dot(spec, style)));
    }
    Ok(files)
}

fn write_files(files: &[(PathBuf, String)], stderr: &mut dyn Write) -> Result<()> {
    for (path, contents) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(stderr, "wrote {}", path.display())?;
    }
    Ok(())
}

fn print_confounding(report: &ConfoundReport, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    for d in &report.diagnostics {
        writeln!(stderr, "warning: {d}")?;
    }
    if report.has_confounding() {
        write!(stdout, "{}", report.to_text())?;
        writeln!(stdout)?;
    }
    Ok(())
}

const TABLE_HEADING: &str = "Relations between objects (1: row nested in column, 0: fully crossed, (0): otherwise)";

fn cmd_layout(args: &LayoutArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let ls = build_layout(&args.input, stderr)?;
    let style = style_from(&args.output)?;
    let spec = layout_diagram(&ls, &style);
    let files = diagram_files(&args.output, "layout", &spec, &style)?;

    if args.output.check_confound {
        print_confounding(&detect_confounding(&ls), stdout, stderr)?;
    }
    if args.output.table_out {
        writeln!(stdout, "{TABLE_HEADING}")?;
        write!(stdout, "{}", ls.relation_table())?;
        writeln!(stdout)?;
    }
    if args.json {
        writeln!(stdout, "{}", ls.to_json())?;
    }
    write_files(&files, stderr)
}

fn cmd_objects(args: &ObjectsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let ls = build_layout(&args.input, stderr)?;
    let template = RandomisationPlan::empty(&ls).to_csv(&ls);
    let width = ls.len().to_string().len();
    let name_width = ls.objects().iter().map(|o| o.name.chars().count()).max().unwrap_or(0);
    writeln!(stdout, "Structural objects:")?;
    for o in ls.objects() {
        let merged = if o.is_merged() {
            format!("  [{}]", o.display_label)
        } else {
            String::new()
        };
        let random = if o.is_random { "random" } else { "fixed" };
        writeln!(
            stdout,
            "{:>width$}  {:<name_width$}  {:>4} levels  {random}{merged}",
            o.id + 1,
            o.name,
            o.n_levels
        )?;
    }
    write_files(&[(args.template.clone(), template)], stderr)
}

/// Arrow endpoints as expressions, for the rule engine.
fn arrow_exprs(
    ls: &LayoutStructure,
    plan: Option<&RandomisationPlan>,
    text: &str,
) -> Result<Vec<(RandExpr, RandExpr)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 2 {
            bail!("arrow rows need two entries");
        }
        let both_indices = record[0].parse::<usize>().is_ok() && record[1].parse::<usize>().is_ok();
        let endpoint = |entry: &str| -> Result<RandExpr> {
            let label = match entry.parse::<usize>() {
                Ok(i) if both_indices => {
                    if i == 0 || i > ls.len() {
                        bail!("arrow index {i} is outside 1..={}", ls.len());
                    }
                    plan.and_then(|p| p.labels[i - 1].clone())
                        .unwrap_or_else(|| ls.object(i - 1).name.clone())
                }
                _ => entry.to_string(),
            };
            parse_rand_expr(&label, ls.factor_names()).with_context(|| format!("arrow endpoint `{label}`"))
        };
        let from = endpoint(&record[0])?;
        let to = endpoint(&record[1])?;
        if both_indices && record[1].parse::<usize>()? <= record[0].parse::<usize>()? {
            bail!(
                "arrow ({}, {}): in index form the second index must be greater than the first",
                &record[0],
                &record[1]
            );
        }
        out.push((from, to));
    }
    Ok(out)
}

fn cmd_rls(args: &RlsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let ls = build_layout(&args.input, stderr)?;
    let style = style_from(&args.output)?;
    let read = |path: &Path| fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()));

    let user_plan = match &args.plan {
        Some(path) => Some(
            RandomisationPlan::from_csv(&ls, &read(path)?)
                .with_context(|| format!("invalid plan {}", path.display()))?,
        ),
        None => None,
    };
    let arrows_text = args.arrows.as_deref().map(read).transpose()?;

    let mut suggested = None;
    if args.suggest {
        let text = arrows_text.as_deref().unwrap_or("from,to\n");
        let exprs = arrow_exprs(&ls, user_plan.as_ref(), text)?;
        let suggestion = suggest_rls_objects(&ls, &exprs)?;
        suggested = Some(suggestion.to_plan());
    }

    let plan = match (user_plan, &suggested) {
        (Some(mut plan), _) => {
            if let Some(text) = &arrows_text {
                plan.read_arrows(&ls, text).context("invalid arrows")?;
            }
            plan
        }
        (None, Some(plan)) => plan.clone(),
        (None, None) => bail!("a plan is required unless --suggest is given"),
    };
    let rls = RestrictedLayoutStructure::build(&ls, &plan)?;
    let spec = rls_diagram(&rls, &style);
    let files = diagram_files(&args.output, "rls", &spec, &style)?;

    for d in &rls.diagnostics {
        writeln!(stderr, "warning: {d}")?;
    }
    if let Some(plan) = &suggested {
        writeln!(stdout, "Proposed randomisation plan:")?;
        write!(stdout, "{}", plan.to_csv(&ls))?;
        writeln!(stdout)?;
    }
    if args.output.check_confound {
        print_confounding(&rls.confounding, stdout, stderr)?;
    }
    if args.output.table_out {
        writeln!(stdout, "{TABLE_HEADING}")?;
        write!(stdout, "{}", rls.relation_table())?;
        writeln!(stdout)?;
    }
    if args.equation_out {
        write!(stdout, "{}", rls.model.report())?;
    }
    write_files(&files, stderr)
}

fn cmd_datasets(command: &DatasetsCommand, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        DatasetsCommand::List => {
            for f in datasets::all() {
                writeln!(stdout, "{:<14} {}", f.name, f.provenance)?;
            }
            Ok(())
        }
        DatasetsCommand::Export { name, out_dir } => {
            let Some(f) = datasets::by_name(name) else {
                bail!("unknown example `{name}`; available: {}", datasets::NAMES.join(", "));
            };
            let files = [
                (out_dir.join(format!("{name}.csv")), f.table.to_csv()),
                (out_dir.join(format!("{name}.flags")), format_flags_sidecar(&f.table)),
            ];
            write_files(&files, stderr)
        }
    }
}
