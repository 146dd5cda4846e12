//! Command-line front end for the striped-surface toolkit.
//!
//! `stripes <command> <file.stripe>` parses an atlas description, expands
//! its countable families over a finite window, and runs one of the
//! analyses from `stripes-core`:
//!
//! * `validate` — geometric validity of the expansion (exit 0 iff valid),
//! * `invariants` — gluing-graph invariants: components, Euler
//!   characteristic, free ranks, orientability,
//! * `graph` — DOT export of the gluing graph,
//! * `verify` — the full groupoid-isomorphism verification (exit 0 iff the
//!   isomorphism is confirmed),
//! * `leaves` — singular leaves and the local-finiteness certificate.
//!
//! Exit codes: 0 success, 1 semantic failure (reported), 2 parse or I/O
//! error (with positions). JSON output (`--format json`) is deterministic
//! for a fixed input and flags.

use std::fmt::Write as _;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stripes_core::atlas::{expand, validate, ExpandedAtlas, StripedAtlas};
use stripes_core::dsl;
use stripes_core::foliation::singular_report;
use stripes_core::graph::{build_graph, graph_invariants, orientable, to_dot};
use stripes_core::vankampen::verify_phi_iso;

#[derive(Parser)]
#[command(name = "stripes", version, about = "Analyze striped-surface atlases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, expand, and check geometric validity.
    Validate(Common),
    /// Gluing-graph invariants: components, Euler characteristic, ranks,
    /// orientability.
    Invariants(Common),
    /// Export the gluing graph in DOT format.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Write DOT here instead of stdout.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Verify that embedding the gluing graph induces an isomorphism of
    /// fundamental groupoids.
    Verify(Common),
    /// Report singular leaves and the local-finiteness certificate.
    Leaves(Common),
}

#[derive(Args)]
struct Common {
    /// Input atlas description (.stripe).
    input: PathBuf,
    /// Window half-width: families instantiate at indices -W..W.
    #[arg(long, default_value_t = 3)]
    window: u32,
    /// Maximum word length for sampled groupoid checks (at least 1).
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_word_len: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// ANSI styling, enabled only on a terminal and without STRIPES_NO_COLOR.
#[derive(Clone, Copy)]
struct Style {
    on: bool,
}

impl Style {
    fn detect() -> Self {
        Style {
            on: std::io::stdout().is_terminal()
                && std::env::var_os("STRIPES_NO_COLOR").is_none(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.on {
            format!("\x1b[{}m{}\x1b[0m", code, text)
        } else {
            text.to_string()
        }
    }

    fn good(&self, text: &str) -> String {
        self.paint("32", text)
    }

    fn bad(&self, text: &str) -> String {
        self.paint("31", text)
    }
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes (`stripes ... | head`) instead of
    // panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Validate(common) => cmd_validate(&common),
        Command::Invariants(common) => cmd_invariants(&common),
        Command::Graph { common, dot } => cmd_graph(&common, dot.as_deref()),
        Command::Verify(common) => cmd_verify(&common),
        Command::Leaves(common) => cmd_leaves(&common),
    }
}

/// Read and parse the input, mapping parse failures to a positioned,
/// multi-line error (exit 2).
fn load(common: &Common) -> anyhow::Result<(StripedAtlas, ExpandedAtlas)> {
    let text = fs::read_to_string(&common.input)
        .with_context(|| format!("cannot read {}", common.input.display()))?;
    let atlas = dsl::parse(&text).map_err(|errors| {
        let mut msg = format!("{} parse error(s) in {}", errors.len(), common.input.display());
        for e in &errors {
            let _ = write!(msg, "\n  {}:{}", common.input.display(), e);
        }
        anyhow::anyhow!(msg)
    })?;
    let expanded = expand(&atlas, common.window);
    Ok((atlas, expanded))
}

fn print_violations(expanded: &ExpandedAtlas, style: Style) -> bool {
    let report = validate(expanded);
    if report.is_valid() {
        return true;
    }
    eprintln!("{}: {} violation(s)", style.bad("invalid"), report.violations.len());
    for v in &report.violations {
        eprintln!("  {}", v);
    }
    false
}

fn cmd_validate(common: &Common) -> anyhow::Result<ExitCode> {
    let style = Style::detect();
    let (atlas, expanded) = load(common)?;
    let report = validate(&expanded);
    let valid = report.is_valid();
    match common.format {
        Format::Json => {
            let out = json!({
                "valid": valid,
                "strips": atlas.strips().len(),
                "gluings": atlas.gluings().len(),
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            if valid {
                println!(
                    "{}: {} strip(s), {} gluing(s), window {}",
                    style.good("valid"),
                    atlas.strips().len(),
                    atlas.gluings().len(),
                    common.window
                );
                if !report.dropped.is_empty() {
                    println!("note: {} gluing member(s) fell outside the window", report.dropped.len());
                }
            } else {
                println!("{}: {} violation(s)", style.bad("invalid"), report.violations.len());
                for v in &report.violations {
                    println!("  {}", v);
                }
            }
        }
    }
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_invariants(common: &Common) -> anyhow::Result<ExitCode> {
    let style = Style::detect();
    let (atlas, expanded) = load(common)?;
    if !print_violations(&expanded, style) {
        return Ok(ExitCode::from(1));
    }
    let graph = build_graph(&expanded);
    let inv = graph_invariants(&graph);
    let orientable = orientable(&expanded);
    match common.format {
        Format::Json => {
            let out = json!({
                "strips": atlas.strips().len(),
                "seams": graph.edge_count(),
                "invariants": inv,
                "orientable": orientable,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            println!("strips: {}, seams: {}", inv.vertex_count, inv.edge_count);
            println!("components: {}", inv.component_count);
            println!("euler characteristic: {}", inv.euler_characteristic);
            let ranks: Vec<String> = inv.components.iter().map(|c| c.free_rank.to_string()).collect();
            println!("component ranks: [{}]", ranks.join(", "));
            println!("total rank: {}", inv.total_rank);
            println!("orientable: {}", if orientable { "yes" } else { "no" });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_graph(common: &Common, dot_path: Option<&Path>) -> anyhow::Result<ExitCode> {
    let style = Style::detect();
    let (_, expanded) = load(common)?;
    if !print_violations(&expanded, style) {
        return Ok(ExitCode::from(1));
    }
    let dot = to_dot(&build_graph(&expanded));
    match dot_path {
        Some(path) => {
            fs::write(path, &dot).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", dot),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(common: &Common) -> anyhow::Result<ExitCode> {
    let style = Style::detect();
    let (_, expanded) = load(common)?;
    if !print_violations(&expanded, style) {
        return Ok(ExitCode::from(1));
    }
    let report = match verify_phi_iso(&expanded, common.max_word_len as usize) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("{}: {}", style.bad("verification error"), err);
            return Ok(ExitCode::from(1));
        }
    };
    match common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            for check in &report.checks {
                let tag = if check.passed { style.good("[PASS]") } else { style.bad("[FAIL]") };
                println!("{} {} — {}", tag, check.name, check.detail);
            }
            println!(
                "verified: {} — {} object(s), {} component(s), rank {} = {}",
                if report.verified { style.good("yes") } else { style.bad("no") },
                report.objects,
                report.components,
                report.graph_rank,
                report.cover_rank
            );
        }
    }
    Ok(if report.verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_leaves(common: &Common) -> anyhow::Result<ExitCode> {
    let style = Style::detect();
    let (_, expanded) = load(common)?;
    // Deliberately not gated on validity: the certificate is most
    // informative exactly on descriptions that fail to be striped surfaces.
    let report = singular_report(&expanded);
    match common.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            println!("singular leaves: {}", report.singular.len());
            for s in &report.singular {
                let reasons: Vec<&str> = s
                    .reasons
                    .iter()
                    .map(|r| match r {
                        stripes_core::foliation::SingularReason::IsSeam => "seam",
                        stripes_core::foliation::SingularReason::SharesSide => "shares side",
                    })
                    .collect();
                match &s.seam {
                    Some(seam) => println!("  {} (seam {}; {})", s.leaf, seam, reasons.join(", ")),
                    None => println!("  {} ({})", s.leaf, reasons.join(", ")),
                }
            }
            for note in &report.notes {
                println!("note: {}", note);
            }
            for f in &report.failures {
                println!(
                    "{}: endpoints of family {} on {}.{} accumulate at {}, inside {}",
                    style.bad("accumulation"),
                    f.family,
                    f.strip,
                    f.side,
                    stripes_core::rat::fmt_rat(&f.point),
                    f.container
                );
            }
            println!(
                "locally finite: {}",
                if report.locally_finite { style.good("yes") } else { style.bad("no") }
            );
        }
    }
    Ok(if report.locally_finite { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
