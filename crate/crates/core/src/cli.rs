//! Command-line front end.
//!
//! Exit statuses: 0 provable (or every corpus expectation met), 1 unprovable
//! (or some expectation missed), 2 usage, parse or I/O error, 3 resource
//! limit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::oracle::{cross_check, CrossReport, Oracle};
use crate::parse::parse_sequent;
use crate::prover::{decide, search_bounds, SearchConfig, SearchStats, Verdict};
use crate::render::{Render, Style};
use crate::bunch::Sequent;

pub const EXIT_PROVABLE: i32 = 0;
pub const EXIT_UNPROVABLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bunched", version, about = "Decide sequents of propositional BI and print derivations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one sequent, e.g. "p, p |- p * p".
    Prove {
        sequent: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Append search statistics and bounds.
        #[arg(long)]
        stats: bool,
        /// Give up after expanding this many sequents.
        #[arg(long)]
        max_visited: Option<usize>,
        /// Print nothing; report through the exit status only.
        #[arg(long)]
        quiet: bool,
    },
    /// Decide every line of a corpus file and check its expectations.
    Corpus {
        file: PathBuf,
        /// Also compare each verdict with the bounded brute-force prover.
        #[arg(long)]
        cross_validate: bool,
        /// Height bound for the brute-force prover.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        max_visited: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            };
        }
    };
    match cli.command {
        Command::Prove { sequent, format, stats, max_visited, quiet } => {
            prove(&sequent, format, stats, max_visited, quiet, out, err)
        }
        Command::Corpus { file, cross_validate, depth, format, max_visited, quiet } => {
            corpus(&file, cross_validate, depth, format, max_visited, quiet, out, err)
        }
    }
}

fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Provable(_) => EXIT_PROVABLE,
        Verdict::Unprovable => EXIT_UNPROVABLE,
        Verdict::ResourceLimit => EXIT_LIMIT,
    }
}

fn stats_json(s: &Sequent, stats: &SearchStats) -> Value {
    let bounds = search_bounds(s);
    json!({
        "stats": stats,
        "bounds": {
            "weight": bounds.weight,
            "height_bound": bounds.height_bound,
            "subformula_count": bounds.subformula_count,
            "symbolic": bounds.symbolic(),
        },
    })
}

fn stats_lines(s: &Sequent, st: &SearchStats, prefix: &str) -> String {
    let b = search_bounds(s);
    format!(
        "{prefix}stats: nodes_expanded={} memo_hits={} max_stack_depth={} distinct_sequents={} root_weight={} max_weight_seen={} max_height_seen={}\n\
         {prefix}bounds: weight={} height_bound={} subformula_count={}\n\
         {prefix}space bound: {}\n",
        st.nodes_expanded,
        st.memo_hits,
        st.max_stack_depth,
        st.distinct_sequents,
        st.root_weight,
        st.max_weight_seen,
        st.max_height_seen,
        b.weight,
        b.height_bound,
        b.subformula_count,
        b.symbolic()
    )
}

fn prove(
    text: &str,
    format: Format,
    with_stats: bool,
    max_visited: Option<usize>,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let raw = match parse_sequent(text) {
        Ok(raw) => raw,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let s = raw.normalize();
    let cfg = SearchConfig { max_visited, emit_derivation: !quiet, ..SearchConfig::default() };
    let (verdict, stats) = decide(&s, &cfg);
    if quiet {
        return exit_code(&verdict);
    }
    let report = match format {
        Format::Text => {
            let mut o = format!("{}\n", verdict.label());
            if let Some(d) = verdict.derivation() {
                o.push_str(&d.render(Style::Text));
            }
            if with_stats {
                o.push_str(&stats_lines(&s, &stats, ""));
            }
            o
        }
        Format::Latex => {
            let mut o = format!("% {}\n", verdict.label());
            if let Some(d) = verdict.derivation() {
                o.push_str(&d.render(Style::Latex));
            }
            if with_stats {
                o.push_str(&stats_lines(&s, &stats, "% "));
            }
            o
        }
        Format::Json => {
            let mut v = json!({
                "input": text,
                "sequent": s.render(Style::Text),
                "verdict": verdict.label(),
                "derivation": verdict.derivation().map(|d| d.to_json()),
            });
            if with_stats {
                let extra = stats_json(&s, &stats);
                v["stats"] = extra["stats"].clone();
                v["bounds"] = extra["bounds"].clone();
            }
            format!("{v}\n")
        }
    };
    let _ = out.write_all(report.as_bytes());
    exit_code(&verdict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Expect {
    Provable,
    Unprovable,
}

struct Line {
    number: usize,
    text: String,
    expect: Option<Expect>,
}

/// One sequent per line, `#` starts a comment, and an optional trailing
/// `expect:provable` or `expect:unprovable`.
fn parse_corpus(content: &str) -> Result<Vec<Line>, String> {
    let mut lines = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let number = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let (text, expect) = match body.rfind("expect:") {
            None => (body, None),
            Some(at) => {
                let e = match body[at + "expect:".len()..].trim() {
                    "provable" => Expect::Provable,
                    "unprovable" => Expect::Unprovable,
                    other => return Err(format!("line {number}: unknown expectation '{other}'")),
                };
                (body[..at].trim(), Some(e))
            }
        };
        lines.push(Line { number, text: text.to_string(), expect });
    }
    Ok(lines)
}

struct Outcome {
    sequent: Sequent,
    verdict: Verdict,
    cross: Option<CrossReport>,
}

#[allow(clippy::too_many_arguments)]
fn corpus(
    file: &PathBuf,
    cross_validate: bool,
    depth: usize,
    format: Format,
    max_visited: Option<usize>,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let content = match std::fs::read_to_string(file) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", file.display());
            return EXIT_USAGE;
        }
    };
    let lines = match parse_corpus(&content) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut sequents = Vec::new();
    for line in &lines {
        match parse_sequent(&line.text) {
            Ok(raw) => sequents.push(raw.normalize()),
            Err(e) => {
                let _ = writeln!(err, "error: line {}: {e}", line.number);
                return EXIT_USAGE;
            }
        }
    }

    let cfg = SearchConfig { max_visited, ..SearchConfig::default() };
    let outcomes: Vec<Outcome> = sequents
        .into_par_iter()
        .map(|s| {
            let (verdict, _) = decide(&s, &cfg);
            let cross = cross_validate.then(|| {
                let cap = s.antecedent.as_star().leaf_count() + 3;
                cross_check(&s, &verdict, depth, &mut Oracle::new(cap))
            });
            Outcome { sequent: s, verdict, cross }
        })
        .collect();

    let mut mismatches = 0;
    let mut disagreements = 0;
    let mut counts = [0usize; 3];
    let mut items = Vec::new();
    let mut table = String::new();
    for (line, o) in lines.iter().zip(&outcomes) {
        let got = match o.verdict {
            Verdict::Provable(_) => Some(Expect::Provable),
            Verdict::Unprovable => Some(Expect::Unprovable),
            Verdict::ResourceLimit => None,
        };
        counts[match o.verdict {
            Verdict::Provable(_) => 0,
            Verdict::Unprovable => 1,
            Verdict::ResourceLimit => 2,
        }] += 1;
        let expect_ok = line.expect.map_or(true, |e| Some(e) == got);
        let cross_ok = o.cross.as_ref().map_or(true, CrossReport::is_clean);
        if !expect_ok {
            mismatches += 1;
        }
        if !cross_ok {
            disagreements += 1;
        }
        let expected = match line.expect {
            Some(Expect::Provable) => "provable",
            Some(Expect::Unprovable) => "unprovable",
            None => "-",
        };
        let status = if expect_ok && cross_ok { "ok" } else { "FAIL" };
        let oracle_note = match &o.cross {
            None => String::new(),
            Some(r) if r.is_clean() => "  oracle:agrees".to_string(),
            Some(r) => format!("  oracle:{}", r.disagreements[0].problem),
        };
        table.push_str(&format!(
            "{:>4}  {:<14}  {:<10}  {:<4}  {}{}\n",
            line.number,
            o.verdict.label(),
            expected,
            status,
            line.text,
            oracle_note
        ));
        items.push(json!({
            "line": line.number,
            "input": line.text,
            "sequent": o.sequent.render(Style::Text),
            "verdict": o.verdict.label(),
            "expected": line.expect.map(|_| expected),
            "ok": expect_ok && cross_ok,
            "derivation": o.verdict.derivation().map(|d| d.to_json()),
            "cross_validation": o.cross.as_ref().map(CrossReport::to_json),
        }));
    }
    let summary = format!(
        "{} sequents: {} provable, {} unprovable, {} resource-limit, {} expectation mismatches{}\n",
        outcomes.len(),
        counts[0],
        counts[1],
        counts[2],
        mismatches,
        if cross_validate { format!(", {disagreements} oracle disagreements") } else { String::new() }
    );
    if !quiet {
        let text = match format {
            Format::Json => format!(
                "{}\n",
                json!({
                    "items": items,
                    "summary": {
                        "sequents": outcomes.len(),
                        "provable": counts[0],
                        "unprovable": counts[1],
                        "resource_limit": counts[2],
                        "mismatches": mismatches,
                        "disagreements": disagreements,
                    },
                })
            ),
            Format::Text | Format::Latex => format!("{table}{summary}"),
        };
        let _ = out.write_all(text.as_bytes());
    }
    if mismatches + disagreements == 0 {
        EXIT_PROVABLE
    } else {
        EXIT_UNPROVABLE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_line_format() {
        let lines = parse_corpus("# header\n\np |- p expect:provable  # trailing\nq |- p\n").unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].number, 3);
        assert_eq!(lines[0].text, "p |- p");
        assert_eq!(lines[0].expect, Some(Expect::Provable));
        assert_eq!(lines[1].expect, None);
        assert!(parse_corpus("p |- p expect:maybe").is_err());
    }
}
