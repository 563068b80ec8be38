use std::ops::RangeInclusive;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tightlab::exact::format_rational;
use tightlab::floer::{d_invariant_lens, lens_index, SpinCLabel};
use tightlab::plumbing::{donaldson_obstruction, ObstructionVerdict, SearchOptions};
use tightlab::report::{grid, render_summary, render_text, verify, Status, VerifyOptions};
use tightlab::slopes::{enumerate_candidates, upper_bound};
use tightlab::surgery::LensSpace;

#[derive(Parser)]
#[command(
    name = "tightlab",
    version,
    about = "Exact checks for tight contact structures on small Seifert spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CheckFlags {
    /// Skip the diagonal lattice embedding search.
    #[arg(long)]
    no_embedding: bool,
    /// Extra dimensions for the embedding search (repeatable).
    #[arg(long = "margin", default_values_t = [0usize])]
    margins: Vec<usize>,
    /// Node budget for the embedding search.
    #[arg(long, default_value_t = SearchOptions::default().budget)]
    budget: u64,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

impl CheckFlags {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            embedding: !self.no_embedding,
            margins: self.margins.clone(),
            budget: self.budget,
            parallel: !self.sequential,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every check for one (p, n).
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        flags: CheckFlags,
    },
    /// Run every check over ranges such as `--p 2..5 --n 1..3`.
    Grid {
        #[arg(long, value_parser = parse_range)]
        p: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u64>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        flags: CheckFlags,
    },
    /// List the sign vectors surviving every overtwistedness filter.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Search for an embedding of W(p, n) into the diagonal lattice.
    Embed {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        margin: usize,
        #[arg(long, default_value_t = SearchOptions::default().budget)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// d-invariants of L(p, q) = p/q surgery on the unknot.
    Dinv {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Spin^c label (offset from the base spin structure); all labels if omitted.
        #[arg(long)]
        label: Option<i64>,
        /// Use -L(p, q).
        #[arg(long)]
        reversed: bool,
        #[arg(long)]
        json: bool,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(parse(a)?..=parse(b)?)
        }
        None => {
            let v = parse(s)?;
            Ok(v..=v)
        }
    }
}

/// Usage errors exit with 2, failed checks with 1.
enum Outcome {
    Ok,
    Failed,
}

fn check_pn(p: u64, n: u64) -> Result<(), String> {
    if p < 2 || n < 1 {
        return Err(format!("need p >= 2 and n >= 1, got p={p}, n={n}"));
    }
    Ok(())
}

fn warn_skips(reports: &[tightlab::report::VerificationReport]) {
    for r in reports {
        for c in &r.checks {
            if c.status == Status::Skipped("budget".into()) {
                eprintln!("warning: p={} n={}: {} skipped, {}", r.p, r.n, c.id, c.detail);
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Verify { p, n, json, flags } => {
            let r = verify(p, n, &flags.options())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                print!("{}", render_text(&r));
            }
            warn_skips(std::slice::from_ref(&r));
            Ok(if r.failed() > 0 { Outcome::Failed } else { Outcome::Ok })
        }
        Command::Grid { p, n, json, flags } => {
            let reports = grid(p, n, &flags.options())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    print!("{}", render_text(r));
                }
                print!("{}", render_summary(&reports));
            }
            warn_skips(&reports);
            Ok(if reports.iter().any(|r| r.failed() > 0) {
                Outcome::Failed
            } else {
                Outcome::Ok
            })
        }
        Command::Enumerate { p, n, json } => {
            let s = enumerate_candidates(p, n)?;
            let bound = upper_bound(p, n)?;
            if json {
                let v = serde_json::json!({ "p": p, "n": n, "survivors": s, "bound": bound });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                for q in &s {
                    println!("{q}");
                }
                println!("{} survivors, bound {bound}", s.len());
            }
            Ok(Outcome::Ok)
        }
        Command::Embed {
            p,
            n,
            margin,
            budget,
            json,
        } => {
            let verdict = donaldson_obstruction(p, n, margin, SearchOptions { budget, parallel: true })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&verdict)?);
            } else {
                match &verdict {
                    ObstructionVerdict::NoEmbeddingCertificate { certificate } => println!(
                        "no embedding into Z^{} ({} nodes searched)",
                        certificate.dimension, certificate.nodes
                    ),
                    ObstructionVerdict::EmbeddingFound { embedding } => {
                        println!("embedding found:");
                        for v in &embedding.vectors {
                            println!("  {v:?}");
                        }
                    }
                    ObstructionVerdict::BudgetExhausted { nodes } => {
                        println!("undecided: budget exhausted after {nodes} nodes")
                    }
                }
            }
            if let ObstructionVerdict::BudgetExhausted { .. } = verdict {
                eprintln!("warning: embedding search exhausted its budget");
            }
            Ok(Outcome::Ok)
        }
        Command::Dinv {
            p,
            q,
            label,
            reversed,
            json,
        } => {
            let mut lens = if p == 1 {
                LensSpace::sphere()
            } else {
                LensSpace::new(p, q)?
            };
            if reversed {
                lens = lens.reversed();
            }
            let labels: Vec<i64> = match label {
                Some(c) => vec![c],
                None => (0..p as i64).collect(),
            };
            let mut rows = Vec::new();
            for c in labels {
                let l = SpinCLabel::new(p, c)?;
                let d = d_invariant_lens(&lens, &l)?;
                rows.push((l.c.clone(), lens_index(&lens, &l)?, l.is_spin(), format_rational(&d)));
            }
            if json {
                let v: Vec<_> = rows
                    .iter()
                    .map(|(c, i, s, d)| serde_json::json!({ "label": c.to_string(), "index": i, "spin": s, "d": d }))
                    .collect();
                let doc = serde_json::json!({ "lens": lens.to_string(), "values": v });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("{lens}");
                for (c, i, s, d) in rows {
                    println!(
                        "  label {c:>3}  index {i:>3}  {}  d = {d}",
                        if s { "spin" } else { "    " }
                    );
                }
            }
            Ok(Outcome::Ok)
        }
    }
}

fn validate(cli: &Cli) -> Result<(), String> {
    match &cli.command {
        Command::Verify { p, n, .. } | Command::Enumerate { p, n, .. } | Command::Embed { p, n, .. } => {
            check_pn(*p, *n)
        }
        Command::Grid { p, n, .. } => {
            if !p.is_empty() && *p.start() < 2 || !n.is_empty() && *n.start() < 1 {
                return Err("grid ranges need p >= 2 and n >= 1".into());
            }
            Ok(())
        }
        Command::Dinv { p, .. } => {
            if *p == 0 {
                return Err("p must be positive".into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = validate(&cli) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli).context("tightlab") {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain()
                .any(|c| matches!(c.downcast_ref(), Some(tightlab::Error::InvalidParameters(_))))
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
