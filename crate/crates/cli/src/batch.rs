use std::fs::{File, OpenOptions};
use std::io::Write;

use rayon::prelude::*;
use singmin::Error;

use crate::args::{split_scenario_line, BatchArgs, Command};
use crate::{execute, parse_args, Failure, Outcome, EXIT_USAGE};

/// What one scenario line produced.
struct LineResult {
    line: usize,
    command: String,
    code: i32,
    summary: String,
    output: Vec<u8>,
}

fn run_line(line: usize, text: &str, verbose: bool) -> Option<LineResult> {
    let mut output = Vec::new();
    let (code, summary) = match split_scenario_line(text) {
        Ok(None) => return None,
        Err(e) => (EXIT_USAGE, format!("line {line}: {e}")),
        Ok(Some(argv)) => match parse_args(&argv) {
            Err(e) => (EXIT_USAGE, e.to_string().lines().next().unwrap_or("").to_string()),
            Ok(cli) if matches!(cli.command, Command::Batch(_)) => (EXIT_USAGE, "batch files cannot nest".into()),
            Ok(mut cli) => {
                cli.verbose |= verbose;
                match execute(&cli, &mut output) {
                    Ok(o) => (o.code, o.summary),
                    Err(f) => {
                        let _ = writeln!(output, "error: {}", f.message);
                        (f.code, f.message)
                    }
                }
            }
        },
    };
    Some(LineResult {
        line,
        command: text.trim().to_string(),
        code,
        summary,
        output,
    })
}

pub(crate) fn run_batch(args: &BatchArgs, verbose: bool, out: &mut dyn Write) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.file.display())))?;
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let work = || -> Vec<LineResult> { lines.par_iter().filter_map(|&(n, l)| run_line(n, l, verbose)).collect() };
    let results = crate::pool(args.jobs)?.install(work);

    let mut summary = args.out.as_ref().map(|p| summary_writer(p)).transpose()?;
    let mut worst = 0;
    for r in &results {
        out.write_all(&r.output).map_err(Error::from)?;
        writeln!(out, "[line {}] exit {}: {}", r.line, r.code, r.summary).map_err(Error::from)?;
        if let Some(w) = summary.as_mut() {
            w.write_record([
                r.line.to_string(),
                r.command.clone(),
                r.code.to_string(),
                r.summary.clone(),
            ])
            .map_err(Error::from)?;
        }
        worst = worst.max(r.code);
    }
    if let Some(mut w) = summary {
        w.flush().map_err(Error::from)?;
    }
    Ok(Outcome {
        code: worst,
        summary: format!("{} scenarios, worst exit code {worst}", results.len()),
    })
}

fn summary_writer(path: &std::path::Path) -> Result<csv::Writer<File>, Failure> {
    let f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Failure::usage(format!("cannot open {}: {e}", path.display())))?;
    let fresh = f.metadata().map(|m| m.len() == 0).unwrap_or(true);
    let mut w = csv::Writer::from_writer(f);
    if fresh {
        w.write_record(["line", "command", "exit_code", "result"])
            .map_err(Error::from)?;
    }
    Ok(w)
}
