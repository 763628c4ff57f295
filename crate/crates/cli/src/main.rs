mod args;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::Parser;
use facmod::bounds::{ratio_sweep, SweepParams};
use facmod::constructions::{
    classify_power_residues, distinct_record, find_primroot_factorial, guy_row, guy_summary, nonresidue_spacings,
    power_class_main_term, primroot_count_report, scan_primes, search_representation, wilson_representation,
};
use facmod::moments::{moment_report, MomentKind};
use facmod::refcheck::{compare, Comparison, OracleTarget};
use facmod::repcount::{discrepancy, fixed_sum_table, max_multiplicity, representation_table};
use facmod::spectrum::{additive_spectrum, multiplicative_spectrum, PhasePolynomial};
use facmod::sweep::{ordered_map, try_ordered_map};
use facmod::{Error, PrimeContext, SequenceKind, Window};
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, CountWhich, MomentWhich, OracleWhich, SpectrumWhich, WindowArgs};
use output::Records;

/// A fast path disagreed with its oracle.
#[derive(Debug)]
struct OracleMismatch(usize);

impl std::fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} oracle comparison(s) failed", self.0)
    }
}

impl std::error::Error for OracleMismatch {}

/// An argument is missing or outside its domain.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

struct Outcome {
    records: Records,
    /// lines for stderr, suppressed by --quiet
    summary: Vec<String>,
}

impl Outcome {
    fn new(records: Records) -> Self {
        Outcome {
            records,
            summary: Vec::new(),
        }
    }

    fn note(mut self, line: String) -> Self {
        self.summary.push(line);
        self
    }
}

fn context(p: u64, kind: SequenceKind) -> Result<PrimeContext> {
    Ok(PrimeContext::new(p, kind)?)
}

fn window_context(w: &WindowArgs) -> Result<(PrimeContext, Window)> {
    Ok((context(w.p, w.sequence)?, Window::new(w.h, w.n)))
}

fn phase(f: &Option<args::List>, p: u64) -> Result<PhasePolynomial> {
    match f {
        None => Ok(PhasePolynomial::zero()),
        Some(list) => Ok(PhasePolynomial::new(&list.0, p)?),
    }
}

fn primes_in(range: args::Pair) -> Result<Vec<u64>> {
    Ok(scan_primes(range.0, range.1)?)
}

#[derive(Serialize)]
struct TableRow<'a> {
    p: u64,
    a: u64,
    #[serde(rename = "G_ell")]
    g_ell: &'a str,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let jobs = cli.global.jobs;
    Ok(match &cli.command {
        Command::Ctx { p, kind } => Outcome::new(Records::one(&context(*p, *kind)?.summary())?),

        Command::Spectrum {
            window,
            f,
            which,
            binary,
        } => {
            let (ctx, w) = window_context(window)?;
            let spectrum = match which {
                SpectrumWhich::Mult => multiplicative_spectrum(&ctx, &phase(f, ctx.p())?, w)?,
                SpectrumWhich::Add => {
                    if f.is_some() {
                        return usage("--f applies to --which mult only");
                    }
                    additive_spectrum(&ctx, w)?
                }
            };
            if let Some(path) = binary {
                let file = std::fs::File::create(path)?;
                spectrum.write_binary(std::io::BufWriter::new(file))?;
            }
            let rows: Vec<_> = spectrum.rows().collect();
            Outcome::new(Records::many(&rows)?)
        }

        Command::Moments { window, ell, which, f } => {
            let (ctx, w) = window_context(window)?;
            let kind = match which {
                MomentWhich::I => MomentKind::I,
                MomentWhich::J => MomentKind::J,
                MomentWhich::T => MomentKind::T,
                MomentWhich::S => MomentKind::S,
            };
            if f.is_some() && kind != MomentKind::T {
                return usage("--f applies to --which T only");
            }
            let report = moment_report(&ctx, w, *ell, kind, &phase(f, ctx.p())?)?;
            Outcome::new(Records::one(&report)?)
        }

        Command::Counts {
            window,
            ell,
            which,
            a,
            sum_n,
            allow_large,
        } => {
            let (ctx, w) = window_context(window)?;
            let p = ctx.p();
            match which {
                CountWhich::F => {
                    let table = representation_table(&ctx, w, *ell)?;
                    let rows: Vec<_> = match a {
                        Some(a) if *a >= p => return usage(format!("--a {a} must lie in 0..={}", p - 1)),
                        Some(a) => table.rows().filter(|r| r.a == *a).collect(),
                        None => table.rows().collect(),
                    };
                    Outcome::new(Records::many(&rows)?)
                }
                CountWhich::V => {
                    let v = representation_table(&ctx, w, *ell)?.support_size();
                    Outcome::new(Records::one(&json!({"p": p, "H": w.offset, "N": w.len, "ell": ell, "V": v}))?)
                }
                CountWhich::G => {
                    let n = sum_n.unwrap_or(w.len);
                    let table = fixed_sum_table(&ctx, n, *ell, *allow_large)?;
                    let counts: Vec<String> = table.iter().map(|c| c.to_string()).collect();
                    let rows: Vec<TableRow> = match a {
                        Some(a) if *a >= p => return usage(format!("--a {a} must lie in 0..={}", p - 1)),
                        Some(a) => vec![TableRow {
                            p,
                            a: *a,
                            g_ell: &counts[*a as usize],
                        }],
                        None => (0..p)
                            .map(|a| TableRow {
                                p,
                                a,
                                g_ell: &counts[a as usize],
                            })
                            .collect(),
                    };
                    Outcome::new(Records::many(&rows)?)
                }
                CountWhich::D => {
                    let Some(a) = a else {
                        return usage(format!("--which D needs --a (a multiplier in 1..={})", p - 1));
                    };
                    Outcome::new(Records::one(&discrepancy(&ctx, *a, w, *ell)?)?)
                }
                CountWhich::MaxF => {
                    let (a, count) = max_multiplicity(&ctx, w)?;
                    Outcome::new(Records::one(&json!({"p": p, "H": w.offset, "N": w.len, "a": a, "count": count}))?)
                }
            }
        }

        Command::Repr { p, a, ell, max_n } => {
            let ctx = context(*p, SequenceKind::Factorial)?;
            let tuple = search_representation(&ctx, *a, *ell, *max_n)?;
            let record = json!({
                "p": p, "a": a, "ell": ell, "max_n": max_n,
                "found": tuple.is_some(), "tuple": tuple,
            });
            let line = match &tuple {
                Some(t) => {
                    let terms: Vec<String> = t.iter().map(|n| format!("{n}!")).collect();
                    format!("{} = {a} (mod {p})", terms.join(" * "))
                }
                None => format!("NotFound: no {ell}-fold product with n_i <= {max_n} is {a} mod {p}"),
            };
            Outcome::new(Records::one(&record)?).note(line)
        }

        Command::Wilson { p, a } => {
            let w = wilson_representation(&context(*p, SequenceKind::Factorial)?, *a)?;
            let line = w.render();
            Outcome::new(Records::one(&w)?).note(line)
        }

        Command::Spacings { p, j } => {
            let r = nonresidue_spacings(&context(*p, SequenceKind::Factorial)?, *j)?;
            if !r.identity_holds() {
                return Err(Error::Inconsistency(format!(
                    "alternating sum {} differs from Legendre sum {}",
                    r.alt_sum, r.legendre_sum
                ))
                .into());
            }
            Outcome::new(Records::one(&r)?)
        }

        Command::Primroot {
            p,
            m,
            window,
            range,
            sequence,
        } => match (p, range) {
            (Some(p), None) => {
                let ctx = context(*p, *sequence)?;
                let w = match window {
                    Some(pair) => Window::new(pair.0, pair.1),
                    None => Window::new(0, sequence.last_nonzero(*p)),
                };
                let report = primroot_count_report(&ctx, *m, w)?;
                let smallest = find_primroot_factorial(&ctx);
                Outcome::new(Records::one(&json!({"count": report, "smallest": smallest}))?)
            }
            (None, Some(range)) => {
                if window.is_some() || *m != 1 {
                    return usage("--range reports the smallest n per prime; --m and --window need --p");
                }
                let primes = primes_in(*range)?;
                let rows = try_ordered_map(&primes, jobs, |&q| {
                    PrimeContext::new(q, *sequence).map(|ctx| find_primroot_factorial(&ctx))
                })?;
                let missing = rows.iter().filter(|r| r.n.is_none()).count();
                Outcome::new(Records::many(&rows)?)
                    .note(format!("{} primes, {missing} without a primitive-root term", rows.len()))
            }
            _ => return usage("give exactly one of --p or --range"),
        },

        Command::PowerClasses { window, r } => {
            let (ctx, w) = window_context(window)?;
            let count = classify_power_residues(&ctx, &r.0, w)?;
            Outcome::new(Records::one(&json!({
                "p": ctx.p(), "R": r.0, "Q": ctx.order_divisors(), "H": w.offset, "N": w.len,
                "count": count, "main_term": power_class_main_term(&ctx, &r.0, w.len),
            }))?)
        }

        Command::ScanDistinct { range } => {
            let primes = primes_in(*range)?;
            let records = ordered_map(&primes, jobs, |&p| distinct_record(p));
            let hits: Vec<u64> = records.iter().filter(|r| r.is_distinct).map(|r| r.p).collect();
            if let Some(bad) = records.iter().find(|r| r.p >= 5 && r.matches_prediction == Some(false)) {
                return Err(Error::Inconsistency(format!(
                    "p={} has distinct factorials but misses the predicted residue or p mod 8",
                    bad.p
                ))
                .into());
            }
            Outcome::new(Records::many(&records)?).note(format!(
                "{} primes scanned, {} with distinct residues {:?}",
                records.len(),
                hits.len(),
                hits
            ))
        }

        Command::Bounds {
            kind,
            range,
            ell,
            r,
            j,
            eps,
        } => {
            let mut sp = SweepParams::for_kind(*kind);
            sp.ell = ell.unwrap_or(sp.ell);
            sp.r = r.unwrap_or(sp.r);
            sp.j = *j;
            sp.eps = *eps;
            let primes = primes_in(*range)?;
            let sweep = ratio_sweep(*kind, &primes, &sp, jobs)?;
            let line = format!(
                "{}: {} primes, max ratio {:.6} at p={}",
                kind,
                sweep.reports.len(),
                sweep.max_ratio,
                sweep.argmax_p.map_or("-".into(), |p| p.to_string())
            );
            Outcome::new(Records::many(&sweep.reports)?).note(line)
        }

        Command::GuyF11 { range } => {
            let primes = primes_in(*range)?;
            let report = guy_summary(ordered_map(&primes, jobs, |&p| guy_row(p)));
            let line = format!(
                "{} primes, mean V1/p = {:.6} (1 - 1/e = {:.6}), std dev {:.6}",
                report.count, report.mean, report.target, report.std_dev
            );
            let records = match cli.global.format {
                args::Format::Json => Records::one(&report)?,
                args::Format::Csv => Records::many(&report.rows)?,
            };
            Outcome::new(records).note(line)
        }

        Command::OracleDiff { window, ell, which } => {
            let (ctx, w) = window_context(window)?;
            let targets: Vec<OracleTarget> = match which {
                OracleWhich::All => OracleTarget::ALL.to_vec(),
                OracleWhich::I => vec![OracleTarget::I],
                OracleWhich::J => vec![OracleTarget::J],
                OracleWhich::F => vec![OracleTarget::F],
                OracleWhich::V => vec![OracleTarget::V],
                OracleWhich::G => vec![OracleTarget::G],
                OracleWhich::D => vec![OracleTarget::D],
            };
            let mut rows: Vec<Comparison> = Vec::new();
            let mut summary = Vec::new();
            for t in targets {
                let batch = compare(&ctx, w, *ell, t)?;
                let failed = batch.iter().filter(|c| !c.pass).count();
                summary.push(format!(
                    "{} {:?}: {} comparisons, {failed} mismatches",
                    if failed == 0 { "PASS" } else { "FAIL" },
                    t,
                    batch.len()
                ));
                rows.extend(batch);
            }
            let failed = rows.iter().filter(|c| !c.pass).count();
            let outcome = Outcome {
                records: Records::many(&rows)?,
                summary,
            };
            if failed > 0 {
                return Err(anyhow!(OracleMismatch(failed)).context(outcome.summary.join("\n")));
            }
            outcome
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<OracleMismatch>().is_some() {
        return 3;
    }
    if let Some(e) = err.downcast_ref::<Error>() {
        return if matches!(e, Error::Inconsistency(_)) { 3 } else { 2 };
    }
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = run(&cli).and_then(|outcome| {
        let data = outcome.records.render(cli.global.format)?;
        let parameters = serde_json::to_value(&cli)?;
        output::emit(
            &data,
            cli.global.out.as_deref(),
            cli.command.name(),
            parameters,
            outcome.records.len(),
            started.elapsed().as_secs_f64(),
        )?;
        if !cli.global.quiet {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&anyhow!(Error::NotPrime(9))), 2);
        assert_eq!(exit_code(&anyhow!(Error::Inconsistency("x".into()))), 3);
        assert_eq!(exit_code(&anyhow!(OracleMismatch(1)).context("detail")), 3);
        assert_eq!(exit_code(&anyhow!(Usage("flag".into()))), 2);
        assert_eq!(exit_code(&anyhow!("io")), 1);
    }
}
