//! Batch driver for the construction and certification pipeline. Every
//! subcommand is a one-shot computation over a chosen prime field: sections
//! and analyses go to JSON files or stdout, and the exit code carries the
//! certification outcome so scripts can consume it directly:
//!   0 certified, 10 no certificate, 20 inconsistent routes,
//!   30 sampling failure, 1 usage or internal error.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use obstructio::barth::{BarthSection, Family, FamilySpec, SectionDoc, SectionSampler};
use obstructio::certify::{
    analyze_section, batch, run_pipeline, PipelineOptions, SurfaceAnalysis, Verdict,
};
use obstructio::cohomology::{self, ChiSpec};
use obstructio::gfp::PrimeField;
use obstructio::nodal::quadric_points;
use obstructio::quadric::QuadricContext;
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_PRIME: u64 = 31991;

#[derive(Parser)]
#[command(
    name = "obstructio",
    about = "Nodal quartic sections of the quadric threefold: construction, even sets, defects, and rationality obstructions over prime fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Prime of the ground field (at least 7)
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a symmetric section and write it (with its quartic) as JSON
    Generate {
        #[command(flatten)]
        field: FieldArgs,
        /// Family tag: E1, E2, E3, O1, O2 or O3
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Retry budget for degenerate samples
        #[arg(long, default_value_t = 8)]
        max_attempts: u32,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-analyze a stored section document
    Analyze {
        /// Path to a section JSON written by generate
        #[arg(long)]
        section: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample, analyze and print the verdict for one family and seed
    Certify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_attempts: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the pipeline over several seeds for each family
    Batch {
        #[command(flatten)]
        field: FieldArgs,
        /// Families to include (all six when omitted)
        #[arg(long)]
        family: Vec<Family>,
        /// Seeds per family
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = 8)]
        max_attempts: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fast internal consistency checks (no sampling over big fields)
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn field_context(prime: u64) -> Result<QuadricContext> {
    let field = PrimeField::new(prime).map_err(|e| anyhow!("bad prime {prime}: {e}"))?;
    Ok(QuadricContext::new(field))
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            std::fs::write(path, text.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn verdict_exit(v: Verdict) -> ExitCode {
    ExitCode::from(v.exit_code() as u8)
}

fn print_summary(a: &SurfaceAnalysis) {
    let verdict = match a.verdict {
        Verdict::Certified => "certified",
        Verdict::NoCertificate => "no_certificate",
        Verdict::Inconsistent => "inconsistent",
    };
    eprintln!(
        "{} over F_{}: {} nodes (reduced: {}), defect {} by ideal / [{}, {}] by resolution, verdict {}",
        a.family,
        a.prime,
        a.node_count,
        a.nodes_reduced,
        a.defect_groebner,
        a.defect_resolution_lo,
        a.defect_resolution_hi,
        verdict
    );
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            field,
            family,
            seed,
            max_attempts,
            out,
        } => {
            let qc = field_context(field.prime)?;
            let sampler = SectionSampler::new(&qc, family)
                .map_err(|e| anyhow!("sampler construction failed: {e}"))?;
            let mut section = None;
            for attempt in 0..max_attempts {
                match sampler.generate(&qc, seed + attempt as u64) {
                    Ok(s) => {
                        section = Some(s);
                        break;
                    }
                    Err(obstructio::barth::BarthError::Degenerate(msg)) => {
                        eprintln!("seed {}: degenerate ({msg})", seed + attempt as u64);
                    }
                    Err(e) => return Err(anyhow!("generation failed: {e}")),
                }
            }
            match section {
                Some(s) => {
                    write_json(&s.to_doc(&qc.ctx), out.as_ref())?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("no non-degenerate section in {max_attempts} attempts");
                    Ok(ExitCode::from(30))
                }
            }
        }
        Command::Analyze { section, out } => {
            let text = std::fs::read_to_string(&section)
                .with_context(|| format!("reading {}", section.display()))?;
            let doc: SectionDoc = serde_json::from_str(&text).context("parsing section JSON")?;
            let qc = field_context(doc.prime as u64)?;
            let sampler = SectionSampler::new(&qc, doc.family)
                .map_err(|e| anyhow!("sampler construction failed: {e}"))?;
            let sec = BarthSection::from_doc(&doc, &qc)
                .map_err(|e| anyhow!("section document rejected: {e}"))?;
            let analysis = analyze_section(&qc, &sampler, &sec, doc.seed, 1)
                .map_err(|e| anyhow!("analysis failed: {e}"))?;
            print_summary(&analysis);
            write_json(&analysis, out.as_ref())?;
            Ok(verdict_exit(analysis.verdict))
        }
        Command::Certify {
            field,
            family,
            seed,
            max_attempts,
            out,
        } => {
            let qc = field_context(field.prime)?;
            let sampler = SectionSampler::new(&qc, family)
                .map_err(|e| anyhow!("sampler construction failed: {e}"))?;
            let opts = PipelineOptions { max_attempts };
            match run_pipeline(&qc, &sampler, seed, &opts) {
                Ok(analysis) => {
                    print_summary(&analysis);
                    write_json(&analysis, out.as_ref())?;
                    Ok(verdict_exit(analysis.verdict))
                }
                Err(obstructio::certify::CertifyError::SamplingExhausted { attempts, last }) => {
                    eprintln!("no representative section in {attempts} attempts: {last}");
                    Ok(ExitCode::from(30))
                }
                Err(e) => Err(anyhow!("pipeline failed: {e}")),
            }
        }
        Command::Batch {
            field,
            family,
            seeds,
            base_seed,
            max_attempts,
            out,
        } => {
            let qc = field_context(field.prime)?;
            let families = if family.is_empty() {
                Family::all().to_vec()
            } else {
                family
            };
            let opts = PipelineOptions { max_attempts };
            let report = batch(&qc, &families, seeds, base_seed, &opts);
            let (certified, none, inconsistent, failed) = report.counts();
            eprintln!(
                "batch over F_{}: {certified} certified, {none} without certificate, {inconsistent} inconsistent, {failed} failed",
                qc.ctx.field.p
            );
            write_json(&report, out.as_ref())?;
            if inconsistent > 0 {
                Ok(ExitCode::from(20))
            } else if failed > 0 {
                Ok(ExitCode::from(30))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Selftest => selftest(),
    }
}

fn selftest() -> Result<ExitCode> {
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        println!("{} {name}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };

    // cohomology tables against Euler characteristics
    let mut chi_ok = true;
    for n in -6..=6i64 {
        chi_ok &= cohomology::h_o(0, n) - cohomology::h_o(1, n) + cohomology::h_o(2, n)
            - cohomology::h_o(3, n)
            == cohomology::chi_o(n);
        chi_ok &= cohomology::h_s(0, n) - cohomology::h_s(1, n) + cohomology::h_s(2, n)
            - cohomology::h_s(3, n)
            == cohomology::chi_s(n);
        chi_ok &= cohomology::h_ss(0, n) - cohomology::h_ss(1, n) + cohomology::h_ss(2, n)
            - cohomology::h_ss(3, n)
            == cohomology::chi_ss(n);
    }
    check("cohomology tables match Euler characteristics", chi_ok);

    // worked chi values
    check(
        "chi examples",
        cohomology::chi_f(1, ChiSpec::new(1, 20).unwrap()) == 0
            && cohomology::chi_f(3, ChiSpec::new(0, 24).unwrap()) == 24
            && cohomology::chi_fs(0, ChiSpec::new(0, 16).unwrap()) == 8,
    );

    // resolution route defects per family
    let defects_ok = FamilySpec::all()
        .iter()
        .all(|s| s.predicted_defect().exact() == Some(s.expected_defect));
    check("resolution defects are forced points", defects_ok);

    // section space dimensions
    let dims_ok = FamilySpec::all().iter().zip([53, 40, 35, 49, 50, 35]).all(
        |(s, d)| s.symmetric_dim() == d,
    );
    check("symmetric section space dimensions", dims_ok);

    // Clifford block squares to q
    let qc = field_context(101)?;
    let gamma = obstructio::quadric::clifford_gamma(&qc.ctx);
    let sq = obstructio::quadric::poly_mat_mul(&gamma, &gamma, &qc.ctx);
    let mut gamma_ok = true;
    for (i, row) in sq.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let want = if i == j {
                qc.q.clone()
            } else {
                obstructio::polyring::Poly::zero()
            };
            gamma_ok &= *e == want;
        }
    }
    check("Clifford block squares to q", gamma_ok);

    // rational point count of the quadric over F_7
    let qc7 = field_context(7)?;
    check("quadric over F_7 has 400 points", quadric_points(&qc7).len() == 400);

    // a fast end-to-end line-family run
    let sampler = SectionSampler::new(&qc, Family::O1)
        .map_err(|e| anyhow!("selftest sampler failed: {e}"))?;
    let a = run_pipeline(&qc, &sampler, 3, &PipelineOptions::default())
        .map_err(|e| anyhow!("selftest pipeline failed: {e}"))?;
    check(
        "O1 pipeline: 12 nodes, defect 1, routes agree",
        a.node_count == 12
            && a.defect_groebner == 1
            && a.sing_equals_even_set
            && a.verdict == Verdict::NoCertificate,
    );

    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
