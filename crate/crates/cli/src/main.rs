//! `tdesign`: runs the verification suite and individual computations, and manages the
//! group cache.
//!
//! Exit codes: 0 when every reported claim holds (measurement commands always exit 0 on
//! success), 1 when a claim fails or a computation errors, 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use tdesign::covariance::{covariant_basis_search, is_covariant, triple_products, OperatorBasis, PhasePointBasis};
use tdesign::designs::{fmt_sig, min_3design_size, projective_design_check, DesignReport};
use tdesign::error::Error;
use tdesign::stabilizer::enumerate_stabilizer_states;
use tdesign::suite::{
    frame_potential, qubit_subgroup_potentials, rank3_divisor, rebuild_cache, run_criterion, suborbit_lengths, verify_all, Context,
    GroupKind, Method, SuiteConfig, DEFAULT_SEED,
};

#[derive(Parser, Debug)]
#[command(name = "tdesign", version, about = "Exact and numerical checks of Clifford groups as unitary designs")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Md, global = true)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Directory for enumerated group tables.
    #[arg(long, env = "TDESIGN_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Clifford,
    Restricted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Direct,
    FixedPoints,
    Orbits,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every acceptance criterion; `--only` restricts to a comma-separated list.
    VerifyAll {
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=14))]
        only: Vec<u32>,
    },
    /// Frame potential of the Clifford or restricted Clifford group.
    FramePotential {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, value_enum, default_value_t = GroupArg::Clifford)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = MethodArg::FixedPoints)]
        method: MethodArg,
    },
    /// Projective design check of the multiqubit stabilizer states.
    Stabilizer {
        #[arg(long)]
        qubits: u32,
        #[arg(long)]
        t: usize,
    },
    /// Rank-3 subgroup analysis of Sp(2n, 2).
    Rank3Scan {
        #[arg(long)]
        n: u32,
    },
    /// Covariant operator bases in dimension 2, 3 or 5.
    Covariance {
        #[arg(long)]
        dim: u32,
    },
    /// Smallest third frame potential over proper subgroups of the qubit Clifford group.
    SubgroupMin {
        #[arg(long)]
        dim: u32,
    },
    /// Group cache maintenance.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Re-enumerate every group into the cache directory.
    Rebuild,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unsupported(_) | Error::SizeLimit { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

/// Reports plus free-form notes printed after markdown tables, and whether a failed
/// claim should set the exit code.
struct Output {
    reports: Vec<DesignReport>,
    notes: Vec<String>,
    claims: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = render(&out, cli.format) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if out.claims && out.reports.iter().any(|r| !r.pass) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let ctx = Context::new(cli.seed, cli.cache_dir.clone());
    let claims = |reports| Output { reports, notes: Vec::new(), claims: true };
    match &cli.command {
        Command::VerifyAll { only } => {
            if only.is_empty() || only.contains(&14) {
                let config = SuiteConfig { seed: cli.seed, cache_dir: cli.cache_dir.clone(), threads: None };
                let outcome = verify_all(&config)?;
                let keep = |id| only.is_empty() || only.contains(&id);
                let notes = outcome
                    .criteria
                    .iter()
                    .filter(|c| keep(c.id))
                    .map(|c| format!("criterion {:>2} {}: {}", c.id, if c.pass() { "PASS" } else { "FAIL" }, c.title))
                    .collect();
                let reports = outcome.criteria.into_iter().filter(|c| keep(c.id)).flat_map(|c| c.reports).collect();
                Ok(Output { reports, notes, claims: true })
            } else {
                let mut ids = only.clone();
                ids.sort_unstable();
                ids.dedup();
                let results = ids.iter().map(|&id| run_criterion(&ctx, id)).collect::<Result<Vec<_>, _>>()?;
                let notes = results.iter().map(|c| format!("criterion {:>2} {}: {}", c.id, if c.pass() { "PASS" } else { "FAIL" }, c.title)).collect();
                Ok(Output { reports: results.into_iter().flat_map(|c| c.reports).collect(), notes, claims: true })
            }
        }
        Command::FramePotential { dim, t, group, method } => {
            let group = match group {
                GroupArg::Clifford => GroupKind::Clifford,
                GroupArg::Restricted => GroupKind::Restricted,
            };
            let method = match method {
                MethodArg::Direct => Method::Direct,
                MethodArg::FixedPoints => Method::FixedPoints,
                MethodArg::Orbits => Method::Orbits,
            };
            let v = frame_potential(&ctx, *dim, *t, group, method)?;
            let name = if group == GroupKind::Clifford { "clifford" } else { "restricted" };
            let expected = v.gamma.map_or_else(|| "unknown".to_string(), |g| g.to_string());
            let mut value = v.display();
            if v.exact.is_none() {
                value = format!("{value} (rounds to {})", v.approx.round());
            }
            let report = DesignReport::new(
                format!("Phi_{t}({name})"),
                method.name(),
                format!("d={dim} t={t}"),
                value,
                expected,
                v.is_design().unwrap_or(false),
            )
            .with_seed(cli.seed);
            Ok(Output { reports: vec![report], notes: vec![v.verdict(*t)], claims: false })
        }
        Command::Stabilizer { qubits, t } => {
            let states: Vec<Vec<C64>> = enumerate_stabilizer_states(2, *qubits)?.into_iter().map(|s| s.vector).collect();
            let r = projective_design_check(&states, *t)?;
            let params = format!("n={qubits} t={t} states={}", r.states);
            let reports = vec![
                DesignReport::new(
                    "symmetric-projector check",
                    "projector sum",
                    params.clone(),
                    fmt_sig(r.frobenius_error / r.states as f64),
                    "<= 1e-8",
                    r.pass,
                ),
                DesignReport::numeric("projective frame potential", "pair sum", params, r.frame_potential, r.expected_frame_potential, 1e-10),
            ];
            let verdict = format!("projective {t}-design: {}", if r.pass { "yes" } else { "no" });
            Ok(Output { reports: reports.into_iter().map(|r| r.with_seed(cli.seed)).collect(), notes: vec![verdict], claims: false })
        }
        Command::Rank3Scan { n } => match n {
            2 => {
                let mut reports = run_criterion(&ctx, 7)?.reports;
                reports.truncate(2);
                reports.extend(run_criterion(&ctx, 8)?.reports);
                Ok(claims(reports))
            }
            3 => {
                let (sizes, rank) = suborbit_lengths(&ctx, 3)?;
                let mut reports = vec![
                    DesignReport::exact("suborbit lengths", "point stabilizer orbits", "Sp(6,2)", format!("{sizes:?}"), "[30, 32]".to_string()),
                    DesignReport::exact("rank on nonzero vectors", "point stabilizer orbits", "Sp(6,2)", rank, 3),
                ];
                reports.extend(run_criterion(&ctx, 9)?.reports);
                Ok(Output {
                    reports: reports.into_iter().map(|r| r.with_seed(cli.seed)).collect(),
                    notes: vec![format!("subgroup scan of Sp(6,2) is out of range; a rank-3 subgroup needs order divisible by {}", rank3_divisor(3))],
                    claims: true,
                })
            }
            _ => Err(Failure::Usage(format!("rank3-scan supports n = 2 or 3, got {n}"))),
        },
        Command::Covariance { dim } => covariance(&ctx, *dim, cli.seed).map(claims),
        Command::SubgroupMin { dim } => {
            if *dim != 2 {
                return Err(Failure::Usage(format!("subgroup-min supports --dim 2, got {dim}")));
            }
            let scan = qubit_subgroup_potentials(&ctx)?;
            let min = scan.iter().map(|(_, v)| *v).min().unwrap_or_default();
            let five = tdesign::clifford::Rational::from(5);
            let reports = vec![
                DesignReport::new("smallest Phi_3 over proper subgroups", "subgroup scan", format!("d=2, {} subgroups", scan.len()), min, "> 5", min > five),
                DesignReport::exact("proper subgroups with Phi_3 = 5", "subgroup scan", "d=2", scan.iter().filter(|(_, v)| *v == five).count(), 0),
                DesignReport::exact("minimal 3-design size", "closed form", "d=2", min_3design_size(2), 20),
            ];
            Ok(claims(reports.into_iter().map(|r| r.with_seed(cli.seed)).collect()))
        }
        Command::Cache { action: CacheAction::Rebuild } => {
            let dir = cli.cache_dir.as_ref().ok_or_else(|| Failure::Usage("cache rebuild needs --cache-dir or TDESIGN_CACHE_DIR".into()))?;
            let written = rebuild_cache(dir)?;
            let reports = written
                .iter()
                .map(|p| DesignReport::new("cache file written", "enumeration", p.display().to_string(), true, true, true))
                .collect();
            Ok(claims(reports))
        }
    }
}

fn covariance(ctx: &Context, dim: u32, seed: u64) -> Result<Vec<DesignReport>, Failure> {
    let mut reports = Vec::new();
    match dim {
        2 => {
            let g = ctx.clifford(2, 1)?;
            let search = covariant_basis_search(&g, 16, seed)?;
            let pauli = is_covariant(&OperatorBasis::displacements(2, 1)?, &g.unitaries())?;
            reports.push(DesignReport::exact("index-4 subgroups searched", "subgroup scan", "d=2", search.subgroups, 4));
            reports.push(DesignReport::exact("covariant basis found", "fixed-space orbits", "d=2", search.found(), false));
            reports.push(DesignReport::exact("Pauli basis permuted transitively", "conjugation matching", "d=2", pauli.covariant(), false));
        }
        3 => {
            let g = ctx.clifford(3, 1)?;
            let pp = PhasePointBasis::new(3)?.basis;
            let cov = is_covariant(&pp, &g.unitaries())?;
            let tp = triple_products(&pp);
            let search = covariant_basis_search(&g, 4, seed)?;
            reports.push(DesignReport::exact("phase-point basis covariant and transitive", "conjugation matching", "d=3", cov.covariant() && cov.exact, true));
            reports.push(DesignReport::exact("phase-point triple products all real", "clustered traces", "d=3", tp.all_real, false));
            reports.push(DesignReport::exact("covariant basis found (control)", "fixed-space orbits", "d=3", search.found(), true));
        }
        5 => {
            let pp = PhasePointBasis::new(5)?.basis;
            let d = 5.0;
            let mut err = 0.0f64;
            for (i, a) in pp.ops().iter().enumerate() {
                for (j, b) in pp.ops().iter().enumerate() {
                    let want = if i == j { d } else { 0.0 };
                    err = err.max((a.trace_product(b) - C64::new(want, 0.0)).norm());
                }
            }
            reports.push(DesignReport::new("tr(A_mu A_nu) = d delta", "dense traces", "d=5", fmt_sig(err), "<= 1e-9", err <= 1e-9));
            reports.push(DesignReport::exact("phase-point triple products all real", "clustered traces", "d=5", triple_products(&pp).all_real, false));
        }
        _ => return Err(Failure::Usage(format!("covariance supports --dim 2, 3 or 5, got {dim}"))),
    }
    Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
}

fn render(out: &Output, format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Json => {
            for r in &out.reports {
                writeln!(w, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for r in &out.reports {
                csv.serialize(r)?;
            }
            csv.flush()?;
        }
        Format::Md => {
            writeln!(w, "| claim | params | method | expected | computed | pass |")?;
            writeln!(w, "|---|---|---|---|---|---|")?;
            for r in &out.reports {
                let cell = |s: &str| s.replace('|', "\\|");
                writeln!(
                    w,
                    "| {} | {} | {} | {} | {} | {} |",
                    cell(&r.claim),
                    cell(&r.params),
                    cell(&r.method),
                    cell(&r.expected),
                    cell(&r.value),
                    if r.pass { "yes" } else { "no" }
                )?;
            }
            if !out.notes.is_empty() {
                writeln!(w)?;
                for n in &out.notes {
                    writeln!(w, "{n}")?;
                }
            }
        }
    }
    Ok(())
}
