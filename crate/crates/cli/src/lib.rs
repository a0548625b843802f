//! Command-line front end: region listings, gap sweeps, projection
//! cross-checks and gDoF curves as CSV or JSON.

pub mod grid;
pub mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use ccic_core::certify::{
    certify_gap_sweep, fme_check, gdof_estimate, FmeCheckOptions, TrialStatus, CERTIFY_TOL, FME_TOL,
};
use ccic_core::channel::{classify_regime_absolute, db_to_linear, linear_to_db, SymmetricParams};
use ccic_core::inner::{inner_regime, Scheme};
use ccic_core::outer::{outer_regime, outer_symmetric};
use ccic_core::polytope::RatePolytope;
use ccic_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Cell, Meta, Table};

#[derive(Parser, Debug)]
#[command(name = "ccic", version, about = "Capacity bounds for the causal cognitive interference channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized checks, recorded in every header
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Tolerance override in bits (projection check agreement)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Outer,
    Inner,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Constraints and vertices of the regime outer and inner regions
    Region {
        #[arg(long, allow_negative_numbers = true)]
        snr_db: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
    },
    /// Gap between the regime regions over a grid of points
    GapSweep {
        /// `snr_db=10:60:10;alpha=0.1:0.9:0.1;beta=0.05:1.95:0.1`; missing keys use these defaults
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        snr_db: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Numeric projection of the raw achievable systems against the closed forms
    FmeCheck {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Add this many bits to every closed-form bound (fault injection)
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb: f64,
        /// Skip the vertex-enumeration projection
        #[arg(long)]
        no_vertex: bool,
    },
    /// Normalized sum capacity bounds along an SNR ladder
    Gdof {
        /// Range or list of interference exponents
        #[arg(long, default_value = "0:2:0.25")]
        alpha: String,
        /// Range or list of cooperation exponents
        #[arg(long, default_value = "0")]
        beta: String,
        /// SNR ladder in dB, ascending
        #[arg(long, default_value = "60,80,100,120")]
        snr_db: String,
    },
}

/// Failure of a command: usage errors exit with 2, failed checks with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Check(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Check(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SnrTooSmall(_) => CliError::Usage("S must exceed 1 in linear scale".into()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Result of a command: the table plus an optional check failure raised
/// after the table has been written.
struct Report {
    meta: Meta,
    table: Table,
    summary: Option<String>,
    failure: Option<String>,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let report = match &cli.command {
        Command::Region { snr_db, alpha, beta, which } => region(*snr_db, *alpha, *beta, *which, &cli.common)?,
        Command::GapSweep { grid, snr_db, alpha, beta } => {
            gap_sweep(grid.as_deref(), *snr_db, *alpha, *beta, &cli.common)?
        }
        Command::FmeCheck { trials, perturb, no_vertex } => fme(*trials, *perturb, !no_vertex, &cli.common)?,
        Command::Gdof { alpha, beta, snr_db } => gdof(alpha, beta, snr_db, &cli.common)?,
    };
    match &cli.common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(&mut w, cli.common.format, &report)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            emit(&mut w, cli.common.format, &report)?;
        }
    }
    if let Some(s) = &report.summary {
        eprintln!("{s}");
    }
    match report.failure {
        Some(f) => Err(CliError::Check(f)),
        None => Ok(()),
    }
}

fn emit<W: Write>(w: &mut W, format: Format, r: &Report) -> std::io::Result<()> {
    match format {
        Format::Csv => output::write_csv(w, &r.meta, &r.table),
        Format::Json => output::write_json(w, &r.meta, &r.table),
    }
}

fn symmetric(snr_db: f64, alpha: f64, beta: f64) -> Result<SymmetricParams, CliError> {
    if !snr_db.is_finite() {
        return Err(CliError::Usage(format!("--snr-db must be finite, got {snr_db}")));
    }
    Ok(SymmetricParams::new(db_to_linear(snr_db), alpha, beta)?)
}

fn region_rows(t: &mut Table, name: &str, p: &RatePolytope) -> Result<(), CliError> {
    for c in &p.constraints {
        t.push(vec![
            name.into(),
            "constraint".into(),
            c.label.clone().unwrap_or_default().into(),
            c.coeff_p.into(),
            c.coeff_c.into(),
            c.rhs.into(),
            c.constant.into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for (k, v) in p.vertices()?.iter().enumerate() {
        t.push(vec![
            name.into(),
            "vertex".into(),
            format!("v{k}").into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            v[0].into(),
            v[1].into(),
        ]);
    }
    Ok(())
}

fn region(snr_db: f64, alpha: f64, beta: f64, which: Which, common: &Common) -> Result<Report, CliError> {
    let (s, i, c) = symmetric(snr_db, alpha, beta)?.gains();
    let regime = classify_regime_absolute(s, i, c)?;
    let mut t = Table::new(&["region", "kind", "label", "coeff_p", "coeff_c", "rhs", "constant", "rp", "rc"]);
    if matches!(which, Which::Outer | Which::Both) {
        let outer = if regime.is_blue() { outer_symmetric(s, i, c)? } else { outer_regime(s, i, c, regime)? };
        region_rows(&mut t, "outer", &outer)?;
    }
    if matches!(which, Which::Inner | Which::Both) {
        if regime.is_blue() {
            return Err(CliError::Usage(format!("no inner region is implemented for the {} regime", regime.tag())));
        }
        let (inner, collapsed) = inner_regime(s, i, c, regime)?.or_origin();
        if collapsed {
            eprintln!("inner region has a negative bound at this point; reporting the origin");
        }
        region_rows(&mut t, "inner", &inner)?;
    }
    Ok(Report {
        meta: Meta { command: "region", seed: common.seed, tolerances: vec![] },
        table: t,
        summary: Some(format!("regime {}", regime.tag())),
        failure: None,
    })
}

fn gap_sweep(
    grid: Option<&str>,
    snr_db: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    common: &Common,
) -> Result<Report, CliError> {
    let mut axes = match grid {
        Some(g) => grid::parse_grid(g).map_err(CliError::Usage)?,
        None => Default::default(),
    };
    for (key, single, default) in [
        ("snr_db", snr_db, "10:60:10"),
        ("alpha", alpha, "0.1:0.9:0.1"),
        ("beta", beta, "0.05:1.95:0.1"),
    ] {
        if let Some(v) = single {
            axes.insert(key.to_owned(), vec![v]);
        }
        if !axes.contains_key(key) {
            axes.insert(key.to_owned(), grid::parse_range(default).map_err(CliError::Usage)?);
        }
    }
    let snrs: Vec<f64> = axes["snr_db"].iter().map(|&d| db_to_linear(d)).collect();
    let reports = certify_gap_sweep(&snrs, &axes["alpha"], &axes["beta"])?;
    let mut t = Table::new(&["snr_db", "alpha", "beta", "regime", "gap_bits", "budget_bits", "certified"]);
    let mut uncertified = 0;
    for r in &reports {
        let status = if r.external {
            "external"
        } else if r.certified {
            "true"
        } else {
            uncertified += 1;
            "false"
        };
        t.push(vec![
            linear_to_db(r.snr).into(),
            r.alpha.into(),
            r.beta.into(),
            r.regime.tag().into(),
            r.gap.into(),
            r.budget.into(),
            status.into(),
        ]);
    }
    let own = reports.iter().filter(|r| !r.external).count();
    let summary = format!("{}/{own} points certified, {} external", own - uncertified, reports.len() - own);
    Ok(Report {
        meta: Meta { command: "gap-sweep", seed: common.seed, tolerances: vec![("certify_tol", CERTIFY_TOL)] },
        table: t,
        failure: (uncertified > 0).then(|| format!("{uncertified} uncertified points")),
        summary: Some(summary),
    })
}

fn fme(trials: usize, perturb: f64, vertex_oracle: bool, common: &Common) -> Result<Report, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let tol = common.tol.unwrap_or(FME_TOL);
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let opts = FmeCheckOptions { tol, vertex_oracle, perturb };
    let s = fme_check(common.seed, trials, &[Scheme::E1, Scheme::E2], &opts)?;
    let mut t = Table::new(&["trial", "scheme", "status", "dev_fme", "dev_vertex", "reason"]);
    for tr in &s.trials {
        let (status, reason) = match &tr.status {
            TrialStatus::Pass => ("pass", String::new()),
            TrialStatus::Fail => ("fail", String::new()),
            TrialStatus::Skipped(r) => ("skipped", r.clone()),
        };
        let dev = if matches!(tr.status, TrialStatus::Skipped(_)) { None } else { Some(tr.dev_fme) };
        t.push(vec![tr.index.into(), tr.scheme.tag().into(), status.into(), dev.into(), tr.dev_vertex.into(), reason.into()]);
    }
    let line = |sc: Option<Scheme>| {
        let ran = s.passed(sc) + s.failed(sc);
        format!("{}/{ran} pass, {} skipped, max dev {:.3e}", s.passed(sc), s.skipped(sc), s.max_dev(sc))
    };
    let summary = format!("E1: {}; E2: {}; all: {}", line(Some(Scheme::E1)), line(Some(Scheme::E2)), line(None));
    let mut tolerances = vec![("tol", tol)];
    if perturb != 0.0 {
        tolerances.push(("perturb", perturb));
    }
    Ok(Report {
        meta: Meta { command: "fme-check", seed: common.seed, tolerances },
        table: t,
        failure: (s.failed(None) > 0).then(|| format!("{} trials differ by more than {tol:e} bits", s.failed(None))),
        summary: Some(summary),
    })
}

fn gdof(alpha: &str, beta: &str, snr_db: &str, common: &Common) -> Result<Report, CliError> {
    let alphas = grid::parse_range(alpha).map_err(CliError::Usage)?;
    let betas = grid::parse_range(beta).map_err(CliError::Usage)?;
    let ladder = grid::parse_range(snr_db).map_err(CliError::Usage)?;
    let snrs: Vec<f64> = ladder.iter().map(|&d| db_to_linear(d)).collect();
    let mut t = Table::new(&[
        "alpha",
        "beta",
        "snr_db",
        "d_outer",
        "d_inner",
        "spread",
        "d_outer_limit",
        "d_inner_limit",
        "spread_limit",
    ]);
    for &b in &betas {
        for &a in &alphas {
            let g = gdof_estimate(a, b, &snrs)?;
            let (o, i) = (*g.outer.last().expect("nonempty"), *g.inner.last().expect("nonempty"));
            t.push(vec![
                a.into(),
                b.into(),
                (*ladder.last().expect("nonempty")).into(),
                o.into(),
                i.into(),
                (o - i).into(),
                g.outer_limit.into(),
                g.inner_limit.into(),
                g.spread().into(),
            ]);
        }
    }
    Ok(Report {
        meta: Meta { command: "gdof", seed: common.seed, tolerances: vec![] },
        table: t,
        summary: None,
        failure: None,
    })
}
