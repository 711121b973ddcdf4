//! `gybe`: catalog browsing, verification sweeps, state generation and
//! SLOCC classification.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! usage or configuration errors.

mod config;
mod output;
mod statefile;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gybe_core::battery::{run_criterion, SuiteOptions, CRITERIA};
use gybe_core::baxter::{baxterize_charge, baxterize_two_param, bell_matrix, TwoParamKind};
use gybe_core::catalog::{
    build, catalog_list, extraspecial_generator, sweep_points, CatalogFilter, ChargeKind,
    ChargeSpec, Sector,
};
use gybe_core::slocc::{apply_r, classify, DEFAULT_RANK_TOL};
use gybe_core::tensor::{checked_dim, StateVector, DEFAULT_TOL, MAX_DIM};
use gybe_core::verify::{
    catalog_gybe_point, gybe_residual, nybe_residual, periodicity_residual, periodicity_times,
    relation_residual, unitarity_residual, GybeShape, Relation, SweepOptions, VerificationReport,
};
use num_complex::Complex64;

use config::FileConfig;
use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "gybe",
    version,
    about = "Supersymmetric R-matrices, gYBE checks and SLOCC classes"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Residual tolerance (default 1e-10; 1e-8 rank threshold for classify).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed; required by every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Spectral samples per randomized check (default 16).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Spectral constant c (default 1).
    #[arg(long = "c", global = true, allow_hyphen_values = true)]
    c: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog charges.
    Catalog(Filter),
    /// Run relation checks over catalog charges.
    Verify(VerifyArgs),
    /// Apply an R-matrix to a product state and classify the result.
    Generate(GenerateArgs),
    /// Classify a state file.
    Classify(ClassifyArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args, Debug, Clone)]
struct Filter {
    /// Family name (`qghz`, `uq`, `uq3`, ...) or a full family id.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long = "d")]
    d: Option<usize>,
    #[arg(long = "m")]
    m: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    filter: Filter,
    /// A single charge spec instead of a catalog filter.
    #[arg(long)]
    charge: Option<String>,
    #[arg(long = "l")]
    l: Option<usize>,
    /// gybe (default), unitarity, periodicity, nybe, or a relation template.
    #[arg(long)]
    relation: Option<String>,
    /// default, bosonic, fermionic or hamiltonian.
    #[arg(long)]
    sector: Option<String>,
    /// auto, charge, generator, extraspecial or bell.
    #[arg(long)]
    operand: Option<String>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    charge: Option<String>,
    /// Input basis ket, e.g. 001.
    #[arg(long = "in")]
    input: Option<String>,
    /// Real spectral parameter.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    /// Imaginary time: u = i t.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// First site of the R-matrix window (1-based).
    #[arg(long)]
    position: Option<usize>,
    /// Total number of sites (default: the charge's window).
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    sector: Option<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// State file.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Local dimension; overrides the file's `# d` header.
    #[arg(long = "d")]
    d: Option<usize>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Run only this criterion (1-10).
    #[arg(long)]
    criterion: Option<u8>,
}

/// Resolved global settings.
struct Run {
    cfg: FileConfig,
    tol: Option<f64>,
    seed: Option<u64>,
    samples: usize,
    format: Format,
    out: Option<PathBuf>,
    c: f64,
}

impl Run {
    fn new(g: &Global) -> Result<Self> {
        let cfg = match &g.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let tol = cfg.pick(g.tol, "tol")?;
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--tol must be positive, got {t}");
            }
        }
        let samples = cfg.pick(g.samples, "samples")?.unwrap_or(16);
        if samples == 0 {
            bail!("--samples must be at least 1");
        }
        let c = cfg.pick(g.c, "c")?.unwrap_or(1.0);
        if !c.is_finite() {
            bail!("--c must be finite");
        }
        Ok(Self {
            seed: cfg.pick(g.seed, "seed")?,
            format: cfg.pick(g.format, "format")?.unwrap_or(Format::Json),
            out: cfg.pick(g.out.clone(), "out")?,
            tol,
            samples,
            c,
            cfg,
        })
    }

    fn seed(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow!("{what} is randomized; pass --seed (or seed = N in the config)"))
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.cfg.pick(flag, key)
    }
}

/// Failure modes mapped to exit codes.
enum Outcome {
    Pass,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let run = Run::new(&cli.global)?;
    match cli.command {
        Command::Catalog(f) => catalog(&run, &f),
        Command::Verify(v) => verify(&run, &v),
        Command::Generate(g) => generate(&run, &g),
        Command::Classify(c) => classify_file(&run, &c),
        Command::Suite(s) => suite(&run, &s),
    }
}

fn parse_kind(s: &str) -> Result<ChargeKind> {
    [
        ChargeKind::Nilpotent,
        ChargeKind::SuperchargeUnitaryFamily,
        ChargeKind::HamiltonianProjector,
    ]
    .into_iter()
    .find(|k| k.as_str() == s)
    .ok_or_else(|| {
        anyhow!("unknown kind {s:?} (nilpotent, supercharge-unitary-family, hamiltonian-projector)")
    })
}

fn parse_sector(s: Option<String>) -> Result<Sector> {
    Ok(match s.as_deref() {
        None | Some("default") => Sector::Default,
        Some("bosonic") => Sector::Bosonic,
        Some("fermionic") => Sector::Fermionic,
        Some("hamiltonian") => Sector::Hamiltonian,
        Some(other) => bail!("unknown sector {other:?} (default, bosonic, fermionic, hamiltonian)"),
    })
}

struct ResolvedFilter {
    filter: CatalogFilter,
    d: Option<usize>,
    m: Option<usize>,
}

fn resolve_filter(run: &Run, f: &Filter) -> Result<ResolvedFilter> {
    let kind = run
        .pick(f.kind.clone(), "kind")?
        .map(|k| parse_kind(&k))
        .transpose()?;
    let d = run.pick(f.d, "d")?;
    let m = run.pick(f.m, "m")?;
    Ok(ResolvedFilter {
        filter: CatalogFilter {
            family: run.pick(f.family.clone(), "family")?,
            m,
            d,
            kind,
        },
        d,
        m,
    })
}

fn catalog(run: &Run, f: &Filter) -> Result<Outcome> {
    let rf = resolve_filter(run, f)?;
    let specs = catalog_list(&rf.filter);
    if specs.is_empty() {
        bail!("no catalog entries match the filter");
    }
    let entries: Vec<output::CatalogEntry> = specs
        .iter()
        .map(|s| -> Result<output::CatalogEntry> {
            let charge = build(s)?;
            Ok(output::CatalogEntry {
                spec: s.to_string(),
                family: s.family.base(),
                kind: charge.kind.as_str().to_string(),
                d: s.d,
                m: s.m,
                sweep_points: sweep_points(s),
            })
        })
        .collect::<Result<_>>()?;
    output::emit_catalog(run.format, run.out.as_deref(), &entries)?;
    Ok(Outcome::Pass)
}

fn selected_specs(run: &Run, v: &VerifyArgs, rf: &ResolvedFilter) -> Result<Vec<ChargeSpec>> {
    if let Some(charge) = run.pick(v.charge.clone(), "charge")? {
        let mut s: ChargeSpec = charge
            .parse()
            .with_context(|| format!("charge {charge:?}"))?;
        if let Some(d) = rf.d {
            s = s.at_dim(d)?;
        }
        if rf.m.is_some_and(|m| m != s.m) {
            bail!("--m {} does not match charge {s}", rf.m.unwrap_or_default());
        }
        return Ok(vec![s]);
    }
    let specs = catalog_list(&rf.filter);
    if specs.is_empty() {
        bail!("no catalog entries match the filter");
    }
    Ok(specs)
}

fn verify(run: &Run, v: &VerifyArgs) -> Result<Outcome> {
    let relation: Relation = run
        .pick(v.relation.clone(), "relation")?
        .unwrap_or_else(|| "gybe".into())
        .parse()?;
    let rf = resolve_filter(run, &v.filter)?;
    let l = run.pick(v.l, "l")?;
    let sector = parse_sector(run.pick(v.sector.clone(), "sector")?)?;
    let operand = run
        .pick(v.operand.clone(), "operand")?
        .unwrap_or_else(|| "auto".into());
    let tol = run.tol();
    let mut reports = Vec::new();
    let needs_catalog = !matches!(
        relation,
        Relation::Sissusy | Relation::Witten | Relation::SusyAlgebra | Relation::BraidProportional
    ) && !matches!(operand.as_str(), "extraspecial" | "bell")
        && !matches!(
            relation,
            Relation::ExtraspecialSquare | Relation::ExtraspecialCube
        );
    if !needs_catalog {
        let d = rf.d.unwrap_or(2);
        let m = rf.m.unwrap_or(2);
        let shape = GybeShape::new(d, m, l.unwrap_or(1))?;
        let report = match relation {
            Relation::Sissusy | Relation::Witten | Relation::SusyAlgebra => {
                relation_residual(relation, &[], GybeShape::new(d, 2, 1)?)?
                    .with_subject(format!("S^{d}_1"))
            }
            Relation::BraidProportional => relation_residual(
                relation,
                &[bell_matrix(), extraspecial_generator(2, 2)?],
                GybeShape::new(2, 2, 1)?,
            )?
            .with_subject("bell"),
            Relation::Nybe => {
                let r = baxterize_two_param(
                    &extraspecial_generator(m, d)?,
                    TwoParamKind::Extraspecial,
                )?;
                nybe_residual(&r, run.samples, run.seed("nybe")?)?.with_subject("extraspecial")
            }
            _ => {
                let op = if operand == "bell" {
                    bell_matrix()
                } else {
                    extraspecial_generator(m, d)?
                };
                relation_residual(relation, &[op], shape)?.with_subject(if operand == "bell" {
                    "bell"
                } else {
                    "extraspecial"
                })
            }
        };
        reports.push(report.with_tolerance(tol));
    } else {
        let specs = selected_specs(run, v, &rf)?;
        for s in &specs {
            reports.extend(verify_spec(run, relation, s, rf.d, l, sector, &operand)?);
        }
    }
    let failing = reports.iter().filter(|r| !r.passed()).count();
    eprintln!("{} checks, {failing} failing", reports.len());
    output::emit_reports(run.format, run.out.as_deref(), &reports)?;
    Ok(if failing == 0 {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

fn verify_spec(
    run: &Run,
    relation: Relation,
    s: &ChargeSpec,
    d_filter: Option<usize>,
    l: Option<usize>,
    sector: Sector,
    operand: &str,
) -> Result<Vec<VerificationReport>> {
    let tol = run.tol();
    let charge = build(s)?;
    let tag = |r: VerificationReport| {
        r.with_subject(s.to_string())
            .with_reference(s.family.base())
            .with_tolerance(tol)
            .flag_uniform_weights()
    };
    let mut out = Vec::new();
    match relation {
        Relation::Gybe => {
            let seed = run.seed("gybe")?;
            let points: Vec<(usize, usize)> = match l {
                Some(l) => {
                    let range = charge.range();
                    if !range.contains(s.d, l) {
                        bail!(
                            "{s} is declared only for l in {}..={} at d={}",
                            range.l_min,
                            range
                                .l_max
                                .map(|x| x.to_string())
                                .unwrap_or_else(|| "inf".into()),
                            s.d
                        );
                    }
                    let dim = checked_dim(s.d, s.m + l)?;
                    if dim > MAX_DIM {
                        bail!(
                            "shape d={} m={} l={l} exceeds the {MAX_DIM}-dimensional guard",
                            s.d,
                            s.m
                        );
                    }
                    vec![(s.d, l)]
                }
                None => sweep_points(s)
                    .into_iter()
                    .filter(|(d, _)| d_filter.is_none_or(|f| f == *d))
                    .collect(),
            };
            let opts = SweepOptions {
                samples: run.samples,
                seed,
                tol,
                c: run.c,
            };
            if sector != Sector::Default {
                for (d, l) in points {
                    let sd = s.at_dim(d)?;
                    let r = baxterize_charge(&build(&sd)?, sector, run.c)?;
                    let rep = gybe_residual(&r, GybeShape::new(d, s.m, l)?, run.samples, seed)?;
                    out.push(
                        rep.with_subject(sd.to_string())
                            .with_reference(s.family.base())
                            .with_tolerance(tol)
                            .flag_uniform_weights(),
                    );
                }
            } else {
                for (d, l) in points {
                    out.push(catalog_gybe_point(s, d, l, &opts)?);
                }
            }
        }
        Relation::Unitarity => {
            let r = baxterize_charge(&charge, sector, run.c)?;
            let mut rep = tag(unitarity_residual(&r, run.samples, run.seed("unitarity")?)?);
            if charge.generator(sector)?.scale.is_none() {
                rep = rep.expecting_failure();
            }
            out.push(rep);
        }
        Relation::Periodicity => {
            let r = baxterize_charge(&charge, sector, run.c)?;
            let seed = run.seed("periodicity")?;
            let ts = periodicity_times(run.samples, seed);
            out.push(tag(periodicity_residual(&r, &ts)?));
        }
        Relation::Nybe => {
            let (gen, kind) = match charge.kind {
                ChargeKind::Nilpotent => (charge.q.clone(), TwoParamKind::Nilpotent),
                ChargeKind::HamiltonianProjector => (charge.hamiltonian(), TwoParamKind::Projector),
                ChargeKind::SuperchargeUnitaryFamily => {
                    bail!("nybe needs a nilpotent or lowl charge, got {s}")
                }
            };
            let r = baxterize_two_param(&gen, kind)?;
            out.push(tag(nybe_residual(&r, run.samples, run.seed("nybe")?)?));
        }
        _ => {
            let use_charge = match operand {
                "auto" => matches!(
                    relation,
                    Relation::Nilpotent | Relation::TripleZero | Relation::Ql
                ),
                "charge" => true,
                "generator" => false,
                other => {
                    bail!("unknown operand {other:?} (auto, charge, generator, extraspecial, bell)")
                }
            };
            let op = if use_charge {
                charge.q.clone()
            } else {
                charge.generator(sector)?.op
            };
            let shape = GybeShape::new(s.d, s.m, l.unwrap_or(1))?;
            out.push(tag(relation_residual(relation, &[op], shape)?));
        }
    }
    Ok(out)
}

fn generate(run: &Run, g: &GenerateArgs) -> Result<Outcome> {
    let charge = run
        .pick(g.charge.clone(), "charge")?
        .ok_or_else(|| anyhow!("--charge is required"))?;
    let s: ChargeSpec = charge
        .parse()
        .with_context(|| format!("charge {charge:?}"))?;
    let input = run
        .pick(g.input.clone(), "in")?
        .ok_or_else(|| anyhow!("--in is required"))?;
    let u = match (run.pick(g.u, "u")?, run.pick(g.t, "t")?) {
        (Some(u), None) => Complex64::new(u, 0.0),
        (None, Some(t)) => Complex64::new(0.0, t),
        (Some(_), Some(_)) => bail!("give either --u or --t, not both"),
        (None, None) => bail!("one of --u or --t is required"),
    };
    let sector = parse_sector(run.pick(g.sector.clone(), "sector")?)?;
    let sites = run.pick(g.sites, "sites")?.unwrap_or(s.m);
    let position = run.pick(g.position, "position")?.unwrap_or(1);
    let ket =
        StateVector::from_label(&input, s.d).with_context(|| format!("input ket {input:?}"))?;
    if ket.sites() != sites {
        bail!(
            "input ket {input:?} has {} sites, expected {sites}",
            ket.sites()
        );
    }
    let r = baxterize_charge(&build(&s)?, sector, run.c)?;
    let generated = apply_r(&r, u, &ket, position, sites)?;
    let provenance = format!(
        "{s} {} R(u) at site {position} on |{input}>, u = {u}",
        sector_name(sector)
    );
    let label = classify(&generated.state, run.tol.unwrap_or(DEFAULT_RANK_TOL))?
        .with_provenance(&provenance);
    let text = statefile::write(
        &generated.state,
        &[
            ("provenance", provenance.clone()),
            ("class", label.class.to_string()),
        ],
    );
    match &run.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let sidecar = output::sidecar_path(path);
            let json = serde_json::to_string_pretty(&label)? + "\n";
            std::fs::write(&sidecar, json)
                .with_context(|| format!("writing {}", sidecar.display()))?;
        }
        None => print!("{text}"),
    }
    eprintln!("{}: {}", label.class, provenance);
    Ok(Outcome::Pass)
}

fn sector_name(s: Sector) -> &'static str {
    match s {
        Sector::Default => "default",
        Sector::Bosonic => "bosonic",
        Sector::Fermionic => "fermionic",
        Sector::Hamiltonian => "hamiltonian",
    }
}

fn classify_file(run: &Run, c: &ClassifyArgs) -> Result<Outcome> {
    let path = run
        .pick(c.state.clone(), "state")?
        .ok_or_else(|| anyhow!("--state is required"))?;
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = statefile::read(&text, run.pick(c.d, "d")?)
        .with_context(|| format!("in {}", path.display()))?;
    let mut label = classify(&parsed.state, run.tol.unwrap_or(DEFAULT_RANK_TOL))?;
    label.provenance = parsed.provenance;
    output::emit_label(run.format, run.out.as_deref(), &label)?;
    Ok(Outcome::Pass)
}

fn suite(run: &Run, s: &SuiteArgs) -> Result<Outcome> {
    let mut opts = SuiteOptions::new(run.seed("suite")?);
    opts.samples = run.samples;
    opts.tol = run.tol();
    opts.c = run.c;
    let ids: Vec<u8> = match run.pick(s.criterion, "criterion")? {
        Some(id) if CRITERIA.iter().any(|(i, _)| *i == id) => vec![id],
        Some(id) => bail!("no criterion {id}; criteria are 1-10"),
        None => CRITERIA.iter().map(|(i, _)| *i).collect(),
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = run_criterion(id, &opts)?;
        eprintln!("{}", outcome.summary());
        outcomes.push(outcome);
    }
    output::emit_suite(run.format, run.out.as_deref(), &outcomes)?;
    Ok(if outcomes.iter().all(|o| o.passed) {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}
