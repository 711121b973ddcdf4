//! JSON and CSV rendering.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use gybe_core::battery::CriterionOutcome;
use gybe_core::slocc::SloccLabel;
use gybe_core::verify::VerificationReport;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Serialize)]
pub struct CatalogEntry {
    pub spec: String,
    pub family: String,
    pub kind: String,
    pub d: usize,
    pub m: usize,
    pub sweep_points: Vec<(usize, usize)>,
}

/// Suite JSON without wall-clock times, so reruns are byte-identical.
#[derive(Serialize)]
struct SuiteRecord<'a> {
    id: u8,
    title: &'a str,
    passed: bool,
    time_limit_secs: Option<f64>,
    reports: &'a [VerificationReport],
}

/// `<path>.json` next to a generated state file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn sink(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body)?;
            Ok(stdout.flush()?)
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

pub fn emit_catalog(format: Format, out: Option<&Path>, entries: &[CatalogEntry]) -> Result<()> {
    let body = match format {
        Format::Json => json(entries)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["spec", "family", "kind", "d", "m", "sweep_points"])?;
            for e in entries {
                let points: Vec<String> = e
                    .sweep_points
                    .iter()
                    .map(|(d, l)| format!("{d}:{l}"))
                    .collect();
                w.write_record([
                    e.spec.clone(),
                    e.family.clone(),
                    e.kind.clone(),
                    e.d.to_string(),
                    e.m.to_string(),
                    points.join(" "),
                ])?;
            }
            w.into_inner()?
        }
    };
    sink(out, &body)
}

fn report_rows(reports: &[(Option<u8>, &VerificationReport)]) -> Result<Vec<u8>> {
    let witness_keys: BTreeSet<&str> = reports
        .iter()
        .flat_map(|(_, r)| r.witness.keys().map(String::as_str))
        .collect();
    let with_criterion = reports.iter().any(|(c, _)| c.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = Vec::new();
    if with_criterion {
        header.push("criterion".into());
    }
    header.extend(
        [
            "relation_id",
            "subject",
            "reference",
            "d",
            "m",
            "l",
            "samples",
            "max_residual",
            "tolerance",
            "verdict",
            "expect_failure",
            "sampling",
            "notes",
        ]
        .map(String::from),
    );
    header.extend(witness_keys.iter().map(|k| format!("witness.{k}")));
    w.write_record(&header)?;
    for (c, r) in reports {
        let mut row: Vec<String> = Vec::new();
        if with_criterion {
            row.push(c.map(|c| c.to_string()).unwrap_or_default());
        }
        row.extend([
            r.relation_id.clone(),
            r.subject.clone(),
            r.reference.clone(),
            r.shape.d.to_string(),
            r.shape.m.to_string(),
            r.shape.l.to_string(),
            r.samples.to_string(),
            format!("{:e}", r.max_residual),
            format!("{:e}", r.tolerance),
            r.verdict.as_str().to_string(),
            r.expect_failure.to_string(),
            r.sampling.clone(),
            r.notes.join("; "),
        ]);
        row.extend(
            witness_keys
                .iter()
                .map(|k| r.witness.get(*k).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

pub fn emit_reports(
    format: Format,
    out: Option<&Path>,
    reports: &[VerificationReport],
) -> Result<()> {
    let body = match format {
        Format::Json => json(reports)?,
        Format::Csv => report_rows(&reports.iter().map(|r| (None, r)).collect::<Vec<_>>())?,
    };
    sink(out, &body)
}

pub fn emit_suite(format: Format, out: Option<&Path>, outcomes: &[CriterionOutcome]) -> Result<()> {
    let body = match format {
        Format::Json => {
            let records: Vec<SuiteRecord> = outcomes
                .iter()
                .map(|o| SuiteRecord {
                    id: o.id,
                    title: o.title.as_ref(),
                    passed: o.passed,
                    time_limit_secs: o.time_limit_secs,
                    reports: &o.reports,
                })
                .collect();
            json(&records)?
        }
        Format::Csv => report_rows(
            &outcomes
                .iter()
                .flat_map(|o| o.reports.iter().map(move |r| (Some(o.id), r)))
                .collect::<Vec<_>>(),
        )?,
    };
    sink(out, &body)
}

pub fn emit_label(format: Format, out: Option<&Path>, label: &SloccLabel) -> Result<()> {
    let body = match format {
        Format::Json => json(label)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "n",
                "d",
                "class",
                "ranks",
                "tangle",
                "separable_cuts",
                "reduced",
                "provenance",
            ])?;
            let ranks: Vec<String> = label.ranks.iter().map(|r| r.to_string()).collect();
            w.write_record([
                label.n.to_string(),
                label.d.to_string(),
                label.class.to_string(),
                ranks.join(" "),
                label.tangle.map(|t| format!("{t:e}")).unwrap_or_default(),
                label.separable_cuts.join(" "),
                label.reduced.to_string(),
                label.provenance.clone().unwrap_or_default(),
            ])?;
            w.into_inner()?
        }
    };
    sink(out, &body)
}
