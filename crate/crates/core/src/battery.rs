//! The ten acceptance criteria as one runnable battery.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baxter::{baxterize_charge, baxterize_two_param, bell_matrix, RMatrixFun, TwoParamKind};
use crate::catalog::{
    build, catalog_list, extraspecial_generator, CatalogFilter, ChargeKind, ChargeSpec, Sector,
};
use crate::error::{Error, Result};
use crate::slocc::{
    apply_r, bell_state, classify, ghz_state, ilo_apply, three_tangle, w_state, IloMatrix,
    SloccClass, SloccLabel, DEFAULT_RANK_TOL,
};
use crate::tensor::{checked_dim, DenseOperator, StateVector, MAX_DIM};
use crate::verify::{
    catalog_gybe_sweep, nybe_residual, periodicity_residual, periodicity_times, relation_residual,
    unitarity_residual, GybeShape, Relation, SweepOptions, VerificationReport,
};

/// Tolerance of the exact algebraic checks.
pub const EXACT_TOL: f64 = 1e-12;

/// Slot value `c u` used for the explicit matrices.
pub const SLOT_VALUE: f64 = 0.37;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Spectral samples per gYBE check.
    pub samples: usize,
    /// `(x, y, z)` triples per nYBE check.
    pub nybe_samples: usize,
    /// Random ILOs per reference state.
    pub ilo_samples: usize,
    pub tol: f64,
    pub c: f64,
}

impl SuiteOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            samples: 16,
            nybe_samples: 8,
            ilo_samples: 50,
            tol: crate::tensor::DEFAULT_TOL,
            c: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed_secs: f64,
    pub time_limit_secs: Option<f64>,
    pub reports: Vec<VerificationReport>,
}

impl CriterionOutcome {
    /// One line: `criterion N [PASS|FAIL] title (k checks, worst ..., t s)`.
    pub fn summary(&self) -> String {
        let failing = self.reports.iter().filter(|r| !r.passed()).count();
        let worst = self
            .reports
            .iter()
            .filter(|r| !r.expect_failure)
            .map(|r| r.max_residual)
            .fold(0.0, f64::max);
        let limit = self
            .time_limit_secs
            .map(|l| format!(" of {l} s"))
            .unwrap_or_default();
        format!(
            "criterion {:>2} [{}] {}: {} checks, {} failing, worst residual {:.2e}, {:.2} s{}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.reports.len(),
            failing,
            worst,
            self.elapsed_secs,
            limit,
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "explicit matrices"),
    (2, "nilpotent catalog gYBE sweep"),
    (3, "unitary families: gYBE, unitarity, periodicity"),
    (4, "lowl gYBE for 1 <= l < m"),
    (5, "Bell matrix braid relations"),
    (6, "extraspecial relations"),
    (7, "SLOCC generation battery"),
    (8, "appendixA projector algebra"),
    (9, "two-parameter nYBE"),
    (10, "property suites"),
];

pub fn run_criterion(id: u8, opts: &SuiteOptions) -> Result<CriterionOutcome> {
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Parse(format!("no criterion {id}")))?;
    let start = Instant::now();
    let (reports, limit) = match id {
        1 => (explicit_matrices()?, Some(1.0)),
        2 => (nilpotent_sweep(opts)?, Some(30.0)),
        3 => (unitary_families(opts)?, None),
        4 => (lowl_sweep(opts)?, None),
        5 => (bell_relations()?, None),
        6 => (extraspecial_relations()?, None),
        7 => (slocc_generation()?, None),
        8 => (appendix_a_algebra(opts)?, None),
        9 => (two_parameter(opts)?, None),
        _ => (property_suites(opts)?, None),
    };
    let elapsed_secs = start.elapsed().as_secs_f64();
    let passed = !reports.is_empty()
        && reports.iter().all(VerificationReport::passed)
        && limit.is_none_or(|l| elapsed_secs < l);
    Ok(CriterionOutcome {
        id,
        title,
        passed,
        elapsed_secs,
        time_limit_secs: limit,
        reports,
    })
}

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CriterionOutcome>> {
    CRITERIA
        .iter()
        .map(|(id, _)| run_criterion(*id, opts))
        .collect()
}

fn spec(s: &str) -> Result<ChargeSpec> {
    s.parse()
}

fn shape_of(op: &DenseOperator) -> Result<GybeShape> {
    GybeShape::new(op.local_dim(), op.sites(), 1)
}

fn max_entry_diff(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    Ok(a.try_sub(b)?.max_abs())
}

fn r_default(s: &ChargeSpec, c: f64) -> Result<RMatrixFun> {
    baxterize_charge(&build(s)?, Sector::Default, c)
}

/// `I` plus the listed entries.
fn identity_plus(d: usize, m: usize, entries: &[(usize, usize, f64)]) -> Result<DenseOperator> {
    let mut out = DenseOperator::identity(d, m)?;
    for &(r, c, v) in entries {
        out = &out + &DenseOperator::unit(d, m, r, c)?.scale_real(v);
    }
    Ok(out)
}

fn explicit_report(
    name: &str,
    built: &DenseOperator,
    expected: &DenseOperator,
) -> Result<VerificationReport> {
    Ok(VerificationReport::new(
        "explicit_matrix",
        shape_of(built)?,
        1,
        max_entry_diff(built, expected)?,
        Default::default(),
    )
    .with_subject(name)
    .with_reference(name)
    .with_tolerance(EXACT_TOL))
}

fn explicit_matrices() -> Result<Vec<VerificationReport>> {
    let cu = SLOT_VALUE;
    let mut out = Vec::new();
    let nilpotent: [(&str, usize, Vec<(usize, usize, f64)>); 4] = [
        ("schoices.3@d2m2", 2, vec![(0, 3, cu)]),
        ("qpe.1@d2m3", 3, vec![(0, 6, -cu), (1, 7, cu)]),
        ("qghz.2@d2m3", 3, vec![(1, 6, cu)]),
        ("qw.1@d2m3", 3, vec![(2, 1, cu), (4, 1, cu)]),
    ];
    for (id, m, entries) in nilpotent {
        let built = r_default(&spec(id)?, 1.0)?.eval_real(cu)?;
        out.push(explicit_report(
            id,
            &built,
            &identity_plus(2, m, &entries)?,
        )?);
    }
    for (alpha, beta) in [(1.0, 1.0), (0.6, 1.7)] {
        let id = format!("uq1{{{alpha},{beta}}}@d2m2");
        let built = r_default(&spec(&id)?, 1.0)?.eval_real(cu)?;
        let a = cu.exp() - 1.0;
        let n = alpha * alpha + beta * beta;
        let off = alpha * beta / n * a;
        let expected = DenseOperator::from_real(
            2,
            2,
            &[
                1.0 + alpha * alpha / n * a,
                0.0,
                0.0,
                off,
                0.0,
                1.0,
                0.0,
                0.0,
                0.0,
                0.0,
                1.0,
                0.0,
                off,
                0.0,
                0.0,
                1.0 + beta * beta / n * a,
            ],
        )?;
        out.push(explicit_report(&id, &built, &expected)?);
    }
    let h = FRAC_1_SQRT_2;
    let bell = DenseOperator::from_real(
        2,
        2,
        &[
            h, 0.0, 0.0, h, 0.0, h, h, 0.0, 0.0, -h, h, 0.0, -h, 0.0, 0.0, h,
        ],
    )?;
    out.push(explicit_report("bell", &bell_matrix(), &bell)?);
    Ok(out)
}

fn sweep(specs: &[ChargeSpec], opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let sweep = SweepOptions {
        samples: opts.samples,
        seed: opts.seed,
        tol: opts.tol,
        c: opts.c,
    };
    catalog_gybe_sweep(specs, &sweep)
}

fn nilpotent_sweep(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let specs = catalog_list(&CatalogFilter {
        kind: Some(ChargeKind::Nilpotent),
        ..Default::default()
    });
    sweep(&specs, opts)
}

fn unitary_families(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let specs = catalog_list(&CatalogFilter {
        family: Some("uq".into()),
        ..Default::default()
    });
    let mut out = sweep(&specs, opts)?;
    for s in &specs {
        for d in 2..=3 {
            let s = s.at_dim(d)?;
            let r = r_default(&s, opts.c)?;
            out.push(
                unitarity_residual(&r, opts.samples, opts.seed)?
                    .with_subject(s.to_string())
                    .with_reference(s.family.base())
                    .with_tolerance(opts.tol),
            );
            let ts = periodicity_times(opts.samples, opts.seed);
            out.push(
                periodicity_residual(&r, &ts)?
                    .with_subject(s.to_string())
                    .with_reference(s.family.base())
                    .with_tolerance(opts.tol),
            );
        }
    }
    Ok(out)
}

fn lowl_sweep(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let specs = catalog_list(&CatalogFilter {
        family: Some("lowl".into()),
        ..Default::default()
    });
    sweep(&specs, opts)
}

fn bell_relations() -> Result<Vec<VerificationReport>> {
    let r = bell_matrix();
    let x = extraspecial_generator(2, 2)?;
    let shape = GybeShape::new(2, 2, 1)?;
    let identity = DenseOperator::identity(2, 2)?;
    let quadratic = (&r * &r)
        .try_sub(&(&r.scale_real(SQRT_2) - &identity))?
        .frobenius_norm();
    Ok(vec![
        relation_residual(Relation::Braid, &[r.clone()], shape)?,
        VerificationReport::new("bell_quadratic", shape, 1, quadratic, Default::default()),
        relation_residual(Relation::BraidProportional, &[r, x], shape)?,
    ]
    .into_iter()
    .map(|rep| rep.with_subject("bell").with_tolerance(EXACT_TOL))
    .collect())
}

fn extraspecial_relations() -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for m in 2..=4 {
        let x = extraspecial_generator(m, 2)?;
        let subject = format!("extraspecial@d2m{m}");
        out.push(
            relation_residual(
                Relation::ExtraspecialSquare,
                &[x.clone()],
                GybeShape::new(2, m, 1)?,
            )?
            .with_subject(&subject),
        );
        for l in 1..m {
            out.push(
                relation_residual(
                    Relation::Anticommute,
                    &[x.clone()],
                    GybeShape::new(2, m, l)?,
                )?
                .with_subject(&subject),
            );
        }
        for l in m..=m + 1 {
            if checked_dim(2, m + l).is_ok_and(|n| n <= MAX_DIM) {
                out.push(
                    relation_residual(
                        Relation::FarCommutativity,
                        &[x.clone()],
                        GybeShape::new(2, m, l)?,
                    )?
                    .with_subject(&subject),
                );
            }
        }
    }
    for m in 2..=4 {
        let x = extraspecial_generator(m, 3)?;
        let shape = GybeShape::new(3, m, 1)?;
        let subject = format!("extraspecial@d3m{m}");
        out.push(
            relation_residual(Relation::ExtraspecialSquare, &[x.clone()], shape)?
                .with_subject(&subject),
        );
        out.push(
            relation_residual(Relation::ExtraspecialCube, &[x], shape)?.with_subject(&subject),
        );
    }
    Ok(out
        .into_iter()
        .map(|r| r.with_reference("extraspecial").with_tolerance(EXACT_TOL))
        .collect())
}

/// Applies the family's default R at `u = iπ/2` and compares the class.
fn generated(
    spec_id: &str,
    sector: Sector,
    input: &str,
    expected: SloccClass,
) -> Result<(VerificationReport, SloccLabel, StateVector)> {
    let s = spec(spec_id)?;
    let r = baxterize_charge(&build(&s)?, sector, 1.0)?;
    let ket = StateVector::from_label(input, s.d)?;
    let state = apply_r(&r, Complex64::new(0.0, FRAC_PI_2), &ket, 1, s.m)?.state;
    let label = classify(&state, DEFAULT_RANK_TOL)?.with_provenance(format!("{s} |{input}>"));
    let report = class_report(
        &label,
        expected,
        &format!("{s} {sector:?} |{input}>"),
        &s.family.base(),
    )?;
    Ok((report, label, state))
}

fn class_report(
    label: &SloccLabel,
    expected: SloccClass,
    subject: &str,
    reference: &str,
) -> Result<VerificationReport> {
    let mut witness: std::collections::BTreeMap<String, f64> = label
        .ranks
        .iter()
        .enumerate()
        .map(|(k, r)| (format!("rank_{}", k + 1), *r as f64))
        .collect();
    if let Some(t) = label.tangle {
        witness.insert("tangle".into(), t);
    }
    let residual = if label.class == expected { 0.0 } else { 1.0 };
    Ok(VerificationReport::new(
        "slocc_class",
        GybeShape::new(label.d, label.n.max(2), 1)?,
        1,
        residual,
        witness,
    )
    .with_subject(format!("{subject} -> {expected} (got {})", label.class))
    .with_reference(reference)
    .with_tolerance(0.0))
}

fn tangle_report(
    state: &StateVector,
    target: f64,
    subject: &str,
    reference: &str,
) -> Result<VerificationReport> {
    let t = three_tangle(state)?;
    Ok(VerificationReport::new(
        "three_tangle",
        GybeShape::new(2, 3, 1)?,
        1,
        (t - target).abs(),
        [("tangle".to_string(), t)].into(),
    )
    .with_subject(format!("{subject}: tangle = {target}"))
    .with_reference(reference)
    .with_tolerance(1e-10))
}

fn slocc_generation() -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let cases: [(&str, Sector, &str, SloccClass); 11] = [
        ("uq1@d2m2", Sector::Default, "00", SloccClass::Bell),
        ("uq3@d2m3", Sector::Default, "000", SloccClass::Ghz),
        ("uq4@d2m3", Sector::Default, "001", SloccClass::W),
        ("uq9@d2m3", Sector::Default, "001", SloccClass::W),
        ("uq6@d2m3", Sector::Default, "000", SloccClass::AxBC),
        ("uq7@d2m3", Sector::Default, "000", SloccClass::ACxB),
        ("uq8@d2m3", Sector::Default, "000", SloccClass::ABxC),
        ("uq1@d2m2", Sector::Fermionic, "01", SloccClass::Product),
        ("uq3@d2m3", Sector::Fermionic, "011", SloccClass::ABC),
        ("appendixA@d2m3", Sector::Default, "001", SloccClass::W),
        ("appendixA@d2m3", Sector::Default, "000", SloccClass::Ghz),
    ];
    for (id, sector, input, expected) in cases {
        let (report, _, state) = generated(id, sector, input, expected)?;
        out.push(report);
        let subject = format!("{id} |{input}>");
        match expected {
            SloccClass::Ghz if id.starts_with("uq3") => {
                out.push(tangle_report(&state, 1.0, &subject, "uq3")?)
            }
            SloccClass::W => out.push(tangle_report(
                &state,
                0.0,
                &subject,
                id.split('@').next().unwrap_or(id),
            )?),
            _ => {}
        }
    }
    // Qutrit lowl outputs, read on effective qubits.
    let qutrit: [(&str, &str, SloccClass); 3] = [
        ("lowl.qq@d3m2", "11", SloccClass::Bell),
        ("lowl.qqq@d3m3", "121", SloccClass::Ghz),
        ("lowl.qqd@d3m3", "120", SloccClass::ABxC),
    ];
    for (id, input, expected) in qutrit {
        out.push(generated(id, Sector::Default, input, expected)?.0);
    }
    Ok(out)
}

fn appendix_a_algebra(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for _ in 0..10 {
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s = ChargeSpec::with_weights(crate::catalog::Family::AppendixA, w.clone(), 2, 3)?;
        let (b, f) = build(&s)?.projectors();
        let k = 2.0 * w.iter().map(|a| a * a).sum::<f64>();
        for (name, p) in [("B", b), ("F", f)] {
            let residual = (&p * &p).try_sub(&p.scale_real(k))?.frobenius_norm();
            out.push(
                VerificationReport::new(
                    format!("{name}^2=kB"),
                    shape_of(&p)?,
                    1,
                    residual,
                    [("k".to_string(), k)].into(),
                )
                .with_subject(s.to_string())
                .with_reference("appendixA")
                .with_tolerance(opts.tol),
            );
        }
    }
    Ok(out)
}

fn two_parameter(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let q = build(&spec("schoices.3@d2m2")?)?.q;
    let h = build(&spec("lowl.qq@d2m2")?)?.hamiltonian();
    let x = extraspecial_generator(2, 2)?;
    let mut out = Vec::new();
    for (name, gen, kind) in [
        ("2p-nil schoices.3", q, TwoParamKind::Nilpotent),
        ("2p-proj lowl.qq", h, TwoParamKind::Projector),
        ("2p-ext extraspecial", x, TwoParamKind::Extraspecial),
    ] {
        let r = baxterize_two_param(&gen, kind)?;
        out.push(
            nybe_residual(&r, opts.nybe_samples, opts.seed)?
                .with_subject(name)
                .with_reference(r.profile().to_string())
                .with_tolerance(opts.tol),
        );
    }
    Ok(out)
}

/// Entries uniform in the unit square, redrawn until `|det| >= 0.2`.
fn random_factor(rng: &mut ChaCha8Rng) -> Result<DenseOperator> {
    loop {
        let e: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let det = e[0] * e[3] - e[1] * e[2];
        if det.norm() >= 0.2 {
            return DenseOperator::new(2, 1, e);
        }
    }
}

fn reference_states() -> Result<Vec<(&'static str, StateVector)>> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let pair = |a: &str, b: &str| StateVector::from_terms(2, &[(a, h), (b, h)]);
    Ok(vec![
        ("product AB", StateVector::from_label("01", 2)?),
        ("bell psi1", bell_state(1)?),
        ("product ABC", StateVector::from_label("010", 2)?),
        ("A-BC", pair("000", "011")?),
        ("AC-B", pair("000", "101")?),
        ("AB-C", pair("000", "110")?),
        ("GHZ", ghz_state("000", true)?),
        ("W w1", w_state(1)?),
        ("W w6", w_state(6)?),
    ])
}

fn property_suites(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for d in 2..=6 {
        let shape = GybeShape::new(d, 2, 1)?;
        for rel in [Relation::Sissusy, Relation::Witten, Relation::SusyAlgebra] {
            out.push(
                relation_residual(rel, &[], shape)?
                    .with_subject(format!("S^{d}_1"))
                    .with_tolerance(EXACT_TOL),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (name, s) in reference_states()? {
        let before = classify(&s, DEFAULT_RANK_TOL)?;
        let mut mismatches = 0usize;
        for _ in 0..opts.ilo_samples {
            let factors = (0..s.sites())
                .map(|_| random_factor(&mut rng))
                .collect::<Result<Vec<_>>>()?;
            let moved = ilo_apply(&s, &IloMatrix::new(factors)?)?;
            if classify(&moved, DEFAULT_RANK_TOL)?.class != before.class {
                mismatches += 1;
            }
        }
        out.push(
            VerificationReport::new(
                "ilo_invariance",
                GybeShape::new(2, s.sites(), 1)?,
                opts.ilo_samples,
                mismatches as f64,
                Default::default(),
            )
            .with_subject(format!("{name} ({})", before.class))
            .with_sampling("factor entries uniform complex in [-1,1]^2, |det| >= 0.2")
            .with_tolerance(0.0),
        );
    }
    let r = r_default(&spec("schoices.3@d2m2")?, opts.c)?;
    out.push(
        unitarity_residual(&r, opts.samples, opts.seed)?
            .with_subject("schoices.3@d2m2")
            .with_reference("schoices")
            .with_tolerance(opts.tol)
            .expecting_failure(),
    );
    Ok(out)
}
