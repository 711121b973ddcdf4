//! Multi-site charges built from the single-site supersymmetry suite.

mod spec;
mod words;

use serde::Serialize;

pub use spec::{ChargeSpec, Family};
pub use words::WordSum;

use spec::{uq_variants, QGHZ, QPE, QW, SCHOICES};

use crate::error::{Error, Result};
use crate::sis::{susy_suite, SusySuite};
use crate::tensor::{
    checked_dim, frobenius_distance, kron_all, DenseOperator, StateVector, MAX_DIM,
};

/// Tolerance used for structural checks at build time.
pub const BUILD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChargeKind {
    Nilpotent,
    SuperchargeUnitaryFamily,
    HamiltonianProjector,
}

impl ChargeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChargeKind::Nilpotent => "nilpotent",
            ChargeKind::SuperchargeUnitaryFamily => "supercharge-unitary-family",
            ChargeKind::HamiltonianProjector => "hamiltonian-projector",
        }
    }
}

/// Validity window of a family: the local dimensions it is realized on and
/// the identity paddings `l` for which its R-matrix solves the gYBE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValidRange {
    pub d_min: usize,
    pub d_max: Option<usize>,
    pub l_min: usize,
    pub l_max: Option<usize>,
}

impl ValidRange {
    pub fn contains(&self, d: usize, l: usize) -> bool {
        d >= self.d_min
            && self.d_max.is_none_or(|x| d <= x)
            && l >= self.l_min
            && self.l_max.is_none_or(|x| l <= x)
    }
}

/// How a charge is turned into an R-matrix generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// `Q` itself (nilpotent families) or the family's default projector.
    Default,
    /// `B = Q Q†`.
    Bosonic,
    /// `F = Q† Q`.
    Fermionic,
    /// `H = B + F`.
    Hamiltonian,
}

/// Generator ready for Baxterization.
#[derive(Clone, Debug)]
pub struct Generator {
    pub op: DenseOperator,
    /// `Some(k)` for a scaled projector `E^2 = k E`, `None` for a nilpotent.
    pub scale: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ChargeOperator {
    pub q: DenseOperator,
    pub spec: ChargeSpec,
    pub kind: ChargeKind,
    words: WordSum,
    normalization: f64,
}

impl ChargeOperator {
    pub fn words(&self) -> &WordSum {
        &self.words
    }

    /// Prefactor multiplying the word sum.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn range(&self) -> ValidRange {
        valid_range(&self.spec)
    }

    pub fn projectors(&self) -> (DenseOperator, DenseOperator) {
        projectors(self)
    }

    /// Hamiltonian `{Q, Q†}`.
    pub fn hamiltonian(&self) -> DenseOperator {
        let (b, f) = self.projectors();
        &b + &f
    }

    /// Generator for the requested sector; `Default` picks the
    /// construction the family is intended for.
    pub fn generator(&self, sector: Sector) -> Result<Generator> {
        let sector = match (sector, &self.spec.family, self.kind) {
            (Sector::Default, _, ChargeKind::Nilpotent) => {
                return Ok(Generator {
                    op: self.q.clone(),
                    scale: None,
                })
            }
            (Sector::Default, Family::AppendixA, _) => Sector::Hamiltonian,
            (Sector::Default, _, ChargeKind::HamiltonianProjector) => Sector::Hamiltonian,
            (Sector::Default, _, _) => Sector::Bosonic,
            (s, _, _) => s,
        };
        let (b, f) = self.projectors();
        let op = match sector {
            Sector::Bosonic => b,
            Sector::Fermionic => f,
            _ => &b + &f,
        };
        let k = measured_scale(&op, BUILD_TOL).ok_or_else(|| Error::NotIdempotent {
            k: f64::NAN,
            residual: f64::NAN,
        })?;
        Ok(Generator { op, scale: Some(k) })
    }

    /// Basis kets annihilated by both `Q` and `Q†`, as indices.
    pub fn zero_modes(&self, tol: f64) -> Vec<usize> {
        let n = self.q.dim();
        (0..n)
            .filter(|&k| {
                (0..n).all(|r| self.q.get(r, k).norm() <= tol && self.q.get(k, r).norm() <= tol)
            })
            .collect()
    }

    /// Dimension of the joint kernel of `Q` and `Q†`.
    pub fn zero_mode_dimension(&self, tol: f64) -> usize {
        self.q.dim() - self.hamiltonian().rank(tol)
    }
}

/// `k` with `E^2 = k E` when it exists, measured from traces.
pub fn measured_scale(e: &DenseOperator, tol: f64) -> Option<f64> {
    let e2 = e * e;
    let tr = e.trace();
    let k = if tr.norm() > tol {
        (e2.trace() / tr).re
    } else {
        0.0
    };
    let residual = frobenius_distance(&e2, &e.scale_real(k)).ok()?;
    (residual <= tol * (1.0 + k.abs()) && k > 0.0).then_some(k)
}

pub fn projectors(charge: &ChargeOperator) -> (DenseOperator, DenseOperator) {
    let qd = charge.q.adjoint();
    (&charge.q * &qd, &qd * &charge.q)
}

fn valid_range(spec: &ChargeSpec) -> ValidRange {
    let m = spec.m;
    let d_max = matches!(spec.family, Family::Synth { .. }).then_some(2);
    let (l_min, l_max) = match kind_of(&spec.family) {
        ChargeKind::Nilpotent => (1, None),
        ChargeKind::SuperchargeUnitaryFamily => (m, None),
        ChargeKind::HamiltonianProjector => (1, Some(m - 1)),
    };
    ValidRange {
        d_min: 2,
        d_max,
        l_min,
        l_max,
    }
}

fn kind_of(family: &Family) -> ChargeKind {
    match family {
        Family::Uq { .. } | Family::AppendixA | Family::Synth { .. } => {
            ChargeKind::SuperchargeUnitaryFamily
        }
        Family::Lowl(_) => ChargeKind::HamiltonianProjector,
        _ => ChargeKind::Nilpotent,
    }
}

fn repeat(letter: char, n: usize) -> String {
    std::iter::repeat_n(letter, n).collect()
}

fn uq_words(number: u8, variant: u8, m: usize) -> Vec<String> {
    let pair = |a: &str, b: &str| vec![a.to_owned(), b.to_owned()];
    match (number, variant) {
        (1, 1) => pair("bq", "df"),
        (1, _) => pair("qb", "fd"),
        (2, 1) => pair("fq", "qf"),
        (2, _) => pair("bd", "db"),
        (3, 1) => vec![
            format!("b{}", repeat('q', m - 1)),
            format!("d{}", repeat('f', m - 1)),
        ],
        (3, 2) => pair("bbq", "ddf"),
        (3, 3) => pair("bqb", "dfd"),
        (3, 4) => pair("qbb", "fdd"),
        (3, 5) => pair("qbq", "fdf"),
        (3, 6) => pair("qqb", "ffd"),
        (3, _) => pair("bbd", "ddb"),
        (4, _) => vec!["bbd".into(), "bdb".into(), "dbb".into()],
        (5, _) => vec!["ddd".into(), "bbd".into(), "bdb".into()],
        (6, _) => pair("qqq", "qff"),
        (7, _) => pair("qqq", "fqf"),
        (8, _) => pair("qqq", "ffq"),
        _ => (0..m)
            .map(|r| format!("{}d{}", repeat('b', r), repeat('b', m - 1 - r)))
            .collect(),
    }
}

fn synth_word(target: &str, source: &str) -> String {
    target
        .bytes()
        .zip(source.bytes())
        .map(|pair| match pair {
            (b'0', b'0') => 'b',
            (b'0', _) => 'q',
            (_, b'0') => 'd',
            _ => 'f',
        })
        .collect()
}

/// Word sum and prefactor of a spec.
fn word_sum(spec: &ChargeSpec) -> Result<(WordSum, f64)> {
    let m = spec.m;
    let ones = |words: Vec<String>| words.into_iter().map(|w| (1.0, w)).collect::<Vec<_>>();
    let weighted = |words: Vec<String>| spec.weights.iter().copied().zip(words).collect::<Vec<_>>();
    let norm = 1.0 / spec.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let (terms, prefactor) = match &spec.family {
        Family::Schoices(k) => (ones(vec![SCHOICES[*k as usize - 1].into()]), 1.0),
        Family::Qpe(k) => (ones(vec![QPE[*k as usize - 1].into()]), 1.0),
        Family::Qghz(k) => (ones(vec![QGHZ[*k as usize - 1].into()]), 1.0),
        Family::Qw(k) => (
            ones(QW[*k as usize - 1].iter().map(|s| s.to_string()).collect()),
            1.0,
        ),
        Family::Mproduct(s) | Family::Qir(s) | Family::Mghz(s) | Family::Lowl(s) => {
            (ones(vec![s.clone()]), 1.0)
        }
        Family::Mwstate => (
            ones(
                (0..m - 1)
                    .map(|r| format!("{}d{}q", repeat('b', r), repeat('b', m - 2 - r)))
                    .collect(),
            ),
            1.0,
        ),
        Family::Uq { number, variant } => (weighted(uq_words(*number, *variant, m)), norm),
        Family::AppendixA => {
            let words = ["bbd", "bdb", "dbb", "qqf", "qfq", "fqq"];
            let terms = words
                .iter()
                .enumerate()
                .map(|(i, w)| (spec.weights[i % 3], w.to_string()))
                .collect();
            (terms, 1.0)
        }
        Family::Synth { source, targets } => {
            if targets.contains(source) {
                return Err(Error::InvalidTarget(format!(
                    "source {source} is among the targets"
                )));
            }
            let mut seen = targets.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != targets.len() {
                return Err(Error::InvalidTarget("repeated target ket".into()));
            }
            (
                weighted(targets.iter().map(|t| synth_word(t, source)).collect()),
                norm,
            )
        }
    };
    Ok((WordSum::new(terms)?.scaled(prefactor), prefactor))
}

pub fn build(spec: &ChargeSpec) -> Result<ChargeOperator> {
    checked_dim(spec.d, spec.m)?;
    let suite = susy_suite(spec.d)?;
    build_with_suite(spec, &suite)
}

fn build_with_suite(spec: &ChargeSpec, suite: &SusySuite) -> Result<ChargeOperator> {
    let (words, normalization) = word_sum(spec)?;
    let q = words.to_operator(suite)?;
    let kind = kind_of(&spec.family);
    if kind == ChargeKind::Nilpotent {
        let residual = (&q * &q).frobenius_norm();
        if residual > BUILD_TOL {
            return Err(Error::NotNilpotent { residual });
        }
    }
    Ok(ChargeOperator {
        q,
        spec: spec.clone(),
        kind,
        words,
        normalization,
    })
}

/// `x = -w(q+q†) ⊗ (q+q†)^{⊗(m-1)}`.
pub fn extraspecial_generator(m: usize, d: usize) -> Result<DenseOperator> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!(
            "extraspecial generator needs m >= 2, got {m}"
        )));
    }
    checked_dim(d, m)?;
    let s = susy_suite(d)?;
    let sx = &s.q + &s.q_dag;
    let head = -&(&s.w * &sx);
    let mut factors = vec![&head];
    factors.extend(std::iter::repeat_n(&sx, m - 1));
    kron_all(factors)
}

/// Charge sending `|source>` to the normalized real `target` and
/// annihilating everything orthogonal to `|source>`.
pub fn synthesize_charge(target: &StateVector, source: usize) -> Result<ChargeOperator> {
    let (d, m) = (target.local_dim(), target.sites());
    if d != 2 {
        return Err(Error::InvalidTarget(format!(
            "synthesis is defined for qubits, got d = {d}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidTarget(
            "synthesis needs at least two sites".into(),
        ));
    }
    if source >= target.dim() {
        return Err(Error::InvalidTarget(format!(
            "source index {source} out of range"
        )));
    }
    let support = target.support(1e-12);
    if support.is_empty() {
        return Err(Error::InvalidTarget("target is zero".into()));
    }
    if support.contains(&source) {
        return Err(Error::InvalidTarget(format!(
            "source |{}> appears in the target",
            target.label(source)
        )));
    }
    if support.len() > target.dim() - 1 {
        return Err(Error::InvalidTarget(format!(
            "{} components exceed 2^m - 1",
            support.len()
        )));
    }
    let mut weights = Vec::with_capacity(support.len());
    for &k in &support {
        let a = target.amplitudes()[k];
        if a.im.abs() > 1e-12 {
            return Err(Error::InvalidTarget(format!(
                "amplitude of |{}> is not real",
                target.label(k)
            )));
        }
        weights.push(a.re);
    }
    let family = Family::Synth {
        source: target.label(source),
        targets: support.iter().map(|&k| target.label(k)).collect(),
    };
    build(&ChargeSpec::with_weights(family, weights, 2, m)?)
}

/// Catalog query. Unset fields match everything; `d` defaults to 2 and `m`
/// to the listing range `2..=4`.
#[derive(Clone, Debug, Default)]
pub struct CatalogFilter {
    pub family: Option<String>,
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub kind: Option<ChargeKind>,
}

impl CatalogFilter {
    fn matches_family(&self, family: &Family) -> bool {
        match &self.family {
            None => true,
            Some(f) => {
                let base = family.base();
                *f == base
                    || *f == family.to_string()
                    || (f == "uq" && matches!(family, Family::Uq { .. }))
            }
        }
    }
}

fn signatures(m: usize, letters: &[char]) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| letters.iter().map(move |c| format!("{p}{c}")))
            .collect();
    }
    out
}

fn families_for_m(m: usize) -> Vec<Family> {
    let mut out = Vec::new();
    match m {
        2 => out.extend((1..=SCHOICES.len() as u8).map(Family::Schoices)),
        3 => {
            out.extend((1..=QPE.len() as u8).map(Family::Qpe));
            out.extend((1..=QGHZ.len() as u8).map(Family::Qghz));
            out.extend((1..=QW.len() as u8).map(Family::Qw));
        }
        _ => {}
    }
    for letter in ['q', 'd'] {
        for r in 0..m {
            out.push(Family::Mproduct(format!(
                "{}{letter}{}",
                repeat('w', r),
                repeat('w', m - 1 - r)
            )));
        }
    }
    for r in 2..m {
        for positions in combinations(m, r) {
            for charges in signatures(r, &['q', 'd']) {
                let mut sig = vec!['w'; m];
                for (p, c) in positions.iter().zip(charges.chars()) {
                    sig[*p] = c;
                }
                out.push(Family::Qir(sig.into_iter().collect()));
            }
        }
    }
    out.extend(signatures(m, &['q', 'd']).into_iter().map(Family::Mghz));
    out.push(Family::Mwstate);
    for number in 1..=9u8 {
        for variant in 1..=uq_variants(number).unwrap_or(0) {
            let f = Family::Uq { number, variant };
            if f.fixed_m().is_none_or(|fm| fm == m) {
                out.push(f);
            }
        }
    }
    if m == 3 {
        out.push(Family::AppendixA);
    }
    let lowl: Vec<String> = if m == 2 {
        vec!["qq".into(), "dd".into(), "qd".into(), "dq".into()]
    } else {
        vec![
            repeat('q', m),
            format!("{}d", repeat('q', m - 1)),
            format!("{}w", repeat('q', m - 1)),
        ]
    };
    out.extend(lowl.into_iter().map(Family::Lowl));
    if m == 2 {
        out.push(Family::Synth {
            source: "01".into(),
            targets: vec!["00".into(), "11".into(), "10".into()],
        });
    }
    out
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Deterministically ordered catalog entries matching `filter`.
pub fn catalog_list(filter: &CatalogFilter) -> Vec<ChargeSpec> {
    let d = filter.d.unwrap_or(2);
    let ms: Vec<usize> = match filter.m {
        Some(m) => vec![m],
        None => (2..=4).collect(),
    };
    let mut out = Vec::new();
    for m in ms {
        if checked_dim(d, m).is_err() {
            continue;
        }
        for family in families_for_m(m) {
            if !filter.matches_family(&family) {
                continue;
            }
            if filter.kind.is_some_and(|k| k != kind_of(&family)) {
                continue;
            }
            if let Ok(spec) = ChargeSpec::new(family, d, m) {
                out.push(spec);
            }
        }
    }
    out
}

/// `(d, l)` pairs exercised by a verification sweep for `spec`: local
/// dimensions 2 and 3, paddings inside the family's valid range, capped by
/// the dimension guard.
pub fn sweep_points(spec: &ChargeSpec) -> Vec<(usize, usize)> {
    let range = valid_range(spec);
    let m = spec.m;
    let ls: Vec<usize> = match kind_of(&spec.family) {
        ChargeKind::Nilpotent => (1..=m).filter(|l| m + l <= 6).collect(),
        ChargeKind::SuperchargeUnitaryFamily => vec![m, m + 1],
        ChargeKind::HamiltonianProjector => (1..m).collect(),
    };
    let mut out = Vec::new();
    for d in 2..=3 {
        for &l in &ls {
            let fits = checked_dim(d, m + l).is_ok_and(|n| n <= MAX_DIM);
            if fits && range.contains(d, l) {
                out.push((d, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{embed, StateVector};
    use num_complex::Complex64;

    fn charge(s: &str) -> ChargeOperator {
        build(&s.parse().unwrap()).unwrap()
    }

    fn ket(label: &str) -> StateVector {
        StateVector::from_label(label, 2).unwrap()
    }

    #[test]
    fn q_tensor_q_has_single_entry() {
        let q = charge("schoices.3@d2m2").q;
        let nz = q.nonzeros(0.0);
        assert_eq!(nz, vec![(0, 3, Complex64::new(1.0, 0.0))]);
    }

    #[test]
    fn w_charge_action() {
        let q = charge("qw.1@d2m3").q;
        let expect = StateVector::from_terms(
            2,
            &[
                ("010", Complex64::new(1.0, 0.0)),
                ("100", Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(q.apply(&ket("001")).unwrap(), expect);
        for k in 0..8 {
            if k != 1 {
                assert_eq!(
                    q.apply(&StateVector::basis(2, 3, k).unwrap())
                        .unwrap()
                        .norm(),
                    0.0
                );
            }
        }
    }

    #[test]
    fn uq1_maps_fermion_to_boson() {
        let c = charge("uq1@d2m2");
        let s = 1.0 / 2f64.sqrt();
        let out = c.q.apply(&ket("01")).unwrap();
        assert!((out.amplitude("00").unwrap().re - s).abs() < 1e-15);
        assert!((out.amplitude("11").unwrap().re - s).abs() < 1e-15);
        let back = c.q.adjoint().apply(&ket("00")).unwrap();
        assert!((back.amplitude("01").unwrap().re - s).abs() < 1e-15);
        assert_eq!(back.support(1e-15), vec![1]);
        // |10> is the only basis zero mode; the kernel also holds a|00> - b|11>
        assert_eq!(c.zero_modes(1e-12), vec![2]);
        assert_eq!(c.zero_mode_dimension(1e-12), 2);
    }

    #[test]
    fn uq1_projectors() {
        let c = charge("uq1@d2m2");
        let (b, f) = c.projectors();
        let half = WordSum::new(vec![
            (0.5, "bb".into()),
            (0.5, "qq".into()),
            (0.5, "dd".into()),
            (0.5, "ff".into()),
        ])
        .unwrap()
        .to_operator(&susy_suite(2).unwrap())
        .unwrap();
        assert!(frobenius_distance(&b, &half).unwrap() < 1e-15);
        let bf = WordSum::single("bf")
            .unwrap()
            .to_operator(&susy_suite(2).unwrap())
            .unwrap();
        assert!(frobenius_distance(&f, &bf).unwrap() < 1e-15);
    }

    #[test]
    fn appendix_scale() {
        let c = charge("appendixA@d2m3");
        let (b, f) = c.projectors();
        assert!((measured_scale(&b, 1e-12).unwrap() - 6.0).abs() < 1e-12);
        assert!((measured_scale(&f, 1e-12).unwrap() - 6.0).abs() < 1e-12);
        let g = c.generator(Sector::Default).unwrap();
        assert!((g.scale.unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn extraspecial_examples() {
        let x = extraspecial_generator(2, 2).unwrap();
        #[rustfmt::skip]
        let isy_sx = DenseOperator::from_real(2, 2, &[
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
        ]).unwrap();
        assert_eq!(x, isy_sx);
        let minus_one = DenseOperator::identity(2, 2).unwrap().scale_real(-1.0);
        assert!(frobenius_distance(&(&x * &x), &minus_one).unwrap() < 1e-15);

        let s3 = susy_suite(3).unwrap();
        let x3 = extraspecial_generator(2, 3).unwrap();
        let hh = s3.h.kron(&s3.h).unwrap();
        assert!(frobenius_distance(&(&x3 * &x3), &-&hh).unwrap() < 1e-12);
    }

    #[test]
    fn synthesis_examples() {
        let (a, b, g) = (0.3, -1.1, 0.7);
        let target = StateVector::from_terms(
            2,
            &[
                ("00", Complex64::new(a, 0.0)),
                ("11", Complex64::new(b, 0.0)),
                ("10", Complex64::new(g, 0.0)),
            ],
        )
        .unwrap();
        let c = synthesize_charge(&target, 1).unwrap();
        let n = (a * a + b * b + g * g).sqrt();
        let expect = WordSum::new(vec![
            (a / n, "bq".into()),
            (b / n, "df".into()),
            (g / n, "dq".into()),
        ])
        .unwrap()
        .to_operator(&susy_suite(2).unwrap())
        .unwrap();
        assert!(frobenius_distance(&c.q, &expect).unwrap() < 1e-14);
        let (bp, fp) = c.projectors();
        assert!(
            frobenius_distance(&fp, &DenseOperator::unit(2, 2, 1, 1).unwrap()).unwrap() < 1e-14
        );
        assert!((measured_scale(&bp, 1e-12).unwrap() - 1.0).abs() < 1e-12);

        let ghz = StateVector::from_terms(
            2,
            &[
                ("000", Complex64::new(1.0, 0.0)),
                ("111", Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let c = synthesize_charge(&ghz, 3).unwrap();
        assert!(frobenius_distance(&c.q, &charge("uq3@d2m3").q).unwrap() < 1e-14);

        let c = synthesize_charge(&ket("11"), 1).unwrap();
        let ff = WordSum::single("ff")
            .unwrap()
            .to_operator(&susy_suite(2).unwrap())
            .unwrap();
        assert!(frobenius_distance(&c.projectors().0, &ff).unwrap() < 1e-15);
        let outer = DenseOperator::outer(&ket("11"), &ket("01")).unwrap();
        assert!(frobenius_distance(&c.q, &outer).unwrap() < 1e-15);

        assert!(matches!(
            synthesize_charge(&ghz, 0),
            Err(Error::InvalidTarget(_))
        ));
        let complex = StateVector::from_terms(2, &[("00", Complex64::new(0.0, 1.0))]).unwrap();
        assert!(synthesize_charge(&complex, 1).is_err());
    }

    #[test]
    fn listing_counts() {
        let count = |family: &str, m: usize| {
            catalog_list(&CatalogFilter {
                family: Some(family.into()),
                m: Some(m),
                ..Default::default()
            })
            .len()
        };
        assert_eq!(count("qghz", 3), 8);
        assert_eq!(count("schoices", 2), 6);
        assert_eq!(count("qw", 3), 8);
        assert_eq!(count("mproduct", 4), 8);
        assert_eq!(count("qir", 4), 56);
        assert_eq!(count("qir", 3), 12);
        assert_eq!(count("mghz", 4), 16);
        assert_eq!(count("uq3", 3), 7);
        let all = catalog_list(&CatalogFilter::default());
        assert_eq!(all, catalog_list(&CatalogFilter::default()));
        for base in [
            "schoices",
            "qpe",
            "qghz",
            "qw",
            "mproduct",
            "qir",
            "mghz",
            "mwstate",
            "uq1",
            "uq2",
            "uq3",
            "uq4",
            "uq5",
            "uq6",
            "uq7",
            "uq8",
            "uq9",
            "lowl",
            "appendixA",
            "synth",
        ] {
            assert!(all.iter().any(|s| s.family.base() == base), "{base}");
        }
    }

    #[test]
    fn every_listed_entry_builds() {
        for d in [2, 3] {
            for spec in catalog_list(&CatalogFilter {
                d: Some(d),
                ..Default::default()
            }) {
                let c = build(&spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
                match c.kind {
                    ChargeKind::Nilpotent => {}
                    _ => {
                        let g = c.generator(Sector::Default).unwrap();
                        assert!(g.scale.unwrap() > 0.0, "{spec}");
                    }
                }
            }
        }
    }

    #[test]
    fn schoices_triple_products_vanish() {
        for spec in catalog_list(&CatalogFilter {
            family: Some("schoices".into()),
            ..Default::default()
        }) {
            let q = build(&spec).unwrap().q;
            let q1 = embed(&q, 1, 3).unwrap();
            let q2 = embed(&q, 2, 3).unwrap();
            assert_eq!((&(&q1 * &q2) * &q1).frobenius_norm(), 0.0, "{spec}");
            assert_eq!((&(&q2 * &q1) * &q2).frobenius_norm(), 0.0, "{spec}");
        }
    }

    #[test]
    fn sweep_points_follow_ranges() {
        let p = |s: &str| sweep_points(&s.parse().unwrap());
        assert_eq!(p("schoices.1@d2m2"), vec![(2, 1), (2, 2), (3, 1), (3, 2)]);
        assert_eq!(p("uq3@d2m4"), vec![(2, 4), (2, 5)]);
        assert_eq!(
            p("lowl.qqqq@d2m4"),
            vec![(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]
        );
        assert_eq!(p("synth.01>00@d2m2"), vec![(2, 2), (2, 3)]);
    }
}
