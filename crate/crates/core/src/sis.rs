//! Symmetric inverse semigroup `S^n_1` and the single-site supersymmetry
//! suite built from it.
//!
//! Elements `x[a,b]` are partial bijections sending `a` to `b`; they compose
//! as `x[a,b] * x[c,d] = δ_bc x[a,d]`. The representation on `C^n` sends
//! `x[a,b]` to the matrix unit `|a-1><b-1|`, so index 1 is the ket `|0>`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{frobenius_distance, DenseOperator, ZERO};

/// Partial bijection `x[a,b]` of `S^n_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SisElement {
    domain: usize,
    range: usize,
    order: usize,
}

impl SisElement {
    pub fn new(domain: usize, range: usize, order: usize) -> Result<Self> {
        for index in [domain, range] {
            if index < 1 || index > order {
                return Err(Error::IndexOutOfRange { index, order });
            }
        }
        Ok(Self {
            domain,
            range,
            order,
        })
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Semigroup product; `None` is the formal zero.
    pub fn compose(&self, other: &Self) -> Result<Option<Self>> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok((self.range == other.domain).then(|| Self {
            domain: self.domain,
            range: other.range,
            order: self.order,
        }))
    }

    pub fn inverse(&self) -> Self {
        Self {
            domain: self.range,
            range: self.domain,
            order: self.order,
        }
    }

    /// Matrix unit `E_{a,b}` on `C^d`.
    pub fn represent(&self, d: usize) -> Result<DenseOperator> {
        if d != self.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: d,
            });
        }
        DenseOperator::unit(d, 1, self.domain - 1, self.range - 1)
    }
}

impl fmt::Display for SisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x[{},{}]@{}", self.domain, self.range, self.order)
    }
}

impl FromStr for SisElement {
    type Err = Error;

    /// Parses the exact form `x[a,b]@n`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected x[a,b]@n, got {s:?}"));
        let rest = s.strip_prefix("x[").ok_or_else(bad)?;
        let (inner, order) = rest.split_once("]@").ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<usize> {
            if t.is_empty() || !t.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        Self::new(parse(a)?, parse(b)?, parse(order)?)
    }
}

/// Finite complex combination of semigroup elements.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorExpr {
    order: usize,
    terms: BTreeMap<(usize, usize), Complex64>,
}

impl OperatorExpr {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn element(x: SisElement) -> Self {
        let mut e = Self::zero(x.order);
        e.terms
            .insert((x.domain, x.range), Complex64::new(1.0, 0.0));
        e
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Non-zero terms in `(element, coefficient)` form, in index order.
    pub fn terms(&self) -> impl Iterator<Item = (SisElement, Complex64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| {
            (
                SisElement {
                    domain: a,
                    range: b,
                    order: self.order,
                },
                c,
            )
        })
    }

    fn accumulate(&mut self, key: (usize, usize), c: Complex64) {
        let slot = self.terms.entry(key).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.accumulate(k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.order);
        for (&k, &c) in &self.terms {
            out.accumulate(k, c * s);
        }
        out
    }

    /// Bilinear extension of the semigroup product.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = Self::zero(self.order);
        for (&(a, b), &c1) in &self.terms {
            for (&(c, d), &c2) in &other.terms {
                if b == c {
                    out.accumulate((a, d), c1 * c2);
                }
            }
        }
        Ok(out)
    }

    /// Inverse on elements, complex conjugate on coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (&(a, b), &c) in &self.terms {
            out.accumulate((b, a), c.conj());
        }
        out
    }

    pub fn represent(&self, d: usize) -> Result<DenseOperator> {
        if d != self.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: d,
            });
        }
        let mut entries = vec![ZERO; d * d];
        for (&(a, b), &c) in &self.terms {
            entries[(a - 1) * d + (b - 1)] += c;
        }
        DenseOperator::new(d, 1, entries)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                if *c == Complex64::new(1.0, 0.0) {
                    format!("x[{a},{b}]")
                } else if c.im == 0.0 {
                    format!("{}*x[{a},{b}]", c.re)
                } else {
                    format!("({}{:+}i)*x[{a},{b}]", c.re, c.im)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `q = (1/sqrt(d-1)) sum_{j=2..d} x[1,j]`.
///
/// For `d = 2` this is `x[1,2]`, for `d = 3` it is `(x[1,2] + x[1,3])/sqrt 2`.
/// Larger `d` uses the same uniform weights.
pub fn supercharge(d: usize) -> Result<OperatorExpr> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "supercharge needs d >= 2, got {d}"
        )));
    }
    let w = Complex64::new(1.0 / ((d - 1) as f64).sqrt(), 0.0);
    let mut q = OperatorExpr::zero(d);
    for j in 2..=d {
        q = q.add(&OperatorExpr::element(SisElement::new(1, j, d)?).scale(w))?;
    }
    Ok(q)
}

/// Single-site operators of the supersymmetric system on `C^d`.
#[derive(Clone, Debug)]
pub struct SusySuite {
    pub d: usize,
    pub q: DenseOperator,
    pub q_dag: DenseOperator,
    /// Hamiltonian `h = b + f`.
    pub h: DenseOperator,
    /// Bosonic projector `b = q q†`.
    pub b: DenseOperator,
    /// Fermionic projector `f = q† q`.
    pub f: DenseOperator,
    /// Witten operator `w = 1 - 2b`.
    pub w: DenseOperator,
    pub identity: DenseOperator,
}

pub fn susy_suite(d: usize) -> Result<SusySuite> {
    let expr = supercharge(d)?;
    let q = expr.represent(d)?;
    let q_dag = expr.adjoint().represent(d)?;
    let b = &q * &q_dag;
    let f = &q_dag * &q;
    let h = &b + &f;
    let identity = DenseOperator::identity(d, 1)?;
    let w = &identity - &b.scale_real(2.0);
    Ok(SusySuite {
        d,
        q,
        q_dag,
        h,
        b,
        f,
        w,
        identity,
    })
}

impl SusySuite {
    /// Residuals of every single-site identity satisfied by the suite, keyed
    /// by a short name.
    pub fn relation_residuals(&self) -> Vec<(&'static str, f64)> {
        let dist = |a: &DenseOperator, b: &DenseOperator| {
            frobenius_distance(a, b).expect("single-site operators share a shape")
        };
        let zero = DenseOperator::zeros(self.d, 1).expect("valid d");
        let (q, qd, b, f, h, w) = (&self.q, &self.q_dag, &self.b, &self.f, &self.h, &self.w);
        vec![
            ("q^2=0", dist(&(q * q), &zero)),
            ("qd^2=0", dist(&(qd * qd), &zero)),
            ("{q,qd}=h", dist(&(&(q * qd) + &(qd * q)), h)),
            ("[h,q]=0", dist(&(h * q), &(q * h))),
            ("[h,qd]=0", dist(&(h * qd), &(qd * h))),
            ("h^2=h", dist(&(h * h), h)),
            ("b^2=b", dist(&(b * b), b)),
            ("f^2=f", dist(&(f * f), f)),
            ("bq=q", dist(&(b * q), q)),
            ("qf=q", dist(&(q * f), q)),
            ("qd b=qd", dist(&(qd * b), qd)),
            ("f qd=qd", dist(&(f * qd), qd)),
            ("bf=0", dist(&(b * f), &zero)),
            ("fb=0", dist(&(f * b), &zero)),
            ("w^2=1", dist(&(w * w), &self.identity)),
            ("{q,w}=0", dist(&(&(q * w) + &(w * q)), &zero)),
            ("{qd,w}=0", dist(&(&(qd * w) + &(w * qd)), &zero)),
            ("wq=-q", dist(&(w * q), &-q)),
            ("qw=q", dist(&(q * w), q)),
            ("qd w=-qd", dist(&(qd * w), &-qd)),
            ("w qd=qd", dist(&(w * qd), qd)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: usize, b: usize, n: usize) -> SisElement {
        SisElement::new(a, b, n).unwrap()
    }

    #[test]
    fn composition_rule() {
        assert_eq!(x(1, 2, 2).compose(&x(2, 1, 2)).unwrap(), Some(x(1, 1, 2)));
        assert_eq!(x(1, 1, 2).compose(&x(2, 1, 2)).unwrap(), None);
        for a in 1..=3 {
            for b in 1..=3 {
                assert_eq!(x(a, b, 3).compose(&x(b, b, 3)).unwrap(), Some(x(a, b, 3)));
            }
        }
        assert!(matches!(
            x(1, 2, 2).compose(&x(1, 2, 3)),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn representation_is_matrix_unit() {
        assert_eq!(
            x(1, 2, 2).represent(2).unwrap(),
            DenseOperator::from_real(2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap()
        );
        assert_eq!(
            x(1, 1, 2).represent(2).unwrap(),
            DenseOperator::from_real(2, 1, &[1.0, 0.0, 0.0, 0.0]).unwrap()
        );
        // x[2,3] sends |2> to |1> and kills |0>, |1>
        let e = x(2, 3, 3).represent(3).unwrap();
        for k in 0..3 {
            let out = e
                .apply(&crate::tensor::StateVector::basis(3, 1, k).unwrap())
                .unwrap();
            if k == 2 {
                assert_eq!(out, crate::tensor::StateVector::basis(3, 1, 1).unwrap());
            } else {
                assert_eq!(out.norm(), 0.0);
            }
        }
        assert!(x(1, 2, 2).represent(3).is_err());
    }

    #[test]
    fn representation_is_multiplicative() {
        let n = 3;
        let zero = DenseOperator::zeros(n, 1).unwrap();
        for a in 1..=n {
            for b in 1..=n {
                for c in 1..=n {
                    for d in 1..=n {
                        let (l, r) = (x(a, b, n), x(c, d, n));
                        let prod = &l.represent(n).unwrap() * &r.represent(n).unwrap();
                        let expect = match l.compose(&r).unwrap() {
                            Some(e) => e.represent(n).unwrap(),
                            None => zero.clone(),
                        };
                        assert_eq!(prod, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn element_syntax_round_trips() {
        let e: SisElement = "x[2,3]@4".parse().unwrap();
        assert_eq!(e, x(2, 3, 4));
        assert_eq!(e.to_string(), "x[2,3]@4");
        for bad in [
            "X[1,2]@2",
            "x[1,2]",
            "x(1,2)@2",
            "x[1, 2]@2",
            "x[0,1]@2",
            "x[1,3]@2",
        ] {
            assert!(bad.parse::<SisElement>().is_err(), "{bad}");
        }
    }

    #[test]
    fn supercharge_low_orders() {
        let q2 = supercharge(2).unwrap();
        assert_eq!(q2, OperatorExpr::element(x(1, 2, 2)));
        let q3 = supercharge(3).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let terms: Vec<_> = q3.terms().collect();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].0, x(1, 2, 3));
        assert_eq!(terms[1].0, x(1, 3, 3));
        assert!((terms[0].1.re - s).abs() < 1e-15 && (terms[1].1.re - s).abs() < 1e-15);
        let q4 = supercharge(4).unwrap().represent(4).unwrap();
        assert_eq!((&q4 * &q4).frobenius_norm(), 0.0);
        assert!(supercharge(1).is_err());
    }

    #[test]
    fn formal_zero_is_never_stored() {
        let q = supercharge(3).unwrap();
        let sq = q.compose(&q).unwrap();
        assert!(sq.is_zero());
        let cancel = q.add(&q.scale(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(cancel.is_zero());
    }

    #[test]
    fn suite_examples() {
        let s2 = susy_suite(2).unwrap();
        assert_eq!(s2.h, DenseOperator::identity(2, 1).unwrap());
        assert_eq!(
            s2.w,
            DenseOperator::from_real(2, 1, &[-1.0, 0.0, 0.0, 1.0]).unwrap()
        );
        let s3 = susy_suite(3).unwrap();
        #[rustfmt::skip]
        let h31 = DenseOperator::from_real(3, 1, &[
            1.0, 0.0, 0.0,
            0.0, 0.5, 0.5,
            0.0, 0.5, 0.5,
        ]).unwrap();
        assert!(frobenius_distance(&s3.h, &h31).unwrap() < 1e-15);
    }

    #[test]
    fn suite_relations_hold_for_small_d() {
        for d in 2..=6 {
            let s = susy_suite(d).unwrap();
            for (name, r) in s.relation_residuals() {
                assert!(r < 1e-12, "d={d} {name}: {r}");
            }
        }
    }
}
