//! Weighted sums of tensor words over the single-site operators.
//!
//! Letters: `q` charge, `d` adjoint charge, `b` bosonic projector,
//! `f` fermionic projector, `w` Witten operator, `h` Hamiltonian,
//! `i` identity.

use std::fmt;

use crate::error::{Error, Result};
use crate::sis::SusySuite;
use crate::tensor::{kron_all, DenseOperator};

#[derive(Clone, Debug, PartialEq)]
pub struct WordSum {
    terms: Vec<(f64, String)>,
}

impl WordSum {
    pub fn new(terms: Vec<(f64, String)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Parse("empty word sum".into()));
        };
        let m = first.len();
        for (_, word) in &terms {
            if word.len() != m || !word.bytes().all(|c| b"qdbfwhi".contains(&c)) {
                return Err(Error::Parse(format!("bad tensor word {word:?}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn single(word: &str) -> Result<Self> {
        Self::new(vec![(1.0, word.to_owned())])
    }

    pub fn terms(&self) -> &[(f64, String)] {
        &self.terms
    }

    pub fn sites(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= s;
        }
        self
    }

    pub fn to_operator(&self, suite: &SusySuite) -> Result<DenseOperator> {
        let mut acc = DenseOperator::zeros(suite.d, self.sites())?;
        for (c, word) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            let factors: Vec<&DenseOperator> = word.bytes().map(|l| letter(suite, l)).collect();
            acc = acc.try_add(&kron_all(factors)?.scale_real(*c))?;
        }
        Ok(acc)
    }
}

fn letter(suite: &SusySuite, l: u8) -> &DenseOperator {
    match l {
        b'q' => &suite.q,
        b'd' => &suite.q_dag,
        b'b' => &suite.b,
        b'f' => &suite.f,
        b'w' => &suite.w,
        b'h' => &suite.h,
        b'i' => &suite.identity,
        _ => unreachable!("letters are validated on construction"),
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, w)| {
                if *c == 1.0 {
                    w.clone()
                } else {
                    format!("{c}*{w}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
