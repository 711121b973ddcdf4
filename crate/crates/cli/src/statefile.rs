//! Plain-text state files: one `label re im` line per basis ket, `#`
//! header lines. Kets that are absent have amplitude zero.

use anyhow::{anyhow, bail, Result};
use gybe_core::tensor::{label_to_index, StateVector};
use num_complex::Complex64;

/// Amplitudes below this modulus are not written.
const WRITE_EPS: f64 = 1e-15;

pub fn write(state: &StateVector, headers: &[(&str, String)]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# d {}\n# sites {}\n",
        state.local_dim(),
        state.sites()
    ));
    for (key, value) in headers {
        out.push_str(&format!("# {key} {value}\n"));
    }
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm() > WRITE_EPS {
            out.push_str(&format!("{} {} {}\n", state.label(i), a.re, a.im));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ParsedState {
    pub state: StateVector,
    pub provenance: Option<String>,
}

/// Reads a state file. `d` overrides the `# d` header; without either the
/// local dimension is 2.
pub fn read(text: &str, d: Option<usize>) -> Result<ParsedState> {
    let mut header_d = None;
    let mut provenance = None;
    let mut rows: Vec<(String, Complex64, usize)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            if let Some(v) = h.strip_prefix("d ") {
                header_d = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| anyhow!("line {}: bad d header", no + 1))?,
                );
            } else if let Some(v) = h.strip_prefix("provenance ") {
                provenance = Some(v.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [label, re, im] = fields.as_slice() else {
            bail!("line {}: expected `label re im`", no + 1);
        };
        let re: f64 = re
            .parse()
            .map_err(|_| anyhow!("line {}: bad real part {re:?}", no + 1))?;
        let im: f64 = im
            .parse()
            .map_err(|_| anyhow!("line {}: bad imaginary part {im:?}", no + 1))?;
        if !re.is_finite() || !im.is_finite() {
            bail!("line {}: amplitude is not finite", no + 1);
        }
        rows.push((label.to_string(), Complex64::new(re, im), no + 1));
    }
    let d = d.or(header_d).unwrap_or(2);
    let Some((first, _, _)) = rows.first() else {
        bail!("state file has no amplitudes");
    };
    let n = first.len();
    let mut state = StateVector::zeros(d, n)?;
    let mut amps = state.amplitudes().to_vec();
    let mut seen = vec![false; amps.len()];
    for (label, amp, line) in &rows {
        if label.len() != n {
            bail!(
                "line {line}: label {label:?} has {} sites, expected {n}",
                label.len()
            );
        }
        let idx = label_to_index(label, d).map_err(|e| anyhow!("line {line}: {e}"))?;
        if std::mem::replace(&mut seen[idx], true) {
            bail!("line {line}: duplicate ket {label:?}");
        }
        amps[idx] = *amp;
    }
    state = StateVector::new(d, n, amps)?;
    if state.norm() == 0.0 {
        bail!("state file describes the zero vector");
    }
    Ok(ParsedState {
        state: state.normalized()?,
        provenance,
    })
}
