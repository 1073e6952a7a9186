//! Entropy vectors and the derived three-party quantities.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{QecError, Result};
use crate::qstate::{Marginals, SubsystemMask};

/// Tolerance for the three evaluations of `M` to agree, relative to the
/// magnitude of the vector.
pub const M_CONSISTENCY_TOL: f64 = 1e-9;

/// Non-empty subsets of `n` parties in canonical order: by size, then
/// lexicographically on the sorted member list.
pub fn canonical_subsets(n: usize) -> Vec<SubsystemMask> {
    let mut subsets: Vec<SubsystemMask> = (1..(1u32 << n)).map(SubsystemMask::from_bits).collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.parties().cmp(&b.parties())));
    subsets
}

/// Entropies (bits) of all `2^N - 1` non-empty marginals in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyVector {
    n: usize,
    values: Vec<f64>,
}

impl EntropyVector {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(QecError::InvalidArgument(format!("party count {n} out of range")));
        }
        let expected = (1usize << n) - 1;
        if values.len() != expected {
            return Err(QecError::LengthMismatch { expected, got: values.len() });
        }
        Ok(Self { n, values })
    }

    /// Infers `N` from a vector of length `2^N - 1`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        let n = (1..=16).find(|&n| (1usize << n) - 1 == len).ok_or_else(|| {
            QecError::InvalidArgument(format!("length {len} is not of the form 2^N - 1"))
        })?;
        Self::new(n, values)
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0.0; (1 << n) - 1] }
    }

    pub fn party_count(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn subsets(&self) -> Vec<SubsystemMask> {
        canonical_subsets(self.n)
    }

    pub fn labels(&self) -> Vec<String> {
        self.subsets().into_iter().map(|m| m.label()).collect()
    }

    /// Position of `mask` in canonical order.
    pub fn index_of(&self, mask: SubsystemMask) -> Option<usize> {
        if mask.is_empty() || !mask.is_subset_of(SubsystemMask::full(self.n)) {
            return None;
        }
        canonical_subsets(self.n).iter().position(|&m| m == mask)
    }

    /// `H(mask)` with `H(∅) = 0`.
    pub fn get(&self, mask: SubsystemMask) -> f64 {
        if mask.is_empty() {
            return 0.0;
        }
        self.index_of(mask).map(|i| self.values[i]).unwrap_or(f64::NAN)
    }

    pub fn single(&self, party: usize) -> f64 {
        self.get(SubsystemMask::single(party))
    }

    pub fn total(&self) -> f64 {
        self.get(SubsystemMask::full(self.n))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Entries for subsets of `keep`, relabelled as a vector over those parties.
    /// For a pure state this is the entropy vector of the marginal on `keep`.
    pub fn restrict(&self, keep: SubsystemMask) -> Result<Self> {
        keep.check(self.n)?;
        let parties = keep.parties();
        let k = parties.len();
        let values = canonical_subsets(k)
            .into_iter()
            .map(|sub| {
                let lifted: Vec<usize> = sub.parties().iter().map(|&i| parties[i]).collect();
                self.get(SubsystemMask::from_parties(&lifted))
            })
            .collect();
        Self::new(k, values)
    }

    /// N=3 view in the order (A, B, C, BC, AC, AB, ABC).
    pub fn to_paper_order(&self) -> Result<Vec<f64>> {
        self.require_three()?;
        let v = &self.values;
        Ok(vec![v[0], v[1], v[2], v[5], v[4], v[3], v[6]])
    }

    /// Builds an N=3 vector from the (A, B, C, BC, AC, AB, ABC) ordering.
    pub fn from_paper_order(p: &[f64]) -> Result<Self> {
        if p.len() != 7 {
            return Err(QecError::LengthMismatch { expected: 7, got: p.len() });
        }
        Self::new(3, vec![p[0], p[1], p[2], p[5], p[4], p[3], p[6]])
    }

    fn require_three(&self) -> Result<()> {
        if self.n != 3 {
            return Err(QecError::InvalidArgument(format!("expected N = 3, got N = {}", self.n)));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &EntropyVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(if self.n == other.n { 0.0 } else { f64::INFINITY }, f64::max)
    }

    /// CSV with a header of subset labels and one data row.
    pub fn to_csv(&self) -> String {
        let mut out = self.labels().join(",");
        out.push('\n');
        out.push_str(&format_row(&self.values));
        out.push('\n');
        out
    }
}

/// Comma-joined values at 17 significant digits.
pub fn format_row(values: &[f64]) -> String {
    values.iter().map(|&v| format_sig17(v)).collect::<Vec<_>>().join(",")
}

/// `%.17g`-style formatting, independent of locale.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..17).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                for _ in digits.len()..int_len {
                    out.push('0');
                }
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    out
}

/// Entropy vector of any state, one marginal per non-empty subset.
pub fn entropy_vector<S: Marginals + ?Sized>(state: &S) -> Result<EntropyVector> {
    let n = state.party_count();
    let values = canonical_subsets(n)
        .into_iter()
        .map(|m| state.subsystem_entropy(m))
        .collect::<Result<Vec<f64>>>()?;
    EntropyVector::new(n, values)
}

/// `H(X_i) + H(X_j) - H(X_i X_j)`. Returned as computed; round-off can make it
/// slightly negative.
pub fn mutual_information<S: Marginals + ?Sized>(state: &S, i: usize, j: usize) -> Result<f64> {
    let n = state.party_count();
    for p in [i, j] {
        if p >= n {
            return Err(QecError::PartyOutOfRange { party: p, n });
        }
    }
    if i == j {
        return Err(QecError::InvalidArgument("mutual information needs two distinct parties".into()));
    }
    let hi = state.subsystem_entropy(SubsystemMask::single(i))?;
    let hj = state.subsystem_entropy(SubsystemMask::single(j))?;
    let hij = state.subsystem_entropy(SubsystemMask::from_parties(&[i, j]))?;
    Ok(hi + hj - hij)
}

/// Binary entropy `h(x) = -x log x - (1-x) log(1-x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QecError::InvalidArgument(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(binary_entropy_unchecked(x))
}

pub(crate) fn binary_entropy_unchecked(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// The pair labels used by [`N3Quantities`], each with its third party `Z`.
pub const N3_PAIRS: [(usize, usize, usize); 3] = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];

/// `I, II, III, IV` per pair (order AB, AC, BC) and the pair-independent `M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct N3Quantities {
    pub i: [f64; 3],
    pub ii: [f64; 3],
    pub iii: [f64; 3],
    pub iv: [f64; 3],
    pub m: f64,
    /// `I - II` and `III - IV` for every pair.
    pub m_evaluations: [f64; 6],
}

pub fn n3_quantities(v: &EntropyVector) -> Result<N3Quantities> {
    v.require_three()?;
    let h = |parties: &[usize]| v.get(SubsystemMask::from_parties(parties));
    let mut q = N3Quantities { i: [0.0; 3], ii: [0.0; 3], iii: [0.0; 3], iv: [0.0; 3], m: 0.0, m_evaluations: [0.0; 6] };
    for (k, &(x, y, z)) in N3_PAIRS.iter().enumerate() {
        q.i[k] = h(&[x]) + h(&[y]) - h(&[x, y]);
        q.ii[k] = h(&[x, z]) + h(&[y, z]) - h(&[z]) - h(&[x, y, z]);
        q.iii[k] = h(&[z]) + h(&[x, y, z]) - h(&[x, y]);
        q.iv[k] = h(&[x, z]) + h(&[y, z]) - h(&[x]) - h(&[y]);
        q.m_evaluations[2 * k] = q.i[k] - q.ii[k];
        q.m_evaluations[2 * k + 1] = q.iii[k] - q.iv[k];
    }
    let scale = v.values().iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    let lo = q.m_evaluations.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = q.m_evaluations.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > M_CONSISTENCY_TOL * scale {
        return Err(QecError::InvalidArgument(format!(
            "M evaluations disagree by {:e}",
            hi - lo
        )));
    }
    q.m = q.m_evaluations[0];
    Ok(q)
}
