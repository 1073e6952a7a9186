//! Pure states rewritten in the eigenbases of their single-party marginals,
//! and the eigenvalue inequalities that lead to the lower bound on the sum of
//! single-party entropies.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::constructions::verify_marginal_product;
use crate::entropy::binary_entropy_unchecked;
use crate::error::{QecError, Result};
use crate::linalg::{self, C64};
use crate::qstate::{PureState, Spectrum, SubsystemMask};

pub const DEFAULT_PRODUCT_TOL: f64 = 1e-7;
pub const DIAGONAL_TOL: f64 = 1e-9;
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Floor on `H(X_c)` below which the constrained party counts as pure.
pub const MIN_CONSTRAINED_ENTROPY: f64 = 1e-6;

const PHASE_TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct EigenbasisState {
    /// Amplitudes `V_{x_1..x_N}` in the product eigenbasis.
    pub state: PureState,
    pub spectra: Vec<Spectrum>,
    /// Column `a` of `unitaries[i]` is the eigenvector of party `i` for `λ^i_a`.
    pub unitaries: Vec<DMatrix<C64>>,
    pub degenerate: Vec<bool>,
}

impl EigenbasisState {
    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

/// Multiplies `v` by the phase that makes its first largest-magnitude
/// component real and positive.
fn canonical_phase(v: &mut [C64]) {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().find(|c| c.norm() >= max - PHASE_TIE_TOL).copied() {
        if lead.norm() > 0.0 {
            let phase = lead.conj() / lead.norm();
            v.iter_mut().for_each(|c| *c *= phase);
        }
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigenvectors in descending eigenvalue order, phase-fixed, with each
/// degenerate block ordered by descending lexicographic comparison.
fn ordered_eigenbasis(rho: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>, bool)> {
    let (values, vecs) = linalg::hermitian_eigen(rho)?;
    let d = values.len();
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|k| {
            let mut c: Vec<C64> = vecs.column(k).iter().copied().collect();
            canonical_phase(&mut c);
            c
        })
        .collect();
    let mut degenerate = false;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[end - 1] - values[end]).abs() <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            degenerate = true;
            cols[start..end].sort_by(|a, b| lex_cmp(a, b));
        }
        start = end;
    }
    let u = DMatrix::from_fn(d, d, |r, c| cols[c][r]);
    Ok((values, u, degenerate))
}

/// Rotates every party into the eigenbasis of its marginal. Checks that the
/// rotated marginals are diagonal with descending entries.
pub fn to_eigenbasis(psi: &PureState) -> Result<EigenbasisState> {
    let n = psi.party_count();
    let mut state = psi.clone();
    let mut spectra = Vec::with_capacity(n);
    let mut unitaries = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for i in 0..n {
        let rho = psi.marginal(SubsystemMask::single(i))?;
        let (values, u, deg) = ordered_eigenbasis(rho.matrix())?;
        state = state.apply_local(i, &u.adjoint())?;
        spectra.push(Spectrum::from_eigenvalues(values)?);
        unitaries.push(u);
        degenerate.push(deg);
    }
    for (i, spec) in spectra.iter().enumerate() {
        let rho = state.marginal(SubsystemMask::single(i))?;
        let target = DMatrix::from_fn(spec.values.len(), spec.values.len(), |r, c| {
            C64::new(if r == c { spec.values[r] } else { 0.0 }, 0.0)
        });
        let defect = linalg::max_abs_diff(rho.matrix(), &target);
        if defect > DIAGONAL_TOL {
            return Err(QecError::Degenerate(format!(
                "rotated marginal of party {i} deviates from diag(λ) by {defect:e}"
            )));
        }
    }
    Ok(EigenbasisState { state, spectra, unitaries, degenerate })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonReport {
    pub eps_i: Vec<f64>,
    pub eps_total: f64,
    /// `|V_{1..1}|^2`.
    pub v111_sq: f64,
    /// `sum_{x_1 > 1} |V_{x_1 1..1}|^2`.
    pub tail_sum: f64,
    pub lemma1: f64,
    /// Present only when the first party's pair marginals factorize.
    pub lemma2: Option<f64>,
    pub lemma3: f64,
    pub degenerate: bool,
}

fn eps_parts(es: &EigenbasisState) -> (Vec<f64>, f64, f64, f64) {
    let eps_i: Vec<f64> = es.spectra.iter().map(|s| 1.0 - s.largest()).collect();
    let eps_total = eps_i.iter().sum();
    let amps = es.state.amplitudes();
    let v111_sq = amps[0].norm_sqr();
    let stride = es.state.dims().strides()[0];
    let d1 = es.state.dims().dim(0);
    let tail_sum = (1..d1).map(|x| amps[x * stride].norm_sqr()).sum();
    (eps_i, eps_total, v111_sq, tail_sum)
}

pub fn epsilons(es: &EigenbasisState) -> EpsilonReport {
    let (eps_i, eps_total, v111_sq, tail_sum) = eps_parts(es);
    EpsilonReport {
        lemma1: lemma1_margin(es),
        lemma2: lemma2_margin(es, DEFAULT_PRODUCT_TOL).ok(),
        lemma3: lemma3_margin(es),
        eps_i,
        eps_total,
        v111_sq,
        tail_sum,
        degenerate: es.any_degenerate(),
    }
}

/// `|V_{1..1}|^2 - (1 - ε)`.
pub fn lemma1_margin(es: &EigenbasisState) -> f64 {
    let (_, eps, v111_sq, _) = eps_parts(es);
    v111_sq - (1.0 - eps)
}

/// `tail - ε_1 (1 + ε_1 - ε)`; requires the first party's pair marginals to
/// factorize within `product_tol`.
pub fn lemma2_margin(es: &EigenbasisState, product_tol: f64) -> Result<f64> {
    check_product(&es.state, 0, product_tol)?;
    let (eps_i, eps, _, tail) = eps_parts(es);
    let e1 = eps_i[0];
    Ok(tail - e1 * (1.0 + e1 - eps))
}

/// `ε_1 (ε - ε_1) - (1 - ε_1) tail`.
pub fn lemma3_margin(es: &EigenbasisState) -> f64 {
    let (eps_i, eps, _, tail) = eps_parts(es);
    let e1 = eps_i[0];
    e1 * (eps - e1) - (1.0 - e1) * tail
}

fn check_product(psi: &PureState, party: usize, tol: f64) -> Result<Vec<f64>> {
    let report = verify_marginal_product(psi, party, tol)?;
    if let Some(bad) = report.pairs.iter().find(|p| p.residual > tol) {
        return Err(QecError::HypothesisUnmet(format!(
            "pair ({party}, {}) marginal differs from the product by {:e} (tolerance {tol:e})",
            bad.other, bad.residual
        )));
    }
    Ok(report.pairs.iter().map(|p| p.residual).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyBoundMargin {
    pub party: usize,
    pub entropy: f64,
    pub eps: f64,
    /// `H - max{h(ε), -log2(1 - ε)}`.
    pub upper: f64,
    /// `max{h(ε), -log2(1 - ε)} - 2ε`, evaluated only for `ε <= 1/2`.
    pub lower: Option<f64>,
}

pub fn eigen_entropy_bound(es: &EigenbasisState) -> Vec<EntropyBoundMargin> {
    es.spectra
        .iter()
        .enumerate()
        .map(|(party, spec)| {
            let eps = 1.0 - spec.largest();
            let entropy = spec.entropy();
            let bound = binary_entropy_unchecked(eps).max(-(1.0 - eps).log2());
            EntropyBoundMargin {
                party,
                entropy,
                eps,
                upper: entropy - bound,
                lower: (eps <= 0.5).then(|| bound - 2.0 * eps),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub constrained_party: usize,
    pub entropy_sum: f64,
    pub constrained_entropy: f64,
    pub eps_1: f64,
    pub eps_total: f64,
    /// `sum H(X_i) - 1`.
    pub sum_margin: f64,
    /// `ε - 1/2`.
    pub eps_margin: f64,
    /// `2ε - 1 - (1 + ε - ε_1) ε_1`, the combination of Lemmas 2 and 3.
    pub proof_margin: f64,
    pub lemma1: f64,
    pub lemma2: f64,
    pub lemma3: f64,
    pub product_residuals: Vec<f64>,
    pub degenerate: bool,
}

/// Checks the hypotheses (nonzero `H(X_c)`, factorized pair marginals with
/// party `c`) and evaluates the bound and its proof quantities.
pub fn theorem1_check(psi: &PureState, constrained_party: usize, product_tol: f64) -> Result<Theorem1Report> {
    let front = psi.move_to_front(constrained_party)?;
    let es = to_eigenbasis(&front)?;
    let h_c = es.spectra[0].entropy();
    if h_c <= MIN_CONSTRAINED_ENTROPY {
        return Err(QecError::HypothesisUnmet(format!(
            "H(X_{constrained_party}) = {h_c:e} does not exceed {MIN_CONSTRAINED_ENTROPY:e}"
        )));
    }
    let product_residuals = check_product(&es.state, 0, product_tol)?;
    let (eps_i, eps, _, _) = eps_parts(&es);
    let e1 = eps_i[0];
    let entropy_sum: f64 = es.spectra.iter().map(Spectrum::entropy).sum();
    Ok(Theorem1Report {
        constrained_party,
        entropy_sum,
        constrained_entropy: h_c,
        eps_1: e1,
        eps_total: eps,
        sum_margin: entropy_sum - 1.0,
        eps_margin: eps - 0.5,
        proof_margin: 2.0 * eps - 1.0 - (1.0 + eps - e1) * e1,
        lemma1: lemma1_margin(&es),
        lemma2: lemma2_margin(&es, product_tol)?,
        lemma3: lemma3_margin(&es),
        product_residuals,
        degenerate: es.any_degenerate(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub constrained_entropy: f64,
    pub residuals: Vec<f64>,
    pub holds: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub constrained_party: usize,
    pub epsilons: EpsilonReport,
    pub entropy_bounds: Vec<EntropyBoundMargin>,
    pub hypotheses: Hypotheses,
    pub theorem: Option<Theorem1Report>,
}

/// Everything that can be evaluated on `psi` with party `c` treated as the
/// first party: Lemmas 1 and 3 always, Lemma 2 and the theorem only when the
/// hypotheses hold.
pub fn verify_lemmas(psi: &PureState, constrained_party: usize, product_tol: f64) -> Result<LemmaReport> {
    let front = psi.move_to_front(constrained_party)?;
    let es = to_eigenbasis(&front)?;
    let mut eps = epsilons(&es);
    let residuals: Vec<f64> = verify_marginal_product(&es.state, 0, product_tol)?
        .pairs
        .iter()
        .map(|p| p.residual)
        .collect();
    let (theorem, reason) = match theorem1_check(psi, constrained_party, product_tol) {
        Ok(t) => (Some(t), None),
        Err(QecError::HypothesisUnmet(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    eps.lemma2 = theorem.as_ref().map(|t| t.lemma2);
    Ok(LemmaReport {
        constrained_party,
        entropy_bounds: eigen_entropy_bound(&es),
        hypotheses: Hypotheses {
            constrained_entropy: es.spectra[0].entropy(),
            residuals,
            holds: theorem.is_some(),
            reason,
        },
        epsilons: eps,
        theorem,
    })
}
