//! Explicit states whose pair marginals factorize, and the four-parameter
//! family of three-party entropy vectors built from them.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::entropy::{canonical_subsets, entropy_vector, mutual_information, EntropyVector};
use crate::error::{QecError, Result};
use crate::linalg::{self, C64};
use crate::qstate::{DensityMatrix, PartyDims, PureState, SubsystemMask, DEFAULT_DIM_CAP};

pub const COEFF_NORM_TOL: f64 = 1e-9;
pub const DEFAULT_AUX_DIM: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionResult {
    pub name: String,
    #[serde(skip)]
    pub state: PureState,
    /// Analytic entropy vector over all parties of `state`.
    pub claimed: EntropyVector,
    /// Numerically evaluated entropy vector of `state`.
    pub verified: EntropyVector,
    /// Largest entrywise deviation of the marginals the construction claims to
    /// be maximally mixed or factorized.
    pub max_marginal_residual: f64,
}

impl ConstructionResult {
    pub fn vector_residual(&self) -> f64 {
        self.claimed.max_abs_diff(&self.verified)
    }

    /// Entropy vector of the marginal obtained by tracing out the last party.
    pub fn reduced_vector(&self) -> Result<EntropyVector> {
        let n = self.verified.party_count();
        self.verified.restrict(SubsystemMask::full(n - 1))
    }

    pub fn reduced_claimed(&self) -> Result<EntropyVector> {
        let n = self.claimed.party_count();
        self.claimed.restrict(SubsystemMask::full(n - 1))
    }
}

/// Permutations of `0..n` with even parity, in lexicographic order.
pub fn even_permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .permutations(n)
        .filter(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            inversions % 2 == 0
        })
        .collect()
}

fn linear_index(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Vector of a pure state given per-subset entropies of subsets that avoid the
/// last party; entries containing it follow from complement symmetry.
fn pure_vector_from(n: usize, f: impl Fn(SubsystemMask) -> f64) -> EntropyVector {
    let full = SubsystemMask::full(n);
    let values = canonical_subsets(n)
        .into_iter()
        .map(|m| {
            if m == full {
                0.0
            } else if m.contains(n - 1) {
                f(m.complement(n))
            } else {
                f(m)
            }
        })
        .collect();
    EntropyVector::new(n, values).expect("length matches")
}

fn maximally_mixed_residual(rho: &DensityMatrix) -> f64 {
    let d = rho.matrix().nrows();
    let target = DMatrix::from_diagonal_element(d, d, real(1.0 / d as f64));
    linalg::max_abs_diff(rho.matrix(), &target)
}

fn finish(name: &str, state: PureState, claimed: EntropyVector, max_marginal_residual: f64) -> Result<ConstructionResult> {
    let verified = entropy_vector(&state)?;
    Ok(ConstructionResult { name: name.to_string(), state, claimed, verified, max_marginal_residual })
}

/// `|V_N>`: a uniform diagonal part plus a weighted sum over even permutations,
/// on `N` parties of dimension `N`. Every single-party marginal is maximally
/// mixed; for `N >= 4` every pair marginal factorizes.
pub fn v_state(n: usize) -> Result<ConstructionResult> {
    if !(3..=5).contains(&n) {
        return Err(QecError::InvalidArgument(format!("v_state supports 3 <= N <= 5, got {n}")));
    }
    let dims = PartyDims::with_cap(vec![n; n], n.pow(n as u32).max(DEFAULT_DIM_CAP))?;
    let mut amps = vec![real(0.0); dims.total()];
    let diag = 1.0 / n as f64;
    for k in 0..n {
        amps[linear_index(&vec![k; n], n)] += real(diag);
    }
    let fact: f64 = (1..=n - 2).map(|k| k as f64).product();
    let w = diag * (2.0 / fact).sqrt();
    for p in even_permutations(n) {
        amps[linear_index(&p, n)] += real(w);
    }
    let state = PureState::from_amplitudes(dims, amps)?;
    let log_n = (n as f64).log2();
    let claimed = pure_vector_from(n, |m| m.len().min(n - m.len()) as f64 * log_n);

    let mut residual: f64 = 0.0;
    for i in 0..n {
        residual = residual.max(maximally_mixed_residual(&state.marginal(SubsystemMask::single(i))?));
    }
    if n >= 4 {
        for i in 0..n {
            residual = residual.max(verify_marginal_product(&state, i, f64::INFINITY)?.max_residual);
        }
    }
    finish(&format!("V{n}"), state, claimed, residual)
}

/// Party values of the non-diagonal `|W_N>` terms: `(k, l, l+k, ..., l+N-2, l+1, ..., l+k-1)`
/// with addition mod `N-1`.
fn w_ket(n: usize, k: usize, l: usize) -> Vec<usize> {
    let d = n - 1;
    let mut ket = vec![k, l];
    for j in 2..n {
        ket.push((l + (k - 1 + j - 2) % (n - 2) + 1) % d);
    }
    ket
}

/// `|W_N>` on `N` parties of dimension `N - 1`; the first party has vanishing
/// mutual information with every other party.
pub fn w_state(n: usize) -> Result<ConstructionResult> {
    if !(4..=6).contains(&n) {
        return Err(QecError::InvalidArgument(format!("w_state supports 4 <= N <= 6, got {n}")));
    }
    let d = n - 1;
    let dims = PartyDims::with_cap(vec![d; n], d.pow(n as u32).max(DEFAULT_DIM_CAP))?;
    let mut amps = vec![real(0.0); dims.total()];
    let c = 1.0 / d as f64;
    for k in 0..d {
        let mut ket = vec![k; n];
        ket[0] = 0;
        amps[linear_index(&ket, d)] += real(c);
    }
    for k in 1..d {
        for l in 0..d {
            amps[linear_index(&w_ket(n, k, l), d)] += real(c);
        }
    }
    let state = PureState::from_amplitudes(dims, amps)?;
    let log_d = (d as f64).log2();
    let claimed = if n == 4 {
        pure_vector_from(n, |m| m.len().min(n - m.len()) as f64 * log_d)
    } else {
        // Only the first party's structure is asserted; the remaining entries
        // are those of the computed vector.
        let v = entropy_vector(&state)?;
        let first = SubsystemMask::single(0);
        let values = canonical_subsets(n)
            .into_iter()
            .zip(v.values())
            .map(|(m, &x)| {
                let side = if m.len() * 2 > n { m.complement(n) } else { m };
                if side.len() == 1 {
                    log_d
                } else if side.len() == 2 && side.intersection(first) == first {
                    2.0 * log_d
                } else {
                    x
                }
            })
            .collect();
        EntropyVector::new(n, values)?
    };
    let mut residual = maximally_mixed_residual(&state.marginal(SubsystemMask::single(0))?);
    residual = residual.max(verify_marginal_product(&state, 0, f64::INFINITY)?.max_residual);
    finish(&format!("W{n}"), state, claimed, residual)
}

fn check_unit_norm(coeffs: &[C64], what: &str) -> Result<f64> {
    let norm: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > COEFF_NORM_TOL {
        return Err(QecError::InvalidArgument(format!("{what}: squared norm {norm} differs from 1")));
    }
    Ok(norm)
}

/// `-sum |a|^2 log |a|^2`.
pub fn coefficient_entropy(coeffs: &[C64]) -> f64 {
    linalg::shannon_bits(&coeffs.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>())
}

/// `|Ṽ_4>`: the four-party state with the fourth party's weights set by `a`.
/// The fourth party has entropy `alpha = -sum |a_i|^2 log |a_i|^2` and
/// vanishing mutual information with the other three.
pub fn tilde_v4(a: &[C64; 4]) -> Result<ConstructionResult> {
    check_unit_norm(a, "tilde_v4 coefficients")?;
    let dims = PartyDims::new(vec![4; 4])?;
    let mut amps = vec![real(0.0); dims.total()];
    for (i, &ai) in a.iter().enumerate() {
        amps[linear_index(&[i; 4], 4)] += ai * 0.5;
    }
    for p in even_permutations(4) {
        amps[linear_index(&p, 4)] += a[p[3]] * 0.5;
    }
    let state = PureState::normalized(dims, amps)?;
    let alpha = coefficient_entropy(a);
    let claimed = pure_vector_from(4, |m| {
        let base = 2.0 * m.len() as f64;
        if m.len() == 3 {
            alpha
        } else if m.len() == 2 {
            2.0 + alpha
        } else {
            base
        }
    });
    let residual = verify_marginal_product(&state, 3, f64::INFINITY)?.max_residual;
    finish("tilde-V4", state, claimed, residual)
}

/// `sum_l a'_l |l l>` on two parties of dimension `coeffs.len()`.
pub fn diagonal_bipartite(coeffs: &[C64]) -> Result<PureState> {
    if coeffs.is_empty() {
        return Err(QecError::InvalidArgument("diagonal_bipartite needs at least one coefficient".into()));
    }
    check_unit_norm(coeffs, "diagonal_bipartite coefficients")?;
    let m = coeffs.len();
    let dims = PartyDims::new(vec![m, m])?;
    let mut amps = vec![real(0.0); m * m];
    for (l, &c) in coeffs.iter().enumerate() {
        amps[l * m + l] = c;
    }
    PureState::normalized(dims, amps)
}

/// Coefficients for the four-parameter family: `a` for `|Ṽ_4>`, and one list
/// per auxiliary pair (B'C', A''C'', A'''B''').
#[derive(Clone, Debug, Serialize)]
pub struct FamilyParams {
    pub a: [C64; 4],
    pub bc: Vec<C64>,
    pub ac: Vec<C64>,
    pub ab: Vec<C64>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Cap on the dimension of the three-party system.
    pub cap: usize,
}

impl FamilyParams {
    pub fn new(a: [C64; 4], bc: Vec<C64>, ac: Vec<C64>, ab: Vec<C64>) -> Result<Self> {
        check_unit_norm(&a, "a")?;
        for (list, name) in [(&bc, "B'C'"), (&ac, "A''C''"), (&ab, "A'''B'''")] {
            if list.is_empty() {
                return Err(QecError::InvalidArgument(format!("{name} coefficients are empty")));
            }
            check_unit_norm(list, name)?;
        }
        Ok(Self {
            alpha: coefficient_entropy(&a),
            beta: coefficient_entropy(&bc),
            gamma: coefficient_entropy(&ac),
            delta: coefficient_entropy(&ab),
            a,
            bc,
            ac,
            ab,
            cap: DEFAULT_DIM_CAP,
        })
    }

    /// Inverts entropy targets: `alpha` in `[0, 2]`, the others in
    /// `[0, log2 aux_dim]`.
    pub fn from_entropies(alpha: f64, beta: f64, gamma: f64, delta: f64, aux_dim: usize) -> Result<Self> {
        let a = one_vs_rest_coefficients(alpha, 4)?;
        let a = [a[0], a[1], a[2], a[3]];
        Self::new(
            a,
            one_vs_rest_coefficients(beta, aux_dim)?,
            one_vs_rest_coefficients(gamma, aux_dim)?,
            one_vs_rest_coefficients(delta, aux_dim)?,
        )
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// Coefficients `(sqrt(1 - (d-1)q), sqrt(q), ..., sqrt(q))` whose weight entropy
/// equals `target`, with `q` found by bisection on `[0, 1/d]`.
pub fn one_vs_rest_coefficients(target: f64, d: usize) -> Result<Vec<C64>> {
    if d < 1 {
        return Err(QecError::InvalidArgument("dimension must be at least 1".into()));
    }
    let max = (d as f64).log2();
    if !(0.0..=max + 1e-12).contains(&target) {
        return Err(QecError::InvalidArgument(format!("entropy target {target} outside [0, {max}]")));
    }
    let weights = |q: f64| {
        let mut w = vec![q; d];
        w[0] = (1.0 - (d - 1) as f64 * q).max(0.0);
        w
    };
    let (mut lo, mut hi) = (0.0, 1.0 / d as f64);
    if d == 1 || target <= 0.0 {
        hi = 0.0;
    } else if target >= max {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if linalg::shannon_bits(&weights(mid)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(weights(q).into_iter().map(|w| real(w.sqrt())).collect())
}

/// The three-party state `ρ̃_ABC ⊗ ρ'_B'C' ⊗ ρ''_A''C'' ⊗ ρ'''_A'''B'''` with
/// composite parties `AA''A'''`, `BB'B'''`, `CC'C''`, returned through its
/// purification (the fourth party is the purifier `D` of `ρ̃`).
pub fn four_param_family(p: &FamilyParams) -> Result<ConstructionResult> {
    let (mb, mc, ma) = (p.bc.len(), p.ac.len(), p.ab.len());
    let abc_dim = [4 * mc * ma, 4 * mb * ma, 4 * mb * mc].iter().product::<usize>();
    if abc_dim > p.cap {
        return Err(QecError::DimensionCap { dim: abc_dim, cap: p.cap });
    }
    let big = p.cap.saturating_mul(4);
    let widen = |s: PureState| -> Result<PureState> {
        PureState::from_amplitudes(PartyDims::with_cap(s.dims().as_slice().to_vec(), big)?, s.amplitudes().to_vec())
    };
    let core = widen(tilde_v4(&p.a)?.state)?;
    let bc = widen(diagonal_bipartite(&p.bc)?)?;
    let ac = widen(diagonal_bipartite(&p.ac)?)?;
    let ab = widen(diagonal_bipartite(&p.ab)?)?;
    // parties: A B C D | B' C' | A'' C'' | A''' B'''
    let joined = core.tensor(&bc)?.tensor(&ac)?.tensor(&ab)?;
    let state = joined.regroup(&[vec![0, 6, 8], vec![1, 4, 9], vec![2, 5, 7], vec![3]])?;

    let (al, be, ga, de) = (p.alpha, p.beta, p.gamma, p.delta);
    let paper = [
        2.0 + ga + de,
        2.0 + be + de,
        2.0 + be + ga,
        2.0 + al + ga + de,
        2.0 + al + be + de,
        2.0 + al + be + ga,
        al,
    ];
    let abc = EntropyVector::from_paper_order(&paper)?;
    let claimed = pure_vector_from(4, |m| abc.get(m));
    let residual = verify_marginal_product(&state, 3, f64::INFINITY)?.max_residual;
    finish("family", state, claimed, residual)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResidual {
    pub other: usize,
    pub residual: f64,
    pub mutual_information: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginalProductReport {
    pub party: usize,
    pub pairs: Vec<PairResidual>,
    pub max_residual: f64,
    pub holds: bool,
}

/// For every `j != i`, the entrywise deviation of `ρ_{X_i X_j}` from
/// `ρ_{X_i} ⊗ ρ_{X_j}`, with the mutual information alongside.
pub fn verify_marginal_product(psi: &PureState, i: usize, tol: f64) -> Result<MarginalProductReport> {
    let n = psi.party_count();
    if i >= n {
        return Err(QecError::PartyOutOfRange { party: i, n });
    }
    let rho_i = psi.marginal(SubsystemMask::single(i))?;
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    for j in (0..n).filter(|&j| j != i) {
        let rho_j = psi.marginal(SubsystemMask::single(j))?;
        let pair = psi.marginal(SubsystemMask::from_parties(&[i, j]))?;
        let product = if i < j {
            rho_i.matrix().kronecker(rho_j.matrix())
        } else {
            rho_j.matrix().kronecker(rho_i.matrix())
        };
        pairs.push(PairResidual {
            other: j,
            residual: linalg::max_abs_diff(pair.matrix(), &product),
            mutual_information: mutual_information(psi, i, j)?,
        });
    }
    let max_residual = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(MarginalProductReport { party: i, pairs, max_residual, holds: max_residual <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::random_pure;
    use approx::assert_abs_diff_eq;

    fn kets(psi: &PureState, d: usize) -> Vec<(String, f64)> {
        let n = psi.party_count();
        psi.amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-12)
            .map(|(idx, a)| {
                let mut digits = vec![0; n];
                let mut r = idx;
                for k in (0..n).rev() {
                    digits[k] = r % d;
                    r /= d;
                }
                (digits.iter().map(|x| x.to_string()).collect::<String>(), a.re)
            })
            .collect()
    }

    #[test]
    fn even_permutation_counts() {
        assert_eq!(even_permutations(3).len(), 3);
        assert_eq!(even_permutations(4).len(), 12);
        assert_eq!(even_permutations(5).len(), 60);
        assert_eq!(even_permutations(3), vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
    }

    #[test]
    fn v4_matches_listing() {
        let r = v_state(4).unwrap();
        let listing = [
            "0000", "0123", "0231", "0312", "1111", "1032", "1320", "1203", "2222", "2301", "2013", "2130", "3333",
            "3210", "3102", "3021",
        ];
        let got = kets(&r.state, 4);
        assert_eq!(got.len(), 16);
        for (ket, amp) in &got {
            assert!(listing.contains(&ket.as_str()), "unexpected ket {ket}");
            assert_abs_diff_eq!(*amp, 0.25, epsilon = 1e-15);
        }
        assert!(r.max_marginal_residual < 1e-12);
        assert!(r.vector_residual() < 1e-8);
    }

    #[test]
    fn w4_matches_listing() {
        let r = w_state(4).unwrap();
        let listing = ["0000", "0111", "0222", "1012", "1120", "1201", "2021", "2102", "2210"];
        let got = kets(&r.state, 3);
        assert_eq!(got.len(), 9);
        for (ket, amp) in &got {
            assert!(listing.contains(&ket.as_str()), "unexpected ket {ket}");
            assert_abs_diff_eq!(*amp, 1.0 / 3.0, epsilon = 1e-15);
        }
        assert!(r.max_marginal_residual < 1e-12);
        assert!(r.vector_residual() < 1e-8);
    }

    #[test]
    fn v3_single_marginals() {
        let r = v_state(3).unwrap();
        assert_abs_diff_eq!(r.state.norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(r.max_marginal_residual < 1e-12);
        assert!(r.vector_residual() < 1e-8);
        assert!(v_state(2).is_err());
        assert!(v_state(6).is_err());
    }

    #[test]
    fn larger_v_and_w_states() {
        let v5 = v_state(5).unwrap();
        assert!(v5.max_marginal_residual < 1e-9, "{}", v5.max_marginal_residual);
        assert!(v5.vector_residual() < 1e-8);
        for n in [5, 6] {
            let w = w_state(n).unwrap();
            assert!(w.max_marginal_residual < 1e-9, "W{n}: {}", w.max_marginal_residual);
            assert!(w.vector_residual() < 1e-8, "W{n}: {}", w.vector_residual());
        }
        assert!(w_state(3).is_err());
    }

    #[test]
    fn tilde_single_coefficient_expansion() {
        let one = real(1.0);
        let zero = real(0.0);
        let r = tilde_v4(&[one, zero, zero, zero]).unwrap();
        let mut got: Vec<String> = kets(&r.state, 4).into_iter().map(|(k, a)| {
            assert_abs_diff_eq!(a, 0.5, epsilon = 1e-15);
            k
        }).collect();
        got.sort();
        assert_eq!(got, vec!["0000", "1320", "2130", "3210"]);
        assert_abs_diff_eq!(r.verified.single(3), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn tilde_uniform_is_v4() {
        let h = real(0.5);
        let r = tilde_v4(&[h, h, h, h]).unwrap();
        let v4 = v_state(4).unwrap();
        for (a, b) in r.state.amplitudes().iter().zip(v4.state.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(tilde_v4(&[h, h, h, real(0.0)]).is_err());
    }

    #[test]
    fn diagonal_bipartite_cases() {
        let psi = diagonal_bipartite(&[real(1.0), real(0.0)]).unwrap();
        assert_abs_diff_eq!(psi.subsystem_entropy(SubsystemMask::single(0)).unwrap(), 0.0, epsilon = 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = diagonal_bipartite(&[real(s), real(s)]).unwrap();
        assert_abs_diff_eq!(psi.subsystem_entropy(SubsystemMask::single(1)).unwrap(), 1.0, epsilon = 1e-12);
        let psi = diagonal_bipartite(&[real(0.5f64.sqrt()), real(0.5), real(0.5)]).unwrap();
        assert_abs_diff_eq!(psi.subsystem_entropy(SubsystemMask::single(0)).unwrap(), 1.5, epsilon = 1e-12);
        assert!(diagonal_bipartite(&[real(0.5)]).is_err());
    }

    #[test]
    fn inverse_coefficients_hit_targets() {
        for (t, d) in [(0.0, 2), (0.3, 2), (1.0, 2), (1.3568, 4), (2.0, 4), (1.5, 3)] {
            let c = one_vs_rest_coefficients(t, d).unwrap();
            assert_abs_diff_eq!(coefficient_entropy(&c), t, epsilon = 1e-10);
        }
        assert!(one_vs_rest_coefficients(1.5, 2).is_err());
    }

    #[test]
    fn family_corner_points() {
        let r = four_param_family(&FamilyParams::from_entropies(2.0, 0.0, 0.0, 0.0, 2).unwrap()).unwrap();
        let abc = r.reduced_vector().unwrap().to_paper_order().unwrap();
        for (a, b) in abc.iter().zip([2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
        let r = four_param_family(&FamilyParams::from_entropies(2.0, 1.0, 1.0, 1.0, 2).unwrap()).unwrap();
        let abc = r.reduced_vector().unwrap().to_paper_order().unwrap();
        for (a, b) in abc.iter().zip([4.0, 4.0, 4.0, 6.0, 6.0, 6.0, 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
        assert!(r.vector_residual() < 1e-8);
    }

    #[test]
    fn family_respects_cap() {
        let p = FamilyParams::from_entropies(1.0, 0.5, 0.5, 0.5, 2).unwrap().with_cap(1000);
        assert!(matches!(four_param_family(&p), Err(QecError::DimensionCap { dim: 4096, cap: 1000 })));
    }

    #[test]
    fn product_report_on_v4_and_random() {
        let v4 = v_state(4).unwrap().state;
        let r = verify_marginal_product(&v4, 0, 1e-10).unwrap();
        assert!(r.holds);
        assert!(r.pairs.iter().all(|p| p.residual < 1e-10 && p.mutual_information.abs() < 1e-9));

        let psi = random_pure(&PartyDims::new(vec![2, 2, 2, 2]).unwrap(), 3);
        let r = verify_marginal_product(&psi, 0, 1e-10).unwrap();
        assert!(!r.holds);

        let a = random_pure(&PartyDims::new(vec![2]).unwrap(), 1);
        let bcd = random_pure(&PartyDims::new(vec![2, 2, 2]).unwrap(), 2);
        let prod = a.tensor(&bcd).unwrap();
        let r = verify_marginal_product(&prod, 0, 1e-12).unwrap();
        assert!(r.holds, "{}", r.max_residual);
    }
}
