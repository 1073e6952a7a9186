//! The polyhedral cone cut out by strong subadditivity and weak monotonicity,
//! its three-party branches, and the non-homogeneous bounds near its apex.

use std::collections::HashSet;

use serde::Serialize;

use crate::entropy::{binary_entropy_unchecked, canonical_subsets, n3_quantities, EntropyVector, N3_PAIRS};
use crate::error::{QecError, Result};
use crate::qstate::SubsystemMask;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;
pub const DEFAULT_SATURATION_TOL: f64 = 1e-6;
/// Entries at or below this count as zero when counting `N'`.
pub const NONZERO_THRESHOLD: f64 = 1e-9;
pub const MAX_GENERATED_PARTIES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    #[serde(rename = "SSA")]
    Ssa,
    #[serde(rename = "WM")]
    Wm,
}

/// A homogeneous inequality `sum coeff * H(subset) >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Halfspace {
    pub coeffs: Vec<(SubsystemMask, f64)>,
    pub family: Family,
    pub generator: (SubsystemMask, SubsystemMask),
    pub tag: String,
}

impl Halfspace {
    fn from_terms(terms: &[(SubsystemMask, f64)], family: Family, generator: (SubsystemMask, SubsystemMask), tag: String) -> Self {
        let mut coeffs: Vec<(SubsystemMask, f64)> = Vec::new();
        for &(m, c) in terms {
            if m.is_empty() {
                continue;
            }
            match coeffs.iter_mut().find(|(k, _)| *k == m) {
                Some(slot) => slot.1 += c,
                None => coeffs.push((m, c)),
            }
        }
        coeffs.retain(|&(_, c)| c != 0.0);
        coeffs.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.parties().cmp(&b.parties())));
        Self { coeffs, family, generator, tag }
    }

    pub fn evaluate(&self, v: &EntropyVector) -> f64 {
        self.coeffs.iter().map(|&(m, c)| c * v.get(m)).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Normalized coefficient map used for syntactic deduplication.
    fn key(&self) -> Vec<(u32, i64)> {
        let mut k: Vec<(u32, i64)> = self.coeffs.iter().map(|&(m, c)| (m.bits(), (c * 1024.0).round() as i64)).collect();
        k.sort_unstable();
        k
    }
}

fn set_label(m: SubsystemMask) -> String {
    if m.is_empty() {
        "∅".into()
    } else {
        m.label()
    }
}

/// All SSA and WM instances over unordered pairs of distinct subsets (the empty
/// set included, with `H(∅) = 0`), with trivial rows and syntactic duplicates removed.
pub fn generate_inequalities(n: usize) -> Result<Vec<Halfspace>> {
    if !(1..=MAX_GENERATED_PARTIES).contains(&n) {
        return Err(QecError::InvalidArgument(format!(
            "inequality generation supports 1 <= N <= {MAX_GENERATED_PARTIES}, got {n}"
        )));
    }
    let mut subsets = vec![SubsystemMask::EMPTY];
    subsets.extend(canonical_subsets(n));
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (a, &x) in subsets.iter().enumerate() {
        for &y in &subsets[a + 1..] {
            let ssa = Halfspace::from_terms(
                &[(x, 1.0), (y, 1.0), (x.intersection(y), -1.0), (x.union(y), -1.0)],
                Family::Ssa,
                (x, y),
                format!("SSA[{}|{}]", set_label(x), set_label(y)),
            );
            let wm = Halfspace::from_terms(
                &[(x, 1.0), (y, 1.0), (x.difference(y), -1.0), (y.difference(x), -1.0)],
                Family::Wm,
                (x, y),
                format!("WM[{}|{}]", set_label(x), set_label(y)),
            );
            for h in [ssa, wm] {
                if !h.is_trivial() && seen.insert(h.key()) {
                    rows.push(h);
                }
            }
        }
    }
    Ok(rows)
}

/// The twelve named three-party inequalities `I, II, III, IV` per pair.
pub fn named_n3_inequalities() -> Vec<Halfspace> {
    let m = SubsystemMask::from_parties;
    let mut out = Vec::with_capacity(12);
    for &(x, y, z) in &N3_PAIRS {
        let pair = m(&[x, y]).label();
        let (sx, sy, sz) = (m(&[x]), m(&[y]), m(&[z]));
        let (xy, xz, yz, xyz) = (m(&[x, y]), m(&[x, z]), m(&[y, z]), m(&[x, y, z]));
        out.push(Halfspace::from_terms(&[(sx, 1.0), (sy, 1.0), (xy, -1.0)], Family::Ssa, (sx, sy), format!("I_{pair}")));
        out.push(Halfspace::from_terms(&[(xz, 1.0), (yz, 1.0), (sz, -1.0), (xyz, -1.0)], Family::Ssa, (xz, yz), format!("II_{pair}")));
        out.push(Halfspace::from_terms(&[(sz, 1.0), (xyz, 1.0), (xy, -1.0)], Family::Wm, (sz, xyz), format!("III_{pair}")));
        out.push(Halfspace::from_terms(&[(xz, 1.0), (yz, 1.0), (sx, -1.0), (sy, -1.0)], Family::Wm, (xz, yz), format!("IV_{pair}")));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    Both,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Margin {
    pub tag: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub margins: Vec<Margin>,
    pub inside: bool,
    pub violated: Vec<String>,
    pub saturated: Vec<String>,
    pub sigma3_branch: Branch,
}

/// Evaluates every generated halfspace on `v`; `tol` serves both as the
/// membership slack and as the saturation window.
pub fn membership(v: &EntropyVector, tol: f64) -> Result<ConeReport> {
    membership_with(v, tol, tol)
}

pub fn membership_with(v: &EntropyVector, inside_tol: f64, saturation_tol: f64) -> Result<ConeReport> {
    if !(inside_tol > 0.0) || !(saturation_tol > 0.0) {
        return Err(QecError::InvalidArgument("tolerances must be positive".into()));
    }
    let rows = generate_inequalities(v.party_count())?;
    let margins: Vec<Margin> = rows.iter().map(|h| Margin { tag: h.tag.clone(), value: h.evaluate(v) }).collect();
    let violated: Vec<String> = margins.iter().filter(|m| m.value < -inside_tol).map(|m| m.tag.clone()).collect();
    let saturated = margins.iter().filter(|m| m.value.abs() <= saturation_tol).map(|m| m.tag.clone()).collect();
    let inside = violated.is_empty();
    let sigma3_branch = if v.party_count() == 3 && inside {
        branch_of(v, inside_tol)?
    } else {
        Branch::NotApplicable
    };
    Ok(ConeReport { margins, inside, violated, saturated, sigma3_branch })
}

fn branch_of(v: &EntropyVector, tol: f64) -> Result<Branch> {
    let m = n3_quantities(v)?.m;
    Ok(if m.abs() <= tol {
        Branch::Both
    } else if m > 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    })
}

/// Which of the two three-party branches contains `v`, by the sign of `M`.
pub fn sigma3_branch(v: &EntropyVector, tol: f64) -> Result<Branch> {
    if v.party_count() != 3 {
        return Err(QecError::InvalidArgument("branch classification needs N = 3".into()));
    }
    let report = membership(v, tol)?;
    if !report.inside {
        return Err(QecError::OutsideCone(report.violated.join(", ")));
    }
    branch_of(v, tol)
}

/// Membership through the union of the two branches, each defined by its seven
/// named inequalities.
pub fn branch_membership(v: &EntropyVector, tol: f64) -> Result<bool> {
    let q = n3_quantities(v)?;
    let nonneg = |xs: &[f64; 3]| xs.iter().all(|&x| x >= -tol);
    let plus = nonneg(&q.ii) && nonneg(&q.iv) && q.m >= -tol;
    let minus = nonneg(&q.i) && nonneg(&q.iii) && q.m <= tol;
    Ok(plus || minus)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualCheck {
    pub holds: bool,
    pub residuals: Vec<f64>,
}

/// Whether `v` lies on the ray where all `I_XY` and `III_XY` vanish.
pub fn line_ell_check(v: &EntropyVector, tol: f64) -> Result<ResidualCheck> {
    let q = n3_quantities(v)?;
    let residuals: Vec<f64> = q.i.iter().chain(q.iii.iter()).map(|x| x.abs()).collect();
    Ok(ResidualCheck { holds: residuals.iter().all(|&r| r <= tol), residuals })
}

/// `H(N) > 0` and `H(X_i) + H(N) = H(N \ X_i)` for every party.
pub fn corollary_conditions(v: &EntropyVector, tol: f64) -> ResidualCheck {
    let n = v.party_count();
    let total = v.total();
    let full = SubsystemMask::full(n);
    let residuals: Vec<f64> = (0..n)
        .map(|i| (v.single(i) + total - v.get(full.difference(SubsystemMask::single(i)))).abs())
        .collect();
    ResidualCheck { holds: total > tol && residuals.iter().all(|&r| r <= tol), residuals }
}

/// Party `i` with `H(X_i) > 0`, vanishing mutual information with every other
/// party, and `H(X_i) + H(N) = H(N \ X_i)`.
fn isolated_party(v: &EntropyVector, tol: f64) -> Option<usize> {
    let n = v.party_count();
    let full = SubsystemMask::full(n);
    (0..n).find(|&i| {
        let hi = v.single(i);
        let mi_ok = (0..n).filter(|&j| j != i).all(|j| {
            (hi + v.single(j) - v.get(SubsystemMask::from_parties(&[i, j]))).abs() <= tol
        });
        let comp_ok = (hi + v.total() - v.get(full.difference(SubsystemMask::single(i)))).abs() <= tol;
        hi > tol && n >= 2 && mi_ok && comp_ok
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// Whether the hypotheses under which the bound constrains realizable
    /// vectors hold for this vector.
    pub applicable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TipReport {
    pub theorem_sum: f64,
    pub corollary_sum: f64,
    pub n_prime: usize,
    pub refined_threshold: Option<f64>,
    pub max_entry: f64,
    pub corollary_conditions: ResidualCheck,
    /// Party satisfying the isolated-party conditions, if any.
    pub isolated_party: Option<usize>,
    pub theorem: BoundCheck,
    pub corollary: BoundCheck,
    pub refined: BoundCheck,
    /// Names of applicable bounds that fail: such a vector cannot be an entropy
    /// vector of any state. Advisory only.
    pub exclusion_advisories: Vec<String>,
    pub conditions_unmet: bool,
}

/// Evaluates the non-homogeneous bounds on `v`. This only evaluates the bounds;
/// it makes no claim about whether `v` is realizable.
pub fn tip_bounds(v: &EntropyVector, tol: f64) -> TipReport {
    let n = v.party_count();
    let singles: Vec<f64> = (0..n).map(|i| v.single(i)).collect();
    let total = v.total();
    let theorem_sum: f64 = singles.iter().sum();
    let corollary_sum = theorem_sum + total;
    let nonzero: Vec<f64> = singles.iter().chain(std::iter::once(&total)).copied().filter(|&x| x > NONZERO_THRESHOLD).collect();
    let n_prime = nonzero.len();
    let max_entry = nonzero.iter().cloned().fold(0.0, f64::max);
    let refined_threshold = (n_prime > 0).then(|| binary_entropy_unchecked(1.0 / (2.0 * n_prime as f64)));

    let corollary_conditions = corollary_conditions(v, tol);
    let isolated = isolated_party(v, tol);
    // Pure total state with an isolated party: the setting of the sum bound.
    let theorem_applicable = total.abs() <= tol && isolated.is_some();

    let theorem = BoundCheck { value: theorem_sum, threshold: 1.0, satisfied: theorem_sum > 1.0, applicable: theorem_applicable };
    let corollary = BoundCheck {
        value: corollary_sum,
        threshold: 1.0,
        satisfied: corollary_sum > 1.0,
        applicable: corollary_conditions.holds,
    };
    let refined = BoundCheck {
        value: max_entry,
        threshold: refined_threshold.unwrap_or(f64::NAN),
        satisfied: refined_threshold.map_or(false, |t| max_entry > t),
        applicable: corollary_conditions.holds || isolated.is_some(),
    };
    let mut exclusion_advisories = Vec::new();
    for (name, b) in [("theorem", &theorem), ("corollary", &corollary), ("refined", &refined)] {
        if b.applicable && !b.satisfied {
            exclusion_advisories.push(name.to_string());
        }
    }
    let conditions_unmet = !(theorem.applicable || corollary.applicable || refined.applicable);
    TipReport {
        theorem_sum,
        corollary_sum,
        n_prime,
        refined_threshold,
        max_entry,
        corollary_conditions,
        isolated_party: isolated,
        theorem,
        corollary,
        refined,
        exclusion_advisories,
        conditions_unmet,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingReport {
    /// Entropies of parties 2..N sorted ascending (party 1 is the isolated one).
    pub sorted_others: Vec<f64>,
    pub isolated_entropy: f64,
    pub checks: Vec<(String, f64)>,
    pub holds: bool,
}

/// Ordering constraints for a four-party pure state whose first party has
/// vanishing mutual information with the others. Each check is reported as a
/// margin that must be `>= -tol`.
pub fn n4_ordering_bounds(v: &EntropyVector, tol: f64) -> Result<OrderingReport> {
    if v.party_count() != 4 {
        return Err(QecError::InvalidArgument("ordering bounds need N = 4".into()));
    }
    let h1 = v.single(0);
    let mut others: Vec<f64> = (1..4).map(|i| v.single(i)).collect();
    others.sort_by(|a, b| a.total_cmp(b));
    let (h2, h3, h4) = (others[0], others[1], others[2]);
    let h8 = binary_entropy_unchecked(0.125);
    let checks = vec![
        ("H1 <= H2".to_string(), h2 - h1),
        ("H1 <= H3".to_string(), h3 - h1),
        ("H1 <= H4".to_string(), h4 - h1),
        ("H1 + H4 <= H2 + H3".to_string(), h2 + h3 - h1 - h4),
        ("H4 >= h(1/8)".to_string(), h4 - h8),
        ("H3 >= h(1/8)/2".to_string(), h3 - h8 / 2.0),
    ];
    let holds = checks.iter().all(|(_, m)| *m >= -tol);
    Ok(OrderingReport { sorted_others: others, isolated_entropy: h1, checks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn ell(t: f64) -> EntropyVector {
        EntropyVector::from_paper_order(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 1.0]).unwrap().scaled(t)
    }

    /// Independent enumeration over dense integer coefficient vectors.
    fn brute_force_rows(n: usize) -> usize {
        let size = 1usize << n;
        let mut rows: std::collections::BTreeSet<Vec<i32>> = Default::default();
        for x in 0..size {
            for y in 0..size {
                if x == y {
                    continue;
                }
                for (p, q) in [(x & y, x | y), (x & !y, y & !x)] {
                    let mut c = vec![0i32; size];
                    c[x] += 1;
                    c[y] += 1;
                    c[p] -= 1;
                    c[q] -= 1;
                    c[0] = 0;
                    if c.iter().any(|&k| k != 0) {
                        rows.insert(c);
                    }
                }
            }
        }
        rows.len()
    }

    #[test]
    fn generated_counts_match_brute_force() {
        for n in 1..=4 {
            assert_eq!(generate_inequalities(n).unwrap().len(), brute_force_rows(n), "N = {n}");
        }
        assert_eq!(generate_inequalities(2).unwrap().len(), 3);
        assert!(generate_inequalities(0).is_err());
        assert!(generate_inequalities(7).is_err());
    }

    #[test]
    fn two_party_rows_are_subadditivity_and_araki_lieb() {
        let rows = generate_inequalities(2).unwrap();
        let as_maps: Vec<BTreeMap<String, i64>> = rows
            .iter()
            .map(|h| h.coeffs.iter().map(|(m, c)| (m.label(), *c as i64)).collect())
            .collect();
        let sa: BTreeMap<String, i64> = [("A".into(), 1), ("B".into(), 1), ("AB".into(), -1)].into();
        let al1: BTreeMap<String, i64> = [("A".into(), 1), ("AB".into(), 1), ("B".into(), -1)].into();
        let al2: BTreeMap<String, i64> = [("B".into(), 1), ("AB".into(), 1), ("A".into(), -1)].into();
        for m in [sa, al1, al2] {
            assert!(as_maps.contains(&m));
        }
    }

    #[test]
    fn named_rows_are_generated() {
        let rows = generate_inequalities(3).unwrap();
        let keys: HashSet<_> = rows.iter().map(|h| h.key()).collect();
        for h in named_n3_inequalities() {
            assert!(keys.contains(&h.key()), "{} missing", h.tag);
        }
    }

    #[test]
    fn ghz_is_inside_with_both_branch() {
        let v = EntropyVector::new(3, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let r = membership(&v, 1e-8).unwrap();
        assert!(r.inside);
        assert_eq!(r.sigma3_branch, Branch::Both);
        let sa = r.margins.iter().find(|m| m.tag == "SSA[A|B]").unwrap();
        assert_eq!(sa.value, 1.0);
        assert_eq!(sigma3_branch(&v, 1e-8).unwrap(), Branch::Both);
    }

    #[test]
    fn ell_is_inside_minus_branch_with_saturations() {
        let v = ell(1.0);
        let r = membership(&v, 1e-8).unwrap();
        assert!(r.inside);
        assert_eq!(r.sigma3_branch, Branch::Minus);
        let keys: Vec<_> = rows_with_zero_margin(&v);
        for h in named_n3_inequalities().iter().filter(|h| h.tag.starts_with("I_") || h.tag.starts_with("III_")) {
            assert!(keys.contains(&h.key()), "{} not saturated", h.tag);
        }
    }

    fn rows_with_zero_margin(v: &EntropyVector) -> Vec<Vec<(u32, i64)>> {
        generate_inequalities(3).unwrap().into_iter().filter(|h| h.evaluate(v).abs() <= 1e-12).map(|h| h.key()).collect()
    }

    #[test]
    fn negative_entry_is_violated() {
        let mut vals = vec![0.0; 7];
        vals[0] = -1.0;
        let v = EntropyVector::new(3, vals).unwrap();
        let r = membership(&v, 1e-8).unwrap();
        assert!(!r.inside);
        assert!(!r.violated.is_empty());
        assert_eq!(r.sigma3_branch, Branch::NotApplicable);
        assert!(matches!(sigma3_branch(&v, 1e-8), Err(QecError::OutsideCone(_))));
    }

    #[test]
    fn line_checks() {
        for t in [0.0, 0.3, 1.0, 7.5] {
            assert!(line_ell_check(&ell(t), 1e-9).unwrap().holds);
        }
        let ghz = EntropyVector::new(3, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let r = line_ell_check(&ghz, 1e-9).unwrap();
        assert!(!r.holds);
        assert_eq!(r.residuals[0], 1.0);
    }

    #[test]
    fn corollary_on_ghz_and_ell() {
        let ghz = EntropyVector::new(3, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(!corollary_conditions(&ghz, 1e-9).holds);
        assert!(corollary_conditions(&ell(2.0), 1e-9).holds);
    }

    #[test]
    fn tip_bounds_on_scaled_ell() {
        let r = tip_bounds(&ell(0.3), 1e-9);
        assert!((r.corollary_sum - 1.2).abs() < 1e-12);
        assert!(r.corollary.satisfied);
        assert_eq!(r.n_prime, 4);
        assert!((r.refined_threshold.unwrap() - 0.543_564_443_199_596).abs() < 1e-12);
        assert!((r.max_entry - 0.3).abs() < 1e-12);
        assert!(!r.refined.satisfied && r.refined.applicable);
        assert_eq!(r.exclusion_advisories, vec!["refined".to_string()]);

        let r = tip_bounds(&ell(0.6), 1e-9);
        assert!(r.exclusion_advisories.is_empty());
        assert!(r.theorem.satisfied && r.corollary.satisfied && r.refined.satisfied);

        let r = tip_bounds(&ell(0.2), 1e-9);
        assert!(r.exclusion_advisories.contains(&"corollary".to_string()));

        let r = tip_bounds(&EntropyVector::zeros(3), 1e-9);
        assert_eq!(r.n_prime, 0);
        assert!(r.refined_threshold.is_none());
        assert!(r.conditions_unmet);
        assert!(r.exclusion_advisories.is_empty());
    }

    #[test]
    fn ordering_bounds() {
        let full = |s: [f64; 4]| {
            // pure four-party vector with vanishing pair informations
            let subs = canonical_subsets(4);
            let vals = subs
                .iter()
                .map(|m| {
                    let side = if m.len() <= 2 { *m } else { m.complement(4) };
                    side.parties().iter().map(|&p| s[p]).sum::<f64>()
                })
                .collect();
            EntropyVector::new(4, vals).unwrap()
        };
        assert!(n4_ordering_bounds(&full([2.0; 4]), 1e-9).unwrap().holds);
        let l3 = 3f64.log2();
        assert!(n4_ordering_bounds(&full([l3; 4]), 1e-9).unwrap().holds);
        assert!(!n4_ordering_bounds(&full([1.0, 0.1, 0.1, 0.1]), 1e-9).unwrap().holds);
        assert!(n4_ordering_bounds(&ell(1.0), 1e-9).is_err());
    }
}
