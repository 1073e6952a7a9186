//! Multipartite pure and mixed states.
//!
//! Amplitudes and matrix indices follow a row-major layout over the party index
//! tuple `(x_1, ..., x_N)`: the last party varies fastest. Parties are addressed
//! by 0-based indices throughout the library.

use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QecError, Result};
use crate::linalg::{self, C64};

pub const DEFAULT_DIM_CAP: usize = 4096;
/// Squared-norm window inside which input amplitudes are silently renormalized.
const ROUNDOFF_NORM_TOL: f64 = 1e-14;
pub const NORM_ACCEPT_TOL: f64 = 1e-6;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-CLIP_TOL, 0)` are set to zero; anything lower is an error.
pub const CLIP_TOL: f64 = 1e-10;
/// Numerical rank threshold used by [`purify`].
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PartyDims {
    dims: Vec<usize>,
    cap: usize,
}

impl PartialEq for PartyDims {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
    }
}

impl Eq for PartyDims {}

impl PartyDims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(dims: impl Into<Vec<usize>>, cap: usize) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(QecError::NoParties);
        }
        if dims.len() > 32 {
            return Err(QecError::InvalidArgument(format!(
                "at most 32 parties are supported, got {}",
                dims.len()
            )));
        }
        let mut total: usize = 1;
        for (party, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(QecError::ZeroDimension { party });
            }
            total = total.checked_mul(d).unwrap_or(usize::MAX);
        }
        if total > cap {
            return Err(QecError::DimensionCap { dim: total, cap });
        }
        Ok(Self { dims, cap })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    /// Dimension of the subsystem `mask`.
    pub fn subsystem_dim(&self, mask: SubsystemMask) -> usize {
        mask.parties().iter().map(|&p| self.dims[p]).product()
    }

    fn select(&self, mask: SubsystemMask) -> PartyDims {
        PartyDims {
            dims: mask.parties().iter().map(|&p| self.dims[p]).collect(),
            cap: self.cap,
        }
    }
}

impl fmt::Display for PartyDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Linear offsets of every multi-index over `parties`, enumerated with the last
/// listed party varying fastest, measured in the strides of the full system.
fn offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut offs = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(offs.len() * dims[p]);
        for &o in &offs {
            for x in 0..dims[p] {
                next.push(o + x * st[p]);
            }
        }
        offs = next;
    }
    offs
}

/// A set of parties, stored as a bitmask (bit `i` is party `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsystemMask(u32);

impl SubsystemMask {
    pub const EMPTY: SubsystemMask = SubsystemMask(0);

    pub fn from_bits(bits: u32) -> Self {
        SubsystemMask(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn from_parties(parties: &[usize]) -> Self {
        SubsystemMask(parties.iter().fold(0, |acc, &p| acc | (1 << p)))
    }

    pub fn single(party: usize) -> Self {
        SubsystemMask(1 << party)
    }

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            SubsystemMask(u32::MAX)
        } else {
            SubsystemMask((1u32 << n) - 1)
        }
    }

    pub fn contains(self, party: usize) -> bool {
        party < 32 && self.0 & (1 << party) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn parties(self) -> Vec<usize> {
        (0..32).filter(|&p| self.contains(p)).collect()
    }

    pub fn union(self, other: Self) -> Self {
        SubsystemMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsystemMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsystemMask(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Letter label, `A` for party 0: `{0, 2}` is `"AC"`.
    pub fn label(self) -> String {
        self.parties().iter().map(|&p| party_letter(p)).collect()
    }

    /// Validates a non-empty subsystem of an `n`-party system.
    pub fn check(self, n: usize) -> Result<()> {
        if self.is_empty() {
            return Err(QecError::EmptySubsystem);
        }
        if let Some(&p) = self.parties().iter().find(|&&p| p >= n) {
            return Err(QecError::PartyOutOfRange { party: p, n });
        }
        Ok(())
    }
}

impl serde::Serialize for SubsystemMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

pub fn party_letter(p: usize) -> char {
    if p < 26 {
        (b'A' + p as u8) as char
    } else {
        '?'
    }
}

/// Sorted spectrum of a density matrix.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub clipped: bool,
}

impl Spectrum {
    /// Sorts descending and clips round-off into `[0, 1]`.
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        let mut clipped = false;
        for v in values.iter_mut() {
            if *v < -CLIP_TOL || *v > 1.0 + CLIP_TOL || v.is_nan() {
                return Err(QecError::EigenvalueOutOfRange { value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
                clipped = true;
            } else if *v > 1.0 {
                *v = 1.0;
                clipped = true;
            }
        }
        Ok(Self { values, clipped })
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Entropy of the spectrum divided by its sum, so trace round-off from
    /// squaring amplitudes does not leak into the last digits.
    pub fn entropy(&self) -> f64 {
        let total = self.sum();
        if total > 0.0 {
            linalg::shannon_bits(&self.values.iter().map(|v| v / total).collect::<Vec<_>>())
        } else {
            0.0
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct PureState {
    dims: PartyDims,
    amps: Vec<C64>,
}

impl PureState {
    /// Builds a state from amplitudes in row-major order. Accepts a squared norm
    /// within [`NORM_ACCEPT_TOL`] of 1 and renormalizes unless it is already 1
    /// up to round-off, so serialized states load bit-for-bit.
    pub fn from_amplitudes(dims: PartyDims, amps: Vec<C64>) -> Result<Self> {
        let expected = dims.total();
        if amps.len() != expected {
            return Err(QecError::LengthMismatch { expected, got: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_ACCEPT_TOL {
            return Err(QecError::NotNormalized { norm });
        }
        let mut psi = Self { dims, amps };
        if (norm - 1.0).abs() > ROUNDOFF_NORM_TOL {
            psi.rescale(norm);
        }
        Ok(psi)
    }

    /// Builds a state from an arbitrary nonzero vector by normalizing it.
    pub fn normalized(dims: PartyDims, amps: Vec<C64>) -> Result<Self> {
        let expected = dims.total();
        if amps.len() != expected {
            return Err(QecError::LengthMismatch { expected, got: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(QecError::NotNormalized { norm });
        }
        let mut psi = Self { dims, amps };
        psi.rescale(norm);
        Ok(psi)
    }

    fn rescale(&mut self, norm_sqr: f64) {
        let s = 1.0 / norm_sqr.sqrt();
        for a in self.amps.iter_mut() {
            *a *= s;
        }
    }

    /// Computational basis product state `|x_1 ... x_N>`.
    pub fn basis(dims: PartyDims, index: &[usize]) -> Result<Self> {
        if index.len() != dims.len() {
            return Err(QecError::LengthMismatch { expected: dims.len(), got: index.len() });
        }
        let st = dims.strides();
        let mut lin = 0;
        for (p, (&x, &d)) in index.iter().zip(dims.as_slice()).enumerate() {
            if x >= d {
                return Err(QecError::InvalidArgument(format!(
                    "basis index {x} out of range for party {p} of dimension {d}"
                )));
            }
            lin += x * st[p];
        }
        let mut amps = vec![C64::new(0.0, 0.0); dims.total()];
        amps[lin] = C64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> &PartyDims {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        density_from_pure(self)
    }

    /// Reduced state on `keep`, computed directly from the amplitudes.
    pub fn marginal(&self, keep: SubsystemMask) -> Result<DensityMatrix> {
        let n = self.party_count();
        keep.check(n)?;
        let kept = keep.parties();
        let traced = keep.complement(n).parties();
        let ok = offsets(self.dims.as_slice(), &kept);
        let ot = offsets(self.dims.as_slice(), &traced);
        let dk = ok.len();
        let mut m = DMatrix::from_element(dk, dk, C64::new(0.0, 0.0));
        for a in 0..dk {
            for b in a..dk {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &ot {
                    acc += self.amps[ok[a] + t] * self.amps[ok[b] + t].conj();
                }
                m[(a, b)] = acc;
                m[(b, a)] = acc.conj();
            }
        }
        Ok(DensityMatrix { dims: self.dims.select(keep), matrix: m })
    }

    /// Entropy of the reduced state on `mask`, evaluated on whichever of `mask`
    /// and its complement has the smaller dimension. The full system has entropy 0.
    pub fn subsystem_entropy(&self, mask: SubsystemMask) -> Result<f64> {
        let n = self.party_count();
        mask.check(n)?;
        let rest = mask.complement(n);
        if rest.is_empty() {
            return Ok(0.0);
        }
        let side = if self.dims.subsystem_dim(mask) <= self.dims.subsystem_dim(rest) {
            mask
        } else {
            rest
        };
        self.marginal(side)?.entropy()
    }

    /// Plain tensor product; parties of `self` come first.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        let dims = PartyDims::with_cap(dims, self.dims.cap.max(other.dims.cap))?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { dims, amps })
    }

    /// Reorders and merges parties. Each group lists original parties; the new
    /// party `k` is the composite of `groups[k]` in the listed order.
    pub fn regroup(&self, groups: &[Vec<usize>]) -> Result<PureState> {
        let (order, new_dims) = grouping(self.dims.as_slice(), groups)?;
        let map = offsets(self.dims.as_slice(), &order);
        let amps = map.iter().map(|&i| self.amps[i]).collect();
        Ok(PureState { dims: PartyDims::with_cap(new_dims, self.dims.cap)?, amps })
    }

    /// Moves `party` to position 0, keeping the relative order of the rest.
    pub fn move_to_front(&self, party: usize) -> Result<PureState> {
        let n = self.party_count();
        if party >= n {
            return Err(QecError::PartyOutOfRange { party, n });
        }
        let mut groups = vec![vec![party]];
        groups.extend((0..n).filter(|&p| p != party).map(|p| vec![p]));
        self.regroup(&groups)
    }

    /// Applies a local operator `u` on one party: `(1 ⊗ .. ⊗ u ⊗ .. ⊗ 1)|psi>`.
    /// The result is not renormalized.
    pub fn apply_local(&self, party: usize, u: &DMatrix<C64>) -> Result<PureState> {
        let n = self.party_count();
        if party >= n {
            return Err(QecError::PartyOutOfRange { party, n });
        }
        let d = self.dims.dim(party);
        if u.nrows() != d || u.ncols() != d {
            return Err(QecError::LengthMismatch { expected: d, got: u.nrows() });
        }
        let rest: Vec<usize> = (0..n).filter(|&p| p != party).collect();
        let orest = offsets(self.dims.as_slice(), &rest);
        let stride = self.dims.strides()[party];
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut col = vec![C64::new(0.0, 0.0); d];
        for &o in &orest {
            for (x, c) in col.iter_mut().enumerate() {
                *c = self.amps[o + x * stride];
            }
            for y in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for x in 0..d {
                    acc += u[(y, x)] * col[x];
                }
                out[o + y * stride] = acc;
            }
        }
        Ok(PureState { dims: self.dims.clone(), amps: out })
    }
}

/// Validates a party grouping; returns the concatenated party order and the
/// merged dimensions.
fn grouping(dims: &[usize], groups: &[Vec<usize>]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut new_dims = Vec::with_capacity(groups.len());
    for g in groups {
        if g.is_empty() {
            return Err(QecError::InvalidGrouping("empty group".into()));
        }
        let mut d = 1;
        for &p in g {
            if p >= n {
                return Err(QecError::InvalidGrouping(format!("party {p} out of range for {n} parties")));
            }
            if seen[p] {
                return Err(QecError::InvalidGrouping(format!("party {p} assigned twice")));
            }
            seen[p] = true;
            order.push(p);
            d *= dims[p];
        }
        new_dims.push(d);
    }
    if let Some(p) = seen.iter().position(|s| !s) {
        return Err(QecError::InvalidGrouping(format!("party {p} not assigned to any group")));
    }
    Ok((order, new_dims))
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: PartyDims,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity and unit trace. Positivity is checked when
    /// the spectrum is taken.
    pub fn from_matrix(dims: PartyDims, matrix: DMatrix<C64>) -> Result<Self> {
        let d = dims.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QecError::LengthMismatch { expected: d, got: matrix.nrows() });
        }
        let deviation = linalg::hermiticity_defect(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(QecError::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(QecError::TraceNotOne { trace: trace.re });
        }
        Ok(Self { dims, matrix })
    }

    pub fn maximally_mixed(dims: PartyDims) -> Self {
        let d = dims.total();
        let matrix = DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &PartyDims {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn partial_trace(&self, keep: SubsystemMask) -> Result<DensityMatrix> {
        let n = self.party_count();
        keep.check(n)?;
        if keep == SubsystemMask::full(n) {
            return Ok(self.clone());
        }
        let kept = keep.parties();
        let traced = keep.complement(n).parties();
        let ok = offsets(self.dims.as_slice(), &kept);
        let ot = offsets(self.dims.as_slice(), &traced);
        let dk = ok.len();
        let m = DMatrix::from_fn(dk, dk, |a, b| {
            ot.iter().map(|&t| self.matrix[(ok[a] + t, ok[b] + t)]).sum()
        });
        Ok(DensityMatrix { dims: self.dims.select(keep), matrix: m })
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::from_eigenvalues(linalg::hermitian_eigenvalues(&self.matrix)?)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(self.spectrum()?.entropy())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        let dims = PartyDims::with_cap(dims, self.dims.cap.max(other.dims.cap))?;
        Ok(DensityMatrix { dims, matrix: self.matrix.kronecker(&other.matrix) })
    }

    pub fn regroup(&self, groups: &[Vec<usize>]) -> Result<DensityMatrix> {
        let (order, new_dims) = grouping(self.dims.as_slice(), groups)?;
        let map = offsets(self.dims.as_slice(), &order);
        let d = map.len();
        let matrix = DMatrix::from_fn(d, d, |r, c| self.matrix[(map[r], map[c])]);
        Ok(DensityMatrix { dims: PartyDims::with_cap(new_dims, self.dims.cap)?, matrix })
    }
}

/// Anything whose subsystem marginals and entropies can be queried.
pub trait Marginals {
    fn party_count(&self) -> usize;
    fn marginal(&self, keep: SubsystemMask) -> Result<DensityMatrix>;
    fn subsystem_entropy(&self, mask: SubsystemMask) -> Result<f64>;
}

impl Marginals for PureState {
    fn party_count(&self) -> usize {
        PureState::party_count(self)
    }
    fn marginal(&self, keep: SubsystemMask) -> Result<DensityMatrix> {
        PureState::marginal(self, keep)
    }
    fn subsystem_entropy(&self, mask: SubsystemMask) -> Result<f64> {
        PureState::subsystem_entropy(self, mask)
    }
}

impl Marginals for DensityMatrix {
    fn party_count(&self) -> usize {
        DensityMatrix::party_count(self)
    }
    fn marginal(&self, keep: SubsystemMask) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }
    fn subsystem_entropy(&self, mask: SubsystemMask) -> Result<f64> {
        self.partial_trace(mask)?.entropy()
    }
}

/// States that can be combined by tensor product and party regrouping.
pub trait Composite: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
    fn regroup(&self, groups: &[Vec<usize>]) -> Result<Self>;
}

impl Composite for PureState {
    fn tensor(&self, other: &Self) -> Result<Self> {
        PureState::tensor(self, other)
    }
    fn regroup(&self, groups: &[Vec<usize>]) -> Result<Self> {
        PureState::regroup(self, groups)
    }
}

impl Composite for DensityMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        DensityMatrix::tensor(self, other)
    }
    fn regroup(&self, groups: &[Vec<usize>]) -> Result<Self> {
        DensityMatrix::regroup(self, groups)
    }
}

pub fn pure_from_amplitudes(dims: PartyDims, amps: Vec<C64>) -> Result<PureState> {
    PureState::from_amplitudes(dims, amps)
}

pub fn density_from_pure(psi: &PureState) -> Result<DensityMatrix> {
    let d = psi.amps.len();
    let matrix = DMatrix::from_fn(d, d, |r, c| psi.amps[r] * psi.amps[c].conj());
    Ok(DensityMatrix { dims: psi.dims.clone(), matrix })
}

pub fn partial_trace(rho: &DensityMatrix, keep: SubsystemMask) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    rho.spectrum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.entropy()
}

/// Minimal purification: appends one party whose dimension is the numerical
/// rank of `rho`.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let (values, vectors) = linalg::hermitian_eigen(&rho.matrix)?;
    Spectrum::from_eigenvalues(values.clone())?;
    let kept: Vec<usize> = (0..values.len()).filter(|&k| values[k] > RANK_TOL).collect();
    let rank = kept.len().max(1);
    let d = rho.matrix.nrows();
    let mut amps = vec![C64::new(0.0, 0.0); d * rank];
    for (slot, &k) in kept.iter().enumerate() {
        let w = values[k].sqrt();
        for i in 0..d {
            amps[i * rank + slot] = vectors[(i, k)] * w;
        }
    }
    let mut dims = rho.dims.as_slice().to_vec();
    dims.push(rank);
    let dims = PartyDims::with_cap(dims, rho.dims.cap.saturating_mul(rank))?;
    PureState::from_amplitudes(dims, amps)
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure(dims: &PartyDims, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..dims.total())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    PureState::normalized(dims.clone(), amps).expect("gaussian vector is nonzero")
}

/// Marginal of a Haar-random pure state on `dims` times an ancilla of dimension `rank`.
pub fn random_density(dims: &PartyDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank < 1 {
        return Err(QecError::InvalidArgument("rank must be at least 1".into()));
    }
    let mut ext = dims.as_slice().to_vec();
    ext.push(rank);
    let ext = PartyDims::with_cap(ext, dims.cap.saturating_mul(rank))?;
    let psi = random_pure(&ext, seed);
    let mut rho = psi.marginal(SubsystemMask::full(dims.len()))?;
    rho.dims = dims.clone();
    Ok(rho)
}

/// Tensor product of two states of the same kind, optionally followed by a
/// regrouping of the concatenated party list (parties of `a` first).
pub fn tensor_product<T: Composite>(a: &T, b: &T, groups: Option<&[Vec<usize>]>) -> Result<T> {
    let ab = a.tensor(b)?;
    match groups {
        Some(g) => ab.regroup(g),
        None => Ok(ab),
    }
}
