//! Off-diagonal tensors and rank-one decompositions.
//!
//! An `OffDiagTensor` of order `d` and width `w` has one exact rational entry
//! for every `d`-tuple over `1..=w` with pairwise-distinct coordinates;
//! storage is sparse with absent tuples meaning zero. A `RankDecomposition`
//! is a sum of scaled rank-one terms; projecting it keeps only the
//! distinct-coordinate positions, densifying keeps everything (subject to a
//! size cap). `pad_embed` places a decomposition into a larger order by
//! pinning the new coordinates to a fixed tuple with indicator vectors.

use crate::error::{Error, Result};
use crate::injection::Injection;
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

/// Default cap on dense materialization, in number of cells.
pub const DEFAULT_DENSE_CAP: u128 = 1_000_000;

/// Environment variable overriding the dense cap.
pub const DENSE_CAP_ENV: &str = "FI_CLOSURE_DENSE_CAP";

/// The cap currently in effect: the environment override when set and
/// parseable, the default otherwise.
pub fn dense_cap() -> u128 {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// All `len`-tuples over `1..=width` with pairwise-distinct entries, in
/// lexicographic order. Empty when `len > width`; the single empty tuple when
/// `len = 0`.
pub fn distinct_tuples(width: usize, len: usize) -> Vec<Vec<usize>> {
    let values: Vec<usize> = (1..=width).collect();
    distinct_tuples_over(&values, len)
}

/// All `len`-tuples with pairwise-distinct entries drawn from `values`
/// (assumed sorted ascending), in lexicographic order.
pub fn distinct_tuples_over(values: &[usize], len: usize) -> Vec<Vec<usize>> {
    fn rec(values: &[usize], len: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for (i, &v) in values.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                current.push(v);
                rec(values, len, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    if len <= values.len() {
        let mut used = vec![false; values.len()];
        rec(values, len, &mut Vec::with_capacity(len), &mut used, &mut out);
    }
    out
}

/// Number of distinct-coordinate `len`-tuples over a `width`-element set:
/// the falling factorial `width * (width-1) * ... * (width-len+1)`.
pub fn falling_factorial(width: usize, len: usize) -> u128 {
    if len > width {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..len {
        acc *= (width - i) as u128;
    }
    acc
}

fn validate_tuple(d: usize, width: usize, tuple: &[usize]) -> Result<()> {
    let bad = |reason: &str| Error::BadTuple {
        tuple: tuple.to_vec(),
        d,
        width,
        reason: reason.to_string(),
    };
    if tuple.len() != d {
        return Err(bad("wrong length"));
    }
    let mut seen = BTreeSet::new();
    for &v in tuple {
        if v == 0 || v > width {
            return Err(bad("coordinate out of range"));
        }
        if !seen.insert(v) {
            return Err(bad("repeated coordinate"));
        }
    }
    Ok(())
}

/// Sparse tensor supported on distinct-coordinate tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffDiagTensor {
    d: usize,
    width: usize,
    entries: BTreeMap<Vec<usize>, Scalar>,
}

impl OffDiagTensor {
    /// Build from explicit entries; zero values are dropped, duplicate tuples
    /// and malformed tuples are rejected.
    pub fn from_entries<I>(d: usize, width: usize, entries: I) -> Result<OffDiagTensor>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let mut map = BTreeMap::new();
        for (tuple, value) in entries {
            validate_tuple(d, width, &tuple)?;
            // Zeros participate in duplicate detection and are dropped below.
            if map.insert(tuple.clone(), value).is_some() {
                return Err(Error::DuplicateEntry { tuple });
            }
        }
        map.retain(|_, v| !v.is_zero());
        Ok(OffDiagTensor { d, width, entries: map })
    }

    /// Like `from_entries` but requires every off-diagonal position to be
    /// supplied explicitly (zeros included).
    pub fn from_entries_strict<I>(d: usize, width: usize, entries: I) -> Result<OffDiagTensor>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let mut count = 0usize;
        let mut map = BTreeMap::new();
        for (tuple, value) in entries {
            validate_tuple(d, width, &tuple)?;
            if map.insert(tuple.clone(), value).is_some() {
                return Err(Error::DuplicateEntry { tuple });
            }
            count += 1;
        }
        let expected = falling_factorial(width, d);
        if count as u128 != expected {
            return Err(Error::MissingEntries { expected: expected as usize, got: count });
        }
        map.retain(|_, v| !v.is_zero());
        Ok(OffDiagTensor { d, width, entries: map })
    }

    pub fn zero(d: usize, width: usize) -> OffDiagTensor {
        OffDiagTensor { d, width, entries: BTreeMap::new() }
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.entries.iter()
    }

    pub fn num_nonzero(&self) -> usize {
        self.entries.len()
    }

    /// Entry at a validated tuple; zero when absent.
    pub fn value(&self, tuple: &[usize]) -> Result<Scalar> {
        validate_tuple(self.d, self.width, tuple)?;
        Ok(self.entries.get(tuple).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Entry lookup for callers that already hold a valid tuple.
    pub(crate) fn value_unchecked(&self, tuple: &[usize]) -> Scalar {
        self.entries.get(tuple).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Pull back along `rho: [w'] -> [w]`: the result has width `w'` and
    /// entries `q(J) = p(rho(J))`.
    pub fn restrict(&self, rho: &Injection) -> Result<OffDiagTensor> {
        if rho.codomain_size() != self.width {
            return Err(Error::BadInjection {
                images: rho.images().to_vec(),
                codomain: self.width,
            });
        }
        let w2 = rho.domain_size();
        let mut map = BTreeMap::new();
        for tuple in distinct_tuples(w2, self.d) {
            let image = rho.apply_tuple(&tuple)?;
            if let Some(v) = self.entries.get(&image) {
                if !v.is_zero() {
                    map.insert(tuple, v.clone());
                }
            }
        }
        Ok(OffDiagTensor { d: self.d, width: w2, entries: map })
    }

    /// Fix the coordinates at `fixed` (1-based position, value) pairs; the
    /// result has order `d - |fixed|` over the remaining positions in
    /// increasing order. When `allowed` is given, only entries whose running
    /// coordinates all lie in `allowed` are kept.
    pub fn slice(
        &self,
        fixed: &[(usize, usize)],
        allowed: Option<&BTreeSet<usize>>,
    ) -> Result<OffDiagTensor> {
        let mut positions = BTreeSet::new();
        for &(pos, value) in fixed {
            if pos == 0 || pos > self.d || !positions.insert(pos) {
                return Err(Error::EmbeddingMismatch {
                    reason: format!("invalid fixed position {pos} for order {}", self.d),
                });
            }
            if value == 0 || value > self.width {
                return Err(Error::EmbeddingMismatch {
                    reason: format!("fixed value {value} outside 1..={}", self.width),
                });
            }
        }
        let inner_d = self.d - fixed.len();
        let mut map = BTreeMap::new();
        'entries: for (tuple, v) in &self.entries {
            for &(pos, value) in fixed {
                if tuple[pos - 1] != value {
                    continue 'entries;
                }
            }
            let mut beta = Vec::with_capacity(inner_d);
            for (i, &coord) in tuple.iter().enumerate() {
                if !positions.contains(&(i + 1)) {
                    if let Some(set) = allowed {
                        if !set.contains(&coord) {
                            continue 'entries;
                        }
                    }
                    beta.push(coord);
                }
            }
            map.insert(beta, v.clone());
        }
        Ok(OffDiagTensor { d: inner_d, width: self.width, entries: map })
    }

    /// Dense array with diagonal cells zero; subject to the dense cap.
    pub fn to_dense(&self) -> Result<DenseTensor> {
        self.to_dense_with_cap(dense_cap())
    }

    pub fn to_dense_with_cap(&self, cap: u128) -> Result<DenseTensor> {
        let mut dense = DenseTensor::zeros_with_cap(self.d, self.width, cap)?;
        for (tuple, v) in &self.entries {
            *dense.get_mut(tuple) = v.clone();
        }
        Ok(dense)
    }
}

// --- OffDiagTensor wire format ----------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntryWire {
    idx: Vec<usize>,
    value: Scalar,
}

#[derive(Serialize, Deserialize)]
struct TensorWire {
    d: usize,
    width: usize,
    entries: Vec<EntryWire>,
}

impl Serialize for OffDiagTensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = TensorWire {
            d: self.d,
            width: self.width,
            entries: self
                .entries
                .iter()
                .map(|(t, v)| EntryWire { idx: t.clone(), value: v.clone() })
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OffDiagTensor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = TensorWire::deserialize(deserializer)?;
        OffDiagTensor::from_entries(
            wire.d,
            wire.width,
            wire.entries.into_iter().map(|e| (e.idx, e.value)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// One scaled rank-one term: `coeff * v1 (x) v2 (x) ... (x) vd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOneTerm {
    pub coeff: Scalar,
    pub vectors: Vec<Vec<Scalar>>,
}

/// Sum of rank-one terms of a fixed order and width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDecomposition {
    d: usize,
    width: usize,
    terms: Vec<RankOneTerm>,
}

impl RankDecomposition {
    pub fn new(d: usize, width: usize, terms: Vec<RankOneTerm>) -> Result<RankDecomposition> {
        for (i, term) in terms.iter().enumerate() {
            if term.vectors.len() != d {
                return Err(Error::BadDecomposition {
                    reason: format!("term {} has {} vectors, expected {d}", i + 1, term.vectors.len()),
                });
            }
            for v in &term.vectors {
                if v.len() != width {
                    return Err(Error::BadDecomposition {
                        reason: format!("term {} has a vector of length {}, expected {width}", i + 1, v.len()),
                    });
                }
            }
        }
        Ok(RankDecomposition { d, width, terms })
    }

    pub fn empty(d: usize, width: usize) -> RankDecomposition {
        RankDecomposition { d, width, terms: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Value of the represented tensor at an arbitrary cell (no distinctness
    /// requirement).
    pub fn cell_value(&self, tuple: &[usize]) -> Scalar {
        let mut total = Scalar::zero();
        for term in &self.terms {
            let mut prod = term.coeff.clone();
            for (axis, &coord) in tuple.iter().enumerate() {
                prod *= &term.vectors[axis][coord - 1];
                if prod.is_zero() {
                    break;
                }
            }
            total += &prod;
        }
        total
    }

    /// Restrict the represented tensor to distinct-coordinate tuples.
    pub fn project(&self) -> OffDiagTensor {
        let mut map = BTreeMap::new();
        for tuple in distinct_tuples(self.width, self.d) {
            let v = self.cell_value(&tuple);
            if !v.is_zero() {
                map.insert(tuple, v);
            }
        }
        OffDiagTensor { d: self.d, width: self.width, entries: map }
    }

    /// Full dense array including diagonal cells; errors when `width^d`
    /// exceeds the cap (default 10^6 cells, `FI_CLOSURE_DENSE_CAP` overrides).
    pub fn densify(&self) -> Result<DenseTensor> {
        self.densify_with_cap(dense_cap())
    }

    pub fn densify_with_cap(&self, cap: u128) -> Result<DenseTensor> {
        let mut dense = DenseTensor::zeros_with_cap(self.d, self.width, cap)?;
        let mut tuple = vec![1usize; self.d];
        loop {
            *dense.get_mut(&tuple) = self.cell_value(&tuple);
            // Advance odometer-style; done when every coordinate wraps.
            let mut axis = self.d;
            loop {
                if axis == 0 {
                    return Ok(dense);
                }
                axis -= 1;
                if tuple[axis] < self.width {
                    tuple[axis] += 1;
                    break;
                }
                tuple[axis] = 1;
            }
        }
    }
}

// --- RankDecomposition wire format -------------------------------------------

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    d: usize,
    width: usize,
    terms: Vec<RankOneTerm>,
}

impl Serialize for RankDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionWire { d: self.d, width: self.width, terms: self.terms.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RankDecomposition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DecompositionWire::deserialize(deserializer)?;
        RankDecomposition::new(wire.d, wire.width, wire.terms).map_err(serde::de::Error::custom)
    }
}

/// Dense array of order `d` and width `w`, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseTensor {
    d: usize,
    width: usize,
    data: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct DenseWire {
    d: usize,
    width: usize,
    values: Vec<Scalar>,
}

impl Serialize for DenseTensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DenseWire { d: self.d, width: self.width, values: self.data.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseTensor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DenseWire::deserialize(deserializer)?;
        let cells = (wire.width as u128).checked_pow(wire.d as u32);
        if cells != Some(wire.values.len() as u128) {
            return Err(serde::de::Error::custom(format!(
                "expected width^d = {}^{} values, got {}",
                wire.width,
                wire.d,
                wire.values.len()
            )));
        }
        Ok(DenseTensor { d: wire.d, width: wire.width, data: wire.values })
    }
}

impl DenseTensor {
    pub fn zeros_with_cap(d: usize, width: usize, cap: u128) -> Result<DenseTensor> {
        let mut cells: u128 = 1;
        for _ in 0..d {
            cells = cells.saturating_mul(width as u128);
        }
        if cells > cap {
            return Err(Error::DenseCapExceeded { entries: cells, cap });
        }
        Ok(DenseTensor { d, width, data: vec![Scalar::zero(); cells as usize] })
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn offset(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.d);
        let mut off = 0usize;
        for &c in tuple {
            debug_assert!((1..=self.width).contains(&c));
            off = off * self.width + (c - 1);
        }
        off
    }

    pub fn get(&self, tuple: &[usize]) -> &Scalar {
        &self.data[self.offset(tuple)]
    }

    pub fn get_mut(&mut self, tuple: &[usize]) -> &mut Scalar {
        let off = self.offset(tuple);
        &mut self.data[off]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Matrix of the flattening along `axis`: rows are labeled by all
    /// `(d-1)`-tuples over `1..=w` (repeats allowed) in lexicographic order,
    /// columns by the axis coordinate.
    pub fn flatten(&self, axis: usize) -> Result<QMatrix> {
        if axis == 0 || axis > self.d {
            return Err(Error::AxisOutOfRange { axis, d: self.d });
        }
        let w = self.width;
        let rows_count = w.pow((self.d - 1) as u32);
        let mut rows = Vec::with_capacity(rows_count);
        let mut label = vec![1usize; self.d - 1];
        let mut remaining = rows_count;
        loop {
            if remaining == 0 {
                break;
            }
            let mut row = Vec::with_capacity(w);
            for c in 1..=w {
                let mut tuple = Vec::with_capacity(self.d);
                tuple.extend_from_slice(&label[..axis - 1]);
                tuple.push(c);
                tuple.extend_from_slice(&label[axis - 1..]);
                row.push(self.get(&tuple).clone());
            }
            rows.push(row);
            remaining -= 1;
            let mut pos = self.d.saturating_sub(1);
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if label[pos] < w {
                    label[pos] += 1;
                    break;
                }
                label[pos] = 1;
            }
        }
        QMatrix::from_rows(rows)
    }
}

/// Embed a decomposition of order `t.d` into order `t.d + alpha.len()`:
/// `positions` (1-based, strictly increasing) receive `t`'s axes in order,
/// the remaining positions are pinned to the entries of `alpha` by indicator
/// vectors. The result is supported where the pinned coordinates match
/// `alpha` and agrees with `t` there; term count is unchanged.
pub fn pad_embed(
    t: &RankDecomposition,
    positions: &[usize],
    alpha: &[usize],
    width: usize,
) -> Result<RankDecomposition> {
    let d = t.order() + alpha.len();
    if t.width() != width {
        return Err(Error::EmbeddingMismatch {
            reason: format!("decomposition width {} but target width {width}", t.width()),
        });
    }
    if positions.len() != t.order() {
        return Err(Error::EmbeddingMismatch {
            reason: format!("{} positions for a decomposition of order {}", positions.len(), t.order()),
        });
    }
    for (i, &p) in positions.iter().enumerate() {
        if p == 0 || p > d || (i > 0 && positions[i - 1] >= p) {
            return Err(Error::EmbeddingMismatch {
                reason: format!("positions {positions:?} must be strictly increasing within 1..={d}"),
            });
        }
    }
    let mut alpha_seen = BTreeSet::new();
    for &a in alpha {
        if a == 0 || a > width || !alpha_seen.insert(a) {
            return Err(Error::EmbeddingMismatch {
                reason: format!("pinned tuple {alpha:?} must have distinct values in 1..={width}"),
            });
        }
    }
    let position_set: BTreeSet<usize> = positions.iter().copied().collect();
    let fixed_positions: Vec<usize> = (1..=d).filter(|p| !position_set.contains(p)).collect();
    let mut terms = Vec::with_capacity(t.term_count());
    for term in t.terms() {
        let mut vectors: Vec<Vec<Scalar>> = vec![Vec::new(); d];
        for (i, &p) in positions.iter().enumerate() {
            vectors[p - 1] = term.vectors[i].clone();
        }
        for (k, &p) in fixed_positions.iter().enumerate() {
            let mut e = vec![Scalar::zero(); width];
            e[alpha[k] - 1] = Scalar::one();
            vectors[p - 1] = e;
        }
        terms.push(RankOneTerm { coeff: term.coeff.clone(), vectors });
    }
    RankDecomposition::new(d, width, terms)
}

/// Generator counts per order after widening by `m` extra columns: entry `e`
/// (for `e < d`) is `C(d,e) * m*(m-1)*...*(m-d+e+1)` and entry `d` is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftProfile {
    pub d: usize,
    pub m: usize,
    pub counts: Vec<u128>,
}

impl ShiftProfile {
    /// Total variable count over a `t`-element index set, weighting each
    /// order-`e` generator by its `t!/(t-e)!` distinct tuples.
    pub fn weighted_tuple_count(&self, t: usize) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(e, &k)| k * falling_factorial(t, e))
            .sum()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn shift_profile(d: usize, m: usize) -> ShiftProfile {
    let mut counts = Vec::with_capacity(d + 1);
    for e in 0..d {
        counts.push(binomial(d, e) * falling_factorial(m, d - e));
    }
    counts.push(1);
    ShiftProfile { d, m, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn vecs(vs: &[&[i64]]) -> Vec<Vec<Scalar>> {
        vs.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(
            distinct_tuples(3, 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 1], vec![2, 3], vec![3, 1], vec![3, 2]]
        );
        assert_eq!(distinct_tuples(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(distinct_tuples(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(falling_factorial(5, 3), 60);
        assert_eq!(falling_factorial(2, 3), 0);
        assert_eq!(falling_factorial(4, 0), 1);
    }

    #[test]
    fn entry_validation() {
        let ok = OffDiagTensor::from_entries(2, 4, vec![(vec![1, 2], int(5))]).unwrap();
        assert_eq!(ok.value(&[1, 2]).unwrap(), int(5));
        assert_eq!(ok.value(&[2, 1]).unwrap(), int(0));
        assert!(ok.value(&[1, 1]).is_err());
        assert!(ok.value(&[5, 1]).is_err());
        // Diagonal, out-of-range, duplicate and wrong-length keys are rejected.
        assert!(OffDiagTensor::from_entries(2, 4, vec![(vec![1, 1], int(5))]).is_err());
        assert!(OffDiagTensor::from_entries(2, 4, vec![(vec![0, 2], int(5))]).is_err());
        assert!(OffDiagTensor::from_entries(2, 4, vec![(vec![1, 5], int(5))]).is_err());
        assert!(OffDiagTensor::from_entries(2, 4, vec![(vec![1], int(5))]).is_err());
        assert!(OffDiagTensor::from_entries(
            2,
            4,
            vec![(vec![1, 2], int(5)), (vec![1, 2], int(7))]
        )
        .is_err());
        // Zeros normalize away.
        let z = OffDiagTensor::from_entries(2, 4, vec![(vec![1, 2], int(0))]).unwrap();
        assert!(z.is_zero());
        // Width too small for the order: only the zero tensor exists.
        let empty = OffDiagTensor::from_entries(3, 2, vec![]).unwrap();
        assert!(empty.is_zero());
        assert!(OffDiagTensor::from_entries(3, 2, vec![(vec![1, 2, 3], int(1))]).is_err());
    }

    #[test]
    fn strict_mode_requires_full_support() {
        let all: Vec<(Vec<usize>, Scalar)> =
            distinct_tuples(3, 2).into_iter().map(|t| (t, int(1))).collect();
        assert!(OffDiagTensor::from_entries_strict(2, 3, all.clone()).is_ok());
        assert!(matches!(
            OffDiagTensor::from_entries_strict(2, 3, all[..5].to_vec()),
            Err(Error::MissingEntries { expected: 6, got: 5 })
        ));
    }

    #[test]
    fn order_zero_tensor_is_a_scalar() {
        let t = OffDiagTensor::from_entries(0, 3, vec![(vec![], int(7))]).unwrap();
        assert_eq!(t.value(&[]).unwrap(), int(7));
        assert_eq!(t.num_nonzero(), 1);
    }

    #[test]
    fn projection_of_symmetric_rank_one() {
        // (1,2,3) (x) (1,2,3) projected off-diagonal.
        let t = RankDecomposition::new(
            2,
            3,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2, 3], &[1, 2, 3]]) }],
        )
        .unwrap();
        let p = t.project();
        assert_eq!(p.value(&[1, 2]).unwrap(), int(2));
        assert_eq!(p.value(&[1, 3]).unwrap(), int(3));
        assert_eq!(p.value(&[2, 3]).unwrap(), int(6));
        assert_eq!(p.value(&[3, 2]).unwrap(), int(6));
        assert_eq!(p.num_nonzero(), 6);
        // Densify keeps the diagonal.
        let dense = t.densify().unwrap();
        assert_eq!(dense.get(&[1, 1]), &int(1));
        assert_eq!(dense.get(&[2, 2]), &int(4));
        assert_eq!(dense.get(&[3, 3]), &int(9));
        assert_eq!(dense.get(&[2, 3]), &int(6));
    }

    #[test]
    fn dense_example_and_cancellation() {
        let t = RankDecomposition::new(
            2,
            2,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2], &[1, 2]]) }],
        )
        .unwrap();
        let dense = t.densify().unwrap();
        for (tuple, want) in [([1, 1], 1), ([1, 2], 2), ([2, 1], 2), ([2, 2], 4)] {
            assert_eq!(dense.get(&tuple), &int(want));
        }
        // Exact cancellation of two opposite terms.
        let c = RankDecomposition::new(
            2,
            2,
            vec![
                RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2], &[3, 4]]) },
                RankOneTerm { coeff: int(-1), vectors: vecs(&[&[1, 2], &[3, 4]]) },
            ],
        )
        .unwrap();
        assert!(c.densify().unwrap().is_zero());
        assert!(c.project().is_zero());
    }

    #[test]
    fn dense_cap_is_enforced() {
        let t = RankDecomposition::new(
            2,
            2,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2], &[1, 2]]) }],
        )
        .unwrap();
        assert!(matches!(
            t.densify_with_cap(3),
            Err(Error::DenseCapExceeded { entries: 4, cap: 3 })
        ));
        assert!(t.densify_with_cap(4).is_ok());
    }

    #[test]
    fn projection_matches_dense_off_diagonal() {
        // Two-term decomposition: every off-diagonal dense cell must agree
        // with the sparse projection, diagonal cells are extra.
        let t = RankDecomposition::new(
            2,
            4,
            vec![
                RankOneTerm { coeff: int(2), vectors: vecs(&[&[1, 0, 2, 1], &[3, 1, 0, 2]]) },
                RankOneTerm {
                    coeff: Scalar::from_ratio(-1, 2).unwrap(),
                    vectors: vecs(&[&[2, 2, 4, 0], &[1, 5, 1, 3]]),
                },
            ],
        )
        .unwrap();
        let p = t.project();
        let dense = t.densify().unwrap();
        for tuple in distinct_tuples(4, 2) {
            assert_eq!(&p.value(&tuple).unwrap(), dense.get(&tuple));
        }
    }

    #[test]
    fn restriction_pulls_back_entries() {
        let p = OffDiagTensor::from_entries(
            2,
            4,
            vec![(vec![2, 4], int(7)), (vec![4, 2], int(-1)), (vec![1, 2], int(3))],
        )
        .unwrap();
        let rho = Injection::new(vec![2, 4], 4).unwrap();
        let q = p.restrict(&rho).unwrap();
        assert_eq!(q.width(), 2);
        assert_eq!(q.value(&[1, 2]).unwrap(), int(7));
        assert_eq!(q.value(&[2, 1]).unwrap(), int(-1));
        // Width mismatch is rejected.
        assert!(p.restrict(&Injection::new(vec![1, 2], 3).unwrap()).is_err());
    }

    #[test]
    fn slicing_fixes_positions() {
        let p = OffDiagTensor::from_entries(
            3,
            4,
            vec![
                (vec![1, 2, 3], int(5)),
                (vec![1, 3, 2], int(6)),
                (vec![2, 1, 3], int(7)),
                (vec![1, 2, 4], int(8)),
            ],
        )
        .unwrap();
        // Fix position 1 = 1: remaining axes (2,3).
        let s = p.slice(&[(1, 1)], None).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.value(&[2, 3]).unwrap(), int(5));
        assert_eq!(s.value(&[3, 2]).unwrap(), int(6));
        assert_eq!(s.value(&[2, 4]).unwrap(), int(8));
        assert_eq!(s.value(&[1, 3]).unwrap(), int(0));
        // Restrict running coordinates to {2,3}.
        let allowed: BTreeSet<usize> = [2, 3].into_iter().collect();
        let s2 = p.slice(&[(1, 1)], Some(&allowed)).unwrap();
        assert_eq!(s2.num_nonzero(), 2);
        assert_eq!(s2.value(&[2, 4]).unwrap(), int(0));
        // Fixing two positions leaves an order-1 slice.
        let s3 = p.slice(&[(1, 1), (3, 3)], None).unwrap();
        assert_eq!(s3.order(), 1);
        assert_eq!(s3.value(&[2]).unwrap(), int(5));
    }

    #[test]
    fn pad_embed_example() {
        // Vector (0,0,3) placed at position 2 with position 1 pinned to 1:
        // a single entry (1,3) -> 3.
        let t = RankDecomposition::new(
            1,
            3,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[0, 0, 3]]) }],
        )
        .unwrap();
        let embedded = pad_embed(&t, &[2], &[1], 3).unwrap();
        assert_eq!(embedded.order(), 2);
        assert_eq!(embedded.term_count(), 1);
        let p = embedded.project();
        assert_eq!(p.value(&[1, 3]).unwrap(), int(3));
        assert_eq!(p.num_nonzero(), 1);
        // The pinned slice of the dense embedding equals the dense input.
        let dense_in = t.densify().unwrap();
        let dense_out = embedded.densify().unwrap();
        for j in 1..=3usize {
            assert_eq!(dense_out.get(&[1, j]), dense_in.get(&[j]));
            assert_eq!(dense_out.get(&[2, j]), &int(0));
            assert_eq!(dense_out.get(&[3, j]), &int(0));
        }
    }

    #[test]
    fn pad_embed_validation() {
        let t = RankDecomposition::new(
            1,
            3,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2, 3]]) }],
        )
        .unwrap();
        // Width mismatch.
        assert!(pad_embed(&t, &[1], &[1], 4).is_err());
        // Wrong number of positions.
        assert!(pad_embed(&t, &[1, 2], &[3], 3).is_err());
        // Position out of range for the combined order.
        assert!(pad_embed(&t, &[3], &[1], 3).is_err());
        // Pinned values must be distinct and in range.
        assert!(pad_embed(&t, &[1], &[4], 3).is_err());
        let t2 = RankDecomposition::new(
            1,
            4,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2, 3, 4]]) }],
        )
        .unwrap();
        assert!(pad_embed(&t2, &[2], &[3, 3], 4).is_err());
        // Empty pin is the identity embedding.
        let same = pad_embed(&t, &[1], &[], 3).unwrap();
        assert_eq!(same.project(), t.project());
    }

    #[test]
    fn dense_flattening_layout() {
        let t = RankDecomposition::new(
            2,
            2,
            vec![
                RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 0], &[1, 2]]) },
                RankOneTerm { coeff: int(1), vectors: vecs(&[&[0, 1], &[3, 4]]) },
            ],
        )
        .unwrap();
        // Dense cells: [[1,2],[3,4]].
        let dense = t.densify().unwrap();
        let f2 = dense.flatten(2).unwrap(); // rows = first coordinate
        assert_eq!(f2.get(0, 1), &int(2));
        assert_eq!(f2.get(1, 0), &int(3));
        let f1 = dense.flatten(1).unwrap(); // rows = second coordinate
        assert_eq!(f1.get(0, 1), &int(3));
        assert_eq!(f1.get(1, 0), &int(2));
        assert!(dense.flatten(3).is_err());
    }

    #[test]
    fn shift_profile_examples() {
        assert_eq!(shift_profile(2, 1).counts, vec![0, 2, 1]);
        assert_eq!(shift_profile(1, 1).counts, vec![1, 1]);
        assert_eq!(shift_profile(3, 0).counts, vec![0, 0, 0, 1]);
        assert_eq!(shift_profile(2, 2).counts, vec![2, 4, 1]);
        assert_eq!(shift_profile(0, 5).counts, vec![1]);
    }

    #[test]
    fn shift_profile_counts_variables() {
        // Sum over orders of (generators of that order) * (distinct tuples)
        // must equal the distinct-tuple count at width t+m and order d.
        for d in 0..=4usize {
            for m in 0..=3usize {
                let profile = shift_profile(d, m);
                for t in 0..=5usize {
                    assert_eq!(
                        profile.weighted_tuple_count(t),
                        falling_factorial(t + m, d),
                        "d={d} m={m} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn tensor_wire_round_trip() {
        let p = OffDiagTensor::from_entries(
            2,
            4,
            vec![(vec![1, 2], int(5)), (vec![2, 1], Scalar::from_ratio(-1, 3).unwrap())],
        )
        .unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"d":2,"width":4,"entries":[{"idx":[1,2],"value":"5"},{"idx":[2,1],"value":"-1/3"}]}"#
        );
        let back: OffDiagTensor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"d":2,"width":4,"entries":[{"idx":[1,1],"value":"5"}]}"#;
        assert!(serde_json::from_str::<OffDiagTensor>(bad).is_err());
    }

    #[test]
    fn decomposition_wire_round_trip() {
        let t = RankDecomposition::new(
            2,
            3,
            vec![RankOneTerm { coeff: int(1), vectors: vecs(&[&[1, 2, 3], &[1, 2, 3]]) }],
        )
        .unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"d":2,"width":3,"terms":[{"coeff":"1","vectors":[["1","2","3"],["1","2","3"]]}]}"#
        );
        let back: RankDecomposition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        // Shape errors are rejected on input.
        let bad = r#"{"d":2,"width":3,"terms":[{"coeff":"1","vectors":[["1","2","3"]]}]}"#;
        assert!(serde_json::from_str::<RankDecomposition>(bad).is_err());
    }
}
