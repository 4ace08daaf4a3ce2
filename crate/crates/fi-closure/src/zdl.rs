//! Canonical equations of the bounded-flattening-rank locus, membership
//! tests, and witness search.
//!
//! A tensor of order `d` lies in the rank-`l` locus when every off-diagonal
//! `(l+1) x (l+1)` minor of every flattening vanishes. Up to relabeling the
//! index values, only finitely many such minors exist with support of size at
//! most `d*(l+1)`; `canonical_generators` enumerates one representative per
//! relabeling class (choosing the lexicographically smallest serialized
//! polynomial, compared modulo global sign for deduplication), and
//! `orbit_instances` re-instantiates a representative at any width.
//!
//! Membership can be decided two ways: a direct scan over all off-diagonal
//! minors at the tensor's width (the default; quick early exit, returns the
//! first violated minor in scan order: axis ascending, then rows, then
//! columns, each lexicographic), or evaluation of every orbit instance of
//! every canonical generator — the two are equivalent and that equivalence is
//! tested.

use crate::error::{Error, Result};
use crate::flatten::insert_index;
use crate::injection::Injection;
use crate::matrix::QMatrix;
use crate::poly::{IndexedPolynomial, Var, VarKind};
use crate::scalar::Scalar;
use crate::tensor::{distinct_tuples, OffDiagTensor};
use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// A nonzero (or violating) off-diagonal minor: flattening axis, row tuples,
/// column values, and the exact determinant value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub axis: usize,
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<usize>,
    pub value: Scalar,
}

impl fmt::Display for MinorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "axis {}, rows {:?}, cols {:?}, value {}",
            self.axis, self.rows, self.cols, self.value
        )
    }
}

/// One canonical minor equation: the determinant of the off-diagonal block
/// selected by `rows` and `cols` in the axis-`axis` flattening, expanded as a
/// tensor polynomial over the index set `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalEquation {
    d: usize,
    l: usize,
    n: usize,
    axis: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<usize>,
    poly: IndexedPolynomial,
}

impl CanonicalEquation {
    /// Assemble and validate: rows/cols must select an off-diagonal block
    /// whose index values cover `1..=n` exactly, and `poly` must be its
    /// determinant expansion.
    pub fn new(
        d: usize,
        l: usize,
        n: usize,
        axis: usize,
        rows: Vec<Vec<usize>>,
        cols: Vec<usize>,
        poly: IndexedPolynomial,
    ) -> Result<CanonicalEquation> {
        validate_block(d, l, n, axis, &rows, &cols)?;
        let expected = expand_minor_poly(axis, &rows, &cols)?;
        if poly != expected {
            return Err(Error::BadMinorSelection {
                reason: "polynomial does not match the determinant of the selected block".into(),
            });
        }
        Ok(CanonicalEquation { d, l, n, axis, rows, cols, poly })
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.l
    }

    /// Size of the index support; every value in `1..=n` occurs.
    pub fn base_width(&self) -> usize {
        self.n
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn poly(&self) -> &IndexedPolynomial {
        &self.poly
    }
}

fn validate_block(
    d: usize,
    l: usize,
    n: usize,
    axis: usize,
    rows: &[Vec<usize>],
    cols: &[usize],
) -> Result<()> {
    if axis == 0 || axis > d {
        return Err(Error::AxisOutOfRange { axis, d });
    }
    if rows.len() != l + 1 || cols.len() != l + 1 {
        return Err(Error::BadMinorSelection {
            reason: format!("expected {} rows and columns", l + 1),
        });
    }
    let mut support = BTreeSet::new();
    for row in rows {
        if row.len() != d - 1 {
            return Err(Error::BadMinorSelection {
                reason: format!("row {row:?} must have length {}", d - 1),
            });
        }
        let mut seen = BTreeSet::new();
        for &v in row {
            if v == 0 || v > n || !seen.insert(v) {
                return Err(Error::BadMinorSelection {
                    reason: format!("row {row:?} is not a distinct tuple over 1..={n}"),
                });
            }
        }
        support.extend(row.iter().copied());
    }
    if rows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadMinorSelection { reason: "rows must be sorted and distinct".into() });
    }
    if cols.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadMinorSelection {
            reason: "columns must be sorted and distinct".into(),
        });
    }
    for &c in cols {
        if c == 0 || c > n {
            return Err(Error::BadMinorSelection {
                reason: format!("column {c} outside 1..={n}"),
            });
        }
        for row in rows {
            if row.contains(&c) {
                return Err(Error::OffDiagonalityViolated { row: row.clone(), col: c });
            }
        }
        support.insert(c);
    }
    let full: BTreeSet<usize> = (1..=n).collect();
    if support != full {
        return Err(Error::BadMinorSelection {
            reason: format!("index support must be exactly 1..={n}"),
        });
    }
    Ok(())
}

/// Determinant of the selected block, expanded as a polynomial in tensor
/// variables. Rows and columns are taken in the given (sorted) order.
pub fn expand_minor_poly(
    axis: usize,
    rows: &[Vec<usize>],
    cols: &[usize],
) -> Result<IndexedPolynomial> {
    let k = rows.len();
    let mut terms = Vec::new();
    for perm in (0..k).permutations(k) {
        // Parity by inversion count.
        let mut inversions = 0usize;
        for i in 0..k {
            for j in i + 1..k {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let coeff = if inversions % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        let mut factors = Vec::with_capacity(k);
        for (r, &c_idx) in perm.iter().enumerate() {
            let tuple = insert_index(&rows[r], axis, cols[c_idx]);
            factors.push((Var::tensor(tuple)?, 1u32));
        }
        terms.push((coeff, factors));
    }
    IndexedPolynomial::from_terms(VarKind::TensorY, terms)
}

/// Instantiations of a canonical equation at width `w`: one polynomial per
/// injection of its index set into `1..=w`, in lexicographic order of the
/// injection's image tuple. Empty when `w < n`.
pub fn orbit_instances<'a>(
    eq: &'a CanonicalEquation,
    w: usize,
) -> impl Iterator<Item = IndexedPolynomial> + 'a {
    Injection::enumerate(eq.n, w)
        .into_iter()
        .map(move |rho| eq.poly.act(&rho).expect("equation indices lie within the injection domain"))
}

// --- canonical generation ---------------------------------------------------

/// Representative candidate ordering: rows, then columns, then serialized
/// polynomial, then axis. The winner among the blocks of an equivalence
/// class is the one on the smallest row tuples.
type RepKey = (Vec<Vec<usize>>, Vec<usize>, String, usize);

struct Representative {
    key: RepKey,
    n: usize,
    poly: IndexedPolynomial,
}

/// Sweep all relabelings of `1..=n` of one block. Every image is another
/// valid block on the same axis; each is recorded in `seen` so the caller
/// can skip it. Returns the best same-axis representative and the
/// sign-insensitive orbit key used for deduplication.
fn classify_block(
    axis: usize,
    rows: &[Vec<usize>],
    cols: &[usize],
    perms: &[Injection],
    seen: &mut BTreeSet<(Vec<Vec<usize>>, Vec<usize>)>,
) -> (Representative, String) {
    let n = perms.first().map_or(0, |p| p.domain_size());
    let mut best: Option<RepKey> = None;
    let mut best_poly: Option<IndexedPolynomial> = None;
    let mut orbit_key: Option<String> = None;
    for sigma in perms {
        let mut r2: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| sigma.apply_tuple(r).expect("row indices within 1..=n"))
            .collect();
        r2.sort();
        let mut c2: Vec<usize> = cols
            .iter()
            .map(|&c| sigma.apply(c).expect("column indices within 1..=n"))
            .collect();
        c2.sort_unstable();
        if !seen.insert((r2.clone(), c2.clone())) && best.is_some() {
            // Image already swept in this call; nothing new to compare.
            continue;
        }
        let poly = expand_minor_poly(axis, &r2, &c2).expect("relabeled block stays off-diagonal");
        let key = poly.canonical_key();
        let neg_key = poly.neg().canonical_key();
        let pm = if neg_key < key { neg_key } else { key.clone() };
        if orbit_key.as_ref().is_none_or(|k| pm < *k) {
            orbit_key = Some(pm);
        }
        let rep = (r2, c2, key, axis);
        if best.as_ref().is_none_or(|b| rep < *b) {
            best = Some(rep);
            best_poly = Some(poly);
        }
    }
    let key = best.expect("at least the identity relabeling");
    (
        Representative { key, n, poly: best_poly.expect("poly tracked with key") },
        orbit_key.expect("at least the identity relabeling"),
    )
}

/// One pass over every admissible block at base width exactly `n`, merged
/// into equivalence classes keyed by the sign-insensitive orbit key.
fn classes_at(d: usize, l: usize, n: usize, groups: &mut BTreeMap<String, Representative>) {
    let k = l + 1;
    let perms = Injection::enumerate(n, n);
    let labels = distinct_tuples(n, d - 1);
    for axis in 1..=d {
        let mut seen: BTreeSet<(Vec<Vec<usize>>, Vec<usize>)> = BTreeSet::new();
        for rows in labels.iter().combinations(k) {
            let mut used: BTreeSet<usize> = BTreeSet::new();
            for row in &rows {
                used.extend(row.iter().copied());
            }
            // Off-diagonality forces columns disjoint from row values;
            // support coverage of 1..=n then forces the columns to be
            // exactly the unused values.
            let cols: Vec<usize> = (1..=n).filter(|v| !used.contains(v)).collect();
            if cols.len() != k {
                continue;
            }
            let row_block: Vec<Vec<usize>> = rows.iter().map(|r| (*r).clone()).collect();
            if seen.contains(&(row_block.clone(), cols.clone())) {
                continue;
            }
            let (rep, orbit_key) = classify_block(axis, &row_block, &cols, &perms, &mut seen);
            groups
                .entry(orbit_key)
                .and_modify(|existing| {
                    if rep.key < existing.key {
                        *existing = Representative {
                            key: rep.key.clone(),
                            n: rep.n,
                            poly: rep.poly.clone(),
                        };
                    }
                })
                .or_insert(rep);
        }
    }
}

fn equation_from(d: usize, l: usize, rep: Representative) -> CanonicalEquation {
    let (rows, cols, _, axis) = rep.key;
    CanonicalEquation { d, l, n: rep.n, axis, rows, cols, poly: rep.poly }
}

/// Canonical generating equations with base width at most
/// `min(d*(l+1), max_n)`. Equations with larger support have no instances at
/// widths `<= max_n`, so this bounded set decides membership at such widths.
pub fn canonical_generators_bounded(d: usize, l: usize, max_n: usize) -> Vec<CanonicalEquation> {
    let max_n = max_n.min(d.saturating_mul(l + 1));
    let mut groups: BTreeMap<String, Representative> = BTreeMap::new();
    if d > 0 {
        for n in 1..=max_n {
            classes_at(d, l, n, &mut groups);
        }
    }
    let mut out: Vec<CanonicalEquation> =
        groups.into_values().map(|rep| equation_from(d, l, rep)).collect();
    out.sort_by(|a, b| {
        (a.n, &a.rows, &a.cols, a.poly.canonical_key(), a.axis).cmp(&(
            b.n,
            &b.rows,
            &b.cols,
            b.poly.canonical_key(),
            b.axis,
        ))
    });
    out
}

/// All canonical generating equations for order `d` and rank `l` (base width
/// up to `d*(l+1)`).
pub fn canonical_generators(d: usize, l: usize) -> Vec<CanonicalEquation> {
    canonical_generators_bounded(d, l, d.saturating_mul(l + 1))
}

/// Map an equation to the canonical representative of its equivalence class
/// (relabeling and sign). Canonical representatives are fixed points.
pub fn canonicalize(eq: &CanonicalEquation) -> CanonicalEquation {
    let perms = Injection::enumerate(eq.n, eq.n);
    let mut scratch = BTreeSet::new();
    let (_, orbit_key) = classify_block(eq.axis, &eq.rows, &eq.cols, &perms, &mut scratch);
    // The class may have a better representative on another axis; sweep every
    // block at this base width and pick its class out.
    let mut groups: BTreeMap<String, Representative> = BTreeMap::new();
    classes_at(eq.d, eq.l, eq.n, &mut groups);
    let rep = groups
        .remove(&orbit_key)
        .expect("a valid equation's block is enumerated among the blocks at its base width");
    equation_from(eq.d, eq.l, rep)
}

// --- membership --------------------------------------------------------------

/// First nonzero `size x size` off-diagonal minor in scan order (axis
/// ascending, then rows, then columns, each lexicographic), or None.
fn first_nonzero_minor(p: &OffDiagTensor, size: usize) -> Option<MinorWitness> {
    let d = p.order();
    if d == 0 || size == 0 {
        return None;
    }
    let w = p.width();
    let labels = distinct_tuples(w, d - 1);
    for axis in 1..=d {
        for rows in labels.iter().combinations(size) {
            let mut used: BTreeSet<usize> = BTreeSet::new();
            for row in &rows {
                used.extend(row.iter().copied());
            }
            let avail: Vec<usize> = (1..=w).filter(|v| !used.contains(v)).collect();
            if avail.len() < size {
                continue;
            }
            for cols in avail.iter().combinations(size) {
                let mut matrix_rows = Vec::with_capacity(size);
                for row in &rows {
                    let mut out = Vec::with_capacity(size);
                    for &&col in &cols {
                        out.push(p.value_unchecked(&insert_index(row, axis, col)));
                    }
                    matrix_rows.push(out);
                }
                let det = QMatrix::from_rows(matrix_rows)
                    .expect("square block")
                    .det()
                    .expect("square block");
                if !det.is_zero() {
                    return Some(MinorWitness {
                        axis,
                        rows: rows.iter().map(|r| (*r).clone()).collect(),
                        cols: cols.iter().map(|c| **c).collect(),
                        value: det,
                    });
                }
            }
        }
    }
    None
}

/// First violated `(l+1) x (l+1)` minor, or None when the tensor lies in the
/// rank-`l` locus.
pub fn membership_witness(p: &OffDiagTensor, l: usize) -> Option<MinorWitness> {
    first_nonzero_minor(p, l + 1)
}

/// Direct-scan membership in the rank-`l` locus.
pub fn is_member(p: &OffDiagTensor, l: usize) -> bool {
    membership_witness(p, l).is_none()
}

/// First nonzero `l x l` off-diagonal minor — a certificate that the tensor
/// is *not* in the rank-`(l-1)` locus. Requires `l >= 1`.
pub fn strict_witness(p: &OffDiagTensor, l: usize) -> Result<Option<MinorWitness>> {
    if l == 0 {
        return Err(Error::WitnessSizeZero { l });
    }
    Ok(first_nonzero_minor(p, l))
}

fn cached_generators(d: usize, l: usize, max_n: usize) -> Vec<CanonicalEquation> {
    static CACHE: OnceLock<Mutex<BTreeMap<(usize, usize, usize), Vec<CanonicalEquation>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("generator cache lock");
    guard
        .entry((d, l, max_n))
        .or_insert_with(|| canonical_generators_bounded(d, l, max_n))
        .clone()
}

/// Membership via evaluation of every orbit instance of every canonical
/// generator at the tensor's width; equivalent to the direct scan.
pub fn is_member_via_orbits(p: &OffDiagTensor, l: usize) -> bool {
    let d = p.order();
    let w = p.width();
    let gens = cached_generators(d, l, d.saturating_mul(l + 1).min(w));
    for eq in &gens {
        for instance in orbit_instances(eq, w) {
            let value = instance
                .evaluate(|v| match v {
                    Var::Tensor(t) => Some(p.value_unchecked(t)),
                    Var::Matrix { .. } => None,
                })
                .expect("tensor assignment covers all variables");
            if !value.is_zero() {
                return false;
            }
        }
    }
    true
}

// --- wire format --------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EquationWire {
    d: usize,
    l: usize,
    n: usize,
    axis: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<usize>,
    poly: IndexedPolynomial,
}

impl Serialize for CanonicalEquation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EquationWire {
            d: self.d,
            l: self.l,
            n: self.n,
            axis: self.axis,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            poly: self.poly.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CanonicalEquation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = EquationWire::deserialize(deserializer)?;
        CanonicalEquation::new(wire.d, wire.l, wire.n, wire.axis, wire.rows, wire.cols, wire.poly)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{RankDecomposition, RankOneTerm};

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn y(t: &[usize]) -> Var {
        Var::tensor(t.to_vec()).unwrap()
    }

    fn rank_one(v: &[i64], w: &[i64]) -> OffDiagTensor {
        RankDecomposition::new(
            2,
            v.len(),
            vec![RankOneTerm {
                coeff: int(1),
                vectors: vec![
                    v.iter().map(|&x| int(x)).collect(),
                    w.iter().map(|&x| int(x)).collect(),
                ],
            }],
        )
        .unwrap()
        .project()
    }

    fn two_by_two_commutant() -> IndexedPolynomial {
        // y(1,3)*y(2,4) - y(1,4)*y(2,3)
        IndexedPolynomial::from_terms(
            VarKind::TensorY,
            vec![
                (int(1), vec![(y(&[1, 3]), 1), (y(&[2, 4]), 1)]),
                (int(-1), vec![(y(&[1, 4]), 1), (y(&[2, 3]), 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn order_two_rank_one_has_one_generator() {
        let gens = canonical_generators(2, 1);
        assert_eq!(gens.len(), 1);
        let eq = &gens[0];
        assert_eq!(eq.base_width(), 4);
        assert_eq!(eq.poly(), &two_by_two_commutant());
        assert_eq!(eq.axis(), 2);
        assert_eq!(eq.rows(), &[vec![1], vec![2]]);
        assert_eq!(eq.cols(), &[3, 4]);
    }

    #[test]
    fn degenerate_generator_sets() {
        // Order 1 with any slack rank: a flattening has a single row, so no
        // 2x2 block exists.
        assert!(canonical_generators(1, 1).is_empty());
        assert!(canonical_generators(1, 5).is_empty());
        // Order 0 has no flattening axes at all.
        assert!(canonical_generators(0, 0).is_empty());
        assert!(canonical_generators(0, 3).is_empty());
        // Rank 0 at order 2: the single entry equation.
        let gens = canonical_generators(2, 0);
        assert_eq!(gens.len(), 1);
        let expected = IndexedPolynomial::variable(VarKind::TensorY, y(&[1, 2])).unwrap();
        assert_eq!(gens[0].poly(), &expected);
        assert_eq!(gens[0].base_width(), 2);
        // Rank 0 at order 1: the single coordinate equation.
        let gens = canonical_generators(1, 0);
        assert_eq!(gens.len(), 1);
        assert_eq!(
            gens[0].poly(),
            &IndexedPolynomial::variable(VarKind::TensorY, y(&[1])).unwrap()
        );
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for (d, l) in [(2usize, 0usize), (2, 1), (3, 1)] {
            for eq in canonical_generators(d, l) {
                let again = canonicalize(&eq);
                assert_eq!(again, eq, "d={d} l={l}");
            }
        }
    }

    #[test]
    fn equation_wire_round_trip() {
        let gens = canonical_generators(2, 1);
        let json = serde_json::to_string(&gens[0]).unwrap();
        let back: CanonicalEquation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, gens[0]);
        // Tampered polynomials are rejected.
        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        value["poly"]["terms"][0]["coeff"] = "2".into();
        assert!(serde_json::from_value::<CanonicalEquation>(value).is_err());
    }

    #[test]
    fn orbit_instance_counts() {
        let gens = canonical_generators(2, 1);
        assert_eq!(orbit_instances(&gens[0], 5).count(), 120); // 5!/(5-4)!
        assert_eq!(orbit_instances(&gens[0], 4).count(), 24);
        assert_eq!(orbit_instances(&gens[0], 3).count(), 0); // width below support
    }

    #[test]
    fn orbit_instances_vanish_on_rank_one() {
        let p = rank_one(&[1, 2, 3, 4, 5], &[5, 6, 7, 8, 9]);
        let gens = canonical_generators(2, 1);
        for instance in orbit_instances(&gens[0], 5) {
            let v = instance
                .evaluate(|v| match v {
                    Var::Tensor(t) => Some(p.value(t).unwrap()),
                    _ => None,
                })
                .unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn membership_of_rank_one_matrices() {
        let p = rank_one(&[1, 2, 3, 4], &[5, 6, 7, 8]);
        assert!(is_member(&p, 1));
        assert!(is_member_via_orbits(&p, 1));
        // Rank 0 fails: the first entry in scan order is the witness.
        // Axis 1 reads entry((1), 2) = p(2,1) = 2*5 = 10.
        let w = membership_witness(&p, 0).unwrap();
        assert_eq!(w.axis, 1);
        assert_eq!(w.rows, vec![vec![1]]);
        assert_eq!(w.cols, vec![2]);
        assert_eq!(w.value, int(10));
    }

    #[test]
    fn corrupting_one_entry_breaks_membership() {
        // Start from (1,2,3,4) (x) (5,6,7,8) and overwrite p(1,3) with 99.
        let base = rank_one(&[1, 2, 3, 4], &[5, 6, 7, 8]);
        let mut entries: Vec<(Vec<usize>, Scalar)> =
            base.entries().map(|(t, v)| (t.clone(), v.clone())).collect();
        for (t, v) in entries.iter_mut() {
            if t == &[1, 3] {
                *v = int(99);
            }
        }
        let p = OffDiagTensor::from_entries(2, 4, entries).unwrap();
        assert!(!is_member(&p, 1));
        assert!(!is_member_via_orbits(&p, 1));
        // First violated minor in scan order: axis 1 reads entry(row, col) =
        // p(col, row); rows {(2),(3)}, cols {1,4} is the first block touching
        // the corrupted entry: det [[p(1,2), p(4,2)], [p(1,3), p(4,3)]]
        // = 6*28 - 24*99 = -2208.
        let w = membership_witness(&p, 1).unwrap();
        assert_eq!(w.axis, 1);
        assert_eq!(w.rows, vec![vec![2], vec![3]]);
        assert_eq!(w.cols, vec![1, 4]);
        assert_eq!(w.value, int(6 * 28 - 24 * 99));
    }

    #[test]
    fn strict_witness_examples() {
        // All-nonzero rank one: the very first 1x1 minor is nonzero.
        let p = rank_one(&[1, 2, 3, 4], &[5, 6, 7, 8]);
        let w = strict_witness(&p, 1).unwrap().unwrap();
        assert_eq!((w.axis, w.rows.clone(), w.cols.clone()), (1, vec![vec![1]], vec![2]));
        assert_eq!(w.value, int(10)); // p(2,1)
        // Single nonzero entry (1,2) -> the first 1x1 minor that reaches it.
        let q = OffDiagTensor::from_entries(2, 3, vec![(vec![1, 2], int(5))]).unwrap();
        let w = strict_witness(&q, 1).unwrap().unwrap();
        assert_eq!((w.axis, w.rows.clone(), w.cols.clone()), (1, vec![vec![2]], vec![1]));
        assert_eq!(w.value, int(5));
        // Zero tensor: no witness at any size.
        let z = OffDiagTensor::zero(2, 4);
        assert!(strict_witness(&z, 1).unwrap().is_none());
        assert!(strict_witness(&z, 2).unwrap().is_none());
        // Size zero is rejected.
        assert!(matches!(strict_witness(&p, 0), Err(Error::WitnessSizeZero { .. })));
    }

    #[test]
    fn zero_tensor_is_member_at_rank_zero() {
        let z = OffDiagTensor::zero(2, 4);
        assert!(is_member(&z, 0));
        assert!(is_member_via_orbits(&z, 0));
        let p = OffDiagTensor::from_entries(2, 3, vec![(vec![1, 2], int(5))]).unwrap();
        assert!(!is_member(&p, 0));
        assert!(!is_member_via_orbits(&p, 0));
    }

    #[test]
    fn vacuous_membership_when_blocks_cannot_fit() {
        // Width 5 cannot host a 3x3 off-diagonal block of an order-2 tensor
        // (3 row values + 3 column values > 5), so rank 2 holds vacuously.
        let p = rank_one(&[1, 2, 3, 4, 5], &[1, 1, 2, 2, 3]);
        let mut map: BTreeMap<Vec<usize>, Scalar> =
            p.entries().map(|(t, v)| (t.clone(), v.clone())).collect();
        map.insert(vec![5, 4], int(77)); // overwrite one entry
        let broken = OffDiagTensor::from_entries(2, 5, map).unwrap();
        assert!(!is_member(&broken, 1));
        assert!(is_member(&broken, 2));
        assert!(is_member_via_orbits(&broken, 2));
    }

    #[test]
    fn order_three_generators_match_bounded_oracle() {
        // Independent oracle at base width <= 5: enumerate *all* off-diagonal
        // 2x2 blocks over 1..=5 (no minimality filtering), expand each
        // determinant by hand, canonicalize by brute force over all
        // relabelings and both signs, and count distinct classes.
        let mut classes: BTreeSet<String> = BTreeSet::new();
        let n = 5;
        let perms = Injection::enumerate(n, n);
        let labels = distinct_tuples(n, 2);
        for axis in 1..=3usize {
            for pair in labels.iter().combinations(2) {
                let (r1, r2) = (pair[0], pair[1]);
                let used: BTreeSet<usize> = r1.iter().chain(r2.iter()).copied().collect();
                let avail: Vec<usize> = (1..=n).filter(|v| !used.contains(v)).collect();
                for cols in avail.iter().combinations(2) {
                    let (c1, c2) = (*cols[0], *cols[1]);
                    // det = y(ins(r1,c1))*y(ins(r2,c2)) - y(ins(r1,c2))*y(ins(r2,c1))
                    let m = |row: &[usize], col: usize| {
                        Var::tensor(insert_index(row, axis, col)).unwrap()
                    };
                    let poly = IndexedPolynomial::from_terms(
                        VarKind::TensorY,
                        vec![
                            (int(1), vec![(m(r1, c1), 1), (m(r2, c2), 1)]),
                            (int(-1), vec![(m(r1, c2), 1), (m(r2, c1), 1)]),
                        ],
                    )
                    .unwrap();
                    let mut best: Option<String> = None;
                    for sigma in &perms {
                        let q = poly.act(sigma).unwrap();
                        for cand in [q.canonical_key(), q.neg().canonical_key()] {
                            if best.as_ref().is_none_or(|b| cand < *b) {
                                best = Some(cand);
                            }
                        }
                    }
                    classes.insert(best.unwrap());
                }
            }
        }
        let gens = canonical_generators_bounded(3, 1, 5);
        assert_eq!(gens.len(), classes.len());
        // The generator representatives canonicalize into the same classes.
        for eq in &gens {
            let mut best: Option<String> = None;
            for sigma in &Injection::enumerate(eq.base_width(), eq.base_width()) {
                let q = eq.poly().act(sigma).unwrap();
                for cand in [q.canonical_key(), q.neg().canonical_key()] {
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
            }
            assert!(classes.contains(&best.unwrap()));
        }
    }
}
