//! Recursive completion of off-diagonal tensors to bounded-rank full tensors.
//!
//! Given a tensor `p` whose off-diagonal `(l+1) x (l+1)` flattening minors
//! all vanish, `complete` produces an explicit rank decomposition whose
//! projection back to distinct-value tuples reproduces `p` exactly, with a
//! term count below an input-independent cap `rank_cap(d, l)`.
//!
//! The recursion is a double induction. At each call: orders 0 and 1 are
//! their own one-term decompositions; a zero tensor needs nothing; when no
//! nonzero `l x l` off-diagonal minor exists the problem already satisfies
//! the stronger bound `l-1` (inner descent); otherwise a nonzero minor
//! (axis `i0`, rows `u1`, columns `u2`) splits the index set into its
//! support `S` and the rest `T`. Entries with at least one coordinate in `S`
//! are covered by recursively completed lower-order slices (pin the
//! `S`-valued coordinates, keep the rest running over `T`) padded back with
//! indicator vectors; entries entirely over `T` are reproduced by
//! `q_empty = sum_{j in u2} q_{j} (x) v_j`, where `q_{j}` is the completed
//! slice pinned to `j` at axis `i0` and `v_j` mixes the `T`-restricted rows
//! of the axis-`i0` flattening through the inverse witness minor. Each level
//! re-projects its assembly and fails loudly on any mismatch, so a returned
//! decomposition is correct by construction, not by trust in the derivation.

use crate::error::{Error, Result};
use crate::flatten::insert_index;
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::tensor::{
    distinct_tuples_over, falling_factorial, pad_embed, OffDiagTensor, RankDecomposition,
    RankOneTerm,
};
use crate::zdl::{membership_witness, strict_witness};
use itertools::Itertools;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Input-independent bound on the term count of `complete` at order `d` and
/// rank bound `l`. Orders 0 and 1 always decompose in one term; at rank
/// bound 0 only the zero tensor qualifies. Otherwise the bound is the worst
/// case over the two branches: inner descent to `l-1`, or a split whose
/// support has the maximal size `s = l*d` — every choice of pinned positions
/// and pinned values contributes one recursive completion, and the final
/// `q_empty` adds `l` copies of an order-`(d-1)` completion.
pub fn rank_cap(d: usize, l: usize) -> u128 {
    let mut table = vec![vec![0u128; l + 1]; d + 1];
    for dd in 0..=d {
        for ll in 0..=l {
            table[dd][ll] = if dd <= 1 {
                1
            } else if ll == 0 {
                0
            } else {
                let s = ll * dd;
                let mut split = (ll as u128).saturating_mul(table[dd - 1][ll]);
                for e in 0..dd {
                    split = split.saturating_add(
                        binomial(dd, e)
                            .saturating_mul(falling_factorial(s, dd - e))
                            .saturating_mul(table[e][ll]),
                    );
                }
                split.max(table[dd][ll - 1])
            };
        }
    }
    table[d][l]
}

/// Which case the recursion took for one subproblem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TraceNode {
    /// Order <= 1 or a zero tensor: decomposed directly.
    Base { d: usize, l: usize, terms: usize },
    /// No nonzero `l x l` minor: solved at the tighter bound.
    InnerDescent { l: usize, child: Box<SliceTrace> },
    /// Split on a nonzero minor witness.
    Split {
        d: usize,
        l: usize,
        axis: usize,
        rows: Vec<Vec<usize>>,
        cols: Vec<usize>,
        support: Vec<usize>,
        rest: Vec<usize>,
        terms: usize,
        children: Vec<SliceTrace>,
    },
}

/// One node of the recursion log: which original axes are still running,
/// which are pinned to what values, and the case taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceTrace {
    pub positions: Vec<usize>,
    pub pinned: Vec<(usize, usize)>,
    pub node: TraceNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionResult {
    pub decomposition: RankDecomposition,
    pub certified_cap: u128,
    pub trace: SliceTrace,
}

/// Complete `p` to a full tensor of certified bounded rank. Errors with the
/// first violated minor when `p` fails the `(l+1)`-minor membership test.
pub fn complete(p: &OffDiagTensor, l: usize) -> Result<CompletionResult> {
    if let Some(witness) = membership_witness(p, l) {
        return Err(Error::NotInVariety { l, witness });
    }
    let positions: Vec<usize> = (1..=p.order()).collect();
    let (decomposition, trace) = complete_inner(p, l, &positions, &[])?;
    Ok(CompletionResult { certified_cap: rank_cap(p.order(), l), decomposition, trace })
}

/// Componentwise completion; an error is tagged with the 1-based index of
/// the component it arose in.
pub fn complete_product(parts: &[(OffDiagTensor, usize)]) -> Result<Vec<CompletionResult>> {
    parts
        .iter()
        .enumerate()
        .map(|(i, (p, l))| complete(p, *l).map_err(|e| e.in_component(i + 1)))
        .collect()
}

fn complete_inner(
    p: &OffDiagTensor,
    l: usize,
    positions: &[usize],
    pinned: &[(usize, usize)],
) -> Result<(RankDecomposition, SliceTrace)> {
    let d = p.order();
    let w = p.width();
    debug_assert_eq!(positions.len(), d);
    let header = |node: TraceNode| SliceTrace {
        positions: positions.to_vec(),
        pinned: pinned.to_vec(),
        node,
    };

    // Orders 0 and 1: the tensor is its own decomposition.
    if d == 0 {
        let c = p.value_unchecked(&[]);
        let dec = if c.is_zero() {
            RankDecomposition::empty(0, w)
        } else {
            RankDecomposition::new(0, w, vec![RankOneTerm { coeff: c, vectors: vec![] }])?
        };
        let terms = dec.term_count();
        return Ok((dec, header(TraceNode::Base { d, l, terms })));
    }
    if d == 1 {
        let dec = if p.is_zero() {
            RankDecomposition::empty(1, w)
        } else {
            let mut v = vec![Scalar::zero(); w];
            for (tuple, value) in p.entries() {
                v[tuple[0] - 1] = value.clone();
            }
            RankDecomposition::new(1, w, vec![RankOneTerm { coeff: Scalar::one(), vectors: vec![v] }])?
        };
        let terms = dec.term_count();
        return Ok((dec, header(TraceNode::Base { d, l, terms })));
    }
    if p.is_zero() {
        return Ok((RankDecomposition::empty(d, w), header(TraceNode::Base { d, l, terms: 0 })));
    }
    if l == 0 {
        // Unreachable for valid inputs: a nonzero tensor cannot satisfy the
        // all-entries-vanish membership test that guards every path here.
        return Err(Error::AlgorithmInvariant(
            "nonzero tensor reached rank bound 0 during completion".into(),
        ));
    }

    // Inner descent when no nonzero l x l off-diagonal minor exists.
    let witness = match strict_witness(p, l)? {
        None => {
            let (dec, child) = complete_inner(p, l - 1, positions, pinned)?;
            return Ok((dec, header(TraceNode::InnerDescent { l, child: Box::new(child) })));
        }
        Some(witness) => witness,
    };

    // Split on the witness: S carries its index support, T the rest.
    let i0 = witness.axis;
    let u1 = &witness.rows;
    let u2 = &witness.cols;
    let mut s_set: BTreeSet<usize> = u2.iter().copied().collect();
    for row in u1 {
        s_set.extend(row.iter().copied());
    }
    let support: Vec<usize> = s_set.iter().copied().collect();
    let t_set: BTreeSet<usize> = (1..=w).filter(|v| !s_set.contains(v)).collect();
    let rest: Vec<usize> = t_set.iter().copied().collect();

    // The witness minor matrix M[alpha][j] and its inverse.
    let m_rows: Vec<Vec<Scalar>> = u1
        .iter()
        .map(|row| u2.iter().map(|&j| p.value_unchecked(&insert_index(row, i0, j))).collect())
        .collect();
    let m_inv = QMatrix::from_rows(m_rows)?
        .inverse()?
        .ok_or_else(|| Error::AlgorithmInvariant("witness minor is singular".into()))?;

    let mut terms: Vec<RankOneTerm> = Vec::new();
    let mut children: Vec<SliceTrace> = Vec::new();
    let mut memo: HashMap<(Vec<usize>, Vec<usize>), RankDecomposition> = HashMap::new();

    // Proper subsets of running axes, smallest first, then pinned tuples
    // over S in lexicographic order. Each nonzero slice is completed over T
    // with the same bound and padded back with indicator vectors.
    for size in 0..d {
        for keep in (1..=d).combinations(size) {
            let fixed_positions: Vec<usize> =
                (1..=d).filter(|pos| !keep.contains(pos)).collect();
            for alpha in distinct_tuples_over(&support, fixed_positions.len()) {
                let fixed: Vec<(usize, usize)> =
                    fixed_positions.iter().copied().zip(alpha.iter().copied()).collect();
                let slice = p.slice(&fixed, Some(&t_set))?;
                if slice.is_zero() {
                    continue;
                }
                let child_positions: Vec<usize> =
                    keep.iter().map(|&pos| positions[pos - 1]).collect();
                let mut child_pinned = pinned.to_vec();
                child_pinned
                    .extend(fixed.iter().map(|&(pos, value)| (positions[pos - 1], value)));
                let (q, child_trace) = complete_inner(&slice, l, &child_positions, &child_pinned)?;
                let embedded = pad_embed(&q, &keep, &alpha, w)?;
                terms.extend(embedded.terms().iter().cloned());
                children.push(child_trace);
                memo.insert((keep.clone(), alpha), q);
            }
        }
    }

    // The all-axes-running piece: q_empty = sum_{j in u2} q_{j} (x) v_j,
    // inserted at the witness axis. v_j lives on T only, so this piece is
    // disjoint from every padded slice above.
    let keep_all_but_i0: Vec<usize> = (1..=d).filter(|&pos| pos != i0).collect();
    for (j_idx, &j) in u2.iter().enumerate() {
        let mut v = vec![Scalar::zero(); w];
        let mut v_nonzero = false;
        for &t in &rest {
            let mut acc = Scalar::zero();
            for (a_idx, alpha_row) in u1.iter().enumerate() {
                let val = p.value_unchecked(&insert_index(alpha_row, i0, t));
                if !val.is_zero() {
                    acc += &(m_inv.get(j_idx, a_idx) * &val);
                }
            }
            if !acc.is_zero() {
                v_nonzero = true;
            }
            v[t - 1] = acc;
        }
        if !v_nonzero {
            continue;
        }
        let Some(qj) = memo.get(&(keep_all_but_i0.clone(), vec![j])) else {
            continue;
        };
        for term in qj.terms() {
            let mut vectors = term.vectors.clone();
            vectors.insert(i0 - 1, v.clone());
            terms.push(RankOneTerm { coeff: term.coeff.clone(), vectors });
        }
    }

    let dec = RankDecomposition::new(d, w, terms)?;
    if dec.project() != *p {
        return Err(Error::AlgorithmInvariant(
            "assembled completion does not project back to its input".into(),
        ));
    }
    let node = TraceNode::Split {
        d,
        l,
        axis: i0,
        rows: u1.clone(),
        cols: u2.clone(),
        support,
        rest,
        terms: dec.term_count(),
        children,
    };
    Ok((dec, header(node)))
}
