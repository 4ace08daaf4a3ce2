//! Seeded end-to-end verification runs.
//!
//! Each trial samples a matrix point with entries in {-9,...,9}, pushes it
//! forward through the map under test, and checks the chain of guarantees:
//! every component passes the minor membership test at the map's rank bound,
//! every component completes with an exact projection round-trip and a term
//! count within its cap, and the whole pipeline commutes with a random
//! column permutation. Failures are collected per trial — a failing trial
//! never aborts the run.
//!
//! Randomness comes from a hand-rolled SplitMix64 so that reports are
//! reproducible across platforms and languages from the seed alone. All
//! random draws for a trial happen up front, so the stream position never
//! depends on which stages pass or fail.
//!
//! An optional prime-field mode evaluates the membership scan modulo a prime
//! `p < 2^31` first: a minor that is nonzero mod p is certainly nonzero, so
//! rejections are exact; acceptances are probabilistic (a nonzero rational
//! can reduce to zero) and are what buys the speed. The default mode is
//! fully exact.

use crate::completion::{complete, rank_cap};
use crate::equivariant::{EquivariantMap, MatrixPoint};
use crate::error::{Error, Result};
use crate::flatten::insert_index;
use crate::injection::Injection;
use crate::scalar::Scalar;
use crate::tensor::{distinct_tuples, OffDiagTensor};
use crate::zdl::membership_witness;
use itertools::Itertools;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// SplitMix64: state advances by the golden-gamma constant, output is the
/// two-round mixer of the advanced state. The exact transition (documented
/// so reports can be reproduced in any language):
///
/// ```text
/// state += 0x9E3779B97F4A7C15                    (mod 2^64)
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9        (mod 2^64)
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB        (mod 2^64)
/// output = z ^ (z >> 31)
/// ```
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Draw in `0..n` by reduction modulo `n` (the bias is negligible for
    /// the tiny ranges used here and keeps the draw rule easy to replicate).
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        self.next_u64() % n
    }

    /// Uniform-ish integer in {-9,...,9}.
    pub fn next_small_int(&mut self) -> i64 {
        self.next_below(19) as i64 - 9
    }

    /// In-place Fisher-Yates shuffle: `i` from `len-1` down to `1`, swap
    /// with `j = next_below(i+1)`.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below((i + 1) as u64) as usize;
            xs.swap(i, j);
        }
    }

    /// Random permutation of `1..=w` as an injection.
    pub fn permutation(&mut self, w: usize) -> Injection {
        let mut images: Vec<usize> = (1..=w).collect();
        self.shuffle(&mut images);
        Injection::new(images, w).expect("a shuffled identity is a permutation")
    }
}

/// Tuning knobs for a verification run; `Default` is the fully exact mode.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Corrupt one pushforward entry per trial before checking, to prove the
    /// harness can fail.
    pub negative_control: bool,
    /// Screen the membership stage modulo this prime (must be an odd prime
    /// below 2^31); only acceptances are probabilistic.
    pub modulus: Option<u64>,
    /// Record wall-clock per stage. Timings are inherently nondeterministic,
    /// so they are opt-in and never part of the failure data.
    pub collect_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyFailure {
    pub trial: usize,
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    pub width: usize,
    pub failures: Vec<VerifyFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u128>>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run `trials` seeded trials against `map` at the given width with default
/// options (exact arithmetic, no negative control).
pub fn run_verify(
    map: &EquivariantMap,
    width: usize,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    run_verify_with(map, width, trials, seed, &VerifyOptions::default())
}

pub fn run_verify_with(
    map: &EquivariantMap,
    width: usize,
    trials: usize,
    seed: u64,
    options: &VerifyOptions,
) -> Result<VerifyReport> {
    if width < map.max_width() {
        return Err(Error::WidthTooSmall { width, component_width: map.max_width() });
    }
    if let Some(p) = options.modulus {
        if p < 3 || p >= (1 << 31) || !is_prime(p) {
            return Err(Error::BadMatrix {
                reason: format!("modulus {p} is not an odd prime below 2^31"),
            });
        }
    }
    let bound = map.rank_bound();
    let mut rng = SplitMix64::new(seed);
    let mut failures = Vec::new();
    let mut timings: BTreeMap<String, u128> = BTreeMap::new();
    for trial in 0..trials {
        // Draw everything the trial will need before any stage runs, so the
        // stream stays aligned regardless of failures.
        let rows: Vec<Vec<Scalar>> = (0..map.k())
            .map(|_| (0..width).map(|_| Scalar::from_int(rng.next_small_int())).collect())
            .collect();
        let sigma = rng.permutation(width);
        let a = MatrixPoint::new(map.k(), width, rows)?;

        let fail = |stage: &str, detail: String, failures: &mut Vec<VerifyFailure>| {
            failures.push(VerifyFailure { trial, stage: stage.into(), detail });
        };

        let start = Instant::now();
        let mut tensors = match map.pushforward(&a) {
            Ok(ts) => ts,
            Err(e) => {
                fail("pushforward", e.to_string(), &mut failures);
                continue;
            }
        };
        record(&mut timings, options, "pushforward", start);

        if options.negative_control {
            if let Some(t) = tensors.first_mut() {
                *t = corrupt_first_entry(t);
            }
        }

        let start = Instant::now();
        for (i, t) in tensors.iter().enumerate() {
            let witness = match options.modulus {
                Some(p) if fp_accepts(t, bound, p) => None,
                _ => membership_witness(t, bound),
            };
            if let Some(w) = witness {
                fail(
                    "membership",
                    format!("component {}: violated minor at {w}", i + 1),
                    &mut failures,
                );
            }
        }
        record(&mut timings, options, "membership", start);

        let start = Instant::now();
        for (i, t) in tensors.iter().enumerate() {
            let l = map.components()[i].monomial_count();
            match complete(t, l) {
                Err(e) => fail("completion", format!("component {}: {e}", i + 1), &mut failures),
                Ok(res) => {
                    if res.decomposition.project() != *t {
                        fail(
                            "completion",
                            format!("component {}: projection mismatch after completion", i + 1),
                            &mut failures,
                        );
                    }
                    let cap = rank_cap(t.order(), l);
                    if res.decomposition.term_count() as u128 > cap {
                        fail(
                            "completion",
                            format!(
                                "component {}: {} terms exceed the cap {cap}",
                                i + 1,
                                res.decomposition.term_count()
                            ),
                            &mut failures,
                        );
                    }
                }
            }
        }
        record(&mut timings, options, "completion", start);

        let start = Instant::now();
        match (a.restrict_columns(&sigma), &tensors) {
            (Ok(b), stored) => match map.pushforward(&b) {
                Ok(pushed) => {
                    for (i, (fresh, old)) in pushed.iter().zip(stored.iter()).enumerate() {
                        match old.restrict(&sigma) {
                            Ok(relabeled) if relabeled == *fresh => {}
                            Ok(_) => fail(
                                "equivariance",
                                format!(
                                    "component {}: pushforward of the permuted point differs from the permuted pushforward",
                                    i + 1
                                ),
                                &mut failures,
                            ),
                            Err(e) => {
                                fail("equivariance", format!("component {}: {e}", i + 1), &mut failures)
                            }
                        }
                    }
                }
                Err(e) => fail("equivariance", e.to_string(), &mut failures),
            },
            (Err(e), _) => fail("equivariance", e.to_string(), &mut failures),
        }
        record(&mut timings, options, "equivariance", start);
    }
    Ok(VerifyReport {
        trials,
        seed,
        width,
        failures,
        timings_ms: options.collect_timings.then_some(timings),
    })
}

fn record(timings: &mut BTreeMap<String, u128>, options: &VerifyOptions, stage: &str, start: Instant) {
    if options.collect_timings {
        *timings.entry(stage.to_string()).or_insert(0) += start.elapsed().as_millis();
    }
}

/// Add 1 to the entry at the lexicographically first distinct tuple.
fn corrupt_first_entry(t: &OffDiagTensor) -> OffDiagTensor {
    let Some(tuple) = distinct_tuples(t.width(), t.order()).into_iter().next() else {
        return t.clone();
    };
    let mut entries: BTreeMap<Vec<usize>, Scalar> =
        t.entries().map(|(k, v)| (k.clone(), v.clone())).collect();
    let slot = entries.entry(tuple).or_insert_with(Scalar::zero);
    *slot += &Scalar::one();
    OffDiagTensor::from_entries(t.order(), t.width(), entries)
        .expect("corrupting one entry preserves validity")
}

// --- prime-field screen -------------------------------------------------------

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Image of an exact rational mod p, or None when the denominator vanishes.
fn scalar_mod(s: &Scalar, p: u64) -> Option<u64> {
    let pb = num_bigint::BigInt::from(p);
    let den = s.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = s.numer().mod_floor(&pb).to_u64()?;
    Some(num * mod_pow(den, p - 2, p) % p)
}

fn fp_det(mut rows: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = rows.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| rows[r][col] % p != 0) else {
            return 0;
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = (p - det) % p;
        }
        let inv = mod_pow(rows[col][col], p - 2, p);
        det = det * rows[col][col] % p;
        for r in col + 1..n {
            let factor = rows[r][col] * inv % p;
            if factor == 0 {
                continue;
            }
            for c in col..n {
                let sub = factor * rows[col][c] % p;
                rows[r][c] = (rows[r][c] + p - sub) % p;
            }
        }
    }
    det
}

/// True when every off-diagonal `(l+1) x (l+1)` minor vanishes mod p. A
/// `false` here is exact; a `true` is probabilistic. Falls back to `false`
/// (forcing the exact path) when an entry cannot be reduced mod p.
fn fp_accepts(t: &OffDiagTensor, l: usize, p: u64) -> bool {
    let size = l + 1;
    let d = t.order();
    if d == 0 {
        return true;
    }
    let w = t.width();
    let mut table: BTreeMap<&Vec<usize>, u64> = BTreeMap::new();
    for (tuple, value) in t.entries() {
        match scalar_mod(value, p) {
            Some(v) => {
                table.insert(tuple, v);
            }
            None => return false,
        }
    }
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
                let block: Vec<Vec<u64>> = rows
                    .iter()
                    .map(|row| {
                        cols.iter()
                            .map(|&&col| {
                                let tuple = insert_index(row, axis, col);
                                table.get(&tuple).copied().unwrap_or(0)
                            })
                            .collect()
                    })
                    .collect();
                if fp_det(block, p) != 0 {
                    return false;
                }
            }
        }
    }
    true
}
