//! Polynomials in indexed variables.
//!
//! Two variable families share one polynomial type, tagged by kind:
//! matrix entries `x(i,j)` (row `i`, column `j`) and tensor entries
//! `y(i1,...,id)` indexed by tuples with pairwise-distinct entries. Injections
//! act on column indices of `x` and entrywise on tuples of `y`; this action is
//! functorial and every operation here keeps terms in a canonical sorted form
//! so equal polynomials compare equal structurally.
//!
//! Wire format (all indices 1-based, coefficients as exact rational strings):
//! `{"kind":"tensor_y","terms":[{"coeff":"-3/2","vars":[{"idx":[1,2],"exp":1}]}]}`.

use crate::error::{Error, Result};
use crate::injection::Injection;
use crate::scalar::Scalar;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    MatrixX,
    TensorY,
}

impl VarKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarKind::MatrixX => "matrix_x",
            VarKind::TensorY => "tensor_y",
        }
    }

    pub fn parse(s: &str) -> Result<VarKind> {
        match s {
            "matrix_x" => Ok(VarKind::MatrixX),
            "tensor_y" => Ok(VarKind::TensorY),
            other => Err(Error::Json(format!("unknown variable kind {other:?}"))),
        }
    }
}

/// A single indexed variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Var {
    /// Matrix entry `x(row, col)`.
    Matrix { row: usize, col: usize },
    /// Tensor entry `y(t)` for a tuple `t` with pairwise-distinct entries.
    Tensor(Vec<usize>),
}

impl Var {
    pub fn matrix(row: usize, col: usize) -> Result<Var> {
        if row == 0 || col == 0 {
            return Err(Error::MatrixVarRange { row, col, rows: usize::MAX, cols: usize::MAX });
        }
        Ok(Var::Matrix { row, col })
    }

    pub fn tensor(tuple: Vec<usize>) -> Result<Var> {
        let mut seen = BTreeSet::new();
        for &i in &tuple {
            if i == 0 || !seen.insert(i) {
                return Err(Error::RepeatedIndex { index: tuple });
            }
        }
        Ok(Var::Tensor(tuple))
    }

    pub fn kind(&self) -> VarKind {
        match self {
            Var::Matrix { .. } => VarKind::MatrixX,
            Var::Tensor(_) => VarKind::TensorY,
        }
    }

    fn idx(&self) -> Vec<usize> {
        match self {
            Var::Matrix { row, col } => vec![*row, *col],
            Var::Tensor(t) => t.clone(),
        }
    }

    fn act(&self, sigma: &Injection) -> Result<Var> {
        match self {
            Var::Matrix { row, col } => {
                let col = sigma
                    .apply(*col)
                    .map_err(|_| Error::ActionOutOfDomain { index: vec![*row, *col], domain: sigma.domain_size() })?;
                Ok(Var::Matrix { row: *row, col })
            }
            Var::Tensor(t) => {
                let image = sigma
                    .apply_tuple(t)
                    .map_err(|_| Error::ActionOutOfDomain { index: t.clone(), domain: sigma.domain_size() })?;
                Ok(Var::Tensor(image))
            }
        }
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Var::Matrix { row: r1, col: c1 }, Var::Matrix { row: r2, col: c2 }) => {
                (r1, c1).cmp(&(r2, c2))
            }
            (Var::Tensor(a), Var::Tensor(b)) => a.cmp(b),
            (Var::Matrix { .. }, Var::Tensor(_)) => Ordering::Less,
            (Var::Tensor(_), Var::Matrix { .. }) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Matrix { row, col } => write!(f, "x({row},{col})"),
            Var::Tensor(t) => {
                write!(f, "y(")?;
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Product of variables with positive exponents, kept sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    /// Merge duplicates and sort; zero exponents are rejected.
    pub fn new(factors: Vec<(Var, u32)>) -> Result<Monomial> {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e == 0 {
                return Err(Error::ZeroExponent);
            }
            *map.entry(v).or_insert(0) += e;
        }
        Ok(Monomial(map.into_iter().collect()))
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<Var, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *map.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }

    /// Variables repeated by exponent, for lexicographic monomial comparison.
    fn expanded(&self) -> impl Iterator<Item = &Var> + '_ {
        self.0.iter().flat_map(|(v, e)| std::iter::repeat(v).take(*e as usize))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.expanded().cmp(other.expanded())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial over exact rationals in one variable family.
///
/// Terms are sorted by monomial, coefficients are nonzero, monomials are
/// distinct, and every variable matches `kind`; all constructors and
/// operations maintain this normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexedPolynomial {
    kind: VarKind,
    terms: Vec<(Scalar, Monomial)>,
}

impl IndexedPolynomial {
    pub fn zero(kind: VarKind) -> Self {
        IndexedPolynomial { kind, terms: Vec::new() }
    }

    pub fn constant(kind: VarKind, c: Scalar) -> Self {
        let mut p = Self::zero(kind);
        if !c.is_zero() {
            p.terms.push((c, Monomial::one()));
        }
        p
    }

    /// Single variable with coefficient one.
    pub fn variable(kind: VarKind, v: Var) -> Result<Self> {
        Self::from_terms(kind, vec![(Scalar::one(), vec![(v, 1)])])
    }

    pub fn from_terms(kind: VarKind, terms: Vec<(Scalar, Vec<(Var, u32)>)>) -> Result<Self> {
        let mut map: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (coeff, factors) in terms {
            for (v, _) in &factors {
                if v.kind() != kind {
                    return Err(Error::VarKindMismatch {
                        var: v.to_string(),
                        kind: kind.as_str().to_string(),
                    });
                }
            }
            let m = Monomial::new(factors)?;
            let slot = map.entry(m).or_insert_with(Scalar::zero);
            *slot += &coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(IndexedPolynomial { kind, terms: map.into_iter().map(|(m, c)| (c, m)).collect() })
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    /// Terms as (coefficient, monomial), sorted by monomial.
    pub fn terms(&self) -> &[(Scalar, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_monomials(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(_, m)| m.degree()).max().unwrap_or(0)
    }

    fn check_kind(&self, other: &IndexedPolynomial) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                left: self.kind.as_str().to_string(),
                right: other.kind.as_str().to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &IndexedPolynomial) -> Result<IndexedPolynomial> {
        self.check_kind(other)?;
        let mut map: BTreeMap<Monomial, Scalar> =
            self.terms.iter().map(|(c, m)| (m.clone(), c.clone())).collect();
        for (c, m) in &other.terms {
            let slot = map.entry(m.clone()).or_insert_with(Scalar::zero);
            *slot += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(IndexedPolynomial {
            kind: self.kind,
            terms: map.into_iter().map(|(m, c)| (c, m)).collect(),
        })
    }

    pub fn sub(&self, other: &IndexedPolynomial) -> Result<IndexedPolynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IndexedPolynomial {
        IndexedPolynomial {
            kind: self.kind,
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> IndexedPolynomial {
        if c.is_zero() {
            return Self::zero(self.kind);
        }
        IndexedPolynomial {
            kind: self.kind,
            terms: self.terms.iter().map(|(a, m)| (a * c, m.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &IndexedPolynomial) -> Result<IndexedPolynomial> {
        self.check_kind(other)?;
        let mut map: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                let m = m1.mul(m2);
                let slot = map.entry(m).or_insert_with(Scalar::zero);
                *slot += &(c1 * c2);
            }
        }
        map.retain(|_, c| !c.is_zero());
        Ok(IndexedPolynomial {
            kind: self.kind,
            terms: map.into_iter().map(|(m, c)| (c, m)).collect(),
        })
    }

    /// Substitute indices along `sigma`: tensor tuples map entrywise, matrix
    /// variables map on the column only. Errors when an index falls outside
    /// `sigma`'s domain.
    pub fn act(&self, sigma: &Injection) -> Result<IndexedPolynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, m) in &self.terms {
            let factors: Result<Vec<(Var, u32)>> =
                m.factors().iter().map(|(v, e)| Ok((v.act(sigma)?, *e))).collect();
            terms.push((c.clone(), factors?));
        }
        Self::from_terms(self.kind, terms)
    }

    /// Evaluate with `lookup` supplying variable values; every variable that
    /// occurs must be assigned.
    pub fn evaluate<F>(&self, lookup: F) -> Result<Scalar>
    where
        F: Fn(&Var) -> Option<Scalar>,
    {
        let mut total = Scalar::zero();
        for (c, m) in &self.terms {
            let mut prod = c.clone();
            for (v, e) in m.factors() {
                let value = lookup(v).ok_or_else(|| Error::MissingVariable { var: v.to_string() })?;
                for _ in 0..*e {
                    prod *= &value;
                }
            }
            total += &prod;
        }
        Ok(total)
    }

    /// All index values occurring in variables (tuple entries for tensor
    /// variables, column indices for matrix variables).
    pub fn support_indices(&self) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        for (_, m) in &self.terms {
            for (v, _) in m.factors() {
                match v {
                    Var::Tensor(t) => set.extend(t.iter().copied()),
                    Var::Matrix { col, .. } => {
                        set.insert(*col);
                    }
                }
            }
        }
        set
    }

    /// Canonical display string; equal polynomials produce equal strings.
    pub fn canonical_key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IndexedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

// --- wire format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VarWire {
    idx: Vec<usize>,
    exp: u32,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    coeff: Scalar,
    vars: Vec<VarWire>,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    kind: String,
    terms: Vec<TermWire>,
}

impl Serialize for IndexedPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = PolyWire {
            kind: self.kind.as_str().to_string(),
            terms: self
                .terms
                .iter()
                .map(|(c, m)| TermWire {
                    coeff: c.clone(),
                    vars: m
                        .factors()
                        .iter()
                        .map(|(v, e)| VarWire { idx: v.idx(), exp: *e })
                        .collect(),
                })
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexedPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PolyWire::deserialize(deserializer)?;
        let kind = VarKind::parse(&wire.kind).map_err(serde::de::Error::custom)?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for term in wire.terms {
            let mut factors = Vec::with_capacity(term.vars.len());
            for vw in term.vars {
                let var = match kind {
                    VarKind::MatrixX => {
                        if vw.idx.len() != 2 {
                            return Err(serde::de::Error::custom(format!(
                                "matrix_x variable index must be [row, col], got {:?}",
                                vw.idx
                            )));
                        }
                        Var::matrix(vw.idx[0], vw.idx[1]).map_err(serde::de::Error::custom)?
                    }
                    VarKind::TensorY => Var::tensor(vw.idx).map_err(serde::de::Error::custom)?,
                };
                factors.push((var, vw.exp));
            }
            terms.push((term.coeff, factors));
        }
        IndexedPolynomial::from_terms(kind, terms).map_err(serde::de::Error::custom)
    }
}
