//! Polynomial maps from matrix points into off-diagonal tensor spaces.
//!
//! A map is specified by one generator image per component: a polynomial in
//! matrix variables `x(i,c)` with rows `i <= k` and column positions
//! `c <= e`, where `e` is the component's width (the order of the tensor it
//! produces). Pushing a `k x w` matrix point forward evaluates each image at
//! every distinct `e`-tuple `J` over `1..=w`, substituting column `J_c` of
//! the point for position `c`.
//!
//! Because the entry at `J` depends on the point only through the columns it
//! selects, the construction commutes with column relabeling: restricting
//! the point's columns along an injection and pushing forward equals pushing
//! forward first and restricting tensor indices afterwards. The maximum
//! monomial count over the images bounds the flattening rank of every
//! pushforward, which is what makes the membership tests downstream of this
//! module effective.

use crate::error::{Error, Result};
use crate::poly::{IndexedPolynomial, Var, VarKind};
use crate::scalar::Scalar;
use crate::tensor::{distinct_tuples, OffDiagTensor};
use crate::injection::Injection;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One generator image: produces an order-`width` tensor component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapComponent {
    width: usize,
    image: IndexedPolynomial,
}

impl MapComponent {
    /// Validate kind and column range (row range is checked when the
    /// component joins a map, where `k` is known).
    pub fn new(width: usize, image: IndexedPolynomial) -> Result<MapComponent> {
        if image.kind() != VarKind::MatrixX {
            return Err(Error::KindMismatch {
                left: VarKind::MatrixX.as_str().into(),
                right: image.kind().as_str().into(),
            });
        }
        for (_, mono) in image.terms() {
            for (var, _) in mono.factors() {
                if let Var::Matrix { row, col } = var {
                    if *col > width {
                        return Err(Error::MatrixVarRange {
                            row: *row,
                            col: *col,
                            rows: usize::MAX,
                            cols: width,
                        });
                    }
                }
            }
        }
        Ok(MapComponent { width, image })
    }

    /// Order of the tensor this component produces.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn image(&self) -> &IndexedPolynomial {
        &self.image
    }

    /// Number of monomials in the image — the flattening-rank bound for this
    /// component's pushforwards.
    pub fn monomial_count(&self) -> usize {
        self.image.num_monomials()
    }

    fn max_row(&self) -> usize {
        let mut max = 0;
        for (_, mono) in self.image.terms() {
            for (var, _) in mono.factors() {
                if let Var::Matrix { row, .. } = var {
                    max = max.max(*row);
                }
            }
        }
        max
    }
}

/// A finite list of generator images over a common row count `k`, kept
/// sorted by component width (stable, so equal widths keep their given
/// order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantMap {
    k: usize,
    components: Vec<MapComponent>,
}

impl EquivariantMap {
    pub fn new(k: usize, mut components: Vec<MapComponent>) -> Result<EquivariantMap> {
        for (i, comp) in components.iter().enumerate() {
            let max_row = comp.max_row();
            if max_row > k {
                return Err(Error::BadComponent {
                    index: i + 1,
                    reason: format!("image uses row {max_row} but the map has k={k} rows"),
                });
            }
        }
        components.sort_by_key(|c| c.width);
        Ok(EquivariantMap { k, components })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> &[MapComponent] {
        &self.components
    }

    /// Largest component width; points must be at least this wide.
    pub fn max_width(&self) -> usize {
        self.components.iter().map(|c| c.width).max().unwrap_or(0)
    }

    /// Component count per width `e = 0..=max_width`.
    pub fn profile(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_width() + 1];
        for c in &self.components {
            counts[c.width] += 1;
        }
        counts
    }

    /// Maximum monomial count over all images: every pushforward component
    /// lies in the rank-`rank_bound` locus of its order.
    pub fn rank_bound(&self) -> usize {
        self.components.iter().map(|c| c.monomial_count()).max().unwrap_or(0)
    }

    /// One off-diagonal tensor per component: the entry at a distinct tuple
    /// `J` is the image evaluated with `x(i,c) -> a[i][J_c]`.
    pub fn pushforward(&self, a: &MatrixPoint) -> Result<Vec<OffDiagTensor>> {
        if a.k() != self.k {
            return Err(Error::RowCountMismatch { point_k: a.k(), map_k: self.k });
        }
        if a.width() < self.max_width() {
            return Err(Error::WidthTooSmall {
                width: a.width(),
                component_width: self.max_width(),
            });
        }
        let w = a.width();
        let mut out = Vec::with_capacity(self.components.len());
        for comp in &self.components {
            let mut entries = Vec::new();
            for tuple in distinct_tuples(w, comp.width) {
                let value = comp.image.evaluate(|var| match var {
                    Var::Matrix { row, col } => Some(a.get(*row, tuple[*col - 1]).clone()),
                    Var::Tensor(_) => None,
                })?;
                if !value.is_zero() {
                    entries.push((tuple, value));
                }
            }
            out.push(OffDiagTensor::from_entries(comp.width, w, entries)?);
        }
        Ok(out)
    }
}

/// An exact `k x w` matrix of scalars — the argument of a pushforward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPoint {
    k: usize,
    width: usize,
    rows: Vec<Vec<Scalar>>,
}

impl MatrixPoint {
    pub fn new(k: usize, width: usize, rows: Vec<Vec<Scalar>>) -> Result<MatrixPoint> {
        if rows.len() != k || rows.iter().any(|r| r.len() != width) {
            return Err(Error::BadMatrix {
                reason: format!("expected {k} rows of length {width}"),
            });
        }
        Ok(MatrixPoint { k, width, rows })
    }

    /// Convenience constructor from integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Result<MatrixPoint> {
        let k = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        MatrixPoint::new(k, width, rows)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// 1-based entry access.
    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.rows[row - 1][col - 1]
    }

    /// Select columns along `rho: [w'] -> [w]`: the result has width `w'`
    /// and entries `b[i][c] = a[i][rho(c)]`.
    pub fn restrict_columns(&self, rho: &Injection) -> Result<MatrixPoint> {
        if rho.codomain_size() != self.width {
            return Err(Error::BadInjection {
                images: rho.images().to_vec(),
                codomain: self.width,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| rho.images().iter().map(|&j| r[j - 1].clone()).collect())
            .collect();
        MatrixPoint::new(self.k, rho.domain_size(), rows)
    }
}

/// The covariance map of a `k`-factor model with independent noise: rows
/// `1..=k` of the point hold the factor loadings, row `k+1` the noise
/// variances. The width-2 component carries the off-diagonal covariances
/// `sum_l x(l,1)*x(l,2)` (k monomials) and the width-1 component the
/// diagonal `sum_l x(l,1)^2 + x(k+1,1)` (k+1 monomials), so the rank bound
/// is `k+1`.
pub fn factor_model_preset(k: usize) -> Result<EquivariantMap> {
    if k == 0 {
        return Err(Error::BadComponent {
            index: 1,
            reason: "factor model needs at least one factor row".into(),
        });
    }
    let one = Scalar::one;
    let mut diag_terms = Vec::with_capacity(k + 1);
    let mut off_terms = Vec::with_capacity(k);
    for l in 1..=k {
        diag_terms.push((one(), vec![(Var::matrix(l, 1)?, 2u32)]));
        off_terms.push((one(), vec![(Var::matrix(l, 1)?, 1u32), (Var::matrix(l, 2)?, 1u32)]));
    }
    diag_terms.push((one(), vec![(Var::matrix(k + 1, 1)?, 1u32)]));
    let diagonal = MapComponent::new(1, IndexedPolynomial::from_terms(VarKind::MatrixX, diag_terms)?)?;
    let off_diagonal =
        MapComponent::new(2, IndexedPolynomial::from_terms(VarKind::MatrixX, off_terms)?)?;
    EquivariantMap::new(k + 1, vec![diagonal, off_diagonal])
}

// --- wire formats -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ComponentWire {
    width: usize,
    image: IndexedPolynomial,
}

#[derive(Serialize, Deserialize)]
struct MapWire {
    k: usize,
    components: Vec<ComponentWire>,
}

impl Serialize for EquivariantMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MapWire {
            k: self.k,
            components: self
                .components
                .iter()
                .map(|c| ComponentWire { width: c.width, image: c.image.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EquivariantMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MapWire::deserialize(deserializer)?;
        let components = wire
            .components
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                MapComponent::new(c.width, c.image)
                    .map_err(|e| serde::de::Error::custom(e.in_component(i + 1)))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        EquivariantMap::new(wire.k, components).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PointWire {
    k: usize,
    width: usize,
    rows: Vec<Vec<Scalar>>,
}

impl Serialize for MatrixPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PointWire { k: self.k, width: self.width, rows: self.rows.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PointWire::deserialize(deserializer)?;
        MatrixPoint::new(wire.k, wire.width, wire.rows).map_err(serde::de::Error::custom)
    }
}
