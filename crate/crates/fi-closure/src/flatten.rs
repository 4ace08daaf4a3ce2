//! Flattenings of off-diagonal tensors and their off-diagonal minors.
//!
//! The flattening along axis `i` views an order-`d` tensor as a matrix whose
//! rows are labeled by distinct `(d-1)`-tuples (the other positions, read in
//! increasing position order) and whose columns are labeled by the axis-`i`
//! coordinate. A cell is *diagonal* when the column value already occurs in
//! the row tuple; such cells carry no tensor entry. A block of rows and
//! columns is off-diagonal when none of its cells is diagonal, and only such
//! square blocks have well-defined minors.

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::Scalar;
use crate::tensor::{distinct_tuples, OffDiagTensor};

/// Entry of a flattening cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatEntry {
    /// Inserting the column into the row collides with an existing coordinate.
    Diagonal,
    /// A real tensor entry (zero when the tensor has no stored value there).
    Value(Scalar),
}

/// Insert `col` into `row` at 1-based `axis`, producing the full index tuple.
pub fn insert_index(row: &[usize], axis: usize, col: usize) -> Vec<usize> {
    let mut tuple = Vec::with_capacity(row.len() + 1);
    tuple.extend_from_slice(&row[..axis - 1]);
    tuple.push(col);
    tuple.extend_from_slice(&row[axis - 1..]);
    tuple
}

/// Lazy matrix view of one flattening; no entries are materialized.
#[derive(Debug, Clone, Copy)]
pub struct FlatteningView<'a> {
    tensor: &'a OffDiagTensor,
    axis: usize,
}

impl<'a> FlatteningView<'a> {
    pub fn new(tensor: &'a OffDiagTensor, axis: usize) -> Result<FlatteningView<'a>> {
        if axis == 0 || axis > tensor.order() {
            return Err(Error::AxisOutOfRange { axis, d: tensor.order() });
        }
        Ok(FlatteningView { tensor, axis })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn tensor(&self) -> &OffDiagTensor {
        self.tensor
    }

    /// All row labels: distinct `(d-1)`-tuples over the width, lexicographic.
    pub fn row_labels(&self) -> Vec<Vec<usize>> {
        distinct_tuples(self.tensor.width(), self.tensor.order() - 1)
    }

    /// Column labels `1..=width`.
    pub fn col_labels(&self) -> Vec<usize> {
        (1..=self.tensor.width()).collect()
    }

    /// Cell at a row tuple and a column value.
    pub fn entry(&self, row: &[usize], col: usize) -> Result<FlatEntry> {
        let d = self.tensor.order();
        let width = self.tensor.width();
        if row.len() != d - 1 {
            return Err(Error::BadTuple {
                tuple: row.to_vec(),
                d: d - 1,
                width,
                reason: "wrong row label length".into(),
            });
        }
        if col == 0 || col > width {
            return Err(Error::BadTuple {
                tuple: vec![col],
                d: 1,
                width,
                reason: "column out of range".into(),
            });
        }
        if row.contains(&col) {
            return Ok(FlatEntry::Diagonal);
        }
        let tuple = insert_index(row, self.axis, col);
        Ok(FlatEntry::Value(self.tensor.value(&tuple)?))
    }
}

/// Determinant of the square block of the axis-`i` flattening selected by
/// `rows` (distinct `(d-1)`-tuples) and `cols` (distinct column values). The
/// selection must be entirely off-diagonal; rows and columns are sorted
/// lexicographically before expansion so the sign is well defined.
pub fn off_diag_minor(
    p: &OffDiagTensor,
    axis: usize,
    rows: &[Vec<usize>],
    cols: &[usize],
) -> Result<Scalar> {
    let view = FlatteningView::new(p, axis)?;
    if rows.len() != cols.len() {
        return Err(Error::BadMinorSelection {
            reason: format!("{} rows vs {} columns", rows.len(), cols.len()),
        });
    }
    let mut rows: Vec<Vec<usize>> = rows.to_vec();
    rows.sort();
    rows.dedup();
    let mut cols: Vec<usize> = cols.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if rows.len() != cols.len() {
        return Err(Error::BadMinorSelection { reason: "repeated rows or columns".into() });
    }
    let mut matrix_rows = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut out = Vec::with_capacity(cols.len());
        for &col in &cols {
            match view.entry(row, col)? {
                FlatEntry::Diagonal => {
                    return Err(Error::OffDiagonalityViolated { row: row.clone(), col });
                }
                FlatEntry::Value(v) => out.push(v),
            }
        }
        matrix_rows.push(out);
    }
    QMatrix::from_rows(matrix_rows)?.det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::tensor::{RankDecomposition, RankOneTerm};

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn rank_one(v: &[i64], w: &[i64]) -> OffDiagTensor {
        let width = v.len();
        RankDecomposition::new(
            2,
            width,
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

    #[test]
    fn insertion_positions() {
        assert_eq!(insert_index(&[1, 2], 1, 9), vec![9, 1, 2]);
        assert_eq!(insert_index(&[1, 2], 2, 9), vec![1, 9, 2]);
        assert_eq!(insert_index(&[1, 2], 3, 9), vec![1, 2, 9]);
        assert_eq!(insert_index(&[], 1, 9), vec![9]);
    }

    #[test]
    fn view_entries_and_diagonal_marking() {
        // Order 2: axis 2 has rows = first coordinate.
        let p = OffDiagTensor::from_entries(2, 3, vec![(vec![1, 2], int(5))]).unwrap();
        let f2 = FlatteningView::new(&p, 2).unwrap();
        assert_eq!(f2.entry(&[1], 2).unwrap(), FlatEntry::Value(int(5)));
        assert_eq!(f2.entry(&[2], 1).unwrap(), FlatEntry::Value(int(0)));
        assert_eq!(f2.entry(&[1], 1).unwrap(), FlatEntry::Diagonal);
        // Axis 1 has rows = second coordinate: entry((2), 1) is p(1,2).
        let f1 = FlatteningView::new(&p, 1).unwrap();
        assert_eq!(f1.entry(&[2], 1).unwrap(), FlatEntry::Value(int(5)));
        assert_eq!(f1.entry(&[1], 2).unwrap(), FlatEntry::Value(int(0)));
        // Order 3 example: entry((1,2), 3) of axis 3 is p(1,2,3).
        let q = OffDiagTensor::from_entries(3, 3, vec![(vec![1, 2, 3], int(8))]).unwrap();
        let f3 = FlatteningView::new(&q, 3).unwrap();
        assert_eq!(f3.entry(&[1, 2], 3).unwrap(), FlatEntry::Value(int(8)));
        // Malformed labels and axes error.
        assert!(f3.entry(&[1], 3).is_err());
        assert!(f3.entry(&[1, 2], 4).is_err());
        assert!(FlatteningView::new(&q, 4).is_err());
        assert_eq!(f3.row_labels().len(), 6);
        assert_eq!(f3.col_labels(), vec![1, 2, 3]);
    }

    #[test]
    fn rank_one_two_by_two_minors_vanish() {
        let p = rank_one(&[1, 2, 3, 4], &[5, 6, 7, 8]);
        for axis in [1, 2] {
            let m =
                off_diag_minor(&p, axis, &[vec![1], vec![2]], &[3, 4]).unwrap();
            assert!(m.is_zero(), "axis {axis}");
        }
        // A 1x1 minor is just the entry.
        assert_eq!(off_diag_minor(&p, 2, &[vec![1]], &[2]).unwrap(), int(6)); // 1*6
        assert_eq!(off_diag_minor(&p, 1, &[vec![1]], &[2]).unwrap(), int(10)); // p(2,1)=2*5
    }

    #[test]
    fn generic_two_by_two_minor_value() {
        // p(1,3)=a, p(1,4)=b, p(2,3)=c, p(2,4)=d: axis-2 minor on rows
        // {(1),(2)}, cols {3,4} is ad - bc.
        let p = OffDiagTensor::from_entries(
            2,
            4,
            vec![
                (vec![1, 3], int(2)),
                (vec![1, 4], int(3)),
                (vec![2, 3], int(5)),
                (vec![2, 4], int(7)),
            ],
        )
        .unwrap();
        let m = off_diag_minor(&p, 2, &[vec![1], vec![2]], &[3, 4]).unwrap();
        assert_eq!(m, int(2 * 7 - 3 * 5));
        // Sign is pinned by sorting: passing rows or cols in any order gives
        // the same value.
        let m2 = off_diag_minor(&p, 2, &[vec![2], vec![1]], &[4, 3]).unwrap();
        assert_eq!(m2, m);
    }

    #[test]
    fn off_diagonality_is_enforced() {
        let p = rank_one(&[1, 2, 3, 4], &[5, 6, 7, 8]);
        // Column 1 occurs in row (1).
        assert!(matches!(
            off_diag_minor(&p, 2, &[vec![1], vec![2]], &[1, 3]),
            Err(Error::OffDiagonalityViolated { .. })
        ));
        // Size mismatch and repeated selections.
        assert!(off_diag_minor(&p, 2, &[vec![1]], &[2, 3]).is_err());
        assert!(off_diag_minor(&p, 2, &[vec![1], vec![1]], &[2, 3]).is_err());
    }
}
