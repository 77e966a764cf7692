//! Dense helpers for column spaces of indicator matrices.

use nalgebra::DMatrix;

use crate::Partition;

/// Singular values at or below `RELATIVE_TOL * largest` count as zero.
pub(crate) const RELATIVE_TOL: f64 = 1e-8;

/// Singular values within this factor of the threshold are reported.
const MARGIN: f64 = 10.0;

/// Orthonormal basis of a column space, plus whether the rank decision was
/// close to the tolerance.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    pub q: DMatrix<f64>,
    pub near_threshold: bool,
}

impl Basis {
    pub fn empty(n: usize) -> Self {
        Basis {
            q: DMatrix::zeros(n, 0),
            near_threshold: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    /// `m` with its component in this space removed.
    pub fn project_out(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        if self.rank() == 0 {
            return m.clone();
        }
        m - &self.q * (self.q.transpose() * m)
    }
}

/// Units by classes 0/1 matrix.
pub(crate) fn indicator(p: &Partition) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p.n_units(), p.n_classes());
    for (u, &c) in p.class_of().iter().enumerate() {
        m[(u, c as usize)] = 1.0;
    }
    m
}

/// Orthonormal basis for the column space of `m`, from a column-pivoted QR
/// factorisation. `scale` fixes the magnitude the tolerance is relative to;
/// pass `None` to use the largest column norm of `m`. Residuals after
/// projection should pass the scale of the unprojected matrix so that
/// rounding noise is not counted.
pub(crate) fn column_basis(m: &DMatrix<f64>, scale: Option<f64>) -> Basis {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return Basis::empty(n);
    }
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect();
    let largest = scale.unwrap_or_else(|| diag.iter().cloned().fold(0.0, f64::max));
    if largest <= 0.0 {
        return Basis::empty(n);
    }
    let tol = RELATIVE_TOL * largest;
    let rank = diag.iter().take_while(|&&d| d > tol).count();
    let near_threshold = diag.iter().any(|&d| d > tol / MARGIN && d < tol * MARGIN);
    let q = qr.q().columns(0, rank).into_owned();
    Basis { q, near_threshold }
}

/// Columns of several matrices side by side.
pub(crate) fn hstack(n: usize, parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols: usize = parts.iter().map(|m| m.ncols()).sum();
    let mut out = DMatrix::zeros(n, cols);
    let mut at = 0;
    for m in parts {
        out.view_mut((0, at), (n, m.ncols())).copy_from(m);
        at += m.ncols();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_rank_is_class_count() {
        let p = Partition::from_keys([0, 0, 1, 2, 2]);
        let b = column_basis(&indicator(&p), None);
        assert_eq!(b.rank(), 3);
        assert!(!b.near_threshold);
    }

    #[test]
    fn projection_removes_mean() {
        let mean = column_basis(&indicator(&Partition::mean(4)), None);
        let a = indicator(&Partition::from_keys([0, 0, 1, 1]));
        let r = column_basis(&mean.project_out(&a), Some(2.0));
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn hstack_concatenates() {
        let a = DMatrix::from_element(2, 1, 1.0);
        let b = DMatrix::from_element(2, 2, 2.0);
        let m = hstack(2, &[&a, &b]);
        assert_eq!(m.ncols(), 3);
        assert_eq!(m[(1, 2)], 2.0);
    }
}
