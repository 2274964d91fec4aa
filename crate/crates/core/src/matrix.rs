//! Small dense matrices of jets.
//!
//! The kind parameter keeps endomorphisms (`k×k`) and sections (`k×1`)
//! apart at compile time, so that e.g. a section can never be multiplied
//! by an endomorphism from the right.

use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Order};
use crate::scalar::GaussianRational;

pub trait MatrixKind: Copy + Clone + Send + Sync + fmt::Debug + PartialEq + Eq + std::hash::Hash + 'static {
    const NAME: &'static str;
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plain;
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndoKind;
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectionKind;

impl MatrixKind for Plain {
    const NAME: &'static str = "matrix";
}
impl MatrixKind for EndoKind {
    const NAME: &'static str = "endomorphism";
}
impl MatrixKind for SectionKind {
    const NAME: &'static str = "section";
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetMatrix<K: MatrixKind = Plain> {
    rows: usize,
    cols: usize,
    entries: Vec<Jet>,
    kind: PhantomData<K>,
}

/// Endomorphism of a rank-`k` bundle in a local frame.
pub type Endo = JetMatrix<EndoKind>;
/// Section of a rank-`k` bundle in a local frame, stored as a column.
pub type Section = JetMatrix<SectionKind>;

impl<K: MatrixKind> JetMatrix<K> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        let m = JetMatrix {
            rows,
            cols,
            entries,
            kind: PhantomData,
        };
        m.dim();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Jet>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::Config("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Config("ragged matrix rows".into()));
        }
        let dim = rows[0][0].dim();
        if let Some(bad) = rows.iter().flatten().find(|j| j.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, bad.dim()));
        }
        Ok(JetMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
            kind: PhantomData,
        })
    }

    pub fn zeros(dim: usize, rows: usize, cols: usize, order: Order) -> Self {
        Self::from_fn(rows, cols, |_, _| Jet::zero(dim, order))
    }

    pub fn identity(dim: usize, rank: usize) -> Self {
        Self::from_fn(rank, rank, |i, j| {
            if i == j {
                Jet::one(dim)
            } else {
                Jet::zero(dim, Order::Exact)
            }
        })
    }

    /// Scalar jet times the identity.
    pub fn scalar(f: &Jet, rank: usize) -> Self {
        Self::from_fn(rank, rank, |i, j| {
            if i == j {
                f.clone()
            } else {
                Jet::zero(f.dim(), Order::Exact)
            }
        })
    }

    pub fn column(entries: Vec<Jet>) -> Self {
        let n = entries.len();
        assert!(n > 0, "empty column");
        JetMatrix {
            rows: n,
            cols: 1,
            entries,
            kind: PhantomData,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Jet {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> Self {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
            kind: PhantomData,
        }
    }

    pub fn try_map(&self, f: impl Fn(&Jet) -> Result<Jet>) -> Result<Self> {
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
            kind: PhantomData,
        })
    }

    /// Reinterprets the matrix under another kind.
    pub fn retag<K2: MatrixKind>(self) -> JetMatrix<K2> {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries,
            kind: PhantomData,
        }
    }

    pub fn order(&self) -> Order {
        self.entries.iter().map(|e| e.order()).min().unwrap_or(Order::Exact)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_exact_zero())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(self.rows * self.cols, other.rows * other.cols));
        }
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.checked_add(b))
                .collect::<Result<_>>()?,
            kind: PhantomData,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("matrix shape mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn scale_jet(&self, f: &Jet) -> Self {
        self.map(|e| e * f)
    }

    pub fn conj(&self) -> Self {
        self.map(|e| e.conj())
    }

    pub fn derive(&self, v: usize) -> Result<Self> {
        self.try_map(|e| e.derive(v))
    }

    pub fn truncated(&self, order: Order) -> Self {
        self.map(|e| e.truncated(order))
    }

    /// Matrix product `self · other` with shape checking.
    pub fn checked_matmul<K2: MatrixKind, K3: MatrixKind>(&self, other: &JetMatrix<K2>) -> Result<JetMatrix<K3>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let dim = self.dim();
        let mut out = JetMatrix::<K3>::zeros(dim, self.rows, other.cols, Order::Exact);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Jet::zero(dim, self.row_col_order(i, other, j));
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = other.get(l, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc.add_assign_ref(&(a * b));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    fn row_col_order<K2: MatrixKind>(&self, i: usize, other: &JetMatrix<K2>, j: usize) -> Order {
        (0..self.cols)
            .filter(|&l| !self.get(i, l).is_exact_zero() && !other.get(l, j).is_exact_zero())
            .map(|l| self.get(i, l).order().min(other.get(l, j).order()))
            .min()
            .unwrap_or(Order::Exact)
    }

    pub fn matmul<K2: MatrixKind, K3: MatrixKind>(&self, other: &JetMatrix<K2>) -> JetMatrix<K3> {
        self.checked_matmul(other).expect("matrix shape mismatch")
    }

    pub fn transpose(&self) -> Self {
        JetMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        JetMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Value at the basepoint.
    pub fn constant_part(&self) -> Vec<Vec<GaussianRational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect())
            .collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && self.first_disagreement(&self.dagger()).is_none()
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.first_disagreement(other).is_none()
    }

    /// First entry where the two matrices differ within trusted orders.
    pub fn first_disagreement(&self, other: &Self) -> Option<(usize, usize, String)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some((m, a, b)) = self.get(i, j).first_disagreement(other.get(i, j)) {
                    return Some((
                        i,
                        j,
                        format!("{} : {a} vs {b}", crate::jet::monomial_name(m, self.dim())),
                    ));
                }
            }
        }
        None
    }

    /// Exact-constant entries throughout.
    pub fn is_exact_constant(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.order() == Order::Exact && e.terms().all(|(m, _)| m.degree() == 0))
    }

    /// Inverse by Gauss-Jordan elimination with pivots chosen by nonzero
    /// basepoint value. Exact-constant matrices invert exactly; otherwise
    /// entries are inverted through degree `order`.
    pub fn inverse(&self, order: u32) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let dim = self.dim();
        let exact = self.is_exact_constant();
        let invert = |j: &Jet| if exact { j.invert() } else { j.invert_to(order) };
        let mut a: Vec<Vec<Jet>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<Jet>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Jet::one(dim)
                        } else {
                            Jet::zero(dim, Order::Exact)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].constant_term().is_zero())
                .ok_or_else(|| Error::NotInvertible("singular at the basepoint".into()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p_inv = invert(&a[col][col])?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &p_inv;
                inv[col][j] = &inv[col][j] * &p_inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_exact_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] = &a[r][j] - &t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
        JetMatrix::from_rows(inv)
    }

    /// Inverse through the matrix's own trusted order. Exact non-constant
    /// matrices have no finite inverse and are rejected.
    pub fn inverse_within_order(&self) -> Result<Self> {
        match self.order() {
            Order::Finite(t) => self.inverse(t),
            Order::Exact if self.is_exact_constant() => self.inverse(0),
            Order::Exact => Err(Error::UnboundedInverse),
        }
    }

    /// Determinant by cofactor expansion (ranks here are tiny).
    pub fn determinant(&self) -> Jet {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor_det(&idx, 0)
    }

    fn minor_det(&self, cols: &[usize], row: usize) -> Jet {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = Jet::zero(self.dim(), Order::Exact);
        for (pos, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = self.get(row, c) * &self.minor_det(&rest, row + 1);
            if pos % 2 == 0 {
                acc.add_assign_ref(&term);
            } else {
                acc.add_assign_ref(&-&term);
            }
        }
        acc
    }
}

impl<K: MatrixKind> fmt::Debug for JetMatrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", K::NAME)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j).pretty())?;
            }
        }
        write!(f, "]")
    }
}

impl Endo {
    /// The endomorphism `s ⊗ eⁱ`, i.e. `t ↦ s·tⁱ`.
    pub fn outer_with_dual(s: &Section, i: usize) -> Endo {
        let dim = s.dim();
        Endo::from_fn(s.rows(), s.rows(), |a, b| {
            if b == i {
                s.get(a, 0).clone()
            } else {
                Jet::zero(dim, Order::Exact)
            }
        })
    }

    /// Column `j` as a section, i.e. `A(e_j)`.
    pub fn column_section(&self, j: usize) -> Section {
        Section::column((0..self.rows()).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn commutator(&self, other: &Endo) -> Endo {
        let ab: Endo = self.matmul(other);
        let ba: Endo = other.matmul(self);
        ab.sub(&ba)
    }

    pub fn trace(&self) -> Jet {
        let mut acc = Jet::zero(self.dim(), Order::Exact);
        for i in 0..self.rows() {
            acc.add_assign_ref(self.get(i, i));
        }
        acc
    }
}

impl Section {
    pub fn component(&self, i: usize) -> &Jet {
        self.get(i, 0)
    }

    /// Basis section `e_i` of a rank-`rank` frame.
    pub fn basis(dim: usize, rank: usize, i: usize) -> Section {
        Section::column(
            (0..rank)
                .map(|a| {
                    if a == i {
                        Jet::one(dim)
                    } else {
                        Jet::zero(dim, Order::Exact)
                    }
                })
                .collect(),
        )
    }
}

pub fn gaussian_identity(n: usize) -> Vec<Vec<GaussianRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        GaussianRational::one()
                    } else {
                        GaussianRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Monomial;

    fn zzbar() -> Jet {
        Jet::monomial(
            1,
            Monomial::from_exponents(&[1, 1]),
            GaussianRational::one(),
            Order::Exact,
        )
    }

    #[test]
    fn inverse_of_jet_matrix() {
        let one = Jet::one(1);
        let t = zzbar();
        let z = Jet::z(1, 0);
        let m: JetMatrix =
            JetMatrix::from_rows(vec![vec![&one + &t, z.clone()], vec![Jet::zbar(1, 0), one.clone()]]).unwrap();
        let inv = m.inverse(6).unwrap();
        let prod: JetMatrix = m.matmul(&inv);
        assert!(prod.agrees_with(&JetMatrix::identity(1, 2)));
        assert_eq!(inv.order(), Order::Finite(6));
    }

    #[test]
    fn exact_constant_inverse_stays_exact() {
        let two = Jet::constant(1, GaussianRational::from_int(2), Order::Exact);
        let m: JetMatrix = JetMatrix::scalar(&two, 2);
        let inv = m.inverse(4).unwrap();
        assert_eq!(inv.order(), Order::Exact);
        assert_eq!(inv.get(0, 0).constant_term(), GaussianRational::from_ratio(1, 2));
    }

    #[test]
    fn singular_basepoint_is_rejected() {
        let m: JetMatrix = JetMatrix::from_rows(vec![vec![Jet::z(1, 0)]]).unwrap();
        assert!(matches!(m.inverse(4), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn determinant_and_dagger() {
        let m: JetMatrix = JetMatrix::from_rows(vec![
            vec![Jet::one(1), Jet::z(1, 0).scale(&GaussianRational::i())],
            vec![Jet::zbar(1, 0).scale(&-GaussianRational::i()), Jet::one(1)],
        ])
        .unwrap();
        assert!(m.is_hermitian());
        let det = m.determinant();
        assert!(det.agrees_with(&(&Jet::one(1) - &zzbar())));
    }

    #[test]
    fn outer_product_with_dual() {
        let s = Section::column(vec![Jet::z(1, 0), Jet::one(1)]);
        let a = Endo::outer_with_dual(&s, 1);
        let applied: Section = a.matmul(&Section::basis(1, 2, 1));
        assert_eq!(applied, s);
        let killed: Section = a.matmul(&Section::basis(1, 2, 0));
        assert!(killed.is_zero());
    }
}
