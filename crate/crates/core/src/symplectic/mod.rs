//! Symplectic linear algebra over `Q`.
//!
//! A [`SymplecticSpace`] is `Q^{2g}` with an alternating non-degenerate
//! Gram matrix. A [`SymplecticBasis`] `(ω_1..ω_g, η_1..η_g)` satisfies
//! `⟨ω_i, η_j⟩ = δ_ij` with both blocks isotropic; it is stored as the
//! `2g x 2g` matrix whose columns are the basis vectors, so the right action
//! of a group element `p` is the matrix product `b · p`.
//!
//! Group elements are always expressed against the standard form
//! `J = [[0, 1], [-1, 0]]`, i.e. in the coordinates of a symplectic basis.

pub mod random;
pub mod selftest;

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::linalg::{Matrix, QMatrix};

pub type Vector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymplecticError {
    #[error("matrix dimension {0} is not even")]
    OddDimension(usize),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Gram matrix is not alternating and invertible")]
    InvalidForm,
    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("Lagrangian subspaces are not complementary")]
    NotComplementary,
    #[error("pairings do not form a symplectic basis")]
    NotSymplecticBasis,
    #[error("matrix is not a member of {0}")]
    NotInGroup(GroupKind),
    #[error("the ω-blocks span different subspaces; no parabolic transition exists")]
    OmegaSpansDiffer,
}

fn clear_denominators(vs: &[Vector]) -> (Vec<Vec<BigInt>>, BigInt) {
    let l = vs.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints = vs.iter().map(|v| v.iter().map(|x| x.numer() * (&l / x.denom())).collect()).collect();
    (ints, l)
}

/// Each vector scaled to integers separately, with its scale factor.
fn clear_each(vs: &[Vector]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    vs.iter()
        .map(|v| {
            let (mut ints, l) = clear_denominators(core::slice::from_ref(v));
            (ints.pop().expect("one vector"), l)
        })
        .unzip()
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// The standard alternating form `[[0, 1_g], [-1_g, 0]]`.
pub fn standard_form(g: usize) -> QMatrix {
    Matrix::from_blocks(&QMatrix::zeros(g, g), &QMatrix::identity(g), &QMatrix::identity(g).neg(), &QMatrix::zeros(g, g))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpace {
    g: usize,
    gram: QMatrix,
    /// `gram_den · gram`, integral.
    gram_int: Vec<Vec<BigInt>>,
    gram_den: BigInt,
}

impl SymplecticSpace {
    pub fn standard(g: usize) -> Self {
        Self::from_gram(g, standard_form(g))
    }

    fn from_gram(g: usize, gram: QMatrix) -> Self {
        let (gram_int, gram_den) = clear_denominators(&(0..gram.rows()).map(|r| gram.row(r)).collect::<Vec<_>>());
        SymplecticSpace { g, gram, gram_int, gram_den }
    }

    pub fn new(gram: QMatrix) -> Result<Self, SymplecticError> {
        if !gram.is_square() {
            return Err(SymplecticError::InvalidForm);
        }
        let n = gram.rows();
        if n % 2 == 1 {
            return Err(SymplecticError::OddDimension(n));
        }
        if !gram.is_antisymmetric() || gram.rank() != n {
            return Err(SymplecticError::InvalidForm);
        }
        Ok(Self::from_gram(n / 2, gram))
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn pairing(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let gv = self.gram.mul_vec(v);
        <Rational as crate::linalg::Field>::sum_products(u.iter().zip(&gv))
    }

    /// `(⟨us_i, vs_j⟩)_{ij}`.
    pub fn pairing_matrix(&self, us: &[Vector], vs: &[Vector]) -> QMatrix {
        let gvs: Vec<Vector> = vs.iter().map(|v| self.gram.mul_vec(v)).collect();
        Matrix::from_fn(us.len(), vs.len(), |i, j| {
            <Rational as crate::linalg::Field>::sum_products(us[i].iter().zip(&gvs[j]))
        })
    }

    /// Whether `⟨us_i, vs_j⟩ = expected(i, j)` for all `i, j`, decided over
    /// the integers after clearing denominators.
    pub fn pairings_equal(&self, us: &[Vector], vs: &[Vector], expected: impl Fn(usize, usize) -> i64) -> bool {
        let (ui, ud) = clear_each(us);
        let (vi, vd) = clear_each(vs);
        let gv: Vec<Vec<BigInt>> = vi
            .iter()
            .map(|v| self.gram_int.iter().map(|row| int_dot(row, v)).collect())
            .collect();
        ui.iter().zip(&ud).enumerate().all(|(i, (u, du))| {
            gv.iter().zip(&vd).enumerate().all(|(j, (w, dv))| {
                let lhs = int_dot(u, w);
                match expected(i, j) {
                    0 => lhs.is_zero(),
                    e => lhs == BigInt::from(e) * du * dv * &self.gram_den,
                }
            })
        })
    }

    fn check_len(&self, vs: &[Vector]) -> Result<(), SymplecticError> {
        match vs.iter().find(|v| v.len() != self.dim()) {
            Some(v) => Err(SymplecticError::DimensionMismatch { expected: self.dim(), got: v.len() }),
            None => Ok(()),
        }
    }

    /// `{e : ⟨f, e⟩ = 0 for all f in sub}`.
    pub fn annihilator(&self, sub: &Subspace) -> Subspace {
        if sub.dim() == 0 {
            return Subspace::full(self.dim());
        }
        let rows: Vec<Vector> = sub.basis.iter().map(|u| self.gram.transpose().mul_vec(u)).collect();
        let ns = Matrix::from_rows(rows).nullspace();
        Subspace::from_spanning(self.dim(), &ns).expect("null space basis is independent")
    }

    pub fn is_isotropic(&self, sub: &Subspace) -> bool {
        self.pairings_equal(&sub.basis, &sub.basis, |_, _| 0)
    }

    pub fn is_lagrangian(&self, sub: &Subspace) -> bool {
        sub.dim() == self.g && self.is_isotropic(sub)
    }

    /// Greedy isotropic enlargement: repeatedly adjoin the first echelon
    /// basis vector of the current annihilator that is not yet in the span.
    pub fn find_lagrangian(&self) -> Subspace {
        let mut current = Subspace::zero(self.dim());
        while current.dim() < self.g {
            let ann = self.annihilator(&current);
            let v = ann
                .basis
                .iter()
                .find(|v| !current.contains(v))
                .expect("a non-Lagrangian isotropic subspace is strictly contained in its annihilator")
                .clone();
            let mut span = current.basis.clone();
            span.push(v);
            current = Subspace::from_spanning(self.dim(), &span).expect("independent by construction");
        }
        current
    }

    /// Completes a basis of a Lagrangian subspace to a symplectic basis whose
    /// ω-block is exactly `frame`.
    ///
    /// Lifts the dual basis to vectors `f'_j` with `⟨e_i, f'_j⟩ = δ_ij`, then
    /// corrects `f_i = f'_i + Σ_j b_ij e_j` with `b` the strictly lower
    /// triangular part of `-(⟨f'_i, f'_j⟩)`, which makes the `f_i` isotropic.
    pub fn complete_to_symplectic(&self, frame: &[Vector]) -> Result<SymplecticBasis, SymplecticError> {
        self.require_lagrangian_frame(frame)?;
        let g = self.g;
        // one elimination of [E^T G | 1] gives all particular lifts
        let n = self.dim();
        let gt = self.gram.transpose();
        let lift_rows: Vec<Vector> = frame.iter().map(|e| gt.mul_vec(e)).collect();
        let aug = Matrix::from_fn(g, n + g, |r, c| {
            if c < n {
                lift_rows[r][c].clone()
            } else if c - n == r {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let ech = aug.rref();
        if ech.pivots.iter().any(|&p| p >= n) || ech.pivots.len() != g {
            return Err(SymplecticError::DependentVectors);
        }
        let lifted: Vec<Vector> = (0..g)
            .map(|j| {
                let mut x = alloc::vec![Rational::zero(); n];
                for (r, &p) in ech.pivots.iter().enumerate() {
                    x[p] = ech.reduced[(r, n + j)].clone();
                }
                x
            })
            .collect();
        let a = self.pairing_matrix(&lifted, &lifted);
        let one = Rational::one();
        let eta: Vec<Vector> = (0..g)
            .map(|i| {
                let b: Vec<Rational> = (0..i).map(|j| -a[(i, j)].clone()).collect();
                (0..n)
                    .map(|k| {
                        let terms = core::iter::once((&one, &lifted[i][k])).chain(b.iter().zip(frame).map(|(b, e)| (b, &e[k])));
                        <Rational as crate::linalg::Field>::sum_products(terms)
                    })
                    .collect()
            })
            .collect();
        SymplecticBasis::new(self, frame, &eta)
    }

    /// The unique basis `ω` of `span(l_frame)` making `(ω, f_frame)` a
    /// symplectic basis, for complementary Lagrangians.
    pub fn dual_lagrangian_basis(&self, l_frame: &[Vector], f_frame: &[Vector]) -> Result<SymplecticBasis, SymplecticError> {
        self.require_lagrangian_frame(l_frame)?;
        self.require_lagrangian_frame(f_frame)?;
        let n = self.pairing_matrix(l_frame, f_frame);
        let c = n.inverse().ok_or(SymplecticError::NotComplementary)?.transpose();
        let omega: Vec<Vector> = (0..self.g)
            .map(|i| {
                (0..self.dim())
                    .map(|r| {
                        let terms = l_frame.iter().enumerate().map(|(k, l)| (&c[(k, i)], &l[r]));
                        <Rational as crate::linalg::Field>::sum_products(terms)
                    })
                    .collect()
            })
            .collect();
        SymplecticBasis::new(self, &omega, f_frame)
    }

    fn require_lagrangian_frame(&self, frame: &[Vector]) -> Result<Subspace, SymplecticError> {
        self.check_len(frame)?;
        let sub = Subspace::from_spanning(self.dim(), frame)?;
        // the frame spans `sub` and has smaller entries than its echelon basis
        if !self.pairings_equal(frame, frame, |_, _| 0) {
            return Err(SymplecticError::NotIsotropic);
        }
        if sub.dim() != self.g {
            return Err(SymplecticError::NotLagrangian);
        }
        Ok(sub)
    }

    /// Pairing matrix `(⟨α_i, η_j⟩)` and whether it is symmetric, i.e.
    /// whether `(α_1..α_g)` lies in the fibre of the subbundle `S_g`.
    pub fn sg_symmetry_check(&self, alphas: &[Vector], b: &SymplecticBasis) -> (QMatrix, bool) {
        let m = self.pairing_matrix(alphas, &b.eta_block());
        let sym = m.is_symmetric();
        (m, sym)
    }

    /// Dimension count for the map `m_g : (α_i) ↦ (⟨α_i, η_j⟩)` at `b`.
    pub fn sg_rank_count(&self, b: &SymplecticBasis) -> SgRankCount {
        let g = self.g;
        let n = self.dim();
        let eta = b.eta_block();
        let g_eta: Vec<Vector> = eta.iter().map(|e| self.gram.mul_vec(e)).collect();
        // unknown (i, t) at column i*n + t
        let map = QMatrix::from_fn(g * g, g * n, |row, col| {
            let (i, j) = (row / g, row % g);
            let (k, t) = (col / n, col % n);
            if k == i {
                g_eta[j][t].clone()
            } else {
                Rational::zero()
            }
        });
        let antisym_rows: Vec<Vector> = (0..g)
            .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
            .map(|(i, j)| (0..g * n).map(|c| &map[(i * g + j, c)] - &map[(j * g + i, c)]).collect())
            .collect();
        let sg_basis = if antisym_rows.is_empty() {
            QMatrix::identity(g * n).columns()
        } else {
            Matrix::from_rows(antisym_rows).nullspace()
        };
        let image = Matrix::from_columns(&sg_basis.iter().map(|v| map.mul_vec(v)).collect::<Vec<_>>());
        SgRankCount { map_rank: map.rank(), sg_dim: sg_basis.len(), symmetric_image_dim: image.rank() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SgRankCount {
    /// Rank of `m_g` (surjective iff `g²`).
    pub map_rank: usize,
    /// Dimension of the fibre of `S_g` (expected `g(3g+1)/2`).
    pub sg_dim: usize,
    /// Dimension of `m_g(S_g)` (expected `g(g+1)/2`).
    pub symmetric_image_dim: usize,
}

/// A subspace of `Q^n`, stored as the nonzero rows of a reduced echelon
/// spanning matrix so that equal spans compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: QMatrix::identity(ambient).columns() }
    }

    /// Span of independent vectors; errors on a dependent spanning set.
    pub fn from_spanning(ambient: usize, vectors: &[Vector]) -> Result<Self, SymplecticError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(SymplecticError::DimensionMismatch { expected: ambient, got: v.len() });
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let e = Matrix::from_rows(vectors.to_vec()).rref();
        if e.pivots.len() != vectors.len() {
            return Err(SymplecticError::DependentVectors);
        }
        let basis = (0..e.pivots.len()).map(|r| e.reduced.row(r)).collect();
        Ok(Subspace { ambient, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Matrix::from_rows(rows).rank() == self.dim()
    }
}

/// Columns `(ω_1..ω_g, η_1..η_g)` of a symplectic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticBasis {
    g: usize,
    matrix: QMatrix,
}

impl SymplecticBasis {
    /// Validates `⟨ω_i,ω_j⟩ = ⟨η_i,η_j⟩ = 0`, `⟨ω_i,η_j⟩ = δ_ij` in `space`.
    pub fn new(space: &SymplecticSpace, omega: &[Vector], eta: &[Vector]) -> Result<Self, SymplecticError> {
        let g = space.genus();
        for block in [omega, eta] {
            if block.len() != g {
                return Err(SymplecticError::DimensionMismatch { expected: g, got: block.len() });
            }
            space.check_len(block)?;
        }
        let cols: Vec<Vector> = omega.iter().chain(eta).cloned().collect();
        let matrix = Matrix::from_columns(&cols);
        Self::from_matrix(space, matrix)
    }

    /// Validates a matrix whose columns are `(ω, η)`.
    pub fn from_matrix(space: &SymplecticSpace, matrix: QMatrix) -> Result<Self, SymplecticError> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(SymplecticError::DimensionMismatch { expected: space.dim(), got: matrix.cols() });
        }
        let g = space.genus();
        let cols = matrix.columns();
        let j = |a: usize, b: usize| match (a < g, b < g) {
            (true, false) if b - g == a => 1,
            (false, true) if a - g == b => -1,
            _ => 0,
        };
        if !space.pairings_equal(&cols, &cols, j) {
            return Err(SymplecticError::NotSymplecticBasis);
        }
        Ok(SymplecticBasis { g: space.genus(), matrix })
    }

    /// The standard basis `(e_1..e_g, f_1..f_g)` of the standard space.
    pub fn standard(g: usize) -> Self {
        SymplecticBasis { g, matrix: QMatrix::identity(2 * g) }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn omega(&self, i: usize) -> Vector {
        self.matrix.column(i)
    }

    pub fn eta(&self, i: usize) -> Vector {
        self.matrix.column(self.g + i)
    }

    pub fn omega_block(&self) -> Vec<Vector> {
        (0..self.g).map(|i| self.omega(i)).collect()
    }

    pub fn eta_block(&self) -> Vec<Vector> {
        (0..self.g).map(|i| self.eta(i)).collect()
    }

    pub fn omega_span(&self) -> Subspace {
        Subspace::from_spanning(2 * self.g, &self.omega_block()).expect("basis vectors are independent")
    }

    /// Right action of the Siegel parabolic group:
    /// `b · p = (ωA, ωB + η(Aᵀ)⁻¹)`.
    pub fn act_parabolic(&self, p: &GroupElement) -> Result<SymplecticBasis, SymplecticError> {
        if p.kind() == GroupKind::Symplectic && !is_siegel_parabolic(p.matrix())? {
            return Err(SymplecticError::NotInGroup(GroupKind::Parabolic));
        }
        if p.matrix().rows() != 2 * self.g {
            return Err(SymplecticError::DimensionMismatch { expected: 2 * self.g, got: p.matrix().rows() });
        }
        Ok(SymplecticBasis { g: self.g, matrix: self.matrix.mul(p.matrix()) })
    }

    /// The unique `p` in `P_g` with `self · p = other`.
    pub fn transition_parabolic(&self, other: &SymplecticBasis) -> Result<GroupElement, SymplecticError> {
        if other.g != self.g {
            return Err(SymplecticError::DimensionMismatch { expected: 2 * self.g, got: 2 * other.g });
        }
        let inv = self.matrix.inverse().ok_or(SymplecticError::NotSymplecticBasis)?;
        let p = inv.mul(&other.matrix);
        GroupElement::new(p, GroupKind::Parabolic).map_err(|e| match e {
            SymplecticError::NotInGroup(_) => SymplecticError::OmegaSpansDiffer,
            e => e,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `Sp_2g`
    Symplectic,
    /// Siegel parabolic `P_g`: lower-left block zero.
    Parabolic,
    /// Levi `L_g`: block diagonal.
    Levi,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Symplectic => "Sp_2g",
            GroupKind::Parabolic => "P_g",
            GroupKind::Levi => "L_g",
        })
    }
}

fn blocks(m: &QMatrix) -> Result<(usize, [QMatrix; 4]), SymplecticError> {
    if !m.is_square() {
        return Err(SymplecticError::DimensionMismatch { expected: m.rows(), got: m.cols() });
    }
    let n = m.rows();
    if n % 2 == 1 {
        return Err(SymplecticError::OddDimension(n));
    }
    let g = n / 2;
    Ok((g, [m.block(0, 0, g, g), m.block(0, g, g, g), m.block(g, 0, g, g), m.block(g, g, g, g)]))
}

/// `AB^T = BA^T`, `CD^T = DC^T` and `AD^T - BC^T = 1` for `M = [[A,B],[C,D]]`.
pub fn is_symplectic_matrix(m: &QMatrix) -> Result<bool, SymplecticError> {
    let (g, [a, b, c, d]) = blocks(m)?;
    let ab = a.mul(&b.transpose());
    let cd = c.mul(&d.transpose());
    Ok(ab == ab.transpose()
        && cd == cd.transpose()
        && a.mul(&d.transpose()).sub(&b.mul(&c.transpose())) == QMatrix::identity(g))
}

pub fn is_siegel_parabolic(m: &QMatrix) -> Result<bool, SymplecticError> {
    let (_, [_, _, c, _]) = blocks(m)?;
    Ok(c.is_zero() && is_symplectic_matrix(m)?)
}

pub fn is_levi(m: &QMatrix) -> Result<bool, SymplecticError> {
    let (_, [_, b, _, _]) = blocks(m)?;
    Ok(b.is_zero() && is_siegel_parabolic(m)?)
}

/// A matrix validated as a member of `Sp_2g`, `P_g` or `L_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    matrix: QMatrix,
    kind: GroupKind,
}

impl GroupElement {
    pub fn new(matrix: QMatrix, kind: GroupKind) -> Result<Self, SymplecticError> {
        let ok = match kind {
            GroupKind::Symplectic => is_symplectic_matrix(&matrix)?,
            GroupKind::Parabolic => is_siegel_parabolic(&matrix)?,
            GroupKind::Levi => is_levi(&matrix)?,
        };
        if ok {
            Ok(GroupElement { matrix, kind })
        } else {
            Err(SymplecticError::NotInGroup(kind))
        }
    }

    pub fn identity(g: usize, kind: GroupKind) -> Self {
        GroupElement { matrix: QMatrix::identity(2 * g), kind }
    }

    /// `[[A, B], [0, (A^T)^{-1}]]`; requires `AB^T` symmetric.
    pub fn parabolic(a: &QMatrix, b: &QMatrix) -> Result<Self, SymplecticError> {
        let d = a.transpose().inverse().ok_or(SymplecticError::NotInGroup(GroupKind::Parabolic))?;
        let g = a.rows();
        let m = Matrix::from_blocks(a, b, &QMatrix::zeros(g, g), &d);
        Self::new(m, GroupKind::Parabolic)
    }

    pub fn levi(a: &QMatrix) -> Result<Self, SymplecticError> {
        let g = a.rows();
        let d = a.transpose().inverse().ok_or(SymplecticError::NotInGroup(GroupKind::Levi))?;
        Self::new(Matrix::from_blocks(a, &QMatrix::zeros(g, g), &QMatrix::zeros(g, g), &d), GroupKind::Levi)
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.matrix.rows() / 2
    }

    /// Upper-left block `A`.
    pub fn a_block(&self) -> QMatrix {
        let g = self.genus();
        self.matrix.block(0, 0, g, g)
    }

    /// Upper-right block `B`.
    pub fn b_block(&self) -> QMatrix {
        let g = self.genus();
        self.matrix.block(0, g, g, g)
    }

    /// Product in the smallest group containing both factors.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        use GroupKind::*;
        let kind = match (self.kind, other.kind) {
            (Levi, Levi) => Levi,
            (Symplectic, _) | (_, Symplectic) => Symplectic,
            _ => Parabolic,
        };
        GroupElement { matrix: self.matrix.mul(&other.matrix), kind }
    }

    pub fn inverse(&self) -> GroupElement {
        // M^{-1} = -J M^T J for symplectic M
        let j = standard_form(self.genus());
        GroupElement { matrix: j.mul(&self.matrix.transpose()).mul(&j).neg(), kind: self.kind }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == QMatrix::identity(self.matrix.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::linalg::qmatrix;
    use alloc::vec;

    fn e(n: usize, i: usize) -> Vector {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        v
    }

    #[test]
    fn symplectic_matrix_examples() {
        assert!(is_symplectic_matrix(&QMatrix::identity(4)).unwrap());
        assert!(!is_symplectic_matrix(&qmatrix(&[&[2, 0], &[0, 1]])).unwrap());
        assert!(is_symplectic_matrix(&qmatrix(&[&[1, 5], &[0, 1]])).unwrap());
        assert_eq!(is_symplectic_matrix(&QMatrix::identity(3)), Err(SymplecticError::OddDimension(3)));
    }

    #[test]
    fn parabolic_and_levi_examples() {
        let id = QMatrix::identity(4);
        assert!(is_siegel_parabolic(&id).unwrap() && is_levi(&id).unwrap());
        let sym = qmatrix(&[&[1, 0, 0, 1], &[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(is_siegel_parabolic(&sym).unwrap());
        assert!(!is_levi(&sym).unwrap());
        let anti = qmatrix(&[&[1, 0, 0, 1], &[0, 1, -1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(!is_siegel_parabolic(&anti).unwrap());
        assert_eq!(is_levi(&QMatrix::identity(5)), Err(SymplecticError::OddDimension(5)));
    }

    #[test]
    fn genus_one_action() {
        let a = QMatrix::from_rows(vec![vec![rat(3, 2)]]);
        let beta = QMatrix::from_rows(vec![vec![int(5)]]);
        let p = GroupElement::parabolic(&a, &beta).unwrap();
        let b = SymplecticBasis::standard(1);
        let bp = b.act_parabolic(&p).unwrap();
        assert_eq!(bp.omega(0), vec![rat(3, 2), int(0)]);
        assert_eq!(bp.eta(0), vec![int(5), rat(2, 3)]);
        assert_eq!(b.act_parabolic(&GroupElement::identity(1, GroupKind::Parabolic)).unwrap(), b);
    }

    #[test]
    fn act_rejects_non_parabolic() {
        let m = qmatrix(&[&[1, 0], &[1, 1]]);
        let p = GroupElement::new(m, GroupKind::Symplectic).unwrap();
        assert_eq!(SymplecticBasis::standard(1).act_parabolic(&p), Err(SymplecticError::NotInGroup(GroupKind::Parabolic)));
    }

    #[test]
    fn transition_identity_and_error() {
        let b = SymplecticBasis::standard(2);
        assert!(b.transition_parabolic(&b).unwrap().is_identity());
        // swap ω_1 <-> η_1 (with a sign to stay symplectic)
        let space = SymplecticSpace::standard(2);
        let swapped = SymplecticBasis::new(
            &space,
            &[e(4, 2), e(4, 1)],
            &[e(4, 0).into_iter().map(|x| -x).collect(), e(4, 3)],
        )
        .unwrap();
        assert_eq!(b.transition_parabolic(&swapped), Err(SymplecticError::OmegaSpansDiffer));
    }

    #[test]
    fn completion_of_standard_block() {
        let space = SymplecticSpace::standard(3);
        let frame: Vec<Vector> = (0..3).map(|i| e(6, i)).collect();
        let b = space.complete_to_symplectic(&frame).unwrap();
        assert_eq!(b, SymplecticBasis::standard(3));
        assert_eq!(space.complete_to_symplectic(&[e(6, 0), e(6, 0), e(6, 1)]), Err(SymplecticError::DependentVectors));
        assert_eq!(space.complete_to_symplectic(&[e(6, 0), e(6, 3), e(6, 1)]), Err(SymplecticError::NotIsotropic));
    }

    #[test]
    fn completion_fixes_nonisotropic_lift() {
        // Lagrangian spanned by e1+e2, e2 in the standard g=2 space: the
        // particular lift is not isotropic, so the correction is exercised.
        let space = SymplecticSpace::standard(2);
        let f1 = vec![int(1), int(1), int(0), int(0)];
        let f2 = vec![int(0), int(1), int(0), int(0)];
        let b = space.complete_to_symplectic(&[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(b.omega_block(), vec![f1, f2]);
    }

    #[test]
    fn dual_basis_examples() {
        let space = SymplecticSpace::standard(2);
        let l: Vec<Vector> = (0..2).map(|i| e(4, i)).collect();
        let f: Vec<Vector> = (2..4).map(|i| e(4, i)).collect();
        assert_eq!(space.dual_lagrangian_basis(&l, &f).unwrap(), SymplecticBasis::standard(2));
        assert_eq!(space.dual_lagrangian_basis(&l, &l), Err(SymplecticError::NotComplementary));
    }

    #[test]
    fn annihilator_and_lagrangians() {
        let space = SymplecticSpace::standard(3);
        let line = Subspace::from_spanning(6, &[e(6, 0)]).unwrap();
        assert_eq!(space.annihilator(&line).dim(), 5);
        let plane = Subspace::from_spanning(6, &[e(6, 0), e(6, 3)]).unwrap();
        assert!(!space.is_isotropic(&plane));
        let iso = Subspace::from_spanning(6, &[e(6, 0), e(6, 1), e(6, 2)]).unwrap();
        assert!(space.is_isotropic(&iso) && space.is_lagrangian(&iso));
        assert_eq!(space.annihilator(&iso), iso);
        let found = space.find_lagrangian();
        assert!(space.is_lagrangian(&found));
        assert_eq!(Subspace::from_spanning(6, &[e(6, 0), e(6, 0)]), Err(SymplecticError::DependentVectors));
    }

    #[test]
    fn any_line_is_isotropic_in_genus_one() {
        let space = SymplecticSpace::new(qmatrix(&[&[0, 3], &[-3, 0]])).unwrap();
        let v = vec![int(2), int(-7)];
        assert_eq!(space.pairing(&v, &v), int(0));
        assert!(space.is_lagrangian(&space.find_lagrangian()));
        assert_eq!(SymplecticSpace::new(qmatrix(&[&[0, 1], &[1, 0]])), Err(SymplecticError::InvalidForm));
    }

    #[test]
    fn sg_symmetry_examples() {
        let space = SymplecticSpace::standard(2);
        let b = SymplecticBasis::standard(2);
        let (m, sym) = space.sg_symmetry_check(&b.eta_block(), &b);
        assert!(m.is_zero() && sym);
        let (m, sym) = space.sg_symmetry_check(&b.omega_block(), &b);
        assert!(sym && m == QMatrix::identity(2));
        // α_i = Σ a_ij ω_j gives the matrix a
        let a = qmatrix(&[&[1, 2], &[3, 4]]);
        let alphas: Vec<Vector> = (0..2)
            .map(|i| (0..4).map(|t| (0..2).fold(int(0), |acc, j| acc + &a[(i, j)] * &b.omega(j)[t])).collect())
            .collect();
        let (m, sym) = space.sg_symmetry_check(&alphas, &b);
        assert_eq!(m, a);
        assert!(!sym);
    }

    #[test]
    fn sg_rank_counts() {
        for g in 1..=3 {
            let c = SymplecticSpace::standard(g).sg_rank_count(&SymplecticBasis::standard(g));
            assert_eq!(c.map_rank, g * g);
            assert_eq!(c.sg_dim, g * (3 * g + 1) / 2);
            assert_eq!(c.symmetric_image_dim, g * (g + 1) / 2);
        }
    }
}
