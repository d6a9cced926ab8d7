//! Random exact test objects: invertible and symmetric matrices, group
//! elements, scrambled symplectic spaces and bases in them.

use alloc::vec::Vec;

use rand::Rng;

use super::{standard_form, GroupElement, GroupKind, SymplecticBasis, SymplecticSpace, Vector};
use crate::arith::{int, Rational};
use crate::linalg::{Matrix, QMatrix};

fn small<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    int(rng.gen_range(-bound..=bound))
}

/// `L · U` with `L` unit lower triangular and `U` upper triangular with
/// diagonal entries in `{±1, ±2}`, so invertible without a determinant test.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Greater => small(rng, 2),
        core::cmp::Ordering::Equal => int(1),
        core::cmp::Ordering::Less => int(0),
    });
    let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Less => small(rng, 2),
        core::cmp::Ordering::Equal => {
            let d = [1, -1, 2, -2][rng.gen_range(0..4)];
            int(d)
        }
        core::cmp::Ordering::Greater => int(0),
    });
    l.mul(&u)
}

/// `L · U` with unit triangular factors, up to a sign on the diagonal of
/// `U`: an integer matrix with integer inverse.
pub fn unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Greater => small(rng, 2),
        core::cmp::Ordering::Equal => int(1),
        core::cmp::Ordering::Less => int(0),
    });
    let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Less => small(rng, 2),
        core::cmp::Ordering::Equal => int(if rng.gen_bool(0.5) { 1 } else { -1 }),
        core::cmp::Ordering::Greater => int(0),
    });
    l.mul(&u)
}

pub fn symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let m = Matrix::from_fn(n, n, |i, j| if i <= j { small(rng, 2) } else { int(0) });
    Matrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)].clone() } else { m[(j, i)].clone() })
}

pub fn levi<R: Rng + ?Sized>(rng: &mut R, g: usize) -> GroupElement {
    GroupElement::levi(&invertible(rng, g)).expect("invertible A gives a Levi element")
}

/// `[[A, S(A^T)^{-1}], [0, (A^T)^{-1}]]` with `S` symmetric.
pub fn parabolic<R: Rng + ?Sized>(rng: &mut R, g: usize) -> GroupElement {
    let a = invertible(rng, g);
    let s = symmetric(rng, g);
    let b = s.mul(&a.transpose().inverse().expect("invertible"));
    GroupElement::parabolic(&a, &b).expect("S A^{-T} makes A B^T symmetric")
}

/// Parabolic element that is not the identity.
pub fn nontrivial_parabolic<R: Rng + ?Sized>(rng: &mut R, g: usize) -> GroupElement {
    loop {
        let p = parabolic(rng, g);
        if !p.is_identity() {
            return p;
        }
    }
}

/// Product of an upper unipotent, a lower unipotent and an integral Levi
/// factor; integer entries throughout.
pub fn symplectic<R: Rng + ?Sized>(rng: &mut R, g: usize) -> GroupElement {
    let z = QMatrix::zeros(g, g);
    let id = QMatrix::identity(g);
    let lower = GroupElement::new(Matrix::from_blocks(&id, &z, &symmetric(rng, g), &id), GroupKind::Symplectic)
        .expect("lower unipotent");
    let upper = GroupElement::new(Matrix::from_blocks(&id, &symmetric(rng, g), &z, &id), GroupKind::Symplectic)
        .expect("upper unipotent");
    let levi = GroupElement::levi(&unimodular(rng, g)).expect("unimodular A gives a Levi element");
    upper.compose(&lower).compose(&levi)
}

/// A symplectic space with Gram matrix `M^T J M` for random unimodular `M`,
/// together with `M^{-1}`, whose columns form a symplectic basis.
pub struct ScrambledSpace {
    pub space: SymplecticSpace,
    pub base: SymplecticBasis,
}

pub fn scrambled_space<R: Rng + ?Sized>(rng: &mut R, g: usize) -> ScrambledSpace {
    let m = unimodular(rng, 2 * g);
    let gram = m.transpose().mul(&standard_form(g)).mul(&m);
    let space = SymplecticSpace::new(gram).expect("congruent to the standard form");
    let base = SymplecticBasis::from_matrix(&space, m.inverse().expect("invertible"))
        .expect("M^{-1} is symplectic for M^T J M");
    ScrambledSpace { space, base }
}

/// A random symplectic basis of `s.space`.
pub fn basis<R: Rng + ?Sized>(rng: &mut R, s: &ScrambledSpace) -> SymplecticBasis {
    let g = s.space.genus();
    let m = s.base.matrix().mul(symplectic(rng, g).matrix());
    SymplecticBasis::from_matrix(&s.space, m).expect("basis times symplectic matrix")
}

/// A random (generally non-symplectic) frame of the Lagrangian `span(ω)` of `b`.
pub fn lagrangian_frame<R: Rng + ?Sized>(rng: &mut R, b: &SymplecticBasis) -> Vec<Vector> {
    mix(rng, &b.omega_block())
}

/// A random frame of the Lagrangian `span(η)` of `b`.
pub fn complementary_frame<R: Rng + ?Sized>(rng: &mut R, b: &SymplecticBasis) -> Vec<Vector> {
    mix(rng, &b.eta_block())
}

fn mix<R: Rng + ?Sized>(rng: &mut R, vs: &[Vector]) -> Vec<Vector> {
    let a = invertible(rng, vs.len());
    Matrix::from_columns(vs).mul(&a).columns()
}
