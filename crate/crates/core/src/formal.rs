//! Formal derivations on the free module with basis `ω_1..ω_g, η_1..η_g`.
//!
//! Coefficients are rational functions in flat scalar symbols (entries of
//! constant group matrices), so every derivation below is linear over them.
//! The derivation `∇_{v_ij}` (`i ≤ j`) acts on the basis by
//! `ω_i ↦ η_j`, `ω_j ↦ η_i`, every other `ω_k ↦ 0` and every `η_k ↦ 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::arith::RatFunc;
use crate::linalg::Matrix;
use crate::symplectic::random as srand;

pub type RMatrix = Matrix<RatFunc>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormalError {
    #[error("index pair ({i}, {j}) invalid for g = {g}")]
    BadIndex { i: usize, j: usize, g: usize },
    #[error("matrix is not invertible")]
    Singular,
    #[error("expected {g} x {g} matrices")]
    Shape { g: usize },
}

/// `Σ_k omega[k] ω_k + eta[k] η_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalElement {
    omega: Vec<RatFunc>,
    eta: Vec<RatFunc>,
}

impl FormalElement {
    pub fn zero(g: usize) -> Self {
        FormalElement { omega: alloc::vec![RatFunc::zero(); g], eta: alloc::vec![RatFunc::zero(); g] }
    }

    pub fn omega(g: usize, k: usize) -> Self {
        let mut x = Self::zero(g);
        x.omega[k] = RatFunc::one();
        x
    }

    pub fn eta(g: usize, k: usize) -> Self {
        let mut x = Self::zero(g);
        x.eta[k] = RatFunc::one();
        x
    }

    /// All `2g` basis symbols, ω's first.
    pub fn basis(g: usize) -> Vec<Self> {
        (0..g).map(|k| Self::omega(g, k)).chain((0..g).map(|k| Self::eta(g, k))).collect()
    }

    pub fn genus(&self) -> usize {
        self.omega.len()
    }

    pub fn omega_coeffs(&self) -> &[RatFunc] {
        &self.omega
    }

    pub fn eta_coeffs(&self) -> &[RatFunc] {
        &self.eta
    }

    pub fn is_zero(&self) -> bool {
        self.omega.iter().chain(&self.eta).all(RatFunc::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let zip = |a: &[RatFunc], b: &[RatFunc]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        FormalElement { omega: zip(&self.omega, &o.omega), eta: zip(&self.eta, &o.eta) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&RatFunc::from_i64(-1)))
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        FormalElement { omega: self.omega.iter().map(|x| x * c).collect(), eta: self.eta.iter().map(|x| x * c).collect() }
    }

    /// `Σ_k c_k x_k`.
    pub fn combination(g: usize, terms: impl IntoIterator<Item = (RatFunc, FormalElement)>) -> Self {
        terms.into_iter().fold(Self::zero(g), |acc, (c, x)| if c.is_zero() { acc } else { acc.add(&x.scale(&c)) })
    }
}

impl core::fmt::Display for FormalElement {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (sym, cs) in [("w", &self.omega), ("n", &self.eta)] {
            for (k, c) in cs.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(format!("({c})*{sym}{}", k + 1));
                }
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// The formal symplectic pairing `⟨ω_i, η_j⟩ = δ_ij`, `⟨ω, ω⟩ = ⟨η, η⟩ = 0`.
pub fn pairing(x: &FormalElement, y: &FormalElement) -> RatFunc {
    (0..x.genus()).fold(RatFunc::zero(), |acc, k| acc + &x.omega[k] * &y.eta[k] - &x.eta[k] * &y.omega[k])
}

/// How `∇_{v_mm}` acts on `ω_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagonalConvention {
    /// `ω_m ↦ η_m`, the defining rule.
    Literal,
    /// `ω_m ↦ 2η_m`, i.e. `∇_{v_mn} ω_k = δ_km η_n + δ_kn η_m` for all `m, n`.
    Doubled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormalDerivation {
    i: usize,
    j: usize,
}

impl FormalDerivation {
    pub fn new(i: usize, j: usize, g: usize) -> Result<Self, FormalError> {
        if i > j || j >= g {
            return Err(FormalError::BadIndex { i, j, g });
        }
        Ok(FormalDerivation { i, j })
    }

    /// Unordered pair, normalised to `i ≤ j`.
    pub fn symmetric(m: usize, n: usize, g: usize) -> Result<Self, FormalError> {
        Self::new(m.min(n), m.max(n), g)
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// All `g(g+1)/2` derivations.
    pub fn all(g: usize) -> Vec<Self> {
        (0..g).flat_map(|i| (i..g).map(move |j| FormalDerivation { i, j })).collect()
    }
}

pub fn apply_nabla(d: FormalDerivation, x: &FormalElement) -> FormalElement {
    apply_with(d, x, DiagonalConvention::Literal)
}

pub fn apply_with(d: FormalDerivation, x: &FormalElement, conv: DiagonalConvention) -> FormalElement {
    let mut out = FormalElement::zero(x.genus());
    let (i, j) = (d.i, d.j);
    if i == j {
        let c = match conv {
            DiagonalConvention::Literal => x.omega[i].clone(),
            DiagonalConvention::Doubled => x.omega[i].scale(&crate::arith::int(2)),
        };
        out.eta[i] = c;
    } else {
        out.eta[j] = x.omega[i].clone();
        out.eta[i] = x.omega[j].clone();
    }
    out
}

/// `[∇_d, ∇_d'] = 0` on every basis symbol for every pair of derivations.
pub fn check_commutation(g: usize) -> bool {
    let ds = FormalDerivation::all(g);
    let basis = FormalElement::basis(g);
    ds.iter().all(|&d| {
        ds.iter().all(|&e| {
            basis.iter().all(|x| apply_nabla(d, &apply_nabla(e, x)).sub(&apply_nabla(e, &apply_nabla(d, x))).is_zero())
        })
    })
}

/// `⟨∇x, y⟩ + ⟨x, ∇y⟩ = 0` on all basis pairs (the pairing is constant).
pub fn check_pairing_leibniz(g: usize) -> bool {
    let basis = FormalElement::basis(g);
    FormalDerivation::all(g).into_iter().all(|d| {
        basis.iter().all(|x| {
            basis.iter().all(|y| (pairing(&apply_nabla(d, x), y) + pairing(x, &apply_nabla(d, y))).is_zero())
        })
    })
}

/// The Kodaira–Spencer matrix `K_mk = ⟨ω_k, ∇_{v_ij} ω_m⟩` of each
/// derivation equals `E_ij + E_ji` (`E_ii` on the diagonal).
pub fn check_kodaira_spencer(g: usize) -> bool {
    FormalDerivation::all(g).into_iter().all(|d| {
        let (i, j) = d.indices();
        (0..g).all(|m| {
            (0..g).all(|k| {
                let val = pairing(&FormalElement::omega(g, k), &apply_nabla(d, &FormalElement::omega(g, m)));
                let expect = (m == i && k == j) || (m == j && k == i);
                val == if expect { RatFunc::one() } else { RatFunc::zero() }
            })
        })
    })
}

/// Pullback of the basis by `p = [[A, B], [0, (A^T)^{-1}]]`:
/// `p^*ω_k = Σ_l ω_l A_lk`, `p^*η_k = Σ_l ω_l B_lk + Σ_l η_l (A^{-1})_kl`.
#[derive(Clone, Debug)]
pub struct ParabolicPullback {
    g: usize,
    omega: Vec<FormalElement>,
    eta: Vec<FormalElement>,
}

impl ParabolicPullback {
    pub fn new(a: &RMatrix, b: &RMatrix) -> Result<Self, FormalError> {
        let g = a.rows();
        if !a.is_square() || b.rows() != g || b.cols() != g {
            return Err(FormalError::Shape { g });
        }
        let a_inv = a.inverse().ok_or(FormalError::Singular)?;
        let omega = (0..g)
            .map(|k| FormalElement::combination(g, (0..g).map(|l| (a[(l, k)].clone(), FormalElement::omega(g, l)))))
            .collect();
        let eta = (0..g)
            .map(|k| {
                let w = (0..g).map(|l| (b[(l, k)].clone(), FormalElement::omega(g, l)));
                let e = (0..g).map(|l| (a_inv[(k, l)].clone(), FormalElement::eta(g, l)));
                FormalElement::combination(g, w.chain(e))
            })
            .collect();
        Ok(ParabolicPullback { g, omega, eta })
    }

    pub fn levi(a: &RMatrix) -> Result<Self, FormalError> {
        Self::new(a, &RMatrix::zeros(a.rows(), a.rows()))
    }

    pub fn omega(&self, k: usize) -> &FormalElement {
        &self.omega[k]
    }

    pub fn eta(&self, k: usize) -> &FormalElement {
        &self.eta[k]
    }

    /// `(p^*ω_1, .., p^*ω_g, p^*η_1, .., p^*η_g)`.
    pub fn basis(&self) -> Vec<FormalElement> {
        self.omega.iter().chain(&self.eta).cloned().collect()
    }

    /// `p^*x`, extended linearly over flat scalars.
    pub fn apply(&self, x: &FormalElement) -> FormalElement {
        let w = x.omega.iter().cloned().zip(self.omega.iter().cloned());
        let e = x.eta.iter().cloned().zip(self.eta.iter().cloned());
        FormalElement::combination(self.g, w.chain(e))
    }

    /// Pairing matrix of the pulled-back basis.
    pub fn pairing_matrix(&self) -> RMatrix {
        let b = self.basis();
        Matrix::from_fn(2 * self.g, 2 * self.g, |r, c| pairing(&b[r], &b[c]))
    }
}

/// Standard pairing matrix `[[0, 1], [-1, 0]]` over rational functions.
pub fn standard_pairing(g: usize) -> RMatrix {
    Matrix::from_fn(2 * g, 2 * g, |r, c| {
        if c == r + g {
            RatFunc::one()
        } else if r == c + g {
            RatFunc::from_i64(-1)
        } else {
            RatFunc::zero()
        }
    })
}

/// Derivatives of the pulled-back η's under a parabolic change of basis.
#[derive(Clone, Debug)]
pub struct ParabolicObstruction {
    /// `∇_{v_ij}(p^*η_k)` for every `i ≤ j` and `k`.
    pub residuals: Vec<((usize, usize, usize), FormalElement)>,
    /// Each residual equals `η_i B_ik` (`i = j`) or `η_j B_ik + η_i B_jk`.
    pub closed_form_matches: bool,
    pub all_residuals_zero: bool,
    pub b_is_zero: bool,
}

impl ParabolicObstruction {
    /// Residuals vanish exactly when `B = 0`.
    pub fn iff_holds(&self) -> bool {
        self.all_residuals_zero == self.b_is_zero
    }
}

pub fn check_parabolic_obstruction(a: &RMatrix, b: &RMatrix) -> Result<ParabolicObstruction, FormalError> {
    let p = ParabolicPullback::new(a, b)?;
    let g = p.g;
    let mut residuals = Vec::new();
    let mut closed_form_matches = true;
    for d in FormalDerivation::all(g) {
        let (i, j) = d.indices();
        for k in 0..g {
            let r = apply_nabla(d, p.eta(k));
            let expect = if i == j {
                FormalElement::eta(g, i).scale(&b[(i, k)])
            } else {
                FormalElement::eta(g, j).scale(&b[(i, k)]).add(&FormalElement::eta(g, i).scale(&b[(j, k)]))
            };
            closed_form_matches &= r == expect;
            residuals.push(((i, j, k), r));
        }
    }
    let all_residuals_zero = residuals.iter().all(|(_, r)| r.is_zero());
    Ok(ParabolicObstruction { residuals, closed_form_matches, all_residuals_zero, b_is_zero: b.is_zero() })
}

/// Checks `∇_{v_ij}(p^*ω_k) = p^*(∇_{w_ij} ω_k)` with
/// `w_ij = Σ_{m,n} A_im v_mn A_jn`, and `∇_{v_ij}(p^*η_k) = 0 = p^*(∇_{w_ij} η_k)`,
/// for `p` the Levi element of `A`. Returns the failing `(i, j, k)`.
pub fn check_levi_transformation(a: &RMatrix, conv: DiagonalConvention) -> Result<Vec<(usize, usize, usize)>, FormalError> {
    let p = ParabolicPullback::levi(a)?;
    let g = p.g;
    let mut failures = Vec::new();
    for d in FormalDerivation::all(g) {
        let (i, j) = d.indices();
        let w = |x: &FormalElement| -> FormalElement {
            let mut acc = FormalElement::zero(g);
            for m in 0..g {
                for n in 0..g {
                    let c = &a[(i, m)] * &a[(j, n)];
                    if !c.is_zero() {
                        let dmn = FormalDerivation::symmetric(m, n, g).expect("in range");
                        acc = acc.add(&apply_with(dmn, x, conv).scale(&c));
                    }
                }
            }
            acc
        };
        for k in 0..g {
            let lhs = apply_with(d, p.omega(k), conv);
            let rhs = p.apply(&w(&FormalElement::omega(g, k)));
            let eta_lhs = apply_with(d, p.eta(k), conv);
            let eta_rhs = p.apply(&w(&FormalElement::eta(g, k)));
            if lhs != rhs || !eta_lhs.is_zero() || !eta_rhs.is_zero() {
                failures.push((i, j, k));
            }
        }
    }
    Ok(failures)
}

/// `g x g` matrix of independent symbols `{prefix}{r}{c}` (1-based).
pub fn symbolic_matrix(prefix: &str, g: usize) -> RMatrix {
    Matrix::from_fn(g, g, |r, c| RatFunc::var(&format!("{prefix}{}{}", r + 1, c + 1)))
}

fn rational_matrix(m: &crate::linalg::QMatrix) -> RMatrix {
    m.map(|x| RatFunc::constant(x.clone()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

/// Results of all formal checks in genus `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalReport {
    pub g: usize,
    pub trials: usize,
    pub commutation: bool,
    pub pairing_leibniz: bool,
    pub kodaira_spencer: bool,
    /// Pulled-back bases of random parabolic elements stay symplectic.
    pub pullback_pairing: Tally,
    pub obstruction_closed_form: Tally,
    pub obstruction_iff: Tally,
    pub levi_doubled: Tally,
    pub levi_literal: Tally,
    /// Fully symbolic checks (entries of `A`, `B` as symbols), `g ≤ 2` only:
    /// (closed form and iff for the obstruction, doubled Levi law, literal Levi law).
    pub symbolic: Option<[bool; 4]>,
    /// Degree in the entries of `A` of the Levi identities after clearing
    /// `det A`; random points detect any failure with probability
    /// `≥ 1 - degree / (sample range)` per trial.
    pub degree_bound: usize,
}

/// Runs every formal check, with `trials` random exact group elements.
pub fn formal_check<R: Rng + ?Sized>(g: usize, trials: usize, rng: &mut R) -> FormalReport {
    let mut rep = FormalReport {
        g,
        trials,
        commutation: check_commutation(g),
        pairing_leibniz: check_pairing_leibniz(g),
        kodaira_spencer: check_kodaira_spencer(g),
        pullback_pairing: Tally::default(),
        obstruction_closed_form: Tally::default(),
        obstruction_iff: Tally::default(),
        levi_doubled: Tally::default(),
        levi_literal: Tally::default(),
        symbolic: None,
        degree_bound: g + 1,
    };
    for t in 0..trials {
        let p = srand::parabolic(rng, g);
        let (a, b) = (rational_matrix(&p.a_block()), rational_matrix(&p.b_block()));
        let pb = ParabolicPullback::new(&a, &b).expect("parabolic A is invertible");
        rep.pullback_pairing.record(pb.pairing_matrix() == standard_pairing(g));
        let b_used = if t % 2 == 0 { RMatrix::zeros(g, g) } else { b };
        match check_parabolic_obstruction(&a, &b_used) {
            Ok(o) => {
                rep.obstruction_closed_form.record(o.closed_form_matches);
                rep.obstruction_iff.record(o.iff_holds());
            }
            Err(_) => {
                rep.obstruction_closed_form.record(false);
                rep.obstruction_iff.record(false);
            }
        }
        rep.levi_doubled.record(check_levi_transformation(&a, DiagonalConvention::Doubled).is_ok_and(|f| f.is_empty()));
        rep.levi_literal.record(check_levi_transformation(&a, DiagonalConvention::Literal).is_ok_and(|f| f.is_empty()));
    }
    if g <= 2 {
        let a = symbolic_matrix("a", g);
        let b = symbolic_matrix("b", g);
        let o = check_parabolic_obstruction(&a, &b).expect("generic A is invertible");
        let zero = check_parabolic_obstruction(&a, &RMatrix::zeros(g, g)).expect("generic A is invertible");
        let iff = o.iff_holds() && zero.iff_holds();
        let dbl = check_levi_transformation(&a, DiagonalConvention::Doubled).is_ok_and(|f| f.is_empty());
        let lit = check_levi_transformation(&a, DiagonalConvention::Literal).is_ok_and(|f| f.is_empty());
        rep.symbolic = Some([o.closed_form_matches && zero.closed_form_matches, iff, dbl, lit]);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use rand::SeedableRng;

    fn c(x: crate::arith::Rational) -> RatFunc {
        RatFunc::constant(x)
    }

    #[test]
    fn rewrite_rules() {
        let d12 = FormalDerivation::new(0, 1, 3).unwrap();
        assert_eq!(apply_nabla(d12, &FormalElement::omega(3, 0)), FormalElement::eta(3, 1));
        assert_eq!(apply_nabla(d12, &FormalElement::omega(3, 1)), FormalElement::eta(3, 0));
        assert!(apply_nabla(d12, &FormalElement::omega(3, 2)).is_zero());
        let d11 = FormalDerivation::new(0, 0, 1).unwrap();
        assert!(apply_nabla(d11, &FormalElement::eta(1, 0)).is_zero());
        assert!(FormalDerivation::new(1, 0, 2).is_err());
    }

    #[test]
    fn linear_over_scalars() {
        let d = FormalDerivation::new(0, 1, 2).unwrap();
        let s = RatFunc::var("s");
        let x = FormalElement::omega(2, 0).scale(&s).add(&FormalElement::eta(2, 1));
        let y = FormalElement::omega(2, 1);
        let lhs = apply_nabla(d, &x.scale(&s).add(&y));
        let rhs = apply_nabla(d, &x).scale(&s).add(&apply_nabla(d, &y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutation_and_pairing() {
        for g in 1..=4 {
            assert!(check_commutation(g));
            assert!(check_pairing_leibniz(g));
            assert!(check_kodaira_spencer(g));
        }
    }

    #[test]
    fn genus_one_pullback() {
        let a = RMatrix::from_fn(1, 1, |_, _| RatFunc::var("a"));
        let b = RMatrix::from_fn(1, 1, |_, _| RatFunc::var("beta"));
        let p = ParabolicPullback::new(&a, &b).unwrap();
        let expect = FormalElement::omega(1, 0).scale(&RatFunc::var("beta")).add(&FormalElement::eta(1, 0).scale(&RatFunc::var("a").inv().unwrap()));
        assert_eq!(p.eta(0), &expect);
        let id = ParabolicPullback::levi(&RMatrix::identity(2)).unwrap();
        assert_eq!(id.basis(), FormalElement::basis(2));
    }

    #[test]
    fn obstruction_examples() {
        let id = RMatrix::identity(2);
        let o = check_parabolic_obstruction(&id, &RMatrix::zeros(2, 2)).unwrap();
        assert!(o.all_residuals_zero && o.closed_form_matches && o.iff_holds());
        let e11 = RMatrix::from_fn(2, 2, |r, cc| if (r, cc) == (0, 0) { RatFunc::one() } else { RatFunc::zero() });
        let o = check_parabolic_obstruction(&id, &e11).unwrap();
        let r = &o.residuals.iter().find(|(idx, _)| *idx == (0, 0, 0)).unwrap().1;
        assert_eq!(r, &FormalElement::eta(2, 0));
        assert!(o.closed_form_matches && o.iff_holds());
    }

    #[test]
    fn levi_law_conventions() {
        let a1 = RMatrix::from_fn(1, 1, |_, _| c(rat(5, 3)));
        assert!(check_levi_transformation(&a1, DiagonalConvention::Literal).unwrap().is_empty());
        assert!(check_levi_transformation(&a1, DiagonalConvention::Doubled).unwrap().is_empty());
        let a2 = RMatrix::from_fn(2, 2, |r, cc| c(int([[1, 2], [3, 5]][r][cc])));
        assert!(check_levi_transformation(&a2, DiagonalConvention::Doubled).unwrap().is_empty());
        assert!(!check_levi_transformation(&a2, DiagonalConvention::Literal).unwrap().is_empty());
        let id = RMatrix::identity(3);
        assert!(check_levi_transformation(&id, DiagonalConvention::Literal).unwrap().is_empty());
        let sing = RMatrix::zeros(2, 2);
        assert_eq!(check_levi_transformation(&sing, DiagonalConvention::Doubled), Err(FormalError::Singular));
    }

    #[test]
    fn small_report() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let r = formal_check(2, 4, &mut rng);
        assert!(r.commutation && r.pairing_leibniz && r.kodaira_spencer);
        assert!(r.pullback_pairing.ok() && r.obstruction_closed_form.ok() && r.obstruction_iff.ok() && r.levi_doubled.ok());
        assert_eq!(r.symbolic, Some([true, true, true, false]));
    }
}
