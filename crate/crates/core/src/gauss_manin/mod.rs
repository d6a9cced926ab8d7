//! Gauss–Manin connections on explicit affine charts.
//!
//! A chart carries one `2g x 2g` matrix `Ω^(c)` per coordinate `c`, in the
//! row-frame convention `∇_{∂/∂c} b_j = Σ_i b_i Ω^(c)_ij` for the frame
//! `(b_1..b_2g) = (ω_1..ω_g, η_1..η_g)`. Stored matrices already include the
//! `1/Δ` factor.

pub mod builtin;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::arith::{ArithError, MultiPoly, RatFunc};
use crate::linalg::Matrix;
use crate::vector_field::PolyVectorField;

pub type RMatrix = Matrix<RatFunc>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaussManinError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("expected {expected} connection matrices, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("connection matrices must be 2g x 2g")]
    BadMatrixShape,
    #[error("entry ({i}, {j}) of the d{coord} matrix has a denominator not dividing a power of delta")]
    PoleOutsideDelta { coord: String, i: usize, j: usize },
    #[error("chart coordinates {expected:?} do not match {got:?}")]
    ChartMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("the pulled-back delta is not a unit on the source chart")]
    DeltaNotUnit,
    #[error("frame change matrix is not invertible")]
    SingularFrameChange,
    #[error("Kodaira-Spencer matrix is not symmetric")]
    AsymmetricKodairaSpencer,
    #[error("line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error("no chart named `{0}`")]
    UnknownChart(String),
}

/// True if every irreducible factor of `p` divides `delta`, i.e. `p`
/// divides some power of `delta` up to a rational unit.
pub fn divides_power_of(p: &MultiPoly, delta: &MultiPoly) -> bool {
    if p.is_zero() {
        return false;
    }
    let mut p = p.clone();
    loop {
        if p.is_constant() {
            return true;
        }
        let h = p.gcd(delta);
        if h.is_constant() {
            return false;
        }
        p = p.div_exact(&h).expect("gcd divides");
    }
}

#[derive(Clone, Debug)]
pub struct ConnectionChart {
    name: String,
    coords: Vec<String>,
    delta: MultiPoly,
    g: usize,
    matrices: Vec<RMatrix>,
}

impl ConnectionChart {
    /// Validates shapes and that every pole lies on `delta = 0`. Entries are
    /// re-expressed over exactly `coords`.
    pub fn new<S: AsRef<str>>(
        name: &str,
        coords: &[S],
        delta: MultiPoly,
        matrices: Vec<RMatrix>,
    ) -> Result<Self, GaussManinError> {
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        if matrices.len() != coords.len() {
            return Err(GaussManinError::CoordinateCount { expected: coords.len(), got: matrices.len() });
        }
        let n = matrices.first().map_or(0, |m| m.rows());
        if n == 0 || n % 2 == 1 || matrices.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(GaussManinError::BadMatrixShape);
        }
        let delta = delta.with_vars(&coords)?;
        let mut aligned = Vec::with_capacity(matrices.len());
        for (c, m) in coords.iter().zip(&matrices) {
            let mut entries = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let e = m[(i, j)].with_vars(&coords)?;
                    if !e.is_zero() && !divides_power_of(e.denom(), &delta) {
                        return Err(GaussManinError::PoleOutsideDelta { coord: c.clone(), i, j });
                    }
                    entries.push(e);
                }
            }
            aligned.push(Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone()));
        }
        Ok(ConnectionChart { name: name.to_string(), coords, delta, g: n / 2, matrices: aligned })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn delta(&self) -> &MultiPoly {
        &self.delta
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, coord: &str) -> Option<&RMatrix> {
        self.coords.iter().position(|c| c == coord).map(|i| &self.matrices[i])
    }

    /// Same coordinates and the same matrices (names and delta normalisation
    /// are ignored).
    pub fn same_connection(&self, other: &ConnectionChart) -> bool {
        self.coords == other.coords && self.matrices == other.matrices
    }

    /// Entries `(coord, i, j, self, other)` where the two charts differ.
    pub fn diff(&self, other: &ConnectionChart) -> Result<Vec<EntryDiff>, GaussManinError> {
        self.require_coords(&other.coords)?;
        let n = 2 * self.g;
        let mut out = Vec::new();
        for (k, c) in self.coords.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (&self.matrices[k][(i, j)], &other.matrices[k][(i, j)]);
                    if a != b {
                        out.push(EntryDiff { coord: c.clone(), i, j, left: a.clone(), right: b.clone() });
                    }
                }
            }
        }
        Ok(out)
    }

    fn require_coords(&self, coords: &[String]) -> Result<(), GaussManinError> {
        if self.coords.as_slice() != coords {
            return Err(GaussManinError::ChartMismatch { expected: self.coords.clone(), got: coords.to_vec() });
        }
        Ok(())
    }

    fn standard_form(&self) -> RMatrix {
        let g = self.g;
        Matrix::from_fn(2 * g, 2 * g, |i, j| {
            if j == i + g {
                RatFunc::one()
            } else if i == j + g {
                RatFunc::from_i64(-1)
            } else {
                RatFunc::zero()
            }
        })
    }

    /// Per coordinate, whether `Ω^T J + J Ω = 0` for the standard form `J`.
    pub fn symplectic_compatibility(&self) -> Vec<(String, bool)> {
        let j = self.standard_form();
        self.coords
            .iter()
            .zip(&self.matrices)
            .map(|(c, m)| (c.clone(), m.transpose().mul(&j).add(&j.mul(m)).is_zero()))
            .collect()
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_compatibility().iter().all(|(_, ok)| *ok)
    }

    /// `∂_c Ω^(c') - ∂_c' Ω^(c) + [Ω^(c), Ω^(c')]` for every pair `c < c'`.
    pub fn curvature(&self) -> Vec<(String, String, RMatrix)> {
        let mut out = Vec::new();
        for a in 0..self.coords.len() {
            for b in a + 1..self.coords.len() {
                let (ca, cb) = (&self.coords[a], &self.coords[b]);
                let (ma, mb) = (&self.matrices[a], &self.matrices[b]);
                let r = mb
                    .map(|e| e.diff(ca))
                    .sub(&ma.map(|e| e.diff(cb)))
                    .add(&ma.mul(mb))
                    .sub(&mb.mul(ma));
                out.push((ca.clone(), cb.clone(), r));
            }
        }
        out
    }

    pub fn is_flat(&self) -> bool {
        self.curvature().iter().all(|(_, _, m)| m.is_zero())
    }

    /// `Σ_c v_c Ω^(c)`, the matrix of `∇_v` on the frame.
    pub fn contract(&self, v: &PolyVectorField) -> Result<RMatrix, GaussManinError> {
        self.require_coords(v.coords())?;
        let n = 2 * self.g;
        let mut acc = RMatrix::zeros(n, n);
        for (m, vc) in self.matrices.iter().zip(v.coeffs()) {
            if !vc.is_zero() {
                acc = acc.add(&m.scale(vc));
            }
        }
        Ok(acc)
    }

    /// `K_ik = ⟨ω_k, ∇_v ω_i⟩`, the η_k-component of `∇_v ω_i`.
    pub fn kodaira_spencer(&self, v: &PolyVectorField) -> Result<RMatrix, GaussManinError> {
        let m = self.contract(v)?;
        let g = self.g;
        let k = Matrix::from_fn(g, g, |i, kk| m[(g + kk, i)].clone());
        if !k.is_symmetric() {
            return Err(GaussManinError::AsymmetricKodairaSpencer);
        }
        Ok(k)
    }

    /// Whether every entry times delta has coefficients whose denominators
    /// only involve `primes`.
    pub fn integral_over(&self, primes: &[u64]) -> bool {
        let d = RatFunc::from_poly(self.delta.clone());
        self.matrices.iter().all(|m| m.entries().all(|e| (e * &d).coefficient_support_within(primes)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntryDiff {
    pub coord: String,
    pub i: usize,
    pub j: usize,
    pub left: RatFunc,
    pub right: RatFunc,
}

/// A morphism of charts `source -> target`: target coordinates as functions
/// of source coordinates, and the frame change `P` with
/// `new frame = (pulled-back old frame) · P`.
#[derive(Clone, Debug)]
pub struct ChartMorphism {
    source_name: String,
    source_coords: Vec<String>,
    source_delta: MultiPoly,
    coordinate_map: BTreeMap<String, RatFunc>,
    frame_change: RMatrix,
}

impl ChartMorphism {
    pub fn new<S: AsRef<str>>(
        source_name: &str,
        source_coords: &[S],
        source_delta: MultiPoly,
        coordinate_map: BTreeMap<String, RatFunc>,
        frame_change: RMatrix,
    ) -> Result<Self, GaussManinError> {
        let source_coords: Vec<String> = source_coords.iter().map(|c| c.as_ref().to_string()).collect();
        if !frame_change.is_square() || frame_change.inverse().is_none() {
            return Err(GaussManinError::SingularFrameChange);
        }
        let coordinate_map = coordinate_map
            .into_iter()
            .map(|(k, v)| Ok((k, v.with_vars(&source_coords)?)))
            .collect::<Result<_, ArithError>>()?;
        let frame_change = frame_change.try_map(|e| e.with_vars(&source_coords))?;
        let source_delta = source_delta.with_vars(&source_coords)?;
        Ok(ChartMorphism { source_name: source_name.to_string(), source_coords, source_delta, coordinate_map, frame_change })
    }

    /// The identity of `chart` with trivial frame change.
    pub fn identity(chart: &ConnectionChart) -> Self {
        let map = chart.coords.iter().map(|c| (c.clone(), RatFunc::var(c))).collect();
        Self::new(&chart.name, &chart.coords, chart.delta.clone(), map, RMatrix::identity(2 * chart.g))
            .expect("identity is well formed")
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn source_coords(&self) -> &[String] {
        &self.source_coords
    }

    pub fn source_delta(&self) -> &MultiPoly {
        &self.source_delta
    }

    pub fn coordinate_map(&self) -> &BTreeMap<String, RatFunc> {
        &self.coordinate_map
    }

    pub fn frame_change(&self) -> &RMatrix {
        &self.frame_change
    }

    /// `self` followed by `next` (`self: X -> Y`, `next: Y -> Z`), giving
    /// `X -> Z` with frame change `f^*(P_next) · P_self`.
    pub fn then(&self, next: &ChartMorphism) -> Result<ChartMorphism, GaussManinError> {
        let mut map = BTreeMap::new();
        for (k, v) in &next.coordinate_map {
            map.insert(k.clone(), v.substitute(&self.coordinate_map)?);
        }
        let p = next.frame_change.try_map(|e| e.substitute(&self.coordinate_map))?.mul(&self.frame_change);
        Self::new(&self.source_name, &self.source_coords, self.source_delta.clone(), map, p)
    }
}

/// Pulls `conn` back along `m`:
/// `Ω'^(s) = P^{-1} (Σ_t f^*Ω^(t) ∂f_t/∂s) P + P^{-1} ∂P/∂s`.
pub fn pullback_connection(conn: &ConnectionChart, m: &ChartMorphism) -> Result<ConnectionChart, GaussManinError> {
    let keys: Vec<String> = m.coordinate_map.keys().cloned().collect();
    let mut sorted = conn.coords.clone();
    sorted.sort();
    if keys != sorted {
        return Err(GaussManinError::ChartMismatch { expected: conn.coords.clone(), got: keys });
    }
    let n = 2 * conn.g;
    if m.frame_change.rows() != n {
        return Err(GaussManinError::BadMatrixShape);
    }
    let pulled_delta = RatFunc::from_poly(conn.delta.clone()).substitute(&m.coordinate_map)?;
    if pulled_delta.is_zero()
        || !divides_power_of(pulled_delta.numer(), &m.source_delta)
        || !divides_power_of(pulled_delta.denom(), &m.source_delta)
    {
        return Err(GaussManinError::DeltaNotUnit);
    }
    let pulled: Vec<RMatrix> =
        conn.matrices.iter().map(|om| om.try_map(|e| e.substitute(&m.coordinate_map))).collect::<Result<_, _>>()?;
    let p = &m.frame_change;
    let p_inv = p.inverse().ok_or(GaussManinError::SingularFrameChange)?;
    let mut out = Vec::with_capacity(m.source_coords.len());
    for s in &m.source_coords {
        let mut acc = RMatrix::zeros(n, n);
        for (t, om) in conn.coords.iter().zip(&pulled) {
            let df = m.coordinate_map[t].diff(s);
            if !df.is_zero() {
                acc = acc.add(&om.scale(&df));
            }
        }
        let dp = p.map(|e| e.diff(s));
        out.push(p_inv.mul(&acc).mul(p).add(&p_inv.mul(&dp)));
    }
    ConnectionChart::new(&m.source_name, &m.source_coords, m.source_delta.clone(), out)
}
