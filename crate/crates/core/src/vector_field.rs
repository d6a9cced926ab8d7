//! Rational vector fields on affine charts.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::arith::text::parse_ratfunc;
use crate::arith::{identity_assignment, ArithError, RatFunc};
use crate::gauss_manin::{ConnectionChart, GaussManinError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VectorFieldError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    GaussManin(#[from] GaussManinError),
    #[error("expected {expected} components, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("forward and inverse maps do not compose to the identity")]
    NotIsomorphism,
    #[error("chart has {got} coordinates, {expected} are required")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("connection is not compatible with the symplectic form")]
    NotSymplectic,
    #[error("linear system for the field is singular")]
    SingularSystem,
    #[error("linear system for the field is inconsistent")]
    Inconsistent,
}

/// `Σ_c coeffs[c] ∂/∂c`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    coords: Vec<String>,
    coeffs: Vec<RatFunc>,
}

impl PolyVectorField {
    pub fn new<S: AsRef<str>>(coords: &[S], coeffs: Vec<RatFunc>) -> Result<Self, VectorFieldError> {
        if coeffs.len() != coords.len() {
            return Err(VectorFieldError::LengthMismatch { expected: coords.len(), got: coeffs.len() });
        }
        Ok(PolyVectorField { coords: coords.iter().map(|c| c.as_ref().to_string()).collect(), coeffs })
    }

    pub fn zero<S: AsRef<str>>(coords: &[S]) -> Self {
        Self::new(coords, coords.iter().map(|_| RatFunc::zero()).collect()).expect("lengths agree")
    }

    /// `∂/∂name`.
    pub fn coordinate<S: AsRef<str>>(coords: &[S], name: &str) -> Result<Self, VectorFieldError> {
        if !coords.iter().any(|c| c.as_ref() == name) {
            return Err(VectorFieldError::UnknownCoordinate(name.to_string()));
        }
        let coeffs = coords.iter().map(|c| if c.as_ref() == name { RatFunc::one() } else { RatFunc::zero() }).collect();
        Self::new(coords, coeffs)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn component(&self, name: &str) -> Option<&RatFunc> {
        self.coords.iter().position(|c| c == name).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFunc::is_zero)
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        PolyVectorField { coords: self.coords.clone(), coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    /// The derivation `f ↦ Σ_c v_c ∂f/∂c`.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        self.coords.iter().zip(&self.coeffs).fold(RatFunc::zero(), |acc, (c, vc)| {
            if vc.is_zero() {
                acc
            } else {
                acc + vc * &f.diff(c)
            }
        })
    }

    /// `[v, w]_c = v(w_c) - w(v_c)`.
    pub fn lie_bracket(&self, other: &PolyVectorField) -> Result<PolyVectorField, VectorFieldError> {
        if self.coords != other.coords {
            return Err(VectorFieldError::ChartMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(vc, wc)| self.apply(wc) - other.apply(vc)).collect();
        Self::new(&self.coords, coeffs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RamanujanChart {
    B,
    E,
}

/// The Ramanujan vector field on the `b` or `e` chart.
pub fn ramanujan_field(chart: RamanujanChart) -> PolyVectorField {
    let (coords, srcs): ([&str; 3], [&str; 3]) = match chart {
        RamanujanChart::B => (["b2", "b4", "b6"], ["2*b4", "3*b6", "b2*b6 - b4^2"]),
        RamanujanChart::E => (["e2", "e4", "e6"], ["(e2^2 - e4)/12", "(e2*e4 - e6)/3", "(e2*e6 - e4^2)/2"]),
    };
    let coeffs = srcs.iter().map(|s| parse_ratfunc(s, &coords).expect("built-in field")).collect();
    PolyVectorField::new(&coords, coeffs).expect("three components")
}

/// A chart isomorphism with explicit inverse. `params` are extra symbols
/// (such as a scaling parameter) that both maps leave fixed.
#[derive(Clone, Debug)]
pub struct ChartIso {
    source: Vec<String>,
    target: Vec<String>,
    params: Vec<String>,
    forward: BTreeMap<String, RatFunc>,
    inverse: BTreeMap<String, RatFunc>,
}

impl ChartIso {
    /// `forward` gives each target coordinate in terms of source
    /// coordinates, `inverse` each source coordinate in terms of target
    /// coordinates. Both compositions are checked to be the identity.
    pub fn new<S: AsRef<str>>(
        source: &[S],
        target: &[S],
        params: &[S],
        forward: BTreeMap<String, RatFunc>,
        inverse: BTreeMap<String, RatFunc>,
    ) -> Result<Self, VectorFieldError> {
        let names = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<String>>();
        let iso = ChartIso { source: names(source), target: names(target), params: names(params), forward, inverse };
        let fwd_keys: Vec<&String> = iso.forward.keys().collect();
        let inv_keys: Vec<&String> = iso.inverse.keys().collect();
        let (mut t, mut s) = (iso.target.iter().collect::<Vec<_>>(), iso.source.iter().collect::<Vec<_>>());
        t.sort();
        s.sort();
        if fwd_keys != t || inv_keys != s {
            return Err(VectorFieldError::NotIsomorphism);
        }
        for c in &iso.target {
            if iso.forward[c].substitute(&iso.inverse_assignment())? != RatFunc::var(c) {
                return Err(VectorFieldError::NotIsomorphism);
            }
        }
        for c in &iso.source {
            if iso.inverse[c].substitute(&iso.forward_assignment())? != RatFunc::var(c) {
                return Err(VectorFieldError::NotIsomorphism);
            }
        }
        Ok(iso)
    }

    fn with_params(&self, mut m: BTreeMap<String, RatFunc>) -> BTreeMap<String, RatFunc> {
        m.extend(identity_assignment(&self.params));
        m
    }

    fn inverse_assignment(&self) -> BTreeMap<String, RatFunc> {
        self.with_params(self.inverse.clone())
    }

    fn forward_assignment(&self) -> BTreeMap<String, RatFunc> {
        self.with_params(self.forward.clone())
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn target(&self) -> &[String] {
        &self.target
    }

    /// `(iso_* v)_c = v(forward_c) ∘ inverse`.
    pub fn pushforward(&self, v: &PolyVectorField) -> Result<PolyVectorField, VectorFieldError> {
        if v.coords != self.source {
            return Err(VectorFieldError::ChartMismatch);
        }
        let inv = self.inverse_assignment();
        let coeffs = self
            .target
            .iter()
            .map(|c| v.apply(&self.forward[c]).substitute(&inv))
            .collect::<Result<Vec<_>, _>>()?;
        PolyVectorField::new(&self.target, coeffs)
    }
}

fn assignment(pairs: &[(&str, &str)], vars: &[&str]) -> BTreeMap<String, RatFunc> {
    pairs.iter().map(|(k, s)| (k.to_string(), parse_ratfunc(s, vars).expect("built-in map"))).collect()
}

/// `(b2, b4, b6) ↦ (e2, e4, e6) = (b2, b2² - 24b4, b2³ - 36b2b4 + 216b6)`.
pub fn b_to_e_iso() -> ChartIso {
    let b = ["b2", "b4", "b6"];
    let e = ["e2", "e4", "e6"];
    let fwd = assignment(&[("e2", "b2"), ("e4", "b2^2 - 24*b4"), ("e6", "b2^3 - 36*b2*b4 + 216*b6")], &b);
    let inv = assignment(&[("b2", "e2"), ("b4", "(e2^2 - e4)/24"), ("b6", "(e6 + e2^3/2 - 3/2*e2*e4)/216")], &e);
    ChartIso::new(&b, &e, &[], fwd, inv).expect("inverse maps")
}

/// Weighted scaling `(b2, b4, b6) ↦ (u²b2, u⁴b4, u⁶b6)` with `u` a parameter.
pub fn b_scaling_iso(u: &str) -> ChartIso {
    let b = ["b2", "b4", "b6"];
    let vars = ["b2", "b4", "b6", u];
    let fwd = [("b2", "u^2*b2"), ("b4", "u^4*b4"), ("b6", "u^6*b6")];
    let inv = [("b2", "b2/u^2"), ("b4", "b4/u^4"), ("b6", "b6/u^6")];
    let sub = |s: &str| s.replace('u', u);
    let build = |pairs: &[(&str, &str)]| -> BTreeMap<String, RatFunc> {
        pairs.iter().map(|(k, s)| (k.to_string(), parse_ratfunc(&sub(s), &vars).expect("scaling map"))).collect()
    };
    ChartIso::new(&b, &b, &[u], build(&fwd), build(&inv)).expect("inverse maps")
}

/// The fields `v_ij` (`i ≤ j`, zero-based) with `∇_{v_ij} ω_i = η_j`,
/// `∇_{v_ij} ω_j = η_i`, `∇_{v_ij} ω_k = 0` otherwise and `∇_{v_ij} η_k = 0`,
/// obtained by solving `Σ_c θ_c Ω^(c) = T_ij` over the chart's function field.
pub fn solve_higher_ramanujan(
    conn: &ConnectionChart,
) -> Result<BTreeMap<(usize, usize), PolyVectorField>, VectorFieldError> {
    let g = conn.genus();
    let n = conn.coords().len();
    let need = 2 * g * g + g;
    if n != need {
        return Err(VectorFieldError::DimensionMismatch { expected: need, got: n });
    }
    if !conn.is_symplectic() {
        return Err(VectorFieldError::NotSymplectic);
    }
    let size = 2 * g;
    let mats = conn.matrices();
    let coeff = Matrix::from_fn(size * size, n, |row, c| mats[c][(row / size, row % size)].clone());
    if coeff.rank() != n {
        return Err(VectorFieldError::SingularSystem);
    }
    let mut out = BTreeMap::new();
    for i in 0..g {
        for j in i..g {
            let target = |r: usize, s: usize| (r, s) == (g + j, i) || (r, s) == (g + i, j);
            let aug = Matrix::from_fn(size * size, n + 1, |row, c| {
                if c < n {
                    coeff[(row, c)].clone()
                } else if target(row / size, row % size) {
                    RatFunc::one()
                } else {
                    RatFunc::zero()
                }
            });
            let e = aug.rref();
            if e.pivots.contains(&n) {
                return Err(VectorFieldError::Inconsistent);
            }
            let theta: Vec<RatFunc> = (0..n).map(|r| e.reduced[(r, n)].clone()).collect();
            out.insert((i, j), PolyVectorField::new(conn.coords(), theta)?);
        }
    }
    Ok(out)
}

/// Whether all pairwise Lie brackets vanish.
pub fn verify_commutation(fields: &[PolyVectorField]) -> Result<bool, VectorFieldError> {
    for (k, v) in fields.iter().enumerate() {
        for w in &fields[k + 1..] {
            if !v.lie_bracket(w)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
