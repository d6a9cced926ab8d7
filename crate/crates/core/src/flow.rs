//! Numerical flows of rational vector fields in complex coordinates.
//!
//! Time is `τ = log q`, so the derivation `θ = q d/dq` is `d/dτ`. A flow
//! over the complex step `Δτ` is integrated along the straight path
//! `τ0 + sΔτ`, `s ∈ [0, 1]`, with an embedded Dormand–Prince 5(4) pair.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::arith::{ArithError, MultiPoly};
use crate::qseries::{rational_to_f64, QSeriesError, TruncatedQSeries};
use crate::vector_field::PolyVectorField;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error("trajectory approaches the singular locus (|delta| = {0:e})")]
    Singularity(f64),
    #[error("step budget of {0} exhausted")]
    StepOverflow(usize),
    #[error("expected a point with {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("at least three samples are required")]
    TooFewSamples,
}

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl CompiledPoly {
    fn new(p: &MultiPoly) -> Self {
        let terms = p.terms().map(|(m, c)| (Complex64::new(rational_to_f64(c), 0.0), m.exponents().to_vec())).collect();
        CompiledPoly { terms }
    }

    fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (xi, &e) in x.iter().zip(exps) {
                if e > 0 {
                    t *= xi.powu(e);
                }
            }
            acc += t;
        }
        acc
    }
}

/// A field with `f64` complex coefficients, ready for repeated evaluation,
/// plus an optional guard polynomial that must stay away from zero.
#[derive(Clone, Debug)]
pub struct CompiledField {
    dim: usize,
    comps: Vec<(CompiledPoly, CompiledPoly)>,
    guard: Option<CompiledPoly>,
    threshold: f64,
}

impl CompiledField {
    pub const DEFAULT_THRESHOLD: f64 = 1e-12;

    pub fn new(field: &PolyVectorField, guard: Option<&MultiPoly>) -> Result<Self, FlowError> {
        let coords = field.coords();
        let comps = field
            .coeffs()
            .iter()
            .map(|c| {
                let c = c.with_vars(coords)?;
                Ok((CompiledPoly::new(c.numer()), CompiledPoly::new(c.denom())))
            })
            .collect::<Result<Vec<_>, ArithError>>()?;
        let guard = guard.map(|g| g.with_vars(coords)).transpose()?.map(|g| CompiledPoly::new(&g));
        Ok(CompiledField { dim: coords.len(), comps, guard, threshold: Self::DEFAULT_THRESHOLD })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[Complex64]) -> Result<Vec<Complex64>, FlowError> {
        if x.len() != self.dim {
            return Err(FlowError::Dimension { expected: self.dim, got: x.len() });
        }
        if let Some(g) = &self.guard {
            let d = g.eval(x).norm();
            if !(d >= self.threshold) {
                return Err(FlowError::Singularity(d));
            }
        }
        self.comps
            .iter()
            .map(|(n, d)| {
                let dv = d.eval(x);
                if !(dv.norm() >= self.threshold) {
                    return Err(FlowError::Singularity(dv.norm()));
                }
                Ok(n.eval(x) / dv)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub point: Vec<Complex64>,
    pub tau: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub max_steps: usize,
    /// Record the state after every accepted step.
    pub record: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { tol: 1e-10, max_steps: 100_000, record: false }
    }
}

#[derive(Clone, Debug)]
pub struct FlowOutcome {
    pub state: FlowState,
    pub steps: usize,
    pub rejected: usize,
    pub samples: Vec<FlowState>,
}

// Dormand–Prince 5(4) tableau (the field is autonomous, so the nodes are unused).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `dP/dτ = field(P)` from `start` over `Δτ`.
pub fn integrate(
    field: &CompiledField,
    start: &FlowState,
    dtau: Complex64,
    opts: IntegrateOptions,
) -> Result<FlowOutcome, FlowError> {
    let n = field.dim();
    if start.point.len() != n {
        return Err(FlowError::Dimension { expected: n, got: start.point.len() });
    }
    let mut y = start.point.clone();
    let mut samples = if opts.record { vec![start.clone()] } else { Vec::new() };
    let scale = dtau.norm();
    if scale == 0.0 {
        return Ok(FlowOutcome { state: start.clone(), steps: 0, rejected: 0, samples });
    }
    // rhs in the path parameter s
    let rhs = |p: &[Complex64]| -> Result<Vec<Complex64>, FlowError> { Ok(field.eval(p)?.into_iter().map(|v| v * dtau).collect()) };
    let mut s = 0.0_f64;
    let mut h = 0.01_f64;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut k1 = rhs(&y)?;
    while s < 1.0 {
        if steps + rejected >= opts.max_steps {
            return Err(FlowError::StepOverflow(opts.max_steps));
        }
        h = Float::min(h, 1.0 - s);
        let mut ks: Vec<Vec<Complex64>> = Vec::with_capacity(7);
        ks.push(k1.clone());
        let mut failed = None;
        for stage in 1..7 {
            let yi: Vec<Complex64> = (0..n)
                .map(|c| y[c] + (0..stage).fold(Complex64::new(0.0, 0.0), |acc, j| acc + ks[j][c] * (A[stage][j] * h)))
                .collect();
            match rhs(&yi) {
                Ok(k) => ks.push(k),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            rejected += 1;
            h *= 0.25;
            if h < 1e-14 {
                return Err(e);
            }
            continue;
        }
        let y5: Vec<Complex64> =
            (0..n).map(|c| y[c] + (0..7).fold(Complex64::new(0.0, 0.0), |acc, j| acc + ks[j][c] * (B5[j] * h))).collect();
        let err = (0..n)
            .map(|c| {
                let e = (0..7).fold(Complex64::new(0.0, 0.0), |acc, j| acc + ks[j][c] * ((B5[j] - B4[j]) * h));
                e.norm() / (opts.tol * (1.0 + Float::max(y[c].norm(), y5[c].norm())))
            })
            .fold(0.0_f64, Float::max);
        if err <= 1.0 {
            s += h;
            y = y5;
            k1 = ks.pop().expect("seven stages");
            steps += 1;
            if opts.record {
                samples.push(FlowState { point: y.clone(), tau: start.tau + dtau * s });
            }
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * Float::powf(err, -0.2) };
        h *= Float::min(5.0, Float::max(0.2, factor));
    }
    Ok(FlowOutcome { state: FlowState { point: y, tau: start.tau + dtau }, steps, rejected, samples })
}

/// Values of truncated series at `q`.
pub fn series_point(series: &[TruncatedQSeries], q: Complex64) -> Result<Vec<Complex64>, FlowError> {
    series.iter().map(|s| Ok(s.evaluate(q)?.value)).collect()
}

/// Max over interior samples of `|centered difference - field|` along a
/// uniformly spaced trajectory.
pub fn residual_along(field: &CompiledField, samples: &[FlowState]) -> Result<f64, FlowError> {
    if samples.len() < 3 {
        return Err(FlowError::TooFewSamples);
    }
    let mut worst = 0.0_f64;
    for w in samples.windows(3) {
        let dt = w[2].tau - w[0].tau;
        let f = field.eval(&w[1].point)?;
        for c in 0..f.len() {
            let fd = (w[2].point[c] - w[0].point[c]) / dt;
            worst = Float::max(worst, (fd - f[c]).norm());
        }
    }
    Ok(worst)
}

/// Max over `taus` of `|(P(τ+h) - P(τ-h))/2h - field(P(τ))|` for a curve
/// given as a function of `τ`.
pub fn curve_residual(
    field: &CompiledField,
    curve: impl Fn(Complex64) -> Result<Vec<Complex64>, FlowError>,
    taus: &[Complex64],
    h: f64,
) -> Result<f64, FlowError> {
    let mut worst = 0.0_f64;
    for &t in taus {
        let hc = Complex64::new(h, 0.0);
        let (plus, minus, mid) = (curve(t + hc)?, curve(t - hc)?, curve(t)?);
        let f = field.eval(&mid)?;
        for c in 0..f.len() {
            let fd = (plus[c] - minus[c]) / (hc * 2.0);
            worst = Float::max(worst, (fd - f[c]).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::text::parse_ratfunc;
    use crate::arith::RatFunc;

    fn linear_field() -> CompiledField {
        // dx/dτ = 1, dy/dτ = 2
        let v = PolyVectorField::new(&["x", "y"], vec![RatFunc::from_i64(1), RatFunc::from_i64(2)]).unwrap();
        CompiledField::new(&v, None).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_step_is_identity() {
        let st = FlowState { point: vec![c(1.0), c(2.0)], tau: c(0.0) };
        let out = integrate(&linear_field(), &st, c(0.0), IntegrateOptions::default()).unwrap();
        assert_eq!(out.state, st);
    }

    #[test]
    fn exponential_growth() {
        // dx/dτ = x
        let v = PolyVectorField::new(&["x"], vec![RatFunc::var("x")]).unwrap();
        let f = CompiledField::new(&v, None).unwrap();
        let st = FlowState { point: vec![c(1.0)], tau: c(0.0) };
        let out = integrate(&f, &st, c(1.0), IntegrateOptions::default()).unwrap();
        assert!((out.state.point[0] - c(core::f64::consts::E)).norm() < 1e-9);
        let back = integrate(&f, &out.state, c(-1.0), IntegrateOptions::default()).unwrap();
        assert!((back.state.point[0] - c(1.0)).norm() < 1e-9);
    }

    #[test]
    fn singularity_guard() {
        // dx/dτ = -1 / x hits x = 0
        let v = PolyVectorField::new(&["x"], vec![parse_ratfunc("-1/x", &["x"]).unwrap()]).unwrap();
        let guard = MultiPoly::var("x");
        let f = CompiledField::new(&v, Some(&guard)).unwrap().with_threshold(1e-3);
        let st = FlowState { point: vec![c(1.0)], tau: c(0.0) };
        assert!(matches!(integrate(&f, &st, c(1.0), IntegrateOptions::default()), Err(FlowError::Singularity(_))));
    }

    #[test]
    fn step_budget() {
        let st = FlowState { point: vec![c(0.0), c(0.0)], tau: c(0.0) };
        let opts = IntegrateOptions { max_steps: 2, ..Default::default() };
        assert_eq!(integrate(&linear_field(), &st, c(1000.0), opts).unwrap_err(), FlowError::StepOverflow(2));
    }

    #[test]
    fn residual_of_exact_line() {
        let f = linear_field();
        let samples: Vec<FlowState> =
            (0..5).map(|k| FlowState { point: vec![c(k as f64), c(2.0 * k as f64)], tau: c(k as f64) }).collect();
        assert!(residual_along(&f, &samples).unwrap() < 1e-12);
        assert_eq!(residual_along(&f, &samples[..2]), Err(FlowError::TooFewSamples));
    }
}
