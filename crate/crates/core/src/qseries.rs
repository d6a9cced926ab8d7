//! Truncated power series in `q` with exact rational coefficients, the
//! Eisenstein series `E2, E4, E6`, the derivation `θ = q d/dq`, and residual
//! series for the Ramanujan system and the Chazy equation.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QSeriesError {
    #[error("divisor sums are defined for n >= 1")]
    ZeroIndex,
    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(u32),
    #[error("truncation order must be at least {min}, got {got}")]
    OrderTooSmall { min: usize, got: usize },
    #[error("series inversion needs a unit constant term")]
    NotInvertible,
    #[error("evaluation needs |q| < 1")]
    OutsideDisc,
}

/// Power series known modulo `q^order`: coefficients of `q^0 .. q^(order-1)`.
///
/// Binary operations truncate to the smaller order; nothing is ever padded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedQSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedQSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        TruncatedQSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedQSeries { coeffs: vec![Rational::zero(); order] }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// `q^n` modulo `q^order`.
    pub fn monomial(n: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if n < order {
            s.coeffs[n] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncatedQSeries { coeffs: self.coeffs[..order.min(self.order())].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn first_nonzero_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        TruncatedQSeries { coeffs: (0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        TruncatedQSeries { coeffs: (0..n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedQSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Cauchy product modulo `q^min(order)`. Integer-coefficient operands
    /// take a `BigInt` path that skips per-term rational normalization.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        if self.is_integral() && o.is_integral() {
            let a: Vec<BigInt> = self.coeffs[..n].iter().map(|c| c.to_integer()).collect();
            let b: Vec<BigInt> = o.coeffs[..n].iter().map(|c| c.to_integer()).collect();
            let mut out = vec![BigInt::zero(); n];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b[..n - i].iter().enumerate() {
                    out[i + j] += ai * bj;
                }
            }
            return TruncatedQSeries { coeffs: out.into_iter().map(Rational::from_integer).collect() };
        }
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] += &self.coeffs[i] * &o.coeffs[j];
            }
        }
        TruncatedQSeries { coeffs: out }
    }

    /// `θ = q d/dq`: the coefficient of `q^n` is multiplied by `n`.
    pub fn theta(&self) -> Self {
        TruncatedQSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(n, c)| c * Rational::from_integer(BigInt::from(n))).collect(),
        }
    }

    /// Multiplicative inverse for a series with unit constant term, by
    /// Newton iteration `g <- g (2 - f g)` doubling the precision each step.
    pub fn inverse(&self) -> Result<Self, QSeriesError> {
        let n = self.order();
        if n == 0 || self.coeffs[0].is_zero() {
            return Err(QSeriesError::NotInvertible);
        }
        let mut g = Self::constant(self.coeffs[0].recip(), 1);
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let f = self.truncate(prec);
            let gp = TruncatedQSeries { coeffs: { let mut c = g.coeffs.clone(); c.resize(prec, Rational::zero()); c } };
            let fg = f.mul(&gp);
            let two_minus = Self::constant(Rational::from_integer(BigInt::from(2)), prec).sub(&fg);
            g = gp.mul(&two_minus);
        }
        Ok(g)
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, QSeriesError> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Horner evaluation of the partial sum at complex `q`, `|q| < 1`.
    pub fn evaluate(&self, q: Complex64) -> Result<Evaluation, QSeriesError> {
        let r = q.norm();
        if !(r < 1.0) {
            return Err(QSeriesError::OutsideDisc);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + Complex64::new(rational_to_f64(c), 0.0);
        }
        let growth = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| rational_to_f64(&c.abs()) / Float::powi(n as f64, 7))
            .fold(0.0_f64, Float::max);
        let tail = growth * Float::powi(r, self.order() as i32) / (1.0 - r);
        Ok(Evaluation { value: acc, tail_bound: tail, growth_constant: growth })
    }
}

/// A partial sum and its heuristic tail estimate `C |q|^N / (1 - |q|)`,
/// where `C = max |a_n| / n^7` over the stored coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: f64,
    pub growth_constant: f64,
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `σ_k(n) = Σ_{d | n} d^k`.
pub fn divisor_sigma(k: u32, n: u64) -> Result<BigInt, QSeriesError> {
    if n == 0 {
        return Err(QSeriesError::ZeroIndex);
    }
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(s)
}

/// `σ_k(n)` for all `1 <= n < order` by a divisor sieve; index 0 is 0.
fn sigma_table(k: u32, order: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); order];
    for d in 1..order {
        let p = BigInt::from(d).pow(k);
        let mut m = d;
        while m < order {
            t[m] += &p;
            m += d;
        }
    }
    t
}

/// `E2 = 1 - 24 Σ σ1(n) q^n`, `E4 = 1 + 240 Σ σ3(n) q^n`,
/// `E6 = 1 - 504 Σ σ5(n) q^n`, modulo `q^order`.
pub fn eisenstein(weight: u32, order: usize) -> Result<TruncatedQSeries, QSeriesError> {
    if order < 1 {
        return Err(QSeriesError::OrderTooSmall { min: 1, got: order });
    }
    let (k, c): (u32, i64) = match weight {
        2 => (1, -24),
        4 => (3, 240),
        6 => (5, -504),
        w => return Err(QSeriesError::UnsupportedWeight(w)),
    };
    let c = BigInt::from(c);
    let sig = sigma_table(k, order);
    let mut coeffs: Vec<Rational> = sig.into_iter().map(|s| Rational::from_integer(&c * s)).collect();
    coeffs[0] = Rational::one();
    Ok(TruncatedQSeries { coeffs })
}

fn require_order(order: usize) -> Result<(), QSeriesError> {
    if order < 2 {
        Err(QSeriesError::OrderTooSmall { min: 2, got: order })
    } else {
        Ok(())
    }
}

/// The three Eisenstein series at a common order.
pub fn eisenstein_triple(order: usize) -> Result<[TruncatedQSeries; 3], QSeriesError> {
    Ok([eisenstein(2, order)?, eisenstein(4, order)?, eisenstein(6, order)?])
}

/// Residuals of the Ramanujan system:
/// `θE2 - (E2² - E4)/12`, `θE4 - (E2E4 - E6)/3`, `θE6 - (E2E6 - E4²)/2`.
pub fn verify_ramanujan(order: usize) -> Result<[TruncatedQSeries; 3], QSeriesError> {
    require_order(order)?;
    let [e2, e4, e6] = eisenstein_triple(order)?;
    let r = |n: i64, d: i64| Rational::new(BigInt::from(n), BigInt::from(d));
    let r1 = e2.theta().sub(&e2.mul(&e2).sub(&e4).scale(&r(1, 12)));
    let r2 = e4.theta().sub(&e2.mul(&e4).sub(&e6).scale(&r(1, 3)));
    let r3 = e6.theta().sub(&e2.mul(&e6).sub(&e4.mul(&e4)).scale(&r(1, 2)));
    Ok([r1, r2, r3])
}

/// Residual of the Chazy equation `θ³E2 - E2 θ²E2 + (3/2)(θE2)²`.
pub fn verify_chazy(order: usize) -> Result<TruncatedQSeries, QSeriesError> {
    require_order(order)?;
    let e2 = eisenstein(2, order)?;
    Ok(chazy_residual(&e2))
}

/// Chazy's expression applied to an arbitrary series.
pub fn chazy_residual(f: &TruncatedQSeries) -> TruncatedQSeries {
    let t1 = f.theta();
    let t2 = t1.theta();
    let t3 = t2.theta();
    let three_halves = Rational::new(BigInt::from(3), BigInt::from(2));
    t3.sub(&f.mul(&t2)).add(&t1.mul(&t1).scale(&three_halves))
}

/// `(E2, θE2/2, θ²E2/6)`: the integral curve of the Chazy field in the
/// `(b2, b4, b6)` coordinates.
pub fn chazy_triple(order: usize) -> Result<[TruncatedQSeries; 3], QSeriesError> {
    require_order(order)?;
    let e2 = eisenstein(2, order)?;
    let t1 = e2.theta();
    let t2 = t1.theta();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let sixth = Rational::new(BigInt::one(), BigInt::from(6));
    Ok([e2, t1.scale(&half), t2.scale(&sixth)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn sigma_values() {
        assert_eq!(divisor_sigma(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(divisor_sigma(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(divisor_sigma(5, 4).unwrap(), BigInt::from(1057));
        assert_eq!(divisor_sigma(0, 12).unwrap(), BigInt::from(6));
        assert_eq!(divisor_sigma(2, 0), Err(QSeriesError::ZeroIndex));
    }

    #[test]
    fn sieve_matches_direct_sigma() {
        let t = sigma_table(3, 60);
        for (n, v) in t.iter().enumerate().skip(1) {
            assert_eq!(v, &divisor_sigma(3, n as u64).unwrap());
        }
    }

    #[test]
    fn eisenstein_low_coefficients() {
        assert_eq!(eisenstein(2, 5).unwrap().coeff(1), &int(-24));
        assert_eq!(eisenstein(4, 5).unwrap().coeff(2), &int(2160));
        assert_eq!(eisenstein(6, 5).unwrap().coeff(0), &int(1));
        assert_eq!(eisenstein(8, 5), Err(QSeriesError::UnsupportedWeight(8)));
        assert!(matches!(eisenstein(2, 0), Err(QSeriesError::OrderTooSmall { .. })));
    }

    #[test]
    fn theta_basics() {
        let one = TruncatedQSeries::constant(int(1), 8);
        assert!(one.theta().is_zero());
        let q5 = TruncatedQSeries::monomial(5, 8);
        assert_eq!(q5.theta(), q5.scale(&int(5)));
        assert_eq!(eisenstein(2, 4).unwrap().theta().coeff(1), &int(-24));
    }

    #[test]
    fn orders_take_the_minimum() {
        let a = eisenstein(4, 10).unwrap();
        let b = eisenstein(6, 7).unwrap();
        assert_eq!(a.add(&b).order(), 7);
        assert_eq!(a.mul(&b).order(), 7);
        assert_eq!(b.sub(&a).order(), 7);
    }

    #[test]
    fn low_order_residuals_by_hand() {
        let [r1, _, _] = verify_ramanujan(3).unwrap();
        // q^0: 0 - (1 - 1)/12 ; q^1: -24 - (-48 - 240)/12
        assert_eq!(r1.coeff(0), &int(0));
        assert_eq!(r1.coeff(1), &int(0));
        assert!(matches!(verify_ramanujan(1), Err(QSeriesError::OrderTooSmall { min: 2, got: 1 })));
        assert!(verify_chazy(3).unwrap().is_zero());
    }

    #[test]
    fn chazy_triple_components() {
        let [b2, b4, b6] = chazy_triple(10).unwrap();
        assert_eq!(b2, eisenstein(2, 10).unwrap());
        assert_eq!(b4.coeff(1), &int(-12));
        assert_eq!(b2.theta(), b4.scale(&int(2)));
        assert_eq!(b4.theta(), b6.scale(&int(3)));
    }

    #[test]
    fn inverse_by_newton() {
        let e4 = eisenstein(4, 30).unwrap();
        let inv = e4.inverse().unwrap();
        assert_eq!(e4.mul(&inv), TruncatedQSeries::constant(int(1), 30));
        let half = TruncatedQSeries::constant(rat(1, 2), 4).add(&TruncatedQSeries::monomial(1, 4));
        assert_eq!(half.mul(&half.inverse().unwrap()), TruncatedQSeries::constant(int(1), 4));
        assert_eq!(TruncatedQSeries::monomial(1, 4).inverse(), Err(QSeriesError::NotInvertible));
    }

    #[test]
    fn evaluation() {
        let one = TruncatedQSeries::constant(int(1), 5);
        assert_eq!(one.evaluate(Complex64::new(0.3, 0.4)).unwrap().value, Complex64::new(1.0, 0.0));
        let e4 = eisenstein(4, 20).unwrap();
        assert_eq!(e4.evaluate(Complex64::new(0.0, 0.0)).unwrap().value, Complex64::new(1.0, 0.0));
        assert_eq!(e4.evaluate(Complex64::new(1.0, 0.0)), Err(QSeriesError::OutsideDisc));
        let e2 = eisenstein(2, 32).unwrap();
        let lo = e2.evaluate(Complex64::new(0.01, 0.0)).unwrap();
        let hi = eisenstein(2, 64).unwrap().evaluate(Complex64::new(0.01, 0.0)).unwrap();
        assert!((lo.value - hi.value).norm() < 1e-12);
        assert!(lo.tail_bound >= 0.0 && lo.tail_bound < 1e-40);
    }
}
