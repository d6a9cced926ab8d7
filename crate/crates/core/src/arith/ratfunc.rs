use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{ArithError, MultiPoly, Rational};

/// Quotient of two polynomials in lowest terms.
///
/// Canonical form: `gcd(num, den)` is constant and `den` has integer
/// coefficients with content 1 and a positive leading coefficient. Both
/// parts are kept over the same variable list.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: MultiPoly::zero(), den: MultiPoly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: MultiPoly::one(), den: MultiPoly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc { num: MultiPoly::constant(c), den: MultiPoly::one() }
    }

    pub fn from_i64(c: i64) -> Self {
        Self::from_poly(MultiPoly::from_i64(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(MultiPoly::var(name))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one().with_vars(p.vars()).expect("constant");
        RatFunc { num: p, den }
    }

    /// `num / den`, reduced. Errors when `den` is the zero polynomial.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Self {
        let (num, den) = MultiPoly::aligned(&num, &den);
        if num.is_zero() {
            let one = MultiPoly::one().with_vars(den.vars()).expect("constant");
            return RatFunc { num, den: one };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        let (unit, den) = den.primitive_part();
        let num = num.scale(&(Rational::one() / unit));
        RatFunc { num, den }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &[String] {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.constant_value().is_some_and(|c| c.is_one())
    }

    /// True when the reduced denominator is constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial this function equals, if any.
    pub fn as_polynomial(&self) -> Option<MultiPoly> {
        self.den.constant_value().map(|c| self.num.scale(&(Rational::one() / c)))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> Result<Self, ArithError> {
        Ok(RatFunc { num: self.num.with_vars(vars)?, den: self.den.with_vars(vars)? })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::reduce(&self.num * &other.den, &self.den * &other.num))
    }

    pub fn pow(&self, n: u32) -> Self {
        RatFunc { num: self.num.pow(n), den: self.den.pow(n) }
    }

    /// Formal partial derivative (quotient rule). Differentiating by a
    /// variable that does not occur gives zero.
    pub fn diff(&self, name: &str) -> Self {
        let Some(idx) = self.num.var_index(name) else {
            return Self::zero();
        };
        let dn = self.num.diff_at(idx);
        if self.den.is_constant() {
            return RatFunc { num: dn, den: self.den.clone() };
        }
        let dd = self.den.diff_at(idx);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(num, &self.den * &self.den)
    }

    /// Substitutes a rational function for every variable.
    ///
    /// Every variable of `self` (including ones that only appear with
    /// exponent zero) must be assigned.
    pub fn substitute(&self, assignment: &BTreeMap<String, RatFunc>) -> Result<Self, ArithError> {
        for v in self.vars() {
            if !assignment.contains_key(v) {
                return Err(ArithError::UnassignedVariable(v.clone()));
            }
        }
        let n = substitute_poly(&self.num, assignment);
        let d = substitute_poly(&self.den, assignment);
        if d.is_zero() {
            return Err(ArithError::DegenerateSubstitution);
        }
        n.try_div(&d)
    }

    /// Evaluates at a rational point (in the order of [`Self::vars`]);
    /// `None` if the denominator vanishes there.
    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(point) / d)
        }
    }

    /// True when every coefficient of the (integer-primitive) denominator
    /// and of the numerator has denominator supported on `primes`, after
    /// dividing through by the denominator's leading coefficient.
    pub fn coefficient_support_within(&self, primes: &[u64]) -> bool {
        self.num.coefficients().chain(self.den.coefficients()).all(|c| super::prime_support_within(c, primes))
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        let rhs = if sign { other.num.clone() } else { -&other.num };
        if self.den == other.den {
            return Self::reduce(&self.num + &rhs, self.den.clone());
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RatFunc { num: rhs, den: other.den.clone() };
        }
        Self::reduce(&(&self.num * &other.den) + &(&rhs * &self.den), &self.den * &other.den)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() && other.den.is_constant() {
            return Self::reduce(&self.num * &other.num, &self.den * &other.den);
        }
        // cross-cancel before multiplying to keep the gcd small
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let (unit, den) = (&d1 * &d2).primitive_part();
        let num = (&n1 * &n2).scale(&(Rational::one() / unit));
        let (num, den) = MultiPoly::aligned(&num, &den);
        RatFunc { num, den }
    }
}

fn substitute_poly(p: &MultiPoly, assignment: &BTreeMap<String, RatFunc>) -> RatFunc {
    // If every image is polynomial, stay in the polynomial ring.
    if p.vars().iter().all(|v| assignment[v].is_polynomial()) {
        let polys: BTreeMap<String, MultiPoly> = p
            .vars()
            .iter()
            .map(|v| (v.clone(), assignment[v].as_polynomial().expect("polynomial")))
            .collect();
        return RatFunc::from_poly(p.compose(&polys));
    }
    // clear denominators once: p(n/d) = Σ c Π n_i^e_i d_i^(deg_i - e_i) / Π d_i^deg_i,
    // with constant denominators folded into the numerators
    let images: Vec<(MultiPoly, Option<MultiPoly>)> = p
        .vars()
        .iter()
        .map(|v| {
            let r = &assignment[v];
            match r.den.constant_value() {
                Some(c) => (r.num.scale(&(Rational::one() / c)), None),
                None => (r.num.clone(), Some(r.den.clone())),
            }
        })
        .collect();
    let degs: Vec<u32> = (0..images.len()).map(|i| p.degree_at(i)).collect();
    let power = |table: &mut Vec<MultiPoly>, k: usize| -> MultiPoly {
        while table.len() <= k {
            let next = &table[table.len() - 1] * &table[1];
            table.push(next);
        }
        table[k].clone()
    };
    let mut num_pows: Vec<Vec<MultiPoly>> = images.iter().map(|(n, _)| alloc::vec![MultiPoly::one(), n.clone()]).collect();
    let mut den_pows: Vec<Vec<MultiPoly>> = images
        .iter()
        .map(|(_, d)| alloc::vec![MultiPoly::one(), d.clone().unwrap_or_else(MultiPoly::one)])
        .collect();
    let mut num = MultiPoly::zero();
    for (m, c) in p.terms() {
        let mut t = MultiPoly::constant(c.clone());
        for (i, &k) in m.exponents().iter().enumerate() {
            if k > 0 {
                t = &t * &power(&mut num_pows[i], k as usize);
            }
            let rest = (degs[i] - k) as usize;
            if rest > 0 && images[i].1.is_some() {
                t = &t * &power(&mut den_pows[i], rest);
            }
        }
        num = &num + &t;
    }
    let mut den = MultiPoly::one();
    for (i, &d) in degs.iter().enumerate() {
        if d > 0 && images[i].1.is_some() {
            den = &den * &power(&mut den_pows[i], d as usize);
        }
    }
    RatFunc::reduce(num, den)
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFunc {}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        Self::from_poly(p)
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! ratfunc_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                let f: fn(&RatFunc, &RatFunc) -> RatFunc = $body;
                f(self, rhs)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                (&self).$method(rhs)
            }
        }
    };
}

ratfunc_binop!(Add, add, |a, b| a.add_impl(b, true));
ratfunc_binop!(Sub, sub, |a, b| a.add_impl(b, false));
ratfunc_binop!(Mul, mul, |a, b| a.mul_impl(b));

/// Identity assignment `v -> v` for each name, handy for passing parameters
/// through [`RatFunc::substitute`].
pub fn identity_assignment<S: AsRef<str>>(vars: &[S]) -> BTreeMap<String, RatFunc> {
    vars.iter().map(|v| (v.as_ref().to_string(), RatFunc::var(v.as_ref()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn x() -> RatFunc {
        RatFunc::var("x")
    }
    fn y() -> RatFunc {
        RatFunc::var("y")
    }

    #[test]
    fn delta_inverse_times_delta() {
        let g2 = RatFunc::var("g2");
        let g3 = RatFunc::var("g3");
        let delta = &g2.pow(3) - &g3.pow(2).scale(&int(27));
        let inv = delta.inv().unwrap();
        assert!((&inv * &delta).is_one());
    }

    #[test]
    fn self_difference_and_quotient() {
        let a = x().try_div(&y()).unwrap();
        assert!((&a - &a).is_zero());
        assert!(a.try_div(&a).unwrap().is_one());
        assert_eq!(a.try_div(&RatFunc::zero()), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn reduction_cancels_common_factors() {
        let num = &x().pow(2) - &y().pow(2);
        let den = &x() + &y();
        let q = num.try_div(&den).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, &x() - &y());
    }

    #[test]
    fn denominator_normalized_positive_primitive() {
        let q = RatFunc::one().try_div(&(&x().scale(&rat(-2, 3)) + &RatFunc::from_i64(4))).unwrap();
        // 1/(-2/3 x + 4) = (-3/2)/(x - 6)
        assert_eq!(q.denom(), &(&MultiPoly::var("x") - &MultiPoly::from_i64(6)));
        assert_eq!(q.numer().constant_value(), Some(rat(-3, 2)));
    }

    #[test]
    fn quotient_rule() {
        let f = RatFunc::one().try_div(&x()).unwrap();
        let d = f.diff("x");
        assert_eq!(d, (-&RatFunc::one()).try_div(&x().pow(2)).unwrap());
        assert!(f.diff("y").is_zero());
    }

    #[test]
    fn identity_substitution() {
        let p = (&x().pow(2) + &y()).try_div(&(&x() - &y())).unwrap();
        let asg = identity_assignment(p.vars());
        assert_eq!(p.substitute(&asg).unwrap(), p);
    }

    #[test]
    fn substitution_errors() {
        let p = RatFunc::one().try_div(&x()).unwrap();
        let mut asg = BTreeMap::new();
        assert_eq!(p.substitute(&asg), Err(ArithError::UnassignedVariable("x".into())));
        asg.insert("x".into(), RatFunc::zero());
        assert_eq!(p.substitute(&asg), Err(ArithError::DegenerateSubstitution));
    }
}
