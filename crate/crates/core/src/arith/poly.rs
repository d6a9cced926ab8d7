use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{denominator_lcm, numerator_gcd, ArithError, Rational};

/// Exponent vector, ordered graded-lexicographically: total degree first,
/// then lexicographically with the first declared variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over `Q` in an ordered list of named variables.
///
/// No zero coefficient is ever stored, so two polynomials over the same
/// variable list are equal iff their term maps are equal. Polynomials over
/// different variable lists are compared after embedding both into the
/// union of their variables.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    /// The zero polynomial over no variables.
    pub fn zero() -> Self {
        MultiPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(Vec::new()), c);
        }
        MultiPoly { vars: Vec::new(), terms }
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    /// The zero polynomial over `vars`.
    pub fn zero_in<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly { vars: vars.iter().map(|v| v.as_ref().to_string()).collect(), terms: BTreeMap::new() }
    }

    /// The single variable `name` as a polynomial over just that variable.
    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![1]), Rational::one());
        MultiPoly { vars: vec![name.to_string()], terms }
    }

    /// The variable `name` as a polynomial over `vars`.
    pub fn var_in<S: AsRef<str>>(vars: &[S], name: &str) -> Result<Self, ArithError> {
        let idx = vars
            .iter()
            .position(|v| v.as_ref() == name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero_in(vars);
        p.terms.insert(Monomial(e), Rational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponent vectors are summed and zeros dropped.
    pub fn from_terms<S: AsRef<str>>(
        vars: &[S],
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Self {
        let mut p = Self::zero_in(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length must match variable count");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub(crate) fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.var_index(name).map_or(0, |i| self.degree_at(i))
    }

    pub(crate) fn degree_at(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Names of variables that actually occur with positive exponent.
    pub fn support_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.degree_at(i) > 0)
            .map(|i| self.vars[i].clone())
            .collect()
    }

    /// Leading term under the graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term().map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Rational> {
        self.terms.values()
    }

    /// Re-expresses `self` over `vars`, which must contain every variable
    /// that occurs in `self`.
    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> Result<Self, ArithError> {
        if vars.len() == self.vars.len() && vars.iter().zip(&self.vars).all(|(a, b)| a.as_ref() == b) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match vars.iter().position(|w| w.as_ref() == v) {
                Some(j) => map.push(Some(j)),
                None if self.degree_at(i) == 0 => map.push(None),
                None => return Err(ArithError::UnknownVariable(v.clone())),
            }
        }
        let mut out = Self::zero_in(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] = x;
                }
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Union of two variable lists: `a`'s order, then `b`'s new names.
    pub(crate) fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut out = a.to_vec();
        for v in b {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Both operands over a common variable list.
    pub(crate) fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let u = Self::union_vars(&a.vars, &b.vars);
        (a.with_vars(&u).expect("union contains a"), b.with_vars(&u).expect("union contains b"))
    }

    fn zip_with(&self, other: &Self, sign: bool) -> Self {
        if self.vars != other.vars {
            let (a, b) = Self::aligned(self, other);
            return a.zip_with(&b, sign);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), if sign { c.clone() } else { -c.clone() });
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            if other.is_constant() {
                return self.scale(&other.constant_value().unwrap());
            }
            if self.is_constant() {
                return other.scale(&self.constant_value().unwrap());
            }
            let (a, b) = Self::aligned(self, other);
            return a.product(&b);
        }
        let mut out = Self::zero_in(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                out.add_term(Monomial(e), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero_in(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one().with_vars(&self.vars).expect("constant");
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to `name`.
    pub fn diff(&self, name: &str) -> Result<Self, ArithError> {
        let idx = self.var_index(name).ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(self.diff_at(idx))
    }

    pub(crate) fn diff_at(&self, idx: usize) -> Self {
        let mut out = Self::zero_in(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k > 0 {
                let mut e = m.0.clone();
                e[idx] -= 1;
                out.add_term(Monomial(e), c * Rational::from_integer(BigInt::from(k)));
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.vars != d.vars {
            let (a, b) = Self::aligned(self, d);
            return a.div_exact(&b);
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let (dm, dc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero_in(&self.vars);
        while let Some((rm, rc)) = rem.leading_term() {
            if !dm.divides(rm) {
                return None;
            }
            let e: Vec<u32> = rm.0.iter().zip(&dm.0).map(|(a, b)| a - b).collect();
            let c = rc / &dc;
            for (m, dcoef) in &d.terms {
                let prod = Monomial(m.0.iter().zip(&e).map(|(a, b)| a + b).collect());
                rem.add_term(prod, -(dcoef * &c));
            }
            quot.terms.insert(Monomial(e), c);
        }
        Some(quot)
    }

    /// Splits `self = unit * primitive` where `primitive` has integer
    /// coefficients with gcd 1 and a positive leading coefficient.
    pub fn primitive_part(&self) -> (Rational, Self) {
        if self.is_zero() {
            return (Rational::one(), self.clone());
        }
        let l = denominator_lcm(self.coefficients());
        let g = numerator_gcd(self.coefficients().map(|c| c * Rational::from_integer(l.clone())).collect::<Vec<_>>().iter());
        let mut unit = Rational::new(g, l);
        if self.leading_coefficient().is_negative() {
            unit = -unit;
        }
        let p = self.scale(&(Rational::one() / &unit));
        (unit, p)
    }

    /// Evaluates at a rational point given in the order of [`Self::vars`].
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes polynomials for variables; unassigned variables stay.
    pub fn compose(&self, assignment: &BTreeMap<String, MultiPoly>) -> Self {
        let mut out = MultiPoly::zero();
        // cache powers per variable
        let mut powers: Vec<Vec<MultiPoly>> = self
            .vars
            .iter()
            .map(|v| {
                let base = assignment.get(v).cloned().unwrap_or_else(|| MultiPoly::var(v));
                vec![MultiPoly::one(), base]
            })
            .collect();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &powers[i][1];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Splits by powers of variable `idx`: map exponent -> coefficient
    /// polynomial (with that variable's exponent zeroed).
    pub(crate) fn coefficients_in(&self, idx: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.0[idx];
            let mut e = m.0.clone();
            e[idx] = 0;
            out.entry(k)
                .or_insert_with(|| Self::zero_in(&self.vars))
                .terms
                .insert(Monomial(e), c.clone());
        }
        out
    }

    /// `x_idx ^ k` over this polynomial's variables.
    pub(crate) fn monomial_power(&self, idx: usize, k: u32) -> Self {
        let mut e = vec![0; self.vars.len()];
        e[idx] = k;
        let mut p = Self::zero_in(&self.vars);
        p.terms.insert(Monomial(e), Rational::one());
        p
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = Self::aligned(self, other);
        a.terms == b.terms
    }
}

impl Eq for MultiPoly {}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                let f: fn(&MultiPoly, &MultiPoly) -> MultiPoly = $body;
                f(self, rhs)
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

poly_binop!(Add, add, |a, b| a.zip_with(b, true));
poly_binop!(Sub, sub, |a, b| a.zip_with(b, false));
poly_binop!(Mul, mul, |a, b| a.product(b));

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn x() -> MultiPoly {
        MultiPoly::var("x")
    }

    #[test]
    fn difference_of_squares() {
        let one = MultiPoly::one();
        let p = &(&x() + &one) * &(&x() - &one);
        let expect = &(&x() * &x()) - &one;
        assert_eq!(p, expect);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = &x() + &MultiPoly::var("y");
        assert_eq!(&p + &MultiPoly::zero(), p);
    }

    #[test]
    fn partial_derivatives() {
        let vars = ["b2", "b4", "b6"];
        let b2 = MultiPoly::var_in(&vars, "b2").unwrap();
        let b4 = MultiPoly::var_in(&vars, "b4").unwrap();
        let b6 = MultiPoly::var_in(&vars, "b6").unwrap();
        let p = &(&b2 * &b6) - &(&b4 * &b4);
        assert_eq!(p.diff("b2").unwrap(), b6);
        assert_eq!(p.diff("b4").unwrap(), b4.scale(&int(-2)));

        let g2 = MultiPoly::var("g2");
        let g3 = MultiPoly::var("g3");
        let d = &g2.pow(3) - &g3.pow(2).scale(&int(27));
        assert_eq!(d.diff("g2").unwrap(), g2.pow(2).scale(&int(3)));
        assert_eq!(d.diff("zz"), Err(ArithError::UnknownVariable("zz".into())));
    }

    #[test]
    fn graded_lex_leading_term() {
        let y = MultiPoly::var("y");
        let p = &(&x() * &x()) + &(&x() * &y);
        let p = p.with_vars(&["x", "y"]).unwrap();
        // x^2 > x*y in grlex with x first
        assert_eq!(p.leading_term().unwrap().0.exponents(), &[2, 0]);
        let q = &p + &y.pow(3);
        assert_eq!(q.leading_term().unwrap().0.exponents(), &[0, 3]);
    }

    #[test]
    fn exact_division() {
        let y = MultiPoly::var("y");
        let a = &x() + &y;
        let b = &x() - &y.scale(&rat(1, 2));
        let p = &a * &b;
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(p.div_exact(&(&x() + &MultiPoly::one())).is_none());
    }

    #[test]
    fn primitive_part_is_integral_and_positive() {
        let p = &x().scale(&rat(-3, 4)) + &MultiPoly::constant(rat(3, 2));
        let (u, pp) = p.primitive_part();
        assert_eq!(u, rat(-3, 4));
        assert_eq!(pp, &x() - &MultiPoly::from_i64(2));
    }

    #[test]
    fn compose_substitutes_polynomials() {
        let mut asg = BTreeMap::new();
        asg.insert("x".to_string(), &MultiPoly::var("t") + &MultiPoly::one());
        let p = x().pow(2);
        let t = MultiPoly::var("t");
        let expect = &(&t * &t) + &(&t.scale(&int(2)) + &MultiPoly::one());
        assert_eq!(p.compose(&asg), expect);
    }
}
