//! Multivariate gcd over `Q` by recursion on the variables: split off the
//! content with respect to a main variable, then run a primitive
//! pseudo-remainder sequence on the primitive parts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};


use super::{MultiPoly, Rational};

impl MultiPoly {
    /// Greatest common divisor, normalized to an integer-primitive polynomial
    /// with positive leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        let (a, b) = MultiPoly::aligned(self, other);
        gcd_aligned(&a, &b)
    }
}

fn unit_in(p: &MultiPoly) -> MultiPoly {
    MultiPoly::one().with_vars(p.vars()).expect("constant")
}

fn gcd_aligned(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.primitive_part().1;
    }
    if b.is_zero() {
        return a.primitive_part().1;
    }
    if a.is_constant() || b.is_constant() {
        return unit_in(a);
    }
    if a == b {
        return a.primitive_part().1;
    }
    let coprime = (0..a.vars().len()).all(|i| {
        a.degree_at(i) == 0 || b.degree_at(i) == 0 || image_gcd_degree(a, b, i) == Some(0)
    });
    if coprime {
        return unit_in(a);
    }
    if let Some(h) = heuristic_gcd(a, b) {
        return h;
    }
    let Some(x) = (0..a.vars().len()).find(|&i| a.degree_at(i) > 0 || b.degree_at(i) > 0) else {
        return unit_in(a);
    };
    let ca = content(a, x);
    let cb = content(b, x);
    let c = gcd_aligned(&ca, &cb);
    if a.degree_at(x) == 0 || b.degree_at(x) == 0 {
        return c;
    }
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut p, mut q) = if pa.degree_at(x) >= pb.degree_at(x) { (pa, pb) } else { (pb, pa) };
    match image_gcd_degree(&p, &q, x) {
        Some(0) => return c,
        Some(d) if d == q.degree_at(x) && p.div_exact(&q).is_some() => {
            return (&c * &q).primitive_part().1;
        }
        _ => {}
    }
    // subresultant remainder sequence: exact divisions keep coefficients small
    let mut g = MultiPoly::one().with_vars(p.vars()).expect("constant");
    let mut h = g.clone();
    loop {
        let delta = p.degree_at(x) - q.degree_at(x);
        let r = pseudo_remainder(&p, &q, x);
        if r.is_zero() {
            break;
        }
        if r.degree_at(x) == 0 {
            // the primitive parts are coprime in x
            return c;
        }
        let scale = &g * &h.pow(delta);
        p = q;
        q = r.div_exact(&scale).expect("subresultant division is exact");
        g = leading_coefficient_in(&p, x);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
    let g = primitive_in(&q, x);
    (&c * &g).primitive_part().1
}

/// Heuristic gcd: evaluate the main variable at a large integer ξ, take the
/// gcd of the images recursively, and rebuild a candidate from the symmetric
/// ξ-adic digits of its coefficients. A candidate is accepted only when it
/// divides both inputs; for ξ above twice the smaller coefficient norm this
/// makes it the gcd. `None` when six choices of ξ all fail.
fn heuristic_gcd(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    let (_, f) = a.primitive_part();
    let (_, g) = b.primitive_part();
    heuristic_level(&f, &g, 0).map(|h| h.primitive_part().1)
}

/// `f`, `g` nonzero with integer coefficients; variables before `level`
/// have already been evaluated away.
fn heuristic_level(f: &MultiPoly, g: &MultiPoly, level: usize) -> Option<MultiPoly> {
    let (cf, cg) = (integer_content(f), integer_content(g));
    let gc = Rational::from_integer(cf.gcd(&cg));
    let f = f.scale(&Rational::from_integer(cf).recip());
    let g = g.scale(&Rational::from_integer(cg).recip());
    let Some(x) = (level..f.vars().len()).find(|&i| f.degree_at(i) > 0 || g.degree_at(i) > 0) else {
        return Some(MultiPoly::constant(gc).with_vars(f.vars()).expect("constant"));
    };
    let (fn_, gn) = (max_norm(&f), max_norm(&g));
    let bound: BigInt = BigInt::from(2) * (&fn_).min(&gn) + 29;
    let lc_ratio = |n: &BigInt, p: &MultiPoly| n / p.leading_coefficient().numer().abs();
    let mut xi = core::cmp::max(
        core::cmp::min(bound.clone(), BigInt::from(99) * bound.sqrt()),
        BigInt::from(2) * core::cmp::min(lc_ratio(&fn_, &f), lc_ratio(&gn, &g)) + 2,
    );
    for _ in 0..6 {
        let (fx, gx) = (eval_var(&f, x, &xi), eval_var(&g, x, &xi));
        if !fx.is_zero() && !gx.is_zero() {
            if let Some(h) = heuristic_level(&fx, &gx, x + 1) {
                let h = interpolate(&h, x, &xi);
                if !h.is_zero() {
                    let h = h.primitive_part().1;
                    if divides_integral(&h, &f) && divides_integral(&h, &g) {
                        return Some(h.scale(&gc));
                    }
                }
            }
        }
        xi = BigInt::from(73794) * &xi * xi.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

type IntTerms = BTreeMap<(u32, Vec<u32>), BigInt>;

fn int_terms(p: &MultiPoly) -> IntTerms {
    p.terms().map(|(m, c)| ((m.degree(), m.exponents().to_vec()), c.numer().clone())).collect()
}

/// Whether `d` divides `n`, for integer polynomials with `d` primitive: by
/// Gauss's lemma the quotient is then integral, so division runs over `Z`
/// and stops at the first non-integral or non-divisible step.
fn divides_integral(d: &MultiPoly, n: &MultiPoly) -> bool {
    let d = int_terms(d);
    let mut rem = int_terms(n);
    let Some(((_, dm), dc)) = d.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
        return false;
    };
    while let Some(((_, rm), rc)) = rem.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
        if rm.iter().zip(&dm).any(|(a, b)| a < b) {
            return false;
        }
        let (q, r) = rc.div_rem(&dc);
        if !r.is_zero() {
            return false;
        }
        let shift: Vec<u32> = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
        let lift: u32 = shift.iter().sum();
        for ((deg, e), c) in &d {
            let key = (deg + lift, e.iter().zip(&shift).map(|(a, b)| a + b).collect());
            let entry = rem.entry(key).or_default();
            *entry -= c * &q;
            if entry.is_zero() {
                let key = (deg + lift, e.iter().zip(&shift).map(|(a, b)| a + b).collect::<Vec<_>>());
                rem.remove(&key);
            }
        }
    }
    true
}

fn integer_content(p: &MultiPoly) -> BigInt {
    p.coefficients().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
}

fn max_norm(p: &MultiPoly) -> BigInt {
    p.coefficients().map(|c| c.numer().abs()).max().unwrap_or_default()
}

/// `p` with variable `x` set to `xi`.
fn eval_var(p: &MultiPoly, x: usize, xi: &BigInt) -> MultiPoly {
    let mut pows = vec![BigInt::one()];
    for _ in 0..p.degree_at(x) {
        let next = pows.last().expect("nonempty") * xi;
        pows.push(next);
    }
    // coefficients are integers here, so products need no normalisation
    let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut e = m.exponents().to_vec();
        let k = core::mem::take(&mut e[x]) as usize;
        *acc.entry(e).or_default() += c.numer() * &pows[k];
    }
    MultiPoly::from_terms(p.vars(), acc.into_iter().map(|(e, c)| (e, Rational::from_integer(c))))
}

/// Rebuilds a polynomial in `x` from an image at `x = xi`, reading each
/// coefficient as symmetric base-`xi` digits.
fn interpolate(h: &MultiPoly, x: usize, xi: &BigInt) -> MultiPoly {
    let half = xi / BigInt::from(2);
    let mut rest: Vec<(Vec<u32>, BigInt)> = h.terms().map(|(m, c)| (m.exponents().to_vec(), c.numer().clone())).collect();
    let mut out = Vec::new();
    let mut power = 0u32;
    while !rest.is_empty() {
        let mut next = Vec::new();
        for (e, c) in rest {
            let mut d = c.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            let q = (&c - &d) / xi;
            if !d.is_zero() {
                let mut ex = e.clone();
                ex[x] = power;
                out.push((ex, Rational::from_integer(d)));
            }
            if !q.is_zero() {
                next.push((e, q));
            }
        }
        rest = next;
        power += 1;
    }
    MultiPoly::from_terms(h.vars(), out)
}

/// Degree in `x` of the gcd of the univariate images of `p` and `q` modulo
/// a prime, at an integer point for the remaining variables where both
/// leading coefficients survive. The image of `gcd(p, q)` divides the image
/// gcd and keeps its degree there, so this bounds `deg_x gcd(p, q)` from
/// above.
fn image_gcd_degree(p: &MultiPoly, q: &MultiPoly, x: usize) -> Option<u32> {
    let n = p.vars().len();
    for shift in 0..4u64 {
        let point: Vec<u64> = (0..n as u64).map(|i| 2 + 3 * i + 7 * shift).collect();
        let (Some(u), Some(w)) = (image_mod_p(p, x, &point), image_mod_p(q, x, &point)) else {
            continue;
        };
        if u.last() == Some(&0) || w.last() == Some(&0) {
            continue;
        }
        return Some(gcd_degree_mod_p(u, w));
    }
    None
}

/// `2^61 - 1`.
const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

fn rational_mod_p(c: &Rational) -> Option<u64> {
    let pb = BigInt::from(P);
    let to_u64 = |b: &BigInt| -> u64 { b.mod_floor(&pb).iter_u64_digits().next().unwrap_or(0) };
    let d = to_u64(c.denom());
    (d != 0).then(|| mul_mod(to_u64(c.numer()), inv_mod(d)))
}

/// Dense coefficients in `x` (lowest first) of `p` at `point` mod `P`;
/// `None` if a denominator vanishes mod `P`.
fn image_mod_p(p: &MultiPoly, x: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut v = vec![0u64; p.degree_at(x) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = rational_mod_p(c)?;
        for (i, &e) in m.exponents().iter().enumerate() {
            if i != x && e > 0 {
                t = mul_mod(t, pow_mod(point[i], e as u64));
            }
        }
        let k = m.exponents()[x] as usize;
        v[k] = (v[k] + t) % P;
    }
    Some(v)
}

/// Degree of the gcd of two dense polynomials over `Z/P` (lowest degree
/// first, nonzero leading coefficients).
fn gcd_degree_mod_p(mut a: Vec<u64>, mut b: Vec<u64>) -> u32 {
    if a.len() < b.len() {
        core::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), inv);
            let off = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + P - mul_mod(f, bc)) % P;
            }
            a.pop();
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
    (a.len() - 1) as u32
}

/// Content with respect to variable `x`: gcd of the coefficients of the
/// powers of `x`, normalized.
fn content(p: &MultiPoly, x: usize) -> MultiPoly {
    let coeffs = p.coefficients_in(x);
    let mut acc = MultiPoly::zero_in(p.vars());
    for c in coeffs.values() {
        if c.is_constant() {
            return unit_in(p);
        }
    }
    for c in coeffs.values() {
        acc = gcd_aligned(&acc, c);
        if acc.is_constant() {
            return unit_in(p);
        }
    }
    acc
}

fn primitive_in(p: &MultiPoly, x: usize) -> MultiPoly {
    let c = content(p, x);
    p.div_exact(&c).expect("content divides").primitive_part().1
}

fn leading_coefficient_in(p: &MultiPoly, x: usize) -> MultiPoly {
    let d = p.degree_at(x);
    p.coefficients_in(x).remove(&d).unwrap_or_else(|| MultiPoly::zero_in(p.vars()))
}

/// `lc(q)^(deg p - deg q + 1) * p mod q` in the variable `x`.
fn pseudo_remainder(p: &MultiPoly, q: &MultiPoly, x: usize) -> MultiPoly {
    let n = q.degree_at(x);
    let lc = leading_coefficient_in(q, x);
    let mut r = p.clone();
    let mut steps = 0;
    let budget = p.degree_at(x) + 1 - n;
    while !r.is_zero() && r.degree_at(x) >= n {
        let dr = r.degree_at(x);
        let lr = leading_coefficient_in(&r, x);
        let shift = q.monomial_power(x, dr - n);
        r = &(&r * &lc) - &(&(&lr * &shift) * q);
        steps += 1;
    }
    if steps < budget {
        r = &r * &lc.pow(budget - steps);
    }
    r
}
