//! Built-in elliptic charts and the morphisms between them.
//!
//! * `weierstrass`: `y² = 4x³ - g2 x - g3` over `(g2, g3)`.
//! * `e`: the family over `(e2, e4, e6)`, mapping to `weierstrass` by
//!   `(g2, g3) = (e4/12, -e6/216)` and `x ↦ x + e2/12`.
//! * `b`: the universal family over `(b2, b4, b6)`, mapping to `e` by
//!   `(e2, e4, e6) = (b2, b2² - 24b4, b2³ - 36b2b4 + 216b6)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{pullback_connection, ChartMorphism, ConnectionChart, EntryDiff, GaussManinError, RMatrix};
use crate::arith::text::{parse_poly, parse_ratfunc};
use crate::arith::{rat, RatFunc};

/// Source text of the printed connection matrices.
pub const PRINTED_CONNECTIONS: &str = include_str!("../../data/printed_connections.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinChart {
    Weierstrass,
    E,
    B,
}

impl BuiltinChart {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinChart::Weierstrass => "weierstrass",
            BuiltinChart::E => "e",
            BuiltinChart::B => "b",
        }
    }
}

struct Block {
    name: String,
    coords: Vec<String>,
    delta: Option<String>,
    terms: Vec<(usize, usize, String, String)>,
    copies: Vec<(usize, usize, bool, usize, usize)>,
}

fn entry_index(tok: &str, n: usize, line: usize) -> Result<(usize, usize), GaussManinError> {
    let bad = || GaussManinError::Data { line, msg: format!("bad entry name `{tok}`") };
    let digits = tok.strip_prefix('O').ok_or_else(bad)?;
    let b = digits.as_bytes();
    if b.len() != 2 {
        return Err(bad());
    }
    let (i, j) = ((b[0] as char).to_digit(10).ok_or_else(bad)?, (b[1] as char).to_digit(10).ok_or_else(bad)?);
    let (i, j) = (i as usize, j as usize);
    if i == 0 || j == 0 || i > n || j > n {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

/// Parses chart blocks (genus one, `2 x 2` matrices) from `text`.
pub fn parse_charts(text: &str) -> Result<Vec<ConnectionChart>, GaussManinError> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let err = |msg: &str| GaussManinError::Data { line, msg: msg.to_string() };
        let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match (head, cur.as_mut()) {
            ("chart", None) => {
                cur = Some(Block { name: rest.to_string(), coords: Vec::new(), delta: None, terms: Vec::new(), copies: Vec::new() })
            }
            ("chart", Some(_)) => return Err(err("nested chart")),
            ("coords", Some(b)) => b.coords = rest.split_whitespace().map(str::to_string).collect(),
            ("delta", Some(b)) => b.delta = Some(rest.to_string()),
            ("end", Some(_)) => {
                let b = cur.take().expect("open block");
                out.push(build_block(b, line)?);
            }
            (h, Some(b)) if h.starts_with('O') => {
                let (i, j) = entry_index(h, 2, line)?;
                if let Some(src) = rest.strip_prefix('=') {
                    let src = src.trim();
                    let (neg, name) = match src.strip_prefix('-') {
                        Some(s) => (true, s.trim()),
                        None => (false, src),
                    };
                    let (si, sj) = entry_index(name, 2, line)?;
                    b.copies.push((i, j, neg, si, sj));
                } else {
                    let (d, expr) = rest.split_once(':').ok_or_else(|| err("expected `d<coord> : expr`"))?;
                    let coord = d.trim().strip_prefix('d').ok_or_else(|| err("expected a differential"))?;
                    b.terms.push((i, j, coord.to_string(), expr.trim().to_string()));
                }
            }
            (_, None) => return Err(err("directive outside a chart block")),
            _ => return Err(err("unknown directive")),
        }
    }
    if cur.is_some() {
        return Err(GaussManinError::Data { line: text.lines().count(), msg: "unterminated chart block".into() });
    }
    Ok(out)
}

fn build_block(b: Block, line: usize) -> Result<ConnectionChart, GaussManinError> {
    let err = |msg: String| GaussManinError::Data { line, msg };
    let delta_src = b.delta.ok_or_else(|| err("missing delta".into()))?;
    let delta = parse_poly(&delta_src, &b.coords)?;
    let inv_delta = RatFunc::from_poly(delta.clone()).inv()?;
    let mut mats: Vec<RMatrix> = b.coords.iter().map(|_| RMatrix::zeros(2, 2)).collect();
    for (i, j, coord, expr) in &b.terms {
        let k = b.coords.iter().position(|c| c == coord).ok_or_else(|| err(format!("unknown differential d{coord}")))?;
        let v = parse_ratfunc(expr, &b.coords)?;
        let cur = mats[k][(*i, *j)].clone();
        mats[k] = set(&mats[k], *i, *j, &cur + &(&v * &inv_delta));
    }
    for &(i, j, neg, si, sj) in &b.copies {
        for m in mats.iter_mut() {
            let v = m[(si, sj)].clone();
            *m = set(m, i, j, if neg { -v } else { v });
        }
    }
    ConnectionChart::new(&b.name, &b.coords, delta, mats)
}

fn set(m: &RMatrix, i: usize, j: usize, v: RatFunc) -> RMatrix {
    RMatrix::from_fn(m.rows(), m.cols(), |a, c| if (a, c) == (i, j) { v.clone() } else { m[(a, c)].clone() })
}

/// The chart as printed in the data file.
pub fn printed_chart(which: BuiltinChart) -> ConnectionChart {
    parse_charts(PRINTED_CONNECTIONS)
        .expect("built-in data parses")
        .into_iter()
        .find(|c| c.name() == which.name())
        .expect("built-in chart present")
}

fn rfs(src: &str, vars: &[&str]) -> RatFunc {
    parse_ratfunc(src, vars).expect("built-in expression")
}

const E: [&str; 3] = ["e2", "e4", "e6"];
const B: [&str; 3] = ["b2", "b4", "b6"];

/// `e -> weierstrass`. The frame `(dx/y, x dx/y)` of the target pulls back
/// to `(ω, η + (e2/12) ω)`, so the new frame is the old one times
/// `[[1, -e2/12], [0, 1]]`.
pub fn morphism_e_to_weierstrass() -> ChartMorphism {
    let mut map = BTreeMap::new();
    map.insert("g2".to_string(), rfs("e4/12", &E));
    map.insert("g3".to_string(), rfs("-e6/216", &E));
    let p = RMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => rfs("e2", &E).scale(&rat(-1, 12)),
        (0, 0) | (1, 1) => RatFunc::one(),
        _ => RatFunc::zero(),
    });
    let delta = parse_poly("e4^3 - e6^2", &E).expect("delta");
    ChartMorphism::new("e", &E, delta, map, p).expect("well formed")
}

/// `b -> e`. With `Φ(x, y) = (x, 2y)` the frame `(dx/y, x dx/y)` pulls
/// back to `(dx/2y, x dx/2y)`, which is the frame of the `b` chart.
pub fn morphism_b_to_e() -> ChartMorphism {
    let mut map = BTreeMap::new();
    map.insert("e2".to_string(), rfs("b2", &B));
    map.insert("e4".to_string(), rfs("b2^2 - 24*b4", &B));
    map.insert("e6".to_string(), rfs("b2^3 - 36*b2*b4 + 216*b6", &B));
    let delta = printed_chart(BuiltinChart::B).delta().clone();
    ChartMorphism::new("b", &B, delta, map, RMatrix::identity(2)).expect("well formed")
}

/// The `e` chart recomputed from the Weierstrass chart.
pub fn derived_e_chart() -> Result<ConnectionChart, GaussManinError> {
    pullback_connection(&printed_chart(BuiltinChart::Weierstrass), &morphism_e_to_weierstrass())
}

/// The `b` chart recomputed from the printed `e` chart.
pub fn derived_b_chart() -> Result<ConnectionChart, GaussManinError> {
    pullback_connection(&printed_chart(BuiltinChart::E), &morphism_b_to_e())
}

/// Printed and recomputed versions of a chart, with their differences.
#[derive(Clone, Debug)]
pub struct Rederivation {
    pub as_printed: ConnectionChart,
    pub derived: ConnectionChart,
    pub diff: Vec<EntryDiff>,
}

pub fn rederive(which: BuiltinChart) -> Result<Rederivation, GaussManinError> {
    let derived = match which {
        BuiltinChart::E => derived_e_chart()?,
        BuiltinChart::B => derived_b_chart()?,
        BuiltinChart::Weierstrass => return Err(GaussManinError::UnknownChart("weierstrass has no source chart".into())),
    };
    let as_printed = printed_chart(which);
    let diff = as_printed.diff(&derived)?;
    Ok(Rederivation { as_printed, derived, diff })
}

/// The chart used downstream: printed data, except for `b`, whose printed
/// matrices are replaced by the recomputed ones.
pub fn builtin_chart(which: BuiltinChart) -> ConnectionChart {
    match which {
        BuiltinChart::B => derived_b_chart().expect("built-in pullback"),
        w => printed_chart(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::text::parse_poly;
    use crate::vector_field::PolyVectorField;

    #[test]
    fn printed_entries() {
        let w = printed_chart(BuiltinChart::Weierstrass);
        let d = RatFunc::from_poly(w.delta().clone());
        assert_eq!(&w.matrix("g3").unwrap()[(1, 0)] * &d, rfs("3*g2", &["g2", "g3"]));
        assert_eq!(&w.matrix("g2").unwrap()[(1, 0)] * &d, rfs("-9/2*g3", &["g2", "g3"]));
        let e = printed_chart(BuiltinChart::E);
        assert_eq!(e.delta(), &parse_poly("e4^3 - e6^2", &E).unwrap());
        let d = RatFunc::from_poly(e.delta().clone());
        assert_eq!(&e.matrix("e4").unwrap()[(1, 0)] * &d, rfs("3*e6", &E));
        assert_eq!(&e.matrix("e6").unwrap()[(1, 0)] * &d, rfs("-2*e4", &E));
    }

    #[test]
    fn printed_b_chart_has_no_db4_in_first_row() {
        let b = printed_chart(BuiltinChart::B);
        let m = b.matrix("b4").unwrap();
        assert!(m[(0, 0)].is_zero() && m[(0, 1)].is_zero());
    }

    #[test]
    fn identity_pullback() {
        let e = printed_chart(BuiltinChart::E);
        let back = pullback_connection(&e, &ChartMorphism::identity(&e)).unwrap();
        assert!(back.same_connection(&e));
    }

    #[test]
    fn e_chart_rederives_exactly() {
        let r = rederive(BuiltinChart::E).unwrap();
        assert!(r.diff.is_empty(), "{:?}", r.diff);
    }

    #[test]
    fn coordinate_field_selects_column() {
        let w = printed_chart(BuiltinChart::Weierstrass);
        let dg2 = PolyVectorField::coordinate(w.coords(), "g2").unwrap();
        assert_eq!(&w.contract(&dg2).unwrap(), w.matrix("g2").unwrap());
        let dg3 = PolyVectorField::coordinate(w.coords(), "g3").unwrap();
        let k = w.kodaira_spencer(&dg3).unwrap();
        assert_eq!(k[(0, 0)], rfs("3*g2/(g2^3 - 27*g3^2)", &["g2", "g3"]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_charts("coords x"), Err(GaussManinError::Data { line: 1, .. })));
        assert!(matches!(parse_charts("chart a\ncoords x\ndelta x\nO13 dx : 1\nend"), Err(GaussManinError::Data { .. })));
        assert!(matches!(parse_charts("chart a\ncoords x\ndelta x\nO11 dy : 1\nend"), Err(GaussManinError::Data { .. })));
        assert!(matches!(parse_charts("chart a\ncoords x\ndelta x\n"), Err(GaussManinError::Data { .. })));
    }
}
