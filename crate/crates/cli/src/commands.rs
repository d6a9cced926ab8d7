//! One function per subcommand, each returning a filled-in report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use ramanujan_core::flow::{integrate, series_point, CompiledField, FlowOutcome, FlowState, IntegrateOptions};
use ramanujan_core::formal::{self, formal_check, Tally};
use ramanujan_core::gauss_manin::builtin::{derived_b_chart, printed_chart, rederive, BuiltinChart};
use ramanujan_core::gauss_manin::{ConnectionChart, RMatrix};
use ramanujan_core::qseries::{chazy_triple, eisenstein, eisenstein_triple, verify_chazy, verify_ramanujan, QSeriesError};
use ramanujan_core::symplectic::selftest::{run_property, selftest, Property, PropertyOutcome};
use ramanujan_core::vector_field::{
    b_scaling_iso, b_to_e_iso, ramanujan_field, solve_higher_ramanujan, PolyVectorField, RamanujanChart,
};
use ramanujan_core::RatFunc;

use crate::report::Report;

/// Errors that abort a subcommand before any report exists (exit code 2).
#[derive(Debug)]
pub struct Precondition(pub String);

impl std::fmt::Display for Precondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn pre(e: impl std::fmt::Display) -> Precondition {
    Precondition(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Chart {
    E,
    B,
}

impl Chart {
    fn name(self) -> &'static str {
        match self {
            Chart::E => "e",
            Chart::B => "b",
        }
    }

    fn field_chart(self) -> RamanujanChart {
        match self {
            Chart::E => RamanujanChart::E,
            Chart::B => RamanujanChart::B,
        }
    }

    fn builtin(self) -> BuiltinChart {
        match self {
            Chart::E => BuiltinChart::E,
            Chart::B => BuiltinChart::B,
        }
    }

    /// The connection used downstream: the printed e-chart, the rederived b-chart.
    fn connection(self) -> Result<ConnectionChart, Precondition> {
        match self {
            Chart::E => Ok(printed_chart(BuiltinChart::E)),
            Chart::B => derived_b_chart().map_err(pre),
        }
    }
}

fn lowering() -> RMatrix {
    RMatrix::from_fn(2, 2, |i, j| if (i, j) == (1, 0) { RatFunc::one() } else { RatFunc::zero() })
}

fn matrix_text(m: &RMatrix) -> Value {
    let rows: Vec<Value> =
        (0..m.rows()).map(|i| Value::from((0..m.cols()).map(|j| m[(i, j)].to_string()).collect::<Vec<_>>())).collect();
    Value::from(rows)
}

fn chart_text(c: &ConnectionChart) -> Value {
    let matrices: Map<String, Value> =
        c.coords().iter().zip(c.matrices()).map(|(x, m)| (format!("d{x}"), matrix_text(m))).collect();
    json!({ "name": c.name(), "coords": c.coords(), "delta": c.delta().to_string(), "matrices": matrices })
}

fn field_text(v: &PolyVectorField) -> Value {
    let comps: Map<String, Value> =
        v.coords().iter().zip(v.coeffs()).map(|(x, f)| (x.clone(), Value::from(f.to_string()))).collect();
    Value::Object(comps)
}

fn field_line(v: &PolyVectorField) -> String {
    v.coords().iter().zip(v.coeffs()).map(|(x, f)| format!("({f}) d/d{x}")).collect::<Vec<_>>().join(" + ")
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn verify_qseries(order: usize) -> Result<Report, Precondition> {
    let mut rep = Report::new("verify-qseries", json!({ "order": order }));
    let residuals = verify_ramanujan(order).map_err(pre)?;
    let chazy = verify_chazy(order).map_err(pre)?;
    // The second and third equations also circulate with left-hand sides
    // labelled θE3 and θE4; `printed_lhs` keeps that labelling next to ours.
    let equations = [
        ("theta_E2", "θE2 = (E2² − E4)/12", "θE2"),
        ("theta_E4", "θE4 = (E2E4 − E6)/3", "θE3"),
        ("theta_E6", "θE6 = (E2E6 − E4²)/2", "θE4"),
    ];
    let mut data = Vec::new();
    for ((key, eq, printed_lhs), r) in equations.iter().zip(&residuals) {
        let first = r.first_nonzero_index();
        rep.check(format!("ramanujan_{key}"), r.is_zero(), format!("residual modulo q^{order}"));
        data.push(json!({
            "equation": eq,
            "printed_lhs": printed_lhs,
            "order": order,
            "residual_zero": r.is_zero(),
            "first_nonzero_index": first,
        }));
    }
    rep.check("chazy", chazy.is_zero(), format!("residual modulo q^{order}"));
    data.push(json!({
        "equation": "θ³E2 − E2 θ²E2 + (3/2)(θE2)² = 0",
        "order": order,
        "residual_zero": chazy.is_zero(),
        "first_nonzero_index": chazy.first_nonzero_index(),
    }));
    for w in [2, 4, 6] {
        let e = eisenstein(w, order).map_err(pre)?;
        rep.check(format!("E{w}_integral"), e.is_integral(), format!("coefficients below q^{order}"));
    }
    rep.data = json!({ "equations": data });
    Ok(rep)
}

fn outcome_json(o: &PropertyOutcome) -> Value {
    json!({ "property": o.property.name(), "g": o.g, "passed": o.passed, "failed": o.failed })
}

pub fn symplectic_selftest(g: usize, trials: usize, seed: u64) -> Result<Report, Precondition> {
    if g == 0 || trials == 0 {
        return Err(Precondition("--g and --trials must be at least 1".into()));
    }
    let mut rep = Report::new("symplectic-selftest", json!({ "g": g, "trials": trials, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for genus in 1..=g {
        for o in selftest(genus, trials, &mut rng) {
            rep.check(format!("{}/g={genus}", o.property.name()), o.ok(), format!("{} of {} trials", o.passed, trials));
            rows.push(outcome_json(&o));
        }
    }
    rep.data = json!({ "outcomes": rows });
    Ok(rep)
}

/// Invariants every rederived chart must satisfy.
fn chart_invariants(rep: &mut Report, prefix: &str, c: &ConnectionChart, chart: Chart) -> Result<(), Precondition> {
    let v = ramanujan_field(chart.field_chart());
    let contract = c.contract(&v).map_err(pre)?;
    rep.check(format!("{prefix}contract_is_lowering"), contract == lowering(), "∇_v(ω, η) = (η, 0)");
    let ks = c.kodaira_spencer(&v).map_err(pre)?;
    rep.check(format!("{prefix}kodaira_spencer_unit"), ks == RMatrix::identity(1), "");
    let traceless = c.matrices().iter().all(|m| m[(1, 1)] == -m[(0, 0)].clone());
    rep.check(format!("{prefix}omega22_is_minus_omega11"), traceless, "");
    let symp = c.symplectic_compatibility();
    let bad: Vec<&str> = symp.iter().filter(|(_, ok)| !ok).map(|(x, _)| x.as_str()).collect();
    rep.check(format!("{prefix}symplectic"), bad.is_empty(), if bad.is_empty() { String::new() } else { bad.join(",") });
    rep.check(format!("{prefix}flat"), c.is_flat(), "");
    let primes: &[u64] = if chart == Chart::B { &[2] } else { &[2, 3] };
    rep.check(format!("{prefix}integral"), c.integral_over(primes), format!("denominators supported on {primes:?}"));
    Ok(())
}

pub fn rederive_connection(chart: Chart) -> Result<Report, Precondition> {
    let mut rep = Report::new("rederive-connection", json!({ "chart": chart.name() }));
    let r = rederive(chart.builtin()).map_err(pre)?;
    chart_invariants(&mut rep, "derived_", &r.derived, chart)?;
    if chart == Chart::E {
        rep.check("derived_equals_printed", r.diff.is_empty(), format!("{} differing entries", r.diff.len()));
    }
    let diff: Vec<Value> = r
        .diff
        .iter()
        .map(|d| {
            json!({
                "coord": d.coord,
                "entry": format!("O{}{}", d.i + 1, d.j + 1),
                "printed": d.left.to_string(),
                "derived": d.right.to_string(),
            })
        })
        .collect();
    if !r.diff.is_empty() {
        rep.note(format!("printed entries differing from the rederived {}-chart:", chart.name()));
        for d in &r.diff {
            rep.note(format!("  d{} O{}{}", d.coord, d.i + 1, d.j + 1));
            rep.note(format!("    printed: {}", d.left));
            rep.note(format!("    derived: {}", d.right));
        }
    }
    rep.data = json!({
        "printed": chart_text(&r.as_printed),
        "derived": chart_text(&r.derived),
        "printed_is_symplectic": r.as_printed.is_symplectic(),
        "printed_is_flat": r.as_printed.is_flat(),
        "diff": diff,
    });
    Ok(rep)
}

/// The exponent `k` with `(s_u)_* v = u^k v`, searched over a small window.
fn scaling_exponent() -> Result<Option<i32>, Precondition> {
    let v = ramanujan_field(RamanujanChart::B);
    let pushed = b_scaling_iso("u").pushforward(&v).map_err(pre)?;
    let u = RatFunc::var("u");
    let found = (-8i32..=8).find(|&k| {
        let f = if k >= 0 { u.pow(k as u32) } else { u.pow((-k) as u32).inv().expect("u is nonzero") };
        pushed.coeffs().iter().zip(v.coeffs()).all(|(p, c)| *p == &f * c)
    });
    Ok(found)
}

pub fn solve_field(chart: Chart) -> Result<Report, Precondition> {
    let mut rep = Report::new("solve-field", json!({ "chart": chart.name() }));
    let conn = chart.connection()?;
    let sol = solve_higher_ramanujan(&conn).map_err(pre)?;
    let expected = ramanujan_field(chart.field_chart());
    let indices: Vec<String> = sol.keys().map(|(i, j)| format!("v{}{}", i + 1, j + 1)).collect();
    rep.check("one_field_in_genus_one", sol.len() == 1, indices.join(","));
    let v11 = sol.get(&(0, 0));
    rep.check("solved_equals_printed_field", v11 == Some(&expected), "");
    if let Some(v) = v11 {
        rep.check("solved_contracts_to_lowering", conn.contract(v).map_err(pre)? == lowering(), "");
        rep.note(format!("solved v11 on the {}-chart: {}", chart.name(), field_line(v)));
    }
    let pushed = b_to_e_iso().pushforward(&ramanujan_field(RamanujanChart::B)).map_err(pre)?;
    rep.check("b_field_pushes_to_e_field", pushed == ramanujan_field(RamanujanChart::E), "");
    let k = scaling_exponent()?;
    rep.check(
        "scaling_exponent",
        k == Some(-2),
        match k {
            Some(k) => format!("(s_u)_* v = u^{k} v for (b2, b4, b6) -> (u²b2, u⁴b4, u⁶b6)"),
            None => "no power of u relates the fields".into(),
        },
    );
    let fields: Map<String, Value> = sol.iter().map(|((i, j), v)| (format!("v{}{}", i + 1, j + 1), field_text(v))).collect();
    rep.data = json!({
        "solved": fields,
        "printed": field_text(&expected),
        "pushforward_b_to_e": field_text(&pushed),
        "scaling": { "map": "(b2, b4, b6) -> (u^2*b2, u^4*b4, u^6*b6)", "exponent": k, "levi_matrix": "A = (u^-1)" },
    });
    Ok(rep)
}

fn tally_json(t: &Tally) -> Value {
    json!({ "passed": t.passed, "failed": t.failed })
}

fn tally_detail(t: &Tally) -> String {
    format!("{} passed, {} failed", t.passed, t.failed)
}

/// Formal checks in genus `g`, named with `prefix`.
fn formal_section(rep: &mut Report, prefix: &str, g: usize, trials: usize, rng: &mut ChaCha8Rng) -> Value {
    let f = formal_check(g, trials, rng);
    rep.check(format!("{prefix}commutation"), f.commutation, "");
    rep.check(format!("{prefix}pairing_leibniz"), f.pairing_leibniz, "");
    rep.check(format!("{prefix}kodaira_spencer"), f.kodaira_spencer, "");
    for (name, t) in [
        ("pullback_pairing", &f.pullback_pairing),
        ("obstruction_closed_form", &f.obstruction_closed_form),
        ("obstruction_iff_b_zero", &f.obstruction_iff),
        ("levi_doubled_diagonal", &f.levi_doubled),
    ] {
        rep.check(format!("{prefix}{name}"), t.ok(), tally_detail(t));
    }
    // the single-diagonal rule transforms correctly only in genus one
    let literal_expected = if g == 1 { f.levi_literal.ok() } else { f.levi_literal.failed > 0 };
    rep.check(
        format!("{prefix}levi_literal_diagonal_expected"),
        literal_expected,
        format!("{}; expected to hold iff g = 1", tally_detail(&f.levi_literal)),
    );
    if let Some([closed, iff, dbl, lit]) = f.symbolic {
        rep.check(format!("{prefix}symbolic_obstruction_closed_form"), closed, "");
        rep.check(format!("{prefix}symbolic_obstruction_iff"), iff, "");
        rep.check(format!("{prefix}symbolic_levi_doubled"), dbl, "");
        rep.check(format!("{prefix}symbolic_levi_literal_expected"), lit == (g == 1), format!("holds: {lit}"));
    }
    json!({
        "g": g,
        "trials": trials,
        "commutation": f.commutation,
        "pairing_leibniz": f.pairing_leibniz,
        "kodaira_spencer": f.kodaira_spencer,
        "pullback_pairing": tally_json(&f.pullback_pairing),
        "obstruction_closed_form": tally_json(&f.obstruction_closed_form),
        "obstruction_iff_b_zero": tally_json(&f.obstruction_iff),
        "levi_doubled_diagonal": tally_json(&f.levi_doubled),
        "levi_literal_diagonal": tally_json(&f.levi_literal),
        "symbolic": f.symbolic.map(|[a, b, c, d]| json!({
            "obstruction_closed_form": a, "obstruction_iff": b, "levi_doubled": c, "levi_literal": d,
        })),
        "degree_bound": f.degree_bound,
    })
}

pub fn formal(g: usize, trials: usize, seed: u64) -> Result<Report, Precondition> {
    if g == 0 || trials == 0 {
        return Err(Precondition("--g and --trials must be at least 1".into()));
    }
    let mut rep = Report::new("formal-check", json!({ "g": g, "trials": trials, "seed": seed }));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = formal_section(&mut rep, "", g, trials, &mut rng);
    rep.note("diagonal fields: 'doubled' acts by ∇_{v_ii}ω_i = 2η_i, 'literal' by ∇_{v_ii}ω_i = η_i");
    rep.data = data;
    Ok(rep)
}

pub struct FlowArgs {
    pub chart: Chart,
    pub q0: f64,
    pub q1: f64,
    pub tol: f64,
    pub order: usize,
    pub max_steps: usize,
}

fn write_csv(path: &Path, coords: &[String], out: &FlowOutcome) -> Result<(), Precondition> {
    let mut s = String::from("step,tau_re,tau_im");
    for c in coords {
        let _ = write!(s, ",{c}_re,{c}_im");
    }
    s.push('\n');
    // the recorded samples start with the initial state
    for (k, st) in out.samples.iter().enumerate() {
        let _ = write!(s, "{k},{},{}", st.tau.re, st.tau.im);
        for z in &st.point {
            let _ = write!(s, ",{},{}", z.re, z.im);
        }
        s.push('\n');
    }
    std::fs::write(path, s).map_err(|e| Precondition(format!("cannot write {}: {e}", path.display())))
}

pub fn flow(a: &FlowArgs, dump_csv: Option<&Path>) -> Result<Report, Precondition> {
    let inputs = json!({
        "chart": a.chart.name(), "q0": a.q0, "q1": a.q1, "tol": a.tol, "order": a.order, "max_steps": a.max_steps,
        "dump_csv": dump_csv.map(|p| p.display().to_string()),
    });
    let mut rep = Report::new("flow", inputs);
    for (flag, q) in [("--q0", a.q0), ("--q1", a.q1)] {
        if !(q.is_finite() && q != 0.0 && q.abs() < 1.0) {
            return Err(Precondition(format!("{flag} must satisfy 0 < |q| < 1, got {q}")));
        }
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Precondition(format!("--tol must be positive, got {}", a.tol)));
    }
    let series = match a.chart {
        Chart::E => eisenstein_triple(a.order),
        Chart::B => chazy_triple(a.order),
    }
    .map_err(pre)?;
    if a.order < 2 {
        return Err(pre(QSeriesError::OrderTooSmall { min: 2, got: a.order }));
    }
    let conn = a.chart.connection()?;
    let field = CompiledField::new(&ramanujan_field(a.chart.field_chart()), Some(conn.delta())).map_err(pre)?;
    let (q0, q1) = (Complex64::new(a.q0, 0.0), Complex64::new(a.q1, 0.0));
    let start = FlowState { point: series_point(&series, q0).map_err(pre)?, tau: q0.ln() };
    let oracle = series_point(&series, q1).map_err(pre)?;
    let tail = series.iter().map(|s| s.evaluate(q1).map(|e| e.tail_bound).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let opts = IntegrateOptions { tol: a.tol, max_steps: a.max_steps, record: dump_csv.is_some() };
    let dtau = q1.ln() - q0.ln();
    let threshold = (100.0 * a.tol).max(1e-8);
    match integrate(&field, &start, dtau, opts) {
        Ok(out) => {
            let err = out.state.point.iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let scale = oracle.iter().map(|z| z.norm()).fold(1.0, f64::max);
            rep.check(
                "endpoint_matches_series",
                err <= threshold * scale,
                format!("max |flow - series| = {err:e}, allowed {:e}", threshold * scale),
            );
            rep.note(format!("{}-chart flow from q = {} to q = {}: {} steps, {} rejected", a.chart.name(), a.q0, a.q1, out.steps, out.rejected));
            if let Some(p) = dump_csv {
                write_csv(p, conn.coords(), &out)?;
                rep.note(format!("trajectory written to {}", p.display()));
            }
            rep.data = json!({
                "coords": conn.coords(),
                "start": start.point.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
                "endpoint": out.state.point.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
                "oracle": oracle.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
                "oracle_tail_bound": tail,
                "max_abs_err": err,
                "steps": out.steps,
                "rejected": out.rejected,
            });
        }
        Err(e) => {
            rep.check("endpoint_matches_series", false, format!("integration failed: {e}"));
            rep.data = json!({
                "coords": conn.coords(),
                "endpoint": Value::Null,
                "oracle": oracle.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
                "oracle_tail_bound": tail,
                "max_abs_err": Value::Null,
                "steps": Value::Null,
            });
        }
    }
    Ok(rep)
}

/// Copies a section's checks and notes into `all`, prefixing the names.
fn absorb(all: &mut Report, data: &mut Map<String, Value>, section: &str, sub: Report) {
    for mut c in sub.checks {
        c.name = format!("{section}/{}", c.name);
        all.checks.push(c);
    }
    for line in sub.summary {
        all.summary.push(format!("[{section}] {line}"));
    }
    data.insert(section.to_string(), sub.data);
}

/// Symplectic properties at fixed sizes: completion and dual bases 500
/// trials for g ≤ 6, torsor properties 200 for g ≤ 5, the rest `trials`.
fn symplectic_suite(rep: &mut Report, trials: usize, rng: &mut ChaCha8Rng) -> Value {
    let mut rows = Vec::new();
    for g in 1..=6 {
        for p in Property::ALL {
            let n = match p {
                Property::Completion | Property::DualBasis => 500,
                Property::Freeness | Property::Transitivity if g <= 5 => 200,
                Property::Freeness | Property::Transitivity => continue,
                _ => trials,
            };
            let o = run_property(p, g, n, rng);
            rep.check(format!("{}/g={g}", p.name()), o.ok(), format!("{} of {n} trials", o.passed));
            rows.push(outcome_json(&o));
        }
    }
    json!({ "outcomes": rows })
}

pub struct AllArgs {
    pub order: usize,
    pub g: usize,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn all(a: &AllArgs) -> Result<Report, Precondition> {
    if a.g == 0 || a.trials == 0 {
        return Err(Precondition("--g and --trials must be at least 1".into()));
    }
    let inputs = json!({ "order": a.order, "g": a.g, "tol": a.tol, "trials": a.trials, "seed": a.seed });
    let mut rep = Report::new("all", inputs);
    let mut data = Map::new();

    absorb(&mut rep, &mut data, "verify-qseries", verify_qseries(a.order)?);
    let deep = a.order.max(500);
    let mut integ = Report::new("verify-qseries", json!({}));
    for w in [2, 4, 6] {
        let e = eisenstein(w, deep).map_err(pre)?;
        integ.check(format!("E{w}_integral"), e.is_integral(), format!("coefficients below q^{deep}"));
    }
    integ.data = json!({ "order": deep });
    absorb(&mut rep, &mut data, "integrality", integ);

    for chart in [Chart::E, Chart::B] {
        absorb(&mut rep, &mut data, &format!("rederive-connection-{}", chart.name()), rederive_connection(chart)?);
        absorb(&mut rep, &mut data, &format!("solve-field-{}", chart.name()), solve_field(chart)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sym = Report::new("symplectic-selftest", json!({}));
    sym.data = symplectic_suite(&mut sym, a.trials, &mut rng);
    absorb(&mut rep, &mut data, "symplectic", sym);

    let mut fr = Report::new("formal-check", json!({}));
    let mut sections = BTreeMap::new();
    for g in 1..=a.g {
        sections.insert(format!("g={g}"), formal_section(&mut fr, &format!("g={g}/"), g, a.trials, &mut rng));
    }
    for g in a.g + 1..=6 {
        fr.check(format!("g={g}/commutation"), formal::check_commutation(g), "");
    }
    fr.data = json!(sections);
    absorb(&mut rep, &mut data, "formal", fr);

    for chart in [Chart::E, Chart::B] {
        let args = FlowArgs { chart, q0: 0.01, q1: 0.02, tol: a.tol, order: 64, max_steps: 100_000 };
        absorb(&mut rep, &mut data, &format!("flow-{}", chart.name()), flow(&args, None)?);
    }
    rep.data = Value::Object(data);
    Ok(rep)
}
