//! Statement execution, output records and exit codes.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use chiral::cdr::{build_structure, character, check_topological, check_virasoro, cohomology, virasoro};
use chiral::coeffs::rational::{fmt_rational, qi};
use chiral::coeffs::{CoeffError, Rational};
use chiral::coord::{
    default_correction, structure_transform, transform_state, verify_ope_preservation, CoordChange,
    CoordError,
};
use chiral::engine::laws::check_laws;
use chiral::engine::{nth_product, ope};
use chiral::liecocycle::{
    check_identities, cocycle_eval, compare_69, discrepancy, fit_69, sample_fields, CocycleKind,
    LieError, VectorField,
};
use chiral::report::Report;
use chiral::sheaf::{self, euler_character, glue_check_p1, global_sections, reflection, wakimoto_check, SheafError};
use chiral::states::{Family, Kind, Monomial, State, System};
use serde_json::{json, Value};

use crate::lower::{field_dimension, lower_field, lower_map, lower_state, mode_var};
use crate::syntax::{
    parse, CheckKind, Diagnostic, Expr, P1Cmd, Ref, Ring, Script, Span, StateExpr, Stmt, StmtKind,
    StrLit, TermBody, TransformAction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Command-line settings shared by every statement.
#[derive(Clone, Debug)]
pub struct Flags {
    pub json: bool,
    pub seed: u64,
    /// Weight bound for probe-based checks.
    pub max_weight: i32,
    /// Number of `t`-series terms computed for flows.
    pub series_order: usize,
    /// First Čech window for `p1 sections`.
    pub degree_window: i64,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            json: false,
            seed: 1,
            max_weight: 2,
            series_order: 12,
            degree_window: 2,
        }
    }
}

/// Everything a run produces.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Sampled random triples and quadruples for `cocycle "identities"`.
const RANDOM_TUPLES: usize = 20;
/// Samples per law for `check borcherds`.
const LAW_SAMPLES: usize = 40;
const MAX_WINDOW: i64 = 64;

enum Halt {
    Usage(Diagnostic),
    Resource(Diagnostic),
}

type RResult<T> = Result<T, Halt>;

fn usage(msg: impl Into<String>, span: Span) -> Halt {
    Halt::Usage(Diagnostic::error(msg, span))
}

fn coeff_halt(e: CoeffError, span: Span) -> Halt {
    match e {
        CoeffError::TruncationUnderflow { .. } => Halt::Resource(Diagnostic::error(e.to_string(), span)),
        _ => usage(e.to_string(), span),
    }
}

fn coord_halt(e: CoordError, span: Span) -> Halt {
    match e {
        CoordError::Coeff(c) => coeff_halt(c, span),
        _ => usage(e.to_string(), span),
    }
}

fn sheaf_halt(e: SheafError, span: Span) -> Halt {
    match e {
        SheafError::Coord(c) => coord_halt(c, span),
        SheafError::Coeff(c) => coeff_halt(c, span),
        SheafError::WindowExhausted { .. } | SheafError::FlowNotRational { .. } => {
            Halt::Resource(Diagnostic::error(e.to_string(), span))
        }
        SheafError::NonIntegerEigenvalue(_) => usage(e.to_string(), span),
    }
}

fn lie_halt(e: LieError, span: Span) -> Halt {
    match e {
        LieError::Coeff(c) => coeff_halt(c, span),
        _ => usage(e.to_string(), span),
    }
}

fn q(r: &Rational) -> String {
    fmt_rational(r)
}

/// One command's output: text for the terminal and a JSON object.
struct Record {
    command: &'static str,
    line: usize,
    passed: Option<bool>,
    text: String,
    data: Value,
}

impl Record {
    fn json(&self) -> Value {
        let mut obj = json!({
            "command": self.command,
            "line": self.line,
            "passed": self.passed,
        });
        if let (Value::Object(o), Value::Object(d)) = (&mut obj, &self.data) {
            for (k, v) in d {
                o.insert(k.clone(), v.clone());
            }
        }
        obj
    }
}

fn report_record(command: &'static str, stmt: &Stmt, report: &Report) -> Record {
    Record {
        command,
        line: stmt.span.line,
        passed: Some(report.passed()),
        text: report.to_string(),
        data: json!({ "report": report }),
    }
}

fn state_record(command: &'static str, stmt: &Stmt, s: &State) -> Record {
    Record {
        command,
        line: stmt.span.line,
        passed: None,
        text: format!("{s}\n"),
        data: json!({ "state": s.to_string() }),
    }
}

/// The system a script runs in, with its coefficient ring and whether it
/// was declared.
#[derive(Clone, Copy, Debug)]
struct Setting {
    sys: System,
    ring: Ring,
    declared: bool,
}

fn expr_indices(e: &Expr, out: &mut usize) {
    match e {
        Expr::Var(s, _) => {
            if let Some(i) = s.strip_prefix('x').and_then(|r| r.parse::<usize>().ok()) {
                *out = (*out).max(i);
            }
        }
        Expr::Neg(a) | Expr::Pow(a, _, _) => expr_indices(a, out),
        Expr::Bin(_, a, b, _) => {
            expr_indices(a, out);
            expr_indices(b, out);
        }
        Expr::Int(..) | Expr::BigO(..) => {}
    }
}

fn state_indices(e: &StateExpr, out: &mut usize) {
    for t in &e.terms {
        if let Some(c) = &t.coef {
            expr_indices(c, out);
        }
        if let TermBody::Vars(vs) = &t.body {
            for v in vs {
                *out = (*out).max(v.index);
            }
        }
    }
}

fn ref_indices(r: &Ref, out: &mut usize) {
    match r {
        Ref::Generator(v) => *out = (*out).max(v.index),
        Ref::Inline(e) => state_indices(e, out),
        Ref::Name(..) => {}
    }
}

fn state_names<'a>(e: &'a StateExpr, out: &mut Vec<(&'a str, Span)>) {
    for t in &e.terms {
        if let TermBody::Name(n, s) = &t.body {
            out.push((n, *s));
        }
    }
}

fn ref_names<'a>(r: &'a Ref, out: &mut Vec<(&'a str, Span)>) {
    match r {
        Ref::Name(n, s) => out.push((n, *s)),
        Ref::Inline(e) => state_names(e, out),
        Ref::Generator(_) => {}
    }
}

/// The refs and state expressions a statement reads, as
/// `(reads in the script system, reads in the ℙ¹ system)`.
fn stmt_refs(stmt: &Stmt) -> (Vec<&Ref>, Vec<&Ref>) {
    match &stmt.kind {
        StmtKind::Ope(a, b) | StmtKind::NProduct(a, _, b) => (vec![a, b], vec![]),
        StmtKind::Transform {
            action: TransformAction::Apply(r),
            ..
        } => (vec![r], vec![]),
        StmtKind::P1(P1Cmd::Reflect(r)) => (vec![], vec![r]),
        _ => (vec![], vec![]),
    }
}

/// Static checks: one system, declared first; names bound before use.
fn resolve(script: &Script) -> Result<Setting, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut setting = None;
    for (k, stmt) in script.stmts.iter().enumerate() {
        if let StmtKind::System { kind, n, ring } = &stmt.kind {
            if setting.is_some() {
                diags.push(Diagnostic::error("a script declares one system", stmt.span));
            } else if k > 0 {
                diags.push(Diagnostic::error("the system must be declared first", stmt.span));
            }
            let sys = match kind {
                Kind::Heisenberg => System::heisenberg(*n),
                Kind::Clifford => System::clifford(*n),
                Kind::Omega => System::omega(*n),
            };
            setting.get_or_insert(Setting {
                sys,
                ring: *ring,
                declared: true,
            });
        }
    }
    let setting = setting.unwrap_or_else(|| {
        let mut n = 1;
        for stmt in &script.stmts {
            match &stmt.kind {
                StmtKind::Let { expr, .. } => state_indices(expr, &mut n),
                _ => stmt_refs(stmt).0.iter().for_each(|r| ref_indices(r, &mut n)),
            }
        }
        Setting {
            sys: System::omega(n),
            ring: Ring::Natural,
            declared: false,
        }
    });
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    for stmt in &script.stmts {
        let mut used = Vec::new();
        match &stmt.kind {
            StmtKind::Let { expr, .. } => state_names(expr, &mut used),
            _ => {
                let (a, b) = stmt_refs(stmt);
                a.into_iter().chain(b).for_each(|r| ref_names(r, &mut used));
            }
        }
        for (name, span) in used {
            if !bound.contains(name) {
                diags.push(Diagnostic::error(format!("`{name}` is used before it is bound"), span));
            }
        }
        if let StmtKind::Let { name, .. } = &stmt.kind {
            bound.insert(name);
        }
    }
    if diags.is_empty() {
        Ok(setting)
    } else {
        Err(diags)
    }
}

struct Interp<'a> {
    setting: Setting,
    flags: &'a Flags,
    bindings: HashMap<String, State>,
}

impl Interp<'_> {
    fn sys(&self) -> System {
        self.setting.sys
    }

    /// A ref read as a state of `sys`. With `field` set, a bare `bI_{-1}`
    /// names the field `bI(z)`, whose state is `xI`.
    fn operand(&self, r: &Ref, sys: System, field: bool) -> RResult<State> {
        let ring = if sys == self.sys() { self.setting.ring } else { Ring::Natural };
        match r {
            Ref::Name(name, span) => {
                let s = self
                    .bindings
                    .get(name)
                    .ok_or_else(|| usage(format!("`{name}` is not bound"), *span))?;
                if s.system() != sys {
                    return Err(usage(format!("`{name}` lives in another system"), *span));
                }
                Ok(s.clone())
            }
            Ref::Generator(v) => {
                let mv = mode_var(sys, v).map_err(Halt::Usage)?;
                let mv = if field && v.family == Family::B && v.mode == -1 {
                    chiral::states::ModeVar::b(v.index, 0)
                } else {
                    mv
                };
                State::normalize(sys, vec![(chiral::coeffs::FunctionElem::one(), vec![mv])])
                    .map_err(|e| usage(e.to_string(), v.span))
            }
            Ref::Inline(e) => lower_state(e, sys, ring, &self.bindings).map_err(Halt::Usage),
        }
    }

    fn known(&self, s: &State, span: Span) -> RResult<()> {
        s.check_known().map_err(|e| coeff_halt(e, span))
    }

    fn need_omega(&self, what: &str, span: Span) -> RResult<()> {
        if self.sys().kind == Kind::Omega {
            Ok(())
        } else {
            Err(usage(format!("{what} needs an omega system"), span))
        }
    }

    fn exec(&mut self, stmt: &Stmt) -> RResult<Option<Record>> {
        let sys = self.sys();
        let line = stmt.span.line;
        Ok(Some(match &stmt.kind {
            StmtKind::System { .. } => return Ok(None),
            StmtKind::Let { name, expr, .. } => {
                let s = lower_state(expr, sys, self.setting.ring, &self.bindings).map_err(Halt::Usage)?;
                self.known(&s, expr.span)?;
                self.bindings.insert(name.clone(), s);
                return Ok(None);
            }
            StmtKind::Ope(a, b) => {
                let (sa, sb) = (self.operand(a, sys, true)?, self.operand(b, sys, true)?);
                let poles = ope(&sa, &sb);
                for p in poles.values() {
                    self.known(p, stmt.span)?;
                }
                let shown: Vec<String> = poles.iter().rev().map(|(k, s)| format!("pole {k}: {s}")).collect();
                let data: Vec<Value> = poles
                    .iter()
                    .rev()
                    .map(|(k, s)| json!({ "order": k, "state": s.to_string() }))
                    .collect();
                Record {
                    command: "ope",
                    line,
                    passed: None,
                    text: format!("{{{}}}\n", shown.join(", ")),
                    data: json!({ "poles": data }),
                }
            }
            StmtKind::NProduct(a, n, b) => {
                let s = nth_product(&self.operand(a, sys, true)?, *n, &self.operand(b, sys, true)?);
                self.known(&s, stmt.span)?;
                state_record("nproduct", stmt, &s)
            }
            StmtKind::Check(CheckKind::Virasoro) => {
                let l = self.bindings.get("L").cloned().unwrap_or_else(|| virasoro(sys));
                let top = nth_product(&l, 3, &l);
                let c = top
                    .coeff(&Monomial::one())
                    .as_constant()
                    .filter(|_| top.num_terms() <= 1)
                    .map(|k| k * qi(2));
                let Some(c) = c else {
                    let mut r = Report::new("Virasoro relations");
                    r.check("L_(3)L is a multiple of the vacuum", false, top.to_string());
                    return Ok(Some(report_record("check virasoro", stmt, &r)));
                };
                let mut r = check_virasoro(&l, &c);
                let expected = match sys.kind {
                    Kind::Heisenberg => 2 * sys.n as i64,
                    Kind::Clifford => -2 * sys.n as i64,
                    Kind::Omega => 0,
                };
                r.note(format!("the standard element of this system has c = {expected}"));
                let mut rec = report_record("check virasoro", stmt, &r);
                rec.text.push_str(&format!("c = {}\n", q(&c)));
                rec.data["c"] = json!(q(&c));
                rec
            }
            StmtKind::Check(CheckKind::Topological) => {
                self.need_omega("check topological", stmt.span)?;
                report_record("check topological", stmt, &check_topological(&build_structure(sys.n)))
            }
            StmtKind::Check(CheckKind::Borcherds) => report_record(
                "check borcherds",
                stmt,
                &check_laws(sys, self.flags.seed, LAW_SAMPLES),
            ),
            StmtKind::Cohomology(wmax) => {
                self.need_omega("cohomology", stmt.span)?;
                let bmax = if sys.n == 1 { 5 } else { 3 };
                let mut text = format!("chiral de Rham cohomology, N = {}, Bmax = {bmax}\n", sys.n);
                text.push_str("  w  charge  dim  ker  im  H\n");
                let mut rows = Vec::new();
                let mut ok = true;
                for w in 0..=*wmax {
                    let (rs, d2) = cohomology(sys.n, w, bmax);
                    ok &= d2;
                    for r in rs {
                        let _ = writeln!(
                            text,
                            "  {}  {}  {}  {}  {}  {}",
                            r.weight, r.charge, r.dim, r.dim_ker, r.dim_im, r.dim_h
                        );
                        rows.push(r);
                    }
                    if !d2 {
                        let _ = writeln!(text, "  d^2 != 0 at weight {w}");
                    }
                }
                Record {
                    command: "cohomology",
                    line,
                    passed: Some(ok),
                    text,
                    data: json!({ "bmax": bmax, "rows": rows }),
                }
            }
            StmtKind::Character(wmax) => {
                let t = character(sys, *wmax);
                let mut text = String::new();
                for (w, row) in t.ranks.iter().enumerate() {
                    let parts: Vec<String> = row.iter().map(|(p, r)| format!("charge {p}: {r}")).collect();
                    let _ = writeln!(text, "w = {w}: {}; euler {}", parts.join(", "), t.euler[w]);
                }
                Record {
                    command: "character",
                    line,
                    passed: None,
                    text,
                    data: json!({ "table": t }),
                }
            }
            StmtKind::Transform { map, order, action } => self.transform(stmt, map, *order, action)?,
            StmtKind::P1(cmd) => self.p1(stmt, cmd)?,
            StmtKind::Cocycle { name, args } => self.cocycle(stmt, name, args)?,
        }))
    }

    fn transform(&self, stmt: &Stmt, map: &StrLit, order: u32, action: &TransformAction) -> RResult<Record> {
        let sys = self.sys();
        if !sys.kind.has(Family::B) {
            return Err(usage("coordinate changes need b-fields", stmt.span));
        }
        let g = lower_map(map, sys.n).map_err(Halt::Usage)?;
        let cc = CoordChange::series(g, order).map_err(|e| coord_halt(e, map.span))?;
        Ok(match action {
            TransformAction::CheckOpes => {
                let r = verify_ope_preservation(&cc, sys, default_correction(sys), self.flags.max_weight)
                    .map_err(|e| coord_halt(e, stmt.span))?;
                report_record("transform check-opes", stmt, &r)
            }
            TransformAction::Apply(r) => {
                let s = self.operand(r, sys, false)?;
                let t = transform_state(&cc, &s).map_err(|e| coord_halt(e, r.span()))?;
                state_record("transform apply", stmt, &t)
            }
            TransformAction::Structure => {
                self.need_omega("transform structure", stmt.span)?;
                let (diff, r) = structure_transform(&cc).map_err(|e| coord_halt(e, stmt.span))?;
                let mut rec = report_record("transform structure", stmt, &r);
                let _ = writeln!(rec.text, "J~ - J = {}\nQ~ - Q = {}", diff.j, diff.q);
                rec.data["j_shift"] = json!(diff.j.to_string());
                rec.data["q_shift"] = json!(diff.q.to_string());
                rec
            }
        })
    }

    fn p1(&self, stmt: &Stmt, cmd: &P1Cmd) -> RResult<Record> {
        let line = stmt.span.line;
        let halt = |e| sheaf_halt(e, stmt.span);
        Ok(match cmd {
            P1Cmd::Glue => report_record("p1 glue", stmt, &glue_check_p1(self.flags.max_weight).map_err(halt)?),
            P1Cmd::Wakimoto => {
                let w = wakimoto_check().map_err(halt)?;
                let level = w.level.as_ref().map(q);
                let mut rec = report_record("p1 wakimoto", stmt, &w.report);
                let _ = writeln!(rec.text, "level = {}", level.clone().unwrap_or_else(|| "none".into()));
                rec.data["level"] = json!(level);
                rec
            }
            P1Cmd::Sections(wmax) => {
                let rows = global_sections(*wmax, self.flags.degree_window, MAX_WINDOW).map_err(halt)?;
                let mut text = String::from("  w  rank  H1  window\n");
                for r in &rows {
                    let _ = writeln!(text, "  {}  {}  {}  {}", r.weight, r.rank, r.h1, r.window);
                }
                Record {
                    command: "p1 sections",
                    line,
                    passed: None,
                    text,
                    data: json!({ "rows": rows }),
                }
            }
            P1Cmd::Euler(wmax) => {
                let e = euler_character(*wmax);
                let shown: Vec<String> = e.iter().map(i64::to_string).collect();
                Record {
                    command: "p1 euler",
                    line,
                    passed: None,
                    text: format!("{}\n", shown.join(", ")),
                    data: json!({ "coefficients": e }),
                }
            }
            P1Cmd::Reflect(r) => {
                let s = self.operand(r, sheaf::system(), false)?;
                let t = reflection(&s, self.flags.series_order).map_err(halt)?;
                state_record("p1 reflect", stmt, &t)
            }
        })
    }

    fn fields(&self, args: &[StrLit]) -> RResult<Vec<VectorField>> {
        let n = if self.setting.declared {
            self.sys().n
        } else {
            let mut n = 1;
            for a in args {
                n = n.max(field_dimension(a).map_err(Halt::Usage)?);
            }
            n
        };
        args.iter().map(|a| lower_field(a, n).map_err(Halt::Usage)).collect()
    }

    fn cocycle(&self, stmt: &Stmt, name: &StrLit, args: &[StrLit]) -> RResult<Record> {
        let line = stmt.span.line;
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(usage(format!("`{}` takes {k} field arguments, got {}", name.value, args.len()), name.span))
            }
        };
        Ok(match name.value.as_str() {
            "identities" => {
                arity(0)?;
                let r = check_identities(RANDOM_TUPLES, self.flags.seed).map_err(|e| lie_halt(e, stmt.span))?;
                report_record("cocycle identities", stmt, &r)
            }
            "compare-69" => {
                arity(0)?;
                let sample = sample_fields();
                let fit = fit_69(&sample).map_err(|e| lie_halt(e, stmt.span))?;
                let (passed, text, lambda) = match compare_69(&sample) {
                    Ok(l) => (true, format!("lambda = {}\n", q(&l)), Some(q(&l))),
                    Err(e @ LieError::NoConstant { .. }) => (false, format!("{e}\n"), None),
                    Err(e) => return Err(lie_halt(e, stmt.span)),
                };
                Record {
                    command: "cocycle compare-69",
                    line,
                    passed: Some(passed),
                    text,
                    data: json!({ "lambda": lambda, "fit": fit }),
                }
            }
            "discrepancy" => {
                arity(2)?;
                let f = self.fields(args)?;
                let r = discrepancy(&f[0], &f[1], self.flags.max_weight).map_err(|e| lie_halt(e, stmt.span))?;
                report_record("cocycle discrepancy", stmt, &r)
            }
            other => {
                let kind = CocycleKind::from_name(other).ok_or_else(|| {
                    usage(
                        format!("unknown cocycle `{other}`; expected c, c2, c3, 'c2, 'c3, identities, compare-69 or discrepancy"),
                        name.span,
                    )
                })?;
                arity(kind.arity())?;
                let f = self.fields(args)?;
                let v = cocycle_eval(kind, &f).map_err(|e| lie_halt(e, stmt.span))?;
                let shown: Vec<String> = f.iter().map(|t| t.to_string()).collect();
                Record {
                    command: "cocycle evaluate",
                    line,
                    passed: None,
                    text: format!("{}({}) = {v}\n", kind.name(), shown.join(", ")),
                    data: json!({ "cocycle": kind.name(), "fields": shown, "value": v.to_string() }),
                }
            }
        })
    }
}

fn emit(out: &mut Outcome, rec: &Record, json: bool) {
    if json {
        out.stdout.push_str(&rec.json().to_string());
        out.stdout.push('\n');
    } else {
        out.stdout.push_str(&rec.text);
    }
}

fn diagnostics(out: &mut Outcome, diags: &[Diagnostic]) {
    for d in diags {
        out.stderr.push_str(&d.to_string());
        out.stderr.push('\n');
    }
}

/// Runs a parsed script. Statements execute in order; a usage or resource
/// error stops the run, a failed verification does not.
pub fn run(script: &Script, flags: &Flags) -> Outcome {
    let mut out = Outcome::default();
    let setting = match resolve(script) {
        Ok(s) => s,
        Err(diags) => {
            diagnostics(&mut out, &diags);
            out.code = EXIT_USAGE;
            return out;
        }
    };
    let mut interp = Interp {
        setting,
        flags,
        bindings: HashMap::new(),
    };
    for stmt in &script.stmts {
        match interp.exec(stmt) {
            Ok(Some(rec)) => {
                if rec.passed == Some(false) {
                    out.code = EXIT_FAILED;
                }
                emit(&mut out, &rec, flags.json);
            }
            Ok(None) => {}
            Err(Halt::Usage(d)) => {
                diagnostics(&mut out, &[d]);
                out.code = EXIT_USAGE;
                return out;
            }
            Err(Halt::Resource(d)) => {
                diagnostics(&mut out, &[d]);
                out.code = EXIT_RESOURCE;
                return out;
            }
        }
    }
    out
}

/// Parses and runs script text.
pub fn run_source(src: &str, flags: &Flags) -> Outcome {
    match parse(src) {
        Ok(script) => run(&script, flags),
        Err(diags) => {
            let mut out = Outcome {
                code: EXIT_USAGE,
                ..Default::default()
            };
            diagnostics(&mut out, &diags);
            out
        }
    }
}
