//! Lowering of parsed expressions to engine values.

use std::collections::HashMap;
use std::str::FromStr;

use chiral::coeffs::{FunctionElem, Mode, Poly, Rational};
use chiral::liecocycle::VectorField;
use chiral::states::{Family, ModeVar, State, System};

use crate::syntax::{
    parse_map_string, parse_string_expr, BinOp, Diagnostic, Expr, ModeVarLit, Ring, Span,
    StateExpr, StrLit, TermBody,
};

type LResult<T> = Result<T, Diagnostic>;

/// Evaluates `e`, resolving variables through `var`.
pub fn eval_expr(e: &Expr, var: &dyn Fn(&str, Span) -> LResult<FunctionElem>) -> LResult<FunctionElem> {
    let err = |span: Span| move |c: chiral::coeffs::CoeffError| Diagnostic::error(c.to_string(), span);
    match e {
        Expr::Int(s, span) => Rational::from_str(s)
            .map(FunctionElem::constant)
            .map_err(|_| Diagnostic::error("bad integer", *span)),
        Expr::Var(s, span) => var(s, *span),
        Expr::BigO(k, _) => Ok(FunctionElem::series(Poly::zero(), k - 1)),
        Expr::Neg(a) => Ok(-eval_expr(a, var)?),
        Expr::Bin(op, a, b, span) => {
            let (a, b) = (eval_expr(a, var)?, eval_expr(b, var)?);
            match op {
                BinOp::Add => a.try_add(&b),
                BinOp::Sub => a.try_add(&-b),
                BinOp::Mul => a.try_mul(&b),
                BinOp::Div => a.try_div(&b),
            }
            .map_err(err(*span))
        }
        Expr::Pow(a, k, span) => {
            let base = eval_expr(a, var)?;
            let base = if *k < 0 { base.invert().map_err(err(*span))? } else { base };
            let mut acc = FunctionElem::one();
            for _ in 0..k.unsigned_abs() {
                acc = acc.try_mul(&base).map_err(err(*span))?;
            }
            Ok(acc)
        }
    }
}

fn index_of(prefix: &str, s: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|i| *i >= 1)
}

fn coordinate(n: usize, s: &str, span: Span) -> LResult<FunctionElem> {
    match index_of("x", s) {
        Some(i) if i <= n => Ok(FunctionElem::var(i - 1)),
        Some(_) => Err(Diagnostic::error(format!("`{s}` is outside N = {n}"), span)),
        None => Err(Diagnostic::error(format!("unknown variable `{s}`"), span)),
    }
}

/// Brings a coefficient into the declared ring.
pub fn in_ring(c: FunctionElem, ring: Ring, span: Span) -> LResult<FunctionElem> {
    let mode = match ring {
        Ring::Natural => return Ok(c),
        Ring::Poly => Mode::Poly,
        Ring::Rat => Mode::Rational,
        Ring::Series(d) => Mode::Series(d),
    };
    if ring == Ring::Poly && c.series_order().is_some() {
        return Err(Diagnostic::error("a truncated series is not a polynomial", span));
    }
    c.to_mode(mode).map_err(|e| {
        let hint = if ring == Ring::Poly { "; declare `ring rat` for fractions" } else { "" };
        Diagnostic::error(format!("{e}{hint}"), span)
    })
}

/// Checks a mode variable against the system.
pub fn mode_var(sys: System, v: &ModeVarLit) -> LResult<ModeVar> {
    let mv = ModeVar::new(v.family, v.index, v.mode);
    if v.index == 0 || v.index > sys.n {
        return Err(Diagnostic::error(format!("{mv} has an index outside N = {}", sys.n), v.span));
    }
    if !sys.kind.has(v.family) {
        return Err(Diagnostic::error(format!("{mv} does not belong to this system"), v.span));
    }
    if v.family != Family::B || v.mode != 0 {
        sys.validate(&mv).map_err(|e| Diagnostic::error(e.to_string(), v.span))?;
    }
    Ok(mv)
}

/// The state of a parsed expression; names refer to earlier bindings.
pub fn lower_state(
    e: &StateExpr,
    sys: System,
    ring: Ring,
    bindings: &HashMap<String, State>,
) -> LResult<State> {
    let var = |s: &str, span| coordinate(sys.n, s, span);
    let mut out = State::zero(sys);
    for t in &e.terms {
        let mut c = match &t.coef {
            Some(x) => eval_expr(x, &var)?,
            None => FunctionElem::one(),
        };
        if t.negated {
            c = -c;
        }
        let c = in_ring(c, ring, t.span)?;
        let s = match &t.body {
            TermBody::Scalar => State::function(sys, c),
            TermBody::Vars(vs) => {
                let vars = vs.iter().map(|v| mode_var(sys, v)).collect::<LResult<Vec<_>>>()?;
                State::normalize(sys, vec![(c, vars)])
                    .map_err(|e| Diagnostic::error(e.to_string(), t.span))?
            }
            TermBody::Name(name, span) => {
                let bound = bindings
                    .get(name)
                    .ok_or_else(|| Diagnostic::error(format!("`{name}` is not bound"), *span))?;
                if bound.system() != sys {
                    return Err(Diagnostic::error(format!("`{name}` lives in another system"), *span));
                }
                bound.mul_function(&c)
            }
        };
        out = &out + &s;
    }
    Ok(out)
}

/// The component functions of `"b -> b + b^2"` or `"b1 -> b1 + b2^2, b2 -> b2"`.
/// Variables may be written `b`, `bI` or `xI`.
pub fn lower_map(lit: &StrLit, n: usize) -> LResult<Vec<FunctionElem>> {
    let entries = parse_map_string(&lit.value, lit.span)?;
    let var = |s: &str, span: Span| -> LResult<FunctionElem> {
        let i = if s == "b" && n == 1 {
            Some(1)
        } else {
            index_of("b", s).or_else(|| index_of("x", s))
        };
        match i {
            Some(i) if i <= n => Ok(FunctionElem::var(i - 1)),
            Some(_) => Err(Diagnostic::error(format!("`{s}` is outside N = {n}"), span)),
            None => Err(Diagnostic::error(format!("unknown variable `{s}`"), span)),
        }
    };
    let mut out: Vec<Option<FunctionElem>> = vec![None; n];
    for (lhs, span, e) in &entries {
        let i = var(lhs, *span)?
            .as_poly()
            .and_then(|p| (0..n).find(|i| *p == Poly::var(*i)))
            .expect("variables lower to coordinates");
        if out[i].is_some() {
            return Err(Diagnostic::error(format!("`{lhs}` is mapped twice"), *span));
        }
        out[i] = Some(eval_expr(e, &var)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, g)| {
            g.ok_or_else(|| Diagnostic::error(format!("no image given for b{}", i + 1), lit.span))
        })
        .collect()
}

enum FieldVar {
    X(usize),
    D(usize),
}

fn field_var(s: &str) -> Option<FieldVar> {
    index_of("x", s)
        .map(FieldVar::X)
        .or_else(|| index_of("d", s).or_else(|| index_of("∂", s)).map(FieldVar::D))
}

fn field_indices(e: &Expr, out: &mut Vec<(FieldVar, Span)>) {
    match e {
        Expr::Var(s, span) => {
            if let Some(v) = field_var(s) {
                out.push((v, *span));
            }
        }
        Expr::Neg(a) | Expr::Pow(a, _, _) => field_indices(a, out),
        Expr::Bin(_, a, b, _) => {
            field_indices(a, out);
            field_indices(b, out);
        }
        Expr::Int(..) | Expr::BigO(..) => {}
    }
}

/// The largest coordinate index mentioned in a vector-field string.
pub fn field_dimension(lit: &StrLit) -> LResult<usize> {
    let e = parse_string_expr(&lit.value, lit.span)?;
    let mut vars = Vec::new();
    field_indices(&e, &mut vars);
    Ok(vars
        .iter()
        .map(|(v, _)| match v {
            FieldVar::X(i) | FieldVar::D(i) => *i,
        })
        .max()
        .unwrap_or(1))
}

/// A polynomial vector field written `"x2^2 d1 + x1 d2"` (`∂1` also works).
pub fn lower_field(lit: &StrLit, n: usize) -> LResult<VectorField> {
    let e = parse_string_expr(&lit.value, lit.span)?;
    let var = |s: &str, span: Span| -> LResult<FunctionElem> {
        match field_var(s) {
            Some(FieldVar::X(i)) if i <= n => Ok(FunctionElem::var(i - 1)),
            Some(FieldVar::D(i)) if i <= n => Ok(FunctionElem::var(n + i - 1)),
            Some(_) => Err(Diagnostic::error(format!("`{s}` is outside N = {n}"), span)),
            None => Err(Diagnostic::error(format!("unknown variable `{s}` (use xI and dI)"), span)),
        }
    };
    let value = eval_expr(&e, &var)?;
    let p = match value {
        FunctionElem::Poly(p) => p,
        _ => return Err(Diagnostic::error("vector fields have polynomial coefficients", lit.span)),
    };
    let mut comps = vec![Poly::zero(); n];
    for (exp, c) in p.terms() {
        let ds: Vec<usize> = (0..n).filter(|i| exp.get(n + i) > 0).collect();
        let order: u32 = (0..n).map(|i| exp.get(n + i)).sum();
        if order != 1 {
            return Err(Diagnostic::error(
                "every term of a vector field needs exactly one dI",
                lit.span,
            ));
        }
        comps[ds[0]].add_term(exp.with(n + ds[0], 0), c.clone());
    }
    Ok(VectorField::new(comps))
}
