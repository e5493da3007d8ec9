use super::*;

fn one(src: &str) -> StmtKind {
    let s = parse(src).unwrap_or_else(|d| panic!("{src}: {d:?}"));
    assert_eq!(s.stmts.len(), 1);
    s.stmts[0].kind.clone()
}

fn first_error(src: &str) -> Diagnostic {
    parse(src).expect_err(src)[0].clone()
}

#[test]
fn lexes_states_and_punctuation() {
    let toks: Vec<Tok> = lex("2 * a1_{-1} |0> -> x_y").unwrap().into_iter().map(|t| t.tok).collect();
    assert_eq!(
        toks,
        vec![
            Tok::Int("2".into()),
            Tok::Star,
            Tok::Ident("a1".into()),
            Tok::Underscore,
            Tok::LBrace,
            Tok::Minus,
            Tok::Int("1".into()),
            Tok::RBrace,
            Tok::Vac,
            Tok::Arrow,
            Tok::Ident("x_y".into()),
            Tok::Eof,
        ]
    );
}

#[test]
fn system_declarations() {
    assert_eq!(
        one("system omega N=2 ring series(6);"),
        StmtKind::System {
            kind: Kind::Omega,
            n: 2,
            ring: Ring::Series(6)
        }
    );
    assert_eq!(
        one("system heis N = 1;"),
        StmtKind::System {
            kind: Kind::Heisenberg,
            n: 1,
            ring: Ring::Natural
        }
    );
    assert_eq!(first_error("system omega N=0;").span.column, 16);
}

#[test]
fn let_binds_a_sum_of_terms() {
    let StmtKind::Let { name, expr, .. } = one("let L = b1_{-1} a1_{-1} - (3/2)*x1^2 * psi1_{-2} phi1_{0} + x1;")
    else {
        panic!()
    };
    assert_eq!(name, "L");
    assert_eq!(expr.terms.len(), 3);
    assert!(matches!(&expr.terms[0].body, TermBody::Vars(v) if v.len() == 2));
    assert!(expr.terms[1].negated && expr.terms[1].coef.is_some());
    assert!(matches!(expr.terms[2].body, TermBody::Scalar));
}

#[test]
fn names_inside_states() {
    let StmtKind::Let { expr, .. } = one("let M = 2 * L + x1 L;") else { panic!() };
    assert!(expr.terms.iter().all(|t| matches!(&t.body, TermBody::Name(n, _) if n == "L")));
}

#[test]
fn commands() {
    assert!(matches!(
        one("ope a1_{-1} b1_{-1};"),
        StmtKind::Ope(Ref::Generator(_), Ref::Generator(_))
    ));
    assert!(matches!(
        one("nproduct L -1 (x1 * a1_{-1});"),
        StmtKind::NProduct(Ref::Name(..), -1, Ref::Inline(_))
    ));
    assert_eq!(one("cohomology wmax=3;"), StmtKind::Cohomology(3));
    assert_eq!(one("check borcherds;"), StmtKind::Check(CheckKind::Borcherds));
    assert!(matches!(
        one(r#"transform map "b -> b + b^2" order 6 check-opes;"#),
        StmtKind::Transform { order: 6, action: TransformAction::CheckOpes, .. }
    ));
    assert_eq!(one("p1 sections 3;"), StmtKind::P1(P1Cmd::Sections(3)));
    let StmtKind::Cocycle { name, args } = one(r#"cocycle "c2" "x2^2 d1" "x1^2 d2";"#) else {
        panic!()
    };
    assert_eq!((name.value.as_str(), args.len()), ("c2", 2));
}

#[test]
fn hyphenated_keywords_must_be_contiguous() {
    let d = first_error(r#"transform map "b -> b" order 4 check - opes;"#);
    assert_eq!(d.message, "expected `check-opes`");
}

#[test]
fn let_without_name_points_at_equals() {
    let d = first_error("let = ;");
    assert_eq!((d.span.line, d.span.column), (1, 5));
}

#[test]
fn recovery_reports_every_bad_statement() {
    let diags = parse("frobnicate;\nlet x1 = a1_{-1};\ncheck nothing;\n").unwrap_err();
    let at: Vec<(usize, usize)> = diags.iter().map(|d| (d.span.line, d.span.column)).collect();
    assert_eq!(at, vec![(1, 1), (2, 5), (3, 7)]);
}

#[test]
fn string_contents_keep_script_positions() {
    let d = first_error("transform map \"b -> b +\" order 4 apply L;");
    assert!(d.message.contains("end of input"));
    let e = parse_map_string("b -> b + ", Span { line: 3, column: 10, len: 0 }).unwrap_err();
    assert_eq!((e.span.line, e.span.column), (3, 20));
}

#[test]
fn series_tails_and_powers() {
    let e = parse_state_expr("(1 - 2*x1 + O(3)) * a1_{-1} |0> + x1^-1 |0>").unwrap();
    assert_eq!(e.terms.len(), 2);
    assert!(parse_state_expr("O(0) |0>").is_err());
}
