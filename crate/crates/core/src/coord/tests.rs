use super::*;
use crate::coeffs::rational::qi;
use crate::states::Monomial;

fn x() -> Poly {
    Poly::var(0)
}

fn series_1d(coeffs: &[i64], d: u32) -> FunctionElem {
    let p = Poly::from_terms(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (Exp::var(0).with(0, k as u32), qi(*c))),
    );
    FunctionElem::series(p, d)
}

fn x_plus_x2(d: u32) -> CoordChange {
    CoordChange::series(vec![FunctionElem::poly(&x() + &x().pow(2))], d).unwrap()
}

fn gen(sys: System, v: ModeVar) -> State {
    State::generator(sys, v).unwrap()
}

fn inv_x() -> CoordChange {
    let r = FunctionElem::rational(Poly::one(), x()).unwrap();
    CoordChange::exact(vec![r.clone()], vec![r]).unwrap()
}

#[test]
fn identity_change_fixes_generators() {
    let sys = System::omega(2);
    let cc = CoordChange::identity(2, 5);
    let gens = tilded_generators(&cc, sys, Correction::Fermionic).unwrap();
    for i in 1..=2 {
        assert_eq!(gens.a[i - 1], gen(sys, ModeVar::a(i, -1)));
        assert_eq!(gens.psi[i - 1], gen(sys, ModeVar::psi(i, -1)));
        assert_eq!(gens.phi[i - 1], gen(sys, ModeVar::phi(i, 0)));
        assert_eq!(gens.b[i - 1], State::function(sys, FunctionElem::var(i - 1)));
    }
}

#[test]
fn quadratic_change_generators() {
    let sys = System::omega(1);
    let d = 6;
    let cc = x_plus_x2(d);
    let gens = tilded_generators(&cc, sys, Correction::Fermionic).unwrap();
    assert_eq!(gens.b[0], State::function(sys, series_1d(&[0, 1, 1], d)));
    let mut phi = State::zero(sys);
    phi.add_term(Monomial::from_vars(&[ModeVar::phi(1, 0)]).unwrap().1, series_1d(&[1, 2], d));
    assert_eq!(gens.phi[0], phi);
    // a~ = a_{-1}/(1+2x) + (1/(1+2x))' phi_0 psi_{-1}; frozen geometric series
    let m = series_1d(&[1, -2, 4, -8, 16, -32], 5);
    let dm = series_1d(&[-2, 8, -24, 64, -160], 4);
    let (neg, fm) = Monomial::from_vars(&[ModeVar::phi(1, 0), ModeVar::psi(1, -1)]).unwrap();
    let mut want = State::zero(sys);
    want.add_term(Monomial::from_vars(&[ModeVar::a(1, -1)]).unwrap().1, m);
    want.add_term(fm, if neg { -dm } else { dm });
    assert_eq!(gens.a[0], want);
    // transform of a_{-1}|0> is the image field at the vacuum
    let t = transform_state(&cc, &gen(sys, ModeVar::a(1, -1))).unwrap();
    assert_eq!(t, want);
}

#[test]
fn vacuum_and_functions_transform_by_substitution() {
    let sys = System::omega(1);
    let cc = x_plus_x2(6);
    let vac = State::vacuum(sys);
    assert_eq!(transform_state(&cc, &vac).unwrap(), vac);
    let x2 = State::function(sys, FunctionElem::poly(x().pow(2)));
    let want = State::function(sys, series_1d(&[0, 0, 1, 2, 1], 6));
    assert_eq!(transform_state(&cc, &x2).unwrap(), want);
}

#[test]
fn inversion_on_the_line_uses_the_curve_correction() {
    let sys = System::heisenberg(1);
    let cc = inv_x();
    let a = gen(sys, ModeVar::a(1, -1));
    let t = transform_state(&cc, &a).unwrap();
    // u = 1/g' = -x^2 and u'^2/(2u) = -2
    let want = State::normalize(
        sys,
        vec![
            (FunctionElem::poly(-x().pow(2)), vec![ModeVar::a(1, -1)]),
            (FunctionElem::int(-2), vec![ModeVar::b(1, -1)]),
        ],
    )
    .unwrap();
    assert_eq!(t, want, "got {t}");
    // the image pairs correctly with x~ = 1/x
    let bt = State::function(sys, cc.g()[0].clone());
    assert_eq!(nth_product(&t, 0, &bt), State::vacuum(sys));
    assert!(nth_product(&t, 1, &t).is_zero());
    assert!(nth_product(&t, 0, &t).is_zero());
    // and the change is an involution
    assert_eq!(transform_state(&cc, &t).unwrap(), a);
}

#[test]
fn ope_table_for_quadratic_change() {
    let cc = x_plus_x2(8);
    let r = verify_ope_preservation(&cc, System::omega(1), Correction::Fermionic, 2).unwrap();
    assert!(r.passed(), "{r}");
    let r = verify_ope_preservation(&cc, System::heisenberg(1), Correction::Curve, 2).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn dropping_the_correction_breaks_the_table() {
    let cc = x_plus_x2(8);
    let r = verify_ope_preservation(&cc, System::omega(1), Correction::Dropped, 1).unwrap();
    assert!(!r.passed());
    assert!(r.failures().any(|c| c.name == "a~1 a~1" && c.detail.contains("pole 2")));
    let r = verify_ope_preservation(&cc, System::heisenberg(1), Correction::Dropped, 1).unwrap();
    assert!(r.failures().any(|c| c.name == "a~1 a~1"));
}

#[test]
fn composition_is_contravariant() {
    let d = 6;
    let g1 = x_plus_x2(d);
    let g2 = CoordChange::series(vec![FunctionElem::poly(&x() + &x().pow(3))], d).unwrap();
    let r = verify_composition(&g1, &g2, System::omega(1), 1).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.notes.iter().any(|n| n.contains("does not match")));
}

#[test]
fn linear_changes_compose_in_both_orders() {
    let lin = |a: i64, b: i64, c: i64, e: i64| {
        let p = |s: i64, t: i64| {
            FunctionElem::poly(Poly::from_terms([(Exp::var(0), qi(s)), (Exp::var(1), qi(t))]))
        };
        CoordChange::series(vec![p(a, b), p(c, e)], 3).unwrap()
    };
    let c1 = lin(2, 1, 1, 1);
    let c2 = lin(1, 3, 0, 1);
    let r = verify_composition(&c1, &c2, System::omega(2), 1).unwrap();
    assert!(r.passed(), "{r}");
    // the images of a and psi carry no correction for linear maps
    let gens = tilded_generators(&c1, System::omega(2), Correction::Fermionic).unwrap();
    assert!(gens.a[0].terms().all(|(m, c)| c.is_zero() || m.degree_of(Family::Psi) == 0));
}

#[test]
fn structure_anomalies_for_quadratic_change() {
    let (diff, r) = structure_transform(&x_plus_x2(8)).unwrap();
    assert!(r.passed(), "{r}");
    // J~ - J = 2/(1+2x) b_{-1}, frozen through x^3
    let want = State::normalize(
        System::omega(1),
        vec![(series_1d(&[2, -4, 8, -16], 3), vec![ModeVar::b(1, -1)])],
    )
    .unwrap();
    assert_eq!(diff.j.truncate(3), want);
}

#[test]
fn unimodular_linear_change_keeps_j_and_q() {
    let p = |s: i64, t: i64| {
        FunctionElem::poly(Poly::from_terms([(Exp::var(0), qi(s)), (Exp::var(1), qi(t))]))
    };
    let cc = CoordChange::series(vec![p(2, 1), p(1, 1)], 4).unwrap();
    let (diff, r) = structure_transform(&cc).unwrap();
    assert!(r.passed(), "{r}");
    assert!(diff.j.vanishes_where_known() && diff.q.vanishes_where_known());
}

#[test]
fn filtration_symbols_are_classical() {
    let r = filtration_check(&x_plus_x2(6)).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn random_changes_are_invertible_and_seeded() {
    let a = random_change(2, 4, 7).unwrap();
    let b = random_change(2, 4, 7).unwrap();
    assert_eq!(a.g(), b.g());
    let back: Vec<FunctionElem> = a.g().iter().map(|c| c.compose(a.f()).unwrap()).collect();
    for (i, c) in back.iter().enumerate() {
        assert_eq!(*c, FunctionElem::var(i));
    }
}
