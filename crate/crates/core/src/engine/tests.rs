use super::*;
use crate::coeffs::rational::qi;
use crate::coeffs::Poly;
use crate::states::System;

fn st(sys: System, vars: &[ModeVar]) -> State {
    State::normalize(sys, vec![(FunctionElem::one(), vars.to_vec())]).unwrap()
}

fn fst(sys: System, f: FunctionElem, vars: &[ModeVar]) -> State {
    State::normalize(sys, vec![(f, vars.to_vec())]).unwrap()
}

fn x(i: usize) -> Poly {
    Poly::var(i)
}

#[test]
fn b1_on_a_minus1_is_minus_vacuum() {
    let sys = System::heisenberg(1);
    let r = apply_generator_mode(ModeVar::b(1, 1), &st(sys, &[ModeVar::a(1, -1)]));
    assert_eq!(r, State::vacuum(sys).scale(&qi(-1)));
}

#[test]
fn a0_differentiates_coefficients() {
    let sys = System::heisenberg(1);
    let s = State::function(sys, FunctionElem::poly(x(0).pow(2)));
    let r = apply_generator_mode(ModeVar::a(1, 0), &s);
    assert_eq!(r, State::function(sys, FunctionElem::poly(x(0).scale(&qi(2)))));
}

#[test]
fn annihilators_kill_vacuum() {
    let sys = System::omega(1);
    let v = State::vacuum(sys);
    for m in [ModeVar::phi(1, 1), ModeVar::psi(1, 0), ModeVar::a(1, 1), ModeVar::b(1, 1)] {
        assert!(apply_generator_mode(m, &v).is_zero());
    }
}

#[test]
fn fermion_left_derivative_sign() {
    let sys = System::clifford(2);
    // phi^2_1 (psi^1_{-1} psi^2_{-1}) = -psi^1_{-1}
    let s = st(sys, &[ModeVar::psi(1, -1), ModeVar::psi(2, -1)]);
    let r = apply_generator_mode(ModeVar::phi(2, 1), &s);
    assert_eq!(r, st(sys, &[ModeVar::psi(1, -1)]).scale(&qi(-1)));
}

#[test]
fn a_b_pairing() {
    let sys = System::heisenberg(2);
    let a1 = st(sys, &[ModeVar::a(1, -1)]);
    let x1 = st(sys, &[ModeVar::b(1, 0)]);
    let x2 = st(sys, &[ModeVar::b(2, 0)]);
    assert_eq!(nth_product(&a1, 0, &x1), State::vacuum(sys));
    assert!(nth_product(&a1, 0, &x2).is_zero());
    let o = ope(&a1, &x1);
    assert_eq!(o.len(), 1);
    assert_eq!(o[&1], State::vacuum(sys));
    assert!(ope(&a1, &x2).is_empty());
    // b(z) a(w) ~ -1/(z-w)
    assert_eq!(nth_product(&x1, 0, &a1), State::vacuum(sys).scale(&qi(-1)));
}

#[test]
fn fermion_pairing() {
    let sys = System::clifford(1);
    let phi = st(sys, &[ModeVar::phi(1, 0)]);
    let psi = st(sys, &[ModeVar::psi(1, -1)]);
    assert_eq!(ope(&phi, &psi)[&1], State::vacuum(sys));
    assert_eq!(ope(&psi, &phi)[&1], State::vacuum(sys));
    assert!(ope(&phi, &phi).is_empty());
    assert!(ope(&psi, &psi).is_empty());
}

#[test]
fn vacuum_axiom() {
    let sys = System::omega(2);
    let vac = State::vacuum(sys);
    let samples = [
        fst(sys, FunctionElem::poly(x(0).pow(2)), &[ModeVar::a(1, -1)]),
        st(sys, &[ModeVar::psi(1, -2), ModeVar::phi(2, 0), ModeVar::b(1, -1)]),
        fst(sys, FunctionElem::poly(&x(0) * &x(1)), &[ModeVar::a(2, -2), ModeVar::a(1, -1)]),
        State::function(sys, FunctionElem::rational(Poly::one(), &Poly::one() + &x(0)).unwrap()),
    ];
    for s in &samples {
        assert_eq!(&nth_product(s, -1, &vac), s, "vacuum axiom for {s}");
    }
}

#[test]
fn heisenberg_virasoro_quartic_pole() {
    let sys = System::heisenberg(1);
    let l = st(sys, &[ModeVar::b(1, -1), ModeVar::a(1, -1)]);
    assert_eq!(nth_product(&l, 3, &l), State::vacuum(sys));
    assert_eq!(nth_product(&l, 1, &l), l.scale(&qi(2)));
    assert_eq!(nth_product(&l, 0, &l), translation(&l));
}

#[test]
fn zero_modes() {
    let sys = System::heisenberg(1);
    let a = st(sys, &[ModeVar::a(1, -1)]);
    let s = State::function(sys, FunctionElem::poly(x(0).pow(3)));
    assert_eq!(
        fourier_derivation(&a)(&s),
        State::function(sys, FunctionElem::poly(x(0).pow(2).scale(&qi(3))))
    );
    let f = State::function(sys, FunctionElem::poly(x(0).pow(2)));
    let df = translation(&f);
    assert_eq!(df, fst(sys, FunctionElem::poly(x(0).scale(&qi(2))), &[ModeVar::b(1, -1)]));
    for t in [&s, &a, &st(sys, &[ModeVar::b(1, -1), ModeVar::a(1, -2)])] {
        assert!(nth_product(&df, 0, t).is_zero());
    }
    let l = st(sys, &[ModeVar::b(1, -1), ModeVar::a(1, -1)]);
    let b1 = st(sys, &[ModeVar::b(1, -1)]);
    assert_eq!(nth_product(&l, 0, &b1), st(sys, &[ModeVar::b(1, -2)]).scale(&qi(2)));
}

#[test]
fn taylor_fields() {
    let sys = System::heisenberg(1);
    let vac = State::vacuum(sys);
    let sq = FunctionElem::poly(x(0).pow(2));
    assert_eq!(taylor_field_mode(&sq, 0, &vac).unwrap(), State::function(sys, sq.clone()));
    let f = FunctionElem::rational(Poly::one(), &Poly::one() + &x(0)).unwrap();
    let expected = fst(
        sys,
        FunctionElem::rational(Poly::from_int(-1), (&Poly::one() + &x(0)).pow(2)).unwrap(),
        &[ModeVar::b(1, -1)],
    );
    assert_eq!(taylor_field_mode(&f, -1, &vac).unwrap(), expected);
    // degree one: f = x reproduces b(z)
    let s = st(sys, &[ModeVar::a(1, -2), ModeVar::a(1, -1)]);
    for k in -2..=2 {
        let lhs = taylor_field_mode(&FunctionElem::var(0), k, &s).unwrap();
        let rhs = apply_generator_mode(ModeVar::b(1, k as i32), &s);
        assert_eq!(lhs, rhs, "mode {k}");
    }
}

#[test]
fn function_innermost_ordering() {
    // (x^2)_(-1) a_{-1} differs from x^2 a_{-1} by a b_{-1} term
    let sys = System::heisenberg(1);
    let sq = State::function(sys, FunctionElem::poly(x(0).pow(2)));
    let a = st(sys, &[ModeVar::a(1, -1)]);
    let lhs = nth_product(&sq, -1, &a);
    let expected = &fst(sys, FunctionElem::poly(x(0).pow(2)), &[ModeVar::a(1, -1)])
        - &st(sys, &[ModeVar::b(1, -1)]).scale(&qi(2));
    assert_eq!(lhs, expected);
}

#[test]
fn series_underflow_is_reported() {
    let sys = System::heisenberg(1);
    let f = FunctionElem::series(x(0).pow(3), 1);
    let s = st(sys, &[ModeVar::a(1, -1), ModeVar::a(1, -1), ModeVar::a(1, -1)]);
    assert!(matches!(
        taylor_field_mode(&f, 3, &s),
        Err(CoeffError::TruncationUnderflow { .. })
    ));
}
