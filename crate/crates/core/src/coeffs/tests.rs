use super::rational::{binomial, q, qi};
use super::*;
use proptest::prelude::*;

fn x(i: usize) -> Poly {
    Poly::var(i)
}

fn c(n: i64) -> Poly {
    Poly::from_int(n)
}

#[test]
fn rational_cancellation() {
    let a = FunctionElem::rational(x(0), &x(0) + &c(1)).unwrap();
    let b = FunctionElem::rational(&x(0) + &c(1), c(1)).unwrap();
    let p = &a * &b;
    assert_eq!(p.numerator(), &x(0));
    assert!(p.denominator().is_one());
    let half = FunctionElem::poly(x(0).scale(&q(1, 2)));
    assert_eq!(&half + &half, FunctionElem::var(0));
}

#[test]
fn geometric_series() {
    let one_plus = FunctionElem::series(&c(1) + &x(0), 3);
    let alt = FunctionElem::series(
        Poly::from_terms((0..4).map(|k| (Exp::new(vec![k]), qi(if k % 2 == 0 { 1 } else { -1 })))),
        3,
    );
    assert!((&one_plus * &alt).agrees_with(&FunctionElem::one()).unwrap());
    let inv = FunctionElem::series(&c(1) + &x(0), 2).invert().unwrap();
    assert_eq!(inv.numerator(), &(&(&c(1) - &x(0)) + &x(0).pow(2)));
    assert!(matches!(
        FunctionElem::series(x(0), 4).invert(),
        Err(CoeffError::NotInvertible(_))
    ));
    assert_eq!(
        FunctionElem::var(0).invert().unwrap(),
        FunctionElem::rational(c(1), x(0)).unwrap()
    );
}

#[test]
fn quotient_rule() {
    let f = FunctionElem::rational(c(1), &c(1) + &x(0)).unwrap();
    let expected = FunctionElem::rational(c(-1), (&c(1) + &x(0)).pow(2)).unwrap();
    assert_eq!(f.partial(0), expected);
    assert!(FunctionElem::var(0).partial(1).is_zero());
}

#[test]
fn series_derivative_loses_an_order() {
    let s = FunctionElem::series(x(0).pow(3), 3);
    let d = s.partial(0);
    assert_eq!(d.series_order(), Some(2));
    assert_eq!(d.numerator(), &x(0).pow(2).scale(&qi(3)));
}

#[test]
fn inverse_of_x_plus_x2_is_catalan() {
    // (-1 + sqrt(1 + 4y)) / 2 has coefficients (-1)^(n-1) Cat(n-1).
    let g = [FunctionElem::poly(&x(0) + &x(0).pow(2))];
    let f = compose_and_invert(&g, 5).unwrap();
    let mut expected = Poly::zero();
    for n in 1..=5u32 {
        let k = (n - 1) as i64;
        let cat = binomial(2 * k, k as u32) / qi(k + 1);
        let sign = if n % 2 == 1 { qi(1) } else { qi(-1) };
        expected.add_term(Exp::new(vec![n]), sign * cat);
    }
    assert_eq!(f[0].numerator(), &expected);
    assert_eq!(expected.to_string(), "14*x1^5 - 5*x1^4 + 2*x1^3 - x1^2 + x1");
}

#[test]
fn identity_and_singular_changes() {
    let f = compose_and_invert(&[FunctionElem::var(0)], 4).unwrap();
    assert_eq!(f[0].numerator(), &x(0));
    assert!(matches!(
        compose_and_invert(&[FunctionElem::poly(x(0).pow(2))], 3),
        Err(CoeffError::NotInvertibleChange(_))
    ));
}

#[test]
fn log_series() {
    // log(1 + 2x) = 2x - 2x^2 + 8x^3/3 - ...
    let l = series_log(&(&c(1) + &x(0).scale(&qi(2))), 3).unwrap();
    assert_eq!(l.coeff(&Exp::new(vec![1])), qi(2));
    assert_eq!(l.coeff(&Exp::new(vec![2])), qi(-2));
    assert_eq!(l.coeff(&Exp::new(vec![3])), q(8, 3));
}

#[test]
fn laurent_round_trip() {
    let f = FunctionElem::from_laurent(&[(vec![-2], qi(3)), (vec![1], qi(1))]);
    let mut t = f.laurent_terms().unwrap();
    t.sort_by_key(|(v, _)| v[0]);
    assert_eq!(t, vec![(vec![-2], qi(3)), (vec![1], qi(1))]);
}

fn small_poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (prop::collection::vec(0u32..3, nvars), -3i64..4),
        0..4,
    )
    .prop_map(|ts| Poly::from_terms(ts.into_iter().map(|(e, c)| (Exp::new(e), qi(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributive(p in small_poly(2), q in small_poly(2), r in small_poly(2)) {
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
    }

    #[test]
    fn leibniz(p in small_poly(2), q in small_poly(2), i in 0usize..2) {
        let lhs = (&p * &q).partial(i);
        let rhs = &(&p.partial(i) * &q) + &(&p * &q.partial(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_leibniz(p in small_poly(1), q in small_poly(1)) {
        let den = &Poly::from_int(1) + &Poly::var(0);
        let a = FunctionElem::rational(p, den.clone()).unwrap();
        let b = FunctionElem::rational(q, den).unwrap();
        let lhs = (&a * &b).partial(0);
        let rhs = &(&a.partial(0) * &b) + &(&a * &b.partial(0));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_both(p in small_poly(2), q in small_poly(2), r in small_poly(2)) {
        prop_assume!(!r.is_zero());
        let a = &p * &r;
        let b = &q * &r;
        let g = Poly::gcd(&a, &b);
        if !a.is_zero() {
            prop_assert!(a.div_exact(&g).is_some());
        }
        if !b.is_zero() {
            prop_assert!(b.div_exact(&g).is_some());
        }
        if !a.is_zero() && !b.is_zero() {
            prop_assert!(g.div_exact(&r.monic()).is_some());
        }
    }

    #[test]
    fn inversion_round_trip(
        a in prop::collection::vec(-2i64..3, 4),
        h in prop::collection::vec(-2i64..3, 6),
        d in 2u32..6,
    ) {
        let det = a[0] * a[3] - a[1] * a[2];
        prop_assume!(det != 0);
        let quad = |k: usize| {
            Poly::from_terms([
                (Exp::new(vec![2]), qi(h[k])),
                (Exp::new(vec![1, 1]), qi(h[k + 1])),
                (Exp::new(vec![0, 2]), qi(h[k + 2])),
            ])
        };
        let g0 = &(&x(0).scale(&qi(a[0])) + &x(1).scale(&qi(a[1]))) + &quad(0);
        let g1 = &(&x(0).scale(&qi(a[2])) + &x(1).scale(&qi(a[3]))) + &quad(3);
        let g = [FunctionElem::poly(g0), FunctionElem::poly(g1)];
        let f = compose_and_invert(&g, d).unwrap();
        for i in 0..2 {
            let back = f[i].compose(&[g[0].expand(d).unwrap(), g[1].expand(d).unwrap()]).unwrap();
            prop_assert!(back.agrees_with(&FunctionElem::var(i)).unwrap());
        }
    }
}
