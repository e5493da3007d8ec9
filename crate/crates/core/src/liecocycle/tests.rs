use super::*;
use proptest::prelude::*;

fn x() -> Poly {
    Poly::var(0)
}

fn y() -> Poly {
    Poly::var(1)
}

fn dx() -> VectorField {
    VectorField::coordinate(2, 0)
}

fn dy() -> VectorField {
    VectorField::coordinate(2, 1)
}

#[test]
fn pi_of_coordinate_field_differentiates() {
    let d = VectorField::coordinate(1, 0);
    let s = function_state(1, &x().pow(2));
    assert_eq!(pi_vf(&d).apply(&s), function_state(1, &x().scale(&qi(2))));
    assert!(pi_vf(&VectorField::term(1, x().pow(3), 0))
        .apply(&State::vacuum(System::heisenberg(1)))
        .is_zero());
}

#[test]
fn euler_field_is_diagonal() {
    let e = pi_vf(&VectorField::term(2, x(), 0));
    for s in heisenberg_probes(2, 2, 2) {
        let (m, c) = s.terms().next().unwrap();
        let deg = c.as_poly().unwrap().leading().unwrap().0.get(0) as i64;
        let vars = m.expanded();
        let nb = vars.iter().filter(|v| **v == ModeVar::b(1, v.mode)).count() as i64;
        let na = vars.iter().filter(|v| **v == ModeVar::a(1, v.mode)).count() as i64;
        assert_eq!(e.apply(&s), s.scale(&qi(deg + nb - na)), "{s}");
    }
}

#[test]
fn constant_fields_have_no_discrepancy() {
    let r = discrepancy(&dx(), &dy(), 2).unwrap();
    assert!(r.passed(), "{r}");
    assert!(anomaly_state(&dx(), &dy()).is_zero());
}

#[test]
fn one_variable_anomaly_integrates_to_zero() {
    let t1 = VectorField::term(1, x().pow(2), 0);
    let t2 = VectorField::term(1, x(), 0);
    let r = discrepancy(&t1, &t2, 3).unwrap();
    assert!(r.passed(), "{r}");
    // the integrand is (2x)' = 2 b_{-1}, whose zero mode vanishes
    let a = anomaly_state(&t1, &t2);
    assert_eq!(a, OneForm::new(vec![Poly::from_int(2)]).state());
    let p = ModeOperator::new(a, 0);
    assert!(heisenberg_probes(1, 3, 2).iter().all(|s| p.apply(s).is_zero()));
}

#[test]
fn two_variable_anomaly_is_the_class_of_x_dy() {
    let t1 = VectorField::term(2, y().pow(2), 0);
    let t2 = VectorField::term(2, x().pow(2), 1);
    let r = discrepancy(&t1, &t2, 2).unwrap();
    assert!(r.passed(), "{r}");
    let want = OneForm::term(2, x().scale(&qi(-4)), 1);
    assert_eq!(
        cocycle_eval(CocycleKind::C, &[t1.clone(), t2.clone()]).unwrap(),
        Value::Class(OneFormClass::of(&want))
    );
    assert_eq!(OneFormClass::of(&want).representative(), &want);
    let p = pi_form(&want);
    assert!(heisenberg_probes(2, 2, 2).iter().any(|s| !p.apply(s).is_zero()));
}

#[test]
fn exact_forms_act_by_zero_and_classes_do_not() {
    let d = OneForm::exact(1, &x().pow(2));
    let p = pi_form(&d);
    assert!(heisenberg_probes(1, 3, 2).iter().all(|s| p.apply(s).is_zero()));
    let w = OneForm::term(2, x(), 1);
    let p = pi_form(&w);
    let witness = heisenberg_probes(2, 2, 1).into_iter().find(|s| !p.apply(s).is_zero());
    assert!(witness.is_some());
    let r = pi_form_kernel(2, 2, 2);
    assert!(r.passed(), "{r}");
}

#[test]
fn localized_ring_breaks_injectivity() {
    let r = localized_counterexample(2);
    assert!(r.passed(), "{r}");
}

#[test]
fn class_dimensions() {
    // dim Ω¹_d - dim dA_d = N·C(d+N-1, N-1) - C(d+N, N-1)
    for d in 0..5u32 {
        assert_eq!(OneFormClass::basis(1, d).len(), 0);
        assert_eq!(OneFormClass::basis(2, d).len(), d as usize);
    }
    assert_eq!(OneFormClass::basis(3, 1).len(), 3 * 3 - 6);
}

#[test]
fn cochain_values_on_simple_arguments() {
    let t = VectorField::term(2, &x() * &y(), 0);
    assert!(cocycle_eval(CocycleKind::C2, &[dx(), t.clone()]).unwrap().is_zero());
    for (f, g, h) in [
        (x().pow(2), x().pow(3), x()),
        (&x() + &x().pow(2), x().pow(4), Poly::from_int(3)),
    ] {
        let v = |p: Poly| VectorField::term(1, p, 0);
        assert!(cocycle_eval(CocycleKind::C3, &[v(f), v(g), v(h)]).unwrap().is_zero());
    }
    assert!(matches!(
        cocycle_eval(CocycleKind::C3, &[dx(), dy()]),
        Err(LieError::Arity { expected: 3, got: 2, .. })
    ));
}

#[test]
fn ce_differential_of_a_function() {
    let a = x().pow(2);
    let c = Cochain::constant("a", Value::Function(a.clone()), 2);
    let t = VectorField::term(2, y(), 0);
    assert_eq!(
        ce_differential(&c).eval(&[t.clone()]).unwrap(),
        Value::Function(&(&x() * &y()) * &Poly::from_int(2))
    );
    // d_Lie² = 0 on a one-form valued 1-cochain
    let w = Cochain::new("w", 1, ValueModule::OneForms, 2, |a| {
        Value::Form(OneForm::term(2, a[0].components()[0].clone(), 1))
    });
    let dd = ce_differential(&ce_differential(&w));
    for t in sample_tuples(3, 3, 5) {
        assert!(dd.eval(&t).unwrap().is_zero());
    }
}

#[test]
fn identities_on_the_sample() {
    let r = check_identities(20, 11).unwrap();
    assert!(r.passed(), "{r}");
    let want = [
        "sign of d_Lie c2 = s d c3: (c2, c3) +1, ('c2, 'c3) -1, frame -1",
        "c3 (frame) = 'c3 + d_Lie beta: false",
    ];
    for w in want {
        assert!(r.notes.iter().any(|n| n.starts_with(w)), "{r}");
    }
}

#[test]
fn frame_pair_is_not_a_multiple() {
    let fit = fit_69(&sample_fields()).unwrap();
    assert_eq!(fit.c2, Some(q(1, 2)));
    assert_eq!(fit.c3, Some(q(-1, 2)));
    assert!(matches!(compare_69(&sample_fields()), Err(LieError::NoConstant { .. })));
    // constant fields drop out of the fit
    let fit = fit_69(&[dx(), dy()]).unwrap();
    assert_eq!((fit.c2, fit.skipped), (None, 1));
}

#[test]
fn extension_closes_on_a_small_sample() {
    let fields = vec![VectorField::term(2, x(), 1), VectorField::term(2, y().pow(2), 0)];
    let forms = vec![OneForm::term(2, x(), 1), OneForm::term(2, y().pow(2), 0)];
    let r = extension_closure(&fields, &forms, 2).unwrap();
    assert!(r.passed(), "{r}");
}

fn field(seed: u64) -> VectorField {
    random_fields(2, 3, 1, seed).pop().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_satisfies_jacobi(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (field(a), field(b), field(c));
        let j = f.bracket(&g.bracket(&h))
            .add(&g.bracket(&h.bracket(&f)))
            .add(&h.bracket(&f.bracket(&g)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn class_reduction_kills_exact_forms(a in any::<u64>(), b in any::<u64>()) {
        let w = OneForm::new(field(a).components().to_vec());
        let p = field(b).components()[0].clone();
        let shifted = w.add(&OneForm::exact(2, &p));
        prop_assert_eq!(OneFormClass::of(&shifted), OneFormClass::of(&w));
        prop_assert!(OneFormClass::of(&OneForm::exact(2, &p)).is_zero());
    }

    #[test]
    fn lie_derivative_commutes_with_d(a in any::<u64>(), b in any::<u64>()) {
        let t = field(a);
        let p = field(b).components()[1].clone();
        prop_assert_eq!(OneForm::exact(2, &p).lie(&t), OneForm::exact(2, &t.apply(&p)));
    }
}

