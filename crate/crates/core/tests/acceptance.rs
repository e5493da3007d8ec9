//! The twelve acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Two criteria are known to fail on their literal statement, and the test
//! pins both the failing set and the measured values:
//! - 9: the printed right side of the reflection formula is the unipotent
//!   part only; the full reflection gives its negative.
//! - 11: the frame cocycle pair is `(½ c², -½ c³)`, so no single constant
//!   relates it to `(c², c³)`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use chiral::cdr::{build_structure, check_topological, check_virasoro, cohomology, homotopy_check, virasoro};
use chiral::coeffs::rational::{q, qi};
use chiral::coeffs::{FunctionElem, Poly};
use chiral::coord::{
    random_change, structure_transform, verify_composition, verify_ope_preservation, CoordChange,
    Correction,
};
use chiral::engine::laws::check_laws;
use chiral::engine::ope;
use chiral::liecocycle::{
    check_identities, cocycle_eval, compare_69, discrepancy, sample_fields, CocycleKind, LieError,
    OneFormClass, Value,
};
use chiral::report::Report;
use chiral::sheaf::{euler_character, glue_check_p1, global_sections, reflection, wakimoto_check};
use chiral::states::{Family, ModeVar, State, System};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(r: &Report) -> Outcome {
    let fails: Vec<String> = r.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Outcome {
        passed: fails.is_empty(),
        detail: if fails.is_empty() {
            format!("{} checks", r.checks.len())
        } else {
            fails.join("; ")
        },
    }
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|o| o.passed),
        detail: parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join(" | "),
    }
}

fn x_plus(k: u32, d: u32) -> CoordChange {
    let x = Poly::var(0);
    CoordChange::series(vec![FunctionElem::poly(&x + &x.pow(k))], d).unwrap()
}

fn generator(sys: System, f: Family, i: usize) -> State {
    let mode = if matches!(f, Family::Phi) { 0 } else { -1 };
    State::generator(sys, ModeVar::new(f, i, mode)).unwrap()
}

/// Free-field OPE tables for every generator pair of `Ω_N`, `N <= 3`.
fn criterion_1() -> Outcome {
    let mut r = Report::new("free fields");
    for n in 1..=3 {
        let sys = System::omega(n);
        let vac = State::vacuum(sys);
        let fams = [Family::A, Family::B, Family::Phi, Family::Psi];
        for f in fams {
            for g in fams {
                for i in 1..=n {
                    for j in 1..=n {
                        let x = if f == Family::B {
                            State::function(sys, FunctionElem::var(i - 1))
                        } else {
                            generator(sys, f, i)
                        };
                        let y = if g == Family::B {
                            State::function(sys, FunctionElem::var(j - 1))
                        } else {
                            generator(sys, g, j)
                        };
                        let want = match (f, g) {
                            (Family::A, Family::B) if i == j => Some(vac.clone()),
                            (Family::B, Family::A) if i == j => Some(-vac.clone()),
                            (Family::Phi, Family::Psi) | (Family::Psi, Family::Phi) if i == j => {
                                Some(vac.clone())
                            }
                            _ => None,
                        };
                        let got = ope(&x, &y);
                        let ok = match &want {
                            Some(v) => got.len() == 1 && got.get(&1) == Some(v),
                            None => got.is_empty(),
                        };
                        r.check(format!("N={n} {}{i} {}{j}", f.name(), g.name()), ok, format!("{got:?}"));
                    }
                }
            }
        }
    }
    from_report(&r)
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for n in 1..=3 {
        for (sys, c) in [
            (System::heisenberg(n), 2 * n as i64),
            (System::clifford(n), -2 * n as i64),
            (System::omega(n), 0),
        ] {
            parts.push(from_report(&check_virasoro(&virasoro(sys), &qi(c))));
        }
    }
    merge(parts)
}

fn criterion_3() -> Outcome {
    merge((1..=2).map(|n| from_report(&check_topological(&build_structure(n)))).collect())
}

fn criterion_4() -> Outcome {
    let mut r = Report::new("d^2 and homotopy");
    for n in 1..=2usize {
        let bmax = bmax(n);
        for w in 0..=4 {
            let (_, d2) = cohomology(n, w, bmax);
            r.check(format!("d^2 = 0, N={n}, w={w}, Bmax={bmax}"), d2, "");
            r.absorb(homotopy_check(n, w, bmax));
        }
    }
    from_report(&r)
}

/// Bigrade window for the cohomology slices.
fn bmax(n: usize) -> u32 {
    if n == 1 {
        5
    } else {
        3
    }
}

fn criterion_5() -> Outcome {
    let mut r = Report::new("cohomology");
    for n in 1..=2usize {
        let bmax = bmax(n);
        for w in 0..=3 {
            let (rows, _) = cohomology(n, w, bmax);
            let nonzero: Vec<(i32, usize)> =
                rows.iter().filter(|row| row.dim_h > 0).map(|row| (row.charge, row.dim_h)).collect();
            let want = if w == 0 { vec![(0, 1)] } else { vec![] };
            r.check(format!("H, N={n}, w={w}, Bmax={bmax}"), nonzero == want, format!("{nonzero:?}"));
        }
    }
    from_report(&r)
}

fn criterion_6() -> Outcome {
    let mut parts = vec![
        from_report(
            &verify_ope_preservation(&x_plus(2, 8), System::omega(1), Correction::Fermionic, 3).unwrap(),
        ),
    ];
    for seed in [SEED, SEED + 1] {
        let cc = random_change(2, 5, seed).unwrap();
        parts.push(from_report(
            &verify_ope_preservation(&cc, System::omega(2), Correction::Fermionic, 2).unwrap(),
        ));
    }
    let control = verify_ope_preservation(&x_plus(2, 8), System::omega(1), Correction::Dropped, 3).unwrap();
    parts.push(Outcome {
        passed: !control.passed(),
        detail: format!("dropped-fermion control fails {} checks", control.failures().count()),
    });
    merge(parts)
}

fn criterion_7() -> Outcome {
    from_report(&verify_composition(&x_plus(2, 8), &x_plus(3, 8), System::omega(1), 1).unwrap())
}

fn criterion_8() -> Outcome {
    from_report(&structure_transform(&x_plus(2, 8)).unwrap().1)
}

/// The printed value `x² a_{-1} + 2 b_{-1}` for the reflection of `a_{-1}`.
fn printed_reflection() -> State {
    let sys = System::heisenberg(1);
    State::normalize(
        sys,
        vec![
            (FunctionElem::poly(Poly::var(0).pow(2)), vec![ModeVar::a(1, -1)]),
            (FunctionElem::int(2), vec![ModeVar::b(1, -1)]),
        ],
    )
    .unwrap()
}

fn reflection_of_a() -> State {
    let a = State::generator(System::heisenberg(1), ModeVar::a(1, -1)).unwrap();
    reflection(&a, 12).unwrap()
}

fn criterion_9() -> Outcome {
    let glue = from_report(&glue_check_p1(2).unwrap());
    let w = wakimoto_check().unwrap();
    let level = Outcome {
        passed: w.report.passed() && w.level == Some(qi(-2)),
        detail: format!("level {:?}", w.level.map(|l| l.to_string())),
    };
    let got = reflection_of_a();
    let literal = Outcome {
        passed: got == printed_reflection(),
        detail: format!("r(1) a_{{-1}} = {got}"),
    };
    merge(vec![glue, level, literal])
}

fn criterion_10() -> Outcome {
    // Π(1-q^n)^{-2} by convolution, then partial sums for the (1-q)^{-1} factor
    let mut p = vec![0i64; 6];
    p[0] = 1;
    for _ in 0..2 {
        for part in 1..6 {
            for k in part..6 {
                p[k] += p[k - part];
            }
        }
    }
    let oracle_ok = p == vec![1, 2, 5, 10, 20, 36];
    let gamma: Vec<usize> = (0..4).map(|w| p[..=w].iter().sum::<i64>() as usize).collect();
    let rows = global_sections(3, 2, 64).unwrap();
    let ranks: Vec<usize> = rows.iter().map(|r| r.rank).collect();
    let h1: Vec<usize> = rows.iter().map(|r| r.h1).collect();
    let shifted: Vec<usize> = (0..4).map(|w| if w == 0 { 0 } else { ranks[w - 1] }).collect();
    let euler = euler_character(5);
    Outcome {
        passed: oracle_ok && euler == p && ranks == gamma && h1 == shifted,
        detail: format!("euler {euler:?}, sections {ranks:?}, H1 {h1:?}"),
    }
}

fn criterion_11() -> Outcome {
    let identities = from_report(&check_identities(20, SEED).unwrap());
    let fields = sample_fields();
    let mut disc = Report::new("discrepancy");
    let mut lifts = Report::new("c~ -> -2c");
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let (f, g) = (fields[i].clone(), fields[j].clone());
            disc.absorb(discrepancy(&f, &g, 3).unwrap());
            let c2 = cocycle_eval(CocycleKind::C2, &[f.clone(), g.clone()]).unwrap();
            let c = cocycle_eval(CocycleKind::C, &[f.clone(), g.clone()]).unwrap();
            let ok = match (c2, c) {
                (Value::Form(w), Value::Class(k)) => OneFormClass::of(&w) == k.scale(&qi(-2)),
                _ => false,
            };
            lifts.check(format!("({f}, {g})"), ok, "");
        }
    }
    let lambda = match compare_69(&fields) {
        Ok(l) => Outcome {
            passed: true,
            detail: format!("lambda = {l}"),
        },
        Err(e) => Outcome {
            passed: false,
            detail: e.to_string(),
        },
    };
    merge(vec![identities, from_report(&disc), from_report(&lifts), lambda])
}

fn criterion_12() -> Outcome {
    merge(
        [System::heisenberg(2), System::clifford(2), System::omega(2), System::omega(1)]
            .into_iter()
            .map(|sys| from_report(&check_laws(sys, SEED, 40)))
            .collect(),
    )
}

#[test]
fn acceptance() {
    let criteria: Vec<(u32, &str, fn() -> Outcome, u64)> = vec![
        (1, "free-field OPE tables", criterion_1, 1),
        (2, "central charges", criterion_2, 5),
        (3, "topological algebra", criterion_3, 10),
        (4, "d^2 = 0 and homotopy", criterion_4, 30),
        (5, "cohomology of the affine space", criterion_5, 120),
        (6, "OPE preservation under coordinate changes", criterion_6, 120),
        (7, "composition of coordinate changes", criterion_7, 60),
        (8, "transformation of L, J, Q, G", criterion_8, 60),
        (9, "projective line", criterion_9, 120),
        (10, "characters and Cech ranks", criterion_10, 120),
        (11, "cocycles", criterion_11, 120),
        (12, "engine soundness", criterion_12, 120),
    ];
    let mut failed = BTreeSet::new();
    for (k, name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let ok = out.passed && in_time;
        println!(
            "criterion {k:>2} {}: {name} [{:.2}s / {limit}s] {}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
        if !ok {
            failed.insert(k);
        }
    }
    assert_eq!(failed, BTreeSet::from([9, 11]), "unexpected set of failing criteria");

    // the measured values behind the two known failures
    assert_eq!(reflection_of_a(), -printed_reflection());
    match compare_69(&sample_fields()) {
        Err(LieError::NoConstant { c2, c3, .. }) => {
            assert_eq!((c2, c3), (Some(q(1, 2)), Some(q(-1, 2))));
        }
        other => panic!("expected NoConstant, got {other:?}"),
    }
}
