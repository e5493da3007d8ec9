//! The vertex algebra identities the engine must satisfy, checked on seeded
//! samples of homogeneous states: the commutator formula, translation
//! covariance, the derivation property of zero modes, and agreement of `Ω_N`
//! with its Heisenberg and Clifford factors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nth_product, translation};
use crate::cdr::exponents;
use crate::coeffs::rational::{binomial, qi};
use crate::coeffs::{FunctionElem, Poly};
use crate::report::Report;
use crate::states::{basis_monomials, Family, Kind, State, System};

/// A homogeneous random state of weight `w`: one or two basis monomials of
/// the same parity with small integer polynomial coefficients.
pub fn random_state(sys: System, w: i32, rng: &mut ChaCha8Rng) -> State {
    let ms = basis_monomials(sys, w);
    let first = ms.choose(rng).expect("every weight has a monomial").clone();
    let mut s = State::zero(sys);
    let mut picks = vec![first.clone()];
    if let Some(m) = ms.choose(rng) {
        if m.is_odd() == first.is_odd() && *m != first {
            picks.push(m.clone());
        }
    }
    for m in picks {
        let mut p = Poly::from_int(rng.gen_range(1..=3));
        if sys.kind.has(Family::B) {
            for e in (1..=2).flat_map(|d| exponents(sys.n, d)) {
                if rng.gen_bool(0.25) {
                    p.add_term(e, qi(rng.gen_range(-2..=2)));
                }
            }
        }
        s.add_term(m, FunctionElem::poly(p));
    }
    s
}

fn parity(s: &State) -> bool {
    s.parity().expect("homogeneous parity")
}

/// `[a_(m), b_(n)] s` and `Σ_k C(m,k) (a_(k) b)_(m+n-k) s`.
pub fn commutator_sides(a: &State, b: &State, m: i64, n: i64, s: &State) -> (State, State) {
    let sign = if parity(a) && parity(b) { qi(1) } else { qi(-1) };
    let mut lhs = nth_product(a, m, &nth_product(b, n, s));
    lhs.add_scaled(&nth_product(b, n, &nth_product(a, m, s)), &sign);
    let mut rhs = State::zero(s.system());
    let top = (a.max_weight() + b.max_weight()) as i64;
    for k in 0..=top {
        let ab = nth_product(a, k, b);
        if !ab.is_zero() {
            rhs.add_scaled(&nth_product(&ab, m + n - k, s), &binomial(m, k as u32));
        }
    }
    (lhs, rhs)
}

/// `(T a)_(n) s` and `-n a_(n-1) s`.
pub fn translation_sides(a: &State, n: i64, s: &State) -> (State, State) {
    (nth_product(&translation(a), n, s), nth_product(a, n - 1, s).scale(&qi(-n)))
}

/// `a_(0)(b_(n) c)` and `(a_(0) b)_(n) c ± b_(n)(a_(0) c)`.
pub fn derivation_sides(a: &State, b: &State, n: i64, c: &State) -> (State, State) {
    let lhs = nth_product(a, 0, &nth_product(b, n, c));
    let sign = if parity(a) && parity(b) { qi(-1) } else { qi(1) };
    let mut rhs = nth_product(&nth_product(a, 0, b), n, c);
    rhs.add_scaled(&nth_product(b, n, &nth_product(a, 0, c)), &sign);
    (lhs, rhs)
}

fn record(report: &mut Report, name: String, sides: (State, State)) {
    let (l, r) = sides;
    let ok = l == r;
    report.check(name, ok, if ok { String::new() } else { format!("{l} vs {r}") });
}

/// The commutator formula for `samples` random triples with `|a|, |b| <= 2`,
/// `|s| <= 2` and `m, n` in `-2..=2`.
pub fn check_borcherds(sys: System, seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new(format!("commutator formula, seed {seed}"));
    for _ in 0..samples {
        let a = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let b = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let s = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let (m, n) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        record(&mut r, format!("[({a})_({m}), ({b})_({n})] on {s}"), commutator_sides(&a, &b, m, n, &s));
    }
    r
}

/// Translation covariance on weight `<= 3` targets.
pub fn check_translation(sys: System, seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new(format!("translation, seed {seed}"));
    for _ in 0..samples {
        let a = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let s = random_state(sys, rng.gen_range(0..=3), &mut rng);
        let n = rng.gen_range(-2..=3);
        record(&mut r, format!("(T {a})_({n}) on {s}"), translation_sides(&a, n, &s));
    }
    r
}

/// The zero mode of a random state is a derivation of `_(n)` products.
pub fn check_derivation(sys: System, seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new(format!("derivation, seed {seed}"));
    for _ in 0..samples {
        let a = random_state(sys, rng.gen_range(1..=2), &mut rng);
        let b = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let c = random_state(sys, rng.gen_range(0..=2), &mut rng);
        let n = rng.gen_range(-2..=2);
        record(&mut r, format!("({a})_(0) on ({b})_({n}) {c}"), derivation_sides(&a, &b, n, &c));
    }
    r
}

/// Products of pure `V_N` (or `Λ_N`) states agree whether computed in the
/// factor or in `Ω_N`.
pub fn check_tensor(n: usize, seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = System::omega(n);
    let mut r = Report::new(format!("tensor factors, seed {seed}"));
    for factor in [System::heisenberg(n), System::clifford(n)] {
        for _ in 0..samples {
            let a = random_state(factor, rng.gen_range(0..=2), &mut rng);
            let b = random_state(factor, rng.gen_range(0..=2), &mut rng);
            let k = rng.gen_range(-2..=3);
            let alone = nth_product(&a, k, &b).with_system(omega);
            let inside = nth_product(&a.clone().with_system(omega), k, &b.clone().with_system(omega));
            let name = match factor.kind {
                Kind::Heisenberg => "V",
                _ => "Λ",
            };
            record(&mut r, format!("{name}: ({a})_({k}) {b}"), (alone, inside));
        }
    }
    r
}

/// All four families for one system.
pub fn check_laws(sys: System, seed: u64, samples: usize) -> Report {
    let mut r = Report::new(format!("engine laws N = {}", sys.n));
    r.absorb(check_borcherds(sys, seed, samples));
    r.absorb(check_translation(sys, seed.wrapping_add(1), samples));
    r.absorb(check_derivation(sys, seed.wrapping_add(2), samples));
    r.absorb(check_tensor(sys.n, seed.wrapping_add(3), samples));
    r
}
