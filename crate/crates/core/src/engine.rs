//! Mode operators on states: generator modes, n-th products `a_(n) b`,
//! singular OPE parts, and Taylor-formula fields of coefficient functions.
//!
//! Conventions (all brackets with central element 1):
//! `a(z) = Σ a_n z^{-n-1}`, `b(z) = Σ b_n z^{-n}`, `phi(z) = Σ phi_n z^{-n}`,
//! `psi(z) = Σ psi_n z^{-n-1}`, `[a_m, b_n] = δ_{m+n,0}`,
//! `{phi_m, psi_n} = δ_{m+n,0}`. Borcherds modes are `x_(j) = x_{j+1}` for
//! `b, phi` and `x_(j) = x_j` for `a, psi`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::coeffs::rational::{binomial, factorial, qi};
use crate::coeffs::{CoeffError, FunctionElem, Rational};
use crate::states::{Family, ModeVar, Monomial, State};

/// Apply the generator mode `v` (any integer mode) to `s`.
pub fn apply_generator_mode(v: ModeVar, s: &State) -> State {
    let i = v.index;
    let p = v.mode;
    let mut out = State::zero(s.system());
    if v.is_creation() {
        if v.family == Family::B && p == 0 {
            return s.mul_function(&FunctionElem::var(i - 1));
        }
        for (m, c) in s.terms() {
            if let Some((neg, m2)) = m.insert(v) {
                out.add_term(m2, if neg { -c } else { c.clone() });
            }
        }
        return out;
    }
    if v.family == Family::A && p == 0 {
        return s.map_coeffs(|c| c.partial(i - 1));
    }
    // annihilation: left derivative by the dual creation variable
    let target = ModeVar::new(v.family.dual(), i, -p);
    let sign = if v.family == Family::B {
        -Rational::one()
    } else {
        Rational::one()
    };
    for (m, c) in s.terms() {
        if let Some((k, m2)) = m.remove(&target) {
            out.add_term(m2, c.scale(&(&k * &sign)));
        }
    }
    out
}

/// Borcherds mode `x_(j)` of a generator field.
pub fn generator_borcherds(family: Family, index: usize, j: i64, s: &State) -> State {
    let phys = j + 1 - family.field_weight() as i64;
    apply_generator_mode(ModeVar::new(family, index, phys as i32), s)
}

/// Derivative order `k` with `v |0> = ∂^(k) x(z)|0>` at `z = 0`.
fn derivative_order(v: &ModeVar) -> i64 {
    -(v.mode as i64) - v.family.field_weight() as i64
}

/// `X_(j) s` for the field of the single creation variable `v`:
/// `(∂^(k) x)_(j) = (-1)^k C(j, k) x_(j-k)`.
fn var_field_mode(v: &ModeVar, j: i64, s: &State) -> State {
    let k = derivative_order(v);
    let c = binomial(j, k as u32);
    if c.is_zero() {
        return State::zero(s.system());
    }
    let c = if k % 2 == 1 { -c } else { c };
    generator_borcherds(v.family, v.index, j - k, s).scale(&c)
}

fn weight_of(vars: &[ModeVar]) -> i64 {
    vars.iter().map(|v| v.weight() as i64).sum()
}

/// `a_(n) b`.
pub fn nth_product(a: &State, n: i64, b: &State) -> State {
    let mut out = State::zero(b.system());
    for (m, f) in a.terms() {
        let vars = m.expanded();
        let r = term_product(&vars, f, n, b);
        out = &out + &r;
    }
    out
}

/// Mode `n` of the field `:x_1(z) :x_2(z) ... :x_k(z) f(z):...:` on `s`,
/// with the coefficient function innermost.
fn term_product(vars: &[ModeVar], f: &FunctionElem, n: i64, s: &State) -> State {
    let sys = s.system();
    if s.is_zero() {
        return State::zero(sys);
    }
    let Some((x, rest)) = vars.split_first() else {
        return taylor_mode(f, n, s);
    };
    let ws = s.max_weight() as i64;
    let wr = weight_of(rest);
    let mut out = State::zero(sys);
    // creation part: Σ_{j<0} X_(j) R_(n-j-1) s
    for j in (n - wr - ws)..0 {
        let inner = term_product(rest, f, n - j - 1, s);
        if !inner.is_zero() {
            out = &out + &var_field_mode(x, j, &inner);
        }
    }
    // annihilation part: ± Σ_{j>=0} R_(n-j-1) X_(j) s
    let k = derivative_order(x);
    let hi = ws + k + x.family.field_weight() as i64 - 1;
    let odd_rest = rest.iter().filter(|v| v.is_odd()).count() % 2 == 1;
    let sign = if x.is_odd() && odd_rest { -Rational::one() } else { Rational::one() };
    for j in k..=hi {
        let xs = var_field_mode(x, j, s);
        if xs.is_zero() {
            continue;
        }
        let r = term_product(rest, f, n - j - 1, &xs);
        out.add_scaled(&r, &sign);
    }
    out
}

/// Colored partitions: multisets of `(index, r)` with `Σ r = total`, each as
/// a list of `(index, r, count)`.
fn creation_multisets(nvars: usize, total: i64) -> Vec<Vec<(usize, i64, u32)>> {
    let mut parts = Vec::new();
    for r in 1..=total {
        for i in 1..=nvars {
            parts.push((i, r));
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        parts: &[(usize, i64)],
        start: usize,
        remaining: i64,
        cur: &mut Vec<(usize, i64, u32)>,
        out: &mut Vec<Vec<(usize, i64, u32)>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for (idx, &(i, r)) in parts.iter().enumerate().skip(start) {
            if r > remaining {
                break;
            }
            let mut c = 1;
            while r * c as i64 <= remaining {
                cur.push((i, r, c));
                rec(parts, idx + 1, remaining - r * c as i64, cur, out);
                cur.pop();
                c += 1;
            }
        }
    }
    rec(&parts, 0, total, &mut cur, &mut out);
    out
}

/// Coefficient of `z^{-n-1}` of `f(b(z))` applied to `s`, by the Taylor
/// expansion of `f(b_0 + Δ_+ + Δ_-)` where `Δ_+` holds the annihilating modes.
pub fn taylor_mode(f: &FunctionElem, n: i64, s: &State) -> State {
    let sys = s.system();
    let mut out = State::zero(sys);
    if f.is_zero() && f.series_order().is_none() {
        return out;
    }
    let kz = n + 1;
    if f.as_constant().is_some() && f.series_order().is_none() {
        if kz == 0 {
            return s.mul_function(f);
        }
        return out;
    }
    let nvars = sys.n;
    let mut derivs: HashMap<Vec<u32>, FunctionElem> = HashMap::new();
    let mut creations: HashMap<i64, Vec<Vec<(usize, i64, u32)>>> = HashMap::new();
    for (m, h) in s.terms() {
        let avars: Vec<(ModeVar, u32)> = m
            .factors()
            .iter()
            .filter(|(v, _)| v.family == Family::A)
            .cloned()
            .collect();
        // enumerate how many of each a-variable get annihilated
        let mut nu = vec![0u32; avars.len()];
        loop {
            let removed: i64 = avars
                .iter()
                .zip(&nu)
                .map(|((v, _), k)| v.weight() as i64 * *k as i64)
                .sum();
            let created = removed - kz;
            if created >= 0 {
                let mut c1 = Rational::one();
                let mut alpha = vec![0u32; nvars];
                let mut base = m.clone();
                for ((v, mu), k) in avars.iter().zip(&nu) {
                    if *k > 0 {
                        c1 *= binomial(*mu as i64, *k);
                        if k % 2 == 1 {
                            c1 = -c1;
                        }
                        alpha[v.index - 1] += k;
                        for _ in 0..*k {
                            base = base.remove(v).expect("present").1;
                        }
                    }
                }
                let sets = creations
                    .entry(created)
                    .or_insert_with(|| creation_multisets(nvars, created));
                for set in sets.iter() {
                    let mut gamma = alpha.clone();
                    let mut c2 = c1.clone();
                    let mut mono = base.clone();
                    for &(i, r, cnt) in set {
                        gamma[i - 1] += cnt;
                        c2 /= factorial(cnt);
                        for _ in 0..cnt {
                            mono = mono.insert(ModeVar::b(i, -r as i32)).expect("even").1;
                        }
                    }
                    let d = derivs
                        .entry(gamma.clone())
                        .or_insert_with(|| f.partial_multi(&gamma))
                        .clone();
                    if d.is_zero() && d.series_order().is_none() {
                        continue;
                    }
                    out.add_term(mono, (h * &d).scale(&c2));
                }
            }
            // next ν
            let mut idx = 0;
            loop {
                if idx == nu.len() {
                    break;
                }
                if nu[idx] < avars[idx].1 {
                    nu[idx] += 1;
                    break;
                }
                nu[idx] = 0;
                idx += 1;
            }
            if idx == nu.len() {
                break;
            }
        }
    }
    out
}

/// Coefficient of `z^{-k}` of `f(b(z))` applied to `s`; errors if a series
/// coefficient of the result has lost all valid terms.
pub fn taylor_field_mode(f: &FunctionElem, k: i64, s: &State) -> Result<State, CoeffError> {
    let r = taylor_mode(f, k - 1, s);
    r.check_known()?;
    Ok(r)
}

/// Singular part of `a(z) b(w)`: pole order `k` maps to `a_(k-1) b`.
pub fn ope(a: &State, b: &State) -> BTreeMap<u32, State> {
    let top = (a.max_weight() + b.max_weight()) as i64;
    let mut out = BTreeMap::new();
    for n in 0..top.max(1) {
        let r = nth_product(a, n, b);
        if !r.is_zero() {
            out.insert((n + 1) as u32, r);
        }
    }
    out
}

/// The zero mode `∫a(z) = a_(0)` as an operator.
pub fn fourier_derivation(a: &State) -> impl Fn(&State) -> State + '_ {
    move |s| nth_product(a, 0, s)
}

/// Translation `L_{-1}`, the even derivation with
/// `T b_{-k} = (k+1) b_{-k-1}`, `T a_{-k} = k a_{-k-1}` (same for `phi`, `psi`)
/// and `T f = Σ ∂_i f b^i_{-1}`.
pub fn translation(s: &State) -> State {
    let sys = s.system();
    let mut out = State::zero(sys);
    for (m, c) in s.terms() {
        let vars = m.expanded();
        for (pos, v) in vars.iter().enumerate() {
            let k = -(v.mode as i64);
            let factor = match v.family {
                Family::B | Family::Phi => k + 1,
                Family::A | Family::Psi => k,
            };
            let mut nv = vars.clone();
            nv[pos] = ModeVar::new(v.family, v.index, v.mode - 1);
            if let Some((neg, m2)) = Monomial::from_vars(&nv) {
                let f = if neg { -factor } else { factor };
                out.add_term(m2, c.scale(&qi(f)));
            }
        }
        for i in 0..sys.n {
            if !sys.kind.has(Family::B) {
                break;
            }
            let d = c.partial(i);
            if d.is_zero() && d.series_order().is_none() {
                continue;
            }
            if let Some((_, m2)) = m.insert(ModeVar::b(i + 1, -1)) {
                out.add_term(m2, d);
            }
        }
    }
    out
}

/// A mode operator `a_(n)` of a state.
#[derive(Clone, Debug)]
pub struct ModeOperator {
    pub source: State,
    pub n: i64,
}

impl ModeOperator {
    pub fn new(source: State, n: i64) -> Self {
        ModeOperator { source, n }
    }

    pub fn apply(&self, s: &State) -> State {
        nth_product(&self.source, self.n, s)
    }
}

pub mod laws;

#[cfg(test)]
mod tests;
