//! The chiral de Rham structure on `Ω_N`: the states `L, J, Q, G`, their
//! operator products, the differential, its cohomology on finite slices,
//! the weight-zero product and characters.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::coeffs::rational::qi;
use crate::coeffs::{Exp, FunctionElem, Poly, Rational};
use crate::engine::{apply_generator_mode, nth_product, translation};
use crate::linalg;
use crate::report::Report;
use crate::states::{basis_monomials, Family, Kind, ModeVar, Monomial, State, System};

/// `L, J, Q, G` of `Ω_N`.
#[derive(Clone, Debug)]
pub struct StructureFields {
    pub n: usize,
    pub l: State,
    pub j: State,
    pub q: State,
    pub g: State,
}

fn sum_of(sys: System, pairs: impl Fn(usize) -> Vec<ModeVar>) -> State {
    let raw = (1..=sys.n).map(|i| (FunctionElem::one(), pairs(i))).collect();
    State::normalize(sys, raw).expect("valid structure monomials")
}

/// Virasoro element of the given system: `Σ b_{-1} a_{-1}` on `V_N`,
/// `Σ phi_{-1} psi_{-1}` on `Λ_N`, and their sum on `Ω_N`.
pub fn virasoro(sys: System) -> State {
    let bos = || sum_of(sys, |i| vec![ModeVar::b(i, -1), ModeVar::a(i, -1)]);
    let fer = || sum_of(sys, |i| vec![ModeVar::phi(i, -1), ModeVar::psi(i, -1)]);
    match sys.kind {
        Kind::Heisenberg => bos(),
        Kind::Clifford => fer(),
        Kind::Omega => &bos() + &fer(),
    }
}

pub fn build_structure(n: usize) -> StructureFields {
    let sys = System::omega(n);
    StructureFields {
        n,
        l: virasoro(sys),
        j: sum_of(sys, |i| vec![ModeVar::phi(i, 0), ModeVar::psi(i, -1)]),
        q: sum_of(sys, |i| vec![ModeVar::a(i, -1), ModeVar::phi(i, 0)]),
        g: sum_of(sys, |i| vec![ModeVar::psi(i, -1), ModeVar::b(i, -1)]),
    }
}

fn show(s: &State) -> String {
    s.to_string()
}

fn expect_products(
    report: &mut Report,
    label: &str,
    a: &State,
    b: &State,
    expected: &BTreeMap<i64, State>,
) {
    let top = (a.max_weight() + b.max_weight()) as i64;
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 0..top.max(1) + 1 {
        let got = nth_product(a, n, b);
        let want = expected
            .get(&n)
            .cloned()
            .unwrap_or_else(|| State::zero(b.system()));
        if got != want {
            ok = false;
            detail.push(format!("pole {}: got {}, expected {}", n + 1, show(&got), show(&want)));
        }
    }
    report.check(label, ok, detail.join("; "));
}

/// Checks `L_(0)L = L_{-1}L`, `L_(1)L = 2L`, `L_(2)L = 0`, `L_(3)L = (c/2)|0>`.
pub fn check_virasoro(l: &State, c: &Rational) -> Report {
    let sys = l.system();
    let mut report = Report::new(format!("Virasoro relations, c = {c}"));
    let vac = State::vacuum(sys);
    let cases = [
        (0, translation(l), "L_(0)L = L_{-1}L"),
        (1, l.scale(&qi(2)), "L_(1)L = 2L"),
        (2, State::zero(sys), "L_(2)L = 0"),
        (3, vac.scale(&(c / qi(2))), "L_(3)L = c/2"),
    ];
    for (n, want, name) in cases {
        let got = nth_product(l, n, l);
        let detail = if got == want {
            String::new()
        } else {
            format!("got {got}")
        };
        report.check(name, got == want, detail);
    }
    let beyond = (4..6).all(|n| nth_product(l, n, l).is_zero());
    report.check("no poles beyond order 4", beyond, "");
    report
}

/// All ten operator products among `L, J, Q, G` against the rank-`N` table.
pub fn check_topological(sf: &StructureFields) -> Report {
    let sys = sf.l.system();
    let d = qi(sf.n as i64);
    let vac = State::vacuum(sys);
    let t = translation;
    let mut report = Report::new(format!("topological algebra of rank {}", sf.n));
    let table: Vec<(&str, &State, &State, BTreeMap<i64, State>)> = vec![
        ("L L", &sf.l, &sf.l, BTreeMap::from([(1, sf.l.scale(&qi(2))), (0, t(&sf.l))])),
        ("J J", &sf.j, &sf.j, BTreeMap::from([(1, vac.scale(&d))])),
        (
            "L J",
            &sf.l,
            &sf.j,
            BTreeMap::from([(2, vac.scale(&-d.clone())), (1, sf.j.clone()), (0, t(&sf.j))]),
        ),
        ("G G", &sf.g, &sf.g, BTreeMap::new()),
        ("L G", &sf.l, &sf.g, BTreeMap::from([(1, sf.g.scale(&qi(2))), (0, t(&sf.g))])),
        ("J G", &sf.j, &sf.g, BTreeMap::from([(0, -&sf.g)])),
        ("Q Q", &sf.q, &sf.q, BTreeMap::new()),
        ("L Q", &sf.l, &sf.q, BTreeMap::from([(1, sf.q.clone()), (0, t(&sf.q))])),
        ("J Q", &sf.j, &sf.q, BTreeMap::from([(0, sf.q.clone())])),
        (
            "Q G",
            &sf.q,
            &sf.g,
            BTreeMap::from([(2, vac.scale(&d)), (1, sf.j.clone()), (0, sf.l.clone())]),
        ),
    ];
    for (label, a, b, expected) in &table {
        expect_products(&mut report, label, a, b, expected);
    }
    report
}

/// The chiral de Rham differential `d = Q_(0)`, the sign making it restrict
/// to the ordinary de Rham differential on weight zero.
pub fn chiral_d(s: &State) -> State {
    let q = build_structure(s.system().n).q;
    nth_product(&q, 0, s)
}

/// `Σ_i Σ_n a^i_n phi^i_{-n}` applied mode by mode.
pub fn chiral_d_modes(s: &State) -> State {
    let sys = s.system();
    let w = s.max_weight();
    let mut out = State::zero(sys);
    for i in 1..=sys.n {
        for n in -w..=w {
            let t = apply_generator_mode(ModeVar::phi(i, -n), s);
            out = &out + &apply_generator_mode(ModeVar::a(i, n), &t);
        }
    }
    out
}

/// Fermionic charge operator `F = J_(0)`.
pub fn fermionic_charge(s: &State) -> State {
    let j = build_structure(s.system().n).j;
    nth_product(&j, 0, s)
}

/// `[G_(1), d] s = G_(1) d s + d G_(1) s`.
pub fn homotopy_commutator(sf: &StructureFields, s: &State) -> State {
    let ds = nth_product(&sf.q, 0, s);
    let a = nth_product(&sf.g, 1, &ds);
    let gs = nth_product(&sf.g, 1, s);
    &a + &nth_product(&sf.q, 0, &gs)
}

/// `[G_(1), d] = w` on every weight `w` slice with `deg_b + deg_x + deg_phi
/// <= bmax`, the contracting homotopy for `w > 0`.
pub fn homotopy_check(n: usize, w: i32, bmax: u32) -> Report {
    let sf = build_structure(n);
    let sys = System::omega(n);
    let mut report = Report::new(format!("[G_(1), d] = L_0 at weight {w}, N = {n}"));
    let mut count = 0;
    let mut witness = None;
    for bdeg in 0..=bmax {
        for adeg in 0..=w.max(0) as u32 {
            for states in slice_basis(sys, w, bdeg, adeg).values() {
                for s in states {
                    count += 1;
                    if witness.is_none() && homotopy_commutator(&sf, s) != s.scale(&qi(w as i64)) {
                        witness = Some(s.to_string());
                    }
                }
            }
        }
    }
    report.check(
        format!("weight {w}"),
        witness.is_none(),
        witness.unwrap_or_else(|| format!("{count} basis states")),
    );
    report
}

/// All exponent vectors in `n` variables of total degree `d`.
pub fn exponents(n: usize, d: u32) -> Vec<Exp> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Exp>) {
        if cur.len() == n - 1 {
            cur.push(d);
            out.push(Exp::new(cur.clone()));
            cur.pop();
            return;
        }
        for k in (0..=d).rev() {
            cur.push(k);
            rec(n, d - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Exp::one());
        }
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Coordinates of `s` in a basis of single-term states.
fn coordinates(s: &State, index: &BTreeMap<(Monomial, Exp), usize>, len: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for (m, c) in s.terms() {
        let p = c.as_poly().expect("polynomial coefficients in slices");
        for (e, q) in p.terms() {
            let k = index
                .get(&(m.clone(), e.clone()))
                .unwrap_or_else(|| panic!("{m} x^{e:?} outside the slice"));
            v[*k] = q.clone();
        }
    }
    v
}

fn basis_index(basis: &[State]) -> BTreeMap<(Monomial, Exp), usize> {
    basis
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let (m, c) = s.terms().next().expect("nonzero basis element");
            let (e, _) = c.as_poly().unwrap().terms().next().unwrap();
            ((m.clone(), e.clone()), k)
        })
        .collect()
}

/// Matrix of `op` from `src` to the span of `dst` (columns are images).
pub fn operator_matrix(
    op: impl Fn(&State) -> State,
    src: &[State],
    dst: &[State],
) -> Vec<Vec<Rational>> {
    let index = basis_index(dst);
    let cols: Vec<Vec<Rational>> = src.iter().map(|s| coordinates(&op(s), &index, dst.len())).collect();
    (0..dst.len())
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CohomologyRow {
    pub weight: i32,
    pub charge: i32,
    pub dim: usize,
    pub dim_ker: usize,
    pub dim_im: usize,
    pub dim_h: usize,
}

/// Ranks of `d` on the weight-`w` slices with `deg_b + deg_x + deg_phi <= bmax`,
/// aggregated per charge; also checks `d² = 0` on every slice.
pub fn cohomology(n: usize, w: i32, bmax: u32) -> (Vec<CohomologyRow>, bool) {
    let sys = System::omega(n);
    let q = build_structure(n).q;
    let d = |s: &State| nth_product(&q, 0, s);
    let mut rows: BTreeMap<i32, CohomologyRow> = BTreeMap::new();
    let mut d2_ok = true;
    let amax = w.max(0) as u32;
    for bdeg in 0..=bmax {
        for adeg in 0..=amax {
            let basis = slice_basis(sys, w, bdeg, adeg);
            if basis.is_empty() {
                continue;
            }
            let empty = Vec::new();
            let mut ranks: BTreeMap<i32, usize> = BTreeMap::new();
            for (p, src) in &basis {
                let dst = basis.get(&(p + 1)).unwrap_or(&empty);
                if dst.is_empty() {
                    d2_ok &= src.iter().all(|s| d(s).is_zero());
                    ranks.insert(*p, 0);
                    continue;
                }
                let m = operator_matrix(d, src, dst);
                ranks.insert(*p, linalg::rank(&m));
                if let Some(dst2) = basis.get(&(p + 2)) {
                    let m2 = operator_matrix(|s| d(&d(s)), src, dst2);
                    d2_ok &= m2.iter().flatten().all(Zero::is_zero);
                }
            }
            for (p, src) in &basis {
                let r_out = ranks[p];
                let r_in = ranks.get(&(p - 1)).copied().unwrap_or(0);
                let row = rows.entry(*p).or_insert(CohomologyRow {
                    weight: w,
                    charge: *p,
                    dim: 0,
                    dim_ker: 0,
                    dim_im: 0,
                    dim_h: 0,
                });
                row.dim += src.len();
                row.dim_ker += src.len() - r_out;
                row.dim_im += r_in;
                row.dim_h += src.len() - r_out - r_in;
            }
        }
    }
    (rows.into_values().collect(), d2_ok)
}

/// Basis of the slice of weight `w` with auxiliary bigrade
/// `(deg_b + deg_x + deg_phi, deg_a + deg_psi) = (bdeg, adeg)`, grouped by charge.
pub fn slice_basis(sys: System, w: i32, bdeg: u32, adeg: u32) -> BTreeMap<i32, Vec<State>> {
    let mut out: BTreeMap<i32, Vec<State>> = BTreeMap::new();
    for m in basis_monomials(sys, w) {
        let a = m.degree_of(Family::A) + m.degree_of(Family::Psi);
        let b = m.degree_of(Family::B) + m.degree_of(Family::Phi);
        if a != adeg || b > bdeg {
            continue;
        }
        for e in exponents(sys.n, bdeg - b) {
            let mut s = State::zero(sys);
            s.add_term(m.clone(), FunctionElem::poly(Poly::monomial(e, qi(1))));
            out.entry(m.charge()).or_default().push(s);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("weight-zero product needs weight-zero inputs, got weights {0} and {1}")]
pub struct DomainError(pub i32, pub i32);

/// The commutative product `a_(-1) b` on weight zero.
pub fn weight0_product(a: &State, b: &State) -> Result<State, DomainError> {
    let (wa, wb) = (a.max_weight(), b.max_weight());
    if wa != 0 || wb != 0 {
        return Err(DomainError(wa, wb));
    }
    Ok(nth_product(a, -1, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    /// `ranks[w]` maps charge to the number of monomials of that weight.
    pub ranks: Vec<BTreeMap<i32, usize>>,
    pub euler: Vec<i64>,
}

/// Free-module ranks by weight and charge over the zero-mode ring
/// (functions tensored with the exterior algebra on the `phi_0`).
pub fn character(sys: System, max_w: i32) -> CharacterTable {
    let mut ranks = Vec::new();
    let mut euler = Vec::new();
    for w in 0..=max_w {
        let mut row: BTreeMap<i32, usize> = BTreeMap::new();
        for m in basis_monomials(sys, w) {
            if m.factors().iter().any(|(v, _)| v.mode == 0) {
                continue;
            }
            *row.entry(m.charge()).or_default() += 1;
        }
        euler.push(
            row.iter()
                .map(|(p, r)| if p % 2 == 0 { *r as i64 } else { -(*r as i64) })
                .sum(),
        );
        ranks.push(row);
    }
    CharacterTable { ranks, euler }
}

#[cfg(test)]
mod tests;
