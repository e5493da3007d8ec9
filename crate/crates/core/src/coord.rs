//! Formal changes of the coordinates `b^i`: images of the generators, the
//! induced map on states, and checks of the free-field OPE table, of
//! composition and of the transformation of `L, J, Q, G`.
//!
//! A change `x -> g(x)` sends `b̃^i = g^i(b)`, `φ̃^i = ∂_j g^i φ^j`,
//! `ψ̃^i = M_{ji} ψ^j` and `ã^i = M_{ji} a^j + ∂_r M_{ki} φ^r ψ^k`, where
//! `M = (∂g/∂x)^{-1}`. The second term of `ã` is what cancels the double
//! pairings in `ã(z)ã(w)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cdr::{build_structure, chiral_d};
use crate::coeffs::rational::qi;
use crate::coeffs::{
    compose_and_invert, jacobian, series_log, CoeffError, Exp, FunctionElem, Mode, Poly,
};
use crate::engine::{nth_product, translation};
use crate::linalg::{adjugate, det};
use crate::report::Report;
use crate::states::{basis_monomials, Family, Kind, ModeVar, State, System};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoordError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("coordinate changes act on systems with b-fields, not {0:?}")]
    NoCoordinates(Kind),
    #[error("expected {expected} component functions, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Unsupported(String),
}

/// Which form of the `ã` images to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    /// The fermion bilinear `∂_r M_{ki} φ^r ψ^k` (needs `Ω_N`).
    Fermionic,
    /// No correction: plain `M_{ji} a^j`. Fails the OPE table for nonlinear
    /// changes; kept as a negative control.
    Dropped,
    /// One bosonic pair only: `ã = u a + (u'^2 / 2u) b'` with `u = 1/g'`.
    Curve,
}

/// A change of coordinates `x -> g(x)` with its inverse.
#[derive(Clone, Debug)]
pub struct CoordChange {
    g: Vec<FunctionElem>,
    f: Vec<FunctionElem>,
    order: Option<u32>,
    /// `m[j][i] = ∂f^j/∂y^i` evaluated at `y = g(x)`.
    m: Vec<Vec<FunctionElem>>,
}

impl CoordChange {
    /// A formal change fixing the origin, expanded through degree `d`.
    pub fn series(g: Vec<FunctionElem>, d: u32) -> Result<Self, CoordError> {
        let g: Vec<FunctionElem> = g.iter().map(|gi| gi.expand(d)).collect::<Result<_, _>>()?;
        let f = compose_and_invert(&g, d)?;
        let m = inverse_jacobian(&g)?;
        Ok(CoordChange {
            g,
            f,
            order: Some(d),
            m,
        })
    }

    /// An exact change with a known exact inverse, such as `x -> 1/x` over
    /// the Laurent ring.
    pub fn exact(g: Vec<FunctionElem>, f: Vec<FunctionElem>) -> Result<Self, CoordError> {
        if g.len() != f.len() {
            return Err(CoordError::Dimension {
                expected: g.len(),
                got: f.len(),
            });
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.series_order().is_some() || g[i].series_order().is_some() {
                return Err(CoordError::Unsupported("exact changes take exact functions".into()));
            }
            if fi.compose(&g)? != FunctionElem::var(i) {
                return Err(CoeffError::NotInvertibleChange(format!(
                    "component {} of the given inverse does not undo the change",
                    i + 1
                ))
                .into());
            }
        }
        let m = inverse_jacobian(&g)?;
        Ok(CoordChange {
            g,
            f,
            order: None,
            m,
        })
    }

    pub fn identity(n: usize, d: u32) -> Self {
        CoordChange::series((0..n).map(FunctionElem::var).collect(), d).expect("identity")
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[FunctionElem] {
        &self.g
    }

    pub fn f(&self) -> &[FunctionElem] {
        &self.f
    }

    /// Truncation order, `None` for exact changes.
    pub fn order(&self) -> Option<u32> {
        self.order
    }

    /// `M = (∂g/∂x)^{-1}` with `M[j][i] = ∂f^j/∂y^i (g(x))`.
    pub fn inverse_jacobian(&self) -> &[Vec<FunctionElem>] {
        &self.m
    }

    /// The change `x -> g2(g1(x))`, where `self` is `g1`.
    pub fn then(&self, g2: &CoordChange) -> Result<CoordChange, CoordError> {
        let g: Vec<FunctionElem> = g2
            .g
            .iter()
            .map(|c| c.compose(&self.g))
            .collect::<Result<_, _>>()?;
        match (self.order, g2.order) {
            (Some(a), Some(b)) => CoordChange::series(g, a.min(b)),
            (None, None) => {
                let f: Vec<FunctionElem> = self
                    .f
                    .iter()
                    .map(|c| c.compose(&g2.f))
                    .collect::<Result<_, _>>()?;
                CoordChange::exact(g, f)
            }
            _ => Err(CoordError::Unsupported(
                "cannot compose an exact change with a truncated one".into(),
            )),
        }
    }

    /// `log det(∂g/∂x)` normalized to vanish at the origin, as a series.
    pub fn log_jacobian_det(&self, d: u32) -> Result<FunctionElem, CoordError> {
        let jd = det(&jacobian(&self.g)).expand(d)?;
        let o = jd.series_order().unwrap_or(d as i64);
        if o < 0 {
            return Err(CoeffError::TruncationUnderflow { order: o }.into());
        }
        let p = match &jd {
            FunctionElem::Series { terms, .. } => terms.clone(),
            _ => unreachable!("expanded"),
        };
        Ok(FunctionElem::series(series_log(&p, o as u32)?, o as u32))
    }
}

fn inverse_jacobian(g: &[FunctionElem]) -> Result<Vec<Vec<FunctionElem>>, CoordError> {
    let j = jacobian(g);
    let d = det(&j);
    let dinv = d.invert().map_err(|_| {
        CoordError::Coeff(CoeffError::NotInvertibleChange("degenerate Jacobian".into()))
    })?;
    Ok(adjugate(&j)
        .into_iter()
        .map(|row| row.iter().map(|c| c * &dinv).collect())
        .collect())
}

/// Images of the generators, indexed by `i - 1`.
#[derive(Clone, Debug)]
pub struct TildedGenerators {
    pub system: System,
    pub b: Vec<State>,
    pub phi: Vec<State>,
    pub a: Vec<State>,
    pub psi: Vec<State>,
}

impl TildedGenerators {
    pub fn get(&self, family: Family, index: usize) -> &State {
        let v = match family {
            Family::A => &self.a,
            Family::B => &self.b,
            Family::Phi => &self.phi,
            Family::Psi => &self.psi,
        };
        &v[index - 1]
    }

    /// All images with labels like `a~1`.
    pub fn labelled(&self) -> Vec<(String, Family, usize, &State)> {
        let mut out = Vec::new();
        for fam in Family::ALL {
            let v = match fam {
                Family::A => &self.a,
                Family::B => &self.b,
                Family::Phi => &self.phi,
                Family::Psi => &self.psi,
            };
            for (k, s) in v.iter().enumerate() {
                out.push((format!("{}~{}", fam.name(), k + 1), fam, k + 1, s));
            }
        }
        out
    }
}

fn state_of(sys: System, raw: Vec<(FunctionElem, Vec<ModeVar>)>) -> State {
    State::normalize(sys, raw).expect("generator images use valid variables")
}

/// The generator images of the change on the given system.
pub fn tilded_generators(
    cc: &CoordChange,
    sys: System,
    correction: Correction,
) -> Result<TildedGenerators, CoordError> {
    if !sys.kind.has(Family::B) {
        return Err(CoordError::NoCoordinates(sys.kind));
    }
    let n = sys.n;
    if cc.n() != n {
        return Err(CoordError::Dimension {
            expected: n,
            got: cc.n(),
        });
    }
    let fermions = sys.kind.has(Family::Phi);
    match correction {
        Correction::Fermionic if !fermions => {
            return Err(CoordError::Unsupported(
                "the fermionic correction needs the phi/psi system".into(),
            ))
        }
        Correction::Curve if fermions || n != 1 => {
            return Err(CoordError::Unsupported(
                "the curve correction is for a single bosonic pair".into(),
            ))
        }
        _ => {}
    }
    let m = &cc.m;
    let dg = jacobian(&cc.g);
    let mut out = TildedGenerators {
        system: sys,
        b: Vec::new(),
        phi: Vec::new(),
        a: Vec::new(),
        psi: Vec::new(),
    };
    for i in 0..n {
        out.b.push(State::function(sys, cc.g[i].clone()));
        let mut a_raw: Vec<_> = (0..n)
            .map(|j| (m[j][i].clone(), vec![ModeVar::a(j + 1, -1)]))
            .collect();
        match correction {
            Correction::Fermionic => {
                for k in 0..n {
                    for r in 0..n {
                        let c = m[k][i].partial(r);
                        a_raw.push((c, vec![ModeVar::phi(r + 1, 0), ModeVar::psi(k + 1, -1)]));
                    }
                }
            }
            Correction::Curve => {
                let u = &m[0][0];
                let du = u.partial(0);
                let c = (&du * &du).try_div(&u.scale(&qi(2)))?;
                a_raw.push((c, vec![ModeVar::b(1, -1)]));
            }
            Correction::Dropped => {}
        }
        out.a.push(state_of(sys, a_raw));
        if fermions {
            out.phi.push(state_of(
                sys,
                (0..n)
                    .map(|j| (dg[i][j].clone(), vec![ModeVar::phi(j + 1, 0)]))
                    .collect(),
            ));
            out.psi.push(state_of(
                sys,
                (0..n)
                    .map(|j| (m[j][i].clone(), vec![ModeVar::psi(j + 1, -1)]))
                    .collect(),
            ));
        }
    }
    for s in out.a.iter().chain(&out.b).chain(&out.phi).chain(&out.psi) {
        s.check_known()?;
    }
    Ok(out)
}

/// The correction the rest of the module uses by default for a system.
pub fn default_correction(sys: System) -> Correction {
    if sys.kind.has(Family::Phi) {
        Correction::Fermionic
    } else if sys.n == 1 {
        Correction::Curve
    } else {
        Correction::Dropped
    }
}

fn derivative_order(v: &ModeVar) -> i64 {
    -(v.mode as i64) - v.family.field_weight() as i64
}

/// Image of a state: each coefficient `h` becomes `h∘g`, and each creation
/// variable is replaced by the matching Borcherds mode of its image field,
/// applied innermost first.
pub fn transform_with(
    cc: &CoordChange,
    gens: &TildedGenerators,
    s: &State,
) -> Result<State, CoordError> {
    let sys = gens.system;
    let mut out = State::zero(sys);
    for (mono, h) in s.terms() {
        let hg = h.compose(&cc.g)?;
        let mut cur = State::function(sys, hg);
        for v in mono.expanded().iter().rev() {
            let gen = gens.get(v.family, v.index);
            cur = nth_product(gen, -1 - derivative_order(v), &cur);
        }
        out = &out + &cur;
    }
    out.check_known()?;
    Ok(out)
}

/// `transform_with` using the default generator images for `s`'s system.
pub fn transform_state(cc: &CoordChange, s: &State) -> Result<State, CoordError> {
    let sys = s.system();
    let gens = tilded_generators(cc, sys, default_correction(sys))?;
    transform_with(cc, &gens, s)
}

fn pairing(x: Family, y: Family) -> Option<i64> {
    // nonzero simple poles of the free-field table: x_(0) y = ± |0>
    match (x, y) {
        (Family::A, Family::B) => Some(1),
        (Family::B, Family::A) => Some(-1),
        (Family::Phi, Family::Psi) | (Family::Psi, Family::Phi) => Some(1),
        _ => None,
    }
}

fn is_odd(f: Family) -> bool {
    f.is_odd()
}

/// States of weight `<= wmax` used to probe operator identities: the
/// basis monomials with coefficients `1` and `x_1`, at most `cap` per weight.
pub fn probe_states(sys: System, wmax: i32, cap: usize) -> Vec<State> {
    let mut out = Vec::new();
    for w in 0..=wmax {
        let ms = basis_monomials(sys, w);
        let step = ms.len().div_ceil(cap.max(1)).max(1);
        for m in ms.into_iter().step_by(step) {
            let mut s = State::zero(sys);
            s.add_term(m.clone(), FunctionElem::one());
            out.push(s);
            if sys.kind.has(Family::B) && w <= 1 {
                let mut s = State::zero(sys);
                s.add_term(m, FunctionElem::var(0));
                out.push(s);
            }
        }
    }
    out
}

fn show(s: &State) -> String {
    let t = s.to_string();
    if t.len() > 160 {
        format!("{}...", &t[..t.char_indices().nth(160).map_or(t.len(), |(i, _)| i)])
    } else {
        t
    }
}

fn agree(a: &State, b: &State) -> Result<bool, CoordError> {
    Ok(a.agrees_with(b)?)
}

/// Checks that the generator images satisfy the free-field OPE table: the
/// products `X̃_(n) Ỹ` as states, and the commutators
/// `[X̃_(m), Ỹ_(k)] = δ_{m+k,-1} ⟨X,Y⟩` on probe states of weight `<= wmax`.
pub fn verify_ope_preservation(
    cc: &CoordChange,
    sys: System,
    correction: Correction,
    wmax: i32,
) -> Result<Report, CoordError> {
    let gens = tilded_generators(cc, sys, correction)?;
    let order = cc.order.map_or("exact".to_string(), |d| d.to_string());
    let mut report = Report::new(format!(
        "OPE table of the transformed generators ({:?}, N = {}, order {order}, wmax = {wmax})",
        correction, sys.n
    ));
    let vac = State::vacuum(sys);
    let labelled = gens.labelled();
    for (lx, fx, ix, x) in &labelled {
        for (ly, fy, iy, y) in &labelled {
            let mut ok = true;
            let mut detail = Vec::new();
            let top = (x.max_weight() + y.max_weight()) as i64;
            for n in 0..top.max(1) {
                let got = nth_product(x, n, y);
                let want = match pairing(*fx, *fy) {
                    Some(c) if n == 0 && ix == iy => vac.scale(&qi(c)),
                    _ => State::zero(sys),
                };
                if !agree(&got, &want)? {
                    ok = false;
                    detail.push(format!("pole {}: got {}", n + 1, show(&got)));
                }
            }
            report.check(format!("{lx} {ly}"), ok, detail.join("; "));
        }
    }
    let probes = probe_states(sys, wmax, 6);
    let mut ok = true;
    let mut beyond = 0usize;
    let mut witness = String::new();
    'outer: for (lx, fx, ix, x) in &labelled {
        for (ly, fy, iy, y) in &labelled {
            let sign = if is_odd(*fx) && is_odd(*fy) { -qi(1) } else { qi(1) };
            for m in 0..=1i64 {
                for k in -1..=0i64 {
                    for s in &probes {
                        let xy = nth_product(x, m, &nth_product(y, k, s));
                        let yx = nth_product(y, k, &nth_product(x, m, s));
                        let mut lhs = xy;
                        lhs.add_scaled(&yx, &-sign.clone());
                        // nested Taylor fields can use up the truncation order on
                        // the heaviest probes; those are reported, not compared
                        if lhs.min_series_order().is_some_and(|o| o < 0) {
                            beyond += 1;
                            continue;
                        }
                        let want = match pairing(*fx, *fy) {
                            Some(c) if m + k == -1 && ix == iy => s.scale(&qi(c)),
                            _ => State::zero(sys),
                        };
                        if !agree(&lhs, &want)? {
                            ok = false;
                            witness = format!(
                                "[{lx}_({m}), {ly}_({k})] on {}: got {}",
                                show(s),
                                show(&lhs)
                            );
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let total = labelled.len() * labelled.len() * 4 * probes.len();
    if beyond == total && total > 0 {
        return Err(CoordError::Coeff(CoeffError::TruncationUnderflow { order: -1 }));
    }
    report.check(
        format!("mode commutators on {} probe states", probes.len()),
        ok,
        witness,
    );
    if beyond > 0 {
        report.note(format!(
            "{beyond} of {total} probe commutators exceed the truncation order and were not compared"
        ));
    }
    Ok(report)
}

/// Sample states for composition checks: the generators, `x_i`, and probe
/// states up to `wmax`.
fn composition_samples(sys: System, wmax: i32) -> Vec<State> {
    let mut out = Vec::new();
    for fam in sys.families() {
        for i in 1..=sys.n {
            let mode = if fam == Family::B { -1 } else { fam.max_creation_mode() };
            out.push(State::generator(sys, ModeVar::new(fam, i, mode)).expect("generator"));
        }
    }
    for i in 0..sys.n {
        out.push(State::function(sys, FunctionElem::var(i)));
    }
    out.extend(probe_states(sys, wmax, 4));
    out
}

/// Checks the homomorphism property on samples. With `cc12 = cc1.then(cc2)`
/// (the change `x -> g2(g1(x))`), the images satisfy
/// `T_{cc12} = T_{cc1} ∘ T_{cc2}`: substitution is contravariant.
pub fn verify_composition(
    cc1: &CoordChange,
    cc2: &CoordChange,
    sys: System,
    wmax: i32,
) -> Result<Report, CoordError> {
    let cc12 = cc1.then(cc2)?;
    let corr = default_correction(sys);
    let g1 = tilded_generators(cc1, sys, corr)?;
    let g2 = tilded_generators(cc2, sys, corr)?;
    let g12 = tilded_generators(&cc12, sys, corr)?;
    let mut report = Report::new(format!(
        "composition of coordinate changes (N = {}, order {:?}, wmax = {wmax})",
        sys.n, cc12.order
    ));
    let mut covariant = true;
    for s in composition_samples(sys, wmax) {
        let direct = transform_with(&cc12, &g12, &s)?;
        let stepwise = transform_with(cc1, &g1, &transform_with(cc2, &g2, &s)?)?;
        let ok = agree(&direct, &stepwise)?;
        let detail = if ok {
            String::new()
        } else {
            format!("composite {} vs stepwise {}", show(&direct), show(&stepwise))
        };
        report.check(format!("T(g2∘g1) {s}"), ok, detail);
        let other = transform_with(cc2, &g2, &transform_with(cc1, &g1, &s)?)?;
        covariant &= agree(&direct, &other)?;
    }
    report.note(format!(
        "the covariant order T(g2)∘T(g1) {} the composite on these samples",
        if covariant { "also matches" } else { "does not match" }
    ));
    Ok(report)
}

/// Differences of the transformed structure states from the originals.
#[derive(Clone, Debug)]
pub struct StructureDiff {
    pub l: State,
    pub j: State,
    pub q: State,
    pub g: State,
}

/// Transforms `L, J, Q, G` of `Ω_N` and compares with the expected anomaly
/// terms: `L̃ = L`, `G̃ = G`, `J̃ - J = T(ℓ)` and `Q̃ - Q = -T(dℓ)` with
/// `ℓ = log det(∂g/∂x)`.
pub fn structure_transform(cc: &CoordChange) -> Result<(StructureDiff, Report), CoordError> {
    let n = cc.n();
    let sys = System::omega(n);
    let sf = build_structure(n);
    let gens = tilded_generators(cc, sys, Correction::Fermionic)?;
    let t = |s: &State| transform_with(cc, &gens, s);
    let diff = StructureDiff {
        l: &t(&sf.l)? - &sf.l,
        j: &t(&sf.j)? - &sf.j,
        q: &t(&sf.q)? - &sf.q,
        g: &t(&sf.g)? - &sf.g,
    };
    let d = cc.order.unwrap_or(8);
    let ell = State::function(sys, cc.log_jacobian_det(d)?);
    let want_j = translation(&ell);
    let want_q = -translation(&chiral_d(&ell));
    let mut report = Report::new(format!(
        "transformation of L, J, Q, G (N = {n}, order {d})"
    ));
    let zero = State::zero(sys);
    for (name, got, want) in [
        ("L~ = L", &diff.l, &zero),
        ("G~ = G", &diff.g, &zero),
        ("J~ - J = (log det dg)'", &diff.j, &want_j),
        ("Q~ - Q = -(d log det dg)'", &diff.q, &want_q),
    ] {
        let ok = agree(got, want)?;
        let detail = if ok { String::new() } else { format!("got {}", show(got)) };
        report.check(name, ok, detail);
    }
    Ok((diff, report))
}

/// Leading filtration symbols of the images of `a^i_{-1}` and `b^i_{-1}`
/// against the classical transforms of vector fields and one-forms.
pub fn filtration_check(cc: &CoordChange) -> Result<Report, CoordError> {
    let n = cc.n();
    let sys = System::omega(n);
    let gens = tilded_generators(cc, sys, Correction::Fermionic)?;
    let dg = jacobian(&cc.g);
    let mut report = Report::new("filtration symbols of transformed generators");
    for i in 1..=n {
        let a = State::generator(sys, ModeVar::a(i, -1)).expect("valid");
        let got = transform_with(cc, &gens, &a)?.top_symbol();
        let want = state_of(
            sys,
            (0..n)
                .map(|j| (cc.m[j][i - 1].clone(), vec![ModeVar::a(j + 1, -1)]))
                .collect(),
        );
        report.check(format!("symbol of a{i}_{{-1}}"), agree(&got, &want)?, show(&got));
        let b = State::generator(sys, ModeVar::b(i, -1)).expect("valid");
        let got = transform_with(cc, &gens, &b)?.top_symbol();
        let want = state_of(
            sys,
            (0..n)
                .map(|j| (dg[i - 1][j].clone(), vec![ModeVar::b(j + 1, -1)]))
                .collect(),
        );
        report.check(format!("symbol of b{i}_{{-1}}"), agree(&got, &want)?, show(&got));
    }
    Ok(report)
}

/// A seeded random change fixing the origin: an invertible integer linear
/// part plus quadratic and cubic terms with small integer coefficients.
pub fn random_change(n: usize, d: u32, seed: u64) -> Result<CoordChange, CoordError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let lin: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let lq: Vec<Vec<FunctionElem>> = lin
            .iter()
            .map(|r| r.iter().map(|&c| FunctionElem::int(c)).collect())
            .collect();
        if det(&lq).is_zero() {
            continue;
        }
        let mut g = Vec::new();
        for row in &lin {
            let mut p = Poly::zero();
            for (j, &c) in row.iter().enumerate() {
                p.add_term(Exp::var(j), qi(c));
            }
            for deg in 2..=3u32 {
                for e in crate::cdr::exponents(n, deg) {
                    let c: i64 = rng.gen_range(-1..=1);
                    if c != 0 {
                        p.add_term(e, qi(c));
                    }
                }
            }
            g.push(FunctionElem::poly(p));
        }
        return CoordChange::series(g, d);
    }
}

/// Mode in which the coefficients of transformed states live.
pub fn coefficient_mode(cc: &CoordChange) -> Mode {
    match cc.order {
        Some(d) => Mode::Series(d),
        None => Mode::Rational,
    }
}

#[cfg(test)]
mod tests;
