//! States of `V_N`, `Λ_N` and `Ω_N`: function-coefficient combinations of
//! canonically ordered monomials in creation modes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::coeffs::{CoeffError, FunctionElem, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    Phi,
    Psi,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::Psi, Family::Phi, Family::B];

    pub fn is_odd(self) -> bool {
        matches!(self, Family::Phi | Family::Psi)
    }

    /// Position in the filtration order a > psi > phi > b (0 is greatest).
    pub fn rank(self) -> u8 {
        match self {
            Family::A => 0,
            Family::Psi => 1,
            Family::Phi => 2,
            Family::B => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::Phi => "phi",
            Family::Psi => "psi",
        }
    }

    /// Highest creation mode: 0 for b and phi, -1 for a and psi.
    pub fn max_creation_mode(self) -> i32 {
        match self {
            Family::B | Family::Phi => 0,
            Family::A | Family::Psi => -1,
        }
    }

    /// Conformal weight of the generator field (0 for b, phi; 1 for a, psi).
    pub fn field_weight(self) -> i32 {
        -self.max_creation_mode()
    }

    /// The partner family with the nonzero bracket.
    pub fn dual(self) -> Family {
        match self {
            Family::A => Family::B,
            Family::B => Family::A,
            Family::Phi => Family::Psi,
            Family::Psi => Family::Phi,
        }
    }
}

/// A generator mode `x^i_n` (`index` is 1-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModeVar {
    pub family: Family,
    pub index: usize,
    pub mode: i32,
}

impl ModeVar {
    pub fn new(family: Family, index: usize, mode: i32) -> Self {
        ModeVar {
            family,
            index,
            mode,
        }
    }

    pub fn a(i: usize, n: i32) -> Self {
        ModeVar::new(Family::A, i, n)
    }
    pub fn b(i: usize, n: i32) -> Self {
        ModeVar::new(Family::B, i, n)
    }
    pub fn phi(i: usize, n: i32) -> Self {
        ModeVar::new(Family::Phi, i, n)
    }
    pub fn psi(i: usize, n: i32) -> Self {
        ModeVar::new(Family::Psi, i, n)
    }

    pub fn is_odd(&self) -> bool {
        self.family.is_odd()
    }

    pub fn is_creation(&self) -> bool {
        self.mode <= self.family.max_creation_mode()
    }

    /// Conformal weight of the creation variable.
    pub fn weight(&self) -> i32 {
        -self.mode
    }

    fn key(&self) -> (u8, i32, usize) {
        (self.family.rank(), self.mode, self.index)
    }
}

/// Ascending order lists greater variables first: family a > psi > phi > b,
/// then more negative modes, then lower indices.
impl Ord for ModeVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for ModeVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}_{{{}}}", self.family.name(), self.index, self.mode)
    }
}

/// Canonically ordered product of creation variables with multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(ModeVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(ModeVar, u32)] {
        &self.0
    }

    /// Variables with repetition, in canonical order.
    pub fn expanded(&self) -> Vec<ModeVar> {
        self.0
            .iter()
            .flat_map(|(v, k)| std::iter::repeat(*v).take(*k as usize))
            .collect()
    }

    pub fn weight(&self) -> i32 {
        self.0.iter().map(|(v, k)| v.weight() * *k as i32).sum()
    }

    pub fn charge(&self) -> i32 {
        self.0
            .iter()
            .map(|(v, k)| match v.family {
                Family::Phi => *k as i32,
                Family::Psi => -(*k as i32),
                _ => 0,
            })
            .sum()
    }

    pub fn odd_count(&self) -> u32 {
        self.0.iter().filter(|(v, _)| v.is_odd()).map(|(_, k)| k).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.odd_count() % 2 == 1
    }

    pub fn degree_of(&self, family: Family) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| v.family == family)
            .map(|(_, k)| k)
            .sum()
    }

    pub fn multiplicity(&self, v: &ModeVar) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map_or(0, |(_, k)| *k)
    }

    /// Sort a variable list into canonical order; `None` if an odd variable
    /// repeats, otherwise the Koszul sign of the reordering.
    pub fn from_vars(vars: &[ModeVar]) -> Option<(bool, Monomial)> {
        let mut v = vars.to_vec();
        let mut negate = false;
        // insertion sort, tracking transpositions of odd pairs
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                if v[j - 1].is_odd() && v[j].is_odd() {
                    negate = !negate;
                }
                v.swap(j - 1, j);
                j -= 1;
            }
        }
        let mut out: Vec<(ModeVar, u32)> = Vec::new();
        for x in v {
            match out.last_mut() {
                Some((y, k)) if *y == x => {
                    if x.is_odd() {
                        return None;
                    }
                    *k += 1;
                }
                _ => out.push((x, 1)),
            }
        }
        Some((negate, Monomial(out)))
    }

    /// `v · self`: the sign is that of moving `v` to its canonical slot.
    pub fn insert(&self, v: ModeVar) -> Option<(bool, Monomial)> {
        let mut out = self.0.clone();
        let pos = out.partition_point(|(w, _)| *w < v);
        let odd_before: u32 = out[..pos]
            .iter()
            .filter(|(w, _)| w.is_odd())
            .map(|(_, k)| k)
            .sum();
        if pos < out.len() && out[pos].0 == v {
            if v.is_odd() {
                return None;
            }
            out[pos].1 += 1;
        } else {
            out.insert(pos, (v, 1));
        }
        Some((v.is_odd() && odd_before % 2 == 1, Monomial(out)))
    }

    /// Left derivative by `v`: the multiplicity (even) or the Koszul sign
    /// of moving `v` to the front (odd), and the remaining monomial.
    pub fn remove(&self, v: &ModeVar) -> Option<(Rational, Monomial)> {
        let pos = self.0.iter().position(|(w, _)| w == v)?;
        let mut out = self.0.clone();
        let k = out[pos].1;
        let factor = if v.is_odd() {
            let odd_before: u32 = out[..pos]
                .iter()
                .filter(|(w, _)| w.is_odd())
                .map(|(_, k)| k)
                .sum();
            if odd_before % 2 == 1 {
                -Rational::one()
            } else {
                Rational::one()
            }
        } else {
            Rational::from_integer(k.into())
        };
        if k == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((factor, Monomial(out)))
    }

    /// `self · other` in canonical form.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut vars = self.expanded();
        vars.extend(other.expanded());
        Monomial::from_vars(&vars)
    }

    /// Multiset of (family, mode) pairs in canonical order, ignoring indices.
    pub fn shape(&self) -> Vec<(Family, i32)> {
        self.expanded()
            .into_iter()
            .map(|v| (v.family, v.mode))
            .collect()
    }
}

/// Lexicographic comparison on canonical sequences with a monomial that
/// extends another counted as greater; ascending order lists the greatest
/// monomial first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.expanded(), other.expanded());
        for (x, y) in a.iter().zip(&b) {
            match x.cmp(y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        b.len().cmp(&a.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.expanded().iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Kind {
    Heisenberg,
    Clifford,
    Omega,
}

impl Kind {
    pub fn has(self, family: Family) -> bool {
        match self {
            Kind::Heisenberg => !family.is_odd(),
            Kind::Clifford => family.is_odd(),
            Kind::Omega => true,
        }
    }
}

/// Which free-field algebra a state lives in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct System {
    pub n: usize,
    pub kind: Kind,
}

impl System {
    pub fn heisenberg(n: usize) -> Self {
        System {
            n,
            kind: Kind::Heisenberg,
        }
    }
    pub fn clifford(n: usize) -> Self {
        System {
            n,
            kind: Kind::Clifford,
        }
    }
    pub fn omega(n: usize) -> Self {
        System {
            n,
            kind: Kind::Omega,
        }
    }

    pub fn families(&self) -> Vec<Family> {
        Family::ALL
            .into_iter()
            .filter(|f| self.kind.has(*f))
            .collect()
    }

    pub fn validate(&self, v: &ModeVar) -> Result<(), StateError> {
        if v.index == 0 || v.index > self.n {
            return Err(StateError::InvalidIndex(*v));
        }
        if !self.kind.has(v.family) {
            return Err(StateError::WrongSystem(*v));
        }
        if !v.is_creation() {
            return Err(StateError::InvalidMode(*v));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("{0} is not a creation mode")]
    InvalidMode(ModeVar),
    #[error("{0} has an index outside the system")]
    InvalidIndex(ModeVar),
    #[error("{0} does not belong to this system")]
    WrongSystem(ModeVar),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Conformal weight and fermionic charge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Grading {
    pub weight: i32,
    pub charge: i32,
}

/// A finite combination `Σ f_m(x) · m |0>`.
#[derive(Clone, Debug)]
pub struct State {
    system: System,
    terms: BTreeMap<Monomial, FunctionElem>,
}

impl State {
    pub fn zero(system: System) -> Self {
        State {
            system,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(system: System) -> Self {
        State::function(system, FunctionElem::one())
    }

    /// `f(x) |0>`.
    pub fn function(system: System, f: FunctionElem) -> Self {
        let mut s = State::zero(system);
        s.add_term(Monomial::one(), f);
        s
    }

    /// A single generator creation mode applied to the vacuum; `b^i_0` gives `x_i`.
    pub fn generator(system: System, v: ModeVar) -> Result<Self, StateError> {
        State::normalize(system, vec![(FunctionElem::one(), vec![v])])
    }

    /// Canonical state from unordered `(coefficient, variables)` pairs.
    pub fn normalize(
        system: System,
        raw: Vec<(FunctionElem, Vec<ModeVar>)>,
    ) -> Result<Self, StateError> {
        let mut s = State::zero(system);
        for (c, vars) in raw {
            let mut coeff = c;
            let mut kept = Vec::new();
            for v in vars {
                if v.family == Family::B && v.mode == 0 {
                    if v.index == 0 || v.index > system.n || !system.kind.has(Family::B) {
                        return Err(StateError::InvalidIndex(v));
                    }
                    coeff = coeff.try_mul(&FunctionElem::var(v.index - 1))?;
                    continue;
                }
                system.validate(&v)?;
                kept.push(v);
            }
            if let Some((neg, m)) = Monomial::from_vars(&kept) {
                s.add_term(m, if neg { -coeff } else { coeff });
            }
        }
        Ok(s)
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn with_system(mut self, system: System) -> Self {
        self.system = system;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FunctionElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> FunctionElem {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every coefficient vanishes through its known order.
    pub fn vanishes_where_known(&self) -> bool {
        self.terms.values().all(FunctionElem::is_zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: FunctionElem) {
        if c.is_zero() && c.series_order().is_none() {
            return;
        }
        match self.terms.entry(m) {
            // a series zero still records how far it is known, so it stays
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() && sum.series_order().is_none() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &State, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, f) in &other.terms {
            self.add_term(m.clone(), f.scale(c));
        }
    }

    pub fn scale(&self, c: &Rational) -> State {
        let mut out = State::zero(self.system);
        out.add_scaled(self, c);
        out
    }

    /// Multiply every coefficient by a function of the zero modes.
    pub fn mul_function(&self, f: &FunctionElem) -> State {
        let mut out = State::zero(self.system);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * f);
        }
        out
    }

    /// Apply a map to every coefficient.
    pub fn map_coeffs(&self, mut g: impl FnMut(&FunctionElem) -> FunctionElem) -> State {
        let mut out = State::zero(self.system);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), g(c));
        }
        out
    }

    pub fn try_map_coeffs<E>(
        &self,
        mut g: impl FnMut(&FunctionElem) -> Result<FunctionElem, E>,
    ) -> Result<State, E> {
        let mut out = State::zero(self.system);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), g(c)?);
        }
        Ok(out)
    }

    /// Largest weight among the terms (0 for the zero state).
    pub fn max_weight(&self) -> i32 {
        self.terms.keys().map(Monomial::weight).max().unwrap_or(0)
    }

    /// Weight if homogeneous.
    pub fn weight(&self) -> Option<i32> {
        let ws: BTreeSet<i32> = self.terms.keys().map(Monomial::weight).collect();
        match ws.len() {
            0 => Some(0),
            1 => ws.into_iter().next(),
            _ => None,
        }
    }

    /// Parity if homogeneous (`true` = odd).
    pub fn parity(&self) -> Option<bool> {
        let ps: BTreeSet<bool> = self.terms.keys().map(Monomial::is_odd).collect();
        match ps.len() {
            0 => Some(false),
            1 => ps.into_iter().next(),
            _ => None,
        }
    }

    pub fn grade(&self) -> BTreeMap<Grading, State> {
        let mut out: BTreeMap<Grading, State> = BTreeMap::new();
        for (m, c) in &self.terms {
            let g = Grading {
                weight: m.weight(),
                charge: m.charge(),
            };
            out.entry(g)
                .or_insert_with(|| State::zero(self.system))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Smallest series order among the coefficients, `None` if all exact.
    pub fn min_series_order(&self) -> Option<i64> {
        self.terms.values().filter_map(FunctionElem::series_order).min()
    }

    /// Error if some coefficient is a series with no valid terms.
    pub fn check_known(&self) -> Result<(), CoeffError> {
        match self.min_series_order() {
            Some(o) if o < 0 => Err(CoeffError::TruncationUnderflow { order: o }),
            _ => Ok(()),
        }
    }

    /// Equality of all coefficients through their known orders.
    pub fn agrees_with(&self, other: &State) -> Result<bool, CoeffError> {
        let keys: BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        for m in keys {
            let a = self.terms.get(m).cloned().unwrap_or_default();
            let b = other.terms.get(m).cloned().unwrap_or_default();
            if !a.agrees_with(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Truncate every series coefficient to at most `order`.
    pub fn truncate(&self, order: u32) -> State {
        self.map_coeffs(|c| c.truncate(order))
    }

    /// Terms whose filtration shape is the greatest present.
    pub fn top_symbol(&self) -> State {
        let Some(top) = self.terms.keys().map(Monomial::shape).max_by(|a, b| cmp_shape(a, b)) else {
            return State::zero(self.system);
        };
        self.restrict_shape(|s| cmp_shape(s, &top) == Ordering::Equal)
    }

    /// Part of a weight-homogeneous state at filtration level `k`.
    pub fn filtration_symbol(&self, k: usize) -> State {
        let w = self.weight().unwrap_or_else(|| self.max_weight());
        let shapes = filtration_shapes(self.system, w);
        match shapes.get(k) {
            Some(target) => self.restrict_shape(|s| s == target.as_slice()),
            None => State::zero(self.system),
        }
    }

    /// Filtration level of each term's shape.
    pub fn filtration_levels(&self) -> BTreeSet<usize> {
        let w = self.weight().unwrap_or_else(|| self.max_weight());
        let shapes = filtration_shapes(self.system, w);
        self.terms
            .keys()
            .filter_map(|m| shapes.iter().position(|s| *s == m.shape()))
            .collect()
    }

    fn restrict_shape(&self, keep: impl Fn(&[(Family, i32)]) -> bool) -> State {
        let mut out = State::zero(self.system);
        for (m, c) in &self.terms {
            if keep(&m.shape()) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Terms of weight `w` only.
    pub fn weight_part(&self, w: i32) -> State {
        let mut out = State::zero(self.system);
        for (m, c) in &self.terms {
            if m.weight() == w {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }
}

/// Filtration order on shapes: the first differing letter decides (greater
/// family first, then more negative mode); a proper extension is greater.
pub fn cmp_shape(a: &[(Family, i32)], b: &[(Family, i32)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let kx = (x.0.rank(), x.1);
        let ky = (y.0.rank(), y.1);
        match kx.cmp(&ky) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    a.len().cmp(&b.len())
}

/// All monomial shapes of weight `w` in the system, increasing in the
/// filtration order; level `k` of the filtration is the `k`-th shape.
pub fn filtration_shapes(system: System, w: i32) -> Vec<Vec<(Family, i32)>> {
    let mut letters: Vec<(Family, i32)> = Vec::new();
    for f in system.families() {
        let top = if f == Family::B { -1 } else { f.max_creation_mode() };
        for n in (-w..=top).rev() {
            letters.push((f, n));
        }
    }
    letters.sort_by_key(|(f, n)| (f.rank(), *n));
    let mut out = Vec::new();
    let mut cur = Vec::new();
    shapes_rec(system, &letters, 0, w, &mut cur, &mut out);
    out.sort_by(|a, b| cmp_shape(a, b));
    out
}

fn shapes_rec(
    system: System,
    letters: &[(Family, i32)],
    start: usize,
    remaining: i32,
    cur: &mut Vec<(Family, i32)>,
    out: &mut Vec<Vec<(Family, i32)>>,
) {
    if remaining == 0 {
        out.push(cur.clone());
    }
    for (i, &(f, n)) in letters.iter().enumerate().skip(start) {
        let wt = -n;
        if wt > remaining {
            continue;
        }
        // odd letters of one (family, mode) can repeat at most N times
        if f.is_odd() && cur.iter().filter(|l| **l == (f, n)).count() >= system.n {
            continue;
        }
        cur.push((f, n));
        shapes_rec(system, letters, i, remaining - wt, cur, out);
        cur.pop();
    }
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other).unwrap_or(false)
    }
}

fn fmt_coeff_prefix(c: &FunctionElem) -> (bool, String) {
    // (negative, rendering without the leading sign); empty string means 1
    if let Some(k) = c.as_constant() {
        let neg = k < Rational::zero();
        let a = if neg { -k } else { k };
        if a.is_one() {
            return (neg, String::new());
        }
        let s = crate::coeffs::rational::fmt_rational(&a);
        return (neg, if a.is_integer() { s } else { format!("({s})") });
    }
    if let FunctionElem::Poly(p) = c {
        if p.num_terms() == 1 {
            let (_, lc) = p.leading().unwrap();
            let neg = *lc < Rational::zero();
            let q = if neg { -p.clone() } else { p.clone() };
            return (neg, q.to_string());
        }
    }
    if let FunctionElem::Rational { num, den } = c {
        if den.is_one() {
            return fmt_coeff_prefix(&FunctionElem::Poly(num.clone()));
        }
    }
    (false, format!("({c})"))
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, coeff) = fmt_coeff_prefix(c);
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match (coeff.is_empty(), m.is_one()) {
                (true, true) => write!(f, "|0>")?,
                (true, false) => write!(f, "{m} |0>")?,
                (false, true) => write!(f, "{coeff} |0>")?,
                (false, false) => write!(f, "{coeff} * {m} |0>")?,
            }
        }
        Ok(())
    }
}

impl Add for &State {
    type Output = State;
    fn add(self, rhs: &State) -> State {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &State {
    type Output = State;
    fn sub(self, rhs: &State) -> State {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &State {
    type Output = State;
    fn neg(self) -> State {
        self.scale(&-Rational::one())
    }
}

impl Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        &self + &rhs
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        &self - &rhs
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        -&self
    }
}

/// All monomials of weight `w`, in canonical order of generation; `phi_0`
/// letters are included and `b_0` is left to the coefficients.
pub fn basis_monomials(system: System, w: i32) -> Vec<Monomial> {
    let mut vars: Vec<ModeVar> = Vec::new();
    for f in system.families() {
        for i in 1..=system.n {
            let top = if f == Family::B { -1 } else { f.max_creation_mode() };
            for n in (-w..=top).rev() {
                vars.push(ModeVar::new(f, i, n));
            }
        }
    }
    vars.sort();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    monomials_rec(&vars, 0, w, &mut cur, &mut out);
    out
}

fn monomials_rec(
    vars: &[ModeVar],
    start: usize,
    remaining: i32,
    cur: &mut Vec<ModeVar>,
    out: &mut Vec<Monomial>,
) {
    if remaining == 0 {
        out.push(Monomial::from_vars(cur).expect("distinct odd letters").1);
    }
    for (i, v) in vars.iter().enumerate().skip(start) {
        if v.weight() > remaining {
            continue;
        }
        if v.is_odd() && cur.last() == Some(v) {
            continue;
        }
        cur.push(*v);
        monomials_rec(vars, i, remaining - v.weight(), cur, out);
        cur.pop();
    }
}
