use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, Rational};

/// Exponent vector over `x1..xN`, stored without trailing zeros so that the
/// same monomial has exactly one representation regardless of `N`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Exp(Vec<u32>);

impl Exp {
    pub fn new(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Exp(v)
    }

    pub fn one() -> Self {
        Exp(Vec::new())
    }

    /// `x_i` with `i` zero-based.
    pub fn var(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Exp(v)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Exp) -> Exp {
        let n = self.0.len().max(other.0.len());
        Exp::new((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Exp) -> Option<Exp> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            if v[i] < *e {
                return None;
            }
            v[i] -= e;
        }
        Some(Exp::new(v))
    }

    pub fn with(&self, i: usize, e: u32) -> Exp {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = e;
        Exp::new(v)
    }
}

/// Graded lexicographic order: total degree first, then a larger exponent of
/// `x1` wins, then `x2`, and so on.
impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.get(i).cmp(&other.get(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over ℚ in `x1..xN`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Exp, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial(Exp::one(), c)
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(Rational::from_integer(c.into()))
    }

    /// The coordinate `x_{i+1}` (zero-based `i`).
    pub fn var(i: usize) -> Self {
        Poly::monomial(Exp::var(i), Rational::one())
    }

    pub fn monomial(e: Exp, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Rational)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exp, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_one())
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Exp::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, e: &Exp) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest term in the graded-lex order.
    pub fn leading(&self) -> Option<(&Exp, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(e, _)| e.degree())
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Exp::degree).min()
    }

    /// Number of variables actually present (one past the highest index used).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(Exp::len).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e.get(i)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul_exp(&self, m: &Exp) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.mul(m), v.clone())).collect(),
        }
    }

    /// Product keeping only terms of total degree `<= max_deg`.
    pub fn mul_truncated(&self, other: &Poly, max_deg: Option<u32>) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                if let Some(d) = max_deg {
                    if e1.degree() + e2.degree() > d {
                        continue;
                    }
                }
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn truncate(&self, max_deg: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= max_deg)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// ∂/∂x_{i+1}.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let k = e.get(i);
            if k > 0 {
                out.add_term(e.with(i, k - 1), c * Rational::from_integer(k.into()));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, k) in e.as_slice().iter().enumerate() {
                let x = point.get(i).cloned().unwrap_or_else(Rational::zero);
                t *= num_traits::pow(x, *k as usize);
            }
            acc += t;
        }
        acc
    }

    /// View as a univariate polynomial in `x_{v+1}` with coefficients free of it.
    pub fn coeffs_in(&self, v: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.get(v);
            out.entry(k).or_default().add_term(e.with(v, 0), c.clone());
        }
        out
    }

    fn from_coeffs_in(v: usize, cs: &BTreeMap<u32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in cs {
            for (e, c) in &p.terms {
                out.add_term(e.with(v, *k), c.clone());
            }
        }
        out
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (le, lc) = d.leading()?;
        let (le, lc) = (le.clone(), lc.clone());
        if d.num_terms() == 1 {
            let mut q = Poly::zero();
            for (e, c) in &self.terms {
                q.add_term(e.div(&le)?, c / &lc);
            }
            return Some(q);
        }
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((re, rc)) = r.leading() {
            let m = re.div(&le)?;
            let c = rc / &lc;
            r = &r - &d.mul_exp(&m).scale(&c);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Leading coefficient made 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Poly::zero(),
        }
    }

    /// Greatest common divisor, normalized to be monic (zero only if both are).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        let v = a.nvars().max(b.nvars()) - 1;
        let (ca, pa) = a.content_split(v);
        let (cb, pb) = b.content_split(v);
        let c = Poly::gcd(&ca, &cb);
        let mut p = pa;
        let mut q = pb;
        if q.degree_in(v) > p.degree_in(v) {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() {
            let r = p.prem(&q, v);
            p = q;
            q = if r.is_zero() { r } else { r.content_split(v).1 };
        }
        let g = p.content_split(v).1;
        (&c * &g).monic()
    }

    /// Content with respect to `x_{v+1}` and the primitive part.
    fn content_split(&self, v: usize) -> (Poly, Poly) {
        let cs = self.coeffs_in(v);
        let mut g = Poly::zero();
        for p in cs.values() {
            g = Poly::gcd(&g, p);
            if g.is_one() {
                break;
            }
        }
        if g.is_zero() {
            return (Poly::one(), Poly::zero());
        }
        let prim: BTreeMap<u32, Poly> = cs
            .iter()
            .map(|(k, p)| (*k, p.div_exact(&g).expect("content divides")))
            .collect();
        (g, Poly::from_coeffs_in(v, &prim))
    }

    /// Pseudo-remainder in `x_{v+1}` up to a factor free of that variable.
    fn prem(&self, b: &Poly, v: usize) -> Poly {
        let db = b.degree_in(v);
        let lb = b.coeffs_in(v).remove(&db).unwrap_or_default();
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(v);
            if dr < db {
                break;
            }
            let lr = r.coeffs_in(v).remove(&dr).unwrap_or_default();
            let shift = Exp::var(v);
            let mut t = b * &lr;
            for _ in 0..(dr - db) {
                t = t.mul_exp(&shift);
            }
            r = &(&r * &lb) - &t;
        }
        r
    }

    /// Render with variable names `x1..xN`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn fmt_monomial(e: &Exp) -> String {
    let mut parts = Vec::new();
    for (i, k) in e.as_slice().iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, k)),
        }
    }
    parts.join("*")
}

/// Writes `c*m` with the sign handled by the caller.
fn fmt_term(e: &Exp, c: &Rational) -> String {
    let abs = c.abs();
    if e.is_one() {
        return fmt_rational(&abs);
    }
    let m = fmt_monomial(e);
    if abs.is_one() {
        m
    } else if abs.is_integer() {
        format!("{}*{}", abs, m)
    } else {
        format!("({})*{}", fmt_rational(&abs), m)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}", fmt_term(e, c))?;
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
