use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Exp, Poly};
use super::rational::{qi, Rational};
use super::CoeffError;

/// Coefficient mode of a [`FunctionElem`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    Poly,
    Rational,
    /// Truncated power series valid through total degree `D`.
    Series(u32),
}

/// An exact function of the zero-mode symbols `x1..xN`.
///
/// `Series` stores the expanded truncation together with its valid order; an
/// order below zero means no coefficient is known and is reported as a
/// truncation underflow wherever a value is inspected.
#[derive(Clone, Debug)]
pub enum FunctionElem {
    Poly(Poly),
    Rational { num: Poly, den: Poly },
    Series { terms: Poly, order: i64 },
}

impl Default for FunctionElem {
    fn default() -> Self {
        FunctionElem::zero()
    }
}

impl FunctionElem {
    pub fn zero() -> Self {
        FunctionElem::Poly(Poly::zero())
    }

    pub fn one() -> Self {
        FunctionElem::Poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        FunctionElem::Poly(Poly::constant(c))
    }

    pub fn int(c: i64) -> Self {
        FunctionElem::constant(qi(c))
    }

    /// `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        FunctionElem::Poly(Poly::var(i))
    }

    pub fn poly(p: Poly) -> Self {
        FunctionElem::Poly(p)
    }

    pub fn series(p: Poly, order: u32) -> Self {
        FunctionElem::Series {
            terms: p.truncate(order),
            order: order as i64,
        }
    }

    /// Reduced fraction `num/den`; the denominator is made monic.
    pub fn rational(num: Poly, den: Poly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, mut d) = (
            num.div_exact(&g).expect("gcd divides numerator"),
            den.div_exact(&g).expect("gcd divides denominator"),
        );
        let lc = d.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(FunctionElem::Rational { num: n, den: d })
    }

    pub fn mode(&self) -> Mode {
        match self {
            FunctionElem::Poly(_) => Mode::Poly,
            FunctionElem::Rational { .. } => Mode::Rational,
            FunctionElem::Series { order, .. } => Mode::Series((*order).max(0) as u32),
        }
    }

    /// Valid order for series; `None` for exact elements.
    pub fn series_order(&self) -> Option<i64> {
        match self {
            FunctionElem::Series { order, .. } => Some(*order),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionElem::Poly(p) => p.is_zero(),
            FunctionElem::Rational { num, .. } => num.is_zero(),
            FunctionElem::Series { terms, order } => *order >= 0 && terms.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FunctionElem::Poly(p) => p.is_one(),
            FunctionElem::Rational { num, den } => num.is_one() && den.is_one(),
            FunctionElem::Series { terms, order } => *order >= 0 && terms.is_one(),
        }
    }

    /// The value as a polynomial when it is one exactly (or as a truncation).
    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            FunctionElem::Poly(p) => Some(p),
            FunctionElem::Rational { num, den } if den.is_one() => Some(num),
            FunctionElem::Series { terms, .. } => Some(terms),
            _ => None,
        }
    }

    pub fn numerator(&self) -> &Poly {
        match self {
            FunctionElem::Poly(p) => p,
            FunctionElem::Rational { num, .. } => num,
            FunctionElem::Series { terms, .. } => terms,
        }
    }

    pub fn denominator(&self) -> Poly {
        match self {
            FunctionElem::Rational { den, .. } => den.clone(),
            _ => Poly::one(),
        }
    }

    /// Value at the origin, if defined.
    pub fn constant_term(&self) -> Result<Rational, CoeffError> {
        match self {
            FunctionElem::Poly(p) => Ok(p.constant_term()),
            FunctionElem::Rational { num, den } => {
                let d = den.constant_term();
                if d.is_zero() {
                    Err(CoeffError::NotInvertible("denominator vanishes at the origin".into()))
                } else {
                    Ok(num.constant_term() / d)
                }
            }
            FunctionElem::Series { terms, order } => {
                if *order < 0 {
                    Err(CoeffError::TruncationUnderflow { order: *order })
                } else {
                    Ok(terms.constant_term())
                }
            }
        }
    }

    /// Constant value if the element is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self {
            FunctionElem::Poly(p) if p.is_constant() => Some(p.constant_term()),
            FunctionElem::Rational { num, den } if num.is_constant() && den.is_constant() => {
                Some(num.constant_term() / den.constant_term())
            }
            FunctionElem::Series { terms, order } if *order >= 0 && terms.is_constant() => {
                Some(terms.constant_term())
            }
            _ => None,
        }
    }

    /// Re-express in the given mode.
    pub fn to_mode(&self, mode: Mode) -> Result<FunctionElem, CoeffError> {
        match (self, mode) {
            (FunctionElem::Poly(p), Mode::Poly) => Ok(FunctionElem::Poly(p.clone())),
            (FunctionElem::Poly(p), Mode::Rational) => Ok(FunctionElem::Rational {
                num: p.clone(),
                den: Poly::one(),
            }),
            (FunctionElem::Poly(p), Mode::Series(d)) => Ok(FunctionElem::series(p.clone(), d)),
            (FunctionElem::Rational { .. }, Mode::Rational) => Ok(self.clone()),
            (FunctionElem::Rational { num, den }, Mode::Poly) => {
                if den.is_one() {
                    Ok(FunctionElem::Poly(num.clone()))
                } else {
                    Err(CoeffError::ModeMismatch(format!("{self} is not a polynomial")))
                }
            }
            (FunctionElem::Rational { num, den }, Mode::Series(d)) => {
                let inv = series_inverse(den, d)?;
                Ok(FunctionElem::Series {
                    terms: num.mul_truncated(&inv, Some(d)),
                    order: d as i64,
                })
            }
            (FunctionElem::Series { terms, order }, Mode::Series(d)) => {
                let o = (*order).min(d as i64);
                Ok(FunctionElem::Series {
                    terms: truncate_signed(terms, o),
                    order: o,
                })
            }
            (FunctionElem::Series { .. }, _) => Err(CoeffError::ModeMismatch(
                "a truncated series cannot be made exact".into(),
            )),
        }
    }

    fn common_mode(a: &FunctionElem, b: &FunctionElem) -> Result<Mode, CoeffError> {
        use FunctionElem as F;
        Ok(match (a, b) {
            (F::Poly(_), F::Poly(_)) => Mode::Poly,
            (F::Poly(_) | F::Rational { .. }, F::Poly(_) | F::Rational { .. }) => Mode::Rational,
            (F::Series { order: o1, .. }, F::Series { order: o2, .. }) => {
                Mode::Series((*o1).min(*o2).max(0) as u32)
            }
            (F::Series { order, .. }, _) | (_, F::Series { order, .. }) => {
                Mode::Series((*order).max(0) as u32)
            }
        })
    }

    fn min_order(a: &FunctionElem, b: &FunctionElem) -> Option<i64> {
        match (a.series_order(), b.series_order()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    pub fn try_add(&self, other: &FunctionElem) -> Result<FunctionElem, CoeffError> {
        use FunctionElem as F;
        if other.is_zero() && other.series_order().is_none() {
            return Ok(self.clone());
        }
        if self.is_zero() && self.series_order().is_none() {
            return Ok(other.clone());
        }
        Ok(match (self, other) {
            (F::Poly(a), F::Poly(b)) => F::Poly(a + b),
            (F::Rational { num: n1, den: d1 }, F::Rational { num: n2, den: d2 }) if d1 == d2 => {
                F::rational(n1 + n2, d1.clone())?
            }
            _ => match FunctionElem::common_mode(self, other)? {
                Mode::Rational => {
                    let (n1, d1) = (self.numerator(), self.denominator());
                    let (n2, d2) = (other.numerator(), other.denominator());
                    F::rational(&(n1 * &d2) + &(n2 * &d1), &d1 * &d2)?
                }
                _ => {
                    let o = FunctionElem::min_order(self, other).expect("series operand");
                    let a = self.series_terms(o)?;
                    let b = other.series_terms(o)?;
                    F::Series {
                        terms: &a + &b,
                        order: o,
                    }
                }
            },
        })
    }

    pub fn try_mul(&self, other: &FunctionElem) -> Result<FunctionElem, CoeffError> {
        use FunctionElem as F;
        if self.is_one() && self.series_order().is_none() {
            return Ok(other.clone());
        }
        if other.is_one() && other.series_order().is_none() {
            return Ok(self.clone());
        }
        Ok(match (self, other) {
            (F::Poly(a), F::Poly(b)) => F::Poly(a * b),
            _ => match FunctionElem::common_mode(self, other)? {
                Mode::Rational => F::rational(
                    self.numerator() * other.numerator(),
                    &self.denominator() * &other.denominator(),
                )?,
                _ => {
                    let o = FunctionElem::min_order(self, other).expect("series operand");
                    let a = self.series_terms(o)?;
                    let b = other.series_terms(o)?;
                    F::Series {
                        terms: if o < 0 {
                            Poly::zero()
                        } else {
                            a.mul_truncated(&b, Some(o as u32))
                        },
                        order: o,
                    }
                }
            },
        })
    }

    /// Expansion through degree `o` (empty when `o < 0`).
    fn series_terms(&self, o: i64) -> Result<Poly, CoeffError> {
        if o < 0 {
            return Ok(Poly::zero());
        }
        match self {
            FunctionElem::Poly(p) => Ok(p.truncate(o as u32)),
            FunctionElem::Series { terms, .. } => Ok(terms.truncate(o as u32)),
            FunctionElem::Rational { num, den } => {
                let inv = series_inverse(den, o as u32)?;
                Ok(num.mul_truncated(&inv, Some(o as u32)))
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> FunctionElem {
        match self {
            FunctionElem::Poly(p) => FunctionElem::Poly(p.scale(c)),
            FunctionElem::Rational { num, den } => {
                if c.is_zero() {
                    FunctionElem::zero()
                } else {
                    FunctionElem::Rational {
                        num: num.scale(c),
                        den: den.clone(),
                    }
                }
            }
            FunctionElem::Series { terms, order } => FunctionElem::Series {
                terms: terms.scale(c),
                order: *order,
            },
        }
    }

    /// Multiplicative inverse.
    pub fn invert(&self) -> Result<FunctionElem, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::NotInvertible("zero".into()));
        }
        match self {
            FunctionElem::Poly(p) => FunctionElem::rational(Poly::one(), p.clone()),
            FunctionElem::Rational { num, den } => FunctionElem::rational(den.clone(), num.clone()),
            FunctionElem::Series { terms, order } => {
                if *order < 0 {
                    return Err(CoeffError::TruncationUnderflow { order: *order });
                }
                Ok(FunctionElem::Series {
                    terms: series_inverse(terms, *order as u32)?,
                    order: *order,
                })
            }
        }
    }

    pub fn try_div(&self, other: &FunctionElem) -> Result<FunctionElem, CoeffError> {
        if let (FunctionElem::Poly(a), FunctionElem::Poly(b)) = (self, other) {
            if let Some(q) = a.div_exact(b) {
                return Ok(FunctionElem::Poly(q));
            }
        }
        self.try_mul(&other.invert()?)
    }

    /// ∂/∂x_{i+1}. Series lose one degree of validity.
    pub fn partial(&self, i: usize) -> FunctionElem {
        match self {
            FunctionElem::Poly(p) => FunctionElem::Poly(p.partial(i)),
            FunctionElem::Rational { num, den } => {
                let n = &(&num.partial(i) * den) - &(num * &den.partial(i));
                FunctionElem::rational(n, den * den).expect("nonzero denominator")
            }
            FunctionElem::Series { terms, order } => {
                let o = order - 1;
                FunctionElem::Series {
                    terms: truncate_signed(&terms.partial(i), o),
                    order: o,
                }
            }
        }
    }

    /// Mixed partial derivative ∂^γ with `gamma[i]` derivatives in `x_{i+1}`.
    pub fn partial_multi(&self, gamma: &[u32]) -> FunctionElem {
        let mut out = self.clone();
        for (i, k) in gamma.iter().enumerate() {
            for _ in 0..*k {
                out = out.partial(i);
            }
        }
        out
    }

    /// Substitute `x_{i+1} -> subs[i]`.
    ///
    /// When the substituted values are series without constant term the
    /// result is a series of the smallest order involved.
    pub fn compose(&self, subs: &[FunctionElem]) -> Result<FunctionElem, CoeffError> {
        match self {
            FunctionElem::Poly(p) => compose_poly(p, subs),
            FunctionElem::Rational { num, den } => {
                compose_poly(num, subs)?.try_div(&compose_poly(den, subs)?)
            }
            FunctionElem::Series { terms, order } => {
                for s in subs {
                    if !s.constant_term()?.is_zero() {
                        return Err(CoeffError::NotInvertible(
                            "series composition needs substitutions vanishing at the origin".into(),
                        ));
                    }
                }
                let r = compose_poly(terms, subs)?;
                let o = r.series_order().map_or(*order, |x| x.min(*order));
                Ok(FunctionElem::Series {
                    terms: r.series_terms(o)?,
                    order: o,
                })
            }
        }
    }

    /// Truncate a series to a smaller order; exact elements are returned as is.
    pub fn truncate(&self, order: u32) -> FunctionElem {
        match self {
            FunctionElem::Series { terms, order: o } => {
                let n = (*o).min(order as i64);
                FunctionElem::Series {
                    terms: truncate_signed(terms, n),
                    order: n,
                }
            }
            _ => self.clone(),
        }
    }

    /// Expand as a series through the given order.
    pub fn expand(&self, order: u32) -> Result<FunctionElem, CoeffError> {
        self.to_mode(Mode::Series(order))
    }

    /// Compare, treating series as known only through their order.
    pub fn agrees_with(&self, other: &FunctionElem) -> Result<bool, CoeffError> {
        match FunctionElem::min_order(self, other) {
            None => Ok(self.try_add(&other.scale(&-Rational::one()))?.is_zero()),
            Some(o) if o < 0 => Err(CoeffError::TruncationUnderflow { order: o }),
            Some(o) => Ok(self.series_terms(o)? == other.series_terms(o)?),
        }
    }

    /// `Some((c, k))` when the element is `c * x^k` for a single variable, `k`
    /// possibly negative, together with the variable index.
    pub fn laurent_terms(&self) -> Option<Vec<(Vec<i64>, Rational)>> {
        let den = self.denominator();
        if den.num_terms() != 1 {
            return None;
        }
        let (de, dc) = den.leading()?;
        let mut out = Vec::new();
        for (e, c) in self.numerator().terms() {
            let n = e.len().max(de.len());
            let v = (0..n).map(|i| e.get(i) as i64 - de.get(i) as i64).collect();
            out.push((v, c / dc));
        }
        Some(out)
    }

    /// Build from Laurent monomials `c * x^v` (negative exponents allowed).
    pub fn from_laurent(terms: &[(Vec<i64>, Rational)]) -> FunctionElem {
        let n = terms.iter().map(|(v, _)| v.len()).max().unwrap_or(0);
        let shift: Vec<u32> = (0..n)
            .map(|i| {
                terms
                    .iter()
                    .map(|(v, _)| -v.get(i).copied().unwrap_or(0))
                    .max()
                    .unwrap_or(0)
                    .max(0) as u32
            })
            .collect();
        if shift.iter().all(|s| *s == 0) {
            return FunctionElem::Poly(Poly::from_terms(terms.iter().map(|(v, c)| {
                (Exp::new(v.iter().map(|k| *k as u32).collect()), c.clone())
            })));
        }
        let num = Poly::from_terms(terms.iter().map(|(v, c)| {
            (
                Exp::new(
                    (0..n)
                        .map(|i| (v.get(i).copied().unwrap_or(0) + shift[i] as i64) as u32)
                        .collect(),
                ),
                c.clone(),
            )
        }));
        FunctionElem::rational(num, Poly::monomial(Exp::new(shift), Rational::one()))
            .expect("monomial denominator")
    }
}

fn truncate_signed(p: &Poly, o: i64) -> Poly {
    if o < 0 {
        Poly::zero()
    } else {
        p.truncate(o as u32)
    }
}

fn compose_poly(p: &Poly, subs: &[FunctionElem]) -> Result<FunctionElem, CoeffError> {
    let mut acc = FunctionElem::zero();
    let mut powers: Vec<Vec<FunctionElem>> = vec![vec![FunctionElem::one()]; subs.len()];
    for (e, c) in p.terms() {
        let mut t = FunctionElem::constant(c.clone());
        for (i, k) in e.as_slice().iter().enumerate() {
            if *k == 0 {
                continue;
            }
            let s = subs.get(i).ok_or_else(|| {
                CoeffError::ModeMismatch(format!("no substitution for x{}", i + 1))
            })?;
            while powers[i].len() <= *k as usize {
                let next = powers[i].last().unwrap().try_mul(s)?;
                powers[i].push(next);
            }
            t = t.try_mul(&powers[i][*k as usize])?;
        }
        acc = acc.try_add(&t)?;
    }
    Ok(acc)
}

/// Inverse of a polynomial with nonzero constant term, through degree `d`.
pub fn series_inverse(p: &Poly, d: u32) -> Result<Poly, CoeffError> {
    let c = p.constant_term();
    if c.is_zero() {
        return Err(CoeffError::NotInvertible(
            "series with zero constant term".into(),
        ));
    }
    let ci = c.recip();
    // 1/p = ci * Σ (-u)^k with u = p*ci - 1
    let u = &p.scale(&ci) - &Poly::one();
    let neg_u = -&u;
    let mut acc = Poly::one();
    let mut pow = Poly::one();
    for _ in 0..d {
        pow = pow.mul_truncated(&neg_u, Some(d));
        if pow.is_zero() {
            break;
        }
        acc = &acc + &pow;
    }
    Ok(acc.truncate(d).scale(&ci))
}

/// log(p) - log(p(0)) through degree `d`, for `p(0) != 0`.
pub fn series_log(p: &Poly, d: u32) -> Result<Poly, CoeffError> {
    let c = p.constant_term();
    if c.is_zero() {
        return Err(CoeffError::NotInvertible("log of a series vanishing at the origin".into()));
    }
    let u = &p.scale(&c.recip()) - &Poly::one();
    let mut acc = Poly::zero();
    let mut pow = Poly::one();
    for k in 1..=d as i64 {
        pow = pow.mul_truncated(&u, Some(d));
        if pow.is_zero() {
            break;
        }
        let s = if k % 2 == 1 { qi(1) } else { qi(-1) };
        acc = &acc + &pow.scale(&(s / qi(k)));
    }
    Ok(acc)
}

impl PartialEq for FunctionElem {
    /// Equality through the known order; underflowed series compare unequal.
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other).unwrap_or(false)
    }
}

impl fmt::Display for FunctionElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionElem::Poly(p) => write!(f, "{p}"),
            FunctionElem::Rational { num, den } => {
                if den.is_one() {
                    write!(f, "{num}")
                } else {
                    let n = if num.num_terms() > 1 {
                        format!("({num})")
                    } else {
                        num.to_string()
                    };
                    let simple = den.num_terms() == 1
                        && den.leading().is_some_and(|(_, c)| c.is_one());
                    if simple {
                        write!(f, "{n}/{den}")
                    } else {
                        write!(f, "{n}/({den})")
                    }
                }
            }
            FunctionElem::Series { terms, order } => {
                if terms.is_zero() {
                    write!(f, "O({})", order + 1)
                } else {
                    write!(f, "{terms} + O({})", order + 1)
                }
            }
        }
    }
}

macro_rules! ops {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for &FunctionElem {
            type Output = FunctionElem;
            fn $m(self, rhs: &FunctionElem) -> FunctionElem {
                self.$f(rhs).unwrap_or_else(|e| panic!("coefficient arithmetic: {e}"))
            }
        }
        impl $tr for FunctionElem {
            type Output = FunctionElem;
            fn $m(self, rhs: FunctionElem) -> FunctionElem {
                (&self).$m(&rhs)
            }
        }
    };
}
ops!(Add, add, try_add);
ops!(Mul, mul, try_mul);

impl Sub for &FunctionElem {
    type Output = FunctionElem;
    fn sub(self, rhs: &FunctionElem) -> FunctionElem {
        self + &(-rhs)
    }
}

impl Sub for FunctionElem {
    type Output = FunctionElem;
    fn sub(self, rhs: FunctionElem) -> FunctionElem {
        &self - &rhs
    }
}

impl Neg for &FunctionElem {
    type Output = FunctionElem;
    fn neg(self) -> FunctionElem {
        self.scale(&-Rational::one())
    }
}

impl Neg for FunctionElem {
    type Output = FunctionElem;
    fn neg(self) -> FunctionElem {
        -&self
    }
}

impl From<Poly> for FunctionElem {
    fn from(p: Poly) -> Self {
        FunctionElem::Poly(p)
    }
}

impl From<Rational> for FunctionElem {
    fn from(c: Rational) -> Self {
        FunctionElem::constant(c)
    }
}
