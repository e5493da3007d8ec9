//! Dense exact linear algebra over ℚ and over rational-function coefficients.

use num_traits::{One, Zero};

use crate::coeffs::{FunctionElem, Poly, Rational};

/// The field operations the elimination routines need.
pub trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for FunctionElem {
    fn zero() -> Self {
        FunctionElem::zero()
    }
    fn one() -> Self {
        FunctionElem::one()
    }
    fn is_zero(&self) -> bool {
        FunctionElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self.try_div(o).expect("division by a nonzero pivot")
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one().div(&m[r][c]);
        for j in c..cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right null space `{v : m v = 0}`.
pub fn nullspace<F: Field>(m: &Matrix<F>, cols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = F::zero().sub(&a[r][free]);
        }
        out.push(v);
    }
    out
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.len();
    let mut a: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec<F: Field>(m: &Matrix<F>, v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
        })
        .collect()
}

/// Determinant by cofactor expansion; needs no division, so it also works
/// over series rings where elimination could pick a non-unit pivot.
pub fn det<F: Field>(m: &Matrix<F>) -> F {
    let n = m.len();
    if n == 0 {
        return F::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = F::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let t = m[0][j].mul(&det(&minor(m, 0, j)));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

fn minor<F: Field>(m: &Matrix<F>, r: usize, c: usize) -> Matrix<F> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Adjugate matrix, so that `m * adj(m) = det(m) * I`.
pub fn adjugate<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    let n = m.len();
    if n == 1 {
        return vec![vec![F::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        F::zero().sub(&c)
                    }
                })
                .collect()
        })
        .collect()
}

/// Determinant of a polynomial matrix by fraction-free (Bareiss)
/// elimination; every division is exact.
pub fn det_bareiss(m: &Matrix<Poly>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::rational::qi;

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        rows.iter().map(|r| r.iter().map(|x| qi(*x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&a, &ns[0]).iter().all(|x| Zero::is_zero(x)));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn bareiss_matches_cofactors() {
        let x = Poly::var(0);
        let c = |k: i64| Poly::from_int(k);
        let a: Matrix<Poly> = vec![
            vec![&x + &c(1), c(2), x.clone()],
            vec![c(0), &x * &x, c(3)],
            vec![c(1), x.clone(), c(0)],
        ];
        let f: Matrix<FunctionElem> = a
            .iter()
            .map(|r| r.iter().map(|p| FunctionElem::poly(p.clone())).collect())
            .collect();
        assert_eq!(FunctionElem::poly(det_bareiss(&a)), det(&f));
        let z: Matrix<Poly> = vec![vec![c(0), c(1)], vec![c(1), c(0)]];
        assert_eq!(det_bareiss(&z), c(-1));
    }

    #[test]
    fn adjugate_matches_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let d = det(&a);
        assert_eq!(d, qi(18));
        let inv = inverse(&a).unwrap();
        let adj = adjugate(&a);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(&adj[i][j] / &d, inv[i][j]);
            }
        }
    }
}
