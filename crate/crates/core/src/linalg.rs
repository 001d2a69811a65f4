//! Exact rational vectors and small dense matrices.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational scalar used throughout the crate.
pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Format as a decimal-free `p/q` string.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<i128>().ok().map(q),
    }
}

/// Dense exact vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vector(pub Vec<Q>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Q::zero(); n])
    }

    pub fn from_ints(v: &[i128]) -> Self {
        Vector(v.iter().map(|&x| q(x)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Q::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> Q {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm2(&self) -> Q {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &Q) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|x| -x).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &Q, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// True if `other = c * self` for some `c > 0`.
    pub fn same_direction(&self, other: &Vector) -> bool {
        match self.parallel_factor(other) {
            Some(c) => c.is_positive(),
            None => false,
        }
    }

    /// If `other = c * self`, returns `c`.
    pub fn parallel_factor(&self, other: &Vector) -> Option<Q> {
        let i = self.0.iter().position(|x| !x.is_zero())?;
        let c = other.0[i] / self.0[i];
        if self.scale(&c) == *other {
            Some(c)
        } else {
            None
        }
    }

    /// Lexicographically positive: first nonzero coordinate is positive.
    pub fn lex_positive(&self) -> bool {
        self.0
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_positive())
            .unwrap_or(false)
    }

    /// Scale to the positive primitive integer vector in the same direction.
    pub fn primitive(&self) -> Vector {
        let l = self
            .0
            .iter()
            .fold(1i128, |acc, x| acc.lcm(x.denom()));
        let ints: Vec<i128> = self.0.iter().map(|x| (x * q(l)).to_integer()).collect();
        let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x));
        if g == 0 {
            return self.clone();
        }
        Vector(ints.iter().map(|x| q(x / g)).collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, ")")
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.dim()).unwrap_or(0);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for j in 0..c {
                m.data[i * c + j] = row.0[j];
            }
        }
        m
    }

    /// Gram matrix `(v_i, v_j)`.
    pub fn gram(vs: &[Vector]) -> Self {
        let n = vs.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let d = vs[i].dot(&vs[j]);
                m.data[i * n + j] = d;
                m.data[j * n + i] = d;
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn determinant(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Q::zero();
            };
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let pivot = a.get(col, col);
            det *= pivot;
            for r in col + 1..n {
                let f = a.get(r, col) / pivot;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - f * a.get(col, j);
                    a.set(r, j, v);
                }
            }
        }
        det
    }

    /// Reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(p * self.cols + j, row * self.cols + j);
            }
            let inv = self.get(row, col).recip();
            for j in 0..self.cols {
                let v = self.get(row, j) * inv;
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row {
                    let f = self.get(r, col);
                    if !f.is_zero() {
                        for j in 0..self.cols {
                            let v = self.get(r, j) - f * self.get(row, j);
                            self.set(r, j, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        let mut a = self.clone();
        let pivots = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = Vector::zeros(self.cols);
                v.0[f] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v.0[pc] = -a.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Solve `M x = b` for square nonsingular `M`.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut aug = Matrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n, b.0[i]);
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        Some(Vector((0..n).map(|i| aug.get(i, n)).collect()))
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = int_sqrt(*x.numer())?;
    let d = int_sqrt(*x.denom())?;
    Some(Q::new(n, d))
}

fn int_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Coordinates of `v` in the basis `basis` (which must span `v`).
pub fn coordinates_in(basis: &[Vector], v: &Vector) -> Option<Vector> {
    let g = Matrix::gram(basis);
    let rhs = Vector(basis.iter().map(|b| b.dot(v)).collect());
    let c = g.solve(&rhs)?;
    let back = basis
        .iter()
        .zip(&c.0)
        .fold(Vector::zeros(v.dim()), |acc, (b, x)| acc.axpy(x, b));
    (back == *v).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let m = Matrix::from_rows(&[Vector::from_ints(&[2, 1]), Vector::from_ints(&[1, 3])]);
        assert_eq!(m.determinant(), q(5));
        let s = Matrix::from_rows(&[Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 4])]);
        assert_eq!(s.determinant(), q(0));
    }

    #[test]
    fn kernel_of_dependent_rows() {
        // columns (1,0),(0,1),(-1,-1) sum to zero
        let m = Matrix::from_rows(&[Vector::from_ints(&[1, 0, -1]), Vector::from_ints(&[0, 1, -1])]);
        let k = m.kernel();
        assert_eq!(k, vec![Vector::from_ints(&[1, 1, 1])]);
    }

    #[test]
    fn sqrt_and_parse() {
        assert_eq!(rational_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(rational_sqrt(&q(2)), None);
        assert_eq!(parse_q("-3/6"), Some(qf(-1, 2)));
        assert_eq!(parse_q("7"), Some(q(7)));
        assert_eq!(format_q(&qf(-1, 2)), "-1/2");
        assert_eq!(format_q(&q(4)), "4/1");
    }

    #[test]
    fn primitive_direction() {
        let v = Vector(vec![qf(1, 2), qf(-3, 2)]);
        assert_eq!(v.primitive(), Vector::from_ints(&[1, -3]));
    }
}
