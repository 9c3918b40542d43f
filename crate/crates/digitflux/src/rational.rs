//! Exact rational scalars and the small dense linear solver used by the
//! spectral constants. State counts stay in the hundreds, so plain Gaussian
//! elimination over `BigRational` is all that is needed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all output labels and exact constants.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Parses `p/q`, an integer, or a decimal such as `-1.25` into an exact
/// rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let i: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = frac_part.len() as u32;
        let f: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(digits);
        let frac = Rat::new(f, scale);
        let int = Rat::from_integer(i);
        return Some(if negative { int - frac } else { int + frac });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Serializes a rational as `p/q`, or as a bare integer when the denominator
/// is one. Inverse of [`parse_rat`] on its own output.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self[(i, j)] * &v[j])
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn vec_mul(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| &v[i] * &self[(i, j)])
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves a consistent linear system `A x = b` with `A` of full column rank.
/// `A` may have more rows than columns (used for singular square systems
/// augmented with normalization constraints). Returns `None` when the system
/// is inconsistent or rank-deficient.
pub fn solve_exact(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.rows, b.len());
    let rows = a.rows;
    let cols = a.cols;
    let mut m = a.clone();
    let mut rhs = b.to_vec();

    let mut pivot_row_of_col = vec![usize::MAX; cols];
    let mut row = 0usize;
    for col in 0..cols {
        // pick the largest-magnitude nonzero pivot to keep entries tame
        let mut best: Option<usize> = None;
        for r in row..rows {
            if !m[(r, col)].is_zero()
                && best.map_or(true, |b| m[(r, col)].abs() > m[(b, col)].abs())
            {
                best = Some(r);
            }
        }
        let piv = best?;
        if piv != row {
            for j in 0..cols {
                let tmp = m[(piv, j)].clone();
                m[(piv, j)] = m[(row, j)].clone();
                m[(row, j)] = tmp;
            }
            rhs.swap(piv, row);
        }
        let inv = m[(row, col)].recip();
        for j in col..cols {
            let v = &m[(row, j)] * &inv;
            m[(row, j)] = v;
        }
        rhs[row] = &rhs[row] * &inv;
        for r in 0..rows {
            if r != row && !m[(r, col)].is_zero() {
                let factor = m[(r, col)].clone();
                for j in col..cols {
                    let v = &m[(r, j)] - &factor * &m[(row, j)];
                    m[(r, j)] = v;
                }
                let v = &rhs[r] - &factor * &rhs[row];
                rhs[r] = v;
            }
        }
        pivot_row_of_col[col] = row;
        row += 1;
        if row == rows {
            break;
        }
    }
    if pivot_row_of_col.iter().any(|&r| r == usize::MAX) {
        return None; // rank deficient
    }
    // leftover rows must have reduced to 0 = 0
    for r in row..rows {
        if !rhs[r].is_zero() {
            return None;
        }
    }
    Some((0..cols).map(|c| rhs[pivot_row_of_col[c]].clone()).collect())
}
