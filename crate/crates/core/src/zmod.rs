//! Linear algebra over `Z_D` for arbitrary (not necessarily prime) `D`.
//!
//! Systems are solved through a diagonal (Smith-like) form `U A V = S` built
//! from unimodular row and column operations, so composite moduli work.

/// Dense matrix over `Z_D`, entries kept in `0..D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], modulus: u64) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v % modulus);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[u64], modulus: u64) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0, |acc, j| (acc + self.get(i, j) * x[j] % modulus) % modulus)
            })
            .collect()
    }
}

/// Extended Euclid on nonnegative integers: `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[inline]
fn md(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}

/// Applies the 2x2 unimodular map `[[x, y], [u, v]]` to rows `r1`, `r2`.
fn combine_rows(a: &mut Matrix, r1: usize, r2: usize, t: [i64; 4], m: u64) {
    for j in 0..a.cols {
        let p = a.get(r1, j) as i64;
        let q = a.get(r2, j) as i64;
        a.set(r1, j, md(t[0] * p % m as i64 + t[1] * q % m as i64, m));
        a.set(r2, j, md(t[2] * p % m as i64 + t[3] * q % m as i64, m));
    }
}

fn combine_cols(a: &mut Matrix, c1: usize, c2: usize, t: [i64; 4], m: u64) {
    for i in 0..a.rows {
        let p = a.get(i, c1) as i64;
        let q = a.get(i, c2) as i64;
        a.set(i, c1, md(t[0] * p % m as i64 + t[1] * q % m as i64, m));
        a.set(i, c2, md(t[2] * p % m as i64 + t[3] * q % m as i64, m));
    }
}

/// Unimodular transform sending `(a, b)` to `(gcd(a, b), 0)`.
fn bezout(a: u64, b: u64) -> [i64; 4] {
    if b % a == 0 {
        // pure subtraction leaves the pivot's row and column untouched
        return [1, 0, -((b / a) as i64), 1];
    }
    let (g, x, y) = ext_gcd(a as i64, b as i64);
    [x, y, -(b as i64 / g), a as i64 / g]
}

/// Solves `A x ≡ b (mod m)`. Returns one solution or `None`.
pub fn solve(a: &Matrix, b: &[u64], m: u64) -> Option<Vec<u64>> {
    assert!(m >= 2, "modulus must be at least 2");
    assert_eq!(a.rows, b.len());
    let mut s = a.clone();
    // rhs rides along as an extra column so row operations reach it
    let mut rhs = Matrix::zeros(a.rows, 1);
    for (i, &v) in b.iter().enumerate() {
        rhs.set(i, 0, v % m);
    }
    let mut v = Matrix::identity(a.cols);
    let mut rank = 0;

    while rank < s.rows.min(s.cols) {
        let Some((pi, pj)) = (rank..s.rows)
            .flat_map(|i| (rank..s.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| s.get(i, j) != 0)
            .min_by_key(|&(i, j)| s.get(i, j))
        else {
            break;
        };
        if pi != rank {
            combine_rows(&mut s, rank, pi, [0, 1, 1, 0], m);
            combine_rows(&mut rhs, rank, pi, [0, 1, 1, 0], m);
        }
        if pj != rank {
            combine_cols(&mut s, rank, pj, [0, 1, 1, 0], m);
            combine_cols(&mut v, rank, pj, [0, 1, 1, 0], m);
        }
        loop {
            let mut dirty = false;
            for i in rank + 1..s.rows {
                let q = s.get(i, rank);
                if q != 0 {
                    let t = bezout(s.get(rank, rank), q);
                    combine_rows(&mut s, rank, i, t, m);
                    combine_rows(&mut rhs, rank, i, t, m);
                    dirty = true;
                }
            }
            for j in rank + 1..s.cols {
                let q = s.get(rank, j);
                if q != 0 {
                    let t = bezout(s.get(rank, rank), q);
                    combine_cols(&mut s, rank, j, t, m);
                    combine_cols(&mut v, rank, j, t, m);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        rank += 1;
    }

    let mut y = vec![0u64; a.cols];
    for i in 0..s.rows {
        let c = rhs.get(i, 0);
        if i >= rank {
            if c != 0 {
                return None;
            }
            continue;
        }
        let d = s.get(i, i);
        let g = gcd(d, m);
        if c % g != 0 {
            return None;
        }
        let mg = m / g;
        let (_, inv, _) = ext_gcd(((d / g) % mg) as i64, mg as i64);
        y[i] = md((c / g) as i64 % mg as i64 * md(inv, mg) as i64, mg);
    }
    Some(v.mul_vec(&y, m))
}

/// Whether `r` is a `Z_m` combination of the rows of `g`.
pub fn in_row_span(g: &Matrix, r: &[u64], m: u64) -> bool {
    if g.rows == 0 {
        return r.iter().all(|&x| x % m == 0);
    }
    solve(&g.transpose(), r, m).is_some()
}
