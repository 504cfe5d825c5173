//! Dense symmetric linear algebra kernels.
//!
//! Everything here is deliberately small and self-contained: a row-major
//! dense matrix, a cyclic Jacobi eigensolver for symmetric matrices, and an
//! LU determinant. Basis sizes are capped at desk scale ([`BASIS_CAP`]), so
//! the O(n^3) dense paths are always acceptable and no external solver is
//! pulled in.

/// Hard cap on dense eigenproblem dimension.
pub const BASIS_CAP: usize = 5000;

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = DenseMatrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "ragged rows");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Largest absolute symmetry defect `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Determinant by LU with partial pivoting. O(n^3), destroys a copy.
    pub fn det(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut a = self.data.clone();
        let mut det = 1.0f64;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in (col + 1)..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                }
            }
        }
        det
    }
}

/// Eigendecomposition of a symmetric matrix: ascending values, orthonormal
/// column eigenvectors (`vectors[j]` pairs with `values[j]`).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEigen {
    /// Spectral norm = max |eigenvalue|.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Number of eigenvalues strictly below `-tol`.
    pub fn count_below(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v < -tol).count()
    }
}

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// Plane rotations annihilate off-diagonal entries sweep by sweep; the
/// accumulated rotations form the eigenvector matrix. Foolproof for
/// symmetric input and accurate to machine precision, at the cost of a
/// constant factor over QR — acceptable at desk scale.
pub fn sym_eigen(m: &DenseMatrix) -> SymEigen {
    let n = m.dim();
    assert!(n <= BASIS_CAP, "basis dimension {} exceeds cap {}", n, BASIS_CAP);
    assert!(
        m.data.iter().all(|x| x.is_finite()),
        "non-finite entry in eigenproblem"
    );
    if n == 0 {
        return SymEigen {
            values: vec![],
            vectors: vec![],
        };
    }
    let mut a = m.data.clone();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let max_sweeps = 64;
    for sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-300 {
            break;
        }
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let scale = 100.0 * apq.abs();
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Skip entries that can no longer affect the diagonal.
                if sweep > 3
                    && app.abs() + scale == app.abs()
                    && aqq.abs() + scale == aqq.abs()
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq * apq <= thresh {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e154 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                a[p * n + p] = app - h;
                a[q * n + q] = aqq + h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        let np = akp - s * (akq + tau * akp);
                        let nq = akq + s * (akp - tau * akq);
                        a[k * n + p] = np;
                        a[p * n + k] = np;
                        a[k * n + q] = nq;
                        a[q * n + k] = nq;
                    }
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    SymEigen { values, vectors }
}

/// Least-squares line fit `y = slope * x + intercept`; returns
/// `(slope, intercept, rms_residual)`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(n >= 2.0, "need at least two points to fit a line");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

/// Roots of a real polynomial inside `[lo, hi]` by sign-change bisection on a
/// fine grid. `coeffs` are highest-degree first. Used for local root polishing
/// where the polynomial is a least-squares surrogate of an analytic function.
pub fn poly_roots_in(coeffs: &[f64], lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let eval = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
    let mut roots = Vec::new();
    let step = (hi - lo) / grid as f64;
    let mut prev_x = lo;
    let mut prev_f = eval(lo);
    for i in 1..=grid {
        let x = lo + step * i as f64;
        let f = eval(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * f < 0.0 {
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev_f;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = eval(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
                if (b - a).abs() <= 1e-16 * (1.0 + mid.abs()) {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    roots
}

/// Fit a least-squares polynomial of the given degree through `(x, y)` points
/// (normal equations on the scaled Vandermonde basis). Returns coefficients
/// highest-degree first, in the scaled variable `x / scale`.
pub fn poly_fit_scaled(xs: &[f64], ys: &[f64], degree: usize, scale: f64) -> Vec<f64> {
    let npts = xs.len();
    let ncoef = degree + 1;
    assert!(npts >= ncoef);
    // Design matrix in the scaled variable, highest power first.
    let mut ata = DenseMatrix::zeros(ncoef);
    let mut atb = vec![0.0f64; ncoef];
    for (x, y) in xs.iter().zip(ys) {
        let t = x / scale;
        let mut powers = vec![0.0f64; ncoef];
        let mut p = 1.0;
        for k in (0..ncoef).rev() {
            powers[k] = p;
            p *= t;
        }
        for i in 0..ncoef {
            atb[i] += powers[i] * y;
            for j in 0..ncoef {
                ata.add(i, j, powers[i] * powers[j]);
            }
        }
    }
    solve_dense(&ata, &atb)
}

/// Solve a dense linear system by LU with partial pivoting.
pub fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in (col + 1)..n {
            if m[r * n + col].abs() > best {
                best = m[r * n + col].abs();
                piv = r;
            }
        }
        assert!(best > 0.0, "singular system");
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let p = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[i * n + k] * x[k];
        }
        x[i] = s / m[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_reproduces_known_2x2_spectrum() {
        let m = DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let e = sym_eigen(&m);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_eigenpairs_satisfy_residual_and_orthonormality() {
        // Deterministic ill-scaled symmetric test matrix.
        let n = 24;
        let mut m = DenseMatrix::zeros(n);
        let mut state = 88172645463325252u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in i..n {
                let v = next() * if (i + j) % 5 == 0 { 100.0 } else { 1.0 };
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let e = sym_eigen(&m);
        let norm = e.spectral_norm();
        for (lam, vec) in e.values.iter().zip(&e.vectors) {
            let mv = m.matvec(vec);
            let res: f64 = mv
                .iter()
                .zip(vec)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-12 * norm.max(1.0), "residual {res}");
        }
        for i in 0..n {
            for j in i..n {
                let dot: f64 = e.vectors[i].iter().zip(&e.vectors[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-12);
            }
        }
        // Ascending order.
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn determinant_matches_hand_value() {
        let m = DenseMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ]);
        // det = 2*(12-1) - 1*(4-0) = 18
        assert!((m.det() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 2.0).collect();
        let (s, c, r) = line_fit(&xs, &ys);
        assert!((s + 0.5).abs() < 1e-14);
        assert!((c - 2.0).abs() < 1e-14);
        assert!(r < 1e-14);
    }

    #[test]
    fn poly_fit_and_roots_locate_sin_zero() {
        // Surrogate for an analytic function with a root at 0.3.
        let xs: Vec<f64> = (0..12).map(|i| 0.25 + 0.01 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x - 0.3) * (1.0 + x)).collect();
        let co = poly_fit_scaled(&xs, &ys, 3, 0.4);
        let roots = poly_roots_in(&co, 0.25 / 0.4, 0.36 / 0.4, 2000);
        assert!(roots.iter().any(|r| (r * 0.4 - 0.3).abs() < 1e-10));
    }
}
