//! Small dense and sparse linear-algebra kernels.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// Flip `v` so that its first clearly nonzero entry is positive.
///
/// Entries below `1e-10 · max|v|` count as zero; they are at roundoff level
/// for unit vectors and would otherwise make the sign depend on noise.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * max) {
        if *first < 0.0 {
            scale(-1.0, v);
        }
    }
}

/// Linear operator that is symmetric with respect to the Euclidean inner product.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Compressed sparse row matrix. Columns within a row are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row `(column, value)` lists. Rows are sorted and
    /// duplicate columns are summed in their original order.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for (c, v) in row {
                if c >= ncols {
                    return Err(Error::OutOfRange { what: "column", index: c, extent: ncols });
                }
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Columns and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                rows[j].push((i, v));
            }
        }
        // rows are built in increasing i, so already sorted
        Self::from_rows(self.nrows, rows).expect("transpose indices are in range")
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// Map every stored value through `f(i, j, value)`, keeping the pattern.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    /// Row-major dense copy; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.ncols + j] = v;
            }
        }
        d
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).all(|(&j, &v)| self.get(j, i).to_bits() == v.to_bits())
            })
    }
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y);
    }
}

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.
///
/// `a` is row-major `n × n` and only needs to be symmetric up to roundoff (the
/// upper triangle drives the rotations). Returns eigenvalues in descending
/// order and the matching eigenvectors as columns of a row-major `n × n`
/// matrix.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob: f64 = m.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum();
        if off <= 1e-32 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + dst] = v[k * n + src];
        }
    }
    (values, vectors)
}

/// Cholesky factor of a symmetric positive definite banded matrix.
///
/// Storage is the lower band: `band[i * (bw + 1) + (bw - (i - j))]` holds
/// `L(i, j)` for `i - bw <= j <= i`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factor the symmetric matrix `a` (only the lower band within `bw` of
    /// the diagonal is read).
    pub fn factor(a: &CsrMatrix, bw: usize) -> Result<Self> {
        let n = a.nrows();
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    if i - j > bw {
                        return Err(Error::Dimension(alloc::format!(
                            "entry ({i}, {j}) lies outside bandwidth {bw}"
                        )));
                    }
                    band[i * w + (bw - (i - j))] = v;
                }
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut sum = band[i * w + (bw - (i - j))];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum -= band[i * w + (bw - (i - k))] * band[j * w + (bw - (j - k))];
                }
                if j == i {
                    if sum <= 0.0 {
                        return Err(Error::InvalidParameter(alloc::format!(
                            "matrix not positive definite at pivot {i}"
                        )));
                    }
                    band[i * w + bw] = libm::sqrt(sum);
                } else {
                    band[i * w + (bw - (i - j))] = sum / band[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[i * w + (bw - (i - k))] * x[k];
            }
            x[i] = s / self.band[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n.min(i + bw + 1) {
                s -= self.band[k * w + (bw - (k - i))] * x[k];
            }
            x[i] = s / self.band[i * w + bw];
        }
    }
}
