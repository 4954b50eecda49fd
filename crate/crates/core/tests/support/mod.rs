//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's linear algebra: sums are written
//! out by hand and inverses come from Gauss-Jordan elimination with partial
//! pivoting on plain `Vec<Vec<f64>>` matrices.
#![allow(dead_code)]

mod zero_pattern_table;

#[allow(unused_imports)]
pub use zero_pattern_table::ZERO_PATTERN_TABLE;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    let mut out = zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for t in 0..k {
                s += a[i][t] * b[t][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn gauss_jordan_inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `(V1, V12)` from explicit centered sums with divisor `n`.
pub fn direct_covariances(x: &Mat, y: &Mat) -> (Mat, Mat) {
    let n = x.len();
    let (p, q) = (x[0].len(), y[0].len());
    let mx: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let my: Vec<f64> = (0..q).map(|j| y.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut v1 = zeros(p, p);
    let mut v12 = zeros(p, q);
    for k in 0..n {
        for a in 0..p {
            for b in 0..p {
                v1[a][b] += (x[k][a] - mx[a]) * (x[k][b] - mx[b]);
            }
            for b in 0..q {
                v12[a][b] += (x[k][a] - mx[a]) * (y[k][b] - my[b]);
            }
        }
    }
    for row in v1.iter_mut().chain(v12.iter_mut()) {
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }
    (v1, v12)
}

/// `|| V12 - V1 Pi_K V12 ||_F` with `Pi_K` built from an explicit inverse of
/// the principal submatrix. `subset` holds 1-based labels.
pub fn direct_criterion(v1: &Mat, v12: &Mat, subset: &[usize]) -> f64 {
    let p = v1.len();
    let idx: Vec<usize> = subset.iter().map(|j| j - 1).collect();
    let sub: Mat = idx.iter().map(|&a| idx.iter().map(|&b| v1[a][b]).collect()).collect();
    let inv = gauss_jordan_inverse(&sub).expect("invertible submatrix");
    let mut pi = zeros(p, p);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            pi[i][j] = inv[a][b];
        }
    }
    let fitted = matmul(v1, &matmul(&pi, v12));
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..v12[0].len() {
            s += (v12[i][j] - fitted[i][j]).powi(2);
        }
    }
    s.sqrt()
}

pub fn to_rows(m: &nalgebra::DMatrix<f64>) -> Mat {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// `(V1, V12)` for `V1 = sigma`, `V12 = sigma B^T` by hand.
pub fn direct_population(sigma: &Mat, b: &Mat) -> (Mat, Mat) {
    let bt: Mat = (0..b[0].len()).map(|j| b.iter().map(|r| r[j]).collect()).collect();
    (sigma.clone(), matmul(sigma, &bt))
}

pub fn default_sigma() -> Mat {
    (0..7)
        .map(|i: i32| (0..7).map(|j: i32| 0.5f64.powi((i - j).abs())).collect())
        .collect()
}

pub fn default_b() -> Mat {
    vec![
        vec![3.0, 0.0, 0.0, 1.5, 0.0, 0.0, 2.0],
        vec![4.0, 0.0, 0.0, 2.5, 0.0, 0.0, -1.0],
        vec![5.0, 0.0, 0.0, 0.5, 0.0, 0.0, 3.0],
        vec![6.0, 0.0, 0.0, 3.0, 0.0, 0.0, 1.0],
        vec![7.0, 0.0, 0.0, 6.0, 0.0, 0.0, 4.0],
    ]
}

pub fn mask_labels(mask: u32, p: usize) -> Vec<usize> {
    (1..=p).filter(|j| mask >> (j - 1) & 1 == 1).collect()
}
