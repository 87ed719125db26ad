//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the open unit ball of dimension `d` (rejection).
pub fn ball_point(rng: &mut impl Rng, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 < 1.0 && r2 > 1e-12 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// `sum_i |x_i - u_{sigma(i)}|^2` in plain left-to-right arithmetic.
pub fn squared_cost(x: &[Vec<f64>], u: &[Vec<f64>], sigma: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &s) in sigma.iter().enumerate() {
        for k in 0..x[i].len() {
            let diff = x[i][k] - u[s][k];
            total += diff * diff;
        }
    }
    total
}

/// Every permutation of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Minimum of [`squared_cost`] over all permutations.
pub fn brute_force_min_cost(x: &[Vec<f64>], u: &[Vec<f64>]) -> f64 {
    permutations(x.len())
        .iter()
        .map(|p| squared_cost(x, u, p))
        .fold(f64::INFINITY, f64::min)
}

/// Dense two-phase simplex for `max c.x` subject to `A x <= b`, `x >= 0`
/// (any sign of `b`). Bland's rule; returns `None` when infeasible or
/// unbounded.
pub fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<(f64, Vec<f64>)> {
    const EPS: f64 = 1e-11;
    let m = a.len();
    let nv = c.len();
    // columns: x (nv), slacks (m), artificials (m), rhs
    let width = nv + 2 * m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            t[i][j] = sign * a[i][j];
        }
        t[i][nv + i] = sign;
        t[i][nv + m + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (0..m).map(|i| nv + m + i).collect();

    fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
        let p = t[row][col];
        for v in t[row].iter_mut() {
            *v /= p;
        }
        let pr = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && r[col] != 0.0 {
                let f = r[col];
                for (v, q) in r.iter_mut().zip(&pr) {
                    *v -= f * q;
                }
            }
        }
        basis[row] = col;
    }

    // runs the simplex on objective `obj` (maximize) over allowed columns
    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, obj: &[f64], allowed: usize| -> bool {
        loop {
            // reduced costs
            let mut enter = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let mut rc = obj[j];
                for (i, &bi) in basis.iter().enumerate() {
                    rc -= obj[bi] * t[i][j];
                }
                if rc > EPS {
                    enter = Some(j);
                    break;
                }
            }
            let Some(col) = enter else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..t.len() {
                if t[i][col] > EPS {
                    let ratio = t[i][rhs] / t[i][col];
                    match leave {
                        Some((l, r)) if ratio > r + EPS || (ratio > r - EPS && basis[i] > basis[l]) => {}
                        _ => leave = Some((i, ratio)),
                    }
                }
            }
            let Some((row, _)) = leave else { return false };
            pivot(t, basis, row, col);
        }
    };

    let mut phase1 = vec![0.0; width - 1];
    for i in 0..m {
        phase1[nv + m + i] = -1.0;
    }
    run(&mut t, &mut basis, &phase1, nv + 2 * m);
    let infeasibility: f64 = (0..m).filter(|&i| basis[i] >= nv + m).map(|i| t[i][rhs]).sum();
    if infeasibility > 1e-9 {
        return None;
    }
    // drive remaining artificials out of the basis
    for i in 0..m {
        if basis[i] >= nv + m {
            if let Some(col) = (0..nv + m).find(|&j| t[i][j].abs() > EPS && !basis.contains(&j)) {
                pivot(&mut t, &mut basis, i, col);
            }
        }
    }
    let mut phase2 = vec![0.0; width - 1];
    phase2[..nv].copy_from_slice(c);
    if !run(&mut t, &mut basis, &phase2, nv + m) {
        return None;
    }
    let mut x = vec![0.0; nv];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < nv {
            x[bi] = t[i][rhs];
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
    Some((value, x))
}

/// `c_ij = <u_i, X_i - X_j>` as a dense matrix.
pub fn margins(u: &[Vec<f64>], x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = u.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    (0..n)
        .map(|i| (0..n).map(|j| dot(&u[i], &x[i]) - dot(&u[i], &x[j])).collect())
        .collect()
}

/// Largest `delta` with `lambda_i - lambda_j <= c_ij - delta` for some
/// `lambda`, by the simplex on the explicit program.
///
/// Variables are shifted so the origin is feasible: `lambda = mu >= 0`
/// (the constraints only see differences) and `delta = delta' + min c`.
pub fn lp_max_margin(c: &[Vec<f64>]) -> f64 {
    let n = c.len();
    let c_min = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| c[i][j])
        .fold(f64::INFINITY, f64::min);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut row = vec![0.0; n + 1];
                row[i] += 1.0;
                row[j] -= 1.0;
                row[n] = 1.0;
                a.push(row);
                b.push(c[i][j] - c_min);
            }
        }
    }
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let (value, _) = simplex_max(&a, &b, &obj).expect("margin program is feasible and bounded");
    value + c_min
}

/// Largest `lambda <= 0` (maximizing `sum lambda`) with
/// `lambda_i - lambda_j <= c_ij - margin`, shifted to `min lambda = 0`.
pub fn lp_potentials(c: &[Vec<f64>], margin: f64) -> Vec<f64> {
    let n = c.len();
    // nu = -lambda >= 0: nu_j - nu_i <= c_ij - margin
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut row = vec![0.0; n];
                row[j] += 1.0;
                row[i] -= 1.0;
                a.push(row);
                b.push(c[i][j] - margin);
            }
        }
    }
    let obj = vec![-1.0; n];
    let (_, nu) = simplex_max(&a, &b, &obj).expect("potential program is feasible");
    let lambda: Vec<f64> = nu.iter().map(|v| -v).collect();
    let lo = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    lambda.iter().map(|l| l - lo).collect()
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, u: &[f64], h: f64) -> Vec<f64> {
    (0..u.len())
        .map(|k| {
            let mut p = u.to_vec();
            let mut m = u.to_vec();
            p[k] += h;
            m[k] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian matrix of a vector map, row-major `d x d`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, u: &[f64], h: f64) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut jac = vec![vec![0.0; d]; d];
    for k in 0..d {
        let mut p = u.to_vec();
        let mut m = u.to_vec();
        p[k] += h;
        m[k] -= h;
        let (fp, fm) = (f(&p), f(&m));
        for r in 0..d {
            jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

/// Intercept of the least-squares line `z ~ b0 + b1 c` from the 2x2 normal
/// equations.
pub fn regression_intercept(z: &[f64], c: &[f64]) -> f64 {
    let k = z.len() as f64;
    let sc: f64 = c.iter().sum();
    let scc: f64 = c.iter().map(|v| v * v).sum();
    let sz: f64 = z.iter().sum();
    let scz: f64 = c.iter().zip(z).map(|(a, b)| a * b).sum();
    let det = k * scc - sc * sc;
    (sz * scc - sc * scz) / det
}

/// Scaled log-spacings `j log(Y_{n-j+1,n} / Y_{n-j,n})` and regressors
/// `(j/(k+1))^{-rho}` for `j = 1..=k`, from unsorted values.
pub fn ridge_design(values: &[f64], k: usize, rho: f64) -> (Vec<f64>, Vec<f64>) {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    let z = (1..=k).map(|j| j as f64 * (s[n - j] / s[n - j - 1]).ln()).collect();
    let c = (1..=k).map(|j| (j as f64 / (k + 1) as f64).powf(-rho)).collect();
    (z, c)
}

/// Median of a slice (mean of the middle pair for even lengths).
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Area of a closed planar polygon (shoelace).
pub fn polygon_area(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (&points[i], &points[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    0.5 * twice.abs()
}

/// Whether `p` lies inside the closed polygon (ray casting).
pub fn point_in_polygon(p: &[f64], poly: &[Vec<f64>]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}
