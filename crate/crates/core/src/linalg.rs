//! Small dense helpers for the n ≤ a-few-dozen systems that show up here.

/// Row-major square matrix view.
pub(crate) struct Square<'a> {
    pub n: usize,
    pub a: &'a [f64],
}

impl Square<'_> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.n).map(|j| self.at(i, j) * x[j]).sum();
        }
    }
}

/// Perron root estimate of a nonnegative matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PerronEstimate {
    /// Midpoint of the final Collatz-Wielandt bracket.
    pub radius: f64,
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
}

/// Spectral radius of a nonnegative matrix `f` by power iteration on the
/// shifted matrix `I + f`, which is primitive whenever `f` is irreducible.
/// The Collatz-Wielandt quotients `min/max_i (Bx)_i / x_i` bracket the Perron
/// root at every step; iteration stops once the bracket is narrower than `tol`
/// or, when `threshold` is given, as soon as the bracket lies entirely on one
/// side of it.
pub(crate) fn perron_root(f: Square<'_>, tol: f64, max_iter: usize, threshold: Option<f64>) -> PerronEstimate {
    let n = f.n;
    if n == 0 {
        return PerronEstimate { radius: 0.0, lower: 0.0, upper: 0.0, converged: true };
    }
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    for _ in 0..max_iter {
        f.mul_vec(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        lower = f64::INFINITY;
        upper = 0.0;
        for (yi, xi) in y.iter().zip(&x) {
            let q = yi / xi;
            lower = f64::min(lower, q);
            upper = f64::max(upper, q);
        }
        // Ratios of I + F are ρ + 1; shift back.
        lower -= 1.0;
        upper -= 1.0;
        let decided = threshold.is_some_and(|c| upper < c || lower >= c);
        if decided || upper - lower <= tol * upper.max(1.0) {
            return PerronEstimate { radius: 0.5 * (lower + upper), lower, upper, converged: true };
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            // Keep components strictly positive so the quotients stay defined.
            *xi = (yi / norm).max(f64::MIN_POSITIVE);
        }
    }
    PerronEstimate { radius: 0.5 * (lower + upper), lower, upper, converged: false }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting followed by
/// one step of iterative refinement. Returns `None` for a (numerically)
/// singular matrix.
pub(crate) fn solve(a: Square<'_>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.n;
    let mut lu = a.a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| lu[i * n + k].abs().total_cmp(&lu[j * n + k].abs())).unwrap();
        if lu[p * n + k].abs() <= scale * 1e-14 {
            return None;
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let m = lu[i * n + k] / pivot;
            lu[i * n + k] = m;
            for j in k + 1..n {
                lu[i * n + j] -= m * lu[k * n + j];
            }
        }
    }
    let lu_solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= lu[i * n + j] * x[j];
            }
            x[i] /= lu[i * n + i];
        }
        x
    };
    let mut x = lu_solve(b);
    let mut ax = vec![0.0; n];
    a.mul_vec(&x, &mut ax);
    let residual: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    for (xi, di) in x.iter_mut().zip(lu_solve(&residual)) {
        *xi += di;
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
