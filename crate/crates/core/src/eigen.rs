//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! The eigenvalue is bracketed by Sturm-sequence bisection, the eigenvector is
//! obtained by inverse iteration on the `LDLᵀ` factorization of `T − σI` with
//! the shift `σ` taken from the lower end of the final bracket. Since the
//! Sturm count at `σ` is zero, every pivot of that factorization is positive
//! and the solve needs no pivoting.

use crate::scalar::Real;

/// Iteration caps and acceptance bound for [`lowest_eigenpair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub max_bisection_steps: usize,
    pub max_inverse_iterations: usize,
    /// Accepted residual `‖Tx − λx‖₂ ≤ residual_tol · max(1, |λ|)`.
    pub residual_tol: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            max_bisection_steps: 4096,
            max_inverse_iterations: 16,
            residual_tol: T::residual_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair<T> {
    pub value: T,
    /// Unit 2-norm eigenvector.
    pub vector: Vec<T>,
    /// `‖Tx − λx‖₂` of the returned pair.
    pub residual: T,
}

/// The eigensolver gave up; carries the total iteration count spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotConverged {
    pub iterations: usize,
}

/// Number of eigenvalues of `T` strictly below `x`.
pub fn sturm_count<T: Real>(diag: &[T], off: &[T], x: T) -> usize {
    let pivmin = pivot_floor(off);
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() <= pivmin {
        q = -pivmin;
    }
    if q < T::zero() {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

fn pivot_floor<T: Real>(off: &[T]) -> T {
    let max_sq = off
        .iter()
        .fold(T::one(), |acc, &e| acc.max(e * e));
    T::min_positive_value() * max_sq
}

/// Gershgorin interval enclosing the whole spectrum.
pub fn gershgorin_bounds<T: Real>(diag: &[T], off: &[T]) -> (T, T) {
    let n = diag.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < n { off[i].abs() } else { T::zero() };
        let r = left + right;
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Bracket `[lo, hi]` around the smallest eigenvalue with `count(lo) = 0`
/// and `count(hi) ≥ 1`, shrunk to relative width `2ε`.
fn bisect_lowest<T: Real>(
    diag: &[T],
    off: &[T],
    max_steps: usize,
) -> Result<(T, T, usize), NotConverged> {
    let (g_lo, g_hi) = gershgorin_bounds(diag, off);
    let pad = T::epsilon() * (g_lo.abs().max(g_hi.abs())).max(T::one());
    let mut lo = g_lo - pad;
    let mut hi = g_hi + pad;
    let eps = T::epsilon();
    let two = T::lit(2.0);
    for step in 0..max_steps {
        let mid = lo + (hi - lo) / two;
        let width = hi - lo;
        if mid <= lo || mid >= hi || width <= two * eps * lo.abs().max(hi.abs()) {
            return Ok((lo, hi, step));
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(NotConverged {
        iterations: max_steps,
    })
}

/// Solves `(T − σI) x = b` in place through the Sturm pivots at `σ`.
fn shifted_solve<T: Real>(diag: &[T], off: &[T], shift: T, rhs: &mut [T]) {
    let n = diag.len();
    let pivmin = pivot_floor(off);
    let mut pivots = Vec::with_capacity(n);
    let mut q = diag[0] - shift;
    if q.abs() <= pivmin {
        q = pivmin;
    }
    pivots.push(q);
    for i in 1..n {
        q = diag[i] - shift - off[i - 1] * off[i - 1] / q;
        if q.abs() <= pivmin {
            q = pivmin;
        }
        pivots.push(q);
    }
    // L has unit diagonal and subdiagonal off[i] / pivots[i].
    for i in 1..n {
        let l = off[i - 1] / pivots[i - 1];
        rhs[i] = rhs[i] - l * rhs[i - 1];
    }
    for i in 0..n {
        rhs[i] = rhs[i] / pivots[i];
    }
    for i in (0..n - 1).rev() {
        let l = off[i] / pivots[i];
        rhs[i] = rhs[i] - l * rhs[i + 1];
    }
}

/// `y = T x`.
pub fn tridiagonal_apply<T: Real>(diag: &[T], off: &[T], x: &[T]) -> Vec<T> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut acc = diag[i] * x[i];
            if i > 0 {
                acc = acc + off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc = acc + off[i] * x[i + 1];
            }
            acc
        })
        .collect()
}

fn norm2<T: Real>(v: &[T]) -> T {
    // Scaled accumulation so that tiny or huge iterates do not under/overflow.
    let scale = v.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let sum = v
        .iter()
        .fold(T::zero(), |acc, &x| acc + (x / scale) * (x / scale));
    scale * sum.sqrt()
}

fn rayleigh<T: Real>(diag: &[T], off: &[T], x: &[T]) -> (T, T) {
    let tx = tridiagonal_apply(diag, off, x);
    let value = x
        .iter()
        .zip(&tx)
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    let r: Vec<T> = tx.iter().zip(x).map(|(&t, &a)| t - value * a).collect();
    (value, norm2(&r))
}

/// Smallest eigenvalue and its eigenvector.
///
/// A matrix with an identically zero off-diagonal is returned exactly: the
/// eigenvector is the unit vector at the (first) smallest diagonal entry.
pub fn lowest_eigenpair<T: Real>(
    diag: &[T],
    off: &[T],
    config: &SolverConfig<T>,
) -> Result<Eigenpair<T>, NotConverged> {
    let n = diag.len();
    assert!(n >= 1, "empty matrix");
    assert_eq!(off.len() + 1, n, "off-diagonal must have length n - 1");

    if off.iter().all(|&e| e == T::zero()) {
        let (idx, &value) = diag
            .iter()
            .enumerate()
            .fold(None::<(usize, &T)>, |best, (i, d)| match best {
                Some((_, b)) if *b <= *d => best,
                _ => Some((i, d)),
            })
            .expect("nonempty");
        let mut vector = vec![T::zero(); n];
        vector[idx] = T::one();
        return Ok(Eigenpair {
            value,
            vector,
            residual: T::zero(),
        });
    }

    let (lo, _hi, steps) = bisect_lowest(diag, off, config.max_bisection_steps)?;
    let mut iterations = steps;

    let start = T::one() / T::from_count(n).sqrt();
    let mut x = vec![start; n];
    let mut shift = lo;
    for _ in 0..config.max_inverse_iterations {
        iterations += 1;
        let mut y = x.clone();
        shifted_solve(diag, off, shift, &mut y);
        let nrm = norm2(&y);
        if !nrm.is_finite() || nrm == T::zero() {
            // Shift numerically on top of the eigenvalue; back off slightly.
            shift = shift - T::epsilon() * shift.abs().max(T::one());
            continue;
        }
        for v in y.iter_mut() {
            *v = *v / nrm;
        }
        x = y;
        let (value, residual) = rayleigh(diag, off, &x);
        if residual <= config.residual_tol * value.abs().max(T::one()) {
            return Ok(Eigenpair {
                value,
                vector: x,
                residual,
            });
        }
    }
    Err(NotConverged { iterations })
}
