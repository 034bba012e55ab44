//! Dense nonsymmetric complex eigenvalues: Householder reduction to upper
//! Hessenberg form followed by single-shift QR iterations with Wilkinson
//! shifts and deflation.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{c, czero, Real, C};

/// QR iterations allowed per unit of matrix dimension.
pub const QR_ITERATIONS_PER_DIM: usize = 30;

/// Reduces `a` in place to upper Hessenberg form by unitary similarity.
pub fn hessenberg_in_place<T: Real>(a: &mut CMatrix<T>) {
    let n = a.rows();
    assert!(a.is_square());
    if n < 3 {
        return;
    }
    let mut v = vec![czero::<T>(); n];
    for k in 0..n - 2 {
        let mut norm2 = T::zero();
        for i in k + 1..n {
            norm2 += a[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { c(T::one(), T::zero()) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in 0..n {
            v[i] = czero();
        }
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: T = v[k + 1..].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let scale = T::lit(2.0) / vnorm2;
        // a <- (I - scale v v*) a
        for j in k..n {
            let mut dot = czero::<T>();
            for i in k + 1..n {
                dot += v[i].conj() * a[(i, j)];
            }
            let f = dot * scale;
            for i in k + 1..n {
                let d = v[i] * f;
                a[(i, j)] -= d;
            }
        }
        // a <- a (I - scale v v*)
        for i in 0..n {
            let mut dot = czero::<T>();
            for j in k + 1..n {
                dot += a[(i, j)] * v[j];
            }
            let f = dot * scale;
            for j in k + 1..n {
                let d = f * v[j].conj();
                a[(i, j)] -= d;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = czero();
        }
    }
}

fn eig2<T: Real>(a: C<T>, b: C<T>, cc: C<T>, d: C<T>) -> (C<T>, C<T>) {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let p = (a - d) * half;
    let disc = (p * p + b * cc).sqrt();
    let (big, other) = if (m + disc).norm() >= (m - disc).norm() { (m + disc, m - disc) } else { (m - disc, m + disc) };
    if big.norm() == T::zero() {
        return (big, other);
    }
    // the smaller root from the product avoids cancellation
    (big, (a * d - b * cc) / big)
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), czero());
    }
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// All eigenvalues of a square complex matrix, multiplicities included.
///
/// Fails with [`Error::ConvergenceFailure`] if more than `30 * n` QR sweeps
/// are needed in total.
pub fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<C<T>>> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), actual: m.cols() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    let eps = T::epsilon();
    let norm = h.max_abs();
    let small = if norm > T::zero() { eps * norm } else { T::min_positive_value() };
    let budget = QR_ITERATIONS_PER_DIM * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut out = Vec::with_capacity(n);
    let mut hi = n as isize - 1;

    while hi >= 0 {
        let hiu = hi as usize;
        // locate the start of the unreduced block ending at hi
        let mut lo = hiu;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= small {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hiu {
            out.push(h[(hiu, hiu)]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if lo + 1 == hiu {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hiu)], h[(hiu, lo)], h[(hiu, hiu)]);
            out.push(l1);
            out.push(l2);
            hi -= 2;
            since_deflation = 0;
            continue;
        }
        if total >= budget {
            return Err(Error::ConvergenceFailure { budget });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break symmetric stalls (e.g. cyclic permutations)
            let s = h[(hiu, hiu - 1)].norm() + h[(hiu - 1, hiu - 2)].norm();
            h[(hiu, hiu)] + c(T::lit(0.75) * s, T::lit(-0.4375) * s)
        } else {
            let (l1, l2) =
                eig2(h[(hiu - 1, hiu - 1)], h[(hiu - 1, hiu)], h[(hiu, hiu - 1)], h[(hiu, hiu)]);
            let d = h[(hiu, hiu)];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hiu, shift);
    }
    Ok(out)
}

/// One shifted QR sweep `H - μI = QR, H <- RQ + μI` restricted to rows and
/// columns `lo..=hi`.
fn qr_step<T: Real>(h: &mut CMatrix<T>, lo: usize, hi: usize, shift: C<T>) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots: Vec<(T, C<T>)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * cs + sn * y;
            h[(k + 1, j)] = -sn.conj() * x + y * cs;
        }
        rots.push((cs, sn));
    }
    for (idx, &(cs, sn)) in rots.iter().enumerate() {
        let k = lo + idx;
        let last = (k + 2).min(hi);
        for i in lo..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * cs + y * sn.conj();
            h[(i, k + 1)] = -x * sn + y * cs;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}
