//! Small numerical kernels used by the solver layers: a banded complex LU
//! factorization for the vectorized Liouvillian and a closed-form real cubic
//! solver with Newton polish for the saturation self-consistency equation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/* Banded complex matrices *************************************************/

/// Complex banded matrix with lower bandwidth `bl` and upper bandwidth `bu`,
/// stored column-major in the usual band layout: entry (i, j) lives at
/// `ab[j·ldab + bl + bu + i − j]` with `ldab = 2·bl + bu + 1`. The extra
/// `bl` rows above the band hold fill-in produced by partial pivoting.
#[derive(Clone)]
pub struct BandMatrix {
    n: usize,
    bl: usize,
    bu: usize,
    ldab: usize,
    ab: Vec<C64>,
}

impl BandMatrix {
    pub fn new(n: usize, bl: usize, bu: usize) -> Self {
        assert!(n > 0);
        let ldab = 2 * bl + bu + 1;
        BandMatrix {
            n,
            bl,
            bu,
            ldab,
            ab: vec![C64::ZERO; ldab * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i <= j + self.bl && j <= i + self.bl + self.bu);
        j * self.ldab + self.bl + self.bu + i - j
    }

    /// Accumulate `v` into entry (i, j). Panics if (i, j) is outside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    /// Entry (i, j), zero outside the declared band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i <= j + self.bl && j <= i + self.bu {
            self.ab[self.slot(i, j)]
        } else {
            C64::ZERO
        }
    }

    /// Matrix-vector product `A·x` over the declared band.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![C64::ZERO; self.n];
        for j in 0..self.n {
            let xj = x[j];
            if xj == C64::ZERO {
                continue;
            }
            let i_lo = j.saturating_sub(self.bu);
            let i_hi = (j + self.bl).min(self.n - 1);
            let base = j * self.ldab + self.bl + self.bu - j;
            for i in i_lo..=i_hi {
                y[i] += self.ab[base + i] * xj;
            }
        }
        y
    }

    /// Largest entry magnitude; scale reference for residual tests.
    pub fn max_abs(&self) -> f64 {
        self.ab.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// LU factorization with row partial pivoting (band analogue of the
    /// classic gbtrf). Consumes the matrix; pivoting fill widens the upper
    /// band to `bl + bu`.
    pub fn factor(mut self) -> BandLu {
        let n = self.n;
        let bl = self.bl;
        let bu_eff = self.bl + self.bu;
        let ldab = self.ldab;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let rows_below = bl.min(n - 1 - k);
            let diag = k * ldab + bu_eff; // slot of (k, k)
                                          // pivot search down column k (contiguous in band storage)
            let mut p = 0usize;
            let mut pmag = self.ab[diag].norm_sqr();
            for r in 1..=rows_below {
                let m = self.ab[diag + r].norm_sqr();
                if m > pmag {
                    pmag = m;
                    p = r;
                }
            }
            pivots[k] = k + p;
            let cols_right = bu_eff.min(n - 1 - k);
            if p != 0 {
                for j in 0..=cols_right {
                    let a = (k + j) * ldab + bu_eff - j; // slot of (k, k+j)
                    self.ab.swap(a, a + p);
                }
            }
            let pivot = self.ab[diag];
            if pivot == C64::ZERO {
                continue; // exactly singular column; solve() regularizes
            }
            let inv = pivot.finv();
            for r in 1..=rows_below {
                self.ab[diag + r] *= inv;
            }
            // rank-1 update, column-wise so both inner loops are contiguous
            for j in 1..=cols_right {
                let ucol = (k + j) * ldab + bu_eff - j; // slot of (k, k+j)
                let u = self.ab[ucol];
                if u == C64::ZERO {
                    continue;
                }
                for r in 1..=rows_below {
                    let l = self.ab[diag + r];
                    self.ab[ucol + r] -= l * u;
                }
            }
        }
        BandLu {
            n,
            bl,
            bu_eff,
            ldab,
            ab: self.ab,
            pivots,
        }
    }
}

/// Factored form produced by [`BandMatrix::factor`].
pub struct BandLu {
    n: usize,
    bl: usize,
    bu_eff: usize,
    ldab: usize,
    ab: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.bu_eff + i - j
    }

    /// Solve `A·x = b` in place. Exactly-zero pivots are replaced by a tiny
    /// regularization, so on a singular matrix the solve acts as one step of
    /// inverse iteration toward the null space.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == C64::ZERO {
                continue;
            }
            let rows_below = self.bl.min(n - 1 - k);
            let diag = self.slot(k, k);
            for r in 1..=rows_below {
                b[k + r] -= self.ab[diag + r] * bk;
            }
        }
        let tiny = (self.pivot_scale() * 1e-100).max(f64::MIN_POSITIVE);
        for k in (0..n).rev() {
            let cols_right = self.bu_eff.min(n - 1 - k);
            let mut s = b[k];
            for j in 1..=cols_right {
                s -= self.ab[self.slot(k, k + j)] * b[k + j];
            }
            let mut d = self.ab[self.slot(k, k)];
            if d == C64::ZERO {
                d = C64::new(tiny, 0.0);
            }
            b[k] = s / d;
        }
    }

    fn pivot_scale(&self) -> f64 {
        (0..self.n)
            .map(|k| self.ab[self.slot(k, k)].norm())
            .fold(0.0, f64::max)
    }

    /// Number of pivots below `tol` times the largest pivot; a count ≥ 2
    /// flags a numerically degenerate null space.
    pub fn tiny_pivot_count(&self, tol: f64) -> usize {
        let scale = self.pivot_scale();
        (0..self.n)
            .filter(|&k| self.ab[self.slot(k, k)].norm() <= tol * scale)
            .count()
    }
}

/* Real cubic ***************************************************************/

/// Real roots of `c[0] + c[1]·x + c[2]·x² + c[3]·x³`, ascending, each
/// polished by Newton steps on the monic polynomial. Degenerate leading
/// coefficients degrade gracefully to the quadratic/linear case.
///
/// One root is isolated by bisection (a cubic always has a sign change
/// inside its Cauchy bound), the other two come from the deflated
/// quadratic. Deflation keeps nearly-coincident root pairs resolvable,
/// which matters close to fold points.
pub fn real_cubic_roots(c: [f64; 4]) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    if c[3].abs() <= 1e-14 * scale {
        return real_quadratic_roots(c[0], c[1], c[2]);
    }
    let a = c[2] / c[3];
    let b = c[1] / c[3];
    let d = c[0] / c[3];
    let f = |x: f64| ((x + a) * x + b) * x + d;

    // bracket one root inside the Cauchy bound and bisect it down
    let bound = 1.0 + a.abs().max(b.abs()).max(d.abs());
    let (mut lo, mut hi) = (-bound, bound);
    debug_assert!(f(lo) <= 0.0 && f(hi) >= 0.0);
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * bound {
            break;
        }
    }
    let r0 = polish_monic_cubic(a, b, d, 0.5 * (lo + hi));

    // deflate: x³ + ax² + bx + d = (x − r0)(x² + px + q) + remainder
    let p = a + r0;
    let q = b + r0 * p;
    let mut roots = vec![r0];
    roots.extend(real_quadratic_roots(q, p, 1.0));
    for r in roots.iter_mut() {
        *r = polish_monic_cubic(a, b, d, *r);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

fn real_quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if c2.abs() <= 1e-14 * scale {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let mut disc = c1 * c1 - 4.0 * c2 * c0;
    let disc_scale = c1 * c1 + 4.0 * (c2 * c0).abs();
    if disc < 0.0 {
        // a barely-negative discriminant is a fold-point double root
        if disc >= -1e-12 * disc_scale {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let sgn = if c1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (c1 + sgn * disc.sqrt());
    let mut roots = if q == 0.0 {
        vec![0.0, -c1 / c2]
    } else {
        vec![q / c2, c0 / q]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

// Newton on x³ + a·x² + b·x + d, step-guarded near stationary points
// (fold points of the saturation curve have f' ≈ 0).
fn polish_monic_cubic(a: f64, b: f64, d: f64, mut x: f64) -> f64 {
    for _ in 0..8 {
        let f = ((x + a) * x + b) * x + d;
        let fp = (3.0 * x + 2.0 * a) * x + b;
        if fp.abs() < 1e-30 {
            break;
        }
        let guard = 1.0 + x.abs();
        let step = (f / fp).clamp(-guard, guard);
        let next = x - step;
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// Collapse roots closer than `tol` to their mean, keeping one copy each.
pub fn dedup_roots(mut roots: Vec<f64>, tol: f64) -> Vec<f64> {
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(last) if (r - *last).abs() <= tol => *last = 0.5 * (*last + r),
            _ => out.push(r),
        }
    }
    out
}

/// Guard used by callers that must reject an exactly-zero complex factor.
pub fn nonzero(z: C64, what: &str) -> Result<C64> {
    if z == C64::ZERO {
        Err(Error::SingularParameters(format!("{what} is exactly zero")))
    } else {
        Ok(z)
    }
}
