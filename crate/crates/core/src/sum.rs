//! Accurate summation helpers and a windowed evaluator for exponential sums
//! of the form `Σ_j a_j e^{-iτ ln j}`.
//!
//! [`WindowSum`] is the workhorse behind every moment integral: the
//! coefficients are folded once into per-chunk Taylor moments, after which
//! each evaluation costs `O(chunks × taylor_terms)` instead of `O(terms)`.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated complex accumulator (componentwise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}

/// Number of Taylor terms kept per chunk.
const TAYLOR_TERMS: usize = 18;
/// Chunk widths are chosen so that `|τ| · width / 2 <= RHO` on the window.
const RHO: f64 = 0.5;
/// Items accumulated locally before being flushed into the chunk totals.
const FLUSH_EVERY: usize = 1024;

#[derive(Debug, Clone)]
struct Chunk {
    log_mid: f64,
    /// Taylor moments `Σ b_j (ln j - log_mid)^k / k!`.
    moments: [Complex64; TAYLOR_TERMS],
    mass: f64,
    count: usize,
}

fn merge_into(dst: &mut Chunk, src: &Chunk) {
    for (a, b) in dst.moments.iter_mut().zip(src.moments.iter()) {
        *a += *b;
    }
    dst.mass += src.mass;
    dst.count += src.count;
}

impl Chunk {
    fn new(log_mid: f64) -> Self {
        Self {
            log_mid,
            moments: [Complex64::new(0.0, 0.0); TAYLOR_TERMS],
            mass: 0.0,
            count: 0,
        }
    }
}

/// Exponential sum `F(t) = Σ_j a_j e^{-i t ln j}` prepared for fast evaluation
/// on `|t - center| <= half_width`.
///
/// The coefficients are rotated by `e^{-i center ln j}` and grouped by `ln j`
/// into chunks of width `RHO·2/half_width`; inside a chunk the residual phase
/// `e^{-iτ(ln j - mid)}` is expanded to [`TAYLOR_TERMS`] terms.
#[derive(Debug, Clone)]
pub struct WindowSum {
    center: f64,
    half_width: f64,
    width: f64,
    chunks: Vec<Chunk>,
    mass: f64,
    items: usize,
    /// Bound on rounding of the `center · ln j` phases.
    phase_err: f64,
}

impl WindowSum {
    /// Builds the window from `(ln j, a_j)` pairs. Order does not matter.
    pub fn build<I>(center: f64, half_width: f64, items: I) -> Self
    where
        I: IntoIterator<Item = (f64, Complex64)>,
    {
        let half_width = half_width.abs();
        let width = if half_width > 0.0 {
            (2.0 * RHO / half_width).min(4.0)
        } else {
            4.0
        };
        let mut chunks: Vec<Chunk> = Vec::new();
        let mut local = Chunk::new(0.0);
        let mut local_idx = usize::MAX;
        let mut mass = 0.0;
        let mut n_items = 0usize;
        let mut phase_err = 0.0;

        for (log_j, a) in items {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let idx = (log_j / width).floor().max(0.0) as usize;
            while chunks.len() <= idx {
                let c = chunks.len();
                chunks.push(Chunk::new((c as f64 + 0.5) * width));
            }
            if idx != local_idx || local.count >= FLUSH_EVERY {
                if local_idx != usize::MAX {
                    merge_into(&mut chunks[local_idx], &local);
                }
                local = Chunk::new(chunks[idx].log_mid);
                local_idx = idx;
            }
            let b = if center != 0.0 {
                let ph = -center * log_j;
                phase_err += a.norm() * (ph.abs() + 1.0) * 2.0 * f64::EPSILON;
                a * Complex64::from_polar(1.0, ph)
            } else {
                a
            };
            let x = log_j - local.log_mid;
            let mut p = b;
            for mk in local.moments.iter_mut() {
                *mk += p;
                p *= x;
            }
            let w = b.norm();
            local.mass += w;
            local.count += 1;
            mass += w;
            n_items += 1;
        }
        if local_idx != usize::MAX {
            merge_into(&mut chunks[local_idx], &local);
        }

        for ch in chunks.iter_mut() {
            let mut inv_fact = 1.0;
            for (k, m) in ch.moments.iter_mut().enumerate() {
                if k > 0 {
                    inv_fact /= k as f64;
                }
                *m *= inv_fact;
            }
        }
        chunks.retain(|c| c.count > 0);

        Self {
            center,
            half_width,
            width,
            chunks,
            mass,
            items: n_items,
            phase_err,
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `Σ |a_j|`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items == 0
    }

    /// Evaluates `F(t)`; `t` may lie outside the window, at the price of a
    /// larger (reported) truncation error.
    pub fn eval(&self, t: f64) -> Complex64 {
        let tau = t - self.center;
        let z = Complex64::new(0.0, -tau);
        let mut total = Complex64::new(0.0, 0.0);
        for ch in &self.chunks {
            let mut s = ch.moments[TAYLOR_TERMS - 1];
            for k in (0..TAYLOR_TERMS - 1).rev() {
                s = s * z + ch.moments[k];
            }
            total += s * Complex64::from_polar(1.0, -tau * ch.log_mid);
        }
        total
    }

    /// Absolute error bound for [`WindowSum::eval`] at `t`.
    pub fn error_bound(&self, t: f64) -> f64 {
        let tau = (t - self.center).abs();
        let r = tau * self.width / 2.0;
        let mut tail = r.powi(TAYLOR_TERMS as i32);
        for k in 2..=TAYLOR_TERMS {
            tail /= k as f64;
        }
        let trunc = self.mass * tail * r.exp();
        let chunk_items = self.chunks.iter().map(|c| c.count).max().unwrap_or(0);
        let rounding = self.mass
            * f64::EPSILON
            * ((FLUSH_EVERY + chunk_items / FLUSH_EVERY + 4 * TAYLOR_TERMS) as f64)
            * (1.0 + r).powi(2);
        trunc + rounding + self.phase_err
    }
}
