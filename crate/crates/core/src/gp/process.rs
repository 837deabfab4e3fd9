use super::kernel::{sq_dist, KernelSpec};
use crate::error::{Error, Result};

/// Row block used by the blocked triangular solve.
const BLOCK: usize = 64;
/// Query points handled per blocked solve.
const CHUNK: usize = 256;

/// Posterior mean and standard deviation at one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    pub sd: f64,
}

impl Posterior {
    pub fn ucb(&self, beta: f64) -> f64 {
        self.mean + beta * self.sd
    }

    pub fn lcb(&self, beta: f64) -> f64 {
        self.mean - beta * self.sd
    }
}

/// Exact GP regression state over `[0, 1]^d` with zero prior mean.
///
/// The lower Cholesky factor `L` of `K_t + λI` grows by one row per
/// observation. Alongside it the state keeps `z = L⁻¹y` and
/// `α = (K_t + λI)⁻¹y`, so the posterior mean is `k_t(x)ᵀα` and the
/// variance is `k(x, x) − ‖L⁻¹k_t(x)‖²`.
#[derive(Debug, Clone)]
pub struct GaussianProcess {
    kernel: KernelSpec,
    lambda: f64,
    dim: usize,
    len: usize,
    cap: usize,
    inputs: Vec<f64>,
    scaled: Vec<f64>,
    targets: Vec<f64>,
    chol: Vec<f64>,
    whitened: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussianProcess {
    pub fn new(kernel: KernelSpec, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::config(format!(
                "regularizer λ = {lambda} must be a positive real"
            )));
        }
        let dim = kernel.dim();
        Ok(GaussianProcess {
            kernel,
            lambda,
            dim,
            len: 0,
            cap: 0,
            inputs: Vec::new(),
            scaled: Vec::new(),
            targets: Vec::new(),
            chol: Vec::new(),
            whitened: Vec::new(),
            weights: Vec::new(),
        })
    }

    /// Builds the state from a batch of observations.
    pub fn from_data(
        kernel: KernelSpec,
        lambda: f64,
        inputs: &[Vec<f64>],
        targets: &[f64],
    ) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::config(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let mut gp = Self::new(kernel, lambda)?;
        gp.reserve(inputs.len());
        for (x, &y) in inputs.iter().zip(targets) {
            gp.push(x, y)?;
        }
        gp.refresh_weights();
        Ok(gp)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Row `i` of the Cholesky factor, entries `0..=i`.
    pub fn factor_row(&self, i: usize) -> &[f64] {
        assert!(i < self.len);
        &self.chol[i * self.cap..i * self.cap + i + 1]
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfDomain { index, value });
        }
        Ok(())
    }

    fn reserve(&mut self, total: usize) {
        if total <= self.cap {
            return;
        }
        let cap = total.max(2 * self.cap).max(16);
        let mut chol = vec![0.0; cap * cap];
        for i in 0..self.len {
            chol[i * cap..i * cap + i + 1]
                .copy_from_slice(&self.chol[i * self.cap..i * self.cap + i + 1]);
        }
        self.chol = chol;
        self.cap = cap;
    }

    /// Consumes the state and returns it extended by one observation.
    pub fn update(mut self, x: &[f64], y: f64) -> Result<Self> {
        self.observe(x, y)?;
        Ok(self)
    }

    /// In-place form of [`update`](Self::update); the state is unchanged on error.
    pub fn observe(&mut self, x: &[f64], y: f64) -> Result<()> {
        self.push(x, y)?;
        self.refresh_weights();
        Ok(())
    }

    /// Appends one row to the factor. `weights` is stale until
    /// [`refresh_weights`](Self::refresh_weights) runs.
    fn push(&mut self, x: &[f64], y: f64) -> Result<()> {
        self.check_query(x)?;
        if !y.is_finite() {
            return Err(Error::NonFinite(y));
        }
        let n = self.len;
        self.reserve(n + 1);
        let mut scaled = vec![0.0; self.dim];
        self.kernel.scale_into(x, &mut scaled);

        // Forward substitution: L l = k_t(x).
        let cap = self.cap;
        let mut row = vec![0.0; n + 1];
        for i in 0..n {
            let xi = &self.scaled[i * self.dim..(i + 1) * self.dim];
            row[i] = self.kernel.from_scaled_sq_dist(sq_dist(&scaled, xi));
        }
        for i in 0..n {
            let li = &self.chol[i * cap..i * cap + i + 1];
            let acc = dot(&li[..i], &row[..i]);
            row[i] = (row[i] - acc) / li[i];
        }
        let pivot2 = self.kernel.diag() + self.lambda - dot(&row[..n], &row[..n]);
        if !(pivot2 > 0.0) {
            return Err(Error::Factorization {
                row: n,
                pivot: pivot2,
            });
        }
        let pivot = pivot2.sqrt();
        row[n] = pivot;
        self.chol[n * cap..n * cap + n + 1].copy_from_slice(&row);

        let z = (y - dot(&row[..n], &self.whitened)) / pivot;
        self.whitened.push(z);
        self.inputs.extend_from_slice(x);
        self.scaled.extend_from_slice(&scaled);
        self.targets.push(y);
        self.len = n + 1;
        Ok(())
    }

    /// Back substitution `Lᵀα = z`.
    fn refresh_weights(&mut self) {
        let n = self.len;
        let cap = self.cap;
        let mut alpha = self.whitened.clone();
        for i in (0..n).rev() {
            let v = alpha[i] / self.chol[i * cap + i];
            alpha[i] = v;
            // Column i of L above the diagonal is row i of Lᵀ.
            let row = &self.chol[i * cap..i * cap + i];
            for (a, l) in alpha[..i].iter_mut().zip(row) {
                *a -= l * v;
            }
        }
        self.weights = alpha;
    }

    pub fn posterior(&self, x: &[f64]) -> Result<Posterior> {
        self.check_query(x)?;
        let mut means = Vec::with_capacity(1);
        let mut vars = Vec::with_capacity(1);
        self.moments_unchecked(x, &mut means, &mut vars);
        Ok(Posterior {
            mean: means[0],
            sd: vars[0].sqrt(),
        })
    }

    /// `(lcb, ucb) = (μ − βσ, μ + βσ)`.
    pub fn confidence_bounds(&self, x: &[f64], beta: f64) -> Result<(f64, f64)> {
        if !(beta >= 0.0) {
            return Err(Error::config(format!("confidence width {beta} is negative")));
        }
        let p = self.posterior(x)?;
        Ok((p.lcb(beta), p.ucb(beta)))
    }

    /// Posterior mean only; `O(t·d)` per query.
    pub fn posterior_mean(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let mut scaled = vec![0.0; self.dim];
        self.kernel.scale_into(x, &mut scaled);
        Ok((0..self.len)
            .map(|i| {
                let xi = &self.scaled[i * self.dim..(i + 1) * self.dim];
                self.kernel.from_scaled_sq_dist(sq_dist(&scaled, xi)) * self.weights[i]
            })
            .sum())
    }

    /// Posterior means and variances for a row-major batch of queries.
    pub fn posterior_batch(&self, points: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if !points.len().is_multiple_of(self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: points.len() % self.dim,
            });
        }
        if let Some((index, &value)) = points
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfDomain {
                index: index % self.dim,
                value,
            });
        }
        let count = points.len() / self.dim;
        let mut means = Vec::with_capacity(count);
        let mut vars = Vec::with_capacity(count);
        self.moments_unchecked(points, &mut means, &mut vars);
        Ok((means, vars))
    }

    pub(crate) fn moments_unchecked(&self, points: &[f64], means: &mut Vec<f64>, vars: &mut Vec<f64>) {
        let d = self.dim;
        let n = self.len;
        let prior = self.kernel.diag();
        let mut scaled = vec![0.0; CHUNK * d];
        let mut solved = vec![0.0; CHUNK * n];
        for chunk in points.chunks(CHUNK * d) {
            let b = chunk.len() / d;
            if n == 0 {
                means.extend(std::iter::repeat_n(0.0, b));
                vars.extend(std::iter::repeat_n(prior, b));
                continue;
            }
            for (q, s) in chunk.chunks_exact(d).zip(scaled.chunks_exact_mut(d)) {
                self.kernel.scale_into(q, s);
            }
            // Column j of `solved` (contiguous, length n) holds k_t(q_j).
            for (s, col) in scaled.chunks_exact(d).take(b).zip(solved.chunks_exact_mut(n)) {
                for (i, c) in col.iter_mut().enumerate() {
                    *c = self
                        .kernel
                        .from_scaled_sq_dist(sq_dist(s, &self.scaled[i * d..(i + 1) * d]));
                }
            }
            let cols = &mut solved[..b * n];
            for col in cols.chunks_exact(n) {
                means.push(dot(col, &self.weights));
            }
            self.solve_lower_in_place(cols, b);
            for col in cols.chunks_exact(n) {
                let v = prior - dot(col, col);
                vars.push(v.clamp(0.0, prior));
            }
        }
    }

    /// Solves `L X = B` in place for the column-major `n × b` matrix `x`.
    fn solve_lower_in_place(&self, x: &mut [f64], b: usize) {
        let n = self.len;
        let cap = self.cap;
        let mut r0 = 0;
        while r0 < n {
            let r1 = (r0 + BLOCK).min(n);
            if r0 > 0 {
                // X[r0..r1, :] -= L[r0..r1, 0..r0] · X[0..r0, :]
                let ptr = x.as_mut_ptr();
                // SAFETY: the A operand reads rows r0..r1, columns 0..r0 of the
                // cap-strided factor; B reads rows 0..r0 and C writes rows r0..r1
                // of the same column-major buffer, and those row ranges are
                // disjoint. All offsets stay within the allocations.
                unsafe {
                    matrixmultiply::dgemm(
                        r1 - r0,
                        r0,
                        b,
                        -1.0,
                        self.chol.as_ptr().add(r0 * cap),
                        cap as isize,
                        1,
                        ptr as *const f64,
                        1,
                        n as isize,
                        1.0,
                        ptr.add(r0),
                        1,
                        n as isize,
                    );
                }
            }
            for col in x.chunks_exact_mut(n) {
                for i in r0..r1 {
                    let li = &self.chol[i * cap..i * cap + i + 1];
                    let acc = dot(&li[r0..i], &col[r0..i]);
                    col[i] = (col[i] - acc) / li[i];
                }
            }
            r0 = r1;
        }
    }

    /// `0.5·log|I + λ⁻¹K_t|` from the factor's diagonal.
    pub fn information_gain(&self) -> f64 {
        let log_det: f64 = (0..self.len)
            .map(|i| self.chol[i * self.cap + i].ln())
            .sum();
        log_det - 0.5 * self.len as f64 * self.lambda.ln()
    }
}

/// Four independent accumulators so the loop vectorizes without reassociation.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
