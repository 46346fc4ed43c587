use nalgebra::DMatrix;

/// Real symmetric matrix in lower-band storage.
///
/// Only entries with `0 <= i - j <= capacity` are stored, so every off-diagonal
/// value exists exactly once and `get(i, j) == get(j, i)` holds bit for bit.
/// A capacity of `dim - 1` is plain dense lower-triangular storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    capacity: usize,
    // band[d * dim + j] = A[j + d][j]
    band: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize, capacity: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let capacity = capacity.min(dim - 1);
        Self {
            dim,
            capacity,
            band: vec![0.0; (capacity + 1) * dim],
        }
    }

    /// Builds from a dense row-major square array, reading the lower triangle only.
    pub fn from_lower_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim, dim.saturating_sub(1));
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate().take(i + 1) {
                m.set(i, j, v);
            }
        }
        m.shrink_to_fit()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Allocated half-bandwidth.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        (1..=self.capacity)
            .rev()
            .find(|&d| self.diagonal_band(d).iter().any(|&v| v != 0.0))
            .unwrap_or(0)
    }

    /// Drops unused outer diagonals.
    pub fn shrink_to_fit(mut self) -> Self {
        let b = self.bandwidth();
        self.band.truncate((b + 1) * self.dim);
        self.capacity = b;
        self
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        (r < self.dim && d <= self.capacity).then_some(d * self.dim + c)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.band[k])
    }

    /// Writes `A[i][j]` and, implicitly, `A[j][i]`.
    ///
    /// Panics if the entry lies outside the allocated band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.capacity));
        self.band[k] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.capacity));
        self.band[k] += value;
    }

    /// The `d`-th subdiagonal, `A[j + d][j]` for `j in 0..dim - d`.
    pub fn diagonal_band(&self, d: usize) -> &[f64] {
        &self.band[d * self.dim..d * self.dim + self.dim - d]
    }

    pub fn diagonal(&self) -> &[f64] {
        self.diagonal_band(0)
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.dim];
        for d in 0..=self.capacity {
            for (j, &v) in self.diagonal_band(d).iter().enumerate() {
                rows[j + d] += v.abs();
                if d > 0 {
                    rows[j] += v.abs();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut radius = vec![0.0f64; self.dim];
        for d in 1..=self.capacity {
            for (j, &v) in self.diagonal_band(d).iter().enumerate() {
                radius[j + d] += v.abs();
                radius[j] += v.abs();
            }
        }
        self.diagonal()
            .iter()
            .zip(&radius)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&a, &r)| {
                (lo.min(a - r), hi.max(a + r))
            })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (yi, (&a, &xi)) in y.iter_mut().zip(self.diagonal().iter().zip(x)) {
            *yi = a * xi;
        }
        for d in 1..=self.capacity {
            for (j, &v) in self.diagonal_band(d).iter().enumerate() {
                y[j + d] += v * x[j];
                y[j] += v * x[j + d];
            }
        }
    }

    /// Returns `P A P^T` where `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize], capacity: usize) -> Self {
        assert_eq!(perm.len(), self.dim);
        let mut out = Self::zeros(self.dim, capacity);
        for d in 0..=self.capacity {
            for (j, &v) in self.diagonal_band(d).iter().enumerate() {
                if v != 0.0 {
                    out.set(perm[j + d], perm[j], v);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}
