use serde::Serialize;

use crate::cone::PlusVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// Minimal fixed point `σ_*(r)` of `Γᵣ`.
    SigmaStar,
    /// Maximal fixed point `σ^*(r)` of `Γᵣ`.
    SigmaUpper,
}

/// Value of an interpolant together with a flag set when the argument lies
/// beyond the last grid point and the last segment slope was used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lookup {
    pub value: f64,
    pub out_of_range: bool,
}

/// `σ` sampled on an increasing grid with `σ(0) = 0`, interpolated per
/// component by monotone piecewise-linear functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTable {
    /// Grid points, starting with 0.
    grid: Vec<f64>,
    /// `sigma[k]` is `σ(grid[k])`.
    sigma: Vec<PlusVector>,
    #[serde(skip)]
    columns: Vec<Vec<f64>>,
    pub mode: PathMode,
    pub tol: f64,
    /// `max_r ‖σ^*(r) − σ_*(r)‖∞` when both endpoints were constructed.
    pub max_gap: Option<f64>,
}

impl PathTable {
    /// `grid` excludes 0; `sigma` holds one vector per grid point. Components
    /// must be nondecreasing up to `tol`; smaller dips are flattened.
    pub fn new(grid: Vec<f64>, sigma: Vec<PlusVector>, mode: PathMode, tol: f64) -> Result<Self> {
        if grid.is_empty() || grid.len() != sigma.len() {
            return Err(Error::Domain("path table needs one σ per grid point".into()));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain("grid must be positive, finite and strictly increasing".into()));
        }
        let n = sigma[0].len();
        if sigma.iter().any(|s| s.len() != n) {
            return Err(Error::Dimension { expected: n, got: sigma.iter().map(PlusVector::len).find(|&l| l != n).unwrap_or(n) });
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(sigma.len() + 1);
        rows.push(vec![0.0; n]);
        for (k, s) in sigma.iter().enumerate() {
            let prev = &rows[k];
            let mut row = s.as_slice().to_vec();
            for i in 0..n {
                if row[i] < prev[i] {
                    if prev[i] - row[i] > tol * (1.0 + prev[i]) {
                        return Err(Error::Construction {
                            r: grid[k],
                            reason: format!("component {i} decreases from {} to {}", prev[i], row[i]),
                        });
                    }
                    row[i] = prev[i];
                }
            }
            rows.push(row);
        }
        let mut full_grid = vec![0.0];
        full_grid.extend(grid);
        let columns = (0..n).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
        Ok(PathTable {
            grid: full_grid,
            sigma: rows.into_iter().map(PlusVector::from_vec).collect(),
            columns,
            mode,
            tol,
            max_gap: None,
        })
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.max_gap = Some(gap);
        self
    }

    /// Number of components.
    pub fn dim(&self) -> usize {
        self.sigma[0].len()
    }

    /// Grid including the leading 0.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `σ` at every grid point, including `σ(0) = 0`.
    pub fn sigma(&self) -> &[PlusVector] {
        &self.sigma
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.columns[i].clone()
    }

    fn check_component(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, n: self.dim() });
        }
        Ok(())
    }

    /// `σᵢ(r)` by linear interpolation, extrapolating with the last slope.
    pub fn eval(&self, i: usize, r: f64) -> Result<Lookup> {
        self.check_component(i)?;
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("σ evaluated at {r}")));
        }
        let g = &self.grid;
        let m = g.len();
        let k = g.partition_point(|&x| x <= r).clamp(1, m - 1);
        let (x0, x1) = (g[k - 1], g[k]);
        let (y0, y1) = (self.sigma[k - 1][i], self.sigma[k][i]);
        let value = y0 + (y1 - y0) * (r - x0) / (x1 - x0);
        Ok(Lookup { value, out_of_range: r > g[m - 1] })
    }

    pub fn eval_vec(&self, r: f64) -> Result<PlusVector> {
        let v = (0..self.dim()).map(|i| self.eval(i, r).map(|l| l.value)).collect::<Result<Vec<_>>>()?;
        Ok(PlusVector::from_vec(v))
    }

    /// `σᵢ⁻¹(v)`, exact on each segment. Flat segments resolve to their left end.
    pub fn inverse(&self, i: usize, v: f64) -> Result<Lookup> {
        self.check_component(i)?;
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("σ⁻¹ evaluated at {v}")));
        }
        let g = &self.grid;
        let m = g.len();
        let ys = &self.columns[i];
        let last = ys[m - 1];
        if v > last {
            let (x0, x1, y0) = (g[m - 2], g[m - 1], ys[m - 2]);
            let slope = (last - y0) / (x1 - x0);
            if !(slope > 0.0) {
                return Err(Error::Domain(format!("component {i} is flat at the end of the table; {v} is unreachable")));
            }
            return Ok(Lookup { value: x1 + (v - last) / slope, out_of_range: true });
        }
        // first k with ys[k] ≥ v
        let k = ys.partition_point(|&y| y < v);
        if k == 0 {
            return Ok(Lookup { value: 0.0, out_of_range: false });
        }
        let (x0, x1, y0, y1) = (g[k - 1], g[k], ys[k - 1], ys[k]);
        let value = x0 + (x1 - x0) * (v - y0) / (y1 - y0);
        Ok(Lookup { value: value.min(x1), out_of_range: false })
    }

    /// `σ_min(r) = minᵢ σᵢ(r)` at every grid point.
    pub fn sigma_min(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s.iter().copied().fold(f64::INFINITY, f64::min)).collect()
    }

    /// `σ_max(r) = maxᵢ σᵢ(r)` at every grid point.
    pub fn sigma_max(&self) -> Vec<f64> {
        self.sigma.iter().map(PlusVector::sup_norm).collect()
    }

    /// Components whose grid values are not strictly increasing, with the
    /// first offending interval.
    pub fn flat_components(&self) -> Vec<(usize, f64, f64)> {
        (0..self.dim())
            .filter_map(|i| {
                self.sigma
                    .windows(2)
                    .zip(self.grid.windows(2))
                    .find(|(s, _)| !(s[1][i] > s[0][i]))
                    .map(|(_, g)| (i, g[0], g[1]))
            })
            .collect()
    }

    /// `max_k ‖σ(r_{k+1}) − σ(r_k)‖∞ / (r_{k+1} − r_k)` over the whole grid.
    pub fn lipschitz_constant(&self) -> f64 {
        self.sigma
            .windows(2)
            .zip(self.grid.windows(2))
            .map(|(s, g)| s[0].dist(&s[1]) / (g[1] - g[0]))
            .fold(0.0, f64::max)
    }
}
