//! Trapezoid quadrature of sampled amplitudes on uniform grids, including
//! derivative-based momentum moments and the azimuthal-phase-gradient OAM
//! estimator.
//!
//! Coordinates are dimensionless (focal units); the caller rescales. All
//! estimators report alongside a refinement-style error estimate where one
//! is cheap to form.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite-difference order for derivative-based estimators. Order2 has a
/// crisp measurable convergence rate (used by the refinement checks);
/// Order4 is the accuracy default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Order2,
    Order4,
}

/// Uniform symmetric 1D grid, x in [-half, half].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1d {
    pub half: f64,
    pub n: usize,
}

impl Grid1d {
    /// Grid sized for a packet of rms size `rms`: total extent 12 rms
    /// (comfortably above the 8-rms floor; keeps Gaussian tail mass at
    /// the e^-36 level).
    pub fn for_rms(rms: f64, n: usize) -> Result<Self> {
        Self::new(6.0 * rms, n)
    }

    pub fn new(half: f64, n: usize) -> Result<Self> {
        if n < 64 {
            return Err(Error::GridTooCoarse(format!(
                "{n} points per axis, need >= 64"
            )));
        }
        if half <= 0.0 {
            return Err(Error::NonPositive {
                name: "half",
                value: half,
            });
        }
        Ok(Grid1d { half, n })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..self.n).map(move |i| -self.half + i as f64 * h)
    }
}

/// Uniform square grid, (x, y) in [-half, half]^2, row-major samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2d {
    pub half: f64,
    pub n: usize,
}

impl Grid2d {
    pub fn for_rms(rms: f64, n: usize) -> Result<Self> {
        let g1 = Grid1d::for_rms(rms, n)?;
        Ok(Grid2d { half: g1.half, n })
    }

    pub fn new(half: f64, n: usize) -> Result<Self> {
        let g1 = Grid1d::new(half, n)?;
        Ok(Grid2d { half: g1.half, n })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half + i as f64 * self.step()
    }

    /// Sample a function on the grid (row-major, x outer).
    pub fn sample(&self, mut f: impl FnMut(f64, f64) -> Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            let x = self.coord(i);
            for j in 0..self.n {
                out.push(f(x, self.coord(j)));
            }
        }
        out
    }
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

/// Moment estimates from 1D amplitude samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMoments1d {
    /// Integral of |psi|^2 dx.
    pub norm: f64,
    pub mean_x: f64,
    /// <x^2> (already normalized).
    pub x2: f64,
    /// <p^2> in hbar/length units, from |dpsi/dx|^2.
    pub p2: f64,
    /// Symmetrized <x p> (hbar units).
    pub xp: f64,
}

pub fn grid_moments_1d(
    samples: &[Complex64],
    grid: &Grid1d,
    stencil: Stencil,
) -> Result<GridMoments1d> {
    if samples.len() != grid.n {
        return Err(Error::GridTooCoarse(
            "sample count does not match the grid".into(),
        ));
    }
    let h = grid.step();
    let mut norm = 0.0;
    let mut mx = 0.0;
    let mut x2 = 0.0;
    for (i, (x, s)) in grid.points().zip(samples).enumerate() {
        let w = trapezoid_weight(i, grid.n) * h;
        let p = s.norm_sqr() * w;
        norm += p;
        mx += x * p;
        x2 += x * x * p;
    }
    if !(0.5..2.0).contains(&norm) {
        return Err(Error::GridTooCoarse(format!(
            "normalization {norm:.6} deviates from 1 beyond tolerance; widen or refine the grid"
        )));
    }
    // Derivative moments on interior points.
    let mut p2 = 0.0;
    let mut xp = 0.0;
    let margin = match stencil {
        Stencil::Order2 => 1,
        Stencil::Order4 => 2,
    };
    for i in margin..grid.n - margin {
        let d = derivative(samples, i, h, stencil);
        let x = -grid.half + i as f64 * h;
        p2 += d.norm_sqr() * h;
        xp += (samples[i].conj() * d).im * x * h;
    }
    Ok(GridMoments1d {
        norm,
        mean_x: mx / norm,
        x2: x2 / norm,
        p2: p2 / norm,
        xp: xp / norm,
    })
}

fn derivative(s: &[Complex64], i: usize, h: f64, stencil: Stencil) -> Complex64 {
    match stencil {
        Stencil::Order2 => (s[i + 1] - s[i - 1]) / (2.0 * h),
        Stencil::Order4 => (8.0 * (s[i + 1] - s[i - 1]) - (s[i + 2] - s[i - 2])) / (12.0 * h),
    }
}

/// Moment estimates from 2D amplitude samples (row-major, x outer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMoments2d {
    pub norm: f64,
    /// <rho^2>.
    pub rho2: f64,
    /// <p_perp^2> (hbar/length units).
    pub p_perp2: f64,
    /// Symmetrized <rho . p> (hbar units).
    pub rho_p: f64,
    /// <L_z> via the azimuthal phase gradient x d_y - y d_x (hbar).
    pub oam: f64,
    /// <(L_z - <L_z>)^2> (hbar^2); ~0 for a vortex eigenstate.
    pub oam_variance: f64,
}

pub fn grid_moments_2d(
    samples: &[Complex64],
    grid: &Grid2d,
    stencil: Stencil,
) -> Result<GridMoments2d> {
    let n = grid.n;
    if samples.len() != n * n {
        return Err(Error::GridTooCoarse(
            "sample count does not match the grid".into(),
        ));
    }
    let h = grid.step();
    let cell = h * h;
    let mut norm = 0.0;
    let mut rho2 = 0.0;
    for i in 0..n {
        let x = grid.coord(i);
        let wi = trapezoid_weight(i, n);
        for j in 0..n {
            let y = grid.coord(j);
            let w = wi * trapezoid_weight(j, n) * cell;
            let p = samples[i * n + j].norm_sqr() * w;
            norm += p;
            rho2 += (x * x + y * y) * p;
        }
    }
    if !(0.5..2.0).contains(&norm) {
        return Err(Error::GridTooCoarse(format!(
            "normalization {norm:.6} deviates from 1 beyond tolerance; widen or refine the grid"
        )));
    }
    let margin = match stencil {
        Stencil::Order2 => 1,
        Stencil::Order4 => 2,
    };
    let at = |i: usize, j: usize| samples[i * n + j];
    let mut p2 = 0.0;
    let mut rho_p = 0.0;
    let mut oam = 0.0;
    // First pass: gradients for p2, rho.p, <L_z>.
    let mut lz_field = vec![Complex64::new(0.0, 0.0); n * n];
    for i in margin..n - margin {
        let x = grid.coord(i);
        for j in margin..n - margin {
            let y = grid.coord(j);
            let dx = row_derivative(samples, n, i, j, h, stencil, true);
            let dy = row_derivative(samples, n, i, j, h, stencil, false);
            let s = at(i, j);
            p2 += (dx.norm_sqr() + dy.norm_sqr()) * cell;
            rho_p += (s.conj() * (x * dx + y * dy)).im * cell;
            // L_z psi = -i (x d_y - y d_x) psi
            let lz_psi = -Complex64::i() * (x * dy - y * dx);
            lz_field[i * n + j] = lz_psi;
            oam += (s.conj() * lz_psi).re * cell;
        }
    }
    let oam_mean = oam / norm;
    let mut var = 0.0;
    for i in margin..n - margin {
        for j in margin..n - margin {
            var += (lz_field[i * n + j] - oam_mean * at(i, j)).norm_sqr() * cell;
        }
    }
    Ok(GridMoments2d {
        norm,
        rho2: rho2 / norm,
        p_perp2: p2 / norm,
        rho_p: rho_p / norm,
        oam: oam_mean,
        oam_variance: var / norm,
    })
}

fn row_derivative(
    s: &[Complex64],
    n: usize,
    i: usize,
    j: usize,
    h: f64,
    stencil: Stencil,
    along_x: bool,
) -> Complex64 {
    let at = |di: isize, dj: isize| {
        let ii = (i as isize + di) as usize;
        let jj = (j as isize + dj) as usize;
        s[ii * n + jj]
    };
    match (stencil, along_x) {
        (Stencil::Order2, true) => (at(1, 0) - at(-1, 0)) / (2.0 * h),
        (Stencil::Order2, false) => (at(0, 1) - at(0, -1)) / (2.0 * h),
        (Stencil::Order4, true) => {
            (8.0 * (at(1, 0) - at(-1, 0)) - (at(2, 0) - at(-2, 0))) / (12.0 * h)
        }
        (Stencil::Order4, false) => {
            (8.0 * (at(0, 1) - at(0, -1)) - (at(0, 2) - at(0, -2))) / (12.0 * h)
        }
    }
}

/// Discretization estimate for 2D moments: re-evaluates norm and <rho^2>
/// on the stride-2 subgrid (same extent, half the resolution) and returns
/// the largest relative shift. Needs an odd point count so the subgrid
/// lands on existing samples.
pub fn discretization_estimate_2d(samples: &[Complex64], grid: &Grid2d) -> Result<f64> {
    let n = grid.n;
    if n % 2 == 0 {
        return Err(Error::GridTooCoarse(
            "discretization estimate needs an odd point count".into(),
        ));
    }
    let full = grid_moments_2d(samples, grid, Stencil::Order2)?;
    let half_n = n / 2 + 1;
    let coarse_grid = Grid2d {
        half: grid.half,
        n: half_n,
    };
    let mut coarse = Vec::with_capacity(half_n * half_n);
    for i in (0..n).step_by(2) {
        for j in (0..n).step_by(2) {
            coarse.push(samples[i * n + j]);
        }
    }
    let sub = grid_moments_2d(&coarse, &coarse_grid, Stencil::Order2)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    Ok(rel(sub.norm, full.norm).max(rel(sub.rho2, full.rho2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discretization_estimate_bounds_the_true_error() {
        let grid = Grid2d::for_rms(1.0, 257).unwrap();
        let norm = 1.0 / std::f64::consts::PI.sqrt();
        let s = grid.sample(|x, y| Complex64::new(norm * (-0.5 * (x * x + y * y)).exp(), 0.0));
        let est = discretization_estimate_2d(&s, &grid).unwrap();
        let m = grid_moments_2d(&s, &grid, Stencil::Order2).unwrap();
        let true_err = (m.rho2 - 1.0).abs();
        assert!(
            est >= true_err,
            "estimate {est} below true error {true_err}"
        );
        assert!(est < 1e-6, "estimate implausibly large: {est}");
        // even point counts are rejected
        let even = Grid2d::for_rms(1.0, 256).unwrap();
        let se = even.sample(|x, y| Complex64::new(norm * (-0.5 * (x * x + y * y)).exp(), 0.0));
        assert!(discretization_estimate_2d(&se, &even).is_err());
    }

    #[test]
    fn gaussian_grid_moments() {
        // psi = pi^{-1/2} exp(-r^2/2): <rho^2> = 1, <p^2> = 1, L_z = 0.
        let grid = Grid2d::for_rms(1.0, 256).unwrap();
        let norm = 1.0 / std::f64::consts::PI.sqrt();
        let s = grid.sample(|x, y| Complex64::new(norm * (-0.5 * (x * x + y * y)).exp(), 0.0));
        let m = grid_moments_2d(&s, &grid, Stencil::Order4).unwrap();
        assert!((m.norm - 1.0).abs() < 1e-10);
        assert!((m.rho2 - 1.0).abs() < 1e-8);
        assert!((m.p_perp2 - 1.0).abs() < 1e-5);
        assert!(m.oam.abs() < 1e-10);
        assert!(m.rho_p.abs() < 1e-10);
    }

    #[test]
    fn vortex_oam_and_variance() {
        // psi ~ (x + i y)^2 exp(-r^2/2): an l = +2 eigenstate.
        let grid = Grid2d::for_rms(3.0f64.sqrt(), 256).unwrap();
        let s = grid.sample(|x, y| {
            let z = Complex64::new(x, y);
            z * z * (-0.5 * (x * x + y * y)).exp()
        });
        // normalize numerically
        let m0 = {
            let h = grid.step();
            let total: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h;
            total.sqrt()
        };
        let s: Vec<_> = s.iter().map(|v| v / m0).collect();
        let m = grid_moments_2d(&s, &grid, Stencil::Order4).unwrap();
        assert!((m.oam - 2.0).abs() < 1e-4, "oam = {}", m.oam);
        assert!(m.oam_variance < 1e-4, "var = {}", m.oam_variance);
        assert!((m.rho2 - 3.0).abs() < 1e-7);
    }

    #[test]
    fn oam_estimator_second_order_rate() {
        let run = |n: usize| {
            let grid = Grid2d::for_rms(2.0f64.sqrt(), n).unwrap();
            let s = grid.sample(|x, y| Complex64::new(x, y) * (-0.5 * (x * x + y * y)).exp());
            let h = grid.step();
            let total: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h;
            let s: Vec<_> = s.iter().map(|v| v / total.sqrt()).collect();
            grid_moments_2d(&s, &grid, Stencil::Order2).unwrap().oam
        };
        let e1 = (run(129) - 1.0).abs();
        let e2 = (run(257) - 1.0).abs();
        let e3 = (run(513) - 1.0).abs();
        let r1 = (e1 / e2).log2();
        let r2 = (e2 / e3).log2();
        assert!((1.6..2.4).contains(&r1), "rate {r1}");
        assert!((1.6..2.4).contains(&r2), "rate {r2}");
    }

    #[test]
    fn coarse_or_offscale_grid_rejected() {
        assert!(Grid2d::new(1.0, 32).is_err());
        let grid = Grid2d::new(0.05, 64).unwrap(); // far too narrow for the state
        let s = grid.sample(|x, y| {
            Complex64::new(
                (-0.5 * (x * x + y * y)).exp() / std::f64::consts::PI.sqrt(),
                0.0,
            )
        });
        assert!(matches!(
            grid_moments_2d(&s, &grid, Stencil::Order2),
            Err(Error::GridTooCoarse(_))
        ));
    }

    #[test]
    fn one_dimensional_gaussian() {
        let grid = Grid1d::for_rms(std::f64::consts::FRAC_1_SQRT_2, 2048).unwrap();
        let c = std::f64::consts::PI.powf(-0.25);
        let s: Vec<_> = grid
            .points()
            .map(|x| Complex64::new(c * (-0.5 * x * x).exp(), 0.0))
            .collect();
        let m = grid_moments_1d(&s, &grid, Stencil::Order4).unwrap();
        assert!((m.norm - 1.0).abs() < 1e-8);
        assert!((m.x2 - 0.5).abs() < 1e-7);
        assert!((m.p2 - 0.5).abs() < 1e-7);
        assert!(m.xp.abs() < 1e-10);
    }
}
