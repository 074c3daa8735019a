//! Runtime self-verification: grid quadrature against the closed-form
//! packet moments, fixed-step moment integration against the analytic
//! element transports, and the Lorentz-force integrator against the
//! closed-form helix. Prints one pass/fail line per check.

use num_complex::Complex64;
use twistline_core::classical::{classical_orbit, orbit_invariants, ClassicalState};
use twistline_core::constants::{FieldScales, ParticleSpecies, C};
use twistline_core::elements::{crossed_rms, electrostatic_rms, solenoid_rms, ElementMap};
use twistline_core::oracle::{
    grid_moments_1d, grid_moments_2d, lorentz_orbit, residual_norm_2d, rk4_moments, Grid1d, Grid2d,
    MomentSystem, OdeRun, Stencil,
};
use twistline_core::packets::wavefn::{eval_1d_dimensionless, eval_transverse_dimensionless};
use twistline_core::packets::{
    moments_1d, moments_transverse, PacketFamily, PacketSpec, TransverseMoments,
};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, dev: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        pass: dev <= tol,
        detail: format!("max dev {dev:.3e}, tol {tol:.0e}"),
    }
}

fn electron() -> ParticleSpecies {
    ParticleSpecies::by_name("electron").unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Grid moments of every family against the closed forms.
pub fn packets_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let e = electron();
    let lam = e.compton_wavelength;
    let sigma = 1e-9;

    // 1D families on 1D grids.
    let mut dev_1d: f64 = 0.0;
    for family in [
        PacketFamily::Gaussian,
        PacketFamily::StandardHg,
        PacketFamily::ElegantHg,
    ] {
        let n_max = if family == PacketFamily::Gaussian {
            0
        } else {
            3
        };
        for n in 0..=n_max {
            let spec = PacketSpec::new(family, n, 0, 0, 0, sigma, 0.0, e.clone()).unwrap();
            for tau in [0.0, 1.0, 3.0] {
                let t = tau * spec.diffraction_time();
                let m = moments_1d(&spec, t).unwrap();
                let rms = (m.central_x2() / (sigma * sigma)).sqrt();
                let grid = Grid1d::for_rms(rms, 4096).unwrap();
                let samples: Vec<Complex64> = grid
                    .points()
                    .map(|x| eval_1d_dimensionless(&spec, x, tau, 0.0).unwrap())
                    .collect();
                let g = grid_moments_1d(&samples, &grid, Stencil::Order4).unwrap();
                dev_1d = dev_1d
                    .max(rel(g.x2, m.central_x2() / (sigma * sigma)))
                    .max(rel(g.p2, m.central_u2() * sigma * sigma / (lam * lam)))
                    .max((g.norm - 1.0).abs());
                if tau > 0.0 {
                    dev_1d = dev_1d.max(rel(g.xp, m.central_xu() / lam));
                }
            }
        }
    }
    out.push(check(
        "packets/1d grid moments (gaussian, hg)",
        dev_1d,
        1e-4,
    ));

    // LG families on 2D grids. Derivative-based moments (<p_perp^2>, OAM)
    // are measured at the waist, where the spreading chirp phase vanishes
    // and the stencils resolve the state; the time dependence is checked
    // through |psi|^2 alone: <rho^2>(tau) directly at tau = 0, 1, 3, and a
    // parabola fit over five times whose curvature is an independent grid
    // measurement of <u_perp^2> (and whose residual checks the quadratic
    // spreading law itself).
    for family in [PacketFamily::StandardLg, PacketFamily::ElegantLg] {
        let mut dev: f64 = 0.0;
        let mut dev_oam: f64 = 0.0;
        let mut dev_fit: f64 = 0.0;
        let taus = [0.0, 0.5, 1.0, 2.0, 3.0];
        for n in 0..=3u32 {
            for ell in -3..=3i32 {
                let spec = PacketSpec::new(family, n, 0, 0, ell, sigma, 0.0, e.clone()).unwrap();
                // waist: all moments, including the derivative-based ones
                let m0 = moments_transverse(&spec, 0.0).unwrap();
                let rms0 = (m0.rho2 / (sigma * sigma)).sqrt();
                // tighter grid for the stencil-based moments: +-5 rms keeps
                // the tail below 1e-10 while halving the step
                let grid = Grid2d::new(5.0 * rms0, 768).unwrap();
                let samples =
                    grid.sample(|x, y| eval_transverse_dimensionless(&spec, x, y, 0.0).unwrap());
                let g = grid_moments_2d(&samples, &grid, Stencil::Order4).unwrap();
                dev = dev
                    .max(rel(g.rho2, m0.rho2 / (sigma * sigma)))
                    .max(rel(g.p_perp2, m0.uperp2 * sigma * sigma / (lam * lam)))
                    .max((g.norm - 1.0).abs())
                    .max(g.rho_p.abs() / (m0.uperp2 * sigma * sigma / (lam * lam)));
                dev_oam = dev_oam.max((g.oam - ell as f64).abs()).max(g.oam_variance);
                // spreading: |psi|^2 moments over five times
                let mut r2_grid = Vec::new();
                for &tau in &taus {
                    let m = moments_transverse(&spec, tau * spec.diffraction_time()).unwrap();
                    let rms = (m.rho2 / (sigma * sigma)).sqrt();
                    let grid = Grid2d::for_rms(rms, 512).unwrap();
                    let samples = grid
                        .sample(|x, y| eval_transverse_dimensionless(&spec, x, y, tau).unwrap());
                    let g = grid_moments_2d(&samples, &grid, Stencil::Order2).unwrap();
                    dev = dev.max(rel(g.rho2, m.rho2 / (sigma * sigma)));
                    r2_grid.push(g.rho2);
                }
                // least-squares parabola a + b tau^2 (the odd term vanishes
                // at a waist start); compare b to the closed-form u2
                let (a_fit, b_fit, resid) = fit_even_parabola(&taus, &r2_grid);
                let b_closed = m0.uperp2 * sigma * sigma / (lam * lam);
                dev = dev.max(rel(b_fit, b_closed));
                dev_fit = dev_fit.max(resid / a_fit);
            }
        }
        let label = match family {
            PacketFamily::StandardLg => "lg-standard",
            _ => "lg-elegant",
        };
        out.push(check(
            format!("packets/2d grid moments ({label})"),
            dev,
            1e-4,
        ));
        out.push(check(
            format!("packets/oam eigenvalue ({label})"),
            dev_oam,
            1e-3,
        ));
        out.push(check(
            format!("packets/quadratic spreading law ({label})"),
            dev_fit,
            1e-6,
        ));
    }

    // OAM phase-gradient estimator converges at second order.
    let spec = PacketSpec::standard_lg(e.clone(), 1, 2, sigma, 0.0).unwrap();
    let oam_at = |npts: usize| {
        let grid = Grid2d::for_rms(5.0f64.sqrt(), npts).unwrap();
        let samples = grid.sample(|x, y| eval_transverse_dimensionless(&spec, x, y, 0.0).unwrap());
        grid_moments_2d(&samples, &grid, Stencil::Order2)
            .unwrap()
            .oam
    };
    let e1 = (oam_at(129) - 2.0).abs();
    let e2 = (oam_at(257) - 2.0).abs();
    let rate = (e1 / e2).log2();
    out.push(Check {
        name: "packets/oam estimator refinement order".into(),
        pass: (1.6..2.4).contains(&rate),
        detail: format!("order {rate:.2} (nominal 2)"),
    });

    // Free-Schroedinger residual shrinks at second order under refinement.
    let spec = PacketSpec::elegant_lg(e, 2, -1, sigma, 0.0).unwrap();
    let mut f = |x: f64, y: f64, tau: f64| eval_transverse_dimensionless(&spec, x, y, tau).unwrap();
    let mut res_at = |npts: usize, d: f64| {
        let grid = Grid2d::for_rms(6.0f64.sqrt(), npts).unwrap();
        residual_norm_2d(&mut f, &grid, 0.4, d).unwrap()
    };
    let r1 = res_at(129, 2e-2);
    let r2 = res_at(257, 1e-2);
    let rate = (r1 / r2).log2();
    out.push(Check {
        name: "packets/schroedinger residual refinement order".into(),
        pass: (1.6..2.4).contains(&rate),
        detail: format!("order {rate:.2} (nominal 2)"),
    });
    out
}

/// Least-squares fit of r2(tau) = a + b tau^2; returns (a, b, rms residual).
fn fit_even_parabola(taus: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let n = taus.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&tau, &v) in taus.iter().zip(values) {
        let x = tau * tau;
        sx += x;
        sxx += x * x;
        sy += v;
        sxy += x * v;
    }
    let det = n * sxx - sx * sx;
    let a = (sxx * sy - sx * sxy) / det;
    let b = (n * sxy - sx * sy) / det;
    let mut resid = 0.0;
    for (&tau, &v) in taus.iter().zip(values) {
        let d = v - a - b * tau * tau;
        resid += d * d;
    }
    (a, b, (resid / n).sqrt())
}

fn entry(n: u32, ell: i32, sigma: f64) -> TransverseMoments {
    let spec = PacketSpec::standard_lg(electron(), n, ell, sigma, 0.0).unwrap();
    moments_transverse(&spec, 0.0).unwrap()
}

/// Analytic element transports against fixed-step integration of the
/// moment equations.
pub fn elements_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let e = electron();
    let m_in = entry(1, 2, 20e-9);

    // The integrator runs on the kinetic channel; seed it from the map.
    let seed = |map: &ElementMap, m: &TransverseMoments| {
        [
            m.central_rho2(),
            2.0 * m.central_rho_u() * C,
            map.kinetic_uperp2(0.0) * C * C,
        ]
    };

    // Solenoid over two periods.
    {
        let h = 1.0;
        let map = ElementMap::from_entry(&m_in, &e, h, 0.0).unwrap();
        let sys = MomentSystem::solenoid(&e, h, m_in.ell);
        let t_end = 2.0 * map.period().unwrap();
        let run = OdeRun { t_end, steps: 8192 };
        let traj = rk4_moments(&sys, seed(&map, &m_in), &run).unwrap();
        let mut dev: f64 = 0.0;
        for (t, y) in traj.iter().skip(1) {
            let a = solenoid_rms(&m_in, &e, h, *t).unwrap();
            dev = dev.max(rel(a.rho2, y[0]));
        }
        out.push(check("elements/solenoid vs moment integration", dev, 1e-8));
    }

    // Electrostatic lens (focusing for the electron at E' > 0).
    {
        let eprime = 2e8;
        let map = ElementMap::from_entry(&m_in, &e, 0.0, eprime).unwrap();
        let sys = MomentSystem::electrostatic(&e, eprime);
        let t_end = 2.0 * map.period().unwrap();
        let run = OdeRun { t_end, steps: 8192 };
        let traj = rk4_moments(&sys, seed(&map, &m_in), &run).unwrap();
        let mut dev: f64 = 0.0;
        for (t, y) in traj.iter().skip(1) {
            let a = electrostatic_rms(&m_in, &e, eprime, *t).unwrap();
            dev = dev.max(rel(a.rho2, y[0]));
        }
        out.push(check(
            "elements/electrostatic vs moment integration",
            dev,
            1e-8,
        ));
    }

    // Crossed lens, oscillatory and hyperbolic branches.
    for (label, h, eprime) in [("focusing", 0.5, 1e7), ("defocusing", 0.02, -5e8)] {
        let map = ElementMap::from_entry(&m_in, &e, h, eprime).unwrap();
        let sys = MomentSystem::crossed(&e, h, eprime, m_in.ell);
        let t_end = 2.0 * map.period().unwrap();
        let run = OdeRun { t_end, steps: 8192 };
        let traj = rk4_moments(&sys, seed(&map, &m_in), &run).unwrap();
        let mut dev: f64 = 0.0;
        for (t, y) in traj.iter().skip(1) {
            let a = crossed_rms(&m_in, &e, h, eprime, *t).unwrap();
            dev = dev.max(rel(a.rho2, y[0]));
        }
        let tol = if label == "focusing" { 1e-8 } else { 1e-6 };
        out.push(check(
            format!("elements/crossed ({label}) vs moment integration"),
            dev,
            tol,
        ));
    }

    // Limit web: crossed(H, 0) = solenoid(H), crossed(0, E') = lens(E').
    {
        let tc = FieldScales::for_field(&e, 0.5).unwrap().period;
        let mut dev: f64 = 0.0;
        for f in [0.2, 0.9, 1.7] {
            let t = f * tc;
            let a = crossed_rms(&m_in, &e, 0.5, 0.0, t).unwrap();
            let b = solenoid_rms(&m_in, &e, 0.5, t).unwrap();
            dev = dev.max(rel(a.rho2, b.rho2)).max(rel(a.uperp2, b.uperp2));
            let c1 = crossed_rms(&m_in, &e, 0.0, 1e8, t).unwrap();
            let c2 = electrostatic_rms(&m_in, &e, 1e8, t).unwrap();
            dev = dev.max(rel(c1.rho2, c2.rho2));
        }
        out.push(check("elements/limit web", dev, 1e-12));
    }

    // Thick lens: time average over one period equals the stationary value.
    {
        let map = ElementMap::from_entry(&m_in, &e, 1.0, 0.0).unwrap();
        let tc = map.period().unwrap();
        let n = 4096;
        let mut mean = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) / n as f64 * tc;
            mean += solenoid_rms(&m_in, &e, 1.0, t).unwrap().rho2;
        }
        mean /= n as f64;
        out.push(check(
            "elements/thick-lens average vs stationary",
            rel(mean, map.center().unwrap()),
            1e-10,
        ));
    }
    out
}

/// Lorentz-force integration against the closed-form helix.
pub fn classical_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let e = electron();
    let h = 0.7;
    let tc = FieldScales::for_field(&e, h).unwrap().period;
    let init = ClassicalState::new([1e-6, -2e-6, 0.0], [0.008, 0.002, 0.03], 0.0).unwrap();
    let traj = lorentz_orbit(&init, &e, h, tc, tc / 2000.0).unwrap();
    let end = traj.last().unwrap();
    let scale = 1e-5;
    let closure = ((end.position[0] - init.position[0]).abs()
        + (end.position[1] - init.position[1]).abs())
        / scale;
    out.push(check("classical/period closure", closure, 1e-8));

    let mut dev: f64 = 0.0;
    for k in [300usize, 900, 1500] {
        let cf = classical_orbit(&init, &e, h, traj[k].time).unwrap();
        for i in 0..2 {
            dev = dev.max((traj[k].position[i] - cf.position[i]).abs() / scale);
        }
    }
    out.push(check("classical/closed form vs integration", dev, 1e-8));

    let want = orbit_invariants(&init, &e, h).unwrap();
    let mut dev: f64 = 0.0;
    for k in [250usize, 800, 1900] {
        let inv = orbit_invariants(&traj[k], &e, h).unwrap();
        dev = dev.max(rel(inv.action, want.action));
    }
    out.push(check("classical/invariants along orbit", dev, 1e-8));

    let mut dev: f64 = 0.0;
    let s0: f64 = init.velocity.iter().map(|u| u * u).sum();
    for st in traj.iter().step_by(50) {
        let s: f64 = st.velocity.iter().map(|u| u * u).sum();
        dev = dev.max(rel(s, s0));
    }
    out.push(check("classical/speed conservation", dev, 1e-10));
    out
}

pub fn run_suite(which: &str) -> Result<Vec<Check>, String> {
    let mut checks = Vec::new();
    match which {
        "all" => {
            checks.extend(packets_suite());
            checks.extend(elements_suite());
            checks.extend(classical_suite());
        }
        "packets" => checks.extend(packets_suite()),
        "elements" => checks.extend(elements_suite()),
        "classical" => checks.extend(classical_suite()),
        other => {
            return Err(format!(
                "unknown suite `{other}` (all, packets, elements, classical)"
            ))
        }
    }
    Ok(checks)
}
