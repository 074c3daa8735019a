//! Hot-path benchmarks: wavefunction grid sampling (the oracle's cost
//! driver), element-map evaluation (the transport inner loop), and the
//! fixed-step moment integrator.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use twistline_core::constants::ParticleSpecies;
use twistline_core::elements::ElementMap;
use twistline_core::lattice::{parse_lattice, transport};
use twistline_core::oracle::{grid_moments_2d, rk4_moments, Grid2d, MomentSystem, OdeRun, Stencil};
use twistline_core::packets::wavefn::eval_transverse_dimensionless;
use twistline_core::packets::{moments_transverse, PacketSpec};

fn electron() -> ParticleSpecies {
    ParticleSpecies::by_name("electron").unwrap()
}

fn bench_wavefunction_grid(c: &mut Criterion) {
    let spec = PacketSpec::standard_lg(electron(), 2, 3, 1e-9, 0.0).unwrap();
    let grid = Grid2d::for_rms(8f64.sqrt(), 256).unwrap();
    c.bench_function("wavefn/lg_sample_256sq", |b| {
        b.iter(|| {
            let s = grid
                .sample(|x, y| eval_transverse_dimensionless(black_box(&spec), x, y, 0.7).unwrap());
            black_box(s.len())
        })
    });
    let samples = grid.sample(|x, y| eval_transverse_dimensionless(&spec, x, y, 0.7).unwrap());
    c.bench_function("oracle/grid_moments_256sq", |b| {
        b.iter(|| grid_moments_2d(black_box(&samples), &grid, Stencil::Order4).unwrap())
    });
}

fn bench_element_map(c: &mut Criterion) {
    let e = electron();
    let spec = PacketSpec::standard_lg(e.clone(), 1, 2, 20e-9, 1e5).unwrap();
    let m = moments_transverse(&spec, 0.0).unwrap();
    let map = ElementMap::from_entry(&m, &e, 1.0, 0.0).unwrap();
    c.bench_function("elements/map_eval", |b| {
        let mut t = 0.0;
        b.iter(|| {
            t += 1e-13;
            black_box(map.eval(&m, t).unwrap().rho2)
        })
    });
    let lat = parse_lattice(
        "species electron\npacket lg-standard n=0 l=3 sigma=10nm p=100keV\ndrift L=1mm\nsolenoid H=1T L=5cm\nlens Eprime=-2e8V/m2 L=2cm\ndrift L=1mm\nsamples 64\n",
    )
    .unwrap();
    c.bench_function("lattice/transport_64_samples", |b| {
        b.iter(|| black_box(transport(&lat).unwrap().len()))
    });
}

fn bench_integrator(c: &mut Criterion) {
    let e = electron();
    let sys = MomentSystem::solenoid(&e, 1.0, 2.0);
    let tc = std::f64::consts::TAU / sys.omega_c.abs();
    let y0 = [4e-16, 0.0, 5e-1];
    c.bench_function("oracle/rk4_two_periods_8192", |b| {
        b.iter(|| {
            rk4_moments(
                black_box(&sys),
                y0,
                &OdeRun {
                    t_end: 2.0 * tc,
                    steps: 8192,
                },
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_wavefunction_grid,
    bench_element_map,
    bench_integrator
);
criterion_main!(benches);
