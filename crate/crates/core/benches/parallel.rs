use std::f64::consts::FRAC_PI_4;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optomech::cli::{shift_vs_eta_points, DEFAULT_PHASES};
use optomech::config::load_config;
use optomech::constants::hz_to_rad;
use optomech::exec::Exec;
use optomech::params::{default_rb87_params, EnsembleConfig, ProbeDrive, System};
use optomech::steady_state::{
    bistability_region, detuning_grid, sweep_lineshape, Chirp, FixedPointSolver, SolverOptions,
};

fn bistable_system() -> System {
    let p = default_rb87_params();
    let e = EnsembleConfig::new(&p, 5400.0, FRAC_PI_4, hz_to_rad(32e3))
        .unwrap()
        .with_sigma_spread(400e-9)
        .unwrap();
    let d = ProbeDrive::new(hz_to_rad(-14e9), 0.0, 2.0).unwrap();
    System::new(p, e, d).unwrap()
}

fn options(exec: Exec) -> SolverOptions {
    SolverOptions {
        exec,
        ..SolverOptions::default()
    }
}

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn bench_solver(c: &mut Criterion) {
    let sys = bistable_system();
    let k = sys.params.kappa;
    let centre = FixedPointSolver::new(&sys, &SolverOptions::default())
        .unwrap()
        .map()
        .shift(0.0);
    let range = (centre - 15.0 * k, centre + 15.0 * k);

    let mut group = c.benchmark_group("fixed_point_table");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| FixedPointSolver::new(black_box(&sys), &options(exec)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("bistability_region");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| bistability_region(black_box(&sys), range, &options(exec)).unwrap())
        });
    }
    group.finish();

    let grid = detuning_grid(range.0, range.1, 401, Chirp::Positive);
    let mut group = c.benchmark_group("sweep_lineshape");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sweep_lineshape(black_box(&sys), &grid, Chirp::Positive, &options(exec)).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_eta(c: &mut Criterion) {
    let base = "n_atoms = 5400\nomega_z_hz = 32e3\ndelta_ca_hz = -8e9\nsigma_spread_m = 400e-9\n";
    let mut group = c.benchmark_group("shift_vs_eta");
    for (name, exec) in MODES {
        let mut cfg = load_config(base).unwrap();
        cfg.run.solver.exec = exec;
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| shift_vs_eta_points(black_box(&cfg), None, 2001, &DEFAULT_PHASES).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solver, bench_eta);
criterion_main!(benches);
