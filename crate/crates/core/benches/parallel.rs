use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use civicroute::metrics::{self, FoodDesertParams};
use civicroute::scenario::build_grid;
use civicroute::spatial::{self, Bounds, Generator};
use civicroute::{
    CostContext, DistributionKind, EdgeCostModel, Execution, PollutionParams, SimConfig,
    Simulation, TripDemand, WearParams, World,
};

fn world(side: usize) -> World {
    let extent = (side - 1) as f64 * 100.0;
    let bounds = Bounds::from([0.0, 0.0, extent, extent]);
    let gen = |kind, count, seed| {
        spatial::generate(kind, &Generator::UniformInBounds { bounds, count }, None, seed).unwrap()
    };
    World {
        network: build_grid(side, side, 100.0, 10.0).unwrap(),
        housing: gen(DistributionKind::Housing, 200, 1),
        good_food: gen(DistributionKind::GoodFood, 6, 2),
        bad_food: gen(DistributionKind::BadFood, 12, 3),
        population: gen(DistributionKind::Population, 1000, 4),
    }
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn exposures(c: &mut Criterion) {
    let w = world(20);
    let params = PollutionParams::default();
    let mut group = c.benchmark_group("segment_exposures");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| metrics::segment_exposures(&w.network, &w.population, &params, exec))
        });
    }
    group.finish();
}

fn eta(c: &mut Criterion) {
    let w = world(20);
    let params = FoodDesertParams::default();
    let mut group = c.benchmark_group("eta");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                metrics::eta(
                    &w.network,
                    &EdgeCostModel::WearInverse,
                    CostContext::new(1.0),
                    &w.housing,
                    &w.good_food,
                    &w.bad_food,
                    &params,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn epoch(c: &mut Criterion) {
    let config = SimConfig {
        model: EdgeCostModel::PollutionExposure,
        wear: WearParams::default(),
        food: FoodDesertParams::default(),
        pollution: PollutionParams::default(),
        demand: TripDemand::default(),
        seed: 11,
    };
    let mut group = c.benchmark_group("simulation_epoch");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                || Simulation::with_execution(world(15), config, exec).unwrap(),
                |mut sim| sim.run_epoch().unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, exposures, eta, epoch);
criterion_main!(benches);
