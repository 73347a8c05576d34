use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hexsim_core::sim::{run_script, RunOptions, Script};
use hexsim_core::{Command, World};

fn tick(c: &mut Criterion) {
    let mut world = World::default();
    world.apply(Command::Forward);
    let dt = world.default_dt();
    c.bench_function("world_tick", |b| {
        b.iter(|| world.tick(black_box(dt)).unwrap())
    });
}

fn script(c: &mut Criterion) {
    let script: Script = "0 F\n60 L\n120 B\n180 S\n".parse().unwrap();
    c.bench_function("run_script_4_cycles", |b| {
        b.iter_batched(
            World::default,
            |mut w| {
                let opts = RunOptions::for_world(&w, 4.0 * w.period());
                run_script(&mut w, &script, opts).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, tick, script);
criterion_main!(benches);
