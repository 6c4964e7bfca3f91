use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use isopoly_core::dieudonne::worked_split;
use isopoly_core::hnfilt::{self, simulate_torsion_split};
use isopoly_core::isoc::charpoly_newton;
use isopoly_core::polycalc::ConcavePolygon;
use isopoly_core::rational::rat;
use isopoly_core::sampling::{
    instance_rng, random_inner_quotient, random_isocrystal, random_polygon, random_torsion_profile, random_wa_instance,
    tower_catalogue,
};

fn polygon_calculus(c: &mut Criterion) {
    let polys: Vec<ConcavePolygon> = (0..64).map(|i| random_polygon(&mut instance_rng(1, i), 8)).collect();
    c.bench_function("dual and order on 64 polygons", |b| {
        b.iter(|| polys.iter().filter(|p| p.dual().dual().leq(p).unwrap_or(false)).count())
    });
    let points: Vec<_> = (0..40).map(|i| (rat(i, 3), rat(i * (40 - i), 7))).collect();
    c.bench_function("concave envelope of 40 points", |b| b.iter(|| ConcavePolygon::concave_envelope(&points)));
}

fn objects(c: &mut Criterion) {
    c.bench_function("HN polygon of a random weakly admissible object", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                random_wa_instance(&mut instance_rng(2, i), 6).unwrap().object
            },
            |obj| obj.inequality_chain().unwrap(),
            BatchSize::SmallInput,
        )
    });
    let obj = worked_split(3).unwrap().to_filtered_isocrystal().unwrap();
    let z = (rat(1, 1), rat(1, 1));
    c.bench_function("split of the worked example", |b| b.iter(|| hnfilt::reduce(&obj, &z, None).unwrap()));
}

fn torsion(c: &mut Criterion) {
    let towers = tower_catalogue().unwrap();
    let quotients: Vec<_> = (0..16).map(|i| random_inner_quotient(&mut instance_rng(3, i), &towers).unwrap()).collect();
    c.bench_function("eigen-part lengths of 16 modules", |b| {
        b.iter(|| quotients.iter().map(|q| q.all_subsets().unwrap().len()).sum::<usize>())
    });
    let profile = random_torsion_profile(&mut instance_rng(4, 0), 10).unwrap();
    c.bench_function("torsion simulation at depth 10", |b| {
        b.iter(|| simulate_torsion_split(&profile.profile, &profile.z).unwrap())
    });
}

fn isocrystals(c: &mut Criterion) {
    let ms: Vec<_> = (0..32).map(|i| random_isocrystal(&mut instance_rng(5, i), 3, 6).unwrap()).collect();
    c.bench_function("charpoly Newton polygons of 32 isocrystals", |b| {
        b.iter(|| ms.iter().map(|m| charpoly_newton(&m.matrix(), 3, m.residue_degree()).unwrap().len()).sum::<usize>())
    });
}

criterion_group!(benches, polygon_calculus, objects, torsion, isocrystals);
criterion_main!(benches);
