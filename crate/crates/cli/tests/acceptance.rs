//! Acceptance suite: one pass/fail line per criterion, printed in order.
//!
//! Run with `cargo test -p isopoly-cli --test acceptance -- --nocapture` to see the report.

use std::process::Command;
use std::time::{Duration, Instant};

use isopoly_core::dieudonne::{hodge_unramified, ramified_lift_pair, unramified_isogeny};
use isopoly_core::dvrmod::{component_length_check, non_inner_element_demo};
use isopoly_core::filisoc::mask_of;
use isopoly_core::hnfilt::{
    self, check_first_level_below_hodge, check_torsion_profile, polygons_of, simulate_torsion_split,
};
use isopoly_core::isoc::charpoly_newton;
use isopoly_core::polycalc::NewtonVector;
use isopoly_core::rational::{from_usize, rat};
use isopoly_core::sampling::{
    instance_rng, random_hodge_above, random_inner_quotient, random_isocrystal, random_polarised_instance,
    random_polygon, random_reducible_instance, random_torsion_profile, random_wa_instance, tower_catalogue,
    violation_fixtures,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nv(s: &str) -> NewtonVector {
    s.parse().unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn ramified_pair() -> Outcome {
    let start = Instant::now();
    let pair = ramified_lift_pair(3).map_err(|e| e.to_string())?;
    ensure(pair.same_eigenvalue.same_reduction(&pair.mixed_eigenvalues).unwrap(), || "reductions differ".into())?;
    let h0 = pair.same_eigenvalue.to_filtered_isocrystal().unwrap().hodge().unwrap();
    let h1 = pair.mixed_eigenvalues.to_filtered_isocrystal().unwrap().hodge().unwrap();
    ensure(h0 == nv("(1/2,1/2)"), || format!("Hdg H0 = {h0}"))?;
    ensure(h1 == nv("(1,0)"), || format!("Hdg H1 = {h1}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("equal reductions, Hdg {h0} and {h1}, {took:?}"))
}

fn unramified_pair() -> Outcome {
    let start = Instant::now();
    let iso = unramified_isogeny(3).map_err(|e| e.to_string())?;
    let big = hodge_unramified(iso.larger.lattice(), 2).unwrap();
    let small = hodge_unramified(iso.smaller.lattice(), 2).unwrap();
    ensure(big == nv("(1,0)"), || format!("Hdg of the larger lattice = {big}"))?;
    ensure(small == nv("(1/2,1/2)"), || format!("Hdg of the sublattice = {small}"))?;
    let report = component_length_check(&iso.cokernel_components().unwrap());
    ensure(report.lengths == [0, 1], || format!("component lengths {:?}", report.lengths))?;
    ensure(!report.constant, || "non-constant lengths were not flagged".into())?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("Hdg {big} and {small}, lengths (0,1) flagged, {took:?}"))
}

fn non_inner_element() -> Outcome {
    for p in [3, 5, 7, 11] {
        let demo = non_inner_element_demo(p).map_err(|e| e.to_string())?;
        ensure(demo.images == ["2*w", "0"], || format!("p = {p}: images {:?}", demo.images))?;
        ensure(demo.valuations == [Some(rat(1, 2)), None], || format!("p = {p}: valuations {:?}", demo.valuations))?;
    }
    Ok("images 2√p and 0 with valuations 1/2 and infinity for p = 3, 5, 7, 11".into())
}

fn chain_campaign() -> Outcome {
    const COUNT: u64 = 1000;
    let start = Instant::now();
    let (mut profile_tier, mut max_n) = (0, 0);
    for i in 0..COUNT {
        let inst = random_wa_instance(&mut instance_rng(4, i), 6).map_err(|e| format!("instance {i}: {e}"))?;
        let chain = inst.object.inequality_chain().unwrap();
        ensure(chain.holds(), || format!("instance {i}: HN {} Newt {} Hdg {}", chain.hn, chain.newt, chain.hdg))?;
        ensure(inst.object.d() <= 4, || format!("instance {i}: d > 4"))?;
        profile_tier += u64::from(inst.profile_tier);
        max_n = max_n.max(inst.object.n());
    }
    ensure(max_n <= 6, || format!("n = {max_n}"))?;
    ensure(profile_tier > 0 && profile_tier < COUNT, || "both tiers must appear".into())?;
    let took = within(Duration::from_secs(60), start)?;
    Ok(format!("{COUNT}/{COUNT}, {profile_tier} on the profile tier, {took:?}"))
}

fn split_campaign() -> Outcome {
    const COUNT: u64 = 200;
    for i in 0..COUNT {
        let inst = random_reducible_instance(&mut instance_rng(5, i)).map_err(|e| format!("instance {i}: {e}"))?;
        let cert = hnfilt::reduce(&inst.object, &inst.z, None).map_err(|e| format!("instance {i}: {e}"))?;
        let mask = mask_of(&cert.split.slots);
        let (sub, quot) = (inst.object.restrict(mask).unwrap(), inst.object.quotient(mask).unwrap());
        ensure(polygons_of(&sub).unwrap() == cert.split.sub, || format!("instance {i}: sub polygons"))?;
        ensure(polygons_of(&quot).unwrap() == cert.split.quotient, || format!("instance {i}: quotient polygons"))?;
        ensure(cert.split.parts_match().unwrap(), || format!("instance {i}: restrictions"))?;
        ensure(cert.split.reassembles().unwrap(), || format!("instance {i}: reassembly"))?;
        ensure(sub.is_weakly_admissible().unwrap(), || format!("instance {i}: sub not weakly admissible"))?;
        ensure(quot.is_weakly_admissible().unwrap(), || format!("instance {i}: quotient not weakly admissible"))?;
    }
    Ok(format!("{COUNT}/{COUNT} splits recomputed from the parts"))
}

fn duality_suite() -> Outcome {
    const POLYGONS: u64 = 10_000;
    const POLARISED: u64 = 60;
    for i in 0..POLYGONS {
        let p = random_polygon(&mut instance_rng(6, i), 6);
        ensure(p.dual().dual() == p, || format!("polygon {p}"))?;
    }
    for i in 0..POLARISED {
        let inst = random_polarised_instance(&mut instance_rng(7, i)).map_err(|e| format!("instance {i}: {e}"))?;
        let report = inst.model.duality_check(true).unwrap();
        ensure(report.holds() && report.symmetric == Some(true), || format!("instance {i}: polygons not symmetric"))?;
        let obj = inst.model.to_filtered_isocrystal().unwrap();
        let split = hnfilt::polarised_split(&obj, &inst.z).map_err(|e| format!("instance {i}: {e}"))?;
        let dual = split.first.dual();
        ensure(split.last.newt == dual.newt, || format!("instance {i}: Newt\n{split}"))?;
        ensure(split.last.hdg == dual.hdg, || format!("instance {i}: Hdg\n{split}"))?;
        ensure(split.last.hn == dual.hn, || format!("instance {i}: HN\n{split}"))?;
    }
    Ok(format!("{POLYGONS} involutions, {POLARISED} polarised three-part splits"))
}

fn eigen_lengths() -> Outcome {
    const COUNT: u64 = 100;
    let towers = tower_catalogue().unwrap();
    let mut subsets = 0;
    for i in 0..COUNT {
        let q = random_inner_quotient(&mut instance_rng(8, i), &towers).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(q.tower().outer().e() <= 4, || format!("instance {i}: degree {}", q.tower().outer().e()))?;
        ensure(q.divisors().len() <= 3, || format!("instance {i}: rank {}", q.divisors().len()))?;
        for l in q.all_subsets().unwrap() {
            ensure(l.agrees(), || format!("instance {i}: {l:?}"))?;
            subsets += 1;
        }
    }
    Ok(format!("{COUNT}/{COUNT} modules, {subsets} subsets, all three routes agree"))
}

fn simulation() -> Outcome {
    const COUNT: u64 = 60;
    for i in 0..COUNT {
        let depth = 8 + (i % 5) as u32;
        let sp = random_torsion_profile(&mut instance_rng(9, i), depth).map_err(|e| format!("instance {i}: {e}"))?;
        let trace = simulate_torsion_split(&sp.profile, &sp.z).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(trace.increments.windows(2).all(|w| w[0] >= w[1]), || format!("instance {i}: {:?}", trace.increments))?;
        ensure(trace.stable_from < depth, || format!("instance {i}: never stabilized"))?;
        let d = from_usize(sp.profile.d() as usize);
        let expected = (&d * &sp.z.0, &d * &sp.z.1);
        ensure(sp.expected == expected, || format!("instance {i}: generator expectation"))?;
        ensure(trace.answer == expected, || format!("instance {i}:\n{trace}"))?;
    }
    Ok(format!("{COUNT}/{COUNT} profiles of depth 8 to 12 give d·z"))
}

fn profile_checks() -> Outcome {
    const VALID: u64 = 100;
    for i in 0..VALID {
        let rng = &mut instance_rng(10, i);
        let sp = random_torsion_profile(rng, 8).map_err(|e| format!("instance {i}: {e}"))?;
        let hodge = random_hodge_above(rng, sp.profile.first_level()).unwrap();
        ensure(check_torsion_profile(&sp.profile).unwrap().holds(), || format!("valid profile {i} rejected"))?;
        ensure(check_first_level_below_hodge(&sp.profile, &hodge).unwrap().holds(), || {
            format!("valid profile {i} rejected against {hodge}")
        })?;
    }
    let fixtures = violation_fixtures().unwrap();
    ensure(fixtures.len() >= 5, || format!("{} fixtures", fixtures.len()))?;
    for fx in &fixtures {
        let report = match &fx.hodge {
            Some(h) => check_first_level_below_hodge(&fx.profile, h).unwrap(),
            None => check_torsion_profile(&fx.profile).unwrap(),
        };
        let first = report.first().ok_or_else(|| format!("{} passed", fx.name))?;
        ensure(first.kind == fx.kind && first.abscissa == fx.abscissa, || format!("{}: got {first}", fx.name))?;
    }
    Ok(format!("{VALID} valid profiles pass, {} fixtures fail at the expected abscissa", fixtures.len()))
}

fn charpoly() -> Outcome {
    const COUNT: u64 = 100;
    let mut seen = [0u32; 3];
    for i in 0..COUNT {
        let p = [2, 3, 5, 7][(i % 4) as usize];
        let m = random_isocrystal(&mut instance_rng(11, i), p, 6).map_err(|e| format!("instance {i}: {e}"))?;
        let route = charpoly_newton(&m.matrix(), p, m.residue_degree()).unwrap();
        ensure(route == m.newton_polygon(), || format!("instance {i}: {route} vs {}", m.newton_polygon()))?;
        seen[m.residue_degree() as usize - 1] += 1;
    }
    ensure(seen.iter().all(|&c| c > 0), || format!("residue degrees seen {seen:?}"))?;
    Ok(format!("{COUNT}/{COUNT}, f = 1, 2, 3 seen {seen:?} times"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_isopoly"))
            .args(["fuzz", "chain", "--count", "100", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || format!("exit {:?} and {:?}", a.status, b.status))?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    let first = String::from_utf8_lossy(&a.stdout);
    Ok(format!("byte-identical: {}", first.trim()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("ramified lift pair golden values", ramified_pair),
        ("unramified isogeny golden values", unramified_pair),
        ("element outside the inner ring", non_inner_element),
        ("HN ≤ Newt ≤ Hdg campaign", chain_campaign),
        ("split correctness", split_campaign),
        ("duality suite", duality_suite),
        ("eigen-part length identity", eigen_lengths),
        ("torsion simulation", simulation),
        ("torsion profile checks", profile_checks),
        ("charpoly oracle agreement", charpoly),
        ("CLI determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let n = k + 1;
        match check() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                println!("criterion {n:>2} FAIL  {name}: {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
