//! Seeded randomized campaigns. Instance `i` draws from its own stream of the
//! master seed, so results do not depend on scheduling.

use std::sync::OnceLock;

use clap::ValueEnum;
use isopoly_core::dvrmod::RamifiedTower;
use isopoly_core::filisoc::mask_of;
use isopoly_core::hnfilt::{self, check_first_level_below_hodge, check_torsion_profile, simulate_torsion_split};
use isopoly_core::isoc::charpoly_newton;
use isopoly_core::polycalc::fmt_point;
use isopoly_core::sampling::{
    instance_rng, random_hodge_above, random_inner_quotient, random_isocrystal, random_lift, random_polarised_instance,
    random_polygon, random_reducible_instance, random_torsion_profile, random_wa_instance, tower_catalogue, LiftShape,
};
use isopoly_core::Result;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Campaign {
    /// HN ≤ Newt ≤ Hdg on weakly admissible objects.
    Chain,
    /// Random models are weakly admissible with t_N = t_H = −dim.
    Wa,
    /// Splits at touching points match the parts and reassemble.
    Split,
    /// Polarised three-part splits are self-dual.
    Polarised,
    /// Polygon duality and model duality.
    Duality,
    /// Eigen-part lengths of torsion modules.
    #[value(name = "lemma2_12")]
    EigenLengths,
    /// Synthetic torsion profiles pass the profile checks.
    #[value(name = "prop2_8")]
    Profiles,
    /// First levels below generated Hodge polygons pass.
    #[value(name = "prop2_14")]
    FirstLevel,
    /// The torsion simulation recovers the designated point.
    Simulate,
    /// Newton polygons agree with the characteristic-polynomial route.
    Charpoly,
}

impl Campaign {
    pub fn label(self) -> &'static str {
        match self {
            Campaign::Chain => "HN ≤ Newt ≤ Hdg",
            Campaign::Wa => "weakly admissible models",
            Campaign::Split => "split parts",
            Campaign::Polarised => "polarised splits",
            Campaign::Duality => "duality",
            Campaign::EigenLengths => "eigen-part lengths",
            Campaign::Profiles => "torsion profile checks",
            Campaign::FirstLevel => "first level below Hodge",
            Campaign::Simulate => "torsion simulation",
            Campaign::Charpoly => "charpoly Newton polygons",
        }
    }
}

pub struct Tally {
    pub count: u64,
    pub passed: u64,
    /// Lowest failing instance index with its reason.
    pub first_failure: Option<(u64, String)>,
}

impl Tally {
    pub fn all_passed(&self) -> bool {
        self.passed == self.count
    }
}

fn towers() -> &'static [RamifiedTower] {
    static TOWERS: OnceLock<Vec<RamifiedTower>> = OnceLock::new();
    TOWERS.get_or_init(|| tower_catalogue().expect("catalogue towers are valid"))
}

fn verdict(ok: bool, reason: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(reason)
}

/// `None` when instance `index` passes.
fn instance(campaign: Campaign, seed: u64, index: u64) -> Result<Option<String>> {
    let rng = &mut instance_rng(seed, index);
    Ok(match campaign {
        Campaign::Chain => {
            let inst = random_wa_instance(rng, 6)?;
            let chain = inst.object.inequality_chain()?;
            verdict(chain.holds(), || format!("HN {} Newt {} Hdg {}", chain.hn, chain.newt, chain.hdg))
        }
        Campaign::Wa => {
            let shape = LiftShape::random(rng, 6);
            let report = random_lift(rng, &shape)?.verify_wa()?;
            verdict(report.holds(), || {
                format!("dim {} t_N {} t_H {}", report.dimension, report.t_newton, report.t_hodge)
            })
        }
        Campaign::Split => {
            let inst = random_reducible_instance(rng)?;
            let cert = hnfilt::reduce(&inst.object, &inst.z, None)?;
            let mask = mask_of(&cert.split.slots);
            let ok = cert.split.parts_match()?
                && cert.split.reassembles()?
                && cert.parts_satisfy_chain()?
                && inst.object.restrict(mask)?.is_weakly_admissible()?
                && inst.object.quotient(mask)?.is_weakly_admissible()?;
            verdict(ok, || format!("split at {}:\n{}", fmt_point(&inst.z), cert.split))
        }
        Campaign::Polarised => {
            let inst = random_polarised_instance(rng)?;
            let report = inst.model.duality_check(true)?;
            let split = hnfilt::polarised_split(&inst.model.to_filtered_isocrystal()?, &inst.z)?;
            verdict(report.holds() && split.duality_holds(), || split.to_string())
        }
        Campaign::Duality => {
            let poly = random_polygon(rng, 6);
            let shape = LiftShape::random(rng, 4);
            let report = random_lift(rng, &shape)?.duality_check(false)?;
            let involution = poly.dual().dual() == poly;
            verdict(involution && report.holds(), || format!("polygon {poly}, model duality {}", report.holds()))
        }
        Campaign::EigenLengths => {
            let q = random_inner_quotient(rng, towers())?;
            let bad = q.all_subsets()?.into_iter().find(|l| !l.agrees());
            bad.map(|l| format!("{l:?}"))
        }
        Campaign::Profiles => {
            let sp = random_torsion_profile(rng, 8)?;
            let report = check_torsion_profile(&sp.profile)?;
            verdict(report.holds(), || report.first().map_or(String::new(), ToString::to_string))
        }
        Campaign::FirstLevel => {
            let sp = random_torsion_profile(rng, 8)?;
            let hodge = random_hodge_above(rng, sp.profile.first_level())?;
            let report = check_first_level_below_hodge(&sp.profile, &hodge)?;
            verdict(report.holds(), || report.first().map_or(String::new(), ToString::to_string))
        }
        Campaign::Simulate => {
            let depth = 8 + (index % 5) as u32;
            let sp = random_torsion_profile(rng, depth)?;
            let trace = simulate_torsion_split(&sp.profile, &sp.z)?;
            verdict(trace.answer == sp.expected, || trace.to_string())
        }
        Campaign::Charpoly => {
            let p = [2, 3, 5, 7][(index % 4) as usize];
            let m = random_isocrystal(rng, p, 6)?;
            let route = charpoly_newton(&m.matrix(), p, m.residue_degree())?;
            verdict(route == m.newton_polygon(), || format!("{m}charpoly gives {route}"))
        }
    })
}

pub fn run(campaign: Campaign, count: u64, seed: u64) -> Tally {
    let outcomes: Vec<Option<String>> = (0..count)
        .into_par_iter()
        .map(|i| instance(campaign, seed, i).unwrap_or_else(|e| Some(e.to_string())))
        .collect();
    let passed = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let first_failure = outcomes.into_iter().enumerate().find_map(|(i, o)| o.map(|r| (i as u64, r)));
    Tally { count, passed, first_failure }
}
