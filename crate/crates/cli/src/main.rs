//! `isopoly`: Newton, Hodge and Harder-Narasimhan polygons from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input errors.

mod campaigns;
mod inputs;
mod render;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use isopoly_core::dieudonne::{unramified_isogeny, DieudonneLift};
use isopoly_core::dvrmod::component_length_check;
use isopoly_core::filisoc::{one_based, FilteredIsocrystalCx};
use isopoly_core::format::{self, Loaded};
use isopoly_core::hnfilt::{
    self, check_first_level_below_hodge, check_torsion_profile, simulate_torsion_split, touching_points, ProfileReport,
    TorsionProfile,
};
use isopoly_core::polycalc::{self, fmt_point, parse_point, ConcavePolygon, NewtonVector, Point};
use isopoly_core::rational::{int, parse_rational};
use isopoly_core::{Error, PolygonTriple};

use campaigns::Campaign;
use inputs::{Builtin, BuiltinKind};

#[derive(Parser)]
#[command(
    name = "isopoly",
    version,
    about = "Exact Newton, Hodge and HN polygons of filtered isocrystals and p-divisible group models"
)]
struct Cli {
    /// Output format for commands that produce polygons.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Ascii,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Newt, Hdg and HN of an object or model; the levels of a torsion profile.
    Invariants {
        /// A TOML file or the name of a built-in example.
        input: String,
    },
    /// Operations on polygons given as "(x1,y1);(x2,y2);..." or as Newton vectors "(a1,...,an)".
    Polygon {
        #[command(subcommand)]
        op: PolygonOp,
    },
    /// Split an object or model at a touching point of Newt and Hdg.
    Reduce {
        input: String,
        /// The point; candidates are listed when omitted.
        #[arg(long)]
        z: Option<String>,
        /// Torsion profile for certifying that z lies on the first level.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Three-part split of a polarised object at z and its dual point.
    #[command(name = "polarised-reduce")]
    PolarisedReduce {
        input: String,
        #[arg(long)]
        z: String,
    },
    /// Recover the height and dimension of the sub-group at z from a torsion profile.
    #[command(name = "simulate-3-2")]
    Simulate {
        input: String,
        #[arg(long)]
        z: String,
    },
    /// Run one check on an input, or a seeded campaign when no input is given.
    Check {
        which: CheckKind,
        input: Option<String>,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hodge polygon for `prop2_14` when the profile does not carry one.
        #[arg(long)]
        hodge: Option<String>,
        /// Also require symmetric polygons in `duality`.
        #[arg(long)]
        polarised: bool,
        /// Component lengths for `lemma2_10`, e.g. "1,1"; defaults to the built-in isogeny.
        #[arg(long)]
        lengths: Option<String>,
    },
    /// List the built-in examples, or print one as a TOML document.
    Examples {
        name: Option<String>,
        /// Prime for report examples.
        #[arg(long, default_value_t = inputs::EXAMPLE_PRIME)]
        p: u64,
    },
    /// Seeded randomized property campaign.
    Fuzz {
        campaign: Campaign,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Wa,
    Chain,
    #[value(name = "prop2_8")]
    Profile,
    #[value(name = "prop2_14")]
    FirstLevel,
    #[value(name = "lemma2_12")]
    EigenLengths,
    #[value(name = "lemma2_10")]
    ComponentLengths,
    Duality,
}

#[derive(Subcommand)]
enum PolygonOp {
    Show {
        polygon: String,
    },
    Dual {
        polygon: String,
    },
    /// Whether the first polygon lies below the second with the same end point.
    Leq {
        lower: String,
        upper: String,
    },
    /// Concave envelope of "(x1,y1);(x2,y2);..." together with the origin.
    Envelope {
        points: String,
    },
    /// Positional average of Newton vectors of equal length.
    Average {
        #[arg(required = true)]
        vectors: Vec<String>,
    },
    /// Break points of Newt lying on Hdg.
    Touching {
        newt: String,
        hdg: String,
    },
    /// x ↦ P(d x)/d.
    Rescale {
        polygon: String,
        d: u64,
    },
    Restrict {
        polygon: String,
        x: String,
    },
}

/// Outcome of a command that ran to completion.
type Passed = bool;

fn parse_polygon(s: &str) -> Result<ConcavePolygon> {
    if s.contains(';') {
        Ok(s.parse::<ConcavePolygon>()?)
    } else {
        Ok(s.parse::<NewtonVector>()?.to_polygon())
    }
}

fn parse_z(s: &str) -> Result<Point> {
    parse_point(s).with_context(|| format!("--z {s}"))
}

fn emit(format: Format, text: &str, polys: &[(&str, &ConcavePolygon)]) {
    match format {
        Format::Text => print!("{text}"),
        Format::Ascii => print!("{text}{}", render::ascii(polys)),
        Format::Svg => print!("{}", render::svg(polys)),
    }
}

fn emit_triple(format: Format, text: &str, t: &PolygonTriple) {
    emit(format, text, &[("Newt", &t.newt), ("Hdg", &t.hdg), ("HN", &t.hn)]);
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn object_of(loaded: Loaded) -> Result<FilteredIsocrystalCx> {
    match loaded {
        Loaded::Object(obj) => Ok(obj),
        Loaded::Model(m) => Ok(m.to_filtered_isocrystal()?),
        Loaded::Profile { .. } => bail!("expected an object or model, got a torsion profile"),
    }
}

fn profile_of(loaded: Loaded) -> Result<(TorsionProfile, Option<ConcavePolygon>)> {
    match loaded {
        Loaded::Profile { profile, hodge } => Ok((profile, hodge)),
        _ => bail!("expected a torsion profile"),
    }
}

fn model_of(loaded: Loaded) -> Result<DieudonneLift> {
    match loaded {
        Loaded::Model(m) => Ok(m),
        _ => bail!("expected a model"),
    }
}

fn profile_polys(profile: &TorsionProfile) -> Result<Vec<(String, ConcavePolygon)>> {
    let mut out = vec![("limit".to_string(), profile.limit().clone())];
    for &i in profile.levels().keys() {
        out.push((format!("level {i}"), profile.renormalised(i)?));
    }
    Ok(out)
}

fn invariants(format: Format, input: &str) -> Result<Passed> {
    let loaded = inputs::resolve(input)?;
    let mut text = String::new();
    if let Loaded::Model(m) = &loaded {
        text.push_str(&format!("model: height {}, dim {}, {}\n", m.height(), m.dimension(), m.variance()));
    }
    if let Loaded::Profile { profile, hodge } = loaded {
        let polys = profile_polys(&profile)?;
        for (name, p) in &polys {
            text.push_str(&format!("{name}: {p}\n"));
        }
        if let Some(h) = &hodge {
            text.push_str(&format!("Hdg: {h}\n"));
        }
        let refs: Vec<(&str, &ConcavePolygon)> = polys.iter().map(|(n, p)| (n.as_str(), p)).collect();
        emit(format, &text, &refs);
        return Ok(true);
    }
    let obj = object_of(loaded)?;
    let inv = obj.invariants()?;
    let (newt, hdg) = (inv.newt.to_polygon(), inv.hdg.to_polygon());
    text.push_str(&format!("Newt: {newt}\nHdg: {hdg}\n"));
    let n = newt.domain_end().clone();
    match &inv.hn {
        Some(hn) => {
            text.push_str(&format!("HN: {}\n", hn.polygon));
            text.push_str(&format!("end: Newt({n}) = Hdg({n}) = HN({n}) = {}\n", hdg.end_value()));
            emit_triple(format, &text, &PolygonTriple { newt, hdg, hn: hn.polygon.clone() });
        }
        None => {
            let culprit = inv.wa.violation.as_ref().map_or(String::new(), |s| {
                format!(": slots {:?} have t_H = {} > t_N = {}", one_based(s.mask), s.t_hodge, s.t_newton)
            });
            text.push_str(&format!("HN: undefined, not weakly admissible{culprit}\n"));
            text.push_str(&format!("end: Newt({n}) = {}, Hdg({n}) = {}\n", newt.end_value(), hdg.end_value()));
            emit(format, &text, &[("Newt", &newt), ("Hdg", &hdg)]);
        }
    }
    Ok(true)
}

fn polygon(format: Format, op: PolygonOp) -> Result<Passed> {
    let show = |name: &str, p: &ConcavePolygon| {
        let mut text = format!("{p}\n");
        if let Ok(v) = NewtonVector::from_polygon(p) {
            text.push_str(&format!("vector: {v}\n"));
        }
        emit(format, &text, &[(name, p)]);
    };
    match op {
        PolygonOp::Show { polygon } => show("P", &parse_polygon(&polygon)?),
        PolygonOp::Dual { polygon } => show("dual", &parse_polygon(&polygon)?.dual()),
        PolygonOp::Envelope { points } => {
            let mut pts = points.split(';').map(parse_point).collect::<isopoly_core::Result<Vec<_>>>()?;
            pts.push((int(0), int(0)));
            show("envelope", &ConcavePolygon::concave_envelope(&pts)?);
        }
        PolygonOp::Average { vectors } => {
            let vs = vectors.iter().map(|v| v.parse::<NewtonVector>()).collect::<isopoly_core::Result<Vec<_>>>()?;
            show("average", &polycalc::average(&vs)?.to_polygon());
        }
        PolygonOp::Rescale { polygon, d } => show("rescaled", &parse_polygon(&polygon)?.rescale(d)?),
        PolygonOp::Restrict { polygon, x } => {
            show("restricted", &parse_polygon(&polygon)?.restrict(&parse_rational(&x)?)?)
        }
        PolygonOp::Leq { lower, upper } => {
            let (a, b) = (parse_polygon(&lower)?, parse_polygon(&upper)?);
            let holds = a.leq(&b)?;
            let mut text = format!("{holds}\n");
            if let Some(x) = a.first_excess(&b)? {
                text.push_str(&format!("first lies above at x = {x}\n"));
            } else if !holds {
                text.push_str(&format!("end values differ: {} and {}\n", a.end_value(), b.end_value()));
            }
            emit(format, &text, &[("lower", &a), ("upper", &b)]);
            return Ok(holds);
        }
        PolygonOp::Touching { newt, hdg } => {
            let (a, b) = (parse_polygon(&newt)?, parse_polygon(&hdg)?);
            let pts: Vec<String> = touching_points(&a, &b)?.iter().map(fmt_point).collect();
            let text = if pts.is_empty() { "none\n".to_string() } else { format!("{}\n", pts.join(" ")) };
            emit(format, &text, &[("Newt", &a), ("Hdg", &b)]);
        }
    }
    Ok(true)
}

fn reduce(format: Format, input: &str, z: Option<&str>, profile: Option<&str>) -> Result<Passed> {
    let obj = object_of(inputs::resolve(input)?)?;
    let Some(z) = z else {
        let triple = hnfilt::polygons_of(&obj)?;
        let pts: Vec<String> = touching_points(&triple.newt, &triple.hdg)?.iter().map(fmt_point).collect();
        let list = if pts.is_empty() { "none".to_string() } else { pts.join(" ") };
        emit_triple(format, &format!("{triple}\ncandidate points: {list}\n"), &triple);
        return Ok(true);
    };
    let z = parse_z(z)?;
    let profile = profile.map(|p| profile_of(inputs::resolve(p)?)).transpose()?;
    let cert = hnfilt::reduce(&obj, &z, profile.as_ref().map(|(p, _)| p))?;
    let checks = [
        ("restrictions equal the parts", cert.split.parts_match()?),
        ("reassembly exact", cert.split.reassembles()?),
        ("chain on both parts", cert.parts_satisfy_chain()?),
    ];
    let mut text = cert.split.to_string();
    for (name, ok) in checks {
        text.push_str(&format!("{name}: {}\n", yes(ok)));
    }
    if let Some(on_level) = cert.first_level {
        text.push_str(&format!("z is a break point of HN on level 1: {}\n", yes(on_level)));
    }
    emit_triple(format, &text, &cert.split.original);
    Ok(checks.iter().all(|c| c.1) && cert.first_level != Some(false))
}

fn polarised_reduce(format: Format, input: &str, z: &str) -> Result<Passed> {
    let obj = object_of(inputs::resolve(input)?)?;
    let split = hnfilt::polarised_split(&obj, &parse_z(z)?)?;
    let mut text = split.to_string();
    if let Some(m) = &split.middle {
        text.push_str(&format!("part 2 symmetric: {}\n", m.is_symmetric()));
    }
    let first = split.first.clone();
    emit_triple(format, &text, &first);
    Ok(split.duality_holds())
}

fn simulate(format: Format, input: &str, z: &str) -> Result<Passed> {
    let (profile, _) = profile_of(inputs::resolve(input)?)?;
    let polys = profile_polys(&profile)?;
    let refs: Vec<(&str, &ConcavePolygon)> = polys.iter().map(|(n, p)| (n.as_str(), p)).collect();
    match simulate_torsion_split(&profile, &parse_z(z)?) {
        Ok(trace) => {
            emit(format, &format!("{trace}\n"), &refs);
            Ok(true)
        }
        Err(Error::Inconclusive(why)) => {
            emit(format, &format!("inconclusive: {why}\n"), &refs);
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn report_text(report: &ProfileReport) -> String {
    if report.holds() {
        return "all checks pass\n".to_string();
    }
    report.violations.iter().map(|v| format!("violation: {v}\n")).collect()
}

fn campaign_line(campaign: Campaign, count: u64, seed: u64, labelled: bool) -> Passed {
    let tally = campaigns::run(campaign, count, seed);
    if labelled {
        println!("{}: {}/{}", campaign.label(), tally.passed, tally.count);
    } else {
        println!("{}/{} ok", tally.passed, tally.count);
    }
    if let Some((i, why)) = &tally.first_failure {
        println!("first failure: instance {i}: {why}");
    }
    tally.all_passed()
}

#[allow(clippy::too_many_arguments)]
fn check(
    format: Format,
    which: CheckKind,
    input: Option<&str>,
    count: u64,
    seed: u64,
    hodge: Option<&str>,
    polarised: bool,
    lengths: Option<&str>,
) -> Result<Passed> {
    if which == CheckKind::ComponentLengths {
        return component_lengths(lengths, input);
    }
    let Some(input) = input else {
        let campaign = match which {
            CheckKind::Wa => Campaign::Wa,
            CheckKind::Chain => Campaign::Chain,
            CheckKind::Profile => Campaign::Profiles,
            CheckKind::FirstLevel => Campaign::FirstLevel,
            CheckKind::EigenLengths => Campaign::EigenLengths,
            CheckKind::Duality => Campaign::Duality,
            CheckKind::ComponentLengths => unreachable!("handled above"),
        };
        return Ok(campaign_line(campaign, count, seed, false));
    };
    let loaded = inputs::resolve(input)?;
    match which {
        CheckKind::Wa => {
            if let Loaded::Model(m) = &loaded {
                let r = m.verify_wa()?;
                println!("dim H: {}\nt_N: {}\nt_H: {}", r.dimension, r.t_newton, r.t_hodge);
                println!("weakly admissible: {} ({})", yes(r.wa.admissible), r.wa.coverage);
                return Ok(r.holds());
            }
            let r = object_of(loaded)?.weak_admissibility()?;
            println!("t_N: {}\nt_H: {}", r.t_newton, r.t_hodge);
            println!("weakly admissible: {} ({})", yes(r.admissible), r.coverage);
            if let Some(s) = &r.violation {
                println!("subobject on slots {:?}: t_H = {} > t_N = {}", one_based(s.mask), s.t_hodge, s.t_newton);
            }
            Ok(r.admissible)
        }
        CheckKind::Chain => {
            let chain = object_of(loaded)?.inequality_chain()?;
            let mut text = format!("Newt: {}\nHdg: {}\nHN: {}\n", chain.newt, chain.hdg, chain.hn);
            let above = |x: &Option<_>| x.as_ref().map_or("ok".to_string(), |x| format!("fails at x = {x}"));
            text.push_str(&format!("HN ≤ Newt: {}\n", above(&chain.hn_above_newt)));
            text.push_str(&format!("Newt ≤ Hdg: {}\n", above(&chain.newt_above_hdg)));
            text.push_str(&format!("end points agree: {}\n", yes(chain.ends_agree)));
            let holds = chain.holds();
            emit_triple(format, &text, &PolygonTriple { newt: chain.newt, hdg: chain.hdg, hn: chain.hn });
            Ok(holds)
        }
        CheckKind::Profile => {
            let (profile, _) = profile_of(loaded)?;
            let report = check_torsion_profile(&profile)?;
            print!("{}", report_text(&report));
            Ok(report.holds())
        }
        CheckKind::FirstLevel => {
            let (profile, stored) = profile_of(loaded)?;
            let hdg = match (hodge, stored) {
                (Some(h), _) => parse_polygon(h)?,
                (None, Some(h)) => h,
                (None, None) => bail!("prop2_14 needs a Hodge polygon: pass --hodge or store one in the profile"),
            };
            let report = check_first_level_below_hodge(&profile, &hdg)?;
            print!("{}", report_text(&report));
            Ok(report.holds())
        }
        CheckKind::EigenLengths => bail!("lemma2_12 runs as a campaign; drop the input"),
        CheckKind::Duality => {
            let report = model_of(loaded)?.duality_check(polarised)?;
            println!("polygons:\n{}", report.polygons);
            println!("dual model:\n{}", report.dual_polygons);
            println!("Newt dual: {}\nHdg dual: {}\nHN dual: {}", yes(report.newt), yes(report.hdg), yes(report.hn));
            if let Some(sym) = report.symmetric {
                println!("symmetric: {}", yes(sym));
            }
            Ok(report.holds())
        }
        CheckKind::ComponentLengths => unreachable!("handled above"),
    }
}

fn component_lengths(lengths: Option<&str>, input: Option<&str>) -> Result<Passed> {
    if input.is_some() {
        bail!("lemma2_10 takes --lengths, not an input");
    }
    let lengths: Vec<u64> = match lengths {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<u64>().with_context(|| format!("length {t:?}")))
            .collect::<Result<_>>()?,
        None => {
            println!("M/M' for the built-in pair ex2_11_M, ex2_11_Mprime");
            unramified_isogeny(inputs::EXAMPLE_PRIME)?.cokernel_components()?
        }
    };
    let r = component_length_check(&lengths);
    let shown: Vec<String> = r.lengths.iter().map(ToString::to_string).collect();
    println!("component lengths: ({})", shown.join(","));
    println!("total: {}, expected per component: {}", r.height, r.expected);
    if r.constant {
        println!("constant: yes");
    } else {
        let nonzero: Vec<String> =
            r.lengths.iter().enumerate().filter(|(_, &l)| l > 0).map(|(i, _)| i.to_string()).collect();
        println!("constant: no, nonzero only at i = {}", nonzero.join(", "));
    }
    Ok(r.constant)
}

fn examples(name: Option<&str>, p: u64) -> Result<Passed> {
    let Some(name) = name else {
        for b in inputs::builtins()? {
            println!("{}  {}", b.name, b.summary);
        }
        return Ok(true);
    };
    let b: Builtin = inputs::builtin(name)?.ok_or_else(|| anyhow!("no built-in example {name}"))?;
    match b.kind {
        BuiltinKind::Document(doc) => match *doc {
            Loaded::Object(obj) => print!("{}", format::object_to_toml(&obj)?),
            Loaded::Model(m) => print!("{}", format::model_to_toml(&m)?),
            Loaded::Profile { profile, hodge } => print!("{}", format::profile_to_toml(&profile, hodge.as_ref())?),
        },
        BuiltinKind::Report(f) => println!("{}", f(p)?),
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<Passed> {
    let f = cli.format;
    match cli.command {
        Command::Invariants { input } => invariants(f, &input),
        Command::Polygon { op } => polygon(f, op),
        Command::Reduce { input, z, profile } => reduce(f, &input, z.as_deref(), profile.as_deref()),
        Command::PolarisedReduce { input, z } => polarised_reduce(f, &input, &z),
        Command::Simulate { input, z } => simulate(f, &input, &z),
        Command::Check { which, input, count, seed, hodge, polarised, lengths } => {
            check(f, which, input.as_deref(), count, seed, hodge.as_deref(), polarised, lengths.as_deref())
        }
        Command::Examples { name, p } => examples(name.as_deref(), p),
        Command::Fuzz { campaign, count, seed } => Ok(campaign_line(campaign, count, seed, true)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
