//! Input resolution: files on disk, or compiled-in examples addressed by name.

use std::path::Path;

use anyhow::{bail, Context, Result};
use isopoly_core::dieudonne::{etale, ramified_lift_pair, unramified_isogeny, worked_split};
use isopoly_core::dvrmod::non_inner_element_demo;
use isopoly_core::format::{self, Loaded};
use isopoly_core::sampling::{converging_profile, violation_fixtures};

/// Prime used by the built-in examples.
pub const EXAMPLE_PRIME: u64 = 3;

pub struct Builtin {
    pub name: String,
    pub summary: &'static str,
    pub kind: BuiltinKind,
}

pub enum BuiltinKind {
    Document(Box<Loaded>),
    /// A computation whose output is a report rather than a document.
    Report(fn(u64) -> Result<String>),
}

fn non_inner_report(p: u64) -> Result<String> {
    let demo = non_inner_element_demo(p)?;
    let mut out = format!("a' = w + y over K = Q_{p}(w), w^2 = {p}, acting through y^2 = {p}\n");
    for (l, (image, v)) in demo.images.iter().zip(&demo.valuations).enumerate() {
        let v = v.as_ref().map_or("infinite".to_string(), ToString::to_string);
        out.push_str(&format!("embedding {}: {image}, valuation {v}\n", l + 1));
    }
    out.push_str(&format!("valuations differ: {}", demo.valuations_differ()));
    Ok(out)
}

pub fn builtins() -> Result<Vec<Builtin>> {
    let p = EXAMPLE_PRIME;
    let pair = ramified_lift_pair(p)?;
    let iso = unramified_isogeny(p)?;
    let model = |name: &str, summary, lift| Builtin {
        name: name.into(),
        summary,
        kind: BuiltinKind::Document(Box::new(Loaded::Model(lift))),
    };
    let mut out = vec![
        model("ex2_4_H0", "ramified lift with L on the same eigenline twice", pair.same_eigenvalue),
        model("ex2_4_H1", "ramified lift with L on opposite eigenlines", pair.mixed_eigenvalues),
        model("ex2_11_M", "contravariant unramified model, the larger lattice", iso.larger),
        model("ex2_11_Mprime", "contravariant unramified model, the index-p sublattice", iso.smaller),
        model("worked_split", "height 3, Newt (1,1/2,1/2) touching Hdg (1,1,0) at (1,1)", worked_split(p)?),
        model("etale", "etale model of height 2", etale(p, 2)?),
        Builtin {
            name: "converging".into(),
            summary: "torsion profile of depth 8 converging to (1,1/2,1/2)",
            kind: BuiltinKind::Document(Box::new(Loaded::Profile { profile: converging_profile(8)?, hodge: None })),
        },
        Builtin {
            name: "remark2_13".into(),
            summary: "embeddings of an element not coming from the inner ring",
            kind: BuiltinKind::Report(non_inner_report),
        },
    ];
    for fx in violation_fixtures()? {
        out.push(Builtin {
            name: format!("fixture-{}", fx.name),
            summary: "torsion profile breaking one check",
            kind: BuiltinKind::Document(Box::new(Loaded::Profile { profile: fx.profile, hodge: fx.hodge })),
        });
    }
    Ok(out)
}

pub fn builtin(name: &str) -> Result<Option<Builtin>> {
    Ok(builtins()?.into_iter().find(|b| b.name == name))
}

/// Reads `arg` as a file when it exists, otherwise looks up its file stem among the built-ins.
pub fn resolve(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return format::load(&text).with_context(|| format!("in {arg}"));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    match builtin(stem)? {
        Some(Builtin { kind: BuiltinKind::Document(doc), .. }) => Ok(*doc),
        Some(_) => bail!("{stem} is a report, not an input document; run `examples {stem}`"),
        None => bail!("{arg}: no such file or built-in example (see `examples`)"),
    }
}
