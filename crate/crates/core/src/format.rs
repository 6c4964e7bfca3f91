//! TOML documents for filtered isocrystals, models and torsion profiles.
//!
//! Slots use the text form `j -> k : p^a * c [vlabel l]`, polygons the
//! breakpoint form `(0,0);(1,1)`, profiles the `jump:dim` lists, and field
//! elements polynomials in the uniformizer (`w` for `K`, `y` for `F`).
//! Slot numbers are one-based throughout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dieudonne::{DieudonneLift, Variance};
use crate::error::{Error, Result};
use crate::field::{EisensteinExt, NfElem};
use crate::filisoc::{
    mask_of, one_based, CoefficientField, FilteredIsocrystalCx, Filtration, ProfileData, RamifiedAction, SubspaceData,
};
use crate::filvect::GradedProfile;
use crate::hnfilt::TorsionProfile;
use crate::isoc::{parse_isocrystal, StandardIsocrystal};
use crate::linalg::Matrix;
use crate::poly::QPoly;
use crate::polycalc::ConcavePolygon;
use crate::rational::parse_rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Object(ObjectDoc),
    Model(ModelDoc),
    Profile(ProfileDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub p: u64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub residue_degree: u32,
    pub slots: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsDoc {
    #[serde(default = "one_usize")]
    pub inertia: usize,
    /// Eisenstein polynomial in `y`; absent for unramified `F`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ActionDoc {
    Symbolic,
    /// One-based slot groups.
    Blocks {
        blocks: Vec<Vec<usize>>,
    },
    /// Rows of rational entries.
    Operator {
        rows: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub index: i64,
    pub vectors: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tier", rename_all = "lowercase", deny_unknown_fields)]
pub enum FiltrationDoc {
    Profiles {
        per_embedding: Vec<String>,
        /// Keys are one-based slot lists such as `"1,3"`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<BTreeMap<String, Vec<String>>>,
    },
    Subspaces {
        /// Eisenstein polynomial of `K` in `w`.
        base: String,
        #[serde(default)]
        roots: Vec<String>,
        steps: Vec<StepDoc>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub lattice: LatticeDoc,
    pub coefficients: CoefficientsDoc,
    #[serde(default = "symbolic")]
    pub action: ActionDoc,
    pub filtration: FiltrationDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub lattice: LatticeDoc,
    pub coefficients: CoefficientsDoc,
    #[serde(default = "symbolic")]
    pub action: ActionDoc,
    /// Eisenstein polynomial of `K` in `w`; `w - p` is `Q_p` itself.
    pub base: String,
    #[serde(default)]
    pub roots: Vec<String>,
    /// Generators of `L ⊆ D ⊗ O_K`.
    pub hodge_lattice: Vec<Vec<String>>,
    #[serde(default = "covariant")]
    pub variance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub n: usize,
    pub d: u64,
    #[serde(default = "one_u64")]
    pub e: u64,
    pub limit: String,
    /// Keys are level indices.
    pub levels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge: Option<String>,
}

fn one() -> u32 {
    1
}

fn one_usize() -> usize {
    1
}

fn one_u64() -> u64 {
    1
}

fn is_one(x: &u32) -> bool {
    *x == 1
}

fn symbolic() -> ActionDoc {
    ActionDoc::Symbolic
}

fn covariant() -> String {
    "covariant".into()
}

/// A parsed document, validated into library types.
#[derive(Clone, Debug)]
pub enum Loaded {
    Object(FilteredIsocrystalCx),
    Model(DieudonneLift),
    Profile { profile: TorsionProfile, hodge: Option<ConcavePolygon> },
}

pub fn parse_document(text: &str) -> Result<Document> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render_document(doc: &Document) -> Result<String> {
    toml::to_string(doc).map_err(|e| Error::Internal(format!("serializing TOML: {e}")))
}

/// Parses and validates.
pub fn load(text: &str) -> Result<Loaded> {
    match parse_document(text)? {
        Document::Object(d) => Ok(Loaded::Object(object_from_doc(&d)?)),
        Document::Model(d) => Ok(Loaded::Model(model_from_doc(&d)?)),
        Document::Profile(d) => {
            let (profile, hodge) = profile_from_doc(&d)?;
            Ok(Loaded::Profile { profile, hodge })
        }
    }
}

fn lattice_from_doc(doc: &LatticeDoc, label_modulus: usize) -> Result<StandardIsocrystal> {
    parse_isocrystal(doc.p, &doc.slots.join("\n"), label_modulus as u32)?.with_residue_degree(doc.residue_degree)
}

fn lattice_to_doc(iso: &StandardIsocrystal) -> LatticeDoc {
    LatticeDoc {
        p: iso.p(),
        residue_degree: iso.residue_degree(),
        slots: iso.to_string().lines().map(str::to_string).collect(),
    }
}

fn coefficients_from_doc(p: u64, doc: &CoefficientsDoc) -> Result<CoefficientField> {
    let field = match &doc.eisenstein {
        Some(g) => CoefficientField::new(p, doc.inertia, QPoly::parse(g, 'y', Some(p))?)?,
        None => CoefficientField::unramified(p, doc.inertia)?,
    };
    match &doc.involution {
        Some(inv) => field.with_involution(inv.clone()),
        None => Ok(field),
    }
}

fn coefficients_to_doc(c: &CoefficientField) -> CoefficientsDoc {
    CoefficientsDoc {
        inertia: c.inertia(),
        eisenstein: (c.ramification() > 1).then(|| c.eisenstein().display_with("y")),
        involution: c.involution().map(<[usize]>::to_vec),
    }
}

fn action_from_doc(doc: &ActionDoc) -> Result<RamifiedAction> {
    match doc {
        ActionDoc::Symbolic => Ok(RamifiedAction::Symbolic),
        ActionDoc::Blocks { blocks } => Ok(RamifiedAction::Blocks(
            blocks
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|&j| j.checked_sub(1).ok_or_else(|| Error::Parse("slots are numbered from 1".into())))
                        .collect()
                })
                .collect::<Result<_>>()?,
        )),
        ActionDoc::Operator { rows } => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse("the operator must be a square matrix".into()));
            }
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(RamifiedAction::Operator(Matrix::from_rows(parsed, n)))
        }
    }
}

fn action_to_doc(a: &RamifiedAction) -> ActionDoc {
    match a {
        RamifiedAction::Symbolic => ActionDoc::Symbolic,
        RamifiedAction::Blocks(blocks) => {
            ActionDoc::Blocks { blocks: blocks.iter().map(|b| b.iter().map(|j| j + 1).collect()).collect() }
        }
        RamifiedAction::Operator(m) => ActionDoc::Operator {
            rows: m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        },
    }
}

fn base_field(p: u64, poly: &str) -> Result<EisensteinExt> {
    EisensteinExt::new(p, QPoly::parse(poly, 'w', Some(p))?)
}

fn elems(k: &EisensteinExt, v: &[String]) -> Result<Vec<NfElem>> {
    v.iter().map(|x| k.parse_elem(x)).collect()
}

fn elem_strings(k: &EisensteinExt, v: &[NfElem]) -> Vec<String> {
    v.iter().map(|x| k.fmt_elem(x)).collect()
}

fn slot_list(key: &str) -> Result<u64> {
    let slots = key
        .split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(j) if j > 0 => Ok(j - 1),
            _ => Err(Error::Parse(format!("bad slot list {key:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mask_of(&slots))
}

fn profiles(v: &[String]) -> Result<Vec<GradedProfile>> {
    v.iter().map(|s| s.parse()).collect()
}

pub fn object_from_doc(doc: &ObjectDoc) -> Result<FilteredIsocrystalCx> {
    let p = doc.lattice.p;
    let lattice = lattice_from_doc(&doc.lattice, doc.coefficients.inertia)?;
    let coeff = coefficients_from_doc(p, &doc.coefficients)?;
    let action = action_from_doc(&doc.action)?;
    let filtration = match &doc.filtration {
        FiltrationDoc::Profiles { per_embedding, table } => Filtration::Profiles(ProfileData {
            per_tau: profiles(per_embedding)?,
            table: table
                .as_ref()
                .map(|t| t.iter().map(|(k, v)| Ok((slot_list(k)?, profiles(v)?))).collect::<Result<_>>())
                .transpose()?,
        }),
        FiltrationDoc::Subspaces { base, roots, steps } => {
            let k = base_field(p, base)?;
            Filtration::Subspaces(SubspaceData {
                roots: elems(&k, roots)?,
                steps: steps
                    .iter()
                    .map(|s| Ok((s.index, s.vectors.iter().map(|v| elems(&k, v)).collect::<Result<_>>()?)))
                    .collect::<Result<_>>()?,
                base: k,
            })
        }
    };
    FilteredIsocrystalCx::new(lattice, coeff, action, filtration)
}

pub fn object_to_doc(obj: &FilteredIsocrystalCx) -> ObjectDoc {
    let filtration = match obj.filtration() {
        Filtration::Profiles(data) => FiltrationDoc::Profiles {
            per_embedding: data.per_tau.iter().map(ToString::to_string).collect(),
            table: data.table.as_ref().map(|t| {
                t.iter()
                    .map(|(&mask, ps)| {
                        let key = one_based(mask).iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
                        (key, ps.iter().map(ToString::to_string).collect())
                    })
                    .collect()
            }),
        },
        Filtration::Subspaces(data) => {
            let k = &data.base;
            FiltrationDoc::Subspaces {
                base: k.modulus().display_with("w"),
                roots: elem_strings(k, &data.roots),
                steps: data
                    .steps
                    .iter()
                    .map(|(i, span)| StepDoc { index: *i, vectors: span.iter().map(|v| elem_strings(k, v)).collect() })
                    .collect(),
            }
        }
    };
    ObjectDoc {
        lattice: lattice_to_doc(obj.isocrystal()),
        coefficients: coefficients_to_doc(obj.coeff()),
        action: action_to_doc(obj.ramified()),
        filtration,
    }
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<DieudonneLift> {
    let p = doc.lattice.p;
    let k = base_field(p, &doc.base)?;
    let variance: Variance = doc.variance.parse()?;
    let lift = DieudonneLift::new(
        lattice_from_doc(&doc.lattice, doc.coefficients.inertia)?,
        coefficients_from_doc(p, &doc.coefficients)?,
        action_from_doc(&doc.action)?,
        k.clone(),
        elems(&k, &doc.roots)?,
        doc.hodge_lattice.iter().map(|v| elems(&k, v)).collect::<Result<_>>()?,
    )?;
    Ok(lift.with_variance(variance))
}

pub fn model_to_doc(lift: &DieudonneLift) -> ModelDoc {
    let k = lift.base();
    ModelDoc {
        lattice: lattice_to_doc(lift.lattice()),
        coefficients: coefficients_to_doc(lift.coeff()),
        action: action_to_doc(lift.ramified()),
        base: k.modulus().display_with("w"),
        roots: elem_strings(k, lift.roots()),
        hodge_lattice: lift.fil_lattice().iter().map(|v| elem_strings(k, v)).collect(),
        variance: lift.variance().to_string(),
    }
}

pub fn profile_from_doc(doc: &ProfileDoc) -> Result<(TorsionProfile, Option<ConcavePolygon>)> {
    let levels = doc
        .levels
        .iter()
        .map(|(k, v)| {
            let i: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad level index {k:?}")))?;
            Ok((i, v.parse()?))
        })
        .collect::<Result<_>>()?;
    let profile = TorsionProfile::new(doc.n, doc.d, doc.e, levels, doc.limit.parse()?)?;
    let hodge = doc.hodge.as_deref().map(str::parse).transpose()?;
    Ok((profile, hodge))
}

pub fn profile_to_doc(profile: &TorsionProfile, hodge: Option<&ConcavePolygon>) -> ProfileDoc {
    ProfileDoc {
        n: profile.n(),
        d: profile.d(),
        e: profile.e(),
        limit: profile.limit().to_string(),
        levels: profile.levels().iter().map(|(i, p)| (i.to_string(), p.to_string())).collect(),
        hodge: hodge.map(ToString::to_string),
    }
}

pub fn object_to_toml(obj: &FilteredIsocrystalCx) -> Result<String> {
    render_document(&Document::Object(object_to_doc(obj)))
}

pub fn model_to_toml(lift: &DieudonneLift) -> Result<String> {
    render_document(&Document::Model(model_to_doc(lift)))
}

pub fn profile_to_toml(profile: &TorsionProfile, hodge: Option<&ConcavePolygon>) -> Result<String> {
    render_document(&Document::Profile(profile_to_doc(profile, hodge)))
}
