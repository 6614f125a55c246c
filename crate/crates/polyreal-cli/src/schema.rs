//! JSON object files: one self-describing envelope per object type.
//!
//! Every file is `{"type": ..., "d": ..., "dims": ..., "blocks": ...,
//! "meta": {"seed": ..., "tolerances": ...}}` so a single loader can
//! dispatch and the validators fire on load. Matrices are row-major
//! `[re, im]` pairs; serde_json prints floats as shortest round-trip
//! decimals, which keeps generation byte-deterministic for a fixed seed.

use num_complex::Complex64;
use polyreal::classes::{Metric, NodeFlavor};
use polyreal::decomp::DecompositionKind;
use polyreal::pencil::NevanlinnaData;
use polyreal::realize::DecompositionSample;
use polyreal::verify::TupleKind;
use polyreal::{
    BessmertnyiPencil, CommutingTuple, ComplexMatrix, DecompositionOfIdentity,
    HerglotzDiskColligation, HerglotzRepresentation, PiNode, SchurGRColligation, Tolerances,
    Validation, VerificationReport,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Dense complex matrix: row-major `[re, im]` entries.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct JsonMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl JsonMatrix {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        JsonMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m
                .row_major_entries()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> anyhow::Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            anyhow::bail!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            );
        }
        let entries: Vec<Complex64> = self
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Ok(ComplexMatrix::from_row_major(self.rows, self.cols, &entries)?)
    }
}

pub type JsonPoint = Vec<[f64; 2]>;

pub fn point_to_json(p: &[Complex64]) -> JsonPoint {
    p.iter().map(|z| [z.re, z.im]).collect()
}

pub fn point_from_json(p: &JsonPoint) -> Vec<Complex64> {
    p.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Meta {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Meta {
    pub fn new(seed: u64, tol: &Tolerances) -> Self {
        Meta {
            seed,
            tolerances: tol
                .entries()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ColligationBlocks {
    pub a: JsonMatrix,
    pub b: JsonMatrix,
    pub c: JsonMatrix,
    pub d: JsonMatrix,
    pub dec: Vec<JsonMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RepresentationBlocks {
    pub r: JsonMatrix,
    pub u: JsonMatrix,
    pub v: JsonMatrix,
    pub dec: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PencilBlocks {
    pub v0: JsonMatrix,
    pub vk: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TupleBlocks {
    pub mats: Vec<JsonMatrix>,
    pub kind: String,
    pub margin: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SampleEntry {
    pub point: JsonPoint,
    pub value: JsonMatrix,
    pub factors: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct JsonCheck {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct JsonAtom {
    pub location: [f64; 2],
    pub mass: f64,
}

/// The on-disk envelope, dispatched by its `type` field.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObjectFile {
    SchurGr {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: ColligationBlocks,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
    HerglotzColligation {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: ColligationBlocks,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
    HerglotzRep {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: RepresentationBlocks,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
    PiImpedance {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: ColligationBlocks,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
    Pencil {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: PencilBlocks,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
    Tuple {
        d: usize,
        dims: BTreeMap<String, usize>,
        blocks: TupleBlocks,
        meta: Meta,
    },
    Samples {
        d: usize,
        dims: BTreeMap<String, usize>,
        flavor: String,
        samples: Vec<SampleEntry>,
        meta: Meta,
    },
    Points {
        d: usize,
        domain: String,
        points: Vec<JsonPoint>,
        meta: Meta,
    },
    Results {
        values: Vec<JsonMatrix>,
    },
    Report {
        name: String,
        seed: u64,
        checks: Vec<JsonCheck>,
        notes: Vec<String>,
        pass: bool,
    },
    Nevanlinna {
        alpha: f64,
        r: [f64; 2],
        atoms: Vec<JsonAtom>,
        #[serde(skip_serializing_if = "Option::is_none")]
        consistency: Option<Vec<JsonCheck>>,
        meta: Meta,
    },
}

impl ObjectFile {
    pub fn type_name(&self) -> &'static str {
        match self {
            ObjectFile::SchurGr { .. } => "schur_gr",
            ObjectFile::HerglotzColligation { .. } => "herglotz_colligation",
            ObjectFile::HerglotzRep { .. } => "herglotz_rep",
            ObjectFile::PiImpedance { .. } => "pi_impedance",
            ObjectFile::Pencil { .. } => "pencil",
            ObjectFile::Tuple { .. } => "tuple",
            ObjectFile::Samples { .. } => "samples",
            ObjectFile::Points { .. } => "points",
            ObjectFile::Results { .. } => "results",
            ObjectFile::Report { .. } => "report",
            ObjectFile::Nevanlinna { .. } => "nevanlinna",
        }
    }

    /// Attach a consistency report to a converted object.
    pub fn with_consistency(mut self, checks: Vec<JsonCheck>) -> Self {
        match &mut self {
            ObjectFile::SchurGr { consistency, .. }
            | ObjectFile::HerglotzColligation { consistency, .. }
            | ObjectFile::HerglotzRep { consistency, .. }
            | ObjectFile::PiImpedance { consistency, .. }
            | ObjectFile::Pencil { consistency, .. }
            | ObjectFile::Nevanlinna { consistency, .. } => *consistency = Some(checks),
            _ => {}
        }
        self
    }
}

fn dec_to_json(dec: &DecompositionOfIdentity) -> Vec<JsonMatrix> {
    dec.parts().iter().map(JsonMatrix::from_matrix).collect()
}

fn dec_from_json(
    parts: &[JsonMatrix],
    kind: DecompositionKind,
    tol: &Tolerances,
) -> anyhow::Result<DecompositionOfIdentity> {
    let mats: Vec<ComplexMatrix> = parts
        .iter()
        .map(|m| m.to_matrix())
        .collect::<anyhow::Result<_>>()?;
    Ok(DecompositionOfIdentity::new(mats, kind, tol)?)
}

pub fn file_from_schur(col: &SchurGRColligation, seed: u64, tol: &Tolerances) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), col.state_dim());
    dims.insert("p".to_string(), col.output_dim());
    dims.insert("q".to_string(), col.input_dim());
    ObjectFile::SchurGr {
        d: col.dec().d(),
        dims,
        blocks: ColligationBlocks {
            a: JsonMatrix::from_matrix(col.a()),
            b: JsonMatrix::from_matrix(col.b()),
            c: JsonMatrix::from_matrix(col.c()),
            d: JsonMatrix::from_matrix(col.d()),
            dec: dec_to_json(col.dec()),
            metric: Some(col.metric().as_str().to_string()),
        },
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_herglotz_colligation(
    col: &HerglotzDiskColligation,
    seed: u64,
    tol: &Tolerances,
) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), col.state_dim());
    dims.insert("q".to_string(), col.input_dim());
    ObjectFile::HerglotzColligation {
        d: col.dec().d(),
        dims,
        blocks: ColligationBlocks {
            a: JsonMatrix::from_matrix(col.a()),
            b: JsonMatrix::from_matrix(col.b()),
            c: JsonMatrix::from_matrix(col.c()),
            d: JsonMatrix::from_matrix(col.d()),
            dec: dec_to_json(col.dec()),
            metric: None,
        },
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_herglotz_rep(
    rep: &HerglotzRepresentation,
    seed: u64,
    tol: &Tolerances,
) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), rep.state_dim());
    dims.insert("q".to_string(), rep.input_dim());
    ObjectFile::HerglotzRep {
        d: rep.dec().d(),
        dims,
        blocks: RepresentationBlocks {
            r: JsonMatrix::from_matrix(rep.r()),
            u: JsonMatrix::from_matrix(rep.u()),
            v: JsonMatrix::from_matrix(rep.v()),
            dec: dec_to_json(rep.dec()),
        },
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_pi_node(node: &PiNode, seed: u64, tol: &Tolerances) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), node.state_dim());
    dims.insert("q".to_string(), node.input_dim());
    ObjectFile::PiImpedance {
        d: node.dec().d(),
        dims,
        blocks: ColligationBlocks {
            a: JsonMatrix::from_matrix(node.a()),
            b: JsonMatrix::from_matrix(node.b()),
            c: JsonMatrix::from_matrix(node.c()),
            d: JsonMatrix::from_matrix(node.d()),
            dec: dec_to_json(node.dec()),
            metric: None,
        },
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_pencil(pen: &BessmertnyiPencil, seed: u64, tol: &Tolerances) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), pen.state_dim());
    dims.insert("q".to_string(), pen.q());
    ObjectFile::Pencil {
        d: pen.d(),
        dims,
        blocks: PencilBlocks {
            v0: JsonMatrix::from_matrix(pen.v0()),
            vk: pen.vks().iter().map(JsonMatrix::from_matrix).collect(),
        },
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_tuple(tuple: &CommutingTuple, seed: u64, tol: &Tolerances) -> ObjectFile {
    let mut dims = BTreeMap::new();
    dims.insert("m".to_string(), tuple.space_dim());
    ObjectFile::Tuple {
        d: tuple.d(),
        dims,
        blocks: TupleBlocks {
            mats: (0..tuple.d())
                .map(|k| JsonMatrix::from_matrix(tuple.member(k)))
                .collect(),
            kind: match tuple.kind() {
                TupleKind::StrictContraction => "strict_contraction".to_string(),
                TupleKind::StrictlyAccretive => "strictly_accretive".to_string(),
            },
            margin: tuple.margin(),
        },
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_nevanlinna(data: &NevanlinnaData, seed: u64, tol: &Tolerances) -> ObjectFile {
    ObjectFile::Nevanlinna {
        alpha: data.alpha,
        r: [data.r.re, data.r.im],
        atoms: data
            .atoms
            .iter()
            .map(|a| JsonAtom {
                location: [a.location.re, a.location.im],
                mass: a.mass,
            })
            .collect(),
        consistency: None,
        meta: Meta::new(seed, tol),
    }
}

pub fn file_from_report(report: &VerificationReport) -> ObjectFile {
    ObjectFile::Report {
        name: report.name.clone(),
        seed: report.seed,
        checks: report
            .checks
            .iter()
            .map(|c| JsonCheck {
                label: c.label.clone(),
                value: c.value,
                threshold: c.threshold,
                pass: c.pass,
            })
            .collect(),
        notes: report.notes.clone(),
        pass: report.all_pass(),
    }
}

/// A loaded, validated core object.
pub enum CoreObject {
    Schur(SchurGRColligation),
    Herglotz(HerglotzDiskColligation),
    Rep(HerglotzRepresentation),
    Node(PiNode),
    Pencil(BessmertnyiPencil),
    Tuple(CommutingTuple),
}

impl CoreObject {
    pub fn type_name(&self) -> &'static str {
        match self {
            CoreObject::Schur(_) => "schur_gr",
            CoreObject::Herglotz(_) => "herglotz_colligation",
            CoreObject::Rep(_) => "herglotz_rep",
            CoreObject::Node(_) => "pi_impedance",
            CoreObject::Pencil(_) => "pencil",
            CoreObject::Tuple(_) => "tuple",
        }
    }

    /// Warnings recorded by a lenient load.
    pub fn warnings(&self) -> Vec<String> {
        match self {
            CoreObject::Schur(c) => c.warnings().to_vec(),
            CoreObject::Herglotz(c) => c.warnings().to_vec(),
            CoreObject::Rep(r) => r.warnings().to_vec(),
            CoreObject::Node(n) => n.warnings().to_vec(),
            CoreObject::Pencil(p) => p.warnings().to_vec(),
            CoreObject::Tuple(_) => Vec::new(),
        }
    }
}

/// Validate an envelope into its core object.
pub fn to_core(
    file: &ObjectFile,
    tol: &Tolerances,
    mode: Validation,
) -> anyhow::Result<CoreObject> {
    match file {
        ObjectFile::SchurGr { blocks, .. } => {
            let metric = match blocks.metric.as_deref() {
                Some("unitary") | None => Metric::Unitary,
                Some("isometric") => Metric::Isometric,
                Some("coisometric") => Metric::Coisometric,
                Some("contractive") => Metric::Contractive,
                Some(other) => anyhow::bail!("unknown metric {other:?}"),
            };
            let dec = dec_from_json(&blocks.dec, DecompositionKind::Spectral, tol)?;
            Ok(CoreObject::Schur(SchurGRColligation::new(
                blocks.a.to_matrix()?,
                blocks.b.to_matrix()?,
                blocks.c.to_matrix()?,
                blocks.d.to_matrix()?,
                dec,
                metric,
                tol,
                mode,
            )?))
        }
        ObjectFile::HerglotzColligation { blocks, .. } => {
            let dec = dec_from_json(&blocks.dec, DecompositionKind::Spectral, tol)?;
            Ok(CoreObject::Herglotz(HerglotzDiskColligation::new(
                blocks.a.to_matrix()?,
                blocks.b.to_matrix()?,
                blocks.c.to_matrix()?,
                blocks.d.to_matrix()?,
                dec,
                tol,
                mode,
            )?))
        }
        ObjectFile::HerglotzRep { blocks, .. } => {
            let dec = dec_from_json(&blocks.dec, DecompositionKind::Spectral, tol)?;
            Ok(CoreObject::Rep(HerglotzRepresentation::new(
                blocks.r.to_matrix()?,
                blocks.u.to_matrix()?,
                blocks.v.to_matrix()?,
                dec,
                tol,
                mode,
            )?))
        }
        ObjectFile::PiImpedance { blocks, .. } => {
            let dec = dec_from_json(&blocks.dec, DecompositionKind::Positive, tol)?;
            Ok(CoreObject::Node(PiNode::new(
                blocks.a.to_matrix()?,
                blocks.b.to_matrix()?,
                blocks.c.to_matrix()?,
                blocks.d.to_matrix()?,
                dec,
                NodeFlavor::Impedance,
                tol,
                mode,
            )?))
        }
        ObjectFile::Pencil { dims, blocks, .. } => {
            let q = *dims
                .get("q")
                .ok_or_else(|| anyhow::anyhow!("pencil file lacks dims.q"))?;
            let vks: Vec<ComplexMatrix> = blocks
                .vk
                .iter()
                .map(|m| m.to_matrix())
                .collect::<anyhow::Result<_>>()?;
            Ok(CoreObject::Pencil(BessmertnyiPencil::new(
                q,
                blocks.v0.to_matrix()?,
                vks,
                tol,
                mode,
            )?))
        }
        ObjectFile::Tuple { blocks, .. } => {
            let kind = match blocks.kind.as_str() {
                "strict_contraction" => TupleKind::StrictContraction,
                "strictly_accretive" => TupleKind::StrictlyAccretive,
                other => anyhow::bail!("unknown tuple kind {other:?}"),
            };
            let mats: Vec<ComplexMatrix> = blocks
                .mats
                .iter()
                .map(|m| m.to_matrix())
                .collect::<anyhow::Result<_>>()?;
            Ok(CoreObject::Tuple(CommutingTuple::new(
                mats,
                kind,
                blocks.margin,
                tol,
            )?))
        }
        other => anyhow::bail!("file of type {:?} is not a realization object", other.type_name()),
    }
}

/// Extract realization samples from a samples envelope.
pub fn samples_from_file(file: &ObjectFile) -> anyhow::Result<(String, Vec<DecompositionSample>)> {
    match file {
        ObjectFile::Samples { flavor, samples, .. } => {
            let parsed: Vec<DecompositionSample> = samples
                .iter()
                .map(|s| {
                    Ok(DecompositionSample {
                        point: point_from_json(&s.point),
                        value: s.value.to_matrix()?,
                        factors: s
                            .factors
                            .iter()
                            .map(|f| f.to_matrix())
                            .collect::<anyhow::Result<_>>()?,
                    })
                })
                .collect::<anyhow::Result<_>>()?;
            Ok((flavor.clone(), parsed))
        }
        other => anyhow::bail!("expected a samples file, got {:?}", other.type_name()),
    }
}

/// Serialize with a stable layout (two-space pretty printing plus a final
/// newline); identical objects produce identical bytes.
pub fn to_json_string(file: &ObjectFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("object files always serialize");
    s.push('\n');
    s
}

pub fn from_json_str(text: &str) -> anyhow::Result<ObjectFile> {
    Ok(serde_json::from_str(text)?)
}
