//! JSON documents. Exact scalars are strings; maps are keyed in sorted order so output
//! is byte-stable.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cartan::{parse_q, CartanData, CartanError, DiagramAut, Weight};
use crate::exactalg::{CycScalar, Matrix, QuasiPoly};
use crate::frame::{BetheTuple, FrameError, ProblemInstance};
use crate::genengine::{NodeFlags, PopulationGraph, StepKind};
use crate::typea::{Flag, FrameReport, QPSpace, TypeAFrame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

type Res<T> = Result<T, IoError>;

pub fn scalar_string(c: &CycScalar) -> String {
    c.to_string()
}

/// Scalars may use `w` for the primitive root of order `order` without an `@n` suffix.
pub fn parse_scalar(s: &str, order: u32) -> Res<CycScalar> {
    CycScalar::parse_with_order(s, order).map_err(|e| IoError::Parse(e.to_string()))
}

fn r64_string(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A quasi-polynomial: sum of c x^{k/denom}, keyed by k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiPolyDoc {
    pub denom: i64,
    pub terms: BTreeMap<i64, String>,
}

impl QuasiPolyDoc {
    pub fn from_qp(p: &QuasiPoly) -> Self {
        QuasiPolyDoc { denom: p.denom(), terms: p.keyed_terms().iter().map(|(k, c)| (*k, scalar_string(c))).collect() }
    }

    pub fn to_qp(&self, order: u32) -> Res<QuasiPoly> {
        if self.denom <= 0 {
            return Err(IoError::Parse("denom must be positive".into()));
        }
        let terms = self.terms.iter().map(|(k, s)| Ok((*k, parse_scalar(s, order)?))).collect::<Res<BTreeMap<_, _>>>()?;
        Ok(QuasiPoly::from_keyed(self.denom, terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleDoc {
    pub polys: Vec<QuasiPolyDoc>,
}

impl TupleDoc {
    pub fn from_tuple(y: &BetheTuple) -> Self {
        TupleDoc { polys: y.polys.iter().map(QuasiPolyDoc::from_qp).collect() }
    }

    pub fn to_tuple(&self, order: u32) -> Res<BetheTuple> {
        let polys = self.polys.iter().map(|p| p.to_qp(order)).collect::<Res<Vec<_>>>()?;
        Ok(BetheTuple::new(polys)?)
    }
}

/// `cartan` is a tag such as "A3" or an integer matrix; `sigma` a 1-based image list or cycle string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub cartan: Value,
    pub sigma: Value,
    #[serde(rename = "M")]
    pub m: u32,
    pub omega_power: i64,
    #[serde(default)]
    pub points: Vec<String>,
    #[serde(default)]
    pub site_weights: Vec<Vec<String>>,
    pub lambda0: Vec<String>,
}

pub fn parse_cartan_value(v: &Value) -> Res<CartanData> {
    match v {
        Value::String(s) => Ok(CartanData::parse(s)?),
        Value::Array(_) => {
            let a: Vec<Vec<i64>> = serde_json::from_value(v.clone())?;
            Ok(CartanData::from_matrix(a)?)
        }
        _ => Err(IoError::Parse("cartan must be a series tag or a matrix".into())),
    }
}

pub fn parse_sigma_value(cartan: &CartanData, v: &Value) -> Res<DiagramAut> {
    match v {
        Value::String(s) => Ok(DiagramAut::parse(cartan, s)?),
        Value::Array(_) => Ok(DiagramAut::parse(cartan, &v.to_string())?),
        Value::Null => Ok(DiagramAut::identity(cartan.rank())),
        _ => Err(IoError::Parse("sigma must be a permutation".into())),
    }
}

fn cartan_value(c: &CartanData) -> Value {
    let r = c.rank();
    if *c == CartanData::type_a(r) {
        Value::String(format!("A{r}"))
    } else if r >= 2 && *c == CartanData::affine_a(r - 1) {
        Value::String(format!("A{}^(1)", r - 1))
    } else {
        serde_json::to_value(&c.a).expect("matrix serializes")
    }
}

fn weight_strings(w: &Weight) -> Vec<String> {
    w.to_strings()
}

pub fn parse_weight(v: &[String]) -> Res<Weight> {
    Ok(Weight::new(v.iter().map(|s| parse_q(s)).collect::<Result<_, _>>()?))
}

impl InstanceDoc {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceDoc {
            cartan: cartan_value(&inst.cartan),
            sigma: serde_json::to_value(inst.aut.perm.iter().map(|p| p + 1).collect::<Vec<_>>()).unwrap(),
            m: inst.order(),
            omega_power: inst.omega_power,
            points: inst.points.iter().map(scalar_string).collect(),
            site_weights: inst.site_weights.iter().map(weight_strings).collect(),
            lambda0: weight_strings(&inst.lambda0),
        }
    }

    pub fn to_instance(&self) -> Res<ProblemInstance> {
        let cartan = parse_cartan_value(&self.cartan)?;
        let aut = parse_sigma_value(&cartan, &self.sigma)?;
        if aut.order != self.m {
            return Err(IoError::Parse(format!("M = {} but sigma has order {}", self.m, aut.order)));
        }
        let points = self.points.iter().map(|s| parse_scalar(s, self.m)).collect::<Res<Vec<_>>>()?;
        let sites = self.site_weights.iter().map(|w| parse_weight(w)).collect::<Res<Vec<_>>>()?;
        let lambda0 = parse_weight(&self.lambda0)?;
        Ok(ProblemInstance::new(cartan, aut, self.omega_power, points, sites, lambda0)?)
    }
}

pub fn instance_from_json(s: &str) -> Res<ProblemInstance> {
    serde_json::from_str::<InstanceDoc>(s)?.to_instance()
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    to_pretty(&InstanceDoc::from_instance(inst))
}

/// Tuples are written with the instance order so `w` parses back consistently.
pub fn tuple_from_json(s: &str, order: u32) -> Res<BetheTuple> {
    serde_json::from_str::<TupleDoc>(s)?.to_tuple(order)
}

pub fn tuple_to_json(y: &BetheTuple) -> String {
    to_pretty(&TupleDoc::from_tuple(y))
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("documents serialize")
}

// ---------- catalogs ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagsDoc {
    pub generic: bool,
    pub cyclotomic: bool,
    pub critical: bool,
}

impl From<&NodeFlags> for FlagsDoc {
    fn from(f: &NodeFlags) -> Self {
        FlagsDoc { generic: f.generic, cyclotomic: f.cyclotomic, critical: f.critical }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// 1-based node index of the generation direction.
    pub direction: Option<usize>,
    pub c: Option<String>,
    pub kind: Option<String>,
    pub depth: usize,
    pub tuple: TupleDoc,
    pub lambda_infinity: Vec<String>,
    pub flags: FlagsDoc,
}

pub fn catalog(graph: &PopulationGraph) -> Vec<CatalogNode> {
    graph
        .nodes
        .iter()
        .map(|n| CatalogNode {
            id: n.id,
            parent: n.parent,
            direction: n.step.as_ref().map(|s| s.direction + 1),
            c: n.step.as_ref().map(|s| scalar_string(&s.c)),
            kind: n.step.as_ref().map(|s| match s.kind {
                StepKind::L1 => "L1".to_string(),
                StepKind::L2 => "L2".to_string(),
            }),
            depth: n.depth,
            tuple: TupleDoc::from_tuple(&n.tuple),
            lambda_infinity: weight_strings(&n.lambda_inf),
            flags: (&n.flags).into(),
        })
        .collect()
}

pub fn catalog_from_json(s: &str) -> Res<Vec<CatalogNode>> {
    Ok(serde_json::from_str(s)?)
}

// ---------- type A ----------

pub fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| scalar_string(&m[(i, j)])).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub r: usize,
    pub p: usize,
    pub t_tilde: Vec<QuasiPolyDoc>,
    pub lambda: Vec<String>,
    pub lambda_inf_tilde: Vec<String>,
    pub exponents: Vec<String>,
    pub dual_exponents: Vec<String>,
}

impl FrameDoc {
    pub fn from_frame(f: &TypeAFrame) -> Self {
        FrameDoc {
            r: f.r,
            p: f.p,
            t_tilde: f.t_tilde.iter().map(QuasiPolyDoc::from_qp).collect(),
            lambda: weight_strings(&f.lambda),
            lambda_inf_tilde: weight_strings(&f.lambda_inf_tilde),
            exponents: f.d.iter().map(r64_string).collect(),
            dual_exponents: f.ddag.iter().map(r64_string).collect(),
        }
    }

    pub fn to_frame(&self, order: u32) -> Res<TypeAFrame> {
        let t = self.t_tilde.iter().map(|p| p.to_qp(order)).collect::<Res<Vec<_>>>()?;
        TypeAFrame::new(self.p, t, parse_weight(&self.lambda)?, parse_weight(&self.lambda_inf_tilde)?)
            .map_err(|e| IoError::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub frame: FrameDoc,
    pub basis: Vec<QuasiPolyDoc>,
    pub b_matrix: Option<Vec<Vec<String>>>,
}

impl SpaceDoc {
    pub fn from_space(s: &QPSpace, gram: Option<&Matrix>) -> Self {
        SpaceDoc {
            frame: FrameDoc::from_frame(&s.frame),
            basis: s.basis.iter().map(QuasiPolyDoc::from_qp).collect(),
            b_matrix: gram.map(matrix_strings),
        }
    }

    pub fn to_space(&self, order: u32) -> Res<QPSpace> {
        let frame = self.frame.to_frame(order)?;
        let basis = self.basis.iter().map(|p| p.to_qp(order)).collect::<Res<Vec<_>>>()?;
        QPSpace::new(frame, &basis).map_err(|e| IoError::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagDoc {
    pub basis: Vec<QuasiPolyDoc>,
}

impl FlagDoc {
    pub fn from_flag(f: &Flag) -> Self {
        FlagDoc { basis: f.basis.iter().map(QuasiPolyDoc::from_qp).collect() }
    }

    pub fn to_flag(&self, order: u32) -> Res<Flag> {
        Ok(Flag { basis: self.basis.iter().map(|p| p.to_qp(order)).collect::<Res<Vec<_>>>()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameReportDoc {
    pub degrees: bool,
    pub regular: bool,
    pub at_zero: bool,
    pub notes: Vec<String>,
    pub top_wronskian: Option<String>,
}

impl From<&FrameReport> for FrameReportDoc {
    fn from(r: &FrameReport) -> Self {
        FrameReportDoc {
            degrees: r.degrees,
            regular: r.regular,
            at_zero: r.at_zero,
            notes: r.notes.clone(),
            top_wronskian: r.top_wronskian.as_ref().map(scalar_string),
        }
    }
}
