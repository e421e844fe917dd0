//! Problem-file schema and its translation into library types.

use std::fmt;

use fuchsian_pick::blaschke::BlaschkeProduct;
use fuchsian_pick::linalg::CMatrix;
use fuchsian_pick::mobius::DiskAutomorphism;
use fuchsian_pick::orbit::{enumerate_orbit, stabilizer_order_origin, GroupPresentation, OrbitOptions};
use fuchsian_pick::pick::Targets;
use fuchsian_pick::{Complex64, DiskPoint, Error};
use serde::Deserialize;
use serde_json::Value;

pub const DEFAULT_DEPTH: usize = 200;

/// Word length searched when looking for elements fixing the origin.
const STABILIZER_SEARCH: usize = 6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub truncation: Truncation,
    pub nodes: Option<Vec<[f64; 2]>>,
    pub targets: Option<Value>,
    pub kernel: Option<KernelChoice>,
    #[serde(default)]
    pub options: CommandOptions,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum GroupSpec {
    #[serde(rename = "cyclic")]
    Cyclic { a: f64 },
    #[serde(rename = "z2z2")]
    Z2Z2 { a: f64 },
    /// Each generator is `[p, q, r, s]` for `(pz + q)/(rz + s)`.
    #[serde(rename = "generic")]
    Generic { generators: Vec<[[f64; 2]; 4]> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub depth: Option<usize>,
    pub strict: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum KernelChoice {
    #[serde(rename = "szego")]
    Szego,
    /// Pulled back along `B^power` with `B` the orbit product of the origin.
    #[serde(rename = "composed")]
    Composed { power: Option<u32> },
    #[serde(rename = "orbit")]
    Orbit { depth: Option<usize> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandOptions {
    pub base: Option<[f64; 2]>,
    pub points: Option<Vec<[f64; 2]>>,
    pub multiplicity: Option<usize>,
    pub words: Option<Vec<String>>,
    pub point: Option<[f64; 2]>,
    pub power: Option<u32>,
    pub k_max: Option<u64>,
    pub max_power: Option<usize>,
    pub n_quad: Option<usize>,
}

/// What went wrong, already sorted by exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Library errors with the offending field prefixed.
pub fn at(field: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        if e.is_numerical() {
            Failure::Numerical(format!("{field}: {e}"))
        } else {
            Failure::Input(format!("{field}: {e}"))
        }
    }
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn disk_point(v: [f64; 2], field: &str) -> Result<DiskPoint, Failure> {
    DiskPoint::new(complex(v)).map_err(at(field))
}

pub fn disk_points(v: &[[f64; 2]], field: &str) -> Result<Vec<DiskPoint>, Failure> {
    v.iter().enumerate().map(|(i, &z)| disk_point(z, &format!("{field}[{i}]"))).collect()
}

pub fn parse(text: &str) -> Result<ProblemFile, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input(e.to_string()))
}

impl ProblemFile {
    pub fn group(&self) -> Result<GroupPresentation, Failure> {
        match self.group.as_ref().ok_or_else(|| Failure::input("group: missing"))? {
            GroupSpec::Cyclic { a } => GroupPresentation::cyclic(*a).map_err(at("group.a")),
            GroupSpec::Z2Z2 { a } => GroupPresentation::z2z2(*a).map_err(at("group.a")),
            GroupSpec::Generic { generators } => {
                let maps = generators
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        DiskAutomorphism::canonicalize(complex(c[0]), complex(c[1]), complex(c[2]), complex(c[3]))
                            .map_err(at(&format!("group.generators[{i}]")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GroupPresentation::generic(maps).map_err(at("group.generators"))
            }
        }
    }

    pub fn nodes(&self) -> Result<Vec<DiskPoint>, Failure> {
        let nodes = self.nodes.as_ref().ok_or_else(|| Failure::input("nodes: missing"))?;
        if nodes.is_empty() {
            return Err(Failure::input("nodes: at least one node is required"));
        }
        disk_points(nodes, "nodes")
    }

    pub fn targets(&self) -> Result<Targets, Failure> {
        let v = self.targets.as_ref().ok_or_else(|| Failure::input("targets: missing"))?;
        parse_targets(v)
    }

    /// Command-line depth, then the kernel's, then the file's truncation.
    pub fn depth(&self, flag: Option<usize>) -> usize {
        let kernel_depth = match &self.kernel {
            Some(KernelChoice::Orbit { depth }) => *depth,
            _ => None,
        };
        flag.or(kernel_depth).or(self.truncation.depth).unwrap_or(DEFAULT_DEPTH)
    }

    pub fn strict(&self) -> bool {
        self.truncation.strict.unwrap_or(true)
    }

    /// The orbit Blaschke product of the origin with every zero repeated
    /// `multiplicity` times (default: the order of the origin's stabilizer).
    pub fn orbit_product(&self, depth: usize, multiplicity: Option<usize>) -> Result<BlaschkeProduct, Failure> {
        let group = self.group()?;
        let m = multiplicity.unwrap_or_else(|| stabilizer_order_origin(&group, STABILIZER_SEARCH));
        let orbit = enumerate_orbit(&group, DiskPoint::origin(), OrbitOptions::new(depth)).map_err(at("group"))?;
        BlaschkeProduct::from_orbit(&orbit, m, self.strict()).map_err(at("truncation"))
    }
}

fn parse_complex(v: &Value, field: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::input(format!("{field}: expected [re, im]"));
    let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
    match (arr[0].as_f64(), arr[1].as_f64()) {
        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
        _ => Err(bad()),
    }
}

/// Scalar targets are `[re, im]` pairs; matrix targets are `k×k` arrays of
/// them.
pub fn parse_targets(v: &Value) -> Result<Targets, Failure> {
    let list = v.as_array().ok_or_else(|| Failure::input("targets: expected an array"))?;
    let is_matrix = list.first().and_then(|t| t.as_array()).and_then(|r| r.first()).is_some_and(Value::is_array);
    if !is_matrix {
        let values = list
            .iter()
            .enumerate()
            .map(|(i, t)| parse_complex(t, &format!("targets[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Targets::Scalar(values));
    }
    let mut blocks = Vec::with_capacity(list.len());
    for (i, t) in list.iter().enumerate() {
        let field = format!("targets[{i}]");
        let rows = t.as_array().ok_or_else(|| Failure::input(format!("{field}: expected a square matrix")))?;
        let k = rows.len();
        let mut parsed = Vec::with_capacity(k);
        for (r, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|row| row.len() == k)
                .ok_or_else(|| Failure::input(format!("{field}[{r}]: expected a row of {k} entries")))?;
            parsed.push(
                row.iter()
                    .enumerate()
                    .map(|(c, e)| parse_complex(e, &format!("{field}[{r}][{c}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        blocks.push(CMatrix::from_rows(parsed).map_err(at(&field))?);
    }
    Ok(Targets::Matrix(blocks))
}
