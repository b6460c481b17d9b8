//! Problem files: named objects, subspaces and tasks, plus validation into
//! core types before anything is computed.

use std::collections::BTreeMap;

use serde::Deserialize;
use shiftinv_core::invariance::ShiftCondition;
use shiftinv_core::{
    BlaschkeProduct, LaurentMatrix, LaurentPoly, MonomialSubspace, OperatorSpec, SpanSubspace,
    SubspaceModel, TaylorPoly, Tolerances, C64,
};

use crate::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub workspace: Workspace,
    #[serde(default)]
    pub objects: Objects,
    #[serde(default)]
    pub subspaces: BTreeMap<String, SubspaceDecl>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default)]
    pub tolerances: TolDecl,
}

fn default_cap() -> usize {
    64
}

impl Default for Workspace {
    fn default() -> Self {
        Self {
            cap: default_cap(),
            tolerances: TolDecl::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolDecl {
    pub membership: Option<f64>,
    pub rank: Option<f64>,
    pub analyticity: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objects {
    #[serde(default)]
    pub polys: BTreeMap<String, Vec<Pair>>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<EntryDecl>>>,
    #[serde(default)]
    pub blaschke: BTreeMap<String, BlaschkeDecl>,
}

/// A matrix cell: plain ascending coefficients, or a Laurent polynomial
/// starting at index `lo`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EntryDecl {
    Taylor(Vec<Pair>),
    Laurent {
        lo: i64,
        coeffs: Vec<Pair>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeDecl {
    #[serde(default = "unit_lambda")]
    pub lambda: Pair,
    pub zeros: Vec<Pair>,
}

fn unit_lambda() -> Pair {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SubspaceDecl {
    /// Generators by polynomial name; `cap` defaults to the workspace cap.
    Span {
        generators: Vec<String>,
        cap: Option<usize>,
    },
    Monomial {
        generators: Vec<usize>,
        #[serde(default)]
        exceptional: Vec<usize>,
        cap: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorDecl {
    Shift { k: usize },
    Coshift { k: usize },
    Toeplitz { blaschke: String, n: usize },
    ToeplitzAdjoint { blaschke: String, n: usize },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDecl {
    pub gamma: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    #[default]
    Toeplitz,
    Shift,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskDecl {
    CheckInvariance {
        name: Option<String>,
        subspace: String,
        operators: Vec<OperatorDecl>,
        claims: Option<Vec<Claim>>,
    },
    CheckNearInvariance {
        name: Option<String>,
        subspace: String,
        operators: Vec<OperatorDecl>,
        claims: Option<Vec<Claim>>,
    },
    VerifyTheta {
        name: Option<String>,
        theta: String,
        m: usize,
        conditions: Vec<ConditionDecl>,
        cap: Option<usize>,
        claim: Option<Claim>,
    },
    Hitt {
        name: Option<String>,
        subspace: String,
        m: usize,
        /// Expected kernel entries by polynomial name; `null` for an entry
        /// expected to vanish.
        expected_kernels: Option<Vec<Option<String>>>,
        theta: Option<String>,
        #[serde(default)]
        conditions: Vec<ConditionDecl>,
    },
    BlaschkeTransfer {
        name: Option<String>,
        subspace: String,
        blaschke: String,
        n: usize,
        depth: Option<usize>,
        #[serde(default)]
        picture: Picture,
    },
    BuildSigma {
        name: Option<String>,
        m: usize,
        gamma: usize,
        k: usize,
    },
}

impl TaskDecl {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::CheckInvariance { .. } => "check-invariance",
            Self::CheckNearInvariance { .. } => "check-near-invariance",
            Self::VerifyTheta { .. } => "verify-theta",
            Self::Hitt { .. } => "hitt",
            Self::BlaschkeTransfer { .. } => "blaschke-transfer",
            Self::BuildSigma { .. } => "build-sigma",
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Self::CheckInvariance { name, .. }
            | Self::CheckNearInvariance { name, .. }
            | Self::VerifyTheta { name, .. }
            | Self::Hitt { name, .. }
            | Self::BlaschkeTransfer { name, .. }
            | Self::BuildSigma { name, .. } => name.as_deref(),
        }
    }
}

/// Command-line overrides applied on top of the file's workspace.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub cap: Option<usize>,
    pub tol: Option<f64>,
}

/// A task with every name resolved.
#[derive(Debug, Clone)]
pub enum Task {
    Invariance {
        near: bool,
        model: SubspaceModel,
        operators: Vec<OperatorSpec>,
        claims: Option<Vec<Claim>>,
    },
    Theta {
        theta: LaurentMatrix,
        m: usize,
        conditions: Vec<ShiftCondition>,
        cap: usize,
        claim: Option<Claim>,
    },
    Hitt {
        space: SpanSubspace<TaylorPoly>,
        m: usize,
        expected: Option<Vec<TaylorPoly>>,
        certify: Option<(LaurentMatrix, Vec<ShiftCondition>)>,
    },
    Transfer {
        space: SpanSubspace<TaylorPoly>,
        symbol: BlaschkeProduct,
        n: usize,
        depth: Option<usize>,
        picture: Picture,
    },
    Sigma {
        m: usize,
        gamma: usize,
        k: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub cap: usize,
    pub tol: Tolerances,
    pub tasks: Vec<(String, Option<String>, Task)>,
}

pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn c64(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn finite(field: &str, pairs: &[Pair]) -> Result<(), CliError> {
    if pairs.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(field, "non-finite coefficient"))
    }
}

struct Resolver<'a> {
    file: &'a ProblemFile,
    cap: usize,
    tol: Tolerances,
}

impl Resolver<'_> {
    fn poly(&self, field: &str, name: &str, cap: usize) -> Result<TaylorPoly, CliError> {
        let pairs = self
            .file
            .objects
            .polys
            .get(name)
            .ok_or_else(|| invalid(field, format!("unknown polynomial '{name}'")))?;
        finite(&format!("objects.polys.{name}"), pairs)?;
        TaylorPoly::new(pairs.iter().map(c64).collect(), cap)
            .map_err(|e| invalid(format!("objects.polys.{name}"), e.to_string()))
    }

    fn matrix(&self, field: &str, name: &str) -> Result<LaurentMatrix, CliError> {
        let rows = self
            .file
            .objects
            .matrices
            .get(name)
            .ok_or_else(|| invalid(field, format!("unknown matrix '{name}'")))?;
        let here = format!("objects.matrices.{name}");
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(invalid(here, "rows must be nonempty and of equal length"));
        }
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for cell in rows.iter().flatten() {
            let (lo, coeffs) = match cell {
                EntryDecl::Taylor(c) => (0, c),
                EntryDecl::Laurent { lo, coeffs } => (*lo, coeffs),
            };
            finite(&here, coeffs)?;
            entries.push(LaurentPoly::new(lo, coeffs.iter().map(c64).collect()));
        }
        LaurentMatrix::new(rows.len(), cols, entries).map_err(|e| invalid(here, e.to_string()))
    }

    fn theta(&self, field: &str, name: &str, m: usize) -> Result<LaurentMatrix, CliError> {
        let theta = self.matrix(field, name)?;
        if theta.rows() != m {
            return Err(invalid(
                field,
                format!("matrix '{name}' has {} rows, m = {m}", theta.rows()),
            ));
        }
        let a = theta.is_analytic(self.tol.analyticity);
        if !a.analytic {
            return Err(invalid(
                field,
                format!("matrix '{name}' has negative-index coefficients (|c| = {:.3e})", a.witness),
            ));
        }
        Ok(theta)
    }

    fn blaschke(&self, field: &str, name: &str) -> Result<BlaschkeProduct, CliError> {
        let d = self
            .file
            .objects
            .blaschke
            .get(name)
            .ok_or_else(|| invalid(field, format!("unknown Blaschke product '{name}'")))?;
        let here = format!("objects.blaschke.{name}");
        finite(&here, &d.zeros)?;
        finite(&here, &[d.lambda])?;
        BlaschkeProduct::new(c64(&d.lambda), d.zeros.iter().map(c64).collect())
            .map_err(|e| invalid(here, e.to_string()))
    }

    fn subspace(&self, field: &str, name: &str) -> Result<SubspaceModel, CliError> {
        let decl = self
            .file
            .subspaces
            .get(name)
            .ok_or_else(|| invalid(field, format!("unknown subspace '{name}'")))?;
        let here = format!("subspaces.{name}");
        match decl {
            SubspaceDecl::Span { generators, cap } => {
                let cap = cap.unwrap_or(self.cap);
                let gens = generators
                    .iter()
                    .map(|g| self.poly(&here, g, cap))
                    .collect::<Result<Vec<_>, _>>()?;
                let space = SpanSubspace::orthonormalize(gens, self.tol.rank)
                    .map_err(|e| invalid(here, e.to_string()))?;
                Ok(SubspaceModel::Span(space))
            }
            SubspaceDecl::Monomial {
                generators,
                exceptional,
                cap,
            } => MonomialSubspace::new(generators, exceptional, cap.unwrap_or(self.cap))
                .map(SubspaceModel::Monomial)
                .map_err(|e| invalid(here, e.to_string())),
        }
    }

    fn span(&self, field: &str, name: &str) -> Result<SpanSubspace<TaylorPoly>, CliError> {
        self.subspace(field, name)?
            .to_span(self.tol.rank)
            .map_err(|e| invalid(field, e.to_string()))
    }

    fn operator(&self, field: &str, op: &OperatorDecl) -> Result<OperatorSpec, CliError> {
        let spec = match op {
            OperatorDecl::Shift { k } => OperatorSpec::ShiftPow(*k),
            OperatorDecl::Coshift { k } => OperatorSpec::CoshiftPow(*k),
            OperatorDecl::Toeplitz { blaschke, n } => OperatorSpec::Toeplitz {
                symbol: self.blaschke(field, blaschke)?,
                n: *n,
            },
            OperatorDecl::ToeplitzAdjoint { blaschke, n } => OperatorSpec::ToeplitzAdjoint {
                symbol: self.blaschke(field, blaschke)?,
                n: *n,
            },
        };
        spec.validate().map_err(|e| invalid(field, e.to_string()))?;
        Ok(spec)
    }

    fn conditions(
        &self,
        field: &str,
        m: usize,
        conds: &[ConditionDecl],
    ) -> Result<Vec<ShiftCondition>, CliError> {
        conds
            .iter()
            .map(|c| {
                if c.gamma == 0 || c.gamma >= m || c.k == 0 {
                    Err(invalid(
                        field,
                        format!("condition (gamma={}, k={}) needs 1 <= gamma < m and k >= 1", c.gamma, c.k),
                    ))
                } else {
                    Ok(ShiftCondition {
                        gamma: c.gamma,
                        k: c.k,
                    })
                }
            })
            .collect()
    }
}

fn check_m(field: &str, m: usize) -> Result<(), CliError> {
    if m < 2 {
        Err(invalid(field, "m must be >= 2"))
    } else {
        Ok(())
    }
}

fn check_claims(field: &str, claims: &Option<Vec<Claim>>, len: usize) -> Result<(), CliError> {
    match claims {
        Some(c) if c.len() != len => Err(invalid(
            field,
            format!("{} claims for {len} operators", c.len()),
        )),
        _ => Ok(()),
    }
}

fn positive_tol(field: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    match v {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(invalid(field, "tolerance must be positive")),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

/// Resolves every name and parameter; no task runs unless all of them pass.
pub fn validate(file: &ProblemFile, overrides: Overrides) -> Result<Problem, CliError> {
    let defaults = Tolerances::default();
    let t = &file.workspace.tolerances;
    let mut tol = Tolerances {
        membership: positive_tol("workspace.tolerances.membership", t.membership, defaults.membership)?,
        rank: positive_tol("workspace.tolerances.rank", t.rank, defaults.rank)?,
        analyticity: positive_tol("workspace.tolerances.analyticity", t.analyticity, defaults.analyticity)?,
    };
    if let Some(x) = overrides.tol {
        tol.membership = positive_tol("--tol", Some(x), x)?;
    }
    let cap = overrides.cap.unwrap_or(file.workspace.cap);
    if cap == 0 {
        return Err(invalid("workspace.cap", "cap must be >= 1"));
    }
    let r = Resolver { file, cap, tol };
    let mut tasks = Vec::with_capacity(file.tasks.len());
    for (i, decl) in file.tasks.iter().enumerate() {
        let field = format!("tasks[{i}]");
        let f = field.as_str();
        let task = match decl {
            TaskDecl::CheckInvariance {
                subspace,
                operators,
                claims,
                ..
            }
            | TaskDecl::CheckNearInvariance {
                subspace,
                operators,
                claims,
                ..
            } => {
                if operators.is_empty() {
                    return Err(invalid(f, "operator list is empty"));
                }
                check_claims(f, claims, operators.len())?;
                Task::Invariance {
                    near: matches!(decl, TaskDecl::CheckNearInvariance { .. }),
                    model: r.subspace(f, subspace)?,
                    operators: operators
                        .iter()
                        .map(|o| r.operator(f, o))
                        .collect::<Result<_, _>>()?,
                    claims: claims.clone(),
                }
            }
            TaskDecl::VerifyTheta {
                theta,
                m,
                conditions,
                cap: task_cap,
                claim,
                ..
            } => {
                check_m(f, *m)?;
                if conditions.is_empty() {
                    return Err(invalid(f, "condition list is empty"));
                }
                Task::Theta {
                    theta: r.theta(f, theta, *m)?,
                    m: *m,
                    conditions: r.conditions(f, *m, conditions)?,
                    cap: task_cap.unwrap_or(cap),
                    claim: *claim,
                }
            }
            TaskDecl::Hitt {
                subspace,
                m,
                expected_kernels,
                theta,
                conditions,
                ..
            } => {
                check_m(f, *m)?;
                let space = r.span(f, subspace)?;
                let expected = match expected_kernels {
                    None => None,
                    Some(list) => {
                        if list.len() != *m {
                            return Err(invalid(f, format!("{} expected kernels for m = {m}", list.len())));
                        }
                        Some(
                            list.iter()
                                .map(|e| match e {
                                    Some(name) => r.poly(f, name, space.cap()),
                                    None => Ok(TaylorPoly::zero(space.cap())),
                                })
                                .collect::<Result<Vec<_>, _>>()?,
                        )
                    }
                };
                let certify = match theta {
                    None => {
                        if !conditions.is_empty() {
                            return Err(invalid(f, "conditions given without theta"));
                        }
                        None
                    }
                    Some(name) => {
                        if conditions.is_empty() {
                            return Err(invalid(f, "certification needs at least one condition"));
                        }
                        Some((r.theta(f, name, *m)?, r.conditions(f, *m, conditions)?))
                    }
                };
                Task::Hitt {
                    space,
                    m: *m,
                    expected,
                    certify,
                }
            }
            TaskDecl::BlaschkeTransfer {
                subspace,
                blaschke,
                n,
                depth,
                picture,
                ..
            } => {
                if *n == 0 {
                    return Err(invalid(f, "n must be >= 1"));
                }
                if matches!(depth, Some(0)) {
                    return Err(invalid(f, "depth must be >= 1"));
                }
                Task::Transfer {
                    space: r.span(f, subspace)?,
                    symbol: r.blaschke(f, blaschke)?,
                    n: *n,
                    depth: *depth,
                    picture: *picture,
                }
            }
            TaskDecl::BuildSigma { m, gamma, k, .. } => {
                check_m(f, *m)?;
                r.conditions(f, *m, &[ConditionDecl { gamma: *gamma, k: *k }])?;
                Task::Sigma {
                    m: *m,
                    gamma: *gamma,
                    k: *k,
                }
            }
        };
        tasks.push((decl.kind().to_string(), decl.name().map(str::to_string), task));
    }
    Ok(Problem { cap, tol, tasks })
}
