//! Report model. Every float is rounded to 12 significant digits when it
//! enters the report, so serialized output is stable across runs.

use std::fmt::Write as _;

use serde::Serialize;
use shiftinv_core::invariance::{InvarianceReport, SigmaProduct, Stage, Witness};
use shiftinv_core::{LaurentMatrix, TaylorPoly, C64};

use crate::problem::Claim;

/// `x` rounded to 12 significant digits; `-0` becomes `0`.
pub fn sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x.is_nan() { x } else { x + 0.0 };
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    r + 0.0
}

pub fn pair(c: C64) -> [f64; 2] {
    [sig(c.re), sig(c.im)]
}

/// Coefficients up to the last one that survives rounding.
pub fn coeff_list(coeffs: &[C64]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = coeffs.iter().map(|&c| pair(c)).collect();
    while out.last().is_some_and(|p| p[0] == 0.0 && p[1] == 0.0) {
        out.pop();
    }
    out
}

pub fn poly_list(p: &TaylorPoly) -> Vec<[f64; 2]> {
    coeff_list(p.coeffs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn from_pass(p: bool) -> Self {
        if p {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub cap: usize,
    pub tolerances: TolOut,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct TolOut {
    pub membership: f64,
    pub rank: f64,
    pub analyticity: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<TaskResult>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TaskResult {
    Invariance(InvarianceResult),
    Theta(ThetaResult),
    Hitt(Box<HittResult>),
    Transfer(Box<TransferResult>),
    Sigma(SigmaResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOut {
    pub element: Vec<Vec<[f64; 2]>>,
    pub image: Vec<Vec<[f64; 2]>>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<[usize; 2]>,
}

impl From<&Witness> for WitnessOut {
    fn from(w: &Witness) -> Self {
        Self {
            element: w.element.iter().map(|c| coeff_list(c)).collect(),
            image: w.image.iter().map(|c| coeff_list(c)).collect(),
            residual: sig(w.residual),
            exponents: w.exponents.map(|(a, b)| [a, b]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub operator: String,
    pub verdict: Status,
    pub max_residual: f64,
    pub tested_dim: usize,
    pub untested_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection_dim: Option<usize>,
    /// Degree cap the verdict refers to.
    pub truncation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees_with_claim: Option<bool>,
}

impl CheckOut {
    pub fn new(r: &InvarianceReport, claim: Option<Claim>) -> Self {
        let verdict = Status::from_pass(r.verdict.passed());
        let claim = claim.map(|c| Status::from_pass(c == Claim::Pass));
        Self {
            operator: r.operator.clone(),
            verdict,
            max_residual: sig(r.max_residual),
            tested_dim: r.tested_dim,
            untested_dim: r.untested_dim,
            intersection_dim: r.intersection_dim,
            truncation: r.cap,
            witness: r.witness.as_ref().map(WitnessOut::from),
            claim,
            agrees_with_claim: claim.map(|c| c == verdict),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceResult {
    pub model: &'static str,
    pub checks: Vec<CheckOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryOut {
    pub lo: i64,
    pub coeffs: Vec<[f64; 2]>,
}

pub type MatrixOut = Vec<Vec<EntryOut>>;

pub fn matrix_out(a: &LaurentMatrix) -> MatrixOut {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    let p = a.entry(i, j);
                    let terms: Vec<(i64, C64)> = p
                        .terms()
                        .filter(|(_, c)| pair(*c) != [0.0, 0.0])
                        .collect();
                    match (terms.first(), terms.last()) {
                        (Some(&(lo, _)), Some(&(hi, _))) => EntryOut {
                            lo,
                            coeffs: (lo..=hi).map(|e| pair(p.coeff(e))).collect(),
                        },
                        _ => EntryOut {
                            lo: 0,
                            coeffs: Vec::new(),
                        },
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StageOut {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance: Option<CheckOut>,
}

impl From<&Stage> for StageOut {
    fn from(s: &Stage) -> Self {
        Self {
            name: s.name.clone(),
            passed: s.passed,
            value: sig(s.value),
            invariance: s.invariance.as_ref().map(|r| CheckOut::new(r, None)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductOut {
    pub gamma: usize,
    pub k: usize,
    /// `Θ* Σ Θ`.
    pub product: MatrixOut,
    pub analytic: bool,
    pub negative_part: f64,
    /// `‖(I − ΘΘ*) Σ Θ‖`.
    pub range_inclusion: f64,
}

impl From<&SigmaProduct> for ProductOut {
    fn from(p: &SigmaProduct) -> Self {
        Self {
            gamma: p.condition.gamma,
            k: p.condition.k,
            product: matrix_out(&p.product),
            analytic: p.analyticity.analytic,
            negative_part: sig(p.analyticity.witness),
            range_inclusion: sig(p.range_inclusion),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaResult {
    pub m: usize,
    pub cap: usize,
    pub stages: Vec<StageOut>,
    pub products: Vec<ProductOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees_with_claim: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelOut {
    pub coeffs: Vec<[f64; 2]>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_expected: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionOut {
    /// Rows `A(l)` of `Φ`, as `[component][l]`.
    pub phi: Vec<Vec<[f64; 2]>>,
    pub residual: f64,
    pub parseval_defect: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HittResult {
    pub m: usize,
    pub dim: usize,
    pub cap: usize,
    pub kernels: Vec<KernelOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition_error: Option<String>,
    pub decompositions: Vec<DecompositionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_coshift: Option<CheckOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<CertificationOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationOut {
    pub passed: bool,
    pub stages: Vec<StageOut>,
    pub products: Vec<ProductOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferResult {
    pub m: usize,
    pub n: usize,
    pub depth: usize,
    pub toeplitz_cap: usize,
    pub shift_window: usize,
    pub dim: usize,
    pub shift_invariance: CheckOut,
    pub toeplitz_invariance: CheckOut,
    pub shift_near_invariance: CheckOut,
    pub toeplitz_near_invariance: CheckOut,
    pub conjugation_residual: f64,
    pub verdicts_agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaResult {
    pub m: usize,
    pub gamma: usize,
    pub k: usize,
    pub sigma: MatrixOut,
    pub inner: bool,
    pub deviation: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.summary.passed == self.summary.total {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let name = t.name.as_deref().map(|n| format!(" {n}")).unwrap_or_default();
            let _ = writeln!(out, "task {} [{}]{}: {}", t.index, t.kind, name, t.status.label());
            if let Some(e) = &t.error {
                let _ = writeln!(out, "  error: {e}");
            }
            if let Some(r) = &t.result {
                text_result(&mut out, r);
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} tasks, {} pass, {} fail, {} error",
            s.total, s.passed, s.failed, s.errors
        );
        out
    }
}

/// Compact display of a rounded number.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Coefficients below this are left out of text output.
const TEXT_FLOOR: f64 = 1e-13;

/// Terms shown per polynomial in text output.
const TEXT_TERMS: usize = 8;

fn fmt_poly(c: &[[f64; 2]], lo: i64) -> String {
    let shown: Vec<(usize, &[f64; 2])> = c
        .iter()
        .enumerate()
        .filter(|(_, p)| p[0].hypot(p[1]) > TEXT_FLOOR)
        .collect();
    let mut terms: Vec<String> = shown
        .iter()
        .take(TEXT_TERMS)
        .map(|&(i, p)| {
            let coeff = if p[1] == 0.0 {
                num(p[0])
            } else if p[0] == 0.0 {
                format!("{}i", num(p[1]))
            } else {
                format!("({}{}{}i)", num(p[0]), if p[1] < 0.0 { "-" } else { "+" }, num(p[1].abs()))
            };
            let coeff = match coeff.as_str() {
                "1" if lo + i as i64 != 0 => String::new(),
                "-1" if lo + i as i64 != 0 => "-".into(),
                _ => coeff,
            };
            match lo + i as i64 {
                0 => coeff,
                1 => format!("{coeff}z"),
                e => format!("{coeff}z^{e}"),
            }
        })
        .collect();
    if shown.len() > TEXT_TERMS {
        terms.push(format!("... ({} more)", shown.len() - TEXT_TERMS));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn fmt_vector(v: &[Vec<[f64; 2]>]) -> String {
    let parts: Vec<String> = v.iter().map(|c| fmt_poly(c, 0)).collect();
    format!("({})", parts.join(", "))
}

fn text_check(out: &mut String, indent: &str, c: &CheckOut) {
    let _ = write!(
        out,
        "{indent}{}: {} (max residual {}, tested {}, untested {}, at truncation {})",
        c.operator,
        c.verdict.label(),
        num(c.max_residual),
        c.tested_dim,
        c.untested_dim,
        c.truncation
    );
    if let Some(a) = c.agrees_with_claim {
        let _ = write!(out, " claim {}", if a { "agrees" } else { "DIFFERS" });
    }
    out.push('\n');
    if let Some(w) = &c.witness {
        match w.exponents {
            Some([a, b]) => {
                let _ = writeln!(out, "{indent}  witness z^{a} -> z^{b}");
            }
            None => {
                let _ = writeln!(
                    out,
                    "{indent}  witness {} -> {} (residual {})",
                    fmt_vector(&w.element),
                    fmt_vector(&w.image),
                    num(w.residual)
                );
            }
        }
    }
}

fn text_matrix(out: &mut String, indent: &str, m: &MatrixOut) {
    for row in m {
        let cells: Vec<String> = row.iter().map(|e| fmt_poly(&e.coeffs, e.lo)).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(", "));
    }
}

fn text_stages(out: &mut String, stages: &[StageOut], products: &[ProductOut]) {
    for s in stages {
        let _ = writeln!(
            out,
            "  {}: {} ({})",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            num(s.value)
        );
    }
    for p in products {
        let _ = writeln!(
            out,
            "  Theta* Sigma(gamma={}, k={}) Theta, range inclusion defect {}:",
            p.gamma, p.k, num(p.range_inclusion)
        );
        text_matrix(out, "    ", &p.product);
    }
}

fn text_result(out: &mut String, r: &TaskResult) {
    match r {
        TaskResult::Invariance(r) => {
            for c in &r.checks {
                text_check(out, "  ", c);
            }
        }
        TaskResult::Theta(r) => {
            text_stages(out, &r.stages, &r.products);
            if let Some(a) = r.agrees_with_claim {
                let _ = writeln!(out, "  claim {}", if a { "agrees" } else { "DIFFERS" });
            }
        }
        TaskResult::Hitt(r) => {
            let _ = writeln!(out, "  dim M = {}, m = {}, cap {}", r.dim, r.m, r.cap);
            for (i, k) in r.kernels.iter().enumerate() {
                let _ = write!(out, "  e_{i} = {}", fmt_poly(&k.coeffs, 0));
                if let Some(m) = k.matches_expected {
                    let err = num(k.expected_error.unwrap_or(0.0));
                    let tag = if m { "matches" } else { "DIFFERS from" };
                    let _ = write!(out, " ({tag} expected, error {err})");
                }
                out.push('\n');
            }
            if let Some(e) = &r.decomposition_error {
                let _ = writeln!(out, "  decomposition: {e}");
            }
            if let Some(g) = r.gram_defect {
                let _ = writeln!(out, "  J_m Gram defect {}", num(g));
            }
            if let Some(c) = &r.k_coshift {
                text_check(out, "  K under ", c);
            }
            if let Some(c) = &r.certification {
                let _ = writeln!(out, "  certification: {}", if c.passed { "PASS" } else { "FAIL" });
                text_stages(out, &c.stages, &c.products);
            }
        }
        TaskResult::Transfer(r) => {
            let _ = writeln!(
                out,
                "  m = {}, n = {}, depth {}, conjugation residual {}",
                r.m, r.n, r.depth, num(r.conjugation_residual)
            );
            for c in [
                &r.toeplitz_invariance,
                &r.shift_invariance,
                &r.toeplitz_near_invariance,
                &r.shift_near_invariance,
            ] {
                text_check(out, "  ", c);
            }
            let _ = writeln!(out, "  verdicts agree: {}", r.verdicts_agree);
        }
        TaskResult::Sigma(r) => {
            let _ = writeln!(
                out,
                "  Sigma(m={}, gamma={}, k={}), inner {} (deviation {}):",
                r.m, r.gamma, r.k, r.inner, num(r.deviation)
            );
            text_matrix(out, "    ", &r.sigma);
        }
    }
}
