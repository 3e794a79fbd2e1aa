//! Task files: TOML in, validated [`TaskSpec`] out.

use rigcoh::derham::RigidParams;
use rigcoh::polyalg::{parse_poly, MonomialOrder, SparsePoly};
use rigcoh::scalars::is_prime;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Rigid,
    Hp,
    Invariants,
    Infinitesimal,
    TubeIdentity,
    SpectralRadius,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Rational,
    Padic,
    #[default]
    Both,
}

impl Backend {
    pub fn rational(self) -> bool {
        self != Backend::Padic
    }

    pub fn padic(self) -> bool {
        self != Backend::Rational
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftOrder {
    #[default]
    Grevlex,
    Lex,
}

impl LiftOrder {
    pub fn order(self) -> MonomialOrder {
        match self {
            LiftOrder::Grevlex => MonomialOrder::GrevLex,
            LiftOrder::Lex => MonomialOrder::Lex,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AlgebraSpec {
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_weights: Option<Vec<u32>>,
}

/// `coeff · d(x_{i_1}) ∧ … ∧ d(x_{i_k})`, given by variable names.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub coeff: Spanned<String>,
    pub d: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RigidSection {
    #[serde(default, flatten)]
    pub params: RigidParams,
    /// Forms required to be non-exact in the quotient de Rham complex at every degree cap.
    #[serde(default)]
    pub nonexact: Vec<FormSpec>,
    /// Rebuild the presentation through tube systems lifted under each order.
    #[serde(default)]
    pub lift_orders: Vec<LiftOrder>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InfinitesimalSection {
    pub jgens: Vec<Spanned<String>>,
    pub order: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TubeSection {
    /// Generators of `J`, one of them `p`.
    pub jgens: Vec<Spanned<String>>,
    pub m: Vec<u32>,
    #[serde(default)]
    pub lift_order: LiftOrder,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectralSection {
    pub spans: Vec<Vec<Spanned<String>>>,
    pub j: Vec<u32>,
    pub c: Vec<u32>,
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MixedComplex,
    Hkr,
    HhSlices,
    SignConvention,
    Noninjective,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InvariantsSection {
    pub suites: Vec<Suite>,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_random_algebras")]
    pub random_algebras: usize,
    #[serde(default = "d_chains")]
    pub chains_per_algebra: usize,
    #[serde(default = "d_tensor_degree")]
    pub max_tensor_degree: usize,
    #[serde(default = "d_internal")]
    pub max_internal_degree: usize,
    #[serde(default = "d_witness")]
    pub witness_m: u32,
    #[serde(default = "d_witness_n")]
    pub witness_n: u32,
}

fn d_seed() -> u64 {
    1
}
fn d_random_algebras() -> usize {
    5
}
fn d_chains() -> usize {
    20
}
fn d_tensor_degree() -> usize {
    4
}
fn d_internal() -> usize {
    10
}
fn d_witness() -> u32 {
    6
}
fn d_witness_n() -> u32 {
    12
}

/// Values the run must reproduce; a mismatch is a failed check.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BudgetSpec {
    #[serde(default = "d_max_dim")]
    pub max_dim: usize,
    #[serde(default = "d_gb_pairs")]
    pub groebner_pairs: usize,
}

fn d_max_dim() -> usize {
    RigidParams::default().max_dim
}
fn d_gb_pairs() -> usize {
    rigcoh::polyalg::Budget::default().max_pairs
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec { max_dim: d_max_dim(), groebner_pairs: d_gb_pairs() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TaskSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub kind: TaskKind,
    #[serde(default = "d_p")]
    pub p: u64,
    #[serde(default = "d_precision")]
    pub precision: u32,
    #[serde(default = "d_caps")]
    pub degree_caps: Vec<u32>,
    #[serde(default = "d_m_max")]
    pub m_max: u32,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigid: Option<RigidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinitesimal: Option<InfinitesimalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tube: Option<TubeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsSection>,
    #[serde(default)]
    pub expect: Expect,
}

fn d_p() -> u64 {
    5
}
fn d_precision() -> u32 {
    12
}
fn d_caps() -> Vec<u32> {
    vec![8, 12, 16]
}
fn d_m_max() -> u32 {
    3
}
fn d_window() -> usize {
    3
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parsed polynomials keep the location of their string in the task file.
pub struct Source<'a> {
    pub path: &'a str,
    pub text: &'a str,
}

impl Source<'_> {
    pub fn poly(&self, s: &Spanned<String>, vars: &[String]) -> Result<SparsePoly, TaskError> {
        parse_poly(s.get_ref(), vars).map_err(|e| {
            // the span starts at the opening quote
            let (line, col) = line_col(self.text, s.span().start + 1);
            let column = if e.line == 1 { col + e.column - 1 } else { e.column };
            TaskError::Parse { path: self.path.to_string(), line: line + e.line - 1, column, message: e.message }
        })
    }

    pub fn invalid(&self, message: impl Into<String>) -> TaskError {
        TaskError::Invalid { path: self.path.to_string(), message: message.into() }
    }
}

impl TaskSpec {
    pub fn from_toml(path: &str, text: &str) -> Result<TaskSpec, TaskError> {
        let spec: TaskSpec = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            TaskError::Parse { path: path.to_string(), line, column, message: e.message().to_string() }
        })?;
        spec.validate(&Source { path, text })?;
        Ok(spec)
    }

    pub fn load(path: &str) -> Result<(TaskSpec, String), TaskError> {
        let text = std::fs::read_to_string(path).map_err(|source| TaskError::Io { path: path.to_string(), source })?;
        Ok((TaskSpec::from_toml(path, &text)?, text))
    }

    fn validate(&self, src: &Source) -> Result<(), TaskError> {
        if !is_prime(self.p) {
            return Err(src.invalid(format!("p = {} is not prime", self.p)));
        }
        if self.degree_caps.is_empty() || self.degree_caps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(src.invalid("degree-caps must be non-empty and strictly increasing"));
        }
        if self.m_max == 0 || self.window < 2 || self.precision == 0 {
            return Err(src.invalid("m-max and precision must be positive, window at least 2"));
        }
        if let Some(a) = &self.algebra {
            for r in &a.relations {
                src.poly(r, &a.vars)?;
            }
        }
        let need = |present: bool, what: &str| if present { Ok(()) } else { Err(src.invalid(format!("kind {:?} needs a [{what}] section", self.kind))) };
        match self.kind {
            TaskKind::Rigid | TaskKind::Hp => need(self.algebra.is_some(), "algebra"),
            TaskKind::Infinitesimal => need(self.algebra.is_some() && self.infinitesimal.is_some(), "algebra] and [infinitesimal"),
            TaskKind::TubeIdentity => need(self.algebra.is_some() && self.tube.is_some(), "algebra] and [tube"),
            TaskKind::SpectralRadius => need(self.algebra.is_some() && self.spectral.is_some(), "algebra] and [spectral"),
            TaskKind::Invariants => need(self.invariants.is_some(), "invariants"),
        }
    }

    /// Apply `RIGCOH_MAX_DIM` and `RIGCOH_GROEBNER_PAIRS` from the environment.
    pub fn apply_env_budget(&mut self) {
        if let Some(v) = std::env::var("RIGCOH_MAX_DIM").ok().and_then(|s| s.parse().ok()) {
            self.budget.max_dim = v;
        }
        if let Some(v) = std::env::var("RIGCOH_GROEBNER_PAIRS").ok().and_then(|s| s.parse().ok()) {
            self.budget.groebner_pairs = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = TaskSpec::from_toml("t.toml", "kind = \"rigid\"\n[algebra]\nvars = [\"t\"]\n").unwrap();
        assert_eq!((t.p, t.precision, t.m_max, t.window), (5, 12, 3, 3));
        assert_eq!(t.degree_caps, vec![8, 12, 16]);
    }

    #[test]
    fn relation_errors_point_into_the_file() {
        let src = "kind = \"rigid\"\n[algebra]\nvars = [\"x\"]\nrelations = [\"x^^2\"]\n";
        match TaskSpec::from_toml("t.toml", src) {
            Err(TaskError::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert!(column > 14, "column {column}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn toml_errors_have_positions() {
        let e = TaskSpec::from_toml("t.toml", "kind = \"rigid\"\np = \n").unwrap_err();
        assert!(matches!(e, TaskError::Parse { line: 2, .. }), "{e}");
        let e = TaskSpec::from_toml("t.toml", "kind = \"rigid\"\np = 6\n[algebra]\nvars=[]\n").unwrap_err();
        assert!(matches!(e, TaskError::Invalid { .. }));
    }
}
