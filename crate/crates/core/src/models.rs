//! Built-in fixtures: the grade-2 fluid with an internal variable and the
//! Korteweg fluid, with their expected derivations and candidate solutions.

use thiserror::Error;

use crate::model::{ModelError, ModelSpec};

#[derive(Debug, Error)]
#[error("unknown built-in model `{0}` (known: grade2, korteweg)")]
pub struct UnknownModel(pub String);

/// A fixture and what the derivation is expected to produce for it.
#[derive(Clone, Debug)]
pub struct BuiltinModel {
    pub id: &'static str,
    pub model_text: &'static str,
    /// `(name, solution file)`.
    pub solutions: &'static [(&'static str, &'static str)],
    pub highest: &'static [&'static str],
    pub higher: &'static [&'static str],
    pub hat_z: &'static [&'static str],
    /// `(law index from 1, order, expression)`.
    pub multipliers: &'static [(usize, u32, &'static str)],
    /// `(highest derivative, coefficient)`.
    pub zeta_equalities: &'static [(&'static str, &'static str)],
}

impl BuiltinModel {
    pub fn model(&self) -> Result<ModelSpec, ModelError> {
        ModelSpec::parse(self.model_text)
    }

    pub fn solution(&self, name: &str) -> Option<&'static str> {
        self.solutions.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }
}

pub const GRADE2: BuiltinModel = BuiltinModel {
    id: "grade2",
    model_text: include_str!("../../../models/grade2.model"),
    solutions: &[
        ("grade2", include_str!("../../../models/grade2.solution")),
        ("grade2-g0", include_str!("../../../models/grade2-g0.solution")),
        ("grade2-zero", include_str!("../../../models/grade2-zero.solution")),
    ],
    highest: &[
        "rho_t", "v_t", "eps_t", "gamma_t", "rho_tx", "v_tx", "eps_tx", "gamma_tx", "rho_xxx", "v_xxx", "eps_xxx",
        "gamma_xxx",
    ],
    higher: &["rho_xx", "v_xx", "eps_xx", "gamma_xx"],
    hat_z: &["rho_x", "v_x", "eps_x", "gamma_x"],
    multipliers: &[
        (1, 0, "rho*s[rho]"),
        (2, 0, "-rho_x/rho*s[v_x]"),
        (3, 0, "s[eps] - rho_x/rho*s[eps_x]"),
        (4, 0, "s[gamma] - rho_x/rho*s[gamma_x]"),
        (1, 1, "rho*s[rho_x]"),
        (2, 1, "s[v_x]"),
        (3, 1, "s[eps_x]"),
        (4, 1, "s[gamma_x]"),
    ],
    zeta_equalities: &[
        ("rho_xxx", "s[v_x]*T[rho_x] - s[eps_x]*q[rho_x] - s[gamma_x]*phi[rho_x]"),
        ("v_xxx", "s[v_x]*T[v_x] - s[eps_x]*q[v_x] - s[gamma_x]*phi[v_x]"),
        ("eps_xxx", "s[v_x]*T[eps_x] - s[eps_x]*q[eps_x] - s[gamma_x]*phi[eps_x]"),
        ("gamma_xxx", "s[v_x]*T[gamma_x] - s[eps_x]*q[gamma_x] - s[gamma_x]*phi[gamma_x]"),
    ],
};

pub const KORTEWEG: BuiltinModel = BuiltinModel {
    id: "korteweg",
    model_text: include_str!("../../../models/korteweg.model"),
    solutions: &[("korteweg", include_str!("../../../models/korteweg.solution"))],
    highest: &[
        "rho_t", "v_t", "eps_t", "rho_tx", "v_tx", "eps_tx", "rho_txx", "v_txx", "eps_txx", "v_xxxx", "eps_xxxx",
        "rho_xxxxx",
    ],
    higher: &["v_xx", "eps_xx", "rho_xxx", "v_xxx", "eps_xxx", "rho_xxxx"],
    hat_z: &["v_x", "eps_x", "rho_xx"],
    multipliers: &[
        (1, 0, "rho*s[rho]"),
        (2, 0, "-rho_x/rho*s[v_x]"),
        (3, 0, "s[eps] - rho_x/rho*s[eps_x]"),
        (1, 1, "rho*s[rho_x]"),
        (2, 1, "s[v_x]"),
        (3, 1, "s[eps_x]"),
        (1, 2, "rho*s[rho_xx]"),
    ],
    zeta_equalities: &[],
};

pub fn builtin(id: &str) -> Result<BuiltinModel, UnknownModel> {
    match id {
        "grade2" | "grade2-internal-variable" => Ok(GRADE2),
        "korteweg" => Ok(KORTEWEG),
        other => Err(UnknownModel(other.to_string())),
    }
}

pub fn all() -> [BuiltinModel; 2] {
    [GRADE2, KORTEWEG]
}
