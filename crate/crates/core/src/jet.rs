//! State spaces and the partition of jet variables into state variables,
//! highest derivatives and higher derivatives.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::expr::JetVar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state variable `{0}` is a time derivative")]
    TimeJet(String),
    #[error("state variable `{0}` exceeds the declared order {1}")]
    OrderExceeded(String, u32),
    #[error("no state variable of the declared order {0}")]
    OrderOverstated(u32),
    #[error("state variable `{0}` refers to an undeclared field")]
    UnknownField(String),
}

/// The state space `Z`: spatial jets of order `<= r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    order: u32,
    members: BTreeSet<JetVar>,
}

impl StateSpace {
    pub fn new(order: u32, members: impl IntoIterator<Item = JetVar>) -> Result<Self, StateError> {
        let members: BTreeSet<JetVar> = members.into_iter().collect();
        for m in &members {
            if m.t_order() > 0 {
                return Err(StateError::TimeJet(m.to_string()));
            }
            if m.x_order() > order {
                return Err(StateError::OrderExceeded(m.to_string(), order));
            }
        }
        if !members.iter().any(|m| m.x_order() == order) {
            return Err(StateError::OrderOverstated(order));
        }
        Ok(StateSpace { order, members })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn members(&self) -> &BTreeSet<JetVar> {
        &self.members
    }

    pub fn contains(&self, j: &JetVar) -> bool {
        self.members.contains(j)
    }

    /// `Z^(k)`.
    pub fn level(&self, k: u32) -> impl Iterator<Item = &JetVar> {
        self.members.iter().filter(move |m| m.x_order() == k)
    }

    /// Largest x-order of `field` in `Z`, or 0 when the field is absent.
    pub fn max_order(&self, field: &str) -> u32 {
        self.members
            .iter()
            .filter(|m| m.field() == field)
            .map(|m| m.x_order())
            .max()
            .unwrap_or(0)
    }

    /// Members in the order fields are listed, then by x-order.
    pub fn ordered(&self, fields: &[String]) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.members.iter().cloned().collect();
        sort_jets(&mut v, fields);
        v
    }
}

/// Sorts time jets before spatial ones, then by x-order, then by the position
/// of the field in `fields`.
pub fn sort_jets(v: &mut [JetVar], fields: &[String]) {
    let pos: BTreeMap<&str, usize> = fields.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
    v.sort_by_key(|j| {
        (
            std::cmp::Reverse(j.t_order()),
            j.x_order(),
            pos.get(j.field()).copied().unwrap_or(usize::MAX),
            j.field().to_string(),
        )
    });
}

/// Members of `Z^(k)` none of whose x-derivatives of order `1..=r-k` is in `Z`,
/// together with all of `Z^(r)`.
pub fn compute_hat_z(z: &StateSpace) -> BTreeSet<JetVar> {
    let r = z.order();
    z.members()
        .iter()
        .filter(|w| {
            let k = w.x_order();
            k == r || (1..=r - k).all(|h| !z.contains(&w.dx_n(h)))
        })
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeClassification {
    pub state: Vec<JetVar>,
    pub highest: Vec<JetVar>,
    pub higher: Vec<JetVar>,
    pub hat_z: Vec<JetVar>,
    /// Depth of the extended equations the classification was built for.
    pub depth: u32,
}

impl DerivativeClassification {
    pub fn is_highest(&self, j: &JetVar) -> bool {
        self.highest.contains(j)
    }

    pub fn is_higher(&self, j: &JetVar) -> bool {
        self.higher.contains(j)
    }

    pub fn time_jets(&self) -> impl Iterator<Item = &JetVar> {
        self.highest.iter().filter(|j| j.t_order() > 0)
    }

    pub fn spatial_highest(&self) -> impl Iterator<Item = &JetVar> {
        self.highest.iter().filter(|j| j.t_order() == 0)
    }
}

/// Classifies jets for extensions up to depth `depth` (normally `r`).
///
/// For a field whose largest order in `Z` is `m`, the highest derivatives are
/// its time jets `u_t .. u_{t x^depth}` and the spatial jet of order
/// `m + depth + 1`; the higher derivatives are its spatial jets of order
/// `1..=m + depth` that are not state variables. A field absent from `Z`
/// behaves as if `m = 0`.
pub fn classify(z: &StateSpace, fields: &[String], depth: u32) -> DerivativeClassification {
    let mut highest = Vec::new();
    let mut higher = Vec::new();
    for f in fields {
        let m = z.max_order(f);
        for k in 0..=depth {
            highest.push(JetVar::new(f.as_str(), 1, k));
        }
        highest.push(JetVar::new(f.as_str(), 0, m + depth + 1));
        for h in 1..=m + depth {
            let j = JetVar::new(f.as_str(), 0, h);
            if !z.contains(&j) {
                higher.push(j);
            }
        }
    }
    sort_jets(&mut highest, fields);
    sort_jets(&mut higher, fields);
    let mut hat_z: Vec<JetVar> = compute_hat_z(z).into_iter().collect();
    sort_jets(&mut hat_z, fields);
    DerivativeClassification {
        state: z.ordered(fields),
        highest,
        higher,
        hat_z,
        depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(f: &str, x: u32) -> JetVar {
        JetVar::new(f, 0, x)
    }

    fn names(v: &[JetVar]) -> Vec<String> {
        v.iter().map(|j| j.to_string()).collect()
    }

    #[test]
    fn hat_z_when_every_gradient_is_present() {
        let z = StateSpace::new(2, [j("u", 0), j("u", 1), j("u", 2), j("w", 0), j("w", 1), j("w", 2)]).unwrap();
        let hat = compute_hat_z(&z);
        assert_eq!(hat, z.level(2).cloned().collect());
    }

    #[test]
    fn single_field_first_order() {
        let z = StateSpace::new(1, [j("u", 0), j("u", 1)]).unwrap();
        let c = classify(&z, &["u".to_string()], 1);
        assert_eq!(names(&c.highest), ["u_t", "u_tx", "u_xxx"]);
        assert_eq!(names(&c.higher), ["u_xx"]);
    }

    #[test]
    fn local_state_space() {
        let z = StateSpace::new(0, [j("rho", 0), j("eps", 0)]).unwrap();
        let fields = ["rho".to_string(), "v".to_string(), "eps".to_string()];
        let c = classify(&z, &fields, 0);
        assert_eq!(names(&c.highest), ["rho_t", "v_t", "eps_t", "rho_x", "v_x", "eps_x"]);
        assert!(c.higher.is_empty());
    }

    #[test]
    fn malformed_state_spaces() {
        assert!(matches!(StateSpace::new(2, [j("u", 1)]), Err(StateError::OrderOverstated(2))));
        assert!(matches!(StateSpace::new(0, [j("u", 1)]), Err(StateError::OrderExceeded(..))));
        assert!(matches!(StateSpace::new(0, [JetVar::new("u", 1, 0)]), Err(StateError::TimeJet(_))));
    }
}
