use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use super::PolyError;

/// Phase-space coordinates, always the first six variables of every set.
/// Position `k` pairs with momentum `k + 3`.
pub const PHASE_VARS: [&str; 6] = ["x", "y", "z", "p1", "p2", "p3"];

/// Parameter symbols of the magnetic family and its integrals.
pub const PARAM_SYMBOLS: [&str; 9] = ["a", "b", "b_phi", "b_z", "w1", "w2", "w3", "s_z3", "S_z1"];

/// Ordered list of variable names.
///
/// The first six entries are always `x, y, z, p1, p2, p3`; anything after
/// them is a parameter symbol that behaves as a constant under the
/// Poisson bracket.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    /// Phase-space variables followed by the given parameter symbols.
    pub fn new<I, S>(params: I) -> Result<Arc<Self>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = PHASE_VARS.iter().map(|s| s.to_string()).collect();
        names.extend(params.into_iter().map(Into::into));
        Self::from_names(names)
    }

    /// Validates a full name list (phase variables first).
    pub fn from_names(names: Vec<String>) -> Result<Arc<Self>, PolyError> {
        if names.len() < PHASE_VARS.len()
            || names.iter().zip(PHASE_VARS).any(|(n, expected)| n != expected)
        {
            return Err(PolyError::InvalidVarSet(format!(
                "must start with {}",
                PHASE_VARS.join(", ")
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(PolyError::InvalidVarSet(format!("bad variable name `{n}`")));
            }
            if !seen.insert(n.as_str()) {
                return Err(PolyError::InvalidVarSet(format!("duplicate variable `{n}`")));
            }
        }
        if names.len() > 255 {
            return Err(PolyError::InvalidVarSet("too many variables".into()));
        }
        // Reuse the shared instances so pointer comparison usually succeeds.
        if names.len() == PHASE_VARS.len() {
            return Ok(Self::phase_space());
        }
        let full = Self::with_parameters();
        if full.names == names {
            return Ok(full);
        }
        Ok(Arc::new(VarSet { names }))
    }

    /// The six phase-space variables only.
    pub fn phase_space() -> Arc<Self> {
        static SET: OnceLock<Arc<VarSet>> = OnceLock::new();
        SET.get_or_init(|| {
            Arc::new(VarSet {
                names: PHASE_VARS.iter().map(|s| s.to_string()).collect(),
            })
        })
        .clone()
    }

    /// Phase-space variables plus all nine family parameter symbols.
    pub fn with_parameters() -> Arc<Self> {
        static SET: OnceLock<Arc<VarSet>> = OnceLock::new();
        SET.get_or_init(|| {
            Arc::new(VarSet {
                names: PHASE_VARS
                    .iter()
                    .chain(PARAM_SYMBOLS.iter())
                    .map(|s| s.to_string())
                    .collect(),
            })
        })
        .clone()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_phase(idx: usize) -> bool {
        idx < PHASE_VARS.len()
    }

    pub(crate) fn same(a: &Arc<VarSet>, b: &Arc<VarSet>) -> bool {
        Arc::ptr_eq(a, b) || a.names == b.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_sets_are_shared() {
        let a = VarSet::new(PARAM_SYMBOLS).unwrap();
        assert!(Arc::ptr_eq(&a, &VarSet::with_parameters()));
        let b = VarSet::new(Vec::<String>::new()).unwrap();
        assert!(Arc::ptr_eq(&b, &VarSet::phase_space()));
    }

    #[test]
    fn rejects_duplicates_and_bad_prefix() {
        assert!(VarSet::new(["a", "a"]).is_err());
        assert!(VarSet::new(["x"]).is_err());
        assert!(VarSet::from_names(vec!["y".into(), "x".into()]).is_err());
        assert!(VarSet::new(["bad name"]).is_err());
    }

    #[test]
    fn momentum_pairing_by_position() {
        let v = VarSet::phase_space();
        for k in 0..3 {
            assert_eq!(v.name(k + 3), format!("p{}", k + 1));
        }
    }
}
