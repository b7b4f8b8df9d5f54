//! Registry of named symbolic parameters.
//!
//! Every symbolic quantity (the pole position `z0`, free series coefficients,
//! entries of parametric matrix coefficients, the degeneration variable `eps`)
//! is interned here once and referred to by a small integer id afterwards.
//! `eps` is special: it is the only variable allowed to carry negative
//! exponents and is pre-registered with id 0 in every table.

use std::collections::HashMap;
use std::sync::RwLock;

/// Identifier of a registered parameter.
pub type ParamId = u32;

/// Reserved id of the distinguished Laurent variable `eps`.
pub const EPS_ID: ParamId = 0;

/// Append-only, internally synchronized name registry.
///
/// Ids are assigned in registration order, so any computation that interns
/// its parameters in a deterministic order gets deterministic ids (and hence
/// deterministic term ordering and reports).
#[derive(Debug)]
pub struct ParamTable {
    inner: RwLock<Inner>,
}

#[derive(Debug)]
struct Inner {
    names: Vec<String>,
    by_name: HashMap<String, ParamId>,
}

impl ParamTable {
    pub fn new() -> Self {
        let table = ParamTable {
            inner: RwLock::new(Inner {
                names: Vec::new(),
                by_name: HashMap::new(),
            }),
        };
        let eps = table.intern("eps");
        debug_assert_eq!(eps, EPS_ID);
        table
    }

    /// Return the id of `name`, registering it if unseen.
    pub fn intern(&self, name: &str) -> ParamId {
        if let Some(&id) = self.inner.read().unwrap().by_name.get(name) {
            return id;
        }
        let mut inner = self.inner.write().unwrap();
        if let Some(&id) = inner.by_name.get(name) {
            return id;
        }
        let id = inner.names.len() as ParamId;
        inner.names.push(name.to_string());
        inner.by_name.insert(name.to_string(), id);
        id
    }

    /// Look up a name without registering it.
    pub fn lookup(&self, name: &str) -> Option<ParamId> {
        self.inner.read().unwrap().by_name.get(name).copied()
    }

    pub fn name(&self, id: ParamId) -> String {
        self.inner.read().unwrap().names[id as usize].clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().names.len()
    }

    pub fn is_empty(&self) -> bool {
        // never true: eps is always present
        self.len() == 0
    }
}

impl Default for ParamTable {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_is_reserved_id_zero() {
        let t = ParamTable::new();
        assert_eq!(t.lookup("eps"), Some(EPS_ID));
        assert_eq!(t.name(EPS_ID), "eps");
    }

    #[test]
    fn interning_is_idempotent_and_ordered() {
        let t = ParamTable::new();
        let a = t.intern("sigma");
        let b = t.intern("gamma1");
        assert_eq!(t.intern("sigma"), a);
        assert!(a < b);
        assert_eq!(t.name(b), "gamma1");
    }
}
