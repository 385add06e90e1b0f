use std::sync::Arc;

use super::{CState, FieldStore, RuntimeError};
use crate::lang::{eval_expr, Address, ContractDef, Env, Uint, Value};

/// A contract definition bound to concrete parameters, together with its
/// initial state.
#[derive(Clone, Debug)]
pub struct ContractInstance {
    pub def: Arc<ContractDef>,
    /// Parameter bindings in declaration order.
    pub params: Env,
    pub state0: CState,
}

impl ContractInstance {
    pub fn id(&self) -> &Address {
        &self.state0.my_id
    }

    pub fn param(&self, name: &str) -> Option<&Value> {
        self.params.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

/// Binds `params` against the declared parameters and evaluates every field
/// initializer under those bindings.
pub fn instantiate(
    def: impl Into<Arc<ContractDef>>,
    id: Address,
    init_bal: Uint,
    params: &[(String, Value)],
) -> Result<ContractInstance, RuntimeError> {
    let def: Arc<ContractDef> = def.into();
    if let Some((name, _)) = params.iter().find(|(n, _)| def.param(n).is_none()) {
        return Err(RuntimeError::UnknownParam(name.clone()));
    }
    let mut env = Env::new();
    for p in &def.params {
        let Some((_, v)) = params.iter().find(|(n, _)| *n == p.name) else {
            return Err(RuntimeError::MissingParam(p.name.clone()));
        };
        if v.ty() != p.ty {
            return Err(RuntimeError::ParamTypeMismatch {
                name: p.name.clone(),
                expected: p.ty.to_string(),
                found: v.ty().to_string(),
            });
        }
        env.bind(p.name.clone(), v.clone());
    }

    let mut fields = Vec::with_capacity(def.fields.len());
    for f in &def.fields {
        let v = eval_expr(&env, &f.init)
            .map_err(|e| RuntimeError::FieldInit { field: f.name.clone(), reason: e.to_string() })?;
        if v.ty() != f.ty {
            return Err(RuntimeError::FieldInit {
                field: f.name.clone(),
                reason: format!("expected {}, got {}", f.ty, v.ty()),
            });
        }
        fields.push((Arc::from(f.name.as_str()), v));
    }
    let state0 = CState { my_id: id, balance: init_bal, fields: FieldStore::new(fields) };
    Ok(ContractInstance { def, params: env, state0 })
}
