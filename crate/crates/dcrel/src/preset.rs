//! Built-in instances at desk scale. Each preset builds its base category,
//! verifies the factorisation system, and constructs the double category of
//! relations, failing loudly if any verification step does not come back
//! green.

use crate::basecat::{Category, ObjRef, TableCategorySpec};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factsys::{self, ArrowClass, BuiltinClass, FactSystem};
use crate::reldbl::{build_rel_double, RelDouble};
use std::sync::Arc;

pub const PRESET_NAMES: &[&str] = &["finset2", "span2", "alliso2", "preord2", "chain2", "chain3"];

/// Build a named preset. `max_carrier` bounds the FinSet carrier sizes
/// (default 2); table presets ignore it.
pub fn build(name: &str, max_carrier: usize, budget: Budget) -> Result<RelDouble> {
    match name {
        "finset2" => finset_instance(max_carrier, BuiltinClass::Epi, BuiltinClass::Mono, budget),
        "span2" => finset_instance(max_carrier, BuiltinClass::Iso, BuiltinClass::All, budget),
        "alliso2" => finset_instance(max_carrier, BuiltinClass::All, BuiltinClass::Iso, budget),
        "preord2" => preord_instance(budget),
        "chain2" => chain_instance(2, budget),
        "chain3" => chain_instance(3, budget),
        other => Err(Error::Unresolved(format!(
            "unknown preset '{other}' (available: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn verify_system(
    cat: &Category,
    name: &str,
    e: ArrowClass,
    m: ArrowClass,
    probes: &[ObjRef],
) -> Result<FactSystem> {
    let mut sys = FactSystem::new(name, e, m);
    let report = factsys::check_ofs(cat, &mut sys, probes, false)?;
    if !report.is_valid() {
        return Err(Error::Unverified(format!(
            "preset system '{name}' failed OFS validation: {}",
            report.all_violations().join("; ")
        )));
    }
    let stable = factsys::check_stable(cat, &mut sys, probes)?;
    if !stable.is_true() {
        return Err(Error::Unverified(format!(
            "preset system '{name}' is not stable: {}",
            stable.mark()
        )));
    }
    factsys::properness_taxonomy(cat, &mut sys, probes)?;
    Ok(sys)
}

fn finset_instance(
    max_carrier: usize,
    e: BuiltinClass,
    m: BuiltinClass,
    budget: Budget,
) -> Result<RelDouble> {
    let cat = Arc::new(Category::finset(budget));
    let carriers: Result<Vec<ObjRef>> = (0..=max_carrier).map(|n| cat.finset_obj(n)).collect();
    let carriers = carriers?;
    let sys = verify_system(
        &cat,
        &format!("{}_{}", e.name(), m.name()),
        ArrowClass::Builtin(e),
        ArrowClass::Builtin(m),
        &carriers,
    )?;
    build_rel_double(cat, sys, carriers)
}

fn preord_instance(budget: Budget) -> Result<RelDouble> {
    let cat = Arc::new(Category::finpreord(budget));
    let carriers = crate::concrete::small_preorders(&cat)?;
    let sys = verify_system(
        &cat,
        "surjection_embedding",
        ArrowClass::Builtin(BuiltinClass::Epi),
        ArrowClass::Builtin(BuiltinClass::Embedding),
        &carriers,
    )?;
    build_rel_double(cat, sys, carriers)
}

/// The chain poset `0 ≤ 1 ≤ … ≤ n-1` with the `(all, iso)` system, whose
/// relations are the products themselves.
fn chain_instance(n: usize, budget: Budget) -> Result<RelDouble> {
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut homs = Vec::new();
    let mut compose = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            homs.push((format!("le_{i}_{j}"), i.to_string(), j.to_string()));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                compose.push((
                    format!("le_{i}_{j}"),
                    format!("le_{j}_{k}"),
                    format!("le_{i}_{k}"),
                ));
            }
        }
    }
    let spec = TableCategorySpec {
        name: format!("chain{n}"),
        objects,
        homs,
        compose,
    };
    let cat = Arc::new(Category::from_table(&spec, budget)?);
    let carriers = cat.objects();
    let sys = verify_system(
        &cat,
        "all_iso",
        ArrowClass::Builtin(BuiltinClass::All),
        ArrowClass::Builtin(BuiltinClass::Iso),
        &carriers,
    )?;
    build_rel_double(cat, sys, carriers)
}
