#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use qrf::group::{load_group, FiniteGroup};
use qrf::repr::{load_irrep_table, load_rep, IrrepTable, UnitaryRep};

pub const GROUPS: [&str; 7] = ["z2", "z3", "z6", "s3", "d4", "q8", "h3"];

pub fn dataset(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../datasets")
        .join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn group(key: &str) -> Arc<FiniteGroup> {
    Arc::new(load_group(&dataset(&format!("groups/{key}.json"))).unwrap())
}

pub fn table(key: &str) -> IrrepTable {
    load_irrep_table(group(key), &dataset(&format!("irreps/{key}.json"))).unwrap()
}

/// Irrep table and a system representation on the same group instance.
pub fn pair(key: &str, rep: &str) -> (IrrepTable, UnitaryRep) {
    let t = table(key);
    let r = load_rep(
        t.group().clone(),
        &dataset(&format!("reps/{key}_{rep}.json")),
    )
    .unwrap();
    (t, r)
}
