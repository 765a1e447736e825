mod common;

use std::collections::BTreeSet;

use common::{single_violations, validator_base, validator_instance};
use ipctp_core::{validate, Constraint, DerivedTables};

#[test]
fn base_solution_is_feasible() {
    let inst = validator_instance();
    let der = DerivedTables::build(&inst).unwrap();
    let base = validator_base(&inst, &der);
    assert_eq!(validate(&inst, &der, &base), vec![]);
    assert_eq!(base.interference_order.len(), 1);
}

#[test]
fn each_fixture_breaks_exactly_its_family() {
    let inst = validator_instance();
    let der = DerivedTables::build(&inst).unwrap();
    let base = validator_base(&inst, &der);
    let fixtures = single_violations(&inst, &der, &base);
    let covered: BTreeSet<Constraint> = fixtures.iter().map(|f| f.0).collect();
    assert_eq!(covered, Constraint::NUMBERED.into_iter().collect());
    let mut wrong = Vec::new();
    for (family, sol) in &fixtures {
        let found: BTreeSet<Constraint> = validate(&inst, &der, sol)
            .iter()
            .map(|v| v.constraint)
            .collect();
        if found != BTreeSet::from([*family]) {
            wrong.push(format!("{family}: {found:?}"));
        }
    }
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn negative_start_is_a_domain_violation() {
    let inst = validator_instance();
    let der = DerivedTables::build(&inst).unwrap();
    let mut sol = validator_base(&inst, &der);
    sol.starts.qc[0] = -1;
    let found: BTreeSet<Constraint> = validate(&inst, &der, &sol)
        .iter()
        .map(|v| v.constraint)
        .collect();
    assert!(found.contains(&Constraint::Domain));
    sol.starts.qc.pop();
    let v = validate(&inst, &der, &sol);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].constraint, Constraint::Domain);
}
