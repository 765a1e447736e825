//! Three-way agreement on committed instances: external MILP optimum of the
//! exported model, exhaustive oracle and branch and bound.

mod common;

use std::time::Duration;

use common::{mip_fixtures, reported_objective};
use ipctp_core::mip::{build_model, export_lp, parse_values, solution_from_values, ExportOptions};
use ipctp_core::oracle::brute_force;
use ipctp_core::solver::{solve, SolveParams};
use ipctp_core::{validate, DerivedTables, Status};

#[test]
fn at_least_twenty_small_fixtures() {
    let f = mip_fixtures();
    assert!(f.len() >= 20);
    assert!(f.iter().all(|f| f.instance.num_shipments() <= 4));
}

#[test]
fn exported_models_match_committed_files() {
    for f in mip_fixtures() {
        let der = DerivedTables::build(&f.instance).unwrap();
        let (lp, _) = export_lp(&f.instance, &der, &ExportOptions::default());
        assert!(
            lp == f.lp,
            "{}: exported LP differs from the committed file",
            f.name
        );
    }
}

#[test]
fn milp_oracle_and_solver_agree() {
    let params = SolveParams {
        time_limit: Duration::from_secs(60),
        ..SolveParams::default()
    };
    for f in mip_fixtures() {
        let inst = &f.instance;
        let der = DerivedTables::build(inst).unwrap();
        let oracle = brute_force(inst, &der, u128::MAX).unwrap();
        let (report, _) = solve(inst, &der, &params).unwrap();
        assert_eq!(report.status, Status::Optimal, "{}", f.name);
        assert_eq!(
            report.best_objective,
            Some(oracle.best_objective),
            "{}",
            f.name
        );

        let milp = reported_objective(&f.sol).expect("objective header");
        assert_eq!(milp.round() as i64, oracle.best_objective, "{}", f.name);

        let (model, _) = build_model(inst, &der, &ExportOptions::default());
        let values = parse_values(&f.sol).unwrap();
        let imported = solution_from_values(inst, &der, &model, &values).unwrap();
        assert!(validate(inst, &der, &imported).is_empty(), "{}", f.name);
        assert_eq!(imported.objective, oracle.best_objective, "{}", f.name);
    }
}
