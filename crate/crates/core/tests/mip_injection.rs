use std::collections::BTreeMap;

use ipctp_core::generator::{generate_replicate, GenConfig};
use ipctp_core::mip::{
    build_model, parse_values, solution_from_values, solution_point, write_lp, ExportOptions,
};
use ipctp_core::oracle::brute_force;
use ipctp_core::{validate, DerivedTables, Instance};

fn small_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for &bays in &[4, 6] {
        for &ratio in &[0.2, 0.5] {
            let config = GenConfig::new(2, bays, 4, ratio, 5);
            for rep in 0..2 {
                out.push(generate_replicate(&config, rep).unwrap());
            }
        }
    }
    out
}

#[test]
fn optimal_solutions_satisfy_every_row() {
    for inst in small_corpus() {
        let der = DerivedTables::build(&inst).unwrap();
        let (model, _) = build_model(&inst, &der, &ExportOptions::default());
        let sol = brute_force(&inst, &der, u128::MAX).unwrap().best_solution;
        let point = solution_point(&inst, &model, &sol);
        let bad: Vec<String> = model
            .violated_rows(&point)
            .iter()
            .map(|r| r.name.clone())
            .collect();
        assert!(bad.is_empty(), "violated rows: {bad:?}");
        assert_eq!(model.objective_value(&point), sol.objective);
    }
}

#[test]
fn point_round_trips_through_value_file() {
    for inst in small_corpus() {
        let der = DerivedTables::build(&inst).unwrap();
        let (model, _) = build_model(&inst, &der, &ExportOptions::default());
        let sol = brute_force(&inst, &der, u128::MAX).unwrap().best_solution;
        let point = solution_point(&inst, &model, &sol);
        let text: String = model
            .variables
            .iter()
            .zip(&point)
            .map(|(v, x)| format!("{} {x}\n", v.name))
            .collect();
        let values: BTreeMap<String, f64> = parse_values(&text).unwrap();
        let back = solution_from_values(&inst, &der, &model, &values).unwrap();
        assert!(validate(&inst, &der, &back).is_empty());
        assert_eq!(back.objective, sol.objective);
        assert_eq!(back.decisions(), sol.decisions());
    }
}

#[test]
fn export_is_byte_stable() {
    let inst = &small_corpus()[3];
    let der = DerivedTables::build(inst).unwrap();
    let a = write_lp(&build_model(inst, &der, &ExportOptions::default()).0);
    let b = write_lp(&build_model(inst, &der, &ExportOptions::default()).0);
    assert_eq!(a, b);
    assert!(a.starts_with("\\") && a.contains("\nSubject To\n") && a.ends_with("End\n"));
}

#[test]
fn one_capacity_row_per_inbound_location() {
    for inst in small_corpus() {
        let der = DerivedTables::build(&inst).unwrap();
        let (_, art) = build_model(&inst, &der, &ExportOptions::default());
        assert_eq!(
            art.rows_per_family.get("2-04").copied().unwrap_or(0),
            inst.inbound_locations().len()
        );
    }
}
