mod common;

use mldlab::mld::{MldReport, MldStatus, PairSpec};
use mldlab::oracle::brute_force_mld;
use mldlab::par::Execution;
use mldlab::scan::{run_scan, ScanOptions, ScanRecipe};
use mldlab::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use mldlab::Rational;

fn cusp_recipe() -> ScanRecipe {
    serde_json::from_str(r#"{"params": {"i": [2, 12]}, "family": [{"gens": [[2, 0, 0], [0, "i", 0]], "exp": "1/2"}], "invariant": "mld"}"#)
        .unwrap()
}

#[test]
fn cusp_family_rows_match_the_oracle() {
    let table = run_scan(&cusp_recipe(), ScanOptions::default()).unwrap();
    assert_eq!(table.rows.len(), 11);
    let mut prev: Option<Rational> = None;
    for row in &table.rows {
        let i = row.params["i"] as u32;
        let m = MonomialIdeal::from_exponents(3, &[&[2, 0, 0], &[0, i, 0]]).unwrap();
        let pair = PairSpec::smooth(3, RIdeal::new(vec![(IdealComponent::Monomial(m), Rational::new(1.into(), 2.into()))]).unwrap()).unwrap();
        let engine = MldReport {
            status: MldStatus::Value,
            value: row.value.clone(),
            witnesses: row.witnesses.clone(),
            bound_used: 0,
            lp_simplex_min: None,
            lower_bound: None,
        };
        assert_eq!(row.status, "ok");
        let oracle = brute_force_mld(&pair, &[0, 1, 2], 12).unwrap();
        common::agrees(&engine, &oracle, 12).unwrap();
        let v = row.value.clone().unwrap();
        if let Some(p) = prev {
            assert!(v <= p, "column increases at i = {i}");
        }
        prev = Some(v);
    }
    let d = &table.summary.distinct_values;
    assert!(d.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn rows_do_not_depend_on_execution() {
    let seq = run_scan(&cusp_recipe(), ScanOptions { execution: Execution::Sequential, timing: false }).unwrap();
    let par = run_scan(&cusp_recipe(), ScanOptions { execution: Execution::Parallel, timing: false }).unwrap();
    assert_eq!(serde_json::to_string(&seq).unwrap(), serde_json::to_string(&par).unwrap());
}
