use std::path::Path;
use std::process::Command;

use adnovel_cli::config::{Format, ScanParameter};
use adnovel_cli::runner::{config_hash, render, SUMMARY};
use adnovel_cli::table::{Column, ResultTable};
use adnovel_cli::{run, scan, CliError, RunConfig};
use proptest::prelude::*;

const EXPLICIT: &str = r#"{
  "system": { "omega_0n_mhz": 51.0, "a_mhz": [5.1], "c_mhz": [0.0] },
  "schedule": { "kind": "linear", "delta_omega_mhz": 20.0, "t_sweep_us": 2.0, "direction": "low_to_high" },
  "output": { "n_steps": 100 }
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adnovel"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn explicit_run_reports_transfer() {
    let config = RunConfig::from_json(EXPLICIT).unwrap();
    let t = run(&config).unwrap();
    assert_eq!(t.rows.len(), 101);
    assert!(t.info_f64("P_settled").unwrap() > 0.95);
    assert_eq!(t.metadata.config_hash, config_hash(&config));
    assert!(t.metadata.certificate.is_some());
}

#[test]
fn stride_thins_rows_but_keeps_the_end() {
    let mut config = RunConfig::from_json(EXPLICIT).unwrap();
    config.output.stride = 30;
    let t = run(&config).unwrap();
    let times = t.column_f64("t").unwrap();
    assert_eq!(times.len(), 5);
    assert_eq!(*times.last().unwrap(), 2.0);
}

#[test]
fn rerun_is_byte_identical() {
    let config = RunConfig::from_json(EXPLICIT).unwrap();
    let a = render(&run(&config).unwrap(), Format::Csv);
    let b = render(&run(&config).unwrap(), Format::Csv);
    assert_eq!(a, b);
}

#[test]
fn validation_errors_name_the_field() {
    let cases = [
        (r#"{"preset": "fig7", "system": {"omega_0n_mhz": 51, "a_mhz": [], "c_mhz": []}}"#, "preset"),
        (r#"{"preset": "fig99"}"#, "preset"),
        (r#"{"system": {"omega_0n_mhz": -1, "a_mhz": [1], "c_mhz": [0]}, "schedule": {"kind": "constant", "omega_1e_mhz": 51, "t_total_us": 1}}"#, "system.omega_0n_mhz"),
        (r#"{"system": {"omega_0n_mhz": 51, "a_mhz": [1, 2], "c_mhz": [0]}, "schedule": {"kind": "constant", "omega_1e_mhz": 51, "t_total_us": 1}}"#, "system.c_mhz"),
        (r#"{"system": {"omega_0n_mhz": 51, "a_mhz": [1], "c_mhz": [0]}}"#, "schedule"),
        (r#"{"system": {"omega_0n_mhz": 51, "a_mhz": [1], "c_mhz": [0]}, "schedule": {"kind": "linear", "delta_omega_mhz": 20, "t_sweep_us": 0}}"#, "schedule.t_sweep_us"),
        (r#"{"preset": "fig7", "output": {"stride": 0}}"#, "output.stride"),
        (r#"{"preset": "fig7", "bogus": 1}"#, "config"),
    ];
    for (text, path) in cases {
        match RunConfig::from_json(text) {
            Err(CliError::Validation { path: p, .. }) => assert_eq!(p, path, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn single_point_scan_matches_run() {
    let mut config = RunConfig::from_json(EXPLICIT).unwrap();
    let single = run(&config).unwrap();
    config.scan = Some(adnovel_cli::config::ScanBlock {
        parameter: ScanParameter::AMhz,
        values: vec![5.1],
    });
    let s = scan(&config).unwrap();
    assert_eq!(s.rows.len(), 1);
    for name in SUMMARY {
        assert_eq!(s.column(name).unwrap()[0], single.info_f64(name), "{name}");
    }
}

#[test]
fn scan_keeps_grid_order_and_records_failures() {
    let mut config = RunConfig::from_json(EXPLICIT).unwrap();
    let grid = vec![6.0, 1.0, 4.0, 2.0, 5.0, 3.0];
    config.scan = Some(adnovel_cli::config::ScanBlock {
        parameter: ScanParameter::TSweepUs,
        values: grid.iter().copied().chain([-1.0]).collect(),
    });
    let t = scan(&config).unwrap();
    let col = t.column("t_sweep_us").unwrap();
    assert_eq!(col, grid.iter().map(|&v| Some(v)).chain([Some(-1.0)]).collect::<Vec<_>>());
    assert!(t.rows[..6].iter().all(|r| r.error.is_none()));
    assert!(t.rows[6].error.as_deref().unwrap().contains("t_sweep_us"));
    // slower sweeps transfer more at a fixed coupling
    let settled = t.column("P_settled").unwrap();
    let (fast, slow) = (settled[1].unwrap(), settled[0].unwrap());
    assert!(slow > fast);
}

#[test]
fn empty_grid_is_rejected() {
    let text = EXPLICIT.replace(
        r#""output""#,
        r#""scan": {"parameter": "a_mhz", "values": []}, "output""#,
    );
    assert!(matches!(RunConfig::from_json(&text), Err(CliError::Validation { path, .. }) if path == "scan.values"));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", EXPLICIT);
    let out = dir.path().join("out.json");
    let status = bin()
        .args(["run", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .args(["--format", "json", "--steps", "50"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let table = ResultTable::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 51);
    assert_eq!(table.metadata.n_steps, 50);

    let bad = write(dir.path(), "bad.json", r#"{"preset": "nope"}"#);
    let o = bin().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("preset"));

    let o = bin().args(["validate", "--config"]).arg(&good).output().unwrap();
    assert_eq!(o.status.code(), Some(0));

    let stiff = write(
        dir.path(),
        "stiff.json",
        r#"{"system": {"omega_0n_mhz": 51, "a_mhz": [5.1], "c_mhz": [20]},
            "schedule": {"kind": "linear", "delta_omega_mhz": 20, "t_sweep_us": 20}}"#,
    );
    let o = bin()
        .args(["run", "--config"])
        .arg(&stiff)
        .args(["--steps", "2", "--tol", "1e-14"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("last iterates"));
}

#[test]
fn presets_list_documents_every_preset() {
    let o = bin().args(["presets", "list"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for p in adnovel_cli::presets::PRESETS {
        assert!(text.contains(&format!("{}:", p.name)));
        for pin in p.pins {
            assert!(text.contains(pin));
        }
    }
}

fn cell() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        Just(None),
        any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Some),
        (-1e3f64..1e3).prop_map(Some),
    ]
}

fn table() -> impl Strategy<Value = ResultTable> {
    (1usize..5, 0usize..6).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec(("[a-zA-Z_(),=+-]{1,8}", "[a-zA-Z/]{0,3}"), w),
            prop::collection::vec((prop::collection::vec(cell(), w), prop::option::of("[ -~]{1,20}")), h),
            "[0-9a-f]{0,64}",
            1e-12f64..1.0,
            prop::collection::btree_map("[a-z_]{1,6}", "[ -~]{0,12}", 0..3),
        )
            .prop_map(|(cols, rows, hash, tol, info)| {
                let mut t = ResultTable::new(cols.into_iter().map(|(n, u)| Column::new(n, u)).collect(), tol, 7);
                t.metadata.config_hash = hash;
                for (cells, err) in rows {
                    t.rows.push(adnovel_cli::table::Row { cells, error: err });
                }
                for (k, v) in info {
                    t.info(&k, v.trim());
                }
                t
            })
    })
}

proptest! {
    #[test]
    fn csv_and_json_round_trip(t in table()) {
        prop_assert_eq!(&ResultTable::from_csv(&t.to_csv()).unwrap(), &t);
        prop_assert_eq!(&ResultTable::from_json(&t.to_json()).unwrap(), &t);
    }
}
