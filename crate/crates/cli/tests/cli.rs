use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flood_exposure::ingest::{read_facilities, read_flood_scenario, read_tracts};
use flood_exposure::{scenario_delta, ExposureConfig, Study};
use flood_exposure_cli::outputs::{fixed, AREA_DIGITS, COUNT_DIGITS};
use serde_json::Value;

fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/toy")
}

fn cli(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flood-exposure"))
        .args(args)
        .env("FLOOD_EXPOSURE_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config() -> String {
    toy().join("config.toml").display().to_string()
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn validate_toy_reports_counts() {
    let o = cli(&["validate", "--config", &config()], "0");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("facilities.csv (3 rows, 0 errors)"), "{text}");
    assert!(text.contains("tracts.geojson (5 rows, 0 errors)"), "{text}");
    assert!(
        text.contains("flood_2018.csv (600 rows, 0 errors)"),
        "{text}"
    );
    assert!(
        text.contains("flood_2050.csv (1000 rows, 0 errors)"),
        "{text}"
    );
}

#[test]
fn validate_missing_file_is_io() {
    let o = cli(
        &[
            "validate",
            "--config",
            &config(),
            "--facilities",
            "/nonexistent/facilities.csv",
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(1));
    let o = cli(&["validate", "--config", "/nonexistent/config.toml"], "0");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_bad_proportion_names_the_tract() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(toy().join("tracts.geojson")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["features"][2]["properties"]["p_poverty"] = Value::from(1.5);
    let geoid = doc["features"][2]["properties"]["GEOID"]
        .as_str()
        .unwrap()
        .to_string();
    let bad = dir.path().join("tracts.geojson");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = cli(
        &[
            "validate",
            "--config",
            &config(),
            "--tracts",
            bad.to_str().unwrap(),
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(
        text.contains(&geoid) && text.contains("p_poverty"),
        "{text}"
    );
    assert!(text.contains("(5 rows, 1 errors)"), "{text}");
}

#[test]
fn validate_bad_latitude_names_row() {
    let bad = toy().join("../facilities_bad_lat.csv");
    let o = cli(
        &[
            "validate",
            "--config",
            &config(),
            "--facilities",
            bad.to_str().unwrap(),
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("row 7, column lat"), "{text}");
}

#[test]
fn bad_config_and_environment_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "facilities = \"f.csv\"\nradius = 3\n").unwrap();
    assert_eq!(
        cli(&["validate", "--config", cfg.to_str().unwrap()], "0")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cli(&["validate", "--config", &config()], "many")
            .status
            .code(),
        Some(2)
    );
    let o = cli(
        &[
            "run",
            "--config",
            &config(),
            "--scenario",
            "current",
            "--radii-m",
            "3000,1000",
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_matches_in_process_pipeline_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &[
            "run",
            "--config",
            &config(),
            "--scenario",
            "future",
            "--output-dir",
            dir.path().to_str().unwrap(),
        ],
        "0",
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let files: Vec<String> = read_dir(dir.path()).into_keys().collect();
    assert_eq!(
        files,
        [
            "exposure_2050.csv",
            "exposure_2050.geojson",
            "flooded_2050.csv",
            "summary_2050.json"
        ]
    );

    let cfg = ExposureConfig::default();
    let tracts = read_tracts(&toy().join("tracts.geojson")).unwrap();
    let facilities = read_facilities(&toy().join("facilities.csv")).unwrap();
    let flood = read_flood_scenario(&toy().join("flood_2050.csv"), "2050").unwrap();
    let result = Study::new(&tracts, &cfg)
        .unwrap()
        .run(&facilities, &flood, &cfg)
        .unwrap();

    let (header, rows) = csv_rows(&dir.path().join("exposure_2050.csv"));
    assert_eq!(header.len(), 3 + 3 * cfg.radii.len());
    assert_eq!(rows.len(), result.exposures.len());
    for (row, e) in rows.iter().zip(&result.exposures) {
        assert_eq!(row[0], e.geoid);
        let mut expect = vec![
            fixed(e.total_pop, COUNT_DIGITS),
            fixed(e.tract_area, AREA_DIGITS),
        ];
        for r in &e.per_radius {
            expect.extend([
                fixed(r.area_in_zone, AREA_DIGITS),
                fixed(r.threatened_pop, COUNT_DIGITS),
                fixed(r.ratio, COUNT_DIGITS),
            ]);
        }
        assert_eq!(row[1..], expect[..]);
        // Re-parsed values sit within half a unit of the last printed place.
        let parsed: Vec<f64> = row[1..].iter().map(|c| c.parse().unwrap()).collect();
        let mut exact = vec![e.total_pop, e.tract_area];
        for r in &e.per_radius {
            exact.extend([r.area_in_zone, r.threatened_pop, r.ratio]);
        }
        for (k, (p, x)) in parsed.iter().zip(&exact).enumerate() {
            let digits = if k == 1 || (k >= 2 && (k - 2) % 3 == 0) {
                AREA_DIGITS
            } else {
                COUNT_DIGITS
            };
            let half_unit = 0.5 * 10f64.powi(-(digits as i32));
            assert!(
                (p - x).abs() <= half_unit + 4.0 * f64::EPSILON * x.abs(),
                "{p} vs {x}"
            );
        }
    }

    let (_, flooded) = csv_rows(&dir.path().join("flooded_2050.csv"));
    let ids: Vec<&str> = flooded.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ids, ["F001", "F002"]);
    assert_eq!(flooded[1][1], "NPL");

    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary_2050.json")).unwrap())
            .unwrap();
    assert_eq!(summary["flooded_facilities"]["total"], 2);
    assert_eq!(summary["flooded_facilities"]["by_kind"]["INDUSTRIAL"], 0);
    assert_eq!(summary["disparity"]["columns"][0]["label"], "ALL");
    assert_eq!(summary["disparity"]["columns"][0]["members"], 5);

    let geo: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("exposure_2050.geojson")).unwrap())
            .unwrap();
    let features = geo["features"].as_array().unwrap();
    assert_eq!(features.len(), 5);
    for (f, e) in features.iter().zip(&result.exposures) {
        assert_eq!(f["properties"]["GEOID"], e.geoid.as_str());
        let got = f["properties"]["threatened_pop_3mi"].as_f64().unwrap();
        assert_eq!(
            fixed(got, COUNT_DIGITS),
            fixed(e.per_radius[1].threatened_pop, COUNT_DIGITS)
        );
    }
}

#[test]
fn empty_flood_gives_zero_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let flood = dir.path().join("dry.csv");
    std::fs::write(&flood, "lon,lat,depth_m\n").unwrap();
    let out = dir.path().join("out");
    let args = [
        "run",
        "--config",
        &config(),
        "--scenario",
        "current",
        "--flood-current",
        flood.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ];
    let o = cli(&args, "0");
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (header, rows) = csv_rows(&out.join("exposure_2018.csv"));
    assert_eq!(rows.len(), 5);
    for row in rows {
        for (h, v) in header.iter().zip(row) {
            if h.starts_with("ratio_") || h.starts_with("threatened_pop_") {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{h}");
            }
        }
    }
    let (_, flooded) = csv_rows(&out.join("flooded_2018.csv"));
    assert!(flooded.is_empty());
}

#[test]
fn flags_alone_are_enough() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| toy().join(f).display().to_string();
    let (fac, tr, fl) = (
        p("facilities.csv"),
        p("tracts.geojson"),
        p("flood_2018.csv"),
    );
    let args = [
        "run",
        "--scenario",
        "current",
        "--facilities",
        &fac,
        "--tracts",
        &tr,
        "--flood_current",
        &fl,
        "--radii-m",
        "1000,2000",
        "--output-dir",
        dir.path().to_str().unwrap(),
        "--emit-geojson",
        "false",
    ];
    let o = cli(&args, "0");
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let files: Vec<String> = read_dir(dir.path()).into_keys().collect();
    assert_eq!(
        files,
        [
            "exposure_current.csv",
            "flooded_current.csv",
            "summary_current.json"
        ]
    );
    let (header, _) = csv_rows(&dir.path().join("exposure_current.csv"));
    assert_eq!(header.len(), 9);
    assert!(header[3].starts_with("area_in_zone_m2_0.621"), "{header:?}");
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let base = tempfile::tempdir().unwrap();
    let mut seen: Option<BTreeMap<String, Vec<u8>>> = None;
    for threads in ["1", "2", "8"] {
        let out = base.path().join(threads);
        let out = out.to_str().unwrap();
        for args in [
            vec![
                "run",
                "--config",
                &config(),
                "--scenario",
                "current",
                "--output-dir",
                out,
            ],
            vec![
                "run",
                "--config",
                &config(),
                "--scenario",
                "future",
                "--output-dir",
                out,
            ],
            vec!["compare", "--config", &config(), "--output-dir", out],
        ] {
            assert_eq!(cli(&args, threads).status.code(), Some(0));
        }
        let files = read_dir(Path::new(out));
        assert_eq!(files.len(), 11);
        match &seen {
            None => seen = Some(files),
            Some(first) => assert!(first == &files, "outputs differ with {threads} workers"),
        }
    }
}

#[test]
fn identical_scenarios_give_zero_delta() {
    let dir = tempfile::tempdir().unwrap();
    let flood = toy().join("flood_2050.csv");
    let args = [
        "compare",
        "--config",
        &config(),
        "--flood-current",
        flood.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ];
    assert_eq!(cli(&args, "0").status.code(), Some(0));
    let (_, rows) = csv_rows(&dir.path().join("delta.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1..].iter().all(|v| v == "0.000")));
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("compare_summary.json")).unwrap())
            .unwrap();
    for t in summary["totals"].as_array().unwrap() {
        assert_eq!(t["increase"], 0.0);
    }
    assert!(summary["increase_profile"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["means"].is_null()));
}

#[test]
fn compare_matches_recomputation_and_radar_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "compare",
        "--config",
        &config(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ];
    assert_eq!(cli(&args, "0").status.code(), Some(0));

    let cfg = ExposureConfig::default();
    let tracts = read_tracts(&toy().join("tracts.geojson")).unwrap();
    let facilities = read_facilities(&toy().join("facilities.csv")).unwrap();
    let study = Study::new(&tracts, &cfg).unwrap();
    let run = |f: &str, l: &str| {
        study
            .run(
                &facilities,
                &read_flood_scenario(&toy().join(f), l).unwrap(),
                &cfg,
            )
            .unwrap()
    };
    let (current, future) = (run("flood_2018.csv", "2018"), run("flood_2050.csv", "2050"));
    let delta = scenario_delta(&current, &future).unwrap();

    let (_, rows) = csv_rows(&dir.path().join("delta.csv"));
    for (row, (c, f)) in rows
        .iter()
        .zip(current.exposures.iter().zip(&future.exposures))
    {
        assert_eq!(row[0], c.geoid);
        for k in 0..cfg.radii.len() {
            let increase = f.per_radius[k].threatened_pop - c.per_radius[k].threatened_pop;
            assert_eq!(row[1 + 2 * k], fixed(increase, COUNT_DIGITS));
            assert_eq!(row[2 + 2 * k], fixed(increase / c.total_pop, COUNT_DIGITS));
        }
    }
    // The 2050 flood reaches the NPL site, so exposure grows somewhere.
    assert!(delta.totals.iter().any(|t| t.increase > 0.0));

    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("compare_summary.json")).unwrap())
            .unwrap();
    for (t, d) in summary["totals"]
        .as_array()
        .unwrap()
        .iter()
        .zip(&delta.totals)
    {
        assert_eq!(
            fixed(t["increase"].as_f64().unwrap(), COUNT_DIGITS),
            fixed(d.increase, COUNT_DIGITS)
        );
    }
    let mut checked = 0;
    for which in ["current", "future"] {
        let radar = &summary["charts"]["radar"][which];
        for s in radar["series"].as_array().unwrap() {
            for v in s["values"].as_array().unwrap() {
                let v = v.as_f64().unwrap();
                assert!((0.0..=1.0).contains(&v));
                checked += 1;
            }
        }
    }
    assert!(checked >= 20);
}

#[test]
fn missing_future_path_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| toy().join(f).display().to_string();
    let (fac, tr, fl) = (
        p("facilities.csv"),
        p("tracts.geojson"),
        p("flood_2018.csv"),
    );
    let args = [
        "compare",
        "--facilities",
        &fac,
        "--tracts",
        &tr,
        "--flood-current",
        &fl,
        "--output-dir",
        dir.path().to_str().unwrap(),
    ];
    let o = cli(&args, "0");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("flood_future"));
}
