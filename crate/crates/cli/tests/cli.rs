use std::process::{Command, Output};

const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn tradebloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradebloc"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = tradebloc(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Summary pairs, header and data rows of a CSV report.
type Csv = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

fn parse_csv(text: &str) -> Csv {
    let mut summary = Vec::new();
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        match line.strip_prefix("# ") {
            Some(kv) => {
                let (k, v) = kv.split_once('=').unwrap();
                summary.push((k.to_string(), v.to_string()));
            }
            None => {
                header = Some(line.split(',').map(str::to_string).collect());
                break;
            }
        }
    }
    let rows = lines.map(split_csv_line).collect();
    (summary, header.unwrap(), rows)
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    out.push(cur);
    out
}

fn summary_value<'a>(summary: &'a [(String, String)], key: &str) -> &'a str {
    &summary.iter().find(|(k, _)| k == key).unwrap().1
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

const ALL_COMMANDS: &[&[&str]] = &[
    &["sweep"],
    &["two-fta"],
    &["spe", "--rule", "consent"],
    &["spe", "--rule", "open", "--order", "reverse"],
    &["nash"],
    &["regime", "--regime", "1-5|6|7|8"],
    &["cu", "--partition", "1-5|6,7"],
    &["stability", "--regime", "1-5|6-8"],
    &["figure"],
];

#[test]
fn repeated_runs_are_byte_identical() {
    for cmd in ALL_COMMANDS {
        for format in ["csv", "json"] {
            for exact in [false, true] {
                let mut args = cmd.to_vec();
                args.extend(["--format", format]);
                if exact {
                    args.push("--exact");
                }
                assert_eq!(tradebloc(&args).stdout, tradebloc(&args).stdout, "{args:?}");
            }
        }
    }
}

#[test]
fn json_reports_validate_against_schema() {
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for cmd in ALL_COMMANDS {
        let mut args = cmd.to_vec();
        args.extend(["--format", "json"]);
        let doc: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let mut bad: serde_json::Value = serde_json::from_str(&stdout(&["sweep", "--format", "json"])).unwrap();
    bad["columns"][0] = serde_json::json!("size");
    assert!(!validator.is_valid(&bad));
}

#[test]
fn csv_headers_match_json_columns() {
    for cmd in ALL_COMMANDS {
        let (_, header, rows) = parse_csv(&stdout(cmd));
        let mut args = cmd.to_vec();
        args.extend(["--format", "json"]);
        let doc: serde_json::Value = serde_json::from_str(&stdout(&args)).unwrap();
        let columns: Vec<String> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
        assert_eq!(header, columns);
        assert_eq!(rows.len(), doc["rows"].as_array().unwrap().len());
    }
}

#[test]
fn sweep_reproduces_the_example_table() {
    let (summary, header, rows) = parse_csv(&stdout(&["sweep"]));
    assert_eq!(header.join(","), "m,t_p,t_np,m_p^p,m_np^p,m_p^np,W_p,W_np");
    assert_eq!(summary_value(&summary, "m_star"), "5");
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[4][6], "487.942");
    assert_eq!(rows[4][7], "486.209");
    assert_eq!(rows[4][1], "0.160475");
    assert!(rows.iter().all(|r| r[2] == "0.161435"));
    for w in rows[..7].windows(2) {
        assert!(num(&w[1][7]) < num(&w[0][7]));
    }
    assert_eq!(rows[7][7], "");
    assert_eq!(rows[7][6], "487.385");
    // Nash imports in the first row
    assert!(rows[0][3..6].iter().all(|c| c == &rows[0][3]));
}

#[test]
fn exact_mode_prints_the_same_rounded_table() {
    assert_eq!(
        stdout(&["sweep"]).replace("numeric_mode=float64", ""),
        stdout(&["sweep", "--exact"]).replace("numeric_mode=exact", "")
    );
}

#[test]
fn two_fta_rows() {
    let (_, _, rows) = parse_csv(&stdout(&["two-fta"]));
    let labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(labels, vec!["(5,1,1,1)", "(5,2,1)", "(5,3)"]);
    let (_, _, sweep) = parse_csv(&stdout(&["sweep"]));
    assert_eq!(rows[0][1], sweep[4][1]);
    assert_eq!(rows[0][4], sweep[4][6]);
    assert_eq!(rows[0][5], sweep[4][7]);
    assert!(num(&rows[0][5]) < num(&rows[1][5]) && num(&rows[1][5]) < num(&rows[2][5]));
    assert_eq!(rows[2][3], "");
    assert_eq!(rows[2][6], "");
    let (_, _, regime) = parse_csv(&stdout(&["regime", "--regime", "1-5|6-8"]));
    assert_eq!(rows[2][4], regime[0][3]);
}

#[test]
fn spe_reports() {
    let (summary, _, rows) = parse_csv(&stdout(&["spe", "--rule", "consent"]));
    assert_eq!(summary_value(&summary, "final_regime"), "1-5|6|7|8");
    assert_eq!(summary_value(&summary, "m_star"), "5");
    assert_eq!(summary_value(&summary, "solvers_agree"), "true");
    assert_eq!(rows[5][3], "1:reject 2:reject 3:reject 4:reject 5:reject");
    let (summary, _, rows) = parse_csv(&stdout(&["spe", "--rule", "open", "--order", "3,1,2,8,7,6,5,4"]));
    assert_eq!(summary_value(&summary, "final_regime"), "1-8");
    assert!(rows.iter().all(|r| r[8] == "487.385"));
    let (summary, _, _) = parse_csv(&stdout(&["spe", "--order", "reverse", "--solver", "tree"]));
    assert_eq!(summary_value(&summary, "final_regime"), "4-8|1|2|3");
}

#[test]
fn spe_without_tree_for_large_worlds() {
    let (summary, _, _) = parse_csv(&stdout(&["spe", "--n", "40"]));
    assert_eq!(summary_value(&summary, "solver"), "closed-form");
    let out = tradebloc(&["spe", "--n", "40", "--solver", "tree"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nash_report() {
    let (summary, _, rows) = parse_csv(&stdout(&["nash"]));
    assert_eq!(summary_value(&summary, "t_ne"), "0.161435");
    assert_eq!(rows[0][0], "0.161435");
    assert!(num(&rows[0][4]) <= 1e-11);
    let (summary, _, _) = parse_csv(&stdout(&["nash", "--exact", "--sigfigs", "12"]));
    assert_eq!(summary_value(&summary, "t_ne"), "0.161434977578");
}

#[test]
fn figure_series() {
    let (summary, _, rows) = parse_csv(&stdout(&["figure"]));
    assert_eq!(summary_value(&summary, "m_star"), "5");
    let marked: Vec<&str> = rows.iter().filter(|r| r[3] == "true").map(|r| r[0].as_str()).collect();
    assert_eq!(marked, vec!["5"]);
    assert_eq!(rows[0][1], rows[0][2]);
    let (_, _, sweep) = parse_csv(&stdout(&["sweep"]));
    for (f, s) in rows.iter().zip(&sweep) {
        assert_eq!((&f[1], &f[2]), (&s[6], &s[7]));
    }
}

#[test]
fn cu_and_stability_reports() {
    let (summary, _, rows) = parse_csv(&stdout(&["cu", "--partition", "1-5"]));
    assert_eq!(summary_value(&summary, "partition"), "1-5|6|7|8");
    let tne = num(summary_value(&summary, "nash_tariff"));
    assert!(rows.iter().filter(|r| r[0] == "1-5").all(|r| num(&r[3]) > tne));
    let (summary, _, rows) = parse_csv(&stdout(&["stability", "--regime", "1-5|6-8"]));
    assert_eq!(summary_value(&summary, "pairwise_stable"), "false");
    assert_eq!(rows[0], vec!["link", "1", "6", "487.628", "487.958", "486.761", "487.091"]);
    let (summary, _, rows) = parse_csv(&stdout(&["stability", "--regime", "1-8"]));
    assert_eq!(summary_value(&summary, "pairwise_stable"), "true");
    assert!(rows.is_empty());
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["bogus"][..],
        &["nash", "--sigfigs", "2"],
        &["nash", "--n", "2"],
        &["nash", "--a", "-1"],
        &["nash", "--lambda", "zero"],
        &["spe", "--rule", "maybe"],
        &["spe", "--order", "1,2,2,4,5,6,7,8"],
        &["two-fta", "--first", "8"],
        &["cu", "--partition", "1-5|5-8"],
        &["regime"],
    ] {
        let out = tradebloc(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn parse_errors_name_token_and_position() {
    let out = tradebloc(&["regime", "--regime", "1-5|x"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("position 4") && err.contains("`x`"), "{err}");
}

#[test]
fn two_country_override() {
    let out = tradebloc(&["figure", "--n", "2", "--allow-two-countries"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_exits_cleanly() {
    let out = tradebloc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("sweep"));
}
