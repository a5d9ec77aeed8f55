use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;
use std::process::Command;

use driven_exciton::harness::*;
use driven_exciton::model::steady_state_w;
use driven_exciton::params::{Fig2Variant, SystemParams};

const FIG2_SYSTEM: &str = "[system]\ngamma = 20.0\nm_coupling = 20.0\nxi = 10.0\ndelta = 0.5\n";

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_driven-exciton"))
}

#[test]
fn defaults_are_population_figure() {
    let c = parse_config("[system]\n[initial]\n[grid]\n[run]\n[output]\n").unwrap();
    assert_eq!(c.params(), SystemParams::fig1());
    assert!((c.alpha().norm_sqr() - 10.0).abs() < 1e-12);
    assert_eq!((c.grid.j_count, c.grid.window_mult), (4001, 50.0));
}

#[test]
fn config_errors() {
    match parse_config("[system]\ngamma = -1\n") {
        Err(ConfigError::Invalid { field, message }) => {
            assert_eq!(field, "system.gamma");
            assert!(message.contains("SystemParams"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_config("[run]\nt_end = 1.0\nsamples = 10\nwhat = 1\n"),
        Err(ConfigError::Parse { line: 4, .. })
    ));
}

#[test]
fn config_round_trip() {
    let text = format!("{FIG2_SYSTEM}[initial]\nalpha_re = 0.25\nalpha_im = -1.5\ndphi = 0.7\n[output]\nplot = false\n");
    let c = parse_config(&text).unwrap();
    let again = parse_config(&serialize_config(&c)).unwrap();
    assert_eq!(again, c);
    assert_eq!(serialize_config(&again), serialize_config(&c));
}

#[test]
fn fig1_table() {
    let c = parse_config("[run]\nt_end = 50.0\nsamples = 100\n").unwrap();
    let t = run_fig1(&c).unwrap();
    assert_eq!(t.header(), ["t_over_gamma_inv", "mean_n_driven", "mean_n_undriven"]);
    let x = t.column("t_over_gamma_inv").unwrap();
    let driven = t.column("mean_n_driven").unwrap();
    let undriven = t.column("mean_n_undriven").unwrap();
    assert_eq!((x[0], driven[0], undriven[0]), (0.0, 10.0, 10.0));
    assert!(x.windows(2).all(|w| w[0] < w[1]));
    // inset points are dense near the origin
    assert!(x.iter().filter(|&&v| v <= 0.5).count() > 200);

    let i20 = x.iter().position(|&v| v == 20.0).unwrap();
    assert!(undriven[i20] < 1e-3 * 10.0);
    let last = x.len() - 1;
    assert_eq!(x[last], 50.0);
    let plateau = steady_state_w(&c.params()).norm_sqr();
    assert!((driven[last] - plateau).abs() < 0.01 * plateau);
}

#[test]
fn fig2_tables() {
    let c = ScenarioConfig::default();
    let a = run_fig2(&c, Fig2Variant::A).unwrap();
    let (p5, p10) = (a.column("phi_xi5").unwrap(), a.column("phi_xi10").unwrap());
    assert_eq!(p5.len(), c.run.samples + 1);
    for (x, y) in p5.iter().zip(&p10) {
        assert_eq!(*y, 2.0 * x);
    }
    assert_eq!((p5[0], p10[0]), (0.0, 0.0));

    let b = run_fig2(&c, Fig2Variant::B).unwrap().column("phi").unwrap();
    let cc = run_fig2(&c, Fig2Variant::C).unwrap().column("phi").unwrap();
    assert_eq!((b[0], cc[0]), (0.0, 0.0));
    let k = 37;
    assert!((b[k] - cc[k]).abs() > 1e-6);
}

#[test]
fn sweep_dphi() {
    let c = ScenarioConfig::default();
    let t = run_sweep(&c, SweepAxis::Dphi, &[0.0, FRAC_PI_2, PI]).unwrap();
    let tau = t.column("tau_d_fs").unwrap();
    let finite = t.column("tau_d_finite").unwrap();
    assert_eq!(finite, vec![0.0, 1.0, 1.0]);
    let s2 = |d: f64| (0.5 * d).sin().powi(2);
    assert!((tau[1] / tau[2] - s2(PI) / s2(FRAC_PI_2)).abs() < 1e-12);
    assert_eq!(t.column("value").unwrap(), vec![0.0, FRAC_PI_2, PI]);
}

#[test]
fn sweep_xi_keeps_decoherence_time() {
    let c = ScenarioConfig::default();
    let t = run_sweep(&c, SweepAxis::Xi, &[0.0, 5.0, 10.0]).unwrap();
    let tau = t.column("tau_d_fs").unwrap();
    assert!(tau.iter().all(|&v| v == tau[0] && v > 0.0));
    let n = t.column("steady_n").unwrap();
    assert_eq!(n[0], 0.0);
    assert!((n[2] / n[1] - 4.0).abs() < 1e-12);
}

#[test]
fn sweep_n0_scales_inversely() {
    let c = ScenarioConfig::default();
    let t = run_sweep(&c, SweepAxis::N0, &[1.0, 4.0, 16.0]).unwrap();
    let tau = t.column("tau_d_fs").unwrap();
    assert!((tau[0] / tau[1] - 4.0).abs() < 1e-12);
    assert!((tau[1] / tau[2] - 4.0).abs() < 1e-12);
}

#[test]
fn sweep_rejections() {
    assert!("omega".parse::<SweepAxis>().is_err());
    let c = ScenarioConfig::default();
    assert!(run_sweep(&c, SweepAxis::Gamma, &[-1.0]).is_err());
    let too_many = vec![1.0; MAX_SWEEP_POINTS + 1];
    assert!(run_sweep(&c, SweepAxis::Xi, &too_many).is_err());
}

#[test]
fn sweep_rows_order_stable() {
    let c = ScenarioConfig::default();
    let values: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
    let t = run_sweep(&c, SweepAxis::Delta, &values).unwrap();
    assert_eq!(t.column("value").unwrap(), values);
    let again = run_sweep(&c, SweepAxis::Delta, &values).unwrap();
    assert_eq!(t.to_csv_string(), again.to_csv_string());
}

#[test]
fn coeffs_table() {
    let t = run_coeffs(&ScenarioConfig::default()).unwrap();
    assert_eq!(t.header().len(), 9);
    assert_eq!(&t.rows()[0][1..], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn validate_fig2_config_passes() {
    let c = parse_config(FIG2_SYSTEM).unwrap();
    let v = run_validate(&c).unwrap();
    assert!(v.pass(), "{:?}", v.failures());
    let labels: Vec<&str> = v.reports.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(
        labels,
        ["volterra", "mode_equations_u", "mode_equations_w", "coefficient_odes", "sum_rule", "decoherence"]
    );
    assert!(v.reports[1].kernel_truncation.is_some());
    assert_eq!(v.to_jsonl().lines().count(), v.reports.len());
}

#[test]
fn validate_default_config_passes() {
    let v = run_validate(&ScenarioConfig::default()).unwrap();
    assert!(v.pass(), "failing: {:?}", v.failures());
}

#[test]
fn validate_zero_tolerance_fails() {
    let c = parse_config(&format!("{FIG2_SYSTEM}[validate]\ntol_grid = 0.0\n")).unwrap();
    let v = run_validate(&c).unwrap();
    assert!(!v.pass());
    assert!(v.failures().iter().any(|f| f.contains("coefficient_odes: u")));
}

#[test]
fn validate_without_coupling_passes() {
    let c = parse_config("[system]\nm_coupling = 0.0\n").unwrap();
    let v = run_validate(&c).unwrap();
    assert!(v.pass(), "{:?}", v.failures());
}

#[test]
fn csv_emission() {
    let dir = tempfile::tempdir().unwrap();
    let empty = CsvTable::new(["t_over_gamma_inv", "mean_n"]);
    let p = dir.path().join("empty.csv");
    emit_csv(&empty, &p).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "t_over_gamma_inv,mean_n\n");

    let c = ScenarioConfig::default();
    let a = write_table(&dir.path().join("a"), "fig1", &run_fig1(&c).unwrap(), true).unwrap();
    let b = write_table(&dir.path().join("b"), "fig1", &run_fig1(&c).unwrap(), true).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let text = fs::read_to_string(&a[0]).unwrap();
    assert!(text.ends_with('\n'));
    assert!(!text.contains(';'));
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let v: f64 = cell.parse().unwrap();
            assert!(v.is_finite());
            let mantissa = cell.split('e').next().unwrap();
            let significant = mantissa
                .trim_start_matches(['-', '0', '.'])
                .chars()
                .filter(char::is_ascii_digit)
                .count();
            assert!(significant <= 12, "{cell}");
        }
    }
    let missing = dir.path().join("no/such/dir/x.csv");
    let err = emit_csv(&empty, &missing).unwrap_err().to_string();
    assert!(err.contains("x.csv"));
}

/// Resolve every data file a gnuplot script plots and check the columns it
/// asks for exist.
fn check_plot_script(script: &Path) {
    let text = fs::read_to_string(script).unwrap();
    let dir = script.parent().unwrap();
    let mut curves = 0;
    for part in text.split('\'').collect::<Vec<_>>().windows(2) {
        let (name, rest) = (part[0], part[1]);
        if !name.ends_with(".csv") {
            continue;
        }
        let data = fs::read_to_string(dir.join(name)).unwrap();
        let ncols = data.lines().next().unwrap().split(',').count();
        let using = rest.trim_start().strip_prefix("using ").unwrap();
        let spec = using.split_whitespace().next().unwrap();
        for col in spec.split(':') {
            let k: usize = col.parse().unwrap();
            assert!(k >= 1 && k <= ncols);
        }
        curves += 1;
    }
    assert!(curves > 0);
    assert!(text.contains("set datafile separator ','"));
}

#[test]
fn fig1_plot_script_reads_csv() {
    let dir = tempfile::tempdir().unwrap();
    let written = write_table(dir.path(), "fig1", &run_fig1(&ScenarioConfig::default()).unwrap(), true).unwrap();
    check_plot_script(&written[1]);
}

#[test]
fn cli_figures_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = cli().args(["fig1", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("fig1.csv").exists() && out.join("fig1.gp").exists());
    check_plot_script(&out.join("fig1.gp"));

    for v in ["a", "b", "c"] {
        let s = cli().args(["fig2", v, "--out"]).arg(&out).status().unwrap();
        assert_eq!(s.code(), Some(0));
        assert!(out.join(format!("fig2{v}.csv")).exists());
    }
    let s = cli().args(["coeffs", "--out"]).arg(&out).status().unwrap();
    assert_eq!(s.code(), Some(0));
    let s = cli()
        .args(["sweep", "--axis", "delta", "--values", "-1,0,1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 4);

    assert_eq!(cli().arg("nonsense").status().unwrap().code(), Some(2));
    assert_eq!(cli().args(["sweep", "--axis", "omega", "--values", "1"]).status().unwrap().code(), Some(2));
    assert_eq!(cli().args(["fig1", "--grid-j", "4000"]).arg("--out").arg(&out).status().unwrap().code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[system]\ngamma = -1\n").unwrap();
    let o = cli().args(["fig1", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("system.gamma"));
    let missing = cli().args(["fig1", "--config", "/no/such/file.toml"]).status().unwrap();
    assert_eq!(missing.code(), Some(2));
}

#[test]
fn cli_validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, FIG2_SYSTEM).unwrap();
    let out = dir.path().join("v");
    let o = cli().args(["validate", "--config"]).arg(&good).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let jsonl = fs::read_to_string(out.join("validate.jsonl")).unwrap();
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
    }
    assert!(out.join("validate_summary.csv").exists());

    let sabotaged = dir.path().join("bad.toml");
    fs::write(&sabotaged, format!("{FIG2_SYSTEM}[validate]\ntol_volterra = 0.0\n")).unwrap();
    let o = cli().args(["validate", "--config"]).arg(&sabotaged).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("volterra: u"));
}
