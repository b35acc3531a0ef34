use std::io::Write;
use std::process::Command;

use ulcov::config::{load_config, Mode, Settings, SweepAxis};
use ulcov::figures::figure_curves;
use ulcov::grid::parse_grid;
use ulcov::{csv_string, run_sweep, CliError};
use ulcov_core::{Fading, LosProfile};

fn cfg(pairs: &[(&str, &str)]) -> Result<ulcov::RunConfig, CliError> {
    let owned: Vec<(&str, String)> = pairs.iter().map(|(k, v)| (*k, v.to_string())).collect();
    load_config(None, &owned)
}

fn invalid_key(e: CliError) -> String {
    match e {
        CliError::Invalid { key, .. } => key,
        other => panic!("expected an invalid-value error, got {other:?}"),
    }
}

#[test]
fn empty_config_gives_defaults() {
    let c = cfg(&[]).unwrap();
    assert_eq!(c.mode, Mode::Analytic);
    assert_eq!(c.sweep, SweepAxis::ThresholdDb);
    assert_eq!(c.grid.len(), 31);
    assert_eq!(c.grid[0], -10.0);
    assert_eq!(c.grid[30], 20.0);
    let s = &c.scenario;
    assert_eq!(s.lambda, 1000.0);
    assert_eq!(s.power.epsilon, 0.7);
    assert!((s.power.p0 / 2.511_886_4e-8 - 1.0).abs() < 1e-6);
    assert!((s.noise / 10f64.powf(-9.9) - 1.0).abs() < 1e-12);
    assert_eq!(s.profile, LosProfile::Linear { d1: 0.3 });
    assert_eq!(s.fading, Fading::Rayleigh);
    assert!(!c.ase);
    assert_eq!(c.out, None);
}

#[test]
fn invalid_values_name_their_key() {
    assert_eq!(
        invalid_key(cfg(&[("epsilon", "0")]).unwrap_err()),
        "epsilon"
    );
    assert_eq!(
        invalid_key(cfg(&[("epsilon", "1.2")]).unwrap_err()),
        "epsilon"
    );
    assert_eq!(invalid_key(cfg(&[("lambda", "-1")]).unwrap_err()), "lambda");
    assert_eq!(
        invalid_key(cfg(&[("drops", "x"), ("mode", "montecarlo")]).unwrap_err()),
        "drops"
    );
    assert_eq!(
        invalid_key(cfg(&[("profile", "hata")]).unwrap_err()),
        "profile"
    );
    assert_eq!(
        invalid_key(cfg(&[("ue_density_ratio", "2")]).unwrap_err()),
        "ue_density_ratio"
    );
    let msg = cfg(&[("epsilon", "0")]).unwrap_err().to_string();
    assert!(msg.contains("epsilon") && msg.contains("ε∈(0,1]"), "{msg}");
}

#[test]
fn unknown_key_is_rejected() {
    let e = cfg(&[("lamda", "10")]).unwrap_err();
    assert!(
        matches!(&e, CliError::UnknownKey(k) if k == "lamda"),
        "{e:?}"
    );
}

#[test]
fn analytic_mode_needs_linear_profile_and_rayleigh() {
    for pairs in [
        &[("profile", "exponential")][..],
        &[("fading", "ricean")][..],
        &[("mode", "both"), ("fading", "ricean")][..],
    ] {
        let e = cfg(pairs).unwrap_err();
        assert!(
            matches!(&e, CliError::Config(m) if m.contains("montecarlo")),
            "{e:?}"
        );
    }
    assert!(cfg(&[("mode", "montecarlo"), ("profile", "exponential")]).is_ok());
    let r = cfg(&[
        ("mode", "montecarlo"),
        ("fading", "ricean"),
        ("ricean_k_db", "10"),
    ])
    .unwrap();
    assert_eq!(r.scenario.fading, Fading::Ricean { k: 10.0 });
    assert_eq!(
        invalid_key(
            cfg(&[
                ("mode", "montecarlo"),
                ("fading", "ricean"),
                ("ricean_k_db", "-3")
            ])
            .unwrap_err()
        ),
        "ricean_k_db"
    );
}

#[test]
fn grid_syntax() {
    assert_eq!(
        parse_grid("grid", "1, 2.5,10").unwrap(),
        vec![1.0, 2.5, 10.0]
    );
    assert_eq!(
        parse_grid("grid", "lin:0:1:0.25").unwrap(),
        vec![0.0, 0.25, 0.5, 0.75, 1.0]
    );
    let g = parse_grid("grid", "log:10:10^3:2").unwrap();
    assert_eq!(g.len(), 5);
    assert!((g[1] / 10f64.powf(1.5) - 1.0).abs() < 1e-12);
    for bad in [
        "",
        "lin:0:1",
        "lin:0:1:0",
        "log:0:10:5",
        "log:1:10:2.5",
        "3,2",
        "1,x",
    ] {
        assert!(parse_grid("grid", bad).is_err(), "{bad:?}");
    }
    assert_eq!(
        invalid_key(cfg(&[("grid", "lin:5:1:1")]).unwrap_err()),
        "grid"
    );
    let lam = cfg(&[("sweep", "lambda")]).unwrap();
    assert_eq!(lam.grid.len(), 36);
}

#[test]
fn config_file_with_comments_and_overrides() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "# small cells\nlambda = 10\n\nepsilon=0.8 # stronger compensation\nprofile=single-slope"
    )
    .unwrap();
    let c = load_config(Some(f.path()), &[("epsilon", "0.6".into())]).unwrap();
    assert_eq!(c.scenario.lambda, 10.0);
    assert_eq!(c.scenario.power.epsilon, 0.6);
    assert_eq!(c.scenario.profile, LosProfile::SingleSlope);

    let mut g = tempfile::NamedTempFile::new().unwrap();
    writeln!(g, "lambda 10").unwrap();
    assert!(matches!(
        load_config(Some(g.path()), &[]),
        Err(CliError::Syntax { line: 1, .. })
    ));
}

#[test]
fn default_threshold_sweep_is_a_ccdf() {
    let c = cfg(&[]).unwrap();
    let rows = run_sweep(&c).unwrap();
    assert_eq!(rows.len(), 31);
    for w in rows.windows(2) {
        let (a, b) = (w[0].pcov_analytic.unwrap(), w[1].pcov_analytic.unwrap());
        assert!(b <= a + 1e-9, "{a} -> {b}");
    }
    assert!(rows
        .iter()
        .all(|r| r.pcov_mc.is_none() && r.ase_analytic.is_none()));
}

#[test]
fn reruns_are_byte_identical() {
    let pairs = [
        ("mode", "both"),
        ("sweep", "lambda"),
        ("grid", "10,100"),
        ("ase", "true"),
        ("drops", "2000"),
        ("seed", "42"),
    ];
    let a = csv_string(&run_sweep(&cfg(&pairs).unwrap()).unwrap());
    let b = csv_string(&run_sweep(&cfg(&pairs).unwrap()).unwrap());
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].split(',').all(|f| !f.is_empty()), "{}", lines[1]);
    let mut reseeded = pairs;
    reseeded[5] = ("seed", "43");
    let other = csv_string(&run_sweep(&cfg(&reseeded).unwrap()).unwrap());
    assert_ne!(a, other);
}

#[test]
fn figure_recipes_resolve() {
    let quick = Settings::new();
    for (id, n) in [
        ("fig1", 1),
        ("fig2", 2),
        ("fig3", 3),
        ("fig4", 3),
        ("fig5", 3),
        ("fig6", 3),
    ] {
        let curves = figure_curves(id, &quick).unwrap();
        assert_eq!(curves.len(), n, "{id}");
    }
    let f6 = figure_curves("fig6", &quick).unwrap();
    assert!(f6
        .iter()
        .all(|c| c.config.ase && c.config.mode == Mode::MonteCarlo));
    let f1 = &figure_curves("fig1", &quick).unwrap()[0];
    assert_eq!(f1.config.scenario.profile, LosProfile::SingleSlope);
    assert_eq!(f1.config.mode, Mode::Both);
}

fn ulcov(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ulcov"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_writes_csv_and_reports_errors() {
    let ok = ulcov(&["sweep", "--grid", "-10,0", "--lambda", "100"]);
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with(ulcov::sweep::CSV_HEADER));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let ok = ulcov(&["sweep", "--grid", "0", "--out", out.to_str().unwrap()]);
    assert!(ok.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);

    let bad = ulcov(&["sweep", "--epsilon", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("epsilon"), "{err}");

    let bad = ulcov(&["figure", "fig9"]);
    assert!(!bad.status.success());
}

#[test]
fn figure_writes_curves_and_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = ulcov(&[
        "figure",
        "fig4",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--grid",
        "1,10,100",
    ]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    for name in [
        "fig4_eps0.6.csv",
        "fig4_eps0.7.csv",
        "fig4_eps0.8.csv",
        "fig4_regimes.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let regimes = std::fs::read_to_string(dir.path().join("fig4_regimes.csv")).unwrap();
    assert_eq!(regimes.lines().count(), 4);
}
