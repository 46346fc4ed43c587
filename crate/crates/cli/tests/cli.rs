use std::path::{Path, PathBuf};
use std::process::Command as Process;

use dbh_cli::*;
use proptest::prelude::*;

fn dbh() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_dbh"));
    p.env_remove(JOBS_ENV).stderr(std::process::Stdio::null());
    p
}

fn parse(line: &str) -> Result<RunConfig, clap::Error> {
    parse_args(std::iter::once("dbh").chain(line.split_whitespace()))
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn spectrum_example_parses() {
    let c = parse("spectrum --atoms 2 --omega 10 --n-max 30 -o spec.csv").unwrap();
    let Command::Spectrum(a) = c.command else {
        panic!("wrong command")
    };
    assert_eq!(a.atoms, 2);
    assert_eq!(a.omega, OmegaSpec::Single(10.0));
    assert_eq!(a.n_max, 30);
    assert_eq!(a.output.output, PathBuf::from("spec.csv"));
    assert_eq!(a.output.format, Format::Csv);
}

#[test]
fn phase_diagram_example_parses_with_negative_values() {
    let c = parse("phase-diagram --atoms 2 --omega 10 --kappa-max 0.2 --mu-rel-min -1 --mu-rel-max 0 --nk 200 --nmu 200 -o pd.csv")
        .unwrap();
    let Command::PhaseDiagram(a) = c.command else {
        panic!("wrong command")
    };
    assert_eq!((a.grid.kappa_min, a.grid.kappa_max), (0.0, 0.2));
    assert_eq!((a.grid.mu_rel_min, a.grid.mu_rel_max), (-1.0, 0.0));
    assert_eq!((a.grid.nk, a.grid.nmu), (200, 200));
    assert_eq!(a.model.n_max, 30);
    assert_eq!(a.model.omega, 10.0);
}

#[test]
fn usage_errors_name_the_flag() {
    for (line, flag) in [
        ("phase-diagram --atoms 0 -o x.csv", "--atoms"),
        ("solve --beta 0 -o x.csv", "--beta"),
        ("solve --kappa -0.1 -o x.csv", "--kappa"),
        ("solve --kappa abc -o x.csv", "--kappa"),
        ("solve --omega nan -o x.csv", "--omega"),
        ("phase-diagram --nk 1 -o x.csv", "--nk"),
        (
            "phase-diagram --kappa-min 0.3 --kappa-max 0.1 -o x.csv",
            "--kappa-max",
        ),
        (
            "density --mu-rel-min 1 --mu-rel-max 0 -o x.csv",
            "--mu-rel-max",
        ),
        ("spectrum --atoms 3 -o x.csv", "--atoms"),
        ("mu-crit --n-min 1 -o x.csv", "--n-min"),
        ("rabi --n-min 5 --n-max 4 -o x.csv", "--n-max"),
        ("converge --n-max-start 40 -o x.csv", "--n-max-start"),
        ("solve --jobs 0 -o x.csv", "--jobs"),
        ("lobe-tips --atoms-list 3,0 -o x.csv", "--atoms-list"),
    ] {
        let err = parse(line).expect_err(line);
        assert!(err.to_string().contains(flag), "{line}: {err}");
        assert_eq!(err.exit_code(), 2, "{line}");
    }
    assert!(parse("solve").is_err(), "output is required");
    assert!(parse("solve -o x.csv --mu 1 --mu-rel 0").is_err());
    assert!(parse("solve -o x.csv --unknown 3").is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let status = dbh()
        .args(["phase-diagram", "--atoms", "0", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());

    let status = dbh()
        .args(["solve", "-o"])
        .arg(dir.path().join("missing/dir/x.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    let status = dbh()
        .args(["solve", "--n-max", "8", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.exists() && dir.path().join("x.json").exists());
}

#[test]
fn jobs_default_comes_from_the_environment() {
    let c = parse_args(["dbh", "solve", "-o", "x.csv"]).unwrap();
    assert!(c.command.output().jobs >= 1);
    let dir = tempfile::tempdir().unwrap();
    let status = dbh()
        .env(JOBS_ENV, "0")
        .args(["solve", "--n-max", "4", "-o"])
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(
        status.code(),
        Some(2),
        "an invalid DBH_JOBS is a usage error"
    );
    let status = dbh()
        .env(JOBS_ENV, "3")
        .args(["solve", "--n-max", "4", "-o"])
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn every_command_writes_its_schema_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &str); 8] = [
        ("spectrum", "--omega 0:20:5 --n-max 4", "n,omega_over_beta,e_minus,e_zero,e_plus"),
        ("rabi", "--omega 0:20:5 --n-max 4", "n,omega_over_beta,R"),
        ("mu-crit", "--omega 10 --n-min 2 --n-max 5", "n,omega_over_beta,mu_c_eq10,mu_c_degeneracy"),
        ("converge", "--kappa 0.02 --mu-rel -0.25 --n-max-start 25 --n-max 30", "n_max,e_ground"),
        ("solve", "--kappa 0.02 --mu-rel -0.25", "kappa_over_beta,mu_rel,psi_min,e_ground,rho,phase,converged"),
        (
            "phase-diagram",
            "--omega 0.5 --n-max 10 --kappa-max 0.05 --mu-rel-min -1.3 --mu-rel-max -0.9 --nk 4 --nmu 5",
            "kappa_over_beta,mu_rel,psi_min,e_ground,rho,phase,converged",
        ),
        (
            "density",
            "--omega 0.5 --n-max 10 --kappa-max 0.05 --mu-rel-min -1.3 --mu-rel-max -0.9 --nk 3 --nmu 3",
            "kappa_over_beta,mu_rel,psi_min,e_ground,rho,phase,converged",
        ),
        (
            "lobe-tips",
            "--atoms-list 2 --omega 0.5 --n-max 10 --kappa-max 0.1 --mu-rel-min -1.3 --mu-rel-max -1.0 --nk 6 --nmu 8",
            "atoms,n_lobe,kappa_tip,found",
        ),
    ];
    for (cmd, flags, expected) in cases {
        let out = dir.path().join(format!("{cmd}.csv"));
        let status = dbh()
            .arg(cmd)
            .args(flags.split_whitespace())
            .arg("-o")
            .arg(&out)
            .arg("--jobs=1")
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "{cmd}");
        assert_eq!(header(&out), expected, "{cmd}");
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(!text.contains('\r') && text.ends_with('\n'));
        let width = expected.split(',').count();
        assert!(text.lines().all(|l| l.split(',').count() == width), "{cmd}");

        let meta: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join(format!("{cmd}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(meta["command"], cmd);
        assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(
            meta["rows"].as_u64().unwrap() as usize,
            text.lines().count() - 1
        );
    }
    // Grid sidecars carry the grid and the extracted lobes.
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("phase-diagram.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["grid"]["nk"], 4);
    assert_eq!(meta["grid"]["params_base"]["omega"], 0.5);
    assert!(meta["boundaries"].is_array());
}

#[test]
fn json_format_is_one_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = dbh()
        .args([
            "rabi", "--omega", "1", "--n-max", "3", "--format", "json", "-o",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[1]["n"], 2);
    // R² − x² = 8(2n − 1)
    let r = records[1]["R"].as_f64().unwrap();
    assert!((r * r - 1.0 - 24.0).abs() < 1e-12);
}

#[test]
fn output_bytes_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let out = dir.path().join(name);
        let status = dbh()
            .args([
                "phase-diagram",
                "--omega",
                "0.5",
                "--n-max",
                "10",
                "--kappa-max",
                "0.06",
            ])
            .args([
                "--mu-rel-min",
                "-1.3",
                "--mu-rel-max",
                "-0.7",
                "--nk",
                "7",
                "--nmu",
                "9",
                "--jobs",
                jobs,
                "-o",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        (
            std::fs::read(&out).unwrap(),
            std::fs::read(out.with_extension("json")).unwrap(),
        )
    };
    let one = run("1", "a.csv");
    let eight = run("8", "b.csv");
    assert_eq!(one.0, eight.0);
    assert_eq!(one.1, eight.1);
    // Repeat runs too.
    assert_eq!(run("1", "c.csv").0, one.0);
}

fn finite_f64(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    prop_oneof![lo..hi, Just(lo), Just(0.0f64.clamp(lo, hi))]
}

fn output() -> impl Strategy<Value = OutputArgs> {
    (
        "[a-z]{1,8}(\\.csv|\\.json)?",
        prop_oneof![Just(Format::Csv), Just(Format::Json)],
        1usize..64,
    )
        .prop_map(|(name, format, jobs)| OutputArgs {
            output: PathBuf::from(name),
            format,
            jobs,
        })
}

fn model() -> impl Strategy<Value = ModelArgs> {
    (
        finite_f64(0.0, 50.0),
        proptest::option::of(-50.0f64..50.0),
        1e-3f64..10.0,
        1usize..7,
        0usize..60,
    )
        .prop_map(|(omega, epsilon, beta, z, n_max)| ModelArgs {
            omega,
            epsilon,
            beta,
            z,
            n_max,
        })
}

fn point() -> impl Strategy<Value = PointArgs> {
    (
        finite_f64(0.0, 5.0),
        prop_oneof![
            Just((None, None)),
            (-20.0f64..20.0).prop_map(|m| (Some(m), None)),
            (-20.0f64..20.0).prop_map(|m| (None, Some(m))),
        ],
    )
        .prop_map(|(kappa, (mu_rel, mu))| PointArgs { kappa, mu_rel, mu })
}

fn grid() -> impl Strategy<Value = GridFlags> {
    (
        0.0f64..1.0,
        0.0f64..1.0,
        -5.0f64..5.0,
        -5.0f64..5.0,
        2usize..400,
        2usize..400,
    )
        .prop_map(|(a, b, c, d, nk, nmu)| GridFlags {
            kappa_min: a.min(b),
            kappa_max: a.max(b),
            mu_rel_min: c.min(d),
            mu_rel_max: c.max(d),
            nk,
            nmu,
        })
}

fn omega_spec() -> impl Strategy<Value = OmegaSpec> {
    prop_oneof![
        (0.0f64..100.0).prop_map(OmegaSpec::Single),
        (0.0f64..50.0, 0.0f64..50.0, 2usize..1000).prop_map(|(a, b, count)| OmegaSpec::Range {
            start: a.min(b),
            end: a.max(b),
            count
        }),
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    let branch = (omega_spec(), 2usize..10, 0usize..30, output(), 0usize..3).prop_map(
        |(omega, n_min, extra, output, which)| {
            let args = BranchArgs {
                atoms: 2,
                omega,
                n_min,
                n_max: n_min + extra,
                output,
            };
            match which {
                0 => Command::Spectrum(args),
                1 => Command::Rabi(args),
                _ => Command::MuCrit(args),
            }
        },
    );
    let converge =
        (1usize..12, model(), point(), output()).prop_map(|(atoms, model, point, output)| {
            let n_max_start = model.n_max / 2;
            Command::Converge(ConvergeArgs {
                atoms,
                model,
                point,
                n_max_start,
                output,
            })
        });
    let solve =
        (1usize..12, model(), point(), output()).prop_map(|(atoms, model, point, output)| {
            Command::Solve(SolveArgs {
                atoms,
                model,
                point,
                output,
            })
        });
    let sweep = (1usize..12, model(), grid(), output(), any::<bool>()).prop_map(
        |(atoms, model, grid, output, density)| {
            let args = GridArgs {
                atoms,
                model,
                grid,
                output,
            };
            if density {
                Command::Density(args)
            } else {
                Command::PhaseDiagram(args)
            }
        },
    );
    let tips = (
        proptest::collection::vec(1usize..20, 1..6),
        0usize..4,
        model(),
        grid(),
        output(),
    )
        .prop_map(|(atoms_list, n_lobe, model, grid, output)| {
            Command::LobeTips(TipArgs {
                atoms_list,
                n_lobe,
                model,
                grid,
                output,
            })
        });
    prop_oneof![branch, converge, solve, sweep, tips].prop_map(|command| RunConfig { command })
}

proptest! {
    #[test]
    fn flag_rendering_round_trips(c in config()) {
        let args = c.to_args();
        let parsed = parse_args(&args).map_err(|e| TestCaseError::fail(format!("{args:?}: {e}")))?;
        prop_assert_eq!(parsed, c);
    }
}
