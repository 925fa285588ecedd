use std::fs;
use std::path::Path;

use moment_spaces::Domain;
use moment_spaces_cli::args::main_with;
use moment_spaces_cli::commands::{read_json, LimitFile, Metadata, VerifyFile};
use moment_spaces_cli::config::{parse_config, preset};
use moment_spaces_cli::{cmd_limit, CliError, Command, Partial, RunConfig};

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("moment-spaces").chain(args.iter().copied()))
}

fn dir_arg(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn config_sections_parse() {
    let p = parse_config(
        "# comment\n[run]\ncommand = sample\ndomain = halfline\nn = 40\nseed = 7\n\
         [constraint]\nm2 = 0.3\nm1 = 0.1\n[sampler]\nsamples = 500\nchains = 2\n[output]\ndir = \"out\"\n",
    )
    .unwrap();
    assert_eq!(p.command, Some(Command::Sample));
    assert_eq!(p.domain, Some(Domain::HalfLine));
    assert_eq!(p.n, Some(40));
    assert_eq!(p.seed, Some(7));
    assert_eq!(p.constraint, Some(vec![(1, 0.1), (2, 0.3)]));
    assert_eq!(p.samples, Some(500));
    assert_eq!(p.chains, Some(2));
    assert_eq!(p.out.as_deref(), Some(Path::new("out")));
}

#[test]
fn config_rejects_unknown_keys_and_sections() {
    for text in [
        "[run]\nnn = 3\n",
        "[bogus]\n",
        "[sampler]\nn = 3\n",
        "[constraint]\nx1 = 0.3\n",
        "[run]\nn\n",
    ] {
        assert!(
            matches!(parse_config(text), Err(CliError::Config(_))),
            "{text:?}"
        );
    }
}

#[test]
fn potentials_from_config() {
    let p = parse_config("[potential]\nv2 = 8*y^2\nv1 = (y-1)^2\n").unwrap();
    assert_eq!(
        p.potential,
        Some(vec!["(y-1)^2".to_string(), "8*y^2".to_string()])
    );
    assert!(parse_config("[potential]\nv1 = y\nv1 = y^2\n").is_err());
}

#[test]
fn flags_override_file_override_preset() {
    let file = parse_config("[run]\npreset = real-line-example\nn = 50\nseed = 1\n").unwrap();
    let flags = Partial {
        command: Some(Command::Limit),
        seed: Some(9),
        ..Partial::default()
    };
    let cfg = RunConfig::resolve(file, flags).unwrap();
    assert_eq!(cfg.domain, Domain::RealLine);
    assert_eq!(cfg.constraint, vec![(1, 0.0)]);
    assert_eq!(cfg.n, 50);
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.samples, 10_000);
    assert_eq!(cfg.target_acceptance, 0.234);
}

#[test]
fn presets() {
    assert_eq!(preset("double-well").unwrap().potential.unwrap().len(), 4);
    assert_eq!(preset("uniform").unwrap().domain, Some(Domain::Interval01));
    assert!(preset("nope").is_err());
}

#[test]
fn resolve_validates() {
    let no_command = RunConfig::resolve(Partial::default(), Partial::default());
    assert!(no_command.is_err());
    let too_deep = Partial {
        command: Some(Command::Sample),
        n: Some(2),
        constraint: Some(vec![(3, 0.1)]),
        ..Partial::default()
    };
    assert!(RunConfig::resolve(Partial::default(), too_deep).is_err());
}

#[test]
fn limit_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::resolve(
        Partial::default(),
        Partial {
            command: Some(Command::Limit),
            constraint: Some(vec![(1, 0.3)]),
            l: Some(3),
            out: Some(dir.path().to_path_buf()),
            ..Partial::default()
        },
    )
    .unwrap();
    let written = cmd_limit(&cfg).unwrap();
    let read: LimitFile = read_json(&dir.path().join("limit.json")).unwrap();
    assert_eq!(written, read);
    let den = read.minimizers[0].denominator.as_ref().unwrap();
    assert!((den[0] - 0.09).abs() < 1e-12 && (den[1] - 0.4).abs() < 1e-12);
    let csv = fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert!(csv.starts_with("x,density,minimizer"));
    assert_eq!(csv.lines().count(), 513);
}

#[test]
fn read_json_checks_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    fs::write(&path, r#"{"schema": "other/9"}"#).unwrap();
    assert!(matches!(
        read_json::<serde_json::Value>(&path),
        Err(CliError::Config(_))
    ));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir_arg(dir.path());
    assert_eq!(run(&["limit", "--constraint", "m1=0.3", "--out", &out]), 0);
    assert_eq!(
        run(&[
            "limit",
            "--constraint",
            "m2=0.9",
            "--constraint",
            "m1=0.3",
            "--out",
            &out
        ]),
        2
    );
    assert_eq!(
        run(&[
            "limit",
            "--domain",
            "halfline",
            "--potential",
            "v1=0",
            "--out",
            &out
        ]),
        3
    );
    assert_eq!(
        run(&[
            "limit",
            "--domain",
            "realline",
            "--potential",
            "v1=y^4",
            "--potential",
            "v2=y^2",
            "--out",
            &out
        ]),
        4
    );
    assert_eq!(
        run(&[
            "sample",
            "--n",
            "30",
            "--samples",
            "200",
            "--burn-in",
            "10",
            "--constraint",
            "m2=0.3",
            "--rhat-threshold",
            "1.0000001",
            "--out",
            &out
        ]),
        5
    );
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(run(&["limit", "--n", "many"]), 1);
}

#[test]
fn verify_writes_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir_arg(dir.path());
    let code = run(&[
        "verify",
        "--n",
        "200",
        "--samples",
        "4000",
        "--l",
        "2",
        "--seed",
        "4",
        "--out",
        &out,
    ]);
    let file: VerifyFile = read_json(&dir.path().join("verify.json")).unwrap();
    assert_eq!(code, if file.pass { 0 } else { 6 });
    assert!(file.checks.iter().any(|c| c.name == "clt_covariance"));
    assert!(file.checks.iter().any(|c| c.name == "volume_regime"));
}

#[test]
fn replay_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let code = run(&[
        "sample",
        "--preset",
        "real-line-example",
        "--n",
        "12",
        "--samples",
        "300",
        "--seed",
        "5",
        "--out",
        &dir_arg(a.path()),
    ]);
    assert_eq!(code, 0);
    let meta = a.path().join("metadata.json");
    let recorded: Metadata = read_json(&meta).unwrap();
    assert_eq!(recorded.seed, 5);
    assert_eq!(
        run(&[
            "replay",
            meta.to_str().unwrap(),
            "--out",
            &dir_arg(b.path())
        ]),
        0
    );
    let x = fs::read(a.path().join("samples.csv")).unwrap();
    let y = fs::read(b.path().join("samples.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn spectral_of_arcsine_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("p.txt");
    fs::write(&coords, "0.5\n0.5\n0.5\n0.5\n0.5\n0.5\n").unwrap();
    let code = run(&[
        "spectral",
        "--coordinates",
        coords.to_str().unwrap(),
        "--size",
        "3",
        "--out",
        &dir_arg(dir.path()),
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("spectral.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    for (_, w) in &rows {
        assert!((w - 1.0 / 3.0).abs() < 1e-12);
    }
    let m3: f64 = rows.iter().map(|(x, w)| w * x.powi(3)).sum();
    assert!((m3 - 0.3125).abs() < 1e-12);
}
