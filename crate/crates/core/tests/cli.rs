use std::path::Path;
use std::process::{Command, Output};

use ordolex::conllu::to_conllu;
use ordolex::synth::{generate_corpus, SynthOptions};

fn ordolex(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ordolex"));
    cmd.args(args).env_remove("ORDOLEX_SEED");
    if let Some(s) = env_seed {
        cmd.env("ORDOLEX_SEED", s);
    }
    cmd.output().unwrap()
}

fn write_corpus(dir: &Path, n: usize) -> String {
    let path = dir.join("corpus.conllu");
    let opts = SynthOptions {
        punct_rate: 0.3,
        ..SynthOptions::default()
    };
    std::fs::write(&path, to_conllu(&generate_corpus(n, 1, &opts))).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn full_run_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 80);
    let out = dir.path().join("out");
    let out_s = out.display().to_string();
    let common = [
        "--input",
        input.as_str(),
        "--out",
        out_s.as_str(),
        "--cap",
        "20",
        "--folds",
        "5",
    ];

    let v = ordolex(&[&["variants"][..], &common].concat(), None);
    assert!(v.status.success(), "{}", stderr(&v));
    let table = String::from_utf8_lossy(&v.stdout);
    assert!(table.contains("Reference\t80"), "{table}");
    assert!(stderr(&v).contains("fewer than the recommended"));

    for cmd in ["stats", "classify", "report"] {
        let o = ordolex(&[&[cmd][..], &common].concat(), None);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    for f in [
        "variants.tsv",
        "layouts.tsv",
        "skiplog.tsv",
        "manifest.tsv",
        "positional_lengths.csv",
        "strategy_dl.csv",
        "deprel_profile.csv",
        "coefficients.csv",
        "accuracy.csv",
        "mcnemar.csv",
        "diagnostics.csv",
        "report.txt",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let strategies = std::fs::read_to_string(out.join("strategy_dl.csv")).unwrap();
    assert!(strategies.starts_with("n,strategy,mean_normalized_dl,count\n"));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("== coefficients.csv\nmodel,feature,coef,se,z,p\n"));
}

#[test]
fn seed_changes_sampled_variants_only_through_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 30);
    let run = |name: &str, extra: &[&str], env: Option<&str>| {
        let out = dir.path().join(name).display().to_string();
        let o = ordolex(
            &[
                &["variants", "--input", &input, "--out", &out, "--cap", "3"][..],
                extra,
            ]
            .concat(),
            env,
        );
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(dir.path().join(name).join("variants.tsv")).unwrap()
    };
    let env7 = run("a", &[], Some("7"));
    let flag7 = run("b", &["--seed", "7"], Some("8"));
    let env8 = run("c", &[], Some("8"));
    assert_eq!(env7, flag7);
    assert_ne!(env7, env8);
}

#[test]
fn config_file_is_read_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 20);
    let out = dir.path().join("cfg-out");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("input = {input}\nout = {}\ncap = 2\n", out.display()),
    )
    .unwrap();
    let o = ordolex(&["variants", "--config", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("variants.tsv").is_file());

    std::fs::write(&cfg, "cap = 0\n").unwrap();
    let o = ordolex(
        &[
            "variants",
            "--config",
            cfg.to_str().unwrap(),
            "--input",
            &input,
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&cfg, "flavour = mild\n").unwrap();
    let o = ordolex(&["variants", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(
        ordolex(&["variants", "--cap", "lots"], None).status.code(),
        Some(1)
    );
    assert_eq!(ordolex(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(ordolex(&["variants"], None).status.code(), Some(1));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conllu");
    std::fs::write(
        &bad,
        "1\ta\ta\tNOUN\t_\t_\t2\tnsubj\t_\t_\n2\tb\tb\tVERB\t_\t_\tx\troot\t_\t_\n",
    )
    .unwrap();
    let out = dir.path().join("o").display().to_string();
    let o = ordolex(
        &["variants", "--input", bad.to_str().unwrap(), "--out", &out],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));

    let nothing = dir.path().join("nothing.conllu");
    std::fs::write(&nothing, "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n").unwrap();
    let o = ordolex(
        &[
            "variants",
            "--input",
            nothing.to_str().unwrap(),
            "--out",
            &out,
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-qualifying-sentences"));

    let tsv = dir.path().join("variants.tsv");
    std::fs::write(
        &tsv,
        "sent_id\torder\tis_reference\tn_constituents\tn_words\tcl_last\ttotal_dl\troot_arc_dl\na\t0-1\tmaybe\t2\t3\t1\t1\t1\n",
    )
    .unwrap();
    let o = ordolex(
        &[
            "classify",
            "--variants",
            tsv.to_str().unwrap(),
            "--out",
            &out,
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
}
