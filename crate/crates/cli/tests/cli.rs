use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use injhom::catalog::named_target;
use injhom::catalog::TargetName;
use injhom::digraph::{parse_graph, InjectivityMode};
use injhom::gadgets::AssetStore;
use injhom::reductions::{build_ios_t4, UndirectedGraph};
use injhom::solver::{enumerate, SolveOptions};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("injhom-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], asset_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_injhom"));
    cmd.args(args);
    match asset_dir {
        Some(dir) => cmd.env("INJHOM_ASSET_DIR", dir),
        None => cmd.env_remove("INJHOM_ASSET_DIR"),
    };
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_exit_codes() {
    let dir = scratch("solve");
    let cycle = write(&dir, "c3.g", "n 3\na 0 1\na 1 2\na 2 0\n");
    let star = write(&dir, "star.g", "n 5\na 0 1\na 0 2\na 0 3\na 0 4\n");
    let o = run(
        &[
            "solve", "--input", &cycle, "--target", "C3", "--mode", "iot",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Sat\n"));
    let o = run(
        &["solve", "--input", &star, "--target", "T4", "--mode", "ios"],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "Unsat\n");
    let o = run(&["solve", "--input", &star, "--target", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(&dir, "bad.g", "n 2\na 0 1\na 1 0\n");
    let o = run(&["solve", "--input", &bad, "--target", "T4"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(
        &["solve", "--input", &cycle, "--target", "T4", "--fast-small"],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_output_matches_library_enumeration() {
    let dir = scratch("wrapper");
    let text = "n 4\na 0 1\na 1 2\na 2 3\na 3 0\na 0 2\n";
    let path = write(&dir, "g.g", text);
    let g = parse_graph(text).unwrap();
    let t5 = named_target(TargetName::T5);
    for (flag, mode) in [
        ("in", InjectivityMode::InOnly),
        ("iot", InjectivityMode::IotTogether),
    ] {
        let o = run(
            &[
                "solve",
                "--input",
                &path,
                "--target",
                "T5",
                "--mode",
                flag,
                "--enumerate",
                "all",
            ],
            None,
        );
        let direct = enumerate(&g, &t5, &SolveOptions::new(mode)).unwrap();
        let mut expected = String::from(if direct.witnesses.is_empty() {
            "Unsat\n"
        } else {
            "Sat\n"
        });
        for w in &direct.witnesses {
            expected.push_str(&w.witness_line());
            expected.push('\n');
        }
        assert_eq!(stdout(&o), expected);
        // Repeat runs are byte-identical.
        let again = run(
            &[
                "solve",
                "--input",
                &path,
                "--target",
                "T5",
                "--mode",
                flag,
                "--enumerate",
                "all",
            ],
            None,
        );
        assert_eq!(o.stdout, again.stdout);
    }
}

#[test]
fn hx_square_port_vertex_is_always_d() {
    let hx = AssetStore::bundled_dir().join("Hx.graph");
    let o = run(
        &[
            "solve",
            "--input",
            hx.to_str().unwrap(),
            "--target",
            "T4",
            "--enumerate",
            "all",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.ends_with(" 31=d")));
}

#[test]
fn reduce_writes_instance_and_map() {
    let dir = scratch("reduce");
    let k4 = write(
        &dir,
        "k4.g",
        "n 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n",
    );
    let out = dir.join("k4.inst");
    let o = run(
        &[
            "reduce",
            "--kind",
            "ios-t4",
            "--input",
            &k4,
            "--output",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(4 Hx, 6 He)"));
    let instance = parse_graph(&fs::read_to_string(&out).unwrap()).unwrap();
    let direct = build_ios_t4(
        &UndirectedGraph::complete(4),
        &AssetStore::new(AssetStore::bundled_dir()),
    )
    .unwrap();
    assert_eq!(instance, direct.graph);
    let map = fs::read_to_string(dir.join("k4.inst.map")).unwrap();
    assert_eq!(map, direct.map_text() + "\n");
}

#[test]
fn reduce_then_solve_prints_a_proper_colouring() {
    let dir = scratch("roundtrip");
    let k3 = write(&dir, "k3.g", "n 3\ne 0 1\ne 0 2\ne 1 2\n");
    let out = dir.join("k3.inst");
    for kind in ["ios-t4", "iot-t4"] {
        let o = run(
            &[
                "reduce",
                "--kind",
                kind,
                "--input",
                &k3,
                "--output",
                out.to_str().unwrap(),
                "--solve",
            ],
            None,
        );
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let line = text
            .lines()
            .find(|l| l.starts_with("edge colouring: "))
            .unwrap();
        let colours: Vec<&str> = line
            .split_whitespace()
            .skip(2)
            .map(|p| &p[p.len() - 1..])
            .collect();
        assert_eq!(colours.len(), 3);
        let mut sorted = colours.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["b", "c", "d"]);
    }
}

#[test]
fn reduce_precondition_failures_exit_2() {
    let dir = scratch("precond");
    let g = write(&dir, "g.g", "n 2\na 0 1\n");
    let out = dir.join("x.inst");
    let o = run(
        &[
            "reduce",
            "--kind",
            "collapse-ios",
            "--input",
            &g,
            "--output",
            out.to_str().unwrap(),
            "--target",
            "T4",
            "--pivot",
            "a",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 4"));
    let star = write(&dir, "star.g", "n 5\ne 0 1\ne 0 2\ne 0 3\ne 0 4\n");
    let o = run(
        &[
            "reduce",
            "--kind",
            "iot-t4",
            "--input",
            &star,
            "--output",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_commands() {
    let o = run(&["catalog", "--list", "n=4"], None);
    assert!(stdout(&o).starts_with("4 tournaments"));
    let o = run(&["catalog", "--list", "n=5"], None);
    assert!(stdout(&o).starts_with("12 tournaments"));
    let o = run(&["catalog", "--show", "T5"], None);
    assert!(stdout(&o).contains("vertex-transitive: true"));
    let o = run(&["catalog", "--aut", "TT3"], None);
    assert_eq!(stdout(&o), "1 automorphisms\na->a b->b c->c\n");
    let o = run(&["catalog", "--list", "n=9"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_command() {
    let dir = scratch("oracle");
    let k4 = write(
        &dir,
        "k4.g",
        "n 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n",
    );
    assert_eq!(
        run(&["oracle", "--input", &k4], None).status.code(),
        Some(0)
    );
    let petersen = UndirectedGraph::petersen().to_text();
    let p = write(&dir, "petersen.g", &petersen);
    let o = run(&["oracle", "--input", &p], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "not colourable\n");
}

fn copy_assets(name: &str) -> PathBuf {
    let dir = scratch(name);
    for entry in fs::read_dir(AssetStore::bundled_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
    dir
}

#[test]
fn verify_gadget_pass_fail_and_error() {
    let o = run(
        &["verify-gadget", "--gadget", "Hx", "--check", "hx-forced"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("forced 31 d"));

    let wrong = copy_assets("wrong-contract");
    let contract = fs::read_to_string(wrong.join("Hx.contract")).unwrap();
    fs::write(
        wrong.join("Hx.contract"),
        contract.replace("forced 31 d", "forced 31 c"),
    )
    .unwrap();
    let o = run(&["verify-gadget", "--gadget", "Hx"], Some(&wrong));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    let corrupt = copy_assets("corrupt");
    fs::write(corrupt.join("He.graph"), "n 2\na 0 1\na 1 0\n").unwrap();
    let o = run(&["verify-gadget", "--gadget", "He"], Some(&corrupt));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selfcheck_reports_every_criterion() {
    let o = run(&["selfcheck", "--quick"], None);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 11);

    let broken = copy_assets("broken");
    let contract = fs::read_to_string(broken.join("Fe.contract")).unwrap();
    fs::write(
        broken.join("Fe.contract"),
        contract.replace("forced 7 a", "forced 7 b"),
    )
    .unwrap();
    let o = run(&["selfcheck", "--quick"], Some(&broken));
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    let line = out
        .lines()
        .find(|l| l.contains("gadget-contracts"))
        .unwrap();
    assert!(line.starts_with("FAIL") && line.contains("Fe"), "{line}");
}
