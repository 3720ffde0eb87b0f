use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use maxones_cli::run;
use maxones_core::relation::parse_relations;
use maxones_core::solver::Instance;

fn dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("maxones-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn file(d: &Path, name: &str, body: &str) -> String {
    let p = d.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("maxones").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn kv(out: &str) -> BTreeMap<String, String> {
    let start = out.find("---BEGIN RESULT---").expect("result block");
    let end = out.find("---END RESULT---").expect("result end");
    out[start..end]
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn body(out: &str) -> &str {
    &out[..out.find("---BEGIN RESULT---").unwrap()]
}

#[test]
fn delta_matroid_report_names_witness() {
    let d = dir("delta");
    let f = file(&d, "eq3.rel", "relation EQ3 arity=3\n000\n111\n\n");
    let (code, out, _) = call(&["analyze", "delta-matroid", &f]);
    assert_eq!(code, 0);
    let m = kv(&out);
    assert_eq!(m["EQ3.delta_matroid"], "false");
    assert_eq!(m["EQ3.witness"], "x=000 y=111 x'=001");
}

#[test]
fn classify_nand2_reports_apx_branch() {
    let d = dir("classify");
    let f = file(&d, "nand2.lang", "language N2\nuse NAND2\nconservative\n");
    let (code, out, _) = call(&["classify", "--language", &f, "--occurrences", "3", "--format", "kv"]);
    assert_eq!(code, 0);
    let m = kv(&out);
    assert!(m["verdict"].contains("otherwise: APX_COMPLETE"), "{out}");
    assert!(m.values().any(|v| v.starts_with("mis-embedding") && v.contains("degree-3")));
    assert_eq!(m["evidence_verified"], "true");
}

#[test]
fn classify_reads_inline_relations() {
    let d = dir("inline");
    let f = file(
        &d,
        "chain.lang",
        "relation R arity=3\n000\n001\n010\n100\n101\n\nlanguage L\nuse R\nconservative\n",
    );
    let (code, out, err) = call(&["classify", "--language", &f, "--occurrences", "2"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(kv(&out)["verdict"], "APX_COMPLETE");
}

#[test]
fn catalog_verify_all() {
    let (code, out, _) = call(&["catalog", "verify", "--format", "kv"]);
    assert_eq!(code, 0);
    assert_eq!(kv(&out)["summary"], "30/30 entries verified");
}

#[test]
fn same_seed_same_bytes() {
    let d = dir("seed");
    let f = file(&d, "n.lang", "language N2\nuse NAND2\nconservative\n");
    let a = call(&["--seed", "7", "classify", "--language", &f, "--occurrences", "3"]);
    let b = call(&["--seed", "7", "classify", "--language", &f, "--occurrences", "3"]);
    assert_eq!(a.1, b.1);
}

#[test]
fn exit_codes() {
    let d = dir("exit");
    let inst = file(&d, "i.inst", "var a weight 2\nvar b weight 3\ncon NAND2 a b\n");
    assert_eq!(call(&["solve", "exact", "--instance", &inst]).0, 0);
    let (code, _, err) = call(&["--budget", "1", "solve", "exact", "--instance", &inst]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(call(&["solve", "exact", "--frobnicate"]).0, 1);
    let bad = file(&d, "bad.inst", "var a weight 2\ncon NAND2 a zz\n");
    let (code, _, err) = call(&["solve", "exact", "--instance", &bad]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.inst") && err.contains("zz"), "{err}");
    let (code, _, err) = call(&["analyze", "affine", &file(&d, "r.rel", "relation R arity=2\n01\n10\n11\n\n")]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn solvers_agree() {
    let d = dir("solve");
    let inst = file(
        &d,
        "q.inst",
        "var a weight 2\nvar b weight 3\nvar c weight 1\ncon NAND2 a b\ncon EQ2 b c\nbound 2\n",
    );
    let e = kv(&call(&["solve", "exact", "--instance", &inst]).1);
    let i = kv(&call(&["solve", "ilp2", "--instance", &inst]).1);
    assert_eq!(e["measure"], "4");
    assert_eq!(e["measure"], i["measure"]);
    assert_eq!(i["max_column_sum"], "2");
}

#[test]
fn emitted_files_reparse() {
    let d = dir("roundtrip");
    let r = file(&d, "r.rel", "relation R arity=3\n000\n011\n101\n\n");
    let (_, out, _) = call(&["relation", "show", &r]);
    let rels = parse_relations(body(&out)).unwrap();
    assert_eq!(rels, parse_relations(&std::fs::read_to_string(&r).unwrap()).unwrap());

    let g = file(&d, "g.graph", "node a weight 1\nnode b weight 2\nnode c weight 3\nedge a b\nedge b c\n");
    let (code, out, err) = call(&["reduce", "mis", "--graph", &g, "--occurrences", "3"]);
    assert_eq!(code, 0, "{err}");
    let inst = Instance::parse(body(&out), &BTreeMap::new()).unwrap();
    assert_eq!(inst.to_string().trim_end(), body(&out).trim_end());
}

#[test]
fn cycle_reduction_from_files() {
    let d = dir("cycle");
    let inst = file(
        &d,
        "i.inst",
        "var a weight 1\nvar b weight 1\ncon NAND2 a b\ncon OR2 a b\ncon NAND2 a b\ncon OR2 a b\n",
    );
    let g = file(&d, "link.gadget", "gadget target=IMPL k=2 primaries=2 aux=1\nNAND2 x1 y1\nOR2 y1 x2\n");
    let (code, out, err) = call(&["reduce", "cycle", "--instance", &inst, "--gadget", &g, "--link", "impl"]);
    assert_eq!(code, 0, "{err}");
    assert!(kv(&out)["max_occurrence"].parse::<usize>().unwrap() <= 3);
}
