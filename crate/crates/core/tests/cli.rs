use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use ultracoarse::generate::{self, random_int_ultrametric};
use ultracoarse::io::{parse_json, SpaceDoc};
use ultracoarse::lego::lego_decompose;
use ultracoarse::union::coarse_union;
use ultracoarse::FiniteMetricSpace;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("ultra-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn ultra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultra")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn ultrametric(seed: u64, n: usize) -> FiniteMetricSpace {
    random_int_ultrametric(&mut ChaCha8Rng::seed_from_u64(seed), n, 4)
}

#[test]
fn validate_good_space() {
    let dir = Scratch::new("good");
    let path = dir.file("good.space", r#"{"points": ["a", "b", "c"], "dist": [[0, 1, 2], [1, 0, "3/2"], [2, "3/2", 0]]}"#);
    let out = ultra(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn validate_reports_violations() {
    let dir = Scratch::new("bad");
    let path = dir.file("bad.json", r#"{"points": ["a", "b", "c"], "dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}"#);
    let out = ultra(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!json(&out)["violations"].as_array().unwrap().is_empty());
    let out = ultra(&["chain", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a metric"));
}

#[test]
fn floats_are_rejected() {
    let dir = Scratch::new("float");
    let path = dir.file("f.json", r#"{"points": ["a", "b"], "dist": [[0, 0.5], [0.5, 0]]}"#);
    assert_eq!(ultra(&["validate", &path]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ultra(&[]).status.code(), Some(2));
    assert_eq!(ultra(&["fu", "build", "three", "1"]).status.code(), Some(2));
    assert_eq!(ultra(&["validate", "x", "--kind", "banana"]).status.code(), Some(2));
    let help = ultra(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("enumerate"));
}

#[test]
fn newick_matches_the_library() {
    let dir = Scratch::new("newick");
    let s = ultrametric(3, 9);
    let path = dir.file("u.csv", &ultracoarse::io::to_csv(&s));
    let out = ultra(&["decompose", &path, "--newick"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim_end(), lego_decompose(&s).unwrap().newick());
    let dot = stdout(&ultra(&["decompose", &path, "--dot"]));
    assert!(dot.starts_with("graph lego {"));
}

#[test]
fn fu_build_sizes() {
    let out = ultra(&["fu", "build", "3", "0,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_json(&stdout(&out)).unwrap();
    assert_eq!(doc.points.len(), 6);
    assert_eq!(doc.labels.as_ref().unwrap().len(), 6);
    let implied = parse_json(&stdout(&ultra(&["fu", "build", "3", "1,2"]))).unwrap();
    assert_eq!(implied, doc);
    let literal = parse_json(&stdout(&ultra(&["fu", "build", "3", "1,2", "--literal"]))).unwrap();
    assert_eq!(literal.points.len(), 4);
}

#[test]
fn fu_embed_is_isometric() {
    let dir = Scratch::new("fuembed");
    let s = ultrametric(4, 5);
    let path = dir.file("u.json", &SpaceDoc::from_space(&s).to_json());
    let out = ultra(&["fu", "embed", &path, "5", "1,2,3,4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let target = parse_json(&stdout(&ultra(&["fu", "build", "5", "1,2,3,4"]))).unwrap().space().unwrap();
    let map: Vec<String> = v["map"].as_array().unwrap().iter().map(|e| e["target"].as_str().unwrap().to_string()).collect();
    for x in 0..s.len() {
        for y in 0..s.len() {
            let (a, b) = (target.index_of(&map[x]).unwrap(), target.index_of(&map[y]).unwrap());
            assert_eq!(s.d(x, y), target.d(a, b));
        }
    }
    let small = ultra(&["fu", "embed", &path, "2", "1,2,3,4"]);
    assert_eq!(small.status.code(), Some(1));
}

#[test]
fn union_commands() {
    let dir = Scratch::new("union");
    let parts: Vec<FiniteMetricSpace> =
        (0..3).map(|s| ultrametric(10 + s, 3).relabel(generate::ids(3, &format!("q{s}_"))).unwrap()).collect();
    let u = coarse_union(parts, None).unwrap();
    let doc = SpaceDoc::from_union(&u);
    let path = dir.file("union.json", &doc.to_json());
    let built = ultra(&["union", "build", &path]);
    assert_eq!(built.status.code(), Some(0));
    assert_eq!(parse_json(&stdout(&built)).unwrap(), doc);
    let verified = ultra(&["union", "verify", &path]);
    assert_eq!(verified.status.code(), Some(0));
    assert_eq!(json(&verified)["verified"], true);
    let pu = ultra(&["pu", "embed", &path]);
    assert_eq!(pu.status.code(), Some(0));
    let blocks: Vec<u64> = json(&pu)["blocks"].as_array().unwrap().iter().map(|b| b.as_u64().unwrap()).collect();
    assert!(blocks.windows(2).all(|w| w[0] < w[1]));

    let mut tampered = doc.clone();
    tampered.dist[0][doc.points.len() - 1] = "1".parse().unwrap();
    tampered.dist[doc.points.len() - 1][0] = "1".parse().unwrap();
    let path = dir.file("tampered.json", &tampered.to_json());
    assert_eq!(ultra(&["union", "verify", &path]).status.code(), Some(1));
}

#[test]
fn radial_and_group_embedding() {
    let dir = Scratch::new("radial");
    let s = ultrametric(21, 12);
    let path = dir.file("u.json", &SpaceDoc::from_space(&s).to_json());
    let radial = ultra(&["union", "radial", &path, s.id(0)]);
    assert_eq!(radial.status.code(), Some(0));
    let union = parse_json(&stdout(&radial)).unwrap();
    assert!(union.space().unwrap().same_metric(&s));
    for args in [vec!["group-embed", path.as_str()], vec!["group-embed", path.as_str(), "--blocks", s.id(0)]] {
        let out = ultra(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["images"].as_array().unwrap().len(), s.len());
    }
}

#[test]
fn splice_and_invariance() {
    let dir = Scratch::new("splice");
    let text = r#"{
      "base": {"points": ["s", "t"], "dist": [[0, 4], [4, 0]]},
      "fibers": [
        {"points": ["a", "b"], "dist": [[0, 1], [1, 0]]},
        {"points": ["c", "d"], "dist": [[0, 6], [6, 0]]}
      ],
      "section": ["a", "c"]
    }"#;
    let path = dir.file("splice.json", text);
    let out = ultra(&["splice", &path]);
    assert_eq!(out.status.code(), Some(0));
    let total = parse_json(&stdout(&out)).unwrap().space().unwrap();
    assert_eq!(total.d(total.require("a").unwrap(), total.require("d").unwrap()), &"6".parse().unwrap());
    let inv = json(&ultra(&["splice", &path, "--invariance"]));
    assert_eq!(inv["condition_holds"], false);
    assert_eq!(inv["sections_agree"], false);
}

#[test]
fn remaining_commands_run() {
    let dir = Scratch::new("misc");
    let metric = dir.file("m.json", r#"{"points": ["a", "b", "c", "d"], "dist": [[0, "1/2", 3, "7/2"], ["1/2", 0, 3, 3], [3, 3, 0, "5/2"], ["7/2", 3, "5/2", 0]]}"#);
    let chain = parse_json(&stdout(&ultra(&["chain", &metric]))).unwrap().space().unwrap();
    assert!(chain.is_integral());
    let net = parse_json(&stdout(&ultra(&["chain", &metric, "--discretize"]))).unwrap();
    assert_eq!(net.points, ["a", "c", "d"]);
    let cu = json(&ultra(&["cu-embed", &metric]));
    assert_eq!(cu["points"].as_array().unwrap().len(), 4);
    let pu = parse_json(&stdout(&ultra(&["pu", "build", "4"]))).unwrap();
    assert_eq!(pu.parts.unwrap().len(), 4);
    let catalog = json(&ultra(&["enumerate", "3", "1,2"]));
    assert_eq!(catalog["count"], 6);
    let top = parse_json(&stdout(&ultra(&["decompose", &dir.file("u.json", &SpaceDoc::from_space(&ultrametric(5, 6)).to_json()), "--top"]))).unwrap();
    assert!(top.base.is_some() && top.projection.is_some());
}

#[test]
fn reading_missing_file_fails() {
    let out = ultra(&["validate", Path::new("/nonexistent/space.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
