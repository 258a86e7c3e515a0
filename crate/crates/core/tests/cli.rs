use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use geoproof::cli::run;
use tempfile::TempDir;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn geoproof(args: &[&str]) -> i32 {
    run(std::iter::once("geoproof").chain(args.iter().copied()))
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn prove_exit_codes() {
    let t = TempDir::new().unwrap();
    let out = t.path().join("o").display().to_string();
    assert_eq!(geoproof(&["prove", &fixture("example1.p"), "--out", &out]), 0);
    assert!(Path::new(&out).join("goal.proof.txt").exists());
    assert!(Path::new(&out).join("goal.proof.json").exists());
    let broken = write(&t, "broken.p", "fof(a,axiom,(p(X) & ).\n");
    assert_eq!(geoproof(&["prove", &broken, "--out", &out]), 1);
    let open = write(
        &t,
        "open.p",
        "fof(a,axiom,(! [X] : (p(X) => q(X)))).\nfof(c,conjecture,(! [X] : (q(X) => p(X)))).\n",
    );
    assert_eq!(geoproof(&["prove", &open, "--out", &out]), 2);
    assert_eq!(geoproof(&["prove", &fixture("missing.p"), "--out", &out]), 1);
}

#[test]
fn contradictory_premises_cannot_be_illustrated() {
    let t = TempDir::new().unwrap();
    let src = "fof(clash,axiom,(! [A,B] : ((p(A,B) & q(A,B)) => $false))).\n\
               fof(c,conjecture,(! [A,B] : ((p(A,B) & q(A,B)) => r(A,B)))).\n";
    let input = write(&t, "c.p", src);
    let out = t.path().join("o").display().to_string();
    assert_eq!(geoproof(&["illustrate", &input, "--out", &out]), 3);
}

#[test]
fn render_reports_unknown_commands() {
    let t = TempDir::new().unwrap();
    let bad = write(&t, "bad.gcl", "point a 0 0\nfoo x\n");
    let out = t.path().join("o").display().to_string();
    assert_eq!(geoproof(&["render", &bad, "--out", &out]), 1);
    assert_eq!(geoproof(&["render", &fixture("proposition_11_exists.gcl"), "--out", &out]), 0);
    let svg = fs::read_to_string(Path::new(&out).join("proposition_11_exists.svg")).unwrap();
    assert_eq!(svg.matches("<text").count(), 3);
}

#[test]
fn varignon_stages_compose() {
    let t = TempDir::new().unwrap();
    let (one, two) = (t.path().join("one"), t.path().join("two"));
    let exists = fixture("th_varignon_exists.gcl");
    let input = fixture("varignon.p");
    let common = ["--exists", exists.as_str(), "--animate"];
    let mut a = vec!["illustrate", input.as_str(), "--out", one.to_str().unwrap()];
    a.extend(common);
    assert_eq!(geoproof(&a), 0);
    assert_eq!(geoproof(&["prove", &input, "--out", two.to_str().unwrap()]), 0);
    let proof = two.join("th_varignon.proof.json").display().to_string();
    let mut b = vec!["illustrate", input.as_str(), "--out", two.to_str().unwrap(), "--proof", proof.as_str()];
    b.extend(common);
    assert_eq!(geoproof(&b), 0);
    let (ta, tb) = (tree(&one), tree(&two));
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    assert!(ta == tb);
    let last = String::from_utf8(ta["frames/frame_7.svg"].clone()).unwrap();
    assert!(!last.contains("red"));
}

#[test]
fn seed_changes_only_random_placements() {
    let t = TempDir::new().unwrap();
    let input = fixture("euclid_i11.p");
    let pdir = t.path().join("p");
    assert_eq!(geoproof(&["prove", &input, "--out", pdir.to_str().unwrap()]), 0);
    let proof = pdir.join("proposition_11.proof.json").display().to_string();
    let runs: Vec<_> = ["0", "0", "1"]
        .iter()
        .enumerate()
        .map(|(i, seed)| {
            let d = t.path().join(format!("r{i}"));
            let args = ["illustrate", &input, "--proof", &proof, "--seed", seed, "--animate", "--out", d.to_str().unwrap()];
            assert_eq!(geoproof(&args), 0);
            tree(&d)
        })
        .collect();
    assert!(runs[0] == runs[1]);
    let changed: Vec<&String> = runs[0].keys().filter(|k| runs[0][*k] != runs[2][*k]).collect();
    assert!(changed.iter().any(|k| k.as_str() == "proposition_11_exists.gcl"));
    for k in changed {
        assert!(k == "proposition_11_exists.gcl" || k.starts_with("frames/"), "{k}");
    }
}
