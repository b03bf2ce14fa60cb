//! Integration tests for the `ncdtree` binary: every subcommand, the file
//! formats it reads and writes, and its exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ncdtree::distance::DistanceMatrix;
use ncdtree::synthgen::{encode_midi, random_song};

const FIXTURE_MID: &[u8] = include_bytes!("data/fixture.mid");
const FIXTURE_PP: &[u8] = include_bytes!("data/fixture.pp");

fn ncdtree(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncdtree"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output, context: &str) {
    assert!(
        out.status.success(),
        "{context} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn preprocess_writes_golden_pp_for_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("fixture.mid"), FIXTURE_MID).unwrap();
    let out = ncdtree(&["preprocess", "fixture.mid", "--out-dir", "pp"], dir.path());
    assert_success(&out, "preprocess");
    let pp = fs::read(dir.path().join("pp/fixture.pp")).unwrap();
    assert_eq!(pp, FIXTURE_PP);
    assert!(dir.path().join("pp/manifest.json").exists());
    // Inputs are never modified.
    assert_eq!(fs::read(dir.path().join("fixture.mid")).unwrap(), FIXTURE_MID);
}

#[test]
fn preprocess_continues_past_bad_inputs_but_fails_when_all_are_bad() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("good.mid"), FIXTURE_MID).unwrap();
    fs::write(dir.path().join("bad.mid"), b"not midi at all").unwrap();
    let out = ncdtree(
        &["preprocess", "good.mid", "bad.mid", "--out-dir", "pp"],
        dir.path(),
    );
    assert_success(&out, "mixed preprocess");
    assert!(dir.path().join("pp/good.pp").exists());
    assert!(!dir.path().join("pp/bad.pp").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("preprocessed 1 of 2"), "{stdout}");

    let out = ncdtree(&["preprocess", "bad.mid", "--out-dir", "pp2"], dir.path());
    assert!(!out.status.success(), "all-bad preprocess must fail");
}

#[test]
fn matrix_is_byte_reproducible_and_requires_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    for (name, fill) in [("a", 7u8), ("b", 8), ("c", 9), ("d", 10)] {
        let data: Vec<u8> = (0..3000u32).map(|i| (i as u8).wrapping_mul(fill)).collect();
        fs::write(corpus.join(name), data).unwrap();
    }
    let out = ncdtree(
        &["matrix", "corpus", "--out", "run1.dist", "--compressor", "gzip:level=6"],
        dir.path(),
    );
    assert_success(&out, "matrix");
    let out = ncdtree(
        &["matrix", "corpus", "--out", "run2.dist", "--compressor", "gzip:level=6"],
        dir.path(),
    );
    assert_success(&out, "matrix rerun");
    let run1 = fs::read(dir.path().join("run1.dist")).unwrap();
    let run2 = fs::read(dir.path().join("run2.dist")).unwrap();
    assert_eq!(run1, run2, "identical inputs must give identical bytes");
    let parsed = DistanceMatrix::from_text(&String::from_utf8(run1).unwrap()).unwrap();
    assert_eq!(parsed.labels(), ["a", "b", "c", "d"]);

    fs::remove_file(corpus.join("d")).unwrap();
    let out = ncdtree(&["matrix", "corpus", "--out", "small.dist"], dir.path());
    assert!(!out.status.success(), "three files must be rejected");
}

#[test]
fn planted_matrix_skips_compression_and_search_reaches_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(
        &["matrix", "--planted", "--n", "12", "--seed", "5", "--out", "planted.dist"],
        dir.path(),
    );
    assert_success(&out, "matrix --planted");
    let out = ncdtree(
        &[
            "search", "planted.dist", "--out-dir", "run", "--seed", "3", "--penalty", "0", "--mst",
        ],
        dir.path(),
    );
    assert_success(&out, "search");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("s = 1.000000"), "{stdout}");
    for file in ["best.nwk", "best.dot", "trace.csv", "manifest.json", "mst.dot"] {
        assert!(dir.path().join("run").join(file).exists(), "{file} missing");
    }
    let trace = fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    assert!(trace.starts_with("eval_count,best_s,seconds\n"));
}

#[test]
fn fixed_seed_single_worker_searches_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(
        &["matrix", "--planted", "--n", "10", "--seed", "8", "--out", "m.dist"],
        dir.path(),
    );
    assert_success(&out, "matrix");
    for run in ["r1", "r2"] {
        let out = ncdtree(
            &[
                "search", "m.dist", "--out-dir", run, "--seed", "11", "--workers", "1",
                "--penalty", "0",
            ],
            dir.path(),
        );
        assert_success(&out, "search");
    }
    let tree1 = fs::read(dir.path().join("r1/best.nwk")).unwrap();
    let tree2 = fs::read(dir.path().join("r2/best.nwk")).unwrap();
    assert_eq!(tree1, tree2);
    let dot1 = fs::read(dir.path().join("r1/best.dot")).unwrap();
    let dot2 = fs::read(dir.path().join("r2/best.dot")).unwrap();
    assert_eq!(dot1, dot2);
    // Traces agree on everything but wall-clock times.
    let strip = |csv: Vec<u8>| -> Vec<String> {
        String::from_utf8(csv)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let t1 = strip(fs::read(dir.path().join("r1/trace.csv")).unwrap());
    let t2 = strip(fs::read(dir.path().join("r2/trace.csv")).unwrap());
    assert_eq!(t1, t2);
}

#[test]
fn label_map_renames_tree_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(
        &["matrix", "--planted", "--n", "10", "--seed", "2", "--out", "m.dist"],
        dir.path(),
    );
    assert_success(&out, "matrix");
    fs::write(dir.path().join("names.map"), "p00=alpha\np01\tbeta\n# comment\n").unwrap();
    let out = ncdtree(
        &[
            "search", "m.dist", "--out-dir", "run", "--seed", "1", "--penalty", "0", "--labels",
            "names.map",
        ],
        dir.path(),
    );
    assert_success(&out, "search with labels");
    let nwk = fs::read_to_string(dir.path().join("run/best.nwk")).unwrap();
    assert!(nwk.contains("alpha") && nwk.contains("beta"), "{nwk}");
    assert!(!nwk.contains("p00") && !nwk.contains("p01"), "{nwk}");
}

#[test]
fn reproduce_planted_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(
        &["reproduce", "planted", "--seed", "4", "--out-dir", "rep"],
        dir.path(),
    );
    assert_success(&out, "reproduce planted");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS planted s = 1"), "{stdout}");
    assert!(stdout.contains("PASS planted tree recovered"), "{stdout}");
    assert!(dir.path().join("rep/planted.dist").exists());
    assert!(dir.path().join("rep/best.nwk").exists());
}

#[test]
fn gen_writes_corpora_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(&["gen", "planted", "--n", "8", "--seed", "3", "--out-dir", "g"], dir.path());
    assert_success(&out, "gen planted");
    assert!(dir.path().join("g/planted.dist").exists());
    assert!(dir.path().join("g/source.nwk").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["kind"], "planted");
    assert_eq!(manifest["n"], 8);

    let out = ncdtree(&["gen", "filetypes", "--seed", "1", "--out-dir", "ft"], dir.path());
    assert_success(&out, "gen filetypes");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ft/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 16);
    assert!(dir.path().join("ft/gene-0.bin").exists());

    let out = ncdtree(&["gen", "nonsense", "--out-dir", "x"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn gen_tags_writes_the_sixteen_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncdtree(&["gen", "tags", "--seed", "0", "--out-dir", "tags"], dir.path());
    assert_success(&out, "gen tags");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tags/manifest.json")).unwrap())
            .unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 16);
    for f in files {
        let name = f["file"].as_str().unwrap();
        let path = dir.path().join("tags").join(name);
        assert_eq!(fs::metadata(&path).unwrap().len(), 81_920, "{name}");
    }
}

#[test]
fn end_to_end_midi_directory_run_succeeds() {
    // The documented full path: a directory of MIDI files is preprocessed,
    // compressed into a matrix, and searched into a tree, all through the
    // binary.
    let dir = tempfile::tempdir().unwrap();
    let midi_dir = dir.path().join("midi");
    fs::create_dir(&midi_dir).unwrap();
    for seed in 0..5u64 {
        let song = random_song(seed);
        fs::write(midi_dir.join(format!("song{seed}.mid")), encode_midi(&song)).unwrap();
    }
    let out = ncdtree(
        &["preprocess", "midi/song0.mid", "midi/song1.mid", "midi/song2.mid",
          "midi/song3.mid", "midi/song4.mid", "--out-dir", "pp"],
        dir.path(),
    );
    assert_success(&out, "preprocess");
    let out = ncdtree(&["matrix", "pp", "--out", "songs.dist"], dir.path());
    assert_success(&out, "matrix over pp dir");
    let dist = fs::read_to_string(dir.path().join("songs.dist")).unwrap();
    assert!(dist.starts_with("5\n"), "manifest.json must not join the corpus");
    let out = ncdtree(
        &["search", "songs.dist", "--out-dir", "run", "--seed", "5", "--max-evals", "20000"],
        dir.path(),
    );
    assert_success(&out, "search");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("s = "), "{stdout}");
    assert!(dir.path().join("run/best.nwk").exists());
}
