//! End-to-end tests of the command-line binary: every subcommand, every
//! exit code, and the exact user-facing message formats.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with<F: FnOnce(&mut Command)>(args: &[&str], prepare: F) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_polyfam"));
    cmd.args(args).env_remove("POLYFAM_THREADS");
    prepare(&mut cmd);
    let out = cmd.output().expect("binary should run");
    Run {
        code: out.status.code().expect("binary should exit normally"),
        stdout: String::from_utf8(out.stdout).expect("stdout should be UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr should be UTF-8"),
    }
}

fn run(args: &[&str]) -> Run {
    run_with(args, |_| {})
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths should be UTF-8")
}

/// Generates a reference document into `dir` and returns its path.
fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut full: Vec<&str> = vec!["generate"];
    full.extend_from_slice(args);
    full.push("--out");
    full.push(path_str(&out));
    let r = run(&full);
    assert_eq!(r.code, 0, "generate failed: {}", r.stderr);
    out
}

#[test]
fn generate_then_verify_a_clean_triangle_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.txt");
    let r = run(&[
        "generate",
        "christmas-tree",
        "--m",
        "3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(
        r.stdout,
        format!("wrote 9 polygons over 7 points to {}\n", out.display())
    );

    let r = run(&["verify", path_str(&out), "--relation", "vertex-or-edge"]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "checked 36 pairs of 9 polygons under vertex-or-edge: 0 violation(s)\n"
    );
    assert!(r.stderr.is_empty());
}

#[test]
fn verify_reports_the_bad_stack_pair_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let r = run(&["verify", path_str(&doc), "--relation", "no-bad"]);
    assert_eq!(r.code, 1);
    let mut lines = r.stdout.lines();
    assert_eq!(
        lines.next(),
        Some("checked 3 pairs of 3 polygons under no-bad: 1 violation(s)")
    );
    let detail = lines.next().expect("violation detail line");
    assert!(
        detail.starts_with("  polygons (0, 1): "),
        "unexpected detail: {detail}"
    );
    assert!(detail.contains("interior_contact=true"));
    assert_eq!(lines.next(), None);

    // The same single pair violates the stricter relations too.
    for relation in ["almost-disjoint", "vertex-or-edge"] {
        let r = run(&["verify", path_str(&doc), "--relation", relation]);
        assert_eq!(r.code, 1, "relation {relation}");
        assert!(
            r.stdout.contains(": 1 violation(s)\n"),
            "relation {relation}: {}",
            r.stdout
        );
    }
}

#[test]
fn classify_prints_a_verdict_for_each_relation() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let r = run(&["classify", path_str(&doc), "0", "1"]);
    assert_eq!(r.code, 0, "no --relation means report-only");
    let mut lines = r.stdout.lines();
    let head = lines.next().expect("classification line");
    assert!(head.starts_with("polygons (0, 1): shared_vertices="));
    assert_eq!(lines.next(), Some("  almost-disjoint: violated"));
    assert_eq!(lines.next(), Some("  vertex-or-edge: violated"));
    assert_eq!(lines.next(), Some("  no-bad: violated"));
    assert_eq!(lines.next(), None);

    // Asking about a violated relation turns the report into a finding.
    let r = run(&["classify", path_str(&doc), "0", "1", "--relation", "no-bad"]);
    assert_eq!(r.code, 1);

    // A touching-at-a-shared-vertex pair satisfies every relation.
    let r = run(&["classify", path_str(&doc), "0", "2", "--relation", "no-bad"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("  no-bad: satisfied\n"));
    assert!(r.stdout.contains("  almost-disjoint: satisfied\n"));
}

#[test]
fn classify_rejects_bad_indices() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let r = run(&["classify", path_str(&doc), "0", "0"]);
    assert_eq!(r.code, 2);
    assert_eq!(
        r.stderr,
        "error: need two distinct polygon indices below 3, got 0 and 0\n"
    );

    let r = run(&["classify", path_str(&doc), "0", "9"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("got 0 and 9"));
}

#[test]
fn pipeline_finds_the_planted_witness() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let r = run(&["pipeline", path_str(&doc)]);
    assert_eq!(r.code, 1, "a verified witness is a finding");
    assert!(r.stdout.contains("stage projection:"), "{}", r.stdout);
    assert!(r.stdout.contains("stage fatness-filter:"));
    assert!(r.stdout.contains("stage bucketing:"));
    assert!(r.stdout.contains("outcome: witness (0, 1)\n"));
    assert!(r.stdout.contains("witness classification: "));
    assert!(r.stderr.is_empty());
}

#[test]
fn pipeline_reports_a_certified_negative_on_scattered_hexagons() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(
        dir.path(),
        "scattered.txt",
        &["scattered-hexagons", "--count", "6"],
    );

    let r = run(&["pipeline", path_str(&doc)]);
    assert_eq!(r.code, 0, "a completed negative search is a success");
    assert!(
        r.stdout
            .contains("outcome: no-rainbow (the diagonal graph has no rainbow triangle)\n"),
        "{}",
        r.stdout
    );
}

#[test]
fn pipeline_without_enough_survivors_exits_without_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(
        dir.path(),
        "scattered.txt",
        &["scattered-hexagons", "--count", "2"],
    );

    let r = run(&["pipeline", path_str(&doc)]);
    assert_eq!(r.code, 3);
    assert!(
        r.stdout.contains(
            "outcome: failed at fatness-filter \
             (only 2 hexagon(s) survive fatness filtering; a rainbow needs 3)\n"
        ),
        "{}",
        r.stdout
    );
}

#[test]
fn pipeline_phi_flag_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    // Non-positive bucket width: rejected before any geometry runs.
    let r = run(&["pipeline", path_str(&doc), "--phi", "-1/7"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: "), "{}", r.stderr);

    // Positive but uncertifiably large: the run fails at validation.
    let r = run(&["pipeline", path_str(&doc), "--phi", "157/100"]);
    assert_eq!(r.code, 3);
    assert!(
        r.stdout.contains("outcome: failed at phi-validation"),
        "{}",
        r.stdout
    );

    // A small explicit width is honored and still finds the witness.
    let r = run(&["pipeline", path_str(&doc), "--phi", "1/7"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("outcome: witness (0, 1)\n"));
}

#[test]
fn search_reports_the_exact_maximum_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree2.txt", &["christmas-tree", "--m", "2"]);
    let saved = dir.path().join("max.txt");

    let r = run(&[
        "search",
        path_str(&doc),
        "--k",
        "3",
        "--relation",
        "vertex-or-edge",
        "--out",
        path_str(&saved),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(
        r.stdout
            .starts_with("relation vertex-or-edge, k = 3: 9 candidate polygons"),
        "{}",
        r.stdout
    );
    assert!(r.stdout.contains("maximum family size: 7\n"));
    assert_eq!(r.stdout.matches("  polygon [").count(), 7);
    assert!(r.stdout.contains("bound n(n-3): 7 <= 10 (slack 3)\n"));
    assert!(r.stdout.contains("bound n^2 (strict): 7 <= 25 (slack 18)\n"));
    assert!(r
        .stdout
        .contains(&format!("wrote maximum family to {}\n", saved.display())));

    // The saved maximum family itself verifies cleanly.
    let r = run(&["verify", path_str(&saved), "--relation", "vertex-or-edge"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("checked 21 pairs of 7 polygons"));
}

#[test]
fn search_with_a_tiny_budget_yields_no_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree2.txt", &["christmas-tree", "--m", "2"]);

    let r = run(&[
        "search",
        path_str(&doc),
        "--k",
        "3",
        "--relation",
        "vertex-or-edge",
        "--node-budget",
        "1",
    ]);
    assert_eq!(r.code, 3);
    assert!(
        r.stdout
            .contains("search budget exhausted; best family found so far has size "),
        "{}",
        r.stdout
    );
    assert_eq!(
        r.stderr,
        "error: the search did not complete within its budget; the maximum is unconfirmed\n"
    );
}

#[test]
fn search_rejects_oversized_point_sets_and_tiny_k() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree5.txt", &["christmas-tree", "--m", "5"]);

    // 11 points exceeds the default cap of 10.
    let r = run(&["search", path_str(&doc), "--k", "3", "--relation", "no-bad"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: "), "{}", r.stderr);

    let doc2 = generate(dir.path(), "tree2.txt", &["christmas-tree", "--m", "2"]);
    let r = run(&["search", path_str(&doc2), "--k", "2", "--relation", "no-bad"]);
    assert_eq!(r.code, 2);
}

#[test]
fn export_svg_and_obj_write_figures() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let svg = dir.path().join("stack.svg");
    let r = run(&[
        "export",
        path_str(&doc),
        "--format",
        "svg",
        "--out",
        path_str(&svg),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(
        r.stdout,
        format!("wrote 3 polygons over 15 points to {}\n", svg.display())
    );
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg "));
    assert!(svg_text.contains("orthogonal projection along ("));
    assert_eq!(svg_text.matches("<polygon").count(), 3);

    let obj = dir.path().join("stack.obj");
    let r = run(&[
        "export",
        path_str(&doc),
        "--format",
        "obj",
        "--out",
        path_str(&obj),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let obj_text = std::fs::read_to_string(&obj).unwrap();
    assert!(obj_text.starts_with("# polygon family: 15 points, 3 polygons\n"));
    assert_eq!(obj_text.matches("\nv ").count() + 1, 16); // 15 vertices, one leads
    assert_eq!(obj_text.matches("\nf ").count(), 3);
}

#[test]
fn export_rejects_degenerate_and_malformed_directions() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree.txt", &["christmas-tree", "--m", "2"]);
    let out = dir.path().join("out.svg");

    let r = run(&[
        "export",
        path_str(&doc),
        "--format",
        "svg",
        "--direction",
        "0,0,0",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: "), "{}", r.stderr);
    assert!(!out.exists(), "no file should be written on failure");

    let r = run(&[
        "export",
        path_str(&doc),
        "--format",
        "svg",
        "--direction",
        "1,2",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(
        r.stderr,
        "error: --direction must be three comma-separated rationals, got \"1,2\"\n"
    );
}

#[test]
fn stats_summarizes_sizes_metadata_and_contacts() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "stack.txt", &["hexagon-stack", "--count", "3"]);

    let r = run(&["stats", path_str(&doc)]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(r
        .stdout
        .starts_with(&format!("{}: 15 points, 3 polygons\n", doc.display())));
    assert!(r.stdout.contains("  3 polygon(s) with 6 vertices\n"));
    assert!(r.stdout.contains("  meta construction "));
    assert!(r.stdout.contains("  meta c-sq 4\n"));
    assert!(r.stdout.contains("  3 polygon pair(s) by hull intersection:\n"));
    assert!(r.stdout.contains("    single point: 2\n"));
    assert!(r.stdout.contains("    segment: 1\n"));
    assert!(r.stdout.contains("  almost-disjoint: 1 violating pair(s)\n"));
    assert!(r.stdout.contains("  vertex-or-edge: 1 violating pair(s)\n"));
    assert!(r.stdout.contains("  no-bad: 1 violating pair(s)\n"));
}

#[test]
fn unreadable_or_malformed_documents_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();

    let missing = dir.path().join("no-such-file.txt");
    let r = run(&["verify", path_str(&missing), "--relation", "no-bad"]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr
            .starts_with(&format!("error: {}: ", missing.display())),
        "{}",
        r.stderr
    );

    let mangled = dir.path().join("mangled.txt");
    std::fs::write(&mangled, "polygon family v2\npoints 0\npolygons 0\n").unwrap();
    let r = run(&["stats", path_str(&mangled)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: "), "{}", r.stderr);
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree.txt", &["christmas-tree", "--m", "2"]);

    let r = run(&["verify", path_str(&doc), "--relation", "sideways"]);
    assert_eq!(r.code, 2);
    assert_eq!(
        r.stderr,
        "error: unknown relation \"sideways\"; \
         expected almost-disjoint, vertex-or-edge, or no-bad\n"
    );

    let out = dir.path().join("x.txt");
    let r = run(&[
        "generate",
        "hexagon-stack",
        "--count",
        "3",
        "--c",
        "abc",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error: --c \"abc\""), "{}", r.stderr);
}

#[test]
fn infeasible_generator_parameters_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    let out_s = path_str(&out);

    let r = run(&["generate", "christmas-tree", "--m", "0", "--out", out_s]);
    assert_eq!(r.code, 2);

    let r = run(&["generate", "hexagon-stack", "--count", "2", "--out", out_s]);
    assert_eq!(r.code, 2);

    // Side-ratio bound below 1 can never describe a polygon.
    let r = run(&[
        "generate",
        "hexagon-stack",
        "--count",
        "3",
        "--c",
        "1/2",
        "--out",
        out_s,
    ]);
    assert_eq!(r.code, 2);
    assert!(!out.exists());
}

#[test]
fn alpha_in_degrees_suggests_an_exact_rational_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");

    let r = run(&[
        "generate",
        "hexagon-stack",
        "--count",
        "3",
        "--alpha-deg",
        "60",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr
            .starts_with("error: cos(60 deg) is irrational; it is certified to lie in\n  ["),
        "{}",
        r.stderr
    );
    assert!(
        r.stderr.contains("rerun with --cos-alpha 1/2"),
        "the simplest rational in a tight enclosure of cos(60 deg) is 1/2: {}",
        r.stderr
    );

    let r = run(&[
        "generate",
        "hexagon-stack",
        "--count",
        "3",
        "--alpha-deg",
        "95",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(r
        .stderr
        .starts_with("error: --alpha-deg must be strictly between 0 and 90, got 95"));
}

#[test]
fn thread_count_flag_and_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let doc = generate(dir.path(), "tree.txt", &["christmas-tree", "--m", "2"]);
    let doc_s = path_str(&doc);

    let r = run(&["verify", doc_s, "--relation", "no-bad", "--threads", "2"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);

    let r = run(&["verify", doc_s, "--relation", "no-bad", "--threads", "0"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.stderr, "error: thread count must be at least 1\n");

    let r = run_with(&["verify", doc_s, "--relation", "no-bad"], |cmd| {
        cmd.env("POLYFAM_THREADS", "2");
    });
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);

    let r = run_with(&["verify", doc_s, "--relation", "no-bad"], |cmd| {
        cmd.env("POLYFAM_THREADS", "many");
    });
    assert_eq!(r.code, 2);
    assert_eq!(
        r.stderr,
        "error: POLYFAM_THREADS must be a positive integer, got \"many\"\n"
    );

    // The explicit flag wins over a bad environment value.
    let r = run_with(
        &["verify", doc_s, "--relation", "no-bad", "--threads", "1"],
        |cmd| {
            cmd.env("POLYFAM_THREADS", "many");
        },
    );
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
}
