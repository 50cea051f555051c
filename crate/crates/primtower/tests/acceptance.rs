//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! The suite drives both the library API and the compiled binary, so the
//! exit-code and report contracts are exercised exactly as shipped.

use std::process::Command;

use primtower::lie::{b1_from_lie, LieData};
use primtower::linalg::{membership_coords, SparseVec};
use primtower::lyndon::{lyndon_primitive_oracle, primitive_dim, witt};
use primtower::scalar::FieldSpec;
use primtower::tensor::{primitives, words_up_to, Alphabet};
use primtower::tower::{build_l1, check_b2, ideal_span, quotient_primitives};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_primtower")
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn run_json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, stdout) = run(&full);
    let v = serde_json::from_slice(&stdout).expect("report is valid json");
    (code, v)
}

fn check<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("check {name} missing from report"))
}

fn all_pass(report: &serde_json::Value) -> bool {
    report["overall"] == "pass"
        && report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["status"] == "pass")
}

fn load(name: &str) -> LieData {
    primtower::files::load_lie(std::path::Path::new(&fixture(name))).unwrap()
}

const CHAR0_SUITE: [&str; 6] = [
    "sl2.json",
    "solvable2.json",
    "heisenberg.json",
    "abelian1.json",
    "abelian2.json",
    "abelian3.json",
];

const CHARP_SUITE: [(&str, u32); 8] = [
    ("f2_line_trivial.json", 3),
    ("f2_line_fixed.json", 3),
    ("f2_solvable.json", 3),
    ("f2_abelian2.json", 3),
    ("f3_line_trivial.json", 4),
    ("f3_line_fixed.json", 4),
    ("f3_solvable.json", 4),
    ("f3_abelian2.json", 4),
];

#[test]
fn criterion_1_primitive_dimensions() {
    // characteristic 0: kernel = oracle = Witt numbers, k <= 3, n <= 6
    for k in 1..=3usize {
        let alphabet = Alphabet::unweighted(FieldSpec::rationals(), k, 6).unwrap();
        let mut dims = Vec::new();
        for n in 1..=6u32 {
            let kernel = primitives(&alphabet, n).unwrap();
            let oracle = lyndon_primitive_oracle(&alphabet, n).unwrap();
            assert_eq!(kernel, oracle, "kernel vs oracle at k={k}, n={n}");
            assert_eq!(kernel.dim() as u64, witt(k as u64, n as u64));
            dims.push(kernel.dim());
        }
        if k == 2 {
            assert_eq!(dims, vec![2, 1, 2, 3, 6, 9]);
        }
    }
    // characteristic p in {2, 3}: restricted dimensions, k <= 2, n <= 6
    for p in [2u64, 3] {
        let field = FieldSpec::prime(p).unwrap();
        for k in 1..=2usize {
            let alphabet = Alphabet::unweighted(field, k, 6).unwrap();
            for n in 1..=6u32 {
                let kernel = primitives(&alphabet, n).unwrap();
                let oracle = lyndon_primitive_oracle(&alphabet, n).unwrap();
                assert_eq!(kernel, oracle, "kernel vs oracle at p={p}, k={k}, n={n}");
                assert_eq!(
                    kernel.dim() as u64,
                    primitive_dim(k as u64, n as u64, p),
                    "restricted dimension at p={p}, k={k}, n={n}"
                );
            }
        }
    }
    println!("acceptance criterion 1 (primitive dimensions, two oracles, exact): PASS");
}

#[test]
fn criterion_2_tower_end_to_end_char_zero() {
    for name in CHAR0_SUITE {
        let (code, report) = run_json(&["verify-tower", "--lie", &fixture(name), "--degree", "4"]);
        assert_eq!(code, 0, "{name} should verify cleanly");
        assert!(all_pass(&report), "{name}: {report}");
        // the unit isomorphism is certified on degrees <= 3
        assert_eq!(check(&report, "eta1.iso")["window"], "degrees <= 3");
        assert_eq!(check(&report, "lie.recovered")["status"], "pass");
    }
    // sl2 carries the PBW filtration dimensions 1, 4, 10, 20 (and 35 at degree 4)
    let (_, report) = run_json(&[
        "verify-tower",
        "--lie",
        &fixture("sl2.json"),
        "--degree",
        "4",
    ]);
    let dims = check(&report, "l1.build")["data"].as_array().unwrap();
    assert_eq!(
        dims.iter().map(|v| v.as_u64().unwrap()).collect::<Vec<_>>(),
        vec![1, 4, 10, 20, 35]
    );
    assert_eq!(
        check(&report, "enveloping.build")["data"],
        check(&report, "l1.build")["data"]
    );
    println!("acceptance criterion 2 (char-0 tower end-to-end at degree 4, exact): PASS");
}

#[test]
fn criterion_3_tower_end_to_end_char_p() {
    for (name, degree) in CHARP_SUITE {
        let (code, report) = run_json(&[
            "verify-tower",
            "--lie",
            &fixture(name),
            "--degree",
            &degree.to_string(),
        ]);
        assert_eq!(code, 0, "{name} should verify cleanly: {report}");
        assert!(all_pass(&report), "{name}: {report}");
        // restricted enveloping dimension reaches p^dim within these windows
        let lie = load(name);
        let p = lie.field().characteristic();
        let dims = check(&report, "enveloping.build")["data"]
            .as_array()
            .unwrap();
        let total = dims.last().unwrap().as_u64().unwrap();
        assert_eq!(
            total,
            p.pow(lie.dim() as u32),
            "{name}: restricted enveloping dimension"
        );
    }
    println!("acceptance criterion 3 (char-p tower end-to-end at degree p+1, exact): PASS");
}

#[test]
fn criterion_4_idempotency_at_level_one() {
    let mut certified = 0;
    for (name, degree) in CHAR0_SUITE
        .iter()
        .map(|n| (*n, 4u32))
        .chain(CHARP_SUITE.iter().copied())
    {
        let lie = load(name);
        let obj = b1_from_lie(&lie, degree).unwrap();
        let cert = check_b2(&obj, 2).unwrap();
        assert!(cert.certified(), "{name} must certify");
        let mu1 = cert.mu1.as_ref().unwrap();
        let p1 = quotient_primitives(&cert.quotient, 1).unwrap();
        // mu1 . eta1 = id on V0
        for i in 0..obj.dim() {
            let coords = membership_coords(cert.eta1.map.column(i), &p1)
                .unwrap()
                .expect("unit image is primitive");
            let in_p = SparseVec::from_entries(coords.into_iter().enumerate().collect());
            assert_eq!(
                mu1.apply(&in_p),
                SparseVec::unit(i, obj.field()),
                "{name}: mu1 . eta1 != id at basis {i}"
            );
        }
        // eta1 . mu1 = id on the computed primitive space
        for r in 0..p1.dim() {
            let back = cert
                .eta1
                .map
                .apply(&mu1.apply(&SparseVec::unit(r, obj.field())));
            let coords = membership_coords(&back, &p1)
                .unwrap()
                .expect("stays primitive");
            let as_vec = SparseVec::from_entries(coords.into_iter().enumerate().collect());
            assert_eq!(
                as_vec,
                SparseVec::unit(r, obj.field()),
                "{name}: eta1 . mu1 != id at primitive {r}"
            );
        }
        certified += 1;
    }
    assert_eq!(certified, CHAR0_SUITE.len() + CHARP_SUITE.len());
    println!("acceptance criterion 4 (mu1 and eta1 mutually inverse on {certified} certified objects, exact): PASS");
}

#[test]
fn criterion_5_separability_instance() {
    for k in 1..=3u32 {
        for degree in [3u32, 4] {
            let (code, report) = run_json(&[
                "separability",
                "--generators",
                &k.to_string(),
                "--char",
                "0",
                "--degree",
                &degree.to_string(),
                "--trials",
                "20",
                "--seed",
                "0",
            ]);
            assert_eq!(code, 0);
            assert_eq!(check(&report, "separability.retraction")["status"], "pass");
            assert_eq!(check(&report, "separability.naturality")["status"], "pass");
            // the injected non-natural variant must be caught
            assert_eq!(
                check(&report, "separability.negative-control")["status"],
                "pass",
                "k={k} degree={degree}: {report}"
            );
        }
    }
    // a prime-field sweep as well
    let (code, report) = run_json(&[
        "separability",
        "--generators",
        "2",
        "--char",
        "2",
        "--degree",
        "4",
        "--trials",
        "20",
        "--seed",
        "0",
    ]);
    assert_eq!(code, 0);
    assert!(all_pass(&report));
    println!("acceptance criterion 5 (separability retraction and naturality, 20 seeded maps, exact): PASS");
}

#[test]
fn criterion_6_negative_control_sensitivity() {
    for seed in 0..5u64 {
        // one corrupted structure constant breaks the Jacobi step
        let (code, report) = run_json(&[
            "verify-tower",
            "--lie",
            &fixture("sl2.json"),
            "--degree",
            "3",
            "--corrupt-bracket",
            &seed.to_string(),
        ]);
        assert_eq!(code, 1, "seed {seed}: corrupted bracket must fail");
        let axioms = check(&report, "lie.axioms");
        assert_eq!(axioms["status"], "fail");
        assert!(
            axioms["witness"].as_str().map_or(false, |w| !w.is_empty()),
            "seed {seed}: failure carries a witness"
        );
        // everything after the failing step is skipped
        assert_eq!(check(&report, "b1.construct")["status"], "skipped");
        assert_eq!(check(&report, "enveloping.compare")["status"], "skipped");

        // one corrupted structure-map value breaks the level-one axioms
        let (code, report) = run_json(&[
            "verify-tower",
            "--lie",
            &fixture("sl2.json"),
            "--degree",
            "3",
            "--corrupt-mu0",
            &seed.to_string(),
        ]);
        assert_eq!(code, 1, "seed {seed}: corrupted structure map must fail");
        let axioms = check(&report, "b1.axioms");
        assert_eq!(axioms["status"], "fail");
        assert!(axioms["witness"].as_str().map_or(false, |w| !w.is_empty()));
        assert_eq!(check(&report, "l1.build")["status"], "skipped");
    }
    println!(
        "acceptance criterion 6 (seeded corruption trials detected with witnesses, exit 1): PASS"
    );
}

#[test]
fn criterion_7_stabilization_soundness() {
    for (name, degree) in CHAR0_SUITE
        .iter()
        .map(|n| (*n, 4u32))
        .chain(CHARP_SUITE.iter().copied())
    {
        let lie = load(name);
        let obj = b1_from_lie(&lie, degree).unwrap();
        let gens = obj.s_generators();
        let words_per_degree: Vec<usize> = (0..=degree)
            .map(|d| words_up_to(obj.alphabet(), d).len())
            .collect();
        let mut quotient_dims_by_slack = Vec::new();
        for slack in [2u32, 3, 4] {
            let slices = ideal_span(obj.alphabet(), &gens, degree, slack).unwrap();
            let mut cumulative = 0usize;
            let dims: Vec<usize> = (0..=degree as usize)
                .map(|d| {
                    cumulative += slices[d].dim();
                    words_per_degree[d] - cumulative
                })
                .collect();
            quotient_dims_by_slack.push(dims);
        }
        assert_eq!(
            quotient_dims_by_slack[0], quotient_dims_by_slack[1],
            "{name}: slack 2 vs 3"
        );
        assert_eq!(
            quotient_dims_by_slack[1], quotient_dims_by_slack[2],
            "{name}: slack 3 vs 4"
        );
        // and the shipped quotient agrees with the slack sweep
        let quo = build_l1(&obj, 2).unwrap();
        assert_eq!(quo.filtration_dims(), quotient_dims_by_slack[0], "{name}");
    }
    println!("acceptance criterion 7 (quotient dimensions identical at slacks 2, 3, 4): PASS");
}

#[test]
fn criterion_8_determinism() {
    let suites: Vec<Vec<&str>> = vec![
        vec![
            "primitives",
            "--generators",
            "2",
            "--char",
            "0",
            "--degree",
            "5",
        ],
        vec![
            "primitives",
            "--generators",
            "2",
            "--char",
            "2",
            "--degree",
            "6",
        ],
        vec![
            "verify-tower",
            "--lie",
            "FIXTURE_SL2",
            "--degree",
            "4",
            "--slack",
            "2",
        ],
        vec!["verify-tower", "--lie", "FIXTURE_F3", "--degree", "4"],
        vec![
            "verify-tower",
            "--lie",
            "FIXTURE_SL2",
            "--degree",
            "3",
            "--corrupt-mu0",
            "1",
        ],
        vec![
            "separability",
            "--generators",
            "3",
            "--char",
            "0",
            "--degree",
            "4",
            "--trials",
            "20",
            "--seed",
            "7",
        ],
    ];
    let sl2 = fixture("sl2.json");
    let f3 = fixture("f3_solvable.json");
    for suite in suites {
        let args: Vec<&str> = suite
            .iter()
            .map(|a| match *a {
                "FIXTURE_SL2" => sl2.as_str(),
                "FIXTURE_F3" => f3.as_str(),
                other => other,
            })
            .collect();
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(&args);
        let (code1, out1) = run(&full);
        let (code2, out2) = run(&full);
        assert_eq!(code1, code2);
        assert_eq!(out1, out2, "non-deterministic output for {args:?}");
    }
    println!("acceptance criterion 8 (byte-identical reports on repeated runs): PASS");
}
