//! One test per acceptance criterion. Each prints a single PASS/FAIL line with its
//! wall time; a criterion passes only if every identity holds exactly and the time
//! budget is met.

#[path = "../../core/tests/common/mod.rs"]
mod common;
#[path = "../../core/tests/triple_examples/mod.rs"]
mod triple_examples;

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use tulczyjew_cli::report::parse_machine;
use tulczyjew_core::algebroid::{Algebroid, Side, TotalSpace};
use tulczyjew_core::bracket_engine::{
    axiom_residuals, jacobiator, master_residual, shuffle_jacobiator_canonical, Projector,
};
use tulczyjew_core::cartan_calculus::*;
use tulczyjew_core::fixtures::{self, tangent};
use tulczyjew_core::graded_algebra::Parity::{self, Even, Odd};
use tulczyjew_core::graded_algebra::Poly;
use tulczyjew_core::higher_structures::{forms_brackets, lift, HigherStructure, Kind};
use tulczyjew_core::sampling::Sampler;

/// Outcome of one criterion: failures found, plus a short summary.
struct Outcome {
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn criterion(n: u32, title: &str, budget_s: u64, body: impl FnOnce() -> Outcome) {
    let t0 = Instant::now();
    let out = body();
    let dt = t0.elapsed();
    let in_time = dt <= Duration::from_secs(budget_s);
    let pass = out.failures.is_empty() && in_time;
    // written past the test harness capture so the line always shows up
    let mut so = std::io::stdout().lock();
    let _ = writeln!(
        so,
        "[{}] criterion {n}: {title} ({:.2} s of {budget_s} s; {})",
        if pass { "PASS" } else { "FAIL" },
        dt.as_secs_f64(),
        out.summary
    );
    let _ = so.flush();
    assert!(in_time, "criterion {n} over budget: {dt:?}");
    assert!(
        out.failures.is_empty(),
        "criterion {n}: {:#?}",
        out.failures
    );
}

fn positions(sp: &TotalSpace) -> Vec<usize> {
    let mut v = sp.base.clone();
    v.extend(&sp.fiber);
    v
}

fn coordinates(sp: &TotalSpace) -> Vec<usize> {
    let mut v = positions(sp);
    v.extend(&sp.base_conj);
    v.extend(&sp.fiber_conj);
    v
}

fn bracket_spaces(a: &Algebroid) -> [&TotalSpace; 4] {
    let c = a.charts();
    [&c.multivectors, &c.forms, &c.dual, &c.odd_forms]
}

#[test]
fn criterion_1_calibration_fixtures() {
    criterion(1, "bracket component displays", 5, || {
        let mut o = Outcome::new();
        let pairs = [(Even, Even), (Even, Odd), (Odd, Even), (Odd, Odd)];
        let mut n = 0;
        // (2|1) base, even 2-dim fiber: both displays as printed
        let a = generic_algebroid(&[Even, Even]);
        for (p, q) in pairs {
            let sp = &a.charts().multivectors;
            let (x, y) = (
                generic_function(&a, sp, "X", p),
                generic_function(&a, sp, "YY", q),
            );
            let e = a.algebroid_bracket(Side::Schouten, &x, &y).unwrap();
            o.require(e == schouten_display(&a, &x, &y), || {
                format!("Schouten {p:?},{q:?}")
            });
            let sp = &a.charts().dual;
            let (f, g) = (
                generic_function(&a, sp, "F", p),
                generic_function(&a, sp, "GG", q),
            );
            let e = a.algebroid_bracket(Side::Poisson, &f, &g).unwrap();
            o.require(e == poisson_display(&a, &f, &g, true), || {
                format!("Poisson {p:?},{q:?}")
            });
            n += 2;
        }
        // (1|1) fiber: Schouten as printed, Poisson with the index-sign correction
        let a = generic_algebroid(&[Even, Odd]);
        for (p, q) in pairs {
            let sp = &a.charts().multivectors;
            let (x, y) = (
                generic_function(&a, sp, "X", p),
                generic_function(&a, sp, "YY", q),
            );
            let e = a.algebroid_bracket(Side::Schouten, &x, &y).unwrap();
            o.require(e == schouten_display(&a, &x, &y), || {
                format!("mixed Schouten {p:?},{q:?}")
            });
            let sp = &a.charts().dual;
            let (f, g) = (
                generic_function(&a, sp, "F", p),
                generic_function(&a, sp, "GG", q),
            );
            let e = a.algebroid_bracket(Side::Poisson, &f, &g).unwrap();
            o.require(e == poisson_display(&a, &f, &g, false), || {
                format!("mixed Poisson {p:?},{q:?}")
            });
            n += 2;
        }
        o.summary = format!("{n} symbolic bracket pairs, term-for-term");
        o
    });
}

#[test]
fn criterion_2_triple_examples() {
    criterion(2, "triple pullback examples", 5, || {
        let mut o = Outcome::new();
        let mut d = triple_examples::Diff::default();
        for base in [
            vec![("x", Even)],
            vec![("x", Even), ("y", Even), ("th", Odd)],
            vec![("th", Odd), ("s", Odd)],
        ] {
            let t = tangent(&base).unwrap();
            d.extend(triple_examples::tangent_schouten(&t));
            d.extend(triple_examples::tangent_poisson(&t));
        }
        for a in [
            fixtures::affine_lie_algebra().unwrap(),
            fixtures::sl2().unwrap(),
            fixtures::lie_super_21().unwrap(),
            fixtures::lie_super_12().unwrap(),
            fixtures::lie_super_11().unwrap(),
        ] {
            d.extend(triple_examples::lie_algebra_pullbacks(&a));
            d.extend(triple_examples::lie_algebra_encodings(&a));
        }
        o.failures = d.0;
        o.summary = "3 tangent algebroids, 5 Lie (super)algebras".into();
        o
    });
}

#[test]
fn criterion_3_five_way_equivalence() {
    criterion(3, "five-way verdict equivalence", 30, || {
        let mut o = Outcome::new();
        let mut s = Sampler::new(2024);
        let (mut valid, mut invalid, mut total) = (0, 0, 0);
        let shapes: [&[Parity]; 6] = [
            &[Even, Even, Even],
            &[Even, Odd, Odd],
            &[Even, Even, Odd],
            &[Odd, Even],
            &[Odd, Odd, Odd],
            &[Even, Odd],
        ];
        for k in 0..60 {
            let (par, consts) = if k % 3 == 0 {
                random_valid_constants(&mut s)
            } else {
                let par = shapes[k % shapes.len()].to_vec();
                let c = random_constants(&mut s, &par, 0.4);
                (par, c)
            };
            let a = lie_from(&par, &consts);
            let r = a.verify_structure_equations().unwrap();
            o.require(r.agree(), || {
                format!("{par:?} {consts:?}: {:?}", r.verdicts())
            });
            if r.structure_equations_hold() {
                valid += 1;
            } else {
                invalid += 1;
            }
            total += 1;
        }
        o.require(total >= 50, || "fewer than 50 sets".into());
        o.require(valid >= 10 && invalid >= 10, || {
            format!("unbalanced: {valid} valid, {invalid} invalid")
        });
        o.summary = format!("{total} sets, {valid} valid, {invalid} invalid, all verdicts agree");
        o
    });
}

#[test]
fn criterion_4_bracket_axioms() {
    criterion(4, "bracket axiom suite", 30, || {
        let mut o = Outcome::new();
        let a = fixtures::super_line_frame().unwrap();
        let mut s = Sampler::new(99);
        for sp in bracket_spaces(&a) {
            let vars = coordinates(sp);
            for _ in 0..200 {
                let f = s.any_homogeneous(&sp.chart, &vars, 3, 2);
                let g = s.any_homogeneous(&sp.chart, &vars, 3, 2);
                let h = s.any_homogeneous(&sp.chart, &vars, 3, 2);
                let r = axiom_residuals(&f, &g, &h).unwrap();
                o.require(r.hold(), || {
                    format!("{}: {f} | {g} | {h}: {r:?}", sp.chart.name())
                });
            }
        }
        o.summary = "4 chart types × 200 triples".into();
        o
    });
}

#[test]
fn criterion_5_jacobiator_theorem() {
    criterion(5, "Jacobiator = derived bracket of Δ²", 30, || {
        let mut o = Outcome::new();
        let mut count = 0;
        for (a, seed, master) in [
            (fixtures::super_line_frame().unwrap(), 1, false),
            (fixtures::lie_super_21().unwrap(), 2, false),
            (fixtures::heisenberg_frame().unwrap(), 3, true),
            (fixtures::lie_super_12().unwrap(), 4, true),
        ] {
            let mut s = Sampler::new(seed);
            let enc = a.encodings();
            let structures = [&enc.s, &enc.h_q, &enc.p, &enc.x_q];
            for (sp, theta) in bracket_spaces(&a).into_iter().zip(structures) {
                let eps = sp.chart.epsilon().unwrap();
                let pr = Projector::new(&sp.chart, sp.momenta());
                let delta = if master {
                    o.require(master_residual(theta).unwrap().holds, || {
                        "master residual".into()
                    });
                    theta.clone()
                } else {
                    s.homogeneous(&sp.chart, &coordinates(sp), 3, 4, eps.flip())
                };
                for n in 0..=4 {
                    for _ in 0..2 {
                        let args: Vec<Poly> = (0..n)
                            .map(|_| s.any_homogeneous(&sp.chart, &positions(sp), 2, 2))
                            .collect();
                        let sq = jacobiator(&delta, &args, &pr).unwrap();
                        let sh = shuffle_jacobiator_canonical(&delta, &args, &pr).unwrap();
                        o.require(sq == sh, || format!("{} n={n}", sp.chart.name()));
                        if master {
                            o.require(sq.is_zero() && sh.is_zero(), || {
                                format!("{} n={n} nonzero", sp.chart.name())
                            });
                        }
                        count += 1;
                    }
                }
            }
        }
        o.summary = format!("{count} argument lists, n ≤ 4");
        o
    });
}

#[test]
fn criterion_6_cartan_suite() {
    criterion(6, "Cartan identities", 60, || {
        let mut o = Outcome::new();
        let mut s = Sampler::new(606);
        let mut pairs = 0;
        for a in [
            tangent(&[("x", Even), ("th", Odd)]).unwrap(),
            tangent(&[("x", Even), ("y", Even), ("th", Odd)]).unwrap(),
            fixtures::super_line_frame().unwrap(),
            fixtures::affine_action().unwrap(),
            fixtures::lie_super_21().unwrap(),
            fixtures::heisenberg_frame().unwrap(),
        ] {
            let mv = &a.charts().multivectors;
            for _ in 0..4 {
                let x = s.any_homogeneous(&mv.chart, &positions(mv), 3, 2);
                let y = s.any_homogeneous(&mv.chart, &positions(mv), 3, 2);
                let r = verify_cartan_identities(&a, &x, &y, 3).unwrap();
                let bad: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
                o.require(bad.is_empty(), || format!("X={x} Y={y}: {bad:?}"));
                pairs += 1;
            }
        }
        let a = tangent(&[("x", Even)]).unwrap();
        let mv = &a.charts().multivectors;
        let r = verify_cartan_identities(
            &a,
            &mv.parse("eta_x").unwrap(),
            &mv.parse("x*eta_x").unwrap(),
            3,
        )
        .unwrap();
        o.require(r.holds(), || "line example".into());
        pairs += 1;
        let bad = fixtures::jacobi_violating().unwrap();
        let mv = &bad.charts().multivectors;
        let r = verify_cartan_identities(
            &bad,
            &mv.parse("eta_1").unwrap(),
            &mv.parse("eta_2*eta_3").unwrap(),
            0,
        )
        .unwrap();
        let failed: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
        o.require(!failed.is_empty(), || "Jacobi-violating data passed".into());
        o.summary = format!(
            "{pairs} pairs, base degree 3; violating data fails {}",
            failed.len()
        );
        o
    });
}

#[test]
fn criterion_7_homotopy_bv() {
    criterion(7, "homotopy BV", 60, || {
        let mut o = Outcome::new();
        let a = tangent(&[("x", Even), ("y", Even), ("th", Odd)]).unwrap();
        let mv = &a.charts().multivectors;
        let fs = &a.charts().forms;
        let p = mv.parse("1 + y*eta_x*eta_y + eta_x*eta_y*eta_th").unwrap();
        let weights: Vec<u32> = (0..=4)
            .filter(|&w| !p.degree_component(&mv.fiber, w).is_zero())
            .collect();
        o.require(weights == [0, 2, 3], || format!("weights {weights:?}"));
        let r = verify_koszul_brylinski(&a, &p, 3).unwrap();
        let bad: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
        o.require(bad.is_empty(), || format!("{bad:?}"));
        let delta = koszul_brylinski(&a, &p).unwrap();
        let mut s = Sampler::new(707);
        for w in [2u32, 3] {
            let pw = p.degree_component(&mv.fiber, w);
            for _ in 0..3 {
                let args: Vec<Poly> = (0..=w)
                    .map(|_| s.any_homogeneous(&fs.chart, &positions(fs), 2, 2))
                    .collect();
                o.require(
                    koszul_schouten_brackets(&a, &pw, &args).unwrap().is_zero(),
                    || format!("weight {w}"),
                );
            }
        }
        let mut rel = 0;
        for r in 1..=3usize {
            for _ in 0..4 {
                let al: Vec<Poly> = (0..=r)
                    .map(|_| s.any_homogeneous(&fs.chart, &positions(fs), 2, 2))
                    .collect();
                let res = recursive_relation_residual(&delta, &al[..r - 1], &al[r - 1], &al[r]);
                o.require(res.is_zero(), || format!("recursive relation r={r}: {res}"));
                rel += 1;
            }
        }
        o.summary =
            format!("Δ² = 0 on span, pure-weight brackets vanish, {rel} recursive relations");
        o
    });
}

#[test]
fn criterion_8_classical_limit() {
    criterion(8, "classical limit and total symbol", 60, || {
        let mut o = Outcome::new();
        let mut s = Sampler::new(808);
        let mut runs = 0;
        for (name, a, fixed) in [
            (
                "even",
                tangent(&[("x", Even), ("y", Even)]).unwrap(),
                Some("x + y*eta_x*eta_y + x^2*eta_x*eta_y"),
            ),
            ("even", fixtures::affine_action().unwrap(), None),
            (
                "mixed",
                tangent(&[("x", Even), ("y", Even), ("th", Odd)]).unwrap(),
                Some("1 + y*eta_x*eta_y + eta_x*eta_y*eta_th"),
            ),
            ("mixed", fixtures::lie_super_21().unwrap(), None),
        ] {
            let mv = &a.charts().multivectors;
            let fs = &a.charts().forms;
            let p = match fixed {
                Some(t) => mv.parse(t).unwrap(),
                None => s.homogeneous(&mv.chart, &positions(mv), 3, 3, Even),
            };
            let h = HigherStructure::new(&a, Kind::Poisson, p.clone()).unwrap();
            let lifted = lift(&a, &h).unwrap().forms_structure;
            o.require(total_symbol(&a, &p).unwrap() == lifted, || {
                format!("{name}: σΔ ≠ 𝒮 for {p}")
            });
            for r in 1..=3 {
                for _ in 0..2 {
                    let args: Vec<Poly> = (0..r)
                        .map(|_| s.any_homogeneous(&fs.chart, &positions(fs), 2, 2))
                        .collect();
                    let c = classical_limit(&a, &p, &args).unwrap();
                    o.require(c.holds(), || format!("{name} r={r}: P={p}: {c:?}"));
                    let direct = forms_brackets(&a, &h, &args).unwrap();
                    o.require(direct.embed(c.limit.chart()).unwrap() == c.limit, || {
                        format!("{name} r={r} direct")
                    });
                    runs += 1;
                }
            }
        }
        o.summary = format!("{runs} limits on 2 even and 2 mixed examples");
        o
    });
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn criterion_9_cli_determinism() {
    criterion(9, "CLI determinism and exit codes", 120, || {
        let mut o = Outcome::new();
        let expected_fail = ["jacobi_violating", "open_poisson", "sl2_casimir"];
        let mut files: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "problem"))
            .collect();
        files.sort();
        let run = |f: &PathBuf, extra: &[&str]| {
            Command::new(env!("CARGO_BIN_EXE_tulczyjew"))
                .args(["verify", "--format", "machine"])
                .args(extra)
                .arg(f)
                .output()
                .unwrap()
        };
        for f in &files {
            let stem = f.file_stem().unwrap().to_string_lossy().to_string();
            let want = if expected_fail.contains(&stem.as_str()) {
                1
            } else {
                0
            };
            for extra in [&[][..], &["--seed", "12345"][..]] {
                let (a, b) = (run(f, extra), run(f, extra));
                o.require(a.stdout == b.stdout, || {
                    format!("{stem} {extra:?}: reports differ")
                });
                o.require(a.status.code() == Some(want), || {
                    format!("{stem}: exit {:?}", a.status.code())
                });
                o.require(b.status.code() == Some(want), || {
                    format!("{stem}: exit {:?}", b.status.code())
                });
                let text = String::from_utf8_lossy(&a.stdout);
                match parse_machine(&text) {
                    Ok(r) => o.require(r.passed == (want == 0), || format!("{stem}: passed flag")),
                    Err(e) => o.failures.push(format!("{stem}: {e}")),
                }
            }
        }
        let dir = std::env::temp_dir().join(format!("tulczyjew-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let bad = dir.join("bad.problem");
        std::fs::write(&bad, "fiber even 1\nstructure 1 1 = \n").unwrap();
        o.require(run(&bad, &[]).status.code() == Some(2), || {
            "syntax error exit".into()
        });
        o.require(
            run(&dir.join("none.problem"), &[]).status.code() == Some(2),
            || "missing file exit".into(),
        );
        std::fs::remove_dir_all(&dir).unwrap();
        o.summary = format!(
            "{} fixtures × 2 seeds byte-identical, exit codes 0/1/2",
            files.len()
        );
        o
    });
}
