//! Acceptance criteria. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line (plus NOTE lines) in
//! `cargo test` output.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tworay::fixtures::{self, check, compare_row, Reference};
use tworay::search::{self, Bounds};
use tworay::{Family, SearchReport};
use tworay_core::bundle::{anticanonical_x, cone_contains, eff_cone, mob_cone};
use tworay_core::classify::{dp2_bundle, dp2_grid, screen_interior};
use tworay_core::dp3::{dp3_bundle, dp3_grid};
use tworay_core::game::conic_discriminant_degree;
use tworay_core::lattice::normal_form_dp2;
use tworay_core::newton::{enumerate_polygon, t2_coefficient_degree};
use tworay_core::{analyze_dp2, analyze_dp3, classify_dp2, det2, DP3Params, Dp2Bounds, Dp3Bounds, EndModel, Weight};

struct Outcome {
    ok: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Outcome {
        Outcome { ok, detail: detail.into(), notes: Vec::new() }
    }
    fn note(mut self, n: impl Into<String>) -> Outcome {
        self.notes.push(n.into());
        self
    }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tworay"));
    c.env_remove(fixtures::ENV_DIR);
    c
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>, Duration) {
    let t = Instant::now();
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout, t.elapsed())
}

fn search_json(args: &[&str]) -> (SearchReport, Duration) {
    let (code, out, dt) = run_bin(args);
    assert_eq!(code, 0, "tworay {:?} exited {}", args, code);
    (serde_json::from_slice(&out).expect("search output parses"), dt)
}

fn fmt_params(v: &[i64]) -> String {
    let (w, last) = v.split_at(v.len() - 1);
    format!("({};{})", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","), last[0])
}

fn c1_table1() -> Outcome {
    let (rep, dt) = search_json(&["search", "--family", "dp2", "--format", "json"]);
    let reference = Reference::load(Family::Dp2).unwrap();
    let c = check(&reference, &rep.links);
    let ok = rep.links.len() == 13 && c.passed() && c.matched_rows == 13 && c.extra.is_empty() && dt < Duration::from_secs(10);
    Outcome::new(
        ok,
        format!("{} links, {}/13 rows match, {} mismatches, {:.2} s single-threaded", rep.links.len(), c.matched_rows, c.mismatches.len(), dt.as_secs_f64()),
    )
}

fn c2_tables34() -> Outcome {
    let (rep, dt) = search_json(&["search", "--family", "dp3", "--paper-strict", "--format", "json"]);
    let reference = Reference::load(Family::Dp3).unwrap();
    let c = check(&reference, &rep.links);
    let anomalies: BTreeSet<Vec<i64>> = rep.anomalies.iter().map(|a| a.params.flat()).collect();
    let expected_anomalies: BTreeSet<Vec<i64>> = [vec![0, 0, 0, 2], vec![1, 3, 3, -2], vec![2, 2, 6, -6]].into_iter().collect();

    // each correction is forced by a check independent of the fixture
    let printed: Vec<_> = ["table3", "table4"].iter().flat_map(|t| fixtures::load(t).unwrap().rows).collect();
    let printed_row = |no: u32| printed.iter().find(|r| r.no == no).unwrap().clone();
    let link = |a, b, cc, d| analyze_dp3(DP3Params::new(a, b, cc, d)).verdict.as_link().cloned().expect("link");
    let mut forced = Vec::new();
    // row 18: its printed data is exactly the link of (1,2,3;-2), not of (1,2,3;-3)
    let r18 = printed_row(18);
    forced.push(compare_row(&r18, &link(1, 2, 3, -2), true).0.is_empty() && !compare_row(&r18, &link(1, 2, 3, -3), true).0.is_empty());
    // row 1: -K_X sits on the first wall
    let a1 = analyze_dp3(DP3Params::new(0, 1, 1, 1));
    let kx = anticanonical_x(&a1.bundle, a1.class);
    forced.push(det2(kx, a1.game.steps[0].wall_ray) == 0);
    // rows 14 and 17: only the computed degree satisfies index = Σw - degree
    for (no, (a, b, cc, d)) in [(14, (1, 1, 3, -3)), (17, (1, 1, 4, -3))] {
        let EndModel::FanoImage { weights, degree: Some(k), index: Some(i), .. } = link(a, b, cc, d).end else { panic!() };
        let printed_deg = printed_row(no).model["degree"].as_i64().unwrap();
        let s: i64 = weights.iter().sum();
        forced.push(i == s - k && i != s - printed_deg);
    }
    let decodable_clean = c.notes.iter().all(|n| !reference.delta_decodable.contains(&n.row));
    let ok = rep.links.len() == 37
        && c.passed()
        && c.matched_rows == 37
        && anomalies == expected_anomalies
        && forced.iter().all(|&f| f)
        && decodable_clean
        && dt < Duration::from_secs(30);
    let mut o = Outcome::new(
        ok,
        format!(
            "{} rows, {}/37 match with {} corrections, anomalies {}, {:.2} s",
            rep.links.len(),
            c.matched_rows,
            c.corrections.len(),
            anomalies.iter().map(|p| fmt_params(p)).collect::<Vec<_>>().join(" "),
            dt.as_secs_f64()
        ),
    );
    o = o.note(format!(
        "the criterion names one correction (row 18 read as (1,2,3;-2)); the tables need {} ({}), each confirmed independently: {:?}",
        c.corrections.len(),
        c.corrections.iter().map(|k| format!("row {} {}", k.row, k.pointer)).collect::<Vec<_>>().join(", "),
        forced
    ));
    o = o.note("besides the expected (0,0,0;2), (1,3,3;-2) and (2,2,6;-6) also pass every screen and are reported as anomalies");
    o = o.note(format!(
        "step tuples compared on rows {:?}; informational tuple differences on rows {:?}",
        reference.delta_decodable,
        c.notes.iter().map(|n| n.row).collect::<BTreeSet<_>>()
    ));
    o
}

fn dp2_family(w: [i64; 4], e: i64) -> (tworay_core::WeightedBundle, Weight) {
    let nf = normal_form_dp2(w, e).unwrap();
    dp2_bundle(&nf)
}

fn c3_discriminants() -> Outcome {
    let (b6, c6) = dp2_family([1, 1, 1, 1], 2);
    let (b8, c8) = dp2_family([0, 1, 1, 2], 2);
    let d6 = conic_discriminant_degree(&b6, c6);
    let d8 = conic_discriminant_degree(&b8, c8);
    Outcome::new(d6 == Ok(8) && d8 == Ok(10), format!("Family 6 -> {:?}, Family 8 -> {:?}", d6, d8))
}

/// Fiber part of a described monomial: `S2x^4` -> `x^4`.
fn fiber_part(s: &str) -> String {
    s.trim_start_matches('S').trim_start_matches(|c: char| c.is_ascii_digit()).to_string()
}

/// All monomials of degree `k` in `vars`, written like `describe` does.
fn forms(vars: &[&str], k: u32) -> Vec<String> {
    fn go(vars: &[&str], k: u32, acc: String, out: &mut Vec<String>) {
        if vars.len() == 1 {
            out.push(acc + &pow(vars[0], k));
            return;
        }
        for e in (0..=k).rev() {
            go(&vars[1..], k - e, acc.clone() + &pow(vars[0], e), out);
        }
    }
    fn pow(v: &str, e: u32) -> String {
        match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{}^{}", v, e),
        }
    }
    let mut out = Vec::new();
    go(vars, k, String::new(), &mut out);
    out
}

fn times(prefix: &str, v: Vec<String>) -> Vec<String> {
    v.into_iter().map(|m| format!("{}{}", prefix, m)).collect()
}

fn c4_polygons() -> Outcome {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    // rows as printed; `...` ranges are spelled out
    let f6 = vec![s(&["t^2"]), times("t", forms(&["x", "y", "z"], 2)), forms(&["x", "y", "z"], 4)];
    let f8_printed = vec![s(&["x^2t", "xy^2", "xyz", "xz^2"]), s(&["xyt", "xzt", "xy^3", "xy^2z", "xyz^2", "xz^3"]), s(&["y^2t", "yzt", "z^2t", "t^2"])];
    let f9 = vec![
        s(&["t^2", "x^3z", "x^2y^2", "xty"]),
        s(&["xy^3", "x^2yz", "xtz", "ty^2"]),
        s(&["y^4", "xy^2z", "tyz", "x^2z^2"]),
        s(&["xyz^2", "tz^2", "y^3z"]),
        s(&["xz^3", "y^2z^2"]),
        s(&["yz^3"]),
        s(&["z^4"]),
    ];
    let mut f10_1 = forms(&["y", "z"], 4);
    f10_1.extend(s(&["xyt", "xzt"]));
    let f10 = vec![s(&["x^2t", "xy^3", "xy^2z", "xyz^2", "xz^3"]), f10_1, s(&["y^2t", "yzt", "z^2t"]), s(&["t^2"])];
    // Family 8 printed rows 0 and 2 are incomplete: xy^2, xyz, xz^2 have
    // bidegree (-2,3) and cannot lie in class (-2,4); the quartics in y,z of
    // class (-4,4) belong to row 2 but are not printed
    let (b8, c8) = dp2_family([0, 1, 1, 2], 2);
    let class_of = |m: &str| -> Weight {
        let names = ["x", "y", "z", "t"];
        let mut w = Weight::new(0, 0);
        let mut chars = m.chars().peekable();
        while let Some(ch) = chars.next() {
            let mut e = 1;
            if chars.peek() == Some(&'^') {
                chars.next();
                e = chars.next().unwrap().to_digit(10).unwrap() as i64;
            }
            let i = b8.index_of(&ch.to_string()).unwrap_or_else(|| panic!("{} not in {:?}", ch, names));
            w = w + b8.weight(i).checked_scale(e).unwrap();
        }
        w
    };
    let bad_printed: Vec<String> = f8_printed[0].iter().filter(|m| class_of(m) != c8).cloned().collect();
    let mut f8 = f8_printed.clone();
    f8[0] = f8[0].iter().map(|m| if class_of(m) == c8 { m.clone() } else { format!("x{}", m).replacen("xx", "x^2", 1) }).collect();
    f8[2].extend(forms(&["y", "z"], 4));
    let f8_fix_forced =
        bad_printed.len() == 3 && f8[0].iter().all(|m| class_of(m) == c8) && forms(&["y", "z"], 4).iter().all(|m| class_of(m) == Weight::new(c8.l - 2, c8.m));

    type Rows = Vec<Vec<String>>;
    let fams: [(&str, [i64; 4], i64, &Rows); 4] =
        [("6", [1, 1, 1, 1], 2, &f6), ("8", [0, 1, 1, 2], 2, &f8), ("9", [0, 1, 2, 1], 2, &f9), ("10", [0, 1, 1, 3], 3, &f10)];
    let mut bad = Vec::new();
    let mut rows = 0;
    for (name, w, e, want) in fams {
        let (b, c) = dp2_family(w, e);
        let p = enumerate_polygon(&b, c);
        let top = p.monomials.iter().map(|m| m.base_degree).max().unwrap_or(0) as usize;
        if top + 1 != want.len() {
            bad.push(format!("Family {}: {} rows computed, {} printed", name, top + 1, want.len()));
        }
        for (k, row) in want.iter().enumerate() {
            rows += 1;
            let got: BTreeSet<String> = p.row(k as u32).map(|m| fiber_part(&m.describe(&b))).collect();
            let exp: BTreeSet<String> = row.iter().cloned().collect();
            if got != exp {
                bad.push(format!("Family {} row {}: computed {:?}", name, k, got));
            }
        }
    }
    let ok = bad.is_empty() && f8_fix_forced;
    let mut o = Outcome::new(ok, format!("{} rows over Families 6, 8, 9, 10; {} differ", rows, bad.len()));
    for b in bad {
        o = o.note(b);
    }
    o.note(format!(
        "Family 8 rows 0 and 2 compared after two corrections to the printed table: {:?} have bidegree (-2,3), not (-2,4), and read x^2y^2, x^2yz, x^2z^2; row 2 omits the five quartics in y,z of class (-4,4). Bidegree check confirms both: {}",
        bad_printed, f8_fix_forced
    ))
}

fn c5_t2_degrees() -> Outcome {
    let fams = [([1, 1, 1, 1], 2), ([0, 1, 1, 2], 2), ([0, 1, 1, 3], 3), ([0, 1, 2, 3], 3)];
    let mut degs = Vec::new();
    let mut sings = Vec::new();
    for (w, e) in fams {
        let (b, c) = dp2_family(w, e);
        degs.push(t2_coefficient_degree(&b, &enumerate_polygon(&b, c)).unwrap());
        sings.push(analyze_dp2(w, e).unwrap().verdict.as_link().and_then(|l| l.sing));
    }
    let want = [Some(0), Some(2), Some(3), Some(3)];
    Outcome::new(degs == want && sings == want, format!("Families 6, 8, 10, 12 -> {:?}; link point counts {:?}", degs, sings))
}

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn c6_bounds() -> Outcome {
    let t = Instant::now();
    let r2 = search::run(Bounds::Dp2(Dp2Bounds { w_max: 12, e_min: -4, e_max: 24 }), jobs()).unwrap();
    let big_n: Vec<String> = r2.links.iter().filter(|r| r.normal_form.map(|nf| nf.a + nf.b + nf.c > 7).unwrap_or(true)).map(|r| r.params.to_string()).collect();
    let default2: Vec<Vec<i64>> = search::run(Bounds::default_for(Family::Dp2), 1).unwrap().links.iter().map(|r| r.params.flat()).collect();
    let same13 = r2.links.iter().map(|r| r.params.flat()).collect::<Vec<_>>() == default2;
    let r3 = search::run(Bounds::Dp3(Dp3Bounds { c_max: 10, d_min: -10, d_max: 3 }), jobs()).unwrap();
    let big_c: Vec<String> = r3.links.iter().filter(|r| r.params.weights[2] >= 7).map(|r| r.params.to_string()).collect();
    let dt = t.elapsed();
    let ok = big_n.is_empty() && same13 && big_c.is_empty() && dt < Duration::from_secs(300);
    Outcome::new(
        ok,
        format!(
            "dP2 {} inputs, {} links (same 13: {}), n>7: {:?}; dP3 {} inputs, {} links, c>=7: {:?}; {:.2} s",
            r2.inputs,
            r2.links.len(),
            same13,
            big_n,
            r3.inputs,
            r3.links.len(),
            big_c,
            dt.as_secs_f64()
        ),
    )
}

fn c7_properties() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;

    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let small = -1_000_000i64..1_000_000;
    let det = runner.run(&(small.clone(), small.clone(), small.clone(), small.clone(), small.clone(), small, -50i64..50), |(a, b, c, d, e, f, k)| {
        let (u, v, w) = (Weight::new(a, b), Weight::new(c, d), Weight::new(e, f));
        prop_assert_eq!(det2(u, v), -det2(v, u));
        prop_assert_eq!(det2(u + w, v), det2(u, v) + det2(w, v));
        prop_assert_eq!(det2(u.checked_scale(k).unwrap(), v), k * det2(u, v));
        Ok(())
    });
    ok &= det.is_ok();
    parts.push(format!("det2 10000 cases {}", if det.is_ok() { "ok" } else { "FAILED" }));

    let grid = dp2_grid(&Dp2Bounds::default());
    let mut runner = TestRunner::new(Config { cases: 2_000, failure_persistence: None, ..Config::default() });
    let shift = runner.run(&(0..grid.len(), -5i64..=5), |(i, k)| {
        // grid inputs carry no shift, so move by 5 first and then by k
        let ([al, be, ga, de], e) = grid[i];
        let at = |j: i64| classify_dp2([al + j, be + j, ga + j, de + 2 * j], e + 4 * j).unwrap();
        let base = at(5);
        prop_assert_eq!(&at(5 + k), &base);
        prop_assert_eq!(&at(0), &base);
        Ok(())
    });
    ok &= shift.is_ok();
    parts.push(format!(
        "shift invariance 2000 cases {}",
        match &shift {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("FAILED {}", e),
        }
    ));

    let mut type3 = 0;
    let mut index_ok = true;
    for f in [Family::Dp2, Family::Dp3] {
        let reference = Reference::load(f).unwrap();
        for r in search::run(Bounds::default_for(f), 1).unwrap().links.iter().filter(|r| reference.find(&r.params).is_some()) {
            if let Some(EndModel::FanoImage { weights, degree: Some(k), index: Some(i), .. }) = &r.end_model {
                type3 += 1;
                index_ok &= *i == weights.iter().sum::<i64>() - k;
                let kx = r.bundle.anticanonical;
                let tworay::report::AmbientEnd::Contraction { ray, .. } = r.ambient_end else { panic!() };
                index_ok &= det2(kx, ray) == *i;
            }
        }
    }
    ok &= index_ok;
    parts.push(format!("Fano index on {} Type III rows {}", type3, if index_ok { "ok" } else { "FAILED" }));

    let mut bundles = 0;
    let mut mob_ok = true;
    for (w, e) in dp2_grid(&Dp2Bounds::default()) {
        let (b, _) = dp2_family(w, e);
        bundles += 1;
        mob_ok &= cone_contains(eff_cone(&b), mob_cone(&b));
    }
    let g3 = dp3_grid(&Dp3Bounds::default());
    for p in &g3 {
        let (b, _) = dp3_bundle(p);
        bundles += 1;
        mob_ok &= cone_contains(eff_cone(&b), mob_cone(&b));
    }
    ok &= mob_ok;
    parts.push(format!("Mob in Eff on {} bundles {}", bundles, if mob_ok { "ok" } else { "FAILED" }));

    let interior_ok = g3.iter().all(|p| {
        let (b, c) = dp3_bundle(p);
        screen_interior(&b, c).is_ok() == (p.a + p.c < 3 - p.d)
    });
    ok &= interior_ok;
    parts.push(format!("interior <=> a+c<3-d on {} inputs {}", g3.len(), if interior_ok { "ok" } else { "FAILED" }));
    Outcome::new(ok, parts.join("; "))
}

fn c8_determinism() -> Outcome {
    let cmds: Vec<Vec<&str>> = vec![
        vec!["search", "--family", "dp2"],
        vec!["search", "--family", "dp2", "--bounds", "n<=12"],
        vec!["search", "--family", "dp3", "--paper-strict"],
        vec!["search", "--family", "dp3", "--format", "text"],
        vec!["search", "--family", "dp3", "--format", "latex"],
        vec!["search", "--family", "dp2", "--format", "csv"],
    ];
    let mut runs = 0;
    let mut diffs = Vec::new();
    for c in &cmds {
        let (code, first, _) = run_bin(c);
        let mut c8 = c.clone();
        c8.extend(["--jobs", "8"]);
        for args in [c.clone(), c8] {
            let (code2, again, _) = run_bin(&args);
            runs += 1;
            if code != 0 || code2 != 0 || again != first {
                diffs.push(args.join(" "));
            }
        }
    }
    Outcome::new(diffs.is_empty(), format!("{} commands, {} reruns byte-identical (half under --jobs 8); differing: {:?}", cmds.len(), runs, diffs))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("table 1 regression", c1_table1),
        ("tables 3-4 regression", c2_tables34),
        ("discriminant degrees", c3_discriminants),
        ("Newton polygon rows", c4_polygons),
        ("t^2 coefficient degrees", c5_t2_degrees),
        ("bound lemmas by brute force", c6_bounds),
        ("property suites", c7_properties),
        ("determinism", c8_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Outcome::new(false, "panicked"));
        failed += usize::from(!o.ok);
        println!("{} criterion {} ({}): {} [{:.2} s]", if o.ok { "PASS" } else { "FAIL" }, i + 1, name, o.detail, t.elapsed().as_secs_f64());
        for n in o.notes {
            println!("     NOTE {}", n);
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
