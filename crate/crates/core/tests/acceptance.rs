//! Acceptance criteria. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

mod common;

use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Signed;
use orientcorr::classify::{classify, ClassifyOptions};
use orientcorr::closed_form::{cycle_correlation, forest_correlation, CycleTriple, ForestKind};
use orientcorr::dyadic::{DyadicProb, Sign, SignedDyadic};
use orientcorr::enumerate::{exact_correlation, EnumConfig};
use orientcorr::graph::{complete_graph, cycle_graph, Graph};
use orientcorr::kn::{bound_report, covariance_sign_kn, f, g, table_row};
use orientcorr::monte_carlo::mc_estimate;
use orientcorr::with_threads;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_orientcorr"))
        .args(args)
        .env_remove("ORIENTCORR_THREADS")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn k4_minus_edge() -> Graph {
    Graph::from_edges(4, [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// Expected rows: n, P(A)·2^C(n,2), P(A), P(A∩B)·2^C(n,2), P(A∩B), relative covariance.
const TABLE: [(usize, &str, &str, &str, &str, &str); 12] = [
    (2, "1", "0.5000", "", "", ""),
    (3, "3", "0.3750", "1", "0.1250000", "-0.125000"),
    (4, "16", "0.2500", "4", "0.0625000", "0.000000"),
    (5, "150", "0.1465", "26", "0.0253906", "0.154898"),
    (6, "2504", "0.0764", "272", "0.0083008", "0.296523"),
    (7, "77472", "0.0369", "4672", "0.0022278", "0.387428"),
    (8, "4677904", "0.0174", "139696", "0.0005204", "0.416449"),
    (9, "571023120", "0.0083", "7928624", "0.0001154", "0.401547"),
    (10, "142058571776", "0.0040", "917140928", "0.0000261", "0.374613"),
    (11, "71626948215168", "0.0020", "220836999808", "0.0000061", "0.355191"),
    (12, "72752562631695616", "0.0010", "109473061398784", "0.0000015", "0.344746"),
    (13, "148346259329909191680", "0.0005", "110228037783934976", "0.0000004", "0.339426"),
];

fn table_reproduction() -> Check {
    let text = String::from_utf8(cli(&["table", "--max-n", "13"])).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(2)
        .map(|l| l.split('|').map(|c| c.trim().to_string()).collect())
        .collect();
    ensure(rows.len() == TABLE.len(), || format!("{} rows", rows.len()))?;
    for (row, expect) in rows.iter().zip(TABLE) {
        let want = [expect.0.to_string(), expect.1.into(), expect.2.into(), expect.3.into(), expect.4.into(), expect.5.into()];
        ensure(row[..] == want[..], || format!("row {row:?} != {want:?}"))?;
    }
    Ok("12 rows, scaled integers and decimals exact".into())
}

fn k4_minus_edge_labelings() -> Check {
    let g = k4_minus_edge();
    let pos = exact_correlation(&g, g.triple(0, 1, 2).unwrap(), EnumConfig::default()).unwrap();
    let neg = exact_correlation(&g, g.triple(1, 0, 3).unwrap(), EnumConfig::default()).unwrap();
    let over_1024 = |k: i64| SignedDyadic::from_parts(k.into(), 10);
    ensure(pos.cov == over_1024(7), || format!("positive labeling gave {}", pos.cov))?;
    ensure(neg.cov == over_1024(-25), || format!("negative labeling gave {}", neg.cov))?;
    Ok(format!("cov = {} and {}", pos.cov, neg.cov))
}

fn oracle_equivalence() -> Check {
    for n in 3..=7 {
        let kn = complete_graph(n).unwrap();
        let corr = exact_correlation(&kn, kn.triple(0, 1, 2).unwrap(), EnumConfig::default()).unwrap();
        ensure(f(n, 1).unwrap() == corr.p_a(), || format!("f({n},1)"))?;
        ensure(g(n, 1).unwrap() == corr.p_ab(), || format!("g({n},1)"))?;
    }
    Ok("f(n,1), g(n,1) equal enumeration on K3..K7".into())
}

fn kn_sign_sequence() -> Check {
    let signs: Vec<Sign> = (3..=15).map(|n| covariance_sign_kn(n).unwrap()).collect();
    let mut want = vec![Sign::Negative, Sign::Zero];
    want.resize(13, Sign::Positive);
    ensure(signs == want, || format!("{signs:?}"))?;
    let text: String = signs.iter().map(|s| s.symbol()).collect();
    Ok(format!("n=3..15: {text}"))
}

fn cycle_closed_form() -> Check {
    let mut checked = 0;
    for n in 3..=10 {
        let g = cycle_graph(n).unwrap();
        let bound = SignedDyadic::from(DyadicProb::half_pow(2 * n as u32)).neg();
        for c in 1..n {
            for d in 1..n - c {
                let closed = cycle_correlation(CycleTriple::new(n, c, d).unwrap());
                let t = g.triple(0, c, c + d).unwrap();
                let exact = exact_correlation(&g, t, EnumConfig::default()).unwrap();
                ensure(closed == exact, || format!("({n},{c},{d}) differs from enumeration"))?;
                ensure(closed.cov <= bound, || format!("({n},{c},{d}) above bound"))?;
                ensure((closed.cov == bound) == (c == 1 && d == 1), || format!("({n},{c},{d}) equality case"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (n,c,d) triples"))
}

fn forest_dichotomy() -> Check {
    let trees = common::test_trees();
    ensure(trees.len() >= 50, || format!("only {} trees", trees.len()))?;
    let mut triples = 0;
    for tree in &trees {
        for t in tree.ordered_triples() {
            let v = forest_correlation(tree, t).unwrap();
            let e = exact_correlation(tree, t, EnumConfig::default()).unwrap();
            ensure(v.p_cd == e.p_cd && v.cov == e.cov && v.p_c == e.p_c && v.p_d == e.p_d, || {
                format!("{t:?} on {:?}", tree.edges())
            })?;
            let without_s = Graph::from_edges(tree.n(), tree.edges().iter().copied().filter(|&(u, w)| u != t.s && w != t.s))
                .unwrap();
            let through_s = without_s.component_of(t.a) >> t.b & 1 == 0;
            ensure((v.kind == ForestKind::Independent) == through_s, || format!("verdict for {t:?}"))?;
            triples += 1;
        }
    }
    Ok(format!("{} trees, {triples} triples", trees.len()))
}

fn bound_suite() -> Check {
    let report = bound_report(40).unwrap();
    ensure(report.records.iter().all(|r| r.all_hold()), || {
        let bad: Vec<usize> = report.records.iter().filter(|r| !r.all_hold()).map(|r| r.n).collect();
        format!("failing n: {bad:?}")
    })?;
    ensure(report.c8_below_5, || "c(8) >= 5".into())?;
    ensure(report.all_hold(), || "report".into())?;
    Ok(format!("n=2..40, {} records", report.records.len()))
}

fn limit_trend() -> Check {
    let pow2 = |e: u32| BigRational::from_integer(num_bigint::BigInt::from(1) << e);
    let n = 30;
    let fa = f(n, 1).unwrap().to_rational() * pow2(n as u32 - 2);
    let ga = g(n, 1).unwrap().to_rational() * pow2(2 * n as u32 - 3);
    let within = |x: &BigRational, lo: (i64, i64), hi: (i64, i64)| {
        *x > BigRational::new(lo.0.into(), lo.1.into()) && *x < BigRational::new(hi.0.into(), hi.1.into())
    };
    ensure(within(&fa, (95, 100), (105, 100)), || format!("2^(n-2) f = {fa}"))?;
    ensure(within(&ga, (285, 100), (315, 100)), || format!("2^(2n-3) g = {ga}"))?;
    let third = BigRational::new(1.into(), 3.into());
    let gaps: Vec<BigRational> = (10..=15).map(|n| (table_row(n).unwrap().rel_cov.unwrap() - &third).abs()).collect();
    ensure(gaps.windows(2).all(|w| w[1] < w[0]), || "gap not decreasing".into())?;
    Ok(format!(
        "n=30: {}, {}; |rel_cov - 1/3| decreasing on 10..15",
        orientcorr::dyadic::format_decimal(&fa, 6),
        orientcorr::dyadic::format_decimal(&ga, 6)
    ))
}

fn classifier() -> Check {
    let opts = ClassifyOptions::default();
    let k4 = classify(&complete_graph(4).unwrap(), &opts).unwrap();
    ensure(k4.class_i && k4.class_ii && k4.class_iii, || format!("K4 {k4:?}"))?;
    for n in 5..=6 {
        let c = classify(&complete_graph(n).unwrap(), &opts).unwrap();
        ensure(c.class_iii && !c.class_i, || format!("K{n} {c:?}"))?;
    }
    for n in 3..=8 {
        ensure(classify(&cycle_graph(n).unwrap(), &opts).unwrap().class_i, || format!("C{n}"))?;
    }
    for tree in common::test_trees() {
        ensure(classify(&tree, &opts).unwrap().class_i, || format!("tree {:?}", tree.edges()))?;
    }
    let c = classify(&k4_minus_edge(), &opts).unwrap();
    ensure(c.class_ii, || format!("K4-e {c:?}"))?;
    Ok(format!("K4-e has {} positive triples", c.pos_triples))
}

fn monte_carlo_calibration() -> Check {
    let k5 = complete_graph(5).unwrap();
    let t = k5.triple(0, 1, 2).unwrap();
    let neither = 26.0 / 1024.0;
    let both = 750.0 / 1024.0;
    let runs = 200u64;
    let (mut hits_ab, mut hits_cd) = (0, 0);
    for seed in 0..runs {
        let est = mc_estimate(&k5, t, 100_000, seed).unwrap();
        hits_ab += ((est.p_ab_hat - neither).abs() <= 3.0 * est.se_p_ab) as u64;
        hits_cd += ((est.p_cd_hat - both).abs() <= 3.0 * est.se_p_cd) as u64;
    }
    ensure(hits_ab * 100 >= 99 * runs, || format!("26/1024 covered in {hits_ab}/{runs}"))?;
    let one = with_threads(1, || mc_estimate(&k5, t, 100_000, 12345).unwrap());
    let eight = with_threads(8, || mc_estimate(&k5, t, 100_000, 12345).unwrap());
    ensure(format!("{one:?}") == format!("{eight:?}"), || "1 vs 8 workers differ".into())?;
    let a = cli(&["--json", "--threads", "1", "mc", "--graph6", "D~{", "--a", "0", "--s", "1", "--b", "2", "--samples", "100000", "--seed", "9"]);
    let b = cli(&["--json", "--threads", "8", "mc", "--graph6", "D~{", "--a", "0", "--s", "1", "--b", "2", "--samples", "100000", "--seed", "9"]);
    ensure(a == b, || "CLI output differs across workers".into())?;
    Ok(format!("26/1024 within 3 se in {hits_ab}/{runs}; 750/1024 in {hits_cd}/{runs}; 1 vs 8 workers identical"))
}

fn determinism() -> Check {
    let commands: Vec<Vec<&str>> = vec![
        vec!["kn", "--n", "12"],
        vec!["table", "--max-n", "15"],
        vec!["bounds", "--max-n", "40"],
        vec!["exact", "--graph6", "CN", "--a", "0", "--s", "1", "--b", "2"],
        vec!["exact", "--graph6", "F~~~w", "--a", "3", "--s", "0", "--b", "5"],
        vec!["cycle", "--n", "9", "--c", "2", "--d", "4"],
        vec!["forest", "--graph6", "D?{", "--a", "0", "--s", "1", "--b", "2"],
        vec!["classify", "--graph6", "E~~w", "--outerplanar"],
    ];
    let mut outputs = 0;
    for cmd in &commands {
        for json in [false, true] {
            let run = |threads: &str| {
                let mut args = vec!["--threads", threads];
                if json {
                    args.push("--json");
                }
                args.extend(cmd);
                cli(&args)
            };
            let first = run("1");
            for threads in ["1", "2", "8"] {
                ensure(run(threads) == first, || format!("{cmd:?} json={json} threads={threads}"))?;
            }
            outputs += 1;
        }
    }
    Ok(format!("{outputs} command outputs identical for 1, 2, 8 threads and repeated runs"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 11] = [
        ("table reproduction", table_reproduction),
        ("K4 minus edge labelings", k4_minus_edge_labelings),
        ("oracle equivalence", oracle_equivalence),
        ("complete-graph sign sequence", kn_sign_sequence),
        ("cycle closed form", cycle_closed_form),
        ("forest dichotomy", forest_dichotomy),
        ("bound suite", bound_suite),
        ("limit trend", limit_trend),
        ("classifier", classifier),
        ("monte carlo calibration", monte_carlo_calibration),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match &result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
