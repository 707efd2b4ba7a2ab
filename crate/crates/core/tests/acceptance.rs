mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqd_core::berend::{BerendBounds, ConditionStatus};
use sqd_core::classifier::{classify, fixed_point_data, ClassifyOptions, FixedPointCount, Verdict};
use sqd_core::diophantine::{cook_search, lacunary_badly_approximable, unipotent_power_polys, RealPoly};
use sqd_core::number_field::{construct_example, ConstructedExample, DEFAULT_UNIT_BOUND};
use sqd_core::numeric::{parse_real_expr, DEFAULT_PRECISION_BITS};
use sqd_core::polynomials::{all_powers_irreducible, PowersVerdict};
use sqd_core::random::{random_cook_family, random_lacunary, random_unimodular, random_unipotent_upper};
use sqd_core::torus::{density_diagnostic, dist_to_z, rational_orbit, TorusPoint};
use sqd_core::{ActionSpec, IntMatrix, MonicIntPoly};

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn example() -> ConstructedExample {
    let p = MonicIntPoly::from_i64s(&[-1, -2, 1, 1]).unwrap();
    construct_example(&p, DEFAULT_UNIT_BOUND, BerendBounds::default()).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = MonicIntPoly::from_i64s(&[-1, -2, 1, 1]).unwrap();
    let ex = construct_example(&p, DEFAULT_UNIT_BOUND, BerendBounds::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let g = &ex.spec.generators;
    check(g.len() == 2 && ex.spec.d == 3, "spec is not two 3x3 generators")?;
    check(g.iter().all(|m| m.determinant().abs().is_one()), "generator not in GL(3,Z)")?;
    check(&g[0] * &g[1] == &g[1] * &g[0], "generators do not commute")?;
    // round trip through the validated JSON schema
    let again = ActionSpec::from_json_str(&ex.spec.to_json_pretty()).map_err(|e| e.to_string())?;
    check(again == ex.spec, "spec JSON does not round trip")?;
    check(ex.berend.all_conditions == ConditionStatus::Satisfied, "berend verdict not satisfied")?;
    check(!ex.vn_certificate.virtually_nilpotent, "reported virtually nilpotent")?;
    check(ex.verified, "example not verified")?;
    check(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("units {:?} and {:?}, {:.2?}", ex.units[0].element.coords, ex.units[1].element.coords, elapsed))
}

fn criterion_2() -> Outcome {
    let opts = ClassifyOptions::default();
    let verdict = |rows: &[[i64; 2]]| {
        classify(&ActionSpec::single(IntMatrix::from_i64(rows)).unwrap(), &opts).map(|r| r.verdict)
    };
    let v1 = verdict(&[[1, 1], [0, 1]]).map_err(|e| e.to_string())?;
    check(v1 == Verdict::VirtuallyNilpotentSqd, format!("[[1,1],[0,1]] gave {}", v1.as_str()))?;
    let v2 = verdict(&[[2, 1], [1, 1]]).map_err(|e| e.to_string())?;
    check(v2 == Verdict::NotSqd, format!("[[2,1],[1,1]] gave {}", v2.as_str()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tally = [0usize; 3];
    for d in [2, 3] {
        for _ in 0..20 {
            let a = random_unimodular(&mut rng, d);
            let r = classify(&ActionSpec::single(a.clone()).unwrap(), &opts).map_err(|e| e.to_string())?;
            match r.verdict {
                Verdict::VirtuallyNilpotentSqd => tally[0] += 1,
                Verdict::NotSqd => tally[1] += 1,
                Verdict::BerendSqd => tally[2] += 1,
                Verdict::Inconclusive => return Err(format!("inconclusive on {:?}", a.rows())),
            }
            // v.n. iff no eigenvalue off the unit circle; the slack absorbs Jordan-block
            // perturbation in the floating-point eigenvalues
            let expanding = common::eigenvalues_oracle(&a).iter().any(|z| z.norm() > 1.0 + 1e-3);
            check(
                expanding == (r.verdict == Verdict::NotSqd),
                format!("verdict {} disagrees with eigenvalues of {:?}", r.verdict.as_str(), a.rows()),
            )?;
        }
    }
    Ok(format!("40 random matrices: {} v.n., {} not sqd", tally[0], tally[1]))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    let mut skipped = 0;
    let mut largest = 0;
    while done < 50 {
        let d = rng.random_range(1..=3);
        let a = random_unimodular(&mut rng, d);
        let det = (&a.transpose() - &IntMatrix::identity(d)).determinant();
        if det.is_zero() {
            continue;
        }
        let q = det.abs().to_i64().unwrap();
        // brute force enumerates q^d points
        if (q as f64).powi(d as i32) > 2.0e6 {
            skipped += 1;
            continue;
        }
        let brute = common::fixed_points_oracle(&a, q);
        match fixed_point_data(&a).count {
            FixedPointCount::Finite(c) if c == BigInt::from(brute) => {}
            other => return Err(format!("{:?}: library {other:?}, brute {brute}", a.rows())),
        }
        largest = largest.max(q);
        done += 1;
    }
    Ok(format!("50 matrices, q up to {largest} ({skipped} too large to enumerate)"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a = random_unipotent_upper(&mut rng, 4);
        let polys = unipotent_power_polys(&a).map_err(|e| e.to_string())?;
        for n in 0..=50u32 {
            let want = common::mat_pow_naive(&a, n);
            for i in 0..4 {
                for j in 0..4 {
                    check(
                        polys.p(i, j).eval(n as i64) == want[i][j],
                        format!("{:?}: entry ({i},{j}) at n={n}", a.rows()),
                    )?;
                }
            }
        }
    }
    Ok("20 matrices, n = 0..=50".into())
}

fn criterion_5() -> Outcome {
    let prec = DEFAULT_PRECISION_BITS;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..10 {
        let (family, exprs) = random_cook_family(&mut rng, prec).map_err(|e| e.to_string())?;
        let r = cook_search(&family, 10_000).map_err(|e| e.to_string())?;
        let slope = r.exponent_fit.ok_or("no slope fitted")?;
        check(slope < 0.0, format!("slope {slope} for {exprs:?}"))?;
        worst = worst.max(slope);
    }
    let sqrt2 = RealPoly::new(vec![parse_real_expr("0", prec).unwrap(), parse_real_expr("sqrt(2)", prec).unwrap()]);
    let r = cook_search(std::slice::from_ref(&sqrt2), 100).map_err(|e| e.to_string())?;
    let (n_oracle, v_oracle) = common::min_multiple_distance(std::f64::consts::SQRT_2, 100);
    check(r.n_star == 70 && n_oracle == 70, format!("n* = {} (oracle {n_oracle})", r.n_star))?;
    check((r.value - 0.00505).abs() < 1e-5, format!("value {}", r.value))?;
    check((r.value - v_oracle).abs() < 1e-12, format!("value {} vs oracle {v_oracle}", r.value))?;
    Ok(format!("10 families, least negative slope {worst:.3}; ||70 sqrt2|| = {:.9}", r.value))
}

fn min_distance_oracle(terms: &[BigInt], xi: &BigRational) -> BigRational {
    terms
        .iter()
        .map(|t| dist_to_z(&(BigRational::from_integer(t.clone()) * xi)))
        .min()
        .unwrap()
}

fn criterion_6() -> Outcome {
    let pow = |b: u32| -> Vec<BigInt> { (1..=200u32).map(|n| BigInt::from(b).pow(n)).collect() };
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let mut parts = Vec::new();
    for (base, floor, oracle_xi) in [(2u32, r(1, 5), r(1, 3)), (3, r(3, 10), r(1, 2))] {
        let terms = pow(base);
        let exact = min_distance_oracle(&terms, &oracle_xi);
        check(exact == oracle_xi.clone().min(BigRational::one() - &oracle_xi), format!("oracle for {base}^n"))?;
        let cert = lacunary_badly_approximable(&terms, &r(base as i64, 1), None, &format!("pow:{base}"))
            .map_err(|e| e.to_string())?;
        check(cert.verified_to == 200, "not verified to n = 200")?;
        check(cert.epsilon_exact >= floor, format!("{base}^n: epsilon {}", cert.epsilon))?;
        check(
            min_distance_oracle(&terms, &cert.xi_exact) >= cert.epsilon_exact,
            format!("{base}^n: xi fails independent recheck"),
        )?;
        parts.push(format!("{base}^n eps {}", cert.epsilon));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut slowest = Duration::ZERO;
    for k in 0..5 {
        let terms = random_lacunary(&mut rng, 200);
        let start = Instant::now();
        let cert = lacunary_badly_approximable(&terms, &r(3, 2), None, &format!("random:{k}")).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        check(elapsed < Duration::from_secs(60), format!("random sequence {k} took {elapsed:?}"))?;
        check(cert.epsilon_exact >= r(1, 1000), format!("random sequence {k}: epsilon {}", cert.epsilon))?;
        check(cert.verified_to == 200, "random sequence not verified to n = 200")?;
        check(
            min_distance_oracle(&terms, &cert.xi_exact) >= cert.epsilon_exact,
            format!("random sequence {k}: xi fails independent recheck"),
        )?;
    }
    parts.push(format!("5 random sequences, slowest {slowest:.2?}"));
    Ok(parts.join("; "))
}

fn criterion_7() -> Outcome {
    let ex = example();
    let spec = &ex.spec;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sizes = Vec::new();
    for _ in 0..20 {
        let q = rng.random_range(1..=7i64);
        let x: Vec<i64> = (0..3).map(|_| rng.random_range(0..q)).collect();
        let theta = TorusPoint::exact(
            x.iter().map(|&c| BigRational::new(BigInt::from(c), BigInt::from(q))).collect(),
        );
        let rec = rational_orbit(spec, &theta, 1 << 22).map_err(|e| e.to_string())?;
        let oracle = common::orbit_oracle(&spec.generators, x.clone(), q);
        check(rec.finite, format!("orbit of {x:?}/{q} not finite"))?;
        check(rec.size == Some(oracle.len() as u64), format!("orbit of {x:?}/{q}: size {:?} vs {}", rec.size, oracle.len()))?;
        let points: BTreeSet<Vec<i64>> = rec
            .points
            .iter()
            .map(|p| {
                p.to_rationals()
                    .iter()
                    .map(|c| (c * BigRational::from_integer(BigInt::from(q))).to_integer().to_i64().unwrap())
                    .collect()
            })
            .collect();
        check(points == oracle, format!("orbit of {x:?}/{q}: point sets differ"))?;
        sizes.push(oracle.len());
    }
    let mut worst: f64 = 1.0;
    for k in 0..5u64 {
        let mut coords = Vec::new();
        let mut used = BTreeSet::new();
        while coords.len() < 3 {
            let m: u32 = rng.random_range(2..=200);
            if m.isqrt() * m.isqrt() == m || !used.insert(m) {
                continue;
            }
            coords.push(parse_real_expr(&format!("sqrt({m})"), DEFAULT_PRECISION_BITS).unwrap());
        }
        let theta = TorusPoint::fixed_from_reals(&coords);
        let rec = density_diagnostic(spec, &theta, 1_000_000, 4, k).map_err(|e| e.to_string())?;
        let cov = rec.coverage.ok_or("no coverage")?;
        check(cov >= 0.99, format!("irrational point {k}: coverage {cov}"))?;
        worst = worst.min(cov);
    }
    Ok(format!(
        "20 rational orbits (sizes {}..{}), 5 irrational points with coverage >= {worst:.4}",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    ))
}

fn first_reducible_power(m: &IntMatrix, up_to: u32) -> Option<u32> {
    (1..=up_to).find(|&n| common::unimodular_small_reducible(&common::char_poly_oracle(&m.pow(n as i64).unwrap())))
}

fn criterion_8() -> Outcome {
    let ex = example();
    let mut battery: Vec<(String, IntMatrix, Option<u32>)> = vec![
        ("M_alpha".into(), IntMatrix::from_i64(&[[0, 0, 1], [1, 0, 2], [0, 1, -1]]), None),
        ("rot4".into(), IntMatrix::from_i64(&[[0, -1], [1, 0]]), Some(4)),
        ("rot3".into(), IntMatrix::from_i64(&[[0, -1], [1, -1]]), Some(4)),
        ("rot6".into(), IntMatrix::from_i64(&[[0, -1], [1, 1]]), Some(4)),
        ("rot4+1".into(), IntMatrix::from_i64(&[[0, -1, 0], [1, 0, 0], [0, 0, 1]]), Some(4)),
        ("cat".into(), IntMatrix::from_i64(&[[2, 1], [1, 1]]), None),
    ];
    for (i, g) in ex.spec.generators.iter().enumerate() {
        battery.push((format!("example generator {i}"), g.clone(), None));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..6 {
        let d = 2 + k % 2;
        battery.push((format!("random {k}"), random_unimodular(&mut rng, d), None));
    }
    let mut summary = Vec::new();
    for (name, m, expect_at_most) in &battery {
        let oracle = first_reducible_power(m, 12);
        if let (Some(bound), true) = (expect_at_most, oracle.is_some()) {
            check(oracle.unwrap() <= *bound, format!("{name}: oracle fails at {oracle:?}"))?;
        } else if expect_at_most.is_some() {
            return Err(format!("{name}: expected reducibility by n = 4"));
        }
        for direct in [12, 1] {
            let cert = all_powers_irreducible(m, direct).map_err(|e| e.to_string())?;
            let ok = match (oracle, cert.verdict) {
                (None, PowersVerdict::Holds) => true,
                (Some(n), PowersVerdict::FailsAtN) => cert.witness_n == Some(n),
                _ => false,
            };
            check(
                ok,
                format!("{name} (direct bound {direct}): {:?} at {:?}, oracle {oracle:?}", cert.verdict, cert.witness_n),
            )?;
        }
        summary.push(format!("{name}:{}", oracle.map_or("holds".to_string(), |n| format!("fails@{n}"))));
    }
    Ok(summary.join(" "))
}

fn run_sqd(dir: &Path, args: &[&str]) -> std::result::Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sqd"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn criterion_9() -> Outcome {
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = work.path();
    let ex = example();
    std::fs::write(dir.join("example.json"), ex.spec.to_json_pretty()).unwrap();
    std::fs::write(dir.join("cat.json"), r#"{"d": 2, "n": 1, "generators": [[[2, 1], [1, 1]]]}"#).unwrap();
    std::fs::write(dir.join("polys.json"), r#"{"polys": [["0", "sqrt(2)"], ["0", "0", "sqrt(3)/2"]]}"#).unwrap();
    let pipelines: Vec<(&str, Vec<&str>, Vec<&str>)> = vec![
        ("classify", vec!["classify", "--input", "cat.json", "--witness", "--output", "out.json"], vec!["out.json"]),
        ("classify-example", vec!["classify", "--input", "example.json", "--output", "out.json"], vec!["out.json"]),
        ("berend-check", vec!["berend-check", "--input", "example.json", "--output", "out.json"], vec!["out.json"]),
        (
            "construct-example",
            vec!["construct-example", "--poly", "-1,-2,1,1", "--output", "spec.json", "--report", "out.json"],
            vec!["spec.json", "out.json"],
        ),
        (
            "orbit-exact",
            vec!["orbit", "--input", "example.json", "--theta", "1/7,2/7,3/5", "--iters", "20000", "--output", "out.json"],
            vec!["out.json"],
        ),
        (
            "orbit-float",
            vec![
                "--seed", "11", "orbit", "--input", "example.json", "--theta", "sqrt(2),sqrt(3),sqrt(5)", "--mode", "float",
                "--iters", "20000", "--csv", "orbit.csv", "--output", "out.json",
            ],
            vec!["out.json", "orbit.csv"],
        ),
        ("cook-search", vec!["cook-search", "--polys", "polys.json", "--N", "1000", "--output", "out.json"], vec!["out.json"]),
        ("badly-approx", vec!["--seed", "5", "badly-approx", "--sequence", "random", "--output", "out.json"], vec!["out.json"]),
        ("reproduce-paper", vec!["reproduce-paper", "--output", "out.json"], vec!["out.json"]),
    ];
    for (name, args, files) in &pipelines {
        let mut runs = Vec::new();
        for _ in 0..2 {
            for f in files {
                let _ = std::fs::remove_file(dir.join(f));
            }
            let (stdout, code) = run_sqd(dir, args)?;
            check(code == 0, format!("{name}: exit code {code}"))?;
            let mut blob = stdout;
            for f in files {
                let bytes = std::fs::read(dir.join(f)).map_err(|e| format!("{name}: {f}: {e}"))?;
                check(!bytes.is_empty(), format!("{name}: {f} is empty"))?;
                blob.extend_from_slice(&bytes);
            }
            runs.push(blob);
        }
        check(runs[0] == runs[1], format!("{name}: outputs differ between runs"))?;
    }
    Ok(format!("{} pipelines byte-identical", pipelines.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("construct-example on t^3+t^2-2t-1", criterion_1),
        ("classification dichotomy", criterion_2),
        ("fixed-point count vs brute force", criterion_3),
        ("unipotent power polynomials", criterion_4),
        ("Cook decay", criterion_5),
        ("badly approximable certificates", criterion_6),
        ("orbit dichotomy probes", criterion_7),
        ("all-powers irreducibility cross-check", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
