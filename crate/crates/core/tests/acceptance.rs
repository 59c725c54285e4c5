//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polydisc::classify::{regularity_class, RegularityTag, DEFAULT_TOL};
use polydisc::diophantine::{
    construct_dip, dirichlet_simultaneous, distance_to_integers, lower_bound_probe, ps_witness,
};
use polydisc::discrepancy::{
    count_lattice_points, l2_norm_direct, l2_norm_parseval, mixed_rho_grid, MotionSampleConfig,
    NormRoute, PARSEVAL_QUADRATURE_BUDGET,
};
use polydisc::fourier::{chi_hat, chi_hat_oracle, log_log_fit, spherical_sweep, Frequency};
use polydisc::generate::{generate_convex, generate_family_p};
use polydisc::presets::preset;
use polydisc::{Polygon, Vec2};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn unit_diameter(p: &Polygon) -> Polygon {
    p.scaled_about(p.centroid(), 1.0 / p.diameter())
}

fn random_polygon(rng: &mut ChaCha8Rng) -> Polygon {
    let seed = rng.gen::<u64>();
    if rng.gen_bool(0.3) {
        generate_family_p(rng.gen_range(2..=5), 1.0, seed).unwrap()
    } else {
        generate_convex(rng.gen_range(3..=10), seed).unwrap()
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut worst_at = (0, 0.0);
    for i in 0..1000 {
        let p = unit_diameter(&random_polygon(&mut rng)).translated(Vec2::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ));
        let r = 50.0 * rng.gen::<f64>().sqrt();
        let theta = if i % 10 == 0 {
            // normal to a side: exercises the removable singularity
            let f = p.side_frame(rng.gen_range(0..p.len()));
            f.nu.y.atan2(f.nu.x)
        } else {
            rng.gen_range(0.0..TAU)
        };
        let f = Frequency::polar(r, theta);
        let err = (chi_hat(&p, f) - chi_hat_oracle(&p, f, 20).unwrap()).norm();
        if err > worst {
            worst = err;
            worst_at = (i, r);
        }
    }
    outcome(
        worst <= 1e-8,
        format!(
            "max |closed - oracle| = {worst:.3e} (pair {}, |f| = {:.2}), tol 1e-8",
            worst_at.0, worst_at.1
        ),
    )
}

fn criterion_2() -> Outcome {
    let names = [
        "square",
        "triangle",
        "rect-2x1",
        "hex-sym-noncyclic",
        "pgon-family-p:4:1",
    ];
    let cfg = MotionSampleConfig::monte_carlo(200, 500, 2);
    let mut fails = Vec::new();
    let mut worst_ratio = 0.0f64;
    for name in names {
        let p = preset(name).unwrap();
        for rho in [2.3, 5.7, 11.1] {
            let d = l2_norm_direct(&p, rho, &cfg).unwrap();
            let s = l2_norm_parseval(&p, rho, 64, 64).unwrap();
            let diff = (d.squared() - s.squared()).abs();
            let allow = d.stderr.unwrap()
                + s.tail_estimate.unwrap()
                + PARSEVAL_QUADRATURE_BUDGET * s.squared();
            worst_ratio = worst_ratio.max(diff / allow);
            println!(
                "    {name:<18} rho {rho:>5}: direct^2 {:>10.5} parseval^2 {:>10.5} |diff| {:.4} <= {:.4} (stderr {:.4}, tail {:.4})",
                d.squared(),
                s.squared(),
                diff,
                allow,
                d.stderr.unwrap(),
                s.tail_estimate.unwrap()
            );
            if diff > allow {
                fails.push(format!("{name}@{rho}"));
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!(
            "{} samples per estimate, k_max 64; worst |diff|/allowance = {worst_ratio:.3}; failures: {fails:?}",
            cfg.n_sigma * cfg.n_t
        ),
    )
}

fn brute_force_count(p: &Polygon, rho: f64, sigma: f64, t: Vec2) -> u64 {
    let v: Vec<Vec2> = p
        .vertices()
        .iter()
        .map(|&x| x.rotate(sigma) * rho + t)
        .collect();
    let (mut lo, mut hi) = (
        Vec2::new(f64::INFINITY, f64::INFINITY),
        Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for q in &v {
        lo = Vec2::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Vec2::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    let mut n = 0;
    for x in (lo.x.floor() as i64 - 1)..=(hi.x.ceil() as i64 + 1) {
        for y in (lo.y.floor() as i64 - 1)..=(hi.y.ceil() as i64 + 1) {
            let z = Vec2::new(x as f64, y as f64);
            let inside = (0..v.len()).all(|h| {
                let (a, b) = (v[h], v[(h + 1) % v.len()]);
                (b - a).cross(z - a) / (b - a).norm() >= -1e-9
            });
            if inside {
                n += 1;
            }
        }
    }
    n
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let fixed = ["unit-square", "square", "triangle", "rect-2x1"];
    for i in 0..1000 {
        let (p, rho, sigma, t) = if i < 100 {
            // lattice-aligned boundaries
            let p = preset(fixed[i % fixed.len()]).unwrap();
            let rho = rng.gen_range(1..=50) as f64;
            let sigma = [0.0, PI / 2.0, PI][i % 3];
            let t = Vec2::new(rng.gen_range(-2..=2) as f64, rng.gen_range(-2..=2) as f64);
            (p, rho, sigma, t)
        } else {
            let p = unit_diameter(&random_polygon(&mut rng));
            let rho = rng.gen_range(1.0..50.0);
            let sigma = rng.gen_range(0.0..TAU);
            let t = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            (p, rho, sigma, t)
        };
        if count_lattice_points(&p, rho, sigma, t) != brute_force_count(&p, rho, sigma, t) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches in 1000 instances"),
    )
}

const TEST_POLYGONS: [&str; 8] = [
    "square",
    "unit-square",
    "triangle",
    "rect-2x1",
    "trapezoid",
    "hex-sym-noncyclic",
    "hex-equiangular",
    "pgon-family-p:4:1",
];

/// 32 integers and 32 `m + golden offset` values, log-spaced over `[1, 200]`.
fn bound_grid() -> Vec<f64> {
    let all = mixed_rho_grid(1.0, 200.0);
    let mut ints: Vec<f64> = Vec::new();
    let mut irr: Vec<f64> = Vec::new();
    for i in 0..40 {
        let target = 200f64.powf(i as f64 / 39.0);
        let best = |want_int: bool| {
            all.iter()
                .copied()
                .filter(|r| (r.fract() == 0.0) == want_int)
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                .unwrap()
        };
        for (want, dst) in [(true, &mut ints), (false, &mut irr)] {
            let r = best(want);
            if !dst.contains(&r) {
                dst.push(r);
            }
        }
    }
    let mut g: Vec<f64> = ints.into_iter().chain(irr).collect();
    g.sort_by(f64::total_cmp);
    g
}

fn normalized_series(name: &str, grid: &[f64]) -> Vec<(f64, f64)> {
    let p = preset(name).unwrap();
    let route = NormRoute::Direct(MotionSampleConfig::monte_carlo(16, 256, 4));
    grid.iter()
        .map(|&rho| {
            (
                rho,
                polydisc::discrepancy::normalized_norm(&p, rho, &route).unwrap(),
            )
        })
        .collect()
}

fn envelope_slope(series: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in 0..bins {
        let a = lo * (hi / lo).powf(b as f64 / bins as f64);
        let c = lo * (hi / lo).powf((b + 1) as f64 / bins as f64);
        let pts: Vec<&(f64, f64)> = series
            .iter()
            .filter(|(r, _)| *r >= a && (*r < c || (b + 1 == bins && *r <= c)))
            .collect();
        if let Some(m) = pts.iter().max_by(|x, y| x.1.total_cmp(&y.1)) {
            xs.push(m.0);
            ys.push(m.1);
        }
    }
    log_log_fit(&xs, &ys).unwrap().slope
}

fn criteria_4_5() -> (Outcome, Outcome) {
    let grid = bound_grid();
    let mut ok4 = true;
    let mut ok5 = true;
    let mut lines4 = Vec::new();
    let mut lines5 = Vec::new();
    for name in TEST_POLYGONS {
        let s = normalized_series(name, &grid);
        let max = s.iter().map(|x| x.1).fold(0.0, f64::max);
        let slope = envelope_slope(&s, 1.0, 200.0, 8);
        let good = max.is_finite() && slope <= 0.05;
        ok4 &= good;
        lines4.push(format!("{name}: max {max:.3}, envelope slope {slope:+.3}"));
        if ["triangle", "trapezoid", "hex-sym-noncyclic"].contains(&name) {
            let mut v: Vec<f64> = s.iter().filter(|x| x.0 >= 10.0).map(|x| x.1).collect();
            v.sort_by(f64::total_cmp);
            let ratio = v[0] / v[v.len() / 2];
            ok5 &= ratio >= 0.2;
            lines5.push(format!("{name}: min/median {ratio:.3}"));
        }
    }
    for l in &lines4 {
        println!("    {l}");
    }
    (
        outcome(
            ok4,
            format!(
                "{} rho values in [1, 200]; {}",
                grid.len(),
                if ok4 { "bounded" } else { "divergence trend" }
            ),
        ),
        outcome(ok5, lines5.join("; ")),
    )
}

fn criterion_6() -> Outcome {
    let p = preset("unit-square").unwrap();
    let ns: Vec<f64> = (8..=512).map(|n| n as f64).collect();
    let rows = spherical_sweep(&p, &ns).unwrap();
    let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let fit = log_log_fit(&ns, &vals).unwrap();
    outcome(
        fit.slope <= -1.6,
        format!("slope {:.4} over n = 8..512 (threshold -1.6)", fit.slope),
    )
}

fn criterion_7() -> Outcome {
    let p = preset("triangle").unwrap();
    let rhos: Vec<f64> = (0..200)
        .map(|i| 4.0 * 100f64.powf(i as f64 / 199.0))
        .collect();
    let rows = spherical_sweep(&p, &rhos).unwrap();
    let scaled: Vec<f64> = rows.iter().map(|r| r.rho.powf(1.5) * r.value).collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        max / min <= 20.0,
        format!(
            "rho^1.5 * average in [{min:.4}, {max:.4}], max/min {:.3} (threshold 20)",
            max / min
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=3usize);
        let j = rng.gen_range(2..=12u64);
        let r: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let res = dirichlet_simultaneous(&r, j).unwrap();
        let hi = j.pow(n as u32 + 1);
        let dist = |q: u64| {
            r.iter()
                .map(|&x| distance_to_integers(x * q as f64))
                .fold(0.0, f64::max)
        };
        let smallest = (j..=hi).find(|&q| dist(q) < 1.0 / j as f64);
        let good = res.exact
            && (j..=hi).contains(&res.q)
            && dist(res.q) < 1.0 / j as f64
            && smallest == Some(res.q);
        if !good {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad} of 500 results violate the guarantee"),
    )
}

fn dip_check(name: &str, k_cap: u64) -> (bool, String) {
    let p = preset(name).unwrap();
    let cert = match construct_dip(&p, 2, Some(k_cap), 10_000) {
        Ok(c) => c,
        Err(e) => return (false, format!("{name}: no certificate: {e}")),
    };
    let route = NormRoute::Direct(MotionSampleConfig::monte_carlo(64, 1000, 9));
    let nn = |rho: f64| polydisc::discrepancy::normalized_norm(&p, rho, &route).unwrap();
    let at = nn(cert.rho_u as f64);
    let mut around: Vec<f64> = [0.05, 0.15, 0.25, 0.35]
        .iter()
        .flat_map(|&d| [cert.rho_u as f64 - d, cert.rho_u as f64 + d])
        .map(nn)
        .collect();
    around.sort_by(f64::total_cmp);
    let median = 0.5 * (around[3] + around[4]);
    let visibility = format!(
        "visibility (non-gating) {at:.4} vs median {median:.4}, {}",
        if at < median {
            "dip visible"
        } else {
            "no visible dip"
        }
    );
    match cert.revalidate() {
        Ok(worst) => (
            true,
            format!(
                "{name}: rho_u = {}, {} values, worst recomputed |sin| {worst:.4} < 0.5, {visibility}",
                cert.rho_u,
                cert.checked_set.len()
            ),
        ),
        Err(e) => (false, format!("{name}: revalidation failed: {e}")),
    }
}

fn criterion_9() -> Outcome {
    let (a, da) = dip_check("square", 4);
    let (b, db) = dip_check("unit-square", 4);
    outcome(a && b, format!("{da}; {db}"))
}

fn criterion_10() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    let mut found = 0;
    for _ in 0..200 {
        let rho = if rng.gen_bool(0.3) {
            rng.gen_range(1..=500) as f64
        } else {
            rng.gen_range(1.0..500.0)
        };
        let eps = rng.gen_range(0.05..0.6);
        let alpha = rng.gen_range(0.01..0.49);
        let got = ps_witness(rho, eps, alpha).unwrap();
        let bound = rho.powf(eps);
        let m = bound.floor() as i64;
        // exhaustive: every pair in the full box, smallest admissible norm
        let mut best: Option<i64> = None;
        for a in -m..=m {
            for b in -m..=m {
                let n2 = a * a + b * b;
                if n2 == 0 || (n2 as f64) > bound * bound * (1.0 + 1e-12) {
                    continue;
                }
                if distance_to_integers(rho * (n2 as f64).sqrt()) >= alpha
                    && best.is_none_or(|x| n2 < x)
                {
                    best = Some(n2);
                }
            }
        }
        let ok = match (got, best) {
            (None, None) => true,
            (Some(k), Some(n2)) => {
                found += 1;
                let kn2 = k[0] * k[0] + k[1] * k[1];
                kn2 == n2 && distance_to_integers(rho * (kn2 as f64).sqrt()) >= alpha
            }
            _ => false,
        };
        if !ok {
            bad += 1;
        }
    }
    let c10a = outcome(
        bad == 0,
        format!("{bad} of 200 witnesses disagree with enumeration ({found} non-empty)"),
    );

    let q = preset("unit-square").unwrap();
    let rhos: Vec<f64> = (0..40)
        .map(|i| 20.0 * 100f64.powf(i as f64 / 39.0))
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &rho in &rhos {
        if let Some(r) = lower_bound_probe(&q, rho, 0.3).unwrap() {
            xs.push(rho);
            ys.push(r.value);
        }
    }
    let c10b = if xs.len() < 8 {
        outcome(
            false,
            format!(
                "probe found witnesses at only {} of {} rho values",
                xs.len(),
                rhos.len()
            ),
        )
    } else {
        let slope = log_log_fit(&xs, &ys).unwrap().slope;
        outcome(
            slope >= 0.6,
            format!(
                "probe growth exponent {slope:.4} over {} rho values in [20, 2000] (threshold 0.6)",
                xs.len()
            ),
        )
    };
    (c10a, c10b)
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = Vec::new();
    for i in 0..250 {
        let n = rng.gen_range(2..=8);
        let p = generate_family_p(n, rng.gen_range(0.5..3.0), rng.gen()).unwrap();
        if regularity_class(&p, DEFAULT_TOL).tag != RegularityTag::IrregularFamilyP {
            bad.push(format!("family#{i}"));
        }
    }
    for i in 0..250 {
        let p = generate_convex(rng.gen_range(3..=12), rng.gen()).unwrap();
        if regularity_class(&p, DEFAULT_TOL).tag != RegularityTag::RegularUnpairedSide {
            bad.push(format!("convex#{i}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} mismatches in 500 polygons {:?}", bad.len(), bad),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let mut run = |f: &mut dyn FnMut() -> Vec<Outcome>, names: &[&'static str]| {
        let start = Instant::now();
        let outs = f();
        let secs = start.elapsed().as_secs_f64();
        for (name, o) in names.iter().zip(outs) {
            println!(
                "[{}] {name}: {} ({secs:.1}s)",
                if o.pass { "PASS" } else { "FAIL" },
                o.detail
            );
            results.push((name, o, secs));
        }
    };
    run(
        &mut || vec![criterion_1()],
        &["1 closed form vs quadrature"],
    );
    run(&mut || vec![criterion_2()], &["2 Parseval identity"]);
    run(&mut || vec![criterion_3()], &["3 exact counting"]);
    run(
        &mut || {
            let (a, b) = criteria_4_5();
            vec![a, b]
        },
        &["4 upper bound", "5 regularity separation"],
    );
    run(
        &mut || vec![criterion_6()],
        &["6 square decay along integers"],
    );
    run(&mut || vec![criterion_7()], &["7 triangle decay bracket"]);
    run(
        &mut || vec![criterion_8()],
        &["8 simultaneous approximation"],
    );
    run(&mut || vec![criterion_9()], &["9 dip certificate"]);
    run(
        &mut || {
            let (a, b) = criterion_10();
            vec![a, b]
        },
        &["10a witness enumeration", "10b probe growth"],
    );
    run(&mut || vec![criterion_11()], &["11 classification"]);
    let failed = results.iter().filter(|r| !r.1.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
