//! Cross-oracle suites behind `polydisc verify`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polydisc::classify::{regularity_class, RegularityTag, DEFAULT_TOL};
use polydisc::diophantine::{
    construct_dip, dirichlet_simultaneous, distance_to_integers, ps_witness,
    witness_norm_by_enumeration,
};
use polydisc::discrepancy::{
    count_by_enumeration, count_lattice_points, l2_norm_direct, l2_norm_parseval,
    MotionSampleConfig, PARSEVAL_QUADRATURE_BUDGET,
};
use polydisc::fourier::{chi_hat, chi_hat_oracle, Frequency};
use polydisc::generate::{generate_convex, generate_family_p};
use polydisc::presets::preset;
use polydisc::{Polygon, Vec2};

pub const SUITES: &[&str] = &[
    "transform",
    "counting",
    "parseval",
    "dirichlet",
    "witness",
    "dip",
    "classify",
];

/// Outcome of one suite: a summary on success, the violated invariant and
/// the offending inputs on failure.
pub type Check = Result<String, String>;

fn random_polygon(rng: &mut ChaCha8Rng) -> Polygon {
    let p = if rng.gen_bool(0.3) {
        generate_family_p(rng.gen_range(2..=5), 1.0, rng.gen()).expect("generator")
    } else {
        generate_convex(rng.gen_range(3..=10), rng.gen()).expect("generator")
    };
    p.scaled_about(p.centroid(), 1.0 / p.diameter())
}

fn transform(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = random_polygon(&mut rng);
        let f = Frequency::polar(50.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
        let oracle = chi_hat_oracle(&p, f, 20).map_err(|e| e.to_string())?;
        let err = (chi_hat(&p, f) - oracle).norm();
        if err > 1e-8 {
            return Err(format!(
                "closed form disagrees with quadrature by {err:.3e} at xi = {:?} for {}",
                f.xi(),
                p.to_json()
            ));
        }
        worst = worst.max(err);
    }
    Ok(format!("200 pairs, max deviation {worst:.3e}"))
}

fn counting(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..300 {
        let p = random_polygon(&mut rng);
        let rho = rng.gen_range(1.0..50.0);
        let sigma = rng.gen_range(0.0..TAU);
        let t = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let a = count_lattice_points(&p, rho, sigma, t);
        let b = count_by_enumeration(&p, rho, sigma, t);
        if a != b {
            return Err(format!(
                "row scan {a} != enumeration {b} at rho = {rho}, sigma = {sigma}, t = {t:?} for {}",
                p.to_json()
            ));
        }
    }
    Ok("300 instances, no mismatch".into())
}

fn parseval(seed: u64) -> Check {
    let cfg = MotionSampleConfig::monte_carlo(100, 500, seed);
    let mut worst = 0.0f64;
    for name in ["square", "triangle"] {
        let p = preset(name).map_err(|e| e.to_string())?;
        for rho in [2.3, 5.3] {
            let d = l2_norm_direct(&p, rho, &cfg).map_err(|e| e.to_string())?;
            let s = l2_norm_parseval(&p, rho, 64, 64).map_err(|e| e.to_string())?;
            let diff = (d.squared() - s.squared()).abs();
            let allow = d.stderr.unwrap_or(0.0)
                + s.tail_estimate.unwrap_or(0.0)
                + PARSEVAL_QUADRATURE_BUDGET * s.squared();
            if diff > allow {
                return Err(format!(
                    "direct^2 {} and parseval^2 {} differ by {diff} > {allow} for {name} at rho = {rho}",
                    d.squared(),
                    s.squared()
                ));
            }
            worst = worst.max(diff / allow);
        }
    }
    Ok(format!("4 cases, worst |diff|/allowance {worst:.3}"))
}

fn dirichlet(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3usize);
        let j = rng.gen_range(2..=12u64);
        let r: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let res = dirichlet_simultaneous(&r, j).map_err(|e| e.to_string())?;
        let dist = |q: u64| {
            r.iter()
                .map(|&x| distance_to_integers(x * q as f64))
                .fold(0.0, f64::max)
        };
        let hi = j.pow(n as u32 + 1);
        let first = (j..=hi).find(|&q| dist(q) < 1.0 / j as f64);
        if !res.exact || first != Some(res.q) {
            return Err(format!(
                "q = {} (exact {}) but the first valid q is {first:?} for r = {r:?}, j = {j}",
                res.q, res.exact
            ));
        }
    }
    Ok("200 instances re-checked by exhaustive scan".into())
}

fn witness(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let rho = rng.gen_range(1.0..500.0);
        let eps = rng.gen_range(0.05..0.6);
        let alpha = rng.gen_range(0.01..0.49);
        let got = ps_witness(rho, eps, alpha).map_err(|e| e.to_string())?;
        let want = witness_norm_by_enumeration(rho, eps, alpha);
        if got.map(|k| k[0] * k[0] + k[1] * k[1]) != want {
            return Err(format!(
                "witness {got:?} but enumeration gives |k|^2 = {want:?} at rho = {rho}, epsilon = {eps}, alpha = {alpha}"
            ));
        }
        if got.is_some()
            && ps_witness(rho, eps, alpha / 2.0)
                .map_err(|e| e.to_string())?
                .is_none()
        {
            return Err(format!(
                "witness lost when alpha halves at rho = {rho}, epsilon = {eps}, alpha = {alpha}"
            ));
        }
    }
    Ok("200 triples re-checked by enumeration".into())
}

fn dip(_seed: u64) -> Check {
    let p = preset("square").map_err(|e| e.to_string())?;
    let cert = construct_dip(&p, 2, Some(4), 10_000).map_err(|e| e.to_string())?;
    let worst = cert
        .revalidate()
        .map_err(|e| format!("certificate for square, u = 2 fails: {e}"))?;
    Ok(format!("rho_u = {}, worst |sin| {worst:.4}", cert.rho_u))
}

fn classify(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let s = rng.gen();
        let n = rng.gen_range(2..=8);
        let p = generate_family_p(n, 1.0, s).map_err(|e| e.to_string())?;
        let tag = regularity_class(&p, DEFAULT_TOL).tag;
        if tag != RegularityTag::IrregularFamilyP {
            return Err(format!(
                "family polygon (n = {n}, seed = {s}) classified {tag}"
            ));
        }
        let n = rng.gen_range(3..=12);
        let p = generate_convex(n, s).map_err(|e| e.to_string())?;
        let tag = regularity_class(&p, DEFAULT_TOL).tag;
        if tag != RegularityTag::RegularUnpairedSide {
            return Err(format!(
                "random convex polygon (n = {n}, seed = {s}) classified {tag}"
            ));
        }
    }
    Ok("200 generated polygons".into())
}

pub fn run_suite(name: &str, seed: u64) -> Option<Check> {
    Some(match name {
        "transform" => transform(seed),
        "counting" => counting(seed),
        "parseval" => parseval(seed),
        "dirichlet" => dirichlet(seed),
        "witness" => witness(seed),
        "dip" => dip(seed),
        "classify" => classify(seed),
        _ => return None,
    })
}
