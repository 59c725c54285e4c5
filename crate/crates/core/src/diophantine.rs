//! Simultaneous approximation, dip dilations and the witness search behind
//! the `rho^(1/2 - eps)` lower bound for the inscribed symmetric family.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{in_family_p, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};
use crate::geometry::Polygon;
use crate::quadrature::GaussLegendre;

/// Largest accepted scan bound `j^(n+1)` in [`dirichlet_simultaneous`].
pub const DIRICHLET_CAP: u64 = 1 << 40;

/// Largest accepted `card(A_u)`.
pub const MAX_FREQUENCIES: usize = 4_000_000;

/// Relative slack when comparing squared norms against `u^4`.
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Products `|k| L_j` closer than this (relative) are scanned once.
pub const PRODUCT_DEDUP_TOL: f64 = 1e-12;

/// Node count of the window quadrature.
const WINDOW_ORDER: usize = 64;

/// Starting value and step of the downward alpha scan in [`lower_bound_probe`].
pub const ALPHA_START: f64 = 0.45;
pub const ALPHA_STEP: f64 = 0.05;

/// `min_m |x - m|`.
pub fn distance_to_integers(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirichletResult {
    pub q: u64,
    /// False when rounding hid every valid `q`; `q` then minimizes the max distance.
    pub exact: bool,
    pub max_distance: f64,
}

fn max_distance(r: &[f64], q: u64) -> f64 {
    r.iter()
        .map(|&x| distance_to_integers(x * q as f64))
        .fold(0.0, f64::max)
}

/// Smallest `q` in `[j, j^(n+1)]` with `||r_s q|| < 1/j` for every `s`.
pub fn dirichlet_simultaneous(r: &[f64], j: u64) -> Result<DirichletResult> {
    if r.is_empty() {
        return Err(invalid("need at least one real"));
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(invalid("reals must be finite"));
    }
    if j < 2 {
        return Err(invalid(format!("j must be at least 2, got {j}")));
    }
    let hi = u32::try_from(r.len() + 1)
        .ok()
        .and_then(|e| j.checked_pow(e))
        .filter(|&h| h <= DIRICHLET_CAP)
        .ok_or_else(|| {
            Error::CostCap(format!(
                "j^(n+1) with j = {j}, n = {} exceeds 2^40",
                r.len()
            ))
        })?;
    let bound = 1.0 / j as f64;
    if let Some(q) = (j..=hi)
        .into_par_iter()
        .find_first(|&q| max_distance(r, q) < bound)
    {
        return Ok(DirichletResult {
            q,
            exact: true,
            max_distance: max_distance(r, q),
        });
    }
    let (q, d) = (j..=hi)
        .into_par_iter()
        .map(|q| (q, max_distance(r, q)))
        .reduce(
            || (u64::MAX, f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(DirichletResult {
        q,
        exact: false,
        max_distance: d,
    })
}

/// One frequency of `A_u` with its per-side membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub k: [i64; 2],
    /// `members[j]` iff `0 < L_j |k| <= u^2`.
    pub members: Vec<bool>,
}

impl FrequencyEntry {
    pub fn norm(&self) -> f64 {
        ((self.k[0] * self.k[0] + self.k[1] * self.k[1]) as f64).sqrt()
    }
}

/// `A_u = union_j A_u^j`, optionally cut to `|k| <= k_cap`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencySet {
    pub u: u64,
    pub k_cap: Option<u64>,
    /// `L_j` for the first half of the sides.
    pub big_l: Vec<f64>,
    pub entries: Vec<FrequencyEntry>,
    /// True when `k_cap` removed at least one element.
    pub truncated: bool,
}

impl FrequencySet {
    pub fn card(&self) -> usize {
        self.entries.len()
    }

    pub fn card_side(&self, j: usize) -> usize {
        self.entries.iter().filter(|e| e.members[j]).count()
    }
}

fn check_family(p: &Polygon) -> Result<()> {
    if !in_family_p(p, DEFAULT_TOL) {
        return Err(invalid("polygon must be inscribed and centrally symmetric"));
    }
    Ok(())
}

fn half_side_lengths(p: &Polygon) -> Vec<f64> {
    let n = p.len() / 2;
    (0..n).map(|h| p.side_frame(h).big_l).collect()
}

fn in_side_set(norm_sq: i64, big_l: f64, u4: f64) -> bool {
    norm_sq > 0 && big_l * big_l * norm_sq as f64 <= u4 * (1.0 + MEMBERSHIP_SLACK)
}

/// Enumerates `A_u^j = {k : 0 < L_j |k| <= u^2}` for every side pair `j`.
pub fn frequency_set(p: &Polygon, u: u64, k_cap: Option<u64>) -> Result<FrequencySet> {
    check_family(p)?;
    if u == 0 {
        return Err(invalid("u must be positive"));
    }
    let big_l = half_side_lengths(p);
    let u4 = (u as f64).powi(4);
    let min_l = big_l.iter().copied().fold(f64::INFINITY, f64::min);
    let full_radius = (u * u) as f64 / min_l * (1.0 + MEMBERSHIP_SLACK);
    let radius = match k_cap {
        Some(c) => full_radius.min(c as f64),
        None => full_radius,
    };
    let estimate = PI * (radius + 1.0).powi(2);
    if estimate > MAX_FREQUENCIES as f64 {
        return Err(Error::CostCap(format!(
            "A_u for u = {u} holds about {estimate:.3e} frequencies (cap {MAX_FREQUENCIES}); pass a k_cap"
        )));
    }
    let r = radius.floor() as i64;
    let cap_sq = k_cap.map(|c| (c * c) as i64);
    let mut entries = Vec::new();
    let mut truncated = false;
    let full = full_radius.floor() as i64;
    for a in -full..=full {
        for b in -full..=full {
            let n2 = a * a + b * b;
            let members: Vec<bool> = big_l.iter().map(|&l| in_side_set(n2, l, u4)).collect();
            if !members.iter().any(|&m| m) {
                continue;
            }
            if a.abs() > r || b.abs() > r || cap_sq.is_some_and(|c| n2 > c) {
                truncated = true;
                continue;
            }
            entries.push(FrequencyEntry { k: [a, b], members });
        }
    }
    Ok(FrequencySet {
        u,
        k_cap,
        big_l,
        entries,
        truncated,
    })
}

/// One checked constraint of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckedValue {
    pub k: [i64; 2],
    pub j: usize,
    /// `|sin(pi rho_u |k| L_j)|`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipCertificate {
    pub u: u64,
    pub rho_u: u64,
    pub bound: f64,
    pub k_cap: Option<u64>,
    pub rho_cap: u64,
    /// `L_j` used for the products.
    pub big_l: Vec<f64>,
    pub checked_set: Vec<CheckedValue>,
}

impl DipCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn max_value(&self) -> f64 {
        self.checked_set.iter().map(|c| c.value).fold(0.0, f64::max)
    }

    /// Recomputes every recorded value from `k`, `j` and `L_j`; returns the
    /// worst recomputed value when all of them are below the bound.
    pub fn revalidate(&self) -> std::result::Result<f64, String> {
        if self.rho_u < self.u {
            return Err(format!("rho_u = {} below u = {}", self.rho_u, self.u));
        }
        let bound = 1.0 / self.u as f64;
        let mut worst = 0.0f64;
        for c in &self.checked_set {
            let l = *self
                .big_l
                .get(c.j)
                .ok_or_else(|| format!("side index {} out of range", c.j))?;
            let norm = ((c.k[0] * c.k[0] + c.k[1] * c.k[1]) as f64).sqrt();
            let v = (PI * self.rho_u as f64 * norm * l).sin().abs();
            if v >= bound {
                return Err(format!(
                    "k = {:?}, j = {}: |sin| = {v} >= {bound}",
                    c.k, c.j
                ));
            }
            worst = worst.max(v);
        }
        Ok(worst)
    }
}

/// Distinct values among `xs`, merged within a relative tolerance.
fn dedup_products(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last() {
            Some(&l) if (x - l).abs() <= PRODUCT_DEDUP_TOL * x.abs().max(1.0) => {}
            _ => out.push(x),
        }
    }
    out
}

fn max_sin(rho: u64, products: &[f64]) -> f64 {
    products
        .iter()
        .map(|&x| (PI * rho as f64 * x).sin().abs())
        .fold(0.0, f64::max)
}

fn meets_bound(rho: u64, products: &[f64], u: u64) -> bool {
    let bound = 1.0 / u as f64;
    let pre = 0.5 * bound;
    products.iter().all(|&x| {
        let d = distance_to_integers(rho as f64 * x);
        // |sin(pi x)| >= 2 ||x||
        d < pre && (PI * d).sin() < bound
    })
}

/// Smallest integer `rho_u` in `[u, rho_cap]` with `|sin(pi rho_u |k| L_j)| < 1/u`
/// for every `k` of the (possibly truncated) `A_u` and every side pair `j`.
pub fn construct_dip(
    p: &Polygon,
    u: u64,
    k_cap: Option<u64>,
    rho_cap: u64,
) -> Result<DipCertificate> {
    let set = frequency_set(p, u, k_cap)?;
    if rho_cap < u {
        return Err(invalid(format!("rho_cap = {rho_cap} is below u = {u}")));
    }
    let products = dedup_products(
        set.entries
            .iter()
            .flat_map(|e| {
                let n = e.norm();
                set.big_l.iter().map(move |&l| n * l)
            })
            .collect(),
    );
    let hit = (u..=rho_cap)
        .into_par_iter()
        .find_first(|&rho| meets_bound(rho, &products, u));
    let Some(rho_u) = hit else {
        let (best_rho, best_value) = (u..=rho_cap)
            .into_par_iter()
            .map(|rho| (rho, max_sin(rho, &products)))
            .reduce(
                || (u64::MAX, f64::INFINITY),
                |a, b| {
                    if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
        return Err(Error::DipNotFound {
            u,
            lo: u,
            hi: rho_cap,
            best_rho,
            best_value,
        });
    };
    let mut checked_set = Vec::with_capacity(set.card() * set.big_l.len());
    for e in &set.entries {
        let n = e.norm();
        for (j, &l) in set.big_l.iter().enumerate() {
            checked_set.push(CheckedValue {
                k: e.k,
                j,
                value: (PI * rho_u as f64 * n * l).sin().abs(),
            });
        }
    }
    Ok(DipCertificate {
        u,
        rho_u,
        bound: 1.0 / u as f64,
        k_cap,
        rho_cap,
        big_l: set.big_l,
        checked_set,
    })
}

/// Representatives `a >= b >= 0, a > 0` in order of increasing norm, then
/// lexicographic. Every `|k|` value of `Z^2 \ {0}` occurs among them.
fn canonical_pairs(max_norm: f64) -> Vec<[i64; 2]> {
    let m = max_norm.floor() as i64;
    let lim = max_norm * max_norm * (1.0 + MEMBERSHIP_SLACK);
    let mut out: Vec<[i64; 2]> = (1..=m)
        .flat_map(|a| (0..=a).map(move |b| [a, b]))
        .filter(|k| ((k[0] * k[0] + k[1] * k[1]) as f64) <= lim)
        .collect();
    out.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0], k[1]));
    out
}

/// First canonical pair with `0 < |k| <= max_norm` and `||scale |k||| >= alpha`.
pub fn witness_search(scale: f64, max_norm: f64, alpha: f64) -> Option<[i64; 2]> {
    canonical_pairs(max_norm).into_iter().find(|k| {
        let n = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        distance_to_integers(scale * n) >= alpha
    })
}

/// Integer pair `k` of smallest norm with `0 < |k| <= rho^epsilon` and
/// `||rho |k||| >= alpha`.
pub fn ps_witness(rho: f64, epsilon: f64, alpha: f64) -> Result<Option<[i64; 2]>> {
    if !(rho.is_finite() && rho >= 1.0) {
        return Err(invalid(format!("rho must be >= 1, got {rho}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    let max_norm = rho.powf(epsilon);
    if max_norm > 1e4 {
        return Err(Error::CostCap(format!(
            "rho^epsilon = {max_norm:.3e} exceeds 1e4"
        )));
    }
    Ok(witness_search(rho, max_norm, alpha))
}

/// Enumeration oracle for [`ps_witness`]: smallest `|k|^2` over every pair of
/// the box `[-m, m]^2` meeting the norm bound and the distance condition.
pub fn witness_norm_by_enumeration(rho: f64, epsilon: f64, alpha: f64) -> Option<i64> {
    let bound = rho.powf(epsilon);
    let m = bound.floor() as i64;
    let lim = bound * bound * (1.0 + MEMBERSHIP_SLACK);
    let mut best: Option<i64> = None;
    for a in -m..=m {
        for b in -m..=m {
            let n2 = a * a + b * b;
            if n2 == 0 || n2 as f64 > lim {
                continue;
            }
            if distance_to_integers(rho * (n2 as f64).sqrt()) >= alpha
                && best.is_none_or(|x| n2 < x)
            {
                best = Some(n2);
            }
        }
    }
    best
}

/// `|k|^-4 int_0^{1/(pi rho |k|)} [sin(pi rho |k| ell sin phi) / sin phi]^2
///  sin^2(pi rho |k| L cos phi) cos^2 phi dphi`.
pub fn window_integral(ell: f64, big_l: f64, rho: f64, k_norm: f64) -> f64 {
    let s = PI * rho * k_norm;
    let gl = GaussLegendre::new(WINDOW_ORDER);
    let integral = gl.integrate(0.0, 1.0 / s, |phi| {
        let sp = phi.sin();
        let ratio = if sp.abs() < 1e-300 {
            s * ell
        } else {
            (s * ell * sp).sin() / sp
        };
        let c = phi.cos();
        let osc = (s * big_l * c).sin();
        ratio * ratio * osc * osc * c * c
    });
    integral / k_norm.powi(4)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSide {
    pub side: usize,
    pub k: [i64; 2],
    pub alpha: f64,
    pub integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub rho: f64,
    pub epsilon: f64,
    pub sides: Vec<ProbeSide>,
    /// Minimum over sides of the window integral.
    pub value: f64,
}

/// For each side pair `j`, picks `k` with `|k| <= rho^epsilon` and
/// `||rho |k| L_j|| >= alpha` (alpha scanned down from 0.45) and evaluates the
/// window integral. `None` if some side has no witness at any alpha.
pub fn lower_bound_probe(p: &Polygon, rho: f64, epsilon: f64) -> Result<Option<ProbeResult>> {
    check_family(p)?;
    if !(rho.is_finite() && rho >= 1.0) {
        return Err(invalid(format!("rho must be >= 1, got {rho}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let max_norm = rho.powf(epsilon);
    let alphas: Vec<f64> = (0..)
        .map(|i| ALPHA_START - ALPHA_STEP * i as f64)
        .take_while(|&a| a > 1e-9)
        .collect();
    let mut sides = Vec::new();
    for j in 0..p.len() / 2 {
        let f = p.side_frame(j);
        let found = alphas
            .iter()
            .find_map(|&a| witness_search(rho * f.big_l, max_norm, a).map(|k| (k, a)));
        let Some((k, alpha)) = found else {
            return Ok(None);
        };
        let n = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        sides.push(ProbeSide {
            side: j,
            k,
            alpha,
            integral: window_integral(f.ell, f.big_l, rho, n),
        });
    }
    let value = sides
        .iter()
        .map(|s| s.integral)
        .fold(f64::INFINITY, f64::min);
    Ok(Some(ProbeResult {
        rho,
        epsilon,
        sides,
        value,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_family_p;
    use crate::presets;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        assert_abs_diff_eq!(distance_to_integers(2.5), 0.5);
        assert_abs_diff_eq!(distance_to_integers(3.0), 0.0);
        assert_abs_diff_eq!(distance_to_integers(-1.3), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_simultaneous(&[0.5], 2).unwrap().q, 2);
        let r = dirichlet_simultaneous(&[2f64.sqrt()], 3).unwrap();
        assert_eq!(r.q, 3);
        assert_abs_diff_eq!(r.max_distance, 0.2426, epsilon = 1e-4);
        let r = dirichlet_simultaneous(&[2f64.sqrt(), 3f64.sqrt()], 5).unwrap();
        assert!(r.exact && (5..=125).contains(&r.q) && r.max_distance < 0.2);
        assert!(dirichlet_simultaneous(&[0.1], 1).is_err());
        assert!(dirichlet_simultaneous(&[], 3).is_err());
        assert!(matches!(
            dirichlet_simultaneous(&[0.1; 5], 1000),
            Err(Error::CostCap(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn dirichlet_guarantee(r in proptest::collection::vec(0.0f64..1.0, 1..=3), j in 2u64..=12) {
            let res = dirichlet_simultaneous(&r, j).unwrap();
            prop_assert!(res.exact);
            let hi = j.pow(r.len() as u32 + 1);
            prop_assert!(res.q >= j && res.q <= hi);
            prop_assert!(max_distance(&r, res.q) < 1.0 / j as f64);
            for q in j..res.q {
                prop_assert!(max_distance(&r, q) >= 1.0 / j as f64);
            }
        }

        #[test]
        fn witness_is_monotone_in_alpha(rho in 1.0f64..500.0, eps in 0.05f64..0.8, a1 in 0.01f64..0.49, f in 0.0f64..1.0) {
            let a2 = a1 * f;
            prop_assume!(a2 > 0.0);
            if ps_witness(rho, eps, a1).unwrap().is_some() {
                prop_assert!(ps_witness(rho, eps, a2).unwrap().is_some());
            }
        }
    }

    #[test]
    fn unit_square_frequency_set() {
        let q = presets::unit_square();
        let s = frequency_set(&q, 2, None).unwrap();
        assert_eq!(s.card(), 48);
        assert!(!s.truncated);
        for j in 0..2 {
            assert_eq!(s.card_side(j), 48);
        }
        let one = frequency_set(&q, 1, None).unwrap();
        assert_eq!(one.card(), 4);
        assert!(frequency_set(&presets::triangle(), 2, None).is_err());
    }

    #[test]
    fn frequency_card_bound() {
        for seed in 0..10 {
            let p = generate_family_p(3, 1.0, seed).unwrap();
            for u in 1..=3 {
                let s = frequency_set(&p, u, None).unwrap();
                for j in 0..3 {
                    assert!(s.card_side(j) as u64 <= 4 * u.pow(4));
                }
            }
        }
    }

    #[test]
    fn truncation_is_recorded() {
        let q = presets::unit_square();
        let s = frequency_set(&q, 3, Some(4)).unwrap();
        assert!(s.truncated);
        assert!(s.entries.iter().all(|e| e.norm() <= 4.0));
    }

    #[test]
    fn square_dip_certificate() {
        let q = presets::unit_square();
        let cert = construct_dip(&q, 2, Some(4), 10_000).unwrap();
        assert!(cert.rho_u >= 2);
        assert_eq!(cert.checked_set.len(), 48 * 2);
        assert!(cert.max_value() < 0.5);
        cert.revalidate().unwrap();
        for rho in 2..cert.rho_u {
            let products: Vec<f64> = [1.0, 2.0, 4.0, 5.0, 8.0, 9.0, 10.0, 13.0, 16.0]
                .iter()
                .map(|n: &f64| n.sqrt())
                .collect();
            assert!(max_sin(rho, &products) >= 0.5);
        }
        let back = DipCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn dip_not_found_reports_best() {
        let q = presets::unit_square();
        match construct_dip(&q, 3, Some(6), 5) {
            Err(Error::DipNotFound { best_rho, hi, .. }) => {
                assert_eq!(hi, 5);
                assert!((3..=5).contains(&best_rho));
            }
            other => panic!("expected DipNotFound, got {other:?}"),
        }
    }

    #[test]
    fn ps_witness_examples() {
        assert_eq!(ps_witness(7.5, 1.0, 0.4).unwrap(), Some([1, 0]));
        assert_eq!(ps_witness(7.0, 1.0, 0.4).unwrap(), Some([4, 4]));
        assert_eq!(ps_witness(7.0, 0.1, 0.4).unwrap(), None);
        assert!(ps_witness(0.5, 0.1, 0.4).is_err());
        assert!(ps_witness(2.0, 0.1, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn witness_matches_enumeration(rho in 1.0f64..300.0, eps in 0.05f64..0.7, alpha in 0.01f64..0.49) {
            let got = ps_witness(rho, eps, alpha).unwrap().map(|k| k[0] * k[0] + k[1] * k[1]);
            prop_assert_eq!(got, witness_norm_by_enumeration(rho, eps, alpha));
        }
    }

    #[test]
    fn window_at_half_integer_scales_linearly() {
        let ratios: Vec<f64> = [20.5, 80.5, 320.5, 1280.5]
            .iter()
            .map(|&rho| window_integral(1.0, 1.0, rho, 1.0) / rho)
            .collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0 && max / min < 1.5, "{ratios:?}");
    }

    #[test]
    fn probe_is_nonnegative() {
        let q = presets::unit_square();
        for rho in [1.0, 3.0, 7.25, 40.0, 101.5] {
            if let Some(r) = lower_bound_probe(&q, rho, 0.3).unwrap() {
                assert!(r.value >= 0.0);
                assert_eq!(r.sides.len(), 2);
            }
        }
        assert!(lower_bound_probe(&presets::triangle(), 5.0, 0.3).is_err());
    }
}
