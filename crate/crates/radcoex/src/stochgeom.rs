//! Deployment geometry, the Poisson field of base stations and the
//! circumradius law of the typical Poisson-Voronoi cell.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::antenna::{bf_gain_max, radar_gain, ArrayConfig, Pointing};
use crate::error::{invalid, Error, Result};
use crate::quad;

pub const PER_KM2: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    /// BS density in km^-2.
    pub lambda_bs: f64,
    /// Exclusion radius in m.
    pub r_exc: f64,
    pub h_bs: f64,
    pub h_rad: f64,
    /// Per-BS transmit power in W.
    pub p_bs: f64,
    pub k_users: usize,
    pub alpha: f64,
    /// Linear pathloss factor at unit distance, so the path gain is pl_ref * d^-alpha.
    pub pl_ref: f64,
    /// Carrier in GHz.
    pub f_c: f64,
    pub bs_array: ArrayConfig,
    pub rad_array: ArrayConfig,
    pub rad_point: Pointing,
}

impl Deployment {
    /// Reference scenario: 5 GHz radar at 20 m scanning (60, -10) deg, 50 m
    /// BSs with 1 W and K = 4, 10x10 arrays on both ends, 3D UMa LoS pathloss.
    pub fn reference() -> Self {
        let (h_bs, h_rad, f_c) = (50.0, 20.0, 5.0);
        Self {
            lambda_bs: 0.01,
            r_exc: 5000.0,
            h_bs,
            h_rad,
            p_bs: 1.0,
            k_users: 4,
            alpha: 4.0,
            pl_ref: uma_reference(h_bs, h_rad, f_c).expect("distinct heights"),
            f_c,
            bs_array: ArrayConfig { n_az: 10, n_el: 10 },
            rad_array: ArrayConfig { n_az: 10, n_el: 10 },
            rad_point: Pointing {
                azimuth: 60f64.to_radians(),
                elevation: (-10f64).to_radians(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.lambda_bs,
            self.r_exc,
            self.h_bs,
            self.h_rad,
            self.p_bs,
            self.alpha,
            self.pl_ref,
            self.f_c,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return invalid("deployment parameters must be finite");
        }
        if self.lambda_bs <= 0.0 {
            return invalid("lambda_bs must be positive");
        }
        if self.r_exc < 0.0 {
            return invalid("r_exc must be nonnegative");
        }
        if self.alpha <= 2.0 {
            return invalid("alpha must exceed 2");
        }
        if self.h_bs < 0.0 || self.h_rad < 0.0 {
            return invalid("antenna heights must be nonnegative");
        }
        if self.p_bs < 0.0 || self.pl_ref <= 0.0 {
            return invalid("p_bs must be nonnegative and pl_ref positive");
        }
        if self.k_users == 0 {
            return invalid("k_users must be at least 1");
        }
        ArrayConfig::new(self.bs_array.n_az, self.bs_array.n_el)?;
        ArrayConfig::new(self.rad_array.n_az, self.rad_array.n_el)?;
        Pointing::new(self.rad_point.azimuth, self.rad_point.elevation)?;
        Ok(())
    }

    /// Replaces pl_ref with the 3D UMa LoS value for the current heights and carrier.
    pub fn with_uma_reference(mut self) -> Result<Self> {
        self.pl_ref = uma_reference(self.h_bs, self.h_rad, self.f_c)?;
        Ok(self)
    }

    /// BS density in m^-2.
    pub fn density(&self) -> f64 {
        self.lambda_bs * PER_KM2
    }

    /// Large-exclusion-zone regime r_exc >= 50 max(h_bs, h_rad).
    pub fn in_regime(&self) -> bool {
        self.r_exc >= 50.0 * self.h_bs.max(self.h_rad)
    }

    pub fn regime_warning(&self) -> Option<String> {
        (!self.in_regime()).then(|| {
            format!(
                "r_exc = {} m is below 50 x max antenna height ({} m); horizon approximation is loose",
                self.r_exc,
                50.0 * self.h_bs.max(self.h_rad)
            )
        })
    }

    pub fn dh(&self) -> f64 {
        self.h_bs - self.h_rad
    }

    /// Linear path gain at ground distance r (3D distance used).
    pub fn path_gain(&self, r: f64) -> f64 {
        let d2 = r * r + self.dh() * self.dh();
        self.pl_ref * d2.powf(-0.5 * self.alpha)
    }

    pub fn aaecc_radius(&self) -> f64 {
        aaecc_radius(self.density())
    }

    /// Elevation of the lowest beam that still reaches a cell of circumradius r_c.
    pub fn phi_m(&self, r_c: f64) -> f64 {
        (self.h_bs / r_c).atan()
    }

    /// Worst-case interference from one BS at ground distance r and radar
    /// azimuth theta, serving a cell whose lowest beam elevation is phi_m.
    pub fn link_interference(&self, r: f64, theta: f64, phi_m: f64) -> f64 {
        let phi_t = (self.dh() / r).atan();
        let arrival = Pointing {
            azimuth: theta,
            elevation: -phi_t,
        };
        self.p_bs / self.k_users as f64
            * self.path_gain(r)
            * radar_gain(self.rad_array, self.rad_point, arrival)
            * bf_gain_max(self.bs_array, phi_t, phi_m)
    }

    /// Elevation parameter h_bs * sqrt(pi lambda) that controls the CBC/AAECC gap.
    pub fn elevation_parameter(&self) -> f64 {
        self.h_bs * (PI * self.density()).sqrt()
    }
}

/// Linear 3D UMa LoS pathloss coefficient at 1 m (alpha = 4 law).
pub fn uma_reference(h_bs: f64, h_rad: f64, f_c: f64) -> Result<f64> {
    let dh = h_bs - h_rad;
    if dh == 0.0 {
        return Err(Error::EqualHeights);
    }
    let db = 28.0 - 9.0 * (dh * dh).log10() + 20.0 * f_c.log10();
    Ok(10f64.powf(-db / 10.0))
}

/// 3D UMa LoS pathloss in dB at distance d (m).
pub fn pathloss_db(d: f64, dep: &Deployment) -> Result<f64> {
    if !(d > 0.0) {
        return invalid("distance must be positive");
    }
    let dh = dep.dh();
    if dh == 0.0 {
        return Err(Error::EqualHeights);
    }
    Ok(28.0 - 9.0 * (dh * dh).log10() + 20.0 * dep.f_c.log10() + 40.0 * d.log10())
}

pub fn aaecc_radius(lambda_m2: f64) -> f64 {
    1.0 / (PI * lambda_m2).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Homogeneous PPP of density `lambda` (m^-2) on the annular sector
/// r in [r_min, r_max], theta in [theta_lo, theta_hi].
pub fn sample_ppp_sector<R: Rng + ?Sized>(
    lambda: f64,
    r_min: f64,
    r_max: f64,
    theta_lo: f64,
    theta_hi: f64,
    rng: &mut R,
) -> Result<Vec<PlanarPoint>> {
    if ![lambda, r_min, r_max, theta_lo, theta_hi].iter().all(|x| x.is_finite()) {
        return invalid("sector bounds must be finite");
    }
    if !(lambda > 0.0) || r_min < 0.0 || r_min >= r_max || theta_lo >= theta_hi {
        return invalid("need lambda > 0, 0 <= r_min < r_max and theta_lo < theta_hi");
    }
    let (a2, b2) = (r_min * r_min, r_max * r_max);
    let mean = lambda * 0.5 * (theta_hi - theta_lo) * (b2 - a2);
    let count = poisson_count(mean, rng);
    let mut pts = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.random();
        let r = (a2 + u * (b2 - a2)).sqrt();
        let theta = theta_lo + (theta_hi - theta_lo) * rng.random::<f64>();
        pts.push(PlanarPoint { r, theta });
    }
    Ok(pts)
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Law F(t) of the covered fraction used by the circumradius series.
pub fn arc_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= 0.5 {
        (PI * t).sin().powi(2)
    } else {
        1.0
    }
}

/// Antiderivative of `arc_cdf` from 0.
pub fn arc_cdf_integral(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u <= 0.5 {
        0.5 * u - (2.0 * PI * u).sin() / (4.0 * PI)
    } else {
        0.25 + (u - 0.5)
    }
}

const S_MAX: f64 = 0.75;

/// Simplex averages with the exponential factor shifted by its maximum:
/// z = E[prod F(u_i) exp(c (S - 3/4))], zs = E[prod F(u_i) S exp(c (S - 3/4))],
/// S = sum G(u_i), u uniform on the (k-1)-simplex.
#[derive(Debug, Clone, Copy)]
struct SimplexMoments {
    z: f64,
    zs: f64,
}

fn simplex_moments(k: usize, c: f64, level: usize) -> SimplexMoments {
    let weight = |us: &[f64]| arc_weight(us, c);
    match k {
        0 => SimplexMoments { z: 0.0, zs: 0.0 },
        1 => SimplexMoments { z: 1.0, zs: S_MAX },
        2 => {
            let (x, w) = quad::composite(&[0.0, 0.5, 1.0], level);
            let (mut z, mut zs) = (0.0, 0.0);
            for (u, wu) in x.iter().zip(&w) {
                if let Some((a, b)) = weight(&[*u, 1.0 - u]) {
                    z += wu * a;
                    zs += wu * b;
                }
            }
            SimplexMoments { z, zs }
        }
        3 => {
            let (x, w) = quad::composite(&[0.0, 0.5, 1.0], level);
            let (mut z, mut zs) = (0.0, 0.0);
            for (u, wu) in x.iter().zip(&w) {
                let rest = 1.0 - u;
                let br = quad::breakpoints(0.0, rest, [0.5, rest - 0.5]);
                let (y, wy) = quad::composite(&br, level);
                for (v, wv) in y.iter().zip(&wy) {
                    if let Some((a, b)) = weight(&[*u, *v, rest - v]) {
                        z += wu * wv * a;
                        zs += wu * wv * b;
                    }
                }
            }
            // uniform density on the 2-simplex is 2 in these coordinates
            SimplexMoments { z: 2.0 * z, zs: 2.0 * zs }
        }
        _ => simplex_moments_qmc(k, c, 1usize << (12 + 2 * level.min(3))),
    }
}

fn arc_weight(us: &[f64], c: f64) -> Option<(f64, f64)> {
    let mut prod = 1.0;
    let mut s = 0.0;
    for &u in us {
        prod *= arc_cdf(u);
        s += arc_cdf_integral(u);
    }
    (prod > 0.0).then(|| {
        let e = prod * (c * (s - S_MAX)).exp();
        (e, e * s)
    })
}

/// Kronecker sequence on the cube mapped to the simplex by sorted spacings.
fn simplex_moments_qmc(k: usize, c: f64, n: usize) -> SimplexMoments {
    let d = k - 1;
    let mut g: f64 = 2.0;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=d).map(|j| (1.0 / g.powi(j as i32)).fract()).collect();
    let mut cuts = vec![0.0; d];
    let mut us = vec![0.0; k];
    let (mut z, mut zs) = (0.0, 0.0);
    for i in 1..=n {
        for j in 0..d {
            cuts[j] = (0.5 + alpha[j] * i as f64).fract();
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        let mut prev = 0.0;
        for j in 0..d {
            us[j] = cuts[j] - prev;
            prev = cuts[j];
        }
        us[d] = 1.0 - prev;
        if let Some((a, b)) = arc_weight(&us, c) {
            z += a;
            zs += b;
        }
    }
    SimplexMoments { z: z / n as f64, zs: zs / n as f64 }
}

const DEFAULT_LEVEL: usize = 4;

fn c_of(lambda: f64, r_c: f64) -> f64 {
    4.0 * PI * lambda * r_c * r_c
}

/// Simplex integral zeta_k taken against the uniform probability measure.
pub fn zeta_k(lambda: f64, r_c: f64, k: usize) -> Result<f64> {
    zeta_k_level(lambda, r_c, k, DEFAULT_LEVEL)
}

/// `zeta_k` with an explicit refinement level (panels per piece, or sample
/// budget for k > 3).
pub fn zeta_k_level(lambda: f64, r_c: f64, k: usize, level: usize) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let c = c_of(lambda, r_c);
    let m = simplex_moments(k, c, level.max(1));
    let v = m.z * (S_MAX * c).exp();
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("zeta_{k} overflowed at r_c = {r_c}")));
    }
    Ok(v)
}

/// Companion integral psi_k = d zeta_k / d r_c.
pub fn psi_k(lambda: f64, r_c: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let c = c_of(lambda, r_c);
    let m = simplex_moments(k, c, DEFAULT_LEVEL);
    Ok(8.0 * PI * lambda * r_c * m.zs * (S_MAX * c).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the last included series term.
    pub residual: f64,
}

fn check_lambda_r(lambda: f64, r_c: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid("density must be positive");
    }
    if !(r_c >= 0.0) || !r_c.is_finite() {
        return invalid("radius must be nonnegative");
    }
    Ok(())
}

/// Density of the circumradius of the typical Poisson-Voronoi cell,
/// series truncated after k_max terms. `lambda` in m^-2.
pub fn circumradius_pdf(lambda: f64, r_c: f64, k_max: usize) -> Result<SeriesValue> {
    check_lambda_r(lambda, r_c)?;
    let c = c_of(lambda, r_c);
    let cp = 8.0 * PI * lambda * r_c;
    let head = cp * (-c).exp();
    let scale = cp * (-0.25 * c).exp();
    let mut total = head;
    let mut last = head.abs();
    let mut prev = f64::INFINITY;
    let mut fact = 1.0;
    let mut pow = 1.0; // (-c)^(k-1)
    for k in 1..=k_max {
        let m = simplex_moments(k, c, DEFAULT_LEVEL);
        let fact_km1 = fact;
        fact *= k as f64;
        let pow_k = pow * -c;
        let term = scale * (pow_k / fact * (m.zs - m.z) - pow / fact_km1 * m.z);
        total += term;
        prev = last;
        last = term.abs();
        pow = pow_k;
    }
    if k_max >= 2 && last > prev && last > 10.0 * total.abs().max(head) {
        return Err(Error::Series(format!(
            "circumradius series dominated by its last term at r_c = {r_c} (|t_k| = {last:e})"
        )));
    }
    if !total.is_finite() {
        return Err(Error::Series(format!("non-finite circumradius density at r_c = {r_c}")));
    }
    Ok(SeriesValue {
        value: total.max(0.0),
        residual: if k_max == 0 { 0.0 } else { last },
    })
}

/// Distribution function matching `circumradius_pdf` term by term.
pub fn circumradius_cdf(lambda: f64, r_c: f64, k_max: usize) -> Result<SeriesValue> {
    check_lambda_r(lambda, r_c)?;
    let c = c_of(lambda, r_c);
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut fact = 1.0;
    let mut pow = 1.0;
    for k in 1..=k_max {
        let m = simplex_moments(k, c, DEFAULT_LEVEL);
        fact *= k as f64;
        pow *= -c;
        let term = pow / fact * m.z * (-0.25 * c).exp();
        sum += term;
        last = term.abs();
    }
    let v = 1.0 - (-c).exp() + sum;
    Ok(SeriesValue {
        value: v.clamp(0.0, 1.0),
        residual: last,
    })
}

/// Radius beyond which the circumradius tail mass is below ~1e-12.
pub fn circumradius_upper(lambda: f64) -> f64 {
    (30.0 / (PI * lambda)).sqrt()
}

/// Monte Carlo circumradii of the typical Poisson-Voronoi cell (nucleus at the
/// origin). `lambda` in m^-2.
pub fn circumradius_samples<R: Rng + ?Sized>(lambda: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || n == 0 {
        return invalid("need lambda > 0 and n >= 1");
    }
    (0..n).map(|_| voronoi_circumradius(lambda, rng)).collect()
}

/// Builds the cell of the origin by clipping a square window with the
/// bisectors of neighbours taken in order of distance.
pub fn voronoi_circumradius<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<f64> {
    let window = 10.0 / lambda.sqrt();
    let mut poly = vec![
        (-window, -window),
        (window, -window),
        (window, window),
        (-window, window),
    ];
    let mut reach = window * 2f64.sqrt();
    let mut gamma = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        gamma += e;
        let r = (gamma / (PI * lambda)).sqrt();
        if r > 2.0 * reach {
            break;
        }
        let t = 2.0 * PI * rng.random::<f64>();
        let (px, py) = (r * t.cos(), r * t.sin());
        clip_halfplane(&mut poly, px, py, 0.5 * r * r);
        reach = poly.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max);
    }
    if reach >= window * (1.0 - 1e-9) {
        return Err(Error::WindowTooSmall { reach, window });
    }
    Ok(reach)
}

/// Sutherland-Hodgman step keeping {q : q.p <= b}.
fn clip_halfplane(poly: &mut Vec<(f64, f64)>, px: f64, py: f64, b: f64) {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    let side = |q: (f64, f64)| q.0 * px + q.1 * py - b;
    for i in 0..n {
        let a = poly[i];
        let c = poly[(i + 1) % n];
        let (sa, sc) = (side(a), side(c));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa <= 0.0) != (sc <= 0.0) {
            let t = sa / (sa - sc);
            out.push((a.0 + t * (c.0 - a.0), a.1 + t * (c.1 - a.1)));
        }
    }
    *poly = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_pathloss() {
        let dep = Deployment::reference();
        assert_relative_eq!(pathloss_db(1000.0, &dep).unwrap(), 135.39, epsilon = 5e-3);
        let step = pathloss_db(2000.0, &dep).unwrap() - pathloss_db(1000.0, &dep).unwrap();
        assert_relative_eq!(step, 40.0 * 2f64.log10(), epsilon = 1e-12);
        let mut d2 = dep;
        d2.f_c = 10.0;
        let df = pathloss_db(1000.0, &d2).unwrap() - pathloss_db(1000.0, &dep).unwrap();
        assert_relative_eq!(df, 20.0 * 2f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn pathloss_linear_round_trip() {
        let dep = Deployment::reference();
        for d in [10.0f64, 733.0, 5000.0, 1e5] {
            let lin = dep.pl_ref * d.powi(-4);
            let db = pathloss_db(d, &dep).unwrap();
            assert_relative_eq!(10f64.powf(-db / 10.0), lin, max_relative = 1e-12);
        }
    }

    #[test]
    fn equal_heights_rejected() {
        let mut dep = Deployment::reference();
        dep.h_rad = dep.h_bs;
        assert_eq!(pathloss_db(100.0, &dep), Err(Error::EqualHeights));
        assert!(uma_reference(30.0, 30.0, 5.0).is_err());
    }

    #[test]
    fn aaecc_radius_values() {
        assert_relative_eq!(aaecc_radius(0.01 * PER_KM2), 5641.8958, epsilon = 1e-3);
        assert_relative_eq!(aaecc_radius(1.0 / PI * PER_KM2), 1000.0, max_relative = 1e-12);
        let r = aaecc_radius(3e-7);
        assert_relative_eq!(PI * r * r, 1.0 / 3e-7, max_relative = 1e-12);
    }

    #[test]
    fn ppp_replay_is_identical() {
        let a = sample_ppp_sector(1e-6, 0.0, 5e4, -1.0, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_ppp_sector(1e-6, 0.0, 5e4, -1.0, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(sample_ppp_sector(1.0, 2.0, 1.0, 0.0, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
        assert!(sample_ppp_sector(1.0, 0.0, f64::INFINITY, 0.0, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn void_process() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let empty = (0..100)
            .filter(|_| sample_ppp_sector(1e-30, 0.0, 1e3, 0.0, 1.0, &mut rng).unwrap().is_empty())
            .count();
        assert_eq!(empty, 100);
    }

    #[test]
    fn arc_law_integrals() {
        assert_relative_eq!(arc_cdf_integral(1.0), 0.75, epsilon = 1e-15);
        assert_relative_eq!(arc_cdf_integral(0.5), 0.25, epsilon = 1e-15);
        let r = quad::integrate(arc_cdf, 0.0, 0.5, 1e-13, 0.0).unwrap();
        assert_relative_eq!(r.value, 0.25, epsilon = 1e-13);
    }

    #[test]
    fn zeta_one_and_two() {
        let lam = 0.01 * PER_KM2;
        let r = 4000.0;
        let c = 4.0 * PI * lam * r * r;
        assert_relative_eq!(zeta_k(lam, r, 1).unwrap(), (0.75 * c).exp(), max_relative = 1e-14);
        let small = zeta_k(lam, 1e-3, 2).unwrap();
        let direct = quad::integrate(|u| arc_cdf(u) * arc_cdf(1.0 - u), 0.0, 1.0, 1e-13, 0.0).unwrap();
        assert_relative_eq!(small, direct.value, max_relative = 1e-9);
    }

    #[test]
    fn zeta_three_self_converges() {
        let lam = 1e-6;
        for r in [200.0, 500.0, 900.0] {
            let a = zeta_k_level(lam, r, 3, 3).unwrap();
            let b = zeta_k_level(lam, r, 3, 8).unwrap();
            assert!(((a - b) / b).abs() < 1e-4, "r={r} {a} {b}");
        }
    }

    #[test]
    fn zeta_quasi_random_matches_tensor_rule() {
        for c in [0.0, 3.0, 12.0] {
            let t = simplex_moments(3, c, 6);
            let q = simplex_moments_qmc(3, c, 1 << 18);
            assert!(((q.z - t.z) / t.z).abs() < 1e-3, "c={c} {} {}", q.z, t.z);
            assert!(((q.zs - t.zs) / t.zs).abs() < 1e-3);
        }
    }

    #[test]
    fn pdf_head_only() {
        let lam = 0.01 * PER_KM2;
        for r in [100.0, 3000.0, 9000.0] {
            let v = circumradius_pdf(lam, r, 0).unwrap();
            let c = 4.0 * PI * lam * r * r;
            assert_relative_eq!(v.value, 8.0 * PI * lam * r * (-c).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let lam = 1e-6;
        for r in [300.0, 700.0, 1100.0] {
            let h = 1e-3;
            let fd = (circumradius_cdf(lam, r + h, 3).unwrap().value - circumradius_cdf(lam, r - h, 3).unwrap().value)
                / (2.0 * h);
            let f = circumradius_pdf(lam, r, 3).unwrap().value;
            assert_relative_eq!(fd, f, max_relative = 1e-5);
        }
    }

    #[test]
    fn pdf_normalizes() {
        let lam = 0.01 * PER_KM2;
        let hi = circumradius_upper(lam);
        let r = quad::integrate(|x| circumradius_pdf(lam, x, 3).unwrap().value, 0.0, hi, 1e-8, 0.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-3, "{}", r.value);
    }

    #[test]
    fn voronoi_cell_is_reproducible() {
        let a = circumradius_samples(1e-6, 3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = circumradius_samples(1e-6, 3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn clip_square_by_bisector() {
        let mut p = vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        clip_halfplane(&mut p, 1.0, 0.0, 0.5);
        let xmax = p.iter().map(|q| q.0).fold(f64::MIN, f64::max);
        assert_relative_eq!(xmax, 0.5);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn link_interference_at_reference() {
        let dep = Deployment::reference();
        let i = dep.link_interference(dep.r_exc, 0.3, dep.phi_m(dep.aaecc_radius()));
        assert!(i > 0.0 && i < 1e-12);
    }
}
