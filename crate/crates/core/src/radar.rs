//! Radar tracks: simulation from a known orbit, Gaussian noise, reduction to
//! an attributable, and the plain-text track file format.
//!
//! # Track file format
//!
//! Comma-separated, one observation per line, columns in this order:
//!
//! ```text
//! mjd, rho_km, alpha_deg, delta_deg, station_id
//! ```
//!
//! Lines starting with `#` are comments, except `# station <id> <lat_deg>
//! <lon_deg> <radius_km>` which declares a station (geocentric latitude,
//! longitude east of the reference meridian, geocentric radius). Numbers are
//! written in shortest round-trip form (at most 17 significant digits); the
//! epoch is written as the integer MJD followed by the round-trip digits of
//! the day fraction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::elements::{state_at, KeplerianElements};
use crate::frame::{direction_frame, wrap_pi, wrap_two_pi, SphericalDirection};
use crate::observer::{station_state, ObserverState, StationSpec};
use crate::time::Epoch;
use crate::{Error, Result, Vec3};

/// One `(t, ρ, α, δ)` measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarObservation {
    pub epoch: Epoch,
    /// Range, km.
    pub rho: f64,
    pub dir: SphericalDirection,
}

/// Equally spaced observations of one pass from one station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarTrack {
    pub station: StationSpec,
    pub obs: Vec<RadarObservation>,
}

impl RadarTrack {
    /// Constant spacing in seconds, if the epochs are equally spaced to 1e-9 s.
    pub fn spacing(&self) -> Option<f64> {
        let first = self.obs.first()?;
        let second = self.obs.get(1)?;
        let dt = second.epoch.seconds_since(&first.epoch);
        self.obs
            .windows(2)
            .all(|w| (w[1].epoch.seconds_since(&w[0].epoch) - dt).abs() < 1e-9)
            .then_some(dt)
    }

    /// Geocentric positions `q_j + ρ_j e^ρ_j` of the observations.
    pub fn positions(&self) -> Vec<Vec3> {
        self.obs
            .iter()
            .map(|o| station_state(&self.station, o.epoch).q + o.rho * o.dir.unit_vector())
            .collect()
    }
}

/// RMS of the Gaussian errors added to a track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma_alpha_deg: f64,
    pub sigma_delta_deg: f64,
    pub sigma_rho_km: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn zero() -> Self {
        NoiseSpec { sigma_alpha_deg: 0.0, sigma_delta_deg: 0.0, sigma_rho_km: 0.0, seed: 0 }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        NoiseSpec { seed, ..self }
    }
}

/// Interpolated summary of one track plus the observer state at its mean
/// epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attributable {
    pub t_bar: Epoch,
    pub alpha_bar: f64,
    pub delta_bar: f64,
    /// km
    pub rho: f64,
    /// km/s
    pub rho_dot: f64,
    /// km/s²
    pub rho_ddot: f64,
    pub observer: ObserverState,
    pub station: StationSpec,
}

impl Attributable {
    pub fn new(
        t_bar: Epoch,
        alpha_bar: f64,
        delta_bar: f64,
        rho: f64,
        rho_dot: f64,
        rho_ddot: f64,
        station: StationSpec,
    ) -> Result<Self> {
        station.validate()?;
        let dir = SphericalDirection::new(alpha_bar, delta_bar)?;
        if !(rho > 0.0) || !rho_dot.is_finite() || !rho_ddot.is_finite() {
            return Err(Error::InvalidInput(format!("bad range channel ({rho}, {rho_dot}, {rho_ddot})")));
        }
        Ok(Attributable {
            t_bar,
            alpha_bar: dir.alpha,
            delta_bar: dir.delta,
            rho,
            rho_dot,
            rho_ddot,
            observer: station_state(&station, t_bar),
            station,
        })
    }
}

/// Exact topocentric quantities of a Keplerian orbit seen from a station.
#[derive(Debug, Clone, Copy)]
pub struct TopocentricTruth {
    pub dir: SphericalDirection,
    pub rho: f64,
    pub rho_dot: f64,
    pub rho_ddot: f64,
    /// `ρ α̇ cos δ`, km/s.
    pub xi: f64,
    /// `ρ δ̇`, km/s.
    pub zeta: f64,
    pub r: Vec3,
    pub v: Vec3,
}

pub fn topocentric_truth(el: &KeplerianElements, station: &StationSpec, t: Epoch, mu: f64) -> Result<TopocentricTruth> {
    let st = state_at(el, t, mu)?;
    let obs = station_state(station, t);
    let s = st.r - obs.q;
    let s_dot = st.v - obs.q_dot;
    let rn = st.r.norm();
    let s_ddot = -mu / (rn * rn * rn) * st.r - obs.q_ddot;
    let rho = s.norm();
    let rho_dot = s.dot(&s_dot) / rho;
    let rho_ddot = (s_dot.norm_squared() + s.dot(&s_ddot) - rho_dot * rho_dot) / rho;
    let dir = SphericalDirection::from_vector(&s)?;
    let f = direction_frame(dir)?;
    Ok(TopocentricTruth {
        dir,
        rho,
        rho_dot,
        rho_ddot,
        xi: s_dot.dot(&f.e_alpha),
        zeta: s_dot.dot(&f.e_delta),
        r: st.r,
        v: st.v,
    })
}

/// Noise-free attributable with exact angles and range channel at `t_bar`.
pub fn exact_attributable(el: &KeplerianElements, station: &StationSpec, t_bar: Epoch, mu: f64) -> Result<Attributable> {
    let t = topocentric_truth(el, station, t_bar, mu)?;
    Attributable::new(t_bar, t.dir.alpha, t.dir.delta, t.rho, t.rho_dot, t.rho_ddot, station.clone())
}

/// Simulates `n` noise-free observations spaced `dt` seconds and centred on
/// `t_bar`.
pub fn simulate_track(
    el: &KeplerianElements,
    station: &StationSpec,
    t_bar: Epoch,
    n: usize,
    dt: f64,
    mu: f64,
) -> Result<RadarTrack> {
    if n == 0 || !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("need n ≥ 1 and dt > 0 (n={n}, dt={dt})")));
    }
    station.validate()?;
    let half = (n as f64 - 1.0) / 2.0;
    let mut obs = Vec::with_capacity(n);
    for j in 0..n {
        let epoch = t_bar.add_seconds((j as f64 - half) * dt);
        let st = state_at(el, epoch, mu)?;
        let q = station_state(station, epoch).q;
        let s = st.r - q;
        let rho = s.norm();
        if s.dot(&q) <= 0.0 {
            return Err(Error::BelowHorizon { mjd: epoch.mjd() });
        }
        obs.push(RadarObservation { epoch, rho, dir: SphericalDirection::from_vector(&s)? });
    }
    Ok(RadarTrack { station: station.clone(), obs })
}

/// Adds independent zero-mean Gaussian errors to α, δ and ρ.
///
/// The generator is `ChaCha8Rng::seed_from_u64(noise.seed)`; for each
/// observation in order three standard normals are drawn (α, δ, ρ) and scaled
/// by the corresponding sigma. Draws are consumed even for zero sigmas, and a
/// zero-sigma channel is left bit-identical.
pub fn add_noise(track: &RadarTrack, noise: &NoiseSpec) -> RadarTrack {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let sa = noise.sigma_alpha_deg.to_radians();
    let sd = noise.sigma_delta_deg.to_radians();
    let obs = track
        .obs
        .iter()
        .map(|o| {
            let za: f64 = StandardNormal.sample(&mut rng);
            let zd: f64 = StandardNormal.sample(&mut rng);
            let zr: f64 = StandardNormal.sample(&mut rng);
            let mut alpha = o.dir.alpha;
            let mut delta = o.dir.delta;
            let mut rho = o.rho;
            if sa != 0.0 {
                alpha = wrap_two_pi(alpha + sa * za);
            }
            if sd != 0.0 {
                delta += sd * zd;
                // Reflect through the pole.
                if delta.abs() > std::f64::consts::FRAC_PI_2 {
                    delta = delta.signum() * std::f64::consts::PI - delta;
                    alpha = wrap_two_pi(alpha + std::f64::consts::PI);
                }
            }
            if noise.sigma_rho_km != 0.0 {
                rho += noise.sigma_rho_km * zr;
            }
            RadarObservation { epoch: o.epoch, rho, dir: SphericalDirection { alpha, delta } }
        })
        .collect();
    RadarTrack { station: track.station.clone(), obs }
}

/// Least-squares quadratic `c0 + c1 τ + c2 τ²` through `(τ_j, y_j)`.
pub fn quadratic_fit(tau: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if tau.len() != y.len() || tau.len() < 3 {
        return Err(Error::TooFewObservations { n: tau.len().min(y.len()), min: 3 });
    }
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (&t, &v) in tau.iter().zip(y) {
        let basis = Vector3::new(1.0, t, t * t);
        normal += basis * basis.transpose();
        rhs += basis * v;
    }
    let c = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("degenerate epochs in quadratic fit".into()))?;
    Ok([c[0], c[1], c[2]])
}

/// Reduces a track to `(t̄, ᾱ, δ̄, ρ, ρ̇, ρ̈)`.
///
/// `t̄`, `ᾱ`, `δ̄` are plain means (α unwrapped around the first value); the
/// range channel comes from a quadratic fit in `t − t̄`.
pub fn interpolate_track(track: &RadarTrack) -> Result<Attributable> {
    let n = track.obs.len();
    if n < 3 {
        return Err(Error::TooFewObservations { n, min: 3 });
    }
    if n == 3 {
        log::warn!("track with 3 observations: range fit is exactly determined");
    }
    let epochs: Vec<Epoch> = track.obs.iter().map(|o| o.epoch).collect();
    let t_bar = Epoch::mean(&epochs).expect("non-empty");
    let a0 = track.obs[0].dir.alpha;
    let alpha_bar = track.obs.iter().map(|o| a0 + wrap_pi(o.dir.alpha - a0)).sum::<f64>() / n as f64;
    let delta_bar = track.obs.iter().map(|o| o.dir.delta).sum::<f64>() / n as f64;
    let tau: Vec<f64> = epochs.iter().map(|e| e.seconds_since(&t_bar)).collect();
    let rho: Vec<f64> = track.obs.iter().map(|o| o.rho).collect();
    let [c0, c1, c2] = quadratic_fit(&tau, &rho)?;
    Attributable::new(t_bar, wrap_two_pi(alpha_bar), delta_bar, c0, c1, 2.0 * c2, track.station.clone())
}

/// Replaces the range channel with exact values from the true orbit, keeping
/// the interpolated angles.
pub fn with_exact_range(att: &Attributable, el: &KeplerianElements, mu: f64) -> Result<Attributable> {
    let t = topocentric_truth(el, &att.station, att.t_bar, mu)?;
    Ok(Attributable { rho: t.rho, rho_dot: t.rho_dot, rho_ddot: t.rho_ddot, ..att.clone() })
}

pub fn write_track(track: &RadarTrack) -> String {
    let s = &track.station;
    let mut out = String::new();
    out.push_str("# debris-linker radar track\n");
    out.push_str("# columns: mjd, rho_km, alpha_deg, delta_deg, station_id\n");
    let _ = writeln!(
        out,
        "# station {} {} {} {}",
        s.name,
        s.latitude.to_degrees(),
        s.longitude.to_degrees(),
        s.radius
    );
    for o in &track.obs {
        let _ = writeln!(
            out,
            "{}, {}, {}, {}, {}",
            o.epoch,
            o.rho,
            o.dir.alpha.to_degrees(),
            o.dir.delta.to_degrees(),
            s.name
        );
    }
    out
}

pub fn parse_track(text: &str) -> Result<RadarTrack> {
    let mut stations: BTreeMap<String, StationSpec> = BTreeMap::new();
    let mut rows: Vec<(usize, RadarObservation, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let perr = |message: String| Error::Parse { line: line_no, message };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut it = comment.split_whitespace();
            if it.next() == Some("station") {
                let f: Vec<&str> = it.collect();
                if f.len() != 4 {
                    return Err(perr("station line needs: id lat_deg lon_deg radius_km".into()));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|_| perr(format!("bad number '{s}'")));
                let spec = StationSpec::from_degrees(f[0], num(f[1])?, num(f[2])?, num(f[3])?)
                    .map_err(|e| perr(e.to_string()))?;
                stations.insert(f[0].to_string(), spec);
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(perr(format!("expected 5 columns, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(format!("bad number '{s}'")));
        let epoch: Epoch = f[0].parse().map_err(|e: Error| perr(e.to_string()))?;
        let rho = num(f[1])?;
        if !(rho > 0.0) {
            return Err(perr(format!("range must be positive, got {rho}")));
        }
        let dir = SphericalDirection::new(num(f[2])?.to_radians(), num(f[3])?.to_radians())
            .map_err(|e| perr(e.to_string()))?;
        rows.push((line_no, RadarObservation { epoch, rho, dir }, f[4].to_string()));
    }
    let Some((_, _, id)) = rows.first() else {
        return Err(Error::Parse { line: 0, message: "track file has no observations".into() });
    };
    let station = stations
        .get(id)
        .cloned()
        .ok_or_else(|| Error::Parse { line: rows[0].0, message: format!("undeclared station '{id}'") })?;
    if let Some((line, _, other)) = rows.iter().find(|(_, _, s)| s != id) {
        return Err(Error::Parse { line: *line, message: format!("mixed stations '{id}' and '{other}'") });
    }
    Ok(RadarTrack { station, obs: rows.into_iter().map(|(_, o, _)| o).collect() })
}

/// JSON form of an [`Attributable`]; the observer state is recomputed on
/// load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributableRecord {
    pub t_bar: Epoch,
    pub alpha_deg: f64,
    pub delta_deg: f64,
    pub rho_km: f64,
    pub rho_dot_km_s: f64,
    pub rho_ddot_km_s2: f64,
    pub station: String,
    pub station_lat_deg: f64,
    pub station_lon_deg: f64,
    pub station_radius_km: f64,
}

impl From<&Attributable> for AttributableRecord {
    fn from(a: &Attributable) -> Self {
        AttributableRecord {
            t_bar: a.t_bar,
            alpha_deg: a.alpha_bar.to_degrees(),
            delta_deg: a.delta_bar.to_degrees(),
            rho_km: a.rho,
            rho_dot_km_s: a.rho_dot,
            rho_ddot_km_s2: a.rho_ddot,
            station: a.station.name.clone(),
            station_lat_deg: a.station.latitude.to_degrees(),
            station_lon_deg: a.station.longitude.to_degrees(),
            station_radius_km: a.station.radius,
        }
    }
}

impl AttributableRecord {
    pub fn to_attributable(&self) -> Result<Attributable> {
        let station = StationSpec::from_degrees(&self.station, self.station_lat_deg, self.station_lon_deg, self.station_radius_km)?;
        Attributable::new(
            self.t_bar,
            self.alpha_deg.to_radians(),
            self.delta_deg.to_radians(),
            self.rho_km,
            self.rho_dot_km_s,
            self.rho_ddot_km_s2,
            station,
        )
    }
}

pub fn write_attributable(att: &Attributable) -> String {
    let mut s = serde_json::to_string_pretty(&AttributableRecord::from(att)).expect("attributable serialises");
    s.push('\n');
    s
}

pub fn parse_attributable(text: &str) -> Result<Attributable> {
    let rec: AttributableRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    rec.to_attributable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MU_EARTH;

    pub(crate) fn reference_orbit() -> KeplerianElements {
        KeplerianElements::reference()
    }

    fn track1() -> RadarTrack {
        simulate_track(&reference_orbit(), &StationSpec::reference(), Epoch::from_mjd(54127.155035), 4, 10.0, MU_EARTH)
            .unwrap()
    }

    #[test]
    fn reference_scheduling_spans_thirty_seconds() {
        let tr = track1();
        assert_eq!(tr.obs.len(), 4);
        assert!((tr.obs[3].epoch.seconds_since(&tr.obs[0].epoch) - 30.0).abs() < 1e-9);
        assert!((tr.spacing().unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn positions_invert_the_observations() {
        let tr = track1();
        for (o, r) in tr.obs.iter().zip(tr.positions()) {
            let truth = state_at(&reference_orbit(), o.epoch, MU_EARTH).unwrap().r;
            assert!((r - truth).norm() < 1e-10, "{}", (r - truth).norm());
        }
    }

    #[test]
    fn below_horizon_is_reported() {
        // Half a day later the object is on the far side for this station.
        let err = simulate_track(&reference_orbit(), &StationSpec::reference(), Epoch::from_mjd(54127.40), 4, 10.0, MU_EARTH);
        assert!(matches!(err, Err(Error::BelowHorizon { .. })), "{err:?}");
    }

    #[test]
    fn zero_noise_is_identity() {
        let tr = track1();
        assert_eq!(add_noise(&tr, &NoiseSpec::zero().with_seed(9)), tr);
    }

    #[test]
    fn range_channel_untouched_when_sigma_zero() {
        let tr = track1();
        let noisy = add_noise(&tr, &NoiseSpec { sigma_alpha_deg: 0.2, sigma_delta_deg: 0.2, sigma_rho_km: 0.0, seed: 3 });
        for (a, b) in tr.obs.iter().zip(&noisy.obs) {
            assert_eq!(a.rho.to_bits(), b.rho.to_bits());
            assert_ne!(a.dir.alpha, b.dir.alpha);
        }
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let tr = track1();
        let spec = NoiseSpec { sigma_alpha_deg: 0.1, sigma_delta_deg: 0.1, sigma_rho_km: 0.005, seed: 77 };
        assert_eq!(add_noise(&tr, &spec), add_noise(&tr, &spec));
        assert_ne!(add_noise(&tr, &spec), add_noise(&tr, &spec.with_seed(78)));
    }

    #[test]
    fn empirical_alpha_sigma() {
        // 10⁴ samples of the injected α error; δ kept away from the pole.
        let base = RadarObservation {
            epoch: Epoch::from_mjd(54127.0),
            rho: 1000.0,
            dir: SphericalDirection { alpha: 1.0, delta: 0.1 },
        };
        let tr = RadarTrack { station: StationSpec::reference(), obs: vec![base; 10_000] };
        let noisy = add_noise(&tr, &NoiseSpec { sigma_alpha_deg: 0.2, sigma_delta_deg: 0.0, sigma_rho_km: 0.0, seed: 5 });
        let errs: Vec<f64> = noisy.obs.iter().map(|o| wrap_pi(o.dir.alpha - 1.0).to_degrees()).collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let sd = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (errs.len() - 1) as f64).sqrt();
        assert!((sd / 0.2 - 1.0).abs() < 0.05, "sd = {sd}");
    }

    #[test]
    fn quadratic_fit_reproduces_polynomial() {
        let tau = [-15.0, -5.0, 5.0, 15.0];
        let y: Vec<f64> = tau.iter().map(|t| 1984.4 - 0.85 * t + 0.0078 * t * t).collect();
        let c = quadratic_fit(&tau, &y).unwrap();
        assert!((c[0] - 1984.4).abs() < 1e-12 * 1984.4);
        assert!((c[1] + 0.85).abs() < 1e-12);
        assert!((c[2] - 0.0078).abs() < 1e-12);
    }

    #[test]
    fn alpha_mean_across_wrap() {
        let mk = |a: f64| RadarObservation {
            epoch: Epoch::from_mjd(54127.0),
            rho: 1000.0,
            dir: SphericalDirection { alpha: wrap_two_pi(a), delta: 0.2 },
        };
        let mut obs: Vec<_> = [-0.02, -0.01, 0.01, 0.02].iter().map(|&a| mk(a)).collect();
        for (k, o) in obs.iter_mut().enumerate() {
            o.epoch = o.epoch.add_seconds(10.0 * k as f64);
            o.rho += k as f64;
        }
        let att = interpolate_track(&RadarTrack { station: StationSpec::reference(), obs }).unwrap();
        assert!(wrap_pi(att.alpha_bar).abs() < 1e-12, "{}", att.alpha_bar);
    }

    #[test]
    fn too_few_observations() {
        let mut tr = track1();
        tr.obs.truncate(2);
        assert_eq!(interpolate_track(&tr), Err(Error::TooFewObservations { n: 2, min: 3 }));
        let mut tr3 = track1();
        tr3.obs.truncate(3);
        assert!(interpolate_track(&tr3).is_ok());
    }

    #[test]
    fn range_rate_truncation_on_a_thirty_second_arc() {
        let el = reference_orbit();
        let st = StationSpec::reference();
        let att = interpolate_track(&track1()).unwrap();
        let truth = topocentric_truth(&el, &st, att.t_bar, MU_EARTH).unwrap();
        // A cubic term c₃τ³ leaks into the fitted slope as c₃ Στ⁴/Στ²; with
        // τ = ±5, ±15 s that ratio is 205 s². ρ‴ comes from the exact ρ̈.
        let h = 1.0;
        let rdd = |dt: f64| topocentric_truth(&el, &st, att.t_bar.add_seconds(dt), MU_EARTH).unwrap().rho_ddot;
        let rho_3 = (rdd(h) - rdd(-h)) / (2.0 * h);
        let predicted = rho_3 / 6.0 * 205.0;
        let err = att.rho_dot - truth.rho_dot;
        assert!((err - predicted).abs() < 0.05 * predicted.abs(), "{err} vs {predicted}");
        // Reference-pass ρ̈ (1.16e8 km/d² ≈ 0.0156 km/s²) within one order of magnitude.
        let expected = 116_444_362.0 / 86_400f64.powi(2);
        assert!(att.rho_ddot > expected / 10.0 && att.rho_ddot < expected * 10.0, "{}", att.rho_ddot);
    }

    #[test]
    fn mean_angle_bias_bounded_by_measured_curvature() {
        let el = reference_orbit();
        let st = StationSpec::reference();
        let tr = track1();
        let att = interpolate_track(&tr).unwrap();
        let truth = topocentric_truth(&el, &st, att.t_bar, MU_EARTH).unwrap();
        // Second differences of the true angles over the arc measure α̈, δ̈.
        let h = 1.0;
        let ang = |t: Epoch| topocentric_truth(&el, &st, t, MU_EARTH).unwrap().dir;
        let (m, c, p) = (ang(att.t_bar.add_seconds(-h)), ang(att.t_bar), ang(att.t_bar.add_seconds(h)));
        let a_dd = (wrap_pi(p.alpha - c.alpha) - wrap_pi(c.alpha - m.alpha)) / (h * h);
        let d_dd = (p.delta - 2.0 * c.delta + m.delta) / (h * h);
        let mean_tau_sq = 125.0;
        let bound = |dd: f64| 1.1 * 0.5 * dd.abs() * mean_tau_sq + 1e-9;
        assert!(wrap_pi(att.alpha_bar - truth.dir.alpha).abs() <= bound(a_dd));
        assert!((att.delta_bar - truth.dir.delta).abs() <= bound(d_dd));
    }

    #[test]
    fn track_file_round_trip() {
        let tr = add_noise(&track1(), &NoiseSpec { sigma_alpha_deg: 0.2, sigma_delta_deg: 0.2, sigma_rho_km: 0.01, seed: 1 });
        let text = write_track(&tr);
        let back = parse_track(&text).unwrap();
        assert_eq!(back.obs.len(), tr.obs.len());
        assert_eq!(back.station.name, tr.station.name);
        for (a, b) in tr.obs.iter().zip(&back.obs) {
            assert_eq!(a.epoch, b.epoch);
            assert_eq!(a.rho.to_bits(), b.rho.to_bits());
            assert!((a.dir.alpha - b.dir.alpha).abs() <= 4.0 * f64::EPSILON * a.dir.alpha.abs());
            assert!((a.dir.delta - b.dir.delta).abs() <= 4.0 * f64::EPSILON * a.dir.delta.abs());
        }
        assert_eq!(write_track(&parse_track(&write_track(&back)).unwrap()), write_track(&back));
    }

    #[test]
    fn track_parse_errors_carry_line_numbers() {
        let text = "# station A 0 0 6371\n54127.1, 1000, 10, 10, A\n54127.2, x, 10, 10, A\n";
        assert!(matches!(parse_track(text), Err(Error::Parse { line: 3, .. })));
        let undeclared = "54127.1, 1000, 10, 10, B\n";
        assert!(matches!(parse_track(undeclared), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn attributable_file_round_trip() {
        let att = exact_attributable(&reference_orbit(), &StationSpec::reference(), Epoch::from_mjd(54127.155035), MU_EARTH).unwrap();
        let back = parse_attributable(&write_attributable(&att)).unwrap();
        assert_eq!(back.t_bar, att.t_bar);
        assert_eq!((back.rho, back.rho_dot, back.rho_ddot), (att.rho, att.rho_dot, att.rho_ddot));
        assert!((back.alpha_bar - att.alpha_bar).abs() < 1e-15 && (back.delta_bar - att.delta_bar).abs() < 1e-15);
        assert!((back.observer.q - att.observer.q).norm() < 1e-9);
        assert!(matches!(parse_attributable("{\"t_bar\": 1}"), Err(Error::Parse { .. })));
    }
}
