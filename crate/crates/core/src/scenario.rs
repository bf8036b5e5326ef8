//! Scenario files, the seeded Monte Carlo comparison and its reports.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{gibbs_from_track, keplerian_integrals_link};
use crate::coplanar::correct_track;
use crate::elements::{element_errors, propagate_kepler, KeplerianElements};
use crate::linkage::{newton_solve, LinkageOptions, LinkageSolution, Method};
use crate::observer::StationSpec;
use crate::radar::{add_noise, interpolate_track, simulate_track, with_exact_range, Attributable, NoiseSpec, RadarTrack};
use crate::time::Epoch;
use crate::{Error, Result, MU_EARTH, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Gibbs,
    Ki,
    InfangLinear,
    InfangQuadratic,
}

impl MethodName {
    pub const ALL: [MethodName; 4] = [MethodName::Gibbs, MethodName::Ki, MethodName::InfangLinear, MethodName::InfangQuadratic];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Gibbs => "gibbs",
            MethodName::Ki => "ki",
            MethodName::InfangLinear => "infang-linear",
            MethodName::InfangQuadratic => "infang-quadratic",
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}' (expected gibbs, ki, infang-linear, infang-quadratic)")))
    }
}

/// Per-observation noise levels of one experiment arm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseCase {
    pub name: String,
    pub sigma_alpha_deg: f64,
    pub sigma_delta_deg: f64,
    pub sigma_rho_km: f64,
    /// Take `ρ, ρ̇, ρ̈` from the true orbit instead of the range fit.
    pub exact_range: bool,
}

impl NoiseCase {
    pub fn new(name: &str, sigma_alpha_deg: f64, sigma_delta_deg: f64, sigma_rho_km: f64) -> Self {
        NoiseCase { name: name.into(), sigma_alpha_deg, sigma_delta_deg, sigma_rho_km, exact_range: sigma_rho_km == 0.0 }
    }

    /// The three noise levels of the reference experiment: `rms1`, `rms2`,
    /// `rms3`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "rms1" => Ok(NoiseCase::new(name, 0.2, 0.2, 0.0)),
            "rms2" => Ok(NoiseCase::new(name, 0.1, 0.1, 5e-3)),
            "rms3" => Ok(NoiseCase::new(name, 0.2, 0.2, 1e-2)),
            _ => Err(Error::InvalidInput(format!("unknown noise preset '{name}' (expected rms1, rms2, rms3)"))),
        }
    }

    pub fn spec(&self, seed: u64) -> NoiseSpec {
        NoiseSpec { sigma_alpha_deg: self.sigma_alpha_deg, sigma_delta_deg: self.sigma_delta_deg, sigma_rho_km: self.sigma_rho_km, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub true_elements: KeplerianElements,
    /// One station for both tracks, or one per track.
    pub stations: Vec<StationSpec>,
    /// Mean epochs of the two tracks.
    pub track_epochs: [Epoch; 2],
    pub n_obs: usize,
    /// Observation spacing, s.
    pub dt: f64,
    pub noise_cases: Vec<NoiseCase>,
    pub methods: Vec<MethodName>,
    pub coplanar: bool,
    pub trials: usize,
    pub seed: u64,
    pub mu: f64,
}

/// On-disk form: flat keys with units in their names.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    a_km: f64,
    e: f64,
    i_deg: f64,
    raan_deg: f64,
    argp_deg: f64,
    mean_anomaly_deg: f64,
    epoch_mjd: Epoch,
    #[serde(default = "default_station_name")]
    station_name: String,
    station_lat_deg: f64,
    station_lon_deg: f64,
    station_radius_km: f64,
    station2_name: Option<String>,
    station2_lat_deg: Option<f64>,
    station2_lon_deg: Option<f64>,
    station2_radius_km: Option<f64>,
    track1_mjd: Epoch,
    track2_mjd: Epoch,
    #[serde(default = "default_n_obs")]
    n_obs: usize,
    #[serde(default = "default_dt")]
    dt_s: f64,
    #[serde(default)]
    sigma_alpha_deg: f64,
    #[serde(default)]
    sigma_delta_deg: f64,
    #[serde(default)]
    sigma_rho_km: f64,
    exact_range_channel: Option<bool>,
    noise_presets: Option<Vec<String>>,
    #[serde(default = "default_seed")]
    seed: u64,
    methods: Option<Vec<String>>,
    #[serde(default)]
    coplanar: bool,
    #[serde(default = "default_trials")]
    trials: usize,
}

fn default_station_name() -> String {
    "STATION".into()
}
fn default_n_obs() -> usize {
    4
}
fn default_dt() -> f64 {
    10.0
}
fn default_seed() -> u64 {
    1
}
fn default_trials() -> usize {
    1
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    /// The two-track reference experiment: 4 observations 10 s apart per
    /// track, about 5.4 revolutions between tracks, three noise levels and
    /// 50 trials each.
    pub fn reference() -> Self {
        Scenario {
            true_elements: KeplerianElements::reference(),
            stations: vec![StationSpec::reference()],
            track_epochs: [Epoch::from_parts(54127, 0.155035), Epoch::from_parts(54127, 0.582118)],
            n_obs: 4,
            dt: 10.0,
            noise_cases: ["rms1", "rms2", "rms3"].map(|n| NoiseCase::preset(n).expect("preset")).to_vec(),
            methods: MethodName::ALL.to_vec(),
            coplanar: false,
            trials: 50,
            seed: 1,
            mu: MU_EARTH,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let f: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let el = KeplerianElements {
            a: f.a_km,
            e: f.e,
            inc: f.i_deg.to_radians(),
            raan: f.raan_deg.to_radians(),
            argp: f.argp_deg.to_radians(),
            mean_anomaly: f.mean_anomaly_deg.to_radians(),
            epoch: f.epoch_mjd,
        };
        let mut stations = vec![StationSpec::from_degrees(&f.station_name, f.station_lat_deg, f.station_lon_deg, f.station_radius_km)?];
        match (f.station2_lat_deg, f.station2_lon_deg, f.station2_radius_km) {
            (Some(lat), Some(lon), Some(radius)) => {
                let name = f.station2_name.unwrap_or_else(|| "STATION2".into());
                stations.push(StationSpec::from_degrees(&name, lat, lon, radius)?);
            }
            (None, None, None) => {}
            _ => return Err(Error::InvalidInput("station2 needs lat, lon and radius".into())),
        }
        let noise_cases = match f.noise_presets {
            Some(names) => names.iter().map(|n| NoiseCase::preset(n)).collect::<Result<Vec<_>>>()?,
            None => {
                let mut c = NoiseCase::new("custom", f.sigma_alpha_deg, f.sigma_delta_deg, f.sigma_rho_km);
                if let Some(x) = f.exact_range_channel {
                    c.exact_range = x;
                }
                vec![c]
            }
        };
        let methods = match f.methods {
            Some(m) => m.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
            None => MethodName::ALL.to_vec(),
        };
        let sc = Scenario {
            true_elements: el,
            stations,
            track_epochs: [f.track1_mjd, f.track2_mjd],
            n_obs: f.n_obs,
            dt: f.dt_s,
            noise_cases,
            methods,
            coplanar: f.coplanar,
            trials: f.trials,
            seed: f.seed,
            mu: MU_EARTH,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        self.true_elements.validate()?;
        if self.stations.is_empty() || self.stations.len() > 2 {
            return Err(Error::InvalidInput("one or two stations required".into()));
        }
        if self.track_epochs[1].seconds_since(&self.track_epochs[0]) <= 0.0 {
            return Err(Error::InvalidInput("track epochs must increase".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.n_obs < 3 {
            return Err(Error::TooFewObservations { n: self.n_obs, min: 3 });
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidInput("dt_s must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods selected".into()));
        }
        for c in &self.noise_cases {
            if [c.sigma_alpha_deg, c.sigma_delta_deg, c.sigma_rho_km].iter().any(|s| !(*s >= 0.0)) {
                return Err(Error::InvalidInput(format!("noise case '{}' has a negative sigma", c.name)));
            }
        }
        Ok(())
    }

    fn station(&self, track: usize) -> &StationSpec {
        self.stations.get(track).unwrap_or(&self.stations[0])
    }

    /// Noise-free tracks.
    pub fn simulate(&self) -> Result<[RadarTrack; 2]> {
        let t = |i: usize| simulate_track(&self.true_elements, self.station(i), self.track_epochs[i], self.n_obs, self.dt, self.mu);
        Ok([t(0)?, t(1)?])
    }

    /// Noise seeds of the two tracks for every trial of noise case `case`.
    fn trial_seeds(&self, case: usize) -> Vec<[u64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(case as u64);
        (0..self.trials).map(|_| [rng.random(), rng.random()]).collect()
    }

    /// Noisy tracks of one trial.
    pub fn noisy_tracks(&self, case: usize, trial: usize) -> Result<[RadarTrack; 2]> {
        let seeds = self.trial_seeds(case)[trial];
        let clean = self.simulate()?;
        let nc = &self.noise_cases[case];
        Ok([add_noise(&clean[0], &nc.spec(seeds[0])), add_noise(&clean[1], &nc.spec(seeds[1]))])
    }
}

/// Orbital elements in report units (km, degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementsRecord {
    pub epoch: Epoch,
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub mean_anomaly_deg: f64,
}

impl From<&KeplerianElements> for ElementsRecord {
    fn from(el: &KeplerianElements) -> Self {
        ElementsRecord {
            epoch: el.epoch,
            a_km: el.a,
            e: el.e,
            i_deg: el.inc.to_degrees(),
            raan_deg: el.raan.to_degrees(),
            argp_deg: el.argp.to_degrees(),
            mean_anomaly_deg: el.mean_anomaly.to_degrees(),
        }
    }
}

/// Signed `computed − true` at the reference epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementErrors {
    pub da_km: f64,
    pub de: f64,
    pub di_deg: f64,
    pub draan_deg: f64,
    pub dargp_deg: f64,
    pub dmean_anomaly_deg: f64,
}

impl From<[f64; 6]> for ElementErrors {
    fn from(d: [f64; 6]) -> Self {
        ElementErrors {
            da_km: d[0],
            de: d[1],
            di_deg: d[2].to_degrees(),
            draan_deg: d[3].to_degrees(),
            dargp_deg: d[4].to_degrees(),
            dmean_anomaly_deg: d[5].to_degrees(),
        }
    }
}

/// Interpolated attributable of one track, in km, km/d and km/d².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributableRow {
    pub trial: usize,
    pub noise_case: String,
    pub track: usize,
    pub t_bar: Epoch,
    pub alpha_deg: f64,
    pub delta_deg: f64,
    pub rho_km: f64,
    pub rho_dot_km_d: f64,
    pub rho_ddot_km_d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub trial: usize,
    pub noise_case: String,
    pub method: MethodName,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub solutions: usize,
    pub error_class: Option<String>,
    /// Computed orbit propagated to the first track's mean epoch.
    pub elements: Option<ElementsRecord>,
    pub errors: Option<ElementErrors>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub noise_case: String,
    pub method: MethodName,
    pub trials: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    pub failures: BTreeMap<String, usize>,
    pub median_abs_da_km: Option<f64>,
    pub iqr_abs_da_km: Option<f64>,
    pub median_abs_de: Option<f64>,
    pub iqr_abs_de: Option<f64>,
    pub median_abs_di_deg: Option<f64>,
    pub iqr_abs_di_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    /// True orbit at the reference epoch.
    pub known: ElementsRecord,
    pub attributables: Vec<AttributableRow>,
    pub rows: Vec<ComparisonRow>,
    pub summaries: Vec<MethodSummary>,
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let x = p * (sorted.len() - 1) as f64;
    let i = x.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (x - i as f64) * (sorted[j] - sorted[i])
}

/// Median and interquartile range.
pub fn median_iqr(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some((quantile(&v, 0.5), quantile(&v, 0.75) - quantile(&v, 0.25)))
}

struct MethodResult {
    converged: bool,
    iterations: usize,
    residual: f64,
    solutions: usize,
    error_class: Option<String>,
    elements: Option<KeplerianElements>,
}

impl MethodResult {
    fn failed(e: &Error) -> Self {
        MethodResult { converged: false, iterations: 0, residual: f64::NAN, solutions: 0, error_class: Some(e.class().into()), elements: None }
    }

    fn from_solutions(sols: &[LinkageSolution], fallback: Option<&Error>) -> Self {
        match sols.first() {
            Some(s) => MethodResult {
                converged: true,
                iterations: s.iterations,
                residual: s.residual_norm,
                solutions: sols.len(),
                error_class: None,
                elements: Some(s.elements[0]),
            },
            None => MethodResult::failed(fallback.unwrap_or(&Error::NoBranch)),
        }
    }
}

fn run_method(
    method: MethodName,
    tracks: &[RadarTrack; 2],
    atts: &Result<[Attributable; 2]>,
    mu: f64,
) -> MethodResult {
    let opts = LinkageOptions { mu, ..LinkageOptions::default() };
    let link = |m: Method| match atts {
        Ok([a1, a2]) => match newton_solve(a1, a2, m, &opts) {
            Ok(out) => MethodResult::from_solutions(&out.solutions, out.failures.first().map(|f| &f.error)),
            Err(e) => MethodResult::failed(&e),
        },
        Err(e) => MethodResult::failed(e),
    };
    match method {
        MethodName::InfangLinear => link(Method::Linear),
        MethodName::InfangQuadratic => link(Method::Quadratic),
        MethodName::Ki => match atts {
            Ok([a1, a2]) => match keplerian_integrals_link(a1, a2, mu) {
                Ok(sols) => MethodResult::from_solutions(&sols, None),
                Err(e) => MethodResult::failed(&e),
            },
            Err(e) => MethodResult::failed(e),
        },
        MethodName::Gibbs => match gibbs_from_track(&tracks[0], mu) {
            Ok((_, el)) => MethodResult {
                converged: true,
                iterations: 0,
                residual: 0.0,
                solutions: 1,
                error_class: None,
                elements: Some(el),
            },
            Err(e) => MethodResult::failed(&e),
        },
    }
}

fn attributable_row(trial: usize, case: &str, track: usize, a: &Attributable) -> AttributableRow {
    AttributableRow {
        trial,
        noise_case: case.into(),
        track,
        t_bar: a.t_bar,
        alpha_deg: a.alpha_bar.to_degrees(),
        delta_deg: a.delta_bar.to_degrees(),
        rho_km: a.rho,
        rho_dot_km_d: a.rho_dot * SECONDS_PER_DAY,
        rho_ddot_km_d2: a.rho_ddot * SECONDS_PER_DAY * SECONDS_PER_DAY,
    }
}

/// Tracks of one trial after the optional plane correction, and their
/// attributables.
pub fn prepare_trial(sc: &Scenario, case: usize, trial: usize) -> Result<([RadarTrack; 2], Result<[Attributable; 2]>)> {
    let mut tracks = sc.noisy_tracks(case, trial)?;
    let mut atts = Ok(());
    if sc.coplanar {
        for t in tracks.iter_mut() {
            match correct_track(t) {
                Ok((fixed, _)) => *t = fixed,
                Err(e) => atts = Err(e),
            }
        }
    }
    let atts = atts.and_then(|_| {
        let mut a = [interpolate_track(&tracks[0])?, interpolate_track(&tracks[1])?];
        if sc.noise_cases[case].exact_range {
            for x in a.iter_mut() {
                *x = with_exact_range(x, &sc.true_elements, sc.mu)?;
            }
        }
        Ok(a)
    });
    Ok((tracks, atts))
}

/// Runs every trial of every noise case. Per-method failures are recorded
/// in the rows; only an unusable scenario is an error.
pub fn run_scenario(sc: &Scenario) -> Result<Report> {
    sc.validate()?;
    sc.simulate()?;
    let reference = sc.track_epochs[0];
    let truth = propagate_kepler(&sc.true_elements, reference.seconds_since(&sc.true_elements.epoch), sc.mu)?;
    let mut attributables = Vec::new();
    let mut rows = Vec::new();
    for (ci, case) in sc.noise_cases.iter().enumerate() {
        for trial in 0..sc.trials {
            let (tracks, atts) = prepare_trial(sc, ci, trial)?;
            if let Ok(a) = &atts {
                for (k, att) in a.iter().enumerate() {
                    attributables.push(attributable_row(trial, &case.name, k + 1, att));
                }
            }
            for &m in &sc.methods {
                let r = run_method(m, &tracks, &atts, sc.mu);
                let at_ref = r.elements.and_then(|el| propagate_kepler(&el, reference.seconds_since(&el.epoch), sc.mu).ok());
                rows.push(ComparisonRow {
                    trial,
                    noise_case: case.name.clone(),
                    method: m,
                    converged: r.converged && at_ref.is_some(),
                    iterations: r.iterations,
                    residual: r.residual,
                    solutions: r.solutions,
                    error_class: r.error_class,
                    elements: at_ref.as_ref().map(ElementsRecord::from),
                    errors: at_ref.map(|el| ElementErrors::from(element_errors(&el, &truth))),
                });
            }
        }
    }
    let summaries = summarise(sc, &rows);
    Ok(Report { known: ElementsRecord::from(&truth), attributables, rows, summaries })
}

fn summarise(sc: &Scenario, rows: &[ComparisonRow]) -> Vec<MethodSummary> {
    let mut out = Vec::new();
    for case in &sc.noise_cases {
        for &m in &sc.methods {
            let sel: Vec<&ComparisonRow> = rows.iter().filter(|r| r.noise_case == case.name && r.method == m).collect();
            let errs: Vec<ElementErrors> = sel.iter().filter_map(|r| r.errors).collect();
            let mut failures = BTreeMap::new();
            for r in sel.iter().filter(|r| !r.converged) {
                *failures.entry(r.error_class.clone().unwrap_or_else(|| "unknown".into())).or_insert(0) += 1;
            }
            let stat = |f: fn(&ElementErrors) -> f64| median_iqr(&errs.iter().map(|e| f(e).abs()).collect::<Vec<_>>());
            let da = stat(|e| e.da_km);
            let de = stat(|e| e.de);
            let di = stat(|e| e.di_deg);
            out.push(MethodSummary {
                noise_case: case.name.clone(),
                method: m,
                trials: sel.len(),
                converged: errs.len(),
                convergence_rate: errs.len() as f64 / sel.len().max(1) as f64,
                failures,
                median_abs_da_km: da.map(|x| x.0),
                iqr_abs_da_km: da.map(|x| x.1),
                median_abs_de: de.map(|x| x.0),
                iqr_abs_de: de.map(|x| x.1),
                median_abs_di_deg: di.map(|x| x.0),
                iqr_abs_di_deg: di.map(|x| x.1),
            });
        }
    }
    out
}

type ElementColumn = (&'static str, fn(&ElementsRecord) -> f64);

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into())
}

impl Report {
    pub fn summary(&self, case: &str, method: MethodName) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.noise_case == case && s.method == method)
    }

    /// Human-readable report: attributables, a side-by-side comparison of
    /// the first trial of each noise case, all rows, and the summaries.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# attributables (deg, km, km/d, km/d^2)");
        let _ = writeln!(s, "trial\tcase\ttrack\tt_bar_mjd\talpha\tdelta\trho\trho_dot\trho_ddot");
        for a in &self.attributables {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.4}\t{:.2}\t{:.0}",
                a.trial, a.noise_case, a.track, a.t_bar, a.alpha_deg, a.delta_deg, a.rho_km, a.rho_dot_km_d, a.rho_ddot_km_d2
            );
        }

        let _ = writeln!(s, "\n# orbital elements at epoch MJD {} (trial 0; km, deg)", self.known.epoch);
        let mut cases: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !cases.contains(&r.noise_case.as_str()) {
                cases.push(&r.noise_case);
            }
        }
        for case in cases {
            let first: Vec<&ComparisonRow> = self.rows.iter().filter(|r| r.noise_case == case && r.trial == 0).collect();
            let _ = write!(s, "{case}\tknown");
            for r in &first {
                let _ = write!(s, "\t{}", r.method);
            }
            let _ = writeln!(s);
            let fields: [ElementColumn; 6] = [
                ("a", |e| e.a_km),
                ("e", |e| e.e),
                ("I", |e| e.i_deg),
                ("Omega", |e| e.raan_deg),
                ("omega", |e| e.argp_deg),
                ("ell", |e| e.mean_anomaly_deg),
            ];
            for (name, f) in fields {
                let _ = write!(s, "{name}\t{:.4}", f(&self.known));
                for r in &first {
                    match &r.elements {
                        Some(el) => {
                            let _ = write!(s, "\t{:.4}", f(el));
                        }
                        None => {
                            let _ = write!(s, "\t{}", r.error_class.as_deref().unwrap_or("-"));
                        }
                    }
                }
                let _ = writeln!(s);
            }
        }

        let _ = writeln!(s, "\n# comparison rows (computed - true)");
        let _ = writeln!(s, "trial\tcase\tmethod\tconverged\titer\tresidual\tn_sol\tda_km\tde\tdI\tdOmega\tdomega\tdell\terror");
        for r in &self.rows {
            let _ = write!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{:.3e}\t{}",
                r.trial, r.noise_case, r.method, r.converged, r.iterations, r.residual, r.solutions
            );
            match &r.errors {
                Some(e) => {
                    let _ = write!(
                        s,
                        "\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}",
                        e.da_km, e.de, e.di_deg, e.draan_deg, e.dargp_deg, e.dmean_anomaly_deg
                    );
                }
                None => s.push_str("\t-\t-\t-\t-\t-\t-"),
            }
            let _ = writeln!(s, "\t{}", r.error_class.as_deref().unwrap_or("-"));
        }

        s.push('\n');
        s.push_str(&self.summary_table());
        s
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# summary (median and IQR of absolute errors)");
        let _ = writeln!(s, "case\tmethod\ttrials\tconverged\tmed_da_km\tiqr_da_km\tmed_de\tiqr_de\tmed_dI_deg\tiqr_dI_deg\tfailures");
        for m in &self.summaries {
            let failures: Vec<String> = m.failures.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                m.noise_case,
                m.method,
                m.trials,
                m.converged,
                opt(m.median_abs_da_km),
                opt(m.iqr_abs_da_km),
                opt(m.median_abs_de),
                opt(m.iqr_abs_de),
                opt(m.median_abs_di_deg),
                opt(m.iqr_abs_di_deg),
                if failures.is_empty() { "-".into() } else { failures.join(",") }
            );
        }
        s
    }

    /// One JSON object per line, tagged by `kind`.
    pub fn to_records(&self) -> String {
        #[derive(Serialize)]
        struct Tagged<'a, T: Serialize> {
            kind: &'a str,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut s = String::new();
        let mut push = |line: serde_json::Result<String>| {
            s.push_str(&line.expect("report records serialise"));
            s.push('\n');
        };
        push(serde_json::to_string(&Tagged { kind: "known", body: &self.known }));
        for a in &self.attributables {
            push(serde_json::to_string(&Tagged { kind: "attributable", body: a }));
        }
        for r in &self.rows {
            push(serde_json::to_string(&Tagged { kind: "row", body: r }));
        }
        for m in &self.summaries {
            push(serde_json::to_string(&Tagged { kind: "summary", body: m }));
        }
        s
    }
}
