//! Experiment configuration: parsing, defaults and validation.
//!
//! Every field is optional in the file. [`ExperimentConfig::resolve`] fills
//! the per-experiment defaults and checks ranges; the resolved form is what
//! gets echoed to `meta.json`.

use std::path::{Path, PathBuf};

use dahsim_core::engine::RampProfile;
use dahsim_core::ionchain::{self, IonChainConfig};
use dahsim_core::models;
use dahsim_core::noise::NoiseConfig;
use dahsim_core::zeromode::BulkBasis;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Experiment {
    ClusterField,
    Stitch,
    ClusterIsing,
    FourBody,
    ZmLifetime,
    SamplingVariance,
}

impl Experiment {
    pub fn file_stem(self) -> &'static str {
        match self {
            Experiment::ClusterField => "cluster_field",
            Experiment::Stitch => "stitch",
            Experiment::ClusterIsing => "cluster_ising",
            Experiment::FourBody => "four_body",
            Experiment::ZmLifetime => "zm_lifetime",
            Experiment::SamplingVariance => "sampling_variance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Either explicit `values` or `points` between `t_min` and `t_max`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub values: Option<Vec<f64>>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
}

impl TimeGrid {
    pub fn linear(t_max: f64, points: usize) -> Self {
        TimeGrid {
            values: None,
            t_min: Some(0.0),
            t_max: Some(t_max),
            points: Some(points),
            spacing: Some(Spacing::Linear),
        }
    }

    pub fn log(t_min: f64, t_max: f64, points: usize) -> Self {
        TimeGrid {
            values: None,
            t_min: Some(t_min),
            t_max: Some(t_max),
            points: Some(points),
            spacing: Some(Spacing::Log),
        }
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        TimeGrid {
            values: Some(values),
            ..Default::default()
        }
    }

    pub fn resolve(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(HarnessError::config("times", m));
        let grid = if let Some(v) = &self.values {
            v.clone()
        } else {
            let (Some(t_max), Some(n)) = (self.t_max, self.points) else {
                return bad("give either `values` or `t_max` and `points`".into());
            };
            let t_min = self.t_min.unwrap_or(0.0);
            if n < 2 {
                return bad(format!("need at least 2 points, got {n}"));
            }
            match self.spacing.unwrap_or(Spacing::Linear) {
                Spacing::Linear => (0..n)
                    .map(|k| t_min + (t_max - t_min) * k as f64 / (n - 1) as f64)
                    .collect(),
                Spacing::Log => {
                    if !(t_min > 0.0) {
                        return bad("log spacing needs t_min > 0".into());
                    }
                    let (a, b) = (t_min.ln(), t_max.ln());
                    let mut v: Vec<f64> = vec![0.0];
                    v.extend((0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()));
                    v
                }
            }
        };
        if grid.is_empty() {
            return bad("empty time grid".into());
        }
        if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("durations must be finite and non-negative".into());
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return bad("times must be sorted".into());
        }
        Ok(grid)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    /// Cluster coupling (energy unit of the cluster-field and zero-mode runs).
    pub g: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[serde(rename = "J_prime")]
    pub j_prime: Option<f64>,
    pub h: Option<f64>,
    #[serde(rename = "g_over_J")]
    pub g_over_j: Option<Vec<f64>>,
    #[serde(rename = "J_over_g")]
    pub j_over_g: Option<f64>,
    #[serde(rename = "J_NNN_over_g")]
    pub j_nnn_over_g: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ramp {
    pub profile: Option<RampProfile>,
    /// End of the preparation ramp in units of `1/g`.
    pub prep_end: Option<f64>,
    /// End of the stitching ramp in units of `1/g`.
    pub stitch_end: Option<f64>,
    /// Output spacing in units of `1/g`.
    pub step: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Full enumeration of the product basis.
    Exact,
    /// Dense eigendecomposition; exact trace at any time.
    Spectral,
    /// Monte Carlo over product states.
    Sampled,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub samples: Option<usize>,
    pub repeats: Option<usize>,
    pub sample_sizes: Option<Vec<usize>>,
    pub bulk_basis: Option<BulkBasis>,
    pub method: Option<Method>,
    pub threshold: Option<f64>,
    /// Also run the cluster ground-state variant.
    pub ground_state: Option<bool>,
    /// Run the echo sequence explicitly at every output time.
    pub explicit_echo: Option<bool>,
    /// `[t_start, t_end]` over which long-time correlators are averaged.
    pub window: Option<[f64; 2]>,
}

/// Where the Ising couplings come from. Precedence: explicit matrix, then
/// ion chain, then the exponential model `J_ij = J exp(-(|i-j|-1)/ξ)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    pub matrix: Option<Vec<Vec<f64>>>,
    pub matrix_file: Option<PathBuf>,
    pub ionchain: Option<IonChainConfig>,
    pub ionchain_file: Option<PathBuf>,
    pub xi: Option<f64>,
}

/// Optional overlay scale for the normalized edge correlators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamScale {
    pub left: f64,
    pub right: f64,
}

pub const PAPER_SPAM_SCALE: SpamScale = SpamScale {
    left: 0.908,
    right: 0.897,
};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    #[serde(rename = "L")]
    pub num_sites: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub ramp: Ramp,
    pub times: Option<TimeGrid>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub source: Source,
    pub noise: Option<NoiseConfig>,
    /// Frequency `J / 2π` in Hz that sets the time unit of the noise model.
    pub unit_hz: Option<f64>,
    pub spam_scale: Option<SpamScale>,
    pub output: Option<PathBuf>,
    /// Directory that relative file references are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn parse_error(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::config(path.display().to_string(), e.to_string())
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment: Some(experiment),
            ..Default::default()
        }
    }

    /// TOML or JSON, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| parse_error(path, e))?;
        let mut cfg: ExperimentConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| parse_error(path, e))?,
            Some("json") => serde_json::from_str(&text).map_err(|e| parse_error(path, e))?,
            other => {
                return Err(HarnessError::config(
                    "config",
                    format!("unknown config extension {other:?}; use .toml or .json"),
                ))
            }
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Fill defaults for `experiment` and validate.
    pub fn resolve(mut self, experiment: Experiment) -> Result<Self> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(HarnessError::config(
                    "experiment",
                    format!("config is for {e:?} but {experiment:?} was requested"),
                ));
            }
        }
        self.experiment = Some(experiment);
        self.seed.get_or_insert(1);
        self.tol.get_or_insert(1e-9);
        let c = &mut self.couplings;
        let s = &mut self.sampling;
        match experiment {
            Experiment::ClusterField | Experiment::Stitch => {
                self.num_sites.get_or_insert(5);
                c.g.get_or_insert(1.0);
                c.h.get_or_insert(1.0);
                self.ramp.profile.get_or_insert(RampProfile::Smoothstep);
                self.ramp.prep_end.get_or_insert(10.0);
                self.ramp.stitch_end.get_or_insert(19.0);
                self.ramp.step.get_or_insert(0.5);
            }
            Experiment::ClusterIsing => {
                self.num_sites.get_or_insert(12);
                c.g_over_j.get_or_insert(vec![3.3]);
                self.source.xi.get_or_insert(1.0);
                s.samples.get_or_insert(50);
                s.ground_state.get_or_insert(true);
                s.explicit_echo.get_or_insert(self.noise.is_some());
                s.window.get_or_insert([10.0, 20.0]);
                self.times.get_or_insert(TimeGrid::linear(20.0, 41));
                self.unit_hz.get_or_insert(200.0);
            }
            Experiment::FourBody => {
                self.num_sites.get_or_insert(4);
                c.j.get_or_insert(1.0);
                c.j_prime.get_or_insert(0.39);
                c.h.get_or_insert(1.0);
                self.times.get_or_insert(TimeGrid::linear(10.0, 101));
            }
            Experiment::ZmLifetime => {
                self.num_sites.get_or_insert(10);
                c.g.get_or_insert(1.0);
                c.j_over_g.get_or_insert(0.3);
                c.j_nnn_over_g.get_or_insert(vec![0.05, 0.1, 0.15, 0.2]);
                s.method.get_or_insert(Method::Spectral);
                s.threshold.get_or_insert(0.3);
                s.bulk_basis.get_or_insert(BulkBasis::Z);
                s.samples.get_or_insert(64);
                self.times.get_or_insert(TimeGrid::log(0.1, 1e7, 481));
            }
            Experiment::SamplingVariance => {
                self.num_sites.get_or_insert(12);
                c.g_over_j.get_or_insert(vec![0.5]);
                self.source.xi.get_or_insert(1.0);
                s.samples.get_or_insert(10);
                s.repeats.get_or_insert(100);
                s.sample_sizes.get_or_insert(vec![10, 40]);
                self.times.get_or_insert(TimeGrid::linear(10.0, 21));
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let l = self.l();
        let exp = self.experiment();
        let min = match exp {
            Experiment::ClusterField | Experiment::Stitch => 3,
            _ => 4,
        };
        if l < min || l > 16 {
            return Err(HarnessError::config("L", format!("{l} is outside {min}..=16")));
        }
        if exp == Experiment::FourBody && l != 4 {
            return Err(HarnessError::config("L", "the four-body protocol is defined for L = 4"));
        }
        if exp == Experiment::ZmLifetime && !l.is_multiple_of(2) {
            return Err(HarnessError::config("L", "zero-mode chains need even L"));
        }
        let tol = self.tol();
        if !(tol > 0.0 && tol < 1e-2) {
            return Err(HarnessError::config("tol", format!("{tol} is not in (0, 0.01)")));
        }
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => Err(HarnessError::config(name, format!("{x} is not finite"))),
            _ => Ok(()),
        };
        let c = &self.couplings;
        finite("couplings.g", c.g)?;
        finite("couplings.J", c.j)?;
        finite("couplings.J_prime", c.j_prime)?;
        finite("couplings.h", c.h)?;
        finite("couplings.J_over_g", c.j_over_g)?;
        if let Some(g) = c.g {
            if g <= 0.0 {
                return Err(HarnessError::config("couplings.g", "must be positive"));
            }
        }
        if let Some(list) = &c.g_over_j {
            if list.is_empty() || list.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(HarnessError::config("couplings.g_over_J", "need positive finite ratios"));
            }
        }
        if let Some(list) = &c.j_nnn_over_g {
            if list.is_empty() || list.iter().any(|x| !x.is_finite()) {
                return Err(HarnessError::config("couplings.J_NNN_over_g", "need finite values"));
            }
        }
        let r = &self.ramp;
        for (name, v) in [("ramp.prep_end", r.prep_end), ("ramp.stitch_end", r.stitch_end), ("ramp.step", r.step)] {
            if let Some(x) = v {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(HarnessError::config(name, "durations must be finite and non-negative"));
                }
            }
        }
        if let (Some(a), Some(b)) = (r.prep_end, r.stitch_end) {
            if b < a {
                return Err(HarnessError::config("ramp.stitch_end", "must not precede ramp.prep_end"));
            }
        }
        if r.step == Some(0.0) {
            return Err(HarnessError::config("ramp.step", "must be positive"));
        }
        if let Some(t) = &self.times {
            t.resolve()?;
        }
        let s = &self.sampling;
        if s.samples.is_some_and(|n| n < 2) {
            return Err(HarnessError::config("sampling.samples", "need at least 2 samples"));
        }
        if s.repeats.is_some_and(|n| n < 2) {
            return Err(HarnessError::config("sampling.repeats", "need at least 2 repeats"));
        }
        if let Some(sizes) = &s.sample_sizes {
            if sizes.is_empty() || sizes.iter().any(|&n| n < 2) {
                return Err(HarnessError::config("sampling.sample_sizes", "need sizes of at least 2"));
            }
        }
        if let Some([a, b]) = s.window {
            if !(a.is_finite() && b.is_finite() && 0.0 <= a && a <= b) {
                return Err(HarnessError::config("sampling.window", "need 0 <= start <= end"));
            }
        }
        if let Some(th) = s.threshold {
            if !(th.is_finite() && th < 1.0) {
                return Err(HarnessError::config("sampling.threshold", "must be below G(0) = 1"));
            }
        }
        if let Some(xi) = self.source.xi {
            if !(xi.is_finite() && xi > 0.0) {
                return Err(HarnessError::config("source.xi", "must be positive"));
            }
        }
        for (name, p) in [
            ("source.matrix_file", &self.source.matrix_file),
            ("source.ionchain_file", &self.source.ionchain_file),
        ] {
            if let Some(p) = p {
                if !self.base_dir.join(p).is_file() {
                    return Err(HarnessError::config(name, format!("{} does not exist", p.display())));
                }
            }
        }
        if let Some(n) = &self.noise {
            if !(n.dt_us.is_finite() && n.dt_us > 0.0) {
                return Err(HarnessError::config("noise.dt_us", "must be positive"));
            }
            if n.trajectories == 0 {
                return Err(HarnessError::config("noise.trajectories", "must be at least 1"));
            }
            if exp != Experiment::ClusterIsing {
                return Err(HarnessError::config("noise", "dephasing is only modelled for CLUSTER_ISING"));
            }
            let hz = self.unit_hz.unwrap_or(200.0);
            n.to_model(l, 2.0 * std::f64::consts::PI * hz)
                .map_err(|e| HarnessError::config("noise", e.to_string()))?;
        }
        if let Some(hz) = self.unit_hz {
            if !(hz.is_finite() && hz > 0.0) {
                return Err(HarnessError::config("unit_hz", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.expect("resolved config")
    }

    pub fn l(&self) -> usize {
        self.num_sites.expect("resolved config")
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-9)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.times
            .as_ref()
            .ok_or_else(|| HarnessError::config("times", "missing"))?
            .resolve()
    }

    /// Ising couplings rescaled so the mean nearest-neighbour value is 1.
    pub fn coupling_matrix(&self) -> Result<(DMatrix<f64>, &'static str)> {
        let l = self.l();
        let src = &self.source;
        let (m, name) = if let Some(rows) = &src.matrix {
            (matrix_from_rows(rows, "source.matrix")?, "matrix")
        } else if let Some(p) = &src.matrix_file {
            (read_matrix_file(&self.base_dir.join(p))?, "matrix")
        } else if let Some(chain) = self.ionchain_config()? {
            let spec = chain
                .to_spec()
                .map_err(|e| HarnessError::config("source.ionchain", e.to_string()))?;
            (ionchain::chain_couplings(&spec)?, "ionchain")
        } else {
            let xi = src.xi.unwrap_or(1.0);
            (models::exponential_couplings(l, 1.0, xi)?, "exponential")
        };
        if m.nrows() != l || m.ncols() != l {
            return Err(HarnessError::config(
                "source",
                format!("coupling matrix is {}x{} for L = {l}", m.nrows(), m.ncols()),
            ));
        }
        models::check_couplings(&m).map_err(|e| HarnessError::config("source", e.to_string()))?;
        let nn = models::mean_nearest_neighbour(&m);
        if !(nn.is_finite() && nn != 0.0) {
            return Err(HarnessError::config("source", "mean nearest-neighbour coupling is zero"));
        }
        Ok((m / nn, name))
    }

    fn ionchain_config(&self) -> Result<Option<IonChainConfig>> {
        if let Some(c) = &self.source.ionchain {
            return Ok(Some(c.clone()));
        }
        if let Some(p) = &self.source.ionchain_file {
            let path = self.base_dir.join(p);
            let text = std::fs::read_to_string(&path).map_err(|e| parse_error(&path, e))?;
            return IonChainConfig::from_json(&text)
                .map(Some)
                .map_err(|e| parse_error(&path, e));
        }
        Ok(None)
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(HarnessError::config(field, "matrix must be square and non-empty"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Square CSV matrix; a non-numeric first row is taken as a header.
pub fn read_matrix_file(path: &Path) -> Result<DMatrix<f64>> {
    let field = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::config(&field, e.to_string()))?;
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| HarnessError::config(&field, e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if k == 0 => continue,
            Err(e) => return Err(HarnessError::config(&field, format!("row {}: {e}", k + 1))),
        }
    }
    matrix_from_rows(&rows, &field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_experiment() {
        let c = ExperimentConfig::default().resolve(Experiment::ClusterIsing).unwrap();
        assert_eq!(c.l(), 12);
        assert_eq!(c.sampling.samples, Some(50));
        assert_eq!(c.times().unwrap().len(), 41);
        let z = ExperimentConfig::default().resolve(Experiment::ZmLifetime).unwrap();
        assert_eq!(z.l(), 10);
        assert_eq!(z.times().unwrap()[0], 0.0);
    }

    #[test]
    fn rejects_bad_fields() {
        let toml_err = toml::from_str::<ExperimentConfig>("L = 5\nbogus = 1\n");
        assert!(toml_err.is_err());
        let mut c = ExperimentConfig::default();
        c.num_sites = Some(5);
        let e = c.resolve(Experiment::ZmLifetime).unwrap_err();
        assert!(matches!(e, HarnessError::Config { ref field, .. } if field == "L"));
        let mut c = ExperimentConfig::default();
        c.ramp.prep_end = Some(-1.0);
        assert!(c.resolve(Experiment::ClusterField).is_err());
        let c = ExperimentConfig::new(Experiment::Stitch);
        assert!(c.resolve(Experiment::FourBody).is_err());
    }

    #[test]
    fn missing_file_is_config_error() {
        let mut c = ExperimentConfig::default();
        c.source.matrix_file = Some("no/such/file.csv".into());
        let e = c.resolve(Experiment::ClusterIsing).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn coupling_precedence_and_scaling() {
        let mut c = ExperimentConfig::default().resolve(Experiment::ClusterIsing).unwrap();
        c.num_sites = Some(4);
        let (m, name) = c.coupling_matrix().unwrap();
        assert_eq!(name, "exponential");
        assert!((models::mean_nearest_neighbour(&m) - 1.0).abs() < 1e-15);
        let mut rows = vec![vec![0.0; 4]; 4];
        for i in 0..3 {
            rows[i][i + 1] = 2.0;
            rows[i + 1][i] = 2.0;
        }
        c.source.matrix = Some(rows);
        let (m, name) = c.coupling_matrix().unwrap();
        assert_eq!(name, "matrix");
        assert_eq!(m[(0, 1)], 1.0);
    }

    #[test]
    fn log_grid_starts_at_zero() {
        let g = TimeGrid::log(0.1, 10.0, 3).resolve().unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert!(TimeGrid::explicit(vec![2.0, 1.0]).resolve().is_err());
    }
}
