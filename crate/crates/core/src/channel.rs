//! Random deployments and channel gains: uniform placement in a square,
//! log-distance path loss with log-normal shadowing, and Rayleigh fading.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GainMatrix, ModelError};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error("topology JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Sensor and controller positions in a square of side `sqrt(n / density)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub side: f64,
    /// Sensors per square metre (controllers are not counted).
    pub density: f64,
    pub sensors: Vec<Point>,
    pub controllers: Vec<Point>,
    /// Index into `controllers` for each sensor.
    pub attachment: Vec<usize>,
    pub seed: u64,
}

impl Topology {
    pub fn to_json(&self) -> Result<String, ChannelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ChannelError> {
        let t: Topology = serde_json::from_str(s)?;
        if t.attachment.len() != t.sensors.len() || t.attachment.iter().any(|&c| c >= t.controllers.len()) {
            return Err(ChannelError::InvalidParameter { what: "attachment length", value: t.attachment.len() as f64 });
        }
        Ok(t)
    }
}

fn uniform_point(rng: &mut impl Rng, side: f64) -> Point {
    Point { x: rng.random::<f64>() * side, y: rng.random::<f64>() * side }
}

/// Places sensors and controllers uniformly and attaches each sensor to its
/// nearest controller (ties to the lower controller index).
pub fn generate_topology(
    n_sensors: usize,
    n_controllers: usize,
    density: f64,
    seed: u64,
) -> Result<Topology, ChannelError> {
    if n_sensors == 0 {
        return Err(ChannelError::InvalidParameter { what: "sensor count", value: 0.0 });
    }
    if n_controllers == 0 {
        return Err(ChannelError::InvalidParameter { what: "controller count", value: 0.0 });
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(ChannelError::InvalidParameter { what: "density", value: density });
    }
    let side = (n_sensors as f64 / density).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let controllers: Vec<Point> = (0..n_controllers).map(|_| uniform_point(&mut rng, side)).collect();
    let sensors: Vec<Point> = (0..n_sensors).map(|_| uniform_point(&mut rng, side)).collect();
    let attachment = sensors
        .iter()
        .map(|s| {
            (0..n_controllers)
                .min_by(|&a, &b| s.distance(&controllers[a]).total_cmp(&s.distance(&controllers[b])))
                .unwrap()
        })
        .collect();
    Ok(Topology { side, density, sensors, controllers, attachment, seed })
}

/// Large-scale propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossParams {
    /// Path loss at the reference distance, dB.
    pub pl_d0_db: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Shadowing standard deviation, dB.
    pub sigma_z_db: f64,
    /// Reference distance, metres. Shorter distances are clamped to it.
    pub d0: f64,
    /// Multiply every gain by an exponential unit-mean power factor.
    pub rayleigh: bool,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self { pl_d0_db: 70.0, alpha: 3.5, sigma_z_db: 4.0, d0: 1.0, rayleigh: true }
    }
}

impl PathLossParams {
    fn validate(&self) -> Result<(), ChannelError> {
        let checks = [
            ("pl_d0_db", self.pl_d0_db, self.pl_d0_db.is_finite()),
            ("alpha", self.alpha, self.alpha >= 0.0 && self.alpha.is_finite()),
            ("sigma_z_db", self.sigma_z_db, self.sigma_z_db >= 0.0 && self.sigma_z_db.is_finite()),
            ("d0", self.d0, self.d0 > 0.0 && self.d0.is_finite()),
        ];
        for (what, value, ok) in checks {
            if !ok {
                return Err(ChannelError::InvalidParameter { what, value });
            }
        }
        Ok(())
    }

    /// `PL(d) = PL(d0) + 10 α log10(d / d0) + Z` in dB.
    pub fn path_loss_db(&self, distance: f64, shadowing_db: f64) -> f64 {
        let d = distance.max(self.d0);
        self.pl_d0_db + 10.0 * self.alpha * (d / self.d0).log10() + shadowing_db
    }

    /// Linear power gain for a given shadowing draw and fading power factor.
    pub fn gain(&self, distance: f64, shadowing_db: f64, fading: f64) -> f64 {
        10f64.powf(-self.path_loss_db(distance, shadowing_db) / 10.0) * fading
    }
}

/// Gains from every sensor to every controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub n_sensors: usize,
    pub n_controllers: usize,
    /// Sensor-major: `gains[s * n_controllers + c]`.
    pub gains: Vec<f64>,
    pub seed: u64,
}

impl ChannelRealization {
    pub fn gain(&self, sensor: usize, controller: usize) -> f64 {
        self.gains[sensor * self.n_controllers + controller]
    }

    /// Link gain matrix: entry `(l, k)` is the gain from sensor `l` to the
    /// controller that sensor `k` reports to.
    pub fn link_gains(&self, attachment: &[usize]) -> Result<GainMatrix, ModelError> {
        GainMatrix::from_fn(self.n_sensors, |l, k| self.gain(l, attachment[k]))
    }
}

/// Draws shadowing `Z ~ N(0, σ_z²)` and, unless disabled, a unit-mean
/// exponential fading power factor independently for every sensor-controller
/// pair. Fading applies to interference paths as well as desired links.
pub fn realize_channel(
    topology: &Topology,
    params: &PathLossParams,
    seed: u64,
) -> Result<ChannelRealization, ChannelError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shadowing = Normal::new(0.0, params.sigma_z_db).expect("validated sigma");
    let mut gains = Vec::with_capacity(topology.sensors.len() * topology.controllers.len());
    for s in &topology.sensors {
        for c in &topology.controllers {
            let z: f64 = shadowing.sample(&mut rng);
            let fading: f64 = if params.rayleigh { Exp1.sample(&mut rng) } else { 1.0 };
            // A zero draw would produce a zero gain; keep gains strictly positive.
            gains.push(params.gain(s.distance(c), z, fading.max(f64::MIN_POSITIVE)));
        }
    }
    Ok(ChannelRealization { n_sensors: topology.sensors.len(), n_controllers: topology.controllers.len(), gains, seed })
}
