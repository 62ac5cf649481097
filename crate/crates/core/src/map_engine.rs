//! Deterministic and random logistic map.
//!
//! One iteration is `x -> mu * x * (1 - x) + omega` where `omega` is drawn
//! i.i.d. from the closed interval `[-eps, eps]`. When the noisy state leaves
//! `[0, 1]` the configured [`BoundaryPolicy`] brings it back.
//!
//! All randomness flows through [`RngStream`], a ChaCha8 generator addressed
//! by `(seed, stream_id)`. The same pair always replays the same draws on
//! every platform, and different stream ids give independent streams, which
//! is how the estimator shards work across threads.

use std::fmt;

use rand::distr::{Distribution, Open01, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest digitized string that fits one packed word.
pub const MAX_LEN: usize = 64;

/// Retry budget for [`BoundaryPolicy::Resample`].
pub const RESAMPLE_BUDGET: u32 = 1_000_000;

/// What to do with a noisy state that lands outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Clip to the nearest end of the interval.
    #[default]
    Clamp,
    /// Redraw the noise until the state lands inside.
    Resample,
}

impl fmt::Display for BoundaryPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPolicy::Clamp => f.write_str("clamp"),
            BoundaryPolicy::Resample => f.write_str("resample"),
        }
    }
}

impl std::str::FromStr for BoundaryPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(BoundaryPolicy::Clamp),
            "resample" => Ok(BoundaryPolicy::Resample),
            other => Err(Error::Config(format!("unknown boundary policy {other:?}"))),
        }
    }
}

/// Full configuration of one experiment. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct MapParams {
    mu: f64,
    eps: f64,
    delta: f64,
    n: usize,
    transient_skip: usize,
    boundary_policy: BoundaryPolicy,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    mu: f64,
    eps: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default = "default_len")]
    n: usize,
    #[serde(default)]
    transient_skip: usize,
    #[serde(default)]
    boundary_policy: BoundaryPolicy,
}

fn default_len() -> usize {
    MapParams::DEFAULT_LEN
}

impl TryFrom<RawParams> for MapParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        MapParams::builder(raw.mu, raw.eps)
            .delta(raw.delta)
            .len(raw.n)
            .transient_skip(raw.transient_skip)
            .boundary_policy(raw.boundary_policy)
            .build()
    }
}

impl From<MapParams> for RawParams {
    fn from(p: MapParams) -> Self {
        RawParams {
            mu: p.mu,
            eps: p.eps,
            delta: p.delta,
            n: p.n,
            transient_skip: p.transient_skip,
            boundary_policy: p.boundary_policy,
        }
    }
}

impl MapParams {
    pub const DEFAULT_LEN: usize = 25;
    /// Named alternative for `transient_skip` when transients are excluded.
    pub const SETTLED_SKIP: usize = 50;

    pub fn builder(mu: f64, eps: f64) -> MapParamsBuilder {
        MapParamsBuilder {
            mu,
            eps,
            delta: 0.0,
            n: Self::DEFAULT_LEN,
            transient_skip: 0,
            boundary_policy: BoundaryPolicy::Clamp,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Half-width of the dynamical noise.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Half-width of the measurement noise.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Length of the recorded trajectory and of the digitized string.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn transient_skip(&self) -> usize {
        self.transient_skip
    }

    pub fn boundary_policy(&self) -> BoundaryPolicy {
        self.boundary_policy
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MapParamsBuilder {
    mu: f64,
    eps: f64,
    delta: f64,
    n: usize,
    transient_skip: usize,
    boundary_policy: BoundaryPolicy,
}

impl MapParamsBuilder {
    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn len(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn transient_skip(mut self, skip: usize) -> Self {
        self.transient_skip = skip;
        self
    }

    pub fn boundary_policy(mut self, policy: BoundaryPolicy) -> Self {
        self.boundary_policy = policy;
        self
    }

    pub fn build(self) -> Result<MapParams> {
        if !(self.mu > 0.0 && self.mu <= 4.0) {
            return Err(Error::Config(format!("mu must lie in (0, 4], got {}", self.mu)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!(
                "eps must be a finite value >= 0, got {}",
                self.eps
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta must be a finite value >= 0, got {}",
                self.delta
            )));
        }
        if self.n == 0 || self.n > MAX_LEN {
            return Err(Error::Config(format!("n must lie in [1, {MAX_LEN}], got {}", self.n)));
        }
        Ok(MapParams {
            mu: self.mu,
            eps: self.eps,
            delta: self.delta,
            n: self.n,
            transient_skip: self.transient_skip,
            boundary_policy: self.boundary_policy,
        })
    }
}

/// The `n` recorded states of one trajectory, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTrajectory {
    values: Vec<f64>,
}

impl RealTrajectory {
    /// Wraps raw values; fails if any lies outside `[0, 1]` or the length is
    /// not in `[1, 64]`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_LEN {
            return Err(Error::Domain(format!(
                "trajectory length {} outside [1, {MAX_LEN}]",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("trajectory value {bad} outside [0, 1]")));
        }
        Ok(RealTrajectory { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Seeded source of uniform draws, addressed by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open01(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    /// Uniform on the closed interval `[-half_width, half_width]`.
    pub fn symmetric(&mut self, half_width: f64) -> f64 {
        if half_width == 0.0 {
            return 0.0;
        }
        SymmetricNoise::new(half_width).draw(self)
    }

    /// Raw 64-bit output, for callers that pack random bits directly.
    pub fn next_u64(&mut self) -> u64 {
        rand::RngCore::next_u64(&mut self.rng)
    }
}

/// Precomputed `U[-h, h]` sampler; `h = 0` short-circuits without drawing.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SymmetricNoise(Option<Uniform<f64>>);

impl SymmetricNoise {
    pub(crate) fn new(half_width: f64) -> Self {
        if half_width > 0.0 {
            SymmetricNoise(Uniform::new_inclusive(-half_width, half_width).ok())
        } else {
            SymmetricNoise(None)
        }
    }

    #[inline]
    pub(crate) fn draw(&self, rng: &mut RngStream) -> f64 {
        match &self.0 {
            Some(u) => u.sample(&mut rng.rng),
            None => 0.0,
        }
    }
}

/// One raw step of the map, before any boundary handling.
#[inline]
pub fn step(x: f64, mu: f64, omega: f64) -> f64 {
    mu * x * (1.0 - x) + omega
}

/// What [`apply_boundary`] needs to redraw noise under
/// [`BoundaryPolicy::Resample`]: the noise-free image of the previous state
/// and the noise half-width.
#[derive(Debug, Clone, Copy)]
pub struct RetryCtx {
    pub image: f64,
    pub eps: f64,
}

/// Brings a raw post-noise state back into `[0, 1]`.
pub fn apply_boundary(x_raw: f64, policy: BoundaryPolicy, rng: &mut RngStream, ctx: RetryCtx) -> Result<f64> {
    apply_boundary_with(x_raw, policy, rng, ctx, &SymmetricNoise::new(ctx.eps))
}

#[inline]
fn apply_boundary_with(
    x_raw: f64,
    policy: BoundaryPolicy,
    rng: &mut RngStream,
    ctx: RetryCtx,
    noise: &SymmetricNoise,
) -> Result<f64> {
    if (0.0..=1.0).contains(&x_raw) {
        return Ok(x_raw);
    }
    match policy {
        BoundaryPolicy::Clamp => Ok(x_raw.clamp(0.0, 1.0)),
        BoundaryPolicy::Resample => {
            for _ in 0..RESAMPLE_BUDGET {
                let x = ctx.image + noise.draw(rng);
                if (0.0..=1.0).contains(&x) {
                    return Ok(x);
                }
            }
            Err(Error::Config(format!(
                "resample budget of {RESAMPLE_BUDGET} exhausted at image {} with eps {}",
                ctx.image, ctx.eps
            )))
        }
    }
}

/// Uniform initial condition on `(0, 1)`.
pub fn sample_x0(rng: &mut RngStream) -> f64 {
    rng.open01()
}

/// Iterates the map `transient_skip + n` times from `x0` and returns the
/// last `n` states. Skipped iterations consume noise draws like any other.
pub fn generate_trajectory(params: &MapParams, x0: f64, rng: &mut RngStream) -> Result<RealTrajectory> {
    let mut values = Vec::with_capacity(params.n);
    iterate_into(params, x0, rng, &mut values)?;
    Ok(RealTrajectory { values })
}

pub(crate) fn iterate_into(params: &MapParams, x0: f64, rng: &mut RngStream, out: &mut Vec<f64>) -> Result<()> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain(format!("x0 must lie in (0, 1), got {x0}")));
    }
    out.clear();
    let noise = SymmetricNoise::new(params.eps);
    let mut x = x0;
    let total = params.transient_skip + params.n;
    for k in 0..total {
        let image = step(x, params.mu, 0.0);
        let raw = image + noise.draw(rng);
        x = apply_boundary_with(
            raw,
            params.boundary_policy,
            rng,
            RetryCtx { image, eps: params.eps },
            &noise,
        )?;
        if k >= params.transient_skip {
            out.push(x);
        }
    }
    Ok(())
}
