use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CrackError;
use crate::scalar::{clamp, Real};

/// Closed interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange<S> {
    pub min: S,
    pub max: S,
}

impl<S: Real> ParamRange<S> {
    pub fn new(min: S, max: S) -> Self {
        Self { min, max }
    }

    pub fn fixed(v: S) -> Self {
        Self { min: v, max: v }
    }

    pub fn contains(&self, v: S) -> bool {
        v >= self.min && v <= self.max
    }

    /// `min + (max - min) * u` for `u` in `[0, 1)`, clamped into the range.
    pub fn at(&self, u: f64) -> S {
        if self.min == self.max {
            return self.min;
        }
        clamp(self.min + (self.max - self.min) * S::lit(u), self.min, self.max)
    }
}

/// Ranges a meta-annotation (or its group) allows; lengths in metres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrackParamRanges<S> {
    /// Fraction of the annotation line covered by the crack.
    pub length_fraction: ParamRange<S>,
    /// Amplitude of the coarse lateral wander.
    pub roughness_low: ParamRange<S>,
    /// Amplitude of the fine lateral jitter.
    pub roughness_high: ParamRange<S>,
    /// Opening width at the surface.
    pub thickness: ParamRange<S>,
    pub depth: ParamRange<S>,
    pub appearance_probability: S,
    pub spalling_probability: S,
}

impl<S: Real> CrackParamRanges<S> {
    pub fn validate(&self) -> Result<(), CrackError> {
        let err = |param: &'static str, reason: String| Err(CrackError::InvalidRange { param, reason });
        let ranges = [
            ("length_fraction", &self.length_fraction),
            ("roughness_low", &self.roughness_low),
            ("roughness_high", &self.roughness_high),
            ("thickness", &self.thickness),
            ("depth", &self.depth),
        ];
        for (name, r) in ranges {
            if !(r.min.is_finite() && r.max.is_finite()) {
                return err(name, "bounds must be finite".into());
            }
            if r.min > r.max {
                return err(name, format!("min {} > max {}", r.min, r.max));
            }
        }
        if self.length_fraction.min < S::zero() || self.length_fraction.max > S::one() {
            return err("length_fraction", "must lie within [0, 1]".into());
        }
        for (name, r) in [("roughness_low", &self.roughness_low), ("roughness_high", &self.roughness_high), ("depth", &self.depth)] {
            if r.min < S::zero() {
                return err(name, format!("min {} is negative", r.min));
            }
        }
        if !(self.thickness.min > S::zero()) {
            return err("thickness", format!("min {} must be positive", self.thickness.min));
        }
        for (name, p) in [
            ("appearance_probability", self.appearance_probability),
            ("spalling_probability", self.spalling_probability),
        ] {
            if !(p >= S::zero() && p <= S::one()) {
                return err(name, format!("{p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Concrete values drawn for one crack instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledParams<S> {
    pub length_fraction: S,
    pub roughness_low: S,
    pub roughness_high: S,
    pub thickness: S,
    pub depth: S,
    pub appears: bool,
}

/// SplitMix64 finalizer. All seed derivation goes through this.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one annotation's crack, independent of which other annotations exist.
pub fn annotation_seed(master_seed: u64, annotation_id: u32) -> u64 {
    mix64(master_seed ^ mix64(annotation_id as u64 ^ 0xA5A5_0000_0000_0000))
}

/// Independent stream for one generation stage.
pub fn stage_seed(seed: u64, stage: Stage) -> u64 {
    mix64(seed ^ mix64(stage as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Parameters = 1,
    Centerline = 2,
    Spalling = 3,
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws every parameter uniformly from its range and decides appearance.
pub fn sample_parameters<S: Real>(ranges: &CrackParamRanges<S>, seed: u64) -> SampledParams<S> {
    let mut rng = rng_for(seed);
    let mut u = || rng.gen::<f64>();
    let length_fraction = ranges.length_fraction.at(u());
    let roughness_low = ranges.roughness_low.at(u());
    let roughness_high = ranges.roughness_high.at(u());
    let thickness = ranges.thickness.at(u());
    let depth = ranges.depth.at(u());
    let appears = S::lit(u()) < ranges.appearance_probability;
    SampledParams {
        length_fraction,
        roughness_low,
        roughness_high,
        thickness,
        depth,
        appears,
    }
}
