//! Versioned JSON channel specification files.
//!
//! ```json
//! { "version": "1", "kind": "fsmac",
//!   "alphabets": {"nS": 1, "nSa": 1, "nSb": 1, "nXa": 2, "nXb": 2, "nY": 2},
//!   "stateDist": [1.0],
//!   "csiA": [[1.0]], "csiB": [[1.0]],
//!   "channel": [[1, 0], [0, 1], [0, 1], [1, 0]] }
//! ```
//!
//! Kernels are nested arrays, one inner array per conditioning row. CSI
//! kernels have row `s` and column `s^a` (or `s^b`); noisy-receiver kernels
//! are conditioned on `s^r`; the channel kernel has row
//! `(x_a * nXb + x_b) * nS + s` and column `y`. Unknown fields are rejected.
//! Floats are written in shortest round-trip form, so loading a saved file
//! reproduces every probability bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{
    build_binary_multiplier, build_modulo_additive, equivalent_channel, Alphabets, BinaryMultiplierSpec, FsMacChannel,
    ModuloAdditiveSpec, NoisyReceiverModel, StochasticKernel, DEFAULT_ENUMERATION_LIMIT, INPUT_TOLERANCE,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawFsMac {
    alphabets: Alphabets,
    state_dist: Vec<f64>,
    csi_a: Vec<Vec<f64>>,
    csi_b: Vec<Vec<f64>>,
    channel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    enumeration_limit: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawNoisyReceiver {
    alphabets: Alphabets,
    sr_dist: Vec<f64>,
    state_given_sr: Vec<Vec<f64>>,
    csi_a_given_sr: Vec<Vec<f64>>,
    csi_b_given_sr: Vec<Vec<f64>>,
    channel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    enumeration_limit: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawModulo {
    q: usize,
    state_dist: Vec<f64>,
    csi_a: Vec<Vec<f64>>,
    csi_b: Vec<Vec<f64>>,
    noise_given_state: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpec {
    #[serde(rename = "fsmac")]
    FsMac(RawFsMac),
    NoisyReceiver(RawNoisyReceiver),
    ModuloAdditive(RawModulo),
    BinaryMultiplier(BinaryMultiplierSpec),
}

/// Contents of a specification file.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecFile {
    FsMac(FsMacChannel),
    NoisyReceiver(NoisyReceiverModel),
    ModuloAdditive(ModuloAdditiveSpec),
    BinaryMultiplier(BinaryMultiplierSpec),
}

/// A validated channel model of either receiver-CSI kind.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    FsMac(FsMacChannel),
    NoisyReceiver(NoisyReceiverModel),
}

impl ChannelModel {
    /// The complete-CSIR channel, reducing noisy-receiver models first.
    pub fn reduced(&self) -> Result<FsMacChannel> {
        match self {
            ChannelModel::FsMac(c) => Ok(c.clone()),
            ChannelModel::NoisyReceiver(m) => equivalent_channel(m),
        }
    }
}

impl SpecFile {
    pub fn kind(&self) -> &'static str {
        match self {
            SpecFile::FsMac(_) => "fsmac",
            SpecFile::NoisyReceiver(_) => "noisy_receiver",
            SpecFile::ModuloAdditive(_) => "modulo_additive",
            SpecFile::BinaryMultiplier(_) => "binary_multiplier",
        }
    }

    /// Builds the channel model described by the file.
    pub fn model(&self) -> Result<ChannelModel> {
        Ok(match self {
            SpecFile::FsMac(c) => ChannelModel::FsMac(c.clone()),
            SpecFile::NoisyReceiver(m) => ChannelModel::NoisyReceiver(m.clone()),
            SpecFile::ModuloAdditive(s) => ChannelModel::FsMac(build_modulo_additive(s)?),
            SpecFile::BinaryMultiplier(s) => ChannelModel::NoisyReceiver(build_binary_multiplier(s)?),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = match self {
            SpecFile::FsMac(c) => RawSpec::FsMac(RawFsMac {
                alphabets: *c.alphabets(),
                state_dist: c.state_dist().to_vec(),
                csi_a: c.csi_a().to_rows(),
                csi_b: c.csi_b().to_rows(),
                channel: c.channel().to_rows(),
                enumeration_limit: None,
            }),
            SpecFile::NoisyReceiver(m) => RawSpec::NoisyReceiver(RawNoisyReceiver {
                alphabets: *m.alphabets(),
                sr_dist: m.sr_dist().to_vec(),
                state_given_sr: m.state_given_sr().to_rows(),
                csi_a_given_sr: m.csi_a_given_sr().to_rows(),
                csi_b_given_sr: m.csi_b_given_sr().to_rows(),
                channel: m.channel().to_rows(),
                enumeration_limit: None,
            }),
            SpecFile::ModuloAdditive(s) => RawSpec::ModuloAdditive(RawModulo {
                q: s.q,
                state_dist: s.state_dist.clone(),
                csi_a: s.csi_a.to_rows(),
                csi_b: s.csi_b.to_rows(),
                noise_given_state: s.noise_given_state.to_rows(),
            }),
            SpecFile::BinaryMultiplier(s) => RawSpec::BinaryMultiplier(*s),
        };
        let mut value = serde_json::to_value(raw).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = value.as_object_mut().expect("tagged enum serializes to an object");
        let mut out = serde_json::Map::new();
        out.insert("version".into(), Value::String(SCHEMA_VERSION.into()));
        out.append(obj);
        serde_json::to_string_pretty(&Value::Object(out)).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::Parse("specification must be a JSON object".into()))?;
        match obj.remove("version") {
            Some(Value::String(v)) if v == SCHEMA_VERSION => {}
            Some(Value::String(v)) => return Err(Error::SchemaVersionMismatch { found: v }),
            Some(other) => return Err(Error::SchemaVersionMismatch { found: other.to_string() }),
            None => return Err(Error::Parse("missing field `version`".into())),
        }
        let raw: RawSpec = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawSpec) -> Result<Self> {
        let kernel = |name: &str, rows: &[Vec<f64>]| StochasticKernel::from_rows(name, rows, INPUT_TOLERANCE);
        Ok(match raw {
            RawSpec::FsMac(r) => SpecFile::FsMac(FsMacChannel::with_limit(
                r.alphabets,
                r.state_dist,
                kernel("csiA", &r.csi_a)?,
                kernel("csiB", &r.csi_b)?,
                kernel("channel", &r.channel)?,
                r.enumeration_limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT),
            )?),
            RawSpec::NoisyReceiver(r) => SpecFile::NoisyReceiver(NoisyReceiverModel::with_limit(
                r.alphabets,
                r.sr_dist,
                kernel("stateGivenSr", &r.state_given_sr)?,
                kernel("csiAGivenSr", &r.csi_a_given_sr)?,
                kernel("csiBGivenSr", &r.csi_b_given_sr)?,
                kernel("channel", &r.channel)?,
                r.enumeration_limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT),
            )?),
            RawSpec::ModuloAdditive(r) => {
                let spec = ModuloAdditiveSpec {
                    q: r.q,
                    state_dist: r.state_dist,
                    csi_a: kernel("csiA", &r.csi_a)?,
                    csi_b: kernel("csiB", &r.csi_b)?,
                    noise_given_state: kernel("noiseGivenState", &r.noise_given_state)?,
                };
                spec.validate()?;
                build_modulo_additive(&spec)?;
                SpecFile::ModuloAdditive(spec)
            }
            RawSpec::BinaryMultiplier(s) => {
                s.validate()?;
                SpecFile::BinaryMultiplier(s)
            }
        })
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<SpecFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    SpecFile::from_json(&text)
}

pub fn save_spec(spec: &SpecFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = spec.to_json()?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_error(path))
}

/// Loads a file and builds its channel model.
pub fn load_channel(path: impl AsRef<Path>) -> Result<ChannelModel> {
    load_spec(path)?.model()
}

pub fn save_channel(model: &ChannelModel, path: impl AsRef<Path>) -> Result<()> {
    let spec = match model {
        ChannelModel::FsMac(c) => SpecFile::FsMac(c.clone()),
        ChannelModel::NoisyReceiver(m) => SpecFile::NoisyReceiver(m.clone()),
    };
    save_spec(&spec, path)
}
