//! Detector selection and the orient → scale → fit → score pipeline.

use std::fmt;

use crate::alp::{AlpConfig, AlpModel};
use crate::dataset::{apply_scaler, fit_scaler, orient, AttributeSpec, Dataset, ScalingParams};
use crate::distance::DistanceVariant;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nnd::{NndConfig, NndModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorConfig {
    Nnd(NndConfig),
    Alp(AlpConfig),
}

impl DetectorConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Nnd(_) => "nnd",
            Self::Alp(_) => "alp",
        }
    }

    pub fn variant(&self) -> DistanceVariant {
        match self {
            Self::Nnd(c) => c.variant,
            Self::Alp(c) => c.variant,
        }
    }

    /// Neighbourhood size as reported in result files (`auto` for automatic ALP).
    pub fn k_label(&self) -> String {
        match self {
            Self::Nnd(c) => c.k.to_string(),
            Self::Alp(c) => c.k.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Nnd(c) if c.k == 0 => Err(Error::invalid("NND k must be at least 1")),
            Self::Nnd(c) if c.variant == DistanceVariant::Signed && c.exponent != 1.0 => {
                Err(Error::invalid("signed distance is only defined for exponent 1"))
            }
            Self::Nnd(_) => Ok(()),
            Self::Alp(c) => c.validate(),
        }
    }
}

impl fmt::Display for DetectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{}-{}", self.name(), self.variant()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Nnd(NndModel),
    Alp(AlpModel),
}

impl Model {
    /// Fits on an oriented, scaled training set.
    pub fn fit(train: &Dataset, cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(match cfg {
            DetectorConfig::Nnd(c) => Self::Nnd(NndModel::fit(train, c)?),
            DetectorConfig::Alp(c) => Self::Alp(AlpModel::fit(train, c)?),
        })
    }

    pub fn n_attributes(&self) -> usize {
        match self {
            Self::Nnd(m) => m.n_attributes(),
            Self::Alp(m) => m.n_attributes(),
        }
    }

    /// Scores in `[0, 1]`, higher is more anomalous.
    pub fn anomaly_scores(&self, queries: &Matrix) -> Result<Vec<f64>> {
        match self {
            Self::Nnd(m) => m.anomaly_scores(queries),
            Self::Alp(m) => m.anomaly_scores(queries),
        }
    }
}

/// A fitted detector together with the preprocessing it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    pub(crate) schema: Vec<AttributeSpec>,
    pub(crate) scaler: Option<ScalingParams>,
    pub(crate) model: Model,
}

impl FittedPipeline {
    /// Orients `train`, fits the scaler on it (if `scale`), then fits the detector.
    pub fn fit(train: &Dataset, cfg: &DetectorConfig, scale: bool) -> Result<Self> {
        let oriented = orient(train);
        let (scaler, prepared) = if scale {
            let params = fit_scaler(&oriented)?;
            let scaled = apply_scaler(&oriented, &params)?;
            (Some(params), scaled)
        } else {
            (None, oriented)
        };
        Ok(Self {
            schema: train.schema().to_vec(),
            scaler,
            model: Model::fit(&prepared, cfg)?,
        })
    }

    /// Assembles a pipeline from a model fitted on records already oriented
    /// and scaled with `scaler`. `schema` is the raw (unoriented) schema.
    pub fn from_parts(schema: Vec<AttributeSpec>, scaler: Option<ScalingParams>, model: Model) -> Result<Self> {
        if schema.len() != model.n_attributes() {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                found: model.n_attributes(),
            });
        }
        if let Some(s) = &scaler {
            if s.midhinge.len() != schema.len() {
                return Err(Error::DimensionMismatch {
                    expected: schema.len(),
                    found: s.midhinge.len(),
                });
            }
        }
        Ok(Self { schema, scaler, model })
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn scaler(&self) -> Option<&ScalingParams> {
        self.scaler.as_ref()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Applies orientation and scaling to raw records in the training schema's column order.
    pub fn prepare(&self, raw: &Matrix) -> Result<Matrix> {
        if raw.cols() != self.schema.len() {
            return Err(Error::DimensionMismatch {
                expected: self.schema.len(),
                found: raw.cols(),
            });
        }
        let ds = orient(&Dataset::new(self.schema.clone(), raw.clone(), None)?);
        match &self.scaler {
            Some(p) => p.transform(ds.records()),
            None => Ok(ds.records().clone()),
        }
    }

    pub fn score(&self, raw: &Matrix) -> Result<Vec<f64>> {
        self.model.anomaly_scores(&self.prepare(raw)?)
    }
}
