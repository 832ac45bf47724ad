//! End-to-end assembly: config → group → metric → split → oracle → maps.

use std::sync::Arc;

use crate::config::{OracleKindConfig, RunConfig, SplitMode};
use crate::construct::{build_e, build_f, build_phi, build_psi, AmbientMap};
use crate::error::{Error, Result};
use crate::exprlang;
use crate::group::SymmetryGroup;
use crate::metric::{MetricField, MetricSplit};
use crate::oracle::{decompose_constant_metric, EmbeddingOracle};
use crate::spiral::SpiralCurve;

/// A fully prepared run: validated config plus the constructed objects every
/// command works from.
#[derive(Debug)]
pub struct Pipeline {
    pub config: RunConfig,
    pub group: SymmetryGroup,
    pub metric: MetricField<f64>,
    pub split: MetricSplit<f64>,
    pub oracle: Arc<EmbeddingOracle<f64>>,
    pub curve: Arc<SpiralCurve<f64>>,
}

/// Builds just the metric and its decomposition; this is all the `split`
/// command needs, and it works for metrics (conformal, expression) that have
/// no closed-form oracle.
pub fn prepare_split(config: &RunConfig) -> Result<(RunConfig, MetricField<f64>, MetricSplit<f64>)> {
    let config = config.effective()?;
    let metric = config.build_metric()?;
    let resolution = config.split.resolution.expect("resolved by effective()");
    let split = match config.split.mode {
        SplitMode::Fraction => metric.split(config.split.fraction, resolution)?,
        SplitMode::MetricIsQ1 => {
            MetricSplit::with_metric_as_q1(&metric, config.split.fraction, resolution)?
        }
        SplitMode::Auto => unreachable!("resolved by effective()"),
    };
    Ok((config, metric, split))
}

impl Pipeline {
    pub fn prepare(config: &RunConfig) -> Result<Pipeline> {
        let (config, metric, split) = prepare_split(config)?;
        let group = config.build_group()?;

        let oracle = Arc::new(match config.oracle.kind {
            OracleKindConfig::Clifford => {
                let q1 = split.q1().constant_value().ok_or_else(|| {
                    Error::OracleRejected(
                        "the clifford oracle needs a constant Q1; this split's Q1 varies with x"
                            .into(),
                    )
                })?;
                EmbeddingOracle::clifford_general(config.n, decompose_constant_metric(&q1)?)?
            }
            OracleKindConfig::Revolution => EmbeddingOracle::revolution(
                config.metric.major.expect("validated"),
                config.metric.minor.expect("validated"),
            )?,
            OracleKindConfig::Expression => {
                let comps = config
                    .oracle
                    .components
                    .as_ref()
                    .expect("validated")
                    .iter()
                    .map(|t| exprlang::parse(t, config.n))
                    .collect::<Result<Vec<_>>>()?;
                EmbeddingOracle::from_expressions(config.n, comps)?
            }
        });

        let s = &config.spiral;
        let curve = SpiralCurve::new(s.r_in, s.r_out, s.k, s.tol)?;

        Ok(Pipeline { config, group, metric, split, oracle, curve })
    }

    pub fn e_map(&self) -> Result<AmbientMap<f64>> {
        build_e(&self.split, self.oracle.clone(), self.curve.clone())
    }

    pub fn f_map(&self) -> Result<AmbientMap<f64>> {
        build_f(&self.split, self.oracle.clone())
    }

    pub fn phi_map(&self) -> Result<AmbientMap<f64>> {
        build_phi(&self.split, self.oracle.clone())
    }

    pub fn psi_map(&self) -> Result<AmbientMap<f64>> {
        build_psi(self.curve.clone(), self.split.c(), self.config.n)
    }
}
