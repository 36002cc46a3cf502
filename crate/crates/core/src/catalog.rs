//! Named experiments with desk-scale defaults, and a runner that turns an
//! [`ExperimentConfig`] into retained draws plus summaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::baseline::{EllipticalConfig, EllipticalVariant, SteppingOutConfig, SteppingOutSampler};
use crate::chain::{ChainOutput, RunLength};
use crate::diagnostics::{
    count_switches, ks_statistic, l1_distance, linspace, local_maxima, mean, mode_fraction,
    ChainSummary, KernelDensity,
};
use crate::error::{Error, Result};
use crate::experiments::{
    gp_regression_run, spike_slab_run, state_space_run, FiniteMixtureConfig, MdpConfig,
};
use crate::io::{RunSummary, SCHEMA_VERSION};
use crate::latent::{LatentSliceConfig, LatentSliceSampler};
use crate::models::{
    BimodalMixture, CorrelatedGaussian, Funnel as FunnelTarget, GpRegression, IsotropicGaussian,
    UnivariateSample,
};
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    Bimodal,
    Bivariate,
    Gauss50,
    Funnel,
    FunnelSliceBaseline,
    Mdp,
    FiniteMixture,
    Gp,
    GpStandardEss,
    StateSpace,
    SpikeSlab,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 11] = [
        ExperimentName::Bimodal,
        ExperimentName::Bivariate,
        ExperimentName::Gauss50,
        ExperimentName::Funnel,
        ExperimentName::FunnelSliceBaseline,
        ExperimentName::Mdp,
        ExperimentName::FiniteMixture,
        ExperimentName::Gp,
        ExperimentName::GpStandardEss,
        ExperimentName::StateSpace,
        ExperimentName::SpikeSlab,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Bimodal => "bimodal",
            ExperimentName::Bivariate => "bivariate",
            ExperimentName::Gauss50 => "gauss50",
            ExperimentName::Funnel => "funnel",
            ExperimentName::FunnelSliceBaseline => "funnel-slice-baseline",
            ExperimentName::Mdp => "mdp",
            ExperimentName::FiniteMixture => "finite-mixture",
            ExperimentName::Gp => "gp",
            ExperimentName::GpStandardEss => "gp-standard-ess",
            ExperimentName::StateSpace => "state-space",
            ExperimentName::SpikeSlab => "spike-slab",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentName::Bimodal => "latent slice on an equal mixture of N(-10,1) and N(10,1)",
            ExperimentName::Bivariate => "latent slice on a bivariate normal with correlation 0.95",
            ExperimentName::Gauss50 => "latent slice on a 50-dimensional standard normal",
            ExperimentName::Funnel => {
                "latent slice on the 10-dimensional funnel (v ~ N(0,9), x_i ~ N(0,e^v))"
            }
            ExperimentName::FunnelSliceBaseline => {
                "coordinate-wise stepping-out slice sampler on the funnel"
            }
            ExperimentName::Mdp => {
                "Dirichlet process normal mixture with window-kernel allocations; predictive draws"
            }
            ExperimentName::FiniteMixture => {
                "exponential mixture with unknown component count moved by the window kernel"
            }
            ExperimentName::Gp => "GP regression with the latent-slice elliptical sampler",
            ExperimentName::GpStandardEss => {
                "GP regression with standard elliptical slice sampling"
            }
            ExperimentName::StateSpace => {
                "Poisson/AR(1) state-space model, 500 states updated as one block"
            }
            ExperimentName::SpikeSlab => {
                "spike-and-slab regression, 90 coefficients updated as one block"
            }
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Format(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub seed: u64,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Rate of the latent-slice scale prior.
    pub lambda: f64,
    /// Window width of the discrete kernel.
    pub k: usize,
}

impl ExperimentConfig {
    pub fn defaults(name: ExperimentName) -> Self {
        use ExperimentName::*;
        let (n_iter, burn_in, thin, lambda, k) = match name {
            Bimodal => (20_000, 0, 1, 0.01, 1),
            Bivariate => (20_000, 0, 1, 0.1, 1),
            Gauss50 => (5_000, 0, 1, 0.1, 1),
            Funnel | FunnelSliceBaseline => (200_000, 0, 100, 0.2, 1),
            Mdp => (20_000, 15_000, 1, 0.1, 5),
            FiniteMixture => (20_000, 5_000, 1, 0.1, 3),
            Gp | GpStandardEss => (2_000, 500, 1, 1.0 / std::f64::consts::PI, 1),
            StateSpace => (2_000, 500, 1, 0.1, 1),
            SpikeSlab => (10_000, 5_000, 1, 0.1, 1),
        };
        ExperimentConfig {
            name,
            seed: 0,
            n_iter,
            burn_in,
            thin,
            lambda,
            k,
        }
    }

    /// Defaults with `n_iter` replaced; the default burn-in is scaled to keep
    /// the same fraction of the run.
    pub fn with_iters(name: ExperimentName, n_iter: usize) -> Self {
        let mut cfg = Self::defaults(name);
        cfg.burn_in = ((cfg.burn_in as u128 * n_iter as u128) / cfg.n_iter as u128) as usize;
        cfg.n_iter = n_iter;
        cfg
    }

    pub fn run_length(&self) -> Result<RunLength> {
        RunLength::new(self.n_iter, self.burn_in, self.thin)
    }

    pub fn validate(&self) -> Result<()> {
        self.run_length()?;
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::param("lambda", self.lambda));
        }
        if self.k == 0 {
            return Err(Error::param("k", 0.0));
        }
        Ok(())
    }
}

/// Retained draws of one chain with column names and experiment-specific
/// diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub columns: Vec<String>,
    pub samples: ChainOutput<f64>,
    pub extra: serde_json::Value,
}

impl ExperimentRun {
    pub fn wall_time(&self) -> f64 {
        self.samples.wall_time
    }

    /// Per-column summaries; columns too short to summarize are skipped.
    pub fn summaries(&self) -> Vec<ChainSummary> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(j, name)| ChainSummary::of(name.clone(), &self.samples.column(j)).ok())
            .collect()
    }

    pub fn summary(&self, config: &ExperimentConfig, chain: usize) -> RunSummary {
        RunSummary {
            schema_version: SCHEMA_VERSION,
            experiment: config.name.to_string(),
            seed: config.seed,
            chain,
            n_iter: config.n_iter,
            burn_in: config.burn_in,
            thin: config.thin,
            n_kept: self.samples.n_kept(),
            columns: self.columns.clone(),
            summaries: self.summaries(),
            extra: self.extra.clone(),
        }
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn normal_ks(series: &[f64], sd: f64) -> Option<f64> {
    let n = statrs::distribution::Normal::new(0.0, sd).ok()?;
    use statrs::distribution::ContinuousCDF;
    ks_statistic(series, |x| n.cdf(x)).ok()
}

/// Runs one chain. Data sets are drawn from stream 0 of the seed, so every
/// chain of a multi-chain run sees the same data; chain `c` samples on
/// stream `c + 1`.
pub fn run_experiment(config: &ExperimentConfig, chain: usize) -> Result<ExperimentRun> {
    use ExperimentName::*;
    config.validate()?;
    let run = config.run_length()?;
    let mut data_rng = RngState::with_stream(config.seed, 0);
    let mut rng = RngState::with_stream(config.seed, chain as u64 + 1);
    let latent = LatentSliceSampler::new(LatentSliceConfig::with_lambda(config.lambda))?;

    let run_latent =
        |target: &dyn crate::density::LogDensity<f64>, init: Vec<f64>, rng: &mut RngState| {
            latent.run_chain(target, init, run.n_iter, run.burn_in, run.thin, rng)
        };

    match config.name {
        Bimodal => {
            let samples = run_latent(&BimodalMixture::<f64>::default(), vec![-10.0], &mut rng)?;
            let y = samples.column(0);
            let extra = json!({
                "right_mode_fraction": mode_fraction(&y, &[0.0]).ok().map(|f| f[1]),
                "mode_switches": count_switches(&y, 0.0),
            });
            Ok(ExperimentRun {
                columns: vec!["y".into()],
                samples,
                extra,
            })
        }
        Bivariate => {
            let samples = run_latent(
                &CorrelatedGaussian::<f64>::default(),
                vec![0.0, 0.0],
                &mut rng,
            )?;
            let (a, b) = (samples.column(0), samples.column(1));
            let corr = correlation(&a, &b);
            Ok(ExperimentRun {
                columns: numbered("y", 2),
                samples,
                extra: json!({ "correlation": corr }),
            })
        }
        Gauss50 => {
            let samples = run_latent(&IsotropicGaussian::default(), vec![0.0; 50], &mut rng)?;
            let ks = normal_ks(&samples.column(0), 1.0);
            Ok(ExperimentRun {
                columns: numbered("y", 50),
                samples,
                extra: json!({ "ks_y1": ks }),
            })
        }
        Funnel | FunnelSliceBaseline => {
            let target = FunnelTarget::<f64>::default();
            let init = vec![0.0; 10];
            let samples = if config.name == Funnel {
                run_latent(&target, init, &mut rng)?
            } else {
                SteppingOutSampler::new(SteppingOutConfig::new(1.0, 10)?)?.run_chain(
                    &target,
                    init,
                    run.n_iter,
                    run.burn_in,
                    run.thin,
                    &mut rng,
                )?
            };
            let ks = normal_ks(&samples.column(0), 3.0);
            let mut columns = vec!["v".to_string()];
            columns.extend(numbered("x", 9));
            Ok(ExperimentRun {
                columns,
                samples,
                extra: json!({ "ks_v": ks }),
            })
        }
        Mdp => {
            let data = UnivariateSample::three_normal_mixture(&mut data_rng, 400)?;
            let cfg = MdpConfig {
                k: config.k,
                n_iter: config.n_iter,
                predictive_from: config.burn_in + 1,
                ..MdpConfig::default()
            };
            let out = crate::experiments::Mdp::new(&data.x, cfg)?.run(&mut rng)?;
            let mut samples = ChainOutput::with_capacity(1, out.predictive.len(), config.n_iter);
            for (i, &x) in out.predictive.iter().enumerate() {
                let it = config.burn_in + 1 + i;
                if run.keeps(it) {
                    samples.push(it, &[x]);
                }
            }
            samples.wall_time = out.wall_time;
            let grid = linspace(-10.0, 14.0, 481);
            let truth: Vec<f64> = grid
                .iter()
                .map(|&x| UnivariateSample::three_normal_mixture_density(x))
                .collect();
            let extra = match KernelDensity::unbiased_cv(&out.predictive) {
                Ok(kde) => {
                    let est = kde.evaluate(&grid);
                    json!({
                        "bandwidth": kde.bandwidth(),
                        "l1_to_truth": l1_distance(&grid, &est, &truth),
                        "modes": local_maxima(&grid, &est, 0.02),
                        "mean_occupied": mean(&out.occupied.iter().map(|&v| v as f64).collect::<Vec<_>>()),
                    })
                }
                Err(_) => json!({}),
            };
            Ok(ExperimentRun {
                columns: vec!["x_pred".into()],
                samples,
                extra,
            })
        }
        FiniteMixture => {
            let data = UnivariateSample::exponential(&mut data_rng, 400, 3.0)?;
            let cfg = FiniteMixtureConfig {
                k: config.k,
                n_iter: config.n_iter,
                burn_in: config.burn_in,
                ..FiniteMixtureConfig::default()
            };
            let out =
                crate::experiments::FiniteMixture::new(&data.x, cfg)?.run(Vec::new(), &mut rng)?;
            let mut samples = ChainOutput::with_capacity(1, run.n_kept(), config.n_iter);
            for (i, &m) in out.m_trace.iter().enumerate() {
                if run.keeps(i + 1) {
                    samples.push(i + 1, &[m as f64]);
                }
            }
            samples.wall_time = out.wall_time;
            let kept: Vec<usize> = out.m_trace[config.burn_in..].to_vec();
            let top = kept.iter().copied().max().unwrap_or(0);
            let pmf: Vec<f64> = (1..=top)
                .map(|m| kept.iter().filter(|&&v| v == m).count() as f64 / kept.len().max(1) as f64)
                .collect();
            Ok(ExperimentRun {
                columns: vec!["M".into()],
                samples,
                extra: json!({ "m_pmf": pmf, "mean_weights": out.mean_weights }),
            })
        }
        Gp | GpStandardEss => {
            let data = GpRegression::generate_data(&mut data_rng, GpRegression::N, 0.2);
            let model = GpRegression::new(data);
            let variant = if config.name == Gp {
                EllipticalVariant::LatentSlice
            } else {
                EllipticalVariant::Standard
            };
            let mut cfg = EllipticalConfig::new(variant);
            cfg.lambda = config.lambda;
            let out = gp_regression_run(&model, &cfg, run, &mut rng)?;
            let ess_f1 = crate::diagnostics::effective_sample_size(&out.samples.column(0)).ok();
            Ok(ExperimentRun {
                columns: numbered("f", model.dim()),
                samples: out.samples,
                extra: json!({ "rmse_to_truth": out.rmse, "ess_f1": ess_f1 }),
            })
        }
        StateSpace => {
            let data = crate::models::StateSpace::generate_data(&mut data_rng, 500, 0.8, 1.0, 1.0)?;
            let out = state_space_run(
                data.y,
                run,
                LatentSliceConfig::with_lambda(config.lambda),
                &mut rng,
            )?;
            let n = out.x.dim();
            let mut samples = ChainOutput::with_capacity(n + 1, out.x.n_kept(), config.n_iter);
            let mut row = Vec::with_capacity(n + 1);
            for (&it, x) in out.x.iterations().iter().zip(out.x.rows()) {
                row.clear();
                row.push(out.theta[it - 1]);
                row.extend_from_slice(x);
                samples.push(it, &row);
            }
            samples.shrink_counts = out.x.shrink_counts.clone();
            samples.wall_time = out.x.wall_time;
            let theta_mean = mean(&out.theta[config.burn_in..]);
            let mut columns = vec!["theta".to_string()];
            columns.extend(numbered("x", n));
            Ok(ExperimentRun {
                columns,
                samples,
                extra: json!({ "theta_mean": theta_mean }),
            })
        }
        SpikeSlab => {
            let model = crate::models::SpikeSlab::new(crate::models::SpikeSlab::generate_data(
                &mut data_rng,
                100,
                90,
                1.0,
            ));
            let samples = spike_slab_run(
                &model,
                run,
                LatentSliceConfig::with_lambda(config.lambda),
                &mut rng,
            )?;
            let means: Vec<f64> = (0..90).map(|j| mean(&samples.column(j))).collect();
            Ok(ExperimentRun {
                columns: numbered("beta", 90),
                samples,
                extra: json!({ "posterior_means": means }),
            })
        }
    }
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in ExperimentName::ALL {
            assert_eq!(name.as_str().parse::<ExperimentName>().unwrap(), name);
            assert!(!name.description().is_empty());
        }
        assert!("nope".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn iteration_override_scales_burn_in() {
        let cfg = ExperimentConfig::with_iters(ExperimentName::Mdp, 2_000);
        assert_eq!((cfg.n_iter, cfg.burn_in), (2_000, 1_500));
        let cfg = ExperimentConfig::with_iters(ExperimentName::Bimodal, 2_000);
        assert_eq!(cfg.run_length().unwrap().n_kept(), 2_000);
    }

    #[test]
    fn every_experiment_runs_briefly() {
        for name in ExperimentName::ALL {
            let mut cfg = ExperimentConfig::with_iters(name, 40);
            cfg.thin = 1;
            let out = run_experiment(&cfg, 0).unwrap();
            assert_eq!(out.samples.dim(), out.columns.len(), "{name}");
            assert_eq!(
                out.samples.n_kept(),
                cfg.run_length().unwrap().n_kept(),
                "{name}"
            );
        }
    }
}
