//! Experiment catalog, configuration and report files behind the `atlab` CLI.

pub mod config;
mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
pub use config::{ExperimentConfig, OneOrMany};
pub use report::{Criterion, CsvRecord, Report};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ATLAB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub description: &'static str,
    /// The identity or statement the experiment checks, as written in the source.
    pub anchor: &'static str,
}

const CATALOG: [ExperimentInfo; 10] = [
    ExperimentInfo {
        id: "thm21",
        description: "Cauchy-time Brownian motion: plane-wave residual and quadrature/MC cross-check",
        anchor: "∂²u/∂t² = −2Δf(x)/(πt) − Δ²u(t,x)",
    },
    ExperimentInfo {
        id: "thm22",
        description: "Cauchy-time process with the exp(−|C(t)|/ε) weight",
        anchor: "negative exponential of |C(t)|/ε",
    },
    ExperimentInfo {
        id: "thm23",
        description: "Feynman-Kac Cauchy-time process: literal and derivation-consistent assemblies",
        anchor: "−c(x)Δu(t,x) − Δ²u(t,x)",
    },
    ExperimentInfo {
        id: "thm24",
        description: "ICTBAP: closed form, complex quadrature and the Kuramoto-Sivashinsky-form identity",
        anchor: "imaginary-Cauchy-time-Brownian-angle process (ICTBAP)",
    },
    ExperimentInfo {
        id: "thm25",
        description: "alpha-time Brownian motion for alpha = 1/m: order-2m identity",
        anchor: "be rational α=l/m, where l and m",
    },
    ExperimentInfo {
        id: "btp",
        description: "Brownian-time process (alpha = 2): first-order identity",
        anchor: "Δf(x)/√(πt)",
    },
    ExperimentInfo {
        id: "exit",
        description: "Mean exit time of the Cauchy-time Brownian motion from a ball",
        anchor: "Δ u(x) = −1",
    },
    ExperimentInfo {
        id: "skbm",
        description: "Subordinate killed Brownian motion on (0, π): spectral PDE, semigroup and MC checks",
        anchor: "k, m are relatively prime integers",
    },
    ExperimentInfo {
        id: "samplers",
        description: "Characteristic-function and Laplace-transform checks of the exact samplers",
        anchor: "exp(−t|ξ|^α)",
    },
    ExperimentInfo {
        id: "densities",
        description: "Kernel PDEs of the Cauchy and 1/2-subordinator densities; density cross-checks",
        anchor: "(∂²/∂s²+∂²/∂t²)p_t^1(0,s)=0",
    },
];

/// The fixed experiment catalog.
pub fn list_experiments() -> &'static [ExperimentInfo] {
    &CATALOG
}

pub fn find_experiment(id: &str) -> Result<&'static ExperimentInfo> {
    CATALOG.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownExperiment {
        id: id.to_string(),
        known: CATALOG.iter().map(|e| e.id).collect::<Vec<_>>().join(", "),
    })
}

/// Runs an experiment in memory on a pool of `config.workers` threads
/// (rayon's default when unset).
///
/// Invalid configurations are errors; numerical failures are recorded in
/// the report.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let info = find_experiment(&config.experiment)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        if w == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| experiments::run(info, config))
}

/// Where reports go: `config.out_dir`, else `$ATLAB_OUT_DIR`, else `./atlab-out`.
pub fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("atlab-out"))
}

/// Runs an experiment and writes `<id>.json` and `<id>.csv`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Report, PathBuf, PathBuf)> {
    let report = run(config)?;
    let (json, csv) = report.write(&output_dir(config))?;
    Ok((report, json, csv))
}

/// Convenience for tests and bindings: load a config file and run it.
pub fn run_config_file(path: &Path) -> Result<Report> {
    run(&ExperimentConfig::from_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_fixed() {
        let ids: Vec<&str> = list_experiments().iter().map(|e| e.id).collect();
        assert_eq!(
            ids,
            ["thm21", "thm22", "thm23", "thm24", "thm25", "btp", "exit", "skbm", "samplers", "densities"]
        );
        assert!(list_experiments().iter().all(|e| !e.anchor.is_empty()));
    }

    #[test]
    fn unknown_id_lists_catalog() {
        let err = find_experiment("thm99").unwrap_err().to_string();
        assert!(err.contains("thm21") && err.contains("densities"), "{err}");
    }
}
