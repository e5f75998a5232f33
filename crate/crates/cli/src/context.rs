use std::path::PathBuf;
use std::sync::OnceLock;

use eistwist::eisenstein::{ClassicalScattering, EisensteinParams};
use eistwist::group::{cusp_set, CuspData};
use eistwist::newform::{load_cache, save_cache, ModularSymbols, NewformData, SymbolSource, ZeroSymbols, CANONICAL_LEVEL};
use eistwist::{Complex64, Exec};
use log::{info, warn};
use serde::Serialize;

use crate::config::{NewformSource, RunConfig};
use crate::error::CliError;

/// The twist in use: a genuine newform, or `ψ ≡ 0` at level one.
pub enum Twist {
    Zero(ZeroSymbols),
    Newform(Box<ModularSymbols>),
}

impl Twist {
    pub fn source(&self) -> &dyn SymbolSource {
        match self {
            Twist::Zero(z) => z,
            Twist::Newform(m) => m.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CacheStats {
    pub path: Option<PathBuf>,
    pub loaded: usize,
    /// Set when an existing file was rejected and ψ recomputed from scratch.
    pub rejected: Option<String>,
    pub hits: u64,
    pub misses: u64,
    pub saved: usize,
}

/// Shared state for one run: the cusp at `∞`, the twist (built on first use)
/// and the classical scattering matrix.
pub struct Context {
    pub config: RunConfig,
    pub cusp: CuspData,
    twist: OnceLock<Result<Twist, String>>,
    scattering: OnceLock<Result<ClassicalScattering, eistwist::Error>>,
    cache: std::sync::Mutex<CacheStats>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let cusp = cusp_set(config.level)?.remove(0);
        Ok(Self {
            config,
            cusp,
            twist: OnceLock::new(),
            scattering: OnceLock::new(),
            cache: Default::default(),
        })
    }

    pub fn level(&self) -> u64 {
        self.config.level
    }

    pub fn params(&self, s: Complex64) -> EisensteinParams {
        EisensteinParams::new(self.cusp.clone(), s)
            .with_tolerance(self.config.tolerance.series)
            .with_ceiling(self.config.limits.c_max_ceiling)
            .with_exec(Exec::Parallel)
    }

    pub fn scattering(&self) -> Result<&ClassicalScattering, CliError> {
        self.scattering
            .get_or_init(|| ClassicalScattering::new(self.level()))
            .as_ref()
            .map_err(|e| CliError::Numeric(e.clone()))
    }

    pub fn twist(&self) -> Result<&Twist, CliError> {
        self.twist
            .get_or_init(|| self.build_twist().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| CliError::Config(e.clone()))
    }

    pub fn symbols(&self) -> Result<&dyn SymbolSource, CliError> {
        Ok(self.twist()?.source())
    }

    fn cache_path(&self) -> PathBuf {
        self.config.cache.join(format!("psi-{}.bin", self.level()))
    }

    fn build_twist(&self) -> Result<Twist, CliError> {
        let level = self.level();
        let nf = match &self.config.newform {
            NewformSource::Internal if level == 1 => return Ok(Twist::Zero(ZeroSymbols { level: 1 })),
            NewformSource::Internal if level == CANONICAL_LEVEL => NewformData::canonical(self.config.limits.n_max),
            NewformSource::Internal => {
                return Err(CliError::Config(format!(
                    "no internal newform at level {level}; supply newform.path"
                )))
            }
            NewformSource::File { path } => {
                let nf = NewformData::from_json_file(path)?;
                if nf.level() != level {
                    return Err(CliError::Config(format!(
                        "{} holds a newform of level {}, not {level}",
                        path.display(),
                        nf.level()
                    )));
                }
                nf
            }
        };
        let symbols = ModularSymbols::new(nf)?;
        let path = self.cache_path();
        let mut stats = self.cache.lock().expect("cache stats");
        stats.path = Some(path.clone());
        match load_cache(&path, symbols.newform(), symbols.cache()) {
            Ok(n) => {
                info!("loaded {n} ψ values from {}", path.display());
                stats.loaded = n;
            }
            Err(e) => {
                warn!("ignoring ψ cache: {e}; values will be recomputed");
                stats.rejected = Some(e.to_string());
            }
        }
        Ok(Twist::Newform(Box::new(symbols)))
    }

    /// Write the ψ cache back (if a newform was used) and return its statistics.
    pub fn finish(&self) -> Result<CacheStats, CliError> {
        let mut stats = self.cache.lock().expect("cache stats").clone();
        if let Some(Ok(Twist::Newform(m))) = self.twist.get() {
            let cache = m.cache();
            stats.hits = cache.hits();
            stats.misses = cache.misses();
            let path = self.cache_path();
            std::fs::create_dir_all(&self.config.cache).map_err(|e| CliError::io(&self.config.cache, e))?;
            save_cache(&path, m.newform(), cache)?;
            stats.saved = cache.len();
        }
        Ok(stats)
    }
}
