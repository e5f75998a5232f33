use std::path::{Path, PathBuf};

use eistwist::group::arith::is_squarefree;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Where the weight-two newform comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "source")]
pub enum NewformSource {
    /// Coefficients generated by point counting (level 37 only).
    Internal,
    /// A JSON file `{ "level", "fricke_eigenvalue", "coefficients" }`.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Certified tail target for every coset sum.
    pub series: f64,
    /// Absolute threshold for the ψ identities.
    pub psi: f64,
    /// Relative threshold between the two Fourier-coefficient methods.
    pub agreement: f64,
    pub scattering: f64,
    /// Relative threshold between the direct and continued `Λ̃`.
    pub lambda: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            series: 1e-9,
            psi: 1e-9,
            agreement: 1e-4,
            scattering: 1e-8,
            lambda: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub c_max_ceiling: f64,
    pub n_max: usize,
    pub quadrature_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            c_max_ceiling: 16384.0,
            n_max: 2000,
            quadrature_budget: 1 << 20,
        }
    }
}

/// `s = re + i·im` over the product of two evenly spaced axes, for each `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    /// `[min, max, count]`.
    pub re: (f64, f64, usize),
    pub im: (f64, f64, usize),
    pub w: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            re: (-1.2, 1.2, 3),
            im: (-0.8, 0.8, 3),
            w: vec![2.6],
        }
    }
}

fn axis((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl Grid {
    pub fn re_values(&self) -> Vec<f64> {
        axis(self.re)
    }

    pub fn im_values(&self) -> Vec<f64> {
        axis(self.im)
    }

    pub fn len(&self) -> usize {
        self.re.2 * self.im.2 * self.w.len()
    }

    /// Parse `RE_MIN:RE_MAX:N,IM_MIN:IM_MAX:N` (the `w` list is kept).
    pub fn parse_override(&self, text: &str) -> Result<Grid, CliError> {
        let bad = || CliError::Config(format!("grid {text:?}: expected RE_MIN:RE_MAX:N,IM_MIN:IM_MAX:N"));
        let mut parts = text.split(',');
        let mut axis = || -> Result<(f64, f64, usize), CliError> {
            let spec = parts.next().ok_or_else(bad)?;
            let f: Vec<&str> = spec.split(':').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            Ok((
                f[0].trim().parse().map_err(|_| bad())?,
                f[1].trim().parse().map_err(|_| bad())?,
                f[2].trim().parse().map_err(|_| bad())?,
            ))
        };
        let re = axis()?;
        let im = axis()?;
        Ok(Grid {
            re,
            im,
            w: self.w.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub level: u64,
    pub newform: NewformSource,
    pub tolerance: Tolerances,
    pub limits: Limits,
    pub grid: Grid,
    pub out: PathBuf,
    pub cache: PathBuf,
    /// Worker threads for concurrent checks; 0 means one per core.
    pub workers: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            level: 37,
            newform: NewformSource::Internal,
            tolerance: Tolerances::default(),
            limits: Limits::default(),
            grid: Grid::default(),
            out: PathBuf::from("eistwist-out"),
            cache: PathBuf::from("eistwist-cache"),
            workers: 0,
            seed: 7,
        }
    }
}

/// Flag overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub level: Option<u64>,
    pub tolerance: Option<f64>,
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `--tolerance` sets the coset-sum tail target.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(l) = o.level {
            self.level = l;
        }
        if let Some(t) = o.tolerance {
            self.tolerance.series = t;
        }
        if let Some(g) = &o.grid {
            self.grid = self.grid.parse_override(g)?;
        }
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        if let Some(p) = &o.cache {
            self.cache = p.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.level == 0 || !is_squarefree(self.level) {
            return Err(CliError::Config(format!("level {} is not squarefree", self.level)));
        }
        let t = &self.tolerance;
        for (name, v) in [
            ("series", t.series),
            ("psi", t.psi),
            ("agreement", t.agreement),
            ("scattering", t.scattering),
            ("lambda", t.lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance.{name} = {v} must be positive")));
            }
        }
        if self.grid.len() == 0 {
            return Err(CliError::Config("the (s, w) grid is empty".into()));
        }
        if self.grid.w.iter().any(|w| *w <= 2.0) {
            return Err(CliError::Config("every grid w needs Re(w) > 2".into()));
        }
        if !(self.limits.c_max_ceiling >= 1.0) || self.limits.n_max == 0 || self.limits.quadrature_budget == 0 {
            return Err(CliError::Config("limits must be positive".into()));
        }
        Ok(())
    }

    /// Short digest of the settings that affect results.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.cache = PathBuf::new();
        c.workers = 0;
        let text = serde_json::to_string(&c).expect("config serializes");
        format!("{:016x}", fnv1a(text.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_and_overrides() {
        let cfg = RunConfig::from_toml(
            r#"
            level = 1
            out = "x"
            [tolerance]
            series = 1e-8
            [grid]
            re = [0.0, 1.0, 2]
            im = [0.0, 0.0, 1]
            w = [2.5, 3.0]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.level, 1);
        assert_eq!(cfg.grid.len(), 4);
        assert_eq!(cfg.tolerance.series, 1e-8);
        let mut c2 = cfg.clone();
        c2.apply(&Overrides {
            level: Some(37),
            grid: Some("-1:1:3,-0.5:0.5:3".into()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(c2.level, 37);
        assert_eq!(c2.grid.len(), 18);
        assert_eq!(c2.grid.re_values(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn invalid_configs() {
        let mut c = RunConfig::default();
        c.level = 4;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.grid.re.2 = 0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.tolerance.psi = 0.0;
        assert!(c.validate().is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::default().grid.parse_override("1:2").is_err());
    }
}
