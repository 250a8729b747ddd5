//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment, lists are comma separated.
//! Unknown or repeated keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lagrem::CompositionMode;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

pub const DEFAULT_XZ_OFFSET: f64 = lagrem::rootfind::DEFAULT_XZ_OFFSET;
pub const DEFAULT_N_STEPS: usize = 10_000;
pub const DEFAULT_SCAN_POINTS: usize = lagrem::rootfind::DEFAULT_SCAN_POINTS;
pub const DEFAULT_PROBE_POINTS: usize = lagrem::enhance::DEFAULT_PROBE_POINTS;
pub const MIN_N_STEPS: usize = 10;

/// Configs shipped with the binary, usable by name from any directory.
pub const BUNDLED: [(&str, &str); 2] = [
    ("example1.cfg", include_str!("../configs/example1.cfg")),
    ("example2.cfg", include_str!("../configs/example2.cfg")),
];

/// How the branch trajectories are combined before enhancement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchPoints {
    /// Enhance the first branch only.
    None,
    /// Choose switch points from the constraint flags.
    Auto,
    At(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub function: String,
    pub lo: f64,
    pub hi: f64,
    pub x0: f64,
    pub xz_offset: f64,
    pub n_steps: usize,
    /// Explicit initial values; skips the root search when present.
    pub seeds: Option<Vec<f64>>,
    pub switch_points: SwitchPoints,
    /// 1-based branch numbers fed to the splice, in order.
    pub splice_branches: Option<Vec<usize>>,
    #[serde(with = "mode_name")]
    pub mode: CompositionMode,
    pub output_dir: PathBuf,
    pub search_lo: f64,
    pub search_hi: f64,
    pub scan_points: usize,
    pub probe_points: usize,
    pub include_near: bool,
}

mod mode_name {
    use lagrem::CompositionMode;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(mode: &CompositionMode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(mode.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CompositionMode, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub n_steps: Option<usize>,
    pub mode: Option<CompositionMode>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let mut pairs: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(
                    line_no,
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim().to_string();
            if pairs
                .insert(key.clone(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(config_err(line_no, format!("duplicate key `{key}`")));
            }
        }
        let mut fields = Fields { pairs };

        let function = fields
            .take("function")?
            .map(|(_, v)| v)
            .ok_or_else(|| missing("function"))?;
        let lo = fields.number("lo")?.ok_or_else(|| missing("lo"))?;
        let hi = fields.number("hi")?.ok_or_else(|| missing("hi"))?;
        let x0 = fields.number("x0")?.ok_or_else(|| missing("x0"))?;
        let xz_offset = fields.number("xz_offset")?.unwrap_or(DEFAULT_XZ_OFFSET);
        let n_steps = fields.integer("n_steps")?.unwrap_or(DEFAULT_N_STEPS);
        let seeds = fields.list::<f64>("seeds")?;
        let switch_points = match fields.take("switch_points")? {
            None => SwitchPoints::None,
            Some((_, v)) if v == "auto" => SwitchPoints::Auto,
            Some((line, v)) => SwitchPoints::At(parse_list(line, "switch_points", &v)?),
        };
        let splice_branches = fields.list::<usize>("splice_branches")?;
        let mode = match fields.take("mode")? {
            None => CompositionMode::default(),
            Some((line, v)) => v.parse().map_err(|e| config_err(line, format!("{e}")))?,
        };
        let output_dir = fields
            .take("output_dir")?
            .map(|(_, v)| PathBuf::from(v))
            .unwrap_or_else(|| "out".into());
        let search_lo = fields.number("search_lo")?.unwrap_or(lo);
        let search_hi = fields.number("search_hi")?.unwrap_or(hi);
        let scan_points = fields
            .integer("scan_points")?
            .unwrap_or(DEFAULT_SCAN_POINTS);
        let probe_points = fields
            .integer("probe_points")?
            .unwrap_or(DEFAULT_PROBE_POINTS);
        let include_near = match fields.take("include_near")? {
            None => false,
            Some((line, v)) => v.parse().map_err(|_| {
                config_err(
                    line,
                    format!("`include_near` must be true or false, got `{v}`"),
                )
            })?,
        };
        if let Some((key, (line, _))) = fields.pairs.into_iter().next() {
            return Err(config_err(line, format!("unknown key `{key}`")));
        }

        let config = ExperimentConfig {
            function,
            lo,
            hi,
            x0,
            xz_offset,
            n_steps,
            seeds,
            switch_points,
            splice_branches,
            mode,
            output_dir,
            search_lo,
            search_hi,
            scan_points,
            probe_points,
            include_near,
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads `path`, falling back to a bundled config of the same file name.
    pub fn load(path: &Path) -> Result<Self, AppError> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(err) => match bundled(path) {
                Some(text) => Self::parse(text),
                None => Err(AppError::Config(format!(
                    "cannot read {}: {err}",
                    path.display()
                ))),
            },
        }
    }

    pub fn bundled(name: &str) -> Result<Self, AppError> {
        let text = bundled(Path::new(name))
            .ok_or_else(|| AppError::Config(format!("no bundled config `{name}`")))?;
        Self::parse(text)
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self, AppError> {
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(n) = o.n_steps {
            self.n_steps = n;
        }
        if let Some(mode) = o.mode {
            self.mode = mode;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn x_z(&self) -> f64 {
        self.x0 + self.xz_offset
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let bad = |msg: String| Err(AppError::Config(msg));
        let reals = [
            ("lo", self.lo),
            ("hi", self.hi),
            ("x0", self.x0),
            ("xz_offset", self.xz_offset),
            ("search_lo", self.search_lo),
            ("search_hi", self.search_hi),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("`{name}` must be finite, got {v}"));
        }
        if !(self.lo <= self.x0 && self.x0 < self.hi) {
            return bad(format!(
                "need lo <= x0 < hi, got lo={}, x0={}, hi={}",
                self.lo, self.x0, self.hi
            ));
        }
        if !(self.xz_offset > 0.0) {
            return bad(format!(
                "`xz_offset` must be positive, got {}",
                self.xz_offset
            ));
        }
        if !(self.x_z() < self.hi) {
            return bad(format!(
                "x0 + xz_offset = {} must lie below hi = {}",
                self.x_z(),
                self.hi
            ));
        }
        if self.n_steps < MIN_N_STEPS {
            return bad(format!(
                "`n_steps` must be at least {MIN_N_STEPS}, got {}",
                self.n_steps
            ));
        }
        if !(self.search_lo < self.search_hi) {
            return bad(format!(
                "empty search window [{}, {}]",
                self.search_lo, self.search_hi
            ));
        }
        if self.scan_points < 100 {
            return bad(format!(
                "`scan_points` must be at least 100, got {}",
                self.scan_points
            ));
        }
        if self.probe_points < 2 {
            return bad(format!(
                "`probe_points` must be at least 2, got {}",
                self.probe_points
            ));
        }
        if let Some(seeds) = &self.seeds {
            if seeds.is_empty() || seeds.iter().any(|s| !s.is_finite()) {
                return bad("`seeds` must be a non-empty list of finite numbers".into());
            }
        }
        if let SwitchPoints::At(points) = &self.switch_points {
            if points.is_empty() {
                return bad("`switch_points` must not be empty".into());
            }
            if points.iter().any(|p| !(self.x_z() < *p && *p < self.hi)) {
                return bad(format!(
                    "switch points must lie in ({}, {})",
                    self.x_z(),
                    self.hi
                ));
            }
            if points.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("switch points must be strictly increasing".into());
            }
        }
        if let Some(branches) = &self.splice_branches {
            if branches.len() < 2 || branches.contains(&0) {
                return bad("`splice_branches` needs at least two 1-based branch numbers".into());
            }
            if let SwitchPoints::At(points) = &self.switch_points {
                if points.len() + 1 != branches.len() {
                    return bad(format!(
                        "{} switch points need {} splice branches, got {}",
                        points.len(),
                        points.len() + 1,
                        branches.len()
                    ));
                }
            }
        }
        lagrem::parse(&self.function).map_err(|e| AppError::Config(format!("`function`: {e}")))?;
        Ok(())
    }
}

fn bundled(path: &Path) -> Option<&'static str> {
    let name = path.file_name()?.to_str()?;
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

fn config_err(line: usize, msg: String) -> AppError {
    AppError::Config(format!("line {line}: {msg}"))
}

fn missing(key: &str) -> AppError {
    AppError::Config(format!("missing required key `{key}`"))
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>, AppError> {
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse()
                .map_err(|_| config_err(line, format!("`{key}`: cannot parse `{item}`")))
        })
        .collect()
}

struct Fields {
    pairs: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Result<Option<(usize, String)>, AppError> {
        match self.pairs.remove(key) {
            Some((line, v)) if v.is_empty() => {
                Err(config_err(line, format!("`{key}` has no value")))
            }
            other => Ok(other),
        }
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, AppError> {
        self.parsed(key)
    }

    fn integer(&mut self, key: &str) -> Result<Option<usize>, AppError> {
        self.parsed(key)
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, AppError> {
        match self.take(key)? {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>, AppError> {
        match self.take(key)? {
            None => Ok(None),
            Some((line, v)) => parse_list(line, key, &v).map(Some),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "function = x^3\nlo = 0\nhi = 9\nx0 = 0\n";

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.xz_offset, 0.0005);
        assert_eq!(c.n_steps, 10_000);
        assert_eq!(c.mode, CompositionMode::Factored);
        assert_eq!(c.switch_points, SwitchPoints::None);
        assert_eq!((c.search_lo, c.search_hi), (0.0, 9.0));
        assert_eq!(c.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn comments_lists_and_auto() {
        let text = format!("{MINIMAL}# comment\nseeds = 0.1, 0.2 # trailing\nswitch_points = auto\nmode = direct\n");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.seeds, Some(vec![0.1, 0.2]));
        assert_eq!(c.switch_points, SwitchPoints::Auto);
        assert_eq!(c.mode, CompositionMode::Direct);
    }

    #[test]
    fn validation_errors() {
        let cases = [
            "function = x^3\nlo = 0\nhi = 0\nx0 = 0\n",
            "function = x^3\nlo = 0\nhi = 9\nx0 = 9\n",
            &format!("{MINIMAL}xz_offset = 0\n"),
            &format!("{MINIMAL}n_steps = 5\n"),
            &format!("{MINIMAL}colour = blue\n"),
            &format!("{MINIMAL}lo = 1\n"),
            &format!("{MINIMAL}switch_points = 20\n"),
            &format!("{MINIMAL}mode = sideways\n"),
            "function = x^\nlo = 0\nhi = 9\nx0 = 0\n",
            "lo = 0\nhi = 9\nx0 = 0\n",
            "function = x\nlo = zero\nhi = 9\nx0 = 0\n",
            "function x\n",
        ];
        for text in cases {
            let err = ExperimentConfig::parse(text).unwrap_err();
            assert!(matches!(err, AppError::Config(_)), "{text}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides {
            output_dir: Some("elsewhere".into()),
            n_steps: Some(200),
            mode: Some(CompositionMode::Direct),
        };
        let c = ExperimentConfig::parse(MINIMAL)
            .unwrap()
            .with_overrides(&o)
            .unwrap();
        assert_eq!(c.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(c.n_steps, 200);
        assert_eq!(c.mode, CompositionMode::Direct);
        let o = Overrides {
            n_steps: Some(3),
            ..Overrides::default()
        };
        assert!(ExperimentConfig::parse(MINIMAL)
            .unwrap()
            .with_overrides(&o)
            .is_err());
    }

    #[test]
    fn bundled_configs_parse() {
        for (name, _) in BUNDLED {
            ExperimentConfig::bundled(name).unwrap();
        }
        let c = ExperimentConfig::load(Path::new("/nonexistent/example2.cfg")).unwrap();
        assert_eq!(c.function, "ln(1+x)");
        assert!(ExperimentConfig::load(Path::new("/nonexistent/other.cfg")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::bundled("example1.cfg").unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }
}
