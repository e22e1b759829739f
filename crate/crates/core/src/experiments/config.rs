use std::fmt;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use super::ExperimentError;

/// Which stubbornness matrix an experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DMode {
    /// `D = I`.
    Identity,
    /// Each `d_j` is 0 with probability 0.2, else uniform on (0, 1].
    Random,
}

impl fmt::Display for DMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DMode::Identity => "identity",
            DMode::Random => "random",
        })
    }
}

impl FromStr for DMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" | "I" => Ok(DMode::Identity),
            "random" | "R" => Ok(DMode::Random),
            other => Err(format!("unknown d-mode `{other}` (expected identity or random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub size_min: usize,
    pub size_max: usize,
    pub er_p: f64,
    pub d_modes: Vec<DMode>,
    pub trials: usize,
    pub k_max: usize,
    pub seed: u64,
    pub budget: u128,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_ER_P: f64 = 0.3;

impl ExperimentConfig {
    /// Edges added between versus within two ER subgraphs of 8 to 15 nodes,
    /// 20 trials.
    pub fn between_vs_within() -> Self {
        ExperimentConfig {
            experiment: "between-vs-within".into(),
            size_min: 8,
            size_max: 15,
            er_p: DEFAULT_ER_P,
            d_modes: vec![DMode::Identity, DMode::Random],
            trials: 20,
            k_max: 10,
            seed: 0,
            budget: crate::selection::DEFAULT_ENUMERATION_BUDGET,
            out: None,
        }
    }

    /// Greedy against exhaustive selection on two ER subgraphs of 4 to 8
    /// nodes, 15 trials.
    pub fn greedy_vs_optimal() -> Self {
        ExperimentConfig {
            experiment: "greedy-vs-optimal".into(),
            size_min: 4,
            size_max: 8,
            trials: 15,
            k_max: 3,
            ..ExperimentConfig::between_vs_within()
        }
    }

    pub fn for_experiment(name: &str) -> Result<Self, ExperimentError> {
        match name {
            "between-vs-within" => Ok(ExperimentConfig::between_vs_within()),
            "greedy-vs-optimal" => Ok(ExperimentConfig::greedy_vs_optimal()),
            other => Err(ExperimentError::Config { line: 0, message: format!("unknown experiment `{other}`") }),
        }
    }

    pub fn sizes(&self) -> RangeInclusive<usize> {
        self.size_min..=self.size_max
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |message: String| Err(ExperimentError::Config { line: 0, message });
        if self.size_min == 0 || self.size_min > self.size_max {
            return fail(format!("empty size range {}..={}", self.size_min, self.size_max));
        }
        if !(0.0..=1.0).contains(&self.er_p) {
            return fail(format!("er-p {} outside [0, 1]", self.er_p));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.d_modes.is_empty() {
            return fail("no d-mode selected".into());
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Keys match the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("invalid value `{value}` for `{key}`"))
        }
        match key {
            "experiment" => self.experiment = value.to_string(),
            "seed" => self.seed = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "k-max" => self.k_max = num(key, value)?,
            "er-p" => self.er_p = num(key, value)?,
            "size-min" => self.size_min = num(key, value)?,
            "size-max" => self.size_max = num(key, value)?,
            "budget" => self.budget = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "d-mode" => {
                self.d_modes = match value {
                    "both" => vec![DMode::Identity, DMode::Random],
                    v => vec![v.parse()?],
                }
            }
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. Blank lines and
    /// `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ExperimentError::Config { line: idx + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(())
    }

    /// Every effective setting as `# key = value` lines, in a fixed order.
    pub fn header_comment(&self) -> String {
        let modes: Vec<String> = self.d_modes.iter().map(DMode::to_string).collect();
        let mut s = String::new();
        s.push_str(&format!("# experiment = {}\n", self.experiment));
        s.push_str(&format!("# seed = {}\n", self.seed));
        s.push_str(&format!("# trials = {}\n", self.trials));
        s.push_str(&format!("# k-max = {}\n", self.k_max));
        s.push_str(&format!("# er-p = {}\n", self.er_p));
        s.push_str(&format!("# size-min = {}\n", self.size_min));
        s.push_str(&format!("# size-max = {}\n", self.size_max));
        s.push_str(&format!("# d-mode = {}\n", modes.join(",")));
        s.push_str(&format!("# budget = {}\n", self.budget));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_experiment_protocols() {
        let a = ExperimentConfig::between_vs_within();
        assert_eq!((a.size_min, a.size_max, a.trials), (8, 15, 20));
        let b = ExperimentConfig::greedy_vs_optimal();
        assert_eq!((b.size_min, b.size_max, b.trials, b.k_max), (4, 8, 15, 3));
        assert_eq!(b.er_p, 0.3);
        assert_eq!(b.d_modes, vec![DMode::Identity, DMode::Random]);
    }

    #[test]
    fn config_file_overrides() {
        let mut c = ExperimentConfig::between_vs_within();
        c.apply_text("# comment\nseed = 7\ntrials=3\n\nd-mode = random\ner-p = 0.5 # inline\n").unwrap();
        assert_eq!((c.seed, c.trials, c.er_p), (7, 3, 0.5));
        assert_eq!(c.d_modes, vec![DMode::Random]);
        let err = c.apply_text("seed = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(err, ExperimentError::Config { line: 2, .. }));
        assert!(c.apply_text("trials = many").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::between_vs_within();
        c.size_min = 9;
        c.size_max = 3;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::greedy_vs_optimal();
        c.trials = 0;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::for_experiment("nope").is_err());
    }

    #[test]
    fn header_lists_every_key() {
        let h = ExperimentConfig::greedy_vs_optimal().header_comment();
        for key in ["experiment", "seed", "trials", "k-max", "er-p", "size-min", "size-max", "d-mode", "budget"] {
            assert!(h.contains(&format!("# {key} = ")), "{key}");
        }
    }
}
