use std::fmt;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use rank1_core::pairs::{Mode, PairKind};
use rank1_core::tolerance::KS_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Density,
    Sample,
    Compare,
    HaarCheck,
    Mixing,
    Plancherel,
    LimitScan,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// Every input that determines an output. Unused fields stay `None` and are
/// omitted from the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_alpha: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_2alpha: Option<u32>,
}

/// Experiment flags shared by all subcommands; each subcommand rejects the
/// ones it does not read.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Pair name, e.g. su-compact or so-noncompact.
    #[arg(long)]
    pub pair: Option<PairKind>,
    /// Multiplicity convention: paper or standard.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Comma-separated list of sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    /// First radial parameter, radians.
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Second radial parameter, radians.
    #[arg(long, allow_negative_numbers = true)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub stream: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of grid cells for density output.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Longest product length for the mixing chain.
    #[arg(long)]
    pub factors: Option<usize>,
    /// Largest truncation level for the cn table.
    #[arg(long)]
    pub l_max: Option<u64>,
    /// Sample exp(t1 H) k exp(t2 H) instead of two independent class elements.
    #[arg(long)]
    pub reduced: Option<bool>,
    /// KS threshold for the mode verdict.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Override the product-density kernel exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub kernel_exponent: Option<f64>,
    /// Override the root multiplicity of the radial density.
    #[arg(long)]
    pub m_alpha: Option<u32>,
    /// Override the double-root multiplicity of the radial density.
    #[arg(long)]
    pub m_2alpha: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pair,
    Mode,
    N,
    NList,
    T1,
    T2,
    Samples,
    Seed,
    Stream,
    Eps,
    Grid,
    Factors,
    LMax,
    Reduced,
    Threshold,
    KernelExponent,
    MAlpha,
    M2Alpha,
}

impl Field {
    fn flag(self) -> &'static str {
        match self {
            Field::Pair => "--pair",
            Field::Mode => "--mode",
            Field::N => "--n",
            Field::NList => "--n-list",
            Field::T1 => "--t1",
            Field::T2 => "--t2",
            Field::Samples => "--samples",
            Field::Seed => "--seed",
            Field::Stream => "--stream",
            Field::Eps => "--eps",
            Field::Grid => "--grid",
            Field::Factors => "--factors",
            Field::LMax => "--l-max",
            Field::Reduced => "--reduced",
            Field::Threshold => "--threshold",
            Field::KernelExponent => "--kernel-exponent",
            Field::MAlpha => "--m-alpha",
            Field::M2Alpha => "--m-2alpha",
        }
    }
}

fn fields(cmd: Command) -> &'static [Field] {
    use Field::*;
    match cmd {
        Command::Density => &[Pair, Mode, N, T1, T2, Grid, KernelExponent],
        Command::Sample => &[Pair, Mode, N, T1, T2, Samples, Seed, Stream, Reduced],
        Command::Compare => &[Pair, N, T1, T2, Samples, Seed, Stream, Threshold],
        Command::HaarCheck => &[Pair, Mode, N, Samples, Seed, Stream, MAlpha, M2Alpha],
        Command::Mixing => &[N, T1, T2, Factors, Samples, Seed, Stream],
        Command::Plancherel => &[NList, T1, T2, Eps, LMax],
        Command::LimitScan => &[Pair, Mode, NList, T1, T2, Eps],
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

impl ExperimentConfig {
    fn empty(command: Command) -> Self {
        ExperimentConfig {
            command,
            pair: None,
            mode: None,
            n: None,
            n_list: None,
            t1: None,
            t2: None,
            samples: None,
            seed: None,
            stream: None,
            eps: None,
            grid: None,
            factors: None,
            l_max: None,
            reduced: None,
            threshold: None,
            kernel_exponent: None,
            m_alpha: None,
            m_2alpha: None,
        }
    }

    fn is_set(&self, f: Field) -> bool {
        match f {
            Field::Pair => self.pair.is_some(),
            Field::Mode => self.mode.is_some(),
            Field::N => self.n.is_some(),
            Field::NList => self.n_list.is_some(),
            Field::T1 => self.t1.is_some(),
            Field::T2 => self.t2.is_some(),
            Field::Samples => self.samples.is_some(),
            Field::Seed => self.seed.is_some(),
            Field::Stream => self.stream.is_some(),
            Field::Eps => self.eps.is_some(),
            Field::Grid => self.grid.is_some(),
            Field::Factors => self.factors.is_some(),
            Field::LMax => self.l_max.is_some(),
            Field::Reduced => self.reduced.is_some(),
            Field::Threshold => self.threshold.is_some(),
            Field::KernelExponent => self.kernel_exponent.is_some(),
            Field::MAlpha => self.m_alpha.is_some(),
            Field::M2Alpha => self.m_2alpha.is_some(),
        }
    }

    /// Overlay command-line flags on an optional base loaded from a file,
    /// check that only fields read by the command are present, and fill
    /// defaults.
    pub fn resolve(command: Command, base: Option<ExperimentConfig>, flags: Flags) -> Result<Self, UsageError> {
        let mut c = match base {
            Some(b) if b.command != command => {
                return Err(UsageError(format!(
                    "config file is for `{}`, not `{command}`",
                    b.command
                )))
            }
            Some(b) => b,
            None => ExperimentConfig::empty(command),
        };
        macro_rules! overlay {
            ($($f:ident),*) => { $( if flags.$f.is_some() { c.$f = flags.$f; } )* };
        }
        overlay!(
            pair, mode, n, n_list, t1, t2, samples, seed, stream, eps, grid, factors, l_max, reduced,
            threshold, kernel_exponent, m_alpha, m_2alpha
        );

        let used = fields(command);
        let all = [
            Field::Pair,
            Field::Mode,
            Field::N,
            Field::NList,
            Field::T1,
            Field::T2,
            Field::Samples,
            Field::Seed,
            Field::Stream,
            Field::Eps,
            Field::Grid,
            Field::Factors,
            Field::LMax,
            Field::Reduced,
            Field::Threshold,
            Field::KernelExponent,
            Field::MAlpha,
            Field::M2Alpha,
        ];
        if let Some(f) = all.iter().find(|f| c.is_set(**f) && !used.contains(f)) {
            return Err(UsageError(format!("{} is not used by `{command}`", f.flag())));
        }

        let need = |set: bool, f: Field| {
            if set {
                Ok(())
            } else {
                Err(UsageError(format!("`{command}` requires {}", f.flag())))
            }
        };
        for f in used {
            match f {
                Field::Pair | Field::Mode | Field::N | Field::NList | Field::T1 | Field::T2 => {
                    need(c.is_set(*f), *f)?
                }
                _ => {}
            }
        }
        match command {
            Command::Density => {
                c.grid.get_or_insert(512);
            }
            Command::Sample => {
                c.samples.get_or_insert(10_000);
                c.reduced.get_or_insert(true);
            }
            Command::Compare => {
                c.samples.get_or_insert(200_000);
                c.threshold.get_or_insert(KS_THRESHOLD);
            }
            Command::HaarCheck => {
                c.samples.get_or_insert(200_000);
            }
            Command::Mixing => {
                c.samples.get_or_insert(20_000);
                c.factors.get_or_insert(20);
            }
            Command::Plancherel => {
                c.eps.get_or_insert(1e-4);
                c.l_max.get_or_insert(6);
            }
            Command::LimitScan => {
                c.eps.get_or_insert(0.05);
            }
        }
        if fields(command).contains(&Field::Seed) {
            c.seed.get_or_insert(0);
            c.stream.get_or_insert(0);
        }
        if c.m_alpha.is_some() != c.m_2alpha.is_some() {
            return Err(UsageError("--m-alpha and --m-2alpha must be given together".into()));
        }
        if c.samples == Some(0) || c.grid == Some(0) || c.factors == Some(0) {
            return Err(UsageError("counts must be at least 1".into()));
        }
        Ok(c)
    }
}

/// Read a config from a file: a bare config object, any JSON output that
/// embeds one under `config`, or a CSV whose first line is `# config: {...}`.
pub fn load(text: &str) -> Result<ExperimentConfig, UsageError> {
    let bad = |e: serde_json::Error| UsageError(format!("invalid config: {e}"));
    if let Some(rest) = text.strip_prefix(crate::emit::CONFIG_PREFIX) {
        let line = rest.lines().next().unwrap_or("");
        return serde_json::from_str(line).map_err(bad);
    }
    let v: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
    match v.get("config") {
        Some(inner) if v.get("command").is_none() => serde_json::from_value(inner.clone()).map_err(bad),
        _ => serde_json::from_value(v).map_err(bad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn density_flags() -> Flags {
        Flags {
            pair: Some("su-compact".parse().unwrap()),
            mode: Some(Mode::Paper),
            n: Some(4),
            t1: Some(0.5),
            t2: Some(0.6),
            ..Flags::default()
        }
    }

    #[test]
    fn resolve_fills_defaults() {
        let c = ExperimentConfig::resolve(Command::Density, None, density_flags()).unwrap();
        assert_eq!(c.grid, Some(512));
        assert_eq!(c.seed, None);
    }

    #[test]
    fn unused_flag_is_rejected() {
        let mut f = density_flags();
        f.samples = Some(5);
        let e = ExperimentConfig::resolve(Command::Density, None, f).unwrap_err();
        assert!(e.0.contains("--samples"));
    }

    #[test]
    fn missing_required_flag_is_rejected() {
        let mut f = density_flags();
        f.t2 = None;
        assert!(ExperimentConfig::resolve(Command::Density, None, f).is_err());
    }

    #[test]
    fn flags_override_file() {
        let base = ExperimentConfig::resolve(Command::Density, None, density_flags()).unwrap();
        let c = ExperimentConfig::resolve(
            Command::Density,
            Some(base),
            Flags { grid: Some(64), ..Flags::default() },
        )
        .unwrap();
        assert_eq!(c.grid, Some(64));
        assert_eq!(c.n, Some(4));
    }

    #[test]
    fn serialized_config_round_trips() {
        let c = ExperimentConfig::resolve(Command::Density, None, density_flags()).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(load(&text).unwrap(), c);
        let wrapped = format!("{{\"config\":{text},\"x\":1}}");
        assert_eq!(load(&wrapped).unwrap(), c);
        let csv = format!("{}{text}\nu,pdf\n", crate::emit::CONFIG_PREFIX);
        assert_eq!(load(&csv).unwrap(), c);
    }

    #[test]
    fn command_mismatch_is_rejected() {
        let c = ExperimentConfig::resolve(Command::Density, None, density_flags()).unwrap();
        assert!(ExperimentConfig::resolve(Command::Sample, Some(c), Flags::default()).is_err());
    }
}
