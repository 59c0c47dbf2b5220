//! TOML run configuration: schema, validation, and the canonical digest
//! used by the run manifest.
//!
//! One file drives a whole experiment; command-line flags only override
//! individual fields. Unknown keys are rejected so a typo cannot silently
//! fall back to a default.

use crate::bch::CodeSpec;
use crate::policy::{ParallelismLevel, SelectorKind};
use crate::sim::{EvalPolicy, SelectRule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn parse_hex_mask(s: &str, field: &str) -> Result<u32> {
    let t = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u32::from_str_radix(t, 16)
        .map_err(|_| Error::config(format!("{field}: expected a hex bit mask, got {s:?}")))
}

/// `[code]` section; defaults to the BCH(255, 239) construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeSection {
    pub n: usize,
    pub k: usize,
    /// Generator polynomial, hex, LSB = x^0 coefficient.
    pub generator: String,
    /// Primitive polynomial of the symbol field, hex.
    pub field_poly: String,
}

impl Default for CodeSection {
    fn default() -> Self {
        CodeSection {
            n: 255,
            k: 239,
            generator: "0x18DED".into(),
            field_poly: "0x171".into(),
        }
    }
}

impl CodeSection {
    pub fn to_spec(&self) -> Result<CodeSpec> {
        let generator = parse_hex_mask(&self.generator, "code.generator")?;
        let field_poly =
            u16::try_from(parse_hex_mask(&self.field_poly, "code.field_poly")?)
                .map_err(|_| Error::config("code.field_poly: mask exceeds 16 bits"))?;
        let spec = CodeSpec::new(self.n, self.k, 2, generator, field_poly)?;
        Ok(spec)
    }
}

/// `[channel]` section: signal-to-noise grid, seed, and trial budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// One simulation point per entry.
    pub ebn0_db: Vec<f64>,
    /// Code rate; defaults to k/n of the configured code.
    #[serde(default)]
    pub rate: Option<f64>,
    pub seed: u64,
    pub trials: u64,
}

/// `[record]` section: oracle depth captured per trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecordSection {
    /// Chase success is evaluated for every P up to this value.
    pub chase_p_max: Option<usize>,
    /// ORBGRAND logistic-weight cap; book present iff set.
    pub orb_w_max: Option<u32>,
    /// Truncate the ORBGRAND book to this many patterns.
    pub orb_max_patterns: Option<usize>,
    pub gamma_grid: Vec<f64>,
    pub prefix_len: usize,
    pub all_zero: bool,
}

impl Default for RecordSection {
    fn default() -> Self {
        RecordSection {
            chase_p_max: Some(6),
            orb_w_max: None,
            orb_max_patterns: None,
            gamma_grid: Vec::new(),
            prefix_len: 24,
            all_zero: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Chase,
    Orbgrand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorName {
    Fixed,
    Ida,
    M,
    Md,
}

/// `[policy]` section: which level ladder to run and how to pick a rung.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub decoder: DecoderKind,
    /// Ascending P values (Chase) or pattern budgets (ORBGRAND).
    pub levels: Vec<u32>,
    pub selector: SelectorName,
    /// Ladder index used by the `fixed` selector; defaults to the last.
    #[serde(default)]
    pub fixed_index: Option<usize>,
    /// IDA magnitude threshold (count statistic) or M/MD threshold for a
    /// two-level ladder.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// IDA count threshold.
    #[serde(default)]
    pub phi: Option<u32>,
    /// Sorted-magnitude rank observed by the M/MD selectors.
    #[serde(default)]
    pub observe_rank: Option<usize>,
    /// Descending threshold ladder for multi-level M/MD selection;
    /// overrides `gamma` when present.
    #[serde(default)]
    pub thresholds: Option<Vec<f64>>,
}

impl PolicySection {
    pub fn to_eval_policy(&self) -> Result<EvalPolicy> {
        if self.levels.is_empty() {
            return Err(Error::config("policy.levels: must not be empty"));
        }
        let levels: Vec<ParallelismLevel> = self
            .levels
            .iter()
            .map(|&v| match self.decoder {
                DecoderKind::Chase => ParallelismLevel::chase_p(v),
                DecoderKind::Orbgrand => ParallelismLevel::orb_npat(v),
            })
            .collect();
        let rule = match self.selector {
            SelectorName::Fixed => {
                SelectRule::Fixed(self.fixed_index.unwrap_or(levels.len() - 1))
            }
            SelectorName::Ida => {
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::config("policy.gamma: required by the ida selector"))?;
                let phi = self
                    .phi
                    .ok_or_else(|| Error::config("policy.phi: required by the ida selector"))?;
                if phi < 1 {
                    return Err(Error::config("policy.phi: must be >= 1"));
                }
                SelectRule::CountBelow { gamma, phi }
            }
            SelectorName::M | SelectorName::Md => {
                let kind = if self.selector == SelectorName::M {
                    SelectorKind::M
                } else {
                    SelectorKind::Md
                };
                let observe_rank = self.observe_rank.ok_or_else(|| {
                    Error::config("policy.observe_rank: required by the m/md selectors")
                })?;
                let thresholds = match (&self.thresholds, self.gamma) {
                    (Some(t), _) => t.clone(),
                    (None, Some(g)) => vec![g],
                    (None, None) => {
                        return Err(Error::config(
                            "policy.thresholds or policy.gamma: required by the m/md selectors",
                        ))
                    }
                };
                SelectRule::Stat { kind, observe_rank, thresholds }
            }
        };
        let policy = EvalPolicy { levels, rule };
        policy.validate()?;
        Ok(policy)
    }
}

/// `[tune]` section: threshold optimization request.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSection {
    pub decoder: DecoderKind,
    pub selector: SelectorName,
    pub observe_rank: usize,
    /// Ascending ladder; one threshold is tuned per adjacent pair.
    pub levels: Vec<u32>,
    /// Level whose fixed-policy BLER is the ceiling.
    pub reference_level: u32,
    /// Ceiling = reference BLER x this factor.
    #[serde(default = "default_slack")]
    pub bler_slack: f64,
    /// Extra candidate thresholds merged into the quantile grid.
    #[serde(default)]
    pub extra_thresholds: Vec<f64>,
}

fn default_slack() -> f64 {
    1.0
}

impl TuneSection {
    pub fn selector_kind(&self) -> Result<SelectorKind> {
        match self.selector {
            SelectorName::M => Ok(SelectorKind::M),
            SelectorName::Md => Ok(SelectorKind::Md),
            _ => Err(Error::config("tune.selector: only m and md selectors are tunable")),
        }
    }

    pub fn ladder(&self) -> Vec<ParallelismLevel> {
        self.levels
            .iter()
            .map(|&v| match self.decoder {
                DecoderKind::Chase => ParallelismLevel::chase_p(v),
                DecoderKind::Orbgrand => ParallelismLevel::orb_npat(v),
            })
            .collect()
    }

    pub fn reference(&self) -> ParallelismLevel {
        match self.decoder {
            DecoderKind::Chase => ParallelismLevel::chase_p(self.reference_level),
            DecoderKind::Orbgrand => ParallelismLevel::orb_npat(self.reference_level),
        }
    }
}

/// Which artifacts a run emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitKind {
    Bler,
    Table1,
    Dist,
    Patterns,
    Records,
}

/// `[output]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub emit: Vec<EmitKind>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into(), emit: vec![EmitKind::Bler] }
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub code: CodeSection,
    pub channel: ChannelSection,
    #[serde(default)]
    pub record: RecordSection,
    #[serde(default)]
    pub policy: Option<PolicySection>,
    #[serde(default)]
    pub tune: Option<TuneSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.code.to_spec()?;
        if self.channel.ebn0_db.is_empty() {
            return Err(Error::config("channel.ebn0_db: must list at least one point"));
        }
        if self.channel.trials < 1 {
            return Err(Error::config("channel.trials: must be >= 1"));
        }
        if let Some(r) = self.channel.rate {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config("channel.rate: must be in (0, 1]"));
            }
        }
        if let Some(p) = &self.policy {
            p.to_eval_policy()?;
        }
        if let Some(t) = &self.tune {
            t.selector_kind()?;
            if t.levels.len() < 2 {
                return Err(Error::config("tune.levels: need at least two levels"));
            }
            if t.bler_slack < 1.0 {
                return Err(Error::config("tune.bler_slack: must be >= 1"));
            }
        }
        if self.record.orb_w_max.is_none()
            && self
                .policy
                .as_ref()
                .is_some_and(|p| p.decoder == DecoderKind::Orbgrand)
        {
            return Err(Error::config(
                "record.orb_w_max: required when the policy decodes with orbgrand",
            ));
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.channel
            .rate
            .unwrap_or(self.code.k as f64 / self.code.n as f64)
    }

    /// SHA-256 of the canonical JSON rendering. serde_json orders object
    /// keys, so the digest is stable under key reordering in the TOML.
    pub fn digest(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        format!("{:x}", hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[channel]
ebn0_db = [6.5]
seed = 1
trials = 10
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.code.n, 255);
        assert_eq!(cfg.record.chase_p_max, Some(6));
        assert!((cfg.rate() - 239.0 / 255.0).abs() < 1e-12);
        assert_eq!(cfg.output.dir, "out");
        cfg.code.to_spec().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_offending_path() {
        let bad = format!("{MINIMAL}\n[record]\nchase_pmax = 5\n");
        let err = RunConfig::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("chase_pmax"), "{err}");
    }

    #[test]
    fn phi_zero_is_rejected_naming_the_field() {
        let text = format!(
            "{MINIMAL}\n[policy]\ndecoder = \"chase\"\nlevels = [3, 5]\nselector = \"ida\"\ngamma = 4.5\nphi = 0\n"
        );
        let err = RunConfig::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("policy.phi"), "{err}");
    }

    #[test]
    fn policy_sections_build_working_policies() {
        let ida = format!(
            "{MINIMAL}\n[policy]\ndecoder = \"chase\"\nlevels = [3, 5]\nselector = \"ida\"\ngamma = 4.5\nphi = 7\n"
        );
        let cfg = RunConfig::from_toml_str(&ida).unwrap();
        let policy = cfg.policy.unwrap().to_eval_policy().unwrap();
        assert_eq!(policy.levels.len(), 2);
        assert!(matches!(policy.rule, SelectRule::CountBelow { phi: 7, .. }));

        let multi = format!(
            "{MINIMAL}\n[policy]\ndecoder = \"chase\"\nlevels = [1, 2, 3, 4, 5]\nselector = \"md\"\nobserve_rank = 21\nthresholds = [8.2, 6.0, 4.0, 2.0]\n"
        );
        let cfg = RunConfig::from_toml_str(&multi).unwrap();
        let policy = cfg.policy.unwrap().to_eval_policy().unwrap();
        assert!(matches!(policy.rule, SelectRule::Stat { kind: SelectorKind::Md, .. }));
    }

    #[test]
    fn digest_is_stable_under_key_reordering() {
        let a = RunConfig::from_toml_str("[channel]\nebn0_db = [6.5]\nseed = 1\ntrials = 10\n")
            .unwrap();
        let b = RunConfig::from_toml_str("[channel]\ntrials = 10\nseed = 1\nebn0_db = [6.5]\n")
            .unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = RunConfig::from_toml_str("[channel]\nebn0_db = [6.5]\nseed = 2\ntrials = 10\n")
            .unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn bad_hex_and_bad_rate_are_config_errors() {
        let bad_hex = "[code]\ngenerator = \"0xZZ\"\n[channel]\nebn0_db = [6.5]\nseed = 1\ntrials = 10\n";
        assert!(RunConfig::from_toml_str(bad_hex).is_err());
        let bad_rate = format!("{MINIMAL}").replace("trials = 10", "trials = 10\nrate = 1.5");
        assert!(RunConfig::from_toml_str(&bad_rate).is_err());
    }
}
