//! Scenario configuration: JSON file plus command-line overrides, flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use ekelab::adversary::PasswordSpace;
use ekelab::cipher::Password;
use ekelab::group::gen_params;
use ekelab::protocol::Variant;
use ekelab::{GroupParams, Scalar};

use crate::CliError;

/// Desk-scale guard: exhaustive attacks refuse larger spaces.
pub const MAX_EXHAUSTIVE_BITS: u32 = 24;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub group: Option<GroupSpec>,
    pub variant: Option<String>,
    pub encrypt_first_flow: Option<bool>,
    pub password: Option<PasswordSpec>,
    pub challenge_bytes: Option<usize>,
    pub attack: Option<AttackSection>,
    pub margin: Option<MarginSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Inline { q: String, g: String, n: String },
    Derived { bits: u32, seed: u64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PasswordSpec {
    Literal { literal: String },
    Drawn { bits: u32, seed: Option<u64> },
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub space_bits: Option<u32>,
    pub dictionary: Option<PathBuf>,
    pub expect: Option<String>,
    pub key_space_bits: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginSection {
    pub profile: Option<String>,
    pub computers: Option<f64>,
    pub fleet: Option<String>,
    pub horizon_seconds: Option<u64>,
    pub dlogs_per_guess: Option<u32>,
    pub footprint_m2: Option<f64>,
    pub check_paper: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let data = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&data)
                    .map_err(|e| CliError::config(format!("bad config {}: {e}", p.display())))
            }
        }
    }
}

/// Derives a labeled sub-seed so one scenario seed feeds many independent
/// random streams.
pub fn sub_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_be_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

/// Resolves the group from exactly one source: inline parameters or a
/// derived prime of the requested size.
pub fn resolve_group(
    spec: Option<&GroupSpec>,
    flag_q: Option<Scalar>,
    flag_g: Option<Scalar>,
    flag_bits: Option<u32>,
    master_seed: Option<u64>,
) -> Result<GroupParams, CliError> {
    if let (Some(q), Some(g)) = (flag_q, flag_g) {
        if flag_bits.is_some() {
            return Err(CliError::config("give either --q/--g or --bits, not both"));
        }
        return GroupParams::new(q, g, q - 1).map_err(|e| CliError::config(e.to_string()));
    }
    if flag_q.is_some() || flag_g.is_some() {
        return Err(CliError::config("--q and --g must be given together"));
    }
    if let Some(bits) = flag_bits {
        let seed = master_seed.ok_or_else(|| {
            CliError::config("deriving a group needs an explicit --seed (no silent entropy)")
        })?;
        return gen_params(bits, sub_seed(seed, "group")).map_err(|e| CliError::config(e.to_string()));
    }
    match spec {
        Some(GroupSpec::Inline { q, g, n }) => {
            let parse = |s: &str, what: &str| {
                s.parse::<Scalar>()
                    .map_err(|_| CliError::config(format!("bad decimal {what}: {s:?}")))
            };
            GroupParams::new(parse(q, "q")?, parse(g, "g")?, parse(n, "n")?)
                .map_err(|e| CliError::config(e.to_string()))
        }
        Some(GroupSpec::Derived { bits, seed }) => {
            gen_params(*bits, *seed).map_err(|e| CliError::config(e.to_string()))
        }
        None => Err(CliError::config(
            "no group source: give --bits, --q/--g, or a config group section",
        )),
    }
}

/// Resolved password plus its exhaustive-space position, when it has one.
pub struct ResolvedPassword {
    pub password: Password,
    pub space_bits: Option<u32>,
}

pub fn resolve_password(
    spec: Option<&PasswordSpec>,
    flag_literal: Option<&str>,
    flag_bits: Option<u32>,
    master_seed: Option<u64>,
    variant: Variant,
) -> Result<ResolvedPassword, CliError> {
    use rand::Rng;
    use rand::SeedableRng;
    if flag_literal.is_some() && flag_bits.is_some() {
        return Err(CliError::config(
            "give either --password or --password-bits, not both",
        ));
    }
    let drawn = |bits: u32, seed: Option<u64>| -> Result<ResolvedPassword, CliError> {
        if !(1..=MAX_EXHAUSTIVE_BITS).contains(&bits) {
            return Err(CliError::config(format!(
                "password bits must be in 1..={MAX_EXHAUSTIVE_BITS}"
            )));
        }
        let seed = seed
            .or(master_seed.map(|s| sub_seed(s, "password")))
            .ok_or_else(|| {
                CliError::config("drawing a password needs a seed (no silent entropy)")
            })?;
        let value = rand_chacha::ChaCha12Rng::seed_from_u64(seed).gen_range(0..(1u64 << bits));
        Ok(ResolvedPassword {
            password: PasswordSpace::encode_value(bits, value),
            space_bits: Some(bits),
        })
    };
    if let Some(lit) = flag_literal {
        return Ok(ResolvedPassword {
            password: Password::from_literal(lit),
            space_bits: None,
        });
    }
    if let Some(bits) = flag_bits {
        return drawn(bits, None);
    }
    match spec {
        Some(PasswordSpec::Literal { literal }) => Ok(ResolvedPassword {
            password: Password::from_literal(literal),
            space_bits: None,
        }),
        Some(PasswordSpec::Drawn { bits, seed }) => drawn(*bits, *seed),
        // the plain no-key protocol never touches the password
        None if !variant.uses_password() => Ok(ResolvedPassword {
            password: Password::from_literal("unused"),
            space_bits: None,
        }),
        // default: a password drawn from the 12-bit space, seeded
        None => drawn(DEFAULT_PASSWORD_BITS, None),
    }
}

/// Password space used when a scenario names none.
pub const DEFAULT_PASSWORD_BITS: u32 = 12;

pub fn parse_variant(
    name: Option<&str>,
    encrypt_first_flow: bool,
) -> Result<Variant, CliError> {
    let name = name.ok_or_else(|| CliError::config("no variant given"))?;
    Variant::parse(name, encrypt_first_flow).map_err(CliError::config)
}
