//! Physical cost model for a discrete-log-capable adversary: from ion-trap
//! electrostatics to gate times, per-machine operation budgets over a time
//! horizon, fleet-size ceilings, and the minimum password length that stays
//! out of reach.
//!
//! Two kinds of arithmetic coexist here. The physics chain (spring constant,
//! acoustic velocity, CNOT propagation time) is ordinary floating point,
//! generic over [`Real`]. The budget chain is exact: gate times entered as
//! decimal literals stay exact through the cycle-time product
//! ([`DecimalSeconds`]), and every comparison against a `2^k` threshold is
//! done with exactly representable powers of two, never a float-vs-float
//! equality.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Elementary charge, coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permittivity, farads per meter.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Earth radius used for the fleet bound, meters.
pub const EARTH_RADIUS_M: f64 = 6.37e6;

/// Riemann zeta(3) enters the inter-ion spring constant. The truncated value
/// keeps the closed-form coefficient at exactly 4.8; the precise value is
/// available for sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Zeta3 {
    /// 1.2
    #[default]
    Truncated,
    /// 1.2020569
    Precise,
}

impl Zeta3 {
    pub fn value<R: Real>(self) -> R {
        match self {
            Zeta3::Truncated => R::lit(1.2),
            Zeta3::Precise => R::lit(1.202_056_9),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarginError {
    #[error("cannot parse {0:?} as a decimal number of seconds")]
    BadDecimal(String),
    #[error("decimal overflow while scaling {0} by {1}")]
    DecimalOverflow(String, u64),
    #[error("profile {0:?} is not one of the built-ins and not a readable file")]
    UnknownProfile(String),
    #[error("profile needs a gate time or trap parameters to derive one")]
    NoGateTime,
}

/// A non-negative duration held as `digits × 10^exp10`, exactly.
///
/// `2.85e-4` times 100 gate cycles is exactly `2.85e-2` in this form, which
/// is what the reference numbers demand; the nearest-f64 view is available
/// for the downstream budget division.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimalSeconds {
    digits: u64,
    exp10: i32,
}

impl DecimalSeconds {
    pub fn new(mut digits: u64, mut exp10: i32) -> Self {
        while digits != 0 && digits.is_multiple_of(10) {
            digits /= 10;
            exp10 += 1;
        }
        if digits == 0 {
            exp10 = 0;
        }
        Self { digits, exp10 }
    }

    /// Scales by an integer count, exactly.
    pub fn scale(self, count: u64) -> Result<Self, MarginError> {
        let wide = self.digits as u128 * count as u128;
        u64::try_from(wide)
            .map(|d| Self::new(d, self.exp10))
            .map_err(|_| MarginError::DecimalOverflow(self.to_string(), count))
    }

    /// Correctly rounded float view (goes through the decimal parser, which
    /// rounds to nearest).
    pub fn to_real<R: Real>(self) -> R {
        R::lit(
            format!("{}e{}", self.digits, self.exp10)
                .parse::<f64>()
                .expect("decimal renders as a valid float literal"),
        )
    }
}

impl fmt::Display for DecimalSeconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.digits.to_string();
        let sci_exp = self.exp10 + digits.len() as i32 - 1;
        if digits.len() == 1 {
            write!(f, "{digits}e{sci_exp}")
        } else {
            write!(f, "{}.{}e{}", &digits[..1], &digits[1..], sci_exp)
        }
    }
}

impl FromStr for DecimalSeconds {
    type Err = MarginError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MarginError::BadDecimal(s.to_string());
        let (mantissa, exp_part) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        let joined: String = [int_part, frac_part].concat();
        if joined.is_empty() || !joined.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = joined.parse::<u64>().map_err(|_| bad())?;
        Ok(Self::new(digits, exp_part - frac_part.len() as i32))
    }
}

impl Serialize for DecimalSeconds {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DecimalSeconds {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ion-trap geometry and mass. The defaults reproduce the reference chain:
/// unit ion charge, 10 µm spacing, and a mass and CNOT interaction distance
/// back-solved so the closed-form velocity and gate-time figures come out.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct IonTrapParams<R: Real> {
    /// Electron-charge multiplier of each ion (dimensionless).
    pub n0: R,
    /// Spacing between neighboring ions, meters.
    pub a: R,
    /// Ion mass, kilograms.
    pub m: R,
    /// Characteristic distance for a CNOT interaction, meters.
    pub d_cnot: R,
}

impl<R: Real> Default for IonTrapParams<R> {
    fn default() -> Self {
        Self {
            n0: R::one(),
            a: R::lit(1.0e-5),
            m: R::lit(1.082e-25),
            d_cnot: R::lit(9.12e-3),
        }
    }
}

/// The literal reading of "about 10^2 a" for the CNOT distance. It does not
/// reproduce the reference gate time (see `cnot_time` tests); both readings
/// are kept available.
pub fn d_cnot_hundred_a<R: Real>(a: R) -> R {
    R::lit(100.0) * a
}

/// Serial gate schedule of one discrete-log run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateModel {
    /// Seconds per serially executed elementary operation.
    pub gate_time: DecimalSeconds,
    /// Number of gates on the serial critical path.
    pub serial_gates: u64,
}

/// What the adversary brings: machines, time, floor space, and how many
/// oracle calls each password guess costs them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdversaryBudget {
    pub horizon_seconds: u64,
    pub computer_count: f64,
    pub footprint_m2: f64,
    pub dlogs_per_guess: u32,
}

impl AdversaryBudget {
    /// 100 years taken as exactly 2^32 seconds.
    pub const HUNDRED_YEARS_S: u64 = 1 << 32;

    pub fn over_hundred_years(computer_count: f64, dlogs_per_guess: u32) -> Self {
        Self {
            horizon_seconds: Self::HUNDRED_YEARS_S,
            computer_count,
            footprint_m2: 1.0,
            dlogs_per_guess,
        }
    }
}

/// Inter-ion spring constant `K = 4·ζ(3)·(n0·e)² / (4π ε₀ a³)`, N/m.
pub fn spring_constant<R: Real>(n0: R, a: R) -> R {
    spring_constant_with(Zeta3::default(), n0, a)
}

pub fn spring_constant_with<R: Real>(zeta3: Zeta3, n0: R, a: R) -> R {
    let charge = n0 * R::lit(ELEMENTARY_CHARGE);
    let four = R::lit(4.0);
    four * zeta3.value::<R>() * charge * charge
        / (four * R::lit(std::f64::consts::PI) * R::lit(VACUUM_PERMITTIVITY) * a * a * a)
}

/// Acoustic dispersion `ν = (1/π)·√(K/m)·sin(π a / λ)`, hertz.
pub fn dispersion_frequency<R: Real>(spring: R, mass: R, a: R, wavelength: R) -> R {
    let pi = R::lit(std::f64::consts::PI);
    (spring / mass).sqrt() * (pi * a / wavelength).sin() / pi
}

/// Long-wavelength acoustic velocity `v = √(K/m)·a`, m/s.
pub fn acoustic_velocity<R: Real>(n0: R, a: R, m: R) -> R {
    acoustic_velocity_with(Zeta3::default(), n0, a, m)
}

pub fn acoustic_velocity_with<R: Real>(zeta3: Zeta3, n0: R, a: R, m: R) -> R {
    (spring_constant_with(zeta3, n0, a) / m).sqrt() * a
}

/// CNOT time bound: interaction distance over propagation velocity.
pub fn cnot_time<R: Real>(d_cnot: R, velocity: R) -> R {
    d_cnot / velocity
}

/// Cycle time of one discrete-log run: serial gate count times gate time,
/// exact in decimal.
pub fn dlog_cycle_time(gates: &GateModel) -> Result<DecimalSeconds, MarginError> {
    gates.gate_time.scale(gates.serial_gates)
}

/// Raw operation count over the horizon: `computers × horizon / ΔT`.
pub fn ops_budget<R: Real>(cycle_seconds: R, budget: &AdversaryBudget) -> R {
    R::lit(budget.computer_count) * R::from_u64(budget.horizon_seconds).unwrap() / cycle_seconds
}

/// `2^k` as an exactly representable float.
pub fn pow2<R: Real>(k: u32) -> R {
    R::lit(2.0f64.powi(k as i32))
}

/// Strict comparison against a power-of-two threshold.
pub fn below_pow2<R: Real>(x: R, k: u32) -> bool {
    x < pow2(k)
}

/// Smallest `k` with `2^k >= x` (`x >= 1`).
pub fn ceil_log2<R: Real>(x: R) -> u32 {
    debug_assert!(x >= R::one());
    let mut k = 0;
    while pow2::<R>(k) < x {
        k += 1;
    }
    k
}

/// Upper bound on deployable machines: available area over per-machine
/// footprint.
pub fn max_fleet<R: Real>(total_area_m2: R, footprint_m2: R) -> R {
    total_area_m2 / footprint_m2
}

/// Surface area of the Earth, m².
pub fn earth_surface_m2<R: Real>() -> R {
    let r = R::lit(EARTH_RADIUS_M);
    R::lit(4.0) * R::lit(std::f64::consts::PI) * r * r
}

/// Smallest integer `x` with `2^x > total_ops / dlogs_per_guess`.
pub fn required_bits<R: Real>(total_ops: R, dlogs_per_guess: u32) -> u32 {
    debug_assert!(total_ops >= R::one());
    let per_guess = total_ops / R::from_u32(dlogs_per_guess).unwrap();
    let mut x = 0;
    while pow2::<R>(x) <= per_guess {
        x += 1;
    }
    x
}

/// A named physical profile: optional trap physics plus the gate schedule.
/// `gate_time = None` means "derive it from the trap chain".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginProfile<R: Real> {
    pub name: String,
    pub trap: Option<IonTrapParams<R>>,
    pub gate_time: Option<DecimalSeconds>,
    pub serial_gates: u64,
    #[serde(default)]
    pub zeta3: Zeta3,
}

/// Universal single-qubit-gate profile: 1e-14 s per gate, 10^4 serial gates.
pub fn universal_profile<R: Real>() -> MarginProfile<R> {
    MarginProfile {
        name: "universal".into(),
        trap: None,
        gate_time: Some(DecimalSeconds::new(1, -14)),
        serial_gates: 10_000,
        zeta3: Zeta3::default(),
    }
}

/// Ion-trap profile: trap defaults plus the reference CNOT time 2.85e-4 s
/// and 10^2 serial CNOTs.
pub fn ion_trap_profile<R: Real>() -> MarginProfile<R> {
    MarginProfile {
        name: "ion-trap".into(),
        trap: Some(IonTrapParams::default()),
        gate_time: Some(DecimalSeconds::new(285, -6)),
        serial_gates: 100,
        zeta3: Zeta3::default(),
    }
}

/// Ion-trap profile under the literal `d = 10² a` reading, gate time derived
/// from the physics chain instead of pinned.
pub fn ion_trap_literal_profile<R: Real>() -> MarginProfile<R> {
    let mut trap = IonTrapParams::<R>::default();
    trap.d_cnot = d_cnot_hundred_a(trap.a);
    MarginProfile {
        name: "ion-trap-literal".into(),
        trap: Some(trap),
        gate_time: None,
        serial_gates: 100,
        zeta3: Zeta3::default(),
    }
}

pub fn builtin_profile<R: Real>(name: &str) -> Option<MarginProfile<R>> {
    match name {
        "universal" => Some(universal_profile()),
        "ion-trap" => Some(ion_trap_profile()),
        "ion-trap-literal" => Some(ion_trap_literal_profile()),
        _ => None,
    }
}

/// Every intermediate of the margin chain, from trap physics to the minimum
/// password length.
#[derive(Debug, Clone, Serialize)]
pub struct MarginReport<R: Real> {
    pub profile: String,
    /// N/m; present when trap physics was configured.
    pub spring_constant: Option<R>,
    /// m/s.
    pub acoustic_velocity: Option<R>,
    /// Seconds; CNOT time derived from the trap chain.
    pub cnot_time_derived: Option<R>,
    /// ΔT, seconds (float view).
    pub cycle_seconds: R,
    /// ΔT exact, when the profile pinned a decimal gate time.
    pub cycle_exact: Option<DecimalSeconds>,
    /// Per-machine oracle rate, 1/ΔT.
    pub ops_per_second: R,
    /// Raw `computers × horizon / ΔT` before rounding to bounds.
    pub raw_fleet_ops: R,
    /// Exponent of the per-machine budget bound `2^k >= horizon/ΔT`.
    pub per_computer_ops_log2: u32,
    /// Exponent of the fleet bound `2^k >= computer_count`.
    pub fleet_log2: u32,
    /// The bounded budget `2^(fleet + per-machine)`, exact in the float.
    pub total_ops: R,
    pub dlogs_per_guess: u32,
    pub required_bits: u32,
}

/// Composes the full chain. Physics intermediates are reported whenever trap
/// parameters exist; the budget math runs on the profile's pinned gate time
/// when present, otherwise on the derived CNOT time.
pub fn evaluate_margin<R: Real>(
    profile: &MarginProfile<R>,
    budget: &AdversaryBudget,
) -> Result<MarginReport<R>, MarginError> {
    let physics = profile.trap.as_ref().map(|trap| {
        let spring = spring_constant_with(profile.zeta3, trap.n0, trap.a);
        let velocity = acoustic_velocity_with(profile.zeta3, trap.n0, trap.a, trap.m);
        let cnot = cnot_time(trap.d_cnot, velocity);
        (spring, velocity, cnot)
    });

    let (cycle_seconds, cycle_exact) = match profile.gate_time {
        Some(gate_time) => {
            let cycle = dlog_cycle_time(&GateModel {
                gate_time,
                serial_gates: profile.serial_gates,
            })?;
            (cycle.to_real::<R>(), Some(cycle))
        }
        None => {
            let (_, _, cnot) = physics.ok_or(MarginError::NoGateTime)?;
            (cnot * R::from_u64(profile.serial_gates).unwrap(), None)
        }
    };

    let per_computer_ops = R::from_u64(budget.horizon_seconds).unwrap() / cycle_seconds;
    let per_computer_ops_log2 = ceil_log2(per_computer_ops);
    let fleet_log2 = ceil_log2(R::lit(budget.computer_count));
    let total_ops = pow2::<R>(per_computer_ops_log2 + fleet_log2);

    Ok(MarginReport {
        profile: profile.name.clone(),
        spring_constant: physics.map(|p| p.0),
        acoustic_velocity: physics.map(|p| p.1),
        cnot_time_derived: physics.map(|p| p.2),
        cycle_seconds,
        cycle_exact,
        ops_per_second: R::one() / cycle_seconds,
        raw_fleet_ops: ops_budget(cycle_seconds, budget),
        per_computer_ops_log2,
        fleet_log2,
        total_ops,
        dlogs_per_guess: budget.dlogs_per_guess,
        required_bits: required_bits(total_ops, budget.dlogs_per_guess),
    })
}
