//! The four subcommands.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::json;

use ekelab::adversary::{
    attack_dheke, attack_enc_nokey, attack_enhanced_eke, attack_simplified_eke, coset_key_space,
    mitm_enc_nokey, mitm_nokey, AttackError, AttackOptions, AttackReport, MitmSessionIds,
    PasswordSpace,
};
use ekelab::cipher::Password;
use ekelab::group::gcd;
use ekelab::margin::{
    builtin_profile, earth_surface_m2, max_fleet, AdversaryBudget, DecimalSeconds, MarginProfile,
    MarginReport,
};
use ekelab::protocol::{
    run_session, Role, SessionConfig, SessionOutcome, SessionRun, Transcript, TranscriptMeta,
    Variant,
};
use ekelab::{GroupParams, Real, Scalar};

use crate::config::{
    parse_variant, resolve_group, resolve_password, sub_seed, FileConfig, ResolvedPassword,
    MAX_EXHAUSTIVE_BITS,
};
use crate::{AttackArgs, CliError, MarginArgs, MitmArgs, RunArgs};

pub struct Ctx {
    pub file: FileConfig,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl Ctx {
    fn seed(&self) -> Option<u64> {
        self.seed.or(self.file.seed)
    }

    fn require_seed(&self) -> Result<u64, CliError> {
        self.seed()
            .ok_or_else(|| CliError::config("this command needs --seed (no silent entropy)"))
    }

    fn out(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| self.file.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn workers(&self) -> usize {
        self.workers.or(self.file.workers).unwrap_or(1).max(1)
    }
}

fn write_out(dir: &Path, name: &str, data: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, data)?;
    Ok(path)
}

fn key_str(outcome: &SessionOutcome) -> String {
    outcome
        .exchange_key
        .map(|k| k.to_string())
        .unwrap_or_else(|| "-".into())
}

// ---- run -----------------------------------------------------------------

struct ResolvedProtocol {
    variant: Variant,
    params: GroupParams,
    password: ResolvedPassword,
    challenge_bytes: usize,
    master_seed: u64,
}

fn resolve_protocol(ctx: &Ctx, args: &crate::ProtocolArgs) -> Result<ResolvedProtocol, CliError> {
    let variant = parse_variant(
        args.variant.as_deref().or(ctx.file.variant.as_deref()),
        args.encrypt_first_flow || ctx.file.encrypt_first_flow.unwrap_or(false),
    )?;
    let master_seed = ctx.require_seed()?;
    let params = resolve_group(
        ctx.file.group.as_ref(),
        args.q,
        args.g,
        args.bits,
        Some(master_seed),
    )?;
    let password = resolve_password(
        ctx.file.password.as_ref(),
        args.password.as_deref(),
        args.password_bits,
        Some(master_seed),
        variant,
    )?;
    let challenge_bytes = args
        .challenge_bytes
        .or(ctx.file.challenge_bytes)
        .unwrap_or(16);
    if challenge_bytes == 0 || challenge_bytes > 64 {
        return Err(CliError::config("challenge bytes must be in 1..=64"));
    }
    Ok(ResolvedProtocol {
        variant,
        params,
        password,
        challenge_bytes,
        master_seed,
    })
}

fn session_pair(
    r: &ResolvedProtocol,
    key: Option<Scalar>,
    exponent_a: Option<Scalar>,
    exponent_b: Option<Scalar>,
) -> (SessionConfig, SessionConfig) {
    let mut cfg_a = SessionConfig::new(
        Role::Initiator,
        r.params,
        r.password.password.clone(),
        sub_seed(r.master_seed, "initiator"),
        r.variant,
    );
    cfg_a.challenge_bytes = r.challenge_bytes;
    cfg_a.fixed_nokey_key = key;
    cfg_a.fixed_exponent = exponent_a;
    let mut cfg_b = SessionConfig::new(
        Role::Responder,
        r.params,
        r.password.password.clone(),
        sub_seed(r.master_seed, "responder"),
        r.variant,
    );
    cfg_b.challenge_bytes = r.challenge_bytes;
    cfg_b.fixed_exponent = exponent_b;
    (cfg_a, cfg_b)
}

fn outcome_json(run: &SessionRun, password: &Password, space_bits: Option<u32>) -> String {
    serde_json::to_string_pretty(&json!({
        "meta": run.transcript.meta,
        "initiator": run.initiator,
        "responder": run.responder,
        "password_hex": hex::encode(password.bytes()),
        "password_bits": space_bits,
    }))
    .expect("outcome serializes")
}

pub fn cmd_run(ctx: &Ctx, args: &RunArgs) -> Result<(), CliError> {
    let resolved = resolve_protocol(ctx, &args.protocol)?;
    let (cfg_a, cfg_b) = session_pair(&resolved, args.key, args.exponent_a, args.exponent_b);
    let session_id = resolved.master_seed;
    let run = run_session(session_id, &cfg_a, &cfg_b)
        .map_err(|e| CliError::config(e.to_string()))?;

    let dir = ctx.out();
    let transcript_path = write_out(&dir, "transcript.jsonl", &run.transcript.to_jsonl())?;
    let outcome_path = write_out(
        &dir,
        "outcome.json",
        &outcome_json(&run, &resolved.password.password, resolved.password.space_bits),
    )?;

    println!(
        "variant={} q={} g={} session={}",
        resolved.variant,
        resolved.params.q(),
        resolved.params.g(),
        session_id
    );
    println!(
        "initiator: {:?} key={}",
        run.initiator.status,
        key_str(&run.initiator)
    );
    println!(
        "responder: {:?} key={}",
        run.responder.status,
        key_str(&run.responder)
    );
    println!("transcript: {}", transcript_path.display());
    println!("outcome: {}", outcome_path.display());

    if !run.both_completed() {
        return Err(CliError::abort("session aborted"));
    }
    let keys_match = run.initiator.exchange_key == run.responder.exchange_key
        && run.initiator.final_key == run.responder.final_key;
    println!("keys {}", if keys_match { "match" } else { "MISMATCH" });
    if !keys_match {
        return Err(CliError::abort("completed with differing keys"));
    }
    Ok(())
}

// ---- attack ----------------------------------------------------------------

/// Session metadata and planted truth, as written next to the transcript.
struct SidecarOutcome {
    meta: TranscriptMeta,
    password_hex: Option<String>,
    exchange_key: Option<Scalar>,
    final_key_hex: Option<String>,
}

fn read_sidecar(transcript_path: &Path) -> Result<SidecarOutcome, CliError> {
    let path = transcript_path
        .parent()
        .unwrap_or(Path::new("."))
        .join("outcome.json");
    let data = std::fs::read_to_string(&path).map_err(|e| {
        CliError::config(format!(
            "cannot read session metadata {}: {e}",
            path.display()
        ))
    })?;
    let value: serde_json::Value = serde_json::from_str(&data)
        .map_err(|e| CliError::config(format!("bad outcome.json: {e}")))?;
    let meta: TranscriptMeta = serde_json::from_value(value["meta"].clone())
        .map_err(|e| CliError::config(format!("bad outcome.json meta: {e}")))?;
    let initiator = &value["initiator"];
    Ok(SidecarOutcome {
        meta,
        password_hex: value["password_hex"].as_str().map(str::to_string),
        exchange_key: initiator["exchange_key"]
            .as_str()
            .and_then(|s| s.parse().ok()),
        final_key_hex: initiator["final_key"].as_str().map(str::to_string),
    })
}

fn build_space(ctx: &Ctx, args: &AttackArgs) -> Result<PasswordSpace, CliError> {
    let section = ctx.file.attack.clone().unwrap_or_default();
    let bits = args.space_bits.or(section.space_bits);
    let dict = args.dictionary.clone().or(section.dictionary);
    match (bits, dict) {
        (Some(_), Some(_)) => Err(CliError::config(
            "give either --space-bits or --dictionary, not both",
        )),
        (Some(bits), None) => {
            if !(1..=MAX_EXHAUSTIVE_BITS).contains(&bits) {
                return Err(CliError::config(format!(
                    "exhaustive spaces over {MAX_EXHAUSTIVE_BITS} bits are refused (desk-scale guard)"
                )));
            }
            Ok(PasswordSpace::exhaustive(bits))
        }
        (None, Some(path)) => {
            let data = std::fs::read_to_string(&path).map_err(|e| {
                CliError::config(format!("cannot read dictionary {}: {e}", path.display()))
            })?;
            let words: Vec<Vec<u8>> = data.lines().map(|l| l.as_bytes().to_vec()).collect();
            if words.iter().all(|w| w.is_empty()) {
                return Err(CliError::config("dictionary is empty"));
            }
            Ok(PasswordSpace::dictionary(words))
        }
        (None, None) => Err(CliError::config(
            "no candidate space: give --space-bits or --dictionary",
        )),
    }
}

fn map_attack_err(e: AttackError) -> CliError {
    match e {
        AttackError::KNotFound => CliError::expectation(e.to_string()),
        other => CliError::config(other.to_string()),
    }
}

pub fn cmd_attack(ctx: &Ctx, args: &AttackArgs) -> Result<(), CliError> {
    let sidecar = read_sidecar(&args.transcript)?;
    let mut meta = sidecar.meta;
    if let Some(sid) = args.session_id {
        meta.session_id = sid;
    }
    if let Some(name) = args
        .protocol
        .variant
        .as_deref()
        .or(ctx.file.variant.as_deref())
    {
        meta.variant = Variant::parse(
            name,
            args.protocol.encrypt_first_flow || ctx.file.encrypt_first_flow.unwrap_or(false),
        )
        .map_err(CliError::config)?;
    }
    let data = std::fs::read_to_string(&args.transcript)?;
    let transcript = Transcript::from_jsonl(meta, &data)
        .map_err(|e| CliError::config(e.to_string()))?;
    let space = build_space(ctx, args)?;
    let opts = AttackOptions {
        workers: ctx.workers(),
    };

    let report: AttackReport = match meta.variant {
        Variant::SimplifiedEke => {
            attack_simplified_eke(&transcript, &space, &opts).map_err(map_attack_err)?
        }
        Variant::DhEke { .. } => {
            attack_dheke(&transcript, &space, &opts).map_err(map_attack_err)?
        }
        Variant::EnhancedEke => {
            let known_s = match &args.known_s {
                Some(hexstr) => hex::decode(hexstr)
                    .map_err(|e| CliError::config(format!("bad --known-s: {e}")))?,
                None => {
                    let hexstr = sidecar.final_key_hex.as_deref().ok_or_else(|| {
                        CliError::config("no known session key: give --known-s")
                    })?;
                    hex::decode(hexstr).map_err(|e| CliError::config(e.to_string()))?
                }
            };
            let center_value = sidecar.exchange_key.ok_or_else(|| {
                CliError::config("outcome.json lacks the exchange key the key space centers on")
            })?;
            let center = meta
                .params
                .element(center_value)
                .map_err(|e| CliError::config(e.to_string()))?;
            let bits = args
                .key_space_bits
                .or(ctx.file.attack.clone().unwrap_or_default().key_space_bits)
                .unwrap_or(10);
            let seed = ctx.require_seed()?;
            let key_space =
                coset_key_space(&meta.params, center, bits, sub_seed(seed, "key-space"));
            let outcome = attack_enhanced_eke(&transcript, &known_s, &key_space, &space, &opts)
                .map_err(map_attack_err)?;
            println!(
                "stage1: keys_tried={} dlogs={}",
                outcome.stage1_keys_tried, outcome.stage1_dlog_calls
            );
            println!("stage1: exchange_key={}", outcome.exchange_key);
            outcome.report
        }
        Variant::EncNoKey => {
            attack_enc_nokey(&transcript, &space, &opts).map_err(map_attack_err)?
        }
        Variant::GenericEke | Variant::AEke | Variant::NoKey => {
            return Err(CliError::config(format!(
                "no passive guessing attack is defined for {}",
                meta.variant
            )));
        }
    };

    let dir = ctx.out();
    let path = write_out(
        &dir,
        "attack_report.json",
        &serde_json::to_string_pretty(&report.to_json()).expect("report serializes"),
    )?;
    println!(
        "dlogs={} guesses={} per_guess={}",
        report.dlog_calls,
        report.guesses_tried,
        report.per_guess_dlogs()
    );
    println!(
        "recovered={} early_rejections={} wall={:.3}s",
        report.recovered.len(),
        report.early_rejections,
        report.wall_seconds
    );
    println!("report: {}", path.display());

    let expect = args
        .expect
        .clone()
        .or(ctx.file.attack.clone().unwrap_or_default().expect);
    if let Some(expect) = expect {
        let truth = sidecar
            .password_hex
            .as_deref()
            .map(hex::decode)
            .transpose()
            .map_err(|e| CliError::config(e.to_string()))?;
        let recovered_truth = truth
            .as_deref()
            .map(|t| report.recovered_passwords().any(|p| p.bytes() == t));
        match expect.as_str() {
            "recover" => match recovered_truth {
                Some(true) => println!("expectation held: true password recovered"),
                Some(false) => {
                    return Err(CliError::expectation("true password was not recovered"))
                }
                None => return Err(CliError::config("no planted password to check against")),
            },
            "no-recover" => match recovered_truth {
                Some(false) => println!("expectation held: true password not recovered"),
                Some(true) => {
                    return Err(CliError::expectation(
                        "true password was recovered but should not have been",
                    ))
                }
                None => return Err(CliError::config("no planted password to check against")),
            },
            "full-space" => {
                if report.recovered.len() as u64 == report.space_size {
                    println!("expectation held: every candidate survives");
                } else {
                    return Err(CliError::expectation(format!(
                        "{} of {} candidates survived",
                        report.recovered.len(),
                        report.space_size
                    )));
                }
            }
            other => {
                return Err(CliError::config(format!(
                    "unknown expectation {other:?} (recover | no-recover | full-space)"
                )))
            }
        }
    }
    Ok(())
}

// ---- mitm ------------------------------------------------------------------

pub fn cmd_mitm(ctx: &Ctx, args: &MitmArgs) -> Result<(), CliError> {
    let resolved = resolve_protocol(ctx, &args.protocol)?;
    if !matches!(resolved.variant, Variant::NoKey | Variant::EncNoKey) {
        return Err(CliError::config(
            "mitm targets the no-key protocols: --variant nokey or enc-nokey",
        ));
    }
    let (cfg_a, cfg_b) = session_pair(&resolved, None, None, None);
    let params = resolved.params;
    let eve_exponent = match args.eve_exponent {
        Some(v) => params
            .exponent(v)
            .map_err(|e| CliError::config(e.to_string()))?,
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(sub_seed(resolved.master_seed, "eve"));
            loop {
                let candidate = rng.gen_range(2..params.n());
                if gcd(candidate, params.n()) == 1 {
                    break params.exponent(candidate).unwrap();
                }
            }
        }
    };
    let sessions = MitmSessionIds::from_seed(resolved.master_seed);

    let (report, expect_success) = match resolved.variant {
        Variant::NoKey => (
            mitm_nokey(&cfg_a, &cfg_b, eve_exponent, sessions)
                .map_err(|e| CliError::config(e.to_string()))?,
            true,
        ),
        Variant::EncNoKey => {
            let eve_password = args
                .give_eve_password
                .then(|| resolved.password.password.clone());
            (
                mitm_enc_nokey(&cfg_a, &cfg_b, eve_exponent, eve_password.as_ref(), sessions)
                    .map_err(|e| CliError::config(e.to_string()))?,
                args.give_eve_password,
            )
        }
        _ => unreachable!(),
    };

    println!(
        "variant={} sessions={} success={}",
        resolved.variant, report.sessions_observed, report.success
    );
    match report.stolen_key {
        Some(k) => println!("stolen key: {k}"),
        None => println!(
            "stolen key: none ({})",
            report.failure_mode.as_deref().unwrap_or("no failure mode")
        ),
    }
    println!(
        "honest initiator: {:?} key={}",
        report.initiator_outcome.status,
        key_str(&report.initiator_outcome)
    );
    println!(
        "honest responder: {:?} key={}",
        report.responder_outcome.status,
        key_str(&report.responder_outcome)
    );

    let dir = ctx.out();
    let path = write_out(
        &dir,
        "mitm_report.json",
        &serde_json::to_string_pretty(&json!({
            "variant": resolved.variant.name(),
            "success": report.success,
            "stolen_key": report.stolen_key.map(|k| k.to_string()),
            "sessions_observed": report.sessions_observed,
            "failure_mode": report.failure_mode,
            "initiator": report.initiator_outcome,
            "responder": report.responder_outcome,
        }))
        .expect("report serializes"),
    )?;
    println!("report: {}", path.display());

    if report.success != expect_success {
        return Err(CliError::expectation(format!(
            "expected success={expect_success}, interception got success={}",
            report.success
        )));
    }
    println!("expectation held: success={}", report.success);
    Ok(())
}

// ---- margin ------------------------------------------------------------------

fn load_profile(name_or_path: &str) -> Result<MarginProfile<Real>, CliError> {
    if let Some(profile) = builtin_profile(name_or_path) {
        return Ok(profile);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let data = std::fs::read_to_string(path)?;
        return serde_json::from_str(&data)
            .map_err(|e| CliError::config(format!("bad profile {}: {e}", path.display())));
    }
    Err(CliError::config(format!(
        "unknown profile {name_or_path:?} (universal, ion-trap, ion-trap-literal, or a JSON path)"
    )))
}

fn print_margin_table(report: &MarginReport<Real>) {
    let mut rows: Vec<(&str, String)> = Vec::new();
    rows.push(("profile", report.profile.clone()));
    if let Some(k) = report.spring_constant {
        rows.push(("spring constant (N/m)", format!("{k:.4e}")));
    }
    if let Some(v) = report.acoustic_velocity {
        rows.push(("acoustic velocity (m/s)", format!("{v:.4}")));
    }
    if let Some(t) = report.cnot_time_derived {
        rows.push(("derived CNOT time (s)", format!("{t:.4e}")));
    }
    let cycle = match report.cycle_exact {
        Some(exact) => exact.to_string(),
        None => format!("{:.4e}", report.cycle_seconds),
    };
    rows.push(("dlog cycle time (s)", cycle));
    rows.push(("ops/s per machine", format!("{:.4}", report.ops_per_second)));
    rows.push(("raw fleet ops over horizon", format!("{:.4e}", report.raw_fleet_ops)));
    rows.push((
        "per-machine bound",
        format!("2^{}", report.per_computer_ops_log2),
    ));
    rows.push(("fleet bound", format!("2^{}", report.fleet_log2)));
    rows.push((
        "total ops bound",
        format!("2^{}", report.per_computer_ops_log2 + report.fleet_log2),
    ));
    rows.push(("dlogs per guess", report.dlogs_per_guess.to_string()));
    rows.push(("required password bits", report.required_bits.to_string()));
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    for (name, value) in rows {
        println!("{name:<width$}  {value}");
    }
}

pub fn cmd_margin(ctx: &Ctx, args: &MarginArgs) -> Result<(), CliError> {
    let section = ctx.file.margin.clone().unwrap_or_default();
    let name = args
        .profile
        .clone()
        .or(section.profile)
        .unwrap_or_else(|| "ion-trap".into());
    let mut profile = load_profile(&name)?;
    if let Some(gt) = &args.gate_time {
        profile.gate_time = Some(
            gt.parse::<DecimalSeconds>()
                .map_err(|e| CliError::config(e.to_string()))?,
        );
    }
    if let Some(sg) = args.serial_gates {
        profile.serial_gates = sg;
    }

    let footprint = args.footprint_m2.or(section.footprint_m2).unwrap_or(1.0);
    if footprint <= 0.0 {
        return Err(CliError::config("footprint must be positive"));
    }
    let computers = match args.fleet.as_deref().or(section.fleet.as_deref()) {
        Some("earth") => max_fleet(earth_surface_m2::<Real>(), footprint),
        Some(other) => return Err(CliError::config(format!("unknown fleet {other:?}"))),
        None => args.computers.or(section.computers).unwrap_or(1.0),
    };
    if !computers.is_finite() || computers < 1.0 {
        return Err(CliError::config("computer count must be at least 1"));
    }
    let dlogs_per_guess = args
        .dlogs_per_guess
        .or(section.dlogs_per_guess)
        .unwrap_or(1);
    if !(1..=2).contains(&dlogs_per_guess) {
        return Err(CliError::config("dlogs per guess must be 1 or 2"));
    }
    let budget = AdversaryBudget {
        horizon_seconds: args
            .horizon_seconds
            .or(section.horizon_seconds)
            .unwrap_or(AdversaryBudget::HUNDRED_YEARS_S),
        computer_count: computers,
        footprint_m2: footprint,
        dlogs_per_guess,
    };

    let report = ekelab::margin::evaluate_margin(&profile, &budget)
        .map_err(|e| CliError::config(e.to_string()))?;
    print_margin_table(&report);
    let dir = ctx.out();
    let path = write_out(
        &dir,
        "margin_report.json",
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    println!("report: {}", path.display());

    if args.check_paper || section.check_paper.unwrap_or(false) {
        check_paper()?;
    }
    Ok(())
}

/// Asserts the reference conclusions of the cost model with exact arithmetic.
fn check_paper() -> Result<(), CliError> {
    use ekelab::margin::*;
    let fail = |msg: String| Err(CliError::paper_check(msg));

    // universal gates: cycle exactly 1e-10 s, under 2^66 ops in 2^32 s
    let universal = GateModel {
        gate_time: "1e-14".parse().unwrap(),
        serial_gates: 10_000,
    };
    let dt1 = dlog_cycle_time(&universal).map_err(|e| CliError::config(e.to_string()))?;
    if dt1 != "1e-10".parse().unwrap() {
        return fail(format!("cycle time {dt1} != 1e-10"));
    }
    let single = AdversaryBudget::over_hundred_years(1.0, 1);
    let ops1: Real = ops_budget(dt1.to_real(), &single);
    if !below_pow2(ops1, 66) || below_pow2(ops1, 65) {
        return fail(format!("universal ops {ops1:e} not in (2^65, 2^66)"));
    }
    println!("ok: universal cycle 1e-10 s; {ops1:.3e} ops over the horizon < 2^66");

    // ion trap: cycle exactly 2.85e-2 s, under 2^6 ops/s and 2^38 over horizon
    let ion = GateModel {
        gate_time: "2.85e-4".parse().unwrap(),
        serial_gates: 100,
    };
    let dt2 = dlog_cycle_time(&ion).map_err(|e| CliError::config(e.to_string()))?;
    if dt2 != "2.85e-2".parse().unwrap() {
        return fail(format!("cycle time {dt2} != 2.85e-2"));
    }
    let per_second: Real = 1.0 / dt2.to_real::<Real>();
    if !below_pow2(per_second, 6) {
        return fail(format!("{per_second} dlog runs per second >= 2^6"));
    }
    let ops2: Real = ops_budget(dt2.to_real(), &single);
    if !below_pow2(ops2, 38) {
        return fail(format!("ion-trap ops {ops2:e} >= 2^38"));
    }
    println!("ok: ion-trap cycle 2.85e-2 s; {per_second:.2} runs/s < 2^6; {ops2:.3e} over the horizon < 2^38");

    // password-length conclusions: 40 / 68 / 88 bits, and 40 again at two
    // logs per guess
    let cases: [(&str, f64, u32, u32); 4] = [
        ("ion-trap", 2.0, 1, 40),
        ("universal", 2.0, 1, 68),
        ("ion-trap", max_fleet(earth_surface_m2::<Real>(), 1.0), 1, 88),
        ("ion-trap", 4.0, 2, 40),
    ];
    for (profile_name, computers, dlogs, want) in cases {
        let profile = builtin_profile::<Real>(profile_name).unwrap();
        let report = evaluate_margin(&profile, &AdversaryBudget::over_hundred_years(computers, dlogs))
            .map_err(|e| CliError::config(e.to_string()))?;
        if report.required_bits != want {
            return fail(format!(
                "{profile_name} with {computers} machines, {dlogs}/guess: {} bits != {want}",
                report.required_bits
            ));
        }
        println!(
            "ok: {profile_name}, {computers:.3e} machines, {dlogs} dlog/guess -> {want}-bit password"
        );
    }
    // the Earth-surface fleet itself stays under 2^49 machines
    let fleet: Real = max_fleet(earth_surface_m2::<Real>(), 1.0);
    if !below_pow2(fleet, 49) {
        return fail(format!("earth fleet {fleet:e} >= 2^49"));
    }
    println!("ok: earth-surface fleet {fleet:.3e} < 2^49");
    Ok(())
}
