use crate::report::{
    sha256_hex, write_report, Failure, RunManifest, EXIT_INVALID_INPUT, EXIT_NO_CONVERGENCE,
    EXIT_OK, EXIT_PROPERTY_FAILED,
};
use crate::{Cli, Command, ReadingArg, SolveModeArg, VerifyMode};
use serde_json::{json, Value};
use sgia_core::beliefs::posterior;
use sgia_core::dims::JointSpace;
use sgia_core::game::Violation;
use sgia_core::instances::validate_instance;
use sgia_core::lfpa::{check_local_admissibility, AdmissibilityOptions};
use sgia_core::perfect_info::{find_fp_tau, make_perfect_info_scheme, transform_to_pi_ppme};
use sgia_core::solver::{
    brute_force_equilibria, enumeration_count, solve_admissibility_newton, solve_ppme_penalty,
    EnumerationOptions, SolverConfig, SolverMode, TraceRow,
};
use sgia_core::value::{bellman_residuals, evaluate_policy, monte_carlo_value, truncation_horizon};
use sgia_core::verifier::{
    cross_check_propositions, verify_gfpa, verify_opt, verify_ppme_direct, VerifyOptions,
};
use sgia_core::format::instance_from_str;
use sgia_core::{save_instance, Beliefs, Instance, TauReading, ValidationReport};
use std::env::VarError;
use std::fs;
use std::path::Path;
use std::time::Instant;

pub fn run(cli: Cli) -> u8 {
    let started = Instant::now();
    if let Err(f) = thread_cap_from_env() {
        eprintln!("error: {}", f.message);
        return f.code;
    }
    match execute(&cli) {
        Ok((mut manifest, report, code)) => {
            manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
            if let Err(f) = write_report(cli.out.as_deref(), &manifest, &report) {
                eprintln!("error: {}", f.message);
                return f.code;
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// `SGIA_THREADS` caps the global worker pool; unset means the default.
fn thread_cap_from_env() -> Result<(), Failure> {
    match std::env::var("SGIA_THREADS") {
        Err(VarError::NotPresent) => Ok(()),
        Err(VarError::NotUnicode(_)) => {
            Err(Failure::invalid("SGIA_THREADS must be a positive integer"))
        }
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                Ok(())
            }
            _ => Err(Failure::invalid(format!(
                "SGIA_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

struct Loaded {
    instance: Instance,
    hash: String,
}

fn load(input: &Path) -> Result<Loaded, Failure> {
    let bytes = fs::read(input)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", input.display())))?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::invalid(format!("{} is not UTF-8", input.display())))?;
    let instance = instance_from_str(&text)
        .map_err(|e| Failure::invalid(format!("{}: {e}", input.display())))?;
    Ok(Loaded { instance, hash })
}

fn load_valid(input: &Path) -> Result<Loaded, Failure> {
    let loaded = load(input)?;
    let report = validate_instance(&loaded.instance);
    if !report.is_valid() {
        return Err(Failure::invalid(format!(
            "{}: invalid instance: {}",
            input.display(),
            describe_violations(&report)
        )));
    }
    Ok(loaded)
}

fn describe_violations(report: &ValidationReport) -> String {
    let mut parts: Vec<String> = report
        .violations
        .iter()
        .take(8)
        .map(describe_violation)
        .collect();
    if report.violations.len() > 8 {
        parts.push(format!("... {} more", report.violations.len() - 8));
    }
    parts.join("; ")
}

fn describe_violation(v: &Violation) -> String {
    match v.constraint.as_str() {
        // The feasibility sweep knows the action-row simplex constraint as
        // FE2; naming it here keys the diagnostic to verifier reports.
        "PI_ROW_SUM" | "PI_NONNEG" => format!("{v} [FE2: action rows must be distributions]"),
        _ => v.to_string(),
    }
}

fn manifest(command: &str, input: &Path, hash: &str, config: Value, seed: Option<u64>) -> RunManifest {
    RunManifest {
        command: command.into(),
        input: input.display().to_string(),
        input_sha256: hash.into(),
        config,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        wall_clock_seconds: 0.0,
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::invalid(format!("cannot serialize report: {e}")))
}

fn execute(cli: &Cli) -> Result<(RunManifest, Value, u8), Failure> {
    match &cli.command {
        Command::Validate { input, rewrite } => {
            let loaded = load(input)?;
            let inst = &loaded.instance;
            let report = validate_instance(inst);
            let valid = report.is_valid();
            if let Some(path) = rewrite {
                if !valid {
                    return Err(Failure::invalid(format!(
                        "refusing to rewrite an invalid instance: {}",
                        describe_violations(&report)
                    )));
                }
                save_instance(path, inst)?;
            }
            if !valid {
                for v in &report.violations {
                    eprintln!("violation: {}", describe_violation(v));
                }
            }
            let config = json!({
                "rewrite": rewrite.as_ref().map(|p| p.display().to_string()),
            });
            let value = json!({
                "name": inst.name,
                "valid": valid,
                "dims": inst.game.dims_with(&inst.family),
                "violations": report.violations,
            });
            let code = if valid { EXIT_OK } else { EXIT_INVALID_INPUT };
            Ok((manifest("validate", input, &loaded.hash, config, None), value, code))
        }

        Command::Inspect { input } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let dims = inst.game.dims_with(&inst.family);
            let cog_space = JointSpace::new(&inst.family.n_cogs);
            let mut posteriors = Vec::new();
            for h in 0..dims.histories() {
                for rank in cog_space.iter() {
                    let g: Vec<usize> =
                        (0..dims.n_agents).map(|d| cog_space.digit(rank, d)).collect();
                    for i in 0..dims.n_agents {
                        for theta in 0..inst.family.n_types[i] {
                            // Bayes' rule is undefined at zero-probability
                            // types; those cells are simply absent.
                            if let Ok(p) = posterior(&inst.game, &inst.family, i, theta, h, &g) {
                                posteriors.push(p);
                            }
                        }
                    }
                }
            }
            let value = json!({
                "name": inst.name,
                "dims": dims,
                "posteriors": posteriors,
            });
            Ok((manifest("inspect", input, &loaded.hash, json!({}), None), value, EXIT_OK))
        }

        Command::Evaluate { input } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let triple = evaluate_policy(&inst.game, &inst.family, &inst.scheme, &inst.profile)?;
            let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
            let residual = bellman_residuals(&beliefs, &inst.profile, &triple);
            let value = json!({
                "name": inst.name,
                "values": triple,
                "worst_bellman_residual": residual,
            });
            Ok((manifest("evaluate", input, &loaded.hash, json!({}), None), value, EXIT_OK))
        }

        Command::Simulate {
            input,
            episodes,
            horizon,
            seed,
            start,
        } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            if *episodes == 0 {
                return Err(Failure::invalid("--episodes must be positive"));
            }
            if *start >= inst.game.histories() {
                return Err(Failure::invalid(format!(
                    "--start {} is out of range, the game has {} histories",
                    start,
                    inst.game.histories()
                )));
            }
            let beliefs = Beliefs::new(&inst.game, &inst.family, &inst.scheme);
            let horizon = horizon.unwrap_or_else(|| {
                truncation_horizon(inst.game.discount, beliefs.reward_cost_bound(), 1e-4)
            });
            let mc = monte_carlo_value(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                *start,
                *episodes,
                horizon,
                *seed,
            );
            let config = json!({
                "episodes": episodes,
                "horizon": horizon,
                "seed": seed,
                "start": start,
            });
            Ok((
                manifest("simulate", input, &loaded.hash, config, Some(*seed)),
                to_value(&mc)?,
                EXIT_OK,
            ))
        }

        Command::Verify { input, mode } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let (value, verdict) = match mode {
                VerifyMode::Direct => {
                    let r = verify_ppme_direct(
                        &inst.game,
                        &inst.family,
                        &inst.scheme,
                        &inst.profile,
                        VerifyOptions::default(),
                    )?;
                    (to_value(&r)?, r.is_ppme)
                }
                VerifyMode::Opt => {
                    let r = verify_opt(&inst.game, &inst.family, &inst.scheme, &inst.profile)?;
                    (to_value(&r)?, r.is_ppme)
                }
                VerifyMode::Gfpa => {
                    let r = verify_gfpa(
                        &inst.game,
                        &inst.family,
                        &inst.scheme,
                        &inst.profile,
                        VerifyOptions::default(),
                    )?;
                    (to_value(&r)?, r.is_ppme)
                }
                VerifyMode::Cross => {
                    let r = cross_check_propositions(
                        &inst.game,
                        &inst.family,
                        &inst.scheme,
                        &inst.profile,
                        VerifyOptions::default(),
                    )?;
                    if !r.sides_agree {
                        eprintln!("warning: the two program routes disagree on this profile");
                    }
                    let verdict = r.sides_agree && r.opt_holds;
                    (to_value(&r)?, verdict)
                }
            };
            if !verdict {
                eprintln!(
                    "property failed: the profile is not an equilibrium under the {} check",
                    verify_mode_name(*mode)
                );
            }
            let config = json!({ "mode": verify_mode_name(*mode) });
            let code = if verdict { EXIT_OK } else { EXIT_PROPERTY_FAILED };
            Ok((manifest("verify", input, &loaded.hash, config, None), value, code))
        }

        Command::Admissibility { input, theta_hat } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let triple = evaluate_policy(&inst.game, &inst.family, &inst.scheme, &inst.profile)?;
            let cert = check_local_admissibility(
                &inst.game,
                &inst.family,
                &inst.scheme,
                &inst.profile,
                &triple.j,
                &triple.v,
                AdmissibilityOptions {
                    theta_hat: *theta_hat,
                },
            )?;
            if !cert.admissible {
                eprintln!("property failed: the profile is not locally admissible");
            }
            let config = json!({ "theta_hat": theta_hat });
            let code = if cert.admissible { EXIT_OK } else { EXIT_PROPERTY_FAILED };
            Ok((
                manifest("admissibility", input, &loaded.hash, config, None),
                to_value(&cert)?,
                code,
            ))
        }

        Command::Solve {
            input,
            mode,
            restarts,
            seed,
            max_iters,
            grid,
            trace,
        } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            if trace.is_some() && *mode != SolveModeArg::Penalty {
                return Err(Failure::invalid(
                    "--trace is only produced by the penalty solver",
                ));
            }
            let config_echo = json!({
                "mode": solve_mode_name(*mode),
                "restarts": restarts,
                "seed": seed,
                "max_iters": max_iters,
                "grid": grid,
                "trace": trace.as_ref().map(|p| p.display().to_string()),
            });
            match mode {
                SolveModeArg::Enumerate => {
                    let opts = EnumerationOptions {
                        grid: *grid,
                        ..EnumerationOptions::default()
                    };
                    let candidates = enumeration_count(&inst.game, &inst.family, &opts);
                    let equilibria =
                        brute_force_equilibria(&inst.game, &inst.family, &inst.scheme, &opts)?;
                    let value = json!({
                        "mode": "enumerate",
                        "candidates": candidates.map(|c| c.to_string()),
                        "count": equilibria.len(),
                        "equilibria": equilibria,
                    });
                    Ok((
                        manifest("solve", input, &loaded.hash, config_echo, Some(*seed)),
                        value,
                        EXIT_OK,
                    ))
                }
                SolveModeArg::Penalty => {
                    let config = SolverConfig {
                        mode: SolverMode::Penalty,
                        max_iters: *max_iters,
                        restarts: *restarts,
                        seed: *seed,
                        ..SolverConfig::default()
                    };
                    let outcome =
                        solve_ppme_penalty(&inst.game, &inst.family, &inst.scheme, &config)?;
                    if let Some(path) = trace {
                        write_trace(path, &outcome.trace)?;
                    }
                    if !outcome.converged {
                        eprintln!("solver did not converge; the best point found is reported");
                    }
                    let code = if outcome.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE };
                    Ok((
                        manifest("solve", input, &loaded.hash, config_echo, Some(*seed)),
                        to_value(&outcome)?,
                        code,
                    ))
                }
                SolveModeArg::AdmissibilityNewton => {
                    let config = SolverConfig {
                        mode: SolverMode::AdmissibilityNewton,
                        max_iters: *max_iters,
                        restarts: *restarts,
                        seed: *seed,
                        ..SolverConfig::default()
                    };
                    let outcome = solve_admissibility_newton(
                        &inst.game,
                        &inst.family,
                        &inst.scheme,
                        &config,
                        &inst.profile,
                    )?;
                    let converged = outcome.certificate.admissible;
                    if !converged {
                        eprintln!("polish did not reach an admissible point");
                    }
                    let code = if converged { EXIT_OK } else { EXIT_NO_CONVERGENCE };
                    Ok((
                        manifest("solve", input, &loaded.hash, config_echo, Some(*seed)),
                        to_value(&outcome)?,
                        code,
                    ))
                }
            }
        }

        Command::TransformPi { input, emit } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let pi = transform_to_pi_ppme(&inst.game, &inst.family, &inst.scheme, &inst.profile)?;
            if let Some(path) = emit {
                let transformed = Instance {
                    name: format!("{}-pi", inst.name),
                    game: inst.game.clone(),
                    family: pi.scheme.family.clone(),
                    scheme: pi.cost.clone(),
                    profile: pi.profile.clone(),
                };
                save_instance(path, &transformed)?;
            }
            if !pi.input_is_ppme {
                eprintln!("property failed: the input profile is not an equilibrium");
            }
            if !pi.equivalence.within_tolerance {
                eprintln!(
                    "property failed: transformed values drift by {:.3e}",
                    pi.equivalence.max_gap
                );
            }
            let ok = pi.input_is_ppme && pi.equivalence.within_tolerance;
            let config = json!({
                "emit": emit.as_ref().map(|p| p.display().to_string()),
            });
            let code = if ok { EXIT_OK } else { EXIT_PROPERTY_FAILED };
            Ok((
                manifest("transform-pi", input, &loaded.hash, config, None),
                to_value(&pi)?,
                code,
            ))
        }

        Command::RecoverPpme {
            input,
            reading,
            max_iters,
        } => {
            let loaded = load_valid(input)?;
            let inst = &loaded.instance;
            let pi_scheme = make_perfect_info_scheme(&inst.game);
            let tau_reading = match reading {
                ReadingArg::Marginal => TauReading::Marginal,
                ReadingArg::PerState => TauReading::PerState,
            };
            let outcome = find_fp_tau(
                &inst.game,
                &pi_scheme,
                &inst.profile,
                &inst.scheme,
                &inst.family,
                tau_reading,
                *max_iters,
            )?;
            let code = if !outcome.converged {
                eprintln!(
                    "solver did not converge; best residual {:.3e} after {} iterations",
                    outcome.residual, outcome.iterations
                );
                EXIT_NO_CONVERGENCE
            } else if outcome.verification.is_ppme {
                EXIT_OK
            } else {
                eprintln!("property failed: the recovered profile does not verify");
                EXIT_PROPERTY_FAILED
            };
            let config = json!({
                "reading": reading_name(*reading),
                "max_iters": max_iters,
            });
            Ok((
                manifest("recover-ppme", input, &loaded.hash, config, None),
                to_value(&outcome)?,
                code,
            ))
        }
    }
}

fn verify_mode_name(mode: VerifyMode) -> &'static str {
    match mode {
        VerifyMode::Direct => "direct",
        VerifyMode::Opt => "opt",
        VerifyMode::Gfpa => "gfpa",
        VerifyMode::Cross => "cross",
    }
}

fn solve_mode_name(mode: SolveModeArg) -> &'static str {
    match mode {
        SolveModeArg::Enumerate => "enumerate",
        SolveModeArg::Penalty => "penalty",
        SolveModeArg::AdmissibilityNewton => "admissibility-newton",
    }
}

fn reading_name(reading: ReadingArg) -> &'static str {
    match reading {
        ReadingArg::Marginal => "marginal",
        ReadingArg::PerState => "per-state",
    }
}

/// Float width matches the canonical JSON writer so traces are byte-stable.
fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<(), Failure> {
    let mut text = String::from("iter,z_gfpa,max_violation,step\n");
    for r in rows {
        text.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            r.iter, r.z_gfpa, r.max_violation, r.step
        ));
    }
    fs::write(path, text)
        .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))
}
