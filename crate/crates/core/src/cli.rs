//! Command dispatch and report rendering for the command-line surface.
//!
//! A parsed [`AnalysisRequest`] is executed by [`run`], which loads inputs,
//! calls into the owning module, re-verifies anything it constructed, and
//! renders a deterministic text report plus CSV rows. Identical requests
//! with identical inputs and seeds produce byte-identical reports; all
//! intermediate collections iterate in sorted order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::auction::{is_quasi_field, is_sigma_based};
use crate::device::{
    build_correlated_device, build_mixed_device, device_cost, is_dominant_obedience,
    simulate_device, worst_case_payout, DeviceStrategy,
};
use crate::exact::{optimal_perturbation, verify_exact, RectangularTarget};
use crate::formats::{
    display_bundle, parse_auction, parse_device, parse_dimacs, parse_game, parse_info_game,
    parse_info_strategy, parse_mixed, parse_outcome_distribution, parse_profile, parse_rectangle,
    parse_target_set, serialize_device,
};
use crate::game::{Game, PaymentScheme, Profile};
use crate::info::{uniform_implementation_feasible, FeasibilityOutcome};
use crate::pricing::{
    brute_force_set_price, build_singleton_implementation, singleton_price, verify_implementation,
    DEFAULT_ORACLE_CAP,
};
use crate::rat::{format_rational, parse_rational, rat, Rat};
use crate::sat::{assignment_scheme, sat_gadget};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Input(String),
}

/// Whether the command's finding was positive. Commands that check a
/// property report `Negative` when the property fails (distinct exit code),
/// as opposed to erroring out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportStatus {
    Ok,
    Negative,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub lines: Vec<String>,
    pub csv_rows: Vec<(String, String)>,
    pub status: ReportStatus,
}

impl Report {
    fn new() -> Self {
        Report {
            lines: Vec::new(),
            csv_rows: Vec::new(),
            status: ReportStatus::Ok,
        }
    }

    fn push(&mut self, key: &str, text: String) {
        self.lines.push(text.clone());
        self.csv_rows.push((key.to_string(), text));
    }

    fn push_kv(&mut self, key: &str, value: String) {
        self.lines.push(format!("{key}: {value}"));
        self.csv_rows.push((key.to_string(), value));
    }

    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (key, value) in &self.csv_rows {
            let _ = writeln!(out, "{},{}", csv_escape(key), csv_escape(value));
        }
        out
    }
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One fully validated command invocation.
#[derive(Clone, Debug)]
pub enum AnalysisRequest {
    /// Dominance structure, pure equilibria, and (two players) a mixed one.
    Analyze { game: PathBuf },
    /// Price of forcing a single profile.
    Price { game: PathBuf, profile: String },
    /// Build and verify the optimal single-profile scheme.
    Implement {
        game: PathBuf,
        profile: String,
        epsilon: Option<String>,
    },
    /// Perturbation construction for a rectangular target, two players.
    Exact { game: PathBuf, target: String },
    /// Grid-search oracle for a target set.
    Brute {
        game: PathBuf,
        target: String,
        grid: Option<String>,
        cap: Option<u128>,
    },
    /// Build a recommendation device for a mixed or correlated equilibrium.
    DeviceBuild {
        game: PathBuf,
        mixed: Option<String>,
        correlated: Option<String>,
        output: Option<PathBuf>,
    },
    /// Seeded simulation of a device.
    DeviceSim {
        game: PathBuf,
        device: PathBuf,
        seed: u64,
        rounds: u64,
        strategy: Option<String>,
    },
    /// Obedience check for an outcome distribution.
    CorrCheck { game: PathBuf, dist: String },
    /// Feasibility of signal-blind payments in an informational-form game.
    InfoCheck {
        info: PathBuf,
        target: String,
        epsilon: Option<String>,
    },
    /// Run the scenarios of an auction file.
    VcgRun {
        auction: PathBuf,
        report: VcgReportKind,
    },
    /// Build the CNF reduction gadget; optionally check an assignment.
    SatGadget {
        cnf: PathBuf,
        assignment: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VcgReportKind {
    Allocation,
    Payments,
    Utilities,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn input<E: std::fmt::Display>(error: E) -> CliError {
    CliError::Input(error.to_string())
}

fn load_game(path: &Path) -> Result<Game, CliError> {
    parse_game(&read(path)?).map_err(input)
}

fn parse_epsilon(text: &Option<String>) -> Result<Rat, CliError> {
    match text {
        None => Ok(rat(1)),
        Some(t) => parse_rational(t).map_err(input),
    }
}

fn scheme_lines(report: &mut Report, game: &Game, scheme: &PaymentScheme) {
    let entries = scheme.positive_entries(game);
    report.push_kv("promises", entries.len().to_string());
    for (player, profile, amount) in entries {
        report.push_kv(
            &format!("pay[{},{}]", player + 1, game.format_profile(&profile)),
            format_rational(&amount),
        );
    }
}

fn profile_list(game: &Game, profiles: &[Profile]) -> String {
    profiles
        .iter()
        .map(|p| format!("({})", game.format_profile(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run(request: &AnalysisRequest) -> Result<Report, CliError> {
    match request {
        AnalysisRequest::Analyze { game } => analyze(game),
        AnalysisRequest::Price { game, profile } => price(game, profile),
        AnalysisRequest::Implement {
            game,
            profile,
            epsilon,
        } => implement(game, profile, epsilon),
        AnalysisRequest::Exact { game, target } => exact(game, target),
        AnalysisRequest::Brute {
            game,
            target,
            grid,
            cap,
        } => brute(game, target, grid, cap),
        AnalysisRequest::DeviceBuild {
            game,
            mixed,
            correlated,
            output,
        } => device_build(game, mixed, correlated, output),
        AnalysisRequest::DeviceSim {
            game,
            device,
            seed,
            rounds,
            strategy,
        } => device_sim(game, device, *seed, *rounds, strategy),
        AnalysisRequest::CorrCheck { game, dist } => corr_check(game, dist),
        AnalysisRequest::InfoCheck {
            info,
            target,
            epsilon,
        } => info_check(info, target, epsilon),
        AnalysisRequest::VcgRun { auction, report } => vcg_run(auction, *report),
        AnalysisRequest::SatGadget { cnf, assignment } => sat_gadget_cmd(cnf, assignment),
    }
}

fn analyze(path: &Path) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let mut report = Report::new();
    report.push_kv("players", game.player_count().to_string());
    for player in 0..game.player_count() {
        report.push_kv(
            &format!("strategies[{}]", player + 1),
            game.strategy_labels(player).join(","),
        );
    }
    for player in 0..game.player_count() {
        let surviving: Vec<String> = game
            .non_dominated(player)
            .into_iter()
            .map(|s| game.strategy_labels(player)[s].clone())
            .collect();
        report.push_kv(&format!("non_dominated[{}]", player + 1), surviving.join(","));
    }
    report.push_kv(
        "pure_nash",
        profile_list(&game, &game.pure_nash_profiles()),
    );
    if game.player_count() == 2 {
        let eq = game.mixed_nash_2p().map_err(input)?;
        for player in 0..2 {
            let weights: Vec<String> = eq.weights()[player]
                .iter()
                .map(format_rational)
                .collect();
            report.push_kv(&format!("mixed_nash[{}]", player + 1), weights.join(","));
        }
    }
    Ok(report)
}

fn price(path: &Path, profile_text: &str) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let target = parse_profile(&game, profile_text).map_err(input)?;
    let price = singleton_price(&game, &target).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("profile", game.format_profile(&target));
    for player in 0..game.player_count() {
        report.push_kv(
            &format!("gap[{}]", player + 1),
            format_rational(&crate::pricing::deviation_gap(&game, &target, player)),
        );
    }
    report.push_kv("price", format_rational(&price));
    Ok(report)
}

fn implement(
    path: &Path,
    profile_text: &str,
    epsilon_text: &Option<String>,
) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let target = parse_profile(&game, profile_text).map_err(input)?;
    let epsilon = parse_epsilon(epsilon_text)?;
    let scheme = build_singleton_implementation(&game, &target, &epsilon).map_err(input)?;
    let verification =
        verify_implementation(&game, &scheme, std::slice::from_ref(&target)).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("profile", game.format_profile(&target));
    report.push_kv("epsilon", format_rational(&epsilon));
    scheme_lines(&mut report, &game, &scheme);
    report.push_kv(
        "surviving",
        profile_list(&game, &verification.surviving),
    );
    report.push_kv(
        "worst_case_cost",
        format_rational(&verification.worst_case_cost),
    );
    report.push_kv("verified", verification.target_contained.to_string());
    if !verification.target_contained {
        report.status = ReportStatus::Negative;
    }
    Ok(report)
}

fn exact(path: &Path, target_text: &str) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let sides = parse_rectangle(&game, target_text).map_err(input)?;
    let target = RectangularTarget::new(&game, sides).map_err(input)?;
    let result = optimal_perturbation(&game, &target).map_err(input)?;
    let verified = verify_exact(&game, &result.report.scheme, &target).map_err(input)?;
    let mut report = Report::new();
    for player in 0..game.player_count() {
        let side: Vec<String> = target
            .side(player)
            .iter()
            .map(|&s| game.strategy_labels(player)[s].clone())
            .collect();
        report.push_kv(&format!("target[{}]", player + 1), side.join("|"));
    }
    for (player, e) in result.e_values.iter().enumerate() {
        report.push_kv(&format!("e[{}]", player + 1), format_rational(e));
    }
    report.push_kv("penalty", format_rational(&result.penalty));
    scheme_lines(&mut report, &game, &result.report.scheme);
    report.push_kv(
        "surviving",
        profile_list(&game, &result.report.surviving),
    );
    report.push_kv(
        "worst_case_cost",
        format_rational(&result.report.worst_case_cost),
    );
    report.push_kv("exact", verified.to_string());
    for (i, note) in result.notes.iter().enumerate() {
        report.push_kv(&format!("note[{i}]"), note.clone());
    }
    if !verified {
        report.status = ReportStatus::Negative;
    }
    Ok(report)
}

fn brute(
    path: &Path,
    target_text: &str,
    grid_text: &Option<String>,
    cap: &Option<u128>,
) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let target = parse_target_set(&game, target_text).map_err(input)?;
    let grid: Option<Vec<Rat>> = match grid_text {
        None => None,
        Some(text) => Some(
            text.split(',')
                .map(|t| parse_rational(t).map_err(input))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let cap = cap.unwrap_or(DEFAULT_ORACLE_CAP);
    let outcome =
        brute_force_set_price(&game, &target, grid.as_deref(), cap).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("target", profile_list(&game, &target));
    match outcome {
        None => {
            report.push_kv("result", "no grid-valued scheme found".to_string());
            report.status = ReportStatus::Negative;
        }
        Some(found) => {
            report.push_kv("price", format_rational(&found.price));
            scheme_lines(&mut report, &game, &found.scheme);
        }
    }
    Ok(report)
}

fn device_build(
    path: &Path,
    mixed_text: &Option<String>,
    correlated_text: &Option<String>,
    output: &Option<PathBuf>,
) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let device = match (mixed_text, correlated_text) {
        (Some(mixed_text), None) => {
            let mixed = parse_mixed(&game, mixed_text).map_err(input)?;
            build_mixed_device(&game, &mixed).map_err(input)?
        }
        (None, Some(dist_text)) => {
            let dist = parse_outcome_distribution(&game, dist_text).map_err(input)?;
            build_correlated_device(&game, &dist).map_err(input)?
        }
        _ => {
            return Err(CliError::Input(
                "exactly one of --mixed or --correlated is required".to_string(),
            ))
        }
    };
    let dominant = is_dominant_obedience(&game, &device).map_err(input)?;
    let cost = device_cost(&device).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("signal_profiles", device.signal_support().len().to_string());
    report.push_kv("obedience_dominant", dominant.to_string());
    report.push_kv("cost", format_rational(&cost));
    report.push_kv(
        "worst_case_payout",
        format_rational(&worst_case_payout(&device)),
    );
    if let Some(path) = output {
        std::fs::write(path, serialize_device(&device))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        report.push_kv("written", path.display().to_string());
    }
    if !dominant {
        report.status = ReportStatus::Negative;
    }
    Ok(report)
}

fn device_sim(
    game_path: &Path,
    device_path: &Path,
    seed: u64,
    rounds: u64,
    strategy_text: &Option<String>,
) -> Result<Report, CliError> {
    let game = load_game(game_path)?;
    let device = parse_device(&read(device_path)?).map_err(input)?;
    let strategy = match strategy_text {
        None => DeviceStrategy::obedient(&device).map_err(input)?,
        Some(text) => {
            // Same syntax as informational-form strategies: per player,
            // signal=action bindings.
            let maps = parse_device_strategy(&device, text)?;
            DeviceStrategy(maps)
        }
    };
    let outcome = simulate_device(&game, &device, &strategy, seed, rounds).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("seed", seed.to_string());
    report.push_kv("rounds", rounds.to_string());
    for (profile, count) in &outcome.outcome_counts {
        report.push_kv(
            &format!("count[{}]", game.format_profile(profile)),
            count.to_string(),
        );
    }
    for (player, total) in outcome.device_payments.iter().enumerate() {
        report.push_kv(
            &format!("device_payments[{}]", player + 1),
            format_rational(total),
        );
    }
    for (player, total) in outcome.base_payoffs.iter().enumerate() {
        report.push_kv(
            &format!("base_payoffs[{}]", player + 1),
            format_rational(total),
        );
    }
    Ok(report)
}

fn parse_device_strategy(
    device: &crate::device::ImplementationDevice,
    text: &str,
) -> Result<Vec<Vec<usize>>, CliError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != device.player_count() {
        return Err(CliError::Input(format!(
            "{} maps for {} players",
            parts.len(),
            device.player_count()
        )));
    }
    let mut maps = Vec::with_capacity(parts.len());
    for (player, part) in parts.iter().enumerate() {
        let signals = &device.signal_labels()[player];
        let actions = &device.action_labels()[player];
        let mut map: Vec<Option<usize>> = vec![None; signals.len()];
        for binding in part.split(',') {
            let (s, a) = binding.split_once('=').ok_or_else(|| {
                CliError::Input(format!("`{binding}` is not signal=action"))
            })?;
            let signal = signals
                .iter()
                .position(|l| l == s.trim())
                .ok_or_else(|| CliError::Input(format!("unknown signal `{s}`")))?;
            let action = actions
                .iter()
                .position(|l| l == a.trim())
                .ok_or_else(|| CliError::Input(format!("unknown action `{a}`")))?;
            map[signal] = Some(action);
        }
        maps.push(
            map.into_iter()
                .enumerate()
                .map(|(s, a)| {
                    a.ok_or_else(|| {
                        CliError::Input(format!(
                            "player {} gives no action for signal `{}`",
                            player + 1,
                            signals[s]
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(maps)
}

fn corr_check(path: &Path, dist_text: &str) -> Result<Report, CliError> {
    let game = load_game(path)?;
    let dist = parse_outcome_distribution(&game, dist_text).map_err(input)?;
    let holds = game.is_correlated_equilibrium(&dist).map_err(input)?;
    let mut report = Report::new();
    for (profile, p) in dist.support(&game) {
        report.push_kv(
            &format!("prob[{}]", game.format_profile(&profile)),
            format_rational(&p),
        );
    }
    report.push_kv("correlated_equilibrium", holds.to_string());
    if !holds {
        report.status = ReportStatus::Negative;
    }
    Ok(report)
}

fn info_check(
    path: &Path,
    target_text: &str,
    epsilon_text: &Option<String>,
) -> Result<Report, CliError> {
    let info = parse_info_game(&read(path)?).map_err(input)?;
    let target = parse_info_strategy(&info, target_text).map_err(input)?;
    let epsilon = parse_epsilon(epsilon_text)?;
    let outcome = uniform_implementation_feasible(&info, &target, &epsilon).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("epsilon", format_rational(&epsilon));
    match outcome {
        FeasibilityOutcome::Feasible(payments) => {
            report.push_kv("feasible", "true".to_string());
            let entries = payments.positive_entries();
            report.push_kv("promises", entries.len().to_string());
            for (player, action_profile, amount) in entries {
                let labels: Vec<String> = action_profile
                    .iter()
                    .enumerate()
                    .map(|(p, &a)| info.action_labels()[p][a].clone())
                    .collect();
                report.push_kv(
                    &format!("pay[{},{}]", player + 1, labels.join(",")),
                    format_rational(&amount),
                );
            }
        }
        FeasibilityOutcome::Infeasible(certificate) => {
            report.push_kv("feasible", "false".to_string());
            report.push_kv("player", (certificate.player + 1).to_string());
            let block: Vec<String> = certificate
                .opponent_actions
                .iter()
                .enumerate()
                .map(|(slot, &a)| {
                    let p = if slot < certificate.player {
                        slot
                    } else {
                        slot + 1
                    };
                    info.action_labels()[p][a].clone()
                })
                .collect();
            report.push_kv("opponent_actions", block.join(","));
            for (i, edge) in certificate.cycle.iter().enumerate() {
                let state: Vec<String> = edge
                    .signal_profile
                    .iter()
                    .enumerate()
                    .map(|(p, &s)| info.signal_labels()[p][s].clone())
                    .collect();
                let actions = info.action_labels()[certificate.player].clone();
                report.push(
                    &format!("edge[{i}]"),
                    format!(
                        "edge[{i}]: keep {} over {} at state ({}): payoffs {} vs {}, requires margin {}",
                        actions[edge.recommended],
                        actions[edge.alternative],
                        state.join(","),
                        format_rational(&edge.recommended_payoff),
                        format_rational(&edge.alternative_payoff),
                        format_rational(&edge.bound),
                    ),
                );
            }
            report.push_kv("cycle_total", format_rational(&certificate.total));
            report.status = ReportStatus::Negative;
        }
    }
    Ok(report)
}

fn vcg_run(path: &Path, kind: VcgReportKind) -> Result<Report, CliError> {
    let file = parse_auction(&read(path)?).map_err(input)?;
    let mut report = Report::new();
    report.push_kv("goods", file.good_labels.join(","));
    report.push_kv("buyers", file.mechanism.buyer_count().to_string());
    report.push_kv("frugal", file.mechanism.is_frugal().to_string());
    if let Some(family) = &file.family {
        let members: Vec<String> = family
            .members()
            .map(|b| display_bundle(&file.good_labels, b))
            .collect();
        report.push_kv("sigma", members.join(" "));
        report.push_kv("quasi_field", is_quasi_field(family).to_string());
        for (name, valuation) in &file.valuations {
            report.push_kv(
                &format!("sigma_based[{name}]"),
                is_sigma_based(valuation, family).to_string(),
            );
        }
    }
    let scenarios = if file.scenarios.is_empty() {
        vec![(
            "truthful".to_string(),
            file.true_valuations.clone(),
        )]
    } else {
        file.scenarios.clone()
    };
    for (name, reports) in &scenarios {
        if reports.is_empty() {
            return Err(CliError::Input(format!(
                "scenario `{name}` has no reports and the file lists no true valuations"
            )));
        }
        let profile: Vec<_> = reports
            .iter()
            .map(|r| file.valuations[r].clone())
            .collect();
        let allocation = file.mechanism.select_allocation(&profile).map_err(input)?;
        let mut slots: Vec<String> = Vec::new();
        for buyer in 0..file.mechanism.buyer_count() {
            slots.push(format!(
                "{}->{}",
                display_bundle(&file.good_labels, allocation.buyer(buyer)),
                buyer + 1
            ));
        }
        report.push_kv(&format!("allocation[{name}]"), slots.join(" "));
        if matches!(kind, VcgReportKind::Payments | VcgReportKind::Utilities) {
            for buyer in 0..file.mechanism.buyer_count() {
                let payment = file.mechanism.vc_payment(&profile, buyer).map_err(input)?;
                report.push_kv(
                    &format!("payment[{name},{}]", buyer + 1),
                    format_rational(&payment),
                );
            }
        }
        if matches!(kind, VcgReportKind::Utilities) {
            if file.true_valuations.len() != file.mechanism.buyer_count() {
                return Err(CliError::Input(
                    "utilities need `true_valuations` naming one valuation per buyer".to_string(),
                ));
            }
            for buyer in 0..file.mechanism.buyer_count() {
                let true_valuation = &file.valuations[&file.true_valuations[buyer]];
                let utility = file
                    .mechanism
                    .utility(&profile, buyer, true_valuation)
                    .map_err(input)?;
                report.push_kv(
                    &format!("utility[{name},{}]", buyer + 1),
                    format_rational(&utility),
                );
            }
        }
    }
    Ok(report)
}

fn sat_gadget_cmd(path: &Path, assignment_text: &Option<String>) -> Result<Report, CliError> {
    let formula = parse_dimacs(&read(path)?).map_err(input)?;
    let (game, target) = sat_gadget(&formula);
    let mut report = Report::new();
    report.push_kv("variables", formula.variable_count().to_string());
    report.push_kv("clauses", formula.clause_count().to_string());
    report.push_kv(
        "strategies_per_agent",
        game.strategy_count(0).to_string(),
    );
    report.push_kv("target_profiles", target.len().to_string());
    if let Some(text) = assignment_text {
        let assignment: Vec<bool> = text
            .trim()
            .chars()
            .map(|c| match c {
                'T' | 't' | '1' => Ok(true),
                'F' | 'f' | '0' => Ok(false),
                other => Err(CliError::Input(format!(
                    "assignment characters are T/F/1/0, got `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let satisfies = formula.satisfies(&assignment).map_err(input)?;
        report.push_kv("satisfies_formula", satisfies.to_string());
        let scheme = assignment_scheme(&formula, &assignment).map_err(input)?;
        let verification = verify_implementation(&game, &scheme, &target).map_err(input)?;
        report.push_kv("verified", verification.target_contained.to_string());
        report.push_kv(
            "worst_case_cost",
            format_rational(&verification.worst_case_cost),
        );
        if !verification.target_contained {
            report.status = ReportStatus::Negative;
        }
    }
    Ok(report)
}
