//! File formats and CLI argument syntaxes.
//!
//! All file formats are JSON. Numeric literals are parsed exactly: integers
//! and decimals become rationals without ever passing through floating
//! point, and values with non-decimal denominators are written as `"p/q"`
//! strings. Players are 1-based in files and on the command line and
//! 0-based in the API.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::auction::{
    Allocation, AuctionError, AuctionMechanism, BundleFamily, CompletionMode, TieBreak, Valuation,
};
use crate::device::{DeviceError, ImplementationDevice};
use crate::game::{Game, GameError, MixedProfile, OutcomeDistribution, Profile};
use crate::info::{InfoError, InfoGame, InfoStrategy};
use crate::rat::{format_rational, parse_rational, Rat};
use crate::sat::{CnfFormula, SatError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Auction(#[from] AuctionError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

fn schema(context: &str, message: impl std::fmt::Display) -> FormatError {
    FormatError::Schema(format!("{context}: {message}"))
}

fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| {
        FormatError::Syntax(format!("line {}, column {}: {e}", e.line(), e.column()))
    })
}

fn as_object<'v>(value: &'v Value, context: &str) -> Result<&'v Map<String, Value>, FormatError> {
    value
        .as_object()
        .ok_or_else(|| schema(context, "expected an object"))
}

fn as_array<'v>(value: &'v Value, context: &str) -> Result<&'v Vec<Value>, FormatError> {
    value
        .as_array()
        .ok_or_else(|| schema(context, "expected an array"))
}

fn as_string(value: &Value, context: &str) -> Result<String, FormatError> {
    value
        .as_str()
        .map(|s| s.to_string())
        .ok_or_else(|| schema(context, "expected a string"))
}

fn as_usize(value: &Value, context: &str) -> Result<usize, FormatError> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| schema(context, "expected a non-negative integer"))
}

fn field<'v>(
    object: &'v Map<String, Value>,
    name: &str,
    context: &str,
) -> Result<&'v Value, FormatError> {
    object
        .get(name)
        .ok_or_else(|| schema(context, format!("missing field `{name}`")))
}

fn reject_unknown_fields(
    object: &Map<String, Value>,
    known: &[&str],
    context: &str,
) -> Result<(), FormatError> {
    for key in object.keys() {
        if !known.contains(&key.as_str()) {
            return Err(schema(context, format!("unknown field `{key}`")));
        }
    }
    Ok(())
}

/// Exact numeric reading: JSON numbers keep their literal text (arbitrary
/// precision), strings may carry `p/q` fractions.
fn value_to_rat(value: &Value, context: &str) -> Result<Rat, FormatError> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| schema(context, e)),
        Value::String(s) => parse_rational(s).map_err(|e| schema(context, e)),
        _ => Err(schema(context, "expected a number")),
    }
}

fn rat_to_value(rat: &Rat) -> Value {
    let text = format_rational(rat);
    if text.contains('/') {
        Value::String(text)
    } else {
        Value::Number(Number::from_str(&text).expect("formatted literal"))
    }
}

fn string_list(value: &Value, context: &str) -> Result<Vec<String>, FormatError> {
    as_array(value, context)?
        .iter()
        .enumerate()
        .map(|(i, v)| as_string(v, &format!("{context}[{i}]")))
        .collect()
}

fn label_table(value: &Value, context: &str) -> Result<Vec<Vec<String>>, FormatError> {
    as_array(value, context)?
        .iter()
        .enumerate()
        .map(|(i, v)| string_list(v, &format!("{context}[{i}]")))
        .collect()
}

// ---------------------------------------------------------------------------
// Strategic-form game files
// ---------------------------------------------------------------------------

/// Reads a payoff tensor: nested arrays, one level per player (player 1
/// outermost), innermost an n-vector of numbers.
fn walk_payoffs(
    value: &Value,
    shape: &[usize],
    players: usize,
    context: &str,
    out: &mut Vec<Vec<Rat>>,
) -> Result<(), FormatError> {
    if shape.is_empty() {
        let cell = as_array(value, context)?;
        if cell.len() != players {
            return Err(schema(
                context,
                format!("payoff vector has {} entries, expected {players}", cell.len()),
            ));
        }
        let vector = cell
            .iter()
            .enumerate()
            .map(|(i, v)| value_to_rat(v, &format!("{context}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(vector);
        return Ok(());
    }
    let level = as_array(value, context)?;
    if level.len() != shape[0] {
        return Err(schema(
            context,
            format!("expected {} entries, got {}", shape[0], level.len()),
        ));
    }
    for (i, inner) in level.iter().enumerate() {
        walk_payoffs(
            inner,
            &shape[1..],
            players,
            &format!("{context}[{i}]"),
            out,
        )?;
    }
    Ok(())
}

pub fn parse_game(text: &str) -> Result<Game, FormatError> {
    let root = parse_json(text)?;
    let object = as_object(&root, "game")?;
    reject_unknown_fields(object, &["players", "strategies", "payoffs"], "game")?;
    let players = as_usize(field(object, "players", "game")?, "game.players")?;
    let strategies = label_table(field(object, "strategies", "game")?, "game.strategies")?;
    if strategies.len() != players {
        return Err(schema(
            "game.strategies",
            format!("{} strategy lists for {players} players", strategies.len()),
        ));
    }
    let shape: Vec<usize> = strategies.iter().map(|s| s.len()).collect();
    let mut payoffs = Vec::new();
    walk_payoffs(
        field(object, "payoffs", "game")?,
        &shape,
        players,
        "game.payoffs",
        &mut payoffs,
    )?;
    Ok(Game::new(strategies, payoffs)?)
}

pub fn serialize_game(game: &Game) -> String {
    fn nest(game: &Game, prefix: &mut Vec<usize>, player: usize) -> Value {
        if player == game.player_count() {
            let payoff = game.payoff(&Profile::new(prefix.clone())).unwrap();
            return Value::Array(payoff.iter().map(rat_to_value).collect());
        }
        let mut level = Vec::with_capacity(game.strategy_count(player));
        for s in 0..game.strategy_count(player) {
            prefix.push(s);
            level.push(nest(game, prefix, player + 1));
            prefix.pop();
        }
        Value::Array(level)
    }
    let mut object = Map::new();
    object.insert(
        "players".to_string(),
        Value::Number(Number::from(game.player_count() as u64)),
    );
    object.insert(
        "strategies".to_string(),
        Value::Array(
            (0..game.player_count())
                .map(|p| {
                    Value::Array(
                        game.strategy_labels(p)
                            .iter()
                            .map(|l| Value::String(l.clone()))
                            .collect(),
                    )
                })
                .collect(),
        ),
    );
    object.insert("payoffs".to_string(), nest(game, &mut Vec::new(), 0));
    let mut text = serde_json::to_string_pretty(&Value::Object(object)).expect("serializable");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Informational-form game files
// ---------------------------------------------------------------------------

pub fn parse_info_game(text: &str) -> Result<InfoGame, FormatError> {
    let root = parse_json(text)?;
    let object = as_object(&root, "info")?;
    reject_unknown_fields(object, &["signals", "actions", "payoffs"], "info")?;
    let signals = label_table(field(object, "signals", "info")?, "info.signals")?;
    let actions = label_table(field(object, "actions", "info")?, "info.actions")?;
    let players = signals.len();
    let signal_shape: Vec<usize> = signals.iter().map(|s| s.len()).collect();
    let action_shape: Vec<usize> = actions.iter().map(|s| s.len()).collect();

    // The payoff block nests signal dimensions first, then action
    // dimensions, with the per-player vector innermost.
    fn walk_states(
        value: &Value,
        signal_shape: &[usize],
        action_shape: &[usize],
        players: usize,
        context: &str,
        out: &mut Vec<Vec<Vec<Rat>>>,
    ) -> Result<(), FormatError> {
        if signal_shape.is_empty() {
            let mut block = Vec::new();
            walk_payoffs(value, action_shape, players, context, &mut block)?;
            out.push(block);
            return Ok(());
        }
        let level = as_array(value, context)?;
        if level.len() != signal_shape[0] {
            return Err(schema(
                context,
                format!("expected {} entries, got {}", signal_shape[0], level.len()),
            ));
        }
        for (i, inner) in level.iter().enumerate() {
            walk_states(
                inner,
                &signal_shape[1..],
                action_shape,
                players,
                &format!("{context}[{i}]"),
                out,
            )?;
        }
        Ok(())
    }

    let mut payoffs = Vec::new();
    walk_states(
        field(object, "payoffs", "info")?,
        &signal_shape,
        &action_shape,
        players,
        "info.payoffs",
        &mut payoffs,
    )?;
    Ok(InfoGame::new(signals, actions, payoffs)?)
}

// ---------------------------------------------------------------------------
// Device files
// ---------------------------------------------------------------------------

fn indices_for(
    labels: &[Vec<String>],
    names: &[String],
    context: &str,
) -> Result<Vec<usize>, FormatError> {
    if names.len() != labels.len() {
        return Err(schema(
            context,
            format!("expected {} entries, got {}", labels.len(), names.len()),
        ));
    }
    names
        .iter()
        .zip(labels.iter())
        .enumerate()
        .map(|(player, (name, list))| {
            list.iter().position(|l| l == name).ok_or_else(|| {
                schema(
                    context,
                    format!("player {} has no label `{name}`", player + 1),
                )
            })
        })
        .collect()
}

pub fn parse_device(text: &str) -> Result<ImplementationDevice, FormatError> {
    let root = parse_json(text)?;
    let object = as_object(&root, "device")?;
    reject_unknown_fields(object, &["signals", "actions", "h", "payments"], "device")?;
    let signals = label_table(field(object, "signals", "device")?, "device.signals")?;
    let actions = label_table(field(object, "actions", "device")?, "device.actions")?;
    let mut h_entries = Vec::new();
    for (i, entry) in as_array(field(object, "h", "device")?, "device.h")?
        .iter()
        .enumerate()
    {
        let context = format!("device.h[{i}]");
        let entry = as_object(entry, &context)?;
        reject_unknown_fields(entry, &["signals", "p"], &context)?;
        let names = string_list(field(entry, "signals", &context)?, &context)?;
        let profile = indices_for(&signals, &names, &context)?;
        let p = value_to_rat(field(entry, "p", &context)?, &context)?;
        h_entries.push((profile, p));
    }
    let mut payment_entries = Vec::new();
    if let Some(payments) = object.get("payments") {
        for (i, entry) in as_array(payments, "device.payments")?.iter().enumerate() {
            let context = format!("device.payments[{i}]");
            let entry = as_object(entry, &context)?;
            reject_unknown_fields(entry, &["player", "signals", "actions", "amount"], &context)?;
            let player = as_usize(field(entry, "player", &context)?, &context)?;
            if player == 0 {
                return Err(schema(&context, "players are 1-based"));
            }
            let signal_names = string_list(field(entry, "signals", &context)?, &context)?;
            let action_names = string_list(field(entry, "actions", &context)?, &context)?;
            let amount = value_to_rat(field(entry, "amount", &context)?, &context)?;
            payment_entries.push((
                player - 1,
                indices_for(&signals, &signal_names, &context)?,
                indices_for(&actions, &action_names, &context)?,
                amount,
            ));
        }
    }
    Ok(ImplementationDevice::new(
        signals,
        actions,
        h_entries,
        payment_entries,
    )?)
}

pub fn serialize_device(device: &ImplementationDevice) -> String {
    let labels_value = |labels: &[Vec<String>]| {
        Value::Array(
            labels
                .iter()
                .map(|list| {
                    Value::Array(list.iter().map(|l| Value::String(l.clone())).collect())
                })
                .collect(),
        )
    };
    let name_list = |labels: &[Vec<String>], indices: &[usize]| {
        Value::Array(
            indices
                .iter()
                .enumerate()
                .map(|(p, &i)| Value::String(labels[p][i].clone()))
                .collect(),
        )
    };
    let mut object = Map::new();
    object.insert("signals".to_string(), labels_value(device.signal_labels()));
    object.insert("actions".to_string(), labels_value(device.action_labels()));
    object.insert(
        "h".to_string(),
        Value::Array(
            device
                .signal_support()
                .into_iter()
                .map(|(profile, p)| {
                    let mut entry = Map::new();
                    entry.insert(
                        "signals".to_string(),
                        name_list(device.signal_labels(), &profile),
                    );
                    entry.insert("p".to_string(), rat_to_value(&p));
                    Value::Object(entry)
                })
                .collect(),
        ),
    );
    object.insert(
        "payments".to_string(),
        Value::Array(
            device
                .payment_entries()
                .into_iter()
                .map(|(player, signal, action, amount)| {
                    let mut entry = Map::new();
                    entry.insert(
                        "player".to_string(),
                        Value::Number(Number::from((player + 1) as u64)),
                    );
                    entry.insert(
                        "signals".to_string(),
                        name_list(device.signal_labels(), &signal),
                    );
                    entry.insert(
                        "actions".to_string(),
                        name_list(device.action_labels(), &action),
                    );
                    entry.insert("amount".to_string(), rat_to_value(&amount));
                    Value::Object(entry)
                })
                .collect(),
        ),
    );
    let mut text = serde_json::to_string_pretty(&Value::Object(object)).expect("serializable");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Auction files
// ---------------------------------------------------------------------------

/// A parsed auction file: goods, mechanism, named valuations, an optional
/// bundle family, and named report scenarios.
#[derive(Clone, Debug)]
pub struct AuctionFile {
    pub good_labels: Vec<String>,
    pub mechanism: AuctionMechanism,
    pub valuations: BTreeMap<String, Valuation>,
    pub family: Option<BundleFamily>,
    pub true_valuations: Vec<String>,
    pub scenarios: Vec<(String, Vec<String>)>,
}

fn parse_bundle(
    good_labels: &[String],
    text: &str,
    context: &str,
) -> Result<u32, FormatError> {
    let mut bundle: u32 = 0;
    if text.is_empty() {
        return Ok(0);
    }
    for part in text.split(',') {
        let good = good_labels
            .iter()
            .position(|l| l == part.trim())
            .ok_or_else(|| schema(context, format!("unknown good `{part}`")))?;
        bundle |= 1 << good;
    }
    Ok(bundle)
}

fn bundle_to_string(good_labels: &[String], bundle: u32) -> String {
    let mut parts = Vec::new();
    for (i, label) in good_labels.iter().enumerate() {
        if bundle & (1 << i) != 0 {
            parts.push(label.clone());
        }
    }
    parts.join(",")
}

pub fn parse_auction(text: &str) -> Result<AuctionFile, FormatError> {
    let root = parse_json(text)?;
    let object = as_object(&root, "auction")?;
    reject_unknown_fields(
        object,
        &[
            "goods",
            "buyers",
            "completion",
            "valuations",
            "mechanism",
            "sigma",
            "true_valuations",
            "scenarios",
        ],
        "auction",
    )?;
    let good_labels = string_list(field(object, "goods", "auction")?, "auction.goods")?;
    let good_count = good_labels.len();
    let buyers = as_usize(field(object, "buyers", "auction")?, "auction.buyers")?;
    let completion = match as_string(field(object, "completion", "auction")?, "auction.completion")?
        .as_str()
    {
        "explicit-total" => CompletionMode::ExplicitTotal,
        "monotone-closure" => CompletionMode::MonotoneClosure,
        other => {
            return Err(schema(
                "auction.completion",
                format!("unknown mode `{other}`"),
            ))
        }
    };

    let mut valuations = BTreeMap::new();
    for (name, table) in as_object(field(object, "valuations", "auction")?, "auction.valuations")? {
        let context = format!("auction.valuations.{name}");
        let table = as_object(table, &context)?;
        let mut entries = Vec::new();
        for (bundle_text, value) in table {
            let bundle = parse_bundle(&good_labels, bundle_text, &context)?;
            entries.push((bundle, value_to_rat(value, &context)?));
        }
        valuations.insert(
            name.clone(),
            Valuation::from_entries(good_count, &entries, completion)?,
        );
    }

    let mechanism_context = "auction.mechanism";
    let mechanism_object = as_object(field(object, "mechanism", "auction")?, mechanism_context)?;
    reject_unknown_fields(
        mechanism_object,
        &["frugal", "bound", "offsets", "tie_break"],
        mechanism_context,
    )?;
    let mut mechanism = AuctionMechanism::new(good_count, buyers)?;
    if let Some(frugal) = mechanism_object.get("frugal") {
        mechanism = mechanism.frugal(frugal.as_bool().ok_or_else(|| {
            schema(mechanism_context, "`frugal` must be a boolean")
        })?);
    }
    if let Some(bound) = mechanism_object.get("bound") {
        mechanism = mechanism.with_bound(value_to_rat(bound, mechanism_context)?);
    }
    if let Some(offsets) = mechanism_object.get("offsets") {
        let values = as_array(offsets, mechanism_context)?
            .iter()
            .map(|v| value_to_rat(v, mechanism_context))
            .collect::<Result<Vec<_>, _>>()?;
        mechanism = mechanism.with_offsets(values)?;
    }
    if let Some(overrides) = mechanism_object.get("tie_break") {
        let mut list = Vec::new();
        for (i, entry) in as_array(overrides, mechanism_context)?.iter().enumerate() {
            let context = format!("{mechanism_context}.tie_break[{i}]");
            let entry = as_object(entry, &context)?;
            reject_unknown_fields(entry, &["reports", "allocation"], &context)?;
            let report_names = string_list(field(entry, "reports", &context)?, &context)?;
            if report_names.len() != buyers {
                return Err(schema(
                    &context,
                    format!("{} reports for {buyers} buyers", report_names.len()),
                ));
            }
            let profile = report_names
                .iter()
                .map(|name| {
                    valuations.get(name).cloned().ok_or_else(|| {
                        schema(&context, format!("unknown valuation `{name}`"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let allocation_object = as_object(field(entry, "allocation", &context)?, &context)?;
            let mut slots: Vec<u32> = vec![0; buyers + 1];
            for (slot_name, bundle_text) in allocation_object {
                let slot: usize = slot_name
                    .parse()
                    .map_err(|_| schema(&context, "allocation keys are buyer numbers"))?;
                if slot == 0 || slot > buyers {
                    return Err(schema(&context, format!("no buyer `{slot_name}`")));
                }
                slots[slot] =
                    parse_bundle(&good_labels, &as_string(bundle_text, &context)?, &context)?;
            }
            let assigned: u32 = slots.iter().fold(0, |acc, &b| acc | b);
            let full: u32 = ((1usize << good_count) - 1) as u32;
            slots[0] = full & !assigned;
            list.push((profile, Allocation::new(good_count, slots)?));
        }
        mechanism = mechanism.with_tie_break(TieBreak::ByReport(list));
    }

    let family = match object.get("sigma") {
        None => None,
        Some(value) => {
            let members = string_list(value, "auction.sigma")?
                .iter()
                .map(|text| parse_bundle(&good_labels, text, "auction.sigma"))
                .collect::<Result<Vec<_>, _>>()?;
            Some(BundleFamily::new(good_count, members)?)
        }
    };

    let true_valuations = match object.get("true_valuations") {
        None => Vec::new(),
        Some(value) => string_list(value, "auction.true_valuations")?,
    };
    for name in &true_valuations {
        if !valuations.contains_key(name) {
            return Err(schema(
                "auction.true_valuations",
                format!("unknown valuation `{name}`"),
            ));
        }
    }

    let mut scenarios = Vec::new();
    if let Some(value) = object.get("scenarios") {
        for (i, entry) in as_array(value, "auction.scenarios")?.iter().enumerate() {
            let context = format!("auction.scenarios[{i}]");
            let entry = as_object(entry, &context)?;
            reject_unknown_fields(entry, &["name", "reports"], &context)?;
            let name = as_string(field(entry, "name", &context)?, &context)?;
            let reports = string_list(field(entry, "reports", &context)?, &context)?;
            if reports.len() != buyers {
                return Err(schema(
                    &context,
                    format!("{} reports for {buyers} buyers", reports.len()),
                ));
            }
            for report in &reports {
                if !valuations.contains_key(report) {
                    return Err(schema(&context, format!("unknown valuation `{report}`")));
                }
            }
            scenarios.push((name, reports));
        }
    }

    Ok(AuctionFile {
        good_labels,
        mechanism,
        valuations,
        family,
        true_valuations,
        scenarios,
    })
}

/// Renders a bundle for reports; the empty bundle prints as `-`.
pub fn display_bundle(good_labels: &[String], bundle: u32) -> String {
    if bundle == 0 {
        "-".to_string()
    } else {
        bundle_to_string(good_labels, bundle)
    }
}

// ---------------------------------------------------------------------------
// DIMACS CNF
// ---------------------------------------------------------------------------

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(schema(
                    &format!("line {}", line_no + 1),
                    "problem line must be `p cnf <variables> <clauses>`",
                ));
            }
            let variables = parts[1]
                .parse()
                .map_err(|_| schema(&format!("line {}", line_no + 1), "bad variable count"))?;
            let count = parts[2]
                .parse()
                .map_err(|_| schema(&format!("line {}", line_no + 1), "bad clause count"))?;
            declared = Some((variables, count));
            continue;
        }
        for token in line.split_whitespace() {
            let literal: i64 = token.parse().map_err(|_| {
                schema(
                    &format!("line {}", line_no + 1),
                    format!("bad literal `{token}`"),
                )
            })?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(literal);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let Some((variables, declared_clauses)) = declared else {
        return Err(FormatError::Schema(
            "missing `p cnf` problem line".to_string(),
        ));
    };
    if clauses.len() != declared_clauses {
        return Err(FormatError::Schema(format!(
            "problem line declares {declared_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(CnfFormula::new(variables, clauses)?)
}

// ---------------------------------------------------------------------------
// CLI argument syntaxes
// ---------------------------------------------------------------------------

/// `f,s` — one strategy label per player.
pub fn parse_profile(game: &Game, text: &str) -> Result<Profile, FormatError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != game.player_count() {
        return Err(schema(
            "profile",
            format!(
                "{} strategies for {} players",
                parts.len(),
                game.player_count()
            ),
        ));
    }
    let indices = parts
        .iter()
        .enumerate()
        .map(|(player, label)| {
            game.strategy_index(player, label).ok_or_else(|| {
                schema(
                    "profile",
                    format!("player {} has no strategy `{label}`", player + 1),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Profile::new(indices))
}

/// `f,s;s,f` — semicolon-separated profiles.
pub fn parse_target_set(game: &Game, text: &str) -> Result<Vec<Profile>, FormatError> {
    text.split(';')
        .map(|part| parse_profile(game, part))
        .collect()
}

/// `f|s;s` — per-player strategy lists, `|` within a player, `;` between
/// players.
pub fn parse_rectangle(game: &Game, text: &str) -> Result<Vec<Vec<usize>>, FormatError> {
    let sides: Vec<&str> = text.split(';').collect();
    if sides.len() != game.player_count() {
        return Err(schema(
            "rectangle",
            format!(
                "{} sides for {} players",
                sides.len(),
                game.player_count()
            ),
        ));
    }
    sides
        .iter()
        .enumerate()
        .map(|(player, side)| {
            side.split('|')
                .map(|label| {
                    game.strategy_index(player, label.trim()).ok_or_else(|| {
                        schema(
                            "rectangle",
                            format!("player {} has no strategy `{label}`", player + 1),
                        )
                    })
                })
                .collect()
        })
        .collect()
}

/// `0.8,0.2;0.8,0.2` — per-player probability lists.
pub fn parse_mixed(game: &Game, text: &str) -> Result<MixedProfile, FormatError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != game.player_count() {
        return Err(schema(
            "mixed profile",
            format!(
                "{} probability lists for {} players",
                parts.len(),
                game.player_count()
            ),
        ));
    }
    let weights = parts
        .iter()
        .map(|list| {
            list.split(',')
                .map(|token| parse_rational(token).map_err(|e| schema("mixed profile", e)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MixedProfile::new(weights)?)
}

/// `f,s=1/2;s,f=1/2` — profile=probability pairs.
pub fn parse_outcome_distribution(
    game: &Game,
    text: &str,
) -> Result<OutcomeDistribution, FormatError> {
    let mut pairs = Vec::new();
    for part in text.split(';') {
        let (profile_text, prob_text) = part
            .rsplit_once('=')
            .ok_or_else(|| schema("distribution", format!("`{part}` is not profile=prob")))?;
        let profile = parse_profile(game, profile_text)?;
        let prob = parse_rational(prob_text).map_err(|e| schema("distribution", e))?;
        pairs.push((profile, prob));
    }
    Ok(OutcomeDistribution::from_pairs(game, &pairs)?)
}

/// `s=U,t=D;s=L,t=R` — per-player signal=action maps.
pub fn parse_info_strategy(info: &InfoGame, text: &str) -> Result<InfoStrategy, FormatError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != info.player_count() {
        return Err(schema(
            "strategy",
            format!("{} maps for {} players", parts.len(), info.player_count()),
        ));
    }
    let mut maps = Vec::with_capacity(parts.len());
    for (player, part) in parts.iter().enumerate() {
        let signals = &info.signal_labels()[player];
        let actions = &info.action_labels()[player];
        let mut map: Vec<Option<usize>> = vec![None; signals.len()];
        for binding in part.split(',') {
            let (signal_label, action_label) = binding.split_once('=').ok_or_else(|| {
                schema("strategy", format!("`{binding}` is not signal=action"))
            })?;
            let signal = signals
                .iter()
                .position(|l| l == signal_label.trim())
                .ok_or_else(|| {
                    schema(
                        "strategy",
                        format!("player {} has no signal `{signal_label}`", player + 1),
                    )
                })?;
            let action = actions
                .iter()
                .position(|l| l == action_label.trim())
                .ok_or_else(|| {
                    schema(
                        "strategy",
                        format!("player {} has no action `{action_label}`", player + 1),
                    )
                })?;
            map[signal] = Some(action);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(s, a)| {
                a.ok_or_else(|| {
                    schema(
                        "strategy",
                        format!(
                            "player {} gives no action for signal `{}`",
                            player + 1,
                            signals[s]
                        ),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        maps.push(map);
    }
    Ok(InfoStrategy(maps))
}
