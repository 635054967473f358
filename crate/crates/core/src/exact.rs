//! Exact implementation of rectangular targets for two-player games.
//!
//! Plain implementation only requires the surviving set to land *inside* the
//! target; exact implementation requires it to *equal* the target. For
//! rectangular targets `O = O_1 x O_2` this is decided in polynomial time by
//! a perturbation scheme: a large penalty `M` promised on the rows of `O_1`
//! against columns outside `O_2` (and symmetrically for player 2), plus the
//! smallest uniform block value `e_i` on `O_1 x O_2`, searched per player
//! through the list of that player's payoff differences.

use thiserror::Error;

use crate::game::{Game, GameError, PaymentScheme, Profile};
use crate::pricing::{verify_implementation, ImplementationReport, PricingError};
use crate::rat::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("exact implementation supports exactly 2 players, game has {got}")]
    UnsupportedPlayerCount { got: usize },
    #[error("target has {got} sides for a {expected}-player game")]
    WrongSideCount { expected: usize, got: usize },
    #[error("target side for player {player} is empty")]
    EmptyTargetSide { player: usize },
    #[error("target side for player {player} must be a strict subset of the strategy set")]
    NotStrictSubset { player: usize },
    #[error("target names strategy {strategy} which player {player} does not have")]
    InvalidStrategy { player: usize, strategy: usize },
    #[error("target side for player {player} contains internal dominance: {dominating} dominates {dominated}")]
    InternalDominance {
        player: usize,
        dominating: usize,
        dominated: usize,
    },
    #[error("difference list exhausted for player {player} without reaching the target; this indicates a bug")]
    SearchExhausted { player: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

/// Per-player non-empty strict subsets of the strategy sets, with no
/// dominance between two members in the original full game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangularTarget {
    sides: Vec<Vec<usize>>,
}

impl RectangularTarget {
    pub fn new(game: &Game, sides: Vec<Vec<usize>>) -> Result<Self, ExactError> {
        if sides.len() != game.player_count() {
            return Err(ExactError::WrongSideCount {
                expected: game.player_count(),
                got: sides.len(),
            });
        }
        let mut cleaned = Vec::with_capacity(sides.len());
        for (player, side) in sides.into_iter().enumerate() {
            let mut side = side;
            side.sort_unstable();
            side.dedup();
            if side.is_empty() {
                return Err(ExactError::EmptyTargetSide { player });
            }
            if let Some(&bad) = side.iter().find(|&&s| s >= game.strategy_count(player)) {
                return Err(ExactError::InvalidStrategy {
                    player,
                    strategy: bad,
                });
            }
            if side.len() >= game.strategy_count(player) {
                return Err(ExactError::NotStrictSubset { player });
            }
            for &a in &side {
                for &b in &side {
                    if a != b && game.dominates(player, a, b) {
                        return Err(ExactError::InternalDominance {
                            player,
                            dominating: a,
                            dominated: b,
                        });
                    }
                }
            }
            cleaned.push(side);
        }
        Ok(RectangularTarget { sides: cleaned })
    }

    pub fn side(&self, player: usize) -> &[usize] {
        &self.sides[player]
    }

    pub fn contains(&self, player: usize, strategy: usize) -> bool {
        self.sides[player].contains(&strategy)
    }

    /// The full product `O_1 x O_2 x ...` in lexicographic order.
    pub fn profiles(&self) -> Vec<Profile> {
        use itertools::Itertools;
        self.sides
            .iter()
            .map(|s| s.iter().copied())
            .multi_cartesian_product()
            .map(Profile::new)
            .collect()
    }

    /// Whether some pair inside a side exhibits dominance once attention is
    /// restricted to the target rectangle. The construction does not need
    /// this to fail, but it is surfaced as a warning since the full-game and
    /// restricted-game readings of the no-internal-dominance requirement
    /// differ on such inputs.
    pub fn has_restricted_dominance(&self, game: &Game) -> bool {
        for (player, side) in self.sides.iter().enumerate() {
            let opponent_sides: Vec<&Vec<usize>> = self
                .sides
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != player)
                .map(|(_, s)| s)
                .collect();
            use itertools::Itertools;
            let blocks: Vec<Vec<usize>> = opponent_sides
                .iter()
                .map(|s| s.iter().copied())
                .multi_cartesian_product()
                .collect();
            for &a in side {
                for &b in side {
                    if a == b {
                        continue;
                    }
                    let mut weak = true;
                    let mut strict = false;
                    for others in &blocks {
                        let pa = game.payoff(&game.compose(player, a, others)).unwrap()[player]
                            .clone();
                        let pb = game.payoff(&game.compose(player, b, others)).unwrap()[player]
                            .clone();
                        if pa < pb {
                            weak = false;
                            break;
                        }
                        if pa > pb {
                            strict = true;
                        }
                    }
                    if weak && strict {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// All pairwise payoff differences of one player, filtered to non-negative
/// values, deduplicated and sorted ascending. Zero is always included, so a
/// zero-cost answer can be returned by the block-value search.
pub fn difference_list(game: &Game, player: usize) -> Vec<Rat> {
    let mut values = std::collections::BTreeSet::new();
    values.insert(rat(0));
    let own: Vec<Rat> = game
        .profiles()
        .iter()
        .map(|p| game.payoff(p).unwrap()[player].clone())
        .collect();
    for a in &own {
        for b in &own {
            if a >= b {
                values.insert(a - b);
            }
        }
    }
    values.into_iter().collect()
}

/// Result of the perturbation construction.
#[derive(Clone, Debug)]
pub struct ExactReport {
    pub report: ImplementationReport,
    /// The block value found for each player.
    pub e_values: Vec<Rat>,
    /// The off-target penalty used (payoff span plus one).
    pub penalty: Rat,
    pub notes: Vec<String>,
}

/// Penalty exceeding every payoff gap in the game. The span form stays
/// sufficient when payoffs are negative, where "largest payoff plus one"
/// would not be.
fn penalty_value(game: &Game) -> Rat {
    let (min, max) = game.payoff_range();
    max - min + rat(1)
}

/// The player's scheme under the perturbation layout: penalty on own target
/// rows against off-target opponent columns, `block` on the target
/// rectangle, zero elsewhere.
fn player_scheme(
    game: &Game,
    target: &RectangularTarget,
    player: usize,
    block: &Rat,
) -> PaymentScheme {
    let penalty = penalty_value(game);
    let mut scheme = PaymentScheme::zero(game);
    let other = 1 - player;
    for &own in target.side(player) {
        for col in 0..game.strategy_count(other) {
            let profile = game.compose(player, own, &[col]);
            let amount = if target.contains(other, col) {
                block.clone()
            } else {
                penalty.clone()
            };
            scheme
                .set(game, player, &profile, amount)
                .expect("non-negative penalty");
        }
    }
    scheme
}

/// Player `player`'s non-dominated strategies when its rows carry the
/// perturbation layout with block value `e`. Exposed so callers can replay
/// the block-value search and confirm the returned value is minimal.
pub fn survivors_at_block_value(
    game: &Game,
    target: &RectangularTarget,
    player: usize,
    e: &Rat,
) -> Result<Vec<usize>, ExactError> {
    require_two_players(game)?;
    let scheme = player_scheme(game, target, player, e);
    let perturbed = game.with_payments(&scheme)?;
    Ok(perturbed.non_dominated(player))
}

fn require_two_players(game: &Game) -> Result<(), ExactError> {
    if game.player_count() != 2 {
        return Err(ExactError::UnsupportedPlayerCount {
            got: game.player_count(),
        });
    }
    Ok(())
}

/// Runs the perturbation construction: for each player in turn, the smallest
/// entry of that player's difference list whose block scheme makes the
/// player's non-dominated set coincide with the target side. The combined
/// scheme survives exactly on the target rectangle at cost `e_1 + e_2`.
pub fn optimal_perturbation(
    game: &Game,
    target: &RectangularTarget,
) -> Result<ExactReport, ExactError> {
    require_two_players(game)?;
    let penalty = penalty_value(game);
    let mut e_values = Vec::with_capacity(2);
    let mut combined = PaymentScheme::zero(game);
    for player in 0..2 {
        let mut found = None;
        for e in difference_list(game, player) {
            let survivors = survivors_at_block_value(game, target, player, &e)?;
            if survivors == target.side(player) {
                found = Some(e);
                break;
            }
        }
        // The largest difference always reaches coincidence, so exhaustion
        // can only mean a bug in the search.
        let e = found.ok_or(ExactError::SearchExhausted { player })?;
        let scheme = player_scheme(game, target, player, &e);
        for (p, profile, amount) in scheme.positive_entries(game) {
            combined.set(game, p, &profile, amount)?;
        }
        e_values.push(e);
    }
    let report = verify_implementation(game, &combined, &target.profiles())?;
    debug_assert_eq!(report.surviving, target.profiles());
    debug_assert_eq!(
        report.worst_case_cost,
        e_values.iter().cloned().sum::<Rat>()
    );
    let mut notes = vec![format!(
        "off-target penalty = payoff span + 1 = {}",
        crate::rat::format_rational(&penalty)
    )];
    if target.has_restricted_dominance(game) {
        notes.push(
            "target contains dominance within the restricted rectangle; \
             the precondition was checked in the full game"
                .to_string(),
        );
    }
    Ok(ExactReport {
        report,
        e_values,
        penalty,
        notes,
    })
}

/// True iff the surviving product set of `U + V` equals the target rectangle
/// exactly (not merely a subset of it).
pub fn verify_exact(
    game: &Game,
    scheme: &PaymentScheme,
    target: &RectangularTarget,
) -> Result<bool, ExactError> {
    let perturbed = game.with_payments(scheme)?;
    Ok(perturbed.non_dominated_profiles() == target.profiles())
}
