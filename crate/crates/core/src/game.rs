//! Finite strategic-form games with exact rational payoffs.
//!
//! The [`Game`] type stores a total payoff tensor over the product of the
//! players' strategy sets. On top of it this module provides the dominance
//! structure (single-pass non-domination, not iterated elimination),
//! pure/mixed/correlated equilibrium checks, and non-negative payment
//! overlays: a [`PaymentScheme`] added to a game yields a new game with
//! payoffs `U + V`.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;
use thiserror::Error;

use crate::lp::feasible_point;
use crate::rat::{rat, Rat};

/// One strategy index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn new(indices: Vec<usize>) -> Self {
        Profile(indices)
    }

    pub fn player_count(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("player {player} has an empty strategy list")]
    EmptyStrategyList { player: usize },
    #[error("player {player} has a duplicate strategy label `{label}`")]
    DuplicateLabel { player: usize, label: String },
    #[error("payoff tensor must have {expected} entries, got {got}")]
    WrongPayoffCount { expected: usize, got: usize },
    #[error("payoff vector at profile index {index} has {got} entries, expected {expected}")]
    WrongPayoffVectorLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("profile {profile:?} is not valid for this game")]
    InvalidProfile { profile: Vec<usize> },
    #[error("payment scheme shape {scheme:?} does not match game shape {game:?}")]
    ShapeMismatch {
        scheme: Vec<usize>,
        game: Vec<usize>,
    },
    #[error("payments must be non-negative, got {amount} for player {player}")]
    NegativePayment { player: usize, amount: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("mixed profile invalid: {0}")]
    InvalidMixedProfile(String),
    #[error("operation supports exactly {expected} players, game has {got}")]
    UnsupportedPlayerCount { expected: usize, got: usize },
}

/// A finite strategic-form game: labelled strategies per player and a total
/// map from strategy profiles to exact rational payoff vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    strategies: Vec<Vec<String>>,
    /// Indexed by flattened profile (player 0 outermost); inner vector holds
    /// one payoff per player.
    payoffs: Vec<Vec<Rat>>,
}

impl Game {
    /// Builds a game from per-player strategy labels and a payoff tensor in
    /// row-major order (player 0's strategy is the outermost index).
    pub fn new(strategies: Vec<Vec<String>>, payoffs: Vec<Vec<Rat>>) -> Result<Self, GameError> {
        let n = strategies.len();
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        for (player, labels) in strategies.iter().enumerate() {
            if labels.is_empty() {
                return Err(GameError::EmptyStrategyList { player });
            }
            let mut seen = BTreeSet::new();
            for label in labels {
                if !seen.insert(label) {
                    return Err(GameError::DuplicateLabel {
                        player,
                        label: label.clone(),
                    });
                }
            }
        }
        let expected: usize = strategies.iter().map(|s| s.len()).product();
        if payoffs.len() != expected {
            return Err(GameError::WrongPayoffCount {
                expected,
                got: payoffs.len(),
            });
        }
        for (index, vector) in payoffs.iter().enumerate() {
            if vector.len() != n {
                return Err(GameError::WrongPayoffVectorLength {
                    index,
                    expected: n,
                    got: vector.len(),
                });
            }
        }
        Ok(Game {
            strategies,
            payoffs,
        })
    }

    /// Convenience constructor for two-player games from two payoff tables in
    /// row-major order (rows belong to player 0).
    pub fn bimatrix(
        row_labels: &[&str],
        col_labels: &[&str],
        row_payoffs: &[Vec<Rat>],
        col_payoffs: &[Vec<Rat>],
    ) -> Result<Self, GameError> {
        let strategies = vec![
            row_labels.iter().map(|s| s.to_string()).collect(),
            col_labels.iter().map(|s| s.to_string()).collect(),
        ];
        let mut payoffs = Vec::with_capacity(row_labels.len() * col_labels.len());
        for r in 0..row_labels.len() {
            for c in 0..col_labels.len() {
                let u1 = row_payoffs
                    .get(r)
                    .and_then(|row| row.get(c))
                    .cloned()
                    .ok_or(GameError::WrongPayoffCount {
                        expected: row_labels.len() * col_labels.len(),
                        got: row_payoffs.iter().map(|r| r.len()).sum(),
                    })?;
                let u2 = col_payoffs
                    .get(r)
                    .and_then(|row| row.get(c))
                    .cloned()
                    .ok_or(GameError::WrongPayoffCount {
                        expected: row_labels.len() * col_labels.len(),
                        got: col_payoffs.iter().map(|r| r.len()).sum(),
                    })?;
                payoffs.push(vec![u1, u2]);
            }
        }
        Game::new(strategies, payoffs)
    }

    pub fn player_count(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy_count(&self, player: usize) -> usize {
        self.strategies[player].len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.strategies.iter().map(|s| s.len()).collect()
    }

    pub fn strategy_labels(&self, player: usize) -> &[String] {
        &self.strategies[player]
    }

    pub fn strategy_index(&self, player: usize, label: &str) -> Option<usize> {
        self.strategies[player].iter().position(|l| l == label)
    }

    pub fn profile_count(&self) -> usize {
        self.payoffs.len()
    }

    /// Renders a profile as comma-separated strategy labels.
    pub fn format_profile(&self, profile: &Profile) -> String {
        profile
            .0
            .iter()
            .enumerate()
            .map(|(player, &s)| self.strategies[player][s].clone())
            .join(",")
    }

    pub fn is_valid_profile(&self, profile: &Profile) -> bool {
        profile.0.len() == self.player_count()
            && profile
                .0
                .iter()
                .enumerate()
                .all(|(player, &s)| s < self.strategy_count(player))
    }

    pub(crate) fn flat_index(&self, profile: &Profile) -> usize {
        let mut index = 0;
        for (player, &s) in profile.0.iter().enumerate() {
            index = index * self.strategy_count(player) + s;
        }
        index
    }

    /// All strategy profiles in lexicographic order.
    pub fn profiles(&self) -> Vec<Profile> {
        self.strategies
            .iter()
            .map(|s| 0..s.len())
            .multi_cartesian_product()
            .map(Profile::new)
            .collect()
    }

    /// All assignments of strategies to the players other than `player`,
    /// each of length `n - 1`, in lexicographic order.
    pub fn opponent_assignments(&self, player: usize) -> Vec<Vec<usize>> {
        let ranges: Vec<_> = self
            .strategies
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, s)| 0..s.len())
            .collect();
        if ranges.is_empty() {
            return vec![Vec::new()];
        }
        ranges.into_iter().multi_cartesian_product().collect()
    }

    /// Builds a full profile from one player's strategy and an assignment for
    /// everyone else (in player order, skipping `player`).
    pub fn compose(&self, player: usize, own: usize, others: &[usize]) -> Profile {
        let mut indices = Vec::with_capacity(self.player_count());
        let mut it = others.iter();
        for j in 0..self.player_count() {
            if j == player {
                indices.push(own);
            } else {
                indices.push(*it.next().expect("opponent assignment length"));
            }
        }
        Profile(indices)
    }

    /// The payoff vector `U(x)`, exactly as stored.
    pub fn payoff(&self, profile: &Profile) -> Result<&[Rat], GameError> {
        if !self.is_valid_profile(profile) {
            return Err(GameError::InvalidProfile {
                profile: profile.0.clone(),
            });
        }
        Ok(&self.payoffs[self.flat_index(profile)])
    }

    /// Player `player`'s payoff at `profile`. Panics on an invalid profile;
    /// the profile-taking entry points validate first.
    pub(crate) fn payoff_entry(&self, profile: &Profile, player: usize) -> &Rat {
        &self.payoffs[self.flat_index(profile)][player]
    }

    /// Weak dominance: `a` dominates `b` for `player` iff `a` is at least as
    /// good against every opponent assignment and strictly better against at
    /// least one. A strategy never dominates itself, and payoff-identical
    /// strategies never dominate each other.
    pub fn dominates(&self, player: usize, a: usize, b: usize) -> bool {
        assert!(a < self.strategy_count(player) && b < self.strategy_count(player));
        if a == b {
            return false;
        }
        let mut strict = false;
        for others in self.opponent_assignments(player) {
            let pa = self.payoff_entry(&self.compose(player, a, &others), player);
            let pb = self.payoff_entry(&self.compose(player, b, &others), player);
            if pa < pb {
                return false;
            }
            if pa > pb {
                strict = true;
            }
        }
        strict
    }

    /// Strategies of `player` not dominated by any other strategy of the same
    /// player. Single pass; no iterated elimination.
    pub fn non_dominated(&self, player: usize) -> Vec<usize> {
        (0..self.strategy_count(player))
            .filter(|&s| {
                !(0..self.strategy_count(player)).any(|t| t != s && self.dominates(player, t, s))
            })
            .collect()
    }

    /// The product of the per-player non-dominated sets, in lexicographic
    /// order. Never empty: weak dominance is a strict partial order on a
    /// finite set, so each factor is non-empty.
    pub fn non_dominated_profiles(&self) -> Vec<Profile> {
        (0..self.player_count())
            .map(|player| self.non_dominated(player))
            .multi_cartesian_product()
            .map(Profile::new)
            .collect()
    }

    /// The game with payoffs `U + V`. The original game is unchanged.
    pub fn with_payments(&self, scheme: &PaymentScheme) -> Result<Game, GameError> {
        if scheme.shape != self.shape() {
            return Err(GameError::ShapeMismatch {
                scheme: scheme.shape.clone(),
                game: self.shape(),
            });
        }
        let payoffs = self
            .payoffs
            .iter()
            .zip(scheme.amounts.iter())
            .map(|(u, v)| u.iter().zip(v.iter()).map(|(a, b)| a + b).collect())
            .collect();
        Game::new(self.strategies.clone(), payoffs)
    }

    /// True iff no player has a profitable unilateral pure deviation.
    pub fn is_pure_nash(&self, profile: &Profile) -> Result<bool, GameError> {
        if !self.is_valid_profile(profile) {
            return Err(GameError::InvalidProfile {
                profile: profile.0.clone(),
            });
        }
        for player in 0..self.player_count() {
            let here = self.payoff_entry(profile, player);
            for alt in 0..self.strategy_count(player) {
                let mut deviated = profile.clone();
                deviated.0[player] = alt;
                if self.payoff_entry(&deviated, player) > here {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exactly the profiles passing [`Game::is_pure_nash`].
    pub fn pure_nash_profiles(&self) -> Vec<Profile> {
        self.profiles()
            .into_iter()
            .filter(|p| self.is_pure_nash(p).expect("enumerated profile"))
            .collect()
    }

    /// Expected payoff vector under independent randomisation, exact:
    /// `sum_x prod_j p_j(x_j) * U(x)`.
    pub fn mixed_payoff(&self, mixed: &MixedProfile) -> Result<Vec<Rat>, GameError> {
        self.check_mixed(mixed)?;
        let mut totals = vec![rat(0); self.player_count()];
        for profile in self.profiles() {
            let mut weight = rat(1);
            for (player, &s) in profile.0.iter().enumerate() {
                weight *= &mixed.weights[player][s];
            }
            if weight.is_zero() {
                continue;
            }
            for (player, total) in totals.iter_mut().enumerate() {
                *total += &weight * self.payoff_entry(&profile, player);
            }
        }
        Ok(totals)
    }

    /// Expected payoff to `player` when it plays pure strategy `own` and the
    /// others randomise according to `mixed`.
    fn pure_against_mixed(&self, player: usize, own: usize, mixed: &MixedProfile) -> Rat {
        let mut total = rat(0);
        for others in self.opponent_assignments(player) {
            let mut weight = rat(1);
            let mut it = others.iter();
            for j in 0..self.player_count() {
                if j == player {
                    continue;
                }
                weight *= &mixed.weights[j][*it.next().unwrap()];
            }
            if weight.is_zero() {
                continue;
            }
            total += weight * self.payoff_entry(&self.compose(player, own, &others), player);
        }
        total
    }

    /// True iff for every player every pure strategy earns at most the
    /// player's expected payoff under `mixed` (exact comparison).
    pub fn is_mixed_nash(&self, mixed: &MixedProfile) -> Result<bool, GameError> {
        self.check_mixed(mixed)?;
        for player in 0..self.player_count() {
            let pure_values: Vec<Rat> = (0..self.strategy_count(player))
                .map(|s| self.pure_against_mixed(player, s, mixed))
                .collect();
            let value: Rat = pure_values
                .iter()
                .zip(mixed.weights[player].iter())
                .map(|(v, w)| v * w)
                .sum();
            if pure_values.iter().any(|v| *v > value) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_mixed(&self, mixed: &MixedProfile) -> Result<(), GameError> {
        if mixed.weights.len() != self.player_count()
            || mixed
                .weights
                .iter()
                .zip(self.shape())
                .any(|(w, n)| w.len() != n)
        {
            return Err(GameError::InvalidMixedProfile(
                "mixed profile shape does not match game".to_string(),
            ));
        }
        Ok(())
    }

    /// Obedience check for a correlated outcome distribution: for every
    /// player, every recommendation with positive marginal, and every
    /// deviation, the unnormalised obedience sum is non-negative.
    pub fn is_correlated_equilibrium(
        &self,
        dist: &OutcomeDistribution,
    ) -> Result<bool, GameError> {
        if dist.shape != self.shape() {
            return Err(GameError::InvalidDistribution(
                "distribution shape does not match game".to_string(),
            ));
        }
        for player in 0..self.player_count() {
            for rec in 0..self.strategy_count(player) {
                let assignments = self.opponent_assignments(player);
                let marginal: Rat = assignments
                    .iter()
                    .map(|o| dist.prob_at(self, &self.compose(player, rec, o)))
                    .sum();
                if marginal.is_zero() {
                    continue;
                }
                for alt in 0..self.strategy_count(player) {
                    if alt == rec {
                        continue;
                    }
                    let mut gain = rat(0);
                    for others in &assignments {
                        let weight = dist.prob_at(self, &self.compose(player, rec, others));
                        if weight.is_zero() {
                            continue;
                        }
                        let obey = self.payoff_entry(&self.compose(player, rec, others), player);
                        let stray = self.payoff_entry(&self.compose(player, alt, others), player);
                        gain += weight * (obey - stray);
                    }
                    if gain < rat(0) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Smallest and largest payoff anywhere in the tensor.
    pub fn payoff_range(&self) -> (Rat, Rat) {
        let mut min = self.payoffs[0][0].clone();
        let mut max = min.clone();
        for vector in &self.payoffs {
            for v in vector {
                if *v < min {
                    min = v.clone();
                }
                if *v > max {
                    max = v.clone();
                }
            }
        }
        (min, max)
    }

    /// Largest absolute payoff.
    pub fn max_abs_payoff(&self) -> Rat {
        let (min, max) = self.payoff_range();
        let neg = -min;
        if neg > max {
            neg
        } else {
            max
        }
    }

    /// A mixed-strategy equilibrium of a two-player game, found by support
    /// enumeration in lexicographic size order. For each support pair the
    /// indifference-plus-best-response system is solved exactly; the first
    /// support pair admitting a solution wins, so the result is deterministic.
    pub fn mixed_nash_2p(&self) -> Result<MixedProfile, GameError> {
        if self.player_count() != 2 {
            return Err(GameError::UnsupportedPlayerCount {
                expected: 2,
                got: self.player_count(),
            });
        }
        let rows = self.strategy_count(0);
        let cols = self.strategy_count(1);
        let u = |p: usize, r: usize, c: usize| self.payoff_entry(&Profile(vec![r, c]), p).clone();

        let supports = |count: usize| -> Vec<Vec<usize>> {
            (1..=count)
                .flat_map(|size| (0..count).combinations(size))
                .collect()
        };
        for s1 in supports(rows) {
            for s2 in supports(cols) {
                // Player 2's mixture must equalise player 1's supported rows
                // and keep the rest weakly below; symmetrically for player 1.
                let q = support_solution(&s1, rows, &s2, cols, |i, j| u(0, i, j));
                let Some(q) = q else { continue };
                let p = support_solution(&s2, cols, &s1, rows, |j, i| u(1, i, j));
                let Some(p) = p else { continue };
                let candidate = MixedProfile::new(vec![p, q])?;
                if self.is_mixed_nash(&candidate)? {
                    return Ok(candidate);
                }
            }
        }
        // Unreachable for well-formed games: the support pair of any actual
        // equilibrium passes its own feasibility system.
        Err(GameError::InvalidMixedProfile(
            "support enumeration found no equilibrium".to_string(),
        ))
    }
}

/// For the support pair (`own_support`, `other_support`), finds a mixture for
/// the *other* player that makes every supported own strategy a best response
/// and every unsupported one weakly worse. Returns a full probability vector
/// over `other_count` strategies, or `None` if the system is infeasible.
fn support_solution(
    own_support: &[usize],
    own_count: usize,
    other_support: &[usize],
    other_count: usize,
    payoff: impl Fn(usize, usize) -> Rat,
) -> Option<Vec<Rat>> {
    // Variables: q_j for j in other_support, v+, v-, then one slack per own
    // strategy outside own_support. Equations:
    //   sum_j q_j = 1
    //   i in own_support:      sum_j payoff(i, j) q_j - v+ + v-         = 0
    //   i not in own_support:  sum_j payoff(i, j) q_j - v+ + v- + s_i  = 0
    let k = other_support.len();
    let off_support: Vec<usize> = (0..own_count)
        .filter(|i| !own_support.contains(i))
        .collect();
    let vars = k + 2 + off_support.len();
    let mut rows_out: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();

    let mut norm = vec![rat(0); vars];
    for v in norm.iter_mut().take(k) {
        *v = rat(1);
    }
    rows_out.push(norm);
    rhs.push(rat(1));

    for &i in own_support {
        let mut row = vec![rat(0); vars];
        for (slot, &j) in other_support.iter().enumerate() {
            row[slot] = payoff(i, j);
        }
        row[k] = rat(-1);
        row[k + 1] = rat(1);
        rows_out.push(row);
        rhs.push(rat(0));
    }
    for (idx, &i) in off_support.iter().enumerate() {
        let mut row = vec![rat(0); vars];
        for (slot, &j) in other_support.iter().enumerate() {
            row[slot] = payoff(i, j);
        }
        row[k] = rat(-1);
        row[k + 1] = rat(1);
        row[k + 2 + idx] = rat(1);
        rows_out.push(row);
        rhs.push(rat(0));
    }

    let x = feasible_point(&rows_out, &rhs)?;
    let mut full = vec![rat(0); other_count];
    for (slot, &j) in other_support.iter().enumerate() {
        full[j] = x[slot].clone();
    }
    Some(full)
}

/// Per-player probability vector over that player's strategies; non-negative
/// entries summing to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedProfile {
    weights: Vec<Vec<Rat>>,
}

impl MixedProfile {
    pub fn new(weights: Vec<Vec<Rat>>) -> Result<Self, GameError> {
        for (player, w) in weights.iter().enumerate() {
            if w.is_empty() {
                return Err(GameError::InvalidMixedProfile(format!(
                    "player {player} has an empty probability vector"
                )));
            }
            if w.iter().any(|v| *v < rat(0)) {
                return Err(GameError::InvalidMixedProfile(format!(
                    "player {player} has a negative probability"
                )));
            }
            if w.iter().cloned().sum::<Rat>() != rat(1) {
                return Err(GameError::InvalidMixedProfile(format!(
                    "player {player}'s probabilities do not sum to 1"
                )));
            }
        }
        Ok(MixedProfile { weights })
    }

    /// The degenerate mixture putting probability one on `profile`.
    pub fn point_mass(game: &Game, profile: &Profile) -> Result<Self, GameError> {
        if !game.is_valid_profile(profile) {
            return Err(GameError::InvalidProfile {
                profile: profile.0.clone(),
            });
        }
        let weights = profile
            .0
            .iter()
            .enumerate()
            .map(|(player, &s)| {
                (0..game.strategy_count(player))
                    .map(|t| if t == s { rat(1) } else { rat(0) })
                    .collect()
            })
            .collect();
        Ok(MixedProfile { weights })
    }

    pub fn weights(&self) -> &[Vec<Rat>] {
        &self.weights
    }

    pub fn weight(&self, player: usize, strategy: usize) -> &Rat {
        &self.weights[player][strategy]
    }

    pub fn support(&self, player: usize) -> Vec<usize> {
        self.weights[player]
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(s, _)| s)
            .collect()
    }
}

/// Non-negative per-player payment tensor `V` with the same shape as a game's
/// payoff tensor. Construction enforces `V >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaymentScheme {
    shape: Vec<usize>,
    /// Indexed like the game tensor: outer by flat profile, inner per player.
    amounts: Vec<Vec<Rat>>,
}

impl PaymentScheme {
    pub fn zero(game: &Game) -> Self {
        PaymentScheme {
            shape: game.shape(),
            amounts: vec![vec![rat(0); game.player_count()]; game.profile_count()],
        }
    }

    /// Sets one promise; rejects negative amounts.
    pub fn set(
        &mut self,
        game: &Game,
        player: usize,
        profile: &Profile,
        amount: Rat,
    ) -> Result<(), GameError> {
        if amount < rat(0) {
            return Err(GameError::NegativePayment {
                player,
                amount: crate::rat::format_rational(&amount),
            });
        }
        if !game.is_valid_profile(profile) || game.shape() != self.shape {
            return Err(GameError::InvalidProfile {
                profile: profile.0.clone(),
            });
        }
        self.amounts[game.flat_index(profile)][player] = amount;
        Ok(())
    }

    pub fn from_entries(
        game: &Game,
        entries: &[(usize, Profile, Rat)],
    ) -> Result<Self, GameError> {
        let mut scheme = PaymentScheme::zero(game);
        for (player, profile, amount) in entries {
            scheme.set(game, *player, profile, amount.clone())?;
        }
        Ok(scheme)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn amount(&self, game: &Game, player: usize, profile: &Profile) -> &Rat {
        &self.amounts[game.flat_index(profile)][player]
    }

    /// Total promised across players at one profile.
    pub fn total_at(&self, game: &Game, profile: &Profile) -> Rat {
        self.amounts[game.flat_index(profile)].iter().cloned().sum()
    }

    /// All strictly positive entries as `(player, profile, amount)`, in
    /// profile-major order.
    pub fn positive_entries(&self, game: &Game) -> Vec<(usize, Profile, Rat)> {
        let mut out = Vec::new();
        for profile in game.profiles() {
            let flat = game.flat_index(&profile);
            for (player, amount) in self.amounts[flat].iter().enumerate() {
                if !amount.is_zero() {
                    out.push((player, profile.clone(), amount.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.amounts
            .iter()
            .all(|row| row.iter().all(|v| v.is_zero()))
    }
}

/// Probability distribution over full strategy profiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution {
    shape: Vec<usize>,
    probs: Vec<Rat>,
}

impl OutcomeDistribution {
    pub fn from_pairs(game: &Game, pairs: &[(Profile, Rat)]) -> Result<Self, GameError> {
        let mut probs = vec![rat(0); game.profile_count()];
        for (profile, p) in pairs {
            if !game.is_valid_profile(profile) {
                return Err(GameError::InvalidProfile {
                    profile: profile.0.clone(),
                });
            }
            if *p < rat(0) {
                return Err(GameError::InvalidDistribution(
                    "negative probability".to_string(),
                ));
            }
            probs[game.flat_index(profile)] += p;
        }
        let total: Rat = probs.iter().cloned().sum();
        if total != rat(1) {
            return Err(GameError::InvalidDistribution(format!(
                "probabilities sum to {}, expected 1",
                crate::rat::format_rational(&total)
            )));
        }
        Ok(OutcomeDistribution {
            shape: game.shape(),
            probs,
        })
    }

    pub fn point_mass(game: &Game, profile: &Profile) -> Result<Self, GameError> {
        Self::from_pairs(game, &[(profile.clone(), rat(1))])
    }

    pub fn uniform(game: &Game, profiles: &[Profile]) -> Result<Self, GameError> {
        if profiles.is_empty() {
            return Err(GameError::InvalidDistribution(
                "uniform distribution over an empty set".to_string(),
            ));
        }
        let p = Rat::new(1.into(), (profiles.len() as i64).into());
        let pairs: Vec<_> = profiles.iter().map(|x| (x.clone(), p.clone())).collect();
        Self::from_pairs(game, &pairs)
    }

    /// The product distribution induced by an independent mixed profile.
    pub fn product_of(game: &Game, mixed: &MixedProfile) -> Result<Self, GameError> {
        let mut pairs = Vec::new();
        for profile in game.profiles() {
            let mut w = rat(1);
            for (player, &s) in profile.0.iter().enumerate() {
                w *= mixed.weight(player, s);
            }
            if !w.is_zero() {
                pairs.push((profile, w));
            }
        }
        Self::from_pairs(game, &pairs)
    }

    pub fn prob_at(&self, game: &Game, profile: &Profile) -> Rat {
        self.probs[game.flat_index(profile)].clone()
    }

    /// Profiles with positive probability, lexicographic order.
    pub fn support(&self, game: &Game) -> Vec<(Profile, Rat)> {
        game.profiles()
            .into_iter()
            .filter_map(|p| {
                let w = self.prob_at(game, &p);
                if w.is_zero() {
                    None
                } else {
                    Some((p, w))
                }
            })
            .collect()
    }
}
