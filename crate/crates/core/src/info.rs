//! Prior-free incomplete-information games over shared action sets.
//!
//! Every player privately observes a signal; the realised signal profile
//! selects a state game over action sets that do not vary with the signal.
//! An outside party that sees actions but not signals can only promise
//! payments as a function of the action profile, the same function in every
//! state. Whether such signal-blind payments can make a target strategy's
//! actions dominant at every signal reduces, per player and per fixed
//! opponents' action profile, to a system of difference constraints; it is
//! feasible exactly when the constraint graph has no positive-weight cycle,
//! and an infeasibility certificate is the cycle itself.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::game::{Game, GameError, PaymentScheme, Profile};
use crate::rat::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InfoError {
    #[error("invalid informational-form game: {0}")]
    InvalidGame(String),
    #[error("strategy profile is not total or names invalid actions")]
    InvalidStrategy,
    #[error("epsilon slack must be non-negative")]
    NegativeEpsilon,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Per-player finite signal sets and shared per-player action sets, with a
/// total payoff map over (signal profile, action profile) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoGame {
    signal_labels: Vec<Vec<String>>,
    action_labels: Vec<Vec<String>>,
    /// payoffs[signal_flat][action_flat] -> one payoff per player.
    payoffs: Vec<Vec<Vec<Rat>>>,
}

fn flat_index(shape: &[usize], indices: &[usize]) -> usize {
    let mut index = 0;
    for (n, &i) in shape.iter().zip(indices.iter()) {
        index = index * n + i;
    }
    index
}

fn all_assignments(shape: &[usize]) -> Vec<Vec<usize>> {
    if shape.is_empty() {
        return vec![Vec::new()];
    }
    shape
        .iter()
        .map(|&n| 0..n)
        .multi_cartesian_product()
        .collect()
}

impl InfoGame {
    pub fn new(
        signal_labels: Vec<Vec<String>>,
        action_labels: Vec<Vec<String>>,
        payoffs: Vec<Vec<Vec<Rat>>>,
    ) -> Result<Self, InfoError> {
        let n = signal_labels.len();
        if n == 0 || action_labels.len() != n {
            return Err(InfoError::InvalidGame(
                "signal and action sets must cover the same non-empty player list".to_string(),
            ));
        }
        for (labels, kind) in [(&signal_labels, "signal"), (&action_labels, "action")] {
            for (player, list) in labels.iter().enumerate() {
                if list.is_empty() {
                    return Err(InfoError::InvalidGame(format!(
                        "player {player} has an empty {kind} set"
                    )));
                }
                let unique: BTreeSet<&String> = list.iter().collect();
                if unique.len() != list.len() {
                    return Err(InfoError::InvalidGame(format!(
                        "player {player} has duplicate {kind} labels"
                    )));
                }
            }
        }
        let signal_cells: usize = signal_labels.iter().map(|s| s.len()).product();
        let action_cells: usize = action_labels.iter().map(|s| s.len()).product();
        if payoffs.len() != signal_cells {
            return Err(InfoError::InvalidGame(format!(
                "expected {signal_cells} signal-profile blocks, got {}",
                payoffs.len()
            )));
        }
        for (s, block) in payoffs.iter().enumerate() {
            if block.len() != action_cells {
                return Err(InfoError::InvalidGame(format!(
                    "signal block {s} has {} action entries, expected {action_cells}",
                    block.len()
                )));
            }
            for (x, vector) in block.iter().enumerate() {
                if vector.len() != n {
                    return Err(InfoError::InvalidGame(format!(
                        "payoff vector at block {s}, action {x} has {} entries, expected {n}",
                        vector.len()
                    )));
                }
            }
        }
        Ok(InfoGame {
            signal_labels,
            action_labels,
            payoffs,
        })
    }

    /// Embeds a strategic-form game as the trivial informational form with a
    /// single signal per player.
    pub fn wrap_game(game: &Game) -> InfoGame {
        let signal_labels = (0..game.player_count()).map(|_| vec!["s".to_string()]).collect();
        let action_labels = (0..game.player_count())
            .map(|p| game.strategy_labels(p).to_vec())
            .collect();
        let block: Vec<Vec<Rat>> = game
            .profiles()
            .iter()
            .map(|p| game.payoff(p).unwrap().to_vec())
            .collect();
        InfoGame {
            signal_labels,
            action_labels,
            payoffs: vec![block],
        }
    }

    pub fn player_count(&self) -> usize {
        self.signal_labels.len()
    }

    pub fn signal_labels(&self) -> &[Vec<String>] {
        &self.signal_labels
    }

    pub fn action_labels(&self) -> &[Vec<String>] {
        &self.action_labels
    }

    pub fn signal_shape(&self) -> Vec<usize> {
        self.signal_labels.iter().map(|s| s.len()).collect()
    }

    pub fn action_shape(&self) -> Vec<usize> {
        self.action_labels.iter().map(|s| s.len()).collect()
    }

    pub fn payoff(&self, signal_profile: &[usize], action_profile: &[usize], player: usize) -> &Rat {
        let s = flat_index(&self.signal_shape(), signal_profile);
        let x = flat_index(&self.action_shape(), action_profile);
        &self.payoffs[s][x][player]
    }

    /// The strategic game played at one realised signal profile.
    pub fn state_game(&self, signal_profile: &[usize]) -> Game {
        let s = flat_index(&self.signal_shape(), signal_profile);
        Game::new(self.action_labels.clone(), self.payoffs[s].clone())
            .expect("state block is a total tensor")
    }

    pub fn signal_profiles(&self) -> Vec<Vec<usize>> {
        all_assignments(&self.signal_shape())
    }

    fn check_strategy(&self, strategy: &InfoStrategy) -> Result<(), InfoError> {
        let ok = strategy.0.len() == self.player_count()
            && strategy.0.iter().enumerate().all(|(p, map)| {
                map.len() == self.signal_labels[p].len()
                    && map.iter().all(|&a| a < self.action_labels[p].len())
            });
        if ok {
            Ok(())
        } else {
            Err(InfoError::InvalidStrategy)
        }
    }
}

/// Per player, a total map from signals to actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfoStrategy(pub Vec<Vec<usize>>);

/// True iff at every signal profile the induced action profile is a pure
/// equilibrium of that state game.
pub fn is_expost_equilibrium(game: &InfoGame, strategy: &InfoStrategy) -> Result<bool, InfoError> {
    game.check_strategy(strategy)?;
    for signal_profile in game.signal_profiles() {
        let actions: Vec<usize> = signal_profile
            .iter()
            .enumerate()
            .map(|(p, &s)| strategy.0[p][s])
            .collect();
        let state = game.state_game(&signal_profile);
        if !state.is_pure_nash(&Profile::new(actions))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weak dominance between two signal-to-action maps of one player: at least
/// as good at every (own signal, others' signals, others' actions) tuple and
/// strictly better at one.
pub fn info_dominates(game: &InfoGame, player: usize, a: &[usize], b: &[usize]) -> bool {
    let signal_shape = game.signal_shape();
    let action_shape = game.action_shape();
    assert_eq!(a.len(), signal_shape[player]);
    assert_eq!(b.len(), signal_shape[player]);
    let mut strict = false;
    for own_signal in 0..signal_shape[player] {
        let other_signal_shape: Vec<usize> = signal_shape
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, &c)| c)
            .collect();
        let other_action_shape: Vec<usize> = action_shape
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, &c)| c)
            .collect();
        for other_signals in all_assignments(&other_signal_shape) {
            let signal_profile = insert_at(player, own_signal, &other_signals);
            for other_actions in all_assignments(&other_action_shape) {
                let with_a = insert_at(player, a[own_signal], &other_actions);
                let with_b = insert_at(player, b[own_signal], &other_actions);
                let pa = game.payoff(&signal_profile, &with_a, player);
                let pb = game.payoff(&signal_profile, &with_b, player);
                if pa < pb {
                    return false;
                }
                if pa > pb {
                    strict = true;
                }
            }
        }
    }
    strict
}

fn insert_at(position: usize, own: usize, others: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(others.len() + 1);
    let mut it = others.iter();
    for j in 0..=others.len() {
        if j == position {
            out.push(own);
        } else {
            out.push(*it.next().expect("assignment length"));
        }
    }
    out
}

/// Signal-blind payments: one non-negative amount per (player, action
/// profile), applied identically in every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformPayments {
    action_shape: Vec<usize>,
    /// amounts[player][action_flat]
    amounts: Vec<Vec<Rat>>,
}

impl UniformPayments {
    pub fn amount(&self, player: usize, action_profile: &[usize]) -> &Rat {
        &self.amounts[player][flat_index(&self.action_shape, action_profile)]
    }

    /// Positive entries as `(player, action profile, amount)`.
    pub fn positive_entries(&self) -> Vec<(usize, Vec<usize>, Rat)> {
        use num_traits::Zero;
        let mut out = Vec::new();
        for action_profile in all_assignments(&self.action_shape) {
            let flat = flat_index(&self.action_shape, &action_profile);
            for (player, row) in self.amounts.iter().enumerate() {
                if !row[flat].is_zero() {
                    out.push((player, action_profile.clone(), row[flat].clone()));
                }
            }
        }
        out
    }

    /// Reads the payments as a scheme over a strategic game with matching
    /// shape (the single-signal embedding).
    pub fn to_payment_scheme(&self, game: &Game) -> Result<PaymentScheme, GameError> {
        let mut scheme = PaymentScheme::zero(game);
        for (player, action_profile, amount) in self.positive_entries() {
            scheme.set(game, player, &Profile::new(action_profile), amount)?;
        }
        Ok(scheme)
    }
}

/// One difference constraint in an infeasibility cycle: the payments must
/// satisfy `V(recommended, block) - V(alternative, block) >= bound`, where
/// the bound was attained at `signal_profile` with the recorded payoffs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateEdge {
    pub recommended: usize,
    pub alternative: usize,
    pub signal_profile: Vec<usize>,
    pub recommended_payoff: Rat,
    pub alternative_payoff: Rat,
    pub bound: Rat,
}

/// A positive-total cycle of difference constraints for one player against
/// one fixed opponents' action profile; no payment function can satisfy all
/// of its edges simultaneously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub player: usize,
    pub opponent_actions: Vec<usize>,
    pub cycle: Vec<CertificateEdge>,
    pub total: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    Feasible(UniformPayments),
    Infeasible(InfeasibilityCertificate),
}

struct Constraint {
    from: usize,
    to: usize,
    bound: Rat,
    state: Vec<usize>,
    rec_payoff: Rat,
    alt_payoff: Rat,
}

/// Decides whether non-negative signal-blind payments exist that make each
/// player's target action weakly dominant at every signal, with an
/// `epsilon` slack on one designated constraint per (player, signal) to
/// supply the strict instance dominance asks for. Returns a witness when
/// feasible and a positive-cycle certificate when not.
pub fn uniform_implementation_feasible(
    game: &InfoGame,
    target: &InfoStrategy,
    epsilon: &Rat,
) -> Result<FeasibilityOutcome, InfoError> {
    game.check_strategy(target)?;
    if *epsilon < rat(0) {
        return Err(InfoError::NegativeEpsilon);
    }
    let n = game.player_count();
    let signal_shape = game.signal_shape();
    let action_shape = game.action_shape();
    let mut witness: Vec<Vec<Rat>> = (0..n)
        .map(|_| vec![rat(0); action_shape.iter().product()])
        .collect();

    for player in 0..n {
        let other_action_shape: Vec<usize> = action_shape
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, &c)| c)
            .collect();
        let other_signal_shape: Vec<usize> = signal_shape
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, &c)| c)
            .collect();
        let blocks = all_assignments(&other_action_shape);

        // Opponent action combinations that some signal realisation
        // recommends; blocks outside this set can carry the strictness pad
        // without ever being played on target.
        let on_path: BTreeSet<Vec<usize>> = all_assignments(&other_signal_shape)
            .iter()
            .map(|others| {
                others
                    .iter()
                    .enumerate()
                    .map(|(slot, &s)| {
                        let j = if slot < player { slot } else { slot + 1 };
                        target.0[j][s]
                    })
                    .collect()
            })
            .collect();

        // One designated (alternative, block) per signal receives the pad.
        let designated: Vec<(usize, Vec<usize>)> = (0..signal_shape[player])
            .map(|signal| {
                let recommended = target.0[player][signal];
                let alternative = (0..action_shape[player])
                    .find(|&a| a != recommended)
                    .unwrap_or(recommended);
                let block = blocks
                    .iter()
                    .find(|b| !on_path.contains(*b))
                    .unwrap_or(&blocks[0])
                    .clone();
                (alternative, block)
            })
            .collect();

        for block in &blocks {
            let mut constraints: Vec<Constraint> = Vec::new();
            for (signal, designation) in designated.iter().enumerate() {
                let recommended = target.0[player][signal];
                for alternative in 0..action_shape[player] {
                    if alternative == recommended {
                        continue;
                    }
                    let mut best: Option<(Rat, Vec<usize>, Rat, Rat)> = None;
                    for other_signals in all_assignments(&other_signal_shape) {
                        let state = insert_at(player, signal, &other_signals);
                        let rec_actions = insert_at(player, recommended, block);
                        let alt_actions = insert_at(player, alternative, block);
                        let rec_payoff = game.payoff(&state, &rec_actions, player).clone();
                        let alt_payoff = game.payoff(&state, &alt_actions, player).clone();
                        let gap = &alt_payoff - &rec_payoff;
                        if best.as_ref().is_none_or(|(g, _, _, _)| gap > *g) {
                            best = Some((gap, state, rec_payoff, alt_payoff));
                        }
                    }
                    let (mut bound, state, rec_payoff, alt_payoff) =
                        best.expect("at least one opponent signal assignment");
                    if *designation == (alternative, block.clone()) {
                        bound += epsilon;
                    }
                    constraints.push(Constraint {
                        from: recommended,
                        to: alternative,
                        bound,
                        state,
                        rec_payoff,
                        alt_payoff,
                    });
                }
            }
            match solve_difference_constraints(action_shape[player], &constraints) {
                Ok(levels) => {
                    let low = levels.iter().min().cloned().unwrap_or_else(|| rat(0));
                    for (action, level) in levels.iter().enumerate() {
                        let full = insert_at(player, action, block);
                        witness[player][flat_index(&action_shape, &full)] = level - &low;
                    }
                }
                Err(cycle) => {
                    let total: Rat = cycle.iter().map(|c| c.bound.clone()).sum();
                    let edges = cycle
                        .into_iter()
                        .map(|c| CertificateEdge {
                            recommended: c.from,
                            alternative: c.to,
                            signal_profile: c.state,
                            recommended_payoff: c.rec_payoff,
                            alternative_payoff: c.alt_payoff,
                            bound: c.bound,
                        })
                        .collect();
                    return Ok(FeasibilityOutcome::Infeasible(InfeasibilityCertificate {
                        player,
                        opponent_actions: block.clone(),
                        cycle: edges,
                        total,
                    }));
                }
            }
        }
    }
    Ok(FeasibilityOutcome::Feasible(UniformPayments {
        action_shape,
        amounts: witness,
    }))
}

/// Shortest-path relaxation over the constraint graph. A constraint
/// `V(from) - V(to) >= bound` becomes an edge `from -> to` of weight
/// `-bound`; the system is feasible iff there is no negative-weight cycle
/// (equivalently no positive bound cycle), and the node potentials are a
/// solution. On infeasibility the offending cycle's constraints come back.
fn solve_difference_constraints(
    nodes: usize,
    constraints: &[Constraint],
) -> Result<Vec<Rat>, Vec<Constraint>> {
    let mut dist = vec![rat(0); nodes];
    let mut pred: Vec<Option<usize>> = vec![None; nodes];
    let mut touched = None;
    for pass in 0..=nodes {
        touched = None;
        for (index, c) in constraints.iter().enumerate() {
            let candidate = &dist[c.from] - &c.bound;
            if candidate < dist[c.to] {
                dist[c.to] = candidate;
                pred[c.to] = Some(index);
                touched = Some(c.to);
            }
        }
        if touched.is_none() {
            return Ok(dist);
        }
        if pass == nodes {
            break;
        }
    }
    // A relaxation on the final pass means a negative cycle; walk the
    // predecessor chain inside it and collect its constraints.
    let mut node = touched.expect("final pass relaxed some node");
    for _ in 0..nodes {
        node = constraints[pred[node].expect("relaxed node has predecessor")].from;
    }
    let start = node;
    let mut cycle = Vec::new();
    let mut cursor = start;
    loop {
        let edge_index = pred[cursor].expect("cycle node has predecessor");
        let c = &constraints[edge_index];
        cycle.push(Constraint {
            from: c.from,
            to: c.to,
            bound: c.bound.clone(),
            state: c.state.clone(),
            rec_payoff: c.rec_payoff.clone(),
            alt_payoff: c.alt_payoff.clone(),
        });
        cursor = c.from;
        if cursor == start {
            break;
        }
    }
    cycle.reverse();
    Err(cycle)
}

/// Re-check for a feasibility witness: adding the payments state by state
/// must make every target action weakly dominant in every state game.
pub fn witness_makes_targets_dominant(
    game: &InfoGame,
    target: &InfoStrategy,
    payments: &UniformPayments,
) -> Result<bool, InfoError> {
    game.check_strategy(target)?;
    let action_shape = game.action_shape();
    for player in 0..game.player_count() {
        let other_action_shape: Vec<usize> = action_shape
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .map(|(_, &c)| c)
            .collect();
        for signal in 0..game.signal_shape()[player] {
            let recommended = target.0[player][signal];
            let other_signal_shape: Vec<usize> = game
                .signal_shape()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != player)
                .map(|(_, &c)| c)
                .collect();
            for alternative in 0..action_shape[player] {
                if alternative == recommended {
                    continue;
                }
                for other_signals in all_assignments(&other_signal_shape) {
                    let state = insert_at(player, signal, &other_signals);
                    for block in all_assignments(&other_action_shape) {
                        let rec_actions = insert_at(player, recommended, &block);
                        let alt_actions = insert_at(player, alternative, &block);
                        let rec_total = game.payoff(&state, &rec_actions, player).clone()
                            + payments.amount(player, &rec_actions);
                        let alt_total = game.payoff(&state, &alt_actions, player).clone()
                            + payments.amount(player, &alt_actions);
                        if rec_total < alt_total {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{build_singleton_implementation, verify_implementation};
    use crate::testutil::congestion_game;

    /// Two signals and two actions per player; player 1's (U at s, D at t)
    /// dominates every other map. States are rows-by-signal blocks of a
    /// four-state table.
    fn domination_example() -> InfoGame {
        let v = |x: i64| rat(x);
        let pair = |a: i64, b: i64| vec![v(a), v(b)];
        // State blocks in signal order (s,s), (s,t), (t,s), (t,t); each block
        // is action-major: (U,L), (U,R), (D,L), (D,R).
        let payoffs = vec![
            vec![pair(1, 1), pair(5, 2), pair(0, 5), pair(4, 4)],
            vec![pair(5, 0), pair(1, 1), pair(4, 4), pair(0, 5)],
            vec![pair(0, 5), pair(4, 4), pair(1, 1), pair(5, 0)],
            vec![pair(4, 4), pair(0, 5), pair(5, 0), pair(1, 1)],
        ];
        InfoGame::new(
            vec![
                vec!["s".into(), "t".into()],
                vec!["s".into(), "t".into()],
            ],
            vec![
                vec!["U".into(), "D".into()],
                vec!["L".into(), "R".into()],
            ],
            payoffs,
        )
        .unwrap()
    }

    /// Four-state example whose ex-post equilibrium cannot be supported by
    /// signal-blind payments: the two binding constraints at opponent action
    /// L contradict each other.
    fn impossibility_example() -> InfoGame {
        let v = |a: i64, b: i64| vec![rat(a), rat(b)];
        let payoffs = vec![
            vec![v(2, 8), v(5, 1), v(1, 5), v(6, 4)],
            vec![v(0, 5), v(3, 6), v(7, 2), v(1, 4)],
            vec![v(0, 2), v(5, 2), v(1, 1), v(6, 0)],
            vec![v(5, 0), v(2, 4), v(4, 2), v(3, 3)],
        ];
        InfoGame::new(
            vec![
                vec!["s".into(), "t".into()],
                vec!["s".into(), "t".into()],
            ],
            vec![
                vec!["U".into(), "D".into()],
                vec!["L".into(), "R".into()],
            ],
            payoffs,
        )
        .unwrap()
    }

    #[test]
    fn construction_validates_totality() {
        assert!(matches!(
            InfoGame::new(
                vec![vec!["s".into()]],
                vec![vec!["a".into()]],
                vec![],
            ),
            Err(InfoError::InvalidGame(_))
        ));
    }

    #[test]
    fn expost_equilibrium_checks() {
        let g = impossibility_example();
        // U at s, D at t for player 1; L at s, R at t for player 2.
        let arrow = InfoStrategy(vec![vec![0, 1], vec![0, 1]]);
        assert!(is_expost_equilibrium(&g, &arrow).unwrap());
        // Swapping player 1's map breaks it.
        let wrong = InfoStrategy(vec![vec![1, 0], vec![0, 1]]);
        assert!(!is_expost_equilibrium(&g, &wrong).unwrap());

        // A single-signal embedding reduces to the pure-equilibrium check.
        let m = congestion_game();
        let wrapped = InfoGame::wrap_game(&m);
        assert!(is_expost_equilibrium(&wrapped, &InfoStrategy(vec![vec![0], vec![1]])).unwrap());
        assert!(!is_expost_equilibrium(&wrapped, &InfoStrategy(vec![vec![0], vec![0]])).unwrap());

        // The domination example: dominant maps form an ex-post equilibrium
        // only where the induced state profiles are equilibria.
        let d = domination_example();
        let dominated_play = InfoStrategy(vec![vec![1, 0], vec![0, 0]]);
        assert!(!is_expost_equilibrium(&d, &dominated_play).unwrap());
    }

    #[test]
    fn signal_strategy_dominance() {
        let g = domination_example();
        let best = vec![0usize, 1]; // U at s, D at t
        for other in [vec![0usize, 0], vec![1usize, 0], vec![1usize, 1]] {
            assert!(info_dominates(&g, 0, &best, &other), "vs {other:?}");
        }
        assert!(!info_dominates(&g, 0, &best, &best));
        assert!(!info_dominates(&g, 0, &[1, 0], &best));
    }

    #[test]
    fn impossibility_is_certified_with_the_binding_cells() {
        let g = impossibility_example();
        let target = InfoStrategy(vec![vec![0, 1], vec![0, 1]]);
        let outcome = uniform_implementation_feasible(&g, &target, &rat(1)).unwrap();
        let FeasibilityOutcome::Infeasible(certificate) = outcome else {
            panic!("expected infeasibility");
        };
        assert_eq!(certificate.player, 0);
        assert_eq!(certificate.opponent_actions, vec![0]); // against L
        assert!(certificate.total > rat(0));
        assert_eq!(
            certificate.total,
            certificate.cycle.iter().map(|e| e.bound.clone()).sum::<Rat>()
        );
        // The two binding payoff pairs: 0 vs 7 at state (s,t), 5 vs 4 at (t,t).
        let mut pinned: Vec<(Rat, Rat)> = certificate
            .cycle
            .iter()
            .map(|e| (e.recommended_payoff.clone(), e.alternative_payoff.clone()))
            .collect();
        pinned.sort();
        assert_eq!(
            pinned,
            vec![(rat(0), rat(7)), (rat(4), rat(5))]
        );
        let states: Vec<Vec<usize>> = certificate
            .cycle
            .iter()
            .map(|e| e.signal_profile.clone())
            .collect();
        assert!(states.contains(&vec![0, 1]));
        assert!(states.contains(&vec![1, 1]));
    }

    #[test]
    fn single_signal_embedding_matches_the_singleton_construction() {
        let m = congestion_game();
        let wrapped = InfoGame::wrap_game(&m);
        let target = InfoStrategy(vec![vec![0], vec![1]]); // (f, s)
        let outcome = uniform_implementation_feasible(&wrapped, &target, &rat(1)).unwrap();
        let FeasibilityOutcome::Feasible(payments) = outcome else {
            panic!("single-signal targets with two actions are always feasible");
        };
        let scheme = payments.to_payment_scheme(&m).unwrap();
        let direct =
            build_singleton_implementation(&m, &Profile::new(vec![0, 1]), &rat(1)).unwrap();
        assert_eq!(scheme, direct);
        let report =
            verify_implementation(&m, &scheme, &[Profile::new(vec![0, 1])]).unwrap();
        assert!(report.target_contained);
        assert_eq!(report.worst_case_cost, rat(0));
    }

    #[test]
    fn already_dominant_targets_cost_nothing() {
        // U beats D by at least 2 in every state for player 1; L beats R
        // likewise for player 2, so zero payments suffice even with slack 1.
        let v = |a: i64, b: i64| vec![rat(a), rat(b)];
        let payoffs = vec![
            vec![v(5, 5), v(4, 2), v(2, 4), v(1, 1)],
            vec![v(6, 7), v(4, 3), v(3, 5), v(1, 2)],
        ];
        let g = InfoGame::new(
            vec![vec!["s".into(), "t".into()], vec!["s".into()]],
            vec![
                vec!["U".into(), "D".into()],
                vec!["L".into(), "R".into()],
            ],
            payoffs,
        )
        .unwrap();
        let target = InfoStrategy(vec![vec![0, 0], vec![0]]);
        let outcome = uniform_implementation_feasible(&g, &target, &rat(1)).unwrap();
        let FeasibilityOutcome::Feasible(payments) = outcome else {
            panic!("expected feasibility");
        };
        assert!(payments.positive_entries().is_empty());
        assert!(witness_makes_targets_dominant(&g, &target, &payments).unwrap());
    }

    #[test]
    fn witnesses_pass_the_state_by_state_recheck() {
        let g = domination_example();
        let target = InfoStrategy(vec![vec![0, 1], vec![0, 1]]);
        if let FeasibilityOutcome::Feasible(payments) =
            uniform_implementation_feasible(&g, &target, &rat(1)).unwrap()
        {
            assert!(witness_makes_targets_dominant(&g, &target, &payments).unwrap());
        }
        let m = congestion_game();
        let wrapped = InfoGame::wrap_game(&m);
        for profile in [vec![0usize, 0], vec![0, 1], vec![1, 0], vec![1, 1]] {
            let target = InfoStrategy(profile.iter().map(|&a| vec![a]).collect());
            let FeasibilityOutcome::Feasible(payments) =
                uniform_implementation_feasible(&wrapped, &target, &rat(1)).unwrap()
            else {
                panic!("single-signal targets are always feasible");
            };
            assert!(witness_makes_targets_dominant(&wrapped, &target, &payments).unwrap());
        }
    }

    #[test]
    fn feasibility_is_invariant_under_per_state_shifts() {
        let g = impossibility_example();
        // Add a constant to player 1's payoffs in state (s, t) only.
        let mut shifted_payoffs = Vec::new();
        for (s, block) in g.payoffs.iter().enumerate() {
            let mut new_block = block.clone();
            if s == 1 {
                for cell in new_block.iter_mut() {
                    cell[0] += rat(100);
                }
            }
            shifted_payoffs.push(new_block);
        }
        let shifted = InfoGame::new(
            g.signal_labels.clone(),
            g.action_labels.clone(),
            shifted_payoffs,
        )
        .unwrap();
        let target = InfoStrategy(vec![vec![0, 1], vec![0, 1]]);
        let a = uniform_implementation_feasible(&g, &target, &rat(1)).unwrap();
        let b = uniform_implementation_feasible(&shifted, &target, &rat(1)).unwrap();
        match (a, b) {
            (FeasibilityOutcome::Infeasible(ca), FeasibilityOutcome::Infeasible(cb)) => {
                assert_eq!(ca.player, cb.player);
                assert_eq!(ca.total, cb.total);
            }
            other => panic!("expected matching infeasibility, got {other:?}"),
        }
    }
}
