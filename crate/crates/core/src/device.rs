//! Implementation devices: private signals plus signal-conditioned payments.
//!
//! A device draws a signal profile from a published distribution, sends each
//! player their coordinate privately, and pays out according to the realised
//! signals and the actions actually played. With the signal sets equal to
//! the action sets, signals read as recommendations and the obedience
//! strategy maps every signal to itself. The constructions here make
//! obedience dominant at zero realised cost for any mixed-equilibrium
//! product distribution and for any correlated-equilibrium distribution: the
//! device pays a large bonus to a player who followed their recommendation
//! whenever someone else visibly strayed, and nothing otherwise.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::Zero;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Game, GameError, MixedProfile, OutcomeDistribution, Profile};
use crate::rat::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeviceError {
    #[error("device is invalid: {0}")]
    InvalidDevice(String),
    #[error("device action sets do not match the game's strategy sets")]
    IncompatibleWithGame,
    #[error("signal sets must equal action sets for obedience to be defined")]
    ObedienceUndefined,
    #[error("signal {signal} of player {player} has zero probability; conditional undefined")]
    ZeroProbabilitySignal { player: usize, signal: usize },
    #[error("device strategy is not total or maps to invalid actions")]
    InvalidStrategy,
    #[error("profile distribution is not an equilibrium; the construction's inequalities fail")]
    NotEquilibrium,
    #[error("distribution is not a correlated equilibrium; obedience cannot be dominant")]
    NotCorrelatedEquilibrium,
    #[error("player {player} needs at least two actions")]
    TooFewActions { player: usize },
    #[error("dominance check would enumerate about {estimated} opponent strategy vectors, cap is {cap}")]
    TooLarge { estimated: u128, cap: u128 },
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Signal sets, a distribution over signal profiles, and a sparse payment
/// table from (player, signal profile, action profile) to non-negative
/// amounts; omitted entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplementationDevice {
    signal_labels: Vec<Vec<String>>,
    action_labels: Vec<Vec<String>>,
    /// Dense over flattened signal profiles.
    h: Vec<Rat>,
    payments: BTreeMap<(usize, usize, usize), Rat>,
}

/// Per player, a total map from signals to actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviceStrategy(pub Vec<Vec<usize>>);

impl DeviceStrategy {
    /// The strategy playing every recommendation as received. Defined when
    /// signal sets equal action sets.
    pub fn obedient(device: &ImplementationDevice) -> Result<Self, DeviceError> {
        if device.signal_labels != device.action_labels {
            return Err(DeviceError::ObedienceUndefined);
        }
        Ok(DeviceStrategy(
            device
                .signal_labels
                .iter()
                .map(|s| (0..s.len()).collect())
                .collect(),
        ))
    }
}

fn flat_index(shape: &[usize], indices: &[usize]) -> usize {
    let mut index = 0;
    for (n, &i) in shape.iter().zip(indices.iter()) {
        index = index * n + i;
    }
    index
}

fn all_profiles(shape: &[usize]) -> Vec<Vec<usize>> {
    shape
        .iter()
        .map(|&n| 0..n)
        .multi_cartesian_product()
        .collect()
}

impl ImplementationDevice {
    pub fn new(
        signal_labels: Vec<Vec<String>>,
        action_labels: Vec<Vec<String>>,
        h_entries: Vec<(Vec<usize>, Rat)>,
        payment_entries: Vec<(usize, Vec<usize>, Vec<usize>, Rat)>,
    ) -> Result<Self, DeviceError> {
        if signal_labels.len() != action_labels.len() || signal_labels.is_empty() {
            return Err(DeviceError::InvalidDevice(
                "player counts of signal and action sets differ or are zero".to_string(),
            ));
        }
        let n = signal_labels.len();
        let signal_shape: Vec<usize> = signal_labels.iter().map(|s| s.len()).collect();
        let action_shape: Vec<usize> = action_labels.iter().map(|s| s.len()).collect();
        if signal_shape.contains(&0) || action_shape.contains(&0) {
            return Err(DeviceError::InvalidDevice(
                "empty signal or action set".to_string(),
            ));
        }
        let cells = signal_shape.iter().product();
        let mut h = vec![rat(0); cells];
        for (profile, p) in h_entries {
            if profile.len() != n
                || profile
                    .iter()
                    .zip(signal_shape.iter())
                    .any(|(&i, &c)| i >= c)
            {
                return Err(DeviceError::InvalidDevice(format!(
                    "invalid signal profile {profile:?}"
                )));
            }
            if p < rat(0) {
                return Err(DeviceError::InvalidDevice(
                    "negative signal probability".to_string(),
                ));
            }
            h[flat_index(&signal_shape, &profile)] += p;
        }
        if h.iter().cloned().sum::<Rat>() != rat(1) {
            return Err(DeviceError::InvalidDevice(
                "signal probabilities do not sum to 1".to_string(),
            ));
        }
        let mut payments = BTreeMap::new();
        for (player, signal, action, amount) in payment_entries {
            if player >= n
                || signal.len() != n
                || action.len() != n
                || signal
                    .iter()
                    .zip(signal_shape.iter())
                    .any(|(&i, &c)| i >= c)
                || action
                    .iter()
                    .zip(action_shape.iter())
                    .any(|(&i, &c)| i >= c)
            {
                return Err(DeviceError::InvalidDevice(
                    "payment entry outside the device's index space".to_string(),
                ));
            }
            if amount < rat(0) {
                return Err(DeviceError::InvalidDevice(
                    "negative device payment".to_string(),
                ));
            }
            if !amount.is_zero() {
                payments.insert(
                    (
                        player,
                        flat_index(&signal_shape, &signal),
                        flat_index(&action_shape, &action),
                    ),
                    amount,
                );
            }
        }
        Ok(ImplementationDevice {
            signal_labels,
            action_labels,
            h,
            payments,
        })
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

    pub fn probability(&self, signal_profile: &[usize]) -> Rat {
        self.h[flat_index(&self.signal_shape(), signal_profile)].clone()
    }

    /// Signal profiles with positive probability, lexicographic order.
    pub fn signal_support(&self) -> Vec<(Vec<usize>, Rat)> {
        let shape = self.signal_shape();
        all_profiles(&shape)
            .into_iter()
            .filter_map(|s| {
                let p = self.h[flat_index(&shape, &s)].clone();
                if p.is_zero() {
                    None
                } else {
                    Some((s, p))
                }
            })
            .collect()
    }

    pub fn marginal(&self, player: usize, signal: usize) -> Rat {
        let shape = self.signal_shape();
        all_profiles(&shape)
            .into_iter()
            .filter(|s| s[player] == signal)
            .map(|s| self.h[flat_index(&shape, &s)].clone())
            .sum()
    }

    pub fn payment(&self, player: usize, signal_profile: &[usize], action_profile: &[usize]) -> Rat {
        let key = (
            player,
            flat_index(&self.signal_shape(), signal_profile),
            flat_index(&self.action_shape(), action_profile),
        );
        self.payments.get(&key).cloned().unwrap_or_else(|| rat(0))
    }

    /// Sparse positive payment entries as
    /// `(player, signal profile, action profile, amount)`.
    pub fn payment_entries(&self) -> Vec<(usize, Vec<usize>, Vec<usize>, Rat)> {
        let signal_shape = self.signal_shape();
        let action_shape = self.action_shape();
        let unflatten = |shape: &[usize], mut flat: usize| -> Vec<usize> {
            let mut out = vec![0; shape.len()];
            for i in (0..shape.len()).rev() {
                out[i] = flat % shape[i];
                flat /= shape[i];
            }
            out
        };
        self.payments
            .iter()
            .map(|(&(player, s, x), amount)| {
                (
                    player,
                    unflatten(&signal_shape, s),
                    unflatten(&action_shape, x),
                    amount.clone(),
                )
            })
            .collect()
    }

    fn check_game(&self, game: &Game) -> Result<(), DeviceError> {
        let matches = game.player_count() == self.action_labels.len()
            && self
                .action_labels
                .iter()
                .enumerate()
                .all(|(p, labels)| labels.as_slice() == game.strategy_labels(p));
        if matches {
            Ok(())
        } else {
            Err(DeviceError::IncompatibleWithGame)
        }
    }

    fn check_strategy(&self, strategy: &DeviceStrategy) -> Result<(), DeviceError> {
        let ok = strategy.0.len() == self.player_count()
            && strategy.0.iter().enumerate().all(|(p, map)| {
                map.len() == self.signal_labels[p].len()
                    && map.iter().all(|&a| a < self.action_labels[p].len())
            });
        if ok {
            Ok(())
        } else {
            Err(DeviceError::InvalidStrategy)
        }
    }
}

/// Expected payoff-plus-payment to `player` for choosing `action` after
/// receiving `signal`, when the other players follow their maps in `others`.
/// The expectation is over the other players' signals conditioned on
/// `signal`; it is undefined (an error) for zero-probability signals.
pub fn conditional_value(
    game: &Game,
    device: &ImplementationDevice,
    player: usize,
    action: usize,
    signal: usize,
    others: &DeviceStrategy,
) -> Result<Rat, DeviceError> {
    device.check_game(game)?;
    device.check_strategy(others)?;
    let marginal = device.marginal(player, signal);
    if marginal.is_zero() {
        return Err(DeviceError::ZeroProbabilitySignal { player, signal });
    }
    let shape = device.signal_shape();
    let mut total = rat(0);
    for signal_profile in all_profiles(&shape) {
        if signal_profile[player] != signal {
            continue;
        }
        let weight = device.h[flat_index(&shape, &signal_profile)].clone();
        if weight.is_zero() {
            continue;
        }
        let mut action_profile: Vec<usize> = signal_profile
            .iter()
            .enumerate()
            .map(|(j, &s)| others.0[j][s])
            .collect();
        action_profile[player] = action;
        let base = game.payoff(&Profile::new(action_profile.clone()))?[player].clone();
        let bonus = device.payment(player, &signal_profile, &action_profile);
        total += weight * (base + bonus);
    }
    Ok(total / marginal)
}

pub const DEFAULT_DOMINANCE_CAP: u128 = 1_000_000;

/// All deterministic strategy vectors of the players other than `player`.
fn opponent_strategy_vectors(
    device: &ImplementationDevice,
    player: usize,
) -> Vec<Vec<Vec<usize>>> {
    let per_player_maps: Vec<Vec<Vec<usize>>> = (0..device.player_count())
        .filter(|&j| j != player)
        .map(|j| {
            let actions = device.action_labels[j].len();
            device.signal_labels[j]
                .iter()
                .map(|_| 0..actions)
                .multi_cartesian_product()
                .collect()
        })
        .collect();
    per_player_maps
        .into_iter()
        .multi_cartesian_product()
        .collect()
}

/// Checks that obedience is a dominant strategy for every player: against
/// every deterministic opponent strategy vector, following the received
/// recommendation is weakly best among all actions at every
/// positive-probability signal, and for every alternative some opponent
/// vector makes it strictly better. Exhaustive; refuses oversized inputs.
pub fn is_dominant_obedience(
    game: &Game,
    device: &ImplementationDevice,
) -> Result<bool, DeviceError> {
    is_dominant_obedience_with_cap(game, device, DEFAULT_DOMINANCE_CAP)
}

pub fn is_dominant_obedience_with_cap(
    game: &Game,
    device: &ImplementationDevice,
    cap: u128,
) -> Result<bool, DeviceError> {
    device.check_game(game)?;
    if device.signal_labels != device.action_labels {
        return Err(DeviceError::ObedienceUndefined);
    }
    for player in 0..device.player_count() {
        let mut estimated: u128 = 1;
        for j in 0..device.player_count() {
            if j == player {
                continue;
            }
            let maps = (device.action_labels[j].len() as u128)
                .checked_pow(device.signal_labels[j].len() as u32)
                .unwrap_or(u128::MAX);
            estimated = estimated.saturating_mul(maps);
        }
        if estimated > cap {
            return Err(DeviceError::TooLarge { estimated, cap });
        }
        let vectors = opponent_strategy_vectors(device, player);
        for signal in 0..device.signal_labels[player].len() {
            if device.marginal(player, signal).is_zero() {
                continue;
            }
            for alt in 0..device.action_labels[player].len() {
                if alt == signal {
                    continue;
                }
                let mut strict = false;
                for vector in &vectors {
                    let mut maps = vector.iter();
                    let others = DeviceStrategy(
                        (0..device.player_count())
                            .map(|j| {
                                if j == player {
                                    // Placeholder, never consulted for `player`.
                                    vec![0; device.signal_labels[player].len()]
                                } else {
                                    maps.next().unwrap().clone()
                                }
                            })
                            .collect(),
                    );
                    let obey = conditional_value(game, device, player, signal, signal, &others)?;
                    let stray = conditional_value(game, device, player, alt, signal, &others)?;
                    if obey < stray {
                        return Ok(false);
                    }
                    if obey > stray {
                        strict = true;
                    }
                }
                if !strict {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Worst realised payment when everyone obeys: the max over
/// positive-probability signal profiles of the total payment at the obedient
/// action profile.
pub fn device_cost(device: &ImplementationDevice) -> Result<Rat, DeviceError> {
    if device.signal_labels != device.action_labels {
        return Err(DeviceError::ObedienceUndefined);
    }
    let mut worst = rat(0);
    for (signal_profile, _) in device.signal_support() {
        let total: Rat = (0..device.player_count())
            .map(|player| device.payment(player, &signal_profile, &signal_profile))
            .sum();
        if total > worst {
            worst = total;
        }
    }
    Ok(worst)
}

/// Largest total the device could ever pay out on a positive-probability
/// signal profile, over all action profiles, obedient or not. Reported
/// alongside [`device_cost`] since only the obedient figure counts as the
/// implementation's price.
pub fn worst_case_payout(device: &ImplementationDevice) -> Rat {
    let mut totals: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for (&(_, s, x), amount) in &device.payments {
        *totals.entry((s, x)).or_insert_with(|| rat(0)) += amount;
    }
    let mut worst = rat(0);
    for ((s, _), total) in totals {
        if device.h[s].is_zero() {
            continue;
        }
        if total > worst {
            worst = total;
        }
    }
    worst
}

/// Common skeleton of the two zero-cost constructions: signals are the
/// game's own strategies, `h` is the supplied distribution, and a player is
/// paid `2M + 1` (M the largest payoff magnitude) exactly when their action
/// matches their recommendation but some opponent's visible action differs
/// from that opponent's recommendation.
fn bonus_device(game: &Game, h: &OutcomeDistribution) -> ImplementationDevice {
    let labels: Vec<Vec<String>> = (0..game.player_count())
        .map(|p| game.strategy_labels(p).to_vec())
        .collect();
    let bonus = rat(2) * game.max_abs_payoff() + rat(1);
    let mut payments = Vec::new();
    for signal in game.profiles() {
        for player in 0..game.player_count() {
            for action in game.profiles() {
                if action.0[player] != signal.0[player] || action == signal {
                    continue;
                }
                payments.push((player, signal.0.clone(), action.0.clone(), bonus.clone()));
            }
        }
    }
    let h_entries: Vec<(Vec<usize>, Rat)> = game
        .profiles()
        .into_iter()
        .map(|p| {
            let w = h.prob_at(game, &p);
            (p.0, w)
        })
        .filter(|(_, w)| !w.is_zero())
        .collect();
    ImplementationDevice::new(labels.clone(), labels, h_entries, payments)
        .expect("construction produces a valid device")
}

fn require_two_actions(game: &Game) -> Result<(), DeviceError> {
    for player in 0..game.player_count() {
        if game.strategy_count(player) < 2 {
            return Err(DeviceError::TooFewActions { player });
        }
    }
    Ok(())
}

/// Zero-cost device for a mixed-strategy equilibrium: recommendations are
/// drawn from the product distribution of the equilibrium. Rejects profiles
/// that are not equilibria, where the obedience inequalities would fail.
pub fn build_mixed_device(
    game: &Game,
    mixed: &MixedProfile,
) -> Result<ImplementationDevice, DeviceError> {
    require_two_actions(game)?;
    if !game.is_mixed_nash(mixed)? {
        return Err(DeviceError::NotEquilibrium);
    }
    let product = OutcomeDistribution::product_of(game, mixed)?;
    Ok(bonus_device(game, &product))
}

/// Zero-cost device for a correlated-equilibrium distribution; same payment
/// skeleton with `h` set to the distribution itself.
pub fn build_correlated_device(
    game: &Game,
    dist: &OutcomeDistribution,
) -> Result<ImplementationDevice, DeviceError> {
    require_two_actions(game)?;
    if !game.is_correlated_equilibrium(dist)? {
        return Err(DeviceError::NotCorrelatedEquilibrium);
    }
    Ok(bonus_device(game, dist))
}

/// The exact outcome distribution induced by playing `strategies` against
/// the device's signals: the action profile `x` receives the total mass of
/// all signal profiles mapped onto it.
pub fn induced_outcome_distribution(
    game: &Game,
    device: &ImplementationDevice,
    strategies: &DeviceStrategy,
) -> Result<OutcomeDistribution, DeviceError> {
    device.check_game(game)?;
    device.check_strategy(strategies)?;
    let mut pairs: Vec<(Profile, Rat)> = Vec::new();
    for (signal_profile, weight) in device.signal_support() {
        let action: Vec<usize> = signal_profile
            .iter()
            .enumerate()
            .map(|(j, &s)| strategies.0[j][s])
            .collect();
        pairs.push((Profile::new(action), weight));
    }
    Ok(OutcomeDistribution::from_pairs(game, &pairs)?)
}

/// Deterministic seeded run of the device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationOutcome {
    pub rounds: u64,
    /// Count of realised action profiles.
    pub outcome_counts: BTreeMap<Profile, u64>,
    /// Total device payments accrued per player.
    pub device_payments: Vec<Rat>,
    /// Total base payoffs accrued per player.
    pub base_payoffs: Vec<Rat>,
}

/// Draws signal profiles from `h` with a seeded generator, applies the
/// players' maps, and accrues base payoffs and device payments. A given
/// `(seed, rounds, inputs)` triple always produces the identical outcome.
pub fn simulate_device(
    game: &Game,
    device: &ImplementationDevice,
    strategies: &DeviceStrategy,
    seed: u64,
    rounds: u64,
) -> Result<SimulationOutcome, DeviceError> {
    device.check_game(game)?;
    device.check_strategy(strategies)?;
    if rounds == 0 {
        return Err(DeviceError::NoRounds);
    }
    let support = device.signal_support();
    // Exact cumulative thresholds scaled to the 64-bit draw space. The final
    // threshold is 2^64, so every draw selects something.
    let scale = Rat::new(num_bigint::BigInt::from(1u8) << 64, 1.into());
    let mut cumulative = rat(0);
    let thresholds: Vec<u128> = support
        .iter()
        .map(|(_, p)| {
            cumulative += p;
            let scaled = (&cumulative * &scale).floor();
            let digits = scaled.numer().to_string();
            digits.parse::<u128>().expect("threshold fits in u128")
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome_counts: BTreeMap<Profile, u64> = BTreeMap::new();
    let mut device_payments = vec![rat(0); game.player_count()];
    let mut base_payoffs = vec![rat(0); game.player_count()];
    for _ in 0..rounds {
        let draw = rng.next_u64() as u128;
        let chosen = thresholds
            .iter()
            .position(|&t| draw < t)
            .expect("thresholds cover the draw space");
        let signal_profile = &support[chosen].0;
        let action: Vec<usize> = signal_profile
            .iter()
            .enumerate()
            .map(|(j, &s)| strategies.0[j][s])
            .collect();
        let profile = Profile::new(action.clone());
        *outcome_counts.entry(profile.clone()).or_insert(0) += 1;
        let payoff = game.payoff(&profile)?;
        for player in 0..game.player_count() {
            base_payoffs[player] += &payoff[player];
            device_payments[player] += device.payment(player, signal_profile, &action);
        }
    }
    Ok(SimulationOutcome {
        rounds,
        outcome_counts,
        device_payments,
        base_payoffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;
    use crate::testutil::{congestion_game, random_game, rng};

    fn profile(indices: &[usize]) -> Profile {
        Profile::new(indices.to_vec())
    }

    fn interior_equilibrium(game: &Game) -> MixedProfile {
        let _ = game;
        MixedProfile::new(vec![
            vec![ratio(4, 5), ratio(1, 5)],
            vec![ratio(4, 5), ratio(1, 5)],
        ])
        .unwrap()
    }

    fn off_diagonal_uniform(game: &Game) -> OutcomeDistribution {
        OutcomeDistribution::uniform(game, &[profile(&[0, 1]), profile(&[1, 0])]).unwrap()
    }

    #[test]
    fn conditional_values_for_the_mixed_equilibrium_device() {
        let m = congestion_game();
        let device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        let obedient = DeviceStrategy::obedient(&device).unwrap();
        // Obeying recommendation f: no payments on the obedient path, so the
        // value reduces to the expected base payoff of the row.
        let obey = conditional_value(&m, &device, 0, 0, 0, &obedient).unwrap();
        assert_eq!(obey, ratio(18, 5));
        // Disobedient alternative: payments vanish when the action differs
        // from the recommendation, leaving the raw deviation value.
        let stray = conditional_value(&m, &device, 0, 1, 0, &obedient).unwrap();
        assert_eq!(stray, ratio(18, 5));
        assert_eq!(
            stray,
            ratio(4, 5) * rat(4) + ratio(1, 5) * rat(2),
            "deviation value is the base payoff of the deviating row"
        );
    }

    #[test]
    fn point_mass_device_conditional_is_the_single_realisation() {
        let m = congestion_game();
        let point = OutcomeDistribution::point_mass(&m, &profile(&[0, 1])).unwrap();
        let device = build_correlated_device(&m, &point).unwrap();
        let obedient = DeviceStrategy::obedient(&device).unwrap();
        assert_eq!(
            conditional_value(&m, &device, 0, 0, 0, &obedient).unwrap(),
            rat(6)
        );
        // Conditioning on a zero-probability signal is undefined.
        assert!(matches!(
            conditional_value(&m, &device, 0, 0, 1, &obedient),
            Err(DeviceError::ZeroProbabilitySignal { .. })
        ));
    }

    #[test]
    fn obedience_is_dominant_for_both_constructions() {
        let m = congestion_game();
        let mixed_device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        assert!(is_dominant_obedience(&m, &mixed_device).unwrap());
        assert_eq!(device_cost(&mixed_device).unwrap(), rat(0));

        let corr_device = build_correlated_device(&m, &off_diagonal_uniform(&m)).unwrap();
        assert!(is_dominant_obedience(&m, &corr_device).unwrap());
        assert_eq!(device_cost(&corr_device).unwrap(), rat(0));
    }

    #[test]
    fn zero_payment_device_over_non_equilibrium_point_is_not_dominant() {
        let m = congestion_game();
        let labels: Vec<Vec<String>> =
            (0..2).map(|p| m.strategy_labels(p).to_vec()).collect();
        let device = ImplementationDevice::new(
            labels.clone(),
            labels,
            vec![(vec![0, 0], rat(1))],
            vec![],
        )
        .unwrap();
        assert!(!is_dominant_obedience(&m, &device).unwrap());
    }

    #[test]
    fn bonus_magnitude_and_costs() {
        let m = congestion_game();
        let device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        // Largest payoff magnitude is 6, so the off-path bonus is 13.
        assert_eq!(device.payment(0, &[0, 0], &[0, 1]), rat(13));
        assert_eq!(device.payment(0, &[0, 0], &[0, 0]), rat(0));
        assert_eq!(device.payment(0, &[0, 0], &[1, 0]), rat(0));
        assert_eq!(device_cost(&device).unwrap(), rat(0));
        // With two players the bonuses are mutually exclusive: one player's
        // bonus requires the other's action to mismatch its recommendation.
        assert_eq!(worst_case_payout(&device), rat(13));
    }

    #[test]
    fn flat_payment_device_costs_its_payment() {
        let m = congestion_game();
        let labels: Vec<Vec<String>> =
            (0..2).map(|p| m.strategy_labels(p).to_vec()).collect();
        let h: Vec<(Vec<usize>, Rat)> = vec![
            (vec![0, 1], ratio(1, 2)),
            (vec![1, 0], ratio(1, 2)),
        ];
        let payments = vec![
            (0usize, vec![0, 1], vec![0, 1], rat(5)),
            (0usize, vec![1, 0], vec![1, 0], rat(5)),
        ];
        let device = ImplementationDevice::new(labels.clone(), labels, h, payments).unwrap();
        assert_eq!(device_cost(&device).unwrap(), rat(5));
        assert_eq!(worst_case_payout(&device), rat(5));
    }

    #[test]
    fn construction_rejects_non_equilibria() {
        let m = congestion_game();
        let not_eq =
            MixedProfile::new(vec![vec![rat(1), rat(0)], vec![rat(1), rat(0)]]).unwrap();
        assert_eq!(
            build_mixed_device(&m, &not_eq),
            Err(DeviceError::NotEquilibrium)
        );
        let bad_dist = OutcomeDistribution::point_mass(&m, &profile(&[0, 0])).unwrap();
        assert_eq!(
            build_correlated_device(&m, &bad_dist),
            Err(DeviceError::NotCorrelatedEquilibrium)
        );
    }

    #[test]
    fn induced_distribution_is_symbolically_exact() {
        let m = congestion_game();
        let mixed = interior_equilibrium(&m);
        let device = build_mixed_device(&m, &mixed).unwrap();
        let obedient = DeviceStrategy::obedient(&device).unwrap();
        let induced = induced_outcome_distribution(&m, &device, &obedient).unwrap();
        assert_eq!(
            induced,
            OutcomeDistribution::product_of(&m, &mixed).unwrap()
        );
        let corr = off_diagonal_uniform(&m);
        let device2 = build_correlated_device(&m, &corr).unwrap();
        let induced2 = induced_outcome_distribution(
            &m,
            &device2,
            &DeviceStrategy::obedient(&device2).unwrap(),
        )
        .unwrap();
        assert_eq!(induced2, corr);
    }

    #[test]
    fn random_pure_equilibrium_point_masses_pass_all_three_checks() {
        let mut rng = rng(41);
        let mut done = 0;
        while done < 20 {
            let players = 2 + (done % 2);
            let g = random_game(&mut rng, players, 2..=3, -5, 5);
            let Some(z) = g.pure_nash_profiles().into_iter().next() else {
                continue;
            };
            let dist = OutcomeDistribution::point_mass(&g, &z).unwrap();
            let device = build_correlated_device(&g, &dist).unwrap();
            assert!(is_dominant_obedience(&g, &device).unwrap());
            assert_eq!(device_cost(&device).unwrap(), rat(0));
            let induced = induced_outcome_distribution(
                &g,
                &device,
                &DeviceStrategy::obedient(&device).unwrap(),
            )
            .unwrap();
            assert_eq!(induced, dist);
            done += 1;
        }
    }

    #[test]
    fn random_mixed_equilibria_yield_free_dominant_devices() {
        let mut rng = rng(42);
        for _ in 0..15 {
            let g = random_game(&mut rng, 2, 2..=3, -5, 5);
            let eq = g.mixed_nash_2p().unwrap();
            let device = build_mixed_device(&g, &eq).unwrap();
            assert!(is_dominant_obedience(&g, &device).unwrap());
            assert_eq!(device_cost(&device).unwrap(), rat(0));
            let induced = induced_outcome_distribution(
                &g,
                &device,
                &DeviceStrategy::obedient(&device).unwrap(),
            )
            .unwrap();
            assert_eq!(induced, OutcomeDistribution::product_of(&g, &eq).unwrap());
        }
    }

    #[test]
    fn dominance_check_refuses_oversized_inputs() {
        let m = congestion_game();
        let device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        assert!(matches!(
            is_dominant_obedience_with_cap(&m, &device, 1),
            Err(DeviceError::TooLarge { .. })
        ));
    }

    #[test]
    fn conditional_value_is_linear_in_opponent_mixtures() {
        let m = congestion_game();
        let device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        // Two deterministic opponent maps and a 1/3 : 2/3 mixture of them.
        let always_f = DeviceStrategy(vec![vec![0, 0], vec![0, 0]]);
        let swap = DeviceStrategy(vec![vec![1, 0], vec![1, 0]]);
        let lambda = ratio(1, 3);
        for (player, action, signal) in [(0usize, 0usize, 0usize), (0, 1, 0), (1, 0, 1)] {
            let va = conditional_value(&m, &device, player, action, signal, &always_f).unwrap();
            let vb = conditional_value(&m, &device, player, action, signal, &swap).unwrap();
            let combined = &lambda * &va + (rat(1) - &lambda) * &vb;
            // Direct expectation over the joint draw (mixture choice, signals).
            let marginal = device.marginal(player, signal);
            let mut direct = rat(0);
            for (signal_profile, weight) in device.signal_support() {
                if signal_profile[player] != signal {
                    continue;
                }
                for (choice, w) in [(&always_f, lambda.clone()), (&swap, rat(1) - &lambda)] {
                    let mut action_profile: Vec<usize> = signal_profile
                        .iter()
                        .enumerate()
                        .map(|(j, &s)| choice.0[j][s])
                        .collect();
                    action_profile[player] = action;
                    let base =
                        m.payoff(&Profile::new(action_profile.clone())).unwrap()[player].clone();
                    let bonus = device.payment(player, &signal_profile, &action_profile);
                    direct += w * &weight * (base + bonus);
                }
            }
            direct /= marginal;
            assert_eq!(direct, combined);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_obedient_runs_pay_nothing() {
        let m = congestion_game();
        let corr = off_diagonal_uniform(&m);
        let device = build_correlated_device(&m, &corr).unwrap();
        let obedient = DeviceStrategy::obedient(&device).unwrap();
        let a = simulate_device(&m, &device, &obedient, 7, 10_000).unwrap();
        let b = simulate_device(&m, &device, &obedient, 7, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.device_payments, vec![rat(0), rat(0)]);
        // Law-of-large-numbers sanity band for the uniform two-point draw.
        for target in [profile(&[0, 1]), profile(&[1, 0])] {
            let count = *a.outcome_counts.get(&target).unwrap();
            assert!((4900..=5100).contains(&count), "count {count}");
        }
        assert_eq!(a.outcome_counts.values().sum::<u64>(), 10_000);
    }

    #[test]
    fn point_mass_device_simulates_a_single_outcome() {
        let m = congestion_game();
        let point = OutcomeDistribution::point_mass(&m, &profile(&[0, 1])).unwrap();
        let device = build_correlated_device(&m, &point).unwrap();
        let obedient = DeviceStrategy::obedient(&device).unwrap();
        let run = simulate_device(&m, &device, &obedient, 3, 500).unwrap();
        assert_eq!(run.outcome_counts.len(), 1);
        assert_eq!(run.outcome_counts[&profile(&[0, 1])], 500);
    }

    #[test]
    fn disobedience_triggers_payments_to_obedient_opponents() {
        let m = congestion_game();
        let device = build_mixed_device(&m, &interior_equilibrium(&m)).unwrap();
        // Player 0 ignores recommendations and always plays f; player 1 obeys.
        let strategies = DeviceStrategy(vec![vec![0, 0], vec![0, 1]]);
        let run = simulate_device(&m, &device, &strategies, 11, 2_000).unwrap();
        // Player 0 is never paid (their action mismatches whenever s_0 = s),
        // player 1 collects the bonus in every round where player 0's signal
        // was s and the action f visibly mismatched it.
        assert_eq!(run.device_payments[0], rat(0));
        assert!(run.device_payments[1] > rat(0));
        let mismatches = run.device_payments[1].clone() / rat(13);
        // Roughly one round in five draws signal s for player 0.
        assert!(mismatches > rat(250) && mismatches < rat(550));
    }
}
