//! Package auctions under efficient allocation with displacement transfers.
//!
//! Buyers report valuations over bundles of goods; the mechanism picks a
//! reported-surplus-maximising allocation and charges each winner the loss
//! their presence imposes on everyone else (plus an optional per-buyer
//! offset). On top of the base mechanism this module provides bundle
//! projections (reporting only what a family of bundles can express),
//! quasi-field checks, frugal selection that never hands a buyer goods they
//! value no more than a strict sub-bundle, a conformance bonus rule that
//! makes projecting onto a quasi field dominant, and the worked fixture
//! showing that without frugality a projected report can be beaten by
//! another conforming report.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::rat::{rat, Rat};

/// Bundle of goods as a bitmask; good `i` is bit `i`.
pub type Bundle = u32;

pub const MAX_GOODS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuctionError {
    #[error("good count {got} exceeds the supported maximum {max}")]
    TooManyGoods { got: usize, max: usize },
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("allocation slots must partition the good set")]
    NotAPartition,
    #[error("reported profile has {got} valuations, mechanism has {expected} buyers")]
    WrongProfileLength { expected: usize, got: usize },
    #[error("buyer {buyer} reports a grand-bundle value not below the bound")]
    BoundViolated { buyer: usize },
    #[error("allocation enumeration of about {estimated} exceeds the cap {cap}")]
    CapExceeded { estimated: u128, cap: u128 },
    #[error("bundle family is not a quasi field")]
    NotQuasiField,
    #[error("valuation is not based on the bundle family")]
    NotSigmaBased,
    #[error("operation requires a frugal mechanism")]
    NotFrugal,
    #[error("offsets must list one value per buyer")]
    WrongOffsetLength,
    #[error("bundle family must contain the empty bundle")]
    MissingEmptyBundle,
    #[error("bundle {bundle:#x} lies outside the good set")]
    BundleOutOfRange { bundle: Bundle },
}

/// Monotone bundle valuation with `v(empty) = 0`, dense over all `2^m`
/// bundles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    good_count: usize,
    values: Vec<Rat>,
}

/// How a sparse bundle->value listing is completed to a total valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompletionMode {
    /// Every bundle must be listed explicitly.
    ExplicitTotal,
    /// Missing bundles inherit the maximum over their listed subsets.
    MonotoneClosure,
}

impl Valuation {
    pub fn new(good_count: usize, values: Vec<Rat>) -> Result<Self, AuctionError> {
        if good_count > MAX_GOODS {
            return Err(AuctionError::TooManyGoods {
                got: good_count,
                max: MAX_GOODS,
            });
        }
        let cells = 1usize << good_count;
        if values.len() != cells {
            return Err(AuctionError::InvalidValuation(format!(
                "expected {cells} bundle values, got {}",
                values.len()
            )));
        }
        if values[0] != rat(0) {
            return Err(AuctionError::InvalidValuation(
                "empty bundle must be valued 0".to_string(),
            ));
        }
        if values.iter().any(|v| *v < rat(0)) {
            return Err(AuctionError::InvalidValuation(
                "bundle values must be non-negative".to_string(),
            ));
        }
        for bundle in 0..cells {
            for good in 0..good_count {
                if bundle & (1 << good) == 0 {
                    let bigger = bundle | (1 << good);
                    if values[bundle] > values[bigger] {
                        return Err(AuctionError::InvalidValuation(format!(
                            "not monotone: bundle {bundle:#x} exceeds {bigger:#x}"
                        )));
                    }
                }
            }
        }
        Ok(Valuation { good_count, values })
    }

    pub fn from_entries(
        good_count: usize,
        entries: &[(Bundle, Rat)],
        mode: CompletionMode,
    ) -> Result<Self, AuctionError> {
        if good_count > MAX_GOODS {
            return Err(AuctionError::TooManyGoods {
                got: good_count,
                max: MAX_GOODS,
            });
        }
        let cells = 1usize << good_count;
        let full: Bundle = (cells - 1) as Bundle;
        let mut listed: Vec<Option<Rat>> = vec![None; cells];
        for (bundle, value) in entries {
            if *bundle > full {
                return Err(AuctionError::BundleOutOfRange { bundle: *bundle });
            }
            listed[*bundle as usize] = Some(value.clone());
        }
        let values: Vec<Rat> = match mode {
            CompletionMode::ExplicitTotal => {
                let missing = listed.iter().position(|v| v.is_none());
                if let Some(bundle) = missing {
                    return Err(AuctionError::InvalidValuation(format!(
                        "bundle {bundle:#x} missing from an explicit-total valuation"
                    )));
                }
                listed.into_iter().map(|v| v.unwrap()).collect()
            }
            CompletionMode::MonotoneClosure => {
                let mut out = vec![rat(0); cells];
                for (bundle, slot) in out.iter_mut().enumerate() {
                    let mut best = rat(0);
                    // Max over listed subsets of this bundle.
                    let mut sub = bundle as Bundle;
                    loop {
                        if let Some(v) = &listed[sub as usize] {
                            if *v > best {
                                best = v.clone();
                            }
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & bundle as Bundle;
                    }
                    *slot = best;
                }
                out
            }
        };
        Valuation::new(good_count, values)
    }

    pub fn zero(good_count: usize) -> Self {
        Valuation {
            good_count,
            values: vec![rat(0); 1 << good_count],
        }
    }

    pub fn good_count(&self) -> usize {
        self.good_count
    }

    pub fn full_bundle(&self) -> Bundle {
        ((1usize << self.good_count) - 1) as Bundle
    }

    pub fn value(&self, bundle: Bundle) -> &Rat {
        &self.values[bundle as usize]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

/// Ordered partition of the goods: slot 0 belongs to the seller, slot `i`
/// to buyer `i`. The seller derives no surplus from retained goods.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Allocation {
    slots: Vec<Bundle>,
}

impl Allocation {
    pub fn new(good_count: usize, slots: Vec<Bundle>) -> Result<Self, AuctionError> {
        let full: Bundle = ((1usize << good_count) - 1) as Bundle;
        let mut seen: Bundle = 0;
        for &slot in &slots {
            if slot & !full != 0 {
                return Err(AuctionError::BundleOutOfRange { bundle: slot });
            }
            if seen & slot != 0 {
                return Err(AuctionError::NotAPartition);
            }
            seen |= slot;
        }
        if seen != full {
            return Err(AuctionError::NotAPartition);
        }
        Ok(Allocation { slots })
    }

    pub fn seller(&self) -> Bundle {
        self.slots[0]
    }

    pub fn buyer(&self, buyer: usize) -> Bundle {
        self.slots[buyer + 1]
    }

    pub fn buyer_count(&self) -> usize {
        self.slots.len() - 1
    }

    /// Buyer bundles in order; the tie-break total order compares these.
    fn key(&self) -> &[Bundle] {
        &self.slots[1..]
    }
}

/// Total reported surplus of the buyers under an allocation.
pub fn surplus(reported: &[Valuation], allocation: &Allocation) -> Rat {
    reported
        .iter()
        .enumerate()
        .map(|(i, v)| v.value(allocation.buyer(i)).clone())
        .sum()
}

pub const DEFAULT_ALLOCATION_CAP: u128 = 1_000_000;

/// Every surplus-maximising allocation, in lexicographic order of the
/// per-good slot assignment. Exhaustive over `(n+1)^m` allocations, guarded
/// by `cap`.
pub fn optimal_allocations(
    reported: &[Valuation],
    good_count: usize,
    cap: u128,
) -> Result<Vec<Allocation>, AuctionError> {
    let buyers = reported.len();
    let estimated = (buyers as u128 + 1)
        .checked_pow(good_count as u32)
        .unwrap_or(u128::MAX);
    if estimated > cap {
        return Err(AuctionError::CapExceeded { estimated, cap });
    }
    let mut best: Option<Rat> = None;
    let mut winners: Vec<Allocation> = Vec::new();
    let assignments = if good_count == 0 {
        vec![Vec::new()]
    } else {
        (0..good_count)
            .map(|_| 0..=buyers)
            .multi_cartesian_product()
            .collect()
    };
    for assignment in assignments {
        let mut slots: Vec<Bundle> = vec![0; buyers + 1];
        for (good, &slot) in assignment.iter().enumerate() {
            slots[slot] |= 1 << good;
        }
        let allocation = Allocation { slots };
        let s = surplus(reported, &allocation);
        match &best {
            Some(b) if s < *b => {}
            Some(b) if s == *b => winners.push(allocation),
            _ => {
                best = Some(s);
                winners = vec![allocation];
            }
        }
    }
    Ok(winners)
}

/// Tie-breaking rule over optimal (and, if applicable, frugally trimmed)
/// allocations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Smallest buyer-bundle vector wins.
    Lexicographic,
    /// Exact reported profiles may pin a preferred allocation; anything not
    /// matched (or whose preference is not optimal) falls back to
    /// lexicographic order.
    ByReport(Vec<(Vec<Valuation>, Allocation)>),
}

/// An auction mechanism: good universe, buyer count, frugality flag,
/// tie-break, constant per-buyer transfer offsets, and an optional strict
/// upper bound on reported grand-bundle values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionMechanism {
    good_count: usize,
    buyer_count: usize,
    frugal: bool,
    tie_break: TieBreak,
    offsets: Vec<Rat>,
    bound: Option<Rat>,
    cap: u128,
}

impl AuctionMechanism {
    pub fn new(good_count: usize, buyer_count: usize) -> Result<Self, AuctionError> {
        if good_count > MAX_GOODS {
            return Err(AuctionError::TooManyGoods {
                got: good_count,
                max: MAX_GOODS,
            });
        }
        Ok(AuctionMechanism {
            good_count,
            buyer_count,
            frugal: false,
            tie_break: TieBreak::Lexicographic,
            offsets: vec![rat(0); buyer_count],
            bound: None,
            cap: DEFAULT_ALLOCATION_CAP,
        })
    }

    pub fn frugal(mut self, frugal: bool) -> Self {
        self.frugal = frugal;
        self
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_offsets(mut self, offsets: Vec<Rat>) -> Result<Self, AuctionError> {
        if offsets.len() != self.buyer_count {
            return Err(AuctionError::WrongOffsetLength);
        }
        self.offsets = offsets;
        Ok(self)
    }

    pub fn with_bound(mut self, bound: Rat) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn is_frugal(&self) -> bool {
        self.frugal
    }

    pub fn good_count(&self) -> usize {
        self.good_count
    }

    pub fn buyer_count(&self) -> usize {
        self.buyer_count
    }

    fn check_profile(&self, reported: &[Valuation]) -> Result<(), AuctionError> {
        if reported.len() != self.buyer_count {
            return Err(AuctionError::WrongProfileLength {
                expected: self.buyer_count,
                got: reported.len(),
            });
        }
        for (buyer, v) in reported.iter().enumerate() {
            if v.good_count() != self.good_count {
                return Err(AuctionError::InvalidValuation(format!(
                    "buyer {buyer}'s valuation covers {} goods, auction has {}",
                    v.good_count(),
                    self.good_count
                )));
            }
            if let Some(bound) = &self.bound {
                if v.value(v.full_bundle()) >= bound {
                    return Err(AuctionError::BoundViolated { buyer });
                }
            }
        }
        Ok(())
    }

    /// Trims each winner's bundle to a subset-minimal sub-bundle of equal
    /// reported value (ties among minimal sub-bundles broken by smallest
    /// mask); freed goods return to the seller. Preserves optimality and
    /// establishes the frugality property.
    fn trim(&self, reported: &[Valuation], allocation: &Allocation) -> Allocation {
        let mut slots = allocation.slots.clone();
        for buyer in 0..self.buyer_count {
            let bundle = slots[buyer + 1];
            let value = reported[buyer].value(bundle).clone();
            let mut best = bundle;
            // Enumerate sub-bundles; keep the smallest-cardinality (then
            // smallest-mask) one of equal reported value.
            let mut sub = bundle;
            loop {
                if *reported[buyer].value(sub) == value {
                    let better = (sub.count_ones(), sub) < (best.count_ones(), best);
                    if better {
                        best = sub;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & bundle;
            }
            slots[0] |= bundle & !best;
            slots[buyer + 1] = best;
        }
        Allocation { slots }
    }

    /// The mechanism's allocation for a reported profile: an optimal
    /// allocation, frugally trimmed when the mechanism is frugal, selected
    /// by the tie-break.
    pub fn select_allocation(&self, reported: &[Valuation]) -> Result<Allocation, AuctionError> {
        self.check_profile(reported)?;
        let optimal = optimal_allocations(reported, self.good_count, self.cap)?;
        let mut candidates: Vec<Allocation> = if self.frugal {
            let trimmed: BTreeSet<Allocation> = optimal
                .iter()
                .map(|a| self.trim(reported, a))
                .collect();
            trimmed.into_iter().collect()
        } else {
            optimal
        };
        candidates.sort_by(|a, b| a.key().cmp(b.key()));
        if let TieBreak::ByReport(overrides) = &self.tie_break {
            for (profile, preferred) in overrides {
                if profile.as_slice() == reported && candidates.contains(preferred) {
                    return Ok(preferred.clone());
                }
            }
        }
        Ok(candidates
            .into_iter()
            .next()
            .expect("at least one optimal allocation"))
    }

    /// Displacement transfer: the others' best achievable surplus without
    /// the buyer minus their surplus at the chosen allocation, plus the
    /// buyer's constant offset.
    pub fn vc_payment(&self, reported: &[Valuation], buyer: usize) -> Result<Rat, AuctionError> {
        self.check_profile(reported)?;
        let chosen = self.select_allocation(reported)?;
        let others_sum = |allocation: &Allocation| -> Rat {
            reported
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != buyer)
                .map(|(j, v)| v.value(allocation.buyer(j)).clone())
                .sum()
        };
        let mut others_best = rat(0);
        for allocation in optimal_allocations_by(reported, self.good_count, self.cap, buyer)? {
            let s = others_sum(&allocation);
            if s > others_best {
                others_best = s;
            }
        }
        Ok(others_best - others_sum(&chosen) + &self.offsets[buyer])
    }

    /// Utility of `buyer` holding `true_valuation` when the profile
    /// `reported` is submitted: true value of the received bundle minus the
    /// transfer.
    pub fn utility(
        &self,
        reported: &[Valuation],
        buyer: usize,
        true_valuation: &Valuation,
    ) -> Result<Rat, AuctionError> {
        let chosen = self.select_allocation(reported)?;
        let payment = self.vc_payment(reported, buyer)?;
        Ok(true_valuation.value(chosen.buyer(buyer)).clone() - payment)
    }
}

/// Allocations maximising the surplus of everyone except `excluded`.
/// Used for the displacement term of the transfer.
fn optimal_allocations_by(
    reported: &[Valuation],
    good_count: usize,
    cap: u128,
    excluded: usize,
) -> Result<Vec<Allocation>, AuctionError> {
    let mut masked: Vec<Valuation> = reported.to_vec();
    masked[excluded] = Valuation::zero(good_count);
    optimal_allocations(&masked, good_count, cap)
}

/// A family of bundles; the projection operations require it to contain the
/// empty bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleFamily {
    good_count: usize,
    members: BTreeSet<Bundle>,
}

impl BundleFamily {
    pub fn new(good_count: usize, members: Vec<Bundle>) -> Result<Self, AuctionError> {
        let full: Bundle = ((1usize << good_count) - 1) as Bundle;
        let members: BTreeSet<Bundle> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&b| b & !full != 0) {
            return Err(AuctionError::BundleOutOfRange { bundle: bad });
        }
        if !members.contains(&0) {
            return Err(AuctionError::MissingEmptyBundle);
        }
        Ok(BundleFamily {
            good_count,
            members,
        })
    }

    pub fn good_count(&self) -> usize {
        self.good_count
    }

    pub fn members(&self) -> impl Iterator<Item = Bundle> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, bundle: Bundle) -> bool {
        self.members.contains(&bundle)
    }
}

/// Projects a valuation onto the family: each bundle is worth the best
/// family member it contains. Reporting the projection of one's true
/// valuation is the canonical low-communication strategy.
pub fn bundle_strategy(valuation: &Valuation, family: &BundleFamily) -> Valuation {
    let cells = 1usize << valuation.good_count();
    let mut values = vec![rat(0); cells];
    for bundle in 0..cells as Bundle {
        let mut best = rat(0);
        for member in family.members() {
            if member & !bundle == 0 {
                let v = valuation.value(member);
                if *v > best {
                    best = v.clone();
                }
            }
        }
        values[bundle as usize] = best;
    }
    Valuation::new(valuation.good_count(), values).expect("projection preserves the invariants")
}

/// A valuation is based on the family iff it equals its own projection.
pub fn is_sigma_based(valuation: &Valuation, family: &BundleFamily) -> bool {
    bundle_strategy(valuation, family) == *valuation
}

/// Quasi field: contains the empty bundle and is closed under complement
/// and disjoint union.
pub fn is_quasi_field(family: &BundleFamily) -> bool {
    let full: Bundle = ((1usize << family.good_count()) - 1) as Bundle;
    for b in family.members() {
        if !family.contains(full & !b) {
            return false;
        }
        for c in family.members() {
            if b & c == 0 && !family.contains(b | c) {
                return false;
            }
        }
    }
    true
}

/// Bonus rule supporting the conformance argument: a buyer whose report is
/// based on the family is promised `2*bound + 1` whenever at least one
/// other buyer's report is not; nothing is paid when everyone conforms.
#[derive(Clone, Debug)]
pub struct ConformanceBonusRule {
    family: BundleFamily,
    bound: Rat,
}

impl ConformanceBonusRule {
    pub fn new(family: BundleFamily, bound: Rat) -> Result<Self, AuctionError> {
        if !is_quasi_field(&family) {
            return Err(AuctionError::NotQuasiField);
        }
        Ok(ConformanceBonusRule { family, bound })
    }

    pub fn bonus_amount(&self) -> Rat {
        rat(2) * &self.bound + rat(1)
    }

    pub fn bonuses(&self, reported: &[Valuation]) -> Vec<Rat> {
        let based: Vec<bool> = reported
            .iter()
            .map(|v| is_sigma_based(v, &self.family))
            .collect();
        (0..reported.len())
            .map(|i| {
                let someone_else_strays =
                    based.iter().enumerate().any(|(j, &ok)| j != i && !ok);
                if based[i] && someone_else_strays {
                    self.bonus_amount()
                } else {
                    rat(0)
                }
            })
            .collect()
    }
}

/// Harness for the frugality property: under a frugal mechanism and a
/// quasi-field family, reporting the projection of one's true valuation is
/// at least as good as any other family-based report, against any opponent
/// reports. Returns whether the inequality holds for the given data.
pub fn sigma_projection_beats(
    mechanism: &AuctionMechanism,
    family: &BundleFamily,
    buyer: usize,
    true_valuation: &Valuation,
    conforming_deviation: &Valuation,
    others: &[Valuation],
) -> Result<bool, AuctionError> {
    if !mechanism.is_frugal() {
        return Err(AuctionError::NotFrugal);
    }
    if !is_quasi_field(family) {
        return Err(AuctionError::NotQuasiField);
    }
    if !is_sigma_based(conforming_deviation, family) {
        return Err(AuctionError::NotSigmaBased);
    }
    let projected = bundle_strategy(true_valuation, family);
    let assemble = |own: &Valuation| -> Vec<Valuation> {
        let mut profile = Vec::with_capacity(others.len() + 1);
        let mut it = others.iter();
        for j in 0..=others.len() {
            if j == buyer {
                profile.push(own.clone());
            } else {
                profile.push(it.next().expect("others length").clone());
            }
        }
        profile
    };
    let truthful = mechanism.utility(&assemble(&projected), buyer, true_valuation)?;
    let deviating = mechanism.utility(&assemble(conforming_deviation), buyer, true_valuation)?;
    Ok(truthful >= deviating)
}

/// The worked four-good, two-buyer instance demonstrating that frugality is
/// needed: under the crafted non-frugal tie-break, buyer 1's projected
/// report earns 1 while another family-based report earns 1.1; rerunning
/// with frugal selection closes the gap.
#[derive(Clone, Debug)]
pub struct BundlingCheatFixture {
    pub good_labels: Vec<String>,
    pub mechanism: AuctionMechanism,
    pub family: BundleFamily,
    pub true_valuation: Valuation,
    pub opponent_report: Valuation,
    pub projected_report: Valuation,
    pub cheat_report: Valuation,
}

pub fn non_frugal_cheat_fixture() -> BundlingCheatFixture {
    let d = |text: &str| crate::rat::parse_rational(text).unwrap();
    let table = |row: [&str; 16]| -> Valuation {
        Valuation::new(4, row.iter().map(|t| d(t)).collect()).unwrap()
    };
    // Bundle order by mask: {}, a, b, ab, c, ac, bc, abc, d, ad, bd, abd,
    // cd, acd, bcd, abcd (a = bit 0, b = bit 1, c = bit 2, d = bit 3).
    let true_valuation = table([
        "0", "0", "0", "1", "0", "0", "0", "1.1", "0", "0", "0", "1", "0", "0", "0", "1.1",
    ]);
    let opponent_report = table([
        "0", "0", "0", "0", "0", "0", "0", "0", "0.75", "0.75", "0.75", "0.75", "0.75", "0.75",
        "0.75", "0.75",
    ]);
    let projected_report = table([
        "0", "0", "0", "1", "0", "0", "0", "1", "0", "0", "0", "1", "0", "0", "0", "1.1",
    ]);
    let cheat_report = table([
        "0", "0", "0", "1", "0", "0", "0", "1", "0", "0", "0", "1", "0.1", "0.1", "0.1", "1.1",
    ]);
    let family = BundleFamily::new(4, vec![0b0000, 0b0011, 0b1100, 0b1111]).unwrap();
    let ab_cd = Allocation::new(4, vec![0b0000, 0b0011, 0b1100]).unwrap();
    let abc_d = Allocation::new(4, vec![0b0000, 0b0111, 0b1000]).unwrap();
    let mechanism = AuctionMechanism::new(4, 2)
        .unwrap()
        .with_tie_break(TieBreak::ByReport(vec![
            (
                vec![projected_report.clone(), opponent_report.clone()],
                ab_cd,
            ),
            (vec![cheat_report.clone(), opponent_report.clone()], abc_d),
        ]));
    BundlingCheatFixture {
        good_labels: vec!["a".into(), "b".into(), "c".into(), "d".into()],
        mechanism,
        family,
        true_valuation,
        opponent_report,
        projected_report,
        cheat_report,
    }
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::rat::{parse_rational, ratio};
    use crate::testutil::rng;

    fn d(text: &str) -> Rat {
        parse_rational(text).unwrap()
    }

    fn single_good_pair(v1: i64, v2: i64) -> (AuctionMechanism, Vec<Valuation>) {
        let mech = AuctionMechanism::new(1, 2).unwrap();
        let reports = vec![
            Valuation::new(1, vec![rat(0), rat(v1)]).unwrap(),
            Valuation::new(1, vec![rat(0), rat(v2)]).unwrap(),
        ];
        (mech, reports)
    }

    #[test]
    fn valuation_invariants() {
        assert!(matches!(
            Valuation::new(1, vec![rat(1), rat(2)]),
            Err(AuctionError::InvalidValuation(_))
        ));
        assert!(matches!(
            Valuation::new(1, vec![rat(0), rat(-1)]),
            Err(AuctionError::InvalidValuation(_))
        ));
        // ab valued below a breaks monotonicity.
        assert!(matches!(
            Valuation::new(2, vec![rat(0), rat(5), rat(0), rat(4)]),
            Err(AuctionError::InvalidValuation(_))
        ));
        let entries = [(0b01u32, rat(2)), (0b10, rat(3))];
        let closed = Valuation::from_entries(2, &entries, CompletionMode::MonotoneClosure).unwrap();
        assert_eq!(closed.value(0b11), &rat(3));
        assert!(matches!(
            Valuation::from_entries(2, &entries, CompletionMode::ExplicitTotal),
            Err(AuctionError::InvalidValuation(_))
        ));
    }

    #[test]
    fn surplus_sums_buyer_values_only() {
        let fixture = non_frugal_cheat_fixture();
        let reports = vec![
            fixture.true_valuation.clone(),
            fixture.opponent_report.clone(),
        ];
        // ab to buyer 1, cd to buyer 2.
        let allocation = Allocation::new(4, vec![0, 0b0011, 0b1100]).unwrap();
        assert_eq!(surplus(&reports, &allocation), d("1.75"));
        // Everything to the seller is worth nothing.
        let to_seller = Allocation::new(4, vec![0b1111, 0, 0]).unwrap();
        assert_eq!(surplus(&reports, &to_seller), rat(0));
    }

    #[test]
    fn allocation_validation() {
        assert!(matches!(
            Allocation::new(2, vec![0b01, 0b01, 0b10]),
            Err(AuctionError::NotAPartition)
        ));
        assert!(matches!(
            Allocation::new(2, vec![0b00, 0b01, 0b00]),
            Err(AuctionError::NotAPartition)
        ));
    }

    #[test]
    fn optimal_allocation_enumeration() {
        let (_, reports) = single_good_pair(10, 7);
        let optimal = optimal_allocations(&reports, 1, DEFAULT_ALLOCATION_CAP).unwrap();
        assert_eq!(optimal.len(), 1);
        assert_eq!(optimal[0].buyer(0), 0b1);
        // All-zero reports make every allocation optimal: (n+1)^m of them.
        let zeros = vec![Valuation::zero(2), Valuation::zero(2)];
        assert_eq!(
            optimal_allocations(&zeros, 2, DEFAULT_ALLOCATION_CAP)
                .unwrap()
                .len(),
            9
        );
        assert!(matches!(
            optimal_allocations(&zeros, 2, 3),
            Err(AuctionError::CapExceeded { .. })
        ));
    }

    #[test]
    fn second_price_on_a_single_good() {
        let (mech, reports) = single_good_pair(10, 7);
        let chosen = mech.select_allocation(&reports).unwrap();
        assert_eq!(chosen.buyer(0), 0b1);
        assert_eq!(chosen.buyer(1), 0);
        assert_eq!(mech.vc_payment(&reports, 0).unwrap(), rat(7));
        assert_eq!(mech.vc_payment(&reports, 1).unwrap(), rat(0));
        // A lone buyer pays nothing.
        let lone = AuctionMechanism::new(1, 1).unwrap();
        let report = vec![Valuation::new(1, vec![rat(0), rat(10)]).unwrap()];
        assert_eq!(lone.vc_payment(&report, 0).unwrap(), rat(0));
    }

    #[test]
    fn frugal_selection_trims_valueless_goods() {
        // Sole bidder values a and ab identically: a frugal mechanism hands
        // out a alone.
        let mech = AuctionMechanism::new(2, 1).unwrap().frugal(true);
        let report = vec![Valuation::new(2, vec![rat(0), rat(5), rat(0), rat(5)]).unwrap()];
        let chosen = mech.select_allocation(&report).unwrap();
        assert_eq!(chosen.buyer(0), 0b01);
        assert_eq!(chosen.seller(), 0b10);
        // Strictly monotone reports are left untrimmed.
        let strict = vec![Valuation::new(2, vec![rat(0), rat(5), rat(1), rat(7)]).unwrap()];
        let chosen = mech.select_allocation(&strict).unwrap();
        assert_eq!(chosen.buyer(0), 0b11);
    }

    #[test]
    fn utilities_reproduce_the_cheat_gap_and_frugality_closes_it() {
        let fixture = non_frugal_cheat_fixture();
        let projected = vec![
            fixture.projected_report.clone(),
            fixture.opponent_report.clone(),
        ];
        let cheating = vec![fixture.cheat_report.clone(), fixture.opponent_report.clone()];

        let truthful_allocation = fixture.mechanism.select_allocation(&projected).unwrap();
        assert_eq!(truthful_allocation.buyer(0), 0b0011); // ab
        assert_eq!(truthful_allocation.buyer(1), 0b1100); // cd
        let cheat_allocation = fixture.mechanism.select_allocation(&cheating).unwrap();
        assert_eq!(cheat_allocation.buyer(0), 0b0111); // abc
        assert_eq!(cheat_allocation.buyer(1), 0b1000); // d

        // Buyer 1 pays nothing in both scenarios.
        assert_eq!(fixture.mechanism.vc_payment(&projected, 0).unwrap(), rat(0));
        assert_eq!(fixture.mechanism.vc_payment(&cheating, 0).unwrap(), rat(0));

        let truthful_utility = fixture
            .mechanism
            .utility(&projected, 0, &fixture.true_valuation)
            .unwrap();
        let cheat_utility = fixture
            .mechanism
            .utility(&cheating, 0, &fixture.true_valuation)
            .unwrap();
        assert_eq!(truthful_utility, rat(1));
        assert_eq!(cheat_utility, d("1.1"));

        // The chosen bundle abc has the equal-value strict sub-bundle ab, so
        // the crafted mechanism is not frugal.
        assert_eq!(
            fixture.cheat_report.value(0b0111),
            fixture.cheat_report.value(0b0011)
        );

        // Frugal rerun: the cheat advantage disappears.
        let frugal = fixture.mechanism.clone().frugal(true);
        let t = frugal.utility(&projected, 0, &fixture.true_valuation).unwrap();
        let c = frugal.utility(&cheating, 0, &fixture.true_valuation).unwrap();
        assert_eq!(t, rat(1));
        assert_eq!(c, rat(1));
        assert!(t >= c);
        assert!(sigma_projection_beats(
            &frugal,
            &fixture.family,
            0,
            &fixture.true_valuation,
            &fixture.cheat_report,
            &[fixture.opponent_report.clone()],
        )
        .unwrap());
        // Deviating to the projection itself is a tie, never a loss.
        assert!(sigma_projection_beats(
            &frugal,
            &fixture.family,
            0,
            &fixture.true_valuation,
            &fixture.projected_report,
            &[fixture.opponent_report.clone()],
        )
        .unwrap());
        // The harness requires a frugal mechanism.
        assert!(matches!(
            sigma_projection_beats(
                &fixture.mechanism,
                &fixture.family,
                0,
                &fixture.true_valuation,
                &fixture.cheat_report,
                &[fixture.opponent_report.clone()],
            ),
            Err(AuctionError::NotFrugal)
        ));
    }

    #[test]
    fn projection_matches_the_worked_rows() {
        let fixture = non_frugal_cheat_fixture();
        assert_eq!(
            bundle_strategy(&fixture.true_valuation, &fixture.family),
            fixture.projected_report
        );
        assert!(is_sigma_based(&fixture.projected_report, &fixture.family));
        assert!(is_sigma_based(&fixture.cheat_report, &fixture.family));
        assert!(!is_sigma_based(&fixture.true_valuation, &fixture.family));
        assert!(is_sigma_based(&Valuation::zero(4), &fixture.family));
        // Projecting through the full power set is the identity.
        let all = BundleFamily::new(4, (0..16).collect()).unwrap();
        assert_eq!(
            bundle_strategy(&fixture.true_valuation, &all),
            fixture.true_valuation
        );
        // Only the empty bundle: everything collapses to zero.
        let empty_only = BundleFamily::new(4, vec![0]).unwrap();
        assert_eq!(
            bundle_strategy(&fixture.true_valuation, &empty_only),
            Valuation::zero(4)
        );
    }

    #[test]
    fn projection_is_idempotent_and_dominated_by_the_truth() {
        let mut rng = rng(51);
        for _ in 0..30 {
            let v = random_valuation(&mut rng, 3);
            let family = random_quasi_field(&mut rng, 3);
            let projected = bundle_strategy(&v, &family);
            assert_eq!(bundle_strategy(&projected, &family), projected);
            for bundle in 0..8u32 {
                assert!(projected.value(bundle) <= v.value(bundle));
            }
            assert_eq!(projected.value(0), &rat(0));
        }
    }

    #[test]
    fn quasi_field_checks() {
        assert!(is_quasi_field(
            &BundleFamily::new(4, vec![0b0000, 0b1111]).unwrap()
        ));
        assert!(is_quasi_field(
            &BundleFamily::new(4, vec![0b0000, 0b0011, 0b1100, 0b1111]).unwrap()
        ));
        // Missing the complement of ab.
        assert!(!is_quasi_field(
            &BundleFamily::new(4, vec![0b0000, 0b0011, 0b1111]).unwrap()
        ));
        assert!(matches!(
            BundleFamily::new(2, vec![0b01]),
            Err(AuctionError::MissingEmptyBundle)
        ));
    }

    #[test]
    fn conformance_bonuses() {
        let fixture = non_frugal_cheat_fixture();
        let rule = ConformanceBonusRule::new(fixture.family.clone(), rat(2)).unwrap();
        assert_eq!(rule.bonus_amount(), rat(5));
        // Everyone conforming: no bonuses.
        let conforming = vec![
            fixture.projected_report.clone(),
            bundle_strategy(&fixture.opponent_report, &fixture.family),
        ];
        assert_eq!(rule.bonuses(&conforming), vec![rat(0), rat(0)]);
        // Buyer 2 strays: buyer 1 collects, buyer 2 does not.
        let one_strays = vec![
            fixture.projected_report.clone(),
            fixture.true_valuation.clone(),
        ];
        assert_eq!(rule.bonuses(&one_strays), vec![rat(5), rat(0)]);
        // Nobody conforms: nothing is paid.
        let both_stray = vec![fixture.true_valuation.clone(), fixture.true_valuation.clone()];
        assert_eq!(rule.bonuses(&both_stray), vec![rat(0), rat(0)]);
        // The rule refuses families that are not quasi fields.
        assert!(matches!(
            ConformanceBonusRule::new(
                BundleFamily::new(4, vec![0b0000, 0b0011, 0b1111]).unwrap(),
                rat(2)
            ),
            Err(AuctionError::NotQuasiField)
        ));
    }

    pub(crate) fn random_valuation(rng: &mut rand_chacha::ChaCha8Rng, goods: usize) -> Valuation {
        let cells = 1usize << goods;
        let entries: Vec<(Bundle, Rat)> = (0..cells as Bundle)
            .map(|b| (b, ratio(rng.random_range(0..=6), 2)))
            .collect();
        let mut fixed = entries;
        fixed[0].1 = rat(0);
        Valuation::from_entries(goods, &fixed, CompletionMode::MonotoneClosure).unwrap()
    }

    pub(crate) fn random_quasi_field(
        rng: &mut rand_chacha::ChaCha8Rng,
        goods: usize,
    ) -> BundleFamily {
        let full: Bundle = ((1usize << goods) - 1) as Bundle;
        let mut members: BTreeSet<Bundle> = BTreeSet::new();
        members.insert(0);
        for _ in 0..2 {
            members.insert(rng.random_range(0..=full));
        }
        // Close under complement and disjoint union.
        loop {
            let mut grew = false;
            let snapshot: Vec<Bundle> = members.iter().copied().collect();
            for &b in &snapshot {
                if members.insert(full & !b) {
                    grew = true;
                }
                for &c in &snapshot {
                    if b & c == 0 && members.insert(b | c) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let family = BundleFamily::new(goods, members.into_iter().collect()).unwrap();
        debug_assert!(is_quasi_field(&family));
        family
    }

    #[test]
    fn frugal_quasi_field_reports_never_beat_the_projection() {
        let mut rng = rng(52);
        for trial in 0..60 {
            let goods = 2 + (trial % 3);
            let buyers = 2 + (trial % 2);
            let mech = AuctionMechanism::new(goods, buyers).unwrap().frugal(true);
            let family = random_quasi_field(&mut rng, goods);
            let truth = random_valuation(&mut rng, goods);
            let deviation = bundle_strategy(&random_valuation(&mut rng, goods), &family);
            let others: Vec<Valuation> = (0..buyers - 1)
                .map(|_| random_valuation(&mut rng, goods))
                .collect();
            assert!(
                sigma_projection_beats(&mech, &family, 0, &truth, &deviation, &others).unwrap(),
                "goods {goods} buyers {buyers} trial {trial}"
            );
        }
    }

    #[test]
    fn truth_telling_dominates_on_a_small_grid() {
        // All monotone two-good valuations with values in {0, 1, 2}.
        let grid_vals: Vec<Valuation> = all_grid_valuations(2, &[rat(0), rat(1), rat(2)]);
        let mech = AuctionMechanism::new(2, 2).unwrap();
        for truth in &grid_vals {
            for other in &grid_vals {
                let honest = mech
                    .utility(&[truth.clone(), other.clone()], 0, truth)
                    .unwrap();
                for lie in &grid_vals {
                    let lied = mech
                        .utility(&[lie.clone(), other.clone()], 0, truth)
                        .unwrap();
                    assert!(honest >= lied);
                }
            }
        }
    }

    pub(crate) fn all_grid_valuations(goods: usize, grid: &[Rat]) -> Vec<Valuation> {
        let cells = 1usize << goods;
        let mut out = Vec::new();
        let mut stack = vec![vec![rat(0)]];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == cells {
                if let Ok(v) = Valuation::new(goods, prefix) {
                    out.push(v);
                }
                continue;
            }
            for value in grid {
                let mut next = prefix.clone();
                next.push(value.clone());
                stack.push(next);
            }
        }
        out.sort_by(|a, b| a.values().cmp(b.values()));
        out
    }
}
