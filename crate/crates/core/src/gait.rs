//! Tripod gait coordination.
//!
//! Every leg is a velocity-controlled crank, so the gait state is just a phase
//! and a signed angular velocity per leg. Commands rewrite the velocities (and,
//! for the coordinated gaits, snap the two tripods into their phase relation);
//! [`GaitState::advance`] integrates them.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::LiftProfile;
use crate::protocol::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rank {
    Front,
    Middle,
    Rear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LegId {
    pub side: Side,
    pub rank: Rank,
}

impl LegId {
    pub const LEFT_FRONT: LegId = LegId::new(Side::Left, Rank::Front);
    pub const LEFT_MIDDLE: LegId = LegId::new(Side::Left, Rank::Middle);
    pub const LEFT_REAR: LegId = LegId::new(Side::Left, Rank::Rear);
    pub const RIGHT_FRONT: LegId = LegId::new(Side::Right, Rank::Front);
    pub const RIGHT_MIDDLE: LegId = LegId::new(Side::Right, Rank::Middle);
    pub const RIGHT_REAR: LegId = LegId::new(Side::Right, Rank::Rear);

    /// All legs in index order.
    pub const ALL: [LegId; 6] = [
        Self::LEFT_FRONT,
        Self::LEFT_MIDDLE,
        Self::LEFT_REAR,
        Self::RIGHT_FRONT,
        Self::RIGHT_MIDDLE,
        Self::RIGHT_REAR,
    ];

    pub const fn new(side: Side, rank: Rank) -> Self {
        Self { side, rank }
    }

    pub const fn index(self) -> usize {
        let s = match self.side {
            Side::Left => 0,
            Side::Right => 3,
        };
        let r = match self.rank {
            Rank::Front => 0,
            Rank::Middle => 1,
            Rank::Rear => 2,
        };
        s + r
    }

    pub fn code(self) -> &'static str {
        ["LF", "LM", "LR", "RF", "RM", "RR"][self.index()]
    }
}

impl fmt::Display for LegId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Bit set over the six legs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LegSet(u8);

impl LegSet {
    pub const EMPTY: LegSet = LegSet(0);
    pub const ALL: LegSet = LegSet(0b11_1111);

    pub fn from_legs(legs: impl IntoIterator<Item = LegId>) -> Self {
        let mut s = Self::EMPTY;
        for l in legs {
            s.insert(l);
        }
        s
    }

    pub fn insert(&mut self, leg: LegId) {
        self.0 |= 1 << leg.index();
    }

    pub fn contains(self, leg: LegId) -> bool {
        self.0 & (1 << leg.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> Self {
        LegSet(!self.0 & Self::ALL.0)
    }

    pub fn iter(self) -> impl Iterator<Item = LegId> {
        LegId::ALL.into_iter().filter(move |l| self.contains(*l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TripodSet {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WalkDirection {
    Forward,
    Backward,
    ForwardLeft,
    ForwardRight,
    BackwardLeft,
    BackwardRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TurnDirection {
    Left,
    Right,
}

/// Leg pairs as numbered on the control panel: 1 front, 2 middle, 3 rear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    First,
    Second,
    Third,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::First, Pair::Second, Pair::Third];

    pub fn rank(self) -> Rank {
        match self {
            Pair::First => Rank::Front,
            Pair::Second => Rank::Middle,
            Pair::Third => Rank::Rear,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Pair::First => 1,
            Pair::Second => 2,
            Pair::Third => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Jog {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GaitMode {
    Idle,
    Walking(WalkDirection),
    Turning(TurnDirection),
    PairJog(Pair),
    LegJog(LegId, Jog),
    Priming(TripodSet),
}

impl fmt::Display for GaitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaitMode::Idle => f.write_str("idle"),
            GaitMode::Walking(d) => write!(f, "walking:{}", format!("{d:?}").to_lowercase()),
            GaitMode::Turning(d) => write!(f, "turning:{}", format!("{d:?}").to_lowercase()),
            GaitMode::PairJog(p) => write!(f, "pair:{}", p.number()),
            GaitMode::LegJog(l, j) => write!(f, "jog:{l}:{}", format!("{j:?}").to_lowercase()),
            GaitMode::Priming(s) => write!(f, "priming:{s:?}"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GaitConfigError {
    #[error("tripod set must hold one leg of each rank on alternating sides")]
    NotTriangular,
    #[error("phase offset {0} deg must lie strictly between 0 and 360")]
    PhaseOffset(f64),
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("turn speed ratio {0} must lie in [0, 1]")]
    TurnRatio(f64),
}

/// Priming stops this close (time-units) to the reference phase.
pub const PRIMING_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GaitConfig {
    pub set_a: [LegId; 3],
    /// Lag of tripod B behind tripod A, in degrees of the gait cycle.
    pub phase_offset: f64,
    /// Crank speed in rad per time-unit.
    pub base_angular_speed: f64,
    /// Speed fraction of the inner side in diagonal gaits.
    pub turn_speed_ratio: f64,
    period: f64,
    stance_center: f64,
}

impl GaitConfig {
    pub fn new(profile: &LiftProfile) -> Self {
        Self {
            set_a: [LegId::LEFT_FRONT, LegId::RIGHT_MIDDLE, LegId::LEFT_REAR],
            phase_offset: 90.0,
            base_angular_speed: TAU / profile.period(),
            turn_speed_ratio: 0.4,
            period: profile.period(),
            stance_center: profile.stance_center(),
        }
    }

    pub fn validate(&self) -> Result<(), GaitConfigError> {
        let ranks: Vec<Rank> = {
            let mut r: Vec<Rank> = self.set_a.iter().map(|l| l.rank).collect();
            r.sort();
            r
        };
        let by_rank = |rank: Rank| self.set_a.iter().find(|l| l.rank == rank).map(|l| l.side);
        let triangular = ranks == [Rank::Front, Rank::Middle, Rank::Rear]
            && by_rank(Rank::Front) == by_rank(Rank::Rear)
            && by_rank(Rank::Front) != by_rank(Rank::Middle);
        if !triangular {
            return Err(GaitConfigError::NotTriangular);
        }
        if !(self.phase_offset > 0.0 && self.phase_offset < 360.0) {
            return Err(GaitConfigError::PhaseOffset(self.phase_offset));
        }
        if !(self.base_angular_speed.is_finite() && self.base_angular_speed > 0.0) {
            return Err(GaitConfigError::NonPositive("base_angular_speed"));
        }
        if !(0.0..=1.0).contains(&self.turn_speed_ratio) {
            return Err(GaitConfigError::TurnRatio(self.turn_speed_ratio));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn set_a(&self) -> LegSet {
        LegSet::from_legs(self.set_a)
    }

    pub fn set_b(&self) -> LegSet {
        self.set_a().complement()
    }

    pub fn set(&self, set: TripodSet) -> LegSet {
        match set {
            TripodSet::A => self.set_a(),
            TripodSet::B => self.set_b(),
        }
    }

    /// Inter-tripod phase gap in time-units.
    pub fn gap(&self) -> f64 {
        self.phase_offset / 360.0 * self.period
    }

    /// Phase a primed tripod rests at: tripod A at the stance centre, tripod B
    /// lagging it by the gait gap, i.e. the walking arrangement.
    pub fn prime_reference(&self, set: TripodSet) -> f64 {
        match set {
            TripodSet::A => wrap(self.stance_center, self.period),
            TripodSet::B => wrap(self.stance_center - self.gap(), self.period),
        }
    }

    fn phase_rate(&self, angular_velocity: f64) -> f64 {
        angular_velocity * self.period / TAU
    }
}

pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let w = x.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

/// Signed shortest difference `b - a` on the phase circle.
pub fn phase_delta(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap(b - a, period);
    if d > period / 2.0 {
        d - period
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitState {
    /// Per-leg phase in time-units, indexed by [`LegId::index`].
    pub phases: [f64; 6],
    /// Per-leg crank velocity in rad per time-unit; positive drives forward.
    pub velocities: [f64; 6],
    pub mode: GaitMode,
}

impl GaitState {
    /// All six feet at the bottom of the stance arc, idle.
    pub fn neutral(cfg: &GaitConfig) -> Self {
        Self {
            phases: [wrap(cfg.stance_center, cfg.period); 6],
            velocities: [0.0; 6],
            mode: GaitMode::Idle,
        }
    }

    pub fn phase(&self, leg: LegId) -> f64 {
        self.phases[leg.index()]
    }

    pub fn velocity(&self, leg: LegId) -> f64 {
        self.velocities[leg.index()]
    }

    /// Phases with tripod A at the anchor leg's phase and tripod B lagging by the gap.
    fn aligned_phases(&self, cfg: &GaitConfig) -> [f64; 6] {
        let anchor = self.phases[cfg.set_a[0].index()];
        let a = cfg.set_a();
        let lagged = wrap(anchor - cfg.gap(), cfg.period);
        let mut out = [0.0; 6];
        for leg in LegId::ALL {
            out[leg.index()] = if a.contains(leg) { anchor } else { lagged };
        }
        out
    }

    /// New state after a command; a command always replaces the current mode.
    pub fn apply_command(&self, cfg: &GaitConfig, cmd: Command) -> GaitState {
        let base = cfg.base_angular_speed;
        let per_leg = |f: &dyn Fn(LegId) -> f64| {
            let mut v = [0.0; 6];
            for leg in LegId::ALL {
                v[leg.index()] = f(leg);
            }
            v
        };
        let coordinated = |mode: GaitMode, v: [f64; 6]| GaitState {
            phases: self.aligned_phases(cfg),
            velocities: v,
            mode,
        };
        let walk = |dir: WalkDirection| {
            let (sign, inner) = match dir {
                WalkDirection::Forward => (1.0, None),
                WalkDirection::Backward => (-1.0, None),
                WalkDirection::ForwardLeft => (1.0, Some(Side::Left)),
                WalkDirection::ForwardRight => (1.0, Some(Side::Right)),
                WalkDirection::BackwardLeft => (-1.0, Some(Side::Left)),
                WalkDirection::BackwardRight => (-1.0, Some(Side::Right)),
            };
            let v = per_leg(&|leg| {
                let scale = if Some(leg.side) == inner {
                    cfg.turn_speed_ratio
                } else {
                    1.0
                };
                sign * base * scale
            });
            coordinated(GaitMode::Walking(dir), v)
        };
        let turn = |dir: TurnDirection| {
            let turning_side = match dir {
                TurnDirection::Left => Side::Left,
                TurnDirection::Right => Side::Right,
            };
            let v = per_leg(&|leg| {
                if leg.side == turning_side {
                    -base
                } else {
                    base
                }
            });
            coordinated(GaitMode::Turning(dir), v)
        };
        let only = |mode: GaitMode, f: &dyn Fn(LegId) -> f64| GaitState {
            phases: self.phases,
            velocities: per_leg(f),
            mode,
        };

        match cmd {
            Command::Stop => only(GaitMode::Idle, &|_| 0.0),
            Command::Forward => walk(WalkDirection::Forward),
            Command::Backward => walk(WalkDirection::Backward),
            Command::ForwardLeft => walk(WalkDirection::ForwardLeft),
            Command::ForwardRight => walk(WalkDirection::ForwardRight),
            Command::BackwardLeft => walk(WalkDirection::BackwardLeft),
            Command::BackwardRight => walk(WalkDirection::BackwardRight),
            Command::Left => turn(TurnDirection::Left),
            Command::Right => turn(TurnDirection::Right),
            Command::PairMove(p) => only(GaitMode::PairJog(p), &|leg| {
                if leg.rank == p.rank() {
                    base
                } else {
                    0.0
                }
            }),
            Command::LegJog(target, jog) => only(GaitMode::LegJog(target, jog), &|leg| match (
                leg == target,
                jog,
            ) {
                (true, Jog::Up) => base,
                (true, Jog::Down) => -base,
                (false, _) => 0.0,
            }),
            Command::PrimeSetA | Command::PrimeSetB => {
                let set = if cmd == Command::PrimeSetA {
                    TripodSet::A
                } else {
                    TripodSet::B
                };
                let members = cfg.set(set);
                let reference = cfg.prime_reference(set);
                let next = only(GaitMode::Priming(set), &|leg| {
                    let off = phase_delta(self.phase(leg), reference, cfg.period).abs();
                    if members.contains(leg) && off > PRIMING_TOLERANCE {
                        base
                    } else {
                        0.0
                    }
                });
                if next.velocities.iter().all(|v| *v == 0.0) {
                    GaitState {
                        mode: GaitMode::Idle,
                        ..next
                    }
                } else {
                    next
                }
            }
        }
    }

    /// Integrates the crank velocities over `dt` time-units.
    pub fn advance(&self, cfg: &GaitConfig, dt: f64) -> GaitState {
        if dt <= 0.0 {
            return self.clone();
        }
        let mut next = self.clone();
        let priming = match self.mode {
            GaitMode::Priming(set) => Some((cfg.set(set), cfg.prime_reference(set))),
            _ => None,
        };
        for leg in LegId::ALL {
            let i = leg.index();
            let step = cfg.phase_rate(self.velocities[i]) * dt;
            if let Some((members, reference)) = priming {
                if members.contains(leg) && self.velocities[i] != 0.0 {
                    let remaining = wrap(reference - self.phases[i], cfg.period);
                    if remaining <= step.abs() + PRIMING_TOLERANCE {
                        next.phases[i] = reference;
                        next.velocities[i] = 0.0;
                        continue;
                    }
                }
            }
            next.phases[i] = wrap(self.phases[i] + step, cfg.period);
        }
        if let Some((members, _)) = priming {
            if members.iter().all(|l| next.velocities[l.index()] == 0.0) {
                next.mode = GaitMode::Idle;
                next.velocities = [0.0; 6];
            }
        }
        next
    }

    /// Legs whose foot is at or below the contact threshold.
    pub fn stance_set(&self, profile: &LiftProfile) -> LegSet {
        LegSet::from_legs(
            LegId::ALL
                .into_iter()
                .filter(|l| profile.is_contact(self.phases[l.index()])),
        )
    }
}
