//! Single-byte teleop protocol, wire table version 1.
//!
//! One byte is one command. There is no framing, checksum or acknowledgement;
//! unmapped bytes surface as [`DecodeEvent::Unknown`] and the stream carries on.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait::{Jog, LegId, Pair};

pub const WIRE_TABLE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Command {
    Forward,
    Backward,
    Left,
    Right,
    ForwardLeft,
    ForwardRight,
    BackwardLeft,
    BackwardRight,
    PairMove(Pair),
    LegJog(LegId, Jog),
    PrimeSetA,
    PrimeSetB,
    Stop,
}

const fn jog(leg: LegId, dir: Jog) -> Command {
    Command::LegJog(leg, dir)
}

/// Normative table: every command with its wire byte, in panel order.
pub const WIRE_TABLE: [(Command, u8); 26] = [
    (Command::Forward, b'F'),
    (Command::Backward, b'B'),
    (Command::Left, b'L'),
    (Command::Right, b'R'),
    (Command::ForwardLeft, b'G'),
    (Command::ForwardRight, b'H'),
    (Command::BackwardLeft, b'I'),
    (Command::BackwardRight, b'J'),
    (Command::PairMove(Pair::First), b'1'),
    (Command::PairMove(Pair::Second), b'2'),
    (Command::PairMove(Pair::Third), b'3'),
    (jog(LegId::LEFT_FRONT, Jog::Up), b'a'),
    (jog(LegId::LEFT_FRONT, Jog::Down), b'b'),
    (jog(LegId::LEFT_MIDDLE, Jog::Up), b'c'),
    (jog(LegId::LEFT_MIDDLE, Jog::Down), b'd'),
    (jog(LegId::LEFT_REAR, Jog::Up), b'e'),
    (jog(LegId::LEFT_REAR, Jog::Down), b'f'),
    (jog(LegId::RIGHT_FRONT, Jog::Up), b'g'),
    (jog(LegId::RIGHT_FRONT, Jog::Down), b'h'),
    (jog(LegId::RIGHT_MIDDLE, Jog::Up), b'i'),
    (jog(LegId::RIGHT_MIDDLE, Jog::Down), b'j'),
    (jog(LegId::RIGHT_REAR, Jog::Up), b'k'),
    (jog(LegId::RIGHT_REAR, Jog::Down), b'l'),
    (Command::PrimeSetA, b'P'),
    (Command::PrimeSetB, b'Q'),
    (Command::Stop, b'S'),
];

impl Command {
    pub const ALL: [Command; 26] = {
        let mut out = [Command::Stop; 26];
        let mut i = 0;
        while i < 26 {
            out[i] = WIRE_TABLE[i].0;
            i += 1;
        }
        out
    };

    pub fn encode(self) -> u8 {
        match self {
            Command::Forward => b'F',
            Command::Backward => b'B',
            Command::Left => b'L',
            Command::Right => b'R',
            Command::ForwardLeft => b'G',
            Command::ForwardRight => b'H',
            Command::BackwardLeft => b'I',
            Command::BackwardRight => b'J',
            Command::PairMove(p) => b'0' + p.number(),
            Command::LegJog(leg, dir) => {
                let slot = 2 * leg.index() as u8
                    + match dir {
                        Jog::Up => 0,
                        Jog::Down => 1,
                    };
                b'a' + slot
            }
            Command::PrimeSetA => b'P',
            Command::PrimeSetB => b'Q',
            Command::Stop => b'S',
        }
    }

    pub fn decode(byte: u8) -> Result<Command, UnknownByte> {
        let cmd = match byte {
            b'F' => Command::Forward,
            b'B' => Command::Backward,
            b'L' => Command::Left,
            b'R' => Command::Right,
            b'G' => Command::ForwardLeft,
            b'H' => Command::ForwardRight,
            b'I' => Command::BackwardLeft,
            b'J' => Command::BackwardRight,
            b'1' => Command::PairMove(Pair::First),
            b'2' => Command::PairMove(Pair::Second),
            b'3' => Command::PairMove(Pair::Third),
            b'a'..=b'l' => {
                let slot = (byte - b'a') as usize;
                let dir = if slot.is_multiple_of(2) {
                    Jog::Up
                } else {
                    Jog::Down
                };
                Command::LegJog(LegId::ALL[slot / 2], dir)
            }
            b'P' => Command::PrimeSetA,
            b'Q' => Command::PrimeSetB,
            b'S' => Command::Stop,
            other => return Err(UnknownByte(other)),
        };
        Ok(cmd)
    }

    /// Human-readable name used by the protocol table listing.
    pub fn name(self) -> String {
        match self {
            Command::PairMove(p) => format!("PairMove({})", p.number()),
            Command::LegJog(leg, dir) => format!("LegJog({}, {:?})", leg.code(), dir),
            other => format!("{other:?}"),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("unknown command byte 0x{0:02x}")]
pub struct UnknownByte(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeEvent {
    Command(Command),
    Unknown(u8),
}

impl From<u8> for DecodeEvent {
    fn from(byte: u8) -> Self {
        match Command::decode(byte) {
            Ok(c) => DecodeEvent::Command(c),
            Err(UnknownByte(b)) => DecodeEvent::Unknown(b),
        }
    }
}

/// One event per input byte, in order.
pub fn decode_stream(bytes: &[u8]) -> impl Iterator<Item = DecodeEvent> + '_ {
    bytes.iter().copied().map(DecodeEvent::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_encode() {
        for (cmd, byte) in WIRE_TABLE {
            assert_eq!(cmd.encode(), byte, "{cmd}");
            assert_eq!(Command::decode(byte), Ok(cmd));
        }
    }

    #[test]
    fn known_letters() {
        assert_eq!(Command::Forward.encode(), b'F');
        assert_eq!(Command::Stop.encode(), b'S');
        assert_eq!(Command::decode(b'F'), Ok(Command::Forward));
        assert_eq!(Command::decode(0x00), Err(UnknownByte(0)));
        assert_eq!(
            Command::decode(b'l'),
            Ok(Command::LegJog(LegId::RIGHT_REAR, Jog::Down))
        );
    }

    #[test]
    fn stream_basics() {
        let ev: Vec<_> = decode_stream(b"FFS").collect();
        assert_eq!(
            ev,
            vec![
                DecodeEvent::Command(Command::Forward),
                DecodeEvent::Command(Command::Forward),
                DecodeEvent::Command(Command::Stop)
            ]
        );
        assert_eq!(decode_stream(b"").count(), 0);
    }
}
