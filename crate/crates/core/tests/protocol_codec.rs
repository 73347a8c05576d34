use std::collections::HashSet;

use hexsim_core::protocol::{decode_stream, UnknownByte, WIRE_TABLE};
use hexsim_core::{Command, DecodeEvent};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn encode_is_a_bijection_onto_printable_bytes() {
    let bytes: HashSet<u8> = Command::ALL.iter().map(|c| c.encode()).collect();
    assert_eq!(bytes.len(), 26);
    assert!(bytes.iter().all(|b| b.is_ascii_alphanumeric()));
    for c in Command::ALL {
        assert_eq!(Command::decode(c.encode()), Ok(c));
    }
    let distinct: HashSet<Command> = Command::ALL.into_iter().collect();
    assert_eq!(distinct.len(), 26);
}

#[test]
fn decode_is_total_over_all_bytes() {
    let table: std::collections::HashMap<u8, Command> =
        WIRE_TABLE.iter().map(|&(c, b)| (b, c)).collect();
    let mut mapped = 0;
    for b in 0..=255u8 {
        match Command::decode(b) {
            Ok(c) => {
                mapped += 1;
                assert_eq!(table.get(&b), Some(&c));
                assert_eq!(c.encode(), b);
            }
            Err(UnknownByte(x)) => {
                assert_eq!(x, b);
                assert!(!table.contains_key(&b));
            }
        }
    }
    assert_eq!(mapped, 26);
}

#[test]
fn random_stream_against_table_oracle() {
    let table: std::collections::HashMap<u8, Command> =
        WIRE_TABLE.iter().map(|&(c, b)| (b, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let bytes: Vec<u8> = (0..10_000).map(|_| rng.random()).collect();
    let events: Vec<DecodeEvent> = decode_stream(&bytes).collect();
    assert_eq!(events.len(), bytes.len());
    for (b, e) in bytes.iter().zip(&events) {
        match table.get(b) {
            Some(c) => assert_eq!(*e, DecodeEvent::Command(*c)),
            None => assert_eq!(*e, DecodeEvent::Unknown(*b)),
        }
    }
}

proptest! {
    #[test]
    fn stream_decoding_commutes_with_concatenation(
        a in prop::collection::vec(any::<u8>(), 0..64),
        b in prop::collection::vec(any::<u8>(), 0..64),
    ) {
        let whole: Vec<u8> = a.iter().chain(&b).copied().collect();
        let joined: Vec<DecodeEvent> = decode_stream(&a).chain(decode_stream(&b)).collect();
        prop_assert_eq!(decode_stream(&whole).collect::<Vec<_>>(), joined);
    }
}
