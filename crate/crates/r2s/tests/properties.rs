//! Property tests for the cryptographic and serialization invariants.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use r2s::block::{block_difficulty, difficulty_target, genesis_previous_hash, Block};
use r2s::consensus::{seal_block_pow, PowOptions};
use r2s::crypto::{
    self, keypair_from_seed, make_self_signed_certificate_with_rng, sign, verify, Certificate,
    Digest, Signature,
};

fn seeded_cert(key_seed: [u8; 32], subject: &str, rng_seed: u64) -> Certificate {
    let keys = keypair_from_seed(key_seed);
    let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
    make_self_signed_certificate_with_rng(&keys, subject, &mut rng)
}

proptest! {
    #[test]
    fn signatures_round_trip(seed in any::<[u8; 32]>(), message in prop::collection::vec(any::<u8>(), 0..512)) {
        let keys = keypair_from_seed(seed);
        let sig = sign(&keys, &message);
        prop_assert!(verify(&keys.public_key(), &message, &sig));
    }

    #[test]
    fn any_single_byte_flip_breaks_a_signature(
        seed in any::<[u8; 32]>(),
        message in prop::collection::vec(any::<u8>(), 1..256),
        flip_message: bool,
        flip_at in any::<prop::sample::Index>(),
        flip_bit in 0u8..8,
    ) {
        let keys = keypair_from_seed(seed);
        let sig = sign(&keys, &message);

        if flip_message {
            let mut tampered = message.clone();
            let i = flip_at.index(tampered.len());
            tampered[i] ^= 1 << flip_bit;
            prop_assert!(!verify(&keys.public_key(), &tampered, &sig));
        } else {
            let mut bytes = sig.bytes().to_vec();
            let i = flip_at.index(bytes.len());
            bytes[i] ^= 1 << flip_bit;
            let tampered = Signature::new(bytes, sig.scheme_id().to_string());
            prop_assert!(!verify(&keys.public_key(), &message, &tampered));
        }
    }

    #[test]
    fn certificate_encoding_is_injective(
        seed_a in any::<[u8; 32]>(),
        seed_b in any::<[u8; 32]>(),
        subject_a in "[a-z0-9-]{1,24}",
        subject_b in "[a-z0-9-]{1,24}",
        rng_a in any::<u64>(),
        rng_b in any::<u64>(),
    ) {
        let a = seeded_cert(seed_a, &subject_a, rng_a);
        let b = seeded_cert(seed_b, &subject_b, rng_b);
        if a != b {
            prop_assert_ne!(a.canonical_bytes(), b.canonical_bytes());
            prop_assert_ne!(a.fingerprint(), b.fingerprint());
        } else {
            prop_assert_eq!(a.canonical_bytes(), b.canonical_bytes());
        }
    }

    #[test]
    fn certificate_bytes_round_trip(seed in any::<[u8; 32]>(), subject in "[ -~]{1,32}", rng_seed in any::<u64>()) {
        let cert = seeded_cert(seed, &subject, rng_seed);
        let decoded = Certificate::from_canonical_bytes(&cert.canonical_bytes()).unwrap();
        prop_assert_eq!(&decoded, &cert);
        prop_assert_eq!(decoded.canonical_bytes(), cert.canonical_bytes());
    }

    #[test]
    fn mutated_certificate_bytes_never_verify_as_the_original(
        seed in any::<[u8; 32]>(),
        rng_seed in any::<u64>(),
        flip_at in any::<prop::sample::Index>(),
        flip_bit in 0u8..8,
    ) {
        let cert = seeded_cert(seed, "node", rng_seed);
        let mut raw = cert.canonical_bytes();
        let i = flip_at.index(raw.len());
        raw[i] ^= 1 << flip_bit;
        match Certificate::from_canonical_bytes(&raw) {
            // Structural damage: rejected outright.
            Err(_) => {}
            Ok(mutated) => {
                // Content changed, so either the self-signature breaks or the
                // fingerprint moves; both make the original identity unusable.
                prop_assert_ne!(&mutated, &cert);
                prop_assert_ne!(mutated.fingerprint(), cert.fingerprint());
            }
        }
    }

    #[test]
    fn digest_hex_round_trips(bytes in any::<[u8; 32]>()) {
        let d = Digest::from_bytes(bytes);
        prop_assert_eq!(Digest::from_hex(&d.to_hex()).unwrap(), d);
    }

    #[test]
    fn difficulty_is_antitone_in_the_hash_value(a in any::<[u8; 32]>(), b in any::<[u8; 32]>()) {
        let (da, db) = (Digest::from_bytes(a), Digest::from_bytes(b));
        let (va, vb) = (BigUint::from_bytes_be(&a), BigUint::from_bytes_be(&b));
        if va <= vb {
            prop_assert!(block_difficulty(&da) >= block_difficulty(&db));
        } else {
            prop_assert!(block_difficulty(&da) <= block_difficulty(&db));
        }
    }

    #[test]
    fn target_test_equals_metric_test(h in any::<[u8; 32]>(), d in 1u64..=u64::MAX) {
        let digest = Digest::from_bytes(h);
        let d = BigUint::from(d);
        let by_metric = block_difficulty(&digest) >= d;
        let by_target = BigUint::from_bytes_be(&h) < difficulty_target(&d);
        prop_assert_eq!(by_metric, by_target);
    }
}

proptest! {
    // Sealing mines a key pair per case; keep the case count moderate.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_wire_form_round_trips_byte_identically(
        payload in prop::collection::vec(any::<u8>(), 0..512),
        block_number in 0u64..1_000_000,
        seed in any::<u64>(),
    ) {
        let outcome = seal_block_pow(
            "prop-miner",
            &BigUint::from(1u32),
            block_number,
            &genesis_previous_hash(),
            &payload,
            &PowOptions { seed: Some(seed), ..PowOptions::default() },
        ).unwrap();

        let line = outcome.block.to_wire_json();
        let parsed = Block::from_wire_json(line.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &outcome.block);
        prop_assert_eq!(parsed.to_wire_json(), line);
    }

    #[test]
    fn block_hash_commits_to_the_payload(
        payload in prop::collection::vec(any::<u8>(), 1..256),
        seed in any::<u64>(),
        flip_at in any::<prop::sample::Index>(),
    ) {
        let outcome = seal_block_pow(
            "prop-miner",
            &BigUint::from(1u32),
            0,
            &genesis_previous_hash(),
            &payload,
            &PowOptions { seed: Some(seed), ..PowOptions::default() },
        ).unwrap();

        let mut tampered = payload.clone();
        let i = flip_at.index(tampered.len());
        tampered[i] ^= 0x01;
        prop_assert_ne!(crypto::hash(&tampered), outcome.block.header.payload_digest);
    }
}
