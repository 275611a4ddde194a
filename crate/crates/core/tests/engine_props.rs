use kdp::engine::{
    measure, run_initialization, run_trial, AdversaryMode, AdversaryPolicy, Outcome, PayloadKind, PdcMessage, Role,
    SimLayout,
};
use kdp::planner::plan;
use kdp::{BitString, ChannelParams, ProtocolKind, Requirements};
use proptest::prelude::*;

fn toy_channel() -> ChannelParams {
    ChannelParams::new(0.002, 0.49).unwrap()
}

fn toy_req() -> Requirements {
    Requirements::new(1, 1.0, 0.1, 0.05, 0.1, 0.25).unwrap()
}

fn layout(kind: ProtocolKind, ch: ChannelParams, seed: u64) -> SimLayout {
    let req = toy_req();
    let p = plan(kind, ch, &req).unwrap();
    SimLayout::from_plan(&p, ch, &req, seed).unwrap()
}

#[test]
fn trials_are_deterministic() {
    let l = layout(ProtocolKind::BetaExt, toy_channel(), 5);
    for mode in AdversaryMode::ALL {
        let a = run_trial(&l, AdversaryPolicy::new(mode), 11, 3).unwrap();
        let b = run_trial(&l, AdversaryPolicy::new(mode), 11, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.transcript_text(), b.transcript_text());
    }
    let again = layout(ProtocolKind::BetaExt, toy_channel(), 5);
    let m1 = measure(&l, AdversaryPolicy::passive(), 50, 9).unwrap();
    let m2 = measure(&again, AdversaryPolicy::passive(), 50, 9).unwrap();
    assert_eq!(m1, m2);
}

#[test]
fn beta_ext_seed_is_never_sent() {
    let l = layout(ProtocolKind::BetaExt, toy_channel(), 2);
    let stage = &l.stages[0];
    assert_eq!(stage.sent_material, 0);
    assert!(stage.k3 > 0);
    for t in 0..200 {
        let trial = run_trial(&l, AdversaryPolicy::passive(), 4, t).unwrap();
        let seed = &trial.material_a[0];
        assert_eq!(seed.len(), stage.k3);
        for r in &trial.transcript {
            let bits = &r.message.bits;
            if r.message.kind == PayloadKind::Message {
                assert_eq!(bits.len(), stage.rec1.check_len() + stage.rec3.check_len());
            }
            if bits.len() >= seed.len() {
                let found = (0..=bits.len() - seed.len()).any(|i| bits.slice(i, seed.len()) == *seed);
                assert!(!found, "seed appears in a public message at trial {t}");
            }
        }
    }
}

#[test]
fn alpha_ext_seed_is_public() {
    let l = layout(ProtocolKind::AlphaExt, toy_channel(), 2);
    let stage = &l.stages[0];
    assert!(stage.sent_material > 0);
    let trial = run_trial(&l, AdversaryPolicy::passive(), 4, 0).unwrap();
    let msg = trial.transcript.iter().find(|r| r.message.kind == PayloadKind::Message).unwrap();
    let r1 = stage.rec1.check_len();
    assert_eq!(msg.message.bits.slice(r1, stage.sent_material), trial.material_a[0]);
}

#[test]
fn break_off_is_never_deceived() {
    for kind in ProtocolKind::ALL {
        let l = layout(kind, toy_channel(), 1);
        for t in 0..100 {
            let trial = run_trial(&l, AdversaryPolicy::new(AdversaryMode::BreakOff), 8, t).unwrap();
            assert_eq!(trial.outcome, Outcome::Rejected, "{kind}");
            assert!(trial.transcript.iter().all(|r| r.dropped && !r.accepted));
        }
    }
}

#[test]
fn noiseless_main_channel_keys_agree() {
    let ch = ChannelParams::new(0.0, 0.49).unwrap();
    for kind in ProtocolKind::ALL {
        let l = layout(kind, ch, 3);
        for t in 0..100 {
            match run_trial(&l, AdversaryPolicy::passive(), 21, t).unwrap().outcome {
                Outcome::Keys { k_a, k_b } => {
                    assert_eq!(k_a, k_b, "{kind}");
                    assert_eq!(k_a.len(), l.key_len());
                }
                other => panic!("{kind}: passive run ended with {other:?}"),
            }
        }
    }
}

#[test]
fn passive_runs_are_never_tampered() {
    let l = layout(ProtocolKind::BetaThenAlphaPrimeExt, toy_channel(), 6);
    for t in 0..100 {
        let trial = run_trial(&l, AdversaryPolicy::passive(), 2, t).unwrap();
        assert!(trial.transcript.iter().all(|r| !r.message.tampered && r.message.origin == Role::A));
        assert!(!matches!(trial.outcome, Outcome::Deceived { .. }));
    }
}

#[test]
fn safety_and_completeness() {
    let req = toy_req();
    for kind in [ProtocolKind::Alpha, ProtocolKind::BetaExt, ProtocolKind::AlphaPrimeExt, ProtocolKind::AlphaThenBetaPrimeExt] {
        let l = layout(kind, toy_channel(), 7);
        let b = l.bounds();
        let passive = measure(&l, AdversaryPolicy::passive(), 2000, 13).unwrap();
        assert!(passive.acceptance.rate >= 1.0 - req.p_f_adm - 3.0 * passive.acceptance.half_width(), "{kind}: {passive:?}");
        assert!(passive.p_e.within(b.pe), "{kind}: {passive:?}");
        assert_eq!(passive.p_d.count, 0);
        for mode in [AdversaryMode::SubstituteRandom, AdversaryMode::SubstituteNearestCodeword, AdversaryMode::Impersonate] {
            let m = measure(&l, AdversaryPolicy::new(mode), 2000, 13).unwrap();
            assert!(m.p_d.within(b.pd), "{kind} {mode}: {m:?}");
        }
    }
}

#[test]
fn initialization_marginals() {
    let raw = run_initialization(3, 0.0, 0.05, 0.2, 40_000).unwrap();
    let ab = raw.x.hamming(&raw.y) as f64 / 40_000.0;
    let ae = raw.x.hamming(&raw.z) as f64 / 40_000.0;
    assert!((ab - 0.05).abs() < 0.006, "{ab}");
    assert!((ae - 0.2).abs() < 0.01, "{ae}");
}

fn arb_message() -> impl Strategy<Value = PdcMessage> {
    (
        0u32..50,
        prop_oneof![Just(Role::A), Just(Role::E)],
        prop_oneof![Just(PayloadKind::Message), Just(PayloadKind::Authenticator), Just(PayloadKind::Tag)],
        proptest::collection::vec(any::<bool>(), 0..80),
        proptest::collection::btree_set(0u32..1000, 0..10),
        any::<bool>(),
    )
        .prop_map(|(step, origin, kind, bits, positions, tampered)| PdcMessage {
            step,
            origin,
            kind,
            bits: BitString::from_bits(&bits),
            positions: positions.into_iter().collect(),
            tampered,
        })
}

proptest! {
    #[test]
    fn message_lines_round_trip(m in arb_message()) {
        let line = m.encode();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(PdcMessage::decode(&line).unwrap(), m);
    }
}
