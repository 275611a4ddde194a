use kdp::planner::{asymptotic_rate, capacity_ceiling, plan, plan_at_c, REFERENCE_C};
use kdp::{ChannelParams, ProtocolKind, Requirements};
use proptest::prelude::*;

const HASH_KINDS: [ProtocolKind; 4] = [ProtocolKind::Alpha, ProtocolKind::Beta, ProtocolKind::AlphaPrime, ProtocolKind::BetaPrime];

fn channel() -> impl Strategy<Value = ChannelParams> {
    (0.001f64..0.05, 0.1f64..0.45).prop_map(|(pm, pw)| ChannelParams::new(pm, pw).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hash_plans_verify_and_stay_below_capacity(ch in channel(), ell in 1_000u64..2_000_000, idx in 0usize..4) {
        let kind = HASH_KINDS[idx];
        let req = Requirements::standard(ell);
        let p = plan(kind, ch, &req).unwrap();
        p.verify(ch, &req).unwrap();
        prop_assert!(p.ell >= ell);
        prop_assert!(p.key_rate <= asymptotic_rate(kind, ch).unwrap() + 1e-12);
        if !kind.is_primed() {
            prop_assert!(p.key_rate <= capacity_ceiling(ch).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn ext_rate_grows_with_key_length(pm in 0.005f64..0.02, pw in 0.15f64..0.3, ell in 5_000u64..50_000) {
        let ch = ChannelParams::new(pm, pw).unwrap();
        let short = plan(ProtocolKind::AlphaExt, ch, &Requirements::standard(ell)).unwrap();
        let long = plan(ProtocolKind::AlphaExt, ch, &Requirements::standard(4 * ell)).unwrap();
        prop_assert!(long.key_rate > short.key_rate, "{} then {}", short.key_rate, long.key_rate);
        prop_assert!(long.key_rate <= capacity_ceiling(ch).unwrap());
    }

    #[test]
    fn optimised_c_dominates_reference_values(pm in 0.005f64..0.02, pw in 0.15f64..0.3, ell in 5_000u64..50_000, beta in any::<bool>()) {
        let ch = ChannelParams::new(pm, pw).unwrap();
        let kind = if beta { ProtocolKind::BetaExt } else { ProtocolKind::AlphaExt };
        let req = Requirements::standard(ell);
        let best = plan(kind, ch, &req).unwrap();
        best.verify(ch, &req).unwrap();
        for c in REFERENCE_C {
            if let Ok(p) = plan_at_c(kind, ch, &req, c) {
                p.verify(ch, &req).unwrap();
                prop_assert!(best.key_rate >= p.key_rate, "c = {}: {} < {}", c, best.key_rate, p.key_rate);
            }
        }
    }
}

#[test]
fn every_protocol_plans_and_verifies() {
    let ch = ChannelParams::new(0.01, 0.2).unwrap();
    let req = Requirements::standard(20_000);
    for kind in ProtocolKind::ALL {
        let p = plan(kind, ch, &req).unwrap();
        p.verify(ch, &req).unwrap();
        assert_eq!(p.protocol, kind);
        assert_eq!(p.k_parts.iter().sum::<u64>(), p.total_k);
        // each reconciliation code is designed to the admissible error on its own
        assert!(p.pe_bound.max(p.pe2_bound) <= req.p_e_adm * (1.0 + 1e-9), "{kind}");
        assert!(p.pf_bound <= req.p_f_adm * (1.0 + 1e-9), "{kind}");
        assert!(p.pd_bound <= req.p_d_adm * (1.0 + 1e-9), "{kind}");
        assert!(p.leakage.shannon_bound <= req.i_adm * (1.0 + 1e-9), "{kind}");
        assert!(p.key_rate <= asymptotic_rate(kind, ch).unwrap() + 1e-12, "{kind}");
    }
}

#[test]
fn eavesdropper_advantage_is_infeasible() {
    let ch = ChannelParams::new(0.2, 0.1).unwrap();
    for kind in ProtocolKind::ALL {
        assert!(plan(kind, ch, &Requirements::standard(1000)).is_err());
    }
}
