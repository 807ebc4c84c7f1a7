mod common;

use common::*;
use h2flow::constitutive::Params;
use h2flow::statevars::{invert_saturation, secondary_state_nocap, total_density_x, PhaseValue};
use proptest::prelude::*;

fn params() -> Params {
    Params::reference()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn saturation_round_trip(p_l in 1e5f64..1e7, log_sg in -10f64..-0.23) {
        let p = params();
        let s_g = 10f64.powf(log_sg).min(p.medium.sg_max() * 0.999);
        let x = total_density_x(p_l, PhaseValue::Saturated { s_g }, &p.consts, &p.medium).unwrap();
        let sec = invert_saturation(p_l, x, &p.consts, &p.medium).unwrap();
        prop_assert!(sec.saturated);
        let back = total_density_x(p_l, PhaseValue::Saturated { s_g: sec.s_g }, &p.consts, &p.medium).unwrap();
        prop_assert!(rel_err(back, x) <= 1e-10, "X {x} -> S_g {} -> {back}", sec.s_g);
    }

    #[test]
    fn x_is_increasing_in_sg(p_l in 1e5f64..1e7, a in 1e-8f64..0.59, b in 1e-8f64..0.59) {
        let p = params();
        prop_assume!(a < b);
        let xa = total_density_x(p_l, PhaseValue::Saturated { s_g: a }, &p.consts, &p.medium).unwrap();
        let xb = total_density_x(p_l, PhaseValue::Saturated { s_g: b }, &p.consts, &p.medium).unwrap();
        prop_assert!(xa < xb);
    }

    #[test]
    fn derivatives_match_finite_differences(p_l in 2e5f64..5e6, s_g in 1e-3f64..0.5) {
        let p = params();
        let (c, m) = (&p.consts, &p.medium);
        let x = total_density_x(p_l, PhaseValue::Saturated { s_g }, c, m).unwrap();
        let sec = invert_saturation(p_l, x, c, m).unwrap();
        let hp = 1e-6 * p_l;
        let hx = 1e-6 * x;
        let dp = (invert_saturation(p_l + hp, x, c, m).unwrap().s_g
            - invert_saturation(p_l - hp, x, c, m).unwrap().s_g) / (2.0 * hp);
        let dx = (invert_saturation(p_l, x + hx, c, m).unwrap().s_g
            - invert_saturation(p_l, x - hx, c, m).unwrap().s_g) / (2.0 * hx);
        prop_assert!(rel_err(sec.dsg_dpl, dp) <= 1e-5, "dSg/dpl {} vs {dp}", sec.dsg_dpl);
        prop_assert!(rel_err(sec.dsg_dx, dx) <= 1e-5, "dSg/dX {} vs {dx}", sec.dsg_dx);
    }

    #[test]
    fn complementarity(seed in any::<u64>()) {
        let p = params();
        let mut r = rng(seed);
        let u = random_state(&mut r, &p);
        let s = invert_saturation(u.p_l, u.x, &p.consts, &p.medium).unwrap();
        let gap = p.consts.c_h * s.p_g - s.r_s;
        prop_assert!(s.s_g >= 0.0 && gap >= 0.0);
        prop_assert_eq!(s.s_g * gap, 0.0);
        prop_assert!(s.n_aux >= 0.0 && s.n_aux < 1.0);
    }

    #[test]
    fn nocap_matches_closed_form(seed in any::<u64>()) {
        let p = nocap_params();
        let mut r = rng(seed);
        let u = random_state(&mut r, &p);
        let general = invert_saturation(u.p_l, u.x, &p.consts, &p.medium).unwrap();
        let closed = secondary_state_nocap(u.p_l, u.x, &p.consts, p.medium.sg_max()).unwrap();
        prop_assert_eq!(general.saturated, closed.saturated);
        // saturations and N live in [0, 1] and are compared on that scale
        prop_assert!((general.s_g - closed.s_g).abs() <= 1e-10);
        prop_assert!((general.n_aux - closed.n_aux).abs() <= 1e-10);
        for (g, w) in [
            (general.r_s, closed.r_s),
            (general.dsg_dpl, closed.dsg_dpl),
            (general.dsg_dx, closed.dsg_dx),
        ] {
            prop_assert!(rel_err(g, w) <= 1e-10, "{g} vs {w}");
        }
    }
}

#[test]
fn derivative_ratios_vanish_at_the_phase_boundary() {
    let p = params();
    let (c, m) = (&p.consts, &p.medium);
    let p_l = 1e6;
    let mut prev: Option<[f64; 3]> = None;
    for k in 3..=14 {
        let s_g = 10f64.powi(-k);
        let x = total_density_x(p_l, PhaseValue::Saturated { s_g }, c, m).unwrap();
        let s = invert_saturation(p_l, x, c, m).unwrap();
        let cur = [s.dsg_dpl.abs(), s.dsg_dx, s.n_aux];
        if let Some(prev) = prev {
            for i in 0..3 {
                assert!(cur[i] < prev[i], "not decaying at S_g = {s_g:e}");
            }
        }
        prev = Some(cur);
    }
    let last = prev.unwrap();
    assert!(last[2] < 1e-3);
    let below = invert_saturation(p_l, c.c_h * p_l * 0.999, c, m).unwrap();
    assert_eq!([below.dsg_dpl, below.dsg_dx, below.n_aux], [0.0, 0.0, 0.0]);
}
