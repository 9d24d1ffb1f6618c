use avalanche_core::scales::{Backend, Model, ScheduleMode, ScheduleParams, C_T};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_nonincreasing_in_r(ln_n in 1.0f64..40.0, r1 in 0.0f64..10.0, dr in 0.0f64..5.0) {
        let b = Backend::ansatz();
        let m = Model::fp_log(ln_n).unwrap();
        let a = b.ln_psi(&m, r1).unwrap();
        let c = b.ln_psi(&m, r1 + dr).unwrap();
        prop_assert!(c <= a || (a.is_infinite() && c.is_infinite()));
        let f = Model::ff_log(ln_n).unwrap();
        let a = b.ln_psi(&f, r1).unwrap();
        let c = b.ln_psi(&f, r1 + dr).unwrap();
        prop_assert!(c <= a + 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn t_hat_increasing(ln_n in 2.0f64..30.0, e1 in -12.0f64..-1.0, de in 0.01f64..2.0) {
        let b = Backend::ansatz();
        for m in [Model::fp_log(ln_n).unwrap(), Model::ff_log(ln_n).unwrap()] {
            let a = b.ln_t_hat(&m, e1).unwrap();
            let c = b.ln_t_hat(&m, e1 + de).unwrap();
            // Infinite once Ψ leaves the finite range.
            prop_assert!(c > a || (a == f64::INFINITY && c == a), "{m:?}: {a} vs {c}");
        }
    }

    #[test]
    fn fixed_point_is_fixed(ln_n in 3.0f64..40.0) {
        let b = Backend::ansatz();
        for m in [Model::fp_log(ln_n).unwrap(), Model::ff_log(ln_n).unwrap()] {
            let fp = b.t_infinity(&m).unwrap();
            let back = b.ln_t_hat(&m, fp.ln_eps).unwrap();
            prop_assert!((back - fp.ln_eps).abs() <= 1e-10 * fp.ln_eps.abs().max(1.0));
        }
    }

    // Ordinary-scale schedules agree between log-domain and direct arithmetic.
    #[test]
    fn schedule_modes_agree(ln_n in 16.0f64..50.0) {
        let b = Backend::ansatz();
        let m = Model::fp_log(ln_n).unwrap();
        let mut p = ScheduleParams::fp();
        let log = b.schedule(&m, &p).unwrap();
        p.mode = ScheduleMode::Direct;
        let direct = b.schedule(&m, &p).unwrap();
        prop_assert_eq!(log.steps.len(), direct.steps.len());
        for (x, y) in log.steps.iter().zip(&direct.steps) {
            for (a, c) in [(x.ln_r, y.ln_r), (x.ln_big_r, y.ln_big_r)] {
                prop_assert!(a == c || (a - c).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {c}");
            }
        }
    }
}

#[test]
fn m_infinity_closed_form() {
    let fp = Backend::ansatz().t_infinity(&Model::fp(1e6).unwrap()).unwrap();
    let want = (1e6 / C_T).powf(48.0 / 91.0);
    assert!((fp.m() / want - 1.0).abs() < 1e-9);
}
