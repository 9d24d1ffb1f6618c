use avalanche_core::impurities::{
    detect_crossing_hole, sample_holes, sample_impurity_percolation, HoleProbability, HoleVariant, ImpuritySpec,
    ImpurityStreams, RadiusLaw,
};
use avalanche_core::percolation::sample_bernoulli;
use avalanche_core::{Annulus, DenseRegion, Region, SiteCoord, SiteState};
use proptest::prelude::*;

fn geometric(q: f64) -> RadiusLaw {
    RadiusLaw::from_tail_fn(|r| q.powi(r as i32 + 1), 400).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zero_pi_is_bitwise_bernoulli(n in 1u32..20, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let d = DenseRegion::shared(Region::ball(n)).unwrap();
        let s = ImpurityStreams::derive(seed, 0);
        let spec = ImpuritySpec::new(5.0, HoleProbability::Constant(0.0), geometric(0.8));
        let (c, _) = sample_impurity_percolation(&d, p, &spec, &s).unwrap();
        prop_assert_eq!(c, sample_bernoulli(&d, p, s.bernoulli).unwrap());
    }

    #[test]
    fn holes_only_remove_sites(n in 1u32..16, pi in 0.0f64..0.2, seed in any::<u64>()) {
        let d = DenseRegion::shared(Region::ball(n)).unwrap();
        let s = ImpurityStreams::derive(seed, 1);
        let spec = ImpuritySpec::new(5.0, HoleProbability::Constant(pi), geometric(0.7));
        let (c, holes) = sample_impurity_percolation(&d, 0.6, &spec, &s).unwrap();
        let plain = sample_bernoulli(&d, 0.6, s.bernoulli).unwrap();
        for i in 0..d.len() as u32 {
            let v = d.site(i);
            let in_hole = holes.holes.iter().any(|h| h.contains(v));
            let want = if in_hole { SiteState::Vacant } else { plain.state(i) };
            prop_assert_eq!(c.state(i), want);
        }
    }

    #[test]
    fn restricted_event_implies_crossing(seed in any::<u64>(), n1 in 1u32..5, extra in 2u32..8) {
        let n2 = 2 * n1 + extra;
        let d = DenseRegion::shared(Region::ball(2 * n2)).unwrap();
        let spec = ImpuritySpec::new(4.0, HoleProbability::Constant(0.05), geometric(0.85));
        let h = sample_holes(&d, &spec, &ImpurityStreams::derive(seed, 2)).unwrap();
        let a = Annulus { inner: n1, outer: n2, center: SiteCoord::ORIGIN };
        let hh = detect_crossing_hole(&h.holes, &a, HoleVariant::Restricted).unwrap();
        let hc = detect_crossing_hole(&h.holes, &a, HoleVariant::Crossing).unwrap();
        prop_assert!(!hh || hc);
    }
}

// Indicators and radii use independent streams: the sample correlation of
// (I_v, r_v) over 10⁴ sites stays within 3σ of zero.
#[test]
fn indicators_independent_of_radii() {
    let s = ImpurityStreams::derive(77, 0);
    let law = geometric(0.9);
    let sites: Vec<SiteCoord> = (0..10_000).map(|i| SiteCoord::new(i % 100, i / 100)).collect();
    let xs: Vec<f64> = sites.iter().map(|&v| f64::from(u8::from(s.indicator.uniform(v, 0) < 0.3))).collect();
    let ys: Vec<f64> = sites.iter().map(|&v| law.sample(s.radius.uniform(v, 0)).map_or(-1.0, f64::from)).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
    let sx = (xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / n).sqrt();
    let rho = cov / (sx * sy);
    assert!(rho.abs() < 3.0 / n.sqrt(), "correlation {rho}");
}

#[test]
fn tail_csv_roundtrip_shape() {
    let law = RadiusLaw::new(vec![0.5, 0.2]).unwrap();
    assert_eq!(law.to_csv(), "r,tail\n0,0.5\n1,0.2\n");
}
