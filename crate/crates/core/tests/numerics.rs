use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mflab::density_process::{enabled_transitions, CountVector, DensityParams};
use mflab::jsq_reference::jsq_stationary;
use mflab::meanfield_ode::{fixed_point, integrate, rhs_general, IntegrateOptions, OdeState, RateConvention};
use mflab::ring_sim::{empirical_proportion, route_arrival};
use mflab::state_space::{validate_membership, BoxLattice, SuperNodeVector};

/// Largest change of P^1 on the 0..=30 sub-box when the cap goes 40 -> 60.
fn cap_sensitivity(lambda: f64) -> f64 {
    let small = jsq_stationary(1, lambda, 1.0, 40).unwrap();
    let large = jsq_stationary(1, lambda, 1.0, 60).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..=30 {
        for j in 0..=30 {
            worst = worst.max((small.prob(&[i, j]) - large.prob(&[i, j])).abs());
        }
    }
    worst
}

#[test]
fn cap_stability_at_load_070() {
    let worst = cap_sensitivity(0.7);
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn cap_stability_at_load_080() {
    let worst = cap_sensitivity(0.8);
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn halving_the_step_changes_little() {
    let run = |dt: f64| {
        let opts = IntegrateOptions { t_max: 20.0, dt, sample_interval: None, convention: RateConvention::Balanced };
        integrate(OdeState::empty_system(1, 40).unwrap(), 0.7, 1.0, &opts).unwrap().last().z.clone()
    };
    let coarse = run(0.01);
    let fine = run(0.005);
    let gap = coarse.iter().zip(&fine).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap <= 1e-8, "{gap:e}");
}

#[test]
fn k2_fixed_point_is_the_jsq3_law() {
    let fp = fixed_point(2, 0.6, 1.0, 15, 1e-11).unwrap();
    let jsq = jsq_stationary(2, 0.6, 1.0, 15).unwrap();
    let gap = fp.state.z.iter().zip(&jsq.pi).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap <= 1e-7, "{gap:e}");
}

fn density_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, len).prop_filter_map("non-zero mass", |mut v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| {
            v.iter_mut().for_each(|x| *x /= s);
            v
        })
    })
}

proptest! {
    #[test]
    fn rhs_conserves_mass(z in density_strategy(4 * 4 * 4), lambda in 0.0..2.0f64, mu in 0.0..2.0f64) {
        let lattice = BoxLattice::new(3, 3).unwrap();
        let r = rhs_general(&z, &lattice, lambda, mu, RateConvention::Balanced);
        prop_assert!(r.iter().sum::<f64>().abs() <= 1e-12);
    }

    #[test]
    fn rhs_commutes_with_coordinate_swap(z in density_strategy(6 * 6)) {
        let lattice = BoxLattice::new(2, 5).unwrap();
        let swap = |v: &[f64]| -> Vec<f64> {
            (0..lattice.len()).map(|idx| {
                let c = lattice.decode(idx);
                v[lattice.index_of(&[c[1], c[0]]).unwrap()]
            }).collect()
        };
        let a = swap(&rhs_general(&z, &lattice, 0.7, 1.0, RateConvention::Balanced));
        let b = rhs_general(&swap(&z), &lattice, 0.7, 1.0, RateConvention::Balanced);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn density_moves_keep_n(coords in prop::collection::vec((0u32..5, 0u32..5), 1..8)) {
        let m = CountVector::new(1, coords.iter().map(|&(a, b)| (SuperNodeVector::from([a, b]), 1))).unwrap();
        let params = DensityParams::new(1, 0.7, 1.0).with_cap(5);
        for t in enabled_transitions(&m, &params) {
            prop_assert!(t.rate > 0.0);
            let next = m.applied(&t);
            prop_assert_eq!(next.n(), m.n());
            let diff: i64 = t.add.coords().iter().zip(t.remove.coords()).map(|(&a, &b)| i64::from(a) - i64::from(b)).sum();
            prop_assert_eq!(diff.abs(), 1);
        }
    }

    #[test]
    fn routing_picks_a_shortest_candidate(queues in prop::collection::vec(0u32..6, 2..12), seed: u64, pick: usize, k_raw: usize) {
        let n = queues.len();
        let k = k_raw % n;
        let i = pick % n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = route_arrival(&queues, i, k, &mut rng);
        let candidates: Vec<usize> = (0..=k).map(|d| (i + d) % n).collect();
        prop_assert!(candidates.contains(&target));
        let shortest = candidates.iter().map(|&c| queues[c]).min().unwrap();
        prop_assert_eq!(queues[target], shortest);
    }

    #[test]
    fn empirical_proportion_is_a_member(queues in prop::collection::vec(0u32..6, 1..20), k_raw: usize) {
        let k = k_raw % queues.len();
        let z = empirical_proportion(&queues, k);
        prop_assert!(validate_membership(&z, Some(queues.len() as u64)));
        prop_assert!(z.len() <= queues.len());
    }
}
