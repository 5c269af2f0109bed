use proptest::prelude::*;
use proptest::sample::subsequence;

use num_rational::Rational64;
use stbc_core::catalog;
use stbc_core::constructions::construct_a;
use stbc_core::design::{finest_partition, validate_partition};
use stbc_core::f4::enumerate_all;
use stbc_core::family::{build, pair_split, t_vector};
use stbc_core::io::DesignFile;
use stbc_core::pauli::{anticommute_parity, hr_orthogonal_numeric, phi, phi_inv};
use stbc_core::signal::pam_points;
use stbc_core::sim::{channel_step, hard_limit_pam, trial_rng, StructuredDecoder};
use stbc_core::{Design, F4Vec, F4};

fn arb_vec(m: usize) -> impl Strategy<Value = F4Vec> {
    (any::<bool>(), prop::collection::vec(0u8..4, m))
        .prop_map(|(l, xs)| F4Vec::new(l, xs.into_iter().map(|b| F4::from_bits(b).unwrap()).collect()))
}

fn arb_triple() -> impl Strategy<Value = (F4Vec, F4Vec, F4Vec)> {
    (1usize..=6).prop_flat_map(|m| (arb_vec(m), arb_vec(m), arb_vec(m)))
}

/// A random set of distinct vectors of one length, grouped by its finest partition.
fn arb_design() -> impl Strategy<Value = Design> {
    (1usize..=3)
        .prop_flat_map(|m| {
            let all = enumerate_all(m).unwrap();
            let n = all.len();
            subsequence(all, 1..=n.min(12))
        })
        .prop_map(|vs| {
            let d = Design::new(vs[0].m(), vs).unwrap();
            let groups = finest_partition(&d).groups;
            d.with_partition(groups).unwrap()
        })
}

proptest! {
    #[test]
    fn addition_is_an_elementary_abelian_group((a, b, c) in arb_triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a + &a, F4Vec::zero(a.m()));
        prop_assert!((&a + &b).weight() <= a.weight() + b.weight());
    }

    #[test]
    fn vector_text_round_trips(v in (1usize..=6).prop_flat_map(arb_vec)) {
        let back: F4Vec = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn phi_inverts_phi_inv(v in (1usize..=4).prop_flat_map(arb_vec)) {
        let a = phi_inv(&v);
        prop_assert!(a.is_unitary(1e-9));
        prop_assert_eq!(phi(&a).unwrap(), v);
    }

    #[test]
    fn anticommute_parity_matches_numeric(
        (a, b) in (1usize..=3).prop_flat_map(|m| (arb_vec(m), arb_vec(m)))
    ) {
        let numeric = hr_orthogonal_numeric(&phi_inv(&a), &phi_inv(&b), 1e-9).unwrap();
        prop_assert_eq!(anticommute_parity(&a, &b).unwrap(), numeric);
    }

    #[test]
    fn finest_partition_is_valid(d in arb_design()) {
        let r = validate_partition(&d, &d.partition_indices()).unwrap();
        prop_assert!(r.valid);
        let mut seen: Vec<usize> = d.partition_indices().concat();
        seen.sort();
        prop_assert_eq!(seen, (0..d.k()).collect::<Vec<_>>());
    }

    #[test]
    fn merging_groups_never_breaks_validity(d in arb_design(), pick in any::<prop::sample::Index>()) {
        // merging two groups of a valid partition only removes cross pairs
        let mut groups = d.partition_indices();
        if groups.len() >= 2 {
            let i = pick.index(groups.len() - 1);
            let g = groups.remove(i + 1);
            groups[i].extend(g);
            prop_assert!(validate_partition(&d, &groups).unwrap().valid);
        }
    }

    #[test]
    fn construction_a_preserves_rate_and_groups(d in arb_design(), l in 0u32..3) {
        let out = construct_a(&d, l).unwrap();
        prop_assert_eq!(out.rate(), d.rate());
        prop_assert_eq!(out.partition_indices().len(), d.partition_indices().len());
        prop_assert!(validate_partition(&out, &out.partition_indices()).unwrap().valid);
    }

    #[test]
    fn design_file_round_trips(d in arb_design()) {
        let text = DesignFile::from_design(d.clone()).with_meta("note", "x").to_text();
        let back = DesignFile::parse(&text, true).unwrap();
        prop_assert_eq!(&back.design, &d);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn hard_limit_picks_a_nearest_point(v in -20.0f64..20.0, q in 2usize..9) {
        let pts = pam_points(q);
        let i = hard_limit_pam(v, &pts).unwrap();
        let best = pts.iter().map(|p| (v - p).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(((v - pts[i]).abs() - best).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn family_designs_pair_up_under_t(m in 2usize..=3, step in 0i64..16, xi in prop::bool::ANY) {
        // rates 1, 1+1/2^(m+1), ... covering both puncturing and extension
        let denom = 1i64 << (m + 1);
        let rate = Rational64::new(denom + step * 2, denom);
        let xi2 = if xi { F4::W2 } else { F4::ONE };
        let fd = match build(m, xi2, rate) {
            Ok(fd) => fd,
            Err(_) => return Ok(()),
        };
        let t = t_vector(m);
        let d = &fd.design;
        let pairs = pair_split(d).unwrap();
        prop_assert_eq!(pairs.len() * 2, d.k());
        let mut seen = vec![false; d.k()];
        for (a, b) in pairs {
            prop_assert_eq!(&(d.vector(a) + &t), d.vector(b));
            prop_assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
        }
        prop_assert_eq!(d.rate(), rate);
    }

    #[test]
    fn hr_orthogonal_groups_separate_the_metric(seed in any::<u64>(), which in 0usize..4) {
        let spec = ["alamouti", "qod4", "ggroup(3,1)", "fgd_ren"][which];
        let e = catalog::lookup(spec, &[]).unwrap();
        let mut rng = trial_rng(seed, 0, 0);
        let xs: Vec<f64> = (0..e.ld.k()).map(|_| rand::Rng::random_range(&mut rng, -3.0..3.0)).collect();
        let x = e.ld.evaluate(&xs).unwrap();
        let (y, h) = channel_step(&x, 2, 1.0, &mut rng);
        let mut total = y.frobenius_norm_sq();
        for g in e.design.partition_indices() {
            let mut part = vec![0.0; e.ld.k()];
            for &i in &g {
                part[i] = xs[i];
            }
            let ch = e.ld.evaluate(&part).unwrap().try_mul(&h).unwrap();
            total += ch.frobenius_norm_sq() - 2.0 * ch.inner_re(&y);
        }
        let mut r = y.clone();
        r.add_scaled(-1.0, &x.try_mul(&h).unwrap());
        let direct = r.frobenius_norm_sq();
        prop_assert!((total - direct).abs() <= 1e-6 * direct.max(1.0), "{} vs {}", total, direct);
    }

    #[test]
    fn structured_counts_match_plan(seed in any::<u64>(), which in 0usize..3, big in prop::bool::ANY) {
        let m_qam = if big { 16 } else { 4 };
        let spec = ["alamouti", "qod4", "silver"][which];
        let stbc = catalog::lookup(spec, &[]).unwrap().stbc(m_qam, 0.3).unwrap();
        let mut rng = trial_rng(seed, 1, 0);
        let (y, h) = channel_step(&stbc.codeword(0), 1, 0.5, &mut rng);
        let (_, count) = StructuredDecoder::new(&stbc).decode(&y, &h);
        prop_assert_eq!(Some(count), stbc.plan().complexity().total_at(m_qam as u64));
    }
}

#[test]
fn zero_step_ggroup_is_the_square_orthogonal_design() {
    for m in 1..=5 {
        let g = catalog::ggroup_design(2 * m + 2, 0).unwrap();
        let s = catalog::scod_design(m).unwrap();
        assert!(g.same_vector_set(&s), "m={m}");
    }
}
