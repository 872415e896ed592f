use proptest::prelude::*;
use quadchain::chainbundle::{
    deformation_is_nontrivial, end_cohomology, h1_end, is_balanced_criteria, is_balanced_direct, separating_endomorphism,
};
use quadchain::exactmath::{dual_intersect_flat, Field, Matrix, Poly, PrimeField, Subspace};
use quadchain::fbundle::{ce_rank, f_invariants, genus_decompose, is_f_balanced, low_genus_splittings};
use quadchain::flags::{
    flags_transverse, left_flags, modify, right_flags, splitting_matrix_pair, transport, Direction, DirectrixFlag,
    Filtration, SplittingType,
};
use quadchain::projchain::{
    expected_h0_ideal_quadrics, h0_ideal_quadrics, proportional, quadrics_containing, sample_chain, ParamPiece,
};
use quadchain::rng::stream_rng;
use quadchain::GluedBundle;

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn primes() -> impl Strategy<Value = u64> {
    prop_oneof![Just(5u64), Just(101), Just((1u64 << 61) - 1)]
}

/// Steps spanned by leading rows of a random invertible matrix.
fn random_flag(f: &PrimeField, n: usize, dims: &[usize], seed: u64) -> Filtration<PrimeField> {
    let g = Matrix::random_invertible(f, n, &mut stream_rng(seed, 1));
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    let steps = dims
        .iter()
        .map(|&k| Subspace::from_spanning(g.select_rows(&(0..k.min(n)).collect::<Vec<_>>())))
        .collect();
    Filtration::new(f, n, steps).unwrap()
}

fn random_balanced(m: i64, n: usize, split: usize) -> SplittingType {
    SplittingType::balanced(m, n - split.min(n), split.min(n)).unwrap()
}

fn random_type(r: usize, seed: u64) -> SplittingType {
    let mut rng = stream_rng(seed, 2);
    let e = (0..r).map(|_| rand::Rng::random_range(&mut rng, -2..=2)).collect();
    SplittingType::new(e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_idempotent(p in primes(), rows in 1usize..7, cols in 1usize..7, seed: u64) {
        let f = field(p);
        let m = Matrix::random(&f, rows, cols, &mut stream_rng(seed, 0));
        let (once, rank, _) = m.rref();
        let (twice, rank2, _) = once.rref();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(rank, rank2);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn grassmann_identity(p in primes(), n in 1usize..8, da in 0usize..8, db in 0usize..8, seed: u64) {
        let f = field(p);
        let mut rng = stream_rng(seed, 0);
        let a = Subspace::random(&f, n, da.min(n), &mut rng);
        let b = Subspace::random(&f, n, db.min(n), &mut rng);
        let meet = a.intersect(&b).unwrap().dim();
        let join = a.sum(&b).unwrap().dim();
        prop_assert_eq!(meet + join, a.dim() + b.dim());
    }

    #[test]
    fn untwisted_intersection_is_flat(p in primes(), n in 1usize..6, da in 0usize..6, db in 0usize..6, seed: u64) {
        let f = field(p);
        let mut rng = stream_rng(seed, 0);
        let a = Subspace::random(&f, n, da.min(n), &mut rng);
        let b = Subspace::random(&f, n, db.min(n), &mut rng);
        let (_, flat) = dual_intersect_flat(&a, &b, &Matrix::zeros(&f, n, n)).unwrap();
        prop_assert!(flat);
    }

    #[test]
    fn exact_division_recovers_quotient(
        p in primes(),
        den in prop::collection::vec(-50i64..50, 1..6),
        quo in prop::collection::vec(-50i64..50, 0..6),
    ) {
        let f = field(p);
        let den = Poly::from_i64(&f, &den);
        prop_assume!(!den.is_zero());
        let quo = Poly::from_i64(&f, &quo);
        prop_assert_eq!(den.mul(&quo).exact_divide(&den).unwrap(), quo);
    }

    #[test]
    fn modify_by_trivial_flag_is_identity(n in 1usize..7, dims in prop::collection::vec(0usize..7, 0..4), seed: u64) {
        let f = field(101);
        let flag = random_flag(&f, n, &dims, seed);
        for b in [Subspace::full(&f, n), Subspace::zero(&f, n)] {
            let out = modify(&flag, &DirectrixFlag::from_subspace(b).unwrap()).unwrap();
            prop_assert_eq!(&out, &flag);
        }
    }

    #[test]
    fn transport_round_trips(m in -3i64..3, n in 1usize..7, split in 0usize..7, extra in prop::collection::vec(0usize..7, 0..3), seed: u64) {
        let f = field(101);
        let s = random_balanced(m, n, split);
        let top = s.exponents().iter().take_while(|&&e| e == s.max()).count();
        let mut dims = extra;
        if top < n {
            // Keep only steps comparable with the directrix, then add it.
            dims.retain(|&k| k <= top);
            dims.push(top);
        }
        dims.sort_unstable();
        let g = Matrix::random_invertible(&f, top, &mut stream_rng(seed, 3));
        let inner: Vec<Subspace<PrimeField>> = dims
            .iter()
            .map(|&k| {
                let rows: Vec<Vec<_>> = (0..k.min(top))
                    .map(|i| {
                        let mut v = g.row(i).to_vec();
                        v.resize(n, f.zero());
                        v
                    })
                    .collect();
                Subspace::span(&f, n, rows).unwrap()
            })
            .collect();
        let flag = Filtration::new(&f, n, inner).unwrap();
        let there = transport(&flag, &s, Direction::Right).unwrap();
        let back = transport(&there, &s, Direction::Left).unwrap();
        prop_assert_eq!(back, flag);
    }

    #[test]
    fn transversality_is_symmetric(n in 1usize..7, d1 in prop::collection::vec(0usize..7, 0..4), d2 in prop::collection::vec(0usize..7, 0..4), s1: u64, s2: u64, p in primes()) {
        let f = field(p);
        let a = random_flag(&f, n, &d1, s1);
        let b = random_flag(&f, n, &d2, s2);
        prop_assert_eq!(flags_transverse(&a, &b).unwrap(), flags_transverse(&b, &a).unwrap());
    }

    #[test]
    fn splitting_pair_preserves_flags(n in 1usize..7, d1 in prop::collection::vec(0usize..7, 0..5), d2 in prop::collection::vec(0usize..7, 0..5), s1: u64, s2: u64) {
        let f = field((1 << 61) - 1);
        let a = random_flag(&f, n, &d1, s1);
        let b = random_flag(&f, n, &d2, s2);
        prop_assume!(flags_transverse(&a, &b).unwrap());
        let t = Matrix::random(&f, n, n, &mut stream_rng(s1 ^ s2, 4));
        let (pm, qm) = splitting_matrix_pair(&a, &b, &t).unwrap();
        prop_assert_eq!(pm.sub(&qm).unwrap(), t);
        for s in a.steps() {
            prop_assert!(s.image(&pm).unwrap().is_subspace_of(s).unwrap());
        }
        for s in b.steps() {
            prop_assert!(s.image(&qm).unwrap().is_subspace_of(s).unwrap());
        }
    }

    #[test]
    fn perfectly_balanced_flags_are_trivial(m in -3i64..3, r in 1usize..5, k in 1usize..5, seed: u64) {
        let f = field(101);
        let comps = vec![SplittingType::balanced(m, r, 0).unwrap(); k];
        let b = GluedBundle::random(&f, comps, &mut stream_rng(seed, 0)).unwrap();
        for (l, rt) in left_flags(&b).unwrap().iter().zip(right_flags(&b).unwrap().iter()) {
            prop_assert!(l.is_trivial() && rt.is_trivial());
            prop_assert!(flags_transverse(l, rt).unwrap());
        }
        prop_assert!(is_balanced_direct(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn euler_characteristic(r in 1usize..4, k in 1usize..5, seeds in prop::collection::vec(any::<u64>(), 5), balanced: bool, p in primes()) {
        let f = field(p);
        let comps: Vec<SplittingType> = (0..k)
            .map(|i| if balanced { random_balanced(i as i64 % 2, r, seeds[i] as usize % (r + 1)) } else { random_type(r, seeds[i]) })
            .collect();
        let sum_h0: usize = comps.iter().map(SplittingType::h0_end).sum();
        let sum_h1: usize = comps.iter().map(SplittingType::h1_end).sum();
        let b = GluedBundle::random(&f, comps, &mut stream_rng(seeds[4], 0)).unwrap();
        let (h0, h1) = end_cohomology(&b);
        let chi = sum_h0 as i64 - sum_h1 as i64 - ((k - 1) * r * r) as i64;
        prop_assert_eq!(h0 as i64 - h1 as i64, chi);
        if balanced {
            prop_assert_eq!(h0 as i64 - h1 as i64, (r * r) as i64);
        }
    }

    #[test]
    fn criteria_match_cohomology(r in 1usize..4, k in 1usize..5, splits in prop::collection::vec(0usize..4, 4), seed: u64, p in prop_oneof![Just(5u64), Just(7)]) {
        let f = field(p);
        let comps: Vec<SplittingType> = (0..k).map(|i| random_balanced(i as i64 % 3, r, splits[i])).collect();
        let b = GluedBundle::random(&f, comps, &mut stream_rng(seed, 0)).unwrap();
        prop_assert_eq!(is_balanced_direct(&b), is_balanced_criteria(&b));
    }

    #[test]
    fn scaling_gluings_changes_nothing(r in 1usize..4, k in 2usize..5, splits in prop::collection::vec(0usize..4, 4), seed: u64, c in 1i64..7) {
        let f = field(7);
        let comps: Vec<SplittingType> = (0..k).map(|i| random_balanced(0, r, splits[i])).collect();
        let b = GluedBundle::random(&f, comps.clone(), &mut stream_rng(seed, 0)).unwrap();
        let scaled: Vec<Matrix<PrimeField>> = b.gluings().iter().map(|g| g.scale(&f.from_i64(c))).collect();
        let b2 = GluedBundle::new(&f, comps, scaled).unwrap();
        prop_assert_eq!(h1_end(&b), h1_end(&b2));
        prop_assert_eq!(is_balanced_direct(&b), is_balanced_direct(&b2));
        prop_assert_eq!(is_balanced_criteria(&b), is_balanced_criteria(&b2));
    }

    #[test]
    fn unbalanced_component_forces_h1(r in 2usize..4, k in 1usize..4, seed: u64) {
        let f = field(101);
        let mut comps: Vec<SplittingType> = (0..k).map(|_| SplittingType::balanced(0, r, 0).unwrap()).collect();
        let mut e = vec![0; r];
        e[0] = 2;
        comps[seed as usize % k] = SplittingType::new(e).unwrap();
        let b = GluedBundle::random(&f, comps, &mut stream_rng(seed, 0)).unwrap();
        prop_assert!(h1_end(&b) > 0);
    }

    #[test]
    fn deformations_detect_h1(r in 1usize..4, k in 2usize..4, splits in prop::collection::vec(0usize..4, 3), seed: u64) {
        let f = field(7);
        let comps: Vec<SplittingType> = (0..k).map(|i| random_balanced(0, r, splits[i])).collect();
        let b = GluedBundle::random(&f, comps, &mut stream_rng(seed, 0)).unwrap();
        let h1 = h1_end(&b);
        let left = left_flags(&b).unwrap();
        let right = right_flags(&b).unwrap();
        let mut found = false;
        for (j, (l, rt)) in left.iter().zip(&right).enumerate() {
            for a in &l.steps()[1..l.steps().len() - 1] {
                for c in &rt.steps()[1..rt.steps().len() - 1] {
                    if let Ok(m) = separating_endomorphism(a, c) {
                        found |= deformation_is_nontrivial(&b, j, &m).unwrap();
                    }
                }
            }
            // The elementary matrices span all node deformations.
            for idx in 0..r * r {
                let mut m = Matrix::zeros(&f, r, r);
                m.set(idx / r, idx % r, f.one());
                found |= deformation_is_nontrivial(&b, j, &m).unwrap();
            }
        }
        prop_assert_eq!(found, h1 > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn anchors_lie_on_both_links(r in 3usize..7, n in 1usize..6, seed: u64) {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, r, n, seed).unwrap();
        for (i, set) in c.anchors().iter().enumerate() {
            for a in set {
                prop_assert!(proportional(&f, &c.links()[i].eval(&a.left), &a.point));
                prop_assert!(proportional(&f, &c.links()[i + 1].eval(&a.right), &a.point));
            }
        }
    }

    #[test]
    fn restriction_rank_is_coordinate_free(r in 3usize..6, n in 1usize..4, seed: u64, ab in (1i64..50, 0i64..50, 0i64..50, 1i64..50)) {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, r, n, seed).unwrap();
        let pieces: Vec<ParamPiece<PrimeField>> = c.links().iter().flat_map(|l| l.pieces().to_vec()).collect();
        let base = quadrics_containing(&f, r, &pieces).dim();

        let g = Matrix::random_invertible(&f, r + 1, &mut stream_rng(seed, 5));
        let moved: Vec<_> = pieces.iter().map(|p| ParamPiece::new(g.mul(p.coeffs()).unwrap()).unwrap()).collect();
        prop_assert_eq!(quadrics_containing(&f, r, &moved).dim(), base);

        // t ↦ (αt + β)/(γt + δ) on every piece, cleared of denominators.
        let (al, be, ga, de) = (f.from_i64(ab.0), f.from_i64(ab.1), f.from_i64(ab.2), f.from_i64(ab.3));
        prop_assume!(!f.is_zero(&f.sub(&f.mul(&al, &de), &f.mul(&be, &ga))));
        let num = Poly::new(&f, vec![be, al]);
        let den = Poly::new(&f, vec![de, ga]);
        let reparam: Vec<_> = pieces
            .iter()
            .map(|p| {
                let e = p.degree();
                let rows: Vec<Vec<_>> = (0..=r)
                    .map(|i| {
                        let x = p.coordinate(i);
                        (0..=e)
                            .map(|k| {
                                let mut term = Poly::constant(&f, x.coeff(k));
                                for _ in 0..k {
                                    term = term.mul(&num);
                                }
                                for _ in k..e {
                                    term = term.mul(&den);
                                }
                                term
                            })
                            .fold(Poly::zero(&f), |acc, t| acc.add(&t))
                            .padded(e + 1)
                    })
                    .collect();
                ParamPiece::new(Matrix::from_rows(&f, e + 1, rows).unwrap()).unwrap()
            })
            .collect();
        prop_assert_eq!(quadrics_containing(&f, r, &reparam).dim(), base);
    }

    #[test]
    fn quadric_counts_match_and_shrink(r in 3usize..7, n in 1usize..6, seed: u64) {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, r, n, seed).unwrap();
        prop_assert_eq!(h0_ideal_quadrics(&c, 0, n - 1).unwrap(), expected_h0_ideal_quadrics(r, n));
        for i in 0..n {
            for j in i..n {
                let inner = h0_ideal_quadrics(&c, i, j).unwrap();
                if i > 0 {
                    prop_assert!(h0_ideal_quadrics(&c, i - 1, j).unwrap() <= inner);
                }
                if j + 1 < n {
                    prop_assert!(h0_ideal_quadrics(&c, i, j + 1).unwrap() <= inner);
                }
            }
        }
    }

    #[test]
    fn flag_verdict_matches_genericity(d in 5usize..8, a in 1usize..7, seed: u64) {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, d - 2, a, seed).unwrap();
        let (_, report) = is_f_balanced(&c).unwrap();
        prop_assert!(report.agreement, "{:?}", report);
    }
}

proptest! {
    #[test]
    fn genus_decomposition_round_trips(d in 3usize..12, extra in 0usize..200) {
        let g = (d - 3) * (d - 1) + extra;
        let (a, b) = genus_decompose(g, d).unwrap();
        prop_assert_eq!(((a as i64 - 1) * (d as i64 - 1) + (b * d) as i64) as usize, g);
    }

    #[test]
    fn invariants_agree_with_low_genus_types(d in 4usize..14, genus in 0usize..2) {
        let inv = f_invariants(d, genus).unwrap();
        let (e, f) = low_genus_splittings(d, genus).unwrap();
        prop_assert_eq!(e.rank(), inv.rank_e);
        prop_assert_eq!(e.degree(), inv.degree_e);
        let f = f.unwrap();
        prop_assert_eq!(f.rank(), inv.rank_f);
        prop_assert_eq!(f.degree(), inv.degree_f);
        prop_assert_eq!(ce_rank(d, 1).unwrap(), d * (d - 3) / 2);
    }
}
