use proptest::prelude::*;

use tdesign::clifford::{enumerate_clifford, induced_symplectic, CliffordGroup, CliffordKey};
use tdesign::covariance::PhasePointBasis;
use tdesign::designs::{frame_potential_set, gamma, DesignReport, SymProjector};
use tdesign::ffield::{ExtField, Fp};
use tdesign::groups::{orbit_of, point_stabilizer, GroupElement};
use tdesign::linalg::{haar_unitary, seeded_rng, CMatrix};
use tdesign::pauli::{commutation_phase, Displacement};
use tdesign::stabilizer::enumerate_lagrangians;
use tdesign::symplectic::{sp_generators, symp_product, SympMatrix, SympVector, VectorAction};

use std::sync::OnceLock;

const SMALL: [(u32, u32); 4] = [(2, 1), (3, 1), (2, 2), (5, 1)];

fn clifford(i: usize) -> &'static CliffordGroup {
    static GROUPS: OnceLock<Vec<CliffordGroup>> = OnceLock::new();
    &GROUPS.get_or_init(|| [(2, 1), (3, 1), (2, 2)].iter().map(|&(p, n)| enumerate_clifford(p, n).unwrap()).collect())[i]
}

fn vector(p: u32, n: u32) -> impl Strategy<Value = SympVector> {
    (0..(p as usize).pow(2 * n)).prop_map(move |i| SympVector::from_index(p, n, i))
}

/// Random word in the transvection generators.
fn symplectic(p: u32, n: u32) -> impl Strategy<Value = SympMatrix> {
    let gens = sp_generators(p, n).unwrap();
    prop::collection::vec(0..gens.len(), 0..24).prop_map(move |w| w.iter().fold(SympMatrix::identity(p, n), |acc, &g| acc.mul(&gens[g])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_field_axioms(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), a in 0i64..50, b in 0i64..50, c in 0i64..50) {
        let (a, b, c) = (Fp::new(a, p).unwrap(), Fp::new(b, p).unwrap(), Fp::new(c, p).unwrap());
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, Fp::zero(p));
        if !a.is_zero() {
            prop_assert_eq!(a * a.inv().unwrap(), Fp::one(p));
        }
    }

    #[test]
    fn extension_field_inverses(q in prop::sample::select(vec![4u32, 8, 9, 16]), seed in any::<u64>()) {
        let f = ExtField::with_order(q).unwrap();
        let elems: Vec<_> = f.elements().collect();
        let a = elems[(seed % q as u64) as usize];
        let b = elems[((seed >> 8) % q as u64) as usize];
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        if a != f.zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn form_is_alternating_and_bilinear((p, n) in prop::sample::select(SMALL.to_vec()), i in any::<usize>(), j in any::<usize>(), c in 0u32..5) {
        let size = (p as usize).pow(2 * n);
        let (a, b) = (SympVector::from_index(p, n, i % size), SympVector::from_index(p, n, j % size));
        let form = |x: &SympVector, y: &SympVector| symp_product(x, y).unwrap().value();
        prop_assert_eq!(form(&a, &a), 0);
        prop_assert_eq!((form(&a, &b) + form(&b, &a)) % p, 0);
        prop_assert_eq!(form(&a.scale(c), &b), form(&a, &b) * (c % p) % p);
    }

    #[test]
    fn generator_words_are_symplectic(f in symplectic(3, 1), g in symplectic(2, 2), v in vector(2, 2), w in vector(2, 2)) {
        prop_assert!(f.is_symplectic() && g.is_symplectic());
        prop_assert_eq!(symp_product(&g.apply(&v), &g.apply(&w)).unwrap(), symp_product(&v, &w).unwrap());
        let inv = g.try_inverse().unwrap();
        prop_assert_eq!(inv.mul(&g), SympMatrix::identity(2, 2));
        prop_assert_eq!(g.fixed_points(), 2u64.pow(4 - g.rank_minus_identity()));
    }

    #[test]
    fn displacement_product_law((p, n) in prop::sample::select(vec![(2u32, 1u32), (3, 1), (2, 2)]), i in any::<usize>(), j in any::<usize>(), k in 0i64..8) {
        let size = (p as usize).pow(2 * n);
        let a = Displacement::new(SympVector::from_index(p, n, i % size), k);
        let b = Displacement::new(SympVector::from_index(p, n, j % size), 0);
        let dense = &a.matrix().unwrap() * &b.matrix().unwrap();
        prop_assert!((&dense - &a.mul(&b).matrix().unwrap()).frobenius_norm() < 1e-9);
        // D_a D_b = ω^{⟨a,b⟩} D_b D_a
        let ab = a.mul(&b).with_phase(0);
        let ba = b.mul(&a).with_phase(0);
        prop_assert_eq!(ab, ba);
        let omega = tdesign::pauli::omega_power(p, commutation_phase(a.mu(), b.mu()).unwrap() as i64);
        let lhs = &a.matrix().unwrap() * &b.matrix().unwrap();
        let rhs = (&b.matrix().unwrap() * &a.matrix().unwrap()).scale(omega);
        prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-9);
    }

    #[test]
    fn clifford_keys_track_dense_products(g in 0usize..3, i in any::<usize>(), j in any::<usize>()) {
        let group = clifford(g);
        let (a, b) = (group.table().element(i % group.order()), group.table().element(j % group.order()));
        let prod = a.mul(b);
        let key = induced_symplectic(group.p(), group.n(), prod.unitary()).unwrap();
        prop_assert_eq!(&key, prod.key());
        prop_assert_eq!(CliffordKey::decode(group.p(), group.n(), &key.encode()).unwrap(), key.clone());
        prop_assert_eq!(key.compose(&key.inverse()), CliffordKey::identity(group.p(), group.n()));
    }

    #[test]
    fn orbit_stabilizer(x in 0usize..16) {
        let sp = tdesign::symplectic::SpGroup::enumerate(2, 2).unwrap();
        let action = VectorAction::new(2, 2);
        let orbit = orbit_of(sp.table(), &action, x).len();
        let stab = point_stabilizer(sp.table(), &action, x).unwrap().order();
        prop_assert_eq!(orbit * stab, sp.order());
    }

    #[test]
    fn frame_potential_is_at_least_haar(d in 2usize..4, k in 2usize..12, seed in any::<u64>(), t in 1u32..3) {
        let mut rng = seeded_rng(seed);
        let us: Vec<CMatrix> = (0..k).map(|_| haar_unitary(d, &mut rng)).collect();
        prop_assert!(frame_potential_set(&us, t) >= gamma(t, d as u64).unwrap() as f64 - 1e-9);
    }

    #[test]
    fn lagrangians_are_isotropic((p, n) in prop::sample::select(vec![(2u32, 1u32), (2, 2), (3, 1), (3, 2)]), i in any::<usize>()) {
        let all = enumerate_lagrangians(p, n).unwrap();
        let lag = &all[i % all.len()];
        prop_assert_eq!(lag.basis.len(), n as usize);
        for a in &lag.basis {
            for b in &lag.basis {
                prop_assert!(symp_product(a, b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn phase_points_are_orthogonal(p in prop::sample::select(vec![3u32, 5]), i in any::<usize>(), j in any::<usize>()) {
        let b = PhasePointBasis::new(p).unwrap().basis;
        let n = b.ops().len();
        let (i, j) = (i % n, j % n);
        let tr = b.ops()[i].trace_product(&b.ops()[j]);
        let want = if i == j { p as f64 } else { 0.0 };
        prop_assert!((tr.re - want).abs() < 1e-9 && tr.im.abs() < 1e-9);
    }

    #[test]
    fn reports_round_trip_through_json(v in any::<u32>(), e in any::<u32>(), seed in proptest::option::of(any::<u64>())) {
        let mut r = DesignReport::exact("claim", "method", "params", v, e).with_runtime(3);
        r.seed = seed;
        let back: DesignReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn symmetric_projector_is_idempotent() {
    for (d, t) in [(2, 2), (2, 3), (3, 2)] {
        let p = SymProjector::new(d, t);
        assert!((&(&p.matrix * &p.matrix) - &p.matrix).frobenius_norm() < 1e-12);
    }
}
