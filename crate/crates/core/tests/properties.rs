use std::sync::Arc;

use ndarray::{Array1, Array2};
use proptest::collection::vec;
use proptest::prelude::*;

use spectral_search_core::graphs::{normalize_adjacency, Convention, FamilySpec, NormalizedHamiltonian};
use spectral_search_core::numkernel::{evolve_density, frobenius_norm, hermitian_eig, ComplexMatrix, C64};
use spectral_search_core::perturb::{
    find_top_two, full_perturbed_spectrum, identity_audit, interlacing_check, rank_one_determinant_residual,
    secular_spectrum, weyl_audit,
};
use spectral_search_core::spectra::{constant_gap_fact, moment_monotonicity, moment_sk, variance_fact, Tuplet};
use spectral_search_core::walk::{lower_bound_audit, time_grid, DirectWalk, SpectralWalk};

fn hermitian_from(n: usize, raw: &[f64]) -> ComplexMatrix {
    let a = Array2::from_shape_fn((n, n), |(i, j)| C64::new(raw[i * n + j], raw[n * n + i * n + j]));
    let h = Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + a[[j, i]].conj()) * 0.5);
    ComplexMatrix::from_array(h).unwrap()
}

fn hermitian(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim).prop_flat_map(|n| vec(-1.0..1.0f64, 2 * n * n).prop_map(move |raw| hermitian_from(n, &raw)))
}

fn complex_vector(n: usize) -> impl Strategy<Value = Array1<C64>> {
    vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

fn unit(v: Array1<C64>) -> Array1<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / norm.max(1e-300))
}

/// Random normalized Hamiltonian with top eigenvalue 1 and spectrum in [0, 1].
fn random_tuplet() -> impl Strategy<Value = Tuplet> {
    (3usize..=14)
        .prop_flat_map(|n| {
            (
                vec(-1.0..1.0f64, 2 * n * n),
                vec(0.0..0.95f64, n - 1),
                complex_vector(n),
                0.2..3.0f64,
            )
        })
        .prop_filter_map("degenerate target", |(raw, lower, w, gamma)| {
            let n = lower.len() + 1;
            let basis = hermitian_eig(&hermitian_from(n, &raw)).ok()?;
            let mut values = vec![1.0];
            values.extend(lower);
            let v = basis.vectors();
            let h = Array2::from_shape_fn((n, n), |(i, j)| {
                (0..n).map(|k| v[[i, k]] * values[k] * v[[j, k]].conj()).sum::<C64>()
            });
            let h = ComplexMatrix::from_array(h).ok()?;
            let h = Arc::new(NormalizedHamiltonian::from_matrix(h, Convention::UnitInterval).ok()?);
            let w = unit(w);
            let t = Tuplet::new(h, w, gamma).ok()?;
            // Keep the target comfortably away from any single eigenspace.
            (t.eps().iter().all(|&e| e > 1e-3) && !t.decomposition().is_ambiguous()).then_some(t)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigensystem_reconstructs(h in hermitian(64)) {
        let eig = hermitian_eig(&h).unwrap();
        let scale = frobenius_norm(&h).max(1.0);
        prop_assert!(frobenius_norm(&eig.reconstruct().sub(&h).unwrap()) <= 1e-10 * scale);
        prop_assert!(eig.orthonormality_defect() <= 1e-10);
        prop_assert!(eig.values().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn evolution_preserves_frobenius_norm(h in hermitian(24), seed in vec(-1.0..1.0f64, 48), t in 0.0..100.0f64) {
        let n = h.dim();
        let b = hermitian_from(n, &seed.iter().cycle().take(2 * n * n).copied().collect::<Vec<_>>());
        let bb = b.matmul(&b).unwrap();
        let rho = bb.scaled(1.0 / bb.trace().re.max(1e-12));
        let eig = hermitian_eig(&h).unwrap();
        let evolved = evolve_density(&rho, &eig, t).unwrap();
        prop_assert!((frobenius_norm(&evolved) - frobenius_norm(&rho)).abs() <= 1e-10 * frobenius_norm(&rho).max(1.0));
    }

    #[test]
    fn evolution_group_law(h in hermitian(16), v in complex_vector(16), t1 in 0.0..100.0f64, t2 in 0.0..100.0f64) {
        let n = h.dim();
        let psi = unit(v.slice(ndarray::s![..n]).to_owned());
        let rho = ComplexMatrix::outer(psi.view()).unwrap();
        let eig = hermitian_eig(&h).unwrap();
        let twice = evolve_density(&evolve_density(&rho, &eig, t1).unwrap(), &eig, t2).unwrap();
        let once = evolve_density(&rho, &eig, t1 + t2).unwrap();
        prop_assert!(frobenius_norm(&twice.sub(&once).unwrap()) <= 1e-8);
    }

    #[test]
    fn weyl_holds_for_rank_one_updates(h in hermitian(32), v in complex_vector(32)) {
        let n = h.dim();
        let b = ComplexMatrix::outer(v.slice(ndarray::s![..n])).unwrap();
        let audit = weyl_audit(&h, &b).unwrap();
        prop_assert!(audit.passed, "{audit:?}");
        prop_assert!(audit.worst_slack >= -1e-9);
    }

    #[test]
    fn rank_one_determinant(h in hermitian(16), x in complex_vector(16), y in complex_vector(16)) {
        let n = h.dim();
        // Positive definite, hence nonsingular.
        let a = h.shifted(frobenius_norm(&h) + 1.0).into_array();
        let x = x.slice(ndarray::s![..n]).to_owned();
        let y = y.slice(ndarray::s![..n]).to_owned();
        prop_assert!(rank_one_determinant_residual(&a, &x, &y).unwrap() <= 1e-8);
    }

    #[test]
    fn parseval_and_facts(t in random_tuplet()) {
        let total: f64 = t.eps().iter().map(|e| e * e).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        prop_assert!(variance_fact(&t).unwrap().holds);
        prop_assert!(constant_gap_fact(&t).unwrap().holds);
        prop_assert!(moment_monotonicity(&t).unwrap());
        prop_assert!(t.decomposition().resolution_defect() <= 1e-9);
    }

    #[test]
    fn secular_roots_match_dense(t in random_tuplet()) {
        let top = find_top_two(&t).unwrap();
        let dense = full_perturbed_spectrum(&t).unwrap();
        let scale = t.gamma().max(1.0);
        prop_assert!((top.zeta1() - dense.zeta1()).abs() <= 1e-9 * scale);
        prop_assert!((top.zeta2() - dense.zeta2()).abs() <= 1e-9 * scale);
        let check = interlacing_check(&t, &top);
        prop_assert!(check.strict_expected && check.holds, "{check:?}");
    }

    #[test]
    fn identities_hold(t in random_tuplet()) {
        let dense = full_perturbed_spectrum(&t).unwrap();
        let report = identity_audit(&t, &dense).unwrap();
        prop_assert!(report.passed, "{:?}", report.findings.iter().filter(|f| !f.passed).collect::<Vec<_>>());
    }

    #[test]
    fn walk_methods_agree(t in random_tuplet()) {
        let spec = secular_spectrum(&t).unwrap();
        let spectral = SpectralWalk::new(&t, &spec).unwrap();
        let direct = DirectWalk::new(&t).unwrap();
        let e2 = t.eps()[0].powi(2);
        prop_assert!((spectral.fidelity(0.0) - e2).abs() <= 1e-9);
        prop_assert!((direct.fidelity(0.0) - e2).abs() <= 1e-9);
        let bound = spectral.triangle_bound();
        let grid = time_grid(20.0 / t.eps()[0], 100);
        for &time in &grid {
            let f = direct.fidelity(time);
            prop_assert!((f - spectral.fidelity(time)).abs() <= 1e-8);
            prop_assert!(f <= bound + 1e-9);
        }
        prop_assert!(lower_bound_audit(&t, &direct, &grid).unwrap().passed);
    }

    #[test]
    fn moments_are_positive_under_s1(t in random_tuplet()) {
        let s1 = moment_sk(&t, 1).unwrap();
        let at_s1 = t.with_gamma(s1).unwrap();
        let top = find_top_two(&at_s1).unwrap();
        prop_assert!(top.delta_plus > 0.0 && top.delta_minus < 0.0);
    }
}

fn sorted_spectrum(spec: FamilySpec) -> Vec<f64> {
    let g = spec.build(4096).unwrap();
    let h = normalize_adjacency(&g, Convention::UnitInterval).unwrap();
    h.eig().values().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn johnson_one_is_complete(n in 3usize..40) {
        let j = FamilySpec::Johnson { n, k: 1 }.build(4096).unwrap();
        let k = FamilySpec::Complete { n }.build(4096).unwrap();
        let mut dj = j.degrees();
        let mut dk = k.degrees();
        dj.sort_unstable();
        dk.sort_unstable();
        prop_assert_eq!(dj, dk);
        let a = sorted_spectrum(FamilySpec::Johnson { n, k: 1 });
        let b = sorted_spectrum(FamilySpec::Complete { n });
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10));
    }

    #[test]
    fn conventions_differ_by_affine_map(n in 3usize..60) {
        let g = FamilySpec::Cycle { n }.build(4096).unwrap();
        let unit = normalize_adjacency(&g, Convention::UnitInterval).unwrap();
        let sym = normalize_adjacency(&g, Convention::SymmetricInterval).unwrap();
        let mapped = unit.matrix().scaled(2.0).shifted(-1.0);
        prop_assert!(mapped.sub(sym.matrix()).unwrap().as_array().iter().all(|z| z.norm() <= 1e-12));
    }
}

#[test]
fn hamming_two_two_is_four_cycle() {
    let a = sorted_spectrum(FamilySpec::Hamming { n: 2, q: 2 });
    let b = sorted_spectrum(FamilySpec::Cycle { n: 4 });
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12));
}
