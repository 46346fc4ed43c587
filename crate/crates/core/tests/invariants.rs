//! Property checks over the public API, against dense diagonalisation and
//! elementary identities rather than the library's own closed forms.

use dbh_core::dressed::{dressed_triple, manifold_ground_energy, rabi};
use dbh_core::eig::{full_spectrum, ground_state};
use dbh_core::hamiltonian::{build_dicke_block, build_mean_field_matrix_in, Basis, Ordering};
use dbh_core::io::{phase_table, Field};
use dbh_core::meanfield::{ground_energy_at_psi, minimize_over_psi};
use dbh_core::sweep::run_phase_diagram;
use dbh_core::{GridSpec, ModelParams, Phase};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (
        1usize..=5,
        0.0..20.0f64,
        0.0..0.5f64,
        -2.0..1.0f64,
        0.0..5.0f64,
        2usize..=14,
    )
        .prop_map(|(atoms, x, kappa, mu_rel, psi, n_max)| {
            ModelParams::resonant(atoms, x)
                .with_kappa(kappa)
                .with_mu_rel(mu_rel)
                .with_psi(psi)
                .with_n_max(n_max)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orderings_describe_the_same_operator(p in params()) {
        let a = build_mean_field_matrix_in(&p, &Basis::new(p.atoms, p.n_max, Ordering::AtomMajor)).unwrap();
        let b = build_mean_field_matrix_in(&p, &Basis::new(p.atoms, p.n_max, Ordering::PhotonMajor)).unwrap();
        let (ea, eb) = (full_spectrum(&a).unwrap(), full_spectrum(&b).unwrap());
        let tol = 1e-10 * a.norm_inf().max(1.0);
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn without_field_excitation_number_is_conserved(p in params()) {
        let p = p.with_psi(0.0);
        let basis = Basis::new(p.atoms, p.n_max, Ordering::PhotonMajor);
        let a = build_mean_field_matrix_in(&p, &basis).unwrap();
        for i in 0..a.dim() {
            for j in 0..i {
                if a.get(i, j) != 0.0 {
                    prop_assert_eq!(basis.state(i).excitations(), basis.state(j).excitations());
                }
            }
        }
    }

    #[test]
    fn ground_state_is_certified_lowest(p in params()) {
        let basis = Basis::new(p.atoms, p.n_max, Ordering::PhotonMajor);
        let a = build_mean_field_matrix_in(&p, &basis).unwrap();
        let g = ground_state(&a).unwrap();
        let scale = a.norm_inf().max(1.0);
        let norm: f64 = g.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        prop_assert!(g.residual(&a) <= 1e-9 * scale);
        let dense = full_spectrum(&a).unwrap()[0];
        prop_assert!((g.value - dense).abs() <= 1e-9 * scale, "{} vs {}", g.value, dense);
    }

    #[test]
    fn manifold_energy_is_linear_in_mu(atoms in 1usize..=4, x in 0.0..20.0f64, n in 0usize..12, mu in -5.0..5.0f64) {
        let p = ModelParams::resonant(atoms, x);
        let e0 = manifold_ground_energy(&p.with_mu(0.0), n).unwrap();
        let e = manifold_ground_energy(&p.with_mu(mu), n).unwrap();
        prop_assert!((e - (e0 - n as f64 * mu)).abs() <= 1e-10 * (1.0 + e0.abs() + (n as f64 * mu).abs()));
    }

    #[test]
    fn dressed_triple_matches_block_and_is_orthonormal(n in 2usize..40, x in 0.0..30.0f64) {
        let t = dressed_triple(n, x).unwrap();
        let (e0, ep) = (t.e_zero.unwrap(), t.e_plus.unwrap());
        prop_assert!(t.e_minus <= e0 && e0 <= ep);
        prop_assert_eq!(e0, n as f64 * x);
        let block = build_dicke_block(n, &ModelParams::resonant(2, x)).unwrap();
        let spectrum = full_spectrum(&block).unwrap();
        for (a, b) in [t.e_minus, e0, ep].iter().zip(&spectrum) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
        let vs = [t.v_minus, t.v_zero.unwrap(), t.v_plus.unwrap()];
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| vs[i][k] * vs[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-12);
            }
        }
        let r = rabi(n, x).unwrap();
        prop_assert!((ep - t.e_minus - r).abs() <= 1e-10 * (1.0 + r));
    }

    #[test]
    fn minimiser_beats_any_sampled_field(p in params(), probes in prop::collection::vec(0.0..8.0f64, 4)) {
        let s = minimize_over_psi(&p).unwrap();
        prop_assert!(s.psi_min >= 0.0 && s.rho >= 0.0);
        prop_assert_eq!(s.phase, Phase::classify(s.psi_min));
        let tol = 1e-9 * (1.0 + s.e_ground.abs());
        prop_assert!(s.e_ground <= ground_energy_at_psi(&p.with_psi(0.0)).unwrap() + tol);
        for psi in probes {
            prop_assert!(s.e_ground <= ground_energy_at_psi(&p.with_psi(psi)).unwrap() + 1e-6 * (1.0 + s.e_ground.abs()));
        }
    }
}

#[test]
fn phase_csv_is_rectangular_and_parses_back() {
    let spec = GridSpec::new(ModelParams::resonant(2, 0.5).with_n_max(10))
        .with_kappa_range(0.0, 0.05, 4)
        .with_mu_rel_range(-1.3, -0.9, 5);
    let grid = run_phase_diagram(&spec, 2).unwrap();
    let table = phase_table(&grid);
    let csv = table.to_csv();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), table.columns.len());
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), header.len(), "{line}");
        let kappa: f64 = fields[0].parse().unwrap();
        let mu_rel: f64 = fields[1].parse().unwrap();
        assert!((0.0..=0.05).contains(&kappa) && (-1.3..=-0.9).contains(&mu_rel));
        assert!(fields[5] == "MI" || fields[5] == "SF");
        rows += 1;
    }
    assert_eq!(rows, spec.len());
    assert!(table
        .rows
        .iter()
        .all(|r| !r.iter().any(|f| matches!(f, Field::Empty))));
}
