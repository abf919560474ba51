use std::f64::consts::PI;

use proptest::prelude::*;

use dislosim_core::continuum::slip::Godunov;
use dislosim_core::continuum::snapshot::GridSnapshot;
use dislosim_core::continuum::{
    dislocation_density_of_slip, evolve_hp, evolve_slip, gauge_transform, solve_elasticity, stress_from_displacement, MechanicalState,
    PlasticDistortionField, SlipField, SlipSystem,
};
use dislosim_core::measures::test_fn::{box_bump, FnVectorTest, SupportBox};
use dislosim_core::measures::{curl_consistency, format_curves, pair_vector, parse_curves, DislocationCurve};
use dislosim_core::mobility::{alpha_tilde, glide_direction_check, normal_velocity, normal_velocity_via_alpha, MobilityLaw};
use dislosim_core::spectral::Spectral;
use dislosim_core::tensor::{Elasticity, GeneralElasticity, IsotropicElasticity};
use dislosim_core::{PeriodicCell, SymTensor3, Vec3};

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

fn unit() -> impl Strategy<Value = Vec3> {
    vec3(1.0).prop_filter("nonzero", |v| v.norm() > 0.1).prop_map(|v| v * (1.0 / v.norm()))
}

fn sym(r: f64) -> impl Strategy<Value = SymTensor3> {
    prop::array::uniform6(-r..r).prop_map(|c| SymTensor3::new(c[0], c[1], c[2], c[3], c[4], c[5]))
}

fn elasticity() -> impl Strategy<Value = Elasticity> {
    prop_oneof![
        (0.1..3.0, 0.1..0.45).prop_map(|(mu, nu)| IsotropicElasticity::from_poisson(mu, nu).unwrap().into()),
        (1.0..3.0, 0.0..0.4, 0.3..1.5).prop_map(|(d, o, s)| {
            let mut r = [[0.0; 6]; 6];
            for i in 0..3 {
                for j in 0..3 {
                    r[i][j] = o * d;
                }
                r[i][i] = d;
                r[i + 3][i + 3] = s;
            }
            GeneralElasticity::from_rows(r).unwrap().into()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn elasticity_linear_symmetric_positive(d in elasticity(), a in sym(1.0), b in sym(1.0), s in -3.0..3.0f64) {
        let lin = d.apply(&(a * s + b)) - (d.apply(&a) * s + d.apply(&b));
        prop_assert!(lin.max_abs() <= 1e-12 * (1.0 + a.max_abs() + b.max_abs()));
        let ab = d.apply(&a).contract(&b);
        let ba = d.apply(&b).contract(&a);
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        if a.norm() > 1e-6 {
            prop_assert!(d.apply(&a).contract(&a) > 0.0);
        }
        let back = d.apply_inverse(&d.apply(&a));
        prop_assert!((back - a).max_abs() <= 1e-10);
    }

    #[test]
    fn mobility_invariants(tau in unit(), b in unit(), bs in 0.3..2.0f64, xi in vec3(3.0), t in sym(1.0), c in 0.2..3.0f64, gamma in 1.0..4.0f64) {
        let b = b * bs;
        prop_assume!(b.cross(&tau).norm() > 1e-4 * bs);
        let law = MobilityLaw::power(c, gamma).unwrap();
        let a = alpha_tilde(&law, &tau, &xi, &b).unwrap();
        prop_assert!(xi.dot(&a) >= 0.0);
        let v = normal_velocity(&law, &tau, &t, &b).unwrap();
        prop_assert!(v.dot(&tau).abs() <= 1e-12 * v.norm().max(1.0));
        prop_assert!(glide_direction_check(&tau, &b, &v).unwrap());
        let w = normal_velocity_via_alpha(&law, &tau, &t, &b).unwrap();
        prop_assert!((v - w).norm() <= 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn curve_pairing_bounded_by_length(r in 0.2..1.5f64, n in 8usize..64, b in unit(), w in vec3(1.0)) {
        let e_b = if b.cross(&Vec3::E3).norm() > 0.1 { b.cross(&Vec3::E3) * (1.0 / b.cross(&Vec3::E3).norm()) } else { Vec3::E1 };
        let e_a = e_b.cross(&b);
        let c = DislocationCurve::circle(Vec3::ZERO, r, n, e_a, e_b, 0.3, b).unwrap();
        let half = Vec3::new(2.0, 2.0, 2.0);
        let phi = FnVectorTest::new(SupportBox::centered(Vec3::ZERO, half), move |x| (w + Vec3::new(x[1], 0.0, x[0])) * box_bump(x, &Vec3::ZERO, &half));
        // |x2, 0, x1| <= 2√2 on the support and the bump peaks at e⁻³
        let sup = (w.norm() + 8f64.sqrt()) * (-3.0f64).exp();
        let p = pair_vector(&c, &phi);
        prop_assert!(p.abs() <= b.norm() * c.length() * sup + 1e-12);
    }

    #[test]
    fn curve_file_round_trip(r in 0.1..5.0f64, n in 3usize..20, b in vec3(2.0), phase in 0.0..1.0f64) {
        prop_assume!(b.norm() > 1e-3);
        let c = DislocationCurve::circle(Vec3::new(0.5, -1.0, 2.0), r, n, Vec3::E1, Vec3::E2, phase, b).unwrap();
        let open = DislocationCurve::open(c.vertices()[..n.min(5)].to_vec(), b);
        let mut curves = vec![c];
        if let Ok(o) = open { curves.push(o); }
        let back = parse_curves(&format_curves(&curves)).unwrap();
        prop_assert_eq!(back, curves);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn godunov_step_is_monotone(sigma in -0.5..0.5f64, r in 0.15..0.35f64, cx in 0.3..0.7f64) {
        let cell = PeriodicCell::new([1.0, 1.0, 0.25], [16, 16, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        let sf = SlipField::smoothed_disc(cell, sys, Vec3::new(cx, 0.5, 0.0), r, 0.1875, 1.0).unwrap();
        let st = MechanicalState::uniform(cell, SymTensor3::new(0.0, 0.0, 0.0, 0.0, sigma, 0.0), IsotropicElasticity::new(1.0, 1.0).unwrap().into());
        let law = MobilityLaw::power(1.0, 2.0).unwrap();
        let dt = 0.5 * dislosim_core::continuum::slip::slip_stable_dt(&sf, &st, &law).unwrap().min(1.0);
        let next = evolve_slip(&sf, &st, &law, dt, &Godunov).unwrap();
        for (a, b) in sf.eps_p.iter().zip(&next.eps_p) {
            if sigma >= 0.0 { prop_assert!(b >= a); } else { prop_assert!(b <= a); }
        }
    }

    #[test]
    fn stream_function_consistency(amps in prop::array::uniform4(-1.0..1.0f64)) {
        let cell = PeriodicCell::new([2.0, 1.0, 0.5], [16, 16, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        let eps: Vec<f64> = (0..cell.node_count()).map(|i| {
            let x = cell.position(i);
            amps[0] * (PI * x[0]).sin() + amps[1] * (2.0 * PI * x[1]).cos() + amps[2] * (PI * x[0] + 2.0 * PI * x[1]).sin() + amps[3]
        }).collect();
        let sf = SlipField::new(cell, eps, sys).unwrap();
        let rho = dislocation_density_of_slip(&sf);
        let h: Vec<Vec3> = sf.to_distortion().hp;
        prop_assert!(curl_consistency(&h, &rho).unwrap() <= 1e-10);
    }

    #[test]
    fn evolve_hp_keeps_b_component_zero(a in prop::array::uniform3(-1.0..1.0f64), t in sym(0.3)) {
        let cell = PeriodicCell::cube(1.0, 8).unwrap();
        let hp: Vec<Vec3> = (0..cell.node_count()).map(|i| {
            let x = cell.position(i);
            Vec3::new(0.0, a[0] * (2.0 * PI * x[0]).sin() + a[2] * (2.0 * PI * x[2]).cos(), a[1] * (2.0 * PI * (x[0] + x[1])).cos())
        }).collect();
        let f = PlasticDistortionField::new(cell, hp, Vec3::E1 * 1.5).unwrap();
        let st = MechanicalState::uniform(cell, t, IsotropicElasticity::new(1.0, 1.0).unwrap().into());
        let law = MobilityLaw::linear();
        let dt = 0.5 * dislosim_core::continuum::plastic::hp_stable_dt(&f, &st, &law).min(1.0);
        let next = evolve_hp(&f, &st, &law, dt).unwrap();
        prop_assert!(next.volume_residual() <= 1e-12);
    }

    #[test]
    fn gauge_leaves_stress_invariant(k in prop::array::uniform3(-2i32..=2), amp in -1.0..1.0f64, ph in 0.0..6.28f64) {
        let cell = PeriodicCell::new([1.0, 1.0, 1.0], [8, 8, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        let d: Elasticity = IsotropicElasticity::new(0.7, 1.1).unwrap().into();
        let sf = SlipField::smoothed_disc(cell, sys, Vec3::new(0.5, 0.5, 0.5), 0.25, 0.2, 1.0).unwrap();
        let hp = sf.to_distortion();
        let st = solve_elasticity(&cell, &d, &hp.plastic_strain(), &SymTensor3::default()).unwrap();
        let sp = Spectral::new(cell);
        let gamma: Vec<f64> = (0..cell.node_count()).map(|i| {
            let x = cell.position(i);
            amp * (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]) + ph).sin()
        }).collect();
        let (u2, hp2) = gauge_transform(&sp, &st.displacement, &hp, &gamma).unwrap();
        let t2 = stress_from_displacement(&sp, &d, &st.mean_strain, &u2, &hp2.plastic_strain());
        let scale = st.stress.iter().map(|t| t.max_abs()).fold(0.0, f64::max);
        for (a, b) in st.stress.iter().zip(&t2) {
            prop_assert!((*a - *b).max_abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn grid_snapshot_round_trip(vals in prop::collection::vec(prop::num::f64::ANY, 512)) {
        let cell = PeriodicCell::cube(1.0, 8).unwrap();
        let snap = GridSnapshot::scalar(&cell, "eps_p", &vals).unwrap();
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        let back = GridSnapshot::read_from(&mut buf.as_slice()).unwrap();
        prop_assert!(back.data.iter().zip(&vals).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
