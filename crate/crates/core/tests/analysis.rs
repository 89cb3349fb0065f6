mod common;

use common::*;
use multiphase::analysis::*;
use multiphase::linalg::{sym_eig_min, Mat};
use multiphase::matrices::*;
use multiphase::model::*;
use proptest::prelude::*;
use rand::Rng;

fn two_species(k: (f64, f64, f64), q: [[f64; 2]; 2]) -> ModelSpec {
    let qm = embed(&Mat::from_rows(&[&q[0], &q[1]]));
    ModelSpec::new(
        "g",
        2,
        DragLaw::Constant(pair_table(k.0, k.1, k.2)),
        PressureLaw::ConstantMatrix(qm),
        Mat::zeros(3, 3),
        0.0,
    )
    .unwrap()
}

#[test]
fn threshold_value() {
    let t = tumor_theta_threshold(0.2, 0.0015);
    assert!((t - 46.188).abs() < 0.01, "{t}");
}

#[test]
fn tumor_trace_and_det_match_assembled() {
    for (beta, theta) in [(1.0, 100.0), (0.3, 20.0), (2.0, 4.0)] {
        let spec = tumor_trace_spec(beta, theta).unwrap();
        for u in box_lattice([0.0, 0.0], [1.0, 1.0], 64) {
            if u[0] + u[1] >= 1.0 {
                continue;
            }
            let a = assemble_a(&spec, &pt(&u)).unwrap();
            let (tr, det) = tumor_trace_det([u[0], u[1]], beta, theta);
            let scale = a.frobenius_norm();
            assert!((a.trace() - tr).abs() <= 1e-10 * tr.abs().max(scale), "{u:?}");
            assert!((a.det() - det).abs() <= 1e-10 * det.abs().max(scale * scale), "{u:?}");
        }
    }
}

#[test]
fn counterexample_is_indefinite_in_q() {
    let spec = counterexample_spec();
    let q = box_lattice([0.1, 0.55], [0.25, 0.75], 16);
    let qt: Vec<Vec<f64>> = q.iter().map(|u| vec![u[1], u[0]]).collect();
    for pts in [q, qt] {
        let rep = scan_points(&spec, &pts, 16, ScanPredicate::positive_definite()).unwrap();
        assert_eq!(rep.violations.len(), rep.points);
    }
    let whole = scan_simplex(&spec, 32, ScanPredicate::positive_definite()).unwrap();
    assert!(!whole.pass);
}

#[test]
fn stable_for_presets_meeting_hypotheses() {
    let mut rng = rng(11);
    let drags = [DragLaw::Unit, DragLaw::Constant(pair_table(1.0, 2.5, 2.0))];
    let mut checked = 0;
    for name in PRESET_NAMES {
        let base = preset(name).unwrap();
        if !entropy_hypotheses(&base, 32).unwrap().holds {
            continue;
        }
        for drag in drags.clone() {
            let spec = base.clone().with_drag(drag).unwrap();
            for _ in 0..200 {
                let u = interior(&mut rng, 2, 1e-6);
                let m = diffusion_matrix(&spec, &pt(&u)).unwrap();
                assert!(positively_stable(&m).unwrap().min_real_part > -1e-10, "{name} {u:?}");
            }
            checked += 1;
        }
    }
    assert!(checked >= 4);
}

#[test]
fn thin_film_is_flagged() {
    let spec = preset("thin-film").unwrap();
    assert!(!entropy_hypotheses(&spec, 32).unwrap().holds);
    let rep = scan_simplex(&spec, 16, ScanPredicate::positively_stable()).unwrap();
    assert!(!rep.pass);
}

#[test]
fn ties_are_unclassified() {
    let c = prop_g_classify(1.0, 1.0, 2.0, [[1.0, 0.5], [0.5, 1.0]]).unwrap();
    assert_eq!(c.verdict, ClassVerdict::Tie);
    assert!(!c.certified);
    assert!(c.label().starts_with("unclassified"));
}

#[test]
fn perturbation_threshold_keeps_g_definite() {
    let ks = pair_table(1.0, 2.0, 0.5);
    for (name, eta) in [("vf-skt", 0.0), ("vf-busenberg-travis", 0.0)] {
        let spec = preset(name)
            .unwrap()
            .with_eta(eta)
            .unwrap()
            .with_drag(DragLaw::Perturbed { k_star: ks.clone(), eps: 0.0 })
            .unwrap();
        let th = perturb_threshold(&spec, 24).unwrap();
        assert!(th.eps0 > 0.0 && th.alpha > 0.0);
        let at = with_eps(&spec, th.eps0).unwrap();
        for u in simplex_lattice(2, 24) {
            let p = pt(&u);
            let g = hessian_hb(&p).unwrap().matmul(&diffusion_matrix(&at, &p).unwrap());
            assert!(sym_eig_min(&g.sym_part()).unwrap() >= 0.5 * th.alpha - 1e-9, "{name} {u:?}");
        }
    }
}

#[test]
fn perturbed_threshold_needs_perturbed_drag() {
    assert!(perturb_threshold(&preset("vf-skt").unwrap(), 16).is_err());
}

#[test]
fn decomposition_reproduces_quadratic_form() {
    let mut rng = rng(12);
    for _ in 0..2000 {
        let mut k = [0.0; 3];
        for v in &mut k {
            *v = rng.gen_range(0.1..10.0);
        }
        let q = [
            [rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0)],
            [rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0)],
        ];
        let u = interior(&mut rng, 2, 1e-3);
        let z = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let spec = two_species((k[0], k[1], k[2]), q);
        let g = assemble_g(&spec, &pt(&u)).unwrap();
        let d = g_decompose(k[0], k[1], k[2], q, [u[0], u[1]]).unwrap();
        let lhs = g.quad_form(&z);
        let rhs = d.form(z) / d.kappa;
        let scale = g.frobenius_norm() * (z[0] * z[0] + z[1] * z[1]);
        assert!((lhs - rhs).abs() <= 1e-10 * scale, "{k:?} {q:?} {u:?}: {lhs} vs {rhs}");
    }
}

fn positive() -> impl Strategy<Value = f64> {
    0.05..10.0f64
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, max_global_rejects: 200_000, ..ProptestConfig::default() })]

    // A certified classification must survive a dense lattice scan.
    #[test]
    fn certified_implies_definite(
        k01 in positive(), k02 in positive(), k12 in positive(),
        q11 in positive(), q12 in 0.05..1.5f64, q21 in 0.05..1.5f64, q22 in positive(),
    ) {
        let q = [[q11, q12], [q21, q22]];
        let c = prop_g_classify(k01, k02, k12, q).unwrap();
        prop_assume!(c.certified);
        let spec = two_species((k01, k02, k12), q);
        let rep = scan_simplex(&spec, 64, ScanPredicate::DefiniteG { bound: -1e-9 }).unwrap();
        prop_assert!(rep.pass, "{}\n{}", c, rep);
    }
}

#[test]
fn some_inputs_are_certified() {
    // q diagonal-dominant with a case-1 ordering
    let c = prop_g_classify(1.0, 2.0, 1.5, [[1.0, 0.1], [0.1, 1.0]]).unwrap();
    assert_eq!(c.verdict, ClassVerdict::Classified(DragCase::Case1));
    let mut rng = rng(13);
    let mut certified = 0;
    for _ in 0..5000 {
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..10.0)).collect();
        let q = [[rng.gen_range(0.05..10.0), rng.gen_range(0.05..1.0)], [rng.gen_range(0.05..1.0), rng.gen_range(0.05..10.0)]];
        if prop_g_classify(k[0], k[1], k[2], q).unwrap().certified {
            certified += 1;
        }
    }
    assert!(certified > 50, "{certified}");
}
