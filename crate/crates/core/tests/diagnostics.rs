mod common;

use common::*;
use multiphase::diagnostics::*;
use multiphase::linalg::Mat;
use multiphase::model::*;
use multiphase::solver::*;
use proptest::prelude::*;
use rand::Rng;

fn random_field(rng: &mut impl Rng, n: usize, cells: usize, margin: f64) -> StateField {
    let data: Vec<f64> = (0..cells).flat_map(|_| interior(rng, n, margin)).collect();
    StateField::new(n, cells, data, 0.0).unwrap()
}

fn every_step(t_final: f64) -> SolverConfig {
    SolverConfig {
        t_final,
        sample_every: 1,
        ..SolverConfig::default()
    }
}

#[test]
fn relative_entropy_vanishes_only_at_reference() {
    let mesh = Mesh1D::new(12).unwrap();
    let uinf = [0.2, 0.5];
    let same = StateField::constant(&uinf, 12);
    assert!(relative_boltzmann(&same, &mesh, &uinf).unwrap().abs() < 1e-12);
    let mut rng = rng(30);
    for _ in 0..200 {
        let f = random_field(&mut rng, 2, 12, 1e-3);
        assert!(relative_boltzmann(&f, &mesh, &uinf).unwrap() > 0.0);
    }
}

#[test]
fn zero_reference_needs_zero_field() {
    let mesh = Mesh1D::new(4).unwrap();
    let filled = StateField::constant(&[0.3, 0.7], 4);
    assert!(relative_boltzmann(&filled, &mesh, &[0.3, 0.7]).is_ok());
    let partial = StateField::constant(&[0.3, 0.6], 4);
    assert!(relative_boltzmann(&partial, &mesh, &[0.3, 0.7]).is_err());
}

#[test]
fn csiszar_kullback_pinsker() {
    let mesh = Mesh1D::new(20).unwrap();
    let mut rng = rng(31);
    for _ in 0..500 {
        let f = random_field(&mut rng, 2, 20, 1e-4);
        let uinf = interior(&mut rng, 2, 1e-3);
        let h = relative_boltzmann(&f, &mesh, &uinf).unwrap();
        let ue = extend(&uinf);
        let mut l1 = 0.0;
        let mut mass = 0.0;
        for j in 0..20 {
            for (a, b) in extend(f.cell(j)).iter().zip(&ue) {
                l1 += (a - b).abs() * mesh.dx();
                mass += a * mesh.dx();
            }
        }
        assert!(l1 * l1 <= 2.0 * mass * h + 1e-10, "{l1} {h}");
    }
}

#[test]
fn relative_rao_bounds_l2_distance() {
    let spec = preset("vf-skt").unwrap();
    let alpha = rao_alpha(&spec).unwrap();
    assert!((alpha - 0.5).abs() < 1e-12);
    let mesh = Mesh1D::new(25).unwrap();
    let mut rng = rng(32);
    for _ in 0..100 {
        let (a, b) = (random_field(&mut rng, 2, 25, 0.0), random_field(&mut rng, 2, 25, 0.0));
        let hr = relative_rao(&spec, &a, &b, &mesh).unwrap();
        let l2: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * mesh.dx();
        assert!(hr >= 0.5 * alpha * l2 - 1e-14);
    }
}

#[test]
fn rao_needs_constant_symmetric_q() {
    let mesh = Mesh1D::new(4).unwrap();
    let f = StateField::constant(&[0.2, 0.3], 4);
    assert!(rao_entropy(&preset("tumor-jb").unwrap(), &f, &mesh).is_err());
    assert!(rao_entropy(&preset("vf-skt").unwrap(), &f, &mesh).is_ok());
}

#[test]
fn rao_entropy_decreases_for_busenberg_travis() {
    let spec = preset("vf-busenberg-travis").unwrap();
    let mesh = Mesh1D::new(200).unwrap();
    let init = default_initial(&mesh).unwrap();
    let traj = run(&spec, &mesh, &every_step(0.2), &init).unwrap();
    let h: Vec<f64> = traj.samples.iter().map(|f| rao_entropy(&spec, f, &mesh).unwrap()).collect();
    assert!(DiagnosticsSeries::max_increase(&h) <= 1e-8);
    assert!(h.last().unwrap() < &h[0]);
}

#[test]
fn discrete_entropy_balance() {
    let spec = preset("vf-skt").unwrap();
    let mesh = Mesh1D::new(600).unwrap();
    let init = default_initial(&mesh).unwrap();
    let cfg = every_step(0.05);
    let traj = run(&spec, &mesh, &cfg, &init).unwrap();
    for w in traj.samples.windows(2) {
        let dh = (boltzmann_entropy(&w[1], &mesh) - boltzmann_entropy(&w[0], &mesh)) / cfg.dt;
        let (quad, root) = boltzmann_dissipation(&spec, &w[1], &mesh).unwrap();
        assert!(dh + quad + root <= 1e-3, "t={}: {dh} + {quad} + {root}", w[1].t);
    }
}

#[test]
fn combined_entropy_decreases_for_degenerate_drag() {
    let spec = preset("vf-skt")
        .unwrap()
        .with_drag(DragLaw::Degenerate {
            k_star: pair_table(1.0, 1.0, 2.0),
        })
        .unwrap();
    let mesh = Mesh1D::new(100).unwrap();
    let init = default_initial(&mesh).unwrap();
    let traj = run(&spec, &mesh, &every_step(0.1), &init).unwrap();
    let hb: Vec<f64> = traj.samples.iter().map(|f| boltzmann_entropy(f, &mesh)).collect();
    let hr: Vec<f64> = traj.samples.iter().map(|f| rao_entropy(&spec, f, &mesh).unwrap()).collect();
    let found = [0.0, 0.1, 1.0, 10.0, 100.0].into_iter().find(|c| {
        let comb: Vec<f64> = hb.iter().zip(&hr).map(|(b, r)| b + c * r).collect();
        DiagnosticsSeries::max_increase(&comb) <= 1e-8
    });
    assert!(found.is_some());
}

#[test]
fn decay_fit_examples() {
    let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
    let h: Vec<f64> = t.iter().map(|t| (-2.0 * t).exp()).collect();
    let fit = decay_fit(&t, &h, None).unwrap();
    assert!((fit.lambda - 2.0).abs() < 1e-6);
    let flat = decay_fit(&t, &vec![0.3; 50], None).unwrap();
    assert!(flat.lambda.abs() < 1e-12);
}

#[test]
fn l1_error_examples() {
    let fine = StateField::constant(&[0.2, 0.3], 8);
    let coarse = StateField::constant(&[0.25, 0.1], 4);
    let e = l1_error(&fine, &coarse).unwrap();
    assert!((e[0] - 0.05).abs() < 1e-15 && (e[1] - 0.2).abs() < 1e-15);
    assert_eq!(l1_error(&fine, &restrict(&fine, 4).unwrap()).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn csv_outputs_have_headers() {
    let spec = preset("vf-skt").unwrap();
    let mesh = Mesh1D::new(10).unwrap();
    let init = default_initial(&mesh).unwrap();
    let traj = run(&spec, &mesh, &every_step(0.003), &init).unwrap();
    let uinf = steady_state(&init);
    let s = DiagnosticsSeries::compute(&spec, &mesh, &traj.samples, &traj.sample_iterations, &uinf, None).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().next().unwrap().starts_with("t,mass_1,mass_2,H_B"));
    assert_eq!(text.lines().count(), traj.samples.len() + 1);
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &mesh, &[init]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,x,u1,u2,u0");
    assert_eq!(text.lines().count(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restriction_preserves_mass(
        data in prop::collection::vec(0.0..0.5f64, 2 * 24),
        coarse in prop::sample::select(vec![4usize, 5, 6, 7, 8, 12, 24]),
    ) {
        let fine = StateField::new(2, 24, data, 0.0).unwrap();
        let c = restrict(&fine, coarse).unwrap();
        let (mf, mc) = (fine.masses(1.0 / 24.0), c.masses(1.0 / coarse as f64));
        for (a, b) in mf.iter().zip(&mc) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn heat_model_has_no_rao_dissipation_terms() {
    let spec = ModelSpec::new("heat", 2, DragLaw::Unit, PressureLaw::ConstantMatrix(Mat::zeros(3, 3)), Mat::zeros(3, 3), 0.1).unwrap();
    let mesh = Mesh1D::new(10).unwrap();
    let (q, r) = boltzmann_dissipation(&spec, &default_initial(&mesh).unwrap(), &mesh).unwrap();
    assert_eq!((q, r), (0.0, 0.0));
}
