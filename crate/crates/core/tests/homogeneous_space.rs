use schrogeo_core::geometry::fd::ricci_fd;
use schrogeo_core::geometry::ricci_scalar;
use schrogeo_core::homogeneous::*;

fn cfg(d: usize, lambda: f64, mu: f64) -> SchrodingerManifoldConfig {
    SchrodingerManifoldConfig::new(d, lambda, mu).unwrap()
}

#[test]
fn radial_metric_coefficient() {
    // ĝ(∂r̂, ∂r̂) = −2λ/r̂² = 1/4 at λ = −½, r̂ = 2
    let c = cfg(1, -0.5, 0.0);
    let dp = induced_metric(
        &c,
        &[0.1, 0.2, 0.3, 2.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    assert!((dp.chart - 0.25).abs() < 1e-15);
    assert!(dp.difference() < 1e-10);
}

#[test]
fn clock_at_radius_two() {
    // θ̂(∂t̂) = 1/r² with r = r̂/√(−2λ)
    let c = cfg(1, -0.5, 1.0);
    let dp = theta_hat(&c, &[0.1, 0.2, 0.3, 2.0], &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!((dp.chart - 0.25).abs() < 1e-15);
    assert!(dp.difference() < 1e-10);
}

#[test]
fn ricci_matches_finite_differences() {
    let c = cfg(2, -0.3, 1.7);
    let p = [0.2, -0.1, 0.4, 0.3, 1.2];
    let (exact, _) = ricci_scalar(&bulk_metric(&c), &p).unwrap();
    let fd = ricci_fd(&bulk_metric(&c), &p).unwrap();
    assert!((exact - fd).amax() < 1e-5);
}

#[test]
fn dual_paths_on_six_configurations() {
    for (d, l, m) in [
        (1, -0.5, 1.0),
        (1, -2.0, 0.0),
        (2, -0.3, 1.7),
        (2, -1.0, -1.0),
        (3, -0.5, 2.0),
        (3, -2.0, 1.0),
    ] {
        let r = dual_path_check(&cfg(d, l, m), 20, 3, 1e-10).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}

#[test]
fn one_negative_direction_for_every_mu() {
    for mu in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let r = signature_check(&cfg(2, -0.7, mu), 10, 1).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}

#[test]
fn isotropy_d3_values() {
    let r = isotropy_check(&cfg(3, -0.5, 1.0), 5, 1).unwrap();
    assert_eq!(r.get("bulk_isotropy_dim").unwrap().observed, Some(7.0));
    assert_eq!(r.get("bulk_space_dim").unwrap().observed, Some(6.0));
    assert_eq!(r.get("boundary_isotropy_dim").unwrap().observed, Some(8.0));
    assert_eq!(r.get("boundary_space_dim").unwrap().observed, Some(5.0));
}

#[test]
fn boundary_structure_fifty_samples() {
    let r = boundary_structure(3, 50, 42, 1e-8).unwrap();
    assert!(r.all_pass(), "{r:?}");
}

#[test]
fn audit_grid() {
    for d in 1..=3 {
        for l in [-2.0, -1.0, -0.5, -0.3] {
            for m in [-1.0, 0.0, 1.0, 2.0] {
                let r = schrodinger_axiom_audit(&cfg(d, l, m), 1e-8).unwrap();
                assert_eq!(
                    r.all_pass(),
                    l == -0.5 && m == 1.0,
                    "d={d} lambda={l} mu={m}"
                );
            }
        }
    }
}
