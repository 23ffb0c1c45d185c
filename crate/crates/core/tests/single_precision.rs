use aqpe_core::hamiltonians::{build_xy_target, XYGraph};
use aqpe_core::linalg::{eig_hermitian, pure_density, unitarity_deviation};
use aqpe_core::qstates::{squeezed_coherent, FockTruncation, SqueezedCoherentSpec};
use aqpe_core::tomography::wigner_points;
use nalgebra::Complex;

#[test]
fn f32_propagator_is_unitary() {
    let h = build_xy_target(&XYGraph::<f32>::two_site(1.0), 2).unwrap();
    let u = eig_hermitian(&h).unwrap().propagator(0.8);
    assert!(unitarity_deviation(&u) < 1e-5);
}

#[test]
fn f32_vacuum_wigner_peak() {
    let spec = SqueezedCoherentSpec::new(
        Complex::new(0.0f32, 0.0),
        Complex::new(0.0, 0.0),
        FockTruncation::new(20).unwrap(),
    )
    .unwrap();
    let rho = pure_density(&squeezed_coherent(&spec).unwrap());
    let w = wigner_points(&rho, &[Complex::new(0.0, 0.0)]).unwrap()[0];
    assert!((w - std::f32::consts::FRAC_2_PI).abs() < 1e-5);
}
