use bnls::continuum::{
    comb_oracle, global_mass, linear_propagate, nlw_energy, ContinuumModel, LawsonRk4,
    LeapfrogStepper, WaveNonlinearity, WaveState,
};
use bnls::field::{make_initial_grid, CombCoefficients, CombSeq, Coupling, InitialData, Mollifier};
use bnls::newton::{newton_iterate, NewtonOptions, RadiusSchedule};
use bnls::Complex64;
use proptest::prelude::*;

fn comb(coefficients: CombCoefficients, m: usize, l: f64) -> bnls::field::GridField {
    make_initial_grid(
        &InitialData::GaussianComb {
            amplitude: 1.0,
            coefficients,
        },
        m,
        l,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectral_free_flow_matches_closed_form(
        re in proptest::collection::vec(-1.0f64..1.0, 1..8),
        t in 0.0f64..3.0,
    ) {
        let first = -(re.len() as i64) / 2;
        let seq = CombSeq::new(first, re.iter().map(|&r| Complex64::new(0.6 * r, 0.5 * r)).collect());
        let u0 = comb(CombCoefficients::Explicit(seq.clone()), 512, 128.0);
        let u = linear_propagate(&u0, t);
        for j in (0..u.len()).step_by(7) {
            prop_assert!((u.values()[j] - comb_oracle(&seq, t, u.x(j))).norm() < 1e-10);
        }
    }
}

#[test]
fn lawson_conserves_mass_of_mollified_flow() {
    let phi = Mollifier::gaussian(1.0).unwrap();
    let model = ContinuumModel::new(phi, 32.0, 128, 1e-2, Coupling::Defocusing).unwrap();
    let mut u = comb(CombCoefficients::RandomPhase { seed: 4 }, 128, 32.0);
    let m0 = global_mass(&u);
    LawsonRk4::new(model).advance(&mut u, 200).unwrap();
    assert!(((global_mass(&u) - m0) / m0).abs() < 1e-10);
}

#[test]
fn leapfrog_energy_is_bounded() {
    let nl = WaveNonlinearity::CUBIC;
    let u0 = comb(CombCoefficients::RandomReal { seed: 2 }, 256, 16.0);
    let mut s = WaveState::at_rest(u0);
    let e0 = nlw_energy(&s, nl);
    let mut stepper = LeapfrogStepper::new(256, 16.0, 1.0 / 256.0, nl).unwrap();
    stepper.advance(&mut s, 2560).unwrap();
    assert!(((nlw_energy(&s, nl) - e0) / e0).abs() < 1e-4);
}

#[test]
fn newton_converges_for_small_cosine_data() {
    let psi0 = make_initial_grid(
        &InitialData::Periodic {
            amplitudes: vec![0.1],
            frequencies: vec![1.0],
        },
        32,
        2.0 * std::f64::consts::PI,
    )
    .unwrap();
    let sol = newton_iterate(
        &psi0,
        0.3,
        RadiusSchedule::new(1.0).unwrap(),
        NewtonOptions::default(),
    )
    .unwrap();
    assert!(sol.report.converged);
    assert!(sol.state.n <= 5);
    assert!(sol.report.rows.last().unwrap().sup_residual <= 1e-10);
}
