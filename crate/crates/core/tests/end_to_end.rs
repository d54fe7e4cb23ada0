use ising_teleport::algebra::{conjugate_from_bell, global_phase_distance};
use ising_teleport::fixtures::synthesis_fixtures;
use ising_teleport::synthesis::solve_two_pulse;
use ising_teleport::teleport::{
    brute_force_correction, measure_first_two, prepare_input, run_single, CorrectionSource,
};
use ising_teleport::{
    BellLabel, Coupling, Direction, GateTarget, MeasurementBasis, MeasurementMode, State, TeleportConfig, C64,
};
use num_complex::Complex;
use proptest::prelude::*;

/// Teleports through the operator produced by the synthesized pulses
/// rather than the literal library matrix.
#[test]
fn teleport_through_synthesized_pulses() {
    let al = C64::new(0.28, -0.6);
    let be = C64::new((1.0 - al.norm_sqr()).sqrt(), 0.0);
    let mut gates_seen = Vec::new();
    for fx in synthesis_fixtures().into_iter().filter(|f| f.expected.feasible) {
        let seq = solve_two_pulse(&fx.problem, fx.target).unwrap().sequence.unwrap();
        let bell_op = seq.operator().unwrap();
        assert!(global_phase_distance(&bell_op, &fx.target.matrix()).unwrap() < 1e-8);
        let comp = conjugate_from_bell(&bell_op).unwrap();
        for ancilla in BellLabel::ORDER {
            let state = prepare_input(al, be, ancilla).unwrap().apply_gate(&comp, &[0, 1]).unwrap();
            let input = State::qubit(al, be).unwrap();
            for rec in measure_first_two(&state, MeasurementBasis::Bell, MeasurementMode::Enumerate).unwrap() {
                let plan = brute_force_correction(fx.target, ancilla, MeasurementBasis::Bell, rec.m1, rec.m2).unwrap();
                let out = rec.post_state.unwrap().apply_gate(&plan.matrix(), &[0]).unwrap();
                let f = input.inner(&out).unwrap().norm_sqr();
                assert!(f > 1.0 - 1e-10, "{} {ancilla} {}{}: {f}", fx.name, rec.m1, rec.m2);
            }
        }
        gates_seen.push(fx.target);
    }
    gates_seen.sort_by_key(|g| (g.h().number(), g.j()));
    gates_seen.dedup();
    assert_eq!(gates_seen.len(), 6);
}

#[test]
fn printed_and_formula_sources_agree_where_defined() {
    let (al, be) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
    let table = TeleportConfig { correction: CorrectionSource::Table1, ..TeleportConfig::default() };
    let formula = TeleportConfig { correction: CorrectionSource::GeneralFormula, ..TeleportConfig::default() };
    for (a, b) in run_single(&table, al, be).unwrap().iter().zip(&run_single(&formula, al, be).unwrap()) {
        assert!(a.correction.same_gates(&b.correction));
        assert!(a.fidelity > 1.0 - 1e-12 && b.fidelity > 1.0 - 1e-12);
    }
    let elsewhere = TeleportConfig { gate: GateTarget::new(Direction::Y, 1).unwrap(), ..table };
    assert!(run_single(&elsewhere, al, be).is_err());
}

#[test]
fn single_precision_pipeline() {
    let cfg = ising_teleport::CouplingConfig::<f32>::along(Direction::Z, [0.5, -1.0, 2.0], 0.3, 0.9).unwrap();
    let closed = ising_teleport::evolution::evolution_closed_form(&cfg, 1.3).unwrap();
    let oracle = ising_teleport::evolution::evolution_oracle(&cfg, 1.3).unwrap();
    assert!(closed.matrix.distance(&oracle.matrix).unwrap() < 1e-5);
    let outs = run_single(&TeleportConfig::default(), Complex::new(0.6f32, 0.0), Complex::new(0.8f32, 0.0));
    for o in outs.unwrap() {
        assert!(o.fidelity > 1.0 - 1e-5);
    }
}

fn qubit() -> impl Strategy<Value = (C64, C64)> {
    proptest::array::uniform4(-1.0f64..1.0).prop_filter_map("nonzero", |v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-3).then(|| (C64::new(v[0] / n, v[1] / n), C64::new(v[2] / n, v[3] / n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn universal_success((al, be) in qubit()) {
        for gate in GateTarget::all() {
            for ancilla in BellLabel::ORDER {
                let cfg = TeleportConfig { gate, ancilla, ..TeleportConfig::default() };
                let outs = run_single(&cfg, al, be).unwrap();
                prop_assert_eq!(outs.len(), 4);
                let total: f64 = outs.iter().map(|o| o.record.probability).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                for o in &outs {
                    prop_assert!(o.fidelity > 1.0 - 1e-10);
                }
            }
        }
    }

    #[test]
    fn random_evolution_is_unitary_and_patterned(
        j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, t in -5.0f64..5.0, h in 1u8..=3,
    ) {
        let cfg = Coupling::along(Direction::new(h).unwrap(), j, b1, b2).unwrap();
        let u = ising_teleport::evolution::evolution_closed_form(&cfg, t).unwrap();
        prop_assert!(u.matrix.unitarity_defect() < 1e-12);
        prop_assert!(ising_teleport::evolution::extract_blocks(&u).is_ok());
    }
}
