// Copyright 2026 The SQEM Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Property tests for invariants that hold across random inputs.

use std::collections::BTreeMap;

use proptest::prelude::*;
use sqem::circuit::Gate;
use sqem::cut::{cut_wires, enumerate_variants, execute_and_reconstruct, Backend, CutPoint};
use sqem::distribution::total_variation;
use sqem::recombine::{hellinger, marginal_pair, recombine, RecombinationConfig};
use sqem::sim;
use sqem::vqe::{energy_from_distributions, measurement_groups};
use sqem::{Circuit, Distribution, Hamiltonian, NoiseModel, PauliString};

fn gate(n: usize) -> BoxedStrategy<Gate> {
    let one = prop_oneof![
        (0..n, 0..5u8).prop_map(|(q, k)| match k {
            0 => Gate::h(q),
            1 => Gate::x(q),
            2 => Gate::s(q),
            3 => Gate::sdg(q),
            _ => Gate::y(q),
        }),
        (0..n, -3.2f64..3.2, 0..3u8).prop_map(|(q, t, k)| match k {
            0 => Gate::rx(q, t),
            1 => Gate::ry(q, t),
            _ => Gate::rz(q, t),
        }),
    ];
    if n == 1 {
        return one.boxed();
    }
    let two = (0..n, 1..n, any::<bool>()).prop_map(move |(a, off, cz)| {
        let b = (a + off) % n;
        if cz {
            Gate::cz(a, b)
        } else {
            Gate::cx(a, b)
        }
    });
    prop_oneof![2 => one, 1 => two].boxed()
}

fn circuit(max_qubits: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_qubits).prop_flat_map(move |n| {
        prop::collection::vec(gate(n), 0..=max_gates).prop_map(move |gates| {
            let mut c = Circuit::new(n);
            c.extend(gates).unwrap();
            c.measure_all()
        })
    })
}

fn distribution(bits: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, 1 << bits).prop_map(move |w| {
        let table: BTreeMap<u64, f64> = w.iter().enumerate().map(|(k, &v)| (k as u64, v)).collect();
        Distribution::quasi(bits, table).unwrap().normalize().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn circuit_text_round_trips(c in circuit(4, 12)) {
        let again = Circuit::parse(&c.to_text()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(Circuit::parse(&again.to_text()).unwrap(), again);
    }

    #[test]
    fn noisy_evolution_preserves_trace_and_hermiticity(c in circuit(3, 10), p1 in 0.0f64..0.3, p2 in 0.0f64..0.3) {
        let noise = NoiseModel::depolarizing(p1, p2);
        let rho = sim::run_exact(&c, Some(&noise)).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.trace().im.abs() < 1e-10);
        prop_assert!(rho.hermiticity_error() < 1e-10);
        prop_assert!(rho.diagonal().iter().all(|&d| d > -1e-12));
    }

    #[test]
    fn sampling_converges_to_exact(c in circuit(3, 8), seed in any::<u64>()) {
        let shots = 4000u64;
        let exact = sim::exact_distribution(&c, None).unwrap();
        let sampled = sim::sample(&c, None, shots, seed).unwrap().distribution;
        let m = c.measured_qubits().len() as f64;
        let bound = 5.0 * (2f64.powf(m) / shots as f64).sqrt();
        prop_assert!(total_variation(&sampled, &exact).unwrap() <= bound);
        prop_assert!((sampled.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_cut_reconstruction_is_exact(c in circuit(4, 10), pick in any::<prop::sample::Index>()) {
        let points: Vec<CutPoint> = (0..c.num_qubits())
            .flat_map(|q| (0..=c.gates().len()).map(move |p| CutPoint::new(q, p)))
            .collect();
        let cut = points[pick.index(points.len())];
        if let Ok(fs) = cut_wires(&c, &[cut]) {
            let variants = enumerate_variants(&fs).unwrap();
            let r = execute_and_reconstruct(&fs, &variants, &[Backend::exact(), Backend::exact()], 0).unwrap();
            let ideal = sim::exact_distribution(&c, None).unwrap();
            prop_assert!(total_variation(&r.joint, &ideal).unwrap() < 1e-9);
            prop_assert!((r.joint.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn normalization_sums_to_one(w in prop::collection::vec(-0.2f64..1.0, 8)) {
        let table: BTreeMap<u64, f64> = w.iter().enumerate().map(|(k, &v)| (k as u64, v)).collect();
        let positive: f64 = w.iter().filter(|v| **v > 0.0).sum();
        prop_assume!(positive > 1e-6);
        let d = Distribution::quasi(3, table).unwrap().normalize().unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-9);
        prop_assert!(d.iter().all(|(_, v)| v > 0.0));
    }

    #[test]
    fn hellinger_is_a_bounded_symmetric_distance(p in distribution(3), q in distribution(3)) {
        let a = hellinger(&p, &q).unwrap();
        prop_assert!((a - hellinger(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(hellinger(&p, &p).unwrap() < 1e-7);
    }

    #[test]
    fn recombination_output_is_a_distribution_near_targets(
        pum in distribution(3),
        m0 in distribution(3),
        m2 in distribution(3),
    ) {
        let mitigated = BTreeMap::from([(0, m0.clone()), (2, m2.clone())]);
        let cfg = RecombinationConfig { threshold: 1e-9, max_iterations: 100_000 };
        let r = recombine(&pum, &mitigated, &cfg).unwrap();
        prop_assert!(r.converged);
        prop_assert!((r.distribution.total() - 1.0).abs() < 1e-9);
        prop_assert!(r.distribution.iter().all(|(_, v)| v >= 0.0));
        // Full-support inputs with two protected qubits have an exact fixed point.
        prop_assert!(r.delta < 1e-6);
        for (k, m) in [(0, &m0), (2, &m2)] {
            let got = marginal_pair(&r.distribution, k).unwrap();
            let want = marginal_pair(m, k).unwrap();
            prop_assert!((got[0] - want[0]).abs() <= r.delta + 1e-15);
        }
    }

    #[test]
    fn energy_scales_linearly(scale in -5.0f64..5.0, d in distribution(2)) {
        let h = Hamiltonian::new(2, vec![
            PauliString::from_letters("ZI").unwrap().scaled(0.7),
            PauliString::from_letters("ZZ").unwrap().scaled(-0.3),
            PauliString::from_letters("II").unwrap().scaled(1.1),
        ]).unwrap();
        let scaled = h.scaled(scale);
        let groups = measurement_groups(&h);
        let results: BTreeMap<usize, Distribution> = (0..groups.len()).map(|g| (g, d.clone())).collect();
        let e = energy_from_distributions(&h, &groups, &results, "x", 0).unwrap().energy;
        let es = energy_from_distributions(&scaled, &measurement_groups(&scaled), &results, "x", 0).unwrap().energy;
        prop_assert!((es - scale * e).abs() <= 1e-12 * (1.0 + es.abs()));
    }
}
