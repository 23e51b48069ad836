use mgopt::energy::solve_energy;
use mgopt::graph::{graph_distance, MetricGraph, VertexRole};
use mgopt::optimizer::feasibility::feasibility_tolerance;
use mgopt::optimizer::{optimize, Functional, Optimum, ProblemSpec, SearchOptions};

fn spec(pins: &[[f64; 2]], total_length: f64, functional: Functional) -> ProblemSpec {
    ProblemSpec {
        dimension: 2,
        pins: pins.iter().map(|p| p.to_vec()).collect(),
        total_length,
        functional,
    }
}

fn check_invariants(spec: &ProblemSpec, opt: &Optimum) {
    let total: f64 = opt.lengths.iter().sum();
    assert!((total - spec.total_length).abs() <= 1e-9, "lengths sum to {total}");
    assert!(opt.placement.feasible);
    assert!(opt.placement.max_violation <= feasibility_tolerance(spec.total_length));
    assert!(opt.audit.solution_checks_pass(), "{:?}", opt.audit);
    let g = opt.graph();
    // each pair of pins is at least as far apart in the graph as in the plane
    for (i, p) in spec.pins.iter().enumerate() {
        for (j, q) in spec.pins.iter().enumerate().skip(i + 1) {
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            let pin = |k: usize| {
                g.vertices()
                    .iter()
                    .find(|v| v.role == VertexRole::Dirichlet { pin: k })
                    .unwrap()
                    .id
            };
            assert!(graph_distance(&g, pin(i), pin(j)).unwrap() >= d - 1e-7);
        }
    }
}

#[test]
fn optima_satisfy_the_invariants() {
    let opts = SearchOptions::default();
    for (pins, l) in [
        (vec![[0.0, 0.0]], 1.3),
        (vec![[-0.5, 0.0], [0.5, 0.0]], 1.0),
        (vec![[-0.5, 0.0], [0.5, 0.0]], 2.5),
        (vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]], 2.4),
    ] {
        let s = spec(&pins, l, Functional::Energy);
        check_invariants(&s, &optimize(&s, &opts).unwrap());
    }
}

#[test]
fn search_is_deterministic() {
    let s = spec(&[[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]], 2.4, Functional::Energy);
    let opts = SearchOptions::default();
    let a = optimize(&s, &opts).unwrap();
    let b = optimize(&s, &opts).unwrap();
    assert_eq!(a.topology, b.topology);
    assert_eq!(a.lengths, b.lengths);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.placement.positions, b.placement.positions);
}

#[test]
fn more_length_never_hurts() {
    let opts = SearchOptions::default();
    for functional in [Functional::Energy, Functional::Lambda1] {
        for pins in [vec![[0.0, 0.0]], vec![[-0.5, 0.0], [0.5, 0.0]]] {
            let mut last = f64::INFINITY;
            for l in [1.0, 1.25, 1.5, 2.0, 3.0] {
                let opt = optimize(&spec(&pins, l, functional), &opts).unwrap();
                assert!(opt.value < last, "{functional:?} {pins:?} L={l}: {} !< {last}", opt.value);
                last = opt.value;
            }
        }
    }
}

#[test]
fn optimum_beats_hand_built_competitors() {
    let s = spec(&[[-0.5, 0.0], [0.5, 0.0]], 2.0, Functional::Energy);
    let opt = optimize(&s, &SearchOptions::default()).unwrap();
    let pins = [VertexRole::Dirichlet { pin: 0 }, VertexRole::Dirichlet { pin: 1 }];
    let energy = |g: MetricGraph| solve_energy(&g).unwrap().energy;
    // a loop of length 2 through both pins, as two parallel edges
    let doubled = energy(MetricGraph::from_parts(&pins, &[(0, 1, 1.0), (0, 1, 1.0)]));
    // the segment with a pendant off the centre
    let mut others = vec![doubled];
    for t in [0.1, 0.25, 0.4] {
        others.push(energy(MetricGraph::from_parts(
            &[pins[0], pins[1], VertexRole::Free, VertexRole::Free],
            &[(0, 2, t), (1, 2, 1.0 - t), (2, 3, 1.0)],
        )));
    }
    // two pendants sharing the spare length
    others.push(energy(MetricGraph::from_parts(
        &[pins[0], pins[1], VertexRole::Free, VertexRole::Free, VertexRole::Free, VertexRole::Free],
        &[(0, 2, 0.3), (2, 3, 0.4), (3, 1, 0.3), (2, 4, 0.5), (3, 5, 0.5)],
    )));
    for j in others {
        assert!(opt.value <= j + 1e-12, "{} > {j}", opt.value);
    }
}
