//! Round-trip validation of the Partition-based hardness construction: the
//! generated game reaches the egalitarian threshold exactly on yes
//! instances.

use fhg::graph::{egalitarian_welfare, CoalitionStructure, VertexId};
use fhg::instances::{
    gen_egal_hardness, partition_has_solution, PartitionInstance, HARDNESS_V1, HARDNESS_V2,
};
use fhg::oracle::{brute_force_max_egalitarian, PartitionIterator};
use fhg::treedecomp::{heuristic_decomposition, make_nice, Strategy};
use fhg::tw_egal::solve_tw_egalitarian;

fn instances_n2() -> Vec<PartitionInstance> {
    let mut out = Vec::new();
    for a in 1..=4u64 {
        for b in 1..=4u64 {
            out.push(PartitionInstance::new(vec![a, b]).unwrap());
        }
    }
    out
}

#[test]
fn threshold_reached_iff_partition_solvable_n2() {
    for inst in instances_n2() {
        let h = gen_egal_hardness(&inst).unwrap();
        let opt = brute_force_max_egalitarian(&h.graph).unwrap().value;
        let yes = partition_has_solution(&inst).unwrap();
        assert_eq!(
            opt >= h.threshold,
            yes,
            "A = {:?}: optimum {opt}, threshold {}",
            inst.values,
            h.threshold
        );
    }
}

#[test]
fn tw_egal_solver_agrees_on_hardness_graphs() {
    for inst in instances_n2().into_iter().take(6) {
        let h = gen_egal_hardness(&inst).unwrap();
        let oracle = brute_force_max_egalitarian(&h.graph).unwrap().value;
        let td = heuristic_decomposition(&h.graph, Strategy::MinFill);
        let ntd = make_nice(&h.graph, &td).unwrap();
        let r = solve_tw_egalitarian(&h.graph, &ntd).unwrap();
        assert_eq!(r.value, oracle, "A = {:?}", inst.values);
    }
}

#[test]
fn colocating_the_hubs_always_misses_the_threshold() {
    for inst in [
        PartitionInstance::new(vec![1, 1]).unwrap(),
        PartitionInstance::new(vec![2, 4]).unwrap(),
        PartitionInstance::new(vec![3, 3]).unwrap(),
    ] {
        let h = gen_egal_hardness(&inst).unwrap();
        let n = h.graph.vertex_count();
        let v1 = VertexId(HARDNESS_V1);
        let v2 = VertexId(HARDNESS_V2);
        for rgs in PartitionIterator::new(n) {
            if rgs[v1.index()] != rgs[v2.index()] {
                continue;
            }
            let p = CoalitionStructure::from_assignment(&rgs);
            let ew = egalitarian_welfare(&h.graph, &p).unwrap();
            assert!(
                ew < h.threshold,
                "A = {:?}: hubs together but ew {ew} >= threshold {}",
                inst.values,
                h.threshold
            );
        }
    }
}
