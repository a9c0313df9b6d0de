use gnnbench::graph::{AttrMode, AttributeMatrix, Dataset, LabelVector, Provenance, SparseGraph};
use gnnbench::io::{load_dataset, save_dataset};
use gnnbench::generator::{generate, GenParams};
use gnnbench::preset::{planted_features, Preset};
use proptest::prelude::*;

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (2usize..30, 1usize..6, 1usize..4, any::<bool>()).prop_flat_map(|(n, d, k, binary)| {
        let edges = prop::collection::vec((0..n, 0..n), 0..60);
        let labels = prop::collection::vec(0..k, n);
        let cells = prop::collection::vec((0..n, 0..d, -5.0f64..5.0), 0..40);
        (edges, labels, cells).prop_map(move |(edges, labels, cells)| {
            let (graph, _) = SparseGraph::from_edges(n, edges).unwrap();
            let (mode, triplets) = if binary {
                (AttrMode::Binary, cells.into_iter().map(|(i, a, _)| (i, a, 1.0)).collect::<Vec<_>>())
            } else {
                (AttrMode::Continuous, cells)
            };
            let mut seen = std::collections::HashSet::new();
            let triplets = triplets.into_iter().filter(|t| seen.insert((t.0, t.1))).collect();
            let attrs = AttributeMatrix::from_triplets(n, d, mode, triplets).unwrap();
            Dataset::new(graph, attrs, LabelVector::new(labels, k).unwrap(), Provenance::External).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn save_then_load_is_identity(d in dataset_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&d, dir.path()).unwrap();
        prop_assert_eq!(load_dataset(dir.path()).unwrap(), d);
    }
}

#[test]
fn generated_provenance_survives_round_trip() {
    assert_eq!("planted".parse::<Preset>().unwrap(), Preset::Planted);
    let params = GenParams::from_features(&planted_features(120, 200, 10, 3).unwrap(), 4);
    let d = generate(&params).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&d, dir.path()).unwrap();
    assert_eq!(load_dataset(dir.path()).unwrap(), d);
}
