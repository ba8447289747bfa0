use std::collections::BTreeMap;

use friendship_paradox::generators::{generate_gnp, synthetic_campus, CampusSpec, GnpSpec, TwoBlockSpec};
use friendship_paradox::ingest::{
    load_graph, load_graph_from_str, write_attribute_table, write_edge_list, GraphJson, LoadOptions,
};
use friendship_paradox::{analyze, Graph};

/// Edge set keyed by label pairs, so graphs with different node orders compare.
fn labeled_edges(g: &Graph) -> BTreeMap<(String, String), f64> {
    g.edges()
        .map(|(i, j, w)| {
            let (a, b) = (g.label(i), g.label(j));
            (if a < b { (a, b) } else { (b, a) }, w)
        })
        .collect()
}

fn labeled_attributes(g: &Graph) -> BTreeMap<String, f64> {
    let a = g.attributes().unwrap();
    (0..g.node_count()).map(|i| (g.label(i), a[i])).collect()
}

#[test]
fn edge_list_and_attributes_round_trip() {
    let g = generate_gnp(&GnpSpec { n: 120, p: 0.05, max_weight: 10, seed: 8 }).unwrap();
    let g = g.drop_isolates().unwrap().graph;
    let a: Vec<f64> = (0..g.node_count()).map(|i| (i as f64).sqrt() - 3.0).collect();
    let g = g.with_attributes(a).unwrap();

    let edges = write_edge_list(&g);
    let table = write_attribute_table(&g, "score").unwrap();
    let loaded = load_graph_from_str(&edges, Some(&table), &LoadOptions::default()).unwrap();
    let meta = loaded.metadata.unwrap();
    let back = loaded.graph.clone().with_attributes(meta.numeric_column("score", &loaded.graph).unwrap()).unwrap();

    assert_eq!(labeled_edges(&back), labeled_edges(&g));
    assert_eq!(labeled_attributes(&back), labeled_attributes(&g));
    // node order changes, so sums run in a different order
    let (x, y) = (analyze(&back).unwrap().gaps, analyze(&g).unwrap().gaps);
    for ((p, a), (_, b)) in x.iter().zip(y.iter()) {
        assert!((a.value - b.value).abs() <= 1e-12 * b.value.abs().max(1.0), "{p}");
        assert_eq!(a.verdict, b.verdict);
    }
}

#[test]
fn json_export_round_trips() {
    let g = Graph::build(3, &[(0, 1, 1.0), (1, 2, 2.5)], Some(vec![2.0, 0.0, 1.0])).unwrap();
    let text = serde_json::to_string(&GraphJson::from_graph(&g)).unwrap();
    let back: GraphJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_graph().unwrap(), GraphJson::from_graph(&g).to_graph().unwrap());
}

#[test]
fn campus_files_load_back() {
    let spec = CampusSpec {
        blocks: TwoBlockSpec { sizes: [50, 70], p_in: [0.15, 0.05], p_out: 0.01, seed: 2 },
        female_share: [0.8, 0.3],
        gender_missing: 0.1,
        block_year: [2006, 2008],
        year_alignment: 0.6,
        year_missing: 0.2,
    };
    let (g, meta) = synthetic_campus(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("c.edges.tsv");
    let table = dir.path().join("c.meta.tsv");
    std::fs::write(&edges, write_edge_list(&g)).unwrap();
    std::fs::write(&table, meta.to_delimited(&g, '\t', "")).unwrap();
    let loaded = load_graph(&edges, Some(&table), &LoadOptions::default()).unwrap();
    let back = loaded.metadata.unwrap();
    assert_eq!(labeled_edges(&loaded.graph), labeled_edges(&g));
    for column in ["gender", "year"] {
        let original: BTreeMap<String, Option<&str>> =
            meta.column(column).unwrap().into_iter().enumerate().map(|(i, v)| (g.label(i), v)).collect();
        let reloaded: BTreeMap<String, Option<&str>> = back
            .column(column)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (loaded.graph.label(i), v))
            .collect();
        assert_eq!(original, reloaded, "column {column}");
    }
}
