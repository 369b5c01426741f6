use hubgraph_core::graph_store::Vid;
use hubgraph_core::query::{
    execute, parse, zoom_edge, zoom_subset, Dataset, ExecOptions, HaGraph, Strategy, SummaryValue, ZoomOverrides,
};
use hubgraph_core::samples::{closeness_graph, social_graph, CLOSENESS_QUERY, CLOSENESS_QUERY_H4, SQ1};

fn vid(ds: &Dataset, label: &str) -> Vid {
    let g = ds.graph();
    g.vertex(g.find_by_label(label).unwrap()).vid
}

fn names(ha: &HaGraph) -> Vec<String> {
    ha.hubs.iter().map(|h| h.name.clone().unwrap_or_default()).collect()
}

#[test]
fn sq1_hub_graph() {
    let ds = Dataset::new("twitter", social_graph());
    let ha = execute(&ds, &parse(SQ1).unwrap(), &ExecOptions::default()).unwrap();
    assert_eq!(names(&ha), ["kristy", "bingfish", "David", "karlfun"]);
    assert_eq!(ha.view().vertex_count(), 31);

    let e = ha.edge(vid(&ds, "kristy"), vid(&ds, "karlfun")).unwrap();
    assert_eq!(e.summary("vertexCount").and_then(SummaryValue::as_scalar), Some(19.0));
    match e.summary("relationshipType").unwrap() {
        SummaryValue::Path { distance, labels, .. } => {
            assert_eq!(*distance, Some(3));
            assert_eq!(labels, &["friend"; 3]);
        }
        other => panic!("{other:?}"),
    }
    let whole = ha.edge(vid(&ds, "kristy"), vid(&ds, "bingfish")).unwrap();
    assert!(e.width_band < whole.width_band);
}

#[test]
fn sq1_zoom_keeps_anchors() {
    let ds = Dataset::new("twitter", social_graph());
    let opts = ExecOptions::default();
    let ha = execute(&ds, &parse(SQ1).unwrap(), &opts).unwrap();
    let (k, f) = (vid(&ds, "kristy"), vid(&ds, "karlfun"));
    let child = zoom_edge(&ds, &ha, k, f, &ZoomOverrides::default(), &opts).unwrap();
    assert_eq!(child.view().vertex_count(), 19);
    assert_eq!(&child.hub_vids()[..2], &[k, f]);
    // karlfun is also the best connected vertex inside, so it is not repeated
    assert_eq!(names(&child), ["kristy", "karlfun", "a1"]);
    assert!(child.edges.iter().all(|e| child.hub_position(e.src).is_some()));
    assert!(zoom_edge(&ds, &ha, f, k, &ZoomOverrides::default(), &opts).is_err());
}

#[test]
fn closeness_distribution_shrinks_with_hop_bound() {
    let ds = Dataset::new("twitter", closeness_graph());
    let opts = ExecOptions::default();
    let (u1, u2) = (vid(&ds, "u1"), vid(&ds, "u2"));
    let high = |q: &str| {
        let ha = execute(&ds, &parse(q).unwrap(), &opts).unwrap();
        assert_eq!(names(&ha), ["u2", "u1", "u3"]);
        let e = ha.edge(u1, u2).unwrap();
        e.summary("Closeness").unwrap().row("High").unwrap()
    };
    assert_eq!(high(CLOSENESS_QUERY), 7.0);
    assert_eq!(high(CLOSENESS_QUERY_H4), 2.0);
}

#[test]
fn closeness_zoom_finds_strong_middle() {
    let ds = Dataset::new("twitter", closeness_graph());
    let opts = ExecOptions::default();
    let ha = execute(&ds, &parse(CLOSENESS_QUERY_H4).unwrap(), &opts).unwrap();
    let (u1, u2, u4, u5) = (vid(&ds, "u1"), vid(&ds, "u2"), vid(&ds, "u4"), vid(&ds, "u5"));
    let over = ZoomOverrides {
        k: Some(2),
        ..Default::default()
    };
    let child = zoom_edge(&ds, &ha, u1, u2, &over, &opts).unwrap();
    assert_eq!(child.hub_vids(), vec![u1, u2, u4, u5]);
    let e = child.edge(u4, u5).unwrap();
    assert_eq!(e.summary("Closeness").unwrap().row("High"), Some(2.0));
}

#[test]
fn strategies_agree_on_samples() {
    for (graph, q) in [(social_graph(), SQ1), (closeness_graph(), CLOSENESS_QUERY), (closeness_graph(), CLOSENESS_QUERY_H4)] {
        let ds = Dataset::new("g", graph);
        let spec = parse(q).unwrap();
        let sharing = ExecOptions {
            verify_plan: true,
            ..Default::default()
        };
        let sn = ExecOptions {
            strategy: Strategy::SharedNothing,
            ..Default::default()
        };
        let a = execute(&ds, &spec, &sharing).unwrap();
        let b = execute(&ds, &spec, &sn).unwrap();
        assert_eq!(a.edges, b.edges);
        assert_eq!(b.stats.ops.total(), b.stats.sn_ops);
    }
}

#[test]
fn subset_zoom_needs_two_hubs() {
    let ds = Dataset::new("twitter", social_graph());
    let opts = ExecOptions::default();
    let ha = execute(&ds, &parse(SQ1).unwrap(), &opts).unwrap();
    let k = vid(&ds, "kristy");
    assert!(zoom_subset(&ds, &ha, &[k, k], &ZoomOverrides::default(), &opts).is_err());
    let child = zoom_subset(&ds, &ha, &[k, vid(&ds, "David"), vid(&ds, "bingfish")], &ZoomOverrides::default(), &opts)
        .unwrap();
    assert_eq!(child.hubs[0].vid, k);
}
