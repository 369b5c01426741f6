//! Small bundled graphs with known answers, used by tests, the CLI and the
//! service.

use crate::graph_store::{AttributedGraph, EdgeRecord, Group, Measure, Vertex, Vid};

/// SQ1 over [`social_graph`].
pub const SQ1: &str = "SELECT TopMaxDegreeVertices(G', 2)
FROM Subgraph(G, kristy, bingfish, 4) G'
GROUP BY betweenness()
SUMMARIZE BY relationshipStrength(), relationshipType(), vertexCount()";

/// Closeness distribution among the top three users of [`closeness_graph`].
pub const CLOSENESS_QUERY: &str = "SELECT TopMaxDegreeVertices(G, 3)
FROM WholeGraph(G)
GROUP BY betweenness()
SUMMARIZE BY COUNT(.) e. Closeness()";

/// Same as [`CLOSENESS_QUERY`] with membership limited to four hops.
pub const CLOSENESS_QUERY_H4: &str = "SELECT TopMaxDegreeVertices(G, 3)
FROM WholeGraph(G)
GROUP BY betweenness(4)
SUMMARIZE BY COUNT(.) e. Closeness()";

#[derive(Default)]
struct Builder {
    vertices: Vec<Vertex>,
    edges: Vec<EdgeRecord>,
}

impl Builder {
    fn vertex(&mut self, label: &str, grp: Group, mr: Measure) -> Vid {
        let vid = self.vertices.len() as Vid + 1;
        self.vertices.push(Vertex::new(vid, grp, mr).labeled(label));
        vid
    }

    fn edge(&mut self, s: Vid, t: Vid, grp: Group, mr: Measure, label: &str) {
        self.edges.push(EdgeRecord::new(s, t, grp, mr).labeled(label));
    }

    fn build(self) -> AttributedGraph {
        AttributedGraph::new(self.vertices, self.edges).expect("sample graph is well formed")
    }
}

const REL: [&str; 7] = ["friend", "follow", "retweet", "reply", "mention", "like", "quote"];

fn rel(label: &str) -> Group {
    REL.iter().position(|&r| r == label).expect("known relationship") as Group
}

/// A follower network shaped after the SQ1 example.
///
/// Within four hops of kristy and bingfish, kristy reaches karlfun through
/// three friend hops fanning over 17 users, and reaches bingfish through
/// David, whose many parallel interactions make him the best connected user.
/// Users outside that neighbourhood only add noise.
pub fn social_graph() -> AttributedGraph {
    let mut b = Builder::default();
    let kristy = b.vertex("kristy", 1, 30);
    let david = b.vertex("David", 2, 80);
    let karlfun = b.vertex("karlfun", 2, 55);
    let bingfish = b.vertex("bingfish", 1, 40);
    let a: Vec<Vid> = (1..=3).map(|i| b.vertex(&format!("a{i}"), 1, 10 + i)).collect();
    let bs: Vec<Vid> = (1..=14).map(|i| b.vertex(&format!("b{i}"), (i % 3) as Group, 5 + i)).collect();
    let h: Vec<Vid> = (1..=6).map(|i| b.vertex(&format!("h{i}"), 3, 20 + i)).collect();
    let inner: Vec<Vid> = (1..=4).map(|i| b.vertex(&format!("i{i}"), 3, 15 + i)).collect();

    let friend = rel("friend");
    for &ai in &a {
        b.edge(kristy, ai, friend, 3, "friend");
    }
    for (j, &bj) in bs.iter().enumerate() {
        b.edge(a[j * a.len() / bs.len()], bj, friend, 2, "friend");
        b.edge(bj, karlfun, friend, 4, "friend");
    }
    b.edge(karlfun, bingfish, friend, 6, "friend");

    b.edge(kristy, david, rel("follow"), 1, "follow");
    for &hi in &h {
        for label in ["retweet", "reply", "mention", "like", "quote"] {
            b.edge(david, hi, rel(label), 7, label);
        }
        for &ik in &inner {
            b.edge(hi, ik, rel("follow"), 1, "follow");
            b.edge(hi, ik, rel("retweet"), 2, "retweet");
        }
    }
    for &ik in &inner {
        b.edge(ik, bingfish, friend, 5, "friend");
    }

    // too far from the anchors to enter the subgraph of interest
    let n: Vec<Vid> = (1..=12).map(|i| b.vertex(&format!("n{i}"), 4, i)).collect();
    b.edge(kristy, n[0], friend, 1, "friend");
    for w in n.windows(2) {
        b.edge(w[0], w[1], rel("follow"), 1, "follow");
    }
    b.edge(n[11], bs[0], friend, 1, "friend");
    b.edge(bingfish, n[0], rel("mention"), 1, "mention");
    b.edge(david, n[5], rel("like"), 1, "like");
    b.build()
}

/// Users whose interaction weights fall in Low (< 5), Middle (5..20) and
/// High (>= 20) closeness bands.
///
/// `u1` reaches `u2` through `u4` and `u5`, via one strong intermediary `w`
/// and two weak ones; a long strong cycle leads from `u2` back to `u1`. `u3`
/// hangs off `u2`. Leaf contacts make `u1`, `u2` and `u3` the best connected.
pub fn closeness_graph() -> AttributedGraph {
    let mut b = Builder::default();
    let u: Vec<Vid> = (1..=5).map(|i| b.vertex(&format!("u{i}"), 1, 0)).collect();
    let (u1, u2, u3, u4, u5) = (u[0], u[1], u[2], u[3], u[4]);
    let w = b.vertex("w", 2, 0);
    let x: Vec<Vid> = (1..=2).map(|i| b.vertex(&format!("x{i}"), 2, 0)).collect();
    let c: Vec<Vid> = (1..=4).map(|i| b.vertex(&format!("c{i}"), 3, 0)).collect();

    let e = |b: &mut Builder, s, t, mr| b.edge(s, t, 0, mr, "contact");
    e(&mut b, u1, u4, 8);
    e(&mut b, u4, w, 25);
    e(&mut b, w, u5, 30);
    e(&mut b, u5, u2, 12);
    for &xi in &x {
        e(&mut b, u4, xi, 2);
        e(&mut b, xi, u5, 3);
    }
    e(&mut b, u1, u2, 1);
    e(&mut b, u2, c[0], 21);
    for i in 0..3 {
        e(&mut b, c[i], c[i + 1], 22 + i as Measure);
    }
    e(&mut b, c[3], u1, 40);
    e(&mut b, u2, u3, 6);

    for (hub, leaves) in [(u1, 5), (u2, 5), (u3, 6)] {
        for i in 0..leaves {
            let leaf = b.vertex(&format!("l{hub}_{i}"), 4, 0);
            e(&mut b, hub, leaf, 1);
        }
    }
    b.build()
}

/// Hub vids of [`figure3_graph`].
pub const FIGURE3_HUBS: [Vid; 5] = [1, 2, 3, 4, 5];

/// The small example used to introduce tags: hubs `1..=5`, `A1` between 1
/// and 2, `B1, B2` between 2 and 3 and `C1..C3` below 3 feeding 4 and 5.
/// `A1` has vid 11, `B1, B2` are 21, 22 and `C1..C3` are 31 to 33.
pub fn figure3_graph() -> AttributedGraph {
    let mut vertices: Vec<Vertex> = FIGURE3_HUBS.iter().map(|&h| Vertex::new(h, 0, 1).labeled(h.to_string())).collect();
    let others = [(11, "A1"), (21, "B1"), (22, "B2"), (31, "C1"), (32, "C2"), (33, "C3")];
    vertices.extend(others.iter().map(|&(vid, l)| Vertex::new(vid, 1, vid as Measure).labeled(l)));
    let arcs = [
        (1, 11),
        (11, 2),
        (2, 21),
        (2, 22),
        (21, 3),
        (22, 3),
        (3, 31),
        (3, 32),
        (31, 33),
        (32, 33),
        (33, 4),
        (33, 5),
    ];
    let edges = arcs.iter().map(|&(s, t)| EdgeRecord::new(s, t, 0, 1)).collect();
    AttributedGraph::new(vertices, edges).expect("sample graph is well formed")
}
