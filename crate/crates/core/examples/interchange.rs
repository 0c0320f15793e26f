//! Graph documents and canonical codes: isomorphic rooted multigraphs share a
//! code whatever their vertex ids.

use splitgraph::multigraph::{deserialize, serialize};
use splitgraph::{canonical_form, RootedMultigraph, VertexId};

fn main() -> splitgraph::Result<()> {
    let doc = r#"{"root": 0, "vertices": [0, 1, 2, 3], "edges": [[0, 1, 2], [1, 2, 1], [1, 3, 1]]}"#;
    let g = deserialize(doc)?;
    println!("read: {}", serialize(&g));

    // the same shape with the ids shuffled
    let h = g.relabel(|v| VertexId([7, 3, 9, 1][v.0 as usize]))?;
    println!("relabelled: {}", serialize(&h));
    println!("codes {} and {}", canonical_form(&g), canonical_form(&h));

    let rerooted = RootedMultigraph::from_parts(VertexId(2), g.vertices().to_vec(), g.edges())?;
    println!("moving the root changes the class: {}", canonical_form(&rerooted));

    match deserialize(r#"{"root": 0, "vertices": [0], "edges": [[0, 0, 1]]}"#) {
        Ok(_) => println!("unexpected"),
        Err(e) => println!("loops are rejected: {e}"),
    }
    Ok(())
}
