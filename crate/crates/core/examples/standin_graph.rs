use oscsync::DirectedGraph;

fn main() {
    let g = DirectedGraph::standin10();
    print!("{}", g.to_edge_list_text());
}
