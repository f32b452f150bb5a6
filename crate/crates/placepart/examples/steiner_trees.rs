//! Rectilinear Steiner trees: the production heuristic against the exact
//! exhaustive oracle on small nets.

use placepart::geom::Point;
use placepart::steiner::{steiner_oracle, steiner_tree};

fn main() {
    let cases: Vec<(&str, Vec<Point>)> = vec![
        (
            "two pins",
            vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)],
        ),
        (
            "three pins, shared trunk",
            vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 5.0)],
        ),
        (
            "square corners",
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(0.0, 2.0),
                Point::new(2.0, 2.0),
            ],
        ),
        (
            "five scattered pins",
            vec![
                Point::new(1.0, 7.0),
                Point::new(4.0, 2.0),
                Point::new(8.0, 9.0),
                Point::new(0.0, 0.0),
                Point::new(6.0, 5.0),
            ],
        ),
    ];
    for (name, pins) in cases {
        let tree = steiner_tree(0, &pins).unwrap();
        let oracle = steiner_oracle(&pins).unwrap();
        println!(
            "{name}: heuristic {:.1}, optimal {:.1} (ratio {:.3}), {} segments",
            tree.total_length(),
            oracle,
            tree.total_length() / oracle,
            tree.segments.len()
        );
        for seg in &tree.segments {
            println!("    ({}, {}) -> ({}, {})", seg.x1, seg.y1, seg.x2, seg.y2);
        }
    }
}
