//! Distance from a point to the level line through the base orbit.

use flowlab::field::Builtin;
use flowlab::lemma_lab::foliation_probe;
use flowlab::tracer::IntegratorConfig;

fn main() {
    let cosh = Builtin::Cosh.build().unwrap();
    let pts = [[1.0, 1.0], [-2.0, 0.5], [0.3, -1.5], [7.9, 7.9]];
    for r in foliation_probe(&cosh, &pts, &IntegratorConfig::span(-20.0, 20.0)).unwrap() {
        match (r.y, r.distance) {
            (Some(y), Some(d)) => println!("{:?}: level {:.4} meets the base orbit at {:?}, distance {d:e}", r.x, r.level, y),
            _ => println!("{:?}: {}", r.x, r.unreachable.unwrap_or_default()),
        }
    }
}
