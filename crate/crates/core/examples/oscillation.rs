//! Oscillation of the velocity argument over balls of growing radius.

use flowlab::argument::{oscillation, Ball, Target};
use flowlab::field::Builtin;

fn main() {
    let cosh = Builtin::Cosh.build().unwrap();
    for r in [0.5, 1.0, 2.0, 4.0] {
        let o = oscillation(&cosh, Ball::new([0.0, 0.0], r), 101, Target::Velocity).unwrap();
        println!("R = {r:<4} osc = {:.6} (grid {}, spacing {:.4})", o.osc, o.n, o.grid_spacing);
    }
}
