//! Classify the arcs of a spiral against its chord and check the turning
//! bound `|θ(a) − θ(b)| ≤ 16π (N_l + N_r + N_d) + 4π`.

use flowlab::arcs::{census, fixtures, is_nonintersecting, Curve};

fn main() {
    for half_turns in [2, 3, 5] {
        let curve = Curve::from_polyline(fixtures::two_arm_spiral(half_turns, 400)).unwrap();
        let (a, b) = curve.t_range();
        let c = census(&curve, a, b).unwrap();
        let [m, l, r, d, e] = c.counts();
        println!(
            "spiral {half_turns}: middle {m} left {l} right {r} double {d} exterior {e}; \
             turning {:.3} <= {:.3}: {} (simple: {})",
            c.theta_delta,
            c.bound_value,
            c.bound_holds,
            is_nonintersecting(&curve, a, b).unwrap()
        );
    }
}
