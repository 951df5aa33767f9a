//! Recover `f` in `Δu + f(u) = 0` from the gradient orbit through the origin
//! and check the identity away from that orbit.

use flowlab::field::Builtin;
use flowlab::geom::Rect;
use flowlab::lemma_lab::elliptic::sample_points;
use flowlab::lemma_lab::{reconstruct_f, verify_semilinear, ReconstructOptions};

fn main() {
    let cases = [
        ("cosh, f(s) = -s", Builtin::Cosh.build().unwrap(), Box::new(|s: f64| -s) as Box<dyn Fn(f64) -> f64>),
        ("couette, f = 1", Builtin::Couette { a: 1.0, b: 2.0 }.build().unwrap(), Box::new(|_| 1.0)),
    ];
    for (label, field, exact) in &cases {
        let rf = reconstruct_f(field, &ReconstructOptions::default()).unwrap();
        let pts = sample_points(Rect::centered(field.domain().center(), 1.0), 1000);
        let rep = verify_semilinear(field, &rf, &pts).unwrap();
        println!(
            "{label}: s in [{:.3}, {:.3}], |f - exact| = {:e}, residual {:e} over {} points",
            rf.s_range.0,
            rf.s_range.1,
            rf.max_deviation(exact),
            rep.max_residual,
            rep.checked
        );
    }
    // A stagnation point makes the orbit degenerate; the reconstruction refuses.
    let cellular = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
    println!("cellular: {}", reconstruct_f(&cellular, &ReconstructOptions::default()).unwrap_err());
}
