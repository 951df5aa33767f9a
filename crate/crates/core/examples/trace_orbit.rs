//! Trace the gradient orbit and a streamline through the origin of the cosh
//! flow `u = x2 cosh x1`.
//!
//! Gradient orbits are parametrized so that `du/dt = 1`, hence `u = t` on
//! the orbit through the origin; `u` is constant along the streamline.

use flowlab::field::Builtin;
use flowlab::report::write_trajectory_csv;
use flowlab::tracer::{trace_gradient, trace_streamline, IntegratorConfig};

fn main() {
    let cosh = Builtin::Cosh.build().unwrap();
    let cfg = IntegratorConfig::span(-3.0, 3.0);

    let grad = trace_gradient(&cosh, [0.0, 0.0], &cfg).unwrap();
    let worst = grad.samples().iter().map(|s| (s.u - s.t).abs()).fold(0.0, f64::max);
    println!("gradient orbit: {} samples, max |u - t| = {worst:e}", grad.samples().len());

    let stream = trace_streamline(&cosh, [0.5, 1.0], &cfg).unwrap();
    let u0 = stream.samples()[0].u;
    let drift = stream.samples().iter().map(|s| (s.u - u0).abs()).fold(0.0, f64::max);
    println!("streamline:     {} samples, drift of u = {drift:e}", stream.samples().len());

    let mut head = Vec::new();
    write_trajectory_csv(&grad, &mut head).unwrap();
    for line in String::from_utf8(head).unwrap().lines().take(4) {
        println!("  {line}");
    }
}
