//! Scan orbits for the forbidden four-point patterns.
//!
//! A planted curve must be caught; orbits of an admissible flow must not.

use flowlab::field::Builtin;
use flowlab::lemma_lab::patterns::rigged_curve;
use flowlab::lemma_lab::{scan_curve, scan_oneleft, scan_oneleftbis, PatternKind};
use flowlab::tracer::{trace_gradient, trace_streamline, IntegratorConfig};

fn main() {
    let shear = Builtin::Shear { profile: "1".into(), angle: 0.0 }.build().unwrap();
    let (ts, pts) = rigged_curve();
    let planted = scan_curve(&shear, &ts, &pts, 1.0, PatternKind::Gradient).unwrap();
    println!("planted curve: {} violation(s)", planted.violations.len());

    let cosh = Builtin::Cosh.build().unwrap();
    let eta = 0.05;
    let cfg = IntegratorConfig::span(-4.0, 4.0);
    for x in [[0.3, 0.0], [-0.5, 0.7], [1.0, -1.0]] {
        let g = scan_oneleft(&cosh, &trace_gradient(&cosh, x, &cfg).unwrap(), eta).unwrap();
        let s = scan_oneleftbis(&cosh, &trace_streamline(&cosh, x, &cfg).unwrap(), eta).unwrap();
        println!(
            "orbits from {x:?}: gradient {} tested / {} violations, streamline {} tested / {} violations",
            g.tested,
            g.violations.len(),
            s.tested,
            s.violations.len()
        );
    }
}
