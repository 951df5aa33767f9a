//! Shear-flow detection, and its behavior under rotation of the field.

use flowlab::field::Builtin;
use flowlab::geom::Rect;
use flowlab::lemma_lab::shear::{detect_shear, ShearVerdict, SHEAR_TOL};

fn describe(v: &ShearVerdict) -> String {
    match v {
        ShearVerdict::Shear { angle, sign, .. } => format!("shear, angle {angle:.6}, sign {sign}"),
        ShearVerdict::NonShear { osc, .. } => format!("not a shear flow, osc {osc:.4}"),
        ShearVerdict::HypothesisViolated { reason } => format!("outside the class: {reason}"),
    }
}

fn main() {
    let boxed = Rect::square(2.0);
    let shear = Builtin::Shear { profile: "2+sin(x2)".into(), angle: 0.0 }.build().unwrap();
    for psi in [0.0, 0.4, 2.0] {
        let f = shear.rotate(psi).unwrap();
        println!("shear rotated by {psi}: {}", describe(&detect_shear(&f, boxed, SHEAR_TOL).unwrap()));
    }
    let cosh = Builtin::Cosh.build().unwrap();
    println!("cosh: {}", describe(&detect_shear(&cosh, boxed, SHEAR_TOL).unwrap()));
    let cellular = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
    println!("cellular: {}", describe(&detect_shear(&cellular, boxed, SHEAR_TOL).unwrap()));
}
