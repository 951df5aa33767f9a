//! Exact-arithmetic arc census on polyline vertices, used as an oracle.
//!
//! Every predicate (side of the chord line, crossing location, position
//! along the chord) is evaluated in rational arithmetic, so the result does
//! not depend on any tolerance.

use num::{BigRational, Signed, Zero};

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite coordinate")
}

/// Counts `(middle, left, right, double, exterior)` for the polyline
/// between vertex indices `a < b`.
pub fn brute_census(points: &[[f64; 2]], a: usize, b: usize) -> [usize; 5] {
    let pts: Vec<(Q, Q)> = points[a..=b].iter().map(|p| (q(p[0]), q(p[1]))).collect();
    let (ax, ay) = pts[0].clone();
    let (bx, by) = pts[pts.len() - 1].clone();
    let (dx, dy) = (&bx - &ax, &by - &ay);
    let len2 = &dx * &dx + &dy * &dy;
    assert!(!len2.is_zero(), "degenerate chord");
    let side = |p: &(Q, Q)| -> Q { &dx * (&p.1 - &ay) - &dy * (&p.0 - &ax) };
    let along = |x: &Q, y: &Q| -> Q { (&dx * (x - &ax) + &dy * (y - &ay)) / &len2 };

    // Walk the segments in order, listing every on-line point with its
    // chord coordinate and remembering whether an off-line vertex was seen
    // since the previous one.
    let sides: Vec<Q> = pts.iter().map(side).collect();
    let mut counts = [0usize; 5];
    let mut last: Option<Q> = None;
    let mut off_line_since = false;
    let close = |s: Q, last: &mut Option<Q>, off: &mut bool, counts: &mut [usize; 5]| {
        if let Some(prev) = last.take() {
            if *off {
                counts[class(&prev, &s)] += 1;
            }
        }
        *last = Some(s);
        *off = false;
    };
    for i in 0..pts.len() {
        if sides[i].is_zero() {
            close(along(&pts[i].0, &pts[i].1), &mut last, &mut off_line_since, &mut counts);
        } else {
            off_line_since = true;
        }
        if i + 1 < pts.len() {
            let (s0, s1) = (&sides[i], &sides[i + 1]);
            if (s0.is_positive() && s1.is_negative()) || (s0.is_negative() && s1.is_positive()) {
                let r = s0 / (s0 - s1);
                let x = &pts[i].0 + &r * (&pts[i + 1].0 - &pts[i].0);
                let y = &pts[i].1 + &r * (&pts[i + 1].1 - &pts[i].1);
                close(along(&x, &y), &mut last, &mut off_line_since, &mut counts);
            }
        }
    }
    counts
}

/// Index into `(middle, left, right, double, exterior)` by counting which
/// chord ends lie strictly between the arc's ends.
fn class(s: &Q, t: &Q) -> usize {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    let zero = Q::zero();
    let one = Q::from_integer(1.into());
    let a_in = lo < &zero && &zero < hi;
    let b_in = lo < &one && &one < hi;
    match (a_in, b_in) {
        (true, true) => 3,
        (true, false) => 1,
        (false, true) => 2,
        _ if lo >= &zero && hi <= &one => 0,
        _ => 4,
    }
}
