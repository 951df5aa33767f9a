//! Logarithmic growth of the oscillation, `osc_{B(0,R)} ≤ C_η ln R`.
//!
//! The bound is claimed only when every unit ball centered in `B(0, R)` has
//! oscillation below π/4. The cosh flow breaks that near the origin, so its
//! rows come back skipped; the bounded wavy flow passes.

use flowlab::argument::check_log_growth;
use flowlab::config::parse_field;
use flowlab::field::Builtin;

fn main() {
    let wavy = parse_field(
        "[field]\nname = \"wavy\"\nstream = \"-x2 + eps*sin(x1)\"\n[params]\neps = 0.1\n[domain]\nmin = [-20, -20]\nmax = [20, 20]\n",
        "wavy.toml".as_ref(),
    )
    .unwrap();
    let cosh = Builtin::Cosh.build().unwrap();
    let radii = [2.0, 4.0, 8.0, 16.0];
    for (field, eta) in [(&wavy, 0.99), (&cosh, 1e-7)] {
        for g in check_log_growth(field, &radii, eta, 61).unwrap() {
            println!("{:>6} R = {:<3} osc {:.5}  bound {:?}  {:?}", field.name(), g.radius, g.osc, g.bound, g.status);
        }
    }
}
