//! Load a field file and report divergence, Euler residual and speed bounds.
//!
//! ```text
//! cargo run --example field_check -- crates/core/fields/couette.toml
//! ```

use std::path::PathBuf;

use flowlab::config::load_field;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fields/couette.toml")));
    let field = match load_field(&path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let dom = field.domain();
    let bounds = field.estimate_eta(dom, 101).expect("field evaluates on its domain");
    println!("field      {}", field.name());
    println!("domain     {:?} .. {:?}", dom.min, dom.max);
    println!("div(0,0)   {:e}", field.divergence_at(dom.center()).unwrap());
    match field.euler_residual(dom, 41) {
        Ok(r) => println!("euler      {r:e}"),
        Err(e) => println!("euler      n/a ({e})"),
    }
    println!("|v|        [{}, {}]", bounds.eta_lo, bounds.eta_hi);
    println!("eta        {} (admissible: {})", bounds.eta, bounds.admissible);
}
