//! Tabulate the constants `C1`, `C2`, `C_η` and the partition integers.

use flowlab::lemma_lab::{constants, partition_params};

fn main() {
    println!("{:>6} {:>14} {:>14} {:>16} {:>4} {:>4}", "eta", "C1", "C2", "C_eta", "m", "N");
    for eta in [1.0, 0.75, 0.5, 0.25] {
        let c = constants(eta).unwrap();
        let p = partition_params(1.0, eta).unwrap();
        println!("{eta:>6} {:>14.4} {:>14.4} {:>16.4} {:>4} {:>4}", c.c1, c.c2, c.c_eta, p.m_dyadic, p.n);
    }
}
