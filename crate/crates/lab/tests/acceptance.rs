//! The full acceptance suite, one line per criterion; exits non-zero if any
//! criterion fails.

use semiflat_lab::acceptance::{run_all, Suite};

fn main() {
    let results = run_all(&Suite::default());
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.pass()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
