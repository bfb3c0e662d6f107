//! Downlink budget for a handset at 600 km and 3.5 GHz, with and without
//! cooperating satellites.

use leobeam::io::run::run_budget;
use leobeam::link_budget::{fspl_db, LinkBudget, SensitivityRef};

fn main() {
    let budget = LinkBudget::handset_600km_3g5();
    let report = run_budget(&budget, &SensitivityRef::default()).unwrap();
    print!("{}", report.render());

    println!("\nfree-space loss against slant range at 3.5 GHz:");
    for d in [550.0, 600.0, 835.5, 1200.0] {
        println!("  {d:7.1} km  {:.2} dB", fspl_db(d, 3.5e9).unwrap());
    }
}
