//! Runs the built-in comparison of analytic values against simulation and the
//! numerical self-test, at a reduced number of drops.

use uav3d::coverage::CoverageOptions;
use uav3d::{selftest, validation};

fn main() {
    for check in selftest::run() {
        println!("{}", check.line());
    }
    for check in validation::run(10_000, 3, &CoverageOptions::default()) {
        println!("{}", check.line());
    }
}
