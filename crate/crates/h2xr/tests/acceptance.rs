//! Acceptance gate: every structured check must pass at its pinned
//! tolerance. One test per check so the harness prints one line each;
//! failures dump the full measurement list.

use h2xr::par::Exec;
use h2xr::verify;

fn gate(name: &str) {
    let check = verify::run_check(name, Exec::default()).expect("known check name");
    let status = if check.passed { "PASS" } else { "FAIL" };
    println!("{status} {name} ({:.2} s)", check.seconds);
    if let Some(err) = &check.error {
        panic!("{name} aborted: {err}");
    }
    for m in &check.measurements {
        let rel = match m.direction {
            verify::Direction::Below => "<",
            verify::Direction::Above => ">",
        };
        println!("    [{}] {}: {:.3e} {} {:.3e}", if m.ok { "ok" } else { "FAIL" }, m.label, m.value, rel, m.bound);
    }
    assert!(check.passed, "{name} failed, see measurement list above");
}

#[test]
fn catenoid_first_integral() {
    gate("catenoid-first-integral");
}

#[test]
fn catenoid_neck_radius() {
    gate("catenoid-neck-radius");
}

#[test]
fn height_correspondence() {
    gate("height-correspondence");
}

#[test]
fn jacobi_kernel() {
    gate("jacobi-kernel");
}

#[test]
fn catenoid_fluxes() {
    gate("catenoid-fluxes");
}

#[test]
fn flux_conservation() {
    gate("flux-conservation");
}

#[test]
fn graph_solver() {
    gate("graph-solver");
}

#[test]
fn center_map() {
    gate("center-map");
}

#[test]
fn annulus_solver() {
    gate("annulus-solver");
}

#[test]
fn linearization_match() {
    gate("linearization-match");
}

#[test]
fn tall_rectangles() {
    gate("tall-rectangles");
}

#[test]
fn boundary_gates() {
    gate("boundary-gates");
}
