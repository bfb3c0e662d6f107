//! Two-element array factor: the far-field approximation against the exact
//! two-source sum, for a ground-based array and for kilometer spacings.

use std::f64::consts::PI;

use leobeam::fields::{phased_array_field, two_source_field_exact};
use leobeam::geometry::Vec3;

fn main() {
    let lambda = 0.0857;
    let d = lambda / 2.0;
    println!("half-wavelength pair, broadside phase 0:");
    for deg in [0.0f64, 30.0, 60.0, 90.0] {
        let af = phased_array_field(d, 0.0, deg.to_radians(), 0.0, lambda).unwrap();
        println!("  theta {deg:4.0} deg  |AF|^2 = {:.3}", af.norm_sqr());
    }
    let steered = phased_array_field(d, -PI * 30f64.to_radians().sin(), 30f64.to_radians(), 0.0, lambda).unwrap();
    println!("  steered to 30 deg: |AF|^2 = {:.3}", steered.norm_sqr());

    println!("\nsatellites 1.92 km apart, 550 km up, exact sum on the ground:");
    let sep = 1920.0;
    for x in [0.0, 6.0, 12.0, 18.0, 24.0] {
        let target = Vec3::new(sep / 2.0 + x, 0.0, -550e3);
        let f = two_source_field_exact(sep, 0.0, &target, lambda);
        println!("  {x:4.1} m from center: relative power {:.3}", (f * 550e3).norm_sqr());
    }
}
