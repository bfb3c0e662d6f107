//! Four cooperating satellites focus power into a spot around the UE. The
//! spot shape depends on how the polarizations of the two pairs relate.

use leobeam::coverage::{build_scenario, enhancement_map, single_sat_cell_radius, spot_metrics, CaseId, ScenarioParams};

fn main() {
    println!(
        "single-satellite cell, 2.5 deg beam at 550 km: radius {:.1} km",
        single_sat_cell_radius(2.5f64.to_radians(), 550.0).unwrap()
    );
    for case in [CaseId::FourParallel, CaseId::FourPerpendicular, CaseId::FourIntersecting] {
        let params = ScenarioParams {
            intersect_angle_rad: (case == CaseId::FourIntersecting).then(|| 60f64.to_radians()),
            ..ScenarioParams::default()
        };
        let cfg = build_scenario(case, &params).unwrap();
        let map = enhancement_map(&cfg).unwrap();
        let spot = spot_metrics(&map, 6.0).unwrap();
        println!(
            "{case:>18}: max {:.2} dB (bound {:.2}), 6 dB spot {:.0} m2, radius {:.1} m, diagonal {:.1} m",
            map.max_db(),
            cfg.closed_form_max_db(),
            spot.area_m2,
            spot.equivalent_radius_m,
            spot.diagonal_m
        );
    }
}
