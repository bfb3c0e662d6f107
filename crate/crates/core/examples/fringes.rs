//! Two satellites on one orbit: the ground sees straight interference
//! fringes whose period grows as the satellites move closer together.

use leobeam::coverage::{build_scenario, enhancement_map, fringe_metrics, pair_spacing_km, CaseId, ScenarioParams};

fn main() {
    for sep_deg in [0.1, 0.2, 0.4] {
        let params = ScenarioParams { separation_rad: f64::to_radians(sep_deg), ..ScenarioParams::default() };
        let cfg = build_scenario(CaseId::TwoParallel, &params).unwrap();
        let map = enhancement_map(&cfg).unwrap();
        let f = fringe_metrics(&map).unwrap();
        println!(
            "separation {sep_deg:.1} deg ({:.2} km apart): max {:.2} dB, period {:.2} m, bright width {:.2} m, lines at {:.1} deg",
            pair_spacing_km(&cfg, 0, 1),
            map.max_db(),
            f.period_m,
            f.bright_width_m,
            f.orientation_rad.to_degrees()
        );
    }
}
