use fracflow_core::curvature::*;
use fracflow_core::grid::IndicatorGrid;
use fracflow_core::params::{FlowParams, QuadratureConfig};

fn disk_curvature(r: f64, h: f64, s: f64, refine: u32) -> f64 {
    let half = (2.2 * r / h).ceil() as usize;
    let n = 2 * half;
    let g = IndicatorGrid::disk(n, n, h, r, 0.0, 0.0).unwrap();
    let p = FlowParams::new(2, s, 0.0).unwrap();
    let quad = QuadratureConfig {
        pv_cutoff: 2.0 * h,
        truncation_radius: 2.0 * r + 1.0,
        inner_refinement: refine,
        tail_correction: true,
    };
    let column = n / 2;
    let point = upper_boundary_point(&g, column).unwrap();
    fractional_mean_curvature(&g, point, &p, &quad).unwrap().value
}

fn main() {
    let s = 0.5;
    let p = FlowParams::new(2, s, 0.0).unwrap();
    let exact = ball_curvature_constant(&p).unwrap();
    println!("exact = {exact}");
    for &h in &[0.08, 0.04, 0.02, 0.01] {
        let v1 = disk_curvature(1.0, h, s, 1);
        let v4 = disk_curvature(1.0, h, s, 4);
        let v8 = disk_curvature(1.0, h, s, 8);
        println!("h={h}: refine1={v1:.5} refine4={v4:.5} refine8={v8:.5}  rel_err4={:.4}", (v4-exact)/exact);
    }
    for &r in &[0.5, 2.0] {
        let v = disk_curvature(r, 0.02, s, 4);
        println!("r={r}: v={v:.5} v*r^s={:.5} vs {exact:.5}", v * r.powf(s));
    }
}
