use fbnoma_core::channel::db_to_linear;
use fbnoma_core::fbl::Blocklength;
use fbnoma_core::model::{ChannelGains, SystemParams};
use fbnoma_core::noma::{optimize_noma, Tolerances};
use fbnoma_core::oma::optimize_oma;
use fbnoma_core::oracle::{grid_optimize_noma, grid_optimize_oma, GridSpec};
use std::time::Instant;

fn main() {
    // the two sticky instances from the seed-11 check
    let cases = [
        (27.1, 480u32, 1.81, 0.913, 0.01725),
        (39.5, 448u32, 1.04, 0.492, 0.00501),
    ];
    for &(snr, n, t0, h1, h2) in &cases {
        let gains = ChannelGains::new(h1, h2).unwrap();
        let p = db_to_linear(snr);
        let params = SystemParams::new(Blocklength::new(n).unwrap(), p, t0).unwrap();
        let tol = Tolerances::for_power_budget(p);
        let noma = optimize_noma(&gains, &params, &tol).objective;
        let oma = optimize_oma(&gains, &params, &tol).t1_bar;
        println!("case snr={snr}: solver noma={noma:.6} oma={oma:.6}");
        for spec in [GridSpec::new(61,201,201).unwrap(), GridSpec::new(101,301,501).unwrap(), GridSpec::new(201,601,1001).unwrap()] {
            let t = Instant::now();
            let g = grid_optimize_noma(&gains, &params, &spec).objective;
            println!("  noma grid {:?}: {g:.6} rel dev {:.3e} ({:.2?})", (spec.p2_points,spec.r2_points,spec.r1_points), (noma-g).abs()/g, t.elapsed());
        }
        for spec in [GridSpec::new(201,61,201).unwrap(), GridSpec::new(401,61,301).unwrap(), GridSpec::new(801,121,601).unwrap()] {
            let t = Instant::now();
            let g = grid_optimize_oma(&gains, &params, &spec).t1_bar;
            println!("  oma grid {:?}: {g:.6} rel dev {:.3e} ({:.2?})", (spec.p2_points,spec.r2_points,spec.r1_points), (oma-g).abs()/g, t.elapsed());
        }
    }
}
