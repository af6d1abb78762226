//! Scratch calibration runs (not part of the deliverable test suite).

use fmcf_core::comparison_ode::umbilic_exact;
use fmcf_core::flow_engine::{run, singularity_probe, FlowParams, InitialData, Outcome};
use fmcf_core::graph_geometry::AnalyticSurface;
use fmcf_core::hyp_base::FermiChart;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("umbilic");
    match which {
        "umbilic" => umbilic_check(),
        "profiles" => profile_checks(),
        "probe" => probe_checks(),
        "refine" => refine_checks(),
        _ => eprintln!("unknown mode"),
    }
}

fn umbilic_check() {
    let ch = FermiChart::new(6.0, 1.0, 128, 64).unwrap();
    let params = FlowParams {
        t_max: 3.0,
        ..FlowParams::default()
    };
    let start = Instant::now();
    let (summary, records) = run(ch, &InitialData::Constant(1.0), params).unwrap();
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    for r in &records {
        worst = worst.max((r.umax - umbilic_exact(1.0, r.t)).abs());
    }
    println!(
        "umbilic 128x64 to t=3: outcome {:?}, steps {}, worst dev {:.3e}, elapsed {:.2?}",
        summary.outcome, summary.steps, worst, elapsed
    );
    println!(
        "violations: barrier {}, angle {}; slope {:?}",
        summary.barrier_violations, summary.angle_violations, summary.slope_sinh_umax
    );
}

fn profile_checks() {
    let ch = FermiChart::new(6.0, 1.0, 128, 64).unwrap();
    let profiles: Vec<(&str, InitialData)> = vec![
        ("const-1.0", InitialData::Constant(1.0)),
        ("const-0.5", InitialData::Constant(0.5)),
        (
            "sine+offset",
            InitialData::Profile(AnalyticSurface::sine_bump(ch, 0.1, 1).with_offset(0.3)),
        ),
        (
            "cos+offset",
            InitialData::Profile(AnalyticSurface::cos_bump(ch, 0.15, 1).with_offset(0.4)),
        ),
        (
            "ridge",
            InitialData::Profile(AnalyticSurface::bump(ch, -0.2).with_offset(0.5)),
        ),
    ];
    for (name, u0) in &profiles {
        let params = FlowParams {
            t_max: 5.0,
            ..FlowParams::default()
        };
        let start = Instant::now();
        let (summary, _) = run(ch, u0, params).unwrap();
        println!(
            "{name}: outcome {:?} at t={:.3}, steps {}, compliance {:?}, theta0_min {:.4}, thresh {:.4}, slope {:?}, viol {}/{}, elapsed {:.1?}",
            summary.outcome,
            summary.t_final,
            summary.steps,
            summary.compliance,
            summary.theta0_min,
            summary.threshold,
            summary.slope_sinh_umax,
            summary.barrier_violations,
            summary.angle_violations,
            start.elapsed()
        );
    }
}

fn probe_checks() {
    for (name, amp, kx, tol) in [
        ("steep-1.2-k2", 1.2, 2u32, 0.25),
        ("steep-1.2-k3", 1.2, 3u32, 0.25),
        ("steep-0.9-k3", 0.9, 3u32, 0.25),
    ] {
        let ch = FermiChart::new(6.0, 1.0, 128, 64).unwrap();
        let params = FlowParams {
            t_max: 2.0,
            probe_rate_tol: tol,
            ..FlowParams::default()
        };
        let profile = AnalyticSurface::sine_bump(ch, amp, kx);
        let report = singularity_probe(ch, &InitialData::Profile(profile), params).unwrap();
        let frac = report.rate_ok_count as f64 / report.rate_checked.max(1) as f64;
        println!(
            "{name}: outcome {:?} t={:.4}, class {:?}, rate ok {:.2}% ({}/{})",
            report.outcome,
            report.t_final,
            report.classification,
            frac * 100.0,
            report.rate_ok_count,
            report.rate_checked
        );
        // how bad are the worst violations?
        let mut defects: Vec<f64> = report
            .records
            .iter()
            .filter_map(|r| match (r.rate_measured, r.rate_bound) {
                (Some(m), Some(b)) => Some(b - m),
                _ => None,
            })
            .collect();
        defects.sort_by(|a, b| b.partial_cmp(a).unwrap());
        println!("  worst (bound - measured): {:?}", &defects[..defects.len().min(5)]);
        let final_thetas: Vec<f64> = report
            .records
            .iter()
            .rev()
            .take(5)
            .map(|r| r.monitor.theta_min)
            .collect();
        println!("  final thetas {:?}", final_thetas);
    }
}

fn refine_checks() {
    // b-defect at the angle argmin under refinement, at fixed t*
    for (amp, kx, tstar) in [(1.2, 2u32, 0.10), (1.0, 2, 0.15), (1.2, 2, 0.05)] {
        let mut defects = Vec::new();
        let mut thetas = Vec::new();
        for nx in [64usize, 128, 256] {
            let ch = FermiChart::new(6.0, 1.0, nx, nx / 2).unwrap();
            let params = FlowParams {
                t_max: tstar,
                record_every: usize::MAX,
                ..FlowParams::default()
            };
            let profile = AnalyticSurface::sine_bump(ch, amp, kx);
            let (summary, _) = run(ch, &InitialData::Profile(profile), params).unwrap();
            assert_eq!(summary.outcome, Outcome::MaxTime, "nx={nx}");
            defects.push(summary.final_record.b_defect);
            thetas.push(summary.final_record.theta_min);
        }
        println!(
            "amp {amp} kx {kx} t*={tstar}: thetas {:?} b-defects {:?} ratios [{:.3}, {:.3}]",
            thetas,
            defects,
            defects[1] / defects[0],
            defects[2] / defects[1]
        );
    }
}
