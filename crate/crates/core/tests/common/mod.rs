use debris_linker::integrals::DeltaCorrections;
use debris_linker::lambert::LambertBranch;
use debris_linker::linkage::{LinkageProblem, Route};
use debris_linker::radar::Attributable;

pub fn shifted(att: &Attributable, da: f64, dd: f64) -> Attributable {
    Attributable::new(att.t_bar, att.alpha_bar + da, att.delta_bar + dd, att.rho, att.rho_dot, att.rho_ddot, att.station.clone())
        .unwrap()
}

/// Largest entry of `|J − FD|` divided by the row's largest `|FD|`.
pub fn jacobian_error(problem: &LinkageProblem, delta: &DeltaCorrections, route: Route, branch: LambertBranch) -> f64 {
    let rr = problem.reduced_residual(delta, route, branch).unwrap();
    let along = match route {
        Route::Linear => Route::Linear,
        _ => Route::QuadraticNearest(rr.x.zeta2),
    };
    // Central differences at h and h/2 combined by Richardson extrapolation.
    let central = |col: usize, h: f64| {
        let mut plus = delta.to_vec();
        let mut minus = delta.to_vec();
        plus[col] += h;
        minus[col] -= h;
        let gp = problem.residual_value(&DeltaCorrections::from_vec(&plus), along, branch).unwrap().0;
        let gm = problem.residual_value(&DeltaCorrections::from_vec(&minus), along, branch).unwrap().0;
        (gp - gm) / (2.0 * h)
    };
    let h = 1e-7;
    let mut fd = debris_linker::Mat4::zeros();
    for col in 0..4 {
        fd.set_column(col, &((4.0 * central(col, 0.5 * h) - central(col, h)) / 3.0));
    }
    (0..4)
        .map(|i| {
            let row_scale = fd.row(i).amax();
            (rr.j.row(i) - fd.row(i)).amax() / row_scale
        })
        .fold(0.0, f64::max)
}
