//! Step study behind `FdStencil::default_for`.
//!
//! For each derivative order that an identity needs, sweeps the base step
//! around the default and prints the worst relative residual next to the
//! round-off bound. The default must pass its tolerance, and halving it must
//! not inflate the residual by more than 10x unless the refined residual is
//! already under the refined round-off bound.

use atlab_core::fd::FdStencil;
use atlab_core::residual::{check_btp, check_thm_alpha, check_thm_cauchy, check_thm_ictbap, ResidualReport};
use atlab_core::semigroup::PlaneWave;
use atlab_core::AlphaIndex;

type Check = fn(&FdStencil) -> atlab_core::Result<ResidualReport>;

const T_GRID: [f64; 3] = [0.5, 1.0, 2.0];

fn xs() -> Vec<Vec<f64>> {
    vec![vec![0.0], vec![0.7], vec![1.9]]
}

fn cases() -> Vec<(&'static str, usize, Check)> {
    vec![
        ("btp kappa=1", 1, |st| check_btp(&PlaneWave::scalar(1.0), &T_GRID, &xs(), st)),
        ("cauchy kappa=2", 2, |st| check_thm_cauchy(&PlaneWave::scalar(2.0), &T_GRID, &xs(), st)),
        ("ictbap kappa_sq=4", 2, |st| check_thm_ictbap(&PlaneWave::scalar(2.0), &T_GRID, &xs(), st)),
        ("alpha=1/2 kappa=1", 4, |st| {
            check_thm_alpha(AlphaIndex::new(1, 2).unwrap(), &PlaneWave::scalar(1.0), &[1.0, 2.0], &xs(), st)
        }),
        ("alpha=1/3 kappa=1", 6, |st| {
            check_thm_alpha(AlphaIndex::new(1, 3).unwrap(), &PlaneWave::scalar(1.0), &[1.0, 2.0], &xs(), st)
        }),
    ]
}

#[test]
fn default_steps_are_truncation_dominated() {
    let mut failures = Vec::new();
    for (label, order, check) in cases() {
        let default = FdStencil::default_for(order);
        println!("{label} (order {order}, default step {})", default.base_step);
        println!("  {:>8} {:>12} {:>12}", "step", "max rel", "round-off");
        for factor in [4.0, 2.0, 1.0, 0.5, 0.25] {
            let st = FdStencil::new(order, default.base_step * factor, default.richardson_levels).unwrap();
            match check(&st) {
                Ok(r) => println!("  {:>8.4} {:>12.3e} {:>12.3e}", st.base_step, r.max_rel_residual(), r.roundoff_floor()),
                Err(e) => println!("  {:>8.4} {e}", st.base_step),
            }
        }

        let base = check(&default).unwrap();
        let refined = check(&default.refined()).unwrap();
        if base.pass != Some(true) {
            failures.push(format!("{label}: default fails its tolerance ({:.3e})", base.max_rel_residual()));
        }
        let (a, b) = (base.max_rel_residual(), refined.max_rel_residual());
        if !(b <= 10.0 * a || b <= refined.roundoff_floor()) {
            failures.push(format!("{label}: refined {b:.3e} vs base {a:.3e}"));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn coarser_steps_lose_accuracy() {
    // Truncation error must be visible above the default for the low orders.
    for (label, order, check) in cases().into_iter().filter(|c| c.1 <= 2) {
        let default = FdStencil::default_for(order);
        let coarse = FdStencil::new(order, default.base_step * 4.0, 0).unwrap();
        let (fine, rough) = (check(&default).unwrap().max_rel_residual(), check(&coarse).unwrap().max_rel_residual());
        assert!(rough > fine, "{label}: coarse {rough:.3e} vs default {fine:.3e}");
    }
}
