use svol_core::heston::{compare_densities, HestonParams};
use svol_core::Horizon;

fn five_days() -> Horizon {
    Horizon::trading_days(5.0).unwrap()
}

#[test]
fn leverage_matters_under_strong_reversion() {
    let p = HestonParams::new(0.0, 16.0, 0.04, 0.8, 0.0).unwrap();
    let c = compare_densities(&p, &[0.0, -1.0], five_days(), 801, 10.0).unwrap();
    assert_eq!(c.densities.len(), 2);
    assert!(c.relative_gap() > 0.05, "gap {}", c.relative_gap());
}

#[test]
fn leverage_is_invisible_under_weak_reversion() {
    let p = HestonParams::new(0.0, 1.0, 0.04, 0.02, 0.0).unwrap();
    let c = compare_densities(&p, &[0.0, -1.0], five_days(), 801, 10.0).unwrap();
    assert!(c.relative_gap() < 0.005, "gap {}", c.relative_gap());
}

#[test]
fn single_curve_is_normalized() {
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    let c = compare_densities(&p, &[-0.7], five_days(), 1201, 12.0).unwrap();
    assert_eq!(c.densities.len(), 1);
    assert_eq!(c.relative_gap(), 0.0);
    let h = c.grid[1] - c.grid[0];
    let d = &c.densities[0];
    let mass = h * (d.iter().sum::<f64>() - 0.5 * (d[0] + d[d.len() - 1]));
    assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
}

#[test]
fn comparison_rejects_bad_input() {
    let p = HestonParams::new(0.0, 2.0, 0.04, 0.3, -0.7).unwrap();
    assert!(compare_densities(&p, &[], five_days(), 101, 10.0).is_err());
    assert!(compare_densities(&p, &[-1.5], five_days(), 101, 10.0).is_err());
    assert!(compare_densities(&p, &[0.0], five_days(), 1, 10.0).is_err());
    assert!(compare_densities(&p, &[0.0], five_days(), 101, 4.0).is_err());
}
