//! Verification suite behind `diracsea verify`: each group measures one
//! family of invariants against its pinned threshold and reports the worst
//! deviation. The working tolerance is a knob so a deliberately loosened run
//! demonstrates that the checks actually bite.

use diracsea::exact::evolve_exact;
use diracsea::modes::{mode_energy, mode_norm, ModeIndex, PhysParams, Sign};
use diracsea::oracle::{evolve_ode, OdeRun};
use diracsea::perturb;
use diracsea::specfun::{kummer_phi, kummer_residual, KummerParams};
use diracsea::vacuum::{
    vacuum_density_direct, vacuum_density_pert, GridScheme, MomentumGrid, Route,
};
use num_complex::Complex64;

pub const GROUPS: [&str; 5] = ["specfun", "norms", "identities", "scaling", "routes"];

pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const GRID_P: [f64; 9] = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];

fn regime(alpha: f64, tol: f64) -> PhysParams {
    PhysParams::new(1.0, alpha, -1.0)
        .expect("reference regime is valid")
        .with_series_tol(tol / 10.0)
        .expect("positive tolerance")
        .with_ode_tol(tol)
        .expect("positive tolerance")
}

pub fn run_group(name: &str, tol: f64) -> GroupReport {
    match name {
        "specfun" => specfun_group(tol),
        "norms" => norms_group(tol),
        "identities" => identities_group(),
        "scaling" => scaling_group(tol),
        "routes" => routes_group(tol),
        other => GroupReport {
            name: "unknown",
            passed: false,
            detail: format!("no group named '{other}'"),
        },
    }
}

struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

fn specfun_group(tol: f64) -> GroupReport {
    let series_tol = tol / 10.0;
    let mut worst_exp = 0.0f64;
    for i in 1..=20 {
        let r = 0.5 * i as f64;
        for th_deg in [90.0f64, -90.0, 0.0, 45.0, -45.0] {
            let z = Complex64::from_polar(r, th_deg.to_radians());
            let k = Complex64::new(0.7, -1.3);
            match kummer_phi(&KummerParams::new(k, k, z).with_tol(series_tol)) {
                Ok(phi) => worst_exp = worst_exp.max((phi - z.exp()).norm() / z.exp().norm()),
                Err(e) => {
                    return GroupReport {
                        name: "specfun",
                        passed: false,
                        detail: format!("series evaluation failed: {e}"),
                    }
                }
            }
        }
    }

    let mut rng = Lcg(0x5eed_cafe_f00d_0001);
    let mut worst_res = 0.0f64;
    for i in 0..20 {
        let j = Complex64::new(rng.in_range(-3.0, 3.0), rng.in_range(-3.0, 3.0));
        let k = Complex64::new(rng.in_range(0.5, 3.0), rng.in_range(-3.0, 3.0));
        let z = if i % 2 == 0 {
            Complex64::new(0.0, rng.in_range(0.1, 10.0))
        } else {
            Complex64::from_polar(
                rng.in_range(0.1, 3.0),
                rng.in_range(0.0, std::f64::consts::TAU),
            )
        };
        match kummer_residual(&KummerParams::new(j, k, z).with_tol(series_tol)) {
            Ok(res) => worst_res = worst_res.max(res),
            Err(e) => {
                return GroupReport {
                    name: "specfun",
                    passed: false,
                    detail: format!("residual evaluation failed: {e}"),
                }
            }
        }
    }

    let passed = worst_exp <= 1e-12 && worst_res <= 1e-10;
    GroupReport {
        name: "specfun",
        passed,
        detail: format!(
            "exp identity {worst_exp:.3e} (<= 1e-12), equation residual {worst_res:.3e} (<= 1e-10)"
        ),
    }
}

fn norms_group(tol: f64) -> GroupReport {
    let mut worst = 0.0f64;
    for &alpha in &[-0.01, -0.1, -0.5] {
        let params = regime(alpha, tol);
        for lambda in [Sign::Plus, Sign::Minus] {
            for p in GRID_P {
                match evolve_exact(&ModeIndex::new(lambda, p), &params, 0.0) {
                    Ok(state) => worst = worst.max((mode_norm(&state) - 1.0).abs()),
                    Err(e) => {
                        return GroupReport {
                            name: "norms",
                            passed: false,
                            detail: format!("evolution failed: {e}"),
                        }
                    }
                }
            }
        }
    }
    GroupReport {
        name: "norms",
        passed: worst <= 1e-9,
        detail: format!("max |norm - 1| = {worst:.3e} (<= 1e-9)"),
    }
}

fn identities_group() -> GroupReport {
    let mut worst = 0.0f64;
    for &alpha in &[-0.01, -0.5] {
        let params = PhysParams::new(1.0, alpha, -1.0).expect("valid");
        for lambda in [Sign::Plus, Sign::Minus] {
            for p in GRID_P {
                let mode = ModeIndex::new(lambda, p);
                for id in perturb::ratio_identities(&mode, &params) {
                    worst = worst.max((id.lhs - id.rhs).norm() / id.rhs.norm().max(1.0));
                }
                for t1 in [0.0, -0.7] {
                    let c1 = perturb::eps1(&mode, &params, t1);
                    let a1 = perturb::eps1_assembled(&mode, &params, t1);
                    if c1 != 0.0 {
                        worst = worst.max((a1 - c1).abs() / c1.abs());
                    }
                    let c2 = perturb::eps2_closed(&mode, &params, t1);
                    match perturb::eps2(&mode, &params, t1) {
                        Ok(parts) => worst = worst.max((parts.total() - c2).abs() / c2.abs()),
                        Err(e) => {
                            return GroupReport {
                                name: "identities",
                                passed: false,
                                detail: e.to_string(),
                            }
                        }
                    }
                }
            }
        }
    }
    GroupReport {
        name: "identities",
        passed: worst <= 1e-12,
        detail: format!("max relative deviation = {worst:.3e} (<= 1e-12)"),
    }
}

fn scaling_group(tol: f64) -> GroupReport {
    let residual = |alpha: f64| -> Result<f64, String> {
        let params = regime(alpha, tol);
        let mode = ModeIndex::new(Sign::Minus, 1.0);
        let state = evolve_exact(&mode, &params, 0.0).map_err(|e| e.to_string())?;
        let eps = mode_energy(&state, &params);
        let second = perturb::eps0(&mode, &params)
            + perturb::eps1(&mode, &params, 0.0)
            + perturb::eps2_closed(&mode, &params, 0.0);
        Ok((eps - second).abs())
    };
    let r: Result<Vec<f64>, String> = [-0.02f64, -0.04, -0.08].iter().map(|&a| residual(a)).collect();
    let r = match r {
        Ok(r) => r,
        Err(e) => {
            return GroupReport {
                name: "scaling",
                passed: false,
                detail: e,
            }
        }
    };
    let ratios = [r[1] / r[0], r[2] / r[1]];
    let passed = ratios.iter().all(|x| (6.5..=9.5).contains(x));
    GroupReport {
        name: "scaling",
        passed,
        detail: format!(
            "third-order residual ratios {:.3}, {:.3} (in [6.5, 9.5])",
            ratios[0], ratios[1]
        ),
    }
}

fn routes_group(tol: f64) -> GroupReport {
    let mut worst_mode = 0.0f64;
    for &alpha in &[-0.01, -0.1] {
        let params = regime(alpha, tol);
        for lambda in [Sign::Plus, Sign::Minus] {
            for p in GRID_P {
                let mode = ModeIndex::new(lambda, p);
                let pair = (|| -> Result<f64, String> {
                    let exact = evolve_exact(&mode, &params, 0.0).map_err(|e| e.to_string())?;
                    let run = OdeRun::seeded(&params, 0.0).map_err(|e| e.to_string())?;
                    let ode = evolve_ode(&mode, &params, &run).map_err(|e| e.to_string())?;
                    Ok((mode_energy(&exact, &params) - mode_energy(&ode, &params)).abs())
                })();
                match pair {
                    Ok(diff) => worst_mode = worst_mode.max(diff),
                    Err(e) => {
                        return GroupReport {
                            name: "routes",
                            passed: false,
                            detail: e,
                        }
                    }
                }
            }
        }
    }

    let params = regime(-0.01, tol);
    let density = (|| -> Result<f64, String> {
        let pert = vacuum_density_pert(&params).map_err(|e| e.to_string())?;
        let grid = MomentumGrid::new(50.0, 2001, GridScheme::SinhStretched)
            .map_err(|e| e.to_string())?;
        let direct =
            vacuum_density_direct(&params, &grid, Route::Exact).map_err(|e| e.to_string())?;
        Ok((direct.density - pert.density_pert).abs() / pert.density_pert.abs())
    })();
    let density_rel = match density {
        Ok(v) => v,
        Err(e) => {
            return GroupReport {
                name: "routes",
                passed: false,
                detail: e,
            }
        }
    };

    let passed = worst_mode <= 1e-8 && density_rel <= 1e-2;
    GroupReport {
        name: "routes",
        passed,
        detail: format!(
            "max |exact - oracle| = {worst_mode:.3e} (<= 1e-8), density routes within {density_rel:.3e} (<= 1e-2)"
        ),
    }
}
