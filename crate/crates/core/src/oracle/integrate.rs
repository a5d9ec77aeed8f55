use num_complex::Complex64;

use super::{
    fastest_rate, BathGrid, OracleError, OracleMethod, OracleRun, StepPlan, DIVERGENCE_LIMIT,
};
use crate::observables::CatSpec;
use crate::params::SystemParams;
use crate::units::UnitSystem;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which coherent-label problem to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChannel {
    /// Exciton label starts at 1, drive switched off: recovers u and u_j.
    CoefficientU,
    /// Exciton label starts at 0, drive on: recovers w and v_j.
    CoefficientW,
}

/// Classic RK4 on a complex state in reduced time x = t/ħ. `deriv(x, y,
/// dy)` must overwrite `dy`. `record(k, x, y)` is called at step 0, every
/// `record_every` steps and after the final step.
fn rk4<F, R>(
    y: &mut [Complex64],
    h: f64,
    steps: usize,
    record_every: usize,
    mut deriv: F,
    mut record: R,
) -> Result<(), OracleError>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    R: FnMut(usize, f64, &[Complex64]) -> Result<(), OracleError>,
{
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut tmp = vec![zero; n];

    record(0, 0.0, y)?;
    for step in 0..steps {
        let x = step as f64 * h;
        deriv(x, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        deriv(x + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        deriv(x + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        deriv(x + h, &tmp, &mut k4);
        let h6 = h / 6.0;
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * h6;
        }
        let done = step + 1;
        if done % record_every == 0 || done == steps {
            record(done, done as f64 * h, y)?;
        }
    }
    Ok(())
}

fn check_finite(t_fs: f64, what: &'static str, values: &[Complex64]) -> Result<(), OracleError> {
    let worst = values.iter().map(|z| z.norm()).fold(0.0f64, |a, b| {
        if b.is_nan() {
            f64::INFINITY
        } else {
            a.max(b)
        }
    });
    if worst > DIVERGENCE_LIMIT {
        return Err(OracleError::Divergence {
            t: t_fs,
            what,
            magnitude: worst,
        });
    }
    Ok(())
}

fn weighted_sum(kappa: &[f64], amps: &[Complex64]) -> Complex64 {
    kappa
        .iter()
        .zip(amps)
        .fold(Complex64::new(0.0, 0.0), |acc, (k, a)| acc + a * *k)
}

/// Coherent-label equations of the driven oscillator coupled to the grid,
/// in the frame rotating at Ω:
///
/// ```text
/// ȧ   = −i Σ_j κ_j β_j − iξ e^{−iδt}
/// β̇_j = −i ε_j β_j − i κ_j a
/// ```
pub fn integrate_mode_equations(
    params: &SystemParams,
    grid: &BathGrid,
    mode: ModeChannel,
    plan: &StepPlan,
) -> Result<OracleRun, OracleError> {
    plan.check_rate(fastest_rate(params, Some(grid.window)))?;
    let eps = grid.detunings();
    let kappa = grid.couplings.clone();
    let j = grid.len();
    let (label0, xi) = match mode {
        ModeChannel::CoefficientU => (Complex64::new(1.0, 0.0), 0.0),
        ModeChannel::CoefficientW => (Complex64::new(0.0, 0.0), params.xi),
    };
    let delta = params.delta;

    let mut y = vec![Complex64::new(0.0, 0.0); 1 + j];
    y[0] = label0;

    let mut times = Vec::new();
    let mut labels = Vec::new();
    let mut fields = Vec::new();
    let h = UnitSystem::reduced_time(plan.dt);

    rk4(
        &mut y,
        h,
        plan.steps,
        plan.record_every,
        |x, y, dy| {
            let (a, beta) = (y[0], &y[1..]);
            dy[0] = -I * weighted_sum(&kappa, beta) - I * xi * Complex64::new(0.0, -delta * x).exp();
            for ((d, b), (e, k)) in dy[1..].iter_mut().zip(beta).zip(eps.iter().zip(&kappa)) {
                *d = -I * (b * *e + a * *k);
            }
        },
        |_, x, y| {
            let t = UnitSystem::time_fs(x);
            check_finite(t, "label", y)?;
            times.push(t);
            labels.push(y[0]);
            fields.push(y[1..].to_vec());
            Ok(())
        },
    )?;

    let empty = Vec::new;
    let (u_path, w_path, uj_path, vj_path, method) = match mode {
        ModeChannel::CoefficientU => (labels, empty(), fields, Vec::new(), OracleMethod::ModeEquationsU),
        ModeChannel::CoefficientW => (empty(), labels, Vec::new(), fields, OracleMethod::ModeEquationsW),
    };
    Ok(OracleRun {
        times,
        u_path,
        w_path,
        a_path: Vec::new(),
        b_path: Vec::new(),
        uj_path,
        vj_path,
        step_size: plan.dt,
        method,
        grid: Some(grid.meta()),
    })
}

/// Integrates the full set of coefficient equations on the grid. With
/// D = u e^{−iΩt} − 1, C = w e^{−iΩt}, C_j = u_j e^{−iΩt}, E_j = v_j e^{−iΩt}
/// they read, in the rotating frame,
///
/// ```text
/// u̇   = −i Σ κ_j u_j                 u̇_j = −i ε_j u_j − i κ_j u
/// ẇ   = −i Σ κ_j v_j − iξ e^{−iδt}   v̇_j = −i ε_j v_j − i κ_j w
/// Ȧ   = −iξ e^{iδt} w                Ḃ   = −iξ e^{iδt} u
/// ```
///
/// starting from u = 1 and everything else 0.
pub fn integrate_coefficient_odes(
    params: &SystemParams,
    grid: &BathGrid,
    plan: &StepPlan,
) -> Result<OracleRun, OracleError> {
    plan.check_rate(fastest_rate(params, Some(grid.window)))?;
    let eps = grid.detunings();
    let kappa = grid.couplings.clone();
    let j = grid.len();
    let xi = params.xi;
    let delta = params.delta;

    // [u, w, A, B, u_1..u_J, v_1..v_J]
    let mut y = vec![Complex64::new(0.0, 0.0); 4 + 2 * j];
    y[0] = Complex64::new(1.0, 0.0);

    let mut run = OracleRun {
        times: Vec::new(),
        u_path: Vec::new(),
        w_path: Vec::new(),
        a_path: Vec::new(),
        b_path: Vec::new(),
        uj_path: Vec::new(),
        vj_path: Vec::new(),
        step_size: plan.dt,
        method: OracleMethod::CoefficientOdes,
        grid: Some(grid.meta()),
    };
    let h = UnitSystem::reduced_time(plan.dt);

    rk4(
        &mut y,
        h,
        plan.steps,
        plan.record_every,
        |x, y, dy| {
            let (u, w) = (y[0], y[1]);
            let (uj, vj) = y[4..].split_at(j);
            let rot = Complex64::new(0.0, delta * x).exp();
            dy[0] = -I * weighted_sum(&kappa, uj);
            dy[1] = -I * weighted_sum(&kappa, vj) - I * xi * rot.conj();
            dy[2] = -I * xi * rot * w;
            dy[3] = -I * xi * rot * u;
            let (duj, dvj) = dy[4..].split_at_mut(j);
            for m in 0..j {
                let (e, k) = (eps[m], kappa[m]);
                duj[m] = -I * (uj[m] * e + u * k);
                dvj[m] = -I * (vj[m] * e + w * k);
            }
        },
        |_, x, y| {
            let t = UnitSystem::time_fs(x);
            check_finite(t, "u/w", &y[..2])?;
            check_finite(t, "field amplitude", &y[4..])?;
            run.times.push(t);
            run.u_path.push(y[0]);
            run.w_path.push(y[1]);
            run.a_path.push(y[2]);
            run.b_path.push(y[3]);
            run.uj_path.push(y[4..4 + j].to_vec());
            run.vj_path.push(y[4 + j..].to_vec());
            Ok(())
        },
    )?;
    Ok(run)
}

/// Solves u̇(t) = −∫₀ᵗ K(t−t′) u(t′) dt′, u(0) = 1, with the Lorentzian
/// kernel K(τ) = MΓe^{−Γ|τ|}.
///
/// For a single-exponential kernel the memory integral
/// I(t) = ∫₀ᵗ K(t−t′)u(t′)dt′ obeys İ = K(0)u − ΓI, so the history is
/// carried in one extra variable and advanced with the same RK4 step:
/// O(1) work per step and no quadrature error beyond the stepper's.
pub fn solve_volterra_u(params: &SystemParams, plan: &StepPlan) -> Result<OracleRun, OracleError> {
    plan.check_rate(fastest_rate(params, None))?;
    let k0 = params.m_coupling * params.gamma;
    let gamma = params.gamma;
    // [u, memory]
    let mut y = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut times = Vec::new();
    let mut u_path = Vec::new();
    let h = UnitSystem::reduced_time(plan.dt);
    rk4(
        &mut y,
        h,
        plan.steps,
        plan.record_every,
        |_, y, dy| {
            dy[0] = -y[1];
            dy[1] = y[0] * k0 - y[1] * gamma;
        },
        |_, x, y| {
            let t = UnitSystem::time_fs(x);
            check_finite(t, "u", &y[..1])?;
            times.push(t);
            u_path.push(y[0]);
            Ok(())
        },
    )?;
    Ok(OracleRun {
        times,
        u_path,
        w_path: Vec::new(),
        a_path: Vec::new(),
        b_path: Vec::new(),
        uj_path: Vec::new(),
        vj_path: Vec::new(),
        step_size: plan.dt,
        method: OracleMethod::Volterra,
        grid: None,
    })
}

/// Off-diagonal coefficient of the exciton's reduced density matrix at
/// every recorded row of a coefficient-ODE run.
///
/// Branch k has field labels α_k u_j + v_j and unit-modulus prefactor
/// P_k = exp(i Im(A + Bα_k)). The factor on |branch 1⟩⟨branch 2| is taken
/// in the ⟨branch 1|branch 2⟩ ordering, P₁* P₂ Π_j ⟨x_j|y_j⟩, with
/// ⟨x|y⟩ = exp(−½|x|² − ½|y|² + x* y).
pub fn decoherence_from_run(run: &OracleRun, cat: &CatSpec) -> Result<Vec<Complex64>, OracleError> {
    if run.method != OracleMethod::CoefficientOdes {
        return Err(OracleError::MissingChannel("A/B (need a coefficient-ODE run)".into()));
    }
    let (a1, a2) = (cat.alpha1, cat.alpha2);
    let out = (0..run.len())
        .map(|row| {
            let a = run.a_path[row];
            let b = run.b_path[row];
            let p1 = (a + b * a1).im;
            let p2 = (a + b * a2).im;
            let mut exponent = Complex64::new(0.0, p2 - p1);
            for (u, v) in run.uj_path[row].iter().zip(&run.vj_path[row]) {
                let x = a1 * u + v;
                let y = a2 * u + v;
                exponent += -0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y;
            }
            exponent.exp()
        })
        .collect();
    Ok(out)
}

/// Evolves both cat branches on the grid and returns the decoherence
/// factor at every recorded time as (t [fs], F).
pub fn oracle_decoherence_series(
    params: &SystemParams,
    grid: &BathGrid,
    cat: &CatSpec,
    plan: &StepPlan,
) -> Result<Vec<(f64, Complex64)>, OracleError> {
    let run = integrate_coefficient_odes(params, grid, plan)?;
    let f = decoherence_from_run(&run, cat)?;
    Ok(run.times.into_iter().zip(f).collect())
}

/// Decoherence factor at a single time `t` (fs) with step at most `dt`.
pub fn oracle_decoherence_factor(
    params: &SystemParams,
    grid: &BathGrid,
    cat: &CatSpec,
    t: f64,
    dt: f64,
) -> Result<Complex64, OracleError> {
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let plan = StepPlan::fixed(t, dt, usize::MAX)?;
    let series = oracle_decoherence_series(params, grid, cat, &plan)?;
    Ok(series.last().expect("final row is always recorded").1)
}
