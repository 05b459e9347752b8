use std::fs::File;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::control::{gate_controls, synthesize_controls, ControlHamiltonian, ErrorSetting, Scheme};
use crate::dynamics::propagator;
use crate::gates::{evolution_operator_simplified, gate_distance_up_to_phase, write_matrix_csv, SingleQubitGate};
use crate::metrics::{single_qubit_f1, sweep_decoherence, sweep_systematic, Axis, SweepGrid};
use crate::output::{csv_writer, fmt_f64, fmt_row};
use crate::transmon::{capped_controls, qubit_state, simulate_single_qubit, sweep_omega_max, TransmonOptions, TransmonParams};
use crate::two_qubit::{compare_effective, design_cphase, reference_input, simulate_two_qubit, TwoQubitOptions};
use crate::units::{khz, mhz};
use crate::{CMatrix, Error, Result};

use super::manifest::{Settings, SweepVariable};
use super::{Derived, Experiment};

const FIG_GATES: [SingleQubitGate; 2] = [SingleQubitGate::H, SingleQubitGate::T];

fn transmon_params(s: &Settings, omega_mhz: f64) -> Result<TransmonParams> {
    let t = &s.transmon;
    TransmonParams::new(mhz(t.alpha_mhz), khz(t.kappa1_khz), khz(t.kappa2_khz), mhz(omega_mhz))
}

fn transmon_options(s: &Settings, series_points: usize) -> TransmonOptions {
    TransmonOptions {
        scheme: s.transmon.scheme,
        drag: s.transmon.drag,
        steps: s.steps,
        series_points,
    }
}

fn custom_axes(s: &Settings) -> Result<Vec<(SweepVariable, Axis)>> {
    let c = &s.custom;
    let name = |v: SweepVariable| match v {
        SweepVariable::Kappa => "kappa",
        SweepVariable::Delta => "delta",
        SweepVariable::Eps => "eps",
    };
    let mut axes = vec![(c.axis, Axis::new(name(c.axis), c.min, c.max, c.points)?)];
    if let Some(v) = c.axis2 {
        if v == c.axis {
            return Err(Error::Manifest {
                key: "custom.axis2".into(),
                reason: "must differ from custom.axis".into(),
            });
        }
        axes.push((v, Axis::new(name(v), c.min2, c.max2, c.points2)?));
    }
    for (v, a) in &axes {
        if *v == SweepVariable::Kappa && a.min < 0.0 {
            return Err(Error::param("kappa", "must be nonnegative"));
        }
    }
    Ok(axes)
}

pub(super) fn validate(s: &Settings) -> Result<Derived> {
    let mut d = Derived::new();
    if s.steps == 0 {
        return Err(Error::Manifest {
            key: "steps".into(),
            reason: "must be positive".into(),
        });
    }
    if !(s.fig2.kappa_max >= 0.0) {
        return Err(Error::param("fig2.kappa_max", "must be nonnegative"));
    }
    Axis::new("kappa", 0.0, s.fig2.kappa_max, s.fig2.kappa_points)?;
    if !(s.fig3.kappa >= 0.0) {
        return Err(Error::param("fig3.kappa", "must be nonnegative"));
    }
    if !(s.fig3.threshold > 0.0 && s.fig3.threshold <= 1.0) {
        return Err(Error::param("fig3.threshold", "must lie in (0, 1]"));
    }
    Axis::new("delta", s.fig3.error_min, s.fig3.error_max, s.fig3.error_points)?;

    let t = &s.transmon;
    for (g, om) in [(SingleQubitGate::H, t.omega_h_mhz), (SingleQubitGate::T, t.omega_t_mhz)] {
        let tp = transmon_params(s, om)?;
        let c = capped_controls(t.scheme, g, tp.omega_max)?;
        d.insert(format!("transmon.tau_{g}_us"), c.tau());
    }
    if !(t.sweep_min_mhz > 0.0) {
        return Err(Error::param("transmon.sweep_min_mhz", "must be positive"));
    }
    Axis::new("omega_max_mhz", t.sweep_min_mhz, t.sweep_max_mhz, t.sweep_points)?;

    let p = s.two_qubit.params();
    let sched = design_cphase(&p, s.two_qubit.gamma_g, s.two_qubit.frame)?;
    d.insert("two_qubit.tau_us".into(), sched.tau());
    d.insert("two_qubit.phi_span".into(), sched.path.phi_span());
    d.insert("two_qubit.eta_rate".into(), sched.eta_rate);
    d.insert("two_qubit.delta_prime".into(), p.delta_prime());
    d.insert("two_qubit.effective_amplitude".into(), p.effective_amplitude());

    let c = synthesize_controls(&s.gate.path(s.synth.tau)?)?;
    d.insert("synth.omega_bar".into(), c.omega_bar());
    custom_axes(s)?;
    Ok(d)
}

fn create(out: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<File> {
    let path = out.join(name);
    let f = File::create(&path)?;
    files.push(path);
    Ok(f)
}

/// Two-column `quantity,value` table.
fn write_summary(f: File, rows: &[(String, f64)]) -> Result<()> {
    let mut w = csv_writer(f);
    w.write_record(["quantity", "value"])?;
    for (k, v) in rows {
        w.write_record([k.clone(), fmt_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn run(s: &Settings) -> Result<(Vec<PathBuf>, Derived)> {
    let mut files = Vec::new();
    let mut d = Derived::new();
    let out = s.out.as_path();
    match s.experiment {
        Experiment::Fig2 => fig2(s, out, &mut files, &mut d)?,
        Experiment::Fig3 => fig3(s, out, &mut files, &mut d)?,
        Experiment::Fig5a => fig5a(s, out, &mut files, &mut d)?,
        Experiment::Fig5bcd => fig5bcd(s, out, &mut files, &mut d)?,
        Experiment::Fig6 => fig6(s, out, &mut files, &mut d)?,
        Experiment::Synth => synth(s, out, &mut files, &mut d)?,
        Experiment::SweepCustom => sweep_custom(s, out, &mut files, &mut d)?,
    }
    Ok((files, d))
}

fn fig2(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let axis = Axis::new("kappa", 0.0, s.fig2.kappa_max, s.fig2.kappa_points)?;
    for g in FIG_GATES {
        let sweeps = Scheme::ALL
            .iter()
            .map(|&sc| sweep_decoherence(sc, g, &axis, s.steps))
            .collect::<Result<Vec<_>>>()?;
        let mut w = csv_writer(create(out, &format!("fig2_{g}.csv"), files)?);
        w.write_record(["kappa", "npgqc", "dg"])?;
        for (i, k) in axis.values().into_iter().enumerate() {
            w.write_record(fmt_row(&[k, sweeps[0].values[i], sweeps[1].values[i]]))?;
        }
        w.flush()?;
        for (sc, sw) in Scheme::ALL.iter().zip(&sweeps) {
            d.insert(format!("fig2.{g}.{}.f1_min", sc.name()), sw.values.iter().copied().fold(1.0, f64::min));
        }
    }
    Ok(())
}

fn fig3(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let f = &s.fig3;
    let delta = Axis::new("delta", f.error_min, f.error_max, f.error_points)?;
    let eps = Axis::new("eps", f.error_min, f.error_max, f.error_points)?;
    let mut rows = Vec::new();
    for g in FIG_GATES {
        for sc in Scheme::ALL {
            let grid = sweep_systematic(sc, g, &delta, &eps, f.kappa, s.steps)?;
            grid.write_csv(create(out, &format!("fig3_{}_{g}.csv", sc.name()), files)?, "f1")?;
            let frac = grid.fraction_at_least(f.threshold);
            d.insert(format!("fig3.{g}.{}.area_fraction", sc.name()), frac);
            rows.push((format!("{g}.{}.area_fraction", sc.name()), frac));
            rows.push((format!("{g}.{}.f1_max", sc.name()), grid.max()));
        }
    }
    write_summary(create(out, "fig3_summary.csv", files)?, &rows)
}

fn fig5a(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let t = &s.transmon;
    let shown = Axis::new("omega_max_mhz", t.sweep_min_mhz, t.sweep_max_mhz, t.sweep_points)?;
    let axis = Axis::new("omega_max", mhz(t.sweep_min_mhz), mhz(t.sweep_max_mhz), t.sweep_points)?;
    let base = transmon_params(s, t.sweep_min_mhz)?;
    let opts = transmon_options(s, 0);
    let sweeps = FIG_GATES
        .iter()
        .map(|&g| sweep_omega_max(g, &base, &axis, &opts))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv_writer(create(out, "fig5a.csv", files)?);
    w.write_record(["omega_max_mhz", "H", "T"])?;
    for (i, om) in shown.values().into_iter().enumerate() {
        w.write_record(fmt_row(&[om, sweeps[0].values[i], sweeps[1].values[i]]))?;
    }
    w.flush()?;
    for (g, sw) in FIG_GATES.iter().zip(&sweeps) {
        let (i, best) = sw
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        d.insert(format!("fig5a.{g}.f1_peak"), best);
        d.insert(format!("fig5a.{g}.omega_peak_mhz"), shown.values()[i]);
    }
    Ok(())
}

fn fig5bcd(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let t = &s.transmon;
    let cases = [
        (SingleQubitGate::H, t.omega_h_mhz, qubit_state(0.0), "fig5c_H.csv"),
        (SingleQubitGate::T, t.omega_t_mhz, qubit_state(std::f64::consts::FRAC_PI_4), "fig5d_T.csv"),
    ];
    for (g, om, psi, state_file) in cases {
        let r = simulate_single_qubit(g, &transmon_params(s, om)?, &transmon_options(s, t.series_points))?;
        let mut w = csv_writer(create(out, &format!("fig5b_{g}.csv"), files)?);
        w.write_record(["t", "f1"])?;
        for (time, f) in r.fidelity_series()? {
            w.write_record(fmt_row(&[time, f]))?;
        }
        w.flush()?;
        r.write_state_csv(create(out, state_file, files)?, &psi)?;
        d.insert(format!("fig5.{g}.tau_us"), r.tau);
        d.insert(format!("fig5.{g}.f1"), r.f1);
        d.insert(format!("fig5.{g}.state_fidelity"), r.state_fidelity(&psi)?);
        d.insert(format!("fig5.{g}.peak_leakage"), r.peak_leakage(&psi)?);
    }
    Ok(())
}

fn fig6(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let q = &s.two_qubit;
    let p = q.params();
    let sched = design_cphase(&p, q.gamma_g, q.frame)?;
    let opts = TwoQubitOptions {
        steps: s.steps,
        series_points: q.series_points,
    };
    let r = simulate_two_qubit(&p, &sched, &opts)?;
    r.write_series_csv(create(out, "fig6_series.csv", files)?, &reference_input())?;
    let cmp = compare_effective(&p.closed(), &sched, q.series_points.max(2), s.steps)?;
    cmp.write_csv(create(out, "fig6_effective.csv", files)?)?;
    let c = &r.calibration;
    let rows: Vec<(String, f64)> = vec![
        ("tau_us".into(), sched.tau()),
        ("phi_span".into(), sched.path.phi_span()),
        ("eta_rate".into(), sched.eta_rate),
        ("conditional_phase".into(), c.conditional_phase),
        ("frame_phase_q1".into(), c.phase_q1),
        ("frame_phase_q2".into(), c.phase_q2),
        ("survival_00".into(), c.survival[0]),
        ("survival_01".into(), c.survival[1]),
        ("survival_10".into(), c.survival[2]),
        ("survival_11".into(), c.survival[3]),
        ("gate_distance".into(), r.gate_distance),
        ("state_fidelity".into(), r.state_fidelity),
        ("f2_tensor".into(), r.f2_tensor),
        ("f2_interior".into(), r.f2_interior),
        ("effective_max_deviation".into(), cmp.max_deviation()),
    ];
    for (k, v) in &rows {
        d.insert(format!("fig6.{k}"), *v);
    }
    write_summary(create(out, "fig6_summary.csv", files)?, &rows)
}

fn synth(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let g = s.gate;
    let path = g.path(s.synth.tau)?;
    let c = synthesize_controls(&path)?;
    c.write_csv(create(out, &format!("synth_{g}_controls.csv"), files)?, s.synth.points)?;
    let (gb, xi, span) = g.params();
    let m = evolution_operator_simplified(gb, xi, span);
    let analytic = CMatrix::from_fn(2, 2, |r, k| m[(r, k)]);
    write_matrix_csv(create(out, &format!("synth_{g}_gate.csv"), files)?, &analytic)?;
    let numeric = propagator(&ControlHamiltonian(&c), path.tau(), s.steps)?;
    let rows: Vec<(String, f64)> = vec![
        ("tau_us".into(), path.tau()),
        ("theta".into(), path.theta()),
        ("omega_bar".into(), c.omega_bar()),
        ("max_drive".into(), c.max_drive()),
        ("distance_numeric".into(), gate_distance_up_to_phase(&numeric, &analytic)?),
        ("distance_target".into(), gate_distance_up_to_phase(&analytic, &g.target())?),
    ];
    for (k, v) in &rows {
        d.insert(format!("synth.{k}"), *v);
    }
    write_summary(create(out, &format!("synth_{g}_summary.csv"), files)?, &rows)
}

fn sweep_custom(s: &Settings, out: &Path, files: &mut Vec<PathBuf>, d: &mut Derived) -> Result<()> {
    let axes = custom_axes(s)?;
    let c = &s.custom;
    let coords: Vec<Vec<f64>> = axes.iter().map(|(_, a)| a.values()).collect();
    let mut jobs: Vec<Vec<f64>> = vec![vec![]];
    for vals in &coords {
        jobs = jobs
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    // validate the scheme/gate pair once before fanning out
    gate_controls(s.scheme, s.gate, 1.0)?;
    let values = jobs
        .into_par_iter()
        .map(|point| {
            let (mut kappa, mut err) = (c.kappa, ErrorSetting { delta_frac: c.delta, eps_frac: c.eps });
            for ((v, _), x) in axes.iter().zip(&point) {
                match v {
                    SweepVariable::Kappa => kappa = *x,
                    SweepVariable::Delta => err.delta_frac = *x,
                    SweepVariable::Eps => err.eps_frac = *x,
                }
            }
            single_qubit_f1(s.scheme, s.gate, kappa, err, s.steps)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = SweepGrid {
        axes: axes.into_iter().map(|(_, a)| a).collect(),
        values,
    };
    grid.write_csv(create(out, "sweep_custom.csv", files)?, "f1")?;
    d.insert("custom.f1_max".into(), grid.max());
    d.insert("custom.f1_min".into(), grid.values.iter().copied().fold(1.0, f64::min));
    Ok(())
}
