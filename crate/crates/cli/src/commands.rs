use nhwind::lattice::StateProfile;
use nhwind::{
    band_windings, berry_phase, localization_profile, loop_integral, loop_period, spectrum_scan,
    winding_lee, winding_number, winding_report, Band, BoundaryCondition, ChainSpectrum, Gauge,
    Result, ScanRow, SolveOptions, C64,
};
use serde_json::{json, Value};

use crate::config::{Command, ModelKind, RunConfig};
use crate::output::{complex, Artifact, Table};

pub fn run(cfg: &RunConfig) -> Result<Artifact> {
    match cfg.command {
        Command::Bands => bands(cfg),
        Command::Winding => winding(cfg),
        Command::BandWindings => band_windings_table(cfg),
        Command::Reductio => reductio(cfg),
        Command::Chain => chain(cfg),
        Command::Scan => scan(cfg),
        Command::Localize => localize(cfg),
    }
}

/// `quantity,re,im` rows for the commands whose natural output is a record.
fn quantity_table(rows: &[(&str, C64)]) -> Table {
    let mut t = Table::new(vec!["quantity", "re", "im"]);
    for (name, z) in rows {
        t.push(vec![(*name).into(), z.re.into(), z.im.into()]);
    }
    t
}

fn bands(cfg: &RunConfig) -> Result<Artifact> {
    let traj = loop_period(&cfg.model, Band::Plus, cfg.default_gauge(), cfg.grid)?;
    let mut table = Table::new(vec!["k", "re_e_tracked", "im_e_tracked", "re_e_other", "im_e_other", "branch"]);
    let mut samples = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let (k, e, o, b) = (traj.k_grid[i], traj.energies[i], traj.other_energies[i], traj.branches[i]);
        table.push(vec![k.into(), e.re.into(), e.im.into(), o.re.into(), o.im.into(), b.name().into()]);
        samples.push(json!({ "k": k, "tracked": complex(e), "other": complex(o), "branch": b.name() }));
    }
    let json = json!({
        "model": cfg.model.label,
        "gauge": traj.gauge.name(),
        "grid": cfg.grid,
        "period": traj.period.to_string(),
        "closure_mismatch": traj.closure_mismatch,
        "samples": samples,
    });
    Ok(Artifact { table, json })
}

fn winding(cfg: &RunConfig) -> Result<Artifact> {
    let rep = winding_report(&cfg.model, cfg.default_gauge(), cfg.grid, cfg.zone_factor, false)?;
    let table = quantity_table(&[
        ("period", C64::new(rep.period.length(), 0.0)),
        ("loop_integral", rep.loop_integral),
        ("gamma_b", rep.gamma_b),
        ("w", rep.w),
        ("zone_factor", C64::new(rep.zone_factor, 0.0)),
        ("w_lee", rep.w_lee),
    ]);
    let json = json!({
        "model": rep.model,
        "gauge": rep.gauge.name(),
        "grid": rep.grid_size,
        "period": rep.period.to_string(),
        "loop_integral": complex(rep.loop_integral),
        "gamma_b": complex(rep.gamma_b),
        "w": complex(rep.w),
        "zone_factor": rep.zone_factor,
        "w_lee": complex(rep.w_lee),
        "quantized": rep.is_quantized(1e-6),
    });
    Ok(Artifact { table, json })
}

fn band_windings_table(cfg: &RunConfig) -> Result<Artifact> {
    let gauges: Vec<Gauge> = match (cfg.gauge, cfg.model_kind) {
        (Some(g), _) => vec![g],
        // the demo Hamiltonian is not complex-symmetric
        (None, ModelKind::Demo) => vec![Gauge::FirstComponentOne, Gauge::SecondComponentOne],
        (None, ModelKind::Lee) => Gauge::ALL.to_vec(),
    };
    let mut table = Table::new(vec![
        "gauge", "re_w_plus", "im_w_plus", "re_w_minus", "im_w_minus", "re_sum", "im_sum",
    ]);
    let mut rows = Vec::new();
    for g in gauges {
        let bw = band_windings(&cfg.model, g, cfg.grid)?;
        let s = bw.sum();
        table.push(vec![
            g.name().into(),
            bw.w_plus.re.into(),
            bw.w_plus.im.into(),
            bw.w_minus.re.into(),
            bw.w_minus.im.into(),
            s.re.into(),
            s.im.into(),
        ]);
        rows.push(json!({
            "gauge": g.name(),
            "w_plus": complex(bw.w_plus),
            "w_minus": complex(bw.w_minus),
            "sum": complex(s),
        }));
    }
    let json = json!({ "model": cfg.model.label, "grid": cfg.grid, "gauges": rows });
    Ok(Artifact { table, json })
}

fn reductio(cfg: &RunConfig) -> Result<Artifact> {
    let traj = loop_period(&cfg.model, Band::Plus, cfg.default_gauge(), cfg.grid)?;
    let raw = loop_integral(&traj);
    let w_eq2 = winding_number(berry_phase(&traj));
    let w_lee = winding_lee(&traj, cfg.zone_factor)?;
    let table = quantity_table(&[
        ("period", C64::new(traj.period.length(), 0.0)),
        ("loop_integral", raw),
        ("w_eq2", w_eq2),
        ("A", C64::new(cfg.zone_factor, 0.0)),
        ("w_lee", w_lee),
    ]);
    let json = json!({
        "model": cfg.model.label,
        "gauge": traj.gauge.name(),
        "grid": cfg.grid,
        "period": traj.period.to_string(),
        "loop_integral": complex(raw),
        "w_eq2": complex(w_eq2),
        "A": cfg.zone_factor,
        "w_lee": complex(w_lee),
    });
    Ok(Artifact { table, json })
}

fn solve_with_left(cfg: &RunConfig) -> Result<ChainSpectrum> {
    let opts = SolveOptions { left: true, defectiveness: true };
    ChainSpectrum::solve(&cfg.model, cfg.n_cells, cfg.bc, opts)
}

fn chain(cfg: &RunConfig) -> Result<Artifact> {
    let s = solve_with_left(cfg)?;
    let left = s.left_iprs.as_ref().expect("left vectors requested");
    let mut table = Table::new(vec![
        "index", "re_e", "im_e", "ipr_right", "ipr_left", "class_right", "class_left", "edge_mode",
    ]);
    let dim = s.dim();
    let class = |p: f64| nhwind::Localization::classify(p, dim).name();
    let mut states = Vec::with_capacity(dim);
    for (j, &e) in s.eigenvalues.iter().enumerate() {
        let edge = s.gap.edge_modes.contains(&j);
        table.push(vec![
            j.into(),
            e.re.into(),
            e.im.into(),
            s.iprs[j].into(),
            left[j].into(),
            class(s.iprs[j]).into(),
            class(left[j]).into(),
            usize::from(edge).into(),
        ]);
        states.push(json!({
            "eigenvalue": complex(e),
            "ipr_right": s.iprs[j],
            "ipr_left": left[j],
            "edge_mode": edge,
        }));
    }
    let json = json!({
        "model": cfg.model.label,
        "n_cells": s.n_cells,
        "bc": s.bc.name(),
        "max_abs_imag": s.max_abs_imag,
        "gap": s.gap.value,
        "midgap_threshold": s.gap.midgap_threshold,
        "edge_modes": s.gap.edge_modes,
        "median_ipr_right": s.median_ipr(),
        "median_ipr_left": s.median_left_ipr(),
        "defectiveness": s.defectiveness,
        "max_residual": s.max_residual,
        "balancing": {
            "sweeps": s.balancing.sweeps,
            "condition": s.balancing.condition(),
            "identity": s.balancing.is_identity(),
        },
        "states": states,
    });
    Ok(Artifact { table, json })
}

fn scan(cfg: &RunConfig) -> Result<Artifact> {
    let open = spectrum_scan(&cfg.model, &cfg.n_list, BoundaryCondition::Open)?;
    let periodic = spectrum_scan(&cfg.model, &cfg.n_list, BoundaryCondition::Periodic)?;
    let mut table = Table::new(vec!["N", "max_abs_imag", "gap", "median_ipr_open", "median_ipr_periodic"]);
    let mut rows = Vec::new();
    for (o, p) in open.iter().zip(&periodic) {
        table.push(vec![
            o.n_cells.into(),
            o.max_abs_imag.into(),
            o.gap.into(),
            o.median_ipr.into(),
            p.median_ipr.into(),
        ]);
        rows.push(scan_json(o, p));
    }
    let json = json!({ "model": cfg.model.label, "rows": rows });
    Ok(Artifact { table, json })
}

fn scan_json(o: &ScanRow, p: &ScanRow) -> Value {
    json!({
        "N": o.n_cells,
        "max_abs_imag": o.max_abs_imag,
        "gap": o.gap,
        "edge_modes": o.edge_modes,
        "median_ipr_open": o.median_ipr,
        "median_ipr_periodic": p.median_ipr,
        "max_abs_imag_periodic": p.max_abs_imag,
        "eigenvalues_open": o.eigenvalues.iter().copied().map(complex).collect::<Vec<_>>(),
    })
}

fn localize(cfg: &RunConfig) -> Result<Artifact> {
    let s = solve_with_left(cfg)?;
    let (right, left) = localization_profile(&s);
    let left = left.expect("left vectors requested");
    let mut table = Table::new(vec!["vector", "state", "re_e", "im_e", "ipr", "class", "site", "density"]);
    for (kind, profiles) in [("right", &right), ("left", &left)] {
        for (j, p) in profiles.iter().enumerate() {
            for (site, &d) in p.density.iter().enumerate() {
                table.push(vec![
                    kind.into(),
                    j.into(),
                    p.eigenvalue.re.into(),
                    p.eigenvalue.im.into(),
                    p.ipr.into(),
                    p.class.name().into(),
                    site.into(),
                    d.into(),
                ]);
            }
        }
    }
    let json = json!({
        "model": cfg.model.label,
        "n_cells": s.n_cells,
        "bc": s.bc.name(),
        "right": right.iter().map(profile_json).collect::<Vec<_>>(),
        "left": left.iter().map(profile_json).collect::<Vec<_>>(),
    });
    Ok(Artifact { table, json })
}

fn profile_json(p: &StateProfile) -> Value {
    json!({
        "eigenvalue": complex(p.eigenvalue),
        "ipr": p.ipr,
        "class": p.class.name(),
        "density": p.density,
    })
}
