//! Job orchestration: runs the selected analyses, collects plot-ready
//! tables and a pass/fail summary, deterministically for a fixed seed.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cornerspec::analysis::{
    classify_spectrum, default_classification_tolerance, detect_resonances, holomorphy_check,
    ichinose_sumcheck, predict_essential, sector_search, RayFamily,
    SpectrumClassification,
};
use cornerspec::assembly::{
    assemble_channel_mode, assemble_corner_mode, assemble_cyl_mode, ModeOperator,
};
use cornerspec::continuation::{
    continuation_scan, make_analytic_vector, matrix_element, AnalyticVector, ModeComponent,
    PointFlag, DISTANCE_FLOOR,
};
use cornerspec::geometry::{make_grid, BoundaryCondition, HalfLineGrid, PotentialProfile};
use cornerspec::linalg::{eig_dense, eigvals_dense, numerical_range_boundary};
use cornerspec::scaling::{bump, DilationParameter};
use cornerspec::weyl::{
    build_bws, commutator_decay, defect_norm, escape_center, log_log_slope, BwsTarget,
    SingularSequenceSpec,
};
use cornerspec::Error;

use crate::config::{AnalysisKind, Job, ModelKind};

/// Fixed slope grid for the sector searches.
const SECTOR_K_GRID: [f64; 15] = [
    0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0,
];

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisSummary {
    pub name: String,
    pub status: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub seed: u64,
    pub pass: bool,
    pub analyses: Vec<AnalysisSummary>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    /// Output files as (name, contents), already in emit order.
    pub files: Vec<(String, String)>,
    pub summary: Summary,
}

/// 17-significant-digit float formatting for the CSV outputs.
fn ff(x: f64) -> String {
    format!("{:.16e}", x)
}

fn classify_block(
    eigs: &[Complex64],
    rays: &RayFamily<f64>,
    job: &Job,
    h: f64,
    mu_max: f64,
) -> SpectrumClassification<f64> {
    let tol = job
        .tolerances
        .classification
        .unwrap_or_else(|| default_classification_tolerance(h, mu_max));
    classify_spectrum(eigs, rays, tol)
}

struct SpectrumRows {
    csv: String,
    pass: bool,
    worst: f64,
}

fn push_rows(
    csv: &mut String,
    theta: &DilationParameter<f64>,
    mode: usize,
    class: &SpectrumClassification<f64>,
    rays: &RayFamily<f64>,
) {
    let t = theta.theta();
    for (tag, list) in [("ray", &class.ray_bound), ("discrete", &class.discrete)] {
        for e in list {
            let origin = rays.origins[e.ray];
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                ff(t.re),
                ff(t.im),
                mode,
                ff(e.value.re),
                ff(e.value.im),
                tag,
                ff(origin.re),
                ff(origin.im),
                ff(e.t),
                ff(e.distance)
            ));
        }
    }
}

/// Discrete eigenvalues of a 1D end block, used as corner ray origins.
fn end_block_discrete(
    job: &Job,
    theta: &DilationParameter<f64>,
    mu: f64,
    grid: &HalfLineGrid<f64>,
    v: &PotentialProfile<f64>,
) -> Result<Vec<Complex64>, Error> {
    let op = assemble_cyl_mode(&job.profile, theta, mu, grid, v)?;
    let eigs = eigvals_dense(&op.to_dense()?)?;
    let rays = predict_essential(
        theta,
        &cornerspec::geometry::CrossSectionSpectrum::new(vec![(mu, format!("mu={mu}"))]).unwrap(),
        &[],
    );
    let class = classify_block(&eigs, &rays, job, grid.spacing(), mu);
    Ok(class.discrete_values())
}

fn spectrum_rows(job: &Job) -> Result<SpectrumRows, Error> {
    let mut csv = String::from(
        "theta_re,theta_im,mode,lambda_re,lambda_im,class,ray_origin_re,ray_origin_im,t,distance\n",
    );
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mu_max = job.cross_section.thresholds().last().copied().unwrap_or(0.0);
    for theta in &job.thetas {
        match job.kind {
            ModelKind::Cylinder => {
                let full_rays = predict_essential(theta, &job.cross_section, &[]);
                let mut cache: Vec<(f64, Vec<Complex64>)> = Vec::new();
                for (mode, (mu, _)) in job.cross_section.iter().enumerate() {
                    let eigs = match cache.iter().find(|(m, _)| *m == mu) {
                        Some((_, e)) => e.clone(),
                        None => {
                            let op = assemble_cyl_mode(
                                &job.profile,
                                theta,
                                mu,
                                &job.grid,
                                &job.end_potential,
                            )?;
                            let e = eigvals_dense(&op.to_dense()?)?;
                            cache.push((mu, e.clone()));
                            e
                        }
                    };
                    let class = classify_block(&eigs, &full_rays, job, job.grid.spacing(), mu_max);
                    // ray proximity of the smallest-modulus eigenvalues
                    let mut by_modulus = eigs.clone();
                    by_modulus.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
                    for z in by_modulus.iter().take(job.tolerances.ray_top) {
                        let (_, d) = full_rays.nearest(*z);
                        worst = worst.max(d);
                        if d > job.tolerances.ray_distance {
                            pass = false;
                        }
                    }
                    push_rows(&mut csv, theta, mode, &class, &full_rays);
                }
            }
            ModelKind::Corner => {
                let model = job.corner.as_ref().expect("corner model");
                for (mode, (mu, _)) in job.cross_section.iter().enumerate() {
                    let end1 = end_block_discrete(job, theta, mu, &model.grid1, &model.end_potential1)?;
                    let end2 = end_block_discrete(job, theta, mu, &model.grid2, &model.end_potential2)?;
                    let rays = predict_essential(
                        theta,
                        &cornerspec::geometry::CrossSectionSpectrum::new(vec![(
                            mu,
                            format!("mu={mu}"),
                        )])
                        .unwrap(),
                        &[end1, end2],
                    );
                    let op = assemble_corner_mode(&job.profile, theta, mu, model)?;
                    let eigs = eigvals_dense(&op.to_dense()?)?;
                    let h = model.grid1.spacing().max(model.grid2.spacing());
                    let class = classify_block(&eigs, &rays, job, h, mu_max);
                    let mut by_modulus = eigs.clone();
                    by_modulus.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
                    for z in by_modulus.iter().take(job.tolerances.ray_top) {
                        let (_, d) = rays.nearest(*z);
                        worst = worst.max(d);
                        if d > job.tolerances.ray_distance {
                            pass = false;
                        }
                    }
                    push_rows(&mut csv, theta, mode, &class, &rays);
                }
            }
        }
    }
    Ok(SpectrumRows { csv, pass, worst })
}

#[derive(Serialize)]
struct ResonanceRecord {
    mode: usize,
    value: [f64; 2],
    separation: f64,
    drift: f64,
    is_real: bool,
}

fn resonances_analysis(job: &Job) -> Result<(String, bool, String), Error> {
    if job.kind != ModelKind::Cylinder {
        return Err(Error::InvalidGrid {
            reason: "resonance detection runs on cylinder models".into(),
        });
    }
    if job.thetas.len() < 2 {
        return Err(Error::InvalidGrid {
            reason: "resonance detection needs two thetas".into(),
        });
    }
    let (ta, tb) = (&job.thetas[0], &job.thetas[1]);
    let doubled = make_grid(
        2.0 * job.grid.u_max(),
        2 * job.grid.len() + 1,
        job.grid.bc0(),
    )?;
    let mut records = Vec::new();
    let mut seen = Vec::new();
    for (mode, (mu, _)) in job.cross_section.iter().enumerate() {
        if seen.contains(&mu.to_bits()) {
            continue;
        }
        seen.push(mu.to_bits());
        let eig =
            |theta: &DilationParameter<f64>, grid: &HalfLineGrid<f64>| -> Result<Vec<Complex64>, Error> {
                let op = assemble_cyl_mode(&job.profile, theta, mu, grid, &job.end_potential)?;
                eigvals_dense(&op.to_dense()?)
            };
        let ea = eig(ta, &job.grid)?;
        let eb = eig(tb, &job.grid)?;
        let rays_a = predict_essential(ta, &job.cross_section, &[]);
        let rays_b = predict_essential(tb, &job.cross_section, &[]);
        let tol = job
            .tolerances
            .classification
            .unwrap_or_else(|| default_classification_tolerance(job.grid.spacing(), mu));
        let matches = detect_resonances(
            &ea,
            ta,
            &eb,
            tb,
            &rays_a,
            &rays_b,
            tol,
            job.tolerances.match_tol,
        )?;
        if matches.is_empty() {
            continue;
        }
        // truncation control: same h, doubled domain
        let ed = eig(ta, &doubled)?;
        let class_d = classify_spectrum(&ed, &rays_a, tol);
        for m in matches {
            let drift = class_d
                .discrete
                .iter()
                .map(|c| (c.value - m.value).norm())
                .fold(f64::INFINITY, f64::min);
            records.push(ResonanceRecord {
                mode,
                value: [m.value.re, m.value.im],
                separation: m.separation,
                drift,
                is_real: m.is_real,
            });
        }
    }
    let pass = !records.is_empty()
        && records
            .iter()
            .all(|r| r.separation <= job.tolerances.match_tol && r.drift <= job.tolerances.match_tol);
    let detail = format!(
        "{} matched discrete eigenvalue(s); worst separation {:.3e}, worst drift {:.3e}",
        records.len(),
        records.iter().map(|r| r.separation).fold(0.0, f64::max),
        records.iter().map(|r| r.drift).fold(0.0, f64::max),
    );
    let json = serde_json::to_string_pretty(&records).expect("serialize resonances");
    Ok((json, pass, detail))
}

fn numrange_analysis(job: &Job) -> Result<(String, bool, String), Error> {
    let mut csv = String::from("theta_re,theta_im,point_re,point_im\n");
    let mut pass = true;
    let mut details = Vec::new();
    let mu0 = job.cross_section.thresholds()[0];
    for theta in &job.thetas {
        let op = assemble_cyl_mode(&job.profile, theta, mu0, &job.grid, &job.end_potential)?;
        let dense = op.to_dense()?;
        let n = dense.nrows();
        // quadratic-form samples on seeded random unit vectors
        let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
        let mut samples = Vec::with_capacity(500);
        for _ in 0..500 {
            let f: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let af = op.apply(&f)?;
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (a, b) in af.iter().zip(&f) {
                num += a * b.conj();
                den += b.norm_sqr();
            }
            samples.push(num / den);
        }
        let boundary = numerical_range_boundary(&dense, 64)?;
        samples.extend(boundary.iter().copied());
        for p in &boundary {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                ff(theta.theta().re),
                ff(theta.theta().im),
                ff(p.re),
                ff(p.im)
            ));
        }
        let sector = sector_search(&samples, &SECTOR_K_GRID);
        match sector {
            None => {
                pass = false;
                details.push(format!("theta {}: no sector found", theta.theta()));
            }
            Some(s) => {
                let mut inside = true;
                let half_angle = (1.0 / s.k).atan() + 1e-6;
                for p in &boundary {
                    let shifted = p + Complex64::new(s.gamma, 0.0);
                    if shifted.arg().abs() > half_angle && shifted.norm() > 1e-12 {
                        inside = false;
                    }
                }
                if s.k < job.tolerances.sector_k_min || !inside {
                    pass = false;
                }
                details.push(format!(
                    "theta {}: gamma {:.6e}, k {}, polygon inside sector: {}",
                    theta.theta(),
                    s.gamma,
                    s.k,
                    inside
                ));
            }
        }
    }
    Ok((csv, pass, details.join("; ")))
}

fn weyl_grid(n: usize, h: f64, bc: BoundaryCondition) -> Result<HalfLineGrid<f64>, Error> {
    let u_max = escape_center::<f64>(n) + n as f64 + 8.0;
    let pts = (u_max / h).round() as usize - 1;
    make_grid(u_max, pts, bc)
}

fn weyl_analysis(job: &Job) -> Result<(String, bool, String), Error> {
    let theta = job.thetas[0];
    let tp = theta.theta_prime();
    let mu0 = job.cross_section.thresholds()[0];
    let mut csv = String::from("kind,index,value,slope\n");
    let mut slopes = Vec::new();
    let indices = [4usize, 8, 16, 32];
    let mut on_ray_ok = true;

    // free kind
    let mut pts = Vec::new();
    for &n in &indices {
        let grid = weyl_grid(n, 0.5, BoundaryCondition::Dirichlet)?;
        let op = assemble_cyl_mode(&job.profile, &theta, mu0, &grid, &PotentialProfile::zero())?;
        let lambda = Complex64::new(mu0, 0.0) + tp;
        let rays = predict_essential(&theta, &job.cross_section, &[]);
        on_ray_ok &= rays.nearest(lambda).1
            <= default_classification_tolerance(grid.spacing(), mu0).max(1e-9);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: mu0 },
            index: n,
            lambda,
            theta,
        };
        let g = build_bws(&spec, &op)?;
        pts.push((n, defect_norm(&g, lambda, &op)?));
    }
    let slope_free = log_log_slope(&pts);
    for (n, v) in &pts {
        csv.push_str(&format!("free,{},{},{}\n", n, ff(*v), ff(slope_free)));
    }
    slopes.push(("free", slope_free));

    // corner kind: free Kronecker sum on matching grids
    let mut pts = Vec::new();
    for &n in &indices {
        let grid = weyl_grid(n, 0.5, BoundaryCondition::Dirichlet)?;
        let model = cornerspec::geometry::CornerModel {
            cross_section: job.cross_section.clone(),
            grid1: grid,
            grid2: grid,
            end_potential1: PotentialProfile::zero(),
            end_potential2: PotentialProfile::zero(),
            corner_potential: None,
        };
        let op = assemble_corner_mode(&job.profile, &theta, mu0, &model)?;
        let lambda = Complex64::new(mu0, 0.0) + tp;
        let spec = SingularSequenceSpec {
            target: BwsTarget::Corner { mu: mu0 },
            index: n,
            lambda,
            theta,
        };
        let g = build_bws(&spec, &op)?;
        pts.push((n, defect_norm(&g, lambda, &op)?));
    }
    let slope_corner = log_log_slope(&pts);
    for (n, v) in &pts {
        csv.push_str(&format!("corner,{},{},{}\n", n, ff(*v), ff(slope_corner)));
    }
    slopes.push(("corner", slope_corner));

    // channel kind: needs an end bound state
    let mut channel_note = String::new();
    if job.end_potential.is_zero() {
        channel_note = "; channel skipped (no end potential)".into();
    } else {
        let end_grid = make_grid(14.0, 120, BoundaryCondition::Neumann)?;
        let end_op = assemble_cyl_mode(&job.profile, &theta, mu0, &end_grid, &job.end_potential)?;
        let eig = eig_dense(&end_op.to_dense()?)?;
        let idx = (0..eig.eigenvalues.len())
            .min_by(|&a, &b| {
                eig.eigenvalues[a]
                    .re
                    .partial_cmp(&eig.eigenvalues[b].re)
                    .unwrap()
            })
            .expect("nonempty spectrum");
        let gamma = eig.eigenvalues[idx];
        let w: Vec<Complex64> = (0..end_grid.len()).map(|i| eig.eigenvectors[[i, idx]]).collect();
        let mut pts = Vec::new();
        for &n in &indices {
            let free_grid = weyl_grid(n, 0.5, BoundaryCondition::Dirichlet)?;
            let op = assemble_channel_mode(
                &job.profile,
                &theta,
                mu0,
                &free_grid,
                &end_grid,
                &job.end_potential,
            )?;
            let lambda = gamma + tp;
            let spec = SingularSequenceSpec {
                target: BwsTarget::Channel {
                    gamma,
                    end_vector: w.clone(),
                },
                index: n,
                lambda,
                theta,
            };
            let g = build_bws(&spec, &op)?;
            pts.push((n, defect_norm(&g, lambda, &op)?));
        }
        let slope_channel = log_log_slope(&pts);
        for (n, v) in &pts {
            csv.push_str(&format!("channel,{},{},{}\n", n, ff(*v), ff(slope_channel)));
        }
        slopes.push(("channel", slope_channel));
    }

    // commutator smallness on the corner block
    let mut ops = Vec::new();
    for d in [8usize, 16, 32, 64] {
        let u_max = 2.0 * d as f64 + 16.0;
        let n = (u_max / 0.25).round() as usize - 1;
        let grid = make_grid(u_max, n, BoundaryCondition::Dirichlet)?;
        let model = cornerspec::geometry::CornerModel {
            cross_section: job.cross_section.clone(),
            grid1: grid,
            grid2: grid,
            end_potential1: PotentialProfile::zero(),
            end_potential2: PotentialProfile::zero(),
            corner_potential: None,
        };
        ops.push((d, assemble_corner_mode(&job.profile, &theta, mu0, &model)?));
    }
    let eps = commutator_decay(&ops)?;
    let slope_comm = log_log_slope(&eps);
    for (d, v) in &eps {
        csv.push_str(&format!("commutator,{},{},{}\n", d, ff(*v), ff(slope_comm)));
    }
    slopes.push(("commutator", slope_comm));

    let pass = slopes.iter().all(|(_, s)| *s <= job.tolerances.slope_max) && on_ray_ok;
    let detail = slopes
        .iter()
        .map(|(k, s)| format!("{k} slope {s:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
        + &channel_note;
    Ok((csv, pass, detail))
}

fn resolvent_vectors(
    job: &Job,
    grid: &HalfLineGrid<f64>,
    modes: &[f64],
) -> Result<(AnalyticVector<f64>, AnalyticVector<f64>), Error> {
    let interior = |c: f64, w: f64| -> Vec<Complex64> {
        grid.nodes()
            .map(|u| Complex64::new(bump((u - c) / w), 0.0))
            .collect()
    };
    let mut f_comp = Vec::new();
    let mut g_comp = Vec::new();
    for (i, _) in modes.iter().enumerate() {
        let damp = 1.0 / (1.0 + i as f64);
        f_comp.push(ModeComponent {
            interior: interior(0.5, 0.45).iter().map(|z| z * damp).collect(),
            tail: vec![Complex64::new(damp, 0.0)],
        });
        g_comp.push(ModeComponent {
            interior: interior(0.55, 0.42).iter().map(|z| z * (0.5 + damp)).collect(),
            tail: vec![Complex64::new(0.0, 0.0), Complex64::new(damp, 0.0)],
        });
    }
    Ok((
        make_analytic_vector(&job.profile, grid, f_comp)?,
        make_analytic_vector(&job.profile, grid, g_comp)?,
    ))
}

fn mode_ops(
    job: &Job,
    theta: &DilationParameter<f64>,
    grid: &HalfLineGrid<f64>,
    modes: &[f64],
) -> Result<Vec<ModeOperator<f64>>, Error> {
    modes
        .iter()
        .map(|&mu| assemble_cyl_mode(&job.profile, theta, mu, grid, &job.end_potential))
        .collect()
}

fn resolvent_analysis(job: &Job) -> Result<(String, bool, String), Error> {
    if job.kind != ModelKind::Cylinder {
        return Err(Error::InvalidGrid {
            reason: "resolvent continuation runs on cylinder models".into(),
        });
    }
    let mut modes: Vec<f64> = Vec::new();
    for (mu, _) in job.cross_section.iter() {
        if !modes.contains(&mu) {
            modes.push(mu);
        }
        if modes.len() == 2 {
            break;
        }
    }
    let fine = make_grid(40.0, 32000, BoundaryCondition::Dirichlet)?;
    let (f, g) = resolvent_vectors(job, &fine, &modes)?;
    let mut pass = true;
    let mut details = Vec::new();

    // unitarity identity on the physical half-plane at real theta
    let lambda = Complex64::new(-1.0, 0.0);
    let zero = DilationParameter::real(0.0)?;
    let ops0 = mode_ops(job, &zero, &fine, &modes)?;
    let base = matrix_element(lambda, &zero, &f, &g, &ops0, DISTANCE_FLOOR)?;
    let mut worst_unitary: f64 = 0.0;
    for th in [0.3, 0.5] {
        let param = DilationParameter::real(th)?;
        let ops = mode_ops(job, &param, &fine, &modes)?;
        let v = matrix_element(lambda, &param, &f, &g, &ops, DISTANCE_FLOOR)?;
        worst_unitary = worst_unitary.max((v - base).norm() / base.norm());
    }
    if worst_unitary > job.tolerances.theta_agreement {
        pass = false;
    }
    details.push(format!("unitarity gap {worst_unitary:.3e}"));

    // two-rotation agreement on the physical half-plane
    let (ta, tb) = if job.thetas.len() >= 2 && !job.thetas[0].is_unitary() && !job.thetas[1].is_unitary()
    {
        (job.thetas[0], job.thetas[1])
    } else {
        (
            DilationParameter::new(Complex64::new(0.4, 0.2))?,
            DilationParameter::new(Complex64::new(0.45, 0.1))?,
        )
    };
    let mut worst_rotation: f64 = 0.0;
    for lambda in [Complex64::new(-1.0, 0.0), Complex64::new(-2.5, 0.4)] {
        let ops_a = mode_ops(job, &ta, &fine, &modes)?;
        let ops_b = mode_ops(job, &tb, &fine, &modes)?;
        let va = matrix_element(lambda, &ta, &f, &g, &ops_a, DISTANCE_FLOOR)?;
        let vb = matrix_element(lambda, &tb, &f, &g, &ops_b, DISTANCE_FLOOR)?;
        worst_rotation = worst_rotation.max((va - vb).norm() / va.norm());
    }
    if worst_rotation > job.tolerances.theta_agreement {
        pass = false;
    }
    details.push(format!("rotation gap {worst_rotation:.3e}"));

    // continuation across the first spectral gap of the real axis
    let mu1 = modes.get(1).copied().unwrap_or(1.0).max(1.0);
    let scan_grid = make_grid(20.0, 800, BoundaryCondition::Dirichlet)?;
    let (fs, gs) = resolvent_vectors(job, &scan_grid, &modes)?;
    let path: Vec<Complex64> = (0..29)
        .map(|i| Complex64::new(mu1 * (0.15 + 0.7 * i as f64 / 28.0), 0.0))
        .collect();
    let ops_scan = mode_ops(job, &ta, &scan_grid, &modes)?;
    let trace = continuation_scan(&path, &ta, &fs, &gs, &ops_scan, DISTANCE_FLOOR)?;
    let clean = trace.flags.iter().filter(|f| **f == PointFlag::Ok).count();
    if clean < path.len() || !trace.pole_candidates.is_empty() {
        pass = false;
    }
    details.push(format!(
        "crossing scan: {}/{} clean points, smoothness {:.3e}",
        clean,
        path.len(),
        trace.smoothness
    ));
    // the undilated trace is undefined on the same segment
    let ops_zero = mode_ops(job, &zero, &scan_grid, &modes)?;
    let trace0 = continuation_scan(&path, &zero, &fs, &gs, &ops_zero, DISTANCE_FLOOR)?;
    let blocked = trace0
        .flags
        .iter()
        .filter(|f| **f != PointFlag::Ok)
        .count();
    if blocked == 0 {
        pass = false;
    }
    details.push(format!("undilated scan blocked at {blocked} points"));

    // holomorphy of the matrix element in lambda off the spectrum
    let center = Complex64::new(0.5 * mu1, 0.4 * mu1);
    let ops_a = mode_ops(job, &ta, &scan_grid, &modes)?;
    let mut hol_err: Option<Error> = None;
    let residual = holomorphy_check(
        |z| match matrix_element(z, &ta, &fs, &gs, &ops_a, DISTANCE_FLOOR) {
            Ok(v) => v,
            Err(e) => {
                hol_err = Some(e);
                Complex64::new(0.0, 0.0)
            }
        },
        center,
        0.05 * mu1,
        24,
    )?;
    if let Some(e) = hol_err {
        return Err(e);
    }
    if residual > job.tolerances.holomorphy {
        pass = false;
    }
    details.push(format!("lambda-holomorphy residual {residual:.3e}"));

    let mut csv = String::from("lambda_re,lambda_im,value_re,value_im,flag\n");
    for i in 0..trace.lambdas.len() {
        let flag = match trace.flags[i] {
            PointFlag::Ok => "ok",
            PointFlag::NearSpectrum => "near_spectrum",
            PointFlag::SolveRefused => "refused",
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            ff(trace.lambdas[i].re),
            ff(trace.lambdas[i].im),
            ff(trace.values[i].re),
            ff(trace.values[i].im),
            flag
        ));
    }
    Ok((csv, pass, details.join("; ")))
}

#[derive(Serialize)]
struct IchinoseCase {
    case: String,
    max_mismatch: f64,
    refused: usize,
}

fn ichinose_analysis(job: &Job) -> Result<(String, bool, String), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
    let mut cases = Vec::new();
    let mut pass = true;
    for trial in 0..20 {
        let mut mk = |n: usize| {
            ndarray::Array2::from_shape_fn((n, n), |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        };
        let a = mk(3);
        let b = mk(3);
        let s = ichinose_sumcheck(&a, &b)?;
        if s.max_mismatch > job.tolerances.ichinose_random || s.refused > 0 {
            pass = false;
        }
        cases.push(IchinoseCase {
            case: format!("random3x3-{trial}"),
            max_mismatch: s.max_mismatch,
            refused: s.refused,
        });
    }
    // dilated half-line blocks
    let theta = job.thetas[0];
    let grid = make_grid(8.0, 40, BoundaryCondition::Dirichlet)?;
    let mus = job.cross_section.thresholds();
    let mu_b = mus.iter().copied().find(|m| *m != mus[0]).unwrap_or(mus[0]);
    let a = assemble_cyl_mode(&job.profile, &theta, mus[0], &grid, &job.end_potential)?;
    let b = assemble_cyl_mode(&job.profile, &theta, mu_b, &grid, &PotentialProfile::zero())?;
    let s = ichinose_sumcheck(&a.to_dense()?, &b.to_dense()?)?;
    if s.max_mismatch > job.tolerances.ichinose_blocks || s.refused > 0 {
        pass = false;
    }
    cases.push(IchinoseCase {
        case: "dilated-blocks-n40".into(),
        max_mismatch: s.max_mismatch,
        refused: s.refused,
    });
    let worst = cases.iter().map(|c| c.max_mismatch).fold(0.0, f64::max);
    let json = serde_json::to_string_pretty(&cases).expect("serialize ichinose");
    Ok((json, pass, format!("worst mismatch {worst:.3e} over {} cases", cases.len())))
}

/// Run the selected analyses; failures in one analysis do not abort the
/// others.
pub fn run_job(job: &Job, analyses: &[AnalysisKind]) -> RunReport {
    let mut files: Vec<(String, String)> = Vec::new();
    let mut summaries = Vec::new();
    for kind in analyses {
        let outcome: Result<(Option<(String, String)>, bool, String), Error> = match kind {
            AnalysisKind::Spectrum => spectrum_rows(job).map(|r| {
                (
                    Some(("spectrum.csv".to_string(), r.csv)),
                    r.pass,
                    format!("worst top-ray distance {:.3e}", r.worst),
                )
            }),
            AnalysisKind::Resonances => resonances_analysis(job)
                .map(|(json, pass, detail)| (Some(("resonances.json".to_string(), json)), pass, detail)),
            AnalysisKind::Numrange => numrange_analysis(job)
                .map(|(csv, pass, detail)| (Some(("numrange.csv".to_string(), csv)), pass, detail)),
            AnalysisKind::Weyl => weyl_analysis(job)
                .map(|(csv, pass, detail)| (Some(("weyl.csv".to_string(), csv)), pass, detail)),
            AnalysisKind::Resolvent => resolvent_analysis(job)
                .map(|(csv, pass, detail)| (Some(("resolvent.csv".to_string(), csv)), pass, detail)),
            AnalysisKind::Ichinose => ichinose_analysis(job)
                .map(|(json, pass, detail)| (Some(("ichinose.json".to_string(), json)), pass, detail)),
        };
        match outcome {
            Ok((file, pass, detail)) => {
                if let Some(f) = file {
                    files.push(f);
                }
                summaries.push(AnalysisSummary {
                    name: kind.name().to_string(),
                    status: if pass { "pass" } else { "fail" }.to_string(),
                    pass,
                    detail,
                });
            }
            Err(e) => summaries.push(AnalysisSummary {
                name: kind.name().to_string(),
                status: "error".to_string(),
                pass: false,
                detail: e.to_string(),
            }),
        }
    }
    let pass = summaries.iter().all(|s| s.pass);
    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        seed: job.seed,
        pass,
        analyses: summaries,
    };
    files.push((
        "summary.json".to_string(),
        serde_json::to_string_pretty(&summary).expect("serialize summary"),
    ));
    files.sort_by(|a, b| a.0.cmp(&b.0));
    RunReport { files, summary }
}

/// Write the report files; byte-stable under re-export.
pub fn export_report(report: &RunReport, dir: &std::path::Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}
