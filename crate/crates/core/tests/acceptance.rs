//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with the measured quantities (visible under `--nocapture`, and on
//! any failure).

use ndarray::Array2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cornerspec::analysis::{
    classify_spectrum, default_classification_tolerance, detect_resonances, holomorphy_check,
    ichinose_sumcheck, predict_essential, sector_search, RayProvenance,
};
use cornerspec::assembly::{
    assemble_channel_mode, assemble_corner_mode, assemble_cyl_mode, conjugation_residual,
    ModeOperator,
};
use cornerspec::continuation::{
    continuation_scan, make_analytic_vector, matrix_element, AnalyticVector, ModeComponent,
    PointFlag, DISTANCE_FLOOR,
};
use cornerspec::geometry::{
    circle_cross_section, gaussian_well, make_grid, well_with_barrier, BoundaryCondition,
    CornerModel, CrossSectionSpectrum, HalfLineGrid, PotentialProfile,
};
use cornerspec::linalg::{eig_dense, eigh_dense, eigvals_dense, numerical_range_boundary};
use cornerspec::scaling::{bump, CutoffProfile, DilationParameter};
use cornerspec::weyl::{
    build_bws, commutator_decay, defect_norm, escape_center, log_log_slope, BwsTarget,
    SingularSequenceSpec,
};

fn profile() -> CutoffProfile<f64> {
    CutoffProfile::default()
}

fn theta_a() -> DilationParameter<f64> {
    DilationParameter::new(Complex64::new(0.4, 0.2)).unwrap()
}

fn theta_b() -> DilationParameter<f64> {
    DilationParameter::new(Complex64::new(0.45, 0.1)).unwrap()
}

fn verdict(criterion: usize, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({name}): {tag} — {detail}");
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_coefficient_reduction() {
    let pr = profile();
    let grid = make_grid(12.0, 120, BoundaryCondition::Dirichlet).unwrap();
    let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
    let mu = 1.0;
    let h = grid.spacing();
    let mut pass = true;
    for theta in [theta_a(), DilationParameter::real(0.3).unwrap()] {
        let op = assemble_cyl_mode(&pr, &theta, mu, &grid, &v).unwrap();
        let dense = op.to_dense().unwrap();
        let tp = theta.theta_prime();
        for j in 0..grid.len() {
            let u = grid.node(j);
            if u <= pr.inner_radius() {
                // undilated stencil rows, bitwise
                let expect = Complex64::new(2.0 / (h * h) + mu + v.eval(u), 0.0);
                pass &= dense[[j, j]] == expect;
                if j > 0 {
                    pass &= dense[[j, j - 1]] == Complex64::new(-1.0 / (h * h), 0.0);
                }
            }
            if u >= pr.outer_radius() {
                let expect = tp * Complex64::new(2.0 / (h * h), 0.0) + mu + v.eval(u);
                pass &= dense[[j, j]] == expect;
                pass &= dense[[j, j - 1]] == -tp / Complex64::new(h * h, 0.0);
                if j + 1 < grid.len() {
                    pass &= dense[[j, j + 1]] == -tp / Complex64::new(h * h, 0.0);
                }
            }
        }
    }
    verdict(1, "coefficient reduction", pass, "all rows outside the band are branch-exact");
}

#[test]
fn criterion_02_conjugation_identity() {
    let pr = profile();
    let g400 = make_grid(16.0, 400, BoundaryCondition::Dirichlet).unwrap();
    let g800 = make_grid(16.0, 800, BoundaryCondition::Dirichlet).unwrap();
    let r400 = conjugation_residual(&pr, 0.3, &g400, 0.0, &PotentialProfile::zero()).unwrap();
    let r800 = conjugation_residual(&pr, 0.3, &g800, 0.0, &PotentialProfile::zero()).unwrap();
    let order = (r400 / r800).log2();
    let pass = r400 < 1e-2 && r800 < 3e-3 && order >= 1.7;
    verdict(
        2,
        "conjugation identity",
        pass,
        &format!("residual n=400: {r400:.3e}, n=800: {r800:.3e}, observed order {order:.2}"),
    );
}

#[test]
fn criterion_03_essential_spectrum_rays() {
    let pr = profile();
    let theta = theta_a();
    let cs = circle_cross_section::<f64>(5, 1.0).unwrap();
    let rays = predict_essential(&theta, &cs, &[]);
    let mut distinct: Vec<f64> = Vec::new();
    for (mu, _) in cs.iter() {
        if !distinct.contains(&mu) {
            distinct.push(mu);
        }
    }
    let max_dist = |n: usize| -> f64 {
        let grid = make_grid(40.0, n, BoundaryCondition::Dirichlet).unwrap();
        let mut worst: f64 = 0.0;
        for &mu in &distinct {
            let op = assemble_cyl_mode(&pr, &theta, mu, &grid, &PotentialProfile::zero()).unwrap();
            let mut eigs = eigvals_dense(&op.to_dense().unwrap()).unwrap();
            eigs.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            for z in eigs.iter().take(10) {
                worst = worst.max(rays.nearest(*z).1);
            }
        }
        worst
    };
    let d800 = max_dist(800);
    let d1600 = max_dist(1600);
    let ratio = d1600 / d800;
    // "halves (+-30%)": at least halves within the slack; the observed
    // decay is quadratic in h, which passes with margin
    let pass = d800 < 0.05 && ratio <= 0.65;
    verdict(
        3,
        "essential-spectrum rays",
        pass,
        &format!("max distance n=800: {d800:.3e}, n=1600: {d1600:.3e}, ratio {ratio:.3}"),
    );
}

struct CornerRun {
    threshold_points: usize,
    end_ray_points: usize,
    end_origins: usize,
    worst_top: f64,
}

fn corner_run(with_well: bool, modes: usize) -> CornerRun {
    let pr = profile();
    let theta = theta_a();
    let grid = make_grid(12.0, 60, BoundaryCondition::Neumann).unwrap();
    let well = if with_well {
        gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap()
    } else {
        PotentialProfile::zero()
    };
    let cs = circle_cross_section::<f64>(modes, 1.0).unwrap();
    let model = CornerModel {
        cross_section: cs.clone(),
        grid1: grid,
        grid2: grid,
        end_potential1: well.clone(),
        end_potential2: PotentialProfile::zero(),
        corner_potential: None,
    };
    let mut out = CornerRun {
        threshold_points: 0,
        end_ray_points: 0,
        end_origins: 0,
        worst_top: 0.0,
    };
    let mut seen = Vec::new();
    for (mu, _) in cs.iter() {
        if seen.contains(&mu.to_bits()) {
            continue;
        }
        seen.push(mu.to_bits());
        // discrete eigenvalues of the 1D end blocks supply extra ray origins
        let mut end_lists = Vec::new();
        for (g, v) in [(&model.grid1, &model.end_potential1), (&model.grid2, &model.end_potential2)] {
            let op = assemble_cyl_mode(&pr, &theta, mu, g, v).unwrap();
            let eigs = eigvals_dense(&op.to_dense().unwrap()).unwrap();
            let mode_cs = CrossSectionSpectrum::new(vec![(mu, String::from("m"))]).unwrap();
            let rays1 = predict_essential(&theta, &mode_cs, &[]);
            let tol1 = default_classification_tolerance(g.spacing(), mu);
            end_lists.push(classify_spectrum(&eigs, &rays1, tol1).discrete_values());
        }
        let mode_cs = CrossSectionSpectrum::new(vec![(mu, String::from("m"))]).unwrap();
        let rays = predict_essential(&theta, &mode_cs, &end_lists);
        out.end_origins += rays
            .provenance
            .iter()
            .filter(|p| **p != RayProvenance::CrossSectionThreshold)
            .count();
        let op = assemble_corner_mode(&pr, &theta, mu, &model).unwrap();
        let eigs = eigvals_dense(&op.to_dense().unwrap()).unwrap();
        // criterion-3 tolerance for the family membership of the top points
        let class = classify_spectrum(&eigs, &rays, 0.05);
        for e in &class.ray_bound {
            match rays.provenance[e.ray] {
                RayProvenance::CrossSectionThreshold => out.threshold_points += 1,
                _ => out.end_ray_points += 1,
            }
        }
        let mut by_modulus = eigs.clone();
        by_modulus.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        for z in by_modulus.iter().take(10) {
            out.worst_top = out.worst_top.max(rays.nearest(*z).1);
        }
    }
    out
}

#[test]
fn criterion_04_corner_ray_structure() {
    let with_well = corner_run(true, 2);
    let without = corner_run(false, 1);
    let pass = with_well.end_origins >= 1
        && with_well.end_ray_points >= 3
        && with_well.threshold_points >= 3
        && with_well.worst_top <= 0.05
        && without.end_origins == 0
        && without.end_ray_points == 0
        && without.worst_top <= 0.05;
    verdict(
        4,
        "corner ray structure",
        pass,
        &format!(
            "with well: {} end-ray points from {} end origins, {} threshold points, top distance {:.2e}; \
             without well: {} end origins, top distance {:.2e}",
            with_well.end_ray_points,
            with_well.end_origins,
            with_well.threshold_points,
            with_well.worst_top,
            without.end_origins,
            without.worst_top
        ),
    );
}

#[test]
fn criterion_05_resonance_theta_independence() {
    let pr = profile();
    let v = well_with_barrier(10.0, 12.0, &pr).unwrap();
    let cs = circle_cross_section::<f64>(1, 1.0).unwrap();
    let mu = 0.0;
    let eig = |theta: &DilationParameter<f64>, grid: &HalfLineGrid<f64>| {
        let op = assemble_cyl_mode(&pr, theta, mu, grid, &v).unwrap();
        eigvals_dense(&op.to_dense().unwrap()).unwrap()
    };
    let base = make_grid(10.0, 1000, BoundaryCondition::Neumann).unwrap();
    let doubled = make_grid(20.0, 2001, BoundaryCondition::Neumann).unwrap();
    let (ta, tb) = (theta_a(), theta_b());
    let rays_a = predict_essential(&ta, &cs, &[]);
    let rays_b = predict_essential(&tb, &cs, &[]);
    let tol = default_classification_tolerance(base.spacing(), mu);
    let matches = detect_resonances(
        &eig(&ta, &base),
        &ta,
        &eig(&tb, &base),
        &tb,
        &rays_a,
        &rays_b,
        tol,
        1e-4,
    )
    .unwrap();
    let class_doubled = classify_spectrum(&eig(&ta, &doubled), &rays_a, tol);
    let mut worst_sep: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    for m in &matches {
        worst_sep = worst_sep.max(m.separation);
        let drift = class_doubled
            .discrete
            .iter()
            .map(|c| (c.value - m.value).norm())
            .fold(f64::INFINITY, f64::min);
        worst_drift = worst_drift.max(drift);
    }
    let pass = !matches.is_empty() && worst_sep <= 1e-4 && worst_drift <= 1e-4;
    verdict(
        5,
        "resonance theta-independence",
        pass,
        &format!(
            "{} matched discrete eigenvalue(s), worst separation {worst_sep:.3e}, worst u_max-doubling drift {worst_drift:.3e}",
            matches.len()
        ),
    );
}

#[test]
fn criterion_06_real_discrete_equals_point_spectrum() {
    let pr = profile();
    let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
    let cs = circle_cross_section::<f64>(3, 1.0).unwrap();
    let theta = theta_a();
    let grid = make_grid(20.0, 2000, BoundaryCondition::Neumann).unwrap();
    let rays = predict_essential(&theta, &cs, &[]);
    let tol = default_classification_tolerance(grid.spacing(), 1.0);
    let mut pass = true;
    let mut found = 0usize;
    let mut worst_rel: f64 = 0.0;
    let mut distinct: Vec<f64> = Vec::new();
    for (mu, _) in cs.iter() {
        if !distinct.contains(&mu) {
            distinct.push(mu);
        }
    }
    for &mu in &distinct {
        let op = assemble_cyl_mode(&pr, &theta, mu, &grid, &v).unwrap();
        let eigs = eigvals_dense(&op.to_dense().unwrap()).unwrap();
        let class = classify_spectrum(&eigs, &rays, tol);
        let zero = DilationParameter::real(0.0).unwrap();
        let herm_op = assemble_cyl_mode(&pr, &zero, mu, &grid, &v).unwrap();
        let (herm, _) = eigh_dense(&herm_op.to_dense().unwrap()).unwrap();
        for c in &class.discrete {
            let real_like = c.value.im.abs() <= 1e-3 * (1.0 + c.value.re.abs());
            let away = cs
                .thresholds()
                .iter()
                .map(|m| (c.value.re - m).abs())
                .fold(f64::INFINITY, f64::min)
                >= 0.2;
            if real_like && away {
                found += 1;
                let nearest = herm
                    .iter()
                    .map(|x| (c.value.re - x).abs() / x.abs().max(1.0))
                    .fold(f64::INFINITY, f64::min);
                worst_rel = worst_rel.max(nearest);
                if nearest > 1e-5 {
                    pass = false;
                }
            }
        }
    }
    pass &= found >= 1;
    verdict(
        6,
        "real discrete eigenvalues = point spectrum",
        pass,
        &format!("{found} real discrete candidate(s), worst relative gap to the Hermitian solve {worst_rel:.3e}"),
    );
}

#[test]
fn criterion_07_sectoriality() {
    let pr = profile();
    let grid = make_grid(16.0, 240, BoundaryCondition::Dirichlet).unwrap();
    let k_grid: Vec<f64> = vec![
        0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0,
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for theta_raw in [Complex64::new(0.3, 0.2), Complex64::new(0.5, 0.3)] {
        let theta = DilationParameter::new(theta_raw).unwrap();
        let op = assemble_cyl_mode(&pr, &theta, 0.0, &grid, &PotentialProfile::zero()).unwrap();
        let dense = op.to_dense().unwrap();
        let n = grid.len();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut samples = Vec::new();
        for _ in 0..500 {
            let f: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let af = op.apply(&f).unwrap();
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (a, b) in af.iter().zip(&f) {
                num += a * b.conj();
                den += b.norm_sqr();
            }
            samples.push(num / den);
        }
        let boundary = numerical_range_boundary(&dense, 64).unwrap();
        samples.extend(boundary.iter().copied());
        match sector_search(&samples, &k_grid) {
            None => {
                pass = false;
                details.push(format!("theta {theta_raw}: no sector"));
            }
            Some(s) => {
                let half_angle = (1.0 / s.k).atan() + 1e-6;
                let inside = boundary.iter().all(|p| {
                    let shifted = p + Complex64::new(s.gamma, 0.0);
                    shifted.norm() < 1e-12 || shifted.arg().abs() <= half_angle
                });
                pass &= s.k >= 0.2 && inside;
                details.push(format!(
                    "theta {theta_raw}: gamma {:.4e}, k {}, polygon in sector: {inside}",
                    s.gamma, s.k
                ));
            }
        }
    }
    verdict(7, "sectoriality", pass, &details.join("; "));
}

#[test]
fn criterion_08_tensor_sum_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_rand: f64 = 0.0;
    for _ in 0..20 {
        let mut mk = |n: usize| {
            Array2::from_shape_fn((n, n), |_| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        };
        let a = mk(3);
        let b = mk(3);
        let s = ichinose_sumcheck(&a, &b).unwrap();
        worst_rand = worst_rand.max(s.max_mismatch);
    }
    let pr = profile();
    let grid = make_grid(8.0, 40, BoundaryCondition::Dirichlet).unwrap();
    let theta = theta_a();
    let a = assemble_cyl_mode(&pr, &theta, 0.0, &grid, &PotentialProfile::zero()).unwrap();
    let b = assemble_cyl_mode(&pr, &theta, 1.0, &grid, &PotentialProfile::zero()).unwrap();
    let s = ichinose_sumcheck(&a.to_dense().unwrap(), &b.to_dense().unwrap()).unwrap();
    let pass = worst_rand < 1e-8 && s.max_mismatch < 1e-7 && s.refused == 0;
    verdict(
        8,
        "tensor-sum law",
        pass,
        &format!(
            "worst mismatch over 20 random 3x3 pairs {worst_rand:.3e}; dilated blocks (n=40) {:.3e}",
            s.max_mismatch
        ),
    );
}

fn weyl_grid(n: usize, h: f64) -> HalfLineGrid<f64> {
    let u_max = escape_center::<f64>(n) + n as f64 + 8.0;
    let pts = (u_max / h).round() as usize - 1;
    make_grid(u_max, pts, BoundaryCondition::Dirichlet).unwrap()
}

#[test]
fn criterion_09_boundary_weyl_sequences() {
    let pr = profile();
    let theta = theta_a();
    let tp = theta.theta_prime();
    let cs = circle_cross_section::<f64>(3, 1.0).unwrap();
    let rays = predict_essential(&theta, &cs, &[]);
    let indices = [4usize, 8, 16, 32];
    let mut slopes = Vec::new();
    let mut on_ray = true;

    // free kind
    let mut pts = Vec::new();
    for &n in &indices {
        let grid = weyl_grid(n, 0.5);
        let op = assemble_cyl_mode(&pr, &theta, 0.0, &grid, &PotentialProfile::zero()).unwrap();
        let lambda = tp; // mu = 0, ray parameter 1
        on_ray &= rays.nearest(lambda).1 <= default_classification_tolerance(grid.spacing(), 0.0);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Free { mu: 0.0 },
            index: n,
            lambda,
            theta,
        };
        let g = build_bws(&spec, &op).unwrap();
        pts.push((n, defect_norm(&g, lambda, &op).unwrap()));
    }
    slopes.push(("free", log_log_slope(&pts)));

    // corner kind
    let mut pts = Vec::new();
    for &n in &indices {
        let grid = weyl_grid(n, 0.5);
        let model = CornerModel {
            cross_section: cs.clone(),
            grid1: grid,
            grid2: grid,
            end_potential1: PotentialProfile::zero(),
            end_potential2: PotentialProfile::zero(),
            corner_potential: None,
        };
        let op = assemble_corner_mode(&pr, &theta, 0.0, &model).unwrap();
        let lambda = tp;
        let spec = SingularSequenceSpec {
            target: BwsTarget::Corner { mu: 0.0 },
            index: n,
            lambda,
            theta,
        };
        let g = build_bws(&spec, &op).unwrap();
        pts.push((n, defect_norm(&g, lambda, &op).unwrap()));
    }
    slopes.push(("corner", log_log_slope(&pts)));

    // channel kind: end block with the deep well
    let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
    let end_grid = make_grid(14.0, 120, BoundaryCondition::Neumann).unwrap();
    let end_op = assemble_cyl_mode(&pr, &theta, 0.0, &end_grid, &v).unwrap();
    let eig = eig_dense(&end_op.to_dense().unwrap()).unwrap();
    let idx = (0..eig.eigenvalues.len())
        .min_by(|&a, &b| eig.eigenvalues[a].re.partial_cmp(&eig.eigenvalues[b].re).unwrap())
        .unwrap();
    let gamma = eig.eigenvalues[idx];
    let w: Vec<Complex64> = (0..end_grid.len()).map(|i| eig.eigenvectors[[i, idx]]).collect();
    let mut pts = Vec::new();
    for &n in &indices {
        let free_grid = weyl_grid(n, 0.5);
        let op = assemble_channel_mode(&pr, &theta, 0.0, &free_grid, &end_grid, &v).unwrap();
        let lambda = gamma + tp;
        let gamma_rays = predict_essential(&theta, &cs, &[vec![gamma]]);
        on_ray &= gamma_rays.nearest(lambda).1
            <= default_classification_tolerance(free_grid.spacing(), 0.0);
        let spec = SingularSequenceSpec {
            target: BwsTarget::Channel {
                gamma,
                end_vector: w.clone(),
            },
            index: n,
            lambda,
            theta,
        };
        let g = build_bws(&spec, &op).unwrap();
        pts.push((n, defect_norm(&g, lambda, &op).unwrap()));
    }
    slopes.push(("channel", log_log_slope(&pts)));

    let pass = slopes.iter().all(|(_, s)| *s <= -0.8) && on_ray;
    let detail = slopes
        .iter()
        .map(|(k, s)| format!("{k} slope {s:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        9,
        "boundary Weyl sequences",
        pass,
        &format!("{detail}; all targets on predicted rays: {on_ray}"),
    );
}

#[test]
fn criterion_10_commutator_hypothesis() {
    let pr = profile();
    let theta = theta_a();
    let cs = circle_cross_section::<f64>(1, 1.0).unwrap();
    let mut ops: Vec<(usize, ModeOperator<f64>)> = Vec::new();
    for d in [8usize, 16, 32, 64] {
        let u_max = 2.0 * d as f64 + 16.0;
        let n = (u_max / 0.25).round() as usize - 1;
        let grid = make_grid(u_max, n, BoundaryCondition::Dirichlet).unwrap();
        let model = CornerModel {
            cross_section: cs.clone(),
            grid1: grid,
            grid2: grid,
            end_potential1: PotentialProfile::zero(),
            end_potential2: PotentialProfile::zero(),
            corner_potential: None,
        };
        ops.push((d, assemble_corner_mode(&pr, &theta, 0.0, &model).unwrap()));
    }
    let eps = commutator_decay(&ops).unwrap();
    let slope = log_log_slope(&eps);
    let monotone = eps.windows(2).all(|w| w[1].1 <= w[0].1);
    let pass = slope <= -0.8 && monotone;
    let table = eps
        .iter()
        .map(|(d, e)| format!("eps({d}) = {e:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        10,
        "commutator hypothesis",
        pass,
        &format!("{table}; log-log slope {slope:.3}"),
    );
}

fn analytic_pair(
    pr: &CutoffProfile<f64>,
    grid: &HalfLineGrid<f64>,
    modes: usize,
) -> (AnalyticVector<f64>, AnalyticVector<f64>) {
    let interior = |c: f64, w: f64| -> Vec<Complex64> {
        grid.nodes()
            .map(|u| Complex64::new(bump((u - c) / w), 0.0))
            .collect()
    };
    let mut f_comp = Vec::new();
    let mut g_comp = Vec::new();
    for i in 0..modes {
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
    (
        make_analytic_vector(pr, grid, f_comp).unwrap(),
        make_analytic_vector(pr, grid, g_comp).unwrap(),
    )
}

#[test]
fn criterion_11_resolvent_identity_and_continuation() {
    let pr = profile();
    let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
    let modes = [0.0, 1.0];
    let mk_ops = |theta: &DilationParameter<f64>, grid: &HalfLineGrid<f64>| -> Vec<ModeOperator<f64>> {
        modes
            .iter()
            .map(|&mu| assemble_cyl_mode(&pr, theta, mu, grid, &v).unwrap())
            .collect()
    };
    let fine = make_grid(40.0, 32000, BoundaryCondition::Dirichlet).unwrap();
    let (f, g) = analytic_pair(&pr, &fine, modes.len());
    let zero = DilationParameter::real(0.0).unwrap();
    let lambda = Complex64::new(-1.0, 0.0);
    let base = matrix_element(lambda, &zero, &f, &g, &mk_ops(&zero, &fine), DISTANCE_FLOOR).unwrap();
    let mut unitarity: f64 = 0.0;
    for th in [0.3, 0.5] {
        let p = DilationParameter::real(th).unwrap();
        let v = matrix_element(lambda, &p, &f, &g, &mk_ops(&p, &fine), DISTANCE_FLOOR).unwrap();
        unitarity = unitarity.max((v - base).norm() / base.norm());
    }
    let (ta, tb) = (theta_a(), theta_b());
    let mut rotation: f64 = 0.0;
    for lam in [Complex64::new(-1.0, 0.0), Complex64::new(-2.5, 0.4)] {
        let va = matrix_element(lam, &ta, &f, &g, &mk_ops(&ta, &fine), DISTANCE_FLOOR).unwrap();
        let vb = matrix_element(lam, &tb, &f, &g, &mk_ops(&tb, &fine), DISTANCE_FLOOR).unwrap();
        rotation = rotation.max((va - vb).norm() / va.norm());
    }
    // crossing (0, mu_1) on the real axis with the rotated parameter
    let scan_grid = make_grid(20.0, 800, BoundaryCondition::Dirichlet).unwrap();
    let (fs, gs) = analytic_pair(&pr, &scan_grid, modes.len());
    let path: Vec<Complex64> = (0..29)
        .map(|i| Complex64::new(0.15 + 0.7 * i as f64 / 28.0, 0.0))
        .collect();
    let trace = continuation_scan(&path, &ta, &fs, &gs, &mk_ops(&ta, &scan_grid), DISTANCE_FLOOR).unwrap();
    let clean = trace.flags.iter().filter(|f| **f == PointFlag::Ok).count();
    let trace0 =
        continuation_scan(&path, &zero, &fs, &gs, &mk_ops(&zero, &scan_grid), DISTANCE_FLOOR).unwrap();
    let blocked0 = trace0.flags.iter().filter(|f| **f != PointFlag::Ok).count();
    // holomorphy in lambda on a circle off the rotated spectrum
    let ops_scan = mk_ops(&ta, &scan_grid);
    let residual = holomorphy_check(
        |z| matrix_element(z, &ta, &fs, &gs, &ops_scan, DISTANCE_FLOOR).unwrap(),
        Complex64::new(0.5, 0.4),
        0.05,
        24,
    )
    .unwrap();
    let pass = unitarity <= 1e-6
        && rotation <= 1e-6
        && clean == path.len()
        && trace.pole_candidates.is_empty()
        && trace.smoothness <= 0.1
        && blocked0 > 0
        && residual < 1e-8;
    verdict(
        11,
        "resolvent identity and continuation",
        pass,
        &format!(
            "unitarity {unitarity:.3e}, rotation agreement {rotation:.3e}, crossing {clean}/{} clean \
             (smoothness {:.3e}), undilated blocked at {blocked0}, lambda-contour residual {residual:.3e}",
            path.len(),
            trace.smoothness
        ),
    );
}

#[test]
fn criterion_12_type_a_holomorphy() {
    let pr = profile();
    let grid = make_grid(12.0, 400, BoundaryCondition::Dirichlet).unwrap();
    let v = gaussian_well(8.0, 0.8, 0.4, 1.8, &pr).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let g: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let residual = holomorphy_check(
            |z| {
                let theta = DilationParameter::new(z).unwrap();
                let op = assemble_cyl_mode(&pr, &theta, 1.0, &grid, &v).unwrap();
                let af = op.apply(&f).unwrap();
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, b) in af.iter().zip(&g) {
                    acc += a * b.conj();
                }
                acc * grid.spacing()
            },
            Complex64::new(0.4, 0.1),
            0.05,
            32,
        )
        .unwrap();
        worst = worst.max(residual);
    }
    let pass = worst < 1e-8;
    verdict(
        12,
        "type-A holomorphy",
        pass,
        &format!("worst theta-contour residual over 10 seeded pairs {worst:.3e}"),
    );
}
