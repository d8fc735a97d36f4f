//! The verification suites. Each numbered criterion produces report lines;
//! a suite is a list of criteria.

use nilgeo_core::catalog::{build_pair, pair_algebra, NilmanifoldData};
use nilgeo_core::certificate::Certificate;
use nilgeo_core::criteria::{
    butler_nonintegrability_sample, check_hr_presentation, cih_certificate, PresentationSplit,
};
use nilgeo_core::flow::{flow_exact_vv, flow_rk4};
use nilgeo_core::integrals::{
    directional, hamiltonian_field, independence_rank, poisson_bracket, Integral, IntegralSet,
};
use nilgeo_core::linalg::Matrix;
use nilgeo_core::periodicity::{
    construct_closed_geodesic, family_dimension, family_projection, invariant_fiber_codim,
    is_period, random_periodic_state, random_target, translational_element,
    translational_element_expanded, translational_oracle_rk4, y_coefficient, ClosedGeodesic,
};
use nilgeo_core::sampling::{generic_state, rng_for, state_with_ck_zero};
use nilgeo_core::scalar::q_int;
use nilgeo_core::spectral::{
    char_poly_grid_check, char_poly_random_check, gw_certificate, GwParams,
};
use nilgeo_core::{GroupElement, TangentState, Tolerances, Which, Q};

use crate::report::{CheckLine, Value};

pub const SUITES: [&str; 8] = [
    "all",
    "algebra",
    "spectral",
    "flow",
    "integrals",
    "periodicity",
    "criteria",
    "cih",
];

/// Criteria run by a suite, or `None` for an unknown suite name.
pub fn suite_criteria(suite: &str) -> Option<Vec<u8>> {
    Some(match suite {
        "all" => (1..=12).collect(),
        "algebra" => vec![1],
        "spectral" => vec![2, 3],
        "integrals" => vec![4, 5, 6],
        "flow" => vec![7],
        "periodicity" => vec![8, 9, 10],
        "criteria" => vec![11],
        "cih" => vec![12],
        _ => return None,
    })
}

/// Knobs shared by all criteria.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub seed: u64,
    pub tol: Tolerances,
    /// Squared radius for the kernel-lattice length spectra.
    pub r2: Q,
    /// Coordinate bound for the clean-intersection enumeration.
    pub cih_bound: i64,
}

impl SuiteParams {
    pub fn new(seed: u64) -> Self {
        SuiteParams {
            seed,
            tol: Tolerances::default(),
            r2: q_int(100),
            cih_bound: 3,
        }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "golden j-matrices",
        2 => "char-poly identity",
        3 => "isospectrality hypotheses",
        4 => "conservation of first integrals",
        5 => "Poisson commutation",
        6 => "functional independence",
        7 => "flow oracle agreement",
        8 => "translational elements",
        9 => "density construction",
        10 => "family dimension",
        11 => "criteria separation",
        12 => "clean-intersection certificates",
        _ => "unknown",
    }
}

/// Wall-clock budget of a criterion in seconds.
pub fn time_limit(id: u8) -> f64 {
    match id {
        1 => 1.0,
        2 | 7 => 10.0,
        3 | 5 | 9 | 12 => 60.0,
        _ => 30.0,
    }
}

pub fn run_criterion(id: u8, p: &SuiteParams) -> Vec<CheckLine> {
    match id {
        1 => golden_matrices(),
        2 => char_poly_identity(p),
        3 => isospectrality(p),
        4 => conservation(p),
        5 => poisson(p),
        6 => independence(p),
        7 => flow_oracle(p),
        8 => translational(p),
        9 => density(p),
        10 => family(p),
        11 => criteria_separation(p),
        12 => cih(p),
        _ => vec![CheckLine::new(id, "unknown_criterion", false)],
    }
}

fn certificate_lines(id: u8, prefix: &str, cert: &Certificate) -> Vec<CheckLine> {
    cert.checks
        .iter()
        .map(|c| {
            let mut line = CheckLine::new(id, &format!("{prefix}{}", c.name), c.pass)
                .value("evidence", c.evidence.label())
                .value("detail", c.detail.clone());
            if let Some(w) = &c.witness {
                line = line.value("witness", w.clone());
            }
            line
        })
        .collect()
}

/// The printed 5×5 matrices of `j(Z_c)` and `j′(Z_c)` in the basis
/// `X_i, X_j, Y_i, Y_j, Y_k`.
pub fn golden_j(which: Which, c: &[Q]) -> Matrix<Q> {
    let o = || q_int(0);
    let (i, j, k) = (c[0].clone(), c[1].clone(), c[2].clone());
    let rows = match which {
        Which::M => vec![
            vec![o(), o(), o(), -k.clone(), j.clone()],
            vec![o(), o(), k.clone(), o(), -i.clone()],
            vec![o(), -k.clone(), o(), o(), o()],
            vec![k, o(), o(), o(), o()],
            vec![-j, i, o(), o(), o()],
        ],
        Which::MPrime => vec![
            vec![o(), -k.clone(), o(), o(), o()],
            vec![k.clone(), o(), o(), o(), o()],
            vec![o(), o(), o(), -k.clone(), j.clone()],
            vec![o(), o(), k, o(), -i.clone()],
            vec![o(), o(), -j, i, o()],
        ],
    };
    Matrix::from_rows(&rows)
}

fn golden_matrices() -> Vec<CheckLine> {
    let cs: [[i64; 3]; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
    [Which::M, Which::MPrime]
        .iter()
        .map(|&w| {
            let alg = pair_algebra(w);
            let mut bad = Vec::new();
            for c in cs {
                let cq: Vec<Q> = c.iter().map(|&x| q_int(x)).collect();
                if alg.j_matrix(&cq).ok() != Some(golden_j(w, &cq)) {
                    bad.push(format!("{c:?}"));
                }
            }
            CheckLine::new(1, &format!("golden_j_{}", w.label()), bad.is_empty())
                .value("points", 4usize)
                .value("mismatches", bad)
                .note("exact rational comparison")
        })
        .collect()
}

fn char_poly_identity(p: &SuiteParams) -> Vec<CheckLine> {
    let m = pair_algebra(Which::M);
    let mp = pair_algebra(Which::MPrime);
    let grid = char_poly_grid_check(&m, &mp, true);
    let random = char_poly_random_check(&m, &mp, 10_000, p.seed, true);
    vec![
        CheckLine::new(2, "char_poly_grid_6x6x6", grid.is_none())
            .value("points", 216usize)
            .value("witness", grid.unwrap_or_default())
            .note("exact; equal to lambda^5 + (c_k^2+|c|^2) lambda^3 + c_k^2 |c|^2 lambda"),
        CheckLine::new(2, "char_poly_random_rational", random.is_none())
            .value("samples", 10_000usize)
            .value("witness", random.unwrap_or_default())
            .note("exact at sampled rational c"),
    ]
}

fn isospectrality(p: &SuiteParams) -> Vec<CheckLine> {
    let (m, mp) = build_pair();
    let params = GwParams {
        r2: p.r2.clone(),
        dual_bound: 6,
        random_samples: 100,
        seed: p.seed,
        check_closed_form: true,
    };
    let cert = gw_certificate(&m, &mp, &params);
    let mut lines = certificate_lines(3, "", &cert);
    lines.push(
        CheckLine::new(3, "gw_certificate", cert.pass())
            .value("r2", &p.r2)
            .value("dual_bound", 6i64),
    );
    lines
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn conservation(p: &SuiteParams) -> Vec<CheckLine> {
    let set = IntegralSet { which: Which::M };
    let mut rng = rng_for(p.seed, "suite.conservation");
    let mut worst = [0.0f64; 8];
    for _ in 0..1000 {
        let st = generic_state(&mut rng, Which::M, true);
        let f0 = set.eval_all(&st);
        for k in 1..=40 {
            let t = 0.5 * k as f64;
            let (v, vel) = flow_exact_vv(Which::M, &st, t).expect("generic state");
            let s = TangentState::new(v, st.base.z.clone(), vel, st.fiber_z.clone());
            let f = set.eval_all(&s);
            for i in 0..8 {
                worst[i] = worst[i].max((f[i] - f0[i]).abs());
            }
        }
    }
    let tol = p.tol.conservation_tol;
    Integral::ALL
        .iter()
        .zip(worst)
        .map(|(f, w)| {
            CheckLine::new(4, &format!("drift_{}", f.label()), w <= tol)
                .value("max_drift", w)
                .tol(tol)
                .note("1000 unit-speed generic states on M, t in [0, 20]")
        })
        .collect()
}

fn poisson(p: &SuiteParams) -> Vec<CheckLine> {
    let alg = pair_algebra(Which::M);
    let set = IntegralSet { which: Which::M };
    let h = p.tol.fd_step;
    let mut rng = rng_for(p.seed, "suite.poisson");
    let mut worst = 0.0f64;
    let mut worst_pair = (0, 0);
    let mut sanity = 0.0f64;
    for _ in 0..1000 {
        let st = generic_state(&mut rng, Which::M, false);
        let fields: Vec<_> = Integral::ALL
            .iter()
            .map(|&g| hamiltonian_field(&alg, |s| set.eval(g, s), &st, h))
            .collect();
        for i in 0..8 {
            for j in i + 1..8 {
                let f = Integral::ALL[i];
                let b = directional(&alg, |s| set.eval(f, s), &st, &fields[j], h).abs();
                if b > worst {
                    worst = b;
                    worst_pair = (i, j);
                }
            }
        }
        let s = poisson_bracket(
            &alg,
            |s: &TangentState| s.base.v[0],
            |s: &TangentState| s.fiber_v[0],
            &st,
            h,
        );
        sanity = sanity.max((s - 1.0).abs());
    }
    let tol = p.tol.bracket_tol;
    vec![
        CheckLine::new(5, "max_bracket_28_pairs", worst <= tol)
            .value("max_abs", worst)
            .value(
                "pair",
                format!(
                    "{{{}, {}}}",
                    Integral::ALL[worst_pair.0].label(),
                    Integral::ALL[worst_pair.1].label()
                ),
            )
            .tol(tol)
            .note("1000 generic states on M, central differences"),
        CheckLine::new(5, "sanity_bracket_x_i_V_Xi", sanity <= tol)
            .value("max_abs_deviation_from_1", sanity)
            .tol(tol),
    ]
}

fn independence(p: &SuiteParams) -> Vec<CheckLine> {
    let alg = pair_algebra(Which::M);
    let set = IntegralSet { which: Which::M };
    let (h, thr) = (p.tol.fd_step, p.tol.svd_threshold);
    let mut rng = rng_for(p.seed, "suite.independence");
    let full = (0..1000)
        .filter(|_| {
            independence_rank(
                &alg,
                &set,
                &generic_state(&mut rng, Which::M, false),
                h,
                thr,
            ) == 8
        })
        .count();
    let mut rng0 = rng_for(p.seed, "suite.independence.ck0");
    let max_low = (0..100)
        .map(|_| independence_rank(&alg, &set, &state_with_ck_zero(&mut rng0), h, thr))
        .max()
        .unwrap_or(0);
    vec![
        CheckLine::new(6, "rank_8_fraction", full >= 990)
            .value("rank_8_states", full)
            .value("states", 1000usize)
            .tol(0.99)
            .note("row-normalized gradients"),
        CheckLine::new(6, "rank_at_ck_zero", max_low <= 6)
            .value("max_rank", max_low)
            .value("states", 100usize),
    ]
}

fn flow_oracle(p: &SuiteParams) -> Vec<CheckLine> {
    [Which::M, Which::MPrime]
        .iter()
        .map(|&w| {
            let alg = pair_algebra(w);
            let mut rng = rng_for(p.seed, &format!("suite.flow.{}", w.label()));
            let t = 10.0;
            let steps = p.tol.rk4_steps(t);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let st = generic_state(&mut rng, w, false);
                let (v, vel) = flow_exact_vv(w, &st, t).expect("generic");
                let r = flow_rk4(&alg, &st, t, steps);
                worst = worst
                    .max(max_abs_diff(&v, &r.base.v))
                    .max(max_abs_diff(&vel, &r.fiber_v));
            }
            CheckLine::new(7, &format!("exact_vs_rk4_{}", w.label()), worst <= 1e-8)
                .value("max_abs", worst)
                .value("rk4_steps", steps)
                .tol(1e-8)
                .note("100 generic states, t = 10")
        })
        .collect()
}

/// Target used for the constructed closed geodesics of criteria 8 and 10.
pub fn reference_target() -> TangentState {
    TangentState::new(
        vec![0.1, 0.2, -0.1, 0.3, 0.0],
        vec![0.0; 3],
        vec![0.3, -0.2, 0.4, 0.1, 0.2],
        vec![0.4, 0.2, 0.4],
    )
}

pub fn reference_geodesic(which: Which, data: &NilmanifoldData<Q>) -> ClosedGeodesic {
    construct_closed_geodesic(which, data, &reference_target(), 0.2)
        .expect("reference target is far from the cone")
}

fn rel_diff(a: &GroupElement<f64>, b: &GroupElement<f64>) -> f64 {
    let (x, y) = (a.to_vec(), b.to_vec());
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    max_abs_diff(&x, &y) / scale
}

fn translational(p: &SuiteParams) -> Vec<CheckLine> {
    let (m, mp) = build_pair();
    let mut lines = Vec::new();
    for (w, data) in [(Which::M, &m), (Which::MPrime, &mp)] {
        let mut rng = rng_for(p.seed, &format!("suite.translational.{}", w.label()));
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let (st, tau) = random_periodic_state(&mut rng, w);
            let a = translational_element(w, &data.alg, &st, tau).expect("periodic generic state");
            let b = translational_element_expanded(w, &st, tau).expect("periodic generic state");
            worst = worst.max(rel_diff(&a, &b));
        }
        lines.push(
            CheckLine::new(
                8,
                &format!("proof_vs_expanded_{}", w.label()),
                worst <= 1e-10,
            )
            .value("max_rel", worst)
            .tol(1e-10)
            .note(
                "1000 random generic states at a common rotation period; relative to max(1, |a|)",
            ),
        );
        let cg = reference_geodesic(w, data);
        let tau = cg.tau();
        let oracle = translational_oracle_rk4(&data.alg, &cg.state, tau, p.tol.rk4_steps(tau));
        let a = translational_element(w, &data.alg, &cg.state, tau).expect("constructed");
        let b = translational_element_expanded(w, &cg.state, tau).expect("constructed");
        let exact = cg.a.to_f64();
        let (da, db, de) = (
            max_abs_diff(&a.to_vec(), &oracle.to_vec()),
            max_abs_diff(&b.to_vec(), &oracle.to_vec()),
            max_abs_diff(&exact.to_vec(), &oracle.to_vec()),
        );
        lines.push(
            CheckLine::new(8, &format!("oracle_{}", w.label()), da.max(db) <= 1e-7)
                .value("tau", tau)
                .value("proof_form_vs_rk4", da)
                .value("expanded_vs_rk4", db)
                .value("exact_a_vs_rk4", de)
                .value("a", cg.a.to_vec())
                .tol(1e-7)
                .note("constructed closed geodesic; RK4 flow composition"),
        );
    }
    lines
}

fn density(p: &SuiteParams) -> Vec<CheckLine> {
    let (m, mp) = build_pair();
    let eps = 0.1;
    [(Which::M, &m), (Which::MPrime, &mp)]
        .iter()
        .map(|&(w, data)| {
            let mut rng = rng_for(p.seed, &format!("suite.density.{}", w.label()));
            let mut ok = 0usize;
            let mut worst = 0.0f64;
            let mut failures = Vec::new();
            for i in 0..100 {
                let target = random_target(&mut rng, 0.05);
                match construct_closed_geodesic(w, data, &target, eps) {
                    Ok(cg) => {
                        let chk = is_period(&cg, data);
                        let d = cg.initial.distance(&target);
                        worst = worst.max(d);
                        match chk {
                            Ok(c) if c.a_in_gamma && c.rotation_exact && d < eps => ok += 1,
                            Ok(c) => failures.push(format!("{i}: {c:?} distance {d}")),
                            Err(e) => failures.push(format!("{i}: {e}")),
                        }
                    }
                    Err(e) => failures.push(format!("{i}: {e}")),
                }
            }
            failures.truncate(3);
            CheckLine::new(9, &format!("closed_geodesics_{}", w.label()), ok == 100)
                .value("successes", ok)
                .value("targets", 100usize)
                .value("max_distance", worst)
                .value("failures", failures)
                .tol(eps)
                .note("exact a in Gamma, exact rotation condition, initial vector within epsilon")
        })
        .collect()
}

fn family(p: &SuiteParams) -> Vec<CheckLine> {
    let (m, mp) = build_pair();
    let mut lines = Vec::new();
    for (w, data) in [(Which::M, &m), (Which::MPrime, &mp)] {
        let cg = reference_geodesic(w, data);
        let mut nullities = Vec::new();
        let mut svs = Vec::new();
        let mut base = None;
        for h in [1e-4, 1e-5, 1e-6] {
            match family_dimension(&cg, &data.alg, h, 1e-6) {
                Ok(fd) => {
                    nullities.push(fd.nullity);
                    svs.push(Value::from(fd.singular_values.clone()));
                    if h == 1e-5 {
                        base = Some(fd);
                    }
                }
                Err(e) => {
                    lines.push(
                        CheckLine::new(10, &format!("nullity_{}", w.label()), false)
                            .note(e.to_string()),
                    );
                }
            }
        }
        let pass = nullities.len() == 3 && nullities.iter().all(|&n| n == 9);
        lines.push(
            CheckLine::new(10, &format!("nullity_{}", w.label()), pass)
                .value("nullity_h_1e-4_1e-5_1e-6", nullities)
                .value("singular_values", Value::List(svs))
                .value("tau", cg.tau())
                .note("central differences of the closed-geodesic constraint map; threshold 1e-6 x largest"),
        );
        let Some(fd) = base else { continue };
        let beta = family_projection(&cg, &fd, p.tol.fd_step, y_coefficient);
        let bmax = beta.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        lines.push(
            CheckLine::new(
                10,
                &format!("y_coefficient_locked_{}", w.label()),
                bmax < 1e-6,
            )
            .value("max_projection", bmax)
            .tol(1e-6),
        );
        if w == Which::M {
            let fc = invariant_fiber_codim(&cg, &fd, p.tol.fd_step, 1e-6);
            let q = [Integral::QZi, Integral::QZj, Integral::QZk].map(|f| fc.max_projection(f));
            let qmax = q.iter().fold(0.0f64, |a, x| a.max(*x));
            let h1 = fc.max_projection(Integral::H1);
            lines.push(
                CheckLine::new(10, "invariant_fiber_codim_M", fc.rank == 1)
                    .value("rank", fc.rank)
                    .value("singular_values", fc.singular_values.clone()),
            );
            lines.push(
                CheckLine::new(10, "q_projections_M", qmax < 1e-6)
                    .value("max_projection", q.to_vec())
                    .tol(1e-6),
            );
            lines.push(
                CheckLine::new(10, "h1_projection_M", h1 > 1e-6)
                    .value("max_projection", h1)
                    .tol(1e-6),
            );
        }
    }
    lines
}

fn criteria_separation(p: &SuiteParams) -> Vec<CheckLine> {
    let m = pair_algebra(Which::M);
    let mp = pair_algebra(Which::MPrime);
    let hr_m = check_hr_presentation(
        &m,
        &PresentationSplit::coordinate(&m, 2, 2).expect("canonical split"),
    );
    let hr_mp = check_hr_presentation(
        &mp,
        &PresentationSplit::coordinate(&mp, 2, 2).expect("canonical split"),
    );
    let fail_at = hr_mp
        .first_failure()
        .map(|c| c.witness.clone().unwrap_or_else(|| c.name.clone()))
        .unwrap_or_default();
    let b_mp = butler_nonintegrability_sample(&mp, 10_000, p.seed).expect("valid algebra");
    let b_m = butler_nonintegrability_sample(&m, 10_000, p.seed).expect("valid algebra");
    vec![
        CheckLine::new(11, "hr_presentation_M_passes", hr_m.pass())
            .note("x = span{X_i, X_j}, y = span{Y_i, Y_j, Y_k}, c = Z_k"),
        CheckLine::new(11, "hr_presentation_Mprime_fails", !hr_mp.pass()).value("failure", fail_at),
        CheckLine::new(11, "butler_fraction_Mprime", b_mp.fraction >= 0.999)
            .value("fraction", b_mp.fraction)
            .value("regular_dim", b_mp.regular_dim)
            .tol(0.999)
            .note("evidence (sampled), 10^4 pairs"),
        CheckLine::new(11, "butler_fraction_M", b_m.fraction == 0.0)
            .value("fraction", b_m.fraction)
            .value("regular_dim", b_m.regular_dim)
            .note("evidence (sampled), 10^4 pairs"),
    ]
}

fn cih(p: &SuiteParams) -> Vec<CheckLine> {
    let (m, mp) = build_pair();
    let mut lines = Vec::new();
    for data in [&m, &mp] {
        match cih_certificate(data, p.cih_bound) {
            Ok(r) => {
                let mut ls = certificate_lines(12, &format!("{}_", data.name), &r.certificate);
                if let Some(first) = ls.first_mut() {
                    first
                        .values
                        .push(("enumerated".into(), Value::Int(r.enumerated as i64)));
                    first.values.push((
                        "distinct_projected".into(),
                        Value::Int(r.distinct.len() as i64),
                    ));
                }
                lines.extend(ls);
            }
            Err(e) => lines
                .push(CheckLine::new(12, &format!("{}_cih", data.name), false).note(e.to_string())),
        }
    }
    lines
}
