use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use locus_core::exactnum::Series;
use locus_core::genera::{
    genus_value, witten_genus_qexp, CharacteristicSeries, GenusError, ManifoldData,
};
use locus_core::liegroups::{
    build_root_system, cutoff_for_tolerance, heat_kernel, LieError, RootSystemData, RootType, TorusElement,
};
use locus_core::mirror::{
    cy3_pipeline, local_conifold, quintic_pipeline, toric_identity_check, BundleSpec, Convention, GwSeries,
    IdentityReport, MirrorError, ToricTarget,
};
use locus_core::moduli::{
    holonomy_integral_mc, holonomy_integral_series, intersection_number, piecewise_poly_fit, volume_limit,
    volume_series, InsertionPolynomial, ModuliError, ModuliQuery, Regularization, RegularizedSum,
};

use crate::config::{
    GenusConfig, GenusKind, HeatConfig, Holonomy, McConfig, MirrorConfig, ModuliConfig, ToricConfig,
};
use crate::CliError;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub cutoff: Option<f64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
}

impl Overrides {
    /// Reject flags the subcommand has no use for.
    pub fn allow(&self, command: &str, order: bool, cutoff: bool, tol: bool, seed: bool, convention: bool) -> Result<(), CliError> {
        let given = [
            ("--order", self.order.is_some(), order),
            ("--cutoff", self.cutoff.is_some(), cutoff),
            ("--tol", self.tol.is_some(), tol),
            ("--seed", self.seed.is_some(), seed),
            ("--convention", self.convention.is_some(), convention),
        ];
        match given.iter().find(|(_, set, ok)| *set && !ok) {
            Some((flag, _, _)) => Err(CliError::Schema(format!("{flag} does not apply to `{command}`"))),
            None => Ok(()),
        }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub csv: Vec<(String, String)>,
    pub provenance: Value,
    pub converged: bool,
    pub summary: String,
}

fn lie_error(e: LieError) -> CliError {
    match e {
        LieError::SingularLimit { .. } | LieError::CutoffInsufficient { .. } => CliError::NonConvergent(e.to_string()),
        _ => CliError::Schema(e.to_string()),
    }
}

fn moduli_error(e: ModuliError) -> CliError {
    match e {
        ModuliError::Lie(l) => lie_error(l),
        ModuliError::NonConvergent { .. }
        | ModuliError::FitFailed { .. }
        | ModuliError::SymbolicMismatch { .. }
        | ModuliError::StepUnderflow(_) => CliError::NonConvergent(e.to_string()),
        ModuliError::Unsupported(_) => CliError::Compute(e.to_string()),
        _ => CliError::Schema(e.to_string()),
    }
}

fn mirror_error(e: MirrorError) -> CliError {
    match e {
        MirrorError::InvalidTarget(_)
        | MirrorError::InvalidBundle(_)
        | MirrorError::DegreeMismatch { .. }
        | MirrorError::NotCalabiYau
        | MirrorError::BadOrder { .. }
        | MirrorError::Unsupported(_) => CliError::Schema(e.to_string()),
        _ => CliError::Compute(e.to_string()),
    }
}

fn genus_error(e: GenusError) -> CliError {
    match e {
        GenusError::Series(_) | GenusError::Inconsistent | GenusError::Underdetermined => {
            CliError::Compute(e.to_string())
        }
        _ => CliError::Schema(e.to_string()),
    }
}

fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    BigRational::from_str(s.trim()).map_err(|_| CliError::Schema(format!("`{s}` is not a rational number")))
}

fn series_strings(s: &Series<BigRational>, len: usize) -> Vec<String> {
    (0..len).map(|e| s.coeff_or_zero(e).to_string()).collect()
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn root_system(root_type: &str, rank: usize) -> Result<Arc<RootSystemData>, CliError> {
    let t = RootType::from_str(root_type).map_err(CliError::Schema)?;
    build_root_system(t, rank).map(Arc::new).map_err(lie_error)
}

fn torus(rs: &RootSystemData, h: &Holonomy) -> Result<TorusElement, CliError> {
    match h {
        Holonomy::Angle(theta) if rs.root_type() == RootType::A && rs.rank() == 1 => Ok(TorusElement::a1_angle(*theta)),
        Holonomy::Angle(_) => Err(CliError::Schema("angle holonomies are only defined for A1; give coordinates".into())),
        Holonomy::Coords(c) if c.len() == rs.ambient_dim() => Ok(TorusElement::new(c.clone())),
        Holonomy::Coords(c) => Err(CliError::Schema(format!(
            "holonomy has {} coordinates, expected {}",
            c.len(),
            rs.ambient_dim()
        ))),
    }
}

pub fn genus(cfg: &mut GenusConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    ov.allow("genus", true, false, false, false, false)?;
    if let Some(o) = ov.order {
        cfg.q_order = o;
    }
    let numbers: BTreeMap<Vec<u32>, BigInt> =
        cfg.pontryagin.iter().map(|p| (p.partition.clone(), BigInt::from(p.value))).collect();
    let m = ManifoldData::new(cfg.dimension, numbers, cfg.spin).map_err(genus_error)?;
    let x_order = 2 * m.k() as usize + 1;
    let (value, q_series) = match cfg.genus {
        GenusKind::AHat => (genus_value(&m, &CharacteristicSeries::a_hat(x_order)).map_err(genus_error)?, None),
        GenusKind::L => (genus_value(&m, &CharacteristicSeries::l_genus(x_order)).map_err(genus_error)?, None),
        GenusKind::Custom => {
            let coeffs = cfg.coefficients.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            let q = CharacteristicSeries::from_coefficients(coeffs).map_err(genus_error)?;
            (genus_value(&m, &q).map_err(genus_error)?, None)
        }
        GenusKind::Witten => {
            if cfg.q_order == 0 {
                return Err(CliError::Schema("q_order must be positive".into()));
            }
            let w = witten_genus_qexp(&m, cfg.q_order, cfg.normalization).map_err(genus_error)?;
            (w.coeff_or_zero(0), Some(series_strings(&w, cfg.q_order)))
        }
    };
    let summary = match &q_series {
        Some(q) => format!("Witten genus: {}", q.join(", ")),
        None => format!("genus value: {value}"),
    };
    Ok(Outcome {
        result: json!({ "genus_value": value.to_string(), "q_series": q_series }),
        csv: Vec::new(),
        provenance: json!({ "exact": true }),
        converged: true,
        summary,
    })
}

pub fn heatkernel(cfg: &mut HeatConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    ov.allow("heatkernel", false, true, true, false, false)?;
    if let Some(c) = ov.cutoff {
        cfg.cutoff = Some(c);
    }
    if let Some(t) = ov.tol {
        cfg.tol = t;
    }
    let rs = root_system(&cfg.root_type, cfg.rank)?;
    let cutoff = match cfg.cutoff {
        Some(c) => c,
        None => cutoff_for_tolerance(&rs, cfg.t, cfg.tol).map_err(lie_error)?,
    };
    let mut rows = Vec::new();
    let mut csv = String::from("point,value,tail_bound\n");
    let mut worst_tail = 0.0f64;
    for (i, p) in cfg.points.iter().enumerate() {
        let x = torus(&rs, p)?;
        let v = heat_kernel(&rs, cfg.t, &x, cutoff, None).map_err(lie_error)?;
        worst_tail = worst_tail.max(v.tail_bound);
        csv.push_str(&format!("{i},{:.17e},{:.3e}\n", v.value, v.tail_bound));
        rows.push(json!({ "point": x.coords(), "value": v.value, "tail_bound": v.tail_bound, "terms": v.terms }));
    }
    let converged = worst_tail <= cfg.tol;
    Ok(Outcome {
        summary: format!("{} heat-kernel values, cutoff {cutoff}, tail bound {worst_tail:.3e}", rows.len()),
        result: json!({ "t": cfg.t, "cutoff": cutoff, "values": rows }),
        csv: vec![("values.csv".into(), csv)],
        provenance: json!({ "cutoff": cutoff, "tail_bound": worst_tail, "tol": cfg.tol, "converged": converged }),
        converged,
    })
}

fn moduli_query(cfg: &ModuliConfig, reg: Regularization) -> Result<ModuliQuery, CliError> {
    let rs = root_system(&cfg.root_type, cfg.rank)?;
    let holonomies = cfg.holonomies.iter().map(|h| torus(&rs, h)).collect::<Result<Vec<_>, _>>()?;
    let insertion = if cfg.insertion.is_empty() {
        InsertionPolynomial::one(rs.rank())
    } else {
        InsertionPolynomial::new(rs.rank(), cfg.insertion.iter().map(|t| (t.exponents.clone(), t.coeff)).collect())
            .map_err(moduli_error)?
    };
    ModuliQuery::new(rs, cfg.genus, holonomies, insertion, reg).map_err(moduli_error)
}

fn regularization(cfg: &ModuliConfig) -> Result<Regularization, CliError> {
    let direction = match &cfg.direction {
        Some(h) => {
            let rs = root_system(&cfg.root_type, cfg.rank)?;
            Some(torus(&rs, h)?)
        }
        None => None,
    };
    Ok(Regularization {
        t_grid: cfg.t_grid.clone(),
        casimir_cutoff: cfg.casimir_cutoff,
        eps_grid: cfg.eps_grid.clone(),
        extrapolation_order: cfg.extrapolation_order,
        tol: cfg.tol,
        direction,
    })
}

fn apply_moduli_overrides(command: &str, cfg: &mut ModuliConfig, ov: &Overrides) -> Result<(), CliError> {
    ov.allow(command, true, true, true, false, false)?;
    if let Some(o) = ov.order {
        cfg.extrapolation_order = o;
    }
    if let Some(c) = ov.cutoff {
        cfg.casimir_cutoff = Some(c);
    }
    if let Some(t) = ov.tol {
        cfg.tol = t;
    }
    Ok(())
}

fn partials_csv(partials: &[(f64, f64)]) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in partials {
        s.push_str(&format!("{t:.17e},{v:.17e}\n"));
    }
    s
}

fn regularized_json(r: &RegularizedSum) -> Value {
    json!({
        "value": r.extrapolated_value,
        "inner_value": r.inner_value,
        "prefactor": r.prefactor,
        "error_estimate": r.error_estimate,
        "tail_bound": r.tail_bound,
        "converged": r.converged,
        "limit_order_deviation": r.limit_order_deviation,
        "cross_check": r.cross_check,
    })
}

fn regularized_provenance(cfg: &ModuliConfig, r: &RegularizedSum) -> Value {
    json!({
        "t_grid": r.partial_values.iter().map(|p| p.0).collect::<Vec<_>>(),
        "casimir_cutoff": cfg.casimir_cutoff,
        "tail_bound": r.tail_bound,
        "error_estimate": r.error_estimate,
        "converged": r.converged,
    })
}

pub fn moduli_volume(cfg: &mut ModuliConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    apply_moduli_overrides("moduli-volume", cfg, ov)?;
    if cfg.t_grid.len() == 1 {
        return single_point_volume(cfg);
    }
    let q = moduli_query(cfg, regularization(cfg)?)?;
    let lim = volume_limit(&q).map_err(moduli_error)?;
    let mut csv = vec![("partials.csv".to_string(), partials_csv(&lim.partial_values))];
    let mut result = regularized_json(&lim);
    let mut converged = lim.converged;
    if let Some(fit) = &cfg.fit {
        if fit.points < 2 || !(fit.theta_end > fit.theta_start) {
            return Err(CliError::Schema("fit needs at least two points on an increasing θ range".into()));
        }
        let direction = torus(&q.rs, &fit.direction)?;
        let step = (fit.theta_end - fit.theta_start) / (fit.points - 1) as f64;
        let thetas: Vec<f64> = (0..fit.points).map(|k| fit.theta_start + step * k as f64).collect();
        match piecewise_poly_fit(&q, &direction, &thetas, fit.tol) {
            Ok((pieces, values)) => {
                let mut s = String::from("theta,value\n");
                for (t, v) in thetas.iter().zip(&values) {
                    s.push_str(&format!("{t:.17e},{v:.17e}\n"));
                }
                csv.push(("fit.csv".into(), s));
                result["fit"] = json!(pieces
                    .iter()
                    .map(|p| json!({
                        "start": p.start,
                        "end": p.end,
                        "degree": p.degree,
                        "residual": p.residual,
                        "coefficients": p.coefficients_in_x(),
                    }))
                    .collect::<Vec<_>>());
            }
            Err(e) => {
                converged = false;
                result["fit"] = json!({ "error": e.to_string() });
            }
        }
    }
    Ok(Outcome {
        summary: format!(
            "volume {:.12} (error {:.2e}, converged {})",
            lim.extrapolated_value, lim.error_estimate, lim.converged
        ),
        provenance: regularized_provenance(cfg, &lim),
        result,
        csv,
        converged,
    })
}

/// A one-point schedule cannot be extrapolated: report the point and fail.
fn single_point_volume(cfg: &ModuliConfig) -> Result<Outcome, CliError> {
    let t = cfg.t_grid[0];
    let mut reg = regularization(cfg)?;
    reg.t_grid = vec![t, t / 2.0];
    let q = moduli_query(cfg, reg)?;
    let (full, series, prefactor, tail) = volume_series(&q, t).map_err(moduli_error)?;
    Ok(Outcome {
        summary: format!("t-grid has one point; cannot extrapolate (value at t = {t}: {full})"),
        result: json!({
            "error": "t-grid has a single point; extrapolation needs at least two",
            "partial": { "t": t, "value": full, "series": series, "prefactor": prefactor, "tail_bound": tail },
        }),
        csv: vec![("partials.csv".into(), partials_csv(&[(t, series)]))],
        provenance: json!({ "t_grid": [t], "tail_bound": tail, "converged": false }),
        converged: false,
    })
}

pub fn moduli_intersect(cfg: &mut ModuliConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    apply_moduli_overrides("moduli-intersect", cfg, ov)?;
    if cfg.fit.is_some() {
        return Err(CliError::Schema("`fit` applies to moduli-volume only".into()));
    }
    let q = moduli_query(cfg, regularization(cfg)?)?;
    let r = intersection_number(&q).map_err(moduli_error)?;
    Ok(Outcome {
        summary: format!(
            "inner limit {:.12}, pairing {:.12e} (error {:.2e}, converged {})",
            r.inner_value, r.extrapolated_value, r.error_estimate, r.converged
        ),
        result: regularized_json(&r),
        csv: vec![("partials.csv".into(), partials_csv(&r.partial_values))],
        provenance: regularized_provenance(cfg, &r),
        converged: r.converged,
    })
}

pub fn moduli_mc(cfg: &mut McConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    ov.allow("moduli-mc", false, false, false, true, false)?;
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    let rs = root_system("A", 1)?;
    let c = torus(&rs, &cfg.holonomy)?;
    let mut rows = Vec::new();
    let mut csv = String::from("t,estimate,standard_error,series,z\n");
    let mut agree = true;
    for &t in &cfg.t_values {
        let mc = holonomy_integral_mc(&rs, cfg.genus, &c, t, cfg.samples, cfg.seed, cfg.centre).map_err(moduli_error)?;
        let series = holonomy_integral_series(&rs, cfg.genus, &c, t, cfg.centre).map_err(moduli_error)?;
        let z = (mc.estimate - series) / mc.standard_error;
        agree &= z.abs() <= cfg.sigmas;
        csv.push_str(&format!("{t},{:.17e},{:.17e},{:.17e},{z:.4}\n", mc.estimate, mc.standard_error, series));
        rows.push(json!({
            "t": t,
            "estimate": mc.estimate,
            "standard_error": mc.standard_error,
            "samples": mc.samples,
            "series": series,
            "z": z,
        }));
    }
    Ok(Outcome {
        summary: format!("{} Monte Carlo estimates; agreement within {} SE: {agree}", rows.len(), cfg.sigmas),
        result: json!({ "estimates": rows, "agree": agree }),
        csv: vec![("estimates.csv".into(), csv)],
        provenance: json!({ "seed": cfg.seed, "samples": cfg.samples, "converged": agree }),
        converged: agree,
    })
}

fn apply_mirror_overrides(command: &str, order: &mut usize, convention: &mut Convention, ov: &Overrides) -> Result<(), CliError> {
    ov.allow(command, true, false, false, false, true)?;
    if let Some(o) = ov.order {
        *order = o;
    }
    if let Some(c) = ov.convention {
        *convention = c;
    }
    Ok(())
}

fn table(gw: &GwSeries) -> String {
    let mut s = format!("{:>3}  {:>28}  {:>20}\n", "d", "K_d", "n_d");
    for (i, (k, n)) in gw.invariants.iter().zip(&gw.instanton_numbers).enumerate() {
        s.push_str(&format!("{:>3}  {:>28}  {:>20}\n", i + 1, k.to_string(), n.to_string()));
    }
    s
}

fn mirror_outcome(gw: &GwSeries, report: Option<&IdentityReport>) -> Outcome {
    let mut csv = String::from("d,K_d,n_d\n");
    for (i, (k, n)) in gw.invariants.iter().zip(&gw.instanton_numbers).enumerate() {
        csv.push_str(&format!("{},{k},{n}\n", i + 1));
    }
    let identity = report.map(|r| {
        json!({
            "passing_convention": r.passing.map(|c| c.to_string()),
            "residual_zero": r.residuals.iter().map(|(c, _)| (c.to_string(), r.residual_is_zero(*c))).collect::<BTreeMap<_, _>>(),
        })
    });
    let violations = gw.integrality_violations();
    let mut summary = table(gw);
    if !violations.is_empty() {
        summary.push_str(&format!("warning: non-integral instanton numbers at degrees {violations:?}\n"));
    }
    if let Some(r) = report {
        summary.push_str(&format!(
            "identity check: {}\n",
            r.passing.map_or("no convention balances".to_string(), |c| format!("balances in the `{c}` convention"))
        ));
    }
    Outcome {
        result: json!({
            "K_d": strings(&gw.invariants),
            "n_d": strings(&gw.instanton_numbers),
            "mirror_map_coefficients": strings(&gw.mirror_map),
            "inverse_mirror_map_coefficients": strings(&gw.inverse_mirror_map),
            "f0": strings(&gw.f0),
            "kappa": gw.kappa.to_string(),
            "convention": gw.convention.to_string(),
            "integrality_violations": violations,
            "identity_check": identity,
        }),
        csv: vec![("invariants.csv".into(), csv)],
        provenance: json!({ "q_order": gw.q_order, "exact": true, "converged": true }),
        converged: true,
        summary,
    }
}

fn run_mirror(target: &ToricTarget, bundle: &BundleSpec, cfg: &MirrorConfig, gw: GwSeries) -> Result<Outcome, CliError> {
    let report = if cfg.identity_check {
        Some(toric_identity_check(target, bundle, &gw.invariants, gw.q_order).map_err(mirror_error)?)
    } else {
        None
    };
    Ok(mirror_outcome(&gw, report.as_ref()))
}

pub fn mirror_quintic(cfg: &mut MirrorConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    apply_mirror_overrides("mirror-quintic", &mut cfg.order, &mut cfg.convention, ov)?;
    let target = ToricTarget::projective_space(4);
    let bundle = BundleSpec::quintic();
    let gw = if cfg.convention == Convention::Plus {
        quintic_pipeline(cfg.order)
    } else {
        if cfg.order < 2 {
            return Err(CliError::Schema("the quintic pipeline needs order ≥ 2".into()));
        }
        cy3_pipeline(&target, &bundle, cfg.order, cfg.convention)
    }
    .map_err(mirror_error)?;
    run_mirror(&target, &bundle, cfg, gw)
}

pub fn mirror_local(cfg: &mut MirrorConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    apply_mirror_overrides("mirror-local", &mut cfg.order, &mut cfg.convention, ov)?;
    let target = ToricTarget::local_p1();
    let bundle = BundleSpec::conifold();
    let gw = if cfg.convention == Convention::Plus {
        local_conifold(cfg.order)
    } else {
        cy3_pipeline(&target, &bundle, cfg.order, cfg.convention)
    }
    .map_err(mirror_error)?;
    run_mirror(&target, &bundle, cfg, gw)
}

pub fn mirror_toric(cfg: &mut ToricConfig, ov: &Overrides) -> Result<Outcome, CliError> {
    apply_mirror_overrides("mirror-toric", &mut cfg.order, &mut cfg.convention, ov)?;
    let pairing = cfg
        .pairing
        .iter()
        .map(|p| Ok((p.monomial.clone(), parse_rational(&p.value)?)))
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    let target = ToricTarget::new(
        cfg.name.clone(),
        cfg.kahler_rank,
        cfg.divisors.clone(),
        cfg.relations.clone(),
        cfg.top_degree,
        pairing,
    )
    .map_err(mirror_error)?;
    let bundle = BundleSpec::new(&target, cfg.convex.clone(), cfg.concave.clone()).map_err(mirror_error)?;
    let gw = cy3_pipeline(&target, &bundle, cfg.order, cfg.convention).map_err(mirror_error)?;
    let mc = MirrorConfig { order: cfg.order, convention: cfg.convention, identity_check: cfg.identity_check };
    run_mirror(&target, &bundle, &mc, gw)
}
