//! One runner per task. Input problems become [`InputError`]s; a computation
//! that stops with a verdict-level error is recorded in the report.

use regfman::fman::{
    check_fmanifold, check_frame_brackets, check_symmetry, check_symmetry_brackets,
    distance_from_identity, germ_isomorphism, standard_block, standard_model, symmetry_basis,
    FManifoldModel, FrameScope,
};
use regfman::frob::{
    frobenius_verdict, metric_from_potential, EulerMode, InvariantMetric, VerdictSettings,
};
use regfman::malgrange::{
    canonical_connection, check_integrality, check_universality_isomorphism,
    initial_condition_extend_with, integrate_chart_with, uniqueness_probe, validate_initial_data,
    DeformationSpec, ExtendSettings, FlowOrder, InitialData,
};
use regfman::report::{Residual, Residuals};
use regfman::saito::{
    birkhoff_flatness, check_saito_axioms, check_saito_metric_axioms, fmanifold_from_saito,
    frobenius_from_saito, BirkhoffConnection, SaitoBundle,
};
use regfman::{Complex64, Error};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::doc::*;
use crate::report::Report;

pub enum RunError {
    Input(InputError),
    Core(Error),
}

impl From<InputError> for RunError {
    fn from(e: InputError) -> Self {
        RunError::Input(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

type Run = Result<(), RunError>;

/// Errors that describe the input rather than the outcome of a check.
pub fn is_input_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::NoIsomorphism(_)
            | Error::ConstructionInconsistency(_)
            | Error::ChartDegeneracy(_)
            | Error::Singular(_)
            | Error::Solver(_)
    )
}

pub fn run(task: Task, payload: &Value, settings: &Settings) -> Input<Report> {
    let mut report = Report::new(task, settings);
    let outcome = match task {
        Task::VerifyFmanifold => verify_fmanifold(payload, settings, &mut report),
        Task::StandardModel => standard_model_task(payload, settings, &mut report),
        Task::VerifyFrobenius => verify_frobenius(payload, settings, &mut report),
        Task::Symmetries => symmetries(payload, settings, &mut report),
        Task::SaitoCheck => saito_check(payload, settings, &mut report),
        Task::BirkhoffFlatness => birkhoff(payload, settings, &mut report),
        Task::MalgrangeChart => malgrange_chart(payload, settings, &mut report),
        Task::ExtendMetric => extend_metric(payload, settings, &mut report),
        Task::GermIso => germ_iso(payload, settings, &mut report),
    };
    match outcome {
        Ok(()) => Ok(report),
        Err(RunError::Input(e)) => Err(e),
        Err(RunError::Core(e)) if is_input_error(&e) => {
            Err(InputError::new("payload", e.to_string()))
        }
        Err(RunError::Core(e)) => {
            report.fail(e.to_string());
            Ok(report)
        }
    }
}

fn raw_model(m: &FManifoldModel) -> Value {
    let n = m.dim();
    let structure: Vec<Vec<Vec<RawJet>>> = (0..n)
        .map(|i| (0..n).map(|j| raw_jet_vector(m.structure(i, j))).collect())
        .collect();
    serde_json::json!({
        "structure": structure,
        "unit": raw_jet_vector(m.unit()),
        "euler": raw_jet_vector(m.euler()),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelPayload {
    model: RawModel,
}

fn verify_fmanifold(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: ModelPayload = parse_payload(p)?;
    let model = model(&p.model, s.order, "payload.model")?;
    r.data("dim", model.dim());
    r.residuals("axioms", check_fmanifold(&model)?.residuals());
    r.residuals(
        "frame",
        check_frame_brackets(&model, FrameScope::Any)?.residuals(),
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumPayload {
    spectrum: Vec<RawBlock>,
}

fn standard_model_task(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: SpectrumPayload = parse_payload(p)?;
    let spec = spectrum(&p.spectrum, "payload.spectrum")?;
    let model = standard_model(&spec, s.order)?;
    r.residuals("axioms", check_fmanifold(&model)?.residuals());
    r.residuals(
        "frame",
        check_frame_brackets(&model, FrameScope::Any)?.residuals(),
    );
    r.data("spectrum", raw_spectrum(&spec));
    r.data("model", raw_model(&model));
    Ok(())
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawEuler {
    #[default]
    Skip,
    Solve,
    Fixed(RawComplex),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrobeniusPayload {
    blocks: Vec<usize>,
    /// `eta[α]` holds the coidentity components on block `α`.
    eta: Option<Vec<Vec<RawJet>>>,
    /// Potential `H`, with `η = dH`.
    potential: Option<RawJet>,
    /// Eigenvalue per block; defaults to `0, 1, 2, …`.
    eigenvalues: Option<Vec<RawComplex>>,
    #[serde(default)]
    euler: RawEuler,
}

fn verify_frobenius(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: FrobeniusPayload = parse_payload(p)?;
    if p.blocks.is_empty() || p.blocks.contains(&0) {
        return Err(InputError::new("payload.blocks", "block sizes must be positive").into());
    }
    let n: usize = p.blocks.iter().sum();
    let k = s.order;
    let metric = match (&p.eta, &p.potential) {
        (Some(eta), None) => {
            if eta.len() != p.blocks.len() {
                return Err(InputError::new(
                    "payload.eta",
                    format!(
                        "{} blocks of components for {} blocks",
                        eta.len(),
                        p.blocks.len()
                    ),
                )
                .into());
            }
            let mut comps = Vec::new();
            for (a, (blk, &m)) in eta.iter().zip(&p.blocks).enumerate() {
                if blk.len() != m {
                    return Err(InputError::new(
                        format!("payload.eta[{a}]"),
                        format!("{} components for a block of size {m}", blk.len()),
                    )
                    .into());
                }
                comps.push(
                    blk.iter()
                        .enumerate()
                        .map(|(i, j)| jet(j, n, k, &format!("payload.eta[{a}][{i}]")))
                        .collect::<Input<Vec<_>>>()?,
                );
            }
            InvariantMetric::new(p.blocks.clone(), comps)?
        }
        (None, Some(h)) => {
            // derivatives of H are trusted one order below H
            let h = jet(h, n, k + 1, "payload.potential")?;
            metric_from_potential(&h, &p.blocks)?.to_order(k)
        }
        _ => {
            return Err(
                InputError::new("payload", "give exactly one of `eta` and `potential`").into(),
            )
        }
    };
    let eigenvalues: Vec<Complex64> = match &p.eigenvalues {
        Some(e) if e.len() != p.blocks.len() => {
            return Err(InputError::new(
                "payload.eigenvalues",
                format!("{} eigenvalues for {} blocks", e.len(), p.blocks.len()),
            )
            .into())
        }
        Some(e) => e.iter().map(complex).collect(),
        None => (0..p.blocks.len())
            .map(|a| Complex64::new(a as f64, 0.0))
            .collect(),
    };
    let model = block_product(&eigenvalues, &p.blocks, k)?;
    let euler = match p.euler {
        RawEuler::Skip => EulerMode::Skip,
        RawEuler::Solve => EulerMode::Solve,
        RawEuler::Fixed(d) => EulerMode::Fixed(complex(&d)),
    };
    let settings = VerdictSettings {
        tol: s.tol,
        euler,
        anchors: s.anchors(),
    };
    let v = frobenius_verdict(&metric, &model, &settings)?;
    r.residuals("", v.residuals());
    r.data("frobenius", v.frobenius);
    r.data("potential_exists", v.potential_exists);
    r.data("curvature_agrees", v.curvature_agrees);
    r.data("t0_dependence", &v.t0_dependence);
    r.data("curvature", v.curvature.residuals());
    r.data("gamma_fast_path", &v.chain.fast_path_agreement);
    if let Some(e) = &v.euler {
        r.data("d", raw_complex(e.d));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SymmetryPayload {
    m: usize,
    #[serde(default)]
    eigenvalue: RawComplex,
}

fn symmetries(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: SymmetryPayload = parse_payload(p)?;
    if p.m < 2 {
        return Err(
            InputError::new("payload.m", "symmetries need a block of size at least 2").into(),
        );
    }
    let model = standard_block(complex(&p.eigenvalue), p.m, s.order);
    let basis = symmetry_basis(p.m, s.order);
    for (i, y) in basis.iter().enumerate() {
        r.residuals(
            &format!("y{}", i + 1),
            check_symmetry(&model, y)?.residuals(),
        );
    }
    r.residuals("", check_symmetry_brackets(p.m, s.order)?.residuals());
    r.data(
        "basis",
        basis.iter().map(raw_jet_vector).collect::<Vec<_>>(),
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SaitoPayload {
    phi: Vec<RawJetMatrix>,
    r0: RawJetMatrix,
    rinf: RawMatrix,
    gv: Option<RawMatrix>,
    section: Option<Vec<RawComplex>>,
    q: Option<RawComplex>,
}

fn saito_check(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: SaitoPayload = parse_payload(p)?;
    let m = p.phi.len();
    if m == 0 {
        return Err(
            InputError::new("payload.phi", "need one Higgs matrix per base coordinate").into(),
        );
    }
    let k = s.order;
    let phi = p
        .phi
        .iter()
        .enumerate()
        .map(|(i, x)| jet_matrix(x, m, k, &format!("payload.phi[{i}]")))
        .collect::<Input<Vec<_>>>()?;
    let rank = phi[0].rows();
    let r0 = jet_matrix(&p.r0, m, k, "payload.r0")?;
    let rinf = square(&p.rinf, Some(rank), "payload.rinf")?;
    let mut bundle = SaitoBundle::flat(phi, r0, rinf)?;
    if let Some(g) = &p.gv {
        bundle = bundle.with_metric(square(g, Some(rank), "payload.gv")?)?;
    }
    r.residuals("axioms", check_saito_axioms(&bundle)?.residuals());
    if bundle.gv.is_some() {
        r.residuals("metric", check_saito_metric_axioms(&bundle)?.residuals());
    }
    let Some(sec) = &p.section else {
        return Ok(());
    };
    if sec.len() != rank {
        return Err(InputError::new(
            "payload.section",
            format!("{} entries for a bundle of rank {rank}", sec.len()),
        )
        .into());
    }
    let sec = vector(sec);
    match (&p.q, bundle.gv.is_some()) {
        (Some(q), true) => {
            let f = frobenius_from_saito(&bundle, &sec, complex(q), s.tol)?;
            r.residuals("fmanifold", f.fmanifold.report.residuals());
            r.residuals("frobenius", f.residuals());
            r.data("conjugate", f.fmanifold.report.conjugate);
            r.data("model", raw_model(&f.fmanifold.model));
            r.data("gram", raw_jet_matrix(&f.gram));
        }
        (Some(_), false) => {
            return Err(InputError::new("payload.q", "a homogeneity exponent needs `gv`").into())
        }
        (None, _) => {
            let f = fmanifold_from_saito(&bundle, &sec)?;
            r.residuals("fmanifold", f.report.residuals());
            r.data("conjugate", f.report.conjugate);
            r.data("model", raw_model(&f.model));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BirkhoffPayload {
    b0: RawJetMatrix,
    binf: RawMatrix,
    c: Vec<RawJetMatrix>,
}

fn birkhoff(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: BirkhoffPayload = parse_payload(p)?;
    let m = p.c.len();
    if m == 0 {
        return Err(InputError::new("payload.c", "need one matrix per base coordinate").into());
    }
    let k = s.order;
    let b0 = jet_matrix(&p.b0, m, k, "payload.b0")?;
    let binf = square(&p.binf, Some(b0.rows()), "payload.binf")?;
    let c =
        p.c.iter()
            .enumerate()
            .map(|(i, x)| jet_matrix(x, m, k, &format!("payload.c[{i}]")))
            .collect::<Input<Vec<_>>>()?;
    let conn = BirkhoffConnection::new(b0, binf, c)?;
    r.residuals("", birkhoff_flatness(&conn)?.residuals());
    Ok(())
}

#[derive(Deserialize, Serialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawFlows {
    #[default]
    Ascending,
    Descending,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartPayload {
    b0o: RawMatrix,
    binf: RawMatrix,
    #[serde(default)]
    flows: RawFlows,
}

fn malgrange_chart(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: ChartPayload = parse_payload(p)?;
    let b0o = square(&p.b0o, None, "payload.b0o")?;
    let binf = square(&p.binf, Some(b0o.nrows()), "payload.binf")?;
    let spec = DeformationSpec::new(b0o, binf)?;
    let flows = match p.flows {
        RawFlows::Ascending => FlowOrder::Ascending,
        RawFlows::Descending => FlowOrder::Descending,
    };
    let chart = integrate_chart_with(&spec, s.order, flows)?;
    r.data("gamma", raw_jet_matrix(&chart.gamma));
    r.data("frame_rcond", chart.frame_rcond);
    r.residuals("integrality", check_integrality(&chart)?.residuals());
    r.residuals(
        "flatness",
        birkhoff_flatness(&canonical_connection(&chart)?)?.residuals(),
    );
    let u = check_universality_isomorphism(&chart)?;
    r.residual("", &u.chart_model.reexpansion);
    r.residuals("axioms", u.axioms.residuals());
    r.residual(
        "",
        &Residual::new("origin_spectrum_distance", u.origin_spectrum_distance, 0),
    );
    r.residuals("iso", u.iso.report.residuals());
    r.provenance.probe = Some(u.chart_model.probe.to_string());
    r.data("spectrum", raw_spectrum(&u.spectrum));
    r.data("model", raw_model(&u.chart_model.model));
    r.data("iso", raw_jet_vector(&u.iso.map));
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtendPayload {
    model: RawModel,
    gp: RawMatrix,
    vp: RawMatrix,
    d: RawComplex,
}

fn extend_metric(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: ExtendPayload = parse_payload(p)?;
    let k = s.order;
    // the extension needs the model trusted past the requested order
    let model = model(&p.model, k + 2, "payload.model")?;
    let n = model.dim();
    let data = InitialData {
        model,
        gp: square(&p.gp, Some(n), "payload.gp")?,
        vp: square(&p.vp, Some(n), "payload.vp")?,
        d: complex(&p.d),
    };
    let validation = validate_initial_data(&data)?;
    if !validation.passes(s.tol) {
        let mut bad: Vec<String> = validation
            .residuals()
            .into_iter()
            .filter(|x| x.value.is_nan() || x.value > s.tol)
            .map(|x| format!("{} = {:.3e}", x.name, x.value))
            .collect();
        if !validation.regular {
            bad.insert(0, "U is not regular at the origin".into());
        }
        if validation.gp_rcond.is_nan()
            || validation.gp_rcond <= regfman::malgrange::METRIC_RCOND_MIN
        {
            bad.push(format!(
                "g_p is degenerate (rcond {:.3e})",
                validation.gp_rcond
            ));
        }
        return Err(InputError::new(
            "payload",
            format!("invalid initial data: {}", bad.join(", ")),
        )
        .into());
    }
    r.residuals("validation", validation.residuals());
    let mut es = ExtendSettings::new(k);
    // every residual is judged below against the real tolerance
    es.tol = f64::INFINITY;
    es.probes.seed = s.seed;
    let ext = initial_condition_extend_with(&data, &es)?;
    let rep = &ext.report;
    for x in [
        &rep.origin,
        &rep.euler_derivative,
        &rep.euler_rescaling,
        &rep.invariance,
        &rep.b0o_symmetric,
        &rep.binf_skew,
        &rep.chart_symmetric,
    ] {
        r.residual("", x);
    }
    r.residuals("", rep.curvature.residuals());
    r.residuals("", rep.block_form.clone());
    if let Some(v) = &rep.verdict {
        r.residuals("verdict", v.residuals());
    }
    r.residuals("fibre", rep.saito_metric.residuals());
    r.residuals("iso", rep.iso.residuals());
    r.residual("", &uniqueness_probe(&data, k)?);
    r.provenance.probe = Some(ext.report.probe.to_string());
    r.note(ext.report.sign_convention);
    r.data("gram", raw_jet_matrix(&ext.gram));
    r.data("g0", raw_matrix(&ext.g0));
    if let Some(v) = &ext.report.verdict {
        r.data("curvature_agrees", v.curvature_agrees);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IsoPayload {
    source: RawModel,
    target: RawModel,
}

fn germ_iso(p: &Value, s: &Settings, r: &mut Report) -> Run {
    let p: IsoPayload = parse_payload(p)?;
    let a = model(&p.source, s.order, "payload.source")?;
    let b = model(&p.target, s.order, "payload.target")?;
    if a.dim() != b.dim() {
        return Err(InputError::new(
            "payload.target",
            format!(
                "dimension {} against a source of dimension {}",
                b.dim(),
                a.dim()
            ),
        )
        .into());
    }
    let iso = germ_isomorphism(&a, &b, s.order)?;
    r.residuals("", iso.report.residuals());
    r.data("map", raw_jet_vector(&iso.map));
    r.data("distance_from_identity", distance_from_identity(&iso.map));
    Ok(())
}
