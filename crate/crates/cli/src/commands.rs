//! Subcommand implementations; each returns a JSON report and a short
//! human-readable summary.

use mumhodge::bigcomplex::kappa;
use mumhodge::continuation::{
    cross_mum_invariants, global_monodromy, integral_frame, recognize_matrix, ContinuationError, CrossMumOptions, TransportMatrix,
};
use mumhodge::lmhs::{mirror_to_hodge, torelli_distinguish, LmhsPoint, MirrorInvariants};
use mumhodge::picard_fuchs::{analyze_singular_points, frobenius_basis, mirror_map, PFOperator, SingularLocation};
use mumhodge::rational::{format_rational, int, parse_rational};
use mumhodge::symplectic::{
    act_weight_stabilizer, check_integrality_polarization, invariants, log_unipotent, normal_form, NormalForm, WeightStabilizerElement,
};
use mumhodge::scalar::ComplexField;
use mumhodge::{BigComplex, Mat4, Rational, RationalSeries};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::document::{MumRecord, OperatorDocument, RecordsDocument};
use crate::error::CliError;
use crate::report::*;

/// Flags shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub order: usize,
    pub precision_bits: u32,
    pub max_precision_bits: u32,
    pub denominator_bound: u64,
    pub base_point: Option<String>,
    /// Number of series coefficients echoed in reports.
    pub terms: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { order: 50, precision_bits: 128, max_precision_bits: 2048, denominator_bound: 1_000_000, base_point: None, terms: 8 }
    }
}

impl RunOptions {
    fn bound(&self) -> BigInt {
        BigInt::from(self.denominator_bound)
    }

    fn base(&self) -> Result<Option<BigComplex>, CliError> {
        self.base_point.as_deref().map(|s| parse_point(s, self.precision_bits + 64)).transpose()
    }

    fn cross_options(&self, mirror_invariants: Option<MirrorInvariants>) -> Result<CrossMumOptions, CliError> {
        if self.denominator_bound == 0 {
            return Err(CliError::Input("denominator bound must be positive".into()));
        }
        Ok(CrossMumOptions {
            precision: self.precision_bits,
            max_precision: self.max_precision_bits.max(self.precision_bits),
            denominator_bound: self.bound(),
            mirror_invariants,
            base: self.base()?,
        })
    }

    fn settings(&self) -> Settings {
        Settings {
            order: self.order,
            precision_bits: self.precision_bits,
            max_precision_bits: self.max_precision_bits,
            denominator_bound: self.denominator_bound.to_string(),
            base_point: self.base_point.clone(),
        }
    }
}

/// Report, summary and a failure to signal after the report is written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(report: impl Serialize, summary: String) -> Self {
        Outcome { report: to_value(report), summary, failure: None }
    }
}

fn to_value(report: impl Serialize) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

/// `"p/q"` or a decimal such as `"-0.125"`, exactly.
pub fn parse_exact(s: &str) -> Result<Rational, CliError> {
    let t = s.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || !digits.chars().all(|c| c.is_ascii_digit()) || (digits.is_empty() && frac.is_empty()) {
            return Err(CliError::Parse(format!("malformed number {s:?}")));
        }
        let num: BigInt = format!("{}{frac}", if digits.is_empty() { "0" } else { digits }).parse().expect("digits");
        let q = Rational::new(num, BigInt::from(10u32).pow(frac.len() as u32));
        return Ok(if negative { -q } else { q });
    }
    parse_rational(t).map_err(|e| CliError::Parse(e.to_string()))
}

/// `"re,im"` or `"re"`.
pub fn parse_point(s: &str, prec: u32) -> Result<BigComplex, CliError> {
    let (re, im) = match s.split_once(',') {
        Some((a, b)) => (parse_exact(a)?, parse_exact(b)?),
        None => (parse_exact(s)?, int(0)),
    };
    Ok(BigComplex::from_rationals(prec, &re, &im))
}

fn parse_list<const N: usize>(s: &str, what: &str) -> Result<[Rational; N], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(CliError::Parse(format!("{what} needs {N} comma-separated entries, got {:?}", s)));
    }
    let values = parts.iter().map(|p| parse_exact(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(values.try_into().expect("length checked"))
}

fn to_i64(q: &Rational, what: &str) -> Result<i64, CliError> {
    if !q.is_integer() {
        return Err(CliError::Parse(format!("{what} must be an integer")));
    }
    i64::try_from(q.to_integer()).map_err(|_| CliError::Parse(format!("{what} out of range")))
}

fn series_terms(s: &RationalSeries, n: usize) -> Vec<String> {
    s.coeffs().iter().take(n).map(format_rational).collect()
}

fn render_series(coeffs: &[String], var: &str) -> String {
    let mut parts = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c == "0" {
            continue;
        }
        parts.push(match k {
            0 => c.clone(),
            1 => format!("{c}*{var}"),
            _ => format!("{c}*{var}^{k}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        format!("{} + O({var}^{})", parts.join(" + "), coeffs.len())
    }
}

fn frobenius_summary(op: &PFOperator, opts: &RunOptions) -> Result<(FrobeniusSummary, MirrorMapSummary), CliError> {
    let fb = frobenius_basis(op, opts.order, &int(0)).map_err(|e| CliError::Input(e.to_string()))?;
    let n = opts.terms.min(opts.order + 1);
    let psi = fb.psi_all();
    let frob = FrobeniusSummary {
        order: opts.order,
        psi3: series_terms(&psi[0], n),
        psi2: series_terms(&psi[1], n),
        psi1: series_terms(&psi[2], n),
        psi0: series_terms(&psi[3], n),
    };
    let mm = mirror_map(&fb, &int(1)).map_err(|e| CliError::Input(e.to_string()))?;
    let map = MirrorMapSummary {
        order: opts.order,
        a: "1".into(),
        q_of_z: series_terms(&mm.q_of_z, n),
        z_of_q: series_terms(&mm.z_of_q, n),
    };
    Ok((frob, map))
}

pub fn frobenius(doc: &OperatorDocument, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (frob, _) = frobenius_summary(&doc.operator()?, opts)?;
    let summary = format!(
        "psi3 = {}\npsi2 = {}\npsi1 = {}\npsi0 = {}",
        render_series(&frob.psi3, "z"),
        render_series(&frob.psi2, "z"),
        render_series(&frob.psi1, "z"),
        render_series(&frob.psi0, "z")
    );
    Ok(Outcome::ok(json!({ "schema_version": SCHEMA_VERSION, "operator": doc.name, "frobenius": frob }), summary))
}

pub fn mirror_map_cmd(doc: &OperatorDocument, opts: &RunOptions, a: &str) -> Result<Outcome, CliError> {
    let op = doc.operator()?;
    let a = parse_exact(a)?;
    if a == int(0) {
        return Err(CliError::Input("a must be nonzero".into()));
    }
    let fb = frobenius_basis(&op, opts.order, &int(0)).map_err(|e| CliError::Input(e.to_string()))?;
    let mm = mirror_map(&fb, &a).map_err(|e| CliError::Input(e.to_string()))?;
    let n = opts.terms.min(opts.order + 1);
    let map = MirrorMapSummary {
        order: opts.order,
        a: format_rational(&a),
        q_of_z: series_terms(&mm.q_of_z, n),
        z_of_q: series_terms(&mm.z_of_q, n),
    };
    let summary = format!("q(z) = {}\nz(q) = {}", render_series(&map.q_of_z, "z"), render_series(&map.z_of_q, "q"));
    Ok(Outcome::ok(json!({ "schema_version": SCHEMA_VERSION, "operator": doc.name, "mirror_map": map }), summary))
}

fn raw_loop(location: &SingularLocation, t: &TransportMatrix) -> RawLoop {
    RawLoop { location: location.to_string(), precision: t.precision, log2_error: t.log2_error, matrix: t.render(25) }
}

pub fn monodromy(doc: &OperatorDocument, opts: &RunOptions) -> Result<Outcome, CliError> {
    let op = doc.operator()?;
    let g = global_monodromy(&op, opts.base()?.as_ref(), opts.precision_bits)?;
    let bound = opts.bound();
    let loops: Vec<Value> = g
        .loops
        .iter()
        .map(|l| {
            let recognized = recognize_matrix(&l.matrix, &bound).map(|r| r.entries.map(|row| row.map(|e| e.to_string())));
            json!({ "raw": raw_loop(&l.location, &l.matrix), "recognized": recognized })
        })
        .collect();
    let mut summary = format!(
        "base point {}; {} loops; |T_1 ... T_n T_inf - I| = 2^{:.1}",
        g.system.base.to_string_digits(12),
        g.loops.len(),
        g.log2_residual
    );
    for l in &g.loops {
        summary.push_str(&format!("\n  loop around {}: |T - I| = {:.3e}", l.location, l.matrix.distance_to_identity()));
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "operator": doc.name,
        "frame": "frobenius basis at z = 0",
        "precision_bits": opts.precision_bits,
        "base_point": g.system.base.to_string_digits(20),
        "cut_angle": g.system.cut_angle,
        "loops": loops,
        "log2_global_residual": g.log2_residual,
    });
    Ok(Outcome::ok(report, summary))
}

/// Input of the `normal-form` subcommand.
#[derive(Debug, Clone)]
pub enum NormalFormInput {
    /// Rows of an integral symplectic unipotent matrix, `;`-separated.
    Matrix(String),
    /// `a,b,e,f`, optionally sign-flipped, then acted on by a stabilizer
    /// element `p,q,r,s`.
    Quadruple { nf: String, sign_flip: bool, stabilizer: Option<String> },
    /// `deg,c2h,chi`.
    Mirror(String),
}

fn nf_json(nf: &NormalForm) -> Result<Value, CliError> {
    let check = check_integrality_polarization(nf);
    let inv = if check.passes() { Some(invariants(nf).map_err(|e| CliError::Input(e.to_string()))?) } else { None };
    Ok(json!({
        "normal_form": nf,
        "integrality_and_polarization": { "passes": check.passes(), "failures": check.failures() },
        "invariants": inv,
        "f_over_2a": format_rational(&nf.f_over_2a()),
        "e_over_a": format_rational(&nf.e_over_a()),
    }))
}

fn nf_summary(nf: &NormalForm) -> String {
    match invariants(nf) {
        Ok(inv) if check_integrality_polarization(nf).passes() => format!("{nf}; invariants {inv}"),
        _ => format!("{nf}; integrality or polarization fails"),
    }
}

pub fn normal_form_cmd(input: &NormalFormInput) -> Result<Outcome, CliError> {
    match input {
        NormalFormInput::Matrix(text) => {
            let rows: Vec<&str> = text.split(';').collect();
            if rows.len() != 4 {
                return Err(CliError::Parse("matrix needs 4 rows separated by ';'".into()));
            }
            let parsed = rows.iter().map(|r| parse_list::<4>(r, "matrix row")).collect::<Result<Vec<_>, _>>()?;
            let t = Mat4::from_rows(parsed.try_into().expect("four rows"));
            let n = log_unipotent(&t).map_err(|e| CliError::Input(e.to_string()))?;
            let (nf, a) = normal_form(&t).map_err(|e| CliError::Input(e.to_string()))?;
            let mut report = nf_json(&nf)?;
            report["adapted_basis"] = json!(a.rows().clone().map(|r| r.map(|q| format_rational(&q))));
            report["log"] = json!(n.rows().clone().map(|r| r.map(|q| format_rational(&q))));
            report["schema_version"] = json!(SCHEMA_VERSION);
            Ok(Outcome::ok(report, nf_summary(&nf)))
        }
        NormalFormInput::Quadruple { nf, sign_flip, stabilizer } => {
            let [a, b, e, f] = parse_list::<4>(nf, "normal form")?;
            let mut start = NormalForm::new(a, b, e, f);
            if *sign_flip {
                start = start.sign_flipped();
            }
            let nf = match stabilizer {
                Some(s) => {
                    let [p, q, r, s] = parse_list::<4>(s, "stabilizer")?;
                    let g = WeightStabilizerElement::new(p, q, r, s);
                    if !g.is_integral() {
                        return Err(CliError::Input("stabilizer element is not integral".into()));
                    }
                    act_weight_stabilizer(&g, &start)
                }
                None => start,
            };
            let mut report = nf_json(&nf)?;
            report["schema_version"] = json!(SCHEMA_VERSION);
            Ok(Outcome::ok(report, nf_summary(&nf)))
        }
        NormalFormInput::Mirror(text) => {
            let [d, c, x] = parse_list::<3>(text, "mirror invariants")?;
            let mi = MirrorInvariants::new(to_i64(&d, "degree")?, to_i64(&c, "c2.H")?, to_i64(&x, "chi")?);
            let point = mirror_to_hodge(&mi, 128);
            let mut report = nf_json(&point.normal_form)?;
            report["pi"] = json!(point.pi.to_string_digits(30));
            report["pi_over_kappa"] = json!(mi.chi.to_string());
            report["mirror_invariants"] = json!(mi);
            report["schema_version"] = json!(SCHEMA_VERSION);
            let summary = format!("{}; pi = {} kappa", nf_summary(&point.normal_form), mi.chi);
            Ok(Outcome::ok(report, summary))
        }
    }
}

fn raw_failure(op: &PFOperator, opts: &RunOptions, error: String) -> ContinuationSection {
    match opts.base().ok().and_then(|b| global_monodromy(op, b.as_ref(), opts.precision_bits).ok()) {
        Some(g) => ContinuationSection::Failed {
            error,
            raw_monodromy: g.loops.iter().map(|l| raw_loop(&l.location, &l.matrix)).collect(),
            log2_global_residual: Some(g.log2_residual),
        },
        None => ContinuationSection::Failed { error, raw_monodromy: Vec::new(), log2_global_residual: None },
    }
}

/// Continuation and Torelli sections for `op` with MUM points `mums`.
fn continuation_and_torelli(
    doc: &OperatorDocument,
    op: &PFOperator,
    mums: &[SingularLocation],
    finite_others: usize,
    opts: &RunOptions,
) -> Result<(ContinuationSection, TorelliSection, Option<CliError>), CliError> {
    let zero = SingularLocation::zero();
    let supplied = doc.invariants_at_zero()?;
    let section = if !mums.contains(&zero) {
        Err("continuation starts from a MUM point at z = 0 and none was found".to_string())
    } else if supplied.is_none() && finite_others == 0 {
        Err("no finite singular point besides z = 0: the integral frame cannot be recognized without supplied mirror invariants".to_string())
    } else {
        Ok(())
    };
    let options = opts.cross_options(supplied)?;
    let run = match section {
        Err(reason) => Ok(ContinuationSection::Skipped { reason }),
        Ok(()) if mums.contains(&SingularLocation::Infinity) => {
            cross_mum_invariants(op, &zero, &SingularLocation::Infinity, &options).map(|report| ContinuationSection::CrossMum { report })
        }
        Ok(()) => integral_frame(op, &options).map(|frame| ContinuationSection::Frame { frame }),
    };
    let (continuation, failure) = match run {
        Ok(c) => (c, None),
        Err(e @ (ContinuationError::Recognition(_) | ContinuationError::FrameHypothesis(_) | ContinuationError::PrecisionExhausted(_))) => {
            (raw_failure(op, opts, e.to_string()), Some(CliError::from(e)))
        }
        Err(e) => return Err(e.into()),
    };
    let torelli = match (mums.len(), &continuation) {
        (0, _) => TorelliSection::Unavailable { reason: "no MUM point".into() },
        (1, _) => TorelliSection::SingleMum { location: mums[0].to_string(), conclusion: SINGLE_MUM.into() },
        (_, ContinuationSection::CrossMum { report }) => {
            let mut section = TorelliSection::pairwise(vec![TorelliPair {
                first: "0".into(),
                second: "infinity".into(),
                evidence: report.torelli.clone(),
            }]);
            if mums.len() > 2 {
                if let TorelliSection::Pairwise { conclusion, .. } = &mut section {
                    conclusion.push_str("; pairs other than (0, infinity) were not compared");
                }
            }
            section
        }
        _ => TorelliSection::Unavailable { reason: "limit data at two MUM points are not available".into() },
    };
    Ok((continuation, torelli, failure))
}

pub fn analyze(doc: &OperatorDocument, opts: &RunOptions) -> Result<Outcome, CliError> {
    let op = doc.operator()?;
    let points = analyze_singular_points(&op, opts.precision_bits + 32);
    let mums: Vec<SingularLocation> =
        points.iter().filter(|p| p.indicial.as_ref().is_some_and(|d| d.is_mum)).map(|p| p.point.location.clone()).collect();
    let mum_names: Vec<String> = mums.iter().map(ToString::to_string).collect();
    let expected = doc.expected_mum()?;
    let expected_mum = (!expected.is_empty()).then(|| ExpectedMumCheck {
        expected: expected.iter().map(ToString::to_string).collect(),
        found: mum_names.clone(),
        matches: expected.len() == mums.len() && expected.iter().all(|e| mums.contains(e)),
    });
    let zero_is_mum = points
        .iter()
        .any(|p| p.point.location == SingularLocation::zero() && p.indicial.as_ref().is_some_and(|d| d.mum_exponent == Some(int(0))));
    let (frobenius, mirror_map) = if zero_is_mum {
        let (f, m) = frobenius_summary(&op, opts)?;
        (Some(f), Some(m))
    } else {
        (None, None)
    };
    let finite_others = points
        .iter()
        .filter(|p| !p.point.location.is_infinity() && p.point.location != SingularLocation::zero())
        .count();
    let (continuation, torelli, failure) = continuation_and_torelli(doc, &op, &mums, finite_others, opts)?;
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        operator: OperatorSummary { name: doc.name.clone(), theta_form: op.to_string(), z_degree: op.z_degree() },
        settings: opts.settings(),
        singular_points: points,
        mum_points: mum_names,
        expected_mum,
        frobenius,
        mirror_map,
        continuation,
        torelli,
    };
    let summary = analysis_summary(&report);
    Ok(Outcome { report: to_value(&report), summary, failure })
}

fn analysis_summary(r: &AnalysisReport) -> String {
    let mut out = vec![format!(
        "operator {}: {} singular points; MUM at {}",
        r.operator.name,
        r.singular_points.len(),
        if r.mum_points.is_empty() { "none".into() } else { r.mum_points.join(", ") }
    )];
    if let Some(check) = &r.expected_mum {
        if !check.matches {
            out.push(format!("expected MUM points {} differ from those found", check.expected.join(", ")));
        }
    }
    if let Some(f) = &r.frobenius {
        out.push(format!("psi3 = {}", render_series(&f.psi3, "z")));
    }
    if let Some(m) = &r.mirror_map {
        out.push(format!("q = {}", render_series(&m.q_of_z, "z")));
    }
    let frame_lines = |frame: &mumhodge::continuation::FrameReport| {
        let source = match &frame.frame_source {
            mumhodge::continuation::FrameSource::Supplied => "supplied invariants".to_string(),
            mumhodge::continuation::FrameSource::Recognized { conifold, .. } => format!("recognized at {conifold} (conjectural)"),
        };
        format!(
            "integral frame from {source} at {} bits: {}, |T_1 ... T_inf - I| = 2^{:.1}",
            frame.precision, frame.mirror_invariants, frame.log2_global_residual
        )
    };
    let point_line = |p: &mumhodge::continuation::MumPointReport| {
        let ratio = (&p.point.pi / &kappa(p.point.pi.prec())).re_f64();
        format!("  {}: {}; {}; pi/kappa = {ratio:.12}", p.location, p.normal_form, p.invariants)
    };
    match &r.continuation {
        ContinuationSection::Frame { frame } => {
            out.push(frame_lines(frame));
            out.push(point_line(&frame.mum));
        }
        ContinuationSection::CrossMum { report } => {
            out.push(frame_lines(&report.frame));
            for p in report.points() {
                out.push(point_line(p));
            }
        }
        ContinuationSection::Skipped { reason } => out.push(format!("continuation skipped: {reason}")),
        ContinuationSection::Failed { error, .. } => out.push(format!("continuation failed: {error}")),
    }
    out.push(format!("torelli: {}", r.torelli.conclusion()));
    out.join("\n")
}

fn record_point(rec: &MumRecord, prec: u32) -> Result<LmhsPoint<BigComplex>, CliError> {
    let mut point = match (&rec.mirror_invariants, &rec.normal_form) {
        (Some(mi), None) => mirror_to_hodge(mi, prec),
        (None, Some(nf)) => {
            let parsed = nf.iter().map(|s| parse_exact(s)).collect::<Result<Vec<_>, _>>()?;
            let [a, b, e, f]: [Rational; 4] = parsed.try_into().expect("four entries");
            let ratio = parse_exact(rec.pi_over_kappa.as_deref().unwrap_or("0"))?;
            let pi = &kappa(prec) * &BigComplex::from_rational(prec, &ratio);
            LmhsPoint::new(NormalForm::new(a, b, e, f), pi)
        }
        _ => return Err(CliError::Parse(format!("record {:?} needs exactly one of mirror_invariants and normal_form", rec.label))),
    };
    if let Some(shift) = &rec.pi_shift {
        point.pi = &point.pi + &BigComplex::from_rational(prec, &parse_exact(shift)?);
    }
    Ok(point)
}

pub fn torelli_records(doc: &RecordsDocument, opts: &RunOptions) -> Result<Outcome, CliError> {
    let prec = opts.precision_bits;
    let points = doc.records.iter().map(|r| record_point(r, prec)).collect::<Result<Vec<_>, _>>()?;
    let section = match points.len() {
        0 => TorelliSection::Unavailable { reason: "no MUM records".into() },
        1 => TorelliSection::SingleMum { location: doc.records[0].label.clone(), conclusion: SINGLE_MUM.into() },
        n => {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push(TorelliPair {
                        first: doc.records[i].label.clone(),
                        second: doc.records[j].label.clone(),
                        evidence: torelli_distinguish(&points[i], &points[j], &opts.bound(), prec),
                    });
                }
            }
            TorelliSection::pairwise(pairs)
        }
    };
    Ok(Outcome::ok(json!({ "schema_version": SCHEMA_VERSION, "torelli": section }), torelli_summary(&section)))
}

pub fn torelli_operator(doc: &OperatorDocument, opts: &RunOptions) -> Result<Outcome, CliError> {
    let analysis = analyze(doc, opts)?;
    let section = analysis.report["torelli"].clone();
    let conclusion = section
        .get("conclusion")
        .or_else(|| section.get("reason"))
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    Ok(Outcome {
        report: json!({ "schema_version": SCHEMA_VERSION, "operator": doc.name, "torelli": section }),
        summary: format!("torelli: {conclusion}"),
        failure: analysis.failure,
    })
}

fn torelli_summary(section: &TorelliSection) -> String {
    let mut out = Vec::new();
    if let TorelliSection::Pairwise { pairs, .. } = section {
        for p in pairs {
            out.push(format!("{} vs {}: {} ({})", p.first, p.second, p.evidence.verdict, p.evidence.summary));
        }
    }
    out.push(format!("torelli: {}", section.conclusion()));
    out.join("\n")
}
