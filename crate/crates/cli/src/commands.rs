use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use elimkit::field::{Field, FieldSpec, FiniteField, Rationals};
use elimkit::forms::{standard_form, GroupKind};
use elimkit::gauss::{decompose as decompose_element, verify as verify_decomposition, Decomposition, GaussError};
use elimkit::generators::format_word;
use elimkit::linalg::{LinalgError, Matrix};
use elimkit::polyclass::enumerate_self_u_irreducibles;
use elimkit::sample::Sampler;
use elimkit::spinor::{reflection_factor, spinor_all, spinor_elimination, spinor_wall, SpinorError};
use elimkit::zbrute::{
    build_group, class_centralizers, conjugacy_classes, z_classes, z_classes_by_search, BruteError, DEEP_CAP,
    DEFAULT_CAP,
};
use elimkit::zcount::{series, u_compact, u_lorentz, SeriesKind};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::{Emit, GroupArgs, SeriesArg, SpinorMethod};

/// A failed run, with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable input (exit 1).
    Usage(String),
    /// Non-membership or a failed verification (exit 2).
    Rejected { message: String, stdout: Option<String> },
    /// A resource cap was hit (exit 3).
    Cap(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Rejected { .. } => 2,
            Failure::Cap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Cap(m) | Failure::Rejected { message: m, .. } => m,
        }
    }

    pub fn stdout(&self) -> Option<&str> {
        match self {
            Failure::Rejected { stdout, .. } => stdout.as_deref(),
            _ => None,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn rejected(e: impl std::fmt::Display) -> Failure {
    Failure::Rejected { message: e.to_string(), stdout: None }
}

fn gauss_failure(e: GaussError) -> Failure {
    match e {
        GaussError::NotMember(_) | GaussError::NonSquareMultiplier | GaussError::Internal(_) => rejected(e),
        other => usage(other),
    }
}

fn linalg_failure(e: LinalgError) -> Failure {
    usage(format!("bad matrix: {e}"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn big_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

enum AnyField {
    Gf(FiniteField),
    Q(Rationals),
}

macro_rules! with_field {
    ($any:expr, |$f:ident| $body:expr) => {
        match $any {
            AnyField::Gf(ref $f) => $body,
            AnyField::Q(ref $f) => $body,
        }
    };
}

fn build_field(spec: &FieldSpec) -> Result<AnyField, Failure> {
    match spec {
        FieldSpec::Rational => Ok(AnyField::Q(Rationals)),
        FieldSpec::Finite { p, m, modulus: Some(modulus) } if *m > 1 => {
            FiniteField::with_modulus(*p, modulus.clone()).map(AnyField::Gf).map_err(usage)
        }
        FieldSpec::Finite { p, m, .. } => FiniteField::new(*p, *m).map(AnyField::Gf).map_err(usage),
    }
}

/// The field from `--field`, else from the `field` entry of `file_spec`.
fn resolve_field(cli: Option<&str>, file_spec: Option<&Value>) -> Result<AnyField, Failure> {
    let spec = match (cli, file_spec) {
        (Some(s), _) => FieldSpec::parse_cli(s).map_err(usage)?,
        (None, Some(v)) => FieldSpec::from_json(v).map_err(usage)?,
        (None, None) => return Err(usage("no field given: pass --field or include `field` in the input")),
    };
    build_field(&spec)
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn group_kind(kind: &str, size: usize) -> Result<GroupKind, Failure> {
    GroupKind::from_token(kind, size).map_err(usage)
}

fn load_matrix<F: Field>(f: &F, v: &Value) -> Result<Matrix<F>, Failure> {
    Matrix::from_json(f, v).map_err(linalg_failure)
}

fn decomposition_json<F: Field>(d: &Decomposition<F>) -> Value {
    let f = d.diagonal.field();
    json!({
        "kind": d.kind.token(),
        "size": d.kind.size(),
        "field": f.spec().to_json(),
        "left": format_word(f, &d.left),
        "right": format_word(f, &d.right),
        "diagonal": d.diagonal.to_json(),
        "mu": f.elem_to_json(&d.mu),
        "lambda": f.elem_to_json(&d.lambda),
        "alpha": d.alpha.as_ref().map(|a| f.elem_to_json(a)),
        "word_length": d.word_length(),
    })
}

pub fn decompose(group: &GroupArgs, field: Option<&str>, input: &Path, out: Option<&Path>, emit: Emit) -> Result<String, Failure> {
    let kind = group_kind(&group.kind, group.size)?;
    let v = read_json(input)?;
    let any = resolve_field(field, v.get("field"))?;
    with_field!(any, |f| {
        kind.validate(f).map_err(usage)?;
        let g = load_matrix(f, &v)?;
        let d = decompose_element(&g, kind).map_err(gauss_failure)?;
        let text = d.to_text();
        if let Some(path) = out {
            std::fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        }
        Ok(match (emit, out) {
            (Emit::Json, _) => pretty(&decomposition_json(&d)),
            (Emit::Text, None) => text,
            (Emit::Text, Some(path)) => format!(
                "{kind}: word length {}, mu = {}, lambda = {}\nwrote {}\n",
                d.word_length(),
                f.format(&d.mu),
                f.format(&d.lambda),
                path.display()
            ),
        })
    })
}

pub fn verify(
    kind: Option<&str>,
    size: Option<usize>,
    field: Option<&str>,
    input: &Path,
    word: &Path,
    emit: Emit,
) -> Result<String, Failure> {
    let text = std::fs::read_to_string(word).map_err(|e| usage(format!("{}: {e}", word.display())))?;
    let file_field = text
        .lines()
        .find_map(|l| l.strip_prefix("field:"))
        .map(|s| serde_json::from_str::<Value>(s.trim()).map_err(|e| usage(format!("field line: {e}"))))
        .transpose()?;
    let v = read_json(input)?;
    let any = resolve_field(field, file_field.as_ref().or(v.get("field")))?;
    with_field!(any, |f| {
        let d = Decomposition::from_text(f, &text).map_err(usage)?;
        let g = load_matrix(f, &v)?;
        if let Some(k) = kind {
            let want = group_kind(k, size.unwrap_or(d.kind.size()))?;
            if want != d.kind {
                return Err(usage(format!("decomposition is for {}, not {want}", d.kind)));
            }
        }
        let ok = verify_decomposition(&d, &g);
        let body = match emit {
            Emit::Json => pretty(&json!({ "kind": d.kind.token(), "size": d.kind.size(), "verified": ok })),
            Emit::Text => format!("{}: {}\n", d.kind, if ok { "verified" } else { "FAILED" }),
        };
        if ok {
            Ok(body)
        } else {
            Err(Failure::Rejected { message: "decomposition does not reproduce the matrix".into(), stdout: Some(body) })
        }
    })
}

fn spinor_failure(e: SpinorError) -> Failure {
    match e {
        SpinorError::WrongKind(_) | SpinorError::Form(_) | SpinorError::Linalg(_) | SpinorError::Field(_) => usage(e),
        SpinorError::Gauss(g) => gauss_failure(g),
        other => rejected(other),
    }
}

pub fn spinor(group: &GroupArgs, field: Option<&str>, input: &Path, method: SpinorMethod, emit: Emit) -> Result<String, Failure> {
    let kind = group_kind(&group.kind, group.size)?;
    if !kind.is_orthogonal() {
        return Err(usage(format!("{kind} is not an orthogonal group")));
    }
    let v = read_json(input)?;
    let any = resolve_field(field, v.get("field"))?;
    with_field!(any, |f| {
        kind.validate(f).map_err(usage)?;
        let g = load_matrix(f, &v)?;
        let beta = standard_form(kind.isometry_kind(), f).map_err(usage)?;
        let mut results: Vec<(&str, String)> = Vec::new();
        let mut agree = true;
        match method {
            SpinorMethod::Elim => results.push(("elim", spinor_elimination(&g, kind).map_err(spinor_failure)?.to_string())),
            SpinorMethod::Wall => results.push(("wall", spinor_wall(&g, &beta).map_err(spinor_failure)?.to_string())),
            SpinorMethod::Reflect => {
                let fac = reflection_factor(&g, &beta).map_err(spinor_failure)?;
                results.push(("reflect", fac.spinor_norm(&beta).map_err(spinor_failure)?.to_string()));
            }
            SpinorMethod::All => {
                let r = spinor_all(&g, kind).map_err(spinor_failure)?;
                agree = r.agree();
                results.push(("elim", r.elimination.to_string()));
                results.push(("wall", r.wall.to_string()));
                results.push(("reflect", r.reflections.to_string()));
            }
        }
        let body = match emit {
            Emit::Json => {
                let mut obj = serde_json::Map::new();
                for (k, c) in &results {
                    obj.insert((*k).to_string(), json!(c));
                }
                obj.insert("agree".into(), json!(agree));
                pretty(&Value::Object(obj))
            }
            Emit::Text => results.iter().map(|(k, c)| format!("{k}: {c}\n")).collect(),
        };
        if agree {
            Ok(body)
        } else {
            Err(Failure::Rejected { message: "spinor norm methods disagree".into(), stdout: Some(body) })
        }
    })
}

pub fn polys(q: u64, dmax: usize, self_u: bool, emit: Emit) -> Result<String, Failure> {
    if !self_u {
        return Err(usage("only the self-U-reciprocal enumeration (--self-u) is available"));
    }
    let q2 = q.checked_mul(q).ok_or_else(|| usage("q too large"))?;
    let f = FiniteField::gf(q2).map_err(usage)?;
    let list = enumerate_self_u_irreducibles(&f, dmax).map_err(usage)?;
    let mut counts = vec![0usize; dmax + 1];
    for p in &list {
        counts[p.degree().unwrap_or(0)] += 1;
    }
    Ok(match emit {
        Emit::Json => pretty(&json!({
            "field": f.spec().to_json(),
            "q": q,
            "dmax": dmax,
            "counts": (1..=dmax).map(|d| json!({ "degree": d, "count": counts[d] })).collect::<Vec<_>>(),
            "polynomials": list.iter().map(|p| json!({
                "degree": p.degree(),
                "coefficients": p.coeffs().iter().map(|c| f.elem_to_json(c)).collect::<Vec<_>>(),
                "text": p.format(),
            })).collect::<Vec<_>>(),
        })),
        Emit::Text => {
            let mut s = format!("self-U-reciprocal irreducibles over GF({q2}), degree <= {dmax}\n");
            for d in 1..=dmax {
                let _ = writeln!(s, "degree {d}: {}", counts[d]);
                for p in list.iter().filter(|p| p.degree() == Some(d)) {
                    let _ = writeln!(s, "  {}", p.format());
                }
            }
            s
        }
    })
}

pub fn zcount(
    series_arg: Option<SeriesArg>,
    terms: usize,
    compact: Option<usize>,
    lorentz: Option<usize>,
    emit: Emit,
) -> Result<String, Failure> {
    if let Some(n) = compact {
        let c = u_compact(n);
        return Ok(match emit {
            Emit::Json => pretty(&json!({ "u_compact": n, "count": big_json(&c) })),
            Emit::Text => format!("U({},0): {c}\n", n + 1),
        });
    }
    if let Some(n) = lorentz {
        let c = u_lorentz(n).map_err(usage)?;
        return Ok(match emit {
            Emit::Json => pretty(&json!({
                "u_lorentz": n,
                "hyperbolic": big_json(&c.hyperbolic),
                "elliptic": big_json(&c.elliptic),
                "parabolic": big_json(&c.parabolic),
            })),
            Emit::Text => format!(
                "U({n},1): hyperbolic {}, elliptic {}, parabolic {}\n",
                c.hyperbolic, c.elliptic, c.parabolic
            ),
        });
    }
    let (kind, name) = match series_arg {
        Some(SeriesArg::Closed) => (SeriesKind::Closed, "closed"),
        Some(SeriesArg::Real) => (SeriesKind::Real, "real"),
        Some(SeriesArg::Fq) => (SeriesKind::FiniteLargeQ, "fq"),
        None => return Err(usage("pass one of --series, --u-compact, --u-lorentz")),
    };
    let s = series(kind, terms).map_err(usage)?;
    let coeffs = &s.coeffs[1..];
    Ok(match emit {
        Emit::Json => pretty(&json!({
            "series": name,
            "terms": terms,
            "coefficients": coeffs.iter().map(big_json).collect::<Vec<_>>(),
        })),
        Emit::Text => {
            let mut out = format!("# series {name}, n = 1..{terms}\nn\tc_n\n");
            for (i, c) in coeffs.iter().enumerate() {
                let _ = writeln!(out, "{}\t{c}", i + 1);
            }
            let row: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "row: {}", row.join(","));
            out
        }
    })
}

fn brute_failure(e: BruteError) -> Failure {
    match e {
        BruteError::CapExceeded { .. } => Failure::Cap(format!("{e} (try --deep)")),
        BruteError::Internal(_) => rejected(e),
        other => usage(other),
    }
}

pub fn zbrute(group: &GroupArgs, q: u64, deep: bool, search: bool, emit: Emit) -> Result<String, Failure> {
    let kind = group_kind(&group.kind, group.size)?;
    let cap = if deep { DEEP_CAP } else { DEFAULT_CAP };
    let g = build_group(kind, q, cap).map_err(brute_failure)?;
    let classes = conjugacy_classes(&g);
    let cents = class_centralizers(&g, &classes);
    let report = if search { z_classes_by_search(&g, &classes, &cents) } else { z_classes(&g, &classes, &cents) };
    let f = g.field();
    let rows = |i: u32| -> Vec<Vec<String>> {
        g.rows(i).iter().map(|r| r.iter().map(|e| f.format(e)).collect()).collect()
    };
    let rows_text = |i: u32| -> String {
        let inner: Vec<String> = rows(i).iter().map(|r| format!("[{}]", r.join(" "))).collect();
        format!("[{}]", inner.join(", "))
    };
    Ok(match emit {
        Emit::Json => pretty(&json!({
            "kind": kind.token(),
            "n": kind.size(),
            "q": q,
            "field": f.spec().to_json(),
            "order": g.order(),
            "class_count": classes.len(),
            "z_count": report.z_count(),
            "classes": classes.representatives.iter().zip(&classes.sizes).map(|(&r, &s)| json!({
                "representative": rows(r),
                "size": s,
            })).collect::<Vec<_>>(),
            "clusters": report.clusters.iter().map(|c| json!({
                "representative": rows(c.representative),
                "centralizer_order": c.centralizer_order,
                "classes": c.classes,
            })).collect::<Vec<_>>(),
        })),
        Emit::Text => {
            let mut s = format!("group: {kind} over GF({})\n", f.size());
            let _ = writeln!(s, "order: {}", g.order());
            let _ = writeln!(s, "conjugacy classes: {}", classes.len());
            let _ = writeln!(s, "z-classes: {}", report.z_count());
            let _ = writeln!(s, "cluster\tcentralizer\tclasses\trepresentative");
            for (i, c) in report.clusters.iter().enumerate() {
                let members: Vec<String> = c.classes.iter().map(|k| k.to_string()).collect();
                let _ = writeln!(s, "{}\t{}\t{}\t{}", i + 1, c.centralizer_order, members.join(","), rows_text(c.representative));
            }
            s
        }
    })
}

struct BenchRow {
    kind: GroupKind,
    field: String,
    words: usize,
    total_ms: f64,
    lengths: Vec<usize>,
}

fn bench_one<F: Field>(f: &F, kind: GroupKind, words: usize, sampler: &mut Sampler) -> Result<BenchRow, Failure> {
    kind.validate(f).map_err(usage)?;
    let elements = (0..words)
        .map(|_| sampler.element_of(kind, f).map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    let start = Instant::now();
    let mut lengths = Vec::with_capacity(words);
    for g in &elements {
        let d = decompose_element(g, kind).map_err(gauss_failure)?;
        lengths.push(d.word_length());
    }
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    for g in &elements {
        let d = decompose_element(g, kind).map_err(gauss_failure)?;
        if !verify_decomposition(&d, g) {
            return Err(rejected(format!("{kind}: decomposition failed to verify")));
        }
    }
    lengths.sort_unstable();
    Ok(BenchRow { kind, field: f.spec().to_json().to_string(), words, total_ms, lengths })
}

pub fn bench(
    kind: Option<&str>,
    size: Option<usize>,
    field: Option<&str>,
    words: usize,
    seed: u64,
    emit: Emit,
) -> Result<String, Failure> {
    if words == 0 {
        return Err(usage("--words must be positive"));
    }
    let kinds = match (kind, size) {
        (Some(k), Some(l)) => vec![group_kind(k, l)?],
        (None, None) => vec![
            GroupKind::GSp(2),
            GroupKind::GSp(3),
            GroupKind::GOEven(2),
            GroupKind::GOEven(3),
            GroupKind::GOOdd(2),
            GroupKind::GOOdd(3),
        ],
        _ => return Err(usage("--kind and --l go together")),
    };
    let fields: Vec<String> = match field {
        Some(s) => vec![s.to_string()],
        None => ["q=3", "q=5", "q=7", "q=9"].iter().map(|s| s.to_string()).collect(),
    };
    let mut sampler = Sampler::new(seed);
    let mut rows = Vec::new();
    for fs in &fields {
        let any = build_field(&FieldSpec::parse_cli(fs).map_err(usage)?)?;
        for &k in &kinds {
            rows.push(with_field!(any, |f| bench_one(f, k, words, &mut sampler))?);
        }
    }
    let stats = |r: &BenchRow| {
        let n = r.lengths.len();
        let mean = r.lengths.iter().sum::<usize>() as f64 / n as f64;
        (r.lengths[0], r.lengths[n / 2], r.lengths[(n * 9) / 10], r.lengths[n - 1], mean)
    };
    Ok(match emit {
        Emit::Json => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    let (min, med, p90, max, mean) = stats(r);
                    json!({
                        "kind": r.kind.token(), "size": r.kind.size(), "field": serde_json::from_str::<Value>(&r.field).unwrap(),
                        "words": r.words, "total_ms": r.total_ms, "mean_us": r.total_ms * 1e3 / r.words as f64,
                        "len_min": min, "len_median": med, "len_p90": p90, "len_max": max, "len_mean": mean,
                    })
                })
                .collect(),
        )),
        Emit::Text => {
            let mut s = String::from("kind,size,field,words,total_ms,mean_us,len_min,len_median,len_p90,len_max,len_mean\n");
            for r in &rows {
                let (min, med, p90, max, mean) = stats(r);
                let _ = writeln!(
                    s,
                    "{},{},\"{}\",{},{:.3},{:.1},{min},{med},{p90},{max},{mean:.2}",
                    r.kind.token(),
                    r.kind.size(),
                    r.field.replace('"', "\"\""),
                    r.words,
                    r.total_ms,
                    r.total_ms * 1e3 / r.words as f64
                );
            }
            s
        }
    })
}
