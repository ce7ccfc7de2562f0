use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use anyhow::{Context, Result};
use num_bigint::BigInt;
use serde_json::{json, Value};

use stabgw_core::chern::{self, ManifoldSpec, StabilizerSpec, SymplecticData};
use stabgw_core::equiv::{brute_force_prop22, orbit_check};
use stabgw_core::gw::{
    check_confluence, eval_sphere, lift_unstable, parse_script, rewrite_step, solve_unknowns,
    sphere_ring, verify_certificate, Cap, GWSymbol, Insertion, SphereEvaluator, SphereSymbol,
    Target, Verdict,
};
use stabgw_core::lattice::IntersectionLattice;
use stabgw_core::pipeline;
use stabgw_core::polytope::{
    euler_class_of_facet, face_counts, faces_equivalent, facets, Facet, NormSpec, PolytopeError,
};
use stabgw_core::ring::{presets, GradedClass, RingPresentation};
use stabgw_core::Rational;

use crate::{
    CapArg, ChernCmd, Cli, Command, GwCmd, ManifoldArgs, NormArgs, OrbitCmd, PipelineCmd,
    PolytopeCmd,
};

/// Malformed command-line input that clap cannot see.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Gw(c) => gw(c),
        Command::Chern(c) => chern_cmd(c),
        Command::Orbit(c) => orbit(c),
        Command::Polytope(c) => polytope(c),
        Command::Pipeline(c) => pipeline_cmd(c, cli.seed),
    }
}

fn q(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_classes(ring: &Arc<RingPresentation>, text: &str) -> Result<Vec<GradedClass>> {
    split_list(text)
        .into_iter()
        .map(|s| {
            ring.parse(s)
                .with_context(|| format!("insertion `{s}`"))
        })
        .collect()
}

fn parse_ints(text: &str) -> Result<Vec<i64>> {
    split_list(text)
        .into_iter()
        .map(|s| {
            s.parse::<i64>()
                .map_err(|e| bad(format!("`{s}` is not an integer: {e}")))
        })
        .collect()
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(parse_ints)
        .collect()
}

fn basis_insertions(classes: &[GradedClass]) -> Option<Vec<Insertion>> {
    classes
        .iter()
        .map(|c| {
            let ring = c.ring();
            let unit = ring.unit_index();
            match c.coeffs().iter().collect::<Vec<_>>()[..] {
                [(&i, &1)] if i == unit => Some(Insertion::One),
                [(&_, &1)] => Some(Insertion::H),
                _ => None,
            }
        })
        .collect()
}

fn gw(c: &GwCmd) -> Result<Value> {
    match c {
        GwCmd::Sphere {
            genus,
            degree,
            insertions,
            cap,
            trace,
        } => {
            let ring = sphere_ring();
            let ins = parse_classes(&ring, insertions)?;
            let cap = match cap {
                CapArg::Point => Cap::Point,
                CapArg::Full => Cap::Full,
            };
            let points = ins.len() as u32;
            let value = SphereEvaluator::new().eval(*genus, points, *degree, &ins, cap)?;
            let mut out = json!({
                "genus": genus,
                "points": points,
                "degree": degree,
                "insertions": ins.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "cap": format!("{cap:?}").to_lowercase(),
                "value": q(&value),
            });
            if *trace {
                let basis = basis_insertions(&ins).ok_or_else(|| {
                    bad("--trace needs every insertion to be 1 or h".to_string())
                })?;
                let s = SphereSymbol::new(*genus, *degree, &basis, cap);
                let step = rewrite_step::<Rational>(&s)?;
                out["step"] = json!({
                    "symbol": s.to_string(),
                    "rule": step.rule.map(|r| r.name()),
                    "output": step.output.to_string(),
                    "terminal": step.is_terminal(),
                });
            }
            Ok(out)
        }
        GwCmd::Table { max_genus } => {
            let ring = sphere_ring();
            let mut rows = Vec::new();
            let mut all_match = true;
            for g in 0..=*max_genus {
                // odd genus: all insertions 1; even genus: one h
                let (ins, degree) = match g {
                    0 => (vec![ring.class("h")?, ring.unit(), ring.unit()], 0),
                    g if g % 2 == 1 => (vec![ring.unit()], (g as i64 - 1) / 2),
                    g => (vec![ring.class("h")?], g as i64 / 2),
                };
                let value = eval_sphere(g, ins.len() as u32, degree, &ins)?;
                let expected = Rational::from_integer(BigInt::from(2).pow(g));
                all_match &= value == expected;
                rows.push(json!({
                    "genus": g,
                    "points": ins.len(),
                    "degree": degree,
                    "insertions": ins.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "value": q(&value),
                    "expected": q(&expected),
                    "matches": value == expected,
                }));
            }
            Ok(json!({ "rows": rows, "all_match": all_match }))
        }
        GwCmd::Product {
            genus,
            degrees,
            insertions,
        } => {
            let degrees = parse_ints(degrees)?;
            if degrees.is_empty() {
                return Err(bad("give at least one degree"));
            }
            let ring = presets::sphere_product(degrees.len());
            let ins = parse_classes(&ring, insertions)?;
            let sym = GWSymbol {
                target: Target::SphereProduct(degrees.len()),
                genus: *genus,
                degree: degrees.clone(),
                insertions: ins.clone(),
                cap: Cap::Point,
            };
            let value = sym.evaluate()?;
            Ok(json!({
                "ring": ring.name(),
                "genus": genus,
                "points": ins.len(),
                "degrees": degrees,
                "insertions": ins.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "value": q(&value),
            }))
        }
        GwCmd::Lift {
            genus,
            degree,
            insertions,
            beta,
        } => {
            let ring = sphere_ring();
            let ins = parse_classes(&ring, insertions)?;
            let b = ring.parse(beta).context("divisor class")?;
            let value = lift_unstable(*genus, ins.len() as u32, *degree, &ins, &b)?;
            Ok(json!({
                "genus": genus,
                "points": ins.len(),
                "degree": degree,
                "beta": b.to_string(),
                "value": q(&value),
            }))
        }
        GwCmd::Solve { script, equations } => {
            let mut text = match script {
                Some(p) => std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?,
                None => String::new(),
            };
            for e in equations {
                text.push('\n');
                text.push_str(e);
            }
            let parsed = parse_script(&text)?;
            if parsed.equations.is_empty() {
                return Err(bad("no equations given"));
            }
            let verdict = solve_unknowns(&parsed.equations, &parsed.domains)?;
            let (obstruction, verified) = match &verdict {
                Verdict::Infeasible { certificate } => (
                    Some(certificate.kind()),
                    Some(verify_certificate(
                        &parsed.equations,
                        &parsed.domains,
                        certificate,
                    )?),
                ),
                _ => (None, None),
            };
            Ok(json!({
                "equations": parsed.sources,
                "domains": parsed.domains,
                "verdict": verdict,
                "obstruction": obstruction,
                "certificate_verified": verified,
            }))
        }
    }
}

fn manifold(args: &ManifoldArgs) -> Result<SymplecticData> {
    let spec = match &args.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<ManifoldSpec>(&text)
                .with_context(|| format!("parsing {}", p.display()))?
        }
        None => ManifoldSpec {
            name: None,
            preset: args.preset.clone(),
            ring: None,
            c1: args.c1.clone(),
            sigma: args.sigma,
            simply_connected: true,
        },
    };
    Ok(spec.build()?)
}

fn parse_stabilizer(text: &str) -> Result<StabilizerSpec> {
    let t = text.trim().to_ascii_lowercase();
    let num = |s: &str| -> Result<u32> {
        s.parse()
            .map_err(|_| bad(format!("bad stabilizer `{text}`")))
    };
    let (body, count) = match t.split_once('^') {
        Some((b, c)) => (b, num(c)?),
        None => (t.as_str(), 1),
    };
    if count == 0 {
        return Err(bad(format!("stabilizer `{text}` has no factors")));
    }
    let spec = if let Some(k) = body.strip_prefix("cp") {
        if count != 1 {
            return Err(bad("powers of projective spaces are not supported"));
        }
        let k = num(k)?;
        if k == 0 {
            return Err(bad("CP0 is a point"));
        }
        StabilizerSpec::ProjectiveSpace(k)
    } else if body == "s2" {
        StabilizerSpec::Surfaces {
            genus: 0,
            count: count as usize,
        }
    } else if body == "t2" {
        StabilizerSpec::Surfaces {
            genus: 1,
            count: count as usize,
        }
    } else if let Some(g) = body.strip_prefix("sigma") {
        StabilizerSpec::Surfaces {
            genus: num(g)?,
            count: count as usize,
        }
    } else {
        return Err(bad(format!(
            "unknown stabilizer `{text}` (cp<k>, s2^<k>, t2^<k>, sigma<g>^<k>)"
        )));
    };
    Ok(spec)
}

fn summand(name: &str) -> Result<SymplecticData> {
    if let Some(s) = name.strip_prefix("sigma=") {
        let sigma = s
            .parse()
            .map_err(|_| bad(format!("bad signature `{s}`")))?;
        return Ok(SymplecticData::numeric(name, sigma, true));
    }
    Ok(match name {
        "T4" => chern::torus4(),
        "E1" | "E(1)" => chern::elliptic_e1(),
        other => ManifoldSpec {
            name: None,
            preset: Some(other.to_string()),
            ring: None,
            c1: None,
            sigma: None,
            simply_connected: true,
        }
        .build()?,
    })
}

fn chern_cmd(c: &ChernCmd) -> Result<Value> {
    match c {
        ChernCmd::Stabilize {
            manifold: m,
            stabilizers,
        } => {
            let d = manifold(m)?;
            let stabs = stabilizers
                .iter()
                .map(|s| parse_stabilizer(s))
                .collect::<Result<Vec<_>>>()?;
            let out = chern::c1_stabilize_all(&d, &stabs)?;
            Ok(json!({
                "name": out.name,
                "ring": out.ring()?.name(),
                "dimension": out.dimension,
                "c1": out.c1()?.to_string(),
                "stabilizers": stabs,
            }))
        }
        ChernCmd::P1 { manifold: m, k } => {
            let d = manifold(m)?;
            Ok(json!({
                "name": d.name,
                "sigma": d.sigma,
                "k": k,
                "p1_number": chern::p1_number_product_with_surfaces(&d, *k)?,
            }))
        }
        ChernCmd::FibreSum { summands } => {
            let mut parts = Vec::new();
            for term in summands.split('+').map(str::trim) {
                let (mult, name) = match term.split_once('*') {
                    Some((k, n)) => (
                        k.trim()
                            .parse::<usize>()
                            .map_err(|_| bad(format!("bad multiplicity in `{term}`")))?,
                        n.trim(),
                    ),
                    None => (1, term),
                };
                if name.is_empty() {
                    return Err(bad(format!("empty summand in `{summands}`")));
                }
                let s = summand(name)?;
                parts.extend(std::iter::repeat(s).take(mult));
            }
            let sigma = chern::fibre_sum_signature(&parts)?;
            Ok(json!({
                "summands": parts.iter().map(|p| json!({"name": p.name, "sigma": p.sigma})).collect::<Vec<_>>(),
                "sigma": sigma,
                "p1_number": 3 * sigma,
            }))
        }
        ChernCmd::Fingerprint { manifold: m } => {
            let d = manifold(m)?;
            let f = chern::c1_orbit_fingerprint(&d)?;
            Ok(json!({
                "name": d.name,
                "c1": d.c1()?.to_string(),
                "fingerprint": f,
            }))
        }
    }
}

fn vector(text: &str, ring: Option<&Arc<RingPresentation>>) -> Result<Vec<i64>> {
    if let Ok(v) = parse_ints(text) {
        return Ok(v);
    }
    match ring {
        Some(r) => Ok(r.parse(text)?.coordinates(2)),
        None => Err(bad(format!(
            "`{text}` is not a coordinate list; class expressions need --preset"
        ))),
    }
}

fn orbit(c: &OrbitCmd) -> Result<Value> {
    let OrbitCmd::Check {
        preset,
        gram,
        v0,
        v1,
        bound,
    } = c;
    let ring = match preset {
        Some(p) => Some(presets::by_name(p).ok_or_else(|| bad(format!("unknown preset `{p}`")))?),
        None => None,
    };
    let lattice = match (&ring, gram) {
        (Some(r), _) => r.intersection_lattice()?,
        (None, Some(g)) => IntersectionLattice::new(parse_matrix(g)?)?,
        (None, None) => return Err(bad("give --preset or --gram")),
    };
    let a = vector(v0, ring.as_ref())?;
    let b = vector(v1, ring.as_ref())?;
    let report = orbit_check(&lattice, &a, &b, *bound)?;
    Ok(json!({
        "gram": lattice.gram(),
        "v0": a,
        "v1": b,
        "report": report,
    }))
}

fn norm(args: &NormArgs) -> Result<NormSpec> {
    match (&args.preset, &args.generators) {
        (_, Some(g)) => NormSpec::parse(g).map_err(bad),
        (Some(p), None) => match p.to_ascii_lowercase().as_str() {
            "borromean" => Ok(NormSpec::borromean()),
            "l1" => Ok(NormSpec::l1(3)),
            other => match other.strip_prefix("l1:").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Ok(NormSpec::l1(n)),
                _ => Err(bad(format!("unknown norm preset `{p}` (borromean, l1:<n>)"))),
            },
        },
        (None, None) => Ok(NormSpec::borromean()),
    }
}

fn facet_json(i: usize, f: &Facet) -> Value {
    json!({
        "index": i,
        "normal": f.normal,
        "euler_class": euler_class_of_facet(f),
        "vertex_count": f.vertex_count(),
        "polygon": f.polygon.iter().map(|x| x.iter().map(q).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn polytope(c: &PolytopeCmd) -> Result<Value> {
    match c {
        PolytopeCmd::Facets { norm: n } => {
            let spec = norm(n)?;
            let fs = facets(&spec);
            let mut census: BTreeMap<String, usize> = BTreeMap::new();
            for f in &fs {
                *census.entry(f.vertex_count().to_string()).or_default() += 1;
            }
            let mut out = json!({
                "generators": spec.generators(),
                "facets": fs.iter().enumerate().map(|(i, f)| facet_json(i, f)).collect::<Vec<_>>(),
                "census": census,
            });
            if spec.dim() == 3 {
                let (v, e, f) = face_counts(&fs);
                out["face_counts"] = json!({"vertices": v, "edges": e, "facets": f});
            }
            Ok(out)
        }
        PolytopeCmd::FaceOrbit {
            norm: n,
            f0,
            f1,
            bound,
        } => {
            let spec = norm(n)?;
            let fs = facets(&spec);
            let get = |i: usize| fs.get(i).ok_or(PolytopeError::NoSuchFacet(i));
            let (a, b) = (get(*f0)?, get(*f1)?);
            Ok(json!({
                "f0": facet_json(*f0, a),
                "f1": facet_json(*f1, b),
                "bound": bound,
                "verdict": faces_equivalent(&spec, a, b, *bound),
            }))
        }
    }
}

fn pipeline_cmd(c: &PipelineCmd, seed: u64) -> Result<Value> {
    Ok(match c {
        PipelineCmd::Smith { n } => serde_json::to_value(pipeline::smith(*n)?)?,
        PipelineCmd::Lemma57 => serde_json::to_value(pipeline::lemma57()?)?,
        PipelineCmd::Prop22 { rank, bound, k } => {
            if *rank == 0 || *bound < 1 || *k == 0 {
                return Err(bad("rank, bound and k must be positive"));
            }
            serde_json::to_value(brute_force_prop22(*rank, *bound, *k))?
        }
        PipelineCmd::Soundness { samples, bound } => {
            serde_json::to_value(pipeline::soundness_sweep(*samples, *bound, seed)?)?
        }
        PipelineCmd::Confluence {
            max_genus,
            max_points,
            max_degree,
            random_runs,
        } => serde_json::to_value(check_confluence(
            *max_genus,
            *max_points,
            *max_degree,
            *random_runs,
            seed,
        )?)?,
    })
}
