//! The concrete cohomology rings used throughout: point, spheres, complex
//! projective spaces, surfaces (even part), `S²×S²`, and connected sums of
//! `S²×S²` and of `ℂP²`/`ℂP̄²`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{kunneth, BasisElement, RingPresentation};

type Product = (String, String, BTreeMap<String, i64>);

fn elem(id: impl Into<String>, degree: u32) -> BasisElement {
    BasisElement {
        id: id.into(),
        degree,
    }
}

fn prod(a: &str, b: &str, c: &str, k: i64) -> Product {
    (
        a.to_string(),
        b.to_string(),
        [(c.to_string(), k)].into_iter().collect(),
    )
}

fn top(id: &str) -> BTreeMap<String, i64> {
    [(id.to_string(), 1)].into_iter().collect()
}

pub fn point() -> RingPresentation {
    RingPresentation::new("pt", vec![elem("1", 0)], &[], &top("1")).expect("valid preset")
}

fn power_name(gen: &str, i: u32) -> String {
    match i {
        0 => "1".to_string(),
        1 => gen.to_string(),
        _ => format!("{gen}^{i}"),
    }
}

/// `ℤ[h]/(h^{k+1})` with `⟨h^k, [ℂP^k]⟩ = 1`.
pub fn projective_space(k: u32) -> RingPresentation {
    projective_space_named(k, "h")
}

pub fn projective_space_named(k: u32, gen: &str) -> RingPresentation {
    let basis = (0..=k).map(|i| elem(power_name(gen, i), 2 * i)).collect();
    let mut products = Vec::new();
    for i in 1..=k {
        for j in i..=k {
            if i + j <= k {
                products.push(prod(
                    &power_name(gen, i),
                    &power_name(gen, j),
                    &power_name(gen, i + j),
                    1,
                ));
            }
        }
    }
    RingPresentation::new(
        format!("CP{k}"),
        basis,
        &products,
        &top(&power_name(gen, k)),
    )
    .expect("valid preset")
}

/// `S² = ℂP¹`, generator `h`.
pub fn sphere() -> RingPresentation {
    sphere_named("h")
}

pub fn sphere_named(gen: &str) -> RingPresentation {
    let mut r = projective_space_named(1, gen);
    r.name = "S2".to_string();
    r
}

/// Even-degree part of a closed genus-`g` surface: `1` and the dual `h` of
/// the fundamental class. Odd cohomology is never multiplied here.
pub fn surface(genus: u32) -> RingPresentation {
    let mut r = projective_space_named(1, "h");
    r.name = format!("Sigma{genus}");
    r
}

/// `(S²)^k` with generators `h1, …, hk`.
pub fn sphere_product(k: usize) -> Arc<RingPresentation> {
    assert!(k >= 1, "need at least one factor");
    let mut acc = Arc::new(sphere_named("h1"));
    for i in 2..=k {
        let next = Arc::new(sphere_named(&format!("h{i}")));
        acc = kunneth(&acc, &next).expect("even-degree presets").ring;
    }
    acc
}

/// `S²×S²` with `u1`, `u2` dual to the two factors, `u1·u2 = pt`.
pub fn s2xs2() -> RingPresentation {
    let basis = vec![elem("1", 0), elem("u1", 2), elem("u2", 2), elem("pt", 4)];
    let products = vec![prod("u1", "u2", "pt", 1)];
    RingPresentation::new("S2xS2", basis, &products, &top("pt")).expect("valid preset")
}

/// `#_m(S²×S²)` with generators `u_i`, `u_i'`: `u_i u_i' = pt`, all other
/// degree-2 products vanish.
pub fn connected_sum_s2xs2(m: usize) -> RingPresentation {
    let mut basis = vec![elem("1", 0)];
    let mut products = Vec::new();
    for i in 1..=m {
        basis.push(elem(format!("u{i}"), 2));
        basis.push(elem(format!("u{i}'"), 2));
        products.push(prod(&format!("u{i}"), &format!("u{i}'"), "pt", 1));
    }
    basis.push(elem("pt", 4));
    RingPresentation::new(format!("#{m}(S2xS2)"), basis, &products, &top("pt"))
        .expect("valid preset")
}

/// `#_p ℂP² #_q ℂP̄²` with `l_i² = pt` and `e_j² = -pt`.
pub fn connected_sum_cp2(p: usize, q: usize) -> RingPresentation {
    let mut basis = vec![elem("1", 0)];
    let mut products = Vec::new();
    for i in 1..=p {
        basis.push(elem(format!("l{i}"), 2));
        products.push(prod(&format!("l{i}"), &format!("l{i}"), "pt", 1));
    }
    for j in 1..=q {
        basis.push(elem(format!("e{j}"), 2));
        products.push(prod(&format!("e{j}"), &format!("e{j}"), "pt", -1));
    }
    basis.push(elem("pt", 4));
    RingPresentation::new(format!("#{p}CP2#{q}CP2bar"), basis, &products, &top("pt"))
        .expect("valid preset")
}

/// `#_m(ℂP² # ℂP̄²)`.
pub fn connected_sum_cp2_pairs(m: usize) -> RingPresentation {
    let mut r = connected_sum_cp2(m, m);
    r.name = format!("#{m}(CP2#CP2bar)");
    r
}

/// Rational elliptic surface `E(1) ≅ ℂP² # 9ℂP̄²`.
pub fn elliptic_e1() -> RingPresentation {
    let mut r = connected_sum_cp2(1, 9);
    r.name = "E(1)".to_string();
    r
}

/// Looks a preset up by name: `pt`, `S2`, `CP<k>`, `Sigma<g>`, `S2xS2`,
/// `(S2)^<k>`, `#<m>(S2xS2)`, `#<m>(CP2#CP2bar)`, `#<p>CP2#<q>CP2bar`, `E1`.
pub fn by_name(name: &str) -> Option<Arc<RingPresentation>> {
    let num = |s: &str| s.parse::<usize>().ok();
    let r = match name {
        "pt" | "point" => point(),
        "S2" => sphere(),
        "S2xS2" => s2xs2(),
        "E1" | "E(1)" => elliptic_e1(),
        _ => {
            if let Some(k) = name.strip_prefix("CP").and_then(num) {
                projective_space(k as u32)
            } else if let Some(g) = name.strip_prefix("Sigma").and_then(num) {
                surface(g as u32)
            } else if let Some(k) = name.strip_prefix("(S2)^").and_then(num) {
                return (k >= 1).then(|| sphere_product(k));
            } else if let Some(m) = name
                .strip_prefix('#')
                .and_then(|s| s.strip_suffix("(S2xS2)"))
                .and_then(num)
            {
                connected_sum_s2xs2(m)
            } else if let Some(m) = name
                .strip_prefix('#')
                .and_then(|s| s.strip_suffix("(CP2#CP2bar)"))
                .and_then(num)
            {
                connected_sum_cp2_pairs(m)
            } else if let Some((p, q)) = name
                .strip_prefix('#')
                .and_then(|s| s.strip_suffix("CP2bar"))
                .and_then(|s| s.split_once("CP2#"))
            {
                connected_sum_cp2(num(p)?, num(q)?)
            } else {
                return None;
            }
        }
    };
    Some(Arc::new(r))
}

#[cfg(test)]
pub(crate) fn all_presets() -> Vec<RingPresentation> {
    vec![
        point(),
        sphere(),
        projective_space(2),
        projective_space(3),
        projective_space(4),
        surface(2),
        s2xs2(),
        connected_sum_s2xs2(3),
        connected_sum_cp2_pairs(2),
        elliptic_e1(),
        (*sphere_product(3)).clone(),
    ]
}
