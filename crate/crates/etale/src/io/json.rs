//! JSON schemas for spaces, presheaves, pseudogroups and groupoids.
//!
//! Open sets are keyed by their sorted point list joined with commas (the
//! empty set is the empty string). Canonical serialization sorts points
//! and opens lexicographically, so equal structures produce identical
//! bytes.

use crate::bitset::IndexSet;
use crate::groupoid::TopGroupoid;
use crate::presheaf::Presheaf;
use crate::pseudogroup::{Backend, MorId, PrePseudogroup, TableData};
use crate::space::{Point, PointMap, Space};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("structural error: {0}")]
    Structure(String),
}

fn schema_err<T>(path: &str, message: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError::Schema { path: path.to_string(), message: message.into() })
}

/// A parsed instance file.
pub enum Instance {
    Space(Space),
    Presheaf(Presheaf),
    Pseudogroup(PrePseudogroup),
    Groupoid(TopGroupoid),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Space(_) => "space",
            Instance::Presheaf(_) => "presheaf",
            Instance::Pseudogroup(_) => "pseudogroup",
            Instance::Groupoid(_) => "groupoid",
        }
    }
}

/// Detects the instance kind by its top-level fields and parses it.
pub fn parse_instance(text: &str) -> Result<Instance, JsonError> {
    let value: Value = serde_json::from_str(text)?;
    let Some(obj) = value.as_object() else {
        return schema_err("$", "expected a JSON object");
    };
    if obj.contains_key("homs") {
        Ok(Instance::Pseudogroup(parse_pseudogroup_value(&value)?))
    } else if obj.contains_key("sections") {
        Ok(Instance::Presheaf(parse_presheaf_value(&value)?))
    } else if obj.contains_key("arrows") {
        Ok(Instance::Groupoid(parse_groupoid_value(&value)?))
    } else if obj.contains_key("points") {
        Ok(Instance::Space(parse_space_value(&value)?))
    } else {
        schema_err("$", "unrecognized instance shape")
    }
}

fn as_u32(v: &Value, path: &str) -> Result<u32, JsonError> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or(JsonError::Schema { path: path.into(), message: "expected a small integer".into() })
}

pub fn parse_space_value(v: &Value) -> Result<Space, JsonError> {
    let points: Vec<u32> = v["points"]
        .as_array()
        .ok_or(JsonError::Schema { path: "$.points".into(), message: "expected array".into() })?
        .iter()
        .enumerate()
        .map(|(i, p)| as_u32(p, &format!("$.points[{i}]")))
        .collect::<Result<_, _>>()?;
    let opens_arr = v["opens"]
        .as_array()
        .ok_or(JsonError::Schema { path: "$.opens".into(), message: "expected array".into() })?;
    let mut opens = Vec::new();
    for (i, open) in opens_arr.iter().enumerate() {
        let members = open
            .as_array()
            .ok_or(JsonError::Schema {
                path: format!("$.opens[{i}]"),
                message: "expected array".into(),
            })?
            .iter()
            .enumerate()
            .map(|(j, p)| as_u32(p, &format!("$.opens[{i}][{j}]")))
            .collect::<Result<_, _>>()?;
        opens.push(members);
    }
    Space::build(&points, &opens).map_err(|e| JsonError::Structure(e.to_string()))
}

pub fn space_to_value(space: &Space) -> Result<Value, JsonError> {
    let points: Vec<u32> = space.points().iter().map(|p| p.0).collect();
    let mut opens: Vec<Vec<u32>> = space
        .opens()
        .map_err(|e| JsonError::Structure(e.to_string()))?
        .iter()
        .map(|o| space.external_ids(o))
        .collect();
    opens.sort();
    Ok(json!({ "points": points, "opens": opens }))
}

/// `"0,2"`-style key for an open set.
pub fn open_key(space: &Space, set: &IndexSet) -> String {
    space
        .external_ids(set)
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_open_key(space: &Space, key: &str, path: &str) -> Result<IndexSet, JsonError> {
    let mut set = space.empty_set();
    if key.is_empty() {
        return Ok(set);
    }
    for part in key.split(',') {
        let id: u32 = part
            .trim()
            .parse()
            .map_err(|_| JsonError::Schema { path: path.into(), message: format!("bad point `{part}`") })?;
        let idx = space
            .index_of(Point(id))
            .map_err(|e| JsonError::Structure(e.to_string()))?;
        set.insert(idx);
    }
    if !space.is_open(&set) {
        return schema_err(path, format!("`{key}` is not an open set"));
    }
    Ok(set)
}

pub fn parse_presheaf_value(v: &Value) -> Result<Presheaf, JsonError> {
    let space = parse_space_value(&v["space"])?;
    let sections_obj = v["sections"]
        .as_object()
        .ok_or(JsonError::Schema { path: "$.sections".into(), message: "expected object".into() })?;
    let mut sections: BTreeMap<IndexSet, Vec<String>> = BTreeMap::new();
    for (key, ids) in sections_obj {
        let open = parse_open_key(&space, key, &format!("$.sections[{key}]"))?;
        let labels = ids
            .as_array()
            .ok_or(JsonError::Schema {
                path: format!("$.sections[{key}]"),
                message: "expected array".into(),
            })?
            .iter()
            .map(|x| {
                x.as_str().map(|s| s.to_string()).ok_or(JsonError::Schema {
                    path: format!("$.sections[{key}]"),
                    message: "ids must be strings".into(),
                })
            })
            .collect::<Result<Vec<String>, _>>()?;
        sections.insert(open, labels);
    }
    let mut res: BTreeMap<(IndexSet, IndexSet), Vec<u32>> = BTreeMap::new();
    if let Some(restr) = v.get("restrictions").and_then(|r| r.as_object()) {
        for (key, table) in restr {
            let Some((from_key, to_key)) = key.split_once('/') else {
                return schema_err(&format!("$.restrictions[{key}]"), "expected `U/V` key");
            };
            let from = parse_open_key(&space, from_key, "$.restrictions")?;
            let to = parse_open_key(&space, to_key, "$.restrictions")?;
            let from_labels = sections.get(&from).cloned().unwrap_or_default();
            let to_labels = sections.get(&to).cloned().unwrap_or_default();
            let map = table.as_object().ok_or(JsonError::Schema {
                path: format!("$.restrictions[{key}]"),
                message: "expected object".into(),
            })?;
            let mut tbl = vec![0u32; from_labels.len()];
            for (sid, label) in from_labels.iter().enumerate() {
                let target = map.get(label).and_then(|t| t.as_str()).ok_or(JsonError::Schema {
                    path: format!("$.restrictions[{key}]"),
                    message: format!("missing image of `{label}`"),
                })?;
                let tid = to_labels.iter().position(|l| l == target).ok_or(JsonError::Schema {
                    path: format!("$.restrictions[{key}]"),
                    message: format!("unknown target id `{target}`"),
                })?;
                tbl[sid] = tid as u32;
            }
            res.insert((from, to), tbl);
        }
    }
    // Identity restrictions are implicit.
    for (open, labels) in &sections {
        res.entry((open.clone(), open.clone()))
            .or_insert_with(|| (0..labels.len() as u32).collect());
    }
    Ok(Presheaf::new(space, sections, res))
}

pub fn presheaf_to_value(p: &Presheaf) -> Result<Value, JsonError> {
    let space = p.space();
    let opens = space.opens().map_err(|e| JsonError::Structure(e.to_string()))?.to_vec();
    // Section ids must be unique within an open for the table encoding;
    // disambiguate duplicated display labels positionally.
    let unique_labels = |u: &crate::bitset::IndexSet| -> Vec<String> {
        let raw = p.section_labels(u);
        let mut seen = std::collections::BTreeMap::new();
        raw.iter()
            .map(|l| {
                let n = seen.entry(l.clone()).or_insert(0usize);
                *n += 1;
                if *n == 1 { l.clone() } else { format!("{l}#{n}") }
            })
            .collect()
    };
    let mut sections = Map::new();
    for u in &opens {
        sections.insert(open_key(space, u), json!(unique_labels(u)));
    }
    let mut restrictions = Map::new();
    for u in &opens {
        let u_labels = unique_labels(u);
        for w in &opens {
            if !w.is_subset(u) || w == u {
                continue;
            }
            let w_labels = unique_labels(w);
            if let Some(table) = p.restriction_table(u, w) {
                let mut entry = Map::new();
                for (sid, &tid) in table.iter().enumerate() {
                    entry.insert(u_labels[sid].clone(), json!(w_labels[tid as usize]));
                }
                restrictions
                    .insert(format!("{}/{}", open_key(space, u), open_key(space, w)), entry.into());
            }
        }
    }
    Ok(json!({
        "space": space_to_value(space)?,
        "sections": sections,
        "restrictions": restrictions,
    }))
}

pub fn parse_groupoid_value(v: &Value) -> Result<TopGroupoid, JsonError> {
    let base = parse_space_value(&v["base"])?;
    let arrows = parse_space_value(&v["arrows"])?;
    let point_map = |field: &str| -> Result<BTreeMap<Point, Point>, JsonError> {
        let obj = v[field].as_object().ok_or(JsonError::Schema {
            path: format!("$.{field}"),
            message: "expected object".into(),
        })?;
        let mut out = BTreeMap::new();
        for (k, val) in obj {
            let from: u32 = k.parse().map_err(|_| JsonError::Schema {
                path: format!("$.{field}"),
                message: format!("bad point `{k}`"),
            })?;
            let to = match val {
                Value::String(s) => s.parse().map_err(|_| JsonError::Schema {
                    path: format!("$.{field}[{k}]"),
                    message: "bad point".into(),
                })?,
                other => as_u32(other, &format!("$.{field}[{k}]"))?,
            };
            out.insert(Point(from), Point(to));
        }
        Ok(out)
    };
    let s = point_map("s")?;
    let t = point_map("t")?;
    let i = point_map("i")?;
    let inv = point_map("inv")?;
    let comp_obj = v["comp"]
        .as_object()
        .ok_or(JsonError::Schema { path: "$.comp".into(), message: "expected object".into() })?;
    let mut comp = BTreeMap::new();
    for (k, val) in comp_obj {
        let Some((g, f)) = k.split_once(',') else {
            return schema_err("$.comp", format!("expected `g,f` key, got `{k}`"));
        };
        let g: u32 = g.trim().parse().map_err(|_| JsonError::Schema {
            path: "$.comp".into(),
            message: format!("bad arrow `{g}`"),
        })?;
        let f: u32 = f.trim().parse().map_err(|_| JsonError::Schema {
            path: "$.comp".into(),
            message: format!("bad arrow `{f}`"),
        })?;
        let h = match val {
            Value::String(s) => s.parse().map_err(|_| JsonError::Schema {
                path: format!("$.comp[{k}]"),
                message: "bad arrow".into(),
            })?,
            other => as_u32(other, &format!("$.comp[{k}]"))?,
        };
        comp.insert((Point(g), Point(f)), Point(h));
    }
    TopGroupoid::new(base, arrows, s, t, i, inv, comp)
        .map_err(|e| JsonError::Structure(e.to_string()))
}

pub fn groupoid_to_value(g: &TopGroupoid) -> Result<Value, JsonError> {
    let arrow_id = |a: usize| g.arrows.point(a).0.to_string();
    let base_id = |x: usize| g.base.point(x).0.to_string();
    let mut s = Map::new();
    let mut t = Map::new();
    let mut inv = Map::new();
    for a in 0..g.n_arrows() {
        s.insert(arrow_id(a), json!(base_id(g.source_of(a))));
        t.insert(arrow_id(a), json!(base_id(g.target_of(a))));
        inv.insert(arrow_id(a), json!(arrow_id(g.inverse_of(a))));
    }
    let mut i = Map::new();
    for x in 0..g.base.n_points() {
        i.insert(base_id(x), json!(arrow_id(g.identity_of(x))));
    }
    let mut comp = Map::new();
    for (a, b) in g.composable_pairs() {
        if let Some(c) = g.compose(a, b) {
            comp.insert(format!("{},{}", arrow_id(a), arrow_id(b)), json!(arrow_id(c)));
        }
    }
    Ok(json!({
        "base": space_to_value(&g.base)?,
        "arrows": space_to_value(&g.arrows)?,
        "s": s, "t": t, "i": i, "inv": inv, "comp": comp,
    }))
}

pub fn parse_pseudogroup_value(v: &Value) -> Result<PrePseudogroup, JsonError> {
    let space = parse_space_value(&v["space"])?;
    let homs_obj = v["homs"]
        .as_object()
        .ok_or(JsonError::Schema { path: "$.homs".into(), message: "expected object".into() })?;
    let mut labels: BTreeMap<(IndexSet, IndexSet), Vec<String>> = BTreeMap::new();
    let pair_key = |key: &str, path: &str| -> Result<(IndexSet, IndexSet), JsonError> {
        let Some((ku, kv)) = key.split_once('/') else {
            return schema_err(path, format!("expected `U/V` key, got `{key}`"));
        };
        Ok((parse_open_key(&space, ku, path)?, parse_open_key(&space, kv, path)?))
    };
    for (key, ids) in homs_obj {
        let pair = pair_key(key, "$.homs")?;
        let list = ids
            .as_array()
            .ok_or(JsonError::Schema {
                path: format!("$.homs[{key}]"),
                message: "expected array".into(),
            })?
            .iter()
            .map(|x| {
                x.as_str().map(|s| s.to_string()).ok_or(JsonError::Schema {
                    path: format!("$.homs[{key}]"),
                    message: "ids must be strings".into(),
                })
            })
            .collect::<Result<Vec<String>, _>>()?;
        labels.insert(pair, list);
    }
    // Hom-sets default to empty.
    let opens = space.opens().map_err(|e| JsonError::Structure(e.to_string()))?.to_vec();
    for u in &opens {
        for w in &opens {
            labels.entry((u.clone(), w.clone())).or_default();
        }
    }
    let find = |pair: &(IndexSet, IndexSet), id: &str, path: &str| -> Result<MorId, JsonError> {
        labels[pair]
            .iter()
            .position(|l| l == id)
            .map(|i| i as MorId)
            .ok_or(JsonError::Schema { path: path.into(), message: format!("unknown id `{id}`") })
    };

    let mut compose = BTreeMap::new();
    if let Some(comp_obj) = v.get("compose").and_then(|c| c.as_object()) {
        for (key, table) in comp_obj {
            let parts: Vec<&str> = key.split('/').collect();
            if parts.len() != 3 {
                return schema_err("$.compose", format!("expected `U/V/W` key, got `{key}`"));
            }
            let u = parse_open_key(&space, parts[0], "$.compose")?;
            let vv = parse_open_key(&space, parts[1], "$.compose")?;
            let w = parse_open_key(&space, parts[2], "$.compose")?;
            let uv = (u.clone(), vv.clone());
            let vw = (vv.clone(), w.clone());
            let uw = (u.clone(), w.clone());
            let mut tbl = vec![vec![0 as MorId; labels[&uv].len()]; labels[&vw].len()];
            let obj = table.as_object().ok_or(JsonError::Schema {
                path: format!("$.compose[{key}]"),
                message: "expected object".into(),
            })?;
            let mut seen = vec![vec![false; labels[&uv].len()]; labels[&vw].len()];
            for (gf, h) in obj {
                let Some((gk, fk)) = gf.split_once(',') else {
                    return schema_err(&format!("$.compose[{key}]"), "expected `g,f` entry");
                };
                let g = find(&vw, gk.trim(), &format!("$.compose[{key}]"))?;
                let f = find(&uv, fk.trim(), &format!("$.compose[{key}]"))?;
                let h = h.as_str().ok_or(JsonError::Schema {
                    path: format!("$.compose[{key}]"),
                    message: "composite must be a string id".into(),
                })?;
                tbl[g as usize][f as usize] = find(&uw, h, &format!("$.compose[{key}]"))?;
                seen[g as usize][f as usize] = true;
            }
            if seen.iter().flatten().any(|&b| !b) {
                return schema_err(&format!("$.compose[{key}]"), "composition table not total");
            }
            compose.insert((u, vv, w), tbl);
        }
    }

    let mut incl = BTreeMap::new();
    if let Some(incl_obj) = v.get("incl").and_then(|c| c.as_object()) {
        for (key, id) in incl_obj {
            let pair = pair_key(key, "$.incl")?;
            let id = id.as_str().ok_or(JsonError::Schema {
                path: format!("$.incl[{key}]"),
                message: "expected string id".into(),
            })?;
            let mor = find(&pair, id, &format!("$.incl[{key}]"))?;
            incl.insert(pair, mor);
        }
    }

    let mut underlying: Option<BTreeMap<(IndexSet, IndexSet), Vec<PointMap>>> = None;
    if let Some(under_obj) = v.get("underlying").and_then(|c| c.as_object()) {
        let mut out: BTreeMap<(IndexSet, IndexSet), Vec<PointMap>> = BTreeMap::new();
        for (key, per_mor) in under_obj {
            let pair = pair_key(key, "$.underlying")?;
            let dom = space.open_set(pair.0.clone()).map_err(|e| JsonError::Structure(e.to_string()))?;
            let cod = space.open_set(pair.1.clone()).map_err(|e| JsonError::Structure(e.to_string()))?;
            let obj = per_mor.as_object().ok_or(JsonError::Schema {
                path: format!("$.underlying[{key}]"),
                message: "expected object".into(),
            })?;
            let mut maps = Vec::new();
            for label in &labels[&pair] {
                let entry = obj.get(label).and_then(|m| m.as_object()).ok_or(JsonError::Schema {
                    path: format!("$.underlying[{key}]"),
                    message: format!("missing map for `{label}`"),
                })?;
                let mut assign = BTreeMap::new();
                for (xk, yv) in entry {
                    let x: u32 = xk.parse().map_err(|_| JsonError::Schema {
                        path: format!("$.underlying[{key}][{label}]"),
                        message: "bad point".into(),
                    })?;
                    let y: u32 = yv
                        .as_str()
                        .and_then(|s| s.parse().ok())
                        .or_else(|| yv.as_u64().and_then(|n| u32::try_from(n).ok()))
                        .ok_or(JsonError::Schema {
                            path: format!("$.underlying[{key}][{label}]"),
                            message: "bad point".into(),
                        })?;
                    assign.insert(Point(x), Point(y));
                }
                maps.push(
                    PointMap::new(dom.clone(), cod.clone(), &assign)
                        .map_err(|e| JsonError::Structure(e.to_string()))?,
                );
            }
            out.insert(pair, maps);
        }
        underlying = Some(out);
    }

    PrePseudogroup::from_backend(
        space,
        labels,
        Backend::Table(TableData { compose, incl, underlying }),
    )
    .map_err(|e| JsonError::Structure(e.to_string()))
}

pub fn pseudogroup_to_value(c: &PrePseudogroup) -> Result<Value, JsonError> {
    let t = crate::corpus::pseudogroups::materialize_table(c)
        .map_err(|e| JsonError::Structure(e.to_string()))?;
    let space = t.space().clone();
    let opens = t.opens().to_vec();
    let mut homs = Map::new();
    let mut incl = Map::new();
    let mut compose = Map::new();
    let mut underlying = Map::new();
    let mut have_underlying = true;
    for u in &opens {
        for w in &opens {
            let key = format!("{}/{}", open_key(&space, u), open_key(&space, w));
            let list: Vec<String> =
                (0..t.hom_len(u, w) as MorId).map(|f| t.hom_label(u, w, f)).collect();
            if u.is_subset(w) {
                incl.insert(
                    key.clone(),
                    json!(t.hom_label(u, w, t.incl(u, w).map_err(|e| JsonError::Structure(e.to_string()))?)),
                );
            }
            let mut under_entry = Map::new();
            for f in 0..t.hom_len(u, w) as MorId {
                match t
                    .intrinsic_underlying(u, w, f)
                    .map_err(|e| JsonError::Structure(e.to_string()))?
                {
                    Some(m) => {
                        let mut mm = Map::new();
                        for (x, y) in m.graph() {
                            mm.insert(
                                space.point(x).0.to_string(),
                                json!(space.point(y).0.to_string()),
                            );
                        }
                        under_entry.insert(t.hom_label(u, w, f), mm.into());
                    }
                    None => have_underlying = false,
                }
            }
            if !under_entry.is_empty() {
                underlying.insert(key.clone(), under_entry.into());
            }
            homs.insert(key, json!(list));
        }
    }
    for u in &opens {
        for vv in &opens {
            if t.hom_len(u, vv) == 0 {
                continue;
            }
            for w in &opens {
                if t.hom_len(vv, w) == 0 {
                    continue;
                }
                let mut entry = Map::new();
                for g in 0..t.hom_len(vv, w) as MorId {
                    for f in 0..t.hom_len(u, vv) as MorId {
                        let h = t
                            .compose(u, vv, w, g, f)
                            .map_err(|e| JsonError::Structure(e.to_string()))?;
                        entry.insert(
                            format!("{},{}", t.hom_label(vv, w, g), t.hom_label(u, vv, f)),
                            json!(t.hom_label(u, w, h)),
                        );
                    }
                }
                compose.insert(
                    format!(
                        "{}/{}/{}",
                        open_key(&space, u),
                        open_key(&space, vv),
                        open_key(&space, w)
                    ),
                    entry.into(),
                );
            }
        }
    }
    let mut out = Map::new();
    out.insert("space".into(), space_to_value(&space)?);
    out.insert("homs".into(), homs.into());
    out.insert("compose".into(), compose.into());
    out.insert("incl".into(), incl.into());
    if have_underlying {
        out.insert("underlying".into(), underlying.into());
    }
    Ok(out.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::groupoids::pair_groupoid;
    use crate::corpus::groups::cyclic;
    use crate::corpus::spaces::{discrete, sierpinski};
    use crate::presheaf::skyscraper;
    use crate::pseudogroup::{constant_group_sheaf, from_group_sheaf};
    use proptest::prelude::*;

    #[test]
    fn space_roundtrip() {
        for s in [sierpinski(), discrete(3)] {
            let v = space_to_value(&s).unwrap();
            let parsed = parse_space_value(&v).unwrap();
            assert_eq!(s, parsed);
            assert_eq!(v, space_to_value(&parsed).unwrap());
        }
    }

    #[test]
    fn presheaf_roundtrip() {
        let p = skyscraper(&sierpinski(), Point(1), &["a", "b"]).unwrap();
        let v = presheaf_to_value(&p).unwrap();
        let parsed = parse_presheaf_value(&v).unwrap();
        assert!(parsed.check().unwrap().is_clean());
        assert_eq!(v, presheaf_to_value(&parsed).unwrap());
    }

    #[test]
    fn groupoid_roundtrip() {
        let g = pair_groupoid(2);
        let v = groupoid_to_value(&g).unwrap();
        let parsed = parse_groupoid_value(&v).unwrap();
        assert_eq!(v, groupoid_to_value(&parsed).unwrap());
    }

    #[test]
    fn pseudogroup_roundtrip_preserves_composition() {
        let c = from_group_sheaf(constant_group_sheaf(&discrete(2), &cyclic(2)).unwrap()).unwrap();
        let v = pseudogroup_to_value(&c).unwrap();
        let parsed = parse_pseudogroup_value(&v).unwrap();
        for u in c.opens().to_vec() {
            for w in c.opens().to_vec() {
                assert_eq!(c.hom_len(&u, &w), parsed.hom_len(&u, &w));
            }
        }
        assert_eq!(v, pseudogroup_to_value(&parsed).unwrap());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_instance("{"), Err(JsonError::Parse(_))));
        assert!(matches!(parse_instance("[1,2]"), Err(JsonError::Schema { .. })));
    }

    #[test]
    fn invalid_topology_is_a_structural_error() {
        let text = r#"{"points": [0, 1], "opens": [[], [0], [1]]}"#;
        assert!(matches!(parse_instance(text), Err(JsonError::Structure(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        // Canonical serialization is stable across a parse round trip for
        // arbitrary small preorder-built spaces.
        #[test]
        fn space_serialization_is_canonical(rel in prop::collection::vec((0u32..4, 0u32..4), 0..8)) {
            let points = [0u32, 1, 2, 3];
            let mut arrows: Vec<(u32, u32)> = (0..4).map(|p| (p, p)).collect();
            arrows.extend(rel);
            // Transitive closure to make it a preorder.
            loop {
                let mut added = false;
                let snapshot = arrows.clone();
                for &(a, b) in &snapshot {
                    for &(c, d) in &snapshot {
                        if b == c && !arrows.contains(&(a, d)) {
                            arrows.push((a, d));
                            added = true;
                        }
                    }
                }
                if !added { break; }
            }
            let space = Space::from_preorder(&points, &arrows).unwrap();
            let v = space_to_value(&space).unwrap();
            let parsed = parse_space_value(&v).unwrap();
            prop_assert_eq!(v, space_to_value(&parsed).unwrap());
        }
    }
}
