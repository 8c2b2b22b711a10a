//! DOT graph export: specialization Hasse diagrams for spaces, germ
//! bundles with basic opens as clusters for etale spaces, and arrow
//! diagrams for groupoids.

use crate::groupoid::TopGroupoid;
use crate::presheaf::{etale_space, Presheaf};
use crate::space::{Space, SpaceError};
use std::fmt::Write;

/// Hasse diagram of the specialization preorder: an edge `x → y` when `x`
/// specializes to `y` properly and no third point sits strictly between.
pub fn space_dot(space: &Space) -> String {
    let n = space.n_points();
    let mut out = String::from("digraph specialization {\n  rankdir=BT;\n");
    for x in 0..n {
        let _ = writeln!(out, "  p{} [label=\"{}\"];", space.point(x).0, space.point(x));
    }
    let strictly = |a: usize, b: usize| a != b && space.min_open(b).contains(a);
    for x in 0..n {
        for y in 0..n {
            if !strictly(x, y) {
                continue;
            }
            // Skip edges with an intermediate point; mutual pairs (x ~ y in
            // the preorder both ways) keep both edges.
            let has_middle =
                (0..n).any(|z| z != x && z != y && strictly(x, z) && strictly(z, y));
            if !has_middle {
                let _ = writeln!(out, "  p{} -> p{};", space.point(x).0, space.point(y).0);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Germ nodes plus one cluster per basic open `[f, U]`.
pub fn etale_dot(p: &Presheaf) -> Result<String, SpaceError> {
    let bundle = etale_space(p)?;
    let mut out = String::from("digraph etale {\n  node [shape=point, width=0.15];\n");
    for (g, &(x, sid)) in bundle.germs.iter().enumerate() {
        let ux = bundle.base.min_open(x);
        let _ = writeln!(
            out,
            "  g{} [label=\"{}@{}\", shape=ellipse, width=0.3];",
            g,
            p.label(ux, sid),
            bundle.base.point(x)
        );
    }
    for (i, (basic, label)) in bundle.basics.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"{}\";", label.replace('"', "'"));
        for g in basic.iter() {
            let _ = writeln!(out, "    g{g};");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    Ok(out)
}

/// Base points as boxes, arrows as labeled edges.
pub fn groupoid_dot(g: &TopGroupoid) -> String {
    let mut out = String::from("digraph groupoid {\n  node [shape=box];\n");
    for x in 0..g.base.n_points() {
        let _ = writeln!(out, "  b{} [label=\"{}\"];", g.base.point(x).0, g.base.point(x));
    }
    for a in 0..g.n_arrows() {
        let _ = writeln!(
            out,
            "  b{} -> b{} [label=\"{}\"];",
            g.base.point(g.source_of(a)).0,
            g.base.point(g.target_of(a)).0,
            g.arrows.point(a)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::groupoids::pair_groupoid;
    use crate::corpus::spaces::sierpinski;
    use crate::presheaf::Presheaf;

    #[test]
    fn sierpinski_hasse_has_the_single_edge() {
        let dot = space_dot(&sierpinski());
        assert!(dot.contains("p1 -> p0;"));
        assert!(!dot.contains("p0 -> p1;"));
    }

    #[test]
    fn constant_presheaf_etale_dot_has_one_cluster_per_basic_open() {
        let p = Presheaf::constant(&sierpinski(), &["*"]).unwrap();
        let dot = etale_dot(&p).unwrap();
        // Three distinct basic opens: [*, ∅], [*, {1}], [*, X].
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
    }

    #[test]
    fn pair_groupoid_dot_lists_all_arrows() {
        let dot = groupoid_dot(&pair_groupoid(2));
        assert_eq!(dot.matches(" -> ").count(), 4);
    }
}
