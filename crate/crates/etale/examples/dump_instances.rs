//! Writes a handful of canonical instance files into `instances/` at the
//! workspace root: a space, a presheaf, a pseudogroup, and groupoids
//! (one of them deliberately not etale). Used as CLI demo inputs.

use etale::corpus::groupoids::pair_groupoid;
use etale::corpus::groups::cyclic;
use etale::corpus::spaces::{discrete, indiscrete, sierpinski};
use etale::groupoid::TopGroupoid;
use etale::io::json::{
    groupoid_to_value, presheaf_to_value, pseudogroup_to_value, space_to_value,
};
use etale::presheaf::skyscraper;
use etale::pseudogroup::{build_homeo_l, constant_group_sheaf, from_group_sheaf};
use etale::space::Point;

fn main() -> anyhow::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    std::fs::create_dir_all(&dir)?;
    let write = |name: &str, value: serde_json::Value| -> anyhow::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
        println!("wrote {}", path.display());
        Ok(())
    };

    write("sierpinski.json", space_to_value(&sierpinski())?)?;
    write(
        "skyscraper-presheaf.json",
        presheaf_to_value(&skyscraper(&sierpinski(), Point(1), &["a", "b"])?)?,
    )?;
    write("pair-groupoid.json", groupoid_to_value(&pair_groupoid(2))?)?;
    write(
        "z2-group-pseudogroup.json",
        pseudogroup_to_value(&from_group_sheaf(constant_group_sheaf(
            &discrete(2),
            &cyclic(2),
        )?)?)?,
    )?;
    write(
        "homeo-l-discrete2.json",
        pseudogroup_to_value(&build_homeo_l(&discrete(2))?)?,
    )?;
    write(
        "homeo-l-sierpinski.json",
        pseudogroup_to_value(&build_homeo_l(&sierpinski())?)?,
    )?;

    // A unit-groupoid shape whose arrow space is indiscrete: fails the
    // etale condition (and continuity of the source map).
    let base = discrete(2);
    let arrows = indiscrete(2);
    let ident: std::collections::BTreeMap<Point, Point> =
        (0..2).map(|x| (Point(x), Point(x))).collect();
    let comp = (0..2).map(|x| ((Point(x), Point(x)), Point(x))).collect();
    let broken = TopGroupoid::new(
        base,
        arrows,
        ident.clone(),
        ident.clone(),
        ident.clone(),
        ident,
        comp,
    )?;
    write("non-etale-groupoid.json", groupoid_to_value(&broken)?)?;
    Ok(())
}
