//! Minimal conflicts of denial constraints and supports of local-as-view
//! TGDs, the two ingredients of the attack relation.

use repairaf::framework::build_dc_setaf;
use repairaf::grounding::{compute_conflicts, compute_supports};
use repairaf::parser::parse_instance;

fn main() -> repairaf::Result<()> {
    let orders = parse_instance(include_str!("../data/worked/conflicts.cdb"))?;
    for c in compute_conflicts(&orders.instance) {
        println!("constraint {}: conflict {{{}}}", c.witness, orders.describe(&c.facts).join(", "));
    }
    let setaf = build_dc_setaf(&orders.instance)?;
    let names = orders.names();
    print!("{}", setaf.to_apx(&names));

    let staff = parse_instance(include_str!("../data/worked/supports.cdb"))?;
    for label in ["s1", "s2", "s3"] {
        let s = staff.by_label(label);
        let supports = compute_supports(&staff.instance, 0, &s, false)?;
        let shown: Vec<String> = supports
            .iter()
            .map(|sup| format!("{{{}}}", staff.describe(&sup.facts).join(", ")))
            .collect();
        println!("supports of {label} for the first TGD: {}", if shown.is_empty() { "none".into() } else { shown.join(" ") });
    }
    Ok(())
}
