//! Repairs of the employees/departments instance, computed twice: by
//! subset enumeration and from the preferred extensions of its framework.

use repairaf::parser::parse_instance;
use repairaf::repairs::{all_repairs, framework_for, repairs_via_argumentation};

fn main() -> repairaf::Result<()> {
    let parsed = parse_instance(include_str!("../data/worked/running_example.cdb"))?;
    let cdb = &parsed.instance;

    let (construction, setaf) = framework_for(cdb)?;
    println!(
        "profile {}: {} with {} arguments and {} attacks",
        cdb.profile(),
        construction.name(),
        setaf.len(),
        setaf.attacks().len()
    );

    let oracle = all_repairs(cdb)?;
    let via_af = repairs_via_argumentation(cdb)?;
    assert_eq!(oracle, via_af);
    for repair in oracle.iter() {
        println!("repair: {}", parsed.describe(repair).join(" "));
    }
    Ok(())
}
