//! The binary-attack frameworks for functional and inclusion dependencies,
//! with support propagation removing unsupportable facts.

use repairaf::framework::{build_combined_af, build_fd_af, build_id_af, preprocess};
use repairaf::parser::parse_instance;
use repairaf::repairs::all_repairs;
use repairaf::semantics::{extensions, SemanticsKind};

fn main() -> repairaf::Result<()> {
    let fd = parse_instance(include_str!("../data/worked/fd_example.cdb"))?;
    let af = build_fd_af(&fd.instance)?;
    print!("{}", af.to_apx(&fd.names()));
    for e in extensions(&af, SemanticsKind::Stable)? {
        println!("stable: {}", fd.describe(&af.facts_of(&e.members)).join(" "));
    }

    let id = parse_instance(include_str!("../data/worked/id_example.cdb"))?;
    let af = build_id_af(&id.instance)?;
    let pre = preprocess(&af);
    for (i, round) in pre.rounds.iter().enumerate() {
        println!("round {}: removed {}", i + 1, id.describe(round).join(" "));
    }
    println!("survivors: {}", id.describe(&pre.surviving_facts()).join(" "));

    let both = parse_instance(include_str!("../data/worked/combined.cdb"))?;
    let af = build_combined_af(&both.instance)?;
    for sigma in [SemanticsKind::Naive, SemanticsKind::Preferred] {
        for e in extensions(&af, sigma)? {
            println!("{}: {}", sigma.short(), both.describe(&af.facts_of(&e.members)).join(" "));
        }
    }
    let repairs = all_repairs(&both.instance)?;
    println!("repairs: {}", repairs.len());
    Ok(())
}
