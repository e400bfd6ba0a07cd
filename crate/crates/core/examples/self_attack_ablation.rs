//! Dropping the self-attacks of auxiliary arguments breaks the
//! correspondence between preferred extensions and repairs.

use repairaf::framework::build_id_af;
use repairaf::parser::parse_instance;
use repairaf::repairs::all_repairs;
use repairaf::semantics::{extensions, SemanticsKind};

fn main() -> repairaf::Result<()> {
    let parsed = parse_instance(include_str!("../data/worked/ablation.cdb"))?;
    let af = build_id_af(&parsed.instance)?;
    let names = parsed.names();
    for (title, framework) in [("with self-attacks", af.clone()), ("without", af.without_aux_self_attacks())] {
        println!("{title}:");
        for e in extensions(&framework, SemanticsKind::Preferred)? {
            let args: Vec<String> = e
                .arguments(&framework)
                .iter()
                .map(|a| repairaf::framework::argument_name(a, &names))
                .collect();
            println!("  {{{}}}", args.join(", "));
        }
    }
    for r in all_repairs(&parsed.instance)?.iter() {
        println!("repair: {}", parsed.describe(r).join(" "));
    }
    Ok(())
}
