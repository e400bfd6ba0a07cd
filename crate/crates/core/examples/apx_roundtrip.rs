//! Export a framework to apx and JSON, read the apx back, and reason on
//! the imported copy.

use repairaf::framework::{parse_apx, rename_to_named};
use repairaf::parser::parse_instance;
use repairaf::repairs::framework_for;
use repairaf::semantics::{extensions, SemanticsKind};

fn main() -> repairaf::Result<()> {
    let parsed = parse_instance(include_str!("../data/worked/running_example.cdb"))?;
    let (_, setaf) = framework_for(&parsed.instance)?;
    let names = parsed.names();

    let apx = setaf.to_apx(&names);
    print!("{apx}");
    let imported = parse_apx(&apx)?;
    assert_eq!(imported, rename_to_named(&setaf, &names));

    for e in extensions(&imported, SemanticsKind::Preferred)? {
        let args: Vec<String> = e.arguments(&imported).iter().map(|a| a.to_string()).collect();
        println!("pref: {}", args.join(" "));
    }
    let json = setaf.to_json(&names);
    println!("{}", serde_json::to_string_pretty(&json["attacks"][0]).expect("serializable"));
    Ok(())
}
