//! Extensions of small frameworks under every supported semantics, plus
//! credulous and skeptical acceptance.

use repairaf::framework::parse_apx;
use repairaf::semantics::{credulous, extensions, skeptical, Limits, SemanticsKind};

fn show(title: &str, apx: &str) -> repairaf::Result<()> {
    let af = parse_apx(apx)?;
    println!("{title}");
    for sigma in SemanticsKind::ALL {
        let sets: Vec<String> = extensions(&af, sigma)?
            .iter()
            .map(|e| {
                let names: Vec<String> = e.arguments(&af).iter().map(|a| a.to_string()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        println!("  {:<5} {}", sigma.short(), sets.join(" "));
    }
    let limits = Limits::default();
    for (i, a) in af.arguments().iter().enumerate() {
        println!(
            "  {a}: cred-pref {} skep-pref {}",
            credulous(&af, SemanticsKind::Preferred, i, limits)?,
            skeptical(&af, SemanticsKind::Preferred, i, limits)?
        );
    }
    Ok(())
}

fn main() -> repairaf::Result<()> {
    show("binary attacks", include_str!("../data/worked/chain_af.apx"))?;
    show("collective attacks", include_str!("../data/worked/collective_setaf.apx"))
}
