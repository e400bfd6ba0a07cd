//! Cross-checks repairs against naive, preferred and stable extensions on
//! random instances of every constraint profile.

use repairaf::model::ConstraintProfile;
use repairaf::reductions::random_instance;
use repairaf::repairs::{check_equivalence, Budgets};

fn main() -> repairaf::Result<()> {
    let profiles = ["fd", "dc", "id", "lav", "fd+id", "dc+lav", "fd+id+dc+lav"];
    for p in profiles {
        let profile: ConstraintProfile = p.parse().expect("known profile");
        let mut passed = 0;
        for seed in 0..20 {
            let cdb = random_instance(seed, profile, 6);
            let report = check_equivalence(&cdb, Budgets::default())?;
            if report.passed() {
                passed += 1;
            } else {
                println!("seed {seed}:\n{report}");
            }
        }
        println!("{p:<14} {passed}/20 instances agree");
    }
    Ok(())
}
