//! A ∀∃ formula is true exactly when one fact of its encoding belongs to
//! every repair.

use repairaf::reductions::{qbf_to_instance, CnfFormula, QbfFormula};
use repairaf::repairs::{all_repairs, in_all_repairs, Budgets, Route};

fn main() -> repairaf::Result<()> {
    let matrix = CnfFormula::from_names([vec!["x", "y", "z"], vec!["y", "-z", "-w"], vec!["y", "z", "w"]])?;
    let phi = QbfFormula::new(vec![0, 1], vec![2, 3], matrix)?;
    let r = qbf_to_instance(&phi)?;
    let cdb = r.instance();
    println!("{} facts", cdb.facts().len());
    let repairs = all_repairs(cdb)?;
    println!("{} repairs", repairs.len());
    for repair in repairs.iter() {
        println!("  {}", r.parsed.describe(repair).join(" "));
    }
    let budgets = Budgets::default();
    println!(
        "{} in all repairs: {}",
        r.distinguished_label,
        in_all_repairs(cdb, &r.distinguished, Route::Oracle, budgets)?
    );
    Ok(())
}
