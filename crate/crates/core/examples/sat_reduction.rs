//! A CNF formula is satisfiable exactly when the dummy fact of its encoding
//! belongs to some repair.

use repairaf::reductions::{sat_to_instance, CnfFormula, SatMode};
use repairaf::repairs::{all_repairs, in_some_repair, rep_nonempty, Budgets, Route};

fn main() -> repairaf::Result<()> {
    let phi = CnfFormula::from_names([vec!["x", "y"], vec!["-x", "-y"], vec!["-x", "y"]])?;
    let r = sat_to_instance(&phi, SatMode::SomeRepair)?;
    let cdb = r.instance();
    println!("{} facts, {} constraints", cdb.facts().len(), cdb.constraints().len());
    for repair in all_repairs(cdb)?.iter() {
        println!("repair: {}", r.parsed.describe(repair).join(" "));
    }
    let budgets = Budgets {
        max_args: 64,
        ..Budgets::default()
    };
    println!(
        "{} in some repair: {}",
        r.distinguished_label,
        in_some_repair(cdb, &r.distinguished, Route::Both, budgets)?
    );

    let unsat = CnfFormula::from_names([vec!["x"], vec!["-x"]])?;
    let rep = sat_to_instance(&unsat, SatMode::NonEmptyRepair)?;
    println!("x and not x: non-empty repair exists: {}", rep_nonempty(rep.instance(), Route::Both, budgets)?);
    Ok(())
}
