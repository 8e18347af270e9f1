//! Aggregating ratios across two groups: when the comparison survives.

use simplex_meanwidth::inequalities::{reversed_simpson_antidote, simpson_antidote, EightTuple};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // b beats a within each group but a concentrates weight on the better group
    let paradox = EightTuple::new([0.1, 300.0], [10.0, 31.0], [1.0, 10.0], [10.0, 1.0])?;
    // same within-group ordering, weights shifted the helpful way
    let safe = EightTuple::new([1.0, 4.0], [2.0, 9.0], [1.0, 2.0], [1.0, 3.0])?;

    for (name, t) in [("paradox", paradox), ("safe", safe)] {
        let c = simpson_antidote(&t)?;
        let r = reversed_simpson_antidote(&t)?;
        println!(
            "{name:>8}: hypothesis {:<5} reversed hypothesis {:<5} aggregate gap {:+.4}  identity residual {:.1e}",
            c.hypothesis_holds, r.hypothesis_holds, c.gap, c.identity_residual
        );
    }
    Ok(())
}
