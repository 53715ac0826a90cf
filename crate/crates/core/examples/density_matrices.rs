//! Entropy, fidelity and partial traces of small states.

use cq_combine::linalg::{fidelity, partial_trace, relative_entropy, tensor, von_neumann_entropy, DensityMatrix, C64};
use cq_combine::Result;

fn main() -> Result<()> {
    let plus = DensityMatrix::pure(&[C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)])?;
    let mixed = DensityMatrix::maximally_mixed(2);
    let skewed = DensityMatrix::diagonal(&[0.9, 0.1])?;

    println!("S(|+><+|)      = {:.6}", von_neumann_entropy(&plus)?);
    println!("S(I/2)         = {:.6}", von_neumann_entropy(&mixed)?);
    println!("F(|+>, I/2)    = {:.6}", fidelity(&plus, &mixed)?);
    println!("D(skewed||I/2) = {:.6}", relative_entropy(&skewed, &mixed)?);

    // Bell state: both marginals are maximally mixed.
    let s = 0.5f64.sqrt();
    let z = C64::new(0.0, 0.0);
    let bell = DensityMatrix::pure(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)])?;
    let reduced = partial_trace(bell.matrix(), &[2, 2], &[0])?;
    println!("Bell marginal  = {:?}", reduced.diagonal_real());

    let product = tensor(skewed.matrix(), plus.matrix());
    println!("S(skewed (x) |+>) = {:.6}", von_neumann_entropy(&DensityMatrix::new(product)?)?);
    Ok(())
}
