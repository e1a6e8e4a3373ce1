//! Kullback-Leibler divergences, Bahadur rates and the Mobius maps between
//! the upper half-plane and the unit disk.
//!
//! ```text
//! cargo run --example geometry
//! ```

use cauchy_est::{
    bahadur_rate, kl_circular, kl_halfplane, mobius_to_disk, sl2_act, HalfPlanePoint, Sl2Matrix,
};

fn main() -> cauchy_est::Result<()> {
    let a = HalfPlanePoint::new(0.0, 1.0)?;
    let b = HalfPlanePoint::new(3.0, 2.0)?;
    println!("K(P_a | P_b)         = {:.6}", kl_halfplane(a, b));
    println!("K(P_b | P_a)         = {:.6}", kl_halfplane(b, a));

    // The divergence only depends on the hyperbolic position of the pair.
    let m = Sl2Matrix::new(2.0, 1.0, 0.5, 1.0)?;
    let (ma, mb) = (sl2_act(m, a)?, sl2_act(m, b)?);
    println!("after x -> (2x+1)/(x/2+1): {:.6}", kl_halfplane(ma, mb));

    // Same pair seen through phi_alpha on the circular Cauchy family.
    let alpha = HalfPlanePoint::I;
    let (wa, wb) = (mobius_to_disk(a, alpha)?, mobius_to_disk(b, alpha)?);
    println!("disk images: {:?} {:?}", wa.to_complex(), wb.to_complex());
    println!("circular K           = {:.6}", kl_circular(wa, wb));

    println!("\n  eps     b(eps, i)   b / eps^2");
    for eps in [1.0, 0.5, 0.1, 0.01, 0.001] {
        let r = bahadur_rate(eps, a)?;
        println!("{eps:6}  {r:10.3e}  {:9.5}", r / (eps * eps));
    }
    Ok(())
}
