//! Dual cone, extremal rays and separation for a polyhedral cone.

use cone_spectra::cones::{double_dual_check, dual_cone, extremal_rays, separate, PolyhedralCone};

fn main() -> cone_spectra::Result<()> {
    let c = PolyhedralCone::new(
        3,
        vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![0.0, -1.0, 1.0],
            vec![0.0, 0.0, 1.0],
        ],
    )?;
    println!("{}", serde_json::to_string(&c).expect("json"));

    let d = dual_cone(&c)?;
    println!("dual generators {:?}", d.generators());
    println!("double dual recovers C: {}", double_dual_check(&c)?);
    println!("extremal rays {:?}", extremal_rays(&c)?);

    let outside = [2.0, 0.0, 1.0];
    let phi = separate(&c, &outside)?;
    println!(
        "functional {:?}: {:.3} at the point, {:?} on the generators",
        phi.coefficients,
        phi.eval(&outside),
        c.generators().iter().map(|g| phi.eval(g)).collect::<Vec<_>>()
    );
    Ok(())
}
