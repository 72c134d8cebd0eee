//! Stance-leg inverse kinematics and Jacobian-transpose torques for a
//! momentum-controller wrench.

use gaitlab::sim::{inverse_kinematics, leg_jacobian, torques_at, LegGeometry, Wrench};

fn main() -> gaitlab::Result<()> {
    let legs = LegGeometry::default();
    println!("max step at h=1: {:.3} m", legs.max_step(1.0)?);
    for dx in [-0.2, 0.0, 0.2] {
        let a = inverse_kinematics(dx, 1.0, 0.05, &legs)?;
        let j = leg_jacobian(&a, &legs);
        let tau = torques_at(&a, &legs, &Wrench::new(30.0, 490.0, 5.0));
        println!(
            "hip {dx:+.1} m ahead: angles ({:+.3}, {:+.3}, {:+.3}) det J={:+.3} torques [{:+.1}, {:+.1}, {:+.1}]",
            a.q1,
            a.q2,
            a.q3,
            j.determinant(),
            tau[0],
            tau[1],
            tau[2]
        );
    }
    Ok(())
}
