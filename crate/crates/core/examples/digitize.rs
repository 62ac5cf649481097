//! Threshold real trajectories at 0.5 and optionally corrupt them with
//! measurement noise before digitizing.

use simbias::map_engine::{generate_trajectory, sample_x0, MapParams, RngStream};
use simbias::symbolizer::{digitize, digitize_values, perturb_measurements};

fn main() -> simbias::Result<()> {
    let mut values = vec![0.12, 0.47, 0.66];
    values.extend([0.4; 18]);
    values.extend([0.21, 0.05, 0.78, 0.97]);
    println!("hand-made sequence -> {}", digitize_values(&values)?);

    let params = MapParams::builder(3.83, 0.0).transient_skip(1000).build()?;
    let mut rng = RngStream::new(1, 0);
    let traj = generate_trajectory(&params, sample_x0(&mut rng), &mut rng)?;
    println!("mu = 3.83 settled orbit -> {}", digitize(&traj));
    for delta in [0.01, 0.17, 0.45] {
        let noisy = perturb_measurements(&traj, delta, &mut rng);
        println!("  with delta = {delta:<4}  -> {}", digitize_values(&noisy)?);
    }
    Ok(())
}
