//! Iterate the random logistic map and print a few trajectories.
//!
//! ```text
//! cargo run --example trajectories -- [mu] [eps]
//! ```

use simbias::map_engine::{generate_trajectory, sample_x0, MapParams, RngStream};

fn main() -> simbias::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument"));
    let mu = args.next().unwrap_or(3.0);
    let eps = args.next().unwrap_or(0.125);

    let params = MapParams::builder(mu, eps).len(12).build()?;
    let mut rng = RngStream::new(7, 0);
    println!("mu = {mu}, eps = {eps}");
    for _ in 0..5 {
        let x0 = sample_x0(&mut rng);
        let traj = generate_trajectory(&params, x0, &mut rng)?;
        let vals: Vec<String> = traj.values().iter().map(|x| format!("{x:.3}")).collect();
        println!("x0 = {x0:.3}: {}", vals.join(" "));
    }
    Ok(())
}
