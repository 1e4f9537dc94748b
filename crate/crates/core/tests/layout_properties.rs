use proptest::prelude::*;

use streamvis::layout::{init_layout, run_layout, BarnesHutTree, LayoutParams, Springs};

fn exact(pos: &[[f64; 2]], mass: &[f64], i: usize) -> [f64; 2] {
    let mut f = [0.0; 2];
    for j in 0..pos.len() {
        if j != i {
            let dx = pos[i][0] - pos[j][0];
            let dy = pos[i][1] - pos[j][1];
            let d2 = dx * dx + dy * dy;
            f[0] += 80.0 * mass[i] * mass[j] * dx / d2;
            f[1] += 80.0 * mass[i] * mass[j] * dy / d2;
        }
    }
    f
}

proptest! {
    #[test]
    fn theta_zero_is_exact(points in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, 1.0f64..10.0), 2..60)) {
        let pos: Vec<[f64; 2]> = points.iter().map(|p| [p.0, p.1]).collect();
        let mass: Vec<f64> = points.iter().map(|p| p.2).collect();
        // keep points apart so the coincidence guard never triggers
        for i in 0..pos.len() {
            for j in 0..i {
                prop_assume!((pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]) > 1e-3);
            }
        }
        let tree = BarnesHutTree::build(&pos, &mass, 0.0);
        for i in 0..pos.len() {
            let f = tree.repulsion_on(i, &pos, &mass, 80.0, 1e-4);
            let e = exact(&pos, &mass, i);
            let scale = e[0].hypot(e[1]).max(1e-9);
            prop_assert!((f[0] - e[0]).hypot(f[1] - e[1]) <= 1e-9 * scale.max(1.0));
        }
    }
}

#[test]
fn worker_count_does_not_change_positions() {
    let edges: Vec<(u32, u32, f64)> = (0..300u32).map(|i| (i % 97, (i * 7 + 3) % 97, 1.0 + (i % 4) as f64)).filter(|e| e.0 != e.1).collect();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut s = init_layout(97, 11).unwrap();
            let springs = Springs::new(97, edges.clone()).unwrap();
            run_layout(&mut s, &springs, &LayoutParams::default(), 80).unwrap().positions
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn theta_error_monotone_on_several_instances() {
    use rand::{Rng, SeedableRng};
    for seed in 0..5 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pos: Vec<[f64; 2]> = (0..200).map(|_| [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)]).collect();
        let mass: Vec<f64> = (0..200).map(|_| rng.gen_range(1.0..4.0)).collect();
        let mean_err = |theta| {
            let tree = BarnesHutTree::build(&pos, &mass, theta);
            (0..pos.len())
                .map(|i| {
                    let f = tree.repulsion_on(i, &pos, &mass, 80.0, 1e-4);
                    let e = exact(&pos, &mass, i);
                    (f[0] - e[0]).hypot(f[1] - e[1]) / e[0].hypot(e[1])
                })
                .sum::<f64>()
                / pos.len() as f64
        };
        let (a, b, c) = (mean_err(1.0), mean_err(0.5), mean_err(0.2));
        assert!(a > b && b > c, "seed {seed}: {a} {b} {c}");
    }
}
