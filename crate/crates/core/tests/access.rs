use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soapfilm::access::{
    accessibility_report, circle, cone_margin, fixtures, is_accessible_at, totally_accessible, wedge_sum_lemma,
    BoundarySamples,
};

fn recheck(b: &BoundarySamples) {
    let all: Vec<&Vec<f64>> = b.points().collect();
    for x in b.points() {
        if let Some(c) = is_accessible_at(x, b) {
            let others: Vec<&Vec<f64>> = all.iter().copied().filter(|y| *y != x).collect();
            if c.theta > 0.0 {
                assert!(cone_margin(&c.apex, &c.axis, c.theta, &others) >= 0.0);
            }
            assert!(c.margin >= 0.0);
            assert!((c.axis.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
            assert!(c.theta < std::f64::consts::PI);
            let d: f64 = c.nu1.iter().zip(&c.nu2).map(|(a, b)| a * b).sum();
            assert!(d < 1.0);
            for y in &others {
                let z: Vec<f64> = y.iter().zip(&c.apex).map(|(a, b)| a - b).collect();
                for nu in [&c.nu1, &c.nu2] {
                    assert!(z.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>() >= -1e-12);
                }
            }
        }
    }
}

#[test]
fn nested_circles_inner_component_is_inaccessible() {
    let b = fixtures::nested_circles(96);
    let rep = accessibility_report(&b);
    assert_eq!(rep[0].accessible, 0);
    assert!(!rep[0].accessible_any);
    assert!(!totally_accessible(&rep));
    recheck(&b);
}

#[test]
fn coaxial_and_three_circle_sets_are_accessible() {
    for b in [fixtures::coaxial_circles(0.5, 96), fixtures::three_circles(96)] {
        let rep = accessibility_report(&b);
        assert!(totally_accessible(&rep), "{rep:?}");
        recheck(&b);
    }
    let rep = accessibility_report(&fixtures::coaxial_circles(0.5, 96));
    assert!(rep.iter().all(|c| c.accessible_fraction == 1.0));
}

#[test]
fn single_circle_is_accessible_in_its_plane() {
    let b = BoundarySamples::new(vec![circle([0.0; 3], 1.0, [0.0, 0.0, 1.0], 64)]).unwrap();
    for x in b.points() {
        let c = is_accessible_at(x, &b).expect("planar convex curve");
        assert!(c.axis[2].abs() < 1e-9);
        assert!(c.theta < std::f64::consts::PI);
    }
}

#[test]
fn degenerate_boundary_gives_zero_opening() {
    let b = BoundarySamples::new(vec![vec![vec![1.0, 2.0, 3.0]; 4]]).unwrap();
    let c = is_accessible_at(&[1.0, 2.0, 3.0], &b).unwrap();
    assert_eq!(c.theta, 0.0);
}

fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let l = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (w, x, y, z) = (q[0] / l, q[1] / l, q[2] / l, q[3] / l);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(m: &[[f64; 3]; 3], t: &[f64; 3], p: &[f64]) -> Vec<f64> {
    (0..3).map(|i| (0..3).map(|j| m[i][j] * p[j]).sum::<f64>() + t[i]).collect()
}

#[test]
fn certificates_follow_rigid_motions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = fixtures::three_circles(32);
    for _ in 0..5 {
        let m = random_rotation(&mut rng);
        let t = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let moved = BoundarySamples::new(
            b.components.iter().map(|c| c.iter().map(|p| apply(&m, &t, p)).collect()).collect(),
        )
        .unwrap();
        for (x, y) in b.points().zip(moved.points()).step_by(7) {
            match (is_accessible_at(x, &b), is_accessible_at(y, &moved)) {
                (Some(c1), Some(c2)) => {
                    let e = apply(&m, &[0.0; 3], &c1.axis);
                    for (a, b) in e.iter().zip(&c2.axis) {
                        assert!((a - b).abs() < 1e-10);
                    }
                    assert!((c1.theta - c2.theta).abs() < 1e-10);
                }
                (None, None) => {}
                _ => panic!("accessibility changed under a rigid motion"),
            }
        }
    }
}

#[test]
fn adding_points_never_creates_accessibility() {
    let base = fixtures::coaxial_circles(0.5, 48);
    let mut bigger = base.clone();
    bigger.components.push(circle([0.0; 3], 3.0, [0.0, 0.0, 1.0], 48));
    let before = accessibility_report(&base);
    let after = accessibility_report(&bigger);
    for k in 0..2 {
        assert!(after[k].accessible_fraction <= before[k].accessible_fraction);
    }
    for x in base.points() {
        if is_accessible_at(x, &base).is_none() {
            assert!(is_accessible_at(x, &bigger).is_none());
        }
    }
}

#[test]
fn csv_round_trip() {
    let b = fixtures::three_circles(12);
    let mut buf = Vec::new();
    b.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("component,x,y,z\n"));
    let back = BoundarySamples::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, b);
    assert!(BoundarySamples::read_csv("component,x,y,z\n0,1,nan_text,2\n".as_bytes()).is_err());
}

#[test]
fn wedge_lemma_random_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut min_len = f64::INFINITY;
    for _ in 0..10_000 {
        let phi = rng.gen_range(1e-3..std::f64::consts::FRAC_PI_2 - 1e-6);
        let count = 2 * rng.gen_range(1..8) + 1;
        let angles: Vec<f64> = (0..count).map(|_| rng.gen_range(-phi..=phi)).collect();
        let w = wedge_sum_lemma(&angles, phi).unwrap();
        assert!(w.pairing_bound > 1.0 && w.sum_length >= w.pairing_bound * (1.0 - 1e-12));
        min_len = min_len.min(w.sum_length);
    }
    assert!(min_len > 1.0);
}

#[test]
fn wedge_lemma_near_right_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let phi = 1.4;
        let angles: Vec<f64> = (0..3).map(|_| if rng.gen_bool(0.5) { phi } else { -phi }).collect();
        let w = wedge_sum_lemma(&angles, phi).unwrap();
        assert!(w.sum_length > 1.0 && w.sum_length >= w.pairing_bound * (1.0 - 1e-12));
    }
}
