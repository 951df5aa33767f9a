use super::*;
use crate::field::Builtin;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

fn shear(profile: &str, angle: f64) -> VectorField {
    Builtin::Shear { profile: profile.into(), angle }.build().unwrap()
}

fn cosh() -> VectorField {
    Builtin::Cosh.build().unwrap()
}

#[test]
fn constant_shear_streamline_is_a_line() {
    let f = shear("1", 0.0).with_domain(Rect::square(20.0)).unwrap();
    let traj = trace_streamline(&f, [0.0, 0.0], &IntegratorConfig::span(0.0, 10.0)).unwrap();
    for s in traj.samples() {
        assert!((s.x[0] - s.t).abs() <= 1e-9 && s.x[1].abs() <= 1e-9);
    }
    assert_eq!(traj.t_range(), (0.0, 10.0));
    assert_eq!(traj.events()[0].kind, EventKind::SpanEnd);
}

#[test]
fn cosh_streamline_conserves_u() {
    let f = cosh();
    let cfg = IntegratorConfig::span(-20.0, 20.0);
    let traj = trace_streamline(&f, [0.0, 1.0], &cfg).unwrap();
    assert!(traj.samples().iter().all(|s| (s.u - 1.0).abs() <= 1e-8));
    assert!(traj.events().iter().all(|e| e.kind == EventKind::DomainExit));
    let oracle = trace_streamline(&f, [0.0, 1.0], &cfg.with_tolerances(1e-12, 1e-14)).unwrap();
    let (a, b) = oracle.t_range();
    for s in traj.samples().iter().filter(|s| s.t > a && s.t < b) {
        let d = geom::dist(s.x, oracle.state_at(s.t));
        assert!(d <= 1e-6 * (1.0 + geom::norm(s.x)), "t={} d={d}", s.t);
    }
}

#[test]
fn cellular_orbit_closes() {
    let f = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
    let x0 = [FRAC_PI_2 + 0.3, FRAC_PI_2];
    let traj = trace_streamline(&f, x0, &IntegratorConfig::span(0.0, 40.0)).unwrap();
    // Poincaré section x2 = π/2 on the side x1 > π/2, crossed downwards.
    let s = traj.samples();
    let idx = (1..s.len())
        .find(|&i| s[i].t > 1.0 && s[i - 1].x[1] > FRAC_PI_2 && s[i].x[1] <= FRAC_PI_2 && s[i].x[0] > FRAC_PI_2)
        .expect("orbit returns to the section");
    let (mut lo, mut hi) = (s[idx - 1].t, s[idx].t);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if traj.state_at(mid)[1] > FRAC_PI_2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let back = traj.state_at(hi);
    assert!(geom::dist(back, x0) <= 1e-4, "{back:?}");
}

#[test]
fn gradient_orbits_of_simple_fields() {
    let traj = trace_gradient(&shear("1", 0.0), [0.0, 0.0], &IntegratorConfig::span(0.0, 5.0)).unwrap();
    for s in traj.samples() {
        assert!(s.x[0].abs() <= 1e-12 && (s.x[1] + s.t).abs() <= 1e-9);
    }
    let traj = trace_gradient(&cosh(), [0.0, 0.0], &IntegratorConfig::span(-3.0, 3.0)).unwrap();
    for s in traj.samples() {
        assert!(s.x[0].abs() <= 1e-12 && (s.x[1] - s.t).abs() <= 1e-9 && (s.u - s.t).abs() <= 1e-9);
    }
}

#[test]
fn gradient_orbits_increase_u_at_rate_eta_squared() {
    let f = cosh().with_domain(Rect::square(6.0)).unwrap();
    let eta = 1.0; // |v|² = cosh²x1 + x2² sinh²x1 ≥ 1 everywhere
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let seeds: Vec<Point> = (0..100).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    for traj in trace_many(&f, &seeds, TrajectoryKind::Gradient, &IntegratorConfig::span(-1.0, 1.0)) {
        let traj = traj.unwrap();
        for w in traj.samples().windows(2) {
            let (dt, du) = (w[1].t - w[0].t, w[1].u - w[0].u);
            assert!(du > 0.0);
            assert!(du >= 0.9 * eta * eta * dt, "du={du} dt={dt}");
        }
    }
}

#[test]
fn arclength_streamline_has_unit_speed() {
    let traj = trace_arclength(&shear("2", 0.0), [1.0, -1.0], false, &IntegratorConfig::span(0.0, 3.0)).unwrap();
    for s in traj.samples() {
        assert!((s.x[0] - 1.0 - s.t).abs() <= 1e-9 && (s.x[1] + 1.0).abs() <= 1e-12);
    }
}

#[test]
fn arclength_polyline_length_matches_parameter() {
    let f = cosh().with_domain(Rect::square(6.0)).unwrap();
    let cfg = IntegratorConfig::span(0.0, 3.0).with_max_step(0.002);
    for x0 in [[0.0, 0.0], [0.4, -0.3], [-0.7, 0.5]] {
        let traj = trace_arclength(&f, x0, true, &cfg).unwrap();
        let (_, t1) = traj.t_range();
        assert!((traj.polyline_length() - t1).abs() <= 1e-6, "{x0:?}: {} vs {t1}", traj.polyline_length());
    }
    let traj = trace_arclength(&f, [0.0, 0.0], true, &cfg).unwrap();
    for s in traj.samples() {
        assert!(s.u >= s.t - 1e-9);
    }
}

#[test]
fn arclength_stop_event() {
    let cfg = IntegratorConfig::span(0.0, 100.0).with_stop(StopCondition::ArcLength { length: 2.5 });
    let traj = trace_streamline(&shear("2+sin(x2)", 0.3), [0.1, 0.2], &cfg).unwrap();
    let ev = traj.events()[0];
    assert_eq!(ev.kind, EventKind::ArcLengthReached);
    assert!((geom::dist(ev.x, [0.1, 0.2]) - 2.5).abs() <= 1e-9);
}

#[test]
fn level_hits() {
    let cfg = IntegratorConfig::span(-50.0, 50.0);
    let p = level_hit(&cosh(), [0.0, 0.0], 2.0, &cfg).unwrap();
    assert!(geom::dist(p, [0.0, 2.0]) <= 1e-9);
    let p = level_hit(&shear("1", 0.0), [0.0, 0.0], -3.0, &cfg).unwrap();
    assert!(geom::dist(p, [0.0, 3.0]) <= 1e-9);

    let f = shear("2+sin(x2)", 0.7);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let lambda = rng.gen_range(-10.0..10.0);
        let p = level_hit(&f, [0.3, -0.2], lambda, &cfg).unwrap();
        assert!((f.stream(p).unwrap() - lambda).abs() <= 1e-9);
    }
    let err = level_hit(&shear("1", 0.0), [0.0, 0.0], 1e6, &IntegratorConfig::span(-1.0, 1.0)).unwrap_err();
    assert!(matches!(err, TraceError::LevelNotReached { .. }));
}

#[test]
fn first_exit_of_a_ball() {
    let traj = trace_streamline(&shear("1", 0.0), [0.0, 0.0], &IntegratorConfig::span(0.0, 3.0)).unwrap();
    let (t, p) = traj.first_exit(&Region::Ball { center: [0.0, 0.0], radius: 1.0 }).unwrap();
    assert!((t - 1.0).abs() <= 1e-9 && geom::dist(p, [1.0, 0.0]) <= 1e-9);

    let traj = trace_streamline(&cosh(), [0.0, 1.0], &IntegratorConfig::span(-20.0, 20.0)).unwrap();
    let ball = Region::Ball { center: [0.0, 0.0], radius: 2.0 };
    let (t, p) = traj.first_exit_from(&ball, 0.0).unwrap();
    assert!((geom::norm(p) - 2.0).abs() <= 1e-9);
    // Oracle: fine resampling of the dense output, then bisection.
    let n = 100_000;
    let (a, b) = (0.0, traj.t_range().1);
    let mut prev = a;
    let mut hit = None;
    for k in 1..=n {
        let tk = a + (b - a) * k as f64 / n as f64;
        if geom::norm(traj.state_at(tk)) > 2.0 {
            hit = Some((prev, tk));
            break;
        }
        prev = tk;
    }
    let (mut lo, mut hi) = hit.unwrap();
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if geom::norm(traj.state_at(mid)) > 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((t - hi).abs() <= 1e-9);

    let inside = trace_streamline(&shear("1", 0.0), [0.0, 0.0], &IntegratorConfig::span(0.0, 0.5)).unwrap();
    assert_eq!(inside.first_exit(&ball).unwrap_err(), TraceError::NoExit);
}

fn admissible_builtins() -> Vec<VectorField> {
    vec![
        cosh(),
        shear("2+sin(x2)", 0.0),
        shear("1.5+cos(x2)/2", 0.9),
        Builtin::Couette { a: 1.0, b: 2.0 }.build().unwrap(),
    ]
}

#[test]
fn stream_function_conserved_on_streamlines() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for f in admissible_builtins() {
        for _ in 0..5 {
            let c = f.domain().center();
            let x0 = [c[0] + rng.gen_range(-1.0..1.0), c[1] + rng.gen_range(-1.0..1.0)];
            let traj = trace_streamline(&f, x0, &IntegratorConfig::span(-50.0, 50.0)).unwrap();
            let u0 = f.stream(x0).unwrap();
            let w0 = f.vorticity_at(x0).unwrap();
            for s in traj.samples() {
                assert!((s.u - u0).abs() <= 1e-7, "{}: {} vs {u0}", f.name(), s.u);
                let w = f.vorticity_at(s.x).unwrap();
                assert!((w - w0).abs() <= 1e-5 * (1.0 + w0.abs()), "{}: vorticity {w} vs {w0}", f.name());
            }
        }
    }
}

#[test]
fn reversibility() {
    for f in admissible_builtins() {
        let x0 = geom::add(f.domain().center(), [0.3, -0.2]);
        for kind in [TrajectoryKind::Streamline, TrajectoryKind::Gradient] {
            let fwd = trace(&f, x0, kind, &IntegratorConfig::span(0.0, 1.0)).unwrap();
            let (_, t1) = fwd.t_range();
            let end = fwd.samples().last().unwrap().x;
            let back = trace(&f, end, kind, &IntegratorConfig::span(-t1, 0.0)).unwrap();
            assert!(geom::dist(back.samples()[0].x, x0) <= 1e-7, "{} {kind:?}", f.name());
        }
    }
}

#[test]
fn orbits_leave_every_ball() {
    let f = shear("2+sin(x2)", 0.4).with_domain(Rect::square(60.0)).unwrap();
    let g = cosh().with_domain(Rect::square(60.0)).unwrap();
    for (field, kind) in [(&f, TrajectoryKind::Streamline), (&f, TrajectoryKind::Gradient), (&g, TrajectoryKind::Gradient)] {
        let traj = trace(field, [0.0, 0.0], kind, &IntegratorConfig::span(0.0, 100.0)).unwrap();
        let mut last = 0.0;
        for r in [1.0, 5.0, 10.0, 25.0, 50.0] {
            let (t, _) = traj.first_exit(&Region::Ball { center: [0.0, 0.0], radius: r }).unwrap();
            assert!(t > last);
            last = t;
        }
    }
}

#[test]
fn stagnation_is_reported() {
    let f = Builtin::Cellular { alpha: 1.0, beta: 1.0 }.build().unwrap();
    let traj = trace_streamline(&f, [0.0, 0.0], &IntegratorConfig::span(0.0, 1.0)).unwrap();
    assert_eq!(traj.events()[0].kind, EventKind::Stagnation);
}

#[test]
fn closest_point_on_dense_output() {
    let traj = trace_streamline(&shear("1", 0.0), [0.0, 0.0], &IntegratorConfig::span(0.0, 3.0)).unwrap();
    let (t, p, d) = traj.closest_point([1.2345, 0.5]);
    assert!((t - 1.2345).abs() < 1e-7 && (d - 0.5).abs() < 1e-12 && p[1].abs() < 1e-12);
}

#[test]
fn config_validation() {
    let f = cosh();
    assert!(matches!(
        trace_streamline(&f, [0.0, 0.0], &IntegratorConfig::span(1.0, 2.0)),
        Err(TraceError::InvalidConfig(_))
    ));
    assert!(matches!(
        trace_streamline(&f, [100.0, 0.0], &IntegratorConfig::default()),
        Err(TraceError::OutsideDomain(_))
    ));
}
