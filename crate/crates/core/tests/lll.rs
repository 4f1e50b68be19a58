use rado_core::lll::{
    check_lll_condition, check_lll_condition_exact, lll_lower_bound, lll_margins, solution_count_bound, EventSystem,
    RationalEventSystem,
};
use rado_core::{enumerate_solutions, LinearEquation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_system(rng: &mut StdRng) -> EventSystem {
    let n = rng.gen_range(1..=8);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    let p = (0..n).map(|_| rng.gen_range(0.001..0.2)).collect();
    let y = (0..n).map(|_| rng.gen_range(1.01..4.0)).collect();
    EventSystem::from_edges(p, &edges, y).unwrap()
}

#[test]
fn lowering_a_probability_never_breaks_the_condition() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut held = 0;
    for _ in 0..1000 {
        let sys = random_system(&mut rng);
        let i = rng.gen_range(0..sys.len());
        let p = sys.probabilities()[i] * rng.gen_range(0.0..1.0f64);
        if p <= 0.0 {
            continue;
        }
        let lower = sys.with_probability(i, p).unwrap();
        if check_lll_condition(&sys) {
            held += 1;
            assert!(check_lll_condition(&lower));
        }
        let before = lll_margins(&sys);
        let after = lll_margins(&lower);
        for (b, a) in before.iter().zip(&after) {
            assert!(a.margin() >= b.margin() - 1e-15);
        }
    }
    assert!(held > 100, "{held}");
}

#[test]
fn exact_mode_agrees_away_from_equality() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let sys = random_system(&mut rng);
        let margins = lll_margins(&sys);
        if margins.iter().any(|m| m.margin().abs() < 1e-9) {
            continue;
        }
        let exact = RationalEventSystem::from_floats(&sys);
        assert_eq!(check_lll_condition_exact(&exact), check_lll_condition(&sys));
    }
}

/// For each `n <= cap`, the largest number of solutions in `[1, n]`
/// containing one fixed element, counted from one enumeration at `cap`.
fn max_through_element(eq: &LinearEquation, cap: u64) -> Vec<u64> {
    let c = cap as usize;
    // delta[x][t]: solutions containing x whose maximum entry is t
    let mut delta = vec![vec![0u64; c + 1]; c + 1];
    for s in enumerate_solutions(eq, cap).unwrap() {
        let top = *s.iter().max().unwrap() as usize;
        let mut seen: Vec<u64> = s.clone();
        seen.sort_unstable();
        seen.dedup();
        for x in seen {
            delta[x as usize][top] += 1;
        }
    }
    let mut best = vec![0u64; c + 1];
    for row in delta.iter().skip(1) {
        let mut run = 0;
        for n in 1..=c {
            run += row[n];
            best[n] = best[n].max(run);
        }
    }
    best
}

#[test]
fn count_bound_dominates_actual_counts() {
    let eqs = [
        "x+y=z".parse::<LinearEquation>().unwrap(),
        "x1+x2+x3=x4".parse().unwrap(),
        LinearEquation::e_mkl(4, 1, 4).unwrap(),
        LinearEquation::e_mkl(4, 7, 4).unwrap(),
        LinearEquation::e_mkl(4, 30, 4).unwrap(),
    ];
    for eq in &eqs {
        let best = max_through_element(eq, 200);
        for n in 1..=200u64 {
            let bound = solution_count_bound(eq.arity() as u32, n).unwrap().per_element;
            assert!(u128::from(best[n as usize]) <= bound, "{eq} n={n}: {} > {bound}", best[n as usize]);
        }
    }
}

#[test]
fn lower_bound_grows_with_m_r() {
    for r in 2..=5u32 {
        for c2 in [0.5, 1.0, 2.0, 7.5] {
            let mut prev = 0.0;
            let start = (std::f64::consts::E * c2 / f64::from(r - 1)).floor() as u64 + 1;
            for m_r in (start..start + 2000).step_by(7) {
                let v = lll_lower_bound(m_r, r, c2).unwrap();
                assert!(v > prev, "r={r} c2={c2} m_r={m_r}");
                prev = v;
            }
        }
    }
}
