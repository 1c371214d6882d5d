//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lcc::bench::{run_sweep, Family, Sweep};
use lcc_core::apx::{apx_dir, apx_undir, refine_max, refine_min};
use lcc_core::graph::{CoverKind, CycleCover, GraphKind, MetricGraph};
use lcc_core::gw_forest::gw_run;
use lcc_core::instances::{gen_circular_directed, gen_random_metric, gen_tight_family};
use lcc_core::oracles::{exact_cover, exact_feasible_forest, Feasibility, LengthRule, Objective, OracleConfig};
use lcc_core::{s_core, LSpec, LengthMode};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn und(lengths: &[u64]) -> LSpec {
    LSpec::new(lengths, LengthMode::Undirected).unwrap()
}

fn dir(lengths: &[u64]) -> LSpec {
    LSpec::new(lengths, LengthMode::Directed).unwrap()
}

fn oracle() -> OracleConfig {
    OracleConfig::with_cap(12)
}

/// Random cover of `0..n` with cycle lengths drawn from `allowed`; `n` must
/// lie in the closure of `allowed`.
fn random_cover(rng: &mut ChaCha8Rng, n: usize, allowed: &LSpec, kind: CoverKind) -> CycleCover {
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let mut cycles = Vec::new();
    let mut rest = n as u64;
    while rest > 0 {
        let options: Vec<u64> = allowed
            .lengths()
            .iter()
            .copied()
            .filter(|&x| x <= rest && (x == rest || allowed.in_closure(rest - x)))
            .collect();
        let pick = options[rng.gen_range(0..options.len())] as usize;
        let at = n - rest as usize;
        cycles.push(verts[at..at + pick].to_vec());
        rest -= pick as u64;
    }
    CycleCover::new(cycles, kind)
}

/// The graph corpus shared by the forest and phase criteria: `(n, g, graph)`
/// with `g` dividing `n`.
fn forest_corpus() -> Vec<(usize, u64, MetricGraph)> {
    let mut out = Vec::new();
    for seed in 0..45u64 {
        for (n, g) in [(4usize, 2u64), (6, 2), (6, 3), (8, 2), (10, 2)] {
            let graph = gen_random_metric(n, GraphKind::Undirected, seed * 131 + n as u64 * 7 + g, 50).unwrap();
            out.push((n, g, graph));
        }
    }
    out
}

fn frobenius() -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut timed = |lengths: &[u64]| {
        let start = Instant::now();
        let spec = und(lengths);
        slowest = slowest.max(start.elapsed());
        spec
    };
    let spec = timed(&[8, 10]);
    check!(spec.g() == 2 && spec.p() == 11, "{{8,10}}: g={} p={}", spec.g(), spec.p());
    for k in 3..=10u64 {
        let spec = timed(&[k]);
        check!(spec.p() == 0 && spec.g() == k, "{{{k}}}: g={} p={}", spec.g(), spec.p());
    }
    check!(slowest < Duration::from_millis(1), "slowest construction {slowest:?}");
    Ok(format!("slowest construction {slowest:?}"))
}

fn gw_guarantee() -> Outcome {
    let start = Instant::now();
    let cfg = oracle();
    let mut count = 0;
    for (n, g, graph) in forest_corpus() {
        let spec = if g == 2 { und(&[4, 6]) } else { und(&[6, 9]) };
        let mut out = gw_run(&graph, &spec).map_err(|e| e.to_string())?;
        check!(
            out.forest.component_sizes().iter().all(|&s| (s as u64).is_multiple_of(g)),
            "n={n} g={g}: component not divisible by g"
        );
        let w = out.forest.weight(&graph).unwrap();
        let opt = exact_feasible_forest(&graph, &spec, Feasibility::ModG, &cfg).map_err(|e| e.to_string())?.weight;
        check!(w <= 2 * opt, "n={n} g={g}: forest {w} > 2 * {opt}");
        count += 1;
    }
    let elapsed = start.elapsed();
    check!(count >= 200, "only {count} instances");
    check!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{count} instances in {elapsed:.2?}"))
}

fn phase_bound() -> Outcome {
    let cfg = oracle();
    let mut runs = 0;
    let mut per_phase = 0;
    let mut max_phases = 0;
    for (n, g, graph) in forest_corpus() {
        let sets: [&[u64]; 2] = if g == 2 { [&[4, 6], &[6, 10]] } else { [&[3], &[6, 9]] };
        for lengths in sets {
            let spec = und(lengths);
            if !spec.in_closure(n as u64) {
                continue;
            }
            let (_, trace) = apx_undir(&graph, &spec, false).map_err(|e| e.to_string())?;
            let limit = spec.p() / 2 + 1;
            check!(trace.phase_count() as u64 <= limit, "n={n} L={spec}: {} phases > {limit}", trace.phase_count());
            max_phases = max_phases.max(trace.phase_count());
            let star = exact_feasible_forest(&graph, &spec, Feasibility::Closure, &cfg).map_err(|e| e.to_string())?.weight;
            for ph in &trace.phases {
                check!(
                    ph.weight_after <= ph.weight_before + 2 * star,
                    "n={n} L={spec}: phase {} -> {} with optimum forest {star}",
                    ph.weight_before,
                    ph.weight_after
                );
                per_phase += 1;
            }
            runs += 1;
        }
    }
    let mut tight = Vec::new();
    for p in [2u64, 4, 8] {
        let t = gen_tight_family(p, 100).unwrap();
        let (_, trace) = apx_undir(&t.graph, &t.lengths, false).map_err(|e| e.to_string())?;
        let limit = t.lengths.p() / 2 + 1;
        check!(trace.phase_count() as u64 <= limit, "tight p={p}: {} phases > {limit}", trace.phase_count());
        if t.graph.n() <= cfg.cap {
            let star = exact_feasible_forest(&t.graph, &t.lengths, Feasibility::Closure, &cfg)
                .map_err(|e| e.to_string())?
                .weight;
            for ph in &trace.phases {
                check!(ph.weight_after <= ph.weight_before + 2 * star, "tight p={p}: phase bound");
                per_phase += 1;
            }
        }
        tight.push(format!("p={p}:{}/{limit}", trace.phase_count()));
    }
    Ok(format!(
        "{runs} random runs (max {max_phases} phases), {per_phase} phase checks, tight phases {}",
        tight.join(" ")
    ))
}

fn undirected_ratio() -> Outcome {
    let cfg = oracle();
    let sets: [&[u64]; 4] = [&[3], &[4], &[3, 5], &[4, 6]];
    let mut runs = 0;
    let mut worst = Ratio::from_integer(1u64);
    for seed in 0..15u64 {
        for lengths in sets {
            let spec = und(lengths);
            for n in 3..=10usize {
                if !spec.in_closure(n as u64) {
                    continue;
                }
                let g = gen_random_metric(n, GraphKind::Undirected, seed * 1009 + n as u64, 80).unwrap();
                let (cover, _) = apx_undir(&g, &spec, false).map_err(|e| e.to_string())?;
                let w = g.cover_weight(&cover).unwrap();
                let opt = exact_cover(&g, &spec, Objective::Min, LengthRule::Closure, &cfg)
                    .map_err(|e| e.to_string())?
                    .weight;
                check!(w <= 4 * (spec.p() + 4) * opt, "n={n} L={spec}: {w} vs optimum {opt}");
                worst = worst.max(Ratio::new(w, opt.max(1)));
                runs += 1;
            }
        }
    }
    check!(runs >= 200, "only {runs} instances");

    let mut uniform = 0;
    let mut exact = 0;
    for lengths in sets {
        let spec = und(lengths);
        for n in 3..=10usize {
            if !spec.in_closure(n as u64) {
                continue;
            }
            for w in [1u64, 3, 7] {
                let mut g = MetricGraph::uniform(n, GraphKind::Undirected, w);
                g.verify_metric().unwrap();
                let (cover, _) = apx_undir(&g, &spec, false).map_err(|e| e.to_string())?;
                let opt = exact_cover(&g, &spec, Objective::Min, LengthRule::Closure, &cfg)
                    .map_err(|e| e.to_string())?
                    .weight;
                uniform += 1;
                if g.cover_weight(&cover).unwrap() == opt {
                    exact += 1;
                }
            }
        }
    }
    check!(exact * 10 >= uniform * 9, "uniform ratio 1 on {exact}/{uniform}");
    Ok(format!("{runs} random instances, worst ratio {worst}; uniform ratio 1 on {exact}/{uniform}"))
}

fn tight_family() -> Outcome {
    let t = gen_tight_family(2, 100).unwrap();
    let opt = exact_cover(&t.graph, &t.lengths, Objective::Min, LengthRule::Closure, &oracle())
        .map_err(|e| e.to_string())?
        .weight;
    check!(opt == 216, "oracle optimum {opt} at p=2, M=100");
    let mut sweep = Sweep::new(Family::Tight, vec![2, 4, 8, 16]);
    sweep.m = 1000;
    sweep.oracle_config = oracle();
    let rows = run_sweep(&sweep).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for (p, row) in [2u64, 4, 8, 16].into_iter().zip(&rows) {
        check!(row.error.is_none(), "p={p}: {:?}", row.error);
        let r = row.ratio.ok_or(format!("p={p}: no ratio"))?;
        check!(row.within_bound(), "p={p}: ratio {r} above bound");
        ratios.push(format!("p={p}:{:.3}", *r.numer() as f64 / *r.denom() as f64));
    }
    let last = rows[3].ratio.unwrap();
    check!(last >= Ratio::from_integer(8), "ratio {last} < 8 at p=16");
    Ok(format!("optimum 216 at p=2; ratios {}", ratios.join(" ")))
}

fn directed_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let all = dir(&(2..=12).collect::<Vec<u64>>());
    for i in 0..1000u64 {
        let n = rng.gen_range(2..=12);
        let g = gen_random_metric(n, GraphKind::Directed, i, 100).unwrap();
        let c = random_cover(&mut rng, n, &all, CoverKind::Directed);
        let wu = g.to_undirected().unwrap().cover_weight(&c.lifted()).unwrap();
        let w = g.cover_weight(&c).unwrap();
        check!(wu <= n as u64 * w, "pair {i}: lifted {wu} > {n} * {w}");
    }

    let cfg = oracle();
    let sets: [&[u64]; 3] = [&[2], &[3], &[2, 3]];
    let mut runs = 0;
    let mut worst = Ratio::from_integer(1u64);
    for seed in 0..10u64 {
        for lengths in sets {
            let spec = dir(lengths);
            for n in 2..=8usize {
                if !spec.in_closure(n as u64) {
                    continue;
                }
                let g = gen_random_metric(n, GraphKind::Directed, seed * 97 + n as u64, 60).unwrap();
                let (cover, _) = apx_dir(&g, &spec).map_err(|e| e.to_string())?;
                let w = g.cover_weight(&cover).unwrap();
                let opt = exact_cover(&g, &spec, Objective::Min, LengthRule::Closure, &cfg)
                    .map_err(|e| e.to_string())?
                    .weight;
                check!(w <= 2 * n as u64 * (spec.p() + 4) * opt, "n={n} L={spec}: {w} vs {opt}");
                worst = worst.max(Ratio::new(w, opt.max(1)));
                runs += 1;
            }
        }
    }
    Ok(format!("1000 lifting pairs; {runs} directed runs, worst ratio {worst}"))
}

fn circular_directed() -> Outcome {
    let cfg = oracle();
    let spec = dir(&[2, 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut optima = Vec::new();
    for n in [6usize, 8, 10, 12] {
        let g = gen_circular_directed(n).unwrap();
        let r = exact_cover(&g, &spec, Objective::Min, LengthRule::Exact, &cfg).map_err(|e| e.to_string())?;
        let cycles = r.witness.cycles.len() as u64;
        check!(r.weight >= cycles * n as u64, "n={n}: optimum {} with {cycles} cycles", r.weight);
        check!(3 * r.weight >= (n * n) as u64, "n={n}: optimum {} below n^2/3", r.weight);
        for _ in 0..200 {
            let c = random_cover(&mut rng, n, &spec, CoverKind::Directed);
            let w = g.cover_weight(&c).unwrap();
            check!(w >= c.cycles.len() as u64 * n as u64, "n={n}: random cover {w} too light");
        }
        optima.push(format!("n={n}:{}", r.weight));
    }
    Ok(format!("optima {}", optima.join(" ")))
}

fn refinements() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pairs = [
        (und(&[3, 4, 5, 6, 7, 8, 9, 10]), und(&[3, 4])),
        (und(&[4, 6, 8, 10, 12]), und(&[4, 6])),
        (und(&[3, 5, 6, 8, 9, 11]), und(&[3, 5])),
    ];
    let mut min_runs = 0;
    let mut worst_min = Ratio::from_integer(0u64);
    while min_runs < 500 {
        let (full, core) = &pairs[min_runs % pairs.len()];
        let allowed: Vec<u64> = full.lengths().iter().copied().filter(|&l| core.in_closure(l)).collect();
        let allowed = und(&allowed);
        let n = rng.gen_range(3..=60usize);
        if !allowed.in_closure(n as u64) {
            continue;
        }
        let g = gen_random_metric(n, GraphKind::Undirected, rng.gen(), 100).unwrap();
        let c = random_cover(&mut rng, n, &allowed, CoverKind::Undirected);
        let out = refine_min(&g, &c, core).map_err(|e| e.to_string())?;
        out.validate(n).map_err(|e| e.to_string())?;
        check!(out.lengths().iter().all(|&l| core.contains(l as u64)), "refine_min left a length outside the core");
        let (a, b) = (g.cover_weight(&out).unwrap(), g.cover_weight(&c).unwrap());
        check!(a <= 2 * b, "refine_min {a} > 2 * {b}");
        worst_min = worst_min.max(Ratio::new(a, b.max(1)));
        min_runs += 1;
    }

    let full = dir(&(2..=150).collect::<Vec<u64>>());
    let mut worst_keep = Ratio::from_integer(1u64);
    for s in [2u64, 4] {
        let sc = s_core(&full, s, 1).map_err(|e| e.to_string())?;
        for _ in 0..500 {
            let n = rng.gen_range(2..=160usize);
            let g = MetricGraph::from_fn(n, GraphKind::Directed, |_, _| rng.gen_range(0..1000));
            let c = random_cover(&mut rng, n, &full, CoverKind::Directed);
            let out = refine_max(&g, &c, &sc).map_err(|e| e.to_string())?;
            out.validate(n).map_err(|e| e.to_string())?;
            check!(out.lengths().iter().all(|&l| sc.core().contains(l as u64)), "refine_max left a dropped length");
            let (a, b) = (g.cover_weight(&out).unwrap(), g.cover_weight(&c).unwrap());
            check!(a * s >= b * (s - 1), "s={s}: kept {a} of {b}");
            if b > 0 {
                worst_keep = worst_keep.min(Ratio::new(a, b));
            }
        }
    }

    let mut checked = 0;
    let sweeps: [Vec<u64>; 4] = [
        (2..=200).collect(),
        (3..=200).step_by(2).collect(),
        (5..=200).step_by(3).collect(),
        (40..=200).collect(),
    ];
    for lengths in &sweeps {
        let spec = dir(lengths);
        for s in [2u64, 3, 4] {
            let sc = s_core(&spec, s, 1).map_err(|e| e.to_string())?;
            for &l in lengths {
                if sc.core().contains(l) {
                    continue;
                }
                let parts = sc.decompose(l).map_err(|e| e.to_string())?;
                check!(parts.iter().sum::<u64>() == l, "decomposition of {l} does not sum");
                check!(parts.len() as u64 * s <= l, "s={s}: {l} splits into {} parts", parts.len());
                checked += 1;
            }
        }
    }
    Ok(format!(
        "refine_min worst {worst_min} over 500; refine_max worst kept {worst_keep} over 1000; {checked} decompositions"
    ))
}

fn runtime_scaling() -> Outcome {
    let spec = und(&[4, 6]);
    // Per instance the fastest of three runs, then the median over nine
    // instances.
    let median = |n: usize| -> Result<f64, String> {
        let mut times = Vec::new();
        for seed in 0..9u64 {
            let g = gen_random_metric(n, GraphKind::Undirected, seed, 1000).unwrap();
            let mut fastest = f64::INFINITY;
            for _ in 0..3 {
                let start = Instant::now();
                apx_undir(&g, &spec, false).map_err(|e| e.to_string())?;
                fastest = fastest.min(start.elapsed().as_secs_f64());
            }
            times.push(fastest);
        }
        times.sort_by(f64::total_cmp);
        Ok(times[4])
    };
    let t500 = median(500)?;
    let t1000 = median(1000)?;
    let ratio = t1000 / t500;
    check!(t500 < 5.0, "n=500 took {t500:.3}s");
    check!(ratio <= 6.0, "t(1000)/t(500) = {ratio:.2}");
    Ok(format!("n=500 {t500:.3}s, n=1000 {t1000:.3}s, ratio {ratio:.2}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("frobenius machinery", frobenius),
        ("forest within twice the optimum", gw_guarantee),
        ("phase bound", phase_bound),
        ("undirected end-to-end ratio", undirected_ratio),
        ("tight family", tight_family),
        ("directed reduction", directed_reduction),
        ("circular directed separation", circular_directed),
        ("refinement bounds", refinements),
        ("runtime scaling", runtime_scaling),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
