use lomap_core::scenario::load_scenario;
use lomap_core::sim::run_stepwise;
use std::time::Instant;

fn main() {
    let mut sc = load_scenario("scenarios/three_robots.toml").expect("load");
    sc.config.stop.max_iters = 40;
    let t = Instant::now();
    let out = run_stepwise(&sc);
    println!("ran {:?} iters={} visits={:?} backtracks={}", t.elapsed(), out.metrics.iterations, out.metrics.accepting_visits, out.metrics.backtracks);
    for r in out.metrics.rounds.iter() {
        println!("t={} classes={:?} maxH={} maxProd={} maxInt={}", r.t, r.class_sizes, r.max_plan_h_used, r.max_product_states, r.max_intersection_states);
    }
}
