use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use zpglat::group::{cyclic, direct_product, heisenberg};
use zpglat::pipeline::{random_admissible_lattice, verify_main_theorem, PipelineConfig};
use zpglat::RingContext;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "C3".into());
    let seeds: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let (p, g) = match which.as_str() {
        "C3" => (3, cyclic(3).unwrap()),
        "C9" => (3, cyclic(9).unwrap()),
        "C3xC3" => (3, direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap())),
        "C5" => (5, cyclic(5).unwrap()),
        "Heis3" => (3, heisenberg(3).unwrap()),
        other => panic!("unknown group {other}"),
    };
    let cfg = PipelineConfig::default();
    let ctx = RingContext::padded(p, 16, 8).unwrap();
    for seed in 0..seeds {
        let t0 = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = match random_admissible_lattice(ctx, &g, &cfg, &mut rng) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{which} seed {seed}: SAMPLE ERROR {e}");
                continue;
            }
        };
        let t1 = Instant::now();
        match verify_main_theorem(&c, &cfg, &mut rng) {
            Ok(r) => eprintln!(
                "{which} seed {seed}: ok s={} rankE={} rankC={} sample={:.2}s verify={:.2}s",
                r.verdict_s,
                r.verdict_rank_e,
                r.verdict_rank_c,
                (t1 - t0).as_secs_f64(),
                t1.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("{which} seed {seed}: VERIFY ERROR {e}"),
        }
    }
}
