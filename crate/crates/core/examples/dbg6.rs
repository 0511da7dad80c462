use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpglat::group::cyclic;
use zpglat::pipeline::*;
use zpglat::RingContext;
fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = cyclic(3).unwrap();
    let cfg = PipelineConfig::default();
    for seed in 0..3u64 {
        eprintln!("seed {seed}: sampling");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_admissible_lattice(ctx, &g, &cfg, &mut rng).unwrap();
        eprintln!("seed {seed}: sampled rank {}; verifying", c.rank());
        match verify_main_theorem(&c, &cfg, &mut rng) {
            Ok(r) => eprintln!("seed {seed}: ok s={}", r.verdict_s),
            Err(e) => eprintln!("seed {seed}: ERR {e}"),
        }
    }
}
