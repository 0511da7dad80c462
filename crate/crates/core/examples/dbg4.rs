use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use zpglat::group::cyclic;
use zpglat::pipeline::*;
use zpglat::RingContext;

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = cyclic(3).unwrap();
    let cfg = PipelineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t0 = Instant::now();
    eprintln!("sampling...");
    let c = random_admissible_lattice(ctx, &g, &cfg, &mut rng).unwrap();
    eprintln!("sampled in {:.2}s, rank {}", t0.elapsed().as_secs_f64(), c.rank());
    let t1 = Instant::now();
    let bd = build_b(&c, &cfg, &mut rng).unwrap();
    eprintln!("build_b in {:.2}s", t1.elapsed().as_secs_f64());
    let t2 = Instant::now();
    let tower = synth_tower(&bd, &cfg).unwrap();
    eprintln!("synth_tower in {:.2}s", t2.elapsed().as_secs_f64());
    let _ = tower;
    let t3 = Instant::now();
    let r = verify_main_theorem(&c, &cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    eprintln!("verify in {:.2}s, s={}", t3.elapsed().as_secs_f64(), r.verdict_s);
}
