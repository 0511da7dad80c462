use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpglat::exact::check_four_term;
use zpglat::group::cyclic;
use zpglat::pipeline::*;
use zpglat::RingContext;

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = cyclic(3).unwrap();
    let cfg = PipelineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = random_admissible_lattice(ctx, &g, &cfg, &mut rng).unwrap();
    eprintln!("C: rank {}, noisy {}, depth {}", c.rank(), c.is_noisy(), c.depth());
    let mut rng2 = ChaCha8Rng::seed_from_u64(0);
    let bd = build_b(&c, &cfg, &mut rng2).unwrap();
    eprintln!(
        "inj det val {}, A orders {:?}, B {:?}",
        c.ctx().val(bd.injection.matrix().det()),
        bd.amod.orders(),
        bd.b.zp_structure()
    );
    let split = check_four_term(&bd.eff).unwrap();
    eprintln!("cert pass {}", split.cert.pass);
    eprintln!("Y: {:?} noisy {} depth {}", split.y.zp_structure(), split.y.is_noisy(), split.y.depth());
}
