use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpglat::group::cyclic;
use zpglat::pipeline::{second_syzygy, PipelineConfig};
use zpglat::translate::{augmentation_resolution, ext_group, extension_from_class, translate};
use zpglat::{FiniteAModule, RingContext};

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    println!("work = {}, floor = {}", ctx.work(), ctx.work() - ctx.torsion_guard());
    let g = cyclic(3).unwrap();
    let cfg = PipelineConfig::default();
    let _ = cfg;
    let aug = augmentation_resolution(ctx, &g).unwrap();
    let amod = FiniteAModule::trivial(ctx, g.clone(), vec![1]).unwrap();
    let eg = ext_group(&aug, &amod).unwrap();
    println!("ext group orders: {:?}", eg.orders);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let coc = eg.random_cocycle(&amod, &mut rng);
    let e = extension_from_class(&g, &amod, &coc).unwrap();
    println!("big group order {}, exponent {}", e.big.order(), e.big.exponent());
    let t = translate(&e, 729).unwrap();
    println!("M structure: {:?}", t.m.zp_structure());
    let (m_red, _, _) = t.m.smith_reduce().unwrap();
    println!("M_red structure: {:?}, ngens {}", m_red.zp_structure(), m_red.ngens());
    println!("M_red noisy: {}", m_red.is_noisy());
    match second_syzygy(&m_red) {
        Ok((seq, e0)) => {
            println!("syzygy ok, E rank {:?}", e0.zp_structure());
            let _ = seq;
        }
        Err(e) => println!("syzygy error: {e}"),
    }
}
