use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpglat::exact::check_four_term;
use zpglat::group::{cyclic, direct_product};
use zpglat::pipeline::*;
use zpglat::RingContext;

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap());
    let cfg = PipelineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = random_admissible_lattice(ctx, &g, &cfg, &mut rng).unwrap();
    eprintln!("C rank {} noisy {} depth {}", c.rank(), c.is_noisy(), c.depth());
    let bd = build_b(&c, &cfg, &mut rng).unwrap();
    eprintln!("build_b ok; A {:?}; B {:?}", bd.amod.orders(), bd.b.zp_structure());
    match check_four_term(&bd.eff) {
        Ok(split) => eprintln!("eff cert pass {} (Y depth {})", split.cert.pass, split.y.depth()),
        Err(e) => eprintln!("eff cert ERR {e}"),
    }
    {
        let mut rng2 = ChaCha8Rng::seed_from_u64(0);
        let c2 = random_admissible_lattice(ctx, &g, &cfg, &mut rng2).unwrap();
        match verify_main_theorem(&c2, &cfg, &mut rng2) {
            Ok(r) => eprintln!("verify ok s={}", r.verdict_s),
            Err(e) => eprintln!("verify ERR {e}"),
        }
    }
    match synth_tower(&bd, &cfg) {
        Ok(t) => {
            eprintln!("tower ok |big| = {}", t.extension.big.order());
            let (m_red, _, _) = t.translation.m.smith_reduce().unwrap();
            eprintln!("m_red {:?} depth {}", m_red.zp_structure(), m_red.depth());
            match second_syzygy(&m_red) {
                Ok((seq, e)) => {
                    eprintln!("syzygy ok E rank {} depth {}", e.rank(), e.depth());
                    let _ = seq;
                }
                Err(e) => eprintln!("syzygy ERR {e}"),
            }
        }
        Err(e) => eprintln!("tower ERR {e}"),
    }
}
