use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zpglat::exact::{check_four_term, check_four_term_with, FourTermSeq};
use zpglat::group::{cyclic, direct_product};
use zpglat::pipeline::*;
use zpglat::RingContext;

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap());
    let cfg = PipelineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = random_admissible_lattice(ctx, &g, &cfg, &mut rng).unwrap();
    eprintln!("C rank {} depth {}", c.rank(), c.depth());
    let bd = build_b(&c, &cfg, &mut rng).unwrap();
    let eff_split = check_four_term(&bd.eff).unwrap();
    eprintln!(
        "eff: pass {} Y1 depth {} iotal exps {:?} mapx exps {:?}",
        eff_split.cert.pass,
        eff_split.y.depth(),
        zpglat::smith::smith_exponents(eff_split.iota.matrix())
            .iter()
            .filter(|&&e| e < 16)
            .max(),
        zpglat::smith::smith_exponents(bd.eff.map_x().matrix())
            .iter()
            .filter(|&&e| e < 16)
            .max()
    );
    let tower = synth_tower(&bd, &cfg).unwrap();
    let (m_red, _, from_red) = tower.translation.m.smith_reduce().unwrap();
    let theta_red = tower.theta.compose(&from_red);
    let (syz_seq, _e) = second_syzygy(&m_red).unwrap();
    let syz_b = FourTermSeq::new(
        syz_seq.x().clone(),
        syz_seq.p().clone(),
        syz_seq.q().clone(),
        bd.b.clone(),
        syz_seq.map_x().clone(),
        syz_seq.map_p().clone(),
        theta_red.compose(syz_seq.map_q()),
    );
    let (k1, incl1) = zpglat::gmodule::kernel_hom(syz_seq.map_q()).unwrap();
    eprintln!(
        "K1 depth {} incl exps {:?}; E depth {} mapx(E) exps {:?}",
        k1.depth(),
        zpglat::smith::smith_exponents(incl1.matrix()).iter().filter(|&&e| e < 16).max(),
        syz_seq.x().depth(),
        zpglat::smith::smith_exponents(syz_seq.map_x().matrix()).iter().filter(|&&e| e < 16).max(),
    );
    let syz_split = check_four_term_with(&syz_b, k1, incl1).unwrap();
    eprintln!("syz cert pass {}", syz_split.cert.pass);
    match schanuel_iso(&eff_split, &syz_split) {
        Ok(_) => eprintln!("schanuel OK"),
        Err(e) => eprintln!("schanuel ERR {e}"),
    }
    // orientation check: which sequence is s1/s2 in verify?
}
