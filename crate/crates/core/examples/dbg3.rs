use zpglat::gmodule::{cover_by_free, kernel_hom};
use zpglat::group::cyclic;
use zpglat::howell::{howell, kernel, Solver};
use zpglat::smith::lattice_row_basis;
use zpglat::translate::{augmentation_resolution, ext_group, extension_from_class, translate};
use zpglat::{FiniteAModule, PMatrix, RingContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let ctx = RingContext::padded(3, 16, 8).unwrap();
    let g = cyclic(3).unwrap();
    let aug = augmentation_resolution(ctx, &g).unwrap();
    let amod = FiniteAModule::trivial(ctx, g.clone(), vec![1]).unwrap();
    let eg = ext_group(&aug, &amod).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let coc = eg.random_cocycle(&amod, &mut rng);
    let e = extension_from_class(&g, &amod, &coc).unwrap();
    let t = translate(&e, 729).unwrap();
    let (m_red, _, _) = t.m.smith_reduce().unwrap();
    println!("M_red: ngens {}, relations {:?}", m_red.ngens(), m_red.relations());
    let (_f4, cover4) = cover_by_free(&m_red);
    println!("cover4 matrix {:?}", cover4.matrix());
    // augmented kernel
    let stacked = cover4.matrix().transpose().vstack(&m_red.relations().transpose());
    let ker = kernel(&stacked);
    println!("kernel rows {} cols {}", ker.rows(), ker.cols());
    let xspan = ker.take_cols(&(0..cover4.source().ngens()).collect::<Vec<_>>());
    let basis = lattice_row_basis(&xspan).unwrap();
    println!("basis {:?}", basis);
    // try expressing g.b_j
    let solver = Solver::new(&basis);
    for gg in 0..3usize {
        for j in 0..basis.rows() {
            let moved = cover4.source().action_of(gg).mul_vec(basis.row(j));
            if solver.solve(&moved).is_none() {
                println!("solve FAILS for g={gg} j={j}");
                let hf = howell(&basis);
                let red = hf.reduce(&moved);
                println!("  residual: {:?}", red.iter().map(|&x| ctx.val(x)).collect::<Vec<_>>());
                // is moved even in the full kernel set?
                let prod = stacked.vec_mul(&{
                    let mut v = moved.clone();
                    v.extend(vec![0u64; stacked.rows() - moved.len()]);
                    v
                });
                println!("  moved in kernel-condition? {:?}", prod.iter().map(|&x| ctx.val(x)).collect::<Vec<_>>());
                let hx = howell(&xspan);
                println!("  moved in xspan? {}", hx.contains(&moved));
                std::process::exit(0);
            }
        }
    }
    println!("all solves fine");
    let _ = kernel_hom(&cover4).map(|_| ()).map_err(|e| println!("kernel_hom err {e}"));
    let _ = PMatrix::zero(ctx, 1, 1);
}
