//! Lambda lengths, horocyclic coordinates and the mapping class action.

use markoff::coords::{
    horocyclic_to_quad, in_fundamental_domain, mcg_apply, mcg_relations_check, quad_to_horocyclic, quad_to_lambda,
    McgWord,
};
use markoff::MarkoffQuad;
use rand::SeedableRng;

fn main() -> markoff::Result<()> {
    let q = MarkoffQuad::from_real(2.0, 5.0, 5.0, 8.0);
    let l = quad_to_lambda(&q)?;
    println!("lambda {:?}\nmu     {:?}", l.lambda, l.mu);
    let h = quad_to_horocyclic(&q)?;
    println!("horocyclic {:?}, in domain: {}", h.h, in_fundamental_domain(&h, 1e-12).inside);
    println!("back: {}", horocyclic_to_quad(&h, 1e-9)?);

    let w: McgWord = "phi1 f4 f2".parse()?;
    let image = mcg_apply(&w, &q);
    println!("{w} sends {q} to {image}; inverse gives {}", mcg_apply(&w.inverse(), &image));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let report = mcg_relations_check(50, 1e-9, &mut rng);
    for r in &report.relations {
        println!("  {:<16} {:.1e}", r.relation, r.max_deviation);
    }
    Ok(())
}
