use eiskit::characters::{enumerate_chars, CharConstraints};
use eiskit::exactmath::padic::PadicRing;
use eiskit::lambda_adic::kubota_leopoldt;
use std::time::Instant;

fn main() {
    let p = 7u64;
    for cond in [5u64, 9, 11, 12] {
        for chi in enumerate_chars(cond, CharConstraints { primitive_only: true, parity: Some(1), ..Default::default() }) {
            if chi.order() % p == 0 { continue; }
            let t = Instant::now();
            let ring = PadicRing::for_orders(p, 6, &[chi.order()]);
            let t_ring = t.elapsed();
            let t = Instant::now();
            let g = kubota_leopoldt(&chi, &ring, 8);
            println!("cond {} order {} ring {:?} KL {:?} ok={}", cond, chi.order(), t_ring, t.elapsed(), g.is_ok());
        }
    }
}
