use eiskit::characters::{enumerate_chars, CharConstraints};
use eiskit::lambda_adic::lp_interpolation_value;
use std::time::Instant;

fn main() {
    let chi = enumerate_chars(5, CharConstraints { primitive_only: true, parity: Some(1), ..Default::default() }).remove(0);
    for k in [2u32, 20, 50, 80, 98] {
        let t = Instant::now();
        let v = lp_interpolation_value(&chi, 7, k);
        println!("k={} time {:?} ok={}", k, t.elapsed(), v.is_ok());
    }
}
