fn main() {
    let which: u32 = std::env::args().nth(1).unwrap().parse().unwrap();
    let quick = std::env::args().nth(2).map_or(true, |s| s == "quick");
    let r = match which {
        1 => eiskit::verify::criterion_1_gauss_norm(),
        2 => eiskit::verify::criterion_2_gauss_jacobi(),
        3 => eiskit::verify::criterion_3_epsilon_product(),
        4 => eiskit::verify::criterion_4_intertwining_oracle(quick),
        5 => eiskit::verify::criterion_5_constant_terms(quick),
        6 => eiskit::verify::criterion_6_hecke_eigensystem(quick),
        7 => eiskit::verify::criterion_7_ordinary_projector(),
        8 => eiskit::verify::criterion_8_lambda_specialization(),
        9 => eiskit::verify::criterion_9_kubota_leopoldt(),
        10 => eiskit::verify::criterion_10_ramanujan(),
        11 => eiskit::verify::criterion_11_mazur_index(),
        12 => eiskit::verify::criterion_12_c0_equivariance(),
        _ => unreachable!(),
    };
    println!("{}", r.summary_line());
    for f in r.failures.iter().take(5) {
        println!("  FAIL {}: {}", f.name, f.residual);
    }
}
