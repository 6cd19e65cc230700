// mirror case: legs ω1, ω2 (elliptic sine) over the sinh vacuum θ0 = 0,
// result θ3 = 2 atanh(−cot(Δ/2) tan((ω2−ω1)/2)); which parameter does the
// pair (θ3, ω1) satisfy?
use backlund::field::*;
use backlund::sg::*;
use std::f64::consts::PI;

fn main() {
    // small angles so the atanh argument stays inside (−1,1)
    let g = GridSpec::new(1.0, 1.0, 0.01, 0.01, 101, 101).unwrap();
    let s1 = SpectralParam::unit(0.7);
    let s2 = SpectralParam::unit(1.1);
    let w1 = one_soliton(EquationKind::EllipticSine, &s1, 0.0, 1.0, g).unwrap();
    let w2 = one_soliton(EquationKind::EllipticSine, &s2, 0.0, 1.0, g).unwrap();
    let d2 = (1.1_f64 - 0.7) / 2.0;
    let cot = d2.cos() / d2.sin();
    for (name, pf) in [("-cot", -cot), ("+cot", cot)] {
        let mut th3 = ScalarField::zeros(g, EquationKind::EllipticSinh);
        for j in 0..g.nv { for i in 0..g.nu {
            let a = pf * ((w2.at(i,j) - w1.at(i,j)) / 2.0).tan();
            if a.abs() < 1.0 - 1e-12 { th3.set(i, j, 2.0 * a.atanh()); } else { th3.invalidate(i, j); }
        }}
        // true transform of w1 with various parameter conventions
        for (pname, phi) in [("σ2", 1.1), ("-σ2", 1.1 + PI)] {
            let sp = SpectralParam::unit(phi);
            match backlund_integrate(&w1, &sp, th3.at(0,0), 1) {
                Ok(t) => println!("{name} vs {pname}: sup = {:.3e}", t.sup_distance(&th3).unwrap()),
                Err(e) => println!("{name} vs {pname}: {e}"),
            }
        }
    }
}
