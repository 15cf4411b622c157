//! Searches `pi = x + y eta` with `x, y` in `O_K0`, relative norm `q`, and
//! prescribed depths `nu_{l_i, O_K}(pi - pi-bar)` at the primes above `ell`.
//! The `p85201.json` Weil number comes from this search.
//!
//! cargo run --release -p g2rm-core --example search_weil -- fixtures/p85201.json 85201 2 1

use g2rm_core::cmorder::{frobenius_valuations, CMFixture, LatticePosition, WeilNumber};
use g2rm_core::realquad::OmegaKind;
use num_bigint::BigInt;

/// `(a + b w)(c + d w)` with `w^2 = w + k`.
fn mul(x: (i128, i128), y: (i128, i128), k: i128) -> (i128, i128) {
    (x.0 * y.0 + x.1 * y.1 * k, x.0 * y.1 + x.1 * y.0 + x.1 * y.1)
}

fn add(x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    (x.0 + y.0, x.1 + y.1)
}

fn coords(e: &g2rm_core::realquad::RealQuadElem) -> (i128, i128) {
    let (a, b) = e.int_coords().expect("integral");
    (a.try_into().expect("small"), b.try_into().expect("small"))
}

/// Integers `(a, b)` with `|a + b w_i| <= r_i` for both embeddings `w_1 > w_2`.
fn box_points(w: [f64; 2], r: [f64; 2]) -> Vec<(i128, i128)> {
    let span = w[0] - w[1];
    let bmax = ((r[0] + r[1]) / span).ceil() as i128;
    let mut out = Vec::new();
    for b in -bmax..=bmax {
        let bf = b as f64;
        let lo = (-r[0] - bf * w[0]).max(-r[1] - bf * w[1]).ceil() as i128;
        let hi = (r[0] - bf * w[0]).min(r[1] - bf * w[1]).floor() as i128;
        out.extend((lo..=hi).map(|a| (a, b)));
    }
    out
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() != 4 {
        eprintln!("usage: search_weil <cm fixture> <q> <h1> <h2>");
        std::process::exit(2);
    }
    let fx = CMFixture::parse(&std::fs::read_to_string(&args[0]).expect("readable fixture")).expect("valid fixture");
    let q: i128 = args[1].parse().expect("q");
    let want = LatticePosition::new(args[2].parse().expect("h1"), args[3].parse().expect("h2"));
    let f = &fx.field;
    let base = f.base();
    assert_eq!(base.omega_kind(), OmegaKind::HalfInteger, "search written for d = 1 mod 4");
    let k = (base.d() as i128 - 1) / 4;
    let sd = (base.d() as f64).sqrt();
    let w = [(1.0 + sd) / 2.0, (1.0 - sd) / 2.0];
    let (t, n) = (coords(f.eta_trace()), coords(f.eta_norm()));
    // |Im sigma_i(eta)| = sqrt(-sigma_i(delta)) / 2 with delta = t^2 - 4n
    let delta = add(mul(t, t, k), (-4 * n.0, -4 * n.1));
    let im: Vec<f64> = w.iter().map(|wi| (-(delta.0 as f64 + delta.1 as f64 * wi)).sqrt() / 2.0).collect();
    let rq = (q as f64).sqrt();
    let ys = box_points(w, [rq / im[0] + 1.0, rq / im[1] + 1.0]);
    let mut hits = 0;
    let mut scanned = 0u64;
    for &y in &ys {
        let ty = mul(t, y, k);
        let ny2 = mul(n, mul(y, y, k), k);
        // |sigma(x + y t / 2)| <= sqrt(q) bounds x
        let centre: Vec<f64> = w.iter().map(|wi| (ty.0 as f64 + ty.1 as f64 * wi) / 2.0).collect();
        let r = [rq + centre[0].abs() + 1.0, rq + centre[1].abs() + 1.0];
        for x in box_points(w, r) {
            scanned += 1;
            // N(x + y eta) = x^2 + t x y + n y^2
            let nm = add(add(mul(x, x, k), mul(ty, x, k)), ny2);
            if nm != (q, 0) {
                continue;
            }
            let pi = f.elem(base.int(x.0 as i64, x.1 as i64), base.int(y.0 as i64, y.1 as i64));
            let Ok(weil) = WeilNumber::new(f, pi, BigInt::from(q)) else { continue };
            let Ok(fv) = frobenius_valuations(&weil, fx.ell) else { continue };
            if fv.depth == want {
                hits += 1;
                println!("x = {} + {} w, y = {} + {} w, Weil polynomial {:?}", x.0, x.1, y.0, y.1, weil.weil_polynomial());
            }
        }
    }
    println!("{hits} hits among {scanned} candidates");
}
